mod gadget;
mod rsp;
mod sdqc;
mod server;
mod transcript;
mod ubqc;

pub use gadget::{
    extender_target, gadget_abort_rate, postselected_abort_rate, protocol3_gadget, protocol5_postselected, resource_blind_extender, CorrectionMode,
    DeferredCorrection, GadgetOutcome, GadgetParams, GadgetRun, GadgetSuccess,
};
pub use rsp::{protocol2_blind_rsp, BlindGraphState, EmitterAssignment, ExtenderKind, RspOptions, RspOutcome};
pub use sdqc::{majority, sdqc_run, SdqcConfig, SdqcOutcome, SdqcReport};
pub use server::{Deviation, DeviatingServer, HonestServer, ServerPolicy};
pub use transcript::{Direction, Message, Payload, Transcript};
pub use ubqc::{ubqc_run, DelegationSettings, StateSource, UbqcRun};
