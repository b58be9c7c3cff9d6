use crate::error::{Error, Result};
use crate::pulses::LeakView;
use crate::qstate::Angle8;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    /// A pulse as seen by the server.
    PulseSent { view: LeakView },
    SetS { indices: Vec<usize> },
    Abort,
    Correction { theta_bar: Angle8, m_x: bool },
    /// The bit m_x on its own (post-selected gadget).
    OutputBit { m_x: bool },
    MeasureInstruction { vertex: usize, delta: Angle8 },
    Outcome { vertex: usize, bit: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub direction: Direction,
    pub round: usize,
    #[serde(flatten)]
    pub payload: Payload,
}

/// Ordered record of every message exchanged in one execution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, direction: Direction, round: usize, payload: Payload) {
        self.messages.push(Message {
            direction,
            round,
            payload,
        });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn extend(&mut self, other: Transcript) {
        self.messages.extend(other.messages);
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m).expect("messages serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let messages = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<_>>()?;
        Ok(Self { messages })
    }
}
