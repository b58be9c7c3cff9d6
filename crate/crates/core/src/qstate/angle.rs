use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// An angle jπ/4, stored as j mod 8.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(try_from = "u8", into = "u8")]
pub struct Angle8(u8);

const PHASES: [(f64, f64); 8] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

impl Angle8 {
    pub const ZERO: Angle8 = Angle8(0);
    pub const PI_4: Angle8 = Angle8(1);
    pub const PI_2: Angle8 = Angle8(2);
    pub const PI: Angle8 = Angle8(4);

    /// The angle jπ/4 for any integer j.
    pub const fn new(j: i64) -> Self {
        Angle8(j.rem_euclid(8) as u8)
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * FRAC_PI_4
    }

    /// e^{iθ}, read from a table rather than computed with sin/cos.
    pub fn phase(self) -> Complex64 {
        let (re, im) = PHASES[self.0 as usize];
        Complex64::new(re, im)
    }

    /// (−1)^bit · θ
    pub fn flipped_if(self, bit: bool) -> Self {
        if bit {
            -self
        } else {
            self
        }
    }

    /// bit · π
    pub fn pi_if(bit: bool) -> Self {
        if bit {
            Angle8::PI
        } else {
            Angle8::ZERO
        }
    }

    pub fn all() -> impl Iterator<Item = Angle8> + Clone {
        (0..8u8).map(Angle8)
    }
}

impl TryFrom<u8> for Angle8 {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        if v < 8 {
            Ok(Angle8(v))
        } else {
            Err(format!("angle index {v} outside 0..8"))
        }
    }
}

impl From<Angle8> for u8 {
    fn from(a: Angle8) -> u8 {
        a.0
    }
}

impl Add for Angle8 {
    type Output = Angle8;
    fn add(self, o: Angle8) -> Angle8 {
        Angle8((self.0 + o.0) & 7)
    }
}

impl Sub for Angle8 {
    type Output = Angle8;
    fn sub(self, o: Angle8) -> Angle8 {
        Angle8((self.0 + 8 - o.0) & 7)
    }
}

impl Neg for Angle8 {
    type Output = Angle8;
    fn neg(self) -> Angle8 {
        Angle8((8 - self.0) & 7)
    }
}

impl AddAssign for Angle8 {
    fn add_assign(&mut self, o: Angle8) {
        *self = *self + o;
    }
}

impl SubAssign for Angle8 {
    fn sub_assign(&mut self, o: Angle8) {
        *self = *self - o;
    }
}

impl Sum for Angle8 {
    fn sum<I: Iterator<Item = Angle8>>(iter: I) -> Angle8 {
        iter.fold(Angle8::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Angle8> for Angle8 {
    fn sum<I: Iterator<Item = &'a Angle8>>(iter: I) -> Angle8 {
        iter.copied().sum()
    }
}

impl fmt::Display for Angle8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            4 => write!(f, "π"),
            j => write!(f, "{j}π/4"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_wraps() {
        assert_eq!(Angle8::new(9), Angle8::PI_4);
        assert_eq!(Angle8::new(-1).value(), 7);
        assert_eq!(Angle8::new(5) + Angle8::new(6), Angle8::new(3));
        assert_eq!(Angle8::new(1) - Angle8::new(3), Angle8::new(6));
        assert_eq!(-Angle8::ZERO, Angle8::ZERO);
        assert_eq!(Angle8::PI_4.flipped_if(true), Angle8::new(7));
    }

    #[test]
    fn phase_table_matches_trig() {
        for a in Angle8::all() {
            let p = a.phase();
            assert!((p.re - a.radians().cos()).abs() < 1e-15);
            assert!((p.im - a.radians().sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn serde_rejects_out_of_range() {
        assert!(serde_json::from_str::<Angle8>("8").is_err());
        assert_eq!(serde_json::from_str::<Angle8>("3").unwrap(), Angle8::new(3));
    }
}
