use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An integer or half-integer, stored as twice its value so that angular
/// momentum bookkeeping stays exact.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInteger(twice)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInteger(2 * value)
    }

    /// Accepts a float only if it is an exact multiple of 1/2.
    pub fn try_from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::InvalidAngularMomentum(format!("{value} is not a half-integer")));
        }
        Ok(HalfInteger(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInteger(self.0.abs())
    }

    /// The integer value; `None` for proper half-integers.
    pub fn as_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    /// Projections `j, j−1, …, −j` (descending), the basis order used for
    /// every spin-`j` matrix in this crate: row `i` carries `m = j − i`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInteger> + Clone {
        let j2 = self.0;
        (0..=j2).map(move |k| HalfInteger(j2 - 2 * k))
    }

    /// `2j + 1`.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1) as usize
    }

    /// `(−1)^x` evaluated as `e^{iπx}`, which for a half-integer is `±i`.
    pub fn minus_one_pow(self) -> Complex64 {
        match self.0.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// Row index of projection `m` in a spin-`j` matrix.
pub fn projection_index(j: HalfInteger, m: HalfInteger) -> usize {
    ((j.twice() - m.twice()) / 2) as usize
}

/// `(−1)^n` for an integer-valued `HalfInteger`; panics on half-integers.
pub(crate) fn integer_sign(x: HalfInteger) -> f64 {
    let n = x.as_int().expect("integer-valued phase exponent");
    if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    /// Parses `"3/2"`, `"1"` or `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad(s))?;
            match den.trim() {
                "2" => Ok(HalfInteger(num)),
                "1" => Ok(HalfInteger::from_int(num)),
                _ => Err(bad(s)),
            }
        } else {
            let v: f64 = s.parse().map_err(|_| bad(s))?;
            HalfInteger::try_from_f64(v)
        }
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidAngularMomentum(format!("cannot parse {s:?} as a half-integer"))
}
