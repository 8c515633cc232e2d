//! Exact dyadic rationals `num / 2^shift` on a 128-bit numerator.
//!
//! Logarithmic values of takums up to 64 bits need at most 70 significant
//! bits, so a fixed-width numerator keeps the hot paths allocation free.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    shift: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, shift: 0 };

    /// Builds `num / 2^shift` in lowest terms.
    pub fn new(num: i128, shift: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros().min(shift);
        Dyadic {
            num: num >> tz,
            shift: shift - tz,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic {
            num: v as i128,
            shift: 0,
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    /// Exponent of the power-of-two denominator.
    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn floor(&self) -> i128 {
        self.num >> self.shift
    }

    /// `floor(self * 2^k)`; the caller keeps the result within 127 bits.
    pub fn floor_scaled(&self, k: u32) -> i128 {
        if k >= self.shift {
            self.num << (k - self.shift)
        } else {
            self.num >> (self.shift - k)
        }
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num, self.shift + 1)
    }

    pub fn double(&self) -> Self {
        if self.shift > 0 {
            Dyadic::new(self.num, self.shift - 1)
        } else {
            Dyadic::new(self.num * 2, 0)
        }
    }

    /// Numerator at a common denominator `2^shift` (`shift >= self.shift`).
    fn scaled_to(&self, shift: u32) -> i128 {
        self.num << (shift - self.shift)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.shift as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num),
            BigInt::from(1u8) << self.shift as usize,
        )
    }

    /// Fixed-point numerator at `prec` fractional bits; exact when `prec >= shift`.
    pub fn to_fixed(&self, prec: u32) -> BigInt {
        let n = BigInt::from(self.num);
        if prec >= self.shift {
            n << (prec - self.shift) as usize
        } else {
            n >> (self.shift - prec) as usize
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, o: Dyadic) -> Dyadic {
        let s = self.shift.max(o.shift);
        Dyadic::new(self.scaled_to(s) + o.scaled_to(s), s)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, o: Dyadic) -> Dyadic {
        self + (-o)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            shift: self.shift,
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let s = self.shift.max(o.shift);
        self.scaled_to(s).cmp(&o.scaled_to(s))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.shift)
        }
    }
}
