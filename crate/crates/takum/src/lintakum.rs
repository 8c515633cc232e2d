//! Linear takums: the takum header with a base-2 significand,
//! `[(1 - 3S) + f] * 2^e` where `e = (-1)^S (c + S)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bitcodec::{
    check_width, decode_fields, finish, hex_digits, prefix_with, saturate, FloatTriple,
    TakumBits,
};
use crate::dyadic::Dyadic;
use crate::real::BigReal;
use crate::{Error, Result};

/// Exponent bound: linear takums live in `(2^-255, 2^255)`.
pub const EXP_BOUND: i64 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinearTakumValue {
    Zero,
    NaR,
    Finite { negative: bool, f: Dyadic, e: i32 },
}

impl LinearTakumValue {
    /// Exact value; `None` only for NaR.
    pub fn to_rational(&self) -> Option<BigRational> {
        let (negative, f, e) = match *self {
            LinearTakumValue::Finite { negative, f, e } => (negative, f, e),
            LinearTakumValue::Zero => return Some(BigRational::zero()),
            LinearTakumValue::NaR => return None,
        };
        let base = if negative { -2 } else { 1 };
        let sig = Dyadic::from_int(base) + f;
        let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs() as usize);
        Some(if e >= 0 {
            sig.to_rational() * p
        } else {
            sig.to_rational() / p
        })
    }

    pub fn to_real(&self) -> BigReal {
        match self {
            LinearTakumValue::Zero => BigReal::Zero,
            LinearTakumValue::NaR => BigReal::NaR,
            v => BigReal::from_rational(v.to_rational().unwrap()),
        }
    }
}

/// `lintakum<n>:0x<hex>` rendering of a pattern.
pub struct LinearText(pub TakumBits);

impl fmt::Display for LinearText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lintakum{}:0x{:0w$X}",
            self.0.width(),
            self.0.payload(),
            w = hex_digits(self.0.width())
        )
    }
}

pub fn parse_text(s: &str) -> Result<TakumBits> {
    let rest = s
        .strip_prefix("lin")
        .ok_or_else(|| Error::Parse(s.to_string()))?;
    rest.parse()
}

pub fn lin_decode(bits: TakumBits) -> LinearTakumValue {
    if bits.is_zero() {
        return LinearTakumValue::Zero;
    }
    if bits.is_nar() {
        return LinearTakumValue::NaR;
    }
    let fl = decode_fields(bits);
    let s = fl.sign as i32;
    LinearTakumValue::Finite {
        negative: s == 1,
        f: fl.m,
        e: if s == 1 { -(fl.c + 1) } else { fl.c },
    }
}

/// Header characteristic and significand fraction of a linear encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEncoding {
    pub negative: bool,
    pub c: i32,
    pub f: BigRational,
}

impl LinearEncoding {
    pub fn truncate(&self, i: u32) -> u128 {
        prefix_with(self.negative, self.c, i, |k| {
            let s = &self.f * BigRational::from_integer(BigInt::one() << k as usize);
            s.floor().to_integer().to_u128().unwrap()
        })
    }

    /// Exact value `[(1 - 3S) + f] 2^e`.
    pub fn value(&self) -> BigRational {
        let s = self.negative as i32;
        let e = if s == 1 { -(self.c + 1) } else { self.c };
        let sig = BigRational::from_integer(BigInt::from(1 - 3 * s)) + &self.f;
        let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs() as usize);
        if e >= 0 {
            sig * p
        } else {
            sig / p
        }
    }

    pub fn to_bits(&self, n: u32) -> Result<TakumBits> {
        check_width(n)?;
        let b = TakumBits::new(n, self.truncate(n) as u64)?;
        if lin_value_rational(b) != Some(self.value()) {
            return Err(Error::Domain(format!("not representable in {n} bits")));
        }
        Ok(b)
    }
}

/// Encodes a float triple `(-1)^s (1 + g) 2^h`, including the borrow for
/// negative significands.
pub fn lin_encode(t: &FloatTriple) -> Result<LinearEncoding> {
    let g = &t.f;
    if t.h < -EXP_BOUND || t.h >= EXP_BOUND || (t.h == -EXP_BOUND && g.is_zero()) {
        return Err(Error::OutOfRange);
    }
    let h = t.h as i32;
    let (c, f) = if !t.negative {
        (h, g.clone())
    } else if g.is_zero() {
        (-h, BigRational::zero())
    } else {
        (-h - 1, BigRational::one() - g)
    };
    Ok(LinearEncoding {
        negative: t.negative,
        c,
        f,
    })
}

pub fn lin_decode_to_float(v: &LinearTakumValue) -> Result<FloatTriple> {
    let LinearTakumValue::Finite { negative, f, e } = *v else {
        return Err(Error::NotFinite);
    };
    let f = f.to_rational();
    let e = e as i64;
    Ok(if !negative {
        FloatTriple { negative, f, h: e }
    } else if f.is_zero() {
        FloatTriple {
            negative,
            f,
            h: e + 1,
        }
    } else {
        FloatTriple {
            negative,
            f: BigRational::one() - f,
            h: e,
        }
    })
}

/// Rounding with base-2 saturation bounds.
pub fn lin_round(x: &BigReal, n: u32) -> Result<TakumBits> {
    check_width(n)?;
    let (negative, mag) = match x {
        BigReal::NaR => return Ok(TakumBits::nar(n)),
        BigReal::Zero => return Ok(TakumBits::zero(n)),
        BigReal::Finite { negative, mag } => (*negative, mag),
    };
    let h = mag.floor_log2();
    let (one, pow2_exact) = mag.floor_scaled(-h);
    let power = pow2_exact && one == BigInt::one();
    if h >= EXP_BOUND {
        return Ok(saturate(negative, true, n));
    }
    if h < -EXP_BOUND || (h == -EXP_BOUND && power) {
        return Ok(saturate(negative, false, n));
    }
    let hh = h as i32;
    let c = if !negative {
        hh
    } else if power {
        -hh
    } else {
        -hh - 1
    };
    let mant = |k: u32| -> u128 {
        // floor(g 2^k) = floor(|x| 2^(k-h)) - 2^k
        let (q, exact) = mag.floor_scaled(k as i64 - h);
        let g = q - (BigInt::one() << k as usize);
        let g = g.to_u128().unwrap();
        if !negative || power {
            if negative {
                0
            } else {
                g
            }
        } else {
            // floor((1 - g) 2^k) = 2^k - ceil(g 2^k)
            (1u128 << k) - g - (!exact) as u128
        }
    };
    Ok(finish(prefix_with(negative, c, n + 1, mant), negative, n))
}

/// Lossless conversion used by tests: every pattern as a rational.
pub fn lin_value_rational(bits: TakumBits) -> Option<BigRational> {
    lin_decode(bits).to_rational()
}
