//! Reference codecs: posits with two exponent bits and IEEE-754 style
//! binary formats, plus a [`Format`] handle that dispatches between them
//! and takums.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bitcodec::{self, decode_value, TakumBits};
use crate::dyadic::Dyadic;
use crate::lintakum;
use crate::real::{BigReal, Magnitude};
use crate::{Error, Result};

fn pow2_rational(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Decoded posit: `[(1 - 3S) + f] * 2^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositValue {
    Zero,
    NaR,
    Finite { negative: bool, f: Dyadic, e: i32 },
}

impl PositValue {
    /// Exact value; `None` only for NaR.
    pub fn to_rational(&self) -> Option<BigRational> {
        let (negative, f, e) = match *self {
            PositValue::Finite { negative, f, e } => (negative, f, e),
            PositValue::Zero => return Some(BigRational::zero()),
            PositValue::NaR => return None,
        };
        let base = Dyadic::from_int(if negative { -2 } else { 1 });
        Some((base + f).to_rational() * pow2_rational(e as i64))
    }

    pub fn to_real(&self) -> BigReal {
        match self {
            PositValue::Zero => BigReal::Zero,
            PositValue::NaR => BigReal::NaR,
            v => BigReal::from_rational(v.to_rational().unwrap()),
        }
    }
}

/// Field breakdown of a posit pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositFields {
    pub sign: u8,
    /// Length of the regime run.
    pub k: u32,
    pub r: i32,
    pub e: u32,
    pub p: u32,
    pub fraction_bits: u64,
}

fn check_posit_width(n: u32) -> Result<()> {
    if (2..=64).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(n))
    }
}

/// Reads the fields of a posit; patterns shorter than five bits get ghost zeros.
pub fn posit_fields(n: u32, payload: u64) -> PositFields {
    let big = n.max(5);
    let b = (payload as u128) << (big - n);
    let bit = |i: u32| -> u8 { ((b >> i) & 1) as u8 };
    let sign = bit(big - 1);
    let first = bit(big - 2);
    let mut k = 0;
    while k < big - 1 && bit(big - 2 - k) == first {
        k += 1;
    }
    let r = if first == 1 { k as i32 - 1 } else { -(k as i32) };
    // remaining bits after the run and its terminator, zero-extended
    let rest_len = (big - 1).saturating_sub(k + 1);
    let rest = b & ((1u128 << rest_len) - 1);
    let take = |len: u32, from: u32, v: u128| -> (u128, u32) {
        if from >= len {
            (v >> (from - len), from - len)
        } else {
            (v << (len - from), 0)
        }
    };
    let (e, left) = take(2, rest_len, rest);
    let p = left;
    let fraction_bits = (rest & ((1u128 << p) - 1)) as u64;
    PositFields {
        sign,
        k,
        r,
        e: e as u32 & 3,
        p,
        fraction_bits,
    }
}

pub fn posit_decode(n: u32, payload: u64) -> PositValue {
    if payload == 0 {
        return PositValue::Zero;
    }
    if payload == 1 << (n - 1) {
        return PositValue::NaR;
    }
    let fl = posit_fields(n, payload);
    let s = fl.sign as i32;
    let e = 4 * fl.r + fl.e as i32 + s;
    PositValue::Finite {
        negative: s == 1,
        f: Dyadic::new(fl.fraction_bits as i128, fl.p),
        e: if s == 1 { -e } else { e },
    }
}

/// Largest finite posit exponent: values lie in `[2^(8-4n), 2^(4n-8)]`.
pub fn posit_max_exponent(n: u32) -> i64 {
    4 * n as i64 - 8
}

/// Rounds onto an `n`-bit posit: round-to-nearest-even on the bit string,
/// saturating to the smallest or largest magnitude instead of reaching
/// zero or NaR.
pub fn posit_round(x: &BigReal, n: u32) -> Result<u64> {
    check_posit_width(n)?;
    let (negative, mag) = match x {
        BigReal::NaR => return Ok(1 << (n - 1)),
        BigReal::Zero => return Ok(0),
        BigReal::Finite { negative, mag } => (*negative, mag),
    };
    let body = posit_round_magnitude(mag, n);
    Ok(if negative {
        body.wrapping_neg() & bitcodec_mask(n)
    } else {
        body
    })
}

fn bitcodec_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

fn posit_round_magnitude(mag: &Magnitude, n: u32) -> u64 {
    let top = posit_max_exponent(n);
    let len = n - 1;
    let maxpos = (1u64 << len) - 1;
    let h = mag.floor_log2();
    let (lead, exact_pow) = mag.floor_scaled(-h);
    let is_pow2 = exact_pow && lead.is_one();
    if h >= top {
        return maxpos;
    }
    if h < -top || (h == -top && is_pow2) {
        return 1;
    }
    let r = h.div_euclid(4);
    let e = h.rem_euclid(4) as u128;
    let (regime, rl): (u128, u32) = if r >= 0 {
        let k = r as u32 + 1;
        (((1u128 << k) - 1) << 1, k + 1)
    } else {
        (1, (-r) as u32 + 1)
    };
    let header = (regime << 2) | e;
    let hl = rl + 2;
    let want = len + 1;
    let (prefix, sticky) = if want <= hl {
        let cut = hl - want;
        let rest = header & ((1u128 << cut) - 1);
        (header >> cut, rest != 0 || !is_pow2)
    } else {
        let fb = want - hl;
        let (q, exact) = mag.floor_scaled(fb as i64 - h);
        let frac = q - (BigInt::one() << fb as usize);
        ((header << fb) | frac.to_u128().unwrap(), !exact)
    };
    let mut v = (prefix >> 1) as u64;
    if prefix & 1 == 1 && (sticky || v & 1 == 1) {
        v += 1;
    }
    v.clamp(1, maxpos)
}

/// Parameters of an IEEE-754 style binary format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormatDescriptor {
    pub name: &'static str,
    pub n_e: u32,
    pub n_f: u32,
    pub subnormals: bool,
}

pub const FLOAT8: FormatDescriptor = FormatDescriptor { name: "float8", n_e: 4, n_f: 3, subnormals: true };
pub const FLOAT16: FormatDescriptor = FormatDescriptor { name: "float16", n_e: 5, n_f: 10, subnormals: true };
pub const BFLOAT16: FormatDescriptor = FormatDescriptor { name: "bfloat16", n_e: 8, n_f: 7, subnormals: false };
pub const TF32: FormatDescriptor = FormatDescriptor { name: "TF32", n_e: 8, n_f: 10, subnormals: false };
pub const FLOAT32: FormatDescriptor = FormatDescriptor { name: "float32", n_e: 8, n_f: 23, subnormals: true };
pub const FLOAT64: FormatDescriptor = FormatDescriptor { name: "float64", n_e: 11, n_f: 52, subnormals: true };
pub const FLOAT128: FormatDescriptor = FormatDescriptor { name: "float128", n_e: 15, n_f: 112, subnormals: true };
pub const FLOAT256: FormatDescriptor = FormatDescriptor { name: "float256", n_e: 19, n_f: 236, subnormals: true };

pub const IEEE_FORMATS: [FormatDescriptor; 8] =
    [FLOAT8, FLOAT16, BFLOAT16, TF32, FLOAT32, FLOAT64, FLOAT128, FLOAT256];

/// Widest format the bit-level codec handles (payloads live in a `u128`).
pub const IEEE_CODEC_MAX_WIDTH: u32 = 128;

pub fn ieee_by_name(name: &str) -> Option<FormatDescriptor> {
    IEEE_FORMATS
        .iter()
        .copied()
        .find(|f| f.name.eq_ignore_ascii_case(name))
}

/// Decoded IEEE value; finite values are `sig * 2^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IeeeValue {
    Zero { negative: bool },
    Infinite { negative: bool },
    NaN,
    Finite { negative: bool, sig: u128, exp: i32 },
}

impl IeeeValue {
    pub fn to_rational(&self) -> Option<BigRational> {
        match *self {
            IeeeValue::Zero { .. } => Some(BigRational::zero()),
            IeeeValue::Finite { negative, sig, exp } => {
                let v = BigRational::from_integer(BigInt::from(sig)) * pow2_rational(exp as i64);
                Some(if negative { -v } else { v })
            }
            _ => None,
        }
    }

    /// Infinities and NaN have no real value and map to NaR.
    pub fn to_real(&self) -> BigReal {
        match self.to_rational() {
            Some(r) => BigReal::from_rational(r),
            None => BigReal::NaR,
        }
    }
}

impl FormatDescriptor {
    pub fn width(&self) -> u32 {
        1 + self.n_e + self.n_f
    }

    pub fn bias(&self) -> i64 {
        (1i64 << (self.n_e - 1)) - 1
    }

    /// Exponent of the smallest normal number.
    pub fn emin(&self) -> i64 {
        1 - self.bias()
    }

    pub fn emax(&self) -> i64 {
        self.bias()
    }

    fn check_codec(&self) -> Result<()> {
        if self.width() > IEEE_CODEC_MAX_WIDTH {
            Err(Error::UnsupportedFormat(self.name.to_string()))
        } else {
            Ok(())
        }
    }

    fn exp_field_max(&self) -> u128 {
        (1u128 << self.n_e) - 1
    }

    fn pack(&self, negative: bool, exp_field: u128, frac: u128) -> u128 {
        ((negative as u128) << (self.n_e + self.n_f)) | (exp_field << self.n_f) | frac
    }

    /// Decodes a payload; formats without subnormals read them as zero.
    pub fn decode(&self, payload: u128) -> Result<IeeeValue> {
        self.check_codec()?;
        let negative = (payload >> (self.n_e + self.n_f)) & 1 == 1;
        let ef = (payload >> self.n_f) & self.exp_field_max();
        let frac = payload & ((1u128 << self.n_f) - 1);
        let nf = self.n_f as i64;
        Ok(if ef == self.exp_field_max() {
            if frac == 0 {
                IeeeValue::Infinite { negative }
            } else {
                IeeeValue::NaN
            }
        } else if ef == 0 {
            if frac == 0 || !self.subnormals {
                IeeeValue::Zero { negative }
            } else {
                IeeeValue::Finite {
                    negative,
                    sig: frac,
                    exp: (self.emin() - nf) as i32,
                }
            }
        } else {
            IeeeValue::Finite {
                negative,
                sig: frac | (1u128 << self.n_f),
                exp: (ef as i64 - self.bias() - nf) as i32,
            }
        })
    }

    /// Canonical quiet NaN.
    pub fn nan(&self) -> u128 {
        self.pack(false, self.exp_field_max(), 1u128 << (self.n_f - 1))
    }

    /// Round-to-nearest-even with overflow to infinity. Without subnormals,
    /// results below the normal range flush to zero.
    pub fn round(&self, x: &BigReal) -> Result<u128> {
        self.check_codec()?;
        let (negative, mag) = match x {
            BigReal::NaR => return Ok(self.nan()),
            BigReal::Zero => return Ok(0),
            BigReal::Finite { negative, mag } => (*negative, mag),
        };
        let nf = self.n_f as i64;
        let h = mag.floor_log2();
        if h > self.emax() {
            return Ok(self.pack(negative, self.exp_field_max(), 0));
        }
        let eq = if self.subnormals { h.max(self.emin()) } else { h };
        // guard bit included
        let (q, exact) = mag.floor_scaled(nf + 1 - eq);
        let q = q.to_u128().unwrap_or(0);
        let mut sig = q >> 1;
        if q & 1 == 1 && (!exact || sig & 1 == 1) {
            sig += 1;
        }
        let mut e = eq;
        if sig >> (self.n_f + 1) != 0 {
            sig >>= 1;
            e += 1;
        }
        if e > self.emax() {
            return Ok(self.pack(negative, self.exp_field_max(), 0));
        }
        let normal = sig >> self.n_f != 0;
        if !normal || e < self.emin() {
            if !self.subnormals || sig == 0 {
                return Ok(self.pack(negative, 0, 0));
            }
            return Ok(self.pack(negative, 0, sig));
        }
        let ef = (e + self.bias()) as u128;
        Ok(self.pack(negative, ef, sig & ((1u128 << self.n_f) - 1)))
    }

    /// Largest finite value `(2 - 2^-n_f) 2^emax`.
    pub fn max_value(&self) -> BigRational {
        (BigRational::from_integer(2.into()) - pow2_rational(-(self.n_f as i64))) * pow2_rational(self.emax())
    }

    pub fn min_normal(&self) -> BigRational {
        pow2_rational(self.emin())
    }

    pub fn min_subnormal(&self) -> Option<BigRational> {
        self.subnormals
            .then(|| pow2_rational(self.emin() - self.n_f as i64))
    }
}

/// Any number format handled by the evaluation tools.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Takum(u32),
    LinearTakum(u32),
    Posit(u32),
    Ieee(FormatDescriptor),
}

/// A decoded value of any format.
#[derive(Clone, Debug)]
pub enum FormatValue {
    NaR,
    NaN,
    Infinite { negative: bool },
    Real(BigReal),
}

impl Format {
    pub fn width(&self) -> u32 {
        match self {
            Format::Takum(n) | Format::LinearTakum(n) | Format::Posit(n) => *n,
            Format::Ieee(fd) => fd.width(),
        }
    }

    pub fn is_takum(&self) -> bool {
        matches!(self, Format::Takum(_))
    }

    pub fn decode(&self, payload: u128) -> Result<FormatValue> {
        let small = || -> Result<u64> {
            let n = self.width();
            if n < 64 && payload >> n != 0 {
                return Err(Error::PayloadTooWide {
                    width: n,
                    payload: payload as u64,
                });
            }
            u64::try_from(payload).map_err(|_| Error::Parse("payload too wide".into()))
        };
        Ok(match self {
            Format::Takum(n) => {
                let v = decode_value(TakumBits::new(*n, small()?)?);
                real_or_nar(v.to_real())
            }
            Format::LinearTakum(n) => {
                real_or_nar(lintakum::lin_decode(TakumBits::new(*n, small()?)?).to_real())
            }
            Format::Posit(n) => {
                check_posit_width(*n)?;
                real_or_nar(posit_decode(*n, small()?).to_real())
            }
            Format::Ieee(fd) => {
                if fd.width() < 128 && payload >> fd.width() != 0 {
                    return Err(Error::Parse(format!("payload too wide for {}", fd.name)));
                }
                match fd.decode(payload)? {
                    IeeeValue::NaN => FormatValue::NaN,
                    IeeeValue::Infinite { negative } => FormatValue::Infinite { negative },
                    v => FormatValue::Real(v.to_real()),
                }
            }
        })
    }

    /// Rounds a real with the format's own rounding rule.
    pub fn round(&self, x: &BigReal) -> Result<u128> {
        Ok(match self {
            Format::Takum(n) => bitcodec::round(x, *n)?.payload() as u128,
            Format::LinearTakum(n) => lintakum::lin_round(x, *n)?.payload() as u128,
            Format::Posit(n) => posit_round(x, *n)? as u128,
            Format::Ieee(fd) => fd.round(x)?,
        })
    }

    pub fn hex(&self, payload: u128) -> String {
        format!("{self}:0x{:0w$X}", payload, w = self.width().div_ceil(4) as usize)
    }
}

fn real_or_nar(x: BigReal) -> FormatValue {
    if x.is_nar() {
        FormatValue::NaR
    } else {
        FormatValue::Real(x)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Format::Takum(n) => write!(f, "takum{n}"),
            Format::LinearTakum(n) => write!(f, "lintakum{n}"),
            Format::Posit(n) => write!(f, "posit{n}"),
            Format::Ieee(fd) => f.write_str(fd.name),
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let width = |rest: &str| -> Result<u32> {
            let n: u32 = rest
                .parse()
                .map_err(|_| Error::UnknownFormat(s.to_string()))?;
            if (2..=64).contains(&n) {
                Ok(n)
            } else {
                Err(Error::InvalidWidth(n))
            }
        };
        let lower = t.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("lintakum") {
            return Ok(Format::LinearTakum(width(rest)?));
        }
        if let Some(rest) = lower.strip_prefix("takum") {
            return Ok(Format::Takum(width(rest)?));
        }
        if let Some(rest) = lower.strip_prefix("posit") {
            return Ok(Format::Posit(width(rest)?));
        }
        ieee_by_name(t)
            .map(Format::Ieee)
            .ok_or_else(|| Error::UnknownFormat(s.to_string()))
    }
}
