//! Bit-level takum codec: decoding, exact encoding, rounding, width
//! conversion, ordering, and the bitwise negation and inversion rules.
//!
//! Layout, MSB first: sign `S`, direction `D`, 3-bit regime `R`, `r`
//! characteristic bits `C`, then `p = n - r - 5` mantissa bits `M`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::dyadic::Dyadic;
use crate::oracle::{self, Interval};
use crate::real::{refine, BigReal, Ell, Magnitude};
use crate::{Error, Result};

pub const MIN_WIDTH: u32 = 2;
pub const MAX_WIDTH: u32 = 64;
/// Widths below this are read with zero ghost bits appended.
pub const GHOST_WIDTH: u32 = 12;
/// Bound of the logarithmic value: `|ell| < 255`.
pub const ELL_BOUND: i64 = 255;

pub(crate) fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn check_width(width: u32) -> Result<()> {
    if (MIN_WIDTH..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(width))
    }
}

/// An `n`-bit takum pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TakumBits {
    width: u32,
    payload: u64,
}

impl TakumBits {
    pub fn new(width: u32, payload: u64) -> Result<Self> {
        check_width(width)?;
        if payload & !mask(width) != 0 {
            return Err(Error::PayloadTooWide { width, payload });
        }
        Ok(TakumBits { width, payload })
    }

    /// Masks `payload` to `width` bits; the width must be valid.
    pub(crate) fn wrap(width: u32, payload: u64) -> Self {
        debug_assert!((MIN_WIDTH..=MAX_WIDTH).contains(&width));
        TakumBits {
            width,
            payload: payload & mask(width),
        }
    }

    pub fn zero(width: u32) -> Self {
        Self::wrap(width, 0)
    }

    pub fn nar(width: u32) -> Self {
        Self::wrap(width, 1 << (width - 1))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn payload(&self) -> u64 {
        self.payload
    }

    pub fn is_zero(&self) -> bool {
        self.payload == 0
    }

    pub fn is_nar(&self) -> bool {
        self.payload == 1 << (self.width - 1)
    }

    pub fn sign_bit(&self) -> bool {
        self.payload >> (self.width - 1) == 1
    }

    /// Payload read as a two's-complement integer.
    pub fn as_signed(&self) -> i64 {
        let sh = 64 - self.width;
        ((self.payload << sh) as i64) >> sh
    }

    /// Every pattern of a width, in unsigned payload order.
    pub fn all(width: u32) -> impl Iterator<Item = TakumBits> {
        assert!(width <= 24, "exhaustive enumeration is for small widths");
        (0..1u64 << width).map(move |p| TakumBits::wrap(width, p))
    }
}

pub(crate) fn hex_digits(width: u32) -> usize {
    width.div_ceil(4) as usize
}

impl fmt::Display for TakumBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "takum{}:0x{:0w$X}",
            self.width,
            self.payload,
            w = hex_digits(self.width)
        )
    }
}

/// Parses `0x...`, `0b...` or decimal payload text.
pub(crate) fn parse_payload(s: &str) -> Result<u64> {
    let t = s.trim();
    let r = if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(&h.replace('_', ""), 16)
    } else if let Some(b) = t.strip_prefix("0b") {
        u64::from_str_radix(&b.replace('_', ""), 2)
    } else {
        t.parse::<u64>()
    };
    r.map_err(|e| Error::Parse(format!("{s}: {e}")))
}

impl FromStr for TakumBits {
    type Err = Error;

    /// Parses the canonical `takum<n>:0x<hex>` form.
    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix("takum")
            .ok_or_else(|| Error::Parse(s.to_string()))?;
        let (w, p) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(s.to_string()))?;
        let width = w.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?;
        TakumBits::new(width, parse_payload(p)?)
    }
}

/// Decoded value of a takum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TakumValue {
    Zero,
    NaR,
    /// `(-1)^S * sqrt(e)^ell`.
    Finite { negative: bool, ell: Dyadic },
}

impl TakumValue {
    pub fn to_real(&self) -> BigReal {
        match *self {
            TakumValue::Zero => BigReal::Zero,
            TakumValue::NaR => BigReal::NaR,
            TakumValue::Finite { negative, ell } => BigReal::sqrt_e_pow(negative, Ell::Exact(ell)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real().to_f64()
    }

    pub fn neg(&self) -> Self {
        match *self {
            TakumValue::Finite { negative, ell } => TakumValue::Finite {
                negative: !negative,
                ell,
            },
            v => v,
        }
    }

    /// Total order: NaR first, then by real value.
    pub fn total_cmp(&self, o: &Self) -> Ordering {
        use TakumValue::*;
        let key = |v: &TakumValue| -> (i8, Dyadic) {
            match *v {
                NaR => (-2, Dyadic::ZERO),
                Zero => (0, Dyadic::ZERO),
                Finite { negative: true, ell } => (-1, -ell),
                Finite { negative: false, ell } => (1, ell),
            }
        };
        key(self).cmp(&key(o))
    }
}

/// Raw fields of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodedFields {
    pub sign: u8,
    pub direction: u8,
    pub regime_bits: u8,
    pub r: u32,
    pub characteristic_bits: u64,
    pub c: i32,
    /// Number of physically present mantissa bits.
    pub p: u32,
    pub mantissa_bits: u64,
    pub m: Dyadic,
    pub ell: Dyadic,
}

pub(crate) fn characteristic(direction: bool, r: u32, cbits: u64) -> i32 {
    if direction {
        (1i32 << r) - 1 + cbits as i32
    } else {
        -(1i32 << (r + 1)) + 1 + cbits as i32
    }
}

/// Direction, regime field, r and characteristic field for a characteristic.
pub(crate) fn split_characteristic(c: i32) -> (bool, u8, u32, u64) {
    debug_assert!((-255..=254).contains(&c));
    if c >= 0 {
        let r = 31 - ((c + 1) as u32).leading_zeros();
        (true, r as u8, r, (c - (1 << r) + 1) as u64)
    } else {
        let r = 31 - ((-c) as u32).leading_zeros();
        (false, (7 - r) as u8, r, (c + (1 << (r + 1)) - 1) as u64)
    }
}

/// Reads the fields shared by the logarithmic and linear variants.
pub(crate) fn decode_fields(bits: TakumBits) -> DecodedFields {
    let n = bits.width;
    let (w, pay) = if n < GHOST_WIDTH {
        (GHOST_WIDTH, bits.payload << (GHOST_WIDTH - n))
    } else {
        (n, bits.payload)
    };
    let sign = (pay >> (w - 1)) as u8 & 1;
    let direction = (pay >> (w - 2)) as u8 & 1;
    let regime_bits = (pay >> (w - 5)) as u8 & 7;
    let r = if direction == 1 {
        regime_bits as u32
    } else {
        7 - regime_bits as u32
    };
    let pext = w - 5 - r;
    let characteristic_bits = (pay >> pext) & mask(r);
    let c = characteristic(direction == 1, r, characteristic_bits);
    let mext = pay & mask(pext);
    let m = Dyadic::new(mext as i128, pext);
    let p = n.saturating_sub(5 + r);
    let cm = Dyadic::from_int(c as i64) + m;
    DecodedFields {
        sign,
        direction,
        regime_bits,
        r,
        characteristic_bits,
        c,
        p,
        mantissa_bits: mext >> (pext - p),
        m,
        ell: if sign == 1 { -cm } else { cm },
    }
}

pub fn decode(bits: TakumBits) -> (TakumValue, DecodedFields) {
    let f = decode_fields(bits);
    let v = if bits.is_zero() {
        TakumValue::Zero
    } else if bits.is_nar() {
        TakumValue::NaR
    } else {
        TakumValue::Finite {
            negative: f.sign == 1,
            ell: f.ell,
        }
    };
    (v, f)
}

pub fn decode_value(bits: TakumBits) -> TakumValue {
    decode(bits).0
}

/// Sign, exponent and fraction: `(-1)^s (1 + f) 2^h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloatTriple {
    pub negative: bool,
    pub f: BigRational,
    pub h: i64,
}

impl FloatTriple {
    pub fn new(negative: bool, f: BigRational, h: i64) -> Result<Self> {
        if f < BigRational::zero() || f >= BigRational::from_integer(1.into()) {
            return Err(Error::Domain("fraction outside [0, 1)".into()));
        }
        Ok(FloatTriple { negative, f, h })
    }

    pub fn to_rational(&self) -> BigRational {
        let one = BigRational::from_integer(1.into());
        let p = BigRational::from_integer(BigInt::from(1) << self.h.unsigned_abs() as usize);
        let mag = if self.h >= 0 {
            (&one + &self.f) * p
        } else {
            (&one + &self.f) / p
        };
        if self.negative {
            -mag
        } else {
            mag
        }
    }
}

/// Mantissa of an encoding: finite, or an oracle-backed bit stream.
#[derive(Clone, Debug)]
pub enum Mantissa {
    Exact { m: Dyadic, p: u32 },
    Stream(Ell),
}

/// Unbounded-width encoding of a finite value.
#[derive(Clone, Debug)]
pub struct Encoding {
    pub negative: bool,
    pub direction: bool,
    pub regime_bits: u8,
    pub r: u32,
    pub c: i32,
    pub characteristic_bits: u64,
    pub mantissa: Mantissa,
    /// `c + m = (-1)^S ell`.
    t: Ell,
}

/// Header bits `S D R C` as an integer of `5 + r` bits.
fn header(negative: bool, c: i32) -> (u128, u32) {
    let (d, rb, r, cb) = split_characteristic(c);
    let h = ((negative as u128) << (4 + r))
        | ((d as u128) << (3 + r))
        | ((rb as u128) << r)
        | cb as u128;
    (h, 5 + r)
}

/// First `len` bits of `S D R C M...` where `mant(k)` yields the leading
/// `k` mantissa bits.
pub(crate) fn prefix_with(negative: bool, c: i32, len: u32, mant: impl Fn(u32) -> u128) -> u128 {
    let (h, hl) = header(negative, c);
    if len <= hl {
        h >> (hl - len)
    } else {
        let k = len - hl;
        (h << k) | mant(k)
    }
}

/// First `len` bits of the infinite encoding of `t = c + m` with sign `negative`.
/// `floor_t(k)` must return `floor(t * 2^k)`.
fn prefix(negative: bool, len: u32, floor_t: impl Fn(u32) -> i128) -> u128 {
    let c = floor_t(0) as i32;
    prefix_with(negative, c, len, |k| (floor_t(k) - ((c as i128) << k)) as u128)
}

impl Encoding {
    /// Zero-extends or strips the infinite bit string to exactly `i` bits.
    pub fn truncate(&self, i: u32) -> u128 {
        assert!(i <= 127);
        match &self.t {
            Ell::Exact(t) => prefix(self.negative, i, |k| t.floor_scaled(k)),
            Ell::Lazy(_) => refine(i + 32, |p| {
                let iv = self.t.interval(p)?;
                let (a, b) = (iv.lo.clone(), iv.hi.clone());
                let f = |x: &BigInt, k: u32| -> i128 { (x >> (p - k) as usize).to_i128().unwrap() };
                let lo = prefix(self.negative, i, |k| f(&a, k));
                let hi = prefix(self.negative, i, |k| f(&b, k));
                (lo == hi).then_some(lo)
            }),
        }
    }

    /// Minimal takum holding this exact encoding, if it fits in 64 bits.
    pub fn to_bits(&self) -> Option<TakumBits> {
        match self.mantissa {
            Mantissa::Exact { p, .. } => {
                let n = (5 + self.r + p).max(MIN_WIDTH);
                (n <= MAX_WIDTH).then(|| TakumBits::wrap(n, self.truncate(n) as u64))
            }
            Mantissa::Stream(_) => None,
        }
    }
}

fn encoding_from_t(negative: bool, c: i32, t: Ell) -> Encoding {
    let (direction, regime_bits, r, characteristic_bits) = split_characteristic(c);
    let mantissa = match t.exact() {
        Some(d) => {
            let m = d - Dyadic::from_int(c as i64);
            Mantissa::Exact { m, p: m.shift() }
        }
        None => Mantissa::Stream(t.clone()),
    };
    Encoding {
        negative,
        direction,
        regime_bits,
        r,
        c,
        characteristic_bits,
        mantissa,
        t,
    }
}

fn in_range(ell: Dyadic) -> bool {
    let b = Dyadic::from_int(ELL_BOUND);
    -b < ell && ell < b
}

/// Encodes `(-1)^S sqrt(e)^ell` for an exact logarithmic value.
pub fn encode_exact(negative: bool, ell: Dyadic) -> Result<Encoding> {
    if !in_range(ell) {
        return Err(Error::OutOfRange);
    }
    let t = if negative { -ell } else { ell };
    Ok(encoding_from_t(negative, t.floor() as i32, Ell::Exact(t)))
}

/// Encodes a nonzero real through its logarithm; the mantissa is a stream
/// unless the logarithm is dyadic.
pub fn encode_real(x: &BigReal) -> Result<Encoding> {
    let BigReal::Finite { negative, mag } = x else {
        return Err(Error::NotFinite);
    };
    let ell = mag.ell();
    if let Some(d) = ell.exact() {
        return encode_exact(*negative, d);
    }
    let neg = *negative;
    let range = refine(64, |p| {
        let iv = ell.interval(p)?;
        let (lo, hi) = iv.floor_scaled(0);
        if hi < BigInt::from(-ELL_BOUND) || lo >= BigInt::from(ELL_BOUND) {
            return Some(false);
        }
        (lo > BigInt::from(-ELL_BOUND) && hi < BigInt::from(ELL_BOUND)).then_some(true)
    });
    if !range {
        return Err(Error::OutOfRange);
    }
    let src = ell.clone();
    let t = if neg {
        Ell::lazy(move |p| src.interval(p).map(|iv| iv.neg()))
    } else {
        ell
    };
    let c = refine(64, |p| {
        let (a, b) = t.interval(p)?.floor_scaled(0);
        (a == b).then(|| a.to_i32().unwrap())
    });
    Ok(encoding_from_t(neg, c, t))
}

/// Encodes a float triple via `ell = 2 (h ln 2 + ln(1 + f))`.
pub fn encode_triple(x: &FloatTriple) -> Result<Encoding> {
    let r = x.to_rational();
    encode_real(&BigReal::from_rational(r))
}

/// Converts a finite takum value to `(-1)^s (1 + f) 2^h` with `f` given to
/// `prec` bits; the exponent is renormalized to base 2.
pub fn decode_to_float(v: &TakumValue, prec: u32) -> Result<FloatTriple> {
    let TakumValue::Finite { negative, ell } = *v else {
        return Err(Error::NotFinite);
    };
    let mag = Magnitude::Exp(Ell::Exact(ell));
    let h = mag.floor_log2();
    // 1 + f = exp(ell / 2 - h ln 2)
    let f = refine(prec + 16, |p| {
        let arg = Interval::from_int(0, p)
            .add(&Ell::Exact(ell.half()).interval(p)?)
            .sub(&oracle::ln2(p).mul(&Interval::from_int(h, p)));
        let e = oracle::exp(&arg.at_prec(p));
        let (a, b) = e.floor_scaled(prec);
        (a == b).then_some(a)
    });
    let one = BigInt::from(1) << prec as usize;
    let frac = (f - &one).max(BigInt::zero());
    Ok(FloatTriple {
        negative,
        f: BigRational::new(frac, one),
        h,
    })
}

/// Zero-extends or strips LSBs of a bit string held in the low `from` bits.
pub fn truncate_bits(bits: u128, from: u32, to: u32) -> u128 {
    if to >= from {
        bits << (to - from)
    } else {
        bits >> (from - to)
    }
}

pub fn truncate(b: TakumBits, i: u32) -> Result<TakumBits> {
    check_width(i)?;
    Ok(TakumBits::wrap(
        i,
        truncate_bits(b.payload as u128, b.width, i) as u64,
    ))
}

/// Guard-bit increment and the under/overflow fixups, on an `n + 1` bit prefix.
pub(crate) fn finish(t: u128, negative: bool, n: u32) -> TakumBits {
    let m = mask(n) as u128;
    let mut r = ((t >> 1) + (t & 1)) & m;
    let nar = 1u128 << (n - 1);
    if r == 0 {
        r = if negative { m } else { 1 };
    }
    if r == nar {
        r = if negative { nar + 1 } else { nar - 1 };
    }
    TakumBits::wrap(n, r as u64)
}

pub(crate) fn saturate(negative: bool, large: bool, n: u32) -> TakumBits {
    let nar = 1u64 << (n - 1);
    TakumBits::wrap(
        n,
        match (negative, large) {
            (true, true) => nar | 1,
            (true, false) => mask(n),
            (false, true) => nar - 1,
            (false, false) => 1,
        },
    )
}

/// Rounds `(-1)^S sqrt(e)^ell` to `n` bits.
pub fn round_ell(negative: bool, ell: &Ell, n: u32) -> TakumBits {
    assert!((MIN_WIDTH..=MAX_WIDTH).contains(&n));
    if let Some(d) = ell.exact() {
        return round_dyadic(negative, d, n);
    }
    refine(n + 32, |p| {
        let iv = ell.interval(p)?;
        let (lo, hi) = iv.floor_scaled(0);
        let b = BigInt::from(ELL_BOUND);
        if lo >= b {
            return Some(saturate(negative, true, n));
        }
        if hi < -&b {
            return Some(saturate(negative, false, n));
        }
        if hi >= b || lo < -&b {
            return None;
        }
        let t = if negative { iv.neg() } else { iv };
        let f = |x: &BigInt, k: u32| -> i128 { (x >> (p - k) as usize).to_i128().unwrap() };
        let a = prefix(negative, n + 1, |k| f(&t.lo, k));
        let z = prefix(negative, n + 1, |k| f(&t.hi, k));
        (a == z).then(|| finish(a, negative, n))
    })
}

/// Exact fast path of [`round_ell`].
pub fn round_dyadic(negative: bool, ell: Dyadic, n: u32) -> TakumBits {
    let b = Dyadic::from_int(ELL_BOUND);
    if ell >= b {
        return saturate(negative, true, n);
    }
    if ell <= -b {
        return saturate(negative, false, n);
    }
    let t = if negative { -ell } else { ell };
    finish(prefix(negative, n + 1, |k| t.floor_scaled(k)), negative, n)
}

/// Rounds any real to an `n`-bit takum.
pub fn round(x: &BigReal, n: u32) -> Result<TakumBits> {
    check_width(n)?;
    Ok(match x {
        BigReal::NaR => TakumBits::nar(n),
        BigReal::Zero => TakumBits::zero(n),
        BigReal::Finite { negative, mag } => round_ell(*negative, &mag.ell(), n),
    })
}

pub fn round_value(v: &TakumValue, n: u32) -> TakumBits {
    match *v {
        TakumValue::Zero => TakumBits::zero(n),
        TakumValue::NaR => TakumBits::nar(n),
        TakumValue::Finite { negative, ell } => round_dyadic(negative, ell, n),
    }
}

/// Two's-complement negation; negates the value.
pub fn negate_bits(b: TakumBits) -> TakumBits {
    TakumBits::wrap(b.width, (!b.payload).wrapping_add(1))
}

/// Keeps `S`, inverts the other bits and adds one; yields the exact reciprocal.
pub fn invert_bits(b: TakumBits) -> Result<TakumBits> {
    if b.is_nar() {
        return Err(Error::IsNaR);
    }
    let low = mask(b.width - 1);
    Ok(TakumBits::wrap(
        b.width,
        (b.payload ^ low).wrapping_add(1),
    ))
}

/// Flips only the sign bit.
pub fn flip_sign(b: TakumBits) -> TakumBits {
    TakumBits::wrap(b.width, b.payload ^ (1 << (b.width - 1)))
}

/// Signed-integer order of payloads; NaR compares below everything.
pub fn compare(a: TakumBits, b: TakumBits) -> Result<Ordering> {
    if a.width != b.width {
        return Err(Error::WidthMismatch(a.width, b.width));
    }
    Ok(a.as_signed().cmp(&b.as_signed()))
}

/// Widening appends zero bits; narrowing re-rounds.
pub fn resize(b: TakumBits, n2: u32) -> Result<TakumBits> {
    check_width(n2)?;
    if n2 >= b.width {
        Ok(TakumBits::wrap(n2, b.payload << (n2 - b.width)))
    } else {
        Ok(round_value(&decode_value(b), n2))
    }
}

/// Multi-line field dump.
pub fn dump(b: TakumBits) -> String {
    let (v, f) = decode(b);
    let m_bits = if f.p == 0 {
        "-".to_string()
    } else {
        format!("{:0w$b}", f.mantissa_bits, w = f.p as usize)
    };
    let c_bits = if f.r == 0 {
        "-".to_string()
    } else {
        format!("{:0w$b}", f.characteristic_bits, w = f.r as usize)
    };
    let value = match v {
        TakumValue::Zero => "0".to_string(),
        TakumValue::NaR => "NaR".to_string(),
        TakumValue::Finite { .. } => crate::decimal::shortest(&v.to_real()),
    };
    format!(
        "{b}\nS={} D={} R={:03b} r={} C={} c={} M={} m={} ell={}\nvalue={}",
        f.sign, f.direction, f.regime_bits, f.r, c_bits, f.c, m_bits, f.m, f.ell, value
    )
}
