//! Decimal parsing and exactly rounded decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::oracle;
use crate::real::{refine, BigReal, Magnitude};
use crate::{Error, Result};

/// A parsed decimal literal and its count of significant digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub value: BigRational,
    pub digits: usize,
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10).pow(e)
}

fn scale10(r: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        r * BigRational::from_integer(pow10(e as u32))
    } else {
        r / BigRational::from_integer(pow10((-e) as u32))
    }
}

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` exactly.
pub fn parse(s: &str) -> Result<Decimal> {
    let err = || Error::Parse(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (
            &body[..i],
            body[i + 1..].parse::<i64>().map_err(|_| err())?,
        ),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int}{frac}");
    let digits = all.trim_start_matches('0').len();
    let n: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| err())?
    };
    let n = if neg { -n } else { n };
    let value = scale10(&BigRational::from_integer(n), exp - frac.len() as i64);
    Ok(Decimal { value, digits })
}

/// `floor(mag * r)` and whether the product is an integer, for `r > 0`.
fn floor_times(mag: &Magnitude, r: &BigRational) -> (BigInt, bool) {
    if let Some(x) = mag.exact_rational() {
        let p = x * r;
        let (q, rem) = p.numer().div_mod_floor(p.denom());
        return (q, rem.is_zero());
    }
    if let Magnitude::Sqrt(x) = mag {
        let s = x * r * r;
        let f = s.numer().div_floor(s.denom()).sqrt();
        let exact = BigRational::from_integer(&f * &f) == s;
        return (f, exact);
    }
    let lg = oracle::floor_log2(r);
    refine(64, |p| {
        let v = mag.value_interval(p + 8 + (mag.floor_log2() + lg).max(0) as u32);
        let a = (v.lo_rational() * r).floor().to_integer();
        let b = (v.hi_rational() * r).floor().to_integer();
        (a == b).then_some((a, false))
    })
}

/// `floor(log10(mag))`.
pub fn floor_log10(mag: &Magnitude) -> i64 {
    let mut e = (mag.floor_log2() as f64 * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        let (q, _) = floor_times(mag, &scale10(&BigRational::one(), -e));
        if q.is_zero() {
            e -= 1;
        } else if q >= BigInt::from(10) {
            e += 1;
        } else {
            return e;
        }
    }
}

/// Rounds to `d` significant digits, ties to even; returns `(digits, exp10)`.
pub fn round_sig(mag: &Magnitude, d: usize) -> (BigInt, i64) {
    assert!(d >= 1);
    let mut e = floor_log10(mag);
    let scale = |e: i64| scale10(&BigRational::from_integer(2.into()), d as i64 - 1 - e);
    let (q, exact) = floor_times(mag, &scale(e));
    let tie = exact && q.is_odd();
    let mut n: BigInt = (&q + 1) >> 1usize;
    if tie && n.is_odd() {
        n -= 1;
    }
    if n == pow10(d as u32) {
        n = pow10(d as u32 - 1);
        e += 1;
    }
    (n, e)
}

fn render(negative: bool, n: &BigInt, e: i64) -> String {
    let s = n.to_string();
    let sign = if negative { "-" } else { "" };
    if s.len() == 1 {
        format!("{sign}{s}e{e}")
    } else {
        format!("{sign}{}.{}e{e}", &s[..1], &s[1..])
    }
}

/// Renders with exactly `d` significant digits; zero prints as `0`.
pub fn to_sig_string(x: &BigReal, d: usize) -> String {
    match x {
        BigReal::NaR => "NaR".into(),
        BigReal::Zero => "0".into(),
        BigReal::Finite { negative, mag } => {
            let (n, e) = round_sig(mag, d);
            render(*negative, &n, e)
        }
    }
}

/// Digits of the intermediate printout used by [`to_sig_string_twice`].
pub const TABLE_PRINT_DIGITS: usize = 11;

/// Two-stage rendering: a printout at [`TABLE_PRINT_DIGITS`] significant
/// digits (ties to even), re-rounded to `d` digits with ties away from
/// zero. Differs from [`to_sig_string`] only when the digits past
/// position `d` start with `4` and the printout carried that into a `5`.
pub fn to_sig_string_twice(x: &BigReal, d: usize) -> String {
    let BigReal::Finite { negative, mag } = x else {
        return to_sig_string(x, d);
    };
    if d >= TABLE_PRINT_DIGITS {
        return to_sig_string(x, d);
    }
    let (n1, mut e) = round_sig(mag, TABLE_PRINT_DIGITS);
    let drop = pow10((TABLE_PRINT_DIGITS - d) as u32);
    let (q, r) = n1.div_rem(&drop);
    let mut n = if r * 2 >= drop { q + 1 } else { q };
    if n == pow10(d as u32) {
        n = pow10(d as u32 - 1);
        e += 1;
    }
    render(*negative, &n, e)
}

/// Round-to-nearest-even onto a `bits`-bit binary significand: `(sig, exp)`.
fn binary_round(mag: &Magnitude, bits: u32) -> (BigInt, i64) {
    let lg = mag.floor_log2();
    let k = bits as i64 - 1 - lg;
    let (q, exact) = mag.floor_scaled(k + 1);
    let tie = exact && q.is_odd();
    let mut n: BigInt = (&q + 1) >> 1usize;
    if tie && n.is_odd() {
        n -= 1;
    }
    (n, -k)
}

fn binary_round_rational(r: &BigRational, bits: u32) -> (BigInt, i64) {
    binary_round(&Magnitude::Rational(r.abs()), bits)
}

fn normalize(sig: BigInt, exp: i64) -> (BigInt, i64) {
    if sig.is_zero() {
        return (sig, 0);
    }
    let tz = sig.trailing_zeros().unwrap_or(0);
    (sig >> tz as usize, exp + tz as i64)
}

/// Shortest decimal whose 80-bit binary rounding matches that of `x`.
pub fn shortest(x: &BigReal) -> String {
    let BigReal::Finite { negative, mag } = x else {
        return to_sig_string(x, 1);
    };
    let target = {
        let (s, e) = binary_round(mag, 80);
        normalize(s, e)
    };
    for d in 1..=40 {
        let (n, e) = round_sig(mag, d);
        let cand = scale10(&BigRational::from_integer(n.clone()), e - (d as i64 - 1));
        let (s, be) = binary_round_rational(&cand, 80);
        if normalize(s, be) == target {
            return render(*negative, &n, e);
        }
    }
    to_sig_string(x, 40)
}

/// Approximate `f64` of a decimal string (used only for plotting columns).
pub fn to_f64(r: &BigRational) -> f64 {
    let v = r.to_f64();
    v.unwrap_or_else(|| crate::real::ratio_to_f64(r))
}
