//! Closed-form quantities: waste ratios, mantissa bit counts, machine
//! precision bounds, coding costs and dynamic ranges.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bitcodec::{self, decode, encode_real, TakumBits, TakumValue};
use crate::oracle::{self, Interval};
use crate::real::{refine, BigReal};
use crate::refformats::{posit_decode, posit_max_exponent, Format, FormatDescriptor};
use crate::{Error, Result};

fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Fraction of IEEE bit strings that are redundant (NaN payloads, the
/// second zero, flushed subnormals) or, once `n_e >= 9`, encode exponents
/// outside the takum dynamic range:
///
/// `[1 + [n_e >= 9](2^n_e - 370) + [n_e >= 9 or no subnormals]] 2^-n_e - 3 2^(-1-n_e-n_f)`
pub fn ieee_waste_ratio(n_e: u32, n_f: u32, subnormals: bool) -> Result<BigRational> {
    if n_e < 2 {
        return Err(Error::Domain(format!("n_e = {n_e} < 2")));
    }
    let wide = n_e >= 9;
    let mut count = BigRational::one();
    if wide {
        count += BigRational::from_integer((BigInt::one() << n_e as usize) - 370);
    }
    if wide || !subnormals {
        count += BigRational::one();
    }
    Ok(count * pow2(-(n_e as i64)) - BigRational::from_integer(3.into()) * pow2(-1 - n_e as i64 - n_f as i64))
}

pub fn ieee_waste_ratio_of(fd: &FormatDescriptor) -> BigRational {
    ieee_waste_ratio(fd.n_e, fd.n_f, fd.subnormals).expect("descriptor has n_e >= 2")
}

/// Redundant posit patterns appear only once the regime can exceed the
/// takum range: `0` for `n <= 47`, `2^-46` beyond.
pub fn posit_waste_ratio(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidWidth(n));
    }
    Ok(if n <= 47 { BigRational::zero() } else { pow2(-46) })
}

/// `floor(log2 |c + D|)`, the regime read off a characteristic.
fn regime_of(c: i32, direction: bool) -> u32 {
    let v = (c + direction as i32).unsigned_abs();
    31 - v.leading_zeros()
}

/// Mantissa bit count of a finite takum from its value alone.
pub fn mantissa_bit_count(x: &TakumValue, n: u32) -> Result<u32> {
    if n < 12 {
        return Err(Error::InvalidWidth(n));
    }
    let TakumValue::Finite { negative, ell } = *x else {
        return Err(Error::NotFinite);
    };
    // 2 ln|x| sign(x) = (-1)^S ell = c + m
    let t = if negative { -ell } else { ell };
    let c = t.floor() as i32;
    Ok(n - 5 - regime_of(c, !t.is_negative()))
}

/// Guaranteed mantissa bits of `round(x, n)` for `x` inside the dynamic
/// range. Can be `-1` at `n = 12` next to the range ends.
pub fn mantissa_bit_count_lower_bound(x: &BigReal, n: u32) -> Result<i32> {
    if n < 12 {
        return Err(Error::InvalidWidth(n));
    }
    let enc = encode_real(x)?;
    Ok(n as i32 - 6 - regime_of(enc.c, enc.direction) as i32)
}

/// `lambda(p) = sqrt(e)^(2^(-p-1)) - 1` as an enclosure at `prec` bits.
pub fn lambda_interval(p: u32, prec: u32) -> Interval {
    let w = prec + p + 8;
    let arg = Interval::point(BigInt::one() << (w - p - 2) as usize, w);
    let one = Interval::from_int(1, w);
    oracle::exp(&arg).sub(&one).at_prec(prec)
}

pub fn lambda(p: u32) -> f64 {
    (2f64.powi(-(p as i32) - 2)).exp_m1()
}

/// `epsilon(n_f) = 2^(-n_f-1)`.
pub fn epsilon(n_f: u32) -> BigRational {
    pow2(-(n_f as i64) - 1)
}

/// `lambda(p) < (2/3) epsilon(p)`, decided exactly.
pub fn lambda_below_two_thirds_epsilon(p: u32) -> bool {
    let bound = epsilon(p) * BigRational::new(2.into(), 3.into());
    refine(p + 64, |prec| {
        lambda_interval(p, prec)
            .cmp_rational(&bound)
            .map(|o| o == Ordering::Less)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodingScheme {
    Takum,
    Posit,
    EliasGamma,
    EliasDelta,
}

fn ilog2(v: u64) -> u32 {
    63 - v.leading_zeros()
}

/// Bits needed to encode the exponent `v` (sign bit excluded). Elias codes
/// encode `v + 1` so that zero is admissible.
pub fn coding_cost(scheme: CodingScheme, v: u64) -> Result<u32> {
    Ok(match scheme {
        CodingScheme::Takum => {
            if v > 254 {
                return Err(Error::OutOfRange);
            }
            4 + ilog2(v + 1)
        }
        CodingScheme::Posit => (v / 4) as u32 + 4,
        CodingScheme::EliasGamma => 2 * ilog2(v + 1) + 1,
        CodingScheme::EliasDelta => {
            let l = ilog2(v + 1);
            l + 2 * ilog2(l as u64 + 1) + 1
        }
    })
}

/// Smallest and largest positive values of a format.
pub fn dynamic_range(format: &Format) -> Result<(BigReal, BigReal)> {
    match format {
        Format::Takum(n) => {
            let lo = bitcodec::decode_value(TakumBits::new(*n, 1)?);
            let hi = bitcodec::decode_value(TakumBits::new(*n, (1 << (n - 1)) - 1)?);
            Ok((lo.to_real(), hi.to_real()))
        }
        Format::LinearTakum(n) => {
            let lo = crate::lintakum::lin_decode(TakumBits::new(*n, 1)?);
            let hi = crate::lintakum::lin_decode(TakumBits::new(*n, (1 << (n - 1)) - 1)?);
            Ok((lo.to_real(), hi.to_real()))
        }
        Format::Posit(n) => {
            let hi = posit_decode(*n, (1 << (n - 1)) - 1).to_real();
            let lo = posit_decode(*n, 1).to_real();
            Ok((lo, hi))
        }
        Format::Ieee(fd) => {
            let lo = fd.min_subnormal().unwrap_or_else(|| fd.min_normal());
            Ok((BigReal::from_rational(lo), BigReal::from_rational(fd.max_value())))
        }
    }
}

/// Exponent bits assumed for an IEEE format of arbitrary width `n`: the
/// named formats where they exist, `round(3 log2 n - 7)` elsewhere.
pub fn ieee_params_for_width(n: u32) -> Option<FormatDescriptor> {
    use crate::refformats::{FLOAT16, FLOAT32, FLOAT64, FLOAT8};
    match n {
        8 => return Some(FLOAT8),
        16 => return Some(FLOAT16),
        32 => return Some(FLOAT32),
        64 => return Some(FLOAT64),
        _ => {}
    }
    let n_e = ((3.0 * (n as f64).log2() - 7.0).round() as i64).max(2) as u32;
    (n_e + 2 <= n).then(|| FormatDescriptor {
        name: "ieee",
        n_e,
        n_f: n - 1 - n_e,
        subnormals: true,
    })
}

/// Mantissa bits a format offers at magnitude `x` (`None` outside its range).
/// Takum counts come from the unrounded encoding, clamped at zero for
/// widths with ghost bits.
pub fn precision_bits_at(format: &Format, log2_x: f64, ell: f64) -> Option<u32> {
    match format {
        Format::Takum(n) => {
            if ell.abs() >= 255.0 {
                return None;
            }
            let c = ell.floor() as i32;
            let r = regime_of(c, ell >= 0.0);
            Some((*n as i64 - 5 - r as i64).max(0) as u32)
        }
        Format::Posit(n) => {
            let top = posit_max_exponent(*n) as f64;
            if log2_x.abs() > top {
                return None;
            }
            let h = log2_x.floor() as i64;
            let r = h.div_euclid(4);
            let k = if r >= 0 { r + 1 } else { -r };
            Some((*n as i64 - k - 4).max(0) as u32)
        }
        Format::Ieee(fd) => {
            let h = log2_x.floor() as i64;
            if log2_x >= (fd.emax() + 1) as f64 {
                return None;
            }
            if h >= fd.emin() {
                return Some(fd.n_f);
            }
            if !fd.subnormals {
                return None;
            }
            let lost = fd.emin() - h;
            (lost <= fd.n_f as i64).then(|| (fd.n_f as i64 - lost) as u32)
        }
        Format::LinearTakum(_) => None,
    }
}

/// `-log2` of the relative error bound at `10^log10_x`: lambda for takums,
/// epsilon for the rest; 0 outside the format's range.
pub fn neg_log2_bound(format: &Format, log10_x: f64) -> f64 {
    let log2_x = log10_x * std::f64::consts::LOG2_10;
    let ell = 2.0 * log10_x * std::f64::consts::LN_10;
    match precision_bits_at(format, log2_x, ell) {
        None => 0.0,
        Some(p) if format.is_takum() => -lambda(p).log2(),
        Some(p) => p as f64 + 1.0,
    }
}

/// Decoded mantissa bit count of a pattern, for cross-checks.
pub fn decoded_p(b: TakumBits) -> u32 {
    decode(b).1.p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refformats::IEEE_FORMATS;
    use num_traits::ToPrimitive;

    fn pct(r: &BigRational) -> f64 {
        r.to_f64().unwrap() * 100.0
    }

    #[test]
    fn table_one_ratios() {
        let want = [5.08, 3.12, 0.78, 0.78, 0.39, 82.03, 98.88, 99.93];
        for (fd, w) in IEEE_FORMATS.iter().zip(want) {
            let got = pct(&ieee_waste_ratio_of(fd));
            assert!((got - w).abs() <= 0.01, "{} {got}", fd.name);
        }
    }

    #[test]
    fn posit_waste() {
        assert!(posit_waste_ratio(47).unwrap().is_zero());
        assert_eq!(posit_waste_ratio(48).unwrap(), pow2(-46));
        assert_eq!(posit_waste_ratio(64).unwrap(), pow2(-46));
        assert!((pow2(-46).to_f64().unwrap() - 1.42e-14).abs() < 0.01e-14);
    }

    #[test]
    fn lambda_values() {
        // exp(1/4) - 1 from mpmath: 0.28402541668774148407342056806...
        let l = lambda_interval(0, 100);
        let want = crate::decimal::parse("0.284025416687741484073420568062436").unwrap().value;
        let slack = crate::decimal::parse("1e-29").unwrap().value;
        assert!(l.lo_rational() <= &want + &slack && l.hi_rational() >= &want - &slack);
        for p in 0..=64 {
            assert!(lambda_below_two_thirds_epsilon(p), "p = {p}");
        }
        assert_eq!(epsilon(52), pow2(-53));
    }

    #[test]
    fn mantissa_counts() {
        let one = TakumValue::Finite {
            negative: false,
            ell: crate::Dyadic::ZERO,
        };
        assert_eq!(mantissa_bit_count(&one, 12).unwrap(), 7);
        let big = TakumValue::Finite {
            negative: false,
            ell: crate::Dyadic::new(509, 1),
        };
        assert_eq!(mantissa_bit_count(&big, 16).unwrap(), 4);
        assert_eq!(mantissa_bit_count_lower_bound(&BigReal::from_i64(1), 16).unwrap(), 10);
        let edge = BigReal::sqrt_e_pow(false, crate::Ell::Exact(crate::Dyadic::new(2039, 3)));
        assert_eq!(mantissa_bit_count_lower_bound(&edge, 16).unwrap(), 3);
    }

    #[test]
    fn cost_anchors() {
        for v in 16..=30 {
            assert_eq!(coding_cost(CodingScheme::Takum, v).unwrap(), 8);
        }
        assert_eq!(coding_cost(CodingScheme::Takum, 254).unwrap(), 11);
        assert_eq!(coding_cost(CodingScheme::Takum, 0).unwrap(), 4);
        assert_eq!(coding_cost(CodingScheme::Posit, 30).unwrap(), 11);
        assert_eq!(coding_cost(CodingScheme::EliasGamma, 0).unwrap(), 1);
        assert_eq!(coding_cost(CodingScheme::EliasDelta, 0).unwrap(), 1);
        // delta(16) = 001 01 0000
        assert_eq!(coding_cost(CodingScheme::EliasDelta, 15).unwrap(), 9);
        assert!(coding_cost(CodingScheme::Takum, 255).is_err());
    }

    #[test]
    fn costs_match_encoders() {
        for v in 0..=254u64 {
            let (_, _, r, _) = bitcodec::split_characteristic(v as i32);
            assert_eq!(coding_cost(CodingScheme::Takum, v).unwrap(), 4 + r);
        }
        for v in 0..=120u64 {
            let n = 64;
            let x = BigReal::from_rational(pow2(v as i64));
            let b = crate::refformats::posit_round(&x, n).unwrap();
            let f = crate::refformats::posit_fields(n, b);
            assert_eq!(coding_cost(CodingScheme::Posit, v).unwrap(), f.k + 3);
        }
    }

    #[test]
    fn ranges() {
        let (lo, hi) = dynamic_range(&"posit8".parse().unwrap()).unwrap();
        assert!((lo.to_f64() - 5.96e-8).abs() < 0.01e-8);
        assert!((hi.to_f64() - 1.68e7).abs() < 0.01e7);
        let (lo, hi) = dynamic_range(&"posit16".parse().unwrap()).unwrap();
        assert!((lo.to_f64() / 1.39e-17 - 1.0).abs() < 0.01);
        assert!((hi.to_f64() / 7.21e16 - 1.0).abs() < 0.01);
        let (lo, hi) = dynamic_range(&"float64".parse().unwrap()).unwrap();
        assert_eq!(lo.to_f64(), 5e-324);
        assert_eq!(hi.to_f64(), f64::MAX);
        let (lo, hi) = dynamic_range(&"takum64".parse().unwrap()).unwrap();
        assert_eq!(format!("{:.1e}", lo.to_f64()), "4.2e-56");
        assert_eq!(format!("{:.1e}", hi.to_f64()), "2.4e55");
    }

    #[test]
    fn bounds_profile() {
        let t16: Format = "takum16".parse().unwrap();
        assert!((neg_log2_bound(&t16, 0.0) + lambda(11).log2()).abs() < 1e-12);
        assert_eq!(neg_log2_bound(&t16, 60.0), 0.0);
        let f16: Format = "float16".parse().unwrap();
        assert_eq!(neg_log2_bound(&f16, 0.0), 11.0);
        assert_eq!(neg_log2_bound(&f16, 5.0), 0.0);
        let b: Format = "bfloat16".parse().unwrap();
        assert_eq!(neg_log2_bound(&b, -39.0), 0.0);
    }

    #[test]
    fn narrow_ieee_widths() {
        assert!(ieee_params_for_width(2).is_none());
        assert!(ieee_params_for_width(3).is_none());
        let f = ieee_params_for_width(4).unwrap();
        assert_eq!((f.n_e, f.n_f), (2, 1));
    }
}
