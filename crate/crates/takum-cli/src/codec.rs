use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use takum::bitcodec::{self, TakumBits};
use takum::constants;
use takum::decimal;
use takum::lintakum::LinearText;
use takum::refformats::{posit_fields, Format, FormatValue};
use takum::{BigReal, Dyadic, Error, TakumValue};

use crate::{CodecCmd, Failure};

type Res<T> = Result<T, Failure>;

pub fn run(cmd: CodecCmd) -> Res<()> {
    match cmd {
        CodecCmd::Decode { format, payload } => {
            let f = parse_format(&format)?;
            crate::emit(decode_text(&f, parse_payload(&f, &payload)?)?);
        }
        CodecCmd::Encode { format, value } => {
            let f = parse_format(&format)?;
            crate::emit(f.hex(encode(&f, &value)?));
        }
        CodecCmd::Round { format, values } => {
            let f = parse_format(&format)?;
            for v in &values {
                crate::emit(round_text(&f, v)?);
            }
        }
        CodecCmd::Negate { format, payload } => {
            let f = parse_format(&format)?;
            crate::emit(f.hex(negate(&f, parse_payload(&f, &payload)?)));
        }
        CodecCmd::Invert { format, payload } => {
            let f = parse_format(&format)?;
            let b = takum_bits(&f, parse_payload(&f, &payload)?)?;
            crate::emit(bitcodec::invert_bits(b)?);
        }
        CodecCmd::Resize { format, payload, width } => {
            let f = parse_format(&format)?;
            let b = takum_bits(&f, parse_payload(&f, &payload)?)?;
            crate::emit(bitcodec::resize(b, width)?);
        }
        CodecCmd::Compare { format, a, b } => {
            let f = parse_format(&format)?;
            let (a, b) = (parse_payload(&f, &a)?, parse_payload(&f, &b)?);
            crate::emit(match compare(&f, a, b)? {
                Some(Ordering::Less) => "less",
                Some(Ordering::Equal) => "equal",
                Some(Ordering::Greater) => "greater",
                None => "unordered",
            });
        }
    }
    Ok(())
}

pub fn parse_format(s: &str) -> Res<Format> {
    Ok(s.parse::<Format>()?)
}

/// `0x...`, `0b...` or decimal; a `<format>:` prefix as printed by the
/// tool is accepted and must name the same format.
pub fn parse_payload(f: &Format, s: &str) -> Res<u128> {
    let t = s.trim();
    let t = match t.split_once(':') {
        Some((tag, rest)) => {
            if parse_format(tag)? != *f {
                return Err(Error::Parse(format!("{s}: not a {f} payload")).into());
            }
            rest
        }
        None => t,
    };
    let clean = t.replace('_', "");
    let r = if let Some(h) = clean.strip_prefix("0x").or_else(|| clean.strip_prefix("0X")) {
        u128::from_str_radix(h, 16)
    } else if let Some(b) = clean.strip_prefix("0b") {
        u128::from_str_radix(b, 2)
    } else {
        clean.parse::<u128>()
    };
    let p = r.map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    let n = f.width();
    if n < 128 && p >> n != 0 {
        return Err(Error::Parse(format!("{s}: wider than {n} bits")).into());
    }
    Ok(p)
}

fn takum_bits(f: &Format, p: u128) -> Res<TakumBits> {
    match f {
        Format::Takum(n) => Ok(TakumBits::new(*n, p as u64)?),
        _ => Err(Error::UnsupportedFormat(format!("{f}: the bit rule applies to takums only")).into()),
    }
}

fn value_text(v: &FormatValue) -> String {
    match v {
        FormatValue::Real(x) => decimal::shortest(x),
        other => constants::render(other, 1),
    }
}

pub fn decode_text(f: &Format, p: u128) -> Res<String> {
    Ok(match f {
        Format::Takum(n) => bitcodec::dump(TakumBits::new(*n, p as u64)?),
        Format::LinearTakum(n) => {
            let b = TakumBits::new(*n, p as u64)?;
            format!("{}\nvalue={}", LinearText(b), value_text(&f.decode(p)?))
        }
        Format::Posit(n) => {
            let v = f.decode(p)?;
            let fl = posit_fields(*n, p as u64);
            format!(
                "{}\nS={} k={} r={} e={} p={}\nvalue={}",
                f.hex(p),
                fl.sign,
                fl.k,
                fl.r,
                fl.e,
                fl.p,
                value_text(&v)
            )
        }
        Format::Ieee(_) => format!("{}\nvalue={}", f.hex(p), value_text(&f.decode(p)?)),
    })
}

fn signed_rational(x: &BigReal) -> Option<BigRational> {
    match x {
        BigReal::Zero => Some(BigRational::zero()),
        BigReal::NaR => None,
        BigReal::Finite { negative, mag } => {
            mag.exact_rational().map(|r| if *negative { -r } else { r })
        }
    }
}

fn parse_dyadic(s: &str) -> Res<Dyadic> {
    let d = decimal::parse(s)?.value;
    let den = d.denom();
    let shift = den.trailing_zeros().unwrap_or(0);
    let not_dyadic = || Failure::Lib(Error::Domain(format!("{s} is not a dyadic rational")));
    if *den != BigInt::one() << shift as usize || shift > 120 {
        return Err(not_dyadic());
    }
    let num = d.numer().to_i128().ok_or_else(not_dyadic)?;
    Ok(Dyadic::new(num, shift as u32))
}

/// Exact encoding: a decimal the format represents exactly, or for takums
/// `ell:<v>` / `-ell:<v>` giving the logarithmic value `±sqrt(e)^v`.
pub fn encode(f: &Format, value: &str) -> Res<u128> {
    let v = value.trim();
    let ell = v
        .strip_prefix("ell:")
        .map(|r| (false, r))
        .or_else(|| v.strip_prefix("-ell:").map(|r| (true, r)));
    if let Some((negative, text)) = ell {
        let Format::Takum(n) = f else {
            return Err(Error::Parse(format!("{value}: ell: needs a takum format")).into());
        };
        let ell = parse_dyadic(text)?;
        let b = bitcodec::round_dyadic(negative, ell, *n);
        if bitcodec::decode_value(b) != (TakumValue::Finite { negative, ell }) {
            return Err(Error::Domain(format!("{value} is not representable in {f}")).into());
        }
        return Ok(b.payload() as u128);
    }
    if v.eq_ignore_ascii_case("nar") {
        return match f {
            Format::Takum(n) | Format::LinearTakum(n) => Ok(TakumBits::nar(*n).payload() as u128),
            Format::Posit(n) => Ok(1u128 << (n - 1)),
            Format::Ieee(_) => Err(Error::Domain(format!("{f} has no NaR")).into()),
        };
    }
    let d = decimal::parse(v)?;
    let p = f.round(&BigReal::from_rational(d.value.clone()))?;
    let back = match f.decode(p)? {
        FormatValue::Real(x) => signed_rational(&x),
        _ => None,
    };
    if back.as_ref() != Some(&d.value) {
        return Err(Error::Domain(format!("{value} is not representable in {f}; use round")).into());
    }
    Ok(p)
}

/// Payload and decoded value printed at the input's significant digits.
pub fn round_text(f: &Format, value: &str) -> Res<String> {
    let d = decimal::parse(value)?;
    let p = f.round(&BigReal::from_rational(d.value))?;
    let digits = d.digits.max(1);
    Ok(format!("{} {}", f.hex(p), constants::render(&f.decode(p)?, digits)))
}

pub fn negate(f: &Format, p: u128) -> u128 {
    let n = f.width();
    let mask = if n >= 128 { u128::MAX } else { (1u128 << n) - 1 };
    match f {
        Format::Ieee(_) => p ^ (1u128 << (n - 1)),
        _ => p.wrapping_neg() & mask,
    }
}

fn signed(p: u128, n: u32) -> i128 {
    ((p << (128 - n)) as i128) >> (128 - n)
}

/// Value order; NaR sorts below every real, NaN is unordered.
pub fn compare(f: &Format, a: u128, b: u128) -> Res<Option<Ordering>> {
    let n = f.width();
    if let Format::Takum(_) = f {
        let (x, y) = (takum_bits(f, a)?, takum_bits(f, b)?);
        return Ok(Some(bitcodec::compare(x, y)?));
    }
    if !matches!(f, Format::Ieee(_)) {
        // two's-complement order is value order for these encodings
        f.decode(a)?;
        f.decode(b)?;
        return Ok(Some(signed(a, n).cmp(&signed(b, n))));
    }
    // (tier, value): infinities sit in the outer tiers
    let key = |p: u128| -> Res<Option<(i8, BigRational)>> {
        Ok(match f.decode(p)? {
            FormatValue::NaN | FormatValue::NaR => None,
            FormatValue::Infinite { negative } => {
                Some((if negative { -1 } else { 1 }, BigRational::zero()))
            }
            FormatValue::Real(x) => signed_rational(&x).map(|r| (0, r)),
        })
    };
    Ok(match (key(a)?, key(b)?) {
        (Some(x), Some(y)) => Some(x.cmp(&y)),
        _ => None,
    })
}
