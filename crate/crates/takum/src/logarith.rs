//! Arithmetic in the logarithmic domain.
//!
//! Multiplication, division, inversion, square root and squaring act on
//! `ell` by exact dyadic addition, negation or shifts, so the only
//! rounding is the final one. Addition and subtraction go through the
//! Gaussian logarithm `Phi(q) = log_b(1 +- b^-q)`, which is transcendental
//! for every nonzero dyadic `q`.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::bitcodec::{round, round_dyadic, TakumBits, TakumValue};
use crate::dyadic::Dyadic;
use crate::oracle::{self, GaussBase, Interval};
use crate::real::{refine, BigReal, Ell};
use crate::{Error, Result};

/// A signed exact logarithmic value before rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogFixed {
    pub negative: bool,
    pub ell: Dyadic,
}

impl LogFixed {
    pub fn to_real(self) -> BigReal {
        BigReal::sqrt_e_pow(self.negative, Ell::Exact(self.ell))
    }

    pub fn round(self, n: u32) -> TakumBits {
        round_dyadic(self.negative, self.ell, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plus,
    Minus,
}

/// `Phi_b^+-(q)` with `q` a real argument.
#[derive(Clone, Debug)]
pub struct GaussLogQuery {
    pub q: BigReal,
    pub base: GaussBase,
    pub variant: Variant,
}

fn real_interval(x: &BigReal, prec: u32) -> Option<Interval> {
    match x {
        BigReal::NaR => None,
        BigReal::Zero => Some(Interval::from_int(0, prec)),
        BigReal::Finite { negative, mag } => {
            let lg = mag.floor_log2();
            let rel = (prec as i64 + lg.max(0) + 2) as u32;
            let iv = mag.value_interval(rel).at_prec(prec);
            Some(if *negative { iv.neg() } else { iv })
        }
    }
}

/// Enclosure of `Phi` at about `prec` fractional bits.
pub fn gauss_log_interval(query: &GaussLogQuery, prec: u32) -> Result<Interval> {
    let plus = query.variant == Variant::Plus;
    let q_sign = match &query.q {
        BigReal::NaR => return Err(Error::IsNaR),
        BigReal::Zero => 0,
        BigReal::Finite { negative, .. } => {
            if *negative {
                -1
            } else {
                1
            }
        }
    };
    if !plus && q_sign <= 0 {
        return Err(Error::Domain("Phi^- needs q > 0".into()));
    }
    let want = BigInt::from(1) << 2;
    Ok(refine(prec + 8, |p| {
        let q = real_interval(&query.q, p)?;
        let v = oracle::gauss_log_iv(&q, plus, query.base, p)?.at_prec(prec + 2);
        (&v.hi - &v.lo <= want).then_some(v)
    }))
}

/// `Phi_b^+-(q)` to absolute error below `2^-precision`.
pub fn gauss_log(query: &GaussLogQuery, precision: u32) -> Result<BigReal> {
    let iv = gauss_log_interval(query, precision)?;
    let mid = (iv.lo_rational() + iv.hi_rational()) / BigInt::from(2);
    Ok(BigReal::from_rational(mid))
}

/// Unrounded product; `None` marks a NaR result.
pub fn mul_exact(x: &TakumValue, y: &TakumValue) -> Option<Option<LogFixed>> {
    use TakumValue::*;
    match (*x, *y) {
        (NaR, _) | (_, NaR) => None,
        (Zero, _) | (_, Zero) => Some(None),
        (Finite { negative: a, ell: l }, Finite { negative: b, ell: m }) => Some(Some(LogFixed {
            negative: a ^ b,
            ell: l + m,
        })),
    }
}

/// Unrounded quotient; `x / 0` and `0 / 0` are NaR.
pub fn div_exact(x: &TakumValue, y: &TakumValue) -> Option<Option<LogFixed>> {
    use TakumValue::*;
    match (*x, *y) {
        (NaR, _) | (_, NaR) | (_, Zero) => None,
        (Zero, _) => Some(None),
        (Finite { negative: a, ell: l }, Finite { negative: b, ell: m }) => Some(Some(LogFixed {
            negative: a ^ b,
            ell: l - m,
        })),
    }
}

fn unary(x: &TakumValue, zero: Option<Option<LogFixed>>, f: impl Fn(bool, Dyadic) -> LogFixed) -> Option<Option<LogFixed>> {
    match *x {
        TakumValue::NaR => None,
        TakumValue::Zero => zero,
        TakumValue::Finite { negative, ell } => Some(Some(f(negative, ell))),
    }
}

pub fn inv_exact(x: &TakumValue) -> Option<Option<LogFixed>> {
    unary(x, None, |negative, ell| LogFixed { negative, ell: -ell })
}

pub fn sqrt_exact(x: &TakumValue) -> Option<Option<LogFixed>> {
    unary(x, Some(None), |_, ell| LogFixed {
        negative: false,
        ell: ell.half(),
    })
}

pub fn square_exact(x: &TakumValue) -> Option<Option<LogFixed>> {
    unary(x, Some(None), |_, ell| LogFixed {
        negative: false,
        ell: ell.double(),
    })
}

fn finish(r: Option<Option<LogFixed>>, n: u32) -> TakumBits {
    match r {
        None => TakumBits::nar(n),
        Some(None) => TakumBits::zero(n),
        Some(Some(v)) => v.round(n),
    }
}

pub fn mul(x: &TakumValue, y: &TakumValue, n: u32) -> TakumBits {
    finish(mul_exact(x, y), n)
}

pub fn div(x: &TakumValue, y: &TakumValue, n: u32) -> TakumBits {
    finish(div_exact(x, y), n)
}

pub fn inv(x: &TakumValue, n: u32) -> TakumBits {
    finish(inv_exact(x), n)
}

/// Square root of the magnitude.
pub fn sqrt_abs(x: &TakumValue, n: u32) -> TakumBits {
    finish(sqrt_exact(x), n)
}

pub fn square(x: &TakumValue, n: u32) -> TakumBits {
    finish(square_exact(x), n)
}

/// Sum reduced to `(-1)^S sqrt(e)^(a + Phi(q))` with `q = a - b > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumForm {
    NaR,
    Zero,
    /// One operand is zero; the sum is the other one verbatim.
    Copy { negative: bool, ell: Dyadic },
    Gauss {
        negative: bool,
        a: Dyadic,
        q: Dyadic,
        plus: bool,
    },
}

pub fn sum_form(x: &TakumValue, y: &TakumValue) -> SumForm {
    use TakumValue::*;
    match (*x, *y) {
        (NaR, _) | (_, NaR) => SumForm::NaR,
        (Zero, Zero) => SumForm::Zero,
        (Zero, Finite { negative, ell }) | (Finite { negative, ell }, Zero) => {
            SumForm::Copy { negative, ell }
        }
        (Finite { negative: sa, ell: la }, Finite { negative: sb, ell: lb }) => {
            if la == lb && sa != sb {
                return SumForm::Zero;
            }
            if la == lb {
                // x + x = 2x, still transcendental in ell
                return SumForm::Gauss {
                    negative: sa,
                    a: la,
                    q: Dyadic::ZERO,
                    plus: true,
                };
            }
            let (s, a, b) = if la > lb { (sa, la, lb) } else { (sb, lb, la) };
            SumForm::Gauss {
                negative: s,
                a,
                q: a - b,
                plus: sa == sb,
            }
        }
    }
}

/// `ell` of the sum as a lazily refined real.
fn gauss_ell(a: Dyadic, q: Dyadic, plus: bool) -> Ell {
    Ell::lazy(move |p| {
        let w = p + 8;
        let qi = Interval::point(q.to_fixed(w.max(q.shift())), w.max(q.shift()));
        let phi = oracle::gauss_log_iv(&qi, plus, GaussBase::SqrtE, w)?;
        let ai = Interval::point(a.to_fixed(w), w);
        Some(ai.add(&phi.at_prec(w)).at_prec(p))
    })
}

/// The exact sum as a real.
pub fn add_exact(x: &TakumValue, y: &TakumValue) -> BigReal {
    match sum_form(x, y) {
        SumForm::NaR => BigReal::NaR,
        SumForm::Zero => BigReal::Zero,
        SumForm::Copy { negative, ell } => BigReal::sqrt_e_pow(negative, Ell::Exact(ell)),
        SumForm::Gauss {
            negative,
            a,
            q,
            plus,
        } => BigReal::sqrt_e_pow(negative, gauss_ell(a, q, plus)),
    }
}

pub fn sub_exact(x: &TakumValue, y: &TakumValue) -> BigReal {
    add_exact(x, &y.neg())
}

/// Binary64 estimate of `Phi_sqrt(e)(q)`; relative error far below `2^-40`.
pub(crate) fn phi_f64(q: f64, plus: bool) -> f64 {
    let t = (-q / 2.0).exp();
    2.0 * if plus {
        t.ln_1p()
    } else if t < 0.5 {
        (-t).ln_1p()
    } else {
        (-(-q / 2.0).exp_m1()).ln()
    }
}

const FAST_GRID: u32 = 100;

fn grid(v: f64, up: bool) -> Dyadic {
    let s = v * 2f64.powi(FAST_GRID as i32);
    let s = if up { s.ceil() } else { s.floor() };
    Dyadic::new(s as i128, FAST_GRID)
}

/// Rounds a Gaussian-form sum with a binary64 enclosure first and the
/// oracle only when the enclosure straddles a rounding boundary.
/// Rounding is monotone in `ell`, so agreeing endpoints settle it.
fn round_gauss(negative: bool, a: Dyadic, q: Dyadic, plus: bool, n: u32) -> TakumBits {
    let phi = phi_f64(q.to_f64(), plus);
    if phi.is_finite() {
        let err = phi.abs() * 2f64.powi(-40) + 2f64.powi(-(FAST_GRID as i32) + 8);
        let lo = a + grid(phi - err, false);
        let hi = a + grid(phi + err, true);
        let r = round_dyadic(negative, lo, n);
        if r == round_dyadic(negative, hi, n) {
            return r;
        }
    }
    round(&BigReal::sqrt_e_pow(negative, gauss_ell(a, q, plus)), n).expect("valid width")
}

pub fn add(x: &TakumValue, y: &TakumValue, n: u32) -> TakumBits {
    match sum_form(x, y) {
        SumForm::NaR => TakumBits::nar(n),
        SumForm::Zero => TakumBits::zero(n),
        SumForm::Copy { negative, ell } => round_dyadic(negative, ell, n),
        SumForm::Gauss {
            negative,
            a,
            q,
            plus,
        } => round_gauss(negative, a, q, plus, n),
    }
}

pub fn sub(x: &TakumValue, y: &TakumValue, n: u32) -> TakumBits {
    add(x, &y.neg(), n)
}

/// Oracle-only rounding of a sum, used to validate the binary64 fast path.
pub fn add_reference(x: &TakumValue, y: &TakumValue, n: u32) -> TakumBits {
    round(&add_exact(x, y), n).expect("valid width")
}

/// Whether the oracle enclosure of `Phi` for the given query is negative.
pub fn phi_is_negative(query: &GaussLogQuery) -> Result<bool> {
    let iv = gauss_log_interval(query, 64)?;
    Ok(iv.hi.is_negative())
}
