//! Exact and oracle-backed real numbers used as rounding inputs.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::Dyadic;
use crate::oracle::{self, Interval};

/// Calls `f` at doubling precision until it yields a decision.
pub fn refine<T>(start: u32, mut f: impl FnMut(u32) -> Option<T>) -> T {
    let mut p = start.max(16);
    loop {
        if let Some(v) = f(p) {
            return v;
        }
        assert!(p < oracle::MAX_BITS, "oracle escalation did not converge");
        p *= 2;
    }
}

type LazyFn = dyn Fn(u32) -> Option<Interval> + Send + Sync;

/// A base-sqrt(e) logarithm, either exact or computable to any precision.
#[derive(Clone)]
pub enum Ell {
    Exact(Dyadic),
    Lazy(Arc<LazyFn>),
}

impl Ell {
    pub fn lazy(f: impl Fn(u32) -> Option<Interval> + Send + Sync + 'static) -> Self {
        Ell::Lazy(Arc::new(f))
    }

    /// Enclosure at exactly `prec` fractional bits.
    pub fn interval(&self, prec: u32) -> Option<Interval> {
        match self {
            Ell::Exact(d) => {
                let p = prec.max(d.shift());
                Some(Interval::point(d.to_fixed(p), p).at_prec(prec))
            }
            Ell::Lazy(f) => f(prec).map(|iv| iv.at_prec(prec)),
        }
    }

    pub fn exact(&self) -> Option<Dyadic> {
        match self {
            Ell::Exact(d) => Some(*d),
            Ell::Lazy(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ell::Exact(d) => d.to_f64(),
            Ell::Lazy(f) => refine(64, |p| f(p)).mid_f64(),
        }
    }
}

impl fmt::Debug for Ell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ell::Exact(d) => write!(f, "Exact({d})"),
            Ell::Lazy(_) => write!(f, "Lazy(~{})", self.to_f64()),
        }
    }
}

/// Positive magnitude of a nonzero real.
#[derive(Clone, Debug)]
pub enum Magnitude {
    Rational(BigRational),
    /// Square root of a positive rational.
    Sqrt(BigRational),
    /// `sqrt(e)^ell`.
    Exp(Ell),
}

/// Arbitrary-precision real handle: NaR, zero, or a signed magnitude.
#[derive(Clone, Debug)]
pub enum BigReal {
    NaR,
    Zero,
    Finite { negative: bool, mag: Magnitude },
}

impl BigReal {
    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            BigReal::Zero
        } else {
            BigReal::Finite {
                negative: r.is_negative(),
                mag: Magnitude::Rational(r.abs()),
            }
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact value of a binary64 number (NaN maps to NaR).
    pub fn from_f64(v: f64) -> Self {
        if v.is_nan() || v.is_infinite() {
            return BigReal::NaR;
        }
        match BigRational::from_float(v) {
            Some(r) => Self::from_rational(r),
            None => BigReal::NaR,
        }
    }

    pub fn sqrt_e_pow(negative: bool, ell: Ell) -> Self {
        BigReal::Finite {
            negative,
            mag: Magnitude::Exp(ell),
        }
    }

    pub fn is_nar(&self) -> bool {
        matches!(self, BigReal::NaR)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            BigReal::NaR => f64::NAN,
            BigReal::Zero => 0.0,
            BigReal::Finite { negative, mag } => {
                let m = mag.to_f64();
                if *negative {
                    -m
                } else {
                    m
                }
            }
        }
    }
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn scale_rational(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        r * BigRational::from_integer(pow2(k as u32))
    } else {
        r / BigRational::from_integer(pow2((-k) as u32))
    }
}

impl Magnitude {
    /// Exact rational value, if there is one.
    pub fn exact_rational(&self) -> Option<BigRational> {
        match self {
            Magnitude::Rational(r) => Some(r.clone()),
            Magnitude::Sqrt(r) => {
                let (n, d) = (r.numer(), r.denom());
                let (sn, sd) = (n.sqrt(), d.sqrt());
                (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
            }
            Magnitude::Exp(e) => (e.exact() == Some(Dyadic::ZERO)).then(BigRational::one),
        }
    }

    /// The base-sqrt(e) logarithm when it is an exact dyadic rational.
    pub fn exact_ell(&self) -> Option<Dyadic> {
        match self {
            Magnitude::Exp(e) => e.exact(),
            // ln of a rational other than 1 is transcendental
            _ => self
                .exact_rational()
                .filter(|r| r.is_one())
                .map(|_| Dyadic::ZERO),
        }
    }

    /// Enclosure of `2 ln(self)` at `prec` fractional bits.
    pub fn ell_interval(&self, prec: u32) -> Option<Interval> {
        match self {
            Magnitude::Rational(r) => Some(oracle::ln_rational(r, prec + 1).mul_pow2(1)),
            Magnitude::Sqrt(r) => Some(oracle::ln_rational(r, prec)),
            Magnitude::Exp(e) => e.interval(prec),
        }
    }

    /// The logarithm as an [`Ell`], exact whenever possible.
    pub fn ell(&self) -> Ell {
        if let Some(d) = self.exact_ell() {
            return Ell::Exact(d);
        }
        match self {
            Magnitude::Exp(e) => e.clone(),
            other => {
                let m = other.clone();
                Ell::lazy(move |p| m.ell_interval(p))
            }
        }
    }

    /// `floor(log2(self))`.
    pub fn floor_log2(&self) -> i64 {
        match self {
            Magnitude::Rational(r) => oracle::floor_log2(r),
            Magnitude::Sqrt(r) => Integer::div_floor(&oracle::floor_log2(r), &2),
            Magnitude::Exp(_) => {
                // floor(log2 x) = floor(ell / (2 ln 2))
                let ell = self.ell();
                refine(64, |p| {
                    let iv = ell.interval(p)?;
                    let q = iv.div(&oracle::ln2(p).mul_pow2(1))?;
                    let (a, b) = q.floor_scaled(0);
                    (a == b).then(|| a.to_i64().unwrap())
                })
            }
        }
    }

    /// `(floor(self * 2^k), self * 2^k is an integer)`.
    pub fn floor_scaled(&self, k: i64) -> (BigInt, bool) {
        match self {
            Magnitude::Rational(r) => {
                let s = scale_rational(r, k);
                let (q, rem) = s.numer().div_mod_floor(s.denom());
                (q, rem.is_zero())
            }
            Magnitude::Sqrt(r) => {
                let s = scale_rational(r, 2 * k);
                let f = s.numer().div_floor(s.denom()).sqrt();
                let exact = BigRational::from_integer(&f * &f) == s;
                (f, exact)
            }
            Magnitude::Exp(_) => {
                if let Some(r) = self.exact_rational() {
                    return Magnitude::Rational(r).floor_scaled(k);
                }
                let ell = self.ell();
                let bits = (self.floor_log2() + k).max(0) as u32;
                refine(64, |p| {
                    let half = ell.interval(p + bits + 8)?.mul_pow2(-1);
                    let v = oracle::exp(&half.at_prec(p + bits + 8)).mul_pow2(k as i32);
                    let (a, b) = v.floor_scaled(0);
                    (a == b).then_some((a, false))
                })
            }
        }
    }

    /// Enclosure of the value with about `rel` leading bits.
    pub fn value_interval(&self, rel: u32) -> Interval {
        let lg = self.floor_log2();
        let prec = (rel as i64 + 2 - lg).max(2) as u32;
        let (f, exact) = self.floor_scaled(prec as i64);
        let hi = if exact { f.clone() } else { &f + 1 };
        Interval { lo: f, hi, prec }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Rational(r) => ratio_to_f64(r),
            Magnitude::Sqrt(r) => ratio_to_f64(r).sqrt(),
            Magnitude::Exp(e) => (e.to_f64() / 2.0).exp(),
        }
    }
}

/// Nearest-ish binary64 of a rational, robust to huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let lg = oracle::floor_log2(&r.abs());
    let s = scale_rational(r, 60 - lg);
    let q = s.numer().div_floor(s.denom());
    // two steps so that subnormal results do not flush early
    let e = (lg - 60).clamp(-1200, 1200) as i32;
    q.to_f64().unwrap() * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
}
