//! Interval arithmetic on fixed-point big integers.
//!
//! Every function returns a closed interval `[lo, hi] * 2^-prec` that is
//! guaranteed to contain the true real. Callers that need a discrete
//! decision (a rounding bit, a decimal digit) evaluate at some precision,
//! check whether the decision is the same at both ends, and double the
//! precision otherwise.

use std::cell::RefCell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Guard bits carried by the series evaluations beyond the requested precision.
const GUARD: u32 = 40;
/// Argument halvings before the exp Taylor series.
const EXP_HALVINGS: u32 = 12;

/// Baseline working precision; `TAKUM_ORACLE_BITS` overrides it.
pub fn baseline_bits() -> u32 {
    std::env::var("TAKUM_ORACLE_BITS")
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&b| b >= 16)
        .unwrap_or(192)
}

/// Upper bound on escalation; reaching it means the caller asked to
/// separate two reals that are equal.
pub const MAX_BITS: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

/// Floor division by `2^k` (BigInt `>>` already rounds toward -inf).
fn shr_floor(v: &BigInt, k: u32) -> BigInt {
    v >> k as usize
}

fn shr_ceil(v: &BigInt, k: u32) -> BigInt {
    -((-v) >> k as usize)
}

impl Interval {
    pub fn point(v: BigInt, prec: u32) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        Self::point(BigInt::from(v) << prec as usize, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let scaled = r.numer() << prec as usize;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        let hi = if rem.is_zero() { q.clone() } else { &q + 1 };
        Interval { lo: q, hi, prec }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Re-expresses the interval at another precision, widening outward.
    pub fn at_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                Interval {
                    lo: &self.lo << s,
                    hi: &self.hi << s,
                    prec,
                }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                Interval {
                    lo: shr_floor(&self.lo, s),
                    hi: shr_ceil(&self.hi, s),
                    prec,
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn add(&self, o: &Interval) -> Self {
        let p = self.prec.max(o.prec);
        let (a, b) = (self.at_prec(p), o.at_prec(p));
        Interval {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            prec: p,
        }
    }

    pub fn sub(&self, o: &Interval) -> Self {
        self.add(&o.neg())
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if k >= 0 {
            Interval {
                lo: &self.lo << k as usize,
                hi: &self.hi << k as usize,
                prec: self.prec,
            }
        } else {
            Interval {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
                prec: self.prec + (-k) as u32,
            }
        }
    }

    pub fn mul(&self, o: &Interval) -> Self {
        let p = self.prec.max(o.prec);
        let (a, b) = (self.at_prec(p), o.at_prec(p));
        let prods = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let mn = prods.iter().min().unwrap();
        let mx = prods.iter().max().unwrap();
        Interval {
            lo: shr_floor(mn, p),
            hi: shr_ceil(mx, p),
            prec: p,
        }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Interval) -> Option<Self> {
        let p = self.prec.max(o.prec);
        let (a, b) = (self.at_prec(p), o.at_prec(p));
        if b.lo.sign() != b.hi.sign() || b.lo.is_zero() || b.hi.is_zero() {
            return None;
        }
        let mut qs = Vec::with_capacity(4);
        for n in [&a.lo, &a.hi] {
            for d in [&b.lo, &b.hi] {
                let num: BigInt = n << p as usize;
                qs.push((num.div_floor(d), num.div_ceil(d)));
            }
        }
        Some(Interval {
            lo: qs.iter().map(|q| q.0.clone()).min().unwrap(),
            hi: qs.iter().map(|q| q.1.clone()).max().unwrap(),
            prec: p,
        })
    }

    /// `(floor(lo * 2^k), floor(hi * 2^k))` for `k <= prec`.
    pub fn floor_scaled(&self, k: u32) -> (BigInt, BigInt) {
        let s = self.prec - k;
        (shr_floor(&self.lo, s), shr_floor(&self.hi, s))
    }

    /// Three-way comparison against an exact rational, `None` if undecided.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        let num = r.numer() << self.prec as usize;
        let lo = &self.lo * r.denom();
        let hi = &self.hi * r.denom();
        if hi < num {
            Some(Ordering::Less)
        } else if lo > num {
            Some(Ordering::Greater)
        } else if lo == num && hi == num {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn mid_f64(&self) -> f64 {
        let s = (&self.lo + &self.hi).to_f64().unwrap_or(f64::NAN);
        s / 2f64.powi(self.prec as i32 + 1)
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.prec))
    }
}

thread_local! {
    static LN2_CACHE: RefCell<(u32, BigInt)> = RefCell::new((0, BigInt::zero()));
}

/// `2 atanh(1/3)` at `w` bits, error below `w/3 + 2` units before the final shift.
fn ln2_series(w: u32) -> BigInt {
    let mut t: BigInt = pow2(w) / 3;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !t.is_zero() {
        sum += &t / (2 * k + 1);
        t /= 9;
        k += 1;
    }
    sum << 1
}

/// ln 2 at `w` fractional bits, within a few units of the last place.
fn ln2_raw(w: u32) -> BigInt {
    LN2_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.0 < w + GUARD {
            let p = (w + GUARD).max(2 * c.0);
            let v = ln2_series(p);
            *c = (p, v);
        }
        shr_floor(&c.1, c.0 - w)
    })
}

pub fn ln2(prec: u32) -> Interval {
    let v = ln2_raw(prec);
    Interval {
        lo: &v - 1,
        hi: &v + 2,
        prec,
    }
}

/// Approximates `exp(x / 2^w) * 2^w`.
fn exp_raw(x: &BigInt, w: u32) -> BigInt {
    let xf = x.to_f64().unwrap_or(0.0) / 2f64.powi(w as i32);
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let v = w + GUARD + k.max(0) as u32 + (64 - (k.unsigned_abs()).leading_zeros());
    let l2 = ln2_raw(v);
    let r: BigInt = (x << (v - w) as usize) - &l2 * k;
    let u = v + EXP_HALVINGS;
    let one = pow2(u);
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u32;
    loop {
        term = (&term * &r) >> u as usize;
        term /= i;
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..EXP_HALVINGS {
        sum = (&sum * &sum) >> u as usize;
    }
    let down = u as i64 - w as i64 - k;
    if down >= 0 {
        shr_floor(&sum, down as u32)
    } else {
        sum << (-down) as usize
    }
}

/// Approximates `ln(y / 2^w_in) * 2^w` for `y > 0`.
fn ln_raw(y: &BigInt, w_in: u32, w: u32) -> BigInt {
    let m = y.bits() as i64 - 1 - w_in as i64;
    let v = w + GUARD + (64 - m.unsigned_abs().leading_zeros());
    // u = y / 2^(w_in + m) in [1, 2), held at v bits
    let sh = v as i64 - w_in as i64 - m;
    let u = if sh >= 0 {
        y << sh as usize
    } else {
        y >> (-sh) as usize
    };
    let one = pow2(v);
    let z: BigInt = ((&u - &one) << v as usize) / (&u + &one);
    let z2 = (&z * &z) >> v as usize;
    let mut t = z;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !t.is_zero() {
        sum += &t / (2 * k + 1);
        t = (&t * &z2) >> v as usize;
        k += 1;
    }
    let total = (sum << 1) + ln2_raw(v) * m;
    shr_floor(&total, v - w)
}

/// Enclosure of `exp(x)` at the precision of `x`.
pub fn exp(x: &Interval) -> Interval {
    let p = x.prec;
    let lo: BigInt = exp_raw(&x.lo, p) - 2;
    let hi = exp_raw(&x.hi, p) + 2;
    Interval {
        lo: if lo.is_negative() { BigInt::zero() } else { lo },
        hi,
        prec: p,
    }
}

/// Enclosure of `ln(x)` at `prec` fractional bits; `None` unless `x > 0`.
pub fn ln(x: &Interval, prec: u32) -> Option<Interval> {
    if !x.lo.is_positive() {
        return None;
    }
    Some(Interval {
        lo: ln_raw(&x.lo, x.prec, prec) - 2,
        hi: ln_raw(&x.hi, x.prec, prec) + 2,
        prec,
    })
}

/// `floor(log2(r))` for a positive rational.
pub fn floor_log2(r: &BigRational) -> i64 {
    let e = r.numer().bits() as i64 - r.denom().bits() as i64;
    // r in [2^(e-1), 2^(e+1))
    let probe = if e >= 0 {
        BigRational::from_integer(pow2(e as u32))
    } else {
        BigRational::new(BigInt::one(), pow2((-e) as u32))
    };
    if *r >= probe {
        e
    } else {
        e - 1
    }
}

/// Enclosure of `ln(r)` at `prec` fractional bits for positive rational `r`.
pub fn ln_rational(r: &BigRational, prec: u32) -> Interval {
    if r.is_one() {
        return Interval::from_int(0, prec);
    }
    let lg = floor_log2(r);
    let w_in = prec + GUARD + (-lg).max(0) as u32;
    ln(&Interval::from_rational(r, w_in), prec).expect("positive argument")
}

/// Enclosure of `exp(x)` with at least `rel` correct leading bits.
pub fn exp_rel(x: &Interval, rel: u32) -> Interval {
    let approx = x.mid_f64() / std::f64::consts::LN_2;
    let extra = if approx < 0.0 { (-approx).ceil() as u32 } else { 0 };
    exp(&x.at_prec(rel + extra + 8))
}

/// Base of a Gaussian logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussBase {
    SqrtE,
    E,
    Two,
}

/// `ln(1 +- exp(-q))` as an enclosure; `None` if the precision is too low
/// to keep `1 - exp(-q)` away from zero.
fn phi_e(q: &Interval, plus: bool) -> Option<Interval> {
    let p = q.prec;
    let t = exp(&q.neg());
    let one = pow2(p);
    let arg = if plus {
        Interval {
            lo: &one + &t.lo,
            hi: &one + &t.hi,
            prec: p,
        }
    } else {
        Interval {
            lo: &one - &t.hi,
            hi: &one - &t.lo,
            prec: p,
        }
    };
    ln(&arg, p)
}

/// Gaussian logarithm `log_b(1 +- b^-q)` at working precision `prec`.
pub fn gauss_log_iv(q: &Interval, plus: bool, base: GaussBase, prec: u32) -> Option<Interval> {
    let q = q.at_prec(prec.max(q.prec));
    match base {
        GaussBase::E => phi_e(&q, plus),
        GaussBase::SqrtE => phi_e(&q.mul_pow2(-1).at_prec(q.prec), plus).map(|v| v.mul_pow2(1)),
        GaussBase::Two => {
            let l2 = ln2(q.prec);
            phi_e(&q.mul(&l2), plus).and_then(|v| v.div(&l2))
        }
    }
}
