//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits with status 0 so the rest of the workspace still runs; set
//! `TAKUM_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.
//! `TAKUM_FULL=1` makes the 16-bit binary closure sweeps exhaustive.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use takum::analysis::{self, CodingScheme};
use takum::bitcodec::{
    self, decode, decode_value, flip_sign, invert_bits, negate_bits, round_value, TakumBits,
    TakumValue,
};
use takum::closure::{self, Op, SweepConfig};
use takum::constants::represent_by_name;
use takum::lintakum::{lin_decode, lin_value_rational};
use takum::decimal;
use takum::logarith;
use takum::oracle;
use takum::refformats::{posit_fields, posit_round, IEEE_FORMATS};
use takum::{BigReal, Dyadic};

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, detail: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.detail.push(format!("mismatch: {}", msg.into()));
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.detail.push(msg.into());
    }
}

fn all_bits(n: u32) -> impl Iterator<Item = TakumBits> {
    TakumBits::all(n)
}

fn nar_or(n: u32, b: TakumBits) -> bool {
    b == TakumBits::nar(n)
}

/// Signed order of patterns, NaR excluded.
fn signed_patterns(n: u32) -> Vec<TakumBits> {
    let mut v: Vec<TakumBits> = all_bits(n).filter(|b| !b.is_nar()).collect();
    v.sort_by_key(|b| b.as_signed());
    v
}

fn structural(n: u32, o: &mut Outcome) {
    // uniqueness
    let vals: HashSet<TakumValue> = all_bits(n).map(decode_value).collect();
    o.check(vals.len() == 1 << n, format!("n={n}: {} distinct values", vals.len()));

    // monotonicity
    let ordered = signed_patterns(n);
    for w in ordered.windows(2) {
        let (a, b) = (decode_value(w[0]), decode_value(w[1]));
        if a.total_cmp(&b) != std::cmp::Ordering::Less {
            o.check(false, format!("n={n}: {:?} !< {:?}", w[0], w[1]));
            break;
        }
    }

    for b in all_bits(n) {
        let v = decode_value(b);
        let neg = decode_value(negate_bits(b));
        if neg != v.neg() {
            o.check(false, format!("n={n}: negation of {b:?}"));
            return;
        }
        match (v, invert_bits(b)) {
            (TakumValue::NaR, r) => {
                if r.is_ok() {
                    o.check(false, format!("n={n}: NaR inverted"));
                    return;
                }
            }
            (TakumValue::Zero, Ok(r)) => {
                if !nar_or(n, r) {
                    o.check(false, format!("n={n}: 1/0 is not NaR"));
                    return;
                }
            }
            (TakumValue::Finite { negative, ell }, Ok(r)) => {
                let want = TakumValue::Finite { negative, ell: -ell };
                if decode_value(r) != want {
                    o.check(false, format!("n={n}: inversion of {b:?}"));
                    return;
                }
                let flipped = decode_value(flip_sign(b));
                let want = TakumValue::Finite { negative: !negative, ell: -ell };
                if flipped != want {
                    o.check(false, format!("n={n}: sign flip of {b:?} is not -1/x"));
                    return;
                }
            }
            (_, Err(e)) => {
                o.check(false, format!("n={n}: {e}"));
                return;
            }
        }
        if round_value(&v, n) != b {
            o.check(false, format!("n={n}: round(decode({b:?})) differs"));
            return;
        }
    }
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for n in 2..=16 {
        structural(n, &mut o);
    }
    let el = t.elapsed();
    o.check(el < Duration::from_secs(60), format!("took {el:?}"));
    o.note(format!("n = 2..16, all patterns, {el:.2?}"));
    o
}

/// Random positive or negative rationals spread over the takum range.
fn random_real(rng: &mut StdRng) -> BigReal {
    let mant: u64 = rng.gen_range(1u64 << 52..1u64 << 53);
    let e: i64 = rng.gen_range(-235..=131);
    let mut r = BigRational::from_integer(BigInt::from(mant));
    let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs() as usize);
    r = if e >= 0 { r * p } else { r / p };
    if rng.gen_bool(0.5) {
        r = -r;
    }
    BigReal::from_rational(r)
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    for n in [12u32, 16] {
        for b in all_bits(n) {
            let (v, f) = decode(b);
            if let TakumValue::Finite { .. } = v {
                let p = analysis::mantissa_bit_count(&v, n).unwrap();
                if p != f.p {
                    o.check(false, format!("n={n} {b:?}: formula {p}, decoded {}", f.p));
                    break;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x7a6b_0002);
    for n in [12u32, 16] {
        let mut checked = 0;
        while checked < 100_000 {
            let x = random_real(&mut rng);
            let Ok(lb) = analysis::mantissa_bit_count_lower_bound(&x, n) else {
                continue;
            };
            let p = analysis::decoded_p(bitcodec::round(&x, n).unwrap());
            if (p as i32) < lb {
                o.check(false, format!("n={n}: p={p} below bound {lb}"));
                break;
            }
            checked += 1;
        }
    }
    o.note("formula exhaustive at n = 12, 16; bound on 10^5 reals per width");
    o
}

/// `|decode(round(x)) / x - 1| <= lambda(p)` decided with the oracle.
fn within_lambda(x: &BigReal, n: u32) -> Option<bool> {
    let BigReal::Finite { mag, .. } = x else { return Some(true) };
    let r = bitcodec::round(x, n).unwrap();
    let TakumValue::Finite { ell: lr, .. } = decode_value(r) else {
        return Some(false);
    };
    let p = analysis::decoded_p(r);
    let prec = 256;
    let lx = mag.ell_interval(prec)?;
    let d = oracle::Interval::point(lr.to_fixed(prec), prec).sub(&lx).mul_pow2(-1);
    let q = oracle::exp(&d.at_prec(prec)).sub(&oracle::Interval::from_int(1, prec));
    let lam = analysis::lambda_interval(p, prec);
    let worst = q.lo.clone().abs().max(q.hi.clone().abs());
    let best = if q.lo.sign() == q.hi.sign() {
        q.lo.clone().abs().min(q.hi.clone().abs())
    } else {
        BigInt::zero()
    };
    if worst <= lam.at_prec(q.prec).lo {
        Some(true)
    } else if best > lam.at_prec(q.prec).hi {
        Some(false)
    } else {
        None
    }
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    for p in 0..=64 {
        o.check(analysis::lambda_below_two_thirds_epsilon(p), format!("p={p}"));
    }
    let mut rng = StdRng::seed_from_u64(0x7a6b_0003);
    for n in [12u32, 16, 32] {
        let (mut checked, mut above, mut undecided) = (0, 0, 0);
        let mut first = None;
        while checked < 10_000 {
            let x = random_real(&mut rng);
            if bitcodec::encode_real(&x).is_err() {
                continue;
            }
            match within_lambda(&x, n) {
                Some(true) => {}
                Some(false) => {
                    above += 1;
                    first.get_or_insert_with(|| decimal::shortest(&x));
                }
                None => undecided += 1,
            }
            checked += 1;
        }
        o.check(above == 0, format!("n={n}: {above} of 10^4 above lambda(p), first {first:?}"));
        o.check(undecided == 0, format!("n={n}: {undecided} undecided at 256 bits"));
    }
    o.note("p = 0..64; 10^4 reals per width 12, 16, 32");
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let want = [5.08, 3.12, 0.78, 0.78, 0.39, 82.03, 98.88, 99.93];
    for (fd, w) in IEEE_FORMATS.iter().zip(want) {
        let r = analysis::ieee_waste_ratio_of(fd);
        let pct = 100.0 * takum::real::ratio_to_f64(&r);
        o.check((pct - w).abs() <= 0.01, format!("{}: {pct:.4} vs {w}", fd.name));
        o.note(format!("{}: {pct:.4}%", fd.name));
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << 46usize);
    o.check(analysis::posit_waste_ratio(47).unwrap().is_zero(), "n=47");
    o.check(analysis::posit_waste_ratio(48).unwrap() == tiny, "n=48");
    o.check(analysis::posit_waste_ratio(64).unwrap() == tiny, "n=64");
    o
}

fn takum_cost_by_encoder(v: u64) -> u32 {
    let e = bitcodec::encode_exact(false, Dyadic::from_int(v as i64)).unwrap();
    4 + e.r
}

/// Searches unbounded posit (es = 2) prefixes by regime length: a run of
/// `l` ones, its terminator and two exponent bits encode `2^(4(l-1)+e)`.
fn posit_cost_unbounded(v: u64) -> u32 {
    for l in 1u32.. {
        for e in 0..4u64 {
            let mut bits = vec![true; l as usize];
            bits.push(false);
            bits.extend([e & 2 != 0, e & 1 != 0]);
            let run = bits.iter().take_while(|&&b| b).count() as u64;
            let ex = bits[run as usize + 1..].iter().fold(0, |a, &b| 2 * a + b as u64);
            if 4 * (run - 1) + ex == v {
                return bits.len() as u32;
            }
        }
    }
    unreachable!()
}

/// Same cost read off the 64-bit posit encoder, while 2^v fits in it.
fn posit_cost_by_encoder(v: u64) -> Option<u32> {
    let x = BigReal::from_rational(BigRational::from_integer(BigInt::one() << v as usize));
    let p = posit_round(&x, 64).unwrap();
    let f = posit_fields(64, p);
    (f.k + 3 <= 63).then_some(f.k + 3)
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    for v in 0..=254 {
        let t = analysis::coding_cost(CodingScheme::Takum, v).unwrap();
        o.check(t == takum_cost_by_encoder(v), format!("takum cost at {v}"));
        let p = analysis::coding_cost(CodingScheme::Posit, v).unwrap();
        o.check(p == posit_cost_unbounded(v), format!("posit cost at {v}"));
        if let Some(q) = posit_cost_by_encoder(v) {
            o.check(p == q, format!("posit64 cost at {v}"));
        }
    }
    for v in 16..=30 {
        o.check(analysis::coding_cost(CodingScheme::Takum, v).unwrap() == 8, format!("takum {v}"));
    }
    o.check(analysis::coding_cost(CodingScheme::Takum, 254).unwrap() == 11, "takum 254");
    o.check(analysis::coding_cost(CodingScheme::Posit, 30).unwrap() == 11, "posit 30");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let cells = common::published_cells();
    let mut bad = 0;
    for (sym, fmt, want) in &cells {
        let got = represent_by_name(sym, fmt).unwrap();
        if got != *want {
            bad += 1;
            o.check(false, format!("{sym} in {fmt}: {got} vs {want}"));
        }
    }
    let el = t.elapsed();
    o.check(el < Duration::from_secs(1), format!("took {el:?}"));
    o.note(format!("{} of {} cells, {el:.2?}", cells.len() - bad, cells.len()));
    o
}

/// Compares a sweep ratio with its target; `None` means "at most 0.05".
fn ratio_check(o: &mut Outcome, label: &str, got: f64, want: Option<f64>) {
    let pct = 100.0 * got;
    let ok = match want {
        Some(w) => (pct - w).abs() <= 0.1 + 1e-9,
        None => pct <= 0.05,
    };
    let w = want.map_or("<= 0.05".to_string(), |w| format!("{w}"));
    o.check(ok, format!("{label}: {pct:.3} vs {w}"));
    o.note(format!("{label}: {pct:.3}% (target {w})"));
}

fn sweep_ratio(op: Op, fmt: &str, stride: usize) -> closure::SweepSummary {
    closure::sweep_each(op, fmt.parse().unwrap(), SweepConfig { stride }, |_| {}).unwrap()
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let table: [(Op, Option<f64>, f64); 7] = [
        (Op::Add, None, 7.5),
        (Op::Sub, Some(1.9), 15.9),
        (Op::Mul, Some(40.3), 25.6),
        (Op::Div, Some(40.3), 25.6),
        (Op::Inv, Some(100.0), 30.2),
        (Op::Sqrt, Some(58.8), 20.6),
        (Op::Square, Some(60.0), 20.6),
    ];
    for (op, t, p) in table {
        let s = sweep_ratio(op, "takum8", 1);
        o.check(s.check_disagreements == 0, format!("takum8 {op}: exactness checks disagree"));
        ratio_check(&mut o, &format!("takum8 {op}"), s.exactness_ratio(), t);
        let s = sweep_ratio(op, "posit8", 1);
        ratio_check(&mut o, &format!("posit8 {op}"), s.exactness_ratio(), Some(p));
    }
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let full = std::env::var("TAKUM_FULL").is_ok_and(|v| v == "1");
    let fmts = ["takum16", "posit16", "bfloat16"];
    let unary: [(Op, [f64; 3]); 2] = [(Op::Inv, [100.0, 0.3, 0.8]), (Op::Sqrt, [84.1, 1.3, 3.1])];
    for (op, targets) in unary {
        for (f, t) in fmts.iter().zip(targets) {
            let start = Instant::now();
            let s = sweep_ratio(op, f, 1);
            let el = start.elapsed();
            o.check(el < Duration::from_secs(60), format!("{f} {op} took {el:?}"));
            ratio_check(&mut o, &format!("{f} {op}"), s.exactness_ratio(), Some(t));
        }
    }
    let binary: [(Op, [Option<f64>; 3]); 4] = [
        (Op::Add, [None, Some(8.5), Some(1.7)]),
        (Op::Sub, [None, Some(16.7), Some(3.5)]),
        (Op::Mul, [Some(36.6), Some(3.3), Some(2.7)]),
        (Op::Div, [Some(36.7), Some(3.3), Some(2.7)]),
    ];
    for (op, targets) in binary {
        for (f, t) in fmts.iter().zip(targets) {
            if full {
                let s = sweep_ratio(op, f, 1);
                ratio_check(&mut o, &format!("{f} {op}"), s.exactness_ratio(), t);
                continue;
            }
            let m = closure::operands(&f.parse().unwrap()).unwrap().len();
            let stride = (m / 200).max(1);
            let s = sweep_ratio(op, f, stride);
            // structural expectations that hold on any subset
            if f.starts_with("takum") {
                o.check(s.check_disagreements == 0, format!("{f} {op}: exactness checks disagree"));
                let k = s.exact_count();
                let m = s.operands.len() as u64;
                match op {
                    Op::Add => o.check(k == 0, format!("{f} add: {k} exact sums")),
                    Op::Sub => o.check(k == m, format!("{f} sub: {k} exact, {m} on the diagonal")),
                    _ => {}
                }
            }
            o.note(format!(
                "{f} {op}: {:.3}% on a stride-{stride} sample (target {})",
                100.0 * s.exactness_ratio(),
                t.map_or("<= 0.05".into(), |t| t.to_string())
            ));
        }
    }
    if !full {
        o.note("binary operations ran as a strided smoke test; TAKUM_FULL=1 runs them exhaustively");
    }
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let n = 8;
    let vals: Vec<TakumValue> = all_bits(n).map(decode_value).collect();
    let nar = TakumBits::nar(n);
    for x in &vals {
        for y in &vals {
            if !x.is_nar() && !y.is_nar() {
                continue;
            }
            for (name, r) in [
                ("add", logarith::add(x, y, n)),
                ("sub", logarith::sub(x, y, n)),
                ("mul", logarith::mul(x, y, n)),
                ("div", logarith::div(x, y, n)),
            ] {
                o.check(r == nar, format!("{name}({x:?}, {y:?})"));
            }
        }
        if x.is_nar() {
            o.check(logarith::inv(x, n) == nar, "inv(NaR)");
            o.check(logarith::sqrt_abs(x, n) == nar, "sqrt(NaR)");
            o.check(logarith::square(x, n) == nar, "square(NaR)");
        }
    }
    o.note("all takum8 operand pairs with a NaR operand");
    o
}

trait IsNaR {
    fn is_nar(&self) -> bool;
}

impl IsNaR for TakumValue {
    fn is_nar(&self) -> bool {
        matches!(self, TakumValue::NaR)
    }
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    for n in 2..=16u32 {
        let ordered = signed_patterns(n);
        let vals: Vec<Option<BigRational>> =
            ordered.iter().map(|&b| lin_value_rational(b)).collect();
        let distinct: HashSet<_> = vals.iter().collect();
        o.check(distinct.len() == vals.len(), format!("n={n}: duplicate linear values"));
        for w in vals.windows(2) {
            if w[0] >= w[1] {
                o.check(false, format!("n={n}: linear order broken"));
                break;
            }
        }
        for &b in &ordered {
            if lin_value_rational(negate_bits(b)) != lin_value_rational(b).map(|v| -v) {
                o.check(false, format!("n={n}: linear negation of {b:?}"));
                break;
            }
        }
        o.check(lin_decode(negate_bits(TakumBits::nar(n))) == lin_decode(TakumBits::nar(n)), "NaR");
    }
    // the bitwise inversion rule does not carry over
    let n = 12;
    let counter = signed_patterns(n).into_iter().find(|&b| {
        let Some(v) = lin_value_rational(b).filter(|v| !v.is_zero()) else {
            return false;
        };
        lin_value_rational(invert_bits(b).unwrap()) != Some(v.recip())
    });
    match counter {
        Some(b) => o.note(format!(
            "inversion counterexample: {} = {} but the inverted pattern decodes to {}",
            takum::lintakum::LinearText(b),
            lin_value_rational(b).unwrap(),
            lin_value_rational(invert_bits(b).unwrap()).unwrap()
        )),
        None => o.check(false, "no inversion counterexample found"),
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("structural properties, n = 2..16", criterion_1),
        ("mantissa bit count and its lower bound", criterion_2),
        ("machine precision bound", criterion_3),
        ("IEEE waste ratios", criterion_4),
        ("posit waste ratio", criterion_5),
        ("coding cost anchors", criterion_6),
        ("constant tables", criterion_7),
        ("8-bit closure ratios", criterion_8),
        ("16-bit closure ratios", criterion_9),
        ("NaR propagation", criterion_10),
        ("linear takums", criterion_11),
    ];
    let only: Option<usize> = std::env::var("TAKUM_ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {:>2}: {name} ({:.2?})", i + 1, start.elapsed());
        for d in &o.detail {
            println!("      {d}");
        }
    }
    println!("{failed} criteria failed");
    if failed > 0 && std::env::var("TAKUM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
