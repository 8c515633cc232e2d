//! Closure analysis: apply an operation to every (pair of) positive value(s)
//! of a format inside a common dynamic range, round the exact result back
//! into the format and record how far off it lands.
//!
//! Exactness is always decided exactly. Relative errors are kept as
//! binary64 estimates, which is all the precision curves need.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bitcodec::{decode_value, encode_exact, Mantissa, TakumBits, TakumValue, GHOST_WIDTH};
use crate::decimal;
use crate::dyadic::Dyadic;
use crate::logarith::{self, LogFixed, SumForm};
use crate::real::{ratio_to_f64, BigReal, Magnitude};
use crate::refformats::{posit_max_exponent, Format, FormatValue};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Sqrt,
    Square,
}

impl Op {
    pub const ALL: [Op; 7] = [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Inv, Op::Sqrt, Op::Square];

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
            Op::Inv => "inv",
            Op::Sqrt => "sqrt",
            Op::Square => "square",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, Op::Inv | Op::Sqrt | Op::Square)
    }

    /// Operations that are exact dyadic maps on `ell` for takums.
    pub fn is_log_domain(self) -> bool {
        !matches!(self, Op::Add | Op::Sub)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Op::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown operation: {s:?}")))
    }
}

#[derive(Clone, Debug)]
enum Val {
    /// Positive takum with this logarithm.
    Log(Dyadic),
    Rat(BigRational),
}

#[derive(Clone, Debug)]
pub struct Operand {
    pub payload: u64,
    val: Val,
}

impl Operand {
    pub fn to_real(&self) -> BigReal {
        match &self.val {
            Val::Log(l) => BigReal::sqrt_e_pow(false, crate::Ell::Exact(*l)),
            Val::Rat(r) => BigReal::from_rational(r.clone()),
        }
    }
}

/// One row of a sweep. `x` and `y` are operand payloads.
#[derive(Clone, Debug)]
pub struct ErrorRecord {
    pub x: u64,
    pub y: Option<u64>,
    pub exact: BigReal,
    pub rounded: u64,
    pub e_abs: f64,
    pub e_rel: f64,
    pub exact_flag: bool,
}

/// `log2(max(1, -log2|e|))`, infinite for exact entries.
pub fn eta(e_rel: f64, exact: bool) -> f64 {
    if exact {
        return f64::INFINITY;
    }
    let a = e_rel.abs();
    assert!(a > 0.0, "inexact record with zero relative error");
    (-a.log2()).max(1.0).log2()
}

const HIST_BINS_PER_UNIT: usize = 1 << 12;
const HIST_UNITS: usize = 16;
/// Sweeps with more records than this keep a histogram instead of every η.
pub const CURVE_EXACT_LIMIT: u64 = 1 << 24;

#[derive(Clone, Debug)]
enum CurveBody {
    Sorted(Vec<f64>),
    Histogram(Vec<u64>),
}

/// Relative precision values sorted in descending order.
#[derive(Clone, Debug)]
pub struct PrecisionCurve {
    exact: u64,
    total: u64,
    body: CurveBody,
}

impl PrecisionCurve {
    fn new(expected: u64) -> Self {
        let body = if expected <= CURVE_EXACT_LIMIT {
            CurveBody::Sorted(Vec::with_capacity(expected as usize))
        } else {
            CurveBody::Histogram(vec![0; HIST_BINS_PER_UNIT * HIST_UNITS])
        };
        PrecisionCurve { exact: 0, total: 0, body }
    }

    fn push(&mut self, eta: f64) {
        self.total += 1;
        if eta.is_infinite() {
            self.exact += 1;
            return;
        }
        match &mut self.body {
            CurveBody::Sorted(v) => v.push(eta),
            CurveBody::Histogram(h) => {
                let i = ((eta * HIST_BINS_PER_UNIT as f64) as usize).min(h.len() - 1);
                h[i] += 1;
            }
        }
    }

    fn finish(&mut self) {
        if let CurveBody::Sorted(v) = &mut self.body {
            v.sort_by(|a, b| b.total_cmp(a));
        }
    }

    pub fn exact_count(&self) -> u64 {
        self.exact
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn fraction(&self, i: u64) -> f64 {
        if self.total <= 1 {
            0.0
        } else {
            i as f64 / (self.total - 1) as f64
        }
    }

    /// Position of the last exact entry on the fraction axis, i.e.
    /// `(k - 1) / (N - 1)` for `k` exact entries out of `N`; zero if none.
    pub fn exactness_ratio(&self) -> f64 {
        match (self.exact, self.total) {
            (0, _) => 0.0,
            (_, 1) => 1.0,
            (k, _) => self.fraction(k - 1),
        }
    }

    /// `(fraction, eta)` pairs, exact entries first. Histogram curves
    /// emit the two ends of every occupied bin.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        match &self.body {
            CurveBody::Sorted(v) => {
                for i in 0..self.exact {
                    out.push((self.fraction(i), f64::INFINITY));
                }
                for (j, &e) in v.iter().enumerate() {
                    out.push((self.fraction(self.exact + j as u64), e));
                }
            }
            CurveBody::Histogram(h) => {
                if self.exact > 0 {
                    out.push((0.0, f64::INFINITY));
                    out.push((self.fraction(self.exact - 1), f64::INFINITY));
                }
                let mut i = self.exact;
                for (b, &c) in h.iter().enumerate().rev().filter(|(_, c)| **c > 0) {
                    let e = b as f64 / HIST_BINS_PER_UNIT as f64;
                    out.push((self.fraction(i), e));
                    out.push((self.fraction(i + c - 1), e));
                    i += c;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    /// Use every `stride`-th operand (both sides for binary operations).
    pub stride: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { stride: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub op: Op,
    pub format: Format,
    pub operands: Vec<Operand>,
    pub curve: PrecisionCurve,
    /// Log-domain takum records where the two exactness checks disagreed.
    pub check_disagreements: u64,
}

impl SweepSummary {
    pub fn exactness_ratio(&self) -> f64 {
        self.curve.exactness_ratio()
    }

    pub fn exact_count(&self) -> u64 {
        self.curve.exact_count()
    }

    pub fn total(&self) -> u64 {
        self.curve.len()
    }
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub summary: SweepSummary,
    pub records: Vec<ErrorRecord>,
}

/// `R` such that the common range is `[2^-R, 2^R]`: the positive range of
/// the posit of the same width.
pub fn range_exponent(format: &Format) -> Result<i64> {
    check_format(format)?;
    Ok(posit_max_exponent(format.width()))
}

fn check_format(format: &Format) -> Result<()> {
    let ok = match format {
        Format::Takum(n) | Format::Posit(n) => (3..=16).contains(n),
        Format::Ieee(fd) => fd.width() <= 16,
        Format::LinearTakum(_) => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedFormat(format!("{format} in a closure sweep")))
    }
}

fn in_range(mag: &Magnitude, r: i64) -> bool {
    let h = mag.floor_log2();
    if h < -r {
        return false;
    }
    h < r || (h == r && mag.floor_scaled(-r) == (num_bigint::BigInt::one(), true))
}

/// Positive finite values of `format` inside the common range, ascending.
pub fn operands(format: &Format) -> Result<Vec<Operand>> {
    let r = range_exponent(format)?;
    let n = format.width();
    let mut out = Vec::new();
    for payload in 1..(1u64 << (n - 1)) {
        let val = match format {
            Format::Takum(_) => match decode_value(TakumBits::new(n, payload)?) {
                TakumValue::Finite { negative: false, ell } => Val::Log(ell),
                _ => continue,
            },
            _ => match format.decode(payload as u128)? {
                FormatValue::Real(BigReal::Finite { negative: false, mag }) => {
                    Val::Rat(mag.exact_rational().expect("rational format"))
                }
                _ => continue,
            },
        };
        let op = Operand { payload, val };
        if let BigReal::Finite { mag, .. } = op.to_real() {
            if in_range(&mag, r) {
                out.push(op);
            }
        }
    }
    Ok(out)
}

/// Whether `(-1)^S sqrt(e)^ell` is an `n`-bit takum, read off the encoding.
pub fn takum_representable(negative: bool, ell: Dyadic, n: u32) -> bool {
    let Ok(enc) = encode_exact(negative, ell) else {
        return false;
    };
    let Mantissa::Exact { p, .. } = enc.mantissa else {
        return false;
    };
    let w = n.max(GHOST_WIDTH);
    if 5 + enc.r + p > w {
        return false;
    }
    let ghost = w - n;
    ghost == 0 || enc.truncate(w) & ((1u128 << ghost) - 1) == 0
}

fn takum_ell(bits: TakumBits) -> Option<(bool, Dyadic)> {
    match decode_value(bits) {
        TakumValue::Finite { negative, ell } => Some((negative, ell)),
        _ => None,
    }
}

fn rel_from_ell_diff(d: f64) -> f64 {
    (d / 2.0).exp_m1()
}

struct Evaluator<'a> {
    op: Op,
    format: Format,
    ops: &'a [Operand],
}

impl Evaluator<'_> {
    fn eval(&self, x: &Operand, y: Option<&Operand>) -> (ErrorRecord, bool) {
        match (&x.val, y.map(|o| &o.val)) {
            (Val::Log(a), None) => self.takum_unary(x, *a),
            (Val::Log(a), Some(Val::Log(b))) => self.takum_binary(x, y.unwrap(), *a, *b),
            _ => (self.rational(x, y), true),
        }
    }

    fn takum_log(&self, x: &Operand, y: Option<&Operand>, lf: LogFixed) -> (ErrorRecord, bool) {
        let n = self.format.width();
        let rounded = lf.round(n);
        let by_encoding = takum_representable(lf.negative, lf.ell, n);
        let (rneg, rell) = takum_ell(rounded).expect("finite result");
        let by_value = rneg == lf.negative && rell == lf.ell;
        let e_rel = rel_from_ell_diff((rell - lf.ell).to_f64());
        let exact = lf.to_real();
        let rec = ErrorRecord {
            x: x.payload,
            y: y.map(|o| o.payload),
            e_abs: e_rel * exact.to_f64(),
            exact,
            rounded: rounded.payload(),
            e_rel,
            exact_flag: by_value,
        };
        (rec, by_encoding == by_value)
    }

    fn takum_unary(&self, x: &Operand, a: Dyadic) -> (ErrorRecord, bool) {
        let v = TakumValue::Finite { negative: false, ell: a };
        let r = match self.op {
            Op::Inv => logarith::inv_exact(&v),
            Op::Sqrt => logarith::sqrt_exact(&v),
            Op::Square => logarith::square_exact(&v),
            _ => unreachable!(),
        };
        self.takum_log(x, None, r.flatten().expect("positive operand"))
    }

    fn takum_binary(&self, x: &Operand, y: &Operand, a: Dyadic, b: Dyadic) -> (ErrorRecord, bool) {
        let n = self.format.width();
        let vx = TakumValue::Finite { negative: false, ell: a };
        let vy = TakumValue::Finite { negative: false, ell: b };
        match self.op {
            Op::Mul => return self.takum_log(x, Some(y), logarith::mul_exact(&vx, &vy).flatten().unwrap()),
            Op::Div => return self.takum_log(x, Some(y), logarith::div_exact(&vx, &vy).flatten().unwrap()),
            _ => {}
        }
        let vy = if self.op == Op::Sub { vy.neg() } else { vy };
        let rounded = logarith::add(&vx, &vy, n);
        let exact = logarith::add_exact(&vx, &vy);
        let (e_rel, exact_f64, exact_flag) = match logarith::sum_form(&vx, &vy) {
            SumForm::Zero => (0.0, 0.0, rounded.is_zero()),
            SumForm::Gauss { negative, a, q, plus } => {
                let (_, rell) = takum_ell(rounded).expect("finite sum");
                let phi = logarith::phi_f64(q.to_f64(), plus);
                let d = (rell - a).to_f64() - phi;
                let v = ((a.to_f64() + phi) / 2.0).exp();
                // a + Phi(q) is transcendental for dyadic q != 0, and
                // q = 0 gives a + 2 ln 2
                (rel_from_ell_diff(d), if negative { -v } else { v }, false)
            }
            _ => unreachable!("positive operands"),
        };
        let rec = ErrorRecord {
            x: x.payload,
            y: Some(y.payload),
            e_abs: e_rel * exact_f64,
            exact,
            rounded: rounded.payload(),
            e_rel,
            exact_flag,
        };
        (rec, true)
    }

    fn rational(&self, x: &Operand, y: Option<&Operand>) -> ErrorRecord {
        let rat = |o: &Operand| match &o.val {
            Val::Rat(r) => r.clone(),
            Val::Log(_) => unreachable!(),
        };
        let a = rat(x);
        let exact = match (self.op, y.map(rat)) {
            (Op::Add, Some(b)) => BigReal::from_rational(a + b),
            (Op::Sub, Some(b)) => BigReal::from_rational(a - b),
            (Op::Mul, Some(b)) => BigReal::from_rational(a * b),
            (Op::Div, Some(b)) => BigReal::from_rational(a / b),
            (Op::Inv, None) => BigReal::from_rational(a.recip()),
            (Op::Square, None) => BigReal::from_rational(&a * &a),
            (Op::Sqrt, None) => BigReal::Finite { negative: false, mag: Magnitude::Sqrt(a) },
            _ => unreachable!(),
        };
        let rounded = self.format.round(&exact).expect("supported format");
        let rv = self.format.decode(rounded).expect("own payload");
        let (e_rel, exact_flag) = rational_error(&exact, &rv);
        ErrorRecord {
            x: x.payload,
            y: y.map(|o| o.payload),
            e_abs: e_rel * exact.to_f64(),
            exact,
            rounded: rounded as u64,
            e_rel,
            exact_flag,
        }
    }
}

fn rational_error(exact: &BigReal, rounded: &FormatValue) -> (f64, bool) {
    let r = match rounded {
        FormatValue::Real(BigReal::Zero) => BigRational::zero(),
        FormatValue::Real(BigReal::Finite { negative, mag }) => {
            let m = mag.exact_rational().expect("rational format");
            if *negative {
                -m
            } else {
                m
            }
        }
        FormatValue::Infinite { .. } => return (f64::INFINITY, false),
        _ => return (f64::NAN, false),
    };
    match exact {
        BigReal::Zero => (if r.is_zero() { 0.0 } else { f64::INFINITY }, r.is_zero()),
        BigReal::Finite { negative, mag } => {
            if let Some(e) = mag.exact_rational() {
                let e = if *negative { -e } else { e };
                let t = (&r - &e) / &e;
                (ratio_to_f64(&t), t.is_zero())
            } else if let Magnitude::Sqrt(v) = mag {
                // r / sqrt(v) - 1 = t / (sqrt(1 + t) + 1) with t = r^2 / v - 1
                let t = &r * &r / v - BigRational::one();
                let t = ratio_to_f64(&t);
                (t / ((1.0 + t).sqrt() + 1.0), false)
            } else {
                unreachable!()
            }
        }
        BigReal::NaR => (f64::NAN, false),
    }
}

/// Runs a sweep, handing records to `sink` in row-major order (ascending
/// `x`, then ascending `y`). Rows are evaluated in parallel, so the thread
/// count never changes the output.
pub fn sweep_each(
    op: Op,
    format: Format,
    cfg: SweepConfig,
    mut sink: impl FnMut(&ErrorRecord),
) -> Result<SweepSummary> {
    let all = operands(&format)?;
    let ops: Vec<Operand> = all.into_iter().step_by(cfg.stride.max(1)).collect();
    let m = ops.len() as u64;
    let per_row = if op.is_unary() { 1 } else { m };
    let mut curve = PrecisionCurve::new(m * per_row);
    let ev = Evaluator { op, format, ops: &ops };
    let batch = ((1usize << 18) / per_row.max(1) as usize).max(1);
    let mut disagreements = 0;
    for chunk in (0..ops.len()).collect::<Vec<_>>().chunks(batch) {
        let rows: Vec<Vec<(ErrorRecord, bool)>> = chunk
            .par_iter()
            .map(|&i| {
                let x = &ev.ops[i];
                if op.is_unary() {
                    vec![ev.eval(x, None)]
                } else {
                    ev.ops.iter().map(|y| ev.eval(x, Some(y))).collect()
                }
            })
            .collect();
        for (rec, agree) in rows.iter().flatten() {
            if !agree {
                disagreements += 1;
            }
            curve.push(eta(rec.e_rel, rec.exact_flag));
            sink(rec);
        }
    }
    curve.finish();
    Ok(SweepSummary {
        op,
        format,
        operands: ops,
        curve,
        check_disagreements: disagreements,
    })
}

/// Runs a sweep and keeps every record.
pub fn sweep(op: Op, format: Format, cfg: SweepConfig) -> Result<Sweep> {
    let mut records = Vec::new();
    let summary = sweep_each(op, format, cfg, |r| records.push(r.clone()))?;
    Ok(Sweep { summary, records })
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

pub fn write_curve(w: &mut impl Write, curve: &PrecisionCurve) -> io::Result<()> {
    writeln!(w, "fraction,eta")?;
    for (f, e) in curve.points() {
        writeln!(w, "{},{}", fmt_f64(f), fmt_f64(e))?;
    }
    Ok(())
}

/// Decimal labels for operands, indexed like `operands`.
pub fn operand_labels(operands: &[Operand]) -> Vec<String> {
    operands
        .par_iter()
        .map(|o| decimal::shortest(&o.to_real()))
        .collect()
}

/// Streams matrix rows; operand payloads are mapped to their labels.
pub struct MatrixWriter<'a, W: Write> {
    out: W,
    operands: &'a [Operand],
    labels: &'a [String],
}

impl<'a, W: Write> MatrixWriter<'a, W> {
    pub fn new(mut out: W, operands: &'a [Operand], labels: &'a [String]) -> io::Result<Self> {
        writeln!(out, "x,y,e_rel")?;
        Ok(MatrixWriter { out, operands, labels })
    }

    fn label(&self, payload: u64) -> &'a str {
        let i = self
            .operands
            .binary_search_by_key(&payload, |o| o.payload)
            .expect("operand of this sweep");
        &self.labels[i]
    }

    pub fn row(&mut self, r: &ErrorRecord) -> io::Result<()> {
        let x = self.label(r.x);
        let y = r.y.map(|y| self.label(y)).unwrap_or_default();
        writeln!(self.out, "{x},{y},{}", fmt_f64(r.e_rel))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
