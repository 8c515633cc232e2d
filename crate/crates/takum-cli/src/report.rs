use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use takum::analysis::{self, CodingScheme};
use takum::closure::{self, MatrixWriter, Op, SweepConfig, SweepSummary};
use takum::constants::{self, LARGE_CONSTANTS, SI_CONSTANTS};
use takum::decimal;
use takum::refformats::{Format, IEEE_FORMATS};
use takum::{BigReal, Error};

use crate::output::{csv_line, write_atomic};
use crate::{Failure, ReportArgs, ReportTarget};

type Res<T> = Result<T, Failure>;

/// Formats swept when `--format` is absent.
pub const DEFAULT_CLOSURE_FORMATS: [&str; 5] = ["takum8", "posit8", "takum16", "posit16", "bfloat16"];

/// Operand count of the strided samples used for wide binary sweeps.
pub const SAMPLE_OPERANDS: usize = 200;

/// Matrices above this many records are skipped unless asked for.
pub const MATRIX_LIMIT: u64 = 1 << 24;

pub fn run(args: ReportArgs) -> Res<()> {
    let out = args.out.as_path();
    match args.target {
        ReportTarget::Waste => waste(out),
        ReportTarget::Cost => cost(out),
        ReportTarget::Dynrange => dynrange(out),
        ReportTarget::Bounds { width, format, step } => bounds(out, width, &format, step),
        ReportTarget::Constants { text } => constants_tables(out, text),
        ReportTarget::Closure { op, format, full, stride, matrix } => {
            closure_sweeps(out, &op, &format, full, stride, matrix)
        }
    }
}

fn ratio_text(r: &BigRational) -> String {
    format!("{}", r)
}

fn percent(r: &BigRational) -> String {
    format!("{:.4}", r.to_f64().unwrap_or(f64::NAN) * 100.0)
}

fn waste(out: &Path) -> Res<()> {
    write_atomic(out, "waste.csv", |w| {
        writeln!(w, "format,n_e,n_f,subnormals,ratio,percent")?;
        for fd in IEEE_FORMATS {
            let r = analysis::ieee_waste_ratio_of(&fd);
            writeln!(w, "{},{},{},{},{},{}", fd.name, fd.n_e, fd.n_f, fd.subnormals, ratio_text(&r), percent(&r))?;
        }
        for n in [8, 16, 32, 47, 48, 64] {
            let r = analysis::posit_waste_ratio(n)?;
            writeln!(w, "posit{n},,,,{},{}", ratio_text(&r), percent(&r))?;
        }
        Ok(())
    })
}

fn cost(out: &Path) -> Res<()> {
    use CodingScheme::*;
    write_atomic(out, "cost.csv", |w| {
        writeln!(w, "value,takum,posit,elias_gamma,elias_delta")?;
        for v in 0..=254 {
            let c: Vec<String> = [Takum, Posit, EliasGamma, EliasDelta]
                .iter()
                .map(|&s| analysis::coding_cost(s, v).map(|c| c.to_string()))
                .collect::<Result<_, Error>>()?;
            writeln!(w, "{v},{}", c.join(","))?;
        }
        Ok(())
    })
}

fn real_text(x: &BigReal) -> String {
    decimal::shortest(x)
}

fn rational_text(r: BigRational) -> String {
    real_text(&BigReal::from_rational(r))
}

fn dynrange(out: &Path) -> Res<()> {
    write_atomic(out, "dynamic_range.csv", |w| {
        writeln!(w, "n,takum_min,takum_max,posit_min,posit_max,ieee_normal_min,ieee_subnormal_min,ieee_max")?;
        for n in 2..=64u32 {
            let (tmin, tmax) = analysis::dynamic_range(&Format::Takum(n))?;
            let (pmin, pmax) = analysis::dynamic_range(&Format::Posit(n))?;
            let mut cells = vec![n.to_string(), real_text(&tmin), real_text(&tmax), real_text(&pmin), real_text(&pmax)];
            match analysis::ieee_params_for_width(n) {
                Some(fd) => {
                    cells.push(rational_text(fd.min_normal()));
                    cells.push(fd.min_subnormal().map(rational_text).unwrap_or_default());
                    cells.push(rational_text(fd.max_value()));
                }
                None => cells.extend(std::iter::repeat_n(String::new(), 3)),
            }
            csv_line(w, &cells)?;
        }
        Ok(())
    })
}

/// Columns of the bounds table: labels and formats.
pub fn bound_columns(width: Option<u32>, formats: &[String]) -> Res<Vec<(String, Format)>> {
    if !formats.is_empty() {
        return formats
            .iter()
            .map(|s| Ok((s.clone(), s.parse::<Format>()?)))
            .collect();
    }
    let widths = match width {
        Some(n) => vec![n],
        None => vec![8, 16, 32, 64],
    };
    let mut cols = Vec::new();
    for n in widths {
        cols.push((format!("takum{n}"), Format::Takum(n)));
        cols.push((format!("posit{n}"), Format::Posit(n)));
        if let Some(fd) = analysis::ieee_params_for_width(n) {
            let label = if fd.name == "ieee" { format!("ieee{n}") } else { fd.name.to_string() };
            cols.push((label, Format::Ieee(fd)));
        }
    }
    Ok(cols)
}

fn bounds(out: &Path, width: Option<u32>, formats: &[String], step: f64) -> Res<()> {
    if !(step > 0.0 && step <= 120.0) {
        return Err(Failure::Usage(format!("--step {step} outside (0, 120]")));
    }
    let cols = bound_columns(width, formats)?;
    let count = (120.0 / step).round() as i64;
    let decimals = step_decimals(step);
    write_atomic(out, "error_bounds.csv", |w| {
        let header: Vec<String> = std::iter::once("log10_x".to_string())
            .chain(cols.iter().map(|c| c.0.clone()))
            .collect();
        csv_line(w, &header)?;
        for k in 0..=count {
            let x = -60.0 + k as f64 * 120.0 / count as f64;
            let mut cells = vec![format!("{x:.decimals$}")];
            cells.extend(cols.iter().map(|(_, f)| format!("{}", analysis::neg_log2_bound(f, x))));
            csv_line(w, &cells)?;
        }
        Ok(())
    })
}

/// Decimal places needed to print multiples of `step`.
fn step_decimals(step: f64) -> usize {
    (0..=9)
        .find(|&d| {
            let s = step * 10f64.powi(d as i32);
            (s - s.round()).abs() < 1e-9
        })
        .unwrap_or(9)
}

fn print_aligned(rows: &[Vec<String>]) {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        crate::emit(line.join("  ").trim_end());
    }
}

fn constants_tables(out: &Path, text: bool) -> Res<()> {
    let tables = [
        ("constants_si.csv", constants::table(&SI_CONSTANTS)?),
        ("constants_large.csv", constants::table(&LARGE_CONSTANTS)?),
    ];
    for (i, (name, rows)) in tables.iter().enumerate() {
        if text {
            if i > 0 {
                crate::emit("");
            }
            print_aligned(rows);
        } else {
            write_atomic(out, name, |w| {
                for r in rows {
                    csv_line(w, r)?;
                }
                Ok(())
            })?;
        }
    }
    Ok(())
}

fn parse_ops(ops: &[String]) -> Res<Vec<Op>> {
    if ops.is_empty() || ops.iter().any(|o| o.eq_ignore_ascii_case("all")) {
        return Ok(Op::ALL.to_vec());
    }
    Ok(ops.iter().map(|o| o.parse::<Op>()).collect::<Result<_, Error>>()?)
}

/// Stride of a sweep: explicit, or sampled for binary ops on wide formats.
pub fn default_stride(op: Op, format: &Format, operand_count: usize, full: bool) -> usize {
    if full || op.is_unary() || format.width() <= 8 {
        1
    } else {
        operand_count.div_ceil(SAMPLE_OPERANDS).max(1)
    }
}

pub fn record_count(op: Op, sampled: usize) -> u64 {
    let m = sampled as u64;
    if op.is_unary() {
        m
    } else {
        m * m
    }
}

fn sweep_to_files(out: &Path, op: Op, format: Format, stride: usize, matrix: bool) -> Res<SweepSummary> {
    let sampled: Vec<_> = closure::operands(&format)?.into_iter().step_by(stride).collect();
    let stem = format!("{op}-{format}");
    let cfg = SweepConfig { stride };
    let summary = if matrix || record_count(op, sampled.len()) <= MATRIX_LIMIT {
        let labels = closure::operand_labels(&sampled);
        write_atomic(out, &format!("{stem}-matrix.csv"), |w| {
            let mut mw = MatrixWriter::new(w, &sampled, &labels)?;
            let mut failed = None;
            let s = closure::sweep_each(op, format, cfg, |r| {
                if failed.is_none() {
                    failed = mw.row(r).err();
                }
            })?;
            match failed {
                Some(e) => Err(e.into()),
                None => Ok(s),
            }
        })?
    } else {
        closure::sweep_each(op, format, cfg, |_| {})?
    };
    write_atomic(out, &format!("{stem}.csv"), |w| Ok(closure::write_curve(w, &summary.curve)?))?;
    Ok(summary)
}

fn closure_sweeps(
    out: &Path,
    ops: &[String],
    formats: &[String],
    full: bool,
    stride: Option<usize>,
    matrix: bool,
) -> Res<()> {
    let ops = parse_ops(ops)?;
    let formats: Vec<Format> = if formats.is_empty() {
        DEFAULT_CLOSURE_FORMATS.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?
    } else {
        formats.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?
    };
    if stride == Some(0) {
        return Err(Failure::Usage("--stride must be positive".into()));
    }
    let mut rows = Vec::new();
    for &format in &formats {
        let m = closure::operands(&format)?.len();
        for &op in &ops {
            let stride = stride.unwrap_or_else(|| default_stride(op, &format, m, full));
            let s = sweep_to_files(out, op, format, stride, matrix)?;
            let pct = format!("{:.4}", 100.0 * s.exactness_ratio());
            crate::emit(format_args!(
                "{op} {format}: {pct}% exact ({} of {} records, stride {stride})",
                s.exact_count(),
                s.total()
            ));
            rows.push(vec![
                op.to_string(),
                format.to_string(),
                s.operands.len().to_string(),
                stride.to_string(),
                s.total().to_string(),
                s.exact_count().to_string(),
                pct,
                s.check_disagreements.to_string(),
            ]);
        }
    }
    write_atomic(out, "closure.csv", |w| {
        writeln!(w, "op,format,operands,stride,total,exact,ratio_percent,check_disagreements")?;
        for r in &rows {
            csv_line(w, r)?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_digits() {
        assert_eq!(step_decimals(0.05), 2);
        assert_eq!(step_decimals(1.0), 0);
        assert_eq!(step_decimals(0.125), 3);
    }

    #[test]
    fn stride_policy() {
        let t16 = Format::Takum(16);
        assert_eq!(default_stride(Op::Inv, &t16, 20000, false), 1);
        assert_eq!(default_stride(Op::Mul, &t16, 20000, false), 100);
        assert_eq!(default_stride(Op::Mul, &t16, 20000, true), 1);
        assert_eq!(default_stride(Op::Mul, &Format::Takum(8), 81, false), 1);
    }

    #[test]
    fn default_bound_columns() {
        let c = bound_columns(Some(16), &[]).unwrap();
        let labels: Vec<&str> = c.iter().map(|c| c.0.as_str()).collect();
        assert_eq!(labels, ["takum16", "posit16", "float16"]);
        let c = bound_columns(Some(24), &[]).unwrap();
        assert_eq!(c[2].0, "ieee24");
    }
}
