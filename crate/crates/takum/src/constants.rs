//! Named physical constants rounded into each format and printed back at
//! the number of significant digits of their defining literal.

use crate::decimal::{self, Decimal};
use crate::real::BigReal;
use crate::refformats::{Format, FormatValue};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NamedConstant {
    pub name: &'static str,
    pub symbol: &'static str,
    pub value: &'static str,
}

impl NamedConstant {
    pub fn decimal(&self) -> Decimal {
        decimal::parse(self.value).expect("built-in literal")
    }

    pub fn digits(&self) -> usize {
        self.decimal().digits
    }
}

/// The SI-defining constants.
pub const SI_CONSTANTS: [NamedConstant; 6] = [
    NamedConstant { name: "Planck constant", symbol: "h", value: "6.62607015e-34" },
    NamedConstant { name: "Boltzmann constant", symbol: "k", value: "1.380649e-23" },
    NamedConstant { name: "elementary charge", symbol: "e", value: "1.602176634e-19" },
    NamedConstant { name: "speed of light", symbol: "c", value: "2.99792458e8" },
    NamedConstant { name: "caesium standard", symbol: "dnu", value: "9.192631770e9" },
    NamedConstant { name: "Avogadro constant", symbol: "NA", value: "6.02214076e23" },
];

/// Two constants far outside the range of 16- and 32-bit floats.
pub const LARGE_CONSTANTS: [NamedConstant; 2] = [
    NamedConstant { name: "cosmological constant", symbol: "Lambda", value: "1.1056e-52" },
    NamedConstant { name: "mass of the universe", symbol: "M", value: "1.5e53" },
];

/// Row order of both tables.
pub const TABLE_FORMATS: [&str; 13] = [
    "float8", "posit8", "takum8", "float16", "bfloat16", "posit16", "takum16", "TF32", "posit19",
    "takum19", "float32", "posit32", "takum32",
];

pub fn all_constants() -> impl Iterator<Item = &'static NamedConstant> {
    SI_CONSTANTS.iter().chain(LARGE_CONSTANTS.iter())
}

/// Finds a constant by symbol or (case-insensitive) name.
pub fn lookup(key: &str) -> Result<&'static NamedConstant> {
    all_constants()
        .find(|c| c.symbol == key || c.name.eq_ignore_ascii_case(key))
        .ok_or_else(|| Error::UnknownConstant(key.to_string()))
}

/// Renders a decoded value at `digits` significant digits; zero prints as
/// `0` and infinities as `∞`.
pub fn render(v: &FormatValue, digits: usize) -> String {
    match v {
        FormatValue::NaR => "NaR".into(),
        FormatValue::NaN => "NaN".into(),
        FormatValue::Infinite { negative: false } => "∞".into(),
        FormatValue::Infinite { negative: true } => "-∞".into(),
        FormatValue::Real(x) => decimal::to_sig_string_twice(x, digits),
    }
}

/// Rounds `constant` into `format` and prints the result at the
/// constant's own digit count.
pub fn represent(constant: &NamedConstant, format: &Format) -> Result<String> {
    let d = constant.decimal();
    let payload = format.round(&BigReal::from_rational(d.value))?;
    Ok(render(&format.decode(payload)?, d.digits))
}

pub fn represent_by_name(constant: &str, format: &str) -> Result<String> {
    let c = lookup(constant)?;
    let f: Format = format.parse()?;
    represent(c, &f)
}

/// One table: header row of symbols, then one row per format.
pub fn table(constants: &[NamedConstant]) -> Result<Vec<Vec<String>>> {
    let mut rows = vec![std::iter::once("format".to_string())
        .chain(constants.iter().map(|c| c.symbol.to_string()))
        .collect::<Vec<_>>()];
    rows.push(
        std::iter::once("value".to_string())
            .chain(constants.iter().map(|c| {
                let d = c.decimal();
                decimal::to_sig_string(&BigReal::from_rational(d.value), d.digits)
            }))
            .collect(),
    );
    for name in TABLE_FORMATS {
        let f: Format = name.parse()?;
        let mut row = vec![name.to_string()];
        for c in constants {
            row.push(represent(c, &f)?);
        }
        rows.push(row);
    }
    Ok(rows)
}
