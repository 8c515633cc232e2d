//! Published cells of the two constant tables, in the crate's rendering
//! (`d.ddde-N`, `0`, `∞`).

#![allow(dead_code)]

/// Columns h, k, e, c, dnu, NA.
pub const SI_TABLE: [(&str, [&str; 6]); 13] = [
    ("float8", ["0", "0", "0", "∞", "∞", "∞"]),
    ("posit8", ["5.96046448e-8", "5.960464e-8", "5.960464478e-8", "1.67772160e7", "1.677721600e7", "1.67772160e7"]),
    ("takum8", ["2.97569687e-35", "4.303623e-23", "1.282891824e-19", "2.94267566e8", "1.606646472e10", "1.26865561e24"]),
    ("float16", ["0", "0", "0", "∞", "∞", "∞"]),
    ("bfloat16", ["6.62038418e-34", "1.385528e-23", "1.600892270e-19", "2.99892736e8", "9.193914368e9", "6.02101727e23"]),
    ("posit16", ["1.38777878e-17", "1.387779e-17", "1.387778781e-17", "3.01989888e8", "9.663676416e9", "7.20575940e16"]),
    ("takum16", ["6.56428218e-34", "1.375520e-23", "1.596584671e-19", "2.98901606e8", "9.226194467e9", "5.99270479e23"]),
    ("TF32", ["6.62790735e-34", "1.380358e-23", "1.601951062e-19", "2.99892736e8", "9.193914368e9", "6.02101727e23"]),
    ("posit19", ["3.38813179e-21", "3.388132e-21", "2.168404345e-19", "2.99892736e8", "9.126805504e9", "2.95147905e20"]),
    ("takum19", ["6.61576649e-34", "1.380904e-23", "1.602833526e-19", "2.99778578e8", "9.190224944e9", "6.02792137e23"]),
    ("float32", ["6.62607018e-34", "1.380649e-23", "1.602176598e-19", "2.99792448e8", "9.192631296e9", "6.02214064e23"]),
    ("posit32", ["7.70371978e-34", "1.380358e-23", "1.602215759e-19", "2.99792384e8", "9.192636416e9", "6.02101727e23"]),
    ("takum32", ["6.62607126e-34", "1.380649e-23", "1.602176753e-19", "2.99792444e8", "9.192632204e9", "6.02214098e23"]),
];

/// Columns Lambda, M.
pub const LARGE_TABLE: [(&str, [&str; 2]); 13] = [
    ("float8", ["0", "∞"]),
    ("posit8", ["5.9605e-8", "1.7e7"]),
    ("takum8", ["1.2642e-52", "7.9e51"]),
    ("float16", ["0", "∞"]),
    ("bfloat16", ["0", "∞"]),
    ("posit16", ["1.3878e-17", "7.2e16"]),
    ("takum16", ["1.1156e-52", "1.5e53"]),
    ("TF32", ["0", "∞"]),
    ("posit19", ["3.3881e-21", "3.0e20"]),
    ("takum19", ["1.1070e-52", "1.5e53"]),
    ("float32", ["0", "∞"]),
    ("posit32", ["7.5232e-37", "1.3e36"]),
    ("takum32", ["1.1056e-52", "1.5e53"]),
];

/// Every (constant symbol, format, expected cell).
pub fn published_cells() -> Vec<(&'static str, &'static str, &'static str)> {
    let si = ["h", "k", "e", "c", "dnu", "NA"];
    let large = ["Lambda", "M"];
    let mut out = Vec::new();
    for (f, cells) in SI_TABLE {
        for (s, c) in si.iter().zip(cells) {
            out.push((*s, f, c));
        }
    }
    for (f, cells) in LARGE_TABLE {
        for (s, c) in large.iter().zip(cells) {
            out.push((*s, f, c));
        }
    }
    out
}
