//! Inputs shared by the benchmarks.

use binres::io::parse_ideal;
use binres::Chart;

pub const SEED: u64 = 20261016;

/// Small named ideals.
pub fn fixtures() -> Vec<(&'static str, Chart)> {
    [
        ("cusp", "char: 0\nvars: x1 x2\ngen: x1^2 - x2^3\n"),
        ("cone", "char: 0\nvars: x1 x2 x3\ngen: x1*x2 - x3^2\n"),
        ("whitney", "char: 0\nvars: x1 x2 x3\ngen: x1^2 - x2^2*x3\n"),
        ("frobenius", "char: 2\nvars: x1 x2 x3\ngen: x1^2 - x2^2*x3\ngen: x2*x3 - x1^3\n"),
    ]
    .into_iter()
    .map(|(name, src)| (name, parse_ideal(src).expect("fixture parses")))
    .collect()
}
