//! Small named elements used in tests, benches and the CLI.

use crate::Element;

fn v2(pairs: &[(&str, &str)]) -> Element {
    Element::from_pairs(2, pairs).expect("sample tables are valid")
}

/// The generator x₀ of F.
pub fn x0() -> Element {
    v2(&[("0", "00"), ("10", "01"), ("11", "1")])
}

/// Swaps the two halves.
pub fn transposition() -> Element {
    v2(&[("0", "1"), ("1", "0")])
}

/// A copy of x₀ in each half.
pub fn mu() -> Element {
    v2(&[("00", "000"), ("010", "001"), ("011", "01"), ("10", "100"), ("110", "101"), ("111", "11")])
}

/// Three-cycle of cones `0 → 10 → 11 → 0`.
pub fn three_cycle() -> Element {
    v2(&[("0", "10"), ("10", "11"), ("11", "0")])
}

/// x₀ on cone 0 and an element with repeller spine `01` on cone 1.
pub fn two_spines() -> Element {
    v2(&[
        ("00", "000"),
        ("010", "001"),
        ("011", "01"),
        ("1000", "110"),
        ("1001", "10"),
        ("101", "1110"),
        ("11", "1111"),
    ])
}

/// One flow component with four repelling fixed points and four attracting ones.
///
/// Each quarter `q` carries the same pattern, with three source cones sent to
/// the quarters `q`, `q ⊕ 01` and `q ⊕ 10`; the quarter translations are
/// exactly the torsion part of the centralizer.
pub fn klein() -> Element {
    // (domain, range, quarter shift) relative to the quarter
    const PATTERN: [(&str, &str, u8); 5] =
        [("0", "00", 0), ("11", "1", 0), ("100", "010", 0), ("1010", "0110", 1), ("1011", "0111", 2)];
    let mut rules = Vec::new();
    for q in 0u8..4 {
        let quarter = |x: u8| format!("{}{}", x >> 1, x & 1);
        for (d, r, h) in PATTERN {
            rules.push((format!("{}{d}", quarter(q)), format!("{}{r}", quarter(q ^ h))));
        }
    }
    let pairs: Vec<(&str, &str)> = rules.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    v2(&pairs)
}
