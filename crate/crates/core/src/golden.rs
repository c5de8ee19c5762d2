//! Reference tables, as canonical words.
//!
//! Subscripts in the `w_...` names list the letters before `τ`, so
//! `w_010 = s0 s1 s0 τ` and `w_∅ = τ`.

use std::collections::BTreeSet;

use crate::ekor::{Anchors, GeneratorSet};
use crate::weyl::{Coweight, Element};

/// μ for this datum, `(1/2, 1/2)`.
pub const MU: Coweight = Coweight { doubled: [1, 1] };

// w_∅, w_1, w_12, w_10
pub const PARAMODULAR_TABLE: &[&str] = &["t", "s1 t", "s1 s2 t", "s1 s0 t"];

// w_∅ | w_0 w_1 w_2 | w_01 w_02 w_10 w_12 w_21 | w_010 w_212
pub const IWAHORI_TABLE: &[&str] = &[
    "t",
    "s0 t",
    "s1 t",
    "s2 t",
    "s0 s1 t",
    "s0 s2 t",
    "s1 s0 t",
    "s1 s2 t",
    "s2 s1 t",
    "s0 s1 s0 t",
    "s2 s1 s2 t",
];

// w_∅, w_0, w_2, w_02
pub const SIEGEL_TABLE: &[&str] = &["t", "s0 t", "s2 t", "s0 s2 t"];

/// Target and fiber rows of the Iwahori to paramodular map.
// w_∅ <- {w_∅, w_0, w_2, w_02}
// w_1 <- {w_1, w_01, w_21}
// w_12 <- {w_12, w_212}
// w_10 <- {w_10, w_010}
pub const PARAMODULAR_FIBERS: &[(&str, &[&str])] = &[
    ("t", &["t", "s0 t", "s2 t", "s0 s2 t"]),
    ("s1 t", &["s1 t", "s0 s1 t", "s2 s1 t"]),
    ("s1 s2 t", &["s1 s2 t", "s2 s1 s2 t"]),
    ("s1 s0 t", &["s1 s0 t", "s0 s1 s0 t"]),
];

/// Target and fiber rows of the Iwahori to Siegel map, as printed.
// w_∅ <- {w_∅, w_1}
// w_0 <- {w_10, w_21}
// w_2 <- {w_12, w_01}
// w_02 <- {w_010, w_212}
pub const SIEGEL_FIBERS: &[(&str, &[&str])] = &[
    ("t", &["t", "s1 t"]),
    ("s0 t", &["s1 s0 t", "s2 s1 t"]),
    ("s2 t", &["s1 s2 t", "s0 s1 t"]),
    ("s0 s2 t", &["s0 s1 s0 t", "s2 s1 s2 t"]),
];

/// Quoted values of `Σ_{K1}`.
// Σ(s0 τ) = {τ}, Σ(s0 s1 τ) = {s1 τ}, Σ(s1 s2 τ) = {s1 s2 τ}
pub const PARAMODULAR_SIGMA: &[(&str, &[&str])] = &[
    ("s0 t", &["t"]),
    ("s0 s1 t", &["s1 t"]),
    ("s1 s2 t", &["s1 s2 t"]),
];

pub fn parse(word: &str) -> Element {
    word.parse().expect("reference words are well formed")
}

pub fn parse_set(words: &[&str]) -> BTreeSet<Element> {
    words.iter().map(|w| parse(w)).collect()
}

pub fn parse_rows(rows: &[(&str, &[&str])]) -> Vec<(Element, BTreeSet<Element>)> {
    rows.iter().map(|(t, f)| (parse(t), parse_set(f))).collect()
}

pub fn paramodular_anchors() -> Anchors {
    Anchors {
        level: GeneratorSet::paramodular(),
        table: parse_set(PARAMODULAR_TABLE),
        fibers: parse_rows(PARAMODULAR_FIBERS),
        sigma_values: parse_rows(PARAMODULAR_SIGMA),
    }
}
