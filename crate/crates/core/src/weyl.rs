//! Extended affine Weyl group of type C2-tilde, `W_a ⋊ Ω` with `Ω ≅ Z`.
//!
//! Elements are stored as exact affine maps of the rank-2 apartment in
//! doubled coordinates, together with the Ω-exponent. The base alcove is
//! `{0 < x2 < x1 < 1/2}` and the simple walls are `x1 = x2` (s1),
//! `x2 = 0` (s2) and `x1 = 1/2` (s0).

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("unknown token `{0}` in word")]
    BadToken(String),
    #[error("coweight ({0}/2, {1}/2) is not in the translation lattice")]
    OffLattice(i32, i32),
    #[error("coweight `{0}` could not be parsed")]
    BadCoweight(String),
}

/// A simple affine reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "s0")]
    S0,
    #[serde(rename = "s1")]
    S1,
    #[serde(rename = "s2")]
    S2,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::S0, Generator::S1, Generator::S2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Generator> {
        Generator::ALL.get(i).copied()
    }

    /// Coxeter matrix entry `m(self, other)`.
    pub fn coxeter_m(self, other: Generator) -> u32 {
        use Generator::*;
        match (self, other) {
            (a, b) if a == b => 1,
            (S0, S2) | (S2, S0) => 2,
            _ => 4,
        }
    }

    pub fn element(self) -> Element {
        match self {
            Generator::S0 => Element {
                linear: [[-1, 0], [0, 1]],
                shift: [2, 0],
                omega: 0,
            },
            Generator::S1 => Element {
                linear: [[0, 1], [1, 0]],
                shift: [0, 0],
                omega: 0,
            },
            Generator::S2 => Element {
                linear: [[1, 0], [0, -1]],
                shift: [0, 0],
                omega: 0,
            },
        }
    }

    /// Wall test on a point in eighth-units: is the point on the far side
    /// of this generator's wall from the base alcove?
    fn beyond_wall(self, p: [i64; 2]) -> bool {
        match self {
            Generator::S0 => p[0] > 4,
            Generator::S1 => p[0] < p[1],
            Generator::S2 => p[1] < 0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.index())
    }
}

impl FromStr for Generator {
    type Err = WeylError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "s0" => Ok(Generator::S0),
            "s1" => Ok(Generator::S1),
            "s2" => Ok(Generator::S2),
            other => Err(WeylError::BadToken(other.to_string())),
        }
    }
}

/// An exact half-integral vector, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coweight {
    pub doubled: [i32; 2],
}

impl Coweight {
    pub const ZERO: Coweight = Coweight { doubled: [0, 0] };

    pub fn from_doubled(a: i32, b: i32) -> Self {
        Coweight { doubled: [a, b] }
    }

    pub fn is_dominant(&self) -> bool {
        self.doubled[0] >= self.doubled[1] && self.doubled[1] >= 0
    }

    pub fn in_lattice(&self) -> bool {
        (self.doubled[0] - self.doubled[1]).rem_euclid(2) == 0
    }

    /// The dominant member of the W(C2)-orbit.
    pub fn dominant(&self) -> Coweight {
        let (a, b) = (self.doubled[0].abs(), self.doubled[1].abs());
        Coweight::from_doubled(a.max(b), a.min(b))
    }

    /// The full W(C2)-orbit, sorted.
    pub fn orbit(&self) -> BTreeSet<Coweight> {
        finite_weyl_group()
            .into_iter()
            .map(|m| {
                let d = apply_linear(m, [self.doubled[0] as i64, self.doubled[1] as i64]);
                Coweight::from_doubled(d[0] as i32, d[1] as i32)
            })
            .collect()
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", half(self.doubled[0]), half(self.doubled[1]))
    }
}

fn half(d: i32) -> String {
    if d % 2 == 0 {
        format!("{}", d / 2)
    } else {
        format!("{}/2", d)
    }
}

fn parse_half(s: &str) -> Option<i32> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, "2")) => n.trim().parse::<i32>().ok(),
        Some(_) => None,
        None => s.parse::<i32>().ok().map(|v| 2 * v),
    }
}

impl FromStr for Coweight {
    type Err = WeylError;
    /// Accepts `1/2,1/2`, `(1/2, -1/2)` or `1,0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WeylError::BadCoweight(s.to_string());
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a = parse_half(a).ok_or_else(bad)?;
        let b = parse_half(b).ok_or_else(bad)?;
        Ok(Coweight::from_doubled(a, b))
    }
}

type Linear = [[i8; 2]; 2];

const IDENTITY: Linear = [[1, 0], [0, 1]];

fn mat_mul(a: Linear, b: Linear) -> Linear {
    let mut out = [[0i8; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: Linear) -> Linear {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn apply_linear(a: Linear, v: [i64; 2]) -> [i64; 2] {
    [
        a[0][0] as i64 * v[0] + a[0][1] as i64 * v[1],
        a[1][0] as i64 * v[0] + a[1][1] as i64 * v[1],
    ]
}

/// The eight signed permutation matrices.
pub(crate) fn finite_weyl_group() -> Vec<Linear> {
    let mut out = Vec::with_capacity(8);
    for swap in [false, true] {
        for s0 in [1i8, -1] {
            for s1 in [1i8, -1] {
                let m = if swap {
                    [[0, s0], [s1, 0]]
                } else {
                    [[s0, 0], [0, s1]]
                };
                out.push(m);
            }
        }
    }
    out
}

/// Positive roots as integer functionals: e1-e2, e1+e2, 2e1, 2e2.
const POSITIVE_ROOTS: [[i64; 2]; 4] = [[1, -1], [1, 1], [2, 0], [0, 2]];

/// Interior point of the base alcove, in eighth-units: (3/8, 1/8).
const BASE_POINT: [i64; 2] = [3, 1];

/// An element of the extended affine Weyl group.
///
/// The apartment action is `x ↦ linear·x + shift/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    linear: Linear,
    shift: [i32; 2],
    omega: i32,
}

impl Element {
    pub const IDENTITY: Element = Element {
        linear: IDENTITY,
        shift: [0, 0],
        omega: 0,
    };

    /// The length-zero generator of Ω: `(x1, x2) ↦ (1/2 − x2, 1/2 − x1)`.
    pub const TAU: Element = Element {
        linear: [[0, -1], [-1, 0]],
        shift: [1, 1],
        omega: 1,
    };

    pub fn tau_pow(n: i32) -> Element {
        let base = if n >= 0 {
            Element::TAU
        } else {
            Element::TAU.inverse()
        };
        (0..n.abs()).fold(Element::IDENTITY, |acc, _| acc * base)
    }

    /// Builds an element from raw parts, checking the parity condition
    /// that places it in `W_a·τ^omega`.
    pub fn from_parts(
        linear: [[i8; 2]; 2],
        shift_doubled: [i32; 2],
        omega: i32,
    ) -> Option<Element> {
        if !finite_weyl_group().contains(&linear) {
            return None;
        }
        let e = Element {
            linear,
            shift: shift_doubled,
            omega,
        };
        e.is_valid().then_some(e)
    }

    fn is_valid(&self) -> bool {
        let par = self.omega.rem_euclid(2);
        self.shift.iter().all(|c| c.rem_euclid(2) == par)
    }

    pub fn linear(&self) -> [[i8; 2]; 2] {
        self.linear
    }

    pub fn translation(&self) -> Coweight {
        Coweight {
            doubled: self.shift,
        }
    }

    pub fn omega(&self) -> i32 {
        self.omega
    }

    pub fn is_pure_translation(&self) -> bool {
        self.linear == IDENTITY
    }

    /// Pure translation by `lambda`. The Ω-exponent is 0 for integral and 1
    /// for half-odd vectors.
    pub fn translation_by(lambda: Coweight) -> Result<Element, WeylError> {
        if !lambda.in_lattice() {
            return Err(WeylError::OffLattice(lambda.doubled[0], lambda.doubled[1]));
        }
        Ok(Element {
            linear: IDENTITY,
            shift: lambda.doubled,
            omega: lambda.doubled[0].rem_euclid(2),
        })
    }

    pub fn inverse(&self) -> Element {
        let lin = transpose(self.linear);
        let t = apply_linear(lin, [self.shift[0] as i64, self.shift[1] as i64]);
        Element {
            linear: lin,
            shift: [-t[0] as i32, -t[1] as i32],
            omega: -self.omega,
        }
    }

    /// Image of a point given in eighth-units.
    pub fn act_eighths(&self, p: [i64; 2]) -> [i64; 2] {
        let l = apply_linear(self.linear, p);
        [
            l[0] + 4 * self.shift[0] as i64,
            l[1] + 4 * self.shift[1] as i64,
        ]
    }

    /// Image of a point given in doubled coordinates.
    pub fn act_doubled(&self, p: Coweight) -> Coweight {
        let l = apply_linear(self.linear, [p.doubled[0] as i64, p.doubled[1] as i64]);
        Coweight::from_doubled(l[0] as i32 + self.shift[0], l[1] as i32 + self.shift[1])
    }

    /// Number of affine root hyperplanes separating the base alcove from
    /// its image.
    pub fn length(&self) -> usize {
        let q = self.act_eighths(BASE_POINT);
        POSITIVE_ROOTS
            .iter()
            .map(|a| {
                let before = (a[0] * BASE_POINT[0] + a[1] * BASE_POINT[1]).div_euclid(8);
                let after = (a[0] * q[0] + a[1] * q[1]).div_euclid(8);
                (after - before).unsigned_abs() as usize
            })
            .sum()
    }

    pub fn is_left_descent(&self, s: Generator) -> bool {
        s.beyond_wall(self.act_eighths(BASE_POINT))
    }

    pub fn is_right_descent(&self, s: Generator) -> bool {
        self.inverse().is_left_descent(s)
    }

    pub fn left_descents(&self) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .filter(|s| self.is_left_descent(*s))
            .collect()
    }

    pub fn right_descents(&self) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .filter(|s| self.is_right_descent(*s))
            .collect()
    }

    /// The `W_a` factor `v` in `self = v·τ^omega`.
    pub fn affine_part(&self) -> Element {
        *self * Element::tau_pow(-self.omega)
    }

    /// Lexicographically least reduced word, built by always stripping the
    /// smallest left descent.
    pub fn reduced_word(&self) -> Word {
        let mut v = self.affine_part();
        let mut letters = Vec::new();
        while let Some(s) = Generator::ALL.into_iter().find(|s| v.is_left_descent(*s)) {
            letters.push(s);
            v = s.element() * v;
        }
        debug_assert_eq!(v, Element::IDENTITY);
        Word {
            letters,
            omega: self.omega,
        }
    }

    /// Length computed by greedy descent stripping, independently of the
    /// hyperplane count.
    pub fn length_by_descent(&self) -> usize {
        let mut v = *self;
        let mut n = 0;
        while let Some(s) = Generator::ALL.into_iter().find(|s| v.is_left_descent(*s)) {
            v = s.element() * v;
            n += 1;
        }
        n
    }

    /// Conjugation by τ. Swaps s0 and s2 and keeps omega.
    pub fn sigma(&self) -> Element {
        Element::TAU * *self * Element::TAU.inverse()
    }

    pub fn sigma_inverse(&self) -> Element {
        Element::TAU.inverse() * *self * Element::TAU
    }

    /// If this element is a simple reflection, which one.
    pub fn as_generator(&self) -> Option<Generator> {
        Generator::ALL.into_iter().find(|s| s.element() == *self)
    }

    /// Bruhat order via the subword property on the normal-form word.
    pub fn bruhat_leq(&self, other: &Element) -> bool {
        if self.omega != other.omega {
            return false;
        }
        if self.length() > other.length() {
            return false;
        }
        let target = self.affine_part();
        subword_products(&other.reduced_word().letters).contains(&target)
    }

    /// Elements covered by repeatedly deleting single letters from reduced
    /// words, starting at `self`. Independent of [`Element::bruhat_leq`].
    pub fn down_set_by_deletion(&self) -> BTreeSet<Element> {
        let mut seen: HashSet<Element> = HashSet::new();
        let mut stack = vec![*self];
        while let Some(w) = stack.pop() {
            if !seen.insert(w) {
                continue;
            }
            let word = w.reduced_word();
            for i in 0..word.letters.len() {
                let mut letters = word.letters.clone();
                letters.remove(i);
                let v = Word {
                    letters,
                    omega: word.omega,
                }
                .evaluate();
                if !seen.contains(&v) {
                    stack.push(v);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn word_string(&self) -> String {
        self.reduced_word().to_string()
    }
}

impl std::ops::Mul for Element {
    type Output = Element;
    fn mul(self, b: Element) -> Element {
        let t = apply_linear(self.linear, [b.shift[0] as i64, b.shift[1] as i64]);
        Element {
            linear: mat_mul(self.linear, b.linear),
            shift: [t[0] as i32 + self.shift[0], t[1] as i32 + self.shift[1]],
            omega: self.omega + b.omega,
        }
    }
}

impl From<Generator> for Element {
    fn from(s: Generator) -> Element {
        s.element()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reduced_word())
    }
}

impl FromStr for Element {
    type Err = WeylError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(s.parse::<Word>()?.evaluate())
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.word_string())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All products of subwords of `letters`, as elements of `W_a`.
fn subword_products(letters: &[Generator]) -> HashSet<Element> {
    let mut set = HashSet::from([Element::IDENTITY]);
    for s in letters {
        let g = s.element();
        let next: Vec<Element> = set.iter().map(|x| *x * g).collect();
        set.extend(next);
    }
    set
}

/// A word in the simple reflections followed by `τ^omega`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub letters: Vec<Generator>,
    pub omega: i32,
}

impl Word {
    pub fn evaluate(&self) -> Element {
        self.letters
            .iter()
            .fold(Element::IDENTITY, |acc, s| acc * s.element())
            * Element::tau_pow(self.omega)
    }

    pub fn is_reduced(&self) -> bool {
        self.evaluate().length() == self.letters.len()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.letters.iter().map(|s| s.to_string()).collect();
        match self.omega {
            0 => {}
            1 => parts.push("t".into()),
            n => parts.push(format!("t^{n}")),
        }
        if parts.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl FromStr for Word {
    type Err = WeylError;
    /// Letters may appear anywhere, including after `t`; the result is
    /// normalised by moving Ω to the right.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut acc = Element::IDENTITY;
        for tok in s.split_whitespace() {
            let g = match tok {
                "e" => Element::IDENTITY,
                "t" => Element::TAU,
                _ if tok.starts_with("t^") => {
                    let n: i32 = tok[2..]
                        .parse()
                        .map_err(|_| WeylError::BadToken(tok.to_string()))?;
                    Element::tau_pow(n)
                }
                _ => tok.parse::<Generator>()?.element(),
            };
            acc = acc * g;
        }
        let plain: Vec<Generator> = s
            .split_whitespace()
            .filter_map(|t| t.parse::<Generator>().ok())
            .collect();
        let omega = acc.omega;
        let direct = Word {
            letters: plain,
            omega,
        };
        if direct.evaluate() == acc {
            Ok(direct)
        } else {
            Ok(acc.reduced_word())
        }
    }
}

/// All elements of `W_a·τ^omega` with length at most `max_len`, built layer
/// by layer.
pub fn elements_up_to(max_len: usize, omega: i32) -> Vec<Element> {
    let mut all = vec![Element::tau_pow(omega)];
    let mut layer = vec![Element::tau_pow(omega)];
    for k in 0..max_len {
        let mut next: BTreeSet<Element> = BTreeSet::new();
        for w in &layer {
            for s in Generator::ALL {
                let v = s.element() * *w;
                if v.length() == k + 1 {
                    next.insert(v);
                }
            }
        }
        layer = next.into_iter().collect();
        all.extend(layer.iter().copied());
    }
    all
}

/// Sort key for stable, human-friendly listings: by length, then word.
pub fn display_key(w: &Element) -> (usize, String) {
    (w.length(), w.word_string())
}

pub fn sorted_for_display<I: IntoIterator<Item = Element>>(it: I) -> Vec<Element> {
    let mut v: Vec<Element> = it.into_iter().collect();
    v.sort_by_key(display_key);
    v.dedup();
    v
}
