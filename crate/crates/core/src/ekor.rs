//! Admissible sets, EKOR index sets, σ-supports, Newton points and the
//! `Σ_K` reduction between parahoric levels.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weyl::{sorted_for_display, Coweight, Element, Generator};

pub const NEWTON_BOUND: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EkorError {
    #[error("coweight {0} is not dominant")]
    NotDominant(Coweight),
    #[error("coweight {0} is not in the translation lattice")]
    OffLattice(Coweight),
    #[error("no pure translation among the first {bound} twisted powers of {element}")]
    NewtonBound { element: String, bound: usize },
    #[error("Σ is not single-valued on {}", .0.iter().map(|(w, s)| format!("{w} ↦ {s:?}")).collect::<Vec<_>>().join("; "))]
    MultiValued(Vec<(String, Vec<String>)>),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error("unknown level `{0}`")]
    UnknownLevel(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaError {
    #[error("reduction of {element} is not confluent: {detail}")]
    NonConfluent { element: String, detail: String },
}

/// A subset of `{s0, s1, s2}`, naming a standard parahoric level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GeneratorSet(u8);

impl GeneratorSet {
    pub const EMPTY: GeneratorSet = GeneratorSet(0);

    pub fn iwahori() -> Self {
        GeneratorSet::EMPTY
    }

    pub fn paramodular() -> Self {
        GeneratorSet::from_iter([Generator::S0, Generator::S2])
    }

    pub fn siegel() -> Self {
        GeneratorSet::from_iter([Generator::S1])
    }

    pub fn all() -> Self {
        GeneratorSet(0b111)
    }

    pub fn contains(&self, s: Generator) -> bool {
        self.0 & (1 << s.index()) != 0
    }

    pub fn insert(&mut self, s: Generator) {
        self.0 |= 1 << s.index();
    }

    pub fn remove(&mut self, s: Generator) {
        self.0 &= !(1 << s.index());
    }

    pub fn iter(&self) -> impl Iterator<Item = Generator> + '_ {
        Generator::ALL
            .into_iter()
            .filter(move |s| self.contains(*s))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &GeneratorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn labels(&self) -> Vec<String> {
        self.iter().map(|s| s.to_string()).collect()
    }

    /// Named level for `iwahori`, `paramodular`, `siegel`, or an explicit
    /// comma list such as `s0,s2`.
    pub fn parse_level(s: &str) -> Result<Self, EkorError> {
        match s.trim() {
            "iwahori" => Ok(Self::iwahori()),
            "paramodular" => Ok(Self::paramodular()),
            "siegel" => Ok(Self::siegel()),
            other => other.parse(),
        }
    }
}

impl FromIterator<Generator> for GeneratorSet {
    fn from_iter<I: IntoIterator<Item = Generator>>(it: I) -> Self {
        let mut k = GeneratorSet::EMPTY;
        for s in it {
            k.insert(s);
        }
        k
    }
}

impl FromStr for GeneratorSet {
    type Err = EkorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut k = GeneratorSet::EMPTY;
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let g: Generator = tok
                .parse()
                .map_err(|_| EkorError::UnknownLevel(s.to_string()))?;
            k.insert(g);
        }
        Ok(k)
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

impl Serialize for GeneratorSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GeneratorSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let v = Vec::<Generator>::deserialize(de)?;
        Ok(v.into_iter().collect())
    }
}

/// Which cosets minimal representatives are taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosetSide {
    /// `W_K\W̃`: no left descent in K.
    Left,
    /// `W̃/W_K`: no right descent in K.
    Right,
}

/// Shape of the σ-conjugation move attached to `s ∈ K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjugationSide {
    /// `w ↦ s·w·σ(s)`
    SWSigma,
    /// `w ↦ σ(s)·w·s`
    SigmaWS,
}

/// How the shrinking iteration for `I(K, x, σ)` tests a reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilizerSide {
    /// `x·σ(s)·x⁻¹`
    Twisted,
    /// `σ⁻¹(x⁻¹·s·x)`
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Convention {
    pub coset: CosetSide,
    pub conjugation: ConjugationSide,
    pub stabilizer: StabilizerSide,
}

impl Convention {
    pub const DEFAULT: Convention = Convention {
        coset: CosetSide::Left,
        conjugation: ConjugationSide::SWSigma,
        stabilizer: StabilizerSide::Twisted,
    };

    /// All eight conventions in tie-break order.
    pub fn all() -> Vec<Convention> {
        let mut out = Vec::with_capacity(8);
        for coset in [CosetSide::Left, CosetSide::Right] {
            for conjugation in [ConjugationSide::SWSigma, ConjugationSide::SigmaWS] {
                for stabilizer in [StabilizerSide::Twisted, StabilizerSide::Inverse] {
                    out.push(Convention {
                        coset,
                        conjugation,
                        stabilizer,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.coset {
            CosetSide::Left => "left",
            CosetSide::Right => "right",
        };
        let j = match self.conjugation {
            ConjugationSide::SWSigma => "s-w-sigma",
            ConjugationSide::SigmaWS => "sigma-w-s",
        };
        let i = match self.stabilizer {
            StabilizerSide::Twisted => "twisted",
            StabilizerSide::Inverse => "inverse",
        };
        write!(f, "{c}:{j}:{i}")
    }
}

impl FromStr for Convention {
    type Err = String;
    /// Parses the `coset:conjugation:stabilizer` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Convention::all()
            .into_iter()
            .find(|c| c.to_string() == s.trim())
            .ok_or_else(|| format!("unknown convention `{s}`"))
    }
}

pub fn is_minimal(w: &Element, k: GeneratorSet, side: CosetSide) -> bool {
    k.iter().all(|s| match side {
        CosetSide::Left => !w.is_left_descent(s),
        CosetSide::Right => !w.is_right_descent(s),
    })
}

pub fn minimal_coset_reps<'a, I>(k: GeneratorSet, set: I, side: CosetSide) -> BTreeSet<Element>
where
    I: IntoIterator<Item = &'a Element>,
{
    set.into_iter()
        .filter(|w| is_minimal(w, k, side))
        .copied()
        .collect()
}

/// Splits `w` as `u·x` (left) or `x·u` (right) with `u ∈ W_K` and `x`
/// minimal.
pub fn coset_decomposition(w: &Element, k: GeneratorSet, side: CosetSide) -> (Element, Element) {
    let mut x = *w;
    loop {
        let step = k.iter().find(|s| match side {
            CosetSide::Left => x.is_left_descent(*s),
            CosetSide::Right => x.is_right_descent(*s),
        });
        match (step, side) {
            (Some(s), CosetSide::Left) => x = s.element() * x,
            (Some(s), CosetSide::Right) => x = x * s.element(),
            (None, _) => break,
        }
    }
    let u = match side {
        CosetSide::Left => *w * x.inverse(),
        CosetSide::Right => x.inverse() * *w,
    };
    (u, x)
}

/// Letters of the normal-form word of the `W_a` factor.
pub fn support(w: &Element) -> GeneratorSet {
    w.affine_part().reduced_word().letters.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSupport {
    pub reflections: GeneratorSet,
    pub is_finite: bool,
}

/// The diagram automorphism `Ad(τ^n)∘σ` on simple reflections, for the
/// Ω-part `τ^n` of an element.
fn twisted_diagram_image(s: Generator, omega: i32) -> Generator {
    let t = Element::tau_pow(omega);
    (t * s.element().sigma() * t.inverse())
        .as_generator()
        .expect("diagram automorphism maps simple reflections to simple reflections")
}

pub fn sigma_support(w: &Element) -> SigmaSupport {
    let mut supp = support(w);
    loop {
        let image: GeneratorSet = supp
            .iter()
            .map(|s| twisted_diagram_image(s, w.omega()))
            .collect();
        let merged = GeneratorSet(supp.0 | image.0);
        if merged == supp {
            break;
        }
        supp = merged;
    }
    SigmaSupport {
        reflections: supp,
        is_finite: supp != GeneratorSet::all(),
    }
}

pub fn is_basic(w: &Element) -> bool {
    sigma_support(w).is_finite
}

/// A rational vector `doubled / (2·den)`, kept in lowest terms and made
/// dominant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NewtonPoint {
    pub numerators: [i64; 2],
    pub denominator: i64,
}

impl NewtonPoint {
    fn new(doubled: [i64; 2], n: i64) -> Self {
        let (a, b) = (doubled[0].abs(), doubled[1].abs());
        let (a, b) = (a.max(b), a.min(b));
        let mut den = 2 * n;
        let g = gcd(gcd(a, b), den);
        let (a, b) = (a / g, b / g);
        den /= g;
        NewtonPoint {
            numerators: [a, b],
            denominator: den,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerators == [0, 0]
    }

    pub fn as_coweight(&self) -> Option<Coweight> {
        match self.denominator {
            1 => Some(Coweight::from_doubled(
                2 * self.numerators[0] as i32,
                2 * self.numerators[1] as i32,
            )),
            2 => Some(Coweight::from_doubled(
                self.numerators[0] as i32,
                self.numerators[1] as i32,
            )),
            _ => None,
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for NewtonPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |n: i64| match (n, self.denominator) {
            (0, _) => "0".to_string(),
            (n, 1) => n.to_string(),
            (n, d) => format!("{n}/{d}"),
        };
        write!(
            f,
            "({}, {})",
            show(self.numerators[0]),
            show(self.numerators[1])
        )
    }
}

/// Order of σ on `W̃`, found by testing on the generators and τ.
fn sigma_order() -> usize {
    let gens: Vec<Element> = Generator::ALL
        .into_iter()
        .map(Element::from)
        .chain([Element::TAU])
        .collect();
    (1..=NEWTON_BOUND)
        .find(|&k| {
            gens.iter()
                .all(|g| (0..k).fold(*g, |acc, _| acc.sigma()) == *g)
        })
        .unwrap_or(1)
}

/// Newton point of the σ-conjugacy class of `w`, from the least twisted
/// power `(wσ)^n` that is a pure translation with `σ^n = 1`.
pub fn newton_point(w: &Element) -> Result<NewtonPoint, EkorError> {
    let order = sigma_order();
    let mut u = Element::IDENTITY;
    let mut twist = *w;
    for n in 1..=NEWTON_BOUND {
        u = u * twist;
        twist = twist.sigma();
        if n % order == 0 && u.is_pure_translation() {
            let d = u.translation().doubled;
            return Ok(NewtonPoint::new([d[0] as i64, d[1] as i64], n as i64));
        }
    }
    Err(EkorError::NewtonBound {
        element: w.word_string(),
        bound: NEWTON_BOUND,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub mu: Coweight,
    pub elements: BTreeSet<Element>,
}

impl AdmissibleSet {
    pub fn maximal_elements(mu: Coweight) -> Result<BTreeSet<Element>, EkorError> {
        mu.orbit()
            .into_iter()
            .map(|l| Element::translation_by(l).map_err(|_| EkorError::OffLattice(mu)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, w: &Element) -> bool {
        self.elements.contains(w)
    }

    pub fn sorted(&self) -> Vec<Element> {
        sorted_for_display(self.elements.iter().copied())
    }

    pub fn basic(&self) -> BTreeSet<Element> {
        self.elements
            .iter()
            .filter(|w| is_basic(w))
            .copied()
            .collect()
    }
}

/// Union of the deletion down-sets of the translations `t_{xμ}`.
pub fn admissible_set(mu: Coweight) -> Result<AdmissibleSet, EkorError> {
    if !mu.is_dominant() {
        return Err(EkorError::NotDominant(mu));
    }
    let mut elements = BTreeSet::new();
    for t in AdmissibleSet::maximal_elements(mu)? {
        elements.extend(t.down_set_by_deletion());
    }
    Ok(AdmissibleSet { mu, elements })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkorIndexSet {
    pub level: GeneratorSet,
    pub basic_only: bool,
    pub coset: CosetSide,
    pub elements: BTreeSet<Element>,
}

impl EkorIndexSet {
    pub fn sorted(&self) -> Vec<Element> {
        sorted_for_display(self.elements.iter().copied())
    }
}

pub fn ekor_set(
    adm: &AdmissibleSet,
    k: GeneratorSet,
    basic_only: bool,
    side: CosetSide,
) -> EkorIndexSet {
    let elements = minimal_coset_reps(k, &adm.elements, side)
        .into_iter()
        .filter(|w| !basic_only || is_basic(w))
        .collect();
    EkorIndexSet {
        level: k,
        basic_only,
        coset: side,
        elements,
    }
}

/// Greatest `I ⊆ K` stable under the test prescribed by `side`.
pub fn stabilizer_subset(k: GeneratorSet, x: &Element, side: StabilizerSide) -> GeneratorSet {
    let image = |s: Generator| -> Option<Generator> {
        let e = s.element();
        let y = match side {
            StabilizerSide::Twisted => *x * e.sigma() * x.inverse(),
            StabilizerSide::Inverse => (x.inverse() * e * *x).sigma_inverse(),
        };
        y.as_generator()
    };
    let mut i = k;
    loop {
        let next: GeneratorSet = i
            .iter()
            .filter(|s| image(*s).is_some_and(|g| i.contains(g)))
            .collect();
        if next == i {
            return i;
        }
        i = next;
    }
}

pub type SigmaResult = Result<BTreeSet<Element>, SigmaError>;

/// Memoised `Σ_K` reduction for one level and convention.
pub struct SigmaReducer {
    level: GeneratorSet,
    convention: Convention,
    memo: HashMap<Element, SigmaResult>,
}

impl SigmaReducer {
    pub fn new(level: GeneratorSet, convention: Convention) -> Self {
        SigmaReducer {
            level,
            convention,
            memo: HashMap::new(),
        }
    }

    pub fn level(&self) -> GeneratorSet {
        self.level
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `(a, b)` with the move `w ↦ a·w·b`.
    fn factors(&self, s: Generator) -> (Element, Element) {
        let e = s.element();
        match self.convention.conjugation {
            ConjugationSide::SWSigma => (e, e.sigma()),
            ConjugationSide::SigmaWS => (e.sigma(), e),
        }
    }

    /// Applicable moves at `w`: `(conjugate, partner)` where the partner is
    /// the one-sided product used when the length drops.
    fn moves(&self, w: &Element) -> Vec<(Element, Element)> {
        self.level
            .iter()
            .filter_map(|s| {
                let (a, b) = self.factors(s);
                let partner = match self.convention.coset {
                    CosetSide::Left => a * *w,
                    CosetSide::Right => *w * b,
                };
                (partner.length() < w.length()).then_some((a * *w * b, partner))
            })
            .collect()
    }

    fn rule_one(&self, w: &Element) -> Option<Element> {
        let (u, x) = coset_decomposition(w, self.level, self.convention.coset);
        let i = stabilizer_subset(self.level, &x, self.convention.stabilizer);
        support(&u).is_subset(&i).then_some(x)
    }

    /// Elements reachable from `w` by length-preserving moves.
    pub fn length_preserving_class(&self, w: &Element) -> BTreeSet<Element> {
        let mut seen = BTreeSet::from([*w]);
        let mut queue = VecDeque::from([*w]);
        while let Some(y) = queue.pop_front() {
            for (c, _) in self.moves(&y) {
                if c.length() == y.length() && seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        seen
    }

    fn verdict(&mut self, y: &Element) -> Option<SigmaResult> {
        if is_minimal(y, self.level, self.convention.coset) {
            return Some(Ok(BTreeSet::from([*y])));
        }
        if let Some(x) = self.rule_one(y) {
            return Some(Ok(BTreeSet::from([x])));
        }
        let drops: Vec<(Element, Element)> = self
            .moves(y)
            .into_iter()
            .filter(|(c, _)| c.length() + 2 == y.length())
            .collect();
        let mut found: Option<BTreeSet<Element>> = None;
        for (c, partner) in drops {
            let mut out = match self.reduce(&c) {
                Ok(s) => s,
                Err(e) => return Some(Err(e)),
            };
            match self.reduce(&partner) {
                Ok(s) => out.extend(s),
                Err(e) => return Some(Err(e)),
            }
            match &found {
                Some(prev) if *prev != out => {
                    return Some(Err(SigmaError::NonConfluent {
                        element: y.word_string(),
                        detail: format!(
                            "length-decreasing steps give {} and {}",
                            fmt_set(prev),
                            fmt_set(&out)
                        ),
                    }))
                }
                _ => found = Some(out),
            }
        }
        found.map(Ok)
    }

    pub fn reduce(&mut self, w: &Element) -> SigmaResult {
        if let Some(r) = self.memo.get(w) {
            return r.clone();
        }
        if is_minimal(w, self.level, self.convention.coset) {
            let r: SigmaResult = Ok(BTreeSet::from([*w]));
            self.memo.insert(*w, r.clone());
            return r;
        }
        let class = self.length_preserving_class(w);
        let mut outcomes: Vec<(Element, SigmaResult)> = Vec::new();
        for y in &class {
            if let Some(v) = self.verdict(y) {
                outcomes.push((*y, v));
            }
        }
        let result = match outcomes.first() {
            None => Err(SigmaError::NonConfluent {
                element: w.word_string(),
                detail: "no reduction rule applies anywhere in its class".into(),
            }),
            Some((_, first)) => {
                if let Some((y, other)) = outcomes.iter().find(|(_, r)| r != first) {
                    Err(SigmaError::NonConfluent {
                        element: w.word_string(),
                        detail: format!(
                            "{} gives {} but {} gives {}",
                            outcomes[0].0,
                            fmt_result(first),
                            y,
                            fmt_result(other)
                        ),
                    })
                } else {
                    first.clone()
                }
            }
        };
        for y in class {
            self.memo.entry(y).or_insert_with(|| result.clone());
        }
        self.memo.insert(*w, result.clone());
        result
    }
}

fn fmt_set(s: &BTreeSet<Element>) -> String {
    let words: Vec<String> = sorted_for_display(s.iter().copied())
        .iter()
        .map(|w| w.word_string())
        .collect();
    format!("{{{}}}", words.join(", "))
}

fn fmt_result(r: &SigmaResult) -> String {
    match r {
        Ok(s) => fmt_set(s),
        Err(e) => e.to_string(),
    }
}

pub fn sigma_k(w: &Element, k: GeneratorSet, convention: Convention) -> SigmaResult {
    SigmaReducer::new(k, convention).reduce(w)
}

/// `Σ_K` evaluated on every basic Iwahori element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRelation {
    pub level: GeneratorSet,
    pub convention: Convention,
    pub sigma: BTreeMap<Element, SigmaResult>,
}

impl FiberRelation {
    pub fn compute(adm: &AdmissibleSet, k: GeneratorSet, convention: Convention) -> Self {
        let source = ekor_set(adm, GeneratorSet::iwahori(), true, convention.coset);
        let mut reducer = SigmaReducer::new(k, convention);
        let sigma = source
            .elements
            .iter()
            .map(|w| (*w, reducer.reduce(w)))
            .collect();
        FiberRelation {
            level: k,
            convention,
            sigma,
        }
    }

    /// Preimages of each target, counting multi-valued images once per
    /// target.
    pub fn fibers(&self) -> BTreeMap<Element, BTreeSet<Element>> {
        let mut out: BTreeMap<Element, BTreeSet<Element>> = BTreeMap::new();
        for (w, r) in &self.sigma {
            if let Ok(targets) = r {
                for t in targets {
                    out.entry(*t).or_default().insert(*w);
                }
            }
        }
        out
    }

    /// Entries that are not single-valued.
    pub fn defects(&self) -> Vec<(Element, SigmaResult)> {
        self.sigma
            .iter()
            .filter(|(_, r)| !matches!(r, Ok(s) if s.len() == 1))
            .map(|(w, r)| (*w, r.clone()))
            .collect()
    }

    /// The level map, if `Σ_K` is single-valued everywhere.
    pub fn as_map(&self) -> Result<BTreeMap<Element, Element>, EkorError> {
        let defects = self.defects();
        if let Some((_, Err(e))) = defects.iter().find(|(_, r)| r.is_err()) {
            return Err(EkorError::Sigma(e.clone()));
        }
        if !defects.is_empty() {
            return Err(EkorError::MultiValued(
                defects
                    .iter()
                    .map(|(w, r)| {
                        let words = r
                            .as_ref()
                            .map(|s| s.iter().map(|x| x.word_string()).collect())
                            .unwrap_or_default();
                        (w.word_string(), words)
                    })
                    .collect(),
            ));
        }
        Ok(self
            .sigma
            .iter()
            .map(|(w, r)| (*w, *r.as_ref().unwrap().iter().next().unwrap()))
            .collect())
    }
}

pub fn closure_down_set(adm: &AdmissibleSet, w: &Element, basic_only: bool) -> BTreeSet<Element> {
    adm.elements
        .iter()
        .filter(|v| (!basic_only || is_basic(v)) && v.bruhat_leq(w))
        .copied()
        .collect()
}

pub fn dimension(w: &Element) -> usize {
    w.length()
}

/// Reference data a convention is scored against.
#[derive(Clone, Debug)]
pub struct Anchors {
    pub level: GeneratorSet,
    pub table: BTreeSet<Element>,
    pub fibers: Vec<(Element, BTreeSet<Element>)>,
    pub sigma_values: Vec<(Element, BTreeSet<Element>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionScore {
    pub convention: Convention,
    pub table: bool,
    pub fiber_rows: Vec<bool>,
    pub sigma_values: Vec<bool>,
    pub score: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub chosen: Convention,
    pub max_score: usize,
    pub scores: Vec<ConventionScore>,
}

pub fn score_convention(
    adm: &AdmissibleSet,
    anchors: &Anchors,
    convention: Convention,
) -> ConventionScore {
    let table = ekor_set(adm, anchors.level, true, convention.coset).elements == anchors.table;
    let fibers = FiberRelation::compute(adm, anchors.level, convention).fibers();
    let fiber_rows: Vec<bool> = anchors
        .fibers
        .iter()
        .map(|(t, f)| fibers.get(t) == Some(f))
        .collect();
    let mut reducer = SigmaReducer::new(anchors.level, convention);
    let sigma_values: Vec<bool> = anchors
        .sigma_values
        .iter()
        .map(|(w, s)| reducer.reduce(w).as_ref() == Ok(s))
        .collect();
    let score = table as usize
        + fiber_rows.iter().filter(|b| **b).count()
        + sigma_values.iter().filter(|b| **b).count();
    ConventionScore {
        convention,
        table,
        fiber_rows,
        sigma_values,
        score,
    }
}

/// Scores all eight conventions and keeps the first of maximal score.
pub fn calibrate(adm: &AdmissibleSet, anchors: &Anchors) -> Calibration {
    let scores: Vec<ConventionScore> = Convention::all()
        .into_iter()
        .map(|c| score_convention(adm, anchors, c))
        .collect();
    let max_score = scores.iter().map(|s| s.score).max().unwrap_or(0);
    let chosen = scores
        .iter()
        .find(|s| s.score == max_score)
        .map(|s| s.convention)
        .unwrap_or(Convention::DEFAULT);
    Calibration {
        chosen,
        max_score,
        scores,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> Element {
        s.parse().unwrap()
    }

    fn set(words: &[&str]) -> BTreeSet<Element> {
        words.iter().map(|w| el(w)).collect()
    }

    fn adm() -> AdmissibleSet {
        admissible_set(Coweight::from_doubled(1, 1)).unwrap()
    }

    #[test]
    fn admissible_set_has_thirteen_elements() {
        let a = adm();
        assert_eq!(a.len(), 13);
        assert!(a.contains(&Element::TAU));
        assert_eq!(a.basic().len(), 11);
    }

    #[test]
    fn rejects_non_dominant() {
        assert!(admissible_set(Coweight::from_doubled(-1, 1)).is_err());
    }

    #[test]
    fn minimal_reps_examples() {
        let k = GeneratorSet::paramodular();
        assert!(is_minimal(&Element::TAU, k, CosetSide::Left));
        assert!(is_minimal(&el("s1 t"), k, CosetSide::Left));
        assert!(!is_minimal(&el("s0 s1 t"), k, CosetSide::Left));
    }

    #[test]
    fn sigma_support_examples() {
        assert!(sigma_support(&Element::TAU).reflections.is_empty());
        let s = sigma_support(&el("s0 s2 t"));
        assert_eq!(s.reflections, GeneratorSet::paramodular());
        assert!(s.is_finite);
        let t = Element::translation_by(Coweight::from_doubled(1, -1)).unwrap();
        assert!(!sigma_support(&t).is_finite);
    }

    #[test]
    fn newton_examples() {
        assert!(newton_point(&Element::TAU).unwrap().is_zero());
        assert!(newton_point(&el("s0 s1 s0 t")).unwrap().is_zero());
        assert_eq!(newton_point(&el("s0 s1 s0 t")).unwrap().denominator, 1);
        let t = Element::translation_by(Coweight::from_doubled(1, -1)).unwrap();
        let n = newton_point(&t).unwrap();
        assert_eq!(n.as_coweight(), Some(Coweight::from_doubled(1, 1)));
    }

    #[test]
    fn paramodular_table_left() {
        let e = ekor_set(&adm(), GeneratorSet::paramodular(), true, CosetSide::Left);
        assert_eq!(e.elements, set(&["t", "s1 t", "s1 s2 t", "s1 s0 t"]));
    }

    #[test]
    fn paramodular_table_right() {
        let e = ekor_set(&adm(), GeneratorSet::paramodular(), true, CosetSide::Right);
        assert_eq!(e.elements, set(&["t", "s1 t", "s0 s1 t", "s2 s1 t"]));
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(
            stabilizer_subset(
                GeneratorSet::paramodular(),
                &Element::TAU,
                StabilizerSide::Twisted
            ),
            GeneratorSet::paramodular()
        );
        assert_eq!(
            stabilizer_subset(
                GeneratorSet::siegel(),
                &Element::TAU,
                StabilizerSide::Twisted
            ),
            GeneratorSet::siegel()
        );
        assert!(
            stabilizer_subset(GeneratorSet::EMPTY, &el("s1 t"), StabilizerSide::Inverse).is_empty()
        );
    }

    #[test]
    fn stabilizer_of_s1_tau_is_empty_in_every_orientation() {
        for side in [StabilizerSide::Twisted, StabilizerSide::Inverse] {
            assert!(stabilizer_subset(GeneratorSet::paramodular(), &el("s1 t"), side).is_empty());
        }
    }

    #[test]
    fn sigma_base_case() {
        let k = GeneratorSet::paramodular();
        for w in ["t", "s1 t", "s1 s2 t", "s1 s0 t"] {
            assert_eq!(sigma_k(&el(w), k, Convention::DEFAULT).unwrap(), set(&[w]));
        }
    }

    #[test]
    fn sigma_collapses_paramodular_closed_cell() {
        let k = GeneratorSet::paramodular();
        for w in ["s0 t", "s2 t", "s0 s2 t"] {
            assert_eq!(
                sigma_k(&el(w), k, Convention::DEFAULT).unwrap(),
                set(&["t"]),
                "{w}"
            );
        }
    }

    #[test]
    fn sigma_links_s0s1_and_s1s0() {
        let r = SigmaReducer::new(GeneratorSet::paramodular(), Convention::DEFAULT);
        let class = r.length_preserving_class(&el("s0 s1 t"));
        assert!(class.contains(&el("s1 s0 t")));
    }

    #[test]
    fn closure_intersection() {
        let a = adm();
        let x = closure_down_set(&a, &el("s2 s1 s2 t"), true);
        let y = closure_down_set(&a, &el("s0 s1 s0 t"), true);
        let both: BTreeSet<Element> = x.intersection(&y).copied().collect();
        assert_eq!(both, set(&["t", "s1 t"]));
        assert_eq!(closure_down_set(&a, &Element::TAU, true), set(&["t"]));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(&Element::TAU), 0);
        assert_eq!(dimension(&el("s1 t")), 1);
        assert_eq!(dimension(&el("s2 s1 s2 t")), 3);
    }

    #[test]
    fn generator_set_parsing() {
        assert_eq!(
            GeneratorSet::parse_level("s0,s2").unwrap(),
            GeneratorSet::paramodular()
        );
        assert_eq!(
            GeneratorSet::parse_level("{s1}").unwrap(),
            GeneratorSet::siegel()
        );
        assert_eq!(
            GeneratorSet::parse_level("").unwrap(),
            GeneratorSet::iwahori()
        );
        assert!(GeneratorSet::parse_level("s7").is_err());
        assert_eq!(GeneratorSet::paramodular().to_string(), "{s0,s2}");
    }

    #[test]
    fn convention_round_trip() {
        for c in Convention::all() {
            assert_eq!(c.to_string().parse::<Convention>().unwrap(), c);
        }
    }
}
