//! Structured comparison of computed strata, fibers and lattice counts
//! against the reference tables in [`crate::golden`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ekor::{
    admissible_set, calibrate, closure_down_set, ekor_set, stabilizer_subset, AdmissibleSet,
    Calibration, Convention, FiberRelation, GeneratorSet, SigmaReducer,
};
use crate::golden;
use crate::lattice::{
    enumerate_web, find_base_points, partner_report, spin_index, LatticeError, Model, SearchConfig,
    Side, Stratum, Web,
};
use crate::weyl::{sorted_for_display, Element};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest extension degree tried when widening a lattice search.
pub const MAX_DEGREE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Match,
    Discrepancy,
    KnownDiscrepancy,
}

impl Status {
    fn of(matches: bool, must_match: bool) -> Status {
        match (matches, must_match) {
            (true, _) => Status::Match,
            (false, true) => Status::Discrepancy,
            (false, false) => Status::KnownDiscrepancy,
        }
    }
}

pub fn words<'a, I: IntoIterator<Item = &'a Element>>(it: I) -> Vec<String> {
    sorted_for_display(it.into_iter().copied())
        .iter()
        .map(|w| w.word_string())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDiff {
    pub computed: Vec<String>,
    pub reference: Vec<String>,
    /// In the reference but not computed.
    pub missing: Vec<String>,
    /// Computed but not in the reference.
    pub extra: Vec<String>,
}

impl SetDiff {
    pub fn new(computed: &BTreeSet<Element>, reference: &BTreeSet<Element>) -> Self {
        SetDiff {
            computed: words(computed),
            reference: words(reference),
            missing: words(reference.difference(computed)),
            extra: words(computed.difference(reference)),
        }
    }

    pub fn is_match(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCheck {
    pub name: String,
    pub level: GeneratorSet,
    pub must_match: bool,
    pub status: Status,
    pub diff: SetDiff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRow {
    pub target: String,
    pub diff: SetDiff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub element: String,
    pub value: Result<Vec<String>, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub name: String,
    pub reading: String,
    pub level: GeneratorSet,
    pub must_match: bool,
    pub status: Status,
    pub rows: Vec<FiberRow>,
    /// Computed fibers over targets absent from the reference rows.
    pub unlisted: Vec<FiberRow>,
    /// Elements whose `Σ_K` is not a single element.
    pub defects: Vec<SigmaEntry>,
    pub computed_sizes: Vec<usize>,
    pub reference_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaAnchor {
    pub element: String,
    pub computed: Result<Vec<String>, String>,
    pub reference: Vec<String>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerClaim {
    pub element: String,
    pub level: GeneratorSet,
    pub computed: GeneratorSet,
    pub claimed: GeneratorSet,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCheck {
    pub status: Status,
    pub intersection: SetDiff,
    pub union: SetDiff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CountStatus {
    Match,
    Mismatch,
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCount {
    pub stratum: Stratum,
    pub q: u32,
    pub status: CountStatus,
    pub count: Option<usize>,
    pub expected: usize,
    pub certified: bool,
    pub spin_index: Option<usize>,
    /// Partner pattern for the stratum holds (see [`partners_ok`]).
    pub partners_ok: Option<bool>,
    /// Field sizes tried before this one without finding a point.
    pub widened_from: Vec<u32>,
    pub examined: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub p: u32,
    pub start_degree: u32,
    pub seed: u64,
    pub budget: usize,
    pub status: Status,
    pub counts: Vec<LatticeCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub schema_version: u32,
    pub convention: Convention,
    pub calibration: Calibration,
    pub admissible_count: usize,
    pub tables: Vec<TableCheck>,
    pub fibers: Vec<FiberCheck>,
    pub sigma_anchors: Vec<SigmaAnchor>,
    pub stabilizer_claims: Vec<StabilizerClaim>,
    pub closure: ClosureCheck,
    pub lattice: Option<LatticeSection>,
    pub exit_code: i32,
}

impl ConformanceReport {
    /// Statuses of every must-match and known-discrepancy target.
    pub fn statuses(&self) -> Vec<(String, Status)> {
        let mut out: Vec<(String, Status)> = Vec::new();
        out.extend(self.tables.iter().map(|t| (t.name.clone(), t.status)));
        out.extend(
            self.fibers
                .iter()
                .map(|f| (format!("{} ({})", f.name, f.reading), f.status)),
        );
        out.extend(
            self.sigma_anchors
                .iter()
                .map(|a| (format!("sigma {}", a.element), a.status)),
        );
        out.push(("closure".into(), self.closure.status));
        if let Some(l) = &self.lattice {
            out.push(("lattice counts".into(), l.status));
        }
        out
    }
}

/// 0 if everything matches, 5 if only known discrepancies differ, 1
/// otherwise.
pub fn exit_code(statuses: &[Status]) -> i32 {
    if statuses.contains(&Status::Discrepancy) {
        1
    } else if statuses.contains(&Status::KnownDiscrepancy) {
        5
    } else {
        0
    }
}

pub fn table_check(
    name: &str,
    adm: &AdmissibleSet,
    level: GeneratorSet,
    convention: Convention,
    reference: &[&str],
    must_match: bool,
) -> TableCheck {
    let computed = ekor_set(adm, level, true, convention.coset).elements;
    let diff = SetDiff::new(&computed, &golden::parse_set(reference));
    TableCheck {
        name: name.into(),
        level,
        must_match,
        status: Status::of(diff.is_match(), must_match),
        diff,
    }
}

fn sigma_entry(w: &Element, r: &crate::ekor::SigmaResult) -> SigmaEntry {
    SigmaEntry {
        element: w.word_string(),
        value: r.as_ref().map(words).map_err(|e| e.to_string()),
    }
}

pub fn fiber_check(
    name: &str,
    reading: &str,
    relation: &FiberRelation,
    reference: &[(Element, BTreeSet<Element>)],
    must_match: bool,
) -> FiberCheck {
    let fibers = relation.fibers();
    let empty = BTreeSet::new();
    let rows: Vec<FiberRow> = reference
        .iter()
        .map(|(t, f)| FiberRow {
            target: t.word_string(),
            diff: SetDiff::new(fibers.get(t).unwrap_or(&empty), f),
        })
        .collect();
    let listed: BTreeSet<&Element> = reference.iter().map(|(t, _)| t).collect();
    let unlisted: Vec<FiberRow> = fibers
        .iter()
        .filter(|(t, _)| !listed.contains(t))
        .map(|(t, f)| FiberRow {
            target: t.word_string(),
            diff: SetDiff::new(f, &empty),
        })
        .collect();
    let defects: Vec<SigmaEntry> = relation
        .defects()
        .iter()
        .map(|(w, r)| sigma_entry(w, r))
        .collect();
    let matches =
        rows.iter().all(|r| r.diff.is_match()) && unlisted.is_empty() && defects.is_empty();
    let mut computed_sizes: Vec<usize> = fibers.values().map(BTreeSet::len).collect();
    computed_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut reference_sizes: Vec<usize> = reference.iter().map(|(_, f)| f.len()).collect();
    reference_sizes.sort_unstable_by(|a, b| b.cmp(a));
    FiberCheck {
        name: name.into(),
        reading: reading.into(),
        level: relation.level,
        must_match,
        status: Status::of(matches, must_match),
        rows,
        unlisted,
        defects,
        computed_sizes,
        reference_sizes,
    }
}

/// Reference Siegel rows with each target added to its own fiber.
pub fn siegel_rows_with_targets() -> Vec<(Element, BTreeSet<Element>)> {
    golden::parse_rows(golden::SIEGEL_FIBERS)
        .into_iter()
        .map(|(t, mut f)| {
            f.insert(t);
            (t, f)
        })
        .collect()
}

pub fn closure_check(adm: &AdmissibleSet) -> ClosureCheck {
    let w212 = golden::parse("s2 s1 s2 t");
    let w010 = golden::parse("s0 s1 s0 t");
    let w02 = golden::parse("s0 s2 t");
    let a = closure_down_set(adm, &w212, true);
    let b = closure_down_set(adm, &w010, true);
    let c = closure_down_set(adm, &w02, true);
    let inter: BTreeSet<Element> = a.intersection(&b).copied().collect();
    let w1_down = closure_down_set(adm, &golden::parse("s1 t"), true);
    let union: BTreeSet<Element> = a.union(&b).chain(c.iter()).copied().collect();
    let intersection = SetDiff::new(&inter, &w1_down);
    let union = SetDiff::new(&union, &golden::parse_set(golden::IWAHORI_TABLE));
    let ok =
        intersection.is_match() && union.is_match() && w1_down == golden::parse_set(&["t", "s1 t"]);
    ClosureCheck {
        status: Status::of(ok, true),
        intersection,
        union,
    }
}

/// Counts retained web pairs for one stratum, raising the extension degree
/// while no point is found.
pub fn lattice_count(
    p: u32,
    start_degree: u32,
    stratum: Stratum,
    config: &SearchConfig,
) -> Result<LatticeCount, LatticeError> {
    let mut widened_from = Vec::new();
    let mut last_q = p.pow(start_degree);
    let mut last_examined = None;
    for j in start_degree..=MAX_DEGREE {
        let model = match Model::new(p, j) {
            Ok(m) => m,
            Err(LatticeError::UnsupportedField { .. }) => break,
            Err(e) => return Err(e),
        };
        last_q = model.q();
        match find_base_points(&model, stratum, config) {
            Ok(points) => {
                let point = &points[0];
                let web = enumerate_web(&model, point)?;
                let expected = stratum.expected_web_count(model.q()).unwrap_or(0);
                let count = web.count();
                return Ok(LatticeCount {
                    stratum,
                    q: model.q(),
                    status: if count == expected {
                        CountStatus::Match
                    } else {
                        CountStatus::Mismatch
                    },
                    count: Some(count),
                    expected,
                    certified: web.all_certified(),
                    spin_index: Some(spin_index(&model, point)?),
                    partners_ok: Some(partners_ok(&web)),
                    widened_from,
                    examined: None,
                });
            }
            Err(LatticeError::NotFound { examined, .. }) => {
                widened_from.push(model.q());
                last_examined = Some(examined);
            }
            Err(e) => return Err(e),
        }
    }
    widened_from.pop();
    Ok(LatticeCount {
        stratum,
        q: last_q,
        status: CountStatus::NotFound,
        count: None,
        expected: stratum.expected_web_count(last_q).unwrap_or(0),
        certified: false,
        spin_index: None,
        partners_ok: None,
        widened_from,
        examined: last_examined,
    })
}

/// `TYPE0`: every `S₀` has one partner. `TYPE2`: every `T₀` has one
/// partner. `TYPE02`: exactly one candidate on each side has several.
/// Superspecial webs are a full product, so every candidate has `Q + 1`.
pub fn partners_ok(web: &Web) -> bool {
    let s = partner_report(web, Side::S);
    let t = partner_report(web, Side::T);
    match web.stratum {
        Stratum::Type0 => s.all_unique(),
        Stratum::Type2 => t.all_unique(),
        Stratum::Type02 => s.multiple.len() == 1 && t.multiple.len() == 1,
        Stratum::Superspecial => web.pairs.len() == s.multiplicities.len() * t.multiplicities.len(),
        Stratum::Outside => false,
    }
}

pub fn lattice_section(
    p: u32,
    start_degree: u32,
    config: &SearchConfig,
) -> Result<LatticeSection, LatticeError> {
    let counts = Stratum::INNER
        .iter()
        .map(|s| lattice_count(p, start_degree, *s, config))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = counts.iter().all(|c| {
        c.status == CountStatus::Match
            && c.certified
            && c.spin_index.is_some_and(|i| i <= 1)
            && c.partners_ok == Some(true)
    });
    Ok(LatticeSection {
        p,
        start_degree,
        seed: config.seed,
        budget: config.budget,
        status: Status::of(ok, true),
        counts,
    })
}

#[derive(Clone, Debug)]
pub struct ConformanceOptions {
    /// `None` calibrates.
    pub convention: Option<Convention>,
    /// `None` skips the lattice section.
    pub lattice: Option<(u32, u32, SearchConfig)>,
}

impl Default for ConformanceOptions {
    fn default() -> Self {
        ConformanceOptions {
            convention: None,
            lattice: Some((3, 2, SearchConfig::default())),
        }
    }
}

pub fn run(options: &ConformanceOptions) -> Result<ConformanceReport, LatticeError> {
    let adm = admissible_set(golden::MU).expect("μ is dominant");
    let anchors = golden::paramodular_anchors();
    let calibration = calibrate(&adm, &anchors);
    let convention = options.convention.unwrap_or(calibration.chosen);

    let tables = vec![
        table_check(
            "paramodular EKOR table",
            &adm,
            GeneratorSet::paramodular(),
            convention,
            golden::PARAMODULAR_TABLE,
            true,
        ),
        table_check(
            "iwahori EKOR table",
            &adm,
            GeneratorSet::iwahori(),
            convention,
            golden::IWAHORI_TABLE,
            true,
        ),
        table_check(
            "siegel EKOR table",
            &adm,
            GeneratorSet::siegel(),
            convention,
            golden::SIEGEL_TABLE,
            false,
        ),
    ];

    let para = FiberRelation::compute(&adm, GeneratorSet::paramodular(), convention);
    let siegel = FiberRelation::compute(&adm, GeneratorSet::siegel(), convention);
    let fibers = vec![
        fiber_check(
            "paramodular fiber table",
            "as printed",
            &para,
            &anchors.fibers,
            true,
        ),
        fiber_check(
            "siegel fiber table",
            "as printed",
            &siegel,
            &golden::parse_rows(golden::SIEGEL_FIBERS),
            false,
        ),
        fiber_check(
            "siegel fiber table",
            "targets added to own fibers",
            &siegel,
            &siegel_rows_with_targets(),
            false,
        ),
    ];

    let mut reducer = SigmaReducer::new(GeneratorSet::paramodular(), convention);
    let sigma_anchors = anchors
        .sigma_values
        .iter()
        .map(|(w, reference)| {
            let computed = reducer.reduce(w);
            let ok = computed.as_ref() == Ok(reference);
            SigmaAnchor {
                element: w.word_string(),
                computed: computed.as_ref().map(words).map_err(|e| e.to_string()),
                reference: words(reference),
                status: Status::of(ok, true),
            }
        })
        .collect();

    let stabilizer_claims = [
        ("t", GeneratorSet::paramodular()),
        ("s1 t", GeneratorSet::paramodular()),
    ]
    .iter()
    .map(|(w, claimed)| {
        let x = golden::parse(w);
        let computed = stabilizer_subset(GeneratorSet::paramodular(), &x, convention.stabilizer);
        StabilizerClaim {
            element: x.word_string(),
            level: GeneratorSet::paramodular(),
            computed,
            claimed: *claimed,
            agrees: computed == *claimed,
        }
    })
    .collect();

    let closure = closure_check(&adm);
    let lattice = match &options.lattice {
        Some((p, j, cfg)) => Some(lattice_section(*p, *j, cfg)?),
        None => None,
    };

    let mut report = ConformanceReport {
        schema_version: SCHEMA_VERSION,
        convention,
        calibration,
        admissible_count: adm.len(),
        tables,
        fibers,
        sigma_anchors,
        stabilizer_claims,
        closure,
        lattice,
        exit_code: 0,
    };
    let statuses: Vec<Status> = report.statuses().into_iter().map(|(_, s)| s).collect();
    report.exit_code = exit_code(&statuses);
    Ok(report)
}

/// Fibers of a level map as `(target, fiber)` word lists.
pub fn fiber_rows(relation: &FiberRelation) -> Vec<(String, Vec<String>)> {
    let fibers: BTreeMap<Element, BTreeSet<Element>> = relation.fibers();
    sorted_for_display(fibers.keys().copied())
        .iter()
        .map(|t| (t.word_string(), words(&fibers[t])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ConformanceReport {
        run(&ConformanceOptions {
            convention: None,
            lattice: None,
        })
        .unwrap()
    }

    #[test]
    fn exit_code_rules() {
        assert_eq!(exit_code(&[Status::Match]), 0);
        assert_eq!(exit_code(&[Status::Match, Status::KnownDiscrepancy]), 5);
        assert_eq!(
            exit_code(&[Status::KnownDiscrepancy, Status::Discrepancy]),
            1
        );
    }

    #[test]
    fn main_tables_match() {
        let r = quick();
        assert_eq!(r.tables[0].status, Status::Match);
        assert_eq!(r.tables[1].status, Status::Match);
        assert_eq!(r.admissible_count, 13);
    }

    #[test]
    fn siegel_is_known_discrepancy_with_diff() {
        let r = quick();
        let t = &r.tables[2];
        assert_eq!(t.status, Status::KnownDiscrepancy);
        assert_eq!(t.diff.computed.len(), 8);
        assert!(t.diff.extra.contains(&"s0 s1 t".to_string()));
        for f in &r.fibers[1..] {
            assert_eq!(f.status, Status::KnownDiscrepancy);
        }
    }

    #[test]
    fn report_names_convention() {
        let r = quick();
        assert_eq!(r.convention, r.calibration.chosen);
        assert_eq!(r.schema_version, SCHEMA_VERSION);
    }

    #[test]
    fn stabilizer_claim_for_s1_tau_disagrees() {
        let r = quick();
        assert!(r.stabilizer_claims[0].agrees);
        assert!(!r.stabilizer_claims[1].agrees);
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = quick();
        let s = serde_json::to_string(&r).unwrap();
        let back: ConformanceReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn closure_matches() {
        assert_eq!(quick().closure.status, Status::Match);
    }
}
