//! Points, strata, the inclusion web and its certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{Model, ModelLattice};
use super::LatticeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Superspecial,
    Type0,
    Type2,
    Type02,
    Outside,
}

impl Stratum {
    pub const INNER: [Stratum; 4] = [
        Stratum::Superspecial,
        Stratum::Type0,
        Stratum::Type2,
        Stratum::Type02,
    ];

    /// Number of retained web pairs predicted over `F_Q`.
    pub fn expected_web_count(self, q: u32) -> Option<usize> {
        let q = q as usize;
        match self {
            Stratum::Superspecial => Some((q + 1) * (q + 1)),
            Stratum::Type0 | Stratum::Type2 => Some(q + 1),
            Stratum::Type02 => Some(2 * q + 1),
            Stratum::Outside => None,
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stratum::Superspecial => "superspecial",
            Stratum::Type0 => "type0",
            Stratum::Type2 => "type2",
            Stratum::Type02 => "type02",
            Stratum::Outside => "outside",
        };
        f.write_str(s)
    }
}

impl FromStr for Stratum {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "superspecial" | "ss" => Ok(Stratum::Superspecial),
            "type0" => Ok(Stratum::Type0),
            "type2" => Ok(Stratum::Type2),
            "type02" => Ok(Stratum::Type02),
            "outside" => Ok(Stratum::Outside),
            other => Err(LatticeError::UnknownStratum(other.to_string())),
        }
    }
}

/// The superspecial base point `⟨e1, e2, f1, t·f2⟩`.
pub fn base_point(model: &Model) -> ModelLattice {
    model
        .diagonal([0, 0, 0, 1])
        .expect("base point lies in the window")
}

fn index_is(model: &Model, a: &ModelLattice, b: &ModelLattice, n: usize) -> bool {
    matches!(model.index(a, b), Ok(k) if k == n)
}

/// `t·M^∨ ⊂² M ⊂² M^∨` and `t·τ(M^∨) ⊂² M ⊂² τ(M^∨)`.
pub fn is_point(model: &Model, m: &ModelLattice) -> bool {
    let d = model.dual(m);
    let td = model.tau(&d);
    let (Ok(t_d), Ok(t_td)) = (model.mul_t(&d), model.mul_t(&td)) else {
        return false;
    };
    index_is(model, &t_d, m, 2)
        && index_is(model, m, &d, 2)
        && index_is(model, &t_td, m, 2)
        && index_is(model, m, &td, 2)
}

pub fn classify(model: &Model, m: &ModelLattice) -> Stratum {
    if !is_point(model, m) {
        return Stratum::Outside;
    }
    let tm = model.tau(m);
    if tm == *m {
        return Stratum::Superspecial;
    }
    let sum = model.sum(m, &tm);
    let cap = model.intersect(m, &tm);
    let sum_stable = model.tau(&sum) == sum;
    let cap_stable = model.tau(&cap) == cap;
    match (sum_stable, cap_stable) {
        (true, true) => Stratum::Type02,
        (true, false) => Stratum::Type0,
        (false, true) => Stratum::Type2,
        (false, false) => Stratum::Outside,
    }
}

/// `dim (M + τM)/M` for a valid point.
pub fn spin_index(model: &Model, m: &ModelLattice) -> Result<usize, LatticeError> {
    if !is_point(model, m) {
        return Err(LatticeError::NotAPoint);
    }
    model.index(m, &model.sum(m, &model.tau(m)))
}

pub fn spin_check(model: &Model, m: &ModelLattice) -> Result<bool, LatticeError> {
    Ok(spin_index(model, m)? <= 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclusion {
    pub name: String,
    pub index: usize,
}

/// Index-1 inclusions certified for a retained pair: the middle row
/// `tM^∨ ⊂ S ⊂ M ⊂ T ⊂ M^∨` and the top row
/// `τM ⊂ τT^∨ ⊂ τM^∨ ⊂ τS^∨ ⊂ t⁻¹τM`.
pub const INCLUSION_NAMES: [&str; 8] = [
    "tM0^v < S0",
    "S0 < M0",
    "M0 < T0",
    "T0 < M0^v",
    "tau M0 < tau T0^v",
    "tau T0^v < tau M0^v",
    "tau M0^v < tau S0^v",
    "tau S0^v < t^-1 tau M0",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebPair {
    pub s0: ModelLattice,
    pub t0: ModelLattice,
    pub inclusions: Vec<Inclusion>,
}

impl WebPair {
    pub fn certified(&self) -> bool {
        self.inclusions.len() == 8 && self.inclusions.iter().all(|i| i.index == 1)
    }
}

#[derive(Clone, Debug)]
pub struct Web {
    pub point: ModelLattice,
    pub stratum: Stratum,
    pub s_candidates: Vec<ModelLattice>,
    pub t_candidates: Vec<ModelLattice>,
    pub pairs: Vec<WebPair>,
}

impl Web {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn all_certified(&self) -> bool {
        self.pairs.iter().all(WebPair::certified)
    }
}

fn certify(
    model: &Model,
    m: &ModelLattice,
    s0: &ModelLattice,
    t0: &ModelLattice,
) -> Result<Vec<Inclusion>, LatticeError> {
    let md = model.dual(m);
    let tmd = model.mul_t(&md)?;
    let tau_m = model.tau(m);
    let tau_td = model.tau(&model.dual(t0));
    let tau_md = model.tau(&md);
    let tau_sd = model.tau(&model.dual(s0));
    let top = model.div_t(&tau_m)?;
    let chain = [
        (&tmd, s0),
        (s0, m),
        (m, t0),
        (t0, &md),
        (&tau_m, &tau_td),
        (&tau_td, &tau_md),
        (&tau_md, &tau_sd),
        (&tau_sd, &top),
    ];
    chain
        .iter()
        .zip(INCLUSION_NAMES)
        .map(|((a, b), name)| {
            Ok(Inclusion {
                name: name.to_string(),
                index: model.index(a, b)?,
            })
        })
        .collect()
}

/// All `(S₀, T₀)` with `tM^∨ ⊂¹ S₀ ⊂¹ M ⊂¹ T₀ ⊂¹ M^∨` satisfying
/// `t·τ(T₀^∨) ⊆ S₀ ⊆ τ(T₀^∨)` and `t·τ(S₀^∨) ⊆ T₀ ⊆ τ(S₀^∨)`.
pub fn enumerate_web(model: &Model, m: &ModelLattice) -> Result<Web, LatticeError> {
    let stratum = classify(model, m);
    if stratum == Stratum::Outside {
        return Err(LatticeError::NotAPoint);
    }
    let md = model.dual(m);
    let s_candidates = model.lines_between(&model.mul_t(&md)?, m)?;
    let t_candidates = model.lines_between(m, &md)?;
    let bounds = |x: &ModelLattice| -> Result<(ModelLattice, ModelLattice), LatticeError> {
        let upper = model.tau(&model.dual(x));
        Ok((model.mul_t(&upper)?, upper))
    };
    let s_bounds = s_candidates
        .iter()
        .map(&bounds)
        .collect::<Result<Vec<_>, _>>()?;
    let t_bounds = t_candidates
        .iter()
        .map(&bounds)
        .collect::<Result<Vec<_>, _>>()?;
    let mut pairs = Vec::new();
    for (s0, (s_lo, s_hi)) in s_candidates.iter().zip(&s_bounds) {
        for (t0, (t_lo, t_hi)) in t_candidates.iter().zip(&t_bounds) {
            let keep = model.is_sublattice(t_lo, s0)
                && model.is_sublattice(s0, t_hi)
                && model.is_sublattice(s_lo, t0)
                && model.is_sublattice(t0, s_hi);
            if keep {
                let inclusions = certify(model, m, s0, t0)?;
                pairs.push(WebPair {
                    s0: s0.clone(),
                    t0: t0.clone(),
                    inclusions,
                });
            }
        }
    }
    Ok(Web {
        point: m.clone(),
        stratum,
        s_candidates,
        t_candidates,
        pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    S,
    T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartnerReport {
    pub side: Side,
    /// Number of retained pairs per candidate, in candidate order.
    pub multiplicities: Vec<usize>,
    /// Candidates (by position) with more than one partner.
    pub multiple: Vec<usize>,
    /// Candidates with no partner.
    pub unmatched: Vec<usize>,
}

impl PartnerReport {
    pub fn all_unique(&self) -> bool {
        self.multiplicities.iter().all(|m| *m == 1)
    }
}

pub fn partner_report(web: &Web, side: Side) -> PartnerReport {
    let candidates = match side {
        Side::S => &web.s_candidates,
        Side::T => &web.t_candidates,
    };
    let mut counts: BTreeMap<&ModelLattice, usize> = BTreeMap::new();
    for p in &web.pairs {
        let key = match side {
            Side::S => &p.s0,
            Side::T => &p.t0,
        };
        *counts.entry(key).or_default() += 1;
    }
    let multiplicities: Vec<usize> = candidates
        .iter()
        .map(|c| counts.get(c).copied().unwrap_or(0))
        .collect();
    let multiple = multiplicities
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 1)
        .map(|(i, _)| i)
        .collect();
    let unmatched = multiplicities
        .iter()
        .enumerate()
        .filter(|(_, m)| **m == 0)
        .map(|(i, _)| i)
        .collect();
    PartnerReport {
        side,
        multiplicities,
        multiple,
        unmatched,
    }
}

/// For `TYPE0` every `S₀` has exactly one partner; for `TYPE2` every `T₀`.
pub fn unique_partner_check(
    model: &Model,
    m: &ModelLattice,
) -> Result<PartnerReport, LatticeError> {
    let web = enumerate_web(model, m)?;
    let side = match web.stratum {
        Stratum::Type0 => Side::S,
        Stratum::Type2 => Side::T,
        _ => return Err(LatticeError::WrongStratum(web.stratum)),
    };
    let report = partner_report(&web, side);
    match report.multiplicities.iter().position(|m| *m != 1) {
        None => Ok(report),
        Some(i) => {
            let cand = match side {
                Side::S => &web.s_candidates[i],
                Side::T => &web.t_candidates[i],
            };
            Err(LatticeError::Violation {
                candidate: model.describe(cand).to_string(),
                partners: report.multiplicities[i],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_point_is_superspecial() {
        let m = Model::new(3, 2).unwrap();
        let b = base_point(&m);
        assert!(is_point(&m, &b));
        assert_eq!(classify(&m, &b), Stratum::Superspecial);
        assert_eq!(spin_index(&m, &b).unwrap(), 0);
    }

    #[test]
    fn self_dual_lattice_is_outside() {
        let m = Model::new(3, 2).unwrap();
        assert_eq!(classify(&m, &m.reference()), Stratum::Outside);
        assert!(spin_check(&m, &m.reference()).is_err());
    }

    #[test]
    fn superspecial_web_at_nine() {
        let m = Model::new(3, 2).unwrap();
        let web = enumerate_web(&m, &base_point(&m)).unwrap();
        assert_eq!(web.count(), 100);
        assert!(web.all_certified());
    }

    #[test]
    fn stratum_names_round_trip() {
        for s in Stratum::INNER {
            assert_eq!(s.to_string().parse::<Stratum>().unwrap(), s);
        }
        assert!("type9".parse::<Stratum>().is_err());
    }
}
