//! Seeded breadth-first neighbour search for points of each stratum, starting from the
//! superspecial base point.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::Fq;
use super::model::{Model, ModelLattice, Vector, RANK};
use super::points::{base_point, classify, is_point, Stratum};
use super::LatticeError;

pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0x5eed;
const PER_NODE: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub budget: usize,
    pub sample_size: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            sample_size: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witnesses: BTreeMap<Stratum, Vec<ModelLattice>>,
    pub examined: usize,
    pub valid: usize,
    /// Every valid point visited, in discovery order.
    pub points: Vec<ModelLattice>,
}

/// Candidates `M'` with `S ⊂¹ M' ⊂¹ T`, for `S ⊂¹ M ⊂¹ T` chosen at random.
/// Half of the draws for `S` and for `T` come from the τ-stable choices,
/// together with `M ∩ τM` and `M + τM` when those are valid.
struct Neighbours {
    s: Vec<ModelLattice>,
    t: Vec<ModelLattice>,
    s_pref: Vec<ModelLattice>,
    t_pref: Vec<ModelLattice>,
}

impl Neighbours {
    fn new(model: &Model, m: &ModelLattice) -> Result<Self, LatticeError> {
        let d = model.dual(m);
        let s = model.lines_between(&model.mul_t(&d)?, m)?;
        let t = model.lines_between(m, &d)?;
        let tm = model.tau(m);
        let cap = model.intersect(m, &tm);
        let sum = model.sum(m, &tm);
        let pref = |cands: &[ModelLattice], extra: &ModelLattice| -> Vec<ModelLattice> {
            cands
                .iter()
                .filter(|c| *c == extra || model.tau(c) == **c)
                .cloned()
                .collect()
        };
        let s_pref = pref(&s, &cap);
        let t_pref = pref(&t, &sum);
        Ok(Neighbours {
            s,
            t,
            s_pref,
            t_pref,
        })
    }

    fn sample(
        &self,
        model: &Model,
        m: &ModelLattice,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<ModelLattice>, LatticeError> {
        let mut pick_from = |all: &[ModelLattice], pref: &[ModelLattice]| -> ModelLattice {
            if !pref.is_empty() && rng.gen_bool(0.5) {
                pref[rng.gen_range(0..pref.len())].clone()
            } else {
                all[rng.gen_range(0..all.len())].clone()
            }
        };
        let s = pick_from(&self.s, &self.s_pref);
        let t = pick_from(&self.t, &self.t_pref);
        let lines = model.lines_between(&s, &t)?;
        let pick = &lines[rng.gen_range(0..lines.len())];
        Ok((pick != m).then(|| pick.clone()))
    }
}

/// Visits discovered points in discovery order, cycling, until `stop`
/// holds or the budget is spent.
pub fn explore<F>(
    model: &Model,
    config: &SearchConfig,
    mut stop: F,
) -> Result<SearchOutcome, LatticeError>
where
    F: FnMut(&BTreeMap<Stratum, Vec<ModelLattice>>) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = base_point(model);
    let mut witnesses: BTreeMap<Stratum, Vec<ModelLattice>> = BTreeMap::new();
    witnesses
        .entry(Stratum::Superspecial)
        .or_default()
        .push(start.clone());
    let mut seen: HashSet<ModelLattice> = HashSet::from([start.clone()]);
    let mut nodes: Vec<(ModelLattice, Neighbours)> =
        vec![(start.clone(), Neighbours::new(model, &start)?)];
    let mut cursor = 0;
    let mut examined = 0;
    let mut valid = 1;
    while examined < config.budget && !stop(&witnesses) {
        let (m, nb) = &nodes[cursor];
        let mut found = Vec::new();
        for _ in 0..PER_NODE {
            if examined >= config.budget {
                break;
            }
            examined += 1;
            let Some(c) = nb.sample(model, m, &mut rng)? else {
                continue;
            };
            if seen.contains(&c) || !model.in_working_window(&c) || !is_point(model, &c) {
                continue;
            }
            seen.insert(c.clone());
            valid += 1;
            let s = classify(model, &c);
            let bucket = witnesses.entry(s).or_default();
            if bucket.len() < config.sample_size {
                bucket.push(c.clone());
            }
            found.push(c);
        }
        for c in found {
            let nb = Neighbours::new(model, &c)?;
            nodes.push((c, nb));
        }
        cursor = (cursor + 1) % nodes.len();
    }
    Ok(SearchOutcome {
        witnesses,
        examined,
        valid,
        points: nodes.into_iter().map(|(m, _)| m).collect(),
    })
}

/// Up to `sample_size` points of `target`.
pub fn find_base_points(
    model: &Model,
    target: Stratum,
    config: &SearchConfig,
) -> Result<Vec<ModelLattice>, LatticeError> {
    let p = model.field().p();
    if model.q() < p * p {
        return Err(LatticeError::FieldTooSmall {
            q: model.q(),
            min: p * p,
        });
    }
    let want = config.sample_size.max(1);
    let outcome = explore(model, config, |w| {
        w.get(&target).is_some_and(|v| v.len() >= want)
    })?;
    match outcome.witnesses.get(&target) {
        Some(v) if !v.is_empty() => Ok(v.iter().take(want).cloned().collect()),
        _ => Err(LatticeError::NotFound {
            stratum: target,
            q: model.q(),
            budget: config.budget,
            examined: outcome.examined,
        }),
    }
}

/// Lattices `t·L₀ ⊂ M ⊂¹ L₀`, one per hyperplane of `L₀/t·L₀`.
pub fn hyperplane_lattices(model: &Model) -> Vec<ModelLattice> {
    let f = model.field();
    let q = model.q() as usize;
    let t_gens: Vec<Vector> = (0..RANK)
        .map(|c| model.basis_vector(c, 1).expect("in window"))
        .collect();
    let mut out = Vec::new();
    for pivot in 0..RANK {
        let free = RANK - pivot - 1;
        for code in 0..q.pow(free as u32) {
            // functional a with a[pivot] = 1, zeros before it
            let mut a = [0 as Fq; RANK];
            a[pivot] = 1;
            for (i, slot) in a[pivot + 1..].iter_mut().enumerate() {
                *slot = ((code / q.pow(i as u32)) % q) as Fq;
            }
            let mut gens = t_gens.clone();
            for (c, ac) in a.iter().enumerate() {
                if c == pivot {
                    continue;
                }
                let mut v = model.basis_vector(c, 0).expect("in window");
                let mut e = model.basis_vector(pivot, 0).expect("in window");
                let coef = f.neg(*ac);
                for x in e.iter_mut() {
                    *x = f.mul(coef, *x);
                }
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi = f.add(*vi, ei);
                }
                gens.push(v);
            }
            out.push(model.span(&gens));
        }
    }
    out
}

/// Strata of all hyperplane lattices that are valid points.
pub fn hyperplane_census(model: &Model) -> BTreeMap<Stratum, Vec<ModelLattice>> {
    let mut out: BTreeMap<Stratum, Vec<ModelLattice>> = BTreeMap::new();
    for m in hyperplane_lattices(model) {
        let s = classify(model, &m);
        if s != Stratum::Outside {
            out.entry(s).or_default().push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superspecial_contains_base() {
        let m = Model::new(3, 2).unwrap();
        let w = find_base_points(&m, Stratum::Superspecial, &SearchConfig::default()).unwrap();
        assert_eq!(w[0], base_point(&m));
    }

    #[test]
    fn type02_found_at_nine() {
        let m = Model::new(3, 2).unwrap();
        let w = find_base_points(&m, Stratum::Type02, &SearchConfig::default()).unwrap();
        assert_eq!(classify(&m, &w[0]), Stratum::Type02);
    }

    #[test]
    fn search_is_deterministic() {
        let m = Model::new(3, 2).unwrap();
        let cfg = SearchConfig {
            sample_size: 3,
            ..SearchConfig::default()
        };
        let a = find_base_points(&m, Stratum::Type02, &cfg).unwrap();
        let b = find_base_points(&m, Stratum::Type02, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hyperplane_count() {
        let m = Model::new(3, 2).unwrap();
        let hs = hyperplane_lattices(&m);
        assert_eq!(hs.len(), 1 + 9 + 81 + 729);
        let unique: HashSet<_> = hs.iter().collect();
        assert_eq!(unique.len(), hs.len());
        assert!(hs.contains(&base_point(&m)));
        assert!(hs.iter().all(|h| m.index(h, &m.reference()) == Ok(1)));
    }

    #[test]
    fn prime_field_rejected() {
        let m = Model::new(3, 1).unwrap();
        assert!(find_base_points(&m, Stratum::Type0, &SearchConfig::default()).is_err());
    }
}
