//! Independent oracles for derived values.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use parahoric::ekor::{admissible_set, is_basic, newton_point};
use parahoric::golden;
use parahoric::lattice::{
    classify, enumerate_web, find_base_points, hyperplane_census, Model, SearchConfig, Stratum,
};
use parahoric::weyl::{elements_up_to, Element, Generator};

/// `ν` from `(wσ)^16 = (w·σ(w))^8`, which is always a pure translation.
fn newton_by_power(w: &Element) -> [i64; 2] {
    let u = *w * w.sigma();
    let mut v = Element::IDENTITY;
    for _ in 0..8 {
        v = v * u;
    }
    assert!(v.is_pure_translation(), "{w}");
    let d = v.translation().doubled;
    let (a, b) = (d[0].abs() as i64, d[1].abs() as i64);
    [a.max(b), a.min(b)]
}

#[test]
fn newton_points_agree_with_powers() {
    for omega in 0..2 {
        for w in elements_up_to(5, omega) {
            let nu = newton_point(&w).unwrap();
            let [a, b] = newton_by_power(&w);
            // nu = numerators / denominator, power oracle = doubled / 32
            assert_eq!(nu.numerators[0] * 32, a * nu.denominator, "{w}");
            assert_eq!(nu.numerators[1] * 32, b * nu.denominator, "{w}");
        }
    }
}

/// Outside `Adm(μ)` only one direction holds: `s0 s2 s1 s2 t` has `ν = 0`
/// but full σ-support.
#[test]
fn finite_support_implies_zero_newton_point() {
    let mut converse_fails = 0;
    for w in elements_up_to(5, 1) {
        let zero = newton_point(&w).unwrap().is_zero();
        if is_basic(&w) {
            assert!(zero, "{w}");
        } else if zero {
            converse_fails += 1;
        }
    }
    assert!(!is_basic(&golden::parse("s0 s2 s1 s2 t")));
    assert!(newton_point(&golden::parse("s0 s2 s1 s2 t"))
        .unwrap()
        .is_zero());
    assert!(converse_fails > 0);
}

#[test]
fn length_is_bfs_distance() {
    let mut dist: BTreeMap<Element, usize> = BTreeMap::from([(Element::IDENTITY, 0)]);
    let mut queue = VecDeque::from([Element::IDENTITY]);
    while let Some(w) = queue.pop_front() {
        let d = dist[&w];
        if d == 6 {
            continue;
        }
        for s in Generator::ALL {
            let v = s.element() * w;
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    for (w, d) in &dist {
        assert_eq!(w.length(), *d, "{w}");
    }
    assert_eq!(dist.len(), elements_up_to(6, 0).len());
}

#[test]
fn admissible_set_is_thirteen_with_two_non_basic() {
    let adm = admissible_set(golden::MU).unwrap();
    let non_basic: BTreeSet<String> = adm
        .elements
        .iter()
        .filter(|w| !is_basic(w))
        .map(|w| w.word_string())
        .collect();
    assert_eq!(adm.len(), 13);
    assert_eq!(non_basic.len(), 2);
}

/// Exhaustive over every `t·L₀ ⊂ M ⊂¹ L₀`: the τ-stable hyperplanes are the
/// `F_p`-rational ones, and no point of the hyperplane family has type 0
/// or type 2 below `Q = 81`.
#[test]
fn hyperplane_family_census() {
    let want: [(u32, [usize; 2]); 2] = [(2, [40, 240]), (3, [40, 960])];
    for (j, [ss, t02]) in want {
        let model = Model::new(3, j).unwrap();
        let census = hyperplane_census(&model);
        let count = |s| census.get(&s).map_or(0, Vec::len);
        assert_eq!(count(Stratum::Superspecial), ss);
        assert_eq!(count(Stratum::Type02), t02);
        assert_eq!(count(Stratum::Type0), 0);
        assert_eq!(count(Stratum::Type2), 0);
    }
}

#[test]
fn web_counts_are_stable_across_base_points() {
    let model = Model::new(3, 2).unwrap();
    let census = hyperplane_census(&model);
    for (stratum, points) in &census {
        let expected = stratum.expected_web_count(model.q()).unwrap();
        for m in points.iter().step_by(37) {
            let web = enumerate_web(&model, m).unwrap();
            assert_eq!(web.count(), expected, "{}", model.describe(m));
            assert!(web.all_certified());
        }
    }
}

#[test]
fn widened_strata_have_expected_counts() {
    let model = Model::new(3, 4).unwrap();
    let cfg = SearchConfig {
        sample_size: 2,
        ..SearchConfig::default()
    };
    for stratum in [Stratum::Type0, Stratum::Type2] {
        for m in find_base_points(&model, stratum, &cfg).unwrap() {
            assert_eq!(classify(&model, &m), stratum);
            let web = enumerate_web(&model, &m).unwrap();
            assert_eq!(web.count(), 82);
            assert!(web.all_certified());
        }
    }
}
