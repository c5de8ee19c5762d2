use proptest::prelude::*;

use parahoric::lattice::model::{Vector, DEPTH, DIM, RANK};
use parahoric::lattice::{Model, ModelLattice};
use parahoric::weyl::{Element, Generator, Word};

fn element() -> impl Strategy<Value = Element> {
    (prop::collection::vec(0usize..3, 0..10), 0i32..4).prop_map(|(letters, omega)| {
        letters.into_iter().fold(Element::tau_pow(omega), |acc, i| {
            Generator::from_index(i).unwrap().element() * acc
        })
    })
}

fn generator() -> impl Strategy<Value = Generator> {
    (0usize..3).prop_map(|i| Generator::from_index(i).unwrap())
}

proptest! {
    #[test]
    fn length_by_hyperplanes_matches_descents(w in element()) {
        prop_assert_eq!(w.length(), w.length_by_descent());
    }

    #[test]
    fn generators_change_length_by_one(w in element(), s in generator()) {
        let l = w.length() as i64;
        prop_assert_eq!(((s.element() * w).length() as i64 - l).abs(), 1);
        prop_assert_eq!(((w * s.element()).length() as i64 - l).abs(), 1);
    }

    #[test]
    fn sigma_is_length_preserving_homomorphism(a in element(), b in element()) {
        prop_assert_eq!((a * b).sigma(), a.sigma() * b.sigma());
        prop_assert_eq!(a.sigma().sigma_inverse(), a);
        prop_assert_eq!(a.sigma().length(), a.length());
    }

    #[test]
    fn inverse_and_length(w in element()) {
        prop_assert_eq!(w * w.inverse(), Element::IDENTITY);
        prop_assert_eq!(w.inverse().length(), w.length());
    }

    #[test]
    fn word_round_trip(w in element()) {
        let word = w.reduced_word();
        prop_assert!(word.is_reduced());
        prop_assert_eq!(word.evaluate(), w);
        let parsed: Element = w.to_string().parse().unwrap();
        prop_assert_eq!(parsed, w);
        let reparsed: Word = word.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, word);
    }

    #[test]
    fn json_round_trip(w in element()) {
        let s = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<Element>(&s).unwrap(), w);
    }

    #[test]
    fn bruhat_is_a_partial_order(a in element(), b in element(), c in element()) {
        prop_assert!(a.bruhat_leq(&a));
        if a.bruhat_leq(&b) && b.bruhat_leq(&a) {
            prop_assert_eq!(a, b);
        }
        if a.bruhat_leq(&b) {
            prop_assert!(a.length() <= b.length());
            prop_assert_eq!(a.omega(), b.omega());
            if b.bruhat_leq(&c) {
                prop_assert!(a.bruhat_leq(&c));
            }
        }
    }

    #[test]
    fn bruhat_agrees_with_deletion(a in element(), b in element()) {
        prop_assert_eq!(a.bruhat_leq(&b), b.down_set_by_deletion().contains(&a));
    }

    #[test]
    fn subwords_of_reduced_words_lie_below(w in element(), mask in any::<u16>()) {
        let word = w.reduced_word();
        let kept: Vec<Generator> = word
            .letters
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| *g)
            .collect();
        let sub = Word { letters: kept, omega: word.omega }.evaluate();
        prop_assert!(sub.bruhat_leq(&w));
    }
}

fn model() -> Model {
    Model::new(3, 2).unwrap()
}

/// Lattices with `t·L₀ ⊆ Λ ⊆ t⁻¹·L₀`, from up to four random generators.
fn lattice() -> impl Strategy<Value = ModelLattice> {
    prop::collection::vec(prop::array::uniform8(0u8..9), 0..5).prop_map(|gens| {
        let m = model();
        let mut rows: Vec<Vector> = (0..RANK).map(|c| m.basis_vector(c, 1).unwrap()).collect();
        for g in gens {
            let mut v = [0; DIM];
            for c in 0..RANK {
                v[c * DEPTH + 1] = g[2 * c];
                v[c * DEPTH + 2] = g[2 * c + 1];
            }
            rows.push(v);
        }
        m.span(&rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_generator_order(l in lattice()) {
        let m = model();
        let mut rows = l.rows().to_vec();
        rows.reverse();
        prop_assert_eq!(m.span(&rows), l);
    }

    #[test]
    fn dual_is_an_involution(l in lattice()) {
        let m = model();
        prop_assert_eq!(m.dual(&m.dual(&l)), l);
    }

    #[test]
    fn dual_reverses_inclusions_and_keeps_index(a in lattice(), b in lattice()) {
        let m = model();
        let small = m.intersect(&a, &b);
        let big = m.sum(&a, &b);
        let (ds, db) = (m.dual(&small), m.dual(&big));
        prop_assert!(m.is_sublattice(&db, &ds));
        prop_assert_eq!(m.index(&small, &big).unwrap(), m.index(&db, &ds).unwrap());
    }

    #[test]
    fn dual_turns_intersections_into_sums(a in lattice(), b in lattice()) {
        let m = model();
        prop_assert_eq!(m.dual(&m.intersect(&a, &b)), m.sum(&m.dual(&a), &m.dual(&b)));
        prop_assert_eq!(m.dual(&m.sum(&a, &b)), m.intersect(&m.dual(&a), &m.dual(&b)));
    }

    #[test]
    fn tau_commutes_with_lattice_operations(a in lattice(), b in lattice()) {
        let m = model();
        prop_assert_eq!(m.tau(&m.dual(&a)), m.dual(&m.tau(&a)));
        prop_assert_eq!(m.tau(&m.sum(&a, &b)), m.sum(&m.tau(&a), &m.tau(&b)));
        prop_assert_eq!(m.tau(&m.intersect(&a, &b)), m.intersect(&m.tau(&a), &m.tau(&b)));
    }

    #[test]
    fn export_round_trip(l in lattice()) {
        let m = model();
        let e = m.export(&l);
        prop_assert_eq!(m.import(&e).unwrap(), l.clone());
        let json = serde_json::to_string(&e).unwrap();
        prop_assert_eq!(m.import(&serde_json::from_str(&json).unwrap()).unwrap(), l);
    }
}
