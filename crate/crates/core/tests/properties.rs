use proptest::prelude::*;

use idealc::classifier::{
    classify, classify_with, replay, Attr, ExprSeq, IdealExpr, RuleId, RuleSet,
};
use idealc::egorovlab::IntervalSet;
use idealc::ground::{decode_binseq, encode_binseq, FiniteSet, SetDescription as D, Space};
use idealc::ideals::Tri;
use idealc::pathology::{hull, Family};
use idealc::rational::{format_rational, parse_rational, rat, ExtRational};
use idealc::submeasures::{maximal_count, Submeasure, WeightRule};

fn leaf() -> impl Strategy<Value = IdealExpr> {
    prop_oneof![
        Just(IdealExpr::Fin),
        (1u32..5).prop_map(IdealExpr::FinPow),
        Just(IdealExpr::FinSets),
        Just(IdealExpr::Summable(WeightRule::Harmonic)),
        Just(IdealExpr::Density),
        Just(IdealExpr::Ib),
        Just(IdealExpr::EdFin),
        Just(IdealExpr::Mazur),
        Just(IdealExpr::Solecki),
        Just(IdealExpr::Bi),
        Just(IdealExpr::Cei),
        Just(IdealExpr::Trivial),
        Just(IdealExpr::JFam(D::Residues(2, vec![0]))),
    ]
}

fn expr() -> impl Strategy<Value = IdealExpr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        let seq = (prop::collection::vec(inner.clone(), 0..3), inner.clone()).prop_map(|(prefix, tail)| {
            ExprSeq {
                prefix,
                tail: Box::new(tail),
            }
        });
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IdealExpr::direct_sum(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IdealExpr::fubini(a, b)),
            inner.clone().prop_map(IdealExpr::full_pad),
            inner.clone().prop_map(IdealExpr::col_ext),
            inner.clone().prop_map(IdealExpr::row_ext),
            seq.clone().prop_map(IdealExpr::IndexedSum),
            (prop_oneof![Just(IdealExpr::Fin), Just(IdealExpr::Ib)], seq)
                .prop_map(|(j, s)| IdealExpr::IndexedSumOver(Box::new(j), s)),
            prop::collection::vec(inner.clone(), 1..4).prop_map(IdealExpr::Meet),
            (inner, prop_oneof![Just(D::Full), Just(D::Column(0))])
                .prop_map(|(e, d)| IdealExpr::Restrict(Box::new(e), d)),
        ]
    })
}

fn optional_rules() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), RuleId::ALL.len())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn expressions_roundtrip(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(IdealExpr::parse(&text).unwrap(), e);
    }

    #[test]
    fn derivations_replay(e in expr()) {
        let c = classify(&e);
        prop_assert!(c.conflicts.is_empty(), "{:?}", c.conflicts);
        replay(&c.derivation).unwrap();
        prop_assert_eq!(classify(&e), c);
    }

    #[test]
    fn iterations_are_bounded(e in expr()) {
        let c = classify(&e);
        prop_assert!(c.iterations <= e.depth() * RuleId::ALL.len(), "{} passes", c.iterations);
    }

    #[test]
    fn rule_subsets_never_flip(e in expr(), keep in optional_rules()) {
        let subset = RuleSet::only(RuleId::ALL.iter().zip(&keep).filter(|(_, k)| **k).map(|(r, _)| *r));
        let full = classify(&e);
        let part = classify_with(&e, &subset);
        for attr in Attr::ALL {
            let (p, f) = (part.attributes.get(attr).value, full.attributes.get(attr).value);
            prop_assert!(p == Tri::Unknown || p == f, "{attr:?}: subset {p}, full {f}");
        }
        replay(&part.derivation).unwrap();
    }

    #[test]
    fn antichain_count_matches_pairs(codes in prop::collection::btree_set(0u64..63, 0..10)) {
        let codes: Vec<u64> = codes.into_iter().collect();
        let words: Vec<Vec<u8>> = codes.iter().map(|&c| decode_binseq(c)).collect();
        let k = words.len();
        let mut best = 0;
        for mask in 0u32..1 << k {
            let chosen: Vec<&Vec<u8>> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &words[i]).collect();
            let anti = chosen.iter().enumerate().all(|(i, a)| {
                chosen.iter().enumerate().all(|(j, b)| i == j || !b.starts_with(a))
            });
            if anti {
                best = best.max(chosen.len());
            }
        }
        prop_assert_eq!(maximal_count(&codes), best);
    }

    #[test]
    fn submeasures_are_monotone_and_subadditive(
        a in prop::collection::btree_set(0u64..40, 0..8),
        b in prop::collection::btree_set(0u64..40, 0..8),
        which in 0usize..4,
    ) {
        let phi = [
            Submeasure::counting(Space::Omega),
            Submeasure::summable(WeightRule::Harmonic),
            Submeasure::antichain(),
            Submeasure::edfin(),
        ][which].clone();
        let a: Vec<u64> = a.into_iter().collect();
        let b: Vec<u64> = b.into_iter().collect();
        let mut ab: Vec<u64> = a.iter().chain(&b).copied().collect();
        ab.sort_unstable();
        ab.dedup();
        let (va, vb, vab) = (phi.eval_codes(&a), phi.eval_codes(&b), phi.eval_codes(&ab));
        prop_assert!(va <= vab && vb <= vab);
        let sum = match (va, vb) {
            (ExtRational::Finite(x), ExtRational::Finite(y)) => ExtRational::Finite(x + y),
            _ => ExtRational::Infinity,
        };
        prop_assert!(vab <= sum);
    }

    #[test]
    fn hull_is_dominated(mask in 1u64..64) {
        let phi = Submeasure::antichain();
        let ground = FiniteSet::prefix(Space::BinarySeq, 6).unwrap();
        let a = ground.subset_by_mask(mask);
        let r = hull(&phi, &ground, &a, Family::Exhaustive).unwrap();
        prop_assert!(ExtRational::Finite(r.hull_value.clone()) <= r.phi_value);
        prop_assert!(r.feasible);
    }

    #[test]
    fn binseq_codes_roundtrip(word in prop::collection::vec(0u8..2, 0..40)) {
        prop_assert_eq!(decode_binseq(encode_binseq(&word)), word);
    }

    #[test]
    fn rationals_roundtrip(p in -1000i64..1000, q in 1i64..1000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)), Some(x));
    }

    #[test]
    fn interval_sets_roundtrip(cells in prop::collection::btree_set(0u64..32, 0..32)) {
        let cells: Vec<u64> = cells.into_iter().collect();
        let m = IntervalSet::from_cells(32, &cells).unwrap();
        prop_assert_eq!(m.measure(), rat(cells.len() as i64, 32));
        let again: IntervalSet = m.to_string().parse().unwrap();
        prop_assert_eq!(&again, &m);
        let halves = m.overlap(&rat(0, 1), &rat(1, 2)) + m.overlap(&rat(1, 2), &rat(1, 1));
        prop_assert_eq!(halves, m.measure());
    }
}
