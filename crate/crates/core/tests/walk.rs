mod common;

use common::{enumerated_summed, index2_subgroups, marked_family, naive_evaluate};
use fewrel::groups::{FiniteGroup, MarkedFiniteGroup};
use fewrel::walk::{lemma1_criterion, to_f64, tv_to_uniform, MixingResult, WalkChain};
use fewrel::words::{sample_reduced, ReducedWord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[test]
fn summed_law_matches_enumeration_on_small_groups() {
    for (name, g) in marked_family().into_iter().step_by(7) {
        let chain = WalkChain::build(g.clone(), None).unwrap();
        for l in 1..=5 {
            let walk = chain.summed_distribution(l).unwrap();
            let oracle = enumerated_summed(&g, l);
            for (a, b) in walk.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12, "{name} l={l}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn exact_mode_matches_enumeration() {
    let g = Arc::new(FiniteGroup::dihedral(4).unwrap())
        .mark(vec![1, 4])
        .unwrap();
    let chain = WalkChain::build(g.clone(), None).unwrap();
    for l in 1..=6 {
        let exact = to_f64(&chain.exact_summed_distribution(l).unwrap());
        let oracle = enumerated_summed(&g, l);
        for (a, b) in exact.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn evaluate_agrees_with_letterwise_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s3 = MarkedFiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
    for _ in 0..500 {
        let w: ReducedWord = sample_reduced(2, 9, &mut rng);
        assert_eq!(s3.evaluate(&w).unwrap(), naive_evaluate(&s3, &w.values()));
    }
}

#[test]
fn classification_on_family() {
    for (name, g) in marked_family() {
        let chain = WalkChain::build(g.clone(), None).unwrap();
        assert_eq!(chain.is_irreducible(), lemma1_criterion(&g), "{name}");
        if !chain.is_irreducible() {
            assert!(chain.period().is_err());
            continue;
        }
        let period = chain.period().unwrap();
        let avoiding: Vec<_> = index2_subgroups(g.group())
            .into_iter()
            .filter(|h| g.marks().iter().all(|m| !h.contains(m)))
            .collect();
        assert_eq!(period == 2, !avoiding.is_empty(), "{name}");
        if period == 2 {
            let h = chain.index2_subgroup().unwrap();
            assert!(
                avoiding.iter().any(|a| a.as_slice() == h.members()),
                "{name}"
            );
        } else {
            assert_eq!(period, 1, "{name}");
        }
    }
}

#[test]
fn period_two_targets() {
    let z4 = Arc::new(FiniteGroup::cyclic(4).unwrap())
        .mark(vec![1, 3])
        .unwrap();
    let chain = WalkChain::build(z4, None).unwrap();
    let (even, odd, h) = chain.targets().unwrap();
    assert_eq!(even, vec![0, 2]);
    assert_eq!(odd, vec![1, 3]);
    assert_eq!(h.unwrap().members(), &[0, 2]);
    let last = chain.tv_profile(60).unwrap().pop().unwrap();
    assert!(last.tv < 1e-6);
    match chain.mixing_length(1e-6, 200).unwrap() {
        MixingResult::Periodic { even, odd, .. } => {
            assert!(even.reached().is_some() && odd.reached().is_some());
        }
        other => panic!("expected periodic result, got {other:?}"),
    }
    let d = chain.summed_distribution(41).unwrap();
    assert!(tv_to_uniform(&d, &[1, 3]) < 1e-6);
    assert!(tv_to_uniform(&d, &[0, 1, 2, 3]) > 0.49);
}
