mod common;

use fewrel::experiments::{
    estimate_surjection_probability, exact_surjection_probability, trial_rng, ExtensionWalk,
};
use fewrel::groups::GroupSpec;
use fewrel::words::sample_reduced;
use fewrel::SchreierSystem;

fn system(spec: &str, f: Vec<usize>, q: u32) -> SchreierSystem {
    let j = spec
        .parse::<GroupSpec>()
        .unwrap()
        .build()
        .unwrap()
        .mark(f)
        .unwrap();
    SchreierSystem::build(j, q).unwrap()
}

#[test]
fn estimates_agree_with_exact_values() {
    // (J, f, q, l, rho)
    let cases = [
        ("trivial", vec![0, 0], 3, 10, 2),
        ("trivial", vec![0, 0], 2, 7, 3),
        ("cyclic:2", vec![1, 0], 3, 8, 2),
        ("cyclic:2", vec![1, 1], 3, 8, 2),
        ("cyclic:2", vec![1, 1], 3, 7, 2),
        ("cyclic:3", vec![1, 0], 5, 9, 2),
        ("cyclic:2", vec![1, 0], 5, 12, 2),
    ];
    for (i, (spec, f, q, l, rho)) in cases.into_iter().enumerate() {
        let sys = system(spec, f.clone(), q);
        let exact = exact_surjection_probability(&sys, l, rho).unwrap();
        let est = estimate_surjection_probability(&sys, l, rho, 20_000, 3, i as u64);
        assert!(
            (est.estimate - exact).abs() <= est.half_width + 1e-9,
            "{spec} {f:?} q={q} l={l} rho={rho}: estimate {} ± {} vs exact {exact}",
            est.estimate,
            est.half_width
        );
    }
}

#[test]
fn estimates_are_reproducible() {
    let sys = system("symmetric:3", vec![1, 3], 7);
    let a = estimate_surjection_probability(&sys, 10, 3, 3000, 99, 0);
    let b = estimate_surjection_probability(&sys, 10, 3, 3000, 99, 0);
    assert_eq!(a, b);
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
}

#[test]
fn kernel_frequency_matches_fiber_mass() {
    for (spec, f, q, l) in [
        ("cyclic:2", vec![1, 0], 3, 5),
        ("cyclic:3", vec![1, 0], 5, 6),
        ("cyclic:2", vec![1, 1], 3, 8),
    ] {
        let sys = system(spec, f, q);
        let walk = ExtensionWalk::new(&sys).unwrap();
        let mass = walk.fiber_mass(&walk.chain().summed_distribution(l).unwrap());
        let draws = 50_000u64;
        let hits = (0..draws)
            .filter(|&t| {
                let mut rng = trial_rng(17, 0, t);
                let w = sample_reduced(sys.rank(), l, &mut rng);
                sys.crossed_evaluate(&w).unwrap().jpart == 0
            })
            .count();
        let freq = hits as f64 / draws as f64;
        let se = (mass * (1.0 - mass) / draws as f64).sqrt();
        assert!(
            (freq - mass).abs() <= 3.0 * se,
            "{spec} l={l}: {freq} vs {mass}"
        );
    }
}

#[test]
fn sweeps_respect_bound_after_mixing() {
    use fewrel::config::ExperimentConfig;
    use fewrel::experiments::sweep;
    let configs = [
        "n = 2\nl = 2..30 step 2\nrho = 2\nj = cyclic:2\nf = 1 1\nq = 3\ntrials = 5000\nseed = 1\n",
        "n = 2\nl = 4..40 step 4\nrho = 2\nj = cyclic:2\nf = 1 0\nq = 5\ntrials = 5000\nseed = 1\n",
        "n = 2\nl = 5..40 step 5\nrho = 2\nj = cyclic:3\nf = 1 0\nq = 5\ntrials = 5000\nseed = 1\n",
    ];
    for text in configs {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let report = sweep(&cfg).unwrap();
        let mixed = report.mixing_length.expect("mixes within the sweep");
        for row in report.rows.iter().filter(|r| r.l >= mixed) {
            assert!(
                row.estimate <= row.bound + row.ci,
                "{} at l = {}: {row:?}",
                cfg.j,
                row.l
            );
            assert!(row.lemma_bound <= row.bound);
        }
    }
}
