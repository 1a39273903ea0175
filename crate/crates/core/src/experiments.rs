//! Surjection probabilities for few-relator random presentations.
//!
//! The event of interest, for a fixed `f: F → J` and prime `q`: every relator
//! lies in `K = ker f`, and their images fail to generate `K' = H_1(K; F_q)`
//! as an `F_q[J]`-module. Because `K'` is semisimple this is the event that
//! the presented group surjects, compatibly with `f`, onto some extension of
//! `J` by an irreducible `F_q[J]`-module.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::groups::{Elem, MarkedFiniteGroup};
use crate::schreier::SchreierSystem;
use crate::walk::{MixingResult, StepDistribution, WalkChain};
use crate::words::{sample_indices, sample_reduced, ReducedWord};

/// Exact tuple enumeration stops above this many tuples.
pub const EXACT_TUPLE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(l: usize) -> Self {
        if l.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub l: usize,
    pub estimate: f64,
    /// 95% normal-approximation half-width `1.96 √(p̂(1−p̂)/trials)`.
    pub half_width: f64,
    pub trials: usize,
    pub events: usize,
    pub parity: Parity,
}

impl EstimateResult {
    fn from_counts(l: usize, events: usize, trials: usize) -> Self {
        let p = events as f64 / trials as f64;
        EstimateResult {
            l,
            estimate: p,
            half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            events,
            parity: Parity::of(l),
        }
    }
}

/// Random stream for one trial: the key is `(seed, stream)`, the ChaCha
/// nonce is the trial index, so trials are independent of evaluation order.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// `rho` independent uniform draws from `S_l`, repetitions allowed.
pub fn sample_presentation<R: Rng + ?Sized>(
    n: usize,
    l: usize,
    rho: usize,
    rng: &mut R,
) -> Vec<ReducedWord> {
    (0..rho).map(|_| sample_reduced(n, l, rng)).collect()
}

fn trial_event(
    sys: &SchreierSystem,
    l: usize,
    rho: usize,
    rng: &mut ChaCha8Rng,
    buf: &mut Vec<usize>,
) -> bool {
    let mut vectors = Vec::with_capacity(rho);
    for _ in 0..rho {
        buf.clear();
        sample_indices(sys.rank(), l, rng, |a| buf.push(a));
        let (v, jpart) = sys.crossed_indices(buf.iter().copied());
        if jpart != 0 {
            return false;
        }
        vectors.push(v);
    }
    !sys.generates_residues(&vectors)
}

fn count_events(trials: usize, event: impl Fn(u64) -> bool + Sync + Send) -> usize {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials as u64)
            .into_par_iter()
            .filter(|&t| event(t))
            .count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials as u64).filter(|&t| event(t)).count()
    }
}

/// Monte Carlo estimate of P(all relators lie in K and fail to generate K').
/// `stream` separates independent experiments sharing a master seed.
pub fn estimate_surjection_probability(
    sys: &SchreierSystem,
    l: usize,
    rho: usize,
    trials: usize,
    seed: u64,
    stream: u64,
) -> EstimateResult {
    assert!(trials > 0, "at least one trial is required");
    let events = count_events(trials, |t| {
        let mut rng = trial_rng(seed, stream, t);
        trial_event(sys, l, rho, &mut rng, &mut Vec::with_capacity(l))
    });
    EstimateResult::from_counts(l, events, trials)
}

/// The walk on the finite quotient `K' ⋊ J` through which relators are
/// evaluated.
#[derive(Debug, Clone)]
pub struct ExtensionWalk<'a> {
    sys: &'a SchreierSystem,
    chain: WalkChain,
    period: usize,
}

impl<'a> ExtensionWalk<'a> {
    pub fn new(sys: &'a SchreierSystem) -> Result<Self> {
        let chain = WalkChain::build(sys.build_split_extension()?, None)?;
        let period = chain.period()?;
        Ok(ExtensionWalk { sys, chain, period })
    }

    pub fn chain(&self) -> &WalkChain {
        &self.chain
    }

    pub fn group(&self) -> &MarkedFiniteGroup {
        self.chain.group()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Elements `(v, identity)`: the fiber over the identity of `J`, i.e. `K'`.
    pub fn fiber(&self) -> Vec<Elem> {
        let j = self.sys.j().order();
        (0..self.group().order()).step_by(j).collect()
    }

    /// Probability that a length-`l` relator lies in `K`.
    pub fn fiber_mass(&self, summed: &[f64]) -> f64 {
        self.fiber().iter().map(|&h| summed[h]).sum()
    }

    /// The smallest `ε ≥ 0` for which, at this step, both
    /// `|P(h | B) − 1/|B|| ≤ ε/|B|` for every `h` in the fiber `B`, and
    /// `P(B) ≤ (1 + ε) r/|J|` where `r` is 1 for aperiodic walks and 2 at
    /// even steps of period-2 walks. `None` when the fiber has zero mass.
    pub fn epsilon(&self, dist: &StepDistribution) -> Option<f64> {
        let summed = dist.summed();
        let fiber = self.fiber();
        let mass = self.fiber_mass(&summed);
        if mass <= 0.0 {
            return None;
        }
        let b = fiber.len() as f64;
        let deviation = fiber
            .iter()
            .map(|&h| (summed[h] / mass - 1.0 / b).abs() * b)
            .fold(0.0, f64::max);
        let r = if self.period == 2 { 2.0 } else { 1.0 };
        let excess = mass * self.sys.j().order() as f64 / r - 1.0;
        Some(deviation.max(excess).max(0.0))
    }

    /// Exact event probability from the law at one step.
    pub fn exact_from(&self, dist: &StepDistribution, rho: usize) -> Result<f64> {
        let summed = dist.summed();
        let support: Vec<(Vec<u32>, f64)> = self
            .fiber()
            .into_iter()
            .filter(|&h| summed[h] > 0.0)
            .map(|h| {
                (
                    self.group().group().affine_parts(h).expect("affine").0,
                    summed[h],
                )
            })
            .collect();
        let space = (self.sys.modulus().get() as u128).checked_pow(self.sys.dimension() as u32);
        let tuples = space.and_then(|s| s.checked_pow(rho as u32));
        if tuples.is_none_or(|t| t > EXACT_TUPLE_LIMIT) {
            return Err(Error::capacity(
                "exact tuple enumeration",
                tuples.unwrap_or(u128::MAX),
                EXACT_TUPLE_LIMIT,
            ));
        }
        if rho == 0 {
            return Ok(1.0);
        }
        let mut total = 0.0;
        let mut idx = vec![0usize; rho];
        let mut vectors: Vec<Vec<u32>> = Vec::with_capacity(rho);
        if support.is_empty() {
            return Ok(0.0);
        }
        loop {
            vectors.clear();
            let mut p = 1.0;
            for &i in &idx {
                vectors.push(support[i].0.clone());
                p *= support[i].1;
            }
            if !self.sys.generates_residues(&vectors) {
                total += p;
            }
            let mut pos = rho;
            while pos > 0 && idx[pos - 1] == support.len() - 1 {
                idx[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
        }
        Ok(total)
    }
}

/// Exact event probability at length `l`: sum over `rho`-tuples of fiber
/// elements of the product of their walk probabilities, restricted to tuples
/// that fail to generate.
pub fn exact_surjection_probability(sys: &SchreierSystem, l: usize, rho: usize) -> Result<f64> {
    let walk = ExtensionWalk::new(sys)?;
    let dist = walk.chain().distribution_at(l)?;
    walk.exact_from(&dist, rho)
}

/// Upper bound on the probability of a surjection onto `E ⋊ J` carrying `f`
/// for one irreducible module `E`. `stated` selects the factor
/// `(2 + 2ε)/|J|`, otherwise the aperiodic factor `(1 + ε)/|J|`.
///
/// For `ε ≥ 1` the per-element lower bound `(1 − ε)/|B|` is vacuous and is
/// taken as 0.
pub fn lemma_bound(epsilon: f64, m: u32, e_size: u64, j_size: usize, stated: bool) -> f64 {
    let product: f64 = (1..=m)
        .map(|j| 1.0 - (e_size as f64).powi(-(j as i32)))
        .product();
    let first = 1.0 - (1.0 - epsilon).max(0.0).powi(m as i32) * product;
    let numerator = if stated {
        2.0 + 2.0 * epsilon
    } else {
        1.0 + epsilon
    };
    first * (numerator / j_size as f64).powi(m as i32)
}

/// `|J| (1 − 2^{-m} ∏_{j=1}^m (1 − q^{-j})) (3/|J|)^m`, the bound summed
/// over the at most `|J|` irreducible modules with `ε = 1/2`.
pub fn proposition_bound(m: u32, q: u64, j_size: usize) -> f64 {
    let product: f64 = (1..=m)
        .map(|j| 1.0 - (q as f64).powi(-(j as i32)))
        .product();
    j_size as f64 * (1.0 - product / 2f64.powi(m as i32)) * (3.0 / j_size as f64).powi(m as i32)
}

/// Upper bound `M·n` on the number of relators sufficient for index-`M`
/// kernels.
pub fn c_of_m(m: usize, n: usize) -> usize {
    m * n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: usize,
    pub rho: usize,
    pub q: u32,
    pub estimate: f64,
    pub ci: f64,
    pub exact: Option<f64>,
    /// `None` when the fiber is empty at this length (the event is impossible).
    pub epsilon: Option<f64>,
    /// `lemma_bound` for a single irreducible `E` with `|E| = q`.
    pub lemma_bound: f64,
    /// `|J| · lemma_bound`: covers all (at most `|J|`) irreducibles at once,
    /// which is what the full-module event needs.
    pub bound: f64,
    pub fiber_mass: f64,
    pub parity: Parity,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub dimension: usize,
    pub min_generators: crate::schreier::MinGenerators,
    pub m: usize,
    pub period: usize,
    /// First length at which the walk on `K' ⋊ J` is within
    /// [`SWEEP_MIXING_TOL`] of its target (even steps if periodic).
    pub mixing_length: Option<usize>,
    pub rows: Vec<SweepRow>,
}

/// TV tolerance used for the mixing length reported by [`sweep`].
pub const SWEEP_MIXING_TOL: f64 = 0.1;

impl SweepReport {
    pub const CSV_HEADER: &'static str = "l,rho,q,estimate,ci,exact,bound,parity";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let exact = r.exact.map_or(String::new(), |x| format!("{x:.10}"));
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{},{:.6},{}\n",
                r.l,
                r.rho,
                r.q,
                r.estimate,
                r.ci,
                exact,
                r.bound,
                r.parity.as_str()
            ));
        }
        out
    }
}

/// One estimate per length in the config, each with the exact value when the
/// enumeration is feasible and the module-generation bounds at the measured `ε(l)`.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let sys = cfg.system()?;
    let min_generators = sys.min_module_generators();
    let m = min_generators.upper;
    let walk = ExtensionWalk::new(&sys)?;
    let max_l = *cfg.lengths.iter().max().expect("nonempty lengths");
    let wanted: std::collections::BTreeSet<usize> = cfg.lengths.iter().copied().collect();
    let mut by_length = std::collections::BTreeMap::new();
    for dist in walk.chain().evolution().take(max_l) {
        if !wanted.contains(&dist.step) {
            continue;
        }
        let l = dist.step;
        let estimate =
            estimate_surjection_probability(&sys, l, cfg.rho, cfg.trials, cfg.seed, l as u64);
        let exact = match walk.exact_from(&dist, cfg.rho) {
            Ok(x) => Some(x),
            Err(Error::Capacity { .. }) => None,
            Err(e) => return Err(e),
        };
        let epsilon = walk.epsilon(&dist);
        let single = epsilon.map_or(0.0, |eps| {
            lemma_bound(eps, m as u32, cfg.q as u64, sys.j().order(), true)
        });
        by_length.insert(
            l,
            SweepRow {
                l,
                rho: cfg.rho,
                q: cfg.q,
                estimate: estimate.estimate,
                ci: estimate.half_width,
                exact,
                epsilon,
                lemma_bound: single,
                bound: single * sys.j().order() as f64,
                fiber_mass: walk.fiber_mass(&dist.summed()),
                parity: Parity::of(l),
            },
        );
    }
    let mixing_length = match walk.chain().mixing_length(SWEEP_MIXING_TOL, max_l)? {
        MixingResult::Aperiodic(len) => len.reached(),
        MixingResult::Periodic { even, .. } => even.reached(),
    };
    Ok(SweepReport {
        dimension: sys.dimension(),
        min_generators,
        m,
        period: walk.period(),
        mixing_length,
        rows: cfg.lengths.iter().map(|l| by_length[l].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqlin::generation_probability;
    use crate::groups::GroupSpec;

    fn system(spec: &str, f: Vec<Elem>, q: u32) -> SchreierSystem {
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
    fn presentations() {
        let mut rng = trial_rng(1, 0, 0);
        assert!(sample_presentation(2, 5, 0, &mut rng).is_empty());
        let p = sample_presentation(3, 7, 4, &mut rng);
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|w| w.len() == 7));
        // two length-1 relators coincide with probability 1/4
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|&t| {
                let mut rng = trial_rng(5, 0, t);
                let p = sample_presentation(2, 1, 2, &mut rng);
                p[0] == p[1]
            })
            .count();
        let rate = hits as f64 / trials as f64;
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((rate - 0.25).abs() < 4.0 * se, "collision rate {rate}");
    }

    #[test]
    fn trivial_cases() {
        let s = system("trivial", vec![0, 0], 3);
        let r = estimate_surjection_probability(&s, 7, 0, 50, 1, 0);
        assert_eq!(r.estimate, 1.0);
        let odd = system("cyclic:2", vec![1, 1], 3);
        let r = estimate_surjection_probability(&odd, 9, 2, 2000, 1, 0);
        assert_eq!(r.events, 0);
        assert_eq!(exact_surjection_probability(&odd, 9, 2).unwrap(), 0.0);
    }

    #[test]
    fn exact_examples() {
        let t2 = system("trivial", vec![0, 0], 2);
        assert!((exact_surjection_probability(&t2, 2, 1).unwrap() - 1.0).abs() < 1e-12);
        let z2 = system("cyclic:2", vec![1, 0], 3);
        let walk = ExtensionWalk::new(&z2).unwrap();
        for l in [1, 4, 7] {
            let dist = walk.chain().distribution_at(l).unwrap();
            let mass = walk.fiber_mass(&dist.summed());
            assert!((walk.exact_from(&dist, 1).unwrap() - mass).abs() < 1e-12);
        }
        // limit value 1 − 16/27 for trivial J
        let t3 = system("trivial", vec![0, 0], 3);
        let exact = exact_surjection_probability(&t3, 40, 2).unwrap();
        assert!((exact - (1.0 - generation_probability(3, 2, 2))).abs() < 1e-6);
    }

    #[test]
    fn exact_respects_cap() {
        let s = system("cyclic:2", vec![1, 0], 5);
        assert!(matches!(
            exact_surjection_probability(&s, 6, 4),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn bounds() {
        for m in 1..5 {
            for q in [5u64, 7, 11] {
                for j in [2usize, 3, 6] {
                    let lhs = proposition_bound(m, q, j);
                    let rhs = j as f64 * lemma_bound(0.5, m, q, j, true);
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
        assert!((lemma_bound(0.0, 1, 2, 2, true) - 0.5).abs() < 1e-15);
        assert_eq!(lemma_bound(3.0, 2, 5, 2, true), 16.0);
        assert!(lemma_bound(0.2, 2, 5, 2, false) < lemma_bound(0.2, 2, 5, 2, true));
        let eps = 0.1;
        let far = lemma_bound(eps, 3, 1 << 40, 2, true) / (2.0f64 + 2.0 * eps).powi(3) * 8.0;
        assert!((far - (1.0 - (1.0 - eps).powi(3))).abs() < 1e-9);
        assert_eq!(c_of_m(1, 2), 2);
        assert_eq!(c_of_m(2, 2), 4);
        assert_eq!(c_of_m(6, 3), 18);
    }

    #[test]
    fn determinism() {
        let s = system("cyclic:3", vec![1, 0], 5);
        let a = estimate_surjection_probability(&s, 12, 2, 500, 42, 3);
        let b = estimate_surjection_probability(&s, 12, 2, 500, 42, 3);
        assert_eq!(a, b);
        let c = estimate_surjection_probability(&s, 12, 2, 500, 43, 3);
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn epsilon_is_zero_in_exact_uniform_case() {
        // Z/2 with marks (1,1) at even l: fiber is K', measured ε finite.
        let s = system("cyclic:2", vec![1, 1], 3);
        let walk = ExtensionWalk::new(&s).unwrap();
        assert_eq!(walk.period(), 2);
        let odd = walk.chain().distribution_at(5).unwrap();
        assert_eq!(walk.epsilon(&odd), None);
        let late = walk.chain().distribution_at(80).unwrap();
        let eps = walk.epsilon(&late).unwrap();
        assert!(eps < 1e-6, "eps = {eps}");
    }

    #[test]
    fn sweep_rows() {
        let cfg = ExperimentConfig::parse(
            "n = 2\nl = 3..6\nrho = 2\nj = cyclic:2\nf = 1 1\nq = 3\ntrials = 2000\nseed = 4\n",
        )
        .unwrap();
        let report = sweep(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.period, 2);
        for row in &report.rows {
            if row.parity == Parity::Odd {
                assert_eq!(row.estimate, 0.0);
                assert_eq!(row.exact, Some(0.0));
            }
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("l,rho,q,estimate,ci,exact,bound,parity\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
