//! The non-backtracking random walk on a marked finite group.
//!
//! States are pairs `(g, a)` of a group element and the alphabet index of the
//! last letter read, flattened to `g * 2n + a`. From `(h, b)` the walk moves
//! to `(h · x_a, a)` for every `a ≠ b ^ 1`, with probability
//! `transition[b][a]`. The first state is `(x_a, a)` with probability
//! `initial[a]`. Projecting onto the group coordinate gives the law of the
//! image of a random reduced word.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::{Elem, MarkedFiniteGroup, Subgroup};

const WEIGHT_TOL: f64 = 1e-9;

/// Transition weights `α` (per predecessor letter) and initial weights `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkWeights {
    alphabet: usize,
    /// `alphabet × alphabet`, row = previous letter; the backtracking entry is 0.
    transition: Vec<f64>,
    initial: Vec<f64>,
    unbiased: bool,
}

impl WalkWeights {
    /// `α = 1/(2n-1)`, `β = 1/(2n)`: the law of a uniform reduced word.
    pub fn unbiased(rank: usize) -> Self {
        let alphabet = 2 * rank;
        let alpha = 1.0 / (alphabet - 1) as f64;
        let mut transition = vec![alpha; alphabet * alphabet];
        for b in 0..alphabet {
            transition[b * alphabet + (b ^ 1)] = 0.0;
        }
        WalkWeights {
            alphabet,
            transition,
            initial: vec![1.0 / alphabet as f64; alphabet],
            unbiased: true,
        }
    }

    /// Custom weights. Row `b` of `transition` gives the probabilities of the
    /// next letter after letter `b` (alphabet order `x_1, x_1^{-1}, x_2, …`);
    /// its backtracking entry `b ^ 1` must be 0 and every other entry
    /// positive.
    pub fn new(rank: usize, transition: &[Vec<f64>], initial: &[f64]) -> Result<Self> {
        let alphabet = 2 * rank;
        if rank < 2 {
            return Err(Error::invalid("walk needs at least 2 generators"));
        }
        if transition.len() != alphabet || transition.iter().any(|r| r.len() != alphabet) {
            return Err(Error::invalid(format!(
                "transition weights must be {alphabet}x{alphabet}"
            )));
        }
        if initial.len() != alphabet {
            return Err(Error::invalid(format!(
                "initial weights must have {alphabet} entries"
            )));
        }
        for (b, row) in transition.iter().enumerate() {
            for (a, &w) in row.iter().enumerate() {
                let ok = if a == b ^ 1 {
                    w == 0.0
                } else {
                    w > 0.0 && w.is_finite()
                };
                if !ok {
                    return Err(Error::invalid(format!(
                        "transition weight [{b}][{a}] = {w} (backtracking entries must be 0, others positive)"
                    )));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_TOL {
                return Err(Error::invalid(format!("transition row {b} sums to {sum}")));
            }
        }
        if initial.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("initial weights must be positive"));
        }
        let sum: f64 = initial.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid(format!("initial weights sum to {sum}")));
        }
        Ok(WalkWeights {
            alphabet,
            transition: transition.concat(),
            initial: initial.to_vec(),
            unbiased: false,
        })
    }

    pub fn transition(&self, prev: usize, next: usize) -> f64 {
        self.transition[prev * self.alphabet + next]
    }

    pub fn initial(&self, letter: usize) -> f64 {
        self.initial[letter]
    }

    pub fn is_unbiased(&self) -> bool {
        self.unbiased
    }

    fn exact(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let conv = |w: f64| BigRational::from_float(w).expect("finite weight");
        if self.unbiased {
            let a = self.alphabet as i64;
            let alpha = BigRational::new(BigInt::from(1), BigInt::from(a - 1));
            let transition = (0..a * a)
                .map(|i| {
                    if (i % a) as usize == ((i / a) as usize ^ 1) {
                        BigRational::zero()
                    } else {
                        alpha.clone()
                    }
                })
                .collect();
            let beta = BigRational::new(BigInt::from(1), BigInt::from(a));
            (transition, vec![beta; self.alphabet])
        } else {
            (
                self.transition.iter().map(|&w| conv(w)).collect(),
                self.initial.iter().map(|&w| conv(w)).collect(),
            )
        }
    }
}

/// Law of the walk at one step, indexed by state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    pub step: usize,
    pub mass: Vec<f64>,
    alphabet: usize,
}

impl StepDistribution {
    pub fn at(&self, g: Elem, letter: usize) -> f64 {
        self.mass[g * self.alphabet + letter]
    }

    /// Marginal on the group coordinate.
    pub fn summed(&self) -> Vec<f64> {
        self.mass
            .chunks(self.alphabet)
            .map(|c| c.iter().sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Smallest length at which a TV threshold was met, or the search bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingLength {
    Reached(usize),
    NotReached { max_l: usize },
}

impl MixingLength {
    pub fn reached(self) -> Option<usize> {
        match self {
            MixingLength::Reached(l) => Some(l),
            MixingLength::NotReached { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixingResult {
    /// Target: uniform on the whole group.
    Aperiodic(MixingLength),
    /// Even steps target uniform on `subgroup`, odd steps its complement.
    Periodic {
        subgroup: Subgroup,
        even: MixingLength,
        odd: MixingLength,
    },
}

/// One row of a TV-versus-length profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvPoint {
    pub l: usize,
    pub tv: f64,
}

/// The non-backtracking walk on a marked finite group.
#[derive(Debug, Clone)]
pub struct WalkChain {
    group: MarkedFiniteGroup,
    weights: WalkWeights,
    /// `step[g * 2n + a] = g · x_a`
    step: Vec<u32>,
}

impl WalkChain {
    /// Builds the chain; `None` selects the unbiased weights.
    pub fn build(group: MarkedFiniteGroup, weights: Option<WalkWeights>) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| WalkWeights::unbiased(group.rank()));
        if weights.alphabet != 2 * group.rank() {
            return Err(Error::invalid(format!(
                "weights are for {} letters, group has {} marks",
                weights.alphabet,
                group.rank()
            )));
        }
        let step = group.step_table();
        Ok(WalkChain {
            group,
            weights,
            step,
        })
    }

    pub fn group(&self) -> &MarkedFiniteGroup {
        &self.group
    }

    pub fn weights(&self) -> &WalkWeights {
        &self.weights
    }

    pub fn alphabet(&self) -> usize {
        2 * self.group.rank()
    }

    pub fn num_states(&self) -> usize {
        self.group.order() * self.alphabet()
    }

    pub fn state(&self, g: Elem, letter: usize) -> usize {
        g * self.alphabet() + letter
    }

    pub fn split(&self, state: usize) -> (Elem, usize) {
        (state / self.alphabet(), state % self.alphabet())
    }

    /// Successor states of `state` with their probabilities.
    pub fn successors(&self, state: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let alphabet = self.alphabet();
        let (g, prev) = self.split(state);
        (0..alphabet).filter(move |&a| a != prev ^ 1).map(move |a| {
            let h = self.step[g * alphabet + a] as usize;
            (h * alphabet + a, self.weights.transition(prev, a))
        })
    }

    /// Law at step 1.
    pub fn initial(&self) -> StepDistribution {
        let alphabet = self.alphabet();
        let mut mass = vec![0.0; self.num_states()];
        for a in 0..alphabet {
            mass[self.state(self.group.letter_image(a), a)] += self.weights.initial(a);
        }
        StepDistribution {
            step: 1,
            mass,
            alphabet,
        }
    }

    /// Law one step after `dist`.
    pub fn advance(&self, dist: &StepDistribution) -> StepDistribution {
        let alphabet = self.alphabet();
        let mut next = vec![0.0; self.num_states()];
        for (s, &p) in dist.mass.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (t, w) in self.successors(s) {
                next[t] += p * w;
            }
        }
        StepDistribution {
            step: dist.step + 1,
            mass: next,
            alphabet,
        }
    }

    /// Successive laws at steps 1, 2, 3, …
    pub fn evolution(&self) -> impl Iterator<Item = StepDistribution> + '_ {
        std::iter::successors(Some(self.initial()), move |d| Some(self.advance(d)))
    }

    pub fn distribution_at(&self, l: usize) -> Result<StepDistribution> {
        if l == 0 {
            return Err(Error::invalid("walk length must be at least 1"));
        }
        Ok(self.evolution().nth(l - 1).expect("infinite iterator"))
    }

    /// Law of the image of a length-`l` word: the summed process at `l`.
    pub fn summed_distribution(&self, l: usize) -> Result<Vec<f64>> {
        Ok(self.distribution_at(l)?.summed())
    }

    /// Exact rational law at step `l`, for `|Ω| ≤ 200` and `l ≤ 30`.
    pub fn exact_distribution_at(&self, l: usize) -> Result<Vec<BigRational>> {
        if self.num_states() > 200 {
            return Err(Error::capacity(
                "exact mode state count",
                self.num_states() as u128,
                200,
            ));
        }
        if l > 30 {
            return Err(Error::capacity("exact mode length", l as u128, 30));
        }
        if l == 0 {
            return Err(Error::invalid("walk length must be at least 1"));
        }
        let alphabet = self.alphabet();
        let (transition, initial) = self.weights.exact();
        let mut mass = vec![BigRational::zero(); self.num_states()];
        for a in 0..alphabet {
            mass[self.state(self.group.letter_image(a), a)] += &initial[a];
        }
        for _ in 1..l {
            let mut next = vec![BigRational::zero(); self.num_states()];
            for (s, p) in mass.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let (g, prev) = self.split(s);
                for a in (0..alphabet).filter(|&a| a != prev ^ 1) {
                    let t = self.state(self.step[g * alphabet + a] as usize, a);
                    next[t] += p * &transition[prev * alphabet + a];
                }
            }
            mass = next;
        }
        Ok(mass)
    }

    /// Exact summed law at step `l` (rational mode).
    pub fn exact_summed_distribution(&self, l: usize) -> Result<Vec<BigRational>> {
        let mass = self.exact_distribution_at(l)?;
        Ok(mass
            .chunks(self.alphabet())
            .map(|c| c.iter().fold(BigRational::zero(), |acc, x| acc + x))
            .collect())
    }

    fn reaches_all(&self, forward: bool) -> bool {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let reverse = (!forward).then(|| {
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
            for s in 0..n {
                for (t, _) in self.successors(s) {
                    preds[t].push(s);
                }
            }
            preds
        });
        let mut count = 1;
        while let Some(s) = queue.pop_front() {
            let next: Vec<usize> = match &reverse {
                Some(preds) => preds[s].clone(),
                None => self.successors(s).map(|(t, _)| t).collect(),
            };
            for t in next {
                if !seen[t] {
                    seen[t] = true;
                    count += 1;
                    queue.push_back(t);
                }
            }
        }
        count == n
    }

    /// Whether the state digraph is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        self.reaches_all(true) && self.reaches_all(false)
    }

    /// Period of an irreducible chain: the gcd over all edges `(u, v)` of
    /// `level(u) + 1 - level(v)`, for breadth-first levels from state 0.
    pub fn period(&self) -> Result<usize> {
        if !self.is_irreducible() {
            return Err(Error::precondition(
                "period is defined only for irreducible chains",
            ));
        }
        let n = self.num_states();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            for (t, _) in self.successors(s) {
                if level[t] == usize::MAX {
                    level[t] = level[s] + 1;
                    queue.push_back(t);
                }
            }
        }
        let mut g = 0usize;
        for s in 0..n {
            for (t, _) in self.successors(s) {
                g = gcd(g, (level[s] + 1).abs_diff(level[t]));
            }
        }
        Ok(g)
    }

    /// The unique index-2 subgroup containing no mark, for period-2 chains.
    pub fn index2_subgroup(&self) -> Result<Subgroup> {
        let period = self.period()?;
        if period != 2 {
            return Err(Error::precondition(format!(
                "chain has period {period}, not 2"
            )));
        }
        let h = self.group.even_subgroup();
        if 2 * h.order() != self.group.order() {
            return Err(Error::Structure(format!(
                "even subgroup has order {} in a group of order {}",
                h.order(),
                self.group.order()
            )));
        }
        if let Some(m) = self.group.marks().iter().find(|&&m| h.contains(m)) {
            return Err(Error::Structure(format!(
                "mark {m} lies in the even subgroup"
            )));
        }
        Ok(h)
    }

    /// Limit supports for even and odd `l`: both the whole group when
    /// aperiodic; `H` and `G ∖ H` when the period is 2.
    pub fn targets(&self) -> Result<(Vec<Elem>, Vec<Elem>, Option<Subgroup>)> {
        match self.period()? {
            1 => {
                let all: Vec<Elem> = (0..self.group.order()).collect();
                Ok((all.clone(), all, None))
            }
            _ => {
                let h = self.index2_subgroup()?;
                let odd = h.complement(self.group.order());
                Ok((h.members().to_vec(), odd, Some(h)))
            }
        }
    }

    /// TV distance from the summed law at `l = 1..=max_l` to its limit.
    pub fn tv_profile(&self, max_l: usize) -> Result<Vec<TvPoint>> {
        let (even, odd, _) = self.targets()?;
        Ok(self
            .evolution()
            .take(max_l)
            .map(|d| {
                let support = if d.step % 2 == 0 { &even } else { &odd };
                TvPoint {
                    l: d.step,
                    tv: tv_to_uniform(&d.summed(), support),
                }
            })
            .collect())
    }

    /// Smallest `l ≤ max_l` (per parity when the period is 2) at which the
    /// summed law is within `tol` of its uniform limit in TV distance.
    pub fn mixing_length(&self, tol: f64, max_l: usize) -> Result<MixingResult> {
        let (_, _, h) = self.targets()?;
        let profile = self.tv_profile(max_l)?;
        let first = |parity: Option<usize>| {
            profile
                .iter()
                .find(|p| parity.is_none_or(|r| p.l % 2 == r) && p.tv <= tol)
                .map_or(MixingLength::NotReached { max_l }, |p| {
                    MixingLength::Reached(p.l)
                })
        };
        Ok(match h {
            None => MixingResult::Aperiodic(first(None)),
            Some(subgroup) => MixingResult::Periodic {
                subgroup,
                even: first(Some(0)),
                odd: first(Some(1)),
            },
        })
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The walk is irreducible iff the marks generate the group. For a finite
/// nontrivial group the "not freely generated" half is automatic.
pub fn lemma1_criterion(group: &MarkedFiniteGroup) -> bool {
    group.marks_generate()
}

/// `½ Σ_{s ∈ support} |p(s) − 1/|support|| + ½ Σ_{s ∉ support} p(s)`.
///
/// # Panics
/// If `support` is empty.
pub fn tv_to_uniform(dist: &[f64], support: &[Elem]) -> f64 {
    assert!(!support.is_empty(), "TV target support must be nonempty");
    let u = 1.0 / support.len() as f64;
    let mut in_support = vec![false; dist.len()];
    for &s in support {
        in_support[s] = true;
    }
    0.5 * dist
        .iter()
        .zip(&in_support)
        .map(|(&p, &inside)| if inside { (p - u).abs() } else { p })
        .sum::<f64>()
}

/// Converts an exact law to floats.
pub fn to_f64(exact: &[BigRational]) -> Vec<f64> {
    exact
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect()
}
