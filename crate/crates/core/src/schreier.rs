//! Schreier rewriting for the kernel `K` of a surjection `f: F(X) → J`.
//!
//! Cosets of `K` are the elements of `J`. A breadth-first transversal gives a
//! free basis of `K` (the non-tree Schreier generators), so `K' = H_1(K; F_q)`
//! is `F_q^D` with `D = 1 + |J|(n − 1)`, and `J` acts on it by conjugation
//! through the transversal.
//!
//! Words are mapped into the split extension `K' ⋊ J` by a crossed
//! homomorphism `v` with `v(uw) = v(u) + f(u)·v(w)`. Plain Schreier rewriting
//! `ρ` satisfies this only up to the transversal cocycle
//! `c(a, b) = ρ(t_a t_b t_{ab}^{-1})`; since `|J|` is invertible mod q the
//! cocycle is the coboundary of `ψ(a) = |J|^{-1} Σ_b c(a, b)`, and
//! `v(w) = ρ(w) + ψ(f(w))`. On `K` itself `ψ` vanishes and `v = ρ`.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqlin::{closure_basis, FqMatrix, FqVector, Modulus};
use crate::groups::{Elem, FiniteGroup, MarkedFiniteGroup};
use crate::words::{Letter, ReducedWord};
use crate::DEFAULT_GROUP_CAP;

/// Exhaustive generator searches stop above this many tuples.
const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// Image of a word in `K' ⋊ J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossedImage {
    pub vector: FqVector,
    pub jpart: Elem,
}

/// Bounds on the minimal number of generators of `K'` as an `F_q[J]`-module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinGenerators {
    pub lower: usize,
    pub upper: usize,
}

impl MinGenerators {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone)]
pub struct SchreierSystem {
    j: MarkedFiniteGroup,
    q: Modulus,
    /// Coset representative of every element of `J`.
    transversal: Vec<ReducedWord>,
    /// `column[c * n + i]`: basis index of the generator `t_c x_i t_{c x_i}^{-1}`,
    /// `None` on tree edges.
    column: Vec<Option<usize>>,
    /// `(coset, generator)` for each basis index.
    generators: Vec<(Elem, usize)>,
    /// `J`-step table: `step[c * 2n + a] = c · f(x_a)`.
    step: Vec<u32>,
    action: Vec<FqMatrix>,
    correction: Vec<Vec<u32>>,
}

impl SchreierSystem {
    /// `j` is the finite quotient with marks `f(x_1) … f(x_n)`.
    pub fn build(j: MarkedFiniteGroup, q: u32) -> Result<Self> {
        let q = Modulus::new(q)?;
        if !j.marks_generate() {
            return Err(Error::invalid(format!(
                "f-images {:?} do not generate J (they generate a subgroup of order {})",
                j.marks(),
                j.generated().order()
            )));
        }
        if q.get() as usize <= j.order() {
            return Err(Error::precondition(format!(
                "q must exceed |J|: q = {}, |J| = {}",
                q.get(),
                j.order()
            )));
        }
        let n = j.rank();
        let order = j.order();
        let alphabet = 2 * n;
        let step = j.step_table();

        // Breadth-first transversal, letters in alphabet order.
        let mut parent: Vec<Option<(Elem, usize)>> = vec![None; order];
        let mut seen = vec![false; order];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut words: Vec<Vec<usize>> = vec![Vec::new(); order];
        while let Some(c) = queue.pop_front() {
            for a in 0..alphabet {
                let d = step[c * alphabet + a] as usize;
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = Some((c, a));
                    let mut w = words[c].clone();
                    w.push(a);
                    words[d] = w;
                    queue.push_back(d);
                }
            }
        }
        let transversal: Vec<ReducedWord> = words
            .into_iter()
            .map(|w| ReducedWord::from_reduced_indices(w, n))
            .collect();

        let mut tree = vec![false; order * n];
        for (d, p) in parent.iter().enumerate() {
            if let Some((c, a)) = *p {
                // positive letter: edge c --x_i--> d; negative: d --x_i--> c
                let coset = if a % 2 == 0 { c } else { d };
                tree[coset * n + a / 2] = true;
            }
        }
        let mut column = vec![None; order * n];
        let mut generators = Vec::new();
        for c in 0..order {
            for i in 0..n {
                if !tree[c * n + i] {
                    column[c * n + i] = Some(generators.len());
                    generators.push((c, i));
                }
            }
        }
        let expected = 1 + order * (n - 1);
        if generators.len() != expected {
            return Err(Error::Structure(format!(
                "found {} Schreier generators, expected {expected}",
                generators.len()
            )));
        }

        let mut system = SchreierSystem {
            j,
            q,
            transversal,
            column,
            generators,
            step,
            action: Vec::new(),
            correction: Vec::new(),
        };
        system.action = (0..order).map(|g| system.conjugation_matrix(g)).collect();
        system.correction = system.cocycle_correction();
        Ok(system)
    }

    pub fn j(&self) -> &MarkedFiniteGroup {
        &self.j
    }

    pub fn rank(&self) -> usize {
        self.j.rank()
    }

    pub fn modulus(&self) -> Modulus {
        self.q
    }

    /// `D = 1 + |J|(n − 1)`.
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn transversal(&self) -> &[ReducedWord] {
        &self.transversal
    }

    /// `(coset, zero-based generator)` behind each basis vector of `K'`.
    pub fn generators(&self) -> &[(Elem, usize)] {
        &self.generators
    }

    /// Basis index of the Schreier generator `t_c x_i t_{c x_i}^{-1}`, or
    /// `None` if `(c, i)` is a tree edge.
    pub fn column(&self, coset: Elem, generator: usize) -> Option<usize> {
        self.column[coset * self.rank() + generator]
    }

    pub fn action(&self, j: Elem) -> &FqMatrix {
        &self.action[j]
    }

    pub fn action_matrices(&self) -> &[FqMatrix] {
        &self.action
    }

    /// Schreier rewriting of the letters read from coset `start`: adds the
    /// abelianized generators to `acc` and returns the final coset.
    fn rewrite_from(
        &self,
        start: Elem,
        letters: impl IntoIterator<Item = usize>,
        acc: &mut [u32],
    ) -> Elem {
        let n = self.rank();
        let alphabet = 2 * n;
        let q = self.q;
        let mut c = start;
        for a in letters {
            let i = a / 2;
            if a % 2 == 0 {
                if let Some(col) = self.column[c * n + i] {
                    acc[col] = q.add(acc[col], 1);
                }
                c = self.step[c * alphabet + a] as usize;
            } else {
                c = self.step[c * alphabet + a] as usize;
                if let Some(col) = self.column[c * n + i] {
                    acc[col] = q.sub(acc[col], 1);
                }
            }
        }
        c
    }

    fn word_indices(word: &ReducedWord) -> impl Iterator<Item = usize> + '_ {
        word.letters().iter().map(|l| l.index())
    }

    fn inverse_indices(word: &ReducedWord) -> impl Iterator<Item = usize> + '_ {
        word.letters().iter().rev().map(|l| l.index() ^ 1)
    }

    fn conjugation_matrix(&self, g: Elem) -> FqMatrix {
        let dim = self.dimension();
        let alphabet = 2 * self.rank();
        let tg = &self.transversal[g];
        let columns: Vec<FqVector> = self
            .generators
            .iter()
            .map(|&(c, i)| {
                let target = self.step[c * alphabet + 2 * i] as usize;
                let letters = Self::word_indices(tg)
                    .chain(Self::word_indices(&self.transversal[c]))
                    .chain(std::iter::once(2 * i))
                    .chain(Self::inverse_indices(&self.transversal[target]))
                    .chain(Self::inverse_indices(tg));
                let mut acc = vec![0; dim];
                let end = self.rewrite_from(0, letters, &mut acc);
                debug_assert_eq!(end, 0);
                FqVector::from_residues(self.q, acc)
            })
            .collect();
        FqMatrix::from_columns(self.q, &columns)
    }

    fn cocycle_correction(&self) -> Vec<Vec<u32>> {
        let order = self.j.order();
        let dim = self.dimension();
        let scale = self.q.inv((order as u32) % self.q.get());
        (0..order)
            .map(|a| {
                let mut sum = vec![0; dim];
                for b in 0..order {
                    let ab = self.j.mul(a, b);
                    let letters = Self::word_indices(&self.transversal[a])
                        .chain(Self::word_indices(&self.transversal[b]))
                        .chain(Self::inverse_indices(&self.transversal[ab]));
                    self.rewrite_from(0, letters, &mut sum);
                }
                sum.iter().map(|&x| self.q.mul(x, scale)).collect()
            })
            .collect()
    }

    /// Plain Schreier rewriting: the class of `w t_{f(w)}^{-1}` in `K'`,
    /// together with `f(w)`.
    pub fn rewrite(&self, word: &ReducedWord) -> Result<(FqVector, Elem)> {
        self.check_rank(word)?;
        let mut acc = vec![0; self.dimension()];
        let end = self.rewrite_from(0, Self::word_indices(word), &mut acc);
        Ok((FqVector::from_residues(self.q, acc), end))
    }

    /// Crossed-homomorphism image from raw alphabet indices.
    pub(crate) fn crossed_indices(
        &self,
        letters: impl IntoIterator<Item = usize>,
    ) -> (Vec<u32>, Elem) {
        let mut acc = vec![0; self.dimension()];
        let end = self.rewrite_from(0, letters, &mut acc);
        for (x, &y) in acc.iter_mut().zip(&self.correction[end]) {
            *x = self.q.add(*x, y);
        }
        (acc, end)
    }

    pub fn crossed_evaluate(&self, word: &ReducedWord) -> Result<CrossedImage> {
        self.check_rank(word)?;
        let (v, jpart) = self.crossed_indices(Self::word_indices(word));
        Ok(CrossedImage {
            vector: FqVector::from_residues(self.q, v),
            jpart,
        })
    }

    fn check_rank(&self, word: &ReducedWord) -> Result<()> {
        if word.rank() != self.rank() {
            return Err(Error::invalid(format!(
                "word has rank {}, system has {} generators",
                word.rank(),
                self.rank()
            )));
        }
        Ok(())
    }

    pub(crate) fn generates_residues(&self, vectors: &[Vec<u32>]) -> bool {
        let dim = self.dimension();
        if vectors.len() * self.j.order() < dim {
            return false;
        }
        closure_basis(
            self.q,
            dim,
            vectors.iter().map(|v| v.as_slice()),
            &self.action[1..],
        )
        .is_full()
    }

    /// Whether the vectors generate `K'` as an `F_q[J]`-module.
    pub fn module_generates(&self, vectors: &[FqVector]) -> Result<bool> {
        let dim = self.dimension();
        if let Some(v) = vectors
            .iter()
            .find(|v| v.dim() != dim || v.field() != self.q)
        {
            return Err(Error::invalid(format!(
                "vector of length {} over F_{} in a module of dimension {dim} over F_{}",
                v.dim(),
                v.modulus(),
                self.q.get()
            )));
        }
        let residues: Vec<Vec<u32>> = vectors.iter().map(|v| v.entries().to_vec()).collect();
        Ok(self.generates_residues(&residues))
    }

    /// Bounds on the minimal number of module generators.
    ///
    /// `lower` starts at `⌈D / |J|⌉`; `upper` comes from greedily pruning the
    /// standard basis. Tuple sizes below `upper` are then searched
    /// exhaustively while the search space `q^{D·m}` stays below `10^7`.
    pub fn min_module_generators(&self) -> MinGenerators {
        let dim = self.dimension();
        let mut kept: Vec<Vec<u32>> = (0..dim)
            .map(|i| FqVector::unit(self.q, dim, i).entries().to_vec())
            .collect();
        let mut i = 0;
        while i < kept.len() {
            let mut trial = kept.clone();
            trial.remove(i);
            if self.generates_residues(&trial) {
                kept = trial;
            } else {
                i += 1;
            }
        }
        let mut upper = kept.len();
        let mut lower = dim.div_ceil(self.j.order());
        let start = lower;
        for m in start..upper {
            let space = (self.q.get() as u128).checked_pow((dim * m) as u32);
            if space.is_none_or(|s| s > EXHAUSTIVE_LIMIT) {
                break;
            }
            if self.some_tuple_generates(m) {
                upper = m;
                break;
            }
            lower = m + 1;
        }
        MinGenerators {
            lower: lower.min(upper),
            upper,
        }
    }

    fn some_tuple_generates(&self, m: usize) -> bool {
        let dim = self.dimension();
        let q = self.q.get() as usize;
        let count = q.pow(dim as u32);
        let decode = |mut code: usize| -> Vec<u32> {
            (0..dim)
                .map(|_| {
                    let d = (code % q) as u32;
                    code /= q;
                    d
                })
                .collect()
        };
        // nondecreasing index tuples: order and repetition do not matter
        let mut idx = vec![0usize; m];
        loop {
            let vectors: Vec<Vec<u32>> = idx.iter().map(|&c| decode(c)).collect();
            if self.generates_residues(&vectors) {
                return true;
            }
            let mut pos = m;
            while pos > 0 && idx[pos - 1] == count - 1 {
                pos -= 1;
            }
            if pos == 0 {
                return false;
            }
            idx[pos - 1] += 1;
            let v = idx[pos - 1];
            for x in &mut idx[pos..] {
                *x = v;
            }
        }
    }

    /// The finite group `K' ⋊ J`, marked by the images of the generators.
    pub fn build_split_extension(&self) -> Result<MarkedFiniteGroup> {
        self.build_split_extension_capped(DEFAULT_GROUP_CAP)
    }

    pub fn build_split_extension_capped(&self, cap: usize) -> Result<MarkedFiniteGroup> {
        let group = FiniteGroup::semidirect(Arc::clone(self.j.group()), &self.action, cap)?;
        let marks = (0..self.rank())
            .map(|i| {
                let (v, j) = self.crossed_indices([2 * i]);
                group.affine_element(&v, j).expect("affine group")
            })
            .collect();
        MarkedFiniteGroup::new(Arc::new(group), marks)
    }

    /// Machine-readable summary of the system.
    pub fn summary(&self) -> SystemSummary {
        SystemSummary {
            j_order: self.j.order(),
            f_images: self.j.marks().to_vec(),
            n: self.rank(),
            q: self.q.get(),
            dimension: self.dimension(),
            transversal: self.transversal.iter().map(|w| w.to_string()).collect(),
            generators: self
                .generators
                .iter()
                .map(|&(c, i)| GeneratorLabel {
                    coset: c,
                    letter: Letter::from_index(2 * i).value(),
                })
                .collect(),
            action: self
                .action
                .iter()
                .map(|a| (0..a.rows()).map(|r| a.row(r).to_vec()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorLabel {
    pub coset: Elem,
    pub letter: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemSummary {
    pub j_order: usize,
    pub f_images: Vec<Elem>,
    pub n: usize,
    pub q: u32,
    pub dimension: usize,
    pub transversal: Vec<String>,
    pub generators: Vec<GeneratorLabel>,
    pub action: Vec<Vec<Vec<u32>>>,
}

impl SystemSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::words::{concat_reduce, reduce, sample_reduced};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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

    fn w(v: &[i32], n: usize) -> ReducedWord {
        reduce(v, n).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(system("cyclic:2", vec![1, 0], 3).dimension(), 3);
        assert_eq!(system("cyclic:3", vec![1, 0], 5).dimension(), 4);
        assert_eq!(system("cyclic:2", vec![1, 1, 0], 3).dimension(), 5);
        assert_eq!(system("trivial", vec![0, 0], 5).dimension(), 2);
    }

    #[test]
    fn build_errors() {
        let j = GroupSpec::Cyclic(4)
            .build()
            .unwrap()
            .mark(vec![2, 0])
            .unwrap();
        assert!(matches!(
            SchreierSystem::build(j, 5),
            Err(Error::InvalidInput(_))
        ));
        let z2 = GroupSpec::Cyclic(2)
            .build()
            .unwrap()
            .mark(vec![1, 0])
            .unwrap();
        let err = SchreierSystem::build(z2.clone(), 2).unwrap_err();
        assert!(matches!(&err, Error::Precondition(m) if m.contains("q must exceed |J|")));
        assert!(matches!(
            SchreierSystem::build(z2, 9),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn transversal_is_breadth_first() {
        let s = system("cyclic:2", vec![1, 0], 3);
        assert!(s.transversal()[0].is_empty());
        assert_eq!(s.transversal()[1].values(), vec![1]);
        let s3 = system("symmetric:3", vec![1, 2], 7);
        assert!(s3.transversal().iter().all(|t| t.len() <= 2));
    }

    #[test]
    fn crossed_examples() {
        let s = system("cyclic:2", vec![1, 0], 3);
        let empty = s.crossed_evaluate(&ReducedWord::empty(2).unwrap()).unwrap();
        assert!(empty.vector.is_zero() && empty.jpart == 0);

        let sq = s.crossed_evaluate(&w(&[1, 1], 2)).unwrap();
        let col = s.column(1, 0).unwrap();
        assert_eq!(sq.jpart, 0);
        assert_eq!(sq.vector, FqVector::unit(s.modulus(), 3, col));

        let x2 = s.crossed_evaluate(&w(&[2], 2)).unwrap();
        assert_eq!(x2.jpart, 0);
        assert_eq!(
            x2.vector,
            FqVector::unit(s.modulus(), 3, s.column(0, 1).unwrap())
        );
    }

    #[test]
    fn action_examples() {
        let s = system("cyclic:2", vec![1, 0], 3);
        assert_eq!(s.action(0), &FqMatrix::identity(3, 3).unwrap());
        let a = s.action(1);
        assert_eq!(a.mul(a).unwrap(), FqMatrix::identity(3, 3).unwrap());
        let t = system("trivial", vec![0, 0], 5);
        assert_eq!(t.action_matrices(), &[FqMatrix::identity(5, 2).unwrap()]);
    }

    #[test]
    fn action_is_homomorphism() {
        for (spec, f, q) in [
            ("symmetric:3", vec![1, 2], 7),
            ("cyclic:4", vec![1, 2, 0], 5),
            ("quaternion", vec![1, 2], 11),
        ] {
            let s = system(spec, f, q);
            let order = s.j().order();
            for a in 0..order {
                assert!(s.action(a).is_invertible());
                for b in 0..order {
                    assert_eq!(
                        &s.action(a).mul(s.action(b)).unwrap(),
                        s.action(s.j().mul(a, b))
                    );
                }
            }
        }
    }

    #[test]
    fn crossed_law_and_kernel_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = system("symmetric:3", vec![1, 2], 7);
        for _ in 0..300 {
            let u = sample_reduced(2, rng.gen_range(0..9), &mut rng);
            let v = sample_reduced(2, rng.gen_range(0..9), &mut rng);
            let cu = s.crossed_evaluate(&u).unwrap();
            let cv = s.crossed_evaluate(&v).unwrap();
            let cuv = s.crossed_evaluate(&concat_reduce(&u, &v).unwrap()).unwrap();
            assert_eq!(cuv.jpart, s.j().mul(cu.jpart, cv.jpart));
            assert_eq!(
                cuv.vector,
                cu.vector.add(&s.action(cu.jpart).apply(&cv.vector))
            );
            if cu.jpart == 0 {
                assert_eq!(s.rewrite(&u).unwrap().0, cu.vector);
            }
        }
    }

    #[test]
    fn module_generation_examples() {
        let s = system("cyclic:2", vec![1, 0], 3);
        let q = s.modulus();
        let basis: Vec<FqVector> = (0..3).map(|i| FqVector::unit(q, 3, i)).collect();
        assert!(s.module_generates(&basis).unwrap());
        assert!(!s.module_generates(&[]).unwrap());
        let x2 = s.crossed_evaluate(&w(&[2], 2)).unwrap().vector;
        assert!(!s.module_generates(&[x2]).unwrap());
        assert!(s.module_generates(&[FqVector::unit(q, 2, 0)]).is_err());
    }

    #[test]
    fn min_generators() {
        let t = system("trivial", vec![0, 0], 5);
        assert_eq!(
            t.min_module_generators(),
            MinGenerators { lower: 2, upper: 2 }
        );
        let z2 = system("cyclic:2", vec![1, 0], 3);
        assert_eq!(
            z2.min_module_generators(),
            MinGenerators { lower: 2, upper: 2 }
        );
        let z3 = system("cyclic:3", vec![1, 0], 7).min_module_generators();
        assert_eq!(z3.lower, 2);
        assert!(z3.upper >= 2);
    }

    #[test]
    fn no_single_vector_generates_z2_module() {
        let s = system("cyclic:2", vec![1, 0], 3);
        assert!(!s.some_tuple_generates(1));
        assert!(s.some_tuple_generates(2));
    }

    #[test]
    fn split_extension() {
        let s = system("cyclic:2", vec![1, 0], 3);
        let h = s.build_split_extension().unwrap();
        assert_eq!(h.order(), 54);
        let t = system("trivial", vec![0, 0], 3)
            .build_split_extension()
            .unwrap();
        assert_eq!(t.order(), 9);
        let both_odd = system("cyclic:2", vec![1, 1], 3);
        let h2 = both_odd.build_split_extension().unwrap();
        assert_eq!(h2.order(), 54);
        for &m in h2.marks() {
            assert_eq!(h2.group().affine_parts(m).unwrap().1, 1);
        }
        assert!(matches!(
            s.build_split_extension_capped(50),
            Err(Error::Capacity { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let word = sample_reduced(2, rng.gen_range(0..12), &mut rng);
            let image = s.crossed_evaluate(&word).unwrap();
            let (v, j) = h.group().affine_parts(h.evaluate(&word).unwrap()).unwrap();
            assert_eq!((v.as_slice(), j), (image.vector.entries(), image.jpart));
        }
    }

    #[test]
    fn summary_json() {
        let json = system("cyclic:2", vec![1, 0], 3).summary().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["dimension"], 3);
        assert_eq!(value["transversal"][1], "1");
        assert_eq!(value["action"].as_array().unwrap().len(), 2);
    }

    use rand::Rng;
}
