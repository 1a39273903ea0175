//! Free-group words over the alphabet `{±1, …, ±n}`.
//!
//! A letter `i` stands for the generator `x_i`, `-i` for its inverse. Inside
//! the crate letters are often handled through their *alphabet index*
//! `0..2n`, ordered `x_1, x_1^{-1}, x_2, x_2^{-1}, …`, so that the inverse of
//! index `a` is `a ^ 1`.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};

/// A generator or inverse generator, stored as a nonzero signed integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn new(value: i32, rank: usize) -> Result<Self> {
        if value == 0 || value.unsigned_abs() as usize > rank {
            return Err(Error::invalid(format!(
                "letter {value} is not in ±1..±{rank}"
            )));
        }
        Ok(Letter(value))
    }

    /// Letter with the given alphabet index (`x_1, x_1^{-1}, x_2, …`).
    pub fn from_index(index: usize) -> Self {
        let generator = (index / 2 + 1) as i32;
        Letter(if index.is_multiple_of(2) {
            generator
        } else {
            -generator
        })
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// Zero-based generator index `i - 1`.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn index(self) -> usize {
        2 * self.generator() + usize::from(self.0 < 0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A freely reduced word in the free group of rank `rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
    rank: usize,
}

fn check_rank(rank: usize) -> Result<()> {
    if rank < 2 {
        return Err(Error::invalid(format!(
            "free group rank must be at least 2, got {rank}"
        )));
    }
    Ok(())
}

/// Freely reduce a sequence of signed letters.
pub fn reduce(letters: &[i32], rank: usize) -> Result<ReducedWord> {
    check_rank(rank)?;
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &v in letters {
        push_reducing(&mut out, Letter::new(v, rank)?);
    }
    Ok(ReducedWord { letters: out, rank })
}

fn push_reducing(stack: &mut Vec<Letter>, letter: Letter) {
    if stack.last() == Some(&letter.inverse()) {
        stack.pop();
    } else {
        stack.push(letter);
    }
}

/// Reduced form of `a · b`.
pub fn concat_reduce(a: &ReducedWord, b: &ReducedWord) -> Result<ReducedWord> {
    if a.rank != b.rank {
        return Err(Error::invalid(format!(
            "rank mismatch: {} vs {}",
            a.rank, b.rank
        )));
    }
    let mut out = a.letters.clone();
    for &letter in &b.letters {
        push_reducing(&mut out, letter);
    }
    Ok(ReducedWord {
        letters: out,
        rank: a.rank,
    })
}

impl ReducedWord {
    pub fn empty(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(ReducedWord {
            letters: Vec::new(),
            rank,
        })
    }

    /// Builds a word from alphabet indices that are already known to be
    /// reduced.
    pub(crate) fn from_reduced_indices(
        indices: impl IntoIterator<Item = usize>,
        rank: usize,
    ) -> Self {
        let letters: Vec<Letter> = indices.into_iter().map(Letter::from_index).collect();
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        ReducedWord { letters, rank }
    }

    /// Parses space-separated signed integers, e.g. `"1 2 -1"`, and reduces.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|_| Error::invalid(format!("not a letter: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        reduce(&values, rank)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn values(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.value()).collect()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Strips conjugating letters until the first and last letters are not
    /// mutually inverse.
    pub fn cyclically_reduce(&self) -> Self {
        let mut start = 0;
        let mut end = self.letters.len();
        while end - start >= 2 && self.letters[start] == self.letters[end - 1].inverse() {
            start += 1;
            end -= 1;
        }
        ReducedWord {
            letters: self.letters[start..end].to_vec(),
            rank: self.rank,
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

/// `|S_l| = 2n (2n-1)^{l-1}`, with `|S_0| = 1`.
pub fn count_reduced(rank: usize, length: usize) -> Result<BigUint> {
    check_rank(rank)?;
    if length == 0 {
        return Ok(BigUint::from(1u32));
    }
    let two_n = BigUint::from(2 * rank);
    let branching = BigUint::from(2 * rank - 1);
    Ok(two_n * num_traits::pow(branching, length - 1))
}

/// Draws alphabet indices of a uniform reduced word of the given length.
///
/// The first letter is uniform over all `2n` letters and every later letter is
/// uniform over the `2n - 1` letters other than the inverse of its
/// predecessor.
pub(crate) fn sample_indices<R: Rng + ?Sized>(
    rank: usize,
    length: usize,
    rng: &mut R,
    mut visit: impl FnMut(usize),
) {
    if length == 0 {
        return;
    }
    let alphabet = 2 * rank;
    let mut prev = rng.gen_range(0..alphabet);
    visit(prev);
    for _ in 1..length {
        let mut next = rng.gen_range(0..alphabet - 1);
        if next >= (prev ^ 1) {
            next += 1;
        }
        visit(next);
        prev = next;
    }
}

/// Samples a word uniformly from `S_l`.
///
/// # Panics
/// If `rank < 2`.
pub fn sample_reduced<R: Rng + ?Sized>(rank: usize, length: usize, rng: &mut R) -> ReducedWord {
    assert!(rank >= 2, "free group rank must be at least 2");
    let mut indices = Vec::with_capacity(length);
    sample_indices(rank, length, rng, |a| indices.push(a));
    ReducedWord::from_reduced_indices(indices, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn w(v: &[i32]) -> ReducedWord {
        reduce(v, 2).unwrap()
    }

    /// Every reduced word of the given length, by extending letter by letter.
    fn enumerate(rank: usize, length: usize) -> Vec<Vec<i32>> {
        let letters: Vec<i32> = (1..=rank as i32).flat_map(|i| [i, -i]).collect();
        let mut words = vec![vec![]];
        for _ in 0..length {
            let mut next = Vec::new();
            for word in &words {
                for &a in &letters {
                    if word.last() != Some(&-a) {
                        let mut ext = word.clone();
                        ext.push(a);
                        next.push(ext);
                    }
                }
            }
            words = next;
        }
        words
    }

    #[test]
    fn reduce_examples() {
        assert!(w(&[1, -1]).is_empty());
        assert!(w(&[1, 2, -2, -1]).is_empty());
        assert_eq!(w(&[1, 2, -1]).values(), vec![1, 2, -1]);
    }

    #[test]
    fn reduce_rejects_bad_input() {
        assert!(matches!(reduce(&[1], 1), Err(Error::InvalidInput(_))));
        assert!(matches!(reduce(&[3], 2), Err(Error::InvalidInput(_))));
        assert!(matches!(reduce(&[0], 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn cyclic_reduction_examples() {
        assert_eq!(w(&[1, 2, -1]).cyclically_reduce().values(), vec![2]);
        assert_eq!(w(&[1, 2]).cyclically_reduce().values(), vec![1, 2]);
        assert!(w(&[1, 2, -2, -1]).cyclically_reduce().is_empty());
        assert_eq!(w(&[1, 2, 1, -2, -1]).cyclically_reduce().values(), vec![1]);
    }

    #[test]
    fn concat_examples() {
        assert_eq!(
            concat_reduce(&w(&[1, 2]), &w(&[-2, 1])).unwrap().values(),
            vec![1, 1]
        );
        assert!(concat_reduce(&w(&[1]), &w(&[-1])).unwrap().is_empty());
        assert_eq!(
            concat_reduce(&w(&[1, 2]), &w(&[2, 1])).unwrap().values(),
            vec![1, 2, 2, 1]
        );
        let three = reduce(&[3], 3).unwrap();
        assert!(concat_reduce(&w(&[1]), &three).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        assert_eq!(count_reduced(2, 1).unwrap(), BigUint::from(4u32));
        assert_eq!(count_reduced(2, 2).unwrap(), BigUint::from(12u32));
        assert_eq!(count_reduced(3, 3).unwrap(), BigUint::from(150u32));
        assert_eq!(count_reduced(2, 0).unwrap(), BigUint::from(1u32));
        assert!(count_reduced(1, 3).is_err());
        for rank in 2..=3 {
            for length in 0..=6 {
                assert_eq!(
                    count_reduced(rank, length).unwrap(),
                    BigUint::from(enumerate(rank, length).len()),
                    "rank {rank} length {length}"
                );
            }
        }
    }

    #[test]
    fn display_and_parse() {
        let word = ReducedWord::parse("1 2 -1", 2).unwrap();
        assert_eq!(word.to_string(), "1 2 -1");
        assert!(ReducedWord::parse("1 x", 2).is_err());
    }

    #[test]
    fn letter_index_roundtrip() {
        for index in 0..8 {
            let letter = Letter::from_index(index);
            assert_eq!(letter.index(), index);
            assert_eq!(letter.inverse().index(), index ^ 1);
        }
        assert_eq!(Letter::from_index(0).value(), 1);
        assert_eq!(Letter::from_index(1).value(), -1);
        assert_eq!(Letter::from_index(2).value(), 2);
    }

    /// Chi-square goodness of fit of `sample_reduced` against uniform on S_l,
    /// 10^5 draws, significance 0.001.
    #[test]
    fn sampling_is_uniform() {
        // 0.999 quantiles of chi-square with 3, 11 and 35 degrees of freedom.
        let critical = [(1, 16.266), (2, 31.264), (3, 66.619)];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (length, crit) in critical {
            let support = enumerate(2, length);
            let draws = 100_000;
            let mut counts: HashMap<Vec<i32>, usize> = HashMap::new();
            for _ in 0..draws {
                let word = sample_reduced(2, length, &mut rng);
                assert_eq!(word.len(), length);
                *counts.entry(word.values()).or_default() += 1;
            }
            assert_eq!(counts.len(), support.len());
            let expected = draws as f64 / support.len() as f64;
            let stat: f64 = support
                .iter()
                .map(|word| {
                    let observed = *counts.get(word).unwrap_or(&0) as f64;
                    (observed - expected).powi(2) / expected
                })
                .sum();
            assert!(stat < crit, "length {length}: chi-square {stat} >= {crit}");
        }
    }

    fn letters_strategy() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..24)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_reduced(v in letters_strategy()) {
            let once = reduce(&v, 3).unwrap();
            prop_assert!(once.len() <= v.len());
            prop_assert_eq!(once.len() % 2, v.len() % 2);
            prop_assert!(once.letters().windows(2).all(|p| p[0] != p[1].inverse()));
            let twice = reduce(&once.values(), 3).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn concat_matches_reduce(a in letters_strategy(), b in letters_strategy()) {
            let ra = reduce(&a, 3).unwrap();
            let rb = reduce(&b, 3).unwrap();
            let joined: Vec<i32> = a.iter().chain(&b).copied().collect();
            prop_assert_eq!(concat_reduce(&ra, &rb).unwrap(), reduce(&joined, 3).unwrap());
        }

        #[test]
        fn cyclic_reduction_is_conjugate(v in letters_strategy()) {
            let word = reduce(&v, 3).unwrap();
            let cyc = word.cyclically_reduce();
            prop_assert!(cyc.is_cyclically_reduced());
            // word = u · cyc · u^{-1} for the stripped prefix u
            let k = (word.len() - cyc.len()) / 2;
            let prefix = ReducedWord { letters: word.letters()[..k].to_vec(), rank: 3 };
            let rebuilt = concat_reduce(&concat_reduce(&prefix, &cyc).unwrap(), &prefix.inverse()).unwrap();
            prop_assert_eq!(rebuilt, word);
        }
    }
}
