//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use fewrel::groups::{groups_up_to_order_8, Elem, FiniteGroup, MarkedFiniteGroup};
use fewrel::words::{concat_reduce, ReducedWord};
use fewrel::SchreierSystem;
use rand::Rng;

/// Calls `visit` on every reduced word of length `l` over `n` generators, as
/// a list of signed letters.
pub fn for_each_reduced(n: usize, l: usize, visit: &mut dyn FnMut(&[i32])) {
    fn rec(n: i32, l: usize, word: &mut Vec<i32>, visit: &mut dyn FnMut(&[i32])) {
        if word.len() == l {
            visit(word);
            return;
        }
        for x in (-n..=n).filter(|&x| x != 0) {
            if word.last() == Some(&-x) {
                continue;
            }
            word.push(x);
            rec(n, l, word, visit);
            word.pop();
        }
    }
    rec(n as i32, l, &mut Vec::with_capacity(l), visit);
}

/// Multiplies the marks out letter by letter.
pub fn naive_evaluate(g: &MarkedFiniteGroup, word: &[i32]) -> Elem {
    word.iter().fold(g.group().identity(), |acc, &x| {
        let m = g.marks()[x.unsigned_abs() as usize - 1];
        let m = if x > 0 { m } else { g.inv(m) };
        g.mul(acc, m)
    })
}

/// Law of the image of a uniform word of `S_l`, by listing all of `S_l`.
pub fn enumerated_summed(g: &MarkedFiniteGroup, l: usize) -> Vec<f64> {
    let mut counts = vec![0u64; g.order()];
    let mut total = 0u64;
    for_each_reduced(g.rank(), l, &mut |w| {
        counts[naive_evaluate(g, w)] += 1;
        total += 1;
    });
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Every index-2 subgroup, found by testing all half-size subsets.
pub fn index2_subgroups(g: &FiniteGroup) -> Vec<Vec<Elem>> {
    let k = g.order();
    if !k.is_multiple_of(2) {
        return Vec::new();
    }
    let mut found = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask & 1 == 0 || mask.count_ones() as usize != k / 2 {
            continue;
        }
        let members: Vec<Elem> = (0..k).filter(|&x| mask >> x & 1 == 1).collect();
        let closed = members
            .iter()
            .all(|&a| members.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1));
        if closed {
            found.push(members);
        }
    }
    found
}

/// Every marking of every group of order at most 8 by two elements.
pub fn marked_family() -> Vec<(String, MarkedFiniteGroup)> {
    let mut out = Vec::new();
    for (name, g) in groups_up_to_order_8() {
        for a in 0..g.order() {
            for b in 0..g.order() {
                out.push((format!("{name} [{a},{b}]"), g.mark(vec![a, b]).unwrap()));
            }
        }
    }
    out
}

/// Rank over `F_p` by plain Gaussian elimination on a copy.
pub fn rank_mod(p: u64, rows: &[Vec<u64>]) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % p).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = (1..p).find(|&x| x * m[rank][c] % p == 1).unwrap();
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                let pivot_row = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of `m`-tuples in `F_p^m` that span it, by listing all of them.
pub fn brute_spanning_tuples(p: u64, m: usize) -> u64 {
    let vectors: Vec<Vec<u64>> = (0..p.pow(m as u32))
        .map(|mut x| {
            (0..m)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        })
        .collect();
    let mut count = 0;
    let mut idx = vec![0usize; m];
    loop {
        let rows: Vec<Vec<u64>> = idx.iter().map(|&i| vectors[i].clone()).collect();
        if rank_mod(p, &rows) == m {
            count += 1;
        }
        let mut pos = m;
        while pos > 0 && idx[pos - 1] == vectors.len() - 1 {
            idx[pos - 1] = 0;
            pos -= 1;
        }
        if pos == 0 {
            return count;
        }
        idx[pos - 1] += 1;
    }
}

/// Reidemeister–Schreier rewriting of a word in `K`, spelled out as a word
/// in Schreier generators `s_{c,i}^{±1}` and then abelianized mod `q`.
pub fn reidemeister_schreier(sys: &SchreierSystem, word: &ReducedWord) -> Vec<u64> {
    let j = sys.j();
    let q = sys.modulus().get() as u64;
    let mut spelled: Vec<(Elem, usize, i64)> = Vec::new();
    let mut coset = j.group().identity();
    for letter in word.letters() {
        let i = letter.generator();
        let x = j.marks()[i];
        if letter.is_positive() {
            spelled.push((coset, i, 1));
            coset = j.mul(coset, x);
        } else {
            coset = j.mul(coset, j.inv(x));
            spelled.push((coset, i, -1));
        }
    }
    assert_eq!(coset, j.group().identity(), "word must lie in K");
    let mut out = vec![0u64; sys.dimension()];
    for (c, i, e) in spelled {
        if let Some(col) = sys.column(c, i) {
            out[col] = (out[col] as i64 + e).rem_euclid(q as i64) as u64;
        }
    }
    out
}

/// A uniformly random reduced word of length `0..=max_len`.
pub fn random_word<R: Rng>(n: usize, max_len: usize, rng: &mut R) -> ReducedWord {
    let l = rng.gen_range(0..=max_len);
    fewrel::words::sample_reduced(n, l, rng)
}

/// A random word in `K`: a random word followed by the inverse of its coset
/// representative.
pub fn random_kernel_word<R: Rng>(
    sys: &SchreierSystem,
    max_len: usize,
    rng: &mut R,
) -> ReducedWord {
    let w = random_word(sys.rank(), max_len, rng);
    let c = sys.j().evaluate(&w).unwrap();
    concat_reduce(&w, &sys.transversal()[c].inverse()).unwrap()
}

/// A random system with `n ≤ 3`, `|J| ≤ 6`, generating marks and
/// `q ∈ {5, 7, 11}` above `|J|`.
pub fn random_system<R: Rng>(rng: &mut R) -> SchreierSystem {
    let catalog: Vec<Arc<FiniteGroup>> = groups_up_to_order_8()
        .into_iter()
        .map(|(_, g)| g)
        .filter(|g| g.order() <= 6)
        .collect();
    loop {
        let g = &catalog[rng.gen_range(0..catalog.len())];
        let n = rng.gen_range(2..=3);
        let marks: Vec<Elem> = (0..n).map(|_| rng.gen_range(0..g.order())).collect();
        let marked = g.mark(marks).unwrap();
        if !marked.marks_generate() {
            continue;
        }
        let primes: Vec<u32> = [5, 7, 11]
            .into_iter()
            .filter(|&q| q as usize > g.order())
            .collect();
        let q = primes[rng.gen_range(0..primes.len())];
        return SchreierSystem::build(marked, q).unwrap();
    }
}
