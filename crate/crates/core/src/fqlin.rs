//! Dense linear algebra over a prime field `F_q`, `q < 2^16`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::error::{Error, Result};

/// A validated prime modulus below `2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(q: u32) -> Result<Self> {
        if q >= 1 << 16 {
            return Err(Error::invalid(format!("modulus {q} must be below 2^16")));
        }
        if !is_prime(q) {
            return Err(Error::invalid(format!("modulus {q} is not prime")));
        }
        Ok(Modulus(q))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        a * b % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0));
        let mut result = 1u32;
        let mut base = a % self.0;
        let mut exp = self.0 - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }
}

/// Trial division up to `√q`.
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqVector {
    q: Modulus,
    entries: Vec<u32>,
}

impl FqVector {
    pub fn new(q: u32, entries: &[i64]) -> Result<Self> {
        let q = Modulus::new(q)?;
        Ok(Self::from_residues(
            q,
            entries.iter().map(|&x| q.reduce(x)).collect(),
        ))
    }

    pub(crate) fn from_residues(q: Modulus, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&x| x < q.get()));
        FqVector { q, entries }
    }

    pub fn zeros(q: Modulus, dim: usize) -> Self {
        FqVector {
            q,
            entries: vec![0; dim],
        }
    }

    pub fn unit(q: Modulus, dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(q, dim);
        v.entries[i] = 1;
        v
    }

    pub fn modulus(&self) -> u32 {
        self.q.get()
    }

    pub fn field(&self) -> Modulus {
        self.q
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &FqVector) -> FqVector {
        assert_eq!(self.dim(), other.dim(), "vector length mismatch");
        FqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| self.q.add(a, b))
                .collect(),
        }
    }
}

impl fmt::Display for FqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Row-major dense matrix over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    q: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FqMatrix {
    pub fn from_rows(q: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let q = Modulus::new(q)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(FqMatrix {
            q,
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| q.reduce(x)).collect(),
        })
    }

    pub fn zeros(q: Modulus, rows: usize, cols: usize) -> Self {
        FqMatrix {
            q,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(q: u32, n: usize) -> Result<Self> {
        Ok(Self::identity_in(Modulus::new(q)?, n))
    }

    pub(crate) fn identity_in(q: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(q, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(q: Modulus, columns: &[FqVector]) -> Self {
        let rows = columns.first().map_or(0, |c| c.dim());
        let mut m = Self::zeros(q, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, &x) in col.entries().iter().enumerate() {
                m.data[r * columns.len() + c] = x;
            }
        }
        m
    }

    pub fn stack(vectors: &[FqVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::invalid("cannot stack zero vectors without a modulus"))?;
        let (q, cols) = (first.field(), first.dim());
        if vectors.iter().any(|v| v.field() != q || v.dim() != cols) {
            return Err(Error::invalid("vectors differ in length or modulus"));
        }
        Ok(FqMatrix {
            q,
            rows: vectors.len(),
            cols,
            data: vectors
                .iter()
                .flat_map(|v| v.entries.iter().copied())
                .collect(),
        })
    }

    pub fn modulus(&self) -> u32 {
        self.q.get()
    }

    pub fn field(&self) -> Modulus {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != other.rows || self.q != other.q {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.q.get() as u64;
        let mut out = FqMatrix::zeros(self.q, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let cell = &mut out.data[r * other.cols + c];
                    *cell = ((*cell as u64 + a * other.get(k, c) as u64) % q) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let q = self.q.get() as u64;
        (0..self.rows)
            .map(|r| {
                (self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum::<u64>()
                    % q) as u32
            })
            .collect()
    }

    pub fn apply(&self, v: &FqVector) -> FqVector {
        FqVector::from_residues(self.q, self.mul_vec(v.entries()))
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(self.q, self.cols);
        for r in 0..self.rows {
            basis.insert(self.row(r));
        }
        basis.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Plain-text form: a `q <prime>` header then one row of residues per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("q {}\n", self.q.get());
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty matrix text"))?;
        let q: u32 = header
            .strip_prefix("q ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(ln, "expected `q <prime>`"))?;
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::parse(ln, format!("bad residue {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(q, &rows)
    }
}

impl fmt::Display for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| format!("{x:>2}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// An incrementally built basis in semi-echelon form: every stored row has a
/// leading 1 at its pivot, and is zero at the pivots of earlier rows.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    q: Modulus,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(q: Modulus, dim: usize) -> Self {
        EchelonBasis {
            q,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = self.q.sub(*x, self.q.mul(c, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = self.q.inv(r[pivot]);
        for x in r.iter_mut() {
            *x = self.q.mul(*x, scale);
        }
        self.rows.push(r);
        self.pivots.push(pivot);
        true
    }

    pub fn vectors(&self) -> Vec<FqVector> {
        self.rows
            .iter()
            .map(|r| FqVector::from_residues(self.q, r.clone()))
            .collect()
    }
}

/// Whether the vectors span `F_q^dim`.
pub fn generates_space(vectors: &[FqVector], dim: usize) -> Result<bool> {
    if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(Error::invalid(format!(
            "vector of length {} in a space of dimension {dim}",
            v.dim()
        )));
    }
    let Some(first) = vectors.first() else {
        return Ok(dim == 0);
    };
    if vectors.iter().any(|v| v.field() != first.field()) {
        return Err(Error::invalid("vectors over different fields"));
    }
    Ok(FqMatrix::stack(vectors)?.rank() == dim)
}

/// Number of `m`-tuples in `(E^m)^m` generating `E^m`:
/// `∏_{j=1}^m (1 - |E|^{-j}) · |E|^{m²}`, computed as
/// `∏_{j=1}^m (|E|^j - 1) · |E|^{m(m-1)/2}`.
pub fn generating_tuple_count(e_size: u64, m: u32) -> BigUint {
    let e = BigUint::from(e_size);
    let mut count: BigUint = Pow::pow(&e, m * m.saturating_sub(1) / 2);
    for j in 1..=m {
        count *= Pow::pow(&e, j) - BigUint::one();
    }
    count
}

/// Probability that `count` independent uniform vectors span `F_q^dim`.
pub fn generation_probability(q: u32, dim: u32, count: u32) -> f64 {
    if count < dim {
        return 0.0;
    }
    (0..dim)
        .map(|i| 1.0 - (q as f64).powi(i as i32 - count as i32))
        .product()
}

/// Smallest subspace containing `vectors` and stable under every matrix in
/// `action`. The caller guarantees dimensions agree.
pub(crate) fn closure_basis<'a>(
    q: Modulus,
    dim: usize,
    vectors: impl IntoIterator<Item = &'a [u32]>,
    action: &[FqMatrix],
) -> EchelonBasis {
    let mut basis = EchelonBasis::new(q, dim);
    let mut pending: Vec<Vec<u32>> = Vec::new();
    for v in vectors {
        if basis.insert(v) {
            pending.push(v.to_vec());
        }
        if basis.is_full() {
            return basis;
        }
    }
    while let Some(v) = pending.pop() {
        for a in action {
            let image = a.mul_vec(&v);
            if basis.insert(&image) {
                if basis.is_full() {
                    return basis;
                }
                pending.push(image);
            }
        }
    }
    basis
}

/// Checks that `action` is a set of square invertible matrices closed under
/// multiplication.
pub fn check_action_closed(action: &[FqMatrix]) -> Result<()> {
    for (i, a) in action.iter().enumerate() {
        if !a.is_invertible() {
            return Err(Error::invalid(format!(
                "action matrix {i} is not invertible"
            )));
        }
    }
    for (i, a) in action.iter().enumerate() {
        for (j, b) in action.iter().enumerate() {
            let prod = a.mul(b)?;
            if !action.contains(&prod) {
                return Err(Error::invalid(format!(
                    "action set is not closed: product of matrices {i} and {j} is missing"
                )));
            }
        }
    }
    Ok(())
}

/// Basis of the smallest action-stable subspace containing `vectors`.
pub fn submodule_closure(vectors: &[FqVector], action: &[FqMatrix]) -> Result<Vec<FqVector>> {
    let Some(first) = action.first() else {
        return Err(Error::invalid("at least one action matrix is required"));
    };
    let (q, dim) = (first.field(), first.rows());
    if action
        .iter()
        .any(|a| a.rows() != dim || a.cols() != dim || a.field() != q)
    {
        return Err(Error::invalid(
            "action matrices must be square of one size over one field",
        ));
    }
    if let Some(v) = vectors.iter().find(|v| v.dim() != dim || v.field() != q) {
        return Err(Error::invalid(format!(
            "vector of length {} does not match action dimension {dim}",
            v.dim()
        )));
    }
    check_action_closed(action)?;
    Ok(closure_basis(q, dim, vectors.iter().map(|v| v.entries()), action).vectors())
}
