//! Finite groups, marked generator maps `X → G`, and word evaluation.
//!
//! Elements are dense indices `0..order` with the identity at index 0. The
//! multiplication law is stored in whichever form the group came from: an
//! explicit Cayley table, a permutation representation, or an affine
//! semidirect product `F_q^d ⋊ J`. Table-backed groups are validated on
//! construction; the other two are groups by construction.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fqlin::FqMatrix;
use crate::words::ReducedWord;
use crate::DEFAULT_GROUP_CAP;

pub type Elem = usize;

#[derive(Debug, Clone)]
enum Law {
    Table(Vec<u32>),
    Perm {
        degree: usize,
        images: Vec<u32>,
        index: HashMap<Box<[u32]>, u32>,
    },
    Affine(AffineLaw),
}

/// `F_q^dim ⋊ top`, element `v * |top| + j` for `v` read as base-q digits.
#[derive(Debug, Clone)]
struct AffineLaw {
    q: u32,
    dim: usize,
    top: Arc<FiniteGroup>,
    /// Row-major `dim × dim` matrix per element of `top`.
    action: Vec<Vec<u32>>,
}

impl AffineLaw {
    fn split(&self, x: Elem) -> (Vec<u32>, Elem) {
        let top_order = self.top.order();
        let mut code = x / top_order;
        let mut v = vec![0u32; self.dim];
        for digit in v.iter_mut() {
            *digit = (code % self.q as usize) as u32;
            code /= self.q as usize;
        }
        (v, x % top_order)
    }

    fn join(&self, v: &[u32], j: Elem) -> Elem {
        let code = v
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * self.q as usize + d as usize);
        code * self.top.order() + j
    }

    fn apply(&self, j: Elem, v: &[u32]) -> Vec<u32> {
        let a = &self.action[j];
        let q = self.q as u64;
        (0..self.dim)
            .map(|r| {
                let row = &a[r * self.dim..(r + 1) * self.dim];
                (row.iter()
                    .zip(v)
                    .map(|(&x, &y)| x as u64 * y as u64 % q)
                    .sum::<u64>()
                    % q) as u32
            })
            .collect()
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let (v1, j1) = self.split(a);
        let (v2, j2) = self.split(b);
        let moved = self.apply(j1, &v2);
        let sum: Vec<u32> = v1
            .iter()
            .zip(&moved)
            .map(|(&x, &y)| (x + y) % self.q)
            .collect();
        self.join(&sum, self.top.mul(j1, j2))
    }
}

/// A finite group on the elements `0..order`, identity 0.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    law: Law,
    inv: Vec<u32>,
}

impl FiniteGroup {
    /// Validates a Cayley table (row = left factor) with identity at index 0.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let k = table.len();
        if k == 0 {
            return Err(Error::Structure("empty table".into()));
        }
        if let Some((r, row)) = table.iter().enumerate().find(|(_, row)| row.len() != k) {
            return Err(Error::Structure(format!(
                "row {r} has {} entries, expected {k}",
                row.len()
            )));
        }
        let mut flat = Vec::with_capacity(k * k);
        for (r, row) in table.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x >= k {
                    return Err(Error::Structure(format!(
                        "entry ({r}, {c}) = {x} out of range"
                    )));
                }
                flat.push(x as u32);
            }
        }
        let m = |a: usize, b: usize| flat[a * k + b] as usize;
        for a in 0..k {
            if m(0, a) != a || m(a, 0) != a {
                return Err(Error::Structure(format!(
                    "element 0 is not an identity: 0·{a} = {}, {a}·0 = {}",
                    m(0, a),
                    m(a, 0)
                )));
            }
        }
        let mut inv = vec![0u32; k];
        for (a, slot) in inv.iter_mut().enumerate() {
            match (0..k).find(|&b| m(a, b) == 0 && m(b, a) == 0) {
                Some(b) => *slot = b as u32,
                None => return Err(Error::Structure(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..k {
            for b in 0..k {
                let ab = m(a, b);
                for c in 0..k {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::Structure(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: k,
            law: Law::Table(flat),
            inv,
        })
    }

    /// Closes a set of permutations of `0..degree` under composition.
    ///
    /// Elements are numbered by first occurrence in a breadth-first closure
    /// that right-multiplies by the generators in the given order. The
    /// product `p · q` applies `p` first.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>], cap: usize) -> Result<Self> {
        for (g, perm) in gens.iter().enumerate() {
            if perm.len() != degree {
                return Err(Error::invalid(format!(
                    "generator {g} has {} images, expected {degree}",
                    perm.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &x in perm {
                if x >= degree || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::invalid(format!("generator {g} is not a bijection")));
                }
            }
        }
        let gens: Vec<Box<[u32]>> = gens
            .iter()
            .map(|p| p.iter().map(|&x| x as u32).collect())
            .collect();
        let identity: Box<[u32]> = (0..degree as u32).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Box<[u32]>, u32> = HashMap::from([(identity, 0)]);
        let mut head = 0;
        while head < elements.len() {
            for g in &gens {
                let prod: Box<[u32]> = elements[head].iter().map(|&x| g[x as usize]).collect();
                if !index.contains_key(&prod) {
                    if elements.len() == cap {
                        return Err(Error::capacity(
                            "permutation group closure",
                            cap as u128 + 1,
                            cap as u128,
                        ));
                    }
                    index.insert(prod.clone(), elements.len() as u32);
                    elements.push(prod);
                }
            }
            head += 1;
        }
        let inv = elements
            .iter()
            .map(|p| {
                let mut q = vec![0u32; degree];
                for (x, &y) in p.iter().enumerate() {
                    q[y as usize] = x as u32;
                }
                index[q.as_slice()]
            })
            .collect();
        Ok(FiniteGroup {
            order: elements.len(),
            law: Law::Perm {
                degree,
                images: elements.concat(),
                index,
            },
            inv,
        })
    }

    /// The semidirect product `F_q^dim ⋊ top`, with `(v1, j1)(v2, j2) =
    /// (v1 + action[j1]·v2, j1 j2)`. The element `(v, j)` has index
    /// `code(v) * |top| + j` where `code(v) = Σ v_t q^t`.
    ///
    /// `action` must be a homomorphism from `top` into `GL_dim(F_q)`; this is
    /// checked.
    pub fn semidirect(top: Arc<FiniteGroup>, action: &[FqMatrix], cap: usize) -> Result<Self> {
        if action.len() != top.order() {
            return Err(Error::invalid(
                "one action matrix per element of the top group is required",
            ));
        }
        let q = action[0].modulus();
        let dim = action[0].rows();
        for a in action {
            if a.modulus() != q || a.rows() != dim || a.cols() != dim {
                return Err(Error::invalid(
                    "action matrices must share modulus and be square of equal size",
                ));
            }
        }
        for x in 0..top.order() {
            for y in 0..top.order() {
                if action[x].mul(&action[y])? != action[top.mul(x, y)] {
                    return Err(Error::invalid(format!(
                        "action is not a homomorphism at ({x}, {y})"
                    )));
                }
            }
        }
        let needed = (q as u128)
            .checked_pow(dim as u32)
            .map(|v| v * top.order() as u128);
        match needed {
            Some(n) if n <= cap as u128 => {}
            _ => {
                return Err(Error::capacity(
                    "semidirect product order",
                    needed.unwrap_or(u128::MAX),
                    cap as u128,
                ))
            }
        }
        let order = needed.unwrap() as usize;
        let law = AffineLaw {
            q,
            dim,
            top,
            action: action.iter().map(|a| a.data().to_vec()).collect(),
        };
        let inv = (0..order)
            .map(|x| {
                let (v, j) = law.split(x);
                let jinv = law.top.inv(j);
                let moved = law.apply(jinv, &v);
                let neg: Vec<u32> = moved.iter().map(|&d| (q - d) % q).collect();
                law.join(&neg, jinv) as u32
            })
            .collect();
        Ok(FiniteGroup {
            order,
            law: Law::Affine(law),
            inv,
        })
    }

    pub fn trivial() -> Self {
        FiniteGroup {
            order: 1,
            law: Law::Table(vec![0]),
            inv: vec![0],
        }
    }

    /// `Z/k`, element `i` is the residue `i`.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("cyclic group order must be positive"));
        }
        let rotation: Vec<usize> = (0..k).map(|x| (x + 1) % k).collect();
        Self::from_permutations(k, &[rotation], DEFAULT_GROUP_CAP)
    }

    /// Dihedral group of order `2k` acting on a `k`-gon (`k ≥ 3`).
    pub fn dihedral(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("dihedral group needs k >= 3"));
        }
        let rotation: Vec<usize> = (0..k).map(|x| (x + 1) % k).collect();
        let reflection: Vec<usize> = (0..k).map(|x| (k - x) % k).collect();
        Self::from_permutations(k, &[rotation, reflection], DEFAULT_GROUP_CAP)
    }

    /// Symmetric group on `d` points, generated by `(0 1)` and `(0 1 … d-1)`.
    pub fn symmetric(d: usize) -> Result<Self> {
        if d < 2 {
            return Ok(Self::trivial());
        }
        let mut transposition: Vec<usize> = (0..d).collect();
        transposition.swap(0, 1);
        let cycle: Vec<usize> = (0..d).map(|x| (x + 1) % d).collect();
        Self::from_permutations(d, &[transposition, cycle], DEFAULT_GROUP_CAP)
    }

    /// `Z/k_1 × … × Z/k_r`, as rotations of disjoint cycles.
    pub fn abelian(factors: &[usize]) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::invalid("cyclic factors must be positive"));
        }
        let degree: usize = factors.iter().sum();
        let mut gens = Vec::new();
        let mut offset = 0;
        for &k in factors {
            let mut perm: Vec<usize> = (0..degree).collect();
            for x in 0..k {
                perm[offset + x] = offset + (x + 1) % k;
            }
            gens.push(perm);
            offset += k;
        }
        Self::from_permutations(degree.max(1), &gens, DEFAULT_GROUP_CAP)
    }

    /// Quaternion group `Q_8` in its regular representation.
    pub fn quaternion() -> Self {
        // units 1, i, j, k as 0..4; element = unit + 4·(sign is negative)
        fn unit_mul(a: usize, b: usize) -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        }
        let table: Vec<Vec<usize>> = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, neg) = unit_mul(a % 4, b % 4);
                        let sign = neg ^ (a >= 4) ^ (b >= 4);
                        u + if sign { 4 } else { 0 }
                    })
                    .collect()
            })
            .collect();
        Self::from_table(&table).expect("Q8 table is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        0
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.law {
            Law::Table(t) => t[a * self.order + b] as usize,
            Law::Perm {
                degree,
                images,
                index,
            } => {
                let pa = &images[a * degree..(a + 1) * degree];
                let pb = &images[b * degree..(b + 1) * degree];
                let prod: Vec<u32> = pa.iter().map(|&x| pb[x as usize]).collect();
                index[prod.as_slice()] as usize
            }
            Law::Affine(law) => law.mul(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a] as usize
    }

    /// The permutation behind element `a`, for permutation-backed groups.
    pub fn permutation(&self, a: Elem) -> Option<Vec<usize>> {
        match &self.law {
            Law::Perm { degree, images, .. } => Some(
                images[a * degree..(a + 1) * degree]
                    .iter()
                    .map(|&x| x as usize)
                    .collect(),
            ),
            _ => None,
        }
    }

    /// `(vector digits, top element)` for affine semidirect products.
    pub fn affine_parts(&self, a: Elem) -> Option<(Vec<u32>, Elem)> {
        match &self.law {
            Law::Affine(law) => Some(law.split(a)),
            _ => None,
        }
    }

    /// Index of `(v, j)` in an affine semidirect product.
    pub fn affine_element(&self, v: &[u32], j: Elem) -> Option<Elem> {
        match &self.law {
            Law::Affine(law) if v.len() == law.dim && j < law.top.order() => Some(law.join(v, j)),
            _ => None,
        }
    }

    pub fn cayley_table(&self) -> Vec<Vec<Elem>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    /// Smallest subgroup containing `seed`.
    pub fn subgroup_closure(&self, seed: &[Elem]) -> Subgroup {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut found = vec![0];
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in seed {
                let y = self.mul(x, s);
                if !member[y] {
                    member[y] = true;
                    found.push(y);
                    queue.push_back(y);
                }
            }
        }
        found.sort_unstable();
        Subgroup { members: found }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: (0..self.order).collect(),
        }
    }

    pub fn mark(self: &Arc<Self>, marks: Vec<Elem>) -> Result<MarkedFiniteGroup> {
        MarkedFiniteGroup::new(Arc::clone(self), marks)
    }
}

/// A subgroup as a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<Elem>,
}

impl Subgroup {
    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Elements of `0..parent_order` outside the subgroup.
    pub fn complement(&self, parent_order: usize) -> Vec<Elem> {
        (0..parent_order).filter(|&x| !self.contains(x)).collect()
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// A finite group together with images `x_1 … x_n` of the free generators.
#[derive(Debug, Clone)]
pub struct MarkedFiniteGroup {
    group: Arc<FiniteGroup>,
    marks: Vec<Elem>,
}

impl MarkedFiniteGroup {
    pub fn new(group: Arc<FiniteGroup>, marks: Vec<Elem>) -> Result<Self> {
        if marks.len() < 2 {
            return Err(Error::invalid(format!(
                "at least 2 marks are required, got {}",
                marks.len()
            )));
        }
        if let Some(&m) = marks.iter().find(|&&m| m >= group.order()) {
            return Err(Error::invalid(format!(
                "mark {m} is not an element of a group of order {}",
                group.order()
            )));
        }
        Ok(MarkedFiniteGroup { group, marks })
    }

    pub fn from_mul_table(table: &[Vec<usize>], marks: Vec<Elem>) -> Result<Self> {
        Self::new(Arc::new(FiniteGroup::from_table(table)?), marks)
    }

    /// Group generated by the permutations, marked by them in order.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        Self::from_permutations_capped(degree, gens, DEFAULT_GROUP_CAP)
    }

    pub fn from_permutations_capped(
        degree: usize,
        gens: &[Vec<usize>],
        cap: usize,
    ) -> Result<Self> {
        let group = FiniteGroup::from_permutations(degree, gens, cap)?;
        let marks = gens
            .iter()
            .map(|g| {
                let target: Vec<u32> = g.iter().map(|&x| x as u32).collect();
                match &group.law {
                    Law::Perm { index, .. } => index[target.as_slice()] as usize,
                    _ => unreachable!(),
                }
            })
            .collect();
        Self::new(Arc::new(group), marks)
    }

    pub fn with_marks(&self, marks: Vec<Elem>) -> Result<Self> {
        Self::new(Arc::clone(&self.group), marks)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn marks(&self) -> &[Elem] {
        &self.marks
    }

    /// Number of marked generators `n`.
    pub fn rank(&self) -> usize {
        self.marks.len()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.group.mul(a, b)
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.group.inv(a)
    }

    /// Image of the letter with the given alphabet index.
    pub fn letter_image(&self, index: usize) -> Elem {
        let m = self.marks[index / 2];
        if index.is_multiple_of(2) {
            m
        } else {
            self.group.inv(m)
        }
    }

    /// Right-multiplication table `g ↦ g · x_a` for every alphabet index `a`,
    /// stored as `table[g * 2n + a]`.
    pub fn step_table(&self) -> Vec<u32> {
        let images: Vec<Elem> = (0..2 * self.rank()).map(|a| self.letter_image(a)).collect();
        let mut table = Vec::with_capacity(self.order() * images.len());
        for g in 0..self.order() {
            for &x in &images {
                table.push(self.mul(g, x) as u32);
            }
        }
        table
    }

    pub fn evaluate(&self, word: &ReducedWord) -> Result<Elem> {
        if word.rank() != self.rank() {
            return Err(Error::invalid(format!(
                "word has rank {}, group has {} marks",
                word.rank(),
                self.rank()
            )));
        }
        Ok(word
            .letters()
            .iter()
            .fold(0, |g, l| self.mul(g, self.letter_image(l.index()))))
    }

    pub fn subgroup_closure(&self, seed: &[Elem]) -> Subgroup {
        self.group.subgroup_closure(seed)
    }

    /// Subgroup generated by the marks.
    pub fn generated(&self) -> Subgroup {
        self.subgroup_closure(&self.marks)
    }

    pub fn marks_generate(&self) -> bool {
        self.generated().order() == self.order()
    }

    /// The subgroup of elements represented by even-length words: the closure
    /// of all `m_a m_b` and `m_a m_b^{-1}`. It has index 1 or 2 in the
    /// subgroup generated by the marks.
    pub fn even_subgroup(&self) -> Subgroup {
        let mut seed = Vec::with_capacity(2 * self.rank() * self.rank());
        for &a in &self.marks {
            for &b in &self.marks {
                seed.push(self.mul(a, b));
                seed.push(self.mul(a, self.inv(b)));
            }
        }
        seed.sort_unstable();
        seed.dedup();
        self.subgroup_closure(&seed)
    }

    /// Plain-text table format: `order k`, `k` rows, `marks …`.
    pub fn to_table_text(&self) -> String {
        let mut out = format!("order {}\n", self.order());
        for row in self.group.cayley_table() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        let marks: Vec<String> = self.marks.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("marks {}\n", marks.join(" ")));
        out
    }
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| {
                Error::parse(lineno, format!("expected a nonnegative integer, got {t:?}"))
            })
        })
        .collect()
}

/// Parses a group file in either the table format
///
/// ```text
/// order 2
/// 0 1
/// 1 0
/// marks 1 1
/// ```
///
/// or the permutation format (`perm degree d` followed by one generator per
/// line, each generator becoming a mark). Blank lines and `#` comments are
/// ignored.
pub fn parse_group_text(text: &str) -> Result<MarkedFiniteGroup> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty group file"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    match words.as_slice() {
        ["order", k] => {
            let k: usize = k
                .parse()
                .map_err(|_| Error::parse(lineno, "order must be a positive integer"))?;
            let mut table = Vec::with_capacity(k);
            for r in 0..k {
                let (ln, line) = lines.next().ok_or_else(|| {
                    Error::parse(lineno + r + 1, format!("missing table row {r}"))
                })?;
                let row = parse_numbers(line, ln)?;
                if row.len() != k {
                    return Err(Error::parse(
                        ln,
                        format!("expected {k} entries, got {}", row.len()),
                    ));
                }
                table.push(row);
            }
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno + k + 1, "missing marks line"))?;
            let rest = line
                .strip_prefix("marks")
                .ok_or_else(|| Error::parse(ln, "expected `marks …`"))?;
            let marks = parse_numbers(rest, ln)?;
            MarkedFiniteGroup::from_mul_table(&table, marks)
        }
        ["perm", "degree", d] => {
            let d: usize = d
                .parse()
                .map_err(|_| Error::parse(lineno, "degree must be a positive integer"))?;
            let mut gens = Vec::new();
            for (ln, line) in lines {
                let perm = parse_numbers(line, ln)?;
                if perm.len() != d {
                    return Err(Error::parse(
                        ln,
                        format!("expected {d} images, got {}", perm.len()),
                    ));
                }
                gens.push(perm);
            }
            MarkedFiniteGroup::from_permutations(d, &gens)
        }
        _ => Err(Error::parse(
            lineno,
            "expected `order k` or `perm degree d`",
        )),
    }
}

/// Named families of small groups, written `trivial`, `cyclic:K`,
/// `dihedral:K`, `symmetric:D`, `klein`, `quaternion` or `abelian:4x2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Trivial,
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Klein,
    Quaternion,
    Abelian(Vec<usize>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<Arc<FiniteGroup>> {
        let group = match self {
            GroupSpec::Trivial => FiniteGroup::trivial(),
            GroupSpec::Cyclic(k) => FiniteGroup::cyclic(*k)?,
            GroupSpec::Dihedral(k) => FiniteGroup::dihedral(*k)?,
            GroupSpec::Symmetric(d) => FiniteGroup::symmetric(*d)?,
            GroupSpec::Klein => FiniteGroup::abelian(&[2, 2])?,
            GroupSpec::Quaternion => FiniteGroup::quaternion(),
            GroupSpec::Abelian(f) => FiniteGroup::abelian(f)?,
        };
        Ok(Arc::new(group))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let int = |a: Option<&str>| -> Result<usize> {
            a.ok_or_else(|| {
                Error::invalid(format!("group `{name}` needs a size, e.g. `{name}:3`"))
            })?
            .parse()
            .map_err(|_| Error::invalid(format!("bad size in group spec {s:?}")))
        };
        match name {
            "trivial" => Ok(GroupSpec::Trivial),
            "cyclic" => Ok(GroupSpec::Cyclic(int(arg)?)),
            "dihedral" => Ok(GroupSpec::Dihedral(int(arg)?)),
            "symmetric" => Ok(GroupSpec::Symmetric(int(arg)?)),
            "klein" => Ok(GroupSpec::Klein),
            "quaternion" => Ok(GroupSpec::Quaternion),
            "abelian" => {
                let factors = arg
                    .ok_or_else(|| {
                        Error::invalid("abelian group needs factors, e.g. `abelian:4x2`")
                    })?
                    .split('x')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::invalid(format!("bad factor {t:?}")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                Ok(GroupSpec::Abelian(factors))
            }
            _ => Err(Error::invalid(format!("unknown group family {name:?}"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Trivial => write!(f, "trivial"),
            GroupSpec::Cyclic(k) => write!(f, "cyclic:{k}"),
            GroupSpec::Dihedral(k) => write!(f, "dihedral:{k}"),
            GroupSpec::Symmetric(d) => write!(f, "symmetric:{d}"),
            GroupSpec::Klein => write!(f, "klein"),
            GroupSpec::Quaternion => write!(f, "quaternion"),
            GroupSpec::Abelian(fs) => {
                let parts: Vec<String> = fs.iter().map(|k| k.to_string()).collect();
                write!(f, "abelian:{}", parts.join("x"))
            }
        }
    }
}

/// Every group of order at most 8, up to isomorphism, with a name.
pub fn groups_up_to_order_8() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    let specs: [(&str, GroupSpec); 14] = [
        ("1", GroupSpec::Trivial),
        ("Z2", GroupSpec::Cyclic(2)),
        ("Z3", GroupSpec::Cyclic(3)),
        ("Z4", GroupSpec::Cyclic(4)),
        ("Z2xZ2", GroupSpec::Klein),
        ("Z5", GroupSpec::Cyclic(5)),
        ("Z6", GroupSpec::Cyclic(6)),
        ("S3", GroupSpec::Symmetric(3)),
        ("Z7", GroupSpec::Cyclic(7)),
        ("Z8", GroupSpec::Cyclic(8)),
        ("Z4xZ2", GroupSpec::Abelian(vec![4, 2])),
        ("Z2xZ2xZ2", GroupSpec::Abelian(vec![2, 2, 2])),
        ("D4", GroupSpec::Dihedral(4)),
        ("Q8", GroupSpec::Quaternion),
    ];
    specs
        .into_iter()
        .map(|(name, spec)| (name, spec.build().expect("catalog groups build")))
        .collect()
}
