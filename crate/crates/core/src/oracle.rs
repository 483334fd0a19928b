//! Dense GF(2) ground truth for small complexes.
//!
//! Nothing here touches the sparse reduction code. Chains are bitsets
//! indexed by filtration position, every quantity comes from Gaussian
//! elimination on explicit bases, and the cobordism barcode is recovered
//! from the rank function of `Cok Φ_i → Cok Φ_j` by inclusion-exclusion.
//!
//! Write `K_S(i) = Z_k(S_i) ∩ B_k(X_i)` for the cycles of `S` that bound in
//! `X`. Then `Ker ι^S_k(i) = K_S(i) / B_k(S_i)`, and since no `(k+1)`-cell
//! lies in both `A` and `B`, `Cok Φ_k(i) = K_{A∪B}(i) / (K_A(i) + K_B(i))`.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{Block, Chain, FilteredComplex};

/// Largest complex [`oracle_barcode`] accepts.
pub const DEFAULT_SIZE_LIMIT: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("complex has {cells} cells, oracle limit is {limit}")]
    SizeLimitExceeded { cells: usize, limit: usize },
}

/// Row-echelon basis where each row's lowest set bit is its pivot.
#[derive(Clone, Debug)]
struct Echelon {
    rows: Vec<FixedBitSet>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    fn new(len: usize) -> Self {
        Echelon {
            rows: Vec::new(),
            pivot_row: vec![None; len],
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the remainder is zero iff `v` is in the span.
    fn reduce(&self, mut v: FixedBitSet) -> FixedBitSet {
        while let Some(p) = v.ones().next() {
            match self.pivot_row[p] {
                Some(r) => v.symmetric_difference_with(&self.rows[r]),
                None => break,
            }
        }
        v
    }

    fn insert(&mut self, v: FixedBitSet) -> bool {
        let v = self.reduce(v);
        match v.ones().next() {
            Some(p) => {
                self.pivot_row[p] = Some(self.rows.len());
                self.rows.push(v);
                true
            }
            None => false,
        }
    }

    fn contains(&self, v: &FixedBitSet) -> bool {
        self.reduce(v.clone()).is_clear()
    }
}

fn rank_of<'a>(len: usize, vectors: impl IntoIterator<Item = &'a FixedBitSet>) -> usize {
    let mut e = Echelon::new(len);
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

fn concat(n: usize, left: &FixedBitSet, right: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(2 * n);
    for i in left.ones() {
        out.insert(i);
    }
    for i in right.ones() {
        out.insert(n + i);
    }
    out
}

fn second_half(n: usize, v: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(n);
    for i in v.ones().filter(|&i| i >= n) {
        out.insert(i - n);
    }
    out
}

/// Basis of `U ∩ W` by the Zassenhaus trick.
fn intersection(n: usize, u: &[FixedBitSet], w: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let zero = FixedBitSet::with_capacity(n);
    let mut e = Echelon::new(2 * n);
    for x in u {
        e.insert(concat(n, x, x));
    }
    for x in w {
        e.insert(concat(n, x, &zero));
    }
    e.rows
        .iter()
        .filter(|r| r.ones().next().is_some_and(|p| p >= n))
        .map(|r| second_half(n, r))
        .collect()
}

/// Boundaries of every cell as position bitsets, plus dimensions and block membership.
struct Dense<'a> {
    complex: &'a FilteredComplex,
    n: usize,
    boundary: Vec<FixedBitSet>,
    dim: Vec<usize>,
}

impl<'a> Dense<'a> {
    fn new(complex: &'a FilteredComplex) -> Self {
        let n = complex.len();
        let boundary = (0..n)
            .map(|p| {
                let mut b = FixedBitSet::with_capacity(n);
                for face in &complex.cell_at(p).boundary {
                    b.insert(complex.position(*face));
                }
                b
            })
            .collect();
        let dim = (0..n).map(|p| complex.cell_at(p).dim).collect();
        Dense {
            complex,
            n,
            boundary,
            dim,
        }
    }

    fn in_sub(&self, p: usize, sub: Option<Block>) -> bool {
        sub.is_none_or(|b| b.contains(self.complex.cell_at(p).label))
    }

    /// Positions `≤ step` of `dim`-cells in `sub` (the whole complex for `None`).
    fn cells(&self, dim: usize, step: usize, sub: Option<Block>) -> Vec<usize> {
        (0..=step.min(self.n.saturating_sub(1)))
            .filter(|&p| self.n > 0 && self.dim[p] == dim && self.in_sub(p, sub))
            .collect()
    }

    fn unit(&self, p: usize) -> FixedBitSet {
        let mut v = FixedBitSet::with_capacity(self.n);
        v.insert(p);
        v
    }

    /// `B_k(sub_i)`: boundaries of `(k+1)`-cells.
    fn boundaries(&self, k: usize, step: usize, sub: Option<Block>) -> Vec<FixedBitSet> {
        self.cells(k + 1, step, sub)
            .into_iter()
            .map(|p| self.boundary[p].clone())
            .collect()
    }

    /// Basis of `Z_k(sub_i)` from the null space of the boundary map.
    fn cycles(&self, k: usize, step: usize, sub: Option<Block>) -> Vec<FixedBitSet> {
        let n = self.n;
        let mut e = Echelon::new(2 * n);
        for p in self.cells(k, step, sub) {
            e.insert(concat(n, &self.boundary[p], &self.unit(p)));
        }
        e.rows
            .iter()
            .filter(|r| r.ones().next().is_some_and(|p| p >= n))
            .map(|r| second_half(n, r))
            .collect()
    }

    fn kernel_basis(&self, k: usize, step: usize, sub: Block) -> Vec<FixedBitSet> {
        intersection(
            self.n,
            &self.cycles(k, step, Some(sub)),
            &self.boundaries(k, step, None),
        )
    }

    fn kernel_dim(&self, k: usize, step: usize, sub: Block) -> usize {
        let z = self.cycles(k, step, Some(sub));
        let bx = self.boundaries(k, step, None);
        let bs = rank_of(self.n, &self.boundaries(k, step, Some(sub)));
        let both = rank_of(self.n, z.iter().chain(bx.iter()));
        let cap = z.len() + rank_of(self.n, &bx) - both;
        cap - bs
    }

    fn projected(&self, p: usize, rel: Option<Block>) -> FixedBitSet {
        let mut b = self.boundary[p].clone();
        if let Some(block) = rel {
            for q in self.boundary[p].ones() {
                if self.in_sub(q, Some(block)) {
                    b.set(q, false);
                }
            }
        }
        b
    }

    fn relative_homology(&self, step: usize, rel: Option<Block>) -> Vec<usize> {
        let top = self.complex.max_dim();
        let outside = |k: usize| -> Vec<usize> {
            self.cells(k, step, None)
                .into_iter()
                .filter(|&p| rel.is_none_or(|b| !self.in_sub(p, Some(b))))
                .collect()
        };
        let rank_d = |k: usize| -> usize {
            if k == 0 {
                return 0;
            }
            let cols: Vec<FixedBitSet> = outside(k)
                .into_iter()
                .map(|p| self.projected(p, rel))
                .collect();
            rank_of(self.n, &cols)
        };
        (0..=top)
            .map(|k| outside(k).len() - rank_d(k) - rank_d(k + 1))
            .collect()
    }
}

/// `dim H_k(X_i, S_i)` for `k = 0..=max_dim`, or absolute homology when `relative` is `None`.
///
/// `step` is a filtration position; `X_i` holds the cells at positions `0..=step`.
pub fn homology_dims(complex: &FilteredComplex, step: usize, relative: Option<Block>) -> Vec<usize> {
    Dense::new(complex).relative_homology(step, relative)
}

/// `dim H_k(S_i)` of the subcomplex itself.
pub fn subcomplex_homology_dims(complex: &FilteredComplex, step: usize, sub: Block) -> Vec<usize> {
    let dense = Dense::new(complex);
    (0..=complex.max_dim())
        .map(|k| {
            let z = dense.cycles(k, step, Some(sub)).len();
            let b = rank_of(dense.n, &dense.boundaries(k, step, Some(sub)));
            z - b
        })
        .collect()
}

/// `dim Ker ι^S_k` at `step` for `k = 0..=max_dim`.
pub fn kernel_dims(complex: &FilteredComplex, step: usize, block: Block) -> Vec<usize> {
    let dense = Dense::new(complex);
    (0..=complex.max_dim())
        .map(|k| dense.kernel_dim(k, step, block))
        .collect()
}

/// `dim Cok Φ_k` at `step`; `Φ` is injective, so this is a difference of kernel dimensions.
pub fn cok_phi_dims(complex: &FilteredComplex, step: usize) -> Vec<usize> {
    let dense = Dense::new(complex);
    (0..=complex.max_dim())
        .map(|k| {
            dense.kernel_dim(k, step, Block::AB)
                - dense.kernel_dim(k, step, Block::A)
                - dense.kernel_dim(k, step, Block::B)
        })
        .collect()
}

/// Ranks of `Cok Φ_k(i) → Cok Φ_k(j)` for all positions `i ≤ j`.
#[derive(Clone, Debug)]
pub struct RankTable {
    pub degree: usize,
    len: usize,
    ranks: Vec<Vec<usize>>,
}

impl RankTable {
    pub fn compute(complex: &FilteredComplex, degree: usize) -> Self {
        let dense = Dense::new(complex);
        let n = dense.n;
        // bases of K_{A∪B}(i) extended step by step, so step i adds `fresh[i]`
        let mut fresh: Vec<Vec<FixedBitSet>> = Vec::with_capacity(n);
        let mut grown = Echelon::new(n);
        for i in 0..n {
            let added = dense
                .kernel_basis(degree, i, Block::AB)
                .into_iter()
                .filter(|v| grown.insert(v.clone()))
                .collect();
            fresh.push(added);
        }
        let ranks = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = Echelon::new(n);
                for block in [Block::A, Block::B] {
                    for v in dense.kernel_basis(degree, j, block) {
                        e.insert(v);
                    }
                }
                let base = e.rank();
                (0..=j)
                    .map(|i| {
                        for v in &fresh[i] {
                            e.insert(v.clone());
                        }
                        e.rank() - base
                    })
                    .collect()
            })
            .collect();
        RankTable {
            degree,
            len: n,
            ranks,
        }
    }

    /// Rank of `Cok Φ(i) → Cok Φ(j)`; zero when `i` is `None` (before the first step).
    pub fn rank(&self, i: Option<usize>, j: usize) -> usize {
        match i {
            Some(i) => {
                assert!(i <= j && j < self.len, "need i <= j < len");
                self.ranks[j][i]
            }
            None => 0,
        }
    }

    pub fn dim(&self, i: usize) -> usize {
        self.rank(Some(i), i)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bars by inclusion-exclusion over the rank function, as filtration positions.
    pub fn bars(&self) -> Vec<OracleBar> {
        let mut out = Vec::new();
        let prev = |i: usize| i.checked_sub(1);
        for i in 0..self.len {
            for j in (i + 1)..self.len {
                let mu = self.rank(Some(i), j - 1) as isize - self.rank(Some(i), j) as isize
                    - self.rank(prev(i), j - 1) as isize
                    + self.rank(prev(i), j) as isize;
                assert!(mu >= 0, "negative multiplicity at ({i}, {j})");
                for _ in 0..mu {
                    out.push(OracleBar {
                        degree: self.degree,
                        birth_position: i,
                        death_position: Some(j),
                    });
                }
            }
            if self.len > 0 {
                let last = self.len - 1;
                let mu = self.rank(Some(i), last) - self.rank(prev(i), last);
                for _ in 0..mu {
                    out.push(OracleBar {
                        degree: self.degree,
                        birth_position: i,
                        death_position: None,
                    });
                }
            }
        }
        out
    }
}

/// A bar of the oracle barcode in filtration positions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OracleBar {
    pub degree: usize,
    pub birth_position: usize,
    pub death_position: Option<usize>,
}

/// Sorted oracle bars of `Cok Φ` in every degree.
pub fn oracle_barcode(complex: &FilteredComplex) -> Result<Vec<OracleBar>, OracleError> {
    oracle_barcode_limited(complex, DEFAULT_SIZE_LIMIT)
}

pub fn oracle_barcode_limited(
    complex: &FilteredComplex,
    limit: usize,
) -> Result<Vec<OracleBar>, OracleError> {
    if complex.len() > limit {
        return Err(OracleError::SizeLimitExceeded {
            cells: complex.len(),
            limit,
        });
    }
    let mut bars: Vec<OracleBar> = (0..=complex.max_dim())
        .flat_map(|k| RankTable::compute(complex, k).bars())
        .collect();
    bars.sort();
    Ok(bars)
}

/// How the boundary of a candidate cobordism splits over `A` and `B`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryCheck {
    /// The boundary has no interior cells.
    pub supported_in_ab: bool,
    /// The `A` part is a cycle that does not bound in `A` at the step.
    pub nontrivial_in_a: bool,
    pub nontrivial_in_b: bool,
}

impl BoundaryCheck {
    pub fn holds(&self) -> bool {
        self.supported_in_ab && self.nontrivial_in_a && self.nontrivial_in_b
    }
}

/// Checks that `∂chain` splits into cycles of `A` and `B` that are both non-trivial in homology at `step`.
pub fn check_cobordism_boundary(
    complex: &FilteredComplex,
    chain: &Chain,
    step: usize,
) -> BoundaryCheck {
    let dense = Dense::new(complex);
    let mut boundary = FixedBitSet::with_capacity(dense.n);
    for id in chain.cells() {
        boundary.symmetric_difference_with(&dense.boundary[complex.position(*id)]);
    }
    let part = |block: Block| -> FixedBitSet {
        let mut v = FixedBitSet::with_capacity(dense.n);
        for p in boundary.ones().filter(|&p| dense.in_sub(p, Some(block))) {
            v.insert(p);
        }
        v
    };
    let supported_in_ab = boundary.ones().all(|p| dense.in_sub(p, Some(Block::AB)));
    let nontrivial = |block: Block| -> bool {
        let z = part(block);
        let Some(first) = z.ones().next() else {
            return false;
        };
        let k = dense.dim[first];
        let mut dz = FixedBitSet::with_capacity(dense.n);
        for p in z.ones() {
            if dense.dim[p] != k || p > step {
                return false;
            }
            dz.symmetric_difference_with(&dense.boundary[p]);
        }
        if !dz.is_clear() {
            return false;
        }
        let mut b = Echelon::new(dense.n);
        for v in dense.boundaries(k, step, Some(block)) {
            b.insert(v);
        }
        !b.contains(&z)
    };
    BoundaryCheck {
        supported_in_ab,
        nontrivial_in_a: nontrivial(Block::A),
        nontrivial_in_b: nontrivial(Block::B),
    }
}
