//! Sparse GF(2) column matrices and the standard left-to-right reduction.
//!
//! Columns are sorted sets of row indices. A matrix carries a [`RowOrder`]
//! so the same stored columns can be reduced under different row orders
//! (filtration order, or a block of cells first) without permuting rows.
//! Only [`SparseGF2Matrix::low`] and [`reduce`] look at the row order.

use std::sync::Arc;

/// A permutation of row indices, with an optional leading block.
///
/// `rank(row)` is the row's place in the order; rows with rank below
/// `block_len` form the leading block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowOrder {
    rank: Vec<usize>,
    rows: Vec<usize>,
    block_len: usize,
}

impl RowOrder {
    pub fn identity(n: usize) -> Self {
        RowOrder {
            rank: (0..n).collect(),
            rows: (0..n).collect(),
            block_len: 0,
        }
    }

    /// `rows` lists row indices from first to last.
    ///
    /// # Panics
    /// If `rows` is not a permutation of `0..rows.len()` or `block_len` exceeds it.
    pub fn from_sequence(rows: Vec<usize>, block_len: usize) -> Self {
        let n = rows.len();
        assert!(block_len <= n, "block longer than the order");
        let mut rank = vec![usize::MAX; n];
        for (r, &row) in rows.iter().enumerate() {
            assert!(row < n && rank[row] == usize::MAX, "not a permutation");
            rank[row] = r;
        }
        RowOrder {
            rank,
            rows,
            block_len,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self, row: usize) -> usize {
        self.rank[row]
    }

    pub fn row_at(&self, rank: usize) -> usize {
        self.rows[rank]
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn in_block(&self, row: usize) -> bool {
        self.rank[row] < self.block_len
    }
}

/// Column-major sparse matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGF2Matrix {
    n_rows: usize,
    columns: Vec<Vec<usize>>,
    row_order: Arc<RowOrder>,
}

/// `R = D·V` with `R` reduced and `V` unit upper-triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub r: SparseGF2Matrix,
    pub v: SparseGF2Matrix,
}

impl SparseGF2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_sorted_columns(n_rows, vec![Vec::new(); n_cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sorted_columns(n, (0..n).map(|i| vec![i]).collect())
    }

    /// Builds a matrix from arbitrary row lists; repeated rows cancel in pairs.
    ///
    /// # Panics
    /// If a row index is `>= n_rows`.
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<usize>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                let mut out: Vec<usize> = Vec::with_capacity(c.len());
                for r in c {
                    if out.last() == Some(&r) {
                        out.pop();
                    } else {
                        out.push(r);
                    }
                }
                out
            })
            .collect();
        Self::from_sorted_columns(n_rows, columns)
    }

    pub(crate) fn from_sorted_columns(n_rows: usize, columns: Vec<Vec<usize>>) -> Self {
        for c in &columns {
            debug_assert!(c.windows(2).all(|w| w[0] < w[1]), "column not strictly increasing");
            assert!(c.last().is_none_or(|&r| r < n_rows), "row index out of range");
        }
        SparseGF2Matrix {
            n_rows,
            columns,
            row_order: Arc::new(RowOrder::identity(n_rows)),
        }
    }

    /// Replaces the row order. The stored entries are unchanged.
    ///
    /// # Panics
    /// If the order does not cover exactly `n_rows` rows.
    pub fn with_row_order(mut self, order: impl Into<Arc<RowOrder>>) -> Self {
        let order = order.into();
        assert_eq!(order.len(), self.n_rows, "row order size mismatch");
        self.row_order = order;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row_order(&self) -> &RowOrder {
        &self.row_order
    }

    pub fn shared_row_order(&self) -> Arc<RowOrder> {
        Arc::clone(&self.row_order)
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        self.columns[j].is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// # Panics
    /// If a row index is `>= n_rows`.
    pub fn push_column(&mut self, mut rows: Vec<usize>) {
        rows.sort_unstable();
        rows.dedup();
        assert!(rows.last().is_none_or(|&r| r < self.n_rows));
        self.columns.push(rows);
    }

    /// Row of the last entry of column `j` under the matrix's row order.
    pub fn low(&self, j: usize) -> Option<usize> {
        self.columns[j]
            .iter()
            .copied()
            .max_by_key(|&r| self.row_order.rank(r))
    }

    /// `column[dst] ^= column[src]`.
    pub fn add_column(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst, "a column cannot be added to itself");
        let merged = xor_sorted(&self.columns[src], &self.columns[dst]);
        self.columns[dst] = merged;
    }

    /// GF(2) product `self · rhs`.
    pub fn product(&self, rhs: &SparseGF2Matrix) -> SparseGF2Matrix {
        assert_eq!(self.n_cols(), rhs.n_rows, "dimension mismatch");
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .fold(Vec::new(), |acc, &k| xor_sorted(&acc, &self.columns[k]))
            })
            .collect();
        SparseGF2Matrix::from_sorted_columns(self.n_rows, columns)
    }

    pub fn transpose(&self) -> SparseGF2Matrix {
        let mut columns = vec![Vec::new(); self.n_rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                columns[i].push(j);
            }
        }
        SparseGF2Matrix::from_sorted_columns(self.n_cols(), columns)
    }

    /// Transpose followed by reversing the order of rows and columns.
    pub fn anti_transpose(&self) -> SparseGF2Matrix {
        let (m, n) = (self.n_rows, self.n_cols());
        let mut columns = vec![Vec::new(); m];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                columns[m - 1 - i].push(n - 1 - j);
            }
        }
        for c in &mut columns {
            c.sort_unstable();
        }
        SparseGF2Matrix::from_sorted_columns(n, columns)
    }

    /// One line per column: space-separated row indices, `-` when empty.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for col in &self.columns {
            if col.is_empty() {
                out.push('-');
            } else {
                let rows: Vec<String> = col.iter().map(usize::to_string).collect();
                out.push_str(&rows.join(" "));
            }
            out.push('\n');
        }
        out
    }
}

/// Symmetric difference of two strictly increasing sequences.
pub fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Standard column reduction: for each column left to right, add earlier
/// columns with the same low until the low is new or the column is zero.
pub fn reduce(d: &SparseGF2Matrix) -> ReductionResult {
    let order = d.row_order();
    // Work with ranks so the low of a column is its last entry.
    let mut r_ranked: Vec<Vec<usize>> = Vec::with_capacity(d.n_cols());
    let mut v_cols: Vec<Vec<usize>> = Vec::with_capacity(d.n_cols());
    let mut pivot_col = vec![usize::MAX; d.n_rows()];

    for j in 0..d.n_cols() {
        let mut col: Vec<usize> = d.column(j).iter().map(|&r| order.rank(r)).collect();
        col.sort_unstable();
        let mut v = vec![j];
        while let Some(&low) = col.last() {
            let k = pivot_col[low];
            if k == usize::MAX {
                pivot_col[low] = j;
                break;
            }
            col = xor_sorted(&col, &r_ranked[k]);
            v = xor_sorted(&v, &v_cols[k]);
        }
        r_ranked.push(col);
        v_cols.push(v);
    }

    let r_cols = r_ranked
        .into_iter()
        .map(|col| {
            let mut rows: Vec<usize> = col.into_iter().map(|r| order.row_at(r)).collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    let r = SparseGF2Matrix::from_sorted_columns(d.n_rows(), r_cols)
        .with_row_order(d.shared_row_order());
    let v = SparseGF2Matrix::from_sorted_columns(d.n_cols(), v_cols);
    ReductionResult { r, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn low_of_empty_column_is_none() {
        let m = SparseGF2Matrix::zeros(4, 1);
        assert_eq!(m.low(0), None);
    }

    #[test]
    fn low_follows_row_order() {
        let m = SparseGF2Matrix::from_columns(8, vec![vec![0, 3, 7]]);
        assert_eq!(m.low(0), Some(7));
        let reversed = RowOrder::from_sequence((0..8).rev().collect(), 0);
        let m = m.with_row_order(reversed);
        assert_eq!(m.low(0), Some(0));
    }

    #[test]
    fn add_column_is_symmetric_difference() {
        let mut m = SparseGF2Matrix::from_columns(6, vec![vec![2, 3], vec![1, 2], vec![], vec![5]]);
        m.add_column(0, 1);
        assert_eq!(m.column(1), &[1, 3]);
        let mut m2 = SparseGF2Matrix::from_columns(6, vec![vec![1, 4], vec![1, 4]]);
        m2.add_column(0, 1);
        assert!(m2.column(1).is_empty());
        m.add_column(3, 2);
        assert_eq!(m.column(2), &[5]);
    }

    #[test]
    fn single_edge_reduces_to_itself() {
        let d = SparseGF2Matrix::from_columns(3, vec![vec![], vec![], vec![0, 1]]);
        let res = reduce(&d);
        assert_eq!(res.r, d);
        assert_eq!(res.v, SparseGF2Matrix::identity(3));
    }

    #[test]
    fn hollow_triangle_third_edge_becomes_a_cycle() {
        let mut specs = fixtures::triangle_specs();
        specs.pop();
        let c = crate::complex::FilteredComplex::new(specs).unwrap();
        let d = c.boundary_matrix();
        let res = reduce(&d);
        assert!(res.r.is_zero_column(5));
        assert_eq!(res.v.column(5), &[3, 4, 5]);
        assert_eq!(d.product(&res.v), res.r);
    }

    #[test]
    fn cylinder_edge_columns() {
        let c = fixtures::cylinder();
        let res = reduce(&c.boundary_matrix());
        let zero_edges = (0..c.len())
            .filter(|&p| c.cell_at(p).dim == 1 && res.r.is_zero_column(p))
            .count();
        // 21 edges minus rank ∂₁ = 9 - 1, cross-checked by dense elimination below
        assert_eq!(zero_edges, 13);
        let rank = dense_rank(&c.boundary_matrix(), |p| c.cell_at(p).dim == 1);
        assert_eq!(rank, 8);
    }

    /// Dense Gaussian elimination over GF(2) on the selected columns.
    fn dense_rank(m: &SparseGF2Matrix, keep: impl Fn(usize) -> bool) -> usize {
        let mut rows: Vec<Vec<bool>> = (0..m.n_cols())
            .filter(|&j| keep(j))
            .map(|j| {
                let mut v = vec![false; m.n_rows()];
                for &i in m.column(j) {
                    v[i] = true;
                }
                v
            })
            .collect();
        let mut rank = 0;
        for col in 0..m.n_rows() {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) {
                rows.swap(rank, p);
                for r in 0..rows.len() {
                    if r != rank && rows[r][col] {
                        let pivot = rows[rank].clone();
                        for (x, y) in rows[r].iter_mut().zip(pivot) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn dump_format() {
        let m = SparseGF2Matrix::from_columns(4, vec![vec![], vec![3, 0], vec![2]]);
        assert_eq!(m.dump(), "-\n0 3\n2\n");
    }

    #[test]
    fn anti_transpose_twice_is_identity() {
        let c = fixtures::cylinder();
        let d = c.boundary_matrix();
        assert_eq!(d.anti_transpose().anti_transpose(), d);
        assert_eq!(d.transpose().transpose(), d);
    }

    fn arb_matrix() -> impl Strategy<Value = SparseGF2Matrix> {
        (1usize..=64, 1usize..=64, 0.0f64..=0.2).prop_flat_map(|(m, n, density)| {
            proptest::collection::vec(
                proptest::collection::vec(proptest::bool::weighted(density), m),
                n,
            )
            .prop_map(move |bits| {
                let cols = bits
                    .into_iter()
                    .map(|col| {
                        col.into_iter()
                            .enumerate()
                            .filter_map(|(i, b)| b.then_some(i))
                            .collect()
                    })
                    .collect();
                SparseGF2Matrix::from_columns(m, cols)
            })
        })
    }

    fn arb_ordered_matrix() -> impl Strategy<Value = SparseGF2Matrix> {
        arb_matrix().prop_flat_map(|m| {
            let n = m.n_rows();
            (Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 0..=n)
                .prop_map(|(m, rows, block)| m.with_row_order(RowOrder::from_sequence(rows, block)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reduction_invariants(d in arb_ordered_matrix()) {
            let res = reduce(&d);
            let dv = d.product(&res.v);
            prop_assert_eq!(dv.columns(), res.r.columns());
            for j in 0..res.v.n_cols() {
                let col = res.v.column(j);
                prop_assert_eq!(col.last().copied(), Some(j));
            }
            let mut lows: Vec<usize> = (0..res.r.n_cols()).filter_map(|j| res.r.low(j)).collect();
            let count = lows.len();
            lows.sort_unstable();
            lows.dedup();
            prop_assert_eq!(lows.len(), count);

            let again = reduce(&res.r);
            prop_assert_eq!(again.r.columns(), res.r.columns());
            prop_assert_eq!(again.v, SparseGF2Matrix::identity(d.n_cols()));
        }

        #[test]
        fn xor_is_an_involution(a in proptest::collection::btree_set(0usize..50, 0..20),
                                b in proptest::collection::btree_set(0usize..50, 0..20)) {
            let a: Vec<usize> = a.into_iter().collect();
            let b: Vec<usize> = b.into_iter().collect();
            let x = xor_sorted(&a, &b);
            prop_assert!(x.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(xor_sorted(&x, &b), a);
        }
    }
}
