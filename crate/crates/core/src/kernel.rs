//! Kernel persistence of the inclusion `S ↪ X` for a marked subcomplex `S`.
//!
//! Two reductions. The boundary matrix is reduced with the rows of `S`
//! moved to the front (`D_im`). A column of a cell outside `S` whose low
//! lands in the `S` block gives birth to a kernel class, and its `V` column
//! is a relative cycle with boundary in `S`. The `V` columns at zero
//! columns of `R_im` are cycles of `X`. They form `D_ker`, which is
//! reduced under the same block order. A column indexed by a cell of `S`
//! whose low stays outside the block closes a relative cycle, and that low
//! row is the matching birth.

use thiserror::Error;

use crate::complex::{Block, CellId, FilteredComplex};
use crate::reduction::{reduce, SparseGF2Matrix};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum EventKind {
    Birth,
    Death,
}

#[derive(Copy, Clone, Debug, PartialEq, serde::Serialize)]
pub struct KernelEvent {
    pub kind: EventKind,
    /// Homological degree of the kernel class (one less than the cell dimension).
    pub degree: usize,
    pub time: f64,
    pub cell: CellId,
    /// Position of `cell` in the filtration order.
    pub position: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, serde::Serialize)]
pub struct KernelBar {
    pub birth: KernelEvent,
    pub death: Option<KernelEvent>,
}

impl KernelBar {
    pub fn degree(&self) -> usize {
        self.birth.degree
    }

    /// Whether the bar is alive once the cell at `position` has been added.
    pub fn alive_at(&self, position: usize) -> bool {
        self.birth.position <= position && self.death.is_none_or(|d| d.position > position)
    }
}

/// A kernel birth together with its relative-cycle representative (positions).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelBirth {
    pub event: KernelEvent,
    pub representative: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("kernel of {block}: death at cell {death} has low row {low}, which is not a birth")]
    UnmatchedDeath {
        block: Block,
        death: CellId,
        low: CellId,
    },
    #[error("kernel of {block}: birth at cell {birth} is killed twice")]
    DoubleDeath { block: Block, birth: CellId },
}

/// Result of the kernel-persistence pipeline for one block, with the
/// matrices the cobordism pairing reuses.
#[derive(Clone, Debug)]
pub struct KernelPairs {
    pub block: Block,
    pub bars: Vec<KernelBar>,
    pub r_im: SparseGF2Matrix,
    pub v_im: SparseGF2Matrix,
    pub d_ker: SparseGF2Matrix,
    pub r_ker: SparseGF2Matrix,
    pub v_ker: SparseGF2Matrix,
    /// Filtration position indexing each column of `d_ker`.
    pub ker_columns: Vec<usize>,
    events: Vec<Option<KernelEvent>>,
}

impl KernelPairs {
    /// The kernel event triggered by the cell at `position`, if any.
    ///
    /// Births come from cells outside the block and deaths from cells inside,
    /// so a cell triggers at most one event.
    pub fn event_at(&self, position: usize) -> Option<&KernelEvent> {
        self.events[position].as_ref()
    }

    pub fn births(&self) -> impl Iterator<Item = &KernelEvent> {
        self.bars.iter().map(|b| &b.birth)
    }

    pub fn deaths(&self) -> impl Iterator<Item = &KernelEvent> {
        self.bars.iter().filter_map(|b| b.death.as_ref())
    }

    /// Number of kernel classes of `degree` alive after the cell at `position`.
    pub fn living(&self, degree: usize, position: usize) -> usize {
        self.bars
            .iter()
            .filter(|b| b.degree() == degree && b.alive_at(position))
            .count()
    }

    /// Whether the cell at `position` closes a cycle of `X`.
    pub fn is_cycle_column(&self, position: usize) -> bool {
        self.r_im.is_zero_column(position)
    }

    /// Whether the reduced image column is non-zero with its low in the block.
    pub fn has_block_low(&self, position: usize) -> bool {
        self.r_im
            .low(position)
            .is_some_and(|low| self.r_im.row_order().in_block(low))
    }

    /// Relative cycle born at `position` (a column of `V_im`), if it is a birth.
    pub fn relative_cycle(&self, position: usize) -> Option<&[usize]> {
        match self.events[position] {
            Some(KernelEvent {
                kind: EventKind::Birth,
                ..
            }) => Some(self.v_im.column(position)),
            _ => None,
        }
    }
}

/// Boundary matrix with the rows of `block` first; columns stay in filtration order.
pub fn build_d_im(complex: &FilteredComplex, block: Block) -> SparseGF2Matrix {
    complex
        .boundary_matrix()
        .with_row_order(complex.block_row_order(block))
}

/// Births of the kernel: cells outside the block whose reduced column has its low in the block.
pub fn kernel_births(
    complex: &FilteredComplex,
    r_im: &SparseGF2Matrix,
    v_im: &SparseGF2Matrix,
    block: Block,
) -> Vec<KernelBirth> {
    (0..r_im.n_cols())
        .filter(|&p| !complex.in_block(p, block))
        .filter_map(|p| {
            let low = r_im.low(p)?;
            if !r_im.row_order().in_block(low) {
                return None;
            }
            let cell = complex.cell_at(p);
            Some(KernelBirth {
                event: KernelEvent {
                    kind: EventKind::Birth,
                    degree: cell.dim - 1,
                    time: cell.filtration,
                    cell: cell.id,
                    position: p,
                },
                representative: v_im.column(p).to_vec(),
            })
        })
        .collect()
}

/// The cycle columns of `V_im` (those at zero columns of `R_im`), rows ordered block-first.
///
/// Returns the matrix and the filtration position indexing each column.
pub fn build_d_ker(
    complex: &FilteredComplex,
    r_im: &SparseGF2Matrix,
    v_im: &SparseGF2Matrix,
    block: Block,
) -> (SparseGF2Matrix, Vec<usize>) {
    let positions: Vec<usize> = (0..r_im.n_cols())
        .filter(|&p| r_im.is_zero_column(p))
        .collect();
    let columns = positions.iter().map(|&p| v_im.column(p).to_vec()).collect();
    let d_ker = SparseGF2Matrix::from_sorted_columns(v_im.n_rows(), columns)
        .with_row_order(complex.block_row_order(block));
    (d_ker, positions)
}

/// Births, deaths and pairings of the kernel of `H_*(S) → H_*(X)` for `S = block`.
pub fn kernel_pairs(complex: &FilteredComplex, block: Block) -> Result<KernelPairs, KernelError> {
    let d_im = build_d_im(complex, block);
    let im = reduce(&d_im);
    let births = kernel_births(complex, &im.r, &im.v, block);
    let (d_ker, ker_columns) = build_d_ker(complex, &im.r, &im.v, block);
    let ker = reduce(&d_ker);

    let n = complex.len();
    let mut events: Vec<Option<KernelEvent>> = vec![None; n];
    let mut bar_of_birth = vec![usize::MAX; n];
    let mut bars = Vec::with_capacity(births.len());
    for b in &births {
        events[b.event.position] = Some(b.event);
        bar_of_birth[b.event.position] = bars.len();
        bars.push(KernelBar {
            birth: b.event,
            death: None,
        });
    }

    for (c, &p) in ker_columns.iter().enumerate() {
        if !complex.in_block(p, block) {
            continue;
        }
        let Some(low) = ker.r.low(c) else { continue };
        if ker.r.row_order().in_block(low) {
            continue;
        }
        let cell = complex.cell_at(p);
        let bar = bar_of_birth[low];
        if bar == usize::MAX {
            return Err(KernelError::UnmatchedDeath {
                block,
                death: cell.id,
                low: complex.cell_at(low).id,
            });
        }
        if bars[bar].death.is_some() {
            return Err(KernelError::DoubleDeath {
                block,
                birth: complex.cell_at(low).id,
            });
        }
        let death = KernelEvent {
            kind: EventKind::Death,
            degree: cell.dim - 1,
            time: cell.filtration,
            cell: cell.id,
            position: p,
        };
        events[p] = Some(death);
        bars[bar].death = Some(death);
    }

    Ok(KernelPairs {
        block,
        bars,
        r_im: im.r,
        v_im: im.v,
        d_ker,
        r_ker: ker.r,
        v_ker: ker.v,
        ker_columns,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{CellSpec, Label};
    use crate::fixtures;

    fn degree_births(kp: &KernelPairs, degree: usize) -> usize {
        kp.births().filter(|e| e.degree == degree).count()
    }

    #[test]
    fn d_im_puts_block_rows_first() {
        let c = fixtures::cylinder();
        let d = build_d_im(&c, Block::A);
        assert_eq!(d.row_order().block_len(), 6);
        assert_eq!(build_d_im(&c, Block::AB).row_order().block_len(), 12);
        // columns are untouched
        assert_eq!(d.columns(), c.boundary_matrix().columns());
    }

    #[test]
    fn plain_cylinder_has_no_degree_one_kernel() {
        let c = fixtures::cylinder();
        for block in [Block::A, Block::B] {
            let kp = kernel_pairs(&c, block).unwrap();
            assert_eq!(degree_births(&kp, 1), 0);
        }
    }

    #[test]
    fn middle_triangle_gives_one_degree_one_birth() {
        let c = fixtures::cylinder_with_middle_triangle();
        let kp = kernel_pairs(&c, Block::A).unwrap();
        let births: Vec<_> = kp.births().filter(|e| e.degree == 1).collect();
        assert_eq!(births.len(), 1);
        let middle = fixtures::cylinder_middle_triangle_id();
        assert_eq!(births[0].cell, middle);
        // nothing in A can close it again
        assert!(kp.bars.iter().find(|b| b.birth.cell == middle).unwrap().death.is_none());
        // the representative is a 2-chain whose boundary is the top circle
        let rep = c.chain_from_positions(kp.relative_cycle(births[0].position).unwrap());
        let boundary = rep.boundary(&c);
        assert_eq!(boundary.len(), 3);
        assert!(boundary.cells().iter().all(|&e| c.cell(e).label == Label::A));
    }

    #[test]
    fn vertex_pair_joined_by_an_edge_has_no_birth() {
        let c = FilteredComplex::new(vec![
            CellSpec::new(0, 0, vec![], 0.0, Label::A),
            CellSpec::new(1, 0, vec![], 0.0, Label::B),
            CellSpec::new(2, 1, vec![0, 1], 1.0, Label::Interior),
        ])
        .unwrap();
        let kp = kernel_pairs(&c, Block::A).unwrap();
        assert!(kp.bars.is_empty());
    }

    #[test]
    fn component_merge_gives_infinite_then_finite_bar() {
        let c = fixtures::kernel_merge(false);
        let kp = kernel_pairs(&c, Block::A).unwrap();
        assert_eq!(kp.bars.len(), 1);
        let bar = kp.bars[0];
        assert_eq!((bar.degree(), bar.birth.time), (0, 2.0));
        assert!(bar.death.is_none());

        let c = fixtures::kernel_merge(true);
        let kp = kernel_pairs(&c, Block::A).unwrap();
        assert_eq!(kp.bars.len(), 1);
        let bar = kp.bars[0];
        assert_eq!(bar.birth.time, 2.0);
        assert_eq!(bar.death.map(|d| d.time), Some(3.0));
    }

    #[test]
    fn d_ker_columns_are_the_cycle_columns() {
        let mut specs = fixtures::triangle_specs();
        specs.pop();
        let c = FilteredComplex::new(specs).unwrap();
        let kp = kernel_pairs(&c, Block::A).unwrap();
        let zero = (0..c.len()).filter(|&p| kp.r_im.is_zero_column(p)).count();
        assert_eq!(kp.d_ker.n_cols(), zero);
        // three vertex columns and the loop
        assert_eq!(zero, 4);
        assert!(kp.d_ker.columns().iter().any(|col| col.len() == 3));
    }

    #[test]
    fn cylinder_d_ker_column_count() {
        let c = fixtures::cylinder();
        let kp = kernel_pairs(&c, Block::A).unwrap();
        // 9 vertices + 13 edge cycles + 0 two-cycles (the open cylinder has H_2 = 0)
        assert_eq!(kp.d_ker.n_cols(), 9 + 13);
    }

    #[test]
    fn tree_has_only_vertex_cycles() {
        let c = fixtures::kernel_merge(false);
        let kp = kernel_pairs(&c, Block::B).unwrap();
        let vertices = c.cells().iter().filter(|c| c.dim == 0).count();
        assert_eq!(kp.d_ker.n_cols(), vertices);
    }

    #[test]
    fn zero_columns_do_not_depend_on_the_block() {
        for seed in 0..50 {
            let c = fixtures::random_complex(seed);
            let runs: Vec<KernelPairs> = Block::ALL
                .iter()
                .map(|&b| kernel_pairs(&c, b).unwrap())
                .collect();
            for w in runs.windows(2) {
                assert_eq!(w[0].ker_columns, w[1].ker_columns, "seed {seed}");
            }
        }
    }

    #[test]
    fn births_outside_deaths_inside() {
        for seed in 0..100 {
            let c = fixtures::random_complex(seed);
            for block in Block::ALL {
                let kp = kernel_pairs(&c, block).unwrap();
                for bar in &kp.bars {
                    assert!(!block.contains(c.cell(bar.birth.cell).label));
                    if let Some(d) = bar.death {
                        assert!(block.contains(c.cell(d.cell).label));
                        assert!(d.position > bar.birth.position);
                        assert_eq!(d.degree, bar.birth.degree);
                    }
                }
            }
        }
    }
}
