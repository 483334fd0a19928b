//! Births, deaths and pairings of open cobordisms between `A` and `B`.
//!
//! The cokernel of `Ker ι^A ⊕ Ker ι^B → Ker ι^{A∪B}` changes only at steps
//! where the three kernel modules change. Each step's triple of kernel
//! events matches one of eight admissible [`Case`]s. Case `F` is a birth of
//! a cobordism, and `C`, `G`, `H` are deaths.
//!
//! Pairing uses the matrix `D^Φ`. Its columns are the cycles of `X`, the
//! relative cycles with boundary in `A` (columns of `V^A_im` with a low in
//! the `A` block) and the relative cycles with boundary in `B`, and its rows
//! are ordered `A∪B` first. A cell that contributes two columns kills a
//! cobordism. After reduction the low of its second column is the birth
//! cell.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{Block, CellId, Chain, FilteredComplex, Label};
use crate::kernel::{kernel_pairs, EventKind, KernelError, KernelPairs};
use crate::reduction::{reduce, ReductionResult, SparseGF2Matrix};

/// The eight admissible combinations of simultaneous kernel events.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Case {
    /// Kernel events of `(Ker ι^A, Ker ι^B, Ker ι^{A∪B})` for this case.
    pub fn kernel_events(self) -> [Option<EventKind>; 3] {
        use EventKind::{Birth as Bi, Death as De};
        match self {
            Case::A => [Some(Bi), None, Some(Bi)],
            Case::B => [None, Some(Bi), Some(Bi)],
            Case::C => [Some(Bi), Some(Bi), Some(Bi)],
            Case::D => [Some(De), None, Some(De)],
            Case::E => [None, Some(De), Some(De)],
            Case::F => [None, None, Some(Bi)],
            Case::G => [Some(Bi), None, None],
            Case::H => [None, Some(Bi), None],
        }
    }

    /// Effect on the cokernel.
    pub fn cokernel_event(self) -> Option<EventKind> {
        match self {
            Case::F => Some(EventKind::Birth),
            Case::C | Case::G | Case::H => Some(EventKind::Death),
            _ => None,
        }
    }

    pub const ALL: [Case; 8] = [
        Case::A,
        Case::B,
        Case::C,
        Case::D,
        Case::E,
        Case::F,
        Case::G,
        Case::H,
    ];

    /// Matches an observed triple; `Ok(None)` for the no-event triple.
    pub fn classify(events: [Option<EventKind>; 3]) -> Result<Option<Case>, [Option<EventKind>; 3]> {
        if events == [None, None, None] {
            return Ok(None);
        }
        Case::ALL
            .into_iter()
            .find(|c| c.kernel_events() == events)
            .map(Some)
            .ok_or(events)
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CobordismError {
    #[error("step {position} (cell {cell}) has kernel events {events:?} matching no case")]
    InvalidEventTriple {
        position: usize,
        cell: CellId,
        events: [Option<EventKind>; 3],
    },
    #[error("pairing mismatch: {0}")]
    PairingMismatch(String),
    #[error("cell {0} does not kill a cobordism")]
    NotADeath(CellId),
    #[error("cell {0} does not give birth to an infinite cobordism")]
    NotInfinite(CellId),
    #[error("subcomplex {0} is empty")]
    EmptySubcomplex(Block),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Kernel events and the matched case at one filtration step.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct StepEvents {
    pub position: usize,
    pub cell: CellId,
    pub time: f64,
    /// `dim - 1` of the inserted cell, the degree any event lives in.
    pub degree: Option<usize>,
    /// Events in `Ker ι^A`, `Ker ι^B`, `Ker ι^{A∪B}`.
    pub kernel: [Option<EventKind>; 3],
    pub case: Option<Case>,
}

/// Matches every filtration step against the table of admissible cases.
pub fn classify_events(
    complex: &FilteredComplex,
    kp_a: &KernelPairs,
    kp_b: &KernelPairs,
    kp_ab: &KernelPairs,
) -> Result<Vec<StepEvents>, CobordismError> {
    (0..complex.len())
        .map(|p| {
            let cell = complex.cell_at(p);
            let kernel = [kp_a, kp_b, kp_ab].map(|kp| kp.event_at(p).map(|e| e.kind));
            let case = Case::classify(kernel).map_err(|events| CobordismError::InvalidEventTriple {
                position: p,
                cell: cell.id,
                events,
            })?;
            Ok(StepEvents {
                position: p,
                cell: cell.id,
                time: cell.filtration,
                degree: cell.dim.checked_sub(1),
                kernel,
                case,
            })
        })
        .collect()
}

/// Where a column of `D^Φ` came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ColumnSource {
    /// `V^A_im` column at a zero column of `R^A_im`.
    Cycle,
    /// `V^A_im` column whose `R^A_im` low lies in the `A` block.
    RelativeA,
    /// `V^B_im` column whose `R^B_im` low lies in the `B` block.
    RelativeB,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnProvenance {
    pub position: usize,
    pub cell: CellId,
    pub source: ColumnSource,
}

/// The pairing matrix for one homological degree.
#[derive(Clone, Debug)]
pub struct DPhi {
    pub degree: usize,
    /// Rows are filtration positions, ordered `A∪B` first.
    pub matrix: SparseGF2Matrix,
    pub provenance: Vec<ColumnProvenance>,
}

/// Assembles `D^Φ` in degree `degree` from the `A` and `B` kernel runs.
///
/// Columns follow the filtration order of their indexing cell. When a cell
/// contributes both a `V^A` and a `V^B` column, the `V^B` column goes after
/// the `V^A` column if the cell lies in `A`, and before it otherwise.
pub fn build_d_phi(
    complex: &FilteredComplex,
    kp_a: &KernelPairs,
    kp_b: &KernelPairs,
    degree: usize,
) -> DPhi {
    let rows = Arc::new(complex.block_row_order(Block::AB));
    let mut columns: Vec<Vec<usize>> = Vec::new();
    let mut provenance: Vec<ColumnProvenance> = Vec::new();
    for p in 0..complex.len() {
        let cell = complex.cell_at(p);
        if cell.dim != degree + 1 {
            continue;
        }
        debug_assert_eq!(kp_a.is_cycle_column(p), kp_b.is_cycle_column(p));
        let mk = |source| ColumnProvenance {
            position: p,
            cell: cell.id,
            source,
        };
        if kp_a.is_cycle_column(p) {
            columns.push(kp_a.v_im.column(p).to_vec());
            provenance.push(mk(ColumnSource::Cycle));
            continue;
        }
        let start = columns.len();
        if kp_a.has_block_low(p) {
            columns.push(kp_a.v_im.column(p).to_vec());
            provenance.push(mk(ColumnSource::RelativeA));
        }
        if kp_b.has_block_low(p) {
            let col = kp_b.v_im.column(p).to_vec();
            if columns.len() == start || cell.label == Label::A {
                columns.push(col);
                provenance.push(mk(ColumnSource::RelativeB));
            } else {
                columns.insert(start, col);
                provenance.insert(start, mk(ColumnSource::RelativeB));
            }
        }
    }
    let matrix = SparseGF2Matrix::from_sorted_columns(complex.len(), columns).with_row_order(rows);
    DPhi {
        degree,
        matrix,
        provenance,
    }
}

impl DPhi {
    /// Indices of the `D^Φ` columns indexed by `cell`.
    pub fn columns_of(&self, cell: CellId) -> Vec<usize> {
        self.provenance
            .iter()
            .enumerate()
            .filter(|(_, pr)| pr.cell == cell)
            .map(|(i, _)| i)
            .collect()
    }

    /// Cells contributing two columns, with the indices of the first and second column.
    pub fn double_columns(&self) -> Vec<(CellId, usize, usize)> {
        let mut out = Vec::new();
        for i in 1..self.provenance.len() {
            if self.provenance[i].cell == self.provenance[i - 1].cell {
                out.push((self.provenance[i].cell, i - 1, i));
            }
        }
        out
    }

    fn double(&self, cell: CellId) -> Result<(usize, usize), CobordismError> {
        match self.columns_of(cell).as_slice() {
            &[first, second] => Ok((first, second)),
            _ => Err(CobordismError::NotADeath(cell)),
        }
    }

    /// Sum of the two columns of `cell`: a chain alive just before `cell` kills it.
    pub fn representative_before_death(
        &self,
        complex: &FilteredComplex,
        cell: CellId,
    ) -> Result<Chain, CobordismError> {
        let (first, second) = self.double(cell)?;
        let mut positions = self.matrix.column(first).to_vec();
        positions.extend_from_slice(self.matrix.column(second));
        Ok(Chain::new(
            positions.into_iter().map(|p| complex.order()[p]).collect(),
        ))
    }

    pub fn reduce(self) -> ReducedDPhi {
        let reduction = reduce(&self.matrix);
        ReducedDPhi {
            dphi: self,
            reduction,
        }
    }
}

/// `D^Φ` together with `R^Φ = D^Φ V^Φ`.
#[derive(Clone, Debug)]
pub struct ReducedDPhi {
    pub dphi: DPhi,
    pub reduction: ReductionResult,
}

impl ReducedDPhi {
    /// Position of the birth cell of the cobordism killed by `cell`.
    ///
    /// The low of the reduced second column must lie outside the `A∪B` block.
    pub fn birth_position(&self, cell: CellId) -> Result<usize, CobordismError> {
        let (_, second) = self.dphi.double(cell)?;
        let r = &self.reduction.r;
        match r.low(second) {
            Some(low) if !r.row_order().in_block(low) => Ok(low),
            Some(_) => Err(CobordismError::PairingMismatch(format!(
                "reduced second column of cell {cell} has its low in the A∪B block"
            ))),
            None => Err(CobordismError::PairingMismatch(format!(
                "reduced second column of cell {cell} vanished"
            ))),
        }
    }

    /// Reduced second column of `cell`: a representative at the birth of the cobordism.
    pub fn representative_at_birth(
        &self,
        complex: &FilteredComplex,
        cell: CellId,
    ) -> Result<Chain, CobordismError> {
        let (_, second) = self.dphi.double(cell)?;
        Ok(complex.chain_from_positions(self.reduction.r.column(second)))
    }
}

/// One bar of the cobordism persistence module.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CobordismPair {
    pub degree: usize,
    pub birth_time: f64,
    pub birth_cell: CellId,
    pub birth_position: usize,
    pub death_time: Option<f64>,
    pub death_cell: Option<CellId>,
    pub death_position: Option<usize>,
    pub representative_at_birth: Chain,
    pub representative_before_death: Option<Chain>,
    pub case_at_birth: Case,
    pub case_at_death: Option<Case>,
}

impl CobordismPair {
    pub fn is_infinite(&self) -> bool {
        self.death_position.is_none()
    }

    pub fn alive_at(&self, position: usize) -> bool {
        self.birth_position <= position && self.death_position.is_none_or(|d| d > position)
    }

    pub fn persistence(&self) -> f64 {
        self.death_time.map_or(f64::INFINITY, |d| d - self.birth_time)
    }
}

/// Pairs births and deaths from the reduced `D^Φ` of one degree, cross-checked against the classified steps.
pub fn pair_cobordisms(
    complex: &FilteredComplex,
    reduced: &ReducedDPhi,
    steps: &[StepEvents],
    kp_ab: &KernelPairs,
) -> Result<Vec<CobordismPair>, CobordismError> {
    let degree = reduced.dphi.degree;
    let in_degree = |s: &&StepEvents| s.degree == Some(degree);
    let expected_deaths: Vec<usize> = steps
        .iter()
        .filter(in_degree)
        .filter(|s| s.case.and_then(Case::cokernel_event) == Some(EventKind::Death))
        .map(|s| s.position)
        .collect();
    let doubles = reduced.dphi.double_columns();
    let found_deaths: Vec<usize> = doubles
        .iter()
        .map(|&(cell, _, _)| complex.position(cell))
        .collect();
    if expected_deaths != found_deaths {
        return Err(CobordismError::PairingMismatch(format!(
            "degree {degree}: double columns at {found_deaths:?}, case C/G/H steps at {expected_deaths:?}"
        )));
    }

    let mut pairs = Vec::new();
    let mut matched: BTreeMap<usize, CellId> = BTreeMap::new();
    for &(cell, _, _) in &doubles {
        let death_position = complex.position(cell);
        let birth_position = reduced.birth_position(cell)?;
        let birth_step = &steps[birth_position];
        if birth_step.case != Some(Case::F) || birth_step.degree != Some(degree) {
            return Err(CobordismError::PairingMismatch(format!(
                "death at cell {cell} pairs with cell {} which is not a case F birth in degree {degree}",
                birth_step.cell
            )));
        }
        if let Some(other) = matched.insert(birth_position, cell) {
            return Err(CobordismError::PairingMismatch(format!(
                "birth at cell {} is killed by both {other} and {cell}",
                birth_step.cell
            )));
        }
        if birth_position >= death_position {
            return Err(CobordismError::PairingMismatch(format!(
                "death at cell {cell} precedes its birth"
            )));
        }
        let death = complex.cell(cell);
        pairs.push(CobordismPair {
            degree,
            birth_time: birth_step.time,
            birth_cell: birth_step.cell,
            birth_position,
            death_time: Some(death.filtration),
            death_cell: Some(cell),
            death_position: Some(death_position),
            representative_at_birth: reduced.representative_at_birth(complex, cell)?,
            representative_before_death: Some(
                reduced.dphi.representative_before_death(complex, cell)?,
            ),
            case_at_birth: Case::F,
            case_at_death: steps[death_position].case,
        });
    }

    for s in steps.iter().filter(in_degree) {
        if s.case != Some(Case::F) || matched.contains_key(&s.position) {
            continue;
        }
        pairs.push(CobordismPair {
            degree,
            birth_time: s.time,
            birth_cell: s.cell,
            birth_position: s.position,
            death_time: None,
            death_cell: None,
            death_position: None,
            representative_at_birth: complex.chain_from_positions(kp_ab.v_im.column(s.position)),
            representative_before_death: None,
            case_at_birth: Case::F,
            case_at_death: None,
        });
    }
    Ok(pairs)
}

/// Everything computed for one labeled complex.
#[derive(Clone, Debug)]
pub struct CobordismReport {
    pub kernel_a: KernelPairs,
    pub kernel_b: KernelPairs,
    pub kernel_ab: KernelPairs,
    pub steps: Vec<StepEvents>,
    /// Reduced `D^Φ`, indexed by degree.
    pub dphi: Vec<ReducedDPhi>,
    /// Bars sorted by `(degree, birth, death)`.
    pub pairs: Vec<CobordismPair>,
}

impl CobordismReport {
    pub fn compute(complex: &FilteredComplex) -> Result<Self, CobordismError> {
        for block in [Block::A, Block::B] {
            if complex.count_in(block) == 0 {
                return Err(CobordismError::EmptySubcomplex(block));
            }
        }
        let (kernel_a, (kernel_b, kernel_ab)) = rayon::join(
            || kernel_pairs(complex, Block::A),
            || {
                rayon::join(
                    || kernel_pairs(complex, Block::B),
                    || kernel_pairs(complex, Block::AB),
                )
            },
        );
        let (kernel_a, kernel_b, kernel_ab) = (kernel_a?, kernel_b?, kernel_ab?);
        let steps = classify_events(complex, &kernel_a, &kernel_b, &kernel_ab)?;

        let top = complex.max_dim();
        let dphi: Vec<ReducedDPhi> = (0..top)
            .map(|k| build_d_phi(complex, &kernel_a, &kernel_b, k).reduce())
            .collect();
        let mut pairs = Vec::new();
        for reduced in &dphi {
            pairs.extend(pair_cobordisms(complex, reduced, &steps, &kernel_ab)?);
        }
        sort_pairs(&mut pairs);

        let report = CobordismReport {
            kernel_a,
            kernel_b,
            kernel_ab,
            steps,
            dphi,
            pairs,
        };
        report.check_dimensions()?;
        Ok(report)
    }

    /// Living cobordisms must equal `dim Ker^{A∪B} - dim Ker^A - dim Ker^B` at every step.
    fn check_dimensions(&self) -> Result<(), CobordismError> {
        for degree in 0..self.dphi.len() {
            for p in 0..self.steps.len() {
                let expected = self.kernel_ab.living(degree, p) as isize
                    - self.kernel_a.living(degree, p) as isize
                    - self.kernel_b.living(degree, p) as isize;
                let living = self.living(degree, p) as isize;
                if living != expected {
                    return Err(CobordismError::PairingMismatch(format!(
                        "degree {degree}, step {p}: {living} living bars, kernel dimensions give {expected}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn living(&self, degree: usize, position: usize) -> usize {
        self.pairs
            .iter()
            .filter(|b| b.degree == degree && b.alive_at(position))
            .count()
    }

    pub fn bars(&self, degree: usize) -> impl Iterator<Item = &CobordismPair> {
        self.pairs.iter().filter(move |b| b.degree == degree)
    }

    fn dphi_for(&self, complex: &FilteredComplex, cell: CellId) -> Result<&ReducedDPhi, CobordismError> {
        complex
            .cell(cell)
            .dim
            .checked_sub(1)
            .and_then(|k| self.dphi.get(k))
            .ok_or(CobordismError::NotADeath(cell))
    }

    pub fn representative_before_death(
        &self,
        complex: &FilteredComplex,
        cell: CellId,
    ) -> Result<Chain, CobordismError> {
        self.dphi_for(complex, cell)?
            .dphi
            .representative_before_death(complex, cell)
    }

    pub fn representative_at_birth(
        &self,
        complex: &FilteredComplex,
        death_cell: CellId,
    ) -> Result<Chain, CobordismError> {
        self.dphi_for(complex, death_cell)?
            .representative_at_birth(complex, death_cell)
    }

    /// Relative cycle in `V^{A∪B}_im` for a cobordism that never dies.
    pub fn representative_infinite(
        &self,
        complex: &FilteredComplex,
        birth_cell: CellId,
    ) -> Result<Chain, CobordismError> {
        if !self
            .pairs
            .iter()
            .any(|b| b.birth_cell == birth_cell && b.is_infinite())
        {
            return Err(CobordismError::NotInfinite(birth_cell));
        }
        let column = self
            .kernel_ab
            .relative_cycle(complex.position(birth_cell))
            .ok_or(CobordismError::NotInfinite(birth_cell))?;
        Ok(complex.chain_from_positions(column))
    }
}

/// Sorts by `(degree, birth, death)` with infinite deaths last, then by cells for stability.
pub fn sort_pairs(pairs: &mut [CobordismPair]) {
    pairs.sort_by(|x, y| {
        x.degree
            .cmp(&y.degree)
            .then(x.birth_time.total_cmp(&y.birth_time))
            .then(
                x.death_time
                    .unwrap_or(f64::INFINITY)
                    .total_cmp(&y.death_time.unwrap_or(f64::INFINITY)),
            )
            .then(x.birth_position.cmp(&y.birth_position))
    });
}
