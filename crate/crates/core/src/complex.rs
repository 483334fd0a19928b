//! Filtered regular cell complexes with two marked subcomplexes.
//!
//! A [`FilteredComplex`] is immutable once built. Every constructor runs
//! [`validate`] (or a variant of it) and refuses input that breaks one of the
//! structural invariants: `∂∂ = 0` over GF(2), face-monotone filtration
//! values, and face-closed, disjoint `A`/`B` labels.
//!
//! Cells are addressed in two ways. A [`CellId`] is the stable identifier
//! from the input; a *position* is the index of the cell in the totalized
//! filtration order. All matrix code works with positions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reduction::{RowOrder, SparseGF2Matrix};

/// Identifier of a cell. After validation the ids of a complex are exactly `0..N`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub usize);

impl CellId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Membership of a cell in the two marked subcomplexes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "I")]
    Interior,
}

/// Label as it appears in input files.
///
/// `AB` is not a legal label; it is accepted by the parser so that
/// [`validate`] can report the cell instead of failing with a parse error.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RawLabel {
    A,
    B,
    I,
    AB,
}

impl From<Label> for RawLabel {
    fn from(label: Label) -> Self {
        match label {
            Label::A => RawLabel::A,
            Label::B => RawLabel::B,
            Label::Interior => RawLabel::I,
        }
    }
}

/// A subcomplex selector: `A`, `B` or their union.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
    AB,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::A, Block::B, Block::AB];

    pub fn contains(self, label: Label) -> bool {
        matches!(
            (self, label),
            (Block::A, Label::A) | (Block::B, Label::B) | (Block::AB, Label::A | Label::B)
        )
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::A => "A",
            Block::B => "B",
            Block::AB => "AB",
        })
    }
}

impl FromStr for Block {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Block::A),
            "B" | "b" => Ok(Block::B),
            "AB" | "ab" | "A+B" | "AuB" => Ok(Block::AB),
            other => Err(format!("unknown block `{other}` (expected A, B or AB)")),
        }
    }
}

/// One cell as written in a complex file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: usize,
    pub dim: usize,
    #[serde(default)]
    pub boundary: Vec<usize>,
    pub f: f64,
    pub label: RawLabel,
}

impl CellSpec {
    pub fn new(id: usize, dim: usize, boundary: Vec<usize>, f: f64, label: Label) -> Self {
        CellSpec {
            id,
            dim,
            boundary,
            f,
            label: label.into(),
        }
    }
}

/// Top-level layout of the complex JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub cells: Vec<CellSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub dim: usize,
    /// Sorted ids of the `(dim - 1)`-cells with coefficient 1.
    pub boundary: Vec<CellId>,
    pub filtration: f64,
    pub label: Label,
}

/// A single broken invariant.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("duplicate cell id {0}")]
    DuplicateId(usize),
    #[error("cell id {id} outside the dense range 0..{len}")]
    IdOutOfRange { id: usize, len: usize },
    #[error("cell {cell} references unknown boundary cell {face}")]
    UnknownFace { cell: usize, face: usize },
    #[error("cell {cell} lists boundary cell {face} more than once")]
    RepeatedFace { cell: usize, face: usize },
    #[error("vertex {0} has a non-empty boundary")]
    VertexWithBoundary(usize),
    #[error("cell {cell} of dimension {dim} has boundary cell {face} of dimension {face_dim}")]
    FaceDimension {
        cell: usize,
        dim: usize,
        face: usize,
        face_dim: usize,
    },
    #[error("filtration value of cell {0} is not finite")]
    NonFiniteValue(usize),
    #[error("boundary of boundary of cell {0} is non-zero")]
    BoundaryNotClosed(usize),
    #[error("filtration not face-monotone: f({face}) > f({cell})")]
    NotMonotone { cell: usize, face: usize },
    #[error("labels not disjoint (cell {0} carries both A and B)")]
    LabelsNotDisjoint(usize),
    #[error("{block} not face-closed (cell {cell} has face {face} outside {block})")]
    NotFaceClosed { block: Block, cell: usize, face: usize },
    #[error("{0} is empty")]
    EmptyLabel(Block),
    #[error("filtration order is not a permutation of the cells")]
    OrderNotPermutation,
    #[error("filtration order places cell {later} (f = {later_f}) after cell {earlier} (f = {earlier_f})")]
    OrderNotMonotone {
        earlier: usize,
        earlier_f: f64,
        later: usize,
        later_f: f64,
    },
    #[error("filtration order places face {face} after cell {cell}")]
    OrderFaceAfterCell { cell: usize, face: usize },
}

/// Every invariant violated by a candidate complex. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a labeled filtered complex.
pub fn validate(cells: &[CellSpec]) -> ValidationReport {
    validate_with(cells, true)
}

/// Like [`validate`] but does not require `A` and `B` to be non-empty.
///
/// Used for intermediate complexes (alpha complexes before slicing, dual
/// complexes before the caller picks `A*`/`B*`).
pub fn validate_structure(cells: &[CellSpec]) -> ValidationReport {
    validate_with(cells, false)
}

fn validate_with(cells: &[CellSpec], require_labels: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = cells.len();

    let mut by_id: HashMap<usize, &CellSpec> = HashMap::with_capacity(n);
    for c in cells {
        if by_id.insert(c.id, c).is_some() {
            report.push(Violation::DuplicateId(c.id));
        }
        if c.id >= n {
            report.push(Violation::IdOutOfRange { id: c.id, len: n });
        }
    }

    let mut faces_known = vec![true; n];
    for (i, c) in cells.iter().enumerate() {
        if !c.f.is_finite() {
            report.push(Violation::NonFiniteValue(c.id));
        }
        if c.dim == 0 && !c.boundary.is_empty() {
            report.push(Violation::VertexWithBoundary(c.id));
        }
        let mut seen = Vec::with_capacity(c.boundary.len());
        for &face in &c.boundary {
            if seen.contains(&face) {
                report.push(Violation::RepeatedFace { cell: c.id, face });
            }
            seen.push(face);
            match by_id.get(&face) {
                None => {
                    faces_known[i] = false;
                    report.push(Violation::UnknownFace { cell: c.id, face });
                }
                Some(fc) => {
                    if c.dim > 0 && fc.dim + 1 != c.dim {
                        report.push(Violation::FaceDimension {
                            cell: c.id,
                            dim: c.dim,
                            face,
                            face_dim: fc.dim,
                        });
                    }
                    if fc.f.is_finite() && c.f.is_finite() && fc.f > c.f {
                        report.push(Violation::NotMonotone { cell: c.id, face });
                    }
                }
            }
        }
    }

    // ∂∂ = 0: every codimension-two face must be reached an even number of times.
    for (i, c) in cells.iter().enumerate() {
        if !faces_known[i] || c.dim < 2 {
            continue;
        }
        let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
        for face in &c.boundary {
            for &ff in &by_id[face].boundary {
                let e = parity.entry(ff).or_insert(false);
                *e = !*e;
            }
        }
        if parity.values().any(|&odd| odd) {
            report.push(Violation::BoundaryNotClosed(c.id));
        }
    }

    let in_block = |label: RawLabel, block: Block| match block {
        Block::A => matches!(label, RawLabel::A | RawLabel::AB),
        Block::B => matches!(label, RawLabel::B | RawLabel::AB),
        Block::AB => label != RawLabel::I,
    };
    for c in cells {
        if c.label == RawLabel::AB {
            report.push(Violation::LabelsNotDisjoint(c.id));
        }
        for block in [Block::A, Block::B] {
            if !in_block(c.label, block) {
                continue;
            }
            for face in &c.boundary {
                if let Some(fc) = by_id.get(face) {
                    if !in_block(fc.label, block) {
                        report.push(Violation::NotFaceClosed {
                            block,
                            cell: c.id,
                            face: *face,
                        });
                    }
                }
            }
        }
    }
    if require_labels {
        for block in [Block::A, Block::B] {
            if !cells.iter().any(|c| in_block(c.label, block)) {
                report.push(Violation::EmptyLabel(block));
            }
        }
    }
    report
}

/// Tie-breaking rule used to refine `f` into a strict total order.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Sort by `(f, dimension, id)`.
    #[default]
    DimensionThenId,
    /// Sort by `f`, keeping the current order among equal values.
    KeepCurrent,
}

/// A validated filtered cell complex with a strict total order on its cells.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    cells: Vec<Cell>,
    order: Vec<CellId>,
    position: Vec<usize>,
}

/// Errors raised while reading a complex file.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed complex JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid complex:\n{0}")]
    Invalid(ValidationReport),
}

impl FilteredComplex {
    /// Validates `cells` (including non-empty `A` and `B`) and totalizes with the default tie-break.
    pub fn new(cells: Vec<CellSpec>) -> Result<Self, ValidationReport> {
        let report = validate(&cells);
        if !report.is_valid() {
            return Err(report);
        }
        Ok(Self::build_sorted(cells, TieBreak::DimensionThenId))
    }

    /// Validates everything except non-emptiness of `A` and `B`.
    pub fn structural(cells: Vec<CellSpec>) -> Result<Self, ValidationReport> {
        let report = validate_structure(&cells);
        if !report.is_valid() {
            return Err(report);
        }
        Ok(Self::build_sorted(cells, TieBreak::DimensionThenId))
    }

    /// Builds a complex with an explicit filtration order.
    ///
    /// The order must list every id once, be non-decreasing in `f`, and place
    /// every face before its cofaces.
    pub fn with_order(
        cells: Vec<CellSpec>,
        order: Vec<CellId>,
        require_labels: bool,
    ) -> Result<Self, ValidationReport> {
        let mut report = validate_with(&cells, require_labels);
        if !report.is_valid() {
            return Err(report);
        }
        let complex = Self::build(cells);
        let n = complex.len();
        let mut position = vec![usize::MAX; n];
        for (p, id) in order.iter().enumerate() {
            if id.0 >= n || position[id.0] != usize::MAX {
                report.push(Violation::OrderNotPermutation);
                return Err(report);
            }
            position[id.0] = p;
        }
        if order.len() != n {
            report.push(Violation::OrderNotPermutation);
            return Err(report);
        }
        for w in order.windows(2) {
            let (a, b) = (&complex.cells[w[0].0], &complex.cells[w[1].0]);
            if a.filtration > b.filtration {
                report.push(Violation::OrderNotMonotone {
                    earlier: a.id.0,
                    earlier_f: a.filtration,
                    later: b.id.0,
                    later_f: b.filtration,
                });
            }
        }
        for c in &complex.cells {
            for face in &c.boundary {
                if position[face.0] > position[c.id.0] {
                    report.push(Violation::OrderFaceAfterCell {
                        cell: c.id.0,
                        face: face.0,
                    });
                }
            }
        }
        if !report.is_valid() {
            return Err(report);
        }
        Ok(FilteredComplex {
            order,
            position,
            ..complex
        })
    }

    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        let file: ComplexFile = serde_json::from_str(text)?;
        Self::new(file.cells).map_err(LoadError::Invalid)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Assumes `cells` passed validation.
    fn build(cells: Vec<CellSpec>) -> Self {
        let n = cells.len();
        let mut slots: Vec<Option<Cell>> = vec![None; n];
        for spec in cells {
            let mut boundary: Vec<CellId> = spec.boundary.iter().map(|&b| CellId(b)).collect();
            boundary.sort_unstable();
            let label = match spec.label {
                RawLabel::A => Label::A,
                RawLabel::B => Label::B,
                RawLabel::I => Label::Interior,
                RawLabel::AB => unreachable!("rejected by validation"),
            };
            slots[spec.id] = Some(Cell {
                id: CellId(spec.id),
                dim: spec.dim,
                boundary,
                filtration: spec.f,
                label,
            });
        }
        let cells: Vec<Cell> = slots
            .into_iter()
            .map(|c| c.expect("dense ids"))
            .collect();
        let order: Vec<CellId> = (0..n).map(CellId).collect();
        let position = (0..n).collect();
        FilteredComplex {
            cells,
            order,
            position,
        }
    }

    fn build_sorted(cells: Vec<CellSpec>, tie: TieBreak) -> Self {
        Self::build(cells).totalize(tie)
    }

    /// Refines `f` into a strict total order. Filtration values are untouched.
    pub fn totalize(&self, tie: TieBreak) -> FilteredComplex {
        let mut order = self.order.clone();
        match tie {
            TieBreak::DimensionThenId => order.sort_by(|a, b| {
                let (ca, cb) = (&self.cells[a.0], &self.cells[b.0]);
                ca.filtration
                    .total_cmp(&cb.filtration)
                    .then(ca.dim.cmp(&cb.dim))
                    .then(ca.id.cmp(&cb.id))
            }),
            TieBreak::KeepCurrent => order.sort_by(|a, b| {
                self.cells[a.0]
                    .filtration
                    .total_cmp(&self.cells[b.0].filtration)
                    .then(self.position[a.0].cmp(&self.position[b.0]))
            }),
        }
        let mut position = vec![0; order.len()];
        for (p, id) in order.iter().enumerate() {
            position[id.0] = p;
        }
        FilteredComplex {
            cells: self.cells.clone(),
            order,
            position,
        }
    }

    /// Same cells and order, new labels. The result is fully validated.
    pub fn relabel(&self, label: impl Fn(&Cell) -> Label) -> Result<Self, ValidationReport> {
        let specs = self
            .cells
            .iter()
            .map(|c| CellSpec {
                label: label(c).into(),
                ..self.spec_of(c)
            })
            .collect();
        Self::with_order(specs, self.order.clone(), true)
    }

    fn spec_of(&self, c: &Cell) -> CellSpec {
        CellSpec {
            id: c.id.0,
            dim: c.dim,
            boundary: c.boundary.iter().map(|b| b.0).collect(),
            f: c.filtration,
            label: c.label.into(),
        }
    }

    /// Cells in id order, in the file representation.
    pub fn to_specs(&self) -> Vec<CellSpec> {
        self.cells.iter().map(|c| self.spec_of(c)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ComplexFile {
            cells: self.to_specs(),
        })
        .expect("complex serializes")
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells indexed by id.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.0]
    }

    /// Ids in filtration order.
    pub fn order(&self) -> &[CellId] {
        &self.order
    }

    pub fn position(&self, id: CellId) -> usize {
        self.position[id.0]
    }

    pub fn cell_at(&self, position: usize) -> &Cell {
        &self.cells[self.order[position].0]
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn count_in(&self, block: Block) -> usize {
        self.cells.iter().filter(|c| block.contains(c.label)).count()
    }

    pub fn in_block(&self, position: usize, block: Block) -> bool {
        block.contains(self.cell_at(position).label)
    }

    /// Boundary matrix with rows and columns in filtration order.
    pub fn boundary_matrix(&self) -> SparseGF2Matrix {
        let columns = self
            .order
            .iter()
            .map(|id| {
                let mut col: Vec<usize> = self.cells[id.0]
                    .boundary
                    .iter()
                    .map(|b| self.position[b.0])
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        SparseGF2Matrix::from_sorted_columns(self.len(), columns)
    }

    /// Rows of `block` first (by filtration), then the rest (by filtration).
    pub fn block_row_order(&self, block: Block) -> RowOrder {
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            (0..self.len()).partition(|&p| self.in_block(p, block));
        let block_len = inside.len();
        RowOrder::from_sequence(inside.into_iter().chain(outside).collect(), block_len)
    }

    /// Converts a set of positions into a sorted chain of ids.
    pub fn chain_from_positions(&self, positions: &[usize]) -> Chain {
        Chain::new(positions.iter().map(|&p| self.order[p]).collect())
    }
}

/// A GF(2) chain: a sorted set of cell ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain(Vec<CellId>);

impl Chain {
    /// Duplicated ids cancel in pairs.
    pub fn new(mut cells: Vec<CellId>) -> Self {
        cells.sort_unstable();
        let mut out: Vec<CellId> = Vec::with_capacity(cells.len());
        for c in cells {
            if out.last() == Some(&c) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        Chain(out)
    }

    pub fn cells(&self) -> &[CellId] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn boundary(&self, complex: &FilteredComplex) -> Chain {
        Chain::new(
            self.0
                .iter()
                .flat_map(|&c| complex.cell(c).boundary.iter().copied())
                .collect(),
        )
    }

    pub fn sum(&self, other: &Chain) -> Chain {
        Chain::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    /// The cells of the chain whose label lies in `block`.
    pub fn restrict(&self, complex: &FilteredComplex, block: Block) -> Chain {
        Chain(
            self.0
                .iter()
                .copied()
                .filter(|&c| block.contains(complex.cell(c).label))
                .collect(),
        )
    }
}
