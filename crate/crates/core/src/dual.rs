//! The dual filtered complex of a Delaunay complex.
//!
//! Every primal `k`-cell `σ` becomes a dual `(d-k)`-cell `σ*` with
//! `f*(σ*) = -f(σ)`. The dual order is the primal order reversed, so the
//! dual boundary matrix is the anti-transpose of the primal one. Sublevel
//! sets `f* < -r` are the Voronoi cells whose Delaunay duals are missing
//! from `X_r`, which is the void space at radius `r`.
//!
//! Tunnels through the void show up as `Cok Φ_0` of the dual with `A*` and
//! `B*` chosen among the dual vertices.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::alpha::{circumsphere, AlphaComplex, PointCloud, SliceSpec};
use crate::cobordism::{CobordismError, CobordismPair, CobordismReport};
use crate::complex::{Block, CellId, CellSpec, FilteredComplex, Label, RawLabel, ValidationReport};

#[derive(Debug, Error)]
pub enum DualError {
    #[error("complex has top dimension {max_dim}, expected {ambient}")]
    NotFullDimensional { max_dim: usize, ambient: usize },
    #[error("dual vertex {0} is not a dual vertex of this complex")]
    NotADualVertex(CellId),
    #[error("invalid dual labels:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Cobordism(#[from] CobordismError),
}

/// The dual complex and its correspondence to the primal cells.
#[derive(Clone, Debug, PartialEq)]
pub struct DualComplex {
    /// Dual cells; the id of each cell equals its filtration position.
    pub complex: FilteredComplex,
    /// Primal cell of each dual cell, indexed by dual id.
    pub primal: Vec<CellId>,
    pub ambient_dim: usize,
}

/// Builds the dual of a complex whose top cells have dimension `d`.
pub fn dualize(complex: &FilteredComplex, d: usize) -> Result<DualComplex, DualError> {
    if complex.max_dim() != d || complex.is_empty() {
        return Err(DualError::NotFullDimensional {
            max_dim: complex.max_dim(),
            ambient: d,
        });
    }
    let n = complex.len();
    let dual_pos = |id: CellId| n - 1 - complex.position(id);
    let mut cofacets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for cell in complex.cells() {
        for face in &cell.boundary {
            cofacets[dual_pos(*face)].push(dual_pos(cell.id));
        }
    }
    let primal: Vec<CellId> = (0..n).map(|q| complex.order()[n - 1 - q]).collect();
    let specs: Vec<CellSpec> = primal
        .iter()
        .enumerate()
        .map(|(q, &id)| {
            let cell = complex.cell(id);
            let mut boundary = std::mem::take(&mut cofacets[q]);
            boundary.sort_unstable();
            CellSpec::new(q, d - cell.dim, boundary, -cell.filtration, Label::Interior)
        })
        .collect();
    let order = (0..n).map(CellId).collect();
    let complex = FilteredComplex::with_order(specs, order, false).map_err(DualError::Invalid)?;
    Ok(DualComplex {
        complex,
        primal,
        ambient_dim: d,
    })
}

impl DualComplex {
    pub fn dual_of(&self, primal: &FilteredComplex, id: CellId) -> CellId {
        CellId(primal.len() - 1 - primal.position(id))
    }

    /// Dual vertices, i.e. duals of the primal top cells.
    pub fn vertices(&self) -> impl Iterator<Item = CellId> + '_ {
        self.complex
            .cells()
            .iter()
            .filter(|c| c.dim == 0)
            .map(|c| c.id)
    }

    /// Dual vertices in the closure of a dual cell.
    pub fn vertices_of(&self, id: CellId) -> BTreeSet<CellId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            let cell = self.complex.cell(x);
            if cell.dim == 0 {
                out.insert(x);
            }
            stack.extend(cell.boundary.iter().copied());
        }
        out
    }

    /// Dual cells of primal cells on the convex hull: the unbounded Voronoi cells.
    ///
    /// A primal cell is on the hull when it is a face of a `(d-1)`-cell with a
    /// single `d`-coface. In the dual such a cell has a missing face at infinity.
    pub fn unbounded(&self) -> Vec<bool> {
        let n = self.complex.len();
        let mut unbounded = vec![false; n];
        // dual vertices bound dual edges; a dual edge with one endpoint is unbounded
        for cell in self.complex.cells() {
            if cell.dim == 1 && cell.boundary.len() == 1 {
                unbounded[cell.id.0] = true;
            }
        }
        // closure upwards in the dual is closure downwards in the primal
        for q in 0..n {
            let cell = self.complex.cell(CellId(q));
            if cell.boundary.iter().any(|f| unbounded[f.0]) {
                unbounded[q] = true;
            }
        }
        unbounded
    }
}

/// Options for [`dual_tunnels`].
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DualOptions {
    /// Keep the unbounded Voronoi cells. Their missing faces at infinity make
    /// every hull-adjacent vertex a boundary in degree 0, which ties `A*` and
    /// `B*` to the point at infinity.
    pub include_unbounded: bool,
}

/// A degree-0 tunnel in radius units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualTunnel {
    /// Largest radius at which the void still connects `A*` to `B*` along this tunnel: `-f*` at birth.
    pub bottleneck_radius: f64,
    /// `-f*` at death, when the tunnel merges into an older one as `r` decreases; `None` if it never does.
    pub merge_radius: Option<f64>,
    /// The cobordism bar in dual (`f*`) units, with dual cell ids.
    pub pair: CobordismPair,
}

/// Cobordism analysis of a labeled dual.
#[derive(Clone, Debug)]
pub struct DualTunnels {
    /// The labeled dual complex the pipeline ran on.
    pub complex: FilteredComplex,
    /// Dual id in [`DualComplex::complex`] of each cell of `complex`.
    pub dual_ids: Vec<CellId>,
    pub report: CobordismReport,
    pub tunnels: Vec<DualTunnel>,
}

/// Labels dual cells from the vertex sets `A*`, `B*` and runs the cobordism pipeline.
///
/// A dual cell is labeled `A` when all its dual vertices lie in `A*`, and
/// likewise for `B`. Overlapping or empty selections fail validation.
pub fn dual_tunnels(
    dual: &DualComplex,
    astar: &[CellId],
    bstar: &[CellId],
    options: DualOptions,
) -> Result<DualTunnels, DualError> {
    for &v in astar.iter().chain(bstar) {
        if v.0 >= dual.complex.len() || dual.complex.cell(v).dim != 0 {
            return Err(DualError::NotADualVertex(v));
        }
    }
    let a: BTreeSet<CellId> = astar.iter().copied().collect();
    let b: BTreeSet<CellId> = bstar.iter().copied().collect();
    let unbounded = dual.unbounded();
    let kept: Vec<CellId> = dual
        .complex
        .order()
        .iter()
        .copied()
        .filter(|id| options.include_unbounded || !unbounded[id.0])
        .collect();
    let mut new_id = vec![usize::MAX; dual.complex.len()];
    for (i, id) in kept.iter().enumerate() {
        new_id[id.0] = i;
    }
    let specs: Vec<CellSpec> = kept
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let cell = dual.complex.cell(id);
            let vertices = dual.vertices_of(id);
            let in_a = vertices.iter().all(|v| a.contains(v));
            let in_b = vertices.iter().all(|v| b.contains(v));
            let label = match (in_a, in_b) {
                (true, true) => RawLabel::AB,
                (true, false) => RawLabel::A,
                (false, true) => RawLabel::B,
                (false, false) => RawLabel::I,
            };
            CellSpec {
                id: i,
                dim: cell.dim,
                boundary: cell.boundary.iter().map(|f| new_id[f.0]).collect(),
                f: cell.filtration,
                label,
            }
        })
        .collect();
    let order = (0..kept.len()).map(CellId).collect();
    let complex = FilteredComplex::with_order(specs, order, true).map_err(DualError::Invalid)?;
    let report = CobordismReport::compute(&complex)?;
    let tunnels = report
        .bars(0)
        .map(|pair| DualTunnel {
            bottleneck_radius: -pair.birth_time,
            merge_radius: pair.death_time.map(|t| -t),
            pair: pair.clone(),
        })
        .collect();
    Ok(DualTunnels {
        complex,
        dual_ids: kept,
        report,
        tunnels,
    })
}

/// Dual vertices whose primal top simplex has its circumcentre in the top or bottom slab.
///
/// Returns `(A*, B*)`. This is a heuristic; callers may pick any disjoint sets.
pub fn slab_selection(
    dual: &DualComplex,
    alpha: &AlphaComplex,
    cloud: &PointCloud,
    spec: &SliceSpec,
) -> (Vec<CellId>, Vec<CellId>) {
    let mut astar = Vec::new();
    let mut bstar = Vec::new();
    for v in dual.vertices() {
        let simplex = alpha.simplex(dual.primal[v.0]);
        let Some((centre, _)) = circumsphere(cloud, simplex) else {
            continue;
        };
        match spec.label_point(&centre) {
            Label::A => astar.push(v),
            Label::B => bstar.push(v),
            Label::Interior => {}
        }
    }
    (astar, bstar)
}

impl DualTunnels {
    /// Bars in radius units, sorted by decreasing bottleneck radius.
    pub fn by_radius(&self) -> Vec<&DualTunnel> {
        let mut out: Vec<&DualTunnel> = self.tunnels.iter().collect();
        out.sort_by(|x, y| y.bottleneck_radius.total_cmp(&x.bottleneck_radius));
        out
    }

    pub fn block_sizes(&self) -> (usize, usize) {
        (self.complex.count_in(Block::A), self.complex.count_in(Block::B))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_complex;
    use crate::fixtures::{self, SimplexBuilder};

    fn tetrahedron() -> FilteredComplex {
        let mut b = SimplexBuilder::new();
        for v in 0..4 {
            b.add(&[v], 0.0, Label::Interior);
        }
        for e in [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]] {
            b.add(&e, 1.0, Label::Interior);
        }
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            b.add(&t, 2.0, Label::Interior);
        }
        b.add(&[0, 1, 2, 3], 3.0, Label::Interior);
        FilteredComplex::structural(b.into_specs()).unwrap()
    }

    fn counts(c: &FilteredComplex) -> Vec<usize> {
        (0..=c.max_dim())
            .map(|k| c.cells().iter().filter(|x| x.dim == k).count())
            .collect()
    }

    #[test]
    fn tetrahedron_dual_counts() {
        let dual = dualize(&tetrahedron(), 3).unwrap();
        assert_eq!(counts(&dual.complex), vec![1, 4, 6, 4]);
        // every dual edge is a ray from the single Voronoi vertex
        assert!(dual
            .complex
            .cells()
            .iter()
            .filter(|c| c.dim == 1)
            .all(|c| c.boundary.len() == 1));
        assert!(dual.complex.cells().iter().all(|c| c.filtration <= 0.0));
    }

    #[test]
    fn boundary_is_the_anti_transpose() {
        let c = fixtures::cylinder();
        let dual = dualize(&c, 2).unwrap();
        assert_eq!(
            dual.complex.boundary_matrix().columns(),
            c.boundary_matrix().anti_transpose().columns()
        );
    }

    #[test]
    fn dualizing_twice_is_the_identity() {
        let c = fixtures::cylinder();
        let once = dualize(&c, 2).unwrap();
        let twice = dualize(&once.complex, 2).unwrap();
        for q in 0..c.len() {
            let back = twice.primal[q];
            let original = once.primal[back.0];
            assert_eq!(c.order()[q], original);
            let (x, y) = (c.cell(original), twice.complex.cell(CellId(q)));
            assert_eq!((x.dim, x.filtration), (y.dim, y.filtration));
        }
    }

    #[test]
    fn lower_dimensional_input_is_rejected() {
        let c = fixtures::two_tunnels();
        assert!(matches!(
            dualize(&c, 2),
            Err(DualError::NotFullDimensional { max_dim: 1, ambient: 2 })
        ));
    }

    #[test]
    fn void_sublevel_sets_match_missing_primal_cells() {
        let cloud = fixtures::cylinder_lattice_cloud(0);
        let alpha = alpha_complex(&cloud).unwrap();
        let dual = dualize(&alpha.complex, 3).unwrap();
        for r in [0.0, 0.05, 0.1, 0.142, 0.2, 1.0] {
            for (q, cell) in dual.complex.cells().iter().enumerate() {
                let primal = alpha.complex.cell(dual.primal[q]);
                assert_eq!(cell.filtration < -r, primal.filtration > r);
            }
        }
    }

    #[test]
    fn overlapping_or_empty_selections_fail_validation() {
        let cloud = fixtures::channel_cloud_2d(0);
        let alpha = alpha_complex(&cloud).unwrap();
        let dual = dualize(&alpha.complex, 2).unwrap();
        let v: Vec<CellId> = dual.vertices().take(2).collect();
        let err = dual_tunnels(&dual, &v, &v[..1], DualOptions::default()).unwrap_err();
        match err {
            DualError::Invalid(report) => assert!(report.to_string().contains("labels not disjoint")),
            other => panic!("unexpected {other:?}"),
        }
        let err = dual_tunnels(&dual, &[], &v[..1], DualOptions::default()).unwrap_err();
        match err {
            DualError::Invalid(report) => assert!(report.to_string().contains("A is empty")),
            other => panic!("unexpected {other:?}"),
        }
        let edge = dual.complex.cells().iter().find(|c| c.dim == 1).unwrap().id;
        assert!(matches!(
            dual_tunnels(&dual, &[edge], &v[..1], DualOptions::default()),
            Err(DualError::NotADualVertex(_))
        ));
    }
}
