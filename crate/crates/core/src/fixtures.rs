//! Small labeled complexes with known answers, shared by tests, docs and the CLI.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alpha::PointCloud;
use crate::complex::{CellId, CellSpec, FilteredComplex, Label};

/// Builds specs from vertex tuples. Faces are looked up by their vertex sets.
///
/// Cells must come in dimension order. Each entry is `(vertices, f, label)`.
pub struct SimplexBuilder {
    specs: Vec<CellSpec>,
    ids: HashMap<Vec<usize>, usize>,
}

impl Default for SimplexBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SimplexBuilder {
    pub fn new() -> Self {
        SimplexBuilder {
            specs: Vec::new(),
            ids: HashMap::new(),
        }
    }

    /// Adds the simplex on `vertices` (vertex indices as given to earlier `add` calls).
    pub fn add(&mut self, vertices: &[usize], f: f64, label: Label) -> usize {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        let id = self.specs.len();
        let boundary = if key.len() == 1 {
            Vec::new()
        } else {
            (0..key.len())
                .map(|skip| {
                    let face: Vec<usize> = key
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    *self
                        .ids
                        .get(&face)
                        .unwrap_or_else(|| panic!("missing face {face:?} of {key:?}"))
                })
                .collect()
        };
        self.specs
            .push(CellSpec::new(id, key.len() - 1, boundary, f, label));
        self.ids.insert(key, id);
        id
    }

    pub fn id(&self, vertices: &[usize]) -> Option<usize> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.ids.get(&key).copied()
    }

    pub fn specs(&self) -> &[CellSpec] {
        &self.specs
    }

    pub fn into_specs(self) -> Vec<CellSpec> {
        self.specs
    }
}

const CYLINDER_EDGES: [[usize; 2]; 21] = [
    [0, 1],
    [0, 2],
    [1, 2],
    [3, 4],
    [3, 5],
    [4, 5],
    [6, 7],
    [6, 8],
    [7, 8],
    [0, 3],
    [1, 4],
    [2, 5],
    [3, 6],
    [4, 7],
    [5, 8],
    [0, 4],
    [0, 5],
    [1, 5],
    [3, 7],
    [3, 8],
    [4, 8],
];

const CYLINDER_TRIANGLES: [[usize; 3]; 12] = [
    [0, 1, 4],
    [0, 2, 5],
    [0, 3, 4],
    [0, 3, 5],
    [1, 2, 5],
    [1, 4, 5],
    [3, 4, 7],
    [3, 5, 8],
    [3, 6, 7],
    [3, 6, 8],
    [4, 5, 8],
    [4, 7, 8],
];

fn ring_label(v: usize) -> Label {
    match v {
        0..=2 => Label::A,
        6..=8 => Label::B,
        _ => Label::Interior,
    }
}

fn cylinder_builder() -> SimplexBuilder {
    let mut b = SimplexBuilder::new();
    let mut f = 0.0;
    let mut next = || {
        f += 1.0;
        f
    };
    for v in 0..9 {
        b.add(&[v], next(), ring_label(v));
    }
    for e in CYLINDER_EDGES {
        let label = match (ring_label(e[0]), ring_label(e[1])) {
            (Label::A, Label::A) => Label::A,
            (Label::B, Label::B) => Label::B,
            _ => Label::Interior,
        };
        b.add(&e, next(), label);
    }
    for t in CYLINDER_TRIANGLES {
        b.add(&t, next(), Label::Interior);
    }
    b
}

/// Open triangulated cylinder: three rings of three vertices, `A` the ring
/// `v0 v1 v2`, `B` the ring `v6 v7 v8`. Cells enter in dimension order with `f = 1..=42`.
pub fn cylinder_specs() -> Vec<CellSpec> {
    cylinder_builder().into_specs()
}

pub fn cylinder() -> FilteredComplex {
    FilteredComplex::new(cylinder_specs()).expect("cylinder fixture is valid")
}

/// The cylinder with its `A` ring capped by a triangle in `A` at `f = 43`.
pub fn cylinder_with_top_triangle() -> FilteredComplex {
    let mut b = cylinder_builder();
    b.add(&[0, 1, 2], 43.0, Label::A);
    FilteredComplex::new(b.into_specs()).expect("valid")
}

/// The cylinder pinched shut by an interior triangle on the middle ring at `f = 43`.
pub fn cylinder_with_middle_triangle() -> FilteredComplex {
    let mut b = cylinder_builder();
    b.add(&[3, 4, 5], 43.0, Label::Interior);
    FilteredComplex::new(b.into_specs()).expect("valid")
}

pub fn cylinder_middle_triangle_id() -> CellId {
    CellId(42)
}

pub fn cylinder_top_triangle_id() -> CellId {
    CellId(42)
}

/// Filled triangle on vertices labeled `A`, `B`, interior, with increasing `f`.
/// The 2-cell is last, so popping it leaves the hollow triangle.
pub fn triangle_specs() -> Vec<CellSpec> {
    let mut b = SimplexBuilder::new();
    b.add(&[0], 0.0, Label::A);
    b.add(&[1], 1.0, Label::B);
    b.add(&[2], 2.0, Label::Interior);
    b.add(&[0, 1], 3.0, Label::Interior);
    b.add(&[0, 2], 4.0, Label::Interior);
    b.add(&[1, 2], 5.0, Label::Interior);
    b.add(&[0, 1, 2], 6.0, Label::Interior);
    b.into_specs()
}

/// Two `A` vertices joined through a `B` vertex at `f = 1, 2`, optionally
/// followed by an `A` edge between them at `f = 3`.
pub fn kernel_merge(with_a_edge: bool) -> FilteredComplex {
    let mut b = SimplexBuilder::new();
    b.add(&[0], 0.0, Label::A);
    b.add(&[1], 0.0, Label::A);
    b.add(&[2], 0.0, Label::B);
    b.add(&[0, 2], 1.0, Label::Interior);
    b.add(&[1, 2], 2.0, Label::Interior);
    if with_a_edge {
        b.add(&[0, 1], 3.0, Label::A);
    }
    FilteredComplex::new(b.into_specs()).expect("valid")
}

/// One `A` vertex and one `B` vertex joined by an interior edge at `f = 1`.
pub fn bridge() -> FilteredComplex {
    let mut b = SimplexBuilder::new();
    b.add(&[0], 0.0, Label::A);
    b.add(&[1], 0.0, Label::B);
    b.add(&[0, 1], 1.0, Label::Interior);
    FilteredComplex::new(b.into_specs()).expect("valid")
}

const TWO_TUNNEL_NAMES: [&str; 7] = ["a1", "a2", "b1", "b2", "a1b1", "a2b2", "b1b2"];

fn two_tunnels_with(swap: bool) -> FilteredComplex {
    let (la, lb) = if swap {
        (Label::B, Label::A)
    } else {
        (Label::A, Label::B)
    };
    let mut b = SimplexBuilder::new();
    b.add(&[0], 0.0, la);
    b.add(&[1], 0.0, la);
    b.add(&[2], 0.0, lb);
    b.add(&[3], 0.0, lb);
    b.add(&[0, 2], 1.0, Label::Interior);
    b.add(&[1, 3], 2.0, Label::Interior);
    b.add(&[2, 3], 3.0, lb);
    FilteredComplex::new(b.into_specs()).expect("valid")
}

/// Degree-0 tunnels `a1-b1` at `f = 1` and `a2-b2` at `f = 2`; the `B` edge
/// `b1-b2` at `f = 3` merges them.
pub fn two_tunnels() -> FilteredComplex {
    two_tunnels_with(false)
}

/// [`two_tunnels`] with the labels swapped, so the merging edge lies in `A`.
pub fn two_tunnels_mirrored() -> FilteredComplex {
    two_tunnels_with(true)
}

/// Cell of [`two_tunnels`] by name (`"a1"`, `"a1b1"`, `"b1b2"`, ...).
pub fn two_tunnels_edge(name: &str) -> CellId {
    let i = TWO_TUNNEL_NAMES
        .iter()
        .position(|&n| n == name)
        .unwrap_or_else(|| panic!("no cell named {name}"));
    CellId(i)
}

/// Seeded random simplicial complex on 4 to 7 vertices with at most 30 cells.
///
/// Filtration values are small integers, so ties are common. Labels are
/// face-closed and both `A` and `B` are non-empty.
pub fn random_complex(seed: u64) -> FilteredComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=7);
    let mut labels: Vec<Label> = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => Label::A,
            1 => Label::B,
            _ => Label::Interior,
        })
        .collect();
    labels[0] = Label::A;
    labels[1] = Label::B;

    let mut b = SimplexBuilder::new();
    let mut f: HashMap<usize, f64> = HashMap::new();
    let mut label_of: HashMap<usize, Label> = HashMap::new();
    for (v, &label) in labels.iter().enumerate() {
        let value = rng.gen_range(0..3) as f64;
        let id = b.add(&[v], value, label);
        f.insert(id, value);
        label_of.insert(id, label);
    }

    let mut simplices: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for k in 1..=3 {
        let previous: Vec<Vec<usize>> = simplices.iter().filter(|s| s.len() == k).cloned().collect();
        let mut candidates = Vec::new();
        for s in &previous {
            for v in (s[k - 1] + 1)..n {
                let mut t = s.clone();
                t.push(v);
                let faces_present = (0..t.len()).all(|skip| {
                    let face: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    b.id(&face).is_some()
                });
                if faces_present {
                    candidates.push(t);
                }
            }
        }
        let keep = [0.0, 0.6, 0.5, 0.5][k];
        for t in candidates {
            if b.specs().len() >= 30 || !rng.gen_bool(keep) {
                continue;
            }
            let faces: Vec<usize> = (0..t.len())
                .map(|skip| {
                    let face: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    b.id(&face).unwrap()
                })
                .collect();
            let max_face = faces.iter().map(|id| f[id]).fold(f64::MIN, f64::max);
            let value = max_face + rng.gen_range(0..=2) as f64;
            let shared = label_of[&faces[0]];
            let label = if shared != Label::Interior
                && faces.iter().all(|id| label_of[id] == shared)
                && rng.gen_bool(0.7)
            {
                shared
            } else {
                Label::Interior
            };
            let id = b.add(&t, value, label);
            f.insert(id, value);
            label_of.insert(id, label);
            simplices.push(t);
        }
    }
    FilteredComplex::new(b.into_specs()).expect("random fixture is valid")
}

/// Axis of the lattice channel in the `(x, y)` plane.
pub const CHANNEL_CENTRE: [f64; 2] = [0.5, 0.5];
/// Nominal inner radius of the lattice channel.
pub const CHANNEL_RADIUS: f64 = 0.15;
pub const LATTICE_RINGS: usize = 6;
pub const LATTICE_RING_POINTS: usize = 10;
/// Arc length between neighbours on a ring.
pub const LATTICE_SPACING: f64 = std::f64::consts::TAU * CHANNEL_RADIUS / LATTICE_RING_POINTS as f64;
/// Slab width that captures exactly the top and bottom rings.
pub const LATTICE_EPSILON: f64 = 0.1;

/// Sixty points on six jittered rings around a vertical channel of radius about 0.15.
///
/// Rings sit at `z = 0.05 + 0.18 l`. Odd rings are turned by half a step, so
/// the wall is a staggered lattice.
pub fn cylinder_lattice_cloud(seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = std::f64::consts::TAU / LATTICE_RING_POINTS as f64;
    let mut points = Vec::with_capacity(LATTICE_RINGS * LATTICE_RING_POINTS);
    for l in 0..LATTICE_RINGS {
        let z = 0.05 + 0.18 * l as f64;
        let offset = if l % 2 == 1 { step / 2.0 } else { 0.0 };
        for i in 0..LATTICE_RING_POINTS {
            let t = offset + step * i as f64 + rng.gen_range(-0.05..0.05);
            let r = CHANNEL_RADIUS + rng.gen_range(-0.01..0.01);
            points.push(vec![
                CHANNEL_CENTRE[0] + r * t.cos(),
                CHANNEL_CENTRE[1] + r * t.sin(),
                (z + rng.gen_range(-0.01..0.01)).clamp(0.0, 1.0),
            ]);
        }
    }
    PointCloud::new(points).expect("lattice lies in the unit box")
}

/// Half-width of the vertical channel in [`channel_cloud_2d`].
pub const CHANNEL_HALF_WIDTH: f64 = 0.15;

/// Two jittered vertical walls of 14 points at `x = 0.35` and `x = 0.65`.
///
/// The gaps inside each wall are much narrower than the channel between
/// them, so the widest top-to-bottom passage is the channel.
pub fn channel_cloud_2d(seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    for x in [0.5 - CHANNEL_HALF_WIDTH, 0.5 + CHANNEL_HALF_WIDTH] {
        for i in 0..14 {
            let y = 0.03 + 0.0725 * i as f64;
            points.push(vec![
                x + rng.gen_range(-0.01..0.01),
                (y + rng.gen_range(-0.01..0.01)).clamp(0.0, 1.0),
            ]);
        }
    }
    PointCloud::new(points).expect("walls lie in the unit box")
}
