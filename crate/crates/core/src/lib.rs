//! Persistence of tunnels between two subcomplexes of a filtered cell complex.
//!
//! Given a filtered complex `X` with disjoint subcomplexes `A` and `B`, the
//! barcode of `Cok Φ_k = Ker ι^{A∪B} / (Ker ι^A + Ker ι^B)` tracks `(k+1)`-chains
//! whose boundary joins non-trivial cycles of `A` and `B`. All arithmetic is
//! over `GF(2)`.
//!
//! ```
//! use cobordia::cobordism::CobordismReport;
//! use cobordia::fixtures;
//!
//! let c = fixtures::cylinder();
//! let report = CobordismReport::compute(&c).unwrap();
//! let tube: Vec<_> = report.bars(1).collect();
//! assert_eq!(tube.len(), 1);
//! assert!(tube[0].is_infinite());
//! ```
//!
//! Modules, in pipeline order:
//!
//! - [`complex`]: cells, validation, filtration order, chains;
//! - [`reduction`]: sparse `GF(2)` matrices and `R = D·V`;
//! - [`kernel`]: kernel persistence of `A`, `B`, `A∪B` into `X`;
//! - [`cobordism`]: case classification, `D^Φ`, bars and representatives;
//! - [`alpha`]: point clouds, brute-force Delaunay, alpha values, slabs;
//! - [`dual`]: the Voronoi dual and tunnels through the void;
//! - [`oracle`]: dense linear-algebra reference used by the tests;
//! - [`report`] and [`cli`]: CSV, JSON and SVG outputs and the binary.

pub mod alpha;
pub mod cli;
pub mod cobordism;
pub mod complex;
pub mod dual;
pub mod fixtures;
pub mod kernel;
pub mod oracle;
pub mod reduction;
pub mod report;
