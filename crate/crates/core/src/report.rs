//! Text outputs: bar tables, representative JSON and persistence diagrams.
//!
//! Every writer is deterministic for a fixed input, so outputs diff cleanly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cobordism::{CobordismPair, CobordismReport};
use crate::complex::{Block, CellId, Chain, FilteredComplex};
use crate::dual::DualTunnels;
use crate::kernel::KernelPairs;

fn time(t: Option<f64>) -> String {
    t.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

fn cell(c: Option<CellId>) -> String {
    c.map_or_else(String::new, |c| c.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
}

/// Bars as CSV, sorted by `(degree, birth, death)`, with `inf` for bars that never die.
pub fn bars_csv<'a>(pairs: impl IntoIterator<Item = &'a CobordismPair>) -> String {
    let mut pairs: Vec<CobordismPair> = pairs.into_iter().cloned().collect();
    crate::cobordism::sort_pairs(&mut pairs);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "degree",
        "birth",
        "death",
        "birth_cell",
        "death_cell",
        "case_birth",
        "case_death",
    ])
    .expect("in-memory write");
    for p in &pairs {
        w.write_record([
            p.degree.to_string(),
            p.birth_time.to_string(),
            time(p.death_time),
            p.birth_cell.to_string(),
            cell(p.death_cell),
            p.case_at_birth.to_string(),
            p.case_at_death.map_or_else(String::new, |c| c.to_string()),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Kernel bars of several blocks. An empty death field means the bar never dies.
pub fn kernel_csv<'a>(runs: impl IntoIterator<Item = &'a KernelPairs>) -> String {
    let mut rows = Vec::new();
    for kp in runs {
        for bar in &kp.bars {
            rows.push((bar.degree(), bar.birth.time, bar.death.map(|d| d.time), bar, kp.block));
        }
    }
    rows.sort_by(|x, y| {
        x.0.cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.unwrap_or(f64::INFINITY).total_cmp(&y.2.unwrap_or(f64::INFINITY)))
            .then(x.4.to_string().cmp(&y.4.to_string()))
            .then(x.3.birth.position.cmp(&y.3.birth.position))
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["degree", "birth", "death", "birth_cell", "death_cell", "block"])
        .expect("in-memory write");
    for (degree, birth, death, bar, block) in rows {
        w.write_record([
            degree.to_string(),
            birth.to_string(),
            death.map_or_else(String::new, |d| d.to_string()),
            bar.birth.cell.to_string(),
            cell(bar.death.map(|d| d.cell)),
            block.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Dual tunnels in radius units, widest first.
///
/// `merge_radius` is `inf` for a tunnel that never merges into another as `r` shrinks.
/// Cell columns hold primal cell ids.
pub fn dual_csv(tunnels: &DualTunnels, primal_of_dual: &[CellId]) -> String {
    let primal = |c: CellId| primal_of_dual[tunnels.dual_ids[c.0].0];
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "degree",
        "bottleneck_radius",
        "merge_radius",
        "birth_primal_cell",
        "death_primal_cell",
    ])
    .expect("in-memory write");
    for t in tunnels.by_radius() {
        w.write_record([
            t.pair.degree.to_string(),
            t.bottleneck_radius.to_string(),
            time(t.merge_radius),
            primal(t.pair.birth_cell).to_string(),
            cell(t.pair.death_cell.map(primal)),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

#[derive(Serialize)]
struct RepresentativeRecord<'a> {
    degree: usize,
    birth: f64,
    death: Option<f64>,
    birth_cell: CellId,
    death_cell: Option<CellId>,
    representative_at_birth: &'a Chain,
    representative_before_death: Option<&'a Chain>,
    boundary_in_a: Chain,
    boundary_in_b: Chain,
}

/// Representative chains of every bar as pretty JSON.
///
/// The boundary columns split `∂` of the representative at birth over `A` and `B`.
pub fn representatives_json(report: &CobordismReport, complex: &FilteredComplex) -> String {
    let records: Vec<RepresentativeRecord> = report
        .pairs
        .iter()
        .map(|p| {
            let boundary = p.representative_at_birth.boundary(complex);
            RepresentativeRecord {
                degree: p.degree,
                birth: p.birth_time,
                death: p.death_time,
                birth_cell: p.birth_cell,
                death_cell: p.death_cell,
                representative_at_birth: &p.representative_at_birth,
                representative_before_death: p.representative_before_death.as_ref(),
                boundary_in_a: boundary.restrict(complex, Block::A),
                boundary_in_b: boundary.restrict(complex, Block::B),
            }
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("records serialize") + "\n"
}

/// A point of a persistence diagram.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DiagramPoint {
    pub degree: usize,
    pub birth: f64,
    pub death: Option<f64>,
}

impl From<&CobordismPair> for DiagramPoint {
    fn from(p: &CobordismPair) -> Self {
        DiagramPoint {
            degree: p.degree,
            birth: p.birth_time,
            death: p.death_time,
        }
    }
}

const SIZE: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Square persistence diagram with the diagonal and a dashed horizon for bars that never die.
///
/// The horizon sits at 1.05 times the largest finite value.
pub fn persistence_svg(points: &[DiagramPoint], title: &str) -> String {
    let finite = points
        .iter()
        .flat_map(|p| std::iter::once(p.birth).chain(p.death))
        .filter(|x| x.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi) } else { (0.0, 1.0) };
    let horizon = if hi > 0.0 { 1.05 * hi } else { hi + 0.05 * (hi - lo).max(1.0) };
    let top = horizon + 0.02 * (horizon - lo).max(f64::EPSILON);
    let span = (top - lo).max(f64::EPSILON);
    let plot = SIZE - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + (v - lo) / span * plot;
    let y = |v: f64| SIZE - MARGIN - (v - lo) / span * plot;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        x(lo),
        y(lo),
        x(top),
        y(top)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        y(horizon),
        SIZE - MARGIN,
        y(horizon)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">birth</text>"#,
        SIZE / 2.0,
        SIZE - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {})">death</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    for (label, v) in [(lo, lo), (hi, hi)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            x(v),
            SIZE - MARGIN + 14.0,
            fmt_tick(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.2}" font-size="10" text-anchor="end">inf</text>"#,
        MARGIN - 4.0,
        y(horizon) + 3.0
    );
    let mut degrees: Vec<usize> = points.iter().map(|p| p.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for (i, d) in degrees.iter().enumerate() {
        let colour = COLOURS[d % COLOURS.len()];
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{ly}" r="4" fill="{colour}"/><text x="{}" y="{}" font-size="10">H{d}</text>"#,
            SIZE - MARGIN - 30.0,
            SIZE - MARGIN - 22.0,
            ly + 3.0
        );
    }
    for p in points {
        let colour = COLOURS[p.degree % COLOURS.len()];
        let dy = p.death.map_or(horizon, |d| d);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}" fill-opacity="0.8"/>"#,
            x(p.birth),
            y(dy)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::kernel_pairs;

    #[test]
    fn cylinder_csv() {
        let c = fixtures::cylinder();
        let r = CobordismReport::compute(&c).unwrap();
        let csv = bars_csv(&r.pairs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "degree,birth,death,birth_cell,death_cell,case_birth,case_death"
        );
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,") && lines[1].contains(",inf,"));
        assert!(lines[2].starts_with("1,") && lines[2].contains(",inf,"));
    }

    #[test]
    fn two_tunnel_csv_is_sorted() {
        let c = fixtures::two_tunnels();
        let r = CobordismReport::compute(&c).unwrap();
        assert_eq!(
            bars_csv(&r.pairs),
            "degree,birth,death,birth_cell,death_cell,case_birth,case_death\n\
             0,1,inf,4,,F,\n\
             0,2,3,5,6,F,G\n"
        );
    }

    #[test]
    fn kernel_csv_marks_infinite_with_empty_death() {
        let c = fixtures::kernel_merge(false);
        let kp = kernel_pairs(&c, Block::A).unwrap();
        assert_eq!(
            kernel_csv([&kp]),
            "degree,birth,death,birth_cell,death_cell,block\n0,2,,4,,A\n"
        );
    }

    #[test]
    fn representatives_round_trip_as_json() {
        let c = fixtures::cylinder_with_middle_triangle();
        let r = CobordismReport::compute(&c).unwrap();
        let json: serde_json::Value = serde_json::from_str(&representatives_json(&r, &c)).unwrap();
        let bars = json.as_array().unwrap();
        let finite = bars.iter().find(|b| b["degree"] == 1).unwrap();
        assert_eq!(finite["death_cell"], 42);
        assert!(finite["representative_before_death"].as_array().unwrap().len() > 1);
    }

    #[test]
    fn svg_has_diagonal_and_horizon() {
        let pts = [
            DiagramPoint {
                degree: 0,
                birth: 1.0,
                death: None,
            },
            DiagramPoint {
                degree: 0,
                birth: 2.0,
                death: Some(3.0),
            },
        ];
        let svg = persistence_svg(&pts, "two <tunnels>");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("two &lt;tunnels&gt;"));
        assert_eq!(svg.matches("r=\"3.5\"").count(), 2);
        // the infinite point sits on the horizon at 1.05 * 3
        let plot = SIZE - 2.0 * MARGIN;
        let top = 3.15 + 0.02 * 3.15;
        let y = SIZE - MARGIN - 3.15 / top * plot;
        assert!(svg.contains(&format!("cy=\"{y:.2}\" r=\"3.5\"")));
        assert_eq!(svg, persistence_svg(&pts, "two <tunnels>"));
    }
}
