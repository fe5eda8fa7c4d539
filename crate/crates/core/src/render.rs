//! Deterministic SVG pictures of regions and tilings.
//!
//! - lattice vertex `(p, q)` lands on the page at `(40(p + q/2), -20*sqrt(3)*q)`,
//!   so rows grow upward and the rhombi come out with unit side 40
//! - the outer boundary is stroked, interior holes are filled dark
//! - each lozenge orientation gets its own fill, so a tiling reads as the
//!   usual three-coloured box picture
//! - output is a pure function of the inputs, byte for byte

use std::fmt::Write as _;

use crate::lattice::{boundary_cycles, BoundaryCycle, Lozenge, LozengeKind, Region};

const UNIT: f64 = 40.0;
const MARGIN: f64 = 24.0;

const PAPER: &str = "#f4efe2";
const HOLE: &str = "#3d3a33";
const EDGE: &str = "#3d3a33";
const FILL_RIGHT: &str = "#e3b94e";
const FILL_LEFT: &str = "#89b7d4";
const FILL_VERTICAL: &str = "#b8557f";

fn page(p: i64, q: i64) -> (f64, f64) {
    (
        UNIT * (p as f64 + q as f64 / 2.0),
        -UNIT * 3f64.sqrt() / 2.0 * q as f64,
    )
}

fn points_attr(vertices: &[(i64, i64)]) -> String {
    let mut s = String::new();
    for (i, &(p, q)) in vertices.iter().enumerate() {
        let (x, y) = page(p, q);
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    s
}

fn lozenge_quad(l: &Lozenge) -> [(i64, i64); 4] {
    let (r, c) = (l.row, l.col);
    match l.kind {
        LozengeKind::Right => [(c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1)],
        LozengeKind::Left => [(c, r), (c + 1, r), (c, r + 1), (c - 1, r + 1)],
        LozengeKind::Vertical => [(c, r + 1), (c, r), (c + 1, r - 1), (c + 1, r)],
    }
}

fn fill_of(kind: LozengeKind) -> &'static str {
    match kind {
        LozengeKind::Right => FILL_RIGHT,
        LozengeKind::Left => FILL_LEFT,
        LozengeKind::Vertical => FILL_VERTICAL,
    }
}

/// Draw a region, optionally with a tiling laid over it, as a standalone
/// SVG document.
pub fn render_svg(region: &Region, tiling: Option<&[Lozenge]>) -> String {
    let cycles = boundary_cycles(region);
    if cycles.is_empty() {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 80 80\"></svg>\n"
            .to_string();
    }

    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for cycle in &cycles {
        for &(p, q) in &cycle.vertices {
            let (x, y) = page(p, q);
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
    }
    let view = format!(
        "{:.2} {:.2} {:.2} {:.2}",
        min_x - MARGIN,
        min_y - MARGIN,
        max_x - min_x + 2.0 * MARGIN,
        max_y - min_y + 2.0 * MARGIN
    );

    let outer_idx = cycles
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.signed_area2()
                .abs()
                .partial_cmp(&b.1.signed_area2().abs())
                .expect("areas are finite")
        })
        .map(|(i, _)| i)
        .expect("nonempty");
    let (outer, holes): (Vec<&BoundaryCycle>, Vec<&BoundaryCycle>) = {
        let mut outer = Vec::new();
        let mut holes = Vec::new();
        for (i, c) in cycles.iter().enumerate() {
            if i == outer_idx {
                outer.push(c);
            } else {
                holes.push(c);
            }
        }
        (outer, holes)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{view}\">"
    );
    let _ = writeln!(
        svg,
        "  <polygon points=\"{}\" fill=\"{PAPER}\" stroke=\"none\"/>",
        points_attr(&outer[0].vertices)
    );

    if let Some(tiling) = tiling {
        let mut ordered: Vec<Lozenge> = tiling.to_vec();
        ordered.sort();
        for l in &ordered {
            let _ = writeln!(
                svg,
                "  <polygon points=\"{}\" fill=\"{}\" stroke=\"{EDGE}\" stroke-width=\"1.5\" stroke-linejoin=\"round\"/>",
                points_attr(&lozenge_quad(l)),
                fill_of(l.kind)
            );
        }
    }

    for hole in &holes {
        let _ = writeln!(
            svg,
            "  <polygon points=\"{}\" fill=\"{HOLE}\" stroke=\"none\"/>",
            points_attr(&hole.vertices)
        );
    }
    let _ = writeln!(
        svg,
        "  <polygon points=\"{}\" fill=\"none\" stroke=\"{EDGE}\" stroke-width=\"3\" stroke-linejoin=\"round\"/>",
        points_attr(&outer[0].vertices)
    );
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
