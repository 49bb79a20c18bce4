//! Deterministic SVG rendering of graphs and paths for qualitative figures.

use crate::geom::{Bounds, Point};
use crate::graph::DirectedLaneGraph;
use crate::graph2path::PathSet;
use std::fmt::Write;

/// Fixed path palette; paths cycle through it in order.
const PALETTE: [&str; 8] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#17becf",
];

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// Pixel width of the drawing area (height follows the aspect ratio).
    pub width: f64,
    /// Pixel margin around the drawing area.
    pub margin: f64,
    pub highlight_junctions: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 640.0,
            margin: 24.0,
            highlight_junctions: true,
        }
    }
}

/// Renders the graph (vertices as dots, edges as arrows, junctions
/// highlighted) plus optional paths in palette colors. Identical inputs
/// produce byte-identical output.
pub fn render_svg(
    graph: &DirectedLaneGraph,
    paths: Option<&PathSet>,
    options: &RenderOptions,
) -> String {
    let mut bbox: Option<Bounds> = None;
    let mut feed = |p: &Point| match &mut bbox {
        None => bbox = Some(Bounds::new(p.x, p.y, p.x, p.y)),
        Some(b) => b.expand_to(p),
    };
    for (_, p) in graph.vertices() {
        feed(p);
    }
    if let Some(set) = paths {
        for path in &set.paths {
            for p in path.points() {
                feed(p);
            }
        }
    }
    let bbox = bbox.unwrap_or(Bounds::new(-1.0, -1.0, 1.0, 1.0));
    let span_x = bbox.width().max(1e-6);
    let span_y = bbox.height().max(1e-6);

    let draw_w = options.width;
    let draw_h = options.width * span_y / span_x;
    let total_w = draw_w + 2.0 * options.margin;
    let total_h = draw_h + 2.0 * options.margin;

    // ego frame: +y is the driving direction and points up in the figure
    let tx = |p: &Point| options.margin + (p.x - bbox.min_x) / span_x * draw_w;
    let ty = |p: &Point| options.margin + (bbox.max_y - p.y) / span_y * draw_h;
    let fmt = |v: f64| format!("{v:.3}");

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"##,
        fmt(total_w),
        fmt(total_h),
        fmt(total_w),
        fmt(total_h)
    );
    let _ = writeln!(
        svg,
        r##"<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#555555"/></marker></defs>"##
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="white" stroke="#cccccc"/>"##,
        fmt(total_w),
        fmt(total_h)
    );

    for (from, to) in graph.edges() {
        let (Some(a), Some(b)) = (graph.position(*from), graph.position(*to)) else {
            continue;
        };
        let _ = writeln!(
            svg,
            r##"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#555555" stroke-width="1.2" marker-end="url(#arrow)"/>"##,
            fmt(tx(&a)),
            fmt(ty(&a)),
            fmt(tx(&b)),
            fmt(ty(&b))
        );
    }

    if let Some(set) = paths {
        for (i, path) in set.paths.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let points: Vec<String> = path
                .points()
                .iter()
                .map(|p| format!("{},{}", fmt(tx(p)), fmt(ty(p))))
                .collect();
            let _ = writeln!(
                svg,
                r##"<polyline class="path" fill="none" stroke="{}" stroke-width="2.0" stroke-opacity="0.75" points="{}"/>"##,
                color,
                points.join(" ")
            );
        }
    }

    let junctions: std::collections::HashSet<_> = graph.junctions().into_iter().collect();
    for (id, p) in graph.vertices() {
        if options.highlight_junctions && junctions.contains(id) {
            let _ = writeln!(
                svg,
                r##"<circle class="junction" cx="{}" cy="{}" r="4.5" fill="#d62728" stroke="#7f1d1d"/>"##,
                fmt(tx(p)),
                fmt(ty(p))
            );
        } else {
            let _ = writeln!(
                svg,
                r##"<circle class="vertex" cx="{}" cy="{}" r="2.0" fill="#1f4f8f"/>"##,
                fmt(tx(p)),
                fmt(ty(p))
            );
        }
    }

    svg.push_str("</svg>\n");
    svg
}
