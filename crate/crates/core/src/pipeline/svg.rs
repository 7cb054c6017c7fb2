//! Deterministic SVG figures: the cluster scatter and the persona path
//! diagram. Numbers are printed with fixed precision so identical input
//! gives identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::clustering::NOISE;
use crate::matrix::Matrix;
use crate::seqmine::PersonaReport;

/// Twelve distinguishable colours, cycled for more clusters.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];
const NOISE_COLOR: &str = "#c7c7c7";
const BRANCH_COLOR: &str = "#7b2cbf";

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 480.0;
/// Plot area of the scatter, leaving the right strip for the legend.
pub const PLOT_LEFT: f64 = 40.0;
pub const PLOT_RIGHT: f64 = 560.0;
pub const PLOT_TOP: f64 = 40.0;
pub const PLOT_BOTTOM: f64 = 440.0;

#[derive(Debug, Error, PartialEq)]
pub enum SvgError {
    #[error("scatter needs a 2-column embedding, got {0} columns")]
    NotTwoDimensional(usize),
    #[error("{rows} rows but {labels} labels")]
    Length { rows: usize, labels: usize },
}

fn axis_map(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    move |v| {
        if max > min {
            lo + (v - min) / (max - min) * (hi - lo)
        } else {
            (lo + hi) / 2.0
        }
    }
}

fn header(s: &mut String) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
}

/// One circle per row, coloured by label, with a legend of id → count.
/// Data bounds map affinely onto the plot area (y grows upward).
pub fn render_cluster_scatter(embedding: &Matrix, labels: &[i32]) -> Result<String, SvgError> {
    if embedding.cols() != 2 {
        return Err(SvgError::NotTwoDimensional(embedding.cols()));
    }
    if embedding.rows() != labels.len() {
        return Err(SvgError::Length {
            rows: embedding.rows(),
            labels: labels.len(),
        });
    }
    let fx = axis_map(embedding.iter_rows().map(|r| r[0]), PLOT_LEFT, PLOT_RIGHT);
    let fy = axis_map(embedding.iter_rows().map(|r| r[1]), PLOT_BOTTOM, PLOT_TOP);
    let color = |l: i32| if l == NOISE { NOISE_COLOR } else { PALETTE[l as usize % PALETTE.len()] };

    let mut s = String::new();
    header(&mut s);
    let _ = writeln!(
        s,
        r##"<rect class="plot-area" x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{}" height="{}" fill="none" stroke="#cccccc"/>"##,
        PLOT_RIGHT - PLOT_LEFT,
        PLOT_BOTTOM - PLOT_TOP
    );
    let _ = writeln!(s, r#"<text x="{PLOT_LEFT}" y="24">PC1 vs PC2</text>"#);
    for (row, &l) in embedding.iter_rows().zip(labels) {
        let _ = writeln!(
            s,
            r#"<circle class="marker" data-cluster="{l}" cx="{:.3}" cy="{:.3}" r="2.5" fill="{}" fill-opacity="0.7"/>"#,
            fx(row[0]),
            fy(row[1]),
            color(l)
        );
    }
    let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // clusters ascending, noise last
    let mut entries: Vec<(i32, usize)> = counts.iter().filter(|(l, _)| **l != NOISE).map(|(&l, &c)| (l, c)).collect();
    entries.extend(counts.get(&NOISE).map(|&c| (NOISE, c)));
    for (i, (l, c)) in entries.into_iter().enumerate() {
        let y = PLOT_TOP + 18.0 * i as f64;
        let name = if l == NOISE { "noise".to_string() } else { format!("cluster {l}") };
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><rect x="580" y="{:.1}" width="10" height="10" fill="{}"/><text x="596" y="{:.1}">{name} ({c})</text></g>"#,
            y,
            color(l),
            y + 9.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Node layout: cluster ids on a circle in ascending order.
fn node_positions(ids: &[usize]) -> BTreeMap<usize, (f64, f64)> {
    let (cx, cy, r) = (280.0, 250.0, 170.0);
    ids.iter()
        .enumerate()
        .map(|(i, &id)| {
            let a = std::f64::consts::TAU * i as f64 / ids.len() as f64 - std::f64::consts::FRAC_PI_2;
            (id, (cx + r * a.cos(), cy + r * a.sin()))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn arrow(s: &mut String, class: &str, from: (f64, f64), to: (f64, f64), offset: f64, color: &str, width: f64, marker: &str) {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = (dx * dx + dy * dy).sqrt().max(1e-9);
    let (ux, uy) = (dx / len, dy / len);
    // shift sideways by `offset`, stop short of the node circles
    let (px, py) = (-uy * offset, ux * offset);
    let node_r = 18.0;
    let _ = writeln!(
        s,
        r#"<line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="{width}" marker-end="url(#{marker})"/>"#,
        from.0 + ux * node_r + px,
        from.1 + uy * node_r + py,
        to.0 - ux * node_r + px,
        to.1 - uy * node_r + py,
    );
}

/// Archetype paths as thick coloured arrows, branches as thin purple ones.
pub fn render_path_diagram(report: &PersonaReport) -> String {
    let mut s = String::new();
    header(&mut s);
    if report.archetypes.is_empty() {
        let _ = writeln!(
            s,
            r#"<text class="notice" x="{}" y="{}" text-anchor="middle">No archetypal paths found</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        s.push_str("</svg>\n");
        return s;
    }

    let mut ids: Vec<usize> = report.archetypes.iter().flat_map(|a| a.pattern.items.iter().copied()).collect();
    let on_path: std::collections::BTreeSet<usize> = ids.iter().copied().collect();
    ids.extend(report.branches.iter().flat_map(|b| b.targets.iter().map(|t| t.cluster)));
    ids.sort_unstable();
    ids.dedup();
    let pos = node_positions(&ids);

    s.push_str("<defs>\n");
    for (i, _) in report.archetypes.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<marker id="head-{i}" viewBox="0 0 10 10" refX="8" refY="5" markerWidth="4" markerHeight="4" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{}"/></marker>"#,
            PALETTE[i % PALETTE.len()]
        );
    }
    let _ = writeln!(
        s,
        r#"<marker id="head-branch" viewBox="0 0 10 10" refX="8" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{BRANCH_COLOR}"/></marker>"#
    );
    s.push_str("</defs>\n");

    let n = report.archetypes.len() as f64;
    for (i, a) in report.archetypes.iter().enumerate() {
        let offset = (i as f64 - (n - 1.0) / 2.0) * 7.0;
        let color = PALETTE[i % PALETTE.len()];
        for w in a.pattern.items.windows(2) {
            arrow(&mut s, "archetype", pos[&w[0]], pos[&w[1]], offset, color, 6.0, &format!("head-{i}"));
        }
    }
    for b in &report.branches {
        let from = report.archetypes[b.archetype].pattern.items[b.position];
        for t in &b.targets {
            arrow(&mut s, "branch", pos[&from], pos[&t.cluster], 0.0, BRANCH_COLOR, 1.5, "head-branch");
        }
    }
    for (&id, &(x, y)) in &pos {
        let (fill, dash) = if on_path.contains(&id) { ("#ffffff", "") } else { ("#f3e8ff", r#" stroke-dasharray="3,2""#) };
        let _ = writeln!(
            s,
            r##"<g class="node" data-cluster="{id}"><circle cx="{x:.2}" cy="{y:.2}" r="18" fill="{fill}" stroke="#333333"{dash}/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{id}</text></g>"##,
            y + 4.0
        );
    }
    for (i, a) in report.archetypes.iter().enumerate() {
        let y = 40.0 + 20.0 * i as f64;
        let path: Vec<String> = a.pattern.items.iter().map(usize::to_string).collect();
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><rect x="500" y="{:.1}" width="24" height="6" fill="{}"/><text x="532" y="{:.1}">{} {} (support {})</text></g>"#,
            y - 6.0,
            PALETTE[i % PALETTE.len()],
            y,
            a.name,
            path.join(" > "),
            a.pattern.support
        );
    }
    s.push_str("</svg>\n");
    s
}
