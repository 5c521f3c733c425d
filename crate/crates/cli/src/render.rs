//! SVG cross-sections of plane-curve fibres: the circle `|x| = delta`, the
//! level curves `f_t = ±eta` inside it and the labelled critical points.

use std::collections::HashMap;
use std::fmt::Write;

use morsefib::certfind::CertifiedCriticalPoint;
use morsefib::fibretop::Side;
use morsefib::polyring::{CompiledPoly, Polynomial};

use crate::error::{CliError, Failure};

const GRID: usize = 200;
const SIZE: f64 = 480.0;
const MARGIN: f64 = 20.0;
const POSITIVE_COLOR: &str = "#1f4e9c";
const NEGATIVE_COLOR: &str = "#c0392b";

/// Which level curves to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sides {
    Both,
    Only(Side),
}

impl Sides {
    fn includes(self, side: Side) -> bool {
        match self {
            Sides::Both => true,
            Sides::Only(s) => s == side,
        }
    }
}

impl std::str::FromStr for Sides {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Ok(Sides::Both),
            "positive" | "plus" | "+" => Ok(Sides::Only(Side::Positive)),
            "negative" | "minus" | "-" => Ok(Sides::Only(Side::Negative)),
            other => Err(format!("unknown side {other:?}; expected both, positive or negative")),
        }
    }
}

type Point = (f64, f64);

/// Grid edge carrying a contour vertex: `(i, j, vertical)`.
type EdgeKey = (usize, usize, bool);

/// Level curve `g = level` on the square `[-r, r]^2`, as polylines.
pub fn contour(g: &CompiledPoly, level: f64, r: f64, grid: usize) -> Vec<Vec<Point>> {
    let h = 2.0 * r / grid as f64;
    let coord = |i: usize| -r + i as f64 * h;
    let values: Vec<Vec<f64>> = (0..=grid)
        .map(|i| (0..=grid).map(|j| g.eval_f64(&[coord(i), coord(j)]) - level).collect())
        .collect();
    // Zero values are nudged to the positive side so every crossing is strict.
    let sign = |i: usize, j: usize| values[i][j] >= 0.0;
    let crossing = |e: EdgeKey| -> Point {
        let (i, j, vertical) = e;
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        let (a, b) = (values[i][j], values[i2][j2]);
        let s = a / (a - b);
        let (x0, y0) = (coord(i), coord(j));
        if vertical {
            (x0, y0 + s * h)
        } else {
            (x0 + s * h, y0)
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let bottom = (i, j, false);
            let top = (i, j + 1, false);
            let left = (i, j, true);
            let right = (i + 1, j, true);
            let c = [sign(i, j), sign(i + 1, j), sign(i + 1, j + 1), sign(i, j + 1)];
            let mut cut = Vec::with_capacity(4);
            if c[0] != c[1] {
                cut.push(bottom);
            }
            if c[1] != c[2] {
                cut.push(right);
            }
            if c[2] != c[3] {
                cut.push(top);
            }
            if c[3] != c[0] {
                cut.push(left);
            }
            match cut.len() {
                2 => segments.push((cut[0], cut[1])),
                4 => {
                    // Saddle cell: the centre value decides which corners connect.
                    let centre = g.eval_f64(&[coord(i) + h / 2.0, coord(j) + h / 2.0]) - level >= 0.0;
                    if centre == c[0] {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((bottom, left));
                        segments.push((right, top));
                    }
                }
                _ => {}
            }
        }
    }

    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(k);
        adjacency.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut chain = vec![start];
        let mut current = start;
        loop {
            let next = adjacency[&current].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            current = if a == current { b } else { a };
            chain.push(current);
        }
        chain
    };
    // Open chains start at endpoints of degree one; the rest are loops.
    let mut starts: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    starts.sort_unstable();
    let mut all: Vec<EdgeKey> = adjacency.keys().copied().collect();
    all.sort_unstable();
    starts.extend(all);
    for s in starts {
        if adjacency[&s].iter().all(|&k| used[k]) {
            continue;
        }
        let chain = walk(s, &mut used);
        lines.push(chain.into_iter().map(crossing).collect());
    }
    lines
}

fn inside(p: Point, r: f64) -> bool {
    p.0 * p.0 + p.1 * p.1 <= r * r
}

/// Point where the segment `a -> b` meets the circle of radius `r`, `a`
/// inside and `b` outside.
fn circle_cut(a: Point, b: Point, r: f64) -> Point {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let qa = dx * dx + dy * dy;
    let qb = 2.0 * (a.0 * dx + a.1 * dy);
    let qc = a.0 * a.0 + a.1 * a.1 - r * r;
    let s = ((-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa)).clamp(0.0, 1.0);
    (a.0 + s * dx, a.1 + s * dy)
}

/// Splits polylines at the circle, keeping the parts inside the disc.
pub fn clip_to_disc(lines: &[Vec<Point>], r: f64) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    for line in lines {
        let closed = line.len() > 2 && line.first() == line.last();
        let mut pieces: Vec<Vec<Point>> = Vec::new();
        let mut current: Vec<Point> = Vec::new();
        for w in 0..line.len() {
            let p = line[w];
            let p_in = inside(p, r);
            if w == 0 {
                if p_in {
                    current.push(p);
                }
                continue;
            }
            let q = line[w - 1];
            match (inside(q, r), p_in) {
                (true, true) => current.push(p),
                (true, false) => {
                    current.push(circle_cut(q, p, r));
                    pieces.push(std::mem::take(&mut current));
                }
                (false, true) => {
                    current.push(circle_cut(p, q, r));
                    current.push(p);
                }
                (false, false) => {}
            }
        }
        if !current.is_empty() {
            pieces.push(current);
        }
        // A loop cut open at its start point is rejoined.
        if closed && pieces.len() > 1 && inside(line[0], r) {
            let last = pieces.pop().unwrap_or_default();
            let mut first = std::mem::take(&mut pieces[0]);
            let mut joined = last;
            joined.extend(first.drain(1..));
            pieces[0] = joined;
        }
        out.extend(pieces.into_iter().filter(|p| p.len() >= 2));
    }
    out
}

/// SVG 1.1 document for a plane-curve `f_t`.
pub fn render_svg(
    f_t: &Polynomial,
    delta: f64,
    eta: f64,
    points: &[CertifiedCriticalPoint],
    sides: Sides,
) -> Result<String, CliError> {
    if f_t.nvars() != 2 {
        return Err(CliError::new(
            Failure::Usage,
            "render",
            format!(
                "cross-sections need a plane curve germ (n = 1, two variables); this germ has {} variable(s)",
                f_t.nvars()
            ),
        )
        .with_hint("use the report or the chi/betti subcommands for other dimensions"));
    }
    let g = CompiledPoly::new(f_t);
    let scale = (SIZE - 2.0 * MARGIN) / (2.0 * delta);
    let centre = SIZE / 2.0;
    let px = |p: Point| (centre + p.0 * scale, centre - p.1 * scale);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE:.0}" height="{SIZE:.0}" viewBox="0 0 {SIZE:.0} {SIZE:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<circle class="ball" cx="{centre:.3}" cy="{centre:.3}" r="{:.3}" fill="none" stroke="#444444" stroke-width="1.5"/>"##,
        delta * scale
    );
    for (side, color) in [(Side::Positive, POSITIVE_COLOR), (Side::Negative, NEGATIVE_COLOR)] {
        if !sides.includes(side) {
            continue;
        }
        let level = eta * side.sign() as f64;
        let lines = clip_to_disc(&contour(&g, level, delta, GRID), delta);
        let _ = writeln!(svg, r#"<g class="fibre-{side}" fill="none" stroke="{color}" stroke-width="2">"#);
        for line in lines {
            let pts: Vec<String> = line
                .into_iter()
                .map(|p| {
                    let (x, y) = px(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(svg, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, r#"<g class="critical-points" font-family="sans-serif" font-size="14">"#);
    for p in points {
        let (x, y) = px((p.midpoint[0], p.midpoint[1]));
        let label = p.index.map_or("?".to_string(), |l| l.to_string());
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="black"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}">λ={label}</text>"#,
            x + 6.0,
            y - 6.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use morsefib::parse_polynomial;

    fn arcs(text: &str, level: f64) -> Vec<Vec<Point>> {
        let f = parse_polynomial(text, &["x", "y"]).unwrap();
        clip_to_disc(&contour(&CompiledPoly::new(&f), level, 1.0, GRID), 1.0)
    }

    #[test]
    fn hyperbola_branches() {
        assert_eq!(arcs("x*y", 0.3).len(), 2);
        assert_eq!(arcs("x*y", -0.3).len(), 2);
        for arc in arcs("x*y", 0.3) {
            for p in arc {
                assert!((p.0 * p.1 - 0.3).abs() < 1e-3);
                assert!(p.0 * p.0 + p.1 * p.1 <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn circle_is_one_closed_loop() {
        let a = arcs("x^2 + y^2", 0.25);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].first(), a[0].last());
        assert!(arcs("x^2 + y^2", -0.25).is_empty());
    }

    #[test]
    fn refuses_other_dimensions() {
        let f = parse_polynomial("x^4", &["x"]).unwrap();
        let err = render_svg(&f, 1.0, 0.1, &[], Sides::Both).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn sides_parse() {
        assert_eq!("both".parse::<Sides>(), Ok(Sides::Both));
        assert_eq!("negative".parse::<Sides>(), Ok(Sides::Only(Side::Negative)));
        assert!("up".parse::<Sides>().is_err());
    }
}
