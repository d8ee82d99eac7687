//! SVG figures of a scenario: domain, target line, barriers, region shading,
//! players and assignment lines.

use std::fmt::Write as _;

use crate::barrier::BarrierCurve;
use crate::geometry::{Point, Side};
use crate::matching::AssignmentSolution;
use crate::region::{RegionGrid, RegionLabel};
use crate::scenario::Scenario;

/// Samples per curve piece.
pub const PIECE_SAMPLES: usize = 120;

const WIDTH_PX: f64 = 800.0;
const PAD_PX: f64 = 30.0;

const BARRIER_COLORS: [&str; 6] = ["#1b5e20", "#0d47a1", "#e65100", "#4a148c", "#b71c1c", "#006064"];

/// World-to-pixel mapping for a scenario's bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    lo: Point,
    hi: Point,
    scale: f64,
}

impl Canvas {
    pub fn new(scenario: &Scenario) -> Self {
        let (lo, hi) = scenario.domain().bounding_box();
        let scale = (WIDTH_PX - 2.0 * PAD_PX) / (hi.x - lo.x).max(f64::MIN_POSITIVE);
        Canvas { lo, hi, scale }
    }

    pub fn width(&self) -> f64 {
        WIDTH_PX
    }

    pub fn height(&self) -> f64 {
        (self.hi.y - self.lo.y) * self.scale + 2.0 * PAD_PX
    }

    pub fn to_px(&self, p: Point) -> Point {
        Point::new(
            PAD_PX + (p.x - self.lo.x) * self.scale,
            PAD_PX + (self.hi.y - p.y) * self.scale,
        )
    }
}

fn points_attr(canvas: &Canvas, pts: &[Point]) -> String {
    pts.iter()
        .map(|&p| {
            let q = canvas.to_px(p);
            format!("{:.3},{:.3}", q.x, q.y)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Part of a convex polygon with `y >= 0`.
fn upper_part(poly: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        if a.y >= 0.0 {
            out.push(a);
        }
        if (a.y >= 0.0) != (b.y >= 0.0) {
            let t = a.y / (a.y - b.y);
            out.push(Point::new(a.x + t * (b.x - a.x), 0.0));
        }
    }
    out
}

/// Samples one barrier, split into runs that stay inside the play region.
pub fn barrier_polylines(curve: &BarrierCurve, scenario: &Scenario) -> Vec<Vec<Point>> {
    let mut runs = Vec::new();
    let mut current = Vec::new();
    for piece in curve.pieces() {
        for k in 0..PIECE_SAMPLES {
            let t = k as f64 / (PIECE_SAMPLES - 1) as f64;
            let x = if k == PIECE_SAMPLES - 1 {
                piece.x_hi
            } else {
                piece.x_lo + t * (piece.x_hi - piece.x_lo)
            };
            let p = Point::new(x, piece.y_at(x));
            if scenario.domain().contains(p, Side::Play) {
                current.push(p);
            } else if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs.retain(|r| r.len() >= 2);
    runs
}

fn region_fill(label: RegionLabel) -> &'static str {
    match label {
        RegionLabel::Pwr => "#a5d6a7",
        RegionLabel::Ewr => "#ffccbc",
        RegionLabel::OnBarrier => "#9e9e9e",
    }
}

/// Renders a standalone SVG document.
pub fn render_svg(
    scenario: &Scenario,
    barriers: &[BarrierCurve],
    grid: Option<&RegionGrid>,
    assignment: Option<&AssignmentSolution>,
) -> String {
    let c = Canvas::new(scenario);
    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(
        &mut s,
        format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
            c.width(),
            c.height(),
            c.width(),
            c.height()
        ),
    );
    w(&mut s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##.into());

    if let Some(grid) = grid {
        w(&mut s, r#"<g id="regions" stroke="none" shape-rendering="crispEdges">"#.into());
        let (cw, ch) = (grid.dx * c.scale, grid.dy * c.scale);
        for (center, label) in grid.labeled() {
            let tl = c.to_px(Point::new(center.x - grid.dx / 2.0, center.y + grid.dy / 2.0));
            w(
                &mut s,
                format!(
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    tl.x,
                    tl.y,
                    cw,
                    ch,
                    region_fill(label)
                ),
            );
        }
        w(&mut s, "</g>".into());
    }

    let upper = upper_part(scenario.domain().vertices());
    w(
        &mut s,
        format!(
            r##"<polygon id="target-region" points="{}" fill="#bbdefb" stroke="none"/>"##,
            points_attr(&c, &upper)
        ),
    );
    w(
        &mut s,
        format!(
            r##"<polygon id="domain" points="{}" fill="none" stroke="#212121" stroke-width="2"/>"##,
            points_attr(&c, scenario.domain().vertices())
        ),
    );
    let (m, n) = (c.to_px(Point::ORIGIN), c.to_px(Point::new(scenario.target_length(), 0.0)));
    w(
        &mut s,
        format!(
            r##"<line id="target-line" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#0d47a1" stroke-width="3"/>"##,
            m.x, m.y, n.x, n.y
        ),
    );

    w(&mut s, r#"<g id="barriers" fill="none" stroke-width="2">"#.into());
    for (k, curve) in barriers.iter().enumerate() {
        let color = BARRIER_COLORS[k % BARRIER_COLORS.len()];
        let mut title = String::new();
        write!(title, "{}", curve.generating_coalition()).expect("write to string");
        for run in barrier_polylines(curve, scenario) {
            w(
                &mut s,
                format!(
                    r#"<polyline stroke="{color}" points="{}"><title>{title}</title></polyline>"#,
                    points_attr(&c, &run)
                ),
            );
        }
    }
    w(&mut s, "</g>".into());

    if let Some(a) = assignment {
        w(&mut s, r##"<g id="assignment" stroke="#424242" stroke-width="1.5" stroke-dasharray="6 4">"##.into());
        let line = |s: &mut String, i: usize, j: usize| {
            let p = c.to_px(scenario.pursuers()[i - 1]);
            let e = c.to_px(scenario.evaders()[j - 1]);
            w(
                s,
                format!(
                    r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                    p.x, p.y, e.x, e.y
                ),
            );
        };
        for &(i, j) in &a.pairs_one {
            line(&mut s, i, j);
        }
        for &(i1, i2, j) in &a.pairs_two {
            line(&mut s, i1, j);
            line(&mut s, i2, j);
        }
        w(&mut s, "</g>".into());
    }

    w(&mut s, r#"<g id="players" font-family="sans-serif" font-size="12">"#.into());
    for (i, &p) in scenario.pursuers().iter().enumerate() {
        let q = c.to_px(p);
        w(
            &mut s,
            format!(
                r##"<circle cx="{:.3}" cy="{:.3}" r="5" fill="#1565c0"/><text x="{:.3}" y="{:.3}">P{}</text>"##,
                q.x,
                q.y,
                q.x + 7.0,
                q.y - 7.0,
                i + 1
            ),
        );
    }
    for (j, &e) in scenario.evaders().iter().enumerate() {
        let q = c.to_px(e);
        w(
            &mut s,
            format!(
                r##"<rect x="{:.3}" y="{:.3}" width="9" height="9" fill="#c62828"/><text x="{:.3}" y="{:.3}">E{}</text>"##,
                q.x - 4.5,
                q.y - 4.5,
                q.x + 7.0,
                q.y - 7.0,
                j + 1
            ),
        );
    }
    w(&mut s, "</g>".into());
    w(&mut s, "</svg>".into());
    s
}
