//! Deterministic SVG phase portraits: the switching manifold colored by its
//! Filippov regions, tangency markers with visibility, the invariant set of
//! a canonical family, and optional trajectory overlays.

use crate::canonical::{invariant_set, make_canonical, FamilyKind};
use crate::field::{
    classify_fold, classify_point, lie_derivative, PiecewiseField, RegionClass, Tolerances,
    Visibility,
};
use crate::geom::Point;
use crate::traj::Trajectory;
use std::fmt::Write as _;

/// Rendering parameters.
#[derive(Debug, Clone, Copy)]
pub struct PortraitOptions {
    pub width: u32,
    pub height: u32,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub samples: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            width: 800,
            height: 500,
            x_range: (-1.6, 1.6),
            y_range: (-1.0, 1.0),
            samples: 400,
        }
    }
}

struct Mapper {
    opt: PortraitOptions,
}

impl Mapper {
    fn px(&self, p: Point) -> (f64, f64) {
        let (x0, x1) = self.opt.x_range;
        let (y0, y1) = self.opt.y_range;
        (
            (p.x - x0) / (x1 - x0) * self.opt.width as f64,
            (y1 - p.y) / (y1 - y0) * self.opt.height as f64,
        )
    }

    fn polyline(&self, pts: &[Point], style: &str) -> String {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        format!("<polyline points=\"{}\" {} />\n", coords.join(" "), style)
    }
}

fn region_color(class: RegionClass) -> &'static str {
    match class {
        RegionClass::CrossingPos => "#4878a8",
        RegionClass::CrossingNeg => "#48a878",
        RegionClass::Sliding => "#d04040",
        RegionClass::Escaping => "#e09030",
        RegionClass::TangencyRegular | RegionClass::TangencySingular => "#303030",
    }
}

/// Renders the field's portrait. `kind` adds the family's invariant set,
/// `trajectory` an overlaid orbit.
pub fn portrait_svg(
    field: &PiecewiseField,
    kind: Option<FamilyKind>,
    trajectory: Option<&Trajectory>,
    opt: &PortraitOptions,
) -> String {
    let tol = Tolerances::default();
    let m = Mapper { opt: *opt };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        opt.width, opt.height, opt.width, opt.height
    );
    let _ = writeln!(
        out,
        "<!-- psvf portrait generator v{} -->",
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\" />");

    // invariant set of a canonical family
    if let Some(kind) = kind {
        let fam = make_canonical(kind);
        let set = invariant_set(&fam);
        let (lo, hi) = set.domain.unwrap_or(opt.x_range);
        let n = opt.samples.max(16);
        let curve = |f: &dyn Fn(f64) -> f64| -> Vec<Point> {
            (0..=n)
                .map(|i| {
                    let x = lo + (hi - lo) * i as f64 / n as f64;
                    Point::new(x, f(x))
                })
                .collect()
        };
        let style = "fill=\"none\" stroke=\"#9070c0\" stroke-width=\"2\"";
        out += &m.polyline(&curve(&|x| set.upper(x)), style);
        out += &m.polyline(&curve(&|x| set.lower(x)), style);
    }

    // the switching manifold, one classified sub-segment at a time
    let (x0, x1) = opt.x_range;
    let n = opt.samples.max(16);
    for i in 0..n {
        let xa = x0 + (x1 - x0) * i as f64 / n as f64;
        let xb = x0 + (x1 - x0) * (i + 1) as f64 / n as f64;
        let mid = Point::new(0.5 * (xa + xb), 0.0);
        let color = classify_point(field, mid, &tol)
            .map(region_color)
            .unwrap_or("#888888");
        out += &m.polyline(
            &[Point::new(xa, 0.0), Point::new(xb, 0.0)],
            &format!("fill=\"none\" stroke=\"{color}\" stroke-width=\"3\""),
        );
    }

    // tangency markers: a dot above the axis for the upper field, below for
    // the lower one; filled when visible, hollow when invisible
    let fold_xs = tangency_abscissas(field, opt.x_range, 8 * n);
    for &x in &fold_xs {
        if let Ok(fc) = classify_fold(field, Point::new(x, 0.0), &tol) {
            let offset = (opt.y_range.1 - opt.y_range.0) * 0.02;
            for (vis, dy) in [(fc.upper, offset), (fc.lower, -offset)] {
                let Some(v) = vis else { continue };
                let (cx, cy) = m.px(Point::new(x, dy));
                let fill = match v {
                    Visibility::Visible => "#303030",
                    Visibility::Invisible => "#ffffff",
                };
                let _ = writeln!(
                    out,
                    "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"#303030\" stroke-width=\"1.5\" />"
                );
            }
        }
    }

    // orbit overlay
    if let Some(gamma) = trajectory {
        for arc in &gamma.arcs {
            out += &m.polyline(
                &arc.sample(opt.samples.max(16)),
                "fill=\"none\" stroke=\"#c04080\" stroke-width=\"1.5\"",
            );
        }
    }

    out += "</svg>\n";
    out
}

/// Zeros of either field's tangency function on the manifold, by a sign
/// scan plus bisection.
fn tangency_abscissas(field: &PiecewiseField, range: (f64, f64), grid: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for side in [&field.upper, &field.lower] {
        let g = |x: f64| lie_derivative(side, &field.switching, Point::new(x, 0.0), 1);
        let mut prev = g(range.0);
        for i in 1..=grid {
            let x = range.0 + (range.1 - range.0) * i as f64 / grid as f64;
            let cur = g(x);
            if prev == 0.0 || prev * cur < 0.0 {
                let x_prev = range.0 + (range.1 - range.0) * (i - 1) as f64 / grid as f64;
                let mut lo = x_prev;
                let mut hi = x;
                if prev != 0.0 {
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if (g(mid) > 0.0) == (prev > 0.0) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                }
                out.push(if prev == 0.0 { x_prev } else { 0.5 * (lo + hi) });
            }
            prev = cur;
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn portrait_is_deterministic_and_marks_folds() {
        let fam = make_canonical(FamilyKind::FiniteK(2));
        let opt = PortraitOptions::default();
        let a = portrait_svg(&fam.field, Some(FamilyKind::FiniteK(2)), None, &opt);
        let b = portrait_svg(&fam.field, Some(FamilyKind::FiniteK(2)), None, &opt);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        // the on-curve two-fold at 0 plus the off-curve tangency pair: the
        // upper and lower field each get a marker at all three abscissas
        assert_eq!(a.matches("circle").count(), 6);
        assert!(a.contains("fill=\"#303030\""), "visible folds are filled");
        assert!(a.contains("fill=\"#ffffff\""), "invisible folds are hollow");
    }

    #[test]
    fn bean_portrait_shows_sliding_and_escaping() {
        let fam = make_canonical(FamilyKind::Bean);
        let opt = PortraitOptions::default();
        let svg = portrait_svg(&fam.field, Some(FamilyKind::Bean), None, &opt);
        assert!(svg.contains("#d04040"), "sliding segment color present");
        assert!(svg.contains("#e09030"), "escaping segment color present");
        // invisible tangency of the lower field: a hollow marker
        assert!(svg.contains("fill=\"#ffffff\" stroke=\"#303030\""));
    }
}
