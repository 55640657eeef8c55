//! Planar sample geometries: the superconducting cross section Ω strictly
//! inside the full sample Ω̃.

use crate::error::{Error, Result};

/// Geometry of the (Ω, Ω̃) pair. All kinds are centered descriptions: discs
/// and ellipses sit at the origin; mesh polygons are arbitrary simple
/// polygons (counterclockwise).
#[derive(Debug, Clone)]
pub enum Geometry {
    ConcentricDiscs { r_in: f64, r_out: f64 },
    EllipsePair { inner: (f64, f64), outer: (f64, f64) },
    Mesh { inner: Vec<[f64; 2]>, outer: Vec<[f64; 2]> },
}

impl Geometry {
    /// The default sample: Ω = disc(0, 1) inside Ω̃ = disc(0, 1.5).
    pub fn default_discs() -> Geometry {
        Geometry::ConcentricDiscs { r_in: 1.0, r_out: 1.5 }
    }

    /// Check that the closure of Ω lies strictly inside Ω̃.
    pub fn validate(&self) -> Result<()> {
        match self {
            Geometry::ConcentricDiscs { r_in, r_out } => {
                if !(*r_in > 0.0 && r_out > r_in) {
                    return Err(Error::InvalidParameter(format!(
                        "need 0 < r_in < r_out, got ({r_in}, {r_out})"
                    )));
                }
            }
            Geometry::EllipsePair { inner, outer } => {
                if !(inner.0 > 0.0 && inner.1 > 0.0 && outer.0 > 0.0 && outer.1 > 0.0) {
                    return Err(Error::InvalidParameter("ellipse semi-axes must be positive".into()));
                }
                for k in 0..512 {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 512.0;
                    let p = [inner.0 * t.cos(), inner.1 * t.sin()];
                    if !self.inside_outer_with_margin(p, 1e-9) {
                        return Err(Error::InvalidParameter(
                            "inner ellipse not strictly inside the outer one".into(),
                        ));
                    }
                }
            }
            Geometry::Mesh { inner, outer } => {
                if inner.len() < 3 || outer.len() < 3 {
                    return Err(Error::InvalidParameter("mesh polygons need at least 3 vertices".into()));
                }
                for p in inner {
                    if !point_in_polygon(*p, outer) {
                        return Err(Error::InvalidParameter(
                            "inner polygon not inside the outer one".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn inside_inner(&self, p: [f64; 2]) -> bool {
        match self {
            Geometry::ConcentricDiscs { r_in, .. } => p[0] * p[0] + p[1] * p[1] < r_in * r_in,
            Geometry::EllipsePair { inner, .. } => {
                let x = p[0] / inner.0;
                let y = p[1] / inner.1;
                x * x + y * y < 1.0
            }
            Geometry::Mesh { inner, .. } => point_in_polygon(p, inner),
        }
    }

    pub fn inside_outer(&self, p: [f64; 2]) -> bool {
        match self {
            Geometry::ConcentricDiscs { r_out, .. } => p[0] * p[0] + p[1] * p[1] < r_out * r_out,
            Geometry::EllipsePair { outer, .. } => {
                let x = p[0] / outer.0;
                let y = p[1] / outer.1;
                x * x + y * y < 1.0
            }
            Geometry::Mesh { outer, .. } => point_in_polygon(p, outer),
        }
    }

    fn inside_outer_with_margin(&self, p: [f64; 2], margin: f64) -> bool {
        let q = [p[0] * (1.0 + margin), p[1] * (1.0 + margin)];
        self.inside_outer(q)
    }

    /// Unsigned distance to the interface ∂Ω.
    pub fn dist_inner_boundary(&self, p: [f64; 2]) -> f64 {
        match self {
            Geometry::ConcentricDiscs { r_in, .. } => {
                ((p[0] * p[0] + p[1] * p[1]).sqrt() - r_in).abs()
            }
            Geometry::EllipsePair { inner, .. } => dist_to_ellipse(p, inner.0, inner.1),
            Geometry::Mesh { inner, .. } => dist_to_polyline(p, inner),
        }
    }

    /// Maximum of the scalar curvature of ∂Ω.
    pub fn curvature_max(&self) -> f64 {
        match self {
            Geometry::ConcentricDiscs { r_in, .. } => 1.0 / r_in,
            Geometry::EllipsePair { inner, .. } => {
                let (a, b) = (inner.0, inner.1);
                // curvature a/b² at (±a, 0), b/a² at (0, ±b)
                (a / (b * b)).max(b / (a * a))
            }
            Geometry::Mesh { inner, .. } => polygon_curvature_max(inner),
        }
    }

    /// Points where the curvature of ∂Ω is maximal. Empty for discs (the
    /// whole boundary is extremal).
    pub fn curvature_maxima(&self) -> Vec<[f64; 2]> {
        match self {
            Geometry::ConcentricDiscs { .. } => Vec::new(),
            Geometry::EllipsePair { inner, .. } => {
                let (a, b) = (inner.0, inner.1);
                if a > b {
                    vec![[a, 0.0], [-a, 0.0]]
                } else if b > a {
                    vec![[0.0, b], [0.0, -b]]
                } else {
                    Vec::new()
                }
            }
            Geometry::Mesh { .. } => Vec::new(),
        }
    }

    /// Axis-aligned bounding box of Ω̃: (x_min, x_max, y_min, y_max).
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            Geometry::ConcentricDiscs { r_out, .. } => (-r_out, *r_out, -r_out, *r_out),
            Geometry::EllipsePair { outer, .. } => (-outer.0, outer.0, -outer.1, outer.1),
            Geometry::Mesh { outer, .. } => {
                let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for p in outer {
                    b.0 = b.0.min(p[0]);
                    b.1 = b.1.max(p[0]);
                    b.2 = b.2.min(p[1]);
                    b.3 = b.3.max(p[1]);
                }
                b
            }
        }
    }

    /// Uniform parameter sampling of ∂Ω with cumulative arclength, for
    /// arc-distance diagnostics.
    pub fn inner_boundary_polyline(&self, n: usize) -> Vec<([f64; 2], f64)> {
        let pts: Vec<[f64; 2]> = match self {
            Geometry::ConcentricDiscs { r_in, .. } => (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    [r_in * t.cos(), r_in * t.sin()]
                })
                .collect(),
            Geometry::EllipsePair { inner, .. } => (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    [inner.0 * t.cos(), inner.1 * t.sin()]
                })
                .collect(),
            Geometry::Mesh { inner, .. } => inner.clone(),
        };
        let mut out = Vec::with_capacity(pts.len());
        let mut s = 0.0;
        for (k, &p) in pts.iter().enumerate() {
            if k > 0 {
                let q = pts[k - 1];
                s += ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            }
            out.push((p, s));
        }
        out
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Geometry::ConcentricDiscs { .. } => "concentric_discs",
            Geometry::EllipsePair { .. } => "ellipse_pair",
            Geometry::Mesh { .. } => "mesh",
        }
    }

    pub fn is_disc_pair(&self) -> bool {
        matches!(self, Geometry::ConcentricDiscs { .. })
    }
}

/// Ray-casting point-in-polygon test.
fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (poly[i][0], poly[i][1]);
        let (xj, yj) = (poly[j][0], poly[j][1]);
        if ((yi > p[1]) != (yj > p[1]))
            && (p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi)
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn dist_to_polyline(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let qx = a[0] + t * dx;
        let qy = a[1] + t * dy;
        best = best.min(((p[0] - qx).powi(2) + (p[1] - qy).powi(2)).sqrt());
    }
    best
}

fn polygon_curvature_max(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut kmax = 0.0_f64;
    for i in 0..n {
        let a = poly[(i + n - 1) % n];
        let b = poly[i];
        let c = poly[(i + 1) % n];
        let ab = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let bc = ((c[0] - b[0]).powi(2) + (c[1] - b[1]).powi(2)).sqrt();
        let ca = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
        let area2 = ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
        if ab * bc * ca > 0.0 {
            kmax = kmax.max(2.0 * area2 / (ab * bc * ca));
        }
    }
    kmax
}

/// Distance from a point to the ellipse x²/a² + y²/b² = 1, by the standard
/// root-find on the projection parameter (robust for points inside and out).
fn dist_to_ellipse(p: [f64; 2], a: f64, b: f64) -> f64 {
    let px = p[0].abs();
    let py = p[1].abs();
    // F(t) = (a px/(t+a²))² + (b py/(t+b²))² - 1, strictly decreasing on
    // (-min(a²,b²), ∞); the projection parameter is its root.
    let f = |t: f64| {
        let u = a * px / (t + a * a);
        let v = b * py / (t + b * b);
        u * u + v * v - 1.0
    };
    let t_min = -(a * a).min(b * b);
    let mut lo = t_min + 1e-14 * (1.0 + a * a + b * b);
    // expand hi until F < 0
    let mut hi = lo.abs().max(a * px + b * py).max(1.0);
    let mut guard = 0;
    while f(hi) > 0.0 && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    if f(lo) < 0.0 {
        // point is (numerically) at the center along one axis; fall back to
        // axis distances
        return (a - px).abs().min((b - py).abs());
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + hi.abs()) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let qx = a * a * px / (t + a * a);
    let qy = b * b * py / (t + b * b);
    ((px - qx).powi(2) + (py - qy).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_distances() {
        let g = Geometry::default_discs();
        assert!((g.dist_inner_boundary([0.5, 0.0]) - 0.5).abs() < 1e-14);
        assert!((g.dist_inner_boundary([1.2, 0.0]) - 0.2).abs() < 1e-14);
        assert!(g.inside_inner([0.5, 0.5]));
        assert!(!g.inside_inner([0.8, 0.8]));
        assert!(g.inside_outer([0.8, 0.8]));
        assert_eq!(g.curvature_max(), 1.0);
    }

    #[test]
    fn ellipse_distance_on_axes() {
        let g = Geometry::EllipsePair { inner: (0.8, 0.5), outer: (1.3, 1.0) };
        g.validate().unwrap();
        assert!((g.dist_inner_boundary([1.0, 0.0]) - 0.2).abs() < 1e-10);
        assert!((g.dist_inner_boundary([0.0, 0.8]) - 0.3).abs() < 1e-10);
        // on the boundary
        assert!(g.dist_inner_boundary([0.8, 0.0]) < 1e-10);
        let k = g.curvature_max();
        assert!((k - 0.8 / 0.25).abs() < 1e-12, "curvature {k}");
    }

    #[test]
    fn ellipse_distance_generic_point_vs_polyline() {
        let g = Geometry::EllipsePair { inner: (0.8, 0.5), outer: (1.3, 1.0) };
        let poly: Vec<[f64; 2]> = g.inner_boundary_polyline(16384).iter().map(|e| e.0).collect();
        for &p in &[[0.3, 0.3], [0.9, 0.4], [-0.5, -0.2], [0.1, 0.6]] {
            let d_exact = g.dist_inner_boundary(p);
            let d_poly = dist_to_polyline(p, &poly);
            assert!((d_exact - d_poly).abs() < 1e-6, "p = {p:?}: {d_exact} vs {d_poly}");
        }
    }

    #[test]
    fn mesh_polygon_inside_and_distance() {
        let square = |s: f64| vec![[-s, -s], [s, -s], [s, s], [-s, s]];
        let g = Geometry::Mesh { inner: square(1.0), outer: square(1.5) };
        g.validate().unwrap();
        assert!(g.inside_inner([0.0, 0.0]));
        assert!(!g.inside_inner([1.2, 0.0]));
        assert!(g.inside_outer([1.2, 0.0]));
        assert!((g.dist_inner_boundary([0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_geometries_rejected() {
        assert!(Geometry::ConcentricDiscs { r_in: 1.5, r_out: 1.0 }.validate().is_err());
        assert!(Geometry::EllipsePair { inner: (1.3, 1.0), outer: (0.8, 0.5) }.validate().is_err());
    }
}
