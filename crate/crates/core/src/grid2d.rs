//! Masked Cartesian grids over Ω̃ with material fractions and link-phase
//! coefficients.
//!
//! Nodes are grid points whose center lies inside Ω̃ (natural boundary
//! conditions come from simply omitting outside links). Edges carry the
//! series-harmonic kinetic weight across the interface ∂Ω — the resistances
//! of the two material segments of the edge add, which reduces to the plain
//! harmonic mean when the interface cuts the edge in half — and the exact
//! line integral of the curl-1 symmetric-gauge field F = ½(-y, x), so every
//! plaquette circulation equals B·h² exactly.

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::material::Material;

/// Directed edge between two masked nodes (`u` → `v`).
#[derive(Debug, Clone, Copy)]
pub struct Edge2d {
    pub u: u32,
    pub v: u32,
    /// Length fraction of the edge inside Ω (the series-harmonic kinetic
    /// weight for a concrete material comes from `edge_weights`).
    pub frac_in: f64,
    /// Line integral ∫ F·dl along the edge; the link phase at field B is
    /// B times this.
    pub theta_coeff: f64,
}

/// One grid square with all four corners masked; edges listed so the
/// circulation is `bottom + right - top - left`.
#[derive(Debug, Clone, Copy)]
pub struct Plaquette {
    pub e_bottom: u32,
    pub e_right: u32,
    pub e_top: u32,
    pub e_left: u32,
}

#[derive(Debug, Clone)]
pub struct MaskedGrid2d {
    pub geometry: Geometry,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
    /// Row-major (iy * nx + ix) → compact node id, or -1 outside the mask.
    pub node_id: Vec<i32>,
    /// Compact id → (ix, iy).
    pub nodes: Vec<(u32, u32)>,
    /// Area fraction of each node cell inside Ω.
    pub frac_in: Vec<f64>,
    /// Distance of each node to ∂Ω.
    pub dist_inner: Vec<f64>,
    pub edges: Vec<Edge2d>,
    pub plaquettes: Vec<Plaquette>,
    /// True when compact ids scan y fastest (chosen to minimize bandwidth).
    pub column_major: bool,
}

impl MaskedGrid2d {
    /// Grid with the given number of points per unit length.
    pub fn from_resolution(geometry: Geometry, points_per_unit: f64) -> Result<MaskedGrid2d> {
        if !(points_per_unit > 2.0) {
            return Err(Error::InvalidGrid(format!("points_per_unit too small: {points_per_unit}")));
        }
        Self::build(geometry, 1.0 / points_per_unit)
    }

    /// Grid with `n` nodes across the longer side of the bounding box.
    pub fn from_node_count(geometry: Geometry, n: usize) -> Result<MaskedGrid2d> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("node count too small: {n}")));
        }
        let (xmin, xmax, ymin, ymax) = geometry.bbox();
        let l = (xmax - xmin).max(ymax - ymin);
        Self::build(geometry, l / (n as f64 - 1.0))
    }

    fn build(geometry: Geometry, h: f64) -> Result<MaskedGrid2d> {
        geometry.validate()?;
        let (xmin, xmax, ymin, ymax) = geometry.bbox();
        // symmetric node placement about the box center
        let cx = 0.5 * (xmin + xmax);
        let cy = 0.5 * (ymin + ymax);
        let nx = 2 * ((0.5 * (xmax - xmin) / h).ceil() as usize) + 1;
        let ny = 2 * ((0.5 * (ymax - ymin) / h).ceil() as usize) + 1;
        let x0 = cx - 0.5 * (nx as f64 - 1.0) * h;
        let y0 = cy - 0.5 * (ny as f64 - 1.0) * h;
        let column_major = ny < nx;

        let xpos = |ix: usize| x0 + ix as f64 * h;
        let ypos = |iy: usize| y0 + iy as f64 * h;

        let mut node_id = vec![-1_i32; nx * ny];
        let mut nodes = Vec::new();
        let push_node = |ix: usize, iy: usize, node_id: &mut Vec<i32>, nodes: &mut Vec<(u32, u32)>| {
            let p = [xpos(ix), ypos(iy)];
            if geometry.inside_outer(p) {
                node_id[iy * nx + ix] = nodes.len() as i32;
                nodes.push((ix as u32, iy as u32));
            }
        };
        if column_major {
            for ix in 0..nx {
                for iy in 0..ny {
                    push_node(ix, iy, &mut node_id, &mut nodes);
                }
            }
        } else {
            for iy in 0..ny {
                for ix in 0..nx {
                    push_node(ix, iy, &mut node_id, &mut nodes);
                }
            }
        }

        let n_nodes = nodes.len();
        if n_nodes < 16 {
            return Err(Error::InvalidGrid(format!(
                "mask too small ({n_nodes} nodes) at spacing {h}"
            )));
        }

        // per-node material fraction and interface distance
        let mut frac_in = vec![0.0; n_nodes];
        let mut dist_inner = vec![0.0; n_nodes];
        for (id, &(ix, iy)) in nodes.iter().enumerate() {
            let p = [xpos(ix as usize), ypos(iy as usize)];
            let d = geometry.dist_inner_boundary(p);
            dist_inner[id] = d;
            let inside = geometry.inside_inner(p);
            frac_in[id] = if d > 0.75 * h {
                if inside { 1.0 } else { 0.0 }
            } else {
                cell_fraction(&geometry, p, h)
            };
        }

        // edges with series-harmonic weights and symmetric-gauge integrals
        let id_at = |ix: usize, iy: usize| -> i32 { node_id[iy * nx + ix] };
        let mut edges = Vec::new();
        let mut x_edge = vec![-1_i32; nx * ny];
        let mut y_edge = vec![-1_i32; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let u = id_at(ix, iy);
                if u < 0 {
                    continue;
                }
                if ix + 1 < nx {
                    let v = id_at(ix + 1, iy);
                    if v >= 0 {
                        let a = [xpos(ix), ypos(iy)];
                        let b = [xpos(ix + 1), ypos(iy)];
                        x_edge[iy * nx + ix] = edges.len() as i32;
                        edges.push(Edge2d {
                            u: u as u32,
                            v: v as u32,
                            frac_in: edge_inside_fraction(&geometry, a, b),
                            // F_x = -y/2 along a horizontal edge
                            theta_coeff: -ypos(iy) * h / 2.0,
                        });
                    }
                }
                if iy + 1 < ny {
                    let v = id_at(ix, iy + 1);
                    if v >= 0 {
                        let a = [xpos(ix), ypos(iy)];
                        let b = [xpos(ix), ypos(iy + 1)];
                        y_edge[iy * nx + ix] = edges.len() as i32;
                        edges.push(Edge2d {
                            u: u as u32,
                            v: v as u32,
                            frac_in: edge_inside_fraction(&geometry, a, b),
                            // F_y = +x/2 along a vertical edge
                            theta_coeff: xpos(ix) * h / 2.0,
                        });
                    }
                }
            }
        }

        let mut plaquettes = Vec::new();
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let eb = x_edge[iy * nx + ix];
                let et = x_edge[(iy + 1) * nx + ix];
                let el = y_edge[iy * nx + ix];
                let er = y_edge[iy * nx + ix + 1];
                if eb >= 0 && et >= 0 && el >= 0 && er >= 0 {
                    plaquettes.push(Plaquette {
                        e_bottom: eb as u32,
                        e_right: er as u32,
                        e_top: et as u32,
                        e_left: el as u32,
                    });
                }
            }
        }

        Ok(MaskedGrid2d {
            geometry,
            nx,
            ny,
            h,
            x0,
            y0,
            node_id,
            nodes,
            frac_in,
            dist_inner,
            edges,
            plaquettes,
            column_major,
        })
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn position(&self, id: usize) -> [f64; 2] {
        let (ix, iy) = self.nodes[id];
        [self.x0 + ix as f64 * self.h, self.y0 + iy as f64 * self.h]
    }

    /// Midpoint of an edge.
    pub fn edge_midpoint(&self, e: &Edge2d) -> [f64; 2] {
        let a = self.position(e.u as usize);
        let b = self.position(e.v as usize);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Maximum compact-index separation across an edge (the matrix bandwidth).
    pub fn bandwidth(&self) -> usize {
        self.edges
            .iter()
            .map(|e| (e.v as i64 - e.u as i64).unsigned_abs() as usize)
            .max()
            .unwrap_or(1)
    }

    /// Potential coefficient V_a per node from the cell fractions:
    /// -frac_in + a·(1-frac_in).
    pub fn potential_coeff(&self, material: Material) -> Vec<f64> {
        self.frac_in
            .iter()
            .map(|&f| -f + material.a() * (1.0 - f))
            .collect()
    }

    /// Kinetic edge weights for the material: the series-harmonic average
    /// 1/(s + (1-s)·m) of the two material segments, with s the edge's
    /// inside-length fraction. Reduces to the plain harmonic mean of 1 and
    /// 1/m when the interface cuts the edge in half.
    pub fn edge_weights(&self, material: Material) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| 1.0 / (e.frac_in + (1.0 - e.frac_in) * material.m()))
            .collect()
    }
}

/// Fraction of the edge [a, b] lying inside Ω. Endpoint classification plus
/// a bisection for the crossing; falls back to fine sampling when the edge
/// crosses more than once.
fn edge_inside_fraction(geometry: &Geometry, a: [f64; 2], b: [f64; 2]) -> f64 {
    let ia = geometry.inside_inner(a);
    let ib = geometry.inside_inner(b);
    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let im = geometry.inside_inner(mid);
    if ia == ib {
        if im == ia {
            return if ia { 1.0 } else { 0.0 };
        }
        // double crossing: sample
        let k = 64;
        let mut count = 0;
        for j in 0..k {
            let t = (j as f64 + 0.5) / k as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            if geometry.inside_inner(p) {
                count += 1;
            }
        }
        return count as f64 / k as f64;
    }
    // single crossing: bisect for the crossing parameter
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..40 {
        let t = 0.5 * (lo + hi);
        let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        if geometry.inside_inner(p) == ia {
            lo = t;
        } else {
            hi = t;
        }
    }
    let t = 0.5 * (lo + hi);
    if ia { t } else { 1.0 - t }
}

/// Area fraction of the h×h cell centered at p inside Ω, by 16×16 midpoint
/// subsampling (only interface cells reach this path).
fn cell_fraction(geometry: &Geometry, p: [f64; 2], h: f64) -> f64 {
    const K: usize = 16;
    let mut count = 0;
    for j in 0..K {
        for i in 0..K {
            let q = [
                p[0] + ((i as f64 + 0.5) / K as f64 - 0.5) * h,
                p[1] + ((j as f64 + 0.5) / K as f64 - 0.5) * h,
            ];
            if geometry.inside_inner(q) {
                count += 1;
            }
        }
    }
    count as f64 / (K * K) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plaquette_circulation_of_reference_field_is_h_squared() {
        let grid = MaskedGrid2d::from_resolution(Geometry::default_discs(), 16.0).unwrap();
        let h2 = grid.h * grid.h;
        for p in &grid.plaquettes {
            let circ = grid.edges[p.e_bottom as usize].theta_coeff
                + grid.edges[p.e_right as usize].theta_coeff
                - grid.edges[p.e_top as usize].theta_coeff
                - grid.edges[p.e_left as usize].theta_coeff;
            assert!((circ - h2).abs() < 1e-14, "circulation {circ} vs h² {h2}");
        }
    }

    #[test]
    fn edge_fractions_and_weights() {
        let grid = MaskedGrid2d::from_resolution(Geometry::default_discs(), 24.0).unwrap();
        let mat = Material::new(1.0, 10.0).unwrap();
        let w = grid.edge_weights(mat);
        for (k, e) in grid.edges.iter().enumerate() {
            assert!((0.0..=1.0).contains(&e.frac_in), "fraction {} out of range", e.frac_in);
            assert!(w[k] <= 1.0 + 1e-12 && w[k] >= 0.1 - 1e-12, "weight {} out of range", w[k]);
            let mid = grid.edge_midpoint(e);
            let r = (mid[0] * mid[0] + mid[1] * mid[1]).sqrt();
            if r < 1.0 - grid.h {
                assert!((w[k] - 1.0).abs() < 1e-12, "interior edge weight {}", w[k]);
            }
            if r > 1.0 + grid.h {
                assert!((w[k] - 0.1).abs() < 1e-12, "exterior edge weight {}", w[k]);
            }
        }
    }

    #[test]
    fn fractions_partition_regions() {
        let grid = MaskedGrid2d::from_resolution(Geometry::default_discs(), 24.0).unwrap();
        // total inner area from fractions approximates π r²
        let area: f64 = grid.frac_in.iter().sum::<f64>() * grid.h * grid.h;
        let exact = std::f64::consts::PI;
        assert!((area - exact).abs() < 3e-3, "area {area} vs {exact}");
    }

    #[test]
    fn node_count_constructor_spans_box() {
        let grid = MaskedGrid2d::from_node_count(Geometry::default_discs(), 128).unwrap();
        assert!(grid.nx == 129 && grid.ny == 129, "grid {}x{}", grid.nx, grid.ny);
        assert!((grid.h - 3.0 / 127.0).abs() < 1e-12);
    }
}
