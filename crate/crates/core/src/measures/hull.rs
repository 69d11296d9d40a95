//! Convex hulls of atom sets in affine dimension at most 3.
//!
//! Points are first expressed in an orthonormal frame of their affine hull,
//! so a flat set in ℝ³ (or the probability simplex in ℝ^k) is handled by the
//! lower-dimensional routine. In three intrinsic dimensions the facets are
//! found by brute force over point triples; this is quartic but the atom
//! sets we take hulls of are small.

use super::{dot, AtomicMeasure};
use crate::error::{Error, Result};

/// The closed convex hull of a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
    /// `⟨normal, y⟩ ≤ offset` in frame coordinates, unit normals.
    facets: Vec<(Vec<f64>, f64)>,
    tol: f64,
}

impl SupportPolytope {
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::invalid("hull of an empty set"))?;
        let dim = first.len();
        let scale = points
            .iter()
            .flat_map(|p| p.iter().zip(first).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max)
            .max(1.0);
        let tol = 1e-9 * scale;

        let origin = first.clone();
        let basis = affine_frame(points, &origin, tol);
        let k = basis.len();
        if k > 3 {
            return Err(Error::DimensionUnsupported(k));
        }
        let local: Vec<Vec<f64>> = points
            .iter()
            .map(|p| to_frame(p, &origin, &basis))
            .collect();

        let (vertex_ids, facets) = match k {
            0 => (vec![0], Vec::new()),
            1 => hull_1d(&local),
            2 => hull_2d(&local, tol),
            _ => hull_3d(&local, tol),
        };
        let mut vertices: Vec<Vec<f64>> = vertex_ids.iter().map(|&i| points[i].clone()).collect();
        vertices.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        vertices.dedup();

        Ok(SupportPolytope {
            dim,
            vertices,
            origin,
            basis,
            facets,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Distance from `x` to the affine hull, and the signed distance from the
    /// projection to the relative boundary (positive inside).
    fn locate(&self, x: &[f64]) -> (f64, f64) {
        let y = to_frame(x, &self.origin, &self.basis);
        let mut back = self.origin.clone();
        for (yi, b) in y.iter().zip(&self.basis) {
            for (bj, v) in back.iter_mut().zip(b) {
                *bj += yi * v;
            }
        }
        let off = back
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel = if self.facets.is_empty() {
            0.0
        } else {
            self.facets
                .iter()
                .map(|(n, c)| c - dot(n, &y))
                .fold(f64::INFINITY, f64::min)
        };
        (off, rel)
    }

    /// Membership in the (closed) hull, up to the hull tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        let (off, rel) = self.locate(x);
        off <= self.tol && rel >= -self.tol
    }

    /// Signed distance to the boundary of the hull in ℝ^d: positive on the
    /// interior, zero on the boundary, negative outside. Flat hulls have an
    /// empty interior and never report a positive depth.
    pub fn depth(&self, x: &[f64]) -> f64 {
        let (off, rel) = self.locate(x);
        if self.affine_dim() == self.dim {
            rel
        } else {
            -(off + (-rel).max(0.0))
        }
    }
}

/// The convex hull of the atoms of `mu`.
pub fn cosupport(mu: &AtomicMeasure) -> Result<SupportPolytope> {
    let pts: Vec<Vec<f64>> = mu.atoms().map(|(p, _)| p.to_vec()).collect();
    SupportPolytope::from_points(&pts)
}

fn affine_frame(points: &[Vec<f64>], origin: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    loop {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for p in points {
            let mut r: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
            let norm = dot(&r, &r).sqrt();
            if norm > tol && best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, r));
            }
        }
        match best {
            Some((norm, r)) if basis.len() < origin.len() => {
                basis.push(r.into_iter().map(|v| v / norm).collect());
            }
            _ => return basis,
        }
    }
}

fn to_frame(x: &[f64], origin: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let d: Vec<f64> = x.iter().zip(origin).map(|(a, b)| a - b).collect();
    basis.iter().map(|b| dot(&d, b)).collect()
}

type HullParts = (Vec<usize>, Vec<(Vec<f64>, f64)>);

fn hull_1d(local: &[Vec<f64>]) -> HullParts {
    let (mut lo, mut hi) = (0, 0);
    for (i, p) in local.iter().enumerate() {
        if p[0] < local[lo][0] {
            lo = i;
        }
        if p[0] > local[hi][0] {
            hi = i;
        }
    }
    (
        vec![lo, hi],
        vec![(vec![-1.0], -local[lo][0]), (vec![1.0], local[hi][0])],
    )
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; returns hull vertex indices in counter-clockwise
/// order with collinear points dropped.
fn monotone_chain(pts: &[[f64; 2]], ids: &[usize], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].partial_cmp(&pts[b]).expect("finite"));
    order.dedup_by(|a, b| {
        (pts[*a][0] - pts[*b][0]).abs() <= tol && (pts[*a][1] - pts[*b][1]).abs() <= tol
    });
    if order.len() < 3 {
        return order.iter().map(|&i| ids[i]).collect();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if cross2(&pts[a], &pts[b], &pts[i]) <= tol * tol {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull.into_iter().map(|i| ids[i]).collect()
}

fn hull_2d(local: &[Vec<f64>], tol: f64) -> HullParts {
    let pts: Vec<[f64; 2]> = local.iter().map(|p| [p[0], p[1]]).collect();
    let ids: Vec<usize> = (0..pts.len()).collect();
    let ring = monotone_chain(&pts, &ids, tol);
    let mut facets = Vec::with_capacity(ring.len());
    for w in 0..ring.len() {
        let a = pts[ring[w]];
        let b = pts[ring[(w + 1) % ring.len()]];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let n = vec![dy / len, -dx / len];
        let c = n[0] * a[0] + n[1] * a[1];
        facets.push((n, c));
    }
    (ring, facets)
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn hull_3d(local: &[Vec<f64>], tol: f64) -> HullParts {
    let n = local.len();
    let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = cross3(sub3(&local[j], &local[i]), sub3(&local[k], &local[i]));
                let len = (nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]).sqrt();
                if len <= tol * tol {
                    continue;
                }
                let unit = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let off = dot(&unit, &local[i]);
                let (mut above, mut below) = (false, false);
                for p in local {
                    let s = dot(&unit, p) - off;
                    above |= s > tol;
                    below |= s < -tol;
                    if above && below {
                        break;
                    }
                }
                let candidate = match (above, below) {
                    (false, _) => (unit.to_vec(), off),
                    (true, false) => (unit.iter().map(|v| -v).collect(), -off),
                    (true, true) => continue,
                };
                let dup = facets
                    .iter()
                    .any(|(m, c)| dot(m, &candidate.0) > 1.0 - 1e-12 && (c - candidate.1).abs() <= tol);
                if !dup {
                    facets.push(candidate);
                }
            }
        }
    }

    let mut vertices = Vec::new();
    for (nrm, off) in &facets {
        let on: Vec<usize> = (0..n)
            .filter(|&m| (dot(nrm, &local[m]) - off).abs() <= tol)
            .collect();
        // In-plane frame for the facet.
        let seed = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = cross3([nrm[0], nrm[1], nrm[2]], seed);
        let ul = dot(&u, &u).sqrt();
        let u = [u[0] / ul, u[1] / ul, u[2] / ul];
        let v = cross3([nrm[0], nrm[1], nrm[2]], u);
        let pts: Vec<[f64; 2]> = on.iter().map(|&m| [dot(&u, &local[m]), dot(&v, &local[m])]).collect();
        vertices.extend(monotone_chain(&pts, &on, tol));
    }
    vertices.sort_unstable();
    vertices.dedup();
    (vertices, facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hull(points: &[&[f64]]) -> SupportPolytope {
        SupportPolytope::from_points(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_atoms() {
        let h = hull(&[&[0.0], &[1.0]]);
        assert_eq!(h.vertices(), &[vec![0.0], vec![1.0]]);
        assert!(h.contains(&[0.5]));
        assert!(!h.contains(&[1.5]));
        assert!((h.depth(&[0.25]) - 0.25).abs() < 1e-12);
        assert!((h.depth(&[-0.5]) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn interior_atom_is_not_a_vertex() {
        let h = hull(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.25, 0.25]]);
        assert_eq!(h.vertices(), &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(h.contains(&[0.25, 0.25]));
        assert!(!h.contains(&[0.6, 0.6]));
        assert!(h.depth(&[0.2, 0.2]) > 0.0);
    }

    #[test]
    fn singleton() {
        let h = hull(&[&[2.0, -1.0]]);
        assert_eq!(h.vertices(), &[vec![2.0, -1.0]]);
        assert_eq!(h.affine_dim(), 0);
        assert!(h.contains(&[2.0, -1.0]));
        assert!(!h.contains(&[2.0, -0.9]));
        assert!(h.depth(&[2.0, -1.0]) <= 0.0);
    }

    #[test]
    fn collinear_points_in_the_plane() {
        let h = hull(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[0.5, 0.5]]);
        assert_eq!(h.affine_dim(), 1);
        assert_eq!(h.vertices(), &[vec![0.0, 0.0], vec![2.0, 2.0]]);
        assert!(h.contains(&[1.5, 1.5]));
        assert!(!h.contains(&[1.5, 1.0]));
        assert!(h.depth(&[1.0, 1.0]) <= 0.0);
    }

    #[test]
    fn cube_with_interior_and_face_points() {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for a in [0.0, 1.0] {
            for b in [0.0, 1.0] {
                for c in [0.0, 1.0] {
                    pts.push(vec![a, b, c]);
                }
            }
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 1.0]);
        pts.push(vec![0.0, 0.5, 0.5]);
        let h = SupportPolytope::from_points(&pts).unwrap();
        assert_eq!(h.vertices().len(), 8);
        assert!((h.depth(&[0.5, 0.5, 0.5]) - 0.5).abs() < 1e-12);
        assert!(h.contains(&[0.9, 0.1, 0.3]));
        assert!(!h.contains(&[1.1, 0.1, 0.3]));
    }

    #[test]
    fn simplex_embedding_is_flat() {
        let h = hull(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(h.affine_dim(), 2);
        assert_eq!(h.vertices().len(), 3);
        assert!(h.contains(&[0.2, 0.3, 0.5]));
        assert!(!h.contains(&[0.2, 0.3, 0.4]));
        assert!(!h.contains(&[-0.1, 0.6, 0.5]));
    }

    #[test]
    fn tetrahedron_in_four_dims_is_rejected_only_beyond_three() {
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let mut e = vec![0.0; 5];
                e[i] = 1.0;
                e
            })
            .collect();
        // Affine dimension 4.
        assert_eq!(
            SupportPolytope::from_points(&pts).unwrap_err(),
            Error::DimensionUnsupported(4)
        );
        assert!(SupportPolytope::from_points(&pts[..4]).is_ok());
    }
}
