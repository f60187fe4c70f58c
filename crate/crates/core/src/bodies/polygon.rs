//! Convex polygons, used by the illumination examples.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// A convex polygon with counter-clockwise vertices. Edge `i` joins vertex
/// `i` to vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    lengths: Vec<f64>,
}

impl Polygon {
    /// Builds the polygon and translates its centroid to the origin.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let c = centroid(&vertices);
        let shifted = vertices.iter().map(|v| [v[0] - c[0], v[1] - c[1]]).collect();
        Self::uncentered(shifted)
    }

    /// Builds the polygon without moving it; the origin must be strictly inside.
    pub fn uncentered(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::InvalidInput(format!("polygon needs >= 3 vertices, got {n}")));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidInput("non-finite polygon vertex".into()));
        }
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        let mut lengths = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            if e1[0] * e2[1] - e1[1] * e2[0] <= 0.0 {
                return Err(GeometryError::InvalidInput(
                    "polygon vertices must be in strictly convex counter-clockwise position".into(),
                ));
            }
            let len = e1[0].hypot(e1[1]);
            let nrm = [e1[1] / len, -e1[0] / len];
            normals.push(nrm);
            offsets.push(nrm[0] * a[0] + nrm[1] * a[1]);
            lengths.push(len);
        }
        // Total turning must be one revolution (rules out star polygons).
        let turning: f64 = (0..n)
            .map(|i| {
                let a = normals[i];
                let b = normals[(i + 1) % n];
                (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
            })
            .sum();
        if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
            return Err(GeometryError::InvalidInput("polygon winds more than once".into()));
        }
        if let Some(h) = offsets.iter().find(|h| **h <= 0.0) {
            return Err(GeometryError::Admissibility(format!(
                "origin not strictly inside polygon (edge offset {h})"
            )));
        }
        Ok(Self { vertices, normals, offsets, lengths })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    /// Outer unit normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> [f64; 2] {
        self.normals[i]
    }

    /// Support value of edge `i`, i.e. <x, n_i> for x on the edge.
    pub fn edge_offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.lengths[i]
    }

    pub fn support(&self, u: [f64; 2]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0] * u[0] + v[1] * u[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn radial(&self, u: [f64; 2]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .filter_map(|(n, h)| {
                let d = n[0] * u[0] + n[1] * u[1];
                (d > 0.0).then(|| h / d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, h)| n[0] * x[0] + n[1] * x[1] <= *h)
    }

    /// Exact area by the shoelace formula (equals (1/2) * integral of rho^2).
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Polar polygon: vertices n_i / h_i, already counter-clockwise.
    pub fn polar(&self) -> Result<Self> {
        let verts = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, h)| [n[0] / h, n[1] / h])
            .collect();
        Self::uncentered(verts)
    }

    pub fn transformed(&self, m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let mut verts: Vec<[f64; 2]> = self
            .vertices
            .iter()
            .map(|v| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]])
            .collect();
        if det < 0.0 {
            verts.reverse();
        }
        Self::uncentered(verts)
    }
}

fn centroid(vertices: &[[f64; 2]]) -> [f64; 2] {
    let n = vertices.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let cross = p[0] * q[1] - p[1] * q[0];
        a += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    if a.abs() < f64::MIN_POSITIVE {
        return [0.0, 0.0];
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::new(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap()
    }

    #[test]
    fn square_edges_in_order() {
        let s = square();
        assert_eq!(s.edge_normal(0), [1.0, 0.0]);
        assert_eq!(s.edge_normal(1), [0.0, 1.0]);
        assert_eq!(s.edge_length(2), 2.0);
        assert_eq!(s.area(), 4.0);
        assert_eq!(s.support([0.0, 1.0]), 1.0);
    }

    #[test]
    fn recentres_translated_triangle() {
        let t = Polygon::new(vec![[10.0, 10.0], [13.0, 10.0], [10.0, 13.0]]).unwrap();
        let v = t.vertices()[0];
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        assert!(Polygon::new(vec![[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]]).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Polygon::new(vec![[-1.0, -1.0], [0.0, -1.0], [1.0, -1.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let p = square().polar().unwrap();
        assert_eq!(p.vertices(), &[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]);
    }
}
