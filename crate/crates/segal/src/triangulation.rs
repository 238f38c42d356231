//! Triangulations of a convex polygon with cyclically labeled vertices.

use std::collections::BTreeSet;

use serde_json::json;

/// A triangulation of the convex `(n+1)`-gon with vertices `0..=n` in cyclic
/// order: `n - 1` triangles tiling the polygon.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Triangulation {
    /// Number of polygon vertices (one more than the simplex level it tests).
    pub polygon_size: usize,
    /// Triangles as sorted triples `i < j < k`, listed lexicographically.
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    /// The diagonals: edges shared by two triangles.
    pub fn internal_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut seen = BTreeSet::new();
        let mut internal = BTreeSet::new();
        for e in self.triangles.iter().flat_map(triangle_edges) {
            if !seen.insert(e) {
                internal.insert(e);
            }
        }
        internal
    }

    /// Checks the tiling conditions: `n - 1` triangles on polygon vertices,
    /// each boundary edge in exactly one triangle, each diagonal in exactly two.
    pub fn is_valid(&self) -> bool {
        let n = self.polygon_size - 1;
        if self.triangles.len() != n - 1 {
            return false;
        }
        if self
            .triangles
            .iter()
            .any(|t| !(t[0] < t[1] && t[1] < t[2] && t[2] <= n))
        {
            return false;
        }
        let mut counts = std::collections::BTreeMap::new();
        for e in self.triangles.iter().flat_map(triangle_edges) {
            *counts.entry(e).or_insert(0usize) += 1;
        }
        for i in 0..=n {
            let boundary = if i < n { (i, i + 1) } else { (0, n) };
            if counts.get(&boundary) != Some(&1) {
                return false;
            }
        }
        counts.iter().all(|(&e, &c)| {
            let is_boundary = e.1 == e.0 + 1 || (e.0 == 0 && e.1 == n);
            c == if is_boundary { 1 } else { 2 }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "polygon_size": self.polygon_size,
            "triangles": self.triangles,
        })
    }
}

fn triangle_edges(t: &[usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

/// All triangulations of the `(n+1)`-gon, for `n >= 2`. There are
/// `Catalan(n-1)` of them.
pub fn enumerate_triangulations(n: usize) -> Vec<Triangulation> {
    assert!(n >= 2, "polygons need at least three vertices");
    let vertices: Vec<usize> = (0..=n).collect();
    let mut out: Vec<Triangulation> = split(&vertices)
        .into_iter()
        .map(|mut triangles| {
            triangles.sort();
            Triangulation {
                polygon_size: n + 1,
                triangles,
            }
        })
        .collect();
    out.sort();
    out
}

/// Triangulations of the convex polygon spanned by `vertices` (in cyclic
/// order), by recursing on the triangle attached to the edge between the
/// first and last vertex.
fn split(vertices: &[usize]) -> Vec<Vec<[usize; 3]>> {
    if vertices.len() < 3 {
        return vec![Vec::new()];
    }
    let first = vertices[0];
    let last = *vertices.last().unwrap();
    let mut out = Vec::new();
    for apex in 1..vertices.len() - 1 {
        let left = split(&vertices[..=apex]);
        let right = split(&vertices[apex..]);
        for l in &left {
            for r in &right {
                let mut triangles = Vec::with_capacity(l.len() + r.len() + 1);
                triangles.extend_from_slice(l);
                triangles.extend_from_slice(r);
                let mut t = [first, vertices[apex], last];
                t.sort();
                triangles.push(t);
                out.push(triangles);
            }
        }
    }
    out
}
