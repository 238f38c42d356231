//! The 2-Segal set of a finite multigraph.
//!
//! Level `n` consists of pairs `(H; S_1, ..., S_n)`: a subgraph `H` together
//! with an ordered partition of its vertex set into `n` disjoint, possibly
//! empty blocks. Outer faces cut off the first or last block (restricting to
//! the induced subgraph), inner faces merge adjacent blocks, and degeneracies
//! insert empty blocks.

use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::simplicial::{assemble, Descriptor, TruncatedSimplicialSet};

/// A finite multigraph: loops and parallel edges are allowed, and edges are
/// distinguished by id.
#[derive(Clone, Debug)]
pub struct Multigraph {
    vertices: Vec<String>,
    /// Edge ids with endpoint indices into `vertices` (unordered; a loop has
    /// both endpoints equal).
    edges: Vec<(String, usize, usize)>,
}

impl Multigraph {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let mut sorted_vertices = vertices;
        sorted_vertices.sort();
        sorted_vertices.dedup();
        let mut edge_list = Vec::with_capacity(edges.len());
        for (id, a, b) in edges {
            let fa = sorted_vertices
                .binary_search(&a)
                .map_err(|_| SegalError::InvalidInput(format!("edge {id} endpoint {a} is not a vertex")))?;
            let fb = sorted_vertices
                .binary_search(&b)
                .map_err(|_| SegalError::InvalidInput(format!("edge {id} endpoint {b} is not a vertex")))?;
            edge_list.push((id, fa.min(fb), fa.max(fb)));
        }
        edge_list.sort();
        for pair in edge_list.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(SegalError::InvalidInput(format!(
                    "duplicate edge id {}",
                    pair[0].0
                )));
            }
        }
        Ok(Multigraph {
            vertices: sorted_vertices,
            edges: edge_list,
        })
    }

    /// Reads `{ "vertices": ["a", ...], "edges": [{"id": "e", "ends": ["a","b"]}, ...] }`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| SegalError::InvalidInput("graph must be a JSON object".into()))?;
        let vertices = obj
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("graph needs a \"vertices\" array".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| SegalError::InvalidInput("vertex labels must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for e in obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("graph needs an \"edges\" array".into()))?
        {
            let id = e
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| SegalError::InvalidInput("edge needs a string \"id\"".into()))?;
            let ends = e
                .get("ends")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or_else(|| {
                    SegalError::InvalidInput(format!("edge {id} needs \"ends\": [a, b]"))
                })?;
            let a = ends[0].as_str().ok_or_else(|| {
                SegalError::InvalidInput(format!("edge {id} endpoints must be strings"))
            })?;
            let b = ends[1].as_str().ok_or_else(|| {
                SegalError::InvalidInput(format!("edge {id} endpoints must be strings"))
            })?;
            edges.push((id.to_string(), a.to_string(), b.to_string()));
        }
        Multigraph::new(vertices, edges)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices,
            "edges": self.edges.iter().map(|(id, a, b)| json!({
                "id": id,
                "ends": [self.vertices[*a], self.vertices[*b]],
            })).collect::<Vec<_>>(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Every subgraph: a vertex subset together with a subset of the edges
    /// internal to it.
    pub fn subgraphs(&self) -> Vec<Subgraph> {
        let n = self.vertices.len();
        assert!(n < 32 && self.edges.len() < 32, "subgraph enumeration is exponential; this builder is meant for small graphs");
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let vertices: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let internal: Vec<usize> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, (_, a, b))| mask & (1 << a) != 0 && mask & (1 << b) != 0)
                .map(|(k, _)| k)
                .collect();
            for emask in 0u64..(1 << internal.len()) {
                let edges: Vec<usize> = internal
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| emask & (1 << p) != 0)
                    .map(|(_, &k)| k)
                    .collect();
                out.push(Subgraph {
                    vertices: vertices.clone(),
                    edges,
                });
            }
        }
        out
    }
}

/// A subgraph, by sorted vertex and edge indices into the ambient graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// An `n`-simplex of the graph construction: a subgraph plus a block index
/// in `1..=n` per vertex (aligned with the sorted vertex list).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphSimplex {
    pub sub: Subgraph,
    pub block: Vec<usize>,
}

impl GraphSimplex {
    fn descriptor(&self, g: &Multigraph) -> Descriptor {
        Descriptor::new(&json!({
            "vertices": self.sub.vertices.iter().map(|&v| &g.vertices[v]).collect::<Vec<_>>(),
            "edges": self.sub.edges.iter().map(|&e| &g.edges[e].0).collect::<Vec<_>>(),
            "blocks": self.block,
        }))
    }

    /// Keeps the vertices selected by `keep` (a predicate on block index) and
    /// the edges with both endpoints surviving, renumbering blocks.
    fn restrict(&self, g: &Multigraph, keep: impl Fn(usize) -> bool, renumber: impl Fn(usize) -> usize) -> GraphSimplex {
        let kept: Vec<(usize, usize)> = self
            .sub
            .vertices
            .iter()
            .zip(&self.block)
            .filter(|(_, &b)| keep(b))
            .map(|(&v, &b)| (v, renumber(b)))
            .collect();
        let vertex_set: Vec<usize> = kept.iter().map(|&(v, _)| v).collect();
        let edges = self
            .sub
            .edges
            .iter()
            .copied()
            .filter(|&e| {
                let (_, a, b) = g.edges[e];
                vertex_set.binary_search(&a).is_ok() && vertex_set.binary_search(&b).is_ok()
            })
            .collect();
        GraphSimplex {
            sub: Subgraph {
                vertices: vertex_set,
                edges,
            },
            block: kept.into_iter().map(|(_, b)| b).collect(),
        }
    }

    fn face(&self, g: &Multigraph, n: usize, i: usize) -> GraphSimplex {
        if i == 0 {
            self.restrict(g, |b| b > 1, |b| b - 1)
        } else if i == n {
            self.restrict(g, |b| b < n, |b| b)
        } else {
            GraphSimplex {
                sub: self.sub.clone(),
                block: self
                    .block
                    .iter()
                    .map(|&b| if b <= i { b } else { b - 1 })
                    .collect(),
            }
        }
    }

    fn degeneracy(&self, i: usize) -> GraphSimplex {
        GraphSimplex {
            sub: self.sub.clone(),
            block: self
                .block
                .iter()
                .map(|&b| if b <= i { b } else { b + 1 })
                .collect(),
        }
    }
}

/// Builds the simplicial set of a multigraph up to the given truncation.
pub fn graph_simplicial_set(g: &Multigraph, truncation: usize) -> Result<TruncatedSimplicialSet> {
    let subgraphs = g.subgraphs();
    let levels: Vec<Vec<GraphSimplex>> = (0..=truncation)
        .map(|n| {
            let mut level = Vec::new();
            for sub in &subgraphs {
                block_assignments(sub.vertices.len(), n, &mut |block| {
                    level.push(GraphSimplex {
                        sub: sub.clone(),
                        block: block.to_vec(),
                    });
                });
            }
            level
        })
        .collect();
    assemble(
        truncation,
        format!("graph({})", g.vertices.join(",")),
        levels,
        |_, s| s.descriptor(g),
        |n, i, s| s.face(g, n, i),
        |_, i, s| s.degeneracy(i),
    )
}

/// Calls `emit` with every function from `len` vertices to blocks `1..=n`.
fn block_assignments(len: usize, n: usize, emit: &mut impl FnMut(&[usize])) {
    if len == 0 {
        // the empty vertex set has exactly one assignment, even into 0 blocks
        emit(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut current = vec![1usize; len];
    loop {
        emit(&current);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if current[pos] < n {
                current[pos] += 1;
                for b in current.iter_mut().skip(pos + 1) {
                    *b = 1;
                }
                break;
            }
        }
    }
}
