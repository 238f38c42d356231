//! The 2-Segal set of a finite labeled rooted tree.
//!
//! Level 1 holds the admissible subforests of the tree: vertex sets of the
//! form `L \ L'` for nested parent-closed subsets `L' ⊆ L`, with edges
//! induced from the tree. An `n`-simplex is an admissible subforest `H`
//! together with an increasing chain `∅ = M_0 ⊆ M_1 ⊆ ... ⊆ M_n = V(H)` of
//! parent-closed subsets of `H`; the chain is stored as the first layer
//! index of each vertex, so block 1 sits on the root side.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::graph::Multigraph;
use crate::simplicial::{assemble, Descriptor, TruncatedSimplicialSet};

/// A finite rooted tree with labeled vertices.
#[derive(Clone, Debug)]
pub struct RootedTree {
    vertices: Vec<String>,
    root: usize,
    /// `parent[v]` for every non-root vertex `v` (indices into `vertices`).
    parent: Vec<Option<usize>>,
}

impl RootedTree {
    pub fn new(
        vertices: Vec<String>,
        root: String,
        parent: BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut sorted = vertices;
        sorted.sort();
        sorted.dedup();
        let root_idx = sorted
            .binary_search(&root)
            .map_err(|_| SegalError::InvalidInput(format!("root {root} is not a vertex")))?;
        let mut parent_idx = vec![None; sorted.len()];
        for (child, par) in &parent {
            let c = sorted.binary_search(child).map_err(|_| {
                SegalError::InvalidInput(format!("parent map key {child} is not a vertex"))
            })?;
            let p = sorted.binary_search(par).map_err(|_| {
                SegalError::InvalidInput(format!("parent {par} of {child} is not a vertex"))
            })?;
            if c == root_idx {
                return Err(SegalError::InvalidInput(
                    "the root cannot have a parent".into(),
                ));
            }
            parent_idx[c] = Some(p);
        }
        for (v, p) in parent_idx.iter().enumerate() {
            if v != root_idx && p.is_none() {
                return Err(SegalError::InvalidInput(format!(
                    "vertex {} has no parent and is not the root",
                    sorted[v]
                )));
            }
        }
        // every vertex must reach the root without cycles
        #[allow(clippy::needless_range_loop)]
        for start in 0..sorted.len() {
            let mut seen = BTreeSet::from([start]);
            let mut v = start;
            while let Some(p) = parent_idx[v] {
                if !seen.insert(p) {
                    return Err(SegalError::InvalidInput("parent map has a cycle".into()));
                }
                v = p;
            }
            if v != root_idx {
                return Err(SegalError::InvalidInput(format!(
                    "vertex {} is not connected to the root",
                    sorted[start]
                )));
            }
        }
        Ok(RootedTree {
            vertices: sorted,
            root: root_idx,
            parent: parent_idx,
        })
    }

    /// Reads `{ "vertices": [...], "root": "a", "parent": {"b": "a", ...} }`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| SegalError::InvalidInput("tree must be a JSON object".into()))?;
        let vertices = obj
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("tree needs a \"vertices\" array".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| SegalError::InvalidInput("vertex labels must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let root = obj
            .get("root")
            .and_then(Value::as_str)
            .ok_or_else(|| SegalError::InvalidInput("tree needs a string \"root\"".into()))?
            .to_string();
        let mut parent = BTreeMap::new();
        for (child, par) in obj
            .get("parent")
            .and_then(Value::as_object)
            .ok_or_else(|| SegalError::InvalidInput("tree needs a \"parent\" object".into()))?
        {
            let p = par.as_str().ok_or_else(|| {
                SegalError::InvalidInput("parent values must be strings".into())
            })?;
            parent.insert(child.clone(), p.to_string());
        }
        RootedTree::new(vertices, root, parent)
    }

    pub fn to_json(&self) -> Value {
        let parent: BTreeMap<&String, &String> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (&self.vertices[v], &self.vertices[p])))
            .collect();
        json!({
            "vertices": self.vertices,
            "root": self.vertices[self.root],
            "parent": parent,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertices
    }

    /// All parent-closed vertex subsets; for a tree these are exactly the
    /// empty set and the subtrees containing the root.
    pub fn lower_subtrees(&self) -> Vec<BTreeSet<usize>> {
        parent_closed_subsets(self.vertices.len(), |v| self.parent[v])
    }

    /// Admissible subforests: deduplicated differences `L \ L'` of nested
    /// lower subtrees, as sorted vertex index sets (edges are induced).
    pub fn admissible_subforests(&self) -> Vec<Vec<usize>> {
        let lower = self.lower_subtrees();
        let mut seen = BTreeSet::new();
        for big in &lower {
            for small in &lower {
                if small.is_subset(big) {
                    let diff: Vec<usize> = big.difference(small).copied().collect();
                    seen.insert(diff);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The underlying multigraph, with each non-root vertex contributing the
    /// edge to its parent (edge id = child label).
    pub fn underlying_graph(&self) -> Multigraph {
        let edges = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| {
                p.map(|p| {
                    (
                        self.vertices[v].clone(),
                        self.vertices[v].clone(),
                        self.vertices[p].clone(),
                    )
                })
            })
            .collect();
        Multigraph::new(self.vertices.clone(), edges).expect("tree edges are well formed")
    }
}

/// All subsets closed under the given parent function.
fn parent_closed_subsets(count: usize, parent: impl Fn(usize) -> Option<usize>) -> Vec<BTreeSet<usize>> {
    assert!(count < 32, "subset enumeration is exponential; this builder is meant for small trees");
    let mut out = Vec::new();
    'mask: for mask in 0u64..(1 << count) {
        for v in 0..count {
            if mask & (1 << v) != 0 {
                if let Some(p) = parent(v) {
                    if mask & (1 << p) == 0 {
                        continue 'mask;
                    }
                }
            }
        }
        out.push((0..count).filter(|v| mask & (1 << v) != 0).collect());
    }
    out
}

/// An `n`-simplex of the tree construction: the sorted vertex set of an
/// admissible subforest plus, per vertex, the first chain layer containing
/// it (a value in `1..=n`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeSimplex {
    pub vertices: Vec<usize>,
    pub layer: Vec<usize>,
}

impl TreeSimplex {
    fn descriptor(&self, t: &RootedTree) -> Descriptor {
        Descriptor::new(&json!({
            "vertices": self.vertices.iter().map(|&v| &t.vertices[v]).collect::<Vec<_>>(),
            "layer": self.layer,
        }))
    }

    fn restrict(&self, keep: impl Fn(usize) -> bool, renumber: impl Fn(usize) -> usize) -> TreeSimplex {
        let kept: Vec<(usize, usize)> = self
            .vertices
            .iter()
            .zip(&self.layer)
            .filter(|(_, &l)| keep(l))
            .map(|(&v, &l)| (v, renumber(l)))
            .collect();
        TreeSimplex {
            vertices: kept.iter().map(|&(v, _)| v).collect(),
            layer: kept.into_iter().map(|(_, l)| l).collect(),
        }
    }

    fn face(&self, n: usize, i: usize) -> TreeSimplex {
        if i == 0 {
            self.restrict(|l| l > 1, |l| l - 1)
        } else if i == n {
            self.restrict(|l| l < n, |l| l)
        } else {
            TreeSimplex {
                vertices: self.vertices.clone(),
                layer: self
                    .layer
                    .iter()
                    .map(|&l| if l <= i { l } else { l - 1 })
                    .collect(),
            }
        }
    }

    fn degeneracy(&self, i: usize) -> TreeSimplex {
        TreeSimplex {
            vertices: self.vertices.clone(),
            layer: self
                .layer
                .iter()
                .map(|&l| if l <= i { l } else { l + 1 })
                .collect(),
        }
    }
}

/// Builds the simplicial set of a rooted tree up to the given truncation.
pub fn tree_simplicial_set(t: &RootedTree, truncation: usize) -> Result<TruncatedSimplicialSet> {
    let forests = t.admissible_subforests();
    let levels: Vec<Vec<TreeSimplex>> = (0..=truncation)
        .map(|n| {
            let mut level = Vec::new();
            for vertices in &forests {
                layer_assignments(t, vertices, n, &mut |layer| {
                    level.push(TreeSimplex {
                        vertices: vertices.clone(),
                        layer: layer.to_vec(),
                    });
                });
            }
            level
        })
        .collect();
    assemble(
        truncation,
        format!("tree({})", t.vertices[t.root]),
        levels,
        |_, s| s.descriptor(t),
        |n, i, s| s.face(n, i),
        |_, i, s| s.degeneracy(i),
    )
}

/// Calls `emit` with every layer assignment `vertices -> 1..=n` such that
/// each chain set `M_k = {v : layer(v) <= k}` is parent-closed within the
/// subforest: a vertex's layer must be at least its parent's.
fn layer_assignments(
    t: &RootedTree,
    vertices: &[usize],
    n: usize,
    emit: &mut impl FnMut(&[usize]),
) {
    if vertices.is_empty() {
        emit(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    // position of each vertex's parent within the subforest, if present
    let parent_pos: Vec<Option<usize>> = vertices
        .iter()
        .map(|&v| {
            t.parent[v].and_then(|p| vertices.binary_search(&p).ok())
        })
        .collect();
    let mut layer = vec![0usize; vertices.len()];
    fn rec(
        parent_pos: &[Option<usize>],
        n: usize,
        layer: &mut Vec<usize>,
        pos: usize,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if pos == layer.len() {
            emit(layer);
            return;
        }
        // sorted labels do not respect the tree order, so the parent bound
        // applies downward when the parent was already assigned and is
        // re-checked upward for earlier-assigned children otherwise
        let lo = match parent_pos[pos] {
            Some(p) if p < pos => layer[p].max(1),
            _ => 1,
        };
        for l in lo..=n {
            layer[pos] = l;
            let consistent = (0..pos).all(|q| parent_pos[q] != Some(pos) || layer[q] >= l);
            if consistent {
                rec(parent_pos, n, layer, pos + 1, emit);
            }
        }
        layer[pos] = 0;
    }
    rec(&parent_pos, n, &mut layer, 0, emit);
}
