//! Exhaustive 1-Segal and 2-Segal verification, path spaces, and the path
//! space criterion.
//!
//! All checks work within the truncation of the input: 1-Segal conditions
//! are tested at levels `2..=N`, 2-Segal conditions at `3..=N` (every
//! triangulation of the `(n+1)`-gon), and the path space criterion compares
//! the direct 2-Segal verdict with 1-Segal verdicts of both path spaces at
//! levels `2..=N-1`, which see the original levels `3..=N`.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::simplicial::{
    Descriptor, LevelwiseMap, MonotoneMap, SimplexId, TruncatedSimplicialSet,
};
use crate::triangulation::{enumerate_triangulations, Triangulation};

/// Witness that a Segal map fails to be a bijection: either two simplices
/// with the same image, or a point of the fiber product with no preimage.
#[derive(Clone, Debug, serde::Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegalWitness {
    NonInjective {
        level: usize,
        first: Descriptor,
        second: Descriptor,
        tuple: Vec<Descriptor>,
    },
    NonSurjective {
        level: usize,
        tuple: Vec<Descriptor>,
    },
}

impl SegalWitness {
    pub fn level(&self) -> usize {
        match self {
            SegalWitness::NonInjective { level, .. } => *level,
            SegalWitness::NonSurjective { level, .. } => *level,
        }
    }
}

/// Outcome of a 1-Segal check over a level range.
#[derive(Clone, Debug)]
pub struct Segal1Report {
    pub levels: Vec<usize>,
    pub witness: Option<SegalWitness>,
}

impl Segal1Report {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "1-segal",
            "levels": self.levels,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "witness": self.witness.as_ref().map(|w| serde_json::to_value(w).unwrap()),
        })
    }
}

/// Outcome of a 2-Segal check; a failure names the offending triangulation.
#[derive(Clone, Debug)]
pub struct Segal2Report {
    pub levels: Vec<usize>,
    pub witness: Option<(Triangulation, SegalWitness)>,
}

impl Segal2Report {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json(&self) -> Value {
        let witness = self.witness.as_ref().map(|(tri, w)| {
            let mut v = serde_json::to_value(w).unwrap();
            v["triangulation"] = serde_json::to_value(tri).unwrap();
            v
        });
        json!({
            "check": "2-segal",
            "levels": self.levels,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "witness": witness,
        })
    }
}

/// The 1-Segal map: the tuple of spine edges of a simplex, the `i`-th being
/// its face along the vertex injection `(i-1, i)`.
pub fn segal1_map(k: &TruncatedSimplicialSet, sigma: SimplexId) -> Result<Vec<SimplexId>> {
    let n = sigma.level;
    if n < 1 || n > k.truncation() {
        return Err(SegalError::LevelOutOfRange {
            level: n,
            truncation: k.truncation(),
        });
    }
    (1..=n)
        .map(|i| {
            let inj = MonotoneMap::vertex_injection(n, &[i - 1, i])?;
            k.apply_operator(&inj, sigma)
        })
        .collect()
}

/// The target of the 1-Segal map at level `n`: all `n`-tuples of 1-simplices
/// whose endpoint 0-simplices match up, built by constraint propagation.
pub fn segal1_fiber_product(
    k: &TruncatedSimplicialSet,
    n: usize,
) -> Result<Vec<Vec<SimplexId>>> {
    if n < 1 || k.truncation() < 1 {
        return Err(SegalError::LevelOutOfRange {
            level: n.max(1),
            truncation: k.truncation(),
        });
    }
    let mut by_source: HashMap<usize, Vec<SimplexId>> = HashMap::new();
    for e in k.simplices(1) {
        by_source.entry(k.face(1, e).index).or_default().push(e);
    }
    let mut tuples: Vec<Vec<SimplexId>> = k.simplices(1).map(|e| vec![e]).collect();
    for _ in 2..=n {
        let mut next = Vec::new();
        for t in &tuples {
            let target = k.face(0, *t.last().unwrap()).index;
            if let Some(extensions) = by_source.get(&target) {
                for &e in extensions {
                    let mut longer = t.clone();
                    longer.push(e);
                    next.push(longer);
                }
            }
        }
        tuples = next;
    }
    Ok(tuples)
}

/// Tuples of the level-`n` fiber product that are not in the image of the
/// 1-Segal map.
pub fn segal1_unmatched(k: &TruncatedSimplicialSet, n: usize) -> Result<Vec<Vec<SimplexId>>> {
    if n < 1 || n > k.truncation() {
        return Err(SegalError::LevelOutOfRange {
            level: n,
            truncation: k.truncation(),
        });
    }
    let mut image: HashMap<Vec<usize>, SimplexId> = HashMap::new();
    for sigma in k.simplices(n) {
        let tuple = segal1_map(k, sigma)?;
        image.insert(tuple.iter().map(|id| id.index).collect(), sigma);
    }
    Ok(segal1_fiber_product(k, n)?
        .into_iter()
        .filter(|t| !image.contains_key(&t.iter().map(|id| id.index).collect::<Vec<_>>()))
        .collect())
}

/// Decides the 1-Segal condition at levels `2..=N`, stopping at the first
/// failing level.
pub fn segal1_check(k: &TruncatedSimplicialSet) -> Segal1Report {
    let levels: Vec<usize> = (2..=k.truncation()).collect();
    for &n in &levels {
        let mut image: HashMap<Vec<usize>, SimplexId> = HashMap::new();
        for sigma in k.simplices(n) {
            let tuple: Vec<usize> = segal1_map(k, sigma)
                .expect("level within truncation")
                .iter()
                .map(|id| id.index)
                .collect();
            if let Some(prev) = image.insert(tuple.clone(), sigma) {
                return Segal1Report {
                    levels,
                    witness: Some(SegalWitness::NonInjective {
                        level: n,
                        first: k.descriptor(prev).clone(),
                        second: k.descriptor(sigma).clone(),
                        tuple: tuple
                            .iter()
                            .map(|&e| k.descriptor(SimplexId::new(1, e)).clone())
                            .collect(),
                    }),
                };
            }
        }
        for t in segal1_fiber_product(k, n).expect("level within truncation") {
            let key: Vec<usize> = t.iter().map(|id| id.index).collect();
            if !image.contains_key(&key) {
                return Segal1Report {
                    levels,
                    witness: Some(SegalWitness::NonSurjective {
                        level: n,
                        tuple: t.iter().map(|&e| k.descriptor(e).clone()).collect(),
                    }),
                };
            }
        }
    }
    Segal1Report {
        levels,
        witness: None,
    }
}

/// Local face slot of the edge `{p, q}` within the triangle `[i, j, k]`:
/// the edge on the first two vertices is `d_2`, on the outer two `d_1`, on
/// the last two `d_0`.
fn edge_slot(triangle: &[usize; 3], edge: (usize, usize)) -> usize {
    if edge == (triangle[0], triangle[1]) {
        2
    } else if edge == (triangle[0], triangle[2]) {
        1
    } else {
        debug_assert_eq!(edge, (triangle[1], triangle[2]));
        0
    }
}

/// The 2-Segal map for one triangulation: assigns to each triangle `{i,j,k}`
/// (in lexicographic order) the face of `sigma` along the injection `(i,j,k)`.
pub fn segal2_map(
    k: &TruncatedSimplicialSet,
    tri: &Triangulation,
    sigma: SimplexId,
) -> Result<Vec<SimplexId>> {
    let n = tri.polygon_size - 1;
    if sigma.level != n {
        return Err(SegalError::ArityMismatch {
            expected: n,
            found: sigma.level,
        });
    }
    if n > k.truncation() {
        return Err(SegalError::LevelOutOfRange {
            level: n,
            truncation: k.truncation(),
        });
    }
    tri.triangles
        .iter()
        .map(|t| {
            let inj = MonotoneMap::vertex_injection(n, t)?;
            k.apply_operator(&inj, sigma)
        })
        .collect()
}

/// The target of the 2-Segal map: every assignment of a 2-simplex to each
/// triangle such that the extracted 1-simplices agree along shared
/// diagonals. Enumerated by walking the (tree-shaped) dual graph of the
/// triangulation and filtering candidates against the edges already pinned.
pub fn segal2_assignments(
    k: &TruncatedSimplicialSet,
    tri: &Triangulation,
) -> Result<Vec<Vec<SimplexId>>> {
    let n = tri.polygon_size - 1;
    if n > k.truncation() || k.truncation() < 2 {
        return Err(SegalError::LevelOutOfRange {
            level: n,
            truncation: k.truncation(),
        });
    }
    let triangles = &tri.triangles;

    // faces[slot][simplex index at level 2] = edge index
    let mut faces: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut by_face: [HashMap<usize, Vec<usize>>; 3] =
        [HashMap::new(), HashMap::new(), HashMap::new()];
    for tau in k.simplices(2) {
        for slot in 0..3 {
            let edge = k.face(slot, tau).index;
            faces[slot].push(edge);
            by_face[slot].entry(edge).or_default().push(tau.index);
        }
    }

    // dual adjacency along internal edges
    let mut edge_owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t_pos, t) in triangles.iter().enumerate() {
        for e in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            edge_owners.entry(e).or_default().push(t_pos);
        }
    }
    let mut adjacency: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); triangles.len()];
    for (&e, owners) in &edge_owners {
        if owners.len() == 2 {
            adjacency[owners[0]].push((owners[1], e));
            adjacency[owners[1]].push((owners[0], e));
        }
    }
    for row in &mut adjacency {
        row.sort();
    }

    // breadth-first order: each triangle after the first is constrained by
    // exactly one already-visited neighbor (the dual graph is a tree)
    let mut order: Vec<usize> = Vec::with_capacity(triangles.len());
    let mut constraint: Vec<Option<(usize, (usize, usize))>> = vec![None; triangles.len()];
    let mut visited = vec![false; triangles.len()];
    let mut queue = std::collections::VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(t_pos) = queue.pop_front() {
        order.push(t_pos);
        for &(other, e) in &adjacency[t_pos] {
            if !visited[other] {
                visited[other] = true;
                constraint[other] = Some((t_pos, e));
                queue.push_back(other);
            }
        }
    }
    debug_assert_eq!(order.len(), triangles.len());

    #[allow(clippy::too_many_arguments)]
    fn extend(
        k: &TruncatedSimplicialSet,
        triangles: &[[usize; 3]],
        order: &[usize],
        constraint: &[Option<(usize, (usize, usize))>],
        faces: &[Vec<usize>; 3],
        by_face: &[HashMap<usize, Vec<usize>>; 3],
        depth: usize,
        current: &mut HashMap<usize, usize>,
        out: &mut Vec<Vec<SimplexId>>,
    ) {
        if depth == order.len() {
            out.push(
                (0..triangles.len())
                    .map(|t| SimplexId::new(2, current[&t]))
                    .collect(),
            );
            return;
        }
        let t_pos = order[depth];
        let candidates: Vec<usize> = match constraint[t_pos] {
            None => (0..k.level_size(2)).collect(),
            Some((earlier, e)) => {
                let pinned = faces[edge_slot(&triangles[earlier], e)][current[&earlier]];
                by_face[edge_slot(&triangles[t_pos], e)]
                    .get(&pinned)
                    .cloned()
                    .unwrap_or_default()
            }
        };
        for c in candidates {
            current.insert(t_pos, c);
            extend(
                k, triangles, order, constraint, faces, by_face, depth + 1, current, out,
            );
        }
        current.remove(&t_pos);
    }

    let mut assignments: Vec<Vec<SimplexId>> = Vec::new();
    let mut current: HashMap<usize, usize> = HashMap::new();
    extend(
        k,
        triangles,
        &order,
        &constraint,
        &faces,
        &by_face,
        0,
        &mut current,
        &mut assignments,
    );
    Ok(assignments)
}

/// Decides the 2-Segal condition at levels `3..=N` over every triangulation,
/// stopping at the first failure.
pub fn segal2_check(k: &TruncatedSimplicialSet) -> Segal2Report {
    let levels: Vec<usize> = (3..=k.truncation()).collect();
    for &n in &levels {
        for tri in enumerate_triangulations(n) {
            let mut image: HashMap<Vec<usize>, SimplexId> = HashMap::new();
            for sigma in k.simplices(n) {
                let tuple: Vec<usize> = segal2_map(k, &tri, sigma)
                    .expect("level within truncation")
                    .iter()
                    .map(|id| id.index)
                    .collect();
                if let Some(prev) = image.insert(tuple.clone(), sigma) {
                    return Segal2Report {
                        levels,
                        witness: Some((
                            tri,
                            SegalWitness::NonInjective {
                                level: n,
                                first: k.descriptor(prev).clone(),
                                second: k.descriptor(sigma).clone(),
                                tuple: tuple
                                    .iter()
                                    .map(|&t| k.descriptor(SimplexId::new(2, t)).clone())
                                    .collect(),
                            },
                        )),
                    };
                }
            }
            for t in segal2_assignments(k, &tri).expect("level within truncation") {
                let key: Vec<usize> = t.iter().map(|id| id.index).collect();
                if !image.contains_key(&key) {
                    return Segal2Report {
                        levels,
                        witness: Some((
                            tri,
                            SegalWitness::NonSurjective {
                                level: n,
                                tuple: t.iter().map(|&x| k.descriptor(x).clone()).collect(),
                            },
                        )),
                    };
                }
            }
        }
    }
    Segal2Report {
        levels,
        witness: None,
    }
}

/// The left path space: level `n` is `K_{n+1}`, faces and degeneracies drop
/// their index by one, and the comparison map back to `K` is the unused `d_0`.
pub fn path_space_left(
    k: &TruncatedSimplicialSet,
) -> Result<(TruncatedSimplicialSet, LevelwiseMap)> {
    path_space(k, true)
}

/// The right path space: level `n` is `K_{n+1}` with the last face and
/// degeneracy dropped; the comparison map is `d_{n+1}`.
pub fn path_space_right(
    k: &TruncatedSimplicialSet,
) -> Result<(TruncatedSimplicialSet, LevelwiseMap)> {
    path_space(k, false)
}

fn path_space(
    k: &TruncatedSimplicialSet,
    left: bool,
) -> Result<(TruncatedSimplicialSet, LevelwiseMap)> {
    if k.truncation() == 0 {
        return Err(SegalError::TruncationTooSmall {
            truncation: 0,
            needed: 1,
        });
    }
    let truncation = k.truncation() - 1;
    let mut levels = Vec::with_capacity(truncation + 1);
    let mut faces = Vec::with_capacity(truncation + 1);
    let mut degeneracies = Vec::with_capacity(truncation + 1);
    let mut comparison = Vec::with_capacity(truncation + 1);
    for m in 0..=truncation {
        let size = k.level_size(m + 1);
        levels.push(k.descriptors(m + 1).to_vec());
        let face_rows: Vec<Vec<usize>> = if m == 0 {
            Vec::new()
        } else {
            (0..=m)
                .map(|i| {
                    let source = if left { i + 1 } else { i };
                    (0..size)
                        .map(|idx| k.face(source, SimplexId::new(m + 1, idx)).index)
                        .collect()
                })
                .collect()
        };
        faces.push(face_rows);
        let degen_rows: Vec<Vec<usize>> = if m == truncation {
            Vec::new()
        } else {
            (0..=m)
                .map(|i| {
                    let source = if left { i + 1 } else { i };
                    (0..size)
                        .map(|idx| k.degeneracy(source, SimplexId::new(m + 1, idx)).index)
                        .collect()
                })
                .collect()
        };
        degeneracies.push(degen_rows);
        let comparison_row: Vec<usize> = (0..size)
            .map(|idx| {
                let i = if left { 0 } else { m + 1 };
                k.face(i, SimplexId::new(m + 1, idx)).index
            })
            .collect();
        comparison.push(comparison_row);
    }
    let side = if left { "left" } else { "right" };
    let set = TruncatedSimplicialSet::from_tables(
        truncation,
        format!("{side}-path-space({})", k.label()),
        levels,
        faces,
        degeneracies,
    )?;
    Ok((set, LevelwiseMap { levels: comparison }))
}

/// Outcome of the path space criterion: the direct 2-Segal verdict next to
/// the 1-Segal verdicts of both path spaces.
#[derive(Clone, Debug)]
pub struct PathCriterionReport {
    pub direct: Segal2Report,
    pub left: Segal1Report,
    pub right: Segal1Report,
}

impl PathCriterionReport {
    /// Both routes decide the same thing; a disagreement would point at an
    /// implementation bug rather than at the input.
    pub fn agree(&self) -> bool {
        self.direct.passed() == (self.left.passed() && self.right.passed())
    }

    pub fn passed(&self) -> bool {
        self.direct.passed() && self.left.passed() && self.right.passed()
    }

    pub fn to_json(&self) -> Value {
        let witness = if self.passed() {
            None
        } else if let Some((tri, w)) = &self.direct.witness {
            let mut v = serde_json::to_value(w).unwrap();
            v["triangulation"] = serde_json::to_value(tri).unwrap();
            Some(v)
        } else {
            self.left
                .witness
                .as_ref()
                .or(self.right.witness.as_ref())
                .map(|w| serde_json::to_value(w).unwrap())
        };
        json!({
            "check": "path-criterion",
            "levels": self.direct.levels,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "witness": witness,
            "agree": self.agree(),
            "routes": {
                "direct": self.direct.to_json(),
                "left": self.left.to_json(),
                "right": self.right.to_json(),
            },
        })
    }
}

/// Runs the 2-Segal check directly and through both path spaces, reporting
/// every verdict. Checking 2-Segal at levels `3..=N` corresponds to the
/// 1-Segal checks of the path spaces at levels `2..=N-1`.
pub fn path_space_criterion(k: &TruncatedSimplicialSet) -> Result<PathCriterionReport> {
    if k.truncation() < 3 {
        return Err(SegalError::TruncationTooSmall {
            truncation: k.truncation(),
            needed: 3,
        });
    }
    let direct = segal2_check(k);
    let (left, _) = path_space_left(k)?;
    let (right, _) = path_space_right(k)?;
    Ok(PathCriterionReport {
        direct,
        left: segal1_check(&left),
        right: segal1_check(&right),
    })
}
