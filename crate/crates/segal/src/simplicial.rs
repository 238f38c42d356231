//! Finite truncated simplicial sets with explicit face and degeneracy tables.
//!
//! A simplicial set is stored up to a truncation level `N`: for each `n <= N`
//! a finite inventory of simplex descriptors, together with tables for the
//! face maps `d_i: K_n -> K_{n-1}` (for `1 <= n <= N`, `0 <= i <= n`) and the
//! degeneracy maps `s_i: K_n -> K_{n+1}` (for `0 <= n < N`, `0 <= i <= n`).
//! Descriptors are opaque canonical payloads; the builders in the other
//! modules decide what they mean.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Result, SegalError};

/// Canonical payload identifying a simplex within its level.
///
/// Internally this is the canonical JSON encoding of a builder-specific
/// value (object keys sorted), so equality, hashing, and ordering are
/// structural and deterministic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Descriptor(String);

impl Descriptor {
    pub fn new(value: &Value) -> Self {
        // serde_json maps are BTree-backed, so keys serialize sorted.
        Descriptor(serde_json::to_string(value).expect("JSON value serializes"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_value(&self) -> Value {
        serde_json::from_str(&self.0).expect("descriptor holds valid JSON")
    }
}

impl fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl serde::Serialize for Descriptor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(serializer)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Position of a simplex: its level and its index in that level's inventory.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SimplexId {
    pub level: usize,
    pub index: usize,
}

impl SimplexId {
    pub fn new(level: usize, index: usize) -> Self {
        SimplexId { level, index }
    }
}

/// An order-preserving function `[m] -> [n]` between finite ordinals.
///
/// These are the morphisms of the simplex category; every one factors as
/// cofaces after codegeneracies, which is how [`TruncatedSimplicialSet::apply_operator`]
/// evaluates them.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonotoneMap {
    target_arity: usize,
    values: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(target_arity: usize, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(SegalError::InvalidInput(
                "a monotone map needs at least one value".into(),
            ));
        }
        for pair in values.windows(2) {
            if pair[0] > pair[1] {
                return Err(SegalError::InvalidInput(format!(
                    "values {values:?} are not weakly increasing"
                )));
            }
        }
        if *values.last().unwrap() > target_arity {
            return Err(SegalError::InvalidInput(format!(
                "value {} exceeds target arity {target_arity}",
                values.last().unwrap()
            )));
        }
        Ok(MonotoneMap {
            target_arity,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        MonotoneMap {
            target_arity: n,
            values: (0..=n).collect(),
        }
    }

    /// The coface `d^i: [n] -> [n+1]` skipping `i`.
    pub fn coface(n: usize, i: usize) -> Self {
        assert!(i <= n + 1);
        MonotoneMap {
            target_arity: n + 1,
            values: (0..=n).map(|j| if j < i { j } else { j + 1 }).collect(),
        }
    }

    /// The codegeneracy `s^i: [n] -> [n-1]` repeating `i`.
    pub fn codegeneracy(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i < n);
        MonotoneMap {
            target_arity: n - 1,
            values: (0..=n).map(|j| if j <= i { j } else { j - 1 }).collect(),
        }
    }

    /// Injection picking out the listed vertices, which must be strictly increasing.
    pub fn vertex_injection(target_arity: usize, vertices: &[usize]) -> Result<Self> {
        for pair in vertices.windows(2) {
            if pair[0] >= pair[1] {
                return Err(SegalError::InvalidInput(format!(
                    "vertex list {vertices:?} is not strictly increasing"
                )));
            }
        }
        MonotoneMap::new(target_arity, vertices.to_vec())
    }

    pub fn source_arity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_identity(&self) -> bool {
        self.source_arity() == self.target_arity
            && self.values.iter().enumerate().all(|(j, &v)| j == v)
    }

    /// Composition `next . self` (apply `self` first).
    pub fn then(&self, next: &MonotoneMap) -> Result<MonotoneMap> {
        if self.target_arity != next.source_arity() {
            return Err(SegalError::ArityMismatch {
                expected: next.source_arity(),
                found: self.target_arity,
            });
        }
        Ok(MonotoneMap {
            target_arity: next.target_arity,
            values: self.values.iter().map(|&v| next.values[v]).collect(),
        })
    }

    /// Every monotone map `[m] -> [n]`, in lexicographic order of values.
    pub fn enumerate(source_arity: usize, target_arity: usize) -> Vec<MonotoneMap> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(source_arity + 1);
        fn rec(out: &mut Vec<MonotoneMap>, current: &mut Vec<usize>, len: usize, n: usize) {
            if current.len() == len {
                out.push(MonotoneMap {
                    target_arity: n,
                    values: current.clone(),
                });
                return;
            }
            let lo = current.last().copied().unwrap_or(0);
            for v in lo..=n {
                current.push(v);
                rec(out, current, len, n);
                current.pop();
            }
        }
        rec(&mut out, &mut current, source_arity + 1, target_arity);
        out
    }
}

/// One violated simplicial identity, with the witnessing simplex.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IdentityViolation {
    pub identity: String,
    pub level: usize,
    pub simplex: usize,
    pub lhs: usize,
    pub rhs: usize,
}

/// Outcome of checking the simplicial identities within truncation.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ValidationReport {
    pub violations: Vec<IdentityViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A level-indexed function between two truncated simplicial sets,
/// given by index tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelwiseMap {
    pub levels: Vec<Vec<usize>>,
}

/// Why a claimed or searched-for isomorphism fails.
#[derive(Clone, Debug, serde::Serialize)]
pub enum IsoFailure {
    LevelSizeMismatch {
        level: usize,
        left: usize,
        right: usize,
    },
    NotBijective {
        level: usize,
    },
    NotSimplicial {
        operator: String,
        level: usize,
        simplex: usize,
    },
    NoIsomorphismFound,
}

impl LevelwiseMap {
    pub fn identity(sizes: &[usize]) -> Self {
        LevelwiseMap {
            levels: sizes.iter().map(|&s| (0..s).collect()).collect(),
        }
    }

    /// Checks commutation with every face and degeneracy table. The target
    /// must store at least as many levels as the source.
    pub fn check_simplicial(
        &self,
        source: &TruncatedSimplicialSet,
        target: &TruncatedSimplicialSet,
    ) -> std::result::Result<(), IsoFailure> {
        let n_levels = source.truncation() + 1;
        for n in 0..n_levels {
            let have = self.levels.get(n).map_or(0, Vec::len);
            if have != source.level_size(n) {
                return Err(IsoFailure::LevelSizeMismatch {
                    level: n,
                    left: have,
                    right: source.level_size(n),
                });
            }
        }
        for n in 1..n_levels {
            for i in 0..=n {
                for k in 0..source.level_size(n) {
                    let src = SimplexId::new(n, k);
                    let lhs = self.levels[n - 1][source.face(i, src).index];
                    let rhs = target
                        .face(i, SimplexId::new(n, self.levels[n][k]))
                        .index;
                    if lhs != rhs {
                        return Err(IsoFailure::NotSimplicial {
                            operator: format!("d_{i}"),
                            level: n,
                            simplex: k,
                        });
                    }
                }
            }
        }
        for n in 0..source.truncation() {
            for i in 0..=n {
                for k in 0..source.level_size(n) {
                    let src = SimplexId::new(n, k);
                    let lhs = self.levels[n + 1][source.degeneracy(i, src).index];
                    let rhs = target
                        .degeneracy(i, SimplexId::new(n, self.levels[n][k]))
                        .index;
                    if lhs != rhs {
                        return Err(IsoFailure::NotSimplicial {
                            operator: format!("s_{i}"),
                            level: n,
                            simplex: k,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_levelwise_bijection(&self, target: &TruncatedSimplicialSet) -> bool {
        self.levels.iter().enumerate().all(|(n, row)| {
            row.len() == target.level_size(n) && {
                let mut seen = vec![false; row.len()];
                row.iter().all(|&v| {
                    v < seen.len() && !std::mem::replace(&mut seen[v], true)
                })
            }
        })
    }
}

/// A levelwise-finite simplicial set stored up to a truncation bound.
#[derive(Clone, Debug)]
pub struct TruncatedSimplicialSet {
    truncation: usize,
    label: String,
    levels: Vec<Vec<Descriptor>>,
    index: Vec<HashMap<Descriptor, usize>>,
    /// `faces[n][i][k]`: index of `d_i` of simplex `k` at level `n` (empty row vec at n = 0).
    faces: Vec<Vec<Vec<usize>>>,
    /// `degeneracies[n][i][k]`: index of `s_i` of simplex `k` at level `n` (empty at n = N).
    degeneracies: Vec<Vec<Vec<usize>>>,
}

impl TruncatedSimplicialSet {
    /// Assembles a simplicial set from explicit tables, checking only
    /// structural well-formedness (shapes, ranges, descriptor distinctness).
    /// Simplicial identities are the business of [`Self::validate`].
    pub fn from_tables(
        truncation: usize,
        label: impl Into<String>,
        levels: Vec<Vec<Descriptor>>,
        faces: Vec<Vec<Vec<usize>>>,
        degeneracies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if levels.len() != truncation + 1 {
            return Err(SegalError::InvalidInput(format!(
                "expected {} levels, found {}",
                truncation + 1,
                levels.len()
            )));
        }
        let mut index = Vec::with_capacity(levels.len());
        for (n, level) in levels.iter().enumerate() {
            let mut map = HashMap::with_capacity(level.len());
            for (k, d) in level.iter().enumerate() {
                if map.insert(d.clone(), k).is_some() {
                    return Err(SegalError::InvalidInput(format!(
                        "duplicate descriptor {d} at level {n}"
                    )));
                }
            }
            index.push(map);
        }
        if faces.len() != truncation + 1 || degeneracies.len() != truncation + 1 {
            return Err(SegalError::InvalidInput(
                "face/degeneracy tables must cover every level".into(),
            ));
        }
        for n in 0..=truncation {
            let expected_rows = if n == 0 { 0 } else { n + 1 };
            if faces[n].len() != expected_rows {
                return Err(SegalError::InvalidInput(format!(
                    "level {n} needs {expected_rows} face rows, found {}",
                    faces[n].len()
                )));
            }
            for (i, row) in faces[n].iter().enumerate() {
                if row.len() != levels[n].len() {
                    return Err(SegalError::InvalidInput(format!(
                        "face row d_{i} at level {n} has wrong length"
                    )));
                }
                if let Some(&bad) = row.iter().find(|&&v| v >= levels[n - 1].len()) {
                    return Err(SegalError::InvalidInput(format!(
                        "face entry {bad} out of range at level {n}"
                    )));
                }
            }
            let expected_rows = if n == truncation { 0 } else { n + 1 };
            if degeneracies[n].len() != expected_rows {
                return Err(SegalError::InvalidInput(format!(
                    "level {n} needs {expected_rows} degeneracy rows, found {}",
                    degeneracies[n].len()
                )));
            }
            for (i, row) in degeneracies[n].iter().enumerate() {
                if row.len() != levels[n].len() {
                    return Err(SegalError::InvalidInput(format!(
                        "degeneracy row s_{i} at level {n} has wrong length"
                    )));
                }
                if let Some(&bad) = row.iter().find(|&&v| v >= levels[n + 1].len()) {
                    return Err(SegalError::InvalidInput(format!(
                        "degeneracy entry {bad} out of range at level {n}"
                    )));
                }
            }
        }
        Ok(TruncatedSimplicialSet {
            truncation,
            label: label.into(),
            levels,
            index,
            faces,
            degeneracies,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn descriptor(&self, id: SimplexId) -> &Descriptor {
        &self.levels[id.level][id.index]
    }

    pub fn descriptors(&self, level: usize) -> &[Descriptor] {
        &self.levels[level]
    }

    pub fn id_by_descriptor(&self, level: usize, descriptor: &Descriptor) -> Option<SimplexId> {
        self.index[level]
            .get(descriptor)
            .map(|&k| SimplexId::new(level, k))
    }

    pub fn simplices(&self, level: usize) -> impl Iterator<Item = SimplexId> + '_ {
        (0..self.level_size(level)).map(move |k| SimplexId::new(level, k))
    }

    pub fn face(&self, i: usize, id: SimplexId) -> SimplexId {
        SimplexId::new(id.level - 1, self.faces[id.level][i][id.index])
    }

    pub fn degeneracy(&self, i: usize, id: SimplexId) -> SimplexId {
        SimplexId::new(id.level + 1, self.degeneracies[id.level][i][id.index])
    }

    pub fn is_reduced(&self) -> bool {
        self.level_size(0) == 1
    }

    /// The unique 0-simplex of a reduced simplicial set.
    pub fn basepoint(&self) -> Result<SimplexId> {
        if !self.is_reduced() {
            return Err(SegalError::NotReduced {
                found: self.level_size(0),
            });
        }
        Ok(SimplexId::new(0, 0))
    }

    /// Evaluates `K(op)` on a simplex by the epi-mono factorization of `op`:
    /// faces for the values missing from the image, largest first, then
    /// degeneracies for the duplicated positions, smallest first.
    pub fn apply_operator(&self, op: &MonotoneMap, id: SimplexId) -> Result<SimplexId> {
        if op.target_arity() != id.level {
            return Err(SegalError::ArityMismatch {
                expected: op.target_arity(),
                found: id.level,
            });
        }
        if op.source_arity() > self.truncation {
            return Err(SegalError::LevelOutOfRange {
                level: op.source_arity(),
                truncation: self.truncation,
            });
        }
        let mut current = id;
        for j in (0..=op.target_arity()).rev() {
            if op.values().binary_search(&j).is_err() {
                current = self.face(j, current);
            }
        }
        for p in 0..op.source_arity() {
            if op.values()[p] == op.values()[p + 1] {
                current = self.degeneracy(p, current);
            }
        }
        Ok(current)
    }

    /// Checks every simplicial identity whose two sides are both defined
    /// within the truncation, reporting all failures.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n_max = self.truncation;
        let mut push = |identity: String, level: usize, simplex: usize, lhs: usize, rhs: usize| {
            report.violations.push(IdentityViolation {
                identity,
                level,
                simplex,
                lhs,
                rhs,
            });
        };

        // d_i d_j = d_{j-1} d_i for i < j
        for n in 2..=n_max {
            for j in 1..=n {
                for i in 0..j {
                    for k in 0..self.level_size(n) {
                        let id = SimplexId::new(n, k);
                        let lhs = self.face(i, self.face(j, id));
                        let rhs = self.face(j - 1, self.face(i, id));
                        if lhs != rhs {
                            push(format!("d_{i} d_{j} = d_{} d_{i}", j - 1), n, k, lhs.index, rhs.index);
                        }
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i <= j
        for n in 0..n_max.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    for k in 0..self.level_size(n) {
                        let id = SimplexId::new(n, k);
                        let lhs = self.degeneracy(i, self.degeneracy(j, id));
                        let rhs = self.degeneracy(j + 1, self.degeneracy(i, id));
                        if lhs != rhs {
                            push(format!("s_{i} s_{j} = s_{} s_{i}", j + 1), n, k, lhs.index, rhs.index);
                        }
                    }
                }
            }
        }
        // d_i s_j = s_{j-1} d_i for i < j
        for n in 1..n_max {
            for j in 1..=n {
                for i in 0..j {
                    for k in 0..self.level_size(n) {
                        let id = SimplexId::new(n, k);
                        let lhs = self.face(i, self.degeneracy(j, id));
                        let rhs = self.degeneracy(j - 1, self.face(i, id));
                        if lhs != rhs {
                            push(format!("d_{i} s_{j} = s_{} d_{i}", j - 1), n, k, lhs.index, rhs.index);
                        }
                    }
                }
            }
        }
        // d_j s_j = id = d_{j+1} s_j
        for n in 0..n_max {
            for j in 0..=n {
                for k in 0..self.level_size(n) {
                    let id = SimplexId::new(n, k);
                    let lhs = self.face(j, self.degeneracy(j, id));
                    if lhs != id {
                        push(format!("d_{j} s_{j} = id"), n, k, lhs.index, k);
                    }
                    let lhs = self.face(j + 1, self.degeneracy(j, id));
                    if lhs != id {
                        push(format!("d_{} s_{j} = id", j + 1), n, k, lhs.index, k);
                    }
                }
            }
        }
        // d_i s_j = s_j d_{i-1} for i > j + 1
        for n in 1..n_max {
            for j in 0..=n.saturating_sub(1) {
                for i in (j + 2)..=(n + 1) {
                    for k in 0..self.level_size(n) {
                        let id = SimplexId::new(n, k);
                        let lhs = self.face(i, self.degeneracy(j, id));
                        let rhs = self.degeneracy(j, self.face(i - 1, id));
                        if lhs != rhs {
                            push(format!("d_{i} s_{j} = s_{j} d_{}", i - 1), n, k, lhs.index, rhs.index);
                        }
                    }
                }
            }
        }
        report
    }

    /// The standard simplex: level `k` holds every monotone map `[k] -> [n]`,
    /// with faces and degeneracies by precomposition.
    pub fn standard_simplex(n: usize, truncation: usize) -> Self {
        let levels: Vec<Vec<Vec<usize>>> = (0..=truncation)
            .map(|k| {
                MonotoneMap::enumerate(k, n)
                    .into_iter()
                    .map(|m| m.values().to_vec())
                    .collect()
            })
            .collect();
        assemble(
            truncation,
            format!("standard-simplex-{n}"),
            levels,
            |_, values| Descriptor::new(&json!(values)),
            |_, i, values| {
                let mut v = values.clone();
                v.remove(i);
                v
            },
            |_, i, values| {
                let mut v = values.clone();
                v.insert(i, values[i]);
                v
            },
        )
        .expect("standard simplex assembles")
    }

    /// The spine: the union of the edges `(i, i+1)` inside the standard
    /// `n`-simplex, so level `k` keeps only the monotone maps whose image
    /// lies in some consecutive pair.
    pub fn spine(n: usize, truncation: usize) -> Result<Self> {
        if n < 1 {
            return Err(SegalError::InvalidInput(
                "a spine needs at least one edge".into(),
            ));
        }
        let in_spine = |values: &Vec<usize>| {
            let lo = *values.first().unwrap();
            let hi = *values.last().unwrap();
            hi - lo <= 1
        };
        let levels: Vec<Vec<Vec<usize>>> = (0..=truncation)
            .map(|k| {
                MonotoneMap::enumerate(k, n)
                    .into_iter()
                    .map(|m| m.values().to_vec())
                    .filter(in_spine)
                    .collect()
            })
            .collect();
        assemble(
            truncation,
            format!("spine-{n}"),
            levels,
            |_, values| Descriptor::new(&json!(values)),
            |_, i, values| {
                let mut v = values.clone();
                v.remove(i);
                v
            },
            |_, i, values| {
                let mut v = values.clone();
                v.insert(i, values[i]);
                v
            },
        )
    }

    /// Verifies a claimed levelwise isomorphism, or searches for one by
    /// backtracking when no witness is given (small inventories only).
    pub fn levelwise_isomorphic(
        &self,
        other: &Self,
        witness: Option<&LevelwiseMap>,
    ) -> Result<std::result::Result<LevelwiseMap, IsoFailure>> {
        if self.truncation != other.truncation {
            return Err(SegalError::TruncationMismatch {
                left: self.truncation,
                right: other.truncation,
            });
        }
        for n in 0..=self.truncation {
            if self.level_size(n) != other.level_size(n) {
                return Ok(Err(IsoFailure::LevelSizeMismatch {
                    level: n,
                    left: self.level_size(n),
                    right: other.level_size(n),
                }));
            }
        }
        if let Some(map) = witness {
            if !map.is_levelwise_bijection(other) {
                let level = (0..=self.truncation)
                    .find(|&n| {
                        map.levels.get(n).is_none_or(|row| {
                            let mut seen = vec![false; other.level_size(n)];
                            !(row.len() == other.level_size(n)
                                && row.iter().all(|&v| {
                                    v < seen.len() && !std::mem::replace(&mut seen[v], true)
                                }))
                        })
                    })
                    .unwrap_or(0);
                return Ok(Err(IsoFailure::NotBijective { level }));
            }
            return Ok(match map.check_simplicial(self, other) {
                Ok(()) => Ok(map.clone()),
                Err(failure) => Err(failure),
            });
        }
        match search_isomorphism(self, other) {
            Some(map) => Ok(Ok(map)),
            None => Ok(Err(IsoFailure::NoIsomorphismFound)),
        }
    }

    pub fn to_json(&self) -> Value {
        let levels: Vec<Vec<Value>> = self
            .levels
            .iter()
            .map(|level| level.iter().map(Descriptor::to_value).collect())
            .collect();
        let mut faces = Vec::new();
        for n in 1..=self.truncation {
            for i in 0..=n {
                for (src, &dst) in self.faces[n][i].iter().enumerate() {
                    faces.push(json!([n, i, src, dst]));
                }
            }
        }
        let mut degeneracies = Vec::new();
        for n in 0..self.truncation {
            for i in 0..=n {
                for (src, &dst) in self.degeneracies[n][i].iter().enumerate() {
                    degeneracies.push(json!([n, i, src, dst]));
                }
            }
        }
        json!({
            "truncation": self.truncation,
            "levels": levels,
            "faces": faces,
            "degeneracies": degeneracies,
            "label": self.label,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| SegalError::InvalidInput("expected a JSON object".into()))?;
        let truncation = obj
            .get("truncation")
            .and_then(Value::as_u64)
            .ok_or_else(|| SegalError::InvalidInput("missing numeric \"truncation\"".into()))?
            as usize;
        let label = obj
            .get("label")
            .and_then(Value::as_str)
            .unwrap_or("")
            .to_string();
        let levels_json = obj
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("missing \"levels\" array".into()))?;
        let levels: Vec<Vec<Descriptor>> = levels_json
            .iter()
            .map(|level| -> Result<Vec<Descriptor>> {
                level
                    .as_array()
                    .ok_or_else(|| SegalError::InvalidInput("level must be an array".into()))?
                    .iter()
                    .map(|d| Ok(Descriptor::new(d)))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if levels.len() != truncation + 1 {
            return Err(SegalError::InvalidInput(format!(
                "expected {} levels, found {}",
                truncation + 1,
                levels.len()
            )));
        }
        let sizes: Vec<usize> = levels.iter().map(Vec::len).collect();

        let read_table = |key: &str, rows_at: &dyn Fn(usize) -> usize| -> Result<Vec<Vec<Vec<usize>>>> {
            let entries = obj
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| SegalError::InvalidInput(format!("missing \"{key}\" array")))?;
            let mut table: Vec<Vec<Vec<Option<usize>>>> = (0..=truncation)
                .map(|n| vec![vec![None; sizes[n]]; rows_at(n)])
                .collect();
            for entry in entries {
                let quad = entry
                    .as_array()
                    .filter(|a| a.len() == 4)
                    .and_then(|a| {
                        a.iter()
                            .map(Value::as_u64)
                            .collect::<Option<Vec<u64>>>()
                    })
                    .ok_or_else(|| {
                        SegalError::InvalidInput(format!("{key} entries must be [n,i,src,dst]"))
                    })?;
                let (n, i, src, dst) =
                    (quad[0] as usize, quad[1] as usize, quad[2] as usize, quad[3] as usize);
                if n > truncation || i >= rows_at(n) || src >= sizes[n] {
                    return Err(SegalError::InvalidInput(format!(
                        "{key} entry [{n},{i},{src},{dst}] out of range"
                    )));
                }
                if table[n][i][src].replace(dst).is_some() {
                    return Err(SegalError::InvalidInput(format!(
                        "duplicate {key} entry for [{n},{i},{src}]"
                    )));
                }
            }
            table
                .into_iter()
                .enumerate()
                .map(|(n, rows)| {
                    rows.into_iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.into_iter()
                                .enumerate()
                                .map(|(src, entry)| {
                                    entry.ok_or_else(|| {
                                        SegalError::InvalidInput(format!(
                                            "missing {key} entry for [{n},{i},{src}]"
                                        ))
                                    })
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };

        let faces = read_table("faces", &|n| if n == 0 { 0 } else { n + 1 })?;
        let degeneracies = read_table("degeneracies", &|n| if n == truncation { 0 } else { n + 1 })?;
        TruncatedSimplicialSet::from_tables(truncation, label, levels, faces, degeneracies)
    }
}

/// Builds a simplicial set from per-level combinatorial objects and
/// face/degeneracy transforms on them. Levels are sorted by descriptor, and
/// every transform image must land back in the enumerated inventory.
pub(crate) fn assemble<T>(
    truncation: usize,
    label: impl Into<String>,
    levels: Vec<Vec<T>>,
    encode: impl Fn(usize, &T) -> Descriptor,
    face: impl Fn(usize, usize, &T) -> T,
    degeneracy: impl Fn(usize, usize, &T) -> T,
) -> Result<TruncatedSimplicialSet> {
    let mut sorted: Vec<Vec<(Descriptor, T)>> = Vec::with_capacity(levels.len());
    for (n, level) in levels.into_iter().enumerate() {
        let mut pairs: Vec<(Descriptor, T)> =
            level.into_iter().map(|t| (encode(n, &t), t)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        sorted.push(pairs);
    }
    let index: Vec<HashMap<&Descriptor, usize>> = sorted
        .iter()
        .map(|level| level.iter().enumerate().map(|(k, (d, _))| (d, k)).collect())
        .collect();
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(sorted.len());
    let mut degeneracies: Vec<Vec<Vec<usize>>> = Vec::with_capacity(sorted.len());
    for n in 0..sorted.len() {
        let mut face_rows = Vec::new();
        if n > 0 {
            for i in 0..=n {
                let row: Vec<usize> = sorted[n]
                    .iter()
                    .map(|(_, t)| {
                        let img = encode(n - 1, &face(n, i, t));
                        index[n - 1].get(&img).copied().ok_or_else(|| {
                            SegalError::InvalidInput(format!(
                                "face d_{i} image {img} missing from level {}",
                                n - 1
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                face_rows.push(row);
            }
        }
        faces.push(face_rows);
        let mut degen_rows = Vec::new();
        if n + 1 < sorted.len() {
            for i in 0..=n {
                let row: Vec<usize> = sorted[n]
                    .iter()
                    .map(|(_, t)| {
                        let img = encode(n + 1, &degeneracy(n, i, t));
                        index[n + 1].get(&img).copied().ok_or_else(|| {
                            SegalError::InvalidInput(format!(
                                "degeneracy s_{i} image {img} missing from level {}",
                                n + 1
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                degen_rows.push(row);
            }
        }
        degeneracies.push(degen_rows);
    }
    drop(index);
    let levels: Vec<Vec<Descriptor>> = sorted
        .into_iter()
        .map(|level| level.into_iter().map(|(d, _)| d).collect())
        .collect();
    TruncatedSimplicialSet::from_tables(truncation, label, levels, faces, degeneracies)
}

/// Backtracking search for a levelwise isomorphism. Images at level `n` are
/// constrained by faces into level `n - 1` and forced along degeneracies
/// from level `n - 1`, which prunes hard at the sizes this crate handles.
fn search_isomorphism(
    a: &TruncatedSimplicialSet,
    b: &TruncatedSimplicialSet,
) -> Option<LevelwiseMap> {
    const UNSET: usize = usize::MAX;
    let n_levels = a.truncation() + 1;
    let mut assignment: Vec<Vec<usize>> = (0..n_levels)
        .map(|n| vec![UNSET; a.level_size(n)])
        .collect();
    let mut used: Vec<Vec<bool>> = (0..n_levels).map(|n| vec![false; b.level_size(n)]).collect();

    fn assign_level(
        a: &TruncatedSimplicialSet,
        b: &TruncatedSimplicialSet,
        assignment: &mut Vec<Vec<usize>>,
        used: &mut Vec<Vec<bool>>,
        n: usize,
        k: usize,
    ) -> bool {
        const UNSET: usize = usize::MAX;
        if k == a.level_size(n) {
            // degeneracy commutation into the next level forces images there
            if n < a.truncation() {
                let mut forced: Vec<(usize, usize)> = Vec::new();
                for src in 0..a.level_size(n) {
                    for i in 0..=n {
                        let from = a.degeneracy(i, SimplexId::new(n, src)).index;
                        let to = b
                            .degeneracy(i, SimplexId::new(n, assignment[n][src]))
                            .index;
                        let slot = assignment[n + 1][from];
                        if slot == UNSET {
                            if used[n + 1][to] {
                                for &(f, _) in &forced {
                                    used[n + 1][assignment[n + 1][f]] = false;
                                    assignment[n + 1][f] = UNSET;
                                }
                                return false;
                            }
                            assignment[n + 1][from] = to;
                            used[n + 1][to] = true;
                            forced.push((from, to));
                        } else if slot != to {
                            for &(f, _) in &forced {
                                used[n + 1][assignment[n + 1][f]] = false;
                                assignment[n + 1][f] = UNSET;
                            }
                            return false;
                        }
                    }
                }
                if assign_level(a, b, assignment, used, n + 1, 0) {
                    return true;
                }
                for &(f, _) in &forced {
                    used[n + 1][assignment[n + 1][f]] = false;
                    assignment[n + 1][f] = UNSET;
                }
                return false;
            }
            return true;
        }
        if assignment[n][k] != UNSET {
            return assign_level(a, b, assignment, used, n, k + 1);
        }
        let id = SimplexId::new(n, k);
        'candidates: for cand in 0..b.level_size(n) {
            if used[n][cand] {
                continue;
            }
            if n > 0 {
                for i in 0..=n {
                    let want = assignment[n - 1][a.face(i, id).index];
                    if b.face(i, SimplexId::new(n, cand)).index != want {
                        continue 'candidates;
                    }
                }
            }
            assignment[n][k] = cand;
            used[n][cand] = true;
            if assign_level(a, b, assignment, used, n, k + 1) {
                return true;
            }
            assignment[n][k] = UNSET;
            used[n][cand] = false;
        }
        false
    }

    if assign_level(a, b, &mut assignment, &mut used, 0, 0) {
        Some(LevelwiseMap { levels: assignment })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_simplicial_set, Multigraph};

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut r = 1usize;
        for i in 1..=k {
            r = r * (n - (k - i)) / i;
        }
        r
    }

    fn edge_graph_set(truncation: usize) -> TruncatedSimplicialSet {
        let g = Multigraph::new(
            vec!["a".into(), "b".into()],
            vec![("e".into(), "a".into(), "b".into())],
        )
        .unwrap();
        graph_simplicial_set(&g, truncation).unwrap()
    }

    #[test]
    fn standard_simplex_level_sizes() {
        let point = TruncatedSimplicialSet::standard_simplex(0, 2);
        assert_eq!(point.level_sizes(), vec![1, 1, 1]);

        let interval = TruncatedSimplicialSet::standard_simplex(1, 1);
        assert_eq!(interval.level_size(1), 3);

        let triangle = TruncatedSimplicialSet::standard_simplex(2, 2);
        assert_eq!(triangle.level_size(2), 10);

        for n in 0..=3 {
            let s = TruncatedSimplicialSet::standard_simplex(n, 3);
            for k in 0..=3 {
                assert_eq!(s.level_size(k), binomial(n + k + 1, k + 1), "n={n} k={k}");
            }
            assert!(s.validate().passed());
        }
    }

    #[test]
    fn spine_level_sizes() {
        let s21 = TruncatedSimplicialSet::spine(2, 1).unwrap();
        assert_eq!(s21.level_sizes(), vec![3, 5]);
        let s31 = TruncatedSimplicialSet::spine(3, 1).unwrap();
        assert_eq!(s31.level_size(1), 7);
        assert!(TruncatedSimplicialSet::spine(0, 1).is_err());

        // one edge: the spine is the whole 1-simplex
        let spine1 = TruncatedSimplicialSet::spine(1, 3).unwrap();
        let delta1 = TruncatedSimplicialSet::standard_simplex(1, 3);
        let outcome = spine1.levelwise_isomorphic(&delta1, None).unwrap();
        assert!(outcome.is_ok());
    }

    #[test]
    fn apply_operator_identity_and_cofaces() {
        let x = edge_graph_set(3);
        for level in 0..=3 {
            let op = MonotoneMap::identity(level);
            for id in x.simplices(level) {
                assert_eq!(x.apply_operator(&op, id).unwrap(), id);
            }
        }
        // values (0,1,3) on a 3-simplex is the face d_2
        let op = MonotoneMap::new(3, vec![0, 1, 3]).unwrap();
        for id in x.simplices(3) {
            assert_eq!(x.apply_operator(&op, id).unwrap(), x.face(2, id));
        }
        // arity mismatch is an error
        assert!(x
            .apply_operator(&MonotoneMap::identity(2), SimplexId::new(3, 0))
            .is_err());
    }

    #[test]
    fn apply_operator_merges_edge_blocks() {
        // on (G; {a},{b}) the injection (0,2) picks out the merged edge d_1
        let x = edge_graph_set(3);
        let sigma = x
            .id_by_descriptor(
                2,
                &Descriptor::new(&serde_json::json!({
                    "vertices": ["a", "b"], "edges": ["e"], "blocks": [1, 2],
                })),
            )
            .unwrap();
        let op = MonotoneMap::vertex_injection(2, &[0, 2]).unwrap();
        let got = x.apply_operator(&op, sigma).unwrap();
        assert_eq!(got, x.face(1, sigma));
        assert_eq!(
            x.descriptor(got),
            &Descriptor::new(&serde_json::json!({
                "vertices": ["a", "b"], "edges": ["e"], "blocks": [1, 1],
            }))
        );
    }

    #[test]
    fn operator_functoriality_small() {
        let x = edge_graph_set(3);
        for n in 0..=3usize {
            for p in 0..=3usize {
                for beta in MonotoneMap::enumerate(n, p) {
                    for m in 0..=3usize {
                        for alpha in MonotoneMap::enumerate(m, n) {
                            let composite = alpha.then(&beta).unwrap();
                            for id in x.simplices(p) {
                                let direct = x.apply_operator(&composite, id).unwrap();
                                let staged = x
                                    .apply_operator(&alpha, x.apply_operator(&beta, id).unwrap())
                                    .unwrap();
                                assert_eq!(direct, staged);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn validate_catches_a_swapped_face_entry() {
        let x = edge_graph_set(3);
        assert!(x.validate().passed());
        let mut json = x.to_json();
        // swap the targets of two d_0 entries at level 2
        let faces = json["faces"].as_array_mut().unwrap();
        let mut picked: Vec<usize> = Vec::new();
        for (idx, entry) in faces.iter().enumerate() {
            let e = entry.as_array().unwrap();
            if e[0] == 2 && e[1] == 0 {
                picked.push(idx);
            }
        }
        let (i, j) = (picked[0], picked[1]);
        let a = faces[i][3].clone();
        let b = faces[j][3].clone();
        if a == b {
            // find a pair with distinct targets
            let k = picked
                .iter()
                .copied()
                .find(|&k| faces[k][3] != a)
                .expect("distinct d_0 targets exist");
            faces[i][3] = faces[k][3].clone();
            faces[k][3] = a;
        } else {
            faces[i][3] = b;
            faces[j][3] = a;
        }
        let mutated = TruncatedSimplicialSet::from_json(&json).unwrap();
        let report = mutated.validate();
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.level == 2));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let x = edge_graph_set(3);
        let json = x.to_json();
        let back = TruncatedSimplicialSet::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.level_sizes(), x.level_sizes());
    }

    #[test]
    fn import_rejects_incomplete_or_out_of_range_tables() {
        let x = edge_graph_set(2);
        let mut json = x.to_json();
        let dropped = json["faces"].as_array().unwrap()[0].clone();
        json["faces"].as_array_mut().unwrap().remove(0);
        assert!(TruncatedSimplicialSet::from_json(&json).is_err());
        // out-of-range destination
        let mut json = x.to_json();
        json["faces"].as_array_mut().unwrap().push(dropped);
        assert!(TruncatedSimplicialSet::from_json(&json).is_err()); // duplicate entry
        let mut json = x.to_json();
        json["faces"][0][3] = serde_json::json!(999);
        assert!(TruncatedSimplicialSet::from_json(&json).is_err());
    }

    #[test]
    fn iso_detects_size_mismatch() {
        let a = TruncatedSimplicialSet::standard_simplex(1, 2);
        let b = TruncatedSimplicialSet::spine(2, 2).unwrap();
        match a.levelwise_isomorphic(&b, None).unwrap() {
            Err(IsoFailure::LevelSizeMismatch { level: 0, left: 2, right: 3 }) => {}
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn iso_accepts_identity_witness() {
        let x = edge_graph_set(2);
        let witness = LevelwiseMap::identity(&x.level_sizes());
        assert!(x.levelwise_isomorphic(&x, Some(&witness)).unwrap().is_ok());
        // searching also finds one
        assert!(x.levelwise_isomorphic(&x, None).unwrap().is_ok());
    }

    #[test]
    fn truncation_mismatch_is_an_error() {
        let a = TruncatedSimplicialSet::standard_simplex(1, 2);
        let b = TruncatedSimplicialSet::standard_simplex(1, 3);
        assert!(a.levelwise_isomorphic(&b, None).is_err());
    }
}
