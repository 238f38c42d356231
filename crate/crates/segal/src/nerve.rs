//! Nerves of finite categories and partial monoids, and the reconstruction
//! of a category from a 1-Segal set.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::simplicial::{assemble, Descriptor, SimplexId, TruncatedSimplicialSet};

/// A finite category given by explicit tables.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    objects: Vec<String>,
    /// Morphism ids with source and target object indices.
    morphisms: Vec<(String, usize, usize)>,
    /// Identity morphism index per object.
    identity: Vec<usize>,
    /// `(f, g) -> g . f`, defined exactly when `tgt f = src g`.
    compose: HashMap<(usize, usize), usize>,
}

impl FiniteCategory {
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identity: BTreeMap<String, String>,
        compose: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let mut object_list = objects;
        object_list.sort();
        object_list.dedup();
        let mut morphism_list = Vec::with_capacity(morphisms.len());
        let mut morphism_index = HashMap::new();
        for (id, src, tgt) in morphisms {
            let s = object_list
                .binary_search(&src)
                .map_err(|_| SegalError::InvalidInput(format!("source {src} of {id} is not an object")))?;
            let t = object_list
                .binary_search(&tgt)
                .map_err(|_| SegalError::InvalidInput(format!("target {tgt} of {id} is not an object")))?;
            if morphism_index.insert(id.clone(), morphism_list.len()).is_some() {
                return Err(SegalError::InvalidInput(format!("duplicate morphism id {id}")));
            }
            morphism_list.push((id, s, t));
        }
        let mut identity_idx = vec![usize::MAX; object_list.len()];
        for (obj, id) in &identity {
            let o = object_list
                .binary_search(obj)
                .map_err(|_| SegalError::InvalidInput(format!("identity key {obj} is not an object")))?;
            let m = *morphism_index
                .get(id)
                .ok_or_else(|| SegalError::InvalidInput(format!("identity {id} is not a morphism")))?;
            identity_idx[o] = m;
        }
        if let Some(o) = identity_idx.iter().position(|&m| m == usize::MAX) {
            return Err(SegalError::InvalidInput(format!(
                "object {} has no identity",
                object_list[o]
            )));
        }
        let mut compose_idx = HashMap::new();
        for (f, g, h) in &compose {
            let lookup = |id: &String| {
                morphism_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| SegalError::InvalidInput(format!("{id} is not a morphism")))
            };
            if compose_idx
                .insert((lookup(f)?, lookup(g)?), lookup(h)?)
                .is_some()
            {
                return Err(SegalError::InvalidInput(format!(
                    "duplicate composition entry for ({f}, {g})"
                )));
            }
        }
        Ok(FiniteCategory {
            objects: object_list,
            morphisms: morphism_list,
            identity: identity_idx,
            compose: compose_idx,
        })
    }

    /// The poset `0 <= 1 <= ... <= n` as a category; its nerve is the
    /// standard `n`-simplex.
    pub fn linear_order(n: usize) -> Self {
        let objects: Vec<String> = (0..=n).map(|i| format!("{i}")).collect();
        let mut morphisms = Vec::new();
        let mut index = HashMap::new();
        for i in 0..=n {
            for j in i..=n {
                index.insert((i, j), morphisms.len());
                morphisms.push((format!("{i}->{j}"), i, j));
            }
        }
        let identity = (0..=n).map(|i| index[&(i, i)]).collect();
        let mut compose = HashMap::new();
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    compose.insert((index[&(i, j)], index[&(j, k)]), index[&(i, k)]);
                }
            }
        }
        FiniteCategory {
            objects,
            morphisms,
            identity,
            compose,
        }
    }

    /// The cyclic group of order `n` as a one-object category.
    pub fn cyclic_group(n: usize) -> Self {
        assert!(n >= 1);
        let morphisms: Vec<(String, usize, usize)> =
            (0..n).map(|i| (format!("g{i}"), 0, 0)).collect();
        let mut compose = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                compose.insert((i, j), (i + j) % n);
            }
        }
        FiniteCategory {
            objects: vec!["*".into()],
            morphisms,
            identity: vec![0],
            compose,
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn composite(&self, f: usize, g: usize) -> Option<usize> {
        self.compose.get(&(f, g)).copied()
    }

    pub fn identity_of(&self, object: usize) -> usize {
        self.identity[object]
    }

    /// Checks the category axioms exhaustively.
    pub fn validate(&self) -> Result<()> {
        for (o, &i) in self.identity.iter().enumerate() {
            let (_, s, t) = self.morphisms[i];
            if s != o || t != o {
                return Err(SegalError::InvalidInput(format!(
                    "identity of {} has wrong endpoints",
                    self.objects[o]
                )));
            }
        }
        for f in 0..self.morphisms.len() {
            for g in 0..self.morphisms.len() {
                let composable = self.morphisms[f].2 == self.morphisms[g].1;
                match self.compose.get(&(f, g)) {
                    Some(&h) => {
                        if !composable {
                            return Err(SegalError::InvalidInput(format!(
                                "composition defined for non-composable ({}, {})",
                                self.morphisms[f].0, self.morphisms[g].0
                            )));
                        }
                        if self.morphisms[h].1 != self.morphisms[f].1
                            || self.morphisms[h].2 != self.morphisms[g].2
                        {
                            return Err(SegalError::InvalidInput(format!(
                                "composite of ({}, {}) has wrong endpoints",
                                self.morphisms[f].0, self.morphisms[g].0
                            )));
                        }
                    }
                    None => {
                        if composable {
                            return Err(SegalError::InvalidInput(format!(
                                "missing composite for ({}, {})",
                                self.morphisms[f].0, self.morphisms[g].0
                            )));
                        }
                    }
                }
            }
        }
        for f in 0..self.morphisms.len() {
            let id_src = self.identity[self.morphisms[f].1];
            let id_tgt = self.identity[self.morphisms[f].2];
            if self.compose[&(id_src, f)] != f || self.compose[&(f, id_tgt)] != f {
                return Err(SegalError::InvalidInput(format!(
                    "identity law fails at {}",
                    self.morphisms[f].0
                )));
            }
        }
        for f in 0..self.morphisms.len() {
            for g in 0..self.morphisms.len() {
                if self.morphisms[f].2 != self.morphisms[g].1 {
                    continue;
                }
                for h in 0..self.morphisms.len() {
                    if self.morphisms[g].2 != self.morphisms[h].1 {
                        continue;
                    }
                    let left = self.compose[&(self.compose[&(f, g)], h)];
                    let right = self.compose[&(f, self.compose[&(g, h)])];
                    if left != right {
                        return Err(SegalError::InvalidInput(format!(
                            "associativity fails at ({}, {}, {})",
                            self.morphisms[f].0, self.morphisms[g].0, self.morphisms[h].0
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Category isomorphism, decided through the level-2 truncated nerves.
    pub fn isomorphic_to(&self, other: &FiniteCategory) -> Result<bool> {
        let a = nerve_of_category(self, 2)?;
        let b = nerve_of_category(other, 2)?;
        Ok(a.levelwise_isomorphic(&b, None)?.is_ok())
    }
}

/// Cells of a nerve: an object at level 0, a composable chain above.
#[derive(Clone, Debug)]
enum NerveCell {
    Object(usize),
    Chain(Vec<usize>),
}

/// The nerve of a finite category: level `n` is the set of composable
/// `n`-chains of morphisms; inner faces compose, outer faces drop, and
/// degeneracies insert identities.
pub fn nerve_of_category(c: &FiniteCategory, truncation: usize) -> Result<TruncatedSimplicialSet> {
    c.validate()?;
    let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
    for (m, &(_, src, _)) in c.morphisms.iter().enumerate() {
        by_source.entry(src).or_default().push(m);
    }
    let mut levels: Vec<Vec<NerveCell>> = Vec::with_capacity(truncation + 1);
    levels.push((0..c.objects.len()).map(NerveCell::Object).collect());
    let mut chains: Vec<Vec<usize>> = c.morphisms.iter().enumerate().map(|(m, _)| vec![m]).collect();
    for _ in 1..=truncation {
        levels.push(chains.iter().cloned().map(NerveCell::Chain).collect());
        let mut next = Vec::new();
        for chain in &chains {
            let tail = c.morphisms[*chain.last().unwrap()].2;
            if let Some(extensions) = by_source.get(&tail) {
                for &m in extensions {
                    let mut longer = chain.clone();
                    longer.push(m);
                    next.push(longer);
                }
            }
        }
        chains = next;
    }
    assemble(
        truncation,
        format!("nerve-category({} objects)", c.objects.len()),
        levels,
        |_, cell| match cell {
            NerveCell::Object(o) => Descriptor::new(&json!(c.objects[*o])),
            NerveCell::Chain(chain) => Descriptor::new(&json!(chain
                .iter()
                .map(|&m| &c.morphisms[m].0)
                .collect::<Vec<_>>())),
        },
        |n, i, cell| {
            let chain = match cell {
                NerveCell::Chain(chain) => chain,
                NerveCell::Object(_) => unreachable!("level 0 has no faces"),
            };
            if n == 1 {
                let (_, src, tgt) = c.morphisms[chain[0]];
                // d_0 drops the source end, leaving the target
                return NerveCell::Object(if i == 0 { tgt } else { src });
            }
            let mut shorter = chain.clone();
            if i == 0 {
                shorter.remove(0);
            } else if i == n {
                shorter.pop();
            } else {
                let merged = c.compose[&(chain[i - 1], chain[i])];
                shorter[i - 1] = merged;
                shorter.remove(i);
            }
            NerveCell::Chain(shorter)
        },
        |_, i, cell| match cell {
            NerveCell::Object(o) => NerveCell::Chain(vec![c.identity[*o]]),
            NerveCell::Chain(chain) => {
                let at = if i == 0 {
                    c.morphisms[chain[0]].1
                } else {
                    c.morphisms[chain[i - 1]].2
                };
                let mut longer = chain.clone();
                longer.insert(i, c.identity[at]);
                NerveCell::Chain(longer)
            }
        },
    )
}

/// A partial monoid: a unit, and a product defined on a subset of pairs.
#[derive(Clone, Debug)]
pub struct PartialMonoid {
    elements: Vec<String>,
    unit: usize,
    product: HashMap<(usize, usize), usize>,
}

impl PartialMonoid {
    pub fn new(
        elements: Vec<String>,
        unit: String,
        products: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let mut element_list = elements;
        element_list.sort();
        element_list.dedup();
        let unit_idx = element_list
            .binary_search(&unit)
            .map_err(|_| SegalError::InvalidInput(format!("unit {unit} is not an element")))?;
        let mut product = HashMap::new();
        for (x, y, z) in &products {
            let lookup = |label: &String| {
                element_list
                    .binary_search(label)
                    .map_err(|_| SegalError::InvalidInput(format!("{label} is not an element")))
            };
            if product
                .insert((lookup(x)?, lookup(y)?), lookup(z)?)
                .is_some()
            {
                return Err(SegalError::InvalidInput(format!(
                    "duplicate product entry for ({x}, {y})"
                )));
            }
        }
        Ok(PartialMonoid {
            elements: element_list,
            unit: unit_idx,
            product,
        })
    }

    /// Reads `{ "elements": [...], "unit": "1", "products": [["x","y","xy"], ...] }`;
    /// pairs absent from `products` are undefined.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| SegalError::InvalidInput("partial monoid must be a JSON object".into()))?;
        let elements = obj
            .get("elements")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("needs an \"elements\" array".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| SegalError::InvalidInput("elements must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let unit = obj
            .get("unit")
            .and_then(Value::as_str)
            .ok_or_else(|| SegalError::InvalidInput("needs a string \"unit\"".into()))?
            .to_string();
        let mut products = Vec::new();
        for p in obj
            .get("products")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("needs a \"products\" array".into()))?
        {
            let triple = p
                .as_array()
                .filter(|a| a.len() == 3)
                .and_then(|a| {
                    a.iter()
                        .map(|v| v.as_str().map(String::from))
                        .collect::<Option<Vec<String>>>()
                })
                .ok_or_else(|| {
                    SegalError::InvalidInput("products entries must be [x, y, xy]".into())
                })?;
            products.push((triple[0].clone(), triple[1].clone(), triple[2].clone()));
        }
        PartialMonoid::new(elements, unit, products)
    }

    pub fn to_json(&self) -> Value {
        let mut products: Vec<[&String; 3]> = self
            .product
            .iter()
            .map(|(&(x, y), &z)| [&self.elements[x], &self.elements[y], &self.elements[z]])
            .collect();
        products.sort();
        json!({
            "elements": self.elements,
            "unit": self.elements[self.unit],
            "products": products,
        })
    }

    /// A total monoid: every pair multiplies.
    pub fn total(elements: Vec<String>, unit: String, op: impl Fn(&str, &str) -> String) -> Result<Self> {
        let mut products = Vec::new();
        for x in &elements {
            for y in &elements {
                products.push((x.clone(), y.clone(), op(x, y)));
            }
        }
        PartialMonoid::new(elements, unit, products)
    }

    /// The cyclic group of order `n`, written additively with elements `0..n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let elements: Vec<String> = (0..n).map(|i| format!("{i}")).collect();
        PartialMonoid::total(elements, "0".into(), |x, y| {
            let a: usize = x.parse().unwrap();
            let b: usize = y.parse().unwrap();
            format!("{}", (a + b) % n)
        })
        .expect("cyclic group is a monoid")
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Whether every pair multiplies, making this an ordinary monoid.
    pub fn is_total(&self) -> bool {
        self.product.len() == self.elements.len() * self.elements.len()
    }

    pub fn unit_label(&self) -> &str {
        &self.elements[self.unit]
    }

    /// Checks the unit laws and the associativity biconditional: the
    /// left-bracketed triple product is defined exactly when the
    /// right-bracketed one is, with equal values.
    pub fn validate(&self) -> Result<()> {
        for m in 0..self.elements.len() {
            if self.product.get(&(self.unit, m)) != Some(&m)
                || self.product.get(&(m, self.unit)) != Some(&m)
            {
                return Err(SegalError::InvalidInput(format!(
                    "unit law fails at {}",
                    self.elements[m]
                )));
            }
        }
        for a in 0..self.elements.len() {
            for b in 0..self.elements.len() {
                for c in 0..self.elements.len() {
                    let left = self
                        .product
                        .get(&(a, b))
                        .and_then(|&ab| self.product.get(&(ab, c)));
                    let right = self
                        .product
                        .get(&(b, c))
                        .and_then(|&bc| self.product.get(&(a, bc)));
                    if left != right {
                        return Err(SegalError::InvalidInput(format!(
                            "associativity biconditional fails at ({}, {}, {})",
                            self.elements[a], self.elements[b], self.elements[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The nerve of a partial monoid: level `k` is the set of composable
/// `k`-tuples (all left-bracketed prefix products defined). Inner faces
/// multiply adjacent entries, outer faces drop them, degeneracies insert the
/// unit.
pub fn nerve_of_partial_monoid(
    m: &PartialMonoid,
    truncation: usize,
) -> Result<TruncatedSimplicialSet> {
    m.validate()?;
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::with_capacity(truncation + 1);
    levels.push(vec![Vec::new()]);
    // tuples paired with their total left-bracketed product
    let mut tuples: Vec<(Vec<usize>, usize)> =
        (0..m.elements.len()).map(|x| (vec![x], x)).collect();
    for _ in 1..=truncation {
        levels.push(tuples.iter().map(|(t, _)| t.clone()).collect());
        let mut next = Vec::new();
        for (tuple, prefix) in &tuples {
            for x in 0..m.elements.len() {
                if let Some(&extended) = m.product.get(&(*prefix, x)) {
                    let mut longer = tuple.clone();
                    longer.push(x);
                    next.push((longer, extended));
                }
            }
        }
        tuples = next;
    }
    assemble(
        truncation,
        format!("nerve-partial-monoid({} elements)", m.elements.len()),
        levels,
        |_, tuple: &Vec<usize>| {
            Descriptor::new(&json!(tuple
                .iter()
                .map(|&x| &m.elements[x])
                .collect::<Vec<_>>()))
        },
        |n, i, tuple| {
            let mut shorter = tuple.clone();
            if i == 0 {
                shorter.remove(0);
            } else if i == n {
                shorter.pop();
            } else {
                shorter[i - 1] = m.product[&(tuple[i - 1], tuple[i])];
                shorter.remove(i);
            }
            shorter
        },
        |_, i, tuple| {
            let mut longer = tuple.clone();
            longer.insert(i, m.unit);
            longer
        },
    )
}

/// Reads a category off a simplicial set whose 1-Segal map is bijective at
/// level 2: objects are the 0-simplices, morphisms the 1-simplices, and the
/// composite of a composable pair is `d_1` of its unique level-2 preimage.
pub fn category_from_1segal(k: &TruncatedSimplicialSet) -> Result<FiniteCategory> {
    if k.truncation() < 2 {
        return Err(SegalError::TruncationTooSmall {
            truncation: k.truncation(),
            needed: 2,
        });
    }
    let mut preimage: HashMap<(usize, usize), SimplexId> = HashMap::new();
    for sigma in k.simplices(2) {
        let pair = (k.face(2, sigma).index, k.face(0, sigma).index);
        if let Some(prev) = preimage.insert(pair, sigma) {
            return Err(SegalError::BijectionFailed {
                map: "(d_2, d_0): K_2 -> K_1 x_{K_0} K_1".into(),
                reason: format!(
                    "{} and {} share the image ({}, {})",
                    k.descriptor(prev),
                    k.descriptor(sigma),
                    k.descriptor(SimplexId::new(1, pair.0)),
                    k.descriptor(SimplexId::new(1, pair.1)),
                ),
            });
        }
    }
    let objects: Vec<String> = k
        .descriptors(0)
        .iter()
        .map(|d| d.as_str().to_string())
        .collect();
    let morphisms: Vec<(String, usize, usize)> = k
        .simplices(1)
        .map(|e| {
            (
                k.descriptor(e).as_str().to_string(),
                k.face(1, e).index,
                k.face(0, e).index,
            )
        })
        .collect();
    let identity: Vec<usize> = k
        .simplices(0)
        .map(|v| k.degeneracy(0, v).index)
        .collect();
    let mut compose = HashMap::new();
    for f in k.simplices(1) {
        for g in k.simplices(1) {
            if k.face(0, f) != k.face(1, g) {
                continue;
            }
            let sigma = preimage.get(&(f.index, g.index)).ok_or_else(|| {
                SegalError::BijectionFailed {
                    map: "(d_2, d_0): K_2 -> K_1 x_{K_0} K_1".into(),
                    reason: format!(
                        "no preimage for ({}, {})",
                        k.descriptor(f),
                        k.descriptor(g)
                    ),
                }
            })?;
            compose.insert((f.index, g.index), k.face(1, *sigma).index);
        }
    }
    let category = FiniteCategory {
        objects,
        morphisms,
        identity,
        compose,
    };
    category.validate()?;
    Ok(category)
}
