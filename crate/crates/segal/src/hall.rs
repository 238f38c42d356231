//! Hall algebras of reduced, levelwise-finite 2-Segal sets.
//!
//! The algebra is the free module on the 1-simplices; the structure constant
//! `g^z_{xy}` counts 2-simplices with `d_2 = x`, `d_1 = z`, `d_0 = y`.
//! Constants are plain counts, so coefficients live in the integers and any
//! ground field factors through them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::simplicial::{Descriptor, TruncatedSimplicialSet};

/// The Hall algebra of a reduced 2-Segal set, with basis the 1-simplices.
#[derive(Clone, Debug)]
pub struct HallAlgebra {
    basis: Vec<Descriptor>,
    unit: usize,
    /// `(x, y) -> { z -> g^z_{xy} }`, nonzero entries only.
    constants: BTreeMap<(usize, usize), BTreeMap<usize, u64>>,
}

/// A sparse integer linear combination of basis elements.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HallElement {
    coefficients: BTreeMap<usize, BigInt>,
}

impl HallElement {
    pub fn zero() -> Self {
        HallElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, BigInt> {
        &self.coefficients
    }

    pub fn term_count(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, basis_index: usize) -> BigInt {
        self.coefficients
            .get(&basis_index)
            .cloned()
            .unwrap_or_default()
    }

    fn add_term(&mut self, basis_index: usize, amount: BigInt) {
        let entry = self.coefficients.entry(basis_index).or_default();
        *entry += amount;
        if entry.sign() == num_bigint::Sign::NoSign {
            self.coefficients.remove(&basis_index);
        }
    }
}

impl HallAlgebra {
    /// Computes the Hall algebra of a reduced simplicial set by scanning its
    /// 2-simplices. The 2-Segal condition is a hypothesis, not re-verified
    /// here; run [`crate::checks::segal2_check`] first when in doubt.
    pub fn from_simplicial_set(x: &TruncatedSimplicialSet) -> Result<Self> {
        if !x.is_reduced() {
            return Err(SegalError::NotReduced {
                found: x.level_size(0),
            });
        }
        if x.truncation() < 2 {
            return Err(SegalError::TruncationTooSmall {
                truncation: x.truncation(),
                needed: 2,
            });
        }
        let basis = x.descriptors(1).to_vec();
        let unit = x.degeneracy(0, x.basepoint()?).index;
        let mut constants: BTreeMap<(usize, usize), BTreeMap<usize, u64>> = BTreeMap::new();
        for sigma in x.simplices(2) {
            let key = (x.face(2, sigma).index, x.face(0, sigma).index);
            let z = x.face(1, sigma).index;
            *constants.entry(key).or_default().entry(z).or_insert(0) += 1;
        }
        Ok(HallAlgebra {
            basis,
            unit,
            constants,
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Descriptor] {
        &self.basis
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn basis_index(&self, descriptor: &Descriptor) -> Option<usize> {
        self.basis.iter().position(|d| d == descriptor)
    }

    pub fn structure_constant(&self, x: usize, y: usize, z: usize) -> u64 {
        self.constants
            .get(&(x, y))
            .and_then(|row| row.get(&z))
            .copied()
            .unwrap_or(0)
    }

    pub fn basis_element(&self, index: usize) -> Result<HallElement> {
        if index >= self.basis.len() {
            return Err(SegalError::InvalidInput(format!(
                "basis index {index} out of range"
            )));
        }
        let mut e = HallElement::zero();
        e.add_term(index, BigInt::from(1));
        Ok(e)
    }

    pub fn unit_element(&self) -> HallElement {
        self.basis_element(self.unit).expect("unit is in the basis")
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, u: &HallElement, v: &HallElement) -> Result<HallElement> {
        for &i in u.coefficients.keys().chain(v.coefficients.keys()) {
            if i >= self.basis.len() {
                return Err(SegalError::InvalidInput(format!(
                    "basis index {i} out of range"
                )));
            }
        }
        let mut out = HallElement::zero();
        for (&x, a) in &u.coefficients {
            for (&y, b) in &v.coefficients {
                if let Some(row) = self.constants.get(&(x, y)) {
                    let ab = a * b;
                    for (&z, &g) in row {
                        out.add_term(z, &ab * BigInt::from(g));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product of two basis elements.
    pub fn product(&self, x: usize, y: usize) -> Result<HallElement> {
        self.multiply(&self.basis_element(x)?, &self.basis_element(y)?)
    }

    /// Exhaustive associativity over basis triples; returns the first
    /// failing triple.
    pub fn check_associative(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.basis.len() {
            for y in 0..self.basis.len() {
                let xy = self.product(x, y).expect("basis indices in range");
                for z in 0..self.basis.len() {
                    let left = self
                        .multiply(&xy, &self.basis_element(z).unwrap())
                        .unwrap();
                    let yz = self.product(y, z).unwrap();
                    let right = self
                        .multiply(&self.basis_element(x).unwrap(), &yz)
                        .unwrap();
                    if left != right {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// Exhaustive unit laws; returns the first basis element where one fails.
    pub fn check_unital(&self) -> Option<usize> {
        let unit = self.unit_element();
        (0..self.basis.len()).find(|&x| {
            let e = self.basis_element(x).unwrap();
            self.multiply(&unit, &e).unwrap() != e || self.multiply(&e, &unit).unwrap() != e
        })
    }

    /// Exhaustive commutativity over basis pairs; returns the first failing
    /// pair.
    pub fn check_commutative(&self) -> Option<(usize, usize)> {
        for x in 0..self.basis.len() {
            for y in x + 1..self.basis.len() {
                if self.product(x, y).unwrap() != self.product(y, x).unwrap() {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Renders an element as a formal sum over basis descriptors.
    pub fn render_element(&self, e: &HallElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.coefficients
            .iter()
            .map(|(&z, c)| {
                if c == &BigInt::from(1) {
                    self.basis[z].to_string()
                } else {
                    format!("{c}*{}", self.basis[z])
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// The full multiplication table as CSV: header row and column of basis
    /// descriptors, cells the formal sums of products.
    pub fn table_csv(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let mut out = String::new();
        out.push_str(&quote(""));
        for y in &self.basis {
            out.push(',');
            out.push_str(&quote(y.as_str()));
        }
        out.push('\n');
        for x in 0..self.basis.len() {
            out.push_str(&quote(self.basis[x].as_str()));
            for y in 0..self.basis.len() {
                out.push(',');
                let cell = self.render_element(&self.product(x, y).unwrap());
                out.push_str(&quote(&cell));
            }
            out.push('\n');
        }
        out
    }

    /// The multiplication table as plain text, one `x * y = ...` line per
    /// nonzero off-unit product.
    pub fn table_text(&self) -> String {
        let mut out = String::new();
        for x in 0..self.basis.len() {
            for y in 0..self.basis.len() {
                let p = self.product(x, y).unwrap();
                out.push_str(&format!(
                    "{} * {} = {}\n",
                    self.basis[x],
                    self.basis[y],
                    self.render_element(&p)
                ));
            }
        }
        out
    }

    /// `{ "basis": [...], "constants": [[x, y, z, g], ...] }` with indices
    /// into the basis list.
    pub fn to_json(&self) -> Value {
        let mut constants = Vec::new();
        for (&(x, y), row) in &self.constants {
            for (&z, &g) in row {
                constants.push(json!([x, y, z, g]));
            }
        }
        json!({
            "basis": self.basis,
            "constants": constants,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_simplicial_set, Multigraph};
    use crate::nerve::{nerve_of_partial_monoid, PartialMonoid};
    use crate::tree::{tree_simplicial_set, RootedTree};
    use serde_json::json;

    fn graph_algebra(vertices: &[&str], edges: &[(&str, &str, &str)]) -> HallAlgebra {
        let g = Multigraph::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(id, a, b)| (id.to_string(), a.to_string(), b.to_string()))
                .collect(),
        )
        .unwrap();
        let x = graph_simplicial_set(&g, 2).unwrap();
        HallAlgebra::from_simplicial_set(&x).unwrap()
    }

    fn subgraph_descriptor(vertices: &[&str], edges: &[&str]) -> Descriptor {
        Descriptor::new(&json!({
            "vertices": vertices,
            "edges": edges,
            "blocks": vec![1; vertices.len()],
        }))
    }

    #[test]
    fn edge_graph_multiplication() {
        let h = graph_algebra(&["a", "b"], &[("e", "a", "b")]);
        assert_eq!(h.dimension(), 5);
        let a = h.basis_index(&subgraph_descriptor(&["a"], &[])).unwrap();
        let b = h.basis_index(&subgraph_descriptor(&["b"], &[])).unwrap();
        let disjoint = h
            .basis_index(&subgraph_descriptor(&["a", "b"], &[]))
            .unwrap();
        let whole = h
            .basis_index(&subgraph_descriptor(&["a", "b"], &["e"]))
            .unwrap();

        let ab = h.product(a, b).unwrap();
        assert_eq!(ab.term_count(), 2);
        assert_eq!(ab.coefficient(disjoint), BigInt::from(1));
        assert_eq!(ab.coefficient(whole), BigInt::from(1));
        assert_eq!(ab, h.product(b, a).unwrap());

        // overlapping subgraphs multiply to zero
        assert!(h.product(a, a).unwrap().is_zero());
        assert!(h.product(whole, b).unwrap().is_zero());

        // no other nonzero products of distinct nonempty elements
        for x in 0..h.dimension() {
            for y in 0..h.dimension() {
                if x == h.unit_index() || y == h.unit_index() {
                    continue;
                }
                let p = h.product(x, y).unwrap();
                if !(x == a && y == b || x == b && y == a) {
                    assert!(p.is_zero(), "unexpected product at ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn loop_graph_has_no_nontrivial_products() {
        let h = graph_algebra(&["a"], &[("l", "a", "a")]);
        assert_eq!(h.dimension(), 3);
        for x in 0..h.dimension() {
            for y in 0..h.dimension() {
                let p = h.product(x, y).unwrap();
                if x == h.unit_index() {
                    assert_eq!(p, h.basis_element(y).unwrap());
                } else if y == h.unit_index() {
                    assert_eq!(p, h.basis_element(x).unwrap());
                } else {
                    assert!(p.is_zero());
                }
            }
        }
    }

    #[test]
    fn parallel_edges_give_power_of_two_terms() {
        for n in 1..=3usize {
            let edges: Vec<(String, String, String)> = (0..n)
                .map(|i| (format!("e{i}"), "a".to_string(), "b".to_string()))
                .collect();
            let g = Multigraph::new(
                vec!["a".into(), "b".into()],
                edges,
            )
            .unwrap();
            let x = graph_simplicial_set(&g, 2).unwrap();
            let h = HallAlgebra::from_simplicial_set(&x).unwrap();
            let a = h.basis_index(&subgraph_descriptor(&["a"], &[])).unwrap();
            let b = h.basis_index(&subgraph_descriptor(&["b"], &[])).unwrap();
            let ab = h.product(a, b).unwrap();
            assert_eq!(ab.term_count(), 1 << n, "n = {n}");
            assert!(ab
                .coefficients()
                .values()
                .all(|c| c == &BigInt::from(1)));
        }
    }

    #[test]
    fn tree_algebra_is_directional() {
        let t = RootedTree::new(
            vec!["a".into(), "b".into()],
            "a".into(),
            std::collections::BTreeMap::from([("b".into(), "a".into())]),
        )
        .unwrap();
        let x = tree_simplicial_set(&t, 2).unwrap();
        let h = HallAlgebra::from_simplicial_set(&x).unwrap();
        assert_eq!(h.dimension(), 4);
        let a = h
            .basis_index(&Descriptor::new(&json!({"vertices": ["a"], "layer": [1]})))
            .unwrap();
        let b = h
            .basis_index(&Descriptor::new(&json!({"vertices": ["b"], "layer": [1]})))
            .unwrap();
        let whole = h
            .basis_index(&Descriptor::new(
                &json!({"vertices": ["a", "b"], "layer": [1, 1]}),
            ))
            .unwrap();
        let ab = h.product(a, b).unwrap();
        assert_eq!(ab, h.basis_element(whole).unwrap());
        assert!(h.product(b, a).unwrap().is_zero());
        assert_eq!(h.check_commutative(), Some((a.min(b), a.max(b))));
    }

    #[test]
    fn trivial_tree_algebra_is_commutative() {
        let t = RootedTree::new(vec!["a".into()], "a".into(), Default::default()).unwrap();
        let x = tree_simplicial_set(&t, 2).unwrap();
        let h = HallAlgebra::from_simplicial_set(&x).unwrap();
        assert_eq!(h.dimension(), 2);
        assert_eq!(h.check_commutative(), None);
    }

    #[test]
    fn laws_hold_on_small_algebras() {
        let h = graph_algebra(&["a", "b"], &[("e", "a", "b")]);
        assert_eq!(h.check_associative(), None);
        assert_eq!(h.check_unital(), None);
        assert_eq!(h.check_commutative(), None);

        let m = PartialMonoid::new(
            vec!["1".into(), "x".into()],
            "1".into(),
            vec![
                ("1".into(), "1".into(), "1".into()),
                ("1".into(), "x".into(), "x".into()),
                ("x".into(), "1".into(), "x".into()),
            ],
        )
        .unwrap();
        let nerve = nerve_of_partial_monoid(&m, 2).unwrap();
        let h = HallAlgebra::from_simplicial_set(&nerve).unwrap();
        assert_eq!(h.check_associative(), None);
        assert_eq!(h.check_unital(), None);
    }

    #[test]
    fn partial_monoid_algebra_is_the_monoid_algebra_with_zeros() {
        let m = PartialMonoid::new(
            vec!["1".into(), "x".into()],
            "1".into(),
            vec![
                ("1".into(), "1".into(), "1".into()),
                ("1".into(), "x".into(), "x".into()),
                ("x".into(), "1".into(), "x".into()),
            ],
        )
        .unwrap();
        let nerve = nerve_of_partial_monoid(&m, 2).unwrap();
        let h = HallAlgebra::from_simplicial_set(&nerve).unwrap();
        let x = h
            .basis_index(&Descriptor::new(&json!(["x"])))
            .unwrap();
        // x*x undefined in the monoid, zero in the algebra
        assert!(h.product(x, x).unwrap().is_zero());
        let one = h.unit_index();
        assert_eq!(h.product(one, x).unwrap(), h.basis_element(x).unwrap());
    }

    #[test]
    fn monoid_nerve_algebras_are_monoid_algebras_with_zeros() {
        // exhaustively: x*y is the single basis element x*y when the monoid
        // multiplies the pair, and zero otherwise
        for m in [
            PartialMonoid::cyclic(2),
            PartialMonoid::cyclic(3),
            PartialMonoid::new(
                vec!["1".into(), "x".into()],
                "1".into(),
                vec![
                    ("1".into(), "1".into(), "1".into()),
                    ("1".into(), "x".into(), "x".into()),
                    ("x".into(), "1".into(), "x".into()),
                ],
            )
            .unwrap(),
        ] {
            let nerve = nerve_of_partial_monoid(&m, 2).unwrap();
            let h = HallAlgebra::from_simplicial_set(&nerve).unwrap();
            let monoid = m.to_json();
            let label = |i: usize| h.basis()[i].to_value()[0].as_str().unwrap().to_string();
            let defined: std::collections::BTreeMap<(String, String), String> = monoid
                ["products"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| {
                    (
                        (
                            p[0].as_str().unwrap().to_string(),
                            p[1].as_str().unwrap().to_string(),
                        ),
                        p[2].as_str().unwrap().to_string(),
                    )
                })
                .collect();
            for x in 0..h.dimension() {
                for y in 0..h.dimension() {
                    let p = h.product(x, y).unwrap();
                    match defined.get(&(label(x), label(y))) {
                        Some(z) => {
                            assert_eq!(p.term_count(), 1);
                            let (&idx, coeff) = p.coefficients().iter().next().unwrap();
                            assert_eq!(&label(idx), z);
                            assert_eq!(coeff, &BigInt::from(1));
                        }
                        None => assert!(p.is_zero()),
                    }
                }
            }
        }
    }

    #[test]
    fn csv_table_shape() {
        let h = graph_algebra(&["a", "b"], &[("e", "a", "b")]);
        let csv = h.table_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6); // header + 5 rows
        // exactly two nonzero off-unit cells (a*b and b*a)
        let nonzero_off_unit = h
            .basis()
            .iter()
            .enumerate()
            .flat_map(|(x, _)| {
                h.basis().iter().enumerate().map(move |(y, _)| (x, y))
            })
            .filter(|&(x, y)| {
                x != h.unit_index()
                    && y != h.unit_index()
                    && !h.product(x, y).unwrap().is_zero()
            })
            .count();
        assert_eq!(nonzero_off_unit, 2);
    }

    #[test]
    fn rejects_non_reduced_input() {
        let k = TruncatedSimplicialSet::standard_simplex(1, 2);
        assert!(matches!(
            HallAlgebra::from_simplicial_set(&k),
            Err(SegalError::NotReduced { found: 2 })
        ));
    }

    #[test]
    fn unit_constants_are_kronecker_deltas() {
        let h = graph_algebra(&["a", "b"], &[("e", "a", "b")]);
        for y in 0..h.dimension() {
            for z in 0..h.dimension() {
                let expected = u64::from(y == z);
                assert_eq!(h.structure_constant(h.unit_index(), y, z), expected);
                assert_eq!(h.structure_constant(y, h.unit_index(), z), expected);
            }
        }
    }
}
