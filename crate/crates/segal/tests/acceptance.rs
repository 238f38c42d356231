//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::json;

use segal::checks::{
    path_space_criterion, segal1_check, segal1_unmatched, segal2_check, SegalWitness,
};
use segal::double_category::{
    counit_comparison, p_construction, s_construction, unit_comparison, DoubleCategory,
};
use segal::graph::{graph_simplicial_set, Multigraph};
use segal::hall::HallAlgebra;
use segal::nerve::{
    category_from_1segal, nerve_of_category, nerve_of_partial_monoid, FiniteCategory,
    PartialMonoid,
};
use segal::tree::{tree_simplicial_set, RootedTree};
use segal::triangulation::enumerate_triangulations;
use segal::{Descriptor, MonotoneMap, TruncatedSimplicialSet};

fn criterion(number: u32, name: &str, run: impl FnOnce() -> Result<(), String>) {
    match run() {
        Ok(()) => println!("criterion {number:02} ({name}): PASS"),
        Err(message) => {
            println!("criterion {number:02} ({name}): FAIL - {message}");
            panic!("criterion {number:02} ({name}) failed: {message}");
        }
    }
}

macro_rules! check {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn graph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Multigraph {
    Multigraph::new(
        vertices.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|(id, a, b)| (id.to_string(), a.to_string(), b.to_string()))
            .collect(),
    )
    .unwrap()
}

fn edge_graph() -> Multigraph {
    graph(&["a", "b"], &[("e", "a", "b")])
}

fn loop_graph() -> Multigraph {
    graph(&["a"], &[("l", "a", "a")])
}

fn parallel_graph(n: usize) -> Multigraph {
    let edges: Vec<(String, String, String)> = (0..n)
        .map(|i| (format!("e{i}"), "a".to_string(), "b".to_string()))
        .collect();
    Multigraph::new(vec!["a".into(), "b".into()], edges).unwrap()
}

fn path3_graph() -> Multigraph {
    graph(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "b", "c")])
}

fn triangle_graph() -> Multigraph {
    graph(
        &["a", "b", "c"],
        &[("e1", "a", "b"), ("e2", "b", "c"), ("e3", "a", "c")],
    )
}

fn tree_ab() -> RootedTree {
    RootedTree::new(
        vec!["a".into(), "b".into()],
        "a".into(),
        BTreeMap::from([("b".into(), "a".into())]),
    )
    .unwrap()
}

fn tree_path() -> RootedTree {
    RootedTree::new(
        vec!["a".into(), "b".into(), "c".into()],
        "a".into(),
        BTreeMap::from([("b".into(), "a".into()), ("c".into(), "b".into())]),
    )
    .unwrap()
}

fn tree_cherry() -> RootedTree {
    RootedTree::new(
        vec!["a".into(), "b".into(), "c".into()],
        "a".into(),
        BTreeMap::from([("b".into(), "a".into()), ("c".into(), "a".into())]),
    )
    .unwrap()
}

fn free_partial_monoid() -> PartialMonoid {
    PartialMonoid::new(
        vec!["1".into(), "x".into()],
        "1".into(),
        vec![
            ("1".into(), "1".into(), "1".into()),
            ("1".into(), "x".into(), "x".into()),
            ("x".into(), "1".into(), "x".into()),
        ],
    )
    .unwrap()
}

/// The reduced 2-Segal suite at truncation 5, used by criteria 5, 7, and 8.
fn suite() -> Vec<(&'static str, TruncatedSimplicialSet)> {
    vec![
        ("graph: edge", graph_simplicial_set(&edge_graph(), 5).unwrap()),
        ("graph: loop", graph_simplicial_set(&loop_graph(), 5).unwrap()),
        (
            "graph: double edge",
            graph_simplicial_set(&parallel_graph(2), 5).unwrap(),
        ),
        (
            "graph: path on 3 vertices",
            graph_simplicial_set(&path3_graph(), 5).unwrap(),
        ),
        (
            "graph: triangle",
            graph_simplicial_set(&triangle_graph(), 5).unwrap(),
        ),
        ("tree: a->b", tree_simplicial_set(&tree_ab(), 5).unwrap()),
        ("tree: path", tree_simplicial_set(&tree_path(), 5).unwrap()),
        ("tree: cherry", tree_simplicial_set(&tree_cherry(), 5).unwrap()),
        (
            "nerve: Z/2",
            nerve_of_partial_monoid(&PartialMonoid::cyclic(2), 5).unwrap(),
        ),
        (
            "nerve: Z/3",
            nerve_of_partial_monoid(&PartialMonoid::cyclic(3), 5).unwrap(),
        ),
        (
            "nerve: partial monoid {1,x}",
            nerve_of_partial_monoid(&free_partial_monoid(), 5).unwrap(),
        ),
        (
            "s-construction: W2",
            s_construction(&DoubleCategory::w2(), 5).unwrap(),
        ),
    ]
}

fn subgraph(vertices: &[&str], edges: &[&str]) -> Descriptor {
    Descriptor::new(&json!({
        "vertices": vertices,
        "edges": edges,
        "blocks": vec![1; vertices.len()],
    }))
}

fn subforest(vertices: &[&str]) -> Descriptor {
    Descriptor::new(&json!({
        "vertices": vertices,
        "layer": vec![1; vertices.len()],
    }))
}

#[test]
fn criterion_01_edge_graph_hall_algebra() {
    criterion(1, "edge graph Hall algebra", || {
        let x = graph_simplicial_set(&edge_graph(), 2).unwrap();
        check!(x.level_size(1) == 5, "|X_1| = {}, expected 5", x.level_size(1));
        let h = HallAlgebra::from_simplicial_set(&x).map_err(|e| e.to_string())?;
        let a = h.basis_index(&subgraph(&["a"], &[])).ok_or("missing a")?;
        let b = h.basis_index(&subgraph(&["b"], &[])).ok_or("missing b")?;
        let disjoint = h
            .basis_index(&subgraph(&["a", "b"], &[]))
            .ok_or("missing a+b")?;
        let g = h
            .basis_index(&subgraph(&["a", "b"], &["e"]))
            .ok_or("missing G")?;
        let ab = h.product(a, b).map_err(|e| e.to_string())?;
        check!(
            ab.term_count() == 2
                && ab.coefficient(disjoint) == 1.into()
                && ab.coefficient(g) == 1.into(),
            "a*b should be (a ⨿ b) + G, got {}",
            h.render_element(&ab)
        );
        check!(
            ab == h.product(b, a).map_err(|e| e.to_string())?,
            "a*b and b*a differ"
        );
        for x_i in 0..h.dimension() {
            for y in 0..h.dimension() {
                if x_i == h.unit_index() || y == h.unit_index() {
                    continue;
                }
                let expected_nonzero = (x_i, y) == (a, b) || (x_i, y) == (b, a);
                let p = h.product(x_i, y).map_err(|e| e.to_string())?;
                check!(
                    p.is_zero() != expected_nonzero,
                    "unexpected product at ({x_i}, {y}): {}",
                    h.render_element(&p)
                );
            }
        }
        check!(h.check_unital().is_none(), "unit laws fail");
        Ok(())
    });
}

#[test]
fn criterion_02_loop_graph_hall_algebra() {
    criterion(2, "loop graph Hall algebra", || {
        let x = graph_simplicial_set(&loop_graph(), 2).unwrap();
        check!(x.level_size(1) == 3, "|X_1| = {}, expected 3", x.level_size(1));
        let h = HallAlgebra::from_simplicial_set(&x).map_err(|e| e.to_string())?;
        for x_i in 0..h.dimension() {
            for y in 0..h.dimension() {
                if x_i == h.unit_index() || y == h.unit_index() {
                    continue;
                }
                let p = h.product(x_i, y).map_err(|e| e.to_string())?;
                check!(p.is_zero(), "off-unit product ({x_i}, {y}) is nonzero");
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_parallel_edges_hall_products() {
    criterion(3, "parallel edge Hall products", || {
        for n in [1usize, 2, 3] {
            let x = graph_simplicial_set(&parallel_graph(n), 2).unwrap();
            let h = HallAlgebra::from_simplicial_set(&x).map_err(|e| e.to_string())?;
            let a = h.basis_index(&subgraph(&["a"], &[])).ok_or("missing a")?;
            let b = h.basis_index(&subgraph(&["b"], &[])).ok_or("missing b")?;
            let ab = h.product(a, b).map_err(|e| e.to_string())?;
            check!(
                ab.term_count() == 1 << n,
                "{n} parallel edges: a*b has {} terms, expected {}",
                ab.term_count(),
                1 << n
            );
            check!(
                ab.coefficients().values().all(|c| c == &1.into()),
                "{n} parallel edges: a coefficient differs from 1"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_04_rooted_tree_hall_algebra() {
    criterion(4, "rooted tree Hall algebra", || {
        let x = tree_simplicial_set(&tree_ab(), 2).unwrap();
        check!(x.level_size(1) == 4, "|X_1| = {}, expected 4", x.level_size(1));
        let h = HallAlgebra::from_simplicial_set(&x).map_err(|e| e.to_string())?;
        let a = h.basis_index(&subforest(&["a"])).ok_or("missing a")?;
        let b = h.basis_index(&subforest(&["b"])).ok_or("missing b")?;
        let t = h.basis_index(&subforest(&["a", "b"])).ok_or("missing T")?;
        let ab = h.product(a, b).map_err(|e| e.to_string())?;
        check!(
            ab == h.basis_element(t).unwrap(),
            "a*b = {}, expected T",
            h.render_element(&ab)
        );
        check!(
            h.product(b, a).map_err(|e| e.to_string())?.is_zero(),
            "b*a should vanish"
        );
        let witness = h.check_commutative();
        check!(
            witness == Some((a.min(b), a.max(b))),
            "commutativity witness {witness:?}, expected the pair (a, b)"
        );
        Ok(())
    });
}

#[test]
fn criterion_05_two_segal_verification_over_the_suite() {
    criterion(5, "2-Segal suite, levels 3..5", || {
        for (name, x) in suite() {
            let start = Instant::now();
            let report = segal2_check(&x);
            let elapsed = start.elapsed();
            check!(
                report.levels == vec![3, 4, 5],
                "{name}: checked levels {:?}",
                report.levels
            );
            check!(
                report.passed(),
                "{name}: 2-Segal fails with {:?}",
                report.witness
            );
            check!(
                elapsed.as_secs() < 60,
                "{name}: verification took {elapsed:?}, over the 60 s budget"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_06_one_segal_witnesses() {
    criterion(6, "1-Segal witnesses", || {
        // edge graph: the known non-injectivity pair
        let x = graph_simplicial_set(&edge_graph(), 5).unwrap();
        match segal1_check(&x).witness {
            Some(SegalWitness::NonInjective {
                level: 2,
                first,
                second,
                ..
            }) => {
                let expected = [
                    Descriptor::new(
                        &json!({"vertices": ["a", "b"], "edges": [], "blocks": [1, 2]}),
                    ),
                    Descriptor::new(
                        &json!({"vertices": ["a", "b"], "edges": ["e"], "blocks": [1, 2]}),
                    ),
                ];
                check!(
                    expected.contains(&first) && expected.contains(&second) && first != second,
                    "wrong pair: {first} / {second}"
                );
            }
            other => return Err(format!("edge graph witness: {other:?}")),
        }
        // trees: (T, T) is never hit
        for (name, tree) in [
            ("a->b", tree_ab()),
            ("path", tree_path()),
            ("cherry", tree_cherry()),
        ] {
            let x = tree_simplicial_set(&tree, 5).unwrap();
            match segal1_check(&x).witness {
                Some(SegalWitness::NonSurjective { level: 2, .. }) => {}
                other => return Err(format!("tree {name} witness: {other:?}")),
            }
            let full = x
                .id_by_descriptor(
                    1,
                    &Descriptor::new(&json!({
                        "vertices": tree.vertex_labels(),
                        "layer": vec![1; tree.vertex_count()],
                    })),
                )
                .ok_or("missing full tree")?;
            let unmatched = segal1_unmatched(&x, 2).map_err(|e| e.to_string())?;
            check!(
                unmatched.contains(&vec![full, full]),
                "tree {name}: (T, T) unexpectedly has a preimage"
            );
        }
        // standard simplices and nerves of categories pass
        for n in 0..=3 {
            let simplex = TruncatedSimplicialSet::standard_simplex(n, 5);
            check!(segal1_check(&simplex).passed(), "simplex {n} fails 1-Segal");
        }
        for (name, c) in [
            ("poset", FiniteCategory::linear_order(2)),
            ("Z/2", FiniteCategory::cyclic_group(2)),
        ] {
            let nerve = nerve_of_category(&c, 5).map_err(|e| e.to_string())?;
            check!(segal1_check(&nerve).passed(), "nerve of {name} fails 1-Segal");
        }
        Ok(())
    });
}

#[test]
fn criterion_07_path_space_criterion_agreement() {
    criterion(7, "path space criterion agreement", || {
        for (name, x) in suite() {
            let report = path_space_criterion(&x).map_err(|e| e.to_string())?;
            check!(report.agree(), "{name}: routes disagree");
            check!(report.passed(), "{name}: path criterion fails");
        }
        Ok(())
    });
}

#[test]
fn criterion_08_hall_algebra_laws() {
    criterion(8, "Hall algebra laws", || {
        for (name, x) in suite() {
            let h = HallAlgebra::from_simplicial_set(&x).map_err(|e| e.to_string())?;
            check!(
                h.check_associative().is_none(),
                "{name}: associativity fails"
            );
            check!(h.check_unital().is_none(), "{name}: unit laws fail");
            let commutative = h.check_commutative().is_none();
            if name.starts_with("graph") {
                check!(commutative, "{name}: graph algebra is not commutative");
            }
            if name.starts_with("tree") {
                check!(!commutative, "{name}: tree algebra is commutative");
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_09_double_category_of_the_edge_graph() {
    criterion(9, "double category of the edge graph", || {
        let x = graph_simplicial_set(&edge_graph(), 4).unwrap();
        let d = p_construction(&x).map_err(|e| e.to_string())?;
        check!(d.object_count() == 5, "{} objects", d.object_count());
        check!(d.hor_arrows().len() == 13, "{} hor", d.hor_arrows().len());
        check!(d.ver_arrows().len() == 13, "{} ver", d.ver_arrows().len());
        check!(d.squares().len() == 25, "{} squares", d.squares().len());
        check!(d.check_stable().is_pass(), "stability fails");
        check!(
            d.check_pointed().map_err(|e| e.to_string())?.is_pass(),
            "pointedness fails"
        );
        // validation covers interchange on every composable 2x2 grid
        let violations = d.validate();
        check!(violations.is_empty(), "validation: {}", violations[0]);
        Ok(())
    });
}

#[test]
fn criterion_10_round_trips() {
    criterion(10, "S/P round trips", || {
        counit_comparison(&DoubleCategory::w2()).map_err(|e| format!("W2 counit: {e}"))?;
        let edge = graph_simplicial_set(&edge_graph(), 3).unwrap();
        let d = p_construction(&edge).map_err(|e| e.to_string())?;
        counit_comparison(&d).map_err(|e| format!("P(edge) counit: {e}"))?;
        for (name, x) in [
            ("graph a-b", graph_simplicial_set(&edge_graph(), 4).unwrap()),
            ("tree a->b", tree_simplicial_set(&tree_ab(), 4).unwrap()),
            (
                "nerve {1,x}",
                nerve_of_partial_monoid(&free_partial_monoid(), 4).unwrap(),
            ),
        ] {
            unit_comparison(&x).map_err(|e| format!("{name} unit: {e}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_11_category_reconstruction() {
    criterion(11, "category reconstruction", || {
        for (name, c) in [
            ("3-object poset", FiniteCategory::linear_order(2)),
            ("Z/2", FiniteCategory::cyclic_group(2)),
        ] {
            let nerve = nerve_of_category(&c, 3).map_err(|e| e.to_string())?;
            let back = category_from_1segal(&nerve).map_err(|e| e.to_string())?;
            check!(
                back.isomorphic_to(&c).map_err(|e| e.to_string())?,
                "{name}: reconstruction is not isomorphic"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_12_property_suite() {
    criterion(12, "identities, functoriality, Catalan counts", || {
        // simplicial identities on every constructed set
        for (name, x) in suite() {
            check!(x.validate().passed(), "{name}: identities fail");
        }
        for n in 0..=3 {
            check!(
                TruncatedSimplicialSet::standard_simplex(n, 4).validate().passed(),
                "simplex {n}: identities fail"
            );
        }
        for n in 1..=3 {
            check!(
                TruncatedSimplicialSet::spine(n, 4).unwrap().validate().passed(),
                "spine {n}: identities fail"
            );
        }
        // operator functoriality, exhaustively up to arity 4
        let x = graph_simplicial_set(&edge_graph(), 4).unwrap();
        for n in 0..=4usize {
            for p in 0..=4usize {
                for beta in MonotoneMap::enumerate(n, p) {
                    for m in 0..=4usize {
                        for alpha in MonotoneMap::enumerate(m, n) {
                            let composite = alpha.then(&beta).unwrap();
                            for sigma in x.simplices(p) {
                                let direct = x.apply_operator(&composite, sigma).unwrap();
                                let staged = x
                                    .apply_operator(&alpha, x.apply_operator(&beta, sigma).unwrap())
                                    .unwrap();
                                check!(
                                    direct == staged,
                                    "functoriality fails for {:?} then {:?}",
                                    alpha.values(),
                                    beta.values()
                                );
                            }
                        }
                    }
                }
            }
        }
        // triangulation counts
        let catalan = [1usize, 1, 2, 5, 14, 42];
        for n in 2..=6usize {
            let count = enumerate_triangulations(n).len();
            check!(
                count == catalan[n - 1],
                "{count} triangulations of the {}-gon, expected {}",
                n + 1,
                catalan[n - 1]
            );
        }
        Ok(())
    });
}
