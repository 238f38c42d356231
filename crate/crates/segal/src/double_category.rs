//! Pointed stable double categories, the discrete S-construction, and its
//! inverse construction on reduced 2-Segal sets.
//!
//! A double category is stored as two categories sharing an object set plus
//! a flat list of squares with their four boundary arrows. Square
//! composition is never tabulated: stability makes every square the unique
//! filler of its source span, so composites are derived by filling and then
//! checked for coherence.
//!
//! Squares are drawn with the horizontal arrows on top and bottom and the
//! vertical arrows on the sides: `top` and `left` leave the same source
//! corner, `bottom` and `right` meet in the same target corner.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Result, SegalError};
use crate::simplicial::{
    assemble, Descriptor, LevelwiseMap, SimplexId, TruncatedSimplicialSet,
};

/// A morphism of one of the two underlying categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A square with its boundary arrows (indices into the hor/ver lists).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub id: String,
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
}

/// Pass/fail outcome of a semantic check, with a witness message on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
}

impl CheckOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

#[derive(Clone, Debug)]
pub struct DoubleCategory {
    objects: Vec<String>,
    point: Option<usize>,
    hor: Vec<Arrow>,
    ver: Vec<Arrow>,
    hor_id: Vec<usize>,
    ver_id: Vec<usize>,
    hor_comp: HashMap<(usize, usize), usize>,
    ver_comp: HashMap<(usize, usize), usize>,
    squares: Vec<Square>,
    by_span: HashMap<(usize, usize), Vec<usize>>,
    by_cospan: HashMap<(usize, usize), Vec<usize>>,
}

impl DoubleCategory {
    /// Structural assembly from label-based tables; order of objects,
    /// arrows, and squares is preserved. Semantic conditions (category
    /// axioms, stability, interchange) are the business of [`Self::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        objects: Vec<String>,
        point: Option<String>,
        hor: Vec<(String, String, String)>,
        ver: Vec<(String, String, String)>,
        hor_id: BTreeMap<String, String>,
        ver_id: BTreeMap<String, String>,
        hor_comp: Vec<(String, String, String)>,
        ver_comp: Vec<(String, String, String)>,
        squares: Vec<(String, String, String, String, String)>,
    ) -> Result<Self> {
        let mut object_index = HashMap::new();
        for (i, label) in objects.iter().enumerate() {
            if object_index.insert(label.clone(), i).is_some() {
                return Err(SegalError::InvalidInput(format!(
                    "duplicate object label {label}"
                )));
            }
        }
        let point = point
            .map(|p| {
                object_index.get(&p).copied().ok_or_else(|| {
                    SegalError::InvalidInput(format!("point {p} is not an object"))
                })
            })
            .transpose()?;
        let build_arrows = |list: Vec<(String, String, String)>,
                            kind: &str|
         -> Result<(Vec<Arrow>, HashMap<String, usize>)> {
            let mut arrows = Vec::with_capacity(list.len());
            let mut index = HashMap::new();
            for (id, src, tgt) in list {
                let s = *object_index.get(&src).ok_or_else(|| {
                    SegalError::InvalidInput(format!("{kind} {id}: source {src} is not an object"))
                })?;
                let t = *object_index.get(&tgt).ok_or_else(|| {
                    SegalError::InvalidInput(format!("{kind} {id}: target {tgt} is not an object"))
                })?;
                if index.insert(id.clone(), arrows.len()).is_some() {
                    return Err(SegalError::InvalidInput(format!(
                        "duplicate {kind} id {id}"
                    )));
                }
                arrows.push(Arrow { id, src: s, tgt: t });
            }
            Ok((arrows, index))
        };
        let (hor, hor_index) = build_arrows(hor, "horizontal morphism")?;
        let (ver, ver_index) = build_arrows(ver, "vertical morphism")?;
        let build_identity = |table: BTreeMap<String, String>,
                              index: &HashMap<String, usize>,
                              arrows: &[Arrow],
                              kind: &str|
         -> Result<Vec<usize>> {
            let mut id_of = vec![usize::MAX; objects.len()];
            for (obj, id) in table {
                let o = *object_index.get(&obj).ok_or_else(|| {
                    SegalError::InvalidInput(format!("{kind} identity key {obj} is not an object"))
                })?;
                let m = *index.get(&id).ok_or_else(|| {
                    SegalError::InvalidInput(format!("{kind} identity {id} is not an arrow"))
                })?;
                if arrows[m].src != o || arrows[m].tgt != o {
                    return Err(SegalError::InvalidInput(format!(
                        "{kind} identity of {obj} has wrong endpoints"
                    )));
                }
                id_of[o] = m;
            }
            if let Some(o) = id_of.iter().position(|&m| m == usize::MAX) {
                return Err(SegalError::InvalidInput(format!(
                    "object {} has no {kind} identity",
                    objects[o]
                )));
            }
            Ok(id_of)
        };
        let hor_id = build_identity(hor_id, &hor_index, &hor, "horizontal")?;
        let ver_id = build_identity(ver_id, &ver_index, &ver, "vertical")?;
        let build_comp = |table: Vec<(String, String, String)>,
                          index: &HashMap<String, usize>,
                          kind: &str|
         -> Result<HashMap<(usize, usize), usize>> {
            let mut comp = HashMap::new();
            for (f, g, h) in table {
                let lookup = |id: &String| {
                    index.get(id).copied().ok_or_else(|| {
                        SegalError::InvalidInput(format!("{kind} composition uses unknown id {id}"))
                    })
                };
                if comp.insert((lookup(&f)?, lookup(&g)?), lookup(&h)?).is_some() {
                    return Err(SegalError::InvalidInput(format!(
                        "duplicate {kind} composition entry ({f}, {g})"
                    )));
                }
            }
            Ok(comp)
        };
        let hor_comp = build_comp(hor_comp, &hor_index, "horizontal")?;
        let ver_comp = build_comp(ver_comp, &ver_index, "vertical")?;
        let mut square_list = Vec::with_capacity(squares.len());
        let mut square_ids = HashMap::new();
        for (id, top, bottom, left, right) in squares {
            let hor_lookup = |id: &String| {
                hor_index.get(id).copied().ok_or_else(|| {
                    SegalError::InvalidInput(format!("square boundary {id} is not a horizontal morphism"))
                })
            };
            let ver_lookup = |id: &String| {
                ver_index.get(id).copied().ok_or_else(|| {
                    SegalError::InvalidInput(format!("square boundary {id} is not a vertical morphism"))
                })
            };
            if square_ids.insert(id.clone(), square_list.len()).is_some() {
                return Err(SegalError::InvalidInput(format!("duplicate square id {id}")));
            }
            square_list.push(Square {
                id,
                top: hor_lookup(&top)?,
                bottom: hor_lookup(&bottom)?,
                left: ver_lookup(&left)?,
                right: ver_lookup(&right)?,
            });
        }
        let mut by_span: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut by_cospan: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (q, sq) in square_list.iter().enumerate() {
            by_span.entry((sq.top, sq.left)).or_default().push(q);
            by_cospan.entry((sq.bottom, sq.right)).or_default().push(q);
        }
        Ok(DoubleCategory {
            objects,
            point,
            hor,
            ver,
            hor_id,
            ver_id,
            hor_comp,
            ver_comp,
            squares: square_list,
            by_span,
            by_cospan,
        })
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn point(&self) -> Option<usize> {
        self.point
    }

    pub fn hor_arrows(&self) -> &[Arrow] {
        &self.hor
    }

    pub fn ver_arrows(&self) -> &[Arrow] {
        &self.ver
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn hor_identity(&self, object: usize) -> usize {
        self.hor_id[object]
    }

    pub fn ver_identity(&self, object: usize) -> usize {
        self.ver_id[object]
    }

    pub fn hor_composite(&self, f: usize, g: usize) -> Result<usize> {
        self.hor_comp.get(&(f, g)).copied().ok_or_else(|| {
            SegalError::InvalidInput(format!(
                "missing horizontal composite of ({}, {})",
                self.hor[f].id, self.hor[g].id
            ))
        })
    }

    pub fn ver_composite(&self, f: usize, g: usize) -> Result<usize> {
        self.ver_comp.get(&(f, g)).copied().ok_or_else(|| {
            SegalError::InvalidInput(format!(
                "missing vertical composite of ({}, {})",
                self.ver[f].id, self.ver[g].id
            ))
        })
    }

    /// The unique square with the given source span `(top, left)`.
    pub fn fill_span(&self, top: usize, left: usize) -> Result<usize> {
        match self.by_span.get(&(top, left)).map(Vec::as_slice) {
            Some([unique]) => Ok(*unique),
            other => Err(SegalError::BijectionFailed {
                map: "square -> (top, left)".into(),
                reason: format!(
                    "span ({}, {}) has {} fillers",
                    self.hor[top].id,
                    self.ver[left].id,
                    other.map_or(0, <[usize]>::len)
                ),
            }),
        }
    }

    /// The unique square with the given target cospan `(bottom, right)`.
    pub fn fill_cospan(&self, bottom: usize, right: usize) -> Result<usize> {
        match self.by_cospan.get(&(bottom, right)).map(Vec::as_slice) {
            Some([unique]) => Ok(*unique),
            other => Err(SegalError::BijectionFailed {
                map: "square -> (bottom, right)".into(),
                reason: format!(
                    "cospan ({}, {}) has {} fillers",
                    self.hor[bottom].id,
                    self.ver[right].id,
                    other.map_or(0, <[usize]>::len)
                ),
            }),
        }
    }

    /// The vertically-degenerate identity square on a horizontal morphism,
    /// derived by stability and checked for coherence.
    pub fn identity_square_on_hor(&self, f: usize) -> Result<usize> {
        let q = self.fill_span(f, self.ver_id[self.hor[f].src])?;
        let sq = &self.squares[q];
        if sq.bottom != f || sq.right != self.ver_id[self.hor[f].tgt] {
            return Err(SegalError::InvalidInput(format!(
                "identity square on horizontal {} is incoherent",
                self.hor[f].id
            )));
        }
        Ok(q)
    }

    /// The horizontally-degenerate identity square on a vertical morphism.
    pub fn identity_square_on_ver(&self, e: usize) -> Result<usize> {
        let q = self.fill_span(self.hor_id[self.ver[e].src], e)?;
        let sq = &self.squares[q];
        if sq.bottom != self.hor_id[self.ver[e].tgt] || sq.right != e {
            return Err(SegalError::InvalidInput(format!(
                "identity square on vertical {} is incoherent",
                self.ver[e].id
            )));
        }
        Ok(q)
    }

    /// Horizontal (side-by-side) composition of squares, derived from
    /// stability: the composite is the unique filler of the composite span,
    /// and its target cospan is checked against the expected one.
    pub fn compose_squares_h(&self, a: usize, b: usize) -> Result<usize> {
        let (qa, qb) = (&self.squares[a], &self.squares[b]);
        if qa.right != qb.left {
            return Err(SegalError::InvalidInput(format!(
                "squares {} and {} are not horizontally composable",
                qa.id, qb.id
            )));
        }
        let top = self.hor_composite(qa.top, qb.top)?;
        let bottom = self.hor_composite(qa.bottom, qb.bottom)?;
        let q = self.fill_span(top, qa.left)?;
        let sq = &self.squares[q];
        if sq.bottom != bottom || sq.right != qb.right {
            return Err(SegalError::InvalidInput(format!(
                "horizontal composite of {} and {} is incoherent",
                qa.id, qb.id
            )));
        }
        Ok(q)
    }

    /// Vertical (stacked) composition of squares, derived from stability.
    pub fn compose_squares_v(&self, a: usize, b: usize) -> Result<usize> {
        let (qa, qb) = (&self.squares[a], &self.squares[b]);
        if qa.bottom != qb.top {
            return Err(SegalError::InvalidInput(format!(
                "squares {} and {} are not vertically composable",
                qa.id, qb.id
            )));
        }
        let left = self.ver_composite(qa.left, qb.left)?;
        let right = self.ver_composite(qa.right, qb.right)?;
        let q = self.fill_span(qa.top, left)?;
        let sq = &self.squares[q];
        if sq.bottom != qb.bottom || sq.right != right {
            return Err(SegalError::InvalidInput(format!(
                "vertical composite of {} and {} is incoherent",
                qa.id, qb.id
            )));
        }
        Ok(q)
    }

    /// Exactly one horizontal morphism out of the point and one vertical
    /// morphism into it, per object.
    pub fn check_pointed(&self) -> Result<CheckOutcome> {
        let point = self.point.ok_or_else(|| {
            SegalError::InvalidInput("no point designated".into())
        })?;
        for a in 0..self.objects.len() {
            let from_point = self
                .hor
                .iter()
                .filter(|m| m.src == point && m.tgt == a)
                .count();
            if from_point != 1 {
                return Ok(CheckOutcome::Fail(format!(
                    "object {} has {} horizontal morphisms from the point",
                    self.objects[a], from_point
                )));
            }
            let to_point = self
                .ver
                .iter()
                .filter(|m| m.src == a && m.tgt == point)
                .count();
            if to_point != 1 {
                return Ok(CheckOutcome::Fail(format!(
                    "object {} has {} vertical morphisms to the point",
                    self.objects[a], to_point
                )));
            }
        }
        Ok(CheckOutcome::Pass)
    }

    /// Squares are in bijection with corner-compatible spans and,
    /// independently, with corner-compatible cospans.
    pub fn check_stable(&self) -> CheckOutcome {
        for (&(top, left), fillers) in &self.by_span {
            if fillers.len() > 1 {
                return CheckOutcome::Fail(format!(
                    "span ({}, {}) has {} fillers",
                    self.hor[top].id,
                    self.ver[left].id,
                    fillers.len()
                ));
            }
        }
        for (&(bottom, right), fillers) in &self.by_cospan {
            if fillers.len() > 1 {
                return CheckOutcome::Fail(format!(
                    "cospan ({}, {}) has {} fillers",
                    self.hor[bottom].id,
                    self.ver[right].id,
                    fillers.len()
                ));
            }
        }
        for (m, hor) in self.hor.iter().enumerate() {
            for (e, ver) in self.ver.iter().enumerate() {
                if hor.src == ver.src && !self.by_span.contains_key(&(m, e)) {
                    return CheckOutcome::Fail(format!(
                        "span ({}, {}) has no filler",
                        hor.id, ver.id
                    ));
                }
                if hor.tgt == ver.tgt && !self.by_cospan.contains_key(&(m, e)) {
                    return CheckOutcome::Fail(format!(
                        "cospan ({}, {}) has no filler",
                        hor.id, ver.id
                    ));
                }
            }
        }
        CheckOutcome::Pass
    }

    fn validate_category(
        &self,
        arrows: &[Arrow],
        identities: &[usize],
        comp: &HashMap<(usize, usize), usize>,
        kind: &str,
    ) -> Vec<String> {
        let mut violations = Vec::new();
        for f in 0..arrows.len() {
            for g in 0..arrows.len() {
                let composable = arrows[f].tgt == arrows[g].src;
                match comp.get(&(f, g)) {
                    Some(&h) => {
                        if !composable {
                            violations.push(format!(
                                "{kind}: composite defined for non-composable ({}, {})",
                                arrows[f].id, arrows[g].id
                            ));
                        } else if arrows[h].src != arrows[f].src || arrows[h].tgt != arrows[g].tgt {
                            violations.push(format!(
                                "{kind}: composite of ({}, {}) has wrong endpoints",
                                arrows[f].id, arrows[g].id
                            ));
                        }
                    }
                    None => {
                        if composable {
                            violations.push(format!(
                                "{kind}: missing composite for ({}, {})",
                                arrows[f].id, arrows[g].id
                            ));
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            return violations;
        }
        for f in 0..arrows.len() {
            let id_src = identities[arrows[f].src];
            let id_tgt = identities[arrows[f].tgt];
            if comp[&(id_src, f)] != f || comp[&(f, id_tgt)] != f {
                violations.push(format!("{kind}: identity law fails at {}", arrows[f].id));
            }
        }
        for f in 0..arrows.len() {
            for g in 0..arrows.len() {
                if arrows[f].tgt != arrows[g].src {
                    continue;
                }
                for h in 0..arrows.len() {
                    if arrows[g].tgt != arrows[h].src {
                        continue;
                    }
                    if comp[&(comp[&(f, g)], h)] != comp[&(f, comp[&(g, h)])] {
                        violations.push(format!(
                            "{kind}: associativity fails at ({}, {}, {})",
                            arrows[f].id, arrows[g].id, arrows[h].id
                        ));
                    }
                }
            }
        }
        violations
    }

    /// Checks both category structures, square corner consistency, and,
    /// once stability holds, identity squares and the interchange law on
    /// every composable 2x2 grid (with composition derived from stability).
    pub fn validate(&self) -> Vec<String> {
        let mut violations = self.validate_category(&self.hor, &self.hor_id, &self.hor_comp, "horizontal");
        violations.extend(self.validate_category(&self.ver, &self.ver_id, &self.ver_comp, "vertical"));
        for sq in &self.squares {
            let (top, bottom) = (&self.hor[sq.top], &self.hor[sq.bottom]);
            let (left, right) = (&self.ver[sq.left], &self.ver[sq.right]);
            if top.src != left.src
                || top.tgt != right.src
                || left.tgt != bottom.src
                || right.tgt != bottom.tgt
            {
                violations.push(format!("square {}: boundary corners disagree", sq.id));
            }
        }
        if !violations.is_empty() {
            return violations;
        }
        match self.check_stable() {
            CheckOutcome::Fail(witness) => violations.push(format!("stability: {witness}")),
            CheckOutcome::Pass => {
                for f in 0..self.hor.len() {
                    if let Err(e) = self.identity_square_on_hor(f) {
                        violations.push(e.to_string());
                    }
                }
                for e in 0..self.ver.len() {
                    if let Err(err) = self.identity_square_on_ver(e) {
                        violations.push(err.to_string());
                    }
                }
                violations.extend(self.validate_interchange());
            }
        }
        violations
    }

    /// For every 2x2 grid of composable squares, composing rows first and
    /// columns first must agree.
    fn validate_interchange(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut by_left: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut by_top: HashMap<usize, Vec<usize>> = HashMap::new();
        for (q, sq) in self.squares.iter().enumerate() {
            by_left.entry(sq.left).or_default().push(q);
            by_top.entry(sq.top).or_default().push(q);
        }
        let empty = Vec::new();
        for a in 0..self.squares.len() {
            for &b in by_left.get(&self.squares[a].right).unwrap_or(&empty) {
                for &c in by_top.get(&self.squares[a].bottom).unwrap_or(&empty) {
                    for &d in by_top.get(&self.squares[b].bottom).unwrap_or(&empty) {
                        if self.squares[d].left != self.squares[c].right {
                            continue;
                        }
                        let rows_first = self
                            .compose_squares_h(a, b)
                            .and_then(|ab| {
                                let cd = self.compose_squares_h(c, d)?;
                                self.compose_squares_v(ab, cd)
                            });
                        let columns_first = self
                            .compose_squares_v(a, c)
                            .and_then(|ac| {
                                let bd = self.compose_squares_v(b, d)?;
                                self.compose_squares_h(ac, bd)
                            });
                        match (rows_first, columns_first) {
                            (Ok(x), Ok(y)) if x == y => {}
                            (Ok(_), Ok(_)) => violations.push(format!(
                                "interchange fails on grid ({}, {}; {}, {})",
                                self.squares[a].id,
                                self.squares[b].id,
                                self.squares[c].id,
                                self.squares[d].id
                            )),
                            (Err(e), _) | (_, Err(e)) => violations.push(format!(
                                "interchange grid ({}, {}; {}, {}): {e}",
                                self.squares[a].id,
                                self.squares[b].id,
                                self.squares[c].id,
                                self.squares[d].id
                            )),
                        }
                    }
                }
            }
        }
        violations
    }

    /// The walking square: objects `*`, `01`, `02`, `12` (the diagonal zero
    /// objects collapsed to the single point), one non-identity square, and
    /// the identity squares stability forces.
    pub fn w2() -> Self {
        let objects: Vec<String> = ["*", "01", "02", "12"].map(String::from).to_vec();
        let non_id_hor = [("*", "01"), ("*", "02"), ("*", "12"), ("01", "02")];
        let non_id_ver = [("01", "*"), ("02", "12"), ("02", "*"), ("12", "*")];
        let mut hor: Vec<(String, String, String)> = objects
            .iter()
            .map(|o| (format!("h:id:{o}"), o.clone(), o.clone()))
            .collect();
        hor.extend(
            non_id_hor
                .iter()
                .map(|(s, t)| (format!("h:{s}>{t}"), s.to_string(), t.to_string())),
        );
        let mut ver: Vec<(String, String, String)> = objects
            .iter()
            .map(|o| (format!("v:id:{o}"), o.clone(), o.clone()))
            .collect();
        ver.extend(
            non_id_ver
                .iter()
                .map(|(s, t)| (format!("v:{s}>{t}"), s.to_string(), t.to_string())),
        );
        let hor_id: BTreeMap<String, String> = objects
            .iter()
            .map(|o| (o.clone(), format!("h:id:{o}")))
            .collect();
        let ver_id: BTreeMap<String, String> = objects
            .iter()
            .map(|o| (o.clone(), format!("v:id:{o}")))
            .collect();
        // saturate the composition tables: identities compose trivially and
        // the only non-identity composites are *>01 then 01>02, and
        // 02>12 then 12>*
        let saturate = |arrows: &[(String, String, String)],
                        ids: &BTreeMap<String, String>,
                        extra: &[(&str, &str, &str)]| {
            let mut comp = Vec::new();
            for (f, fs, ft) in arrows {
                for (g, gs, gt) in arrows {
                    if ft != gs {
                        continue;
                    }
                    if f == &ids[fs] {
                        comp.push((f.clone(), g.clone(), g.clone()));
                    } else if g == &ids[gt] {
                        comp.push((f.clone(), g.clone(), f.clone()));
                    }
                }
            }
            comp.extend(
                extra
                    .iter()
                    .map(|(f, g, h)| (f.to_string(), g.to_string(), h.to_string())),
            );
            comp
        };
        let hor_comp = saturate(&hor, &hor_id, &[("h:*>01", "h:01>02", "h:*>02")]);
        let ver_comp = saturate(&ver, &ver_id, &[("v:02>12", "v:12>*", "v:02>*")]);
        let mut squares = Vec::new();
        for o in &objects {
            squares.push((
                format!("sq:id:{o}"),
                format!("h:id:{o}"),
                format!("h:id:{o}"),
                format!("v:id:{o}"),
                format!("v:id:{o}"),
            ));
        }
        for (s, t) in non_id_hor {
            squares.push((
                format!("sq:h:{s}>{t}"),
                format!("h:{s}>{t}"),
                format!("h:{s}>{t}"),
                format!("v:id:{s}"),
                format!("v:id:{t}"),
            ));
        }
        for (s, t) in non_id_ver {
            squares.push((
                format!("sq:v:{s}>{t}"),
                format!("h:id:{s}"),
                format!("h:id:{t}"),
                format!("v:{s}>{t}"),
                format!("v:{s}>{t}"),
            ));
        }
        squares.push((
            "sq:main".into(),
            "h:01>02".into(),
            "h:*>12".into(),
            "v:01>*".into(),
            "v:02>12".into(),
        ));
        DoubleCategory::new(
            objects,
            Some("*".into()),
            hor,
            ver,
            hor_id,
            ver_id,
            hor_comp,
            ver_comp,
            squares,
        )
        .expect("the walking square assembles")
    }

    /// Reads the JSON double-category format (see the crate guide).
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| SegalError::InvalidInput("double category must be a JSON object".into()))?;
        let str_list = |key: &str| -> Result<Vec<String>> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| SegalError::InvalidInput(format!("needs a \"{key}\" array")))?
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(String::from)
                        .ok_or_else(|| SegalError::InvalidInput(format!("{key} entries must be strings")))
                })
                .collect()
        };
        let arrow_list = |key: &str| -> Result<Vec<(String, String, String)>> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| SegalError::InvalidInput(format!("needs a \"{key}\" array")))?
                .iter()
                .map(|v| {
                    let id = v.get("id").and_then(Value::as_str);
                    let src = v.get("src").and_then(Value::as_str);
                    let tgt = v.get("tgt").and_then(Value::as_str);
                    match (id, src, tgt) {
                        (Some(id), Some(src), Some(tgt)) => {
                            Ok((id.to_string(), src.to_string(), tgt.to_string()))
                        }
                        _ => Err(SegalError::InvalidInput(format!(
                            "{key} entries need string \"id\", \"src\", \"tgt\""
                        ))),
                    }
                })
                .collect()
        };
        let triple_list = |key: &str| -> Result<Vec<(String, String, String)>> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| SegalError::InvalidInput(format!("needs a \"{key}\" array")))?
                .iter()
                .map(|v| {
                    v.as_array()
                        .filter(|a| a.len() == 3)
                        .and_then(|a| {
                            a.iter()
                                .map(|x| x.as_str().map(String::from))
                                .collect::<Option<Vec<_>>>()
                        })
                        .map(|t| (t[0].clone(), t[1].clone(), t[2].clone()))
                        .ok_or_else(|| {
                            SegalError::InvalidInput(format!("{key} entries must be [f, g, h]"))
                        })
                })
                .collect()
        };
        let id_table = |key: &str| -> Result<BTreeMap<String, String>> {
            obj.get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| SegalError::InvalidInput(format!("needs a \"{key}\" object")))?
                .iter()
                .map(|(k, v)| {
                    v.as_str()
                        .map(|s| (k.clone(), s.to_string()))
                        .ok_or_else(|| SegalError::InvalidInput(format!("{key} values must be strings")))
                })
                .collect()
        };
        let squares = obj
            .get("squares")
            .and_then(Value::as_array)
            .ok_or_else(|| SegalError::InvalidInput("needs a \"squares\" array".into()))?
            .iter()
            .map(|v| {
                let get = |k: &str| v.get(k).and_then(Value::as_str).map(String::from);
                match (get("id"), get("top"), get("bottom"), get("left"), get("right")) {
                    (Some(id), Some(t), Some(b), Some(l), Some(r)) => Ok((id, t, b, l, r)),
                    _ => Err(SegalError::InvalidInput(
                        "squares entries need string id/top/bottom/left/right".into(),
                    )),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let point = match obj.get("point") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| SegalError::InvalidInput("\"point\" must be a string".into()))?,
            ),
        };
        DoubleCategory::new(
            str_list("objects")?,
            point,
            arrow_list("hor")?,
            arrow_list("ver")?,
            id_table("hor_id")?,
            id_table("ver_id")?,
            triple_list("hor_comp")?,
            triple_list("ver_comp")?,
            squares,
        )
    }

    pub fn to_json(&self) -> Value {
        let arrow_json = |arrows: &[Arrow]| -> Vec<Value> {
            arrows
                .iter()
                .map(|a| {
                    json!({"id": a.id, "src": self.objects[a.src], "tgt": self.objects[a.tgt]})
                })
                .collect()
        };
        let comp_json = |comp: &HashMap<(usize, usize), usize>, arrows: &[Arrow]| -> Vec<Value> {
            let mut entries: Vec<[&String; 3]> = comp
                .iter()
                .map(|(&(f, g), &h)| [&arrows[f].id, &arrows[g].id, &arrows[h].id])
                .collect();
            entries.sort();
            entries.into_iter().map(|e| json!(e)).collect()
        };
        let id_json = |ids: &[usize], arrows: &[Arrow]| -> Value {
            let map: BTreeMap<&String, &String> = ids
                .iter()
                .enumerate()
                .map(|(o, &m)| (&self.objects[o], &arrows[m].id))
                .collect();
            json!(map)
        };
        json!({
            "objects": self.objects,
            "point": self.point.map(|p| &self.objects[p]),
            "hor": arrow_json(&self.hor),
            "ver": arrow_json(&self.ver),
            "hor_id": id_json(&self.hor_id, &self.hor),
            "ver_id": id_json(&self.ver_id, &self.ver),
            "hor_comp": comp_json(&self.hor_comp, &self.hor),
            "ver_comp": comp_json(&self.ver_comp, &self.ver),
            "squares": self.squares.iter().map(|sq| json!({
                "id": sq.id,
                "top": self.hor[sq.top].id,
                "bottom": self.hor[sq.bottom].id,
                "left": self.ver[sq.left].id,
                "right": self.ver[sq.right].id,
            })).collect::<Vec<_>>(),
        })
    }
}

/// One simplex of the S-construction: the triangular grid of objects
/// `a_{ij}` (`i < j`; the diagonal is the point), horizontal arrows
/// `a_{ij} -> a_{i,j+1}`, vertical arrows `a_{ij} -> a_{i+1,j}`, and a
/// square per unit cell. All values are indices into the ambient double
/// category.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Staircase {
    pub n: usize,
    /// `a_{ij}` for `0 <= i < j <= n`.
    pub objects: BTreeMap<(usize, usize), usize>,
    /// `h_{ij}: a_{ij} -> a_{i,j+1}` for `0 <= i <= j < n` (`h_{ii}` leaves the point).
    pub hor: BTreeMap<(usize, usize), usize>,
    /// `v_{ij}: a_{ij} -> a_{i+1,j}` for `0 <= i < j <= n` (`v_{j-1,j}` hits the point).
    pub ver: BTreeMap<(usize, usize), usize>,
    /// Cell squares for `0 <= i < j < n`, bounded by `h_{ij}`, `h_{i+1,j}`,
    /// `v_{ij}`, `v_{i,j+1}`.
    pub squares: BTreeMap<(usize, usize), usize>,
}

impl Staircase {
    fn empty(n: usize) -> Self {
        Staircase {
            n,
            objects: BTreeMap::new(),
            hor: BTreeMap::new(),
            ver: BTreeMap::new(),
            squares: BTreeMap::new(),
        }
    }

    fn object_at(&self, point: usize, i: usize, j: usize) -> usize {
        if i == j {
            point
        } else {
            self.objects[&(i, j)]
        }
    }

    fn descriptor(&self, d: &DoubleCategory) -> Descriptor {
        let objects: Vec<Value> = self
            .objects
            .iter()
            .map(|(&(i, j), &o)| json!([i, j, d.objects[o]]))
            .collect();
        let hor: Vec<Value> = self
            .hor
            .iter()
            .map(|(&(i, j), &m)| json!([i, j, d.hor[m].id]))
            .collect();
        let ver: Vec<Value> = self
            .ver
            .iter()
            .map(|(&(i, j), &m)| json!([i, j, d.ver[m].id]))
            .collect();
        let squares: Vec<Value> = self
            .squares
            .iter()
            .map(|(&(i, j), &q)| json!([i, j, d.squares[q].id]))
            .collect();
        Descriptor::new(&json!({
            "n": self.n,
            "objects": objects,
            "hor": hor,
            "ver": ver,
            "squares": squares,
        }))
    }
}

/// The unique horizontal arrow out of the point and vertical arrow into it,
/// per object.
struct PointMaps {
    point: usize,
    from_point: Vec<usize>,
    to_point: Vec<usize>,
}

impl DoubleCategory {
    fn point_maps(&self) -> Result<PointMaps> {
        match self.check_pointed()? {
            CheckOutcome::Pass => {}
            CheckOutcome::Fail(witness) => {
                return Err(SegalError::InvalidInput(format!(
                    "double category is not pointed: {witness}"
                )));
            }
        }
        let point = self.point.expect("check_pointed needs a point");
        let mut from_point = vec![usize::MAX; self.objects.len()];
        let mut to_point = vec![usize::MAX; self.objects.len()];
        for (m, a) in self.hor.iter().enumerate() {
            if a.src == point {
                from_point[a.tgt] = m;
            }
        }
        for (m, a) in self.ver.iter().enumerate() {
            if a.tgt == point {
                to_point[a.src] = m;
            }
        }
        Ok(PointMaps {
            point,
            from_point,
            to_point,
        })
    }

    /// Grows the staircase determined by a top row: the left column arrows
    /// come from pointedness and every cell is the stability filler of its
    /// source span.
    fn fill_staircase(&self, pm: &PointMaps, first: usize, rest: &[usize]) -> Result<Staircase> {
        let n = rest.len() + 1;
        let mut st = Staircase::empty(n);
        st.objects.insert((0, 1), first);
        st.hor.insert((0, 0), pm.from_point[first]);
        let mut cursor = first;
        for (offset, &h) in rest.iter().enumerate() {
            if self.hor[h].src != cursor {
                return Err(SegalError::InvalidInput(format!(
                    "top row is not composable at {}",
                    self.hor[h].id
                )));
            }
            cursor = self.hor[h].tgt;
            st.hor.insert((0, offset + 1), h);
            st.objects.insert((0, offset + 2), cursor);
        }
        for i in 0..n {
            let edge_object = st.object_at(pm.point, i, i + 1);
            st.ver.insert((i, i + 1), pm.to_point[edge_object]);
            for j in (i + 1)..n {
                let q = self.fill_span(st.hor[&(i, j)], st.ver[&(i, j)])?;
                let sq = &self.squares[q];
                st.squares.insert((i, j), q);
                st.hor.insert((i + 1, j), sq.bottom);
                st.ver.insert((i, j + 1), sq.right);
                st.objects.insert((i + 1, j + 1), self.hor[sq.bottom].tgt);
            }
        }
        self.validate_staircase(&st)?;
        Ok(st)
    }

    /// Checks index shape, arrow endpoints against the grid objects, and
    /// that every cell square genuinely has the four bounding arrows.
    fn validate_staircase(&self, st: &Staircase) -> Result<()> {
        let point = self
            .point
            .ok_or_else(|| SegalError::InvalidInput("no point designated".into()))?;
        let n = st.n;
        let fail = |msg: String| Err(SegalError::InvalidInput(format!("staircase: {msg}")));
        let expect_keys = |map: &BTreeMap<(usize, usize), usize>,
                           wanted: Vec<(usize, usize)>,
                           what: &str|
         -> Result<()> {
            let got: Vec<(usize, usize)> = map.keys().copied().collect();
            if got != wanted {
                return Err(SegalError::InvalidInput(format!(
                    "staircase: {what} entries at {got:?}, expected {wanted:?}"
                )));
            }
            Ok(())
        };
        let mut object_keys = Vec::new();
        let mut hor_keys = Vec::new();
        let mut ver_keys = Vec::new();
        let mut square_keys = Vec::new();
        for i in 0..=n {
            for j in (i + 1)..=n {
                object_keys.push((i, j));
            }
        }
        for i in 0..n {
            for j in i..n {
                hor_keys.push((i, j));
            }
        }
        for i in 0..n {
            for j in (i + 1)..=n {
                ver_keys.push((i, j));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                square_keys.push((i, j));
            }
        }
        expect_keys(&st.objects, object_keys, "object")?;
        expect_keys(&st.hor, hor_keys, "horizontal")?;
        expect_keys(&st.ver, ver_keys, "vertical")?;
        expect_keys(&st.squares, square_keys, "square")?;
        for (&(i, j), &m) in &st.hor {
            let arrow = &self.hor[m];
            if arrow.src != st.object_at(point, i, j) || arrow.tgt != st.object_at(point, i, j + 1)
            {
                return fail(format!("horizontal arrow at ({i}, {j}) has wrong endpoints"));
            }
        }
        for (&(i, j), &m) in &st.ver {
            let arrow = &self.ver[m];
            if arrow.src != st.object_at(point, i, j)
                || arrow.tgt != st.object_at(point, i + 1, j)
            {
                return fail(format!("vertical arrow at ({i}, {j}) has wrong endpoints"));
            }
        }
        for (&(i, j), &q) in &st.squares {
            let sq = &self.squares[q];
            if sq.top != st.hor[&(i, j)]
                || sq.bottom != st.hor[&(i + 1, j)]
                || sq.left != st.ver[&(i, j)]
                || sq.right != st.ver[&(i, j + 1)]
            {
                return fail(format!("cell square at ({i}, {j}) has wrong boundary"));
            }
        }
        Ok(())
    }

    /// All level-`n` staircases, enumerated by their top rows.
    fn staircases(&self, pm: &PointMaps, n: usize) -> Result<Vec<Staircase>> {
        if n == 0 {
            return Ok(vec![Staircase::empty(0)]);
        }
        let mut by_src: HashMap<usize, Vec<usize>> = HashMap::new();
        for (m, a) in self.hor.iter().enumerate() {
            by_src.entry(a.src).or_default().push(m);
        }
        let mut out = Vec::new();
        let empty = Vec::new();
        let mut stack: Vec<(usize, Vec<usize>)> =
            (0..self.objects.len()).map(|a| (a, Vec::new())).collect();
        while let Some((first, rest)) = stack.pop() {
            if rest.len() + 1 == n {
                out.push(self.fill_staircase(pm, first, &rest)?);
                continue;
            }
            let cursor = rest
                .last()
                .map(|&h| self.hor[h].tgt)
                .unwrap_or(first);
            for &h in by_src.get(&cursor).unwrap_or(&empty) {
                let mut longer = rest.clone();
                longer.push(h);
                stack.push((first, longer));
            }
        }
        Ok(out)
    }

    /// Face of a staircase along `d_t`: delete row and column `t`, composing
    /// arrows and cell squares across the gap.
    fn staircase_face(&self, st: &Staircase, t: usize) -> Result<Staircase> {
        let m = st.n - 1;
        let phi = |x: usize| if x < t { x } else { x + 1 };
        let mut out = Staircase::empty(m);
        for k in 0..m {
            for l in (k + 1)..=m {
                out.objects.insert((k, l), st.objects[&(phi(k), phi(l))]);
            }
        }
        for k in 0..m {
            for l in k..m {
                let (i, j) = (phi(k), phi(l));
                let h = if phi(l + 1) == j + 1 {
                    st.hor[&(i, j)]
                } else {
                    self.hor_composite(st.hor[&(i, j)], st.hor[&(i, j + 1)])?
                };
                out.hor.insert((k, l), h);
            }
        }
        for k in 0..m {
            for l in (k + 1)..=m {
                let (i, j) = (phi(k), phi(l));
                let v = if phi(k + 1) == i + 1 {
                    st.ver[&(i, j)]
                } else {
                    self.ver_composite(st.ver[&(i, j)], st.ver[&(i + 1, j)])?
                };
                out.ver.insert((k, l), v);
            }
        }
        for k in 0..m {
            for l in (k + 1)..m {
                let (i, j) = (phi(k), phi(l));
                let row_gap = phi(k + 1) - i;
                let column_gap = phi(l + 1) - j;
                let q = match (row_gap, column_gap) {
                    (1, 1) => st.squares[&(i, j)],
                    (1, 2) => {
                        self.compose_squares_h(st.squares[&(i, j)], st.squares[&(i, j + 1)])?
                    }
                    (2, 1) => {
                        self.compose_squares_v(st.squares[&(i, j)], st.squares[&(i + 1, j)])?
                    }
                    // a single deleted index cannot fall in two disjoint gaps
                    _ => unreachable!("face skips one index"),
                };
                out.squares.insert((k, l), q);
            }
        }
        self.validate_staircase(&out)?;
        Ok(out)
    }

    /// Degeneracy of a staircase along `s_t`: duplicate row and column `t`,
    /// padding with identity arrows and identity squares.
    fn staircase_degeneracy(&self, st: &Staircase, t: usize) -> Result<Staircase> {
        let point = self
            .point
            .ok_or_else(|| SegalError::InvalidInput("no point designated".into()))?;
        let m = st.n + 1;
        let psi = |x: usize| if x <= t { x } else { x - 1 };
        let mut out = Staircase::empty(m);
        for k in 0..m {
            for l in (k + 1)..=m {
                let (i, j) = (psi(k), psi(l));
                let o = if i == j {
                    point
                } else {
                    st.objects[&(i, j)]
                };
                out.objects.insert((k, l), o);
            }
        }
        for k in 0..m {
            for l in k..m {
                let h = if psi(l + 1) == psi(l) {
                    self.hor_id[out.object_at(point, k, l)]
                } else {
                    st.hor[&(psi(k), psi(l))]
                };
                out.hor.insert((k, l), h);
            }
        }
        for k in 0..m {
            for l in (k + 1)..=m {
                let v = if psi(k + 1) == psi(k) {
                    self.ver_id[out.object_at(point, k, l)]
                } else {
                    st.ver[&(psi(k), psi(l))]
                };
                out.ver.insert((k, l), v);
            }
        }
        for k in 0..m {
            for l in (k + 1)..m {
                let row_collapsed = psi(k + 1) == psi(k);
                let column_collapsed = psi(l + 1) == psi(l);
                let q = match (row_collapsed, column_collapsed) {
                    (true, _) => self.identity_square_on_hor(out.hor[&(k, l)])?,
                    (false, true) => self.identity_square_on_ver(out.ver[&(k, l)])?,
                    (false, false) => st.squares[&(psi(k), psi(l))],
                };
                out.squares.insert((k, l), q);
            }
        }
        self.validate_staircase(&out)?;
        Ok(out)
    }
}

/// The discrete S-construction of a pointed stable double category: level
/// `n` holds the staircase diagrams with `n` columns. The output is reduced
/// and 2-Segal.
pub fn s_construction(d: &DoubleCategory, truncation: usize) -> Result<TruncatedSimplicialSet> {
    let violations = d.validate();
    if let Some(first) = violations.first() {
        return Err(SegalError::InvalidInput(format!(
            "double category fails validation: {first}"
        )));
    }
    let pm = d.point_maps()?;
    let levels: Vec<Vec<Staircase>> = (0..=truncation)
        .map(|n| d.staircases(&pm, n))
        .collect::<Result<_>>()?;
    assemble(
        truncation,
        format!("s-construction({} objects)", d.objects.len()),
        levels,
        |_, st| st.descriptor(d),
        |_, i, st| {
            d.staircase_face(st, i)
                .expect("faces of staircases compose in a validated double category")
        },
        |_, i, st| {
            d.staircase_degeneracy(st, i)
                .expect("degeneracies of staircases exist in a validated double category")
        },
    )
}

/// The double category of a 2-Segal set: objects are 1-simplices, both
/// morphism sorts are 2-simplices (horizontally `d_2 -> d_1`, vertically
/// `d_1 -> d_0`), squares are 3-simplices, and both compositions invert
/// outer-face bijections that the 2-Segal condition makes invertible.
pub fn p_construction(x: &TruncatedSimplicialSet) -> Result<DoubleCategory> {
    if x.truncation() < 3 {
        return Err(SegalError::TruncationTooSmall {
            truncation: x.truncation(),
            needed: 3,
        });
    }
    let label_of = |id: SimplexId| x.descriptor(id).as_str().to_string();
    let objects: Vec<String> = x.simplices(1).map(label_of).collect();
    let hor: Vec<(String, String, String)> = x
        .simplices(2)
        .map(|t| (label_of(t), label_of(x.face(2, t)), label_of(x.face(1, t))))
        .collect();
    let ver: Vec<(String, String, String)> = x
        .simplices(2)
        .map(|t| (label_of(t), label_of(x.face(1, t)), label_of(x.face(0, t))))
        .collect();
    let hor_id: BTreeMap<String, String> = x
        .simplices(1)
        .map(|e| (label_of(e), label_of(x.degeneracy(1, e))))
        .collect();
    let ver_id: BTreeMap<String, String> = x
        .simplices(1)
        .map(|e| (label_of(e), label_of(x.degeneracy(0, e))))
        .collect();

    // target/source face indices per sort: horizontally f: d_2 -> d_1 meets
    // g when d_1 f = d_2 g; vertically when d_0 f = d_1 g
    let compositions = |outer: usize,
                        inner: usize,
                        composite: usize,
                        tgt_face: usize,
                        src_face: usize,
                        name: &str|
     -> Result<Vec<(String, String, String)>> {
        // index 3-simplices by the pair of faces the pair of morphisms must hit
        let mut index: HashMap<(usize, usize), Vec<SimplexId>> = HashMap::new();
        for tau in x.simplices(3) {
            index
                .entry((x.face(outer, tau).index, x.face(inner, tau).index))
                .or_default()
                .push(tau);
        }
        let mut table = Vec::new();
        for f in x.simplices(2) {
            for g in x.simplices(2) {
                if x.face(tgt_face, f) != x.face(src_face, g) {
                    continue;
                }
                match index.get(&(f.index, g.index)).map(Vec::as_slice) {
                    Some([tau]) => {
                        table.push((
                            label_of(f),
                            label_of(g),
                            label_of(x.face(composite, *tau)),
                        ));
                    }
                    other => {
                        return Err(SegalError::BijectionFailed {
                            map: format!("{name}: X_3 -> X_2 x_{{X_1}} X_2"),
                            reason: format!(
                                "pair ({}, {}) has {} preimages",
                                x.descriptor(f),
                                x.descriptor(g),
                                other.map_or(0, <[SimplexId]>::len)
                            ),
                        });
                    }
                }
            }
        }
        Ok(table)
    };
    let hor_comp = compositions(3, 1, 2, 1, 2, "(d_3, d_1)")?;
    let ver_comp = compositions(2, 0, 1, 0, 1, "(d_2, d_0)")?;

    let squares: Vec<(String, String, String, String, String)> = x
        .simplices(3)
        .map(|tau| {
            (
                label_of(tau),
                label_of(x.face(1, tau)),
                label_of(x.face(0, tau)),
                label_of(x.face(3, tau)),
                label_of(x.face(2, tau)),
            )
        })
        .collect();
    let point = if x.is_reduced() {
        Some(label_of(x.degeneracy(0, x.basepoint()?)))
    } else {
        None
    };
    DoubleCategory::new(
        objects, point, hor, ver, hor_id, ver_id, hor_comp, ver_comp, squares,
    )
}

/// The staircase a simplex induces: objects are its edge faces, arrows and
/// squares its 2- and 3-dimensional faces along consecutive vertex windows.
fn staircase_of_simplex(
    x: &TruncatedSimplicialSet,
    sigma: SimplexId,
) -> Result<Staircase> {
    let n = sigma.level;
    let mut st = Staircase::empty(n);
    let extract = |values: Vec<usize>| -> Result<usize> {
        let op = crate::simplicial::MonotoneMap::new(n, values)?;
        Ok(x.apply_operator(&op, sigma)?.index)
    };
    for i in 0..n {
        for j in (i + 1)..=n {
            let o = extract(vec![i, j])?;
            st.objects.insert((i, j), o);
        }
    }
    for i in 0..n {
        for j in i..n {
            let h = extract(vec![i, j, j + 1])?;
            st.hor.insert((i, j), h);
        }
    }
    for i in 0..n {
        for j in (i + 1)..=n {
            let v = extract(vec![i, i + 1, j])?;
            st.ver.insert((i, j), v);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let q = extract(vec![i, i + 1, j, j + 1])?;
            st.squares.insert((i, j), q);
        }
    }
    Ok(st)
}

/// A verified levelwise bijection from a reduced 2-Segal set to the
/// S-construction of its double category.
pub struct UnitComparison {
    pub double_category: DoubleCategory,
    pub s_of_p: TruncatedSimplicialSet,
    pub map: LevelwiseMap,
}

pub fn unit_comparison(x: &TruncatedSimplicialSet) -> Result<UnitComparison> {
    let d = p_construction(x)?;
    let s = s_construction(&d, x.truncation())?;
    let mut levels = Vec::with_capacity(x.truncation() + 1);
    for n in 0..=x.truncation() {
        let mut row = Vec::with_capacity(x.level_size(n));
        for sigma in x.simplices(n) {
            let st = staircase_of_simplex(x, sigma)?;
            let descriptor = st.descriptor(&d);
            let target = s.id_by_descriptor(n, &descriptor).ok_or_else(|| {
                SegalError::BijectionFailed {
                    map: format!("unit comparison at level {n}"),
                    reason: format!(
                        "the staircase of {} is not an S-construction simplex",
                        x.descriptor(sigma)
                    ),
                }
            })?;
            row.push(target.index);
        }
        levels.push(row);
    }
    let map = LevelwiseMap { levels };
    if !map.is_levelwise_bijection(&s) {
        return Err(SegalError::BijectionFailed {
            map: "unit comparison".into(),
            reason: "not a levelwise bijection".into(),
        });
    }
    if let Err(failure) = map.check_simplicial(x, &s) {
        return Err(SegalError::BijectionFailed {
            map: "unit comparison".into(),
            reason: format!("does not commute with structure maps: {failure:?}"),
        });
    }
    Ok(UnitComparison {
        double_category: d,
        s_of_p: s,
        map,
    })
}

/// A verified double-category isomorphism from `D` to the double category
/// of its S-construction.
pub struct CounitComparison {
    pub s_set: TruncatedSimplicialSet,
    pub p_of_s: DoubleCategory,
    pub object_map: Vec<usize>,
    pub hor_map: Vec<usize>,
    pub ver_map: Vec<usize>,
    pub square_map: Vec<usize>,
}

pub fn counit_comparison(d: &DoubleCategory) -> Result<CounitComparison> {
    let s = s_construction(d, 3)?;
    let pd = p_construction(&s)?;
    let pm = d.point_maps()?;
    let fail = |what: &str, detail: String| SegalError::BijectionFailed {
        map: format!("counit comparison on {what}"),
        reason: detail,
    };

    let locate = |level: usize, st: &Staircase, what: &str| -> Result<usize> {
        s.id_by_descriptor(level, &st.descriptor(d))
            .map(|id| id.index)
            .ok_or_else(|| fail(what, "image staircase is not an S-construction simplex".into()))
    };

    // objects map to one-column staircases
    let mut object_map = Vec::with_capacity(d.objects.len());
    for a in 0..d.objects.len() {
        let mut st = Staircase::empty(1);
        st.objects.insert((0, 1), a);
        st.hor.insert((0, 0), pm.from_point[a]);
        st.ver.insert((0, 1), pm.to_point[a]);
        d.validate_staircase(&st)?;
        object_map.push(locate(1, &st, "objects")?);
    }
    // horizontal morphisms map to the two-column staircase with that top row
    let mut hor_map = Vec::with_capacity(d.hor.len());
    for f in 0..d.hor.len() {
        let st = d.fill_staircase(&pm, d.hor[f].src, &[f])?;
        hor_map.push(locate(2, &st, "horizontal morphisms")?);
    }
    // vertical morphisms map to the two-column staircase whose right column
    // is the arrow, recovered from its target cospan
    let mut ver_map = Vec::with_capacity(d.ver.len());
    for e in 0..d.ver.len() {
        let (x_obj, y_obj) = (d.ver[e].src, d.ver[e].tgt);
        let q = d.fill_cospan(pm.from_point[y_obj], e)?;
        let sq = &d.squares[q];
        let mut st = Staircase::empty(2);
        st.objects.insert((0, 1), d.hor[sq.top].src);
        st.objects.insert((0, 2), x_obj);
        st.objects.insert((1, 2), y_obj);
        st.hor.insert((0, 0), pm.from_point[d.hor[sq.top].src]);
        st.hor.insert((0, 1), sq.top);
        st.hor.insert((1, 1), pm.from_point[y_obj]);
        st.ver.insert((0, 1), sq.left);
        st.ver.insert((0, 2), e);
        st.ver.insert((1, 2), pm.to_point[y_obj]);
        st.squares.insert((0, 1), q);
        d.validate_staircase(&st)?;
        ver_map.push(locate(2, &st, "vertical morphisms")?);
    }
    // squares map to three-column staircases with the square in cell (0, 2)
    let mut square_map = Vec::with_capacity(d.squares.len());
    for q in 0..d.squares.len() {
        let sq = d.squares[q].clone();
        let (x_obj, y_obj) = (d.hor[sq.top].src, d.hor[sq.top].tgt);
        let (z_obj, w_obj) = (d.hor[sq.bottom].src, d.hor[sq.bottom].tgt);
        let corner = d.fill_cospan(pm.from_point[z_obj], sq.left)?;
        let corner_sq = d.squares[corner].clone();
        let lower = d.fill_span(sq.bottom, pm.to_point[z_obj])?;
        let lower_sq = d.squares[lower].clone();
        let a01 = d.hor[corner_sq.top].src;
        let a23 = d.hor[lower_sq.bottom].tgt;
        let mut st = Staircase::empty(3);
        st.objects.insert((0, 1), a01);
        st.objects.insert((0, 2), x_obj);
        st.objects.insert((0, 3), y_obj);
        st.objects.insert((1, 2), z_obj);
        st.objects.insert((1, 3), w_obj);
        st.objects.insert((2, 3), a23);
        st.hor.insert((0, 0), pm.from_point[a01]);
        st.hor.insert((0, 1), corner_sq.top);
        st.hor.insert((0, 2), sq.top);
        st.hor.insert((1, 1), pm.from_point[z_obj]);
        st.hor.insert((1, 2), sq.bottom);
        st.hor.insert((2, 2), lower_sq.bottom);
        st.ver.insert((0, 1), corner_sq.left);
        st.ver.insert((0, 2), sq.left);
        st.ver.insert((0, 3), sq.right);
        st.ver.insert((1, 2), pm.to_point[z_obj]);
        st.ver.insert((1, 3), lower_sq.right);
        st.ver.insert((2, 3), pm.to_point[a23]);
        st.squares.insert((0, 1), corner);
        st.squares.insert((0, 2), q);
        st.squares.insert((1, 2), lower);
        d.validate_staircase(&st)?;
        square_map.push(locate(3, &st, "squares")?);
    }

    // bijectivity on each sort
    let check_bijection = |map: &[usize], size: usize, what: &str| -> Result<()> {
        if map.len() != size {
            return Err(fail(what, format!("{} elements against {size}", map.len())));
        }
        let mut seen = vec![false; size];
        for &v in map {
            if std::mem::replace(&mut seen[v], true) {
                return Err(fail(what, "not injective".into()));
            }
        }
        Ok(())
    };
    check_bijection(&object_map, pd.objects.len(), "objects")?;
    check_bijection(&hor_map, pd.hor.len(), "horizontal morphisms")?;
    check_bijection(&ver_map, pd.ver.len(), "vertical morphisms")?;
    check_bijection(&square_map, pd.squares.len(), "squares")?;

    // structure preservation
    if pd.point != Some(object_map[pm.point]) {
        return Err(fail("point", "point is not preserved".into()));
    }
    for f in 0..d.hor.len() {
        let image = &pd.hor[hor_map[f]];
        if image.src != object_map[d.hor[f].src] || image.tgt != object_map[d.hor[f].tgt] {
            return Err(fail("horizontal morphisms", format!("endpoints of {} move", d.hor[f].id)));
        }
    }
    for e in 0..d.ver.len() {
        let image = &pd.ver[ver_map[e]];
        if image.src != object_map[d.ver[e].src] || image.tgt != object_map[d.ver[e].tgt] {
            return Err(fail("vertical morphisms", format!("endpoints of {} move", d.ver[e].id)));
        }
    }
    for a in 0..d.objects.len() {
        if hor_map[d.hor_id[a]] != pd.hor_id[object_map[a]]
            || ver_map[d.ver_id[a]] != pd.ver_id[object_map[a]]
        {
            return Err(fail("identities", format!("identity of {} moves", d.objects[a])));
        }
    }
    for (&(f, g), &h) in &d.hor_comp {
        match pd.hor_comp.get(&(hor_map[f], hor_map[g])) {
            Some(&image) if image == hor_map[h] => {}
            _ => {
                return Err(fail(
                    "horizontal composition",
                    format!("composite of ({}, {}) moves", d.hor[f].id, d.hor[g].id),
                ))
            }
        }
    }
    for (&(f, g), &h) in &d.ver_comp {
        match pd.ver_comp.get(&(ver_map[f], ver_map[g])) {
            Some(&image) if image == ver_map[h] => {}
            _ => {
                return Err(fail(
                    "vertical composition",
                    format!("composite of ({}, {}) moves", d.ver[f].id, d.ver[g].id),
                ))
            }
        }
    }
    for (q, sq) in d.squares.iter().enumerate() {
        let image = &pd.squares[square_map[q]];
        if image.top != hor_map[sq.top]
            || image.bottom != hor_map[sq.bottom]
            || image.left != ver_map[sq.left]
            || image.right != ver_map[sq.right]
        {
            return Err(fail("squares", format!("boundary of {} moves", sq.id)));
        }
    }
    Ok(CounitComparison {
        s_set: s,
        p_of_s: pd,
        object_map,
        hor_map,
        ver_map,
        square_map,
    })
}
