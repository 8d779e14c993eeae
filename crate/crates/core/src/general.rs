//! General models: a family of propositional Kripke models linked by a
//! successor relation. Partial and homogeneous models are the two classes
//! with forcing relations; [`ModalFamily`] runs the homogeneous modal
//! clauses over any base semantics.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kripke::{is_identifier, is_partial_copy, PropModel, WorldId};
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ModelId(String);

impl ModelId {
    pub fn new(name: &str) -> Result<ModelId> {
        if is_identifier(name) {
            Ok(ModelId(name.to_string()))
        } else {
            Err(Error::BadIdentifier(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ModelId {
    fn from(s: &str) -> Self {
        ModelId(s.to_string())
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralModel {
    ids: Vec<ModelId>,
    models: Vec<PropModel>,
    succ: Vec<PointSet>,
}

impl GeneralModel {
    pub fn build<I, J>(submodels: I, succ: J) -> Result<GeneralModel>
    where
        I: IntoIterator<Item = (ModelId, PropModel)>,
        J: IntoIterator<Item = (ModelId, ModelId)>,
    {
        let mut map = BTreeMap::new();
        for (id, m) in submodels {
            if !is_identifier(id.as_str()) {
                return Err(Error::BadIdentifier(id.to_string()));
            }
            if map.contains_key(&id) {
                return Err(Error::Duplicate(id.to_string()));
            }
            map.insert(id, m);
        }
        if map.is_empty() {
            return Err(Error::NoSubmodels);
        }
        let (ids, models): (Vec<_>, Vec<_>) = map.into_iter().unzip();
        let n = ids.len();
        let mut rel = vec![PointSet::empty(n); n];
        for (a, b) in succ {
            let ia = ids
                .binary_search(&a)
                .map_err(|_| Error::UnknownSubmodel(a.to_string()))?;
            let ib = ids
                .binary_search(&b)
                .map_err(|_| Error::UnknownSubmodel(b.to_string()))?;
            rel[ia].insert(ib);
        }
        Ok(GeneralModel {
            ids,
            models,
            succ: rel,
        })
    }

    /// Submodel count.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ModelId] {
        &self.ids
    }

    pub fn index_of(&self, k: &ModelId) -> Option<usize> {
        self.ids.binary_search(k).ok()
    }

    fn require(&self, k: &ModelId) -> Result<usize> {
        self.index_of(k)
            .ok_or_else(|| Error::UnknownSubmodel(k.to_string()))
    }

    pub fn submodel(&self, k: &ModelId) -> Option<&PropModel> {
        self.index_of(k).map(|i| &self.models[i])
    }

    pub fn submodel_at(&self, i: usize) -> &PropModel {
        &self.models[i]
    }

    pub fn submodels(&self) -> impl Iterator<Item = (&ModelId, &PropModel)> {
        self.ids.iter().zip(self.models.iter())
    }

    pub fn successors(&self, i: usize) -> &PointSet {
        &self.succ[i]
    }

    pub fn succ_pairs(&self) -> Vec<(ModelId, ModelId)> {
        let mut out = Vec::new();
        for (a, row) in self.succ.iter().enumerate() {
            for b in row.iter() {
                out.push((self.ids[a].clone(), self.ids[b].clone()));
            }
        }
        out
    }

    pub fn succ_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.succ[i].contains(i))
    }

    pub fn succ_transitive(&self) -> bool {
        (0..self.len()).all(|a| {
            self.succ[a]
                .iter()
                .all(|b| self.succ[b].is_subset(&self.succ[a]))
        })
    }

    /// Every submodel frame has a least world.
    pub fn is_rooted(&self) -> bool {
        self.models.iter().all(|m| m.frame().is_rooted())
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.models.iter().flat_map(|m| m.atoms()).collect()
    }

    /// Total number of (submodel, world) pairs.
    pub fn point_count(&self) -> usize {
        self.models.iter().map(|m| m.frame().len()).sum()
    }

    /// The first submodel every other submodel is a partial copy of.
    pub fn validate_partial(&self) -> Option<ModelId> {
        self.models
            .iter()
            .position(|r| {
                self.models
                    .iter()
                    .all(|m| is_partial_copy(m.frame(), r.frame()))
            })
            .map(|i| self.ids[i].clone())
    }

    pub fn validate_homogeneous(&self) -> bool {
        self.homogeneity_breach().is_none()
    }

    fn homogeneity_breach(&self) -> Option<(ModelId, ModelId)> {
        let first = self.models[0].frame();
        self.models
            .iter()
            .position(|m| !m.frame().same_as(first))
            .map(|i| (self.ids[0].clone(), self.ids[i].clone()))
    }

    fn layout(&self) -> Layout {
        Layout::new(self)
    }
}

/// Flat points `(k, w)` ordered by submodel id, then world id.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Layout {
    points: Vec<(usize, usize)>,
    point_of: Vec<Vec<usize>>,
}

impl Layout {
    fn new(g: &GeneralModel) -> Layout {
        let mut points = Vec::with_capacity(g.point_count());
        let mut point_of = Vec::with_capacity(g.len());
        for (k, m) in g.models.iter().enumerate() {
            let frame = m.frame();
            let mut order: Vec<usize> = (0..frame.len()).collect();
            order.sort_by(|&a, &b| frame.world(a).cmp(frame.world(b)));
            let mut row = vec![0; frame.len()];
            for w in order {
                row[w] = points.len();
                points.push((k, w));
            }
            point_of.push(row);
        }
        Layout { points, point_of }
    }

    fn base(&self, g: &GeneralModel) -> Interpretation {
        let n = self.points.len();
        let mut atoms: BTreeMap<String, PointSet> = BTreeMap::new();
        let mut up = Vec::with_capacity(n);
        for (p, &(k, w)) in self.points.iter().enumerate() {
            let m = &g.models[k];
            for a in m.val(w) {
                atoms
                    .entry(a.clone())
                    .or_insert_with(|| PointSet::empty(n))
                    .insert(p);
            }
            up.push(PointSet::from_points(
                n,
                m.frame().up(w).iter().map(|w2| self.point_of[k][w2]),
            ));
        }
        Interpretation::new(atoms, up)
    }
}

fn locate(g: &GeneralModel, layout: &Layout, k: &ModelId, w: &WorldId) -> Result<usize> {
    let ki = g.require(k)?;
    let wi = g.models[ki].frame().require(w)?;
    Ok(layout.point_of[ki][wi])
}

macro_rules! forcing_api {
    () => {
        pub fn general(&self) -> &GeneralModel {
            &self.general
        }

        pub fn interpretation(&self) -> &Interpretation {
            &self.interp
        }

        /// Flat points in evaluation order.
        pub fn points(&self) -> Vec<(ModelId, WorldId)> {
            self.layout
                .points
                .iter()
                .map(|&(k, w)| {
                    (
                        self.general.ids[k].clone(),
                        self.general.models[k].frame().world(w).clone(),
                    )
                })
                .collect()
        }

        pub fn point_index(&self, k: &ModelId, w: &WorldId) -> Result<usize> {
            locate(&self.general, &self.layout, k, w)
        }

        pub fn forces(&self, k: &ModelId, w: &WorldId, f: &Formula) -> Result<bool> {
            let p = self.point_index(k, w)?;
            self.interp.forces_at(p, f)
        }

        pub fn entails(
            &self,
            k: &ModelId,
            w: &WorldId,
            gamma: &[Formula],
            f: &Formula,
        ) -> Result<bool> {
            let p = self.point_index(k, w)?;
            Ok(self.interp.entailment_set(gamma, f)?.contains(p))
        }

        /// Entailment at every world of one submodel.
        pub fn valid_at_submodel(&self, k: &ModelId, gamma: &[Formula], f: &Formula) -> Result<bool> {
            let ki = self.general.require(k)?;
            let set = self.interp.entailment_set(gamma, f)?;
            Ok(self.layout.point_of[ki].iter().all(|&p| set.contains(p)))
        }

        pub fn valid_in_model(&self, gamma: &[Formula], f: &Formula) -> Result<bool> {
            Ok(self.interp.entailment_set(gamma, f)?.is_full())
        }
    };
}

#[derive(Clone, Debug)]
pub struct PartialModel {
    general: GeneralModel,
    reference: ModelId,
    layout: Layout,
    interp: Interpretation,
}

impl PartialModel {
    /// Uses `reference` when given, otherwise the first valid one.
    pub fn new(general: GeneralModel, reference: Option<ModelId>) -> Result<PartialModel> {
        let reference = match reference {
            Some(r) => {
                let ri = general.require(&r)?;
                let rf = general.models[ri].frame();
                if !general.models.iter().all(|m| is_partial_copy(m.frame(), rf)) {
                    return Err(Error::NotPartial);
                }
                r
            }
            None => general.validate_partial().ok_or(Error::NotPartial)?,
        };
        let layout = general.layout();
        let interp = compile_partial(&general, &layout, &reference);
        Ok(PartialModel {
            general,
            reference,
            layout,
            interp,
        })
    }

    pub fn reference(&self) -> &ModelId {
        &self.reference
    }

    forcing_api!();
}

fn compile_partial(g: &GeneralModel, layout: &Layout, reference: &ModelId) -> Interpretation {
    let n = layout.points.len();
    let rf = g.models[g.index_of(reference).unwrap()].frame();
    // reference index of every world of every submodel
    let to_ref: Vec<Vec<usize>> = g
        .models
        .iter()
        .map(|m| {
            m.frame()
                .worlds()
                .iter()
                .map(|w| rf.index_of(w).unwrap())
                .collect()
        })
        .collect();
    let mut necessity = Vec::with_capacity(n);
    let mut possibility = Vec::with_capacity(n);
    for &(k, w) in &layout.points {
        let rw = to_ref[k][w];
        let name = g.models[k].frame().world(w);
        let mut nec = PointSet::empty(n);
        let mut pos = PointSet::empty(n);
        for k2 in g.succ[k].iter() {
            for (w2, &rw2) in to_ref[k2].iter().enumerate() {
                if rf.leq(rw, rw2) {
                    nec.insert(layout.point_of[k2][w2]);
                }
            }
            if let Some(w2) = g.models[k2].frame().index_of(name) {
                pos.insert(layout.point_of[k2][w2]);
            }
        }
        necessity.push(nec);
        possibility.push(pos);
    }
    layout.base(g).with_modal(necessity, possibility)
}

#[derive(Clone, Debug)]
pub struct HomogeneousModel {
    general: GeneralModel,
    layout: Layout,
    interp: Interpretation,
}

impl HomogeneousModel {
    pub fn new(general: GeneralModel) -> Result<HomogeneousModel> {
        if let Some((a, b)) = general.homogeneity_breach() {
            return Err(Error::NotHomogeneous(a.to_string(), b.to_string()));
        }
        let layout = general.layout();
        let n = layout.points.len();
        let mut targets = Vec::with_capacity(n);
        for &(k, w) in &layout.points {
            let mut t = PointSet::empty(n);
            for k2 in general.succ[k].iter() {
                t.insert(layout.point_of[k2][w]);
            }
            targets.push(t);
        }
        let interp = layout.base(&general).with_modal(targets.clone(), targets);
        Ok(HomogeneousModel {
            general,
            layout,
            interp,
        })
    }

    /// The same family read as a partial model with the first submodel as
    /// reference.
    pub fn as_partial(&self) -> PartialModel {
        let r = self.general.ids[0].clone();
        PartialModel::new(self.general.clone(), Some(r)).expect("homogeneous families are partial")
    }

    forcing_api!();
}

/// Evaluation of the non-modal connectives for one class of base models.
pub trait BaseSemantics {
    type Model;

    /// Evaluation points, in a fixed order shared by `forces_step`.
    fn carrier(&self, model: &Self::Model) -> Vec<WorldId>;

    /// Decides `f` at `point`, where `f` is not a box or diamond. `sub`
    /// evaluates any subformula at any point of the same model.
    fn forces_step(
        &self,
        model: &Self::Model,
        point: usize,
        f: &Formula,
        sub: &mut dyn FnMut(&Formula, usize) -> bool,
    ) -> bool;
}

/// Two-valued base: each model is a set of true atoms at a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalBase {
    pub point: WorldId,
}

impl Default for ClassicalBase {
    fn default() -> Self {
        ClassicalBase {
            point: WorldId::from("w"),
        }
    }
}

impl BaseSemantics for ClassicalBase {
    type Model = BTreeSet<String>;

    fn carrier(&self, _: &Self::Model) -> Vec<WorldId> {
        vec![self.point.clone()]
    }

    fn forces_step(
        &self,
        model: &Self::Model,
        point: usize,
        f: &Formula,
        sub: &mut dyn FnMut(&Formula, usize) -> bool,
    ) -> bool {
        match f {
            Formula::Atom(a) => model.contains(a),
            Formula::Bottom => false,
            Formula::And(a, b) => sub(a, point) && sub(b, point),
            Formula::Or(a, b) => sub(a, point) || sub(b, point),
            Formula::Implies(a, b) => !sub(a, point) || sub(b, point),
            Formula::Box(_) | Formula::Diamond(_) => unreachable!("modal step reached base"),
        }
    }
}

/// Intuitionistic base over propositional Kripke models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntuitionisticBase;

impl BaseSemantics for IntuitionisticBase {
    type Model = PropModel;

    fn carrier(&self, model: &PropModel) -> Vec<WorldId> {
        model.frame().worlds().to_vec()
    }

    fn forces_step(
        &self,
        model: &PropModel,
        point: usize,
        f: &Formula,
        sub: &mut dyn FnMut(&Formula, usize) -> bool,
    ) -> bool {
        match f {
            Formula::Atom(a) => model.val(point).contains(a),
            Formula::Bottom => false,
            Formula::And(a, b) => sub(a, point) && sub(b, point),
            Formula::Or(a, b) => sub(a, point) || sub(b, point),
            Formula::Implies(a, b) => model
                .frame()
                .up(point)
                .iter()
                .all(|q| !sub(a, q) || sub(b, q)),
            Formula::Box(_) | Formula::Diamond(_) => unreachable!("modal step reached base"),
        }
    }
}

/// A family of base models over one carrier, with the modal clauses
/// `[]A` iff A at every successor, `<>A` iff A at some successor, both at
/// the same point.
pub struct ModalFamily<B: BaseSemantics> {
    base: B,
    ids: Vec<ModelId>,
    members: Vec<B::Model>,
    succ: Vec<Vec<usize>>,
    carrier: Vec<WorldId>,
}

impl<B: BaseSemantics> ModalFamily<B> {
    pub fn new<J>(base: B, members: Vec<(ModelId, B::Model)>, succ: J) -> Result<Self>
    where
        J: IntoIterator<Item = (ModelId, ModelId)>,
    {
        if members.is_empty() {
            return Err(Error::NoSubmodels);
        }
        let mut ids = Vec::with_capacity(members.len());
        let mut models = Vec::with_capacity(members.len());
        for (id, m) in members {
            if ids.contains(&id) {
                return Err(Error::Duplicate(id.to_string()));
            }
            ids.push(id);
            models.push(m);
        }
        let carrier = base.carrier(&models[0]);
        let key: BTreeSet<&WorldId> = carrier.iter().collect();
        for (i, m) in models.iter().enumerate().skip(1) {
            let c = base.carrier(m);
            if c.len() != carrier.len() || c.iter().collect::<BTreeSet<_>>() != key {
                return Err(Error::CarrierMismatch(
                    ids[i].to_string(),
                    ids[0].to_string(),
                ));
            }
        }
        let mut rel = vec![Vec::new(); ids.len()];
        for (a, b) in succ {
            let ia = ids
                .iter()
                .position(|x| *x == a)
                .ok_or_else(|| Error::UnknownSubmodel(a.to_string()))?;
            let ib = ids
                .iter()
                .position(|x| *x == b)
                .ok_or_else(|| Error::UnknownSubmodel(b.to_string()))?;
            if !rel[ia].contains(&ib) {
                rel[ia].push(ib);
            }
        }
        Ok(ModalFamily {
            base,
            ids,
            members: models,
            succ: rel,
            carrier,
        })
    }

    pub fn carrier(&self) -> &[WorldId] {
        &self.carrier
    }

    pub fn forces(&self, k: &ModelId, w: &WorldId, f: &Formula) -> Result<bool> {
        let ki = self
            .ids
            .iter()
            .position(|x| x == k)
            .ok_or_else(|| Error::UnknownSubmodel(k.to_string()))?;
        let p = self.point(ki, w)?;
        Ok(self.eval(ki, p, f))
    }

    fn point(&self, k: usize, w: &WorldId) -> Result<usize> {
        self.base
            .carrier(&self.members[k])
            .iter()
            .position(|x| x == w)
            .ok_or_else(|| Error::UnknownWorld(w.to_string()))
    }

    /// Point `p` of member `from` as a point of member `to`.
    fn translate(&self, from: usize, to: usize, p: usize) -> usize {
        if from == to {
            return p;
        }
        let name = &self.base.carrier(&self.members[from])[p];
        self.base
            .carrier(&self.members[to])
            .iter()
            .position(|x| x == name)
            .expect("carriers agree")
    }

    fn eval(&self, k: usize, p: usize, f: &Formula) -> bool {
        match f {
            Formula::Box(a) => self.succ[k]
                .iter()
                .all(|&k2| self.eval(k2, self.translate(k, k2, p), a)),
            Formula::Diamond(a) => self.succ[k]
                .iter()
                .any(|&k2| self.eval(k2, self.translate(k, k2, p), a)),
            _ => self
                .base
                .forces_step(&self.members[k], p, f, &mut |g, q| self.eval(k, q, g)),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::kripke::fixtures::{ids, pairs, val};
    use crate::kripke::{upward_restrict, Frame};

    pub fn mids(pairs: &[(&str, &str)]) -> Vec<(ModelId, ModelId)> {
        pairs
            .iter()
            .map(|(a, b)| (ModelId::from(*a), ModelId::from(*b)))
            .collect()
    }

    /// Morning, afternoon, evening. Rain (p) is forecast for the morning of
    /// K'; the wet road (q) shows up in the evening everywhere but K.
    pub fn timeline(succ: &[(&str, &str)]) -> GeneralModel {
        let chain = Frame::build(ids(&["m", "a", "e"]), pairs(&[("m", "a"), ("a", "e")])).unwrap();
        let short = upward_restrict(&chain, &"a".into()).unwrap();
        let k = PropModel::build(chain.clone(), val(&[])).unwrap();
        let k1 = PropModel::build(
            chain,
            val(&[("m", &["p"]), ("a", &["p"]), ("e", &["p", "q"])]),
        )
        .unwrap();
        let k2 = PropModel::build(short, val(&[("e", &["q"])])).unwrap();
        GeneralModel::build(
            [
                (ModelId::from("K"), k),
                (ModelId::from("K'"), k1),
                (ModelId::from("K''"), k2),
            ],
            mids(succ),
        )
        .unwrap()
    }

    pub fn two_on_chain(succ: &[(&str, &str)]) -> GeneralModel {
        let g = timeline(&[]);
        GeneralModel::build(
            [
                (ModelId::from("K"), g.submodel(&"K".into()).unwrap().clone()),
                (ModelId::from("K'"), g.submodel(&"K'".into()).unwrap().clone()),
            ],
            mids(succ),
        )
        .unwrap()
    }
}
