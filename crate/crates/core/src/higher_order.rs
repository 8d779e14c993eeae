//! n-ary Kripke models. A level-0 model is a set of worlds with named
//! relations; a level-n model has level-(n-1) models as its objects.
//!
//! Truth is computed over level-0 locations, the paths from the top model
//! down to a world. Propositional connectives are read in the level-0 model
//! holding the location. A modal operator is read at the innermost level
//! whose [`ModalRule`] is not `Defer`; a location reached through the
//! relation is found by following the same names in the successor object,
//! and skipped when some name is missing there. Truth at an object is truth
//! at every location below it.
//!
//! Only levels 0 and 1 have a settled reading. Deeper nesting runs the same
//! default rules.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::general::{GeneralModel, HomogeneousModel, ModelId, PartialModel};
use crate::kripke::{PropModel, WorldId};
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModalRule {
    /// Leave box and diamond to an enclosing level.
    Defer,
    /// Successors of the current object, same location.
    Mk,
    /// Successors of every object above the current location.
    Ik,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LiftRule {
    /// An object holds a formula iff every location below it does.
    #[default]
    Universal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPolicy {
    pub modal: ModalRule,
    pub modal_relation: Option<String>,
    /// Level 0 only: the relation implication ranges over. Without one,
    /// implication is read pointwise.
    pub order_relation: Option<String>,
    pub lift: LiftRule,
}

impl LevelPolicy {
    pub fn deferring() -> Self {
        LevelPolicy {
            modal: ModalRule::Defer,
            modal_relation: None,
            order_relation: None,
            lift: LiftRule::Universal,
        }
    }

    pub fn intuitionistic(order: &str) -> Self {
        LevelPolicy {
            order_relation: Some(order.to_string()),
            ..Self::deferring()
        }
    }

    pub fn modal(rule: ModalRule, relation: &str) -> Self {
        LevelPolicy {
            modal: rule,
            modal_relation: Some(relation.to_string()),
            ..Self::deferring()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objects {
    Worlds {
        names: Vec<WorldId>,
        val: Vec<BTreeSet<String>>,
    },
    Models(Vec<HigherOrderModel>),
}

impl Objects {
    fn len(&self) -> usize {
        match self {
            Objects::Worlds { names, .. } => names.len(),
            Objects::Models(ms) => ms.len(),
        }
    }

    fn name(&self, i: usize) -> &str {
        match self {
            Objects::Worlds { names, .. } => names[i].as_str(),
            Objects::Models(ms) => ms[i].id.as_str(),
        }
    }

    fn find(&self, name: &str) -> Option<usize> {
        (0..self.len()).find(|&i| self.name(i) == name)
    }
}

pub type NamedPairs = BTreeMap<String, Vec<(String, String)>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherOrderModel {
    id: ModelId,
    level: usize,
    objects: Objects,
    relations: BTreeMap<String, Vec<PointSet>>,
    policy: LevelPolicy,
}

impl HigherOrderModel {
    pub fn level0(
        id: ModelId,
        worlds: Vec<WorldId>,
        val: Vec<BTreeSet<String>>,
        relations: NamedPairs,
        policy: LevelPolicy,
    ) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if val.len() != worlds.len() {
            return Err(Error::InvalidModel(format!(
                "{id}: valuation covers {} of {} worlds",
                val.len(),
                worlds.len()
            )));
        }
        Self::assemble(id, 0, Objects::Worlds { names: worlds, val }, relations, policy)
    }

    pub fn nest(
        id: ModelId,
        objects: Vec<HigherOrderModel>,
        relations: NamedPairs,
        policy: LevelPolicy,
    ) -> Result<Self> {
        let level = match objects.first() {
            Some(o) => o.level + 1,
            None => return Err(Error::InvalidModel(format!("{id}: no objects"))),
        };
        if let Some(o) = objects.iter().find(|o| o.level + 1 != level) {
            return Err(Error::InvalidModel(format!(
                "{id}: object {} has level {}, expected {}",
                o.id,
                o.level,
                level - 1
            )));
        }
        if policy.order_relation.is_some() {
            return Err(Error::InvalidModel(format!(
                "{id}: an order relation only applies at level 0"
            )));
        }
        Self::assemble(id, level, Objects::Models(objects), relations, policy)
    }

    fn assemble(
        id: ModelId,
        level: usize,
        objects: Objects,
        relations: NamedPairs,
        policy: LevelPolicy,
    ) -> Result<Self> {
        let n = objects.len();
        let mut seen = BTreeSet::new();
        for i in 0..n {
            if !seen.insert(objects.name(i)) {
                return Err(Error::Duplicate(objects.name(i).to_string()));
            }
        }
        if relations.is_empty() {
            return Err(Error::InvalidModel(format!("{id}: no relations")));
        }
        let mut rels = BTreeMap::new();
        for (name, pairs) in relations {
            let mut rows = vec![PointSet::empty(n); n];
            for (a, b) in pairs {
                let ia = objects
                    .find(&a)
                    .ok_or_else(|| Error::DanglingEndpoint(a.clone()))?;
                let ib = objects
                    .find(&b)
                    .ok_or_else(|| Error::DanglingEndpoint(b.clone()))?;
                rows[ia].insert(ib);
            }
            rels.insert(name, rows);
        }
        for name in [&policy.modal_relation, &policy.order_relation]
            .into_iter()
            .flatten()
        {
            if !rels.contains_key(name) {
                return Err(Error::InvalidModel(format!(
                    "{id}: policy names unknown relation `{name}`"
                )));
            }
        }
        if policy.modal != ModalRule::Defer && policy.modal_relation.is_none() {
            return Err(Error::InvalidModel(format!(
                "{id}: modal rule without a relation"
            )));
        }
        if let Some(order) = &policy.order_relation {
            close_preorder(rels.get_mut(order).unwrap());
        }
        Ok(HigherOrderModel {
            id,
            level,
            objects,
            relations: rels,
            policy,
        })
    }

    /// A propositional model as a level-0 model with one relation `le`.
    pub fn from_prop(id: ModelId, m: &PropModel) -> Self {
        let frame = m.frame();
        let mut rels = BTreeMap::new();
        rels.insert("le".to_string(), frame.up_rows().to_vec());
        HigherOrderModel {
            id,
            level: 0,
            objects: Objects::Worlds {
                names: frame.worlds().to_vec(),
                val: (0..frame.len()).map(|i| m.val(i).clone()).collect(),
            },
            relations: rels,
            policy: LevelPolicy::intuitionistic("le"),
        }
    }

    pub fn id(&self) -> &ModelId {
        &self.id
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn objects(&self) -> &Objects {
        &self.objects
    }

    pub fn policy(&self) -> &LevelPolicy {
        &self.policy
    }

    pub fn relation_names(&self) -> Vec<&str> {
        self.relations.keys().map(String::as_str).collect()
    }

    pub fn relation_pairs(&self, name: &str) -> Option<Vec<(String, String)>> {
        let rows = self.relations.get(name)?;
        let mut out = Vec::new();
        for (a, row) in rows.iter().enumerate() {
            for b in row.iter() {
                out.push((
                    self.objects.name(a).to_string(),
                    self.objects.name(b).to_string(),
                ));
            }
        }
        Some(out)
    }

    pub fn is_unirelational(&self) -> bool {
        self.relations.len() == 1
            && match &self.objects {
                Objects::Worlds { .. } => true,
                Objects::Models(ms) => ms.iter().all(|m| m.is_unirelational()),
            }
    }

    /// Relation sets are finite vectors, so this always holds.
    pub fn is_finitely_relational(&self) -> bool {
        match &self.objects {
            Objects::Worlds { .. } => true,
            Objects::Models(ms) => ms.iter().all(|m| m.is_finitely_relational()),
        }
    }

    fn child(&self, i: usize) -> &HigherOrderModel {
        match &self.objects {
            Objects::Models(ms) => &ms[i],
            Objects::Worlds { .. } => unreachable!("worlds have no children"),
        }
    }

    /// Every level-0 location, as object names from the top down.
    pub fn locations(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |chain, path| {
            out.push(names_along(chain, path));
        });
        out
    }

    fn walk<'a>(
        &'a self,
        path: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[&'a HigherOrderModel], &[usize]),
    ) {
        fn go<'a>(
            chain: &mut Vec<&'a HigherOrderModel>,
            path: &mut Vec<usize>,
            visit: &mut dyn FnMut(&[&'a HigherOrderModel], &[usize]),
        ) {
            let m = *chain.last().unwrap();
            for i in 0..m.objects.len() {
                path.push(i);
                match &m.objects {
                    Objects::Worlds { .. } => visit(chain, path),
                    Objects::Models(ms) => {
                        chain.push(&ms[i]);
                        go(chain, path, visit);
                        chain.pop();
                    }
                }
                path.pop();
            }
        }
        go(&mut vec![self], path, visit);
    }

    pub fn interpretation(&self) -> Interpretation {
        Compiled::new(self).interp
    }

    /// Truth at the location or object named by `path`, top down.
    pub fn evaluate(&self, path: &[&str], f: &Formula) -> Result<bool> {
        let c = Compiled::new(self);
        let set = c.interp.truth_set(f)?;
        let indices = self.resolve(path)?;
        let below: Vec<usize> = c
            .paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.starts_with(&indices))
            .map(|(i, _)| i)
            .collect();
        match self.policy.lift {
            LiftRule::Universal => Ok(below.iter().all(|&i| set.contains(i))),
        }
    }

    fn resolve(&self, path: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(path.len());
        let mut m = self;
        for (depth, name) in path.iter().enumerate() {
            let i = m
                .objects
                .find(name)
                .ok_or_else(|| Error::BadPath(path.join("/")))?;
            out.push(i);
            match &m.objects {
                Objects::Models(ms) => m = &ms[i],
                Objects::Worlds { .. } if depth + 1 < path.len() => {
                    return Err(Error::BadPath(path.join("/")));
                }
                Objects::Worlds { .. } => {}
            }
        }
        Ok(out)
    }
}

fn names_along(chain: &[&HigherOrderModel], path: &[usize]) -> Vec<String> {
    chain
        .iter()
        .zip(path)
        .map(|(m, &i)| m.objects.name(i).to_string())
        .collect()
}

fn close_preorder(rows: &mut [PointSet]) {
    let n = rows.len();
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(i);
    }
    for k in 0..n {
        for i in 0..n {
            if rows[i].contains(k) {
                let rk = rows[k].clone();
                rows[i].union_with(&rk);
            }
        }
    }
}

struct Compiled {
    paths: Vec<Vec<usize>>,
    interp: Interpretation,
}

impl Compiled {
    fn new(top: &HigherOrderModel) -> Compiled {
        let mut paths = Vec::new();
        let mut chains: Vec<Vec<&HigherOrderModel>> = Vec::new();
        top.walk(&mut Vec::new(), &mut |chain, path| {
            paths.push(path.to_vec());
            chains.push(chain.to_vec());
        });
        let n = paths.len();
        let index: HashMap<&[usize], usize> = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();

        let mut atoms: BTreeMap<String, PointSet> = BTreeMap::new();
        let mut up = Vec::with_capacity(n);
        for (p, (path, chain)) in paths.iter().zip(&chains).enumerate() {
            let leaf = *chain.last().unwrap();
            let w = *path.last().unwrap();
            if let Objects::Worlds { val, .. } = &leaf.objects {
                for a in &val[w] {
                    atoms
                        .entry(a.clone())
                        .or_insert_with(|| PointSet::empty(n))
                        .insert(p);
                }
            }
            let mut row = PointSet::empty(n);
            let mut sibling = path.clone();
            for v in leaf_up(leaf, w) {
                *sibling.last_mut().unwrap() = v;
                row.insert(index[sibling.as_slice()]);
            }
            up.push(row);
        }
        let base = Interpretation::new(atoms, up);

        let mut necessity = Vec::with_capacity(n);
        let mut possibility = Vec::with_capacity(n);
        for (path, chain) in paths.iter().zip(&chains) {
            let Some(d) = (0..chain.len())
                .rev()
                .find(|&d| chain[d].policy.modal != ModalRule::Defer)
            else {
                let interp = base.with_gap(Error::PolicyGap(String::new()));
                return Compiled { paths, interp };
            };
            let handler = chain[d];
            let rows = &handler.relations[handler.policy.modal_relation.as_ref().unwrap()];
            let leaf = *chain.last().unwrap();
            let s = path[d];
            let mut nec = PointSet::empty(n);
            let mut pos = PointSet::empty(n);
            let place = |suffix: &[usize], t: usize, set: &mut PointSet| {
                if let Some(tr) = translate(handler, s, t, suffix) {
                    let mut full = path[..d].to_vec();
                    full.push(t);
                    full.extend(tr);
                    set.insert(index[full.as_slice()]);
                }
            };
            let suffix = &path[d + 1..];
            for t in rows[s].iter() {
                place(suffix, t, &mut pos);
            }
            match handler.policy.modal {
                ModalRule::Mk => {
                    for t in rows[s].iter() {
                        place(suffix, t, &mut nec);
                    }
                }
                ModalRule::Ik if d + 1 == chain.len() => {
                    for v in leaf_up(leaf, s) {
                        for t in rows[v].iter() {
                            place(suffix, t, &mut nec);
                        }
                    }
                }
                ModalRule::Ik => {
                    let mut moved = suffix.to_vec();
                    for v in leaf_up(leaf, *path.last().unwrap()) {
                        *moved.last_mut().unwrap() = v;
                        for t in rows[s].iter() {
                            place(&moved, t, &mut nec);
                        }
                    }
                }
                ModalRule::Defer => unreachable!(),
            }
            necessity.push(nec);
            possibility.push(pos);
        }
        Compiled {
            paths,
            interp: base.with_modal(necessity, possibility),
        }
    }
}

fn leaf_up(leaf: &HigherOrderModel, w: usize) -> Vec<usize> {
    match &leaf.policy.order_relation {
        Some(r) => leaf.relations[r][w].iter().collect(),
        None => vec![w],
    }
}

/// Follows the names of `suffix` below object `s` into object `t`.
fn translate(m: &HigherOrderModel, s: usize, t: usize, suffix: &[usize]) -> Option<Vec<usize>> {
    if s == t || suffix.is_empty() {
        return Some(suffix.to_vec());
    }
    let mut src = m.child(s);
    let mut dst = m.child(t);
    let mut out = Vec::with_capacity(suffix.len());
    for (depth, &i) in suffix.iter().enumerate() {
        let j = dst.objects.find(src.objects.name(i))?;
        out.push(j);
        if depth + 1 < suffix.len() {
            src = src.child(i);
            dst = dst.child(j);
        }
    }
    Some(out)
}

fn lift_general(id: ModelId, g: &GeneralModel, rule: ModalRule) -> HigherOrderModel {
    let objects = g
        .submodels()
        .map(|(k, m)| HigherOrderModel::from_prop(k.clone(), m))
        .collect();
    let pairs = g
        .succ_pairs()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let mut rels = BTreeMap::new();
    rels.insert("succ".to_string(), pairs);
    HigherOrderModel::nest(id, objects, rels, LevelPolicy::modal(rule, "succ"))
        .expect("submodels of a general model form a valid level-1 model")
}

/// A homogeneous model as a level-1 model over its submodels.
pub fn lift(h: &HomogeneousModel) -> HigherOrderModel {
    lift_general(ModelId::from("lift"), h.general(), ModalRule::Mk)
}

/// A partial model as a level-1 model under the IK rule.
pub fn lift_partial(p: &PartialModel) -> HigherOrderModel {
    lift_general(ModelId::from("lift"), p.general(), ModalRule::Ik)
}
