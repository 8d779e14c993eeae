//! Birelational models: an intuitionistic order `<=` plus a modal relation
//! `R`, the F1-F4 interaction conditions, and the IK and MK forcing
//! relations.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kripke::{PropModel, WorldId};
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    F1,
    F2,
    F3,
    F4,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::F1, Condition::F2, Condition::F3, Condition::F4];

    /// The shape of the condition, antecedent first.
    pub fn statement(self) -> &'static str {
        match self {
            Condition::F1 => "w <= w' and w R j  =>  exists j' with j <= j' and w' R j'",
            Condition::F2 => "w R j and j <= j'  =>  exists w' with w <= w' and w' R j'",
            Condition::F3 => "w <= w' and w' R j'  =>  exists j with w R j and j <= j'",
            Condition::F4 => "j <= j' and w' R j'  =>  exists w with w R j and w <= w'",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Outcome of checking one condition over every antecedent instance.
///
/// Triples list the antecedent worlds in the order they appear in
/// [`Condition::statement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    pub unique: bool,
    pub violations: Vec<[WorldId; 3]>,
    pub nonunique: Vec<[WorldId; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelClass {
    None,
    Birelational,
    Strong,
    Excessive,
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelClass::None => "none",
            ModelClass::Birelational => "birelational",
            ModelClass::Strong => "strong",
            ModelClass::Excessive => "excessive",
        })
    }
}

/// Whether the frame conditions need unique witnesses (universal models) or
/// just some witness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WitnessPolicy {
    #[default]
    Unique,
    Existence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirelationalModel {
    base: PropModel,
    r: Vec<PointSet>,
    r_inv: Vec<PointSet>,
    policy: WitnessPolicy,
}

impl BirelationalModel {
    /// `r` is taken as given; no closure is applied.
    pub fn build<I>(base: PropModel, r: I) -> Result<BirelationalModel>
    where
        I: IntoIterator<Item = (WorldId, WorldId)>,
    {
        let n = base.frame().len();
        let mut rel = vec![PointSet::empty(n); n];
        for (a, b) in r {
            let ia = base
                .frame()
                .index_of(&a)
                .ok_or_else(|| Error::DanglingEndpoint(a.to_string()))?;
            let ib = base
                .frame()
                .index_of(&b)
                .ok_or_else(|| Error::DanglingEndpoint(b.to_string()))?;
            rel[ia].insert(ib);
        }
        Ok(Self::from_rows(base, rel))
    }

    pub(crate) fn from_rows(base: PropModel, r: Vec<PointSet>) -> BirelationalModel {
        let n = r.len();
        let mut r_inv = vec![PointSet::empty(n); n];
        for (a, row) in r.iter().enumerate() {
            for b in row.iter() {
                r_inv[b].insert(a);
            }
        }
        BirelationalModel {
            base,
            r,
            r_inv,
            policy: WitnessPolicy::Unique,
        }
    }

    pub fn with_policy(mut self, policy: WitnessPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn policy(&self) -> WitnessPolicy {
        self.policy
    }

    pub fn base(&self) -> &PropModel {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_successors(&self, i: usize) -> &PointSet {
        &self.r[i]
    }

    pub fn r_pairs(&self) -> Vec<(WorldId, WorldId)> {
        let f = self.base.frame();
        let mut out = Vec::new();
        for (a, row) in self.r.iter().enumerate() {
            for b in row.iter() {
                out.push((f.world(a).clone(), f.world(b).clone()));
            }
        }
        out
    }

    /// Walks every antecedent instance of `c`, handing the antecedent triple
    /// and its witness count to `visit`. Stops when `visit` returns false.
    fn scan(&self, c: Condition, mut visit: impl FnMut([usize; 3], usize) -> bool) {
        let frame = self.base.frame();
        let n = self.len();
        for x in 0..n {
            match c {
                Condition::F1 => {
                    for x2 in frame.up(x).iter() {
                        for j in self.r[x].iter() {
                            let witnesses = frame.up(j).intersection(&self.r[x2]).count();
                            if !visit([x, x2, j], witnesses) {
                                return;
                            }
                        }
                    }
                }
                Condition::F2 => {
                    for j in self.r[x].iter() {
                        for j2 in frame.up(j).iter() {
                            let witnesses = frame.up(x).intersection(&self.r_inv[j2]).count();
                            if !visit([x, j, j2], witnesses) {
                                return;
                            }
                        }
                    }
                }
                Condition::F3 => {
                    for x2 in frame.up(x).iter() {
                        for j2 in self.r[x2].iter() {
                            let witnesses =
                                self.r[x].iter().filter(|&j| frame.leq(j, j2)).count();
                            if !visit([x, x2, j2], witnesses) {
                                return;
                            }
                        }
                    }
                }
                Condition::F4 => {
                    // x plays j: j <= j' and w' R j'
                    for j2 in frame.up(x).iter() {
                        for w2 in self.r_inv[j2].iter() {
                            let witnesses = self.r_inv[x]
                                .iter()
                                .filter(|&w| frame.leq(w, w2))
                                .count();
                            if !visit([x, j2, w2], witnesses) {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn check_condition(&self, c: Condition) -> ConditionReport {
        let frame = self.base.frame();
        let name = |t: [usize; 3]| t.map(|i| frame.world(i).clone());
        let mut violations = Vec::new();
        let mut nonunique = Vec::new();
        self.scan(c, |t, count| {
            match count {
                0 => violations.push(name(t)),
                1 => {}
                _ => nonunique.push(name(t)),
            }
            true
        });
        let holds = violations.is_empty();
        ConditionReport {
            condition: c,
            holds,
            unique: holds && nonunique.is_empty(),
            violations,
            nonunique,
        }
    }

    pub fn check_all(&self) -> Vec<ConditionReport> {
        Condition::ALL.iter().map(|&c| self.check_condition(c)).collect()
    }

    /// Whether `c` holds under this model's witness policy.
    pub fn satisfies(&self, c: Condition) -> bool {
        let unique = self.policy == WitnessPolicy::Unique;
        let mut ok = true;
        self.scan(c, |_, count| {
            ok = count == 1 || (count > 1 && !unique);
            ok
        });
        ok
    }

    /// The strongest class whose conditions all hold.
    pub fn classify(&self) -> ModelClass {
        if !(self.satisfies(Condition::F1) && self.satisfies(Condition::F2)) {
            ModelClass::None
        } else if !self.satisfies(Condition::F3) {
            ModelClass::Birelational
        } else if !self.satisfies(Condition::F4) {
            ModelClass::Strong
        } else {
            ModelClass::Excessive
        }
    }

    fn atoms_and_order(&self) -> Interpretation {
        self.base.interpretation()
    }

    /// Box looks at every R-successor of every world above.
    pub fn ik_interpretation(&self) -> Result<Interpretation> {
        if self.classify() < ModelClass::Birelational {
            return Err(Error::NotBirelational);
        }
        Ok(self.ik_unchecked())
    }

    pub(crate) fn ik_unchecked(&self) -> Interpretation {
        let frame = self.base.frame();
        let n = self.len();
        let necessity = (0..n)
            .map(|w| {
                let mut acc = PointSet::empty(n);
                for w2 in frame.up(w).iter() {
                    acc.union_with(&self.r[w2]);
                }
                acc
            })
            .collect();
        self.atoms_and_order()
            .with_modal(necessity, self.r.clone())
    }

    /// Box looks at the R-successors of the world itself.
    pub fn mk_interpretation(&self) -> Result<Interpretation> {
        if self.classify() < ModelClass::Strong {
            return Err(Error::NotStrong);
        }
        Ok(self.mk_unchecked())
    }

    pub(crate) fn mk_unchecked(&self) -> Interpretation {
        self.atoms_and_order().with_modal(self.r.clone(), self.r.clone())
    }

    fn index(&self, w: &WorldId) -> Result<usize> {
        self.base.frame().require(w)
    }

    pub fn forces_ik(&self, w: &WorldId, f: &Formula) -> Result<bool> {
        let i = self.index(w)?;
        self.ik_interpretation()?.forces_at(i, f)
    }

    pub fn forces_mk(&self, w: &WorldId, f: &Formula) -> Result<bool> {
        let i = self.index(w)?;
        self.mk_interpretation()?.forces_at(i, f)
    }

    pub fn entails_ik(&self, w: &WorldId, gamma: &[Formula], f: &Formula) -> Result<bool> {
        let i = self.index(w)?;
        Ok(self.ik_interpretation()?.entailment_set(gamma, f)?.contains(i))
    }

    pub fn entails_mk(&self, w: &WorldId, gamma: &[Formula], f: &Formula) -> Result<bool> {
        let i = self.index(w)?;
        Ok(self.mk_interpretation()?.entailment_set(gamma, f)?.contains(i))
    }

    pub fn valid_ik(&self, gamma: &[Formula], f: &Formula) -> Result<bool> {
        Ok(self.ik_interpretation()?.entailment_set(gamma, f)?.is_full())
    }

    pub fn valid_mk(&self, gamma: &[Formula], f: &Formula) -> Result<bool> {
        Ok(self.mk_interpretation()?.entailment_set(gamma, f)?.is_full())
    }
}
