//! Flattening a general model into a birelational model, and checks that
//! the flat model behaves like the original.

use crate::birelational::{BirelationalModel, ConditionReport, ModelClass};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::general::{GeneralModel, HomogeneousModel, ModelId, PartialModel};
use crate::kripke::{Frame, PropModel, WorldId};
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use serde::Serialize;
use std::collections::HashMap;

/// A world `w` of submodel `K`, written `w@K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlatWorld {
    pub submodel: ModelId,
    pub world: WorldId,
}

impl FlatWorld {
    pub fn name(&self) -> WorldId {
        WorldId::from(format!("{}@{}", self.world, self.submodel).as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Flattened {
    pub model: BirelationalModel,
    pub worlds: Vec<FlatWorld>,
}

impl Flattened {
    pub fn index_of(&self, k: &ModelId, w: &WorldId) -> Option<usize> {
        self.worlds
            .binary_search_by(|fw| (&fw.submodel, &fw.world).cmp(&(k, w)))
            .ok()
    }
}

pub fn flatten(g: &GeneralModel) -> Flattened {
    let mut worlds = Vec::with_capacity(g.point_count());
    let mut local = Vec::with_capacity(g.point_count());
    for (ki, (k, m)) in g.submodels().enumerate() {
        let mut ws: Vec<(usize, &WorldId)> = m.frame().worlds().iter().enumerate().collect();
        ws.sort_by(|a, b| a.1.cmp(b.1));
        for (wi, w) in ws {
            worlds.push(FlatWorld {
                submodel: k.clone(),
                world: w.clone(),
            });
            local.push((ki, wi));
        }
    }
    let n = worlds.len();
    let at: HashMap<(usize, usize), usize> =
        local.iter().enumerate().map(|(i, &kw)| (kw, i)).collect();

    let mut up = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut val = Vec::with_capacity(n);
    for &(ki, wi) in &local {
        let m = g.submodel_at(ki);
        up.push(PointSet::from_points(
            n,
            m.frame().up(wi).iter().map(|v| at[&(ki, v)]),
        ));
        let name = m.frame().world(wi);
        r.push(PointSet::from_points(
            n,
            g.successors(ki).iter().filter_map(|k2| {
                g.submodel_at(k2)
                    .frame()
                    .index_of(name)
                    .map(|v| at[&(k2, v)])
            }),
        ));
        val.push(m.val(wi).clone());
    }
    let frame = Frame::from_closed(worlds.iter().map(FlatWorld::name).collect(), up);
    let base = PropModel::from_parts(frame, val);
    Flattened {
        model: BirelationalModel::from_rows(base, r),
        worlds,
    }
}

/// F1-F4 reports for the flattened model.
pub fn verify_flatten_class(g: &GeneralModel) -> Vec<ConditionReport> {
    flatten(g).model.check_all()
}

/// Which forcing relation the general side uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneralClass {
    Partial,
    Homogeneous,
}

impl GeneralClass {
    /// Homogeneous when the frames agree, else partial when a reference
    /// exists.
    pub fn infer(g: &GeneralModel) -> Option<GeneralClass> {
        if g.validate_homogeneous() {
            Some(GeneralClass::Homogeneous)
        } else if g.validate_partial().is_some() {
            Some(GeneralClass::Partial)
        } else {
            None
        }
    }

    /// The birelational class the flattened model is expected to reach.
    pub fn expected_flat_class(self) -> ModelClass {
        match self {
            GeneralClass::Partial => ModelClass::Birelational,
            GeneralClass::Homogeneous => ModelClass::Excessive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub submodel: ModelId,
    pub world: WorldId,
    pub gamma: Vec<String>,
    pub formula: String,
    pub general: bool,
    pub flat: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub class: GeneralClass,
    pub flat_class: ModelClass,
    pub checked: usize,
    pub disagreements: Vec<Disagreement>,
}

/// Compares entailment on `g` with entailment on its flattening, IK for
/// partial models and MK for homogeneous ones, at every point, for every
/// premise set and formula. An empty `gammas` means plain forcing.
pub fn equivalence_report(
    g: &GeneralModel,
    class: Option<GeneralClass>,
    formulas: &[Formula],
    gammas: &[Vec<Formula>],
) -> Result<EquivalenceReport> {
    let class = match class {
        Some(c) => c,
        None => GeneralClass::infer(g).ok_or(Error::NotPartial)?,
    };
    let general: Interpretation;
    let points: Vec<(ModelId, WorldId)>;
    match class {
        GeneralClass::Partial => {
            let p = PartialModel::new(g.clone(), None)?;
            points = p.points();
            general = p.interpretation().clone();
        }
        GeneralClass::Homogeneous => {
            let h = HomogeneousModel::new(g.clone())?;
            points = h.points();
            general = h.interpretation().clone();
        }
    }
    let flat = flatten(g);
    let flat_class = flat.model.classify();
    let flat_interp = match class {
        GeneralClass::Partial => flat.model.ik_interpretation()?,
        GeneralClass::Homogeneous => flat.model.mk_interpretation()?,
    };
    let to_flat: Vec<usize> = points
        .iter()
        .map(|(k, w)| flat.index_of(k, w).expect("every point is flattened"))
        .collect();

    let empty = [Vec::new()];
    let gammas = if gammas.is_empty() { &empty[..] } else { gammas };
    let mut checked = 0;
    let mut disagreements = Vec::new();
    for gamma in gammas {
        for f in formulas {
            let a = general.entailment_set(gamma, f)?;
            let b = flat_interp.entailment_set(gamma, f)?;
            for (p, (k, w)) in points.iter().enumerate() {
                checked += 1;
                let (x, y) = (a.contains(p), b.contains(to_flat[p]));
                if x != y {
                    disagreements.push(Disagreement {
                        submodel: k.clone(),
                        world: w.clone(),
                        gamma: gamma.iter().map(Formula::render).collect(),
                        formula: f.render(),
                        general: x,
                        flat: y,
                    });
                }
            }
        }
    }
    Ok(EquivalenceReport {
        class,
        flat_class,
        checked,
        disagreements,
    })
}
