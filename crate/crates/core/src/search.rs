//! Bounded enumeration of small models and countermodel search.
//!
//! Worlds are named `w1..wn`, submodels `K1..Km`, atoms `p1..pk`. Orders are
//! all preorders on the labeled worlds, valuations assign one upset per
//! atom, and `r`/`succ` range over all subsets. Two enumerated models never
//! share a canonical serialization; isomorphic copies under relabeling do
//! appear.

use crate::birelational::{BirelationalModel, ModelClass};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::general::{GeneralModel, HomogeneousModel, ModelId, PartialModel};
use crate::kripke::{Frame, PropModel, WorldId};
use crate::modelfile::{write_birelational, write_general, write_prop_model};
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Duration;
use web_time::Instant;

pub const MAX_WORLDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Logic {
    #[serde(rename = "prop")]
    Prop,
    #[serde(rename = "ik")]
    Ik,
    #[serde(rename = "mk")]
    Mk,
    #[serde(rename = "partial")]
    Partial,
    #[serde(rename = "homogeneous")]
    Homogeneous,
    #[serde(rename = "classicalK")]
    ClassicalK,
}

impl Logic {
    pub const ALL: [Logic; 6] = [
        Logic::Prop,
        Logic::Ik,
        Logic::Mk,
        Logic::Partial,
        Logic::Homogeneous,
        Logic::ClassicalK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Logic::Prop => "prop",
            Logic::Ik => "ik",
            Logic::Mk => "mk",
            Logic::Partial => "partial",
            Logic::Homogeneous => "homogeneous",
            Logic::ClassicalK => "classicalK",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Logic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Logic> {
        Logic::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Bounds(format!("unknown logic `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_worlds: usize,
    pub max_atoms: usize,
    pub max_submodels: usize,
    pub logic: Logic,
    /// Keep only models whose frames all have a least world.
    pub rooted: bool,
}

impl SearchBounds {
    pub fn new(logic: Logic) -> SearchBounds {
        SearchBounds {
            max_worlds: 3,
            max_atoms: 1,
            max_submodels: 2,
            logic,
            rooted: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("max-worlds", self.max_worlds),
            ("max-atoms", self.max_atoms),
            ("max-submodels", self.max_submodels),
        ] {
            if v == 0 {
                return Err(Error::Bounds(format!("{name} must be at least 1")));
            }
        }
        if self.max_worlds > MAX_WORLDS {
            return Err(Error::Bounds(format!(
                "max-worlds is limited to {MAX_WORLDS}"
            )));
        }
        Ok(())
    }
}

/// One enumerated model.
#[derive(Clone, Debug)]
pub enum Candidate {
    Prop(PropModel),
    Birelational(BirelationalModel),
    General(GeneralModel),
}

/// A point of a model: a world, and its submodel for general models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Locus {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submodel: Option<ModelId>,
    pub world: WorldId,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.submodel {
            Some(k) => write!(f, "{}:{}", self.world, k),
            None => write!(f, "{}", self.world),
        }
    }
}

impl Candidate {
    /// Canonical file text.
    pub fn to_text(&self) -> String {
        match self {
            Candidate::Prop(m) => write_prop_model("M", m),
            Candidate::Birelational(b) => write_birelational("M", b),
            Candidate::General(g) => write_general(g, None),
        }
    }

    /// The forcing structure for `logic` and its points in order.
    pub fn interpretation(&self, logic: Logic) -> Result<(Interpretation, Vec<Locus>)> {
        let plain = |f: &Frame| {
            f.worlds()
                .iter()
                .map(|w| Locus {
                    submodel: None,
                    world: w.clone(),
                })
                .collect::<Vec<_>>()
        };
        let general = |pts: Vec<(ModelId, WorldId)>| {
            pts.into_iter()
                .map(|(k, w)| Locus {
                    submodel: Some(k),
                    world: w,
                })
                .collect::<Vec<_>>()
        };
        match (self, logic) {
            (Candidate::Prop(m), Logic::Prop) => Ok((m.interpretation(), plain(m.frame()))),
            (Candidate::Birelational(b), Logic::Ik) => {
                Ok((b.ik_interpretation()?, plain(b.base().frame())))
            }
            (Candidate::Birelational(b), Logic::Mk) => {
                Ok((b.mk_interpretation()?, plain(b.base().frame())))
            }
            (Candidate::General(g), Logic::Partial) => {
                let p = PartialModel::new(g.clone(), None)?;
                Ok((p.interpretation().clone(), general(p.points())))
            }
            (Candidate::General(g), Logic::Homogeneous | Logic::ClassicalK) => {
                let h = HomogeneousModel::new(g.clone())?;
                Ok((h.interpretation().clone(), general(h.points())))
            }
            _ => Err(Error::Bounds(format!("{logic} does not apply to this model"))),
        }
    }

    pub fn is_rooted(&self) -> bool {
        match self {
            Candidate::Prop(m) => m.frame().is_rooted(),
            Candidate::Birelational(b) => b.base().frame().is_rooted(),
            Candidate::General(g) => g.is_rooted(),
        }
    }
}

fn all_preorders(n: usize) -> Vec<Vec<PointSet>> {
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << off.len()) {
        let mut up: Vec<PointSet> = (0..n).map(|i| PointSet::from_points(n, [i])).collect();
        for (bit, &(a, b)) in off.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                up[a].insert(b);
            }
        }
        let transitive = (0..n).all(|a| up[a].iter().all(|b| up[b].is_subset(&up[a])));
        if transitive {
            out.push(up);
        }
    }
    out
}

/// Every preorder on `n` labeled points as rows of up-sets, in a fixed order.
pub fn preorders(n: usize) -> &'static [Vec<PointSet>] {
    static CACHE: OnceLock<Vec<Vec<Vec<PointSet>>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| (0..=MAX_WORLDS).map(all_preorders).collect());
    &all[n]
}

/// Upward-closed subsets of a preordered set, in increasing bit order.
pub fn upsets(up: &[PointSet]) -> Vec<PointSet> {
    let n = up.len();
    (0u64..(1u64 << n))
        .map(|mask| PointSet::from_points(n, (0..n).filter(|&i| mask >> i & 1 == 1)))
        .filter(|s| s.iter().all(|i| up[i].is_subset(s)))
        .collect()
}

pub fn canonical_atoms(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("p{i}")).collect()
}

fn world_names(n: usize) -> Vec<WorldId> {
    (1..=n).map(|i| WorldId::from(format!("w{i}").as_str())).collect()
}

fn submodel_names(m: usize) -> Vec<ModelId> {
    (1..=m).map(|i| ModelId::from(format!("K{i}").as_str())).collect()
}

/// Calls `visit` on every index tuple below `radices`, last index fastest.
/// Returns false when `visit` asked to stop.
fn product(radices: &[usize], mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if radices.contains(&0) {
        return true;
    }
    let mut idx = vec![0; radices.len()];
    loop {
        if !visit(&idx) {
            return false;
        }
        let mut i = radices.len();
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < radices[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

fn frame_of(names: &[WorldId], up: &[PointSet]) -> Frame {
    Frame::from_closed(names.to_vec(), up.to_vec())
}

/// The subframe on `keep`, in the order of `frame`.
pub(crate) fn restrict(frame: &Frame, keep: &PointSet) -> Frame {
    let idx: Vec<usize> = keep.iter().collect();
    let n = idx.len();
    let up = idx
        .iter()
        .map(|&a| {
            PointSet::from_points(
                n,
                idx.iter()
                    .enumerate()
                    .filter(|(_, &b)| frame.leq(a, b))
                    .map(|(j, _)| j),
            )
        })
        .collect();
    Frame::from_closed(idx.iter().map(|&i| frame.world(i).clone()).collect(), up)
}

/// A model on `frame` where atom `atoms[i]` holds on `sets[i]`.
fn valued(frame: Frame, atoms: &[String], sets: &[&PointSet]) -> PropModel {
    let val = (0..frame.len())
        .map(|w| {
            atoms
                .iter()
                .zip(sets)
                .filter(|(_, s)| s.contains(w))
                .map(|(a, _)| a.clone())
                .collect::<BTreeSet<_>>()
        })
        .collect();
    PropModel::from_parts(frame, val)
}

fn relation(n: usize, mask: u64) -> Vec<PointSet> {
    (0..n)
        .map(|a| PointSet::from_points(n, (0..n).filter(|&b| mask >> (a * n + b) & 1 == 1)))
        .collect()
}

/// Streams every model of `bounds.logic` within bounds over `atoms`.
/// Returns how many models were produced; stops early when `visit` returns
/// false.
pub fn for_each_model(
    bounds: &SearchBounds,
    atoms: &[String],
    mut visit: impl FnMut(&Candidate) -> bool,
) -> Result<u64> {
    bounds.validate()?;
    let mut count = 0u64;
    let mut emit = |c: Candidate| {
        if bounds.rooted && !c.is_rooted() {
            return true;
        }
        count += 1;
        visit(&c)
    };
    let k = atoms.len();
    match bounds.logic {
        Logic::Prop => {
            'outer: for n in 1..=bounds.max_worlds {
                let names = world_names(n);
                for up in preorders(n) {
                    let ups = upsets(up);
                    let go = product(&vec![ups.len(); k], |ix| {
                        let sets: Vec<&PointSet> = ix.iter().map(|&i| &ups[i]).collect();
                        emit(Candidate::Prop(valued(frame_of(&names, up), atoms, &sets)))
                    });
                    if !go {
                        break 'outer;
                    }
                }
            }
        }
        Logic::Ik | Logic::Mk => {
            let min = if bounds.logic == Logic::Ik {
                ModelClass::Birelational
            } else {
                ModelClass::Strong
            };
            'outer: for n in 1..=bounds.max_worlds {
                let names = world_names(n);
                for up in preorders(n) {
                    let frame = frame_of(&names, up);
                    let ups = upsets(up);
                    for mask in 0u64..(1u64 << (n * n)) {
                        let bare = BirelationalModel::from_rows(
                            PropModel::from_parts(frame.clone(), vec![BTreeSet::new(); n]),
                            relation(n, mask),
                        );
                        if bare.classify() < min {
                            continue;
                        }
                        let go = product(&vec![ups.len(); k], |ix| {
                            let sets: Vec<&PointSet> = ix.iter().map(|&i| &ups[i]).collect();
                            let base = valued(frame.clone(), atoms, &sets);
                            emit(Candidate::Birelational(BirelationalModel::from_rows(
                                base,
                                relation(n, mask),
                            )))
                        });
                        if !go {
                            break 'outer;
                        }
                    }
                }
            }
        }
        Logic::Partial => {
            'outer: for n in 1..=bounds.max_worlds {
                let names = world_names(n);
                for up in preorders(n) {
                    let reference = frame_of(&names, up);
                    let parts: Vec<PointSet> =
                        upsets(up).into_iter().filter(|s| !s.is_empty()).collect();
                    for m in 1..=bounds.max_submodels {
                        let go = product(&vec![parts.len(); m - 1], |choice| {
                            let frames: Vec<Frame> = std::iter::once(reference.clone())
                                .chain(choice.iter().map(|&c| restrict(&reference, &parts[c])))
                                .collect();
                            general_family(&frames, atoms, &mut emit)
                        });
                        if !go {
                            break 'outer;
                        }
                    }
                }
            }
        }
        Logic::Homogeneous => {
            'outer: for n in 1..=bounds.max_worlds {
                let names = world_names(n);
                for up in preorders(n) {
                    let frame = frame_of(&names, up);
                    for m in 1..=bounds.max_submodels {
                        if !general_family(&vec![frame.clone(); m], atoms, &mut emit) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        Logic::ClassicalK => {
            let frame = frame_of(&world_names(1), &[PointSet::full(1)]);
            for m in 1..=bounds.max_submodels {
                if !general_family(&vec![frame.clone(); m], atoms, &mut emit) {
                    break;
                }
            }
        }
    }
    Ok(count)
}

/// Every `succ` and valuation over submodels with the given frames.
fn general_family(
    frames: &[Frame],
    atoms: &[String],
    emit: &mut dyn FnMut(Candidate) -> bool,
) -> bool {
    let m = frames.len();
    let ids = submodel_names(m);
    let ups: Vec<Vec<PointSet>> = frames.iter().map(|f| upsets(f.up_rows())).collect();
    let k = atoms.len();
    let radices: Vec<usize> = ups.iter().flat_map(|u| vec![u.len(); k]).collect();
    for mask in 0u64..(1u64 << (m * m)) {
        let succ: Vec<(ModelId, ModelId)> = (0..m * m)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| (ids[b / m].clone(), ids[b % m].clone()))
            .collect();
        let go = product(&radices, |ix| {
            let subs = (0..m).map(|s| {
                let sets: Vec<&PointSet> =
                    (0..k).map(|a| &ups[s][ix[s * k + a]]).collect();
                (ids[s].clone(), valued(frames[s].clone(), atoms, &sets))
            });
            let g = GeneralModel::build(subs, succ.iter().cloned())
                .expect("enumerated families are well formed");
            emit(Candidate::General(g))
        });
        if !go {
            return false;
        }
    }
    true
}

/// All models within bounds over `p1..pk`, `k = max_atoms`.
pub fn enumerate_models(bounds: &SearchBounds) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for_each_model(bounds, &canonical_atoms(bounds.max_atoms), |c| {
        out.push(c.clone());
        true
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub found: bool,
    pub model: Option<String>,
    pub locus: Option<Locus>,
    pub models_examined: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Atoms the search assigns: those of `f` and `gamma`, at most
/// `max_atoms`. Dropped atoms are false everywhere.
pub fn search_atoms(f: &Formula, gamma: &[Formula], max_atoms: usize) -> Vec<String> {
    let mut atoms = f.atoms();
    for g in gamma {
        atoms.extend(g.atoms());
    }
    atoms.into_iter().take(max_atoms).collect()
}

/// The first enumerated model with a point forcing `gamma` but not `f`.
pub fn find_countermodel(
    f: &Formula,
    gamma: &[Formula],
    bounds: &SearchBounds,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let atoms = search_atoms(f, gamma, bounds.max_atoms);
    let mut hit = None;
    let mut failure = None;
    let mut examined = 0u64;
    for_each_model(bounds, &atoms, |c| {
        examined += 1;
        let step = c.interpretation(bounds.logic).and_then(|(interp, points)| {
            let set = interp.entailment_set(gamma, f)?;
            Ok((0..points.len())
                .find(|&p| !set.contains(p))
                .map(|p| points[p].clone()))
        });
        match step {
            Ok(Some(locus)) => {
                hit = Some((c.to_text(), locus));
                false
            }
            Ok(None) => true,
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let (model, locus) = match hit {
        Some((m, l)) => (Some(m), Some(l)),
        None => (None, None),
    };
    Ok(SearchOutcome {
        found: model.is_some(),
        model,
        locus,
        models_examined: examined,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::modelfile::parse_model_file;
    use std::collections::HashSet;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn bounds(logic: Logic, worlds: usize, atoms: usize, subs: usize) -> SearchBounds {
        SearchBounds {
            max_worlds: worlds,
            max_atoms: atoms,
            max_submodels: subs,
            logic,
            rooted: false,
        }
    }

    #[test]
    fn preorder_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| preorders(n).len()).collect();
        assert_eq!(counts, [1, 4, 29, 355]);
    }

    #[test]
    fn one_world_one_atom() {
        let ms = enumerate_models(&bounds(Logic::Prop, 1, 1, 1)).unwrap();
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn prop_candidates_are_hereditary() {
        for c in enumerate_models(&bounds(Logic::Prop, 2, 2, 1)).unwrap() {
            let Candidate::Prop(m) = c else { panic!() };
            let file = parse_model_file(&write_prop_model("M", &m)).unwrap();
            assert_eq!(file.prop_model().unwrap(), m);
        }
    }

    #[test]
    fn mk_candidates_are_strong() {
        let ms = enumerate_models(&bounds(Logic::Mk, 2, 1, 1)).unwrap();
        assert!(!ms.is_empty());
        for c in ms {
            let Candidate::Birelational(b) = c else { panic!() };
            assert!(b.classify() >= ModelClass::Strong);
        }
    }

    #[test]
    fn no_duplicate_serializations() {
        for logic in Logic::ALL {
            let ms = enumerate_models(&bounds(logic, 2, 1, 2)).unwrap();
            let texts: HashSet<String> = ms.iter().map(Candidate::to_text).collect();
            assert_eq!(texts.len(), ms.len(), "{logic}");
        }
    }

    #[test]
    fn excluded_middle_countermodel() {
        let out = find_countermodel(&f("p|~p"), &[], &bounds(Logic::Prop, 2, 1, 1)).unwrap();
        assert!(out.found);
        let m = parse_model_file(out.model.as_ref().unwrap())
            .unwrap()
            .prop_model()
            .unwrap();
        assert_eq!(m.frame().len(), 2);
        assert_eq!(m.frame().le_pairs().len(), 3);
        let locus = out.locus.unwrap();
        assert!(!m.forces(&locus.world, &f("p|~p")).unwrap());
    }

    #[test]
    fn separation_formula_splits_ik_and_mk() {
        let sep = f("(~[]_|_) -> <>T");
        let ik = find_countermodel(&sep, &[], &bounds(Logic::Ik, 3, 1, 1)).unwrap();
        assert!(ik.found);
        let b = parse_model_file(ik.model.as_ref().unwrap())
            .unwrap()
            .birelational()
            .unwrap();
        assert!(!b.forces_ik(&ik.locus.unwrap().world, &sep).unwrap());
        let mk = find_countermodel(&sep, &[], &bounds(Logic::Mk, 3, 1, 1)).unwrap();
        assert!(!mk.found);
        assert!(mk.models_examined > 0);
    }

    #[test]
    fn reproducible() {
        let b = bounds(Logic::Partial, 2, 1, 2);
        let a = find_countermodel(&f("[]p -> <>p"), &[], &b).unwrap();
        let c = find_countermodel(&f("[]p -> <>p"), &[], &b).unwrap();
        assert_eq!(a.models_examined, c.models_examined);
        assert_eq!(a.model, c.model);
        assert!(a.found);
    }

    #[test]
    fn rooted_filter() {
        let mut b = bounds(Logic::Prop, 2, 1, 1);
        let all = enumerate_models(&b).unwrap().len();
        b.rooted = true;
        let rooted = enumerate_models(&b).unwrap();
        assert!(rooted.len() < all);
        assert!(rooted.iter().all(Candidate::is_rooted));
    }

    #[test]
    fn bounds_are_checked() {
        assert!(matches!(
            enumerate_models(&bounds(Logic::Prop, 0, 1, 1)),
            Err(Error::Bounds(_))
        ));
        assert!(matches!(
            enumerate_models(&bounds(Logic::Prop, MAX_WORLDS + 1, 1, 1)),
            Err(Error::Bounds(_))
        ));
        assert_eq!("classicalK".parse::<Logic>().unwrap(), Logic::ClassicalK);
        assert!("k".parse::<Logic>().is_err());
    }

    #[test]
    fn modal_formula_in_prop_logic_is_an_error() {
        let r = find_countermodel(&f("[]p"), &[], &bounds(Logic::Prop, 1, 1, 1));
        assert_eq!(r, Err(Error::NoModalRelation));
    }
}
