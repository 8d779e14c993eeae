//! Propositional Kripke frames and models with the intuitionistic forcing
//! relation.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::pointset::PointSet;
use crate::semantics::{Interpretation, TruthAlgebra};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Name of a world. Any token without whitespace, `:` or `#`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct WorldId(String);

impl WorldId {
    pub fn new(name: &str) -> Result<WorldId> {
        if is_identifier(name) {
            Ok(WorldId(name.to_string()))
        } else {
            Err(Error::BadIdentifier(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for WorldId {
    fn from(s: &str) -> WorldId {
        WorldId(s.to_string())
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == ':' || c == '#')
}

pub(crate) fn is_atom_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite set of worlds under a preorder, stored reflexively and
/// transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<WorldId>,
    index: HashMap<WorldId, usize>,
    up: Vec<PointSet>,
}

impl Frame {
    /// Builds the frame whose order is the reflexive-transitive closure of
    /// `generators`.
    pub fn build<I>(worlds: Vec<WorldId>, generators: I) -> Result<Frame>
    where
        I: IntoIterator<Item = (WorldId, WorldId)>,
    {
        if worlds.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, w) in worlds.iter().enumerate() {
            if !is_identifier(w.as_str()) {
                return Err(Error::BadIdentifier(w.to_string()));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Duplicate(w.to_string()));
            }
        }
        let n = worlds.len();
        let mut up: Vec<PointSet> = (0..n).map(|i| PointSet::from_points(n, [i])).collect();
        for (a, b) in generators {
            let ia = *index
                .get(&a)
                .ok_or_else(|| Error::DanglingEndpoint(a.to_string()))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| Error::DanglingEndpoint(b.to_string()))?;
            up[ia].insert(ib);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Ok(Frame { worlds, index, up })
    }

    /// Frame from already-closed rows; callers guarantee the preorder laws.
    pub(crate) fn from_closed(worlds: Vec<WorldId>, up: Vec<PointSet>) -> Frame {
        let index = worlds
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Frame { worlds, index, up }
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn world(&self, i: usize) -> &WorldId {
        &self.worlds[i]
    }

    pub fn index_of(&self, w: &WorldId) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub(crate) fn require(&self, w: &WorldId) -> Result<usize> {
        self.index_of(w)
            .ok_or_else(|| Error::UnknownWorld(w.to_string()))
    }

    pub fn contains(&self, w: &WorldId) -> bool {
        self.index.contains_key(w)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn leq_named(&self, a: &WorldId, b: &WorldId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.leq(i, j),
            _ => false,
        }
    }

    /// Worlds above `i`, including `i`.
    pub fn up(&self, i: usize) -> &PointSet {
        &self.up[i]
    }

    pub(crate) fn up_rows(&self) -> &[PointSet] {
        &self.up
    }

    /// All pairs of the closed order, in index order.
    pub fn le_pairs(&self) -> Vec<(WorldId, WorldId)> {
        let mut out = Vec::new();
        for (i, row) in self.up.iter().enumerate() {
            for j in row.iter() {
                out.push((self.worlds[i].clone(), self.worlds[j].clone()));
            }
        }
        out
    }

    /// True when some world lies below every world.
    pub fn is_rooted(&self) -> bool {
        self.up.iter().any(|row| row.is_full())
    }

    /// Same worlds and same order, regardless of listing order.
    pub fn same_as(&self, other: &Frame) -> bool {
        self.len() == other.len()
            && self.worlds.iter().all(|w| other.contains(w))
            && self.le_set() == other.le_set()
    }

    fn le_set(&self) -> BTreeSet<(WorldId, WorldId)> {
        self.le_pairs().into_iter().collect()
    }
}

/// `candidate` is at least a partial copy of `reference`: its worlds are
/// among the reference's, it keeps every reference-successor of each world
/// it keeps, and the two orders agree on the kept worlds.
pub fn is_partial_copy(candidate: &Frame, reference: &Frame) -> bool {
    let mut map = Vec::with_capacity(candidate.len());
    for w in candidate.worlds() {
        match reference.index_of(w) {
            Some(i) => map.push(i),
            None => return false,
        }
    }
    for (ci, &ri) in map.iter().enumerate() {
        if !reference
            .up(ri)
            .iter()
            .all(|rj| candidate.contains(reference.world(rj)))
        {
            return false;
        }
        for (cj, &rj) in map.iter().enumerate() {
            if reference.leq(ri, rj) != candidate.leq(ci, cj) {
                return false;
            }
        }
    }
    true
}

/// The subframe of worlds above `j`, with the order restricted to it.
pub fn upward_restrict(frame: &Frame, j: &WorldId) -> Result<Frame> {
    let ji = frame.require(j)?;
    let keep: Vec<usize> = frame.up(ji).iter().collect();
    let worlds: Vec<WorldId> = keep.iter().map(|&i| frame.world(i).clone()).collect();
    let n = keep.len();
    let up = keep
        .iter()
        .map(|&a| {
            PointSet::from_points(
                n,
                keep.iter()
                    .enumerate()
                    .filter(|(_, &b)| frame.leq(a, b))
                    .map(|(k, _)| k),
            )
        })
        .collect();
    Ok(Frame::from_closed(worlds, up))
}

pub type Valuation = BTreeMap<WorldId, BTreeSet<String>>;

/// A frame with a hereditary valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropModel {
    frame: Frame,
    val: Vec<BTreeSet<String>>,
}

impl PropModel {
    /// Validates heredity; worlds missing from `val` get no atoms.
    pub fn build(frame: Frame, val: Valuation) -> Result<PropModel> {
        let mut by_index = vec![BTreeSet::new(); frame.len()];
        for (w, atoms) in val {
            let i = frame.require(&w)?;
            for a in &atoms {
                if !is_atom_name(a) {
                    return Err(Error::BadIdentifier(a.clone()));
                }
            }
            by_index[i] = atoms;
        }
        for i in 0..frame.len() {
            for j in frame.up(i).iter() {
                if let Some(atom) = by_index[i].difference(&by_index[j]).next() {
                    return Err(Error::Heredity {
                        from: frame.world(i).to_string(),
                        to: frame.world(j).to_string(),
                        atom: atom.clone(),
                    });
                }
            }
        }
        Ok(PropModel {
            frame,
            val: by_index,
        })
    }

    pub(crate) fn from_parts(frame: Frame, val: Vec<BTreeSet<String>>) -> PropModel {
        debug_assert_eq!(frame.len(), val.len());
        PropModel { frame, val }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn val(&self, i: usize) -> &BTreeSet<String> {
        &self.val[i]
    }

    pub fn valuation(&self) -> Valuation {
        self.frame
            .worlds()
            .iter()
            .cloned()
            .zip(self.val.iter().cloned())
            .collect()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.val.iter().flatten().cloned().collect()
    }

    pub(crate) fn atom_sets(&self) -> BTreeMap<String, PointSet> {
        let n = self.frame.len();
        let mut atoms: BTreeMap<String, PointSet> = BTreeMap::new();
        for (i, set) in self.val.iter().enumerate() {
            for a in set {
                atoms
                    .entry(a.clone())
                    .or_insert_with(|| PointSet::empty(n))
                    .insert(i);
            }
        }
        atoms
    }

    /// Intuitionistic clauses only; modal formulas are rejected.
    pub fn interpretation(&self) -> Interpretation {
        Interpretation::new(self.atom_sets(), self.frame.up_rows().to_vec())
    }

    pub fn forces(&self, w: &WorldId, f: &Formula) -> Result<bool> {
        let i = self.frame.require(w)?;
        self.interpretation().forces_at(i, f)
    }

    pub fn entails(&self, w: &WorldId, gamma: &[Formula], f: &Formula) -> Result<bool> {
        let i = self.frame.require(w)?;
        Ok(self.interpretation().entailment_set(gamma, f)?.contains(i))
    }

    pub fn valid(&self, gamma: &[Formula], f: &Formula) -> Result<bool> {
        Ok(self.interpretation().entailment_set(gamma, f)?.is_full())
    }
}

pub fn forces(model: &PropModel, w: &WorldId, f: &Formula) -> Result<bool> {
    model.forces(w, f)
}

pub fn entails(model: &PropModel, w: &WorldId, gamma: &[Formula], f: &Formula) -> Result<bool> {
    model.entails(w, gamma, f)
}

pub fn model_valid(model: &PropModel, gamma: &[Formula], f: &Formula) -> Result<bool> {
    model.valid(gamma, f)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn closure_of_generators() {
        let single = Frame::build(ids(&["w"]), []).unwrap();
        assert_eq!(single.le_pairs(), pairs(&[("w", "w")]));

        let chain = timeline_frame();
        let got: BTreeSet<_> = chain.le_pairs().into_iter().collect();
        let want: BTreeSet<_> = pairs(&[
            ("m", "m"),
            ("a", "a"),
            ("e", "e"),
            ("m", "a"),
            ("a", "e"),
            ("m", "e"),
        ])
        .into_iter()
        .collect();
        assert_eq!(got, want);

        let cycle = Frame::build(ids(&["w", "v"]), pairs(&[("w", "v"), ("v", "w")])).unwrap();
        assert_eq!(cycle.le_pairs().len(), 4);
    }

    #[test]
    fn frame_errors() {
        assert_eq!(Frame::build(vec![], []), Err(Error::EmptyFrame));
        assert_eq!(
            Frame::build(ids(&["w"]), pairs(&[("w", "x")])),
            Err(Error::DanglingEndpoint("x".into()))
        );
        assert_eq!(
            Frame::build(ids(&["w", "w"]), []),
            Err(Error::Duplicate("w".into()))
        );
        assert!(matches!(
            Frame::build(ids(&["a b"]), []),
            Err(Error::BadIdentifier(_))
        ));
    }

    #[test]
    fn heredity_is_validated() {
        let frame = Frame::build(ids(&["w", "w2"]), pairs(&[("w", "w2")])).unwrap();
        assert!(PropModel::build(frame.clone(), val(&[("w2", &["p"])])).is_ok());
        assert_eq!(
            PropModel::build(frame, val(&[("w", &["p"])])),
            Err(Error::Heredity {
                from: "w".into(),
                to: "w2".into(),
                atom: "p".into()
            })
        );
        let timeline = PropModel::build(
            timeline_frame(),
            val(&[("m", &["p"]), ("a", &["p"]), ("e", &["p", "q"])]),
        );
        assert!(timeline.is_ok());
    }

    #[test]
    fn forcing_examples() {
        let frame = Frame::build(ids(&["w"]), []).unwrap();
        let single = PropModel::build(frame, val(&[("w", &["p"])])).unwrap();
        assert!(forces(&single, &"w".into(), &f("p")).unwrap());

        let chain = two_chain();
        assert!(!forces(&chain, &"w".into(), &f("p | ~p")).unwrap());
        assert!(forces(&chain, &"w2".into(), &f("p | ~p")).unwrap());
        assert!(!forces(&chain, &"w".into(), &f("_|_")).unwrap());
        assert_eq!(
            forces(&chain, &"nowhere".into(), &f("p")),
            Err(Error::UnknownWorld("nowhere".into()))
        );
        assert_eq!(
            forces(&chain, &"w".into(), &f("[]p")),
            Err(Error::NoModalRelation)
        );
    }

    #[test]
    fn entailment_examples() {
        let chain = two_chain();
        for w in ["w", "w2"] {
            assert!(entails(&chain, &w.into(), &[f("p -> q"), f("p")], &f("q")).unwrap());
        }
        let frame = Frame::build(ids(&["w"]), []).unwrap();
        let single = PropModel::build(frame, val(&[("w", &["p"])])).unwrap();
        assert!(entails(&single, &"w".into(), &[], &f("p")).unwrap());
        assert!(!entails(&chain, &"w".into(), &[f("p")], &f("q")).unwrap());
    }

    #[test]
    fn validity_examples() {
        let chain = two_chain();
        assert!(model_valid(&chain, &[], &f("p -> p")).unwrap());
        assert!(!model_valid(&chain, &[], &f("p | ~p")).unwrap());
        assert!(model_valid(&chain, &[], &f("_|_ -> _|_")).unwrap());
    }

    #[test]
    fn partial_copies() {
        let k = timeline_frame();
        assert!(is_partial_copy(&k, &k));
        let k2 = Frame::build(ids(&["a", "e"]), pairs(&[("a", "e")])).unwrap();
        assert!(is_partial_copy(&k2, &k));
        let morning = Frame::build(ids(&["m"]), []).unwrap();
        assert!(!is_partial_copy(&morning, &k));
        // same worlds, order dropped
        let flat = Frame::build(ids(&["a", "e"]), []).unwrap();
        assert!(!is_partial_copy(&flat, &k));
    }

    #[test]
    fn upward_restriction() {
        let k = timeline_frame();
        let at_a = upward_restrict(&k, &"a".into()).unwrap();
        assert_eq!(at_a.worlds(), &ids(&["a", "e"])[..]);
        assert!(at_a.leq_named(&"a".into(), &"e".into()));
        assert!(!at_a.leq_named(&"e".into(), &"a".into()));
        assert!(is_partial_copy(&at_a, &k));

        let at_e = upward_restrict(&k, &"e".into()).unwrap();
        assert_eq!(at_e.len(), 1);

        let at_m = upward_restrict(&k, &"m".into()).unwrap();
        assert!(at_m.same_as(&k));

        assert_eq!(
            upward_restrict(&k, &"x".into()),
            Err(Error::UnknownWorld("x".into()))
        );
    }
}
