//! Truth-set evaluation shared by every forcing relation in the crate.
//!
//! A semantics is presented as a [`TruthAlgebra`]: the set of points where a
//! compound formula holds is computed from the sets of its immediate
//! subformulas. Each model class compiles its clauses into an
//! [`Interpretation`], which records for every point
//!
//! * the points that the implication clause quantifies over,
//! * the points the box clause quantifies over,
//! * the points the diamond clause may pick a witness from.
//!
//! Because the labelling is compositional, [`sweep`] can visit every formula
//! up to a given depth while only touching each distinct tuple of truth sets
//! once.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::pointset::PointSet;
use std::collections::{BTreeMap, HashSet};

pub trait TruthAlgebra {
    /// Number of evaluation points.
    fn universe(&self) -> usize;

    fn atom(&self, name: &str) -> PointSet;

    fn implies(&self, a: &PointSet, b: &PointSet) -> PointSet;

    /// `None` when the structure carries no modal accessibility.
    fn necessity(&self, a: &PointSet) -> Option<PointSet>;

    fn possibility(&self, a: &PointSet) -> Option<PointSet>;

    fn has_modalities(&self) -> bool;

    fn bottom(&self) -> PointSet {
        PointSet::empty(self.universe())
    }

    fn conjunction(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.intersection(b)
    }

    fn disjunction(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.union(b)
    }

    fn missing_modality(&self, f: &Formula) -> Error {
        let _ = f;
        Error::NoModalRelation
    }

    fn truth_set(&self, f: &Formula) -> Result<PointSet> {
        Ok(match f {
            Formula::Atom(p) => self.atom(p),
            Formula::Bottom => self.bottom(),
            Formula::And(a, b) => self.conjunction(&self.truth_set(a)?, &self.truth_set(b)?),
            Formula::Or(a, b) => self.disjunction(&self.truth_set(a)?, &self.truth_set(b)?),
            Formula::Implies(a, b) => self.implies(&self.truth_set(a)?, &self.truth_set(b)?),
            Formula::Box(a) => self
                .necessity(&self.truth_set(a)?)
                .ok_or_else(|| self.missing_modality(f))?,
            Formula::Diamond(a) => self
                .possibility(&self.truth_set(a)?)
                .ok_or_else(|| self.missing_modality(f))?,
        })
    }

    /// Points where `gamma` entails `f`: every point above that forces all
    /// of `gamma` also forces `f`. An empty `gamma` reduces to forcing.
    fn entailment_set(&self, gamma: &[Formula], f: &Formula) -> Result<PointSet> {
        let target = self.truth_set(f)?;
        if gamma.is_empty() {
            return Ok(target);
        }
        let mut premises = PointSet::full(self.universe());
        for g in gamma {
            premises = premises.intersection(&self.truth_set(g)?);
        }
        Ok(self.implies(&premises, &target))
    }
}

#[derive(Clone, Debug)]
struct ModalTargets {
    necessity: Vec<PointSet>,
    possibility: Vec<PointSet>,
}

/// A finite structure compiled from some model class's forcing clauses.
#[derive(Clone, Debug)]
pub struct Interpretation {
    len: usize,
    atoms: BTreeMap<String, PointSet>,
    up: Vec<PointSet>,
    modal: Option<ModalTargets>,
    gap: Option<Error>,
}

impl Interpretation {
    /// `up[p]` lists the points the implication clause at `p` ranges over.
    pub(crate) fn new(atoms: BTreeMap<String, PointSet>, up: Vec<PointSet>) -> Self {
        Interpretation {
            len: up.len(),
            atoms,
            up,
            modal: None,
            gap: None,
        }
    }

    pub(crate) fn with_modal(mut self, necessity: Vec<PointSet>, possibility: Vec<PointSet>) -> Self {
        debug_assert_eq!(necessity.len(), self.len);
        debug_assert_eq!(possibility.len(), self.len);
        self.modal = Some(ModalTargets {
            necessity,
            possibility,
        });
        self
    }

    /// Error to report for modal formulas when no modal targets exist.
    pub(crate) fn with_gap(mut self, gap: Error) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn up(&self, p: usize) -> &PointSet {
        &self.up[p]
    }

    pub fn necessity_targets(&self, p: usize) -> Option<&PointSet> {
        self.modal.as_ref().map(|m| &m.necessity[p])
    }

    pub fn possibility_targets(&self, p: usize) -> Option<&PointSet> {
        self.modal.as_ref().map(|m| &m.possibility[p])
    }

    /// True iff the set is closed upward along the implication order.
    pub fn is_upset(&self, s: &PointSet) -> bool {
        s.iter().all(|p| self.up[p].is_subset(s))
    }

    pub fn forces_at(&self, p: usize, f: &Formula) -> Result<bool> {
        Ok(self.truth_set(f)?.contains(p))
    }
}

impl TruthAlgebra for Interpretation {
    fn universe(&self) -> usize {
        self.len
    }

    fn atom(&self, name: &str) -> PointSet {
        self.atoms
            .get(name)
            .cloned()
            .unwrap_or_else(|| PointSet::empty(self.len))
    }

    fn implies(&self, a: &PointSet, b: &PointSet) -> PointSet {
        let bad = a.difference(b);
        PointSet::from_points(
            self.len,
            (0..self.len).filter(|&p| !self.up[p].intersects(&bad)),
        )
    }

    fn necessity(&self, a: &PointSet) -> Option<PointSet> {
        let m = self.modal.as_ref()?;
        Some(PointSet::from_points(
            self.len,
            (0..self.len).filter(|&p| m.necessity[p].is_subset(a)),
        ))
    }

    fn possibility(&self, a: &PointSet) -> Option<PointSet> {
        let m = self.modal.as_ref()?;
        Some(PointSet::from_points(
            self.len,
            (0..self.len).filter(|&p| m.possibility[p].intersects(a)),
        ))
    }

    fn has_modalities(&self) -> bool {
        self.modal.is_some()
    }

    fn missing_modality(&self, f: &Formula) -> Error {
        match &self.gap {
            Some(Error::PolicyGap(_)) => Error::PolicyGap(f.render()),
            Some(e) => e.clone(),
            None => Error::NoModalRelation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    And,
    Or,
    Implies,
}

/// Outcome of a [`sweep`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Distinct truth-set tuples met, each standing for every formula that
    /// produces it.
    pub classes: usize,
    /// Set when the visitor asked to stop.
    pub stopped: bool,
}

/// Visits every formula over `atoms` of depth at most `depth`, evaluated in
/// all `algebras` at once.
///
/// Formulas producing the same tuple of truth sets are interchangeable in
/// every compound formula, so the tuple is visited once, with the first
/// (shallowest) formula found as representative. The visitor receives the
/// tuple and a closure building the representative; returning `false` stops
/// the sweep. Modal connectives are included when `modal` is set, which
/// requires every algebra to support them.
pub fn sweep<F>(
    algebras: &[&dyn TruthAlgebra],
    atoms: &[String],
    depth: usize,
    modal: bool,
    mut visit: F,
) -> SweepStats
where
    F: FnMut(&[PointSet], &dyn Fn() -> Formula) -> bool,
{
    assert!(
        !modal || algebras.iter().all(|a| a.has_modalities()),
        "modal sweep over a structure without modalities"
    );
    let mut classes: Vec<(Vec<PointSet>, Formula)> = Vec::new();
    let mut seen: HashSet<Vec<PointSet>> = HashSet::new();
    let mut stats = SweepStats::default();

    macro_rules! offer {
        ($key:expr, $make:expr, $keep:expr) => {{
            let key: Vec<PointSet> = $key;
            if !seen.contains(&key) {
                stats.classes += 1;
                if !visit(&key, &$make) {
                    stats.stopped = true;
                    return stats;
                }
                if $keep {
                    classes.push((key.clone(), $make()));
                }
                seen.insert(key);
            }
        }};
    }

    for a in atoms {
        let f = Formula::atom(a);
        offer!(
            algebras.iter().map(|alg| alg.atom(a)).collect(),
            || f.clone(),
            true
        );
    }
    offer!(
        algebras.iter().map(|alg| alg.bottom()).collect(),
        || Formula::Bottom,
        true
    );

    let mut fresh_from = 0;
    for d in 1..=depth {
        let keep = d < depth;
        let known = classes.len();
        for i in fresh_from..known {
            if !modal {
                break;
            }
            let (sets, f) = classes[i].clone();
            offer!(
                algebras
                    .iter()
                    .zip(&sets)
                    .map(|(alg, s)| alg.necessity(s).expect("checked above"))
                    .collect(),
                || Formula::boxed(f.clone()),
                keep
            );
            offer!(
                algebras
                    .iter()
                    .zip(&sets)
                    .map(|(alg, s)| alg.possibility(s).expect("checked above"))
                    .collect(),
                || Formula::diamond(f.clone()),
                keep
            );
        }
        for i in 0..known {
            for j in 0..known {
                if i < fresh_from && j < fresh_from {
                    continue;
                }
                for op in [Op::And, Op::Or, Op::Implies] {
                    let key = {
                        let (a, _) = &classes[i];
                        let (b, _) = &classes[j];
                        algebras
                            .iter()
                            .enumerate()
                            .map(|(k, alg)| match op {
                                Op::And => alg.conjunction(&a[k], &b[k]),
                                Op::Or => alg.disjunction(&a[k], &b[k]),
                                Op::Implies => alg.implies(&a[k], &b[k]),
                            })
                            .collect()
                    };
                    let fa = classes[i].1.clone();
                    let fb = classes[j].1.clone();
                    offer!(
                        key,
                        || match op {
                            Op::And => Formula::and(fa.clone(), fb.clone()),
                            Op::Or => Formula::or(fa.clone(), fb.clone()),
                            Op::Implies => Formula::implies(fa.clone(), fb.clone()),
                        },
                        keep
                    );
                }
            }
        }
        fresh_from = known;
        if fresh_from == classes.len() && keep {
            // No new classes: deeper formulas cannot produce new tuples.
            break;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::all_formulas;

    /// Two-point chain 0 <= 1, p true at 1 only, box/diamond along 0 -> 1.
    fn chain() -> Interpretation {
        let mut atoms = BTreeMap::new();
        atoms.insert("p".to_string(), PointSet::from_points(2, [1]));
        let up = vec![PointSet::from_points(2, [0, 1]), PointSet::from_points(2, [1])];
        Interpretation::new(atoms, up).with_modal(
            vec![PointSet::from_points(2, [1]), PointSet::empty(2)],
            vec![PointSet::from_points(2, [1]), PointSet::empty(2)],
        )
    }

    #[test]
    fn excluded_middle_fails_at_root() {
        let i = chain();
        let lem = crate::formula::parse("p | ~p").unwrap();
        assert_eq!(i.truth_set(&lem).unwrap(), PointSet::from_points(2, [1]));
    }

    #[test]
    fn missing_modality_is_an_error() {
        let i = Interpretation::new(BTreeMap::new(), vec![PointSet::full(1)]);
        let f = crate::formula::parse("[]p").unwrap();
        assert_eq!(i.truth_set(&f), Err(Error::NoModalRelation));
    }

    #[test]
    fn entailment_reduces_to_forcing_without_premises() {
        let i = chain();
        let f = crate::formula::parse("<>p -> p").unwrap();
        assert_eq!(i.entailment_set(&[], &f).unwrap(), i.truth_set(&f).unwrap());
        let q = crate::formula::parse("p").unwrap();
        // p entails p everywhere
        assert!(i.entailment_set(std::slice::from_ref(&q), &q).unwrap().is_full());
    }

    #[test]
    fn sweep_covers_brute_force_enumeration() {
        let i = chain();
        let atoms = vec!["p".to_string()];
        let mut swept = HashSet::new();
        sweep(&[&i], &atoms, 2, true, |sets, _| {
            swept.insert(sets[0].clone());
            true
        });
        let brute: HashSet<PointSet> = all_formulas(&["p"], 2, true)
            .iter()
            .map(|f| i.truth_set(f).unwrap())
            .collect();
        assert_eq!(swept, brute);
    }

    #[test]
    fn sweep_representatives_evaluate_to_their_class() {
        let i = chain();
        let atoms = vec!["p".to_string()];
        sweep(&[&i], &atoms, 3, true, |sets, make| {
            let f = make();
            assert!(f.depth() <= 3);
            assert_eq!(&i.truth_set(&f).unwrap(), &sets[0]);
            true
        });
    }

    #[test]
    fn sweep_stops_on_request() {
        let i = chain();
        let mut n = 0;
        let stats = sweep(&[&i], &["p".to_string()], 3, true, |_, _| {
            n += 1;
            n < 2
        });
        assert!(stats.stopped);
        assert_eq!(n, 2);
    }
}
