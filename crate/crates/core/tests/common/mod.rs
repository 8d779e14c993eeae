#![allow(dead_code)]

//! Direct, clause-by-clause evaluators used as oracles. They read the
//! models only through their public accessors and share no code with the
//! library's evaluators.

use kripke_core::birelational::BirelationalModel;
use kripke_core::general::{GeneralModel, ModelId};
use kripke_core::kripke::{PropModel, WorldId};
use kripke_core::pointset::PointSet;
use kripke_core::semantics::TruthAlgebra;
use kripke_core::Formula;
use proptest::prelude::*;

/// A finite structure described point by point.
pub struct Naive {
    pub points: Vec<(Option<ModelId>, WorldId)>,
    /// `le[i]`: points the implication clause at `i` ranges over.
    pub le: Vec<Vec<usize>>,
    pub val: Vec<Vec<String>>,
    pub boxes: Option<Vec<Vec<usize>>>,
    pub diamonds: Option<Vec<Vec<usize>>>,
    /// Implication read classically.
    pub classical: bool,
}

impl Naive {
    pub fn truth(&self, f: &Formula) -> Vec<bool> {
        let n = self.points.len();
        match f {
            Formula::Atom(a) => (0..n).map(|i| self.val[i].contains(a)).collect(),
            Formula::Bottom => vec![false; n],
            Formula::And(a, b) => {
                let (x, y) = (self.truth(a), self.truth(b));
                (0..n).map(|i| x[i] && y[i]).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.truth(a), self.truth(b));
                (0..n).map(|i| x[i] || y[i]).collect()
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.truth(a), self.truth(b));
                if self.classical {
                    (0..n).map(|i| !x[i] || y[i]).collect()
                } else {
                    (0..n)
                        .map(|i| self.le[i].iter().all(|&j| !x[j] || y[j]))
                        .collect()
                }
            }
            Formula::Box(a) => {
                let x = self.truth(a);
                let targets = self.boxes.as_ref().expect("modal formula on a modal-free model");
                (0..n).map(|i| targets[i].iter().all(|&j| x[j])).collect()
            }
            Formula::Diamond(a) => {
                let x = self.truth(a);
                let targets = self.diamonds.as_ref().expect("modal formula on a modal-free model");
                (0..n).map(|i| targets[i].iter().any(|&j| x[j])).collect()
            }
        }
    }

    pub fn entails(&self, gamma: &[Formula], f: &Formula) -> Vec<bool> {
        let gs: Vec<Vec<bool>> = gamma.iter().map(|g| self.truth(g)).collect();
        let x = self.truth(f);
        (0..self.points.len())
            .map(|i| {
                self.le[i]
                    .iter()
                    .all(|&j| !gs.iter().all(|g| g[j]) || x[j])
            })
            .collect()
    }

    pub fn index(&self, k: Option<&ModelId>, w: &WorldId) -> usize {
        self.points
            .iter()
            .position(|(a, b)| a.as_ref() == k && b == w)
            .expect("known point")
    }
}

fn atoms_of(m: &PropModel, i: usize) -> Vec<String> {
    m.val(i).iter().cloned().collect()
}

pub fn prop(m: &PropModel) -> Naive {
    let f = m.frame();
    let n = f.len();
    Naive {
        points: f.worlds().iter().map(|w| (None, w.clone())).collect(),
        le: (0..n).map(|i| (0..n).filter(|&j| f.leq(i, j)).collect()).collect(),
        val: (0..n).map(|i| atoms_of(m, i)).collect(),
        boxes: None,
        diamonds: None,
        classical: false,
    }
}

fn r_holds(b: &BirelationalModel, i: usize, j: usize) -> bool {
    let f = b.base().frame();
    b.r_pairs()
        .iter()
        .any(|(x, y)| x == f.world(i) && y == f.world(j))
}

/// IK: `[]A` at w iff A at every w'' with w <= w' R w''.
pub fn ik(b: &BirelationalModel) -> Naive {
    let mut m = prop(b.base());
    let f = b.base().frame();
    let n = f.len();
    m.boxes = Some(
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&k| (0..n).any(|j| f.leq(i, j) && r_holds(b, j, k)))
                    .collect()
            })
            .collect(),
    );
    m.diamonds = Some(
        (0..n)
            .map(|i| (0..n).filter(|&k| r_holds(b, i, k)).collect())
            .collect(),
    );
    m
}

/// MK: `[]A` at w iff A at every R-successor of w.
pub fn mk(b: &BirelationalModel) -> Naive {
    let mut m = ik(b);
    m.boxes = m.diamonds.clone();
    m
}

fn general_points(g: &GeneralModel) -> Vec<(Option<ModelId>, WorldId)> {
    g.submodels()
        .flat_map(|(k, m)| {
            m.frame()
                .worlds()
                .iter()
                .map(move |w| (Some(k.clone()), w.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn general_base(g: &GeneralModel) -> Naive {
    let points = general_points(g);
    let n = points.len();
    let submodel = |k: &Option<ModelId>| g.submodel(k.as_ref().unwrap()).unwrap();
    let le = (0..n)
        .map(|i| {
            let (k, w) = &points[i];
            let f = submodel(k).frame();
            (0..n)
                .filter(|&j| points[j].0 == *k && f.leq_named(w, &points[j].1))
                .collect()
        })
        .collect();
    let val = points
        .iter()
        .map(|(k, w)| {
            let m = submodel(k);
            atoms_of(m, m.frame().index_of(w).unwrap())
        })
        .collect();
    Naive {
        points,
        le,
        val,
        boxes: None,
        diamonds: None,
        classical: false,
    }
}

fn succ_holds(g: &GeneralModel, a: &ModelId, b: &ModelId) -> bool {
    g.succ_pairs().iter().any(|(x, y)| x == a && y == b)
}

/// Partial models, with `<=` read in `reference`.
pub fn partial(g: &GeneralModel, reference: &ModelId) -> Naive {
    let mut m = general_base(g);
    let rf = g.submodel(reference).unwrap().frame();
    let n = m.points.len();
    let pts = m.points.clone();
    m.boxes = Some(
        (0..n)
            .map(|i| {
                let (k, w) = (pts[i].0.as_ref().unwrap(), &pts[i].1);
                (0..n)
                    .filter(|&j| {
                        let (k2, w2) = (pts[j].0.as_ref().unwrap(), &pts[j].1);
                        succ_holds(g, k, k2) && rf.leq_named(w, w2)
                    })
                    .collect()
            })
            .collect(),
    );
    m.diamonds = Some(
        (0..n)
            .map(|i| {
                let (k, w) = (pts[i].0.as_ref().unwrap(), &pts[i].1);
                (0..n)
                    .filter(|&j| succ_holds(g, k, pts[j].0.as_ref().unwrap()) && pts[j].1 == *w)
                    .collect()
            })
            .collect(),
    );
    m
}

/// Homogeneous models: both modalities look at the same world in the
/// successor submodels.
pub fn homogeneous(g: &GeneralModel) -> Naive {
    let mut m = general_base(g);
    let n = m.points.len();
    let pts = m.points.clone();
    let targets: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    pts[j].1 == pts[i].1
                        && succ_holds(g, pts[i].0.as_ref().unwrap(), pts[j].0.as_ref().unwrap())
                })
                .collect()
        })
        .collect();
    m.boxes = Some(targets.clone());
    m.diamonds = Some(targets);
    m
}

/// Classical modal logic K, reading each submodel of a singleton-frame
/// family as one world and `succ` as accessibility.
pub struct ClassicalK {
    pub worlds: Vec<ModelId>,
    pub val: Vec<Vec<String>>,
    pub access: Vec<Vec<bool>>,
}

impl ClassicalK {
    pub fn from_general(g: &GeneralModel) -> ClassicalK {
        let worlds: Vec<ModelId> = g.ids().to_vec();
        let val = worlds
            .iter()
            .map(|k| {
                let m = g.submodel(k).unwrap();
                assert_eq!(m.frame().len(), 1, "singleton frames only");
                atoms_of(m, 0)
            })
            .collect();
        let access = worlds
            .iter()
            .map(|a| worlds.iter().map(|b| succ_holds(g, a, b)).collect())
            .collect();
        ClassicalK {
            worlds,
            val,
            access,
        }
    }

    pub fn holds(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => self.val[w].contains(a),
            Formula::Bottom => false,
            Formula::And(a, b) => self.holds(w, a) && self.holds(w, b),
            Formula::Or(a, b) => self.holds(w, a) || self.holds(w, b),
            Formula::Implies(a, b) => !self.holds(w, a) || self.holds(w, b),
            Formula::Box(a) => (0..self.worlds.len())
                .filter(|&v| self.access[w][v])
                .all(|v| self.holds(v, a)),
            Formula::Diamond(a) => (0..self.worlds.len())
                .filter(|&v| self.access[w][v])
                .any(|v| self.holds(v, a)),
        }
    }
}

fn set(n: usize, mut pick: impl FnMut(usize) -> bool) -> PointSet {
    PointSet::from_points(n, (0..n).filter(|&i| pick(i)))
}

impl TruthAlgebra for Naive {
    fn universe(&self) -> usize {
        self.points.len()
    }

    fn atom(&self, name: &str) -> PointSet {
        set(self.points.len(), |i| self.val[i].iter().any(|a| a == name))
    }

    fn implies(&self, a: &PointSet, b: &PointSet) -> PointSet {
        set(self.points.len(), |i| {
            if self.classical {
                !a.contains(i) || b.contains(i)
            } else {
                self.le[i].iter().all(|&j| !a.contains(j) || b.contains(j))
            }
        })
    }

    fn necessity(&self, a: &PointSet) -> Option<PointSet> {
        let t = self.boxes.as_ref()?;
        Some(set(self.points.len(), |i| t[i].iter().all(|&j| a.contains(j))))
    }

    fn possibility(&self, a: &PointSet) -> Option<PointSet> {
        let t = self.diamonds.as_ref()?;
        Some(set(self.points.len(), |i| t[i].iter().any(|&j| a.contains(j))))
    }

    fn has_modalities(&self) -> bool {
        self.boxes.is_some()
    }
}

impl TruthAlgebra for ClassicalK {
    fn universe(&self) -> usize {
        self.worlds.len()
    }

    fn atom(&self, name: &str) -> PointSet {
        set(self.worlds.len(), |i| self.val[i].iter().any(|a| a == name))
    }

    fn implies(&self, a: &PointSet, b: &PointSet) -> PointSet {
        set(self.worlds.len(), |i| !a.contains(i) || b.contains(i))
    }

    fn necessity(&self, a: &PointSet) -> Option<PointSet> {
        let n = self.worlds.len();
        Some(set(n, |i| (0..n).all(|j| !self.access[i][j] || a.contains(j))))
    }

    fn possibility(&self, a: &PointSet) -> Option<PointSet> {
        let n = self.worlds.len();
        Some(set(n, |i| (0..n).any(|j| self.access[i][j] && a.contains(j))))
    }

    fn has_modalities(&self) -> bool {
        true
    }
}

/// Random formulas over `atoms`, at most `depth` deep.
pub fn formula(atoms: &'static [&'static str], depth: u32, modal: bool) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(atoms).prop_map(Formula::atom),
        1 => Just(Formula::Bottom),
    ];
    leaf.prop_recursive(depth, 64, 2, move |inner| {
        let binary = prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        ];
        if modal {
            prop_oneof![
                3 => binary,
                1 => inner.clone().prop_map(Formula::boxed),
                1 => inner.prop_map(Formula::diamond),
            ]
            .boxed()
        } else {
            binary.boxed()
        }
    })
    .boxed()
}
