//! Seeded random partial and homogeneous models.

use crate::general::{GeneralModel, ModelId};
use crate::kripke::{Frame, PropModel, WorldId};
use crate::pointset::PointSet;
use crate::search::{preorders, restrict, upsets, MAX_WORLDS};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Extra shape imposed on a random `succ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SuccShape {
    #[default]
    Any,
    Reflexive,
    Transitive,
}

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    pub max_worlds: usize,
    pub max_submodels: usize,
    pub atoms: Vec<String>,
    pub shape: SuccShape,
}

impl Sampler {
    pub fn new(seed: u64, max_worlds: usize, max_submodels: usize, atoms: &[&str]) -> Sampler {
        assert!((1..=MAX_WORLDS).contains(&max_worlds), "max_worlds out of range");
        assert!(max_submodels >= 1, "need at least one submodel");
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_worlds,
            max_submodels,
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            shape: SuccShape::Any,
        }
    }

    pub fn with_shape(mut self, shape: SuccShape) -> Sampler {
        self.shape = shape;
        self
    }

    fn frame(&mut self) -> Frame {
        let n = self.rng.gen_range(1..=self.max_worlds);
        let up = preorders(n).choose(&mut self.rng).unwrap().clone();
        let names = (1..=n)
            .map(|i| WorldId::from(format!("w{i}").as_str()))
            .collect();
        Frame::from_closed(names, up)
    }

    fn valued(&mut self, frame: Frame) -> PropModel {
        let ups = upsets(frame.up_rows());
        let sets: Vec<PointSet> = self
            .atoms
            .iter()
            .map(|_| ups.choose(&mut self.rng).unwrap().clone())
            .collect();
        let val = (0..frame.len())
            .map(|w| {
                self.atoms
                    .iter()
                    .zip(&sets)
                    .filter(|(_, s)| s.contains(w))
                    .map(|(a, _)| a.clone())
                    .collect::<BTreeSet<_>>()
            })
            .collect();
        PropModel::from_parts(frame, val)
    }

    fn succ(&mut self, m: usize) -> Vec<PointSet> {
        let mut rows: Vec<PointSet> = (0..m)
            .map(|_| PointSet::from_points(m, (0..m).filter(|_| self.rng.gen_bool(0.5))))
            .collect();
        match self.shape {
            SuccShape::Any => {}
            SuccShape::Reflexive => {
                for (i, row) in rows.iter_mut().enumerate() {
                    row.insert(i);
                }
            }
            SuccShape::Transitive => {
                for k in 0..m {
                    let rk = rows[k].clone();
                    for row in rows.iter_mut() {
                        if row.contains(k) {
                            row.union_with(&rk);
                        }
                    }
                }
            }
        }
        rows
    }

    fn assemble(&mut self, models: Vec<PropModel>) -> GeneralModel {
        let m = models.len();
        let ids: Vec<ModelId> = (1..=m)
            .map(|i| ModelId::from(format!("K{i}").as_str()))
            .collect();
        let rows = self.succ(m);
        let succ = rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a, b)))
            .map(|(a, b)| (ids[a].clone(), ids[b].clone()))
            .collect::<Vec<_>>();
        GeneralModel::build(ids.into_iter().zip(models), succ).expect("sampled model is valid")
    }

    /// `K1` carries the reference frame; the others keep a random nonempty
    /// upset of it.
    pub fn partial(&mut self) -> GeneralModel {
        let reference = self.frame();
        let parts: Vec<PointSet> = upsets(reference.up_rows())
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        let m = self.rng.gen_range(1..=self.max_submodels);
        let mut models = vec![self.valued(reference.clone())];
        for _ in 1..m {
            let keep = parts.choose(&mut self.rng).unwrap().clone();
            let frame = restrict(&reference, &keep);
            models.push(self.valued(frame));
        }
        self.assemble(models)
    }

    pub fn homogeneous(&mut self) -> GeneralModel {
        let frame = self.frame();
        let m = self.rng.gen_range(1..=self.max_submodels);
        let models = (0..m).map(|_| self.valued(frame.clone())).collect();
        self.assemble(models)
    }
}
