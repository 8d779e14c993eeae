//! Acceptance suite. Run with `cargo test --test acceptance -- --nocapture`
//! to see one line per criterion.

mod common;

use kripke_core::birelational::{BirelationalModel, Condition, ModelClass};
use kripke_core::formula::{all_formulas, parse};
use kripke_core::general::{GeneralModel, HomogeneousModel, ModelId, PartialModel};
use kripke_core::higher_order::lift;
use kripke_core::kripke::{Frame, PropModel, WorldId};
use kripke_core::modelfile::parse_model_file;
use kripke_core::pointset::PointSet;
use kripke_core::sample::{Sampler, SuccShape};
use kripke_core::search::{for_each_model, Candidate, Logic, SearchBounds};
use kripke_core::semantics::{sweep, Interpretation, TruthAlgebra};
use kripke_core::transform::flatten;
use kripke_core::Formula;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

const SEPARATION_TOP: &str = "(~[]_|_)-><>T";
const SEPARATION_P: &str = "([](p|~p) & ~[]p) -> <>~p";
const CORPUS: usize = 500;
const DEPTH: usize = 3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:.0?}"))
}

fn atoms(names: &[&str]) -> Vec<String> {
    names.iter().map(|a| a.to_string()).collect()
}

fn wid(s: &str) -> WorldId {
    WorldId::new(s).unwrap()
}

fn mid(s: &str) -> ModelId {
    ModelId::new(s).unwrap()
}

fn separating(p_at: &[&str]) -> BirelationalModel {
    let mut text = String::from("model B\nworlds w w' w''\nle w w'\nr w' w''\n");
    for w in p_at {
        text.push_str(&format!("val {w} : p\n"));
    }
    text.push_str("end\n");
    parse_model_file(&text).unwrap().birelational().unwrap()
}

fn separating_frame_condition() -> Outcome {
    let start = Instant::now();
    let b = separating(&[]);
    let f = parse(SEPARATION_TOP).unwrap();
    ensure(b.forces_ik(&wid("w"), &parse("~[]_|_").unwrap()).unwrap(), || "~[]_|_ not forced at w".into())?;
    ensure(!b.forces_ik(&wid("w"), &f).unwrap(), || "formula forced at w".into())?;
    let reports = b.check_all();
    for c in [Condition::F1, Condition::F2] {
        let r = &reports[c as usize];
        ensure(r.condition == c && r.holds && r.unique, || format!("{c:?}: {r:?}"))?;
    }
    let f3 = &reports[Condition::F3 as usize];
    ensure(
        !f3.holds && f3.violations == vec![[wid("w"), wid("w'"), wid("w''")]],
        || format!("F3: {f3:?}"),
    )?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("F3 violated by (w, w', w''), {:.1?}", start.elapsed()))
}

fn separating_formula() -> Outcome {
    let start = Instant::now();
    let b = separating(&[]);
    ensure(!b.base().val(2).contains("p"), || "p at w''".into())?;
    let f = parse(SEPARATION_P).unwrap();
    ensure(!b.forces_ik(&wid("w"), &f).unwrap(), || "formula forced at w".into())?;
    // p elsewhere than w'' does not rescue the formula either
    let b2 = separating(&["w'"]);
    ensure(!b2.forces_ik(&wid("w"), &f).unwrap(), || "forced with p at w'".into())?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("refuted at w, {:.1?}", start.elapsed()))
}

fn mk_exhaustive() -> Outcome {
    let start = Instant::now();
    let fs = [parse(SEPARATION_TOP).unwrap(), parse(SEPARATION_P).unwrap()];
    let mut bounds = SearchBounds::new(Logic::Mk);
    bounds.max_worlds = 3;
    bounds.max_atoms = 1;
    let mut found = Vec::new();
    let mut strong = 0;
    let n = for_each_model(&bounds, &atoms(&["p"]), |c| {
        let Candidate::Birelational(b) = c else { unreachable!() };
        if b.classify() >= ModelClass::Strong {
            strong += 1;
        }
        let interp = b.mk_interpretation().unwrap();
        for f in &fs {
            if !interp.truth_set(f).unwrap().is_full() {
                found.push((c.to_text(), f.render()));
            }
        }
        true
    })
    .map_err(|e| e.to_string())?;
    ensure(strong == n, || "a non-strong model was enumerated".into())?;
    ensure(found.is_empty(), || format!("countermodel: {:?}", found[0]))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("{n} strong models, no countermodel, {:.1?}", start.elapsed()))
}

/// Sweeps every formula to `depth` through `algebras` and calls `compare`
/// with each tuple of truth sets and the representative formula.
fn sweep_all(
    algebras: &[&dyn TruthAlgebra],
    atoms: &[String],
    depth: usize,
    mut compare: impl FnMut(&[PointSet]) -> Result<(), String>,
) -> Result<usize, String> {
    let mut failure = None;
    let stats = sweep(algebras, atoms, depth, true, |sets, make| match compare(sets) {
        Ok(()) => true,
        Err(e) => {
            failure = Some(format!("{e} on {}", make().render()));
            false
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(stats.classes),
    }
}

fn mapped(a: &PointSet, b: &PointSet, map: &[usize]) -> bool {
    map.iter().enumerate().all(|(i, &j)| a.contains(i) == b.contains(j))
}

fn point_map(points: &[(ModelId, WorldId)], index: impl Fn(&ModelId, &WorldId) -> usize) -> Vec<usize> {
    points.iter().map(|(k, w)| index(k, w)).collect()
}

fn partial_corpus() -> Vec<GeneralModel> {
    let mut s = Sampler::new(4, 4, 3, &["p", "q"]);
    (0..CORPUS).map(|_| s.partial()).collect()
}

fn homogeneous_corpus() -> Vec<GeneralModel> {
    let mut s = Sampler::new(5, 4, 3, &["p", "q"]);
    (0..CORPUS).map(|_| s.homogeneous()).collect()
}

/// Library semantics, flattened model and the test oracle on the same sweep.
fn flatten_agreement(g: &GeneralModel, homogeneous: bool) -> Result<usize, String> {
    let flat = flatten(g);
    let (general, points, oracle): (Interpretation, _, _) = if homogeneous {
        let h = HomogeneousModel::new(g.clone()).map_err(|e| e.to_string())?;
        (h.interpretation().clone(), h.points(), common::homogeneous(g))
    } else {
        let p = PartialModel::new(g.clone(), None).map_err(|e| e.to_string())?;
        let o = common::partial(g, p.reference());
        (p.interpretation().clone(), p.points(), o)
    };
    let flat_interp = if homogeneous {
        flat.model.mk_interpretation()
    } else {
        flat.model.ik_interpretation()
    }
    .map_err(|e| format!("flattened model: {e}"))?;
    let to_flat = point_map(&points, |k, w| flat.index_of(k, w).unwrap());
    let to_oracle = point_map(&points, |k, w| oracle.index(Some(k), w));
    sweep_all(
        &[&general, &flat_interp, &oracle],
        &atoms(&["p", "q"]),
        DEPTH,
        |sets| {
            ensure(mapped(&sets[0], &sets[1], &to_flat), || "flattened model disagrees".into())?;
            ensure(mapped(&sets[0], &sets[2], &to_oracle), || "oracle disagrees".into())
        },
    )
}

fn flatten_partial() -> Outcome {
    let start = Instant::now();
    let corpus = partial_corpus();
    let mut classes = 0;
    for (i, g) in corpus.iter().enumerate() {
        ensure(g.len() <= 3 && g.ids().iter().all(|k| g.submodel(k).unwrap().frame().len() <= 4), || "out of bounds".into())?;
        let class = flatten(g).model.classify();
        ensure(class >= ModelClass::Birelational, || format!("model {i}: flattened class {class}"))?;
        classes += flatten_agreement(g, false).map_err(|e| format!("model {i}: {e}"))?;
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "{} partial models, {classes} formula classes, 0 disagreements, {:.1?}",
        corpus.len(),
        start.elapsed()
    ))
}

fn flatten_homogeneous() -> Outcome {
    let start = Instant::now();
    let corpus = homogeneous_corpus();
    let mut classes = 0;
    for (i, g) in corpus.iter().enumerate() {
        let flat = flatten(g);
        ensure(flat.model.classify() == ModelClass::Excessive, || format!("model {i} not excessive"))?;
        ensure(flat.model.check_all().iter().all(|r| r.holds && r.unique), || format!("model {i}: witnesses"))?;
        classes += flatten_agreement(g, true).map_err(|e| format!("model {i}: {e}"))?;
    }
    Ok(format!(
        "{} homogeneous models, all excessive, {classes} formula classes, 0 disagreements, {:.1?}",
        corpus.len(),
        start.elapsed()
    ))
}

/// Every truth set is closed upward along `le`.
fn check_upsets(le: &[Vec<usize>], sets: &[PointSet]) -> Result<(), String> {
    for s in sets {
        for (i, above) in le.iter().enumerate() {
            if s.contains(i) && above.iter().any(|&j| !s.contains(j)) {
                return Err(format!("forced at point {i} but not above it"));
            }
        }
    }
    Ok(())
}

fn monotone_over(logic: Logic, worlds: usize, submodels: usize, names: &[&str]) -> Result<u64, String> {
    let mut bounds = SearchBounds::new(logic);
    bounds.max_worlds = worlds;
    bounds.max_submodels = submodels;
    bounds.max_atoms = names.len();
    let atoms = atoms(names);
    let mut failure = None;
    let n = for_each_model(&bounds, &atoms, |c| {
        let r = monotone_candidate(c, logic, &atoms);
        if let Err(e) = r {
            failure = Some(format!("{e}\n{}", c.to_text()));
            return false;
        }
        true
    })
    .map_err(|e| e.to_string())?;
    failure.map_or(Ok(n), Err)
}

fn monotone_candidate(c: &Candidate, logic: Logic, atoms: &[String]) -> Result<(), String> {
    let (interp, le) = match (c, logic) {
        (Candidate::Prop(m), _) => (m.interpretation(), common::prop(m).le),
        (Candidate::Birelational(b), Logic::Ik) => (b.ik_interpretation().unwrap(), common::ik(b).le),
        (Candidate::Birelational(b), _) => (b.mk_interpretation().unwrap(), common::mk(b).le),
        (Candidate::General(g), _) => return monotone_general(g, logic == Logic::Homogeneous, atoms),
    };
    let modal = interp.has_modalities();
    let mut failure = None;
    sweep(&[&interp], atoms, DEPTH, modal, |sets, make| {
        match check_upsets(&le, sets) {
            Ok(()) => true,
            Err(e) => {
                failure = Some(format!("{e}: {}", make().render()));
                false
            }
        }
    });
    failure.map_or(Ok(()), Err)
}

fn monotone_general(g: &GeneralModel, homogeneous: bool, atoms: &[String]) -> Result<(), String> {
    let (interp, points) = if homogeneous {
        let h = HomogeneousModel::new(g.clone()).unwrap();
        (h.interpretation().clone(), h.points())
    } else {
        let p = PartialModel::new(g.clone(), None).unwrap();
        (p.interpretation().clone(), p.points())
    };
    let le: Vec<Vec<usize>> = points
        .iter()
        .map(|(k, w)| {
            let f = g.submodel(k).unwrap().frame();
            (0..points.len())
                .filter(|&j| points[j].0 == *k && f.leq_named(w, &points[j].1))
                .collect()
        })
        .collect();
    sweep_all(&[&interp], atoms, DEPTH, |sets| check_upsets(&le, sets)).map(|_| ())
}

fn monotonicity() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let runs: [(&str, Logic, usize, usize, &[&str]); 6] = [
        ("prop", Logic::Prop, 4, 1, &["p", "q"]),
        ("ik", Logic::Ik, 3, 1, &["p", "q"]),
        ("mk", Logic::Mk, 3, 1, &["p", "q"]),
        ("partial", Logic::Partial, 3, 2, &["p"]),
        ("homogeneous", Logic::Homogeneous, 3, 2, &["p"]),
        ("partial", Logic::Partial, 2, 3, &["p"]),
    ];
    for (name, logic, w, s, names) in runs {
        let n = monotone_over(logic, w, s, names).map_err(|e| format!("{name}: {e}"))?;
        parts.push(format!("{name} {n}"));
    }
    let pq = atoms(&["p", "q"]);
    for g in partial_corpus() {
        monotone_general(&g, false, &pq)?;
    }
    for g in homogeneous_corpus() {
        monotone_general(&g, true, &pq)?;
    }
    parts.push(format!("sampled {}", 2 * CORPUS));
    Ok(format!("{} models, 0 violations, {:.1?}", parts.join(", "), start.elapsed()))
}

fn prop_6_1() -> Outcome {
    let start = Instant::now();
    let generated = all_formulas(&["p", "q"], 2, true);
    let mut checked = 0;
    for (shape, scheme) in [(SuccShape::Reflexive, "T"), (SuccShape::Transitive, "4")] {
        let mut s = Sampler::new(61, 4, 3, &["p", "q"]).with_shape(shape);
        for i in 0..100 {
            let g = s.homogeneous();
            ensure(match shape {
                SuccShape::Reflexive => g.succ_reflexive(),
                _ => g.succ_transitive(),
            }, || format!("{scheme}: model {i} has the wrong shape"))?;
            let h = HomogeneousModel::new(g).unwrap();
            let interp = h.interpretation();
            for a in &generated {
                let f = match shape {
                    SuccShape::Reflexive => Formula::implies(Formula::boxed(a.clone()), a.clone()),
                    _ => Formula::implies(
                        Formula::boxed(a.clone()),
                        Formula::boxed(Formula::boxed(a.clone())),
                    ),
                };
                ensure(interp.truth_set(&f).unwrap().is_full(), || {
                    format!("{scheme}: {} fails in model {i}", f.render())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "200 models x {} formulas, {checked} instances valid, {:.1?}",
        generated.len(),
        start.elapsed()
    ))
}

fn classical_degeneration() -> Outcome {
    let start = Instant::now();
    let mut bounds = SearchBounds::new(Logic::ClassicalK);
    bounds.max_submodels = 3;
    bounds.max_atoms = 2;
    let pq = atoms(&["p", "q"]);
    let mut failure = None;
    let mut classes = 0;
    let n = for_each_model(&bounds, &pq, |c| {
        let Candidate::General(g) = c else { unreachable!() };
        let h = HomogeneousModel::new(g.clone()).unwrap();
        let oracle = common::ClassicalK::from_general(g);
        let map: Vec<usize> = h
            .points()
            .iter()
            .map(|(k, _)| oracle.worlds.iter().position(|x| x == k).unwrap())
            .collect();
        let r = sweep_all(&[h.interpretation(), &oracle], &pq, DEPTH, |sets| {
            ensure(mapped(&sets[0], &sets[1], &map), || "classical K disagrees".into())
        });
        match r {
            Ok(k) => {
                classes += k;
                true
            }
            Err(e) => {
                failure = Some(format!("{e}\n{}", c.to_text()));
                false
            }
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(e) = failure {
        return Err(e);
    }
    // representative formulas through the recursive evaluator too
    let fs = all_formulas(&["p", "q"], 2, true);
    let mut s = Sampler::new(8, 1, 3, &["p", "q"]);
    for _ in 0..50 {
        let g = s.homogeneous();
        let h = HomogeneousModel::new(g.clone()).unwrap();
        let oracle = common::ClassicalK::from_general(&g);
        for f in &fs {
            for (i, k) in oracle.worlds.iter().enumerate() {
                let w = &g.submodel(k).unwrap().frame().worlds()[0];
                ensure(h.forces(k, w, f).unwrap() == oracle.holds(i, f), || {
                    format!("{} at {k}", f.render())
                })?;
            }
        }
    }
    Ok(format!("{n} models, {classes} formula classes, 0 disagreements, {:.1?}", start.elapsed()))
}

fn higher_order_bridge() -> Outcome {
    let start = Instant::now();
    let mut classes = 0;
    for (i, g) in homogeneous_corpus().iter().enumerate() {
        let h = HomogeneousModel::new(g.clone()).unwrap();
        let lifted = lift(&h);
        let interp = lifted.interpretation();
        let map: Vec<usize> = h
            .points()
            .iter()
            .map(|(k, w)| {
                lifted
                    .locations()
                    .iter()
                    .position(|p| p[0] == k.as_str() && p[1] == w.as_str())
                    .unwrap()
            })
            .collect();
        classes += sweep_all(&[h.interpretation(), &interp], &atoms(&["p", "q"]), DEPTH, |sets| {
            ensure(mapped(&sets[0], &sets[1], &map), || format!("model {i}: lift disagrees"))
        })?;
        // evaluate through object paths as well
        let f = parse("[]p -> <>(q | ~p)").unwrap();
        for (k, w) in h.points() {
            let v = lifted.evaluate(&[k.as_str(), w.as_str()], &f).unwrap();
            ensure(v == h.forces(&k, &w, &f).unwrap(), || format!("model {i}: evaluate at {w}:{k}"))?;
        }
        let whole = lifted.evaluate(&[], &f).unwrap();
        ensure(whole == h.valid_in_model(&[], &f).unwrap(), || format!("model {i}: whole model"))?;
    }
    Ok(format!("{CORPUS} models, {classes} formula classes, 0 disagreements, {:.1?}", start.elapsed()))
}

fn timeline(succ: &[(&str, &str)]) -> PartialModel {
    let chain = || Frame::build(
        ["m", "a", "e"].map(wid).to_vec(),
        [(wid("m"), wid("a")), (wid("a"), wid("e"))],
    ).unwrap();
    let val = |entries: &[(&str, &[&str])]| {
        entries
            .iter()
            .map(|(w, ps)| (wid(w), ps.iter().map(|p| p.to_string()).collect()))
            .collect()
    };
    let k = PropModel::build(chain(), val(&[])).unwrap();
    let k1 = PropModel::build(chain(), val(&[("m", &["p"]), ("a", &["p"]), ("e", &["p", "q"])])).unwrap();
    let k2 = PropModel::build(
        Frame::build(vec![wid("a"), wid("e")], [(wid("a"), wid("e"))]).unwrap(),
        val(&[("e", &["q"])]),
    )
    .unwrap();
    let g = GeneralModel::build(
        [(mid("K"), k), (mid("K'"), k1), (mid("K''"), k2)],
        succ.iter().map(|(a, b)| (mid(a), mid(b))),
    )
    .unwrap();
    PartialModel::new(g, Some(mid("K"))).unwrap()
}

fn worked_example() -> Outcome {
    let dp = parse("<>p").unwrap();
    let bq = parse("[]q").unwrap();
    let m = timeline(&[("K", "K'")]);
    ensure(m.forces(&mid("K"), &wid("m"), &dp).unwrap(), || "<>p false at (K, m)".into())?;
    let m = timeline(&[("K", "K'"), ("K", "K''")]);
    ensure(m.forces(&mid("K"), &wid("e"), &bq).unwrap(), || "[]q false at (K, e)".into())?;
    let m = timeline(&[("K", "K'"), ("K", "K''"), ("K", "K")]);
    ensure(!m.forces(&mid("K"), &wid("e"), &bq).unwrap(), || "[]q true at (K, e) with K > K".into())?;
    Ok("<>p at (K,m); []q at (K,e) true, then false with K > K".into())
}

fn parser() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let strategy = common::formula(&["p", "q", "r"], 6, true);
    let mut deepest = 0;
    for i in 0..1000 {
        let f = strategy.new_tree(&mut runner).unwrap().current();
        deepest = deepest.max(f.depth());
        let text = f.render();
        ensure(parse(&text).as_ref() == Ok(&f), || format!("formula {i}: {text}"))?;
    }
    let not = |f| Formula::implies(f, Formula::Bottom);
    let p = || Formula::atom("p");
    let expected = [
        ("~p", not(p())),
        (
            "[](p|~p) & ~[]p -> <>~p",
            Formula::implies(
                Formula::and(Formula::boxed(Formula::or(p(), not(p()))), not(Formula::boxed(p()))),
                Formula::diamond(not(p())),
            ),
        ),
        (
            SEPARATION_TOP,
            Formula::implies(
                not(Formula::boxed(Formula::Bottom)),
                Formula::diamond(Formula::implies(Formula::Bottom, Formula::Bottom)),
            ),
        ),
    ];
    for (text, tree) in expected {
        ensure(parse(text).as_ref() == Ok(&tree), || format!("{text} parsed as {:?}", parse(text)))?;
    }
    Ok(format!("1000 round trips (depth up to {deepest}), 3 documented trees"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("separating model, F3", separating_frame_condition),
        ("separating model, formula", separating_formula),
        ("MK exhaustive search", mk_exhaustive),
        ("flatten equivalence, partial vs IK", flatten_partial),
        ("flatten equivalence, homogeneous vs MK", flatten_homogeneous),
        ("monotonicity", monotonicity),
        ("T and 4 on reflexive and transitive succ", prop_6_1),
        ("classical degeneration", classical_degeneration),
        ("higher-order lift", higher_order_bridge),
        ("timeline example", worked_example),
        ("parser", parser),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(e) => {
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
