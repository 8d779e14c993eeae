//! Browser bindings: check a formula on a model file, flatten a general
//! model, search for a countermodel. Every call returns a JSON graph whose
//! nodes carry the verdict at that point.

use kripke_core::birelational::ModelClass;
use kripke_core::formula::parse;
use kripke_core::general::GeneralModel;
use kripke_core::kripke::Frame;
use kripke_core::modelfile::{parse_model_file, write_birelational, FileKind, ModelFile, Subject};
use kripke_core::search::{find_countermodel, Locus, Logic, SearchBounds};
use kripke_core::semantics::TruthAlgebra;
use kripke_core::transform::{flatten, GeneralClass};
use kripke_core::Formula;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize, PartialEq)]
pub struct Node {
    pub id: usize,
    pub label: String,
    /// Submodel or enclosing object, empty for plain worlds.
    pub group: String,
    /// Number of points strictly below in the group's order.
    pub rank: usize,
    pub value: bool,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Graph {
    pub logic: String,
    pub formula: String,
    pub valid: bool,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

fn formula(s: &str) -> Result<Formula, String> {
    parse(s).map_err(|e| format!("formula: {e}"))
}

fn logic(s: &str) -> Result<Option<Logic>, String> {
    match s.trim() {
        "" | "auto" => Ok(None),
        l => l.parse().map(Some).map_err(|e: kripke_core::Error| e.to_string()),
    }
}

fn model_file(text: &str) -> Result<ModelFile, String> {
    parse_model_file(text).map_err(|e| format!("model: {e}"))
}

/// Strict pairs with nothing strictly between them.
fn covering(frame: &Frame) -> Vec<(usize, usize)> {
    let n = frame.len();
    let lt = |a: usize, b: usize| frame.leq(a, b) && !frame.leq(b, a);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

fn rank(frame: &Frame, i: usize) -> usize {
    (0..frame.len())
        .filter(|&j| frame.leq(j, i) && !frame.leq(i, j))
        .count()
}

fn locus_index(loci: &[Locus], k: Option<&str>, w: &str) -> Option<usize> {
    loci.iter().position(|l| {
        l.world.as_str() == w && l.submodel.as_ref().map(|s| s.as_str()) == k
    })
}

/// Nodes and edges of a single block or general model, in `loci` order.
fn structure(file: &ModelFile, loci: &[Locus], values: &[bool]) -> Result<(Vec<Node>, Vec<Edge>), String> {
    let mut nodes: Vec<Node> = loci
        .iter()
        .zip(values)
        .enumerate()
        .map(|(id, (l, &value))| Node {
            id,
            label: l.to_string(),
            group: l.submodel.as_ref().map(|k| k.to_string()).unwrap_or_default(),
            rank: 0,
            value,
        })
        .collect();
    let mut edges = Vec::new();
    let err = |e: kripke_core::Error| e.to_string();
    if file.kind() == FileKind::Single {
        let b = file.birelational().map_err(err)?;
        let frame = b.base().frame();
        let at = |i: usize| locus_index(loci, None, frame.world(i).as_str()).unwrap();
        for i in 0..frame.len() {
            nodes[at(i)].rank = rank(frame, i);
        }
        for (a, c) in covering(frame) {
            edges.push(Edge { from: at(a), to: at(c), kind: "le" });
        }
        for (a, c) in b.r_pairs() {
            let (x, y) = (locus_index(loci, None, a.as_str()), locus_index(loci, None, c.as_str()));
            edges.push(Edge { from: x.unwrap(), to: y.unwrap(), kind: "r" });
        }
        return Ok((nodes, edges));
    }
    let g: GeneralModel = file.general().map_err(err)?;
    for (k, m) in g.submodels() {
        let frame = m.frame();
        let at = |i: usize| locus_index(loci, Some(k.as_str()), frame.world(i).as_str()).unwrap();
        for i in 0..frame.len() {
            nodes[at(i)].rank = rank(frame, i);
        }
        for (a, c) in covering(frame) {
            edges.push(Edge { from: at(a), to: at(c), kind: "le" });
        }
    }
    for (k1, k2) in g.succ_pairs() {
        for (i, l) in loci.iter().enumerate() {
            if l.submodel.as_ref() != Some(&k1) {
                continue;
            }
            if let Some(j) = locus_index(loci, Some(k2.as_str()), l.world.as_str()) {
                edges.push(Edge { from: i, to: j, kind: "succ" });
            }
        }
    }
    Ok((nodes, edges))
}

fn graph_of(file: &ModelFile, f: &Formula, logic_choice: Option<Logic>) -> Result<Graph, String> {
    let subject = file.subject(logic_choice, None).map_err(|e| e.to_string())?;
    let name = subject.logic_name().to_string();
    match subject {
        Subject::Points { interp, loci, .. } => {
            let set = interp.truth_set(f).map_err(|e| e.to_string())?;
            let values: Vec<bool> = (0..loci.len()).map(|i| set.contains(i)).collect();
            let (nodes, edges) = structure(file, &loci, &values)?;
            Ok(Graph {
                logic: name,
                formula: f.render(),
                valid: set.is_full(),
                nodes,
                edges,
            })
        }
        Subject::Nested(h) => {
            let set = h.interpretation().truth_set(f).map_err(|e| e.to_string())?;
            let nodes = h
                .locations()
                .into_iter()
                .enumerate()
                .map(|(id, path)| {
                    let (world, outer) = path.split_last().unwrap();
                    Node {
                        id,
                        label: world.clone(),
                        group: outer.join("/"),
                        rank: 0,
                        value: set.contains(id),
                    }
                })
                .collect();
            Ok(Graph {
                logic: name,
                formula: f.render(),
                valid: set.is_full(),
                nodes,
                edges: Vec::new(),
            })
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Evaluates `formula` at every point of the model in `model_text`.
/// An empty `logic` picks the file's natural logic.
pub fn check_model(model_text: &str, formula_text: &str, logic_name: &str) -> Result<String, String> {
    let file = model_file(model_text)?;
    let f = formula(formula_text)?;
    Ok(to_json(&graph_of(&file, &f, logic(logic_name)?)?))
}

#[derive(Serialize)]
struct Flattened {
    class: ModelClass,
    text: String,
    graph: Graph,
}

/// Flattens a general model and evaluates `formula` on the result, with IK
/// for partial models and MK for homogeneous ones.
pub fn flatten_model(model_text: &str, formula_text: &str) -> Result<String, String> {
    let file = model_file(model_text)?;
    let f = formula(formula_text)?;
    let g = file.general().map_err(|e| e.to_string())?;
    let class = file.general_class(&g, None).map_err(|e| e.to_string())?;
    let flat = flatten(&g);
    let text = write_birelational("flat", &flat.model);
    let logic = match class {
        GeneralClass::Partial => Logic::Ik,
        GeneralClass::Homogeneous => Logic::Mk,
    };
    let reloaded = model_file(&text)?;
    Ok(to_json(&Flattened {
        class: flat.model.classify(),
        graph: graph_of(&reloaded, &f, Some(logic))?,
        text,
    }))
}

#[derive(Serialize)]
struct Search {
    found: bool,
    examined: u64,
    locus: Option<String>,
    text: Option<String>,
    graph: Option<Graph>,
}

/// Smallest-first search for a model refuting `formula`.
pub fn search_countermodel(formula_text: &str, logic_name: &str, max_worlds: usize) -> Result<String, String> {
    let f = formula(formula_text)?;
    let logic = logic(logic_name)?.unwrap_or(Logic::Ik);
    let mut bounds = SearchBounds::new(logic);
    bounds.max_worlds = max_worlds;
    let outcome = find_countermodel(&f, &[], &bounds).map_err(|e| e.to_string())?;
    let graph = match &outcome.model {
        Some(text) => Some(graph_of(&model_file(text)?, &f, Some(logic))?),
        None => None,
    };
    Ok(to_json(&Search {
        found: outcome.found,
        examined: outcome.models_examined,
        locus: outcome.locus.map(|l| l.to_string()),
        text: outcome.model,
        graph,
    }))
}

#[wasm_bindgen]
pub fn check(model_text: &str, formula_text: &str, logic_name: &str) -> Result<String, JsError> {
    check_model(model_text, formula_text, logic_name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = flattenModel)]
pub fn flatten_js(model_text: &str, formula_text: &str) -> Result<String, JsError> {
    flatten_model(model_text, formula_text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn countermodel(formula_text: &str, logic_name: &str, max_worlds: usize) -> Result<String, JsError> {
    search_countermodel(formula_text, logic_name, max_worlds).map_err(|e| JsError::new(&e))
}
