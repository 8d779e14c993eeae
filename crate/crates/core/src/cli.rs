//! The `kripke` command line.
//!
//! Exit status 0 means the query was answered (a formula failing is still an
//! answer), 1 a usage, parse or input error, 2 a broken internal guarantee.

use crate::birelational::{BirelationalModel, ConditionReport, ModelClass, WitnessPolicy};
use crate::error::Error;
use crate::formula::{all_formulas, parse, parse_formula_list, Formula};
use crate::general::ModelId;
use crate::kripke::WorldId;
use crate::modelfile::{
    describe_levels, parse_model_file, write_birelational, FileKind, ModelFile, Subject,
};
use crate::search::{find_countermodel, for_each_model, canonical_atoms, Locus, Logic, SearchBounds};
use crate::semantics::TruthAlgebra;
use crate::transform::{equivalence_report, flatten, GeneralClass};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "kripke", version, about = "Model checker for intuitionistic modal Kripke semantics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse formulas and print their normal rendering.
    Parse(ParseArgs),
    /// Evaluate a formula at every point of a model.
    Check(CheckArgs),
    /// Report the F1-F4 frame conditions.
    FrameCheck(FrameArgs),
    /// Report which model class a file belongs to.
    Classify(ModelArgs),
    /// Flatten a general model into a birelational one.
    Flatten(FlattenArgs),
    /// Compare a general model with its flattening.
    EquivReport(EquivArgs),
    /// Search for a countermodel within bounds.
    Countermodel(SearchArgs),
    /// List every model within bounds.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Write output to a file.
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParseArgs {
    #[arg(long, value_name = "STR", required_unless_present = "formulas")]
    formula: Option<String>,
    /// One formula per line.
    #[arg(long, value_name = "PATH")]
    formulas: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Read a general model as this class.
    #[arg(long = "as", value_name = "CLASS", value_parser = parse_class)]
    as_class: Option<GeneralClass>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_name = "STR")]
    formula: String,
    /// Premises separated by `;`.
    #[arg(long, value_name = "STR")]
    gamma: Option<String>,
    #[arg(long, value_parser = parse_logic)]
    logic: Option<Logic>,
    /// `<world>[:<submodel>]`; for nested models `<world>:<object>:...`
    /// from the innermost object out.
    #[arg(long, value_name = "POINT")]
    at: Option<String>,
}

#[derive(Args, Debug)]
struct FrameArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Accept several witnesses where one is expected.
    #[arg(long)]
    existence: bool,
}

#[derive(Args, Debug)]
struct FlattenArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_name = "STR", conflicts_with = "formulas")]
    formula: Option<String>,
    /// One formula per line.
    #[arg(long, value_name = "PATH")]
    formulas: Option<PathBuf>,
    /// Premise sets, `;` inside a set; repeat the flag for more sets.
    #[arg(long, value_name = "STR")]
    gamma: Vec<String>,
    /// Without formulas, check every formula up to this depth.
    #[arg(long, default_value_t = 2)]
    depth: usize,
}

#[derive(Args, Debug)]
struct Bounds {
    #[arg(long, value_parser = parse_logic)]
    logic: Logic,
    #[arg(long, default_value_t = 3)]
    max_worlds: usize,
    #[arg(long, default_value_t = 1)]
    max_atoms: usize,
    #[arg(long, default_value_t = 2)]
    max_submodels: usize,
    /// Only models whose frames have a least world.
    #[arg(long)]
    rooted: bool,
}

impl Bounds {
    fn get(&self) -> SearchBounds {
        SearchBounds {
            max_worlds: self.max_worlds,
            max_atoms: self.max_atoms,
            max_submodels: self.max_submodels,
            logic: self.logic,
            rooted: self.rooted,
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_name = "STR")]
    formula: String,
    #[arg(long, value_name = "STR")]
    gamma: Option<String>,
    #[command(flatten)]
    bounds: Bounds,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    bounds: Bounds,
    /// Print only the number of models.
    #[arg(long)]
    count: bool,
    #[command(flatten)]
    out: Output,
}

fn parse_logic(s: &str) -> Result<Logic, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_class(s: &str) -> Result<GeneralClass, String> {
    match s {
        "partial" => Ok(GeneralClass::Partial),
        "homogeneous" => Ok(GeneralClass::Homogeneous),
        _ => Err(format!("expected `partial` or `homogeneous`, got `{s}`")),
    }
}

enum Failure {
    Input(String),
    Breach(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let target = output_path(&cli.command);
    let result = std::panic::catch_unwind(|| dispatch(cli.command))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(Failure::Breach(msg))
        });
    match result {
        Ok(text) => emit(&text, target, out, err),
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Breach(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            2
        }
    }
}

fn emit(text: &str, target: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    // a breach report still goes to the requested place, then sets status 2
    let (body, code) = match text.strip_prefix(BREACH) {
        Some(rest) => (rest, 2),
        None => (text, 0),
    };
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, body) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => {
            let _ = write!(out, "{body}");
        }
    }
    code
}

const BREACH: &str = "\u{0}breach\u{0}";

fn output_path(c: &Command) -> Option<PathBuf> {
    match c {
        Command::Parse(a) => a.out.output.clone(),
        Command::Check(a) => a.model.out.output.clone(),
        Command::FrameCheck(a) => a.model.out.output.clone(),
        Command::Classify(a) => a.out.output.clone(),
        Command::Flatten(a) => a.model.out.output.clone(),
        Command::EquivReport(a) => a.model.out.output.clone(),
        Command::Countermodel(a) => a.out.output.clone(),
        Command::Enumerate(a) => a.out.output.clone(),
    }
}

fn dispatch(c: Command) -> Outcome {
    match c {
        Command::Parse(a) => cmd_parse(a),
        Command::Check(a) => cmd_check(a),
        Command::FrameCheck(a) => cmd_frame_check(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Flatten(a) => cmd_flatten(a),
        Command::EquivReport(a) => cmd_equiv(a),
        Command::Countermodel(a) => cmd_countermodel(a),
        Command::Enumerate(a) => cmd_enumerate(a),
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<ModelFile, Failure> {
    parse_model_file(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn formula(s: &str) -> Result<Formula, Failure> {
    parse(s).map_err(|e| Failure::Input(format!("formula `{s}`: {e}")))
}

fn gamma(s: &Option<String>) -> Result<Vec<Formula>, Failure> {
    match s {
        None => Ok(Vec::new()),
        Some(s) => s
            .split(';')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(formula)
            .collect(),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ParsedFormula {
    input: String,
    rendered: String,
    complexity: usize,
    depth: usize,
    atoms: Vec<String>,
    modal: bool,
}

fn cmd_parse(a: ParseArgs) -> Outcome {
    let mut items = Vec::new();
    if let Some(s) = &a.formula {
        items.push((s.clone(), formula(s)?));
    }
    if let Some(p) = &a.formulas {
        let text = read(p)?;
        let fs = parse_formula_list(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
        let lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        items.extend(lines.map(str::to_string).zip(fs));
    }
    let parsed: Vec<ParsedFormula> = items
        .into_iter()
        .map(|(input, f)| ParsedFormula {
            input,
            rendered: f.render(),
            complexity: f.complexity(),
            depth: f.depth(),
            atoms: f.atoms().into_iter().collect(),
            modal: f.is_modal(),
        })
        .collect();
    if a.out.json {
        return Ok(json(&parsed));
    }
    let mut s = String::new();
    for p in parsed {
        s.push_str(&format!(
            "{}\n  complexity {}, depth {}, atoms {{{}}}\n",
            p.rendered,
            p.complexity,
            p.depth,
            p.atoms.join(", ")
        ));
    }
    Ok(s)
}

#[derive(Serialize)]
struct Verdict {
    #[serde(flatten)]
    at: Locus,
    value: bool,
}

#[derive(Serialize)]
struct CheckReport {
    logic: String,
    formula: String,
    gamma: Vec<String>,
    points: Vec<Verdict>,
    valid: bool,
}

fn parse_at(s: &str) -> Vec<String> {
    s.split(':').map(|p| p.trim().to_string()).collect()
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let file = load(&a.model.model)?;
    let f = formula(&a.formula)?;
    let gamma = gamma(&a.gamma)?;
    if file.kind() == FileKind::HigherOrder && a.logic.is_some() {
        return Err(Failure::Input("--logic does not apply to nmodel files".into()));
    }
    let subj = file.subject(a.logic, a.model.as_class)?;
    let logic = subj.logic_name().to_string();
    let at = a.at.as_deref().map(parse_at);
    let mut points = Vec::new();
    let valid;
    match subj {
        Subject::Points { interp, loci: pts, .. } => {
            let set = interp.entailment_set(&gamma, &f)?;
            valid = set.is_full();
            for (i, p) in pts.into_iter().enumerate() {
                points.push(Verdict {
                    at: p,
                    value: set.contains(i),
                });
            }
            if let Some(at) = &at {
                let (w, k) = match at.as_slice() {
                    [w] => (w.as_str(), None),
                    [w, k] => (w.as_str(), Some(k.as_str())),
                    _ => return Err(Failure::Input(format!("bad --at `{}`", at.join(":")))),
                };
                points.retain(|v| {
                    v.at.world.as_str() == w
                        && v.at.submodel.as_ref().map(ModelId::as_str) == k
                });
                if points.is_empty() {
                    return Err(Failure::Input(format!("no point `{}` in the model", at.join(":"))));
                }
            }
        }
        Subject::Nested(h) => {
            if !gamma.is_empty() {
                return Err(Failure::Input("--gamma does not apply to nmodel files".into()));
            }
            let locations: Vec<Vec<String>> = match &at {
                Some(at) => vec![at.iter().rev().cloned().collect()],
                None => h.locations(),
            };
            let mut all = true;
            for loc in locations {
                let path: Vec<&str> = loc.iter().map(String::as_str).collect();
                let value = h.evaluate(&path, &f)?;
                all &= value;
                let (world, rest) = loc.split_last().expect("locations are nonempty");
                let submodel = if rest.is_empty() {
                    None
                } else {
                    Some(ModelId::from(rest.iter().rev().cloned().collect::<Vec<_>>().join(":").as_str()))
                };
                points.push(Verdict {
                    at: Locus {
                        submodel,
                        world: WorldId::from(world.as_str()),
                    },
                    value,
                });
            }
            valid = if at.is_none() { all } else { h.evaluate(&[], &f)? };
        }
    }
    let report = CheckReport {
        logic,
        formula: f.render(),
        gamma: gamma.iter().map(Formula::render).collect(),
        points,
        valid,
    };
    if a.model.out.json {
        return Ok(json(&report));
    }
    let mut s = format!("logic: {}\nformula: {}\n", report.logic, report.formula);
    if !report.gamma.is_empty() {
        s.push_str(&format!("gamma: {}\n", report.gamma.join("; ")));
    }
    for v in &report.points {
        s.push_str(&format!("{}: {}\n", v.at, v.value));
    }
    s.push_str(&format!("valid in model: {}\n", report.valid));
    Ok(s)
}

fn birelational_of(file: &ModelFile) -> Result<BirelationalModel, Failure> {
    match file.kind() {
        FileKind::Single => Ok(file.birelational()?),
        FileKind::General => Ok(flatten(&file.general()?).model),
        FileKind::HigherOrder => Err(Failure::Input(
            "frame conditions apply to model files, not nmodel files".into(),
        )),
    }
}

#[derive(Serialize)]
struct FrameReport {
    conditions: Vec<ConditionReport>,
    class: ModelClass,
}

fn render_triples(ts: &[[WorldId; 3]]) -> String {
    ts.iter()
        .map(|t| format!("({}, {}, {})", t[0], t[1], t[2]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_frame_check(a: FrameArgs) -> Outcome {
    let file = load(&a.model.model)?;
    let mut b = birelational_of(&file)?;
    if a.existence {
        b = b.with_policy(WitnessPolicy::Existence);
    }
    let report = FrameReport {
        conditions: b.check_all(),
        class: b.classify(),
    };
    if a.model.out.json {
        return Ok(json(&report));
    }
    let mut s = String::new();
    for r in &report.conditions {
        let line = if !r.holds {
            format!("{}: fails {}", r.condition, render_triples(&r.violations))
        } else if r.unique {
            format!("{}: holds, unique", r.condition)
        } else {
            format!(
                "{}: holds, not unique {}",
                r.condition,
                render_triples(&r.nonunique)
            )
        };
        s.push_str(&line);
        s.push('\n');
    }
    s.push_str(&format!("class: {}\n", report.class));
    Ok(s)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Classification {
    Propositional { worlds: usize },
    Birelational { class: ModelClass },
    General {
        submodels: usize,
        partial: Option<ModelId>,
        homogeneous: bool,
        succ_reflexive: bool,
        succ_transitive: bool,
        rooted: bool,
    },
    HigherOrder {
        level: usize,
        unirelational: bool,
        finitely_relational: bool,
        objects: std::collections::BTreeMap<usize, Vec<String>>,
    },
}

fn cmd_classify(a: ModelArgs) -> Outcome {
    let file = load(&a.model)?;
    let c = match file.kind() {
        FileKind::Single if file.single()?.r.is_empty() => Classification::Propositional {
            worlds: file.prop_model()?.frame().len(),
        },
        FileKind::Single => Classification::Birelational {
            class: file.birelational()?.classify(),
        },
        FileKind::General => {
            let g = file.general()?;
            Classification::General {
                submodels: g.len(),
                partial: file.reference().or_else(|| g.validate_partial()),
                homogeneous: g.validate_homogeneous(),
                succ_reflexive: g.succ_reflexive(),
                succ_transitive: g.succ_transitive(),
                rooted: g.is_rooted(),
            }
        }
        FileKind::HigherOrder => {
            let h = file.higher_order()?;
            Classification::HigherOrder {
                level: h.level(),
                unirelational: h.is_unirelational(),
                finitely_relational: h.is_finitely_relational(),
                objects: describe_levels(&h),
            }
        }
    };
    if a.out.json {
        return Ok(json(&c));
    }
    Ok(match c {
        Classification::Propositional { worlds } => {
            format!("propositional model, {worlds} world(s)\n")
        }
        Classification::Birelational { class } => format!("class: {class}\n"),
        Classification::General {
            submodels,
            partial,
            homogeneous,
            succ_reflexive,
            succ_transitive,
            rooted,
        } => {
            let class = if homogeneous {
                "homogeneous".to_string()
            } else if let Some(r) = &partial {
                format!("partial (reference {r})")
            } else {
                "general (neither partial nor homogeneous)".to_string()
            };
            format!(
                "{class}\nsubmodels: {submodels}\nsucc reflexive: {succ_reflexive}\nsucc transitive: {succ_transitive}\nrooted: {rooted}\n"
            )
        }
        Classification::HigherOrder {
            level,
            unirelational,
            finitely_relational,
            ..
        } => format!(
            "level {level} model\nunirelational: {unirelational}\nfinitely relational: {finitely_relational}\n"
        ),
    })
}

fn cmd_flatten(a: FlattenArgs) -> Outcome {
    let file = load(&a.model.model)?;
    let g = file.general()?;
    let class = file.general_class(&g, a.model.as_class)?;
    let flat = flatten(&g);
    let got = flat.model.classify();
    let text = write_birelational("flat", &flat.model);
    if got < class.expected_flat_class() {
        return Err(Failure::Breach(format!(
            "flattened {} model classifies as {got}",
            serde_json::to_string(&class).unwrap().trim_matches('"')
        )));
    }
    if a.model.out.json {
        #[derive(Serialize)]
        struct Flat<'a> {
            class: ModelClass,
            worlds: usize,
            model: &'a str,
        }
        return Ok(json(&Flat {
            class: got,
            worlds: flat.worlds.len(),
            model: &text,
        }));
    }
    Ok(text)
}

fn cmd_equiv(a: EquivArgs) -> Outcome {
    let file = load(&a.model.model)?;
    let g = file.general()?;
    let class = file.general_class(&g, a.model.as_class)?;
    let formulas = if let Some(s) = &a.formula {
        vec![formula(s)?]
    } else if let Some(p) = &a.formulas {
        parse_formula_list(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
    } else {
        let atoms: Vec<String> = g.atoms().into_iter().take(2).collect();
        let atoms = if atoms.is_empty() { canonical_atoms(1) } else { atoms };
        let names: Vec<&str> = atoms.iter().map(String::as_str).collect();
        all_formulas(&names, a.depth.min(2), true)
    };
    let gammas = a
        .gamma
        .iter()
        .map(|s| gamma(&Some(s.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let report = equivalence_report(&g, Some(class), &formulas, &gammas)?;
    let mut s = if a.model.out.json {
        json(&report)
    } else {
        let mut s = format!(
            "class: {}\nflattened class: {}\nchecked: {}\ndisagreements: {}\n",
            serde_json::to_string(&report.class).unwrap().trim_matches('"'),
            report.flat_class,
            report.checked,
            report.disagreements.len()
        );
        for d in &report.disagreements {
            s.push_str(&format!(
                "  {}:{} [{}] {}: general {}, flat {}\n",
                d.world,
                d.submodel,
                d.gamma.join("; "),
                d.formula,
                d.general,
                d.flat
            ));
        }
        s
    };
    if !report.disagreements.is_empty() {
        s.insert_str(0, BREACH);
    }
    Ok(s)
}

fn cmd_countermodel(a: SearchArgs) -> Outcome {
    let f = formula(&a.formula)?;
    let gamma = gamma(&a.gamma)?;
    let outcome = find_countermodel(&f, &gamma, &a.bounds.get())?;
    if outcome.found {
        // re-check the serialized model independently of the search
        let text = outcome.model.as_ref().expect("found implies a model");
        let file = parse_model_file(text).map_err(|e| Failure::Breach(e.to_string()))?;
        let subj = file
            .subject(Some(a.bounds.logic), None)
            .map_err(|_| Failure::Breach("countermodel does not reload".into()))?;
        let Subject::Points { interp, loci: pts, .. } = subj else {
            return Err(Failure::Breach("countermodel reloads as nmodel".into()));
        };
        let locus = outcome.locus.as_ref().expect("found implies a locus");
        let i = pts
            .iter()
            .position(|p| p == locus)
            .ok_or_else(|| Failure::Breach("countermodel locus is missing".into()))?;
        if interp.entailment_set(&gamma, &f)?.contains(i) {
            return Err(Failure::Breach("countermodel does not refute the formula".into()));
        }
    }
    if a.out.json {
        #[derive(Serialize)]
        struct Report<'a> {
            #[serde(flatten)]
            outcome: &'a crate::search::SearchOutcome,
            elapsed_ms: f64,
        }
        return Ok(json(&Report {
            outcome: &outcome,
            elapsed_ms: outcome.elapsed.as_secs_f64() * 1000.0,
        }));
    }
    let mut s = String::new();
    match (&outcome.model, &outcome.locus) {
        (Some(m), Some(l)) => {
            s.push_str(&format!("countermodel found, fails at {l}\n"));
            s.push_str(m);
        }
        _ => s.push_str("no countermodel within bounds\n"),
    }
    s.push_str(&format!(
        "# models examined: {}, {:.1} ms\n",
        outcome.models_examined,
        outcome.elapsed.as_secs_f64() * 1000.0
    ));
    Ok(s)
}

fn cmd_enumerate(a: EnumerateArgs) -> Outcome {
    let bounds = a.bounds.get();
    let mut texts = Vec::new();
    let count = for_each_model(&bounds, &canonical_atoms(bounds.max_atoms), |c| {
        if !a.count {
            texts.push(c.to_text());
        }
        true
    })?;
    if a.count {
        return Ok(if a.out.json {
            json(&serde_json::json!({ "count": count }))
        } else {
            format!("{count}\n")
        });
    }
    if a.out.json {
        return Ok(json(&texts));
    }
    let mut s = String::new();
    for (i, t) in texts.iter().enumerate() {
        s.push_str(&format!("# model {}\n{t}", i + 1));
    }
    Ok(s)
}
