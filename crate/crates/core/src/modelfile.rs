//! The line-oriented model file format.
//!
//! ```text
//! # comments run to the end of the line
//! model K
//! worlds m a e
//! le m a
//! le a e
//! r a e
//! val e : p q
//! end
//! reference K
//! succ K K
//! ```
//!
//! `le` lines generate a preorder, `r` lines are taken as given. Worlds
//! without a `val` line carry no atoms. Several `model` blocks with `succ`
//! lines describe a general model. `nmodel <Id> level <n>` blocks nest
//! `model` and `nmodel` blocks and declare relations on them with
//! `rel <name> <a> <b>` (or `rel <name>` for an empty one) and optionally
//! `modal <name> mk|ik|defer`.

use crate::birelational::BirelationalModel;
use crate::error::{Error, Result};
use crate::general::{GeneralModel, ModelId};
use crate::general::{HomogeneousModel, PartialModel};
use crate::higher_order::{HigherOrderModel, LevelPolicy, ModalRule, NamedPairs};
use crate::kripke::{is_atom_name, is_identifier, Frame, PropModel, Valuation, WorldId};
use crate::search::{Locus, Logic};
use crate::semantics::Interpretation;
use crate::transform::{flatten, GeneralClass};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::ModelFile {
        line,
        msg: msg.into(),
    }
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::ModelFile { .. } => e,
        other => err(line, other.to_string()),
    }
}

type Pair = (WorldId, WorldId, usize);

/// What a model file is evaluated on.
#[derive(Clone, Debug)]
pub enum Subject {
    Points {
        logic: Logic,
        interp: Interpretation,
        loci: Vec<Locus>,
    },
    Nested(HigherOrderModel),
}

impl Subject {
    pub fn logic_name(&self) -> &'static str {
        match self {
            Subject::Points { logic, .. } => logic.name(),
            Subject::Nested(_) => "higher-order",
        }
    }
}

fn plain_loci(ws: &[WorldId]) -> Vec<Locus> {
    ws.iter()
        .map(|w| Locus {
            submodel: None,
            world: w.clone(),
        })
        .collect()
}

fn general_loci(ps: Vec<(ModelId, WorldId)>) -> Vec<Locus> {
    ps.into_iter()
        .map(|(k, w)| Locus {
            submodel: Some(k),
            world: w,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelBlock {
    pub id: ModelId,
    pub line: usize,
    pub worlds: Vec<WorldId>,
    pub le: Vec<Pair>,
    pub r: Vec<Pair>,
    pub val: Vec<(WorldId, BTreeSet<String>, usize)>,
}

impl ModelBlock {
    fn check_world(&self, w: &WorldId, line: usize) -> Result<()> {
        if self.worlds.contains(w) {
            Ok(())
        } else {
            Err(err(line, format!("unknown world `{w}` in model {}", self.id)))
        }
    }

    pub fn frame(&self) -> Result<Frame> {
        for (a, b, line) in &self.le {
            self.check_world(a, *line)?;
            self.check_world(b, *line)?;
        }
        Frame::build(
            self.worlds.clone(),
            self.le.iter().map(|(a, b, _)| (a.clone(), b.clone())),
        )
        .map_err(at(self.line))
    }

    pub fn prop_model(&self) -> Result<PropModel> {
        let frame = self.frame()?;
        let mut val = Valuation::new();
        for (w, atoms, line) in &self.val {
            self.check_world(w, *line)?;
            val.entry(w.clone()).or_default().extend(atoms.iter().cloned());
        }
        PropModel::build(frame, val).map_err(at(self.line))
    }

    pub fn birelational(&self) -> Result<BirelationalModel> {
        let base = self.prop_model()?;
        for (a, b, line) in &self.r {
            self.check_world(a, *line)?;
            self.check_world(b, *line)?;
        }
        BirelationalModel::build(base, self.r.iter().map(|(a, b, _)| (a.clone(), b.clone())))
            .map_err(at(self.line))
    }

    fn level0(&self) -> Result<HigherOrderModel> {
        let m = self.prop_model()?;
        let b = self.birelational()?;
        let frame = m.frame();
        let names = |ps: Vec<(WorldId, WorldId)>| {
            ps.into_iter()
                .map(|(a, c)| (a.to_string(), c.to_string()))
                .collect::<Vec<_>>()
        };
        let mut rels = NamedPairs::new();
        rels.insert("le".into(), names(frame.le_pairs()));
        if !self.r.is_empty() {
            rels.insert("r".into(), names(b.r_pairs()));
        }
        HigherOrderModel::level0(
            self.id.clone(),
            frame.worlds().to_vec(),
            (0..frame.len()).map(|i| m.val(i).clone()).collect(),
            rels,
            LevelPolicy::intuitionistic("le"),
        )
        .map_err(at(self.line))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedBlock {
    pub id: ModelId,
    pub line: usize,
    pub level: usize,
    pub items: Vec<Item>,
    pub rels: Vec<(String, Option<(String, String)>, usize)>,
    pub modal: Option<(String, ModalRule, usize)>,
}

impl NestedBlock {
    pub fn higher_order(&self) -> Result<HigherOrderModel> {
        let objects = self
            .items
            .iter()
            .map(|it| match it {
                Item::Model(b) => b.level0(),
                Item::Nested(n) => n.higher_order(),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rels = NamedPairs::new();
        for (name, pair, _) in &self.rels {
            let entry = rels.entry(name.clone()).or_default();
            if let Some(p) = pair {
                entry.push(p.clone());
            }
        }
        let policy = match &self.modal {
            Some((name, rule, _)) => LevelPolicy::modal(*rule, name),
            None if rels.len() == 1 => {
                LevelPolicy::modal(ModalRule::Mk, rels.keys().next().unwrap())
            }
            None => LevelPolicy::deferring(),
        };
        let m = HigherOrderModel::nest(self.id.clone(), objects, rels, policy)
            .map_err(at(self.line))?;
        if m.level() != self.level {
            return Err(err(
                self.line,
                format!(
                    "nmodel {} declares level {} but its objects make it level {}",
                    self.id,
                    self.level,
                    m.level()
                ),
            ));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Model(ModelBlock),
    Nested(NestedBlock),
}

/// What a parsed file describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Single,
    General,
    HigherOrder,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelFile {
    pub items: Vec<Item>,
    pub succ: Vec<(ModelId, ModelId, usize)>,
    pub reference: Option<(ModelId, usize)>,
}

impl ModelFile {
    pub fn kind(&self) -> FileKind {
        if self.items.iter().any(|i| matches!(i, Item::Nested(_))) {
            FileKind::HigherOrder
        } else if self.items.len() == 1 && self.succ.is_empty() && self.reference.is_none() {
            FileKind::Single
        } else {
            FileKind::General
        }
    }

    fn blocks(&self) -> Result<Vec<&ModelBlock>> {
        self.items
            .iter()
            .map(|i| match i {
                Item::Model(b) => Ok(b),
                Item::Nested(n) => Err(err(n.line, "nmodel block where a model block is expected")),
            })
            .collect()
    }

    /// The only block of a single-model file.
    pub fn single(&self) -> Result<&ModelBlock> {
        let blocks = self.blocks()?;
        match blocks.as_slice() {
            [b] => Ok(b),
            [] => Err(err(1, "no model block")),
            [_, b, ..] => Err(err(b.line, "expected a single model block")),
        }
    }

    pub fn prop_model(&self) -> Result<PropModel> {
        self.single()?.prop_model()
    }

    pub fn birelational(&self) -> Result<BirelationalModel> {
        self.single()?.birelational()
    }

    pub fn general(&self) -> Result<GeneralModel> {
        let blocks = self.blocks()?;
        if blocks.is_empty() {
            return Err(err(1, "no model block"));
        }
        let mut subs = Vec::with_capacity(blocks.len());
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if !seen.insert(&b.id) {
                return Err(err(b.line, format!("duplicate model `{}`", b.id)));
            }
            subs.push((b.id.clone(), b.prop_model()?));
        }
        for (a, c, line) in &self.succ {
            for k in [a, c] {
                if !seen.contains(k) {
                    return Err(err(*line, format!("unknown submodel `{k}`")));
                }
            }
        }
        if let Some((k, line)) = &self.reference {
            if !seen.contains(k) {
                return Err(err(*line, format!("unknown submodel `{k}`")));
            }
        }
        GeneralModel::build(
            subs,
            self.succ.iter().map(|(a, c, _)| (a.clone(), c.clone())),
        )
    }

    pub fn reference(&self) -> Option<ModelId> {
        self.reference.as_ref().map(|(k, _)| k.clone())
    }

    pub fn higher_order(&self) -> Result<HigherOrderModel> {
        match self.items.as_slice() {
            [Item::Nested(n)] => n.higher_order(),
            [Item::Model(b)] => b.level0(),
            _ => Err(err(1, "expected a single model or nmodel block")),
        }
    }
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
    /// Text after the first `:`, for `val` lines.
    tail: Option<&'a str>,
}

fn lex(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let (head, tail) = match body.split_once(':') {
                Some((h, t)) => (h, Some(t)),
                None => (body, None),
            };
            let words: Vec<&str> = head.split_whitespace().collect();
            if words.is_empty() && tail.is_none_or(|t| t.trim().is_empty()) {
                None
            } else {
                Some(Line {
                    no: i + 1,
                    words,
                    tail,
                })
            }
        })
        .collect()
}

fn ident<'s, T: From<&'s str>>(line: usize, s: &'s str) -> Result<T> {
    if is_identifier(s) {
        Ok(T::from(s))
    } else {
        Err(err(line, format!("`{s}` is not a valid identifier")))
    }
}

fn arity(l: &Line, n: usize) -> Result<()> {
    if l.tail.is_some() {
        return Err(err(l.no, "unexpected `:`"));
    }
    if l.words.len() != n {
        return Err(err(
            l.no,
            format!("`{}` takes {} argument(s)", l.words[0], n - 1),
        ));
    }
    Ok(())
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.no)
    }

    fn model_block(&mut self, id: ModelId, start: usize) -> Result<ModelBlock> {
        let mut b = ModelBlock {
            id,
            line: start,
            worlds: Vec::new(),
            le: Vec::new(),
            r: Vec::new(),
            val: Vec::new(),
        };
        let mut declared = false;
        loop {
            let eof = self.last_line();
            let Some(l) = self.next() else {
                return Err(err(eof, format!("model {} is missing `end`", b.id)));
            };
            let no = l.no;
            let Some(&kw) = l.words.first() else {
                return Err(err(no, "expected a keyword"));
            };
            match kw {
                "worlds" => {
                    if l.tail.is_some() {
                        return Err(err(no, "unexpected `:`"));
                    }
                    if l.words.len() < 2 {
                        return Err(err(no, "`worlds` needs at least one world"));
                    }
                    for w in &l.words[1..] {
                        let w = ident::<WorldId>(no, w)?;
                        if b.worlds.contains(&w) {
                            return Err(err(no, format!("duplicate world `{w}`")));
                        }
                        b.worlds.push(w);
                    }
                    declared = true;
                }
                "le" | "r" => {
                    arity(l, 3)?;
                    let a = ident::<WorldId>(no, l.words[1])?;
                    let c = ident::<WorldId>(no, l.words[2])?;
                    if kw == "le" {
                        b.le.push((a, c, no));
                    } else {
                        b.r.push((a, c, no));
                    }
                }
                "val" => {
                    if l.words.len() != 2 {
                        return Err(err(no, "expected `val <world> : <atom>*`"));
                    }
                    let Some(tail) = l.tail else {
                        return Err(err(no, "expected `:` after the world in `val`"));
                    };
                    let w = ident::<WorldId>(no, l.words[1])?;
                    let mut atoms = BTreeSet::new();
                    for a in tail.split_whitespace() {
                        if !is_atom_name(a) {
                            return Err(err(no, format!("`{a}` is not a valid atom")));
                        }
                        atoms.insert(a.to_string());
                    }
                    b.val.push((w, atoms, no));
                }
                "end" => {
                    arity(l, 1)?;
                    if !declared {
                        return Err(err(start, format!("model {} has no `worlds` line", b.id)));
                    }
                    return Ok(b);
                }
                other => {
                    return Err(err(no, format!("unexpected `{other}` inside model block")));
                }
            }
        }
    }

    fn nested_block(&mut self, id: ModelId, level: usize, start: usize) -> Result<NestedBlock> {
        let mut n = NestedBlock {
            id,
            line: start,
            level,
            items: Vec::new(),
            rels: Vec::new(),
            modal: None,
        };
        loop {
            let eof = self.last_line();
            let Some(l) = self.next() else {
                return Err(err(eof, format!("nmodel {} is missing `end`", n.id)));
            };
            let no = l.no;
            let Some(&kw) = l.words.first() else {
                return Err(err(no, "expected a keyword"));
            };
            match kw {
                "model" | "nmodel" => {
                    let item = self.item(no)?;
                    n.items.push(item);
                }
                "rel" => {
                    if l.tail.is_some() || !(l.words.len() == 2 || l.words.len() == 4) {
                        return Err(err(no, "expected `rel <name> [<a> <b>]`"));
                    }
                    let name = ident::<String>(no, l.words[1])?;
                    let pair = if l.words.len() == 4 {
                        Some((
                            ident::<String>(no, l.words[2])?,
                            ident::<String>(no, l.words[3])?,
                        ))
                    } else {
                        None
                    };
                    n.rels.push((name, pair, no));
                }
                "modal" => {
                    arity(l, 3)?;
                    let rule = match l.words[2] {
                        "mk" => ModalRule::Mk,
                        "ik" => ModalRule::Ik,
                        "defer" => ModalRule::Defer,
                        other => {
                            return Err(err(no, format!("unknown modal rule `{other}`")));
                        }
                    };
                    if n.modal.is_some() {
                        return Err(err(no, "duplicate `modal` line"));
                    }
                    n.modal = Some((ident::<String>(no, l.words[1])?, rule, no));
                }
                "end" => {
                    arity(l, 1)?;
                    if n.items.is_empty() {
                        return Err(err(start, format!("nmodel {} has no objects", n.id)));
                    }
                    return Ok(n);
                }
                other => {
                    return Err(err(no, format!("unexpected `{other}` inside nmodel block")));
                }
            }
        }
    }

    /// Parses the block opened on the line just consumed.
    fn item(&mut self, no: usize) -> Result<Item> {
        let l = &self.lines[self.pos - 1];
        match l.words[0] {
            "model" => {
                arity(l, 2)?;
                let id = ident::<ModelId>(no, l.words[1])?;
                Ok(Item::Model(self.model_block(id, no)?))
            }
            _ => {
                if l.tail.is_some() || l.words.len() != 4 || l.words[2] != "level" {
                    return Err(err(no, "expected `nmodel <id> level <n>`"));
                }
                let id = ident::<ModelId>(no, l.words[1])?;
                let level: usize = l.words[3]
                    .parse()
                    .map_err(|_| err(no, format!("bad level `{}`", l.words[3])))?;
                if level == 0 {
                    return Err(err(no, "nmodel level must be at least 1"));
                }
                Ok(Item::Nested(self.nested_block(id, level, no)?))
            }
        }
    }
}

impl ModelFile {
    /// The general class to read a general file as: `as_class`, else
    /// partial when a `reference` line is present, else inferred.
    pub fn general_class(&self, g: &GeneralModel, as_class: Option<GeneralClass>) -> Result<GeneralClass> {
        if let Some(c) = as_class {
            return Ok(c);
        }
        if self.reference.is_some() {
            return Ok(GeneralClass::Partial);
        }
        GeneralClass::infer(g).ok_or(Error::NotPartial)
    }

    /// The structure `logic` evaluates on. Without a logic, single blocks
    /// use prop (no `r` lines) or ik, general files their class, and
    /// nmodel files their own levels.
    pub fn subject(&self, logic: Option<Logic>, as_class: Option<GeneralClass>) -> Result<Subject> {
        let kind = self.kind();
        if kind == FileKind::HigherOrder {
            if let Some(l) = logic {
                return Err(Error::Unsupported(format!("{l} on an nmodel file")));
            }
            return Ok(Subject::Nested(self.higher_order()?));
        }
        let logic = match (logic, kind) {
            (Some(l), _) => l,
            (None, FileKind::Single) if self.single()?.r.is_empty() => Logic::Prop,
            (None, FileKind::Single) => Logic::Ik,
            (None, _) => match self.general_class(&self.general()?, as_class)? {
                GeneralClass::Partial => Logic::Partial,
                GeneralClass::Homogeneous => Logic::Homogeneous,
            },
        };
        let points = |interp, loci| Ok(Subject::Points { logic, interp, loci });
        match logic {
            Logic::Prop if kind == FileKind::Single => {
                let m = self.prop_model()?;
                points(m.interpretation(), plain_loci(m.frame().worlds()))
            }
            Logic::Prop => Err(Error::Unsupported("prop on a general model".into())),
            Logic::Ik | Logic::Mk => {
                let (b, loci) = if kind == FileKind::Single {
                    let b = self.birelational()?;
                    let loci = plain_loci(b.base().frame().worlds());
                    (b, loci)
                } else {
                    let fl = flatten(&self.general()?);
                    let loci = fl
                        .worlds
                        .iter()
                        .map(|w| Locus {
                            submodel: Some(w.submodel.clone()),
                            world: w.world.clone(),
                        })
                        .collect();
                    (fl.model, loci)
                };
                let interp = if logic == Logic::Ik {
                    b.ik_interpretation()?
                } else {
                    b.mk_interpretation()?
                };
                points(interp, loci)
            }
            Logic::Partial => {
                let p = PartialModel::new(self.general()?, self.reference())?;
                points(p.interpretation().clone(), general_loci(p.points()))
            }
            Logic::Homogeneous | Logic::ClassicalK => {
                let g = self.general()?;
                if logic == Logic::ClassicalK && g.submodels().any(|(_, m)| m.frame().len() != 1) {
                    return Err(Error::Unsupported("classicalK on submodels with several worlds".into()));
                }
                let h = HomogeneousModel::new(g)?;
                points(h.interpretation().clone(), general_loci(h.points()))
            }
        }
    }
}

pub fn parse_model_file(text: &str) -> Result<ModelFile> {
    let mut p = Parser {
        lines: lex(text),
        pos: 0,
    };
    let mut file = ModelFile::default();
    while let Some(l) = p.next() {
        let no = l.no;
        let Some(&kw) = l.words.first() else {
            return Err(err(no, "expected a keyword"));
        };
        match kw {
            "model" | "nmodel" => {
                let item = p.item(no)?;
                file.items.push(item);
            }
            "succ" => {
                arity(l, 3)?;
                let a = ident::<ModelId>(no, l.words[1])?;
                let c = ident::<ModelId>(no, l.words[2])?;
                file.succ.push((a, c, no));
            }
            "reference" => {
                arity(l, 2)?;
                if file.reference.is_some() {
                    return Err(err(no, "duplicate `reference` line"));
                }
                file.reference = Some((ident::<ModelId>(no, l.words[1])?, no));
            }
            other => return Err(err(no, format!("unexpected `{other}` at top level"))),
        }
    }
    if file.items.is_empty() {
        return Err(err(1, "no model block"));
    }
    Ok(file)
}

fn write_block(out: &mut String, id: &str, m: &PropModel, r: &[(WorldId, WorldId)]) {
    let frame = m.frame();
    let _ = writeln!(out, "model {id}");
    out.push_str("worlds");
    for w in frame.worlds() {
        out.push(' ');
        out.push_str(w.as_str());
    }
    out.push('\n');
    let mut le: Vec<_> = frame.le_pairs().into_iter().filter(|(a, b)| a != b).collect();
    le.sort();
    for (a, b) in le {
        let _ = writeln!(out, "le {a} {b}");
    }
    let mut r = r.to_vec();
    r.sort();
    for (a, b) in r {
        let _ = writeln!(out, "r {a} {b}");
    }
    for (i, w) in frame.worlds().iter().enumerate() {
        let _ = write!(out, "val {w} :");
        for a in m.val(i) {
            out.push(' ');
            out.push_str(a);
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

pub fn write_prop_model(id: &str, m: &PropModel) -> String {
    let mut out = String::new();
    write_block(&mut out, id, m, &[]);
    out
}

pub fn write_birelational(id: &str, m: &BirelationalModel) -> String {
    let mut out = String::new();
    write_block(&mut out, id, m.base(), &m.r_pairs());
    out
}

pub fn write_general(g: &GeneralModel, reference: Option<&ModelId>) -> String {
    let mut out = String::new();
    for (k, m) in g.submodels() {
        write_block(&mut out, k.as_str(), m, &[]);
    }
    if let Some(k) = reference {
        let _ = writeln!(out, "reference {k}");
    }
    let mut succ = g.succ_pairs();
    succ.sort();
    for (a, b) in succ {
        let _ = writeln!(out, "succ {a} {b}");
    }
    out
}

/// Object names of every level, for diagnostics.
pub fn describe_levels(m: &HigherOrderModel) -> BTreeMap<usize, Vec<String>> {
    let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    fn go(m: &HigherOrderModel, out: &mut BTreeMap<usize, Vec<String>>) {
        out.entry(m.level()).or_default().push(m.id().to_string());
        if let crate::higher_order::Objects::Models(ms) = m.objects() {
            for c in ms {
                go(c, out);
            }
        }
    }
    go(m, &mut out);
    out
}
