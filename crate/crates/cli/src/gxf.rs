//! The group exchange format: a line-oriented manifest of groups, maps,
//! extensions, local data and jobs.
//!
//! ```text
//! # comments run to the end of the line
//! group S3 perm 3 [(0 1), (0 1 2)]
//! group T table [[0]]
//! group K preset V4
//! group P product S3 K
//! hom incl T S3 [0]
//! action inv C2 C3 table [[0, 1, 2], [0, 2, 1]]
//! extension X A E G iota pi
//! family F G { local H theta }
//! sections L X { s1 s2 }
//! job verify L
//! ```
//!
//! Hom images are given either for the generators (the declared
//! permutations of a `perm` group, the canonical generators otherwise) or
//! for every element in order.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use seclab_core::cohomology::{CoeffRef, CohomologyError, GammaGroup};
use seclab_core::extension::{Extension, ExtensionError};
use seclab_core::group::{FiniteGroup, GroupError, GroupHom, GroupRef, DEFAULT_CLOSURE_BOUND};
use seclab_core::localglobal::{LocalFamily, LocalGlobalError, LocalSections};
use seclab_core::presets;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Errors from the core library, wrapped by [`ManifestError::Validation`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    LocalGlobal(#[from] LocalGlobalError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unknown name `{name}`")]
    UnknownName { pos: Pos, name: String },
    #[error("{pos}: `{name}` is already defined")]
    DuplicateName { pos: Pos, name: String },
    #[error("{pos}: invalid `{name}`: {source}")]
    Validation {
        pos: Pos,
        name: String,
        #[source]
        source: CoreError,
    },
}

impl ManifestError {
    pub fn pos(&self) -> Pos {
        match self {
            ManifestError::Syntax { pos, .. }
            | ManifestError::UnknownName { pos, .. }
            | ManifestError::DuplicateName { pos, .. }
            | ManifestError::Validation { pos, .. } => *pos,
        }
    }
}

type Result<T, E = ManifestError> = std::result::Result<T, E>;

fn syntax(pos: Pos, message: impl Into<String>) -> ManifestError {
    ManifestError::Syntax { pos, message: message.into() }
}

fn invalid(pos: Pos, name: &str, source: impl Into<CoreError>) -> ManifestError {
    ManifestError::Validation { pos, name: name.to_string(), source: source.into() }
}

// ---- lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(char),
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.' | '^' | '-')
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: lineno + 1, col: i + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits.parse().map_err(|_| syntax(pos, format!("number `{digits}` is too large")))?;
                out.push(Token { tok: Tok::Num(n), pos });
                continue;
            }
            if is_ident_start(c) {
                let start = i;
                // `SL(2,3)` is a single preset name
                if chars[i..].iter().collect::<String>().starts_with("SL(2,3)") {
                    i += 7;
                } else {
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
                continue;
            }
            match c {
                '[' | '(' | '{' => depth += 1,
                ']' | ')' | '}' => {
                    depth = depth.checked_sub(1).ok_or_else(|| syntax(pos, format!("unbalanced `{c}`")))?;
                }
                ',' | ';' | '=' | '|' => {}
                _ => return Err(syntax(pos, format!("unexpected character `{c}`"))),
            }
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        }
        if depth == 0 {
            out.push(Token { tok: Tok::Newline, pos: Pos { line: lineno + 1, col: chars.len() + 1 } });
        }
    }
    if depth != 0 {
        let pos = out.last().map_or(Pos { line: 1, col: 1 }, |t| t.pos);
        return Err(syntax(pos, "unclosed bracket at end of input"));
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    at: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.at)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.at);
        self.at += 1;
        t
    }

    fn done(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos)> {
        let pos = self.pos();
        match self.next() {
            Some(Token { tok: Tok::Ident(s), .. }) => Ok((s.clone(), pos)),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn num(&mut self, what: &str) -> Result<usize> {
        let pos = self.pos();
        match self.next() {
            Some(Token { tok: Tok::Num(n), .. }) => Ok(*n),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn sym(&mut self, c: char) -> Result<()> {
        let pos = self.pos();
        match self.next() {
            Some(Token { tok: Tok::Sym(d), .. }) if *d == c => Ok(()),
            _ => Err(syntax(pos, format!("expected `{c}`"))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(d), .. }) if *d == c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn eat_separators(&mut self) {
        while self.eat(',') || self.eat(';') {}
    }

    fn finish(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            Err(syntax(self.pos(), "unexpected trailing input"))
        }
    }

    /// `[n, n, ...]`
    fn num_list(&mut self) -> Result<Vec<usize>> {
        self.sym('[')?;
        let mut out = Vec::new();
        loop {
            self.eat_separators();
            if self.eat(']') {
                return Ok(out);
            }
            out.push(self.num("a number")?);
        }
    }

    /// `[[...], [...]]`
    fn rows(&mut self) -> Result<Vec<Vec<usize>>> {
        self.sym('[')?;
        let mut out = Vec::new();
        loop {
            self.eat_separators();
            if self.eat(']') {
                return Ok(out);
            }
            out.push(self.num_list()?);
        }
    }

    /// `[(0 1)(2 3), (0 2), ()]`: one generator per comma-separated entry.
    fn perm_gens(&mut self) -> Result<Vec<Vec<Vec<usize>>>> {
        self.sym('[')?;
        let mut gens = Vec::new();
        let mut current: Option<Vec<Vec<usize>>> = None;
        loop {
            if self.eat(']') {
                gens.extend(current);
                return Ok(gens);
            }
            if self.eat(',') {
                gens.push(current.take().ok_or_else(|| syntax(self.pos(), "empty generator"))?);
                continue;
            }
            self.sym('(')?;
            let mut cycle = Vec::new();
            while !self.eat(')') {
                self.eat(',');
                cycle.push(self.num("a point")?);
            }
            current.get_or_insert_with(Vec::new).push(cycle);
        }
    }
}

// ---- manifest types

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    Table,
    Perm { degree: usize, generators: Vec<Vec<Vec<usize>>> },
    Preset(String),
    Product(String, String),
}

#[derive(Debug, Clone)]
pub struct GroupDef {
    pub group: GroupRef,
    pub source: GroupSource,
    /// Elements whose images define a hom out of this group.
    pub generators: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct HomDef {
    pub source: String,
    pub target: String,
    pub hom: GroupHom,
}

#[derive(Debug, Clone)]
pub struct ActionDef {
    pub gamma: String,
    pub m: String,
    pub coeff: CoeffRef,
}

#[derive(Debug, Clone)]
pub struct ExtensionDef {
    pub a: String,
    pub e: String,
    pub gamma: String,
    pub iota: String,
    pub pi: String,
    pub ext: Extension,
}

#[derive(Debug, Clone)]
pub struct FamilyDef {
    pub gamma: String,
    /// `(local group, map)` names.
    pub locals: Vec<(String, String)>,
    pub family: LocalFamily,
}

#[derive(Debug, Clone)]
pub struct SectionsDef {
    pub extension: String,
    pub sections: Vec<String>,
    pub data: LocalSections,
}

#[derive(Debug, Clone)]
pub enum Item {
    Group(GroupDef),
    Hom(HomDef),
    Action(ActionDef),
    Extension(ExtensionDef),
    Family(FamilyDef),
    Sections(SectionsDef),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Group(_) => "group",
            Item::Hom(_) => "hom",
            Item::Action(_) => "action",
            Item::Extension(_) => "extension",
            Item::Family(_) => "family",
            Item::Sections(_) => "sections",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptValue {
    Ident(String),
    Num(usize),
    List(Vec<usize>),
    /// `x|y|z`
    Alt(Vec<OptValue>),
}

impl fmt::Display for OptValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptValue::Ident(s) => f.write_str(s),
            OptValue::Num(n) => write!(f, "{n}"),
            OptValue::List(xs) => write!(f, "[{}]", join(xs, ", ")),
            OptValue::Alt(vs) => {
                let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join("|"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub command: String,
    pub target: String,
    pub options: Vec<(String, OptValue)>,
    pub pos: Pos,
}

impl Job {
    pub fn option(&self, key: &str) -> Option<&OptValue> {
        self.options.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.command, self.target)?;
        for (k, v) in &self.options {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Named definitions in declaration order, plus jobs.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    items: Vec<(String, Item)>,
    index: HashMap<String, usize>,
    pub jobs: Vec<Job>,
}

impl Manifest {
    pub fn items(&self) -> &[(String, Item)] {
        &self.items
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        self.index.get(name).map(|&i| &self.items[i].1)
    }

    pub fn insert(&mut self, name: &str, item: Item) -> Result<(), String> {
        if self.index.contains_key(name) {
            return Err(format!("`{name}` is already defined"));
        }
        self.index.insert(name.to_string(), self.items.len());
        self.items.push((name.to_string(), item));
        Ok(())
    }

    pub fn group(&self, name: &str) -> Option<&GroupDef> {
        match self.get(name) {
            Some(Item::Group(g)) => Some(g),
            _ => None,
        }
    }

    pub fn hom(&self, name: &str) -> Option<&HomDef> {
        match self.get(name) {
            Some(Item::Hom(h)) => Some(h),
            _ => None,
        }
    }

    pub fn action(&self, name: &str) -> Option<&ActionDef> {
        match self.get(name) {
            Some(Item::Action(a)) => Some(a),
            _ => None,
        }
    }

    pub fn extension(&self, name: &str) -> Option<&ExtensionDef> {
        match self.get(name) {
            Some(Item::Extension(e)) => Some(e),
            _ => None,
        }
    }

    pub fn family(&self, name: &str) -> Option<&FamilyDef> {
        match self.get(name) {
            Some(Item::Family(f)) => Some(f),
            _ => None,
        }
    }

    pub fn sections(&self, name: &str) -> Option<&SectionsDef> {
        match self.get(name) {
            Some(Item::Sections(s)) => Some(s),
            _ => None,
        }
    }
}

// ---- parser

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let toks = lex(text)?;
    let mut manifest = Manifest::default();
    for stmt in toks.split(|t| t.tok == Tok::Newline) {
        if stmt.is_empty() {
            continue;
        }
        let end = stmt.last().map_or(Pos::default(), |t| Pos { line: t.pos.line, col: t.pos.col + 1 });
        let mut cur = Cursor { toks: stmt, at: 0, end };
        let (keyword, kpos) = cur.ident("a keyword")?;
        match keyword.as_str() {
            "group" => parse_group(&mut cur, &mut manifest)?,
            "hom" => parse_hom(&mut cur, &mut manifest)?,
            "action" => parse_action(&mut cur, &mut manifest)?,
            "extension" => parse_extension(&mut cur, &mut manifest)?,
            "family" => parse_family(&mut cur, &mut manifest)?,
            "sections" => parse_sections(&mut cur, &mut manifest)?,
            "job" => parse_job(&mut cur, &mut manifest, kpos)?,
            other => return Err(syntax(kpos, format!("unknown keyword `{other}`"))),
        }
        cur.finish()?;
    }
    Ok(manifest)
}

fn define(manifest: &mut Manifest, name: &str, pos: Pos, item: Item) -> Result<()> {
    manifest
        .insert(name, item)
        .map_err(|_| ManifestError::DuplicateName { pos, name: name.to_string() })
}

fn lookup_group<'m>(manifest: &'m Manifest, name: &str, pos: Pos) -> Result<&'m GroupDef> {
    manifest.group(name).ok_or_else(|| ManifestError::UnknownName { pos, name: name.to_string() })
}

fn lookup_hom<'m>(manifest: &'m Manifest, name: &str, pos: Pos) -> Result<&'m HomDef> {
    manifest.hom(name).ok_or_else(|| ManifestError::UnknownName { pos, name: name.to_string() })
}

fn cycles_to_perm(degree: usize, cycles: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..degree).collect();
    // cycles are composed right to left, as permutations are
    for cycle in cycles.iter().rev() {
        if cycle.iter().any(|&x| x >= degree) {
            return None;
        }
        let mut step: Vec<usize> = (0..degree).collect();
        for (k, &x) in cycle.iter().enumerate() {
            step[x] = cycle[(k + 1) % cycle.len()];
        }
        perm = seclab_core::group::compose_perm(&step, &perm);
    }
    Some(perm)
}

fn parse_group(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("a group name")?;
    let (kind, kpos) = cur.ident("`table`, `perm`, `preset` or `product`")?;
    let def = match kind.as_str() {
        "table" => {
            let rows = cur.rows()?;
            let group = Arc::new(FiniteGroup::from_table(rows).map_err(|e| invalid(pos, &name, e))?);
            let generators = group.generators().to_vec();
            GroupDef { group, source: GroupSource::Table, generators }
        }
        "perm" => {
            let degree = cur.num("a degree")?;
            let gpos = cur.pos();
            let generators = cur.perm_gens()?;
            let perms: Vec<Vec<usize>> = generators
                .iter()
                .map(|cycles| {
                    if degree == 0 {
                        return Err(invalid(pos, &name, GroupError::InvalidDegree));
                    }
                    cycles_to_perm(degree, cycles).ok_or_else(|| syntax(gpos, format!("point out of range 0..{degree}")))
                })
                .collect::<Result<_>>()?;
            for cycles in &generators {
                let mut seen = std::collections::HashSet::new();
                if !cycles.iter().all(|c| c.iter().all(|x| seen.insert(*x))) {
                    return Err(syntax(gpos, "cycles of one generator must be disjoint"));
                }
            }
            let (group, elements) = FiniteGroup::from_permutations(degree, &perms, DEFAULT_CLOSURE_BOUND)
                .map_err(|e| invalid(pos, &name, e))?;
            let gens = perms.iter().map(|p| elements.iter().position(|q| q == p).expect("generator")).collect();
            GroupDef { group: Arc::new(group), source: GroupSource::Perm { degree, generators }, generators: gens }
        }
        "preset" => {
            let (label, lpos) = cur.ident("a preset name")?;
            let group = presets::by_name(&label).ok_or(ManifestError::UnknownName { pos: lpos, name: label.clone() })?;
            let generators = group.generators().to_vec();
            GroupDef { group, source: GroupSource::Preset(label), generators }
        }
        "product" => {
            let (left, lpos) = cur.ident("a group name")?;
            let (right, rpos) = cur.ident("a group name")?;
            let g = lookup_group(manifest, &left, lpos)?.group.clone();
            let h = lookup_group(manifest, &right, rpos)?.group.clone();
            let group = seclab_core::group::direct_product(&g, &h);
            let generators = group.generators().to_vec();
            GroupDef { group, source: GroupSource::Product(left, right), generators }
        }
        _ => return Err(syntax(kpos, format!("unknown group form `{kind}`"))),
    };
    define(manifest, &name, pos, Item::Group(def))
}

fn parse_hom(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("a hom name")?;
    let (src, spos) = cur.ident("a source group")?;
    let (tgt, tpos) = cur.ident("a target group")?;
    let images = cur.num_list()?;
    let source = lookup_group(manifest, &src, spos)?;
    let target = lookup_group(manifest, &tgt, tpos)?.group.clone();
    let hom = if images.len() == source.group.order() && images.len() != source.generators.len() {
        GroupHom::new(&source.group, &target, images)
    } else if images.len() == source.generators.len() {
        GroupHom::from_images_of(&source.group, &target, &source.generators, &images)
    } else {
        Err(GroupError::ImageCount { expected: source.generators.len(), got: images.len() })
    }
    .map_err(|e| invalid(pos, &name, e))?;
    define(manifest, &name, pos, Item::Hom(HomDef { source: src, target: tgt, hom }))
}

fn parse_action(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("an action name")?;
    let (gname, gpos) = cur.ident("the acting group")?;
    let (mname, mpos) = cur.ident("the coefficient group")?;
    let gamma = lookup_group(manifest, &gname, gpos)?;
    let m = lookup_group(manifest, &mname, mpos)?.group.clone();
    let coeff = if cur.eat('[') {
        // automorphism names, one per generator of the acting group
        let mut autos = Vec::new();
        loop {
            cur.eat_separators();
            if cur.eat(']') {
                break;
            }
            let (h, hpos) = cur.ident("an automorphism name")?;
            autos.push(lookup_hom(manifest, &h, hpos)?.hom.clone());
        }
        action_from_generator_autos(&gamma.group, &gamma.generators, &m, &autos)
    } else {
        let (kind, kpos) = cur.ident("`trivial`, `table` or a list of automorphisms")?;
        match kind.as_str() {
            "trivial" => Ok(GammaGroup::trivial(&gamma.group, &m)),
            "table" => GammaGroup::new(&gamma.group, &m, cur.rows()?).map_err(CoreError::from),
            _ => return Err(syntax(kpos, format!("unknown action form `{kind}`"))),
        }
    }
    .map_err(|e| invalid(pos, &name, e))?;
    define(manifest, &name, pos, Item::Action(ActionDef { gamma: gname, m: mname, coeff: Arc::new(coeff) }))
}

/// Action from automorphisms assigned to the declared generators of `Γ`.
fn action_from_generator_autos(
    gamma: &GroupRef,
    gens: &[usize],
    m: &GroupRef,
    autos: &[GroupHom],
) -> std::result::Result<GammaGroup, CoreError> {
    if autos.len() != gens.len() {
        return Err(CoreError::Other(format!("expected {} automorphisms, got {}", gens.len(), autos.len())));
    }
    if autos.iter().any(|a| !seclab_core::group::same_group(a.source(), m) || !a.is_bijective()) {
        return Err(CoreError::Other("generator image is not an automorphism of the coefficients".into()));
    }
    let aut = presets::automorphism_group(m);
    let images: Vec<usize> = autos.iter().map(|a| aut.element(a.map())).collect();
    let rho = GroupHom::from_images_of(gamma, &aut.group, gens, &images)?;
    Ok(GammaGroup::from_permutation_representation(gamma, m, &rho, &aut.perms)?)
}

fn parse_extension(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("an extension name")?;
    let mut names = Vec::new();
    for what in ["A", "E", "the base group", "iota", "pi"] {
        names.push(cur.ident(what)?);
    }
    for (n, p) in &names[..3] {
        lookup_group(manifest, n, *p)?;
    }
    let iota = lookup_hom(manifest, &names[3].0, names[3].1)?;
    let pi = lookup_hom(manifest, &names[4].0, names[4].1)?;
    let (a, e, g) = (&names[0].0, &names[1].0, &names[2].0);
    if iota.source != *a || iota.target != *e {
        return Err(invalid(pos, &name, CoreError::Other(format!("iota must map {a} -> {e}"))));
    }
    if pi.source != *e || pi.target != *g {
        return Err(invalid(pos, &name, CoreError::Other(format!("pi must map {e} -> {g}"))));
    }
    let ext = Extension::new(iota.hom.clone(), pi.hom.clone()).map_err(|err| invalid(pos, &name, err))?;
    let def = ExtensionDef {
        a: a.clone(),
        e: e.clone(),
        gamma: g.clone(),
        iota: names[3].0.clone(),
        pi: names[4].0.clone(),
        ext,
    };
    define(manifest, &name, pos, Item::Extension(def))
}

fn parse_family(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("a family name")?;
    let (gname, gpos) = cur.ident("the global group")?;
    let gamma = lookup_group(manifest, &gname, gpos)?.group.clone();
    cur.sym('{')?;
    let mut locals = Vec::new();
    let mut thetas = Vec::new();
    loop {
        cur.eat_separators();
        if cur.eat('}') {
            break;
        }
        let (kw, kpos) = cur.ident("`local`")?;
        if kw != "local" {
            return Err(syntax(kpos, "expected `local`"));
        }
        let (local, lpos) = cur.ident("a local group")?;
        let (theta, tpos) = cur.ident("a local map")?;
        lookup_group(manifest, &local, lpos)?;
        let h = lookup_hom(manifest, &theta, tpos)?;
        if h.source != local || h.target != gname {
            return Err(invalid(tpos, &name, CoreError::Other(format!("{theta} must map {local} -> {gname}"))));
        }
        thetas.push(h.hom.clone());
        locals.push((local, theta));
    }
    let family = LocalFamily::new(&gamma, thetas).map_err(|e| invalid(pos, &name, e))?;
    define(manifest, &name, pos, Item::Family(FamilyDef { gamma: gname, locals, family }))
}

fn parse_sections(cur: &mut Cursor, manifest: &mut Manifest) -> Result<()> {
    let (name, pos) = cur.ident("a name")?;
    let (ename, epos) = cur.ident("an extension")?;
    let ext = manifest
        .extension(&ename)
        .ok_or_else(|| ManifestError::UnknownName { pos: epos, name: ename.clone() })?
        .clone();
    cur.sym('{')?;
    let mut names = Vec::new();
    let mut homs = Vec::new();
    loop {
        cur.eat_separators();
        if cur.eat('}') {
            break;
        }
        let (s, spos) = cur.ident("a local section")?;
        let h = lookup_hom(manifest, &s, spos)?;
        if h.target != ext.e {
            return Err(invalid(spos, &name, CoreError::Other(format!("{s} must land in {}", ext.e))));
        }
        homs.push(h.hom.clone());
        names.push(s);
    }
    let data = LocalSections::new(&ext.ext, homs).map_err(|e| invalid(pos, &name, e))?;
    define(manifest, &name, pos, Item::Sections(SectionsDef { extension: ename, sections: names, data }))
}

fn parse_value(cur: &mut Cursor) -> Result<OptValue> {
    let mut alts = Vec::new();
    loop {
        let pos = cur.pos();
        let atom = match cur.peek().map(|t| &t.tok) {
            Some(Tok::Sym('[')) => OptValue::List(cur.num_list()?),
            Some(Tok::Num(_)) => OptValue::Num(cur.num("a number")?),
            Some(Tok::Ident(_)) => OptValue::Ident(cur.ident("a value")?.0),
            _ => return Err(syntax(pos, "expected a value")),
        };
        alts.push(atom);
        if !cur.eat('|') {
            break;
        }
    }
    Ok(if alts.len() == 1 { alts.pop().expect("one") } else { OptValue::Alt(alts) })
}

fn parse_job(cur: &mut Cursor, manifest: &mut Manifest, pos: Pos) -> Result<()> {
    let (command, _) = cur.ident("a command")?;
    let (target, tpos) = cur.ident("a target")?;
    if target != "random" && manifest.get(&target).is_none() {
        return Err(ManifestError::UnknownName { pos: tpos, name: target });
    }
    let mut options = Vec::new();
    while !cur.done() {
        let (key, _) = cur.ident("an option key")?;
        cur.sym('=')?;
        options.push((key, parse_value(cur)?));
    }
    manifest.jobs.push(Job { command, target, options, pos });
    Ok(())
}

// ---- serializer

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn rows_text(rows: &[Vec<usize>]) -> String {
    let inner: Vec<String> = rows.iter().map(|r| format!("[{}]", join(r, ", "))).collect();
    format!("[{}]", inner.join(", "))
}

/// Canonical text for a manifest; parsing it gives back an equivalent one.
pub fn serialize(manifest: &Manifest) -> String {
    let mut out = String::new();
    for (name, item) in &manifest.items {
        match item {
            Item::Group(g) => match &g.source {
                GroupSource::Table => {
                    let _ = writeln!(out, "group {name} table {}", rows_text(&g.group.table_rows()));
                }
                GroupSource::Perm { degree, generators } => {
                    let gens: Vec<String> = generators
                        .iter()
                        .map(|cycles| {
                            cycles.iter().map(|c| format!("({})", join(c, " "))).collect::<Vec<_>>().join("")
                        })
                        .collect();
                    let _ = writeln!(out, "group {name} perm {degree} [{}]", gens.join(", "));
                }
                GroupSource::Preset(label) => {
                    let _ = writeln!(out, "group {name} preset {label}");
                }
                GroupSource::Product(l, r) => {
                    let _ = writeln!(out, "group {name} product {l} {r}");
                }
            },
            Item::Hom(h) => {
                let _ = writeln!(out, "hom {name} {} {} [{}]", h.source, h.target, join(h.hom.map(), ", "));
            }
            Item::Action(a) => {
                if a.coeff.is_constant() {
                    let _ = writeln!(out, "action {name} {} {} trivial", a.gamma, a.m);
                } else {
                    let _ = writeln!(out, "action {name} {} {} table {}", a.gamma, a.m, rows_text(&a.coeff.action_rows()));
                }
            }
            Item::Extension(x) => {
                let _ = writeln!(out, "extension {name} {} {} {} {} {}", x.a, x.e, x.gamma, x.iota, x.pi);
            }
            Item::Family(f) => {
                let locals: Vec<String> = f.locals.iter().map(|(g, t)| format!("local {g} {t}")).collect();
                let _ = writeln!(out, "family {name} {} {{ {} }}", f.gamma, locals.join("; "));
            }
            Item::Sections(s) => {
                let _ = writeln!(out, "sections {name} {} {{ {} }}", s.extension, s.sections.join(" "));
            }
        }
    }
    for job in &manifest.jobs {
        let _ = writeln!(out, "job {job}");
    }
    out
}
