//! The instance file format.
//!
//! Line oriented, `#` starts a comment. Paths are written in application
//! order (first arrow applied first), which the mandatory header declares:
//!
//! ```text
//! convention: application-order
//! field: prime:32003
//! vertices: 1 2 3
//! arrow alpha: 1 -> 1
//! arrow beta: 1 -> 2
//! arrow gamma: 2 -> 3
//! relation: [alpha, alpha, alpha]
//! relation: [alpha, beta, gamma]
//! module S1 = simple 1
//! module W = syzygy S1 2
//! ```
//!
//! Relations are signed sums `c [a, b, ...]` with integer or fractional
//! coefficients. Module constructors: `simple v`, `trivial`,
//! `projective v@deg, ...`, `shift X n`, `radical-power X i`,
//! `syzygy X i`. Names are NFC-normalized.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use dkoszul_core::builtins::Builtin;
use dkoszul_core::scalar::{FieldDescriptor, DEFAULT_PRIME};
use unicode_normalization::UnicodeNormalization;

pub const CONVENTION: &str = "application-order";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        }
    }
}

/// One problem in an instance file, 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} error: {}", self.line, self.column, self.kind.code(), self.message)
    }
}

/// Reduced fraction `num/den`, `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coef {
    pub num: i64,
    pub den: i64,
}

impl Coef {
    pub const ONE: Coef = Coef { num: 1, den: 1 };

    fn new(num: i64, den: i64) -> Option<Coef> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let s = if den < 0 { -1 } else { 1 };
        Some(Coef {
            num: s * num / g,
            den: s * den / g,
        })
    }

    fn neg(self) -> Coef {
        Coef {
            num: -self.num,
            den: self.den,
        }
    }

    fn abs(self) -> Coef {
        Coef {
            num: self.num.abs(),
            den: self.den,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    Simple(String),
    Trivial,
    Projective(Vec<(String, i32)>),
    Shift(String, i32),
    RadicalPower(String, usize),
    Syzygy(String, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDecl {
    pub name: String,
    pub spec: ModuleSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub field: FieldDescriptor,
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    /// Each relation: coefficient and arrow names in application order.
    pub relations: Vec<Vec<(Coef, Vec<String>)>>,
    pub modules: Vec<ModuleDecl>,
}

impl InstanceFile {
    pub fn module(&self, name: &str) -> Option<&ModuleDecl> {
        let name = normalize(name);
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn arrow(&self, name: &str) -> Option<&ArrowDecl> {
        self.arrows.iter().find(|a| a.name == name)
    }

    /// Longest relation, 2 when there are none.
    pub fn relation_degree(&self) -> usize {
        self.relations
            .iter()
            .filter_map(|r| r.first().map(|t| t.1.len()))
            .max()
            .unwrap_or(2)
            .max(2)
    }

    /// A built-in algebra with its standard modules: `k`, `S<v>` and `P<v>`
    /// per vertex, `omega1 = syzygy k 1` and `omega1-down = shift omega1 -1`.
    pub fn from_builtin(b: &Builtin) -> InstanceFile {
        let vertices: Vec<String> = b.vertices.iter().map(|v| v.to_string()).collect();
        let mut modules = vec![ModuleDecl {
            name: "k".into(),
            spec: ModuleSpec::Trivial,
        }];
        for v in &vertices {
            modules.push(ModuleDecl {
                name: format!("S{v}"),
                spec: ModuleSpec::Simple(v.clone()),
            });
        }
        for v in &vertices {
            modules.push(ModuleDecl {
                name: format!("P{v}"),
                spec: ModuleSpec::Projective(vec![(v.clone(), 0)]),
            });
        }
        modules.push(ModuleDecl {
            name: "omega1".into(),
            spec: ModuleSpec::Syzygy("k".into(), 1),
        });
        modules.push(ModuleDecl {
            name: "omega1-down".into(),
            spec: ModuleSpec::Shift("omega1".into(), -1),
        });
        InstanceFile {
            field: FieldDescriptor::Prime(DEFAULT_PRIME),
            vertices,
            arrows: b
                .arrows
                .iter()
                .map(|(n, s, t)| ArrowDecl {
                    name: n.to_string(),
                    source: s.to_string(),
                    target: t.to_string(),
                })
                .collect(),
            relations: b
                .relation_lists()
                .into_iter()
                .map(|r| r.into_iter().map(|(c, p)| (Coef::new(c, 1).unwrap(), p)).collect())
                .collect(),
            modules,
        }
    }

    /// Canonical text; `parse_instance` of it gives back `self`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "convention: {CONVENTION}").unwrap();
        writeln!(out, "field: {}", self.field).unwrap();
        writeln!(out, "vertices: {}", self.vertices.join(" ")).unwrap();
        for a in &self.arrows {
            writeln!(out, "arrow {}: {} -> {}", a.name, a.source, a.target).unwrap();
        }
        for r in &self.relations {
            out.push_str("relation: ");
            for (k, (c, path)) in r.iter().enumerate() {
                let neg = c.num < 0;
                let mag = c.abs();
                if k == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                if mag != Coef::ONE {
                    write!(out, "{mag} ").unwrap();
                }
                write!(out, "[{}]", path.join(", ")).unwrap();
            }
            out.push('\n');
        }
        for m in &self.modules {
            let body = match &m.spec {
                ModuleSpec::Simple(v) => format!("simple {v}"),
                ModuleSpec::Trivial => "trivial".into(),
                ModuleSpec::Projective(gens) => {
                    let parts: Vec<String> = gens.iter().map(|(v, d)| format!("{v}@{d}")).collect();
                    format!("projective {}", parts.join(", "))
                }
                ModuleSpec::Shift(x, n) => format!("shift {x} {n}"),
                ModuleSpec::RadicalPower(x, i) => format!("radical-power {x} {i}"),
                ModuleSpec::Syzygy(x, i) => format!("syzygy {x} {i}"),
            };
            writeln!(out, "module {} = {}", m.name, body).unwrap();
        }
        out
    }
}

pub fn normalize(s: &str) -> String {
    s.nfc().collect()
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || unicode_normalization::char::is_combining_mark(c) || matches!(c, '_' | '\'' | '-' | '.')
}

/// Character cursor over one line with 1-based columns.
struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    errors: &'a mut Vec<ParseError>,
}

type Step<T> = Result<T, ()>;

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.pos + 1
    }

    fn fail<T>(&mut self, kind: ErrorKind, column: usize, message: impl Into<String>) -> Step<T> {
        self.errors.push(ParseError {
            line: self.line,
            column,
            kind,
            message: message.into(),
        });
        Err(())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Step<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let col = self.column();
            let found = self.describe_here();
            self.fail(ErrorKind::Syntax, col, format!("expected '{c}', found {found}"))
        }
    }

    fn describe_here(&mut self) -> String {
        match self.peek() {
            None => "end of line".into(),
            Some(c) => format!("'{c}'"),
        }
    }

    /// A name, with its column.
    fn name(&mut self, what: &str) -> Step<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_name_char(self.chars[self.pos]) {
            // keep "->" out of names
            if self.chars[self.pos] == '-' && self.chars.get(self.pos + 1) == Some(&'>') {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            let found = self.describe_here();
            return self.fail(ErrorKind::Syntax, start + 1, format!("expected {what}, found {found}"));
        }
        let raw: String = self.chars[start..self.pos].iter().collect();
        Ok((normalize(&raw), start + 1))
    }

    fn integer(&mut self, what: &str) -> Step<(i64, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.chars.len() && matches!(self.chars[self.pos], '-' | '+') {
            self.pos += 1;
        }
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<i64>() {
            Ok(n) => Ok((n, start + 1)),
            Err(_) => {
                self.pos = start;
                let found = self.describe_here();
                self.fail(ErrorKind::Syntax, start + 1, format!("expected {what}, found {found}"))
            }
        }
    }

    fn unsigned(&mut self, what: &str) -> Step<(usize, usize)> {
        let (n, col) = self.integer(what)?;
        if n < 0 {
            return self.fail(ErrorKind::Syntax, col, format!("{what} must be non-negative"));
        }
        Ok((n as usize, col))
    }

    fn finish(&mut self) -> Step<()> {
        if self.at_end() {
            Ok(())
        } else {
            let col = self.column();
            let found = self.describe_here();
            self.fail(ErrorKind::Syntax, col, format!("unexpected {found}"))
        }
    }

    fn arrow_token(&mut self) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1) == Some(&'>') {
            self.pos += 2;
            true
        } else if self.chars.get(self.pos) == Some(&'→') {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

/// A relation term before name resolution: coefficient, names with columns.
type RawTerm = (Coef, Vec<(String, usize)>);

fn parse_coef(c: &mut Cursor<'_>) -> Step<Coef> {
    let (num, col) = c.integer("coefficient")?;
    let den = if c.eat('/') {
        let (d, dcol) = c.integer("denominator")?;
        if d <= 0 {
            return c.fail(ErrorKind::Syntax, dcol, "denominator must be positive");
        }
        d
    } else {
        1
    };
    match Coef::new(num, den) {
        Some(q) if q.num != 0 => Ok(q),
        _ => c.fail(ErrorKind::Semantic, col, "zero coefficient"),
    }
}

fn parse_relation(c: &mut Cursor<'_>) -> Step<Vec<RawTerm>> {
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut sign = Coef::ONE;
        if c.eat('-') {
            sign = sign.neg();
        } else if !c.eat('+') && !first {
            let col = c.column();
            let found = c.describe_here();
            return c.fail(ErrorKind::Syntax, col, format!("expected '+' or '-', found {found}"));
        }
        let coef = if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            parse_coef(c)?
        } else {
            Coef::ONE
        };
        let coef = Coef::new(sign.num * coef.num, coef.den).unwrap();
        c.expect('[')?;
        let mut path = vec![c.name("arrow name")?];
        while c.eat(',') {
            path.push(c.name("arrow name")?);
        }
        c.expect(']')?;
        terms.push((coef, path));
        first = false;
        if c.at_end() {
            return Ok(terms);
        }
    }
}

/// A module constructor with the vertex and module names it mentions.
fn parse_module(c: &mut Cursor<'_>) -> Step<(ModuleSpec, Vec<(String, usize)>, Vec<(String, usize)>)> {
    let (kind, kcol) = c.name("module constructor")?;
    let mut verts = Vec::new();
    let mut mods = Vec::new();
    let spec = match kind.as_str() {
        "simple" => {
            let v = c.name("vertex name")?;
            verts.push(v.clone());
            ModuleSpec::Simple(v.0)
        }
        "trivial" => ModuleSpec::Trivial,
        "projective" => {
            let mut gens = Vec::new();
            loop {
                let v = c.name("vertex name")?;
                let deg = if c.eat('@') { c.integer("degree")?.0 as i32 } else { 0 };
                verts.push(v.clone());
                gens.push((v.0, deg));
                if !c.eat(',') {
                    break;
                }
            }
            ModuleSpec::Projective(gens)
        }
        "shift" => {
            let x = c.name("module name")?;
            let (n, _) = c.integer("shift amount")?;
            mods.push(x.clone());
            ModuleSpec::Shift(x.0, n as i32)
        }
        "radical-power" => {
            let x = c.name("module name")?;
            let (i, _) = c.unsigned("exponent")?;
            mods.push(x.clone());
            ModuleSpec::RadicalPower(x.0, i)
        }
        "syzygy" => {
            let x = c.name("module name")?;
            let (i, _) = c.unsigned("syzygy index")?;
            mods.push(x.clone());
            ModuleSpec::Syzygy(x.0, i)
        }
        other => {
            return c.fail(
                ErrorKind::Syntax,
                kcol,
                format!(
                    "unknown module constructor '{other}' (expected simple, trivial, projective, shift, radical-power or syzygy)"
                ),
            )
        }
    };
    Ok((spec, verts, mods))
}

/// Parses and validates an instance file. Every problem found is reported,
/// in file order.
pub fn parse_instance(text: &str) -> Result<InstanceFile, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut field: Option<FieldDescriptor> = None;
    let mut convention_seen = false;
    let mut vertices: Option<Vec<String>> = None;
    let mut arrows: Vec<ArrowDecl> = Vec::new();
    let mut raw_relations: Vec<(usize, Vec<RawTerm>)> = Vec::new();
    let mut modules: Vec<ModuleDecl> = Vec::new();
    let mut module_names: BTreeSet<String> = BTreeSet::new();
    let mut any_content = false;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = normalize(raw.split('#').next().unwrap_or(""));
        if content.trim().is_empty() {
            continue;
        }
        let mut c = Cursor {
            chars: content.chars().collect(),
            pos: 0,
            line: line_no,
            errors: &mut errors,
        };
        let first_decl = !any_content;
        any_content = true;
        let _ = (|| -> Step<()> {
            let (key, kcol) = c.name("a declaration keyword")?;
            if first_decl && key != "convention" {
                return c.fail(
                    ErrorKind::Syntax,
                    kcol,
                    format!("the first declaration must be 'convention: {CONVENTION}'"),
                );
            }
            match key.as_str() {
                "convention" => {
                    c.expect(':')?;
                    let (v, vcol) = c.name("convention")?;
                    c.finish()?;
                    if convention_seen {
                        return c.fail(ErrorKind::Semantic, kcol, "duplicate convention header");
                    }
                    convention_seen = true;
                    if v != CONVENTION {
                        return c.fail(
                            ErrorKind::Semantic,
                            vcol,
                            format!("unsupported path convention '{v}' (only {CONVENTION})"),
                        );
                    }
                }
                "field" => {
                    c.expect(':')?;
                    c.skip_ws();
                    let col = c.column();
                    let rest: String = c.chars[c.pos..].iter().collect();
                    c.pos = c.chars.len();
                    if field.is_some() {
                        return c.fail(ErrorKind::Semantic, kcol, "duplicate field declaration");
                    }
                    match rest.trim().parse::<FieldDescriptor>() {
                        Ok(f) => field = Some(f),
                        Err(e) => return c.fail(ErrorKind::Semantic, col, e.to_string()),
                    }
                }
                "vertices" => {
                    c.expect(':')?;
                    let mut vs: Vec<String> = Vec::new();
                    while !c.at_end() {
                        let (v, vcol) = c.name("vertex name")?;
                        if vs.contains(&v) {
                            return c.fail(ErrorKind::Semantic, vcol, format!("duplicate vertex '{v}'"));
                        }
                        vs.push(v);
                    }
                    if vs.is_empty() {
                        let col = c.column();
                        return c.fail(ErrorKind::Syntax, col, "expected at least one vertex name");
                    }
                    if vertices.is_some() {
                        return c.fail(ErrorKind::Semantic, kcol, "duplicate vertices declaration");
                    }
                    vertices = Some(vs);
                }
                "arrow" => {
                    let (name, ncol) = c.name("arrow name")?;
                    c.expect(':')?;
                    let (s, scol) = c.name("source vertex")?;
                    if !c.arrow_token() {
                        let col = c.column();
                        let found = c.describe_here();
                        return c.fail(ErrorKind::Syntax, col, format!("expected '->', found {found}"));
                    }
                    let (t, tcol) = c.name("target vertex")?;
                    c.finish()?;
                    let Some(vs) = &vertices else {
                        return c.fail(ErrorKind::Semantic, kcol, "arrow declared before the vertices line");
                    };
                    for (v, col) in [(&s, scol), (&t, tcol)] {
                        if !vs.contains(v) {
                            return c.fail(ErrorKind::Semantic, col, format!("unknown vertex '{v}'"));
                        }
                    }
                    if arrows.iter().any(|a| a.name == name) {
                        return c.fail(ErrorKind::Semantic, ncol, format!("duplicate arrow '{name}'"));
                    }
                    arrows.push(ArrowDecl {
                        name,
                        source: s,
                        target: t,
                    });
                }
                "relation" => {
                    c.expect(':')?;
                    let terms = parse_relation(&mut c)?;
                    raw_relations.push((line_no, terms));
                }
                "module" => {
                    let (name, ncol) = c.name("module name")?;
                    c.expect('=')?;
                    let (spec, verts, mods) = parse_module(&mut c)?;
                    c.finish()?;
                    if module_names.contains(&name) {
                        return c.fail(ErrorKind::Semantic, ncol, format!("duplicate module '{name}'"));
                    }
                    for (v, col) in verts {
                        if !vertices.as_ref().is_some_and(|vs| vs.contains(&v)) {
                            return c.fail(ErrorKind::Semantic, col, format!("unknown vertex '{v}'"));
                        }
                    }
                    for (m, col) in mods {
                        if !module_names.contains(&m) {
                            return c.fail(
                                ErrorKind::Semantic,
                                col,
                                format!("unknown module '{m}' (modules must be declared before use)"),
                            );
                        }
                    }
                    module_names.insert(name.clone());
                    modules.push(ModuleDecl { name, spec });
                }
                other => {
                    return c.fail(ErrorKind::Syntax, kcol, format!("unknown declaration '{other}'"));
                }
            }
            Ok(())
        })();
    }

    if !any_content {
        errors.push(ParseError {
            line: 1,
            column: 1,
            kind: ErrorKind::Syntax,
            message: "empty instance file".into(),
        });
        return Err(errors);
    }
    let last_line = text.lines().count().max(1);
    if vertices.is_none() && errors.is_empty() {
        errors.push(ParseError {
            line: last_line,
            column: 1,
            kind: ErrorKind::Syntax,
            message: "missing 'vertices:' declaration".into(),
        });
    }

    let mut relations = Vec::new();
    for (line, terms) in raw_relations {
        match check_relation(&arrows, &terms) {
            Ok(rel) => relations.push(rel),
            Err((column, message)) => errors.push(ParseError {
                line,
                column,
                kind: ErrorKind::Semantic,
                message,
            }),
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.line, e.column));
        return Err(errors);
    }
    Ok(InstanceFile {
        field: field.unwrap_or(FieldDescriptor::Prime(DEFAULT_PRIME)),
        vertices: vertices.unwrap_or_default(),
        arrows,
        relations,
        modules,
    })
}

/// Resolves arrow names and checks composability, homogeneity and
/// parallelism. Terms on the same path are merged.
fn check_relation(arrows: &[ArrowDecl], terms: &[RawTerm]) -> Result<Vec<(Coef, Vec<String>)>, (usize, String)> {
    let mut len: Option<usize> = None;
    let mut ends: Option<(String, String)> = None;
    let mut out: Vec<(Coef, Vec<String>)> = Vec::new();
    for (coef, path) in terms {
        let mut cur: Option<&ArrowDecl> = None;
        let mut first: Option<&ArrowDecl> = None;
        for (name, col) in path {
            let Some(a) = arrows.iter().find(|a| a.name == *name) else {
                return Err((*col, format!("unknown arrow '{name}'")));
            };
            if let Some(prev) = cur {
                if prev.target != a.source {
                    return Err((
                        *col,
                        format!(
                            "non-composable path: '{}' ends at {} but '{}' starts at {}",
                            prev.name, prev.target, a.name, a.source
                        ),
                    ));
                }
            }
            first.get_or_insert(a);
            cur = Some(a);
        }
        let col = path[0].1;
        match len {
            None => len = Some(path.len()),
            Some(l) if l != path.len() => {
                return Err((
                    col,
                    format!("inhomogeneous relation: paths of lengths {l} and {}", path.len()),
                ))
            }
            _ => {}
        }
        if path.len() < 2 {
            return Err((col, "relation paths must have length at least 2".into()));
        }
        let e = (first.unwrap().source.clone(), cur.unwrap().target.clone());
        match &ends {
            None => ends = Some(e),
            Some(x) if *x != e => {
                return Err((
                    col,
                    format!(
                        "paths are not parallel: {} -> {} versus {} -> {}",
                        x.0, x.1, e.0, e.1
                    ),
                ))
            }
            _ => {}
        }
        let names: Vec<String> = path.iter().map(|p| p.0.clone()).collect();
        match out.iter_mut().find(|(_, p)| *p == names) {
            Some((c, _)) => {
                *c = Coef::new(c.num * coef.den + coef.num * c.den, c.den * coef.den).unwrap();
            }
            None => out.push((*coef, names)),
        }
    }
    out.retain(|(c, _)| c.num != 0);
    if out.is_empty() {
        return Err((terms[0].1[0].1, "relation cancels to zero".into()));
    }
    Ok(out)
}
