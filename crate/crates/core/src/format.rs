//! Line-oriented text formats for every artifact kind.
//!
//! A file starts with `key: value` headers (the first one is `type:`), then
//! body lines. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Word};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::fot::FoTransduction;
use crate::logic::{serialize_formula, Context, Formula, Registry};
use crate::lookaround::{FoLookAroundTransducer, FoTransition, SfLookAroundTransducer, SfTransition, Test};
use crate::logic::syntax::parse_formula_at;
use crate::monoid::TransitionMonoid;
use crate::sequential::SequentialTransducer;
use crate::twoway::{Move, Sym, TwoWayTransducer};

/// One significant source line.
#[derive(Clone, Debug)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
    /// Byte offset of `text` within the raw line.
    pub offset: usize,
}

impl<'a> Line<'a> {
    pub fn syntax(&self, at: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.number,
            column: self.offset + at + 1,
            message: message.into(),
        }
    }

    pub fn semantic(&self, message: impl Into<String>) -> Error {
        Error::Semantic {
            line: self.number,
            message: message.into(),
        }
    }

    pub fn semantic_from(&self, err: Error) -> Error {
        match err {
            e @ (Error::Syntax { .. } | Error::Semantic { .. }) => e,
            e => self.semantic(e.to_string()),
        }
    }

    /// Column (0-based, relative to `text`) of the `i`-th whitespace token.
    pub fn token_column(&self, i: usize) -> usize {
        let mut count = 0;
        let mut in_token = false;
        for (pos, c) in self.text.char_indices() {
            if c.is_whitespace() {
                in_token = false;
            } else if !in_token {
                if count == i {
                    return pos;
                }
                count += 1;
                in_token = true;
            }
        }
        self.text.len()
    }
}

pub(crate) fn lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim();
            if trimmed.is_empty() {
                return None;
            }
            let offset = body.len() - body.trim_start().len();
            Some(Line {
                number: i + 1,
                text: trimmed,
                offset,
            })
        })
        .collect()
}

/// Headers followed by body lines.
pub(crate) struct Document<'a> {
    pub headers: HashMap<&'a str, (Line<'a>, &'a str)>,
    pub kind: String,
    pub body: Vec<Line<'a>>,
}

const HEADER_KEYS: &[&str] = &[
    "type", "input", "output", "alphabet", "states", "initial", "final", "copies", "dom", "bits", "vars", "context",
];

pub(crate) fn document(src: &str) -> Result<Document<'_>> {
    let all = lines(src);
    let mut headers = HashMap::new();
    let mut body = Vec::new();
    let mut in_body = false;
    for line in all {
        let header = line
            .text
            .split_once(':')
            .filter(|(k, _)| HEADER_KEYS.contains(&k.trim()))
            .map(|(k, v)| (k.trim(), v.trim()));
        match header {
            Some((key, value)) if !in_body => {
                if headers.insert(key, (line.clone(), value)).is_some() {
                    return Err(line.semantic(format!("duplicate header `{key}`")));
                }
            }
            _ => {
                in_body = true;
                body.push(line);
            }
        }
    }
    let kind = match headers.get("type") {
        Some((_, v)) => v.to_string(),
        None => {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "missing `type:` header".into(),
            })
        }
    };
    Ok(Document { headers, kind, body })
}

impl<'a> Document<'a> {
    pub fn header(&self, key: &str) -> Result<(&Line<'a>, &'a str)> {
        self.headers
            .get(key)
            .map(|(l, v)| (l, *v))
            .ok_or_else(|| Error::Syntax {
                line: 1,
                column: 1,
                message: format!("missing `{key}:` header"),
            })
    }

    pub fn alphabet(&self, key: &str) -> Result<Alphabet> {
        let (line, value) = self.header(key)?;
        Alphabet::new(value.split_whitespace()).map_err(|e| line.semantic_from(e))
    }

    pub fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            let (line, _) = self.header("type")?;
            Err(line.semantic(format!("expected type `{kind}`, found `{}`", self.kind)))
        }
    }
}

/// Declared states with their final flags.
struct StateDecl {
    names: Vec<String>,
    index: HashMap<String, u32>,
    initial: u32,
    finals: Vec<bool>,
}

fn states(doc: &Document<'_>) -> Result<StateDecl> {
    let (line, value) = doc.header("states")?;
    let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return Err(line.semantic("no states declared"));
    }
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i as u32).is_some() {
            return Err(line.semantic(format!("duplicate state `{n}`")));
        }
    }
    let lookup = |line: &Line<'_>, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| line.semantic(format!("unknown state `{name}`")))
    };
    let (iline, ivalue) = doc.header("initial")?;
    let initial = lookup(iline, ivalue)?;
    let mut finals = vec![false; names.len()];
    if let Ok((fline, fvalue)) = doc.header("final") {
        for name in fvalue.split_whitespace() {
            finals[lookup(fline, name)? as usize] = true;
        }
    }
    Ok(StateDecl {
        names,
        index,
        initial,
        finals,
    })
}

impl StateDecl {
    fn get(&self, line: &Line<'_>, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| line.semantic(format!("unknown state `{name}`")))
    }
}

fn parse_production(line: &Line<'_>, alphabet: &Alphabet, tokens: &[&str], first_col: usize) -> Result<Word> {
    if tokens.is_empty() {
        return Err(line.syntax(first_col, "missing production"));
    }
    if tokens == ["-"] {
        return Ok(Vec::new());
    }
    alphabet
        .parse_word(&tokens.join(" "))
        .map_err(|e| line.semantic_from(e))
}

fn format_production(alphabet: &Alphabet, word: &[u32]) -> String {
    if word.is_empty() {
        "-".into()
    } else {
        alphabet.format_word(word)
    }
}

/// Splits `q sym -> q' / rest` into its parts.
fn arrow_line<'a>(line: &Line<'a>) -> Result<(&'a str, &'a str, &'a str, Vec<&'a str>, usize)> {
    let toks: Vec<&str> = line.text.split_whitespace().collect();
    if toks.len() < 4 || toks[2] != "->" {
        return Err(line.syntax(line.token_column(2.min(toks.len())), "expected `state symbol -> state`"));
    }
    let rest = if toks.len() > 4 {
        if toks[4] != "/" {
            return Err(line.syntax(line.token_column(4), "expected `/`"));
        }
        toks[5..].to_vec()
    } else {
        Vec::new()
    };
    Ok((toks[0], toks[1], toks[3], rest, line.token_column(5)))
}

pub fn parse_twoway(src: &str) -> Result<TwoWayTransducer> {
    let doc = document(src)?;
    doc.expect_kind("twoway")?;
    twoway_from(&doc)
}

fn twoway_from(doc: &Document<'_>) -> Result<TwoWayTransducer> {
    let input = doc.alphabet("input")?;
    let output = doc.alphabet("output")?;
    let decl = states(doc)?;
    let mut t = TwoWayTransducer::new(decl.names.clone(), input.clone(), output.clone(), decl.initial, decl.finals.clone())?;
    let mut seen = std::collections::HashSet::new();
    for line in &doc.body {
        let (from, sym, to, rest, col) = arrow_line(line)?;
        let q = decl.get(line, from)?;
        let target = decl.get(line, to)?;
        let sym = Sym::parse(&input, sym).map_err(|e| line.semantic_from(e))?;
        if rest.is_empty() {
            return Err(line.syntax(line.text.len(), "expected `/ production move`"));
        }
        let (mv_tok, prod) = rest.split_last().expect("non-empty");
        let mv = match *mv_tok {
            "-1" => Move::Left,
            "0" => Move::Stay,
            "+1" | "1" => Move::Right,
            other => {
                return Err(line.syntax(
                    line.token_column(4 + rest.len()),
                    format!("bad move `{other}`"),
                ))
            }
        };
        let out = parse_production(line, &output, prod, col)?;
        if !seen.insert((q, sym)) {
            return Err(line.semantic("duplicate transition (machine must be deterministic)"));
        }
        t.set_transition(q, sym, target, out, mv)
            .map_err(|e| line.semantic_from(e))?;
    }
    Ok(t)
}

fn header_block(out: &mut String, kind: &str, pairs: &[(&str, String)]) {
    let _ = writeln!(out, "type: {kind}");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}: {v}");
    }
    out.push('\n');
}

pub fn serialize_twoway(t: &TwoWayTransducer) -> String {
    let mut out = String::new();
    let finals: Vec<&str> = (0..t.num_states() as u32)
        .filter(|&q| t.is_final(q))
        .map(|q| t.state_name(q))
        .collect();
    header_block(
        &mut out,
        "twoway",
        &[
            ("input", t.input().to_string()),
            ("output", t.output().to_string()),
            ("states", t.state_names().join(" ")),
            ("initial", t.state_name(t.initial()).to_string()),
            ("final", finals.join(" ")),
        ],
    );
    for (q, sym, tr) in t.transitions() {
        let _ = writeln!(
            out,
            "{} {} -> {} / {} {}",
            t.state_name(q),
            sym.format(t.input()),
            t.state_name(tr.target),
            format_production(t.output(), &tr.output),
            tr.mv.format()
        );
    }
    out
}

pub fn parse_sequential(src: &str) -> Result<SequentialTransducer> {
    let doc = document(src)?;
    doc.expect_kind("sequential")?;
    let input = doc.alphabet("input")?;
    let output = doc.alphabet("output")?;
    let decl = states(&doc)?;
    let mut t = SequentialTransducer::new(decl.names.clone(), input.clone(), output.clone(), decl.initial, decl.finals.clone())?;
    let mut seen = std::collections::HashSet::new();
    for line in &doc.body {
        let (from, sym, to, rest, col) = arrow_line(line)?;
        let q = decl.get(line, from)?;
        let target = decl.get(line, to)?;
        let a = input.letter(sym).map_err(|e| line.semantic_from(e))?;
        let out = parse_production(line, &output, &rest, col)?;
        if !seen.insert((q, a)) {
            return Err(line.semantic("duplicate transition (machine must be deterministic)"));
        }
        t.set_transition(q, a, target, out).map_err(|e| line.semantic_from(e))?;
    }
    Ok(t)
}

pub fn serialize_sequential(t: &SequentialTransducer) -> String {
    let mut out = String::new();
    let finals: Vec<&str> = (0..t.num_states() as u32)
        .filter(|&q| t.is_final(q))
        .map(|q| t.state_name(q))
        .collect();
    header_block(
        &mut out,
        "sequential",
        &[
            ("input", t.input().to_string()),
            ("output", t.output().to_string()),
            ("states", t.state_names().join(" ")),
            ("initial", t.state_name(t.initial()).to_string()),
            ("final", finals.join(" ")),
        ],
    );
    for q in 0..t.num_states() as u32 {
        for a in t.input().letters() {
            if let Some(tr) = t.transition(q, a) {
                let _ = writeln!(
                    out,
                    "{} {} -> {} / {}",
                    t.state_name(q),
                    t.input().symbol(a),
                    t.state_name(tr.target),
                    format_production(t.output(), &tr.output)
                );
            }
        }
    }
    out
}

pub fn parse_dfa(src: &str) -> Result<Dfa> {
    let doc = document(src)?;
    doc.expect_kind("dfa")?;
    dfa_from(&doc)
}

fn dfa_from(doc: &Document<'_>) -> Result<Dfa> {
    let alphabet = doc.alphabet("alphabet")?;
    let decl = states(doc)?;
    let k = alphabet.len();
    let mut delta = vec![u32::MAX; decl.names.len() * k];
    for line in &doc.body {
        let (from, sym, to, rest, _) = arrow_line(line)?;
        if !rest.is_empty() {
            return Err(line.syntax(line.token_column(4), "unexpected production in a DFA"));
        }
        let s = decl.get(line, from)?;
        let t = decl.get(line, to)?;
        let a = alphabet.letter(sym).map_err(|e| line.semantic_from(e))?;
        let slot = &mut delta[s as usize * k + a as usize];
        if *slot != u32::MAX {
            return Err(line.semantic("duplicate transition"));
        }
        *slot = t;
    }
    if let Some(i) = delta.iter().position(|&t| t == u32::MAX) {
        return Err(Error::Semantic {
            line: doc.body.last().map_or(1, |l| l.number),
            message: format!(
                "transition of `{}` on `{}` is missing (DFAs must be complete)",
                decl.names[i / k],
                alphabet.symbol((i % k) as u32)
            ),
        });
    }
    Dfa::new(alphabet, decl.initial, decl.finals, delta)
}

pub fn serialize_dfa(d: &Dfa) -> String {
    let mut out = String::new();
    let n = d.num_states();
    let finals: Vec<String> = (0..n as u32).filter(|&s| d.is_final(s)).map(|s| s.to_string()).collect();
    header_block(
        &mut out,
        "dfa",
        &[
            ("alphabet", d.alphabet().to_string()),
            ("states", (0..n).map(|s| s.to_string()).collect::<Vec<_>>().join(" ")),
            ("initial", d.initial().to_string()),
            ("final", finals.join(" ")),
        ],
    );
    for s in 0..n as u32 {
        for a in d.alphabet().letters() {
            let _ = writeln!(out, "{s} {} -> {}", d.alphabet().symbol(a), d.step(s, a));
        }
    }
    out
}

/// A `monoid NAME { ... }` block (a two-way machine) or a `dfa NAME { ... }`
/// block. `inner` is padded with blank lines so that line numbers match the
/// enclosing file.
pub(crate) struct Block {
    pub keyword: &'static str,
    pub name: String,
    pub line: usize,
    pub inner: String,
}

impl Block {
    fn monoid(&self) -> Result<std::sync::Arc<TransitionMonoid>> {
        Ok(std::sync::Arc::new(TransitionMonoid::new(&parse_twoway(&self.inner)?)))
    }

    fn wrong_kind(&self) -> Error {
        Error::Semantic {
            line: self.line,
            message: format!("`{}` blocks are not allowed here", self.keyword),
        }
    }
}

/// Extracts named blocks and returns the remaining text with the block
/// lines blanked, so line numbers stay meaningful.
pub(crate) fn extract_blocks(src: &str) -> Result<(String, Vec<Block>)> {
    let raw: Vec<&str> = src.lines().collect();
    let mut rest = String::new();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let t = raw[i].split('#').next().unwrap_or("").trim();
        let toks: Vec<&str> = t.split_whitespace().collect();
        let keyword = match toks.first() {
            Some(&"monoid") => Some("monoid"),
            Some(&"dfa") if toks.last() == Some(&"{") => Some("dfa"),
            _ => None,
        };
        if let Some(keyword) = keyword {
            if toks.len() != 3 || toks[2] != "{" {
                return Err(Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: format!("expected `{keyword} NAME {{`"),
                });
            }
            let start = i;
            let mut inner = "\n".repeat(start + 1);
            i += 1;
            while i < raw.len() && raw[i].split('#').next().unwrap_or("").trim() != "}" {
                inner.push_str(raw[i]);
                inner.push('\n');
                i += 1;
            }
            if i == raw.len() {
                return Err(Error::Syntax {
                    line: start + 1,
                    column: 1,
                    message: format!("unterminated {keyword} block"),
                });
            }
            blocks.push(Block { keyword, name: toks[1].to_string(), line: start + 1, inner });
            for _ in start..=i {
                rest.push('\n');
            }
            i += 1;
            continue;
        }
        rest.push_str(raw[i]);
        rest.push('\n');
        i += 1;
    }
    Ok((rest, blocks))
}

fn write_blocks<'a, I: IntoIterator<Item = (&'a str, &'a std::sync::Arc<TransitionMonoid>)>>(out: &mut String, monoids: I) {
    for (name, m) in monoids {
        let _ = writeln!(out, "monoid {name} {{");
        out.push_str(&serialize_twoway(m.machine()));
        out.push_str("}\n\n");
    }
}

/// Byte offset of `inner` inside `outer` (a subslice).
fn offset_in(outer: &str, inner: &str) -> usize {
    inner.as_ptr() as usize - outer.as_ptr() as usize
}

pub(crate) fn formula_on(line: &Line<'_>, text: &str, alphabet: &Alphabet) -> Result<Formula> {
    let col = line.offset + offset_in(line.text, text) + 1;
    parse_formula_at(text, alphabet, line.number, col)
}

pub fn parse_fot(src: &str) -> Result<FoTransduction> {
    let (rest, blocks) = extract_blocks(src)?;
    let doc = document(&rest)?;
    doc.expect_kind("fot")?;
    let input = doc.alphabet("input")?;
    let output = doc.alphabet("output")?;
    let (cline, cvalue) = doc.header("copies")?;
    let copies: Vec<String> = cvalue.split_whitespace().map(str::to_string).collect();
    let mut t = FoTransduction::new(input.clone(), output.clone(), copies).map_err(|e| cline.semantic_from(e))?;
    for b in blocks {
        if b.keyword != "monoid" {
            return Err(b.wrong_kind());
        }
        t.register(&b.name, b.monoid()?)?;
    }
    if let Ok((dline, dvalue)) = doc.header("dom") {
        let f = formula_on(dline, dvalue, &input)?;
        t.set_dom(f).map_err(|e| dline.semantic_from(e))?;
    }
    let mut seen = std::collections::HashSet::new();
    for line in &doc.body {
        let Some((lhs, rhs)) = line.text.split_once(':') else {
            return Err(line.syntax(0, "expected `pos C B: formula` or `le C D: formula`"));
        };
        let toks: Vec<&str> = lhs.split_whitespace().collect();
        let rhs_trim = rhs.trim_start();
        let f = formula_on(line, rhs_trim, &input)?;
        match toks.as_slice() {
            ["pos", c, b] => {
                let c = t.copy(c).map_err(|e| line.semantic_from(e))?;
                let b = output.letter(b).map_err(|e| line.semantic_from(e))?;
                if !seen.insert(("pos", c, b as usize)) {
                    return Err(line.semantic("duplicate position formula"));
                }
                t.set_pos(c, b, f).map_err(|e| line.semantic_from(e))?;
            }
            ["le", c, d] => {
                let c = t.copy(c).map_err(|e| line.semantic_from(e))?;
                let d = t.copy(d).map_err(|e| line.semantic_from(e))?;
                if !seen.insert(("le", c, d)) {
                    return Err(line.semantic("duplicate order formula"));
                }
                t.set_le(c, d, f).map_err(|e| line.semantic_from(e))?;
            }
            _ => return Err(line.syntax(0, "expected `pos C B:` or `le C D:`")),
        }
    }
    Ok(t)
}

pub fn serialize_fot(t: &FoTransduction) -> String {
    let mut out = String::new();
    header_block(
        &mut out,
        "fot",
        &[
            ("input", t.input().to_string()),
            ("output", t.output().to_string()),
            ("copies", t.copies().join(" ")),
            ("dom", serialize_formula(t.dom(), t.input())),
        ],
    );
    write_blocks(&mut out, t.registry().iter());
    let c = t.copies().len();
    for i in 0..c {
        for b in t.output().letters() {
            let f = t.pos(i, b);
            if !f.is_false() {
                let _ = writeln!(
                    out,
                    "pos {} {}: {}",
                    t.copies()[i],
                    t.output().symbol(b),
                    serialize_formula(f, t.input())
                );
            }
        }
    }
    for i in 0..c {
        for j in 0..c {
            let f = t.le(i, j);
            if !f.is_false() {
                let _ = writeln!(
                    out,
                    "le {} {}: {}",
                    t.copies()[i],
                    t.copies()[j],
                    serialize_formula(f, t.input())
                );
            }
        }
    }
    out
}

/// A transition monoid is stored as the machine it comes from.
pub fn parse_monoid(src: &str) -> Result<TransitionMonoid> {
    let doc = document(src)?;
    doc.expect_kind("monoid")?;
    Ok(TransitionMonoid::new(&twoway_from(&doc)?))
}

pub fn serialize_monoid(m: &TransitionMonoid) -> String {
    let text = serialize_twoway(m.machine());
    format!("type: monoid{}", &text["type: twoway".len()..])
}

/// A formula with its alphabet, free variables, evaluation context and the
/// monoids its class atoms refer to.
#[derive(Clone, Debug)]
pub struct FormulaFile {
    pub alphabet: Alphabet,
    pub vars: Vec<String>,
    pub context: Context,
    pub formula: Formula,
    pub registry: Registry,
}

fn registry_from(blocks: &[Block]) -> Result<Registry> {
    let mut r = Registry::new();
    for b in blocks {
        if b.keyword != "monoid" {
            return Err(b.wrong_kind());
        }
        r.register(&b.name, b.monoid()?).map_err(|e| Error::Semantic { line: b.line, message: e.to_string() })?;
    }
    Ok(r)
}

pub fn parse_formula_file(src: &str) -> Result<FormulaFile> {
    let (rest, blocks) = extract_blocks(src)?;
    let doc = document(&rest)?;
    doc.expect_kind("formula")?;
    let alphabet = doc.alphabet("alphabet")?;
    let vars: Vec<String> = match doc.header("vars") {
        Ok((_, v)) => v.split_whitespace().map(str::to_string).collect(),
        Err(_) => Vec::new(),
    };
    let context = match doc.header("context") {
        Err(_) => Context::Word,
        Ok((_, "word")) => Context::Word,
        Ok((_, "marked")) => Context::Marked,
        Ok((line, other)) => return Err(line.semantic(format!("unknown context `{other}`"))),
    };
    let registry = registry_from(&blocks)?;
    let [line] = doc.body.as_slice() else {
        let at = doc.body.get(1).map_or(1, |l| l.number);
        return Err(Error::Syntax { line: at, column: 1, message: "expected exactly one formula line".into() });
    };
    let formula = formula_on(line, line.text, &alphabet)?;
    if let Some(v) = formula.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(line.semantic(format!("free variable `{v}` is not declared in `vars:`")));
    }
    Ok(FormulaFile { alphabet, vars, context, formula, registry })
}

pub fn serialize_formula_file(f: &FormulaFile) -> String {
    let mut out = String::new();
    let context = match f.context {
        Context::Word => "word",
        Context::Marked => "marked",
    };
    header_block(
        &mut out,
        "formula",
        &[("alphabet", f.alphabet.to_string()), ("vars", f.vars.join(" ")), ("context", context.into())],
    );
    write_blocks(&mut out, f.registry.iter());
    let _ = writeln!(out, "{}", serialize_formula(&f.formula, &f.alphabet));
    out
}

fn parse_move(line: &Line<'_>, tok: &str, token: usize) -> Result<Move> {
    match tok {
        "-1" => Ok(Move::Left),
        "0" => Ok(Move::Stay),
        "+1" | "1" => Ok(Move::Right),
        other => Err(line.syntax(line.token_column(token), format!("bad move `{other}`"))),
    }
}

/// Star-free look-around machine: `dfa NAME { ... }` blocks declare the test
/// languages, transitions read `q PREFIX sym SUFFIX -> q' / prod move`.
pub fn parse_sf_lookaround(src: &str) -> Result<SfLookAroundTransducer> {
    let (rest, blocks) = extract_blocks(src)?;
    let doc = document(&rest)?;
    doc.expect_kind("sfla")?;
    let input = doc.alphabet("input")?;
    let output = doc.alphabet("output")?;
    let decl = states(&doc)?;
    let mut t = SfLookAroundTransducer::new(decl.names.clone(), input.clone(), output.clone(), decl.initial, decl.finals.clone())?;
    let mut langs: HashMap<String, usize> = HashMap::new();
    for b in &blocks {
        if b.keyword != "dfa" {
            return Err(b.wrong_kind());
        }
        let at = |e: Error| Error::Semantic { line: b.line, message: e.to_string() };
        let d = parse_dfa(&b.inner)?;
        let i = t.add_language(&d).map_err(at)?;
        if langs.insert(b.name.clone(), i).is_some() {
            return Err(Error::Semantic { line: b.line, message: format!("duplicate language `{}`", b.name) });
        }
    }
    for line in &doc.body {
        let toks: Vec<&str> = line.text.split_whitespace().collect();
        if toks.len() < 9 || toks[4] != "->" || toks[6] != "/" {
            return Err(line.syntax(0, "expected `q PREFIX sym SUFFIX -> q' / prod move`"));
        }
        let lang = |name: &str| langs.get(name).copied().ok_or_else(|| line.semantic(format!("unknown language `{name}`")));
        let from = decl.get(line, toks[0])?;
        let prefix = lang(toks[1])?;
        let sym = Sym::parse(&input, toks[2]).map_err(|e| line.semantic_from(e))?;
        let suffix = lang(toks[3])?;
        let target = decl.get(line, toks[5])?;
        let last = toks.len() - 1;
        let mv = parse_move(line, toks[last], last)?;
        let out = parse_production(line, &output, &toks[7..last], line.token_column(7))?;
        t.add_transition(SfTransition { from, test: Test { prefix, sym, suffix }, target, output: out, mv })
            .map_err(|e| line.semantic_from(e))?;
    }
    Ok(t)
}

pub fn serialize_sf_lookaround(t: &SfLookAroundTransducer) -> String {
    let mut out = String::new();
    let names = t.state_names();
    let finals: Vec<&str> = (0..t.num_states() as u32).filter(|&q| t.is_final(q)).map(|q| names[q as usize].as_str()).collect();
    header_block(
        &mut out,
        "sfla",
        &[
            ("input", t.input().to_string()),
            ("output", t.output().to_string()),
            ("states", names.join(" ")),
            ("initial", names[t.initial() as usize].clone()),
            ("final", finals.join(" ")),
        ],
    );
    for (i, d) in t.languages().iter().enumerate() {
        let _ = writeln!(out, "dfa L{i} {{");
        out.push_str(&serialize_dfa(d));
        out.push_str("}\n\n");
    }
    for tr in t.transitions() {
        let _ = writeln!(
            out,
            "{} L{} {} L{} -> {} / {} {}",
            names[tr.from as usize],
            tr.test.prefix,
            tr.test.sym.format(t.input()),
            tr.test.suffix,
            names[tr.target as usize],
            format_production(t.output(), &tr.output),
            tr.mv.format()
        );
    }
    out
}

/// First-order look-around machine: each transition is `q -> q' / prod`
/// followed by `test: φ(x)` and `jump: ψ(x,y)` lines.
pub fn parse_fo_lookaround(src: &str) -> Result<FoLookAroundTransducer> {
    let (rest, blocks) = extract_blocks(src)?;
    let doc = document(&rest)?;
    doc.expect_kind("fola")?;
    let input = doc.alphabet("input")?;
    let output = doc.alphabet("output")?;
    let decl = states(&doc)?;
    let registry = registry_from(&blocks)?;
    let mut t = FoLookAroundTransducer::new(decl.names.clone(), input.clone(), output.clone(), decl.initial, decl.finals.clone(), registry)?;
    let mut body = doc.body.iter();
    while let Some(line) = body.next() {
        let toks: Vec<&str> = line.text.split_whitespace().collect();
        if toks.len() < 5 || toks[1] != "->" || toks[3] != "/" {
            return Err(line.syntax(0, "expected `q -> q' / prod`"));
        }
        let from = decl.get(line, toks[0])?;
        let target = decl.get(line, toks[2])?;
        let out = parse_production(line, &output, &toks[4..], line.token_column(4))?;
        let mut part = |key: &str| -> Result<Formula> {
            let next = body.next().ok_or_else(|| line.syntax(line.text.len(), format!("missing `{key}:` line")))?;
            match next.text.split_once(':') {
                Some((k, f)) if k.trim() == key => formula_on(next, f.trim_start(), &input),
                _ => Err(next.syntax(0, format!("expected `{key}: formula`"))),
            }
        };
        let test = part("test")?;
        let jump = part("jump")?;
        t.add_transition(FoTransition { from, test, target, output: out, jump }).map_err(|e| line.semantic_from(e))?;
    }
    Ok(t)
}

pub fn serialize_fo_lookaround(t: &FoLookAroundTransducer) -> String {
    let mut out = String::new();
    let names = t.state_names();
    let finals: Vec<&str> = (0..t.num_states() as u32).filter(|&q| t.is_final(q)).map(|q| names[q as usize].as_str()).collect();
    header_block(
        &mut out,
        "fola",
        &[
            ("input", t.input().to_string()),
            ("output", t.output().to_string()),
            ("states", names.join(" ")),
            ("initial", names[t.initial() as usize].clone()),
            ("final", finals.join(" ")),
        ],
    );
    write_blocks(&mut out, t.registry().iter());
    for tr in t.transitions() {
        let _ = writeln!(
            out,
            "{} -> {} / {}\n  test: {}\n  jump: {}",
            names[tr.from as usize],
            names[tr.target as usize],
            format_production(t.output(), &tr.output),
            serialize_formula(&tr.test, t.input()),
            serialize_formula(&tr.jump, t.input())
        );
    }
    out
}
