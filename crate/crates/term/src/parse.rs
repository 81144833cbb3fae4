//! Lexer and recursive-descent parser for specification files and term
//! expressions. Sums over finite domains and parameterized events and
//! recursion variables are expanded while parsing.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::label::{Action, Label};
use crate::signature::Signature;
use crate::spec::{RecSpec, SpecFile};
use crate::term::{LabelSet, Term};

/// A parse or elaboration error with its source position (1-based; 0 when
/// the error is not tied to a position).
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 19] =
    ["||", "<>", "->", "|", ".", "+", "(", ")", "{", "}", "[", "]", ",", ";", "=", "#", ":", "<", ">"];

const KEYWORDS: [&str; 21] = [
    "domain", "events", "comm", "gamma", "conflict", "rename", "proc", "rec", "where", "sum", "in", "for",
    "theta", "unless", "encap", "hide", "proj", "rho", "tau", "delta", "shadow",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' || c == '\'' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let w: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Word(w), line, col });
            col += i - start;
            continue;
        }
        let unicode = match c {
            '·' => Some("."),
            '∥' => Some("||"),
            '≬' => Some("<>"),
            '♯' => Some("#"),
            _ => None,
        };
        if let Some(s) = unicode {
            out.push(Token { tok: Tok::Sym(s), line, col });
            i += 1;
            col += 1;
            continue;
        }
        let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), line, col });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(ParseError { line, col, message: format!("unexpected character '{c}'") });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// A recursion variable head: base name and typed parameters.
#[derive(Clone, Debug)]
struct Head {
    name: String,
    params: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
struct RecScope {
    spec: String,
    heads: BTreeMap<String, usize>,
}

/// A label whose data arguments may still be variables.
#[derive(Clone, Debug)]
enum LabelTemplate {
    Tau,
    Delta,
    Act(String, Vec<String>),
    Shadow(Box<LabelTemplate>, u32),
}

struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    limit: usize,
    spec: &'s mut SpecFile,
    env: Vec<(String, Arc<str>)>,
    scope: Option<RecScope>,
}

type PResult<T> = Result<T, ParseError>;

/// Parses a specification file.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let mut spec = SpecFile::default();
    let toks = lex(text)?;
    let limit = toks.len() - 1;
    let mut p = Parser { toks, pos: 0, limit, spec: &mut spec, env: vec![], scope: None };
    while !p.at_eof() {
        p.item()?;
    }
    for s in spec.recspecs.values() {
        for rhs in s.equations.values() {
            spec.check_closed(rhs).map_err(|e| ParseError { line: 0, col: 0, message: e.to_string() })?;
        }
    }
    for t in spec.procs.values() {
        spec.check_closed(t).map_err(|e| ParseError { line: 0, col: 0, message: e.to_string() })?;
    }
    Ok(spec)
}

/// Parses a term expression (optionally with a `where` clause) against an
/// existing specification; `where` clauses register a fresh recursive
/// specification in `spec`.
pub fn parse_term(spec: &mut SpecFile, text: &str) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let limit = toks.len() - 1;
    let mut p = Parser { toks, pos: 0, limit, spec, env: vec![], scope: None };
    let t = p.term_expr()?;
    if !p.at_eof() {
        return Err(p.err("unexpected trailing input"));
    }
    p.spec.check_closed(&t).map_err(|e| ParseError { line: 0, col: 0, message: e.to_string() })?;
    Ok(t)
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        if self.pos >= self.limit {
            &Tok::Eof
        } else {
            &self.toks[self.pos].tok
        }
    }

    fn peek_at(&self, k: usize) -> &Tok {
        if self.pos + k >= self.limit {
            &Tok::Eof
        } else {
            &self.toks[self.pos + k].tok
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn err(&self, msg: &str) -> ParseError {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        ParseError { line: t.line, col: t.col, message: msg.to_string() }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{s}'")))
        }
    }

    fn expect_keyword(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{w}'")))
        }
    }

    fn word(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn ident(&mut self) -> PResult<String> {
        let w = self.word()?;
        if KEYWORDS.contains(&w.as_str()) {
            self.pos -= 1;
            return Err(self.err(&format!("reserved word '{w}' used as identifier")));
        }
        Ok(w)
    }

    fn number(&mut self) -> PResult<u32> {
        let w = self.word()?;
        w.parse().map_err(|_| {
            self.pos -= 1;
            self.err("expected a nonnegative integer")
        })
    }

    // ---- top-level items ----

    fn item(&mut self) -> PResult<()> {
        let kw = self.word()?;
        match kw.as_str() {
            "domain" => self.domain_decl(),
            "events" => self.events_decl(),
            "comm" => self.comm_decl(),
            "conflict" => self.conflict_decl(),
            "rename" => self.rename_decl(),
            "proc" => self.proc_decl(),
            "rec" => self.rec_decl(),
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("expected a declaration, found '{kw}'")))
            }
        }
    }

    fn domain_decl(&mut self) -> PResult<()> {
        let name = self.ident()?;
        self.expect_sym("=")?;
        self.expect_sym("{")?;
        let mut vals: Vec<Arc<str>> = Vec::new();
        if !self.is_sym("}") {
            loop {
                let v = self.word()?;
                if !vals.iter().any(|x| **x == *v) {
                    vals.push(v.as_str().into());
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        self.expect_sym(";")?;
        if vals.is_empty() {
            return Err(self.err(&format!("domain {name} is empty")));
        }
        self.spec.signature.domains.insert(name, vals);
        Ok(())
    }

    fn events_decl(&mut self) -> PResult<()> {
        self.spec.signature.events_declared = true;
        loop {
            let name = self.ident()?;
            let mut arg_sets: Vec<Vec<Arc<str>>> = Vec::new();
            if self.eat_sym("(") {
                loop {
                    let a = self.word()?;
                    match self.spec.signature.domains.get(&a) {
                        Some(vals) => arg_sets.push(vals.clone()),
                        None => arg_sets.push(vec![a.as_str().into()]),
                    }
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
            }
            for combo in cartesian(&arg_sets) {
                self.spec.signature.events.insert(Action::with_args(&name, &combo));
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(";")
    }

    fn binders(&mut self) -> PResult<Vec<(String, Vec<Arc<str>>)>> {
        let mut out = Vec::new();
        loop {
            let v = self.ident()?;
            self.expect_keyword("in")?;
            let d = self.ident()?;
            let vals = self
                .spec
                .signature
                .domains
                .get(&d)
                .cloned()
                .ok_or_else(|| self.err(&format!("undeclared domain '{d}'")))?;
            out.push((v, vals));
            if !(self.is_sym(",") && matches!(self.peek_at(2), Tok::Word(w) if w == "in")) {
                break;
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn optional_for(&mut self) -> PResult<Vec<(String, Vec<Arc<str>>)>> {
        if self.is_word("for") {
            self.pos += 1;
            self.binders()
        } else {
            Ok(vec![])
        }
    }

    fn comm_decl(&mut self) -> PResult<()> {
        self.expect_keyword("gamma")?;
        self.expect_sym("(")?;
        let a = self.label_template()?;
        self.expect_sym(",")?;
        let b = self.label_template()?;
        self.expect_sym(")")?;
        self.expect_sym("=")?;
        let c = self.label_template()?;
        let binders = self.optional_for()?;
        self.expect_sym(";")?;
        for env in assignments(&binders) {
            let (la, lb, lc) = (self.ground(&a, &env)?, self.ground(&b, &env)?, self.ground(&c, &env)?);
            self.spec.signature.add_gamma(la, lb, lc);
        }
        Ok(())
    }

    fn conflict_decl(&mut self) -> PResult<()> {
        let a = self.label_template()?;
        self.expect_sym("#")?;
        let b = self.label_template()?;
        let binders = self.optional_for()?;
        self.expect_sym(";")?;
        for env in assignments(&binders) {
            let (la, lb) = (self.ground(&a, &env)?, self.ground(&b, &env)?);
            self.spec.signature.add_conflict(la, lb);
        }
        Ok(())
    }

    fn rename_decl(&mut self) -> PResult<()> {
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut map = BTreeMap::new();
        if !self.is_sym("}") {
            loop {
                let from = self.label_template()?;
                self.expect_sym("->")?;
                let to = self.label_template()?;
                let env = vec![];
                map.insert(self.ground(&from, &env)?, self.ground(&to, &env)?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        self.expect_sym(";")?;
        self.spec.signature.add_renaming(&name, map);
        Ok(())
    }

    fn proc_decl(&mut self) -> PResult<()> {
        let name = self.ident()?;
        self.expect_sym("=")?;
        let t = self.term_expr()?;
        self.expect_sym(";")?;
        self.spec.procs.insert(name, t);
        Ok(())
    }

    fn rec_decl(&mut self) -> PResult<()> {
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut entries: Vec<(Head, usize)> = Vec::new();
        while !self.is_sym("}") {
            let head = self.head()?;
            self.expect_sym("=")?;
            let body_start = self.pos;
            self.skip_to_depth0(&[";"])?;
            self.expect_sym(";")?;
            entries.push((head, body_start));
        }
        self.expect_sym("}")?;
        self.eat_sym(";");
        let after = self.pos;
        let scope = RecScope {
            spec: name.clone(),
            heads: entries.iter().map(|(h, _)| (h.name.clone(), h.params.len())).collect(),
        };
        let eqs = self.bodies(&entries, &scope)?;
        let mut rs = RecSpec::new(&name);
        rs.equations = eqs;
        self.spec.add_recspec(rs);
        self.pos = after;
        Ok(())
    }

    fn head(&mut self) -> PResult<Head> {
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat_sym("(") {
            loop {
                let v = self.ident()?;
                self.expect_sym(":")?;
                let d = self.ident()?;
                if !self.spec.signature.domains.contains_key(&d) {
                    return Err(self.err(&format!("undeclared domain '{d}'")));
                }
                params.push((v, d));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        Ok(Head { name, params })
    }

    /// Parses each equation body once per ground instance of its head.
    fn bodies(&mut self, entries: &[(Head, usize)], scope: &RecScope) -> PResult<BTreeMap<Arc<str>, Term>> {
        let saved_scope = self.scope.replace(scope.clone());
        let mut eqs = BTreeMap::new();
        for (head, start) in entries {
            let sets: Vec<(String, Vec<Arc<str>>)> = head
                .params
                .iter()
                .map(|(v, d)| (v.clone(), self.spec.signature.domains[d].clone()))
                .collect();
            for env in assignments(&sets) {
                let vals: Vec<Arc<str>> = env.iter().map(|(_, v)| v.clone()).collect();
                let key = var_key(&head.name, &vals);
                self.pos = *start;
                let depth = self.env.len();
                self.env.extend(env);
                let body = self.alt();
                self.env.truncate(depth);
                let body = body?;
                if !(self.is_sym(";") || self.is_sym(",") || self.at_eof()) {
                    self.scope = saved_scope;
                    return Err(self.err("unexpected input after equation"));
                }
                if eqs.insert(Arc::from(key.as_str()), body).is_some() {
                    self.scope = saved_scope;
                    return Err(self.err(&format!("variable {key} defined twice")));
                }
            }
        }
        self.scope = saved_scope;
        Ok(eqs)
    }

    fn skip_to_depth0(&mut self, stops: &[&str]) -> PResult<()> {
        let mut depth = 0i32;
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Sym(s) => {
                    if depth == 0 && stops.contains(&s) {
                        return Ok(());
                    }
                    match s {
                        "(" | "{" | "[" => depth += 1,
                        ")" | "}" | "]" => {
                            if depth == 0 {
                                return Ok(());
                            }
                            depth -= 1
                        }
                        _ => {}
                    }
                }
                Tok::Word(w) if depth == 0 && stops.contains(&w.as_str()) => return Ok(()),
                _ => {}
            }
            self.pos += 1;
        }
    }

    // ---- term expressions ----

    /// A term optionally followed by `where X = t, Y = u`.
    fn term_expr(&mut self) -> PResult<Term> {
        let start = self.pos;
        self.skip_to_depth0(&[";", "where"])?;
        if !self.is_word("where") {
            self.pos = start;
            return self.alt();
        }
        let where_at = self.pos;
        self.pos += 1;
        let mut entries = Vec::new();
        loop {
            let head = self.head()?;
            self.expect_sym("=")?;
            let body_start = self.pos;
            self.skip_to_depth0(&[";", ","])?;
            entries.push((head, body_start));
            if !self.eat_sym(",") {
                break;
            }
        }
        let end = self.pos;
        let mut n = self.spec.recspecs.len() + 1;
        while self.spec.recspecs.contains_key(format!("W{n}").as_str()) {
            n += 1;
        }
        let name = format!("W{n}");
        let scope = RecScope {
            spec: name.clone(),
            heads: entries.iter().map(|(h, _)| (h.name.clone(), h.params.len())).collect(),
        };
        let eqs = self.bodies(&entries, &scope)?;
        self.pos = start;
        let saved_scope = self.scope.replace(scope);
        let main = self.alt();
        let main_end = self.pos;
        self.scope = saved_scope;
        let main = main?;
        if main_end != where_at {
            self.pos = main_end;
            return Err(self.err("unexpected input before 'where'"));
        }
        let mut rs = RecSpec::new(&name);
        rs.equations = eqs;
        self.spec.add_recspec(rs);
        self.pos = end;
        Ok(main)
    }

    fn alt(&mut self) -> PResult<Term> {
        let mut ops = vec![self.unless()?];
        while self.eat_sym("+") {
            ops.push(self.unless()?);
        }
        Ok(Term::alt_all(ops))
    }

    fn unless(&mut self) -> PResult<Term> {
        let mut lhs = self.par()?;
        while self.is_word("unless") {
            self.pos += 1;
            let rhs = self.par()?;
            lhs = Term::unless(lhs, rhs);
        }
        Ok(lhs)
    }

    fn par(&mut self) -> PResult<Term> {
        let mut operands = vec![self.seq()?];
        let mut ops: Vec<&'static str> = Vec::new();
        loop {
            let op = match self.peek() {
                Tok::Sym(s) if ["||", "|", "<>"].contains(s) => *s,
                _ => break,
            };
            self.pos += 1;
            ops.push(op);
            operands.push(self.seq()?);
        }
        if ops.is_empty() {
            return Ok(operands.pop().expect("operand"));
        }
        if ops.iter().any(|o| *o != ops[0]) {
            return Err(self.err("mixed parallel operators need parentheses"));
        }
        if ops[0] == "||" {
            return Ok(Term::par_all(operands).expect("operands"));
        }
        let mut it = operands.into_iter();
        let mut acc = it.next().expect("operand");
        for r in it {
            acc = if ops[0] == "|" { Term::comm(acc, r) } else { Term::full_par(acc, r) };
        }
        Ok(acc)
    }

    fn seq(&mut self) -> PResult<Term> {
        let mut ops = vec![self.unary()?];
        while self.eat_sym(".") {
            ops.push(self.unary()?);
        }
        Ok(Term::seq_all(ops).expect("operands"))
    }

    fn label_set(&mut self) -> PResult<LabelSet> {
        self.expect_sym("{")?;
        let mut set = BTreeSet::new();
        if !self.is_sym("}") {
            loop {
                let name = self.ident()?;
                if self.is_sym("(") {
                    let args = self.data_args()?;
                    let a = Action::with_args(&name, &args);
                    self.check_event(&a)?;
                    set.insert(a);
                } else {
                    let sig = &self.spec.signature;
                    let family: Vec<Action> = sig.events.iter().filter(|a| *a.name == *name).cloned().collect();
                    if family.is_empty() {
                        let a = Action::new(&name);
                        self.check_event(&a)?;
                        set.insert(a);
                    } else {
                        set.extend(family);
                    }
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        Ok(Arc::new(set))
    }

    fn parenthesized(&mut self) -> PResult<Term> {
        self.expect_sym("(")?;
        let t = self.alt()?;
        self.expect_sym(")")?;
        Ok(t)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat_sym("(") {
            let t = self.alt()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if self.eat_sym("<") {
            let var = self.ident()?;
            let key = if self.is_sym("(") { var_key(&var, &self.data_args()?) } else { var };
            self.expect_sym("|")?;
            let spec = self.ident()?;
            self.expect_sym(">")?;
            let in_scope = self.scope.as_ref().is_some_and(|s| s.spec == spec);
            if !in_scope {
                self.spec
                    .body(&key, &spec)
                    .map_err(|e| ParseError { line: 0, col: 0, message: e.to_string() })?;
            }
            return Ok(Term::rec_call(&key, &spec));
        }
        let w = match self.peek() {
            Tok::Word(w) => w.clone(),
            _ => return Err(self.err("expected a term")),
        };
        self.pos += 1;
        match w.as_str() {
            "tau" => Ok(Term::tau()),
            "delta" => Ok(Term::delta()),
            "shadow" => {
                self.pos -= 1;
                let t = self.label_template()?;
                let l = self.ground(&t, &[])?;
                Ok(Term::atom(l))
            }
            "theta" => Ok(Term::theta(self.parenthesized()?)),
            "encap" => {
                let h = self.label_set()?;
                Ok(Term::encap(h, self.parenthesized()?))
            }
            "hide" => {
                let i = self.label_set()?;
                Ok(Term::hide(i, self.parenthesized()?))
            }
            "proj" => {
                self.expect_sym("[")?;
                let n = self.number()?;
                self.expect_sym("]")?;
                Ok(Term::project(n, self.parenthesized()?))
            }
            "rho" => {
                self.expect_sym("[")?;
                let f = self.ident()?;
                self.expect_sym("]")?;
                if !self.spec.signature.has_renaming(&f) {
                    return Err(self.err(&format!("unknown renaming '{f}'")));
                }
                Ok(Term::rename(&f, self.parenthesized()?))
            }
            "sum" => {
                let binders = self.binders()?;
                self.expect_sym(":")?;
                let start = self.pos;
                let mut summands = Vec::new();
                let mut end = start;
                for env in assignments(&binders) {
                    self.pos = start;
                    let depth = self.env.len();
                    self.env.extend(env);
                    let body = self.alt();
                    self.env.truncate(depth);
                    summands.push(body?);
                    end = self.pos;
                }
                self.pos = end;
                Ok(Term::alt_all(summands))
            }
            _ if KEYWORDS.contains(&w.as_str()) => {
                self.pos -= 1;
                Err(self.err(&format!("unexpected keyword '{w}'")))
            }
            _ => self.name_term(w),
        }
    }

    /// A bare identifier: recursion variable, named process, or event.
    fn name_term(&mut self, w: String) -> PResult<Term> {
        if let Some(scope) = &self.scope {
            if let Some(&arity) = scope.heads.get(&w) {
                let spec = scope.spec.clone();
                let args = if self.is_sym("(") { self.data_args()? } else { vec![] };
                if args.len() != arity {
                    return Err(self.err(&format!("variable {w} expects {arity} arguments")));
                }
                return Ok(Term::rec_call(&var_key(&w, &args), &spec));
            }
        }
        if let Some(t) = self.spec.procs.get(&w) {
            return Ok(t.clone());
        }
        let args = if self.is_sym("(") { self.data_args()? } else { vec![] };
        let a = Action::with_args(&w, &args);
        self.check_event(&a)?;
        Ok(Term::action(a))
    }

    fn check_event(&self, a: &Action) -> PResult<()> {
        let sig = &self.spec.signature;
        if sig.events_declared && !sig.events.contains(a) {
            return Err(self.err(&format!("unknown event '{a}'")));
        }
        Ok(())
    }

    fn data_args(&mut self) -> PResult<Vec<Arc<str>>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        loop {
            let w = self.word()?;
            out.push(self.resolve_data(&w));
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn resolve_data(&self, w: &str) -> Arc<str> {
        self.env.iter().rev().find(|(v, _)| v == w).map(|(_, x)| x.clone()).unwrap_or_else(|| w.into())
    }

    fn label_template(&mut self) -> PResult<LabelTemplate> {
        let w = self.word()?;
        match w.as_str() {
            "tau" => Ok(LabelTemplate::Tau),
            "delta" => Ok(LabelTemplate::Delta),
            "shadow" => {
                self.expect_sym("[")?;
                let inner = self.label_template()?;
                self.expect_sym(",")?;
                let i = self.number()?;
                self.expect_sym("]")?;
                if i == 0 {
                    return Err(self.err("shadow index must be positive"));
                }
                Ok(LabelTemplate::Shadow(Box::new(inner), i))
            }
            _ => {
                let mut args = Vec::new();
                if self.eat_sym("(") {
                    loop {
                        args.push(self.word()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                }
                Ok(LabelTemplate::Act(w, args))
            }
        }
    }

    fn ground(&self, t: &LabelTemplate, env: &[(String, Arc<str>)]) -> PResult<Label> {
        let lookup = |w: &String| -> Arc<str> {
            env.iter()
                .rev()
                .find(|(v, _)| v == w)
                .map(|(_, x)| x.clone())
                .unwrap_or_else(|| self.resolve_data(w))
        };
        match t {
            LabelTemplate::Tau => Ok(Label::Tau),
            LabelTemplate::Delta => Ok(Label::Delta),
            LabelTemplate::Act(name, args) => {
                let vals: Vec<Arc<str>> = args.iter().map(lookup).collect();
                let a = Action::with_args(name, &vals);
                self.check_event(&a)?;
                Ok(Label::Act(a))
            }
            LabelTemplate::Shadow(inner, i) => match self.ground(inner, env)? {
                Label::Act(a) => Ok(Label::Shadow(a, *i)),
                _ => Err(self.err("a shadow stands for a visible event")),
            },
        }
    }
}

/// The key of a ground recursion variable, e.g. `T(d1,0)`.
pub fn var_key<S: AsRef<str>>(name: &str, args: &[S]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        let a: Vec<&str> = args.iter().map(|s| s.as_ref()).collect();
        format!("{name}({})", a.join(","))
    }
}

fn cartesian(sets: &[Vec<Arc<str>>]) -> Vec<Vec<Arc<str>>> {
    let mut out: Vec<Vec<Arc<str>>> = vec![vec![]];
    for s in sets {
        let mut next = Vec::new();
        for prefix in &out {
            for v in s {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn assignments(binders: &[(String, Vec<Arc<str>>)]) -> Vec<Vec<(String, Arc<str>)>> {
    let sets: Vec<Vec<Arc<str>>> = binders.iter().map(|(_, v)| v.clone()).collect();
    cartesian(&sets)
        .into_iter()
        .map(|vals| binders.iter().map(|(n, _)| n.clone()).zip(vals).collect())
        .collect()
}

/// Parses a closed term over an empty signature; a convenience for tests
/// and examples.
pub fn parse_closed(text: &str) -> Result<Term, ParseError> {
    parse_term(&mut SpecFile::new(Signature::new()), text)
}
