//! Text serialization of event structures.
//!
//! ```text
//! event <id> <label>
//! le <id> <id>        strict causality, transitively closed
//! conf <id> <id>      conflict, listed once with the smaller id first
//! term <id>*          a terminating configuration
//! ```

use std::fmt;
use std::str::FromStr;

use aptc_term::{Action, Label};

use crate::pes::{bit, members, EventSet, Pes, PesError};

impl fmt::Display for Pes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in 0..self.len() {
            writeln!(f, "event {e} {}", self.label(e))?;
        }
        for b in 0..self.len() {
            for a in members(self.causes(b)) {
                writeln!(f, "le {a} {b}")?;
            }
        }
        for a in 0..self.len() {
            for b in members(self.conflicts(a)).filter(|&b| b > a) {
                writeln!(f, "conf {a} {b}")?;
            }
        }
        for t in self.terminal() {
            let ids: Vec<String> = members(*t).map(|e| e.to_string()).collect();
            if ids.is_empty() {
                writeln!(f, "term")?;
            } else {
                writeln!(f, "term {}", ids.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Parses a label as printed: `tau`, `delta`, `shadow[a(x),1]`, `a(x,y)`.
pub fn parse_label(s: &str) -> Option<Label> {
    let s = s.trim();
    match s {
        "tau" => return Some(Label::Tau),
        "delta" => return Some(Label::Delta),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix("shadow[").and_then(|r| r.strip_suffix(']')) {
        let (act, idx) = inner.rsplit_once(',')?;
        let Label::Act(a) = parse_label(act)? else { return None };
        return Some(Label::Shadow(a, idx.trim().parse().ok()?));
    }
    let (name, args) = match s.split_once('(') {
        None => (s, vec![]),
        Some((n, rest)) => (n, rest.strip_suffix(')')?.split(',').map(str::trim).collect()),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        return None;
    }
    Some(Label::Act(Action::with_args(name, &args)))
}

/// Parses the text format produced by `Display`.
pub fn parse_pes(text: &str) -> Result<Pes, PesError> {
    let mut labels = Vec::new();
    let mut causes: Vec<EventSet> = Vec::new();
    let mut conflicts = Vec::new();
    let mut terminal = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |m: &str| PesError::Syntax { line, message: m.to_string() };
        let mut words = raw.split_whitespace();
        let Some(kw) = words.next() else { continue };
        let ids = |ws: std::str::SplitWhitespace| -> Result<Vec<usize>, PesError> {
            ws.map(|w| usize::from_str(w).map_err(|_| err("bad event id"))).collect()
        };
        match kw {
            "event" => {
                let id: usize = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| err("bad event id"))?;
                if id != labels.len() {
                    return Err(err("events must be numbered consecutively from 0"));
                }
                let rest: Vec<&str> = words.collect();
                labels.push(parse_label(&rest.join(" ")).ok_or_else(|| err("bad label"))?);
                causes.push(0);
            }
            "le" | "conf" => {
                let v = ids(words)?;
                if v.len() != 2 || v.iter().any(|&e| e >= labels.len()) {
                    return Err(err("expected two declared event ids"));
                }
                if kw == "le" {
                    causes[v[1]] |= bit(v[0]);
                } else {
                    conflicts.push((v[0], v[1]));
                }
            }
            "term" => {
                let v = ids(words)?;
                if v.iter().any(|&e| e >= labels.len()) {
                    return Err(err("undeclared event"));
                }
                terminal.push(v.iter().fold(0, |acc, &e| acc | bit(e)));
            }
            _ => return Err(err("unknown keyword")),
        }
    }
    Pes::from_parts(labels, causes, &conflicts, terminal)
}
