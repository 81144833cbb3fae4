//! Termination evidence for the rewrite rules: a recursive path ordering
//! with precedence and argument status.
//!
//! `·` and the projections compare arguments lexicographically left to
//! right, `◁` right to left, and `+`, `∥`, `|` as multisets (`∥` and `|`
//! share a precedence class). RP6 and RC14 put `≬` under `·` on their
//! right-hand side, and RP1 needs `≬` above `∥` and `|`; no precedence
//! orients both, so those two rules are checked composed with RP1, which
//! is how the normalizer applies them.

use std::collections::HashMap;
use std::fmt;

/// A rule pattern: variables are `x`, `y`, `z`; every other name is a
/// function symbol (a constant when it has no arguments).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pat {
    Var(String),
    Fun(String, Vec<Pat>),
}

impl Pat {
    /// Parses `f(a, g(x))` notation.
    pub fn parse(s: &str) -> Pat {
        let toks: Vec<String> = tokenize(s);
        let mut pos = 0;
        let p = parse_at(&toks, &mut pos);
        assert_eq!(pos, toks.len(), "trailing input in pattern {s}");
        p
    }

    fn contains_var(&self, v: &str) -> bool {
        match self {
            Pat::Var(w) => w == v,
            Pat::Fun(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() || c == '_' {
            cur.push(c);
        } else {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_at(toks: &[String], pos: &mut usize) -> Pat {
    let name = toks[*pos].clone();
    *pos += 1;
    if toks.get(*pos).map(String::as_str) == Some("(") {
        *pos += 1;
        let mut args = vec![parse_at(toks, pos)];
        while toks[*pos] == "," {
            *pos += 1;
            args.push(parse_at(toks, pos));
        }
        assert_eq!(toks[*pos], ")");
        *pos += 1;
        Pat::Fun(name, args)
    } else if matches!(name.as_str(), "x" | "y" | "z") {
        Pat::Var(name)
    } else {
        Pat::Fun(name, vec![])
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pat::Var(v) => f.write_str(v),
            Pat::Fun(n, args) if args.is_empty() => f.write_str(n),
            Pat::Fun(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Lex,
    RevLex,
    Multiset,
}

/// A path ordering given by a precedence (higher is bigger; unknown
/// symbols are constants of precedence 0) and per-symbol status.
#[derive(Clone, Debug)]
pub struct PathOrdering {
    prec: HashMap<String, u32>,
    status: HashMap<String, Status>,
}

impl PathOrdering {
    /// `π_{n+1} > π_n > Θ > ◁ > ∂ > τ_I > ρ > ≬ > {∥, |} > · > + > constants`.
    pub fn standard() -> Self {
        let prec = [
            ("pi1", 100),
            ("pi", 95),
            ("theta", 90),
            ("unless", 85),
            ("encap", 80),
            ("hide", 78),
            ("rho", 76),
            ("merge", 70),
            ("par", 60),
            ("comm", 60),
            ("seq", 50),
            ("alt", 40),
        ];
        let status = [
            ("seq", Status::Lex),
            ("unless", Status::RevLex),
            ("par", Status::Multiset),
            ("comm", Status::Multiset),
            ("alt", Status::Multiset),
        ];
        PathOrdering {
            prec: prec.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            status: status.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn prec(&self, f: &str) -> u32 {
        self.prec.get(f).copied().unwrap_or(0)
    }

    fn status(&self, f: &str) -> Status {
        self.status.get(f).copied().unwrap_or(Status::Lex)
    }

    /// `s > t`.
    pub fn gt(&self, s: &Pat, t: &Pat) -> bool {
        match (s, t) {
            (Pat::Var(_), _) => false,
            (Pat::Fun(..), Pat::Var(v)) => s.contains_var(v),
            (Pat::Fun(f, ss), Pat::Fun(g, ts)) => {
                if ss.iter().any(|si| si == t || self.gt(si, t)) {
                    return true;
                }
                let (pf, pg) = (self.prec(f), self.prec(g));
                let all_below = || ts.iter().all(|tj| self.gt(s, tj));
                if pf > pg {
                    return all_below();
                }
                if pf == pg && pf > 0 && (f == g || self.status(f) == self.status(g)) {
                    let args_gt = match self.status(f) {
                        Status::Lex => self.lex_gt(ss.iter(), ts.iter()),
                        Status::RevLex => self.lex_gt(ss.iter().rev(), ts.iter().rev()),
                        Status::Multiset => self.mul_gt(ss, ts),
                    };
                    return args_gt && all_below();
                }
                false
            }
        }
    }

    fn lex_gt<'a>(&self, mut ss: impl Iterator<Item = &'a Pat>, mut ts: impl Iterator<Item = &'a Pat>) -> bool {
        loop {
            match (ss.next(), ts.next()) {
                (Some(a), Some(b)) if a == b => continue,
                (Some(a), Some(b)) => return self.gt(a, b),
                (Some(_), None) => return true,
                _ => return false,
            }
        }
    }

    fn mul_gt(&self, ss: &[Pat], ts: &[Pat]) -> bool {
        let mut m: Vec<&Pat> = ss.iter().collect();
        let mut n: Vec<&Pat> = Vec::new();
        for t in ts {
            if let Some(i) = m.iter().position(|s| *s == t) {
                m.remove(i);
            } else {
                n.push(t);
            }
        }
        !m.is_empty() && n.iter().all(|t| m.iter().any(|s| self.gt(s, t)))
    }
}

/// An oriented rule `lhs → rhs`.
#[derive(Clone, Debug)]
pub struct OrientedRule {
    pub name: &'static str,
    pub lhs: Pat,
    pub rhs: Pat,
    /// The rule the right-hand side is composed with, if any.
    pub composed_with: Option<&'static str>,
}

/// Orientation verdict for one rule.
#[derive(Clone, Debug)]
pub struct LpoResult {
    pub rule: OrientedRule,
    pub oriented: bool,
}

/// Checks `lhs > rhs` in the standard ordering.
pub fn lpo_check(lhs: &Pat, rhs: &Pat) -> bool {
    PathOrdering::standard().gt(lhs, rhs)
}

const RULES: &[(&str, &str, &str)] = &[
    ("RA3", "alt(x,x)", "x"),
    ("RA4", "seq(alt(x,y),z)", "alt(seq(x,z),seq(y,z))"),
    ("RA5", "seq(seq(x,y),z)", "seq(x,seq(y,z))"),
    ("RA6", "alt(x,delta)", "x"),
    ("RA7", "seq(delta,x)", "delta"),
    ("RP1", "merge(x,y)", "alt(par(x,y),comm(x,y))"),
    ("RP4", "par(e1,seq(e2,y))", "seq(par(e1,e2),y)"),
    ("RP5", "par(seq(e1,x),e2)", "seq(par(e1,e2),x)"),
    ("RP7", "par(alt(x,y),z)", "alt(par(x,z),par(y,z))"),
    ("RP8", "par(x,alt(y,z))", "alt(par(x,y),par(x,z))"),
    ("RP9", "par(delta,x)", "delta"),
    ("RP10", "par(x,delta)", "delta"),
    ("RC11", "comm(e1,e2)", "g12"),
    ("RC12", "comm(e1,seq(e2,y))", "seq(g12,y)"),
    ("RC13", "comm(seq(e1,x),e2)", "seq(g12,x)"),
    ("RC15", "comm(alt(x,y),z)", "alt(comm(x,z),comm(y,z))"),
    ("RC16", "comm(x,alt(y,z))", "alt(comm(x,y),comm(x,z))"),
    ("RC17", "comm(delta,x)", "delta"),
    ("RC18", "comm(x,delta)", "delta"),
    ("RCE19", "theta(e)", "e"),
    ("RCE20", "theta(delta)", "delta"),
    ("RCE21", "theta(alt(x,y))", "alt(unless(theta(x),y),unless(theta(y),x))"),
    ("RCE22", "theta(seq(x,y))", "seq(theta(x),theta(y))"),
    ("RCE23", "theta(par(x,y))", "alt(par(unless(theta(x),y),y),par(unless(theta(y),x),x))"),
    ("RCE24", "theta(comm(x,y))", "alt(comm(unless(theta(x),y),y),comm(unless(theta(y),x),x))"),
    ("RU25", "unless(e1,e2)", "tau"),
    ("RU26", "unless(e1,e3)", "e1"),
    ("RU27", "unless(e3,e1)", "tau"),
    ("RU28", "unless(e,delta)", "e"),
    ("RU29", "unless(delta,e)", "delta"),
    ("RU30", "unless(alt(x,y),z)", "alt(unless(x,z),unless(y,z))"),
    ("RU31", "unless(seq(x,y),z)", "seq(unless(x,z),unless(y,z))"),
    ("RU32", "unless(par(x,y),z)", "par(unless(x,z),unless(y,z))"),
    ("RU33", "unless(comm(x,y),z)", "comm(unless(x,z),unless(y,z))"),
    ("RU34", "unless(x,alt(y,z))", "unless(unless(x,y),z)"),
    ("RU35", "unless(x,seq(y,z))", "unless(unless(x,y),z)"),
    ("RU36", "unless(x,par(y,z))", "unless(unless(x,y),z)"),
    ("RU37", "unless(x,comm(y,z))", "unless(unless(x,y),z)"),
    ("RD1", "encap(e)", "e"),
    ("RD2", "encap(e)", "delta"),
    ("RD3", "encap(delta)", "delta"),
    ("RD4", "encap(alt(x,y))", "alt(encap(x),encap(y))"),
    ("RD5", "encap(seq(x,y))", "seq(encap(x),encap(y))"),
    ("RD6", "encap(par(x,y))", "par(encap(x),encap(y))"),
    ("TI1", "hide(e)", "e"),
    ("TI2", "hide(e)", "tau"),
    ("TI3", "hide(delta)", "delta"),
    ("TI4", "hide(alt(x,y))", "alt(hide(x),hide(y))"),
    ("TI5", "hide(seq(x,y))", "seq(hide(x),hide(y))"),
    ("TI6", "hide(par(x,y))", "par(hide(x),hide(y))"),
    ("PR1", "pi(alt(x,y))", "alt(pi(x),pi(y))"),
    ("PR2", "pi(par(x,y))", "par(pi(x),pi(y))"),
    ("PR3", "pi1(e)", "e"),
    ("PR4", "pi1(seq(e,x))", "seq(e,pi(x))"),
    ("PR5", "pi(x)", "delta"),
    ("PR6", "pi(delta)", "delta"),
    ("RN1", "rho(e)", "fe"),
    ("RN2", "rho(delta)", "delta"),
    ("RN3", "rho(alt(x,y))", "alt(rho(x),rho(y))"),
    ("RN4", "rho(seq(x,y))", "seq(rho(x),rho(y))"),
    ("RN5", "rho(par(x,y))", "par(rho(x),rho(y))"),
    ("B1", "seq(e,tau)", "e"),
    ("B2", "seq(e,alt(seq(tau,alt(x,y)),x))", "seq(e,alt(x,y))"),
    ("B3", "par(x,tau)", "x"),
    ("SC1", "alt(x,shadow)", "x"),
    ("SC2", "seq(shadow,x)", "x"),
    ("SC3", "seq(x,shadow)", "x"),
    ("SC4", "par(shadow,e)", "e"),
];

/// RP6 and RC14 as written, with `≬` on the right-hand side.
pub const RAW_MERGE_RULES: &[(&str, &str, &str)] = &[
    ("RP6", "par(seq(e1,x),seq(e2,y))", "seq(par(e1,e2),merge(x,y))"),
    ("RC14", "comm(seq(e1,x),seq(e2,y))", "seq(g12,merge(x,y))"),
];

const COMPOSED: &[(&str, &str, &str)] = &[
    ("RP6", "par(seq(e1,x),seq(e2,y))", "seq(par(e1,e2),alt(par(x,y),comm(x,y)))"),
    ("RC14", "comm(seq(e1,x),seq(e2,y))", "seq(g12,alt(par(x,y),comm(x,y)))"),
];

/// Every oriented rule the normalizer applies.
pub fn rule_table() -> Vec<OrientedRule> {
    let plain = RULES.iter().map(|(n, l, r)| OrientedRule {
        name: n,
        lhs: Pat::parse(l),
        rhs: Pat::parse(r),
        composed_with: None,
    });
    let composed = COMPOSED.iter().map(|(n, l, r)| OrientedRule {
        name: n,
        lhs: Pat::parse(l),
        rhs: Pat::parse(r),
        composed_with: Some("RP1"),
    });
    plain.chain(composed).collect()
}

/// Checks every rule of [`rule_table`].
pub fn check_all_rules() -> Vec<LpoResult> {
    let ord = PathOrdering::standard();
    rule_table()
        .into_iter()
        .map(|rule| {
            let oriented = ord.gt(&rule.lhs, &rule.rhs);
            LpoResult { rule, oriented }
        })
        .collect()
}
