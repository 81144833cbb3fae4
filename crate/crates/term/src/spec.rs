//! Recursive specifications and whole specification files.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::signature::Signature;
use crate::term::Term;

/// A named set of recursion equations. Right-hand sides refer to variables
/// through `RecCall` nodes.
#[derive(Clone, Debug)]
pub struct RecSpec {
    pub name: Arc<str>,
    pub equations: BTreeMap<Arc<str>, Term>,
}

impl RecSpec {
    pub fn new(name: &str) -> Self {
        RecSpec { name: name.into(), equations: BTreeMap::new() }
    }

    pub fn with_equation(mut self, var: &str, rhs: Term) -> Self {
        self.equations.insert(var.into(), rhs);
        self
    }

    pub fn call(&self, var: &str) -> Term {
        Term::rec_call(var, &self.name)
    }
}

/// A parsed, fully data-expanded specification.
#[derive(Clone, Debug, Default)]
pub struct SpecFile {
    pub signature: Signature,
    pub recspecs: BTreeMap<Arc<str>, RecSpec>,
    pub procs: BTreeMap<String, Term>,
}

/// A recursion call that does not resolve.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unresolved recursion variable <{var}|{spec}>")]
pub struct UnresolvedCall {
    pub var: String,
    pub spec: String,
}

impl SpecFile {
    pub fn new(signature: Signature) -> Self {
        SpecFile { signature, ..Default::default() }
    }

    pub fn add_recspec(&mut self, spec: RecSpec) {
        self.recspecs.insert(spec.name.clone(), spec);
    }

    /// The right-hand side of variable `x` in spec `e`.
    pub fn body(&self, x: &str, e: &str) -> Result<&Term, UnresolvedCall> {
        self.recspecs
            .get(e)
            .and_then(|s| s.equations.get(x))
            .ok_or_else(|| UnresolvedCall { var: x.to_string(), spec: e.to_string() })
    }

    /// Checks that every call reachable from `t` resolves.
    pub fn check_closed(&self, t: &Term) -> Result<(), UnresolvedCall> {
        let mut todo: Vec<(Arc<str>, Arc<str>)> = t.rec_calls().into_iter().collect();
        let mut seen = std::collections::BTreeSet::new();
        while let Some((x, e)) = todo.pop() {
            if !seen.insert((x.clone(), e.clone())) {
                continue;
            }
            let body = self.body(&x, &e)?;
            todo.extend(body.rec_calls());
        }
        Ok(())
    }
}
