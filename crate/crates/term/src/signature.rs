//! Signatures: the event alphabet, communication function, conflict
//! relation, renamings, and finite data domains.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::label::{Action, Label};

/// A violated signature invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignatureViolation {
    GammaOnNonVisible { left: Label, right: Label },
    GammaResultNotVisible { left: Label, right: Label, result: Label },
    GammaAsymmetric { left: Label, right: Label, forward: Label, backward: Label },
    ConflictIrreflexivity { label: Label },
    ConflictOnNonVisible { left: Label, right: Label },
    RenamingMovesTau { renaming: String, image: Label },
    RenamingMovesDelta { renaming: String, image: Label },
}

impl fmt::Display for SignatureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureViolation::GammaOnNonVisible { left, right } => {
                write!(f, "gamma must be undefined on tau, delta and shadows: gamma({left},{right})")
            }
            SignatureViolation::GammaResultNotVisible { left, right, result } => {
                write!(f, "gamma result must be a visible event: gamma({left},{right}) = {result}")
            }
            SignatureViolation::GammaAsymmetric { left, right, forward, backward } => write!(
                f,
                "symmetry violated: gamma({left},{right}) = {forward} but gamma({right},{left}) = {backward}"
            ),
            SignatureViolation::ConflictIrreflexivity { label } => {
                write!(f, "irreflexivity violated: {label} # {label}")
            }
            SignatureViolation::ConflictOnNonVisible { left, right } => {
                write!(f, "conflicts relate visible events only: {left} # {right}")
            }
            SignatureViolation::RenamingMovesTau { renaming, image } => {
                write!(f, "renaming {renaming} must fix tau but maps it to {image}")
            }
            SignatureViolation::RenamingMovesDelta { renaming, image } => {
                write!(f, "renaming {renaming} must fix delta but maps it to {image}")
            }
        }
    }
}

/// The signature of a specification.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    /// Named finite data domains.
    pub domains: BTreeMap<String, Vec<Arc<str>>>,
    /// Ground visible events; meaningful only when `events_declared`.
    pub events: BTreeSet<Action>,
    pub events_declared: bool,
    gamma_decls: Vec<(Label, Label, Label)>,
    gamma: HashMap<(Action, Action), Action>,
    conflict_decls: Vec<(Label, Label)>,
    conflicts: HashSet<(Label, Label)>,
    renamings: BTreeMap<String, BTreeMap<Label, Label>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `gamma(a, b) = c`; the symmetric entry is implied.
    pub fn add_gamma(&mut self, a: Label, b: Label, c: Label) {
        if let (Label::Act(x), Label::Act(y), Label::Act(z)) = (&a, &b, &c) {
            self.gamma.entry((x.clone(), y.clone())).or_insert_with(|| z.clone());
            self.gamma.entry((y.clone(), x.clone())).or_insert_with(|| z.clone());
        }
        self.gamma_decls.push((a, b, c));
    }

    /// The communication result of two labels, if defined.
    pub fn gamma(&self, a: &Label, b: &Label) -> Option<Label> {
        match (a, b) {
            (Label::Act(x), Label::Act(y)) => {
                self.gamma.get(&(x.clone(), y.clone())).cloned().map(Label::Act)
            }
            _ => None,
        }
    }

    /// Declared communications as written.
    pub fn gamma_entries(&self) -> &[(Label, Label, Label)] {
        &self.gamma_decls
    }

    pub fn add_conflict(&mut self, a: Label, b: Label) {
        self.conflicts.insert((a.clone(), b.clone()));
        self.conflicts.insert((b.clone(), a.clone()));
        self.conflict_decls.push((a, b));
    }

    pub fn in_conflict(&self, a: &Label, b: &Label) -> bool {
        self.conflicts.contains(&(a.clone(), b.clone()))
    }

    pub fn conflict_entries(&self) -> &[(Label, Label)] {
        &self.conflict_decls
    }

    pub fn add_renaming(&mut self, name: &str, map: BTreeMap<Label, Label>) {
        self.renamings.insert(name.to_string(), map);
    }

    pub fn has_renaming(&self, name: &str) -> bool {
        self.renamings.contains_key(name)
    }

    /// Applies a renaming; labels outside its explicit mapping are fixed.
    pub fn apply_renaming(&self, name: &str, l: &Label) -> Option<Label> {
        let map = self.renamings.get(name)?;
        Some(map.get(l).cloned().unwrap_or_else(|| l.clone()))
    }

    pub fn renamings(&self) -> &BTreeMap<String, BTreeMap<Label, Label>> {
        &self.renamings
    }

    /// Checks every signature invariant and reports all violations.
    pub fn validate(&self) -> Result<(), Vec<SignatureViolation>> {
        let mut errs = Vec::new();
        let mut seen: HashMap<(Label, Label), Label> = HashMap::new();
        for (a, b, c) in &self.gamma_decls {
            if !a.is_visible() || !b.is_visible() {
                errs.push(SignatureViolation::GammaOnNonVisible { left: a.clone(), right: b.clone() });
                continue;
            }
            if !c.is_visible() {
                errs.push(SignatureViolation::GammaResultNotVisible {
                    left: a.clone(),
                    right: b.clone(),
                    result: c.clone(),
                });
            }
            let forward = (a.clone(), b.clone());
            match seen.get(&forward) {
                Some(prev) if prev != c => errs.push(SignatureViolation::GammaAsymmetric {
                    left: b.clone(),
                    right: a.clone(),
                    forward: prev.clone(),
                    backward: c.clone(),
                }),
                Some(_) => {}
                None => {
                    seen.insert(forward, c.clone());
                    seen.insert((b.clone(), a.clone()), c.clone());
                }
            }
        }
        for (a, b) in &self.conflict_decls {
            if a == b {
                errs.push(SignatureViolation::ConflictIrreflexivity { label: a.clone() });
            } else if !a.is_visible() || !b.is_visible() {
                errs.push(SignatureViolation::ConflictOnNonVisible { left: a.clone(), right: b.clone() });
            }
        }
        for (name, map) in &self.renamings {
            if let Some(img) = map.get(&Label::Tau) {
                if *img != Label::Tau {
                    errs.push(SignatureViolation::RenamingMovesTau { renaming: name.clone(), image: img.clone() });
                }
            }
            if let Some(img) = map.get(&Label::Delta) {
                if *img != Label::Delta {
                    errs.push(SignatureViolation::RenamingMovesDelta { renaming: name.clone(), image: img.clone() });
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// Free-function form of [`Signature::validate`].
pub fn validate_signature(sig: &Signature) -> Result<(), Vec<SignatureViolation>> {
    sig.validate()
}
