//! Event labels: visible actions with ground data arguments, the silent
//! event, deadlock, and shadow constants.

use std::fmt;
use std::sync::Arc;

/// A visible action, possibly carrying ground data constants.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub name: Arc<str>,
    pub args: Arc<[Arc<str>]>,
}

impl Action {
    pub fn new(name: &str) -> Self {
        Action { name: name.into(), args: Arc::from(Vec::new()) }
    }

    pub fn with_args<S: AsRef<str>>(name: &str, args: &[S]) -> Self {
        let args: Vec<Arc<str>> = args.iter().map(|a| Arc::from(a.as_ref())).collect();
        Action { name: name.into(), args: Arc::from(args) }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The kind of an event label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelKind {
    Visible,
    Silent,
    Deadlock,
    Shadow,
}

/// An event label. Shadows carry the visible action they stand in for and a
/// positive index; distinct `(action, index)` pairs are distinct labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Act(Action),
    Tau,
    Delta,
    Shadow(Action, u32),
}

impl Label {
    pub fn act(name: &str) -> Self {
        Label::Act(Action::new(name))
    }

    pub fn kind(&self) -> LabelKind {
        match self {
            Label::Act(_) => LabelKind::Visible,
            Label::Tau => LabelKind::Silent,
            Label::Delta => LabelKind::Deadlock,
            Label::Shadow(..) => LabelKind::Shadow,
        }
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Label::Act(_))
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn is_shadow(&self) -> bool {
        matches!(self, Label::Shadow(..))
    }

    pub fn as_action(&self) -> Option<&Action> {
        match self {
            Label::Act(a) => Some(a),
            _ => None,
        }
    }

    /// The visible action a shadow stands for.
    pub fn shadow_of(&self) -> Option<(&Action, u32)> {
        match self {
            Label::Shadow(a, i) => Some((a, *i)),
            _ => None,
        }
    }
}

impl From<Action> for Label {
    fn from(a: Action) -> Self {
        Label::Act(a)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Act(a) => write!(f, "{a}"),
            Label::Tau => f.write_str("tau"),
            Label::Delta => f.write_str("delta"),
            Label::Shadow(a, i) => write!(f, "shadow[{a},{i}]"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renders a multiset of labels as `l1|l2|...` in sorted order.
pub fn step_string(step: &[Label]) -> String {
    let mut v = step.to_vec();
    v.sort();
    v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("|")
}
