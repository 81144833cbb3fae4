//! Top-down expansion of the conflict elimination operator over a term
//! built from atoms, `+`, `·`, `∥` and `|`.

use aptc_rewrite::canonical_order;
use aptc_term::{Node, Term};

/// `Θ(u)` rewritten by CE19 to CE24 into a `Θ`-free term. Flattened `+` and
/// `∥` trees are split at their least operand, as the rewriter does.
pub(crate) fn expand(u: &Term) -> Term {
    match u.node() {
        Node::Atom(_) => u.clone(),
        Node::Seq(a, b) => Term::seq(expand(a), expand(b)),
        Node::Alt(..) => {
            let ops = canonical_order(u.alt_operands());
            let (a, b) = (ops[0].clone(), Term::alt_all(ops[1..].to_vec()));
            Term::alt(Term::unless(expand(&a), b.clone()), Term::unless(expand(&b), a))
        }
        Node::Par(..) => {
            let ops = canonical_order(u.par_operands());
            let (a, b) = (ops[0].clone(), Term::par_all(ops[1..].to_vec()).expect("two operands"));
            Term::alt(
                Term::par(Term::unless(expand(&a), b.clone()), b.clone()),
                Term::par(Term::unless(expand(&b), a.clone()), a),
            )
        }
        Node::Comm(a, b) => Term::alt(
            Term::comm(Term::unless(expand(a), b.clone()), b.clone()),
            Term::comm(Term::unless(expand(b), a.clone()), a.clone()),
        ),
        _ => unreachable!("prepared theta argument"),
    }
}
