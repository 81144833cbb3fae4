//! Printing terms in the concrete syntax accepted by the parser.

use crate::label::Label;
use crate::term::{Node, Term};

// Binding strength, weakest first.
const ALT: u8 = 0;
const UNLESS: u8 = 1;
const PAR: u8 = 2;
const SEQ: u8 = 3;
const UNARY: u8 = 4;

fn level(t: &Term) -> u8 {
    match t.node() {
        Node::Alt(..) => ALT,
        Node::Unless(..) => UNLESS,
        Node::Par(..) | Node::Comm(..) | Node::FullPar(..) => PAR,
        Node::Seq(..) => SEQ,
        _ => UNARY,
    }
}

/// Prints the term as it is, without reordering operands.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

/// Prints the AC-canonical representative of the term.
pub fn canonical_print(t: &Term) -> String {
    print_term(&t.canonical())
}

fn write_at(t: &Term, min: u8, out: &mut String) {
    if level(t) < min {
        out.push('(');
        write_term(t, out);
        out.push(')');
    } else {
        write_term(t, out);
    }
}

fn write_set(set: &crate::term::LabelSet, out: &mut String) {
    out.push('{');
    for (i, a) in set.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&a.to_string());
    }
    out.push('}');
}

fn write_term(t: &Term, out: &mut String) {
    match t.node() {
        Node::Atom(l) => write_label(l, out),
        Node::Alt(x, y) => {
            write_at(x, UNLESS, out);
            out.push_str(" + ");
            write_at(y, ALT, out);
        }
        Node::Unless(x, y) => {
            write_at(x, UNLESS, out);
            out.push_str(" unless ");
            write_at(y, PAR, out);
        }
        Node::Par(x, y) => {
            write_at(x, SEQ, out);
            out.push_str(" || ");
            // A right-nested `||` chain prints flat; other parallel operators need parentheses.
            if matches!(y.node(), Node::Par(..)) {
                write_term(y, out);
            } else {
                write_at(y, SEQ, out);
            }
        }
        Node::Comm(x, y) => {
            write_at(x, SEQ, out);
            out.push_str(" | ");
            write_at(y, SEQ, out);
        }
        Node::FullPar(x, y) => {
            write_at(x, SEQ, out);
            out.push_str(" <> ");
            write_at(y, SEQ, out);
        }
        Node::Seq(x, y) => {
            write_at(x, UNARY, out);
            out.push_str(" . ");
            write_at(y, SEQ, out);
        }
        Node::Theta(x) => {
            out.push_str("theta(");
            write_term(x, out);
            out.push(')');
        }
        Node::Encap(h, x) => {
            out.push_str("encap");
            write_set(h, out);
            out.push('(');
            write_term(x, out);
            out.push(')');
        }
        Node::Abstract(i, x) => {
            out.push_str("hide");
            write_set(i, out);
            out.push('(');
            write_term(x, out);
            out.push(')');
        }
        Node::Project(n, x) => {
            out.push_str(&format!("proj[{n}]("));
            write_term(x, out);
            out.push(')');
        }
        Node::Rename(f, x) => {
            out.push_str(&format!("rho[{f}]("));
            write_term(x, out);
            out.push(')');
        }
        Node::RecCall(x, e) => out.push_str(&format!("<{x}|{e}>")),
    }
}

fn write_label(l: &Label, out: &mut String) {
    out.push_str(&l.to_string());
}
