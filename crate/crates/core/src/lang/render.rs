use alloc::string::String;

use super::{Expr, ProcDecl, Stmt};

const INDENT: &str = "  ";

/// Canonical text of a declaration: LF newlines, two-space indentation, all
/// comments on their own lines between the header and `begin`.
pub fn render(decl: &ProcDecl) -> String {
    let mut out = String::new();
    out.push_str("procedure ");
    out.push_str(&decl.name);
    out.push_str(" (");
    out.push_str(&decl.param);
    out.push_str(": string);\n");
    for c in &decl.comments {
        out.push('{');
        out.push_str(c);
        out.push_str("}\n");
    }
    match &decl.body {
        Stmt::Seq(items) if items.is_empty() => out.push_str("begin\nend"),
        Stmt::Seq(items) => block(items, 0, &mut out),
        other => block(core::slice::from_ref(other), 0, &mut out),
    }
    out.push('\n');
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str(INDENT);
    }
}

fn block(items: &[Stmt], level: usize, out: &mut String) {
    out.push_str("begin\n");
    for (i, s) in items.iter().enumerate() {
        indent(level + 1, out);
        stmt(s, level + 1, out);
        if i + 1 < items.len() {
            out.push(';');
        }
        out.push('\n');
    }
    indent(level, out);
    out.push_str("end");
}

/// An `if` without `else` at the tail would capture a following `else`.
fn ends_open(s: &Stmt) -> bool {
    match s {
        Stmt::If {
            otherwise: None, ..
        } => true,
        Stmt::If {
            otherwise: Some(e), ..
        } => ends_open(e),
        _ => false,
    }
}

fn stmt(s: &Stmt, level: usize, out: &mut String) {
    match s {
        Stmt::Seq(items) => block(items, level, out),
        Stmt::Skip => {}
        Stmt::Print(e) => {
            out.push_str("print (");
            expr(e, out);
            out.push(')');
        }
        Stmt::Call { callee, arg } => {
            out.push_str(callee);
            out.push_str(" (");
            expr(arg, out);
            out.push(')');
        }
        Stmt::If {
            lhs,
            rhs,
            then,
            otherwise,
        } => {
            out.push_str("if ");
            expr(lhs, out);
            out.push_str(" = ");
            expr(rhs, out);
            out.push_str(" then");
            if otherwise.is_some() && ends_open(then) {
                out.push(' ');
                block(core::slice::from_ref(then), level, out);
            } else if **then != Stmt::Skip {
                out.push(' ');
                stmt(then, level, out);
            }
            if let Some(e) = otherwise {
                out.push('\n');
                indent(level, out);
                out.push_str("else");
                if **e != Stmt::Skip {
                    out.push(' ');
                    stmt(e, level, out);
                }
            }
        }
    }
}

fn expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Lit(s) => {
            out.push('\'');
            out.push_str(&s.replace('\'', "''"));
            out.push('\'');
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Concat(l, r) => {
            expr(l, out);
            out.push_str(" + ");
            if matches!(**r, Expr::Concat(..)) {
                out.push('(');
                expr(r, out);
                out.push(')');
            } else {
                expr(r, out);
            }
        }
        Expr::FnCall { callee, args } => {
            out.push_str(callee);
            out.push_str(" (");
            expr(&args.0, out);
            out.push_str(", ");
            expr(&args.1, out);
            out.push(')');
        }
    }
}
