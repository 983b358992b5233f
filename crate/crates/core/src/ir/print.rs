//! Printer for the IR surface syntax. `parse_ir(print_ir(p)) == p`.

use super::{IrFunction, IrProgram, IrTerm, IrType, TermKind};

const WIDTH: usize = 80;

enum Doc {
    Atom(String),
    List(Vec<Doc>),
}

fn atom(s: impl Into<String>) -> Doc {
    Doc::Atom(s.into())
}

fn bar(name: &str) -> Doc {
    Doc::Atom(format!("|{name}|"))
}

impl Doc {
    fn flat(&self, out: &mut String) {
        match self {
            Doc::Atom(s) => out.push_str(s),
            Doc::List(items) => {
                out.push('(');
                for (i, d) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    d.flat(out);
                }
                out.push(')');
            }
        }
    }

    fn flat_len(&self) -> usize {
        match self {
            Doc::Atom(s) => s.len(),
            Doc::List(items) => 1 + items.iter().map(|d| d.flat_len() + 1).sum::<usize>(),
        }
    }

    /// Lays out at column `col`, breaking lists that do not fit.
    fn layout(&self, col: usize, out: &mut String) {
        if col + self.flat_len() <= WIDTH {
            return self.flat(out);
        }
        let Doc::List(items) = self else {
            return self.flat(out);
        };
        // number of items kept on the first line
        let keep = match items.first() {
            Some(Doc::Atom(h)) if h == "defun" || h == "mv-let" => 3,
            Some(Doc::Atom(_)) => 2,
            _ => 1,
        }
        .min(items.len());
        out.push('(');
        let mut c = col + 1;
        for (i, d) in items[..keep].iter().enumerate() {
            if i > 0 {
                out.push(' ');
                c += 1;
            }
            let start = out.len();
            d.layout(c, out);
            c += out.len() - start;
        }
        for d in &items[keep..] {
            out.push('\n');
            out.push_str(&" ".repeat(col + 2));
            d.layout(col + 2, out);
        }
        out.push(')');
    }
}

fn doc_term(t: &IrTerm) -> Doc {
    use TermKind::*;
    match &t.kind {
        Var(n) => bar(n),
        Const { ty, value } => Doc::List(vec![atom(format!("{}-dec-const", ty.abbrev())), atom(value.to_string())]),
        Unary { op, ty, arg } => Doc::List(vec![atom(format!("{}-{}", op.name(), ty.abbrev())), doc_term(arg)]),
        Binary {
            op,
            left_ty,
            right_ty,
            left,
            right,
        } => Doc::List(vec![
            atom(format!("{}-{}-{}", op.name(), left_ty.abbrev(), right_ty.abbrev())),
            doc_term(left),
            doc_term(right),
        ]),
        Convert { from, to, arg } => {
            Doc::List(vec![atom(format!("{}-from-{}", to.abbrev(), from.abbrev())), doc_term(arg)])
        }
        BoolFrom { ty, arg } => Doc::List(vec![atom(format!("boolean-from-{}", ty.abbrev())), doc_term(arg)]),
        IntFromBool { ty, arg } => Doc::List(vec![atom(format!("{}-from-boolean", ty.abbrev())), doc_term(arg)]),
        LetDeclar { var, rhs, body } => let_doc(var, Some("declar"), rhs, body),
        LetAssign { var, rhs, body } => let_doc(var, Some("assign"), rhs, body),
        LetStmt { vars, rhs, body } if vars.len() == 1 => let_doc(&vars[0], None, rhs, body),
        LetStmt { vars, rhs, body } => Doc::List(vec![
            atom("mv-let"),
            Doc::List(vars.iter().map(|v| bar(v)).collect()),
            doc_term(rhs),
            doc_term(body),
        ]),
        If { test, then, els } => Doc::List(vec![atom("if"), doc_term(test), doc_term(then), doc_term(els)]),
        And(a, b) => Doc::List(vec![atom("and"), doc_term(a), doc_term(b)]),
        Or(a, b) => Doc::List(vec![atom("or"), doc_term(a), doc_term(b)]),
        CondExpr(i) => Doc::List(vec![atom("condexpr"), doc_term(i)]),
        ArrayRead {
            elem,
            index_ty,
            array,
            index,
        } => Doc::List(vec![
            atom(format!("{}-array-read-{}", elem.abbrev(), index_ty.abbrev())),
            bar(array),
            doc_term(index),
        ]),
        ArrayWrite {
            elem,
            index_ty,
            array,
            index,
            value,
        } => Doc::List(vec![
            atom(format!("{}-array-write-{}", elem.abbrev(), index_ty.abbrev())),
            bar(array),
            doc_term(index),
            doc_term(value),
        ]),
        ArrayLength { elem, array } => Doc::List(vec![atom(format!("{}-array-length", elem.abbrev())), bar(array)]),
        Call { func, args } => {
            let mut items = vec![bar(func)];
            items.extend(args.iter().map(doc_term));
            Doc::List(items)
        }
        LoopCall { func, args } => {
            let mut items = vec![bar(func)];
            items.extend(args.iter().map(|a| bar(a)));
            Doc::List(items)
        }
        Mv(items) => {
            let mut v = vec![atom("mv")];
            v.extend(items.iter().map(doc_term));
            Doc::List(v)
        }
        RetVal(e) => Doc::List(vec![atom("retval"), doc_term(e)]),
    }
}

fn let_doc(var: &str, wrapper: Option<&str>, rhs: &IrTerm, body: &IrTerm) -> Doc {
    let rhs = match wrapper {
        Some(w) => Doc::List(vec![atom(w), doc_term(rhs)]),
        None => doc_term(rhs),
    };
    Doc::List(vec![
        atom("let"),
        Doc::List(vec![Doc::List(vec![bar(var), rhs])]),
        doc_term(body),
    ])
}

fn doc_function(f: &IrFunction) -> Doc {
    let mut conj = vec![atom("and")];
    for p in &f.params {
        let pred = match p.ty {
            IrType::Int(t) => format!("{}p", t.abbrev()),
            IrType::Array(t) => format!("{}-arrayp", t.abbrev()),
        };
        conj.push(Doc::List(vec![atom(pred), bar(&p.name)]));
    }
    conj.extend(f.extra_guards.iter().map(doc_term));
    Doc::List(vec![
        atom("defun"),
        bar(&f.name),
        Doc::List(f.params.iter().map(|p| bar(&p.name)).collect()),
        Doc::List(vec![
            atom("declare"),
            Doc::List(vec![atom("xargs"), atom(":guard"), Doc::List(conj)]),
        ]),
        doc_term(&f.body),
    ])
}

/// Single-line rendering of a term, used in messages.
pub fn print_term(t: &IrTerm) -> String {
    let mut s = String::new();
    doc_term(t).flat(&mut s);
    s
}

pub fn print_ir(p: &IrProgram) -> String {
    let mut out = String::new();
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        doc_function(f).layout(0, &mut out);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;

    #[test]
    fn round_trip_loop() {
        let src = r#"
(defun |h$loop| (|n| |r|)
  (declare (xargs :guard (and (uintp |n|) (uintp |r|)
                              (boolean-from-sint (le-uint-uint |n| (uint-dec-const 1000))))))
  (if (boolean-from-sint (ne-uint-uint |n| (uint-dec-const 0)))
      (let* ((|r| (assign (mul-uint-uint |r| |n|)))
             (|n| (assign (sub-uint-uint |n| (uint-dec-const 1)))))
        (|h$loop| |n| |r|))
    (mv |n| |r|)))

(defun |h| (|n|)
  (declare (xargs :guard (uintp |n|)))
  (let ((|r| (declar (uint-dec-const 1))))
    (mv-let (|n| |r|) (|h$loop| |n| |r|)
      (declare (ignore |n|))
      |r|)))
"#;
        let p = parse_ir(src).unwrap();
        let printed = print_ir(&p);
        let q = parse_ir(&printed).unwrap();
        assert_eq!(p, q);
        assert!(printed.lines().all(|l| l.len() <= WIDTH), "{printed}");
    }
}
