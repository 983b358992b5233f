use std::fmt::Write;

use super::{precedence, COND_PREC, LOGAND_PREC, LOGOR_PREC, UNARY_PREC};
use crate::ast::{Block, CType, Expr, FunDef, Stmt, TransUnit};
use crate::values::{CIntType, Rank, Signedness, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrettyOptions {
    pub indent: usize,
}

impl Default for PrettyOptions {
    fn default() -> Self {
        PrettyOptions { indent: 4 }
    }
}

pub fn print_transunit(tu: &TransUnit) -> String {
    print_transunit_with(tu, PrettyOptions::default())
}

pub fn print_transunit_with(tu: &TransUnit, opts: PrettyOptions) -> String {
    let mut p = Printer {
        out: String::new(),
        opts,
    };
    for (i, f) in tu.fundefs.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.fundef(f);
    }
    if p.out.is_empty() {
        p.out.push('\n');
    }
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn const_suffix(ty: CIntType) -> &'static str {
    match (ty.signedness, ty.rank) {
        (Signedness::Signed, Rank::Long) => "L",
        (Signedness::Unsigned, Rank::Long) => "UL",
        (Signedness::Signed, Rank::LLong) => "LL",
        (Signedness::Unsigned, Rank::LLong) => "ULL",
        (Signedness::Unsigned, _) => "U",
        (Signedness::Signed, _) => "",
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let (prec, _) = precedence(e);
    if prec < min_prec {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Const { value, ty } => {
            let _ = write!(out, "{value}{}", const_suffix(*ty));
        }
        Expr::Var(x) => out.push_str(x.as_str()),
        Expr::Unary(op, a) => {
            out.push_str(op.symbol());
            let mut operand = String::new();
            write_expr(&mut operand, a, UNARY_PREC);
            // `- -x` would lex as a decrement
            let fuses = matches!(op, UnaryOp::Minus | UnaryOp::Plus)
                && operand.starts_with(op.symbol());
            if fuses {
                out.push('(');
                out.push_str(&operand);
                out.push(')');
            } else {
                out.push_str(&operand);
            }
        }
        Expr::Cast(ty, a) => {
            let _ = write!(out, "({}) ", ty.c_name());
            write_expr(out, a, UNARY_PREC);
        }
        Expr::Binary(op, a, b) => {
            write_expr(out, a, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, prec + 1);
        }
        Expr::LogAnd(a, b) => {
            write_expr(out, a, LOGAND_PREC);
            out.push_str(" && ");
            write_expr(out, b, LOGAND_PREC + 1);
        }
        Expr::LogOr(a, b) => {
            write_expr(out, a, LOGOR_PREC);
            out.push_str(" || ");
            write_expr(out, b, LOGOR_PREC + 1);
        }
        Expr::Cond(t, a, b) => {
            write_expr(out, t, COND_PREC + 1);
            out.push_str(" ? ");
            write_expr(out, a, 0);
            out.push_str(" : ");
            write_expr(out, b, COND_PREC);
        }
        Expr::Index(arr, i) => {
            out.push_str(arr.as_str());
            out.push('[');
            write_expr(out, i, 0);
            out.push(']');
        }
        Expr::Call(f, args) => {
            out.push_str(f.as_str());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, 0);
            }
            out.push(')');
        }
    }
}

struct Printer {
    out: String,
    opts: PrettyOptions,
}

impl Printer {
    fn pad(&mut self, depth: usize) {
        for _ in 0..depth * self.opts.indent {
            self.out.push(' ');
        }
    }

    fn fundef(&mut self, f: &FunDef) {
        let _ = write!(self.out, "{} {}(", type_prefix(f.ret), f.name);
        if f.params.is_empty() {
            self.out.push_str("void");
        }
        for (i, p) in f.params.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            match p.ty {
                CType::Pointer(t) => {
                    let _ = write!(self.out, "{} *{}", t.c_name(), p.name);
                }
                ty => {
                    let _ = write!(self.out, "{} {}", type_prefix(ty), p.name);
                }
            }
        }
        self.out.push_str(") ");
        self.block(&f.body, 0);
        self.out.push('\n');
    }

    /// Writes `{`, the statements one per line, and the closing brace at
    /// `depth`, without a trailing newline.
    fn block(&mut self, b: &Block, depth: usize) {
        self.out.push_str("{\n");
        for s in b.stmts() {
            self.stmt(s, depth + 1);
        }
        self.pad(depth);
        self.out.push('}');
    }

    fn stmt(&mut self, s: &Stmt, depth: usize) {
        self.pad(depth);
        match s {
            Stmt::Declare { ty, name, init } => {
                let _ = write!(self.out, "{} {} = {};", ty.c_name(), name, print_expr(init));
            }
            Stmt::Assign { name, rhs } => {
                let _ = write!(self.out, "{} = {};", name, print_expr(rhs));
            }
            Stmt::AssignIndex { array, index, rhs } => {
                let _ = write!(
                    self.out,
                    "{}[{}] = {};",
                    array,
                    print_expr(index),
                    print_expr(rhs)
                );
            }
            Stmt::If { test, then } => {
                let _ = write!(self.out, "if ({}) ", print_expr(test));
                self.block(then, depth);
            }
            Stmt::IfElse { test, then, els } => {
                let _ = write!(self.out, "if ({}) ", print_expr(test));
                self.block(then, depth);
                self.out.push_str(" else ");
                self.block(els, depth);
            }
            Stmt::While { test, body } => {
                let _ = write!(self.out, "while ({}) ", print_expr(test));
                self.block(body, depth);
            }
            Stmt::Return(None) => self.out.push_str("return;"),
            Stmt::Return(Some(e)) => {
                let _ = write!(self.out, "return {};", print_expr(e));
            }
            Stmt::ExprStmt(e) => {
                let _ = write!(self.out, "{};", print_expr(e));
            }
        }
        self.out.push('\n');
    }
}

fn type_prefix(ty: CType) -> String {
    match ty {
        CType::Int(t) => t.c_name().to_string(),
        CType::Pointer(t) => format!("{} *", t.c_name()),
        CType::Void => "void".to_string(),
    }
}
