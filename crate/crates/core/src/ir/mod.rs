//! The functional IR: ACL2-style `defun` forms whose bodies are built from a
//! fixed vocabulary of C-representing operations.
//!
//! Non-recursive functions stand for C functions. Tail-recursive functions
//! stand for C `while` loops and are inlined at their call sites.

mod check;
mod eval;
mod inputs;
mod parse;
mod print;
mod sexpr;

use std::fmt;

pub use check::{check_ir, output_names, IrError, OutputNames};
pub use eval::{eval_ir, ArrayStrategy, EvalError, Evaluator, IrValue, DEFAULT_STEP_CAP};
pub use inputs::{gen_inputs, InputConfig, SamplingError};
pub use parse::{parse_ir, IrParseError};
pub use print::{print_ir, print_term};

use crate::values::{BinaryOp, CIntType, UnaryOp};

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IrType {
    Int(CIntType),
    Array(CIntType),
}

impl fmt::Display for IrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrType::Int(t) => write!(f, "{}", t.abbrev()),
            IrType::Array(t) => write!(f, "{}-array", t.abbrev()),
        }
    }
}

/// A term with its source position. Equality ignores positions.
#[derive(Debug, Clone, Eq)]
pub struct IrTerm {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for IrTerm {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<TermKind> for IrTerm {
    fn from(kind: TermKind) -> Self {
        IrTerm {
            kind,
            span: Span::default(),
        }
    }
}

impl IrTerm {
    pub fn new(kind: TermKind, span: Span) -> Self {
        IrTerm { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    Var(String),
    /// `(<type>-dec-const n)`
    Const { ty: CIntType, value: i128 },
    /// `(minus-sint x)`; `ty` is the operand type.
    Unary { op: UnaryOp, ty: CIntType, arg: Box<IrTerm> },
    /// `(add-sint-uint x y)`
    Binary {
        op: BinaryOp,
        left_ty: CIntType,
        right_ty: CIntType,
        left: Box<IrTerm>,
        right: Box<IrTerm>,
    },
    /// `(<to>-from-<from> x)`
    Convert { from: CIntType, to: CIntType, arg: Box<IrTerm> },
    /// `(boolean-from-<ty> x)`
    BoolFrom { ty: CIntType, arg: Box<IrTerm> },
    /// `(<ty>-from-boolean b)`
    IntFromBool { ty: CIntType, arg: Box<IrTerm> },
    /// `(let ((v (declar e))) body)`
    LetDeclar { var: String, rhs: Box<IrTerm>, body: Box<IrTerm> },
    /// `(let ((v (assign e))) body)`
    LetAssign { var: String, rhs: Box<IrTerm>, body: Box<IrTerm> },
    /// Wrapperless `let` or `mv-let` binding the variables a statement
    /// affects: an `if`, a loop call, a call, or an array write.
    LetStmt { vars: Vec<String>, rhs: Box<IrTerm>, body: Box<IrTerm> },
    If { test: Box<IrTerm>, then: Box<IrTerm>, els: Box<IrTerm> },
    And(Box<IrTerm>, Box<IrTerm>),
    Or(Box<IrTerm>, Box<IrTerm>),
    /// `(condexpr (if ...))`: an `if` standing for a C conditional expression.
    CondExpr(Box<IrTerm>),
    /// `(<elem>-array-read-<index> a i)`
    ArrayRead { elem: CIntType, index_ty: CIntType, array: String, index: Box<IrTerm> },
    /// `(<elem>-array-write-<index> a i v)`
    ArrayWrite {
        elem: CIntType,
        index_ty: CIntType,
        array: String,
        index: Box<IrTerm>,
        value: Box<IrTerm>,
    },
    /// `(<elem>-array-length a)`, an `sint`. Only allowed in guards.
    ArrayLength { elem: CIntType, array: String },
    Call { func: String, args: Vec<IrTerm> },
    /// Call of a loop function; the arguments are its formals.
    LoopCall { func: String, args: Vec<String> },
    Mv(Vec<IrTerm>),
    /// Marks the result among array outputs in an `mv`.
    RetVal(Box<IrTerm>),
}

/// Convenience constructors with default spans, used when building terms
/// programmatically.
pub mod build {
    use super::*;

    pub fn var(name: &str) -> IrTerm {
        TermKind::Var(name.to_string()).into()
    }

    pub fn konst(ty: CIntType, value: i128) -> IrTerm {
        TermKind::Const { ty, value }.into()
    }

    pub fn unary(op: UnaryOp, ty: CIntType, arg: IrTerm) -> IrTerm {
        TermKind::Unary { op, ty, arg: Box::new(arg) }.into()
    }

    pub fn binary(op: BinaryOp, left_ty: CIntType, right_ty: CIntType, l: IrTerm, r: IrTerm) -> IrTerm {
        TermKind::Binary {
            op,
            left_ty,
            right_ty,
            left: Box::new(l),
            right: Box::new(r),
        }
        .into()
    }

    pub fn convert(from: CIntType, to: CIntType, arg: IrTerm) -> IrTerm {
        TermKind::Convert { from, to, arg: Box::new(arg) }.into()
    }

    pub fn bool_from(ty: CIntType, arg: IrTerm) -> IrTerm {
        TermKind::BoolFrom { ty, arg: Box::new(arg) }.into()
    }

    pub fn int_from_bool(ty: CIntType, arg: IrTerm) -> IrTerm {
        TermKind::IntFromBool { ty, arg: Box::new(arg) }.into()
    }

    pub fn let_declar(var: &str, rhs: IrTerm, body: IrTerm) -> IrTerm {
        TermKind::LetDeclar {
            var: var.to_string(),
            rhs: Box::new(rhs),
            body: Box::new(body),
        }
        .into()
    }

    pub fn let_assign(var: &str, rhs: IrTerm, body: IrTerm) -> IrTerm {
        TermKind::LetAssign {
            var: var.to_string(),
            rhs: Box::new(rhs),
            body: Box::new(body),
        }
        .into()
    }

    pub fn let_stmt(vars: &[&str], rhs: IrTerm, body: IrTerm) -> IrTerm {
        TermKind::LetStmt {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            rhs: Box::new(rhs),
            body: Box::new(body),
        }
        .into()
    }

    pub fn if_(test: IrTerm, then: IrTerm, els: IrTerm) -> IrTerm {
        TermKind::If {
            test: Box::new(test),
            then: Box::new(then),
            els: Box::new(els),
        }
        .into()
    }

    pub fn and(l: IrTerm, r: IrTerm) -> IrTerm {
        TermKind::And(Box::new(l), Box::new(r)).into()
    }

    pub fn or(l: IrTerm, r: IrTerm) -> IrTerm {
        TermKind::Or(Box::new(l), Box::new(r)).into()
    }

    pub fn condexpr(test: IrTerm, then: IrTerm, els: IrTerm) -> IrTerm {
        TermKind::CondExpr(Box::new(if_(test, then, els))).into()
    }

    pub fn array_read(elem: CIntType, index_ty: CIntType, array: &str, index: IrTerm) -> IrTerm {
        TermKind::ArrayRead {
            elem,
            index_ty,
            array: array.to_string(),
            index: Box::new(index),
        }
        .into()
    }

    pub fn array_write(elem: CIntType, index_ty: CIntType, array: &str, index: IrTerm, value: IrTerm) -> IrTerm {
        TermKind::ArrayWrite {
            elem,
            index_ty,
            array: array.to_string(),
            index: Box::new(index),
            value: Box::new(value),
        }
        .into()
    }

    pub fn array_length(elem: CIntType, array: &str) -> IrTerm {
        TermKind::ArrayLength {
            elem,
            array: array.to_string(),
        }
        .into()
    }

    pub fn call(func: &str, args: Vec<IrTerm>) -> IrTerm {
        TermKind::Call {
            func: func.to_string(),
            args,
        }
        .into()
    }

    pub fn loop_call(func: &str, args: &[&str]) -> IrTerm {
        TermKind::LoopCall {
            func: func.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
        .into()
    }

    pub fn mv(items: Vec<IrTerm>) -> IrTerm {
        TermKind::Mv(items).into()
    }

    pub fn retval(t: IrTerm) -> IrTerm {
        TermKind::RetVal(Box::new(t)).into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrParam {
    pub name: String,
    pub ty: IrType,
}

#[derive(Debug, Clone, Eq)]
pub struct IrFunction {
    pub name: String,
    pub params: Vec<IrParam>,
    /// Guard conjuncts other than the parameter type predicates.
    pub extra_guards: Vec<IrTerm>,
    pub body: IrTerm,
    /// True iff the function calls itself.
    pub is_loop: bool,
    pub span: Span,
}

/// Equality ignores source positions.
impl PartialEq for IrFunction {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.params == o.params
            && self.extra_guards == o.extra_guards
            && self.body == o.body
            && self.is_loop == o.is_loop
    }
}

impl IrFunction {
    pub fn param(&self, name: &str) -> Option<&IrParam> {
        self.params.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IrProgram {
    pub functions: Vec<IrFunction>,
}

impl IrProgram {
    pub fn function(&self, name: &str) -> Option<&IrFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }
}

/// Calls `visit` on `t` and every subterm, parents first.
pub fn walk<'a>(t: &'a IrTerm, visit: &mut dyn FnMut(&'a IrTerm)) {
    visit(t);
    match &t.kind {
        TermKind::Var(_)
        | TermKind::Const { .. }
        | TermKind::ArrayLength { .. }
        | TermKind::LoopCall { .. } => {}
        TermKind::Unary { arg, .. }
        | TermKind::Convert { arg, .. }
        | TermKind::BoolFrom { arg, .. }
        | TermKind::IntFromBool { arg, .. }
        | TermKind::CondExpr(arg)
        | TermKind::RetVal(arg)
        | TermKind::ArrayRead { index: arg, .. } => walk(arg, visit),
        TermKind::Binary { left, right, .. } => {
            walk(left, visit);
            walk(right, visit);
        }
        TermKind::And(a, b) | TermKind::Or(a, b) => {
            walk(a, visit);
            walk(b, visit);
        }
        TermKind::LetDeclar { rhs, body, .. }
        | TermKind::LetAssign { rhs, body, .. }
        | TermKind::LetStmt { rhs, body, .. } => {
            walk(rhs, visit);
            walk(body, visit);
        }
        TermKind::If { test, then, els } => {
            walk(test, visit);
            walk(then, visit);
            walk(els, visit);
        }
        TermKind::ArrayWrite { index, value, .. } => {
            walk(index, visit);
            walk(value, visit);
        }
        TermKind::Call { args, .. } | TermKind::Mv(args) => {
            for a in args {
                walk(a, visit);
            }
        }
    }
}
