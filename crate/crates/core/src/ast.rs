//! Abstract syntax of the generated C subset.
//!
//! The same tree is produced by the code generator, checked by
//! [`crate::statics`], executed by [`crate::dynamic`] and printed by
//! [`crate::pretty`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::values::{BinaryOp, CIntType, Rank, UnaryOp};

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Alignas", "_Alignof", "_Atomic", "_Bool",
    "_Complex", "_Generic", "_Imaginary", "_Noreturn", "_Static_assert", "_Thread_local",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("empty identifier")]
    EmptyIdent,
    #[error("`{0}` is not an ASCII C identifier")]
    BadIdent(String),
    #[error("`{0}` is a C keyword")]
    Keyword(String),
    #[error("in function `{fun}`: duplicate parameter `{param}`")]
    DuplicateParam { fun: String, param: String },
    #[error("in function `{fun}`: parameter `{param}` has type void")]
    VoidParam { fun: String, param: String },
    #[error("duplicate function `{0}`")]
    DuplicateFunction(String),
    #[error("in function `{fun}`: constant of type {ty} is not a legal C constant type")]
    ConstType { fun: String, ty: CIntType },
    #[error("in function `{fun}`: negative constant {value}")]
    NegativeConst { fun: String, value: i128 },
    #[error("in function `{fun}`: function call in a nested expression position")]
    CallPosition { fun: String },
    #[error("in function `{fun}`: expression statement is not a function call")]
    ExprStmtNotCall { fun: String },
}

/// An ASCII C identifier that is not a keyword.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ident(String);

impl Ident {
    pub fn new(name: impl Into<String>) -> Result<Self, SyntaxError> {
        let name = name.into();
        validate_ident(&name)?;
        Ok(Ident(name))
    }

    /// Builds an identifier without validation. [`syntax_check`] still
    /// rejects a translation unit that contains an invalid one.
    pub fn new_unchecked(name: impl Into<String>) -> Self {
        Ident(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn validate_ident(name: &str) -> Result<(), SyntaxError> {
    let mut chars = name.chars();
    let first = chars.next().ok_or(SyntaxError::EmptyIdent)?;
    let ok_first = first.is_ascii_alphabetic() || first == '_';
    if !ok_first || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(SyntaxError::BadIdent(name.to_string()));
    }
    if C_KEYWORDS.contains(&name) {
        return Err(SyntaxError::Keyword(name.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CType {
    Int(CIntType),
    /// Pointer to the first element of an integer array.
    Pointer(CIntType),
    Void,
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CType::Int(t) => write!(f, "{t}"),
            CType::Pointer(t) => write!(f, "{t} *"),
            CType::Void => f.write_str("void"),
        }
    }
}

/// Constant types: C has no integer literals below rank `int`.
pub fn is_const_type(ty: CIntType) -> bool {
    ty.rank >= Rank::Int
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    /// Decimal constant, always non-negative.
    Const { value: i128, ty: CIntType },
    Var(Ident),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Cast(CIntType, Box<Expr>),
    Index(Ident, Box<Expr>),
    Call(Ident, Vec<Expr>),
    LogAnd(Box<Expr>, Box<Expr>),
    LogOr(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(value: i128, ty: CIntType) -> Self {
        Expr::Const { value, ty }
    }

    pub fn var(name: &Ident) -> Self {
        Expr::Var(name.clone())
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn cond(t: Expr, a: Expr, b: Expr) -> Self {
        Expr::Cond(Box::new(t), Box::new(a), Box::new(b))
    }

    pub fn cast(ty: CIntType, e: Expr) -> Self {
        Expr::Cast(ty, Box::new(e))
    }

    pub fn index(array: &Ident, idx: Expr) -> Self {
        Expr::Index(array.clone(), Box::new(idx))
    }

    pub fn logand(l: Expr, r: Expr) -> Self {
        Expr::LogAnd(Box::new(l), Box::new(r))
    }

    pub fn logor(l: Expr, r: Expr) -> Self {
        Expr::LogOr(Box::new(l), Box::new(r))
    }

    pub fn is_call(&self) -> bool {
        matches!(self, Expr::Call(..))
    }

    /// True when no function call occurs anywhere in the expression.
    pub fn is_pure(&self) -> bool {
        match self {
            Expr::Const { .. } | Expr::Var(_) => true,
            Expr::Unary(_, e) | Expr::Cast(_, e) | Expr::Index(_, e) => e.is_pure(),
            Expr::Binary(_, a, b) | Expr::LogAnd(a, b) | Expr::LogOr(a, b) => {
                a.is_pure() && b.is_pure()
            }
            Expr::Cond(t, a, b) => t.is_pure() && a.is_pure() && b.is_pure(),
            Expr::Call(..) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stmt {
    Declare { ty: CIntType, name: Ident, init: Expr },
    Assign { name: Ident, rhs: Expr },
    AssignIndex { array: Ident, index: Expr, rhs: Expr },
    If { test: Expr, then: Block },
    IfElse { test: Expr, then: Block, els: Block },
    While { test: Expr, body: Block },
    Return(Option<Expr>),
    /// A function call evaluated for its effects.
    ExprStmt(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Block(pub Vec<Stmt>);

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Block(stmts)
    }

    pub fn stmts(&self) -> &[Stmt] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    pub name: Ident,
    pub ty: CType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunDef {
    pub name: Ident,
    pub params: Vec<Param>,
    pub ret: CType,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TransUnit {
    pub fundefs: Vec<FunDef>,
}

impl TransUnit {
    pub fn function(&self, name: &str) -> Option<&FunDef> {
        self.fundefs.iter().find(|f| f.name.as_str() == name)
    }
}

/// Checks the structural invariants of a translation unit: identifier
/// legality, distinct names, constant forms, and call positions.
pub fn syntax_check(tu: &TransUnit) -> Result<(), SyntaxError> {
    let mut names = HashSet::new();
    for f in &tu.fundefs {
        validate_ident(f.name.as_str())?;
        if !names.insert(f.name.as_str()) {
            return Err(SyntaxError::DuplicateFunction(f.name.to_string()));
        }
        let fun = f.name.as_str();
        let mut params = HashSet::new();
        for p in &f.params {
            validate_ident(p.name.as_str())?;
            if !params.insert(p.name.as_str()) {
                return Err(SyntaxError::DuplicateParam {
                    fun: fun.to_string(),
                    param: p.name.to_string(),
                });
            }
            if p.ty == CType::Void {
                return Err(SyntaxError::VoidParam {
                    fun: fun.to_string(),
                    param: p.name.to_string(),
                });
            }
        }
        check_block(fun, &f.body)?;
    }
    Ok(())
}

fn check_block(fun: &str, b: &Block) -> Result<(), SyntaxError> {
    b.stmts().iter().try_for_each(|s| check_stmt(fun, s))
}

fn check_stmt(fun: &str, s: &Stmt) -> Result<(), SyntaxError> {
    match s {
        Stmt::Declare { name, init, .. } => {
            validate_ident(name.as_str())?;
            check_call_position(fun, init)
        }
        Stmt::Assign { name, rhs } => {
            validate_ident(name.as_str())?;
            check_call_position(fun, rhs)
        }
        Stmt::AssignIndex { array, index, rhs } => {
            validate_ident(array.as_str())?;
            check_expr(fun, index, false)?;
            check_expr(fun, rhs, false)
        }
        Stmt::If { test, then } => {
            check_expr(fun, test, false)?;
            check_block(fun, then)
        }
        Stmt::IfElse { test, then, els } => {
            check_expr(fun, test, false)?;
            check_block(fun, then)?;
            check_block(fun, els)
        }
        Stmt::While { test, body } => {
            check_expr(fun, test, false)?;
            check_block(fun, body)
        }
        Stmt::Return(Some(e)) => check_call_position(fun, e),
        Stmt::Return(None) => Ok(()),
        Stmt::ExprStmt(e) => {
            if !e.is_call() {
                return Err(SyntaxError::ExprStmtNotCall { fun: fun.to_string() });
            }
            check_expr(fun, e, true)
        }
    }
}

/// Positions where a call may appear as the whole expression.
fn check_call_position(fun: &str, e: &Expr) -> Result<(), SyntaxError> {
    check_expr(fun, e, true)
}

fn check_expr(fun: &str, e: &Expr, call_ok: bool) -> Result<(), SyntaxError> {
    match e {
        Expr::Const { value, ty } => {
            if !is_const_type(*ty) {
                return Err(SyntaxError::ConstType {
                    fun: fun.to_string(),
                    ty: *ty,
                });
            }
            if *value < 0 {
                return Err(SyntaxError::NegativeConst {
                    fun: fun.to_string(),
                    value: *value,
                });
            }
            Ok(())
        }
        Expr::Var(x) => validate_ident(x.as_str()),
        Expr::Unary(_, a) | Expr::Cast(_, a) => check_expr(fun, a, false),
        Expr::Index(arr, i) => {
            validate_ident(arr.as_str())?;
            check_expr(fun, i, false)
        }
        Expr::Binary(_, a, b) | Expr::LogAnd(a, b) | Expr::LogOr(a, b) => {
            check_expr(fun, a, false)?;
            check_expr(fun, b, false)
        }
        Expr::Cond(t, a, b) => {
            check_expr(fun, t, false)?;
            check_expr(fun, a, false)?;
            check_expr(fun, b, false)
        }
        Expr::Call(name, args) => {
            if !call_ok {
                return Err(SyntaxError::CallPosition { fun: fun.to_string() });
            }
            validate_ident(name.as_str())?;
            args.iter().try_for_each(|a| check_expr(fun, a, false))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    pub(crate) fn fun_f() -> FunDef {
        let int = CType::Int(CIntType::SINT);
        FunDef {
            name: id("f"),
            params: ["x", "y", "z"]
                .iter()
                .map(|n| Param { name: id(n), ty: int })
                .collect(),
            ret: int,
            body: Block::new(vec![Stmt::Return(Some(Expr::binary(
                BinaryOp::Mul,
                Expr::binary(BinaryOp::Add, Expr::var(&id("x")), Expr::var(&id("y"))),
                Expr::binary(BinaryOp::Sub, Expr::var(&id("z")), Expr::constant(3, CIntType::SINT)),
            )))]),
        }
    }

    #[test]
    fn identifiers() {
        assert!(Ident::new("x_1").is_ok());
        assert!(Ident::new("_y").is_ok());
        assert_eq!(Ident::new(""), Err(SyntaxError::EmptyIdent));
        assert!(matches!(Ident::new("1x"), Err(SyntaxError::BadIdent(_))));
        assert!(matches!(Ident::new("h$loop"), Err(SyntaxError::BadIdent(_))));
        assert!(matches!(Ident::new("while"), Err(SyntaxError::Keyword(_))));
    }

    #[test]
    fn well_formed_f() {
        let tu = TransUnit { fundefs: vec![fun_f()] };
        assert_eq!(syntax_check(&tu), Ok(()));
    }

    #[test]
    fn keyword_function_name() {
        let mut f = fun_f();
        f.name = Ident::new_unchecked("while");
        let tu = TransUnit { fundefs: vec![f] };
        assert!(matches!(syntax_check(&tu), Err(SyntaxError::Keyword(_))));
    }

    #[test]
    fn duplicate_params() {
        let mut f = fun_f();
        f.params[1].name = id("x");
        let tu = TransUnit { fundefs: vec![f] };
        assert!(matches!(syntax_check(&tu), Err(SyntaxError::DuplicateParam { .. })));
    }

    #[test]
    fn duplicate_functions() {
        let tu = TransUnit { fundefs: vec![fun_f(), fun_f()] };
        assert!(matches!(syntax_check(&tu), Err(SyntaxError::DuplicateFunction(_))));
    }

    #[test]
    fn nested_call_rejected() {
        let mut f = fun_f();
        let call = Expr::Call(id("g"), vec![]);
        f.body = Block::new(vec![Stmt::Return(Some(Expr::binary(
            BinaryOp::Add,
            call.clone(),
            Expr::constant(1, CIntType::SINT),
        )))]);
        let tu = TransUnit { fundefs: vec![f.clone()] };
        assert!(matches!(syntax_check(&tu), Err(SyntaxError::CallPosition { .. })));

        f.body = Block::new(vec![Stmt::Return(Some(call))]);
        assert_eq!(syntax_check(&TransUnit { fundefs: vec![f] }), Ok(()));
    }

    #[test]
    fn constant_forms() {
        let mut f = fun_f();
        f.body = Block::new(vec![Stmt::Return(Some(Expr::constant(1, CIntType::UCHAR)))]);
        let tu = TransUnit { fundefs: vec![f] };
        assert!(matches!(syntax_check(&tu), Err(SyntaxError::ConstType { .. })));
    }
}
