//! Concrete C syntax: a printer for translation units that emits the fewest
//! parentheses the operator precedence allows, and a parser for the
//! expression subset.

mod parse;
mod print;

pub use parse::{parse_expr, parse_expr_with, ParseError};
pub use print::{print_expr, print_transunit, print_transunit_with, PrettyOptions};

use crate::ast::Expr;
use crate::values::BinaryOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

/// Binding strength of an expression form; larger binds tighter.
pub fn precedence(e: &Expr) -> (u8, Assoc) {
    match e {
        Expr::Const { .. } | Expr::Var(_) | Expr::Index(..) | Expr::Call(..) => (16, Assoc::None),
        Expr::Unary(..) | Expr::Cast(..) => (15, Assoc::Right),
        Expr::Binary(op, ..) => (binary_precedence(*op), Assoc::Left),
        Expr::LogAnd(..) => (5, Assoc::Left),
        Expr::LogOr(..) => (4, Assoc::Left),
        Expr::Cond(..) => (3, Assoc::Right),
    }
}

pub fn binary_precedence(op: BinaryOp) -> u8 {
    use BinaryOp::*;
    match op {
        Mul | Div | Rem => 13,
        Add | Sub => 12,
        Shl | Shr => 11,
        Lt | Gt | Le | Ge => 10,
        Eq | Ne => 9,
        BitAnd => 8,
        BitXor => 7,
        BitOr => 6,
    }
}

pub(crate) const LOGAND_PREC: u8 = 5;
pub(crate) const LOGOR_PREC: u8 = 4;
pub(crate) const COND_PREC: u8 = 3;
pub(crate) const UNARY_PREC: u8 = 15;
