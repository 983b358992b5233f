//! Static fuel bounds for loop-free code.
//!
//! The interpreter charges one unit per function entry, per statement and
//! per block exit, and passes the remaining fuel down as a depth budget. A
//! loop-free function called from loop-free callers therefore needs a fixed
//! amount of fuel regardless of its arguments.

use std::collections::BTreeMap;

use crate::ast::{Block, Expr, Stmt, TransUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FuelBound {
    /// Every run halts with this much fuel or more.
    Constant(u64),
    /// The function reaches a `while`; no argument-independent bound exists.
    LoopDependent,
}

/// Bounds for every function of `tu`.
pub fn fuel_bounds(tu: &TransUnit) -> BTreeMap<String, FuelBound> {
    let mut memo = BTreeMap::new();
    for f in &tu.fundefs {
        bound_fun(tu, f.name.as_str(), &mut memo, &mut Vec::new());
    }
    memo
}

/// Bound for `name`, or `None` if `tu` has no such function.
pub fn fuel_bound(name: &str, tu: &TransUnit) -> Option<FuelBound> {
    tu.function(name)?;
    Some(bound_fun(tu, name, &mut BTreeMap::new(), &mut Vec::new()))
}

type Memo = BTreeMap<String, FuelBound>;

fn bound_fun(tu: &TransUnit, name: &str, memo: &mut Memo, active: &mut Vec<String>) -> FuelBound {
    if let Some(b) = memo.get(name) {
        return *b;
    }
    let Some(f) = tu.function(name) else {
        // the call fails before spending more than the entry unit
        return FuelBound::Constant(1);
    };
    if active.iter().any(|a| a == name) {
        return FuelBound::LoopDependent;
    }
    active.push(name.to_string());
    let b = plus(1, bound_block(tu, &f.body, memo, active));
    active.pop();
    memo.insert(name.to_string(), b);
    b
}

fn plus(n: u64, b: FuelBound) -> FuelBound {
    match b {
        FuelBound::Constant(c) => FuelBound::Constant(c.saturating_add(n)),
        FuelBound::LoopDependent => FuelBound::LoopDependent,
    }
}

// LoopDependent sorts last, so `max` absorbs it
fn bound_block(tu: &TransUnit, b: &Block, memo: &mut Memo, active: &mut Vec<String>) -> FuelBound {
    b.stmts().iter().rev().fold(FuelBound::Constant(1), |rest, s| {
        plus(1, bound_stmt(tu, s, memo, active).max(rest))
    })
}

fn bound_stmt(tu: &TransUnit, s: &Stmt, memo: &mut Memo, active: &mut Vec<String>) -> FuelBound {
    let call = |e: &Expr, memo: &mut Memo, active: &mut Vec<String>| match e {
        Expr::Call(g, _) => plus(1, bound_fun(tu, g.as_str(), memo, active)),
        _ => FuelBound::Constant(1),
    };
    match s {
        Stmt::Declare { init: e, .. } | Stmt::Assign { rhs: e, .. } | Stmt::ExprStmt(e) => call(e, memo, active),
        Stmt::Return(Some(e)) => call(e, memo, active),
        Stmt::AssignIndex { .. } | Stmt::Return(None) => FuelBound::Constant(1),
        Stmt::If { then, .. } => plus(1, bound_block(tu, then, memo, active)),
        Stmt::IfElse { then, els, .. } => {
            plus(1, bound_block(tu, then, memo, active).max(bound_block(tu, els, memo, active)))
        }
        Stmt::While { .. } => FuelBound::LoopDependent,
    }
}
