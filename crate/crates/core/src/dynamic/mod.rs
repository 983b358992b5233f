//! Dynamic semantics of the C subset: computation states and a defensive,
//! fuel-bounded big-step interpreter.
//!
//! Fuel is a recursion-depth budget. Every execution function checks for
//! zero fuel first and passes `fuel - 1` to each recursive call:
//!
//! * a function call runs its body block with `fuel - 1`;
//! * a block runs its k-th statement with `fuel - k - 1`, and needs
//!   `fuel - n > 0` after the last of its n statements;
//! * a statement runs its sub-block, loop, or call with `fuel - 1`;
//! * the i-th iteration of a loop runs its body with `fuel - i - 1`.
//!
//! [`crate::codegen::fuel_bound`] computes constant bounds from exactly
//! these rules.

mod exec;
mod state;

use std::collections::BTreeMap;

use thiserror::Error;

pub use exec::Interp;
pub use state::{Address, ComputationState, Frame, Pointer, Scope, Value};

use crate::ast::{Block, CType, Ident, Param, TransUnit};
use crate::values::{BoundsError, WellDefError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("unbound variable `{0}`")]
    UnboundVar(Ident),
    #[error("unbound function `{0}`")]
    UnboundFun(Ident),
    #[error("variable `{0}` already exists in the current scope")]
    DuplicateVar(Ident),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("well-definedness ({op}): {0}", op = .0.op())]
    WellDefinedness(WellDefError),
    #[error("bounds: {0}")]
    Bounds(BoundsError),
    #[error("null pointer dereference through `{0}`")]
    NullDeref(Ident),
    #[error("no array at address @{addr}", addr = .0 .0)]
    NoSuchArray(Address),
    #[error("no frame or scope to operate on")]
    NoFrame,
    #[error("`{fun}` called with {found} arguments, expects {expected}")]
    Arity {
        fun: Ident,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` completed without returning a value")]
    MissingReturn(Ident),
    #[error("duplicate function `{0}`")]
    DuplicateFun(Ident),
}

impl DynError {
    /// Short kind name, as printed by the command line tool.
    pub fn kind(&self) -> String {
        match self {
            DynError::UnboundVar(_) => "unbound-var".into(),
            DynError::UnboundFun(_) => "unbound-fun".into(),
            DynError::DuplicateVar(_) => "duplicate-var".into(),
            DynError::TypeMismatch(_) => "type-mismatch".into(),
            DynError::WellDefinedness(e) => format!("well-definedness ({})", e.op()),
            DynError::Bounds(_) => "bounds".into(),
            DynError::NullDeref(_) => "null-deref".into(),
            DynError::NoSuchArray(_) => "no-such-array".into(),
            DynError::NoFrame => "no-frame".into(),
            DynError::Arity { .. } => "arity".into(),
            DynError::MissingReturn(_) => "missing-return".into(),
            DynError::DuplicateFun(_) => "duplicate-fun".into(),
        }
    }
}

/// Why an execution stopped without a result.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Halt {
    #[error(transparent)]
    Error(#[from] DynError),
    /// Fuel ran out. This is not a semantic error.
    #[error("fuel exhausted")]
    Limit,
}

pub type Outcome<T> = Result<T, Halt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunInfo {
    pub params: Vec<Param>,
    pub ret: CType,
    pub body: Block,
}

/// The functions of a program, fixed for the whole execution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunEnv {
    funs: BTreeMap<Ident, FunInfo>,
}

impl FunEnv {
    pub fn get(&self, name: &Ident) -> Option<&FunInfo> {
        self.funs.get(name)
    }

    pub fn len(&self) -> usize {
        self.funs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funs.is_empty()
    }
}

pub fn init_fun_env(tu: &TransUnit) -> Result<FunEnv, DynError> {
    let mut funs = BTreeMap::new();
    for f in &tu.fundefs {
        let info = FunInfo {
            params: f.params.clone(),
            ret: f.ret,
            body: f.body.clone(),
        };
        if funs.insert(f.name.clone(), info).is_some() {
            return Err(DynError::DuplicateFun(f.name.clone()));
        }
    }
    Ok(FunEnv { funs })
}
