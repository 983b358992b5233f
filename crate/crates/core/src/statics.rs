//! Static semantics of the C subset: symbol tables, expression typing, and
//! return-type sets for statements.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::ast::{Block, CType, Expr, FunDef, Ident, Stmt, TransUnit};
use crate::values::{CIntType, ImplParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("in function `{fun}`: {kind}")]
pub struct StaticError {
    pub fun: String,
    pub kind: StaticErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StaticErrorKind {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unbound function `{0}`")]
    UnboundFun(String),
    #[error("`{0}` is already declared in this scope")]
    Redeclared(String),
    #[error("duplicate function `{0}`")]
    DuplicateFun(String),
    #[error("{context}: expected {expected}, found {found}")]
    Mismatch {
        context: String,
        expected: String,
        found: CType,
    },
    #[error("constant {value} does not fit {ty}")]
    ConstRange { value: i128, ty: CIntType },
    #[error("call to `{fun}` with {found} arguments, expected {expected}")]
    Arity {
        fun: String,
        expected: usize,
        found: usize,
    },
    #[error("call to `{0}` in a pure expression")]
    CallNotAllowed(String),
    #[error("call to void function `{0}` used as a value")]
    VoidValue(String),
    #[error("body may return {found:?}, inconsistent with return type {ret}")]
    InconsistentReturn { ret: CType, found: Vec<CType> },
}

/// Variable symbol table: a stack of scopes, innermost last.
#[derive(Debug, Clone)]
pub struct VarTable {
    scopes: Vec<HashMap<Ident, CType>>,
}

impl Default for VarTable {
    fn default() -> Self {
        VarTable {
            scopes: vec![HashMap::new()],
        }
    }
}

impl VarTable {
    pub fn lookup(&self, x: &Ident) -> Option<CType> {
        self.scopes.iter().rev().find_map(|s| s.get(x).copied())
    }

    pub fn declare(&mut self, x: &Ident, ty: CType) -> Result<(), StaticErrorKind> {
        let top = self.scopes.last_mut().expect("scope stack is never empty");
        if top.contains_key(x) {
            return Err(StaticErrorKind::Redeclared(x.to_string()));
        }
        top.insert(x.clone(), ty);
        Ok(())
    }

    pub fn push_scope(&mut self) {
        self.scopes.push(HashMap::new());
    }

    pub fn pop_scope(&mut self) {
        if self.scopes.len() > 1 {
            self.scopes.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunSig {
    pub params: Vec<CType>,
    pub ret: CType,
}

#[derive(Debug, Clone, Default)]
pub struct FunTable {
    funs: HashMap<Ident, FunSig>,
}

impl FunTable {
    pub fn get(&self, f: &Ident) -> Option<&FunSig> {
        self.funs.get(f)
    }

    pub fn add(&mut self, f: &FunDef) -> Result<(), StaticErrorKind> {
        if self.funs.contains_key(&f.name) {
            return Err(StaticErrorKind::DuplicateFun(f.name.to_string()));
        }
        let sig = FunSig {
            params: f.params.iter().map(|p| p.ty).collect(),
            ret: f.ret,
        };
        self.funs.insert(f.name.clone(), sig);
        Ok(())
    }
}

pub type TypeSet = BTreeSet<CType>;

/// Result of a successful check of a whole translation unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wellformed;

/// Static checker over one function body.
pub struct Checker<'a> {
    pub params: &'a ImplParams,
    pub funs: &'a FunTable,
    fun: String,
}

impl<'a> Checker<'a> {
    pub fn new(params: &'a ImplParams, funs: &'a FunTable, fun: &str) -> Self {
        Checker {
            params,
            funs,
            fun: fun.to_string(),
        }
    }

    fn err(&self, kind: StaticErrorKind) -> StaticError {
        StaticError {
            fun: self.fun.clone(),
            kind,
        }
    }

    fn int_operand(&self, ty: CType, context: &str) -> Result<CIntType, StaticError> {
        match ty {
            CType::Int(t) => Ok(t),
            other => Err(self.err(StaticErrorKind::Mismatch {
                context: context.to_string(),
                expected: "an integer type".to_string(),
                found: other,
            })),
        }
    }

    /// Type of a pure expression (no calls anywhere).
    pub fn check_expr(&self, e: &Expr, vars: &VarTable) -> Result<CType, StaticError> {
        self.expr(e, vars, false)
    }

    /// Type of an expression in a position where a call may be the whole
    /// expression. Void calls are rejected here.
    pub fn check_value_expr(&self, e: &Expr, vars: &VarTable) -> Result<CType, StaticError> {
        self.expr(e, vars, true)
    }

    fn expr(&self, e: &Expr, vars: &VarTable, call_ok: bool) -> Result<CType, StaticError> {
        match e {
            Expr::Const { value, ty } => {
                if !self.params.in_range(*ty, *value) {
                    return Err(self.err(StaticErrorKind::ConstRange {
                        value: *value,
                        ty: *ty,
                    }));
                }
                Ok(CType::Int(*ty))
            }
            Expr::Var(x) => vars
                .lookup(x)
                .ok_or_else(|| self.err(StaticErrorKind::UnboundVar(x.to_string()))),
            Expr::Unary(op, a) => {
                let t = self.int_operand(self.expr(a, vars, false)?, op.name())?;
                Ok(CType::Int(self.params.unary_result_type(*op, t)))
            }
            Expr::Binary(op, a, b) => {
                let ta = self.int_operand(self.expr(a, vars, false)?, op.name())?;
                let tb = self.int_operand(self.expr(b, vars, false)?, op.name())?;
                Ok(CType::Int(self.params.binary_result_type(*op, ta, tb)))
            }
            Expr::LogAnd(a, b) | Expr::LogOr(a, b) => {
                self.int_operand(self.expr(a, vars, false)?, "logical operator")?;
                self.int_operand(self.expr(b, vars, false)?, "logical operator")?;
                Ok(CType::Int(CIntType::SINT))
            }
            Expr::Cond(t, a, b) => {
                self.int_operand(self.expr(t, vars, false)?, "conditional test")?;
                let ta = self.int_operand(self.expr(a, vars, false)?, "conditional branch")?;
                let tb = self.int_operand(self.expr(b, vars, false)?, "conditional branch")?;
                if ta != tb {
                    return Err(self.err(StaticErrorKind::Mismatch {
                        context: "conditional branches".to_string(),
                        expected: ta.to_string(),
                        found: CType::Int(tb),
                    }));
                }
                Ok(CType::Int(ta))
            }
            Expr::Cast(target, a) => {
                self.int_operand(self.expr(a, vars, false)?, "cast")?;
                Ok(CType::Int(*target))
            }
            Expr::Index(arr, i) => {
                let elem = match vars.lookup(arr) {
                    Some(CType::Pointer(t)) => t,
                    Some(other) => {
                        return Err(self.err(StaticErrorKind::Mismatch {
                            context: format!("indexing `{arr}`"),
                            expected: "a pointer".to_string(),
                            found: other,
                        }))
                    }
                    None => return Err(self.err(StaticErrorKind::UnboundVar(arr.to_string()))),
                };
                self.int_operand(self.expr(i, vars, false)?, "array index")?;
                Ok(CType::Int(elem))
            }
            Expr::Call(f, args) => {
                if !call_ok {
                    return Err(self.err(StaticErrorKind::CallNotAllowed(f.to_string())));
                }
                let ret = self.call(f, args, vars)?;
                if ret == CType::Void {
                    return Err(self.err(StaticErrorKind::VoidValue(f.to_string())));
                }
                Ok(ret)
            }
        }
    }

    fn call(&self, f: &Ident, args: &[Expr], vars: &VarTable) -> Result<CType, StaticError> {
        let sig = self
            .funs
            .get(f)
            .ok_or_else(|| self.err(StaticErrorKind::UnboundFun(f.to_string())))?;
        if sig.params.len() != args.len() {
            return Err(self.err(StaticErrorKind::Arity {
                fun: f.to_string(),
                expected: sig.params.len(),
                found: args.len(),
            }));
        }
        for (i, (a, expected)) in args.iter().zip(&sig.params).enumerate() {
            let t = self.expr(a, vars, false)?;
            if t != *expected {
                return Err(self.err(StaticErrorKind::Mismatch {
                    context: format!("argument {} of `{f}`", i + 1),
                    expected: expected.to_string(),
                    found: t,
                }));
            }
        }
        Ok(sig.ret)
    }

    fn expect_type(&self, found: CType, expected: CType, context: String) -> Result<(), StaticError> {
        if found == expected {
            Ok(())
        } else {
            Err(self.err(StaticErrorKind::Mismatch {
                context,
                expected: expected.to_string(),
                found,
            }))
        }
    }

    /// Checks a statement, extending `vars` with any declaration it makes,
    /// and returns the set of types it may return (`void` for completing
    /// normally).
    pub fn check_stmt(&self, s: &Stmt, vars: &mut VarTable) -> Result<TypeSet, StaticError> {
        let void = || TypeSet::from([CType::Void]);
        match s {
            Stmt::Declare { ty, name, init } => {
                let t = self.check_value_expr(init, vars)?;
                self.expect_type(t, CType::Int(*ty), format!("initializer of `{name}`"))?;
                vars.declare(name, CType::Int(*ty)).map_err(|k| self.err(k))?;
                Ok(void())
            }
            Stmt::Assign { name, rhs } => {
                let target = vars
                    .lookup(name)
                    .ok_or_else(|| self.err(StaticErrorKind::UnboundVar(name.to_string())))?;
                self.int_operand(target, &format!("assignment to `{name}`"))?;
                let t = self.check_value_expr(rhs, vars)?;
                self.expect_type(t, target, format!("assignment to `{name}`"))?;
                Ok(void())
            }
            Stmt::AssignIndex { array, index, rhs } => {
                let elem = match vars.lookup(array) {
                    Some(CType::Pointer(t)) => t,
                    Some(other) => {
                        return Err(self.err(StaticErrorKind::Mismatch {
                            context: format!("indexing `{array}`"),
                            expected: "a pointer".to_string(),
                            found: other,
                        }))
                    }
                    None => return Err(self.err(StaticErrorKind::UnboundVar(array.to_string()))),
                };
                let ti = self.check_expr(index, vars)?;
                self.int_operand(ti, "array index")?;
                let t = self.check_expr(rhs, vars)?;
                self.expect_type(t, CType::Int(elem), format!("element write to `{array}`"))?;
                Ok(void())
            }
            Stmt::If { test, then } => {
                self.test(test, vars)?;
                let mut set = self.scoped_block(then, vars)?;
                set.insert(CType::Void);
                Ok(set)
            }
            Stmt::IfElse { test, then, els } => {
                self.test(test, vars)?;
                let mut set = self.scoped_block(then, vars)?;
                set.extend(self.scoped_block(els, vars)?);
                Ok(set)
            }
            Stmt::While { test, body } => {
                self.test(test, vars)?;
                let mut set = self.scoped_block(body, vars)?;
                set.insert(CType::Void);
                Ok(set)
            }
            Stmt::Return(None) => Ok(void()),
            Stmt::Return(Some(e)) => Ok(TypeSet::from([self.check_value_expr(e, vars)?])),
            Stmt::ExprStmt(e) => match e {
                Expr::Call(f, args) => {
                    self.call(f, args, vars)?;
                    Ok(void())
                }
                _ => Err(self.err(StaticErrorKind::Mismatch {
                    context: "expression statement".to_string(),
                    expected: "a function call".to_string(),
                    found: self.check_expr(e, vars)?,
                })),
            },
        }
    }

    fn test(&self, e: &Expr, vars: &VarTable) -> Result<(), StaticError> {
        let t = self.check_expr(e, vars)?;
        self.int_operand(t, "test").map(|_| ())
    }

    fn scoped_block(&self, b: &Block, vars: &mut VarTable) -> Result<TypeSet, StaticError> {
        vars.push_scope();
        let r = self.check_block(b, vars);
        vars.pop_scope();
        r
    }

    /// Checks the statements of a block in the current scope. A statement
    /// that cannot complete normally makes the rest unreachable, so only
    /// its non-void types and the rest's types combine.
    pub fn check_block(&self, b: &Block, vars: &mut VarTable) -> Result<TypeSet, StaticError> {
        let mut set = TypeSet::new();
        let mut reachable = true;
        for s in b.stmts() {
            let mut ts = self.check_stmt(s, vars)?;
            if reachable {
                let falls_through = ts.remove(&CType::Void);
                set.extend(ts);
                reachable = falls_through;
            }
        }
        if reachable {
            set.insert(CType::Void);
        }
        Ok(set)
    }
}

pub fn check_fundef(f: &FunDef, funs: &FunTable, params: &ImplParams) -> Result<(), StaticError> {
    let checker = Checker::new(params, funs, f.name.as_str());
    let mut vars = VarTable::default();
    for p in &f.params {
        vars.declare(&p.name, p.ty).map_err(|k| checker.err(k))?;
    }
    let set = checker.check_block(&f.body, &mut vars)?;
    let ok = if f.ret == CType::Void {
        set.len() == 1 && set.contains(&CType::Void)
    } else {
        set.iter().all(|t| *t == f.ret)
    };
    if ok {
        Ok(())
    } else {
        Err(checker.err(StaticErrorKind::InconsistentReturn {
            ret: f.ret,
            found: set.into_iter().collect(),
        }))
    }
}

/// Checks every function in order; each sees itself and its predecessors.
pub fn check_transunit(tu: &TransUnit, params: &ImplParams) -> Result<Wellformed, StaticError> {
    let mut funs = FunTable::default();
    for f in &tu.fundefs {
        funs.add(f).map_err(|kind| StaticError {
            fun: f.name.to_string(),
            kind,
        })?;
        check_fundef(f, &funs, params)?;
    }
    Ok(Wellformed)
}
