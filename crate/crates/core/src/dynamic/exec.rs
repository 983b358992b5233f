use super::{ComputationState, DynError, Frame, FunEnv, Halt, Outcome, Pointer, Value};
use crate::ast::{Block, CType, Expr, Ident, Stmt};
use crate::values::{CIntType, ImplParams, IntegerValue};

/// Interpreter over a fixed function environment.
#[derive(Debug, Clone, Copy)]
pub struct Interp<'a> {
    pub params: &'a ImplParams,
    pub env: &'a FunEnv,
}

fn spend(fuel: u64) -> Result<u64, Halt> {
    fuel.checked_sub(1).ok_or(Halt::Limit)
}

fn expect_int(v: Value, what: &str) -> Result<IntegerValue, DynError> {
    v.as_int()
        .ok_or_else(|| DynError::TypeMismatch(format!("{what}: expected an integer, found {v}")))
}

impl<'a> Interp<'a> {
    pub fn new(params: &'a ImplParams, env: &'a FunEnv) -> Self {
        Interp { params, env }
    }

    /// Evaluates a call-free expression. Never changes the state.
    pub fn exec_expr_pure(&self, e: &Expr, st: &ComputationState) -> Result<Value, DynError> {
        let p = self.params;
        match e {
            Expr::Const { value, ty } => {
                let v = p.make_int(*ty, *value).map_err(|r| {
                    DynError::TypeMismatch(format!("constant {} does not fit {}", r.value, r.ty))
                })?;
                Ok(Value::Int(v))
            }
            Expr::Var(x) => st.read_var(x),
            Expr::Unary(op, a) => {
                let v = expect_int(self.exec_expr_pure(a, st)?, op.name())?;
                p.exec_unary(*op, v)
                    .map(Value::Int)
                    .map_err(DynError::WellDefinedness)
            }
            Expr::Binary(op, a, b) => {
                let x = expect_int(self.exec_expr_pure(a, st)?, op.name())?;
                let y = expect_int(self.exec_expr_pure(b, st)?, op.name())?;
                p.exec_binary(*op, x, y)
                    .map(Value::Int)
                    .map_err(DynError::WellDefinedness)
            }
            Expr::Cast(ty, a) => {
                let v = expect_int(self.exec_expr_pure(a, st)?, "cast")?;
                p.convert(v, *ty)
                    .map(Value::Int)
                    .map_err(DynError::WellDefinedness)
            }
            Expr::Cond(t, a, b) => {
                let test = expect_int(self.exec_expr_pure(t, st)?, "conditional test")?;
                let v = if test.to_bool() {
                    self.exec_expr_pure(a, st)?
                } else {
                    self.exec_expr_pure(b, st)?
                };
                expect_int(v, "conditional branch").map(Value::Int)
            }
            Expr::LogAnd(a, b) => {
                let x = expect_int(self.exec_expr_pure(a, st)?, "&&")?;
                let r = x.to_bool() && expect_int(self.exec_expr_pure(b, st)?, "&&")?.to_bool();
                Ok(Value::Int(IntegerValue::from_bool(r, CIntType::SINT)))
            }
            Expr::LogOr(a, b) => {
                let x = expect_int(self.exec_expr_pure(a, st)?, "||")?;
                let r = x.to_bool() || expect_int(self.exec_expr_pure(b, st)?, "||")?.to_bool();
                Ok(Value::Int(IntegerValue::from_bool(r, CIntType::SINT)))
            }
            Expr::Index(arr, i) => {
                let (addr, referent) = self.deref(arr, st)?;
                let idx = expect_int(self.exec_expr_pure(i, st)?, "array index")?;
                let array = st.read_array(addr)?;
                if array.elem_type() != referent {
                    return Err(DynError::TypeMismatch(format!(
                        "`{arr}` points to {referent} but the array holds {}",
                        array.elem_type()
                    )));
                }
                array.read(idx).map(Value::Int).map_err(DynError::Bounds)
            }
            Expr::Call(f, _) => Err(DynError::TypeMismatch(format!(
                "call to `{f}` in a pure expression"
            ))),
        }
    }

    fn deref(
        &self,
        arr: &Ident,
        st: &ComputationState,
    ) -> Result<(super::Address, CIntType), DynError> {
        match st.read_var(arr)? {
            Value::Pointer(Pointer {
                address: Some(a),
                referent,
            }) => Ok((a, referent)),
            Value::Pointer(Pointer { address: None, .. }) => Err(DynError::NullDeref(arr.clone())),
            v => Err(DynError::TypeMismatch(format!(
                "indexing `{arr}` holding {v}"
            ))),
        }
    }

    /// Evaluates an expression that may be a single call.
    fn exec_expr(&self, e: &Expr, st: &mut ComputationState, fuel: u64) -> Outcome<Option<Value>> {
        match e {
            Expr::Call(f, args) => self.call(f, args, st, fuel),
            _ => Ok(Some(self.exec_expr_pure(e, st)?)),
        }
    }

    fn call(
        &self,
        f: &Ident,
        args: &[Expr],
        st: &mut ComputationState,
        fuel: u64,
    ) -> Outcome<Option<Value>> {
        let vals = args
            .iter()
            .map(|a| self.exec_expr_pure(a, st))
            .collect::<Result<Vec<_>, _>>()?;
        self.fun(f, vals, st, fuel)
    }

    fn value_of(&self, e: &Expr, st: &mut ComputationState, fuel: u64) -> Outcome<Value> {
        match self.exec_expr(e, st, fuel)? {
            Some(v) => Ok(v),
            None => match e {
                Expr::Call(f, _) => Err(DynError::MissingReturn(f.clone()).into()),
                _ => unreachable!("pure expressions always yield a value"),
            },
        }
    }

    pub fn exec_fun(
        &self,
        name: &Ident,
        args: Vec<Value>,
        mut st: ComputationState,
        fuel: u64,
    ) -> Outcome<(Option<Value>, ComputationState)> {
        let v = self.fun(name, args, &mut st, fuel)?;
        Ok((v, st))
    }

    pub fn exec_stmt(
        &self,
        s: &Stmt,
        mut st: ComputationState,
        fuel: u64,
    ) -> Outcome<(Option<Value>, ComputationState)> {
        let v = self.stmt(s, &mut st, fuel)?;
        Ok((v, st))
    }

    pub fn exec_block(
        &self,
        b: &Block,
        mut st: ComputationState,
        fuel: u64,
    ) -> Outcome<(Option<Value>, ComputationState)> {
        let v = self.block(b, &mut st, fuel)?;
        Ok((v, st))
    }

    /// The `while` case of [`Interp::exec_stmt`].
    pub fn exec_stmt_while(
        &self,
        test: &Expr,
        body: &Block,
        mut st: ComputationState,
        fuel: u64,
    ) -> Outcome<(Option<Value>, ComputationState)> {
        let v = self.while_loop(test, body, &mut st, fuel)?;
        Ok((v, st))
    }

    fn fun(
        &self,
        name: &Ident,
        args: Vec<Value>,
        st: &mut ComputationState,
        fuel: u64,
    ) -> Outcome<Option<Value>> {
        let fuel = spend(fuel)?;
        let info = self
            .env
            .get(name)
            .ok_or_else(|| DynError::UnboundFun(name.clone()))?;
        if info.params.len() != args.len() {
            return Err(DynError::Arity {
                fun: name.clone(),
                expected: info.params.len(),
                found: args.len(),
            }
            .into());
        }
        let mut frame = Frame::new(name.clone());
        for (p, a) in info.params.iter().zip(args) {
            let matches = match (p.ty, a) {
                (CType::Int(t), Value::Int(v)) => v.ty() == t,
                (CType::Pointer(t), Value::Pointer(ptr)) => ptr.referent == t,
                _ => false,
            };
            if !matches {
                return Err(DynError::TypeMismatch(format!(
                    "argument `{}` of `{name}` expects {}, got {a}",
                    p.name, p.ty
                ))
                .into());
            }
            if frame.top_scope_mut().insert(p.name.clone(), a).is_some() {
                return Err(DynError::DuplicateVar(p.name.clone()).into());
            }
        }
        st.push_frame(frame);
        let result = self.block(&info.body, st, fuel)?;
        st.pop_frame()?;
        match (info.ret, result) {
            (CType::Void, None) => Ok(None),
            (CType::Int(t), Some(Value::Int(v))) if v.ty() == t => Ok(Some(Value::Int(v))),
            (CType::Int(_), None) => Err(DynError::MissingReturn(name.clone()).into()),
            (ret, Some(v)) => Err(DynError::TypeMismatch(format!(
                "`{name}` returns {ret} but produced {v}"
            ))
            .into()),
            (ret, None) => Err(DynError::TypeMismatch(format!(
                "`{name}` returns {ret}, which is not supported"
            ))
            .into()),
        }
    }

    fn block(&self, b: &Block, st: &mut ComputationState, fuel: u64) -> Outcome<Option<Value>> {
        let mut fuel = fuel;
        for s in b.stmts() {
            let inner = spend(fuel)?;
            if let Some(v) = self.stmt(s, st, inner)? {
                return Ok(Some(v));
            }
            fuel = inner;
        }
        spend(fuel)?;
        Ok(None)
    }

    fn scoped_block(&self, b: &Block, st: &mut ComputationState, fuel: u64) -> Outcome<Option<Value>> {
        st.push_scope()?;
        let r = self.block(b, st, fuel)?;
        st.pop_scope()?;
        Ok(r)
    }

    fn stmt(&self, s: &Stmt, st: &mut ComputationState, fuel: u64) -> Outcome<Option<Value>> {
        let fuel = spend(fuel)?;
        match s {
            Stmt::Declare { ty, name, init } => {
                let v = self.value_of(init, st, fuel)?;
                match v {
                    Value::Int(i) if i.ty() == *ty => {}
                    _ => {
                        return Err(DynError::TypeMismatch(format!(
                            "initializing {ty} `{name}` with {v}"
                        ))
                        .into())
                    }
                }
                st.create_var(name, v)?;
                Ok(None)
            }
            Stmt::Assign { name, rhs } => {
                let v = self.value_of(rhs, st, fuel)?;
                st.write_var(name, v)?;
                Ok(None)
            }
            Stmt::AssignIndex { array, index, rhs } => {
                let (addr, referent) = self.deref(array, st)?;
                let idx = expect_int(self.exec_expr_pure(index, st)?, "array index")?;
                let v = expect_int(self.exec_expr_pure(rhs, st)?, "array element")?;
                if v.ty() != referent {
                    return Err(DynError::TypeMismatch(format!(
                        "writing {} through {referent} pointer `{array}`",
                        v.ty()
                    ))
                    .into());
                }
                let arr = st.array_mut(addr)?;
                arr.write_in_place(idx, v).map_err(|e| match e {
                    crate::values::ArrayError::Bounds(b) => DynError::Bounds(b),
                    other => DynError::TypeMismatch(other.to_string()),
                })?;
                Ok(None)
            }
            Stmt::If { test, then } => {
                if self.test(test, st)? {
                    self.scoped_block(then, st, fuel)
                } else {
                    Ok(None)
                }
            }
            Stmt::IfElse { test, then, els } => {
                if self.test(test, st)? {
                    self.scoped_block(then, st, fuel)
                } else {
                    self.scoped_block(els, st, fuel)
                }
            }
            Stmt::While { test, body } => self.while_loop(test, body, st, fuel),
            Stmt::Return(None) => Ok(None),
            Stmt::Return(Some(e)) => Ok(Some(self.value_of(e, st, fuel)?)),
            Stmt::ExprStmt(e) => match e {
                Expr::Call(f, args) => {
                    self.call(f, args, st, fuel)?;
                    Ok(None)
                }
                _ => Err(DynError::TypeMismatch("expression statement is not a call".into()).into()),
            },
        }
    }

    fn test(&self, e: &Expr, st: &ComputationState) -> Result<bool, DynError> {
        Ok(expect_int(self.exec_expr_pure(e, st)?, "test")?.to_bool())
    }

    /// Each iteration is one level of recursion, unrolled here.
    fn while_loop(
        &self,
        test: &Expr,
        body: &Block,
        st: &mut ComputationState,
        fuel: u64,
    ) -> Outcome<Option<Value>> {
        let mut fuel = fuel;
        loop {
            let inner = spend(fuel)?;
            if !self.test(test, st)? {
                return Ok(None);
            }
            if let Some(v) = self.scoped_block(body, st, inner)? {
                return Ok(Some(v));
            }
            fuel = inner;
        }
    }
}
