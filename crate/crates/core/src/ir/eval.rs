//! Guard-checking evaluator for the IR. Every operation runs with the C
//! integer semantics; any well-definedness or bounds failure is a guard
//! violation.

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::{print_term, IrFunction, IrProgram, IrTerm, IrType, TermKind};
use crate::values::{ArrayValue, CIntType, ImplParams, IntegerValue};

/// An argument or result of an IR function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrValue {
    Int(IntegerValue),
    Array(ArrayValue),
}

impl fmt::Display for IrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrValue::Int(v) => write!(f, "{v}"),
            IrValue::Array(a) => write!(f, "{a}"),
        }
    }
}

/// How array updates are carried out. Both must agree on checked programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrayStrategy {
    /// Every write produces a fresh array.
    #[default]
    CopyOnWrite,
    /// Arrays live in an arena and writes mutate them.
    InPlace,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("guard violation: {0}")]
    GuardViolation(String),
    #[error("step cap of {0} loop iterations exceeded")]
    CapExceeded(u64),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{fun}` expects {expected} arguments, got {found}")]
    Arity {
        fun: String,
        expected: usize,
        found: usize,
    },
    #[error("malformed term: {0}")]
    Malformed(String),
}

type EResult<T> = Result<T, EvalError>;

pub const DEFAULT_STEP_CAP: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub program: &'a IrProgram,
    pub params: &'a ImplParams,
    pub strategy: ArrayStrategy,
    /// Maximum number of loop iterations per top-level call.
    pub step_cap: u64,
}

/// Copy-on-write evaluation of `fun` on `args`.
pub fn eval_ir(
    p: &IrProgram,
    params: &ImplParams,
    fun: &str,
    args: &[IrValue],
    step_cap: u64,
) -> Result<Vec<IrValue>, EvalError> {
    Evaluator {
        program: p,
        params,
        strategy: ArrayStrategy::CopyOnWrite,
        step_cap,
    }
    .call(fun, args)
}

#[derive(Debug, Clone)]
enum V {
    Int(IntegerValue),
    Bool(bool),
    /// Copy-on-write array.
    Arr(Rc<ArrayValue>),
    /// Index into the in-place arena.
    Handle(usize),
    Multi(Vec<V>),
}

enum Flow {
    Val(V),
    /// Arguments of a tail call to the loop being run.
    Recur(Vec<V>),
}

struct Run<'e, 'a> {
    ev: &'e Evaluator<'a>,
    arena: Vec<ArrayValue>,
    steps: u64,
}

type Env = Vec<(String, V)>;

fn guard<T>(msg: impl Into<String>) -> EResult<T> {
    Err(EvalError::GuardViolation(msg.into()))
}

impl<'a> Evaluator<'a> {
    pub fn new(program: &'a IrProgram, params: &'a ImplParams) -> Self {
        Evaluator {
            program,
            params,
            strategy: ArrayStrategy::CopyOnWrite,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn with_strategy(mut self, s: ArrayStrategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    fn run(&self) -> Run<'_, 'a> {
        Run {
            ev: self,
            arena: Vec::new(),
            steps: 0,
        }
    }

    /// Calls `fun`, returning its outputs: the result and/or the affected
    /// arrays for ordinary functions, the affected formals for loops.
    pub fn call(&self, fun: &str, args: &[IrValue]) -> EResult<Vec<IrValue>> {
        let mut run = self.run();
        let args = args.iter().map(|a| run.import(a)).collect();
        let out = run.call(fun, args)?;
        let mut flat = Vec::new();
        run.export(out, &mut flat)?;
        Ok(flat)
    }

    /// Whether `args` satisfy the type conjuncts and extra guards of `fun`.
    /// A guard whose own evaluation fails counts as not satisfied.
    pub fn guard_holds(&self, fun: &str, args: &[IrValue]) -> EResult<bool> {
        let f = self
            .program
            .function(fun)
            .ok_or_else(|| EvalError::UnknownFunction(fun.to_string()))?;
        let mut run = self.run();
        let args = args.iter().map(|a| run.import(a)).collect();
        match run.enter(f, args) {
            Ok(_) => Ok(true),
            Err(EvalError::GuardViolation(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl<'a> Run<'_, 'a> {
    fn import(&mut self, v: &IrValue) -> V {
        match v {
            IrValue::Int(i) => V::Int(*i),
            IrValue::Array(a) => match self.ev.strategy {
                ArrayStrategy::CopyOnWrite => V::Arr(Rc::new(a.clone())),
                ArrayStrategy::InPlace => {
                    self.arena.push(a.clone());
                    V::Handle(self.arena.len() - 1)
                }
            },
        }
    }

    fn export(&self, v: V, out: &mut Vec<IrValue>) -> EResult<()> {
        match v {
            V::Int(i) => out.push(IrValue::Int(i)),
            V::Arr(a) => out.push(IrValue::Array((*a).clone())),
            V::Handle(h) => out.push(IrValue::Array(self.arena[h].clone())),
            V::Multi(vs) => {
                for v in vs {
                    self.export(v, out)?;
                }
            }
            V::Bool(_) => return Err(EvalError::Malformed("boolean returned from a function".into())),
        }
        Ok(())
    }

    fn array<'s>(&'s self, v: &'s V) -> Option<&'s ArrayValue> {
        match v {
            V::Arr(a) => Some(a),
            V::Handle(h) => Some(&self.arena[*h]),
            _ => None,
        }
    }

    fn function(&self, name: &str) -> EResult<&'a IrFunction> {
        let program: &'a IrProgram = self.ev.program;
        program
            .function(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))
    }

    /// Binds parameters and checks the guard.
    fn enter(&mut self, f: &IrFunction, args: Vec<V>) -> EResult<Env> {
        if args.len() != f.params.len() {
            return Err(EvalError::Arity {
                fun: f.name.clone(),
                expected: f.params.len(),
                found: args.len(),
            });
        }
        let mut env = Env::new();
        for (p, v) in f.params.iter().zip(args) {
            let ok = match (p.ty, &v) {
                (IrType::Int(t), V::Int(i)) => i.ty() == t,
                (IrType::Array(t), _) => self.array(&v).is_some_and(|a| a.elem_type() == t),
                _ => false,
            };
            if !ok {
                return guard(format!("argument `{}` of `{}` is not of type {}", p.name, f.name, p.ty));
            }
            env.push((p.name.clone(), v));
        }
        for g in &f.extra_guards {
            if !self.test(g, &mut env)? {
                return guard(format!("guard of `{}` fails: {}", f.name, print_term(g)));
            }
        }
        Ok(env)
    }

    fn call(&mut self, name: &str, args: Vec<V>) -> EResult<V> {
        let f = self.function(name)?;
        let mut env = self.enter(f, args)?;
        if !f.is_loop {
            return self.value(&f.body, &mut env);
        }
        loop {
            match self.flow(&f.body, &mut env, Some(&f.name))? {
                Flow::Val(v) => return Ok(v),
                Flow::Recur(args) => {
                    self.steps += 1;
                    if self.steps > self.ev.step_cap {
                        return Err(EvalError::CapExceeded(self.ev.step_cap));
                    }
                    env = self.enter(f, args)?;
                }
            }
        }
    }

    fn lookup(&self, env: &Env, n: &str) -> EResult<V> {
        env.iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| EvalError::Malformed(format!("unbound variable `{n}`")))
    }

    fn value(&mut self, t: &IrTerm, env: &mut Env) -> EResult<V> {
        match self.flow(t, env, None)? {
            Flow::Val(v) => Ok(v),
            Flow::Recur(_) => unreachable!("recursion only flows out of tail positions"),
        }
    }

    fn int(&mut self, t: &IrTerm, env: &mut Env, ty: CIntType) -> EResult<IntegerValue> {
        match self.value(t, env)? {
            V::Int(i) if i.ty() == ty => Ok(i),
            V::Int(i) => guard(format!("`{}` is {} but {} is required", print_term(t), i.ty(), ty)),
            _ => guard(format!("`{}` is not an integer", print_term(t))),
        }
    }

    fn test(&mut self, t: &IrTerm, env: &mut Env) -> EResult<bool> {
        match self.value(t, env)? {
            V::Bool(b) => Ok(b),
            _ => guard(format!("`{}` is not a boolean", print_term(t))),
        }
    }

    fn bind(&mut self, vars: &[String], v: V, env: &mut Env) -> EResult<()> {
        match (vars, v) {
            ([x], v) => env.push((x.clone(), v)),
            (xs, V::Multi(vs)) if xs.len() == vs.len() => {
                env.extend(xs.iter().cloned().zip(vs));
            }
            _ => return Err(EvalError::Malformed(format!("cannot bind {vars:?}"))),
        }
        Ok(())
    }

    /// Evaluates `t`; a tail call to `looping` is returned as `Recur`.
    fn flow(&mut self, t: &IrTerm, env: &mut Env, looping: Option<&str>) -> EResult<Flow> {
        let params = self.ev.params;
        let wd = |e: crate::values::WellDefError| EvalError::GuardViolation(e.to_string());
        let v = match &t.kind {
            TermKind::LetDeclar { var, rhs, body } | TermKind::LetAssign { var, rhs, body } => {
                let v = self.value(rhs, env)?;
                let mark = env.len();
                env.push((var.clone(), v));
                let r = self.flow(body, env, looping);
                env.truncate(mark);
                return r;
            }
            TermKind::LetStmt { vars, rhs, body } => {
                let v = self.value(rhs, env)?;
                let mark = env.len();
                self.bind(vars, v, env)?;
                let r = self.flow(body, env, looping);
                env.truncate(mark);
                return r;
            }
            TermKind::If { test, then, els } => {
                let branch = if self.test(test, env)? { then } else { els };
                return self.flow(branch, env, looping);
            }
            TermKind::LoopCall { func, args } => {
                let vals = args.iter().map(|a| self.lookup(env, a)).collect::<EResult<Vec<_>>>()?;
                if Some(func.as_str()) == looping {
                    return Ok(Flow::Recur(vals));
                }
                self.call(func, vals)?
            }
            TermKind::Call { func, args } => {
                let vals = args.iter().map(|a| self.value(a, env)).collect::<EResult<Vec<_>>>()?;
                if Some(func.as_str()) == looping {
                    return Ok(Flow::Recur(vals));
                }
                self.call(func, vals)?
            }
            TermKind::Var(n) => self.lookup(env, n)?,
            TermKind::Const { ty, value } => V::Int(
                params
                    .make_int(*ty, *value)
                    .map_err(|e| EvalError::Malformed(e.to_string()))?,
            ),
            TermKind::Unary { op, ty, arg } => {
                let x = self.int(arg, env, *ty)?;
                V::Int(params.exec_unary(*op, x).map_err(wd)?)
            }
            TermKind::Binary {
                op,
                left_ty,
                right_ty,
                left,
                right,
            } => {
                let x = self.int(left, env, *left_ty)?;
                let y = self.int(right, env, *right_ty)?;
                V::Int(params.exec_binary(*op, x, y).map_err(wd)?)
            }
            TermKind::Convert { from, to, arg } => {
                let x = self.int(arg, env, *from)?;
                V::Int(params.convert(x, *to).map_err(wd)?)
            }
            TermKind::BoolFrom { ty, arg } => V::Bool(self.int(arg, env, *ty)?.to_bool()),
            TermKind::IntFromBool { ty, arg } => V::Int(IntegerValue::from_bool(self.test(arg, env)?, *ty)),
            TermKind::And(a, b) => V::Bool(self.test(a, env)? && self.test(b, env)?),
            TermKind::Or(a, b) => V::Bool(self.test(a, env)? || self.test(b, env)?),
            TermKind::CondExpr(inner) => return self.flow(inner, env, None),
            TermKind::ArrayRead {
                elem,
                index_ty,
                array,
                index,
            } => {
                let a = self.lookup(env, array)?;
                let i = self.int(index, env, *index_ty)?;
                let arr = self.typed_array(&a, array, *elem)?;
                V::Int(arr.read(i).map_err(|e| EvalError::GuardViolation(e.to_string()))?)
            }
            TermKind::ArrayWrite {
                elem,
                index_ty,
                array,
                index,
                value,
            } => {
                let a = self.lookup(env, array)?;
                let i = self.int(index, env, *index_ty)?;
                let x = self.int(value, env, *elem)?;
                self.typed_array(&a, array, *elem)?;
                let ae = |e: crate::values::ArrayError| EvalError::GuardViolation(e.to_string());
                match a {
                    V::Arr(rc) => V::Arr(Rc::new(rc.write(i, x).map_err(ae)?)),
                    V::Handle(h) => {
                        self.arena[h].write_in_place(i, x).map_err(ae)?;
                        V::Handle(h)
                    }
                    _ => unreachable!(),
                }
            }
            TermKind::ArrayLength { elem, array } => {
                let a = self.lookup(env, array)?;
                let len = self.typed_array(&a, array, *elem)?.len() as i128;
                V::Int(
                    params
                        .make_int(CIntType::SINT, len)
                        .map_err(|e| EvalError::GuardViolation(e.to_string()))?,
                )
            }
            TermKind::Mv(items) => V::Multi(items.iter().map(|i| self.value(i, env)).collect::<EResult<_>>()?),
            TermKind::RetVal(e) => self.value(e, env)?,
        };
        Ok(Flow::Val(v))
    }

    fn typed_array<'s>(&'s self, v: &'s V, name: &str, elem: CIntType) -> EResult<&'s ArrayValue> {
        match self.array(v) {
            Some(a) if a.elem_type() == elem => Ok(a),
            Some(a) => guard(format!("`{name}` is a {} array, not {}", a.elem_type(), elem)),
            None => guard(format!("`{name}` is not an array")),
        }
    }
}
