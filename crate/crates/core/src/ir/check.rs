//! Recognizes the representable subset: bottom-up call order, tail-recursive
//! loops, single-threaded arrays, and `let` right-hand sides whose control
//! paths end in the bound variables.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{print_term, IrFunction, IrProgram, IrTerm, IrType, Span, TermKind};
use crate::ast::validate_ident;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrRule {
    Duplicate,
    Identifier,
    CallOrder,
    LoopShape,
    SingleThreaded,
    BindingPaths,
    BooleanTest,
    Scope,
    Outputs,
    Expression,
}

impl fmt::Display for IrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IrRule::Duplicate => "duplicate definition",
            IrRule::Identifier => "identifier",
            IrRule::CallOrder => "call order",
            IrRule::LoopShape => "loop shape",
            IrRule::SingleThreaded => "single-threaded arrays",
            IrRule::BindingPaths => "binding paths",
            IrRule::BooleanTest => "boolean test",
            IrRule::Scope => "scope",
            IrRule::Outputs => "outputs",
            IrRule::Expression => "expression",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{span}: in `{function}`: {rule}: {msg}")]
pub struct IrError {
    pub function: String,
    pub span: Span,
    pub rule: IrRule,
    pub msg: String,
}

/// What a function hands back: for non-loop functions an optional result
/// plus the affected array parameters, for loops the affected formals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutputNames {
    pub has_result: bool,
    pub names: Vec<String>,
}

type CResult<T> = Result<T, IrError>;

fn error<T>(f: &IrFunction, span: Span, rule: IrRule, msg: impl Into<String>) -> CResult<T> {
    Err(IrError {
        function: f.name.clone(),
        span,
        rule,
        msg: msg.into(),
    })
}

/// Output shape of `f`, checked to agree on every control path.
pub fn output_names(f: &IrFunction) -> CResult<OutputNames> {
    let mut found: Option<(OutputNames, Span)> = None;
    collect_outputs(f, &f.body, &mut found)?;
    match found {
        Some((o, _)) => Ok(o),
        None => error(f, f.span, IrRule::LoopShape, "loop has no exit path"),
    }
}

fn collect_outputs(f: &IrFunction, t: &IrTerm, found: &mut Option<(OutputNames, Span)>) -> CResult<()> {
    let here = match &t.kind {
        TermKind::If { then, els, .. } => {
            collect_outputs(f, then, found)?;
            return collect_outputs(f, els, found);
        }
        TermKind::LetDeclar { body, .. } | TermKind::LetAssign { body, .. } | TermKind::LetStmt { body, .. } => {
            return collect_outputs(f, body, found);
        }
        TermKind::LoopCall { func, .. } if f.is_loop && *func == f.name => return Ok(()),
        _ if f.is_loop => loop_exit(f, t)?,
        _ => function_exit(f, t)?,
    };
    match found {
        None => *found = Some((here, t.span)),
        Some((prev, at)) if *prev != here => {
            return error(
                f,
                t.span,
                IrRule::Outputs,
                format!(
                    "returns {} here but {} at {at}",
                    describe(prev),
                    describe(&here)
                ),
            )
        }
        Some(_) => {}
    }
    Ok(())
}

fn describe(o: &OutputNames) -> String {
    let mut parts = Vec::new();
    if o.has_result {
        parts.push("a result".to_string());
    }
    parts.extend(o.names.iter().map(|n| format!("`{n}`")));
    if parts.is_empty() {
        "nothing".into()
    } else {
        parts.join(", ")
    }
}

fn distinct(f: &IrFunction, t: &IrTerm, names: &[String]) -> CResult<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return error(f, t.span, IrRule::Outputs, format!("`{n}` returned twice"));
        }
    }
    Ok(())
}

fn loop_exit(f: &IrFunction, t: &IrTerm) -> CResult<OutputNames> {
    let names: Vec<String> = match &t.kind {
        TermKind::Var(v) => vec![v.clone()],
        TermKind::Mv(items) => {
            let mut names = Vec::new();
            for it in items {
                match &it.kind {
                    TermKind::Var(v) => names.push(v.clone()),
                    _ => return error(f, it.span, IrRule::LoopShape, "loop exits must return formals"),
                }
            }
            names
        }
        _ => {
            return error(
                f,
                t.span,
                IrRule::LoopShape,
                format!(
                    "every path of a loop must end in a recursive call or in formals, found `{}`",
                    print_term(t)
                ),
            )
        }
    };
    for n in &names {
        if f.param(n).is_none() {
            return error(f, t.span, IrRule::LoopShape, format!("loop exit returns `{n}`, which is not a formal"));
        }
    }
    distinct(f, t, &names)?;
    Ok(OutputNames {
        has_result: false,
        names,
    })
}

fn is_array_param(f: &IrFunction, n: &str) -> bool {
    matches!(f.param(n), Some(p) if matches!(p.ty, IrType::Array(_)))
}

fn function_exit(f: &IrFunction, t: &IrTerm) -> CResult<OutputNames> {
    match &t.kind {
        TermKind::Var(v) if is_array_param(f, v) => Ok(OutputNames {
            has_result: false,
            names: vec![v.clone()],
        }),
        TermKind::Mv(items) => {
            let mut has_result = false;
            let mut names = Vec::new();
            for (i, it) in items.iter().enumerate() {
                match &it.kind {
                    TermKind::RetVal(_) if i == 0 => has_result = true,
                    TermKind::Var(v) if is_array_param(f, v) => names.push(v.clone()),
                    _ => {
                        return error(
                            f,
                            it.span,
                            IrRule::Outputs,
                            "`mv` holds an optional leading `(retval ...)` followed by array parameters",
                        )
                    }
                }
            }
            distinct(f, t, &names)?;
            Ok(OutputNames { has_result, names })
        }
        TermKind::RetVal(_) => error(f, t.span, IrRule::Outputs, "`retval` only appears first in an `mv`"),
        _ => Ok(OutputNames {
            has_result: true,
            names: vec![],
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Array,
}

#[derive(Clone, Default)]
struct Scope(Vec<(String, Kind)>);

impl Scope {
    fn get(&self, n: &str) -> Option<Kind> {
        self.0.iter().rev().find(|(m, _)| m == n).map(|(_, k)| *k)
    }

    fn add(&mut self, n: &str, k: Kind) {
        self.0.push((n.to_string(), k));
    }
}

struct Checker<'a> {
    p: &'a IrProgram,
    f: &'a IrFunction,
    /// Output shapes of the functions preceding `f`.
    outputs: &'a HashMap<String, OutputNames>,
    /// Variables the body updates through `assign` or statement bindings.
    updated: Vec<(String, Span)>,
}

/// Checks a parsed program against the representable subset.
pub fn check_ir(p: &IrProgram) -> CResult<()> {
    let mut outputs: HashMap<String, OutputNames> = HashMap::new();
    for f in &p.functions {
        if outputs.contains_key(&f.name) {
            return error(f, f.span, IrRule::Duplicate, format!("function `{}` defined twice", f.name));
        }
        if !f.is_loop {
            if let Err(e) = validate_ident(&f.name) {
                return error(f, f.span, IrRule::Identifier, e.to_string());
            }
        }
        let mut scope = Scope::default();
        for prm in &f.params {
            if let Err(e) = validate_ident(&prm.name) {
                return error(f, f.span, IrRule::Identifier, e.to_string());
            }
            if scope.get(&prm.name).is_some() {
                return error(f, f.span, IrRule::Duplicate, format!("parameter `{}` repeated", prm.name));
            }
            let k = match prm.ty {
                IrType::Int(_) => Kind::Int,
                IrType::Array(_) => Kind::Array,
            };
            scope.add(&prm.name, k);
        }
        let mut recursive = false;
        super::walk(&f.body, &mut |t| match &t.kind {
            TermKind::Call { func, .. } | TermKind::LoopCall { func, .. } if *func == f.name => recursive = true,
            _ => {}
        });
        if recursive != f.is_loop {
            return error(f, f.span, IrRule::LoopShape, "loop flag disagrees with the presence of recursive calls");
        }
        let mut cx = Checker {
            p,
            f,
            outputs: &outputs,
            updated: Vec::new(),
        };
        for g in &f.extra_guards {
            cx.test(g, &scope, true)?;
        }
        cx.tail(&f.body, &scope)?;
        let shape = output_names(f)?;
        for (n, span) in &cx.updated {
            let must_return = if f.is_loop {
                f.param(n).is_some()
            } else {
                is_array_param(f, n)
            };
            if must_return && !shape.names.contains(n) {
                return error(
                    f,
                    *span,
                    IrRule::Outputs,
                    format!("`{n}` is modified but not among the function's outputs"),
                );
            }
        }
        outputs.insert(f.name.clone(), shape);
    }
    Ok(())
}

impl Checker<'_> {
    fn err<T>(&self, t: &IrTerm, rule: IrRule, msg: impl Into<String>) -> CResult<T> {
        error(self.f, t.span, rule, msg)
    }

    fn var(&self, t: &IrTerm, n: &str, scope: &Scope) -> CResult<Kind> {
        match scope.get(n) {
            Some(k) => Ok(k),
            None => self.err(t, IrRule::Scope, format!("unbound variable `{n}`")),
        }
    }

    fn int_var(&self, t: &IrTerm, n: &str, scope: &Scope) -> CResult<()> {
        match self.var(t, n, scope)? {
            Kind::Int => Ok(()),
            Kind::Array => self.err(
                t,
                IrRule::SingleThreaded,
                format!("array `{n}` used as a value; arrays may only be read, written, passed, or returned"),
            ),
        }
    }

    fn array_var(&self, t: &IrTerm, n: &str, scope: &Scope) -> CResult<()> {
        match self.var(t, n, scope)? {
            Kind::Array => Ok(()),
            Kind::Int => self.err(t, IrRule::Expression, format!("`{n}` is not an array")),
        }
    }

    /// Callee lookup honoring bottom-up order.
    fn callee(&self, t: &IrTerm, g: &str, want_loop: bool) -> CResult<&IrFunction> {
        if g == self.f.name {
            return self.err(t, IrRule::LoopShape, "recursive call outside a tail position");
        }
        let Some(callee) = self.p.function(g) else {
            return self.err(t, IrRule::CallOrder, format!("call of undefined function `{g}`"));
        };
        if !self.outputs.contains_key(g) {
            return self.err(t, IrRule::CallOrder, format!("`{g}` must be defined before its callers"));
        }
        if callee.is_loop != want_loop {
            let msg = if want_loop {
                format!("`{g}` is not a loop function")
            } else {
                format!("loop function `{g}` may only be bound with `let` or `mv-let`")
            };
            return self.err(t, IrRule::BindingPaths, msg);
        }
        Ok(callee)
    }

    fn call_args(&self, t: &IrTerm, callee: &IrFunction, args: &[IrTerm], scope: &Scope) -> CResult<()> {
        if args.len() != callee.params.len() {
            return self.err(
                t,
                IrRule::Expression,
                format!("`{}` takes {} arguments, got {}", callee.name, callee.params.len(), args.len()),
            );
        }
        let mut arrays = HashSet::new();
        for a in args {
            match &a.kind {
                TermKind::Var(n) if scope.get(n) == Some(Kind::Array) => {
                    if !arrays.insert(n.as_str()) {
                        return self.err(a, IrRule::SingleThreaded, format!("array `{n}` passed twice"));
                    }
                }
                _ => self.expr(a, scope, false)?,
            }
        }
        Ok(())
    }

    /// A call in value position: the callee must return just a result.
    fn value_call(&self, t: &IrTerm, g: &str, args: &[IrTerm], scope: &Scope) -> CResult<()> {
        let callee = self.callee(t, g, false)?;
        self.call_args(t, callee, args, scope)?;
        let o = &self.outputs[g];
        if !o.has_result || !o.names.is_empty() {
            return self.err(
                t,
                IrRule::SingleThreaded,
                format!("`{g}` returns {}; bind it with `let` or `mv-let` over its arrays", describe(o)),
            );
        }
        Ok(())
    }

    fn value_rhs(&self, t: &IrTerm, scope: &Scope) -> CResult<()> {
        match &t.kind {
            TermKind::Call { func, args } => self.value_call(t, func, args, scope),
            _ => self.expr(t, scope, false),
        }
    }

    fn note_update(&mut self, n: &str, span: Span) {
        self.updated.push((n.to_string(), span));
    }

    /// Terms in tail position of the function body.
    fn tail(&mut self, t: &IrTerm, scope: &Scope) -> CResult<()> {
        if self.binding(t, scope, &mut |cx, body, scope| cx.tail(body, scope))? {
            return Ok(());
        }
        match &t.kind {
            TermKind::If { test, then, els } => {
                self.test(test, scope, false)?;
                self.tail(then, scope)?;
                self.tail(els, scope)
            }
            TermKind::LoopCall { func, args } if self.f.is_loop && *func == self.f.name => {
                let formals: Vec<&String> = self.f.params.iter().map(|p| &p.name).collect();
                if args.iter().collect::<Vec<_>>() != formals {
                    return self.err(t, IrRule::LoopShape, "recursive call must pass the formals unchanged, in order");
                }
                Ok(())
            }
            TermKind::Mv(items) => {
                for it in items {
                    match &it.kind {
                        TermKind::RetVal(e) => self.expr(e, scope, false)?,
                        TermKind::Var(n) => {
                            self.var(it, n, scope)?;
                        }
                        _ => self.expr(it, scope, false)?,
                    }
                }
                Ok(())
            }
            TermKind::Var(n) => self.var(t, n, scope).map(|_| ()),
            TermKind::Call { func, args } => self.value_call(t, func, args, scope),
            _ => self.expr(t, scope, false),
        }
    }

    /// Handles the three `let` forms, continuing into the body with `k`.
    /// Returns false if `t` is not a binding.
    fn binding(
        &mut self,
        t: &IrTerm,
        scope: &Scope,
        k: &mut dyn FnMut(&mut Self, &IrTerm, &Scope) -> CResult<()>,
    ) -> CResult<bool> {
        match &t.kind {
            TermKind::LetDeclar { var, rhs, body } => {
                if let Err(e) = validate_ident(var) {
                    return self.err(t, IrRule::Identifier, e.to_string());
                }
                if scope.get(var).is_some() {
                    return self.err(t, IrRule::Scope, format!("`{var}` is already bound; use `assign` to update it"));
                }
                self.value_rhs(rhs, scope)?;
                let mut inner = scope.clone();
                inner.add(var, Kind::Int);
                k(self, body, &inner)?;
            }
            TermKind::LetAssign { var, rhs, body } => {
                match &rhs.kind {
                    TermKind::ArrayWrite { .. } => self.array_write(rhs, std::slice::from_ref(var), scope)?,
                    _ => {
                        self.int_var(t, var, scope)?;
                        self.value_rhs(rhs, scope)?;
                    }
                }
                self.note_update(var, t.span);
                k(self, body, scope)?;
            }
            TermKind::LetStmt { vars, rhs, body } => {
                let mut seen = HashSet::new();
                for v in vars {
                    self.var(t, v, scope)?;
                    if !seen.insert(v) {
                        return self.err(t, IrRule::BindingPaths, format!("`{v}` bound twice"));
                    }
                    self.note_update(v, t.span);
                }
                self.stmt_rhs(rhs, vars, scope)?;
                k(self, body, scope)?;
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn array_write(&self, t: &IrTerm, vars: &[String], scope: &Scope) -> CResult<()> {
        let TermKind::ArrayWrite { array, index, value, .. } = &t.kind else {
            unreachable!()
        };
        if vars != std::slice::from_ref(array) {
            return self.err(
                t,
                IrRule::SingleThreaded,
                format!("a write to array `{array}` must rebind `{array}`"),
            );
        }
        self.array_var(t, array, scope)?;
        self.expr(index, scope, false)?;
        self.expr(value, scope, false)
    }

    fn stmt_rhs(&mut self, t: &IrTerm, vars: &[String], scope: &Scope) -> CResult<()> {
        match &t.kind {
            TermKind::ArrayWrite { .. } => self.array_write(t, vars, scope),
            TermKind::If { test, then, els } => {
                self.test(test, scope, false)?;
                self.bound_paths(then, vars, scope)?;
                self.bound_paths(els, vars, scope)
            }
            TermKind::LoopCall { func, args } => {
                let callee = self.callee(t, func, true)?;
                let formals: Vec<&String> = callee.params.iter().map(|p| &p.name).collect();
                if args.iter().collect::<Vec<_>>() != formals {
                    return self.err(
                        t,
                        IrRule::LoopShape,
                        format!("loop `{func}` must be called on its formals, in order"),
                    );
                }
                for (a, prm) in args.iter().zip(&callee.params) {
                    let k = self.var(t, a, scope)?;
                    let want = match prm.ty {
                        IrType::Int(_) => Kind::Int,
                        IrType::Array(_) => Kind::Array,
                    };
                    if k != want {
                        return self.err(t, IrRule::Expression, format!("`{a}` has the wrong kind for `{func}`"));
                    }
                }
                let o = &self.outputs[func.as_str()];
                if o.names != vars {
                    return self.err(
                        t,
                        IrRule::BindingPaths,
                        format!("loop `{func}` returns {}; bind exactly those", describe(o)),
                    );
                }
                Ok(())
            }
            TermKind::Call { func, args } => {
                let callee = self.callee(t, func, false)?;
                self.call_args(t, callee, args, scope)?;
                let o = &self.outputs[func.as_str()];
                if o.has_result {
                    return self.err(
                        t,
                        IrRule::BindingPaths,
                        format!("`{func}` returns a result; bind it with `declar` or `assign`"),
                    );
                }
                let mut mapped = Vec::new();
                for n in &o.names {
                    let k = callee.params.iter().position(|p| p.name == *n).unwrap();
                    match &args[k].kind {
                        TermKind::Var(a) => mapped.push(a.clone()),
                        _ => return self.err(&args[k], IrRule::SingleThreaded, "array arguments must be variables"),
                    }
                }
                if mapped != vars {
                    return self.err(
                        t,
                        IrRule::SingleThreaded,
                        format!("`{func}` returns the arrays passed as {mapped:?}; rebind exactly those"),
                    );
                }
                Ok(())
            }
            _ => self.err(
                t,
                IrRule::BindingPaths,
                "a binding without `declar` or `assign` must bind an `if`, a loop call, a call, or an array write",
            ),
        }
    }

    /// Every control path of `t` must end in exactly `vars`.
    fn bound_paths(&mut self, t: &IrTerm, vars: &[String], scope: &Scope) -> CResult<()> {
        if self.binding(t, scope, &mut |cx, body, scope| cx.bound_paths(body, vars, scope))? {
            return Ok(());
        }
        match &t.kind {
            TermKind::If { test, then, els } => {
                self.test(test, scope, false)?;
                self.bound_paths(then, vars, scope)?;
                self.bound_paths(els, vars, scope)
            }
            TermKind::Var(v) if vars == std::slice::from_ref(v) => Ok(()),
            TermKind::Mv(items)
                if items.len() == vars.len()
                    && items.iter().zip(vars).all(|(i, v)| matches!(&i.kind, TermKind::Var(n) if n == v)) =>
            {
                Ok(())
            }
            _ => self.err(
                t,
                IrRule::BindingPaths,
                format!("this path must end in the bound variables ({})", vars.join(" ")),
            ),
        }
    }

    fn test(&self, t: &IrTerm, scope: &Scope, guard: bool) -> CResult<()> {
        match &t.kind {
            TermKind::BoolFrom { arg, .. } => self.expr(arg, scope, guard),
            TermKind::And(a, b) | TermKind::Or(a, b) => {
                self.test(a, scope, guard)?;
                self.test(b, scope, guard)
            }
            _ => self.err(
                t,
                IrRule::BooleanTest,
                format!("expected a boolean test (`boolean-from-<type>`, `and`, `or`), found `{}`", print_term(t)),
            ),
        }
    }

    /// Pure integer-valued term. Array lengths are allowed only in guards.
    fn expr(&self, t: &IrTerm, scope: &Scope, guard: bool) -> CResult<()> {
        match &t.kind {
            TermKind::Var(n) => self.int_var(t, n, scope),
            TermKind::Const { .. } => Ok(()),
            TermKind::Unary { arg, .. } | TermKind::Convert { arg, .. } => self.expr(arg, scope, guard),
            TermKind::Binary { left, right, .. } => {
                self.expr(left, scope, guard)?;
                self.expr(right, scope, guard)
            }
            TermKind::IntFromBool { arg, .. } => self.test(arg, scope, guard),
            TermKind::CondExpr(inner) => match &inner.kind {
                TermKind::If { test, then, els } => {
                    self.test(test, scope, guard)?;
                    self.expr(then, scope, guard)?;
                    self.expr(els, scope, guard)
                }
                _ => self.err(t, IrRule::Expression, "`condexpr` must wrap an `if`"),
            },
            TermKind::ArrayRead { array, index, .. } => {
                self.array_var(t, array, scope)?;
                self.expr(index, scope, guard)
            }
            TermKind::ArrayLength { array, .. } if guard => self.array_var(t, array, scope),
            TermKind::ArrayLength { .. } => self.err(t, IrRule::Expression, "array lengths may only appear in guards"),
            TermKind::Call { .. } => self.err(
                t,
                IrRule::Expression,
                "a call must be a whole `declar`/`assign` right-hand side or the function result",
            ),
            TermKind::LoopCall { func, .. } if *func == self.f.name => {
                self.err(t, IrRule::LoopShape, "recursive call outside a tail position")
            }
            TermKind::LoopCall { .. } => self.err(t, IrRule::BindingPaths, "loop calls must be bound with `let` or `mv-let`"),
            TermKind::ArrayWrite { .. } => self.err(t, IrRule::SingleThreaded, "array writes must rebind the array"),
            TermKind::If { .. } => self.err(
                t,
                IrRule::Expression,
                "an `if` used as a value must be wrapped in `condexpr`",
            ),
            _ => self.err(t, IrRule::Expression, format!("not an integer expression: `{}`", print_term(t))),
        }
    }
}
