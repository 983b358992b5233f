//! Translation of checked IR programs into C translation units.

mod fuel;

use std::collections::BTreeMap;

use thiserror::Error;

pub use fuel::{fuel_bound, fuel_bounds, FuelBound};

use crate::ast::{is_const_type, syntax_check, Block, CType, Expr, FunDef, Ident, Param, Stmt, SyntaxError, TransUnit};
use crate::ir::{check_ir, output_names, print_term, IrError, IrFunction, IrProgram, IrTerm, IrType, Span, TermKind};
use crate::statics::{check_transunit, StaticError};
use crate::values::{BinaryOp, CIntType, ImplParams, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslationError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("{span}: in `{function}`: {msg}{}", pattern.map(|p| format!(" (expected {p})")).unwrap_or_default())]
    Term {
        function: String,
        span: Span,
        msg: String,
        /// The closest supported form.
        pattern: Option<&'static str>,
    },
    #[error("generated code is malformed: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("generated code is not well-formed: {0}")]
    Static(#[from] StaticError),
}

/// Output shape of an IR function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    /// Result type; `None` for void functions and for loops.
    pub result: Option<CType>,
    /// Affected array parameters, in `mv` order.
    pub arrays: Vec<String>,
    /// Affected formals of a loop, in `mv` order. Empty for non-loops.
    pub vars: Vec<String>,
}

/// The `while` statement a loop function stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopCode {
    pub test: Expr,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub tu: TransUnit,
    /// Every function of the program, loops included.
    pub outputs: BTreeMap<String, Outputs>,
    pub loops: BTreeMap<String, LoopCode>,
}

/// Output shape of `f` within program `p`.
pub fn affected_outputs(f: &IrFunction, p: &IrProgram, params: &ImplParams) -> Result<Outputs, TranslationError> {
    let t = translate(p, params)?;
    Ok(t.outputs[&f.name].clone())
}

const P_DECLAR: &str = "(let ((VAR (declar TERM))) BODY)";
const P_ASSIGN: &str = "(let ((VAR (assign TERM))) BODY)";
const P_LOOP: &str = "(if TEST (let* (...) (LOOP FORMALS...)) (mv FORMALS...))";
const P_TEST: &str = "(boolean-from-<type> TERM), (and TEST TEST) or (or TEST TEST)";
const P_CONST: &str = "(<type>-dec-const N) with <type> of rank int or higher";
const P_EXPR: &str = "an integer operation, variable, constant, conversion, array read, or condexpr";

type TResult<T> = Result<T, TranslationError>;

/// Type context: C types of the variables in scope.
#[derive(Debug, Clone, Default)]
pub struct TypeCtx(BTreeMap<String, CType>);

impl TypeCtx {
    pub fn get(&self, n: &str) -> Option<CType> {
        self.0.get(n).copied()
    }

    fn insert(&mut self, n: &str, t: CType) {
        self.0.insert(n.to_string(), t);
    }
}

fn ctype(t: IrType) -> CType {
    match t {
        IrType::Int(t) => CType::Int(t),
        IrType::Array(t) => CType::Pointer(t),
    }
}

/// How a statement sequence ends.
enum Tail<'a> {
    /// Function body: a result and/or arrays.
    Function,
    /// Branch of a bound `if`, which ends by naming the bound variables.
    Bound,
    /// Recursive branch of a loop: a recursive call.
    Loop(&'a IrFunction),
}

struct Gen<'a> {
    p: &'a IrProgram,
    params: &'a ImplParams,
    f: &'a IrFunction,
    outputs: &'a BTreeMap<String, Outputs>,
    loops: &'a BTreeMap<String, LoopCode>,
}

fn ident(n: &str) -> Ident {
    Ident::new_unchecked(n)
}

/// Translates a program. Runs `check_ir` first and the C static checker on
/// the result.
pub fn translate(p: &IrProgram, params: &ImplParams) -> TResult<Translation> {
    check_ir(p)?;
    let mut outputs: BTreeMap<String, Outputs> = BTreeMap::new();
    let mut loops: BTreeMap<String, LoopCode> = BTreeMap::new();
    let mut fundefs = Vec::new();
    for f in &p.functions {
        let names = output_names(f)?;
        let g = Gen {
            p,
            params,
            f,
            outputs: &outputs,
            loops: &loops,
        };
        let mut ctx = TypeCtx::default();
        for prm in &f.params {
            ctx.insert(&prm.name, ctype(prm.ty));
        }
        if f.is_loop {
            let code = g.loop_code(&ctx)?;
            loops.insert(f.name.clone(), code);
            outputs.insert(
                f.name.clone(),
                Outputs {
                    result: None,
                    arrays: vec![],
                    vars: names.names,
                },
            );
            continue;
        }
        let mut body = Vec::new();
        let result = g.stmts(&f.body, &mut ctx, &Tail::Function, &mut body)?;
        let ret = match result {
            Some(t) => CType::Int(t),
            None => CType::Void,
        };
        fundefs.push(FunDef {
            name: ident(&f.name),
            params: f
                .params
                .iter()
                .map(|prm| Param {
                    name: ident(&prm.name),
                    ty: ctype(prm.ty),
                })
                .collect(),
            ret,
            body: Block::new(body),
        });
        outputs.insert(
            f.name.clone(),
            Outputs {
                result: result.map(CType::Int),
                arrays: names.names,
                vars: vec![],
            },
        );
    }
    let tu = TransUnit { fundefs };
    syntax_check(&tu)?;
    check_transunit(&tu, params)?;
    Ok(Translation { tu, outputs, loops })
}

impl Gen<'_> {
    fn err<T>(&self, t: &IrTerm, msg: impl Into<String>, pattern: Option<&'static str>) -> TResult<T> {
        Err(TranslationError::Term {
            function: self.f.name.clone(),
            span: t.span,
            msg: msg.into(),
            pattern,
        })
    }

    fn int_var(&self, t: &IrTerm, n: &str, ctx: &TypeCtx) -> TResult<CIntType> {
        match ctx.get(n) {
            Some(CType::Int(ty)) => Ok(ty),
            Some(other) => self.err(t, format!("`{n}` has type {other}, not an integer type"), None),
            None => self.err(t, format!("unbound variable `{n}`"), None),
        }
    }

    fn want(&self, t: &IrTerm, found: CIntType, expected: CIntType, what: &str) -> TResult<()> {
        if found != expected {
            return self.err(
                t,
                format!("{what} has type {found} but the operation expects {expected}"),
                None,
            );
        }
        Ok(())
    }

    /// Pure term to expression, with its C type.
    fn expr(&self, t: &IrTerm, ctx: &TypeCtx) -> TResult<(Expr, CIntType)> {
        let params = self.params;
        match &t.kind {
            TermKind::Var(n) => Ok((Expr::Var(ident(n)), self.int_var(t, n, ctx)?)),
            TermKind::Const { ty, value } => {
                if !is_const_type(*ty) {
                    return self.err(t, format!("C has no constants of type {ty}"), Some(P_CONST));
                }
                if !params.in_range(*ty, *value) {
                    return self.err(t, format!("constant {value} does not fit {ty}"), Some(P_CONST));
                }
                Ok((Expr::constant(*value, *ty), *ty))
            }
            TermKind::Unary { op, ty, arg } => {
                let (e, at) = self.expr(arg, ctx)?;
                self.want(arg, at, *ty, "the operand")?;
                Ok((Expr::unary(*op, e), params.unary_result_type(*op, *ty)))
            }
            TermKind::Binary {
                op,
                left_ty,
                right_ty,
                left,
                right,
            } => {
                let (l, lt) = self.expr(left, ctx)?;
                self.want(left, lt, *left_ty, "the left operand")?;
                let (r, rt) = self.expr(right, ctx)?;
                self.want(right, rt, *right_ty, "the right operand")?;
                Ok((Expr::binary(*op, l, r), params.binary_result_type(*op, lt, rt)))
            }
            TermKind::Convert { from, to, arg } => {
                let (e, at) = self.expr(arg, ctx)?;
                self.want(arg, at, *from, "the converted value")?;
                Ok((Expr::cast(*to, e), *to))
            }
            TermKind::IntFromBool { ty, arg } => {
                let e = self.bool_value(arg, ctx)?;
                let e = if *ty == CIntType::SINT { e } else { Expr::cast(*ty, e) };
                Ok((e, *ty))
            }
            TermKind::CondExpr(inner) => {
                let TermKind::If { test, then, els } = &inner.kind else {
                    return self.err(t, "`condexpr` must wrap an `if`", None);
                };
                let c = self.test(test, ctx)?;
                let (a, at) = self.expr(then, ctx)?;
                let (b, bt) = self.expr(els, ctx)?;
                if at != bt {
                    return self.err(t, format!("conditional branches have types {at} and {bt}"), None);
                }
                Ok((Expr::cond(c, a, b), at))
            }
            TermKind::ArrayRead {
                elem,
                index_ty,
                array,
                index,
            } => {
                match ctx.get(array) {
                    Some(CType::Pointer(e)) if e == *elem => {}
                    other => {
                        return self.err(
                            t,
                            format!("`{array}` is {}, not a {elem} array", other.map_or("unbound".into(), |c| c.to_string())),
                            None,
                        )
                    }
                }
                let (i, it) = self.expr(index, ctx)?;
                self.want(index, it, *index_ty, "the index")?;
                Ok((Expr::index(&ident(array), i), *elem))
            }
            _ => self.err(t, format!("`{}` is not an expression", print_term(t)), Some(P_EXPR)),
        }
    }

    /// A boolean term in a context needing an `int` that is 0 or 1.
    fn bool_value(&self, t: &IrTerm, ctx: &TypeCtx) -> TResult<Expr> {
        match &t.kind {
            TermKind::And(..) | TermKind::Or(..) => self.test(t, ctx),
            TermKind::BoolFrom { ty, arg } => {
                let (e, at) = self.expr(arg, ctx)?;
                self.want(arg, at, *ty, "the tested value")?;
                let zero_one = at == CIntType::SINT
                    && match &e {
                        Expr::Binary(op, ..) => op.class() == crate::values::OpClass::Relational,
                        Expr::Unary(UnaryOp::LogNot, _) | Expr::LogAnd(..) | Expr::LogOr(..) => true,
                        _ => false,
                    };
                if zero_one {
                    Ok(e)
                } else {
                    let zero_ty = if is_const_type(at) { at } else { CIntType::SINT };
                    Ok(Expr::binary(BinaryOp::Ne, e, Expr::constant(0, zero_ty)))
                }
            }
            _ => self.err(t, format!("`{}` is not a boolean test", print_term(t)), Some(P_TEST)),
        }
    }

    /// A boolean term in a test position, where any nonzero value is true.
    fn test(&self, t: &IrTerm, ctx: &TypeCtx) -> TResult<Expr> {
        match &t.kind {
            TermKind::BoolFrom { ty, arg } => {
                let (e, at) = self.expr(arg, ctx)?;
                self.want(arg, at, *ty, "the tested value")?;
                Ok(e)
            }
            TermKind::And(a, b) => Ok(Expr::logand(self.test(a, ctx)?, self.test(b, ctx)?)),
            TermKind::Or(a, b) => Ok(Expr::logor(self.test(a, ctx)?, self.test(b, ctx)?)),
            _ => self.err(t, format!("`{}` is not a boolean test", print_term(t)), Some(P_TEST)),
        }
    }

    /// A call to a non-loop function, with its result type if any.
    fn call(&self, func: &str, args: &[IrTerm], ctx: &TypeCtx) -> TResult<(Expr, Option<CIntType>)> {
        let callee = self.p.function(func).expect("checked");
        let mut out = Vec::new();
        for (a, prm) in args.iter().zip(&callee.params) {
            let (e, ty) = match &a.kind {
                TermKind::Var(n) if matches!(ctx.get(n), Some(CType::Pointer(_))) => {
                    (Expr::Var(ident(n)), ctx.get(n).unwrap())
                }
                _ => {
                    let (e, ty) = self.expr(a, ctx)?;
                    (e, CType::Int(ty))
                }
            };
            if ty != ctype(prm.ty) {
                return self.err(
                    a,
                    format!("argument `{}` of `{func}` has type {ty}, expected {}", prm.name, ctype(prm.ty)),
                    None,
                );
            }
            out.push(e);
        }
        let result = match self.outputs[func].result {
            Some(CType::Int(t)) => Some(t),
            _ => None,
        };
        Ok((Expr::Call(ident(func), out), result))
    }

    /// Right-hand side of `declar`/`assign`: a pure term or a whole call.
    fn value_rhs(&self, t: &IrTerm, ctx: &TypeCtx) -> TResult<(Expr, CIntType)> {
        match &t.kind {
            TermKind::Call { func, args } => match self.call(func, args, ctx)? {
                (e, Some(ty)) => Ok((e, ty)),
                (_, None) => self.err(t, format!("`{func}` returns no value"), None),
            },
            _ => self.expr(t, ctx),
        }
    }

    /// Translates `t` into statements appended to `out`. For function tails
    /// returns the result type (`None` for void).
    fn stmts(&self, t: &IrTerm, ctx: &mut TypeCtx, tail: &Tail, out: &mut Vec<Stmt>) -> TResult<Option<CIntType>> {
        match &t.kind {
            TermKind::LetDeclar { var, rhs, body } => {
                let (e, ty) = self.value_rhs(rhs, ctx)?;
                out.push(Stmt::Declare {
                    ty,
                    name: ident(var),
                    init: e,
                });
                ctx.insert(var, CType::Int(ty));
                self.stmts(body, ctx, tail, out)
            }
            TermKind::LetAssign { var, rhs, body } => {
                if let TermKind::ArrayWrite { .. } = rhs.kind {
                    out.push(self.array_write(rhs, ctx)?);
                } else {
                    let vt = self.int_var(t, var, ctx)?;
                    let (e, ty) = self.value_rhs(rhs, ctx)?;
                    if ty != vt {
                        return self.err(
                            rhs,
                            format!("assigning a value of type {ty} to `{var}` of type {vt}"),
                            Some(P_ASSIGN),
                        );
                    }
                    out.push(Stmt::Assign { name: ident(var), rhs: e });
                }
                self.stmts(body, ctx, tail, out)
            }
            TermKind::LetStmt { rhs, body, .. } => {
                self.bound_stmt(rhs, ctx, out)?;
                self.stmts(body, ctx, tail, out)
            }
            TermKind::If { test, then, els } => {
                let c = self.test(test, ctx)?;
                let mut a = Vec::new();
                let ra = self.stmts(then, &mut ctx.clone(), tail, &mut a)?;
                let mut b = Vec::new();
                let rb = self.stmts(els, &mut ctx.clone(), tail, &mut b)?;
                if ra != rb {
                    return self.err(
                        t,
                        format!(
                            "branches return {} and {}",
                            ra.map_or("nothing".into(), |t| t.to_string()),
                            rb.map_or("nothing".into(), |t| t.to_string())
                        ),
                        None,
                    );
                }
                out.push(if_stmt(c, a, b));
                Ok(ra)
            }
            _ => self.terminal(t, ctx, tail, out),
        }
    }

    fn terminal(&self, t: &IrTerm, ctx: &TypeCtx, tail: &Tail, out: &mut Vec<Stmt>) -> TResult<Option<CIntType>> {
        match tail {
            Tail::Bound => Ok(None),
            Tail::Loop(l) => match &t.kind {
                TermKind::LoopCall { func, .. } if *func == l.name => Ok(None),
                _ => self.err(t, "a loop body path that exits the loop early cannot become a `while`", Some(P_LOOP)),
            },
            Tail::Function => {
                let result = match &t.kind {
                    TermKind::Var(n) if matches!(ctx.get(n), Some(CType::Pointer(_))) => return Ok(None),
                    TermKind::Mv(items) => match &items[0].kind {
                        TermKind::RetVal(e) => Some(self.expr(e, ctx)?),
                        _ => return Ok(None),
                    },
                    _ => Some(self.value_rhs(t, ctx)?),
                };
                let (e, ty) = result.unwrap();
                out.push(Stmt::Return(Some(e)));
                Ok(Some(ty))
            }
        }
    }

    fn array_write(&self, t: &IrTerm, ctx: &TypeCtx) -> TResult<Stmt> {
        let TermKind::ArrayWrite {
            elem,
            index_ty,
            array,
            index,
            value,
        } = &t.kind
        else {
            unreachable!()
        };
        match ctx.get(array) {
            Some(CType::Pointer(e)) if e == *elem => {}
            _ => return self.err(t, format!("`{array}` is not a {elem} array"), None),
        }
        let (i, it) = self.expr(index, ctx)?;
        self.want(index, it, *index_ty, "the index")?;
        let (v, vt) = self.expr(value, ctx)?;
        self.want(value, vt, *elem, "the written value")?;
        Ok(Stmt::AssignIndex {
            array: ident(array),
            index: i,
            rhs: v,
        })
    }

    /// A wrapperless binding: an `if` statement, a loop, a call for its
    /// effects, or an array write.
    fn bound_stmt(&self, rhs: &IrTerm, ctx: &mut TypeCtx, out: &mut Vec<Stmt>) -> TResult<()> {
        match &rhs.kind {
            TermKind::ArrayWrite { .. } => out.push(self.array_write(rhs, ctx)?),
            TermKind::If { test, then, els } => {
                let c = self.test(test, ctx)?;
                let tail = Tail::Bound;
                let mut a = Vec::new();
                self.stmts(then, &mut ctx.clone(), &tail, &mut a)?;
                let mut b = Vec::new();
                self.stmts(els, &mut ctx.clone(), &tail, &mut b)?;
                out.push(if_stmt(c, a, b));
            }
            TermKind::LoopCall { func, .. } => {
                let l = self.p.function(func).expect("checked");
                for prm in &l.params {
                    if ctx.get(&prm.name) != Some(ctype(prm.ty)) {
                        return self.err(
                            rhs,
                            format!("`{}` must have type {} to run loop `{func}`", prm.name, ctype(prm.ty)),
                            None,
                        );
                    }
                }
                let code = &self.loops[func];
                out.push(Stmt::While {
                    test: code.test.clone(),
                    body: code.body.clone(),
                });
            }
            TermKind::Call { func, args } => {
                let (e, _) = self.call(func, args, ctx)?;
                out.push(Stmt::ExprStmt(e));
            }
            _ => return self.err(rhs, "unsupported statement binding", Some(P_DECLAR)),
        }
        Ok(())
    }

    fn loop_code(&self, ctx: &TypeCtx) -> TResult<LoopCode> {
        let f = self.f;
        let TermKind::If { test, then, els } = &f.body.kind else {
            return self.err(&f.body, "loop body must be an `if`", Some(P_LOOP));
        };
        let recurs = |t: &IrTerm| {
            let mut found = false;
            crate::ir::walk(t, &mut |s| {
                if matches!(&s.kind, TermKind::LoopCall { func, .. } if *func == f.name) {
                    found = true;
                }
            });
            found
        };
        let (c, rec, base) = match (recurs(then), recurs(els)) {
            (true, false) => (self.test(test, ctx)?, then, els),
            (false, true) => (Expr::unary(UnaryOp::LogNot, self.test(test, ctx)?), els, then),
            _ => {
                return self.err(
                    &f.body,
                    "exactly one branch of the loop's `if` must continue the loop",
                    Some(P_LOOP),
                )
            }
        };
        if !matches!(base.kind, TermKind::Var(_) | TermKind::Mv(_)) {
            return self.err(base, "the exit branch must return the affected formals directly", Some(P_LOOP));
        }
        let mut body = Vec::new();
        self.stmts(rec, &mut ctx.clone(), &Tail::Loop(f), &mut body)?;
        Ok(LoopCode {
            test: c,
            body: Block::new(body),
        })
    }
}

fn if_stmt(test: Expr, then: Vec<Stmt>, els: Vec<Stmt>) -> Stmt {
    if els.is_empty() {
        Stmt::If {
            test,
            then: Block::new(then),
        }
    } else {
        Stmt::IfElse {
            test,
            then: Block::new(then),
            els: Block::new(els),
        }
    }
}
