use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::sexpr::{read_all, Sexp, SexpKind};
use super::{IrFunction, IrParam, IrProgram, IrTerm, IrType, Span, TermKind};
use crate::values::{BinaryOp, CIntType, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct IrParseError {
    pub span: Span,
    pub msg: String,
}

impl IrParseError {
    pub fn new(span: Span, msg: impl Into<String>) -> Self {
        IrParseError {
            span,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for IrParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.msg)
    }
}

type PResult<T> = Result<T, IrParseError>;

fn err<T>(s: &Sexp, msg: impl Into<String>) -> PResult<T> {
    Err(IrParseError::new(s.span, msg))
}

/// Parses a sequence of `defun` forms.
pub fn parse_ir(src: &str) -> PResult<IrProgram> {
    let forms = read_all(src)?;
    let mut functions = Vec::new();
    for form in &forms {
        functions.push(parse_defun(form)?);
    }
    let loops: HashSet<String> = functions
        .iter()
        .filter(|f| f.is_loop)
        .map(|f| f.name.clone())
        .collect();
    for f in &mut functions {
        mark_loop_calls(&mut f.body, &loops)?;
    }
    Ok(IrProgram { functions })
}

fn parse_defun(form: &Sexp) -> PResult<IrFunction> {
    let Some(items) = form.list() else {
        return err(form, "expected `(defun ...)`");
    };
    if form.head() != Some("defun") {
        return err(form, "expected `(defun ...)`");
    }
    if items.len() < 4 {
        return err(form, "malformed defun: expected name, formals, declarations and body");
    }
    let name = symbol_name(&items[1])?;
    let Some(formals) = items[2].list() else {
        return err(&items[2], "expected a list of formal parameters");
    };
    let mut names = Vec::new();
    for p in formals {
        let n = symbol_name(p)?;
        if names.contains(&n) {
            return err(p, format!("duplicate formal parameter `{n}`"));
        }
        names.push(n);
    }
    let body = body_after_declares(form, &items[3..])?;
    let mut guard = None;
    for d in items[3..].iter().take_while(|s| s.head() == Some("declare")) {
        for spec in &d.list().unwrap()[1..] {
            if spec.head() != Some("xargs") {
                continue;
            }
            let kv = &spec.list().unwrap()[1..];
            if kv.len() % 2 != 0 {
                return err(spec, "xargs expects keyword/value pairs");
            }
            for pair in kv.chunks(2) {
                if pair[0].sym() == Some(":guard") {
                    if guard.is_some() {
                        return err(&pair[0], "more than one :guard");
                    }
                    guard = Some(&pair[1]);
                }
            }
        }
    }
    let Some(guard) = guard else {
        return err(form, format!("function `{name}` has no guard; parameter types are mandatory"));
    };
    let conjuncts: Vec<&Sexp> = if guard.head() == Some("and") {
        guard.list().unwrap()[1..].iter().collect()
    } else {
        vec![guard]
    };
    let mut types: Vec<Option<IrType>> = vec![None; names.len()];
    let mut extra_guards = Vec::new();
    for c in conjuncts {
        if let Some((ty, var)) = type_conjunct(c)? {
            let Some(i) = names.iter().position(|n| *n == var) else {
                return err(c, format!("type conjunct on `{var}`, which is not a parameter"));
            };
            if types[i].is_some() {
                return err(c, format!("parameter `{var}` has more than one type conjunct"));
            }
            types[i] = Some(ty);
        } else {
            extra_guards.push(parse_term(c)?);
        }
    }
    let mut params = Vec::new();
    for (n, t) in names.into_iter().zip(types) {
        let Some(ty) = t else {
            return err(guard, format!("guard missing type conjunct for parameter `{n}`"));
        };
        params.push(IrParam { name: n, ty });
    }
    let body = parse_term(body)?;
    let mut is_loop = false;
    super::walk(&body, &mut |t| {
        if let TermKind::Call { func, .. } = &t.kind {
            if *func == name {
                is_loop = true;
            }
        }
    });
    Ok(IrFunction {
        name,
        params,
        extra_guards,
        body,
        is_loop,
        span: form.span,
    })
}

/// The single form after any leading `(declare ...)` forms.
fn body_after_declares<'a>(form: &Sexp, items: &'a [Sexp]) -> PResult<&'a Sexp> {
    let n = items.iter().take_while(|s| s.head() == Some("declare")).count();
    match &items[n..] {
        [body] => Ok(body),
        [] => err(form, "missing body"),
        [_, extra, ..] => err(extra, "unexpected form after body"),
    }
}

fn type_conjunct(c: &Sexp) -> PResult<Option<(IrType, String)>> {
    let Some(head) = c.head() else { return Ok(None) };
    let Some(stem) = head.strip_suffix('p') else { return Ok(None) };
    let ty = if let Some(elem) = stem.strip_suffix("-array") {
        CIntType::from_abbrev(elem).map(IrType::Array)
    } else {
        CIntType::from_abbrev(stem).map(IrType::Int)
    };
    let Some(ty) = ty else { return Ok(None) };
    let items = c.list().unwrap();
    if items.len() != 2 {
        return err(c, format!("`{head}` takes one argument"));
    }
    Ok(Some((ty, symbol_name(&items[1])?)))
}

fn symbol_name(s: &Sexp) -> PResult<String> {
    match &s.kind {
        SexpKind::Bar(n) if !n.is_empty() => Ok(n.clone()),
        SexpKind::Sym(n) if !n.starts_with(':') && n != "t" && n != "nil" => Ok(n.clone()),
        _ => err(s, "expected a symbol"),
    }
}

fn tyname(s: &str, form: &Sexp) -> PResult<CIntType> {
    match CIntType::from_abbrev(s) {
        Some(t) => Ok(t),
        None => err(form, format!("unknown integer type `{s}`")),
    }
}

fn parse_term(s: &Sexp) -> PResult<IrTerm> {
    let kind = match &s.kind {
        SexpKind::Bar(_) | SexpKind::Sym(_) => TermKind::Var(symbol_name(s)?),
        SexpKind::Int(n) => {
            return err(s, format!("bare integer `{n}`; write constants as `(<type>-dec-const {n})`"))
        }
        SexpKind::List(items) => {
            let Some(head) = items.first() else {
                return err(s, "empty list");
            };
            let args = &items[1..];
            match &head.kind {
                SexpKind::Bar(f) => TermKind::Call {
                    func: f.clone(),
                    args: args.iter().map(parse_term).collect::<PResult<_>>()?,
                },
                SexpKind::Sym(op) => parse_op(s, op, args)?,
                _ => return err(head, "expected an operator or function name"),
            }
        }
    };
    Ok(IrTerm::new(kind, s.span))
}

fn arity(s: &Sexp, op: &str, args: &[Sexp], n: usize) -> PResult<()> {
    if args.len() != n {
        return err(s, format!("`{op}` takes {n} argument(s), got {}", args.len()));
    }
    Ok(())
}

fn boxed(s: &Sexp) -> PResult<Box<IrTerm>> {
    parse_term(s).map(Box::new)
}

fn parse_op(s: &Sexp, op: &str, args: &[Sexp]) -> PResult<TermKind> {
    match op {
        "let" => {
            if args.len() < 2 {
                return err(s, "malformed let");
            }
            let Some(bindings) = args[0].list() else {
                return err(&args[0], "expected a binding list");
            };
            if bindings.len() != 1 {
                return err(&args[0], "`let` must bind exactly one variable; use `let*` for several");
            }
            let body = parse_term(body_after_declares(s, &args[1..])?)?;
            return Ok(parse_binding(&bindings[0], body)?.kind);
        }
        "let*" => {
            if args.len() < 2 {
                return err(s, "malformed let*");
            }
            let Some(bindings) = args[0].list() else {
                return err(&args[0], "expected a binding list");
            };
            if bindings.is_empty() {
                return err(&args[0], "`let*` needs at least one binding");
            }
            let mut body = parse_term(body_after_declares(s, &args[1..])?)?;
            for b in bindings.iter().rev() {
                body = parse_binding(b, body)?;
            }
            return Ok(body.kind);
        }
        "mv-let" => {
            if args.len() < 3 {
                return err(s, "malformed mv-let");
            }
            let Some(vars) = args[0].list() else {
                return err(&args[0], "expected a variable list");
            };
            if vars.is_empty() {
                return err(&args[0], "`mv-let` needs at least one variable");
            }
            let vars = vars.iter().map(symbol_name).collect::<PResult<Vec<_>>>()?;
            let rhs = boxed(&args[1])?;
            let body = boxed(body_after_declares(s, &args[2..])?)?;
            return Ok(TermKind::LetStmt { vars, rhs, body });
        }
        "if" => {
            arity(s, op, args, 3)?;
            return Ok(TermKind::If {
                test: boxed(&args[0])?,
                then: boxed(&args[1])?,
                els: boxed(&args[2])?,
            });
        }
        "and" | "or" => {
            if args.len() < 2 {
                return err(s, format!("`{op}` takes at least two arguments"));
            }
            let mut acc = parse_term(args.last().unwrap())?;
            for a in args[..args.len() - 1].iter().rev() {
                let l = Box::new(parse_term(a)?);
                let k = if op == "and" {
                    TermKind::And(l, Box::new(acc))
                } else {
                    TermKind::Or(l, Box::new(acc))
                };
                acc = IrTerm::new(k, a.span);
            }
            return Ok(acc.kind);
        }
        "condexpr" => {
            arity(s, op, args, 1)?;
            if args[0].head() != Some("if") {
                return err(&args[0], "`condexpr` must wrap an `if`");
            }
            return Ok(TermKind::CondExpr(boxed(&args[0])?));
        }
        "mv" => {
            if args.len() < 2 {
                return err(s, "`mv` takes at least two arguments");
            }
            return Ok(TermKind::Mv(args.iter().map(parse_term).collect::<PResult<_>>()?));
        }
        "retval" => {
            arity(s, op, args, 1)?;
            return Ok(TermKind::RetVal(boxed(&args[0])?));
        }
        "declar" | "assign" => return err(s, format!("`{op}` is only allowed as a let binding")),
        "declare" => return err(s, "unexpected declare"),
        _ => {}
    }

    let parts: Vec<&str> = op.split('-').collect();
    match parts.as_slice() {
        [t, "dec", "const"] => {
            arity(s, op, args, 1)?;
            let ty = tyname(t, s)?;
            let SexpKind::Int(n) = args[0].kind else {
                return err(&args[0], "expected a natural number literal");
            };
            if n < 0 {
                return err(&args[0], "constants are natural numbers; negate with `minus-<type>`");
            }
            Ok(TermKind::Const { ty, value: n })
        }
        ["boolean", "from", t] => {
            arity(s, op, args, 1)?;
            Ok(TermKind::BoolFrom {
                ty: tyname(t, s)?,
                arg: boxed(&args[0])?,
            })
        }
        [t, "from", "boolean"] => {
            arity(s, op, args, 1)?;
            Ok(TermKind::IntFromBool {
                ty: tyname(t, s)?,
                arg: boxed(&args[0])?,
            })
        }
        [to, "from", from] => {
            arity(s, op, args, 1)?;
            Ok(TermKind::Convert {
                from: tyname(from, s)?,
                to: tyname(to, s)?,
                arg: boxed(&args[0])?,
            })
        }
        [e, "array", "read", i] => {
            arity(s, op, args, 2)?;
            Ok(TermKind::ArrayRead {
                elem: tyname(e, s)?,
                index_ty: tyname(i, s)?,
                array: symbol_name(&args[0])?,
                index: boxed(&args[1])?,
            })
        }
        [e, "array", "write", i] => {
            arity(s, op, args, 3)?;
            Ok(TermKind::ArrayWrite {
                elem: tyname(e, s)?,
                index_ty: tyname(i, s)?,
                array: symbol_name(&args[0])?,
                index: boxed(&args[1])?,
                value: boxed(&args[2])?,
            })
        }
        [e, "array", "length"] => {
            arity(s, op, args, 1)?;
            Ok(TermKind::ArrayLength {
                elem: tyname(e, s)?,
                array: symbol_name(&args[0])?,
            })
        }
        [u, t] if UnaryOp::from_name(u).is_some() => {
            arity(s, op, args, 1)?;
            Ok(TermKind::Unary {
                op: UnaryOp::from_name(u).unwrap(),
                ty: tyname(t, s)?,
                arg: boxed(&args[0])?,
            })
        }
        [b, l, r] if BinaryOp::from_name(b).is_some() => {
            arity(s, op, args, 2)?;
            Ok(TermKind::Binary {
                op: BinaryOp::from_name(b).unwrap(),
                left_ty: tyname(l, s)?,
                right_ty: tyname(r, s)?,
                left: boxed(&args[0])?,
                right: boxed(&args[1])?,
            })
        }
        _ => err(s, format!("unknown operator `{op}`")),
    }
}

fn parse_binding(b: &Sexp, body: IrTerm) -> PResult<IrTerm> {
    let Some([v, rhs]) = b.list() else {
        return err(b, "a binding is `(var term)`");
    };
    let var = symbol_name(v)?;
    let body = Box::new(body);
    let kind = match rhs.head() {
        Some(w @ ("declar" | "assign")) => {
            let inner = rhs.list().unwrap();
            if inner.len() != 2 {
                return err(rhs, format!("`{w}` takes one argument"));
            }
            let rhs = boxed(&inner[1])?;
            if w == "declar" {
                TermKind::LetDeclar { var, rhs, body }
            } else {
                TermKind::LetAssign { var, rhs, body }
            }
        }
        _ => TermKind::LetStmt {
            vars: vec![var],
            rhs: boxed(rhs)?,
            body,
        },
    };
    Ok(IrTerm::new(kind, b.span))
}

fn mark_loop_calls(t: &mut IrTerm, loops: &HashSet<String>) -> PResult<()> {
    if let TermKind::Call { func, args } = &mut t.kind {
        if loops.contains(func.as_str()) {
            let mut names = Vec::new();
            for a in args.iter() {
                match &a.kind {
                    TermKind::Var(n) => names.push(n.clone()),
                    _ => {
                        return Err(IrParseError::new(
                            a.span,
                            format!("arguments of loop function `{func}` must be its formals"),
                        ))
                    }
                }
            }
            t.kind = TermKind::LoopCall {
                func: func.clone(),
                args: names,
            };
            return Ok(());
        }
    }
    match &mut t.kind {
        TermKind::Var(_) | TermKind::Const { .. } | TermKind::ArrayLength { .. } | TermKind::LoopCall { .. } => {}
        TermKind::Unary { arg, .. }
        | TermKind::Convert { arg, .. }
        | TermKind::BoolFrom { arg, .. }
        | TermKind::IntFromBool { arg, .. }
        | TermKind::CondExpr(arg)
        | TermKind::RetVal(arg)
        | TermKind::ArrayRead { index: arg, .. } => mark_loop_calls(arg, loops)?,
        TermKind::Binary { left: a, right: b, .. } | TermKind::And(a, b) | TermKind::Or(a, b) => {
            mark_loop_calls(a, loops)?;
            mark_loop_calls(b, loops)?;
        }
        TermKind::LetDeclar { rhs: a, body: b, .. }
        | TermKind::LetAssign { rhs: a, body: b, .. }
        | TermKind::LetStmt { rhs: a, body: b, .. }
        | TermKind::ArrayWrite { index: a, value: b, .. } => {
            mark_loop_calls(a, loops)?;
            mark_loop_calls(b, loops)?;
        }
        TermKind::If { test, then, els } => {
            mark_loop_calls(test, loops)?;
            mark_loop_calls(then, loops)?;
            mark_loop_calls(els, loops)?;
        }
        TermKind::Call { args, .. } | TermKind::Mv(args) => {
            for a in args {
                mark_loop_calls(a, loops)?;
            }
        }
    }
    Ok(())
}
