//! Random small IR programs that satisfy `check_ir` by construction.
//!
//! Programs hold an optional loop function followed by one to three
//! ordinary functions. Each ordinary function may take one array (always of
//! the program's element type), a guarded index `x` into it, and a few
//! integer parameters. Later functions call earlier ones and the loop.

use cshallow::ir::build::*;
use cshallow::ir::{IrFunction, IrParam, IrProgram, IrTerm, IrType, Span};
use cshallow::values::{BinaryOp, CIntType, ImplParams, UnaryOp};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cshallow::ast::is_const_type;

#[derive(Debug, Clone)]
struct Sig {
    name: String,
    params: Vec<IrParam>,
    result: Option<CIntType>,
    writes: bool,
}

#[derive(Debug, Clone)]
struct LoopSig {
    name: String,
    acc: CIntType,
    with_array: bool,
}

#[derive(Debug, Clone)]
struct Scope {
    ints: Vec<(String, CIntType)>,
    /// Variables that may be assigned.
    locals: Vec<String>,
    array: bool,
    /// The index term and its type, when an index is known to be in bounds.
    index: Option<(String, CIntType)>,
    writes: bool,
    /// Avoid operations that can be undefined.
    safe: bool,
    used_loop: bool,
}

pub struct ProgGen {
    rng: ChaCha8Rng,
    params: ImplParams,
    elem: CIntType,
    sigs: Vec<Sig>,
    lp: Option<LoopSig>,
    fresh: usize,
}

const LOOP_BOUND: i128 = 20;

/// A random program, deterministic in `seed`.
pub fn random_program(seed: u64) -> IrProgram {
    ProgGen::new(seed).program()
}

impl ProgGen {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elem = *[CIntType::UCHAR, CIntType::SCHAR, CIntType::USHORT, CIntType::SINT, CIntType::UINT, CIntType::ULONG]
            .choose(&mut rng)
            .unwrap();
        ProgGen {
            rng,
            params: ImplParams::default(),
            elem,
            sigs: vec![],
            lp: None,
            fresh: 0,
        }
    }

    pub fn program(mut self) -> IrProgram {
        let mut functions = Vec::new();
        if self.rng.gen_bool(0.5) {
            functions.push(self.loop_fn());
        }
        for k in 0..self.rng.gen_range(1..=3) {
            functions.push(self.function(k));
        }
        IrProgram { functions }
    }

    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    fn any_type(&mut self) -> CIntType {
        *CIntType::ALL.choose(&mut self.rng).unwrap()
    }

    fn safe_conv(&self, from: CIntType, to: CIntType) -> bool {
        let p = &self.params;
        !to.is_signed() || (p.min(from) >= p.min(to) && p.max(from) <= p.max(to))
    }

    fn small_const(&mut self, ty: CIntType) -> IrTerm {
        let hi = self.params.max(ty).min(300);
        let v = match self.rng.gen_range(0..4) {
            0 => 0,
            1 => 1,
            _ => self.rng.gen_range(0..=hi),
        };
        if is_const_type(ty) {
            konst(ty, v)
        } else {
            convert(CIntType::SINT, ty, konst(CIntType::SINT, v))
        }
    }

    fn index(&mut self, s: &Scope) -> (IrTerm, CIntType) {
        match &s.index {
            Some((n, t)) if self.rng.gen_bool(0.8) => (var(n), *t),
            _ => (konst(CIntType::SINT, 0), CIntType::SINT),
        }
    }

    /// A boolean test.
    fn test(&mut self, s: &Scope, depth: u32) -> IrTerm {
        if depth > 0 && self.rng.gen_bool(0.25) {
            let a = self.test(s, depth - 1);
            let b = self.test(s, depth - 1);
            return if self.rng.gen_bool(0.5) { and(a, b) } else { or(a, b) };
        }
        if self.rng.gen_bool(0.6) {
            let (lt, rt) = (self.any_type(), self.any_type());
            let op = *[BinaryOp::Lt, BinaryOp::Gt, BinaryOp::Le, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne]
                .choose(&mut self.rng)
                .unwrap();
            let l = self.expr(s, lt, depth.min(1));
            let r = self.expr(s, rt, depth.min(1));
            bool_from(CIntType::SINT, binary(op, lt, rt, l, r))
        } else {
            let t = self.any_type();
            let e = self.expr(s, t, depth.min(1));
            bool_from(t, e)
        }
    }

    /// An expression of type exactly `ty`.
    fn expr(&mut self, s: &Scope, ty: CIntType, depth: u32) -> IrTerm {
        let p = self.params;
        let vars: Vec<String> = s.ints.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect();
        if depth == 0 || self.rng.gen_bool(0.15) {
            return match vars.choose(&mut self.rng) {
                Some(v) if self.rng.gen_bool(0.7) => var(v),
                _ => self.small_const(ty),
            };
        }
        let d = depth - 1;
        for _ in 0..8 {
            match self.rng.gen_range(0..10) {
                0 => {
                    let args: Vec<CIntType> =
                        CIntType::ALL.into_iter().filter(|a| p.promote_type(*a) == ty).collect();
                    let Some(&a) = args.choose(&mut self.rng) else { continue };
                    let mut ops = vec![UnaryOp::Plus, UnaryOp::BitNot];
                    if !s.safe || !ty.is_signed() {
                        ops.push(UnaryOp::Minus);
                    }
                    let op = *ops.choose(&mut self.rng).unwrap();
                    let e = self.expr(s, a, d);
                    return unary(op, a, e);
                }
                1 if ty == CIntType::SINT => {
                    let a = self.any_type();
                    let e = self.expr(s, a, d);
                    return unary(UnaryOp::LogNot, a, e);
                }
                1 | 2 | 3 => {
                    let pairs: Vec<(CIntType, CIntType)> = CIntType::ALL
                        .into_iter()
                        .flat_map(|a| CIntType::ALL.into_iter().map(move |b| (a, b)))
                        .filter(|(a, b)| p.common_type(*a, *b) == ty)
                        .collect();
                    let Some(&(a, b)) = pairs.choose(&mut self.rng) else { continue };
                    let mut ops = vec![BinaryOp::BitAnd, BinaryOp::BitOr, BinaryOp::BitXor, BinaryOp::Div, BinaryOp::Rem];
                    if !s.safe || !ty.is_signed() {
                        ops.extend([BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul]);
                    }
                    let op = *ops.choose(&mut self.rng).unwrap();
                    let l = self.expr(s, a, d);
                    let r = if matches!(op, BinaryOp::Div | BinaryOp::Rem) {
                        // a positive constant divisor: never zero, never -1
                        let hi = p.max(b).min(50);
                        let c = self.rng.gen_range(1..=hi);
                        if is_const_type(b) {
                            konst(b, c)
                        } else {
                            convert(CIntType::SINT, b, konst(CIntType::SINT, c))
                        }
                    } else {
                        self.expr(s, b, d)
                    };
                    return binary(op, a, b, l, r);
                }
                4 if ty == CIntType::SINT => {
                    let (a, b) = (self.any_type(), self.any_type());
                    let op = *[BinaryOp::Lt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne].choose(&mut self.rng).unwrap();
                    let l = self.expr(s, a, d);
                    let r = self.expr(s, b, d);
                    return binary(op, a, b, l, r);
                }
                4 | 5 => {
                    let args: Vec<CIntType> =
                        CIntType::ALL.into_iter().filter(|a| p.promote_type(*a) == ty).collect();
                    let Some(&a) = args.choose(&mut self.rng) else { continue };
                    let op = if ty.is_signed() || self.rng.gen_bool(0.5) { BinaryOp::Shr } else { BinaryOp::Shl };
                    let k = self.rng.gen_range(0..p.width(ty) as i128);
                    let l = self.expr(s, a, d);
                    return binary(op, a, CIntType::SINT, l, konst(CIntType::SINT, k));
                }
                6 => {
                    let from = self.any_type();
                    if from == ty || !self.safe_conv(from, ty) {
                        continue;
                    }
                    let e = self.expr(s, from, d);
                    return convert(from, ty, e);
                }
                7 => {
                    let c = self.test(s, d);
                    let a = self.expr(s, ty, d);
                    let b = self.expr(s, ty, d);
                    return condexpr(c, a, b);
                }
                8 if s.array && ty == self.elem => {
                    let (i, it) = self.index(s);
                    return array_read(self.elem, it, "a", i);
                }
                9 => {
                    let c = self.test(s, d);
                    return int_from_bool(ty, c);
                }
                _ => {}
            }
        }
        match vars.choose(&mut self.rng) {
            Some(v) => var(v),
            None => self.small_const(ty),
        }
    }

    fn array_write(&mut self, s: &Scope) -> IrTerm {
        let (i, it) = self.index(s);
        let v = self.expr(s, self.elem, 2);
        array_write(self.elem, it, "a", i, v)
    }

    /// Arguments for a call of `g`, or `None` if the scope cannot supply them.
    fn args(&mut self, s: &Scope, g: &Sig) -> Option<Vec<IrTerm>> {
        let mut out = Vec::new();
        for prm in &g.params {
            out.push(match (prm.name.as_str(), prm.ty) {
                (_, IrType::Array(_)) if s.array => var("a"),
                (_, IrType::Array(_)) => return None,
                ("x", _) => match &s.index {
                    Some((n, t)) if *t == CIntType::SINT => var(n),
                    _ => konst(CIntType::SINT, 0),
                },
                (_, IrType::Int(t)) => self.expr(s, t, 1),
            });
        }
        Some(out)
    }

    fn callable(&mut self, s: &Scope, want: impl Fn(&Sig) -> bool) -> Option<(String, Vec<IrTerm>, Option<CIntType>)> {
        let cands: Vec<Sig> = self.sigs.iter().filter(|g| want(g)).cloned().collect();
        let g = cands.choose(&mut self.rng)?.clone();
        let args = self.args(s, &g)?;
        Some((g.name, args, g.result))
    }

    fn int_branch(&mut self, s: &Scope, v: &str, ty: CIntType) -> IrTerm {
        match self.rng.gen_range(0..3) {
            0 => var(v),
            1 => {
                let e = self.expr(s, ty, 2);
                let_assign(v, e, var(v))
            }
            _ => {
                let w = self.fresh();
                let wt = self.any_type();
                let e = self.expr(s, wt, 2);
                let mut inner = s.clone();
                inner.ints.push((w.clone(), wt));
                let f = self.expr(&inner, ty, 2);
                let_declar(&w, e, let_assign(v, f, var(v)))
            }
        }
    }

    fn array_branch(&mut self, s: &Scope) -> IrTerm {
        if self.rng.gen_bool(0.3) {
            var("a")
        } else {
            let w = self.array_write(s);
            let_stmt(&["a"], w, var("a"))
        }
    }

    fn body(&mut self, s: &mut Scope, n: usize, result: Option<CIntType>) -> IrTerm {
        if n == 0 {
            return self.tail(s, result);
        }
        for _ in 0..20 {
            match self.rng.gen_range(0..7) {
                0 => {
                    let v = self.fresh();
                    let (rhs, ty) = match self.callable(s, |g| g.result.is_some() && !g.writes) {
                        Some((g, args, Some(t))) if self.rng.gen_bool(0.4) => (call(&g, args), t),
                        _ => {
                            let ty = self.any_type();
                            (self.expr(s, ty, 3), ty)
                        }
                    };
                    s.ints.push((v.clone(), ty));
                    s.locals.push(v.clone());
                    let rest = self.body(s, n - 1, result);
                    return let_declar(&v, rhs, rest);
                }
                1 => {
                    let Some(v) = s.locals.choose(&mut self.rng).cloned() else { continue };
                    let ty = s.ints.iter().find(|(n, _)| *n == v).unwrap().1;
                    let e = self.expr(s, ty, 3);
                    let rest = self.body(s, n - 1, result);
                    return let_assign(&v, e, rest);
                }
                2 => {
                    let Some(v) = s.locals.choose(&mut self.rng).cloned() else { continue };
                    let ty = s.ints.iter().find(|(n, _)| *n == v).unwrap().1;
                    let c = self.test(s, 2);
                    let a = self.int_branch(s, &v, ty);
                    let b = self.int_branch(s, &v, ty);
                    let rest = self.body(s, n - 1, result);
                    return let_stmt(&[&v], if_(c, a, b), rest);
                }
                3 if s.writes => {
                    let w = self.array_write(s);
                    let rest = self.body(s, n - 1, result);
                    return let_stmt(&["a"], w, rest);
                }
                4 if s.writes => {
                    let c = self.test(s, 2);
                    let a = self.array_branch(s);
                    let b = self.array_branch(s);
                    let rest = self.body(s, n - 1, result);
                    return let_stmt(&["a"], if_(c, a, b), rest);
                }
                5 if s.writes => {
                    let needs_array = |g: &Sig| g.params.iter().any(|p| matches!(p.ty, IrType::Array(_)));
                    let Some((g, args, _)) = self.callable(s, |g| g.writes && g.result.is_none() && needs_array(g)) else {
                        continue;
                    };
                    let rest = self.body(s, n - 1, result);
                    return let_stmt(&["a"], call(&g, args), rest);
                }
                6 => {
                    let Some(lp) = self.lp.clone() else { continue };
                    if s.used_loop || (lp.with_array && !(s.writes && s.index.is_some())) {
                        continue;
                    }
                    s.used_loop = true;
                    let n_init = if lp.with_array {
                        convert(CIntType::SINT, CIntType::UINT, var("x"))
                    } else {
                        let t = self.any_type();
                        let e = self.expr(s, t, 1);
                        let e = if t == CIntType::UINT { e } else { convert(t, CIntType::UINT, e) };
                        binary(BinaryOp::BitAnd, CIntType::UINT, CIntType::UINT, e, konst(CIntType::UINT, 15))
                    };
                    let acc_init = self.expr(s, lp.acc, 2);
                    let mut vars = vec!["n", "acc"];
                    if lp.with_array {
                        vars.push("a");
                    }
                    s.ints.push(("n".into(), CIntType::UINT));
                    s.ints.push(("acc".into(), lp.acc));
                    s.locals.extend(["n".to_string(), "acc".to_string()]);
                    let rest = self.body(s, n - 1, result);
                    return let_declar(
                        "n",
                        n_init,
                        let_declar("acc", acc_init, let_stmt(&vars, loop_call(&lp.name, &vars), rest)),
                    );
                }
                _ => {}
            }
        }
        self.tail(s, result)
    }

    fn tail(&mut self, s: &Scope, result: Option<CIntType>) -> IrTerm {
        match (result, s.writes) {
            (Some(t), false) => self.value_tail(s, t, 2),
            (Some(t), true) => {
                let e = self.expr(s, t, 3);
                mv(vec![retval(e), var("a")])
            }
            (None, _) => var("a"),
        }
    }

    fn value_tail(&mut self, s: &Scope, t: CIntType, depth: u32) -> IrTerm {
        match self.rng.gen_range(0..5) {
            0 if depth > 0 => {
                let c = self.test(s, 2);
                let a = self.value_tail(s, t, depth - 1);
                let b = self.value_tail(s, t, depth - 1);
                if_(c, a, b)
            }
            1 => match self.callable(s, |g| g.result == Some(t) && !g.writes) {
                Some((g, args, _)) => call(&g, args),
                None => self.expr(s, t, 3),
            },
            _ => self.expr(s, t, 3),
        }
    }

    fn index_guards(&self, n: &str, nt: CIntType) -> Vec<IrTerm> {
        let n_sint = if nt == CIntType::SINT { var(n) } else { convert(nt, CIntType::SINT, var(n)) };
        let mut g = Vec::new();
        if nt == CIntType::SINT {
            g.push(bool_from(
                CIntType::SINT,
                binary(BinaryOp::Le, CIntType::SINT, CIntType::SINT, konst(CIntType::SINT, 0), var(n)),
            ));
        }
        g.push(bool_from(
            CIntType::SINT,
            binary(BinaryOp::Lt, CIntType::SINT, CIntType::SINT, n_sint, array_length(self.elem, "a")),
        ));
        g
    }

    fn function(&mut self, k: usize) -> IrFunction {
        let name = format!("f{k}");
        let has_array = self.rng.gen_bool(0.5);
        let index = has_array && self.rng.gen_bool(0.7);
        let mut params = Vec::new();
        if has_array {
            params.push(IrParam {
                name: "a".into(),
                ty: IrType::Array(self.elem),
            });
        }
        if index {
            params.push(IrParam {
                name: "x".into(),
                ty: IrType::Int(CIntType::SINT),
            });
        }
        for i in 0..self.rng.gen_range(1..=3) {
            let t = self.any_type();
            params.push(IrParam {
                name: format!("p{i}"),
                ty: IrType::Int(t),
            });
        }
        let writes = has_array && self.rng.gen_bool(0.6);
        let result = if !writes || self.rng.gen_bool(0.5) { Some(self.any_type()) } else { None };
        let mut s = Scope {
            ints: params
                .iter()
                .filter_map(|p| match p.ty {
                    IrType::Int(t) => Some((p.name.clone(), t)),
                    IrType::Array(_) => None,
                })
                .collect(),
            locals: vec![],
            array: has_array,
            index: index.then(|| ("x".to_string(), CIntType::SINT)),
            writes,
            safe: self.rng.gen_bool(0.7),
            used_loop: false,
        };
        let n = self.rng.gen_range(0..=5);
        let body = self.body(&mut s, n, result);
        let extra_guards = if index { self.index_guards("x", CIntType::SINT) } else { vec![] };
        self.sigs.push(Sig {
            name: name.clone(),
            params: params.clone(),
            result,
            writes,
        });
        IrFunction {
            name,
            params,
            extra_guards,
            body,
            is_loop: false,
            span: Span::default(),
        }
    }

    fn loop_fn(&mut self) -> IrFunction {
        let name = "w$loop".to_string();
        let acc = self.any_type();
        let with_array = self.rng.gen_bool(0.5);
        let mut params = vec![
            IrParam {
                name: "n".into(),
                ty: IrType::Int(CIntType::UINT),
            },
            IrParam {
                name: "acc".into(),
                ty: IrType::Int(acc),
            },
        ];
        let mut formals = vec!["n", "acc"];
        if with_array {
            params.push(IrParam {
                name: "a".into(),
                ty: IrType::Array(self.elem),
            });
            formals.push("a");
        }
        let s = Scope {
            ints: vec![("n".into(), CIntType::UINT), ("acc".into(), acc)],
            locals: vec![],
            array: with_array,
            index: with_array.then(|| ("n".to_string(), CIntType::UINT)),
            writes: with_array,
            safe: true,
            used_loop: true,
        };
        let uint = CIntType::UINT;
        let dec = binary(BinaryOp::Sub, uint, uint, var("n"), konst(uint, 1));
        let mut rec = let_assign("n", dec, loop_call(&name, &formals));
        if with_array {
            let w = self.array_write(&s);
            rec = let_stmt(&["a"], w, rec);
        }
        let e = self.expr(&s, acc, 3);
        rec = let_assign("acc", e, rec);
        if self.rng.gen_bool(0.3) {
            let t = self.fresh();
            let tt = self.any_type();
            let init = self.expr(&s, tt, 2);
            let mut inner = s.clone();
            inner.ints.push((t.clone(), tt));
            let e2 = self.expr(&inner, acc, 2);
            rec = let_declar(&t, init, let_assign("acc", e2, rec));
        }
        let base = mv(formals.iter().map(|f| var(f)).collect());
        let body = if self.rng.gen_bool(0.7) {
            let test = bool_from(CIntType::SINT, binary(BinaryOp::Ne, uint, uint, var("n"), konst(uint, 0)));
            if_(test, rec, base)
        } else {
            let test = bool_from(CIntType::SINT, binary(BinaryOp::Eq, uint, uint, var("n"), konst(uint, 0)));
            if_(test, base, rec)
        };
        let mut extra_guards = vec![bool_from(
            CIntType::SINT,
            binary(BinaryOp::Le, uint, uint, var("n"), konst(uint, LOOP_BOUND)),
        )];
        if with_array {
            extra_guards.extend(self.index_guards("n", uint));
        }
        self.lp = Some(LoopSig {
            name: name.clone(),
            acc,
            with_array,
        });
        IrFunction {
            name,
            params,
            extra_guards,
            body,
            is_loop: true,
            span: Span::default(),
        }
    }
}
