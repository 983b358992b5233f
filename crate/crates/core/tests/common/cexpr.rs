//! Random well-typed C expressions over a fixed set of variables.

use cshallow::ast::{is_const_type, Expr, Ident};
use cshallow::values::{BinaryOp, CIntType, ImplParams, UnaryOp};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Integer variables in scope, one per type.
pub fn int_vars() -> Vec<(&'static str, CIntType)> {
    vec![
        ("c", CIntType::SCHAR),
        ("uc", CIntType::UCHAR),
        ("s", CIntType::SSHORT),
        ("us", CIntType::USHORT),
        ("x", CIntType::SINT),
        ("y", CIntType::UINT),
        ("l", CIntType::SLONG),
        ("ul", CIntType::ULONG),
        ("ll", CIntType::SLLONG),
        ("ull", CIntType::ULLONG),
    ]
}

/// Pointer variables in scope.
pub fn ptr_vars() -> Vec<(&'static str, CIntType)> {
    vec![("a", CIntType::UCHAR), ("b", CIntType::SINT)]
}

pub struct ExprGen {
    rng: ChaCha8Rng,
    params: ImplParams,
}

impl ExprGen {
    pub fn new(seed: u64) -> Self {
        ExprGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params: ImplParams::default(),
        }
    }

    fn id(name: &str) -> Ident {
        Ident::new(name).unwrap()
    }

    fn any_type(&mut self) -> CIntType {
        *CIntType::ALL.choose(&mut self.rng).unwrap()
    }

    fn constant(&mut self) -> (Expr, CIntType) {
        let ty = **CIntType::ALL
            .iter()
            .filter(|t| is_const_type(**t))
            .collect::<Vec<_>>()
            .choose(&mut self.rng)
            .unwrap();
        let max = self.params.max(ty);
        let v = match self.rng.gen_range(0..3) {
            0 => self.rng.gen_range(0..10),
            1 => self.rng.gen_range(0..=max.min(1 << 20)),
            _ => max,
        };
        (Expr::constant(v, ty), ty)
    }

    /// An expression with its type.
    pub fn expr(&mut self, depth: u32) -> (Expr, CIntType) {
        let leaf = depth == 0 || self.rng.gen_bool(0.2);
        if leaf {
            return if self.rng.gen_bool(0.5) {
                let (n, t) = *int_vars().choose(&mut self.rng).unwrap();
                (Expr::Var(Self::id(n)), t)
            } else {
                self.constant()
            };
        }
        let p = self.params;
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 => {
                let op = *UnaryOp::ALL.choose(&mut self.rng).unwrap();
                let (e, t) = self.expr(d);
                (Expr::unary(op, e), p.unary_result_type(op, t))
            }
            1 | 2 => {
                let op = *BinaryOp::ALL.choose(&mut self.rng).unwrap();
                let (l, lt) = self.expr(d);
                let (r, rt) = self.expr(d);
                (Expr::binary(op, l, r), p.binary_result_type(op, lt, rt))
            }
            3 => {
                let ty = self.any_type();
                let (e, _) = self.expr(d);
                (Expr::cast(ty, e), ty)
            }
            4 => {
                let (c, _) = self.expr(d);
                let (a, at) = self.expr(d);
                let (b, bt) = self.expr(d);
                let b = if bt == at { b } else { Expr::cast(at, b) };
                (Expr::cond(c, a, b), at)
            }
            5 => {
                let (n, t) = *ptr_vars().choose(&mut self.rng).unwrap();
                let (i, _) = self.expr(d);
                (Expr::index(&Self::id(n), i), t)
            }
            6 => {
                let (l, _) = self.expr(d);
                let (r, _) = self.expr(d);
                let e = if self.rng.gen_bool(0.5) { Expr::logand(l, r) } else { Expr::logor(l, r) };
                (e, CIntType::SINT)
            }
            _ => {
                // a chain of one operator exercises associativity
                let op = *[BinaryOp::Sub, BinaryOp::Div, BinaryOp::Shl, BinaryOp::Lt, BinaryOp::Add]
                    .choose(&mut self.rng)
                    .unwrap();
                let (mut e, mut t) = self.expr(d.min(1));
                for _ in 0..self.rng.gen_range(1..4) {
                    let (r, rt) = self.expr(d.min(1));
                    if self.rng.gen_bool(0.5) {
                        e = Expr::binary(op, e, r);
                    } else {
                        e = Expr::binary(op, r, e);
                    }
                    t = p.binary_result_type(op, t, rt);
                }
                (e, t)
            }
        }
    }
}
