//! Arbitrary-precision model of C integer arithmetic, written from the C18
//! rules without reference to the crate's implementation.

use cshallow::values::{BinaryOp, CIntType, ImplParams, UnaryOp};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(CIntType, i128),
    Undefined,
}

fn big(n: i128) -> BigInt {
    BigInt::from(n)
}

fn rank(t: CIntType) -> u8 {
    // abbrev tails: char, short, int, long, llong
    let a = t.abbrev();
    match &a[1..] {
        "char" => 0,
        "short" => 1,
        "int" => 2,
        "long" => 3,
        "llong" => 4,
        _ => unreachable!(),
    }
}

fn bits(p: &ImplParams, t: CIntType) -> u32 {
    [p.bits_char, p.bits_short, p.bits_int, p.bits_long, p.bits_llong][rank(t) as usize]
}

pub fn lo(p: &ImplParams, t: CIntType) -> BigInt {
    if t.is_signed() {
        -(BigInt::from(1) << (bits(p, t) - 1))
    } else {
        BigInt::from(0)
    }
}

pub fn hi(p: &ImplParams, t: CIntType) -> BigInt {
    if t.is_signed() {
        (BigInt::from(1) << (bits(p, t) - 1)) - 1
    } else {
        (BigInt::from(1) << bits(p, t)) - 1
    }
}

fn fits(p: &ImplParams, t: CIntType, v: &BigInt) -> bool {
    lo(p, t) <= *v && *v <= hi(p, t)
}

fn with_rank(signed: bool, r: u8) -> CIntType {
    let names = ["char", "short", "int", "long", "llong"];
    CIntType::from_abbrev(&format!("{}{}", if signed { 's' } else { 'u' }, names[r as usize])).unwrap()
}

pub fn promote(p: &ImplParams, t: CIntType) -> CIntType {
    if rank(t) >= 2 {
        return t;
    }
    let int = with_rank(true, 2);
    if lo(p, int) <= lo(p, t) && hi(p, t) <= hi(p, int) {
        int
    } else {
        with_rank(false, 2)
    }
}

pub fn common(p: &ImplParams, a: CIntType, b: CIntType) -> CIntType {
    let (a, b) = (promote(p, a), promote(p, b));
    if a == b {
        return a;
    }
    if a.is_signed() == b.is_signed() {
        return if rank(a) >= rank(b) { a } else { b };
    }
    let (u, s) = if a.is_signed() { (b, a) } else { (a, b) };
    if rank(u) >= rank(s) {
        u
    } else if lo(p, s) <= lo(p, u) && hi(p, u) <= hi(p, s) {
        s
    } else {
        with_rank(false, rank(s))
    }
}

/// Conversion of an in-range value of some type to `t`.
fn conv(p: &ImplParams, t: CIntType, v: &BigInt) -> Option<BigInt> {
    if fits(p, t, v) {
        Some(v.clone())
    } else if !t.is_signed() {
        let m = BigInt::from(1) << bits(p, t);
        Some(((v % &m) + &m) % &m)
    } else {
        None
    }
}

fn done(p: &ImplParams, t: CIntType, v: BigInt) -> Outcome {
    match conv(p, t, &v) {
        // the exact result must fit a signed type; unsigned ones wrap
        Some(w) if !t.is_signed() || w == v => Outcome::Value(t, i128::try_from(w).unwrap()),
        _ => Outcome::Undefined,
    }
}

pub fn convert(p: &ImplParams, to: CIntType, v: i128) -> Outcome {
    match conv(p, to, &big(v)) {
        Some(w) => Outcome::Value(to, i128::try_from(w).unwrap()),
        None => Outcome::Undefined,
    }
}

pub fn unary(p: &ImplParams, op: UnaryOp, t: CIntType, v: i128) -> Outcome {
    let pt = promote(p, t);
    let x = big(v);
    match op {
        UnaryOp::Plus => done(p, pt, x),
        UnaryOp::Minus => done(p, pt, -x),
        // bitwise complement: -x - 1 for signed, max - x for unsigned
        UnaryOp::BitNot if pt.is_signed() => done(p, pt, -x - 1),
        UnaryOp::BitNot => done(p, pt, hi(p, pt) - x),
        UnaryOp::LogNot => Outcome::Value(with_rank(true, 2), (v == 0) as i128),
    }
}

pub fn binary(p: &ImplParams, op: BinaryOp, ta: CIntType, a: i128, tb: CIntType, b: i128) -> Outcome {
    use BinaryOp::*;
    let sint = with_rank(true, 2);
    if matches!(op, Shl | Shr) {
        let lt = promote(p, ta);
        if b < 0 || b >= bits(p, lt) as i128 {
            return Outcome::Undefined;
        }
        let k = b as u32;
        return match op {
            Shl if lt.is_signed() && a < 0 => Outcome::Undefined,
            Shl => done(p, lt, big(a) << k),
            // floor division by 2^k
            _ => done(p, lt, big(a) >> k),
        };
    }
    let ct = common(p, ta, tb);
    let x = conv(p, ct, &big(a)).unwrap();
    let y = conv(p, ct, &big(b)).unwrap();
    let truth = |c: bool| Outcome::Value(sint, c as i128);
    match op {
        Add => done(p, ct, x + y),
        Sub => done(p, ct, x - y),
        Mul => done(p, ct, x * y),
        Div | Rem => {
            if y == BigInt::from(0) {
                return Outcome::Undefined;
            }
            // BigInt division truncates toward zero
            let q = &x / &y;
            if !fits(p, ct, &q) {
                return Outcome::Undefined;
            }
            if op == Div {
                done(p, ct, q)
            } else {
                done(p, ct, &x - &q * &y)
            }
        }
        BitAnd => pattern(p, ct, two(p, ct, &x) & two(p, ct, &y)),
        BitOr => pattern(p, ct, two(p, ct, &x) | two(p, ct, &y)),
        BitXor => pattern(p, ct, two(p, ct, &x) ^ two(p, ct, &y)),
        Lt => truth(x < y),
        Gt => truth(x > y),
        Le => truth(x <= y),
        Ge => truth(x >= y),
        Eq => truth(x == y),
        Ne => truth(x != y),
        Shl | Shr => unreachable!(),
    }
}

/// Bit pattern of `v` in `t`, as a non-negative number.
fn two(p: &ImplParams, t: CIntType, v: &BigInt) -> BigInt {
    let m = BigInt::from(1) << bits(p, t);
    ((v % &m) + &m) % &m
}

/// The value of type `t` whose bit pattern is `bits`.
fn pattern(p: &ImplParams, t: CIntType, b: BigInt) -> Outcome {
    let v = if t.is_signed() && b > hi(p, t) { b - (BigInt::from(1) << bits(p, t)) } else { b };
    Outcome::Value(t, i128::try_from(v).unwrap())
}
