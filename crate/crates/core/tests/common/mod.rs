#![allow(dead_code)]

pub mod cexpr;
pub mod criteria;
pub mod crun;
pub mod irgen;
pub mod oracle;

use cshallow::values::{CIntType, ImplParams};

pub const CORPUS: &str = include_str!("../../../../corpus/fghi.lisp");

/// Default sizes plus a narrow configuration where `int` is 16 bits and
/// `long` 32, so that promotions and conversions take other branches.
pub fn param_sets() -> Vec<ImplParams> {
    vec![
        ImplParams::default(),
        ImplParams {
            bits_char: 8,
            bits_short: 16,
            bits_int: 16,
            bits_long: 32,
            bits_llong: 64,
        },
    ]
}

/// Boundary values of `ty`, followed by small ones.
pub fn interesting(params: &ImplParams, ty: CIntType) -> Vec<i128> {
    let (lo, hi) = (params.min(ty), params.max(ty));
    let mut v = vec![lo, lo + 1, -2, -1, 0, 1, 2, 3, 7, 8, 15, 16, 31, 32, 63, 64, hi - 1, hi, hi / 2, lo / 2];
    v.retain(|n| (lo..=hi).contains(n));
    v.sort();
    v.dedup();
    v
}
