mod common;

use common::cexpr::ExprGen;
use common::criteria::{parens_minimal, round_trip};
use cshallow::pretty::{parse_expr, print_expr};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse(seed in any::<u64>(), depth in 0..6u32) {
        let (e, _) = ExprGen::new(seed).expr(depth);
        let text = print_expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }
}

#[test]
fn fixed_seeds_round_trip() {
    round_trip(0..2000).unwrap();
}

#[test]
fn parentheses_are_minimal() {
    parens_minimal(0..300).unwrap();
}

#[test]
fn known_shapes() {
    for src in ["a - (b - c)", "a - b - c", "(a + b) * c", "-(-x)", "(int) x + 1", "a[i + 1] << 2", "x < y == 1"] {
        let e = parse_expr(src).unwrap();
        assert_eq!(print_expr(&e), src);
    }
}
