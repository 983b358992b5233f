//! Checks shared by the acceptance run and the property tests. Each returns
//! a short summary on success and the first counterexample on failure.

use super::cexpr::ExprGen;
use super::crun::run_c;
use super::irgen::random_program;
use super::oracle::{self, Outcome};
use super::{interesting, param_sets, CORPUS};
use cshallow::codegen::{fuel_bound, translate, FuelBound, Translation};
use cshallow::dynamic::Halt;
use cshallow::harness::{cmd_run, cmd_validate, HarnessConfig, EXIT_OK};
use cshallow::ir::{
    eval_ir, gen_inputs, parse_ir, print_ir, ArrayStrategy, EvalError, Evaluator, InputConfig, IrProgram, IrValue,
    DEFAULT_STEP_CAP,
};
use cshallow::pretty::{parse_expr, print_expr, print_transunit};
use cshallow::statics::check_transunit;
use cshallow::values::{ArrayValue, BinaryOp, CIntType, ImplParams, IntegerValue, UnaryOp};

pub type Check = Result<String, String>;

/// Large enough for every generated program to finish.
pub const BIG_FUEL: u64 = 1 << 22;

pub const LISTINGS: [&str; 4] = [
    "int f(int x, int y, int z) { return (x + y) * (z - 3); }",
    "unsigned int g(unsigned int x, unsigned int y) { unsigned int z = 1U; if (x < y) { z = z + x; } else { z = z + y; } return 2U * z; }",
    "unsigned int h(unsigned int n) { unsigned int r = 1U; while (n != 0U) { r = r * n; n = n - 1U; } return r; }",
    "void i(unsigned char *a, int x, int y) { a[x] = (unsigned char) 1; a[y] = (unsigned char) 2; }",
];

/// C tokens, ignoring whitespace.
pub fn tokens(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else {
            let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
            if ["<<", ">>", "<=", ">=", "==", "!=", "&&", "||"].contains(&two.as_str()) {
                out.push(two);
                i += 2;
            } else {
                out.push(c.to_string());
                i += 1;
            }
        }
    }
    out
}

fn corpus() -> (IrProgram, Translation) {
    let p = parse_ir(CORPUS).unwrap();
    let t = translate(&p, &ImplParams::default()).unwrap();
    (p, t)
}

pub fn listings_match() -> Check {
    let (_, t) = corpus();
    let printed = print_transunit(&t.tu);
    let got = tokens(&printed);
    let want: Vec<String> = LISTINGS.iter().flat_map(|l| tokens(l)).collect();
    if got == want {
        Ok(format!("{} tokens over 4 functions", got.len()))
    } else {
        let at = got.iter().zip(&want).position(|(a, b)| a != b).unwrap_or(got.len().min(want.len()));
        Err(format!("token {at}: got {:?}, want {:?}", got.get(at), want.get(at)))
    }
}

pub fn random_wellformed(seeds: std::ops::Range<u64>) -> Check {
    let params = ImplParams::default();
    let n = seeds.end - seeds.start;
    for s in seeds {
        let p = random_program(s);
        let t = translate(&p, &params).map_err(|e| format!("seed {s}: {e}\n{}", print_ir(&p)))?;
        check_transunit(&t.tu, &params).map_err(|e| format!("seed {s}: {e}"))?;
    }
    let (_, t) = corpus();
    check_transunit(&t.tu, &params).map_err(|e| format!("corpus: {e}"))?;
    Ok(format!("{n} random programs and the corpus are wellformed"))
}

pub fn corpus_validates() -> Check {
    let cfg = HarnessConfig {
        tests: 1000,
        seed: 42,
        ..HarnessConfig::default()
    };
    let r = cmd_validate(CORPUS, "fghi.lisp", &cfg).map_err(|e| e.to_string())?;
    if r.divergences() != 0 || r.exit_code() != EXIT_OK {
        return Err(format!("{} divergences, exit {}", r.divergences(), r.exit_code()));
    }
    let spots: [(&str, &[&str], &str); 5] = [
        ("h", &["uint:0"], "uint 1\n"),
        ("h", &["uint:5"], "uint 120\n"),
        ("h", &["uint:13"], "uint 1932053504\n"),
        ("f", &["3", "4", "5"], "int 14\n"),
        ("i", &["uchar[]:9,9,9", "0", "2"], "void\na = uchar[] 1,9,2\n"),
    ];
    for (f, args, want) in spots {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let out = cmd_run(CORPUS, f, &args, &cfg).map_err(|e| e.to_string())?;
        if out.text != want {
            return Err(format!("{f}{args:?}: got {:?}, want {want:?}", out.text));
        }
    }
    let tried: usize = r.functions.iter().chain(&r.loops).map(|x| x.inputs_tried).sum();
    Ok(format!("{tried} agreements, spot values match"))
}

fn got(r: Result<IntegerValue, cshallow::values::WellDefError>) -> Outcome {
    match r {
        Ok(v) => Outcome::Value(v.ty(), v.value()),
        Err(_) => Outcome::Undefined,
    }
}

/// Every unary, binary and conversion cell on boundary values.
pub fn ub_matrix() -> Check {
    let mut cells = [0usize; 3];
    let mut undefined = 0;
    for p in param_sets() {
        let int = |t, n| p.make_int(t, n).unwrap();
        let mut cmp = |have: Outcome, want: Outcome, what: String| {
            if want == Outcome::Undefined {
                undefined += 1;
            }
            if have == want {
                Ok(())
            } else {
                Err(format!("{what}: got {have:?}, oracle {want:?}"))
            }
        };
        for op in UnaryOp::ALL {
            for t in CIntType::ALL {
                cells[0] += 1;
                for v in interesting(&p, t) {
                    cmp(got(p.exec_unary(op, int(t, v))), oracle::unary(&p, op, t, v), format!("{op:?} ({t}) {v}"))?;
                }
            }
        }
        for from in CIntType::ALL {
            for to in CIntType::ALL {
                cells[2] += 1;
                for v in interesting(&p, from) {
                    cmp(got(p.convert(int(from, v), to)), oracle::convert(&p, to, v), format!("({to}) ({from}) {v}"))?;
                }
            }
        }
        for op in BinaryOp::ALL {
            for a in CIntType::ALL {
                for b in CIntType::ALL {
                    cells[1] += 1;
                    let (xs, ys) = (interesting(&p, a), interesting(&p, b));
                    for x in &xs {
                        for y in &ys {
                            let have = got(p.exec_binary(op, int(a, *x), int(b, *y)));
                            cmp(have, oracle::binary(&p, op, a, *x, b, *y), format!("{op:?} ({a}) {x}, ({b}) {y}"))?;
                        }
                    }
                }
            }
        }
    }
    forced()?;
    let k = param_sets().len();
    Ok(format!(
        "{}/{}/{} cells per parameter set, {undefined} undefined outcomes confirmed",
        cells[0] / k,
        cells[1] / k,
        cells[2] / k
    ))
}

fn forced() -> Result<(), String> {
    let p = ImplParams::default();
    let (s, u) = (CIntType::SINT, CIntType::UINT);
    let int = |t, n| p.make_int(t, n).unwrap();
    let undefined = [
        ("INT_MAX + 1", p.exec_binary(BinaryOp::Add, int(s, p.max(s)), int(s, 1))),
        ("1U << 32", p.exec_binary(BinaryOp::Shl, int(u, 1), int(s, 32))),
        ("1 / 0", p.exec_binary(BinaryOp::Div, int(s, 1), int(s, 0))),
        ("INT_MIN / -1", p.exec_binary(BinaryOp::Div, int(s, p.min(s)), int(s, -1))),
        ("INT_MIN % -1", p.exec_binary(BinaryOp::Rem, int(s, p.min(s)), int(s, -1))),
    ];
    for (what, r) in undefined {
        if r.is_ok() {
            return Err(format!("{what} should be undefined"));
        }
    }
    let wrapped = p.exec_binary(BinaryOp::Sub, int(u, 0), int(u, 1)).map_err(|e| e.to_string())?;
    if wrapped.value() != (1 << 32) - 1 {
        return Err(format!("0U - 1U gave {wrapped}"));
    }
    let arr = ArrayValue::from_values(&p, CIntType::UCHAR, &[9, 9, 9]).unwrap();
    for bad in [3, -1] {
        if arr.read(int(s, bad)).is_ok() || arr.write(int(s, bad), int(CIntType::UCHAR, 1)).is_ok() {
            return Err(format!("index {bad} of a 3-element array should be out of bounds"));
        }
    }
    Ok(())
}

/// Names of the functions and loops of `p`, with their fuel bound.
fn bounds(p: &IrProgram, t: &Translation) -> Vec<(String, FuelBound)> {
    p.functions
        .iter()
        .map(|f| {
            let b = fuel_bound(&f.name, &t.tu).unwrap_or(FuelBound::LoopDependent);
            (f.name.clone(), b)
        })
        .collect()
}

fn inputs(p: &IrProgram, name: &str, seed: u64, n: usize) -> Vec<Vec<IrValue>> {
    let cfg = InputConfig {
        max_array_len: 8,
        max_attempts: 10_000,
    };
    gen_inputs(p, name, seed, n, &ImplParams::default(), &cfg).unwrap()
}

/// IR success must be matched exactly by the C code; an IR guard violation
/// must be matched by a C run error.
pub fn differential(seeds: std::ops::Range<u64>, per_fn: usize) -> Check {
    let params = ImplParams::default();
    let (mut agree, mut ub) = (0, 0);
    for s in seeds {
        let p = random_program(s);
        let t = translate(&p, &params).map_err(|e| format!("seed {s}: {e}"))?;
        for (name, _) in bounds(&p, &t) {
            for args in inputs(&p, &name, s, per_fn) {
                let want = eval_ir(&p, &params, &name, &args, DEFAULT_STEP_CAP);
                let have = run_c(&p, &t, &params, &name, &args, BIG_FUEL);
                match (&want, &have) {
                    (Ok(w), Ok(h)) if w == h => agree += 1,
                    (Err(EvalError::GuardViolation(_)), Err(Halt::Error(_))) => ub += 1,
                    _ => return Err(format!("seed {s} {name} {args:?}: IR {want:?}, C {have:?}")),
                }
            }
        }
    }
    Ok(format!("{agree} agreements, {ub} shared run errors"))
}

/// More fuel never changes a finished result, and the constant bound
/// always suffices.
pub fn fuel_properties(seeds: std::ops::Range<u64>, per_fn: usize) -> Check {
    let params = ImplParams::default();
    let (mut pairs, mut bounded) = (0, 0);
    for s in seeds {
        let p = random_program(s);
        let t = translate(&p, &params).map_err(|e| format!("seed {s}: {e}"))?;
        for (name, bound) in bounds(&p, &t) {
            for (k, args) in inputs(&p, &name, s ^ 0x5eed, per_fn).into_iter().enumerate() {
                let small = 1 + (s + k as u64) % 40;
                let lo = run_c(&p, &t, &params, &name, &args, small);
                let hi = run_c(&p, &t, &params, &name, &args, small * 3 + 7);
                if !matches!(lo, Err(Halt::Limit)) && lo != hi {
                    return Err(format!("seed {s} {name}: fuel {small} gave {lo:?}, more gave {hi:?}"));
                }
                pairs += 1;
                if let FuelBound::Constant(b) = bound {
                    if run_c(&p, &t, &params, &name, &args, b) == Err(Halt::Limit) {
                        return Err(format!("seed {s} {name}: constant bound {b} ran out"));
                    }
                    bounded += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} fuel pairs monotone, {bounded} runs within the constant bound"))
}

/// Printing then parsing gives back the expression.
pub fn round_trip(seeds: std::ops::Range<u64>) -> Check {
    let n = seeds.end - seeds.start;
    for s in seeds {
        let (e, _) = ExprGen::new(s).expr(4);
        let text = print_expr(&e);
        match parse_expr(&text) {
            Ok(back) if back == e => {}
            other => return Err(format!("seed {s}: {text} reparsed as {other:?}")),
        }
    }
    Ok(format!("{n} expressions"))
}

/// Dropping any pair of parentheses changes the parse or breaks it.
pub fn parens_minimal(seeds: std::ops::Range<u64>) -> Check {
    let (mut exprs, mut pairs) = (0, 0);
    for s in seeds {
        let (e, _) = ExprGen::new(s).expr(4);
        let text = print_expr(&e);
        let mut stack = Vec::new();
        for (i, c) in text.char_indices() {
            match c {
                '(' => stack.push(i),
                ')' => {
                    let open = stack.pop().unwrap();
                    let cut = format!("{}{}{}", &text[..open], &text[open + 1..i], &text[i + 1..]);
                    if parse_expr(&cut).is_ok_and(|x| x == e) {
                        return Err(format!("seed {s}: redundant parentheses at {open} in {text}"));
                    }
                    pairs += 1;
                }
                _ => {}
            }
        }
        exprs += 1;
    }
    Ok(format!("{pairs} parenthesis pairs in {exprs} expressions are needed"))
}

fn strategies_on(p: &IrProgram, seed: u64, per_fn: usize) -> Result<usize, String> {
    let params = ImplParams::default();
    let cow = Evaluator::new(p, &params).with_strategy(ArrayStrategy::CopyOnWrite);
    let inplace = Evaluator::new(p, &params).with_strategy(ArrayStrategy::InPlace);
    let mut n = 0;
    for f in &p.functions {
        for args in inputs(p, &f.name, seed, per_fn) {
            let (a, b) = (cow.call(&f.name, &args), inplace.call(&f.name, &args));
            if a != b {
                return Err(format!("{} {args:?}: copy-on-write {a:?}, in-place {b:?}", f.name));
            }
            n += 1;
        }
    }
    Ok(n)
}

pub fn strategies_agree(seeds: std::ops::Range<u64>, per_fn: usize) -> Check {
    let (p, _) = corpus();
    let mut n = strategies_on(&p, 42, 200).map_err(|e| format!("corpus: {e}"))?;
    let progs = seeds.end - seeds.start;
    for s in seeds {
        n += strategies_on(&random_program(s), s, per_fn).map_err(|e| format!("seed {s}: {e}"))?;
    }
    Ok(format!("{n} calls over the corpus and {progs} random programs"))
}

pub fn reports_reproducible() -> Check {
    let cfg = HarnessConfig {
        tests: 300,
        seed: 7,
        ..HarnessConfig::default()
    };
    let a = cmd_validate(CORPUS, "fghi.lisp", &cfg).map_err(|e| e.to_string())?.to_json();
    let b = cmd_validate(CORPUS, "fghi.lisp", &cfg).map_err(|e| e.to_string())?.to_json();
    if a == b {
        Ok(format!("{} identical bytes", a.len()))
    } else {
        Err("reports differ between runs".into())
    }
}
