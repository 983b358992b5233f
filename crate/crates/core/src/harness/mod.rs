//! Translation validation by differential execution: every function (and
//! every loop) of a translated program is run on sampled inputs both by the
//! IR evaluator and by the C interpreter, and the outputs are compared.

mod config;
mod run;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use config::{ConfigError, HarnessConfig, DEFAULT_FUEL_CAP, FUEL_BASE};
pub use run::{cmd_run, parse_arg, RunOutput};

use crate::ast::{Ident, TransUnit};
use crate::codegen::{fuel_bounds, translate, FuelBound, Translation, TranslationError};
use crate::dynamic::{init_fun_env, Address, ComputationState, DynError, Frame, Halt, Interp, Pointer, Value};
use crate::ir::{gen_inputs, parse_ir, EvalError, Evaluator, IrParseError, IrProgram, IrType, IrValue, SamplingError};
use crate::pretty::{print_transunit_with, PrettyOptions};
use crate::values::{ArrayValue, ImplParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// A pipeline failure before any comparison could be made.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse: {0}")]
    Parse(#[from] IrParseError),
    #[error("check: {0}")]
    Check(crate::ir::IrError),
    #[error("translate: {0}")]
    Translate(TranslationError),
    #[error("static: {0}")]
    Static(TranslationError),
    #[error("inputs: {0}")]
    Inputs(#[from] SamplingError),
}

impl From<TranslationError> for HarnessError {
    fn from(e: TranslationError) -> Self {
        match e {
            TranslationError::Ir(e) => HarnessError::Check(e),
            e @ (TranslationError::Static(_) | TranslationError::Syntax(_)) => HarnessError::Static(e),
            e => HarnessError::Translate(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub input: Vec<String>,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Outcome of validating one function or loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub name: String,
    /// `agreements + divergences`; inconclusive inputs are not counted.
    pub inputs_tried: usize,
    pub agreements: usize,
    pub divergences: usize,
    pub inconclusive: usize,
    /// `"constant N"` or `"loop-dependent"`.
    pub fuel_bound: String,
    /// Largest fuel a conclusive C run was given.
    pub fuel_used: u64,
    pub first_divergence: Option<Divergence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub program: String,
    pub static_result: String,
    pub seed: u64,
    pub tests: usize,
    pub fuel_cap: u64,
    pub params: ImplParams,
    pub functions: Vec<Record>,
    pub loops: Vec<Record>,
}

impl ValidationReport {
    pub fn divergences(&self) -> usize {
        self.functions.iter().chain(&self.loops).map(|r| r.divergences).sum()
    }

    pub fn inconclusive(&self) -> usize {
        self.functions.iter().chain(&self.loops).map(|r| r.inconclusive).sum()
    }

    pub fn exit_code(&self) -> i32 {
        if self.divergences() > 0 {
            EXIT_DIVERGENCE
        } else if self.inconclusive() > 0 {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Parses and translates an IR source.
pub fn load(src: &str, params: &ImplParams) -> Result<(IrProgram, Translation), HarnessError> {
    let p = parse_ir(src)?;
    let t = translate(&p, params)?;
    Ok((p, t))
}

/// The `.c` text and the fuel bound table for an IR source.
pub fn cmd_gen(src: &str, cfg: &HarnessConfig) -> Result<(String, String), HarnessError> {
    let (_, t) = load(src, &cfg.params)?;
    let c = print_transunit_with(&t.tu, PrettyOptions { indent: cfg.indent });
    let bounds = fuel_bounds(&t.tu);
    let mut table = String::new();
    for f in &t.tu.fundefs {
        let b = bounds[f.name.as_str()];
        table.push_str(&format!("{}\t{}\n", f.name.as_str(), bound_label(b)));
    }
    Ok((c, table))
}

pub fn cmd_validate(src: &str, program: &str, cfg: &HarnessConfig) -> Result<ValidationReport, HarnessError> {
    let (p, t) = load(src, &cfg.params)?;
    validate_translation(&p, &t, program, cfg)
}

/// Validates every function and loop of `p` against `t`, callees first.
pub fn validate_translation(
    p: &IrProgram,
    t: &Translation,
    program: &str,
    cfg: &HarnessConfig,
) -> Result<ValidationReport, HarnessError> {
    let mut functions = Vec::new();
    let mut loops = Vec::new();
    for f in &p.functions {
        if f.is_loop {
            loops.push(validate_loop(&f.name, t, p, cfg)?);
        } else {
            functions.push(validate_function(&f.name, t, p, cfg)?);
        }
    }
    functions.sort_by(|a, b| a.name.cmp(&b.name));
    loops.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ValidationReport {
        program: program.to_string(),
        static_result: "wellformed".into(),
        seed: cfg.seed,
        tests: cfg.tests,
        fuel_cap: cfg.fuel_cap,
        params: cfg.params,
        functions,
        loops,
    })
}

fn bound_label(b: FuelBound) -> String {
    match b {
        FuelBound::Constant(n) => format!("constant {n}"),
        FuelBound::LoopDependent => "loop-dependent".into(),
    }
}

/// Result of running C code under a fuel strategy.
pub enum Exec<T> {
    Done(T, u64),
    Failed(DynError, u64),
    /// Fuel ran out even at the cap.
    Limit(u64),
}

/// Runs `f` with the constant bound if there is one, otherwise with fuel
/// doubling from [`FUEL_BASE`] up to `cap`.
pub fn run_with_fuel<T>(bound: FuelBound, cap: u64, mut f: impl FnMut(u64) -> Result<T, Halt>) -> Exec<T> {
    let mut fuel = match bound {
        FuelBound::Constant(n) => n,
        FuelBound::LoopDependent => FUEL_BASE.min(cap),
    };
    loop {
        match f(fuel) {
            Ok(v) => return Exec::Done(v, fuel),
            Err(Halt::Error(e)) => return Exec::Failed(e, fuel),
            Err(Halt::Limit) => {
                if matches!(bound, FuelBound::Constant(_)) || fuel >= cap {
                    return Exec::Limit(fuel);
                }
                fuel = fuel.saturating_mul(2).min(cap);
            }
        }
    }
}

struct Tally {
    record: Record,
}

impl Tally {
    fn new(name: &str, bound: FuelBound) -> Self {
        Tally {
            record: Record {
                name: name.to_string(),
                inputs_tried: 0,
                agreements: 0,
                divergences: 0,
                inconclusive: 0,
                fuel_bound: bound_label(bound),
                fuel_used: 0,
                first_divergence: None,
            },
        }
    }

    fn agree(&mut self, fuel: u64) {
        self.record.inputs_tried += 1;
        self.record.agreements += 1;
        self.record.fuel_used = self.record.fuel_used.max(fuel);
    }

    fn diverge(&mut self, d: Divergence) {
        self.record.inputs_tried += 1;
        self.record.divergences += 1;
        self.record.first_divergence.get_or_insert(d);
    }

    fn inconclusive(&mut self) {
        self.record.inconclusive += 1;
    }
}

fn show(vs: &[IrValue]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

/// Seeds each array argument at its own address and builds the C values.
fn seed_args(args: &[IrValue], st: &mut ComputationState) -> Vec<Value> {
    let mut next = 0;
    let vals = args
        .iter()
        .map(|a| match a {
            IrValue::Int(v) => Value::Int(*v),
            IrValue::Array(arr) => {
                let addr = Address(next);
                next += 1;
                st.insert_array(addr, arr.clone());
                Value::Pointer(Pointer {
                    referent: arr.elem_type(),
                    address: Some(addr),
                })
            }
        })
        .collect();
    let addrs: BTreeSet<_> = st.heap().keys().collect();
    assert_eq!(addrs.len(), next as usize, "array arguments must not alias");
    vals
}

fn address_of(v: &Value) -> Option<Address> {
    match v {
        Value::Pointer(p) => p.address,
        Value::Int(_) => None,
    }
}

/// Checks that arrays outside `outputs` kept their initial contents.
fn untouched(args: &[IrValue], cvals: &[Value], names: &[String], outputs: &[String], st: &ComputationState) -> Option<String> {
    if st.heap().len() != cvals.iter().filter(|v| address_of(v).is_some()).count() {
        return Some("heap gained or lost arrays".into());
    }
    for ((a, v), n) in args.iter().zip(cvals).zip(names) {
        if let (IrValue::Array(before), Some(addr)) = (a, address_of(v)) {
            if !outputs.contains(n) && st.heap().get(&addr) != Some(before) {
                return Some(format!("array `{n}` is not an output but changed"));
            }
        }
    }
    None
}

fn heap_array(st: &ComputationState, addr: Option<Address>) -> Option<ArrayValue> {
    addr.and_then(|a| st.heap().get(&a).cloned())
}

fn reference(ev: &Evaluator, name: &str, args: &[IrValue]) -> Result<Vec<IrValue>, EvalError> {
    ev.call(name, args)
}

pub fn validate_function(name: &str, t: &Translation, p: &IrProgram, cfg: &HarnessConfig) -> Result<Record, HarnessError> {
    let f = p.function(name).expect("known function");
    let params = &cfg.params;
    let inputs = gen_inputs(p, name, cfg.seed, cfg.tests, params, &cfg.input_config())?;
    let env = init_fun_env(&t.tu).expect("translated units have distinct functions");
    let interp = Interp::new(params, &env);
    let ev = Evaluator::new(p, params).with_step_cap(cfg.step_cap);
    let bound = fuel_bounds(&t.tu).get(name).copied().unwrap_or(FuelBound::LoopDependent);
    let outputs = &t.outputs[name];
    let names: Vec<String> = f.params.iter().map(|p| p.name.clone()).collect();
    let id = Ident::new_unchecked(name);
    let mut tally = Tally::new(name, bound);
    for args in &inputs {
        let expected = match reference(&ev, name, args) {
            Ok(v) => v,
            Err(EvalError::CapExceeded(_)) => {
                tally.inconclusive();
                continue;
            }
            Err(e) => {
                tally.diverge(Divergence {
                    input: show(args),
                    expected: vec![format!("error: {e}")],
                    actual: vec![],
                    note: Some("reference evaluation failed on a guard-satisfying input".into()),
                });
                continue;
            }
        };
        let mut st = ComputationState::new();
        let cvals = seed_args(args, &mut st);
        let run = run_with_fuel(bound, cfg.fuel_cap, |fuel| interp.exec_fun(&id, cvals.clone(), st.clone(), fuel));
        match run {
            Exec::Limit(_) => tally.inconclusive(),
            Exec::Failed(e, _) => tally.diverge(Divergence {
                input: show(args),
                expected: show(&expected),
                actual: vec![format!("error: {e}")],
                note: None,
            }),
            Exec::Done((ret, st), fuel) => {
                let mut actual = Vec::new();
                let mut note = None;
                match (ret, outputs.result) {
                    (Some(Value::Int(v)), Some(_)) => actual.push(IrValue::Int(v)),
                    (None, None) => {}
                    (r, _) => note = Some(format!("unexpected return value {r:?}")),
                }
                for a in &outputs.arrays {
                    let i = names.iter().position(|n| n == a).expect("output is a parameter");
                    match heap_array(&st, address_of(&cvals[i])) {
                        Some(arr) => actual.push(IrValue::Array(arr)),
                        None => note = Some(format!("array `{a}` missing from the heap")),
                    }
                }
                if !st.frames().is_empty() {
                    note = Some("frame stack not restored".into());
                }
                note = note.or_else(|| untouched(args, &cvals, &names, &outputs.arrays, &st));
                if note.is_none() && actual == expected {
                    tally.agree(fuel);
                } else {
                    tally.diverge(Divergence {
                        input: show(args),
                        expected: show(&expected),
                        actual: show(&actual),
                        note,
                    });
                }
            }
        }
    }
    Ok(tally.record)
}

pub fn validate_loop(name: &str, t: &Translation, p: &IrProgram, cfg: &HarnessConfig) -> Result<Record, HarnessError> {
    let f = p.function(name).expect("known loop");
    let params = &cfg.params;
    let inputs = gen_inputs(p, name, cfg.seed, cfg.tests, params, &cfg.input_config())?;
    let env = init_fun_env(&t.tu).expect("translated units have distinct functions");
    let interp = Interp::new(params, &env);
    let ev = Evaluator::new(p, params).with_step_cap(cfg.step_cap);
    let code = &t.loops[name];
    let outputs = &t.outputs[name];
    let names: Vec<String> = f.params.iter().map(|p| p.name.clone()).collect();
    let mut tally = Tally::new(name, FuelBound::LoopDependent);
    for args in &inputs {
        let expected = match reference(&ev, name, args) {
            Ok(v) => v,
            Err(EvalError::CapExceeded(_)) => {
                tally.inconclusive();
                continue;
            }
            Err(e) => {
                tally.diverge(Divergence {
                    input: show(args),
                    expected: vec![format!("error: {e}")],
                    actual: vec![],
                    note: Some("reference evaluation failed on a guard-satisfying input".into()),
                });
                continue;
            }
        };
        let mut st = ComputationState::new();
        let cvals = seed_args(args, &mut st);
        st.push_frame(Frame::new(Ident::new_unchecked(name)));
        for (n, v) in names.iter().zip(&cvals) {
            st.create_var(&Ident::new_unchecked(n), *v).expect("fresh frame");
        }
        let run = run_with_fuel(FuelBound::LoopDependent, cfg.fuel_cap, |fuel| {
            interp.exec_stmt_while(&code.test, &code.body, st.clone(), fuel)
        });
        match run {
            Exec::Limit(_) => tally.inconclusive(),
            Exec::Failed(e, _) => tally.diverge(Divergence {
                input: show(args),
                expected: show(&expected),
                actual: vec![format!("error: {e}")],
                note: None,
            }),
            Exec::Done((ret, st), fuel) => {
                let mut actual = Vec::new();
                let mut note = ret.map(|r| format!("loop returned {r:?}"));
                for v in &outputs.vars {
                    match st.read_var(&Ident::new_unchecked(v)) {
                        Ok(Value::Int(x)) => actual.push(IrValue::Int(x)),
                        Ok(Value::Pointer(ptr)) => match heap_array(&st, ptr.address) {
                            Some(arr) => actual.push(IrValue::Array(arr)),
                            None => note = Some(format!("array `{v}` missing from the heap")),
                        },
                        Err(e) => note = Some(format!("reading `{v}`: {e}")),
                    }
                }
                if st.frames().len() != 1 || st.frames()[0].scopes().len() != 1 {
                    note = note.or(Some("scopes not restored".into()));
                }
                note = note.or_else(|| untouched(args, &cvals, &names, &outputs.vars, &st));
                if note.is_none() && actual == expected {
                    tally.agree(fuel);
                } else {
                    tally.diverge(Divergence {
                        input: show(args),
                        expected: show(&expected),
                        actual: show(&actual),
                        note,
                    });
                }
            }
        }
    }
    Ok(tally.record)
}

/// Typed C arguments for `f`'s parameters.
pub(crate) fn param_types(tu: &TransUnit, name: &str) -> Option<Vec<crate::ast::CType>> {
    tu.function(name).map(|f| f.params.iter().map(|p| p.ty).collect())
}

pub(crate) fn ir_type_of(t: crate::ast::CType) -> Option<IrType> {
    match t {
        crate::ast::CType::Int(i) => Some(IrType::Int(i)),
        crate::ast::CType::Pointer(i) => Some(IrType::Array(i)),
        crate::ast::CType::Void => None,
    }
}
