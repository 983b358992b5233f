//! Ad hoc execution of generated C through the interpreter.

use super::{ir_type_of, load, param_types, run_with_fuel, seed_args, Exec, HarnessConfig, HarnessError};
use super::{EXIT_DIVERGENCE, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK};
use crate::ast::Ident;
use crate::codegen::{fuel_bounds, FuelBound};
use crate::dynamic::{init_fun_env, ComputationState, Interp, Value};
use crate::ir::{IrType, IrValue};
use crate::values::{ArrayValue, CIntType, ImplParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub text: String,
    pub exit: i32,
}

fn limit_name(s: &str) -> Option<(CIntType, bool)> {
    let (prefix, is_max) = match s.rsplit_once('_')? {
        (p, "MAX") => (p, true),
        (p, "MIN") => (p, false),
        _ => return None,
    };
    let short = match prefix {
        "SCHAR" => "schar",
        "UCHAR" => "uchar",
        "SHRT" => "short",
        "USHRT" => "ushort",
        "INT" => "int",
        "UINT" => "uint",
        "LONG" => "long",
        "ULONG" => "ulong",
        "LLONG" => "llong",
        "ULLONG" => "ullong",
        _ => return None,
    };
    Some((CIntType::from_short_name(short)?, is_max))
}

fn number(s: &str, ty: CIntType, params: &ImplParams) -> Result<i128, String> {
    if let Some((lt, is_max)) = limit_name(s) {
        return Ok(if is_max { params.max(lt) } else { params.min(lt) });
    }
    s.parse().map_err(|_| format!("`{s}` is not an integer of type {ty}"))
}

/// Parses one argument for a parameter of type `want`. Accepts `int:3`,
/// `uchar[]:1,2,3`, bare values such as `3`, `1,2,3` or `INT_MAX`.
pub fn parse_arg(s: &str, want: IrType, params: &ImplParams) -> Result<IrValue, String> {
    let (ty, body) = match s.split_once(':') {
        Some((t, body)) => {
            let ty = match t.strip_suffix("[]") {
                Some(e) => CIntType::from_short_name(e).map(IrType::Array),
                None => CIntType::from_short_name(t).map(IrType::Int),
            }
            .ok_or_else(|| format!("unknown type `{t}`"))?;
            if ty != want {
                return Err(format!("`{s}` does not match the parameter type"));
            }
            (ty, body)
        }
        None => (want, s),
    };
    match ty {
        IrType::Int(t) => {
            let n = number(body, t, params)?;
            params.make_int(t, n).map(IrValue::Int).map_err(|e| e.to_string())
        }
        IrType::Array(t) => {
            let vals = body
                .split(',')
                .map(|x| number(x.trim(), t, params))
                .collect::<Result<Vec<_>, _>>()?;
            ArrayValue::from_values(params, t, &vals).map(IrValue::Array).map_err(|e| e.to_string())
        }
    }
}

/// Runs the C translation of `fun` on `args` and describes the outcome.
pub fn cmd_run(src: &str, fun: &str, args: &[String], cfg: &HarnessConfig) -> Result<RunOutput, HarnessError> {
    let params = &cfg.params;
    let (_, t) = load(src, params)?;
    let bad = |msg: String| RunOutput {
        text: format!("error: {msg}\n"),
        exit: EXIT_INPUT,
    };
    let Some(types) = param_types(&t.tu, fun) else {
        return Ok(bad(format!("no C function `{fun}`")));
    };
    if types.len() != args.len() {
        return Ok(bad(format!("`{fun}` takes {} arguments, got {}", types.len(), args.len())));
    }
    let mut vals = Vec::new();
    for (a, ty) in args.iter().zip(types) {
        match parse_arg(a, ir_type_of(ty).expect("parameters are not void"), params) {
            Ok(v) => vals.push(v),
            Err(e) => return Ok(bad(e)),
        }
    }
    let env = init_fun_env(&t.tu).expect("translated units have distinct functions");
    let interp = Interp::new(params, &env);
    let mut st = ComputationState::new();
    let cvals = seed_args(&vals, &mut st);
    let bound = fuel_bounds(&t.tu).get(fun).copied().unwrap_or(FuelBound::LoopDependent);
    let id = Ident::new_unchecked(fun);
    let names: Vec<_> = t.tu.function(fun).unwrap().params.iter().map(|p| p.name.clone()).collect();
    Ok(
        match run_with_fuel(bound, cfg.fuel_cap, |fuel| interp.exec_fun(&id, cvals.clone(), st.clone(), fuel)) {
            Exec::Done((ret, st), _) => {
                let mut text = match ret {
                    Some(Value::Int(v)) => format!("{v}\n"),
                    Some(other) => format!("{other:?}\n"),
                    None => "void\n".to_string(),
                };
                for (n, v) in names.iter().zip(&cvals) {
                    if let Value::Pointer(p) = v {
                        if let Some(arr) = p.address.and_then(|a| st.heap().get(&a)) {
                            text.push_str(&format!("{} = {arr}\n", n.as_str()));
                        }
                    }
                }
                RunOutput { text, exit: EXIT_OK }
            }
            Exec::Failed(e, _) => RunOutput {
                text: format!("error: {}\n", e.kind()),
                exit: EXIT_DIVERGENCE,
            },
            Exec::Limit(fuel) => RunOutput {
                text: format!("limit: fuel exhausted at {fuel}\n"),
                exit: EXIT_INCONCLUSIVE,
            },
        },
    )
}
