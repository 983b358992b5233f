//! Runs generated C on IR argument values and reports outputs in the IR
//! evaluator's order.

use cshallow::ast::Ident;
use cshallow::codegen::Translation;
use cshallow::dynamic::{init_fun_env, Address, ComputationState, Frame, Halt, Interp, Pointer, Value};
use cshallow::ir::{IrProgram, IrValue};
use cshallow::values::ImplParams;

fn seed(args: &[IrValue], st: &mut ComputationState) -> Vec<Value> {
    let mut next = 0;
    args.iter()
        .map(|a| match a {
            IrValue::Int(v) => Value::Int(*v),
            IrValue::Array(arr) => {
                next += 1;
                st.insert_array(Address(next), arr.clone());
                Value::Pointer(Pointer {
                    referent: arr.elem_type(),
                    address: Some(Address(next)),
                })
            }
        })
        .collect()
}

/// Outcome of running the C code for `name` with `fuel`.
pub fn run_c(
    p: &IrProgram,
    t: &Translation,
    params: &ImplParams,
    name: &str,
    args: &[IrValue],
    fuel: u64,
) -> Result<Vec<IrValue>, Halt> {
    let env = init_fun_env(&t.tu).unwrap();
    let interp = Interp::new(params, &env);
    let f = p.function(name).unwrap();
    let names: Vec<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
    let mut st = ComputationState::new();
    let vals = seed(args, &mut st);
    let out = &t.outputs[name];
    let array_at = |st: &ComputationState, v: &Value| match v {
        Value::Pointer(p) => IrValue::Array(st.heap()[&p.address.unwrap()].clone()),
        Value::Int(_) => panic!("not an array"),
    };
    if f.is_loop {
        st.push_frame(Frame::new(Ident::new_unchecked(name)));
        for (n, v) in names.iter().zip(&vals) {
            st.create_var(&Ident::new_unchecked(*n), *v).unwrap();
        }
        let code = &t.loops[name];
        let (ret, st) = interp.exec_stmt_while(&code.test, &code.body, st, fuel)?;
        assert!(ret.is_none());
        return Ok(out
            .vars
            .iter()
            .map(|v| match st.read_var(&Ident::new_unchecked(v)).unwrap() {
                Value::Int(i) => IrValue::Int(i),
                ptr => array_at(&st, &ptr),
            })
            .collect());
    }
    let (ret, st) = interp.exec_fun(&Ident::new_unchecked(name), vals.clone(), st, fuel)?;
    let mut res: Vec<IrValue> = ret.map(|v| IrValue::Int(v.as_int().unwrap())).into_iter().collect();
    for a in &out.arrays {
        let i = names.iter().position(|n| n == a).unwrap();
        res.push(array_at(&st, &vals[i]));
    }
    Ok(res)
}
