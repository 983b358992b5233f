//! Seeded generation of argument tuples satisfying a function's guard.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::eval::DEFAULT_STEP_CAP;
use super::{EvalError, Evaluator, IrProgram, IrType, IrValue};
use crate::values::{ArrayValue, CIntType, ImplParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputConfig {
    /// Arrays get lengths in `[1, max_array_len]`.
    pub max_array_len: usize,
    /// Candidate tuples tried per accepted tuple before giving up.
    pub max_attempts: u64,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            max_array_len: 16,
            max_attempts: 10_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplingError {
    #[error("sampling exhausted for `{fun}`: no guard-satisfying input in {attempts} attempts")]
    Exhausted { fun: String, attempts: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Samples an integer of type `ty`, biased toward range boundaries and
/// small magnitudes.
pub fn sample_int(rng: &mut impl Rng, params: &ImplParams, ty: CIntType) -> i128 {
    let (lo, hi) = (params.min(ty), params.max(ty));
    let roll: f64 = rng.gen();
    if roll < 0.25 {
        let picks = [lo, lo + 1, -1, 0, 1, hi - 1, hi];
        let n = picks[rng.gen_range(0..picks.len())];
        n.clamp(lo, hi)
    } else if roll < 0.5 {
        rng.gen_range(-8i128..=8).clamp(lo, hi)
    } else {
        let width = params.width(ty);
        let bits = rng.gen_range(0..=width);
        let mag = if bits == 0 { 0 } else { rng.gen_range(0..(1i128 << bits)) };
        let n = if ty.is_signed() && rng.gen_bool(0.5) { -mag } else { mag };
        n.clamp(lo, hi)
    }
}

/// `count` argument tuples for `fun`, deterministic in `seed`. Each tuple
/// satisfies the type conjuncts and the extra guards.
pub fn gen_inputs(
    p: &IrProgram,
    fun: &str,
    seed: u64,
    count: usize,
    params: &ImplParams,
    cfg: &InputConfig,
) -> Result<Vec<Vec<IrValue>>, SamplingError> {
    let f = p.function(fun).ok_or_else(|| EvalError::UnknownFunction(fun.to_string()))?;
    let ev = Evaluator::new(p, params).with_step_cap(DEFAULT_STEP_CAP);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut attempts = 0;
        loop {
            if attempts >= cfg.max_attempts {
                return Err(SamplingError::Exhausted {
                    fun: fun.to_string(),
                    attempts,
                });
            }
            attempts += 1;
            let tuple: Vec<IrValue> = f
                .params
                .iter()
                .map(|prm| match prm.ty {
                    IrType::Int(t) => IrValue::Int(params.make_int(t, sample_int(&mut rng, params, t)).unwrap()),
                    IrType::Array(t) => {
                        let len = rng.gen_range(1..=cfg.max_array_len.max(1));
                        let vals: Vec<i128> = (0..len).map(|_| sample_int(&mut rng, params, t)).collect();
                        IrValue::Array(ArrayValue::from_values(params, t, &vals).unwrap())
                    }
                })
                .collect();
            if ev.guard_holds(fun, &tuple)? {
                out.push(tuple);
                break;
            }
        }
    }
    Ok(out)
}
