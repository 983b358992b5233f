use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::DynError;
use crate::ast::Ident;
use crate::values::{ArrayValue, CIntType, IntegerValue};

/// Opaque heap key. No arithmetic is ever performed on addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Address(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pointer {
    pub referent: CIntType,
    /// `None` is the null pointer.
    pub address: Option<Address>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    Int(IntegerValue),
    Pointer(Pointer),
}

impl Value {
    pub fn as_int(&self) -> Option<IntegerValue> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Pointer(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Pointer(Pointer { referent, address: Some(a) }) => {
                write!(f, "{} *@{}", referent.short_name(), a.0)
            }
            Value::Pointer(Pointer { referent, address: None }) => {
                write!(f, "{} *null", referent.short_name())
            }
        }
    }
}

pub type Scope = HashMap<Ident, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub function: Ident,
    scopes: Vec<Scope>,
}

impl Frame {
    /// A frame with one empty scope.
    pub fn new(function: Ident) -> Self {
        Frame {
            function,
            scopes: vec![Scope::new()],
        }
    }

    pub fn scopes(&self) -> &[Scope] {
        &self.scopes
    }

    pub(crate) fn top_scope_mut(&mut self) -> &mut Scope {
        self.scopes.last_mut().expect("a frame has at least one scope")
    }
}

/// Call stack plus heap. Operations update the state in place; execution
/// threads a state by value so each run owns its own.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComputationState {
    frames: Vec<Frame>,
    heap: BTreeMap<Address, ArrayValue>,
}

impl ComputationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn heap(&self) -> &BTreeMap<Address, ArrayValue> {
        &self.heap
    }

    /// Seeds an array at `addr`. Arrays are created only from outside the
    /// executed code.
    pub fn insert_array(&mut self, addr: Address, a: ArrayValue) {
        self.heap.insert(addr, a);
    }

    pub fn push_frame(&mut self, frame: Frame) {
        self.frames.push(frame);
    }

    pub fn pop_frame(&mut self) -> Result<Frame, DynError> {
        self.frames.pop().ok_or(DynError::NoFrame)
    }

    pub fn top_frame(&self) -> Result<&Frame, DynError> {
        self.frames.last().ok_or(DynError::NoFrame)
    }

    fn top_frame_mut(&mut self) -> Result<&mut Frame, DynError> {
        self.frames.last_mut().ok_or(DynError::NoFrame)
    }

    pub fn push_scope(&mut self) -> Result<(), DynError> {
        self.top_frame_mut()?.scopes.push(Scope::new());
        Ok(())
    }

    /// The outermost scope of a frame is never popped; an attempt to do so
    /// reports `NoFrame`.
    pub fn pop_scope(&mut self) -> Result<(), DynError> {
        let frame = self.top_frame_mut()?;
        if frame.scopes.len() <= 1 {
            return Err(DynError::NoFrame);
        }
        frame.scopes.pop();
        Ok(())
    }

    pub fn create_var(&mut self, name: &Ident, v: Value) -> Result<(), DynError> {
        let frame = self.top_frame_mut()?;
        let scope = frame.scopes.last_mut().ok_or(DynError::NoFrame)?;
        if scope.contains_key(name) {
            return Err(DynError::DuplicateVar(name.clone()));
        }
        scope.insert(name.clone(), v);
        Ok(())
    }

    pub fn read_var(&self, name: &Ident) -> Result<Value, DynError> {
        self.top_frame()?
            .scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .ok_or_else(|| DynError::UnboundVar(name.clone()))
    }

    pub fn write_var(&mut self, name: &Ident, v: Value) -> Result<(), DynError> {
        let frame = self.top_frame_mut()?;
        let slot = frame
            .scopes
            .iter_mut()
            .rev()
            .find_map(|s| s.get_mut(name))
            .ok_or_else(|| DynError::UnboundVar(name.clone()))?;
        if !same_type(slot, &v) {
            return Err(DynError::TypeMismatch(format!(
                "assigning {v} to `{name}` holding {slot}"
            )));
        }
        *slot = v;
        Ok(())
    }

    pub fn read_array(&self, addr: Address) -> Result<&ArrayValue, DynError> {
        self.heap.get(&addr).ok_or(DynError::NoSuchArray(addr))
    }

    pub fn write_array(&mut self, addr: Address, a: ArrayValue) -> Result<(), DynError> {
        let slot = self.heap.get_mut(&addr).ok_or(DynError::NoSuchArray(addr))?;
        if slot.elem_type() != a.elem_type() {
            return Err(DynError::TypeMismatch(format!(
                "writing {} array over {} array at @{}",
                a.elem_type(),
                slot.elem_type(),
                addr.0
            )));
        }
        *slot = a;
        Ok(())
    }

    pub(crate) fn array_mut(&mut self, addr: Address) -> Result<&mut ArrayValue, DynError> {
        self.heap.get_mut(&addr).ok_or(DynError::NoSuchArray(addr))
    }
}

fn same_type(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.ty() == y.ty(),
        (Value::Pointer(p), Value::Pointer(q)) => p.referent == q.referent,
        _ => false,
    }
}
