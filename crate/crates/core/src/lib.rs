//! Translation of a first-order functional IR into a subset of C18,
//! together with an executable static and dynamic semantics for that subset
//! and a harness that validates each translation by differential execution.

pub mod ast;
pub mod codegen;
pub mod dynamic;
pub mod harness;
pub mod ir;
pub mod pretty;
pub mod statics;
pub mod values;
