//! C integer and array values, with the C18 operations and conversions over
//! them and the conditions under which their results are well-defined.
//!
//! Magnitudes are held as `i128`. Every supported type is at most 64 bits
//! wide, so every exact intermediate result computed here fits.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signedness {
    Signed,
    Unsigned,
}

/// Integer conversion rank, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rank {
    Char,
    Short,
    Int,
    Long,
    LLong,
}

/// One of the ten supported C integer types. Plain `char` and `_Bool` are
/// not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CIntType {
    pub signedness: Signedness,
    pub rank: Rank,
}

impl CIntType {
    pub const SCHAR: CIntType = CIntType::new(Signedness::Signed, Rank::Char);
    pub const UCHAR: CIntType = CIntType::new(Signedness::Unsigned, Rank::Char);
    pub const SSHORT: CIntType = CIntType::new(Signedness::Signed, Rank::Short);
    pub const USHORT: CIntType = CIntType::new(Signedness::Unsigned, Rank::Short);
    pub const SINT: CIntType = CIntType::new(Signedness::Signed, Rank::Int);
    pub const UINT: CIntType = CIntType::new(Signedness::Unsigned, Rank::Int);
    pub const SLONG: CIntType = CIntType::new(Signedness::Signed, Rank::Long);
    pub const ULONG: CIntType = CIntType::new(Signedness::Unsigned, Rank::Long);
    pub const SLLONG: CIntType = CIntType::new(Signedness::Signed, Rank::LLong);
    pub const ULLONG: CIntType = CIntType::new(Signedness::Unsigned, Rank::LLong);

    pub const ALL: [CIntType; 10] = [
        Self::SCHAR,
        Self::UCHAR,
        Self::SSHORT,
        Self::USHORT,
        Self::SINT,
        Self::UINT,
        Self::SLONG,
        Self::ULONG,
        Self::SLLONG,
        Self::ULLONG,
    ];

    pub const fn new(signedness: Signedness, rank: Rank) -> Self {
        CIntType { signedness, rank }
    }

    pub fn is_signed(self) -> bool {
        self.signedness == Signedness::Signed
    }

    pub fn to_unsigned(self) -> Self {
        CIntType::new(Signedness::Unsigned, self.rank)
    }

    /// Short name used by the IR surface syntax (`sint`, `uchar`, ...).
    pub fn abbrev(self) -> &'static str {
        use Rank::*;
        use Signedness::*;
        match (self.signedness, self.rank) {
            (Signed, Char) => "schar",
            (Unsigned, Char) => "uchar",
            (Signed, Short) => "sshort",
            (Unsigned, Short) => "ushort",
            (Signed, Int) => "sint",
            (Unsigned, Int) => "uint",
            (Signed, Long) => "slong",
            (Unsigned, Long) => "ulong",
            (Signed, LLong) => "sllong",
            (Unsigned, LLong) => "ullong",
        }
    }

    pub fn from_abbrev(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.abbrev() == s)
    }

    /// Canonical C spelling of the type.
    pub fn c_name(self) -> &'static str {
        use Rank::*;
        use Signedness::*;
        match (self.signedness, self.rank) {
            (Signed, Char) => "signed char",
            (Unsigned, Char) => "unsigned char",
            (Signed, Short) => "short",
            (Unsigned, Short) => "unsigned short",
            (Signed, Int) => "int",
            (Unsigned, Int) => "unsigned int",
            (Signed, Long) => "long",
            (Unsigned, Long) => "unsigned long",
            (Signed, LLong) => "long long",
            (Unsigned, LLong) => "unsigned long long",
        }
    }

    /// Names accepted by the command line value syntax (`int:3`, `uchar[]:1,2`).
    pub fn short_name(self) -> &'static str {
        use Rank::*;
        use Signedness::*;
        match (self.signedness, self.rank) {
            (Signed, Char) => "schar",
            (Unsigned, Char) => "uchar",
            (Signed, Short) => "short",
            (Unsigned, Short) => "ushort",
            (Signed, Int) => "int",
            (Unsigned, Int) => "uint",
            (Signed, Long) => "long",
            (Unsigned, Long) => "ulong",
            (Signed, LLong) => "llong",
            (Unsigned, LLong) => "ullong",
        }
    }

    pub fn from_short_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.short_name() == s)
    }
}

impl fmt::Display for CIntType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.c_name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("char must be 8 bits, got {0}")]
    CharNotEight(u32),
    #[error("{name} is {bits} bits, below the minimum of {min}")]
    TooNarrow { name: &'static str, bits: u32, min: u32 },
    #[error("{name} is {bits} bits, above the supported maximum of 64")]
    TooWide { name: &'static str, bits: u32 },
    #[error("widths must be non-decreasing in rank ({lower} > {higher})")]
    NotMonotone { lower: &'static str, higher: &'static str },
}

/// Bit widths of the integer types. Two's complement, no padding bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImplParams {
    pub bits_char: u32,
    pub bits_short: u32,
    pub bits_int: u32,
    pub bits_long: u32,
    pub bits_llong: u32,
}

impl Default for ImplParams {
    fn default() -> Self {
        ImplParams {
            bits_char: 8,
            bits_short: 16,
            bits_int: 32,
            bits_long: 64,
            bits_llong: 64,
        }
    }
}

impl ImplParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.bits_char != 8 {
            return Err(ParamsError::CharNotEight(self.bits_char));
        }
        let widths = [
            ("short", self.bits_short, 16),
            ("int", self.bits_int, 16),
            ("long", self.bits_long, 32),
            ("long long", self.bits_llong, 64),
        ];
        for (name, bits, min) in widths {
            if bits < min {
                return Err(ParamsError::TooNarrow { name, bits, min });
            }
            if bits > 64 {
                return Err(ParamsError::TooWide { name, bits });
            }
        }
        let chain = [
            ("char", self.bits_char),
            ("short", self.bits_short),
            ("int", self.bits_int),
            ("long", self.bits_long),
            ("long long", self.bits_llong),
        ];
        for pair in chain.windows(2) {
            if pair[0].1 > pair[1].1 {
                return Err(ParamsError::NotMonotone {
                    lower: pair[0].0,
                    higher: pair[1].0,
                });
            }
        }
        Ok(())
    }

    pub fn width(&self, ty: CIntType) -> u32 {
        match ty.rank {
            Rank::Char => self.bits_char,
            Rank::Short => self.bits_short,
            Rank::Int => self.bits_int,
            Rank::Long => self.bits_long,
            Rank::LLong => self.bits_llong,
        }
    }

    pub fn min(&self, ty: CIntType) -> i128 {
        if ty.is_signed() {
            -(1i128 << (self.width(ty) - 1))
        } else {
            0
        }
    }

    pub fn max(&self, ty: CIntType) -> i128 {
        let w = self.width(ty);
        if ty.is_signed() {
            (1i128 << (w - 1)) - 1
        } else {
            (1i128 << w) - 1
        }
    }

    pub fn in_range(&self, ty: CIntType, n: i128) -> bool {
        self.min(ty) <= n && n <= self.max(ty)
    }

    pub fn make_int(&self, ty: CIntType, n: i128) -> Result<IntegerValue, RangeError> {
        if self.in_range(ty, n) {
            Ok(IntegerValue { ty, value: n })
        } else {
            Err(RangeError { ty, value: n })
        }
    }

    /// Reduces `n` modulo 2^width into the range of unsigned `ty`.
    fn wrap(&self, ty: CIntType, n: i128) -> IntegerValue {
        debug_assert!(!ty.is_signed());
        let modulus = self.max(ty) + 1;
        IntegerValue {
            ty,
            value: n.rem_euclid(modulus),
        }
    }

    /// Result type of the integer promotions applied to `ty`.
    pub fn promote_type(&self, ty: CIntType) -> CIntType {
        if ty.rank >= Rank::Int {
            return ty;
        }
        let int = CIntType::SINT;
        if self.min(int) <= self.min(ty) && self.max(ty) <= self.max(int) {
            int
        } else {
            CIntType::UINT
        }
    }

    /// Common type of the usual arithmetic conversions.
    pub fn common_type(&self, a: CIntType, b: CIntType) -> CIntType {
        let a = self.promote_type(a);
        let b = self.promote_type(b);
        if a == b {
            return a;
        }
        if a.signedness == b.signedness {
            return if a.rank >= b.rank { a } else { b };
        }
        let (signed, unsigned) = if a.is_signed() { (a, b) } else { (b, a) };
        if unsigned.rank >= signed.rank {
            unsigned
        } else if self.width(signed) > self.width(unsigned) {
            signed
        } else {
            signed.to_unsigned()
        }
    }

    /// Statically predicted result type of a binary operation.
    pub fn binary_result_type(&self, op: BinaryOp, a: CIntType, b: CIntType) -> CIntType {
        match op.class() {
            OpClass::Arith | OpClass::Bitwise => self.common_type(a, b),
            OpClass::Relational => CIntType::SINT,
            OpClass::Shift => self.promote_type(a),
        }
    }

    pub fn unary_result_type(&self, op: UnaryOp, a: CIntType) -> CIntType {
        match op {
            UnaryOp::LogNot => CIntType::SINT,
            _ => self.promote_type(a),
        }
    }

    pub fn promote(&self, v: IntegerValue) -> IntegerValue {
        IntegerValue {
            ty: self.promote_type(v.ty),
            value: v.value,
        }
    }

    pub fn usual_arith_conversions(
        &self,
        a: IntegerValue,
        b: IntegerValue,
    ) -> (IntegerValue, IntegerValue, CIntType) {
        let common = self.common_type(a.ty, b.ty);
        let conv = |v: IntegerValue| {
            self.convert(v, common)
                .expect("conversion to the common type is always well-defined")
        };
        (conv(a), conv(b), common)
    }

    pub fn convert(&self, v: IntegerValue, target: CIntType) -> Result<IntegerValue, WellDefError> {
        if target.is_signed() {
            self.make_int(target, v.value)
                .map_err(|_| WellDefError::NotRepresentable {
                    value: v.value,
                    target,
                })
        } else {
            Ok(self.wrap(target, v.value))
        }
    }

    fn signed_result(
        &self,
        op: &'static str,
        ty: CIntType,
        exact: i128,
    ) -> Result<IntegerValue, WellDefError> {
        self.make_int(ty, exact)
            .map_err(|_| WellDefError::Overflow { op, ty })
    }

    fn arith_result(
        &self,
        op: &'static str,
        ty: CIntType,
        exact: i128,
    ) -> Result<IntegerValue, WellDefError> {
        if ty.is_signed() {
            self.signed_result(op, ty, exact)
        } else {
            Ok(self.wrap(ty, exact))
        }
    }

    pub fn exec_unary(&self, op: UnaryOp, v: IntegerValue) -> Result<IntegerValue, WellDefError> {
        let p = self.promote(v);
        match op {
            UnaryOp::Plus => Ok(p),
            UnaryOp::Minus => self.arith_result(op.name(), p.ty, -p.value),
            UnaryOp::BitNot => {
                if p.ty.is_signed() {
                    Ok(IntegerValue {
                        ty: p.ty,
                        value: -p.value - 1,
                    })
                } else {
                    Ok(IntegerValue {
                        ty: p.ty,
                        value: self.max(p.ty) - p.value,
                    })
                }
            }
            UnaryOp::LogNot => Ok(bool_int(v.value == 0)),
        }
    }

    pub fn exec_binary(
        &self,
        op: BinaryOp,
        a: IntegerValue,
        b: IntegerValue,
    ) -> Result<IntegerValue, WellDefError> {
        use BinaryOp::*;
        let name = op.name();
        if op.class() == OpClass::Shift {
            return self.exec_shift(op, a, b);
        }
        let (x, y, ty) = self.usual_arith_conversions(a, b);
        let (x, y) = (x.value, y.value);
        match op {
            Add => self.arith_result(name, ty, x + y),
            Sub => self.arith_result(name, ty, x - y),
            Mul => {
                if ty.is_signed() {
                    self.signed_result(name, ty, x * y)
                } else {
                    // both operands are below 2^64, so the product fits in u128
                    let prod = (x as u128) * (y as u128);
                    let modulus = (self.max(ty) + 1) as u128;
                    Ok(IntegerValue {
                        ty,
                        value: (prod % modulus) as i128,
                    })
                }
            }
            Div | Rem => {
                if y == 0 {
                    return Err(WellDefError::DivByZero { op: name });
                }
                // i128 division truncates toward zero, as C does
                let q = x / y;
                if !self.in_range(ty, q) {
                    return Err(WellDefError::Overflow { op: name, ty });
                }
                let r = if op == Div { q } else { x % y };
                Ok(IntegerValue { ty, value: r })
            }
            // sign-extended two's complement in i128 agrees with the narrow
            // representation on every bit
            BitAnd => Ok(IntegerValue { ty, value: x & y }),
            BitOr => Ok(IntegerValue { ty, value: x | y }),
            BitXor => Ok(IntegerValue { ty, value: x ^ y }),
            Lt => Ok(bool_int(x < y)),
            Gt => Ok(bool_int(x > y)),
            Le => Ok(bool_int(x <= y)),
            Ge => Ok(bool_int(x >= y)),
            Eq => Ok(bool_int(x == y)),
            Ne => Ok(bool_int(x != y)),
            Shl | Shr => unreachable!(),
        }
    }

    fn exec_shift(
        &self,
        op: BinaryOp,
        a: IntegerValue,
        b: IntegerValue,
    ) -> Result<IntegerValue, WellDefError> {
        let name = op.name();
        let x = self.promote(a);
        let count = self.promote(b).value;
        let width = self.width(x.ty);
        if count < 0 || count >= width as i128 {
            return Err(WellDefError::ShiftCount {
                op: name,
                count,
                width,
            });
        }
        let ty = x.ty;
        let k = count as u32;
        if op == BinaryOp::Shl {
            if ty.is_signed() {
                if x.value < 0 {
                    return Err(WellDefError::NegativeShift { op: name });
                }
                self.signed_result(name, ty, x.value << k)
            } else {
                Ok(self.wrap(ty, x.value << k))
            }
        } else {
            // arithmetic shift for negative signed operands
            Ok(IntegerValue {
                ty,
                value: x.value >> k,
            })
        }
    }
}

fn bool_int(b: bool) -> IntegerValue {
    IntegerValue {
        ty: CIntType::SINT,
        value: b as i128,
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("{value} is out of range for {ty}")]
pub struct RangeError {
    pub ty: CIntType,
    pub value: i128,
}

/// A C18 undefined-behavior condition detected by an operation.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum WellDefError {
    #[error("{op}: result not representable in {ty}")]
    Overflow { op: &'static str, ty: CIntType },
    #[error("{op}: division by zero")]
    DivByZero { op: &'static str },
    #[error("{op}: shift count {count} outside [0, {width})")]
    ShiftCount {
        op: &'static str,
        count: i128,
        width: u32,
    },
    #[error("{op}: left shift of a negative value")]
    NegativeShift { op: &'static str },
    #[error("conversion of {value} to {target}: not representable")]
    NotRepresentable { value: i128, target: CIntType },
}

impl WellDefError {
    /// Name of the failing operation (`add`, `shl`, `convert`, ...).
    pub fn op(&self) -> &'static str {
        match self {
            WellDefError::Overflow { op, .. }
            | WellDefError::DivByZero { op }
            | WellDefError::ShiftCount { op, .. }
            | WellDefError::NegativeShift { op } => op,
            WellDefError::NotRepresentable { .. } => "convert",
        }
    }
}

/// A C integer value: a type together with a magnitude in that type's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerValue {
    ty: CIntType,
    value: i128,
}

impl IntegerValue {
    pub fn ty(&self) -> CIntType {
        self.ty
    }

    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn to_bool(&self) -> bool {
        self.value != 0
    }

    pub fn from_bool(b: bool, ty: CIntType) -> Self {
        IntegerValue {
            ty,
            value: b as i128,
        }
    }
}

impl fmt::Display for IntegerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.ty.short_name(), self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnaryOp {
    Plus,
    Minus,
    BitNot,
    LogNot,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Plus, UnaryOp::Minus, UnaryOp::BitNot, UnaryOp::LogNot];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Plus => "plus",
            UnaryOp::Minus => "minus",
            UnaryOp::BitNot => "bitnot",
            UnaryOp::LogNot => "lognot",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Plus => "+",
            UnaryOp::Minus => "-",
            UnaryOp::BitNot => "~",
            UnaryOp::LogNot => "!",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpClass {
    Arith,
    Bitwise,
    Shift,
    Relational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 16] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::BitAnd,
        BinaryOp::BitOr,
        BinaryOp::BitXor,
        BinaryOp::Shl,
        BinaryOp::Shr,
        BinaryOp::Lt,
        BinaryOp::Gt,
        BinaryOp::Le,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
    ];

    pub fn class(self) -> OpClass {
        use BinaryOp::*;
        match self {
            Add | Sub | Mul | Div | Rem => OpClass::Arith,
            BitAnd | BitOr | BitXor => OpClass::Bitwise,
            Shl | Shr => OpClass::Shift,
            Lt | Gt | Le | Ge | Eq | Ne => OpClass::Relational,
        }
    }

    /// Name used in the IR surface syntax (`add-sint-sint`).
    pub fn name(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "add",
            Sub => "sub",
            Mul => "mul",
            Div => "div",
            Rem => "rem",
            BitAnd => "bitand",
            BitOr => "bitior",
            BitXor => "bitxor",
            Shl => "shl",
            Shr => "shr",
            Lt => "lt",
            Gt => "gt",
            Le => "le",
            Ge => "ge",
            Eq => "eq",
            Ne => "ne",
        }
    }

    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

/// Index outside `[0, len)`.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("index {index} out of bounds for array of length {len}")]
pub struct BoundsError {
    pub index: i128,
    pub len: usize,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ArrayError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("element of type {found} written to {expected} array")]
    ElemType { expected: CIntType, found: CIntType },
    #[error("arrays must be non-empty")]
    Empty,
    #[error(transparent)]
    Range(#[from] RangeError),
}

/// A non-empty sequence of integers of one element type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayValue {
    elem_type: CIntType,
    elems: Vec<i128>,
}

impl ArrayValue {
    pub fn new(elem_type: CIntType, elems: Vec<IntegerValue>) -> Result<Self, ArrayError> {
        if elems.is_empty() {
            return Err(ArrayError::Empty);
        }
        if let Some(bad) = elems.iter().find(|v| v.ty != elem_type) {
            return Err(ArrayError::ElemType {
                expected: elem_type,
                found: bad.ty,
            });
        }
        Ok(ArrayValue {
            elem_type,
            elems: elems.into_iter().map(|v| v.value).collect(),
        })
    }

    /// Builds an array from raw magnitudes, range-checking each one.
    pub fn from_values(
        params: &ImplParams,
        elem_type: CIntType,
        values: &[i128],
    ) -> Result<Self, ArrayError> {
        let elems = values
            .iter()
            .map(|&n| params.make_int(elem_type, n))
            .collect::<Result<Vec<_>, _>>()?;
        ArrayValue::new(elem_type, elems)
    }

    pub fn elem_type(&self) -> CIntType {
        self.elem_type
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> impl Iterator<Item = IntegerValue> + '_ {
        self.elems.iter().map(move |&value| IntegerValue {
            ty: self.elem_type,
            value,
        })
    }

    pub fn magnitudes(&self) -> &[i128] {
        &self.elems
    }

    fn position(&self, index: IntegerValue) -> Result<usize, BoundsError> {
        let i = index.value;
        if i < 0 || i >= self.elems.len() as i128 {
            Err(BoundsError {
                index: i,
                len: self.elems.len(),
            })
        } else {
            Ok(i as usize)
        }
    }

    pub fn read(&self, index: IntegerValue) -> Result<IntegerValue, BoundsError> {
        let pos = self.position(index)?;
        Ok(IntegerValue {
            ty: self.elem_type,
            value: self.elems[pos],
        })
    }

    /// Functional update: returns a new array.
    pub fn write(&self, index: IntegerValue, v: IntegerValue) -> Result<ArrayValue, ArrayError> {
        let mut out = self.clone();
        out.write_in_place(index, v)?;
        Ok(out)
    }

    pub fn write_in_place(&mut self, index: IntegerValue, v: IntegerValue) -> Result<(), ArrayError> {
        let pos = self.position(index)?;
        if v.ty != self.elem_type {
            return Err(ArrayError::ElemType {
                expected: self.elem_type,
                found: v.ty,
            });
        }
        self.elems[pos] = v.value;
        Ok(())
    }
}

impl fmt::Display for ArrayValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[] ", self.elem_type.short_name())?;
        for (i, v) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
