//! Typing rules shared by the parser and the mutation engine.

use super::ast::{BinOp, Expr, ExprKind, Function, OpClass, Type, UnOp};

pub fn binary_result(op: BinOp, lhs: Type, rhs: Type) -> Result<Type, String> {
    use Type::*;
    match (op.class(), op, lhs, rhs) {
        (_, _, Void, _) | (_, _, _, Void) => Err("void value used in expression".into()),
        (OpClass::Arithmetic, BinOp::Add, IntPtr, Int) | (OpClass::Arithmetic, BinOp::Add, Int, IntPtr) => {
            Ok(IntPtr)
        }
        (OpClass::Arithmetic, BinOp::Sub, IntPtr, Int) => Ok(IntPtr),
        (OpClass::Relational, _, IntPtr, IntPtr) => Ok(Int),
        (_, _, Int, Int) => Ok(Int),
        _ => Err(format!(
            "invalid operands `{}` {} `{}`",
            lhs.name(),
            op.symbol(),
            rhs.name()
        )),
    }
}

pub fn unary_result(op: UnOp, operand: Type) -> Result<Type, String> {
    match (op, operand) {
        (UnOp::Neg | UnOp::Not | UnOp::Abs, Type::Int) => Ok(Type::Int),
        (op, Type::Int | Type::IntPtr) if op.is_inc_dec() => Ok(operand),
        _ => Err(format!(
            "invalid operand `{}` for `{}`",
            operand.name(),
            op.pattern()
        )),
    }
}

pub fn deref_result(operand: Type) -> Result<Type, String> {
    match operand {
        Type::IntPtr => Ok(Type::Int),
        _ => Err("deref of non-pointer".into()),
    }
}

/// Whether `expr` denotes a writable location in `func`.
pub fn is_lvalue(func: &Function, expr: &Expr) -> bool {
    match &expr.kind {
        ExprKind::Var(v) => !func.var(*v).is_array(),
        ExprKind::Deref(_) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointer_arithmetic_rules() {
        assert_eq!(binary_result(BinOp::Add, Type::IntPtr, Type::Int), Ok(Type::IntPtr));
        assert_eq!(binary_result(BinOp::Add, Type::Int, Type::IntPtr), Ok(Type::IntPtr));
        assert_eq!(binary_result(BinOp::Sub, Type::IntPtr, Type::Int), Ok(Type::IntPtr));
        assert!(binary_result(BinOp::Sub, Type::Int, Type::IntPtr).is_err());
        assert!(binary_result(BinOp::Mul, Type::IntPtr, Type::Int).is_err());
        assert!(binary_result(BinOp::Add, Type::IntPtr, Type::IntPtr).is_err());
        assert_eq!(binary_result(BinOp::Lt, Type::IntPtr, Type::IntPtr), Ok(Type::Int));
        assert!(binary_result(BinOp::And, Type::IntPtr, Type::IntPtr).is_err());
    }

    #[test]
    fn deref_needs_pointer() {
        assert_eq!(deref_result(Type::Int).unwrap_err(), "deref of non-pointer");
    }
}
