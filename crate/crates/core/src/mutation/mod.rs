//! Mutant catalog, enumeration and application.

mod apply;
mod enumerate;
pub mod manifest;

use serde::{Deserialize, Serialize};

use crate::frontend::ast::{BinOp, NodeId, OpClass, Span, UnOp};

pub use apply::apply_mutant;
pub use enumerate::enumerate_mutants;

/// Instruction types matched or produced by an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstrType {
    AnyStmt,
    CallStatement,
    SwitchStatement,
    ScalarAtom,
    ScalarUnary,
    ScalarBinary,
    PointerAtom,
    PointerUnary,
    PointerBinary,
    DerefUnary,
    DerefBinary,
    TrapStmt,
    DelStmt,
    ShuffleArgs,
    ShuffleCasesDests,
    RemoveCases,
}

impl InstrType {
    pub fn name(self) -> &'static str {
        match self {
            InstrType::AnyStmt => "ANY-STMT",
            InstrType::CallStatement => "CALL-STATEMENT",
            InstrType::SwitchStatement => "SWITCH-STATEMENT",
            InstrType::ScalarAtom => "SCALAR.ATOM",
            InstrType::ScalarUnary => "SCALAR.UNARY",
            InstrType::ScalarBinary => "SCALAR.BINARY",
            InstrType::PointerAtom => "POINTER.ATOM",
            InstrType::PointerUnary => "POINTER.UNARY",
            InstrType::PointerBinary => "POINTER.BINARY",
            InstrType::DerefUnary => "DEREFERENCE.UNARY",
            InstrType::DerefBinary => "DEREFERENCE.BINARY",
            InstrType::TrapStmt => "TRAPSTMT",
            InstrType::DelStmt => "DELSTMT",
            InstrType::ShuffleArgs => "SHUFFLEARGS",
            InstrType::ShuffleCasesDests => "SHUFFLECASESDESTS",
            InstrType::RemoveCases => "REMOVECASES",
        }
    }
}

/// The eighteen operators: one per (original, mutated) instruction type pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    StmtTrap,
    StmtDel,
    CallShuffleArgs,
    SwitchShuffleCases,
    SwitchRemoveCases,
    ScalarAtomToUnary,
    ScalarBinaryToBinary,
    ScalarBinaryToUnary,
    ScalarAtomToBinary,
    ScalarBinaryToTrap,
    PointerBinaryToBinary,
    ScalarBinaryToDel,
    DerefBinaryToBinary,
    ScalarUnaryToUnary,
    PointerBinaryToUnary,
    DerefBinaryToUnary,
    PointerAtomToUnary,
    PointerUnaryToUnary,
}

impl Operator {
    pub const ALL: [Operator; 18] = [
        Operator::StmtTrap,
        Operator::StmtDel,
        Operator::CallShuffleArgs,
        Operator::SwitchShuffleCases,
        Operator::SwitchRemoveCases,
        Operator::ScalarAtomToUnary,
        Operator::ScalarBinaryToBinary,
        Operator::ScalarBinaryToUnary,
        Operator::ScalarAtomToBinary,
        Operator::ScalarBinaryToTrap,
        Operator::PointerBinaryToBinary,
        Operator::ScalarBinaryToDel,
        Operator::DerefBinaryToBinary,
        Operator::ScalarUnaryToUnary,
        Operator::PointerBinaryToUnary,
        Operator::DerefBinaryToUnary,
        Operator::PointerAtomToUnary,
        Operator::PointerUnaryToUnary,
    ];

    /// 1-based catalog number.
    pub fn id(self) -> u32 {
        Operator::ALL.iter().position(|o| *o == self).expect("in catalog") as u32 + 1
    }

    pub fn from_id(id: u32) -> Option<Operator> {
        Operator::ALL.get((id as usize).checked_sub(1)?).copied()
    }

    pub fn original(self) -> InstrType {
        use InstrType::*;
        match self {
            Operator::StmtTrap | Operator::StmtDel => AnyStmt,
            Operator::CallShuffleArgs => CallStatement,
            Operator::SwitchShuffleCases | Operator::SwitchRemoveCases => SwitchStatement,
            Operator::ScalarAtomToUnary | Operator::ScalarAtomToBinary => ScalarAtom,
            Operator::ScalarBinaryToBinary
            | Operator::ScalarBinaryToUnary
            | Operator::ScalarBinaryToTrap
            | Operator::ScalarBinaryToDel => ScalarBinary,
            Operator::PointerBinaryToBinary | Operator::PointerBinaryToUnary => PointerBinary,
            Operator::DerefBinaryToBinary | Operator::DerefBinaryToUnary => DerefBinary,
            Operator::ScalarUnaryToUnary => ScalarUnary,
            Operator::PointerAtomToUnary => PointerAtom,
            Operator::PointerUnaryToUnary => PointerUnary,
        }
    }

    pub fn mutated(self) -> InstrType {
        use InstrType::*;
        match self {
            Operator::StmtTrap | Operator::ScalarBinaryToTrap => TrapStmt,
            Operator::StmtDel | Operator::ScalarBinaryToDel => DelStmt,
            Operator::CallShuffleArgs => ShuffleArgs,
            Operator::SwitchShuffleCases => ShuffleCasesDests,
            Operator::SwitchRemoveCases => RemoveCases,
            Operator::ScalarAtomToUnary | Operator::ScalarBinaryToUnary | Operator::ScalarUnaryToUnary => {
                ScalarUnary
            }
            Operator::ScalarBinaryToBinary | Operator::ScalarAtomToBinary => ScalarBinary,
            Operator::PointerBinaryToBinary => PointerBinary,
            Operator::DerefBinaryToBinary => DerefBinary,
            Operator::PointerBinaryToUnary | Operator::PointerAtomToUnary | Operator::PointerUnaryToUnary => {
                PointerUnary
            }
            Operator::DerefBinaryToUnary => DerefUnary,
        }
    }

    pub fn name(self) -> String {
        format!("{} → {}", self.original().name(), self.mutated().name())
    }

    pub fn is_statement_level(self) -> bool {
        matches!(
            self,
            Operator::StmtTrap | Operator::StmtDel | Operator::SwitchShuffleCases | Operator::SwitchRemoveCases
        )
    }
}

/// Concrete transformation applied at the mutation site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edit {
    /// Replace the statement by `trap`; for branches the header expression
    /// becomes `trap`; for initialized declarations the initializer does.
    TrapStmt,
    /// Replace the statement by `;`; a declaration loses its initializer.
    DeleteStmt,
    ShuffleArgs(usize, usize),
    ShuffleCases(usize, usize),
    RemoveCase(usize),
    /// `a op b → a op' b`.
    SwapBinary(BinOp),
    KeepLeft,
    KeepRight,
    SwapOperands,
    /// `e → u(e)` for the expression at the site.
    Wrap(UnOp),
    TrapExpr,
    /// The expression's value is deleted, leaving 0.
    DeleteExpr,
    /// `a → a op k`.
    AtomBinary(BinOp, i64),
    /// `u(x) → u'(x)`.
    SwapUnary(UnOp),
    RemoveUnary,
    /// `*(p ± i) → *(p ∓ i)`.
    DerefSwapOffset(BinOp),
    /// `*(p ± i) → *p`.
    DerefDropOffset,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TceStatus {
    #[default]
    Live,
    TriviallyEquivalent,
    DuplicateOf(usize),
}

impl TceStatus {
    pub fn is_live(self) -> bool {
        self == TceStatus::Live
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: usize,
    pub program_id: String,
    pub operator: Operator,
    pub function: usize,
    /// Mutated statement S_M.
    pub stmt: NodeId,
    /// Mutated expression E_M; equals `stmt` for statement-level mutants.
    pub expr: NodeId,
    /// Program-wide basic block id B_M.
    pub block: usize,
    pub edit: Edit,
    pub type_string: String,
    pub span: Span,
    #[serde(default)]
    pub tce: TceStatus,
}

/// Operator families used by selective-mutation baselines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SelectiveClass {
    Relational,
    Logical,
    Arithmetic,
    Unary,
    Abs,
}

impl Mutant {
    pub fn is_statement_level(&self) -> bool {
        self.expr == self.stmt
    }

    /// Whether the mutant deletes a statement or part of an expression.
    pub fn is_deletion(&self) -> bool {
        matches!(
            self.edit,
            Edit::DeleteStmt
                | Edit::DeleteExpr
                | Edit::KeepLeft
                | Edit::KeepRight
                | Edit::RemoveUnary
                | Edit::DerefDropOffset
        )
    }

    pub fn selective_class(&self) -> Option<SelectiveClass> {
        let of_binop = |op: BinOp| match op.class() {
            OpClass::Arithmetic => Some(SelectiveClass::Arithmetic),
            OpClass::Relational => Some(SelectiveClass::Relational),
            OpClass::Logical => Some(SelectiveClass::Logical),
            OpClass::Bitwise => None,
        };
        let of_unop = |op: UnOp| match op {
            UnOp::Abs => SelectiveClass::Abs,
            _ => SelectiveClass::Unary,
        };
        match &self.edit {
            Edit::SwapBinary(op) | Edit::DerefSwapOffset(op) => of_binop(*op),
            Edit::Wrap(op) | Edit::SwapUnary(op) => Some(of_unop(*op)),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("stale mutant {id}: {reason}")]
    StaleMutant { id: usize, reason: String },
}
