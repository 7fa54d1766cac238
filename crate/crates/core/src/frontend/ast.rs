use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of an AST node, unique within one parsed program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a variable inside its function's variable table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    IntPtr,
    Void,
}

impl Type {
    pub fn name(self) -> &'static str {
        match self {
            Type::Int => "int",
            Type::IntPtr => "int-pointer",
            Type::Void => "void",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarInfo {
    pub name: String,
    pub ty: Type,
    /// Element count for `int name[N]` declarations. Arrays decay to
    /// non-assignable pointers.
    pub array_len: Option<u32>,
    pub is_param: bool,
    pub decl: NodeId,
}

impl VarInfo {
    pub fn is_array(&self) -> bool {
        self.array_len.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub functions: Vec<Function>,
    /// One past the largest node id handed out so far.
    pub next_id: u32,
}

impl Program {
    pub fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub id: NodeId,
    pub span: Span,
    pub name: String,
    pub ret: Type,
    pub params: Vec<VarId>,
    pub vars: Vec<VarInfo>,
    pub body: Block,
}

impl Function {
    pub fn var(&self, id: VarId) -> &VarInfo {
        &self.vars[id.0 as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub id: NodeId,
    pub span: Span,
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub id: NodeId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Decl {
        var: VarId,
        init: Option<Expr>,
    },
    /// `target = value;` where target is a variable or a dereference.
    Assign {
        target: Expr,
        value: Expr,
    },
    If {
        cond: Expr,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    /// Cases never fall through; a missing match runs `default` if present.
    Switch {
        scrutinee: Expr,
        cases: Vec<Case>,
        default: Option<Block>,
    },
    Return(Option<Expr>),
    Read(Expr),
    Print(Expr),
    Expr(Expr),
    Block(Block),
    Empty,
    Trap,
}

impl StmtKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            StmtKind::Decl { .. } => "decl",
            StmtKind::Assign { .. } => "assign",
            StmtKind::If { .. } => "if",
            StmtKind::While { .. } => "while",
            StmtKind::Switch { .. } => "switch",
            StmtKind::Return(_) => "return",
            StmtKind::Read(_) => "io-read",
            StmtKind::Print(_) => "io-write",
            StmtKind::Expr(e) if matches!(e.kind, ExprKind::Call { .. }) => "call",
            StmtKind::Expr(_) => "expr",
            StmtKind::Block(_) => "block",
            StmtKind::Empty => "empty",
            StmtKind::Trap => "trap",
        }
    }

    /// Branching statements whose header is a condition evaluation.
    pub fn is_branch(&self) -> bool {
        matches!(
            self,
            StmtKind::If { .. } | StmtKind::While { .. } | StmtKind::Switch { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub id: NodeId,
    pub span: Span,
    pub value: i64,
    pub body: Block,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub ty: Type,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Lit(i64),
    Var(VarId),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Deref(Box<Expr>),
    Call { callee: String, args: Vec<Expr> },
    Trap,
}

impl ExprKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExprKind::Lit(_) => "literal",
            ExprKind::Var(_) => "identifier",
            ExprKind::Unary(..) => "unary-op",
            ExprKind::Binary(..) => "binary-op",
            ExprKind::Deref(_) => "deref",
            ExprKind::Call { .. } => "call",
            ExprKind::Trap => "trap",
        }
    }
}

impl Expr {
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Var(_) | ExprKind::Trap => Vec::new(),
            ExprKind::Unary(_, e) | ExprKind::Deref(e) => vec![e],
            ExprKind::Binary(_, l, r) => vec![l, r],
            ExprKind::Call { args, .. } => args.iter().collect(),
        }
    }

    pub fn is_operator(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Unary(..) | ExprKind::Binary(..) | ExprKind::Deref(_)
        )
    }

    /// True when evaluation can neither fail nor have side effects.
    pub fn is_pure(&self) -> bool {
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Var(_) => true,
            ExprKind::Trap | ExprKind::Call { .. } | ExprKind::Deref(_) => false,
            ExprKind::Unary(op, e) => !op.is_inc_dec() && e.is_pure(),
            ExprKind::Binary(op, l, r) => {
                let divisor_ok = match op {
                    BinOp::Div | BinOp::Rem => matches!(r.kind, ExprKind::Lit(v) if v != 0),
                    _ => true,
                };
                divisor_ok && l.is_pure() && r.is_pure()
            }
        }
    }

    /// Structural equality ignoring node ids and spans.
    pub fn same_shape(&self, other: &Expr) -> bool {
        if self.ty != other.ty {
            return false;
        }
        match (&self.kind, &other.kind) {
            (ExprKind::Lit(a), ExprKind::Lit(b)) => a == b,
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Trap, ExprKind::Trap) => true,
            (ExprKind::Unary(o1, a), ExprKind::Unary(o2, b)) => o1 == o2 && a.same_shape(b),
            (ExprKind::Deref(a), ExprKind::Deref(b)) => a.same_shape(b),
            (ExprKind::Binary(o1, a1, b1), ExprKind::Binary(o2, a2, b2)) => {
                o1 == o2 && a1.same_shape(a2) && b1.same_shape(b2)
            }
            (ExprKind::Call { callee: c1, args: a1 }, ExprKind::Call { callee: c2, args: a2 }) => {
                c1 == c2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| x.same_shape(y))
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnOp {
    Neg,
    Not,
    Abs,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

impl UnOp {
    pub const ALL: [UnOp; 7] = [
        UnOp::Neg,
        UnOp::Not,
        UnOp::Abs,
        UnOp::PreInc,
        UnOp::PreDec,
        UnOp::PostInc,
        UnOp::PostDec,
    ];

    pub fn is_inc_dec(self) -> bool {
        matches!(self, UnOp::PreInc | UnOp::PreDec | UnOp::PostInc | UnOp::PostDec)
    }

    /// Value of a non-mutating unary operator; `None` for inc/dec.
    pub fn apply(self, a: i64) -> Option<i64> {
        match self {
            UnOp::Neg => Some(a.wrapping_neg()),
            UnOp::Not => Some((a == 0) as i64),
            UnOp::Abs => Some(a.wrapping_abs()),
            _ => None,
        }
    }

    /// Pattern with `()` standing for the operand, e.g. `()--`.
    pub fn pattern(self) -> &'static str {
        match self {
            UnOp::Neg => "-()",
            UnOp::Not => "!()",
            UnOp::Abs => "abs()",
            UnOp::PreInc => "++()",
            UnOp::PreDec => "--()",
            UnOp::PostInc => "()++",
            UnOp::PostDec => "()--",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
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
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpClass {
    Arithmetic,
    Bitwise,
    Relational,
    Logical,
}

impl BinOp {
    pub const ALL: [BinOp; 18] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Rem,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn class(self) -> OpClass {
        use BinOp::*;
        match self {
            Add | Sub | Mul | Div | Rem => OpClass::Arithmetic,
            BitAnd | BitOr | BitXor | Shl | Shr => OpClass::Bitwise,
            Lt | Le | Gt | Ge | Eq | Ne => OpClass::Relational,
            And | Or => OpClass::Logical,
        }
    }

    /// Integer semantics shared by the interpreter and constant folding:
    /// wrapping arithmetic, shift amounts masked to 6 bits, `None` on a
    /// zero divisor.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        use BinOp::*;
        Some(match self {
            Add => a.wrapping_add(b),
            Sub => a.wrapping_sub(b),
            Mul => a.wrapping_mul(b),
            Div => {
                if b == 0 {
                    return None;
                }
                a.wrapping_div(b)
            }
            Rem => {
                if b == 0 {
                    return None;
                }
                a.wrapping_rem(b)
            }
            BitAnd => a & b,
            BitOr => a | b,
            BitXor => a ^ b,
            Shl => a.wrapping_shl((b & 63) as u32),
            Shr => a.wrapping_shr((b & 63) as u32),
            Lt => (a < b) as i64,
            Le => (a <= b) as i64,
            Gt => (a > b) as i64,
            Ge => (a >= b) as i64,
            Eq => (a == b) as i64,
            Ne => (a != b) as i64,
            And => (a != 0 && b != 0) as i64,
            Or => (a != 0 || b != 0) as i64,
        })
    }

    pub fn is_commutative(self) -> bool {
        use BinOp::*;
        matches!(self, Add | Mul | BitAnd | BitOr | BitXor | Eq | Ne | And | Or)
    }

    /// Binding strength, larger binds tighter (C precedence).
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Or => 1,
            And => 2,
            BitOr => 3,
            BitXor => 4,
            BitAnd => 5,
            Eq | Ne => 6,
            Lt | Le | Gt | Ge => 7,
            Shl | Shr => 8,
            Add | Sub => 9,
            Mul | Div | Rem => 10,
        }
    }
}

/// Visit every statement of a block in pre-order, descending into nested
/// blocks and branch bodies.
pub fn walk_stmts<'a>(block: &'a Block, f: &mut dyn FnMut(&'a Stmt)) {
    for stmt in &block.stmts {
        f(stmt);
        for child in child_blocks(stmt) {
            walk_stmts(child, f);
        }
    }
}

pub fn child_blocks(stmt: &Stmt) -> Vec<&Block> {
    match &stmt.kind {
        StmtKind::If {
            then_branch,
            else_branch,
            ..
        } => {
            let mut v = vec![then_branch];
            if let Some(e) = else_branch {
                v.push(e);
            }
            v
        }
        StmtKind::While { body, .. } => vec![body],
        StmtKind::Switch { cases, default, .. } => {
            let mut v: Vec<&Block> = cases.iter().map(|c| &c.body).collect();
            if let Some(d) = default {
                v.push(d);
            }
            v
        }
        StmtKind::Block(b) => vec![b],
        _ => Vec::new(),
    }
}

/// Top-level expressions owned directly by a statement (not by nested
/// statements), in evaluation order.
pub fn stmt_exprs(stmt: &Stmt) -> Vec<&Expr> {
    match &stmt.kind {
        StmtKind::Decl { init, .. } => init.iter().collect(),
        StmtKind::Assign { target, value } => vec![target, value],
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Switch { scrutinee, .. } => vec![scrutinee],
        StmtKind::Return(e) => e.iter().collect(),
        StmtKind::Read(e) | StmtKind::Print(e) | StmtKind::Expr(e) => vec![e],
        StmtKind::Block(_) | StmtKind::Empty | StmtKind::Trap => Vec::new(),
    }
}

/// Pre-order walk over an expression tree.
pub fn walk_expr<'a>(expr: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(expr);
    for c in expr.children() {
        walk_expr(c, f);
    }
}
