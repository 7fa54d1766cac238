use crate::frontend::ast::*;
use crate::frontend::cfg::Cfg;
use crate::frontend::pretty::{expr_to_string, stmt_to_string};

use super::{Edit, Mutant, Operator, TceStatus};

/// Enumerate every first-order mutant of `program` in a stable order:
/// statements in pre-order, statement-level mutants first, then the
/// statement's expressions in pre-order.
pub fn enumerate_mutants(program_id: &str, program: &Program, cfg: &Cfg) -> Vec<Mutant> {
    let mut e = Enumerator {
        program_id,
        out: Vec::new(),
        func: 0,
        f: &program.functions[0],
        stmt: NodeId(0),
        block: 0,
    };
    for (fi, f) in program.functions.iter().enumerate() {
        e.func = fi;
        e.f = f;
        let fc = &cfg.functions[fi];
        walk_stmts(&f.body, &mut |s| {
            e.stmt = s.id;
            e.block = fc.blocks[fc.stmt_block[&s.id]].id;
            e.statement(s);
        });
    }
    e.out
}

struct Enumerator<'a> {
    program_id: &'a str,
    out: Vec<Mutant>,
    func: usize,
    f: &'a Function,
    stmt: NodeId,
    block: usize,
}

fn binary_pattern(op: BinOp) -> String {
    format!("a {} b", op.symbol())
}

fn unary_pattern(op: UnOp) -> String {
    op.pattern().to_string()
}

/// `()`-pattern instantiated with a name, e.g. `VAR++`.
fn apply_pattern(op: UnOp, name: &str) -> String {
    op.pattern().replace("()", name)
}

impl<'a> Enumerator<'a> {
    fn push(&mut self, op: Operator, expr: NodeId, span: Span, edit: Edit, type_string: String) {
        self.out.push(Mutant {
            id: self.out.len(),
            program_id: self.program_id.to_string(),
            operator: op,
            function: self.func,
            stmt: self.stmt,
            expr,
            block: self.block,
            edit,
            type_string,
            span,
            tce: TceStatus::Live,
        });
    }

    fn statement(&mut self, s: &'a Stmt) {
        let (id, span) = (s.id, s.span);
        let trap = match &s.kind {
            StmtKind::Decl { var, init } => init.is_some() && self.f.var(*var).ty == Type::Int,
            StmtKind::Trap => false,
            _ => true,
        };
        if trap {
            self.push(Operator::StmtTrap, id, span, Edit::TrapStmt, "STMT → TRAPSTMT".into());
        }
        let del = match &s.kind {
            StmtKind::Decl { init, .. } => init.is_some(),
            StmtKind::Assign { .. }
            | StmtKind::Read(_)
            | StmtKind::Print(_)
            | StmtKind::Expr(_)
            | StmtKind::Return(_)
            | StmtKind::Trap => true,
            _ => false,
        };
        if del {
            self.push(Operator::StmtDel, id, span, Edit::DeleteStmt, "STMT → DELSTMT".into());
        }
        if let StmtKind::Switch { cases, .. } = &s.kind {
            let text: Vec<String> = cases
                .iter()
                .map(|c| c.body.stmts.iter().map(|s| stmt_to_string(self.f, s)).collect())
                .collect();
            for i in 0..cases.len() {
                for j in i + 1..cases.len() {
                    if text[i] == text[j] {
                        continue;
                    }
                    self.push(
                        Operator::SwitchShuffleCases,
                        id,
                        span,
                        Edit::ShuffleCases(i, j),
                        "SWITCH → SHUFFLECASESDESTS".into(),
                    );
                }
            }
            for i in 0..cases.len() * usize::from(cases.len() >= 2) {
                self.push(
                    Operator::SwitchRemoveCases,
                    id,
                    span,
                    Edit::RemoveCase(i),
                    "SWITCH → REMOVECASES".into(),
                );
            }
        }
        match &s.kind {
            StmtKind::Assign { target, value } => {
                self.expr(target, true, false);
                self.expr(value, false, false);
            }
            StmtKind::Read(target) => self.expr(target, true, false),
            _ => {
                for e in stmt_exprs(s) {
                    self.expr(e, false, false);
                }
            }
        }
    }

    fn is_lvalue(&self, e: &Expr) -> bool {
        crate::frontend::types::is_lvalue(self.f, e)
    }

    /// `lvalue`: `e` is written (assignment target, read target, inc/dec
    /// operand). `offset`: `e` is the address arithmetic of a dereference,
    /// whose mutants belong to the dereference.
    fn expr(&mut self, e: &'a Expr, lvalue: bool, offset: bool) {
        let (id, span) = (e.id, e.span);
        match &e.kind {
            ExprKind::Lit(_) => self.scalar_atom(id, span, "CONST", false),
            ExprKind::Var(v) => {
                let info = self.f.var(*v);
                if !lvalue && !info.is_array() {
                    match info.ty {
                        Type::Int => self.scalar_atom(id, span, "VAR", true),
                        Type::IntPtr => {
                            for op in [UnOp::PostInc, UnOp::PreInc, UnOp::PostDec, UnOp::PreDec] {
                                self.push(
                                    Operator::PointerAtomToUnary,
                                    id,
                                    span,
                                    Edit::Wrap(op),
                                    format!("PTR → {}", apply_pattern(op, "PTR")),
                                );
                            }
                        }
                        Type::Void => {}
                    }
                }
            }
            ExprKind::Unary(op, x) => {
                let pattern = unary_pattern(*op);
                if e.ty == Type::IntPtr {
                    for to in UnOp::ALL {
                        if to != *op && to.is_inc_dec() {
                            self.push(
                                Operator::PointerUnaryToUnary,
                                id,
                                span,
                                Edit::SwapUnary(to),
                                format!("{pattern} → {}", unary_pattern(to)),
                            );
                        }
                    }
                    self.push(
                        Operator::PointerUnaryToUnary,
                        id,
                        span,
                        Edit::RemoveUnary,
                        format!("{pattern} → ()"),
                    );
                } else {
                    let lv = self.is_lvalue(x);
                    for to in UnOp::ALL {
                        if to == *op || (to.is_inc_dec() && !lv) {
                            continue;
                        }
                        self.push(
                            Operator::ScalarUnaryToUnary,
                            id,
                            span,
                            Edit::SwapUnary(to),
                            format!("{pattern} → {}", unary_pattern(to)),
                        );
                    }
                    self.push(
                        Operator::ScalarUnaryToUnary,
                        id,
                        span,
                        Edit::RemoveUnary,
                        format!("{pattern} → ()"),
                    );
                }
                self.expr(x, op.is_inc_dec(), false);
            }
            ExprKind::Binary(op, l, r) => {
                if !offset {
                    if l.ty == Type::Int && r.ty == Type::Int {
                        self.scalar_binary(*op, id, span);
                    } else if e.ty == Type::IntPtr {
                        let pat = if l.ty == Type::IntPtr {
                            format!("p {} i", op.symbol())
                        } else {
                            format!("i {} p", op.symbol())
                        };
                        if l.ty == Type::IntPtr {
                            let to = if *op == BinOp::Add { BinOp::Sub } else { BinOp::Add };
                            self.push(
                                Operator::PointerBinaryToBinary,
                                id,
                                span,
                                Edit::SwapBinary(to),
                                format!("{pat} → p {} i", to.symbol()),
                            );
                        }
                        let keep = if l.ty == Type::IntPtr { Edit::KeepLeft } else { Edit::KeepRight };
                        self.push(Operator::PointerBinaryToUnary, id, span, keep, format!("{pat} → p"));
                    } else {
                        for to in BinOp::ALL {
                            if to != *op && to.class() == OpClass::Relational {
                                self.push(
                                    Operator::PointerBinaryToBinary,
                                    id,
                                    span,
                                    Edit::SwapBinary(to),
                                    format!("p {} q → p {} q", op.symbol(), to.symbol()),
                                );
                            }
                        }
                    }
                }
                self.expr(l, false, false);
                self.expr(r, false, false);
            }
            ExprKind::Deref(x) => {
                let is_offset = matches!(&x.kind, ExprKind::Binary(BinOp::Add | BinOp::Sub, ..)) && x.ty == Type::IntPtr;
                if let (true, ExprKind::Binary(op, l, _)) = (is_offset, &x.kind) {
                    let pat = if l.ty == Type::IntPtr {
                        format!("*(p {} i)", op.symbol())
                    } else {
                        format!("*(i {} p)", op.symbol())
                    };
                    if l.ty == Type::IntPtr {
                        let to = if *op == BinOp::Add { BinOp::Sub } else { BinOp::Add };
                        self.push(
                            Operator::DerefBinaryToBinary,
                            id,
                            span,
                            Edit::DerefSwapOffset(to),
                            format!("{pat} → *(p {} i)", to.symbol()),
                        );
                    }
                    self.push(
                        Operator::DerefBinaryToUnary,
                        id,
                        span,
                        Edit::DerefDropOffset,
                        format!("{pat} → *p"),
                    );
                }
                self.expr(x, false, is_offset);
            }
            ExprKind::Call { args, .. } => {
                for i in 0..args.len() {
                    for j in i + 1..args.len() {
                        if args[i].ty == args[j].ty && expr_to_string(self.f, &args[i]) != expr_to_string(self.f, &args[j]) {
                            self.push(
                                Operator::CallShuffleArgs,
                                id,
                                span,
                                Edit::ShuffleArgs(i, j),
                                "CALL → SHUFFLEARGS".into(),
                            );
                        }
                    }
                }
                for a in args {
                    self.expr(a, false, false);
                }
            }
            ExprKind::Trap => {}
        }
    }

    fn scalar_atom(&mut self, id: NodeId, span: Span, name: &str, variable: bool) {
        for op in [UnOp::Neg, UnOp::Not, UnOp::Abs] {
            self.push(
                Operator::ScalarAtomToUnary,
                id,
                span,
                Edit::Wrap(op),
                format!("{name} → {}", apply_pattern(op, &format!("({name})"))),
            );
        }
        if variable {
            for op in [UnOp::PostInc, UnOp::PreInc, UnOp::PostDec, UnOp::PreDec] {
                self.push(
                    Operator::ScalarAtomToUnary,
                    id,
                    span,
                    Edit::Wrap(op),
                    format!("{name} → {}", apply_pattern(op, name)),
                );
            }
        }
        for k in [1i64, -1] {
            for op in BinOp::ALL {
                self.push(
                    Operator::ScalarAtomToBinary,
                    id,
                    span,
                    Edit::AtomBinary(op, k),
                    format!("{name} → {name} {} {k}", op.symbol()),
                );
            }
        }
    }

    fn scalar_binary(&mut self, op: BinOp, id: NodeId, span: Span) {
        let pat = binary_pattern(op);
        for to in BinOp::ALL {
            if to != op {
                self.push(
                    Operator::ScalarBinaryToBinary,
                    id,
                    span,
                    Edit::SwapBinary(to),
                    format!("{pat} → {}", binary_pattern(to)),
                );
            }
        }
        self.push(Operator::ScalarBinaryToDel, id, span, Edit::KeepLeft, format!("{pat} → a"));
        self.push(Operator::ScalarBinaryToDel, id, span, Edit::KeepRight, format!("{pat} → b"));
        if !op.is_commutative() {
            self.push(
                Operator::ScalarBinaryToBinary,
                id,
                span,
                Edit::SwapOperands,
                format!("{pat} → b {} a", op.symbol()),
            );
        }
        for u in [UnOp::Neg, UnOp::Not, UnOp::Abs] {
            self.push(
                Operator::ScalarBinaryToUnary,
                id,
                span,
                Edit::Wrap(u),
                format!("{pat} → {}", apply_pattern(u, &format!("({pat})"))),
            );
        }
        self.push(Operator::ScalarBinaryToTrap, id, span, Edit::TrapExpr, format!("{pat} → TRAPSTMT"));
        self.push(Operator::ScalarBinaryToDel, id, span, Edit::DeleteExpr, format!("{pat} → DELSTMT"));
    }
}
