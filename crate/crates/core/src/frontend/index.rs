//! Id-based lookups over a parsed program.

use std::collections::HashMap;

use super::ast::*;

#[derive(Clone, Copy, Debug)]
pub struct ExprEntry<'a> {
    pub expr: &'a Expr,
    pub func: usize,
    /// Statement owning the expression tree.
    pub stmt: NodeId,
    /// Enclosing expression, `None` for a statement's top-level expression.
    pub parent: Option<NodeId>,
}

#[derive(Clone, Copy, Debug)]
pub struct StmtEntry<'a> {
    pub stmt: &'a Stmt,
    pub func: usize,
    /// Enclosing statement, `None` at function-body level.
    pub parent: Option<NodeId>,
}

#[derive(Clone, Debug, Default)]
pub struct NodeIndex<'a> {
    pub exprs: HashMap<NodeId, ExprEntry<'a>>,
    pub stmts: HashMap<NodeId, StmtEntry<'a>>,
    /// Statements in pre-order, per function.
    pub stmt_order: Vec<Vec<NodeId>>,
}

impl<'a> NodeIndex<'a> {
    pub fn new(program: &'a Program) -> Self {
        let mut idx = NodeIndex::default();
        for (fi, f) in program.functions.iter().enumerate() {
            let mut order = Vec::new();
            idx.block(fi, &f.body, None, &mut order);
            idx.stmt_order.push(order);
        }
        idx
    }

    fn block(&mut self, func: usize, b: &'a Block, parent: Option<NodeId>, order: &mut Vec<NodeId>) {
        for s in &b.stmts {
            order.push(s.id);
            self.stmts.insert(s.id, StmtEntry { stmt: s, func, parent });
            for e in stmt_exprs(s) {
                self.add_expr(func, s.id, e, None);
            }
            for child in child_blocks(s) {
                self.block(func, child, Some(s.id), order);
            }
        }
    }

    fn add_expr(&mut self, func: usize, stmt: NodeId, e: &'a Expr, parent: Option<NodeId>) {
        self.exprs.insert(
            e.id,
            ExprEntry {
                expr: e,
                func,
                stmt,
                parent,
            },
        );
        for c in e.children() {
            self.add_expr(func, stmt, c, Some(e.id));
        }
    }

    pub fn expr(&self, id: NodeId) -> Option<&'a Expr> {
        self.exprs.get(&id).map(|e| e.expr)
    }

    pub fn stmt(&self, id: NodeId) -> Option<&'a Stmt> {
        self.stmts.get(&id).map(|s| s.stmt)
    }
}

pub fn find_stmt_mut(block: &mut Block, id: NodeId) -> Option<&mut Stmt> {
    for s in &mut block.stmts {
        if s.id == id {
            return Some(s);
        }
        let found = match &mut s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => find_stmt_mut(then_branch, id).or_else(|| else_branch.as_mut().and_then(|b| find_stmt_mut(b, id))),
            StmtKind::While { body, .. } => find_stmt_mut(body, id),
            StmtKind::Switch { cases, default, .. } => {
                let mut r = None;
                for c in cases.iter_mut() {
                    if let Some(x) = find_stmt_mut(&mut c.body, id) {
                        r = Some(x);
                        break;
                    }
                }
                r.or_else(|| default.as_mut().and_then(|b| find_stmt_mut(b, id)))
            }
            StmtKind::Block(b) => find_stmt_mut(b, id),
            _ => None,
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

pub fn stmt_exprs_mut(stmt: &mut Stmt) -> Vec<&mut Expr> {
    match &mut stmt.kind {
        StmtKind::Decl { init, .. } => init.iter_mut().collect(),
        StmtKind::Assign { target, value } => vec![target, value],
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Switch { scrutinee, .. } => vec![scrutinee],
        StmtKind::Return(e) => e.iter_mut().collect(),
        StmtKind::Read(e) | StmtKind::Print(e) | StmtKind::Expr(e) => vec![e],
        StmtKind::Block(_) | StmtKind::Empty | StmtKind::Trap => Vec::new(),
    }
}

pub fn find_expr_mut(e: &mut Expr, id: NodeId) -> Option<&mut Expr> {
    if e.id == id {
        return Some(e);
    }
    match &mut e.kind {
        ExprKind::Unary(_, x) | ExprKind::Deref(x) => find_expr_mut(x, id),
        ExprKind::Binary(_, l, r) => find_expr_mut(l, id).or_else(|| find_expr_mut(r, id)),
        ExprKind::Call { args, .. } => args.iter_mut().find_map(|a| find_expr_mut(a, id)),
        _ => None,
    }
}
