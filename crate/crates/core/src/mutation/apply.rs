use crate::frontend::ast::*;
use crate::frontend::index::{find_expr_mut, find_stmt_mut, stmt_exprs_mut};

use super::{Edit, Mutant, MutationError};

/// Return a copy of `program` with `mutant` applied. The original is left
/// untouched; new nodes get fresh ids.
pub fn apply_mutant(program: &Program, mutant: &Mutant) -> Result<Program, MutationError> {
    let stale = |reason: &str| MutationError::StaleMutant {
        id: mutant.id,
        reason: reason.to_string(),
    };
    let mut p = program.clone();
    let mut next = p.next_id;
    let mut fresh = || {
        let id = NodeId(next);
        next += 1;
        id
    };
    let func = p.functions.get_mut(mutant.function).ok_or_else(|| stale("no such function"))?;
    let var_types: Vec<(Type, bool)> = func.vars.iter().map(|v| (v.ty, v.is_array())).collect();
    let stmt = find_stmt_mut(&mut func.body, mutant.stmt).ok_or_else(|| stale("statement not found"))?;

    if mutant.is_statement_level() {
        match (&mutant.edit, &mut stmt.kind) {
            (Edit::TrapStmt, StmtKind::If { cond, .. } | StmtKind::While { cond, .. })
            | (Edit::TrapStmt, StmtKind::Switch { scrutinee: cond, .. }) => {
                *cond = trap_expr(fresh(), cond.span);
            }
            (Edit::TrapStmt, StmtKind::Decl { init: Some(init), .. }) if init.ty == Type::Int => {
                *init = trap_expr(fresh(), init.span);
            }
            (Edit::TrapStmt, StmtKind::Decl { .. } | StmtKind::Trap) => return Err(stale("not trappable")),
            (Edit::TrapStmt, kind) => *kind = StmtKind::Trap,
            (Edit::DeleteStmt, StmtKind::Decl { init, .. }) if init.is_some() => *init = None,
            (
                Edit::DeleteStmt,
                kind @ (StmtKind::Assign { .. }
                | StmtKind::Read(_)
                | StmtKind::Print(_)
                | StmtKind::Expr(_)
                | StmtKind::Return(_)
                | StmtKind::Trap),
            ) => *kind = StmtKind::Empty,
            (Edit::ShuffleCases(i, j), StmtKind::Switch { cases, .. }) if *j < cases.len() && i < j => {
                let (a, b) = cases.split_at_mut(*j);
                std::mem::swap(&mut a[*i].body, &mut b[0].body);
            }
            (Edit::RemoveCase(i), StmtKind::Switch { cases, .. }) if *i < cases.len() => {
                cases.remove(*i);
            }
            _ => return Err(stale("edit does not match statement")),
        }
        p.next_id = next;
        return Ok(p);
    }

    let target = stmt_exprs_mut(stmt)
        .into_iter()
        .find_map(|e| find_expr_mut(e, mutant.expr))
        .ok_or_else(|| stale("expression not found in statement"))?;
    let old = std::mem::replace(target, trap_expr(NodeId(u32::MAX), Span::default()));
    let span = old.span;
    let ty = old.ty;
    let new = match (&mutant.edit, old) {
        (
            Edit::SwapBinary(to),
            Expr {
                id,
                kind: ExprKind::Binary(_, l, r),
                ..
            },
        ) => Expr {
            id,
            span,
            ty,
            kind: ExprKind::Binary(*to, l, r),
        },
        (Edit::KeepLeft, Expr { kind: ExprKind::Binary(_, l, _), .. }) => *l,
        (Edit::KeepRight, Expr { kind: ExprKind::Binary(_, _, r), .. }) => *r,
        (
            Edit::SwapOperands,
            Expr {
                id,
                kind: ExprKind::Binary(op, l, r),
                ..
            },
        ) => Expr {
            id,
            span,
            ty,
            kind: ExprKind::Binary(op, r, l),
        },
        (Edit::Wrap(op), old) => {
            let ty = if op.is_inc_dec() { old.ty } else { Type::Int };
            Expr {
                id: fresh(),
                span,
                ty,
                kind: ExprKind::Unary(*op, Box::new(old)),
            }
        }
        (Edit::TrapExpr, old) if old.ty == Type::Int => trap_expr(fresh(), span),
        (Edit::DeleteExpr, old) if old.ty == Type::Int => Expr {
            id: fresh(),
            span,
            ty: Type::Int,
            kind: ExprKind::Lit(0),
        },
        (Edit::AtomBinary(op, k), old) if old.ty == Type::Int => {
            let rhs = Expr {
                id: fresh(),
                span,
                ty: Type::Int,
                kind: ExprKind::Lit(*k),
            };
            Expr {
                id: fresh(),
                span,
                ty: Type::Int,
                kind: ExprKind::Binary(*op, Box::new(old), Box::new(rhs)),
            }
        }
        (
            Edit::SwapUnary(to),
            Expr {
                id,
                kind: ExprKind::Unary(_, x),
                ..
            },
        ) => Expr {
            id,
            span,
            ty: if to.is_inc_dec() { x.ty } else { Type::Int },
            kind: ExprKind::Unary(*to, x),
        },
        (Edit::RemoveUnary, Expr { kind: ExprKind::Unary(_, x), .. }) => *x,
        (
            Edit::DerefSwapOffset(to),
            Expr {
                id,
                kind: ExprKind::Deref(inner),
                ..
            },
        ) => match *inner {
            Expr {
                id: iid,
                span: isp,
                ty: ity,
                kind: ExprKind::Binary(_, l, r),
            } => Expr {
                id,
                span,
                ty,
                kind: ExprKind::Deref(Box::new(Expr {
                    id: iid,
                    span: isp,
                    ty: ity,
                    kind: ExprKind::Binary(*to, l, r),
                })),
            },
            _ => return Err(stale("dereference has no offset")),
        },
        (
            Edit::DerefDropOffset,
            Expr {
                id,
                kind: ExprKind::Deref(inner),
                ..
            },
        ) => match *inner {
            Expr {
                kind: ExprKind::Binary(_, l, r),
                ..
            } => {
                let base = if l.ty == Type::IntPtr { *l } else { *r };
                Expr {
                    id,
                    span,
                    ty,
                    kind: ExprKind::Deref(Box::new(base)),
                }
            }
            _ => return Err(stale("dereference has no offset")),
        },
        (
            Edit::ShuffleArgs(i, j),
            Expr {
                id,
                kind: ExprKind::Call { callee, mut args },
                ..
            },
        ) if *i < args.len() && *j < args.len() => {
            args.swap(*i, *j);
            Expr {
                id,
                span,
                ty,
                kind: ExprKind::Call { callee, args },
            }
        }
        _ => return Err(stale("edit does not match expression")),
    };
    // Inc/dec requires a written location.
    if let ExprKind::Unary(op, x) = &new.kind {
        let lvalue = match &x.kind {
            ExprKind::Var(v) => !var_types[v.0 as usize].1,
            ExprKind::Deref(_) => true,
            _ => false,
        };
        if op.is_inc_dec() && !lvalue {
            return Err(stale("inc/dec of a non-lvalue"));
        }
    }
    *target = new;
    p.next_id = next;
    Ok(p)
}

fn trap_expr(id: NodeId, span: Span) -> Expr {
    Expr {
        id,
        span,
        ty: Type::Int,
        kind: ExprKind::Trap,
    }
}

#[cfg(test)]
mod tests {
    use crate::frontend::{check_program, parse_program, pretty_print, Analysis};
    use crate::mutation::enumerate_mutants;

    use super::*;

    #[test]
    fn every_mutant_applies_and_typechecks() {
        let src = "int f(int *p, int n) { int s; s = 0; while (n > 0) { s = s + p[n - 1]; n--; p++; } return s; }
                   int main() { int a[4]; int *q = a; int i; read i; a[i % 4] = *(q + 1) - 3;
                   switch (i) { case 1: print f(a, i); case 2: print -i; default: print abs(i); }
                   if (q < a + 2) { print !i; } return 0; }";
        let an = Analysis::from_source(src).unwrap();
        let ms = enumerate_mutants("t", &an.program, &an.cfg);
        assert!(ms.len() > 100);
        for m in &ms {
            let mp = apply_mutant(&an.program, m).unwrap_or_else(|e| panic!("{e}: {}", m.type_string));
            check_program(&mp).unwrap_or_else(|e| panic!("{e}: {}", m.type_string));
            let printed = pretty_print(&mp);
            let re = parse_program(&printed).unwrap_or_else(|e| panic!("{e}: {}\n{printed}", m.type_string));
            assert!(crate::frontend::pretty::isomorphic(&mp, &re), "{}", m.type_string);
            assert_ne!(printed, pretty_print(&an.program), "{}", m.type_string);
        }
    }

    #[test]
    fn stale_mutants_are_rejected() {
        let a = Analysis::from_source("int main() { int x; x = 1 + 2; return x; }").unwrap();
        let b = Analysis::from_source("int main() { return 0; }").unwrap();
        let ms = enumerate_mutants("a", &a.program, &a.cfg);
        let m = ms.iter().find(|m| m.type_string == "a + b → a - b").unwrap();
        assert!(apply_mutant(&b.program, m).is_err());
    }
}
