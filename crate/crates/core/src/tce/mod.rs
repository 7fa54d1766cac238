//! Trivial compiler equivalence: canonicalize programs with a few local
//! optimizations and compare the printed results.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use crate::frontend::ast::*;
use crate::frontend::pretty::{print_with, PrintOptions};
use crate::mutation::{apply_mutant, Mutant, TceStatus};

const MAX_ITERATIONS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm(pub String);

pub fn canonicalize(program: &Program) -> CanonicalForm {
    let mut p = program.clone();
    let mut last = render(&p);
    for _ in 0..MAX_ITERATIONS {
        for f in &mut p.functions {
            fold_block(&mut f.body);
            identities_block(&mut f.body);
            prune_block(&mut f.body);
            dead_store(f);
        }
        let now = render(&p);
        if now == last {
            break;
        }
        last = now;
    }
    CanonicalForm(last)
}

/// Printed form with locals alpha-renamed in declaration order.
fn render(p: &Program) -> String {
    let mut q = p.clone();
    for f in &mut q.functions {
        normalize_block(&mut f.body);
        rename_locals(f);
    }
    print_with(&q, PrintOptions { rename_locals: true })
}

// ---- fold --------------------------------------------------------------

fn each_expr_mut(b: &mut Block, f: &mut dyn FnMut(&mut Expr)) {
    for s in &mut b.stmts {
        for e in crate::frontend::index::stmt_exprs_mut(s) {
            f(e);
        }
        match &mut s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                each_expr_mut(then_branch, f);
                if let Some(e) = else_branch {
                    each_expr_mut(e, f);
                }
            }
            StmtKind::While { body, .. } => each_expr_mut(body, f),
            StmtKind::Switch { cases, default, .. } => {
                for c in cases {
                    each_expr_mut(&mut c.body, f);
                }
                if let Some(d) = default {
                    each_expr_mut(d, f);
                }
            }
            StmtKind::Block(b) => each_expr_mut(b, f),
            _ => {}
        }
    }
}

fn children_mut(e: &mut Expr) -> Vec<&mut Expr> {
    match &mut e.kind {
        ExprKind::Unary(_, x) | ExprKind::Deref(x) => vec![x.as_mut()],
        ExprKind::Binary(_, l, r) => vec![l.as_mut(), r.as_mut()],
        ExprKind::Call { args, .. } => args.iter_mut().collect(),
        _ => Vec::new(),
    }
}

fn lit(e: &Expr) -> Option<i64> {
    match e.kind {
        ExprKind::Lit(v) => Some(v),
        _ => None,
    }
}

fn fold_expr(e: &mut Expr) {
    for c in children_mut(e) {
        fold_expr(c);
    }
    let folded = match &e.kind {
        ExprKind::Binary(op, l, r) if l.ty == Type::Int && r.ty == Type::Int => match (lit(l), lit(r)) {
            (Some(a), Some(b)) => op.apply(a, b),
            // Short-circuit forms whose right side never runs.
            (Some(0), None) if *op == BinOp::And => Some(0),
            (Some(a), None) if *op == BinOp::Or && a != 0 => Some(1),
            _ => None,
        },
        ExprKind::Unary(op, x) => lit(x).and_then(|a| op.apply(a)),
        _ => None,
    };
    if let Some(v) = folded {
        e.kind = ExprKind::Lit(v);
    }
}

fn fold_block(b: &mut Block) {
    each_expr_mut(b, &mut fold_expr);
}

// ---- identities --------------------------------------------------------

fn identities_expr(e: &mut Expr) {
    for c in children_mut(e) {
        identities_expr(c);
    }
    let kind = std::mem::replace(&mut e.kind, ExprKind::Trap);
    e.kind = match kind {
        ExprKind::Binary(op, l, r) => {
            let (lv, rv) = (lit(&l), lit(&r));
            use BinOp::*;
            match op {
                Add | Sub | BitOr | BitXor | Shl | Shr if rv == Some(0) => l.kind,
                Add | BitOr | BitXor if lv == Some(0) && r.ty == Type::Int => r.kind,
                Mul | Div if rv == Some(1) => l.kind,
                Mul if lv == Some(1) => r.kind,
                Mul | BitAnd if (rv == Some(0) && l.is_pure()) || (lv == Some(0) && r.is_pure()) => ExprKind::Lit(0),
                Sub | BitXor if l.is_pure() && l.same_shape(&r) && l.ty == Type::Int => ExprKind::Lit(0),
                _ => ExprKind::Binary(op, l, r),
            }
        }
        ExprKind::Unary(UnOp::Neg, x) => match x.kind {
            ExprKind::Unary(UnOp::Neg, y) => y.kind,
            other => ExprKind::Unary(
                UnOp::Neg,
                Box::new(Expr {
                    kind: other,
                    ..*x
                }),
            ),
        },
        other => other,
    };
}

fn identities_block(b: &mut Block) {
    each_expr_mut(b, &mut identities_expr);
}

// ---- prune -------------------------------------------------------------

fn prune_block(b: &mut Block) {
    for s in &mut b.stmts {
        let replacement = match &mut s.kind {
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                prune_block(then_branch);
                if let Some(e) = else_branch {
                    prune_block(e);
                }
                match lit(cond) {
                    Some(0) => Some(match else_branch.take() {
                        Some(e) => StmtKind::Block(e),
                        None => StmtKind::Empty,
                    }),
                    Some(_) => Some(StmtKind::Block(std::mem::replace(
                        then_branch,
                        Block {
                            id: then_branch.id,
                            span: then_branch.span,
                            stmts: Vec::new(),
                        },
                    ))),
                    None => None,
                }
            }
            StmtKind::While { cond, body } => {
                prune_block(body);
                (lit(cond) == Some(0)).then_some(StmtKind::Empty)
            }
            StmtKind::Switch {
                scrutinee,
                cases,
                default,
            } => {
                for c in cases.iter_mut() {
                    prune_block(&mut c.body);
                }
                if let Some(d) = default {
                    prune_block(d);
                }
                lit(scrutinee).map(|v| {
                    match cases.iter().position(|c| c.value == v) {
                        Some(i) => StmtKind::Block(cases.swap_remove(i).body),
                        None => default.take().map(StmtKind::Block).unwrap_or(StmtKind::Empty),
                    }
                })
            }
            StmtKind::Block(inner) => {
                prune_block(inner);
                None
            }
            _ => None,
        };
        if let Some(k) = replacement {
            s.kind = k;
        }
    }
}

// ---- dead stores -------------------------------------------------------

/// Scalars read anywhere in the function. An inc/dec that is a whole
/// statement does not count as a read of its operand.
fn read_vars(f: &Function) -> HashSet<VarId> {
    fn visit(e: &Expr, written: bool, out: &mut HashSet<VarId>) {
        match &e.kind {
            ExprKind::Var(v) if !written => {
                out.insert(*v);
            }
            ExprKind::Unary(op, x) if op.is_inc_dec() => visit(x, true, out),
            ExprKind::Deref(x) => visit(x, false, out),
            _ => {
                for c in e.children() {
                    visit(c, false, out);
                }
            }
        }
    }
    let mut out = HashSet::new();
    walk_stmts(&f.body, &mut |s| match &s.kind {
        StmtKind::Assign { target, value } => {
            visit(target, true, &mut out);
            visit(value, false, &mut out);
        }
        StmtKind::Read(t) => visit(t, true, &mut out),
        StmtKind::Expr(e) => match &e.kind {
            ExprKind::Unary(op, x) if op.is_inc_dec() => visit(x, true, &mut out),
            _ => visit(e, false, &mut out),
        },
        _ => {
            for e in stmt_exprs(s) {
                visit(e, false, &mut out);
            }
        }
    });
    out
}

fn dead_store(f: &mut Function) {
    let read = read_vars(f);
    let dead: HashSet<VarId> = (0..f.vars.len() as u32)
        .map(VarId)
        .filter(|v| !read.contains(v) && !f.var(*v).is_array())
        .collect();
    if dead.is_empty() {
        return;
    }
    remove_dead(&mut f.body, &dead);
}

fn remove_dead(b: &mut Block, dead: &HashSet<VarId>) {
    for s in &mut b.stmts {
        let new = match &mut s.kind {
            StmtKind::Assign { target, value } => match target.kind {
                ExprKind::Var(v) if dead.contains(&v) => Some(if value.is_pure() {
                    StmtKind::Empty
                } else {
                    StmtKind::Expr(value.clone())
                }),
                _ => None,
            },
            StmtKind::Decl { var, init } if dead.contains(var) => {
                if init.as_ref().is_some_and(|e| e.is_pure()) {
                    *init = None;
                }
                None
            }
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Unary(op, x) if op.is_inc_dec() => match x.kind {
                    ExprKind::Var(v) if dead.contains(&v) => Some(StmtKind::Empty),
                    _ => None,
                },
                _ if e.is_pure() => Some(StmtKind::Empty),
                _ => None,
            },
            _ => None,
        };
        if let Some(k) = new {
            s.kind = k;
        }
        match &mut s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                remove_dead(then_branch, dead);
                if let Some(e) = else_branch {
                    remove_dead(e, dead);
                }
            }
            StmtKind::While { body, .. } => remove_dead(body, dead),
            StmtKind::Switch { cases, default, .. } => {
                for c in cases {
                    remove_dead(&mut c.body, dead);
                }
                if let Some(d) = default {
                    remove_dead(d, dead);
                }
            }
            StmtKind::Block(inner) => remove_dead(inner, dead),
            _ => {}
        }
    }
}

// ---- normalization and renaming ----------------------------------------

/// Drop empty statements, unused declarations and braces that scope nothing.
fn normalize_block(b: &mut Block) {
    let stmts = std::mem::take(&mut b.stmts);
    for mut s in stmts {
        match &mut s.kind {
            StmtKind::Empty => continue,
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                normalize_block(then_branch);
                if let Some(e) = else_branch {
                    normalize_block(e);
                    if e.stmts.is_empty() {
                        *else_branch = None;
                    }
                }
            }
            StmtKind::While { body, .. } => normalize_block(body),
            StmtKind::Switch { cases, default, .. } => {
                for c in cases {
                    normalize_block(&mut c.body);
                }
                if let Some(d) = default {
                    normalize_block(d);
                }
            }
            StmtKind::Block(inner) => {
                normalize_block(inner);
                let declares = inner.stmts.iter().any(|x| matches!(x.kind, StmtKind::Decl { .. }));
                if !declares {
                    b.stmts.append(&mut inner.stmts);
                    continue;
                }
            }
            _ => {}
        }
        b.stmts.push(s);
    }
}

/// Renumber variables so that `v0, v1, ...` follow parameter and
/// declaration order, dropping declarations of variables never mentioned.
fn rename_locals(f: &mut Function) {
    let mut mentioned = HashSet::new();
    walk_stmts(&f.body, &mut |s| {
        for e in stmt_exprs(s) {
            walk_expr(e, &mut |x| {
                if let ExprKind::Var(v) = x.kind {
                    mentioned.insert(v);
                }
            });
        }
    });
    drop_unused_decls(&mut f.body, &mentioned);

    let mut order: Vec<VarId> = f.params.clone();
    walk_stmts(&f.body, &mut |s| {
        if let StmtKind::Decl { var, .. } = s.kind {
            order.push(var);
        }
    });
    let map: HashMap<VarId, VarId> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, VarId(i as u32)))
        .collect();
    let old = std::mem::take(&mut f.vars);
    let mut vars = vec![None; order.len()];
    for (i, info) in old.into_iter().enumerate() {
        if let Some(n) = map.get(&VarId(i as u32)) {
            vars[n.0 as usize] = Some(info);
        }
    }
    f.vars = vars.into_iter().map(|v| v.expect("every ordered var exists")).collect();
    f.params = f.params.iter().map(|p| map[p]).collect();
    remap_block(&mut f.body, &map);
}

fn drop_unused_decls(b: &mut Block, mentioned: &HashSet<VarId>) {
    b.stmts.retain(|s| match &s.kind {
        StmtKind::Decl { var, init } => init.is_some() || mentioned.contains(var),
        _ => true,
    });
    for s in &mut b.stmts {
        match &mut s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                drop_unused_decls(then_branch, mentioned);
                if let Some(e) = else_branch {
                    drop_unused_decls(e, mentioned);
                }
            }
            StmtKind::While { body, .. } => drop_unused_decls(body, mentioned),
            StmtKind::Switch { cases, default, .. } => {
                for c in cases {
                    drop_unused_decls(&mut c.body, mentioned);
                }
                if let Some(d) = default {
                    drop_unused_decls(d, mentioned);
                }
            }
            StmtKind::Block(inner) => drop_unused_decls(inner, mentioned),
            _ => {}
        }
    }
}

fn remap_expr(e: &mut Expr, map: &HashMap<VarId, VarId>) {
    if let ExprKind::Var(v) = &mut e.kind {
        *v = map[v];
    }
    for c in children_mut(e) {
        remap_expr(c, map);
    }
}

fn remap_block(b: &mut Block, map: &HashMap<VarId, VarId>) {
    each_expr_mut(b, &mut |e| remap_expr(e, map));
    fn decls(b: &mut Block, map: &HashMap<VarId, VarId>) {
        for s in &mut b.stmts {
            if let StmtKind::Decl { var, .. } = &mut s.kind {
                *var = map[var];
            }
            match &mut s.kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    decls(then_branch, map);
                    if let Some(e) = else_branch {
                        decls(e, map);
                    }
                }
                StmtKind::While { body, .. } => decls(body, map),
                StmtKind::Switch { cases, default, .. } => {
                    for c in cases {
                        decls(&mut c.body, map);
                    }
                    if let Some(d) = default {
                        decls(d, map);
                    }
                }
                StmtKind::Block(inner) => decls(inner, map),
                _ => {}
            }
        }
    }
    decls(b, map);
}

// ---- dedup -------------------------------------------------------------

/// Flag trivially equivalent and duplicate mutants in place. Returns the
/// canonical form of the original program.
pub fn dedup_mutants(program: &Program, mutants: &mut [Mutant]) -> CanonicalForm {
    let original = canonicalize(program);
    let mut first: HashMap<CanonicalForm, usize> = HashMap::new();
    let mut order: Vec<usize> = (0..mutants.len()).collect();
    order.sort_by_key(|&i| mutants[i].id);
    for i in order {
        let form = match apply_mutant(program, &mutants[i]) {
            Ok(p) => canonicalize(&p),
            Err(_) => continue,
        };
        mutants[i].tce = if form == original {
            TceStatus::TriviallyEquivalent
        } else if let Some(&rep) = first.get(&form) {
            TceStatus::DuplicateOf(rep)
        } else {
            first.insert(form, mutants[i].id);
            TceStatus::Live
        };
    }
    original
}

pub fn write_report<W: Write>(out: W, mutants: &[Mutant]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mutant_id", "status", "duplicate_of"])?;
    for m in mutants {
        let (status, dup) = match m.tce {
            TceStatus::Live => ("live", String::new()),
            TceStatus::TriviallyEquivalent => ("trivially_equivalent", String::new()),
            TceStatus::DuplicateOf(d) => ("duplicate", d.to_string()),
        };
        w.write_record([m.id.to_string(), status.to_string(), dup])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_program, Analysis};
    use crate::mutation::enumerate_mutants;

    fn canon(src: &str) -> CanonicalForm {
        canonicalize(&parse_program(src).unwrap())
    }

    #[test]
    fn additive_identity_is_erased() {
        assert_eq!(
            canon("int main() { int a; int x; read a; x = a + 0; print x; return 0; }"),
            canon("int main() { int a; int x; read a; x = a; print x; return 0; }")
        );
    }

    #[test]
    fn constant_false_branch_is_pruned() {
        assert_eq!(
            canon("int main() { int a; read a; if (0) { print a; } print 1; return 0; }"),
            canon("int main() { int a; read a; print 1; return 0; }")
        );
    }

    #[test]
    fn renaming_ignores_local_names() {
        assert_eq!(
            canon("int main() { int a; read a; print a * 2; return 0; }"),
            canon("int main() { int zz; read zz; print zz * 2; return 0; }")
        );
    }

    #[test]
    fn dead_stores_are_removed_but_reads_stay() {
        assert_eq!(
            canon("int main() { int a; int t; read a; t = a * 3; t++; print a; return 0; }"),
            canon("int main() { int a; read a; print a; return 0; }")
        );
        assert_ne!(
            canon("int main() { int a; int t; read a; read t; print a; return 0; }"),
            canon("int main() { int a; read a; print a; return 0; }")
        );
    }

    #[test]
    fn division_by_variable_is_not_removed() {
        assert_ne!(
            canon("int main() { int a; int t; read a; t = 1 / a; print a; return 0; }"),
            canon("int main() { int a; read a; print a; return 0; }")
        );
    }

    #[test]
    fn canonicalization_is_idempotent_on_the_form() {
        let p = parse_program("int main() { int a; int b; read a; b = (a + 0) * 1; if (1) { print b - b; } return 0; }").unwrap();
        let once = canonicalize(&p);
        let again = canon(&once.0);
        assert_eq!(once, again);
    }

    #[test]
    fn times_one_mutant_of_times_one_is_equivalent() {
        let an = Analysis::from_source("int main() { int a; read a; print a * 1; return 0; }").unwrap();
        let mut ms = enumerate_mutants("p", &an.program, &an.cfg);
        dedup_mutants(&an.program, &mut ms);
        let keep_left = ms.iter().find(|m| m.type_string == "a * b → a").unwrap();
        assert_eq!(keep_left.tce, TceStatus::TriviallyEquivalent);
        // `a * 1 → a / 1` reduces to the same program as well.
        let div = ms.iter().find(|m| m.type_string == "a * b → a / b").unwrap();
        assert_eq!(div.tce, TceStatus::TriviallyEquivalent);
    }

    #[test]
    fn duplicates_point_to_lowest_id() {
        let an = Analysis::from_source("int main() { int a; read a; print a + 2; return 0; }").unwrap();
        let mut ms = enumerate_mutants("p", &an.program, &an.cfg);
        dedup_mutants(&an.program, &mut ms);
        // `a + 2 → a - 2` matches nothing else, while `2 → 2 + 1` folds to
        // `a + 3`, as does `2 → 2 - -1`.
        let plus = ms.iter().find(|m| m.type_string == "CONST → CONST + 1").unwrap();
        let minus = ms.iter().find(|m| m.type_string == "CONST → CONST - -1").unwrap();
        assert_eq!(plus.tce, TceStatus::Live);
        assert_eq!(minus.tce, TceStatus::DuplicateOf(plus.id));
        // The unmutated program is equivalent to itself.
        assert_eq!(canonicalize(&an.program), canonicalize(&an.program.clone()));
    }
}
