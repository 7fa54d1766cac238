//! Source printer. Output reparses to an isomorphic AST.

use std::fmt::Write;

use super::ast::*;

#[derive(Clone, Copy, Debug, Default)]
pub struct PrintOptions {
    /// Replace local names by `v0, v1, ...` in declaration order.
    pub rename_locals: bool,
}

pub fn pretty_print(program: &Program) -> String {
    print_with(program, PrintOptions::default())
}

pub fn print_with(program: &Program, opts: PrintOptions) -> String {
    let mut out = String::new();
    for (i, f) in program.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_function(&mut out, f, opts);
    }
    out
}

pub fn print_function(out: &mut String, f: &Function, opts: PrintOptions) {
    let p = Printer { func: f, opts };
    let ret = match f.ret {
        Type::Int => "int",
        Type::IntPtr => "int *",
        Type::Void => "void",
    };
    let sep = if f.ret == Type::IntPtr { "" } else { " " };
    let params: Vec<String> = f
        .params
        .iter()
        .map(|v| format!("{}{}", type_prefix(f.var(*v).ty), p.name(*v)))
        .collect();
    let _ = writeln!(out, "{ret}{sep}{}({}) {{", f.name, params.join(", "));
    for s in &f.body.stmts {
        p.stmt(out, s, 1);
    }
    out.push_str("}\n");
}

/// Print a single expression in the context of `func`.
pub fn expr_to_string(func: &Function, e: &Expr) -> String {
    let p = Printer {
        func,
        opts: PrintOptions::default(),
    };
    let mut s = String::new();
    p.expr(&mut s, e);
    s
}

/// Print a single statement (and any nested statements) in the context of `func`.
pub fn stmt_to_string(func: &Function, s: &Stmt) -> String {
    let p = Printer {
        func,
        opts: PrintOptions::default(),
    };
    let mut out = String::new();
    p.stmt(&mut out, s, 0);
    out
}

fn type_prefix(ty: Type) -> &'static str {
    match ty {
        Type::IntPtr => "int *",
        _ => "int ",
    }
}

struct Printer<'a> {
    func: &'a Function,
    opts: PrintOptions,
}

/// How tightly an operand slot binds.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Unary,
    Postfix,
}

impl Printer<'_> {
    fn name(&self, v: VarId) -> String {
        if self.opts.rename_locals {
            format!("v{}", v.0)
        } else {
            self.func.var(v).name.clone()
        }
    }

    fn indent(out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("    ");
        }
    }

    fn stmt(&self, out: &mut String, s: &Stmt, depth: usize) {
        Self::indent(out, depth);
        match &s.kind {
            StmtKind::Decl { var, init } => {
                let info = self.func.var(*var);
                let _ = match info.array_len {
                    Some(n) => write!(out, "int {}[{n}]", self.name(*var)),
                    None => write!(out, "{}{}", type_prefix(info.ty), self.name(*var)),
                };
                if let Some(e) = init {
                    out.push_str(" = ");
                    self.expr(out, e);
                }
                out.push_str(";\n");
            }
            StmtKind::Assign { target, value } => {
                self.expr(out, target);
                out.push_str(" = ");
                self.expr(out, value);
                out.push_str(";\n");
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                out.push_str("if (");
                self.expr(out, cond);
                out.push_str(") ");
                self.block(out, then_branch, depth);
                if let Some(e) = else_branch {
                    out.push_str(" else ");
                    self.block(out, e, depth);
                }
                out.push('\n');
            }
            StmtKind::While { cond, body } => {
                out.push_str("while (");
                self.expr(out, cond);
                out.push_str(") ");
                self.block(out, body, depth);
                out.push('\n');
            }
            StmtKind::Switch {
                scrutinee,
                cases,
                default,
            } => {
                out.push_str("switch (");
                self.expr(out, scrutinee);
                out.push_str(") {\n");
                for c in cases {
                    Self::indent(out, depth);
                    let _ = writeln!(out, "case {}:", c.value);
                    for st in &c.body.stmts {
                        self.stmt(out, st, depth + 1);
                    }
                }
                if let Some(d) = default {
                    Self::indent(out, depth);
                    out.push_str("default:\n");
                    for st in &d.stmts {
                        self.stmt(out, st, depth + 1);
                    }
                }
                Self::indent(out, depth);
                out.push_str("}\n");
            }
            StmtKind::Return(None) => out.push_str("return;\n"),
            StmtKind::Return(Some(e)) => {
                out.push_str("return ");
                self.expr(out, e);
                out.push_str(";\n");
            }
            StmtKind::Read(e) => {
                out.push_str("read ");
                self.expr(out, e);
                out.push_str(";\n");
            }
            StmtKind::Print(e) => {
                out.push_str("print ");
                self.expr(out, e);
                out.push_str(";\n");
            }
            StmtKind::Expr(e) => {
                // A bare `trap;` would reparse as the trap statement.
                if matches!(e.kind, ExprKind::Trap) {
                    out.push_str("(trap);\n");
                } else {
                    self.expr(out, e);
                    out.push_str(";\n");
                }
            }
            StmtKind::Block(b) => {
                self.block(out, b, depth);
                out.push('\n');
            }
            StmtKind::Empty => out.push_str(";\n"),
            StmtKind::Trap => out.push_str("trap;\n"),
        }
    }

    fn block(&self, out: &mut String, b: &Block, depth: usize) {
        if b.stmts.is_empty() {
            out.push_str("{}");
            return;
        }
        out.push_str("{\n");
        for s in &b.stmts {
            self.stmt(out, s, depth + 1);
        }
        Self::indent(out, depth);
        out.push('}');
    }

    fn expr(&self, out: &mut String, e: &Expr) {
        match &e.kind {
            ExprKind::Binary(op, l, r) => {
                let prec = op.precedence();
                self.binary_operand(out, l, prec, false);
                let _ = write!(out, " {} ", op.symbol());
                self.binary_operand(out, r, prec, true);
            }
            _ => self.operand(out, e, Slot::Unary),
        }
    }

    fn binary_operand(&self, out: &mut String, e: &Expr, parent: u8, right: bool) {
        if let ExprKind::Binary(op, ..) = &e.kind {
            let p = op.precedence();
            if p < parent || (right && p == parent) {
                out.push('(');
                self.expr(out, e);
                out.push(')');
                return;
            }
        }
        self.expr(out, e);
    }

    fn index_sugar(e: &Expr) -> Option<(&Expr, &Expr)> {
        if let ExprKind::Deref(inner) = &e.kind {
            if let ExprKind::Binary(BinOp::Add, base, idx) = &inner.kind {
                if base.ty == Type::IntPtr && idx.ty == Type::Int {
                    return Some((base, idx));
                }
            }
        }
        None
    }

    /// Print `e` where at least `slot` binding strength is required.
    fn operand(&self, out: &mut String, e: &Expr, slot: Slot) {
        let natural = match &e.kind {
            ExprKind::Binary(..) => None,
            ExprKind::Lit(v) if *v < 0 => Some(Slot::Unary),
            ExprKind::Unary(op, _) if !matches!(op, UnOp::PostInc | UnOp::PostDec | UnOp::Abs) => {
                Some(Slot::Unary)
            }
            ExprKind::Deref(_) if Self::index_sugar(e).is_none() => Some(Slot::Unary),
            _ => Some(Slot::Postfix),
        };
        if natural.is_none_or(|n| n < slot) {
            out.push('(');
            self.expr(out, e);
            out.push(')');
            return;
        }
        match &e.kind {
            ExprKind::Lit(v) => {
                let _ = write!(out, "{v}");
            }
            ExprKind::Var(v) => out.push_str(&self.name(*v)),
            ExprKind::Trap => out.push_str("trap"),
            ExprKind::Call { callee, args } => {
                out.push_str(callee);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.expr(out, a);
                }
                out.push(')');
            }
            ExprKind::Deref(x) => {
                if let Some((base, idx)) = Self::index_sugar(e) {
                    self.operand(out, base, Slot::Postfix);
                    out.push('[');
                    self.expr(out, idx);
                    out.push(']');
                } else {
                    out.push('*');
                    self.operand(out, x, Slot::Unary);
                }
            }
            ExprKind::Unary(op, x) => match op {
                UnOp::Abs => {
                    out.push_str("abs(");
                    self.expr(out, x);
                    out.push(')');
                }
                UnOp::PostInc | UnOp::PostDec => {
                    self.operand(out, x, Slot::Postfix);
                    out.push_str(if *op == UnOp::PostInc { "++" } else { "--" });
                }
                UnOp::Neg => {
                    out.push('-');
                    // `-5` would lex as a literal and `- -x` needs a break.
                    if matches!(x.kind, ExprKind::Lit(_)) || self.starts_with_minus(x) {
                        out.push('(');
                        self.expr(out, x);
                        out.push(')');
                    } else {
                        self.operand(out, x, Slot::Unary);
                    }
                }
                UnOp::Not | UnOp::PreInc | UnOp::PreDec => {
                    out.push_str(match op {
                        UnOp::Not => "!",
                        UnOp::PreInc => "++",
                        _ => "--",
                    });
                    if self.starts_with_plus_or_minus(x) {
                        out.push('(');
                        self.expr(out, x);
                        out.push(')');
                    } else {
                        self.operand(out, x, Slot::Unary);
                    }
                }
            },
            ExprKind::Binary(..) => unreachable!("binary handled above"),
        }
    }

    fn starts_with_minus(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Lit(v) => *v < 0,
            ExprKind::Unary(UnOp::Neg | UnOp::PreDec, _) => true,
            ExprKind::Unary(UnOp::PostInc | UnOp::PostDec, x) => self.starts_with_minus(x),
            ExprKind::Binary(_, l, _) => self.starts_with_minus(l),
            _ => false,
        }
    }

    fn starts_with_plus_or_minus(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Unary(UnOp::PreInc, _) => true,
            ExprKind::Unary(UnOp::PostInc | UnOp::PostDec, x) => self.starts_with_plus_or_minus(x),
            _ => self.starts_with_minus(e),
        }
    }
}

/// Structural equality of two programs, ignoring node ids and spans.
pub fn isomorphic(a: &Program, b: &Program) -> bool {
    a.functions.len() == b.functions.len()
        && a.functions.iter().zip(&b.functions).all(|(f, g)| {
            f.name == g.name
                && f.ret == g.ret
                && f.params == g.params
                && f.vars.len() == g.vars.len()
                && f.vars.iter().zip(&g.vars).all(|(x, y)| {
                    x.name == y.name && x.ty == y.ty && x.array_len == y.array_len && x.is_param == y.is_param
                })
                && blocks_iso(&f.body, &g.body)
        })
}

fn blocks_iso(a: &Block, b: &Block) -> bool {
    a.stmts.len() == b.stmts.len() && a.stmts.iter().zip(&b.stmts).all(|(x, y)| stmts_iso(x, y))
}

fn opt_expr_iso(a: &Option<Expr>, b: &Option<Expr>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.same_shape(y),
        _ => false,
    }
}

fn stmts_iso(a: &Stmt, b: &Stmt) -> bool {
    use StmtKind::*;
    match (&a.kind, &b.kind) {
        (Decl { var: v1, init: i1 }, Decl { var: v2, init: i2 }) => v1 == v2 && opt_expr_iso(i1, i2),
        (Assign { target: t1, value: x1 }, Assign { target: t2, value: x2 }) => {
            t1.same_shape(t2) && x1.same_shape(x2)
        }
        (
            If {
                cond: c1,
                then_branch: t1,
                else_branch: e1,
            },
            If {
                cond: c2,
                then_branch: t2,
                else_branch: e2,
            },
        ) => {
            c1.same_shape(c2)
                && blocks_iso(t1, t2)
                && match (e1, e2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => blocks_iso(x, y),
                    _ => false,
                }
        }
        (While { cond: c1, body: b1 }, While { cond: c2, body: b2 }) => {
            c1.same_shape(c2) && blocks_iso(b1, b2)
        }
        (
            Switch {
                scrutinee: s1,
                cases: k1,
                default: d1,
            },
            Switch {
                scrutinee: s2,
                cases: k2,
                default: d2,
            },
        ) => {
            s1.same_shape(s2)
                && k1.len() == k2.len()
                && k1
                    .iter()
                    .zip(k2)
                    .all(|(x, y)| x.value == y.value && blocks_iso(&x.body, &y.body))
                && match (d1, d2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => blocks_iso(x, y),
                    _ => false,
                }
        }
        (Return(x), Return(y)) => opt_expr_iso(x, y),
        (Read(x), Read(y)) | (Print(x), Print(y)) | (Expr(x), Expr(y)) => x.same_shape(y),
        (Block(x), Block(y)) => blocks_iso(x, y),
        (Empty, Empty) | (Trap, Trap) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn roundtrip(src: &str) {
        let p = parse_program(src).unwrap();
        let printed = pretty_print(&p);
        let q = parse_program(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert!(isomorphic(&p, &q), "not isomorphic:\n{printed}");
        assert_eq!(printed, pretty_print(&q));
    }

    #[test]
    fn precedence_and_associativity_survive() {
        roundtrip("int main() { int a; int b; print a - (b - 1); print (a - b) - 1; print a * (b + 1); print -(5); print -5; print - -a; print -(-1); print !-a; return 0; }");
    }

    #[test]
    fn arrays_pointers_and_postfix() {
        roundtrip("int f(int *p, int n) { int s[4]; s[n % 4] = *(p - 1); (*p)++; s[0]--; p = p + 1; return *p + s[1]; }
                   int main() { int a[3]; return f(a, 2); }");
    }

    #[test]
    fn control_flow_shapes() {
        roundtrip("void g() { int x; if (x) x = 1; else { x = 2; } while (x < 3) x++; switch (x) { case -1: x = 0; case 2: default: ; } { trap; } return; }");
    }
}
