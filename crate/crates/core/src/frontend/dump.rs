//! Structured JSON dump of the AST, CFG and dependence edges.

use serde_json::{json, Value};

use super::ast::*;
use super::Analysis;

pub fn analysis_json(a: &Analysis) -> Value {
    let functions: Vec<Value> = a
        .program
        .functions
        .iter()
        .zip(&a.cfg.functions)
        .map(|(f, fc)| {
            let blocks: Vec<Value> = fc
                .blocks
                .iter()
                .map(|b| {
                    json!({
                        "id": b.id,
                        "index": b.index,
                        "kind": b.kind.label(),
                        "stmts": b.stmts.iter().map(|s| s.0).collect::<Vec<_>>(),
                        "succs": b.succs,
                        "preds": b.preds,
                    })
                })
                .collect();
            json!({
                "id": f.id.0,
                "kind": "function",
                "name": f.name,
                "ret": f.ret.name(),
                "params": f.params.iter().map(|p| f.var(*p).name.clone()).collect::<Vec<_>>(),
                "vars": f.vars.iter().map(|v| json!({
                    "name": v.name,
                    "type": v.ty.name(),
                    "array_len": v.array_len,
                    "decl": v.decl.0,
                })).collect::<Vec<_>>(),
                "body": block_json(f, &f.body),
                "cfg": { "entry": fc.entry, "blocks": blocks },
            })
        })
        .collect();
    json!({
        "functions": functions,
        "data_deps": a.deps.data.iter().map(|e| json!({"use": e.use_site.0, "def": e.def_site.0})).collect::<Vec<_>>(),
        "control_deps": a.deps.control.iter().map(|e| json!({"stmt": e.stmt.0, "branch": e.branch.0, "expr": e.branch_expr.0})).collect::<Vec<_>>(),
    })
}

fn span_json(s: Span) -> Value {
    json!([s.line, s.column])
}

fn block_json(f: &Function, b: &Block) -> Value {
    json!({
        "id": b.id.0,
        "kind": "block",
        "span": span_json(b.span),
        "children": b.stmts.iter().map(|s| stmt_json(f, s)).collect::<Vec<_>>(),
    })
}

fn stmt_json(f: &Function, s: &Stmt) -> Value {
    let mut children: Vec<Value> = stmt_exprs(s).into_iter().map(|e| expr_json(f, e)).collect();
    match &s.kind {
        StmtKind::Switch { cases, default, .. } => {
            for c in cases {
                children.push(json!({
                    "id": c.id.0,
                    "kind": "case",
                    "value": c.value,
                    "span": span_json(c.span),
                    "children": [block_json(f, &c.body)],
                }));
            }
            if let Some(d) = default {
                children.push(json!({"kind": "default", "children": [block_json(f, d)]}));
            }
        }
        _ => children.extend(child_blocks(s).into_iter().map(|b| block_json(f, b))),
    }
    let mut v = json!({
        "id": s.id.0,
        "kind": s.kind.kind_name(),
        "span": span_json(s.span),
        "children": children,
    });
    if let StmtKind::Decl { var, .. } = &s.kind {
        v["var"] = json!(f.var(*var).name);
    }
    v
}

fn expr_json(f: &Function, e: &Expr) -> Value {
    let mut v = json!({
        "id": e.id.0,
        "kind": e.kind.kind_name(),
        "type": e.ty.name(),
        "span": span_json(e.span),
        "children": e.children().into_iter().map(|c| expr_json(f, c)).collect::<Vec<_>>(),
    });
    match &e.kind {
        ExprKind::Lit(x) => v["value"] = json!(x),
        ExprKind::Var(x) => v["name"] = json!(f.var(*x).name),
        ExprKind::Unary(op, _) => v["op"] = json!(op.pattern()),
        ExprKind::Binary(op, ..) => v["op"] = json!(op.symbol()),
        ExprKind::Call { callee, .. } => v["callee"] = json!(callee),
        _ => {}
    }
    v
}
