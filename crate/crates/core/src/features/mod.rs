//! Static mutant features and their numeric encoding.

mod encode;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::frontend::ast::*;
use crate::frontend::index::NodeIndex;
use crate::frontend::Analysis;
use crate::mutation::Mutant;

pub use encode::{fit_encoder, write_matrix, Encoding};

pub const NUMERIC: [&str; 15] = [
    "Complexity",
    "CfgDepth",
    "CfgPredNum",
    "CfgSuccNum",
    "AstNumParents",
    "NumOutDataDeps",
    "NumInDataDeps",
    "NumOutCtrlDeps",
    "NumInCtrlDeps",
    "NumTieDeps",
    "AstParentsNumOutDataDeps",
    "AstParentsNumInDataDeps",
    "AstParentsNumOutCtrlDeps",
    "AstParentsNumInCtrlDeps",
    "AstParentsNumTieDeps",
];

pub const BOOLEAN: [&str; 3] = ["AstChildHasIdentifier", "AstChildHasLiteral", "AstChildHasOperator"];

pub const CATEGORICAL: [&str; 10] = [
    "TypeAstParent",
    "TypeMutant",
    "TypeStmtBB",
    "AstParentMutantType",
    "OutDataDepMutantType",
    "InDataDepMutantType",
    "OutCtrlDepMutantType",
    "InCtrlDepMutantType",
    "DataTypesOfOperands",
    "DataTypeOfValue",
];

/// Value counts of one categorical feature. Single-valued features hold
/// one entry with count 1; aggregated ones sum one-hot vectors.
pub type Bag = BTreeMap<String, u32>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawFeatureRecord {
    pub mutant_id: usize,
    pub program_id: String,
    pub numeric: [f64; 15],
    pub boolean: [bool; 3],
    pub categorical: Vec<Bag>,
}

impl RawFeatureRecord {
    pub fn numeric(&self, name: &str) -> f64 {
        self.numeric[NUMERIC.iter().position(|n| *n == name).expect("numeric feature name")]
    }

    pub fn boolean(&self, name: &str) -> bool {
        self.boolean[BOOLEAN.iter().position(|n| *n == name).expect("boolean feature name")]
    }

    pub fn categorical(&self, name: &str) -> &Bag {
        &self.categorical[CATEGORICAL.iter().position(|n| *n == name).expect("categorical feature name")]
    }

    /// The single value of a single-valued categorical feature.
    pub fn category(&self, name: &str) -> &str {
        self.categorical(name).keys().next().map(String::as_str).unwrap_or("")
    }
}

fn single(v: impl Into<String>) -> Bag {
    let mut b = Bag::new();
    b.insert(v.into(), 1);
    b
}

/// A node of the dependence relations: an expression or a statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Expr(NodeId),
    Stmt(NodeId),
}

/// Precomputed lookups shared by every mutant of one program.
pub struct FeatureContext<'a> {
    an: &'a Analysis,
    index: NodeIndex<'a>,
    mutants: &'a [Mutant],
    /// Mutants whose mutated expression is the key (statement-level
    /// mutants are keyed by their statement).
    on_node: HashMap<NodeId, Vec<usize>>,
    on_stmt: HashMap<NodeId, Vec<usize>>,
    defs_at: HashMap<NodeId, Vec<NodeId>>,
    defs_of_stmt: HashMap<NodeId, Vec<NodeId>>,
    defs_of_value: HashMap<NodeId, Vec<NodeId>>,
    uses_of_stmt: HashMap<NodeId, Vec<NodeId>>,
}

impl<'a> FeatureContext<'a> {
    pub fn new(an: &'a Analysis, mutants: &'a [Mutant]) -> Self {
        let mut on_node: HashMap<NodeId, Vec<usize>> = HashMap::new();
        let mut on_stmt: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (i, m) in mutants.iter().enumerate() {
            on_node.entry(m.expr).or_default().push(i);
            on_stmt.entry(m.stmt).or_default().push(i);
        }
        let mut defs_at: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        let mut defs_of_stmt: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        let mut defs_of_value: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for d in &an.deps.defs {
            defs_at.entry(d.site).or_default().push(d.site);
            if let Some(s) = d.stmt {
                defs_of_stmt.entry(s).or_default().push(d.site);
            }
            if let Some(v) = d.value {
                defs_of_value.entry(v).or_default().push(d.site);
            }
        }
        let mut uses_of_stmt: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for u in &an.deps.uses {
            uses_of_stmt.entry(u.stmt).or_default().push(u.site);
        }
        FeatureContext {
            an,
            index: NodeIndex::new(&an.program),
            mutants,
            on_node,
            on_stmt,
            defs_at,
            defs_of_stmt,
            defs_of_value,
            uses_of_stmt,
        }
    }

    /// Mutants attributed to a dependence site. A statement site stands for
    /// everything mutated in that statement; an expression site for the
    /// mutants of that expression node.
    fn site_mutants(&self, site: NodeId) -> &[usize] {
        let map = if self.index.stmts.contains_key(&site) {
            &self.on_stmt
        } else {
            &self.on_node
        };
        map.get(&site).map(Vec::as_slice).unwrap_or(&[])
    }

    fn node_mutants(&self, n: Node) -> &[usize] {
        let id = match n {
            Node::Expr(e) | Node::Stmt(e) => e,
        };
        self.on_node.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Sites producing the values `n` consumes: reaching definitions of the
    /// reads it performs and, for expressions, its non-constant operands.
    fn in_data(&self, n: Node) -> BTreeSet<NodeId> {
        let deps = &self.an.deps;
        let mut out = BTreeSet::new();
        match n {
            Node::Expr(id) => {
                out.extend(deps.defs_reaching(id));
                let e = self.index.expr(id).expect("indexed expression");
                for c in e.children() {
                    match c.kind {
                        ExprKind::Var(_) => out.extend(deps.defs_reaching(c.id)),
                        ExprKind::Lit(_) | ExprKind::Trap => {}
                        _ => {
                            out.insert(c.id);
                        }
                    }
                }
            }
            Node::Stmt(id) => {
                for u in self.uses_of_stmt.get(&id).into_iter().flatten() {
                    out.extend(deps.defs_reaching(*u));
                }
            }
        }
        out
    }

    /// Sites reading values written by `n`.
    fn out_data(&self, n: Node) -> BTreeSet<NodeId> {
        let deps = &self.an.deps;
        let defs: Vec<NodeId> = match n {
            Node::Expr(id) => self
                .defs_at
                .get(&id)
                .into_iter()
                .chain(self.defs_of_value.get(&id))
                .flatten()
                .copied()
                .collect(),
            Node::Stmt(id) => self.defs_of_stmt.get(&id).cloned().unwrap_or_default(),
        };
        defs.into_iter().flat_map(|d| deps.uses_reached(d)).collect()
    }

    /// Statements whose execution `n` decides.
    fn out_ctrl(&self, n: Node) -> BTreeSet<NodeId> {
        self.an
            .deps
            .control
            .iter()
            .filter(|e| match n {
                Node::Expr(id) => e.branch_expr == id,
                Node::Stmt(id) => e.branch == id,
            })
            .map(|e| e.stmt)
            .collect()
    }

    /// Branch expressions deciding whether `n` executes.
    fn in_ctrl(&self, n: Node) -> BTreeSet<NodeId> {
        let stmt = match n {
            Node::Expr(id) => self.index.exprs[&id].stmt,
            Node::Stmt(id) => id,
        };
        self.an.deps.controlling(stmt).iter().map(|e| e.branch_expr).collect()
    }

    fn parent(&self, n: Node) -> Option<Node> {
        match n {
            Node::Expr(id) => {
                let entry = &self.index.exprs[&id];
                Some(match entry.parent {
                    Some(p) => Node::Expr(p),
                    None => Node::Stmt(entry.stmt),
                })
            }
            Node::Stmt(id) => self.index.stmts[&id].parent.map(Node::Stmt),
        }
    }

    fn node_type(&self, n: Node) -> String {
        match n {
            Node::Expr(id) => {
                let e = self.index.expr(id).expect("indexed expression");
                match &e.kind {
                    ExprKind::Binary(op, ..) => format!("a {} b", op.symbol()),
                    ExprKind::Unary(op, _) => op.pattern().to_string(),
                    k => k.kind_name().to_string(),
                }
            }
            Node::Stmt(id) => self.index.stmt(id).expect("indexed statement").kind.kind_name().to_string(),
        }
    }

    fn count(&self, sites: &BTreeSet<NodeId>, stmt_sites: bool) -> (usize, Bag) {
        let mut bag = Bag::new();
        let mut n = 0;
        for &s in sites {
            let ms = if stmt_sites {
                self.on_stmt.get(&s).map(Vec::as_slice).unwrap_or(&[])
            } else {
                self.site_mutants(s)
            };
            for &i in ms {
                n += 1;
                *bag.entry(self.mutants[i].type_string.clone()).or_default() += 1;
            }
        }
        (n, bag)
    }

    /// Mutants on the branch expressions themselves.
    fn count_exprs(&self, exprs: &BTreeSet<NodeId>) -> (usize, Bag) {
        let mut bag = Bag::new();
        let mut n = 0;
        for e in exprs {
            for &i in self.on_node.get(e).map(Vec::as_slice).unwrap_or(&[]) {
                n += 1;
                *bag.entry(self.mutants[i].type_string.clone()).or_default() += 1;
            }
        }
        (n, bag)
    }

    fn children_of(&self, n: Node) -> Vec<&'a Expr> {
        match n {
            Node::Expr(id) => self.index.expr(id).expect("indexed expression").children(),
            Node::Stmt(id) => stmt_exprs(self.index.stmt(id).expect("indexed statement")),
        }
    }

    pub fn extract(&self, m: &Mutant) -> RawFeatureRecord {
        let an = self.an;
        let node = if m.is_statement_level() {
            Node::Stmt(m.stmt)
        } else {
            Node::Expr(m.expr)
        };
        let (fi, bi) = an.cfg.locate(m.stmt).expect("mutated statement has a block");
        let fc = &an.cfg.functions[fi];
        let block = &fc.blocks[bi];

        let complexity = self.on_stmt.get(&m.stmt).map_or(0, Vec::len);
        let (out_d, out_d_bag) = self.count(&self.out_data(node), false);
        let (in_d, in_d_bag) = self.count(&self.in_data(node), false);
        let (out_c, out_c_bag) = self.count(&self.out_ctrl(node), true);
        let (in_c, in_c_bag) = self.count_exprs(&self.in_ctrl(node));
        let tie = self.node_mutants(node).len();

        let parent = self.parent(node);
        let (p_out_d, p_in_d, p_out_c, p_in_c, p_tie, p_bag, p_type) = match parent {
            Some(p) => {
                let mut bag = Bag::new();
                for &i in self.node_mutants(p) {
                    *bag.entry(self.mutants[i].type_string.clone()).or_default() += 1;
                }
                (
                    self.count(&self.out_data(p), false).0,
                    self.count(&self.in_data(p), false).0,
                    self.count(&self.out_ctrl(p), true).0,
                    self.count_exprs(&self.in_ctrl(p)).0,
                    self.node_mutants(p).len(),
                    bag,
                    self.node_type(p),
                )
            }
            None => (0, 0, 0, 0, 0, Bag::new(), "none".to_string()),
        };

        let children = self.children_of(node);
        let self_is_operator = match node {
            Node::Expr(id) => self.index.expr(id).is_some_and(|e| e.is_operator()),
            Node::Stmt(_) => false,
        };
        let has_ident = children.iter().any(|c| matches!(c.kind, ExprKind::Var(_)));
        let has_lit = children.iter().any(|c| matches!(c.kind, ExprKind::Lit(_)));
        let has_op = self_is_operator || children.iter().any(|c| c.is_operator());
        let operand_types: BTreeSet<&str> = children.iter().map(|c| c.ty.name()).collect();
        let operand_types = if operand_types.is_empty() {
            "none".to_string()
        } else {
            operand_types.into_iter().collect::<Vec<_>>().join(",")
        };
        let value_type = match node {
            Node::Expr(id) => self.index.expr(id).map_or(Type::Void, |e| e.ty),
            Node::Stmt(_) => Type::Void,
        };

        let numeric = [
            complexity,
            fc.depth(bi),
            block.preds.len(),
            block.succs.len(),
            usize::from(parent.is_some()),
            out_d,
            in_d,
            out_c,
            in_c,
            tie,
            p_out_d,
            p_in_d,
            p_out_c,
            p_in_c,
            p_tie,
        ]
        .map(|v| v as f64);

        RawFeatureRecord {
            mutant_id: m.id,
            program_id: m.program_id.clone(),
            numeric,
            boolean: [has_ident, has_lit, has_op],
            categorical: vec![
                single(p_type),
                single(m.type_string.clone()),
                single(block.kind.label()),
                p_bag,
                out_d_bag,
                in_d_bag,
                out_c_bag,
                in_c_bag,
                single(operand_types),
                single(value_type.name()),
            ],
        }
    }
}

/// Features of one mutant; `mutants` is the full list enumerated from the
/// program, since several features count mutants at related sites.
pub fn extract_raw_features(an: &Analysis, mutants: &[Mutant], mutant: &Mutant) -> RawFeatureRecord {
    FeatureContext::new(an, mutants).extract(mutant)
}

/// Features of every mutant in the list, sharing one context.
pub fn extract_all(an: &Analysis, mutants: &[Mutant]) -> Vec<RawFeatureRecord> {
    let ctx = FeatureContext::new(an, mutants);
    mutants.iter().map(|m| ctx.extract(m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::enumerate_mutants;

    fn features(src: &str) -> (Analysis, Vec<Mutant>, Vec<RawFeatureRecord>) {
        let an = Analysis::from_source(src).unwrap();
        let ms = enumerate_mutants("t", &an.program, &an.cfg);
        let rs = extract_all(&an, &ms);
        (an, ms, rs)
    }

    #[test]
    fn isolated_statement_has_no_structure() {
        let (_, ms, rs) = features("void f() { int x; x = 1; }");
        let i = ms.iter().position(|m| m.type_string == "STMT → DELSTMT").unwrap();
        let r = &rs[i];
        for name in ["CfgDepth", "CfgPredNum", "CfgSuccNum", "NumInCtrlDeps"] {
            assert_eq!(r.numeric(name), 0.0, "{name}");
        }
        assert_eq!(r.category("TypeStmtBB"), "Entry");
    }

    #[test]
    fn assignment_value_flows_to_later_reads() {
        let (_, ms, rs) = features("int main() { int a; int b; read a; b = a + 1; print b; return 0; }");
        let i = ms.iter().position(|m| m.type_string == "a + b → a - b").unwrap();
        // `print b` reads the stored value through the Var node `b`, which
        // carries 43 atom mutants.
        assert_eq!(rs[i].numeric("NumOutDataDeps"), 43.0);
        // The `a` operand was written by `read a` (TRAP, DEL).
        assert_eq!(rs[i].numeric("NumInDataDeps"), 2.0);
        assert_eq!(rs[i].category("TypeAstParent"), "assign");
        assert_eq!(rs[i].category("DataTypesOfOperands"), "int");
    }

    #[test]
    fn branch_body_is_controlled() {
        let (an, ms, rs) = features("int main() { int a; read a; if (a) { print 1; } return 0; }");
        let mut print = None;
        walk_stmts(&an.program.functions[0].body, &mut |s| {
            if matches!(s.kind, StmtKind::Print(_)) {
                print = Some(s.id);
            }
        });
        let i = ms
            .iter()
            .position(|m| m.stmt == print.unwrap() && m.type_string == "STMT → TRAPSTMT")
            .unwrap();
        // Controlled by the 43-mutant condition `a`.
        assert_eq!(rs[i].numeric("NumInCtrlDeps"), 43.0);
        assert_eq!(rs[i].category("TypeStmtBB"), "If-Then");
        assert_eq!(rs[i].numeric("CfgDepth"), 1.0);
    }
}
