//! Data dependence (reaching definitions over the CFG) and control
//! dependence (post-dominance with a virtual exit).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::cfg::{Cfg, FunctionCfg};

/// Abstract storage location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Loc {
    /// A scalar variable, including pointer variables themselves.
    Var(VarId),
    /// Contents of a local array.
    Array(VarId),
    /// Whatever pointer parameters point into.
    ParamMem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefSite {
    /// Node performing the write: a statement, a call, an inc/dec
    /// expression, or a parameter's declaration node.
    pub site: NodeId,
    /// Statement containing the write, absent for parameters.
    pub stmt: Option<NodeId>,
    pub loc: Loc,
    pub strong: bool,
    /// Expression whose value is stored, when there is one.
    pub value: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UseSite {
    pub site: NodeId,
    pub stmt: NodeId,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DataEdge {
    pub use_site: NodeId,
    pub def_site: NodeId,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ControlEdge {
    /// Dependent statement.
    pub stmt: NodeId,
    /// Branch statement whose outcome decides `stmt`.
    pub branch: NodeId,
    /// Condition (or scrutinee) expression of `branch`.
    pub branch_expr: NodeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepGraph {
    pub defs: Vec<DefSite>,
    pub uses: Vec<UseSite>,
    pub data: Vec<DataEdge>,
    pub control: Vec<ControlEdge>,
}

impl DepGraph {
    /// Definition sites whose values may reach `use_site`.
    pub fn defs_reaching(&self, use_site: NodeId) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self
            .data
            .iter()
            .filter(|e| e.use_site == use_site)
            .map(|e| e.def_site)
            .collect();
        set.into_iter().collect()
    }

    /// Use sites reached by a definition made at `def_site`.
    pub fn uses_reached(&self, def_site: NodeId) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self
            .data
            .iter()
            .filter(|e| e.def_site == def_site)
            .map(|e| e.use_site)
            .collect();
        set.into_iter().collect()
    }

    pub fn controlling(&self, stmt: NodeId) -> Vec<&ControlEdge> {
        self.control.iter().filter(|e| e.stmt == stmt).collect()
    }

    pub fn controlled_by(&self, branch: NodeId) -> Vec<&ControlEdge> {
        self.control.iter().filter(|e| e.branch == branch).collect()
    }
}

#[derive(Clone, Debug)]
enum Event {
    Use(UseSite),
    Def(DefSite),
}

/// Flow-insensitive points-to sets of pointer variables.
fn points_to(f: &Function) -> HashMap<VarId, BTreeSet<Loc>> {
    let mut pts: HashMap<VarId, BTreeSet<Loc>> = HashMap::new();
    for p in &f.params {
        if f.var(*p).ty == Type::IntPtr {
            pts.entry(*p).or_default().insert(Loc::ParamMem);
        }
    }
    let mut assigns: Vec<(VarId, &Expr)> = Vec::new();
    walk_stmts(&f.body, &mut |s| match &s.kind {
        StmtKind::Decl { var, init: Some(e) } if f.var(*var).ty == Type::IntPtr => assigns.push((*var, e)),
        StmtKind::Assign { target, value } if target.ty == Type::IntPtr => {
            if let ExprKind::Var(v) = target.kind {
                assigns.push((v, value));
            }
        }
        _ => {}
    });
    loop {
        let mut changed = false;
        for (v, e) in &assigns {
            let add = pointer_targets(f, e, &pts);
            let set = pts.entry(*v).or_default();
            for l in add {
                changed |= set.insert(l);
            }
        }
        if !changed {
            break;
        }
    }
    pts
}

/// Locations a pointer-valued expression may point into.
fn pointer_targets(f: &Function, e: &Expr, pts: &HashMap<VarId, BTreeSet<Loc>>) -> BTreeSet<Loc> {
    match &e.kind {
        ExprKind::Var(v) => {
            if f.var(*v).is_array() {
                BTreeSet::from([Loc::Array(*v)])
            } else {
                pts.get(v).cloned().unwrap_or_default()
            }
        }
        ExprKind::Binary(_, l, r) => {
            let mut s = BTreeSet::new();
            if l.ty == Type::IntPtr {
                s.extend(pointer_targets(f, l, pts));
            }
            if r.ty == Type::IntPtr {
                s.extend(pointer_targets(f, r, pts));
            }
            s
        }
        ExprKind::Unary(_, x) => pointer_targets(f, x, pts),
        ExprKind::Call { .. } => all_memory(f),
        _ => BTreeSet::new(),
    }
}

fn all_memory(f: &Function) -> BTreeSet<Loc> {
    let mut s: BTreeSet<Loc> = f
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_array())
        .map(|(i, _)| Loc::Array(VarId(i as u32)))
        .collect();
    s.insert(Loc::ParamMem);
    s
}

struct EventCollector<'a> {
    f: &'a Function,
    pts: &'a HashMap<VarId, BTreeSet<Loc>>,
    stmt: NodeId,
    out: Vec<Event>,
}

impl EventCollector<'_> {
    fn use_loc(&mut self, site: NodeId, loc: Loc) {
        self.out.push(Event::Use(UseSite {
            site,
            stmt: self.stmt,
            loc,
        }));
    }

    fn def_loc(&mut self, site: NodeId, loc: Loc, strong: bool, value: Option<NodeId>) {
        self.out.push(Event::Def(DefSite {
            site,
            stmt: Some(self.stmt),
            loc,
            strong,
            value,
        }));
    }

    /// Events for evaluating `e` as an rvalue.
    fn rvalue(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(_) | ExprKind::Trap => {}
            ExprKind::Var(v) => {
                if !self.f.var(*v).is_array() {
                    self.use_loc(e.id, Loc::Var(*v));
                }
            }
            ExprKind::Deref(addr) => {
                self.rvalue(addr);
                for l in pointer_targets(self.f, addr, self.pts) {
                    self.use_loc(e.id, l);
                }
            }
            ExprKind::Unary(op, x) if op.is_inc_dec() => {
                let locs = self.lvalue_address(x);
                for (l, _) in &locs {
                    self.use_loc(e.id, *l);
                }
                for (l, strong) in locs {
                    self.def_loc(e.id, l, strong, None);
                }
            }
            ExprKind::Unary(_, x) => self.rvalue(x),
            ExprKind::Binary(_, l, r) => {
                self.rvalue(l);
                self.rvalue(r);
            }
            ExprKind::Call { args, .. } => {
                let mut written = BTreeSet::new();
                for a in args {
                    self.rvalue(a);
                    if a.ty == Type::IntPtr {
                        written.extend(pointer_targets(self.f, a, self.pts));
                    }
                }
                for l in written {
                    self.def_loc(e.id, l, false, None);
                }
            }
        }
    }

    /// Evaluate the address part of an lvalue and return the written
    /// locations with their strength.
    fn lvalue_address(&mut self, e: &Expr) -> Vec<(Loc, bool)> {
        match &e.kind {
            ExprKind::Var(v) => vec![(Loc::Var(*v), true)],
            ExprKind::Deref(addr) => {
                self.rvalue(addr);
                pointer_targets(self.f, addr, self.pts)
                    .into_iter()
                    .map(|l| (l, false))
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Decl { var, init } => {
                if let Some(e) = init {
                    self.rvalue(e);
                }
                let loc = if self.f.var(*var).is_array() {
                    Loc::Array(*var)
                } else {
                    Loc::Var(*var)
                };
                self.def_loc(s.id, loc, true, init.as_ref().map(|e| e.id));
            }
            StmtKind::Assign { target, value } => {
                let locs = self.lvalue_address(target);
                self.rvalue(value);
                for (l, strong) in locs {
                    self.def_loc(s.id, l, strong, Some(value.id));
                }
            }
            StmtKind::Read(target) => {
                for (l, strong) in self.lvalue_address(target) {
                    self.def_loc(s.id, l, strong, None);
                }
            }
            _ => {
                for e in stmt_exprs(s) {
                    self.rvalue(e);
                }
            }
        }
    }
}

/// Read/write events of one statement in evaluation order. Branch
/// statements contribute only their header expression.
fn stmt_events(f: &Function, pts: &HashMap<VarId, BTreeSet<Loc>>, s: &Stmt) -> Vec<Event> {
    let mut c = EventCollector {
        f,
        pts,
        stmt: s.id,
        out: Vec::new(),
    };
    c.stmt(s);
    c.out
}

fn stmt_index(f: &Function) -> HashMap<NodeId, &Stmt> {
    let mut m = HashMap::new();
    walk_stmts(&f.body, &mut |s| {
        m.insert(s.id, s);
    });
    m
}

pub fn compute_data_deps(program: &Program, cfg: &Cfg) -> DepGraph {
    let mut g = DepGraph::default();
    for (f, fc) in program.functions.iter().zip(&cfg.functions) {
        function_data_deps(f, fc, &mut g);
    }
    g.data.sort();
    g.data.dedup();
    g
}

fn function_data_deps(f: &Function, fc: &FunctionCfg, g: &mut DepGraph) {
    let pts = points_to(f);
    let stmts = stmt_index(f);
    let block_events: Vec<Vec<Event>> = fc
        .blocks
        .iter()
        .map(|b| {
            b.stmts
                .iter()
                .flat_map(|id| stmt_events(f, &pts, stmts[id]))
                .collect()
        })
        .collect();

    // Number every definition, parameters first.
    let mut defs: Vec<DefSite> = Vec::new();
    for p in &f.params {
        let info = f.var(*p);
        defs.push(DefSite {
            site: info.decl,
            stmt: None,
            loc: Loc::Var(*p),
            strong: true,
            value: None,
        });
    }
    if f.params.iter().any(|p| f.var(*p).ty == Type::IntPtr) {
        defs.push(DefSite {
            site: f.id,
            stmt: None,
            loc: Loc::ParamMem,
            strong: true,
            value: None,
        });
    }
    let entry_defs: BTreeSet<usize> = (0..defs.len()).collect();
    let mut block_defs: Vec<Vec<usize>> = Vec::new();
    for evs in &block_events {
        let mut ids = Vec::new();
        for ev in evs {
            if let Event::Def(d) = ev {
                ids.push(defs.len());
                defs.push(d.clone());
            }
        }
        block_defs.push(ids);
    }
    let mut by_loc: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (i, d) in defs.iter().enumerate() {
        by_loc.entry(d.loc).or_default().push(i);
    }

    let transfer = |input: &BTreeSet<usize>, evs: &[Event], ids: &[usize]| -> BTreeSet<usize> {
        let mut cur = input.clone();
        let mut k = 0;
        for ev in evs {
            if let Event::Def(d) = ev {
                let id = ids[k];
                k += 1;
                if d.strong {
                    for other in &by_loc[&d.loc] {
                        cur.remove(other);
                    }
                }
                cur.insert(id);
            }
        }
        cur
    };

    let n = fc.blocks.len();
    let mut ins: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut outs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut changed = true;
    while changed {
        changed = false;
        for b in 0..n {
            let mut input = if b == fc.entry {
                entry_defs.clone()
            } else {
                BTreeSet::new()
            };
            for &p in &fc.blocks[b].preds {
                input.extend(outs[p].iter().copied());
            }
            let out = transfer(&input, &block_events[b], &block_defs[b]);
            if input != ins[b] || out != outs[b] {
                ins[b] = input;
                outs[b] = out;
                changed = true;
            }
        }
    }

    // Walk each block once more to attach uses to reaching defs.
    for b in 0..n {
        let mut cur = ins[b].clone();
        let mut k = 0;
        for ev in &block_events[b] {
            match ev {
                Event::Use(u) => {
                    for &d in &cur {
                        if defs[d].loc == u.loc {
                            g.data.push(DataEdge {
                                use_site: u.site,
                                def_site: defs[d].site,
                                loc: u.loc,
                            });
                        }
                    }
                    g.uses.push(u.clone());
                }
                Event::Def(d) => {
                    let id = block_defs[b][k];
                    k += 1;
                    if d.strong {
                        for other in &by_loc[&d.loc] {
                            cur.remove(other);
                        }
                    }
                    cur.insert(id);
                }
            }
        }
    }
    g.defs.extend(defs);
}

pub fn compute_control_deps(program: &Program, cfg: &Cfg) -> DepGraph {
    let mut g = DepGraph::default();
    for (f, fc) in program.functions.iter().zip(&cfg.functions) {
        let stmts = stmt_index(f);
        for (a, b) in block_control_deps(fc) {
            let Some(&branch) = fc.blocks[a].stmts.last() else {
                continue;
            };
            let branch_stmt = stmts[&branch];
            let Some(cond) = stmt_exprs(branch_stmt).first().map(|e| e.id) else {
                continue;
            };
            for &s in &fc.blocks[b].stmts {
                if s == branch {
                    continue;
                }
                g.control.push(ControlEdge {
                    stmt: s,
                    branch,
                    branch_expr: cond,
                });
            }
        }
    }
    g.control.sort();
    g.control.dedup();
    g
}

/// Pairs (controller block, dependent block), self-dependence excluded.
pub fn block_control_deps(fc: &FunctionCfg) -> BTreeSet<(usize, usize)> {
    let pdom = fc.post_dominators();
    let ipdom = fc.immediate_post_dominators();
    let mut out = BTreeSet::new();
    for a in 0..fc.blocks.len() {
        for &b in &fc.blocks[a].succs {
            if pdom[a].contains(&b) {
                continue;
            }
            // Every node from b up to (excluding) ipdom(a) depends on a.
            let stop = ipdom[a];
            let mut cur = Some(b);
            while let Some(c) = cur {
                if Some(c) == stop || c == fc.exit_node() {
                    break;
                }
                if c != a {
                    out.insert((a, c));
                }
                cur = ipdom[c];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_cfg, parse_program};

    fn analyse(src: &str) -> (Program, Cfg, DepGraph) {
        let p = parse_program(src).unwrap();
        let cfg = build_cfg(&p);
        let mut g = compute_data_deps(&p, &cfg);
        g.control = compute_control_deps(&p, &cfg).control;
        (p, cfg, g)
    }

    fn stmt_ids(p: &Program) -> Vec<NodeId> {
        let mut v = Vec::new();
        walk_stmts(&p.functions[0].body, &mut |s| v.push(s.id));
        v
    }

    #[test]
    fn copy_chain_has_two_edges() {
        let (p, _, g) = analyse("int main() { int x; int y; int z; x = 1; y = x; z = y; return 0; }");
        let s = stmt_ids(&p);
        assert_eq!(g.data.len(), 2);
        let defs: Vec<NodeId> = g.data.iter().map(|e| e.def_site).collect();
        assert!(defs.contains(&s[3]) && defs.contains(&s[4]));
    }

    #[test]
    fn rmw_depends_on_itself_across_iterations() {
        let (p, _, g) = analyse("int main() { int m; read m; while (m-- > 0) { print 1; } return 0; }");
        let f = &p.functions[0];
        let StmtKind::While { cond, .. } = &f.body.stmts[2].kind else { panic!() };
        let ExprKind::Binary(_, dec, _) = &cond.kind else { panic!() };
        let reaching = g.defs_reaching(dec.id);
        assert_eq!(reaching, vec![f.body.stmts[1].id, dec.id]);
    }

    #[test]
    fn weak_array_writes_do_not_kill() {
        let (p, _, g) = analyse("int main() { int a[4]; int *q; q = a; a[0] = 1; *q = 2; print a[1]; return 0; }");
        let f = &p.functions[0];
        let StmtKind::Print(e) = &f.body.stmts[5].kind else { panic!() };
        let reaching = g.defs_reaching(e.id);
        // Array declaration plus both writes.
        assert_eq!(reaching.len(), 3);
    }

    #[test]
    fn loop_body_is_control_dependent_on_condition() {
        let (p, _, g) = analyse("int main() { int m; read m; while (m > 0) { m = m - 1; print m; } print 0; return 0; }");
        let f = &p.functions[0];
        let StmtKind::While { body, .. } = &f.body.stmts[2].kind else { panic!() };
        for s in &body.stmts {
            assert_eq!(g.controlling(s.id).len(), 1);
        }
        assert!(g.controlling(f.body.stmts[3].id).is_empty());
        assert!(g.controlling(f.body.stmts[2].id).is_empty());
    }

    #[test]
    fn nested_if_depends_only_on_inner_condition() {
        let (p, _, g) = analyse("int main() { int m; read m; while (m > 0) { if (m > 3) { print m; } m = m - 1; } return 0; }");
        let f = &p.functions[0];
        let StmtKind::While { body, .. } = &f.body.stmts[2].kind else { panic!() };
        let StmtKind::If { then_branch, cond, .. } = &body.stmts[0].kind else { panic!() };
        let deps = g.controlling(then_branch.stmts[0].id);
        assert_eq!(deps.len(), 1);
        assert_eq!(deps[0].branch_expr, cond.id);
    }
}
