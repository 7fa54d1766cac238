//! Basic-block control-flow graphs, one per function.
//!
//! An `if` header is appended to the block that is current when the `if` is
//! reached. `while` and `switch` headers get a block of their own. The exit
//! node is virtual: every block without successors flows to it.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    Entry,
    Exit,
    Plain,
    IfThen,
    IfElse,
    WhileCondition,
    WhileBody,
    SwitchHead,
    CaseBody,
    Return,
}

impl BlockKind {
    pub const ALL: [BlockKind; 10] = [
        BlockKind::Entry,
        BlockKind::Exit,
        BlockKind::Plain,
        BlockKind::IfThen,
        BlockKind::IfElse,
        BlockKind::WhileCondition,
        BlockKind::WhileBody,
        BlockKind::SwitchHead,
        BlockKind::CaseBody,
        BlockKind::Return,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BlockKind::Entry => "Entry",
            BlockKind::Exit => "Exit",
            BlockKind::Plain => "Plain",
            BlockKind::IfThen => "If-Then",
            BlockKind::IfElse => "If-Else",
            BlockKind::WhileCondition => "While Condition",
            BlockKind::WhileBody => "While Body",
            BlockKind::SwitchHead => "Switch Head",
            BlockKind::CaseBody => "Case Body",
            BlockKind::Return => "Return",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicBlock {
    /// Index inside the function's block list.
    pub index: usize,
    /// Program-wide block number.
    pub id: usize,
    pub kind: BlockKind,
    pub stmts: Vec<NodeId>,
    pub succs: Vec<usize>,
    pub preds: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCfg {
    pub function: String,
    pub entry: usize,
    pub blocks: Vec<BasicBlock>,
    pub stmt_block: HashMap<NodeId, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cfg {
    pub functions: Vec<FunctionCfg>,
}

impl Cfg {
    pub fn function(&self, name: &str) -> Option<&FunctionCfg> {
        self.functions.iter().find(|f| f.function == name)
    }

    /// Function index and local block index holding statement `stmt`.
    pub fn locate(&self, stmt: NodeId) -> Option<(usize, usize)> {
        self.functions
            .iter()
            .enumerate()
            .find_map(|(fi, f)| f.stmt_block.get(&stmt).map(|b| (fi, *b)))
    }

    pub fn block_count(&self) -> usize {
        self.functions.iter().map(|f| f.blocks.len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.functions
            .iter()
            .flat_map(|f| &f.blocks)
            .map(|b| b.succs.len())
            .sum()
    }
}

impl FunctionCfg {
    pub fn block_of(&self, stmt: NodeId) -> Option<&BasicBlock> {
        self.stmt_block.get(&stmt).map(|b| &self.blocks[*b])
    }

    /// Edge distance from the entry block, 0 for unreachable blocks.
    pub fn depth(&self, block: usize) -> usize {
        let mut dist = vec![usize::MAX; self.blocks.len()];
        let mut queue = VecDeque::new();
        dist[self.entry] = 0;
        queue.push_back(self.entry);
        while let Some(b) = queue.pop_front() {
            for &s in &self.blocks[b].succs {
                if dist[s] == usize::MAX {
                    dist[s] = dist[b] + 1;
                    queue.push_back(s);
                }
            }
        }
        if dist[block] == usize::MAX {
            0
        } else {
            dist[block]
        }
    }

    /// Index of the virtual exit node in post-dominator computations.
    pub fn exit_node(&self) -> usize {
        self.blocks.len()
    }

    /// Successors with the virtual exit made explicit.
    pub fn succs_with_exit(&self, block: usize) -> Vec<usize> {
        let b = &self.blocks[block];
        if b.succs.is_empty() {
            vec![self.exit_node()]
        } else {
            b.succs.clone()
        }
    }

    /// Post-dominator sets, indexed by block, including the virtual exit at
    /// index `blocks.len()`.
    pub fn post_dominators(&self) -> Vec<BTreeSet<usize>> {
        let n = self.blocks.len() + 1;
        let exit = self.exit_node();
        let all: BTreeSet<usize> = (0..n).collect();
        let mut pdom = vec![all; n];
        pdom[exit] = BTreeSet::from([exit]);
        let mut changed = true;
        while changed {
            changed = false;
            for b in (0..self.blocks.len()).rev() {
                let mut it = self.succs_with_exit(b).into_iter();
                let first = it.next().expect("at least one successor");
                let mut set = pdom[first].clone();
                for s in it {
                    set = set.intersection(&pdom[s]).copied().collect();
                }
                set.insert(b);
                if set != pdom[b] {
                    pdom[b] = set;
                    changed = true;
                }
            }
        }
        pdom
    }

    /// Immediate post-dominator of each block (the exit has none).
    pub fn immediate_post_dominators(&self) -> Vec<Option<usize>> {
        let pdom = self.post_dominators();
        (0..pdom.len())
            .map(|b| {
                let strict: Vec<usize> = pdom[b].iter().copied().filter(|&d| d != b).collect();
                // The immediate one is post-dominated by every other strict one.
                strict
                    .iter()
                    .copied()
                    .find(|&c| strict.iter().all(|&d| pdom[c].contains(&d)))
            })
            .collect()
    }
}

pub fn build_cfg(program: &Program) -> Cfg {
    let mut functions = Vec::new();
    let mut offset = 0;
    for f in &program.functions {
        let cfg = Builder::build(f, offset);
        offset += cfg.blocks.len();
        functions.push(cfg);
    }
    Cfg { functions }
}

struct Builder {
    blocks: Vec<BasicBlock>,
    stmt_block: HashMap<NodeId, usize>,
    cur: Option<usize>,
    offset: usize,
}

impl Builder {
    fn build(f: &Function, offset: usize) -> FunctionCfg {
        let mut b = Builder {
            blocks: Vec::new(),
            stmt_block: HashMap::new(),
            cur: None,
            offset,
        };
        let entry = b.new_block(BlockKind::Entry);
        b.cur = Some(entry);
        b.block(&f.body);
        for i in 0..b.blocks.len() {
            let succs = b.blocks[i].succs.clone();
            for s in succs {
                b.blocks[s].preds.push(i);
            }
        }
        FunctionCfg {
            function: f.name.clone(),
            entry,
            blocks: b.blocks,
            stmt_block: b.stmt_block,
        }
    }

    fn new_block(&mut self, kind: BlockKind) -> usize {
        let index = self.blocks.len();
        self.blocks.push(BasicBlock {
            index,
            id: self.offset + index,
            kind,
            stmts: Vec::new(),
            succs: Vec::new(),
            preds: Vec::new(),
        });
        index
    }

    fn edge(&mut self, from: usize, to: usize) {
        if !self.blocks[from].succs.contains(&to) {
            self.blocks[from].succs.push(to);
        }
    }

    /// Current block, opening an unreachable one after a `return`.
    fn current(&mut self) -> usize {
        match self.cur {
            Some(c) => c,
            None => {
                let c = self.new_block(BlockKind::Plain);
                self.cur = Some(c);
                c
            }
        }
    }

    fn place(&mut self, block: usize, stmt: &Stmt) {
        self.blocks[block].stmts.push(stmt.id);
        self.stmt_block.insert(stmt.id, block);
    }

    /// A block reached from `from` (when present) that continues the flow.
    fn join(&mut self, from: &[usize]) {
        if from.is_empty() {
            self.cur = None;
            return;
        }
        let j = self.new_block(BlockKind::Plain);
        for &f in from {
            self.edge(f, j);
        }
        self.cur = Some(j);
    }

    fn block(&mut self, b: &Block) {
        for s in &b.stmts {
            self.stmt(s);
        }
    }

    /// Lay out `body` in a fresh block of `kind` entered from `from`.
    /// Returns the block where the body falls through, if any.
    fn branch_body(&mut self, from: usize, kind: BlockKind, body: &Block) -> Option<usize> {
        let start = self.new_block(kind);
        self.edge(from, start);
        self.cur = Some(start);
        self.block(body);
        self.cur
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                let head = self.current();
                self.place(head, s);
                let mut ends = Vec::new();
                ends.extend(self.branch_body(head, BlockKind::IfThen, then_branch));
                match else_branch {
                    Some(e) => ends.extend(self.branch_body(head, BlockKind::IfElse, e)),
                    None => ends.push(head),
                }
                self.join(&ends);
            }
            StmtKind::While { body, .. } => {
                let pred = self.cur;
                let cond = self.new_block(BlockKind::WhileCondition);
                if let Some(p) = pred {
                    self.edge(p, cond);
                }
                self.place(cond, s);
                if let Some(end) = self.branch_body(cond, BlockKind::WhileBody, body) {
                    self.edge(end, cond);
                }
                self.join(&[cond]);
            }
            StmtKind::Switch { cases, default, .. } => {
                let pred = self.cur;
                let head = self.new_block(BlockKind::SwitchHead);
                if let Some(p) = pred {
                    self.edge(p, head);
                }
                self.place(head, s);
                let mut ends = Vec::new();
                for c in cases {
                    ends.extend(self.branch_body(head, BlockKind::CaseBody, &c.body));
                }
                match default {
                    Some(d) => ends.extend(self.branch_body(head, BlockKind::CaseBody, d)),
                    None => ends.push(head),
                }
                self.join(&ends);
            }
            StmtKind::Block(b) => {
                let c = self.current();
                self.place(c, s);
                self.block(b);
            }
            StmtKind::Return(_) => {
                let c = self.current();
                self.place(c, s);
                if self.blocks[c].kind == BlockKind::Plain {
                    self.blocks[c].kind = BlockKind::Return;
                }
                self.cur = None;
            }
            _ => {
                let c = self.current();
                self.place(c, s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn cfg_of(src: &str) -> Cfg {
        build_cfg(&parse_program(src).unwrap())
    }

    #[test]
    fn straight_line_is_one_block() {
        let cfg = cfg_of("int main() { int x; x = 1; print x; return 0; }");
        let f = &cfg.functions[0];
        assert_eq!(f.blocks.len(), 1);
        assert!(f.blocks[0].preds.is_empty() && f.blocks[0].succs.is_empty());
        assert_eq!(f.blocks[0].kind, BlockKind::Entry);
    }

    #[test]
    fn if_else_is_a_diamond() {
        let cfg = cfg_of("int main() { int x; read x; if (x > 0) { x = 1; } else { x = 2; } print x; return 0; }");
        let f = &cfg.functions[0];
        assert_eq!(f.blocks.len(), 4);
        assert_eq!(f.blocks[0].succs, vec![1, 2]);
        assert_eq!(f.blocks[1].succs, vec![3]);
        assert_eq!(f.blocks[2].succs, vec![3]);
        assert_eq!(f.blocks[3].preds, vec![1, 2]);
        assert_eq!(f.blocks[1].kind, BlockKind::IfThen);
        assert_eq!(f.blocks[2].kind, BlockKind::IfElse);
        assert_eq!(f.blocks[3].kind, BlockKind::Return);
    }

    #[test]
    fn while_has_condition_block_and_back_edge() {
        let cfg = cfg_of("int main() { int m; read m; while (m-- > 0) { print m; } return 0; }");
        let f = &cfg.functions[0];
        let cond = &f.blocks[1];
        assert_eq!(cond.kind, BlockKind::WhileCondition);
        assert_eq!(cond.preds, vec![0, 2]);
        assert_eq!(cond.succs, vec![2, 3]);
        assert_eq!(f.depth(1), 1);
        assert_eq!(f.depth(3), 2);
    }

    #[test]
    fn code_after_return_lands_in_unreachable_block() {
        let cfg = cfg_of("int main() { return 0; print 1; }");
        let f = &cfg.functions[0];
        assert_eq!(f.blocks.len(), 2);
        assert!(f.blocks[1].preds.is_empty());
        assert_eq!(f.depth(1), 0);
    }

    #[test]
    fn post_dominators_of_diamond() {
        let cfg = cfg_of("int main() { int x; if (x) { x = 1; } else { x = 2; } return x; }");
        let f = &cfg.functions[0];
        let ipdom = f.immediate_post_dominators();
        assert_eq!(ipdom[0], Some(3));
        assert_eq!(ipdom[1], Some(3));
        assert_eq!(ipdom[3], Some(f.exit_node()));
    }
}
