//! Tree-walking interpreter with a step budget and statement coverage.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::frontend::ast::*;

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;
const MAX_CALL_DEPTH: usize = 200;

/// Observable result of a run. Abnormal terminations are sentinels that
/// differ from every output stream.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Output(Vec<i64>),
    Timeout,
    Trap,
    RuntimeError,
}

impl Outcome {
    pub fn is_normal(&self) -> bool {
        matches!(self, Outcome::Output(_))
    }
}

/// What a test sees of a run: how it ended and everything it printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observed {
    pub outcome: Outcome,
    pub printed: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    /// Values printed before termination, also for abnormal outcomes.
    pub printed: Vec<i64>,
    pub steps: u64,
    /// Statements executed at least once.
    pub coverage: BTreeSet<NodeId>,
    pub error: Option<String>,
}

impl RunResult {
    pub fn observed(&self) -> Observed {
        Observed {
            outcome: self.outcome.clone(),
            printed: self.printed.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    Int(i64),
    Ptr { region: usize, offset: i64 },
}

const NULL: Value = Value::Ptr {
    region: usize::MAX,
    offset: 0,
};

impl Value {
    fn int(self) -> i64 {
        match self {
            Value::Int(v) => v,
            Value::Ptr { .. } => unreachable!("typechecked program uses a pointer as int"),
        }
    }
}

enum Stop {
    Timeout,
    Trap,
    Error(String),
}

enum Flow {
    Normal,
    Return(Value),
}

type Exec<T> = Result<T, Stop>;

struct Machine<'a> {
    program: &'a Program,
    functions: HashMap<&'a str, usize>,
    input: &'a [i64],
    cursor: usize,
    printed: Vec<i64>,
    memory: Vec<Vec<i64>>,
    steps: u64,
    budget: u64,
    coverage: BTreeSet<NodeId>,
    depth: usize,
}

struct Frame<'a> {
    func: &'a Function,
    slots: Vec<Value>,
}

/// Run `main` on an input stream. Reading past the end of the input is a
/// runtime error.
pub fn run_program(program: &Program, input: &[i64], budget: u64) -> RunResult {
    let mut m = Machine {
        program,
        functions: program
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.as_str(), i))
            .collect(),
        input,
        cursor: 0,
        printed: Vec::new(),
        memory: Vec::new(),
        steps: 0,
        budget,
        coverage: BTreeSet::new(),
        depth: 0,
    };
    let result = match m.functions.get("main") {
        Some(&i) => m.call(i, Vec::new()).map(|_| ()),
        None => Err(Stop::Error("no main function".into())),
    };
    let (outcome, error) = match result {
        Ok(()) => (Outcome::Output(m.printed.clone()), None),
        Err(Stop::Timeout) => (Outcome::Timeout, None),
        Err(Stop::Trap) => (Outcome::Trap, None),
        Err(Stop::Error(e)) => (Outcome::RuntimeError, Some(e)),
    };
    RunResult {
        outcome,
        printed: m.printed,
        steps: m.steps,
        coverage: m.coverage,
        error,
    }
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Exec<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Stop::Timeout)
        } else {
            Ok(())
        }
    }

    fn call(&mut self, fi: usize, args: Vec<Value>) -> Exec<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(Stop::Error("call depth exceeded".into()));
        }
        let func = &self.program.functions[fi];
        let mut frame = Frame {
            func,
            slots: func
                .vars
                .iter()
                .map(|v| if v.ty == Type::IntPtr { NULL } else { Value::Int(0) })
                .collect(),
        };
        for (p, a) in func.params.iter().zip(args) {
            frame.slots[p.0 as usize] = a;
        }
        self.depth += 1;
        let flow = self.block(&mut frame, &func.body);
        self.depth -= 1;
        Ok(match flow? {
            Flow::Return(v) => v,
            Flow::Normal => Value::Int(0),
        })
    }

    fn block(&mut self, fr: &mut Frame<'a>, b: &'a Block) -> Exec<Flow> {
        for s in &b.stmts {
            if let Flow::Return(v) = self.stmt(fr, s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, fr: &mut Frame<'a>, s: &'a Stmt) -> Exec<Flow> {
        self.tick()?;
        self.coverage.insert(s.id);
        match &s.kind {
            StmtKind::Decl { var, init } => {
                let info = fr.func.var(*var);
                let v = if let Some(n) = info.array_len {
                    self.memory.push(vec![0; n as usize]);
                    Value::Ptr {
                        region: self.memory.len() - 1,
                        offset: 0,
                    }
                } else if let Some(e) = init {
                    self.eval(fr, e)?
                } else if info.ty == Type::IntPtr {
                    NULL
                } else {
                    Value::Int(0)
                };
                fr.slots[var.0 as usize] = v;
            }
            StmtKind::Assign { target, value } => {
                let v = self.eval(fr, value)?;
                self.store(fr, target, v)?;
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval(fr, cond)?.int() != 0 {
                    return self.block(fr, then_branch);
                } else if let Some(e) = else_branch {
                    return self.block(fr, e);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.tick()?;
                if self.eval(fr, cond)?.int() == 0 {
                    break;
                }
                if let Flow::Return(v) = self.block(fr, body)? {
                    return Ok(Flow::Return(v));
                }
            },
            StmtKind::Switch {
                scrutinee,
                cases,
                default,
            } => {
                let v = self.eval(fr, scrutinee)?.int();
                if let Some(c) = cases.iter().find(|c| c.value == v) {
                    return self.block(fr, &c.body);
                } else if let Some(d) = default {
                    return self.block(fr, d);
                }
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(fr, e)?,
                    None => Value::Int(0),
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Read(target) => {
                let v = *self
                    .input
                    .get(self.cursor)
                    .ok_or_else(|| Stop::Error("input exhausted".into()))?;
                self.cursor += 1;
                self.store(fr, target, Value::Int(v))?;
            }
            StmtKind::Print(e) => {
                let v = self.eval(fr, e)?.int();
                self.printed.push(v);
            }
            StmtKind::Expr(e) => {
                self.eval(fr, e)?;
            }
            StmtKind::Block(b) => return self.block(fr, b),
            StmtKind::Empty => {}
            StmtKind::Trap => return Err(Stop::Trap),
        }
        Ok(Flow::Normal)
    }

    fn cell(&mut self, p: Value) -> Exec<&mut i64> {
        match p {
            Value::Ptr { region, offset } => self
                .memory
                .get_mut(region)
                .and_then(|r| usize::try_from(offset).ok().and_then(|o| r.get_mut(o)))
                .ok_or_else(|| Stop::Error("out-of-bounds access".into())),
            Value::Int(_) => unreachable!("typechecked program dereferences an int"),
        }
    }

    fn store(&mut self, fr: &mut Frame<'a>, target: &'a Expr, v: Value) -> Exec<()> {
        match &target.kind {
            ExprKind::Var(id) => fr.slots[id.0 as usize] = v,
            ExprKind::Deref(p) => {
                let p = self.eval(fr, p)?;
                *self.cell(p)? = v.int();
            }
            _ => unreachable!("typechecked assignment target"),
        }
        Ok(())
    }

    fn eval(&mut self, fr: &mut Frame<'a>, e: &'a Expr) -> Exec<Value> {
        self.tick()?;
        Ok(match &e.kind {
            ExprKind::Lit(v) => Value::Int(*v),
            ExprKind::Var(id) => fr.slots[id.0 as usize],
            ExprKind::Trap => return Err(Stop::Trap),
            ExprKind::Deref(p) => {
                let p = self.eval(fr, p)?;
                Value::Int(*self.cell(p)?)
            }
            ExprKind::Unary(op, x) if op.is_inc_dec() => {
                let old = self.eval(fr, x)?;
                let delta = if matches!(op, UnOp::PreInc | UnOp::PostInc) { 1 } else { -1 };
                let new = match old {
                    Value::Int(v) => Value::Int(v.wrapping_add(delta)),
                    Value::Ptr { region, offset } => Value::Ptr {
                        region,
                        offset: offset.wrapping_add(delta),
                    },
                };
                self.store(fr, x, new)?;
                if matches!(op, UnOp::PreInc | UnOp::PreDec) {
                    new
                } else {
                    old
                }
            }
            ExprKind::Unary(op, x) => {
                let v = self.eval(fr, x)?.int();
                Value::Int(op.apply(v).expect("non-mutating unary operator"))
            }
            ExprKind::Binary(BinOp::And, l, r) => {
                let v = self.eval(fr, l)?.int() != 0 && self.eval(fr, r)?.int() != 0;
                Value::Int(v as i64)
            }
            ExprKind::Binary(BinOp::Or, l, r) => {
                let v = self.eval(fr, l)?.int() != 0 || self.eval(fr, r)?.int() != 0;
                Value::Int(v as i64)
            }
            ExprKind::Binary(op, l, r) => {
                let a = self.eval(fr, l)?;
                let b = self.eval(fr, r)?;
                binary(*op, a, b)?
            }
            ExprKind::Call { callee, args } => {
                let fi = *self
                    .functions
                    .get(callee.as_str())
                    .ok_or_else(|| Stop::Error(format!("unknown function {callee}")))?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(fr, a)?);
                }
                self.call(fi, vals)?
            }
        })
    }
}

fn binary(op: BinOp, a: Value, b: Value) -> Exec<Value> {
    use Value::*;
    Ok(match (a, b) {
        (Int(x), Int(y)) => Int(op.apply(x, y).ok_or_else(|| Stop::Error("division by zero".into()))?),
        (Ptr { region, offset }, Int(i)) | (Int(i), Ptr { region, offset }) if op == BinOp::Add => Ptr {
            region,
            offset: offset.wrapping_add(i),
        },
        (Ptr { region, offset }, Int(i)) if op == BinOp::Sub => Ptr {
            region,
            offset: offset.wrapping_sub(i),
        },
        (Ptr { region: r1, offset: o1 }, Ptr { region: r2, offset: o2 }) => {
            let (x, y) = ((r1, o1), (r2, o2));
            let v = match op {
                BinOp::Lt => x < y,
                BinOp::Le => x <= y,
                BinOp::Gt => x > y,
                BinOp::Ge => x >= y,
                BinOp::Eq => x == y,
                BinOp::Ne => x != y,
                _ => unreachable!("typechecked pointer operator"),
            };
            Int(v as i64)
        }
        _ => unreachable!("typechecked operand types"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn run(src: &str, input: &[i64]) -> RunResult {
        run_program(&parse_program(src).unwrap(), input, 10_000)
    }

    #[test]
    fn prints_in_order() {
        let r = run("int main() { int a; int b; read a; read b; print a + b; print a * b; return 0; }", &[3, 4]);
        assert_eq!(r.outcome, Outcome::Output(vec![7, 12]));
    }

    #[test]
    fn infinite_loop_times_out() {
        assert_eq!(run("int main() { while (1) {} return 0; }", &[]).outcome, Outcome::Timeout);
    }

    #[test]
    fn trap_and_runtime_errors_are_distinct() {
        assert_eq!(run("int main() { print 1; trap; return 0; }", &[]).outcome, Outcome::Trap);
        let r = run("int main() { int a; read a; print 1 / a; return 0; }", &[0]);
        assert_eq!(r.outcome, Outcome::RuntimeError);
        let r = run("int main() { int a[2]; print a[2]; return 0; }", &[]);
        assert_eq!(r.error.as_deref(), Some("out-of-bounds access"));
        assert_eq!(run("int main() { int a; read a; return 0; }", &[]).outcome, Outcome::RuntimeError);
    }

    #[test]
    fn pointers_and_calls() {
        let src = "int sum(int *p, int n) { int s; while (n > 0) { s = s + *p; p++; n--; } return s; }
                   int main() { int a[3]; a[0] = 1; a[1] = 2; a[2] = 4; print sum(a, 3); print sum(a + 1, 2); return 0; }";
        assert_eq!(run(src, &[]).outcome, Outcome::Output(vec![7, 6]));
    }

    #[test]
    fn short_circuit_skips_division() {
        let r = run("int main() { int z; print z != 0 && 1 / z; print z == 0 || 1 / z; return 0; }", &[]);
        assert_eq!(r.outcome, Outcome::Output(vec![0, 1]));
    }

    #[test]
    fn switch_without_fallthrough() {
        let src = "int main() { int x; read x; switch (x) { case 1: print 10; case 2: print 20; default: print 0; } return 0; }";
        assert_eq!(run(src, &[2]).outcome, Outcome::Output(vec![20]));
        assert_eq!(run(src, &[7]).outcome, Outcome::Output(vec![0]));
    }

    #[test]
    fn coverage_records_executed_statements() {
        let p = parse_program("int main() { int x; read x; if (x) { print 1; } else { print 2; } return 0; }").unwrap();
        let a = run_program(&p, &[1], 1000);
        let b = run_program(&p, &[0], 1000);
        assert_eq!(a.coverage.len(), b.coverage.len());
        assert_ne!(a.coverage, b.coverage);
        assert_eq!(a, run_program(&p, &[1], 1000));
    }

    #[test]
    fn wrapping_and_masked_shift() {
        let r = run("int main() { int x; x = 9223372036854775807; print x + 1; print 1 << 65; return 0; }", &[]);
        assert_eq!(r.outcome, Outcome::Output(vec![i64::MIN, 2]));
    }
}
