//! Frontend properties on the bundled corpus and on generated programs.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use mutsel::corpus::load_corpus;
use mutsel::frontend::cfg::FunctionCfg;
use mutsel::frontend::deps::{block_control_deps, Loc};
use mutsel::frontend::pretty::isomorphic;
use mutsel::frontend::{parse_program, pretty_print, Analysis, NodeId};
use proptest::prelude::*;

fn corpus_sources() -> Vec<(String, String)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus");
    let mut out = Vec::new();
    for e in load_corpus(&root).unwrap() {
        out.push((e.id.clone(), e.faulty_src.clone()));
        if !out.iter().any(|(id, _)| id == &format!("{}/correct", e.group)) {
            out.push((format!("{}/correct", e.group), e.correct_src.clone()));
        }
    }
    out
}

/// `y` post-dominates `z`: every path from `z` to the exit meets `y`.
fn post_dominates(fc: &FunctionCfg, y: usize, z: usize) -> bool {
    if y == z {
        return true;
    }
    let exit = fc.exit_node();
    let mut seen = BTreeSet::from([z]);
    let mut stack = vec![z];
    while let Some(b) = stack.pop() {
        if b == exit {
            return false;
        }
        for s in fc.succs_with_exit(b) {
            if s != y && seen.insert(s) {
                stack.push(s);
            }
        }
    }
    true
}

/// `d` is control dependent on `a` when some successor of `a` is
/// post-dominated by `d` while `a` is not strictly post-dominated by `d`.
fn brute_control_deps(fc: &FunctionCfg) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for a in 0..fc.blocks.len() {
        for d in 0..fc.blocks.len() {
            if a == d {
                continue;
            }
            let decides = fc.blocks[a].succs.iter().any(|&s| post_dominates(fc, d, s));
            if decides && !post_dominates(fc, d, a) {
                out.insert((a, d));
            }
        }
    }
    out
}

#[test]
fn control_dependence_matches_path_definition() {
    for (id, src) in corpus_sources() {
        let an = Analysis::from_source(&src).unwrap();
        for fc in &an.cfg.functions {
            assert_eq!(block_control_deps(fc), brute_control_deps(fc), "{id}: {}", fc.function);
        }
        for e in &an.deps.control {
            let (f, d) = an.cfg.locate(e.stmt).unwrap();
            let (g, a) = an.cfg.locate(e.branch).unwrap();
            assert_eq!(f, g, "{id}");
            let fc = &an.cfg.functions[f];
            assert!(
                a == d || brute_control_deps(fc).contains(&(a, d)),
                "{id}: unjustified control edge {e:?}"
            );
        }
    }
}

#[test]
fn data_edges_pair_defs_and_uses_of_one_location() {
    for (id, src) in corpus_sources() {
        let an = Analysis::from_source(&src).unwrap();
        let g = &an.deps;
        for e in &g.data {
            assert!(
                g.defs.iter().any(|d| d.site == e.def_site && d.loc == e.loc),
                "{id}: edge {e:?} has no matching def"
            );
            assert!(
                g.uses.iter().any(|u| u.site == e.use_site && u.loc == e.loc),
                "{id}: edge {e:?} has no matching use"
            );
        }
    }
}

#[test]
fn cfg_is_invariant_under_layout_changes() {
    for (id, src) in corpus_sources() {
        let spaced: String = src
            .lines()
            .map(|l| format!("   {}   // note\n\n", l.replace(';', " ;").replace('(', " ( ")))
            .collect();
        let a = Analysis::from_source(&src).unwrap();
        let b = Analysis::from_source(&spaced).unwrap();
        for (fa, fb) in a.cfg.functions.iter().zip(&b.cfg.functions) {
            assert_eq!(fa.blocks.len(), fb.blocks.len(), "{id}");
            let edges = |fc: &FunctionCfg| -> Vec<(usize, Vec<usize>, String)> {
                fc.blocks.iter().map(|b| (b.index, b.succs.clone(), b.kind.label().to_string())).collect()
            };
            assert_eq!(edges(fa), edges(fb), "{id}");
        }
        assert_eq!(a.deps.data.len(), b.deps.data.len(), "{id}");
        assert!(isomorphic(&a.program, &b.program), "{id}");
    }
}

#[test]
fn pretty_print_round_trips() {
    for (id, src) in corpus_sources() {
        let p = parse_program(&src).unwrap();
        let q = parse_program(&pretty_print(&p)).unwrap();
        assert!(isomorphic(&p, &q), "{id}");
        assert_eq!(pretty_print(&p), pretty_print(&parse_program(&src).unwrap()));
    }
}

/// Straight-line program of assignments over `n` variables; each statement
/// is `(target, operands)`.
fn straight_line() -> impl Strategy<Value = (usize, Vec<(usize, Vec<usize>)>)> {
    (1usize..5).prop_flat_map(|n| {
        let stmt = (0..n, proptest::collection::vec(0..n, 0..3));
        (Just(n), proptest::collection::vec(stmt, 1..30))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On straight-line code a use depends exactly on the latest earlier
    /// write of its variable.
    #[test]
    fn straight_line_reaching_definitions((n, stmts) in straight_line()) {
        let mut src = String::from("int main() {\n");
        for v in 0..n {
            src += &format!("    int v{v};\n    read v{v};\n");
        }
        for (t, ops) in &stmts {
            let rhs = if ops.is_empty() {
                "1".to_string()
            } else {
                ops.iter().map(|o| format!("v{o}")).collect::<Vec<_>>().join(" + ")
            };
            src += &format!("    v{t} = {rhs};\n");
        }
        src += "    return 0;\n}\n";
        let an = Analysis::from_source(&src).unwrap();
        let f = &an.program.functions[0];
        let body: Vec<NodeId> = f.body.stmts.iter().map(|s| s.id).collect();
        // Statement ids: a declaration and a read per variable, then the assignments.
        let read_of: Vec<NodeId> = (0..n).map(|v| body[2 * v + 1]).collect();
        let assign: Vec<NodeId> = body[2 * n..2 * n + stmts.len()].to_vec();
        let var_of: HashMap<u32, usize> = f
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (i as u32, v.name[1..].parse().unwrap()))
            .collect();
        let mut last = read_of.clone();
        let mut expected = BTreeSet::new();
        for (i, (t, ops)) in stmts.iter().enumerate() {
            for &o in ops {
                expected.insert((assign[i], o, last[o]));
            }
            last[*t] = assign[i];
        }
        let got: BTreeSet<(NodeId, usize, NodeId)> = an
            .deps
            .data
            .iter()
            .filter_map(|e| {
                let Loc::Var(v) = e.loc else { return None };
                let u = an.deps.uses.iter().find(|u| u.site == e.use_site)?;
                Some((u.stmt, var_of[&v.0], e.def_site))
            })
            .filter(|(s, _, _)| assign.contains(s))
            .collect();
        prop_assert_eq!(got, expected);
    }
}
