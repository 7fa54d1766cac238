//! Corpus layout, loading and lint.
//!
//! A corpus directory holds one sub-directory per problem:
//!
//! ```text
//! <problem>/correct.mc
//! <problem>/tests.txt
//! <problem>/faulty/<version>.mc
//! ```
//!
//! Every faulty version is one program; its id is `<problem>/<version>` and
//! its group is the problem.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{baseline, parse_tests, ExecConfig, TestCase};
use crate::frontend::{parse_program, pretty_print, Program};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub group: String,
    pub faulty_path: PathBuf,
    pub correct_path: PathBuf,
    pub tests_path: PathBuf,
    pub faulty_src: String,
    pub correct_src: String,
    pub tests: Vec<TestCase>,
}

impl CorpusEntry {
    pub fn faulty(&self) -> Result<Program> {
        parse_program(&self.faulty_src).map_err(|source| Error::Parse {
            path: self.faulty_path.clone(),
            source,
        })
    }

    pub fn correct(&self) -> Result<Program> {
        parse_program(&self.correct_src).map_err(|source| Error::Parse {
            path: self.correct_path.clone(),
            source,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn sorted_dir(path: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| Error::io(path, e)))
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// Entries sorted by id.
pub fn load_corpus(root: &Path) -> Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for dir in sorted_dir(root)? {
        if !dir.is_dir() {
            continue;
        }
        let group = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let correct_path = dir.join("correct.mc");
        let tests_path = dir.join("tests.txt");
        let correct_src = read(&correct_path)?;
        let tests = parse_tests(&read(&tests_path)?).map_err(|e| Error::Lint(format!("{}: {e}", tests_path.display())))?;
        let faulty_dir = dir.join("faulty");
        for f in sorted_dir(&faulty_dir)? {
            if f.extension().and_then(|e| e.to_str()) != Some("mc") {
                continue;
            }
            let version = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            entries.push(CorpusEntry {
                id: format!("{group}/{version}"),
                group: group.clone(),
                faulty_src: read(&f)?,
                faulty_path: f,
                correct_path: correct_path.clone(),
                tests_path: tests_path.clone(),
                correct_src: correct_src.clone(),
                tests: tests.clone(),
            });
        }
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LintEntry {
    pub id: String,
    pub tests: usize,
    pub revealing: usize,
    pub problems: Vec<String>,
}

impl LintEntry {
    pub fn revealed_fraction(&self) -> f64 {
        if self.tests == 0 {
            0.0
        } else {
            self.revealing as f64 / self.tests as f64
        }
    }
}

/// Checks each entry: both versions parse and differ, the fault is
/// revealed by at least one test and by less than `threshold` of them, and
/// test ids are unique.
pub fn lint_corpus(entries: &[CorpusEntry], threshold: f64, exec: &ExecConfig) -> Vec<LintEntry> {
    entries
        .iter()
        .map(|e| {
            let mut problems = Vec::new();
            let mut revealing = 0;
            match (e.faulty(), e.correct()) {
                (Ok(f), Ok(c)) => {
                    if pretty_print(&f) == pretty_print(&c) {
                        problems.push("faulty and correct versions are identical".to_string());
                    }
                    revealing = baseline(&f, &c, &e.tests, exec).fault_revealing.iter().filter(|&&r| r).count();
                    if e.tests.is_empty() {
                        problems.push("no tests".to_string());
                    } else if revealing == 0 {
                        problems.push("no test reveals the fault".to_string());
                    } else if revealing as f64 >= threshold * e.tests.len() as f64 {
                        problems.push(format!(
                            "fault revealed by {revealing} of {} tests, not below {threshold}",
                            e.tests.len()
                        ));
                    }
                }
                (f, c) => {
                    for err in [f.err(), c.err()].into_iter().flatten() {
                        problems.push(err.to_string());
                    }
                }
            }
            LintEntry {
                id: e.id.clone(),
                tests: e.tests.len(),
                revealing,
                problems,
            }
        })
        .collect()
}

/// Fails when the corpus is empty or any entry has a problem.
pub fn check_lint(report: &[LintEntry]) -> Result<()> {
    if report.is_empty() {
        return Err(Error::Lint("corpus is empty".into()));
    }
    let bad: Vec<String> = report
        .iter()
        .flat_map(|e| e.problems.iter().map(move |p| format!("{}: {p}", e.id)))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Lint(bad.join("\n")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_fails_lint() {
        let err = check_lint(&[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn lint_flags_easy_and_identical_faults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p");
        fs::create_dir_all(p.join("faulty")).unwrap();
        fs::write(p.join("correct.mc"), "int main() { int x; read x; print x; return 0; }").unwrap();
        fs::write(p.join("faulty/same.mc"), "int main() { int x; read x; print x; return 0; }").unwrap();
        fs::write(p.join("faulty/easy.mc"), "int main() { int x; read x; print x + 1; return 0; }").unwrap();
        fs::write(p.join("tests.txt"), "1\n2\n").unwrap();
        let entries = load_corpus(dir.path()).unwrap();
        assert_eq!(entries.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ["p/easy", "p/same"]);
        let report = lint_corpus(&entries, 0.25, &ExecConfig::default());
        assert_eq!(report[0].revealing, 2);
        assert_eq!(report[0].problems.len(), 1);
        assert_eq!(report[1].problems.len(), 2);
        assert!(check_lint(&report).is_err());
    }
}
