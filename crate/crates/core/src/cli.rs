//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{check_lint, lint_corpus, load_corpus};
use crate::error::{Error, Result};
use crate::eval::report::{apfd_records, ApfdLine};
use crate::eval::{BudgetPoint, EvalReport};
use crate::exec::{build_kill_matrix, parse_tests, KillMatrix};
use crate::features::{fit_encoder, write_matrix, Encoding, FeatureContext};
use crate::frontend::dump::analysis_json;
use crate::frontend::{build_cfg, parse_program, pretty_print, Analysis, Program};
use crate::gbdt::BoostedModel;
use crate::mutation::{enumerate_mutants, manifest::write_manifest, Mutant};
use crate::pipeline::{
    cross_validate, evaluate_program, prepare_program, rank_program, run_pipeline, train_and_predict,
    ExperimentConfig, Predictions, ProgramData, Store,
};
use crate::strategies::{truncate_top, Budget, Ranking, Strategy};
use crate::tce::{dedup_mutants, write_report};

#[derive(Parser, Debug)]
#[command(name = "mutsel", version, about = "Fault-revealing mutant selection and prioritization")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub repetitions: Option<usize>,
    #[arg(long, global = true)]
    pub trees: Option<usize>,
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Comma-separated percent budgets.
    #[arg(long, global = true, value_delimiter = ',')]
    pub budgets: Option<Vec<f64>>,
    /// Comma-separated strategy names.
    #[arg(long, global = true, value_delimiter = ',')]
    pub strategies: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a program and dump its AST, CFG and dependences as JSON.
    Parse {
        file: PathBuf,
        /// Print the normalised source instead.
        #[arg(long)]
        pretty: bool,
    },
    /// Enumerate mutants into a manifest CSV.
    Mutate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate mutants and report trivially equivalent and duplicate ones.
    Tce {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encoded feature matrix of the live mutants.
    Features {
        file: PathBuf,
        /// Encoding fitted at training time; fitted on this program otherwise.
        #[arg(long)]
        encoding: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute the live mutants and write the kill matrix with sidecars.
    Exec {
        #[arg(long)]
        faulty: PathBuf,
        #[arg(long)]
        correct: PathBuf,
        #[arg(long)]
        tests: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train both classifiers on the whole corpus.
    Train {
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the live mutants of a program with trained models.
    Rank {
        file: PathBuf,
        /// Directory written by `train`.
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        strategy: String,
        /// Ranking seed index.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top of a ranking under a budget such as `10%` or `25`.
    Select {
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long)]
        budget: String,
    },
    /// Evaluate rankings against an existing kill matrix.
    Evaluate {
        #[arg(long)]
        matrix: PathBuf,
        /// Test sidecar of the matrix.
        #[arg(long)]
        tests: PathBuf,
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long = "ranking", required = true)]
        rankings: Vec<PathBuf>,
        #[arg(long, default_value = "external")]
        program: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grouped cross-validation over the corpus.
    Crossval {
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two strategies from a written report.
    Stats {
        /// Report directory holding `apfd.csv` and `fault_revelation.csv`.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Check the corpus.
    LintCorpus {
        dir: Option<PathBuf>,
    },
    /// Full pipeline.
    Run {
        #[arg(long)]
        out: PathBuf,
    },
}

impl GlobalArgs {
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.corpus {
            cfg.corpus = v.clone();
        }
        if let Some(v) = self.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = self.trees {
            cfg.gbdt.trees = v;
        }
        if let Some(v) = self.folds {
            cfg.k = v;
        }
        if let Some(v) = &self.budgets {
            cfg.budgets = v.clone();
        }
        if let Some(v) = &self.strategies {
            cfg.strategies = v.iter().map(|s| strategy(s)).collect::<Result<_>>()?;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn strategy(name: &str) -> Result<Strategy> {
    Strategy::from_name(name).ok_or_else(|| Error::Usage(format!("unknown strategy `{name}`")))
}

/// `10%` is a percentage of the ranking, `25` a count.
pub fn parse_budget(s: &str) -> Result<Budget> {
    let bad = || Error::Usage(format!("bad budget `{s}`"));
    match s.strip_suffix('%') {
        Some(p) => p.trim().parse().map(Budget::Percent).map_err(|_| bad()),
        None => s.trim().parse().map(Budget::Count).map_err(|_| bad()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn load_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn program_id(path: &Path) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

/// Enumerated mutants with their TCE status.
fn mutants_of(path: &Path, program: &Program) -> Vec<Mutant> {
    let mut m = enumerate_mutants(&program_id(path), program, &build_cfg(program));
    dedup_mutants(program, &mut m);
    m
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::stage("store", e))?;
    Ok(buf)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => crate::pipeline::store::write_atomic(p, bytes),
        None => out.write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn prepare_all(cfg: &ExperimentConfig, store: &Store) -> Result<Vec<ProgramData>> {
    let entries = load_corpus(&cfg.corpus)?;
    check_lint(&lint_corpus(&entries, cfg.threshold, &cfg.exec))?;
    let mut runs = Vec::new();
    entries.iter().map(|e| prepare_program(e, cfg, store, &mut runs)).collect()
}

fn json_pretty<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// Run one parsed command, writing results to `out` when no file is given.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Parse { file, pretty } => {
            let program = load_program(&file)?;
            if pretty {
                emit(out, None, pretty_print(&program).as_bytes())
            } else {
                emit(out, None, &json_pretty(&analysis_json(&Analysis::new(program))))
            }
        }
        Command::Mutate { file, out: path } => {
            let program = load_program(&file)?;
            let m = enumerate_mutants(&program_id(&file), &program, &build_cfg(&program));
            emit(out, path.as_deref(), &csv_bytes(|b| write_manifest(b, &m))?)
        }
        Command::Tce { file, out: path } => {
            let program = load_program(&file)?;
            let m = mutants_of(&file, &program);
            emit(out, path.as_deref(), &csv_bytes(|b| write_report(b, &m))?)
        }
        Command::Features {
            file,
            encoding,
            out: path,
        } => {
            let program = load_program(&file)?;
            let m = mutants_of(&file, &program);
            let an = Analysis::new(program);
            let ctx = FeatureContext::new(&an, &m);
            let records: Vec<_> = m.iter().filter(|m| m.tce.is_live()).map(|m| ctx.extract(m)).collect();
            if records.is_empty() {
                return Err(Error::stage("features", "program has no live mutants"));
            }
            let enc: Encoding = match encoding {
                Some(p) => serde_json::from_str(&read(&p)?).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
                None => fit_encoder(&records),
            };
            emit(out, path.as_deref(), &csv_bytes(|b| write_matrix(b, &enc, &records))?)
        }
        Command::Exec {
            faulty,
            correct,
            tests,
            out: dir,
        } => {
            let cfg = g.experiment()?;
            let f = load_program(&faulty)?;
            let c = load_program(&correct)?;
            let t = parse_tests(&read(&tests)?)?;
            let live: Vec<Mutant> = mutants_of(&faulty, &f).into_iter().filter(|m| m.tce.is_live()).collect();
            let km = build_kill_matrix(&f, &c, &live, &t, &cfg.exec);
            let mut store = Store::new(&dir);
            store.write("matrix.csv", &csv_bytes(|b| km.export(b))?)?;
            store.write("matrix_tests.csv", &csv_bytes(|b| km.export_tests(b))?)?;
            store.write("matrix_costs.csv", &csv_bytes(|b| km.export_costs(b))?)?;
            writeln!(out, "{} mutants x {} tests", km.n_mutants(), km.n_tests()).map_err(|e| Error::io("<stdout>", e))
        }
        Command::Train { out: dir } => {
            let cfg = g.experiment()?;
            let mut store = Store::new(&dir);
            let programs = prepare_all(&cfg, &store)?;
            let all: Vec<&ProgramData> = programs.iter().collect();
            let (m, _) = train_and_predict(&all, &[], &cfg, 0)?;
            for w in &m.warnings {
                log::warn!("{w}");
            }
            store.write("encoding.json", &json_pretty(&m.encoding))?;
            store.write("killable.json", m.killable.to_json().as_bytes())?;
            store.write("fault-revealing.json", m.fault_revealing.to_json().as_bytes())?;
            store.write_manifest()
        }
        Command::Rank {
            file,
            models,
            strategy: name,
            index,
            out: path,
        } => {
            let cfg = g.experiment()?;
            let st = strategy(&name)?;
            let program = load_program(&file)?;
            let m = mutants_of(&file, &program);
            let an = Analysis::new(program);
            let ctx = FeatureContext::new(&an, &m);
            let live: Vec<&Mutant> = m.iter().filter(|m| m.tce.is_live()).collect();
            let enc_path = models.join("encoding.json");
            let enc: Encoding = serde_json::from_str(&read(&enc_path)?)
                .map_err(|e| Error::Config(format!("{}: {e}", enc_path.display())))?;
            let kill_model = BoostedModel::from_json(&read(&models.join("killable.json"))?)?;
            let fr_model = BoostedModel::from_json(&read(&models.join("fault-revealing.json"))?)?;
            let hash = enc.schema_hash();
            let mut pred = Predictions {
                ids: live.iter().map(|m| m.id).collect(),
                kill: Vec::new(),
                fr: Vec::new(),
            };
            for mu in &live {
                let x = enc.encode(&ctx.extract(mu));
                pred.kill.push(kill_model.predict_checked(&hash, &x)?);
                pred.fr.push(fr_model.predict_checked(&hash, &x)?);
            }
            let r = rank_program(&m, &pred, None, &[st], cfg.seed, index, 0)?;
            emit(out, path.as_deref(), &csv_bytes(|b| r[&st].write_csv(b))?)
        }
        Command::Select { ranking, budget } => {
            let r = Ranking::read_csv(open(&ranking)?)?;
            let picked = truncate_top(&r, parse_budget(&budget)?).map_err(|e| Error::Usage(e.to_string()))?;
            let text: String = picked.iter().map(|id| format!("{id}\n")).collect();
            emit(out, None, text.as_bytes())
        }
        Command::Evaluate {
            matrix,
            tests,
            costs,
            rankings,
            program,
            out: dir,
        } => {
            let cfg = g.experiment()?;
            let km = KillMatrix::import(open(&matrix)?, open(&tests)?, costs.map(|c| open(&c)).transpose()?)?;
            let mut by_strategy = std::collections::BTreeMap::new();
            for p in &rankings {
                let r = Ranking::read_csv(open(p)?)?;
                by_strategy.insert(strategy(&r.strategy)?, r);
            }
            let mut report = EvalReport::default();
            evaluate_program(&mut report, &program, &km, 0, &by_strategy, None, &cfg)?;
            write_report_dir(&dir, &report)
        }
        Command::Crossval { out: dir } => {
            let cfg = g.experiment()?;
            let mut store = Store::new(&dir);
            let programs = prepare_all(&cfg, &store)?;
            let cv = cross_validate(&programs, &cfg)?;
            store.write("folds.json", &json_pretty(&cv.plan))?;
            for (name, text) in cv.report.csv_files().map_err(|e| Error::stage("report", e))? {
                store.write(&format!("report/{name}"), text.as_bytes())?;
            }
            store.write_manifest()
        }
        Command::Stats { report, a, b } => {
            let cfg = g.experiment()?;
            let lines: Vec<ApfdLine> = read_rows(&report.join("apfd.csv"))?;
            let points: Vec<BudgetPoint> = read_rows(&report.join("fault_revelation.csv"))?;
            let mut r = EvalReport {
                apfd: apfd_records(&lines),
                points,
                ..Default::default()
            };
            r.compare(&a, &b, &cfg.budgets).map_err(|e| Error::stage("stats", e))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &r.stats {
                w.serialize(row).map_err(|e| Error::stage("stats", e))?;
            }
            emit(out, None, &w.into_inner().map_err(|e| Error::stage("stats", e))?)
        }
        Command::LintCorpus { dir } => {
            let cfg = g.experiment()?;
            let root = dir.unwrap_or(cfg.corpus.clone());
            let report = lint_corpus(&load_corpus(&root)?, cfg.threshold, &cfg.exec);
            for e in &report {
                let status = if e.problems.is_empty() { "ok" } else { "FAIL" };
                writeln!(out, "{status} {} revealing={}/{}", e.id, e.revealing, e.tests)
                    .map_err(|e| Error::io("<stdout>", e))?;
            }
            check_lint(&report)
        }
        Command::Run { out: dir } => {
            let cfg = g.experiment()?;
            let done = run_pipeline(&cfg, &dir)?;
            writeln!(
                out,
                "{} programs, {} artifacts written to {}",
                done.programs.len(),
                done.artifacts.len(),
                dir.display()
            )
            .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let what = path.display().to_string();
    let mut r = csv::Reader::from_reader(open(path)?);
    r.deserialize()
        .map(|row| row.map_err(|e| crate::error::SchemaError::csv(&what, e).into()))
        .collect()
}

fn write_report_dir(dir: &Path, report: &EvalReport) -> Result<()> {
    let mut store = Store::new(dir);
    for (name, text) in report.csv_files().map_err(|e| Error::stage("report", e))? {
        store.write(name, text.as_bytes())?;
    }
    Ok(())
}

/// Parse `args` and run, returning the process exit code.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run_with_args(std::env::args_os(), &mut std::io::stdout().lock())
}
