use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use tabaudit::evaluation::convergence::write_curve_csv;
use tabaudit::evaluation::{inject_errors, record_convergence, InjectionPlan};
use tabaudit::report::write_run_log;
use tabaudit::{attach_ground_truth, load_csv, run_oracle, RunReport};

use crate::options::SessionOptions;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Dirty table (CSV).
    #[arg(long)]
    pub data: PathBuf,
    /// Clean version of the same table; answers every query.
    #[arg(long)]
    pub ground_truth: PathBuf,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: PathBuf,
    /// Per-iteration JSONL log.
    #[arg(long)]
    pub run_log: Option<PathBuf>,
    /// Session snapshot written at the end of the run.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Convergence curve as CSV.
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
    /// The CSV files have no header row.
    #[arg(long)]
    pub no_header: bool,
    #[command(flatten)]
    pub session: SessionOptions,
}

#[derive(Debug, Clone, Args)]
pub struct InjectArgs {
    /// Clean table (CSV with header).
    #[arg(long)]
    pub clean: PathBuf,
    /// Injection plan (JSON).
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub dirty_out: PathBuf,
    #[arg(long)]
    pub gt_out: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn run(args: &RunArgs) -> Result<RunReport, CliError> {
    let has_header = !args.no_header;
    let dirty = load_csv(&args.data, has_header)?;
    let clean = load_csv(&args.ground_truth, has_header)?;
    let truth = attach_ground_truth(&dirty, clean)?;
    let session = run_oracle(Arc::new(dirty), Arc::new(truth), args.session.to_config())?;
    let report = RunReport::from_session(&session)?;
    report.save(&args.report)?;
    if let Some(path) = &args.run_log {
        write_run_log(session.history(), create(path)?).map_err(|e| CliError::io(path, e))?;
    }
    if let Some(path) = &args.snapshot {
        session.snapshot().save(path)?;
    }
    if let Some(path) = &args.curve_csv {
        let curve = record_convergence(std::slice::from_ref(&report.convergence_curve))?;
        write_curve_csv(&curve, create(path)?).map_err(|e| CliError::io(path, e))?;
    }
    Ok(report)
}

/// Returns the number of corrupted cells.
pub fn inject(args: &InjectArgs) -> Result<usize, CliError> {
    let clean = load_csv(&args.clean, true)?;
    let plan = InjectionPlan::load(&args.plan)?;
    let (dirty, truth) = inject_errors(&clean, &plan)?;
    dirty.save_csv(&args.dirty_out)?;
    truth.table().save_csv(&args.gt_out)?;
    Ok(truth.error_cells(&dirty).len())
}
