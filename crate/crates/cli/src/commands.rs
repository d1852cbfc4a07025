//! Subcommand definitions and their implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use critsurf::calibrate::{calibrate_eta, load_surfaces, save_surfaces, CalibrationConfig, NullEnsemble};
use critsurf::depcore::{compute_ranks, KernelRegistry};
use critsurf::rng::split_seed;
use critsurf::simlab::{empirical_power_with, CriticalSurfaceTest, ModelRegistry};
use critsurf::{diagnose_regression, run_test, CriticalSurfaces, Error, Grid, ModelSpec, Sample, TestReport};

use crate::heatmap::{emit_heatmap, render_scatter, write_file, HeatmapSpec};
use crate::ingest::{read_dataset, write_sample_csv, ColumnSelector, DatasetFile};
use crate::modelconfig::load_models;
use crate::report::ReportFile;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "critsurf", version, about = "Local dependence testing with calibrated critical surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the null ensemble and write a critical-surface cache
    Calibrate(CalibrateArgs),
    /// Test a two-column dataset against a surface cache
    Test(TestArgs),
    /// Fit y ~ x by least squares and test fitted values against studentized residuals
    Diagnose(TestArgs),
    /// Estimate power of the test for a list of models
    Power(PowerArgs),
    /// Write a synthetic sample from a model family as CSV
    Generate(GenerateArgs),
    /// List the built-in model families and their parameters
    Families,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Sample size the surfaces are valid for
    #[arg(long)]
    pub n: usize,
    /// Cells per axis [default: floor(sqrt(n))]
    #[arg(long)]
    pub k: Option<usize>,
    /// Global level
    #[arg(long, default_value_t = CalibrationConfig::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Null replicates
    #[arg(long, default_value_t = CalibrationConfig::DEFAULT_REPLICATES)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cache file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Surface kernel (blocked or direct)
    #[arg(long, default_value = KernelRegistry::DEFAULT)]
    pub kernel: String,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV file
    #[arg(long)]
    pub data: PathBuf,
    /// x column: header name or zero-based index
    #[arg(long, default_value = "0")]
    pub x: ColumnSelector,
    /// y column: header name or zero-based index
    #[arg(long, default_value = "1")]
    pub y: ColumnSelector,
    /// Drop rows where this column is zero (repeatable; columns need not be tested)
    #[arg(long = "require-nonzero", value_name = "COLUMN")]
    pub require_nonzero: Vec<ColumnSelector>,
    /// Field delimiter: a single character or `tab`
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// The first line is data, not a header
    #[arg(long)]
    pub no_header: bool,
}

impl DataArgs {
    pub fn dataset(&self) -> DatasetFile {
        DatasetFile {
            path: self.data.clone(),
            x: self.x.clone(),
            y: self.y.clone(),
            require_nonzero: self.require_nonzero.clone(),
            delimiter: self.delimiter,
            has_header: !self.no_header,
        }
    }
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" => Ok(b'\t'),
        _ if s.len() == 1 => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Surface cache from `calibrate`
    #[arg(long)]
    pub surfaces: PathBuf,
    /// Report JSON path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write PREFIX_qhat.svg, PREFIX_significant.svg and PREFIX_scatter.svg
    #[arg(long, value_name = "PREFIX")]
    pub heatmap_prefix: Option<String>,
    /// Print cell values inside the heatmaps
    #[arg(long)]
    pub annotate: bool,
    /// Seed for random tie breaking
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// TOML file with [[model]] entries
    #[arg(long)]
    pub models: PathBuf,
    /// One or more surface caches; each sets n, k and alpha for a row
    #[arg(long, num_args = 1.., required = true)]
    pub surfaces: Vec<PathBuf>,
    /// Monte Carlo repetitions per row
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Model family name (see `families`)
    #[arg(long)]
    pub family: String,
    /// Parameter override NAME=VALUE (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value.trim().parse().map_err(|_| format!("`{value}` is not a number"))?;
    Ok((name.trim().to_string(), value))
}

pub fn run(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Calibrate(a) => calibrate(&a, stdout),
        Command::Test(a) => test(&a, false, stdout),
        Command::Diagnose(a) => test(&a, true, stdout),
        Command::Power(a) => power(&a, stdout),
        Command::Generate(a) => generate(&a),
        Command::Families => families(stdout),
    }
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Data(format!("cannot write output: {e}"))
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Cache loading failures of any kind, including a missing file, exit 3.
pub fn open_surfaces(path: &Path) -> Result<CriticalSurfaces, CliError> {
    load_surfaces(path).map_err(|e| CliError::Cache(e.to_string()))
}

fn calibrate(a: &CalibrateArgs, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let mut config = CalibrationConfig::new(a.n)
        .with_alpha(a.alpha)
        .with_replicates(a.reps)
        .with_seed(a.seed);
    if let Some(k) = a.k {
        config = config.with_k(k);
    }
    config.validate().map_err(usage)?;
    let kernel = KernelRegistry::default().get(&a.kernel).map_err(usage)?;
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // ignore the error if a pool already exists (in-process reuse)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let ensemble = NullEnsemble::generate_with(&config, kernel.as_ref())?;
    let cs = calibrate_eta(&ensemble, config.alpha)?;
    save_surfaces(&cs, &a.out)?;
    writeln!(stdout, "n = {}, k = {}, alpha = {}, replicates = {}", cs.n(), cs.k(), cs.alpha(), config.replicates).map_err(out_err)?;
    writeln!(stdout, "eta = {}", cs.eta).map_err(out_err)?;
    writeln!(stdout, "achieved global size = {}", cs.achieved_global_size).map_err(out_err)?;
    writeln!(stdout, "wrote {}", a.out.display()).map_err(out_err)?;
    Ok(())
}

fn test(a: &TestArgs, regression: bool, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let sample = read_dataset(&a.data.dataset())?;
    let cs = open_surfaces(&a.surfaces)?;
    let (report, file, tested) = if regression {
        let (diag, report) = diagnose_regression(&sample.xs(), &sample.ys(), &cs, a.seed)?;
        let file = ReportFile::from_report(&report).with_regression(&diag);
        let tested = Sample::from_columns(&diag.fitted, &diag.studentized_residuals)?;
        (report, file, tested)
    } else {
        let report = run_test(&sample, &cs, a.seed)?;
        let file = ReportFile::from_report(&report);
        (report, file, sample)
    };
    match &a.out {
        Some(path) => file.save(path)?,
        None => stdout.write_all(file.to_json().as_bytes()).map_err(out_err)?,
    }
    if let Some(prefix) = &a.heatmap_prefix {
        write_plots(prefix, &report, &tested, a.seed, a.annotate)?;
    }
    Ok(())
}

/// Emits the q̂ heatmap, the significant-cell map and the rank scatter.
pub fn write_plots(prefix: &str, report: &TestReport, tested: &Sample, seed: u64, annotate: bool) -> Result<(), CliError> {
    let cells = report.surface.cells();
    let k = cells.rows();
    let mut qhat = HeatmapSpec::new(cells, format!("{prefix}_qhat.svg"));
    qhat.annotate = annotate;
    qhat.title = format!("quantile dependence, n = {}, k = {k}", report.surfaces_used.n);
    emit_heatmap(&qhat)?;

    let mut marked = Grid::filled(k, k, None);
    for c in &report.significant_cells {
        marked[(c.s, c.t)] = Some(c.value);
    }
    let significant = HeatmapSpec {
        values: marked,
        scale: Some(qhat.effective_scale()),
        annotate,
        title: format!("significant cells, eta = {}", report.surfaces_used.eta),
        path: format!("{prefix}_significant.svg").into(),
    };
    emit_heatmap(&significant)?;

    let ranks = compute_ranks(tested, seed);
    let n = ranks.n() as f64;
    let points: Vec<(f64, f64)> = ranks.r().iter().zip(ranks.s()).map(|(&r, &s)| (r as f64 / n, s as f64 / n)).collect();
    write_file(Path::new(&format!("{prefix}_scatter.svg")), &render_scatter(&points, "ranks / n"))
}

fn power(a: &PowerArgs, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let registry = ModelRegistry::default();
    let models = load_models(&a.models, &registry)?;
    let surfaces = a.surfaces.iter().map(|p| open_surfaces(p)).collect::<Result<Vec<_>, _>>()?;
    if a.reps < 100 {
        return Err(CliError::Usage(format!("--reps = {} is below the minimum of 100", a.reps)));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Data(format!("cannot write CSV: {e}"));
    w.write_record(["model", "n", "k", "alpha", "repetitions", "power", "half_width"]).map_err(csv_err)?;
    for (i, spec) in models.iter().enumerate() {
        let base = spec.seed.unwrap_or_else(|| split_seed(a.seed, i as u64));
        for (j, cs) in surfaces.iter().enumerate() {
            let r = empirical_power_with(&registry, spec, &CriticalSurfaceTest(cs), a.reps, split_seed(base, j as u64))?;
            w.write_record([
                r.model.name.clone(),
                r.n.to_string(),
                r.k.map_or(String::new(), |k| k.to_string()),
                r.alpha.to_string(),
                r.repetitions.to_string(),
                r.power.to_string(),
                r.mc_half_width.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(format!("cannot write CSV: {e}")))?;
    match &a.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(&bytes).map_err(out_err),
    }
}

fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    let mut spec = ModelSpec::family(&a.family);
    for (name, value) in &a.params {
        spec = spec.with_param(name, *value);
    }
    let sample = ModelRegistry::default().generate(&spec, a.n, a.seed).map_err(usage)?;
    write_sample_csv(&sample, &a.out)
}

fn families(stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let registry = ModelRegistry::default();
    for name in registry.names() {
        let family = registry.family(name)?;
        let params: Vec<String> = family.params().iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        writeln!(stdout, "{name}\t{}\t{}", family.description(), params.join(" ")).map_err(out_err)?;
    }
    Ok(())
}
