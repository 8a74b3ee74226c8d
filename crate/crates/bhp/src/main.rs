use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bhp::bench::{render_report, run_experiment, BenchConfig, ReportFormat};
use bhp::check::{run_checks, to_csv, CheckSettings};
use bhp::draw::{read_series, write_draw, write_filtered};
use bhp::error::{CliError, CliResult};
use bhp::panel_io::{ac_report, covered_span, load_panel, write_index, write_tidy, LoadOptions};
use bhp::svg::{bands_from_csv, render, Line, Panel};
use bhp::SCHEMA_VERSION;
use bhp_core::actest::robust_ac_test;
use bhp_core::ar::{ar_trend_cycle, ArSpec};
use bhp_core::boosting::{boosted_hp, boosted_hp_bic, BoostConfig, Stopping, DEFAULT_M_MAX};
use bhp_core::dgp::{gen_dgp, DgpSpec, LurBreak};
use bhp_core::hp::hp_smooth;
use bhp_core::panel::{
    aggregate_index, default_flip_ids, filter_panel, standardize_and_flip, PanelFilter, PanelMethod,
};
use bhp_core::rng::ALGORITHM;
use bhp_core::{FilterResult, Frequency};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "bhp",
    version,
    about = "HP and boosted HP trend-cycle filtering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter one series from a CSV file
    Filter(FilterArgs),
    /// Write one simulated draw as CSV (t, f, cycle, y)
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo experiment from a TOML config
    Bench(BenchArgs),
    /// Build the aggregate cyclical index of a panel
    Aggregate(AggregateArgs),
    /// Joint autocorrelation test on the aggregate index of a panel
    Actest(ActestArgs),
    /// Numerical checks of the residual operator
    Check(CheckArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Hp,
    #[value(name = "2hp")]
    TwoHp,
    Bhp,
    Ar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FreqArg {
    Quarterly,
    Monthly,
    Annual,
    Custom,
}

impl From<FreqArg> for Frequency {
    fn from(f: FreqArg) -> Self {
        match f {
            FreqArg::Quarterly => Frequency::Quarterly,
            FreqArg::Monthly => Frequency::Monthly,
            FreqArg::Annual => Frequency::Annual,
            FreqArg::Custom => Frequency::Custom,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct FilterOptions {
    #[arg(long, value_enum, default_value = "bhp")]
    method: Method,
    /// Smoothing parameter (default: 1600 quarterly, 129600 monthly)
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "quarterly")]
    frequency: FreqArg,
    /// Largest iteration count searched by the stopping rule
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    mmax: usize,
    /// Fixed iteration count for bhp instead of the stopping rule
    #[arg(long)]
    fixed_m: Option<usize>,
    /// AR lag order (default: 4 quarterly, 12 monthly)
    #[arg(long)]
    p: Option<usize>,
}

impl FilterOptions {
    fn lambda(&self) -> CliResult<f64> {
        let freq: Frequency = self.frequency.into();
        match self.lambda {
            Some(l) if l > 0.0 && l.is_finite() => Ok(l),
            Some(l) => Err(CliError::usage(format!(
                "--lambda must be positive, got {l}"
            ))),
            None => freq
                .default_lambda()
                .ok_or_else(|| CliError::usage(format!("--lambda is required for {freq} data"))),
        }
    }

    fn ar_spec(&self) -> CliResult<ArSpec> {
        match self.p {
            Some(0) => Err(CliError::usage("--p must be at least 1")),
            Some(p) => Ok(ArSpec::one_step(p)),
            None => Ok(ArSpec::for_frequency(self.frequency.into())?),
        }
    }

    fn check_combination(&self) -> CliResult<()> {
        if self.fixed_m.is_some() && self.method != Method::Bhp {
            return Err(CliError::usage("--fixed-m only applies to --method bhp"));
        }
        if self.p.is_some() && self.method != Method::Ar {
            return Err(CliError::usage("--p only applies to --method ar"));
        }
        Ok(())
    }

    fn label(&self) -> String {
        match (self.method, self.fixed_m) {
            (Method::Hp, _) => "HP".into(),
            (Method::TwoHp, _) | (Method::Bhp, Some(2)) => "2HP".into(),
            (Method::Bhp, Some(m)) => format!("bHP{m}"),
            (Method::Bhp, None) => "bHP".into(),
            (Method::Ar, _) => "AR".into(),
        }
    }

    fn panel_filter(&self) -> CliResult<PanelFilter> {
        self.check_combination()?;
        let method = match (self.method, self.fixed_m) {
            (Method::Hp, _) => PanelMethod::Hp,
            (Method::TwoHp, _) => PanelMethod::BhpFixed(2),
            (Method::Bhp, Some(m)) => PanelMethod::BhpFixed(m),
            (Method::Bhp, None) => PanelMethod::BhpBic,
            (Method::Ar, _) => PanelMethod::Ar,
        };
        let mut f = PanelFilter {
            method,
            lambda: 1.0,
            m_max: self.mmax,
            ar: ArSpec::one_step(1),
        };
        if method != PanelMethod::Ar {
            f.lambda = self.lambda()?;
        } else {
            f.ar = self.ar_spec()?;
        }
        Ok(f)
    }

    fn resolved(&self) -> serde_json::Value {
        json!({
            "method": self.label(),
            "frequency": Frequency::from(self.frequency).as_str(),
            "lambda": if self.method == Method::Ar { None } else { self.lambda().ok() },
            "mmax": self.mmax,
            "fixed_m": match self.method { Method::TwoHp => Some(2), _ => self.fixed_m },
            "p": if self.method == Method::Ar { self.ar_spec().ok().map(|a| a.p) } else { None },
        })
    }
}

#[derive(Args, Debug)]
struct FilterArgs {
    /// Input CSV: label or date column first, then value columns
    input: PathBuf,
    /// Value column to filter (default: the first after the dates)
    #[arg(long)]
    column: Option<String>,
    #[command(flatten)]
    filter: FilterOptions,
    /// Output CSV (default: stdout)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a two-panel SVG chart
    #[arg(long)]
    svg: Option<PathBuf>,
    /// CSV of `start,end` dates shaded on the chart
    #[arg(long, requires = "svg")]
    shading: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LurBreakArg {
    Restarted,
    Continued,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Design id, 1 to 10
    #[arg(long)]
    dgp: u8,
    #[arg(long)]
    n: usize,
    /// Localizing coefficient (designs 6 to 10)
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "quarterly")]
    frequency: FreqArg,
    /// Innovation scale (default: 5 for designs 1 to 5, 1 otherwise)
    #[arg(long)]
    sigma_e: Option<f64>,
    /// Post-break local unit root of designs 9 and 10
    #[arg(long, value_enum, default_value = "restarted")]
    lur_break: LurBreakArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// TOML experiment configuration
    config: PathBuf,
    #[arg(long)]
    replications: Option<usize>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "csv", value_parser = |s: &str| s.parse::<ReportFormat>())]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PanelArgs {
    /// Panel CSV: dates in the first column, one series per further column
    input: PathBuf,
    #[command(flatten)]
    filter: FilterOptions,
    /// `default`, `none` or a comma-separated list of series ids
    #[arg(long, default_value = "default")]
    flips: String,
    /// Metadata rows between the header and the first date
    #[arg(long, default_value_t = 0)]
    skip_rows: usize,
    /// Fill interior gaps linearly instead of excluding the series
    #[arg(long)]
    interpolate_interior: bool,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    #[command(flatten)]
    panel: PanelArgs,
    /// Directory for tidy.csv, index.csv and meta.json
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ActestArgs {
    #[command(flatten)]
    panel: PanelArgs,
    /// Number of autocorrelations (default: 6 quarterly, 18 monthly)
    #[arg(long = "K", short = 'K')]
    k: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CheckFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Scale in lambda = mu n^4
    #[arg(long, default_value_t = 1.6e-5)]
    mu: f64,
    /// Share of the sample kept when measuring interior errors
    #[arg(long, default_value_t = bhp_core::theory::DEFAULT_INTERIOR)]
    interior: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: CheckFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Writes the payload to the file or stdout. The resolved configuration goes
/// next to the file as `<file>.meta.json`, or to stderr for stdout output.
fn emit(
    output: Option<&Path>,
    meta: &serde_json::Value,
    write: impl FnOnce(&mut dyn Write) -> CliResult<()>,
) -> CliResult<()> {
    let meta_text = serde_json::to_string_pretty(meta)?;
    match output {
        Some(path) => {
            let mut f = create(path)?;
            write(&mut f)?;
            f.flush()?;
            let mut meta_path = path.as_os_str().to_owned();
            meta_path.push(".meta.json");
            fs::write(&meta_path, meta_text + "\n")?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
            eprintln!("{meta_text}");
        }
    }
    Ok(())
}

fn run_filter(a: &FilterArgs) -> CliResult<()> {
    let opts = &a.filter;
    opts.check_combination()?;
    let series = read_series(open(&a.input)?, a.column.as_deref())?;
    let y = &series.values;
    let result: FilterResult = match (opts.method, opts.fixed_m) {
        (Method::Hp, _) => hp_smooth(y, opts.lambda()?)?,
        (Method::TwoHp, _) => boosted_hp(y, opts.lambda()?, 2)?,
        (Method::Bhp, Some(m)) => boosted_hp(y, opts.lambda()?, m)?,
        (Method::Bhp, None) => {
            let config = BoostConfig::custom(opts.lambda()?)
                .with_m_max(opts.mmax)
                .with_stopping(Stopping::Bic);
            boosted_hp_bic(
                y,
                &BoostConfig {
                    frequency: opts.frequency.into(),
                    ..config
                },
            )?
        }
        (Method::Ar, _) => ar_trend_cycle(y, &opts.ar_spec()?)?,
    };
    let label = opts.label();
    let mut meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "filter",
        "input": a.input,
        "column": series.name,
        "observations": y.len(),
        "config": opts.resolved(),
        "m_hat": result.iterations,
        "first_defined": result.first_defined,
        "warning": result.warning.map(|w| w.as_str()),
    });
    if let Some(w) = result.warning {
        eprintln!("warning: {}", w.as_str());
    }
    if let Some(svg_path) = &a.svg {
        let bands = match &a.shading {
            Some(p) => {
                let mut text = String::new();
                open(p)?.read_to_string(&mut text)?;
                bands_from_csv(&text, &series.labels).map_err(CliError::data)?
            }
            None => Vec::new(),
        };
        let trend_title = format!("{} and {} trend", series.name, label);
        let chart = render(
            &series.labels,
            &[
                Panel {
                    title: &trend_title,
                    lines: vec![
                        Line {
                            label: "raw",
                            color: "#333333",
                            values: y,
                        },
                        Line {
                            label: "trend",
                            color: "#1f77b4",
                            values: &result.trend,
                        },
                    ],
                    zero_line: false,
                },
                Panel {
                    title: "cycle",
                    lines: vec![Line {
                        label: "cycle",
                        color: "#d62728",
                        values: &result.cycle,
                    }],
                    zero_line: true,
                },
            ],
            &bands,
        );
        fs::write(svg_path, chart)?;
        meta["svg"] = json!(svg_path);
    }
    emit(a.output.as_deref(), &meta, |w| {
        write_filtered(w, &series, &result, &label)
    })
}

fn run_simulate(a: &SimulateArgs) -> CliResult<()> {
    let mut spec = DgpSpec::new(a.dgp, a.n, a.frequency.into(), a.seed);
    if let Some(c) = a.c {
        if a.dgp < 6 {
            return Err(CliError::usage(format!(
                "--c does not apply to design {}",
                a.dgp
            )));
        }
        spec = spec.with_c(c);
    }
    if let Some(s) = a.sigma_e {
        spec = spec.with_sigma_e(s);
    }
    spec = spec.with_lur_break(match a.lur_break {
        LurBreakArg::Restarted => LurBreak::Restarted,
        LurBreakArg::Continued => LurBreak::Continued,
    });
    let draw = gen_dgp(&spec)?;
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "rng_algorithm": ALGORITHM,
        "dgp": spec.id,
        "n": spec.n,
        "frequency": spec.frequency.as_str(),
        "c": spec.c,
        "sigma_e": spec.sigma_e,
        "seed": spec.seed,
        "lur_break": match spec.lur_break { LurBreak::Restarted => "restarted", LurBreak::Continued => "continued" },
    });
    emit(a.output.as_deref(), &meta, |w| write_draw(w, &draw))
}

fn run_bench(a: &BenchArgs) -> CliResult<()> {
    let mut text = String::new();
    open(&a.config)?.read_to_string(&mut text)?;
    let mut config = BenchConfig::from_toml(&text)?;
    if let Some(r) = a.replications {
        config.replications = r;
    }
    if let Some(w) = a.workers {
        config.workers = w;
    }
    if let Some(s) = a.seed {
        config.base_seed = s;
    }
    let report = run_experiment(&config)?;
    let rendered = render_report(&report, a.format);
    // the CSV and markdown forms carry no timing so they stay reproducible
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "bench",
        "rng_algorithm": ALGORITHM,
        "config": report.config,
        "notes": report.notes,
        "wall_time_secs": report.wall_time_secs,
    });
    emit(a.output.as_deref(), &meta, |w| {
        Ok(w.write_all(rendered.as_bytes())?)
    })?;
    if report.any_unreliable() {
        let bad = report.cells.iter().filter(|c| c.unreliable).count();
        return Err(CliError::Numerical(format!(
            "{bad} cell(s) unreliable: more than 1% of replications failed"
        )));
    }
    Ok(())
}

struct PanelRun {
    panel: bhp_core::panel::PanelDataset,
    cycles: bhp_core::panel::PanelCycles,
    standardized: bhp_core::panel::PanelCycles,
    index: bhp_core::panel::AggregateIndex,
    meta: serde_json::Value,
}

fn parse_flips(spec: &str, freq: Frequency) -> CliResult<Vec<u32>> {
    match spec.trim() {
        "default" => Ok(default_flip_ids(freq)),
        "none" | "" => Ok(Vec::new()),
        list => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::usage(format!("bad flip id '{s}'")))
            })
            .collect(),
    }
}

fn run_panel(a: &PanelArgs) -> CliResult<PanelRun> {
    let freq: Frequency = a.filter.frequency.into();
    let filter = a.filter.panel_filter()?;
    let flips = parse_flips(&a.flips, freq)?;
    let mut options = LoadOptions::new(freq);
    options.skip_metadata_rows = a.skip_rows;
    options.interpolate_interior = a.interpolate_interior;
    let panel = load_panel(open(&a.input)?, &options)?;
    let cycles = filter_panel(&panel, &filter)?;
    let standardized = standardize_and_flip(&cycles, &flips);
    let index = aggregate_index(&standardized)?;
    for e in &standardized.excluded {
        eprintln!("excluded series {} ({}): {}", e.id, e.name, e.reason);
    }
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "input": a.input,
        "config": a.filter.resolved(),
        "flips": flips,
        "skip_rows": a.skip_rows,
        "interpolate_interior": a.interpolate_interior,
        "dates": panel.dates.len(),
        "series_used": standardized.series.len(),
        "excluded": standardized.excluded.iter().map(|e| json!({"id": e.id, "name": e.name, "reason": e.reason})).collect::<Vec<_>>(),
        "iterations": standardized.series.iter().map(|s| json!({"id": s.id, "m_hat": s.iterations})).collect::<Vec<_>>(),
    });
    Ok(PanelRun {
        panel,
        cycles,
        standardized,
        index,
        meta,
    })
}

fn run_aggregate(a: &AggregateArgs) -> CliResult<()> {
    let run = run_panel(&a.panel)?;
    fs::create_dir_all(&a.output_dir)?;
    let dir = &a.output_dir;
    let mut tidy = create(&dir.join("tidy.csv"))?;
    write_tidy(&mut tidy, &run.panel.dates, &run.cycles, &run.standardized)?;
    tidy.flush()?;
    let mut index = create(&dir.join("index.csv"))?;
    write_index(&mut index, &run.panel.dates, &run.index)?;
    index.flush()?;
    let mut meta = run.meta;
    meta["command"] = json!("aggregate");
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(())
}

fn run_actest(a: &ActestArgs) -> CliResult<()> {
    let run = run_panel(&a.panel)?;
    let freq: Frequency = a.panel.filter.frequency.into();
    let k = match a.k {
        Some(0) => return Err(CliError::usage("--K must be at least 1")),
        Some(k) => k,
        None => freq
            .default_ac_lags()
            .ok_or_else(|| CliError::usage(format!("--K is required for {freq} data")))?,
    };
    let span = covered_span(&run.index)
        .ok_or_else(|| CliError::data("aggregate index has no covered dates"))?;
    let result = robust_ac_test(&run.index.values[span.0..span.1], k)?;
    let method = a.panel.filter.label();
    let report = ac_report(&result, &method, &run.panel.dates, span);
    let mut meta = run.meta;
    meta["command"] = json!("actest");
    meta["K"] = json!(k);
    let body = serde_json::to_string_pretty(&report)? + "\n";
    emit(a.output.as_deref(), &meta, |w| {
        Ok(w.write_all(body.as_bytes())?)
    })
}

fn run_check(a: &CheckArgs) -> CliResult<()> {
    if !(a.interior > 0.0 && a.interior <= 1.0) {
        return Err(CliError::usage("--interior must lie in (0, 1]"));
    }
    let settings = CheckSettings {
        n: a.n,
        mu: a.mu,
        interior: a.interior,
    };
    let rows = run_checks(&settings)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("{} checks, {} failed", rows.len(), failed);
    let body = match a.format {
        CheckFormat::Csv => to_csv(&rows)?,
        CheckFormat::Json => {
            serde_json::to_string_pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "n": a.n,
                "mu": a.mu,
                "interior": a.interior,
                "checks": rows,
            }))? + "\n"
        }
    };
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "check",
        "n": a.n,
        "mu": a.mu,
        "interior": a.interior,
    });
    emit(a.output.as_deref(), &meta, |w| {
        Ok(w.write_all(body.as_bytes())?)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Filter(a) => run_filter(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
        Command::Aggregate(a) => run_aggregate(a),
        Command::Actest(a) => run_actest(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
