//! Monte-Carlo comparison of trend estimators on the simulation designs.
//!
//! Every replication `r` of a design cell draws from seed `base_seed ^ r`,
//! so all cells and methods see common random numbers. Replications run
//! on a rayon pool; results are collected in replication order and reduced
//! sequentially, so the report does not depend on the number of workers.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use bhp_core::ar::ArSpec;
use bhp_core::dgp::{gen_dgp, DgpSpec, LurBreak};
use bhp_core::metrics::{evaluate_method, summarize, FilterContext, MethodSpec};
use bhp_core::rng::{replication_seed, ALGORITHM};
use bhp_core::Frequency;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{SmootherCache, SpectrumCache};
use crate::error::{CliError, CliResult};
use crate::SCHEMA_VERSION;

/// Share of failed replications above which a cell is flagged.
pub const UNRELIABLE_FAILURE_SHARE: f64 = 0.01;

/// A method as written in a configuration file: `hp`, `2hp`, `bhp`,
/// `bhp:<m_max>`, `bhp-fixed:<m>`, `ar`, `ar:<p>`, `ar-proj:<p>:<h>`,
/// `oracle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodChoice {
    Hp,
    TwoHp,
    Bhp { m_max: usize },
    BhpFixed(usize),
    Ar { p: Option<usize> },
    ArProjection { p: usize, horizon: usize },
    Oracle,
}

impl MethodChoice {
    pub fn resolve(self, frequency: Frequency) -> CliResult<MethodSpec> {
        Ok(match self {
            MethodChoice::Hp => MethodSpec::Hp,
            MethodChoice::TwoHp => MethodSpec::TwoHp,
            MethodChoice::Bhp { m_max } => MethodSpec::BhpBic { m_max },
            MethodChoice::BhpFixed(m) => MethodSpec::BhpFixed(m),
            MethodChoice::Ar { p: Some(p) } => MethodSpec::Ar(ArSpec::one_step(p)),
            MethodChoice::Ar { p: None } => MethodSpec::Ar(ArSpec::for_frequency(frequency)?),
            MethodChoice::ArProjection { p, horizon } => {
                MethodSpec::Ar(ArSpec::projection(p, horizon))
            }
            MethodChoice::Oracle => MethodSpec::Oracle,
        })
    }
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<usize, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("method '{s}' is missing a number"))?
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| format!("method '{s}': expected a positive integer"))
        };
        let arity = |k: usize| -> Result<(), String> {
            if parts.len() == k {
                Ok(())
            } else {
                Err(format!("method '{s}' takes {} argument(s)", k - 1))
            }
        };
        match parts[0].to_ascii_lowercase().as_str() {
            "hp" => arity(1).map(|_| MethodChoice::Hp),
            "2hp" => arity(1).map(|_| MethodChoice::TwoHp),
            "bhp" if parts.len() == 1 => Ok(MethodChoice::Bhp {
                m_max: bhp_core::boosting::DEFAULT_M_MAX,
            }),
            "bhp" => arity(2).and_then(|_| Ok(MethodChoice::Bhp { m_max: num(1)? })),
            "bhp-fixed" => arity(2).and_then(|_| Ok(MethodChoice::BhpFixed(num(1)?))),
            "ar" if parts.len() == 1 => Ok(MethodChoice::Ar { p: None }),
            "ar" => arity(2).and_then(|_| Ok(MethodChoice::Ar { p: Some(num(1)?) })),
            "ar-proj" => arity(3).and_then(|_| {
                Ok(MethodChoice::ArProjection {
                    p: num(1)?,
                    horizon: num(2)?,
                })
            }),
            "oracle" => arity(1).map(|_| MethodChoice::Oracle),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

impl TryFrom<String> for MethodChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MethodChoice> for String {
    fn from(m: MethodChoice) -> String {
        match m {
            MethodChoice::Hp => "hp".into(),
            MethodChoice::TwoHp => "2hp".into(),
            MethodChoice::Bhp { m_max } => format!("bhp:{m_max}"),
            MethodChoice::BhpFixed(m) => format!("bhp-fixed:{m}"),
            MethodChoice::Ar { p: None } => "ar".into(),
            MethodChoice::Ar { p: Some(p) } => format!("ar:{p}"),
            MethodChoice::ArProjection { p, horizon } => format!("ar-proj:{p}:{horizon}"),
            MethodChoice::Oracle => "oracle".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    /// 1600 quarterly, 129600 monthly.
    FixedByFrequency,
    /// `λ = μ n⁴`.
    Scaled(f64),
}

impl LambdaRule {
    pub fn lambda(self, frequency: Frequency, n: usize) -> CliResult<f64> {
        match self {
            LambdaRule::FixedByFrequency => frequency
                .default_lambda()
                .ok_or_else(|| CliError::usage(format!("no default lambda for {frequency} data"))),
            LambdaRule::Scaled(mu) if mu > 0.0 && mu.is_finite() => Ok(mu * (n as f64).powi(4)),
            LambdaRule::Scaled(mu) => Err(CliError::usage(format!(
                "scale mu must be positive, got {mu}"
            ))),
        }
    }
}

/// A design template; every combination of `sample_sizes` and `c` is a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpTemplate {
    pub id: u8,
    pub frequency: Frequency,
    /// Overrides the configuration-wide sample sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_sizes: Option<Vec<usize>>,
    /// Localizing coefficients (designs 6-10).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_e: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "is_restarted",
        with = "lur_break_serde"
    )]
    pub lur_break: LurBreak,
}

fn is_restarted(b: &LurBreak) -> bool {
    *b == LurBreak::Restarted
}

mod lur_break_serde {
    use bhp_core::dgp::LurBreak;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &LurBreak, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match b {
            LurBreak::Restarted => "restarted",
            LurBreak::Continued => "continued",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LurBreak, D::Error> {
        match String::deserialize(d)?.as_str() {
            "restarted" => Ok(LurBreak::Restarted),
            "continued" => Ok(LurBreak::Continued),
            other => Err(serde::de::Error::custom(format!(
                "unknown lur_break '{other}'"
            ))),
        }
    }
}

fn default_replications() -> usize {
    1000
}

fn default_seed() -> u64 {
    42
}

fn default_lambda_rule() -> LambdaRule {
    LambdaRule::FixedByFrequency
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub dgps: Vec<DgpTemplate>,
    #[serde(default)]
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<MethodChoice>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_lambda_rule")]
    pub lambda_rule: LambdaRule,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    /// Worker threads; 0 uses all available cores.
    #[serde(default)]
    pub workers: usize,
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: BenchConfig =
            toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.replications < 2 {
            return Err(CliError::usage("replications must be at least 2"));
        }
        if self.dgps.is_empty() {
            return Err(CliError::usage("config lists no designs"));
        }
        for d in &self.dgps {
            let sizes = d.sample_sizes.as_ref().unwrap_or(&self.sample_sizes);
            if sizes.is_empty() {
                return Err(CliError::usage(format!(
                    "design {} has no sample sizes",
                    d.id
                )));
            }
            if d.id >= 6 && d.c.is_empty() {
                return Err(CliError::usage(format!(
                    "design {} needs at least one value of c",
                    d.id
                )));
            }
            for &n in sizes {
                if n < 9 {
                    return Err(CliError::usage(format!(
                        "sample size {n} is below the MSE window minimum 9"
                    )));
                }
                self.lambda_rule.lambda(d.frequency, n)?;
                for m in &self.methods {
                    m.resolve(d.frequency)?;
                }
                design_specs(d, n)
                    .into_iter()
                    .try_for_each(|s| s.validate())?;
            }
        }
        Ok(())
    }

    /// Design cells in configuration order.
    pub fn cells(&self) -> Vec<(DgpSpec, &DgpTemplate)> {
        let mut out = Vec::new();
        for d in &self.dgps {
            for &n in d.sample_sizes.as_ref().unwrap_or(&self.sample_sizes) {
                out.extend(design_specs(d, n).into_iter().map(|s| (s, d)));
            }
        }
        out
    }
}

fn design_specs(d: &DgpTemplate, n: usize) -> Vec<DgpSpec> {
    let base = DgpSpec::new(d.id, n, d.frequency, 0).with_lur_break(d.lur_break);
    let base = match d.sigma_e {
        Some(s) => base.with_sigma_e(s),
        None => base,
    };
    if d.c.is_empty() {
        vec![base]
    } else {
        d.c.iter().map(|&c| base.with_c(c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dgp: u8,
    pub frequency: Frequency,
    pub n: usize,
    pub c: Option<f64>,
    pub lambda: f64,
    pub method: String,
    pub mean_mse: f64,
    pub std_error: f64,
    /// Replications that produced an MSE.
    pub replications: usize,
    pub failures: usize,
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub rng_algorithm: String,
    pub config: BenchConfig,
    pub cells: Vec<CellResult>,
    pub notes: Vec<String>,
    pub wall_time_secs: f64,
}

impl BenchReport {
    pub fn any_unreliable(&self) -> bool {
        self.cells.iter().any(|c| c.unreliable)
    }

    pub fn cell(&self, dgp: u8, n: usize, c: Option<f64>, method: &str) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|x| x.dgp == dgp && x.n == n && x.c == c && x.method == method)
    }
}

/// Runs every cell. `workers = 0` uses all cores.
pub fn run_experiment(config: &BenchConfig) -> CliResult<BenchReport> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    let smoothers = SmootherCache::default();
    let spectra = SpectrumCache::default();
    let mut cells = Vec::new();
    let mut ar_startup = BTreeSet::new();

    for (spec, _) in config.cells() {
        let lambda = config.lambda_rule.lambda(spec.frequency, spec.n)?;
        let methods: Vec<MethodSpec> = config
            .methods
            .iter()
            .map(|m| m.resolve(spec.frequency))
            .collect::<CliResult<_>>()?;
        for m in &methods {
            if let MethodSpec::Ar(ar) = m {
                if ar.first_fitted() > 4 {
                    ar_startup.insert((m.label(), ar.first_fitted()));
                }
            }
        }
        let smoother = smoothers.get(spec.n, lambda)?;
        let spectrum = if methods.iter().any(|m| m.needs_spectrum()) {
            Some(spectra.get(spec.n)?)
        } else {
            None
        };
        let ctx = FilterContext {
            smoother: &smoother,
            spectrum: spectrum.as_deref(),
        };

        let per_rep: Vec<Vec<Option<f64>>> = pool.install(|| {
            (0..config.replications as u64)
                .into_par_iter()
                .map(|r| {
                    let draw = gen_dgp(&spec.with_seed(replication_seed(config.base_seed, r)));
                    methods
                        .iter()
                        .map(|m| {
                            let d = draw.as_ref().ok()?;
                            evaluate_method(m, &d.y, &d.trend, ctx)
                                .ok()
                                .filter(|v| v.is_finite())
                        })
                        .collect()
                })
                .collect()
        });

        for (j, m) in methods.iter().enumerate() {
            let values: Vec<f64> = per_rep.iter().filter_map(|row| row[j]).collect();
            let failures = config.replications - values.len();
            let s = summarize(&values);
            cells.push(CellResult {
                dgp: spec.id,
                frequency: spec.frequency,
                n: spec.n,
                c: spec.c,
                lambda,
                method: m.label(),
                mean_mse: s.mean,
                std_error: s.std_error,
                replications: values.len(),
                failures,
                unreliable: failures as f64 > UNRELIABLE_FAILURE_SHARE * config.replications as f64,
            });
        }
    }

    let mut notes = Vec::new();
    for (label, first) in ar_startup {
        notes.push(format!(
            "{label}: the trend is undefined before t = {}; those positions are skipped and the MSE divisor is reduced accordingly",
            first + 1
        ));
    }
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        rng_algorithm: ALGORITHM.into(),
        config: config.clone(),
        cells,
        notes,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

pub fn render_report(report: &BenchReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
    }
}

fn fmt_c(c: Option<f64>) -> String {
    c.map(|c| c.to_string()).unwrap_or_default()
}

fn render_csv(report: &BenchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "schema_version",
        "dgp",
        "frequency",
        "n",
        "c",
        "lambda",
        "method",
        "mean_mse",
        "mc_std_error",
        "replications",
        "failures",
        "unreliable",
    ])
    .unwrap();
    for c in &report.cells {
        w.write_record([
            report.schema_version.to_string(),
            c.dgp.to_string(),
            c.frequency.to_string(),
            c.n.to_string(),
            fmt_c(c.c),
            c.lambda.to_string(),
            c.method.clone(),
            c.mean_mse.to_string(),
            c.std_error.to_string(),
            c.replications.to_string(),
            c.failures.to_string(),
            c.unreliable.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn method_labels(report: &BenchReport) -> Vec<String> {
    let mut labels: Vec<String> = Vec::new();
    for c in &report.cells {
        if !labels.contains(&c.method) {
            labels.push(c.method.clone());
        }
    }
    if labels.is_empty() {
        // an empty report still shows the configured columns
        for m in &report.config.methods {
            if let Ok(spec) = m.resolve(Frequency::Quarterly) {
                labels.push(spec.label());
            }
        }
    }
    labels
}

/// Rows `(dgp, n)` per frequency, grouped into one table per value of `c`
/// with quarterly and monthly panels side by side.
fn render_markdown(report: &BenchReport) -> String {
    let labels = method_labels(report);
    let mut cs: Vec<Option<f64>> = Vec::new();
    for c in &report.cells {
        if !cs.contains(&c.c) {
            cs.push(c.c);
        }
    }
    if cs.is_empty() {
        cs.push(None);
    }
    let mut freqs: Vec<Frequency> = Vec::new();
    for c in &report.cells {
        if !freqs.contains(&c.frequency) {
            freqs.push(c.frequency);
        }
    }
    if freqs.is_empty() {
        freqs.push(Frequency::Quarterly);
    }

    let mut out = String::new();
    for c in cs {
        if let Some(c) = c {
            let _ = writeln!(out, "### c = {c}\n");
        }
        let mut header = String::from("|");
        let mut rule = String::from("|");
        let mut panel = String::from("|");
        for f in &freqs {
            let _ = write!(panel, " {} |{}", f, " |".repeat(labels.len() + 1));
            header.push_str(" DGP | n |");
            rule.push_str("---|---:|");
            for l in &labels {
                let _ = write!(header, " {l} |");
                rule.push_str("---:|");
            }
        }
        if freqs.len() > 1 {
            let _ = writeln!(out, "{panel}");
            let _ = writeln!(out, "{}", rule.replace(":", ""));
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{rule}");

        let rows_of = |f: Frequency| -> Vec<(u8, usize)> {
            let mut rows = Vec::new();
            for x in report.cells.iter().filter(|x| x.frequency == f && x.c == c) {
                if !rows.contains(&(x.dgp, x.n)) {
                    rows.push((x.dgp, x.n));
                }
            }
            rows
        };
        let panels: Vec<Vec<(u8, usize)>> = freqs.iter().map(|&f| rows_of(f)).collect();
        let height = panels.iter().map(Vec::len).max().unwrap_or(0);
        for i in 0..height {
            let mut line = String::from("|");
            for (f, rows) in freqs.iter().zip(&panels) {
                match rows.get(i) {
                    Some(&(dgp, n)) => {
                        let _ = write!(line, " {dgp} | {n} |");
                        for l in &labels {
                            let cell = report.cells.iter().find(|x| {
                                x.frequency == *f
                                    && x.c == c
                                    && x.dgp == dgp
                                    && x.n == n
                                    && &x.method == l
                            });
                            match cell {
                                Some(x) if x.unreliable => {
                                    let _ = write!(line, " {:.2}* |", x.mean_mse);
                                }
                                Some(x) => {
                                    let _ = write!(line, " {:.2} |", x.mean_mse);
                                }
                                None => line.push_str(" |"),
                            }
                        }
                    }
                    None => line.push_str(&" |".repeat(labels.len() + 2)),
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out.push('\n');
    }
    if report.cells.iter().any(|c| c.unreliable) {
        let _ = writeln!(out, "\\* more than 1% of replications failed\n");
    }
    for n in &report.notes {
        let _ = writeln!(out, "Note: {n}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> BenchConfig {
        BenchConfig::from_toml(text).unwrap()
    }

    #[test]
    fn method_strings_round_trip() {
        for s in [
            "hp",
            "2hp",
            "bhp:200",
            "bhp-fixed:3",
            "ar",
            "ar:12",
            "ar-proj:4:8",
            "oracle",
        ] {
            let m: MethodChoice = s.parse().unwrap();
            assert_eq!(String::from(m), s);
        }
        assert_eq!(
            "bhp".parse::<MethodChoice>().unwrap(),
            MethodChoice::Bhp { m_max: 200 }
        );
        assert!("ar:0".parse::<MethodChoice>().is_err());
        assert!("hp:3".parse::<MethodChoice>().is_err());
        assert!("lasso".parse::<MethodChoice>().is_err());
    }

    #[test]
    fn parses_scaled_rule_and_defaults() {
        let cfg = config(
            r#"
            methods = ["hp", "bhp"]
            sample_sizes = [100]
            lambda_rule = { scaled = 1.6e-5 }
            [[dgps]]
            id = 6
            frequency = "quarterly"
            c = [3.0, 0.0]
            "#,
        );
        assert_eq!(cfg.replications, 1000);
        assert_eq!(cfg.cells().len(), 2);
        assert!((cfg.lambda_rule.lambda(Frequency::Quarterly, 100).unwrap() - 1600.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_configs() {
        let base = r#"
            methods = ["hp"]
            sample_sizes = [50]
            replications = 1
            [[dgps]]
            id = 1
            frequency = "quarterly"
        "#;
        assert!(BenchConfig::from_toml(base).is_err());
        let lur = base
            .replace("replications = 1", "")
            .replace("id = 1", "id = 6");
        assert!(BenchConfig::from_toml(&lur).is_err());
        let bad = base
            .replace("replications = 1", "")
            .replace("id = 1", "id = 11");
        assert!(BenchConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn oracle_cells_are_zero() {
        let cfg = config(
            r#"
            methods = ["oracle", "hp"]
            sample_sizes = [40]
            replications = 5
            workers = 2
            [[dgps]]
            id = 3
            frequency = "quarterly"
            "#,
        );
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.cells.len(), 2);
        assert_eq!(r.cells[0].mean_mse, 0.0);
        assert!(r.cells[1].mean_mse > 0.0 && r.cells[1].std_error > 0.0);
    }

    #[test]
    fn monthly_ar_startup_is_noted() {
        let cfg = config(
            r#"
            methods = ["ar"]
            sample_sizes = [60]
            replications = 3
            [[dgps]]
            id = 1
            frequency = "monthly"
            "#,
        );
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.notes.len(), 1);
        assert!(r.notes[0].contains("t = 13"));
    }

    #[test]
    fn markdown_layouts() {
        let cfg = config(
            r#"
            methods = ["hp", "bhp"]
            replications = 2
            [[dgps]]
            id = 1
            frequency = "quarterly"
            sample_sizes = [30, 40]
            [[dgps]]
            id = 1
            frequency = "monthly"
            sample_sizes = [50]
            "#,
        );
        let r = run_experiment(&cfg).unwrap();
        let md = render_report(&r, ReportFormat::Markdown);
        let lines: Vec<&str> = md.lines().collect();
        assert!(lines[0].contains("quarterly") && lines[0].contains("monthly"));
        assert_eq!(lines[2], "| DGP | n | HP | bHP | DGP | n | HP | bHP |");
        assert_eq!(lines.iter().filter(|l| l.starts_with("| 1 |")).count(), 2);
        assert!(lines[5].ends_with("| | | | |"));

        let mut empty = r.clone();
        empty.cells.clear();
        let md = render_report(&empty, ReportFormat::Markdown);
        assert_eq!(md.lines().filter(|l| l.starts_with('|')).count(), 2);
        let csv = render_report(&empty, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 1);
    }
}
