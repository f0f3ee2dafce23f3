//! Command-line driver: ingest, analyse, write the report and badges.
//!
//! Report path and a short summary go to stdout. Failures print one JSON
//! object `{"error", "message", "exit_code"}` to stderr and exit non-zero
//! (see [`Error::exit_code`]).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

use crate::annotation::{self, AnnotateOptions, AnnotationDocument, DependenceSection, Thresholds};
use crate::error::{Error, Result};
use crate::fixtures::{self, CASE_STUDIES, FIXTURES_ENV};
use crate::ingest::{load_dataset, AuditConfig, MissingPolicy};
use crate::render::{file_stem, render_badges};

#[derive(Debug, Parser)]
#[command(
    name = "biasgauge",
    version,
    about = "Annotate a tabular dataset with its discriminatory risk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit a delimited file, or a built-in stated population with --example.
    Annotate(Box<RunOptions>),
    /// Show which case-study dataset files are present in the fixture directory.
    Fixtures,
}

#[derive(Debug, Clone, Args, Default)]
pub struct RunOptions {
    /// Delimited text file to audit.
    pub input: Option<PathBuf>,

    /// TOML audit configuration; cannot be combined with the column flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub protected: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    /// Raw target value mapped to level 1.
    #[arg(long)]
    pub positive: Option<String>,
    /// Raw target value mapped to level 0; other values are then rejected.
    #[arg(long)]
    pub negative: Option<String>,
    #[arg(long, value_parser = ["drop-row", "as-category"])]
    pub missing_policy: Option<String>,
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Input has no header row; columns are zero-based indices.
    #[arg(long)]
    pub no_header: bool,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write the four SVG badges.
    #[arg(long)]
    pub badges: bool,
    #[arg(long)]
    pub low_prior_threshold: Option<f64>,
    #[arg(long)]
    pub skew_threshold: Option<f64>,

    /// Built-in example instead of an input file.
    #[arg(long)]
    pub example: Option<String>,
}

impl RunOptions {
    fn has_config_flags(&self) -> bool {
        self.protected.is_some()
            || self.target.is_some()
            || self.positive.is_some()
            || self.negative.is_some()
            || self.missing_policy.is_some()
            || self.delimiter.is_some()
            || self.no_header
    }

    /// Config from the file or from the flags, never a mix of both.
    pub fn audit_config(&self) -> Result<AuditConfig> {
        if let Some(path) = &self.config {
            if self.has_config_flags() {
                return Err(Error::InvalidConfig(
                    "--config cannot be combined with column or parsing flags".into(),
                ));
            }
            let text = std::fs::read_to_string(path).map_err(|source| Error::FileNotReadable {
                path: path.clone(),
                source,
            })?;
            return AuditConfig::from_toml_str(&text);
        }
        let required = |value: &Option<String>, flag: &str| {
            value
                .clone()
                .ok_or_else(|| Error::InvalidConfig(format!("{flag} is required")))
        };
        let mut config = AuditConfig::new(
            required(&self.protected, "--protected")?,
            required(&self.target, "--target")?,
            required(&self.positive, "--positive")?,
        );
        config.negative_label = self.negative.clone();
        if let Some(policy) = &self.missing_policy {
            config.missing_policy = policy.parse::<MissingPolicy>()?;
        }
        if let Some(d) = self.delimiter {
            config.delimiter = d;
        }
        config.has_header = !self.no_header;
        config.validate()?;
        Ok(config)
    }

    fn thresholds(&self) -> Result<Thresholds> {
        let mut t = Thresholds::default();
        for (value, slot, flag) in [
            (
                self.low_prior_threshold,
                &mut t.low_prior,
                "--low-prior-threshold",
            ),
            (self.skew_threshold, &mut t.skew, "--skew-threshold"),
        ] {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "{flag} must be in [0, 1], got {v}"
                    )));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

/// `created_at` override from `SOURCE_DATE_EPOCH`, for reproducible builds.
fn created_at_from_env() -> Option<DateTime<Utc>> {
    let secs: i64 = std::env::var("SOURCE_DATE_EPOCH")
        .ok()?
        .trim()
        .parse()
        .ok()?;
    DateTime::from_timestamp(secs, 0)
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: PathBuf,
    pub badges: Vec<PathBuf>,
    pub document: AnnotationDocument,
}

/// Build the document for the options without writing anything.
pub fn build_document(options: &RunOptions) -> Result<AnnotationDocument> {
    let annotate_options = AnnotateOptions {
        thresholds: options.thresholds()?,
        created_at: created_at_from_env(),
    };
    match (&options.example, &options.input) {
        (Some(_), Some(_)) => Err(Error::InvalidConfig(
            "give either an input file or --example, not both".into(),
        )),
        (None, None) => Err(Error::InvalidConfig(
            "an input file or --example is required".into(),
        )),
        (Some(name), None) => {
            if options.config.is_some() || options.has_config_flags() {
                return Err(Error::InvalidConfig(
                    "--example takes no column or parsing flags".into(),
                ));
            }
            run_example_document(name, &annotate_options)
        }
        (None, Some(path)) => {
            let config = options.audit_config()?;
            let dataset = load_dataset(path, &config)?;
            annotation::annotate(&dataset, &config, &annotate_options)
        }
    }
}

/// Document for a built-in stated population.
pub fn run_example_document(name: &str, options: &AnnotateOptions) -> Result<AnnotationDocument> {
    let population = fixtures::example(name)?;
    let tables = population.tables()?.to_f64();
    Ok(annotation::annotate_specified(
        population.name,
        &population.digest(),
        population.target_semantics,
        &tables,
        options,
    ))
}

fn write_atomic(dir: &Path, file_name: &str, contents: &str) -> Result<PathBuf> {
    let target = dir.join(file_name);
    let not_writable = |source| Error::OutputNotWritable {
        path: target.clone(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(not_writable)?;
    tmp.write_all(contents.as_bytes()).map_err(not_writable)?;
    tmp.persist(&target).map_err(|e| not_writable(e.error))?;
    Ok(target)
}

/// Build the document, then write badges (if asked) and the report.
///
/// Everything is rendered before the first write, and each file is replaced
/// atomically.
pub fn run_annotate(options: &RunOptions) -> Result<RunOutput> {
    let document = build_document(options)?;
    let report_text = annotation::serialize(&document)?;
    let badges = options.badges.then(|| render_badges(&document));

    std::fs::create_dir_all(&options.out).map_err(|source| Error::OutputNotWritable {
        path: options.out.clone(),
        source,
    })?;
    let mut badge_paths = Vec::new();
    if let Some(badges) = &badges {
        for (name, svg) in badges.files(&document.meta.name) {
            badge_paths.push(write_atomic(&options.out, &name, svg)?);
        }
    }
    let report_name = format!("{}.report.json", file_stem(&document.meta.name));
    let report = write_atomic(&options.out, &report_name, &report_text)?;
    Ok(RunOutput {
        report,
        badges: badge_paths,
        document,
    })
}

fn summary(output: &RunOutput, out: &mut impl Write) -> std::io::Result<()> {
    let doc = &output.document;
    writeln!(out, "report: {}", output.report.display())?;
    for badge in &output.badges {
        writeln!(out, "badge: {}", badge.display())?;
    }
    match doc.meta.n_rows {
        Some(n) => writeln!(out, "rows: {n}")?,
        None => writeln!(out, "rows: (stated population)")?,
    }
    match &doc.dependence {
        DependenceSection::Computed {
            contingency_coefficient,
            effect_size_w,
            magnitude,
            ..
        } => writeln!(
            out,
            "dependence: C = {}, w = {}, {}",
            contingency_coefficient.display, effect_size_w.display, magnitude
        )?,
        DependenceSection::NotComputable { reason } => {
            writeln!(out, "dependence: not computable ({reason})")?
        }
    }
    for warning in &doc.meta.warnings {
        writeln!(out, "warning: {warning}")?;
    }
    writeln!(out, "flags: {}", doc.flags.len())?;
    for flag in &doc.flags {
        writeln!(out, "  {flag}")?;
    }
    Ok(())
}

fn fixtures_status(out: &mut impl Write) -> std::io::Result<()> {
    match fixtures::fixture_dir() {
        None => writeln!(
            out,
            "{FIXTURES_ENV} is not set; run scripts/fetch_fixtures.py"
        )?,
        Some(dir) => {
            writeln!(out, "fixture directory: {}", dir.display())?;
            for study in CASE_STUDIES {
                let path = study.path_in(&dir);
                let state = if path.is_file() { "present" } else { "absent" };
                writeln!(out, "  {:<18} {:<8} {}", study.name, state, path.display())?;
            }
        }
    }
    Ok(())
}

fn report_error(err: &Error, stderr: &mut impl Write) -> u8 {
    let payload = serde_json::json!({
        "error": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    });
    let _ = writeln!(stderr, "{payload}");
    err.exit_code()
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let payload = serde_json::json!({
                "error": "UsageError",
                "message": e.to_string().trim_end(),
                "exit_code": 2,
            });
            let _ = writeln!(stderr, "{payload}");
            return 2;
        }
    };
    match cli.command {
        Command::Annotate(options) => match run_annotate(&options) {
            Ok(output) => {
                let _ = summary(&output, stdout);
                0
            }
            Err(e) => report_error(&e, stderr),
        },
        Command::Fixtures => {
            let _ = fixtures_status(stdout);
            0
        }
    }
}
