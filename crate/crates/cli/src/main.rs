//! `tbrkern`: kernelize TBR instances, compute exact distances, run the
//! verification suites and generate tight instances.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 internal invariant breach,
//! 3 verification failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tbrkern::maf::exact_tbr_distance;
use tbrkern::newick::format_instance;
use tbrkern::reduce::EligibilityMode;
use tbrkern::tight::tight_instance;
use tbrkern::verify::{run_suites, Suite, SuiteReport, VerifyConfig};
use tbrkern::{check_kernel_bound, kernel_bound_note, kernelize_with, read_instance, KernelConfig, Rule};

#[derive(Parser)]
#[command(
    name = "tbrkern",
    version,
    about = "TBR distance kernelization toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an instance to its kernel and record the reduction trace.
    Kernelize(KernelizeArgs),
    /// Exact TBR distance: kernelize, then solve the kernel exactly.
    Distance(DistanceArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
    /// Write the tight instance for a given k with its certificate.
    GenerateTight(TightArgs),
}

#[derive(Args)]
struct KernelFlags {
    /// Decide Operation P and Reduction 10 eligibility exactly on small
    /// instances instead of using the conservative catalog.
    #[arg(long)]
    exact_eligibility: bool,
    /// Never fire this rule (repeatable). Meant for fault injection.
    #[arg(long = "skip-rule", value_name = "RULE")]
    skip_rule: Vec<Rule>,
}

impl KernelFlags {
    fn config(&self) -> KernelConfig {
        let mut cfg = if self.exact_eligibility {
            KernelConfig::exact(EligibilityMode::DEFAULT_CAP)
        } else {
            KernelConfig::default()
        };
        cfg.skip = self.skip_rule.clone();
        cfg
    }
}

#[derive(Args)]
struct KernelizeArgs {
    /// Instance file: two Newick lines.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the kernel pair. Printed to standard output if absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Where to write the JSON trace. Defaults to `<output>.trace.json`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the JSON trace instead of the text summary.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    kernel: KernelFlags,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    input: PathBuf,
    /// Largest distance to search for.
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Where to write the certificate JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print only the certificate JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    kernel: KernelFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated suites to run; all by default.
    #[arg(long, value_delimiter = ',')]
    suites: Vec<Suite>,
    /// Where to write the reports as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print the reports as JSON instead of a table.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    kernel: KernelFlags,
}

#[derive(Args)]
struct TightArgs {
    #[arg(long)]
    k: usize,
    /// Where to write the instance. The certificate goes to
    /// `<out>.cert.json`. Both are printed if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the certificate JSON instead of the text summary.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Input(String),
    Invariant(String),
    Verification,
}

impl From<tbrkern::Error> for Failure {
    fn from(e: tbrkern::Error) -> Self {
        match e {
            tbrkern::Error::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Appends one line to the command's standard output buffer.
macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {{
        $out.push_str(&format!($($arg)*));
        $out.push('\n');
    }};
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn cmd_kernelize(a: &KernelizeArgs, out: &mut String) -> CmdResult {
    let (t, tp) = read_instance(&a.input)?;
    let result = kernelize_with(&t, &tp, &a.kernel.config())?;
    let trace = result.trace_file().to_json();
    let kernel = format_instance(result.t(), result.tp());
    if let Some(path) = &a.output {
        write_file(path, &kernel)?;
    }
    if let Some(path) = a
        .trace
        .clone()
        .or_else(|| a.output.as_deref().map(|o| with_suffix(o, ".trace.json")))
    {
        write_file(&path, &trace)?;
    }
    if a.json {
        emit!(out, "{trace}");
        return Ok(());
    }
    emit!(
        out,
        "kernel_taxa={} offset={}",
        result.kernel_taxa,
        result.offset
    );
    emit!(
        out,
        "original_taxa={} events={}",
        result.original_taxa,
        result.trace.len()
    );
    if a.output.is_none() {
        out.push_str(&kernel);
    }
    Ok(())
}

#[derive(Serialize)]
struct DistanceReport {
    distance: Option<usize>,
    k_max: usize,
    offset: usize,
    kernel: [String; 2],
    kernel_taxa: usize,
    /// Distance of the kernel pair; `distance = kernel_distance + offset`.
    kernel_distance: Option<usize>,
    /// Agreement forest of the kernel pair with `kernel_distance + 1` blocks.
    kernel_forest: Option<Vec<Vec<String>>>,
    /// Whether the kernel meets the size bound for `kernel_distance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_bound_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_bound_note: Option<&'static str>,
}

fn cmd_distance(a: &DistanceArgs, out: &mut String) -> CmdResult {
    let (t, tp) = read_instance(&a.input)?;
    let result = kernelize_with(&t, &tp, &a.kernel.config())?;
    let cert = match a.k_max.checked_sub(result.offset) {
        Some(budget) => exact_tbr_distance(result.t(), result.tp(), budget)?,
        None => None,
    };
    let report = DistanceReport {
        distance: cert.as_ref().map(|c| c.k + result.offset),
        k_max: a.k_max,
        offset: result.offset,
        kernel: [result.t().to_newick(), result.tp().to_newick()],
        kernel_taxa: result.kernel_taxa,
        kernel_distance: cert.as_ref().map(|c| c.k),
        kernel_forest: cert.as_ref().map(|c| {
            c.forest
                .blocks
                .iter()
                .map(|b| b.iter().map(|x| x.to_string()).collect())
                .collect()
        }),
        kernel_bound_holds: cert.as_ref().map(|c| check_kernel_bound(&result, c.k)),
        kernel_bound_note: cert.as_ref().and_then(|c| kernel_bound_note(c.k)),
    };
    let json = to_json(&report);
    if let Some(path) = &a.output {
        write_file(path, &json)?;
    }
    if a.json {
        emit!(out, "{json}");
    } else {
        match report.distance {
            Some(d) => emit!(out, "{d}"),
            None => emit!(out, "exceeds k_max"),
        }
        emit!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    }
    Ok(())
}

fn print_table(reports: &[SuiteReport], out: &mut String) {
    emit!(
        out,
        "{:<12} {:<6} {:>8} {:>8}  summary",
        "suite",
        "status",
        "checked",
        "failures"
    );
    for r in reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        emit!(
            out,
            "{:<12} {:<6} {:>8} {:>8}  {}",
            r.suite.name(),
            status,
            r.checked,
            r.failures,
            r.summary
        );
    }
    for r in reports {
        if let Some(c) = &r.counterexample {
            out.push('\n');
            emit!(out, "# counterexample for {}: {}", r.suite, c.note);
            emit!(out, "{}", c.t);
            emit!(out, "{}", c.tp);
        }
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut String) -> CmdResult {
    let suites = if a.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suites.clone()
    };
    let cfg = VerifyConfig {
        seed: a.seed,
        kernel: a.kernel.config(),
    };
    let reports = run_suites(&suites, &cfg)?;
    let json = to_json(&reports);
    if let Some(path) = &a.output {
        write_file(path, &json)?;
    }
    if a.json {
        emit!(out, "{json}");
    } else {
        print_table(&reports, out);
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct TightCertificate {
    k: usize,
    taxa: usize,
    character: BTreeMap<String, u8>,
    #[serde(rename = "lf_T")]
    lf_t: usize,
    #[serde(rename = "lf_Tprime")]
    lf_tprime: usize,
    forest_blocks: Vec<Vec<String>>,
}

fn cmd_generate_tight(a: &TightArgs, out: &mut String) -> CmdResult {
    let ti = tight_instance(a.k)?;
    let instance = format_instance(&ti.t, &ti.tp);
    let cert = TightCertificate {
        k: ti.k,
        taxa: ti.t.num_taxa(),
        character: ti
            .t
            .taxa()
            .map(|x| (x.to_string(), ti.character.get(x.as_str()).unwrap_or(0)))
            .collect(),
        lf_t: ti.lf_t,
        lf_tprime: ti.lf_tprime,
        forest_blocks: ti
            .forest
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect())
            .collect(),
    };
    let json = to_json(&cert);
    match &a.out {
        Some(path) => {
            write_file(path, &instance)?;
            write_file(&with_suffix(path, ".cert.json"), &json)?;
        }
        None if !a.json => out.push_str(&instance),
        None => {}
    }
    if a.json {
        emit!(out, "{json}");
    } else {
        emit!(
            out,
            "k={} taxa={} lf_T={} lf_Tprime={} forest_blocks={}",
            cert.k,
            cert.taxa,
            cert.lf_t,
            cert.lf_tprime,
            cert.forest_blocks.len()
        );
    }
    Ok(())
}

fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("TBRKERN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("TBRKERN_THREADS must be a number, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let outcome = init_threads().and_then(|()| match &cli.command {
        Command::Kernelize(a) => cmd_kernelize(a, &mut out),
        Command::Distance(a) => cmd_distance(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::GenerateTight(a) => cmd_generate_tight(a, &mut out),
    });
    // A closed pipe downstream (e.g. `| head`) is not an error.
    if let Err(e) = io::stdout().lock().write_all(out.as_bytes()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
            return ExitCode::from(1);
        }
    }
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}
