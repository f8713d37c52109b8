use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixsum::classify;
use mixsum::verify::{audit, DEFAULT_THRESHOLD};
use mixsum_cli::config::Config;
use mixsum_cli::record::Record;
use mixsum_cli::scan::{parse_range, OutputFormat, ScanJob};
use mixsum_cli::{build_form, render_report, render_verdict, verdict_exit_code, CliError};

const DEFAULT_VERIFY_BOUND: u64 = 100_000;

#[derive(Parser)]
#[command(name = "mixsum", version, about = "Almost universality of a x^2 + b y^2 + c P_m(z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one instance and print the condition trace.
    Classify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Classify, then compare with the brute-force oracle up to N.
    Verify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'N')]
        bound: Option<u64>,
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Classify (and audit when N > 0) every valid triple in a box.
    Scan {
        /// Inclusive range `lo..hi` or a single value.
        #[arg(short = 'a', value_parser = parse_range)]
        a: std::ops::RangeInclusive<i64>,
        #[arg(short = 'b', value_parser = parse_range)]
        b: std::ops::RangeInclusive<i64>,
        #[arg(short = 'c', value_parser = parse_range)]
        c: std::ops::RangeInclusive<i64>,
        #[arg(short = 'p')]
        p: i64,
        #[arg(short = 'k', default_value_t = 1)]
        k: u32,
        #[arg(short = 'N')]
        bound: Option<u64>,
        #[arg(short = 'o')]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::JsonLines)]
        format: OutputFormat,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Continue from `<output>.checkpoint.json` if it matches this job.
        #[arg(long)]
        resume: bool,
    },
}

#[derive(Args)]
struct FormArgs {
    #[arg(short = 'a', allow_negative_numbers = true)]
    a: i64,
    #[arg(short = 'b', allow_negative_numbers = true)]
    b: i64,
    #[arg(short = 'c', allow_negative_numbers = true)]
    c: i64,
    #[arg(short = 'p', allow_negative_numbers = true)]
    p: i64,
    #[arg(short = 'k', default_value_t = 1)]
    k: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, CliError> {
    path.map_or(Ok(Config::default()), |p| Config::load(p))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Classify { form, format } => {
            let f = build_form(form.a, form.b, form.c, form.p, form.k)?;
            let verdict = classify(&f)?;
            match format {
                ReportFormat::Text => print!("{}", render_verdict(&f, &verdict)),
                ReportFormat::Json => println!("{}", Record::from_parts(&f, &verdict, None).to_json_line()),
            }
            Ok(verdict_exit_code(verdict.kind))
        }
        Command::Verify { form, bound, threshold, config, format } => {
            let cfg = load_config(config.as_ref())?;
            let f = build_form(form.a, form.b, form.c, form.p, form.k)?;
            let bound = bound.or(cfg.bound).unwrap_or(DEFAULT_VERIFY_BOUND);
            let threshold = threshold.or(cfg.threshold).unwrap_or(DEFAULT_THRESHOLD);
            let verdict = classify(&f)?;
            let report = audit(&f, &verdict, bound, threshold)?;
            match format {
                ReportFormat::Text => print!("{}{}", render_verdict(&f, &verdict), render_report(&report)),
                ReportFormat::Json => {
                    println!("{}", Record::from_parts(&f, &verdict, Some(&report)).to_json_line())
                }
            }
            Ok(if report.consistent() { 0 } else { 1 })
        }
        Command::Scan { a, b, c, p, k, bound, output, format, threads, threshold, config, resume } => {
            let cfg = load_config(config.as_ref())?;
            let job = ScanJob {
                a,
                b,
                c,
                p,
                k,
                bound: bound.or(cfg.bound).unwrap_or(0),
                threshold: threshold.or(cfg.threshold).unwrap_or(DEFAULT_THRESHOLD),
                threads: threads
                    .or(cfg.threads)
                    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
                output,
                format,
            };
            let s = job.run(resume)?;
            eprintln!(
                "{} records ({} new): {} AlmostUniversal, {} NotAlmostUniversal, {} LocallyObstructed, {} inconsistent",
                s.records,
                s.written_now,
                s.almost_universal,
                s.not_almost_universal,
                s.locally_obstructed,
                s.inconsistent
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
