mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_char, parse_label, parse_n_list, parse_range, Format, NValues, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "rayzeta", version, about = "Ray class partial zeta values at s = 0 for real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partial zeta values ζ_q(0, c_{C,D}) for single fields.
    Zeta(Flags),
    /// Quasi-polynomial closed forms over a family.
    Family(Flags),
    /// L(0, χ) over a family, as a combination of character values.
    Lfunc(Flags),
    /// Run the acceptance criteria.
    Verify(Flags),
}

#[derive(clap::Args, Default)]
struct Flags {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset family name.
    #[arg(long, visible_alias = "delta-family")]
    preset: Option<String>,
    /// f(x) of an inline family, e.g. "x^2+2".
    #[arg(long)]
    f_poly: Option<String>,
    /// Period polynomials of an inline family, comma separated.
    #[arg(long, value_delimiter = ',')]
    a_polys: Option<Vec<String>>,
    /// First n of an inline family.
    #[arg(long)]
    n_min: Option<u64>,
    /// Use the maximal order of Q(√radicand) instead of a family member.
    #[arg(long)]
    radicand: Option<String>,
    /// Family parameters, e.g. "1..10" or "1,3,5".
    #[arg(long)]
    n: Option<String>,
    /// Modulus; verify accepts a comma separated list.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<u64>>,
    /// Inclusive k range for the fitted oracle, e.g. "0..6".
    #[arg(long)]
    k_range: Option<String>,
    /// Restrict to one label "C,D".
    #[arg(long)]
    label: Option<String>,
    /// "trivial" or "MOD:ORDER:G=E,...".
    #[arg(long = "char")]
    character: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Single criterion id for verify, e.g. A5.
    #[arg(long)]
    criterion: Option<String>,
    /// Largest family parameter used by verify.
    #[arg(long)]
    n_max: Option<u64>,
    /// Cap on λm; RAYZETA_MAX_TERMS takes precedence.
    #[arg(long)]
    max_terms: Option<u64>,
    /// Decimals in approximate complex values.
    #[arg(long)]
    digits: Option<usize>,
}

impl Flags {
    fn merge(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if self.$f.is_some() { cfg.$f = self.$f; } )* };
        }
        over!(preset, f_poly, a_polys, n_min, radicand, q, out, format, criterion, n_max, max_terms, digits);
        if let Some(n) = &self.n {
            parse_n_list(n)?;
            cfg.n = Some(NValues::Text(n.clone()));
        }
        if let Some(k) = &self.k_range {
            cfg.k_range = Some(parse_range(k)?);
        }
        if let Some(l) = &self.label {
            cfg.label = Some(parse_label(l)?);
        }
        if let Some(c) = &self.character {
            let q = cfg.q.as_deref().and_then(|qs| qs.first().copied());
            cfg.character = Some(parse_char(c, q)?);
        }
        Ok(cfg)
    }
}

fn write_output(cfg: &RunConfig, out: &commands::Output) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match cfg.format.unwrap_or_default() {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &out.json).map_err(std::io::Error::from)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&out.columns).map_err(csv_io)?;
            for row in &out.rows {
                w.write_record(row).map_err(csv_io)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

type Handler = fn(&RunConfig) -> Result<commands::Output, CliError>;

fn run(cli: Cli) -> Result<i32, CliError> {
    let (flags, cmd): (Flags, Handler) = match cli.command {
        Command::Zeta(f) => (f, commands::zeta),
        Command::Family(f) => (f, commands::family),
        Command::Lfunc(f) => (f, commands::lfunc),
        Command::Verify(f) => (f, commands::verify_cmd),
    };
    let cfg = flags.merge()?;
    let out = cmd(&cfg)?;
    match write_output(&cfg, &out) {
        // A closed downstream pipe (e.g. `| head`) is not an error.
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        r => r?,
    }
    Ok(out.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_CONFIG as u8 } else { 0 });
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
