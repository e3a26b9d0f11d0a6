//! The `pcgroup` command line. [`run_cli`] does all the work and returns the
//! exit status with the captured output, so the binary stays a thin shell
//! and tests can drive the CLI in-process.
//!
//! Exit status: 0 when every check passed, 1 when a check failed (including
//! an inconsistent presentation where a group is required), 2 for usage,
//! I/O and parse errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::collector::{GroupError, PcGroup};
use crate::identities::{run_identity_suite, IdentityId, CATALOG};
use crate::presentation::{
    instantiate_parameter, parse_presentation, serialize_presentation, validate_structure, Family,
    PcPresentation,
};
use crate::series::lower_central_series;
use crate::subgroups::verify_pn;
use crate::verifier::verify_paper;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Lines,
}

#[derive(Debug, Parser)]
#[command(name = "pcgroup", version, about = "Finite p-groups given by power-commutator presentations")]
struct Cli {
    /// Human-readable text or one record per line.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural diagnostics and the consistency report.
    Check { file: PathBuf },
    /// Group order.
    Order { file: PathBuf },
    /// Nilpotency class and lower central series.
    Class { file: PathBuf },
    /// Maximal subgroups with their orders and classes.
    Maximals { file: PathBuf },
    /// Decide membership in P_n.
    VerifyPn {
        file: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Randomized identity checks.
    Identities {
        file: PathBuf,
        /// Comma-separated identity names; all by default.
        #[arg(long, value_delimiter = ',')]
        ids: Vec<String>,
        /// Trials per identity; per-identity defaults otherwise.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reproduce the claims about both built-in families.
    VerifyPaper {
        #[arg(long, default_value_t = 3)]
        n2: u32,
        #[arg(long, default_value_t = 2)]
        n3: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a built-in presentation.
    Builtin {
        family: Family,
        #[arg(long)]
        n: u32,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        CliOutput { code: 0, stdout, stderr: String::new() }
    }

    fn with_code(code: i32, stdout: String) -> Self {
        CliOutput { code, stdout, stderr: String::new() }
    }

    fn usage(stderr: impl Into<String>) -> Self {
        CliOutput { code: 2, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { CliOutput::usage(text) } else { CliOutput::ok(text) };
        }
    };
    match run(cli.command, cli.format) {
        Ok(out) => out,
        Err(out) => out,
    }
}

fn load(file: &PathBuf) -> Result<PcPresentation, CliOutput> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliOutput::usage(format!("cannot read {}: {e}\n", file.display())))?;
    parse_presentation(&text).map_err(|diags| {
        let mut msg = String::new();
        for d in diags {
            let _ = writeln!(msg, "{}: {d}", file.display());
        }
        CliOutput::usage(msg)
    })
}

fn group_error(e: GroupError) -> CliOutput {
    let code = match e {
        GroupError::Invalid(_) => 2,
        _ => 1,
    };
    CliOutput { code, stdout: String::new(), stderr: format!("{e}\n") }
}

fn load_group(file: &PathBuf) -> Result<PcGroup, CliOutput> {
    PcGroup::new(load(file)?).map_err(group_error)
}

/// Loads a group and insists on consistency.
fn load_consistent(file: &PathBuf) -> Result<PcGroup, CliOutput> {
    let group = load_group(file)?;
    group.group_order().map_err(group_error)?;
    Ok(group)
}

fn run(command: Command, format: Format) -> Result<CliOutput, CliOutput> {
    let lines = format == Format::Lines;
    match command {
        Command::Check { file } => {
            let pres = load(&file)?;
            let mut out = String::new();
            for d in validate_structure(&pres) {
                let _ = writeln!(out, "{d}");
            }
            let group = PcGroup::new(pres).map_err(group_error)?;
            let report = group.check_consistency();
            out.push_str(&report.render(&group));
            Ok(CliOutput::with_code(if report.consistent { 0 } else { 1 }, out))
        }
        Command::Order { file } => {
            let group = load_consistent(&file)?;
            let order = group.group_order().map_err(group_error)?;
            Ok(CliOutput::ok(if lines { format!("order {order}\n") } else { format!("{order}\n") }))
        }
        Command::Class { file } => {
            let group = load_consistent(&file)?;
            let series = lower_central_series(&group, &group.generators()).map_err(|e| group_error(e.into()))?;
            let mut out = format!("class {}\n", series.class());
            if lines {
                for (k, o) in series.orders().iter().enumerate() {
                    let _ = writeln!(out, "term {} order {o}", k + 1);
                }
            } else {
                out.push_str(&series.render_table());
            }
            Ok(CliOutput::ok(out))
        }
        Command::Maximals { file } => {
            let group = load_consistent(&file)?;
            let verdict = verify_pn(&group, 1).map_err(group_error)?;
            let mut out = String::new();
            if lines {
                for (k, m) in verdict.per_maximal.iter().enumerate() {
                    let _ = writeln!(out, "maximal {} order {} class {}", k + 1, m.order, m.class);
                }
            } else {
                let _ = writeln!(out, "d(G) = {}, {} maximal subgroups", verdict.minimal_generators, verdict.maximal_count);
                for (k, m) in verdict.per_maximal.iter().enumerate() {
                    let gens: Vec<String> = m.generators.iter().map(|g| group.format_element(g)).collect();
                    let _ = writeln!(out, "  M{} order {} class {} generated by <{}>", k + 1, m.order, m.class, gens.join(", "));
                }
            }
            Ok(CliOutput::ok(out))
        }
        Command::VerifyPn { file, n } => {
            let group = load_consistent(&file)?;
            let verdict = verify_pn(&group, n).map_err(group_error)?;
            Ok(CliOutput::ok(if lines { verdict.render_lines() } else { format!("{verdict}\n") }))
        }
        Command::Identities { file, ids, trials, seed } => {
            let ids: Vec<IdentityId> = if ids.is_empty() {
                CATALOG.to_vec()
            } else {
                ids.iter()
                    .map(|s| s.parse::<IdentityId>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliOutput::usage(format!("{e}\n")))?
            };
            if trials == Some(0) {
                return Err(CliOutput::usage("--trials must be at least 1\n"));
            }
            let group = load_consistent(&file)?;
            let id = file.display().to_string();
            let report = run_identity_suite(&group, &id, &ids, trials, seed).map_err(group_error)?;
            let out = if lines { report.render_lines(&group) } else { report.render_text(&group) };
            Ok(CliOutput::with_code(if report.passed() { 0 } else { 1 }, out))
        }
        Command::VerifyPaper { n2, n3, seed } => {
            let report = verify_paper(n2, n3, seed).map_err(|e| CliOutput::usage(format!("{e}\n")))?;
            let out = if lines { report.render_lines() } else { report.render_text() };
            Ok(CliOutput::with_code(if report.passed() { 0 } else { 1 }, out))
        }
        Command::Builtin { family, n, out } => {
            let inst = instantiate_parameter(family, n).map_err(|e| CliOutput::usage(format!("{e}\n")))?;
            let text = serialize_presentation(&inst.presentation);
            let mut stderr = String::new();
            for w in &inst.warnings {
                let _ = writeln!(stderr, "{w}");
            }
            let stdout = match out {
                Some(path) => {
                    std::fs::write(&path, &text)
                        .map_err(|e| CliOutput::usage(format!("cannot write {}: {e}\n", path.display())))?;
                    format!("wrote {}\n", path.display())
                }
                None => text,
            };
            Ok(CliOutput { code: 0, stdout, stderr })
        }
    }
}
