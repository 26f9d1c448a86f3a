//! Command-line front end: argument parsing, table emission and exit codes.

pub mod checks;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::engine::{engine_for, z_table, Group, InvariantTable, LatticeSetup, TableRequest, Target};
use crate::error::Error;
use crate::forms::{basic_form, FormName};
use crate::maass::{hurwitz_table, MaassData};
use crate::qseries::rational::format_rational;
use crate::qseries::{Coeff, LinearForm, Rational};

use checks::{run_suite, CheckOptions, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MISSING: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "uplane",
    version,
    about = "Exact Donaldson-invariant generating functions from evaluated u-plane integrals"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a table of invariant coefficients.
    Dtable(DtableArgs),
    /// Print the q-expansion of a modular form.
    Forms(FormsArgs),
    /// Print non-zero Hurwitz class numbers.
    Hurwitz(HurwitzArgs),
    /// Run an invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Numeric,
    Symbolic,
    /// Numeric, falling back to symbolic when a tabulated coefficient is missing.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct DtableArgs {
    #[arg(long, value_parser = parse_target)]
    pub target: Target,
    #[arg(long, value_parser = parse_group, default_value = "su2")]
    pub group: Group,
    #[arg(long, default_value_t = 2)]
    pub max_p: u32,
    #[arg(long, default_value_t = 5)]
    pub max_kappa: u32,
    /// Highest power of mu kept on the blowup.
    #[arg(long, default_value_t = 6)]
    pub mu_degree: u32,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Window in q^(1/8) steps, overriding the precision plan.
    #[arg(long)]
    pub precision: Option<i64>,
    /// Extra H_l / R_n values, one `<symbol> <value>` per line.
    #[arg(long, env = "UPLANE_DATA")]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FormsArgs {
    #[arg(long, value_parser = parse_form)]
    pub name: FormName,
    /// Largest power of q printed.
    #[arg(long, default_value_t = 4)]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct HurwitzArgs {
    /// Largest discriminant printed.
    #[arg(long, default_value_t = 50)]
    pub max: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Include the SO(3) chamber-difference grid in the wallcross suite.
    #[arg(long)]
    pub so3: bool,
    /// Print a JSON summary instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write every evaluated wall term to this CSV file.
    #[arg(long)]
    pub walls_csv: Option<PathBuf>,
    #[arg(long, env = "UPLANE_DATA")]
    pub data: Option<PathBuf>,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_form(s: &str) -> Result<FormName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One emitted table cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub target: String,
    pub group: String,
    pub mode: String,
    pub indices: Vec<u32>,
    pub value: String,
    pub precision_used: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub target: String,
    pub group: String,
    pub mode: String,
    pub precision: i64,
    pub index_names: Vec<String>,
    pub convention: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDocument {
    pub meta: TableMeta,
    pub rows: Vec<OutputRecord>,
}

/// Converts a computed table into its serialisable form.
pub fn table_document<C: Coeff>(table: &InvariantTable<C>, mode: &str) -> TableDocument {
    let target = table.setup.target.to_string();
    let group = table.group.to_string();
    let rows = table
        .entries
        .iter()
        .map(|(k, v)| OutputRecord {
            target: target.clone(),
            group: group.clone(),
            mode: mode.to_string(),
            indices: k.clone(),
            value: v.render(),
            precision_used: table.precision,
        })
        .collect();
    TableDocument {
        meta: TableMeta {
            target,
            group,
            mode: mode.to_string(),
            precision: table.precision,
            index_names: table.index_names.iter().map(|s| s.to_string()).collect(),
            convention: table.convention.to_string(),
        },
        rows,
    }
}

pub fn render_text(doc: &TableDocument) -> String {
    let mut header: Vec<String> = doc.meta.index_names.clone();
    header.push("value".to_string());
    let mut rows: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|r| {
            let mut cells: Vec<String> = r.indices.iter().map(u32::to_string).collect();
            cells.push(r.value.clone());
            cells
        })
        .collect();
    rows.insert(0, header);
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = format!(
        "# {} {} {} precision={} {}\n",
        doc.meta.target, doc.meta.group, doc.meta.mode, doc.meta.precision, doc.meta.convention
    );
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c + 1 == r.len() {
                    s.clone()
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render_csv(doc: &TableDocument) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["target".to_string(), "group".to_string(), "mode".to_string()];
    header.extend(doc.meta.index_names.iter().cloned());
    header.extend(["value".to_string(), "precision_used".to_string()]);
    w.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
    for r in &doc.rows {
        let mut rec = vec![r.target.clone(), r.group.clone(), r.mode.clone()];
        rec.extend(r.indices.iter().map(u32::to_string));
        rec.extend([r.value.clone(), r.precision_used.to_string()]);
        w.write_record(&rec).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render_json(doc: &TableDocument) -> Result<String, Error> {
    serde_json::to_string_pretty(doc)
        .map(|s| s + "\n")
        .map_err(|e| Error::Parse(e.to_string()))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MissingCoefficient(_) => EXIT_MISSING,
        Error::InsufficientPrecision(_) => EXIT_PRECISION,
        _ => EXIT_FAILURE,
    }
}

fn load_data(path: Option<&PathBuf>) -> Result<MaassData, Error> {
    match path {
        Some(p) => MaassData::load(p),
        None => Ok(MaassData::default()),
    }
}

/// Computes the table document for a `dtable` request.
pub fn dtable(args: &DtableArgs, err: &mut (dyn Write + Send)) -> Result<TableDocument, Error> {
    let data = load_data(args.data.as_ref())?;
    let setup = LatticeSetup::for_target(args.target, args.group);
    let req = TableRequest {
        max_p: args.max_p,
        max_kappa: args.max_kappa,
        mu_degree: args.mu_degree,
        precision: args.precision,
    };
    let engine = engine_for(&setup, &req, data)?;
    match args.mode {
        Mode::Numeric => Ok(table_document(
            &z_table::<Rational>(&engine, &setup, args.group, &req)?,
            "numeric",
        )),
        Mode::Symbolic => Ok(table_document(
            &z_table::<LinearForm>(&engine, &setup, args.group, &req)?,
            "symbolic",
        )),
        Mode::Auto => match z_table::<Rational>(&engine, &setup, args.group, &req) {
            Ok(t) => Ok(table_document(&t, "numeric")),
            Err(Error::MissingCoefficient(sym)) => {
                let _ = writeln!(
                    err,
                    "note: {sym} is not tabulated; emitting the table symbolically in the tabulated coefficients"
                );
                Ok(table_document(
                    &z_table::<LinearForm>(&engine, &setup, args.group, &req)?,
                    "symbolic",
                ))
            }
            Err(e) => Err(e),
        },
    }
}

/// `forms --name N --order K`: exponent/coefficient pairs up to `q^K`.
pub fn forms_line(name: FormName, order: u32) -> Result<String, Error> {
    let prec = 8 * order as i64 + 1;
    Ok(basic_form(name, prec)?.truncate(prec).render_pairs())
}

pub fn hurwitz_lines(max: u64) -> String {
    hurwitz_table(max + 1)
        .iter()
        .enumerate()
        .filter(|(_, h)| !num_traits::Zero::is_zero(*h))
        .map(|(n, h)| format!("{n} {}\n", format_rational(h)))
        .collect()
}

fn run_check(args: &CheckArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, Error> {
    let opts = CheckOptions {
        so3: args.so3,
        data: load_data(args.data.as_ref())?,
    };
    let report = run_suite(args.suite, &opts);
    if let Some(path) = &args.walls_csv {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        for row in &report.walls {
            w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    }
    if args.json {
        let s = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
        let _ = writeln!(out, "{s}");
    } else {
        let passed = report.cases.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{}: {passed}/{} passed", args.suite, report.cases.len());
        for note in &report.notes {
            let _ = writeln!(out, "note: {note}");
        }
    }
    if let Some(f) = report.first_failure() {
        let _ = writeln!(err, "FAILED {}: {}", f.name, f.detail);
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, Error> {
    match &cli.command {
        Command::Dtable(args) => {
            let doc = dtable(args, err)?;
            let text = match args.format {
                Format::Text => render_text(&doc),
                Format::Csv => render_csv(&doc)?,
                Format::Json => render_json(&doc)?,
            };
            let _ = out.write_all(text.as_bytes());
            Ok(EXIT_OK)
        }
        Command::Forms(args) => {
            let _ = writeln!(out, "{}", forms_line(args.name, args.order)?);
            Ok(EXIT_OK)
        }
        Command::Hurwitz(args) => {
            let _ = out.write_all(hurwitz_lines(args.max).as_bytes());
            Ok(EXIT_OK)
        }
        Command::Check(args) => run_check(args, out, err),
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `out` and `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let pool = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    match pool.install(|| dispatch(&cli, out, err)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
