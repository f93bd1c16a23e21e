use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use eprkit::channel::{self, ChannelMap};
use eprkit::io::{self, Object, Report, SerializedObject};
use eprkit::linalg::{self, ComplexMatrix};
use eprkit::modular;
use eprkit::smap::{self, Direction, Party};
use eprkit::states::{self, Seed};
use eprkit::teleport::{self, Ancilla, MeasurementBasis};
use eprkit::verify::{self, VerifyConfig};
use eprkit::{DensityOperator, Error, PureState};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "eprkit", version, about = "Bipartite vectors, EPR channels and teleportation")]
pub struct Cli {
    /// Human-readable tables instead of JSON Lines.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Schmidt coefficients and entanglement class of a bipartite state.
    Schmidt {
        state: PathBuf,
        /// Also save the decomposition here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Antilinear s-map of a bipartite state.
    Smap {
        state: PathBuf,
        #[arg(long, default_value = "ba", value_parser = parse_direction)]
        direction: Direction,
    },
    /// Channel maps built from bipartite density operators.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Lüders update after confirming a vector on the first factor.
    Measure {
        state: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        /// Save the post-measurement operator here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Teleportation outcomes and Werner sweeps.
    #[command(subcommand)]
    Teleport(TeleportCommand),
    /// Modular conjugation, modular operator, S and their relations.
    Modular { state: PathBuf },
    /// Seeded randomized checks of every identity the library relies on.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
enum ChannelCommand {
    /// Channel map of a bipartite density operator.
    Build {
        density: PathBuf,
        #[arg(long, default_value = "ba", value_parser = parse_direction)]
        direction: Direction,
    },
    /// Apply a channel to an operator.
    Apply { channel: PathBuf, operator: PathBuf },
    /// Apply the dual of a channel to an operator.
    Dual { channel: PathBuf, operator: PathBuf },
}

#[derive(Debug, Subcommand)]
enum TeleportCommand {
    /// All outcomes of one teleportation run.
    Run(RunArgs),
    /// Outcome table over Werner ancillas, as CSV.
    Sweep {
        #[arg(long = "werner-p", value_delimiter = ',', required = true)]
        werner_p: Vec<f64>,
        /// Input qubit; defaults to |0⟩.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ancilla: PathBuf,
    /// `bell` or a basis file.
    #[arg(long, default_value = "bell")]
    basis: String,
    /// `derive`, or a file of unitary operators, one per outcome.
    #[arg(long)]
    corrections: Option<String>,
    #[arg(long, env = "EPRKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of outcomes to sample.
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Every invariant suite.
    All {
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "EPRKIT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
            if a == 0 || b == 0 {
                return Err("dims must be positive".into());
            }
            Ok((a, b))
        }
        _ => Err(format!("expected two comma separated dims, got {s:?}")),
    }
}

/// What a command hands back to `main`.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::SchemaVersion { .. } => EXIT_PARSE,
        Error::Io(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::WrongArity { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_FAILURE,
    }
}

pub fn run(cli: Cli) -> Result<Outcome, Error> {
    let mut out = Printer::new(cli.pretty);
    let code = match cli.command {
        Command::Schmidt { state, out: path } => schmidt(&mut out, &state, path.as_deref())?,
        Command::Smap { state, direction } => {
            let psi = load_pure(&state)?;
            out.object(&Object::AntilinearMap(smap::smap(&psi, direction)?), &[("direction", direction.to_string())]);
            0
        }
        Command::Channel(cmd) => channel_command(&mut out, cmd)?,
        Command::Measure { state, vector, out: path } => measure(&mut out, &state, &vector, path.as_deref())?,
        Command::Teleport(TeleportCommand::Run(args)) => teleport_run(&mut out, args)?,
        Command::Teleport(TeleportCommand::Sweep { werner_p, input }) => sweep(&mut out, &werner_p, input.as_deref())?,
        Command::Modular { state } => modular_command(&mut out, &state)?,
        Command::Verify(VerifyCommand::All { dims, trials, seed }) => verify_all(&mut out, dims, trials, seed),
    };
    Ok(Outcome {
        stdout: out.text,
        code,
    })
}

struct Printer {
    pretty: bool,
    text: String,
}

impl Printer {
    fn new(pretty: bool) -> Self {
        Self {
            pretty,
            text: String::new(),
        }
    }

    fn object(&mut self, object: &Object, meta: &[(&str, String)]) {
        let mut record = SerializedObject::from_object(object);
        for (k, v) in meta {
            record = record.with_meta(k, v);
        }
        if self.pretty {
            self.pretty_object(object, &record);
        } else {
            self.text.push_str(&record.to_json_line());
            self.text.push('\n');
        }
    }

    fn pretty_object(&mut self, object: &Object, record: &SerializedObject) {
        let _ = writeln!(self.text, "{} {:?}", record.kind, record.dims);
        for (k, v) in &record.meta {
            if k != "columns" {
                let _ = writeln!(self.text, "  {k}: {v}");
            }
        }
        match object {
            Object::Report(report) => self.table(report),
            Object::Operator(m) => self.matrix(m),
            Object::AntilinearMap(s) => self.matrix(s.kmatrix()),
            Object::Density(rho) => self.matrix(rho.matrix()),
            Object::PureState(psi) => {
                for z in psi.amplitudes().iter() {
                    let _ = writeln!(self.text, "  {}", complex(z.re, z.im));
                }
            }
            Object::Schmidt(d) => {
                for (j, p) in d.coefficients.iter().enumerate() {
                    let _ = writeln!(self.text, "  p[{j}] = {}", sig17(*p));
                }
            }
            Object::Channel(ch) => {
                for (i, k) in ch.kraus().iter().enumerate() {
                    let _ = writeln!(self.text, "  K[{i}]");
                    self.matrix(k.kmatrix());
                }
            }
            Object::Basis(b) => {
                for (i, v) in b.vectors().iter().enumerate() {
                    let entries: Vec<String> = v.amplitudes().iter().map(|z| complex(z.re, z.im)).collect();
                    let _ = writeln!(self.text, "  [{i}] {}", entries.join("  "));
                }
            }
        }
    }

    fn matrix(&mut self, m: &ComplexMatrix) {
        for r in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|c| complex(m[(r, c)].re, m[(r, c)].im)).collect();
            let _ = writeln!(self.text, "  {}", row.join("  "));
        }
    }

    fn table(&mut self, report: &Report) {
        let cells: Vec<Vec<String>> = report.rows.iter().map(|r| r.iter().map(|&x| sig17(x)).collect()).collect();
        let widths: Vec<usize> = report
            .columns
            .iter()
            .enumerate()
            .map(|(c, name)| cells.iter().map(|r| r[c].len()).chain([name.len()]).max().unwrap_or(0))
            .collect();
        let header: Vec<String> = report.columns.iter().zip(&widths).map(|(n, w)| format!("{n:>w$}")).collect();
        let _ = writeln!(self.text, "  {}", header.join("  "));
        for row in cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
            let _ = writeln!(self.text, "  {}", line.join("  "));
        }
    }

    fn line(&mut self, s: &str) {
        self.text.push_str(s);
        self.text.push('\n');
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex(re: f64, im: f64) -> String {
    format!("{re:+.6}{im:+.6}i")
}

fn load_one(path: &Path) -> Result<Object, Error> {
    io::load(path)
}

fn wrong_kind(path: &Path, expected: &str, found: &Object) -> Error {
    Error::InvalidArgument(format!("{}: expected {expected}, found {}", path.display(), found.kind()))
}

fn load_pure(path: &Path) -> Result<PureState, Error> {
    match load_one(path)? {
        Object::PureState(p) => Ok(p),
        other => Err(wrong_kind(path, "pure_state", &other)),
    }
}

fn load_density(path: &Path) -> Result<DensityOperator, Error> {
    match load_one(path)? {
        Object::Density(rho) => Ok(rho),
        Object::PureState(p) => p.density(),
        other => Err(wrong_kind(path, "density or pure_state", &other)),
    }
}

fn load_operator(path: &Path) -> Result<ComplexMatrix, Error> {
    match load_one(path)? {
        Object::Operator(m) => Ok(m),
        Object::Density(rho) => Ok(rho.into_matrix()),
        other => Err(wrong_kind(path, "operator or density", &other)),
    }
}

fn load_channel(path: &Path) -> Result<ChannelMap, Error> {
    match load_one(path)? {
        Object::Channel(ch) => Ok(ch),
        other => Err(wrong_kind(path, "channel", &other)),
    }
}

fn schmidt(out: &mut Printer, path: &Path, save: Option<&Path>) -> Result<i32, Error> {
    let psi = load_pure(path)?;
    let decomposition = smap::schmidt(&psi)?;
    let residual = linalg::max_abs_diff(&decomposition.reconstruct(), psi.amplitudes());
    let class_a = smap::classify(&decomposition, Party::A);
    let class_b = smap::classify(&decomposition, Party::B);
    if let Some(p) = save {
        io::save(p, &Object::Schmidt(decomposition.clone()))?;
    }
    out.object(
        &Object::Schmidt(decomposition.clone()),
        &[
            ("class", class_a.to_string()),
            ("class_b", class_b.to_string()),
            ("rank", decomposition.rank().to_string()),
            ("reconstruction_residual", format!("{residual:e}")),
        ],
    );
    Ok(if residual < eprkit::tol::TOL_EQ { 0 } else { EXIT_FAILURE })
}

fn channel_command(out: &mut Printer, cmd: ChannelCommand) -> Result<i32, Error> {
    match cmd {
        ChannelCommand::Build { density, direction } => {
            let rho = load_density(&density)?;
            let ch = channel::channel_from_density(&rho, direction)?;
            out.object(&Object::Channel(ch), &[("direction", direction.to_string())]);
        }
        ChannelCommand::Apply { channel, operator } => {
            let ch = load_channel(&channel)?;
            let omega = load_operator(&operator)?;
            out.object(&Object::Operator(ch.apply(&omega)?), &[]);
        }
        ChannelCommand::Dual { channel, operator } => {
            let ch = load_channel(&channel)?;
            let y = load_operator(&operator)?;
            out.object(&Object::Operator(ch.dual(&y)?), &[]);
        }
    }
    Ok(0)
}

fn measure(out: &mut Printer, state: &Path, vector: &Path, save: Option<&Path>) -> Result<i32, Error> {
    let rho = load_density(state)?;
    let phi = load_pure(vector)?;
    if phi.arity() != 1 {
        return Err(Error::WrongArity {
            expected: 1,
            found: phi.arity(),
        });
    }
    let update = channel::lueders_update(&rho, phi.amplitudes())?;
    let mut report = Report::new(&["probability", "factorization_residual"]);
    report.push(vec![update.probability, update.factorization_residual]);
    out.object(&Object::Report(report), &[]);
    let post = Object::Density(update.post_state);
    if let Some(p) = save {
        io::save(p, &post)?;
    }
    out.object(&post, &[]);
    Ok(if update.factorization_residual < 1e-10 { 0 } else { EXIT_FAILURE })
}

fn teleport_run(out: &mut Printer, args: RunArgs) -> Result<i32, Error> {
    let omega = load_density(&args.input)?;
    let ancilla = match load_one(&args.ancilla)? {
        Object::PureState(p) => Ancilla::Pure(p),
        Object::Density(rho) => Ancilla::Mixed(rho),
        other => return Err(wrong_kind(&args.ancilla, "pure_state or density", &other)),
    };
    let basis = if args.basis == "bell" {
        states::bell_basis()
    } else {
        let path = Path::new(&args.basis);
        match load_one(path)? {
            Object::Basis(b) => b,
            other => return Err(wrong_kind(path, "basis", &other)),
        }
    };
    let corrections = match args.corrections.as_deref() {
        None => None,
        Some("derive") => match &ancilla {
            Ancilla::Pure(p) => Some(teleport::derive_corrections(p, &basis)?),
            Ancilla::Mixed(_) => {
                return Err(Error::InvalidArgument("corrections can only be derived for a pure ancilla".into()))
            }
        },
        Some(file) => Some(load_corrections(Path::new(file), &basis)?),
    };
    let report = teleport::run_protocol(&omega, &ancilla, &basis, corrections.as_deref())?;

    let mut table = Report::new(&["outcome", "probability", "trace_norm", "sqrt_fidelity", "fidelity"]);
    for o in &report.outcomes {
        table.push(vec![o.index as f64, o.probability, o.trace_norm, o.sqrt_fidelity, o.fidelity.unwrap_or(0.0)]);
    }
    out.object(
        &Object::Report(table),
        &[
            ("corrected", corrections.is_some().to_string()),
            ("average_fidelity", sig17(report.average_fidelity())),
        ],
    );
    if args.samples > 0 {
        let draws = teleport::sample_outcomes(&report, args.samples, &mut Seed(args.seed).rng());
        let mut table = Report::new(&["draw", "outcome"]);
        for (k, i) in draws.into_iter().enumerate() {
            table.push(vec![k as f64, i as f64]);
        }
        out.object(&Object::Report(table), &[("seed", args.seed.to_string())]);
    }
    let total = report.total_probability();
    Ok(if (total - omega.trace()).abs() < 1e-9 { 0 } else { EXIT_FAILURE })
}

fn load_corrections(path: &Path, basis: &MeasurementBasis) -> Result<Vec<ComplexMatrix>, Error> {
    let objects = io::load_many(path)?;
    if objects.len() != basis.len() {
        return Err(Error::dims("corrections", basis.len(), objects.len()));
    }
    objects
        .into_iter()
        .map(|o| match o {
            Object::Operator(m) => Ok(m),
            other => Err(wrong_kind(path, "operator", &other)),
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "p,outcome,probability,trace_norm,sqrt_fidelity,corrected_fidelity";

fn sweep(out: &mut Printer, ps: &[f64], input: Option<&Path>) -> Result<i32, Error> {
    let input = match input {
        Some(path) => load_pure(path)?,
        None => PureState::new(vec![2], linalg::basis_vector(2, 0))?,
    };
    let rows = teleport::werner_sweep(ps, &input)?;
    out.line(SWEEP_HEADER);
    for r in rows {
        out.line(&format!(
            "{},{},{},{},{},{}",
            sig17(r.p),
            r.outcome,
            sig17(r.probability),
            sig17(r.trace_norm),
            sig17(r.sqrt_fidelity),
            sig17(r.corrected_fidelity)
        ));
    }
    Ok(0)
}

fn modular_command(out: &mut Printer, path: &Path) -> Result<i32, Error> {
    let psi = load_pure(path)?;
    let j = modular::modular_conjugation(&psi)?;
    let delta = modular::modular_operator(&psi)?;
    let s = modular::s_operator(&psi)?;
    let check = modular::check_conjugation(&psi, &j)?;
    let ds = modular::verify_ds_relations(&psi)?;

    out.object(&Object::AntilinearMap(j.as_antilinear()), &[("name", "J".to_string())]);
    out.object(&Object::Operator(delta), &[("name", "delta".to_string())]);
    out.object(&Object::AntilinearMap(s.as_antilinear()), &[("name", "S".to_string())]);

    let mut report = Report::new(&["relation", "support_residual", "full_residual"]);
    report.push(vec![0.0, check.involution, check.involution]);
    report.push(vec![1.0, check.antiunitarity, check.antiunitarity]);
    report.push(vec![2.0, ds.first.support, ds.first.full]);
    report.push(vec![3.0, ds.second_literal.support, ds.second_literal.full]);
    report.push(vec![4.0, ds.second_corrected.support, ds.second_corrected.full]);
    out.object(
        &Object::Report(report),
        &[(
            "relations",
            "J^2=P;J antiunitary on P;sqrt(D)(j~s)=s~j;S(1@sqrt(rhoB))=s~j;S(1@sqrt(rhoB))=j~s".to_string(),
        )],
    );
    let ok = check.involution < 1e-9 && check.antiunitarity < 1e-9 && ds.max_valid_residual() < 1e-9;
    Ok(if ok { 0 } else { EXIT_FAILURE })
}

fn verify_all(out: &mut Printer, dims: Option<(usize, usize)>, trials: usize, seed: u64) -> i32 {
    let config = VerifyConfig {
        dims,
        trials,
        seed: Seed(seed),
    };
    let results = verify::run_all(&config);
    let mut all_passed = true;
    for result in &results {
        all_passed &= result.passed();
        let mut report = Report::new(&["residual", "tolerance", "passed"]);
        for c in &result.checks {
            report.push(vec![c.residual, c.tolerance, if c.passed() { 1.0 } else { 0.0 }]);
        }
        let names: Vec<&str> = result.checks.iter().map(|c| c.name).collect();
        let mut meta = vec![
            ("suite", result.suite.to_string()),
            ("checks", names.join(",")),
            ("status", if result.passed() { "pass" } else { "fail" }.to_string()),
            ("seed", seed.to_string()),
            ("trials", trials.to_string()),
        ];
        if let Some(e) = &result.error {
            meta.push(("error", e.clone()));
        }
        out.object(&Object::Report(report), &meta);
    }
    if all_passed {
        0
    } else {
        EXIT_FAILURE
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(e) => {
            eprintln!("eprkit: {e}");
            exit_code(&e)
        }
    }
}
