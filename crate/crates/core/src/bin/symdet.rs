use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use symdet::decompose::{decompose, SubstitutionScript};
use symdet::field::FieldDescriptor;
use symdet::golden;
use symdet::poly::Polynomial;
use symdet::schur::{Strategy, SymmetricPencil};
use symdet::verify::{verify_exhaustive, verify_sampled, verify_symbolic, VerifyReport};
use symdet::{build, BuildReport};

#[derive(Parser)]
#[command(
    name = "symdet",
    version,
    about = "Symmetric determinantal representations of polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a symmetric pencil whose determinant is the input polynomial.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// auto | shift | rankfactor
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// symbolic | sampled:<n> | exhaustive | none
        #[arg(long = "verify", default_value = "none")]
        verify_mode: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a pencil (or a build report) against a polynomial.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Pencil or build report JSON file; `-` reads stdin.
        #[arg(long)]
        pencil: String,
        #[arg(long = "verify", visible_alias = "mode", default_value = "symbolic")]
        verify_mode: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the substitution script for the input polynomial.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print a built-in reference bundle.
    Example {
        name: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Polynomial text; `-` reads stdin.
    input: Option<String>,
    /// Read the polynomial from a file.
    #[arg(short = 'f', long = "file", conflicts_with = "input")]
    file: Option<PathBuf>,
    /// q or fp:<prime>
    #[arg(long, default_value = "q")]
    field: String,
    /// Seed for sampled verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to a file instead of stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Human-readable matrices instead of JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy)]
enum VerifyMode {
    Symbolic,
    Sampled(u64),
    Exhaustive,
    None,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn parse_verify_mode(s: &str) -> Result<VerifyMode, Failure> {
    match s {
        "symbolic" => Ok(VerifyMode::Symbolic),
        "exhaustive" => Ok(VerifyMode::Exhaustive),
        "none" => Ok(VerifyMode::None),
        _ => s
            .strip_prefix("sampled:")
            .and_then(|n| n.parse().ok())
            .map(VerifyMode::Sampled)
            .ok_or_else(|| usage(format!("invalid verify mode `{s}` (expected symbolic, sampled:<n>, exhaustive or none)"))),
    }
}

fn read_source(source: &str) -> Result<String, Failure> {
    if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(usage)?;
        Ok(s)
    } else {
        fs::read_to_string(source).map_err(|e| usage(format!("{source}: {e}")))
    }
}

fn read_polynomial(args: &InputArgs, field: FieldDescriptor) -> Result<Polynomial, Failure> {
    let text = match (&args.input, &args.file) {
        (_, Some(path)) => read_source(&path.to_string_lossy())?,
        (Some(s), None) if s == "-" => read_source("-")?,
        (Some(s), None) => s.clone(),
        (None, None) => return Err(usage("no input polynomial given")),
    };
    Polynomial::parse(text.trim(), field).map_err(usage)
}

fn run_verify(
    pencil: &SymmetricPencil,
    p: &Polynomial,
    mode: VerifyMode,
    seed: u64,
) -> Result<Option<VerifyReport>, Failure> {
    let r = match mode {
        VerifyMode::None => return Ok(None),
        VerifyMode::Symbolic => verify_symbolic(pencil, p),
        VerifyMode::Sampled(n) => verify_sampled(pencil, p, n, seed),
        VerifyMode::Exhaustive => verify_exhaustive(pencil, p),
    };
    r.map(Some).map_err(usage)
}

fn emit(out: &OutputArgs, json: &Value, pretty: impl FnOnce() -> String) -> Result<(), Failure> {
    let text = if out.pretty {
        pretty()
    } else {
        format!("{json}\n")
    };
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(usage),
    }
}

fn pretty_verification(r: &VerifyReport) -> String {
    let mut s = format!(
        "verification ({}): {} [{}]\n",
        r.mode.as_str(),
        if r.passed { "pass" } else { "FAIL" },
        r.certificate.as_str()
    );
    if let Some(w) = &r.witness {
        s += &format!("witness: {}\n", w.to_json());
    }
    for n in &r.notes {
        s += &format!("note: {n}\n");
    }
    s
}

fn report_json(report: &BuildReport, verification: Option<&VerifyReport>) -> Value {
    let mut obj = match report.to_json() {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Some(v) = verification {
        obj.insert("verification".into(), v.to_json());
    }
    Value::Object(obj)
}

/// Accept either a bare pencil or an object carrying one under `pencil`.
fn load_pencil(source: &str) -> Result<SymmetricPencil, Failure> {
    let text = read_source(source)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("pencil JSON: {e}")))?;
    let v = if v.get("A0").is_none() {
        v.get("pencil").cloned().unwrap_or(v)
    } else {
        v
    };
    SymmetricPencil::from_json(&v).map_err(usage)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Build {
            input,
            strategy,
            verify_mode,
            out,
        } => {
            let field = FieldDescriptor::parse_spec(&input.field).map_err(usage)?;
            let strategy: Strategy = strategy.parse().map_err(usage)?;
            let mode = parse_verify_mode(&verify_mode)?;
            let p = read_polynomial(&input, field)?;
            let report = build(&p, strategy).map_err(usage)?;
            let verification = run_verify(&report.pencil, &p, mode, input.seed)?;
            let passed = verification.as_ref().is_none_or(|r| r.passed);
            emit(&out, &report_json(&report, verification.as_ref()), || {
                let mut s = format!("{}", report.pencil);
                s += &format!("size trace: {:?}\n", report.size_trace);
                if let Some(r) = &verification {
                    s += &pretty_verification(r);
                }
                s
            })?;
            Ok(passed)
        }
        Command::Verify {
            input,
            pencil,
            verify_mode,
            out,
        } => {
            let field = FieldDescriptor::parse_spec(&input.field).map_err(usage)?;
            let mode = parse_verify_mode(&verify_mode)?;
            let pencil = load_pencil(&pencil)?;
            if pencil.field() != field {
                return Err(usage(format!(
                    "pencil is over {} but --field is {field}",
                    pencil.field()
                )));
            }
            let p = read_polynomial(&input, field)?;
            let Some(report) = run_verify(&pencil, &p, mode, input.seed)? else {
                return Err(usage("verify needs a mode other than none"));
            };
            emit(&out, &report.to_json(), || pretty_verification(&report))?;
            Ok(report.passed)
        }
        Command::Decompose { input, out } => {
            let field = FieldDescriptor::parse_spec(&input.field).map_err(usage)?;
            let p = read_polynomial(&input, field)?;
            let script: SubstitutionScript = decompose(&p);
            emit(&out, &script.to_json(), || {
                let mut s = format!("seed: {}\n", script.seed);
                for st in &script.steps {
                    s += &format!("{} := {} * {}\n", st.w, st.u, st.v);
                }
                s
            })?;
            Ok(true)
        }
        Command::Example { name, out } => {
            let bundle = golden::example(&name).map_err(usage)?;
            emit(&out, &bundle, || {
                let mut s = format!("input: {}\n", golden::WORKED_INPUT);
                s += &format!("{}", golden::worked_pencil());
                s
            })?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error");
            println!(
                "{}",
                serde_json::json!({ "error": first.trim_start_matches("error: ") })
            );
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(f) => {
            println!("{}", serde_json::json!({ "error": f.message }));
            ExitCode::from(f.code)
        }
    }
}
