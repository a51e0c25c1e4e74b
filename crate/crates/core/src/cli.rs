//! Batch front end. Each invocation reads one JSON input, runs one command
//! and writes one JSON report.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a verification step
//! fails (the report is still written).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::barhomology::{contractibility_report, nerve_poset, CoeffField, MonoidAction};
use crate::funfield::{rat, CurveSpec, PuncturedCurve, Rat, RatFun};
use crate::localsys::{FormKind, LocalSystem, LocalSystemSpec};
use crate::monoidquot::{family_specialize, find_family_witness, find_witness, FamilyFun, FamilyLine, MonoidError};
use crate::opers::{
    complete_flag, count_and_bound, find_sp_oper, g2_counting_report, gen_so_equations, gen_sp_equations, verify_oper_gl,
    LineSection, OperError,
};
use crate::tsen::{solve_section, tsen_count, ProjectiveSystem};

#[derive(Parser, Debug)]
#[command(name = "opercalc", version, about = "Exact oper, monoid-quotient and bar-homology computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; only JSON is supported.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// JSON input file; `-` reads stdin.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Search {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub tries: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a local system and check compatibility of A with the form.
    CheckSystem(Io),
    /// Quadric equations cutting out grade-d Sp or SO oper lines.
    GenEquations {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        d: usize,
    },
    /// Flag of a line section and its GL oper certificate.
    CompleteFlag {
        #[command(flatten)]
        io: Io,
        /// Flag length; the rank by default.
        #[arg(short, long)]
        r: Option<usize>,
    },
    /// Seeded search for a symplectic oper line of grade d.
    FindOper {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        d: usize,
        #[command(flatten)]
        search: Search,
    },
    /// Dimension count and connectivity bound at grade d.
    Connectivity {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        d: usize,
    },
    /// Cross-multiplication witness for two sections with the same image.
    Witness(Io),
    /// Truncated bar homology of a monoid action.
    BarHomology {
        #[command(flatten)]
        io: Io,
        /// Simplicial degree cap.
        #[arg(short = 'N', long = "truncation")]
        n: usize,
        /// Grade cap, overriding the one in the input.
        #[arg(short = 'G', long = "grade-cap")]
        g: Option<u32>,
        /// Q, or F_p for a prime p.
        #[arg(long, default_value = "Q")]
        field: CoeffField,
    },
    /// Unknowns, equations and slack of the degree-e section ansatz.
    TsenCount {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        e: usize,
    },
    /// Seeded search for an exactly verified section of degree e.
    TsenSolve {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        e: usize,
        #[command(flatten)]
        search: Search,
    },
    /// Slack slope of a system of forms of the given degrees.
    G2Report {
        #[arg(long, value_delimiter = ',', default_value = "2,2,3")]
        degrees: Vec<i64>,
        #[arg(long, default_value_t = 7)]
        ambient: i64,
        #[arg(long, default_value_t = 1)]
        punctures: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

/// A report and whether every verification in it passed.
pub struct Outcome {
    pub report: Value,
    pub verified: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, verified: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            2
        }
    }
}

fn read_input<T: DeserializeOwned>(io: &Io) -> Result<T, CliError> {
    let text = if io.input.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(CliError::input)?
    } else {
        fs::read_to_string(&io.input).map_err(|e| CliError::Input(format!("{}: {e}", io.input.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("parse error: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn build_system(spec: &LocalSystemSpec) -> Result<LocalSystem, CliError> {
    spec.build().map_err(CliError::input)
}

/// `{"d": grade, "g": [entries]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineWire {
    pub d: usize,
    pub g: Vec<RatFun>,
}

impl LineWire {
    fn build(&self, curve: &PuncturedCurve) -> Result<LineSection, CliError> {
        LineSection::new(curve, self.d, self.g.clone()).map_err(CliError::input)
    }

    pub fn from_line(line: &LineSection) -> Self {
        LineWire { d: line.grade(), g: line.g().to_vec() }
    }
}

#[derive(Deserialize)]
struct FlagInput {
    system: LocalSystemSpec,
    line: LineWire,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyLineWire {
    pub d: usize,
    pub g: Vec<FamilyFun>,
}

/// Witness input. With `family` set, `f` and `g` list family functions (each
/// an array of coefficients of powers of `s`) and the witness is specialized
/// at every `specialize` point where the localizer does not vanish.
#[derive(Deserialize)]
struct WitnessInput {
    #[serde(default)]
    curve: Option<CurveSpec>,
    #[serde(default)]
    family: bool,
    f: Value,
    g: Value,
    #[serde(default, with = "rat::vec")]
    specialize: Vec<Rat>,
}

/// Either a preset or an explicit table.
#[derive(Deserialize)]
#[serde(untagged)]
enum ActionInput {
    Preset { preset: String, #[serde(default)] size: Option<usize>, #[serde(default)] cap: Option<u32> },
    Table(MonoidAction),
}

fn build_action(input: ActionInput) -> Result<MonoidAction, CliError> {
    match input {
        ActionInput::Table(t) => MonoidAction::new(t).map_err(CliError::input),
        ActionInput::Preset { preset, size, cap } => {
            let size = size.unwrap_or(2);
            match preset.as_str() {
                "trivial" => Ok(MonoidAction::trivial(size)),
                "cyclic_regular" => Ok(MonoidAction::cyclic_regular(size)),
                "cyclic_on_point" => Ok(MonoidAction::cyclic_on_point(size)),
                "naturals" => Ok(MonoidAction::naturals(cap.ok_or_else(|| CliError::input("preset `naturals` needs `cap`"))?)),
                other => Err(CliError::Input(format!("unknown preset `{other}`"))),
            }
        }
    }
}

fn curve_of(spec: &Option<CurveSpec>) -> Result<PuncturedCurve, CliError> {
    match spec {
        Some(c) => Ok(c.build().map_err(CliError::input)?.0),
        None => Ok(PuncturedCurve::affine_line()),
    }
}

fn oper_failure(e: OperError) -> Result<Outcome, CliError> {
    match e {
        OperError::DegenerateFlag { .. } | OperError::ConditionFailed(_) => {
            Ok(Outcome { report: json!({ "verified": false, "error": to_value(&e.to_string()), "detail": error_detail(&e) }), verified: false })
        }
        other => Err(CliError::input(other)),
    }
}

fn error_detail(e: &OperError) -> Value {
    match e {
        OperError::DegenerateFlag { step } => json!({ "degenerate_flag": { "step": step } }),
        OperError::ConditionFailed(c) => to_value(c),
        _ => Value::Null,
    }
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("parse error: {e}")))
}

fn witness(input: WitnessInput) -> Result<Outcome, CliError> {
    let curve = curve_of(&input.curve)?;
    if !input.family {
        let f: LineWire = parse(&input.f)?;
        let g: LineWire = parse(&input.g)?;
        return match find_witness(&curve, &f.build(&curve)?, &g.build(&curve)?) {
            Ok(w) => Ok(Outcome::ok(to_value(&w))),
            Err(MonoidError::NotSameImage) => Ok(Outcome { report: json!({ "error": "not same image" }), verified: false }),
            Err(e) => Err(CliError::input(e)),
        };
    }
    let f: FamilyLineWire = parse(&input.f)?;
    let g: FamilyLineWire = parse(&input.g)?;
    let f = FamilyLine::new(&curve, f.d, f.g).map_err(CliError::input)?;
    let g = FamilyLine::new(&curve, g.d, g.g).map_err(CliError::input)?;
    let w = match find_family_witness(&curve, &f, &g) {
        Ok(w) => w,
        Err(MonoidError::NotSameImage) => return Ok(Outcome { report: json!({ "error": "not same image" }), verified: false }),
        Err(e) => return Err(CliError::input(e)),
    };
    let mut checks = Vec::new();
    let mut all = true;
    for s0 in &input.specialize {
        if w.localizer.eval(s0) == Rat::from_integer(0.into()) {
            checks.push(json!({ "s": rat::format_rat(s0), "skipped": "localizer vanishes" }));
            continue;
        }
        let pair = w.specialize(&curve, s0).map_err(CliError::input)?;
        let fs = family_specialize(&curve, &f, s0).map_err(CliError::input)?;
        let gs = family_specialize(&curve, &g, s0).map_err(CliError::input)?;
        let lhs = crate::monoidquot::act(&curve, &pair.m1, &fs).map_err(CliError::input)?;
        let rhs = crate::monoidquot::act(&curve, &pair.m2, &gs).map_err(CliError::input)?;
        let holds = lhs == rhs;
        all &= holds;
        checks.push(json!({ "s": rat::format_rat(s0), "holds": holds }));
    }
    let mut report = to_value(&w);
    report["specializations"] = Value::Array(checks);
    Ok(Outcome { report, verified: all })
}

/// Runs one command and returns its report, without writing it.
pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::CheckSystem(io) => {
            let spec: LocalSystemSpec = read_input(io)?;
            let sys = build_system(&spec)?;
            let compat = sys.check_compatibility().map_err(CliError::input)?;
            let report = json!({
                "rank": sys.rank(),
                "C1": sys.c1(),
                "C2": sys.c2(),
                "d_nu": sys.nu().d_nu(),
                "form": sys.form().map(|f| f.kind),
                "compatible": compat.compatible,
                "violation": compat.violation,
            });
            Ok(Outcome { report, verified: compat.compatible })
        }
        Command::GenEquations { io, d } => {
            let sys = build_system(&read_input(io)?)?;
            let kind = sys.form().map(|f| f.kind).ok_or_else(|| CliError::input(OperError::NoForm))?;
            let q = match kind {
                FormKind::Symplectic => gen_sp_equations(&sys, *d),
                FormKind::Symmetric => gen_so_equations(&sys, *d),
            }
            .map_err(CliError::input)?;
            Ok(Outcome::ok(to_value(&q)))
        }
        Command::CompleteFlag { io, r } => {
            let input: FlagInput = read_input(io)?;
            let sys = build_system(&input.system)?;
            let line = input.line.build(sys.curve())?;
            let r = r.unwrap_or(sys.rank());
            let flag = match complete_flag(&sys, &line, r) {
                Ok(f) => f,
                Err(e) => return oper_failure(e),
            };
            match verify_oper_gl(&sys, &flag) {
                Ok(cert) => Ok(Outcome::ok(json!({ "verified": true, "flag": to_value(&flag), "certificate": to_value(&cert) }))),
                Err(e) => oper_failure(e),
            }
        }
        Command::FindOper { io, d, search } => {
            let sys = build_system(&read_input(io)?)?;
            let found = find_sp_oper(&sys, *d, search.seed, search.tries).map_err(CliError::input)?;
            let report = match found {
                Some((line, cert)) => json!({
                    "found": true,
                    "line": to_value(&LineWire::from_line(&line)),
                    "certificate": to_value(&cert),
                }),
                None => json!({ "found": false, "seed": search.seed, "tries": search.tries }),
            };
            Ok(Outcome::ok(report))
        }
        Command::Connectivity { io, d } => {
            let sys = build_system(&read_input(io)?)?;
            let report = count_and_bound(&sys, *d).map_err(CliError::input)?;
            Ok(Outcome::ok(to_value(&report)))
        }
        Command::Witness(io) => witness(read_input(io)?),
        Command::BarHomology { io, n, g, field } => {
            let mut action = build_action(read_input(io)?)?;
            if g.is_some() {
                action.grade_cap = *g;
            }
            let report = contractibility_report(&action, *n, *field).map_err(CliError::input)?;
            let poset = nerve_poset(&action).is_poset;
            let mut value = to_value(&report);
            value["poset"] = json!(poset);
            Ok(Outcome { verified: report.contractible_below_boundary != Some(false), report: value })
        }
        Command::TsenCount { io, e } => {
            let system: ProjectiveSystem = read_input(io)?;
            Ok(Outcome::ok(to_value(&tsen_count(&system, *e))))
        }
        Command::TsenSolve { io, e, search } => {
            let system: ProjectiveSystem = read_input(io)?;
            let out = solve_section(&system, *e, search.seed, search.tries);
            Ok(Outcome::ok(json!({
                "found": out.section.is_some(),
                "section": out.section.as_ref().map(|s| to_value(&s.coords)),
                "warnings": out.warnings,
            })))
        }
        Command::G2Report { degrees, ambient, punctures, .. } => {
            Ok(Outcome::ok(to_value(&g2_counting_report(*punctures, degrees, *ambient))))
        }
    }
}

fn output_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::CheckSystem(io) | Command::Witness(io) => io.output.as_ref(),
        Command::GenEquations { io, .. }
        | Command::CompleteFlag { io, .. }
        | Command::FindOper { io, .. }
        | Command::Connectivity { io, .. }
        | Command::BarHomology { io, .. }
        | Command::TsenCount { io, .. }
        | Command::TsenSolve { io, .. } => io.output.as_ref(),
        Command::G2Report { output, .. } => output.as_ref(),
    }
}

/// Executes and writes the report; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    text.push('\n');
    let written = match output_path(&cli.command) {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    outcome.exit_code()
}
