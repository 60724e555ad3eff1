//! The `heun` command-line front end.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns
//! the exit code together with everything meant for stdout and stderr, so
//! the binary is a thin wrapper and tests can drive it in-process.
//!
//! Every invocation emits one record
//! `{"command", "inputs", "results", "diagnostics"}` (JSON, one line) or the
//! equivalent CSV table. Domain errors produce
//! `{"command", "inputs", "error": {"code", "message"}}` and exit code 1;
//! usage errors exit with 2.

mod record;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub use record::{Json, Table};

use crate::che::{self, CheParams};
use crate::expansions::{self, Alpha0, Family, Violation};
use crate::kummer::{self, Identity, KummerArgs, SeriesControl};
use crate::termination::{self, TerminationCondition, TerminationKind};
use crate::twostate::{self, ClosedForm, LorentzianModel};
use crate::{Error, C64};

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "heun", version, about = "Confluent Heun solutions as series of Kummer functions")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// File of `key = value` lines supplying flags not given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Re-run the command stored in a JSON record.
    #[arg(long, conflicts_with = "config")]
    replay: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Args, Clone)]
struct Params {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    gamma: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    delta: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    eps: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: C64,
    /// Accessory parameter.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Option<C64>,
}

impl Params {
    fn che(&self) -> Result<CheParams, Failure> {
        let q = self.q.ok_or_else(|| Failure::Usage("missing required flag --q".into()))?;
        Ok(self.che_with_q(q))
    }

    fn che_with_q(&self, q: C64) -> CheParams {
        CheParams::new(self.gamma, self.delta, self.eps, self.alpha, q)
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate 1F1(a; c; x).
    #[command(name = "eval-1f1")]
    Eval1f1 {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        x: C64,
        #[arg(long, default_value_t = kummer::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = kummer::DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// Residuals of the contiguous relations used by the expansions.
    VerifyIdentities {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        x: C64,
        /// Single identity (default: all).
        #[arg(long)]
        identity: Option<Identity>,
    },
    /// Build an expansion, evaluate it and report the equation residual.
    CheSeries {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        /// alpha-over-eps, gamma, or a value.
        #[arg(long, value_parser = parse_alpha0, allow_hyphen_values = true)]
        alpha0: Option<Alpha0>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s0: Option<C64>,
        /// Largest accepted tail estimate.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Print the coefficients.
        #[arg(long)]
        coefficients: bool,
    },
    /// Power series about z = 0.
    Frobenius {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, default_value_t = 80)]
        order: usize,
    },
    /// Parameters after z -> 1 - z.
    Transform {
        #[command(flatten)]
        params: Params,
    },
    /// Right-side termination conditions.
    DetectTermination {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_alpha0, allow_hyphen_values = true)]
        alpha0: Option<Alpha0>,
        /// List every admissible condition instead of the smallest N.
        #[arg(long)]
        all: bool,
    },
    /// Accessory-parameter values for which the series terminates.
    QSpectrum {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_alpha0, allow_hyphen_values = true)]
        alpha0: Option<Alpha0>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s0: Option<C64>,
        /// alpha-over-eps, delta-int or gamma-delta-alpha (default: detected).
        #[arg(long, value_parser = parse_kind)]
        kind: Option<TerminationKind>,
    },
    /// Lorentzian two-state model: closed form against Runge-Kutta.
    TwoState {
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta0: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta1: f64,
        #[arg(long, value_parser = parse_family, default_value = "b3")]
        family: Family,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
        t_start: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
        t_end: f64,
        #[arg(long, default_value_t = twostate::DEFAULT_STEPS)]
        steps: usize,
        /// Number of trajectory samples written.
        #[arg(long, default_value_t = 101)]
        rows: usize,
    },
    /// Distance to the termination spectrum over a grid of delta0.
    ReturnSpectrumScan {
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta1: f64,
        /// Termination index; R must equal N + 1.
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
        from: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
        to: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

struct Output {
    results: Json,
    diagnostics: Json,
    table: Option<Table>,
}

/// Parses a complex literal: `RE`, `RE+IMi`, `RE-IMi` or `IMi`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex literal `{s}` (expected RE, RE+IMi or IMi)");
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| match part {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        p => p.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_alpha0(s: &str) -> Result<Alpha0, String> {
    match s {
        "alpha-over-eps" => Ok(Alpha0::AlphaOverEpsilon),
        "gamma" => Ok(Alpha0::Gamma),
        other => parse_complex(other).map(Alpha0::Value),
    }
}

fn parse_kind(s: &str) -> Result<TerminationKind, String> {
    TerminationKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown termination kind `{s}`"))
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    match dispatch(argv) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Domain(e)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn parse(argv: &[OsString]) -> Result<ArgMatches, Outcome> {
    parse_with(Cli::command(), argv)
}

/// First pass: subcommand flags a config file may still supply are optional.
fn parse_lenient(argv: &[OsString]) -> Result<ArgMatches, Outcome> {
    parse_with(Cli::command().mut_subcommands(|sc| sc.mut_args(|a| a.required(false))), argv)
}

fn parse_with(cmd: clap::Command, argv: &[OsString]) -> Result<ArgMatches, Outcome> {
    cmd.try_get_matches_from(argv).map_err(|e| {
        let text = e.render().to_string();
        if e.use_stderr() {
            Outcome {
                code: 2,
                stdout: String::new(),
                stderr: text,
            }
        } else {
            Outcome {
                code: 0,
                stdout: text,
                stderr: String::new(),
            }
        }
    })
}

fn dispatch(mut argv: Vec<OsString>) -> Result<Outcome, Failure> {
    let mut matches = match parse_lenient(&argv) {
        Ok(m) => m,
        Err(o) => return Ok(o),
    };
    if let Some(path) = matches.get_one::<PathBuf>("replay").cloned() {
        if matches.subcommand().is_some() {
            return Err(Failure::Usage("--replay cannot be combined with a subcommand".into()));
        }
        let format = matches.get_one::<Format>("format").copied().unwrap_or(Format::Json);
        argv = replay_argv(&path, format)?;
        matches = match parse(&argv) {
            Ok(m) => m,
            Err(o) => return Ok(o),
        };
    } else {
        if let Some(path) = matches.get_one::<PathBuf>("config").cloned() {
            apply_config(&mut argv, &matches, &path)?;
        }
        matches = match parse(&argv) {
            Ok(m) => m,
            Err(o) => return Ok(o),
        };
    }
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::Usage(e.to_string()))?;
    let Some(cmd) = cli.command else {
        return Err(Failure::Usage("no subcommand given (see --help)".into()));
    };
    let (name, sub) = matches.subcommand().expect("subcommand present");
    let inputs = collect_inputs(name, sub);
    let mut stderr = String::new();
    match execute(cmd, &mut stderr) {
        Ok(out) => {
            let stdout = match cli.format {
                Format::Json => Json::obj([
                    ("command", Json::str(name)),
                    ("inputs", inputs),
                    ("results", out.results.clone()),
                    ("diagnostics", out.diagnostics.clone()),
                ])
                .to_line(),
                Format::Csv => {
                    if let Json::Obj(fields) = &out.diagnostics {
                        for (k, v) in fields {
                            let mut s = String::new();
                            v.write(&mut s);
                            stderr.push_str(&format!("{k}: {s}\n"));
                        }
                    }
                    out.table.unwrap_or_else(|| Table::from_object(&out.results)).render()
                }
            };
            Ok(Outcome { code: 0, stdout, stderr })
        }
        Err(Failure::Domain(e)) => {
            stderr.push_str(&format!("error: {e}\n"));
            let err = Json::obj([("code", Json::str(e.code())), ("message", Json::str(e.to_string()))]);
            let stdout = match cli.format {
                Format::Json => Json::obj([("command", Json::str(name)), ("inputs", inputs), ("error", err)]).to_line(),
                Format::Csv => Table {
                    header: vec!["code".into(), "message".into()],
                    rows: vec![vec![e.code().into(), e.to_string().into()]],
                }
                .render(),
            };
            Ok(Outcome { code: 1, stdout, stderr })
        }
        Err(usage) => Err(usage),
    }
}

/// Raw values of every subcommand argument that has one, keyed by flag
/// name, in declaration order.
fn collect_inputs(name: &str, sub: &ArgMatches) -> Json {
    let cmd = Cli::command();
    let Some(sc) = cmd.find_subcommand(name) else {
        return Json::Obj(Vec::new());
    };
    let mut fields = Vec::new();
    for arg in sc.get_arguments() {
        let id = arg.get_id().as_str();
        if matches!(id, "format" | "config" | "replay" | "help" | "version") {
            continue;
        }
        let Some(long) = arg.get_long() else { continue };
        if let Ok(Some(mut raw)) = sub.try_get_raw(id) {
            if let Some(v) = raw.next() {
                fields.push((long.to_owned(), Json::str(v.to_string_lossy().into_owned())));
            }
        }
    }
    Json::Obj(fields)
}

fn flag_takes_value(sub: &str, long: &str) -> Option<bool> {
    let cmd = Cli::command();
    let sc = cmd.find_subcommand(sub)?;
    let takes = sc
        .get_arguments()
        .find(|a| a.get_long() == Some(long))
        .map(|a| a.get_action().takes_values());
    takes
}

fn push_flag(argv: &mut Vec<OsString>, sub: &str, key: &str, value: &str) -> Result<(), Failure> {
    match flag_takes_value(sub, key) {
        Some(true) => argv.push(format!("--{key}={value}").into()),
        Some(false) => match value {
            "true" => argv.push(format!("--{key}").into()),
            "false" => {}
            _ => return Err(Failure::Usage(format!("flag --{key} expects true or false, got `{value}`"))),
        },
        None => return Err(Failure::Usage(format!("unknown flag --{key} for {sub}"))),
    }
    Ok(())
}

fn replay_argv(path: &PathBuf, format: Format) -> Result<Vec<OsString>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read replay file {}: {e}", path.display())))?;
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let record: serde_json::Value =
        serde_json::from_str(line).map_err(|e| Failure::Usage(format!("replay file is not a JSON record: {e}")))?;
    let command = record["command"]
        .as_str()
        .ok_or_else(|| Failure::Usage("replay record has no command".into()))?;
    let inputs = record["inputs"]
        .as_object()
        .ok_or_else(|| Failure::Usage("replay record has no inputs".into()))?;
    let mut argv: Vec<OsString> = vec!["heun".into(), command.into()];
    for (key, value) in inputs {
        let value = value
            .as_str()
            .ok_or_else(|| Failure::Usage(format!("replay input `{key}` is not a string")))?;
        push_flag(&mut argv, command, key, value)?;
    }
    argv.push(format!("--format={}", if format == Format::Csv { "csv" } else { "json" }).into());
    Ok(argv)
}

fn apply_config(argv: &mut Vec<OsString>, matches: &ArgMatches, path: &PathBuf) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let Some((name, sub)) = matches.subcommand() else {
        return Err(Failure::Usage("--config needs a subcommand".into()));
    };
    let name = name.to_owned();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "format" {
            if matches.value_source("format") != Some(ValueSource::CommandLine) {
                argv.push(format!("--format={value}").into());
            }
            continue;
        }
        let id = Cli::command()
            .find_subcommand(&name)
            .and_then(|sc| {
                sc.get_arguments()
                    .find(|a| a.get_long() == Some(key))
                    .map(|a| a.get_id().to_string())
            })
            .ok_or_else(|| Failure::Usage(format!("config line {}: unknown flag --{key} for {name}", lineno + 1)))?;
        if sub.value_source(&id) != Some(ValueSource::CommandLine) {
            push_flag(argv, &name, key, value)?;
        }
    }
    Ok(())
}

fn params_json(p: &CheParams) -> Json {
    Json::obj([
        ("gamma", p.gamma.into()),
        ("delta", p.delta.into()),
        ("eps", p.epsilon.into()),
        ("alpha", p.alpha.into()),
        ("q", p.q.into()),
    ])
}

fn violations_json(v: &[Violation]) -> Json {
    Json::Arr(v.iter().map(|x| Json::str(x.to_string())).collect())
}

fn condition_json(c: &TerminationCondition) -> Json {
    Json::obj([
        ("family", Json::str(c.family.name())),
        ("kind", Json::str(c.kind.name())),
        ("n", c.n.into()),
    ])
}

fn execute(cmd: Cmd, stderr: &mut String) -> Result<Output, Failure> {
    match cmd {
        Cmd::Eval1f1 { a, c, x, tol, max_terms } => {
            let ctl = SeriesControl::new(tol, max_terms);
            let sum = kummer::sum_series(KummerArgs::new(a, c, x), ctl)?;
            Ok(Output {
                results: Json::obj([("value", sum.value.into()), ("derivative", sum.derivative.into())]),
                diagnostics: Json::obj([("terms", sum.terms.into()), ("tail", sum.tail.into())]),
                table: None,
            })
        }
        Cmd::VerifyIdentities { a, c, x, identity } => {
            let ids: Vec<Identity> = identity.map_or_else(|| Identity::ALL.to_vec(), |i| vec![i]);
            let ctl = SeriesControl::default();
            let mut rows = Vec::new();
            let mut table = Table::new(&["identity", "residual"]);
            let mut worst = 0.0f64;
            for id in ids {
                let r = kummer::identity_residual(id, a, c, x, ctl)?;
                worst = worst.max(r);
                rows.push(Json::obj([("identity", Json::str(id.name())), ("residual", r.into())]));
                table.rows.push(vec![Json::str(id.name()), r.into()]);
            }
            Ok(Output {
                results: Json::obj([("identities", Json::Arr(rows))]),
                diagnostics: Json::obj([("max_residual", worst.into()), ("pass", (worst <= 1e-10).into())]),
                table: Some(table),
            })
        }
        Cmd::CheSeries {
            family,
            params,
            z,
            terms,
            alpha0,
            s0,
            tol,
            coefficients,
        } => {
            let p = params.che()?;
            let violations = expansions::applicability_with(&p, family, alpha0);
            let sol = expansions::build_series(&p, family, terms, alpha0, s0)?;
            let v = expansions::eval_series(&sol, z, tol)?;
            let residual = che::scaled_residual(&p, v.value, v.derivative, v.second_derivative, z)?;
            let mut results = vec![
                ("value", v.value.into()),
                ("derivative", v.derivative.into()),
                ("second_derivative", v.second_derivative.into()),
                ("alpha0", sol.alpha0().into()),
                ("gamma0", sol.gamma0().into()),
                ("s0", sol.s0().into()),
                ("terms", v.terms.into()),
                ("terminated", sol.terminated.into()),
            ];
            if coefficients {
                results.push(("coefficients", Json::Arr(sol.coefficients.iter().map(|&a| a.into()).collect())));
            }
            Ok(Output {
                results: Json::obj(results),
                diagnostics: Json::obj([
                    ("tail", v.tail.into()),
                    ("residual", residual.into()),
                    ("violations", violations_json(&violations)),
                ]),
                table: None,
            })
        }
        Cmd::Frobenius { params, z, order } => {
            let p = params.che()?;
            let series = che::frobenius_coefficients(&p, order)?;
            let v = che::frobenius_partial_sum(&series, z);
            let residual = che::scaled_residual(&p, v.u, v.du, v.d2u, z)?;
            let warnings = if v.tail > che::FROBENIUS_TAIL_LIMIT {
                stderr.push_str(&format!("warning: truncated series, tail {:e}\n", v.tail));
                vec![Json::str("TruncationWarning")]
            } else {
                Vec::new()
            };
            Ok(Output {
                results: Json::obj([
                    ("value", v.u.into()),
                    ("derivative", v.du.into()),
                    ("second_derivative", v.d2u.into()),
                ]),
                diagnostics: Json::obj([
                    ("tail", v.tail.into()),
                    ("residual", residual.into()),
                    ("warnings", Json::Arr(warnings)),
                ]),
                table: None,
            })
        }
        Cmd::Transform { params } => {
            let p = params.che()?;
            let t = che::transform_1_minus_z(&p);
            let back = che::transform_1_minus_z(&t);
            Ok(Output {
                results: params_json(&t),
                diagnostics: Json::obj([("involution_exact", (back == p).into())]),
                table: None,
            })
        }
        Cmd::DetectTermination {
            family,
            params,
            alpha0,
            all,
        } => {
            let p = params.che_with_q(params.q.unwrap_or_default());
            let violations = expansions::applicability_with(&p, family, alpha0);
            let found = if all {
                termination::detect_all(&p, family, alpha0)
            } else {
                termination::detect_termination(&p, family, alpha0).into_iter().collect()
            };
            let mut table = Table::new(&["family", "kind", "n"]);
            for c in &found {
                table
                    .rows
                    .push(vec![Json::str(c.family.name()), Json::str(c.kind.name()), c.n.into()]);
            }
            Ok(Output {
                results: Json::obj([("conditions", Json::Arr(found.iter().map(condition_json).collect()))]),
                diagnostics: Json::obj([("violations", violations_json(&violations))]),
                table: Some(table),
            })
        }
        Cmd::QSpectrum {
            family,
            params,
            alpha0,
            s0,
            kind,
        } => {
            let p = params.che_with_q(params.q.unwrap_or_default());
            let cond = match kind {
                Some(kind) => {
                    let n = crate::numeric::as_nonpositive_integer(kind.value(&p)).ok_or(Error::Termination(
                        termination::TerminationError::ConditionNotMet(TerminationCondition { family, kind, n: 0 }),
                    ))?;
                    TerminationCondition {
                        family,
                        kind,
                        n: n as usize,
                    }
                }
                None => termination::detect_termination(&p, family, alpha0)
                    .ok_or_else(|| Failure::Usage(format!("no termination condition detected for family {family}; pass --kind")))?,
            };
            if alpha0.is_some() && alpha0 != cond.alpha0() && !(alpha0 == Some(Alpha0::AlphaOverEpsilon) && cond.alpha0().is_none()) {
                return Err(Failure::Usage("--alpha0 does not match the condition's branch".into()));
            }
            let sp = termination::q_spectrum_with_s0(&p, family, cond, s0)?;
            let checks = termination::verify_spectrum(&p, &sp)?;
            let mut table = Table::new(&["root_re", "root_im", "multiplicity", "root_residual", "terminated", "max_residual"]);
            let mut roots = Vec::new();
            for (k, check) in checks.iter().enumerate() {
                table.rows.push(vec![
                    check.root.re.into(),
                    check.root.im.into(),
                    sp.multiplicities[k].into(),
                    sp.root_residuals[k].into(),
                    check.terminated.into(),
                    check.max_residual.into(),
                ]);
                roots.push(Json::obj([
                    ("q", check.root.into()),
                    ("multiplicity", sp.multiplicities[k].into()),
                    ("root_residual", sp.root_residuals[k].into()),
                    ("terminated", check.terminated.into()),
                    ("max_residual", check.max_residual.into()),
                ]));
            }
            Ok(Output {
                results: Json::obj([
                    ("condition", condition_json(&cond)),
                    ("polynomial", Json::Arr(sp.polynomial.iter().map(|&c| c.into()).collect())),
                    ("roots", Json::Arr(roots)),
                ]),
                diagnostics: Json::obj([
                    ("all_terminated", checks.iter().all(|c| c.terminated).into()),
                    ("max_residual", checks.iter().fold(0.0f64, |m, c| m.max(c.max_residual)).into()),
                ]),
                table: Some(table),
            })
        }
        Cmd::TwoState {
            u0,
            delta0,
            delta1,
            family,
            terms,
            t_start,
            t_end,
            steps,
            rows,
        } => two_state(
            LorentzianModel::new(u0, delta0, delta1),
            family,
            terms,
            t_start,
            t_end,
            steps,
            rows,
            stderr,
        ),
        Cmd::ReturnSpectrumScan {
            u0,
            delta1,
            n,
            from,
            to,
            points,
            jobs,
        } => {
            let points = points.max(2);
            let grid: Vec<f64> = (0..points).map(|k| from + (to - from) * k as f64 / (points - 1) as f64).collect();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Failure::Usage(format!("cannot start {jobs} workers: {e}")))?;
            let scan: Vec<(f64, Result<f64, twostate::TwoStateError>)> = pool.install(|| {
                grid.par_iter()
                    .map(|&d0| {
                        let r = if d0.abs() < twostate::MIN_DETUNING {
                            Err(twostate::TwoStateError::EmptyScan)
                        } else {
                            twostate::return_spectrum_relation(LorentzianModel::new(u0, d0, delta1), n)
                        };
                        (d0, r)
                    })
                    .collect()
            });
            let mut table = Table::new(&["delta0", "residual"]);
            let mut out = Vec::new();
            let mut best: Option<(f64, f64)> = None;
            for (d0, r) in scan {
                let value = match r {
                    Ok(v) => {
                        if best.is_none_or(|(_, b)| v < b) {
                            best = Some((d0, v));
                        }
                        Json::Num(v)
                    }
                    Err(twostate::TwoStateError::EmptyScan) => Json::Null,
                    Err(e) => return Err(e.into()),
                };
                table.rows.push(vec![d0.into(), value.clone()]);
                out.push(Json::obj([("delta0", d0.into()), ("residual", value)]));
            }
            let located = twostate::locate_delta0(u0, delta1, n, from, to, points).ok();
            Ok(Output {
                results: Json::obj([("scan", Json::Arr(out))]),
                diagnostics: Json::obj([
                    ("grid_min_delta0", best.map(|b| b.0).into()),
                    ("grid_min_residual", best.map(|b| b.1).into()),
                    ("refined_delta0", located.map(|b| b.0).into()),
                    ("refined_residual", located.map(|b| b.1).into()),
                ]),
                table: Some(table),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn two_state(
    model: LorentzianModel,
    family: Family,
    terms: usize,
    t_start: f64,
    t_end: f64,
    steps: usize,
    rows: usize,
    stderr: &mut String,
) -> Result<Output, Failure> {
    let red = twostate::reduce_to_che(model);
    let times: Vec<f64> = (0..20).map(|k| t_start + (t_end - t_start) * k as f64 / 19.0).collect();
    let reduction_residual = red.verify(&times)?;
    let printed_residual = twostate::printed_reduction(model).verify(&times)?;
    let r = red.r.re;
    let relation = as_natural(r).and_then(|m| twostate::return_spectrum_relation(model, m - 1).ok());

    let closed = ClosedForm::new(model, family, terms).and_then(|f| twostate::compare_with_rk(&f, t_start, t_end, steps).map(|c| (f, c)));
    let from_ground = twostate::integrate_rk(model, t_start, t_end, steps, (C64::new(1.0, 0.0), C64::new(0.0, 0.0)))?;
    let mut warnings = Vec::new();
    let (rk, cf, max_diff, branch_jump, terminated) = match closed {
        Ok((form, cmp)) => {
            let jump = form.branch_jump().ok();
            (cmp.rk, Some(cmp.closed), Some(cmp.max_abs_diff), jump, form.series.terminated)
        }
        Err(e) => {
            let msg = format!("closed form unavailable: {e}");
            stderr.push_str(&format!("warning: {msg}\n"));
            warnings.push(Json::str(msg));
            (from_ground.clone(), None, None, None, None)
        }
    };
    let stride = (steps / rows.saturating_sub(1).max(1)).max(1);
    let mut table = Table::new(&["t", "p1_rk", "p2_rk", "p1_closed", "p2_closed", "a2_diff"]);
    let mut samples = Vec::new();
    for k in (0..rk.times.len()).step_by(stride) {
        let t = rk.times[k];
        let (p1, p2) = (rk.a1[k].norm_sqr(), rk.a2[k].norm_sqr());
        let (c1, c2, d) = match &cf {
            Some(c) => (
                Json::Num(c.a1[k].norm_sqr()),
                Json::Num(c.a2[k].norm_sqr()),
                Json::Num((c.a2[k] - rk.a2[k]).norm()),
            ),
            None => (Json::Null, Json::Null, Json::Null),
        };
        table
            .rows
            .push(vec![t.into(), p1.into(), p2.into(), c1.clone(), c2.clone(), d.clone()]);
        samples.push(Json::obj([
            ("t", t.into()),
            ("p1_rk", p1.into()),
            ("p2_rk", p2.into()),
            ("p1_closed", c1),
            ("p2_closed", c2),
            ("a2_diff", d),
        ]));
    }
    let final_p2 = from_ground.a2.last().map_or(0.0, |a| a.norm_sqr());
    Ok(Output {
        results: Json::obj([
            ("rabi_frequency", r.into()),
            ("che", params_json(&red.che)),
            ("exp_alpha1", red.exp_alpha1.into()),
            ("exp_alpha2", red.exp_alpha2.into()),
            ("terminated", terminated.into()),
            ("trajectory", Json::Arr(samples)),
        ]),
        diagnostics: Json::obj([
            ("reduction_residual", reduction_residual.into()),
            ("printed_r_residual", printed_residual.into()),
            ("spectrum_relation", relation.into()),
            ("max_abs_diff", max_diff.into()),
            ("norm_deviation", rk.norm_deviation().into()),
            ("branch_jump", branch_jump.into()),
            ("final_p2_from_ground", final_p2.into()),
            ("warnings", Json::Arr(warnings)),
        ]),
        table: Some(table),
    })
}

fn as_natural(r: f64) -> Option<usize> {
    let m = r.round();
    (m >= 1.0 && (r - m).abs() <= crate::numeric::INTEGER_TOL).then_some(m as usize)
}
