//! Command-line front end: parses NC rational expressions, compiles and
//! minimizes realizations, evaluates transfer functions, runs the entire
//! constructions and the spectral probes. All payloads are the versioned
//! JSON formats from `ncrealize::json`; inputs come from a file argument or
//! stdin, one JSON document goes to stdout.
//!
//! Exit codes: 1 usage, 2 parse/validation, 3 numerical domain error.
//! Errors are also emitted as machine-readable JSON on stderr.

use std::io::Read;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ncrealize::entire::ConstructionOptions;
use ncrealize::json::{
    AnyRealization, DensityReportJson, MatCentreJson, MatrixJson, PoleReportJson, RealizationJson,
    SeriesJson, TupleJson, SCHEMA,
};
use ncrealize::{expr, Error, MatrixTuple, Word};

#[derive(Parser)]
#[command(
    name = "ncrealize",
    about = "Realization calculus for noncommutative analytic functions",
    version
)]
struct Cli {
    /// Seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Default truncation degree for coefficient extraction.
    #[arg(long, global = true, default_value_t = 6)]
    degree: usize,

    /// Inversion-admissibility tolerance override.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and echo its canonical form.
    Parse {
        expr: String,
        /// Alphabet size to validate variable indices against.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Compile an expression to an FM realization.
    Compile {
        expr: String,
        #[arg(long)]
        d: usize,
    },
    /// Kalman-minimize a realization (kind is preserved).
    Minimize {
        /// Realization JSON file; defaults to stdin.
        input: Option<String>,
    },
    /// Evaluate a realization at a matrix tuple.
    Eval {
        input: Option<String>,
        /// Tuple JSON file.
        #[arg(long)]
        at: String,
    },
    /// Extract series coefficients from a realization.
    Coeffs {
        input: Option<String>,
        /// Highest word length to report.
        #[arg(long)]
        up_to: Option<usize>,
    },
    /// Interpret an expression directly over truncated series (the oracle).
    Series {
        expr: String,
        #[arg(long)]
        d: usize,
    },
    /// Hadamard-type radius estimate of a series.
    Radius { input: Option<String> },
    /// Build the weighted-block realization of an entire function.
    EntireConstruct {
        /// Series JSON file; defaults to stdin.
        input: Option<String>,
        /// Truncation degree N.
        #[arg(long, short = 'N')]
        degree: usize,
        /// State-dimension cap override.
        #[arg(long)]
        cap: Option<usize>,
        /// Root-branch rotation (coefficients are invariant).
        #[arg(long, default_value_t = 0)]
        branch: usize,
    },
    /// Recentre an FM realization at a matrix point.
    Recenter {
        input: Option<String>,
        /// Centre tuple JSON file.
        #[arg(long)]
        centre: String,
    },
    /// Taylor-Taylor terms of a matrix-centre realization.
    Tt {
        /// Matrix-centre JSON file; defaults to stdin.
        input: Option<String>,
        /// Direction tuple JSON file (level = centre level).
        #[arg(long)]
        direction: String,
        /// Single word, comma-separated letters (e.g. "1,2").
        #[arg(long)]
        word: Option<String>,
        /// Emit the full term table up to this word length.
        #[arg(long)]
        up_to: Option<usize>,
    },
    /// Pole candidates of the restriction z -> f(zX).
    Poles {
        input: Option<String>,
        /// Tuple JSON file.
        #[arg(long)]
        at: String,
    },
    /// Zariski-density probe of the invertibility domain.
    Probe {
        input: Option<String>,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Joint-spectral-radius sequence of the state tuple.
    Jsr {
        input: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_m: usize,
    },
    /// Schatten p-norm of a matrix.
    Schatten {
        input: Option<String>,
        #[arg(long)]
        p: f64,
    },
}

fn main() {
    // usage errors exit 1; help and version print normally
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            err.print().expect("write usage error");
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string(&value).expect("serializable output")
            );
        }
        Err(err) => {
            let exit = exit_code(&err);
            let payload = json!({
                "error": {
                    "schema": SCHEMA,
                    "code": error_code(&err),
                    "exit": exit,
                    "message": err.to_string(),
                }
            });
            eprintln!("{payload}");
            std::process::exit(exit);
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::LetterOutOfRange { .. }
        | Error::AlphabetMismatch { .. }
        | Error::ShapeMismatch(_)
        | Error::InvalidParameter(_)
        | Error::DegreeTooSmall { .. }
        | Error::DimensionCap { .. } => 2,
        Error::SingularPencil { .. }
        | Error::NotInvertibleAtZero { .. }
        | Error::NotAnalyticAtZero { .. }
        | Error::NotInvertibleAtCentre { .. }
        | Error::EigenFailure(_)
        | Error::NotMinimal { .. }
        | Error::CoefficientMismatch { .. }
        | Error::NotSimilar { .. }
        | Error::Structural(_) => 3,
    }
}

fn error_code(err: &Error) -> &'static str {
    match err {
        Error::Parse { .. } => "parse",
        Error::LetterOutOfRange { .. } => "letter-out-of-range",
        Error::AlphabetMismatch { .. } => "alphabet-mismatch",
        Error::ShapeMismatch(_) => "shape-mismatch",
        Error::InvalidParameter(_) => "invalid-parameter",
        Error::DegreeTooSmall { .. } => "degree-too-small",
        Error::DimensionCap { .. } => "dimension-cap",
        Error::SingularPencil { .. } => "singular-pencil",
        Error::NotInvertibleAtZero { .. } => "not-invertible-at-0",
        Error::NotAnalyticAtZero { .. } => "not-analytic-at-0",
        Error::NotInvertibleAtCentre { .. } => "not-invertible-at-centre",
        Error::EigenFailure(_) => "eigen-failure",
        Error::NotMinimal { .. } => "not-minimal",
        Error::CoefficientMismatch { .. } => "coefficient-mismatch",
        Error::NotSimilar { .. } => "not-similar",
        Error::Structural(_) => "structural",
    }
}

fn read_input(path: &Option<String>) -> Result<String, Error> {
    match path.as_deref() {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidParameter(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {p}: {e}"))),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("malformed JSON: {e}")))
}

fn load_realization(path: &Option<String>) -> Result<AnyRealization, Error> {
    let text = read_input(path)?;
    parse_json::<RealizationJson>(&text)?.into_realization()
}

fn load_tuple(path: &str) -> Result<MatrixTuple, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read tuple file {path}: {e}")))?;
    parse_json::<TupleJson>(&text)?.into_tuple()
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable payload")
}

fn run(cli: Cli) -> Result<Value, Error> {
    match cli.command {
        Command::Parse { expr: text, d } => {
            let ast = match d {
                Some(d) => expr::parse_with_alphabet(&text, d)?,
                None => expr::parse(&text)?,
            };
            Ok(json!({
                "schema": SCHEMA,
                "kind": "expr",
                "input": text,
                "canonical": expr::print(&ast),
                "max_var": ast.max_var(),
                "depth": ast.depth(),
            }))
        }
        Command::Compile { expr: text, d } => {
            let ast = expr::parse_with_alphabet(&text, d)?;
            let fm = expr::compile_with_tolerance(&ast, d, cli.tolerance)?;
            Ok(to_value(&RealizationJson::from_fm(&fm)))
        }
        Command::Minimize { input } => match load_realization(&input)? {
            AnyRealization::Descriptor(r) => {
                let ranks = ncrealize::minimal::minimality_report(&r);
                let out = ncrealize::minimal::kalman_minimize(&r);
                let mut payload = to_value(&RealizationJson::from_descriptor(&out.realization));
                payload["minimize_report"] = json!({
                    "input_dim": out.input_dim,
                    "controllable_rank": ranks.controllable_rank,
                    "observable_rank": ranks.observable_rank,
                    "minimal_dim": out.minimal_dim,
                });
                Ok(payload)
            }
            AnyRealization::Fm(r) => {
                let ranks = ncrealize::minimal::minimality_report_fm(&r);
                let out = ncrealize::minimal::kalman_minimize_fm(&r);
                let mut payload = to_value(&RealizationJson::from_fm(&out));
                payload["minimize_report"] = json!({
                    "input_dim": r.dim(),
                    "controllable_rank": ranks.controllable_rank,
                    "observable_rank": ranks.observable_rank,
                    "minimal_dim": out.dim(),
                });
                Ok(payload)
            }
        },
        Command::Eval { input, at } => {
            let any = load_realization(&input)?;
            let x = load_tuple(&at)?;
            let value = match &any {
                AnyRealization::Descriptor(r) => r.eval(&x)?,
                AnyRealization::Fm(r) => r.eval(&x)?,
            };
            Ok(to_value(&MatrixJson::from_matrix(&value)))
        }
        Command::Coeffs { input, up_to } => {
            let any = load_realization(&input)?;
            let degree = up_to.unwrap_or(cli.degree);
            Ok(to_value(&SeriesJson::from_series(&any.series(degree))))
        }
        Command::Series { expr: text, d } => {
            let ast = expr::parse_with_alphabet(&text, d)?;
            let series = expr::interpret_series(&ast, d, cli.degree)?;
            Ok(to_value(&SeriesJson::from_series(&series)))
        }
        Command::Radius { input } => {
            let text = read_input(&input)?;
            let series = parse_json::<SeriesJson>(&text)?.into_series()?;
            let est = series.radius_estimate();
            Ok(json!({
                "schema": SCHEMA,
                "per_degree": est.per_degree,
                "infinite": est.radius.is_infinite(),
                "radius": if est.radius.is_finite() { Some(est.radius) } else { None },
            }))
        }
        Command::EntireConstruct {
            input,
            degree,
            cap,
            branch,
        } => {
            let text = read_input(&input)?;
            let series = parse_json::<SeriesJson>(&text)?.into_series()?;
            let opts = ConstructionOptions {
                dimension_cap: cap.unwrap_or(ncrealize::entire::DIMENSION_CAP),
                branch_offset: branch,
            };
            let (r, cert) = ncrealize::entire::quasinilpotent_nc_with(&series, degree, opts)?;
            Ok(to_value(
                &RealizationJson::from_descriptor(&r).with_certificate(&cert),
            ))
        }
        Command::Recenter { input, centre } => {
            let fm = match load_realization(&input)? {
                AnyRealization::Fm(fm) => fm,
                AnyRealization::Descriptor(r) => ncrealize::realization::fm_from_descriptor(&r),
            };
            let y = load_tuple(&centre)?;
            Ok(to_value(&MatCentreJson::build(&fm, &y)?))
        }
        Command::Tt {
            input,
            direction,
            word,
            up_to,
        } => {
            let text = read_input(&input)?;
            let (mc, _) = parse_json::<MatCentreJson>(&text)?.into_matcentre()?;
            let h = load_tuple(&direction)?;
            match (word, up_to) {
                (Some(w), None) => {
                    let word = parse_word(&w)?;
                    let term = mc.tt_term(&word, &h)?;
                    Ok(json!({
                        "schema": SCHEMA,
                        "word": word.letters(),
                        "term": to_value(&MatrixJson::from_matrix(&term)),
                    }))
                }
                (None, up_to) => {
                    let bound = up_to.unwrap_or(2);
                    let mut terms = Vec::new();
                    for word in Word::all_up_to_length(mc.d(), bound) {
                        let term = mc.tt_term(&word, &h)?;
                        terms.push(json!({
                            "word": word.letters(),
                            "term": to_value(&MatrixJson::from_matrix(&term)),
                        }));
                    }
                    Ok(json!({ "schema": SCHEMA, "terms": terms }))
                }
                (Some(_), Some(_)) => Err(Error::InvalidParameter(
                    "pass either --word or --up-to, not both".into(),
                )),
            }
        }
        Command::Poles { input, at } => {
            let r = load_realization(&input)?.into_descriptor();
            let x = load_tuple(&at)?;
            let report = ncrealize::spectral::restriction_poles(&r, &x)?;
            Ok(to_value(&PoleReportJson::from_report(&report)))
        }
        Command::Probe {
            input,
            level,
            trials,
        } => {
            let any = load_realization(&input)?;
            let report = ncrealize::spectral::zariski_probe(
                any.state_matrices(),
                any.d(),
                level,
                trials,
                cli.seed,
            )?;
            Ok(to_value(&DensityReportJson::from_report(&report)))
        }
        Command::Jsr { input, max_m } => {
            let any = load_realization(&input)?;
            let report = ncrealize::entire::joint_spectral_radius(any.state_matrices(), max_m);
            Ok(json!({
                "schema": SCHEMA,
                "rho": report.rho,
                "estimate": report.estimate,
                "vanished_at": report.vanished_at,
            }))
        }
        Command::Schatten { input, p } => {
            let text = read_input(&input)?;
            let m = parse_json::<MatrixJson>(&text)?.into_matrix()?;
            let value = ncrealize::spectral::schatten_norm(&m, p)?;
            Ok(json!({ "schema": SCHEMA, "p": p, "value": value }))
        }
    }
}

fn parse_word(text: &str) -> Result<Word, Error> {
    let letters = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidParameter(format!("bad word letter {s:?}")))
        })
        .collect::<Result<Vec<u32>, Error>>()?;
    if letters.iter().any(|&l| l == 0) {
        return Err(Error::InvalidParameter("word letters start at 1".into()));
    }
    Ok(Word::new(letters))
}
