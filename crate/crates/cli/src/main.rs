//! `symplectic`: command-line front end for the symplectic-type library.
//!
//! Every subcommand prints a JSON envelope (default) or a plain-text table.
//! Exit status: 0 for a determined/computed result, 2 when the requested
//! computation is well-posed but not applicable (e.g. no criterion reached a
//! consensus), 1 for input or library errors.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};
use symplectic_core::criteria::{compare, criterion_exists, Mat};
use symplectic_core::curve_core::{minimal_model_at, standard_invariants};
use symplectic_core::diophantine::{
    hyperelliptic_parity_argument, scan_residual_pairs, ScanVerdict,
};
use symplectic_core::goodred::{hilbert_class_poly, FpCurve, FrobeniusData};
use symplectic_core::reduction::classify;
use symplectic_core::torsion_oracle::{
    frobenius_matrix, oracle_symplectic_type, SymplecticType,
};
use symplectic_core::{Error, WeierstrassModel};

#[derive(Parser)]
#[command(name = "symplectic", version, about = "Symplectic types of p-torsion isomorphisms of elliptic curves over Q")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "text"])]
    format: String,
    /// Rayon thread count for parallel subcommands (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Path to a JSON fixture catalogue (label -> [a1,a2,a3,a4,a6]).
    #[arg(long, global = true)]
    fixtures: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CurvePair {
    /// First curve: JSON array of 5 integers [a1,a2,a3,a4,a6] or 2 integers
    /// [a,b] for y^2 = x^3 + ax + b.
    #[arg(long)]
    curve1: String,
    /// Second curve, same format.
    #[arg(long)]
    curve2: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print c4, c6, discriminant and j-invariant of a curve.
    Invariants {
        #[arg(long)]
        curve: String,
    },
    /// Classify the reduction of a curve at a prime l.
    Classify {
        #[arg(long)]
        curve: String,
        #[arg(short = 'l', long)]
        l: u64,
    },
    /// Determine the symplectic type of a p-torsion isomorphism between two
    /// curves from the local criteria.
    Compare {
        #[command(flatten)]
        curves: CurvePair,
        #[arg(short = 'p', long)]
        p: u64,
        /// Also try the good-reduction criterion at every prime up to this
        /// bound.
        #[arg(long, default_value_t = 0)]
        good_bound: u64,
    },
    /// Print the aggregated class polynomial of a discriminant D <= 0.
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Frobenius data of a curve with good reduction at l: trace,
    /// discriminant, beta, and the mod-p matrix.
    Frobenius {
        #[arg(long)]
        curve: String,
        #[arg(short = 'l', long)]
        l: u64,
        #[arg(short = 'p', long)]
        p: u64,
    },
    /// Brute-force oracle: mod-p Frobenius matrices of both curves over a
    /// common torsion field and the set of realized symplectic types.
    Oracle {
        #[command(flatten)]
        curves: CurvePair,
        #[arg(short = 'l', long)]
        l: u64,
        #[arg(short = 'p', long)]
        p: u64,
    },
    /// Scan all residual Frey curves mod l against a fixture curve W and
    /// report whether the anti-symplectic option is eliminated.
    FreyScan {
        /// Residual characteristic p of the representation.
        p: u64,
        /// Fixture label of the curve W (see --fixtures).
        w_tag: String,
        /// Scan prime l.
        l: u64,
    },
    /// Hyperelliptic parity chain: the forced value of (2/p) for the stated
    /// curve family.
    Hyper {
        l: u64,
        /// 1 for y^2 = x^p - l, 2 for y^2 = x^p - 2l.
        variant: u8,
    },
    /// Existence gate: whether a symplectic criterion exists for the
    /// subgroup of GL2(F_p) generated by the given matrices.
    Exists {
        /// Generator matrix as a JSON array [[a,b],[c,d]]; repeatable.
        #[arg(long = "matrix", required = true)]
        matrices: Vec<String>,
        #[arg(short = 'p', long)]
        p: u64,
    },
}

fn parse_curve(text: &str) -> Result<WeierstrassModel, Error> {
    let values: Vec<BigInt> = if let Ok(ints) = serde_json::from_str::<Vec<i128>>(text) {
        ints.into_iter().map(BigInt::from).collect()
    } else {
        // Fall back to decimal strings for coefficients beyond i128.
        let strings: Vec<String> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("cannot parse curve {text}: {e}")))?;
        strings
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e| Error::InvalidInput(format!("bad integer {s}: {e}")))
            })
            .collect::<Result<_, _>>()?
    };
    match values.len() {
        5 => Ok(WeierstrassModel::from_integers([
            values[0].clone(),
            values[1].clone(),
            values[2].clone(),
            values[3].clone(),
            values[4].clone(),
        ])),
        2 => Ok(WeierstrassModel::from_integers([
            BigInt::from(0),
            BigInt::from(0),
            BigInt::from(0),
            values[0].clone(),
            values[1].clone(),
        ])),
        n => Err(Error::InvalidInput(format!(
            "curve needs 5 coefficients or 2 short-form coefficients, got {n}"
        ))),
    }
}

fn parse_matrix(text: &str, p: u64) -> Result<Mat, Error> {
    let m: [[i64; 2]; 2] = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("cannot parse matrix {text}: {e}")))?;
    let pm = |x: i64| x.rem_euclid(p as i64) as u64;
    Ok([[pm(m[0][0]), pm(m[0][1])], [pm(m[1][0]), pm(m[1][1])]])
}

fn fixture_table(path: &Option<String>) -> Result<BTreeMap<String, [i64; 5]>, Error> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read {p}: {e}")))?;
            symplectic_core::fixtures::parse_catalogue(&text)
        }
        None => Ok(symplectic_core::fixtures::all().clone()),
    }
}

fn type_name(t: SymplecticType) -> &'static str {
    match t {
        SymplecticType::Symplectic => "symplectic",
        SymplecticType::AntiSymplectic => "anti-symplectic",
    }
}

/// Result of a subcommand: the JSON payload, lines for text mode, and
/// whether the outcome was "not applicable" (exit status 2).
struct Report {
    payload: Value,
    text: Vec<String>,
    not_applicable: bool,
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Invariants { curve } => {
            let model = parse_curve(curve)?;
            let inv = standard_invariants(&model)?;
            let j = format!("{}", inv.j);
            let payload = json!({
                "c4": inv.c4.to_integer().to_string(),
                "c6": inv.c6.to_integer().to_string(),
                "delta": inv.delta.to_integer().to_string(),
                "j": j,
            });
            let text = vec![
                format!("c4    = {}", inv.c4.to_integer()),
                format!("c6    = {}", inv.c6.to_integer()),
                format!("delta = {}", inv.delta.to_integer()),
                format!("j     = {j}"),
            ];
            Ok(Report { payload, text, not_applicable: false })
        }
        Command::Classify { curve, l } => {
            let model = parse_curve(curve)?;
            let class = classify(&model, *l)?;
            let text = vec![format!(
                "l = {}: {:?}, e = {:?}, inertia = {:?}, conductor exponent = {}, row = {:?}, twist = {:?}",
                class.prime, class.kind, class.e, class.inertia,
                class.conductor_exponent, class.row, class.twist
            )];
            Ok(Report {
                payload: serde_json::to_value(&class).unwrap(),
                text,
                not_applicable: false,
            })
        }
        Command::Compare { curves, p, good_bound } => {
            let e1 = parse_curve(&curves.curve1)?;
            let e2 = parse_curve(&curves.curve2)?;
            let rep = compare(&e1, &e2, *p, *good_bound)?;
            let mut text = vec![format!(
                "{:>6}  {:<10} {:>2} {:>2}  {:<16} reason",
                "prime", "criterion", "r", "t", "outcome"
            )];
            for v in &rep.verdicts {
                text.push(format!(
                    "{:>6}  {:<10} {:>2} {:>2}  {:<16} {}",
                    v.prime,
                    v.criterion.clone().unwrap_or_else(|| "-".into()),
                    v.r.map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
                    v.t.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
                    format!("{:?}", v.outcome),
                    v.reason,
                ));
            }
            text.push(match rep.consensus {
                Some(c) => format!("consensus: {c:?}"),
                None => "consensus: none".to_string(),
            });
            let not_applicable = rep.consensus.is_none();
            Ok(Report {
                payload: serde_json::to_value(&rep).unwrap(),
                text,
                not_applicable,
            })
        }
        Command::Hilbert { d } => {
            let poly = hilbert_class_poly(*d)?;
            let pretty = poly.to_string_pretty();
            let payload = json!({
                "coefficients": poly.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "discriminant": poly.discriminant,
                "pretty": pretty,
            });
            Ok(Report { payload, text: vec![pretty], not_applicable: false })
        }
        Command::Frobenius { curve, l, p } => {
            let model = parse_curve(curve)?;
            let (minimal, _) = minimal_model_at(&model, *l)?;
            let reduced = FpCurve::reduce(&minimal, *l)?;
            let fd = FrobeniusData::from_fp_curve(&reduced)?;
            let matrix = fd.frobenius_matrix(*p)?;
            let payload = json!({
                "a_l": fd.a_l,
                "beta_l": fd.beta_l,
                "delta_l": fd.delta_l,
                "l": *l,
                "matrix": matrix,
                "p": *p,
            });
            let text = vec![
                format!("a_{l} = {}, delta_{l} = {}, beta_{l} = {}", fd.a_l, fd.delta_l, fd.beta_l),
                format!("frobenius matrix mod {p}: {matrix:?}"),
            ];
            Ok(Report { payload, text, not_applicable: false })
        }
        Command::Oracle { curves, l, p } => {
            let e1 = parse_curve(&curves.curve1)?;
            let e2 = parse_curve(&curves.curve2)?;
            let (m1, _) = minimal_model_at(&e1, *l)?;
            let (m2, _) = minimal_model_at(&e2, *l)?;
            let mat1 = frobenius_matrix(&FpCurve::reduce(&m1, *l)?, *p)?;
            let mat2 = frobenius_matrix(&FpCurve::reduce(&m2, *l)?, *p)?;
            let types = oracle_symplectic_type(&e1, &e2, *l, *p)?;
            let names: Vec<&str> = types.iter().map(|&t| type_name(t)).collect();
            let payload = json!({
                "l": *l,
                "matrix1": mat1,
                "matrix2": mat2,
                "p": *p,
                "types": names,
            });
            let text = vec![
                format!("matrix 1 mod {p}: {mat1:?}"),
                format!("matrix 2 mod {p}: {mat2:?}"),
                format!("symplectic types: {names:?}"),
            ];
            Ok(Report { payload, text, not_applicable: false })
        }
        Command::FreyScan { p, w_tag, l } => {
            let table = fixture_table(&cli.fixtures)?;
            let w = symplectic_core::fixtures::fixture_from(&table, w_tag)?;
            let rep = scan_residual_pairs(&w, *l, *p)?;
            let mut text = vec![format!(
                "W = {w_tag}, l = {l}, p = {p}: a_l = {}, {} matches",
                rep.w_trace,
                rep.matches.len()
            )];
            for m in &rep.matches {
                text.push(format!(
                    "  d = {}, (a, b) = ({}, {}), trace = {}, isomorphic = {}",
                    m.d, m.a, m.b, m.trace, m.isomorphic
                ));
            }
            text.push(format!("verdict: {:?}", rep.verdict));
            let not_applicable = rep.verdict != ScanVerdict::Eliminated;
            Ok(Report {
                payload: serde_json::to_value(&rep).unwrap(),
                text,
                not_applicable,
            })
        }
        Command::Hyper { l, variant } => {
            let force = hyperelliptic_parity_argument(*l, *variant)?;
            let text = vec![
                format!("l = {l}, variant {variant}: forced (2/p) = {}", force.forced_symbol),
                format!("comparison curves: {:?}", force.comparison_curves),
                force.detail.clone(),
            ];
            Ok(Report {
                payload: serde_json::to_value(&force).unwrap(),
                text,
                not_applicable: false,
            })
        }
        Command::Exists { matrices, p } => {
            let gens: Vec<Mat> = matrices
                .iter()
                .map(|m| parse_matrix(m, *p))
                .collect::<Result<_, _>>()?;
            let rep = criterion_exists(&gens, *p)?;
            let text = vec![format!(
                "group order {}: centralizer order {}, criterion {}{}",
                rep.group_order,
                rep.centralizer_order,
                if rep.exists { "exists" } else { "does not exist" },
                rep.pattern
                    .as_ref()
                    .map(|pat| format!(" (pattern {pat:?})"))
                    .unwrap_or_default(),
            )];
            Ok(Report {
                payload: serde_json::to_value(&rep).unwrap(),
                text,
                not_applicable: false,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(report) => {
            if cli.format == "json" {
                let mut envelope = serde_json::Map::new();
                envelope.insert("schema".to_string(), json!(1));
                envelope.insert("result".to_string(), report.payload);
                println!("{}", serde_json::to_string_pretty(&Value::Object(envelope)).unwrap());
            } else {
                for line in report.text {
                    println!("{line}");
                }
            }
            if report.not_applicable {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            let envelope = json!({
                "error": { "code": err.code(), "message": err.to_string() },
                "schema": 1,
            });
            eprintln!("{}", serde_json::to_string_pretty(&envelope).unwrap());
            ExitCode::from(1)
        }
    }
}
