use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semicert::certkit::{
    verify_certificate, CoveringStatus, IdentityStatus, PiecewiseCertificate, VerificationReport,
    VerifyOptions, WeightStatus,
};
use semicert::construct::{cover_sphere, CoverOptions};
use semicert::detrepr::{
    quadratic_determinantal_representation, verify_determinantal_representation, DEFAULT_TOLERANCE,
};
use semicert::domination::univariate_certificate_at_zero;
use semicert::domination::{
    check_domination, orthant_certificate_from_domination, DominationOutcome,
};
use semicert::gallery::{run_gallery_with, DEFAULT_SAMPLES};
use semicert::matpoly::{smith_normal_form, NamedMatrix, NamedPolynomial};
use semicert::poly::rational::{fmt_rational, parse_rational};
use semicert::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(
    name = "semicert",
    version,
    about = "Piecewise semi-certificates of positivity for matrix polynomials"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a certificate file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cover the unit sphere for a positive definite form matrix.
    Construct {
        matrix: PathBuf,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value = "3/4")]
        cap_shrink: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the domination condition at a point and build the orthant certificate.
    Domination {
        matrix: PathBuf,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Comma-separated signs (+1/-1 or +/-); all positive by default.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smith normal form of a univariate matrix polynomial.
    Smith { matrix: PathBuf },
    /// Certificate on [0, δ] for a univariate matrix psd near 0+.
    ZeroPlus {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagonal quadratic determinantal representation of a psd univariate polynomial.
    Detrep {
        poly: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Check det M = f exactly and M psd at sampled points.
    DetrepVerify {
        matrix: PathBuf,
        poly: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in gallery.
    Gallery {
        /// Only items whose id contains this.
        filter: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

/// What a command printed, and whether all its checks passed.
struct Outcome {
    passed: bool,
    text: String,
    structured: Value,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Result<()> {
    fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|t| parse_rational(t.trim())).collect()
}

fn parse_signs(s: &str) -> Result<Vec<i8>> {
    s.split(',')
        .map(|t| match t.trim() {
            "+" | "1" | "+1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(Error::InvalidArgument(format!("bad sign `{other}`"))),
        })
        .collect()
}

fn points(p: &[Rational]) -> Value {
    json!(p.iter().map(fmt_rational).collect::<Vec<_>>())
}

fn report_json(r: &VerificationReport) -> Value {
    let pieces: Vec<Value> = r
        .pieces
        .iter()
        .map(|p| {
            let identity = match &p.identity {
                IdentityStatus::Exact => json!({"status": "exact"}),
                IdentityStatus::Mismatch {
                    entry,
                    witness,
                    residual,
                } => json!({
                    "status": "fail",
                    "entry": [entry.0, entry.1],
                    "witness": points(witness),
                    "residual": fmt_rational(residual),
                }),
            };
            let weights: Vec<Value> = p
                .terms
                .iter()
                .map(|t| match &t.weight {
                    WeightStatus::ProvedExact => json!({"status": "proved"}),
                    WeightStatus::SampledOnly {
                        samples, accepted, ..
                    } => {
                        json!({"status": "sampled", "samples": samples, "accepted": accepted})
                    }
                    WeightStatus::Failed { witness, reason } => {
                        json!({"status": "fail", "witness": points(witness), "reason": reason})
                    }
                })
                .collect();
            json!({"label": p.label, "identity": identity, "weights": weights})
        })
        .collect();
    let covering = match &r.covering {
        CoveringStatus::NotClaimed => json!({"status": "not-claimed"}),
        CoveringStatus::Sampled { samples, uncovered } => json!({
            "status": if uncovered.is_some() { "fail" } else { "sampled" },
            "samples": samples,
            "uncovered": uncovered.as_deref().map(points),
        }),
    };
    json!({
        "passed": r.passed(),
        "identities_exact": r.identities_exact(),
        "weights_exact": r.weights_exact(),
        "factors_ok": r.factors_ok(),
        "pieces": pieces,
        "covering": covering,
    })
}

fn verified(
    cert: &PiecewiseCertificate,
    opts: &VerifyOptions,
    out: Option<&Path>,
    header: String,
) -> Result<Outcome> {
    let r = verify_certificate(cert, opts)?;
    let text = cert.to_text();
    let mut shown = header;
    match out {
        Some(path) => {
            write(path, &text)?;
            shown.push_str(&format!("certificate written to {}\n", path.display()));
        }
        None => {
            shown.push_str(&text);
            shown.push('\n');
        }
    }
    shown.push_str(&r.to_string());
    Ok(Outcome {
        passed: r.passed(),
        text: shown,
        structured: json!({
            "pieces": cert.pieces.len(),
            "verification": report_json(&r),
            "certificate": if out.is_none() { serde_json::from_str::<Value>(&text).ok() } else { None },
        }),
    })
}

fn matrix_file(path: &Path) -> Result<NamedMatrix> {
    NamedMatrix::parse(&read(path)?)
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Verify {
            file,
            samples,
            seed,
        } => {
            let cert = PiecewiseCertificate::parse(&read(&file)?)?;
            let r = verify_certificate(
                &cert,
                &VerifyOptions {
                    samples,
                    seed,
                    ..VerifyOptions::default()
                },
            )?;
            Ok(Outcome {
                passed: r.passed(),
                text: format!("{r}\n{}", if r.passed() { "PASS" } else { "FAIL" }),
                structured: report_json(&r),
            })
        }
        Command::Construct {
            matrix,
            grid,
            cap_shrink,
            out,
        } => {
            let m = matrix_file(&matrix)?;
            let opts = CoverOptions {
                grid,
                cap_shrink: parse_rational(&cap_shrink)?,
                ..CoverOptions::default()
            };
            let cert = cover_sphere(&m.matrix, &m.vars, &opts)?;
            verified(
                &cert,
                &VerifyOptions::default(),
                out.as_deref(),
                format!("{} caps\n", cert.pieces.len()),
            )
        }
        Command::Domination {
            matrix,
            point,
            signs,
            out,
        } => {
            let m = matrix_file(&matrix)?;
            let x0 = parse_point(&point)?;
            let signs = match signs {
                Some(s) => parse_signs(&s)?,
                None => vec![1; x0.len()],
            };
            match check_domination(&m.matrix, &x0)? {
                DominationOutcome::Fails { alpha } => Ok(Outcome {
                    passed: false,
                    text: format!("domination fails at alpha = {alpha}"),
                    structured: json!({"satisfied": false, "alpha": alpha.0}),
                }),
                DominationOutcome::Satisfied(w) => {
                    let gamma: Vec<Vec<u32>> = w.gamma.indices().into_iter().map(|a| a.0).collect();
                    let (cert, orthant) =
                        orthant_certificate_from_domination(&m.matrix, &signs, &w, &m.vars)?;
                    let header = format!(
                        "domination holds; Gamma = {}; orthant radius {}\n",
                        w.gamma
                            .indices()
                            .iter()
                            .map(|a| a.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        fmt_rational(&orthant.radius)
                    );
                    let mut o = verified(&cert, &VerifyOptions::default(), out.as_deref(), header)?;
                    o.structured["satisfied"] = json!(true);
                    o.structured["gamma"] = json!(gamma);
                    o.structured["radius"] = json!(fmt_rational(&orthant.radius));
                    Ok(o)
                }
            }
        }
        Command::Smith { matrix } => {
            let m = matrix_file(&matrix)?;
            let s = smith_normal_form(&m.matrix)?;
            let check = s.check(&m.matrix);
            let show = |x: &semicert::matpoly::MatrixPolynomial| {
                NamedMatrix {
                    vars: m.vars.clone(),
                    matrix: x.clone(),
                }
                .to_text()
            };
            let var = m.vars[0].as_str();
            let d: Vec<String> =
                s.d.iter()
                    .map(|p| p.to_polynomial(1, 0).to_string_with(&[var]))
                    .collect();
            let status = match &check {
                Ok(()) => "E·D·F = M, E and F unimodular, divisibility chain holds".to_string(),
                Err(e) => format!("check FAILED: {e}"),
            };
            Ok(Outcome {
                passed: check.is_ok(),
                text: format!(
                    "D = diag({})\nE:\n{}F:\n{}{status}",
                    d.join(", "),
                    show(&s.e),
                    show(&s.f)
                ),
                structured: json!({
                    "d": d,
                    "e": show(&s.e),
                    "f": show(&s.f),
                    "rank": s.rank(),
                    "passed": check.is_ok(),
                }),
            })
        }
        Command::ZeroPlus { matrix, out } => {
            let m = matrix_file(&matrix)?;
            let cert = univariate_certificate_at_zero(&m.matrix, &m.vars)?;
            verified(
                &cert,
                &VerifyOptions::default(),
                out.as_deref(),
                String::new(),
            )
        }
        Command::Detrep { poly, tol } => {
            let f = NamedPolynomial::parse(&read(&poly)?)?;
            let rep = quadratic_determinantal_representation(&f.poly)?;
            let passed = rep.within(tol);
            let matrix = NamedMatrix {
                vars: f.vars.clone(),
                matrix: rep.matrix.clone(),
            }
            .to_text();
            Ok(Outcome {
                passed,
                text: format!(
                    "{matrix}relative residual {:e}{}{}",
                    rep.relative_residual,
                    if rep.residual_exact_zero {
                        " (exact)"
                    } else {
                        ""
                    },
                    if passed { "" } else { " exceeds the tolerance" }
                ),
                structured: json!({
                    "matrix": matrix,
                    "relative_residual": rep.relative_residual,
                    "exact": rep.residual_exact_zero,
                    "passed": passed,
                }),
            })
        }
        Command::DetrepVerify {
            matrix,
            poly,
            samples,
            seed,
        } => {
            let m = matrix_file(&matrix)?;
            let f = NamedPolynomial::parse(&read(&poly)?)?;
            if m.vars != f.vars {
                return Err(Error::InvalidArgument(
                    "matrix and polynomial declare different variables".into(),
                ));
            }
            let c = verify_determinantal_representation(&m.matrix, &f.poly, samples, seed)?;
            let mut text = format!(
                "determinant {}\n",
                if c.determinant_matches {
                    "matches exactly"
                } else {
                    "DIFFERS"
                }
            );
            match &c.psd_witness {
                None => text.push_str(&format!("psd at {samples} sampled points")),
                Some(pt) => text.push_str(&format!(
                    "NOT psd at ({})",
                    pt.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
                )),
            }
            Ok(Outcome {
                passed: c.passed(),
                text,
                structured: json!({
                    "determinant_matches": c.determinant_matches,
                    "psd_witness": c.psd_witness.as_deref().map(points),
                    "passed": c.passed(),
                }),
            })
        }
        Command::Gallery { filter, samples } => {
            let r = run_gallery_with(filter.as_deref(), samples);
            Ok(Outcome {
                passed: r.passed(),
                text: r.to_string(),
                structured: serde_json::to_value(&r).expect("serializable"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command) {
        Ok(o) => {
            match format {
                Format::Text => println!("{}", o.text),
                Format::Structured => {
                    let mut v = o.structured;
                    v["passed"] = json!(o.passed);
                    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                }
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            match format {
                Format::Text => eprintln!("error: {e}"),
                Format::Structured => {
                    println!("{}", json!({"passed": false, "error": e.to_string()}))
                }
            }
            ExitCode::from(2)
        }
    }
}
