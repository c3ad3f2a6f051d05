//! Command-line surface over the staircase calculus, the perversity
//! calculus, finite scheme models, the example family, and the certificate
//! engine.
//!
//! Exit codes: 0 when every requested check passes, 1 when a mathematical
//! check fails (witnesses go to stdout), 2 on usage or parse errors.
//! `--format structured` switches every subcommand to JSON (schema version
//! 1); the default is a plain table.  Output is byte-stable for identical
//! inputs.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use srho::engine::{certify_extension, certify_srification, ic_defined, relative_srho};
use srho::griffith::{build_profile, d_sequence, export_model, strictness_check};
use srho::model::{
    in_pd_ge0, in_pd_le0, induced_perversity, is_s_rho, s_rho_locus, ModelFile, PointId,
    SchemeModel, SheafData,
};
use srho::perversity::{
    enumerate_pn_rho, exists_pi_plus_eq_rho, phi, phi_inverse, pi_max, pi_min,
    NumericalPerversity,
};
use srho::suites::{duality_suite, griffith_suite, prho_paths_suite, prop33_suite};
use srho::tailed::TailedFunction;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "srho", version, about = "Staircase depth-condition calculus")]
struct Cli {
    /// Output format for all subcommands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on staircase functions (the lattice W' and its subset W).
    #[command(subcommand)]
    Rho(RhoCmd),
    /// Operations on numerical perversities.
    #[command(subcommand)]
    Perv(PervCmd),
    /// Queries against a scheme-model file.
    #[command(subcommand)]
    Model(ModelCmd),
    /// The strictly-bounded example family.
    #[command(subcommand)]
    Griffith(GriffithCmd),
    /// Certificate checks for extension and ification.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Exhaustive verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum RhoCmd {
    /// Evaluate a function at one or more arguments.
    Eval {
        rho: String,
        #[arg(required = true)]
        k: Vec<u64>,
    },
    /// Report canonical form and membership in W' and W; exits 1 off W.
    Check { rho: String },
    /// Pointwise maximum.
    Join { a: String, b: String },
    /// Pointwise minimum.
    Meet { a: String, b: String },
    /// The dual condition; requires membership in W.
    Dual { rho: String },
    /// The n-th inclination.
    Incline {
        rho: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum PervCmd {
    /// Minimum element of the level-n set over rho.
    Pmin(RhoN),
    /// Maximum element of the level-n set over rho.
    Pmax(RhoN),
    /// The plus-shift of a perversity at level n.
    Pplus {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        n: u64,
    },
    /// Enumerate the level-n set over rho, one perversity per line.
    Enum {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        horizon: u64,
    },
    /// Apply the two-to-one map to W.
    Phi {
        #[arg(long)]
        pi: String,
    },
    /// The fiber of the two-to-one map over rho.
    PhiInv {
        #[arg(long)]
        rho: String,
    },
    /// Whether some level-n perversity has plus-shift exactly rho; exits 1 if none.
    ExistsPlus(RhoN),
}

#[derive(Args)]
struct RhoN {
    #[arg(long)]
    rho: String,
    #[arg(long)]
    n: u64,
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Validate a model file; exits 1 with a diagnostic id on rejection.
    Validate { file: String },
    /// c-codimension of a specialization-closed point set.
    Ccodim {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<String>,
    },
    /// Test a named sheaf for the depth condition; exits 1 with witnesses on failure.
    Srho {
        file: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        rho: String,
    },
    /// The locus where a named sheaf satisfies the depth condition.
    SrhoLocus {
        file: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        rho: String,
    },
    /// t-structure membership of a named complex for the perversity induced by pi.
    Membership {
        file: String,
        #[arg(long)]
        complex: String,
        #[arg(long)]
        pi: String,
        #[arg(long, value_enum, default_value_t = Half::Both)]
        half: Half,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Half {
    Le0,
    Ge0,
    Both,
}

#[derive(Subcommand)]
enum GriffithCmd {
    /// The d/e/r sequences of the example.
    Spec(RhoN),
    /// The realized (codim, depth) pairs.
    Profile(RhoN),
    /// Exhaustive strictness check; exits 1 if any stronger condition survives.
    Verify {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        horizon: u64,
    },
    /// Emit the example as a model file (stdout or --out).
    ExportModel {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Check an extension certificate against a model file.
    Extension {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<String>,
        #[arg(long)]
        pushforward: String,
        #[arg(long)]
        candidate: String,
        #[arg(long)]
        rho: String,
    },
    /// Check a finite ification certificate.
    Srification {
        file: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        candidate: Option<String>,
    },
    /// Decide whether the intermediate extension of data on U is defined.
    IcDefined {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<String>,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        rho: String,
    },
    /// The relative depth condition for sheaf data and an open set.
    Relative {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<String>,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        rho: String,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Nonemptiness, extremal elements, and plus-shift existence.
    Prop33 {
        #[arg(long, default_value_t = 8)]
        horizon: u64,
    },
    /// The two-to-one map and duality identities.
    Duality {
        #[arg(long, default_value_t = 8)]
        horizon: u64,
    },
    /// Two-path agreement of the depth-bound formula.
    PrhoPaths {
        #[arg(long, default_value_t = 8)]
        horizon: u64,
    },
    /// The example family's strictness sweep plus the pinned golden case.
    GriffithSuite {
        #[arg(long, default_value_t = 6)]
        rho_horizon: u64,
        #[arg(long, default_value_t = 10)]
        strict_horizon: u64,
    },
}

/// A data-level failure: bad encodings, bad files, violated invariants in
/// inputs.  Distinct from a mathematical check coming out false.
struct DataError(String);

impl<E: Display> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(DataError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_rho(s: &str) -> Result<TailedFunction, DataError> {
    Ok(s.parse::<TailedFunction>()?)
}

fn parse_rho_in_w(s: &str) -> Result<TailedFunction, DataError> {
    let rho = parse_rho(s)?;
    if !rho.in_w() {
        return Err(DataError(format!("[rho.not_in_w] {rho} is not in W")));
    }
    Ok(rho)
}

fn parse_pi(s: &str) -> Result<NumericalPerversity, DataError> {
    Ok(NumericalPerversity::new(parse_rho(s)?)?)
}

fn point_set(ids: &[String]) -> BTreeSet<PointId> {
    ids.iter().map(|s| PointId(s.clone())).collect()
}

fn load_model(path: &str) -> Result<(ModelFile, SchemeModel), DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError(format!("{path}: {e}")))?;
    let file = ModelFile::from_json(&text)?;
    let model = file.model()?;
    Ok((file, model))
}

fn load_sheaf(file: &ModelFile, model: &SchemeModel, name: &str) -> Result<SheafData, DataError> {
    Ok(file.sheaf(name, model)?)
}

fn emit(cli: &Cli, table: String, structured: serde_json::Value) {
    match cli.format {
        Format::Table => println!("{table}"),
        Format::Structured => {
            let mut obj = structured;
            obj["schema_version"] = json!(SCHEMA_VERSION);
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
        }
    }
}

fn pass_code(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn run(cli: &Cli) -> Result<u8, DataError> {
    match &cli.command {
        Command::Rho(cmd) => run_rho(cli, cmd),
        Command::Perv(cmd) => run_perv(cli, cmd),
        Command::Model(cmd) => run_model(cli, cmd),
        Command::Griffith(cmd) => run_griffith(cli, cmd),
        Command::Certify(cmd) => run_certify(cli, cmd),
        Command::Verify(cmd) => run_verify(cli, cmd),
    }
}

fn run_rho(cli: &Cli, cmd: &RhoCmd) -> Result<u8, DataError> {
    match cmd {
        RhoCmd::Eval { rho, k } => {
            let f = parse_rho(rho)?;
            let values: Vec<u64> = k.iter().map(|&k| f.eval(k)).collect();
            let lines: Vec<String> = k
                .iter()
                .zip(&values)
                .map(|(k, v)| format!("{k} {v}"))
                .collect();
            emit(
                cli,
                lines.join("\n"),
                json!({ "rho": f.to_string(), "args": k, "values": values }),
            );
            Ok(0)
        }
        RhoCmd::Check { rho } => {
            let f = parse_rho(rho)?;
            emit(
                cli,
                format!(
                    "canonical {f}\nin_wprime true\nin_w {}",
                    f.in_w()
                ),
                json!({ "canonical": f.to_string(), "in_wprime": true, "in_w": f.in_w() }),
            );
            Ok(pass_code(f.in_w()))
        }
        RhoCmd::Join { a, b } => {
            let v = parse_rho(a)?.join(&parse_rho(b)?);
            emit(cli, v.to_string(), json!({ "result": v.to_string() }));
            Ok(0)
        }
        RhoCmd::Meet { a, b } => {
            let v = parse_rho(a)?.meet(&parse_rho(b)?);
            emit(cli, v.to_string(), json!({ "result": v.to_string() }));
            Ok(0)
        }
        RhoCmd::Dual { rho } => {
            let v = parse_rho(rho)?.dual()?;
            emit(cli, v.to_string(), json!({ "result": v.to_string() }));
            Ok(0)
        }
        RhoCmd::Incline { rho, n } => {
            let v = parse_rho(rho)?.inclination(*n);
            emit(cli, v.to_string(), json!({ "result": v.to_string() }));
            Ok(0)
        }
    }
}

fn run_perv(cli: &Cli, cmd: &PervCmd) -> Result<u8, DataError> {
    match cmd {
        PervCmd::Pmin(args) => {
            let v = pi_min(&parse_rho_in_w(&args.rho)?, args.n)?;
            emit(cli, v.func().to_string(), json!({ "result": v.func().to_string() }));
            Ok(0)
        }
        PervCmd::Pmax(args) => {
            let v = pi_max(&parse_rho_in_w(&args.rho)?, args.n)?;
            emit(cli, v.func().to_string(), json!({ "result": v.func().to_string() }));
            Ok(0)
        }
        PervCmd::Pplus { pi, n } => {
            let v = parse_pi(pi)?.pi_plus(*n);
            emit(cli, v.func().to_string(), json!({ "result": v.func().to_string() }));
            Ok(0)
        }
        PervCmd::Enum { rho, n, horizon } => {
            let members = enumerate_pn_rho(&parse_rho_in_w(rho)?, *n, *horizon)?;
            let encodings: Vec<String> =
                members.iter().map(|pi| pi.func().to_string()).collect();
            emit(
                cli,
                encodings.join("\n"),
                json!({ "count": encodings.len(), "members": encodings }),
            );
            Ok(0)
        }
        PervCmd::Phi { pi } => {
            let v = phi(&parse_pi(pi)?)?;
            emit(cli, v.to_string(), json!({ "result": v.to_string() }));
            Ok(0)
        }
        PervCmd::PhiInv { rho } => {
            let (lo, hi) = phi_inverse(&parse_rho_in_w(rho)?)?;
            emit(
                cli,
                format!("{}\n{}", lo.func(), hi.func()),
                json!({ "min": lo.func().to_string(), "max": hi.func().to_string() }),
            );
            Ok(0)
        }
        PervCmd::ExistsPlus(args) => {
            let exists = exists_pi_plus_eq_rho(&parse_rho_in_w(&args.rho)?, args.n);
            emit(cli, exists.to_string(), json!({ "exists": exists }));
            Ok(pass_code(exists))
        }
    }
}

fn run_model(cli: &Cli, cmd: &ModelCmd) -> Result<u8, DataError> {
    match cmd {
        ModelCmd::Validate { file } => {
            let text =
                std::fs::read_to_string(file).map_err(|e| DataError(format!("{file}: {e}")))?;
            let parsed = ModelFile::from_json(&text)?;
            match parsed.model() {
                Ok(model) => {
                    let mut sheaf_errors = Vec::new();
                    for name in parsed.sheaves.keys() {
                        if let Err(e) = parsed.sheaf(name, &model) {
                            sheaf_errors.push(format!("{name}: {e}"));
                        }
                    }
                    for name in parsed.complexes.keys() {
                        if let Err(e) = parsed.complex(name, &model) {
                            sheaf_errors.push(format!("{name}: {e}"));
                        }
                    }
                    let ok = sheaf_errors.is_empty();
                    emit(
                        cli,
                        if ok {
                            format!("valid: {} points", model.points().len())
                        } else {
                            sheaf_errors.join("\n")
                        },
                        json!({ "valid": ok, "points": model.points().len(),
                                "errors": sheaf_errors }),
                    );
                    Ok(pass_code(ok))
                }
                Err(e) => {
                    emit(
                        cli,
                        format!("invalid: {e}"),
                        json!({ "valid": false, "errors": [e.to_string()] }),
                    );
                    Ok(1)
                }
            }
        }
        ModelCmd::Ccodim { file, points } => {
            let (_, model) = load_model(file)?;
            let v = model.ccodim(&point_set(points))?;
            emit(cli, v.to_string(), json!({ "ccodim": v.to_string() }));
            Ok(0)
        }
        ModelCmd::Srho { file, sheaf, rho } => {
            let (parsed, model) = load_model(file)?;
            let f = load_sheaf(&parsed, &model, sheaf)?;
            let verdict = is_s_rho(&f, &parse_rho(rho)?, &model);
            let lines: Vec<String> = verdict
                .violations
                .iter()
                .map(|v| {
                    format!(
                        "violation {} dim {} depth {} required {}",
                        v.point, v.dim, v.depth, v.required
                    )
                })
                .collect();
            emit(
                cli,
                if verdict.passes {
                    "pass".to_string()
                } else {
                    lines.join("\n")
                },
                serde_json::to_value(&verdict).unwrap(),
            );
            Ok(pass_code(verdict.passes))
        }
        ModelCmd::SrhoLocus { file, sheaf, rho } => {
            let (parsed, model) = load_model(file)?;
            let f = load_sheaf(&parsed, &model, sheaf)?;
            let locus = s_rho_locus(&f, &parse_rho(rho)?, &model);
            let ids: Vec<String> = locus.locus.iter().map(|p| p.to_string()).collect();
            let mut table = ids.join("\n");
            if let Some((member, missing)) = &locus.non_open_witness {
                table.push_str(&format!("\nnot open: {member} without {missing}"));
            }
            emit(cli, table, serde_json::to_value(&locus).unwrap());
            Ok(0)
        }
        ModelCmd::Membership { file, complex, pi, half } => {
            let (parsed, model) = load_model(file)?;
            let f = parsed.complex(complex, &model)?;
            let p = induced_perversity(&parse_pi(pi)?, &model);
            let le0 = in_pd_le0(&f, &p, &model);
            let ge0 = in_pd_ge0(&f, &p, &model);
            let pass = match half {
                Half::Le0 => le0,
                Half::Ge0 => ge0,
                Half::Both => le0 && ge0,
            };
            emit(
                cli,
                format!("le0 {le0}\nge0 {ge0}"),
                json!({ "le0": le0, "ge0": ge0 }),
            );
            Ok(pass_code(pass))
        }
    }
}

fn run_griffith(cli: &Cli, cmd: &GriffithCmd) -> Result<u8, DataError> {
    match cmd {
        GriffithCmd::Spec(args) => {
            let spec = d_sequence(&parse_rho(&args.rho)?, args.n)?;
            emit(
                cli,
                format!("d {:?}\ne {:?}\nr {:?}", spec.d, spec.e, spec.r),
                serde_json::to_value(&spec).unwrap(),
            );
            Ok(0)
        }
        GriffithCmd::Profile(args) => {
            let profile = build_profile(&d_sequence(&parse_rho(&args.rho)?, args.n)?);
            let lines: Vec<String> = profile
                .pairs
                .iter()
                .map(|p| format!("{} {}", p.codim, p.depth))
                .collect();
            emit(cli, lines.join("\n"), serde_json::to_value(&profile).unwrap());
            Ok(0)
        }
        GriffithCmd::Verify { rho, n, horizon } => {
            let spec = d_sequence(&parse_rho(rho)?, *n)?;
            let verdict = strictness_check(&spec, *horizon)?;
            emit(
                cli,
                format!(
                    "candidates {}\nexceptions {}\n{}",
                    verdict.candidates,
                    verdict.exceptions.len(),
                    if verdict.passes() { "pass" } else { "fail" }
                ),
                serde_json::to_value(&verdict).unwrap(),
            );
            Ok(pass_code(verdict.passes()))
        }
        GriffithCmd::ExportModel { rho, n, out } => {
            let file = export_model(&d_sequence(&parse_rho(rho)?, *n)?);
            let text = file.to_json();
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| DataError(format!("{path}: {e}")))?,
                None => println!("{text}"),
            }
            Ok(0)
        }
    }
}

fn run_certify(cli: &Cli, cmd: &CertifyCmd) -> Result<u8, DataError> {
    match cmd {
        CertifyCmd::Extension { file, u, pushforward, candidate, rho } => {
            let (parsed, model) = load_model(file)?;
            let push = load_sheaf(&parsed, &model, pushforward)?;
            let cand = load_sheaf(&parsed, &model, candidate)?;
            let verdict =
                certify_extension(&model, &point_set(u), &push, &parse_rho(rho)?, &cand)?;
            let lines: Vec<String> = verdict
                .failures
                .iter()
                .map(|f| match &f.witness {
                    Some(w) => format!("failed {} at {w}", f.clause),
                    None => format!("failed {}", f.clause),
                })
                .collect();
            emit(
                cli,
                if verdict.pass {
                    format!("pass\ns2_bound_holds {}", verdict.s2_bound_holds)
                } else {
                    lines.join("\n")
                },
                serde_json::to_value(&verdict).unwrap(),
            );
            Ok(pass_code(verdict.pass))
        }
        CertifyCmd::Srification { file, sheaf, rho, candidate } => {
            let (parsed, model) = load_model(file)?;
            let f = load_sheaf(&parsed, &model, sheaf)?;
            let cand = match candidate {
                Some(name) => Some(load_sheaf(&parsed, &model, name)?),
                None => None,
            };
            let verdict =
                certify_srification(&model, &f, &parse_rho(rho)?, cand.as_ref())?;
            let mut lines = Vec::new();
            if !verdict.applicable {
                lines.push(format!(
                    "NOT-APPLICABLE: {}",
                    verdict.reason.as_deref().unwrap_or("hypothesis failed")
                ));
            }
            for b in &verdict.required_bounds {
                lines.push(format!(
                    "required {} codim {} depth {}",
                    b.point, b.codim, b.required
                ));
            }
            lines.push(format!("s2_locus_coincides {}", verdict.s2_locus_coincides));
            lines.push(if verdict.pass() { "pass".into() } else { "fail".into() });
            emit(cli, lines.join("\n"), serde_json::to_value(&verdict).unwrap());
            Ok(pass_code(verdict.pass()))
        }
        CertifyCmd::IcDefined { file, u, sheaf, rho } => {
            let (parsed, model) = load_model(file)?;
            let f = load_sheaf(&parsed, &model, sheaf)?;
            let verdict = ic_defined(&f, &parse_rho(rho)?, &model, &point_set(u))?;
            let mut table = format!("defined {}", verdict.defined);
            if let Some(w) = &verdict.witness {
                table.push_str(&format!(
                    "\nwitness {} codim {} depth {} required {}",
                    w.point, w.codim, w.depth, w.required
                ));
            }
            emit(cli, table, serde_json::to_value(&verdict).unwrap());
            Ok(pass_code(verdict.defined))
        }
        CertifyCmd::Relative { file, u, sheaf, rho } => {
            let (parsed, model) = load_model(file)?;
            let f = load_sheaf(&parsed, &model, sheaf)?;
            let verdict = relative_srho(&f, &parse_rho(rho)?, &model, &point_set(u))?;
            let lines: Vec<String> = verdict
                .violations
                .iter()
                .map(|v| {
                    format!(
                        "violation {} codim {} depth {} required {}",
                        v.point, v.codim, v.depth, v.required
                    )
                })
                .collect();
            emit(
                cli,
                if verdict.passes {
                    format!("pass (ccodim {})", verdict.ccodim_z)
                } else {
                    lines.join("\n")
                },
                serde_json::to_value(&verdict).unwrap(),
            );
            Ok(pass_code(verdict.passes))
        }
    }
}

fn run_verify(cli: &Cli, cmd: &VerifyCmd) -> Result<u8, DataError> {
    let report = match cmd {
        VerifyCmd::Prop33 { horizon } => prop33_suite(*horizon),
        VerifyCmd::Duality { horizon } => duality_suite(*horizon),
        VerifyCmd::PrhoPaths { horizon } => prho_paths_suite(*horizon),
        VerifyCmd::GriffithSuite { rho_horizon, strict_horizon } => {
            griffith_suite(*rho_horizon, *strict_horizon)
        }
    };
    emit(cli, report.to_string(), serde_json::to_value(&report).unwrap());
    Ok(pass_code(report.passed()))
}
