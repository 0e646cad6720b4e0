//! The `collapsekit` command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input, 3 an
//! infeasibility verdict.

pub mod doc;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::ToPrimitive;
use serde::Deserialize;

use crate::chain::{
    compare_conventions, empirical_distribution, exact_distribution, sample_chain_leftfold, sample_chain_projective,
    sample_chain_tree, tally, Convention, Mechanism,
};
use crate::collapse::{catalan, collapse_effect_tree, enumerate_bracketings};
use crate::equivalence::{build_commutative_model, qnd_check, verify_equivalence};
use crate::error::{Error, Result};
use crate::incompatibility::{
    admits_global_joint, chsh_marginal_problem, chsh_report, local_observable, Feasibility, Side,
};
use crate::instruments::{
    build_instrument, build_joint_instrument, interference_comparison, luders_duality_check, sequential_probabilities,
    InstrumentModel,
};
use crate::measurement::{bloch_observable, AlgebraicState, Observable, VectorState};
use crate::operator::{c, ComplexVector};
use crate::table::{joint_distribution, Axis, JointDistribution, SampleSpace};
use crate::tolerance::Tolerances;
use doc::Document;
use output::{Cell, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Seed used when neither a flag, a document nor `COLLAPSEKIT_SEED` gives one.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "collapsekit", version, about = "Collapse-product joint distributions for sequential measurements")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// TOML file with a [tolerances] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_herm: Option<f64>,
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    #[arg(long, global = true)]
    tol_num: Option<f64>,
    #[arg(long, global = true)]
    tol_prob: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct JointArgs {
    /// Observable documents, in measurement order.
    #[arg(required = true)]
    observables: Vec<PathBuf>,
    /// State or vector document.
    #[arg(long)]
    state: PathBuf,
    /// left, right, reverse, or a bracket expression such as "((0,1),2)".
    #[arg(long, default_value = "left")]
    tree: String,
    /// Degeneracy gap for spectral clustering.
    #[arg(long)]
    gap: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distinct eigenvalues and projector ranks of an observable.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        gap: Option<f64>,
    },
    /// Joint distribution of a measurement sequence under a bracketing.
    Joint(JointArgs),
    /// Commutative no-collapse model reproducing a joint distribution.
    Equivalence {
        #[command(flatten)]
        joint: JointArgs,
        /// Add DELTA to the state weight of SLOT before verifying, as SLOT:DELTA.
        #[arg(long)]
        perturb: Option<String>,
        /// Random polynomials used to probe positivity.
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pointer-ancilla instruments for two observables.
    Instruments {
        a: PathBuf,
        b: PathBuf,
        /// Vector document.
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        gap: Option<f64>,
    },
    /// CHSH value for polarizer angles (degrees) or four local observables.
    Chsh {
        /// State or vector document on the two-qubit space; the singlet by default.
        #[arg(long)]
        state: Option<PathBuf>,
        /// A1,A2,B1,B2 in degrees.
        #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [45.0, 0.0, 22.5, 67.5])]
        angles: Vec<f64>,
        /// Local observable documents A1 A2 B1 B2 instead of angles.
        #[arg(long, num_args = 4)]
        observables: Option<Vec<PathBuf>>,
    },
    /// Exact feasibility of a marginal problem.
    Feasible { file: PathBuf },
    /// Sample a measurement chain.
    Chain {
        file: PathBuf,
        #[arg(long)]
        runs: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mechanism: Option<MechanismArg>,
        /// Print exact probabilities next to empirical frequencies instead of records.
        #[arg(long)]
        summary: bool,
        /// Compare conventions, e.g. "left,right,reverse".
        #[arg(long, value_delimiter = ',')]
        compare: Option<Vec<String>>,
    },
    /// Number of bracketings of n operands.
    Brackets {
        #[arg(long, default_value_t = 7)]
        max: usize,
        /// Print every bracketing of this many operands.
        #[arg(long)]
        list: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MechanismArg {
    Steps,
    Projective,
    Table,
}

#[derive(Debug, Default, Deserialize)]
struct Config {
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

enum Failure {
    Input(Error),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EigenFailure => Failure::Internal(e.to_string()),
            other => Failure::Input(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances> {
    let mut tol = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let config: Config =
                toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            config.tolerances.unwrap_or_default()
        }
        None => Tolerances::DEFAULT,
    };
    for (flag, slot) in [
        (cli.tol_herm, &mut tol.herm),
        (cli.tol_psd, &mut tol.psd),
        (cli.tol_num, &mut tol.num),
        (cli.tol_prob, &mut tol.prob),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    for v in [tol.herm, tol.psd, tol.num, tol.prob] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::OutOfRange(format!("tolerance {v} must be finite and non-negative")));
        }
    }
    Ok(tol)
}

/// Flag, then document, then `COLLAPSEKIT_SEED`, then [`DEFAULT_SEED`].
fn resolve_seed(flag: Option<u64>, document: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(document) {
        return Ok(s);
    }
    match std::env::var("COLLAPSEKIT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("COLLAPSEKIT_SEED={v} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let tol = tolerances(cli)?;
    let mut report = Report::default();
    let code = match &cli.command {
        Command::Decompose { file, gap } => {
            let a = Document::read(file)?.expect_observable(&stem(file), *gap, &tol)?;
            let signed: Vec<String> = a.sample_space().iter().map(|&v| output::signed(v)).collect();
            report.text("observable", a.name());
            report.text("eigenvalues", &signed.join(", "));
            let ranks = a.decomposition().ranks();
            report.list("ranks", ranks.iter().map(|&r| Cell::Int(r as i64)).collect());
            EXIT_OK
        }
        Command::Joint(args) => {
            let dist = joint_from_args(args, &tol)?;
            report.distribution("joint", &dist);
            EXIT_OK
        }
        Command::Equivalence {
            joint,
            perturb,
            probes,
            seed,
        } => {
            let dist = joint_from_args(joint, &tol)?;
            let mut model = build_commutative_model(&dist);
            if let Some(spec) = perturb {
                let (slot, delta) = parse_perturbation(spec)?;
                model.perturb(slot, delta)?;
            }
            let primed = model.primed_observables()?;
            let verdict = verify_equivalence(&model, &dist, *probes, resolve_seed(*seed, None)?)?;
            let mut header: Vec<String> = vec!["slot".into()];
            header.extend(model.axes().iter().map(|a| format!("{}'", a.name)));
            header.push("weight".into());
            let rows = (0..model.dim())
                .map(|s| {
                    let mut row = vec![Cell::Int(s as i64)];
                    row.extend(model.coordinates().iter().map(|c| Cell::Num(c[s])));
                    row.push(Cell::Num(model.weights()[s]));
                    row
                })
                .collect();
            report.field("dim", Cell::Int(model.dim() as i64));
            report.table("model", header, rows);
            report.field("max-deviation", Cell::Num(verdict.max_deviation));
            report.field("min-positivity", Cell::Num(verdict.min_positivity));
            report.field("probes", Cell::Int(verdict.probes as i64));
            report.field("commuting", Cell::Bool(qnd_check(&primed, &tol)?));
            EXIT_OK
        }
        Command::Instruments { a, b, state, gap } => {
            let a = Document::read(a)?.expect_observable("A", *gap, &tol)?;
            let b = Document::read(b)?.expect_observable("B", *gap, &tol)?;
            let psi = Document::read(state)?.expect_vector(&tol)?;
            instruments_report(&mut report, &a, &b, &psi, &tol)?;
            EXIT_OK
        }
        Command::Chsh {
            state,
            angles,
            observables,
        } => {
            let rho = match state {
                Some(p) => Document::read(p)?.expect_state(&tol)?,
                None => singlet(),
            };
            let [a1, a2, b1, b2] = chsh_observables(angles, observables.as_deref(), &rho, &tol)?;
            let r = chsh_report(&rho, [&a1, &a2], [&b1, &b2], &tol)?;
            let names = [[&a1, &b1], [&a1, &b2], [&a2, &b1], [&a2, &b2]];
            let rows = names
                .iter()
                .zip(r.correlators.iter().flatten())
                .map(|([x, y], e)| vec![Cell::Text(x.name().into()), Cell::Text(y.name().into()), Cell::Num(*e)])
                .collect();
            report.table("correlators", vec!["A".into(), "B".into(), "E".into()], rows);
            report.field("chsh", Cell::Num(r.value.abs()));
            report.field("max-variant", Cell::Num(r.max_variant));
            let verdict = admits_global_joint(&chsh_marginal_problem(&r, &tol)?)?;
            report.text("global-joint", if verdict.is_feasible() { "feasible" } else { "infeasible" });
            EXIT_OK
        }
        Command::Feasible { file } => {
            let problem = match Document::read(file)? {
                Document::MarginalProblem(p) => p.build(&tol)?,
                other => {
                    return Err(Error::Parse(format!("expected a marginal-problem document, found {}", other.kind())).into())
                }
            };
            match admits_global_joint(&problem)? {
                Feasibility::Feasible { joint, residual, .. } => {
                    report.text("verdict", "feasible");
                    report.field("residual", Cell::Num(residual.to_f64().unwrap_or(f64::NAN)));
                    report.distribution("joint", &joint);
                    EXIT_OK
                }
                Feasibility::Infeasible { certificate, violation } => {
                    report.text("verdict", "infeasible");
                    let rows = certificate
                        .iter()
                        .map(|t| {
                            let ctx = &problem.contexts()[t.context];
                            let labels = ctx.distribution.labels(&t.tuple).join(",");
                            vec![
                                Cell::Int(t.context as i64),
                                Cell::Text(labels),
                                Cell::Text(t.coefficient.to_string()),
                                Cell::Num(t.coefficient.to_f64().unwrap_or(f64::NAN)),
                            ]
                        })
                        .collect();
                    report.table(
                        "certificate",
                        vec!["context".into(), "tuple".into(), "coefficient".into(), "value".into()],
                        rows,
                    );
                    report.field("violation", Cell::Num(violation.to_f64().unwrap_or(f64::NAN)));
                    report.text("violation-exact", &violation.to_string());
                    EXIT_INFEASIBLE
                }
            }
        }
        Command::Chain {
            file,
            runs,
            seed,
            mechanism,
            summary,
            compare,
        } => {
            let doc = match Document::read(file)? {
                Document::ChainSpec(d) => d,
                other => return Err(Error::Parse(format!("expected a chain-spec document, found {}", other.kind())).into()),
            };
            let spec = doc.build(resolve_seed(*seed, doc.seed)?, &tol)?;
            let rho = doc.initial_state(spec.dim(), &tol)?;
            let runs = runs.or(doc.runs).unwrap_or(1000);
            if let Some(conventions) = compare {
                let conventions = conventions.iter().map(|s| s.parse()).collect::<Result<Vec<Convention>>>()?;
                let r = compare_conventions(&spec, &conventions, &rho, runs, &tol)?;
                let mut rows = Vec::new();
                for (i, a) in conventions.iter().enumerate() {
                    for (j, b) in conventions.iter().enumerate().skip(i + 1) {
                        rows.push(vec![
                            Cell::Text(a.to_string()),
                            Cell::Text(b.to_string()),
                            Cell::Num(r.exact_tv[i][j]),
                            Cell::Num(r.empirical_tv[i][j]),
                        ]);
                    }
                }
                report.field("runs", Cell::Int(runs as i64));
                report.table(
                    "total-variation",
                    vec!["a".into(), "b".into(), "exact".into(), "empirical".into()],
                    rows,
                );
            } else {
                let mechanism = match mechanism {
                    Some(MechanismArg::Steps) => Mechanism::LeftFoldSteps,
                    Some(MechanismArg::Projective) => Mechanism::Projective,
                    Some(MechanismArg::Table) => Mechanism::Table,
                    None if spec.convention == Convention::LeftFold => Mechanism::LeftFoldSteps,
                    None => Mechanism::Table,
                };
                if *summary {
                    let counts = tally(&spec, &rho, runs, mechanism, &tol)?;
                    let empirical = empirical_distribution(&spec, &counts);
                    let exact = exact_distribution(&spec, &rho, &tol)?;
                    let mut header: Vec<String> = vec!["convention".into()];
                    header.extend(spec.axes().iter().map(|a| a.name.clone()));
                    header.extend(["exact".into(), "empirical".into()]);
                    let rows = exact
                        .iter()
                        .map(|(t, p)| {
                            let mut row = vec![Cell::Text(spec.convention.to_string())];
                            row.extend(axis_cells(exact.axes(), &t));
                            row.push(Cell::Num(p));
                            row.push(Cell::Num(empirical.get(&t)));
                            row
                        })
                        .collect();
                    report.field("runs", Cell::Int(runs as i64));
                    report.field("seed", Cell::Int(spec.seed as i64));
                    report.table("summary", header, rows);
                } else {
                    let records = match mechanism {
                        Mechanism::LeftFoldSteps => sample_chain_leftfold(&spec, &rho, runs, &tol)?,
                        Mechanism::Projective => sample_chain_projective(&spec, &rho, runs, &tol)?,
                        Mechanism::Table => sample_chain_tree(&spec, &rho, runs, &tol)?,
                    };
                    for r in &records {
                        writeln!(out, "{}", r.to_json_line())?;
                    }
                    return Ok(EXIT_OK);
                }
            }
            EXIT_OK
        }
        Command::Brackets { max, list } => {
            let rows = (1..=*max)
                .map(|n| {
                    let count = if n <= crate::collapse::MAX_ENUMERATED_OPERANDS {
                        enumerate_bracketings(n)?.len() as i64
                    } else {
                        catalan(n - 1) as i64
                    };
                    Ok(vec![Cell::Int(n as i64), Cell::Int(count)])
                })
                .collect::<Result<Vec<_>>>()?;
            report.table("bracketings", vec!["n".into(), "count".into()], rows);
            if let Some(n) = list {
                let trees = enumerate_bracketings(*n)?;
                report.list("trees", trees.iter().map(|t| Cell::Text(t.to_string())).collect());
            }
            EXIT_OK
        }
    };
    report.write(cli.format, out)?;
    Ok(code)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "A".into(), |s| s.to_string_lossy().into_owned())
}

fn joint_from_args(args: &JointArgs, tol: &Tolerances) -> Result<JointDistribution> {
    let observables = args
        .observables
        .iter()
        .map(|p| Document::read(p)?.expect_observable(&stem(p), args.gap, tol))
        .collect::<Result<Vec<Observable>>>()?;
    let rho = Document::read(&args.state)?.expect_state(tol)?;
    let tree = args.tree.parse::<Convention>()?.tree(observables.len())?;
    let table = collapse_effect_tree(&observables, &tree, tol)?;
    joint_distribution(&table, &rho, tol)
}

fn parse_perturbation(spec: &str) -> Result<(usize, f64)> {
    let bad = || Error::Parse(format!("perturbation {spec:?} is not SLOT:DELTA"));
    let (slot, delta) = spec.split_once(':').ok_or_else(bad)?;
    Ok((slot.trim().parse().map_err(|_| bad())?, delta.trim().parse().map_err(|_| bad())?))
}

fn axis_cells(axes: &[Axis], tuple: &[usize]) -> Vec<Cell> {
    tuple
        .iter()
        .zip(axes)
        .map(|(&i, a)| match &a.space {
            SampleSpace::Values(v) => Cell::Num(v[i]),
            SampleSpace::Labels(l) => Cell::Text(l[i].clone()),
        })
        .collect()
}

fn singlet() -> AlgebraicState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = ComplexVector::from_vec(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
    VectorState::normalized(v).expect("unit vector").to_state()
}

/// Polarizer observable `cos(2t) Z + sin(2t) X`.
fn polarizer(name: &str, degrees: f64) -> Observable {
    let t = 2.0 * degrees.to_radians();
    bloch_observable(name, t.sin(), 0.0, t.cos())
}

fn chsh_observables(
    angles: &[f64],
    files: Option<&[PathBuf]>,
    rho: &AlgebraicState,
    tol: &Tolerances,
) -> Result<[Observable; 4]> {
    let names = ["A1", "A2", "B1", "B2"];
    let local: Vec<Observable> = match files {
        Some(paths) => paths
            .iter()
            .zip(names)
            .map(|(p, n)| Document::read(p)?.expect_observable(n, None, tol))
            .collect::<Result<_>>()?,
        None => angles.iter().zip(names).map(|(&d, n)| polarizer(n, d)).collect(),
    };
    let (da, db) = (local[0].dim(), local[2].dim());
    crate::operator::same_dim(da, local[1].dim())?;
    crate::operator::same_dim(db, local[3].dim())?;
    crate::operator::same_dim(da * db, rho.dim())?;
    Ok([
        local_observable(&local[0], db, Side::Left),
        local_observable(&local[1], db, Side::Left),
        local_observable(&local[2], da, Side::Right),
        local_observable(&local[3], da, Side::Right),
    ])
}

fn instruments_report(
    report: &mut Report,
    a: &Observable,
    b: &Observable,
    psi: &VectorState,
    tol: &Tolerances,
) -> Result<()> {
    let model = InstrumentModel::new(
        build_instrument(a, a.outcome_count() + 1)?,
        build_instrument(b, b.outcome_count() + 1)?,
    )?;
    let pointer = sequential_probabilities(&model, psi, tol)?;
    let table = crate::collapse::collapse_effect_pair(a, b, tol)?;
    let collapse = joint_distribution(&table, &psi.to_state(), tol)?;
    let rows = pointer
        .iter()
        .map(|(t, p)| {
            let mut row = axis_cells(pointer.axes(), &t);
            row.push(Cell::Num(p));
            row.push(Cell::Num(collapse.get(&t)));
            row
        })
        .collect();
    report.table(
        "pointer",
        vec![a.name().into(), b.name().into(), "instrument".into(), "collapse".into()],
        rows,
    );
    report.field("max-deviation", Cell::Num(pointer.max_deviation(&collapse)?));
    report.field("unitarity-residual", Cell::Num(model.unitarity_residual()));

    let columns = interference_comparison(&model, psi, tol)?;
    let rows = columns
        .iter()
        .enumerate()
        .map(|(j, (m, u))| vec![Cell::Num(b.sample_space()[j]), Cell::Num(*m), Cell::Num(*u)])
        .collect();
    report.table("interference", vec![b.name().into(), "measured".into(), "unmeasured".into()], rows);

    let duality = luders_duality_check(a, b, psi)?;
    let rows = (0..b.outcome_count())
        .map(|j| {
            vec![
                Cell::Num(b.sample_space()[j]),
                Cell::Num(duality.transformed_measurement[j]),
                Cell::Num(duality.transformed_state[j]),
            ]
        })
        .collect();
    report.table(
        "duality",
        vec![b.name().into(), "transformed-measurement".into(), "transformed-state".into()],
        rows,
    );
    report.field("duality-difference", Cell::Num(duality.max_difference));

    let joint = build_joint_instrument(&collapse, [a.outcome_count() + 1, b.outcome_count() + 1])?;
    report.field("joint-system-dim", Cell::Int(joint.system_dim() as i64));
    report.field(
        "joint-max-deviation",
        Cell::Num(joint.pointer_probabilities(tol)?.max_deviation(&collapse)?),
    );
    report.field("joint-unitarity-residual", Cell::Num(joint.unitarity_residual()));
    report.field("joint-commutator", Cell::Num(joint.primed_commutator()));
    Ok(())
}
