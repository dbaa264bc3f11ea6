use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gaussbound::bound_family;
use gaussbound::circuit::{self, ComplexUnitary, Fig1Options, MeshSource};
use gaussbound::decomposition;
use gaussbound::error::EXIT_DATA;
use gaussbound::fixtures;
use gaussbound::io::{self, MatrixDoc};
use gaussbound::separability::{self, ClassifyOptions, SEPARABILITY_TOL};
use gaussbound::sweep::{self, BoundaryKind, BoundaryOptions};
use gaussbound::verify::{self, VerifyOptions};
use gaussbound::{Bipartition, Error, Ordering, Result, SymplecticTransform};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "gaussbound",
    version,
    about = "Bound entangled Gaussian states: construction, certification, synthesis"
)]
struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "GAUSSBOUND_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a member of the 2x2 bound entangled family.
    Construct {
        #[arg(long, value_parser = ["example1", "example2", "example3", "example4"], conflicts_with = "params")]
        preset: Option<String>,
        /// Parameter JSON {"beta": [..2], "alpha": [..8]}.
        #[arg(long, required_unless_present = "preset")]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide separable / bound entangled / free entangled.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Two groups of 1-based modes, e.g. `a=1,2 b=3,4`.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        partition: Option<Vec<String>>,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Williamson and Euler decompositions of a covariance matrix.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DecomposeMode::Both)]
        mode: DecomposeMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit an optical circuit: the preparation circuit for (kappa, tau), or
    /// a beam-splitter mesh for a passive transform.
    Synthesize {
        #[arg(long, default_value_t = 3.0)]
        kappa: f64,
        /// Defaults to the squeezing of the first example.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mesh::Supplement)]
        mesh: Mesh,
        /// Compile this orthogonal symplectic matrix (Matrix JSON) instead.
        #[arg(long, conflicts_with_all = ["kappa", "tau", "mesh"])]
        passive: Option<PathBuf>,
        /// Also write the circuit's input covariance matrix here.
        #[arg(long)]
        input_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate a covariance matrix through a circuit.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the (kappa, tau) plane of the preparation circuit.
    Sweep {
        /// start:stop:count
        #[arg(long, default_value = "1:17:200")]
        kappa: String,
        #[arg(long, default_value = "1:2:200")]
        tau: String,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also trace a phase boundary for each kappa and write it here.
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Boundary::BoundFree)]
        boundary_kind: Boundary,
    },
    /// Check every published identity end to end.
    VerifyPaper {
        /// Directory with example1.json .. example4.json; embedded copies otherwise.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct Tolerances {
    /// Largest separability slack still counted as separable.
    #[arg(long, default_value_t = SEPARABILITY_TOL, value_parser = positive)]
    tol_sep: f64,
    /// PPT tolerance; defaults to 1e-9 times the spectral norm of the input.
    #[arg(long, value_parser = positive)]
    tol_ppt: Option<f64>,
}

impl Tolerances {
    fn classify(self) -> ClassifyOptions {
        ClassifyOptions { tol_sep: self.tol_sep, tol_ppt: self.tol_ppt, ..ClassifyOptions::default() }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum DecomposeMode {
    Williamson,
    Euler,
    Both,
}

#[derive(ValueEnum, Clone, Copy)]
enum Mesh {
    Supplement,
    Generic,
}

#[derive(ValueEnum, Clone, Copy)]
enum Boundary {
    SepBound,
    BoundFree,
}

#[derive(ValueEnum, Clone, Copy)]
enum ReportFormat {
    Text,
    Json,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_group(arg: &str, label: &str) -> std::result::Result<Vec<usize>, String> {
    let list = arg
        .strip_prefix(label)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| format!("expected '{label}=<modes>', got '{arg}'"))?;
    list.split(',').map(|m| m.trim().parse::<usize>().map_err(|_| format!("bad mode '{m}' in '{arg}'"))).collect()
}

fn partition(arg: Option<&[String]>, n_modes: usize) -> std::result::Result<Bipartition, Failure> {
    let part = match arg {
        None => Bipartition::split(n_modes, n_modes / 2),
        Some([a, b]) => {
            let a = parse_group(a, "a").map_err(Failure::Usage)?;
            let b = parse_group(b, "b").map_err(Failure::Usage)?;
            Bipartition::from_one_based(&a, &b, n_modes)
        }
        Some(_) => return Err(Failure::Usage("--partition takes two groups".into())),
    };
    Ok(part?)
}

#[derive(Serialize)]
struct WilliamsonDoc {
    s: MatrixDoc,
    nu: Vec<f64>,
    degenerate: bool,
}

#[derive(Serialize)]
struct EulerDoc {
    k: MatrixDoc,
    l: MatrixDoc,
    r: Vec<f64>,
}

#[derive(Serialize)]
struct DecomposeDoc {
    format_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    williamson: Option<WilliamsonDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    euler: Option<EulerDoc>,
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(io::round_sig).collect()
}

fn decompose(input: &Path, mode: DecomposeMode) -> Result<String> {
    let gamma = io::read_covariance(input)?.reorder(Ordering::Interleaved);
    let w = decomposition::williamson(&gamma)?;
    let euler = match mode {
        DecomposeMode::Williamson => None,
        _ => {
            let e = decomposition::euler_decompose(&w.s)?;
            Some(EulerDoc {
                k: MatrixDoc::from_matrix(e.k.matrix(), Ordering::Interleaved),
                l: MatrixDoc::from_matrix(e.l.matrix(), Ordering::Interleaved),
                r: round_all(&e.r),
            })
        }
    };
    let williamson = (mode != DecomposeMode::Euler).then(|| WilliamsonDoc {
        s: MatrixDoc::from_matrix(w.s.matrix(), Ordering::Interleaved),
        nu: round_all(&w.nu),
        degenerate: w.degenerate,
    });
    Ok(io::to_json(&DecomposeDoc { format_version: io::FORMAT_VERSION, williamson, euler }))
}

fn synthesize_passive(path: &Path) -> Result<String> {
    let doc: MatrixDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let o = SymplecticTransform::new(doc.to_matrix()?, doc.ordering)?;
    let u: ComplexUnitary = circuit::passive_to_unitary(&o)?;
    Ok(io::circuit_to_json(&circuit::decompose_unitary(&u)))
}

fn run(cli: Cli) -> std::result::Result<u8, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Construct { preset, params, out } => {
            let p = match (preset, params) {
                (Some(name), _) => fixtures::example_params(name.trim_start_matches("example").parse().unwrap_or(1)),
                (None, Some(path)) => io::params_from_json(&std::fs::read_to_string(path).map_err(Error::from)?)?,
                (None, None) => return Err(Failure::Usage("one of --preset or --params is required".into())),
            };
            emit(out.as_deref(), &io::covariance_to_json(&bound_family::construct(&p)?))?;
        }
        Command::Classify { input, partition: groups, tol, out } => {
            let gamma = io::read_covariance(&input)?;
            let part = partition(groups.as_deref(), gamma.n_modes())?;
            let v = separability::classify(&gamma, &part, &tol.classify())?;
            emit(out.as_deref(), &io::verdict_to_json(&v))?;
        }
        Command::Decompose { input, mode, out } => emit(out.as_deref(), &decompose(&input, mode)?)?,
        Command::Synthesize { kappa, tau, mesh, passive, input_out, out } => {
            let text = match passive {
                Some(path) => synthesize_passive(&path)?,
                None => {
                    let opts = Fig1Options {
                        mesh: match mesh {
                            Mesh::Supplement => MeshSource::Supplement,
                            Mesh::Generic => MeshSource::Generic,
                        },
                        ..Fig1Options::default()
                    };
                    let tau = tau.unwrap_or_else(fixtures::star_tau);
                    let (c, input) = circuit::build_fig1_circuit_with(kappa, tau, &opts)?;
                    if let Some(p) = input_out {
                        emit(Some(&p), &io::covariance_to_json(&input))?;
                    }
                    io::circuit_to_json(&c)
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Simulate { circuit: cpath, input, out } => {
            let c = io::circuit_from_json(&std::fs::read_to_string(cpath).map_err(Error::from)?)?;
            let gamma = io::read_covariance(&input)?;
            emit(out.as_deref(), &io::covariance_to_json(&circuit::simulate(&c, &gamma)?))?;
        }
        Command::Sweep { kappa, tau, tol, out, boundary, boundary_kind } => {
            let ks = sweep::parse_axis(&kappa).map_err(|e| Failure::Usage(e.to_string()))?;
            let ts = sweep::parse_axis(&tau).map_err(|e| Failure::Usage(e.to_string()))?;
            let grid = sweep::scan(&ks, &ts, &tol.classify())?;
            emit(out.as_deref(), &grid.to_csv())?;
            if let Some(path) = boundary {
                let kind = match boundary_kind {
                    Boundary::SepBound => BoundaryKind::SepToBound,
                    Boundary::BoundFree => BoundaryKind::BoundToFree,
                };
                let (lo, hi) = ts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
                let opts = BoundaryOptions {
                    tau_min: lo,
                    tau_max: hi,
                    classify: tol.classify(),
                    ..BoundaryOptions::default()
                };
                emit(Some(&path), &sweep::boundary_curve(&ks, kind, &opts)?.to_csv())?;
            }
            if grid.inconclusive_count() > 0 {
                eprintln!("warning: {} of {} cells inconclusive", grid.inconclusive_count(), grid.cells.len());
            }
        }
        Command::VerifyPaper { fixtures, tol, format, out } => {
            let report = verify::verify_paper(&VerifyOptions {
                fixtures_dir: fixtures,
                tol_sep: tol.tol_sep,
                tol_ppt: tol.tol_ppt,
            });
            let text = match format {
                ReportFormat::Text => report.to_text(),
                ReportFormat::Json => report.to_json(),
            };
            emit(out.as_deref(), &text)?;
            if let Some(c) = report.first_problem() {
                eprintln!("verify-paper: {} ({:?})", c.name, c.status);
            }
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(EXIT_DATA as u8))
        }
    }
}
