//! Command-line surface. Every command produces a JSON report carrying the
//! schema version and the resolved run configuration.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 failed numerical check.

mod export;
mod input;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::assembly::{BoundaryCondition, Discretization};
use crate::error::{Error, Result};
use crate::extalg::verify_identities;
use crate::hodge::{harmonic_basis, harmonic_dimensions, HodgeSolver};
use crate::mesh::{realize_field, write_off, write_vtk, DiscreteField, SimplicialComplex};
use crate::scalarlab::{self, AnalyticCase, Domain, Velocity};
use crate::spectra::{eigen, isometry_test, RigidMotion};

pub use export::{cochain_attribute, one_form_proxy};
pub use input::{load_form, load_mesh, parse_field};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vhodge",
    version,
    about = "Vector-field-induced Hodge theory on triangle meshes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeshArgs {
    /// Mesh file (OFF/OBJ) or `builtin:<name>`.
    #[arg(long, default_value = "builtin:torus")]
    pub mesh: String,
    /// Field JSON (inline or file) or preset: zero, random[:seed],
    /// constant:a,b[,c], rotational[:rate], radial[:rate].
    #[arg(long, default_value = "zero")]
    pub field: String,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Legacy ASCII VTK export.
    #[arg(long)]
    pub vtk: Option<PathBuf>,
    /// Directory for MatrixMarket exports of the mass and incidence matrices.
    #[arg(long)]
    pub matrix_market: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Convergence,
    Gradient,
    Harmonicity,
    Formulas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    Torus,
    Rectangle,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the pointwise exterior-algebra identities on random data.
    VerifyAlgebra {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Dimensions of the discrete v-harmonic spaces, checked against the
    /// v = 0 pipeline.
    Betti {
        #[command(flatten)]
        #[serde(flatten)]
        mesh: MeshArgs,
        /// Restrict to one boundary condition (closed, normal, tangential).
        #[arg(long)]
        bc: Option<BoundaryCondition>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Hodge decomposition of a cochain (read from `--form`, or random).
    Decompose {
        #[command(flatten)]
        #[serde(flatten)]
        mesh: MeshArgs,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        /// JSON array of cochain values.
        #[arg(long)]
        form: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Include the component cochains in the report.
        #[arg(long)]
        parts: bool,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Lowest eigenpairs of the v-Hodge Laplacian.
    Spectrum {
        #[command(flatten)]
        #[serde(flatten)]
        mesh: MeshArgs,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "tangential")]
        bc: BoundaryCondition,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Spectra before and after a rigid motion of mesh and field.
    Isometry {
        #[command(flatten)]
        #[serde(flatten)]
        mesh: MeshArgs,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "tangential")]
        bc: BoundaryCondition,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Seed of the random rigid motion (and of `random` fields).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the identity motion.
        #[arg(long)]
        identity: bool,
        /// Control run: keep the ambient field vectors instead of rotating them.
        #[arg(long)]
        no_push_forward: bool,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Scalar studies: manufactured-solution convergence, the gradient case,
    /// the harmonicity of v-flat, and closed-form checks.
    Scalar {
        #[arg(long, value_enum, default_value = "convergence")]
        study: Study,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        levels: Vec<usize>,
        /// Velocity `a,b` (the gradient of `f = a x + b y` for `gradient`).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1,0",
            allow_hyphen_values = true
        )]
        velocity: Vec<f64>,
        #[arg(long, value_enum, default_value = "torus")]
        domain: DomainArg,
        /// Mesh and field for the harmonicity study.
        #[arg(long, default_value = "builtin:flat-torus:16")]
        mesh: String,
        #[arg(long, default_value = "constant:1,0")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV error table for convergence studies.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
    /// Write a built-in mesh as OFF.
    GenerateMesh {
        /// Built-in name, e.g. torus, flat-torus:16x16, annulus:3x24, sphere:2.
        #[arg(long)]
        name: String,
        #[arg(long)]
        mesh_output: Option<PathBuf>,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutputArgs,
    },
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::VerifyAlgebra { out, .. }
            | Command::Betti { out, .. }
            | Command::Decompose { out, .. }
            | Command::Spectrum { out, .. }
            | Command::Isometry { out, .. }
            | Command::Scalar { out, .. }
            | Command::GenerateMesh { out, .. } => out,
        }
    }
}

/// Result of one command before serialization.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    /// Explanation printed to stderr when a check fails.
    pub message: Option<String>,
    pub result: Value,
}

impl Outcome {
    fn check(
        passed: bool,
        message: impl FnOnce() -> String,
        result: impl Serialize,
    ) -> Result<Self> {
        Ok(Outcome {
            passed,
            message: (!passed).then(message),
            result: serde_json::to_value(result)?,
        })
    }
}

/// Full JSON document: schema version, resolved configuration and result.
pub fn report_json(command: &Command, resolved: &Value, outcome: &Outcome) -> Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": command,
        "resolved": resolved,
        "passed": outcome.passed,
        "result": outcome.result,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

struct Loaded {
    complex: SimplicialComplex,
    field: DiscreteField,
}

fn load(args: &MeshArgs, seed: u64) -> Result<Loaded> {
    let complex = load_mesh(&args.mesh)?;
    let spec = parse_field(&args.field, seed)?;
    let field = realize_field(&complex, &spec)?;
    Ok(Loaded { complex, field })
}

fn check_degree(k: usize) -> Result<()> {
    if k > 2 {
        return Err(Error::DegreeExceedsDimension { degree: k, dim: 2 });
    }
    Ok(())
}

fn mesh_summary(c: &SimplicialComplex) -> Value {
    json!({
        "vertices": c.num_vertices(),
        "edges": c.num_edges(),
        "triangles": c.num_triangles(),
        "euler_characteristic": c.euler_characteristic(),
        "boundary_edges": c.boundary_edges().len(),
    })
}

fn export_matrices(out: &OutputArgs, l: &Loaded) -> Result<Option<Vec<String>>> {
    out.matrix_market
        .as_deref()
        .map(|dir| export::write_matrices(dir, &l.complex, &l.field))
        .transpose()
}

fn dims_json(d: [usize; 3]) -> Value {
    json!({"k0": d[0], "k1": d[1], "k2": d[2]})
}

/// Runs a command, returning the resolved parameters and the outcome.
pub fn execute(command: &Command) -> Result<(Value, Outcome)> {
    match command {
        Command::VerifyAlgebra {
            dim,
            trials,
            seed,
            tolerance,
            ..
        } => {
            let report = verify_identities(*dim, *trials, *seed)?;
            let failures: Vec<String> = report
                .failures(*tolerance)
                .iter()
                .map(|(n, s)| format!("{n} (max relative residual {:e})", s.max_rel))
                .collect();
            let msg = || {
                format!(
                    "identity failure: {}; reproduce with --dim {dim} --seed {seed}",
                    failures.join(", ")
                )
            };
            Ok((
                json!({}),
                Outcome::check(failures.is_empty(), msg, &report)?,
            ))
        }
        Command::Betti {
            mesh,
            bc,
            seed,
            out,
        } => {
            let l = load(mesh, *seed)?;
            let disc = Discretization::new(&l.complex, &l.field)?;
            let oracle = Discretization::standard(&l.complex)?;
            let (induced, standard) = match bc {
                Some(bc) => {
                    let bc = bc.resolve(l.complex.has_boundary());
                    let dims = |d: &Discretization| -> Result<[usize; 3]> {
                        let mut o = [0; 3];
                        for (k, x) in o.iter_mut().enumerate() {
                            *x = harmonic_basis(&d.operators(k, bc)?)?.dimension;
                        }
                        Ok(o)
                    };
                    let (a, b) = (dims(&disc)?, dims(&oracle)?);
                    (
                        json!({ bc.name(): dims_json(a) }),
                        json!({ bc.name(): dims_json(b) }),
                    )
                }
                None => {
                    let to_json = |h: crate::hodge::HarmonicDimensions| {
                        let mut m = serde_json::Map::new();
                        for (name, d) in [
                            ("closed", h.closed),
                            ("tangential", h.tangential),
                            ("normal", h.normal),
                        ] {
                            if let Some(d) = d {
                                m.insert(name.into(), dims_json(d));
                            }
                        }
                        Value::Object(m)
                    };
                    (
                        to_json(harmonic_dimensions(&disc)?),
                        to_json(harmonic_dimensions(&oracle)?),
                    )
                }
            };
            let passed = induced == standard;
            let matrices = export_matrices(out, &l)?;
            let result = json!({
                "mesh": mesh_summary(&l.complex),
                "dimensions": induced,
                "standard_dimensions": standard,
                "matrix_market": matrices,
            });
            let msg = || "harmonic dimensions differ from the v = 0 pipeline".to_string();
            Ok((
                json!({ "bc": bc.map(|b| b.resolve(l.complex.has_boundary())) }),
                Outcome::check(passed, msg, result)?,
            ))
        }
        Command::Decompose {
            mesh,
            k,
            form,
            seed,
            tolerance,
            parts,
            out,
        } => {
            check_degree(*k)?;
            let l = load(mesh, *seed)?;
            let n = l.complex.num_simplices(*k);
            let omega = match form {
                Some(p) => load_form(p, n)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
                }
            };
            let disc = Discretization::new(&l.complex, &l.field)?;
            let dec = HodgeSolver::new(&disc, *k)?.decompose(&omega)?;
            let r = dec.residuals;
            let passed = r.within(*tolerance);
            let v = |x: &[f64]| DVector::from_column_slice(x);
            if let Some(path) = &out.vtk {
                let (e, c, h) = (v(&dec.exact), v(&dec.coexact), v(&dec.harmonic));
                export::write_vtk(
                    path,
                    &l.complex,
                    &l.field,
                    *k,
                    &[
                        ("omega", &omega),
                        ("exact", &e),
                        ("coexact", &c),
                        ("harmonic", &h),
                    ],
                )?;
            }
            let matrices = export_matrices(out, &l)?;
            let norm = |x: &[f64]| {
                let x = v(x);
                x.dot(&(disc.mass(*k) * &x)).max(0.0).sqrt()
            };
            let mut result = json!({
                "mesh": mesh_summary(&l.complex),
                "degree": k,
                "residuals": r,
                "norms": {
                    "omega": r.omega_norm,
                    "exact": norm(&dec.exact),
                    "coexact": norm(&dec.coexact),
                    "harmonic": norm(&dec.harmonic),
                },
                "matrix_market": matrices,
            });
            if *parts {
                result["parts"] = json!({
                    "omega": omega.as_slice(),
                    "exact": dec.exact,
                    "coexact": dec.coexact,
                    "harmonic": dec.harmonic,
                    "alpha": dec.alpha,
                    "beta": dec.beta,
                });
            }
            let msg = || format!("decomposition residual above {tolerance:e}");
            Ok((
                json!({ "form": if form.is_some() { "file" } else { "random" } }),
                Outcome::check(passed, msg, result)?,
            ))
        }
        Command::Spectrum {
            mesh,
            k,
            bc,
            count,
            seed,
            tolerance,
            out,
        } => {
            check_degree(*k)?;
            let l = load(mesh, *seed)?;
            let bc = bc.resolve(l.complex.has_boundary());
            let disc = Discretization::new(&l.complex, &l.field)?;
            let ops = disc.operators(*k, bc)?;
            let spec = eigen(&ops, *count)?;
            let harmonic = harmonic_basis(&ops)?.dimension;
            let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
            let nonneg = min >= -1e-10 * spec.lambda_max;
            let mult_ok = spec.zero_multiplicity == harmonic.min(*count);
            let passed = nonneg && spec.max_residual <= *tolerance && mult_ok;
            if let Some(path) = &out.vtk {
                let vecs = crate::spectra::eigencochains(&ops, (*count).min(4))?;
                let named: Vec<(String, DVector<f64>)> = vecs
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| (format!("mode{i}"), x))
                    .collect();
                let refs: Vec<(&str, &DVector<f64>)> =
                    named.iter().map(|(n, x)| (n.as_str(), x)).collect();
                export::write_vtk(path, &l.complex, &l.field, *k, &refs)?;
            }
            let matrices = export_matrices(out, &l)?;
            let result = json!({
                "mesh": mesh_summary(&l.complex),
                "spectrum": spec,
                "harmonic_dimension": harmonic,
                "matrix_market": matrices,
            });
            let msg = || {
                format!(
                    "spectral check failed: min eigenvalue {min:e}, max residual {:e}, zero multiplicity {} vs harmonic dimension {harmonic}",
                    spec.max_residual, spec.zero_multiplicity
                )
            };
            Ok((json!({ "bc": bc }), Outcome::check(passed, msg, &result)?))
        }
        Command::Isometry {
            mesh,
            k,
            bc,
            count,
            seed,
            identity,
            no_push_forward,
            tolerance,
            ..
        } => {
            check_degree(*k)?;
            let l = load(mesh, *seed)?;
            let bc = bc.resolve(l.complex.has_boundary());
            let motion = if *identity {
                RigidMotion::identity()
            } else {
                RigidMotion::random(*seed)
            };
            let report = isometry_test(
                &l.complex,
                &l.field,
                &motion,
                *k,
                bc,
                *count,
                !no_push_forward,
            )?;
            let d = report.max_relative_discrepancy;
            let (passed, msg): (bool, Box<dyn FnOnce() -> String>) = if *no_push_forward {
                (
                    d > 1e-6,
                    Box::new(move || format!("control run shows no discrepancy ({d:e} <= 1e-6)")),
                )
            } else {
                (
                    d <= *tolerance,
                    Box::new(move || format!("spectra differ after rigid motion: {d:e}")),
                )
            };
            Ok((
                json!({ "bc": bc, "motion": motion }),
                Outcome::check(passed, msg, &report)?,
            ))
        }
        Command::Scalar {
            study,
            levels,
            velocity,
            domain,
            mesh,
            field,
            seed,
            csv,
            ..
        } => {
            let domain = match domain {
                DomainArg::Torus => Domain::Torus,
                DomainArg::Rectangle => Domain::Rectangle,
            };
            let ab = match velocity.as_slice() {
                [a, b] => [*a, *b],
                _ => {
                    return Err(Error::InvalidArgument(
                        "velocity needs two components a,b".into(),
                    ))
                }
            };
            let case = AnalyticCase::new(
                format!("constant({},{})", ab[0], ab[1]),
                domain,
                Velocity::Constant { a: ab[0], b: ab[1] },
            );
            let write_csv = |r: &scalarlab::ConvergenceReport| -> Result<()> {
                if let Some(p) = csv {
                    std::fs::write(p, r.to_csv())?;
                }
                Ok(())
            };
            match study {
                Study::Convergence => {
                    let r = scalarlab::convergence_study(&case, levels)?;
                    write_csv(&r)?;
                    let passed = r.validation.valid && r.order_within(1.8, 2.2);
                    let msg = || format!("observed orders {:?} outside [1.8, 2.2]", r.orders);
                    Ok((
                        json!({ "domain": domain }),
                        Outcome::check(passed, msg, &r)?,
                    ))
                }
                Study::Gradient => {
                    let r = scalarlab::gradient_case_check(ab, levels)?;
                    write_csv(&r.study)?;
                    let passed = r.simplified_gap <= scalarlab::FORMULA_AGREEMENT
                        && r.study.validation.valid
                        && r.study.order_within(1.8, 2.2);
                    let msg = || format!("gradient case failed: orders {:?}", r.study.orders);
                    Ok((
                        json!({ "domain": Domain::Rectangle }),
                        Outcome::check(passed, msg, &r)?,
                    ))
                }
                Study::Harmonicity => {
                    let l = load(
                        &MeshArgs {
                            mesh: mesh.clone(),
                            field: field.clone(),
                        },
                        *seed,
                    )?;
                    let r = scalarlab::harmonicity_check(&l.complex, &l.field)?;
                    let msg = || {
                        format!(
                            "v-flat is not harmonic: d {:e}, delta {:e}",
                            r.d_residual, r.delta_residual
                        )
                    };
                    Ok((json!({}), Outcome::check(r.passed, msg, &r)?))
                }
                Study::Formulas => {
                    let r = scalarlab::validate_rhs(&case, 64, *seed);
                    let msg = || format!("closed forms disagree: {r:?}");
                    Ok((
                        json!({ "domain": domain }),
                        Outcome::check(r.valid, msg, r)?,
                    ))
                }
            }
        }
        Command::GenerateMesh {
            name,
            mesh_output,
            out,
        } => {
            let c = crate::mesh::generate::builtin(name)?;
            if let Some(p) = mesh_output {
                std::fs::write(p, write_off(&c))?;
            }
            if let Some(p) = &out.vtk {
                std::fs::write(p, write_vtk(&c, &[])?)?;
            }
            Ok((
                json!({}),
                Outcome::check(true, String::new, mesh_summary(&c))?,
            ))
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let res = execute(&cli.command).and_then(|(resolved, outcome)| {
        let text = report_json(&cli.command, &resolved, &outcome)?;
        emit(cli.command.output().output.as_deref(), &text)?;
        Ok(outcome)
    });
    match res {
        Ok(o) if o.passed => EXIT_OK,
        Ok(o) => {
            eprintln!("check failed: {}", o.message.unwrap_or_default());
            EXIT_CHECK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_CHECK
            }
        }
    }
}

/// Parses `args` (including the program name) and runs them. Usage errors
/// exit with 1; `--help` and `--version` with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
