//! Command-line front end. [`run`] parses arguments, dispatches, and returns
//! the exit code together with what belongs on stdout and stderr.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::complex::{uniformity_check, AbsoluteComplex};
use crate::duality::{
    cs_bordism_compare, glue_pair, intersection_form_with, poincare_duality_check, ManifoldPairDescription,
};
use crate::error::{Error, Result};
use crate::hodge::{gap_trend, CylinderFamily, DisjointTrianglesFamily, ExhaustionFamily};
use crate::hodge::{betti, betti_numbers, hodge_decompose, spectrum};
use crate::io::{self, ChainJson, ComplexFile, GlueJson, InvariantsJson, MapJson, OperatorJson};
use crate::locality::classify_locality;
use crate::metric::{
    classify_map, gh_distance, hausdorff_distance, lipschitz_distance, lipschitz_top_distance, MetricMap,
    DEFAULT_MAX_SIZE,
};
use crate::operator::SparseChain;
use crate::subdivision::{barycentric_subdivide, subdivision_invariance_check};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "COARSE_COMPLEX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coarse-complex", version, about = "Metric distances, Hodge theory and signatures of finite complexes")]
pub struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for randomized solvers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock timings in JSON output (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Betti numbers by exact rank.
    Betti {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        file: PathBuf,
    },
    /// Eigenvalues of the Hodge Laplacian.
    Spectrum {
        #[arg(long)]
        q: usize,
        file: PathBuf,
    },
    /// Harmonic, exact and coexact parts of a chain.
    Hodge {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        chain: PathBuf,
        file: PathBuf,
    },
    /// Spectral gaps along a built-in exhaustion family.
    GapTrend {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        q: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Circumference of the cylinder family.
        #[arg(long, default_value_t = 6)]
        circumference: u32,
    },
    /// Gromov-Hausdorff distance bracket.
    Gh(TwoSpaces),
    /// Lipschitz distance by exhaustive enumeration.
    Dl {
        #[command(flatten)]
        spaces: TwoSpaces,
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        max_size: usize,
    },
    /// Lipschitz distance over bijections.
    Dltop(TwoSpaces),
    /// Hausdorff distance between two subsets of one space.
    Hausdorff {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
    },
    /// Constants of a map between finite spaces.
    ClassifyMap {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Barycentric subdivision pipeline.
    SubdivideCheck { file: PathBuf },
    /// Vicinal, local and nearly-local classification of an operator.
    Locality {
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        operator: PathBuf,
        /// Row and column support cap.
        #[arg(long, default_value_t = 64)]
        cap: usize,
        file: PathBuf,
    },
    /// Signature of the glued complex of a manifold pair.
    PairSignature(PairFiles),
    /// Poincaré duality ranks on a closed oriented complex.
    DualityCheck { file: PathBuf },
    /// Compares two pairs over the same reference core.
    BordismCompare {
        #[arg(long)]
        a_core1: PathBuf,
        #[arg(long)]
        a_core0: PathBuf,
        #[arg(long)]
        a_glue: PathBuf,
        #[arg(long)]
        a_invariants: Option<PathBuf>,
        #[arg(long)]
        b_core1: PathBuf,
        #[arg(long)]
        b_core0: PathBuf,
        #[arg(long)]
        b_glue: PathBuf,
        #[arg(long)]
        b_invariants: Option<PathBuf>,
    },
    /// Uniform-triangulation conditions on a geometric complex.
    UniformityCheck {
        file: PathBuf,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        c: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Cylinder,
    Triangles,
}

#[derive(Debug, Args)]
pub struct TwoSpaces {
    pub x: PathBuf,
    pub y: PathBuf,
}

#[derive(Debug, Args)]
pub struct PairFiles {
    #[arg(long)]
    pub core1: PathBuf,
    #[arg(long)]
    pub core0: PathBuf,
    #[arg(long)]
    pub glue: PathBuf,
}

/// Exit code and the text destined for stdout and stderr.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    inputs: Value,
    result: Value,
    text: String,
    tolerances: Value,
}

fn p(path: &Path) -> String {
    path.display().to_string()
}

fn complex(path: &Path) -> Result<AbsoluteComplex> {
    Ok(io::read_complex(path)?.into_complex())
}

fn read_pair(core1: &Path, core0: &Path, glue: &Path) -> Result<ManifoldPairDescription> {
    let g: GlueJson = io::read_json(glue)?;
    Ok(ManifoldPairDescription {
        core1: complex(core1)?,
        core0: complex(core0)?,
        identification: g.pairs,
        orientation: g.orientation,
    })
}

fn by_id(k: &AbsoluteComplex, c: &SparseChain<f64>) -> Value {
    let map: serde_json::Map<String, Value> =
        c.coeffs.iter().map(|(&i, v)| (k.id(k.global(c.degree, i)).to_string(), json!(v))).collect();
    Value::Object(map)
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    let no_tol = json!({});
    Ok(match &cli.command {
        Command::Betti { q, p: pv, file } => {
            let k = complex(file)?;
            let (result, text) = match q {
                Some(q) => {
                    let b = betti(&k, *q, *pv)?;
                    (json!({ "betti": b.value, "q": q, "p": pv, "note": b.note }), b.value.to_string())
                }
                None => {
                    let bs = betti_numbers(&k);
                    (json!({ "betti": bs }), list(&bs))
                }
            };
            Report { inputs: json!({ "file": p(file), "q": q, "p": pv }), result, text, tolerances: no_tol }
        }
        Command::Spectrum { q, file } => {
            let k = complex(file)?;
            let ev = spectrum(&k, *q);
            let text = ev.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join("\n");
            Report {
                inputs: json!({ "file": p(file), "q": q }),
                result: json!({ "eigenvalues": ev }),
                text,
                tolerances: no_tol,
            }
        }
        Command::Hodge { q, chain, file } => {
            let k = complex(file)?;
            let c: ChainJson = io::read_json(chain)?;
            if c.degree != *q {
                return Err(Error::DegreeMismatch(format!("chain has degree {}, --q is {q}", c.degree)));
            }
            let d = hodge_decompose(&k, *q, &c.resolve(&k)?)?;
            let orth = d.max_inner_product(k.count(*q));
            let text = format!(
                "reconstruction error {:.3e}\nmax pairwise inner product {orth:.3e}",
                d.reconstruction_error
            );
            Report {
                inputs: json!({ "file": p(file), "chain": p(chain), "q": q }),
                result: json!({
                    "harmonic": by_id(&k, &d.harmonic),
                    "exact": by_id(&k, &d.exact),
                    "coexact": by_id(&k, &d.coexact),
                    "reconstruction_error": d.reconstruction_error,
                    "max_inner_product": orth,
                    "exact_residual": d.exact_residual,
                    "coexact_residual": d.coexact_residual,
                }),
                text,
                tolerances: json!({ "rank_cutoff": 1e-10 }),
            }
        }
        Command::GapTrend { family, q, sizes, circumference } => {
            let fam: Box<dyn ExhaustionFamily> = match family {
                Family::Cylinder => Box::new(CylinderFamily { circumference: *circumference }),
                Family::Triangles => Box::new(DisjointTrianglesFamily),
            };
            let t = gap_trend(fam.as_ref(), *q, sizes)?;
            let mut text: Vec<String> = t.sizes.iter().zip(&t.gaps).map(|(n, g)| format!("N={n} gap={g:.12}")).collect();
            text.push(format!("verdict: {} (heuristic)", t.verdict));
            Report {
                inputs: json!({ "family": t.family, "q": q, "sizes": sizes }),
                result: json!({ "gap": t.gaps, "verdict": t.verdict, "strictly_decreasing": t.strictly_decreasing, "heuristic": true, "notes": t.notes }),
                text: text.join("\n"),
                tolerances: json!({ "eigen_tol": crate::hodge::DEFAULT_TOL }),
            }
        }
        Command::Gh(TwoSpaces { x, y }) => {
            let (a, b) = (io::read_metric(x)?, io::read_metric(y)?);
            let r = gh_distance(&a, &b, tol)?;
            Report {
                inputs: json!({ "x": p(x), "y": p(y) }),
                text: format!("[{}, {}]", r.lower_f64(), r.upper_f64()),
                result: json!({
                    "lower": r.lower_f64(),
                    "upper": r.upper_f64(),
                    "lower_exact": r.lower.to_string(),
                    "upper_exact": r.upper.to_string(),
                    "iterations": r.iterations,
                    "correspondence": r.correspondence,
                }),
                tolerances: json!({ "tol": tol }),
            }
        }
        Command::Dl { spaces: TwoSpaces { x, y }, max_size } => {
            let d = lipschitz_distance(&io::read_metric(x)?, &io::read_metric(y)?, *max_size)?;
            Report {
                inputs: json!({ "x": p(x), "y": p(y), "max_size": max_size }),
                result: json!({ "distance": d }),
                text: d.to_string(),
                tolerances: no_tol,
            }
        }
        Command::Dltop(TwoSpaces { x, y }) => {
            let d = lipschitz_top_distance(&io::read_metric(x)?, &io::read_metric(y)?)?;
            Report {
                inputs: json!({ "x": p(x), "y": p(y) }),
                result: json!({ "distance": if d.is_finite() { json!(d) } else { json!("inf") } }),
                text: if d.is_finite() { d.to_string() } else { "inf".into() },
                tolerances: no_tol,
            }
        }
        Command::Hausdorff { file, a, b } => {
            let m = io::read_metric(file)?;
            if a.iter().chain(b).any(|&i| i >= m.len()) {
                return Err(Error::InvalidArgument(format!("point index out of range 0..{}", m.len())));
            }
            let d = hausdorff_distance(&m, a, b)?;
            Report {
                inputs: json!({ "file": p(file), "a": a, "b": b }),
                result: json!({ "distance": crate::exact::q_to_f64(&d), "exact": d.to_string() }),
                text: io::show_exact(&d),
                tolerances: no_tol,
            }
        }
        Command::ClassifyMap { source, target, map } => {
            let (s, t) = (io::read_metric(source)?, io::read_metric(target)?);
            let m: MapJson = io::read_json(map)?;
            let f = MetricMap::new(&s, &t, m.assignment)?;
            let c = classify_map(&f);
            let text = format!(
                "semilinearity {}\ndilatation {}",
                io::show_exact(&c.semilinearity),
                c.dilatation.as_ref().map(io::show_exact).unwrap_or_else(|| "undefined".into())
            );
            Report {
                inputs: json!({ "source": p(source), "target": p(target), "map": p(map) }),
                result: serde_json::to_value(&c)?,
                text,
                tolerances: no_tol,
            }
        }
        Command::SubdivideCheck { file } => {
            let k = complex(file)?;
            let r = subdivision_invariance_check(&barycentric_subdivide(&k)?)?;
            let text = [
                ("zeta_iso", r.zeta_iso),
                ("theta_chain_map", r.theta_chain_map),
                ("theta_mono", r.theta_mono),
                ("eta_theta_id", r.eta_theta_id),
                ("betti_equal", r.betti_equal),
                ("theta_homology_iso", r.theta_homology_iso),
            ]
            .iter()
            .map(|(n, ok)| format!("{n}: {}", if *ok { "pass" } else { "fail" }))
            .collect::<Vec<_>>()
            .join("\n");
            Report { inputs: json!({ "file": p(file) }), result: serde_json::to_value(&r)?, text, tolerances: no_tol }
        }
        Command::Locality { radius, operator, cap, file } => {
            let k = complex(file)?;
            let op: OperatorJson = io::read_json(operator)?;
            let t = op.resolve(&k, &k)?;
            let r = classify_locality(&t, &k, &k, *radius, *cap)?;
            let text = format!(
                "vicinal: {}\nlocal radius: {}\nnearly local constant: {}",
                r.vicinality.map(|v| v.to_string()).unwrap_or_else(|| "no".into()),
                r.local_radius.map(|v| v.to_string()).unwrap_or_else(|| "none".into()),
                r.nearly_local_constant.map(|v| v.to_string()).unwrap_or_else(|| "none".into()),
            );
            Report {
                inputs: json!({ "file": p(file), "operator": p(operator), "radius": radius, "cap": cap }),
                result: serde_json::to_value(&r)?,
                text,
                tolerances: no_tol,
            }
        }
        Command::PairSignature(PairFiles { core1, core0, glue }) => {
            let g = glue_pair(&read_pair(core1, core0, glue)?)?;
            let f = intersection_form_with(&g.complex, &g.fundamental)?;
            Report {
                inputs: json!({ "core1": p(core1), "core0": p(core0), "glue": p(glue) }),
                text: f.signature.to_string(),
                result: serde_json::to_value(&f)?,
                tolerances: no_tol,
            }
        }
        Command::DualityCheck { file } => {
            let r = poincare_duality_check(&complex(file)?)?;
            let text = format!(
                "betti {}\ncobetti {}\ncap ranks {}\n{}",
                list(&r.betti),
                list(&r.cobetti),
                list(&r.cap_ranks),
                if r.passed { "pass" } else { "fail" }
            );
            Report { inputs: json!({ "file": p(file) }), result: serde_json::to_value(&r)?, text, tolerances: no_tol }
        }
        Command::BordismCompare { a_core1, a_core0, a_glue, a_invariants, b_core1, b_core0, b_glue, b_invariants } => {
            let a = read_pair(a_core1, a_core0, a_glue)?;
            let b = read_pair(b_core1, b_core0, b_glue)?;
            let request = |pair: &ManifoldPairDescription, path: &Option<PathBuf>| -> Result<_> {
                let inv: InvariantsJson = match path {
                    Some(f) => io::read_json(f)?,
                    None => InvariantsJson::default(),
                };
                inv.resolve(&glue_pair(pair)?.complex)
            };
            let r = cs_bordism_compare(&a, &request(&a, a_invariants)?, &b, &request(&b, b_invariants)?)?;
            let mut text = r.verdict.clone();
            if let Some(n) = &r.note {
                text.push_str(&format!(" ({n})"));
            }
            Report {
                inputs: json!({
                    "a": { "core1": p(a_core1), "core0": p(a_core0), "glue": p(a_glue), "invariants": a_invariants.as_deref().map(p) },
                    "b": { "core1": p(b_core1), "core0": p(b_core0), "glue": p(b_glue), "invariants": b_invariants.as_deref().map(p) },
                }),
                result: serde_json::to_value(&r)?,
                text,
                tolerances: no_tol,
            }
        }
        Command::UniformityCheck { file, theta0, c1, c2, c } => {
            let g = match io::read_complex(file)? {
                ComplexFile::Geometric(g) => g,
                ComplexFile::Absolute(_) => {
                    return Err(Error::InvalidArgument("uniformity check needs vertex coordinates".into()))
                }
            };
            let r = uniformity_check(&g, *theta0, *c1, *c2, *c)?;
            Report {
                inputs: json!({ "file": p(file), "theta0": theta0, "c1": c1, "c2": c2, "c": c }),
                text: if r.passed() { "pass".into() } else { "fail".into() },
                result: serde_json::to_value(&r)?,
                tolerances: no_tol,
            }
        }
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Betti { .. } => "betti",
        Command::Spectrum { .. } => "spectrum",
        Command::Hodge { .. } => "hodge",
        Command::GapTrend { .. } => "gap-trend",
        Command::Gh(_) => "gh",
        Command::Dl { .. } => "dl",
        Command::Dltop(_) => "dltop",
        Command::Hausdorff { .. } => "hausdorff",
        Command::ClassifyMap { .. } => "classify-map",
        Command::SubdivideCheck { .. } => "subdivide-check",
        Command::Locality { .. } => "locality",
        Command::PairSignature(_) => "pair-signature",
        Command::DualityCheck { .. } => "duality-check",
        Command::BordismCompare { .. } => "bordism-compare",
        Command::UniformityCheck { .. } => "uniformity-check",
    }
}

/// Caps the global thread pool from [`THREADS_ENV`] if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (rendered, String::new()) } else { (String::new(), rendered) };
            return Outcome { code, stdout, stderr };
        }
    };
    let name = command_name(&cli.command);
    if !(cli.tol > 0.0) || !cli.tol.is_finite() {
        return Outcome { code: 2, stdout: String::new(), stderr: format!("error: --tol must be positive, got {}\n", cli.tol) };
    }
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(r) => {
            let stdout = if cli.json {
                let mut tolerances = json!({ "tol": cli.tol });
                if let (Value::Object(t), Value::Object(extra)) = (&mut tolerances, r.tolerances) {
                    t.extend(extra);
                }
                let timings = if cli.timings { json!({ "total_ms": start.elapsed().as_secs_f64() * 1e3 }) } else { Value::Null };
                let obj = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "inputs": r.inputs,
                    "seed": cli.seed,
                    "result": r.result,
                    "tolerances": tolerances,
                    "timings": timings,
                });
                format!("{}\n", serde_json::to_string_pretty(&obj).expect("report serializes"))
            } else {
                format!("{}\n", r.text)
            };
            Outcome { code: 0, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = if e.is_validation() { 2 } else { 1 };
            let stdout = if cli.json {
                let obj = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "error": { "message": e.to_string(), "validation": e.is_validation() },
                });
                format!("{}\n", serde_json::to_string_pretty(&obj).expect("report serializes"))
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}
