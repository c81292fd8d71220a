//! Command-line front end: build and export graphs, compute distances and
//! equivalences, and generate or re-verify chaos certificates. Exit codes:
//! 0 success, 1 domain error, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gromov::ball::{ball, bfs_order};
use gromov::chaos::{
    aperiodicity_certificate, chaotic_verdict, generate_almost_chaotic, check_almost_chaotic,
    in_v, in_w, AlmostChaoticCertificate, AlmostChaoticOutcome,
};
use gromov::color::{parse_rational, Color};
use gromov::constructions::{champernowne_bit, enumerate_aperiodic, EnumerationSpec};
use gromov::equivalence::{distance_truncated, find_equivalence};
use gromov::expander::{DegreeBound, DegreeOverride, Expander};
use gromov::io::{export_dot, ChampernowneOrder, GraphSpec, ResolvedGraph};
use gromov::symmetry::{automorphisms, pointed_class_count};
use gromov::FiniteColoredGraph;

#[derive(Parser)]
#[command(name = "gromov", version, about = "Exact computation with pointed colored graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Resolve a graph spec and export it (finite window for infinite graphs)
    Build {
        /// Graph spec file: inline graph JSON or a named construction
        spec: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Export radius around the root for infinite graphs
        #[arg(long)]
        window: Option<usize>,
        /// Emit DOT instead of JSON
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Extract the radius-r ball around a vertex
    Ball {
        spec: PathBuf,
        #[arg(long)]
        center: Option<String>,
        #[arg(short, long)]
        radius: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Truncated ultrametric distance between two pointed graphs
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
    },
    /// Search for an (R,eps)-equivalence between two pointed graphs
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'R', long)]
        radius: usize,
        /// Color tolerance as "p/q"
        #[arg(long)]
        eps: String,
    },
    /// Automorphism group of a finite colored graph
    Aut {
        graph: PathBuf,
        /// Require the basepoint to be fixed
        #[arg(long)]
        pointed: bool,
    },
    /// (R,eps)-equivalence classes of basepoints over a window
    Classes {
        graph: PathBuf,
        /// Window radius around the basepoint
        #[arg(long)]
        window: usize,
        #[arg(short = 'R', long)]
        radius: usize,
        #[arg(long)]
        eps: String,
    },
    /// Print a single coloring value
    Color {
        family: ColorFamily,
        #[arg(short)]
        n: i64,
        #[arg(long, value_enum, default_value_t = OrderArg::Paper)]
        order: OrderArg,
    },
    /// W(n) membership: is the radius-n disk injectively colored?
    CheckW {
        spec: PathBuf,
        #[arg(long)]
        center: Option<String>,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Bounded search for V(n,r,m) membership
    CheckV {
        spec: PathBuf,
        #[arg(long)]
        center: Option<String>,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        #[arg(short)]
        m: usize,
        /// Defaults to $GROMOV_SEARCH_RADIUS, then 8
        #[arg(long)]
        search_radius: Option<usize>,
        /// Spine color for the K-construction, as a bit string
        #[arg(long)]
        spine_color: Option<String>,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Generate a depth-stamped certificate or verdict
    Certify {
        spec: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(short = 'N', long, default_value_t = 1)]
        depth_n: usize,
        #[arg(short = 'M', long, default_value_t = 1)]
        depth_m: usize,
        #[arg(long)]
        search_radius: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        spine_color: Option<String>,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Re-verify an almost-chaotic certificate against its graph
    Verify {
        cert: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Enumerate aperiodic pointed colored graphs by weight
    Enumerate {
        #[arg(long)]
        weight: usize,
        /// Colors come from the first P canonical bit strings
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long)]
        degrees_one_three: bool,
        #[arg(long)]
        basepoint_degree_one: bool,
        /// Print only the number of graphs
        #[arg(long)]
        count: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorFamily {
    Champernowne,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Paper,
    Standard,
}

impl From<OrderArg> for ChampernowneOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Paper => ChampernowneOrder::Paper,
            OrderArg::Standard => ChampernowneOrder::Standard,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Aperiodic,
    AlmostChaotic,
    Chaotic,
}

type DomainError = Box<dyn std::error::Error>;

fn load(path: &Path, degree_bound: Option<usize>) -> Result<ResolvedGraph, DomainError> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    // a bare graph document doubles as an inline spec
    if value.get("vertices").is_some() {
        let g: FiniteColoredGraph = serde_json::from_value(value)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(ResolvedGraph::Finite(g));
    }
    let spec: GraphSpec =
        serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(spec.resolve(degree_bound)?)
}

fn finite(path: &Path) -> Result<FiniteColoredGraph, DomainError> {
    match load(path, None)? {
        ResolvedGraph::Finite(g) => Ok(g),
        _ => Err(format!("{}: a finite graph is required here", path.display()).into()),
    }
}

fn center_of(resolved: &ResolvedGraph, chosen: Option<String>) -> Result<String, DomainError> {
    chosen
        .or_else(|| resolved.center())
        .ok_or_else(|| "the graph has no basepoint; pass --center".into())
}

fn search_radius_or_default(given: Option<usize>) -> usize {
    given
        .or_else(|| std::env::var("GROMOV_SEARCH_RADIUS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(8)
}

fn spine_color_arg(s: Option<String>) -> Result<Color, DomainError> {
    match s {
        Some(bits) => Ok(bits.parse::<Color>().map_err(|e| format!("--spine-color: {e}"))?),
        None => Ok(Color::zeros()),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), DomainError> {
    match out {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        None => print_out(content.trim_end()),
    }
    Ok(())
}

/// Print a line, swallowing broken pipes so `gromov ... | head` stays quiet.
fn print_out(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

/// A possibly degree-overridden borrowed expander; `in_v`/`build_k` demand
/// a finite declared bound.
fn with_bound<'a>(
    e: &'a dyn Expander,
    degree_bound: Option<usize>,
) -> Result<DegreeOverride<&'a dyn Expander>, DomainError> {
    let bound = match (e.degree_sup(), degree_bound) {
        (DegreeBound::Finite(d), None) => d,
        (_, Some(b)) => b,
        (DegreeBound::Unbounded, None) => {
            return Err("unbounded degree: pass --degree-bound".into())
        }
    };
    Ok(DegreeOverride { inner: e, bound })
}

fn run(cli: Cli) -> Result<ExitCode, DomainError> {
    match cli.cmd {
        Cmd::Build { spec, out, window, dot, degree_bound } => {
            let resolved = load(&spec, degree_bound)?;
            let graph = match &resolved {
                ResolvedGraph::Finite(g) => g.clone(),
                _ => {
                    let w = window.ok_or("infinite graph: pass --window to export")?;
                    let center = center_of(&resolved, None)?;
                    ball(&resolved, &center, w)?.graph
                }
            };
            let text = if dot { export_dot(&graph) } else { json(&graph) };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Ball { spec, center, radius, out, dot, degree_bound } => {
            let resolved = load(&spec, degree_bound)?;
            let center = center_of(&resolved, center)?;
            let b = ball(&resolved, &center, radius)?;
            let text = if dot { export_dot(&b.graph) } else { json(&b.graph) };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Dist { a, b, max_depth } => {
            let (ga, gb) = (finite(&a)?, finite(&b)?);
            let x = ga.basepoint().ok_or("first graph has no basepoint")?.clone();
            let y = gb.basepoint().ok_or("second graph has no basepoint")?.clone();
            let d = distance_truncated(&ga, &x, &gb, &y, max_depth)?;
            print_out(&serde_json::to_string(&d).expect("serializable distance"));
        }
        Cmd::Equiv { a, b, radius, eps } => {
            let (ga, gb) = (finite(&a)?, finite(&b)?);
            let x = ga.basepoint().ok_or("first graph has no basepoint")?.clone();
            let y = gb.basepoint().ok_or("second graph has no basepoint")?.clone();
            let tolerance = parse_rational(&eps)?;
            match find_equivalence(&ga, &x, &gb, &y, radius, &tolerance)? {
                Some(h) => print_out(&json(&h)),
                None => print_out("none"),
            }
        }
        Cmd::Aut { graph, pointed } => {
            let g = finite(&graph)?;
            print_out(&json(&automorphisms(&g, pointed)));
        }
        Cmd::Classes { graph, window, radius, eps } => {
            let g = finite(&graph)?;
            let bp = g.basepoint().ok_or("graph has no basepoint")?.clone();
            let tolerance = parse_rational(&eps)?;
            let keys: Vec<String> =
                bfs_order(&g, &bp, window)?.into_iter().map(|(v, _)| v).collect();
            print_out(&json(&pointed_class_count(&g, &keys, radius, &tolerance)?));
        }
        Cmd::Color { family: ColorFamily::Champernowne, n, order } => {
            print_out(&champernowne_bit(n, order.into()).to_string());
        }
        Cmd::CheckW { spec, center, n, degree_bound } => {
            let resolved = load(&spec, degree_bound)?;
            let center = center_of(&resolved, center)?;
            print_out(&in_w(&resolved, &center, n)?.to_string());
        }
        Cmd::CheckV { spec, center, n, r, m, search_radius, spine_color, degree_bound } => {
            let resolved = load(&spec, degree_bound)?;
            let center = center_of(&resolved, center)?;
            let e = resolved.as_expander().ok_or("an infinite graph is required")?;
            let bounded = with_bound(e, degree_bound)?;
            let search = search_radius_or_default(search_radius).max(r);
            let result = in_v(&bounded, &center, n, r, m, search, spine_color_arg(spine_color)?)?;
            print_out(&json(&result));
        }
        Cmd::Certify {
            spec,
            mode,
            depth_n,
            depth_m,
            search_radius,
            out,
            center,
            spine_color,
            degree_bound,
        } => {
            let resolved = load(&spec, degree_bound)?;
            let center = center_of(&resolved, center)?;
            let search = search_radius_or_default(search_radius);
            let text = match mode {
                Mode::Aperiodic => json(&aperiodicity_certificate(&resolved, &center, depth_n)?),
                Mode::AlmostChaotic | Mode::Chaotic => {
                    let e = resolved.as_expander().ok_or("an infinite graph is required")?;
                    let bounded = with_bound(e, degree_bound)?;
                    let witness = resolved.self_witness();
                    let spine = spine_color_arg(spine_color)?;
                    match mode {
                        Mode::AlmostChaotic => json(&generate_almost_chaotic(
                            &bounded, &center, depth_n, depth_m, search, spine, witness,
                        )?),
                        _ => json(&chaotic_verdict(
                            &bounded, &center, depth_n, depth_m, search, spine, witness,
                        )?),
                    }
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Verify { cert, spec, center, degree_bound } => {
            let text = fs::read_to_string(&cert)
                .map_err(|e| format!("cannot read {}: {e}", cert.display()))?;
            // accept either a bare certificate or certify's outcome wrapper
            let certificate: AlmostChaoticCertificate = serde_json::from_str(&text)
                .or_else(|_| {
                    serde_json::from_str::<AlmostChaoticOutcome>(&text).and_then(|o| match o {
                        AlmostChaoticOutcome::Certificate(c) => Ok(c),
                        AlmostChaoticOutcome::FailedAt(f) => Err(serde::de::Error::custom(
                            format!("not a certificate: generation failed at n={} {:?}", f.n, f.m),
                        )),
                    })
                })
                .map_err(|e| format!("{}: {e}", cert.display()))?;
            let resolved = load(&spec, degree_bound)?;
            let center = center_of(&resolved, center)?;
            let e = resolved.as_expander().ok_or("an infinite graph is required")?;
            let report = check_almost_chaotic(&e, &center, &certificate)?;
            print_out(&json(&report));
            if !report.valid {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Enumerate { weight, pool, degrees_one_three, basepoint_degree_one, count } => {
            let spec = EnumerationSpec {
                weight,
                degrees_one_three,
                basepoint_degree_one,
                color_pool: pool,
            };
            let graphs = enumerate_aperiodic(&spec);
            if count {
                print_out(&graphs.len().to_string());
            } else {
                print_out(&json(&graphs));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
