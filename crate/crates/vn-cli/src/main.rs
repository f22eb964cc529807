use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use vn::centralizer::centralizer_descriptor;
use vn::distortion::{distortion_table, jump_profile, GeneratorSlopeBound, CSV_HEADER};
use vn::flowgraph::{build_flow_graph, build_train_track, flow_graph_dot, flow_graph_json, train_track_dot};
use vn::{make_revealing, Address, Element};

#[derive(Parser)]
#[command(name = "vn", version, about = "Tree-pair arithmetic and dynamics in the Higman-Thompson groups V_n")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Graphviz output (flowgraph, traintrack)
    #[arg(long, global = true)]
    dot: bool,
    /// CSV output (distortion)
    #[arg(long, global = true)]
    csv: bool,
    /// Depth bound for bounded searches
    #[arg(long, global = true, default_value_t = 16)]
    depth_bound: usize,
    /// Seed for `random`
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest power in distortion tables
    #[arg(long, global = true, default_value_t = 20)]
    max_z: u64,
}

#[derive(Subcommand)]
enum Verb {
    /// Reduced form of an element
    Reduce { file: PathBuf },
    /// A followed by B
    Compose { a: PathBuf, b: PathBuf },
    Invert { file: PathBuf },
    /// F⁻¹ A F
    Conjugate { a: PathBuf, f: PathBuf },
    Order { file: PathBuf },
    /// Revealing pair with components, chains and periodic orbits
    Reveal { file: PathBuf },
    Flowgraph { file: PathBuf },
    Traintrack { file: PathBuf },
    /// Centralizer descriptor; exits 2 when a bounded search was inconclusive
    Centralizer { file: PathBuf },
    /// Slope growth of powers along a repelling orbit
    Distortion {
        file: PathBuf,
        /// Repeller leaf or component root (default: the first repeller)
        #[arg(long)]
        repeller: Option<String>,
        /// Generator slope bound P (default: computed from the element alone)
        #[arg(long)]
        slope_bound: Option<i64>,
    },
    /// Random reduced element
    Random {
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
}

enum Failure {
    Input(String),
    Inconclusive(String),
}

impl From<vn::Error> for Failure {
    fn from(e: vn::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(path: &Path) -> Result<Element, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Element::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_pair(a: &Path, b: &Path) -> Result<(Element, Element), Failure> {
    let (x, y) = (load(a)?, load(b)?);
    if x.arity() != y.arity() {
        return Err(vn::Error::Arity(x.arity(), y.arity()).into());
    }
    Ok((x, y))
}

fn element_json(e: &Element) -> Value {
    json!({
        "arity": e.arity(),
        "rules": e.rules().iter().map(|(d, r)| [d.to_string(), r.to_string()]).collect::<Vec<_>>(),
    })
}

fn show_element(cli: &Cli, e: &Element) -> String {
    if cli.json {
        pretty(&element_json(e))
    } else {
        e.to_text()
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String, Failure> {
    Ok(match &cli.verb {
        Verb::Reduce { file } => show_element(cli, &load(file)?.reduce()),
        Verb::Compose { a, b } => {
            let (x, y) = load_pair(a, b)?;
            show_element(cli, &x.compose(&y)?)
        }
        Verb::Invert { file } => show_element(cli, &load(file)?.invert()),
        Verb::Conjugate { a, f } => {
            let (x, y) = load_pair(a, f)?;
            show_element(cli, &x.conjugate(&y)?)
        }
        Verb::Order { file } => {
            let o = load(file)?.order()?;
            if cli.json {
                pretty(&json!({ "order": o.to_string() }))
            } else {
                format!("{o}\n")
            }
        }
        Verb::Reveal { file } => pretty(&make_revealing(&load(file)?)?.to_json()),
        Verb::Flowgraph { file } => {
            let fg = build_flow_graph(&make_revealing(&load(file)?)?);
            if cli.dot {
                flow_graph_dot(&fg)
            } else {
                pretty(&flow_graph_json(&fg))
            }
        }
        Verb::Traintrack { file } => {
            let tt = build_train_track(&make_revealing(&load(file)?)?);
            if cli.dot {
                train_track_dot(&tt)
            } else {
                pretty(&tt.to_json())
            }
        }
        Verb::Centralizer { file } => {
            let d = centralizer_descriptor(&load(file)?, cli.depth_bound)?;
            let out = if cli.json { pretty(&d.to_json()) } else { format!("{}\n", d.formula) };
            if !d.is_exact() {
                print!("{out}");
                return Err(Failure::Inconclusive(format!(
                    "bounded search at depth {} was inconclusive; classes are heuristic",
                    cli.depth_bound
                )));
            }
            out
        }
        Verb::Distortion { file, repeller, slope_bound } => {
            let e = load(file)?;
            let rp = make_revealing(&e)?;
            let leaf = match repeller {
                Some(s) => Address::parse(s, e.arity())?,
                None => rp
                    .repellers()
                    .next()
                    .map(|s| s.chain[0].clone())
                    .ok_or_else(|| Failure::Input("element is torsion: no repelling orbit".into()))?,
            };
            let profile = jump_profile(&rp, &leaf)?;
            let bound = match slope_bound {
                Some(p) => GeneratorSlopeBound::new(*p)?,
                None => GeneratorSlopeBound::from_generators(std::slice::from_ref(&e)),
            };
            let rows = distortion_table(&rp, &profile, cli.max_z, bound)?;
            if cli.json {
                pretty(&json!({ "profile": profile, "slope_bound": bound.0, "rows": rows }))
            } else {
                let mut s = format!("{CSV_HEADER}\n");
                for r in rows {
                    s.push_str(&r.csv());
                    s.push('\n');
                }
                s
            }
        }
        Verb::Random { arity, size } => {
            if !(2..=10).contains(arity) {
                return Err(Failure::Input(format!("arity {arity} is outside 2..=10")));
            }
            show_element(cli, &Element::random(*arity, *size, cli.seed))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Inconclusive(msg)) => {
            eprintln!("inconclusive: {msg}");
            ExitCode::from(2)
        }
    }
}
