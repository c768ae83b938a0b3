//! Exact distributive-polyhedron toolkit.
//!
//! Every subcommand reads JSON files, writes one JSON object to standard
//! output (DOT with `--dot`), and exits 0 on success or a true answer, 1 on
//! a definite negative, 2 on usage or parse errors, 3 when a budget cap is
//! exceeded. Rationals are written as `"p/q"` strings throughout.

mod cmd;
mod dot;
mod io;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dpoly")]
#[command(about = "Distributive lattices of potentials, bonds, and generalized flows \
on arc-parameterized digraphs, in exact rational arithmetic")]
#[command(version)]
struct Cli {
    /// Sampling seed, echoed in every JSON output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Budget override: enumeration element caps, the subset-oracle arc
    /// limit for verify, sampling trials for check-distributive.
    #[arg(long, global = true)]
    cap: Option<usize>,

    /// Emit a DOT rendering instead of JSON (where one exists).
    #[arg(long, global = true)]
    dot: bool,

    /// Write the artifact to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize a network-form H-description or sample for a refutation.
    CheckDistributive {
        /// HPolyhedron file {"A": [[..]], "b": [..], "rel": ["le"|"eq", ..]}
        h: PathBuf,
    },
    /// Nonnegative disjoint kernel basis of a subspace, or a witness pair.
    NndBasis {
        /// Subspace file {"n"?: int, "offset"?: [..], "directions": [[..]]}
        space: PathBuf,
    },
    /// Network matrix realizing a nonnegative disjoint basis.
    Netmatrix {
        /// Basis file {"n": int, "vectors": [[..]]}
        basis: PathBuf,
    },
    /// Test a potential against the polyhedron of a graph and capacities.
    Member {
        graph: PathBuf,
        /// Arc capacity file (rational vector).
        #[arg(long)]
        c: PathBuf,
        /// Potential file (rational vector).
        #[arg(long)]
        p: PathBuf,
    },
    /// Componentwise max of two members (verified member again).
    Join {
        graph: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Componentwise min of two members (verified member again).
    Meet {
        graph: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Pin one vertex per kernel direction so potentials map to bonds
    /// bijectively; prints the pins and the loop-augmented graph.
    Reduce {
        graph: PathBuf,
        /// Upper capacity file.
        #[arg(long)]
        upper: PathBuf,
        /// Optional lower capacity file (two-sided window).
        #[arg(long)]
        lower: Option<PathBuf>,
    },
    /// Image of a potential under the network map.
    Bond {
        graph: PathBuf,
        #[arg(long)]
        p: PathBuf,
    },
    /// Pinned potential of a bond, or a definite not-a-bond verdict.
    Potential {
        graph: PathBuf,
        #[arg(long)]
        upper: PathBuf,
        #[arg(long)]
        lower: Option<PathBuf>,
        /// Candidate bond file (arc vector).
        #[arg(long)]
        x: PathBuf,
    },
    /// Shift capacities so prescribed circular balances become zero.
    DeltaTranslate {
        graph: PathBuf,
        #[arg(long)]
        lower: PathBuf,
        #[arg(long)]
        upper: PathBuf,
        /// Prescriptions file [[arc, "p/q"], ..] on non-tree arcs.
        #[arg(long)]
        delta: PathBuf,
        /// Optional spanning tree file [arc, ..]; BFS tree by default.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Enumerate the integral bond lattice inside an integer capacity box.
    LatticeEnum {
        graph: PathBuf,
        /// Integer lower bounds file [int, ..].
        #[arg(long)]
        lower: PathBuf,
        /// Integer upper bounds file [int, ..].
        #[arg(long)]
        upper: PathBuf,
        /// Optional prescriptions file [[arc, int], ..].
        #[arg(long)]
        delta: Option<PathBuf>,
    },
    /// Simple cycles with class and multiplier, plus the combinatorial
    /// supports (breakeven cycles and bicycles) with canonical flows.
    Cycles { graph: PathBuf },
    /// Circular balance over a walk, or all bicircular balances of x.
    Balance {
        graph: PathBuf,
        /// Arc vector file.
        #[arg(long)]
        x: PathBuf,
        /// Optional closed walk file [{"arc": i, "dir": 1|-1}, ..].
        #[arg(long)]
        walk: Option<PathBuf>,
    },
    /// Test an arc vector for generalized bond membership: capacities plus
    /// prescribed bicircular balances.
    IsBond {
        graph: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Optional prescriptions file [[support_index, "p/q"], ..].
        #[arg(long)]
        delta: Option<PathBuf>,
    },
    /// Transfer a planar flow space to the bond space of its dual.
    Dualize {
        /// Embedding file: graph JSON plus {"faces": [[{"arc","dir"}, ..], ..]}
        embedding: PathBuf,
    },
    /// Reparameterize arcs from positive vertex multipliers so every cycle
    /// multiplier telescopes to one.
    BreakevenGen {
        graph: PathBuf,
        /// Vertex multiplier file (positive rationals).
        #[arg(long)]
        mu: PathBuf,
    },
    /// Run the cross-module consistency suite and report each check.
    Verify { graph: PathBuf },
}

fn dispatch(cli: &Cli) -> Result<io::Outcome, io::Failure> {
    match &cli.command {
        Command::CheckDistributive { h } => {
            cmd::check_distributive(h, cli.cap.unwrap_or(200), cli.seed)
        }
        Command::NndBasis { space } => cmd::nnd_basis(space, cli.cap),
        Command::Netmatrix { basis } => cmd::netmatrix(basis),
        Command::Member { graph, c, p } => cmd::member(graph, c, p),
        Command::Join { graph, c, p, q } => cmd::lattice_op(graph, c, p, q, true),
        Command::Meet { graph, c, p, q } => cmd::lattice_op(graph, c, p, q, false),
        Command::Reduce { graph, upper, lower } => cmd::reduce(graph, upper, lower.as_deref()),
        Command::Bond { graph, p } => cmd::bond(graph, p),
        Command::Potential { graph, upper, lower, x } => {
            cmd::potential(graph, upper, lower.as_deref(), x)
        }
        Command::DeltaTranslate { graph, lower, upper, delta, tree } => {
            cmd::delta_translate_cmd(graph, lower, upper, delta, tree.as_deref())
        }
        Command::LatticeEnum { graph, lower, upper, delta } => {
            cmd::lattice_enum(graph, lower, upper, delta.as_deref(), cli.cap)
        }
        Command::Cycles { graph } => cmd::cycles(graph, cli.cap),
        Command::Balance { graph, x, walk } => cmd::balance(graph, x, walk.as_deref(), cli.cap),
        Command::IsBond { graph, c, x, delta } => cmd::is_bond(graph, c, x, delta.as_deref()),
        Command::Dualize { embedding } => cmd::dualize(embedding),
        Command::BreakevenGen { graph, mu } => cmd::breakeven_gen(graph, mu),
        Command::Verify { graph } => cmd::verify(graph, cli.seed, cli.cap),
    }
}

fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(out) => match io::emit(&out, cli.seed, cli.dot, cli.output.as_deref()) {
            Ok(()) => {
                if out.negative {
                    1
                } else {
                    0
                }
            }
            Err(f) => {
                eprintln!("{}", f.report());
                f.exit_code()
            }
        },
        Err(f) => {
            eprintln!("{}", f.report());
            f.exit_code()
        }
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
