use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use dots_polygons::geometry::{Point, Rat};
use dots_polygons::polygon_game::{Edge, GameStateJson, PolygonGameState, Variant};
use dots_polygons::reductions::embedding::fixture;
use dots_polygons::reductions::{
    sat_to_vcp, vcp_to_boxes, vcp_to_polygons, verify_reduction, BellParameters, CnfInstance, GadgetOptions,
    OrthogonalEmbedding,
};
use dots_polygons::solver::{verify_last_player_theorem, Solver, DEFAULT_BUDGET};
use serde_json::{json, Value};

use crate::game::{AiPolicy, Game, Move};
use crate::service::{Service, ServiceConfig};

#[derive(Parser, Debug)]
#[command(name = "dotspoly", version, about = "Dots & Polygons and Dots & Boxes toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Solve a polygon game state exactly and print the result as JSON.
    Solve {
        state: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Self-play, or replay a scripted move list, printing a transcript.
    Play {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Simple)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::Greedy)]
        ai: PolicyArg,
        /// JSON list of `[i, j]` moves to replay instead of self-play.
        #[arg(long)]
        moves: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
    },
    /// Run the HTTP game service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Drop sessions idle for this many seconds.
        #[arg(long)]
        ttl_secs: Option<u64>,
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Check that the last player secures half the hull on random convex positions.
    Theorem {
        /// A size or an inclusive range such as `3..7`.
        #[arg(long, default_value = "3..5")]
        n: String,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Simple)]
        variant: VariantArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check satisfiability against the cycle packing of the gadget graph.
    Reduction {
        cnf: PathBuf,
        #[arg(long, default_value_t = 1)]
        wire_k: usize,
        #[arg(long, default_value_t = 2)]
        min_variable_k: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReduceCmd {
    /// DIMACS CNF to gadget graph JSON.
    Sat2vcp {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        wire_k: usize,
    },
    /// Embedding JSON (or `fixture:NAME`) to a Dots & Boxes board.
    Vcp2boxes {
        input: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        s_b: i64,
        #[arg(long, default_value_t = 0)]
        s_r: i64,
    },
    /// Embedding JSON (or `fixture:NAME`) to a polygon game state.
    Vcp2polygons {
        input: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Simple,
    Holes,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Simple => Variant::Simple,
            VariantArg::Holes => Variant::Holes,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PolicyArg {
    Greedy,
    SolverCapped,
}

impl From<PolicyArg> for AiPolicy {
    fn from(p: PolicyArg) -> AiPolicy {
        match p {
            PolicyArg::Greedy => AiPolicy::Greedy,
            PolicyArg::SolverCapped => AiPolicy::SolverCapped,
        }
    }
}

/// A failed run: exit code 1 for a failed check, 2 for bad input.
#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub code: &'static str,
    pub message: String,
}

fn usage(code: &'static str, message: impl Into<String>) -> Failure {
    Failure { exit: 2, code, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage("unreadable-file", format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| usage("serialize", e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| usage("unwritable-file", format!("{}: {e}", path.display())))
}

fn parse_range(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || usage("bad-range", format!("expected N or A..B, got {s}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(s)?]),
    }
}

fn load_embedding(input: &str) -> Result<OrthogonalEmbedding, Failure> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return fixture(name).ok_or_else(|| usage("unknown-fixture", name.to_string()));
    }
    serde_json::from_str(&read(Path::new(input))?).map_err(|e| usage("bad-embedding", e.to_string()))
}

fn load_position(path: &Path, variant: Variant) -> Result<PolygonGameState, Failure> {
    let text = read(path)?;
    if let Ok(points) = serde_json::from_str::<Vec<Point>>(&text) {
        return PolygonGameState::new_game(points, variant).map_err(|e| usage("invalid-points", e.to_string()));
    }
    let j: GameStateJson = serde_json::from_str(&text).map_err(|e| usage("bad-state", e.to_string()))?;
    PolygonGameState::from_json(j).map_err(|e| usage("bad-state", e.to_string()))
}

fn print(out: &mut dyn Write, v: impl std::fmt::Display) {
    let _ = writeln!(out, "{v}");
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Solve { state, budget } => {
            let s = load_position(&state, Variant::Simple)?;
            let r = Solver::new(budget).solve(&s);
            print(out, serde_json::to_string_pretty(&r).expect("serializable"));
            Ok(())
        }
        Cmd::Verify(VerifyCmd::Theorem { n, trials, seed, variant, budget }) => {
            let mut failed = 0;
            for n in parse_range(&n)? {
                if n < 3 {
                    return Err(usage("bad-range", "n must be at least 3"));
                }
                let r = verify_last_player_theorem(n, trials, seed, variant.into(), budget);
                print(
                    out,
                    format!(
                        "n={n} seed={seed} last={}: {}/{} pass ({} partial, {} failed)",
                        r.last_player, r.passed, r.trials, r.partial, r.failed
                    ),
                );
                failed += r.failed;
            }
            if failed > 0 {
                return Err(Failure { exit: 1, code: "counterexample", message: format!("{failed} instance(s) failed") });
            }
            Ok(())
        }
        Cmd::Verify(VerifyCmd::Reduction { cnf, wire_k, min_variable_k }) => {
            let c: CnfInstance = read(&cnf)?.parse().map_err(|e: dots_polygons::reductions::ReductionError| usage("bad-cnf", e.to_string()))?;
            let opts = GadgetOptions { wire_k, min_variable_k, allow_nonplanar: true };
            let r = verify_reduction(&c, opts).map_err(|e| usage("reduction", e.to_string()))?;
            print(out, serde_json::to_string_pretty(&r).expect("serializable"));
            if !r.incidence_planar {
                print(out, "note: the clause-variable incidence graph is not planar");
            }
            if r.holds() {
                print(out, format!("equivalence holds: satisfiable={} packing={} target={}", r.satisfiable, r.packing, r.target));
                Ok(())
            } else {
                Err(Failure { exit: 1, code: "equivalence-fails", message: format!("packing {} vs target {}", r.packing, r.target) })
            }
        }
        Cmd::Reduce(ReduceCmd::Sat2vcp { input, output, wire_k }) => {
            let c: CnfInstance = read(&input)?.parse().map_err(|e: dots_polygons::reductions::ReductionError| usage("bad-cnf", e.to_string()))?;
            let opts = GadgetOptions { wire_k, allow_nonplanar: true, ..Default::default() };
            let g = sat_to_vcp(&c, opts).map_err(|e| usage("reduction", e.to_string()))?;
            write_json(&output, &g)?;
            print(out, format!("wrote {} ({} vertices, target {})", output.display(), g.graph.vertices, g.target));
            Ok(())
        }
        Cmd::Reduce(ReduceCmd::Vcp2boxes { input, output, s_b, s_r }) => {
            let e = load_embedding(&input)?;
            let b = vcp_to_boxes(&e, s_b, s_r).map_err(|e| usage("reduction", e.to_string()))?;
            write_json(&output, &b)?;
            print(out, format!("wrote {} ({} unclaimed cells)", output.display(), b.unclaimed_cells().len()));
            Ok(())
        }
        Cmd::Reduce(ReduceCmd::Vcp2polygons { input, output }) => {
            let e = load_embedding(&input)?;
            let s = vcp_to_polygons(&e, &BellParameters::default(), &Rat::zero(), &Rat::zero())
                .map_err(|e| usage("reduction", e.to_string()))?;
            write_json(&output, &s.to_json())?;
            print(out, format!("wrote {} ({} points)", output.display(), s.points().len()));
            Ok(())
        }
        Cmd::Play { points, variant, ai, moves, budget } => {
            let s = load_position(&points, variant.into())?;
            let script: Option<Vec<Edge>> = match moves {
                Some(p) => Some(serde_json::from_str(&read(&p)?).map_err(|e| usage("bad-moves", e.to_string()))?),
                None => None,
            };
            let mut g = Game::Polygons(s);
            let mut turn = 0;
            while !g.is_terminal() {
                let mv = match &script {
                    Some(list) if turn < list.len() => Move::Edge([list[turn].0, list[turn].1]),
                    Some(_) => break,
                    None => g.ai_move(ai.into(), budget),
                };
                let who = g.to_move();
                let (n, o) = g.apply(&mv).map_err(|e| Failure { exit: 1, code: "illegal-move", message: format!("move {turn}: {e}") })?;
                let Move::Edge([i, j]) = mv else { unreachable!() };
                print(out, format!("{:>3} {who} {i}-{j} scored {}{}", turn + 1, o.scored, if o.extra_turn { " (again)" } else { "" }));
                g = n;
                turn += 1;
            }
            print(
                out,
                format!("final R {} B {}{}", g.score(dots_polygons::polygon_game::Player::R), g.score(dots_polygons::polygon_game::Player::B), if g.is_terminal() { "" } else { " (unfinished)" }),
            );
            Ok(())
        }
        Cmd::Serve { port, host, ttl_secs, snapshot_dir } => {
            let addr: std::net::SocketAddr =
                format!("{host}:{port}").parse().map_err(|_| usage("bad-address", format!("{host}:{port}")))?;
            let svc = Service::new(ServiceConfig { ttl: ttl_secs.map(Duration::from_secs), snapshot_dir });
            let restored = svc.load_snapshots().map_err(|e| usage("snapshots", e.to_string()))?;
            print(out, format!("serving on http://{addr} ({restored} sessions restored)"));
            let _ = out.flush();
            let rt = tokio::runtime::Runtime::new().map_err(|e| usage("runtime", e.to_string()))?;
            rt.block_on(crate::http::serve(Arc::new(svc), addr)).map_err(|e| usage("serve", e.to_string()))
        }
    }
}

/// Run with the given arguments (program name first); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let body = json!({ "code": "usage", "message": e.kind().to_string(), "detail": Value::String(e.to_string()) });
                let _ = writeln!(err, "{body}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let body = json!({ "code": f.code, "message": f.message, "detail": Value::Null });
            let _ = writeln!(err, "{body}");
            f.exit
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("4").unwrap(), vec![4]);
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("x").is_err());
    }
}
