//! Batch command-line frontend. Subcommands wrap the library modules and
//! write JSON or CSV reports; there is no interactive mode.
//!
//! Exit-code contract: 0 success or all checks passed, 1 at least one check
//! failed, 2 usage error, 3 resource or convergence error. Identical
//! configuration and seed produce byte-identical output files; timing
//! diagnostics go to stderr so they cannot break that.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use num::{BigRational, FromPrimitive};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{exact_z, RationalEvaluation};
use crate::ext::{
    even_subgraph_tables, holant_ldc, holant_z_poly, hyper_ldc, hyper_z_poly, potts_ldc,
    potts_z_tutte, HolantInstance,
};
use crate::fptas::{approx_z_with, ApproxOptions};
use crate::graph::{IsingParams, PartialEvaluation, Pinning};
use crate::io;
use crate::ldc::ising_ldc_suite;
use crate::rc::{coupling_time, RCParams};
use crate::ssm::{fit_decay, ssm_scan, GraphFamily, SsmModel, DEFAULT_CATALOG};
use crate::{enumerate, rational};

#[derive(Debug, Parser)]
#[command(
    name = "zfc",
    about = "Ferromagnetic Ising partition functions in the Lee-Yang region: \
             approximation, exact oracles, divisibility checks, mixing harnesses"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all physical cores). Results do not depend
    /// on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact partition function of a graph file by brute-force enumeration.
    Exact {
        #[arg(long)]
        graph: PathBuf,
        /// Uniform edge activity; overrides the file value.
        #[arg(long)]
        beta: Option<String>,
        /// Uniform field as RE or RE,IM; overrides the file value.
        #[arg(long)]
        lambda: Option<String>,
        /// Also print the exact field-scaling polynomial (rational
        /// arithmetic; requires real parameters).
        #[arg(long)]
        poly: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Approximate partition function by the truncated-series telescoping
    /// algorithm.
    Approx {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Fixed truncation degree instead of the adaptive schedule.
        #[arg(long)]
        k: Option<usize>,
        /// Largest degree the adaptive schedule may try.
        #[arg(long, default_value_t = 96)]
        k_max: usize,
        /// Skip certified-region validation.
        #[arg(long = "unsafe")]
        unsafe_params: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Divisibility suites for the Ising model over the bundled small-graph
    /// corpus.
    Ldc {
        /// Largest vertex count of the corpus.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Boundary-sensitivity decay scan.
    Ssm {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Vertices for path/cycle, rungs for ladder, depth for binary-tree.
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        lambda: String,
        /// Field damping factor for the vertex model.
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 8)]
        d_max: usize,
        #[arg(long = "unsafe")]
        unsafe_params: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random-cluster Glauber dynamics: one coupling run, or a
    /// ladder-family coalescence sweep.
    Rc {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        step_cap: u64,
        /// Run a coalescence sweep over ladders 2xL for L in MIN,MAX.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        sweep_ladder: Option<Vec<usize>>,
        /// Seeds per instance in the sweep.
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extension-model oracles and divisibility suites (hypergraph
    /// independence, Potts, Holant).
    Ext {
        #[arg(long, value_enum)]
        model: ExtModelArg,
        /// Graph or hypergraph file for a single-instance oracle query.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        /// Run the exhaustive divisibility suite instead of a single query.
        #[arg(long)]
        suite: bool,
        /// Largest vertex count for the suite corpus.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Path,
    Cycle,
    Ladder,
    BinaryTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    IsingEdge,
    IsingVertex,
    RcEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtModelArg {
    Hyper,
    Potts,
    Holant,
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {s:?}")))
    };
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(text)?, 0.0)),
    }
}

fn parse_rational_flag(text: &str) -> Result<BigRational> {
    rational::parse_rational(text)
        .ok_or_else(|| Error::Parse(format!("bad rational {text:?}; use p/q or a finite decimal")))
}

fn resolve_params(
    loaded: &io::LoadedGraph,
    beta: &Option<String>,
    lambda: &Option<String>,
) -> Result<IsingParams> {
    let beta = match beta {
        Some(text) => vec![
            text.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad beta {text:?}")))?;
            loaded.graph.edge_count()
        ],
        None => loaded
            .beta
            .clone()
            .ok_or_else(|| Error::Argument("no beta in file or flags".into()))?,
    };
    let lambda = match lambda {
        Some(text) => vec![parse_complex(text)?; loaded.graph.vertex_count()],
        None => loaded
            .lambda
            .clone()
            .ok_or_else(|| Error::Argument("no lambda in file or flags".into()))?,
    };
    Ok(IsingParams { beta, lambda })
}

/// Runs a parsed configuration and returns the process exit code.
pub fn run(config: RunConfig) -> Result<i32> {
    if let Some(threads) = config.threads {
        // ignore the error when a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match config.command {
        Command::Exact {
            graph,
            beta,
            lambda,
            poly,
            output,
        } => {
            let loaded = io::load_graph(&graph)?;
            let params = resolve_params(&loaded, &beta, &lambda)?;
            let z = exact_z(
                &loaded.graph,
                &params,
                &PartialEvaluation::new(),
                &Pinning::new(),
            )?;
            let mut report = json!({"Z": {"re": z.re, "im": z.im}});
            if poly {
                let beta_rat: Vec<BigRational> = params
                    .beta
                    .iter()
                    .map(|&b| BigRational::from_f64(b).ok_or_else(|| {
                        Error::Parse(format!("beta {b} is not finite"))
                    }))
                    .collect::<Result<_>>()?;
                let lambda_rat: Vec<BigRational> = params
                    .lambda
                    .iter()
                    .map(|l| {
                        if l.im != 0.0 {
                            return Err(Error::Argument(
                                "the exact polynomial needs real parameters".into(),
                            ));
                        }
                        BigRational::from_f64(l.re)
                            .ok_or_else(|| Error::Parse(format!("lambda {} is not finite", l.re)))
                    })
                    .collect::<Result<_>>()?;
                let p = crate::exact::exact_z_poly(
                    &loaded.graph,
                    &beta_rat,
                    &lambda_rat,
                    &RationalEvaluation::new(),
                    &Pinning::new(),
                )?;
                report["poly"] = json!(p
                    .coeffs()
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>());
            }
            io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
            Ok(0)
        }

        Command::Approx {
            graph,
            beta,
            lambda,
            epsilon,
            k,
            k_max,
            unsafe_params,
            output,
        } => {
            let loaded = io::load_graph(&graph)?;
            let params = resolve_params(&loaded, &beta, &lambda)?;
            let uniform_beta = params.beta.first().copied().unwrap_or(2.0);
            if params.beta.iter().any(|&b| b != uniform_beta) {
                return Err(Error::Argument(
                    "the approximation algorithm takes a uniform beta".into(),
                ));
            }
            let uniform_lambda = params.lambda.first().copied().unwrap_or_default();
            if params.lambda.iter().any(|&l| l != uniform_lambda) {
                return Err(Error::Argument(
                    "the approximation algorithm takes a uniform lambda".into(),
                ));
            }
            let started = std::time::Instant::now();
            let result = approx_z_with(
                &loaded.graph,
                uniform_beta,
                uniform_lambda,
                epsilon,
                &ApproxOptions {
                    k_override: k,
                    k_max,
                    keep_ratios: true,
                    allow_outside_region: unsafe_params,
                    ..ApproxOptions::default()
                },
            )?;
            eprintln!("wall time: {:?}", started.elapsed());
            let report = serde_json::to_value(&result)
                .map_err(|e| Error::Parse(format!("serialize: {e}")))?;
            io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
            Ok(0)
        }

        Command::Ldc { n_max, output } => {
            let outcomes = ising_ldc_suite(n_max)?;
            let all_pass = outcomes.iter().all(|o| o.all_pass());
            let report = serde_json::to_value(&outcomes)
                .map_err(|e| Error::Parse(format!("serialize: {e}")))?;
            io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
            Ok(if all_pass { 0 } else { 1 })
        }

        Command::Ssm {
            family,
            size,
            model,
            beta,
            p,
            lambda,
            c,
            d_max,
            unsafe_params,
            output,
        } => {
            let family = match family {
                FamilyArg::Path => GraphFamily::Path { n: size },
                FamilyArg::Cycle => GraphFamily::Cycle { n: size },
                FamilyArg::Ladder => GraphFamily::Ladder { rungs: size },
                FamilyArg::BinaryTree => GraphFamily::BinaryTree { depth: size },
            };
            let lam = parse_complex(&lambda)?;
            let model = match model {
                ModelArg::IsingEdge => {
                    let beta =
                        beta.ok_or_else(|| Error::Argument("ising-edge needs --beta".into()))?;
                    if !unsafe_params && (beta < 1.0 || lam.norm() >= 1.0) {
                        return Err(Error::Domain(format!(
                            "beta {beta}, |lambda| {} outside the certified region; \
                             pass --unsafe to scan anyway",
                            lam.norm()
                        )));
                    }
                    SsmModel::IsingEdge { beta, lambda: lam }
                }
                ModelArg::IsingVertex => {
                    let beta =
                        beta.ok_or_else(|| Error::Argument("ising-vertex needs --beta".into()))?;
                    if !unsafe_params && (beta < 1.0 || lam.norm() >= 1.0 / beta || !(0.0..1.0).contains(&c)) {
                        return Err(Error::Domain(format!(
                            "vertex scans are certified for |lambda| < 1/beta and c in [0,1); \
                             got beta {beta}, |lambda| {}, c {c}; pass --unsafe to scan anyway",
                            lam.norm()
                        )));
                    }
                    SsmModel::IsingVertex { beta, lambda: lam, c }
                }
                ModelArg::RcEdge => {
                    let p = p.ok_or_else(|| Error::Argument("rc-edge needs --p".into()))?;
                    if lam.im != 0.0 {
                        return Err(Error::Argument("rc-edge takes a real lambda".into()));
                    }
                    SsmModel::RcEdge { p, lambda: lam.re }
                }
            };
            let table = ssm_scan(family, model, &DEFAULT_CATALOG, d_max)?;
            let fit = fit_decay(&table).ok();
            let mut text = io::decay_table_csv(&table);
            if let Some(fit) = &fit {
                let fit_json = serde_json::to_string(fit)
                    .map_err(|e| Error::Parse(format!("serialize: {e}")))?;
                text.push_str(&format!("# fit: {fit_json}\n"));
            }
            io::write_output(output.out.as_deref(), &text)?;
            Ok(0)
        }

        Command::Rc {
            graph,
            beta,
            p,
            lambda,
            seed,
            step_cap,
            sweep_ladder,
            seeds,
            output,
        } => {
            if let Some(range) = sweep_ladder {
                let (lo, hi) = (range[0], range[1]);
                let p = p.ok_or_else(|| Error::Argument("sweep needs --p".into()))?;
                let lam: f64 = lambda
                    .as_deref()
                    .unwrap_or("1.0")
                    .parse()
                    .map_err(|_| Error::Parse("bad lambda".into()))?;
                let mut csv = String::from("rungs,edges,seed,steps,coalesced\n");
                for rungs in lo..=hi {
                    let g = GraphFamily::Ladder { rungs }.build()?;
                    let rp = RCParams::uniform(&g, p, lam);
                    for s in 0..seeds {
                        let trace = coupling_time(&g, &rp, seed + s, step_cap)?;
                        csv.push_str(&format!(
                            "{rungs},{},{},{},{}\n",
                            g.edge_count(),
                            seed + s,
                            trace.steps,
                            trace.coalesced
                        ));
                    }
                }
                io::write_output(output.out.as_deref(), &csv)?;
                return Ok(0);
            }
            let path = graph.ok_or_else(|| Error::Argument("rc needs --graph or --sweep-ladder".into()))?;
            let loaded = io::load_graph(&path)?;
            let rp = match (p, &beta) {
                (Some(p), None) => {
                    let lam: f64 = lambda
                        .as_deref()
                        .unwrap_or("1.0")
                        .parse()
                        .map_err(|_| Error::Parse("bad lambda".into()))?;
                    RCParams::uniform(&loaded.graph, p, lam)
                }
                (None, Some(b)) => {
                    let b: f64 = b.parse().map_err(|_| Error::Parse("bad beta".into()))?;
                    let lam: f64 = lambda
                        .as_deref()
                        .unwrap_or("1.0")
                        .parse()
                        .map_err(|_| Error::Parse("bad lambda".into()))?;
                    RCParams::from_ising(
                        &vec![b; loaded.graph.edge_count()],
                        &vec![lam; loaded.graph.vertex_count()],
                    )
                }
                _ => return Err(Error::Argument("give exactly one of --p or --beta".into())),
            };
            let trace = coupling_time(&loaded.graph, &rp, seed, step_cap)?;
            let report = json!({
                "graph": path.display().to_string(),
                "edges": loaded.graph.edge_count(),
                "p": rp.p.first(),
                "lambda": rp.lambda.first(),
                "seed": trace.seed,
                "steps": trace.steps,
                "coalesced": trace.coalesced,
            });
            io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
            Ok(0)
        }

        Command::Ext {
            model,
            graph,
            q,
            rho,
            lambda,
            suite,
            n_max,
            output,
        } => {
            if suite {
                return ext_suite(model, n_max, &output);
            }
            let path =
                graph.ok_or_else(|| Error::Argument("single queries need --graph".into()))?;
            match model {
                ExtModelArg::Hyper => {
                    let h = io::load_hypergraph(&path)?;
                    let poly = hyper_z_poly(&h, &Pinning::new())?;
                    let mut report = json!({
                        "independence_poly": poly
                            .coeffs()
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>(),
                    });
                    if let Some(l) = &lambda {
                        let l = parse_rational_flag(l)?;
                        report["Z"] = json!(poly.eval(&l).to_string());
                    }
                    io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
                }
                ExtModelArg::Potts => {
                    let loaded = io::load_graph(&path)?;
                    let q = q.ok_or_else(|| Error::Argument("potts needs --q".into()))?;
                    let poly = potts_z_tutte(&loaded.graph, q)?;
                    let report = json!({
                        "tutte_poly_in_w_minus_1": poly
                            .coeffs()
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>(),
                    });
                    io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
                }
                ExtModelArg::Holant => {
                    let loaded = io::load_graph(&path)?;
                    let rho = parse_rational_flag(rho.as_deref().unwrap_or("1/2"))?;
                    let lam = parse_rational_flag(lambda.as_deref().unwrap_or("1"))?;
                    let tables = even_subgraph_tables(&loaded.graph, &rho);
                    let inst = HolantInstance::new(loaded.graph, tables, lam)?;
                    let poly = holant_z_poly(&inst, &Default::default())?;
                    let report = json!({
                        "even_subgraph_poly": poly
                            .coeffs()
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>(),
                        "Z": poly.eval(&inst.lambda).to_string(),
                    });
                    io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
                }
            }
            Ok(0)
        }
    }
}

/// Exhaustive divisibility suites for the extension models.
fn ext_suite(model: ExtModelArg, n_max: usize, output: &OutputArgs) -> Result<i32> {
    let mut instances = 0usize;
    let mut failures: Vec<String> = Vec::new();
    match model {
        ExtModelArg::Hyper => {
            let vertex_cap = n_max.min(6);
            for h in enumerate::labeled_hypergraphs(vertex_cap, 3, 3) {
                let hg = crate::ext::Hypergraph::new(vertex_cap, h)?;
                for u in 0..vertex_cap {
                    for v in (u + 1)..vertex_cap {
                        let r = hyper_ldc(&hg, &Pinning::new(), u, v)?;
                        instances += 1;
                        if !r.pass {
                            failures.push(format!("{:?} probes {u},{v}", hg.edges()));
                        }
                    }
                }
            }
        }
        ExtModelArg::Potts => {
            for sg in enumerate::all_graphs_up_to(n_max) {
                let g = sg.to_graph();
                for e1 in 0..g.edge_count() {
                    for e2 in (e1 + 1)..g.edge_count() {
                        for q in [2u32, 3] {
                            let r = potts_ldc(&g, q, e1, e2)?;
                            instances += 1;
                            if !r.pass {
                                failures.push(format!("{:?} q={q} {e1},{e2}", g.edges()));
                            }
                        }
                    }
                }
            }
        }
        ExtModelArg::Holant => {
            let rhos = [
                BigRational::from_integer(0.into()),
                BigRational::new(1.into(), 2.into()),
            ];
            for sg in enumerate::all_graphs_up_to(n_max) {
                let g = sg.to_graph();
                for rho in &rhos {
                    let tables = even_subgraph_tables(&g, rho);
                    let inst =
                        HolantInstance::new(g.clone(), tables, BigRational::from_integer(1.into()))?;
                    for e1 in 0..g.edge_count() {
                        for e2 in (e1 + 1)..g.edge_count() {
                            let r = holant_ldc(&inst, &Default::default(), e1, e2)?;
                            instances += 1;
                            if !r.pass {
                                failures.push(format!("{:?} rho={rho} {e1},{e2}", g.edges()));
                            }
                        }
                    }
                }
            }
        }
    }
    let report = json!({
        "model": format!("{model:?}").to_lowercase(),
        "instances": instances,
        "failures": failures,
    });
    io::write_output(output.out.as_deref(), &format!("{report:#}\n"))?;
    Ok(if failures.is_empty() { 0 } else { 1 })
}

/// Maps an error onto the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Argument(_) | Error::Domain(_) | Error::Parse(_) | Error::Io(_) => 2,
        Error::Resource(_)
        | Error::Convergence { .. }
        | Error::Numeric(_)
        | Error::SeriesDivision(_)
        | Error::InsufficientData(_) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flag_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5,-0.25").unwrap(), Complex64::new(0.5, -0.25));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        RunConfig::command().debug_assert();
    }
}
