//! Command-line front end: zeta values, coefficient tables, Euler
//! characteristics and Ihara determinants from graph / diagram files, plus
//! the seeded verification suites.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage or input errors,
//! 3 mathematical errors (pole, indeterminate value, setting violation).

use clap::{Parser, Subcommand};
use dczeta::euler::{self, XArg};
use dczeta::graph::Site;
use dczeta::instances::{self, Rng};
use dczeta::lad::{LocalActionDiagram, RootSite, TruncatedDeltaTree};
use dczeta::weights;
use dczeta::zeta::{self, SArg};
use dczeta::{splitting, Scalar, WeightedGraph};

#[derive(Parser)]
#[command(
    name = "dczeta",
    version,
    about = "zeta functions of tree actions from finite local data"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zeta value Z_{Γ,u→w}(s) by the determinant formula.
    Zeta {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Integer for exact evaluation, or "re[,im]" for floating.
        #[arg(long)]
        s: String,
        /// Also print the truncated series value at this horizon.
        #[arg(long)]
        series: Option<usize>,
    },
    /// Dirichlet coefficient table (tab-separated n, a_n, b_n).
    Coeffs {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_name = "N")]
        n_max: u64,
    },
    /// Euler–Poincaré characteristic χ(Γ,u).
    Chi {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        at: String,
    },
    /// Whether the weighted graph is unimodular.
    Unimodular {
        #[arg(long)]
        graph: String,
    },
    /// Weighted Ihara reciprocal det(I - xT).
    Ihara {
        #[arg(long)]
        graph: String,
        /// Integer, fraction "p/q", or decimal.
        #[arg(long)]
        x: String,
    },
    /// Coset zeta of the (P)-closed universal group of a local action diagram.
    LadZeta {
        #[arg(long)]
        lad: String,
        /// Base vertex c0 of the standard tree.
        #[arg(long)]
        root: String,
        /// Source site: "root" or "color:<id>".
        #[arg(long)]
        from: String,
        /// Target: a vertex or edge of the underlying graph.
        #[arg(long)]
        to: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        series: Option<usize>,
    },
    /// Seeded verification suites.
    Verify {
        /// One of: splitting, theoremE, theoremG, noUD, tree-oracle,
        /// chi-relations, star-consistency.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Parallel workers; output order is by instance index regardless.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

const EXIT_VERIFY_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_MATH: i32 = 3;

fn fail(code: i32, msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(code);
}

fn read_graph(path: &str) -> WeightedGraph {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| fail(EXIT_USAGE, &format!("cannot read {path}: {e}")));
    WeightedGraph::from_json(&text).unwrap_or_else(|e| fail(EXIT_USAGE, &e.to_string()))
}

fn read_lad(path: &str) -> (LocalActionDiagram, dczeta::Inversion) {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| fail(EXIT_USAGE, &format!("cannot read {path}: {e}")));
    LocalActionDiagram::from_json(&text).unwrap_or_else(|e| fail(EXIT_USAGE, &e.to_string()))
}

fn parse_site(g: &WeightedGraph, name: &str) -> Site {
    g.site(name)
        .unwrap_or_else(|e| fail(EXIT_USAGE, &e.to_string()))
}

fn parse_s(text: &str) -> SArg {
    SArg::parse(text)
        .unwrap_or_else(|| fail(EXIT_USAGE, &format!("cannot parse exponent {text:?}")))
}

fn math_err(e: impl std::fmt::Display) -> ! {
    fail(EXIT_MATH, &e.to_string());
}

fn main() {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Zeta {
            graph,
            from,
            to,
            s,
            series,
        } => {
            let g = read_graph(&graph);
            let u = parse_site(&g, &from);
            let w = parse_site(&g, &to);
            let s = parse_s(&s);
            let value = zeta::zeta_det(&g, u, w, &s).unwrap_or_else(|e| math_err(e));
            println!("{}", value.value);
            if value.formal {
                eprintln!("note: convergence setting fails; value is the formal determinant ratio");
            }
            if let Some(horizon) = series {
                let sv = zeta::zeta_series(&g, u, w, &s, horizon).unwrap_or_else(|e| math_err(e));
                println!("series(L={horizon}) = {sv}");
            }
        }
        Cmd::Coeffs {
            graph,
            from,
            to,
            n_max,
        } => {
            let g = read_graph(&graph);
            let u = parse_site(&g, &from);
            let w = parse_site(&g, &to);
            let table =
                weights::dirichlet_coefficients(&g, u, w, n_max).unwrap_or_else(|e| math_err(e));
            print!("{}", table.to_tsv());
        }
        Cmd::Chi { graph, at } => {
            let g = read_graph(&graph);
            let u = parse_site(&g, &at);
            let chi = euler::chi_at(&g, u).unwrap_or_else(|e| math_err(e));
            println!("{chi}");
        }
        Cmd::Unimodular { graph } => {
            let g = read_graph(&graph);
            println!("{}", euler::is_unimodular(&g));
        }
        Cmd::Ihara { graph, x } => {
            let g = read_graph(&graph);
            let x = XArg::parse(&x)
                .unwrap_or_else(|| fail(EXIT_USAGE, &format!("cannot parse x {x:?}")));
            let t = euler::transition_weight(&g).unwrap_or_else(|e| math_err(e));
            println!("{}", euler::ihara_reciprocal(&t, &x));
        }
        Cmd::LadZeta {
            lad,
            root,
            from,
            to,
            s,
            series,
        } => {
            let (d, inv) = read_lad(&lad);
            let g = d.graph().clone();
            let c0 = g
                .vertex(&root)
                .unwrap_or_else(|| fail(EXIT_USAGE, &format!("unknown vertex {root:?}")));
            let r = if from == "root" {
                RootSite::Root
            } else if let Some(color) = from.strip_prefix("color:") {
                let x = d
                    .color(color)
                    .unwrap_or_else(|| fail(EXIT_USAGE, &format!("unknown color {color:?}")));
                RootSite::Color(x)
            } else {
                fail(EXIT_USAGE, "--from must be \"root\" or \"color:<id>\"")
            };
            let u = parse_site(&g, &to);
            let s = parse_s(&s);
            let value = d
                .zeta_pclosed(&inv, c0, r, u, &s)
                .unwrap_or_else(|e| math_err(e));
            println!("{}", value.value);
            if let Some(horizon) = series {
                let sv = d
                    .zeta_pclosed_series(&inv, c0, r, u, &s, horizon)
                    .unwrap_or_else(|e| math_err(e));
                println!("series(L={horizon}) = {sv}");
            }
        }
        Cmd::Verify {
            suite,
            seed,
            instances,
            jobs,
        } => {
            println!("suite {suite} seed {seed} instances {instances}");
            let ok = run_suite(&suite, seed, instances, jobs.max(1));
            if !ok {
                std::process::exit(EXIT_VERIFY_FAIL);
            }
        }
    }
}

/// One verification instance: ordered index plus its report lines.
struct InstanceResult {
    index: usize,
    lines: Vec<String>,
    ok: bool,
}

fn instance_rng(seed: u64, index: usize) -> Rng {
    Rng::new(seed ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15))
}

fn run_instances(count: usize, jobs: usize, run: impl Fn(usize) -> InstanceResult + Sync) -> bool {
    let mut results: Vec<InstanceResult> = Vec::with_capacity(count);
    if jobs <= 1 {
        for i in 0..count {
            results.push(run(i));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let collected = std::sync::Mutex::new(Vec::with_capacity(count));
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= count {
                        break;
                    }
                    let r = run(i);
                    collected.lock().unwrap().push(r);
                });
            }
        });
        results = collected.into_inner().unwrap();
        results.sort_by_key(|r| r.index);
    }
    let mut all_ok = true;
    for r in &results {
        for line in &r.lines {
            println!("{line}");
        }
        all_ok &= r.ok;
    }
    let failed = results.iter().filter(|r| !r.ok).count();
    println!(
        "{}: {} of {} instances passed",
        if failed == 0 { "PASS" } else { "FAIL" },
        results.len() - failed,
        results.len()
    );
    all_ok
}

fn scalar_eq(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        (x, y) => match (x.as_float(), y.as_float()) {
            (Some(p), Some(q)) => (p - q).norm() <= 1e-10 * p.norm().max(q.norm()).max(1.0),
            _ => false,
        },
    }
}

fn run_suite(suite: &str, seed: u64, count: usize, jobs: usize) -> bool {
    match suite {
        "splitting" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let mut lines = Vec::new();
            let mut ok = true;
            {
                let mut record =
                    |label: &str, checks: Result<Vec<splitting::SplitCheck>, splitting::SplitError>| {
                        match checks {
                            Ok(cs) => {
                                for c in cs {
                                    let holds = c.holds();
                                    ok &= holds;
                                    lines.push(format!(
                                        "instance {i}: {} {label} {}",
                                        if holds { "OK" } else { "FAIL" },
                                        c.label
                                    ));
                                }
                            }
                            Err(e) => {
                                ok = false;
                                lines.push(format!("instance {i}: FAIL {label}: {e}"));
                            }
                        }
                    };
                let vs = instances::random_vertex_split(&mut rng);
                let es = instances::random_edge_split(&mut rng);
                let ts = instances::random_terminal_segment(&mut rng);
                let ls = instances::random_loop_instance(&mut rng);
                for s in [-1i64, 2, 3] {
                    let s = SArg::Int(s);
                    record(
                        "vertex",
                        splitting::split_at_vertex(&vs.graph, &vs.part1, &vs.part2, &vs.at, &s),
                    );
                    record(
                        "edge",
                        splitting::split_at_edge(&es.graph, &es.part1, &es.part2, &es.bridge, &s),
                    );
                    record(
                        "terminal",
                        splitting::split_terminal_segment(&ts.graph, &ts.edge, &s),
                    );
                    record("loop", splitting::split_loop(&ls.graph, &ls.edge, &s));
                }
            }
            InstanceResult { index: i, lines, ok }
        }),
        "theoremE" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let g = instances::random_tree_with_loops(&mut rng, 4, 2);
            match euler::verify_chi_zeta_identity(&g) {
                Ok(report) => {
                    let ok = report.all_ok();
                    let mut lines = vec![format!(
                        "instance {i}: {} chi = 1/Z(-1) on {} sites",
                        if ok { "OK" } else { "FAIL" },
                        g.sites().len()
                    )];
                    if !ok {
                        lines.extend(report.render().lines().map(|l| format!("instance {i}: {l}")));
                    }
                    InstanceResult { index: i, lines, ok }
                }
                Err(e) => InstanceResult {
                    index: i,
                    lines: vec![format!("instance {i}: FAIL {e}")],
                    ok: false,
                },
            }
        }),
        "theoremG" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let es = instances::random_edge_split(&mut rng);
            match euler::verify_bridge_identity(&es.graph, &es.part1, &es.part2, &es.bridge) {
                Ok(id) => {
                    let mut ok = id.cleared_lhs == id.cleared_rhs;
                    let mut lines = vec![format!(
                        "instance {i}: {} cleared bridge identity",
                        if ok { "OK" } else { "FAIL" }
                    )];
                    if let Some((lhs, rhs)) = id.value_form {
                        let v_ok = lhs == rhs;
                        lines.push(format!(
                            "instance {i}: {} value form",
                            if v_ok { "OK" } else { "FAIL" }
                        ));
                        ok &= v_ok;
                    }
                    if let Some((lhs, rhs)) = id.chi_form {
                        let chi_ok = lhs == rhs;
                        lines.push(format!(
                            "instance {i}: {} chi form",
                            if chi_ok { "OK" } else { "FAIL" }
                        ));
                        ok &= chi_ok;
                    }
                    InstanceResult { index: i, lines, ok }
                }
                Err(e) => InstanceResult {
                    index: i,
                    lines: vec![format!("instance {i}: FAIL {e}")],
                    ok: false,
                },
            }
        }),
        "noUD" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let (d, inv) = instances::random_mixed_diagram(&mut rng);
            let companion = d.wlit_companion();
            let g = d.graph();
            let c0 = 0;
            let mut pairs = Vec::new();
            let mut sources = vec![RootSite::Root];
            for &x in d.colors_at_vertex(c0) {
                sources.push(RootSite::Color(x));
            }
            for &r in &sources {
                for u in g.sites() {
                    pairs.push((r, u));
                }
            }
            let s = SArg::Int(-1);
            let lhs = d.zeta_pclosed_batch(&inv, c0, &pairs, &s);
            let rhs = companion.zeta_pclosed_batch(&inv, c0, &pairs, &s);
            let (lines, ok) = match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    let bad = l
                        .iter()
                        .zip(&r)
                        .filter(|(a, b)| match (a, b) {
                            (Ok(x), Ok(y)) => !scalar_eq(&x.value, &y.value),
                            (Err(_), Err(_)) => false,
                            _ => true,
                        })
                        .count();
                    (
                        vec![format!(
                            "instance {i}: {} value at -1 matches companion on {} site pairs",
                            if bad == 0 { "OK" } else { "FAIL" },
                            pairs.len()
                        )],
                        bad == 0,
                    )
                }
                (a, b) => (
                    vec![format!(
                        "instance {i}: FAIL {:?} / {:?}",
                        a.err().map(|e| e.to_string()),
                        b.err().map(|e| e.to_string())
                    )],
                    false,
                ),
            };
            InstanceResult { index: i, lines, ok }
        }),
        "tree-oracle" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let (d, inv) = if i % 2 == 0 {
                let g = instances::random_setting_graph(&mut rng, 2, 2, 4);
                instances::full_symmetric_diagram(&g)
            } else {
                instances::random_mixed_diagram(&mut rng)
            };
            let c0 = (i / 2) % d.graph().vertex_count();
            let depth = 3 + i % 3;
            match TruncatedDeltaTree::build(&d, &inv, c0, depth)
                .and_then(|tree| dczeta::lad::oracle_check_tree(&d, &inv, &tree))
            {
                Ok(report) => {
                    let ok = report.all_ok();
                    InstanceResult {
                        index: i,
                        lines: report
                            .checks
                            .iter()
                            .map(|(label, good)| {
                                format!(
                                    "instance {i}: {} {label} (depth {depth})",
                                    if *good { "OK" } else { "FAIL" }
                                )
                            })
                            .collect(),
                        ok,
                    }
                }
                Err(e) => InstanceResult {
                    index: i,
                    lines: vec![format!("instance {i}: FAIL {e}")],
                    ok: false,
                },
            }
        }),
        "chi-relations" => run_instances(count, jobs, |i| {
            let mut rng = instance_rng(seed, i);
            let g = instances::random_tree_with_loops(&mut rng, 3, 2);
            match euler::verify_chi_relations(&g) {
                Ok(report) => {
                    let ok = report.all_ok();
                    let mut lines = vec![format!(
                        "instance {i}: {} {} chi relations",
                        if ok { "OK" } else { "FAIL" },
                        report.lines.len()
                    )];
                    if !ok {
                        lines.extend(report.render().lines().map(|l| format!("instance {i}: {l}")));
                    }
                    InstanceResult { index: i, lines, ok }
                }
                Err(e) => InstanceResult {
                    index: i,
                    lines: vec![format!("instance {i}: FAIL {e}")],
                    ok: false,
                },
            }
        }),
        "star-consistency" => {
            let ok = instances::star_consistency_holds();
            println!(
                "{}",
                if ok {
                    "PASS: exhaustive (*_k) checks agree with the closed conditions"
                } else {
                    "FAIL: star-consistency"
                }
            );
            ok
        }
        other => fail(EXIT_USAGE, &format!("unknown suite {other:?}")),
    }
}
