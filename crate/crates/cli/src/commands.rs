use std::path::Path;
use std::time::Instant;

use lpsi::io::{
    cpwl_solution, emit_plot_data, load_dataset, read_table, CostDoc, FunctionDoc, LoadedDataset, Plottable,
    ProblemDoc, Provenance, PstarDoc, ResultDocument, SolutionDoc, SupportEntry, UnitDoc,
};
use lpsi::multivariate::{
    build_reformulation, default_radius, enumerate_patterns, lp_cost, pstar_bound, reconstruct_network, solve_l0,
    solve_lp_exact, solve_lp_irl1, Irl1Config, PatternMode, ReformulatedProblem, SparseSolution, MAX_SUPPORT_CAP,
};
use lpsi::oracle1d::{alpha_grid_oracle, partition_lp_l0_oracle, random_restart_oracle, OracleConfig};
use lpsi::trainer::{train, Form, TrainConfig, TrainData};
use lpsi::univariate::{compute_pstar, min_l0, solve, verify, Check, PstarConfig, VertexChoice};
use lpsi::{from_network, Cpwl, Dataset1D, DatasetND, Error, Rational, Result, Scalar};
use serde_json::{json, Value};

use crate::{Cli, Command, Failure, NdMethod, OracleKind, PatternsArg, EXIT_VALIDATION};

pub(crate) fn run(cli: &Cli) -> std::result::Result<String, Failure> {
    let start = Instant::now();
    let mut doc = match &cli.command {
        Command::Solve1d { data, p, float, .. } => solve1d(data, *p, *float)?,
        Command::Pstar { data, pstar_grid } => pstar(data, *pstar_grid)?,
        Command::L0 { data } => l0(data)?,
        Command::SolveNd { data, p, radius, patterns, support_cap, no_bias_penalty, method, restarts, seed } => {
            solve_nd(data, *p, *radius, *patterns, *support_cap, !no_bias_penalty, *method, *restarts, *seed)?
        }
        Command::Oracle { data, p, kind, seed, grid, restarts } => oracle(data, *p, *kind, *seed, *grid, *restarts)?,
        Command::Train { data, config, seed, trajectory } => {
            train_cmd(data, config.as_deref(), *seed, trajectory.as_deref())?
        }
        Command::Verify { data, result } => return verify_cmd(data, result),
        Command::Plot { result, range, samples } => return Ok(plot(result, (range[0], range[1]), *samples)?),
    };
    if cli.timing {
        doc.provenance.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(doc.to_json()?)
}

fn load_1d(path: &Path) -> Result<Dataset1D<Rational>> {
    match load_dataset(path, None)? {
        LoadedDataset::OneD(d) => Ok(d),
        LoadedDataset::Nd(d) => {
            Err(Error::InvalidDataset(format!("this command needs univariate data, got {} input columns", d.dim())))
        }
    }
}

fn problem_1d<T: Scalar>(d: &Dataset1D<T>, p: Vec<f64>) -> ProblemDoc {
    ProblemDoc { dimension: 1, n: d.len(), p, radius: None, penalize_bias: None, patterns: None }
}

fn choices_json(choices: &[VertexChoice]) -> Value {
    Value::Array(choices.iter().map(|c| json!({"run": c.run, "alpha": c.bits()})).collect())
}

fn solve1d(path: &Path, p: f64, float: bool) -> Result<ResultDocument> {
    let d = load_1d(path)?;
    let (solution, details) = if float {
        let df: Dataset1D<f64> = d.convert();
        let s = solve(&df, p)?;
        (
            cpwl_solution(&s.f, &[p])?,
            json!({"unique": s.unique, "choices": choices_json(&s.choices), "ties": choices_json(&s.ties)}),
        )
    } else {
        let s = solve(&d, p)?;
        (
            cpwl_solution(&s.f, &[p])?,
            json!({"unique": s.unique, "choices": choices_json(&s.choices), "ties": choices_json(&s.ties)}),
        )
    };
    let arith = if float { "float" } else { "exact" };
    let mut doc =
        ResultDocument::new("solve1d", problem_1d(&d, vec![p]), Provenance::new("univariate", arith).with_order(&d));
    doc.solution = Some(solution);
    doc.details = Some(details);
    Ok(doc)
}

fn pstar(path: &Path, grid: usize) -> Result<ResultDocument> {
    if grid == 0 {
        return Err(Error::Domain("--pstar-grid must be positive".into()));
    }
    let d = load_1d(path)?;
    let cfg = PstarConfig { grid, ..PstarConfig::default() };
    let rep = compute_pstar(&d, &cfg)?;
    let runs: Vec<Value> = rep
        .runs
        .iter()
        .map(|r| {
            json!({
                "start": r.run.start,
                "m": r.run.m,
                "sign": r.run.sign,
                "sparsest": r.sparsest.bits(),
                "sparsest_knots": r.sparsest_knots,
                "pstar": r.pstar,
                "crossed_by": r.crossed_by.as_ref().map(|c| c.bits()),
                "permanent_ties": r.permanent_ties.iter().map(|c| c.bits()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut doc =
        ResultDocument::new("pstar", problem_1d(&d, vec![]), Provenance::new("univariate", "exact").with_order(&d));
    doc.pstar = Some(PstarDoc {
        value: rep.value,
        method: "grid_bisection".into(),
        estimate: false,
        diagnostics: json!({"grid": cfg.grid, "tol": cfg.tol, "runs": runs}),
    });
    Ok(doc)
}

fn l0(path: &Path) -> Result<ResultDocument> {
    let d = load_1d(path)?;
    let r = min_l0(&d)?;
    let mut doc =
        ResultDocument::new("l0", problem_1d(&d, vec![]), Provenance::new("univariate", "exact").with_order(&d));
    doc.solution = Some(cpwl_solution(&r.witness, &[])?);
    doc.details = Some(json!({"count": r.count, "choices": choices_json(&r.choices)}));
    Ok(doc)
}

fn nd_data(path: &Path) -> Result<DatasetND> {
    read_table(path, None)?.to_nd()
}

fn support_entries(problem: &ReformulatedProblem, sol: &SparseSolution) -> Vec<SupportEntry> {
    let mut out = Vec::new();
    for k in 0..problem.num_vars() {
        if sol.z[k] == 0.0 {
            continue;
        }
        let c = problem.block_map(k);
        out.push(SupportEntry {
            index: k,
            pattern: c.pattern,
            bits: problem.patterns[c.pattern].bits(),
            side: c.side,
            coord: c.coord,
            value: sol.z[k],
            exact: sol.z_exact.as_ref().and_then(|z| z[k].exact_string()),
        });
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn solve_nd(
    path: &Path,
    p: f64,
    radius: Option<f64>,
    patterns: Option<PatternsArg>,
    cap: Option<usize>,
    penalize_bias: bool,
    method: NdMethod,
    restarts: usize,
    seed: Option<u64>,
) -> Result<ResultDocument> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} is outside (0, 1)")));
    }
    let ds = nd_data(path)?;
    let mode = match patterns {
        Some(PatternsArg::All) => PatternMode::All,
        Some(PatternsArg::Realizable) => PatternMode::Realizable,
        None => PatternMode::default_for(ds.len()),
    };
    let radius = radius.unwrap_or_else(|| default_radius(&ds));
    let pats = enumerate_patterns(&ds, mode)?;
    let num_patterns = pats.len();
    let problem = build_reformulation(&ds, pats, radius, penalize_bias)?;
    let sparsest = solve_l0(&problem, cap.unwrap_or(MAX_SUPPORT_CAP).min(MAX_SUPPORT_CAP))?.found()?;
    let m0 = sparsest.l0;
    let mut details = json!({
        "num_patterns": num_patterns,
        "num_vars": problem.num_vars(),
        "l0_minimum": m0,
    });
    let (sol, pstar, solver) = match method {
        NdMethod::Exact => {
            let cap = cap.unwrap_or((m0 + 1).min(MAX_SUPPORT_CAP));
            let ex = solve_lp_exact(&problem, p, cap)?;
            details["support_cap"] = json!(cap);
            details["vertices"] = json!(ex.vertices);
            let pstar = match ex.r_hat {
                Some(r) => {
                    let b = pstar_bound(m0, radius, Some(r))?;
                    Some(PstarDoc {
                        value: b.value,
                        method: "extreme_point_bound".into(),
                        estimate: b.estimate,
                        diagnostics: json!({"m0": b.m0, "radius": b.radius, "r_hat": b.r_hat}),
                    })
                }
                None => None,
            };
            (ex.solution, pstar, "support_enum")
        }
        NdMethod::Irl1 => {
            let cfg = Irl1Config { restarts, seed: seed.unwrap_or_default(), ..Irl1Config::default() };
            (solve_lp_irl1(&problem, p, &cfg)?, None, "irl1")
        }
    };
    let net = reconstruct_network(&sol, &problem)?;
    let mut costs: Vec<CostDoc> = sol.lp_costs.iter().map(|&(p, value)| CostDoc { p, value }).collect();
    costs.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("finite p"));
    costs.dedup_by(|a, b| a.p == b.p);
    let problem_doc = ProblemDoc {
        dimension: ds.dim(),
        n: ds.len(),
        p: vec![p],
        radius: Some(radius),
        penalize_bias: Some(penalize_bias),
        patterns: Some(match mode {
            PatternMode::All => "all".into(),
            PatternMode::Realizable => "realizable".into(),
        }),
    };
    let arith = if sol.z_exact.is_some() { "exact" } else { "float" };
    let mut prov = Provenance::new(solver, arith);
    if method == NdMethod::Irl1 {
        prov.seed = seed;
    }
    let mut doc = ResultDocument::new("solve-nd", problem_doc, prov);
    doc.solution = Some(SolutionDoc {
        function: FunctionDoc::Lifted {
            dim: ds.dim(),
            method: sol.method,
            caveat: sol.caveat,
            support: support_entries(&problem, &sol),
            neurons: net.neurons,
        },
        costs,
        l0: sol.l0,
        l1: lp_cost(&problem, &sol.z, 1.0),
        lipschitz: None,
    });
    doc.pstar = pstar;
    doc.details = Some(details);
    Ok(doc)
}

fn oracle(
    path: &Path,
    p: Option<f64>,
    kind: OracleKind,
    seed: Option<u64>,
    grid: usize,
    restarts: usize,
) -> Result<ResultDocument> {
    let d = load_1d(path)?;
    let df: Dataset1D<f64> = d.convert();
    let cfg =
        OracleConfig { grid_resolution: grid, restarts, seed: seed.unwrap_or_default(), ..OracleConfig::default() };
    let p = p.unwrap_or_default();
    let ps = if kind == OracleKind::Partition { vec![] } else { vec![p] };
    let (solver, solution, details) = match kind {
        OracleKind::Grid => {
            let r = alpha_grid_oracle(&df, p, &cfg)?;
            let details = json!({"cost": r.cost, "grid": grid, "alphas": r.alphas});
            ("alpha_grid", Some(cpwl_solution(&r.f, &[p])?), details)
        }
        OracleKind::Restart => {
            let r = random_restart_oracle(&df, p, &cfg)?;
            let f: Cpwl<f64> = from_network(&r.net);
            let details = json!({"cost": r.cost, "restarts": restarts, "evaluations": r.evaluations});
            ("random_restart", Some(cpwl_solution(&f, &[p])?), details)
        }
        OracleKind::Partition => {
            let r = partition_lp_l0_oracle(&d, &cfg)?;
            let gaps: Vec<String> = r.gaps.iter().map(|g| format!("{g:?}").to_lowercase()).collect();
            ("partition_l0", None, json!({"count": r.count, "gaps": gaps, "kinks": r.kinks}))
        }
    };
    let mut prov =
        Provenance::new(solver, if kind == OracleKind::Partition { "exact" } else { "float" }).with_order(&d);
    if kind == OracleKind::Restart {
        prov.seed = seed;
    }
    let mut doc = ResultDocument::new("oracle", problem_1d(&d, ps), prov);
    doc.solution = solution;
    doc.details = Some(details);
    Ok(doc)
}

fn train_cmd(path: &Path, config: Option<&Path>, seed: u64, trajectory: Option<&Path>) -> Result<ResultDocument> {
    let mut cfg: TrainConfig = match config {
        Some(c) => serde_json::from_str(&std::fs::read_to_string(c)?)?,
        None => TrainConfig::default(),
    };
    cfg.seed = seed;
    let table = read_table(path, None)?;
    let one_d = table.dim == 1;
    let (data, problem) = if one_d {
        let d: Dataset1D<f64> = table.to_1d()?;
        (TrainData::univariate(&d), problem_1d(&d, vec![cfg.p]))
    } else {
        let d = table.to_nd()?;
        let problem = ProblemDoc {
            dimension: d.dim(),
            n: d.len(),
            p: vec![cfg.p],
            radius: None,
            penalize_bias: None,
            patterns: None,
        };
        (TrainData::multivariate(&d), problem)
    };
    let r = train(&data, &cfg)?;
    if let Some(out) = trajectory {
        let mut w = csv::Writer::from_path(out).map_err(|e| Error::Format(e.to_string()))?;
        for row in &r.trajectory {
            w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
    }
    let solution = if one_d {
        let f: Cpwl<f64> = from_network(&r.params.to_network_1d()?);
        cpwl_solution(&f, &[cfg.p])?
    } else {
        let units: Vec<UnitDoc> = (0..r.params.width)
            .filter(|&k| r.params.v(k) != 0.0)
            .map(|k| {
                let mut w = r.params.w(k).to_vec();
                w.push(r.params.b(k));
                UnitDoc { w, v: r.params.v(k) }
            })
            .collect();
        let function = FunctionDoc::Network { dim: r.params.dim, units };
        let (_, net) = function.to_net().expect("network");
        SolutionDoc {
            function,
            costs: vec![CostDoc { p: cfg.p, value: net.path_cost(cfg.p, true) }],
            l0: net.path_cost(0.0, true) as usize,
            l1: net.path_cost(1.0, true),
            lipschitz: None,
        }
    };
    let last = r.trajectory.last().expect("trajectory has the initial row");
    let mut prov = Provenance::new("trainer", "float");
    prov.seed = Some(seed);
    let mut doc = ResultDocument::new("train", problem, prov);
    doc.solution = Some(solution);
    doc.details = Some(json!({
        "form": if data.form == Form::Univariate { "univariate" } else { "multivariate" },
        "config": cfg,
        "steps": last.step,
        "final_objective": last.objective,
        "max_residual": r.max_residual,
        "path_norm": r.path_norm,
        "active_neurons": r.active_neurons,
    }));
    Ok(doc)
}

// ---------------------------------------------------------------------------
// verify

fn check(checks: &mut Vec<Check>, name: &str, passed: bool, detail: String) {
    checks.push(Check { name: name.to_string(), passed, detail });
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn check_costs(
    checks: &mut Vec<Check>,
    sol: &SolutionDoc,
    cost: impl Fn(f64) -> Result<f64>,
    l0: usize,
    l1: f64,
) -> Result<()> {
    for c in &sol.costs {
        let v = cost(c.p)?;
        check(checks, &format!("cost_p{}", c.p), close(v, c.value), format!("recomputed {v}, reported {}", c.value));
    }
    check(checks, "l0", sol.l0 == l0, format!("recomputed {l0}, reported {}", sol.l0));
    check(checks, "l1", close(l1, sol.l1), format!("recomputed {l1}, reported {}", sol.l1));
    Ok(())
}

fn verify_cpwl<T: Scalar>(
    doc: &ResultDocument,
    sol: &SolutionDoc,
    d: &Dataset1D<T>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let f: Cpwl<T> = sol.function.to_cpwl()?;
    check_costs(checks, sol, |p| f.vp_cost(p), f.num_knots(), f.vp_cost(1.0)?)?;
    if let Some(l) = sol.lipschitz {
        let v = f.lipschitz();
        check(checks, "reported_lipschitz", close(v, l), format!("recomputed {v}, reported {l}"));
    }
    match doc.command.as_str() {
        "solve1d" | "l0" => {
            let (p, optimum) = match doc.problem.p.first() {
                Some(&p) => (p, Some(solve(d, p)?.report.lp_cost)),
                None => (0.5, None),
            };
            checks.extend(verify(d, &f, p, optimum).checks);
            if doc.command == "l0" {
                let m = min_l0(d)?.count;
                check(checks, "minimal_knots", f.num_knots() == m, format!("{} knots, minimum {m}", f.num_knots()));
            }
        }
        _ => {
            let scale = d.ys().iter().map(|y| y.to_f64().abs()).fold(1.0, f64::max);
            let worst = (0..d.len()).map(|i| (f.eval(d.x(i)).to_f64() - d.y(i).to_f64()).abs()).fold(0.0, f64::max);
            check(checks, "interpolation", worst <= 1e-6 * scale, format!("max residual {worst:e}"));
        }
    }
    Ok(())
}

fn verify_net(doc: &ResultDocument, sol: &SolutionDoc, ds: &DatasetND, checks: &mut Vec<Check>) -> Result<()> {
    let (dim, net) = sol.function.to_net().expect("network form");
    if dim != ds.dim() {
        return Err(Error::InvalidDataset(format!("result has {dim} inputs, data has {}", ds.dim())));
    }
    let penalize_bias = doc.problem.penalize_bias.unwrap_or(true);
    let l0 = net.path_cost(0.0, penalize_bias) as usize;
    check_costs(checks, sol, |p| Ok(net.path_cost(p, penalize_bias)), l0, net.path_cost(1.0, penalize_bias))?;
    let worst = (0..ds.len()).map(|i| (net.eval(&ds.x()[i]) - ds.y()[i]).abs()).fold(0.0, f64::max);
    let scale = ds.y().iter().map(|y| y.abs()).fold(1.0, f64::max);
    let tol = if doc.command == "train" { 1e-6 * scale } else { 1e-8 };
    check(checks, "interpolation", worst <= tol, format!("max residual {worst:e}"));
    if let lpsi::io::FunctionDoc::Lifted { support, neurons, .. } = &sol.function {
        let mut ok = true;
        let mut detail = String::from("support matches neurons and activation patterns");
        for e in support {
            let n = neurons.iter().find(|n| n.pattern == e.pattern && n.side == e.side);
            if n.is_none_or(|n| n.w[e.coord] != e.value) {
                ok = false;
                detail = format!("support entry {} disagrees with its neuron", e.index);
            }
        }
        for n in neurons {
            let Some(bits) = support.iter().find(|e| e.pattern == n.pattern).map(|e| e.bits.as_bytes()) else {
                ok = false;
                detail = format!("neuron of pattern {} has no support entry", n.pattern);
                continue;
            };
            for (i, x) in ds.x().iter().enumerate() {
                let pre: f64 = x.iter().zip(&n.w).map(|(a, b)| a * b).sum::<f64>() + n.w[dim];
                let active = bits.get(i) == Some(&b'1');
                if (active && pre < -1e-9) || (!active && pre > 1e-9) {
                    ok = false;
                    detail = format!("neuron of pattern {} violates its pattern at point {}", n.pattern, i + 1);
                }
            }
            if n.w.iter().any(|w| w.abs() > doc.problem.radius.unwrap_or(f64::INFINITY) + 1e-10) {
                ok = false;
                detail = format!("neuron of pattern {} exceeds the box radius", n.pattern);
            }
        }
        check(checks, "patterns", ok, detail);
    }
    Ok(())
}

fn verify_cmd(data: &Path, result: &Path) -> std::result::Result<String, Failure> {
    let doc = ResultDocument::read(result)?;
    let sol = doc.solution.as_ref().ok_or_else(|| Error::Format("result holds no solution to verify".into()))?;
    let table = read_table(data, None)?;
    let mut checks = Vec::new();
    let problem = match &sol.function {
        FunctionDoc::Cpwl { .. } => {
            let d: Dataset1D<Rational> = table.to_1d()?;
            if sol.function.is_exact() {
                verify_cpwl(&doc, sol, &d, &mut checks)?;
            } else {
                verify_cpwl(&doc, sol, &d.convert::<f64>(), &mut checks)?;
            }
            problem_1d(&d, doc.problem.p.clone())
        }
        _ => {
            let ds = table.to_nd()?;
            verify_net(&doc, sol, &ds, &mut checks)?;
            ProblemDoc { dimension: ds.dim(), n: ds.len(), ..doc.problem.clone() }
        }
    };
    if problem.n != doc.problem.n {
        check(&mut checks, "dataset_size", false, format!("data has {} points, result {}", problem.n, doc.problem.n));
    }
    let passed = checks.iter().all(|c| c.passed);
    let mut out = ResultDocument::new(
        "verify",
        problem,
        Provenance::new("verify", if sol.function.is_exact() { "exact" } else { "float" }),
    );
    out.details = Some(json!({"result_command": doc.command, "passed": passed, "checks": checks}));
    let text = out.to_json()?;
    if passed {
        Ok(text)
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure {
            code: EXIT_VALIDATION,
            message: format!("verification failed: {}", failed.join(", ")),
            output: Some(text),
        })
    }
}

fn plot(result: &Path, range: (f64, f64), samples: usize) -> Result<String> {
    let doc = ResultDocument::read(result)?;
    let sol = doc.solution.as_ref().ok_or_else(|| Error::Format("result holds no function to plot".into()))?;
    let data = match &sol.function {
        FunctionDoc::Cpwl { .. } => {
            let f: Cpwl<f64> = sol.function.to_cpwl()?;
            emit_plot_data(Plottable::Cpwl(&f), range, samples)?
        }
        other => {
            let (dim, net) = other.to_net().expect("network form");
            emit_plot_data(Plottable::Net { dim, net: &net }, range, samples)?
        }
    };
    Ok(data.to_csv())
}
