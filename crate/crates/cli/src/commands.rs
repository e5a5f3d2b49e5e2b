use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lg_core::encodings::{circuit_to_lme, feynman_steady_state, p1_from_steady, p1_observable, P1Method};
use lg_core::linalg::{is_hermitian, ComplexMatrix};
use lg_core::lindblad::{
    auto_steps, build_ldl, build_liouvillian, evolve, exchange_symmetry_violation, runtime_bound, spectral_diagnostics,
    steady_state, vectorize, verify_ldl_properties, RelaxationScale,
};
use lg_core::measure::{build_table, direct_expectation, estimate_expectation, exact_expectation, EstimateReport};
use lg_core::xl::{build_mq_system, verify_solution, xl_solve_with, XlOptions};
use lg_core::{CircuitSpec, DensityMatrix, LmeSpec, MeasurementPlan, PauliSum};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{BenchArgs, EncodeArgs, MeasureArgs, MeasureOpts, PipelineArgs, SteadyArgs, VerifyArgs};
use crate::bench;
use crate::io::{read_ansatz, read_pauli_sum, require_files, write_atomic};

trait Stage<T> {
    fn stage(self, name: &str) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> Stage<T> for std::result::Result<T, E> {
    fn stage(self, name: &str) -> Result<T> {
        self.map_err(Into::into).with_context(|| format!("stage {name}"))
    }
}

fn pretty(v: &impl Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    json!(rows)
}

fn make_plan(observable: PauliSum, gamma: f64, opts: &MeasureOpts, seed: u64) -> Result<MeasurementPlan> {
    Ok(match opts.shots {
        Some(total) => MeasurementPlan::new(observable, total / 2, total - total / 2, seed)?,
        None => MeasurementPlan::with_budget(observable, gamma, opts.eps, seed)?,
    })
}

fn estimates_csv(est: &EstimateReport, extra: &[(&str, f64)]) -> String {
    let mut s = String::from(EstimateReport::CSV_HEADER);
    for (k, _) in extra {
        s.push(',');
        s.push_str(k);
    }
    s.push('\n');
    s.push_str(&est.csv_row());
    for (_, v) in extra {
        let _ = write!(s, ",{v}");
    }
    s.push('\n');
    s
}

fn unique_steady(l: &lg_core::SuperOp) -> Result<DensityMatrix> {
    let ss = steady_state(l)?;
    if ss.dim() == 0 {
        return Err(lg_core::Error::NoSteadyState.into());
    }
    Ok(ss.unique()?.clone())
}

pub fn pipeline(a: &PipelineArgs, seed: u64, out: &Path) -> Result<()> {
    require_files(&[&a.target, &a.observable]).stage("input")?;
    let target = read_pauli_sum(&a.target).stage("input")?;
    let observable = read_pauli_sum(&a.observable).stage("input")?;
    let ansatz = read_ansatz(&a.ansatz).stage("input")?;
    if observable.n() != 2 * ansatz.n() {
        return Err(anyhow!("observable acts on {} qubits, expected {}", observable.n(), 2 * ansatz.n()))
            .stage("input");
    }

    let sys = build_mq_system(&ansatz, &target, !a.no_ground_energy).stage("build")?;
    let opts = XlOptions { d_max: a.d_max, node_budget: a.node_budget, ..XlOptions::default() };
    let sol = xl_solve_with(&sys, &opts).stage("solve")?;
    let params = &sol.assignment[..ansatz.num_params()];
    let ldl_residual = verify_solution(&ansatz, params, &target).stage("verify")?;

    let spec = ansatz.instantiate(params).stage("liouvillian")?;
    let l = build_liouvillian(&spec).stage("liouvillian")?;
    let spectral = spectral_diagnostics(&l, a.probes, seed).stage("spectral")?;
    match spectral.steady_dim {
        0 => return Err(lg_core::Error::NoSteadyState).stage("spectral"),
        1 => {}
        d => return Err(lg_core::Error::NonUniqueSteadyState(d)).stage("spectral"),
    }
    let hermitian = is_hermitian(l.matrix(), 1e-12);
    let scale = match (hermitian, spectral.gap, spectral.mixing_time_estimate) {
        (true, Some(g), _) => RelaxationScale::Gap(g),
        (false, _, Some(t)) => RelaxationScale::MixingTime(t),
        _ => return Err(anyhow!("no relaxation scale available")).stage("spectral"),
    };
    let t = runtime_bound(scale, spec.n(), a.overlap_eps).stage("evolve")?;
    let steps = auto_steps(&l, t);
    let rho0 = DensityMatrix::maximally_mixed(spec.n());
    let rho_t = evolve(&l, &rho0, t, steps).stage("evolve")?;
    let rho_ss = unique_steady(&l).stage("steady")?;
    let overlap = vectorize(&rho_t).overlap(&vectorize(&rho_ss));

    let gamma = a.measure.gamma.unwrap_or_else(|| rho_t.purity());
    let plan = make_plan(observable.clone(), gamma, &a.measure, seed).stage("measure")?;
    let est = estimate_expectation(&plan, &rho_t, gamma).stage("measure")?;
    let exact_evolved = exact_expectation(&observable, &rho_t).stage("measure")?;
    let exact_steady = exact_expectation(&observable, &rho_ss).stage("measure")?;

    let mut xl = serde_json::to_value(&sol.report)?;
    let wall_time_ms = xl.as_object_mut().and_then(|o| o.remove("wall_time_ms"));
    let report = json!({
        "seed": seed,
        "n": ansatz.n(),
        "xl": xl,
        "assignment": sol.named(&sys),
        "ldl_residual": ldl_residual,
        "spectral": {
            "gap": spectral.gap,
            "hermitian": hermitian,
            "mixing_time_estimate": spectral.mixing_time_estimate,
            "steady_dim": spectral.steady_dim,
        },
        "evolution": { "time": t, "steps": steps, "overlap_with_steady": overlap },
        "measurement": {
            "gamma": gamma,
            "n_h": plan.n_h(),
            "n_s": plan.n_s(),
            "estimate": est,
            "exact_evolved": exact_evolved,
            "exact_steady": exact_steady,
        },
    });
    write_atomic(&out.join("report.json"), &pretty(&report)?)?;
    write_atomic(
        &out.join("estimates.csv"),
        estimates_csv(&est, &[("exact_evolved", exact_evolved), ("exact_steady", exact_steady)]).as_bytes(),
    )?;
    write_atomic(&out.join("timing.json"), &pretty(&json!({ "xl_wall_time_ms": wall_time_ms }))?)?;
    println!(
        "solved {} unknowns from {} equations (residual {:e}); estimate {} (exact {}, steady {})",
        sol.report.n_u, sol.report.n_e, sol.report.residual, est.value, exact_evolved, exact_steady
    );
    Ok(())
}

pub fn xl_bench(a: &BenchArgs, seed: u64, out: &Path) -> Result<()> {
    let rows = bench::run(a.n_min, a.n_max, a.reps, seed, a.d_max, a.parallel);
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("N = {} rep {}: {}", r.n, r.rep, r.error.as_deref().unwrap_or(""));
    }
    let summary = bench::summarize(&rows);
    let slope = bench::loglog_slope(&summary);
    write_atomic(&out.join("xl_bench.csv"), bench::rows_csv(&rows)?.as_bytes())?;
    write_atomic(&out.join("xl_bench_summary.csv"), bench::summary_csv(&summary).as_bytes())?;
    write_atomic(&out.join("xl_bench_fit.json"), &pretty(&json!({ "loglog_slope": slope, "sizes": summary.len() }))?)?;
    for s in &summary {
        println!(
            "N = {:2}: {:10.3} ± {:8.3} ms, max residual {:e}, failures {}",
            s.n, s.mean_ms, s.std_ms, s.max_residual, s.failures
        );
    }
    if let Some(s) = slope {
        println!("log-log slope {s:.3}");
    }
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn run_checks(spec: &LmeSpec, probes: usize, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("{e:#}")));
        checks.push(Check { name, passed, detail });
    };
    let l = build_liouvillian(spec);
    let ldl = build_ldl(spec);
    let steady_dim = l.as_ref().ok().and_then(|l| steady_state(l).ok()).map(|s| s.dim());

    push(
        "ldl_dual_path",
        ldl.as_ref().map(|d| (true, format!("max error {:e}", d.dual_path_error))).map_err(|e| anyhow!("{e}")),
    );
    push(
        "ldl_properties",
        ldl.as_ref().map_err(|e| anyhow!("{e}")).map(|d| {
            let p = verify_ldl_properties(&d.dense, steady_dim);
            (
                p.passed(),
                format!(
                    "min eigenvalue {:e}, ground dim {}, ST commutator {:e}",
                    p.min_eigenvalue, p.ground_dim, p.st_commutator_norm
                ),
            )
        }),
    );
    push(
        "exchange_symmetry",
        ldl.as_ref().map_err(|e| anyhow!("{e}")).and_then(|d| {
            let v = exchange_symmetry_violation(&d.pauli)?;
            Ok((v <= 1e-10, format!("violation {v:e}")))
        }),
    );
    push(
        "spectral",
        l.as_ref().map_err(|e| anyhow!("{e}")).and_then(|l| {
            let r = spectral_diagnostics(l, 0, seed)?;
            let max_re = r.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            Ok((
                r.steady_dim >= 1 && max_re <= 1e-9,
                format!("steady dim {}, gap {:?}, max Re {max_re:e}", r.steady_dim, r.gap),
            ))
        }),
    );
    push(
        "steady_state",
        l.as_ref().map_err(|e| anyhow!("{e}")).and_then(|l| {
            let ss = steady_state(l)?;
            let worst = ss.states.iter().map(|s| l.residual(&vectorize(s))).fold(0.0, f64::max);
            Ok((!ss.states.is_empty() && worst < 1e-8, format!("{} state(s), max residual {worst:e}", ss.states.len())))
        }),
    );
    let table = build_table();
    let unitarity = table.max_unitarity_error();
    push(
        "substitute_table",
        Ok((table.entries().len() == 16 && unitarity < 1e-12, format!("unitarity error {unitarity:e}"))),
    );
    push(
        "expectation_identity",
        l.as_ref().map_err(|e| anyhow!("{e}")).and_then(|l| {
            let rho = match steady_state(l)?.states.first() {
                Some(s) => s.clone(),
                None => DensityMatrix::maximally_mixed(spec.n()),
            };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for _ in 0..probes {
                let a = lg_core::random::hermitian_sum(2 * spec.n(), 4, &mut rng);
                worst = worst.max((exact_expectation(&a, &rho)? - direct_expectation(&a, &rho)?).abs());
            }
            Ok((worst < 1e-11, format!("{probes} observables, max difference {worst:e}")))
        }),
    );
    checks
}

pub fn verify(a: &VerifyArgs, seed: u64, out: &Path) -> Result<()> {
    require_files(&[&a.spec])?;
    let checks = match LmeSpec::read(&a.spec) {
        Ok(spec) => run_checks(&spec, a.probes, seed),
        Err(e) => vec![Check { name: "load", passed: false, detail: e.to_string() }],
    };
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!("{:width$}  {}  {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
    }
    write_atomic(&out.join("verify.json"), &pretty(&checks)?)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        bail!("{failed} check(s) failed");
    }
    Ok(())
}

pub fn steady(a: &SteadyArgs, seed: u64, out: &Path) -> Result<()> {
    require_files(&[&a.spec])?;
    let spec = LmeSpec::read(&a.spec).stage("input")?;
    let l = build_liouvillian(&spec).stage("liouvillian")?;
    let ss = steady_state(&l).stage("steady")?;
    if ss.dim() == 0 {
        return Err(lg_core::Error::NoSteadyState).stage("steady");
    }
    let spectral = spectral_diagnostics(&l, a.probes, seed).stage("spectral")?;
    let states: Vec<Value> = ss
        .states
        .iter()
        .map(|s| json!({ "purity": s.purity(), "trace": s.trace(), "residual": l.residual(&vectorize(s)), "matrix": matrix_json(s.matrix()) }))
        .collect();
    let report =
        json!({ "dim": ss.dim(), "warning": ss.warning, "repair": ss.repair, "states": states, "spectral": spectral });
    write_atomic(&out.join("steady.json"), &pretty(&report)?)?;
    println!("steady-state dimension {}, gap {:?}", ss.dim(), spectral.gap);
    Ok(())
}

pub fn measure(a: &MeasureArgs, seed: u64, out: &Path) -> Result<()> {
    require_files(&[&a.spec, &a.observable]).stage("input")?;
    let spec = LmeSpec::read(&a.spec).stage("input")?;
    let observable = read_pauli_sum(&a.observable).stage("input")?;
    let l = build_liouvillian(&spec).stage("liouvillian")?;
    let rho = unique_steady(&l).stage("steady")?;
    let gamma = a.measure.gamma.unwrap_or_else(|| rho.purity());
    let plan = make_plan(observable.clone(), gamma, &a.measure, seed).stage("measure")?;
    let est = estimate_expectation(&plan, &rho, gamma).stage("measure")?;
    let exact = exact_expectation(&observable, &rho).stage("measure")?;
    write_atomic(&out.join("estimates.csv"), estimates_csv(&est, &[("exact", exact)]).as_bytes())?;
    write_atomic(
        &out.join("measure.json"),
        &pretty(
            &json!({ "seed": seed, "gamma": gamma, "n_h": plan.n_h(), "n_s": plan.n_s(), "estimate": est, "exact": exact }),
        )?,
    )?;
    println!("estimate {} (exact {exact}), {} shots", est.value, est.shots);
    Ok(())
}

pub fn encode_circuit(a: &EncodeArgs, seed: u64, out: &Path) -> Result<()> {
    require_files(&[&a.circuit]).stage("input")?;
    let circuit = CircuitSpec::read(&a.circuit).stage("input")?;
    let lme = circuit_to_lme(&circuit).stage("encode")?;
    let rho = feynman_steady_state(&circuit).stage("steady")?;
    let depth = circuit.depth();
    let exact = p1_from_steady(&rho, depth, P1Method::Exact).stage("measure")?;
    let gamma = a.measure.gamma.unwrap_or(1.0 / (depth + 1) as f64);
    let plan = make_plan(p1_observable(circuit.n(), depth), gamma, &a.measure, seed).stage("measure")?;
    let sampled = p1_from_steady(&rho, depth, P1Method::Sampled(&plan)).stage("measure")?;
    let report = json!({
        "seed": seed,
        "n_system": circuit.n(),
        "depth": depth,
        "clock_qubits": lme.clock_qubits(),
        "jumps": lme.spec().jumps().len(),
        "purity": rho.purity(),
        "expected_purity": 1.0 / (depth + 1) as f64,
        "p1_statevector": circuit.final_p1(),
        "p1_exact": exact,
        "p1_sampled": sampled,
        "n_h": plan.n_h(),
        "n_s": plan.n_s(),
    });
    write_atomic(&out.join("clock_lme.json"), format!("{}\n", lme.to_json()).as_bytes())?;
    write_atomic(&out.join("p1.json"), &pretty(&report)?)?;
    println!("p1: statevector {}, exact {exact}, sampled {sampled}", circuit.final_p1());
    Ok(())
}
