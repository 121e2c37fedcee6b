use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Serialize;

use qgate_core::algorithms::{
    energy_from_phase, fit_loglog_slope, qpe as run_qpe, qpe_sweep, trotter_scaling_study, Evolution, HamiltonianInput,
    QpeConfig,
};
use qgate_core::compiler::{
    compile_sparse, compile_trotter, cost as cost_of, CostReport, SparseHamiltonian, TermOrdering, TrotterOrder,
};
use qgate_core::io::load_hamiltonian;
use qgate_core::ir::OutcomeRecord;
use qgate_core::statevector::hermitian_eigen;
use qgate_core::{
    execute_with, frobenius_distance, hermitian_exponential_oracle, program_unitary, ExecMode, ExecOptions,
    FramePolicy, QGateProgram, StateVector,
};

use crate::output::{sibling, RunManifest};
use crate::{coded, exit, EvolutionKind, Frame, Method, SimMode};

fn load(path: &Path) -> Result<HamiltonianInput> {
    Ok(load_hamiltonian(path)?)
}

fn load_program(path: &Path) -> Result<QGateProgram> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(QGateProgram::from_json(&text)?)
}

fn as_sparse(h: HamiltonianInput) -> Result<SparseHamiltonian> {
    match h {
        HamiltonianInput::Sparse(s) => Ok(s),
        HamiltonianInput::Pauli(p) => Ok(SparseHamiltonian::from_dense(&p.to_dense()?, 1e-14)?),
    }
}

fn order_of(k: u32) -> Result<TrotterOrder> {
    Ok(TrotterOrder::from_number(k)?)
}

/// Basis index, `ground` (when allowed) or a CSV file with columns index,re,im.
fn read_state(spec: &str, n: usize, h: Option<&HamiltonianInput>) -> Result<StateVector> {
    if let Ok(index) = spec.parse::<usize>() {
        return Ok(StateVector::init_basis(n, index)?);
    }
    if spec == "ground" {
        let h = h.context("`ground` needs a Hamiltonian")?;
        let (_, vecs) = hermitian_eigen(&h.to_dense()?)?;
        return Ok(StateVector::normalized(vecs.column(0).iter().copied().collect())?);
    }
    let mut reader = csv::Reader::from_path(spec).with_context(|| format!("reading state file {spec}"))?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| coded(exit::PARSE, format!("{spec}: {e}")))?;
        let field = |i: usize| -> Result<&str> {
            row.get(i).ok_or_else(|| coded(exit::PARSE, format!("{spec} line {line}: missing column {i}")))
        };
        let bad = |what: &str| coded(exit::PARSE, format!("{spec} line {line}: bad {what}"));
        let index: usize = field(0)?.trim().parse().map_err(|_| bad("index"))?;
        let re: f64 = field(1)?.trim().parse().map_err(|_| bad("real part"))?;
        let im: f64 = field(2)?.trim().parse().map_err(|_| bad("imaginary part"))?;
        let slot = amps.get_mut(index).ok_or_else(|| bad("index"))?;
        *slot = Complex64::new(re, im);
    }
    Ok(StateVector::from_amplitudes(amps)?)
}

fn state_csv(s: &StateVector) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn compile(
    input: &Path,
    method: Method,
    order: u32,
    steps: usize,
    delta: f64,
    ordering_seed: Option<u64>,
    out: &Path,
) -> Result<u8> {
    let h = load(input)?;
    let trotter = order_of(order)?;
    let ordering = ordering_seed.map_or(TermOrdering::AsGiven, TermOrdering::Random);
    let prog = match (method, h) {
        (Method::Pauli, HamiltonianInput::Pauli(p)) => compile_trotter(&p, trotter, steps, ordering, delta)?,
        (Method::Pauli, HamiltonianInput::Sparse(s)) => {
            compile_trotter(&s.to_pauli_terms()?, trotter, steps, ordering, delta)?
        }
        (Method::Direct, h) => compile_sparse(&as_sparse(h)?, delta, trotter, steps, ordering)?,
    };
    for w in &prog.warnings {
        eprintln!("warning: {w}");
    }
    let report = cost_of(&prog)?;
    let mut json = prog.to_json()?;
    json.push('\n');
    RunManifest::new("compile")
        .input(input)
        .seed(ordering_seed)
        .param("method", format!("{method:?}").to_lowercase())
        .param("order", order)
        .param("steps", steps)
        .param("delta", delta)
        .emit(&[(out, json.into_bytes())])?;
    println!("{report}");
    Ok(exit::OK)
}

#[derive(Serialize)]
struct Branch<'a> {
    weight: f64,
    records: &'a [OutcomeRecord],
}

#[derive(Serialize)]
struct SimulationRecords<'a> {
    branches: Vec<Branch<'a>>,
    max_branch_deviation: Option<f64>,
}

pub fn simulate(program: &Path, mode: SimMode, seed: Option<u64>, state: &str, frame: Frame, out: &Path) -> Result<u8> {
    let prog = load_program(program)?;
    let psi = read_state(state, prog.n_logical, None)?;
    let exec_mode = match mode {
        SimMode::Postselect => ExecMode::PostselectZero,
        SimMode::Sample => ExecMode::Sampled(seed.ok_or_else(|| coded(exit::PARSE, "--mode sample requires --seed"))?),
        SimMode::AllBranches => ExecMode::AllBranches,
    };
    let policy = match frame {
        Frame::Immediate => FramePolicy::ApplyImmediately,
        Frame::Track => FramePolicy::TrackToEnd,
    };
    let results = execute_with(&prog, &psi, &ExecOptions::new(exec_mode, policy))?;
    let first = &results[0].final_state;
    let deviation = if mode == SimMode::AllBranches {
        let mut worst: f64 = 0.0;
        for r in &results[1..] {
            worst = worst.max(r.final_state.distance_up_to_phase(first)?);
        }
        println!("branches {}, max inter-branch deviation {worst:.3e}", results.len());
        Some(worst)
    } else {
        None
    };
    let records = SimulationRecords {
        branches: results.iter().map(|r| Branch { weight: r.weight, records: &r.records }).collect(),
        max_branch_deviation: deviation,
    };
    let mut records_json = serde_json::to_string_pretty(&records)?;
    records_json.push('\n');
    let records_path = sibling(out, ".records.json");
    RunManifest::new("simulate")
        .input(program)
        .seed(seed)
        .param("mode", format!("{mode:?}"))
        .param("frame", format!("{frame:?}"))
        .param("state", state)
        .emit(&[(out, state_csv(first)?), (&records_path, records_json.into_bytes())])?;
    Ok(exit::OK)
}

pub fn trotter_scan(input: &Path, orders: &[u32], steps_list: &[usize], delta: f64, out: &Path) -> Result<u8> {
    let h = as_sparse(load(input)?)?;
    let orders: Vec<TrotterOrder> = orders.iter().map(|&k| order_of(k)).collect::<Result<_>>()?;
    let rows = trotter_scaling_study(&h, delta, steps_list, &orders)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tau", "order", "one_minus_f", "frobenius"])?;
    for r in &rows {
        w.write_record([
            r.tau.to_string(),
            r.order.to_string(),
            format!("{:e}", r.one_minus_f()),
            format!("{:e}", r.frobenius),
        ])?;
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    for order in &orders {
        let pts: Vec<_> =
            rows.iter().filter(|r| r.order == order.number()).map(|r| (r.tau as f64, r.frobenius)).collect();
        if let Ok(slope) = fit_loglog_slope(&pts) {
            println!("order {} slope {slope:.3}", order.number());
        }
    }
    RunManifest::new("trotter-scan")
        .input(input)
        .param("orders", orders.iter().map(|o| o.number()).collect::<Vec<_>>())
        .param("steps_list", steps_list)
        .param("delta", delta)
        .emit(&[(out, bytes)])?;
    Ok(exit::OK)
}

pub struct QpeArgs {
    pub b: usize,
    pub shots: usize,
    pub seed: u64,
    pub delta: f64,
    pub scale: f64,
    pub evolution: EvolutionKind,
    pub order: u32,
    pub steps: usize,
}

/// `⟨ψ|H|ψ⟩`, the energy used for the exact phase.
fn expectation(h: &HamiltonianInput, psi: &StateVector) -> Result<f64> {
    let mut hpsi = psi.clone();
    hpsi.apply_dense(&h.to_dense()?)?;
    Ok(psi.inner(&hpsi)?.re)
}

pub fn qpe(input: &Path, a: &QpeArgs, state: &str, sweep: Option<&[f64]>, out: &Path) -> Result<u8> {
    let h = load(input)?;
    let psi = read_state(state, h.n_qubits(), Some(&h))?;
    let evo = match a.evolution {
        EvolutionKind::Native => Evolution::Native,
        EvolutionKind::Compiled => Evolution::Compiled { order: order_of(a.order)?, steps: a.steps },
    };
    let cfg = QpeConfig { scale: a.scale, ..QpeConfig::new(a.b, a.shots, a.seed, a.delta) };
    let mut w = csv::Writer::from_writer(Vec::new());
    let manifest = RunManifest::new("qpe")
        .input(input)
        .seed(Some(a.seed))
        .param("b", a.b)
        .param("shots", a.shots)
        .param("delta", a.delta)
        .param("scale", a.scale)
        .param("evolution", format!("{:?}", a.evolution))
        .param("order", a.order)
        .param("steps", a.steps)
        .param("state", state);
    let manifest = if let Some(deltas) = sweep {
        let energy = expectation(&h, &psi)?;
        w.write_record(["delta", "theta_hat", "theta_exact"])?;
        for r in qpe_sweep(&h, &psi, energy, &cfg, deltas, evo)? {
            w.write_record([r.delta.to_string(), r.theta_hat.to_string(), format!("{:.12}", r.theta_exact)])?;
        }
        manifest.param("sweep", deltas)
    } else {
        let est = run_qpe(&h, &psi, &cfg, evo)?;
        w.write_record(["bitstring", "count"])?;
        for (bits, count) in &est.histogram {
            w.write_record([bits.clone(), count.to_string()])?;
        }
        println!(
            "mode {} theta_hat {} energy {:.5} (exact phase from <psi|H|psi>: energy {:.5})",
            est.mode_bitstring,
            est.theta_hat,
            energy_from_phase(est.theta_hat, cfg.time())?,
            expectation(&h, &psi)?
        );
        manifest
    };
    manifest.emit(&[(out, w.into_inner().context("flushing CSV")?)])?;
    Ok(exit::OK)
}

pub fn cost(program: &Path, out: Option<&Path>) -> Result<u8> {
    let prog = load_program(program)?;
    let report: CostReport = cost_of(&prog)?;
    println!("{report}");
    if let Some(out) = out {
        let body = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            format!("{}\n{}\n", CostReport::CSV_HEADER, report.csv_row())
        } else {
            serde_json::to_string_pretty(&report)? + "\n"
        };
        RunManifest::new("cost").input(program).emit(&[(out, body.into_bytes())])?;
    }
    Ok(exit::OK)
}

pub fn verify(program: &Path, input: &Path, delta: f64, tolerance: f64, out: Option<&Path>) -> Result<u8> {
    let prog = load_program(program)?;
    let h = load(input)?;
    if h.n_qubits() != prog.n_logical {
        return Err(coded(
            exit::PARSE,
            format!("{}-qubit Hamiltonian for a {}-qubit program", h.n_qubits(), prog.n_logical),
        ));
    }
    let exact = hermitian_exponential_oracle(&h.to_dense()?, delta)?;
    let distance = frobenius_distance(&program_unitary(&prog)?, &exact)?;
    let pass = distance <= tolerance;
    println!("frobenius distance {distance:.3e}, tolerance {tolerance:.1e}: {}", if pass { "ok" } else { "exceeded" });
    if let Some(out) = out {
        let report: BTreeMap<&str, serde_json::Value> = BTreeMap::from([
            ("frobenius_distance", distance.into()),
            ("tolerance", tolerance.into()),
            ("pass", pass.into()),
        ]);
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        RunManifest::new("verify")
            .input(program)
            .input(input)
            .param("delta", delta)
            .param("tolerance", tolerance)
            .emit(&[(out, json.into_bytes())])?;
    }
    Ok(if pass { exit::OK } else { exit::TOLERANCE })
}
