use std::fmt::Write as _;
use std::fs;

use serde_json::{json, Value};

use super::statefile::{read_state, StateFile};
use super::sweep::{run_sweep, to_csv, Method, SweepOptions};
use super::*;
use crate::bloch::{decompose, reconstruct};
use crate::closedform::discord_closed;
use crate::exec::Execution;
use crate::linalg::{purity, ComplexMatrix, Vec3};
use crate::measurement::{
    distance_objective, distance_objective_blocks, tensor_objective, History, MeasurementTree,
};
use crate::numeric::{discord_numeric, OptimizerConfig};
use crate::states::{make, permute_qubits, random_density, random_tree, StateSpec};

/// Largest state the closed form is evaluated on from the command line.
const CLOSED_MAX_QUBITS: usize = 8;
const CHECK_TOL: f64 = 1e-10;

/// Text for standard output and the exit code to finish with.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            code: EXIT_OK,
        }
    }
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Discord(a) => cmd_discord(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Gen(a) => cmd_gen(&a),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn optimizer(a: &OptimizerArgs) -> OptimizerConfig {
    OptimizerConfig {
        restarts: a.restarts,
        seed: a.seed,
        execution: execution(a.sequential),
        ..OptimizerConfig::default()
    }
}

/// Converts a 1-based permutation of `1..=n` to 0-based.
fn parse_order(order: &[usize], n: usize) -> Result<Vec<usize>, CliError> {
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &q in order {
        if q == 0 || q > n || seen[q - 1] {
            return Err(CliError::parse(format!(
                "--order must be a permutation of 1..={n}, got {order:?}"
            )));
        }
        seen[q - 1] = true;
        out.push(q - 1);
    }
    if out.len() != n {
        return Err(CliError::parse(format!(
            "--order must list all {n} qubits, got {order:?}"
        )));
    }
    Ok(out)
}

fn parse_c(c: &Option<Vec<f64>>) -> Result<Option<Vec3>, CliError> {
    match c.as_deref() {
        None => Ok(None),
        Some(&[x, y, z]) => Ok(Some([x, y, z])),
        Some(v) => Err(CliError::parse(format!(
            "--c needs three components, got {}",
            v.len()
        ))),
    }
}

fn history_label(h: History) -> String {
    h.outcomes().iter().map(|j| char::from(b'0' + j)).collect()
}

fn tree_json(tree: &MeasurementTree) -> Value {
    Value::Array(
        tree.all_histories()
            .into_iter()
            .filter_map(|h| {
                tree.get(h)
                    .map(|v| json!({"history": history_label(h), "vector": v}))
            })
            .collect(),
    )
}

fn qubit_count(rho: &ComplexMatrix) -> usize {
    rho.rows().trailing_zeros() as usize
}

pub fn cmd_discord(a: &DiscordArgs) -> Result<Output, CliError> {
    let mut rho = read_state(&a.state)?;
    let n = qubit_count(&rho);
    let method = Method::from(a.method);
    let order = match &a.order {
        Some(o) => {
            let o = parse_order(o, n)?;
            rho = permute_qubits(&rho, &o)?;
            Some(o.iter().map(|q| q + 1).collect::<Vec<_>>())
        }
        None => None,
    };
    let mut report = json!({"n_qubits": n});
    if let Some(o) = order {
        report["order"] = json!(o);
    }
    let mut closed_value = None;
    if method.closed() {
        if n > CLOSED_MAX_QUBITS {
            return Err(Error::UnsupportedSize {
                n,
                min: 2,
                max: CLOSED_MAX_QUBITS,
            }
            .into());
        }
        let r = discord_closed(&decompose(&rho, n)?)?;
        let etas: Vec<Value> = r
            .gmatrices
            .etas
            .iter()
            .map(|(h, eta)| json!({"history": history_label(*h), "eta": eta}))
            .collect();
        report["closed"] = json!({
            "value": r.value,
            "tree": tree_json(&r.tree),
            "etas": etas,
        });
        closed_value = Some(r.value);
    }
    if method.numeric() {
        let r = discord_numeric(&rho, &optimizer(&a.optimizer))?;
        report["numeric"] = json!({
            "value": r.value,
            "tree": tree_json(&r.tree),
            "restart_log": r.restart_log,
            "converged": r.converged,
        });
        if let Some(c) = closed_value {
            report["gap"] = json!(c - r.value);
        }
    }
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    Ok(Output::ok(s))
}

pub fn sweep_options(a: &SweepArgs) -> Result<SweepOptions, CliError> {
    let order = match &a.order {
        Some(o) => Some(parse_order(o, a.n)?),
        None => None,
    };
    Ok(SweepOptions {
        family: a.family.into(),
        n: a.n,
        from: a.from,
        to: a.to,
        steps: a.steps,
        c: parse_c(&a.c)?,
        method: a.method.into(),
        optimizer: optimizer(&a.optimizer),
        order,
        execution: execution(a.optimizer.sequential),
    })
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Output, CliError> {
    let opts = sweep_options(a)?;
    let rows = run_sweep(&opts)?;
    let csv = to_csv(&rows, opts.method);
    match &a.out {
        Some(path) => {
            fs::write(path, &csv)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(csv)),
    }
}

/// Largest residual of each check over one state.
fn check_state(
    rho: &ComplexMatrix,
    trees: usize,
    seed: u64,
) -> Result<Vec<(&'static str, f64)>, CliError> {
    let n = qubit_count(rho);
    if !(2..=crate::numeric::MAX_QUBITS).contains(&n) {
        return Err(Error::UnsupportedSize {
            n,
            min: 2,
            max: crate::numeric::MAX_QUBITS,
        }
        .into());
    }
    let bd = decompose(rho, n)?;
    let purity_residual = (purity(rho) - bd.purity()).abs();
    let roundtrip = reconstruct(&bd).max_abs_diff(rho);
    let mut overlap: f64 = 0.0;
    let mut tensor: f64 = 0.0;
    for t in 0..trees {
        let tree = random_tree(n, seed.wrapping_mul(1_000_003).wrapping_add(t as u64))?;
        let d = distance_objective(rho, &tree)?;
        overlap = overlap.max((d - distance_objective_blocks(rho, &tree)?).abs());
        tensor = tensor.max((d - (bd.purity() - tensor_objective(&bd, &tree)?)).abs());
    }
    Ok(vec![
        ("purity", purity_residual),
        ("bloch-roundtrip", roundtrip),
        ("distance-vs-overlap", overlap),
        ("distance-vs-tensor", tensor),
    ])
}

pub fn cmd_validate(a: &ValidateArgs) -> Result<Output, CliError> {
    let mut states: Vec<(String, ComplexMatrix, u64)> = Vec::new();
    if let Some(path) = &a.state {
        states.push((path.display().to_string(), read_state(path)?, 0));
    }
    if let Some(r) = &a.random {
        let (n, seed, count) = (r[0] as usize, r[1], r[2]);
        if !(2..=crate::numeric::MAX_QUBITS).contains(&n) {
            return Err(Error::UnsupportedSize {
                n,
                min: 2,
                max: crate::numeric::MAX_QUBITS,
            }
            .into());
        }
        for i in 0..count {
            let s = seed + i;
            states.push((
                format!("random n={n} seed={s}"),
                random_density(n, 1 << n, s)?,
                s,
            ));
        }
    }
    let mut out = String::new();
    let mut failed = false;
    for (label, rho, seed) in &states {
        for (check, residual) in check_state(rho, a.trees, *seed)? {
            let ok = residual <= CHECK_TOL;
            failed |= !ok;
            let verdict = if ok { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} {check} residual={residual:.3e} [{label}]")
                .expect("writing to a String");
        }
    }
    let code = if failed { EXIT_CHECK_FAILED } else { EXIT_OK };
    writeln!(
        out,
        "{} states checked, {}",
        states.len(),
        if failed { "FAILED" } else { "all passed" }
    )
    .expect("writing to a String");
    Ok(Output { stdout: out, code })
}

pub fn cmd_gen(a: &GenArgs) -> Result<Output, CliError> {
    let spec = StateSpec {
        kind: a.kind.into(),
        n: a.n,
        p: a.p,
        c: parse_c(&a.c)?,
        bits: a.bits.clone(),
        seed: a.seed,
        rank: a.rank,
    };
    // every generator failure is a problem with the request itself
    let rho = make(&spec).map_err(|e| CliError::parse(e.to_string()))?;
    let text = StateFile::from_matrix(&rho).to_json();
    match &a.out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(text)),
    }
}
