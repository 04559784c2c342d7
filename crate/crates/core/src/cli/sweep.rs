//! Parameter sweeps over the mixture families, written as CSV.

use std::fmt::Write;

use super::CliError;
use crate::bloch::decompose;
use crate::closedform::discord_closed;
use crate::exec::Execution;
use crate::linalg::{ComplexMatrix, Vec3};
use crate::numeric::{discord_numeric, OptimizerConfig};
use crate::states::{make, permute_qubits, StateKind, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Closed,
    Numeric,
    Both,
}

impl Method {
    pub fn closed(self) -> bool {
        matches!(self, Method::Closed | Method::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Method::Numeric | Method::Both)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub family: StateKind,
    pub n: usize,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Direction for the `family` kind; scaled by `p` at each point.
    pub c: Option<Vec3>,
    pub method: Method,
    pub optimizer: OptimizerConfig,
    /// 0-based: qubit `k` of the evaluated state is qubit `order[k]`.
    pub order: Option<Vec<usize>>,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub discord_closed: Option<f64>,
    pub discord_numeric: Option<f64>,
}

impl SweepRow {
    pub fn gap(&self) -> Option<f64> {
        Some(self.discord_closed? - self.discord_numeric?)
    }
}

/// `from + (to - from) i / (steps - 1)` for `i < steps`.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn state_at(opts: &SweepOptions, p: f64) -> Result<ComplexMatrix, CliError> {
    let spec = match opts.family {
        StateKind::Family => {
            let c = opts
                .c
                .ok_or_else(|| CliError::parse("family sweeps need --c".into()))?;
            StateSpec::new(StateKind::Family, opts.n).with_c(c.map(|x| x * p))
        }
        kind if kind.is_mixture() => StateSpec::new(kind, opts.n).with_p(p),
        kind => {
            return Err(CliError::parse(format!(
                "{} is not a sweepable family",
                kind.name()
            )))
        }
    };
    let rho = make(&spec)?;
    match &opts.order {
        Some(order) => Ok(permute_qubits(&rho, order)?),
        None => Ok(rho),
    }
}

pub fn run_sweep(opts: &SweepOptions) -> Result<Vec<SweepRow>, CliError> {
    if opts.steps == 0 {
        return Err(CliError::parse("--steps must be at least 1".into()));
    }
    let ps = grid(opts.from, opts.to, opts.steps);
    let rows = opts.execution.map(ps, |p| -> Result<SweepRow, CliError> {
        let rho = state_at(opts, p)?;
        let discord_closed = if opts.method.closed() {
            Some(discord_closed(&decompose(&rho, opts.n)?)?.value)
        } else {
            None
        };
        let discord_numeric = if opts.method.numeric() {
            let cfg = OptimizerConfig {
                execution: Execution::Sequential,
                ..opts.optimizer.clone()
            };
            Some(discord_numeric(&rho, &cfg)?.value)
        } else {
            None
        };
        Ok(SweepRow {
            p,
            discord_closed,
            discord_numeric,
        })
    });
    rows.into_iter().collect()
}

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

pub fn to_csv(rows: &[SweepRow], method: Method) -> String {
    let mut out = String::new();
    let mut header = vec!["p"];
    if method.closed() {
        header.push("discord_closed");
    }
    if method.numeric() {
        header.push("discord_numeric");
    }
    if method == Method::Both {
        header.push("gap");
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        let mut fields = vec![format!("{}", r.p)];
        fields.extend(r.discord_closed.map(num));
        fields.extend(r.discord_numeric.map(num));
        fields.extend(r.gap().map(num));
        writeln!(out, "{}", fields.join(",")).expect("writing to a String");
    }
    out
}
