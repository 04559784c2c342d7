//! Direct minimization of the distance to zero-discord states over
//! measurement trees: multi-start seeding followed by cyclic coordinate
//! descent on the spherical angles of every tree vector.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::decompose;
use crate::closedform::discord_closed;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{purity, validate_density, ComplexMatrix, Vec3};
use crate::measurement::{
    contract_leading, distance_objective_blocks, projector_ket, History, MeasurementTree,
};

/// Largest qubit count the optimizer accepts.
pub const MAX_QUBITS: usize = 6;

const GRID_POINTS: usize = 12;
const GOLDEN_WIDTH: f64 = 1e-10;
const POLE: f64 = 1e-8;
/// Gains below this are rounding noise and are not accepted.
const MIN_GAIN: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Size of the sphere covering that random restarts draw from.
    pub sphere_grid: usize,
    /// A full descent cycle improving less than this stops a restart.
    pub refine_tol: f64,
    /// Cycle cap per restart.
    pub max_iters: usize,
    pub seed: u64,
    /// Start restart 0 from the closed-form tree.
    pub seed_closed_form: bool,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            sphere_grid: 64,
            refine_tol: 1e-11,
            max_iters: 500,
            seed: 0,
            seed_closed_form: true,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.sphere_grid == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "restarts, sphere_grid and max_iters must be at least 1".into(),
            ));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NumericResult {
    pub value: f64,
    pub tree: MeasurementTree,
    /// Final objective of each restart, by restart index.
    pub restart_log: Vec<f64>,
    /// The two best restarts agree within `10 * refine_tol`.
    pub converged: bool,
}

/// `n` points spread evenly over the sphere (golden-angle spiral).
pub fn fibonacci_sphere(count: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn angles(v: &Vec3) -> (f64, f64) {
    let theta = v[2].clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]).rem_euclid(TAU);
    (theta, phi)
}

fn from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn node_id(h: History) -> usize {
    (1 << h.len()) - 1 + h.index()
}

/// Tree vectors indexed by node, with the conditional operator entering
/// each node cached.
struct Search<'a> {
    n: usize,
    rho: &'a ComplexMatrix,
    vectors: Vec<Vec3>,
    cache: Vec<ComplexMatrix>,
}

impl<'a> Search<'a> {
    fn new(rho: &'a ComplexMatrix, tree: &MeasurementTree) -> Result<Self> {
        let n = tree.n();
        let mut vectors = vec![[0.0; 3]; (1 << (n - 1)) - 1];
        for h in tree.all_histories() {
            vectors[node_id(h)] = tree.vector(h)?;
        }
        let mut s = Search {
            n,
            rho,
            vectors,
            cache: vec![rho.clone(); (1 << (n - 1)) - 1],
        };
        s.fill(History::ROOT, rho.clone());
        Ok(s)
    }

    fn fill(&mut self, h: History, r: ComplexMatrix) {
        if h.len() == self.n - 1 {
            return;
        }
        let v = self.vectors[node_id(h)];
        for outcome in 1..=2u8 {
            let sign = if outcome == 1 { 1.0 } else { -1.0 };
            let child = contract_leading(&r, &projector_ket(&v, sign));
            self.fill(h.child(outcome).expect("valid outcome"), child);
        }
        self.cache[node_id(h)] = r;
    }

    /// Sum of leaf purities below `h` with `v` used at `h` itself.
    fn kept(&self, h: History, r: &ComplexMatrix, v: &Vec3) -> f64 {
        let mut acc = 0.0;
        for outcome in 1..=2u8 {
            let sign = if outcome == 1 { 1.0 } else { -1.0 };
            let child = contract_leading(r, &projector_ket(v, sign));
            let ch = h.child(outcome).expect("valid outcome");
            acc += if ch.len() == self.n - 1 {
                purity(&child)
            } else {
                self.kept(ch, &child, &self.vectors[node_id(ch)])
            };
        }
        acc
    }

    fn objective(&self) -> f64 {
        let root = History::ROOT;
        (purity(self.rho) - self.kept(root, &self.cache[0], &self.vectors[0])).max(0.0)
    }

    fn tree(&self) -> Result<MeasurementTree> {
        let mut t = MeasurementTree::new(self.n)?;
        for h in t.all_histories() {
            t.set(h, self.vectors[node_id(h)])?;
        }
        Ok(t)
    }

    /// Line searches over θ then φ at node `h`. Returns whether the vector
    /// changed.
    fn improve_node(&mut self, h: History) -> bool {
        let id = node_id(h);
        let r = &self.cache[id];
        let current = self.vectors[id];
        let base = self.kept(h, r, &current);
        let (theta, phi) = angles(&current);

        let f_theta = |t: f64| self.kept(h, r, &from_angles(t, phi));
        let (t_best, mut best) = line_search(&f_theta, theta, base, 0.0, PI, false);
        let mut v = current;
        let mut changed = false;
        if best > base + MIN_GAIN {
            v = from_angles(t_best, phi);
            changed = true;
        } else {
            best = base;
        }
        let theta = if changed { t_best } else { theta };
        if theta.sin().abs() >= POLE {
            let f_phi = |p: f64| self.kept(h, r, &from_angles(theta, p));
            let (p_best, val) = line_search(&f_phi, phi, best, 0.0, TAU, true);
            if val > best + MIN_GAIN {
                v = from_angles(theta, p_best);
                changed = true;
            }
        }
        if changed {
            self.vectors[id] = v;
            let r = self.cache[id].clone();
            self.fill(h, r);
        }
        changed
    }
}

/// Maximizes `f` on `[lo, hi]` by a coarse grid and a golden-section
/// search around the best grid point. Returns the best point and value
/// found, which is `(x0, f0)` unless something strictly better turned up.
fn line_search(
    f: &impl Fn(f64) -> f64,
    x0: f64,
    f0: f64,
    lo: f64,
    hi: f64,
    periodic: bool,
) -> (f64, f64) {
    let (mut bx, mut bf) = (x0, f0);
    let step = if periodic {
        (hi - lo) / GRID_POINTS as f64
    } else {
        (hi - lo) / (GRID_POINTS - 1) as f64
    };
    for i in 0..GRID_POINTS {
        let x = lo + step * i as f64;
        let fx = f(x);
        if fx > bf {
            bx = x;
            bf = fx;
        }
    }
    let (mut a, mut b) = (bx - step, bx + step);
    if !periodic {
        a = a.max(lo);
        b = b.min(hi);
    }
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_WIDTH {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > bf {
            bx = x;
            bf = fx;
        }
    }
    let bx = if periodic { bx.rem_euclid(TAU) } else { bx };
    (bx, bf)
}

fn check_size(n: usize) -> Result<()> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::UnsupportedSize {
            n,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn refine_inner(
    rho: &ComplexMatrix,
    tree: &MeasurementTree,
    cfg: &OptimizerConfig,
) -> Result<(MeasurementTree, f64)> {
    let mut s = Search::new(rho, tree)?;
    let order = tree.all_histories();
    let mut value = s.objective();
    for _ in 0..cfg.max_iters {
        let mut changed = false;
        for &h in &order {
            changed |= s.improve_node(h);
        }
        let next = s.objective();
        let gain = value - next;
        value = next.min(value);
        if !changed || gain < cfg.refine_tol {
            break;
        }
    }
    let t = s.tree()?;
    Ok((t, value))
}

/// Cyclic coordinate descent from `tree`; the objective never increases.
pub fn refine(
    rho: &ComplexMatrix,
    tree: &MeasurementTree,
    cfg: &OptimizerConfig,
) -> Result<MeasurementTree> {
    cfg.validate()?;
    check_size(tree.n())?;
    Ok(refine_inner(rho, tree, cfg)?.0)
}

fn starting_tree(
    n: usize,
    restart: usize,
    cfg: &OptimizerConfig,
    covering: &[Vec3],
) -> Result<MeasurementTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut t = MeasurementTree::new(n)?;
    for h in t.all_histories() {
        t.set(h, covering[rng.random_range(0..covering.len())])?;
    }
    Ok(t)
}

/// Minimum of the distance objective over measurement trees.
pub fn discord_numeric(rho: &ComplexMatrix, cfg: &OptimizerConfig) -> Result<NumericResult> {
    cfg.validate()?;
    let n = validate_density(rho)?;
    check_size(n)?;
    let covering = fibonacci_sphere(cfg.sphere_grid);
    let closed_tree = if cfg.seed_closed_form {
        Some(discord_closed(&decompose(rho, n)?)?.tree)
    } else {
        None
    };
    let runs = cfg
        .execution
        .map_range(cfg.restarts, |r| -> Result<(MeasurementTree, f64)> {
            let start = match (&closed_tree, r) {
                (Some(t), 0) => t.clone(),
                _ => starting_tree(n, r, cfg, &covering)?,
            };
            let (tree, _) = refine_inner(rho, &start, cfg)?;
            let value = distance_objective_blocks(rho, &tree)?;
            Ok((tree, value))
        });
    let runs: Vec<(MeasurementTree, f64)> = runs.into_iter().collect::<Result<_>>()?;
    let restart_log: Vec<f64> = runs.iter().map(|(_, v)| *v).collect();
    let best = (0..runs.len())
        .min_by(|&a, &b| restart_log[a].total_cmp(&restart_log[b]).then(a.cmp(&b)))
        .expect("at least one restart");
    let mut sorted = restart_log.clone();
    sorted.sort_by(f64::total_cmp);
    let converged = sorted.len() >= 2 && sorted[1] - sorted[0] <= 10.0 * cfg.refine_tol;
    let (tree, value) = runs.into_iter().nth(best).expect("index in range");
    Ok(NumericResult {
        value,
        tree,
        restart_log,
        converged,
    })
}
