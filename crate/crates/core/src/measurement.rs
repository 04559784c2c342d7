//! Conditional measurement trees, dephasing and the distance objective.
//!
//! Qubits `0..n-1` are measured in order; the basis of qubit `m` depends on
//! all earlier outcomes. Qubit `n-1` is never measured. A tree stores one
//! unit vector per outcome history; outcome 1 projects onto `+v`, outcome 2
//! onto `-v`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bloch::BlochDecomposition;
use crate::closedform::{build_conditional_g, build_root_g};
use crate::error::{Error, Result};
use crate::linalg::{c64, hs_dist_sq, norm3, pauli, ComplexMatrix, Vec3, C64};

/// Branches whose probability falls below this are treated as null.
pub const NULL_BRANCH: f64 = 1e-14;

/// A sequence of outcomes `j_1 … j_len`, each 1 or 2. Bit `len-1-k` of
/// `bits` holds outcome `k` (0 for outcome 1), so the natural ordering is
/// lexicographic within a level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    len: u8,
    bits: u32,
}

impl History {
    pub const ROOT: History = History { len: 0, bits: 0 };

    pub fn from_outcomes(outcomes: &[u8]) -> Result<Self> {
        let mut h = History::ROOT;
        for &j in outcomes {
            h = h.child(j)?;
        }
        Ok(h)
    }

    /// The `index`-th history of length `len` in lexicographic order.
    pub fn from_index(len: usize, index: usize) -> Self {
        debug_assert!(index < 1 << len);
        History {
            len: len as u8,
            bits: index as u32,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn child(&self, outcome: u8) -> Result<Self> {
        if !(1..=2).contains(&outcome) {
            return Err(Error::InvalidArgument(format!(
                "outcome {outcome} is not 1 or 2"
            )));
        }
        Ok(History {
            len: self.len + 1,
            bits: (self.bits << 1) | (outcome as u32 - 1),
        })
    }

    /// Outcome `k` (0-based position) as 1 or 2.
    pub fn outcome(&self, k: usize) -> u8 {
        assert!(k < self.len());
        ((self.bits >> (self.len() - 1 - k)) & 1) as u8 + 1
    }

    pub fn outcomes(&self) -> Vec<u8> {
        (0..self.len()).map(|k| self.outcome(k)).collect()
    }

    /// `(-1)^(j_k - 1)`.
    pub fn sign(&self, k: usize) -> f64 {
        if self.outcome(k) == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn prefix(&self, len: usize) -> Self {
        assert!(len <= self.len());
        History {
            len: len as u8,
            bits: self.bits >> (self.len() - len),
        }
    }

    /// All histories of the given length, lexicographic.
    pub fn all(len: usize) -> impl Iterator<Item = History> {
        (0..1usize << len).map(move |i| History::from_index(len, i))
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .outcomes()
            .iter()
            .map(|j| char::from(b'0' + j))
            .collect();
        write!(f, "({s})")
    }
}

/// One unit vector per history for levels `1..=n-1`. Level `m` measures
/// qubit `m-1` and has `2^(m-1)` histories of length `m-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTree {
    n: usize,
    levels: Vec<Vec<Option<Vec3>>>,
}

impl MeasurementTree {
    /// An empty tree for `n ≥ 2` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedSize { n, min: 2, max: 31 });
        }
        Ok(MeasurementTree {
            n,
            levels: (0..n - 1).map(|m| vec![None; 1 << m]).collect(),
        })
    }

    /// Every history measures along `v`.
    pub fn uniform(n: usize, v: Vec3) -> Result<Self> {
        let mut t = Self::new(n)?;
        for h in t.all_histories() {
            t.set(h, v)?;
        }
        Ok(t)
    }

    /// Independent uniformly distributed directions.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::new(n)?;
        for h in t.all_histories() {
            t.set(h, random_unit_vector(rng))?;
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of measured qubits, `n - 1`.
    pub fn depth(&self) -> usize {
        self.n - 1
    }

    /// Histories of every level, level by level.
    pub fn all_histories(&self) -> Vec<History> {
        (0..self.depth()).flat_map(History::all).collect()
    }

    pub fn set(&mut self, h: History, v: Vec3) -> Result<()> {
        if h.len() >= self.depth() {
            return Err(Error::InvalidArgument(format!(
                "history {h:?} is too long for {} qubits",
                self.n
            )));
        }
        let norm = norm3(&v);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitVector(norm));
        }
        self.levels[h.len()][h.index()] = Some(v);
        Ok(())
    }

    pub fn get(&self, h: History) -> Option<&Vec3> {
        self.levels.get(h.len())?.get(h.index())?.as_ref()
    }

    pub fn vector(&self, h: History) -> Result<Vec3> {
        self.get(h)
            .copied()
            .ok_or_else(|| Error::IncompleteTree(format!("no vector for history {h:?}")))
    }

    pub fn is_complete(&self) -> bool {
        self.levels.iter().flatten().all(Option::is_some)
    }

    pub fn vector_count(&self) -> usize {
        self.levels.iter().flatten().filter(|v| v.is_some()).count()
    }

    fn ensure_complete(&self) -> Result<()> {
        if let Some(h) = self
            .all_histories()
            .into_iter()
            .find(|h| self.get(*h).is_none())
        {
            return Err(Error::IncompleteTree(format!(
                "no vector for history {h:?}"
            )));
        }
        Ok(())
    }

    /// `(qubit, ±v)` pairs along a history: qubit `k` measured along the
    /// vector stored at `h.prefix(k)`, signed by outcome `k`.
    pub fn signed_ancestors(&self, h: History) -> Result<Vec<(usize, Vec3)>> {
        (0..h.len())
            .map(|k| {
                let v = self.vector(h.prefix(k))?;
                let s = h.sign(k);
                Ok((k, [s * v[0], s * v[1], s * v[2]]))
            })
            .collect()
    }

    /// Vectors used for qubits `0..h.len()` along `h`.
    pub fn ancestors(&self, h: History) -> Result<Vec<Vec3>> {
        (0..h.len()).map(|k| self.vector(h.prefix(k))).collect()
    }

    /// Returns the tree with each stored vector replaced by `f(history, v)`.
    pub fn map(&self, mut f: impl FnMut(History, Vec3) -> Vec3) -> Result<Self> {
        let mut out = Self::new(self.n)?;
        for h in self.all_histories() {
            if let Some(v) = self.get(h) {
                out.set(h, f(h, *v))?;
            }
        }
        Ok(out)
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = norm3(&v);
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn check_unit(v: &Vec3) -> Result<()> {
    let norm = norm3(v);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector(norm));
    }
    Ok(())
}

/// `(I + (-1)^(outcome-1) v·σ) / 2`.
pub fn projector(v: &Vec3, outcome: u8) -> Result<ComplexMatrix> {
    check_unit(v)?;
    let s = match outcome {
        1 => 0.5,
        2 => -0.5,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "outcome {outcome} is not 1 or 2"
            )))
        }
    };
    let mut p = ComplexMatrix::identity(2).scale_real(0.5);
    for (a, &va) in v.iter().enumerate() {
        p = &p + &pauli(a + 1).scale_real(s * va);
    }
    Ok(p)
}

/// Unit ket spanning the range of `projector(v, outcome)`.
pub(crate) fn projector_ket(v: &Vec3, sign: f64) -> [C64; 2] {
    // projector entries: p00 = (1 + s vz)/2, p11 = (1 - s vz)/2,
    // p10 = s (vx + i vy)/2
    let (vx, vy, vz) = (sign * v[0], sign * v[1], sign * v[2]);
    let p00 = 0.5 * (1.0 + vz);
    let p11 = 0.5 * (1.0 - vz);
    let p10 = c64(0.5 * vx, 0.5 * vy);
    if p00 >= p11 {
        let r = p00.sqrt();
        [c64(r, 0.0), p10 / r]
    } else {
        let r = p11.sqrt();
        [p10.conj() / r, c64(r, 0.0)]
    }
}

/// `(⟨φ| ⊗ I) R (|φ⟩ ⊗ I)` for a ket on the leading qubit of `r`.
pub(crate) fn contract_leading(r: &ComplexMatrix, phi: &[C64; 2]) -> ComplexMatrix {
    let half = r.rows() / 2;
    let mut out = ComplexMatrix::zeros(half, half);
    for a in 0..2 {
        for b in 0..2 {
            let w = phi[a].conj() * phi[b];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..half {
                for j in 0..half {
                    out[(i, j)] += w * r[(a * half + i, b * half + j)];
                }
            }
        }
    }
    out
}

/// Unnormalized conditional states `ω_h` of the last qubit for every
/// complete history, along with the measured product kets.
fn conditional_blocks(
    rho: &ComplexMatrix,
    tree: &MeasurementTree,
) -> Result<Vec<(History, Vec<C64>, ComplexMatrix)>> {
    let n = tree.n();
    if !rho.is_square() || rho.rows() != 1 << n {
        return Err(Error::Dimension(format!(
            "tree is for {n} qubits but the matrix is {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    tree.ensure_complete()?;
    let mut frontier: Vec<(History, Vec<C64>, ComplexMatrix)> =
        vec![(History::ROOT, vec![c64(1.0, 0.0)], rho.clone())];
    for _level in 0..tree.depth() {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (h, ket, r) in frontier {
            let v = tree.vector(h)?;
            for outcome in 1..=2u8 {
                let sign = if outcome == 1 { 1.0 } else { -1.0 };
                let phi = projector_ket(&v, sign);
                let reduced = contract_leading(&r, &phi);
                let mut k = Vec::with_capacity(ket.len() * 2);
                for &x in &ket {
                    k.push(x * phi[0]);
                    k.push(x * phi[1]);
                }
                next.push((h.child(outcome)?, k, reduced));
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// The zero-discord state produced by a measurement tree.
#[derive(Debug, Clone)]
pub struct DephasedState {
    pub matrix: ComplexMatrix,
    /// Keyed by complete histories (length `n-1`).
    pub branch_probabilities: BTreeMap<History, f64>,
}

/// `ρ_Π = Σ_h (Π_h ⊗ I) ρ (Π_h ⊗ I)` over complete outcome histories.
pub fn dephase(rho: &ComplexMatrix, tree: &MeasurementTree) -> Result<DephasedState> {
    let blocks = conditional_blocks(rho, tree)?;
    let dim = rho.rows();
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    let mut branch_probabilities = BTreeMap::new();
    for (h, ket, omega) in blocks {
        let p = omega.trace().re;
        branch_probabilities.insert(h, p);
        if p < NULL_BRANCH {
            // any conditional state on a null branch contributes nothing
            continue;
        }
        let half = ket.len();
        for a in 0..half {
            for b in 0..half {
                let w = ket[a] * ket[b].conj();
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for i in 0..2 {
                    for j in 0..2 {
                        matrix[(2 * a + i, 2 * b + j)] += w * omega[(i, j)];
                    }
                }
            }
        }
    }
    Ok(DephasedState {
        matrix,
        branch_probabilities,
    })
}

/// `||ρ - ρ_Π||²` with the dephased state built explicitly.
pub fn distance_objective(rho: &ComplexMatrix, tree: &MeasurementTree) -> Result<f64> {
    let d = dephase(rho, tree)?;
    hs_dist_sq(rho, &d.matrix)
}

/// Same value as [`distance_objective`] without assembling `ρ_Π`:
/// `tr ρ² - Σ_h tr ω_h²`, using that the measured kets are orthonormal.
pub fn distance_objective_blocks(rho: &ComplexMatrix, tree: &MeasurementTree) -> Result<f64> {
    let purity = crate::linalg::purity(rho);
    let blocks = conditional_blocks(rho, tree)?;
    let kept: f64 = blocks
        .iter()
        .map(|(_, _, w)| crate::linalg::purity(w))
        .sum();
    Ok((purity - kept).max(0.0))
}

/// `2^-n [1 + ||s^(n)||² + Σ_h v_hᵀ G_h v_h]`, the squared norm of the
/// dephased state evaluated from Bloch data through the conditional
/// G matrices.
pub fn tensor_objective(bd: &BlochDecomposition, tree: &MeasurementTree) -> Result<f64> {
    let n = bd.n();
    if tree.n() != n {
        return Err(Error::Dimension(format!(
            "tree is for {} qubits, state has {n}",
            tree.n()
        )));
    }
    tree.ensure_complete()?;
    let last = norm3(bd.coherent(n - 1)).powi(2);
    let mut acc = 1.0 + last;
    for h in tree.all_histories() {
        let g = if h.is_empty() {
            build_root_g(bd)?
        } else {
            build_conditional_g(bd, h, &tree.ancestors(h)?)?
        };
        acc += g.quad_form(&tree.vector(h)?);
    }
    Ok(acc / (1u64 << n) as f64)
}
