//! Closed-form discord: conditional G matrices and the greedy sequential
//! choice of their top eigenvectors.
//!
//! At level `m` (measuring qubit `m-1`) along a history with signed
//! ancestor vectors `σ_k v_k`, the conditional matrix is
//! `G = 2^-(m-1) B Bᵀ` where `B` is 3×4: column 0 collects the vector-like
//! terms and columns 1..3 the terms correlated with the last qubit,
//! `B = Σ_{S ⊆ ancestors} (Π_{k∈S} σ_k) T^{S ∪ {m-1} [∪ {n-1}]}·(v_k)_{k∈S}`.

use std::collections::BTreeMap;

use crate::bloch::{BlochDecomposition, Subset};
use crate::error::{Error, Result};
use crate::linalg::{norm3, sym3_top_eigenspace, Sym3, Vec3};
use crate::measurement::{History, MeasurementTree};

/// Which ancestor subsets enter the conditional matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetFamily {
    /// Every subset of the ancestors. This is what makes the quadratic
    /// forms reproduce the distance objective for any qubit count.
    #[default]
    Complete,
    /// Only `∅`, `{0}`, `{1..k}` and `{0,1..k}`. Agrees with `Complete`
    /// for at most four qubits and drops terms beyond that.
    Prefix,
}

impl SubsetFamily {
    fn subsets(self, ancestors: usize) -> Vec<u32> {
        match self {
            SubsetFamily::Complete => (0..1u32 << ancestors).collect(),
            SubsetFamily::Prefix => {
                let mut out = vec![0];
                if ancestors >= 1 {
                    out.push(1);
                }
                for k in 1..ancestors {
                    // qubits 1..=k, with and without qubit 0
                    let run = ((1u32 << k) - 1) << 1;
                    out.push(run);
                    out.push(run | 1);
                }
                out
            }
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

fn add_scaled(acc: &mut Vec3, k: f64, v: &Vec3) {
    for i in 0..3 {
        acc[i] += k * v[i];
    }
}

/// The 3×4 matrix `B` as four columns.
fn b_columns(
    bd: &BlochDecomposition,
    level: usize,
    signed: &[(usize, Vec3)],
    family: SubsetFamily,
) -> Result<[Vec3; 4]> {
    let n = bd.n();
    let measured = level - 1;
    let last = n - 1;
    let mut cols = [[0.0; 3]; 4];
    for mask in family.subsets(signed.len()) {
        let picked: Vec<(usize, Vec3)> = signed
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| *a)
            .collect();
        let mut s = Subset::from_mask(mask).with(measured);
        let y = bd.tensor_or_lower(s)?.contract_qubits(&picked)?;
        add_scaled(&mut cols[0], 1.0, &y.as_vec3());
        s = s.with(last);
        let x = bd.tensor_or_lower(s)?.contract_qubits(&picked)?;
        for (c, col) in x.as_columns().iter().enumerate() {
            add_scaled(&mut cols[c + 1], 1.0, col);
        }
    }
    Ok(cols)
}

/// Conditional matrix at `level` (1 = root) from signed ancestor vectors,
/// one per earlier qubit in order. Vectors are not checked.
pub fn conditional_g_signed(
    bd: &BlochDecomposition,
    level: usize,
    signed: &[(usize, Vec3)],
    family: SubsetFamily,
) -> Result<Sym3> {
    let n = bd.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: 31 });
    }
    if level == 0 || level > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "level {level} outside 1..={} for {n} qubits",
            n - 1
        )));
    }
    if signed.len() != level - 1 {
        return Err(Error::InvalidArgument(format!(
            "level {level} needs {} ancestors, got {}",
            level - 1,
            signed.len()
        )));
    }
    let cols = b_columns(bd, level, signed, family)?;
    Ok(Sym3::gram(cols.iter()).scale(1.0 / (1u64 << (level - 1)) as f64))
}

/// `G = s^(0) s^(0)ᵀ + T^(0,n-1) T^(0,n-1)ᵀ`.
pub fn build_root_g(bd: &BlochDecomposition) -> Result<Sym3> {
    conditional_g_signed(bd, 1, &[], SubsetFamily::Complete)
}

/// Conditional matrix for a non-empty history; `ancestors[k]` is the unit
/// vector qubit `k` was measured along.
pub fn build_conditional_g(
    bd: &BlochDecomposition,
    history: History,
    ancestors: &[Vec3],
) -> Result<Sym3> {
    build_conditional_g_with(bd, history, ancestors, SubsetFamily::Complete)
}

pub fn build_conditional_g_with(
    bd: &BlochDecomposition,
    history: History,
    ancestors: &[Vec3],
    family: SubsetFamily,
) -> Result<Sym3> {
    if ancestors.len() != history.len() {
        return Err(Error::InvalidArgument(format!(
            "history of length {} needs as many ancestors, got {}",
            history.len(),
            ancestors.len()
        )));
    }
    let mut signed = Vec::with_capacity(ancestors.len());
    for (k, v) in ancestors.iter().enumerate() {
        check_unit(v)?;
        let s = history.sign(k);
        signed.push((k, [s * v[0], s * v[1], s * v[2]]));
    }
    conditional_g_signed(bd, history.len() + 1, &signed, family)
}

fn vec_of(bd: &BlochDecomposition, qubits: &[usize], contract: &[(usize, Vec3)]) -> Result<Vec3> {
    Ok(bd
        .tensor_or_lower(Subset::from_qubits(qubits))?
        .contract_qubits(contract)?
        .as_vec3())
}

fn mat_of(
    bd: &BlochDecomposition,
    qubits: &[usize],
    contract: &[(usize, Vec3)],
) -> Result<[Vec3; 3]> {
    Ok(bd
        .tensor_or_lower(Subset::from_qubits(qubits))?
        .contract_qubits(contract)?
        .as_columns())
}

fn outer_pair(a: &[Vec3; 3], b: &[Vec3; 3]) -> Sym3 {
    (0..3).map(|c| Sym3::sym_outer(&a[c], &b[c])).sum()
}

fn sign_of(outcome: u8) -> f64 {
    if outcome == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Three qubits, level 2, written out term by term.
pub fn conditional_g_three_qubit(bd: &BlochDecomposition, e: &Vec3, j1: u8) -> Result<Sym3> {
    if bd.n() != 3 {
        return Err(Error::UnsupportedSize {
            n: bd.n(),
            min: 3,
            max: 3,
        });
    }
    check_unit(e)?;
    let a = [(0, *e)];
    let s2 = *bd.coherent(1);
    let t23 = mat_of(bd, &[1, 2], &[])?;
    let y = vec_of(bd, &[0, 1], &a)?;
    let x = mat_of(bd, &[0, 1, 2], &a)?;
    let sg = sign_of(j1);
    let g = Sym3::gram([&s2])
        + Sym3::gram(t23.iter())
        + Sym3::gram([&y])
        + Sym3::gram(x.iter())
        + (Sym3::sym_outer(&s2, &y) + outer_pair(&t23, &x)).scale(sg);
    Ok(g.scale(0.5))
}

/// Four qubits, level 2, written out term by term.
pub fn conditional_g_four_qubit_level2(bd: &BlochDecomposition, e: &Vec3, j1: u8) -> Result<Sym3> {
    if bd.n() != 4 {
        return Err(Error::UnsupportedSize {
            n: bd.n(),
            min: 4,
            max: 4,
        });
    }
    check_unit(e)?;
    let a = [(0, *e)];
    let s2 = *bd.coherent(1);
    let t24 = mat_of(bd, &[1, 3], &[])?;
    let y2 = vec_of(bd, &[0, 1], &a)?;
    let x24 = mat_of(bd, &[0, 1, 3], &a)?;
    let g = Sym3::gram([&s2])
        + Sym3::gram(t24.iter())
        + Sym3::gram([&y2])
        + Sym3::gram(x24.iter())
        + (Sym3::sym_outer(&s2, &y2) + outer_pair(&t24, &x24)).scale(sign_of(j1));
    Ok(g.scale(0.5))
}

/// Four qubits, level 3, written out term by term. `e` is the root vector
/// and `e1` the vector used for qubit 1 after outcome `j1`.
pub fn conditional_g_four_qubit_level3(
    bd: &BlochDecomposition,
    e: &Vec3,
    e1: &Vec3,
    j1: u8,
    j2: u8,
) -> Result<Sym3> {
    if bd.n() != 4 {
        return Err(Error::UnsupportedSize {
            n: bd.n(),
            min: 4,
            max: 4,
        });
    }
    check_unit(e)?;
    check_unit(e1)?;
    let s3 = *bd.coherent(2);
    let t34 = mat_of(bd, &[2, 3], &[])?;
    let y3 = vec_of(bd, &[0, 2], &[(0, *e)])?;
    let x34 = mat_of(bd, &[0, 2, 3], &[(0, *e)])?;
    let y3j = vec_of(bd, &[1, 2], &[(1, *e1)])?;
    let x34j = mat_of(bd, &[1, 2, 3], &[(1, *e1)])?;
    let z = vec_of(bd, &[0, 1, 2], &[(0, *e), (1, *e1)])?;
    let w = mat_of(bd, &[0, 1, 2, 3], &[(0, *e), (1, *e1)])?;
    let (s1, s2) = (sign_of(j1), sign_of(j2));

    let squares = Sym3::gram([&s3, &y3, &y3j, &z])
        + Sym3::gram(t34.iter())
        + Sym3::gram(x34.iter())
        + Sym3::gram(x34j.iter())
        + Sym3::gram(w.iter());
    let first = Sym3::sym_outer(&s3, &y3)
        + outer_pair(&t34, &x34)
        + Sym3::sym_outer(&y3j, &z)
        + outer_pair(&x34j, &w);
    let second = Sym3::sym_outer(&s3, &y3j)
        + outer_pair(&t34, &x34j)
        + Sym3::sym_outer(&y3, &z)
        + outer_pair(&x34, &w);
    let both = Sym3::sym_outer(&s3, &z)
        + outer_pair(&t34, &w)
        + Sym3::sym_outer(&y3, &y3j)
        + outer_pair(&x34, &x34j);
    let g = squares + first.scale(s1) + second.scale(s2) + both.scale(s1 * s2);
    Ok(g.scale(0.25))
}

/// Conditional matrices and their top eigenvalues for one tree.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrixSet {
    pub root: Sym3,
    /// Keyed by non-empty histories.
    pub conditional: BTreeMap<History, Sym3>,
    /// Keyed by every history, the root under [`History::ROOT`].
    pub etas: BTreeMap<History, f64>,
}

impl GMatrixSet {
    pub fn eta_sum(&self) -> f64 {
        self.etas.values().sum()
    }
}

/// Squared norms of the Bloch data that a measurement can remove.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBudget {
    /// `||s^(k)||²` for the measured qubits `0..n-1`.
    pub coherent: Vec<f64>,
    /// `||T^S||²` for every `|S| ≥ 2`.
    pub tensors: BTreeMap<Subset, f64>,
}

impl NormBudget {
    pub fn of(bd: &BlochDecomposition) -> Self {
        let n = bd.n();
        NormBudget {
            coherent: (0..n - 1).map(|k| norm3(bd.coherent(k)).powi(2)).collect(),
            tensors: bd.tensors().map(|(s, t)| (*s, t.norm_sq())).collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.coherent.iter().sum::<f64>() + self.tensors.values().sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct ClosedFormResult {
    pub value: f64,
    pub tree: MeasurementTree,
    pub gmatrices: GMatrixSet,
    pub norm_budget: NormBudget,
}

impl ClosedFormResult {
    /// The value recomputed from the budget and eigenvalues.
    pub fn assembled_value(&self) -> f64 {
        let n = self.tree.n();
        (self.norm_budget.total() - self.gmatrices.eta_sum()) / (1u64 << n) as f64
    }
}

#[derive(Default)]
struct Subtree {
    eta_sum: f64,
    vectors: Vec<(History, Vec3)>,
    matrices: Vec<(History, Sym3, f64)>,
}

/// Largest achievable downstream eigenvalue sum below `h`, trying every
/// basis vector of a degenerate top eigenspace.
fn best_subtree(
    bd: &BlochDecomposition,
    h: History,
    signed: &mut Vec<(usize, Vec3)>,
) -> Result<Subtree> {
    let n = bd.n();
    let level = h.len() + 1;
    let g = conditional_g_signed(bd, level, signed, SubsetFamily::Complete)?;
    let (eta, candidates) = sym3_top_eigenspace(&g);
    let mut best: Option<Subtree> = None;
    for v in candidates {
        let mut sub = Subtree {
            eta_sum: eta,
            vectors: vec![(h, v)],
            matrices: vec![(h, g, eta)],
        };
        if level < n - 1 {
            for outcome in 1..=2u8 {
                let s = sign_of(outcome);
                signed.push((level - 1, [s * v[0], s * v[1], s * v[2]]));
                let child = best_subtree(bd, h.child(outcome)?, signed);
                signed.pop();
                let child = child?;
                sub.eta_sum += child.eta_sum;
                sub.vectors.extend(child.vectors);
                sub.matrices.extend(child.matrices);
            }
        } else {
            // downstream sum does not depend on the choice
            return Ok(sub);
        }
        match &best {
            Some(b) if sub.eta_sum <= b.eta_sum + 1e-12 => {}
            _ => best = Some(sub),
        }
    }
    Ok(best.unwrap_or_default())
}

/// Greedy closed-form discord of an `n ≥ 2` qubit state.
pub fn discord_closed(bd: &BlochDecomposition) -> Result<ClosedFormResult> {
    let n = bd.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: 31 });
    }
    let sub = best_subtree(bd, History::ROOT, &mut Vec::new())?;
    let mut tree = MeasurementTree::new(n)?;
    for (h, v) in &sub.vectors {
        tree.set(*h, *v)?;
    }
    let mut root = Sym3::ZERO;
    let mut conditional = BTreeMap::new();
    let mut etas = BTreeMap::new();
    for (h, g, eta) in sub.matrices {
        if h.is_empty() {
            root = g;
        } else {
            conditional.insert(h, g);
        }
        etas.insert(h, eta);
    }
    let gmatrices = GMatrixSet {
        root,
        conditional,
        etas,
    };
    let norm_budget = NormBudget::of(bd);
    let mut result = ClosedFormResult {
        value: 0.0,
        tree,
        gmatrices,
        norm_budget,
    };
    result.value = result.assembled_value();
    Ok(result)
}

/// Two-qubit discord `¼(||x||² + ||T||² - λ_max(x xᵀ + T Tᵀ))`.
pub fn dakic(bd: &BlochDecomposition) -> Result<f64> {
    if bd.n() != 2 {
        return Err(Error::UnsupportedSize {
            n: bd.n(),
            min: 2,
            max: 2,
        });
    }
    let x = *bd.coherent(0);
    let t = bd.tensor(Subset::from_qubits(&[0, 1]))?.as_columns();
    let k = Sym3::gram([&x]) + Sym3::gram(t.iter());
    let (vals, _) = k.eig();
    let norms = norm3(&x).powi(2) + t.iter().map(|c| norm3(c).powi(2)).sum::<f64>();
    Ok(0.25 * (norms - vals[0]))
}

/// Whether `2^-n (I + Σ_j c_j σ_j^{⊗n})` is positive semidefinite.
///
/// For odd `n` the three operators anticommute and the condition is
/// `||c|| ≤ 1`. For even `n` they commute, their joint eigenvalues are
/// sign patterns `e` with `e_x e_y e_z = (-1)^(n/2)`, and the condition is
/// `1 + c·e ≥ 0` for each of those patterns.
pub fn family_admissible(c: &Vec3, n: usize) -> bool {
    const TOL: f64 = 1e-12;
    if norm3(c) > 1.0 + TOL {
        return false;
    }
    if !n.is_multiple_of(2) {
        return true;
    }
    let parity = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    for ex in [1.0, -1.0] {
        for ey in [1.0, -1.0] {
            let ez = parity * ex * ey;
            if 1.0 + ex * c[0] + ey * c[1] + ez * c[2] < -TOL {
                return false;
            }
        }
    }
    true
}

/// `2^-n (Σ c_j² - max c_j²)` for the equal-correlation family.
pub fn family_discord(c: &Vec3, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: 31 });
    }
    if !family_admissible(c, n) {
        return Err(Error::InvalidArgument(format!(
            "c = {c:?} does not give a positive semidefinite {n}-qubit state"
        )));
    }
    let sq = c.map(|x| x * x);
    let max = sq.iter().copied().fold(0.0, f64::max);
    Ok((sq.iter().sum::<f64>() - max) / (1u64 << n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{decompose, reconstruct, CorrTensor};
    use crate::linalg::{c64, ComplexMatrix};
    use crate::measurement::distance_objective;

    const Z: Vec3 = [0.0, 0.0, 1.0];

    fn e_zz() -> Sym3 {
        Sym3::diag([0.0, 0.0, 1.0])
    }

    fn basis(bits: &[u8]) -> ComplexMatrix {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut v = vec![c64(0.0, 0.0); 1 << bits.len()];
        v[idx] = c64(1.0, 0.0);
        ComplexMatrix::outer(&v)
    }

    fn ghz(n: usize) -> ComplexMatrix {
        let mut v = vec![c64(0.0, 0.0); 1 << n];
        v[0] = c64(0.5f64.sqrt(), 0.0);
        v[(1 << n) - 1] = c64(0.5f64.sqrt(), 0.0);
        ComplexMatrix::outer(&v)
    }

    fn family_bd(c: Vec3, n: usize) -> BlochDecomposition {
        let mut bd = BlochDecomposition::zero(n);
        let all = Subset::from_mask((1 << n) - 1);
        let mut t = CorrTensor::zeros(all.qubits());
        for (a, &ca) in c.iter().enumerate() {
            t.set(&vec![a; n], ca);
        }
        *bd.tensor_mut(all).unwrap() = t;
        bd
    }

    #[test]
    fn root_examples() {
        let zero = decompose(&basis(&[0, 0, 0]), 3).unwrap();
        assert!(
            build_root_g(&zero)
                .unwrap()
                .max_abs_diff(&e_zz().scale(2.0))
                < 1e-15
        );
        let g = decompose(&ghz(3), 3).unwrap();
        assert!(build_root_g(&g).unwrap().max_abs_diff(&e_zz()) < 1e-15);
        let mixed = BlochDecomposition::zero(3);
        assert_eq!(build_root_g(&mixed).unwrap(), Sym3::ZERO);
    }

    #[test]
    fn conditional_examples() {
        let one = History::from_outcomes(&[1]).unwrap();
        let two = History::from_outcomes(&[2]).unwrap();
        let g = decompose(&ghz(3), 3).unwrap();
        assert!(
            build_conditional_g(&g, one, &[Z])
                .unwrap()
                .max_abs_diff(&e_zz())
                < 1e-15
        );
        let zero = decompose(&basis(&[0, 0, 0]), 3).unwrap();
        let g1 = build_conditional_g(&zero, one, &[Z]).unwrap();
        assert!(g1.max_abs_diff(&e_zz().scale(4.0)) < 1e-14);
        let g2 = build_conditional_g(&zero, two, &[Z]).unwrap();
        assert!(g2.max_abs_diff(&Sym3::ZERO) < 1e-14);
        let mixed = BlochDecomposition::zero(4);
        let h = History::from_outcomes(&[1]).unwrap();
        assert_eq!(
            build_conditional_g(&mixed, h, &[[1.0, 0.0, 0.0]]).unwrap(),
            Sym3::ZERO
        );
    }

    #[test]
    fn conditional_errors() {
        let g = decompose(&ghz(3), 3).unwrap();
        let one = History::from_outcomes(&[1]).unwrap();
        assert!(matches!(
            build_conditional_g(&g, one, &[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_conditional_g(&g, one, &[[0.0, 0.0, 2.0]]),
            Err(Error::NonUnitVector(_))
        ));
        let deep = History::from_outcomes(&[1, 1]).unwrap();
        assert!(build_conditional_g(&g, deep, &[Z, Z]).is_err());
    }

    #[test]
    fn subset_families() {
        assert_eq!(SubsetFamily::Prefix.subsets(0), vec![0]);
        assert_eq!(SubsetFamily::Prefix.subsets(1), vec![0, 1]);
        let mut p2 = SubsetFamily::Prefix.subsets(2);
        p2.sort();
        assert_eq!(p2, vec![0, 1, 2, 3]);
        let p3 = SubsetFamily::Prefix.subsets(3);
        assert_eq!(p3.len(), 6);
        assert!(!p3.contains(&0b100));
        assert!(!p3.contains(&0b101));
    }

    #[test]
    fn discord_examples() {
        let zero = decompose(&basis(&[0, 0, 0]), 3).unwrap();
        let r = discord_closed(&zero).unwrap();
        assert!(r.value.abs() < 1e-14);
        let g = decompose(&ghz(3), 3).unwrap();
        let r = discord_closed(&g).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert_eq!(r.gmatrices.etas.len(), 3);
        assert!((r.value - distance_objective(&ghz(3), &r.tree).unwrap()).abs() < 1e-12);
        let fam = family_bd([0.6, 0.0, 0.0], 3);
        assert!(discord_closed(&fam).unwrap().value.abs() < 1e-14);
        assert!(discord_closed(&BlochDecomposition::zero(1)).is_err());
    }

    #[test]
    fn family_examples() {
        assert!((family_discord(&[0.6, 0.4, 0.2], 3).unwrap() - 0.025).abs() < 1e-15);
        assert_eq!(family_discord(&[0.0; 3], 5).unwrap(), 0.0);
        assert!((family_discord(&[0.5, 0.5, 0.0], 4).unwrap() - 0.015625).abs() < 1e-15);
        assert!(family_discord(&[0.9, 0.9, 0.0], 3).is_err());
        // inside the unit ball but not positive for even n
        assert!(family_discord(&[-0.5, -0.5, -0.5], 4).is_err());
        assert!(family_discord(&[0.5, 0.5, 0.5], 2).is_err());
        assert!(family_discord(&[0.5, 0.5, 0.5], 3).is_ok());
        for (c, n) in [
            ([0.6, 0.4, 0.2], 3),
            ([0.3, -0.5, 0.2], 5),
            ([0.5, 0.5, 0.0], 4),
        ] {
            let bd = family_bd(c, n);
            let closed = discord_closed(&bd).unwrap();
            assert!((closed.value - family_discord(&c, n).unwrap()).abs() < 1e-12);
            let rho = reconstruct(&bd);
            assert!((closed.value - distance_objective(&rho, &closed.tree).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn dakic_examples() {
        let p = 0.7;
        let mut psi = vec![c64(0.0, 0.0); 4];
        psi[1] = c64(0.5f64.sqrt(), 0.0);
        psi[2] = c64(-(0.5f64.sqrt()), 0.0);
        let werner = &ComplexMatrix::outer(&psi).scale_real(p)
            + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        let bd = decompose(&werner, 2).unwrap();
        assert!((dakic(&bd).unwrap() - p * p / 2.0).abs() < 1e-14);
        assert!((discord_closed(&bd).unwrap().value - p * p / 2.0).abs() < 1e-14);
        assert!(
            dakic(&decompose(&basis(&[0, 0]), 2).unwrap())
                .unwrap()
                .abs()
                < 1e-15
        );
        assert_eq!(dakic(&BlochDecomposition::zero(2)).unwrap(), 0.0);
        assert!(dakic(&BlochDecomposition::zero(3)).is_err());
    }

    #[test]
    fn explicit_builders_match_general() {
        let g = decompose(&ghz(3), 3).unwrap();
        let e = [0.6, 0.0, 0.8];
        for j in 1..=2u8 {
            let h = History::from_outcomes(&[j]).unwrap();
            let a = build_conditional_g(&g, h, &[e]).unwrap();
            let b = conditional_g_three_qubit(&g, &e, j).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
        let g4 = decompose(&ghz(4), 4).unwrap();
        let e1 = [0.0, 0.6, 0.8];
        for j1 in 1..=2u8 {
            for j2 in 1..=2u8 {
                let h = History::from_outcomes(&[j1, j2]).unwrap();
                let a = build_conditional_g(&g4, h, &[e, e1]).unwrap();
                let b = conditional_g_four_qubit_level3(&g4, &e, &e1, j1, j2).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-14);
            }
        }
    }
}
