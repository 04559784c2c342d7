//! Bloch (Pauli-string) representation of N-qubit density matrices.
//!
//! A state on `n` qubits is written as
//! `ρ = 2^-n [ I + Σ_k s^(k)·σ^(k) + Σ_{|S|≥2} Σ_α T^S_α σ^(S)_α ]`
//! where `s^(k)_α = tr(ρ σ^(k)_α)` and `T^S` collects the expectation values
//! of Pauli strings supported exactly on the subset `S`.
//!
//! Qubits are 0-based; qubit 0 is the most significant tensor factor.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c64, norm3, validate_density, ComplexMatrix, Vec3, C64};

/// Imaginary residue tolerated in a Pauli expectation value.
pub const IMAG_TOL: f64 = 1e-10;

/// The orthonormal operator basis `{I, σx, σy, σz} / √2` on one qubit.
pub struct PauliBasis;

impl PauliBasis {
    pub fn element(i: usize) -> ComplexMatrix {
        crate::linalg::pauli(i).scale_real(std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// A set of qubits, stored as a bitmask (bit `k` is qubit `k`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub fn from_qubits(qubits: &[usize]) -> Self {
        Subset(qubits.iter().fold(0u32, |m, &q| m | (1 << q)))
    }

    pub fn from_mask(mask: u32) -> Self {
        Subset(mask)
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0 >> q & 1 == 1
    }

    /// Qubits in increasing order.
    pub fn qubits(&self) -> Vec<usize> {
        (0..32).filter(|&q| self.contains(q)).collect()
    }

    pub fn with(&self, q: usize) -> Self {
        Subset(self.0 | (1 << q))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.qubits())
    }
}

/// Dense real tensor over `{x,y,z}^order`, axes ordered like `qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrTensor {
    qubits: Vec<usize>,
    data: Vec<f64>,
}

impl CorrTensor {
    pub fn zeros(qubits: Vec<usize>) -> Self {
        let len = 3usize.pow(qubits.len() as u32);
        CorrTensor {
            qubits,
            data: vec![0.0; len],
        }
    }

    pub fn order(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Flat offset of a multi-index with entries in 0..3 (x, y, z).
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        idx.iter().fold(0, |acc, &a| acc * 3 + a)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Sums the tensor against `v` along axis `position`.
    pub fn contract_axis(&self, position: usize, v: &Vec3) -> CorrTensor {
        assert!(position < self.order(), "axis {position} out of range");
        let mut qubits = self.qubits.clone();
        qubits.remove(position);
        let inner = 3usize.pow((self.order() - 1 - position) as u32);
        let outer = 3usize.pow(position as u32);
        let mut data = vec![0.0; outer * inner];
        for o in 0..outer {
            for a in 0..3 {
                let base = (o * 3 + a) * inner;
                for i in 0..inner {
                    data[o * inner + i] += v[a] * self.data[base + i];
                }
            }
        }
        CorrTensor { qubits, data }
    }

    /// Contracts every listed qubit against its vector. Qubits not in the
    /// tensor are an error.
    pub fn contract_qubits(&self, assignments: &[(usize, Vec3)]) -> Result<CorrTensor> {
        let mut t = self.clone();
        for (q, v) in assignments {
            let pos = t
                .qubits
                .iter()
                .position(|x| x == q)
                .ok_or_else(|| Error::InvalidArgument(format!("qubit {q} not in tensor")))?;
            t = t.contract_axis(pos, v);
        }
        Ok(t)
    }

    /// Interprets an order-1 tensor as a vector.
    pub fn as_vec3(&self) -> Vec3 {
        assert_eq!(self.order(), 1, "tensor is not a vector");
        [self.data[0], self.data[1], self.data[2]]
    }

    /// Interprets an order-2 tensor as the columns of a 3×3 matrix
    /// (first axis = row).
    pub fn as_columns(&self) -> [Vec3; 3] {
        assert_eq!(self.order(), 2, "tensor is not a matrix");
        let d = &self.data;
        [[d[0], d[3], d[6]], [d[1], d[4], d[7]], [d[2], d[5], d[8]]]
    }

    /// The order-0 value.
    pub fn as_scalar(&self) -> f64 {
        assert_eq!(self.order(), 0, "tensor is not a scalar");
        self.data[0]
    }
}

/// Coherent vectors and correlation tensors of an `n`-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDecomposition {
    n: usize,
    coherent: Vec<Vec3>,
    tensors: BTreeMap<Subset, CorrTensor>,
}

impl BlochDecomposition {
    /// All-zero decomposition (the maximally mixed state) with every
    /// subset of size ≥ 2 present.
    pub fn zero(n: usize) -> Self {
        let mut tensors = BTreeMap::new();
        for mask in 0u32..(1 << n) {
            let s = Subset(mask);
            if s.len() >= 2 {
                tensors.insert(s, CorrTensor::zeros(s.qubits()));
            }
        }
        BlochDecomposition {
            n,
            coherent: vec![[0.0; 3]; n],
            tensors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coherent(&self, k: usize) -> &Vec3 {
        &self.coherent[k]
    }

    pub fn coherent_vectors(&self) -> &[Vec3] {
        &self.coherent
    }

    pub fn set_coherent(&mut self, k: usize, v: Vec3) {
        self.coherent[k] = v;
    }

    pub fn tensor(&self, s: Subset) -> Result<&CorrTensor> {
        self.tensors
            .get(&s)
            .ok_or_else(|| Error::MissingSubset(s.qubits()))
    }

    pub fn tensor_mut(&mut self, s: Subset) -> Result<&mut CorrTensor> {
        self.tensors
            .get_mut(&s)
            .ok_or_else(|| Error::MissingSubset(s.qubits()))
    }

    pub fn tensors(&self) -> impl Iterator<Item = (&Subset, &CorrTensor)> {
        self.tensors.iter()
    }

    /// The tensor of `subset` when `|subset| ≥ 2`, the coherent vector as an
    /// order-1 tensor when `|subset| = 1`, and the constant 1 when empty.
    pub fn tensor_or_lower(&self, s: Subset) -> Result<CorrTensor> {
        match s.len() {
            0 => Ok(CorrTensor {
                qubits: vec![],
                data: vec![1.0],
            }),
            1 => {
                let q = s.qubits()[0];
                Ok(CorrTensor {
                    qubits: vec![q],
                    data: self.coherent[q].to_vec(),
                })
            }
            _ => self.tensor(s).cloned(),
        }
    }

    /// `Σ_k ||s^(k)||² + Σ_S ||T^S||²`.
    pub fn squared_norm_sum(&self) -> f64 {
        let c: f64 = self.coherent.iter().map(|v| norm3(v).powi(2)).sum();
        let t: f64 = self.tensors.values().map(CorrTensor::norm_sq).sum();
        c + t
    }

    /// `tr(ρ²)` computed from the Bloch data.
    pub fn purity(&self) -> f64 {
        (1.0 + self.squared_norm_sum()) / (1u64 << self.n) as f64
    }

    /// Entrywise maximum difference to another decomposition of the same
    /// size.
    pub fn max_abs_diff(&self, other: &BlochDecomposition) -> f64 {
        assert_eq!(self.n, other.n);
        let mut worst = 0.0f64;
        for (a, b) in self.coherent.iter().zip(&other.coherent) {
            for k in 0..3 {
                worst = worst.max((a[k] - b[k]).abs());
            }
        }
        for (s, t) in &self.tensors {
            if let Some(u) = other.tensors.get(s) {
                for (x, y) in t.data.iter().zip(&u.data) {
                    worst = worst.max((x - y).abs());
                }
            } else {
                worst = worst.max(t.data.iter().fold(0.0, |m, x| m.max(x.abs())));
            }
        }
        worst
    }
}

/// Pauli string on `n` qubits as per-qubit codes (0 = I, 1..=3 = x, y, z).
/// Returns `(flip mask, phase(c))` so that `P|c⟩ = phase(c) |c ⊕ flip⟩`.
fn pauli_action(codes: &[usize], n: usize) -> (usize, impl Fn(usize) -> C64) {
    let mut flip = 0usize;
    let mut sign_mask = 0usize;
    let mut n_y = 0u32;
    for (q, &c) in codes.iter().enumerate() {
        let bit = 1usize << (n - 1 - q);
        match c {
            1 => flip |= bit,
            2 => {
                flip |= bit;
                sign_mask |= bit;
                n_y += 1;
            }
            3 => sign_mask |= bit,
            _ => {}
        }
    }
    let i_pow = match n_y % 4 {
        0 => c64(1.0, 0.0),
        1 => c64(0.0, 1.0),
        2 => c64(-1.0, 0.0),
        _ => c64(0.0, -1.0),
    };
    let phase = move |c: usize| {
        if (c & sign_mask).count_ones() % 2 == 1 {
            -i_pow
        } else {
            i_pow
        }
    };
    (flip, phase)
}

/// `tr(ρ P)` for the Pauli string `codes`.
pub fn pauli_expectation(rho: &ComplexMatrix, codes: &[usize]) -> C64 {
    let n = codes.len();
    let (flip, phase) = pauli_action(codes, n);
    (0..rho.rows()).map(|c| rho[(c, c ^ flip)] * phase(c)).sum()
}

/// Expands every Pauli string supported on `s` (axis order = sorted qubits).
fn for_each_string(n: usize, s: Subset, mut f: impl FnMut(&[usize], &[usize])) {
    let qubits = s.qubits();
    let order = qubits.len();
    let mut codes = vec![0usize; n];
    let mut idx = vec![0usize; order];
    for flat in 0..3usize.pow(order as u32) {
        let mut rem = flat;
        for i in (0..order).rev() {
            idx[i] = rem % 3;
            rem /= 3;
        }
        for (i, &q) in qubits.iter().enumerate() {
            codes[q] = idx[i] + 1;
        }
        f(&codes, &idx);
    }
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im.abs()));
    }
    Ok(z.re)
}

/// Coherent vectors and correlation tensors of a validated density matrix.
pub fn decompose(rho: &ComplexMatrix, n: usize) -> Result<BlochDecomposition> {
    let found = validate_density(rho)?;
    if found != n {
        return Err(Error::Dimension(format!(
            "matrix is a {found}-qubit state, expected {n}"
        )));
    }
    decompose_unchecked(rho, n)
}

/// [`decompose`] without the density-matrix validation; the matrix must
/// still be Hermitian for the expectation values to be real.
pub fn decompose_unchecked(rho: &ComplexMatrix, n: usize) -> Result<BlochDecomposition> {
    let mut bd = BlochDecomposition::zero(n);
    for q in 0..n {
        let mut v = [0.0; 3];
        for (a, x) in v.iter_mut().enumerate() {
            let mut codes = vec![0; n];
            codes[q] = a + 1;
            *x = real_part(pauli_expectation(rho, &codes))?;
        }
        bd.coherent[q] = v;
    }
    let subsets: Vec<Subset> = bd.tensors.keys().copied().collect();
    for s in subsets {
        let mut entries = Vec::with_capacity(3usize.pow(s.len() as u32));
        for_each_string(n, s, |codes, _| entries.push(pauli_expectation(rho, codes)));
        let t = bd.tensors.get_mut(&s).expect("subset present");
        for (slot, z) in t.data.iter_mut().zip(entries) {
            *slot = real_part(z)?;
        }
    }
    Ok(bd)
}

/// Rebuilds `ρ = 2^-n [I + Σ s·σ + Σ T σ⋯σ]`. No positivity check.
pub fn reconstruct(bd: &BlochDecomposition) -> ComplexMatrix {
    let n = bd.n;
    let dim = 1usize << n;
    let norm = 1.0 / dim as f64;
    let mut rho = ComplexMatrix::identity(dim).scale_real(norm);
    let mut add_string = |codes: &[usize], coeff: f64| {
        if coeff == 0.0 {
            return;
        }
        let (flip, phase) = pauli_action(codes, n);
        for c in 0..dim {
            rho[(c ^ flip, c)] += phase(c) * (coeff * norm);
        }
    };
    for q in 0..n {
        for a in 0..3 {
            let mut codes = vec![0; n];
            codes[q] = a + 1;
            add_string(&codes, bd.coherent[q][a]);
        }
    }
    for (s, t) in &bd.tensors {
        let mut k = 0;
        for_each_string(n, *s, |codes, _| {
            add_string(codes, t.data[k]);
            k += 1;
        });
    }
    rho
}

/// Contracts `T^S` against the unit vector `v` along the axis at
/// `position` within the sorted subset.
pub fn contract(
    bd: &BlochDecomposition,
    subset: Subset,
    position: usize,
    v: &Vec3,
) -> Result<CorrTensor> {
    let norm = norm3(v);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector(norm));
    }
    let t = bd.tensor(subset)?;
    if position >= t.order() {
        return Err(Error::InvalidArgument(format!(
            "position {position} out of range for subset {subset:?}"
        )));
    }
    Ok(t.contract_axis(position, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_dist_sq, ComplexMatrix};

    fn basis_state(bits: &[u8]) -> ComplexMatrix {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut v = vec![c64(0.0, 0.0); 1 << bits.len()];
        v[idx] = c64(1.0, 0.0);
        ComplexMatrix::outer(&v)
    }

    fn ghz3() -> ComplexMatrix {
        let mut v = vec![c64(0.0, 0.0); 8];
        v[0] = c64(0.5f64.sqrt(), 0.0);
        v[7] = c64(0.5f64.sqrt(), 0.0);
        ComplexMatrix::outer(&v)
    }

    #[test]
    fn pauli_basis_is_orthonormal() {
        for i in 0..4 {
            for j in 0..4 {
                let tr = (&PauliBasis::element(i) * &PauliBasis::element(j)).trace();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((tr - c64(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pauli_expectation_matches_explicit_kron() {
        let rho = ghz3();
        let codes = [2, 1, 2];
        let p = crate::linalg::kron_all([
            &crate::linalg::pauli(2),
            &crate::linalg::pauli(1),
            &crate::linalg::pauli(2),
        ]);
        let direct = (&rho * &p).trace();
        assert!((direct - pauli_expectation(&rho, &codes)).norm() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_all_zero() {
        let bd = decompose(&ComplexMatrix::identity(8).scale_real(0.125), 3).unwrap();
        assert_eq!(bd.squared_norm_sum(), 0.0);
        assert_eq!(bd.tensors().count(), 4);
    }

    #[test]
    fn product_zero_state() {
        let bd = decompose(&basis_state(&[0, 0, 0]), 3).unwrap();
        for k in 0..3 {
            assert_eq!(*bd.coherent(k), [0.0, 0.0, 1.0]);
        }
        for (s, t) in bd.tensors() {
            let zz = vec![2; s.len()];
            for (i, &x) in t.data().iter().enumerate() {
                let want = if i == t.offset(&zz) { 1.0 } else { 0.0 };
                assert_eq!(x, want, "subset {s:?} entry {i}");
            }
        }
        assert!((bd.squared_norm_sum() - 7.0).abs() < 1e-14);
        assert!((bd.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_decomposition() {
        let bd = decompose(&ghz3(), 3).unwrap();
        for k in 0..3 {
            assert!(norm3(bd.coherent(k)) < 1e-15);
        }
        for pair in [[0, 1], [0, 2], [1, 2]] {
            let t = bd.tensor(Subset::from_qubits(&pair)).unwrap();
            for (i, &x) in t.data().iter().enumerate() {
                let want = if i == t.offset(&[2, 2]) { 1.0 } else { 0.0 };
                assert!((x - want).abs() < 1e-15);
            }
        }
        let full = bd.tensor(Subset::from_qubits(&[0, 1, 2])).unwrap();
        let expected = [
            ([0, 0, 0], 1.0),
            ([0, 1, 1], -1.0),
            ([1, 0, 1], -1.0),
            ([1, 1, 0], -1.0),
        ];
        let mut nonzero = 0;
        for (i, &x) in full.data().iter().enumerate() {
            if x.abs() > 1e-15 {
                nonzero += 1;
                let (idx, v) = expected
                    .iter()
                    .find(|(idx, _)| full.offset(idx) == i)
                    .expect("unexpected nonzero entry");
                assert!((x - v).abs() < 1e-15, "{idx:?}");
            }
        }
        assert_eq!(nonzero, 4);
        assert!((bd.squared_norm_sum() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruct_examples() {
        let rho = reconstruct(&BlochDecomposition::zero(3));
        assert!(rho.max_abs_diff(&ComplexMatrix::identity(8).scale_real(0.125)) < 1e-16);

        let g = ghz3();
        let back = reconstruct(&decompose(&g, 3).unwrap());
        assert!(back.max_abs_diff(&g) < 1e-12);

        // family state with only the diagonal full-order correlations
        let c = [0.3, -0.2, 0.5];
        let mut bd = BlochDecomposition::zero(3);
        let full = Subset::from_qubits(&[0, 1, 2]);
        for (a, &ca) in c.iter().enumerate() {
            bd.tensor_mut(full).unwrap().set(&[a, a, a], ca);
        }
        let rho = reconstruct(&bd);
        let mut expected = ComplexMatrix::identity(8);
        for (a, &ca) in c.iter().enumerate() {
            let p = crate::linalg::pauli(a + 1);
            let s = crate::linalg::kron_all([&p, &p, &p]);
            expected = &expected + &s.scale_real(ca);
        }
        let expected = expected.scale_real(0.125);
        assert!(hs_dist_sq(&rho, &expected).unwrap() < 1e-28);
    }

    #[test]
    fn contract_examples() {
        let bd = decompose(&ghz3(), 3).unwrap();
        let z = [0.0, 0.0, 1.0];
        let y = contract(&bd, Subset::from_qubits(&[0, 1]), 0, &z).unwrap();
        let yv = y.as_vec3();
        assert!(yv[0].abs() < 1e-15 && yv[1].abs() < 1e-15 && (yv[2] - 1.0).abs() < 1e-15);
        let x = contract(&bd, Subset::from_qubits(&[0, 1, 2]), 0, &z).unwrap();
        assert!(x.data().iter().all(|v| v.abs() < 1e-15));
        assert_eq!(x.order(), 2);
        assert!(matches!(
            contract(&bd, Subset::from_qubits(&[0, 1]), 0, &[0.0, 0.0, 0.0]),
            Err(Error::NonUnitVector(_))
        ));
        assert!(matches!(
            contract(&bd, Subset::from_qubits(&[0]), 0, &z),
            Err(Error::MissingSubset(_))
        ));
    }

    #[test]
    fn contract_axis_against_brute_force() {
        let mut t = CorrTensor::zeros(vec![0, 1, 2]);
        for i in 0..27 {
            t.data[i] = (i as f64 * 0.37).sin();
        }
        let v = [0.2, -0.5, 0.7];
        for pos in 0..3 {
            let c = t.contract_axis(pos, &v);
            for a in 0..3 {
                for b in 0..3 {
                    let mut want = 0.0;
                    for k in 0..3 {
                        let mut idx = vec![a, b];
                        idx.insert(pos, k);
                        want += v[k] * t.get(&idx);
                    }
                    assert!((c.get(&[a, b]) - want).abs() < 1e-15);
                }
            }
        }
    }
}
