//! Dense complex and small real linear algebra.
//!
//! Everything here works on matrices of dimension at most 2^8, so the
//! algorithms favour robustness (Jacobi rotations) over speed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result, StateViolation};

pub type C64 = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-10;
pub const TRACE_TOL: f64 = 1e-10;

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Top-cluster width used when deciding that the largest eigenvalue of a
/// [`Sym3`] is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_vec(r, c, rows.concat()).expect("non-empty rows")
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|psi><psi|` for a column vector given as a slice.
    pub fn outer(psi: &[C64]) -> Self {
        let d = psi.len();
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn scale(&self, k: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_shape(rhs).expect("shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_shape(rhs).expect("shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Single-qubit Pauli matrices; index 0 is the identity, 1..=3 are x, y, z.
pub fn pauli(index: usize) -> ComplexMatrix {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[vec![o, l], vec![l, o]]),
        2 => ComplexMatrix::from_rows(&[vec![o, -i], vec![i, o]]),
        3 => ComplexMatrix::from_rows(&[vec![l, o], vec![o, -l]]),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .expect("kron_all needs at least one factor")
        .clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// Returns `n` if `dim == 2^n`.
pub fn qubit_count(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Reduced density matrix on the qubits in `keep` (0-based, qubit 0 is the
/// most significant tensor factor). The output keeps the qubits in
/// increasing index order.
pub fn partial_trace(rho: &ComplexMatrix, n: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    if !rho.is_square() || rho.rows() != dim {
        return Err(Error::Dimension(format!(
            "expected {dim}x{dim} for {n} qubits, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    if kept.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!(
            "duplicate qubit in {keep:?}"
        )));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!(
            "qubit {q} out of range for n = {n}"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let kdim = 1usize << kept.len();
    let tdim = 1usize << traced.len();

    // bit position of qubit q inside a full basis index
    let pos = |q: usize| n - 1 - q;
    let scatter = |bits: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> (m - 1 - i) & 1 == 1)
            .map(|(_, &q)| 1usize << pos(q))
            .sum()
    };
    let kept_idx: Vec<usize> = (0..kdim).map(|a| scatter(a, &kept)).collect();
    let traced_idx: Vec<usize> = (0..tdim).map(|t| scatter(t, &traced)).collect();

    let mut out = ComplexMatrix::zeros(kdim, kdim);
    for a in 0..kdim {
        for b in 0..kdim {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_idx {
                acc += rho[(kept_idx[a] | t, kept_idx[b] | t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diagonal(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} is not square",
            m.rows, m.cols
        )));
    }
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows;
    let mut a = m.clone();
    // symmetrize exactly so the rotations see a Hermitian matrix
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                // rephase basis vector q so that a_pq becomes real positive
                let phase = (apq / mag).conj();
                for k in 0..n {
                    a[(k, q)] *= phase;
                }
                for k in 0..n {
                    a[(q, k)] *= phase.conj();
                }
                for k in 0..n {
                    v[(k, q)] *= phase;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let kp = a[(k, p)];
                    let kq = a[(k, q)];
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                }
                for k in 0..n {
                    let pk = a[(p, k)];
                    let qk = a[(q, k)];
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                for k in 0..n {
                    let kp = v[(k, p)];
                    let kq = v[(k, q)];
                    v[(k, p)] = kp * c - kq * s;
                    v[(k, q)] = kp * s + kq * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Squared Hilbert–Schmidt distance `tr((a-b)^H (a-b))`.
pub fn hs_dist_sq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum())
}

/// `tr(rho^2)` for a Hermitian matrix.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    rho.data.iter().map(|z| z.norm_sqr()).sum()
}

/// Checks the density-matrix tolerances and returns the qubit count.
pub fn validate_density(rho: &ComplexMatrix) -> Result<usize> {
    let n = match (rho.is_square(), qubit_count(rho.rows())) {
        (true, Some(n)) if n >= 1 => n,
        _ => {
            return Err(StateViolation::Dimension {
                dim: rho.rows(),
                n: (rho.rows() as f64).log2().round() as usize,
            }
            .into())
        }
    };
    let defect = rho.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(StateViolation::NotHermitian(defect).into());
    }
    let tr = rho.trace();
    let dev = (tr - C64::new(1.0, 0.0)).norm();
    if dev > TRACE_TOL {
        return Err(StateViolation::Trace(dev).into());
    }
    let eig = hermitian_eig(rho)?;
    let min = eig.values[0];
    if min < PSD_FLOOR {
        return Err(StateViolation::NotPsd(min).into());
    }
    Ok(n)
}

pub type Vec3 = [f64; 3];

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Real symmetric 3×3 matrix, upper triangle stored as
/// `[xx, xy, xz, yy, yz, zz]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3([f64; 6]);

impl Sym3 {
    pub const ZERO: Sym3 = Sym3([0.0; 6]);

    pub fn from_upper(upper: [f64; 6]) -> Self {
        Sym3(upper)
    }

    /// Symmetric part of a full matrix.
    pub fn from_full(m: &[[f64; 3]; 3]) -> Self {
        let s = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i]);
        Sym3([s(0, 0), s(0, 1), s(0, 2), s(1, 1), s(1, 2), s(2, 2)])
    }

    pub fn diag(d: Vec3) -> Self {
        Sym3([d[0], 0.0, 0.0, d[1], 0.0, d[2]])
    }

    pub fn upper(&self) -> [f64; 6] {
        self.0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match (i, j) {
            (0, 0) => self.0[0],
            (0, 1) => self.0[1],
            (0, 2) => self.0[2],
            (1, 1) => self.0[3],
            (1, 2) => self.0[4],
            (2, 2) => self.0[5],
            _ => unreachable!(),
        }
    }

    pub fn to_full(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.get(i, j);
            }
        }
        m
    }

    /// `Σ_c col_c col_cᵀ` for the given columns, i.e. `B Bᵀ`.
    pub fn gram<'a>(columns: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut g = [0.0; 6];
        for c in columns {
            g[0] += c[0] * c[0];
            g[1] += c[0] * c[1];
            g[2] += c[0] * c[2];
            g[3] += c[1] * c[1];
            g[4] += c[1] * c[2];
            g[5] += c[2] * c[2];
        }
        Sym3(g)
    }

    /// `a bᵀ + b aᵀ`.
    pub fn sym_outer(a: &Vec3, b: &Vec3) -> Self {
        Sym3([
            2.0 * a[0] * b[0],
            a[0] * b[1] + b[0] * a[1],
            a[0] * b[2] + b[0] * a[2],
            2.0 * a[1] * b[1],
            a[1] * b[2] + b[1] * a[2],
            2.0 * a[2] * b[2],
        ])
    }

    pub fn scale(&self, k: f64) -> Self {
        Sym3(self.0.map(|x| x * k))
    }

    pub fn quad_form(&self, v: &Vec3) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.get(i, j) * v[j]).sum();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Sym3) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        let m = self.to_full();
        m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Full eigendecomposition, eigenvalues descending, eigenvectors as rows.
    pub fn eig(&self) -> ([f64; 3], [Vec3; 3]) {
        sym3_jacobi(self)
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(self, rhs: Sym3) -> Sym3 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Sym3(out)
    }
}

impl Sub for Sym3 {
    type Output = Sym3;
    fn sub(self, rhs: Sym3) -> Sym3 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Sym3(out)
    }
}

impl std::iter::Sum for Sym3 {
    fn sum<I: Iterator<Item = Sym3>>(iter: I) -> Sym3 {
        iter.fold(Sym3::ZERO, |a, b| a + b)
    }
}

/// Largest eigenvalue of a [`Sym3`] with a deterministic unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair3 {
    pub eta: f64,
    pub e_hat: Vec3,
}

fn sym3_jacobi(g: &Sym3) -> ([f64; 3], [Vec3; 3]) {
    let mut a = g.to_full();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = g.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2)).sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = if theta == 0.0 {
                1.0
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let kp = a[k][p];
                let kq = a[k][q];
                a[k][p] = c * kp - s * kq;
                a[k][q] = s * kp + c * kq;
            }
            for k in 0..3 {
                let pk = a[p][k];
                let qk = a[q][k];
                a[p][k] = c * pk - s * qk;
                a[q][k] = s * pk + c * qk;
            }
            // v holds eigenvectors as rows
            for k in 0..3 {
                let kp = v[p][k];
                let kq = v[q][k];
                v[p][k] = c * kp - s * kq;
                v[q][k] = s * kp + c * kq;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = idx.map(|i| a[i][i]);
    let vecs = idx.map(|i| v[i]);
    (vals, vecs)
}

fn normalize(v: Vec3) -> Vec3 {
    let n = norm3(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Flips `v` so that its first component with magnitude above 1e-9 is
/// positive.
pub fn canonical_sign(v: Vec3) -> Vec3 {
    match v.iter().find(|x| x.abs() > 1e-9) {
        Some(&x) if x < 0.0 => [-v[0], -v[1], -v[2]],
        _ => v,
    }
}

/// Orthonormal basis of the top eigenspace of `g` (eigenvalues within
/// [`DEGENERACY_TOL`] of the largest), canonical vector first.
///
/// The canonical vector is the unit vector of the eigenspace with the
/// largest z component, then y, then x; its sign is fixed by
/// [`canonical_sign`]. Remaining basis vectors follow the same axis
/// preference via Gram–Schmidt.
pub fn sym3_top_eigenspace(g: &Sym3) -> (f64, Vec<Vec3>) {
    let (vals, vecs) = g.eig();
    let top = vals[0];
    let tol = DEGENERACY_TOL * top.abs().max(1.0);
    let cluster: Vec<Vec3> = (0..3)
        .filter(|&i| top - vals[i] <= tol)
        .map(|i| vecs[i])
        .collect();
    if cluster.len() == 1 {
        return (top, vec![canonical_sign(normalize(cluster[0]))]);
    }
    let project = |e: &Vec3| -> Vec3 {
        let mut w = [0.0; 3];
        for u in &cluster {
            let c = dot3(u, e);
            for k in 0..3 {
                w[k] += c * u[k];
            }
        }
        w
    };
    let axes: [Vec3; 3] = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
    let mut basis: Vec<Vec3> = Vec::with_capacity(cluster.len());
    for e in axes.iter().chain(cluster.iter()) {
        if basis.len() == cluster.len() {
            break;
        }
        let mut w = project(e);
        for b in &basis {
            let c = dot3(b, &w);
            for k in 0..3 {
                w[k] -= c * b[k];
            }
        }
        if norm3(&w) > 1e-6 {
            basis.push(canonical_sign(normalize(w)));
        }
    }
    (top, basis)
}

/// Largest eigenpair of a real symmetric 3×3 matrix with the
/// deterministic sign/tie policy of [`sym3_top_eigenspace`].
pub fn sym3_top_eig(g: &Sym3) -> EigenPair3 {
    let (eta, basis) = sym3_top_eigenspace(g);
    EigenPair3 {
        eta,
        e_hat: basis[0],
    }
}
