//! State generators, random states and local unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::closedform::family_admissible;
use crate::error::{Error, Result};
use crate::linalg::{c64, kron_all, pauli, validate_density, ComplexMatrix, Vec3, C64};
use crate::measurement::{random_unit_vector, MeasurementTree};

/// Largest qubit count the dense generators accept.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Ghz,
    W,
    PlusProduct,
    BasisProduct,
    WernerGhz,
    WGhzMix,
    ClassicalMix,
    Family,
    RandomDensity,
    RandomPure,
}

impl StateKind {
    pub const ALL: [StateKind; 10] = [
        StateKind::Ghz,
        StateKind::W,
        StateKind::PlusProduct,
        StateKind::BasisProduct,
        StateKind::WernerGhz,
        StateKind::WGhzMix,
        StateKind::ClassicalMix,
        StateKind::Family,
        StateKind::RandomDensity,
        StateKind::RandomPure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::W => "w",
            StateKind::PlusProduct => "plus-product",
            StateKind::BasisProduct => "basis-product",
            StateKind::WernerGhz => "werner-ghz",
            StateKind::WGhzMix => "w-ghz-mix",
            StateKind::ClassicalMix => "classical-mix",
            StateKind::Family => "family",
            StateKind::RandomDensity => "random-density",
            StateKind::RandomPure => "random-pure",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown state kind {s:?}")))
    }

    /// Whether the kind takes a mixing parameter.
    pub fn is_mixture(self) -> bool {
        matches!(
            self,
            StateKind::WernerGhz | StateKind::WGhzMix | StateKind::ClassicalMix
        )
    }
}

/// Description of a generated state. Fields a kind does not use are
/// ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl StateSpec {
    pub fn new(kind: StateKind, n: usize) -> Self {
        StateSpec {
            kind,
            n,
            p: None,
            c: None,
            bits: None,
            seed: None,
            rank: None,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_c(mut self, c: Vec3) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_bits(mut self, bits: &str) -> Self {
        self.bits = Some(bits.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    fn p(&self) -> Result<f64> {
        let p = self
            .p
            .ok_or_else(|| Error::InvalidArgument(format!("{} needs p", self.kind.name())))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} is outside [0, 1]")));
        }
        Ok(p)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            n,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn zero_ket(n: usize) -> Vec<C64> {
    vec![c64(0.0, 0.0); 1 << n]
}

pub fn ghz_ket(n: usize) -> Vec<C64> {
    let mut v = zero_ket(n);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = c64(a, 0.0);
    v[(1 << n) - 1] = c64(a, 0.0);
    v
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_ket(n: usize) -> Vec<C64> {
    let mut v = zero_ket(n);
    let a = 1.0 / (n as f64).sqrt();
    for q in 0..n {
        v[1 << q] = c64(a, 0.0);
    }
    v
}

pub fn plus_ket(n: usize) -> Vec<C64> {
    let a = (1u64 << n) as f64;
    vec![c64(1.0 / a.sqrt(), 0.0); 1 << n]
}

/// `bits[0]` is qubit 0, the most significant factor.
pub fn basis_ket(bits: &str) -> Result<Vec<C64>> {
    let mut idx = 0usize;
    for ch in bits.chars() {
        let b = match ch {
            '0' => 0,
            '1' => 1,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "bit string {bits:?} is not binary"
                )))
            }
        };
        idx = (idx << 1) | b;
    }
    let mut v = zero_ket(bits.len());
    v[idx] = c64(1.0, 0.0);
    Ok(v)
}

fn mix(p: f64, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &a.scale_real(p) + &b.scale_real(1.0 - p)
}

/// `2^-n (I + Σ_j c_j σ_j^{⊗n})` without any positivity check.
pub fn family_matrix(c: &Vec3, n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mut m = ComplexMatrix::identity(dim);
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        let s = pauli(j + 1);
        let string = kron_all(std::iter::repeat_n(&s, n));
        m = &m + &string.scale_real(cj);
    }
    m.scale_real(1.0 / dim as f64)
}

/// Builds the state described by `spec` and checks that it is a valid
/// density matrix.
pub fn make(spec: &StateSpec) -> Result<ComplexMatrix> {
    let n = spec.n;
    check_n(n)?;
    let rho = match spec.kind {
        StateKind::Ghz => ComplexMatrix::outer(&ghz_ket(n)),
        StateKind::W => ComplexMatrix::outer(&w_ket(n)),
        StateKind::PlusProduct => ComplexMatrix::outer(&plus_ket(n)),
        StateKind::BasisProduct => {
            let bits = spec
                .bits
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("basis-product needs bits".into()))?;
            if bits.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "bit string {bits:?} has length {}, expected {n}",
                    bits.len()
                )));
            }
            ComplexMatrix::outer(&basis_ket(bits)?)
        }
        StateKind::WernerGhz => {
            let dim = 1usize << n;
            let mixed = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
            mix(spec.p()?, &ComplexMatrix::outer(&ghz_ket(n)), &mixed)
        }
        StateKind::WGhzMix => mix(
            spec.p()?,
            &ComplexMatrix::outer(&w_ket(n)),
            &ComplexMatrix::outer(&ghz_ket(n)),
        ),
        StateKind::ClassicalMix => mix(
            spec.p()?,
            &ComplexMatrix::outer(&basis_ket(&"0".repeat(n))?),
            &ComplexMatrix::outer(&plus_ket(n)),
        ),
        StateKind::Family => {
            let c = spec
                .c
                .ok_or_else(|| Error::InvalidArgument("family needs c".into()))?;
            if !family_admissible(&c, n) {
                return Err(Error::InvalidArgument(format!(
                    "c = {c:?} does not give a positive semidefinite {n}-qubit state"
                )));
            }
            family_matrix(&c, n)
        }
        StateKind::RandomDensity => {
            let rank = spec.rank.unwrap_or(1 << n);
            random_density(n, rank, spec.seed.unwrap_or(0))?
        }
        StateKind::RandomPure => random_pure(n, spec.seed.unwrap_or(0))?,
    };
    validate_density(&rho)?;
    Ok(rho)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im)
}

/// `G G† / tr(G G†)` for a seeded `2^n × rank` complex Gaussian `G`.
pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    check_n(n)?;
    let dim = 1usize << n;
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<C64> = (0..dim * rank)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let g = ComplexMatrix::from_vec(dim, rank, g)?;
    let ggt = g.matmul(&g.adjoint())?;
    let tr = ggt.trace().re;
    let mut rho = ggt.scale_real(1.0 / tr);
    // exact Hermiticity
    let adj = rho.adjoint();
    rho = (&rho + &adj).scale_real(0.5);
    Ok(rho)
}

/// Projector onto a seeded Haar-random pure state.
pub fn random_pure(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi: Vec<C64> = (0..1usize << n)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    Ok(ComplexMatrix::outer(&psi))
}

/// Haar-random single-qubit unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let a = complex_gaussian(rng);
    let b = complex_gaussian(rng);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    ComplexMatrix::from_rows(&[vec![a, -b.conj() * phase], vec![b, a.conj() * phase]])
}

/// `(u_0 ⊗ … ⊗ u_{n-1}) ρ (u_0 ⊗ … ⊗ u_{n-1})†`.
pub fn apply_local_unitaries(rho: &ComplexMatrix, us: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if !rho.is_square() || rho.rows() != 1 << us.len() {
        return Err(Error::Dimension(format!(
            "{} factors for a {}x{} matrix",
            us.len(),
            rho.rows(),
            rho.cols()
        )));
    }
    for u in us {
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::Dimension("local unitaries must be 2x2".into()));
        }
        let defect = u
            .adjoint()
            .matmul(u)?
            .max_abs_diff(&ComplexMatrix::identity(2));
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "factor is not unitary (|u†u - I| = {defect:e})"
            )));
        }
    }
    let u = kron_all(us);
    u.matmul(rho)?.matmul(&u.adjoint())
}

/// Random tree with independent uniform directions.
pub fn random_tree(n: usize, seed: u64) -> Result<MeasurementTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MeasurementTree::random(n, &mut rng)
}

/// Uniform point on the unit sphere.
pub fn random_direction(seed: u64) -> Vec3 {
    random_unit_vector(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Reorders tensor factors: qubit `k` of the result is qubit `order[k]`
/// of `rho`.
pub fn permute_qubits(rho: &ComplexMatrix, order: &[usize]) -> Result<ComplexMatrix> {
    let n = order.len();
    if !rho.is_square() || rho.rows() != 1 << n {
        return Err(Error::Dimension(format!(
            "order of length {n} for a {}x{} matrix",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut seen = vec![false; n];
    for &q in order {
        if q >= n || seen[q] {
            return Err(Error::InvalidArgument(format!(
                "{order:?} is not a permutation"
            )));
        }
        seen[q] = true;
    }
    let dim = 1usize << n;
    let map = |i: usize| -> usize {
        // bit of new qubit k sits at position n-1-k; it came from old qubit order[k]
        let mut j = 0;
        for (k, &q) in order.iter().enumerate() {
            let bit = (i >> (n - 1 - k)) & 1;
            j |= bit << (n - 1 - q);
        }
        j
    };
    let idx: Vec<usize> = (0..dim).map(map).collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = rho[(idx[r], idx[c])];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, purity};

    fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn ghz_example() {
        let rho = make(&StateSpec::new(StateKind::Ghz, 3)).unwrap();
        for &(r, c) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((rho[(r, c)] - c64(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn werner_zero_is_mixed() {
        let rho = make(&StateSpec::new(StateKind::WernerGhz, 3).with_p(0.0)).unwrap();
        assert!(approx_eq(
            &rho,
            &ComplexMatrix::identity(8).scale_real(0.125),
            1e-15
        ));
    }

    #[test]
    fn family_spectrum() {
        let c = [0.3, -0.4, 0.5];
        let r = (0.5f64).sqrt();
        for n in [3usize, 5] {
            let rho = make(&StateSpec::new(StateKind::Family, n).with_c(c)).unwrap();
            let eig = hermitian_eig(&rho).unwrap();
            let d = (1u64 << n) as f64;
            let half = 1usize << (n - 1);
            for (i, &v) in eig.values.iter().enumerate() {
                let want = if i < half {
                    (1.0 - r) / d
                } else {
                    (1.0 + r) / d
                };
                assert!((v - want).abs() < 1e-12, "n={n} i={i} {v} {want}");
            }
        }
        assert!(make(&StateSpec::new(StateKind::Family, 3).with_c([0.8, 0.8, 0.0])).is_err());
    }

    #[test]
    fn spec_errors() {
        assert!(make(&StateSpec::new(StateKind::WernerGhz, 3)).is_err());
        assert!(make(&StateSpec::new(StateKind::WernerGhz, 3).with_p(1.5)).is_err());
        assert!(make(&StateSpec::new(StateKind::BasisProduct, 3).with_bits("01")).is_err());
        assert!(make(&StateSpec::new(StateKind::BasisProduct, 2).with_bits("0a")).is_err());
        assert!(StateKind::parse("cat").is_err());
        assert_eq!(StateKind::parse("w-ghz-mix").unwrap(), StateKind::WGhzMix);
    }

    #[test]
    fn every_kind_validates() {
        for kind in StateKind::ALL {
            let spec = StateSpec::new(kind, 3)
                .with_p(0.3)
                .with_c([0.2, 0.3, 0.4])
                .with_bits("010")
                .with_seed(5);
            let rho = make(&spec).unwrap();
            validate_density(&rho).unwrap();
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = StateSpec::new(StateKind::WGhzMix, 3).with_p(0.25);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"kind":"w-ghz-mix","n":3,"p":0.25}"#);
        assert_eq!(serde_json::from_str::<StateSpec>(&s).unwrap(), spec);
    }

    #[test]
    fn local_unitary_examples() {
        let zero = make(&StateSpec::new(StateKind::BasisProduct, 3).with_bits("000")).unwrap();
        let id = ComplexMatrix::identity(2);
        let same = apply_local_unitaries(&zero, &[id.clone(), id.clone(), id.clone()]).unwrap();
        assert!(approx_eq(&same, &zero, 1e-15));
        let flipped = apply_local_unitaries(&zero, &[pauli(1), id.clone(), id.clone()]).unwrap();
        let want = make(&StateSpec::new(StateKind::BasisProduct, 3).with_bits("100")).unwrap();
        assert!(approx_eq(&flipped, &want, 1e-15));
        let h = (&pauli(1) + &pauli(3)).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let plus = apply_local_unitaries(&zero, &[h.clone(), h.clone(), h]).unwrap();
        assert!(approx_eq(
            &plus,
            &make(&StateSpec::new(StateKind::PlusProduct, 3)).unwrap(),
            1e-15
        ));
        let bad = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(apply_local_unitaries(&zero, &[bad, id.clone(), id]).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let u = random_unitary(&mut rng);
            assert!(
                u.adjoint()
                    .matmul(&u)
                    .unwrap()
                    .max_abs_diff(&ComplexMatrix::identity(2))
                    < 1e-14
            );
        }
    }

    #[test]
    fn random_density_examples() {
        let pure = random_density(3, 1, 4).unwrap();
        assert!((purity(&pure) - 1.0).abs() < 1e-12);
        let a = random_density(3, 8, 1).unwrap();
        let b = random_density(3, 8, 2).unwrap();
        assert!(a.max_abs_diff(&b) > 0.0);
        assert_eq!(a, random_density(3, 8, 1).unwrap());
        assert!(random_density(2, 5, 0).is_err());
        assert!(random_density(2, 0, 0).is_err());
        validate_density(&a).unwrap();
    }

    #[test]
    fn permutation() {
        let rho = make(&StateSpec::new(StateKind::BasisProduct, 3).with_bits("100")).unwrap();
        let p = permute_qubits(&rho, &[2, 0, 1]).unwrap();
        let want = make(&StateSpec::new(StateKind::BasisProduct, 3).with_bits("010")).unwrap();
        assert!(approx_eq(&p, &want, 0.0 + 1e-15));
        assert!(permute_qubits(&rho, &[0, 0, 1]).is_err());
        let r = random_density(3, 8, 3).unwrap();
        let back = permute_qubits(&permute_qubits(&r, &[1, 2, 0]).unwrap(), &[2, 0, 1]).unwrap();
        assert!(approx_eq(&back, &r, 1e-15));
    }
}
