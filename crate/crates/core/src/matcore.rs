//! Dense complex Hermitian matrix kernel.
//!
//! States are validated once, when a [`DensityMatrix`] is built, and carry
//! their spectral decomposition from then on. Every fractional power used
//! later (τ^α, √σ, ...) is formed from that cached spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::numerics::golden_min;
use crate::{domain, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Max-abs tolerance on M − M†.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a state before clipping to 0.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on |tr ρ − 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exactly 0 in fractional powers.
pub const CLIP_THRESHOLD: f64 = 1e-12;
/// Largest matrix dimension `tensor_power` will build.
pub const MAX_TENSOR_DIM: usize = 4096;

const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 60;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V f(Λ) V†.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            for i in 0..d {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }

    fn finish(mut values: Vec<f64>, mut vectors: CMatrix) -> Self {
        let d = values.len();
        for j in 0..d {
            let mut col = vectors.column_mut(j);
            if let Some(lead) = col.iter().copied().find(|z| z.norm() > 1e-8) {
                let phase = lead.conj() / lead.norm();
                col *= phase;
            }
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        if order.iter().enumerate().any(|(i, &o)| i != o) {
            let sorted_vals: Vec<f64> = order.iter().map(|&o| values[o]).collect();
            let sorted_vecs = CMatrix::from_fn(d, d, |i, j| vectors[(i, order[j])]);
            values = sorted_vals;
            vectors = sorted_vecs;
        }
        SpectralDecomposition {
            eigenvalues: values,
            eigenvectors: vectors,
        }
    }
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn symmetrized(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn decompose(m: &CMatrix) -> SpectralDecomposition {
    let eig = m.clone().symmetric_eigen();
    SpectralDecomposition::finish(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn eigenvalues_only(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

fn real_trace_of_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// A Hermitian matrix, not necessarily positive or normalised.
#[derive(Clone, Debug)]
pub struct HermitianObservable {
    mat: CMatrix,
}

impl HermitianObservable {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] and stores the symmetrised matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        check_square(&mat)?;
        let dev = hermitian_deviation(&mat);
        if !dev.is_finite() || dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            mat: symmetrized(&mat),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self {
            mat: CMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub(crate) fn from_hermitian_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = eigenvalues_only(&self.mat);
        v.sort_by(f64::total_cmp);
        v
    }

    /// Fractional power of the positive part; eigenvalues below
    /// [`CLIP_THRESHOLD`] (including negative ones) map to 0.
    pub fn psd_power(&self, p: f64) -> Result<HermitianObservable> {
        if !(p >= 0.0) || !p.is_finite() {
            return domain(format!("matrix power exponent must be finite and >= 0, got {p}"));
        }
        let spec = decompose(&self.mat);
        Ok(HermitianObservable {
            mat: spec.apply(|x| clipped_pow(x, p)),
        })
    }
}

fn clipped_pow(x: f64, p: f64) -> f64 {
    if x < CLIP_THRESHOLD {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

/// A validated quantum state with its cached spectral decomposition.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: CMatrix,
    spec: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        check_square(&mat)?;
        let dev = hermitian_deviation(&mat);
        if !dev.is_finite() || dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let mat = symmetrized(&mat);
        let tr: f64 = mat.diagonal().iter().map(|z| z.re).sum();
        if (tr - 1.0).abs() >= TRACE_TOL {
            return Err(Error::TraceDeviation(tr - 1.0));
        }
        let mut spec = decompose(&mat);
        let min = spec.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        for v in spec.eigenvalues.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { mat, spec })
    }

    /// Pure state |ψ⟩⟨ψ|; the vector is normalised here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return domain("pure state vector must be nonzero and finite");
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        let d = v.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
    }

    /// Qubit state ½(I + xX + yY + zZ).
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let half = 0.5;
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(half * (1.0 + z), 0.0),
                C64::new(half * x, -half * y),
                C64::new(half * x, half * y),
                C64::new(half * (1.0 - z), 0.0),
            ],
        );
        Self::new(m)
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianObservable::from_real_diagonal(p).into_matrix())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let w = 1.0 / d as f64;
        Self::diagonal(&vec![w; d]).expect("uniform diagonal is a state")
    }

    /// Convex combination w·a + (1−w)·b.
    pub fn mix(w: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return domain(format!("mixing weight {w} outside [0,1]"));
        }
        same_dim(a, b)?;
        Self::new(a.matrix() * C64::new(w, 0.0) + b.matrix() * C64::new(1.0 - w, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spec.eigenvalues
    }

    pub fn as_observable(&self) -> HermitianObservable {
        HermitianObservable::from_hermitian_unchecked(self.mat.clone())
    }

    pub fn purity(&self) -> f64 {
        self.spec.eigenvalues.iter().map(|l| l * l).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.purity() >= 1.0 - tol
    }

    /// U ρ U† for a unitary U (checked to 1e-9).
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(u.nrows(), self.dim()));
        }
        let defect = (u.adjoint() * u - CMatrix::identity(self.dim(), self.dim()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > 1e-9 {
            return domain(format!("conjugating matrix is not unitary (defect {defect:e})"));
        }
        let mat = u * &self.mat * u.adjoint();
        let spec = SpectralDecomposition::finish(
            self.spec.eigenvalues.clone(),
            u * &self.spec.eigenvectors,
        );
        Ok(Self {
            mat: symmetrized(&mat),
            spec,
        })
    }

    /// ρ ⊗ σ, with the spectrum assembled from the factors.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let dim = self.dim() as u128 * other.dim() as u128;
        if dim > MAX_TENSOR_DIM as u128 {
            return Err(Error::Guard {
                what: "tensor product dimension",
                requested: dim,
                limit: MAX_TENSOR_DIM as u128,
            });
        }
        let mat = self.mat.kronecker(&other.mat);
        let vals: Vec<f64> = self
            .spec
            .eigenvalues
            .iter()
            .flat_map(|a| other.spec.eigenvalues.iter().map(move |b| a * b))
            .collect();
        let vecs = self.spec.eigenvectors.kronecker(&other.spec.eigenvectors);
        Ok(Self {
            mat,
            spec: SpectralDecomposition::finish(vals, vecs),
        })
    }

    /// ρ^p from the cached spectrum, with eigenvalues below the clip threshold set to 0.
    fn power_matrix(&self, p: f64) -> CMatrix {
        self.spec.apply(|x| clipped_pow(x, p))
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.dim())
}

/// a·x − b·y as a Hermitian observable.
pub fn weighted_difference(
    a: f64,
    x: &DensityMatrix,
    b: f64,
    y: &DensityMatrix,
) -> Result<HermitianObservable> {
    same_dim(x, y)?;
    Ok(HermitianObservable::from_hermitian_unchecked(
        x.matrix() * C64::new(a, 0.0) - y.matrix() * C64::new(b, 0.0),
    ))
}

pub fn eig_hermitian(m: &HermitianObservable) -> SpectralDecomposition {
    decompose(m.matrix())
}

/// ρ^p for p ≥ 0, with 0^0 := 0 (projection onto the support).
pub fn mat_power(rho: &DensityMatrix, p: f64) -> Result<HermitianObservable> {
    if !(p >= 0.0) || !p.is_finite() {
        return domain(format!("matrix power exponent must be finite and >= 0, got {p}"));
    }
    Ok(HermitianObservable::from_hermitian_unchecked(rho.power_matrix(p)))
}

/// (tr⁺, tr⁻, ‖M‖₁): sums of the positive eigenvalues and of the magnitudes
/// of the negative ones, and their total.
pub fn trace_pos_neg(m: &HermitianObservable) -> (f64, f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for l in eigenvalues_only(m.matrix()) {
        if l > 0.0 {
            plus += l;
        } else {
            minus -= l;
        }
    }
    (plus, minus, plus + minus)
}

pub fn trace_norm(m: &HermitianObservable) -> f64 {
    trace_pos_neg(m).2
}

/// Root fidelity ‖√τ√σ‖₁ = tr√(√τ σ √τ).
pub fn fidelity(tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(tau, sigma)?;
    let x = tau.power_matrix(0.5) * sigma.power_matrix(0.5);
    let f: f64 = x.singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Petz overlap Q_α = tr(τ^α σ^{1−α}) for α ∈ [0,1].
pub fn petz_q(alpha: f64, tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("Petz overlap needs alpha in [0,1], got {alpha}"));
    }
    same_dim(tau, sigma)?;
    Ok(petz_unchecked(alpha, tau, sigma))
}

fn petz_unchecked(alpha: f64, tau: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let a = tau.power_matrix(alpha);
    let b = sigma.power_matrix(1.0 - alpha);
    real_trace_of_product(&a, &b).max(0.0)
}

/// Sandwiched overlap tr[(σ^{(1−α)/2α} τ σ^{(1−α)/2α})^α] for α ∈ (0,1).
pub fn sandwiched_q(alpha: f64, tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("sandwiched overlap needs alpha in (0,1), got {alpha}"));
    }
    same_dim(tau, sigma)?;
    let s = sigma.power_matrix((1.0 - alpha) / (2.0 * alpha));
    // σ^p τ σ^p = X†X with X = √τ σ^p, so its eigenvalues are the squared singular values of X.
    let x = tau.power_matrix(0.5) * s;
    let q = x
        .singular_values()
        .iter()
        .filter(|&&sv| sv > 1e-13)
        .map(|sv| sv.powf(2.0 * alpha))
        .sum::<f64>();
    Ok(q)
}

/// Chernoff overlap min_α Q_α and a minimiser. Ties with α = ½ report ½.
pub fn chernoff_q(tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64)> {
    same_dim(tau, sigma)?;
    let q_half = petz_unchecked(0.5, tau, sigma);
    if q_half <= 1e-300 {
        return Ok((0.0, 0.5));
    }
    let (a, lnq) = golden_min(
        |al| petz_unchecked(al, tau, sigma).max(1e-320).ln(),
        0.0,
        1.0,
        GOLDEN_TOL,
        GOLDEN_MAX_ITER,
    );
    let q = lnq.exp();
    if q_half <= q * (1.0 + 1e-12) {
        Ok((q.min(q_half), 0.5))
    } else {
        Ok((q, a))
    }
}

/// n-fold tensor power, refused when d^n exceeds [`MAX_TENSOR_DIM`].
pub fn tensor_power(rho: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return domain("tensor power needs n >= 1");
    }
    let mut dim: u128 = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(rho.dim() as u128);
        if dim > MAX_TENSOR_DIM as u128 {
            return Err(Error::Guard {
                what: "tensor power dimension",
                requested: dim,
                limit: MAX_TENSOR_DIM as u128,
            });
        }
    }
    let mut out = rho.clone();
    for _ in 1..n {
        out = out.tensor(rho)?;
    }
    Ok(out)
}

/// Pauli matrices and the qubit computational basis, used by examples and tests.
pub mod pauli {
    use super::{CMatrix, C64};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| C64::new(v, 0.0)))
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        )
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0].map(|v| C64::new(v, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_and_pauli_z_spectra() {
        let i2 = HermitianObservable::new(CMatrix::identity(2, 2)).unwrap();
        assert_eq!(eig_hermitian(&i2).eigenvalues, vec![1.0, 1.0]);
        let z = HermitianObservable::new(pauli::z()).unwrap();
        let s = eig_hermitian(&z);
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        // leading entry of every eigenvector is real positive
        for j in 0..2 {
            let lead = s.eigenvectors.column(j).iter().copied().find(|z| z.norm() > 1e-8).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn non_hermitian_names_deviation() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.5), c(0.0), c(1.0)]);
        match HermitianObservable::new(m) {
            Err(Error::NotHermitian(dev)) => assert!((dev - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn density_validation_paths() {
        let bad_trace = CMatrix::from_row_slice(2, 2, &[c(0.6), c(0.0), c(0.0), c(0.6)]);
        let e = DensityMatrix::new(bad_trace).unwrap_err();
        assert!(matches!(e, Error::TraceDeviation(_)));
        assert!(e.to_string().contains("trace deviation"));
        let not_psd = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(matches!(DensityMatrix::new(not_psd), Err(Error::NotPsd(_))));
        let tiny_negative =
            CMatrix::from_row_slice(2, 2, &[c(1.0 + 5e-11), c(0.0), c(0.0), c(-5e-11)]);
        let rho = DensityMatrix::new(tiny_negative).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
    }

    #[test]
    fn mat_power_examples() {
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let r1 = mat_power(&rho, 1.0).unwrap();
        assert!(max_abs(&(r1.matrix() - rho.matrix())) < 1e-15);
        let half = mat_power(&rho, 0.5).unwrap();
        assert!((half.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((half.matrix()[(1, 1)].re - 0.75f64.sqrt()).abs() < 1e-15);
        let proj = DensityMatrix::pure(&[c(1.0), C64::new(0.0, 1.0)]).unwrap();
        let p = mat_power(&proj, 0.37).unwrap();
        assert!(max_abs(&(p.matrix() - proj.matrix())) < 1e-12);
        let zero_pow = mat_power(&DensityMatrix::diagonal(&[1.0, 0.0]).unwrap(), 0.0).unwrap();
        assert_eq!(zero_pow.matrix()[(1, 1)].re, 0.0);
        assert!(mat_power(&rho, -0.1).is_err());
    }

    #[test]
    fn trace_pos_neg_examples() {
        let zero = HermitianObservable::from_real_diagonal(&[0.0, 0.0]);
        assert_eq!(trace_pos_neg(&zero), (0.0, 0.0, 0.0));
        let d = HermitianObservable::from_real_diagonal(&[0.5, -0.5]);
        assert_eq!(trace_pos_neg(&d), (0.5, 0.5, 1.0));
        let t0 = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
        let t1 = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        let m = weighted_difference(0.5, &t0, 0.5, &t1).unwrap();
        // eigenvalues of ½(Z − X)/2 are ±√2/4
        assert!((trace_norm(&m) - 2f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let a = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
        let b = DensityMatrix::from_bloch(1.0 / 2f64.sqrt(), 0.0, 1.0 / 2f64.sqrt()).unwrap();
        let f = fidelity(&a, &b).unwrap();
        // |⟨0|cos(π/8)|0⟩ + sin(π/8)|1⟩| = cos(π/8)
        assert!((f - (std::f64::consts::PI / 8.0).cos()).abs() < 1e-12);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let one = DensityMatrix::from_bloch(0.0, 0.0, -1.0).unwrap();
        assert!(fidelity(&a, &one).unwrap() < 1e-12);
    }

    #[test]
    fn petz_examples() {
        let t = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let s = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        let q = petz_q(0.5, &t, &s).unwrap();
        assert!((q - (0.18f64.sqrt() + 0.28f64.sqrt())).abs() < 1e-14);
        assert!((petz_q(0.3, &t, &t).unwrap() - 1.0).abs() < 1e-13);
        assert!(petz_q(1.2, &t, &s).is_err());
        let a = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
        let b = DensityMatrix::from_bloch(0.6, 0.0, 0.8).unwrap();
        let f2 = fidelity(&a, &b).unwrap().powi(2);
        for al in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((petz_q(al, &a, &b).unwrap() - f2).abs() < 1e-12);
        }
    }

    #[test]
    fn sandwiched_examples() {
        let t = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let s = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        for al in [0.2, 0.5, 0.8] {
            let a = sandwiched_q(al, &t, &s).unwrap();
            let b = petz_q(al, &t, &s).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        assert!((sandwiched_q(0.4, &t, &t).unwrap() - 1.0).abs() < 1e-12);
        assert!(sandwiched_q(0.0, &t, &s).is_err());
        assert!(sandwiched_q(1.0, &t, &s).is_err());
    }

    #[test]
    fn chernoff_examples() {
        let t = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let s = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let (q, a) = chernoff_q(&t, &s).unwrap();
        assert_eq!(a, 0.5);
        assert!((q - 2.0 * 0.21f64.sqrt()).abs() < 1e-12);
        let (q, a) = chernoff_q(&t, &t).unwrap();
        assert_eq!(a, 0.5);
        assert!((q - 1.0).abs() < 1e-12);
        let p0 = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
        let p1 = DensityMatrix::from_bloch(0.0, 0.0, -1.0).unwrap();
        assert_eq!(chernoff_q(&p0, &p1).unwrap(), (0.0, 0.5));
        let pb = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        let (q, a) = chernoff_q(&p0, &pb).unwrap();
        assert_eq!(a, 0.5);
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tensor_power_examples() {
        let p = 0.3;
        let rho = DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap();
        let r2 = tensor_power(&rho, 2).unwrap();
        let want = [p * p, p * (1.0 - p), (1.0 - p) * p, (1.0 - p) * (1.0 - p)];
        for (i, w) in want.iter().enumerate() {
            assert!((r2.matrix()[(i, i)].re - w).abs() < 1e-15);
        }
        let r1 = tensor_power(&rho, 1).unwrap();
        assert!(max_abs(&(r1.matrix() - rho.matrix())) == 0.0);
        let big = DensityMatrix::maximally_mixed(4);
        match tensor_power(&big, 7) {
            Err(Error::Guard { limit, .. }) => assert_eq!(limit, 4096),
            other => panic!("unexpected {other:?}"),
        }
        assert!(tensor_power(&big, 6).is_ok());
    }

    #[test]
    fn tensor_spectrum_matches_direct() {
        let a = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let b = DensityMatrix::from_bloch(-0.1, 0.6, 0.2).unwrap();
        let ab = a.tensor(&b).unwrap();
        let direct = DensityMatrix::new(ab.matrix().clone()).unwrap();
        for (x, y) in ab.eigenvalues().iter().zip(direct.eigenvalues()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(max_abs(&(ab.spectrum().reconstruct() - ab.matrix())) < 1e-14);
    }
}
