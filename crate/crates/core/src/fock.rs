//! Truncated Fock-space engine: state vectors, density matrices, ladder
//! operators and normally ordered expectation values.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_UPPER_SLACK: f64 = 1e-12;

/// How large a truncated Fock space must be.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Probability mass allowed beyond the truncation.
    pub tail_tol: f64,
    /// Lower clamp on the chosen dimension.
    pub min_dim: usize,
    /// Overrides the tail rule entirely when set.
    pub explicit_dim: Option<usize>,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            min_dim: 16,
            explicit_dim: None,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tol: f64, min_dim: usize, explicit_dim: Option<usize>) -> Result<Self> {
        let p = Self {
            tail_tol,
            min_dim,
            explicit_dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_explicit_dim(self, dim: usize) -> Self {
        Self {
            explicit_dim: Some(dim),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::invalid(format!(
                "tail_tol must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        if self.min_dim < 1 {
            return Err(Error::invalid("min_dim must be at least 1"));
        }
        if self.explicit_dim == Some(0) {
            return Err(Error::invalid("explicit_dim must be at least 1"));
        }
        Ok(())
    }
}

/// Poisson probabilities `p_0, p_1, ...` up to the point where the remaining
/// terms are negligible against `floor`. Computed in the log domain.
pub(crate) fn poisson_pmf_until(mean: f64, floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if mean == 0.0 {
        out.push(1.0);
        return out;
    }
    let ln_mean = mean.ln();
    let mut ln_fact = 0.0;
    let mut n = 0usize;
    loop {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let p = (-mean + n as f64 * ln_mean - ln_fact).exp();
        out.push(p);
        // past the mode the terms decay monotonically
        if n as f64 > mean && p < floor {
            break;
        }
        n += 1;
    }
    out
}

/// Upper tail masses `tail[n] = sum_{m >= n} p_m` of a pmf, summed from the top.
pub(crate) fn tail_sums(pmf: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; pmf.len() + 1];
    for n in (0..pmf.len()).rev() {
        tails[n] = tails[n + 1] + pmf[n];
    }
    tails
}

/// Smallest dimension `N` such that the Poisson(`mean_n`) mass on levels
/// `>= N` is below `policy.tail_tol`, clamped below by `policy.min_dim`.
pub fn choose_dim(mean_n: f64, policy: &TruncationPolicy) -> Result<usize> {
    if !mean_n.is_finite() || mean_n < 0.0 {
        return Err(Error::invalid(format!(
            "mean photon number must be finite and >= 0, got {mean_n}"
        )));
    }
    policy.validate()?;
    if let Some(dim) = policy.explicit_dim {
        return Ok(dim);
    }
    let pmf = poisson_pmf_until(mean_n, policy.tail_tol * 1e-6);
    let tails = tail_sums(&pmf);
    let n = tails
        .iter()
        .position(|&t| t < policy.tail_tol)
        .unwrap_or(pmf.len());
    Ok(n.max(policy.min_dim).max(1))
}

/// Pure state as amplitudes over `|0>, ..., |dim-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("Fock vector needs dim >= 1"));
        }
        Ok(Self { amplitudes })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The number state `|n>` in a space of dimension `dim`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::invalid(format!(
                "basis index {n} out of range for dim {dim}"
            )));
        }
        let mut v = Self::zeros(dim)?;
        v.amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies the phase-space rotation `exp(i chi n)`.
    pub fn rotated(&self, chi: f64) -> FockVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, chi * n as f64))
            .collect();
        FockVector { amplitudes }
    }

    pub fn scaled(&self, s: Complex64) -> FockVector {
        FockVector {
            amplitudes: self.amplitudes.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("dimension mismatch"));
        }
        Ok(FockVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// `a v`, not renormalized. The top entry becomes zero.
pub fn apply_annihilation(v: &FockVector) -> FockVector {
    let c = v.amplitudes();
    let dim = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for n in 0..dim - 1 {
        out[n] = c[n + 1] * ((n + 1) as f64).sqrt();
    }
    FockVector { amplitudes: out }
}

/// `a^dagger v`, not renormalized. Amplitude pushed past `dim - 1` is dropped.
pub fn apply_creation(v: &FockVector) -> FockVector {
    let c = v.amplitudes();
    let dim = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for n in 1..dim {
        out[n] = c[n - 1] * (n as f64).sqrt();
    }
    FockVector { amplitudes: out }
}

/// Mixed state in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validates squareness, Hermiticity (1e-12 absolute) and `0 < trace <= 1 + 1e-12`.
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows == 0 {
            return Err(Error::invalid(format!(
                "density matrix must be square and non-empty, got {rows}x{cols}"
            )));
        }
        for m in 0..rows {
            for n in m..rows {
                let d = (entries[[m, n]] - entries[[n, m]].conj()).norm();
                if !d.is_finite() || d > HERMITIAN_TOL {
                    return Err(Error::invalid(format!(
                        "density matrix is not Hermitian at ({m}, {n}): deviation {d:.3e}"
                    )));
                }
            }
        }
        let rho = Self { entries };
        let tr = rho.trace();
        if !(tr > 0.0 && tr <= 1.0 + TRACE_UPPER_SLACK) {
            return Err(Error::invalid(format!(
                "density matrix trace must lie in (0, 1], got {tr}"
            )));
        }
        Ok(rho)
    }

    /// Skips validation; for matrices Hermitian by construction.
    pub(crate) fn from_entries_unchecked(entries: Array2<Complex64>) -> Self {
        Self { entries }
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Ok(pure_to_density(&FockVector::vacuum(dim)?))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[[m, n]]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().iter().map(|c| c.re).sum()
    }

    /// Photon-number distribution `rho_nn`.
    pub fn populations(&self) -> Vec<f64> {
        self.entries.diag().iter().map(|c| c.re).collect()
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with_pure(&self, psi: &FockVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::invalid("dimension mismatch"));
        }
        let c = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..self.dim() {
            for n in 0..self.dim() {
                acc += c[m].conj() * self.entries[[m, n]] * c[n];
            }
        }
        Ok(acc.re)
    }

    /// `Tr(rho sigma)`.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::invalid("dimension mismatch"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..self.dim() {
            for n in 0..self.dim() {
                acc += self.entries[[m, n]] * other.entries[[n, m]];
            }
        }
        Ok(acc.re)
    }

    /// `exp(i chi n) rho exp(-i chi n)`.
    pub fn rotated(&self, chi: f64) -> DensityMatrix {
        let mut e = self.entries.clone();
        for ((m, n), v) in e.indexed_iter_mut() {
            *v *= Complex64::from_polar(1.0, chi * (m as f64 - n as f64));
        }
        DensityMatrix { entries: e }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::invalid("dimension mismatch"));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `|v><v|`.
pub fn pure_to_density(v: &FockVector) -> DensityMatrix {
    let c = v.amplitudes();
    let dim = c.len();
    let entries = Array2::from_shape_fn((dim, dim), |(m, n)| c[m] * c[n].conj());
    DensityMatrix { entries }
}

/// A single ladder operator in an operator string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Maximum operator-string length supported by [`expectation`].
pub const MAX_OPSTRING: usize = 4;

/// Dense matrix of the truncated operator product `ops[0] ops[1] ... ops[last]`.
pub fn opstring_matrix(ops: &[Ladder], dim: usize) -> Array2<Complex64> {
    let mut o = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    'columns: for col in 0..dim {
        let mut idx = col;
        let mut coef = 1.0;
        for op in ops.iter().rev() {
            match op {
                Ladder::Annihilate => {
                    if idx == 0 {
                        continue 'columns;
                    }
                    coef *= (idx as f64).sqrt();
                    idx -= 1;
                }
                Ladder::Create => {
                    if idx + 1 >= dim {
                        continue 'columns;
                    }
                    coef *= ((idx + 1) as f64).sqrt();
                    idx += 1;
                }
            }
        }
        o[[idx, col]] = Complex64::new(coef, 0.0);
    }
    o
}

/// `Tr(rho O)` for the operator product listed left to right (applied right to left).
pub fn expectation(rho: &DensityMatrix, ops: &[Ladder]) -> Result<Complex64> {
    if ops.len() > MAX_OPSTRING {
        return Err(Error::invalid(format!(
            "operator strings longer than {MAX_OPSTRING} are not supported (got {})",
            ops.len()
        )));
    }
    let dim = rho.dim();
    let o = opstring_matrix(ops, dim);
    let r = rho.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        for n in 0..dim {
            let om = o[[m, n]];
            if om.re != 0.0 {
                acc += r[[n, m]] * om;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Ladder::{Annihilate as A, Create as C};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn coherent(alpha: Complex64, dim: usize) -> FockVector {
        let mut amps = Vec::with_capacity(dim);
        let mut term = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..dim {
            if n > 0 {
                term = term * alpha / (n as f64).sqrt();
            }
            amps.push(term);
        }
        FockVector::new(amps).unwrap()
    }

    /// Independent Poisson tail by direct factorial summation.
    fn brute_tail(mean: f64, from: usize) -> f64 {
        let mut total = 0.0;
        let mut fact = 1.0;
        for n in 0..200usize {
            if n > 0 {
                fact *= n as f64;
            }
            if n >= from {
                total += (-mean).exp() * mean.powi(n as i32) / fact;
            }
        }
        total
    }

    #[test]
    fn choose_dim_vacuum_clamps_to_min_dim() {
        assert_eq!(choose_dim(0.0, &TruncationPolicy::default()).unwrap(), 16);
    }

    #[test]
    fn choose_dim_matches_brute_force_tail() {
        let policy = TruncationPolicy::new(1e-12, 1, None).unwrap();
        let n = choose_dim(1.0, &policy).unwrap();
        // frozen from exact tail summation: first N with tail < 1e-12
        assert_eq!(n, 15);
        assert!(brute_tail(1.0, n) < 1e-12);
        assert!(brute_tail(1.0, n - 1) >= 1e-12);
        assert_eq!(choose_dim(1.0, &TruncationPolicy::default()).unwrap(), 16);
    }

    #[test]
    fn choose_dim_explicit_override() {
        let p = TruncationPolicy::default().with_explicit_dim(50);
        assert_eq!(choose_dim(4.0, &p).unwrap(), 50);
    }

    #[test]
    fn choose_dim_rejects_bad_input() {
        let p = TruncationPolicy::default();
        assert!(matches!(choose_dim(-1.0, &p), Err(Error::InvalidInput(_))));
        assert!(matches!(choose_dim(f64::NAN, &p), Err(Error::InvalidInput(_))));
        assert!(TruncationPolicy::new(0.0, 16, None).is_err());
        assert!(TruncationPolicy::new(1e-12, 0, None).is_err());
    }

    #[test]
    fn ladder_actions_on_basis_states() {
        let dim = 6;
        let vac = FockVector::vacuum(dim).unwrap();
        assert!(apply_annihilation(&vac).norm_sqr() == 0.0);
        let one = FockVector::basis(1, dim).unwrap();
        assert_eq!(apply_annihilation(&one), vac);
        assert_eq!(apply_creation(&vac), one);
        for n in 0..dim - 1 {
            let up = apply_creation(&FockVector::basis(n, dim).unwrap());
            let expect = FockVector::basis(n + 1, dim)
                .unwrap()
                .scaled(c(((n + 1) as f64).sqrt()));
            assert_eq!(up, expect);
        }
        let top = FockVector::basis(dim - 1, dim).unwrap();
        assert_eq!(apply_creation(&top).norm_sqr(), 0.0);
    }

    #[test]
    fn coherent_state_is_annihilation_eigenstate() {
        let alpha = c(0.5);
        let v = coherent(alpha, 30);
        let av = apply_annihilation(&v);
        let diff = av.sub(&v.scaled(alpha)).unwrap();
        assert!(diff.norm_sqr().sqrt() < 1e-12);
    }

    #[test]
    fn creation_matrix_elements() {
        let dim = 8;
        let o = opstring_matrix(&[C], dim);
        for m in 0..dim - 1 {
            for n in 0..dim - 1 {
                let expect = if m == n + 1 { ((n + 1) as f64).sqrt() } else { 0.0 };
                assert_eq!(o[[m, n]], c(expect));
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let alpha = Complex64::new(0.6, -0.8);
        let rho = pure_to_density(&coherent(alpha, 40));
        let n = expectation(&rho, &[C, A]).unwrap();
        assert!((n - c(1.0)).norm() < 1e-12);
        let vac = DensityMatrix::vacuum(10).unwrap();
        for ops in [&[A][..], &[C, A], &[C, C, A, A], &[A, A]] {
            assert_eq!(expectation(&vac, ops).unwrap(), c(0.0));
        }
        let one = pure_to_density(&FockVector::basis(1, 10).unwrap());
        assert_eq!(expectation(&one, &[C, C, A, A]).unwrap(), c(0.0));
        assert!(expectation(&one, &[C, C, A, A, A]).is_err());
    }

    #[test]
    fn pure_to_density_examples() {
        let vac = pure_to_density(&FockVector::vacuum(4).unwrap());
        assert_eq!(vac.get(0, 0), c(1.0));
        assert_eq!(vac.entries().iter().filter(|z| z.norm() > 0.0).count(), 1);
        let v = FockVector::new(vec![c(0.6), Complex64::new(0.0, 0.8), c(0.0)]).unwrap();
        let w = FockVector::new(vec![c(0.8), Complex64::new(0.0, -0.6), c(0.0)]).unwrap();
        assert!(v.inner(&w).unwrap().norm() < 1e-15);
        let (rv, rw) = (pure_to_density(&v), pure_to_density(&w));
        assert!((rv.trace() - v.norm_sqr()).abs() < 1e-15);
        assert!(rv.overlap(&rw).unwrap().abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let mut e = Array2::from_elem((2, 2), c(0.0));
        e[[0, 0]] = c(0.5);
        e[[1, 1]] = c(0.5);
        e[[0, 1]] = Complex64::new(0.1, 0.1);
        e[[1, 0]] = Complex64::new(0.1, 0.1);
        assert!(DensityMatrix::new(e.clone()).is_err());
        e[[1, 0]] = Complex64::new(0.1, -0.1);
        assert!(DensityMatrix::new(e.clone()).is_ok());
        e[[0, 0]] = c(0.9);
        assert!(DensityMatrix::new(e).is_err());
    }

    fn arb_state(dim: usize) -> impl Strategy<Value = FockVector> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(move |xs| {
            let mut amps: Vec<Complex64> = xs.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            // leave the top level empty so the truncated commutator is exact
            amps[dim - 1] = Complex64::new(0.0, 0.0);
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
            FockVector::new(amps.into_iter().map(|z| z / norm).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn commutator_is_identity_below_cutoff(v in arb_state(12)) {
            let aad = apply_annihilation(&apply_creation(&v));
            let ada = apply_creation(&apply_annihilation(&v));
            let comm = aad.sub(&ada).unwrap();
            for (x, y) in comm.amplitudes().iter().zip(v.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
        }

        #[test]
        fn number_expectation_is_real_nonnegative(v in arb_state(10), w in arb_state(10), p in 0.0f64..1.0) {
            let mut e = pure_to_density(&v).into_entries() * Complex64::new(p, 0.0);
            e = e + pure_to_density(&w).into_entries() * Complex64::new(1.0 - p, 0.0);
            let rho = DensityMatrix::new(e).unwrap();
            let n = expectation(&rho, &[C, A]).unwrap();
            prop_assert!(n.im.abs() < 1e-12);
            prop_assert!(n.re >= -1e-10);
        }

        #[test]
        fn choose_dim_monotone(m1 in 0.0f64..30.0, dm in 0.0f64..10.0, e1 in 3.0f64..14.0, de in 0.0f64..2.5) {
            let p = TruncationPolicy::new(10f64.powf(-e1), 1, None).unwrap();
            prop_assert!(choose_dim(m1, &p).unwrap() <= choose_dim(m1 + dm, &p).unwrap());
            let looser = TruncationPolicy::new(10f64.powf(-e1 + de), 1, None).unwrap();
            prop_assert!(choose_dim(m1, &looser).unwrap() <= choose_dim(m1, &p).unwrap());
        }
    }
}
