//! Floating-point cross-checks of the exact derivation: spectra from
//! dense diagonalization, explicit conjugation by the exponentiated
//! generators, and the scaling of the band error with the hopping
//! strength.

use nalgebra::DMatrix;
use num::BigRational;
use serde::Serialize;

use crate::engine::{derive, Derivation, EngineError};
use crate::fock::SparseOperator;
use crate::lattice::Shape;
use crate::models::Model;
use crate::par;
use crate::scalar::ScalarError;

#[derive(Debug, thiserror::Error)]
pub enum ValidateError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("operator is not Hermitian at the given parameters (defect {0:.3e})")]
    NotHermitian(f64),
}

/// Dense numeric matrix of a symbolic operator at explicit parameter
/// values, ordered as in the operator's symbol table.
pub fn to_dense(op: &SparseOperator, values: &[BigRational]) -> Result<DMatrix<f64>, ScalarError> {
    let mut m = DMatrix::zeros(op.rows, op.cols);
    for (&(r, c), v) in op.entries() {
        m[(r as usize, c as usize)] = v.to_f64(values)?;
    }
    Ok(m)
}

/// Exponential by scaling and squaring with a Taylor tail; the scaled
/// norm stays below 1/2, so twenty terms reach machine precision.
pub fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let norm = m
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let k = if norm <= 0.5 {
        0
    } else {
        (norm / 0.5).log2().ceil() as i32
    };
    let scaled = m / 2f64.powi(k);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for j in 1..=20 {
        term = &term * &scaled / j as f64;
        sum += &term;
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    sum
}

fn hermiticity_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitarityWitness {
    pub dim: usize,
    /// Largest entry of `U U^T - 1`.
    pub orthogonality_error: f64,
    /// Largest eigenvalue shift between the Hamiltonian and its numeric
    /// conjugation, relative to the spectral scale.
    pub spectrum_error: f64,
}

/// Exponentiates the generators at explicit parameters and verifies
/// that their product is orthogonal and preserves the spectrum.
pub fn unitarity_witness(
    d: &Derivation,
    values: &[BigRational],
) -> Result<UnitarityWitness, ValidateError> {
    let h_sym = d.model.hamiltonian(&d.cluster, &d.basis);
    let h = to_dense(&h_sym, values)?;
    let defect = hermiticity_defect(&h);
    let scale = h.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if defect > 1e-12 * scale {
        return Err(ValidateError::NotHermitian(defect));
    }

    let n = h.nrows();
    let mut u = DMatrix::identity(n, n);
    for s in &d.generators {
        u = matrix_exp(&to_dense(s, values)?) * u;
    }
    let orthogonality_error = (&u * u.transpose() - DMatrix::identity(n, n))
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);

    let conjugated = &u * &h * u.transpose();
    let before = symmetric_spectrum(&h);
    let after = symmetric_spectrum(&conjugated);
    let spectrum_error = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;

    Ok(UnitarityWitness {
        dim: n,
        orthogonality_error,
        spectrum_error,
    })
}

/// Numeric matrix of the effective interaction restricted to the ground
/// configurations.
pub fn ground_submatrix(
    d: &Derivation,
    values: &[BigRational],
) -> Result<DMatrix<f64>, ScalarError> {
    let block = d.ground_block();
    let all: Vec<usize> = (0..d.cluster.n_sites()).collect();
    let members: Vec<u32> = (0..d.basis.dim() as u32)
        .filter(|&i| d.model.all_ground(&d.cluster, d.basis.mask(i), &all))
        .collect();
    let m = members.len();
    let mut out = DMatrix::zeros(m, m);
    for (i, &r) in members.iter().enumerate() {
        for (j, &c) in members.iter().enumerate() {
            out[(i, j)] = block.get(r, c).to_f64(values)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BandComparison {
    /// Lowest eigenvalue of the full Hamiltonian in the sector.
    pub exact_energy: f64,
    /// Lowest eigenvalue of the effective interaction on the ground
    /// configurations.
    pub effective_energy: f64,
    pub band_error: f64,
}

/// Compares the bottom of the exact spectrum with the effective table's
/// prediction at explicit parameters.
pub fn band_comparison(
    model: &Model,
    shape: Shape,
    order: u32,
    values: &[BigRational],
) -> Result<BandComparison, ValidateError> {
    let cluster = model.cluster(shape);
    let d = derive(model, &cluster, order, 2 * order)?;
    let h = to_dense(&d.model.hamiltonian(&d.cluster, &d.basis), values)?;
    let exact = symmetric_spectrum(&h)[0];
    let effective = symmetric_spectrum(&ground_submatrix(&d, values)?)[0];
    Ok(BandComparison {
        exact_energy: exact,
        effective_energy: effective,
        band_error: (exact - effective).abs(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub hopping: f64,
    pub exact_energy: f64,
    pub effective_energy: f64,
    pub band_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingStudy {
    pub order: u32,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `log(band_error)` against `log(hopping)`.
    pub slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

/// Runs `band_comparison` over a ladder of hopping strengths and fits
/// the decay rate of the band error.  `values_at` maps one hopping value
/// to the full parameter vector.
pub fn scaling_study<F>(
    model: &Model,
    shape: Shape,
    order: u32,
    hoppings: &[BigRational],
    values_at: F,
) -> Result<ScalingStudy, ValidateError>
where
    F: Fn(&BigRational) -> Vec<BigRational> + Sync,
{
    let results = par::map_collect(hoppings.to_vec(), |t| {
        let values = values_at(&t);
        band_comparison(model, shape, order, &values).map(|c| ScalingPoint {
            hopping: rational_to_f64(&t),
            exact_energy: c.exact_energy,
            effective_energy: c.effective_energy,
            band_error: c.band_error,
        })
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    let slope = log_log_slope(
        &points
            .iter()
            .map(|p| (p.hopping, p.band_error))
            .collect::<Vec<_>>(),
    );
    Ok(ScalingStudy {
        order,
        points,
        slope,
    })
}

fn rational_to_f64(v: &BigRational) -> f64 {
    use num::ToPrimitive;
    v.to_f64().expect("rational out of f64 range")
}
