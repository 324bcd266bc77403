//! Pure-state estimate from measurement records: average the measured
//! projectors, then take the eigenvector of the largest eigenvalue.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, CMatrix, DensityMatrix, StateVector, C64};
use crate::measurement::MeasurementRecord;

/// Leading eigenvalues closer than this are treated as a tie.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub state: StateVector,
    /// Largest eigenvalue of the averaged density matrix, which is also the
    /// overlap `<psi_est| rho |psi_est>`.
    pub leading_eigenvalue: f64,
    /// The leading eigenvalue was tied within [`DEGENERACY_GAP`]; `state` is
    /// then the solver's first vector of the tied cluster.
    pub degenerate: bool,
}

/// `(1/nu) sum_k |m_k><m_k|` over the records.
pub fn average_density(records: &[MeasurementRecord]) -> Result<DensityMatrix> {
    let vectors: Vec<&StateVector> = records.iter().map(|r| r.measured_vector()).collect();
    average_of_projectors(&vectors)
}

pub(crate) fn average_of_projectors(vectors: &[&StateVector]) -> Result<DensityMatrix> {
    let first = vectors.first().ok_or(Error::EmptyRecords)?;
    let d = first.dim();
    let weight = 1.0 / vectors.len() as f64;
    let mut acc = CMatrix::zeros(d);
    for v in vectors {
        check_dim(d, v.dim())?;
        let a = v.amplitudes();
        for c in 0..d {
            let bc = a[c].conj() * weight;
            for r in 0..d {
                acc[(r, c)] += a[r] * bc;
            }
        }
    }
    // Exact Hermitian symmetry and real diagonal.
    for c in 0..d {
        acc[(c, c)] = C64::new(acc[(c, c)].re, 0.0);
        for r in 0..c {
            acc[(c, r)] = acc[(r, c)].conj();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(acc))
}

/// Leading eigenvector of `rho_bar`, phase-canonical.
pub fn estimate_state(rho_bar: &DensityMatrix) -> Result<StateVector> {
    Ok(estimate(rho_bar)?.state)
}

/// Like [`estimate_state`] with the eigenvalue and degeneracy diagnostics.
pub fn estimate(rho_bar: &DensityMatrix) -> Result<Estimate> {
    let eig = rho_bar.eigendecomposition()?;
    let leading_eigenvalue = eig.eigenvalues[0];
    let degenerate = eig
        .eigenvalues
        .get(1)
        .is_some_and(|&e1| leading_eigenvalue - e1 < DEGENERACY_GAP);
    let state = eig.eigenvectors.into_iter().next().expect("dim > 0");
    Ok(Estimate {
        state,
        leading_eigenvalue,
        degenerate,
    })
}
