//! Least-bias choice of the next measurement basis.
//!
//! The bias functional is
//!
//! ```text
//! h = - sum_j sum_k |<m_k|b_j>|^2 ln |<m_k|b_j>|^2
//! ```
//!
//! over the vectors `m_k` found so far and the candidate basis `b_j`. Each
//! measured vector contributes the Shannon entropy of its outcome
//! distribution in the candidate basis, so `h <= nu ln d`, with equality
//! exactly when the basis is unbiased (all overlaps `1/d`) with respect to
//! every measured vector.
//!
//! # Search
//!
//! [`adapt_basis`] maximizes `h` over the unitary group from several starting
//! bases. Column phases are never touched since `h` does not depend on them,
//! leaving the `d (d - 1)` real directions of the elementary two-dimensional
//! rotations. Two local methods are available through [`SearchMethod`]:
//!
//! - [`SearchMethod::QuasiNewton`] (default): limited-memory BFGS with the
//!   analytic gradient of `h`, stepping along Cayley curves in the group.
//! - [`SearchMethod::CoordinateSearch`]: derivative-free coordinate ascent,
//!   one elementary rotation at a time.
//!
//! A start stops when an iteration (a step, or a full sweep for coordinate
//! search) gains less than `convergence_tol`, or after `max_iterations`. A
//! start that gets within `unbiasedness_tol` of the analytic maximum
//! `nu ln d` is polished to a much tighter tolerance instead, because the
//! overlaps only approach `1/d` like the square root of the remaining gap.

mod coordinate;
mod quasi_newton;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, Basis, CMatrix, StateVector, C64};
use crate::random::{haar_unitary, RandomStream};

/// Once `h` is within `unbiasedness_tol` of `nu ln d` the start is polished
/// until it gains less than this per iteration or sits this close to the
/// ceiling.
pub(crate) const POLISH_TOL: f64 = 1e-13;

/// Local ascent used from each starting basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    #[default]
    QuasiNewton,
    CoordinateSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptionConfig {
    /// Haar-random starting points per adaption, in addition to the warm start.
    pub restarts: usize,
    /// Maximum iterations per starting point.
    pub max_iterations: usize,
    /// A start stops once an iteration improves `h` by less than this.
    pub convergence_tol: f64,
    /// Overlap tolerance used when reporting whether a basis is unbiased.
    pub unbiasedness_tol: f64,
    #[serde(default)]
    pub search: SearchMethod,
}

impl Default for AdaptionConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 2000,
            convergence_tol: 1e-6,
            unbiasedness_tol: 1e-3,
            search: SearchMethod::default(),
        }
    }
}

impl AdaptionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol < 1.0) {
            return Err(Error::InvalidConfig(
                "convergence_tol must lie in (0, 1)".into(),
            ));
        }
        if self.unbiasedness_tol.is_nan() || self.unbiasedness_tol <= 0.0 {
            return Err(Error::InvalidConfig(
                "unbiasedness_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedBasis {
    pub basis: Basis,
    /// `h` of `basis` with respect to the measured vectors.
    pub entropy: f64,
    /// Every overlap is within `unbiasedness_tol` of `1/d`.
    pub unbiased: bool,
}

#[inline]
pub(crate) fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn check_measured(measured: &[StateVector], dim: usize) -> Result<()> {
    measured.iter().try_for_each(|m| check_dim(dim, m.dim()))
}

/// Bias functional `h` of `basis` with respect to `measured` (`0 ln 0 = 0`).
pub fn bias_entropy(measured: &[StateVector], basis: &Basis) -> Result<f64> {
    check_measured(measured, basis.dim())?;
    let mut h = 0.0;
    for j in 0..basis.dim() {
        let b = basis.column(j);
        for m in measured {
            h += entropy_term(dot(m.amplitudes(), b).norm_sqr());
        }
    }
    Ok(h)
}

/// Analytic maximum `nu ln d` of [`bias_entropy`].
pub fn max_bias_entropy(nu: usize, dim: usize) -> f64 {
    nu as f64 * (dim as f64).ln()
}

/// Whether every cross overlap `|<a_i|b_j>|^2` is within `tol` of `1/d`.
pub fn is_unbiased(a: &Basis, b: &Basis, tol: f64) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    let target = 1.0 / a.dim() as f64;
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            if (dot(a.column(i), b.column(j)).norm_sqr() - target).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `basis` is unbiased with respect to each measured vector.
pub fn is_unbiased_to(measured: &[StateVector], basis: &Basis, tol: f64) -> Result<bool> {
    check_measured(measured, basis.dim())?;
    let target = 1.0 / basis.dim() as f64;
    Ok(measured.iter().all(|m| {
        (0..basis.dim())
            .all(|j| (dot(m.amplitudes(), basis.column(j)).norm_sqr() - target).abs() <= tol)
    }))
}

/// Picks the basis for the next measurement in dimension `dim`.
///
/// With no measured vectors this is the computational basis. Otherwise the
/// ascent runs from `warm_start` (if any) and from `cfg.restarts` Haar-random
/// bases, each drawn from its own stream derived from `rng`, and the best
/// result wins; ties keep the earliest start. Once a start has been polished
/// onto the analytic maximum the remaining starts are skipped.
pub fn adapt_basis(
    dim: usize,
    measured: &[StateVector],
    warm_start: Option<&Basis>,
    cfg: &AdaptionConfig,
    rng: &mut RandomStream,
) -> Result<AdaptedBasis> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    cfg.validate()?;
    check_measured(measured, dim)?;
    if measured.is_empty() {
        return Ok(AdaptedBasis {
            basis: Basis::computational(dim),
            entropy: 0.0,
            unbiased: false,
        });
    }
    if let Some(w) = warm_start {
        check_dim(dim, w.dim())?;
    }
    let ceiling = max_bias_entropy(measured.len(), dim);

    let mut best: Option<(Basis, f64)> = None;
    let mut consider = |start: Basis| -> bool {
        let (basis, h) = match cfg.search {
            SearchMethod::QuasiNewton => quasi_newton::run(measured, start, cfg, ceiling),
            SearchMethod::CoordinateSearch => {
                coordinate::CoordinateAscent::new(measured, start).run(cfg, ceiling)
            }
        };
        if best.as_ref().is_none_or(|(_, bh)| h > *bh) {
            best = Some((basis, h));
        }
        best.as_ref()
            .is_some_and(|(_, bh)| at_ceiling(*bh, ceiling))
    };

    let mut saturated = warm_start.is_some_and(|w| consider(w.clone()));
    for restart in 0..cfg.restarts {
        if saturated {
            break;
        }
        let mut stream = rng.derive(restart as u64);
        saturated = consider(haar_unitary(dim, &mut stream)?);
    }

    let (basis, entropy) = best.expect("at least one start");
    let unbiased = is_unbiased_to(measured, &basis, cfg.unbiasedness_tol)?;
    Ok(AdaptedBasis {
        basis,
        entropy,
        unbiased,
    })
}

pub(crate) fn at_ceiling(h: f64, ceiling: f64) -> bool {
    ceiling - h < POLISH_TOL * ceiling.max(1.0)
}

/// Modified Gram-Schmidt on the columns, removing accumulated drift.
pub(crate) fn orthonormalized(mut m: CMatrix) -> Basis {
    let d = m.dim();
    for j in 0..d {
        for i in 0..j {
            let proj = dot(m.column(i), m.column(j));
            let bi: Vec<C64> = m.column(i).to_vec();
            for (x, b) in m.column_mut(j).iter_mut().zip(&bi) {
                *x -= b * proj;
            }
        }
        let norm = m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in m.column_mut(j) {
            *x /= norm;
        }
    }
    Basis::from_unitary_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::haar_state;

    fn hadamard() -> Basis {
        Basis::new(
            CMatrix::from_columns(&[
                StateVector::from_real(&[1.0, 1.0]).unwrap(),
                StateVector::from_real(&[1.0, -1.0]).unwrap(),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_measurement_set_has_zero_entropy() {
        assert_eq!(bias_entropy(&[], &Basis::fourier(4)).unwrap(), 0.0);
    }

    #[test]
    fn unbiased_basis_reaches_maximum() {
        for d in 2..=7 {
            let measured: Vec<StateVector> =
                (0..d).map(|k| StateVector::basis_state(d, k)).collect();
            let h = bias_entropy(&measured, &Basis::fourier(d)).unwrap();
            assert!((h - max_bias_entropy(d, d)).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_column_contributes_nothing() {
        let basis = Basis::fourier(3);
        let h = bias_entropy(&[basis.vector(1)], &basis).unwrap();
        assert!(h.abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let m = vec![StateVector::basis_state(3, 0)];
        assert!(bias_entropy(&m, &Basis::computational(2)).is_err());
        assert!(is_unbiased(&Basis::computational(2), &Basis::computational(3), 1e-3).is_err());
    }

    #[test]
    fn unbiasedness_examples() {
        for d in 2..=8 {
            assert!(is_unbiased(&Basis::computational(d), &Basis::fourier(d), 1e-12).unwrap());
            assert!(!is_unbiased(&Basis::fourier(d), &Basis::fourier(d), 1e-3).unwrap());
        }
        assert!(is_unbiased(&Basis::computational(2), &hadamard(), 1e-12).unwrap());
    }

    #[test]
    fn first_basis_is_computational() {
        let mut rng = RandomStream::new(0, 0);
        let a = adapt_basis(5, &[], None, &AdaptionConfig::default(), &mut rng).unwrap();
        assert_eq!(a.basis, Basis::computational(5));
        assert_eq!(a.entropy, 0.0);
        assert!(adapt_basis(1, &[], None, &AdaptionConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn qubit_forced_maximum() {
        let measured = vec![StateVector::basis_state(2, 0)];
        let mut rng = RandomStream::new(1, 0);
        let out = adapt_basis(
            2,
            &measured,
            Some(&Basis::computational(2)),
            &AdaptionConfig::default(),
            &mut rng,
        )
        .unwrap();
        for p in out.basis.overlaps(&measured[0]).unwrap() {
            assert!((p - 0.5).abs() < 1e-6, "{p}");
        }
        assert!(out.basis.matrix().unitarity_defect() < 1e-12);
    }

    #[test]
    fn warm_start_never_degrades() {
        let mut rng = RandomStream::new(2, 0);
        let measured: Vec<StateVector> = (0..6).map(|_| haar_state(4, &mut rng).unwrap()).collect();
        let warm = haar_unitary(4, &mut rng).unwrap();
        let h0 = bias_entropy(&measured, &warm).unwrap();
        let out = adapt_basis(
            4,
            &measured,
            Some(&warm),
            &AdaptionConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(out.entropy >= h0 - 1e-12);
        assert!((out.entropy - bias_entropy(&measured, &out.basis).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = AdaptionConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.restarts = 0;
        assert!(cfg.validate().is_err());
        let cfg = AdaptionConfig {
            convergence_tol: 1.5,
            ..AdaptionConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
