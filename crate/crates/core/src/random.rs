//! Seedable random streams, Haar sampling and the Hurwitz parameterization
//! of the unitary group.
//!
//! # Rotation order
//!
//! [`hurwitz_unitary`] builds
//!
//! ```text
//! U = L_0 L_1 ... L_{d-2} D
//! L_k = G(d-2, d-1) ... G(k+1, k+2) G(k, k+1)
//! ```
//!
//! where `G(p, p+1)` is the elementary rotation on the coordinate pair
//! `(p, p+1)`
//!
//! ```text
//! [  cos t           -e^{-i phi} sin t ]
//! [  e^{i phi} sin t  cos t            ]
//! ```
//!
//! and `D = diag(e^{i a_0}, ..., e^{i a_{d-1}})`. Angles and phases are stored
//! level by level (`k = 0` first) and, inside a level, pair `(k, k+1)` first.
//! `L_k` only touches coordinates `k..d`, so column `k` of `U` is
//! `e^{i a_k} L_0 ... L_k e_k`, and `L_k e_k` runs through every unit vector
//! of the block `k..d` with a real leading entry.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Basis, CMatrix, StateVector, C64};

/// Deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8, whose 64-bit stream selector gives independent
/// sequences per index from one seed.
#[derive(Clone, Debug)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Child stream seeded from this stream's output.
    pub fn derive(&mut self, index: u64) -> RandomStream {
        let seed = self.rng.next_u64();
        RandomStream::new(seed, index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform variate in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Parameters of one unitary in the Hurwitz form described at module level.
#[derive(Clone, Debug, PartialEq)]
pub struct HurwitzParams {
    dim: usize,
    angles: Vec<f64>,
    phases: Vec<f64>,
    extra_phases: Vec<f64>,
}

impl HurwitzParams {
    /// Number of elementary rotations for dimension `d`.
    pub fn rotation_count(dim: usize) -> usize {
        dim * dim.saturating_sub(1) / 2
    }

    pub fn new(
        dim: usize,
        angles: Vec<f64>,
        phases: Vec<f64>,
        extra_phases: Vec<f64>,
    ) -> Result<Self> {
        let rotations = Self::rotation_count(dim);
        if angles.len() != rotations || phases.len() != rotations || extra_phases.len() != dim {
            return Err(Error::InvalidParameters(format!(
                "d={dim} needs {rotations} angles, {rotations} phases and {dim} extra phases, \
                 got {}, {} and {}",
                angles.len(),
                phases.len(),
                extra_phases.len()
            )));
        }
        if let Some(a) = angles.iter().find(|a| !(0.0..=FRAC_PI_2).contains(*a)) {
            return Err(Error::InvalidParameters(format!(
                "angle {a} outside [0, pi/2]"
            )));
        }
        if let Some(p) = phases
            .iter()
            .chain(&extra_phases)
            .find(|p| !(0.0..TAU).contains(*p))
        {
            return Err(Error::InvalidParameters(format!(
                "phase {p} outside [0, 2pi)"
            )));
        }
        Ok(Self {
            dim,
            angles,
            phases,
            extra_phases,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        let rotations = Self::rotation_count(dim);
        Self {
            dim,
            angles: vec![0.0; rotations],
            phases: vec![0.0; rotations],
            extra_phases: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn extra_phases(&self) -> &[f64] {
        &self.extra_phases
    }

    /// Draws parameters whose image under [`hurwitz_unitary`] is Haar
    /// distributed.
    ///
    /// In level `k` the block has `n = d - k` coordinates and the `m`-th
    /// rotation splits off one of the `n - m` remaining ones. A uniform unit
    /// vector on that sub-sphere has `sin^2 t ~ Beta(n - m - 1, 1)`, so
    /// `t = asin(xi^{1 / (2 (n - m - 1))})` for uniform `xi`.
    pub fn haar_random(dim: usize, rng: &mut RandomStream) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let rotations = Self::rotation_count(dim);
        let mut angles = Vec::with_capacity(rotations);
        let mut phases = Vec::with_capacity(rotations);
        for level in 0..dim - 1 {
            let block = dim - level;
            for m in 0..block - 1 {
                let remaining = (block - m - 1) as f64;
                let xi = rng.uniform();
                let sin_sq = xi.powf(1.0 / remaining);
                angles.push(sin_sq.sqrt().asin().clamp(0.0, FRAC_PI_2));
                phases.push(TAU * rng.uniform());
            }
        }
        let extra_phases = (0..dim).map(|_| TAU * rng.uniform()).collect();
        Ok(Self {
            dim,
            angles,
            phases,
            extra_phases,
        })
    }
}

/// Left-multiplies `m` by the elementary rotation on rows `(p, p + 1)`.
pub(crate) fn rotate_rows(m: &mut CMatrix, p: usize, angle: f64, phase: f64) {
    let (s, c) = angle.sin_cos();
    let e = C64::from_polar(1.0, phase);
    let upper = -e.conj() * s;
    let lower = e * s;
    for col in 0..m.dim() {
        let x = m[(p, col)];
        let y = m[(p + 1, col)];
        m[(p, col)] = x * c + upper * y;
        m[(p + 1, col)] = lower * x + y * c;
    }
}

/// Unitary for the given Hurwitz parameters; see the module docs for the
/// factor order.
pub fn hurwitz_unitary(params: &HurwitzParams) -> Result<Basis> {
    let d = params.dim;
    let rotations = HurwitzParams::rotation_count(d);
    if params.angles.len() != rotations
        || params.phases.len() != rotations
        || params.extra_phases.len() != d
    {
        return Err(Error::InvalidParameters(format!(
            "parameter counts do not match d={d}"
        )));
    }

    let mut m = CMatrix::zeros(d);
    for (i, &a) in params.extra_phases.iter().enumerate() {
        m[(i, i)] = C64::from_polar(1.0, a);
    }

    // Offsets of each level inside the flat parameter lists.
    let mut offsets = Vec::with_capacity(d.saturating_sub(1));
    let mut acc = 0;
    for level in 0..d.saturating_sub(1) {
        offsets.push(acc);
        acc += d - 1 - level;
    }

    // Apply factors right to left: L_{d-2} first, and within L_k the pair
    // (k, k+1) first.
    for level in (0..d.saturating_sub(1)).rev() {
        for (m_idx, p) in (level..d - 1).enumerate() {
            let idx = offsets[level] + m_idx;
            rotate_rows(&mut m, p, params.angles[idx], params.phases[idx]);
        }
    }
    Ok(Basis::from_unitary_unchecked(m))
}

/// Haar-distributed unitary on `C^d`.
pub fn haar_unitary(dim: usize, rng: &mut RandomStream) -> Result<Basis> {
    let params = HurwitzParams::haar_random(dim, rng)?;
    hurwitz_unitary(&params)
}

/// Haar-distributed pure state, phase-canonicalized.
pub fn haar_state(dim: usize, rng: &mut RandomStream) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let amplitudes = (0..dim)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            C64::new(re, im)
        })
        .collect();
    Ok(StateVector::normalized(amplitudes)?.canonicalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters_give_identity() {
        for d in 2..=6 {
            let u = hurwitz_unitary(&HurwitzParams::zeros(d)).unwrap();
            assert_eq!(u.matrix(), &CMatrix::identity(d));
        }
    }

    #[test]
    fn single_real_rotation() {
        let theta: f64 = 0.4;
        let p = HurwitzParams::new(2, vec![theta], vec![0.0], vec![0.0, 0.0]).unwrap();
        let u = hurwitz_unitary(&p).unwrap();
        let m = u.matrix();
        let (s, c) = theta.sin_cos();
        assert!((m[(0, 0)] - C64::new(c, 0.0)).norm() < 1e-15);
        assert!((m[(0, 1)] - C64::new(-s, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - C64::new(c, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parameter_counts_are_checked() {
        assert!(HurwitzParams::new(3, vec![0.0; 2], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(HurwitzParams::new(3, vec![0.0; 3], vec![0.0; 3], vec![0.0; 2]).is_err());
        assert!(HurwitzParams::new(2, vec![2.0], vec![0.0], vec![0.0; 2]).is_err());
        assert!(HurwitzParams::new(2, vec![0.1], vec![7.0], vec![0.0; 2]).is_err());
        assert!(HurwitzParams::new(3, vec![0.1; 3], vec![0.2; 3], vec![0.3; 3]).is_ok());
    }

    #[test]
    fn random_parameters_give_unitaries() {
        let mut rng = RandomStream::new(7, 0);
        for d in 2..=13 {
            for _ in 0..20 {
                let p = HurwitzParams::haar_random(d, &mut rng).unwrap();
                assert_eq!(p.angles().len(), d * (d - 1) / 2);
                assert!(p.angles().iter().all(|a| (0.0..=FRAC_PI_2).contains(a)));
                let u = hurwitz_unitary(&p).unwrap();
                assert!(u.matrix().unitarity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn small_dimensions_are_rejected() {
        let mut rng = RandomStream::new(0, 0);
        assert_eq!(
            haar_unitary(1, &mut rng).unwrap_err(),
            Error::InvalidDimension(1)
        );
        assert_eq!(
            haar_state(0, &mut rng).unwrap_err(),
            Error::InvalidDimension(0)
        );
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let mut a = RandomStream::new(42, 3);
        let mut b = RandomStream::new(42, 3);
        let mut c = RandomStream::new(42, 4);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn haar_unitary_is_repeatable() {
        let u1 = haar_unitary(5, &mut RandomStream::new(9, 11)).unwrap();
        let u2 = haar_unitary(5, &mut RandomStream::new(9, 11)).unwrap();
        assert_eq!(u1, u2);
    }

    #[test]
    fn haar_state_is_normalized() {
        let mut rng = RandomStream::new(1, 1);
        for d in 2..=13 {
            let psi = haar_state(d, &mut rng).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}
