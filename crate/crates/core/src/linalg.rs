//! Dense complex linear algebra for small dimensions.
//!
//! Everything here is sized for d up to a few dozen: matrices are stored
//! column-major in a flat `Vec`, so column `j` of a [`Basis`] is the
//! contiguous slice holding basis vector `|b_j>`.

use std::fmt;

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

const NORM_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;

/// Relative slack used to pick "the first component of largest modulus" so
/// that rounding noise between equal-modulus components cannot flip the
/// phase reference.
const CANONICAL_TIE: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix, column-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for col in 0..dim {
            for row in 0..dim {
                data.push(f(row, col));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |r, c| rows[r][c]))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[StateVector]) -> Result<Self> {
        let dim = columns.len();
        let mut data = Vec::with_capacity(dim * dim);
        for c in columns {
            check_dim(dim, c.dim())?;
            data.extend_from_slice(c.amplitudes());
        }
        Ok(Self { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, col: usize) -> &[C64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub(crate) fn column_mut(&mut self, col: usize) -> &mut [C64] {
        &mut self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for col in 0..n {
            for k in 0..n {
                let b = rhs[(k, col)];
                if b == ZERO {
                    continue;
                }
                let a_col = self.column(k);
                let out_col = &mut out.data[col * n..(col + 1) * n];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.dim, v.len())?;
        let mut out = vec![ZERO; self.dim];
        for (k, &x) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.column(k)) {
                *o += a * x;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - self^H`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for c in 0..self.dim {
            for r in 0..=c {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Largest elementwise modulus of `self^H self - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let g = dot(self.column(i), self.column(j));
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// `<u| M |v>`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        let mv = self.mul_vec(v)?;
        Ok(dot(u, &mv))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (row, col): (usize, usize)) -> &C64 {
        &self.data[col * self.dim + row]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut C64 {
        &mut self.data[col * self.dim + row]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `sum_i conj(a_i) b_i` without length checks.
#[inline]
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pure state of a d-level system.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k>`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// Removes the global phase: the first component of largest modulus is
    /// made real and non-negative.
    pub fn canonicalized(mut self) -> Self {
        canonicalize_phase(&mut self.amplitudes);
        self
    }

    /// Projector `|self><self|`.
    pub fn projector(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        })
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("StateVector[")?;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
        }
        f.write_str("]")
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn canonicalize_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - CANONICAL_TIE))
        .expect("max is attained");
    let p = v[pivot];
    let rot = p.conj() / p.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = C64::new(v[pivot].re.abs(), 0.0);
}

/// `<a|b>`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(dot(&a.amplitudes, &b.amplitudes))
}

/// `|<psi|phi>|^2`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let f = inner_product(psi, phi)?.norm_sqr();
    Ok(f.clamp(0.0, 1.0))
}

/// Orthonormal measurement basis; column `j` is `|b_j>`.
#[derive(Clone, PartialEq)]
pub struct Basis {
    matrix: CMatrix,
}

impl Basis {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let defect = matrix.unitarity_defect();
        if defect.is_nan() || defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_unitary_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(matrix.unitarity_defect() < 1e-8);
        Self { matrix }
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    /// Discrete Fourier basis, `b_j[k] = exp(2 pi i j k / d) / sqrt(d)`.
    pub fn fourier(dim: usize) -> Self {
        let scale = 1.0 / (dim as f64).sqrt();
        let matrix = CMatrix::from_fn(dim, |k, j| {
            let angle = 2.0 * std::f64::consts::PI * ((j * k) % dim) as f64 / dim as f64;
            C64::from_polar(scale, angle)
        });
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> &[C64] {
        self.matrix.column(j)
    }

    /// Basis vector `|b_j>` as a phase-canonical state.
    pub fn vector(&self, j: usize) -> StateVector {
        StateVector::from_raw(self.column(j).to_vec()).canonicalized()
    }

    /// `V * self`, i.e. every basis vector mapped through `V`.
    pub fn rotated_by(&self, v: &Basis) -> Result<Basis> {
        Ok(Basis::from_unitary_unchecked(
            v.matrix.matmul(&self.matrix)?,
        ))
    }

    /// Overlaps `|<b_j|psi>|^2` for every column.
    pub fn overlaps(&self, psi: &StateVector) -> Result<Vec<f64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok((0..self.dim())
            .map(|j| dot(self.column(j), psi.amplitudes()).norm_sqr())
            .collect())
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Basis({:?})", self.matrix)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant, including positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let eig = hermitian_eigendecomposition(&matrix)?;
        let smallest = *eig.eigenvalues.last().expect("dim > 0");
        if smallest < -PSD_TOL {
            return Err(Error::NotPositive(smallest));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `<psi| rho |psi>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.matrix.sandwich(psi.amplitudes(), psi.amplitudes())?.re)
    }

    pub fn eigendecomposition(&self) -> Result<EigenDecomposition> {
        hermitian_eigendecomposition(&self.matrix)
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl EigenDecomposition {
    /// `sum_j e_j |e_j><e_j|`.
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.eigenvalues.len();
        let mut m = CMatrix::zeros(dim);
        for (&e, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let a = v.amplitudes();
            for c in 0..dim {
                let bc = a[c].conj() * e;
                for r in 0..dim {
                    m[(r, c)] += a[r] * bc;
                }
            }
        }
        m
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// if `a` is numerically singular.
pub(crate) fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    let n = a.dim();
    let mut a = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let pivot =
            (k..n).max_by(|&i, &j| a[(i, k)].norm_sqr().total_cmp(&a[(j, k)].norm_sqr()))?;
        if a[(pivot, k)].norm()
            <= f64::EPSILON * a.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
        {
            return None;
        }
        if pivot != k {
            for c in 0..n {
                a.data.swap(c * n + k, c * n + pivot);
                x.data.swap(c * n + k, c * n + pivot);
            }
        }
        let inv = a[(k, k)].inv();
        for r in (k + 1)..n {
            let f = a[(r, k)] * inv;
            if f == ZERO {
                continue;
            }
            for c in k..n {
                let v = a[(k, c)];
                a.data[c * n + r] -= f * v;
            }
            for c in 0..n {
                let v = x[(k, c)];
                x.data[c * n + r] -= f * v;
            }
        }
    }
    for c in 0..n {
        for r in (0..n).rev() {
            let mut acc = x[(r, c)];
            for j in (r + 1)..n {
                acc -= a[(r, j)] * x[(j, c)];
            }
            x.data[c * n + r] = acc / a[(r, r)];
        }
    }
    Some(x)
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Eigenvalues come back in descending order. The sort is stable, so members
/// of a degenerate cluster keep the order in which the sweeps left them on
/// the diagonal; repeated calls on the same input agree bit for bit.
pub fn hermitian_eigendecomposition(h: &CMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let scale = h.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let herm = h.hermiticity_defect();
    if herm > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(herm));
    }

    // Symmetrize so that round-off in the input cannot bias the rotations.
    let mut a = CMatrix::from_fn(n, |r, c| {
        if r == c {
            C64::new(h[(r, r)].re, 0.0)
        } else {
            (h[(r, c)] + h[(c, r)].conj()) * 0.5
        }
    });
    let mut v = CMatrix::identity(n);

    let total: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();
    let threshold = (f64::EPSILON * f64::EPSILON) * total.max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|c| (0..n).filter(move |&r| r != c).map(move |r| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));

    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| StateVector::from_raw(v.column(i).to_vec()).canonicalized())
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilates `a[p][q]` with a unitary plane rotation `G`:
/// `a <- G^H a G`, `v <- v G`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase factor making the pivot real, then a real symmetric rotation.
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G restricted to (p, q): [[c, s], [-s e^{-i alpha}, c e^{-i alpha}]]
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
