//! Limited-memory BFGS ascent on the unitary group.
//!
//! A step moves the basis along the Cayley curve
//! `U <- U (I - t Omega / 2)^-1 (I + t Omega / 2)`, with `Omega`
//! skew-Hermitian and zero on the diagonal (column phases do not change `h`).
//! The curve stays on the unitary group and agrees with `U exp(t Omega)` to
//! first order, at the cost of one small linear solve per trial step. `Omega` is stored as two real
//! coordinates per pair `p < q`:
//!
//! ```text
//! Omega[p][q] = a + i b,   Omega[q][p] = -a + i b
//! ```
//!
//! With `C[k][j] = <m_k|b_j>`, `w = -(ln p + 1)` and `Y = C^H (w o C)`, the
//! directional derivative is `Re <Y - Y^H, Omega>`, so the gradient
//! coordinates are `2 Re g[p][q]` and `2 Im g[p][q]` with `g = Y - Y^H`.
//! Gradients at successive points are compared in these left-trivialized
//! coordinates without further transport.

use std::collections::VecDeque;

use super::{at_ceiling, bias_entropy, entropy_term, orthonormalized, AdaptionConfig, POLISH_TOL};
use crate::linalg::{dot, solve, Basis, CMatrix, StateVector, C64, ONE, ZERO};

const MEMORY: usize = 8;
/// Length of the very first step along the bare gradient.
const INITIAL_STEP: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const GRADIENT_FLOOR: f64 = 1e-12;

/// `h` and its gradient for a fixed set of measured vectors.
pub(crate) struct Landscape<'a> {
    measured: &'a [StateVector],
    dim: usize,
}

impl<'a> Landscape<'a> {
    pub(crate) fn new(measured: &'a [StateVector], dim: usize) -> Self {
        Self { measured, dim }
    }

    fn nu(&self) -> usize {
        self.measured.len()
    }

    /// `[j * nu + k] = <m_k|b_j>`.
    fn overlaps(&self, u: &CMatrix) -> Vec<C64> {
        let mut c = Vec::with_capacity(self.dim * self.nu());
        for j in 0..self.dim {
            let b = u.column(j);
            c.extend(self.measured.iter().map(|m| dot(m.amplitudes(), b)));
        }
        c
    }

    pub(crate) fn value(&self, u: &CMatrix) -> f64 {
        self.overlaps(u)
            .iter()
            .map(|z| entropy_term(z.norm_sqr()))
            .sum()
    }

    pub(crate) fn value_and_gradient(&self, u: &CMatrix) -> (f64, Vec<f64>) {
        let nu = self.nu();
        let d = self.dim;
        let c = self.overlaps(u);
        let mut h = 0.0;
        let weighted: Vec<C64> = c
            .iter()
            .map(|&z| {
                let p = z.norm_sqr();
                if p > 0.0 {
                    let ln = p.ln();
                    h -= p * ln;
                    z * -(ln + 1.0)
                } else {
                    ZERO
                }
            })
            .collect();
        let col = |j: usize| j * nu..(j + 1) * nu;
        let y = |l: usize, j: usize| dot(&c[col(l)], &weighted[col(j)]);

        let mut grad = Vec::with_capacity(d * (d - 1));
        for p in 0..d {
            for q in (p + 1)..d {
                let g = y(p, q) - y(q, p).conj();
                grad.push(2.0 * g.re);
                grad.push(2.0 * g.im);
            }
        }
        (h, grad)
    }
}

/// `Omega` for the given pair coordinates.
pub(crate) fn generator(dim: usize, coords: &[f64]) -> CMatrix {
    let mut omega = CMatrix::zeros(dim);
    let mut i = 0;
    for p in 0..dim {
        for q in (p + 1)..dim {
            let (a, b) = (coords[i], coords[i + 1]);
            omega[(p, q)] = C64::new(a, b);
            omega[(q, p)] = C64::new(-a, b);
            i += 2;
        }
    }
    omega
}

/// `(I - t Omega / 2)^-1 (I + t Omega / 2)`.
fn cayley(omega: &CMatrix, t: f64) -> CMatrix {
    let d = omega.dim();
    let half = C64::new(0.5 * t, 0.0);
    let shifted = |sign: f64| {
        CMatrix::from_fn(d, |r, c| {
            let diag = if r == c { ONE } else { ZERO };
            diag + omega[(r, c)] * half * sign
        })
    };
    solve(&shifted(-1.0), &shifted(1.0))
        .expect("I - t Omega / 2 is invertible for skew-Hermitian Omega")
}

fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot_real(a, a).sqrt()
}

struct CurvaturePair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Two-loop recursion; returns the quasi-Newton ascent direction for
/// gradient `g` of the maximized function.
fn ascent_direction(g: &[f64], history: &VecDeque<CurvaturePair>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for pair in history.iter().rev() {
        let alpha = pair.rho * dot_real(&pair.s, &q);
        for (qi, yi) in q.iter_mut().zip(&pair.y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    if let Some(last) = history.back() {
        let gamma = dot_real(&last.s, &last.y) / dot_real(&last.y, &last.y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for (pair, alpha) in history.iter().zip(alphas.iter().rev()) {
        let beta = pair.rho * dot_real(&pair.y, &q);
        for (qi, si) in q.iter_mut().zip(&pair.s) {
            *qi += (alpha - beta) * si;
        }
    }
    q
}

pub(super) fn run(
    measured: &[StateVector],
    start: Basis,
    cfg: &AdaptionConfig,
    ceiling: f64,
) -> (Basis, f64) {
    let dim = start.dim();
    let land = Landscape::new(measured, dim);
    let mut u = start.matrix().clone();
    let (mut h, mut g) = land.value_and_gradient(&u);
    let mut history: VecDeque<CurvaturePair> = VecDeque::with_capacity(MEMORY);

    for _ in 0..cfg.max_iterations {
        if at_ceiling(h, ceiling) || norm(&g) < GRADIENT_FLOOR {
            break;
        }
        let mut direction = ascent_direction(&g, &history);
        let mut slope = dot_real(&g, &direction);
        if slope.is_nan() || slope <= 0.0 {
            history.clear();
            direction = g.clone();
            slope = dot_real(&g, &g);
        }
        let mut t = if history.is_empty() {
            (INITIAL_STEP / norm(&direction)).min(1.0)
        } else {
            1.0
        };

        let omega = generator(dim, &direction);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = u.matmul(&cayley(&omega, t)).expect("same dimension");
            let value = land.value(&candidate);
            if value >= h + ARMIJO * t * slope {
                accepted = Some(candidate);
                break;
            }
            t *= 0.5;
        }
        let Some(candidate) = accepted else {
            break;
        };

        let (h_new, g_new) = land.value_and_gradient(&candidate);
        let s: Vec<f64> = direction.iter().map(|x| x * t).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy = dot_real(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back(CurvaturePair {
                s,
                y,
                rho: 1.0 / sy,
            });
        }

        let improvement = h_new - h;
        u = candidate;
        h = h_new;
        g = g_new;
        let tol = if ceiling - h < cfg.unbiasedness_tol {
            POLISH_TOL
        } else {
            cfg.convergence_tol
        };
        if improvement < tol {
            break;
        }
    }

    let basis = orthonormalized(u);
    let h = bias_entropy(measured, &basis).expect("dimensions checked");
    (basis, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_state, haar_unitary, RandomStream};

    /// Central finite differences of `h` along each coordinate generator.
    fn numeric_gradient(land: &Landscape, u: &CMatrix, dim: usize) -> Vec<f64> {
        let n = dim * (dim - 1);
        let eps = 1e-6;
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let omega = generator(dim, &e);
                let plus = land.value(&u.matmul(&cayley(&omega, eps)).unwrap());
                let minus = land.value(&u.matmul(&cayley(&omega, -eps)).unwrap());
                (plus - minus) / (2.0 * eps)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RandomStream::new(21, 0);
        for dim in [2, 3, 5] {
            let measured: Vec<StateVector> =
                (0..4).map(|_| haar_state(dim, &mut rng).unwrap()).collect();
            let u = haar_unitary(dim, &mut rng).unwrap();
            let land = Landscape::new(&measured, dim);
            let (h, grad) = land.value_and_gradient(u.matrix());
            assert!((h - bias_entropy(&measured, &u).unwrap()).abs() < 1e-12);
            let numeric = numeric_gradient(&land, u.matrix(), dim);
            for (a, b) in grad.iter().zip(&numeric) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn cayley_curve_is_unitary_with_tangent_omega() {
        let omega = generator(3, &[0.3, -0.2, 0.5, 0.1, -0.7, 0.25]);
        assert!(cayley(&omega, 0.0).max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        assert!(cayley(&omega, 1.7).unitarity_defect() < 1e-12);
        assert!(cayley(&omega, -40.0).unitarity_defect() < 1e-12);
        let eps = 1e-6;
        let slope = CMatrix::from_fn(3, |r, c| {
            (cayley(&omega, eps)[(r, c)] - cayley(&omega, -eps)[(r, c)]) / (2.0 * eps)
        });
        assert!(slope.max_abs_diff(&omega) < 1e-8);
    }

    #[test]
    fn generator_is_skew_hermitian() {
        let omega = generator(
            4,
            &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2],
        );
        let sum = CMatrix::from_fn(4, |r, c| omega[(r, c)] + omega[(c, r)].conj());
        assert!(sum.max_abs_diff(&CMatrix::zeros(4)) < 1e-15);
    }
}
