//! Derivative-free coordinate ascent over elementary two-dimensional
//! rotations.
//!
//! The current basis `B` is repeatedly replaced by `B G(p, q; t, phi)`, where
//! `G` rotates columns `p` and `q` by angle `t` with phase `phi` in
//! `{0, pi/2}` (the two real directions of each coordinate pair). Moving one
//! pair only changes two columns, so a trial step costs `O(nu)`.
//!
//! Each coordinate step probes `t = +-delta`, fits a parabola through the
//! three values and tries its vertex; the best improving point is taken and
//! `delta` adapts to the accepted step length.

use std::f64::consts::FRAC_PI_4;

use super::{at_ceiling, bias_entropy, entropy_term, orthonormalized, AdaptionConfig, POLISH_TOL};
use crate::linalg::{dot, Basis, CMatrix, StateVector, C64};

const INITIAL_PROBE: f64 = 0.1;
const MIN_PROBE: f64 = 1e-5;
const MAX_PROBE: f64 = 0.5;

/// Coordinate ascent state for one starting basis.
pub(super) struct CoordinateAscent<'a> {
    measured: &'a [StateVector],
    dim: usize,
    nu: usize,
    basis: CMatrix,
    /// `overlaps[j * nu + k] = <m_k|b_j>`.
    overlaps: Vec<C64>,
    column_entropy: Vec<f64>,
    /// Probe length per (pair, direction) coordinate.
    probes: Vec<f64>,
}

impl<'a> CoordinateAscent<'a> {
    pub(super) fn new(measured: &'a [StateVector], start: Basis) -> Self {
        let basis = start.matrix().clone();
        let dim = basis.dim();
        let nu = measured.len();
        let mut overlaps = Vec::with_capacity(dim * nu);
        for j in 0..dim {
            let b = basis.column(j);
            overlaps.extend(measured.iter().map(|m| dot(m.amplitudes(), b)));
        }
        let column_entropy = (0..dim)
            .map(|j| {
                overlaps[j * nu..(j + 1) * nu]
                    .iter()
                    .map(|z| entropy_term(z.norm_sqr()))
                    .sum()
            })
            .collect();
        let pairs = dim * (dim - 1) / 2;
        Self {
            measured,
            dim,
            nu,
            basis,
            overlaps,
            column_entropy,
            probes: vec![INITIAL_PROBE; 2 * pairs],
        }
    }

    fn entropy(&self) -> f64 {
        self.column_entropy.iter().sum()
    }

    #[inline]
    fn direction(imaginary: bool) -> C64 {
        if imaginary {
            C64::new(0.0, 1.0)
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// New entropies of columns `p` and `q` after rotating by `t`.
    fn trial(&self, p: usize, q: usize, e: C64, t: f64) -> (f64, f64) {
        let (s, c) = t.sin_cos();
        let es = e * s;
        let ecs = e.conj() * s;
        let op = &self.overlaps[p * self.nu..(p + 1) * self.nu];
        let oq = &self.overlaps[q * self.nu..(q + 1) * self.nu];
        let mut hp = 0.0;
        let mut hq = 0.0;
        for (&a, &b) in op.iter().zip(oq) {
            hp += entropy_term((a * c + es * b).norm_sqr());
            hq += entropy_term((b * c - ecs * a).norm_sqr());
        }
        (hp, hq)
    }

    fn gain(&self, p: usize, q: usize, e: C64, t: f64) -> f64 {
        let (hp, hq) = self.trial(p, q, e, t);
        (hp + hq) - (self.column_entropy[p] + self.column_entropy[q])
    }

    /// `b_p <- c b_p + e s b_q`, `b_q <- c b_q - conj(e) s b_p`.
    fn apply(&mut self, p: usize, q: usize, e: C64, t: f64) {
        let (s, c) = t.sin_cos();
        let es = e * s;
        let ecs = e.conj() * s;
        let rotate = |a: &mut C64, b: &mut C64| {
            let (x, y) = (*a, *b);
            *a = x * c + es * y;
            *b = y * c - ecs * x;
        };
        let d = self.dim;
        for r in 0..d {
            let mut x = self.basis[(r, p)];
            let mut y = self.basis[(r, q)];
            rotate(&mut x, &mut y);
            self.basis[(r, p)] = x;
            self.basis[(r, q)] = y;
        }
        let nu = self.nu;
        let (lo, hi) = self.overlaps.split_at_mut(q * nu);
        let op = &mut lo[p * nu..(p + 1) * nu];
        let oq = &mut hi[..nu];
        for (a, b) in op.iter_mut().zip(oq.iter_mut()) {
            rotate(a, b);
        }
        self.column_entropy[p] = op.iter().map(|z| entropy_term(z.norm_sqr())).sum();
        self.column_entropy[q] = oq.iter().map(|z| entropy_term(z.norm_sqr())).sum();
    }

    /// One derivative-free step along a single coordinate; returns the gain.
    fn step(&mut self, coord: usize, p: usize, q: usize, imaginary: bool) -> f64 {
        let e = Self::direction(imaginary);
        let delta = self.probes[coord];
        let g_plus = self.gain(p, q, e, delta);
        let g_minus = self.gain(p, q, e, -delta);

        let mut best_t = 0.0;
        let mut best_gain = 0.0;
        if g_plus > best_gain {
            best_t = delta;
            best_gain = g_plus;
        }
        if g_minus > best_gain {
            best_t = -delta;
            best_gain = g_minus;
        }

        let curvature = (g_plus + g_minus) / (2.0 * delta * delta);
        if curvature < 0.0 {
            let slope = (g_plus - g_minus) / (2.0 * delta);
            let vertex = (-slope / (2.0 * curvature)).clamp(-FRAC_PI_4, FRAC_PI_4);
            if (vertex.abs() - delta).abs() > 1e-3 * delta {
                let g = self.gain(p, q, e, vertex);
                if g > best_gain {
                    best_t = vertex;
                    best_gain = g;
                }
            }
        }

        if best_gain > 0.0 {
            self.apply(p, q, e, best_t);
            self.probes[coord] = best_t.abs().clamp(MIN_PROBE, MAX_PROBE);
            best_gain
        } else {
            self.probes[coord] = (delta * 0.25).max(MIN_PROBE);
            0.0
        }
    }

    pub(super) fn run(mut self, cfg: &AdaptionConfig, ceiling: f64) -> (Basis, f64) {
        let mut h = self.entropy();
        for _ in 0..cfg.max_iterations {
            if at_ceiling(h, ceiling) {
                break;
            }
            let mut coord = 0;
            for p in 0..self.dim {
                for q in (p + 1)..self.dim {
                    self.step(coord, p, q, false);
                    self.step(coord + 1, p, q, true);
                    coord += 2;
                }
            }
            let next = self.entropy();
            let improvement = next - h;
            h = next;
            let tol = if ceiling - h < cfg.unbiasedness_tol {
                POLISH_TOL
            } else {
                cfg.convergence_tol
            };
            if improvement < tol {
                break;
            }
        }
        let basis = orthonormalized(self.basis);
        let h = bias_entropy(self.measured, &basis).expect("dimensions checked");
        (basis, h)
    }
}
