//! Wigner quasi-probability distribution of a cavity density matrix.
//!
//! Quadratures follow q = (a + a†)/√2 with ħ = 1, so a point (q, p) maps to the
//! coherent amplitude α = (q + ip)/√2 and the vacuum reads W = exp(−q² − p²)/π.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{ground_state, partial_trace, DensityMatrix, Subsystem};
use crate::error::{Error, Result};
use crate::model::{build_full, ModelConfig};

/// exp(−(q² + p²)) underflows past this squared radius.
const MAX_RADIUS_SQ: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::square(6.0, 201)
    }
}

impl QuadratureGrid {
    /// [−half_width, half_width]² with `points` samples per axis.
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            q_min: -half_width,
            q_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            n_q: points,
            n_p: points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = [self.q_min, self.q_max, self.p_min, self.p_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if !(self.q_min < self.q_max && self.p_min < self.p_max) {
            return Err(Error::InvalidGrid("grid bounds must be ordered".into()));
        }
        if self.n_q < 2 || self.n_p < 2 {
            return Err(Error::InvalidGrid("need at least 2 points per axis".into()));
        }
        let q = self.q_min.abs().max(self.q_max.abs());
        let p = self.p_min.abs().max(self.p_max.abs());
        if q * q + p * p > MAX_RADIUS_SQ {
            return Err(Error::InvalidGrid(format!(
                "corner radius² {} exceeds the evaluation domain ({MAX_RADIUS_SQ})",
                q * q + p * p
            )));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_q - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn q_values(&self) -> Vec<f64> {
        linspace(self.q_min, self.q_max, self.n_q)
    }

    pub fn p_values(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.n_p)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// W sampled on a grid; `values` is row-major with one row per p value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, ip: usize, iq: usize) -> f64 {
        self.values[ip * self.grid.n_q + iq]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Strict interior local maxima as (q, p, W).
    #[allow(clippy::needless_range_loop)]
    pub fn local_maxima(&self) -> Vec<(f64, f64, f64)> {
        let (qs, ps) = (self.grid.q_values(), self.grid.p_values());
        let mut out = Vec::new();
        for ip in 1..self.grid.n_p - 1 {
            for iq in 1..self.grid.n_q - 1 {
                let w = self.at(ip, iq);
                let neighbours = [
                    self.at(ip - 1, iq),
                    self.at(ip + 1, iq),
                    self.at(ip, iq - 1),
                    self.at(ip, iq + 1),
                    self.at(ip - 1, iq - 1),
                    self.at(ip - 1, iq + 1),
                    self.at(ip + 1, iq - 1),
                    self.at(ip + 1, iq + 1),
                ];
                if neighbours.iter().all(|&n| w > n) {
                    out.push((qs[iq], ps[ip], w));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureAxis {
    Q,
    P,
}

fn single_mode(rho: &DensityMatrix) -> Result<usize> {
    match rho.dims() {
        &[n] if n >= 2 => Ok(n),
        dims => Err(Error::DimensionMismatch(format!(
            "Wigner evaluation needs a single-mode cavity state with at least 2 levels, got dims {dims:?}; trace out the qubit first"
        ))),
    }
}

/// W at one phase-space point. The sum over density-matrix diagonals is a
/// polynomial in 2α, evaluated by Horner's rule; each diagonal's inner sum of
/// normalized associated Laguerre terms uses Clenshaw's backward recurrence,
/// which stays accurate for large truncations far from the origin.
fn wigner_point(rho: &DensityMatrix, n: usize, alpha: Complex64) -> f64 {
    let d = rho.data();
    let two_alpha = alpha * 2.0;
    let x = two_alpha.norm_sqr();
    let mut acc = d[(0, n - 1)] * 2.0;
    for l in (0..n - 1).rev() {
        let weight = if l == 0 { 1.0 } else { 2.0 };
        let diagonal = (0..n - l).map(|i| d[(i, i + l)] * weight);
        acc = clenshaw_diagonal(l, x, diagonal) + acc * two_alpha / ((l + 1) as f64).sqrt();
    }
    acc.re * (-0.5 * x).exp() / PI
}

/// Σ_m c_m (−1)^m √(m!/(m+l)!) L_m^l(x) by Clenshaw's recurrence.
fn clenshaw_diagonal(
    l: usize,
    x: f64,
    coeffs: impl DoubleEndedIterator<Item = Complex64> + ExactSizeIterator,
) -> Complex64 {
    let len = coeffs.len();
    let lf = l as f64;
    let mut c = coeffs.rev();
    let (mut y0, mut y1) = match len {
        1 => (c.next().unwrap(), Complex64::new(0.0, 0.0)),
        _ => {
            let last = c.next().unwrap();
            (c.next().unwrap(), last)
        }
    };
    let mut k = len as f64;
    for ci in c {
        k -= 1.0;
        let a = ((k - 1.0) * (lf + k - 1.0) / ((lf + k) * k)).sqrt();
        let b = (lf + 2.0 * k - 1.0 - x) / ((lf + k) * k).sqrt();
        (y0, y1) = (ci - y1 * a, y0 - y1 * b);
    }
    y0 - y1 * (lf + 1.0 - x) / (lf + 1.0).sqrt()
}

/// W(q, p) of a single-mode density matrix at one point.
pub fn wigner_at(rho: &DensityMatrix, q: f64, p: f64) -> Result<f64> {
    let n = single_mode(rho)?;
    if !(q.is_finite() && p.is_finite()) || q * q + p * p > MAX_RADIUS_SQ {
        return Err(Error::InvalidGrid(format!(
            "point ({q}, {p}) outside the evaluation domain"
        )));
    }
    Ok(wigner_point(rho, n, Complex64::new(q, p) / 2f64.sqrt()))
}

pub fn wigner(rho: &DensityMatrix, grid: &QuadratureGrid) -> Result<WignerGrid> {
    let n = single_mode(rho)?;
    grid.validate()?;
    let qs = grid.q_values();
    let ps = grid.p_values();
    let rows: Vec<Vec<f64>> = ps
        .par_iter()
        .map(|&p| {
            qs.iter()
                .map(|&q| wigner_point(rho, n, Complex64::new(q, p) / 2f64.sqrt()))
                .collect()
        })
        .collect();
    Ok(WignerGrid {
        grid: *grid,
        values: rows.concat(),
    })
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, step: f64) -> f64 {
    let last = values.len() - 1;
    values
        .enumerate()
        .map(|(i, v)| if i == 0 || i == last { 0.5 * v } else { v })
        .sum::<f64>()
        * step
}

/// ∫∫ W dq dp by the 2D trapezoid rule.
pub fn wigner_normalization(w: &WignerGrid) -> f64 {
    let q_marginal = wigner_marginal(w, QuadratureAxis::Q);
    trapezoid(q_marginal.into_iter(), w.grid.dq())
}

/// Integrates out the other quadrature: `Q` yields the position density on the q grid.
pub fn wigner_marginal(w: &WignerGrid, axis: QuadratureAxis) -> Vec<f64> {
    let g = &w.grid;
    match axis {
        QuadratureAxis::Q => (0..g.n_q)
            .map(|iq| trapezoid((0..g.n_p).map(|ip| w.at(ip, iq)), g.dp()))
            .collect(),
        QuadratureAxis::P => (0..g.n_p)
            .map(|ip| trapezoid((0..g.n_q).map(|iq| w.at(ip, iq)), g.dq()))
            .collect(),
    }
}

/// Variance of one quadrature, taken from its marginal.
pub fn quadrature_variance(w: &WignerGrid, axis: QuadratureAxis) -> f64 {
    let (xs, step) = match axis {
        QuadratureAxis::Q => (w.grid.q_values(), w.grid.dq()),
        QuadratureAxis::P => (w.grid.p_values(), w.grid.dp()),
    };
    let density = wigner_marginal(w, axis);
    let moment = |k: i32| trapezoid(xs.iter().zip(&density).map(|(x, d)| x.powi(k) * d), step);
    let (m0, m1, m2) = (moment(0), moment(1), moment(2));
    let mean = m1 / m0;
    m2 / m0 - mean * mean
}

/// Build the model, take its ground state, trace out the qubit and evaluate W.
pub fn ground_state_wigner(cfg: &ModelConfig, grid: &QuadratureGrid) -> Result<WignerGrid> {
    let gs = ground_state(&build_full(cfg)?)?;
    let cavity = partial_trace(&gs.state.density_matrix(), Subsystem::Cavity)?;
    wigner(&cavity, grid)
}

/// Fock matrix element ⟨m|D(λ)|n⟩ of the displacement operator (untruncated).
fn displacement_element(m: usize, n: usize, lambda: Complex64, laguerre: &[f64]) -> Complex64 {
    let (lo, hi) = if m >= n { (n, m) } else { (m, n) };
    // √(lo!/hi!)
    let ratio: f64 = (lo + 1..=hi).map(|k| 1.0 / (k as f64).sqrt()).product();
    let base = if m >= n { lambda } else { -lambda.conj() };
    let gauss = (-0.5 * lambda.norm_sqr()).exp();
    base.powu((hi - lo) as u32) * (ratio * gauss * laguerre[lo])
}

/// Generalized Laguerre L_k^{(a)}(x) for k = 0..len.
fn laguerre_series(a: f64, x: f64, len: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if len > 1 {
        out.push(1.0 + a - x);
    }
    for k in 1..len.saturating_sub(1) {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

/// Cross-check route: W from the characteristic function Tr(ρ D(λ)), integrated
/// over a square of half-width `half_width` with `steps` samples per axis.
/// Much slower than [`wigner`]; meant for spot checks.
pub fn wigner_via_characteristic(
    rho: &DensityMatrix,
    q: f64,
    p: f64,
    half_width: f64,
    steps: usize,
) -> Result<f64> {
    let n = single_mode(rho)?;
    if steps < 3 || half_width.is_nan() || half_width <= 0.0 {
        return Err(Error::InvalidGrid(
            "characteristic quadrature needs steps >= 3 and a positive width".into(),
        ));
    }
    let gamma = Complex64::new(q, p) / 2f64.sqrt();
    let axis = linspace(-half_width, half_width, steps);
    let h = axis[1] - axis[0];
    let r = rho.data();

    let total: f64 = axis
        .par_iter()
        .map(|&x| {
            let mut lag = Vec::with_capacity(n);
            let mut acc = 0.0;
            for &y in &axis {
                let lambda = Complex64::new(x, y);
                let x2 = lambda.norm_sqr();
                let mut chi = Complex64::new(0.0, 0.0);
                for d in 0..n {
                    laguerre_series(d as f64, x2, n - d, &mut lag);
                    for lo in 0..n - d {
                        let hi = lo + d;
                        // Tr(ρ D) = Σ ρ_nm D_mn
                        chi += r[(lo, hi)] * displacement_element(hi, lo, lambda, &lag);
                        if d > 0 {
                            chi += r[(hi, lo)] * displacement_element(lo, hi, lambda, &lag);
                        }
                    }
                }
                let kernel = (lambda.conj() * gamma - lambda * gamma.conj()).exp();
                acc += (chi * kernel).re;
            }
            acc
        })
        .sum();
    // W(γ) = (1/π²)∫ C(λ) e^{λ*γ − λγ*} d²λ, and d²γ = dq dp / 2
    Ok(total * h * h / (PI * PI) / 2.0)
}
