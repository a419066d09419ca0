//! Dense Hermitian diagonalization, coupling sweeps and avoided-crossing search.

use nalgebra::linalg::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{hermiticity_defect, CMatrix, Operator};
use crate::model::{build_full, ModelConfig, ModelKind};

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues in ascending order; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn eigensystem(op: &Operator) -> Result<EigenSystem> {
    let scale = op.max_abs().max(1.0);
    let defect = hermiticity_defect(op);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::try_new(op.data().clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if order.iter().any(|&i| !eig.eigenvalues[i].is_finite()) {
        return Err(Error::NoConvergence);
    }
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(op.dim(), op.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenSystem { values, vectors })
}

/// Lowest `k_levels` eigenvalues of the selected model at each coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub g_grid: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
    pub model_tag: ModelKind,
}

impl SpectrumSweep {
    pub fn k_levels(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// Gap between levels `k + 1` and `k` at every grid point.
    pub fn gaps(&self, k: usize) -> Vec<f64> {
        self.levels.iter().map(|row| row[k + 1] - row[k]).collect()
    }
}

pub(crate) fn check_grid(g_grid: &[f64]) -> Result<()> {
    if g_grid.is_empty() {
        return Err(Error::InvalidGrid("coupling grid is empty".into()));
    }
    if g_grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidGrid(
            "coupling grid contains non-finite values".into(),
        ));
    }
    Ok(())
}

pub fn sweep_spectrum(
    base: &ModelConfig,
    g_grid: &[f64],
    k_levels: usize,
) -> Result<SpectrumSweep> {
    check_grid(g_grid)?;
    if g_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "coupling grid must be strictly ascending".into(),
        ));
    }
    let dim = 2 * base.n_max();
    if k_levels == 0 || k_levels > dim {
        return Err(Error::InvalidConfig(format!(
            "k_levels must lie in 1..={dim}, got {k_levels}"
        )));
    }
    let levels = g_grid
        .par_iter()
        .map(|&g| {
            let h = build_full(&base.with_g(g)).map_err(|e| e.at(g))?;
            let es = eigensystem(&h.op).map_err(|e| e.at(g))?;
            Ok(es.values[..k_levels].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep {
        g_grid: g_grid.to_vec(),
        levels,
        model_tag: base.kind(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub level_pair: (usize, usize),
    pub g_at_min: f64,
    pub min_gap: f64,
    /// Minimum sits at a grid endpoint, so the gap may keep shrinking outside the sweep.
    pub at_boundary: bool,
}

fn check_pair(sweep: &SpectrumSweep, k: usize) -> Result<()> {
    if sweep.g_grid.len() < 3 {
        return Err(Error::InvalidGrid("need at least 3 grid points".into()));
    }
    if k + 1 >= sweep.k_levels() {
        return Err(Error::InvalidConfig(format!(
            "level pair ({k}, {}) outside the {} swept levels",
            k + 1,
            sweep.k_levels()
        )));
    }
    Ok(())
}

/// Vertex of the parabola through three points, kept inside the bracket.
fn refine(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d12 - d01) / (x[2] - x[0]);
    if curvature.is_nan() || curvature <= 0.0 {
        return (x[1], y[1]);
    }
    // p(t) = y1 + slope·(t − x1) + curvature·(t − x1)²
    let slope = d01 + curvature * (x[1] - x[0]);
    let t = (x[1] - slope / (2.0 * curvature)).clamp(x[0], x[2]);
    let dt = t - x[1];
    let value = y[1] + slope * dt + curvature * dt * dt;
    (t, value.clamp(0.0, y[1]))
}

fn report_at(sweep: &SpectrumSweep, k: usize, gaps: &[f64], i: usize) -> CrossingReport {
    let last = gaps.len() - 1;
    let (g_at_min, min_gap) = if i == 0 || i == last {
        (sweep.g_grid[i], gaps[i].max(0.0))
    } else {
        let g = &sweep.g_grid;
        refine(
            [g[i - 1], g[i], g[i + 1]],
            [gaps[i - 1], gaps[i], gaps[i + 1]],
        )
    };
    CrossingReport {
        level_pair: (k, k + 1),
        g_at_min,
        min_gap,
        at_boundary: i == 0 || i == last,
    }
}

/// Global minimum of the gap between levels `k` and `k + 1`.
pub fn find_avoided_crossings(sweep: &SpectrumSweep, k: usize) -> Result<CrossingReport> {
    check_pair(sweep, k)?;
    let gaps = sweep.gaps(k);
    let i = (0..gaps.len())
        .min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]))
        .expect("non-empty grid");
    Ok(report_at(sweep, k, &gaps, i))
}

/// Every interior local minimum of the gap between levels `k` and `k + 1`.
pub fn gap_minima(sweep: &SpectrumSweep, k: usize) -> Result<Vec<CrossingReport>> {
    check_pair(sweep, k)?;
    let gaps = sweep.gaps(k);
    Ok((1..gaps.len() - 1)
        .filter(|&i| gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1])
        .map(|i| report_at(sweep, k, &gaps, i))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_max: usize,
    pub n_max_doubled: usize,
    /// Largest change among the compared levels.
    pub max_change: f64,
    pub converged: bool,
}

/// Compares the lowest `k` levels at `n_max` and `2·n_max`.
pub fn check_convergence(cfg: &ModelConfig, k: usize, tol: f64) -> Result<ConvergenceReport> {
    let n = cfg.n_max();
    if k == 0 || k > 2 * n {
        return Err(Error::InvalidConfig(format!(
            "cannot compare {k} levels at n_max = {n}"
        )));
    }
    let coarse = eigensystem(&build_full(cfg)?.op)?;
    let fine = eigensystem(&build_full(&cfg.with_n_max(2 * n)?)?.op)?;
    let max_change = coarse.values[..k]
        .iter()
        .zip(&fine.values[..k])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ConvergenceReport {
        n_max: n,
        n_max_doubled: 2 * n,
        max_change,
        converged: max_change < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::FockTruncation;
    use crate::model::{build_rabi, ModelConfig};
    use num_complex::Complex64;

    fn cfg(n_max: usize, omega_0: f64, g: f64, dia: bool) -> ModelConfig {
        ModelConfig {
            omega_c: 1.0,
            omega_0,
            g,
            include_diamagnetic: dia,
            d_override: None,
            trunc: FockTruncation::new(n_max).unwrap(),
        }
    }

    fn assert_eigen_invariants(op: &Operator, es: &EigenSystem) {
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
        let n = op.dim();
        for k in 0..n {
            let v = es.vectors.column(k);
            let residual = (op.data() * v - v * Complex64::new(es.values[k], 0.0)).norm();
            assert!(
                residual <= 1e-9 * (1.0 + es.values[k].abs()),
                "residual {residual}"
            );
        }
        let gram = es.vectors.adjoint() * &es.vectors;
        let off = (gram - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(off <= 1e-9);
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let op = Operator::diagonal(&[3.0, 1.0, 2.0]);
        let es = eigensystem(&op).unwrap();
        assert_eq!(es.values, vec![1.0, 2.0, 3.0]);
        // permutation eigenvectors: value 1 lives on basis state 1
        assert!((es.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((es.vectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((es.vectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let op = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eigensystem(&op), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_hermitian_invariants() {
        let n = 9;
        let raw = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(
                ((i * 7 + j * 3) % 5) as f64 - 2.0,
                ((i * 2 + j * 5) % 7) as f64 - 3.0,
            )
        });
        let herm = &raw + raw.adjoint();
        let op = Operator::new(vec![n], herm).unwrap();
        let es = eigensystem(&op).unwrap();
        assert_eigen_invariants(&op, &es);
        let tr: f64 = es.values.iter().sum();
        assert!((tr - op.trace().re).abs() <= 1e-8 * op.trace().re.abs().max(1.0));
    }

    #[test]
    fn rabi_invariants_and_trace() {
        let h = build_full(&cfg(20, 1.0, 1.3, true)).unwrap();
        let es = eigensystem(&h.op).unwrap();
        assert_eigen_invariants(&h.op, &es);
        let tr: f64 = es.values.iter().sum();
        assert!((tr - h.op.trace().re).abs() <= 1e-8 * h.op.trace().re.abs());
    }

    #[test]
    fn displaced_oscillator_ground_energy() {
        let h = build_rabi(&cfg(40, 0.0, 1.0, false)).unwrap();
        let es = eigensystem(&h.op).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-6, "{}", es.values[0]);
    }

    #[test]
    fn single_point_sweep() {
        let s = sweep_spectrum(&cfg(2, 1.0, 0.0, false), &[0.0], 4).unwrap();
        assert_eq!(s.levels.len(), 1);
        for (got, want) in s.levels[0].iter().zip([-0.5, 0.5, 0.5, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let base = cfg(3, 1.0, 0.0, false);
        assert!(sweep_spectrum(&base, &[], 2).is_err());
        assert!(sweep_spectrum(&base, &[0.5, 0.1], 2).is_err());
        assert!(sweep_spectrum(&base, &[0.1], 7).is_err());
        assert!(sweep_spectrum(&base, &[0.1], 0).is_err());
    }

    #[test]
    fn sweep_error_names_the_coupling() {
        let base = cfg(3, 1.0, 0.0, false);
        let err = sweep_spectrum(&base, &[0.0, 0.5, f64::INFINITY], 2).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        let neg = sweep_spectrum(&base, &[-1.0, 0.5], 2).unwrap_err();
        assert!(matches!(neg, Error::AtCoupling { g, .. } if g == -1.0));
    }

    #[test]
    fn sweep_rows_are_order_independent() {
        let base = cfg(10, 1.0, 0.0, true);
        let grid: Vec<f64> = (0..17).map(|i| i as f64 * 0.15).collect();
        let full = sweep_spectrum(&base, &grid, 6).unwrap();
        for (i, &g) in grid.iter().enumerate().rev() {
            let one = sweep_spectrum(&base, &[g], 6).unwrap();
            assert_eq!(one.levels[0], full.levels[i]);
        }
    }

    #[test]
    fn diamagnetic_shift_is_upward() {
        let grid: Vec<f64> = (0..31).map(|i| i as f64 * 0.1).collect();
        let qrm = sweep_spectrum(&cfg(12, 1.0, 0.0, false), &grid, 24).unwrap();
        let qrma = sweep_spectrum(&cfg(12, 1.0, 0.0, true), &grid, 24).unwrap();
        assert_eq!(qrm.levels[0], qrma.levels[0]);
        for (a, b) in qrm.levels.iter().zip(&qrma.levels) {
            for (x, y) in a.iter().zip(b) {
                assert!(y >= &(x - 1e-10));
            }
        }
    }

    fn two_level_sweep(delta: f64, grid: &[f64]) -> SpectrumSweep {
        // [[g−1, δ], [δ, 1−g]] has eigenvalues ±√((g−1)² + δ²)
        let levels = grid
            .iter()
            .map(|&g| {
                let op = Operator::from_real_rows(&[&[g - 1.0, delta], &[delta, 1.0 - g]]).unwrap();
                eigensystem(&op).unwrap().values
            })
            .collect();
        SpectrumSweep {
            g_grid: grid.to_vec(),
            levels,
            model_tag: ModelKind::Qrm,
        }
    }

    #[test]
    fn synthetic_avoided_crossing() {
        let grid: Vec<f64> = (0..41).map(|i| 0.5 + i as f64 * 0.025).collect();
        let r = find_avoided_crossings(&two_level_sweep(0.05, &grid), 0).unwrap();
        assert!((r.min_gap - 0.1).abs() < 1e-9);
        assert!((r.g_at_min - 1.0).abs() < 1e-9);
        assert!(!r.at_boundary);

        // off-grid minimum: parabolic refinement brings it closer than the grid point
        let grid: Vec<f64> = (0..40).map(|i| 0.513 + i as f64 * 0.025).collect();
        let sweep = two_level_sweep(0.05, &grid);
        let r = find_avoided_crossings(&sweep, 0).unwrap();
        let coarse = sweep.gaps(0).into_iter().fold(f64::INFINITY, f64::min);
        assert!((r.min_gap - 0.1).abs() < (coarse - 0.1).abs());
        assert!((r.g_at_min - 1.0).abs() < 0.0125);
        assert_eq!(gap_minima(&sweep, 0).unwrap().len(), 1);
    }

    #[test]
    fn flat_levels_flag_boundary() {
        let grid = [0.0, 1.0, 2.0, 3.0];
        let sweep = SpectrumSweep {
            g_grid: grid.to_vec(),
            levels: grid.iter().map(|_| vec![0.0, 1.0]).collect(),
            model_tag: ModelKind::Qrm,
        };
        let r = find_avoided_crossings(&sweep, 0).unwrap();
        assert_eq!(r.min_gap, 1.0);
        assert!(r.at_boundary);
        assert!(find_avoided_crossings(&sweep, 1).is_err());
        let short = SpectrumSweep {
            g_grid: vec![0.0, 1.0],
            levels: vec![vec![0.0, 1.0]; 2],
            ..sweep
        };
        assert!(find_avoided_crossings(&short, 0).is_err());
    }

    #[test]
    fn convergence_checker_flags_tiny_basis() {
        let small = check_convergence(&cfg(2, 1.0, 1.0, false), 2, 1e-6).unwrap();
        assert!(!small.converged);
        let big = check_convergence(&cfg(40, 1.0, 1.0, false), 4, 1e-8).unwrap();
        assert!(big.converged, "{big:?}");
        assert_eq!(big.n_max_doubled, 80);
    }
}
