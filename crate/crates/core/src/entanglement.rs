//! Ground states, partial traces and qubit–cavity entanglement entropy.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{hermiticity_defect, CMatrix, Operator};
use crate::model::{build_full, Hamiltonian, ModelConfig, ModelKind};
use crate::spectra::{check_grid, eigensystem};

const NORM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues in [−CLAMP_TOL, 0) are treated as roundoff.
const CLAMP_TOL: f64 = 1e-10;
/// Anything more negative than this is a broken input.
const NEGATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    Qubit,
    Cavity,
}

/// Normalized state vector on qubit ⊗ cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} do not match {} amplitudes",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidConfig(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` first.
    pub fn normalized(amplitudes: DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidConfig(
                "cannot normalize a zero vector".into(),
            ));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// ⟨ψ|op|ψ⟩, real part.
    pub fn expectation(&self, op: &Operator) -> f64 {
        self.amplitudes.dotc(&(op.data() * &self.amplitudes)).re
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            data: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace; positivity is checked where eigenvalues are computed.
    pub fn new(data: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if data.nrows() != side || data.ncols() != side || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} do not match a {}x{} matrix",
                data.nrows(),
                data.ncols()
            )));
        }
        let op = Operator::new(dims.clone(), data)?;
        let defect = hermiticity_defect(&op);
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidConfig(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(Self {
            data: op.into_data(),
            dims,
        })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.data.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: PureState,
    pub energy: f64,
    /// λ₁ − λ₀
    pub gap: f64,
    /// Set when the lowest two levels are degenerate to working precision.
    pub quasi_degenerate: bool,
}

/// Lowest eigenvector with the largest-magnitude amplitude made real positive.
pub fn ground_state(h: &Hamiltonian) -> Result<GroundState> {
    let es = eigensystem(&h.op)?;
    let col = es.vectors.column(0).into_owned();

    let mut pivot = 0;
    for (i, z) in col.iter().enumerate() {
        if z.norm() > col[pivot].norm() {
            pivot = i;
        }
    }
    let phase = col[pivot].conj() / col[pivot].norm();
    let mut amplitudes = col * phase;
    amplitudes[pivot] = Complex64::new(amplitudes[pivot].norm(), 0.0);

    let energy = es.values[0];
    let gap = es.values[1] - energy;
    Ok(GroundState {
        state: PureState::normalized(amplitudes, h.op.dims().to_vec())?,
        energy,
        gap,
        quasi_degenerate: gap < 1e-10 * (1.0 + energy.abs()),
    })
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let &[dq, dc] = rho.dims() else {
        return Err(Error::DimensionMismatch(format!(
            "partial trace needs a bipartite [qubit, cavity] state, got dims {:?}",
            rho.dims()
        )));
    };
    let idx = |q: usize, n: usize| q * dc + n;
    let m = &rho.data;
    let reduced = match keep {
        Subsystem::Qubit => CMatrix::from_fn(dq, dq, |i, j| {
            (0..dc).map(|n| m[(idx(i, n), idx(j, n))]).sum()
        }),
        Subsystem::Cavity => CMatrix::from_fn(dc, dc, |i, j| {
            (0..dq).map(|q| m[(idx(q, i), idx(q, j))]).sum()
        }),
    };
    let dims = match keep {
        Subsystem::Qubit => vec![dq],
        Subsystem::Cavity => vec![dc],
    };
    DensityMatrix::new(reduced, dims)
}

/// −Tr ρ log₂ ρ in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -NEGATIVE_TOL {
            return Err(Error::NotPositive(lambda));
        }
        if lambda > CLAMP_TOL {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy of the qubit reduction of a pure bipartite state.
pub fn entanglement_entropy(state: &PureState) -> Result<f64> {
    von_neumann_entropy(&partial_trace(&state.density_matrix(), Subsystem::Qubit)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub g: f64,
    pub s_qrm: f64,
    pub s_qrma: f64,
    pub qrm_quasi_degenerate: bool,
    pub qrma_quasi_degenerate: bool,
}

fn point_entropy(cfg: &ModelConfig) -> Result<(f64, bool)> {
    let gs = ground_state(&build_full(cfg)?)?;
    Ok((entanglement_entropy(&gs.state)?, gs.quasi_degenerate))
}

/// Ground-state qubit entropy of both models along `g_grid`, in grid order.
pub fn entropy_sweep(base: &ModelConfig, g_grid: &[f64]) -> Result<Vec<EntropyPoint>> {
    check_grid(g_grid)?;
    g_grid
        .par_iter()
        .map(|&g| {
            let cfg = base.with_g(g);
            let (s_qrm, qrm_quasi_degenerate) =
                point_entropy(&cfg.with_kind(ModelKind::Qrm)).map_err(|e| e.at(g))?;
            let (s_qrma, qrma_quasi_degenerate) =
                point_entropy(&cfg.with_kind(ModelKind::Qrma)).map_err(|e| e.at(g))?;
            Ok(EntropyPoint {
                g,
                s_qrm,
                s_qrma,
                qrm_quasi_degenerate,
                qrma_quasi_degenerate,
            })
        })
        .collect()
}
