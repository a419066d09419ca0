//! Rabi Hamiltonian with and without the diamagnetic A² term.
//!
//! Units: ħ = 1 and all frequencies are expressed in units of the cavity
//! frequency, so `omega_c` is normally 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{
    annihilation, creation, is_hermitian, number, pauli, tensor, Axis, FockTruncation, Operator,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Plain quantum Rabi model.
    Qrm,
    /// Rabi model plus the diamagnetic term.
    Qrma,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Qrm => "QRM",
            ModelKind::Qrma => "QRMA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub omega_c: f64,
    pub omega_0: f64,
    pub g: f64,
    pub include_diamagnetic: bool,
    /// Explicit diamagnetic constant; `None` ties it to g²/ω_c.
    pub d_override: Option<f64>,
    pub trunc: FockTruncation,
}

impl ModelConfig {
    /// ω_c = ω_0 = 1 with the given truncation, coupling and model.
    pub fn resonant(n_max: usize, g: f64, kind: ModelKind) -> Result<Self> {
        let cfg = Self {
            omega_c: 1.0,
            omega_0: 1.0,
            g,
            include_diamagnetic: kind == ModelKind::Qrma,
            d_override: None,
            trunc: FockTruncation::new(n_max)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return bad(format!("omega_c must be > 0, got {}", self.omega_c));
        }
        if !(self.omega_0.is_finite() && self.omega_0 >= 0.0) {
            return bad(format!("omega_0 must be >= 0, got {}", self.omega_0));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return bad(format!("g must be >= 0, got {}", self.g));
        }
        if let Some(d) = self.d_override {
            if !(d.is_finite() && d >= 0.0) {
                return bad(format!("d_override must be >= 0, got {d}"));
            }
        }
        Ok(())
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_kind(mut self, kind: ModelKind) -> Self {
        self.include_diamagnetic = kind == ModelKind::Qrma;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        self.trunc = FockTruncation::new(n_max)?;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        if self.include_diamagnetic {
            ModelKind::Qrma
        } else {
            ModelKind::Qrm
        }
    }

    pub fn n_max(&self) -> usize {
        self.trunc.n_max()
    }

    /// D, either the override or g²/ω_c.
    pub fn diamagnetic_constant(&self) -> f64 {
        self.d_override.unwrap_or(self.g * self.g / self.omega_c)
    }
}

/// Hermitian operator on qubit ⊗ cavity together with the parameters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub op: Operator,
    pub config: ModelConfig,
}

impl Hamiltonian {
    fn checked(op: Operator, config: ModelConfig) -> Result<Self> {
        debug_assert!(is_hermitian(&op, 1e-10));
        debug_assert_eq!(op.dims(), &[2, config.n_max()]);
        Ok(Self { op, config })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Position-like field operator a + a†.
pub fn field_quadrature(trunc: FockTruncation) -> Operator {
    &annihilation(trunc) + &creation(trunc)
}

/// σ_x ⊗ (a + a†).
pub fn coupling_term(trunc: FockTruncation) -> Operator {
    tensor(&pauli(Axis::X), &field_quadrature(trunc))
}

pub fn build_rabi(cfg: &ModelConfig) -> Result<Hamiltonian> {
    cfg.validate()?;
    let t = cfg.trunc;
    let id_q = Operator::identity(vec![2])?;
    let id_f = Operator::identity(vec![t.n_max()])?;
    let photon = &creation(t) * &annihilation(t);

    let field = tensor(&id_q, &photon).scale(cfg.omega_c);
    let qubit = tensor(&pauli(Axis::Z), &id_f).scale(cfg.omega_0 / 2.0);
    let coupling = coupling_term(t).scale(cfg.g);
    Hamiltonian::checked(&(&field + &qubit) + &coupling, *cfg)
}

/// D·(I₂ ⊗ (a + a†)²), with the square taken in the truncated space.
pub fn build_diamagnetic(cfg: &ModelConfig) -> Result<Hamiltonian> {
    cfg.validate()?;
    let t = cfg.trunc;
    let x = field_quadrature(t);
    let x2 = &x * &x;
    let op = tensor(&Operator::identity(vec![2])?, &x2).scale(cfg.diamagnetic_constant());
    Hamiltonian::checked(op, *cfg)
}

pub fn build_full(cfg: &ModelConfig) -> Result<Hamiltonian> {
    let rabi = build_rabi(cfg)?;
    if !cfg.include_diamagnetic {
        return Ok(rabi);
    }
    let dia = build_diamagnetic(cfg)?;
    Hamiltonian::checked(&rabi.op + &dia.op, *cfg)
}

/// Π = σ_z ⊗ (−1)^{a†a}.
pub fn parity_operator(trunc: FockTruncation) -> Operator {
    let signs: Vec<f64> = (0..trunc.n_max())
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    tensor(&pauli(Axis::Z), &Operator::diagonal(&signs))
}

/// Photon-number operator lifted to the composite space.
pub fn photon_number(trunc: FockTruncation) -> Operator {
    tensor(&Operator::diagonal(&[1.0, 1.0]), &number(trunc))
}
