//! Model parameters and state points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five scalars defining one model instance.
///
/// All rates are per year; `nu` is dimensionless and `tau` is the immunity
/// duration in years. The population is normalized, so state variables live
/// in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct ModelParams {
    /// Transmission rate (1/year), beta > 0.
    pub beta: f64,
    /// Recovery rate (1/year), gamma > 0; 1/gamma is the mean infectious period.
    pub gamma: f64,
    /// Equal birth and death rate (1/year), d >= 0.
    pub d: f64,
    /// Boosting force, nu >= 0.
    pub nu: f64,
    /// Immunity duration (years), tau >= 0.
    pub tau: f64,
}

impl ModelParams {
    pub fn new(beta: f64, gamma: f64, d: f64, nu: f64, tau: f64) -> Result<Self> {
        let p = ModelParams { beta, gamma, d, nu, tau };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the basic reproduction number instead of beta,
    /// using beta = r0 * (gamma + d).
    pub fn from_r0(r0: f64, gamma: f64, d: f64, nu: f64, tau: f64) -> Result<Self> {
        if !r0.is_finite() || r0 <= 0.0 {
            return Err(Error::InvalidParams(format!("r0 must be finite and > 0, got {r0}")));
        }
        Self::new(r0 * (gamma + d), gamma, d, nu, tau)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("beta", self.beta, self.beta > 0.0, "> 0"),
            ("gamma", self.gamma, self.gamma > 0.0, "> 0"),
            ("d", self.d, self.d >= 0.0, ">= 0"),
            ("nu", self.nu, self.nu >= 0.0, ">= 0"),
            ("tau", self.tau, self.tau >= 0.0, ">= 0"),
        ];
        for (name, value, ok, want) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {value}")));
            }
            if !ok {
                return Err(Error::InvalidParams(format!("{name} must be {want}, got {value}")));
            }
        }
        Ok(())
    }

    /// Basic reproduction number beta / (d + gamma).
    pub fn r0(&self) -> f64 {
        crate::model::r0(self)
    }
}

/// Wire format: a flat JSON object with exactly one of `beta` / `r0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    gamma: f64,
    d: f64,
    nu: f64,
    tau: f64,
}

impl TryFrom<ParamsRepr> for ModelParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        match (r.beta, r.r0) {
            (Some(beta), None) => ModelParams::new(beta, r.gamma, r.d, r.nu, r.tau),
            (None, Some(r0)) => ModelParams::from_r0(r0, r.gamma, r.d, r.nu, r.tau),
            (Some(_), Some(_)) => Err(Error::InvalidParams(
                "exactly one of `beta` and `r0` must be present, got both".into(),
            )),
            (None, None) => Err(Error::InvalidParams(
                "exactly one of `beta` and `r0` must be present, got neither".into(),
            )),
        }
    }
}

impl From<ModelParams> for ParamsRepr {
    fn from(p: ModelParams) -> Self {
        ParamsRepr {
            beta: Some(p.beta),
            r0: None,
            gamma: p.gamma,
            d: p.d,
            nu: p.nu,
            tau: p.tau,
        }
    }
}

/// A point of the normalized (S, I) state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    /// Susceptible fraction.
    pub s: f64,
    /// Infective fraction.
    pub i: f64,
}

impl StatePoint {
    pub fn new(s: f64, i: f64) -> Self {
        StatePoint { s, i }
    }

    /// Recovered fraction, implied by normalization.
    pub fn r(&self) -> f64 {
        1.0 - self.s - self.i
    }

    /// Checks 0 <= S, 0 <= I, S + I <= 1 up to `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        if !self.s.is_finite() || !self.i.is_finite() {
            return Err(Error::InvalidParams(format!(
                "state must be finite, got S = {}, I = {}",
                self.s, self.i
            )));
        }
        if self.s < -tol || self.i < -tol || self.s + self.i > 1.0 + tol {
            return Err(Error::InvalidParams(format!(
                "state outside the simplex: S = {}, I = {}, S+I = {}",
                self.s,
                self.i,
                self.s + self.i
            )));
        }
        Ok(())
    }
}

/// Default absolute tolerance for invariant checks.
pub const INVARIANT_TOL: f64 = 1e-8;
