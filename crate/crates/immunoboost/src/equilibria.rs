//! Steady states: the disease-free equilibrium, the endemic equilibrium for
//! tau > 0 via the intersection of a line and an exponentially damped curve,
//! and the tau = 0 closed form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::r0;
use crate::params::ModelParams;

/// R0 within this distance of 1 is treated as R0 = 1 (no endemic branch);
/// the root would collapse to I* = 0 and bisection would return noise.
pub const R0_UNIT_TOL: f64 = 1e-12;

const BISECTION_CAP: usize = 200;
const BRACKET_WIDTH_TOL: f64 = 1e-13;
const NEWTON_POLISH_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EquilibriumKind {
    Dfe,
    Endemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Bisection,
}

/// A classified steady state with its residual against the equilibrium
/// conditions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub s_star: f64,
    pub i_star: f64,
    /// The two equilibrium conditions evaluated at (s_star, i_star).
    pub residual: (f64, f64),
    pub method: SolveMethod,
}

/// Coefficients of the intersection problem y1(x) = y2(x) whose positive
/// root is I*:
/// y1(x) = (gamma+d) x - d (1 - 1/R0),
/// y2(x) = alpha x (rho - kappa x) e^{-eta x} on [0, rho/kappa].
#[derive(Debug, Clone, Copy)]
pub struct IntersectionCoefficients {
    /// nu * beta
    pub kappa: f64,
    /// gamma + kappa (1 - 1/R0)
    pub rho: f64,
    /// e^{-d tau}
    pub alpha: f64,
    /// kappa * tau
    pub eta: f64,
}

impl IntersectionCoefficients {
    pub fn new(params: &ModelParams) -> Self {
        let kappa = params.nu * params.beta;
        IntersectionCoefficients {
            kappa,
            rho: params.gamma + kappa * (1.0 - 1.0 / r0(params)),
            alpha: (-params.d * params.tau).exp(),
            eta: kappa * params.tau,
        }
    }

    pub fn y2(&self, x: f64) -> f64 {
        self.alpha * x * (self.rho - self.kappa * x) * (-self.eta * x).exp()
    }

    pub fn y2_prime(&self, x: f64) -> f64 {
        self.alpha
            * (self.eta * self.kappa * x * x - x * (2.0 * self.kappa + self.eta * self.rho)
                + self.rho)
            * (-self.eta * x).exp()
    }

    /// Location of the single interior maximum of y2 on [0, rho/kappa].
    pub fn y2_max_location(&self) -> f64 {
        let (eta, rho, kappa) = (self.eta, self.rho, self.kappa);
        (eta * rho + 2.0 * kappa - (eta * eta * rho * rho + 4.0 * kappa * kappa).sqrt())
            / (2.0 * eta * kappa)
    }
}

/// Both equilibrium conditions evaluated at an arbitrary (S, I):
/// r1 = d(1-S) - beta I S + I (gamma + nu beta (1-S-I)) e^{-tau (d + nu beta I)},
/// r2 = beta I S - (gamma + d) I.
pub fn equilibrium_residual(params: &ModelParams, s: f64, i: f64) -> (f64, f64) {
    let ModelParams { beta, gamma, d, nu, tau } = *params;
    let r1 = d * (1.0 - s) - beta * i * s
        + i * (gamma + nu * beta * (1.0 - s - i)) * (-tau * (d + nu * beta * i)).exp();
    let r2 = beta * i * s - (gamma + d) * i;
    (r1, r2)
}

/// The disease-free equilibrium (1, 0); exists for every parameter set.
pub fn dfe(params: &ModelParams) -> Equilibrium {
    Equilibrium {
        kind: EquilibriumKind::Dfe,
        s_star: 1.0,
        i_star: 0.0,
        residual: equilibrium_residual(params, 1.0, 0.0),
        method: SolveMethod::ClosedForm,
    }
}

/// The unique endemic equilibrium, or `None` when R0 <= 1.
///
/// For nu > 0 and tau > 0 the root of G(x) = y1(x) - y2(x) is bracketed in
/// (x_low, rho/kappa), where x_low is y1's x-intercept, solved by bisection
/// and polished by Newton. For nu = 0 the exponential term is linear in I*
/// and the closed form applies; for tau = 0 this delegates to
/// [`tau0_equilibrium`].
pub fn endemic_equilibrium(params: &ModelParams) -> Result<Option<Equilibrium>> {
    params.validate()?;
    let r = r0(params);
    if r <= 1.0 + R0_UNIT_TOL {
        return Ok(None);
    }
    if params.tau == 0.0 {
        return tau0_equilibrium(params);
    }
    let s_star = 1.0 / r;

    if params.nu == 0.0 {
        if params.d == 0.0 {
            // gamma I* e^{0} cancels -(gamma+0) I*: every I* satisfies the
            // equilibrium condition; the paper assumes gamma, d > 0 here.
            return Err(Error::InvalidParams(
                "d = 0 with nu = 0 and tau > 0 gives a continuum of equilibria".into(),
            ));
        }
        let i_star = params.d * (1.0 - s_star)
            / (params.gamma + params.d - params.gamma * (-params.d * params.tau).exp());
        return Ok(Some(Equilibrium {
            kind: EquilibriumKind::Endemic,
            s_star,
            i_star,
            residual: equilibrium_residual(params, s_star, i_star),
            method: SolveMethod::ClosedForm,
        }));
    }

    let co = IntersectionCoefficients::new(params);
    let g = |x: f64| (params.gamma + params.d) * x - params.d * (1.0 - s_star) - co.y2(x);
    let g_prime = |x: f64| (params.gamma + params.d) - co.y2_prime(x);

    let x_low = (params.d / (params.d + params.gamma)) * (1.0 - s_star);
    let hi = co.rho / co.kappa;
    let eps_g = 1e-13 * (params.gamma + params.d);

    let mut lo = x_low;
    if !(g(lo) < -eps_g) {
        // Either the d = 0 corner (G(0) = 0 exactly, root interior) or the
        // strong-boosting regime where e^{-eta x} underflows at x_low and the
        // root coincides with x_low itself. Hunt rightwards for a negative
        // sample to tell the two apart.
        let mut found = false;
        for k in (1..=50).rev() {
            let x = x_low + (hi - x_low) * (2.0f64).powi(-k);
            if g(x) < -eps_g {
                lo = x;
                found = true;
                break;
            }
        }
        if !found {
            let i_star = x_low;
            let residual = equilibrium_residual(params, s_star, i_star);
            return Ok(Some(Equilibrium {
                kind: EquilibriumKind::Endemic,
                s_star,
                i_star,
                residual,
                method: SolveMethod::Bisection,
            }));
        }
    }

    let (mut a, mut b) = (lo, hi);
    let ga = g(a);
    let gb = g(b);
    if !(ga < 0.0 && gb > 0.0) {
        return Err(Error::BracketFailure { lo: a, hi: b, g_lo: ga, g_hi: gb });
    }
    let mut iterations = 0;
    while b - a > BRACKET_WIDTH_TOL && iterations < BISECTION_CAP {
        let mid = 0.5 * (a + b);
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    if b - a > BRACKET_WIDTH_TOL {
        return Err(Error::NoConvergence {
            iterations,
            detail: format!("bisection bracket still [{a}, {b}]"),
        });
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..NEWTON_POLISH_STEPS {
        let gp = g_prime(x);
        if gp == 0.0 {
            break;
        }
        let next = x - g(x) / gp;
        if !(next > lo && next < hi) {
            break; // Newton left the bracket; keep the bisection result
        }
        if (next - x).abs() < 1e-17 {
            x = next;
            break;
        }
        x = next;
    }

    Ok(Some(Equilibrium {
        kind: EquilibriumKind::Endemic,
        s_star,
        i_star: x,
        residual: equilibrium_residual(params, s_star, x),
        method: SolveMethod::Bisection,
    }))
}

/// Closed-form equilibrium of the tau = 0 system: (1/R0, 1 - 1/R0) for
/// R0 > 1, `None` otherwise. Errors when called with tau != 0.
pub fn tau0_equilibrium(params: &ModelParams) -> Result<Option<Equilibrium>> {
    params.validate()?;
    if params.tau != 0.0 {
        return Err(Error::TauNotZero(params.tau));
    }
    let r = r0(params);
    if r <= 1.0 + R0_UNIT_TOL {
        return Ok(None);
    }
    let s_star = 1.0 / r;
    let i_star = 1.0 - s_star;
    let quad = tau0_quadratic_residual(params, i_star);
    if quad.abs() > 1e-9 * (1.0 + params.nu * params.beta) {
        return Err(Error::NoConvergence {
            iterations: 0,
            detail: format!("tau=0 quadratic residual {quad:e} out of tolerance"),
        });
    }
    Ok(Some(Equilibrium {
        kind: EquilibriumKind::Endemic,
        s_star,
        i_star,
        residual: equilibrium_residual(params, s_star, i_star),
        method: SolveMethod::ClosedForm,
    }))
}

/// The quadratic the tau = 0 endemic I* must satisfy:
/// nu beta I*^2 - I* (nu beta (1 - 1/R0) - d) + d (1/R0 - 1).
pub fn tau0_quadratic_residual(params: &ModelParams, i_star: f64) -> f64 {
    let nb = params.nu * params.beta;
    let s_star = 1.0 / r0(params);
    nb * i_star * i_star - i_star * (nb * (1.0 - s_star) - params.d) + params.d * (s_star - 1.0)
}
