//! Model core: right-hand side of the delay system, the basic reproduction
//! number, and the invariant-region functional A(t).
//!
//! The system in (S, I) is
//!
//! ```text
//! S'(t) = d(1 - S) - beta I S
//!         + I(t-tau) (gamma + nu beta (1 - S(t-tau) - I(t-tau)))
//!           * exp(-d tau - nu beta * K(t)),      K(t) = integral of I over [t-tau, t]
//! I'(t) = beta I S - (gamma + d) I
//! ```
//!
//! and membership of an initial history in the positively invariant set is
//! decided by the sign of
//!
//! ```text
//! A(t) = 1 - S(t) - I(t)
//!        - integral_{t-tau}^{t} (gamma + nu beta (1-S(u)-I(u))) I(u)
//!            * exp(-integral_u^t (d + nu beta I(z)) dz) du.
//! ```

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::params::{ModelParams, StatePoint};

/// Basic reproduction number beta / (d + gamma).
pub fn r0(params: &ModelParams) -> f64 {
    params.beta / (params.d + params.gamma)
}

/// Right-hand side of the delay system at one instant.
///
/// `distributed_integral` is the trailing integral of I over [t-tau, t],
/// supplied by the caller; the simulator maintains it alongside the state.
/// Rejects a negative integral.
pub fn rhs(
    params: &ModelParams,
    current: StatePoint,
    delayed: StatePoint,
    distributed_integral: f64,
) -> Result<(f64, f64)> {
    if distributed_integral < 0.0 {
        return Err(Error::NegativeDistributedIntegral(distributed_integral));
    }
    let ModelParams { beta, gamma, d, nu, tau } = *params;
    let reentry = delayed.i
        * (gamma + nu * beta * (1.0 - delayed.s - delayed.i))
        * (-d * tau - nu * beta * distributed_integral).exp();
    let ds = d * (1.0 - current.s) - beta * current.i * current.s + reentry;
    let di = beta * current.i * current.s - (gamma + d) * current.i;
    Ok((ds, di))
}

/// A(0) evaluated on an initial history covering [-tau, 0].
/// The history belongs to the invariant set iff the result is >= 0
/// (up to quadrature tolerance).
pub fn omega_tilde_membership(params: &ModelParams, history: &HistoryFunction) -> Result<f64> {
    history.check_span(-params.tau, 0.0)?;
    a_functional(params, history, 0.0)
}

/// A(t) along a dense trajectory covering [t - tau, t].
pub fn a_functional(params: &ModelParams, dense: &HistoryFunction, t: f64) -> Result<f64> {
    a_functional_with_resolution(params, dense, t, DEFAULT_MIN_SUBINTERVALS)
}

/// Minimum number of quadrature subintervals across the window [t-tau, t].
pub const DEFAULT_MIN_SUBINTERVALS: usize = 256;

/// A(t) with an explicit lower bound on the quadrature resolution; the window
/// is partitioned at the interpolant's breakpoints (where derivatives may
/// jump) and each piece is refined uniformly until the total count reaches
/// `min_subintervals`.
pub fn a_functional_with_resolution(
    params: &ModelParams,
    dense: &HistoryFunction,
    t: f64,
    min_subintervals: usize,
) -> Result<f64> {
    let tau = params.tau;
    dense.check_span(t - tau, t)?;
    let head = dense.eval(t)?;
    if tau == 0.0 {
        return Ok(1.0 - head.s - head.i);
    }

    let knots = window_knots(dense, t - tau, t, min_subintervals.max(2));
    let n = knots.len() - 1;

    let ModelParams { beta, gamma, d, nu, .. } = *params;
    let decay_rate = |p: StatePoint| d + nu * beta * p.i;
    let weight = |p: StatePoint| (gamma + nu * beta * (1.0 - p.s - p.i)) * p.i;

    // Inner integral E(u) = integral_u^t (d + nu beta I), accumulated right to
    // left on the knot grid by per-interval Simpson; the interval midpoints
    // get their own half-interval Simpson relative to the right knot.
    let mut e_right = 0.0; // E at knots[k+1]
    let mut outer = 0.0;
    let mut g_right = weight(head);
    let mut h_right = decay_rate(head);
    for k in (0..n).rev() {
        let (u0, u1) = (knots[k], knots[k + 1]);
        let dt = u1 - u0;
        let mid = 0.5 * (u0 + u1);
        let q3 = u0 + 0.75 * dt;

        let p0 = dense.eval(u0)?;
        let pm = dense.eval(mid)?;
        let pq = dense.eval(q3)?;

        let h0 = decay_rate(p0);
        let hm = decay_rate(pm);
        let hq = decay_rate(pq);

        let e_mid = e_right + dt / 12.0 * (hm + 4.0 * hq + h_right);
        let e_left = e_right + dt / 6.0 * (h0 + 4.0 * hm + h_right);

        let g0 = weight(p0);
        let gm = weight(pm);
        outer += dt / 6.0
            * (g0 * (-e_left).exp() + 4.0 * gm * (-e_mid).exp() + g_right * (-e_right).exp());

        e_right = e_left;
        g_right = g0;
        h_right = h0;
    }

    Ok(1.0 - head.s - head.i - outer)
}

/// Window partition: interpolant breakpoints inside (lo, hi) plus the window
/// ends, each piece split uniformly so the total is at least `min_sub`.
fn window_knots(dense: &HistoryFunction, lo: f64, hi: f64, min_sub: usize) -> Vec<f64> {
    let mut base = vec![lo];
    for seg in dense.segments() {
        if seg.t1 > lo && seg.t1 < hi {
            base.push(seg.t1);
        }
    }
    base.push(hi);
    base.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + a.abs()));

    let pieces = base.len() - 1;
    let per_piece = min_sub.div_ceil(pieces).max(1);
    let mut knots = Vec::with_capacity(pieces * per_piece + 1);
    for w in base.windows(2) {
        let (a, b) = (w[0], w[1]);
        for j in 0..per_piece {
            knots.push(a + (b - a) * j as f64 / per_piece as f64);
        }
    }
    knots.push(hi);
    knots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::INVARIANT_TOL;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn r0_examples() {
        // pertussis setting: R0 = 15 with gamma = 17, d = 0.02, beta = 255.3
        let p = ModelParams::new(255.3, 17.0, 0.02, 1.0, 15.0).unwrap();
        assert!(close(r0(&p), 15.0, 1e-12));
        // beta = gamma + d gives exactly 1
        let p = ModelParams::new(1.3, 1.1, 0.2, 0.0, 1.0).unwrap();
        assert!(close(r0(&p), 1.0, 1e-15));
        let p = ModelParams::new(2.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(close(r0(&p), 2.0, 0.0));
    }

    #[test]
    fn r0_monotonicity() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            // xorshift; plenty for parameter sampling
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let beta = 0.5 + 30.0 * next();
            let gamma = 0.5 + 20.0 * next();
            let d = 0.3 * next();
            let p = ModelParams::new(beta, gamma, d, 0.0, 1.0).unwrap();
            let eps = 1e-4;
            let up_beta = ModelParams::new(beta + eps, gamma, d, 0.0, 1.0).unwrap();
            let up_gamma = ModelParams::new(beta, gamma + eps, d, 0.0, 1.0).unwrap();
            let up_d = ModelParams::new(beta, gamma, d + eps, 0.0, 1.0).unwrap();
            assert!(r0(&up_beta) > r0(&p));
            assert!(r0(&up_gamma) < r0(&p));
            assert!(r0(&up_d) < r0(&p));
        }
    }

    #[test]
    fn rhs_dfe_is_fixed_point() {
        let p = ModelParams::new(255.3, 17.0, 0.02, 4.8, 15.0).unwrap();
        let dfe = StatePoint::new(1.0, 0.0);
        let (ds, di) = rhs(&p, dfe, dfe, 0.0).unwrap();
        assert_eq!(ds, 0.0);
        assert_eq!(di, 0.0);
    }

    #[test]
    fn rhs_sis_hand_arithmetic() {
        // nu = 0, tau = 0 reduces to a plain SIS form
        let p = ModelParams::new(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let x = StatePoint::new(0.5, 0.25);
        let (ds, di) = rhs(&p, x, x, 0.0).unwrap();
        assert!(close(ds, 0.0, 1e-15));
        assert!(close(di, 0.0, 1e-15));
    }

    #[test]
    fn rhs_rejects_negative_integral() {
        let p = ModelParams::new(2.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let x = StatePoint::new(0.5, 0.25);
        assert!(matches!(
            rhs(&p, x, x, -1e-3),
            Err(Error::NegativeDistributedIntegral(_))
        ));
    }

    #[test]
    fn di_factors_through_r0() {
        // dI = (d + gamma) I (R0 S - 1), exactly
        let mut vals = 0.7f64;
        for k in 0..100 {
            vals = (vals * 997.0 + k as f64).rem_euclid(1.0);
            let beta = 0.5 + 40.0 * vals;
            let gamma = 0.2 + 10.0 * ((k * 7 % 13) as f64 / 13.0);
            let d = 0.25 * ((k % 5) as f64 / 5.0);
            let s = 0.9 * vals;
            let i = (1.0 - s) * 0.8;
            let p = ModelParams::new(beta, gamma, d, 1.0, 2.0).unwrap();
            let x = StatePoint::new(s, i);
            let (_, di) = rhs(&p, x, x, 2.0 * i).unwrap();
            let factored = (p.d + p.gamma) * i * (r0(&p) * s - 1.0);
            let scale = di.abs().max(factored.abs()).max(1e-300);
            assert!(
                (di - factored).abs() <= 4.0 * f64::EPSILON * scale.max(beta * i),
                "di = {di}, factored = {factored}"
            );
        }
    }

    #[test]
    fn omega_tilde_dfe_is_zero() {
        let p = ModelParams::new(255.3, 17.0, 0.02, 4.8, 15.0).unwrap();
        let h = HistoryFunction::constant(p.tau, StatePoint::new(1.0, 0.0)).unwrap();
        let a0 = omega_tilde_membership(&p, &h).unwrap();
        assert_eq!(a0, 0.0);
    }

    #[test]
    fn omega_tilde_constant_nu0_closed_form() {
        // constant (0.2, 0.1), nu = 0:
        // A(0) = 0.7 - 0.1 gamma (1 - e^{-d tau}) / d
        let (gamma, d, tau) = (1.7, 0.05, 3.0);
        let p = ModelParams::new(2.0, gamma, d, 0.0, tau).unwrap();
        let h = HistoryFunction::constant(tau, StatePoint::new(0.2, 0.1)).unwrap();
        let a0 = omega_tilde_membership(&p, &h).unwrap();
        let expected = 0.7 - 0.1 * gamma * (1.0 - (-d * tau).exp()) / d;
        assert!(close(a0, expected, 1e-12), "a0 = {a0}, expected = {expected}");
    }

    #[test]
    fn omega_tilde_constant_general_closed_form() {
        // For any constant history the integrand is constant except for the
        // exponential decay, so
        // A(0) = 1 - S - I - (gamma + nu beta (1-S-I)) I (1 - e^{-r tau}) / r,
        // r = d + nu beta I. This closed form is the test-side oracle.
        let p = ModelParams::new(255.3, 17.0, 0.02, 4.8, 15.0).unwrap();
        for (s, i) in [(0.3, 0.05), (0.9, 0.02), (0.0, 0.0), (0.5, 0.5)] {
            let h = HistoryFunction::constant(p.tau, StatePoint::new(s, i)).unwrap();
            let a0 = omega_tilde_membership(&p, &h).unwrap();
            let r = p.d + p.nu * p.beta * i;
            let c = (p.gamma + p.nu * p.beta * (1.0 - s - i)) * i;
            let expected = 1.0 - s - i - c * (1.0 - (-r * p.tau).exp()) / r;
            assert!(
                close(a0, expected, 1e-10 * (1.0 + expected.abs())),
                "({s},{i}): a0 = {a0}, expected = {expected}"
            );
        }
    }

    #[test]
    fn omega_tilde_requires_full_span() {
        let p = ModelParams::new(2.0, 1.0, 0.1, 0.5, 2.0).unwrap();
        let h = HistoryFunction::constant(1.0, StatePoint::new(0.5, 0.1)).unwrap();
        assert!(matches!(
            omega_tilde_membership(&p, &h),
            Err(Error::HistorySpan { .. })
        ));
    }

    #[test]
    fn a_functional_refinement_converges() {
        // piecewise-linear (non-constant) history: the default resolution must
        // agree with a 10x refinement well inside the invariant tolerance
        let p = ModelParams::new(30.0, 5.0, 0.1, 2.0, 4.0).unwrap();
        let times = [-4.0, -2.5, -1.0, 0.0];
        let states = [
            StatePoint::new(0.6, 0.2),
            StatePoint::new(0.5, 0.3),
            StatePoint::new(0.7, 0.1),
            StatePoint::new(0.65, 0.15),
        ];
        let h = HistoryFunction::tabulated(&times, &states).unwrap();
        let coarse = a_functional(&p, &h, 0.0).unwrap();
        let fine = a_functional_with_resolution(&p, &h, 0.0, 2560).unwrap();
        assert!(close(coarse, fine, INVARIANT_TOL), "coarse = {coarse}, fine = {fine}");
    }
}
