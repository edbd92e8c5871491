//! Dense solution history: a piecewise cubic Hermite interpolant of (S, I).
//!
//! The same structure stores initial data on [-tau, 0] and the dense output
//! of a simulation, so delayed-value lookup and the A-functional quadrature
//! work uniformly on both.

use crate::error::{Error, Result};
use crate::params::{StatePoint, INVARIANT_TOL};

/// One cubic Hermite segment per component, stored as endpoint values and
/// derivatives. Derivatives may jump across segment boundaries (breakpoints).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub s0: f64,
    pub i0: f64,
    pub s1: f64,
    pub i1: f64,
    pub ds0: f64,
    pub di0: f64,
    pub ds1: f64,
    pub di1: f64,
}

impl Segment {
    fn eval(&self, t: f64) -> StatePoint {
        let h = self.t1 - self.t0;
        let x = (t - self.t0) / h;
        let x2 = x * x;
        let x3 = x2 * x;
        let h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        let h10 = x3 - 2.0 * x2 + x;
        let h01 = -2.0 * x3 + 3.0 * x2;
        let h11 = x3 - x2;
        StatePoint {
            s: h00 * self.s0 + h * (h10 * self.ds0 + h11 * self.ds1) + h01 * self.s1,
            i: h00 * self.i0 + h * (h10 * self.di0 + h11 * self.di1) + h01 * self.i1,
        }
    }

    /// Exact integral of the cubic I-component over the whole segment.
    pub(crate) fn integral_i(&self) -> f64 {
        let h = self.t1 - self.t0;
        h * (0.5 * (self.i0 + self.i1) + h * (self.di0 - self.di1) / 12.0)
    }

    /// Exact integral of the cubic S-component over the whole segment.
    pub(crate) fn integral_s(&self) -> f64 {
        let h = self.t1 - self.t0;
        h * (0.5 * (self.s0 + self.s1) + h * (self.ds0 - self.ds1) / 12.0)
    }
}

/// Piecewise cubic Hermite function of time covering a contiguous span.
#[derive(Debug, Clone)]
pub struct HistoryFunction {
    segs: Vec<Segment>,
    /// Degenerate single-point span (used only when tau = 0).
    point: Option<(f64, StatePoint)>,
}

impl HistoryFunction {
    /// Constant history on [-tau, 0].
    pub fn constant(tau: f64, state: StatePoint) -> Result<Self> {
        state.check_invariants(INVARIANT_TOL)?;
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::InvalidHistory(format!("tau must be >= 0, got {tau}")));
        }
        if tau == 0.0 {
            return Ok(HistoryFunction { segs: Vec::new(), point: Some((0.0, state)) });
        }
        Ok(HistoryFunction {
            segs: vec![Segment {
                t0: -tau,
                t1: 0.0,
                s0: state.s,
                i0: state.i,
                s1: state.s,
                i1: state.i,
                ds0: 0.0,
                di0: 0.0,
                ds1: 0.0,
                di1: 0.0,
            }],
            point: None,
        })
    }

    /// Linear history from `start` at t = -tau to `end` at t = 0.
    pub fn linear(tau: f64, start: StatePoint, end: StatePoint) -> Result<Self> {
        start.check_invariants(INVARIANT_TOL)?;
        end.check_invariants(INVARIANT_TOL)?;
        if tau <= 0.0 || !tau.is_finite() {
            if tau == 0.0 {
                return Ok(HistoryFunction { segs: Vec::new(), point: Some((0.0, end)) });
            }
            return Err(Error::InvalidHistory(format!("tau must be >= 0, got {tau}")));
        }
        let ds = (end.s - start.s) / tau;
        let di = (end.i - start.i) / tau;
        Ok(HistoryFunction {
            segs: vec![Segment {
                t0: -tau,
                t1: 0.0,
                s0: start.s,
                i0: start.i,
                s1: end.s,
                i1: end.i,
                ds0: ds,
                di0: di,
                ds1: ds,
                di1: di,
            }],
            point: None,
        })
    }

    /// Tabulated history, interpolated piecewise linearly between the knots.
    /// `times` must be strictly increasing.
    pub fn tabulated(times: &[f64], states: &[StatePoint]) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidHistory(format!(
                "times and states lengths differ: {} vs {}",
                times.len(),
                states.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidHistory("need at least 2 knots".into()));
        }
        let mut segs = Vec::with_capacity(times.len() - 1);
        for k in 0..times.len() - 1 {
            let (t0, t1) = (times[k], times[k + 1]);
            if !(t1 > t0) {
                return Err(Error::InvalidHistory(format!(
                    "times must be strictly increasing: t[{k}] = {t0}, t[{}] = {t1}",
                    k + 1
                )));
            }
            states[k].check_invariants(INVARIANT_TOL)?;
            let h = t1 - t0;
            let ds = (states[k + 1].s - states[k].s) / h;
            let di = (states[k + 1].i - states[k].i) / h;
            segs.push(Segment {
                t0,
                t1,
                s0: states[k].s,
                i0: states[k].i,
                s1: states[k + 1].s,
                i1: states[k + 1].i,
                ds0: ds,
                di0: di,
                ds1: ds,
                di1: di,
            });
        }
        states.last().unwrap().check_invariants(INVARIANT_TOL)?;
        Ok(HistoryFunction { segs, point: None })
    }

    pub(crate) fn from_segments(segs: Vec<Segment>) -> Self {
        HistoryFunction { segs, point: None }
    }

    pub(crate) fn push_segment(&mut self, seg: Segment) {
        debug_assert!(self.point.is_none());
        debug_assert!(self.segs.last().map_or(true, |l| (l.t1 - seg.t0).abs() < 1e-9));
        self.segs.push(seg);
    }

    pub(crate) fn segments(&self) -> &[Segment] {
        &self.segs
    }

    /// Start of the covered span.
    pub fn start(&self) -> f64 {
        match &self.point {
            Some((t, _)) => *t,
            None => self.segs.first().map(|s| s.t0).unwrap_or(f64::NAN),
        }
    }

    /// End of the covered span.
    pub fn end(&self) -> f64 {
        match &self.point {
            Some((t, _)) => *t,
            None => self.segs.last().map(|s| s.t1).unwrap_or(f64::NAN),
        }
    }

    /// Checks that [need_start, need_end] is covered (with a relative slack
    /// for float noise at the span edges).
    pub fn check_span(&self, need_start: f64, need_end: f64) -> Result<()> {
        let slack = 1e-9 * (1.0 + need_end.abs().max(need_start.abs()));
        if self.start() > need_start + slack || self.end() < need_end - slack {
            return Err(Error::HistorySpan {
                need_start,
                need_end,
                have_start: self.start(),
                have_end: self.end(),
            });
        }
        Ok(())
    }

    /// Evaluates the interpolant. Errors outside the covered span.
    pub fn eval(&self, t: f64) -> Result<StatePoint> {
        if let Some((t0, state)) = &self.point {
            let slack = 1e-12 * (1.0 + t0.abs());
            if (t - t0).abs() <= slack {
                return Ok(*state);
            }
            return Err(Error::SpanViolation { t, start: *t0, end: *t0 });
        }
        let (start, end) = (self.start(), self.end());
        let slack = 1e-9 * (1.0 + t.abs());
        if t < start - slack || t > end + slack {
            return Err(Error::SpanViolation { t, start, end });
        }
        let t = t.clamp(start, end);
        // index of the segment whose [t0, t1) contains t; the last segment is closed
        let k = self
            .segs
            .partition_point(|seg| seg.t1 < t)
            .min(self.segs.len() - 1);
        Ok(self.segs[k].eval(t))
    }
}
