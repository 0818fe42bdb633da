//! The boundary-value problem behind the energy bounds: for `c > 0`, the
//! threshold `δ` solving `∫_δ^∞ ds / (s Φ^{-1}(s)) = 1/c`, and the unique
//! increasing `θ: [0,1] -> [0,1]` with `θ(0) = 0`, `θ(1) = 1` and
//! `(1 - θ) Φ(c θ' / (1 - θ)) = δ`.
//!
//! Everything runs in exponential coordinates `w = -ln(1 - t)`,
//! `v = -ln(1 - θ)`: both `1 - t` and `1 - θ` decay geometrically toward the
//! right endpoint, so these are the variables in which floating point keeps
//! relative precision. The defining integral becomes
//! `∫_0^∞ dv / Φ^{-1}(δ e^v)` with its tail controlled analytically through
//! `Φ^{-1}(s) >= s^{1/p₊}`, and the solution map `w -> v` is interpolated by
//! a monotone cubic Hermite with the exact ODE slopes
//! `dv/dw = (1 - t) Φ^{-1}(δ / (1 - θ)) / c` at the knots. On a power branch
//! `Φ^{-1}(s) = s^{1/p}` the map is exactly linear, so the interpolant is
//! exact there; the only curvature sits where `δ e^v` crosses the kink of
//! `Φ^{-1}` at 1, and that point is pinned to a knot.

use crate::cost::YoungProfile;
use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, bisect_root, MonotoneCubic};

/// The solved profile `θ` with its constants and self-consistency data.
#[derive(Debug, Clone)]
pub struct ThetaSolution {
    pub c: f64,
    pub delta: f64,
    /// `w -> v` in the exponential coordinates above
    v_of_w: MonotoneCubic,
    /// sup over 10^4 probe points in `[0, 1 - 1e-4]` of
    /// `|(1-θ) Φ(cθ'/(1-θ)) - δ|`
    pub residual_sup: f64,
    /// quadrature estimate of `R(1)`, which equals 1 exactly when `δ` solves
    /// the defining integral equation
    pub r1: f64,
}

impl ThetaSolution {
    fn v_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            let (w, _) = self.v_of_w.knots();
            return self.v_of_w.eval(*w.last().expect("knots"));
        }
        self.v_of_w.eval(-(1.0 - t).ln())
    }

    pub fn theta(&self, t: f64) -> f64 {
        1.0 - (-self.v_at(t)).exp()
    }

    /// `1 - θ(t)` at full relative precision.
    pub fn one_minus_theta(&self, t: f64) -> f64 {
        (-self.v_at(t)).exp()
    }

    pub fn theta_prime(&self, t: f64) -> f64 {
        let (w_knots, _) = self.v_of_w.knots();
        let w = if t <= 0.0 {
            w_knots[0]
        } else if t >= 1.0 {
            *w_knots.last().expect("knots")
        } else {
            (-(1.0 - t).ln()).min(*w_knots.last().expect("knots"))
        };
        self.v_of_w.deriv(w) * (w - self.v_of_w.eval(w)).exp()
    }

    /// `c θ'(t) / (1 - θ(t))`, the argument of `Φ` in the defining equation.
    pub fn slope_ratio(&self, t: f64) -> f64 {
        if t <= 0.0 {
            let (w, _) = self.v_of_w.knots();
            return self.c * self.v_of_w.deriv(w[0]);
        }
        let t = t.min(1.0 - 1e-15);
        let w = -(1.0 - t).ln();
        self.c * self.v_of_w.deriv(w) * (1.0 / (1.0 - t))
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        self.v_of_w.knots()
    }
}

/// Cutoff beyond which the analytic tail bound
/// `∫_V^∞ dv / Φ^{-1}(δ e^v) <= p₊ (δ e^V)^{-1/p₊}` drops below `target`.
fn v_cutoff(delta: f64, p_plus: f64, target: f64) -> f64 {
    let t = (p_plus / target).powf(p_plus);
    (t / delta).max(2.0).ln().max(1.0)
}

fn tail_bound(delta: f64, p_plus: f64, v: f64) -> f64 {
    p_plus * (delta * v.exp()).powf(-1.0 / p_plus)
}

/// Solves `∫_δ^∞ ds / (s Φ^{-1}(s)) = 1/c` for `δ > 0`.
pub fn solve_delta(c: f64, profile: &YoungProfile) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::PreconditionViolation("solve_delta needs c > 0".into()));
    }
    let integral = |delta: f64| -> f64 {
        let vmax = v_cutoff(delta, profile.p_plus, 1e-14);
        adaptive_simpson(
            &|v: f64| 1.0 / profile.phi_inverse(delta * v.exp()),
            0.0,
            vmax,
            1e-14,
        )
    };
    let target = 1.0 / c;
    let mut lo = profile.phi(c).max(1e-12);
    let mut hi = lo;
    let mut guard = 0;
    while integral(lo) < target {
        lo /= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::QuadratureFailure("δ bracket collapsed".into()));
        }
    }
    guard = 0;
    while integral(hi) > target {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::QuadratureFailure("δ bracket diverged".into()));
        }
    }
    Ok(bisect_root(
        |d| integral(d) - target,
        lo,
        hi,
        1e-15,
        1e-13 * target,
        400,
    ))
}

/// Solves the boundary-value problem for `θ`.
///
/// 4097 interpolation knots cover `w = -ln(1-t)` up to ~22, i.e. `t` up to
/// `1 - 3e-10`; beyond that the accessors clamp to the last knot.
pub fn solve_theta(c: f64, profile: &YoungProfile) -> Result<ThetaSolution> {
    solve_theta_with_nodes(c, profile, 4096)
}

/// As [`solve_theta`] with a chosen interval count (for refinement checks).
pub fn solve_theta_with_nodes(
    c: f64,
    profile: &YoungProfile,
    intervals: usize,
) -> Result<ThetaSolution> {
    let delta = solve_delta(c, profile)?;
    let p_plus = profile.p_plus;
    // knot span: enough v to push 1 - t below e^{-22}
    let w_span = 22.0f64;
    let v_span = p_plus * w_span + p_plus * (c * p_plus).max(1e-3).ln().abs() + delta.ln().abs() + 4.0;
    let mut vs: Vec<f64> = (0..=intervals)
        .map(|k| v_span * k as f64 / intervals as f64)
        .collect();
    if delta < 1.0 {
        // pin the kink of Φ^{-1} at δ e^v = 1 to a knot
        let vk = -delta.ln();
        let pos = vs.partition_point(|&v| v < vk);
        if pos > 0 && pos < vs.len() && vs[pos] != vk {
            let replace = if vk - vs[pos - 1] < vs[pos] - vk && pos > 1 {
                pos - 1
            } else {
                pos
            };
            vs[replace] = vk;
        }
    }
    let chi = |v: f64| c / profile.phi_inverse(delta * v.exp());
    // T(v) = ∫_v^∞ χ accumulated backward at full relative precision
    let n = vs.len();
    let vmax = v_cutoff(delta, p_plus, 1e-14 / c.max(1.0)).max(v_span);
    let mut tail = c * tail_bound(delta, p_plus, vmax);
    if vmax > v_span {
        tail += adaptive_simpson(&chi, v_span, vmax, 1e-14);
    }
    let mut t_vals = vec![0.0f64; n];
    t_vals[n - 1] = tail;
    for k in (0..n - 1).rev() {
        let (a, b) = (vs[k], vs[k + 1]);
        let seg = (b - a) / 6.0 * (chi(a) + 4.0 * chi(0.5 * (a + b)) + chi(b));
        t_vals[k] = t_vals[k + 1] + seg;
    }
    let r1 = t_vals[0];
    if (r1 - 1.0).abs() > 1e-7 {
        return Err(Error::QuadratureFailure(format!(
            "R(1) = {r1}, expected 1 (δ quadrature inconsistent)"
        )));
    }
    // knots w_k = ln(T_0 / T_k) with the ODE slopes, normalized so that the
    // computed T plays the role of an exact 1 - t
    let mut w_knots = Vec::with_capacity(n);
    let mut v_knots = Vec::with_capacity(n);
    let mut m_knots = Vec::with_capacity(n);
    let mut last_w = f64::NEG_INFINITY;
    for k in 0..n {
        let w = (r1 / t_vals[k]).ln();
        if w > last_w {
            w_knots.push(w);
            v_knots.push(vs[k]);
            m_knots.push(profile.phi_inverse(delta * vs[k].exp()) * (t_vals[k] / r1) / c);
            last_w = w;
        }
    }
    let v_of_w = MonotoneCubic::with_slopes(w_knots, v_knots, m_knots);
    let mut sol = ThetaSolution {
        c,
        delta,
        v_of_w,
        residual_sup: 0.0,
        r1,
    };
    let mut sup: f64 = 0.0;
    for k in 0..10_000 {
        let t = (1.0 - 1e-4) * k as f64 / 9_999.0;
        sup = sup.max(ode_residual(&sol, profile, t).abs());
    }
    sol.residual_sup = sup;
    Ok(sol)
}

/// `(1 - θ) Φ(c θ' / (1 - θ)) - δ` at a probe point.
pub fn ode_residual(sol: &ThetaSolution, profile: &YoungProfile, t: f64) -> f64 {
    sol.one_minus_theta(t) * profile.phi(sol.slope_ratio(t)) - sol.delta
}

/// `∫_0^1 (1 - θ) Φ(c θ' / (1 - θ)) dt` by trapezoid on the solution's knot
/// grid (graded toward `t = 1`), closing the uncovered end with the
/// constant-`δ` limit of the integrand.
pub fn interpolation_constant(sol: &ThetaSolution, profile: &YoungProfile) -> Result<f64> {
    let (w_knots, _) = sol.knots();
    let mut acc = 0.0;
    let mut prev_t = 0.0f64;
    let mut prev_val = ode_residual(sol, profile, 0.0) + sol.delta;
    for &w in &w_knots[1..] {
        let t = 1.0 - (-w).exp();
        let val = ode_residual(sol, profile, t) + sol.delta;
        acc += 0.5 * (val + prev_val) * (t - prev_t);
        prev_t = t;
        prev_val = val;
    }
    acc += sol.delta * (1.0 - prev_t);
    Ok(acc)
}
