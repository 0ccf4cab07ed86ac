//! Deviation estimate between a true solution of Ḃ = A B and a
//! continuously differentiable comparison curve with small defect.
//!
//! If v matches the solution u at the anchor and |v̇ − Av| ≤ δ pointwise,
//! then |u(t) − v(t)| ≤ |∫_{t₀}^t δ(s) e^{‖A‖∞ |t−s|} ds|.  The module
//! evaluates that right-hand side by adaptive quadrature and checks the
//! inequality along integrated trajectories.

use num_complex::Complex64;

use crate::error::Error;
use crate::quad::adaptive_simpson;
use crate::radial::{PowerSolution, Trajectory};
use crate::Result;

/// A closed-form comparison curve in the logarithmic coordinate.
pub trait TauCurve {
    fn value_tau(&self, tau: f64) -> [Complex64; 2];
    fn deriv_tau(&self, tau: f64) -> [Complex64; 2];
}

impl TauCurve for PowerSolution {
    fn value_tau(&self, tau: f64) -> [Complex64; 2] {
        PowerSolution::value_tau(self, tau)
    }
    fn deriv_tau(&self, tau: f64) -> [Complex64; 2] {
        PowerSolution::deriv_tau(self, tau)
    }
}

/// |∫_{t0}^{t} δ(s) e^{a_sup |t−s|} ds| to quadrature tolerance.
///
/// Exactly zero at t = t0; monotone nondecreasing in |t − t0|, in a_sup
/// and in pointwise-larger δ.
pub fn gronwall_bound(
    a_sup: f64,
    delta: &mut impl FnMut(f64) -> f64,
    t0: f64,
    t: f64,
    quadrature_tol: f64,
) -> Result<f64> {
    if !(a_sup >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "a_sup must be nonnegative, got {a_sup}"
        )));
    }
    if !(quadrature_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "quadrature tolerance must be positive".into(),
        ));
    }
    if t == t0 {
        return Ok(0.0);
    }
    let (lo, hi) = (t0.min(t), t0.max(t));
    let v = adaptive_simpson(
        &mut |s| delta(s) * (a_sup * (t - s).abs()).exp(),
        lo,
        hi,
        quadrature_tol,
    );
    Ok(v.abs())
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    /// Evaluation grid in τ.
    pub grid: Vec<f64>,
    /// |u − v| at grid points.
    pub deviation: Vec<f64>,
    /// Quadrature of the deviation bound at grid points.
    pub bound: Vec<f64>,
    pub a_sup: f64,
    /// Anchor mismatch |u(t₀) − v(t₀)| (hypothesis (i)).
    pub anchor_mismatch: f64,
    /// Worst defect excess over δ on the spot-check grid (hypothesis (ii));
    /// ≤ 0 when the hypothesis holds.
    pub defect_excess: f64,
    /// Worst deviation − bound − slack over the grid; ≤ 0 means the
    /// conclusion holds everywhere.
    pub worst_violation: f64,
    pub conclusion_holds: bool,
}

/// Slack for the conclusion check: two stacked tolerances (integration and
/// quadrature).
pub const SLACK_ABS: f64 = 1e-12;
pub const SLACK_REL: f64 = 1e-8;

/// Check the deviation estimate along an integrated trajectory.
///
/// Hypothesis failures (anchor mismatch, defect exceeding δ on the sample
/// grid) are reported as errors; a conclusion failure, which would mean an
/// implementation bug, is reported in the result.
pub fn verify_comparison(
    u: &Trajectory,
    v: &impl TauCurve,
    a_sup: f64,
    delta: &mut impl FnMut(f64) -> f64,
    tau0: f64,
    grid_points: usize,
) -> Result<ComparisonReport> {
    let samples = u.samples();
    let (tau_lo, tau_hi) = (samples.first().unwrap().x, samples.last().unwrap().x);
    if tau0 < tau_lo || tau0 > tau_hi {
        return Err(Error::InvalidArgument(format!(
            "anchor τ = {tau0} outside trajectory coverage [{tau_lo}, {tau_hi}]"
        )));
    }
    let n = grid_points.max(3);

    // Hypothesis (i): anchors agree.
    let vu = u.value(tau0);
    let vv = v.value_tau(tau0);
    let anchor_mismatch = ((vu[0] - vv[0]).norm_sqr() + (vu[1] - vv[1]).norm_sqr()).sqrt();
    let anchor_scale = (vv[0].norm_sqr() + vv[1].norm_sqr()).sqrt().max(1e-300);
    if anchor_mismatch > 1e-9 * anchor_scale + 1e-13 {
        return Err(Error::HypothesisViolation(format!(
            "anchor mismatch |u(t0) - v(t0)| = {anchor_mismatch:e}"
        )));
    }

    // Hypothesis (ii): sampled defect domination.
    let mu = u.params.mu;
    let lambda = u.params.lambda;
    let mut defect_excess = f64::NEG_INFINITY;
    for i in 0..n {
        let tau = tau_lo + (tau_hi - tau_lo) * i as f64 / (n - 1) as f64;
        let val = v.value_tau(tau);
        let dv = v.deriv_tau(tau);
        let a = lambda * tau.exp();
        let r0 = dv[0] - (val[0] * mu - val[1] * a);
        let r1 = dv[1] - (val[0] * a - val[1] * mu);
        let defect = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
        let d = delta(tau);
        defect_excess = defect_excess.max(defect - d);
        if defect > d * (1.0 + 1e-9) + 1e-13 {
            return Err(Error::HypothesisViolation(format!(
                "defect {defect:e} exceeds delta {d:e} at τ = {tau}"
            )));
        }
    }

    let mut grid = Vec::with_capacity(n);
    let mut deviation = Vec::with_capacity(n);
    let mut bound = Vec::with_capacity(n);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        let tau = tau_lo + (tau_hi - tau_lo) * i as f64 / (n - 1) as f64;
        let uu = u.value(tau);
        let vv = v.value_tau(tau);
        let dev = ((uu[0] - vv[0]).norm_sqr() + (uu[1] - vv[1]).norm_sqr()).sqrt();
        let b = if tau == tau0 {
            0.0
        } else {
            gronwall_bound(a_sup, delta, tau0, tau, 1e-13)?
        };
        worst = worst.max(dev - b - (SLACK_ABS + SLACK_REL * b));
        grid.push(tau);
        deviation.push(dev);
        bound.push(b);
    }
    Ok(ComparisonReport {
        grid,
        deviation,
        bound,
        a_sup,
        anchor_mismatch,
        defect_excess,
        worst_violation: worst,
        conclusion_holds: worst <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use crate::radial::{almost_solution, integrate_tau, op_norm_sup_tau, RadialParams};
    use approx::assert_relative_eq;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bound_closed_forms() {
        assert_eq!(
            gronwall_bound(2.0, &mut |_| 0.0, 0.0, 1.5, 1e-12).unwrap(),
            0.0
        );
        // δ ≡ d0 constant: d0 (e^{a(t−t0)} − 1)/a
        let (d0, a) = (0.3, 1.7);
        let got = gronwall_bound(a, &mut |_| d0, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(
            got,
            d0 * ((a * 2.0f64).exp() - 1.0) / a,
            max_relative = 1e-10
        );
        // exactly zero at the anchor
        assert_eq!(gronwall_bound(a, &mut |_| d0, 0.5, 0.5, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn bound_monotonicity() {
        let mut d = |s: f64| 0.1 + 0.05 * s.sin().abs();
        let b1 = gronwall_bound(1.0, &mut d, 0.0, 1.0, 1e-12).unwrap();
        let b2 = gronwall_bound(1.0, &mut d, 0.0, 2.0, 1e-12).unwrap();
        let b3 = gronwall_bound(2.0, &mut d, 0.0, 2.0, 1e-12).unwrap();
        assert!(b1 < b2 && b2 < b3);
        let bback = gronwall_bound(1.0, &mut d, 0.0, -2.0, 1e-12).unwrap();
        assert!(bback > 0.0);
    }

    #[test]
    fn proof_chain_bound_dominates_quadrature() {
        // δ(s) = |λ| e^s |B0| e^{−μ(s−τ0)} integrated down from τ0 stays
        // below |λ| |B0| e^{−μ(τ−τ0)} e^{τ0} e^{(τ0−τ)/10}.
        for mu in [1.0f64, 2.0, 5.0] {
            for lambda in [0.05f64, 0.1] {
                for tau0 in [-3.0f64, -1.0] {
                    let b0 = 1.0;
                    let a_sup = mu + 0.1;
                    let mut delta = |s: f64| lambda * s.exp() * b0 * (-mu * (s - tau0)).exp();
                    for tau in [tau0 - 0.5, tau0 - 1.5, tau0 - 3.0] {
                        let got = gronwall_bound(a_sup, &mut delta, tau0, tau, 1e-13).unwrap();
                        let hand = lambda
                            * b0
                            * (-mu * (tau - tau0)).exp()
                            * tau0.exp()
                            * ((tau0 - tau) / 10.0).exp();
                        assert!(
                            got <= hand * (1.0 + 1e-9),
                            "mu={mu} lambda={lambda} tau0={tau0} tau={tau}: {got} > {hand}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exact_solution_has_zero_deviation_and_bound() {
        // u = v = the λ=0 closed form; δ ≡ 0.
        let params = RadialParams::new(1.0, 0.0, Profile::euclidean(0.05, 1.0).unwrap());
        let u = integrate_tau(
            &params,
            (0.05f64).ln(),
            0.0,
            (0.3f64).ln(),
            [re(1.0), re(0.0)],
            1e-12,
            &[],
        )
        .unwrap();
        let v = almost_solution([re(1.0), re(0.0)], 1.0, 0.3).unwrap();
        let rep = verify_comparison(&u, &v, 1.0, &mut |_| 0.0, (0.3f64).ln(), 129).unwrap();
        assert!(rep.conclusion_holds);
        assert!(rep.deviation.iter().all(|&d| d <= 2e-9));
        assert!(rep.bound.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn integrated_trajectory_stays_below_bound() {
        let (mu, lambda) = (1.0, 0.05);
        let t0 = 0.1f64;
        let params = RadialParams::new(mu, lambda, Profile::euclidean(0.01, 0.5).unwrap());
        let w = [re(0.6), re(0.8)];
        let u = integrate_tau(
            &params,
            (0.01f64).ln(),
            (0.5f64).ln(),
            t0.ln(),
            w,
            1e-11,
            &[],
        )
        .unwrap();
        let v = almost_solution(w, mu, t0).unwrap();
        let a_sup = op_norm_sup_tau(mu, lambda, (0.5f64).ln());
        let vc = v.clone();
        let mut delta = move |tau: f64| vc.defect_tau(lambda, tau);
        let rep = verify_comparison(&u, &v, a_sup, &mut delta, t0.ln(), 257).unwrap();
        assert!(
            rep.conclusion_holds,
            "worst violation {:e}",
            rep.worst_violation
        );
    }

    #[test]
    fn scalar_problem_with_crafted_perturbation() {
        // u̇ = a u embedded as the decoupled first component (μ = a, λ = 0);
        // v(τ) = e^{a(τ−τ0)}(1 + ε sin(τ−τ0)) has defect ε e^{a(τ−τ0)}|cos(τ−τ0)|.
        struct Perturbed {
            a: f64,
            eps: f64,
            tau0: f64,
        }
        impl TauCurve for Perturbed {
            fn value_tau(&self, tau: f64) -> [Complex64; 2] {
                let d = tau - self.tau0;
                [
                    re((self.a * d).exp() * (1.0 + self.eps * d.sin())),
                    re(0.0),
                ]
            }
            fn deriv_tau(&self, tau: f64) -> [Complex64; 2] {
                let d = tau - self.tau0;
                [
                    re((self.a * d).exp()
                        * (self.a * (1.0 + self.eps * d.sin()) + self.eps * d.cos())),
                    re(0.0),
                ]
            }
        }
        let (a, eps) = (0.8, 1e-3);
        let tau0 = (0.2f64).ln();
        let params = RadialParams::new(a, 0.0, Profile::euclidean(0.05, 1.0).unwrap());
        let u = integrate_tau(
            &params,
            (0.05f64).ln(),
            0.0,
            tau0,
            [re(1.0), re(0.0)],
            1e-12,
            &[],
        )
        .unwrap();
        let v = Perturbed { a, eps, tau0 };
        let mut delta = move |tau: f64| eps * (a * (tau - tau0)).exp();
        let rep = verify_comparison(&u, &v, a, &mut delta, tau0, 257).unwrap();
        assert!(rep.conclusion_holds, "worst {:e}", rep.worst_violation);
        // the deviation is genuinely nonzero here
        assert!(rep.deviation.iter().cloned().fold(0.0, f64::max) > 1e-5);
    }

    #[test]
    fn hypothesis_violations_are_distinct_errors() {
        let params = RadialParams::new(1.0, 0.1, Profile::euclidean(0.05, 1.0).unwrap());
        let u = integrate_tau(
            &params,
            (0.05f64).ln(),
            0.0,
            (0.3f64).ln(),
            [re(1.0), re(0.0)],
            1e-11,
            &[],
        )
        .unwrap();
        // wrong anchor
        let v_bad = almost_solution([re(2.0), re(0.0)], 1.0, 0.3).unwrap();
        let r = verify_comparison(&u, &v_bad, 1.2, &mut |_| 1.0, (0.3f64).ln(), 65);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
        // delta too small to dominate the defect
        let v = almost_solution([re(1.0), re(0.0)], 1.0, 0.3).unwrap();
        let r = verify_comparison(&u, &v, 1.2, &mut |_| 0.0, (0.3f64).ln(), 65);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }
}
