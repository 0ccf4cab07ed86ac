//! L²-mass distribution of radial solutions on Euclidean annuli.
//!
//! The central estimate: under the schedule hypotheses, the mass a solution
//! carries on the inner annulus [t₋₁, t₁] is a vanishing fraction of its
//! mass on [t₋₂, t₂], quantified by
//!
//! ```text
//!   ratio ≤ 2⁶ · max{ 3 (t₁/t₂)^{2μ+1},  (t₁/t₋₁) (t₋₂/t₋₁)^{2μ−1} }.
//! ```
//!
//! Schedules shrink like t₋₂ = 2⁻⁹ t₂¹⁶, so every bound here is evaluated
//! in log space and ratios are measured through the trajectory's log-mass
//! accounting.

use num_complex::Complex64;

use crate::error::Error;
use crate::modes::mode_spectrum;
use crate::profile::Profile;
use crate::radial::{integrate_tau, RadialParams, Trajectory};
use crate::Result;

pub const LN2: f64 = std::f64::consts::LN_2;

/// Annulus radii 0 < t₋₂ < t₋₁ < t₁ < t₂ ≤ 1 together with the eigenvalue
/// cap Λ the hypotheses are stated for.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct AnnulusSchedule {
    pub t_2: f64,
    pub t_1: f64,
    pub t_m1: f64,
    pub t_m2: f64,
    pub lambda_cap: f64,
    /// False only for schedules built with `unchecked` (formula unit tests).
    pub hypothesis_checked: bool,
}

impl AnnulusSchedule {
    pub fn new(t_2: f64, t_1: f64, t_m1: f64, t_m2: f64, lambda_cap: f64) -> Result<Self> {
        let s = Self {
            t_2,
            t_1,
            t_m1,
            t_m2,
            lambda_cap,
            hypothesis_checked: true,
        };
        s.validate()?;
        Ok(s)
    }

    /// Build without hypothesis checking, for formula evaluation only.
    pub fn unchecked(t_2: f64, t_1: f64, t_m1: f64, t_m2: f64, lambda_cap: f64) -> Self {
        Self {
            t_2,
            t_1,
            t_m1,
            t_m2,
            lambda_cap,
            hypothesis_checked: false,
        }
    }

    /// The derived schedule t₁ = ½t₂⁴, t₋₁ = ½t₁, t₋₂ = ½t₋₁⁴ (equal to
    /// 2⁻⁹ t₂¹⁶), which satisfies every hypothesis once 0 < t₂ < 2⁻⁴.
    pub fn derived(t_2: f64, lambda_cap: f64) -> Result<Self> {
        if !(t_2 > 0.0 && t_2 < 0.0625) {
            return Err(Error::HypothesisViolation(format!(
                "derived schedule needs 0 < t2 < 2^-4, got {t_2}"
            )));
        }
        let t_1 = 0.5 * t_2.powi(4);
        let t_m1 = 0.5 * t_1;
        let t_m2 = 0.5 * t_m1.powi(4);
        Self::new(t_2, t_1, t_m1, t_m2, lambda_cap)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            t_2,
            t_1,
            t_m1,
            t_m2,
            lambda_cap,
            ..
        } = *self;
        let chain = 0.0 < t_m2 && t_m2 < t_m1 && t_m1 < t_1 && t_1 < t_2 && t_2 <= 1.0;
        if !chain {
            return Err(Error::HypothesisViolation(format!(
                "radii must satisfy 0 < t_m2 < t_m1 < t_1 < t_2 <= 1, got ({t_m2:e}, {t_m1:e}, {t_1:e}, {t_2:e})"
            )));
        }
        if t_2 < 2.0 * t_1 {
            return Err(Error::HypothesisViolation(format!(
                "t_2 >= 2 t_1 fails: {t_2:e} < {:e}",
                2.0 * t_1
            )));
        }
        if t_m1 < 2.0 * t_m2 {
            return Err(Error::HypothesisViolation(format!(
                "t_m1 >= 2 t_m2 fails: {t_m1:e} < {:e}",
                2.0 * t_m2
            )));
        }
        // t_1^6 <= t_m2, compared in log space to dodge underflow
        if 6.0 * t_1.ln() > t_m2.ln() + 1e-12 {
            return Err(Error::HypothesisViolation(format!(
                "t_1^6 <= t_m2 fails for t_1 = {t_1:e}, t_m2 = {t_m2:e}"
            )));
        }
        if lambda_cap * t_2.sqrt() > 0.1 {
            return Err(Error::HypothesisViolation(format!(
                "Lambda sqrt(t_2) <= 1/10 fails: {:e}",
                lambda_cap * t_2.sqrt()
            )));
        }
        Ok(())
    }

    /// Geometric mean of the inner radii; the anchor point of the worst-case
    /// parametrization.
    pub fn t0(&self) -> f64 {
        (0.5 * (self.t_1.ln() + self.t_m1.ln())).exp()
    }
}

/// ln of the mass-ratio bound.
pub fn ln_prop32_bound(mu: f64, sched: &AnnulusSchedule) -> f64 {
    let l1 = sched.t_1.ln();
    let l2 = sched.t_2.ln();
    let lm1 = sched.t_m1.ln();
    let lm2 = sched.t_m2.ln();
    let grow_branch = 3f64.ln() + (2.0 * mu + 1.0) * (l1 - l2);
    let decay_branch = (l1 - lm1) + (2.0 * mu - 1.0) * (lm2 - lm1);
    6.0 * LN2 + grow_branch.max(decay_branch)
}

/// The mass-ratio bound 2⁶·max{3(t₁/t₂)^{2μ+1}, (t₁/t₋₁)(t₋₂/t₋₁)^{2μ−1}},
/// evaluated in log space.  Requires the schedule hypotheses unless the
/// schedule was built `unchecked`.
pub fn prop32_bound(mu: f64, sched: &AnnulusSchedule) -> Result<f64> {
    if sched.hypothesis_checked {
        sched.validate()?;
        if mu < 1.0 {
            return Err(Error::HypothesisViolation(format!(
                "mode must satisfy mu >= 1, got {mu}"
            )));
        }
    }
    Ok(ln_prop32_bound(mu, sched).exp())
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RatioReport {
    pub mu: f64,
    pub lambda: f64,
    pub theta: f64,
    pub measured: f64,
    pub bound: f64,
    pub ln_measured: f64,
    pub ln_bound: f64,
    pub hypothesis_checked: bool,
}

impl RatioReport {
    /// ln(bound) − ln(measured); positive when the estimate holds.
    pub fn ln_margin(&self) -> f64 {
        self.ln_bound - self.ln_measured
    }
}

fn annulus_trajectory(
    mu: f64,
    lambda: f64,
    sched: &AnnulusSchedule,
    anchor: [Complex64; 2],
    rtol: f64,
) -> Result<Trajectory> {
    let profile = Profile::euclidean(sched.t_m2 * 0.5, sched.t_2 * 2.0)?;
    let params = RadialParams::new(mu, lambda, profile);
    let tau0 = 0.5 * (sched.t_1.ln() + sched.t_m1.ln());
    integrate_tau(
        &params,
        sched.t_m2.ln(),
        sched.t_2.ln(),
        tau0,
        anchor,
        rtol,
        &[sched.t_m1.ln(), sched.t_1.ln()],
    )
}

/// Measure ∫_{t₋₁}^{t₁}|B|²dt / ∫_{t₋₂}^{t₂}|B|²dt for the solution
/// anchored at B(t₀) = (cos θ, sin θ), t₀ = √(t₁t₋₁).
pub fn measured_ratio(
    mu: f64,
    lambda: f64,
    sched: &AnnulusSchedule,
    theta: f64,
) -> Result<RatioReport> {
    measured_ratio_anchor(
        mu,
        lambda,
        sched,
        theta,
        [
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        ],
    )
}

/// Same measurement with an explicit (possibly complex) anchor vector.
pub fn measured_ratio_anchor(
    mu: f64,
    lambda: f64,
    sched: &AnnulusSchedule,
    theta: f64,
    anchor: [Complex64; 2],
) -> Result<RatioReport> {
    if sched.hypothesis_checked {
        sched.validate()?;
        if lambda.abs() > sched.lambda_cap {
            return Err(Error::HypothesisViolation(format!(
                "|lambda| = {} exceeds the schedule's cap {}",
                lambda.abs(),
                sched.lambda_cap
            )));
        }
    }
    let traj = annulus_trajectory(mu, lambda, sched, anchor, 1e-10)?;
    let inner = traj.log_l2_norm_sq(sched.t_m1, sched.t_1)?;
    let outer = traj.log_l2_norm_sq(sched.t_m2, sched.t_2)?;
    let ln_measured = inner - outer;
    let ln_bound = ln_prop32_bound(mu, sched);
    Ok(RatioReport {
        mu,
        lambda,
        theta,
        measured: ln_measured.exp(),
        bound: ln_bound.exp(),
        ln_measured,
        ln_bound,
        hypothesis_checked: sched.hypothesis_checked,
    })
}

/// Worst-case ratio over anchor directions: a θ-grid on [0, π) followed by
/// golden-section refinement around the best grid point.  Scale invariance
/// of the ratio reduces the two-dimensional solution space to θ.
pub fn max_ratio(
    mu: f64,
    lambda: f64,
    sched: &AnnulusSchedule,
    grid: usize,
) -> Result<RatioReport> {
    let n = grid.max(4);
    let mut best: Option<RatioReport> = None;
    let mut best_idx = 0usize;
    for i in 0..n {
        let theta = std::f64::consts::PI * i as f64 / n as f64;
        let r = measured_ratio(mu, lambda, sched, theta)?;
        if best.as_ref().map_or(true, |b| r.ln_measured > b.ln_measured) {
            best = Some(r);
            best_idx = i;
        }
    }
    let step = std::f64::consts::PI / n as f64;
    let mut a = step * (best_idx as f64 - 1.0);
    let mut b = step * (best_idx as f64 + 1.0);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut eval = |theta: f64| -> Result<RatioReport> { measured_ratio(mu, lambda, sched, theta) };
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..40 {
        if f1.ln_measured > f2.ln_measured {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2)?;
        }
        if (b - a).abs() < 1e-10 {
            break;
        }
    }
    let refined = if f1.ln_measured > f2.ln_measured { f1 } else { f2 };
    let best = best.unwrap();
    Ok(if refined.ln_measured > best.ln_measured {
        refined
    } else {
        best
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ModeRatioRow {
    pub mu: f64,
    pub multiplicity: u64,
    pub lambda: f64,
    pub theta: f64,
    pub ln_measured: f64,
    pub ln_mode_bound: f64,
    pub ln_uniform_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CorollaryReport {
    pub schedule: AnnulusSchedule,
    pub lambda: f64,
    /// ln of the uniform bound (2⁷t₁²t₂ or 2⁹t₁²t₂).
    pub ln_uniform_bound: f64,
    pub rows: Vec<ModeRatioRow>,
    pub pass: bool,
    /// Worst ln(bound) − ln(measured) over the rows.
    pub min_ln_margin: f64,
}

/// Per-mode worst-case ratios on the derived schedule, each checked against
/// the uniform bound 2⁷·t₁²·t₂.
pub fn corollary1_check(
    n: u32,
    t_2: f64,
    lambda_cap: f64,
    lambda: f64,
    mu_max: f64,
) -> Result<CorollaryReport> {
    let sched = AnnulusSchedule::derived(t_2, lambda_cap)?;
    if lambda.abs() > lambda_cap {
        return Err(Error::HypothesisViolation(format!(
            "|lambda| = {} exceeds Lambda = {lambda_cap}",
            lambda.abs()
        )));
    }
    let ln_uniform = 7.0 * LN2 + 2.0 * sched.t_1.ln() + sched.t_2.ln();
    let modes = mode_spectrum(n, mu_max)?;
    let mut rows = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (mu, mult) in modes.positive() {
        let r = max_ratio(mu, lambda, &sched, 64)?;
        // Chain step: the per-mode bound itself must sit under the uniform
        // bound, which is what makes the mode sum collapse.
        let ln_mode_bound = ln_prop32_bound(mu, &sched);
        let pass = r.ln_measured <= ln_uniform && ln_mode_bound <= ln_uniform + 1e-12;
        min_margin = min_margin.min(ln_uniform - r.ln_measured);
        rows.push(ModeRatioRow {
            mu,
            multiplicity: mult,
            lambda,
            theta: r.theta,
            ln_measured: r.ln_measured,
            ln_mode_bound,
            ln_uniform_bound: ln_uniform,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(CorollaryReport {
        schedule: sched,
        lambda,
        ln_uniform_bound: ln_uniform,
        rows,
        pass,
        min_ln_margin: min_margin,
    })
}

/// Dyadic sub-schedule radii used to extend the annulus estimate to the
/// punctured ball, plus the geometric weight 2^{−2k}.
pub fn corollary2_dyadic(t_2: f64, k: u32) -> (f64, f64, f64, f64, f64) {
    let t_1 = 0.5 * t_2.powi(4);
    let t2k = (-(k as f64) / 4.0 * LN2).exp() * t_2;
    let t1k = (-(k as f64) * LN2).exp() * t_1;
    let tm1k = 0.5 * t1k;
    let tm2k = 0.5 * tm1k.powi(4);
    (t2k, t1k, tm1k, tm2k, (-2.0 * k as f64 * LN2).exp())
}

/// Mass-ratio check for the solution regular at the origin on the ball
/// [0, t₂]: ∫₀^{t₁}|B|² / ∫₀^{t₂}|B|² ≤ 2⁹·t₁²·t₂ per mode.
pub fn corollary2_check(
    n: u32,
    t_2: f64,
    lambda_cap: f64,
    lambda: f64,
    mu_max: f64,
) -> Result<CorollaryReport> {
    if !(t_2 > 0.0 && t_2 < 0.0625) {
        return Err(Error::HypothesisViolation(format!(
            "need 0 < t2 < 2^-4, got {t_2}"
        )));
    }
    if lambda_cap * t_2.sqrt() > 0.1 {
        return Err(Error::HypothesisViolation(format!(
            "Lambda sqrt(t_2) <= 1/10 fails: {:e}",
            lambda_cap * t_2.sqrt()
        )));
    }
    if lambda.abs() > lambda_cap {
        return Err(Error::HypothesisViolation(format!(
            "|lambda| = {} exceeds Lambda = {lambda_cap}",
            lambda.abs()
        )));
    }
    let sched = AnnulusSchedule::derived(t_2, lambda_cap)?;
    let t_1 = sched.t_1;
    let ln_uniform = 9.0 * LN2 + 2.0 * t_1.ln() + t_2.ln();
    let modes = mode_spectrum(n, mu_max)?;
    let mut rows = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (mu, mult) in modes.positive() {
        // Regular solution shot from deep inside; below t_start the solution
        // is the pure power (c t^mu, λ c t^{mu+1}/(2μ+1)) whose tail mass is
        // added in closed form.
        let t_start = t_1 * 1e-5;
        let profile = Profile::euclidean(t_start * 0.5, t_2 * 2.0)?;
        let params = RadialParams::new(mu, lambda, profile);
        let anchor = [
            Complex64::new(1.0, 0.0),
            Complex64::new(lambda * t_start / (2.0 * mu + 1.0), 0.0),
        ];
        let traj = integrate_tau(
            &params,
            t_start.ln(),
            t_2.ln(),
            t_start.ln(),
            anchor,
            1e-10,
            &[t_1.ln()],
        )?;
        // ln ∫_0^{t_start} |B|² dt ≈ ln(t_start/(2μ+1)) for the normalized anchor
        let ln_tail = (t_start / (2.0 * mu + 1.0)).ln();
        let ln_num = crate::quad::log_add_exp(ln_tail, traj.log_l2_norm_sq(t_start, t_1)?);
        let ln_den = crate::quad::log_add_exp(ln_tail, traj.log_l2_norm_sq(t_start, t_2)?);
        let ln_measured = ln_num - ln_den;
        let pass = ln_measured <= ln_uniform;
        min_margin = min_margin.min(ln_uniform - ln_measured);
        rows.push(ModeRatioRow {
            mu,
            multiplicity: mult,
            lambda,
            theta: 0.0,
            ln_measured,
            ln_mode_bound: ln_prop32_bound(mu, &sched),
            ln_uniform_bound: ln_uniform,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(CorollaryReport {
        schedule: sched,
        lambda,
        ln_uniform_bound: ln_uniform,
        rows,
        pass,
        min_ln_margin: min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bound_formula_on_printed_example() {
        // μ=1, t=(1, 1/2, 1/4, 1/8): 2⁶·max{3/8, 2·(1/2)} = 64, hypothesis
        // checking disabled (this schedule violates t₁⁶ ≤ t₋₂).
        let s = AnnulusSchedule::unchecked(1.0, 0.5, 0.25, 0.125, 0.1);
        let b = prop32_bound(1.0, &s).unwrap();
        assert_relative_eq!(b, 64.0, max_relative = 1e-12);
        // the same radii are rejected when checking is on
        assert!(AnnulusSchedule::new(1.0, 0.5, 0.25, 0.125, 0.1).is_err());
    }

    #[test]
    fn bound_decreases_to_zero_in_mu() {
        let s = AnnulusSchedule::derived(1.0 / 32.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for mu in 1..40 {
            let b = ln_prop32_bound(mu as f64, &s);
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < -500.0); // → 0 in linear scale
    }

    #[test]
    fn corollary1_schedule_example() {
        // μ=1, t₂ = 2⁻⁵: bound = 2⁶·max{3(½t₂³)³, 2(½t₋₁³)}
        let t2: f64 = 1.0 / 32.0;
        let s = AnnulusSchedule::derived(t2, 0.1).unwrap();
        let t_m1 = s.t_m1;
        let expect = 64.0
            * f64::max(
                3.0 * (0.5 * t2.powi(3)).powi(3),
                2.0 * (0.5 * t_m1.powi(3)),
            );
        assert_relative_eq!(prop32_bound(1.0, &s).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn derived_schedule_satisfies_hypotheses_for_random_t2() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t2 = rng.gen_range(1e-6..0.0624);
            let s = AnnulusSchedule::derived(t2, 0.1 / t2.sqrt()).unwrap();
            assert!(s.validate().is_ok());
            assert!(s.t_m2 < s.t_m1 && s.t_m1 < s.t_1 && s.t_1 < s.t_2);
            assert!(6.0 * s.t_1.ln() <= s.t_m2.ln() + 1e-9);
        }
    }

    #[test]
    fn pure_mode_ratios_match_power_integrals() {
        // λ=0, μ=1: closed-form ratios for the two pure anchors.
        let t2 = 1.0 / 32.0;
        let s = AnnulusSchedule::derived(t2, 1.0).unwrap();
        let grow = measured_ratio(1.0, 0.0, &s, 0.0).unwrap();
        let expect_grow =
            (s.t_1.powi(3) - s.t_m1.powi(3)) / (s.t_2.powi(3) - s.t_m2.powi(3));
        assert_relative_eq!(grow.measured, expect_grow, max_relative = 1e-7);
        let decay = measured_ratio(1.0, 0.0, &s, std::f64::consts::FRAC_PI_2).unwrap();
        let expect_decay =
            (1.0 / s.t_m1 - 1.0 / s.t_1) / (1.0 / s.t_m2 - 1.0 / s.t_2);
        assert_relative_eq!(decay.measured, expect_decay, max_relative = 1e-7);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let s = AnnulusSchedule::derived(1.0 / 32.0, 1.0).unwrap();
        let theta = 0.7;
        let r1 = measured_ratio(2.0, 0.05, &s, theta).unwrap();
        let anchor = [
            Complex64::new(73.0 * theta.cos(), 0.0),
            Complex64::new(73.0 * theta.sin(), 0.0),
        ];
        let r2 = measured_ratio_anchor(2.0, 0.05, &s, theta, anchor).unwrap();
        assert_relative_eq!(r1.ln_measured, r2.ln_measured, epsilon = 1e-12);
    }

    #[test]
    fn complex_anchor_never_beats_real_worst_case() {
        let s = AnnulusSchedule::derived(1.0 / 32.0, 1.0).unwrap();
        let worst = max_ratio(1.0, 0.05, &s, 64).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..8 {
            let anchor = [
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ];
            if anchor[0].norm_sqr() + anchor[1].norm_sqr() < 1e-3 {
                continue;
            }
            let r = measured_ratio_anchor(1.0, 0.05, &s, f64::NAN, anchor).unwrap();
            assert!(r.ln_measured <= worst.ln_measured + 1e-9);
        }
    }

    #[test]
    fn max_ratio_dominates_grid_and_sits_on_pure_mode_at_lambda0() {
        let s = AnnulusSchedule::derived(1.0 / 32.0, 1.0).unwrap();
        let worst = max_ratio(1.0, 0.0, &s, 64).unwrap();
        for i in 0..64 {
            let theta = std::f64::consts::PI * i as f64 / 64.0;
            let r = measured_ratio(1.0, 0.0, &s, theta).unwrap();
            assert!(r.ln_measured <= worst.ln_measured + 1e-12);
        }
        // at λ=0 one of the two pure modes dominates among sampled values
        let grow = measured_ratio(1.0, 0.0, &s, 0.0).unwrap();
        let decay = measured_ratio(1.0, 0.0, &s, std::f64::consts::FRAC_PI_2).unwrap();
        let best_pure = grow.ln_measured.max(decay.ln_measured);
        assert!(worst.ln_measured <= best_pure + 0.7); // within e^0.7 of a pure mode
    }

    #[test]
    fn log_symmetric_schedule_theta_symmetry() {
        // A schedule symmetric about t₀ in log scale: swapping components
        // maps solutions to solutions, so ratio(θ) = ratio(π/2 − θ) at λ=0.
        let r: f64 = 8.0; // t2/t1 = t_m1/t_m2 = r, t1/t_m1 = 4
        let t1: f64 = 1e-3;
        let tm1 = t1 / 4.0;
        let t2 = t1 * r;
        let tm2 = tm1 / r;
        // (violates t1^6 <= t_m2 on purpose: only symmetry matters here)
        let s = AnnulusSchedule::unchecked(t2, t1, tm1, tm2, 0.0);
        for theta in [0.2f64, 0.9, 1.3] {
            let a = measured_ratio(1.0, 0.0, &s, theta).unwrap();
            let b = measured_ratio(1.0, 0.0, &s, std::f64::consts::FRAC_PI_2 - theta).unwrap();
            assert_relative_eq!(a.ln_measured, b.ln_measured, epsilon = 1e-7);
        }
    }

    #[test]
    fn corollary1_hypothesis_error_path() {
        // Λ√t₂ = 1·√(2⁻⁵) ≈ 0.177 > 1/10
        let r = corollary1_check(3, 1.0 / 32.0, 1.0, 0.5, 3.0);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn corollary2_dyadic_weights_sum_to_four_thirds() {
        let mut sum = 0.0;
        for k in 0..64 {
            let (t2k, t1k, tm1k, tm2k, w) = corollary2_dyadic(1.0 / 64.0, k);
            assert!(t2k > t1k && t1k > tm1k && tm1k > tm2k);
            sum += w;
        }
        assert_relative_eq!(sum, 4.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn corollary2_lambda0_closed_form() {
        // regular λ=0, μ=1 solution is B ∝ (t, 0): ratio = t₁³/t₂³
        let t2 = 1.0 / 64.0;
        let rep = corollary2_check(3, t2, 1.0, 0.0, 1.0).unwrap();
        let t1 = 0.5 * t2.powi(4);
        let row = &rep.rows[0];
        assert_relative_eq!(
            row.ln_measured,
            3.0 * (t1.ln() - t2.ln()),
            epsilon = 1e-6
        );
        assert!(rep.pass);
    }
}
