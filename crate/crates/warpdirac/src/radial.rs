//! The radial 2×2 systems equivalent to the Dirac eigenequation on warped
//! products, and their numerical integration.
//!
//! On a Euclidean annulus (ρ(t) = t) the system for the mode-μ coefficient
//! pair B = (β₋, β₊) is
//!
//! ```text
//!     Ḃ(t) = [ μ/t   −λ  ] B(t),
//!            [  λ   −μ/t ]
//! ```
//!
//! and the substitution t = e^τ turns it into a bounded-coefficient system,
//! which is the form everything here integrates.  For a general profile the
//! analogous substitution is the arclength-type coordinate σ with
//! dt/dσ = ρ(t); the coefficient matrix becomes [[μ, −λρ], [λρ, −μ]], which
//! stays bounded across arbitrarily thin necks.  Solutions grow like
//! e^{μ|Δσ|}, so trajectories carry a running log-scale and all L² masses
//! are accumulated in log space.

use num_complex::Complex64;

use crate::error::Error;
use crate::ode::{dp45_step, error_norm, next_step_factor};
use crate::profile::{smoothstep5, Profile, ProfileKind};
use crate::quad::{gauss5, log_add_exp, log_sub_exp};
use crate::Result;

const RESCALE_HI: f64 = 1e120;
const RESCALE_LO: f64 = 1e-120;
const H_MAX: f64 = 0.25;
const MAX_STEPS: usize = 400_000;

/// Optional zeroth-order term: the radial system sees λ − V(t) in place of
/// λ.  A localized bump breaks the exact ± symmetry of the spectrum that
/// every pure warped-product model has.
#[derive(Clone, Debug)]
pub enum Potential {
    Zero,
    Bump {
        center: f64,
        plateau: f64,
        falloff: f64,
        amplitude: f64,
    },
}

impl Potential {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Bump {
                center,
                plateau,
                falloff,
                amplitude,
            } => {
                let d = (t - center).abs();
                if d <= plateau {
                    amplitude
                } else if d < plateau + falloff {
                    amplitude * (1.0 - smoothstep5((d - plateau) / falloff))
                } else {
                    0.0
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Potential::Zero => Vec::new(),
            Potential::Bump {
                center,
                plateau,
                falloff,
                ..
            } => vec![
                center - plateau - falloff,
                center - plateau,
                center + plateau,
                center + plateau + falloff,
            ],
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }
}

#[derive(Clone, Debug)]
pub struct RadialParams {
    pub mu: f64,
    pub lambda: f64,
    pub profile: Profile,
    pub potential: Potential,
}

impl RadialParams {
    pub fn new(mu: f64, lambda: f64, profile: Profile) -> Self {
        Self {
            mu,
            lambda,
            profile,
            potential: Potential::Zero,
        }
    }

    fn effective_lambda(&self, t: f64) -> f64 {
        self.lambda - self.potential.eval(t)
    }
}

/// Which independent coordinate the trajectory is parametrized by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    /// τ = ln t (Euclidean profile only).
    LogRadius,
    /// σ with dt/dσ = ρ(t) (any profile).
    ArcLog,
}

#[derive(Clone, Debug)]
pub struct Sample {
    /// Independent coordinate (τ or σ).
    pub x: f64,
    /// Radial coordinate t.
    pub t: f64,
    /// Scaled solution value; the true value is `b · exp(log_scale)`.
    pub b: [Complex64; 2],
    pub log_scale: f64,
    /// d(b)/dx at this sample, at the same scale as `b`.
    pub db: [Complex64; 2],
    /// dt/dx at this sample.
    pub dt: f64,
    /// ln of the cumulative L² mass ∫ |B|² dt from the trajectory's left end.
    pub log_mass: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: RadialParams,
    pub coord: Coord,
    samples: Vec<Sample>,
    anchor_index: usize,
}

fn bnorm(y: &[f64]) -> f64 {
    (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]).sqrt()
}

/// Right-hand sides.  State layout: [Re β₋, Im β₋, Re β₊, Im β₊, (t,) q].
fn rhs_log(params: &RadialParams, tau: f64, y: &[f64; 5]) -> [f64; 5] {
    let t = tau.exp();
    let a = params.effective_lambda(t) * t;
    let mu = params.mu;
    [
        mu * y[0] - a * y[2],
        mu * y[1] - a * y[3],
        a * y[0] - mu * y[2],
        a * y[1] - mu * y[3],
        (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]) * t,
    ]
}

fn rhs_arc(params: &RadialParams, y: &[f64; 6]) -> [f64; 6] {
    let t = y[4];
    let rho = params.profile.eval(t);
    let a = params.effective_lambda(t) * rho;
    let mu = params.mu;
    [
        mu * y[0] - a * y[2],
        mu * y[1] - a * y[3],
        a * y[0] - mu * y[2],
        a * y[1] - mu * y[3],
        rho,
        (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]) * rho,
    ]
}

struct RawSample {
    x: f64,
    t: f64,
    b: [Complex64; 2],
    log_scale: f64,
    db: [Complex64; 2],
    dt: f64,
    /// ln mass of the panel between this sample and the previous one in
    /// sweep order (NEG_INFINITY for the sweep's first sample).
    panel: f64,
}

fn complex_pair(y: &[f64]) -> [Complex64; 2] {
    [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])]
}

/// One adaptive sweep in τ for a Euclidean profile.  `stops` are τ values
/// that steps must land on exactly (sorted in travel direction).
fn sweep_log(
    params: &RadialParams,
    tau0: f64,
    tau_end: f64,
    b0: [Complex64; 2],
    rtol: f64,
    stops: &[f64],
) -> Result<Vec<RawSample>> {
    let dir = if tau_end >= tau0 { 1.0 } else { -1.0 };
    let mut y = [b0[0].re, b0[0].im, b0[1].re, b0[1].im, 0.0];
    let mut ls = 0.0_f64;
    let mut x = tau0;
    let mut f0 = rhs_log(params, x, &y);
    let mut out = vec![RawSample {
        x,
        t: x.exp(),
        b: complex_pair(&y),
        log_scale: ls,
        db: complex_pair(&f0),
        dt: x.exp(),
        panel: f64::NEG_INFINITY,
    }];
    if tau0 == tau_end {
        return Ok(out);
    }
    let mut stop_iter = stops.iter().copied().filter(|s| (s - tau0) * dir > 1e-14);
    let mut next_stop = stop_iter.next();

    let mut h = dir * 1e-3;
    let mut steps = 0usize;
    while (tau_end - x) * dir > 0.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepBudgetExhausted { steps, x });
        }
        // Clamp to the next mandatory landing point.
        let target = next_stop.unwrap_or(tau_end);
        if (x + h - target) * dir >= 0.0 {
            h = target - x;
        }
        let mut f = |xx: f64, yy: &[f64; 5]| rhs_log(params, xx, yy);
        let (y1, err, f1) = dp45_step(&mut f, x, &y, &f0, h);
        let scale = rtol * bnorm(&y).max(bnorm(&y1));
        let w = [scale, scale, scale, scale, f64::INFINITY];
        let en = error_norm(&err, &w);
        if en > 1.0 {
            h *= next_step_factor(en);
            if h.abs() < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::StepSizeUnderflow { x, h });
            }
            continue;
        }
        // Accept.
        let x1 = if (x + h - target).abs() < 1e-13 * (1.0 + target.abs()) {
            target
        } else {
            x + h
        };
        // q integrates to a negative value on backward sweeps; the panel
        // mass is its magnitude either way.
        let dq = y1[4].abs();
        let panel = if dq > 0.0 {
            dq.ln() + 2.0 * ls
        } else {
            f64::NEG_INFINITY
        };
        let mut y_next = y1;
        y_next[4] = 0.0;
        let mut f_next = f1;
        out.push(RawSample {
            x: x1,
            t: x1.exp(),
            b: complex_pair(&y_next),
            log_scale: ls,
            db: complex_pair(&f_next),
            dt: x1.exp(),
            panel,
        });
        let s = bnorm(&y_next);
        if s > RESCALE_HI || (s > 0.0 && s < RESCALE_LO) {
            for v in y_next[..4].iter_mut() {
                *v /= s;
            }
            for v in f_next[..4].iter_mut() {
                *v /= s;
            }
            f_next[4] /= s * s;
            ls += s.ln();
        }
        y = y_next;
        f0 = f_next;
        x = x1;
        if next_stop == Some(x) || next_stop.map_or(false, |t| (t - x) * dir <= 0.0) {
            next_stop = stop_iter.next();
        }
        h = (h * next_step_factor(en)).clamp(-H_MAX, H_MAX);
        if h == 0.0 {
            h = dir * 1e-6;
        }
    }
    Ok(out)
}

/// One adaptive sweep in σ for a general profile.  `t_stops` are radial
/// coordinates that must be landed on exactly (sorted in travel
/// direction); steps that would cross one are shortened by a secant
/// iteration on the step size.
fn sweep_arc(
    params: &RadialParams,
    t0: f64,
    t_end: f64,
    b0: [Complex64; 2],
    rtol: f64,
    t_stops: &[f64],
    t_floor: f64,
) -> Result<Vec<RawSample>> {
    let (lo, hi) = params.profile.domain();
    if t0 < lo - 1e-12 || t0 > hi + 1e-12 || t_end < lo - 1e-12 || t_end > hi + 1e-12 {
        return Err(Error::ProfileEvaluation(format!(
            "integration range [{t0:e}, {t_end:e}] outside profile domain [{lo:e}, {hi:e}]"
        )));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut y = [b0[0].re, b0[0].im, b0[1].re, b0[1].im, t0, 0.0];
    let mut ls = 0.0_f64;
    let mut x = 0.0_f64; // σ gauge: 0 at the anchor
    let mut f0 = rhs_arc(params, &y);
    if !(f0[4] > 0.0) {
        return Err(Error::ProfileEvaluation(format!(
            "profile not positive at t = {t0:e}"
        )));
    }
    let mut out = vec![RawSample {
        x,
        t: t0,
        b: complex_pair(&y),
        log_scale: ls,
        db: complex_pair(&f0),
        dt: f0[4],
        panel: f64::NEG_INFINITY,
    }];
    if t0 == t_end {
        return Ok(out);
    }
    let snap = |target: f64| 1e-12 * target.abs().max(t_floor);
    let mut stop_iter = t_stops
        .iter()
        .copied()
        .filter(|s| (s - t0) * dir > snap(*s));
    let mut next_stop = stop_iter.next().unwrap_or(t_end);

    let mut h = dir * 1e-3;
    let mut steps = 0usize;
    let mut cut_tries = 0u32;
    while (t_end - y[4]) * dir > snap(t_end) {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepBudgetExhausted { steps, x });
        }
        let mut f = |_xx: f64, yy: &[f64; 6]| rhs_arc(params, yy);
        let (y1, err, f1) = dp45_step(&mut f, x, &y, &f0, h);
        let bscale = rtol * bnorm(&y).max(bnorm(&y1));
        let w = [
            bscale,
            bscale,
            bscale,
            bscale,
            rtol * y[4].abs().max(t_floor),
            f64::INFINITY,
        ];
        let en = error_norm(&err, &w);
        if en > 1.0 {
            h *= next_step_factor(en);
            if h.abs() < 1e-16 {
                return Err(Error::StepSizeUnderflow { x, h });
            }
            continue;
        }
        // Shorten the step if it crossed the next mandatory t-stop.
        let overshoot = (y1[4] - next_stop) * dir;
        if overshoot > snap(next_stop) && cut_tries < 16 {
            let frac = (next_stop - y[4]) / (y1[4] - y[4]);
            h *= frac.clamp(1e-6, 1.0);
            cut_tries += 1;
            continue;
        }
        cut_tries = 0;
        let mut y_next = y1;
        let landed = (y_next[4] - next_stop).abs() <= snap(next_stop);
        if landed {
            y_next[4] = next_stop;
        }
        let dq = y_next[5].abs();
        let panel = if dq > 0.0 {
            dq.ln() + 2.0 * ls
        } else {
            f64::NEG_INFINITY
        };
        y_next[5] = 0.0;
        let mut f_next = if landed { rhs_arc(params, &y_next) } else { f1 };
        out.push(RawSample {
            x: x + h,
            t: y_next[4],
            b: complex_pair(&y_next),
            log_scale: ls,
            db: complex_pair(&f_next),
            dt: f_next[4],
            panel,
        });
        let s = bnorm(&y_next);
        if s > RESCALE_HI || (s > 0.0 && s < RESCALE_LO) {
            for v in y_next[..4].iter_mut() {
                *v /= s;
            }
            for v in f_next[..4].iter_mut() {
                *v /= s;
            }
            f_next[5] /= s * s;
            ls += s.ln();
        }
        x += h;
        y = y_next;
        f0 = f_next;
        if landed {
            next_stop = stop_iter.next().unwrap_or(t_end);
        }
        h = (h * next_step_factor(en)).clamp(-H_MAX, H_MAX);
        if h == 0.0 {
            h = dir * 1e-6;
        }
    }
    Ok(out)
}

fn merge_sweeps(
    params: &RadialParams,
    coord: Coord,
    left: Vec<RawSample>,
    right: Vec<RawSample>,
) -> Trajectory {
    // left[0] and right[0] are both the anchor.
    let mut raws: Vec<RawSample> = Vec::with_capacity(left.len() + right.len() - 1);
    let nl = left.len();
    let mut left = left;
    let mut right = right;
    // Reassign panel masses so each sample's `panel` is the mass directly
    // below it in ascending order: left[i] recorded the panel between
    // itself and left[i-1], which after reversal sits above it.
    for i in 1..nl {
        left[i - 1].panel = left[i].panel;
    }
    left[nl - 1].panel = f64::NEG_INFINITY;
    left.reverse();
    raws.append(&mut left);
    let anchor_index = raws.len() - 1;
    raws.append(&mut right.split_off(1));

    let mut samples = Vec::with_capacity(raws.len());
    let mut lm = f64::NEG_INFINITY;
    for (i, r) in raws.into_iter().enumerate() {
        if i > 0 {
            lm = log_add_exp(lm, r.panel);
        }
        samples.push(Sample {
            x: r.x,
            t: r.t,
            b: r.b,
            log_scale: r.log_scale,
            db: r.db,
            dt: r.dt,
            log_mass: lm,
        });
    }
    Trajectory {
        params: params.clone(),
        coord,
        samples,
        anchor_index,
    }
}

/// Integrate the radial system over a τ-interval from an anchor value.
/// Requires a Euclidean profile (where τ = ln t is exact).
pub fn integrate_tau(
    params: &RadialParams,
    tau_lo: f64,
    tau_hi: f64,
    tau_anchor: f64,
    b_anchor: [Complex64; 2],
    rtol: f64,
    checkpoints_tau: &[f64],
) -> Result<Trajectory> {
    if params.profile.kind() != ProfileKind::Euclidean {
        return Err(Error::InvalidArgument(
            "integrate_tau requires the Euclidean profile".into(),
        ));
    }
    if !(rtol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if tau_anchor < tau_lo - 1e-12 || tau_anchor > tau_hi + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "anchor τ = {tau_anchor} outside [{tau_lo}, {tau_hi}]"
        )));
    }
    let (dlo, dhi) = params.profile.domain();
    if tau_lo.exp() < dlo - 1e-12 * dlo.abs().max(1.0) || tau_hi.exp() > dhi * (1.0 + 1e-12) {
        return Err(Error::ProfileEvaluation(format!(
            "τ-interval [{tau_lo}, {tau_hi}] maps outside the profile domain [{dlo:e}, {dhi:e}]"
        )));
    }
    let mut stops_up: Vec<f64> = checkpoints_tau
        .iter()
        .copied()
        .filter(|&s| s > tau_anchor && s < tau_hi)
        .collect();
    stops_up.sort_by(f64::total_cmp);
    let mut stops_down: Vec<f64> = checkpoints_tau
        .iter()
        .copied()
        .filter(|&s| s < tau_anchor && s > tau_lo)
        .collect();
    stops_down.sort_by(|a, b| b.total_cmp(a));

    let left = sweep_log(params, tau_anchor, tau_lo, b_anchor, rtol, &stops_down)?;
    let right = sweep_log(params, tau_anchor, tau_hi, b_anchor, rtol, &stops_up)?;
    Ok(merge_sweeps(params, Coord::LogRadius, left, right))
}

/// Integrate the radial system over a t-interval from an anchor value, in
/// the arclength-type coordinate.  Works for any profile; profile
/// breakpoints and the given checkpoints are landed on exactly.
pub fn integrate(
    params: &RadialParams,
    t_lo: f64,
    t_hi: f64,
    t_anchor: f64,
    b_anchor: [Complex64; 2],
    rtol: f64,
    checkpoints_t: &[f64],
) -> Result<Trajectory> {
    if !(rtol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if t_anchor < t_lo || t_anchor > t_hi {
        return Err(Error::InvalidArgument(format!(
            "anchor t = {t_anchor:e} outside [{t_lo:e}, {t_hi:e}]"
        )));
    }
    let mut stops: Vec<f64> = params
        .profile
        .breakpoints()
        .into_iter()
        .chain(params.potential.breakpoints())
        .chain(checkpoints_t.iter().copied())
        .filter(|&t| t > t_lo && t < t_hi)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    let t_floor = params
        .profile
        .scale_floor()
        .min(t_anchor.abs().max(f64::MIN_POSITIVE))
        .min((t_hi - t_lo).abs());

    let mut down: Vec<f64> = stops.iter().copied().filter(|&s| s < t_anchor).collect();
    down.reverse();
    let up: Vec<f64> = stops.iter().copied().filter(|&s| s > t_anchor).collect();

    let left = sweep_arc(params, t_anchor, t_lo, b_anchor, rtol, &down, t_floor)?;
    let right = sweep_arc(params, t_anchor, t_hi, b_anchor, rtol, &up, t_floor)?;
    Ok(merge_sweeps(params, Coord::ArcLog, left, right))
}

fn hermite(
    s0: &Sample,
    s1: &Sample,
    x: f64,
) -> ([Complex64; 2], f64 /* log_scale */, f64 /* t */) {
    let h = s1.x - s0.x;
    let u = if h == 0.0 { 0.0 } else { (x - s0.x) / h };
    let ls = s0.log_scale.max(s1.log_scale);
    let a0 = (s0.log_scale - ls).exp();
    let a1 = (s1.log_scale - ls).exp();
    let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    let h10 = u * (1.0 - u) * (1.0 - u);
    let h01 = u * u * (3.0 - 2.0 * u);
    let h11 = u * u * (u - 1.0);
    let mut b = [Complex64::default(); 2];
    for i in 0..2 {
        b[i] = s0.b[i] * (h00 * a0)
            + s0.db[i] * (h10 * h * a0)
            + s1.b[i] * (h01 * a1)
            + s1.db[i] * (h11 * h * a1);
    }
    let t = s0.t * h00 + s0.dt * h10 * h + s1.t * h01 + s1.dt * h11 * h;
    (b, ls, t)
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn anchor(&self) -> &Sample {
        &self.samples[self.anchor_index]
    }

    /// Coverage in the radial coordinate t.
    pub fn t_range(&self) -> (f64, f64) {
        let a = self.samples.first().unwrap().t;
        let b = self.samples.last().unwrap().t;
        (a.min(b), a.max(b))
    }

    fn ascending_in_t(&self) -> bool {
        self.samples.first().unwrap().t <= self.samples.last().unwrap().t
    }

    /// Locate the sample panel containing radial coordinate t and return
    /// the x-coordinate there (Newton on the Hermite interpolant of t(x)).
    pub fn x_of_t(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        if t < lo - 1e-12 * lo.abs().max(1.0) || t > hi + 1e-12 * hi.abs().max(1.0) {
            return Err(Error::IntervalOutsideCoverage {
                lo: t,
                hi: t,
                cov_lo: lo,
                cov_hi: hi,
            });
        }
        if self.coord == Coord::LogRadius {
            return Ok(t.ln());
        }
        let asc = self.ascending_in_t();
        // binary search over samples on t
        let mut a = 0usize;
        let mut b = self.samples.len() - 1;
        while b - a > 1 {
            let m = (a + b) / 2;
            let tm = self.samples[m].t;
            if (tm <= t) == asc {
                a = m;
            } else {
                b = m;
            }
        }
        let (s0, s1) = (&self.samples[a], &self.samples[b]);
        if (t - s0.t).abs() <= 1e-14 * t.abs().max(1e-300) {
            return Ok(s0.x);
        }
        if (t - s1.t).abs() <= 1e-14 * t.abs().max(1e-300) {
            return Ok(s1.x);
        }
        let mut x = s0.x + (s1.x - s0.x) * (t - s0.t) / (s1.t - s0.t);
        for _ in 0..40 {
            let (_, _, th) = hermite(s0, s1, x);
            let dt = 0.5 * (s0.dt + s1.dt);
            let step = (th - t) / dt;
            x -= step;
            x = x.clamp(s0.x.min(s1.x), s0.x.max(s1.x));
            if step.abs() <= 1e-14 * (s1.x - s0.x).abs().max(1e-300) {
                break;
            }
        }
        Ok(x)
    }

    /// Scaled solution value at coordinate x (Hermite between samples).
    pub fn value_scaled(&self, x: f64) -> ([Complex64; 2], f64) {
        let i = self.panel_index(x);
        let (b, ls, _) = hermite(&self.samples[i], &self.samples[i + 1], x);
        (b, ls)
    }

    /// Unscaled solution value; may overflow to ±inf for extreme ranges.
    pub fn value(&self, x: f64) -> [Complex64; 2] {
        let (b, ls) = self.value_scaled(x);
        let s = ls.exp();
        [b[0] * s, b[1] * s]
    }

    fn panel_index(&self, x: f64) -> usize {
        let asc = self.samples.first().unwrap().x <= self.samples.last().unwrap().x;
        let n = self.samples.len();
        let mut a = 0usize;
        let mut b = n - 1;
        while b - a > 1 {
            let m = (a + b) / 2;
            if (self.samples[m].x <= x) == asc {
                a = m;
            } else {
                b = m;
            }
        }
        a
    }

    fn jacobian(&self, t: f64) -> f64 {
        match self.coord {
            Coord::LogRadius => t,
            Coord::ArcLog => self.params.profile.eval(t),
        }
    }

    /// ln of ∫ w(t) |B(t)|² dt over a partial panel [xa, xb] within panel i.
    fn panel_partial_log(&self, i: usize, xa: f64, xb: f64, w: &mut impl FnMut(f64) -> f64) -> f64 {
        if xa == xb {
            return f64::NEG_INFINITY;
        }
        let s0 = &self.samples[i];
        let s1 = &self.samples[i + 1];
        let ls = s0.log_scale.max(s1.log_scale);
        let v = gauss5(
            &mut |x| {
                let (b, lsh, t) = hermite(s0, s1, x);
                let adj = (lsh - ls).exp();
                let n2 = (b[0].norm_sqr() + b[1].norm_sqr()) * adj * adj;
                n2 * w(t) * self.jacobian(t)
            },
            xa.min(xb),
            xa.max(xb),
        );
        if v <= 0.0 {
            f64::NEG_INFINITY
        } else {
            v.ln() + 2.0 * ls
        }
    }

    /// ln of ∫_{ta}^{tb} |B(t)|² dt, assembled from the exact per-panel
    /// masses accumulated during integration (partial end panels via
    /// quadrature on the interpolant).
    pub fn log_l2_norm_sq(&self, ta: f64, tb: f64) -> Result<f64> {
        self.log_weighted_l2(ta, tb, &mut |_| 1.0, true)
    }

    /// ∫_{ta}^{tb} |B(t)|² dt in linear scale (can overflow for extreme
    /// dynamic ranges; use the log variant for ratios).
    pub fn l2_norm_sq(&self, ta: f64, tb: f64) -> Result<f64> {
        Ok(self.log_l2_norm_sq(ta, tb)?.exp())
    }

    /// ln of ∫ w(t)|B(t)|² dt via per-panel Gauss quadrature.
    pub fn log_weighted_l2_norm_sq(
        &self,
        ta: f64,
        tb: f64,
        w: &mut impl FnMut(f64) -> f64,
    ) -> Result<f64> {
        self.log_weighted_l2(ta, tb, w, false)
    }

    fn log_weighted_l2(
        &self,
        ta: f64,
        tb: f64,
        w: &mut impl FnMut(f64) -> f64,
        unweighted_exact: bool,
    ) -> Result<f64> {
        if !(ta <= tb) {
            return Err(Error::InvalidArgument(format!(
                "bad interval [{ta:e}, {tb:e}]"
            )));
        }
        let (lo, hi) = self.t_range();
        let slack = 1e-11;
        if ta < lo * (1.0 - slack) - slack * hi.abs() || tb > hi * (1.0 + slack) + slack * hi.abs()
        {
            return Err(Error::IntervalOutsideCoverage {
                lo: ta,
                hi: tb,
                cov_lo: lo,
                cov_hi: hi,
            });
        }
        let xa = self.x_of_t(ta.max(lo))?;
        let xb = self.x_of_t(tb.min(hi))?;
        let (xa, xb) = (xa.min(xb), xb.max(xa));
        let asc_x = self.samples.first().unwrap().x <= self.samples.last().unwrap().x;

        // Indices of the first sample at/after xa and the last at/before xb
        // (in x order).
        let xs: Vec<f64> = if asc_x {
            self.samples.iter().map(|s| s.x).collect()
        } else {
            self.samples.iter().rev().map(|s| s.x).collect()
        };
        let n = xs.len();
        let eps = |x: f64| 1e-13 * x.abs().max(1e-300);
        let mut i = xs.partition_point(|&v| v < xa - eps(xa));
        let mut j = xs.partition_point(|&v| v <= xb + eps(xb));
        // j points one past the last sample <= xb
        if j == 0 || i >= n {
            // whole query inside one panel beyond sample range ends
            i = n;
            j = 0;
        }
        let map = |k: usize| if asc_x { k } else { n - 1 - k };

        if i >= j {
            // [xa, xb] lies within a single panel
            let k = map(i.saturating_sub(1).min(n - 2));
            let k = k.min(n - 2);
            return Ok(self.panel_partial_log(k, xa, xb, w));
        }

        let mut acc = f64::NEG_INFINITY;
        if unweighted_exact {
            // core: exact accumulated masses between samples i and j-1
            let (si, sj) = (map(i), map(j - 1));
            let (mi, mj) = (self.samples[si].log_mass, self.samples[sj].log_mass);
            acc = log_sub_exp(mi.max(mj), mi.min(mj));
        } else {
            for k in i..j - 1 {
                let p = map(k).min(map(k + 1));
                let s0 = &self.samples[p];
                let s1 = &self.samples[p + 1];
                acc = log_add_exp(acc, self.panel_partial_log(p, s0.x, s1.x, w));
            }
        }
        // partial panels at the ends
        if (xs[i] - xa).abs() > eps(xa) && i > 0 {
            let p = map(i - 1).min(map(i));
            acc = log_add_exp(acc, self.panel_partial_log(p, xa, xs[i], w));
        }
        if (xs[j - 1] - xb).abs() > eps(xb) && j < n {
            let p = map(j - 1).min(map(j));
            acc = log_add_exp(acc, self.panel_partial_log(p, xs[j - 1], xb, w));
        }
        Ok(acc)
    }

    /// Largest Hermite-midpoint ODE residual relative to the local solution
    /// norm; a consistency diagnostic for tests.
    pub fn max_midpoint_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in self.samples.windows(2) {
            let (s0, s1) = (&p[0], &p[1]);
            let xm = 0.5 * (s0.x + s1.x);
            let (b, _ls, t) = hermite(s0, s1, xm);
            let h = s1.x - s0.x;
            if h == 0.0 {
                continue;
            }
            // derivative of the Hermite cubic at the midpoint
            let ls = s0.log_scale.max(s1.log_scale);
            let a0 = (s0.log_scale - ls).exp();
            let a1 = (s1.log_scale - ls).exp();
            let mut db = [Complex64::default(); 2];
            for i in 0..2 {
                // H'(1/2): h00' = -3/2, h10' = -1/4, h01' = 3/2, h11' = -1/4 (per unit u)
                db[i] = (s0.b[i] * (-1.5 * a0) + s1.b[i] * (1.5 * a1)) / h
                    + s0.db[i] * (-0.25 * a0)
                    + s1.db[i] * (-0.25 * a1);
            }
            let mu = self.params.mu;
            let a = match self.coord {
                Coord::LogRadius => self.params.effective_lambda(t) * t,
                Coord::ArcLog => self.params.effective_lambda(t) * self.params.profile.eval(t),
            };
            let rhs0 = b[0] * mu - b[1] * a;
            let rhs1 = b[0] * a - b[1] * mu;
            let num = ((db[0] - rhs0).norm_sqr() + (db[1] - rhs1).norm_sqr()).sqrt();
            let den = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt().max(1e-300);
            worst = worst.max(num / den);
        }
        worst
    }

    /// Rows (coordinate, Re β₋, Im β₋, Re β₊, Im β₊) in the columnar text
    /// layout used for plotting.
    pub fn columnar_rows(&self) -> Vec<[f64; 5]> {
        self.samples
            .iter()
            .map(|s| {
                let sc = s.log_scale.exp();
                [
                    s.x,
                    s.b[0].re * sc,
                    s.b[0].im * sc,
                    s.b[1].re * sc,
                    s.b[1].im * sc,
                ]
            })
            .collect()
    }
}

/// Exact power-law trajectory t ↦ (c₁ (t/t₀)^μ, c₂ (t/t₀)^{−μ}).
///
/// For λ = 0 this solves the Euclidean radial system exactly; for λ ≠ 0 it
/// is the comparison trajectory whose defect the deviation estimate is fed
/// with.
#[derive(Clone, Debug)]
pub struct PowerSolution {
    pub mu: f64,
    pub c: [Complex64; 2],
    pub t0: f64,
}

/// The λ = 0 closed-form solution of the Euclidean radial system.
pub fn exact_lambda0(mu: f64, c1: Complex64, c2: Complex64, t0: f64) -> Result<PowerSolution> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("t0 must be positive, got {t0}")));
    }
    Ok(PowerSolution { mu, c: [c1, c2], t0 })
}

/// The comparison trajectory through w at t₀ (the λ = 0 profile of the
/// anchor data).
pub fn almost_solution(w: [Complex64; 2], mu: f64, t0: f64) -> Result<PowerSolution> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("t0 must be positive, got {t0}")));
    }
    Ok(PowerSolution { mu, c: w, t0 })
}

impl PowerSolution {
    pub fn tau0(&self) -> f64 {
        self.t0.ln()
    }

    pub fn value(&self, t: f64) -> [Complex64; 2] {
        self.value_tau(t.ln())
    }

    pub fn value_tau(&self, tau: f64) -> [Complex64; 2] {
        let d = tau - self.tau0();
        [
            self.c[0] * (self.mu * d).exp(),
            self.c[1] * (-self.mu * d).exp(),
        ]
    }

    pub fn deriv_tau(&self, tau: f64) -> [Complex64; 2] {
        let v = self.value_tau(tau);
        [v[0] * self.mu, v[1] * (-self.mu)]
    }

    /// Defect |v' − A v| in the logarithmic coordinate:
    /// |λ| t (|c₁|²(t/t₀)^{2μ} + |c₂|²(t/t₀)^{−2μ})^{1/2}.
    pub fn defect_tau(&self, lambda: f64, tau: f64) -> f64 {
        let d = tau - self.tau0();
        let n2 = self.c[0].norm_sqr() * (2.0 * self.mu * d).exp()
            + self.c[1].norm_sqr() * (-2.0 * self.mu * d).exp();
        lambda.abs() * tau.exp() * n2.sqrt()
    }

    /// Exact ∫_a^b |v(t)|² dt.
    pub fn l2_norm_sq(&self, a: f64, b: f64) -> f64 {
        let p = 2.0 * self.mu;
        let grow = |t: f64| {
            // ∫ (t/t0)^p dt = t0/(p+1) (t/t0)^{p+1}
            self.t0 / (p + 1.0) * (t / self.t0).powf(p + 1.0)
        };
        let decay = |t: f64| {
            if (p - 1.0).abs() < 1e-14 {
                self.t0 * (t / self.t0).ln()
            } else {
                self.t0 / (1.0 - p) * (t / self.t0).powf(1.0 - p)
            }
        };
        self.c[0].norm_sqr() * (grow(b) - grow(a)) + self.c[1].norm_sqr() * (decay(b) - decay(a))
    }
}

/// Exact sup of the coefficient matrix operator norm over a τ-interval for
/// the Euclidean system: ‖A(τ)‖ = μ + |λ|e^τ.
pub fn op_norm_sup_tau(mu: f64, lambda: f64, tau_hi: f64) -> f64 {
    mu + lambda.abs() * tau_hi.exp()
}
