//! Warp profiles ρ(t) for metrics of the form dt² + ρ(t)² dσ².
//!
//! The cap profile is a round sphere whose far pole is flattened into an
//! exact Euclidean ball (`ρ(t) = L − t` near `t = L`), so two caps can be
//! joined by a neck with C¹ junctions.  All pieces are closed-form, which
//! keeps derivative evaluation exact.

use std::sync::Arc;

use crate::error::Error;
use crate::Result;

/// Quintic smoothstep: 0 → 1 on [0, 1] with vanishing first and second
/// derivatives at both ends.
pub fn smoothstep5(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

pub fn smoothstep5_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Integral of the quintic smoothstep from 0 to u (u in [0, 1]).
fn smoothstep5_integral(u: f64) -> f64 {
    u.powi(4) * (2.5 + u * (-3.0 + u))
}

/// Even C² bump used to smooth ρ near the neck waist: s(x) = |x| for
/// |x| ≥ 1, s(0) = 1/2, |s'| ≤ 1 throughout.
fn waist_blend(x: f64) -> f64 {
    let a = x.abs();
    if a >= 1.0 {
        a
    } else {
        let x2 = a * a;
        0.5 + x2 * (0.375 + x2 * (0.25 - 0.125 * x2))
    }
}

fn waist_blend_deriv(x: f64) -> f64 {
    let a = x.abs();
    if a >= 1.0 {
        x.signum()
    } else {
        let x2 = a * a;
        let d = a * (0.75 + x2 * (1.0 - 0.75 * x2));
        d * x.signum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ProfileKind {
    Euclidean,
    Constant,
    Neck,
    Cap,
    Composite,
}

/// A closed rotationally symmetric model built from a round sphere of the
/// given radius with one pole flattened into a Euclidean ball.
///
/// Layout on [0, len]: `ρ = R sin(t/R)` up to `t_j`, a quintic blend of the
/// derivative on `[t_j, t_j + blend_w]`, then exactly `ρ = len − t` on the
/// final stretch of length `collar` (the Euclidean ball around the flat
/// pole, which is the gluing site).
#[derive(Clone, Debug)]
pub struct Cap {
    pub radius: f64,
    theta_j: f64,
    blend_w: f64,
    pub collar: f64,
    pub len: f64,
}

impl Cap {
    fn eval(&self, t: f64) -> f64 {
        let t_j = self.radius * self.theta_j;
        if t <= t_j {
            self.radius * (t / self.radius).sin()
        } else if t < t_j + self.blend_w {
            let u = (t - t_j) / self.blend_w;
            let cj = self.theta_j.cos();
            self.radius * self.theta_j.sin()
                + self.blend_w
                    * (-u + (1.0 + cj) * (u - smoothstep5_integral(u)))
        } else {
            self.len - t
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        let t_j = self.radius * self.theta_j;
        if t <= t_j {
            (t / self.radius).cos()
        } else if t < t_j + self.blend_w {
            let u = (t - t_j) / self.blend_w;
            -1.0 + (1.0 + self.theta_j.cos()) * (1.0 - smoothstep5(u))
        } else {
            -1.0
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let t_j = self.radius * self.theta_j;
        vec![t_j, t_j + self.blend_w]
    }
}

#[derive(Debug)]
enum Repr {
    /// ρ(t) = t on [t_lo, t_hi], 0 ≤ t_lo < t_hi.
    Euclidean { t_lo: f64, t_hi: f64 },
    /// ρ ≡ rho0 on [t_lo, t_hi].
    Constant { rho0: f64, t_lo: f64, t_hi: f64 },
    /// ρ(t) = |t| for |t| ≥ waist, smoothed below; domain [−half_len, half_len].
    Neck { waist: f64, half_len: f64 },
    Cap(Cap),
    /// Two caps joined at `junction = cap1.len` by a neck of the given waist.
    Glued {
        cap1: Cap,
        cap2: Cap,
        waist: f64,
        junction: f64,
        len: f64,
    },
}

/// A warp profile: positive smooth ρ on an interval, with exact derivative.
#[derive(Clone, Debug)]
pub struct Profile {
    repr: Arc<Repr>,
}

impl Profile {
    pub fn euclidean(t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(0.0 <= t_lo && t_lo < t_hi) {
            return Err(Error::InvalidArgument(format!(
                "euclidean profile needs 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]"
            )));
        }
        Ok(Self {
            repr: Arc::new(Repr::Euclidean { t_lo, t_hi }),
        })
    }

    pub fn constant(rho0: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if rho0 <= 0.0 || t_lo >= t_hi {
            return Err(Error::InvalidArgument(format!(
                "constant profile needs rho0 > 0 and t_lo < t_hi, got rho0={rho0}, [{t_lo}, {t_hi}]"
            )));
        }
        Ok(Self {
            repr: Arc::new(Repr::Constant { rho0, t_lo, t_hi }),
        })
    }

    pub fn neck(waist: f64, half_len: f64) -> Result<Self> {
        if waist <= 0.0 || half_len <= waist {
            return Err(Error::InvalidArgument(format!(
                "neck needs 0 < waist < half_len, got waist={waist:e}, half_len={half_len:e}"
            )));
        }
        Ok(Self {
            repr: Arc::new(Repr::Neck { waist, half_len }),
        })
    }

    /// Round cap of the given radius with a flat Euclidean collar of radius
    /// `opening` around the far pole.
    pub fn round_cap(radius: f64, opening: f64) -> Result<Self> {
        Ok(Self {
            repr: Arc::new(Repr::Cap(build_cap(radius, opening)?)),
        })
    }

    pub(crate) fn glued(cap1: &Profile, cap2: &Profile, waist: f64) -> Result<Self> {
        let (c1, c2) = match (&*cap1.repr, &*cap2.repr) {
            (Repr::Cap(a), Repr::Cap(b)) => (a.clone(), b.clone()),
            _ => {
                return Err(Error::InvalidArgument(
                    "glued profile requires two cap profiles".into(),
                ))
            }
        };
        if waist <= 0.0 || waist >= c1.collar || waist >= c2.collar {
            return Err(Error::InvalidArgument(format!(
                "neck waist {waist:e} must be positive and smaller than both collars ({:e}, {:e})",
                c1.collar, c2.collar
            )));
        }
        let junction = c1.len;
        let len = c1.len + c2.len;
        Ok(Self {
            repr: Arc::new(Repr::Glued {
                cap1: c1,
                cap2: c2,
                waist,
                junction,
                len,
            }),
        })
    }

    pub fn kind(&self) -> ProfileKind {
        match &*self.repr {
            Repr::Euclidean { .. } => ProfileKind::Euclidean,
            Repr::Constant { .. } => ProfileKind::Constant,
            Repr::Neck { .. } => ProfileKind::Neck,
            Repr::Cap(_) => ProfileKind::Cap,
            Repr::Glued { .. } => ProfileKind::Composite,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match &*self.repr {
            Repr::Euclidean { t_lo, t_hi } | Repr::Constant { t_lo, t_hi, .. } => (*t_lo, *t_hi),
            Repr::Neck { half_len, .. } => (-half_len, *half_len),
            Repr::Cap(c) => (0.0, c.len),
            Repr::Glued { len, .. } => (0.0, *len),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &*self.repr {
            Repr::Euclidean { .. } => t,
            Repr::Constant { rho0, .. } => *rho0,
            Repr::Neck { waist, .. } => waist * waist_blend(t / waist),
            Repr::Cap(c) => c.eval(t),
            Repr::Glued {
                cap1,
                cap2,
                waist,
                junction,
                len,
            } => {
                if t <= junction - waist {
                    cap1.eval(t)
                } else if t >= junction + waist {
                    cap2.eval(len - t)
                } else {
                    waist * waist_blend((t - junction) / waist)
                }
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &*self.repr {
            Repr::Euclidean { .. } => 1.0,
            Repr::Constant { .. } => 0.0,
            Repr::Neck { waist, .. } => waist_blend_deriv(t / waist),
            Repr::Cap(c) => c.deriv(t),
            Repr::Glued {
                cap1,
                cap2,
                waist,
                junction,
                len,
            } => {
                if t <= junction - waist {
                    cap1.deriv(t)
                } else if t >= junction + waist {
                    -cap2.deriv(len - t)
                } else {
                    waist_blend_deriv((t - junction) / waist)
                }
            }
        }
    }

    /// Interior points where the profile switches between closed-form
    /// pieces; integration steps land on these exactly.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &*self.repr {
            Repr::Euclidean { .. } | Repr::Constant { .. } => Vec::new(),
            Repr::Neck { waist, .. } => vec![-waist, *waist],
            Repr::Cap(c) => c.breakpoints(),
            Repr::Glued {
                cap1,
                cap2,
                waist,
                junction,
                len,
            } => {
                let mut bs = cap1.breakpoints();
                bs.push(junction - waist);
                bs.push(junction + waist);
                for b in cap2.breakpoints() {
                    bs.push(len - b);
                }
                bs.sort_by(f64::total_cmp);
                bs
            }
        }
    }

    /// Smallest geometric feature relevant for absolute tolerances on the
    /// radial coordinate (the neck waist where one exists).
    pub fn scale_floor(&self) -> f64 {
        match &*self.repr {
            Repr::Euclidean { t_lo, .. } => (*t_lo).max(f64::MIN_POSITIVE),
            Repr::Constant { rho0, .. } => *rho0,
            Repr::Neck { waist, .. } => *waist,
            Repr::Cap(_) => f64::INFINITY,
            Repr::Glued { waist, .. } => *waist,
        }
    }

    /// sup of ρ over [lo, hi] by dense sampling plus breakpoints.
    pub fn sup_on(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        self.sample_extremum(lo, hi, samples, |p, t| p.eval(t))
    }

    /// sup of |ρ̇| over [lo, hi] by dense sampling plus breakpoints.
    pub fn sup_abs_deriv_on(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        self.sample_extremum(lo, hi, samples, |p, t| p.deriv(t).abs())
    }

    fn sample_extremum(
        &self,
        lo: f64,
        hi: f64,
        samples: usize,
        f: impl Fn(&Self, f64) -> f64,
    ) -> f64 {
        let n = samples.max(2);
        let mut m = f64::NEG_INFINITY;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            m = m.max(f(self, t));
        }
        for b in self.breakpoints() {
            if b >= lo && b <= hi {
                m = m.max(f(self, b));
            }
        }
        m
    }

    /// For glued profiles, the t-range covered by the second cap
    /// (junction+waist .. len).  Used to localize potentials.
    pub fn second_cap_range(&self) -> Option<(f64, f64)> {
        match &*self.repr {
            Repr::Glued {
                junction,
                waist,
                len,
                ..
            } => Some((junction + waist, *len)),
            _ => None,
        }
    }

    pub fn junction(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Glued { junction, .. } => Some(*junction),
            _ => None,
        }
    }

    pub fn cap_lengths(&self) -> Option<(f64, f64)> {
        match &*self.repr {
            Repr::Glued { cap1, cap2, .. } => Some((cap1.len, cap2.len)),
            Repr::Cap(c) => Some((c.len, 0.0)),
            _ => None,
        }
    }

    pub fn collar(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Cap(c) => Some(c.collar),
            _ => None,
        }
    }
}

fn build_cap(radius: f64, opening: f64) -> Result<Cap> {
    if radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cap radius must be positive, got {radius}"
        )));
    }
    if opening <= 0.0 || opening >= radius / 2.0 {
        return Err(Error::InvalidArgument(format!(
            "cap opening must lie in (0, radius/2), got {opening} for radius {radius}"
        )));
    }
    // Leave the sine at the angle where, after a blend of width `opening`,
    // the remaining straight stretch has length exactly `opening`:
    //   R sin θ − (opening/2)(1 − cos θ) = opening.
    let w = opening;
    let f = |theta: f64| radius * theta.sin() - 0.5 * w * (1.0 - theta.cos()) - opening;
    let mut lo = std::f64::consts::FRAC_PI_2;
    let mut hi = std::f64::consts::PI;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let theta_j = 0.5 * (lo + hi);
    let t_j = radius * theta_j;
    let collar = radius * theta_j.sin() - 0.5 * w * (1.0 - theta_j.cos());
    let len = t_j + w + collar;
    Ok(Cap {
        radius,
        theta_j,
        blend_w: w,
        collar,
        len,
    })
}
