//! Embedded Dormand–Prince 5(4) step.
//!
//! Only the single-step primitive lives here; the integration drivers in
//! [`crate::radial`] own step-size control, event landing and rescaling,
//! because those policies differ between the coordinate systems.

/// One Dormand–Prince 5(4) step.
///
/// `f0` must be `f(x, y)` (FSAL: the returned `f1` equals `f(x + h, y5)` and
/// can be fed into the next step).  Returns the 5th-order solution, the
/// embedded error estimate and `f1`.
pub fn dp45_step<const D: usize>(
    f: &mut impl FnMut(f64, &[f64; D]) -> [f64; D],
    x: f64,
    y: &[f64; D],
    f0: &[f64; D],
    h: f64,
) -> ([f64; D], [f64; D], [f64; D]) {
    #[inline]
    fn axpy<const D: usize>(y: &[f64; D], h: f64, coeffs: &[(f64, &[f64; D])]) -> [f64; D] {
        let mut out = *y;
        for (c, k) in coeffs {
            for i in 0..D {
                out[i] += h * c * k[i];
            }
        }
        out
    }

    let k1 = *f0;
    let k2 = f(x + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, &k1)]));
    let k3 = f(
        x + 3.0 / 10.0 * h,
        &axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]),
    );
    let k4 = f(
        x + 4.0 / 5.0 * h,
        &axpy(
            y,
            h,
            &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
        ),
    );
    let k5 = f(
        x + 8.0 / 9.0 * h,
        &axpy(
            y,
            h,
            &[
                (19372.0 / 6561.0, &k1),
                (-25360.0 / 2187.0, &k2),
                (64448.0 / 6561.0, &k3),
                (-212.0 / 729.0, &k4),
            ],
        ),
    );
    let k6 = f(
        x + h,
        &axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, &k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, &k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let f1 = f(x + h, &y5);

    // y5 - y4, expressed through the difference of the two weight rows.
    let mut err = [0.0; D];
    let dws: [(f64, &[f64; D]); 6] = [
        (71.0 / 57600.0, &k1),
        (-71.0 / 16695.0, &k3),
        (71.0 / 1920.0, &k4),
        (-17253.0 / 339200.0, &k5),
        (22.0 / 525.0, &k6),
        (-1.0 / 40.0, &f1),
    ];
    for (c, k) in dws {
        for i in 0..D {
            err[i] += h * c * k[i];
        }
    }
    (y5, err, f1)
}

/// Weighted max-norm of an error estimate; weights of `f64::INFINITY`
/// exclude a component from control.
pub fn error_norm<const D: usize>(err: &[f64; D], weights: &[f64; D]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..D {
        if weights[i].is_finite() && weights[i] > 0.0 {
            m = m.max(err[i].abs() / weights[i]);
        }
    }
    m
}

/// Standard PI-free step-size update from the weighted error norm.
pub fn next_step_factor(err_norm: f64) -> f64 {
    if err_norm <= 0.0 {
        return 5.0;
    }
    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
}
