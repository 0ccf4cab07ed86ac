//! Quadrature and log-domain accumulation helpers.

/// ln(e^a + e^b) without overflow; `f64::NEG_INFINITY` is the additive zero.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(e^a − e^b) for a ≥ b; clamps tiny negative differences to −∞.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a <= b {
        return f64::NEG_INFINITY;
    }
    let d = -(b - a).exp_m1(); // 1 − e^{b−a} ∈ (0, 1]
    a + d.ln()
}

/// Abscissas/weights of 5-point Gauss–Legendre on [−1, 1].
pub const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// 5-point Gauss–Legendre quadrature of `f` over [a, b].
pub fn gauss5(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL5 {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Simpson quadrature with absolute/relative tolerance.
///
/// Returns exactly 0.0 on an empty interval so callers can rely on the
/// bound-at-anchor-is-zero property without slack.
pub fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-300) {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_matches_closed_forms() {
        let v = adaptive_simpson(&mut |x: f64| x * x, 1.0, 2.0, 1e-12);
        assert_relative_eq!(v, 7.0 / 3.0, max_relative = 1e-12);
        let v = adaptive_simpson(&mut |x: f64| x.exp(), 0.0, 3.0, 1e-12);
        assert_relative_eq!(v, 3f64.exp() - 1.0, max_relative = 1e-11);
    }

    #[test]
    fn simpson_empty_interval_is_exactly_zero() {
        assert_eq!(adaptive_simpson(&mut |x: f64| x.cos(), 1.3, 1.3, 1e-10), 0.0);
    }

    #[test]
    fn log_ops_roundtrip() {
        let a = (3.0f64).ln();
        let b = (2.0f64).ln();
        assert_relative_eq!(log_add_exp(a, b).exp(), 5.0, max_relative = 1e-14);
        assert_relative_eq!(log_sub_exp(a, b).exp(), 1.0, max_relative = 1e-13);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, b), b);
        assert_eq!(log_sub_exp(b, b), f64::NEG_INFINITY);
    }

    #[test]
    fn gauss5_is_exact_on_low_degree_polynomials() {
        let v = gauss5(&mut |x: f64| x.powi(8) - 2.0 * x.powi(3) + 1.0, -1.0, 2.0);
        // exact: x^9/9 - x^4/2 + x on [-1, 2]
        let exact = |x: f64| x.powi(9) / 9.0 - x.powi(4) / 2.0 + x;
        assert_relative_eq!(v, exact(2.0) - exact(-1.0), max_relative = 1e-13);
    }
}
