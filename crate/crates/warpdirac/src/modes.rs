//! Eigenvalues μ of the cross-sphere operator indexing the radial mode
//! decomposition.
//!
//! Only two facts about these eigenvalues enter the estimates downstream:
//! the spectrum is symmetric under μ ↔ −μ and min |μ| = (n−1)/2 ≥ 1 for
//! n ≥ 3.  The closed form used here (μ = ±((n−1)/2 + k) with multiplicity
//! 2^⌊n/2⌋·C(k+n−2, k), the even-n bundle doubling folded into the count)
//! is treated as an external input; the sphere-model oracle test validates
//! it for n = 3.

use crate::error::Error;
use crate::Result;

#[derive(Clone, Debug, serde::Serialize)]
pub struct ModeSpectrum {
    pub n: u32,
    pub mu_max: f64,
    /// Sorted (μ, multiplicity) pairs, symmetric under μ ↔ −μ.
    pub modes: Vec<(f64, u64)>,
}

impl ModeSpectrum {
    /// The positive half of the spectrum; each entry indexes one radial
    /// 2×2 system.
    pub fn positive(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.modes.iter().copied().filter(|&(mu, _)| mu > 0.0)
    }

    pub fn total_multiplicity_at(&self, mu: f64, tol: f64) -> u64 {
        self.modes
            .iter()
            .filter(|(m, _)| (m - mu).abs() <= tol)
            .map(|&(_, c)| c)
            .sum()
    }
}

/// μ_k = (n−1)/2 + k for the ambient dimension n.
pub fn mode_value(n: u32, k: u32) -> f64 {
    (n as f64 - 1.0) / 2.0 + k as f64
}

/// Multiplicity of ±μ_k, with the even-n doubling folded in.
pub fn mode_multiplicity(n: u32, k: u32) -> u64 {
    let rank = 1u64 << (n / 2);
    rank * binomial(k + n - 2, k)
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// All sphere-operator eigenvalues of magnitude ≤ mu_max, with
/// multiplicities.  Requires n ≥ 3 (so that min |μ| ≥ 1) and mu_max ≥ 1
/// (so the result is nonempty).
pub fn mode_spectrum(n: u32, mu_max: f64) -> Result<ModeSpectrum> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "ambient dimension must be at least 3, got {n}"
        )));
    }
    if mu_max < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "mu_max = {mu_max} lies below the smallest eigenvalue magnitude (n-1)/2 >= 1"
        )));
    }
    let mut modes = Vec::new();
    let mut k = 0u32;
    loop {
        let mu = mode_value(n, k);
        if mu > mu_max {
            break;
        }
        let mult = mode_multiplicity(n, k);
        modes.push((-mu, mult));
        modes.push((mu, mult));
        k += 1;
    }
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ModeSpectrum { n, mu_max, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dimension_and_empty_window() {
        assert!(mode_spectrum(2, 5.0).is_err());
        assert!(mode_spectrum(3, 0.5).is_err());
    }

    #[test]
    fn n3_low_modes() {
        let ms = mode_spectrum(3, 3.5).unwrap();
        let expect = vec![
            (-3.0, 6),
            (-2.0, 4),
            (-1.0, 2),
            (1.0, 2),
            (2.0, 4),
            (3.0, 6),
        ];
        assert_eq!(ms.modes, expect);
    }

    #[test]
    fn symmetric_and_bounded_below() {
        for n in 3..8 {
            let ms = mode_spectrum(n, 9.0).unwrap();
            let min_abs = ms
                .modes
                .iter()
                .map(|(m, _)| m.abs())
                .fold(f64::INFINITY, f64::min);
            assert!(min_abs >= 1.0, "min |mu| = {min_abs} for n = {n}");
            for &(mu, mult) in &ms.modes {
                assert!(mult >= 1);
                assert!(mu != 0.0);
                assert_eq!(ms.total_multiplicity_at(-mu, 1e-12), mult);
            }
        }
    }

    #[test]
    fn mode_count_grows_monotonically_with_bound() {
        let counts: Vec<usize> = (1..8)
            .map(|b| mode_spectrum(4, b as f64).unwrap().modes.len())
            .collect();
        for w in counts.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
