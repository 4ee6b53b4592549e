use super::LaurentCoeffs;
use crate::C64;

/// Above this argument the power series is replaced by backward recurrence.
const SERIES_LIMIT: f64 = 50.0;

/// `ln(e^{-x} I_k(x))` for `k = 0, ..., k_max`, with `x = |γ|²`.
///
/// These are the phase-characteristic coefficients `C_k = C_{-k}` of the
/// coherent state `|γ⟩|0⟩`. Logarithms keep the far tails representable.
/// For `x = 0` the result is `0` at `k = 0` and `-∞` elsewhere.
pub fn ln_coherent_coeffs(x: f64, k_max: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite());
    if x == 0.0 {
        let mut out = vec![f64::NEG_INFINITY; k_max + 1];
        out[0] = 0.0;
        return out;
    }
    if x <= SERIES_LIMIT {
        series(x, k_max)
    } else {
        miller(x, k_max)
    }
}

/// `I_k(x) = (x/2)^k / k! · Σ_m t_m` with `t_0 = 1` and
/// `t_{m+1} / t_m = (x²/4) / ((m+1)(m+k+1))`.
fn series(x: f64, k_max: usize) -> Vec<f64> {
    let quarter = x * x / 4.0;
    let mut ln_fact = 0.0;
    (0..=k_max)
        .map(|k| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let (mut t, mut s, mut m) = (1.0f64, 1.0f64, 0.0f64);
            loop {
                t *= quarter / ((m + 1.0) * (m + k as f64 + 1.0));
                s += t;
                m += 1.0;
                // terms shrink once m exceeds x/2; stop at full precision
                if t < 1e-16 * s && m > x / 2.0 {
                    break;
                }
            }
            -x + k as f64 * (x / 2.0).ln() - ln_fact + s.ln()
        })
        .collect()
}

/// Miller's backward recurrence `I_{k-1} = I_{k+1} + (2k/x) I_k`, normalized
/// by `I_0 + 2 Σ_{k≥1} I_k = e^x`. Values are kept as logarithms with a
/// running rescale so nothing overflows.
fn miller(x: f64, k_max: usize) -> Vec<f64> {
    let start = k_max + 20 + (10.0 * x.sqrt()).ceil() as usize;
    let mut ln_vals = vec![0.0; start + 2];
    let (mut above, mut here) = (0.0f64, 1e-300f64);
    let mut offset = 0.0f64;
    ln_vals[start + 1] = f64::NEG_INFINITY;
    ln_vals[start] = here.ln();
    for k in (1..=start).rev() {
        let below = above + (2.0 * k as f64 / x) * here;
        above = here;
        here = below;
        if here > 1e250 {
            above /= here;
            offset += here.ln();
            here = 1.0;
        }
        ln_vals[k - 1] = here.ln() + offset;
    }
    // log of I_0 + 2 Σ_{k≥1} I_k in the same (unnormalized) scale
    let peak = ln_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = ln_vals
        .iter()
        .enumerate()
        .map(|(k, &l)| if k == 0 { 1.0 } else { 2.0 } * (l - peak).exp())
        .sum();
    let ln_norm = peak + total.ln();
    ln_vals.truncate(k_max + 1);
    ln_vals.iter().map(|l| l - ln_norm).collect()
}

/// `C_k = e^{-|γ|²} I_k(|γ|²)` for `|k| ≤ K`.
pub fn coherent_charfun_coeffs(gamma: C64, k_max: usize) -> LaurentCoeffs {
    let ln = ln_coherent_coeffs(gamma.norm_sqr(), k_max);
    let values = (-(k_max as i64)..=k_max as i64).map(|k| ln[k.unsigned_abs() as usize].exp()).collect();
    LaurentCoeffs::new(k_max as i64, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_a_point_mass() {
        let c = coherent_charfun_coeffs(C64::new(0.0, 0.0), 5);
        assert_eq!(c.get(0), 1.0);
        assert!((1..=5).all(|k| c.get(k) == 0.0 && c.get(-k) == 0.0));
    }

    #[test]
    fn unit_amplitude_against_direct_sum() {
        // I_0(1) = Σ_m (1/4)^m / (m!)²
        let mut direct = 0.0;
        let mut t = 1.0;
        for m in 0..40 {
            direct += t;
            t *= 0.25 / ((m as f64 + 1.0) * (m as f64 + 1.0));
        }
        let c = coherent_charfun_coeffs(C64::new(1.0, 0.0), 3);
        assert!((c.get(0) - direct * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn coefficients_sum_to_one() {
        for g in [0.3, 1.0, 2.0, 4.5] {
            let x: f64 = g * g;
            let k = (4.0 * x).ceil() as usize + 20;
            let c = coherent_charfun_coeffs(C64::new(g, 0.0), k);
            assert!((c.sum() - 1.0).abs() < 1e-12, "gamma = {g}");
        }
    }

    #[test]
    fn recurrence_agrees_with_series() {
        for x in [55.0, 120.0, 400.0] {
            let a = series(x, 60);
            let b = miller(x, 60);
            for k in 0..=60 {
                assert!((a[k] - b[k]).abs() < 1e-10, "x = {x}, k = {k}: {} vs {}", a[k], b[k]);
            }
        }
    }

    #[test]
    fn large_amplitude_normalization() {
        let c = coherent_charfun_coeffs(C64::new(100.0, 0.0), 1200);
        assert!((c.sum() - 1.0).abs() < 1e-10);
        assert!(c.get(0) > c.get(1) && c.get(1) > c.get(50));
    }
}
