use std::f64::consts::FRAC_PI_2;

use super::bessel::ln_coherent_coeffs;
use super::LaurentCoeffs;
use crate::error::{Error, Result};
use crate::C64;

/// Coherent light `|γ⟩` in one arm, the two-photon state
/// `cos τ |0⟩ - sin τ |2⟩` in the other, amplitude damping `ε` on the target
/// and interferometer phase `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerSpec {
    pub gamma: C64,
    pub epsilon: f64,
    pub tau: f64,
    pub theta: f64,
}

impl InterferometerSpec {
    /// Requires `ε ∈ [0, 1)` and `τ ∈ [0, π/2)`.
    pub fn new(gamma: C64, epsilon: f64, tau: f64, theta: f64) -> Result<Self> {
        if !(gamma.re.is_finite() && gamma.im.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParameter("non-finite input".into()));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, 1)")));
        }
        if !(0.0..FRAC_PI_2).contains(&tau) {
            return Err(Error::InvalidParameter(format!("tau = {tau} outside [0, pi/2)")));
        }
        Ok(InterferometerSpec { gamma, epsilon, tau, theta })
    }

    /// Squeezing angle minimizing the large-amplitude phase uncertainty,
    /// `tan τ = √3 - √2`.
    pub fn optimal_tau() -> f64 {
        (3f64.sqrt() - 2f64.sqrt()).atan()
    }

    /// Damped amplitude `γ(1 - ε)` of the target.
    pub fn target_gamma(&self) -> C64 {
        self.gamma * (1.0 - self.epsilon)
    }
}

/// Multiplier window `A_{-4}, ..., A_4` relating the target's characteristic
/// function to that of the damped coherent state.
pub fn window_coeffs(spec: &InterferometerSpec) -> [f64; 9] {
    let g = spec.target_gamma();
    let x = g.norm_sqr();
    let re2 = 2.0 * (g * g).re;
    let s2 = spec.tau.sin().powi(2);
    let a4 = x * x * s2 / 32.0;
    let a3 = x * s2 / 4.0;
    let a2 = (-2.0 * (x * x - 2.0) * s2 + re2 * (1.0 - (4.0 * spec.tau).cos()).sqrt()) / 16.0;
    let a1 = -x * s2 / 4.0;
    let a0 = 1.0 - 2.0 * (a1 + a2 + a3 + a4);
    [a4, a3, a2, a1, a0, a1, a2, a3, a4]
}

/// `P_k`: the damped coherent coefficients convolved with the window.
pub fn squeezed_target_coeffs(spec: &InterferometerSpec, k_max: usize) -> Result<LaurentCoeffs> {
    if k_max < 5 {
        return Err(Error::InvalidParameter(format!("K = {k_max} must be at least 5")));
    }
    let ln = ln_coherent_coeffs(spec.target_gamma().norm_sqr(), k_max + 4);
    let c = |k: i64| ln[k.unsigned_abs() as usize].exp();
    let a = window_coeffs(spec);
    let k_max = k_max as i64;
    let values = (-k_max..=k_max)
        .map(|k| (-4..=4).map(|l| a[(l + 4) as usize] * c(k - l)).sum())
        .collect();
    Ok(LaurentCoeffs::new(k_max, values))
}

/// Evidence that the minimum over the window is the infimum over all `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCertificate {
    /// `(1 - ε)^{-2}`: asymptotic growth of `C_k / C'_k` per step.
    pub growth: f64,
    /// Largest window shift `L` with `A_L ≠ 0`.
    pub max_shift: usize,
    /// Beyond this `k` the leading-order ratio `C_{k+1} P_k / (C_k P_{k+1})`
    /// exceeds 1; `None` when the ratio never grows.
    pub threshold: Option<f64>,
    /// Number of trailing indices checked to be non-decreasing.
    pub checked: usize,
}

/// Result of the extraction-probability computation.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    /// `inf_k C_k / P_k`.
    pub p: f64,
    /// `|k|` attaining the minimum; `None` when the infimum is only reached
    /// in the limit `|k| → ∞`.
    pub argmin: Option<i64>,
    /// Window actually used.
    pub k_used: usize,
    pub certificate: TailCertificate,
}

const TAIL: usize = 10;
const K_CAP: usize = 1 << 15;

/// Largest probability of turning `|γ⟩|0⟩` into `|γ(1-ε)⟩|τ⟩` covariantly,
/// `p = inf_k C_k / P_k`.
///
/// Both sequences are symmetric in `k`, so only `k ≥ 0` is scanned. With
/// `k_max = None` the window starts at `max(⌈4|γ|²⌉ + 40, threshold + 10)`
/// and doubles until the last ten ratios are non-decreasing; an explicit
/// window that fails this check is an error.
pub fn extraction_probability(spec: &InterferometerSpec, k_max: Option<usize>) -> Result<Extraction> {
    let x = spec.gamma.norm_sqr();
    let xt = spec.target_gamma().norm_sqr();
    let a = window_coeffs(spec);
    let max_shift = (0..=4).rev().find(|&l| a[4 + l] != 0.0).unwrap_or(0);
    let growth = (1.0 - spec.epsilon).powi(-2);
    let threshold = (growth > 1.0).then(|| growth * max_shift as f64 / (growth - 1.0));
    let certificate = TailCertificate { growth, max_shift, threshold, checked: TAIL };

    if x == 0.0 {
        // vacuum source: P_k = A_k, C_k = δ_{k0}
        let p = if (1..=4).any(|l| a[4 + l] > 0.0) { 0.0 } else { 1.0 / a[4] };
        let argmin = Some(if p == 0.0 { (1..=4).find(|&l| a[4 + l] > 0.0).unwrap() as i64 } else { 0 });
        return Ok(Extraction { p, argmin, k_used: 4, certificate });
    }
    if spec.epsilon == 0.0 {
        // no damping: with a nontrivial window the ratio decays like k^{-L}
        let (p, argmin) = if max_shift == 0 { (1.0, Some(0)) } else { (0.0, None) };
        return Ok(Extraction { p, argmin, k_used: 0, certificate });
    }

    let mut k = match k_max {
        Some(k) => k,
        None => ((4.0 * x).ceil() as usize + 40).max(threshold.map_or(0, |t| t.ceil() as usize + 10)),
    };
    loop {
        let ratios = ln_ratios(x, xt, &a, k);
        let tail_ok = k >= TAIL && ratios[k + 1 - TAIL..].windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
        let beyond = threshold.is_none_or(|t| k as f64 > t);
        if tail_ok && beyond {
            let (argmin, ln_p) = ratios
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_finite())
                .min_by(|p, q| p.1.total_cmp(q.1))
                .map(|(i, &r)| (i as i64, r))
                .ok_or(Error::TruncationTooSmall(k as i64))?;
            return Ok(Extraction { p: ln_p.exp().min(1.0), argmin: Some(argmin), k_used: k, certificate });
        }
        if k_max.is_some() || k >= K_CAP {
            return Err(Error::TruncationTooSmall(k as i64));
        }
        k *= 2;
    }
}

/// `ln(C_k / P_k)` for `k = 0, ..., K`; `+∞` where `P_k ≤ 0`.
fn ln_ratios(x: f64, xt: f64, a: &[f64; 9], k_max: usize) -> Vec<f64> {
    let c = ln_coherent_coeffs(x, k_max);
    let ct = ln_coherent_coeffs(xt, k_max + 4);
    let lt = |k: i64| ct[k.unsigned_abs() as usize];
    (0..=k_max as i64)
        .map(|k| {
            // P_k / C'_k, computed relative to C'_k so the tails stay finite
            let rel: f64 = (-4..=4i64).map(|l| a[(l + 4) as usize] * (lt(k - l) - lt(k)).exp()).sum();
            if rel <= 0.0 {
                f64::INFINITY
            } else {
                c[k as usize] - lt(k) - rel.ln()
            }
        })
        .collect()
}

/// `⟨δN⟩ = cos 2θ (|γ|² - 1 + cos 2τ)` for `δN = b1†b1 - b2†b2`.
pub fn mean_delta_n(spec: &InterferometerSpec) -> f64 {
    (2.0 * spec.theta).cos() * (spec.gamma.norm_sqr() - 1.0 + (2.0 * spec.tau).cos())
}

/// Photon-number-difference variance of `|γ⟩|τ⟩` behind the interferometer.
pub fn variance_delta_n(spec: &InterferometerSpec) -> f64 {
    let (t, th) = (spec.tau, spec.theta);
    let x = spec.gamma.norm_sqr();
    let re2 = 2.0 * (spec.gamma * spec.gamma).re;
    let s2t = (2.0 * th).sin().powi(2);
    -re2 * s2t * (2.0 * t).sin() / 2f64.sqrt()
        - 2.0 * x * (s2t * (2.0 * t).cos() + (4.0 * th).cos() / 2.0 - 1.0)
        + 2.0 * t.sin().powi(2) * ((2.0 * th).cos().powi(2) * (2.0 * t).cos() + 1.0)
}

/// `Δθ = sqrt(Δ²(δN)) / |∂⟨δN⟩/∂θ|`.
pub fn phase_uncertainty(spec: &InterferometerSpec) -> Result<f64> {
    let slope = 2.0 * (2.0 * spec.theta).sin() * (spec.gamma.norm_sqr() - 1.0 + (2.0 * spec.tau).cos());
    if slope.abs() < 1e-12 {
        return Err(Error::DivergentUncertainty);
    }
    Ok(variance_delta_n(spec).max(0.0).sqrt() / slope.abs())
}

/// `⟨δN⟩` and `Δ²(δN)` from explicit Fock-space amplitudes, photon numbers in
/// the coherent arm cut at `n_cutoff`.
pub fn variance_oracle(spec: &InterferometerSpec, n_cutoff: usize) -> Result<(f64, f64)> {
    let g = spec.gamma;
    let mut arm1 = Vec::with_capacity(n_cutoff + 1);
    let mut c = C64::new((-g.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=n_cutoff {
        arm1.push(c);
        c *= g / ((n + 1) as f64).sqrt();
    }
    let deficit = 1.0 - arm1.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if deficit > 1e-8 {
        return Err(Error::CutoffTooSmall { cutoff: n_cutoff, deficit });
    }
    let arm2 = [C64::new(spec.tau.cos(), 0.0), C64::new(0.0, 0.0), C64::new(-spec.tau.sin(), 0.0)];

    // δN = cos 2θ (n1 - n2) - sin 2θ (a1†a2 + a2†a1); one extra level per arm
    // holds the raised components exactly
    let (d1, d2) = (n_cutoff + 2, arm2.len() + 1);
    let psi = |n1: usize, n2: usize| if n1 <= n_cutoff && n2 < arm2.len() { arm1[n1] * arm2[n2] } else { C64::new(0.0, 0.0) };
    let (c2, s2) = ((2.0 * spec.theta).cos(), (2.0 * spec.theta).sin());
    let mut phi = vec![C64::new(0.0, 0.0); d1 * d2];
    for n1 in 0..=n_cutoff {
        for n2 in 0..arm2.len() {
            let a = psi(n1, n2);
            phi[n1 * d2 + n2] += a * (c2 * (n1 as f64 - n2 as f64));
            if n2 > 0 {
                phi[(n1 + 1) * d2 + n2 - 1] -= a * (s2 * ((n1 + 1) as f64).sqrt() * (n2 as f64).sqrt());
            }
            if n1 > 0 {
                phi[(n1 - 1) * d2 + n2 + 1] -= a * (s2 * (n1 as f64).sqrt() * ((n2 + 1) as f64).sqrt());
            }
        }
    }
    let mean: f64 = (0..d1)
        .flat_map(|n1| (0..d2).map(move |n2| (n1, n2)))
        .map(|(n1, n2)| (psi(n1, n2).conj() * phi[n1 * d2 + n2]).re)
        .sum();
    let second: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    Ok((mean, second - mean * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn spec(g: f64, eps: f64, tau: f64, theta: f64) -> InterferometerSpec {
        InterferometerSpec::new(C64::new(g, 0.0), eps, tau, theta).unwrap()
    }

    #[test]
    fn window_collapses_without_squeezing() {
        let a = window_coeffs(&spec(1.3, 0.1, 0.0, 0.0));
        assert_eq!(a, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let p = squeezed_target_coeffs(&spec(1.3, 0.1, 0.0, 0.0), 20).unwrap();
        let c = super::super::coherent_charfun_coeffs(C64::new(1.3 * 0.9, 0.0), 20);
        assert!(p.iter().all(|(k, v)| (v - c.get(k)).abs() < 1e-15));
    }

    #[test]
    fn target_coefficients_are_a_distribution() {
        let p = squeezed_target_coeffs(&spec(1.0, 0.1, 0.2, 0.0), 40).unwrap();
        assert!((p.sum() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|(_, v)| v >= -1e-10));
    }

    #[test]
    fn identity_transformation() {
        let e = extraction_probability(&spec(1.0, 0.0, 0.0, 0.0), None).unwrap();
        assert_eq!(e.p, 1.0);
    }

    #[test]
    fn damped_squeezed_target_is_reachable() {
        let e = extraction_probability(&spec(1.0, 0.1, 0.2, 0.0), Some(60)).unwrap();
        assert!(e.p > 0.0 && e.p <= 1.0);
        assert!(matches!(extraction_probability(&spec(1.0, 0.1, 0.2, 0.0), Some(8)), Err(Error::TruncationTooSmall(8))));
    }

    #[test]
    fn undamped_squeezing_is_unreachable() {
        let e = extraction_probability(&spec(1.0, 0.0, 0.2, 0.0), None).unwrap();
        assert_eq!(e.p, 0.0);
        assert_eq!(e.argmin, None);
        let vacuum = extraction_probability(&spec(0.0, 0.1, 0.2, 0.0), None).unwrap();
        assert_eq!(vacuum.p, 0.0);
    }

    #[test]
    fn coherent_limit_of_the_uncertainty() {
        for g in [0.7, 2.0, 5.0] {
            let d = phase_uncertainty(&spec(g, 0.0, 0.0, FRAC_PI_4)).unwrap();
            assert!((d - 1.0 / (2.0 * g)).abs() < 1e-12);
        }
        assert!((phase_uncertainty(&spec(2.0, 0.0, 0.0, FRAC_PI_4)).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(phase_uncertainty(&spec(2.0, 0.0, 0.0, 0.0)), Err(Error::DivergentUncertainty)));
    }

    #[test]
    fn optimal_squeezing_improvement() {
        let s = spec(100.0, 0.0, InterferometerSpec::optimal_tau(), FRAC_PI_4);
        let factor = phase_uncertainty(&s).unwrap() * 200.0;
        assert!((factor - (3.0 - 6f64.sqrt()).sqrt()).abs() < 1e-2);
        assert!((InterferometerSpec::optimal_tau().tan() - (5.0 - 2.0 * 6f64.sqrt()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oracle_special_cases() {
        let (m, v) = variance_oracle(&spec(0.0, 0.0, 0.0, 0.3), 10).unwrap();
        assert!(m.abs() < 1e-15 && v.abs() < 1e-15);
        // at θ = 0 the arms pass straight through: ⟨n1⟩ - ⟨n2⟩ = |γ|²
        let (m, _) = variance_oracle(&spec(1.0, 0.0, 0.0, 0.0), 44).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        assert!((mean_delta_n(&spec(1.0, 0.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_closed_form_variance() {
        let s = spec(1.5, 0.0, 0.3, FRAC_PI_4);
        let (m, v) = variance_oracle(&s, 49).unwrap();
        assert!((v - variance_delta_n(&s)).abs() < 1e-6);
        assert!((m - mean_delta_n(&s)).abs() < 1e-9);
        assert!(matches!(variance_oracle(&s, 5), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(InterferometerSpec::new(C64::new(1.0, 0.0), 1.0, 0.1, 0.0).is_err());
        assert!(InterferometerSpec::new(C64::new(1.0, 0.0), 0.1, 2.0, 0.0).is_err());
    }
}
