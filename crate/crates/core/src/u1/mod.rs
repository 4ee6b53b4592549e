//! Phase-covariant conversions and the two-arm interferometer.
//!
//! For phase-shift symmetry a state is described by a probability sequence,
//! and a deterministic covariant conversion exists exactly when the source
//! sequence factors as a convolution of the target with another probability
//! sequence. Superpositions of top states `|j, j⟩` along one axis obey the
//! same rule for SU(2).

mod bessel;
mod interferometer;

pub use bessel::{coherent_charfun_coeffs, ln_coherent_coeffs};
pub use interferometer::{
    extraction_probability, mean_delta_n, phase_uncertainty, squeezed_target_coeffs, variance_delta_n,
    variance_oracle, window_coeffs, Extraction, InterferometerSpec, TailCertificate,
};

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::HalfInt;

/// Non-negative weights on integer or half-integer indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProbSeq {
    values: BTreeMap<HalfInt, f64>,
}

impl ProbSeq {
    /// Rejects negative or non-finite entries; zero entries are dropped.
    pub fn new(values: impl IntoIterator<Item = (HalfInt, f64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (k, x) in values {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::ProbSeq(format!("entry {x} at index {k}")));
            }
            if x > 0.0 {
                *out.entry(k).or_insert(0.0) += x;
            }
        }
        Ok(ProbSeq { values: out })
    }

    /// Sequence over the integers `0, 1, 2, ...`.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().enumerate().map(|(n, &x)| (HalfInt::from_int(n as i32), x)))
    }

    /// Point mass at `k`.
    pub fn point(k: HalfInt) -> Self {
        ProbSeq { values: BTreeMap::from([(k, 1.0)]) }
    }

    pub fn get(&self, k: HalfInt) -> f64 {
        self.values.get(&k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, f64)> + '_ {
        self.values.iter().map(|(&k, &x)| (k, x))
    }

    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest and largest index carrying weight.
    pub fn support(&self) -> Option<(HalfInt, HalfInt)> {
        Some((*self.values.keys().next()?, *self.values.keys().next_back()?))
    }

    fn require_normalized(&self) -> Result<()> {
        let t = self.total();
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::ProbSeq(format!("weights sum to {t}, not 1")));
        }
        Ok(())
    }

    /// Dense weights on the grid `lo, lo + step, ..., hi`, step 1 or 1/2.
    fn dense(&self, step: i32) -> Result<(HalfInt, Vec<f64>)> {
        let (lo, hi) = self.support().ok_or(Error::EmptyState)?;
        if self.values.keys().any(|k| (k.twice() - lo.twice()) % step != 0) {
            return Err(Error::ProbSeq("indices do not lie on a common grid".into()));
        }
        let n = ((hi.twice() - lo.twice()) / step) as usize + 1;
        let mut v = vec![0.0; n];
        for (k, x) in self.iter() {
            v[((k.twice() - lo.twice()) / step) as usize] = x;
        }
        Ok((lo, v))
    }
}

/// Residual tolerance for an exact factorization.
const EXACT: f64 = 1e-9;

/// Least-squares solution of `p = q * w` (full convolution) with the
/// residual norm. Both inputs start at their lowest nonzero weight.
fn deconvolve(p: &[f64], q: &[f64]) -> Option<(Vec<f64>, f64)> {
    if q.len() > p.len() {
        return None;
    }
    let n = p.len() - q.len() + 1;
    let a = DMatrix::from_fn(p.len(), n, |r, c| if r >= c && r - c < q.len() { q[r - c] } else { 0.0 });
    let b = DVector::from_column_slice(p);
    let w = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
    let residual = (&a * &w - &b).norm();
    Some((w.iter().copied().collect(), residual))
}

/// Witness of a phase-covariant conversion `p → q`.
#[derive(Clone, Debug, PartialEq)]
pub struct U1Witness {
    pub feasible: bool,
    /// Energy shift applied to the source sequence.
    pub delta: i32,
    /// `p_{n-δ} = Σ_m q_m w_{n-m}`; empty when infeasible.
    pub w: ProbSeq,
}

/// Decides whether `Σ √p_n |n⟩` can be turned into `Σ √q_n |n⟩` by a
/// phase-covariant channel: `z^δ P(z) = Q(z) W(z)` with `W` non-negative.
///
/// Feasibility does not depend on `δ` beyond the smallest value that lines
/// the lowest supports up, so that value is reported.
pub fn u1_deterministic_feasible(p: &ProbSeq, q: &ProbSeq) -> Result<U1Witness> {
    p.require_normalized()?;
    q.require_normalized()?;
    for s in [p, q] {
        if s.iter().any(|(k, _)| !k.is_integer()) {
            return Err(Error::ProbSeq("photon numbers must be integers".into()));
        }
    }
    let infeasible = U1Witness { feasible: false, delta: 0, w: ProbSeq::default() };
    let (p_lo, pv) = p.dense(2)?;
    let (q_lo, qv) = q.dense(2)?;
    let Some((w, residual)) = deconvolve(&pv, &qv) else {
        return Ok(infeasible);
    };
    if residual > EXACT || w.iter().any(|&x| x < -EXACT) {
        return Ok(infeasible);
    }
    let delta = (q_lo.twice() - p_lo.twice()).max(0) / 2;
    let w_lo = p_lo.twice() / 2 + delta - q_lo.twice() / 2;
    let w = normalized_witness(&w, HalfInt::from_int(w_lo), 2)?;
    Ok(U1Witness { feasible: true, delta, w })
}

/// Witness of an SU(2) conversion between superpositions of top states.
#[derive(Clone, Debug, PartialEq)]
pub struct LineWitness {
    pub feasible: bool,
    /// `p_j = Σ_J ξ_J q_{j-J}`; empty when infeasible.
    pub xi: ProbSeq,
}

/// Decides whether `Σ_j √p_j |j, j⟩` can be turned into `Σ_j √q_j |j, j⟩` by
/// an SU(2)-covariant channel.
///
/// The characteristic function of such a state is `Σ_j p_j u^{2j}`, so the
/// source must factor as the target times an auxiliary `Σ_J ξ_J u^{2J}`. No
/// shift is available: total spin can only go down.
pub fn su2_coherent_line_feasible(p: &ProbSeq, q: &ProbSeq) -> Result<LineWitness> {
    p.require_normalized()?;
    q.require_normalized()?;
    let infeasible = LineWitness { feasible: false, xi: ProbSeq::default() };
    let (p_lo, pv) = p.dense(1)?;
    let (q_lo, qv) = q.dense(1)?;
    if p_lo < q_lo {
        return Ok(infeasible);
    }
    let Some((xi, residual)) = deconvolve(&pv, &qv) else {
        return Ok(infeasible);
    };
    if residual > EXACT || xi.iter().any(|&x| x < -EXACT) {
        return Ok(infeasible);
    }
    let xi = normalized_witness(&xi, p_lo - q_lo, 1)?;
    Ok(LineWitness { feasible: true, xi })
}

fn normalized_witness(w: &[f64], lo: HalfInt, step: i32) -> Result<ProbSeq> {
    let total: f64 = w.iter().map(|x| x.max(0.0)).sum();
    ProbSeq::new(
        w.iter()
            .enumerate()
            .map(|(i, &x)| (HalfInt::from_twice(lo.twice() + step * i as i32), x.max(0.0) / total)),
    )
}

/// Symmetric window of Laurent coefficients `k = -K, ..., K`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentCoeffs {
    k_max: i64,
    values: Vec<f64>,
}

impl LaurentCoeffs {
    pub fn new(k_max: i64, values: Vec<f64>) -> Self {
        assert_eq!(values.len() as i64, 2 * k_max + 1);
        LaurentCoeffs { k_max, values }
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    /// Coefficient of `z^k`; zero outside the window.
    pub fn get(&self, k: i64) -> f64 {
        if k.abs() > self.k_max {
            0.0
        } else {
            self.values[(k + self.k_max) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &x)| (i as i64 - self.k_max, x))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}
