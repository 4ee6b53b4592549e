use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use super::{Exponents, GroupPoly, PRUNE};
use crate::spin::binomial;
use crate::C64;

/// Normal form of a polynomial modulo `uu* + vv* - 1`.
///
/// Every monomial containing both `u` and `u*` is rewritten with
/// `uu* → 1 - vv*`, so no stored key has `a > 0` and `b > 0` at once. Two
/// polynomials agree on SU(2) exactly when their normal forms agree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CanonicalCoeffs {
    coeffs: BTreeMap<Exponents, C64>,
}

/// Reduces `p` to its normal form.
pub fn canonical(p: &GroupPoly) -> CanonicalCoeffs {
    let mut out = CanonicalCoeffs::default();
    for (e, c) in p.terms() {
        out.add_reduced(e, c);
    }
    out.prune();
    out
}

impl CanonicalCoeffs {
    /// Adds `c · u^a (u*)^b v^c (v*)^d` after reduction, without pruning.
    pub(crate) fn add_reduced(&mut self, [a, b, c, d]: Exponents, x: C64) {
        // u^a u*^b = u^{a-k} u*^{b-k} (1 - vv*)^k with k = min(a, b)
        let k = a.min(b);
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let e = [a - k, b - k, c + i, d + i];
            *self.coeffs.entry(e).or_default() += x * (sign * binomial(k, i));
        }
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= PRUNE);
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, C64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, e: Exponents) -> C64 {
        self.coeffs.get(&e).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether no key mixes `u` and `u*`.
    pub fn is_reduced(&self) -> bool {
        self.coeffs.keys().all(|e| e[0] == 0 || e[1] == 0)
    }

    pub fn to_poly(&self) -> GroupPoly {
        GroupPoly::from_terms(self.terms())
    }

    pub fn evaluate(&self, u: C64, v: C64) -> C64 {
        self.to_poly().evaluate(u, v)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = CanonicalCoeffs {
            coeffs: self.coeffs.iter().map(|(&e, &x)| (e, x * c)).collect(),
        };
        out.prune();
        out
    }

    /// Largest coefficient difference over the union of both supports.
    pub fn max_diff(&self, other: &CanonicalCoeffs) -> f64 {
        (self - other).terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Equality of coefficient lists up to `1e-8`.
    pub fn approx_eq(&self, other: &CanonicalCoeffs) -> bool {
        self.max_diff(other) <= 1e-8
    }
}

impl Add for &CanonicalCoeffs {
    type Output = CanonicalCoeffs;
    fn add(self, rhs: &CanonicalCoeffs) -> CanonicalCoeffs {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            *out.coeffs.entry(e).or_default() += c;
        }
        out.prune();
        out
    }
}

impl Sub for &CanonicalCoeffs {
    type Output = CanonicalCoeffs;
    fn sub(self, rhs: &CanonicalCoeffs) -> CanonicalCoeffs {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}
