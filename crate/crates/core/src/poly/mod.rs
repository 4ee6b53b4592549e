//! Sparse polynomials in the group variables `u, u*, v, v*`.
//!
//! An SU(2) element is written as `V = [[u, -v*], [v, u*]]` with
//! `|u|² + |v|² = 1`; every representation matrix element and every
//! characteristic function is a polynomial in these four symbols.

mod canonical;
mod charfun;
mod group;
mod rep;

pub use canonical::{canonical, CanonicalCoeffs};
pub use charfun::{charfun_mixed, charfun_pure};
pub use group::GroupElement;
pub use rep::{rep_entry, rep_matrix, rep_matrix_eval, rep_matrix_hypergeom, rotate_state, PolyMatrix};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Exponents `(a, b, c, d)` of `u^a (u*)^b v^c (v*)^d`.
pub type Exponents = [u32; 4];

/// Coefficients smaller than this are dropped after every operation.
pub const PRUNE: f64 = 1e-12;

/// Sparse polynomial in `u, u*, v, v*` with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupPoly {
    terms: BTreeMap<Exponents, C64>,
}

impl GroupPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn monomial(exps: Exponents, c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, c);
        p.prune();
        p
    }

    pub fn u() -> Self {
        Self::monomial([1, 0, 0, 0], C64::new(1.0, 0.0))
    }

    pub fn u_conj() -> Self {
        Self::monomial([0, 1, 0, 0], C64::new(1.0, 0.0))
    }

    pub fn v() -> Self {
        Self::monomial([0, 0, 1, 0], C64::new(1.0, 0.0))
    }

    pub fn v_conj() -> Self {
        Self::monomial([0, 0, 0, 1], C64::new(1.0, 0.0))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, C64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p.prune();
        p
    }

    /// Accumulates without pruning; call [`GroupPoly::prune`] afterwards.
    pub(crate) fn add_term(&mut self, exps: Exponents, c: C64) {
        *self.terms.entry(exps).or_default() += c;
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, C64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exps: Exponents) -> C64 {
        self.terms.get(&exps).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms().map(|(e, x)| (e, x * c)))
    }

    /// Value at `(u, u*, v, v*)`, conjugates taken from the inputs.
    pub fn evaluate(&self, u: C64, v: C64) -> C64 {
        let (uc, vc) = (u.conj(), v.conj());
        self.terms()
            .map(|([a, b, c, d], x)| x * u.powu(a) * uc.powu(b) * v.powu(c) * vc.powu(d))
            .sum()
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_diff(&self, other: &GroupPoly) -> f64 {
        (self - other).terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &GroupPoly {
    type Output = GroupPoly;
    fn add(self, rhs: &GroupPoly) -> GroupPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out.prune();
        out
    }
}

impl Sub for &GroupPoly {
    type Output = GroupPoly;
    fn sub(self, rhs: &GroupPoly) -> GroupPoly {
        self + &(-rhs)
    }
}

impl Neg for &GroupPoly {
    type Output = GroupPoly;
    fn neg(self) -> GroupPoly {
        GroupPoly { terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect() }
    }
}

impl Mul for &GroupPoly {
    type Output = GroupPoly;
    fn mul(self, rhs: &GroupPoly) -> GroupPoly {
        let mut out = GroupPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, c1 * c2);
            }
        }
        out.prune();
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GroupPoly {
            type Output = GroupPoly;
            fn $m(self, rhs: GroupPoly) -> GroupPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
