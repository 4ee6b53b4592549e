//! Spin bookkeeping: half-integers, states, angular-momentum matrices,
//! coherent states, Wigner 3j symbols and the exponential rotation oracle.

mod half;
mod state;
mod wigner;

pub use half::{parity_sign, triangle, HalfInt};
pub use state::{BlockDensity, SpinKet, SpinSpace, SphereVec};
pub use wigner::wigner_3j;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::{CMatrix, C64, TOL};

/// Angular-momentum matrices of one irrep in the basis `m = j, ..., -j`.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinMatrices {
    /// `n · J`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        self.x.scale(n[0]) + self.y.scale(n[1]) + self.z.scale(n[2])
    }
}

/// Standard spin matrices (Condon–Shortley phases).
pub fn spin_matrices(j: HalfInt) -> SpinMatrices {
    let d = j.dim();
    let jf = j.to_f64();
    let mut raise = CMatrix::zeros(d, d);
    let mut z = CMatrix::zeros(d, d);
    for (c, m) in j.projections().enumerate() {
        let mf = m.to_f64();
        z[(c, c)] = C64::new(mf, 0.0);
        // J+ |j,m⟩ = sqrt(j(j+1) - m(m+1)) |j,m+1⟩, and m+1 sits one row up
        if c > 0 {
            raise[(c - 1, c)] = C64::new((jf * (jf + 1.0) - mf * (mf + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower).scale(0.5);
    let y = (&raise - &lower) * C64::new(0.0, -0.5);
    SpinMatrices { x, y, z }
}

/// Spin coherent state `Σ_m sqrt(C(2j, j-m)) z1^{j+m} z2^{j-m} |j,m⟩`.
pub fn coherent_state(j: HalfInt, z1: C64, z2: C64) -> Result<SpinKet> {
    if j.is_negative() {
        return Err(Error::NegativeSpin(j));
    }
    let n = z1.norm_sqr() + z2.norm_sqr();
    if (n - 1.0).abs() > TOL {
        return Err(Error::NotUnitary(n));
    }
    let two_j = j.twice() as u32;
    let mut ket = SpinKet::new();
    for m in j.projections() {
        let up = ((j + m).twice() / 2) as u32;
        let down = ((j - m).twice() / 2) as u32;
        let amp = z1.powu(up) * z2.powu(down) * binomial(two_j, down).sqrt();
        ket.add(j, m, amp)?;
    }
    Ok(ket)
}

/// Direction of the coherent state `(z1, z2)`: its normalized spin expectation.
pub fn coherent_direction(z1: C64, z2: C64) -> Result<SphereVec> {
    let c = z1.conj() * z2;
    SphereVec::normalize([2.0 * c.re, 2.0 * c.im, z1.norm_sqr() - z2.norm_sqr()])
}

/// `exp(i n·J)` by eigendecomposition of the Hermitian generator.
pub fn exp_rotation(j: HalfInt, n: [f64; 3]) -> CMatrix {
    let generator = spin_matrices(j).along(n);
    let eig = SymmetricEigen::new(generator);
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin_half_matrices() {
        let s = spin_matrices(h(1));
        assert_eq!(s.z[(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(s.z[(1, 1)], C64::new(-0.5, 0.0));
        assert_eq!(s.x[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(s.x[(1, 0)], C64::new(0.5, 0.0));
        assert_eq!(s.x[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(s.y[(0, 1)], C64::new(0.0, -0.5));
    }

    #[test]
    fn commutation_relations() {
        for t in 1..=6 {
            let s = spin_matrices(h(t));
            let i = C64::new(0.0, 1.0);
            let xy = &s.x * &s.y - &s.y * &s.x - s.z.map(|v| v * i);
            let yz = &s.y * &s.z - &s.z * &s.y - s.x.map(|v| v * i);
            let zx = &s.z * &s.x - &s.x * &s.z - s.y.map(|v| v * i);
            assert!(max_abs(&xy) < 1e-12 && max_abs(&yz) < 1e-12 && max_abs(&zx) < 1e-12);
            let jf = h(t).to_f64();
            let casimir = &s.x * &s.x + &s.y * &s.y + &s.z * &s.z
                - CMatrix::identity(h(t).dim(), h(t).dim()).scale(jf * (jf + 1.0));
            assert!(max_abs(&casimir) < 1e-12);
        }
    }

    #[test]
    fn coherent_state_special_cases() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let top = coherent_state(h(3), one, zero).unwrap();
        assert_eq!(top, SpinKet::basis(h(3), h(3)).unwrap());

        let (z1, z2) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let half = coherent_state(h(1), z1, z2).unwrap();
        assert_eq!(half.amplitude(h(1), h(1)), z1);
        assert!((half.amplitude(h(1), h(-1)) - z2).norm() < 1e-15);

        assert!(matches!(coherent_state(h(2), one, one), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn coherent_expectations() {
        let z1 = C64::new(0.3, -0.4);
        let z2 = C64::from_polar((1.0 - z1.norm_sqr()).sqrt(), 0.7);
        for t in 1..=6 {
            let j = h(t);
            let v = coherent_state(j, z1, z2).unwrap().component(j);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let s = spin_matrices(j);
            let ev = |m: &CMatrix| (v.adjoint() * m * &v)[(0, 0)].re;
            let jf = j.to_f64();
            assert!((ev(&s.z) - jf * (z1.norm_sqr() - z2.norm_sqr())).abs() < 1e-12);
            let dir = coherent_direction(z1, z2).unwrap().components();
            assert!((ev(&s.x) - jf * dir[0]).abs() < 1e-12);
            assert!((ev(&s.y) - jf * dir[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_rotation_identity_and_half_turn() {
        for t in 0..=5 {
            let u = exp_rotation(h(t), [0.0; 3]);
            assert!(max_abs(&(u - CMatrix::identity(h(t).dim(), h(t).dim()))) < 1e-14);
        }
        let u = exp_rotation(h(1), [0.0, 0.0, PI]);
        assert!((u[(0, 0)] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
