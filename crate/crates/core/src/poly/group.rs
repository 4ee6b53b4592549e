use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::{C64, TOL};

/// SU(2) element `[[u, -v*], [v, u*]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub u: C64,
    pub v: C64,
}

impl GroupElement {
    /// Rejects pairs off the unit sphere `|u|² + |v|² = 1`.
    pub fn new(u: C64, v: C64) -> Result<Self> {
        let n = u.norm_sqr() + v.norm_sqr();
        if (n - 1.0).abs() > TOL {
            return Err(Error::NotUnitary(n));
        }
        Ok(GroupElement { u, v })
    }

    pub fn identity() -> Self {
        GroupElement { u: C64::new(1.0, 0.0), v: C64::new(0.0, 0.0) }
    }

    /// `self · other` as 2×2 matrices.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            u: self.u * other.u - self.v.conj() * other.v,
            v: self.v * other.u + self.u.conj() * other.v,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { u: self.u.conj(), v: -self.v }
    }

    /// `exp(i n·σ/2)`, the spin-1/2 image of `exp(i n·J)`.
    pub fn from_axis_vector(n: [f64; 3]) -> Self {
        let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if r == 0.0 {
            return Self::identity();
        }
        let (s, c) = (r / 2.0).sin_cos();
        let k = n.map(|x| x / r);
        GroupElement {
            u: C64::new(c, s * k[2]),
            v: C64::new(0.0, s) * C64::new(k[0], k[1]),
        }
    }

    /// Principal logarithm: the vector `n` with `|n| ≤ 2π` and
    /// `exp(i n·σ/2) = self`. Ill-conditioned near `u = -1`.
    pub fn to_axis_vector(&self) -> [f64; 3] {
        let half = self.u.re.clamp(-1.0, 1.0).acos();
        let s = half.sin();
        if s.abs() < 1e-15 {
            return [0.0; 3];
        }
        let r = 2.0 * half;
        [r * self.v.im / s, -r * self.v.re / s, r * self.u.im / s]
    }

    /// The 2×2 matrix entries `[[a, b], [c, d]]`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.u, -self.v.conj()], [self.v, self.u.conj()]]
    }

    /// Rotation `O` with `V† σ_a V = Σ_b O_ab σ_b`, so that spin expectation
    /// values transform as `⟨J⟩ → O ⟨J⟩` when a state is acted on by `V`.
    pub fn rotation(&self) -> Matrix3<f64> {
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let pauli = [[[zero, one], [one, zero]], [[zero, -i], [i, zero]], [[one, zero], [zero, -one]]];
        let v = self.matrix();
        let vd = adjoint(&v);
        Matrix3::from_fn(|a, b| {
            let t = mul(&mul(&pauli[b], &vd), &mul(&pauli[a], &v));
            0.5 * (t[0][0] + t[1][1]).re
        })
    }
}

fn mul(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn adjoint(a: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_matches_matrix_product() {
        let a = GroupElement::from_axis_vector([0.3, -1.1, 0.4]);
        let b = GroupElement::from_axis_vector([-0.7, 0.2, 1.3]);
        let ab = a.compose(&b);
        let m = mul(&a.matrix(), &b.matrix());
        let n = ab.matrix();
        for r in 0..2 {
            for c in 0..2 {
                assert!((m[r][c] - n[r][c]).norm() < 1e-15);
            }
        }
        let e = a.compose(&a.inverse());
        assert!((e.u - C64::new(1.0, 0.0)).norm() < 1e-15 && e.v.norm() < 1e-15);
    }

    #[test]
    fn axis_vector_round_trip() {
        for n in [[0.3, -1.1, 0.4], [0.0, 0.0, 2.0], [1.5, 0.5, -0.2]] {
            let back = GroupElement::from_axis_vector(n).to_axis_vector();
            for k in 0..3 {
                assert!((back[k] - n[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_is_orthogonal_with_unit_determinant() {
        let o = GroupElement::from_axis_vector([0.9, -0.4, 2.1]).rotation();
        assert!((o * o.transpose() - Matrix3::identity()).abs().max() < 1e-14);
        assert!((o.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_points_off_the_sphere() {
        assert!(GroupElement::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
    }
}
