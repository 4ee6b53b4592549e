//! Majorana constellations of single-irrep pure states.
//!
//! A spin-`j` state is described by the `2j` directions `n` for which the
//! antipodal coherent state is orthogonal to it, `⟨-n|ψ⟩ = 0`. Writing the
//! coherent parameters as `(z1, z2) ∝ (1, w)`, the overlap is a polynomial of
//! degree at most `2j` in `w`; each root is a star and each missing top degree
//! is a star at the south pole (`z1 = 0`).

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::spin::{binomial, coherent_direction, HalfInt, SpinKet, SphereVec};
use crate::C64;

/// Leading coefficients below this (relative to the largest one) count as zero.
pub const LEADING_CUTOFF: f64 = 1e-10;

/// Roots closer than this chordal distance are merged into one star.
pub const MERGE_DISTANCE: f64 = 1e-6;

/// Stars with multiplicities; the multiplicities add up to `2j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    pub j: HalfInt,
    pub stars: Vec<(SphereVec, usize)>,
}

impl Constellation {
    /// Every star repeated according to its multiplicity.
    pub fn points(&self) -> Vec<SphereVec> {
        self.stars.iter().flat_map(|&(s, k)| std::iter::repeat_n(s, k)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.stars.iter().map(|&(_, k)| k).sum()
    }

    /// Largest angle in a greedy nearest-neighbour matching of the two
    /// expanded point lists; `None` if the sizes differ.
    pub fn max_angle_to(&self, other: &Constellation) -> Option<f64> {
        let a = self.points();
        let mut b = other.points();
        if a.len() != b.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for p in a {
            let (k, angle) = b
                .iter()
                .enumerate()
                .map(|(k, q)| (k, p.angle(q)))
                .min_by(|x, y| x.1.total_cmp(&y.1))?;
            worst = worst.max(angle);
            b.swap_remove(k);
        }
        Some(worst)
    }
}

/// Coefficients of the overlap polynomial in `w`, index `k = j + m`:
/// `sqrt(C(2j, j-m)) (-1)^{j+m} ψ_m`.
pub fn overlap_coeffs(ket: &SpinKet, j: HalfInt) -> Vec<C64> {
    let two_j = j.twice() as u32;
    (0..=two_j)
        .map(|k| {
            let m = HalfInt::from_twice(2 * k as i32 - j.twice());
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            ket.amplitude(j, m) * (sign * binomial(two_j, two_j - k).sqrt())
        })
        .collect()
}

/// Sphere point of the coherent state `(1, w)`.
pub fn star_of_root(w: C64) -> SphereVec {
    let n = (1.0 + w.norm_sqr()).sqrt();
    coherent_direction(C64::new(1.0 / n, 0.0), w / n).expect("nonzero coherent pair")
}

/// Inverse of [`star_of_root`]; `None` at the south pole.
pub fn root_of_star(s: &SphereVec) -> Option<C64> {
    let [x, y, z] = s.components();
    (1.0 + z > 1e-300).then(|| C64::new(x, y) / (1.0 + z))
}

/// Majorana constellation of a state supported on a single irrep.
pub fn majorana_stars(ket: &SpinKet) -> Result<Constellation> {
    let j = ket.single_irrep()?;
    let coeffs = overlap_coeffs(ket, j);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let small = |c: &C64| c.norm() <= LEADING_CUTOFF * scale;

    let degree = coeffs.iter().rposition(|c| !small(c)).expect("nonzero state");
    let at_infinity = coeffs.len() - 1 - degree;
    let at_zero = coeffs.iter().position(|c| !small(c)).unwrap();

    let mut points = vec![SphereVec::SOUTH; at_infinity];
    points.extend(std::iter::repeat_n(SphereVec::NORTH, at_zero));
    let core = &coeffs[at_zero..=degree];
    points.extend(polynomial_roots(core).into_iter().map(star_of_root));

    Ok(Constellation { j, stars: group(points) })
}

/// Roots of `Σ_k c_k w^k` from the companion-matrix eigenvalues, each polished
/// by a few Newton steps.
fn polynomial_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        comp[(0, k)] = -c[n - 1 - k] / lead;
    }
    for k in 1..n {
        comp[(k, k - 1)] = C64::new(1.0, 0.0);
    }
    // a complex Schur form is always triangular
    let eig = comp.schur().eigenvalues().expect("complex Schur form");
    eig.iter().map(|&w| newton(c, w)).collect()
}

fn newton(c: &[C64], mut w: C64) -> C64 {
    for _ in 0..3 {
        let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &a in c.iter().rev() {
            dp = dp * w + p;
            p = p * w + a;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let next = w - p / dp;
        // keep the eigenvalue estimate if Newton wanders (clustered roots)
        if !next.is_finite() || (next - w).norm() > 1e-3 * (1.0 + w.norm()) {
            break;
        }
        w = next;
    }
    w
}

fn group(points: Vec<SphereVec>) -> Vec<(SphereVec, usize)> {
    let mut clusters: Vec<(Vec<SphereVec>, [f64; 3])> = Vec::new();
    for p in points {
        match clusters.iter_mut().find(|(members, _)| members.iter().any(|q| q.chordal_distance(&p) < MERGE_DISTANCE)) {
            Some((members, sum)) => {
                members.push(p);
                let c = p.components();
                for k in 0..3 {
                    sum[k] += c[k];
                }
            }
            None => clusters.push((vec![p], p.components())),
        }
    }
    let mut stars: Vec<(SphereVec, usize)> = clusters
        .into_iter()
        .map(|(members, sum)| (SphereVec::normalize(sum).unwrap_or(members[0]), members.len()))
        .collect();
    // deterministic order: north to south, then by azimuth
    stars.sort_by(|a, b| {
        let (p, q) = (a.0.components(), b.0.components());
        q[2].total_cmp(&p[2]).then(p[1].atan2(p[0]).total_cmp(&q[1].atan2(q[0])))
    });
    stars
}

/// Applies a proper rotation to every star.
pub fn rotate_constellation(c: &Constellation, o: &Matrix3<f64>) -> Result<Constellation> {
    let ortho = (o * o.transpose() - Matrix3::identity()).abs().max();
    if ortho > 1e-9 || (o.determinant() - 1.0).abs() > 1e-9 {
        return Err(Error::NotRotation);
    }
    let stars = c
        .stars
        .iter()
        .map(|&(s, k)| {
            let v = o * nalgebra::Vector3::from(s.components());
            (SphereVec::normalize([v[0], v[1], v[2]]).expect("rotation keeps unit length"), k)
        })
        .collect();
    Ok(Constellation { j: c.j, stars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::coherent_state;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn close(a: &SphereVec, b: [f64; 3]) -> bool {
        a.components().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn top_state_sits_at_the_north_pole() {
        let c = majorana_stars(&SpinKet::basis(h(4), h(4)).unwrap()).unwrap();
        assert_eq!(c.stars.len(), 1);
        assert!(close(&c.stars[0].0, [0.0, 0.0, 1.0]));
        assert_eq!(c.stars[0].1, 4);
    }

    #[test]
    fn m_zero_spin_one() {
        let c = majorana_stars(&SpinKet::basis(h(2), h(0)).unwrap()).unwrap();
        assert_eq!(c.stars.len(), 2);
        assert!(close(&c.stars[0].0, [0.0, 0.0, 1.0]));
        assert!(close(&c.stars[1].0, [0.0, 0.0, -1.0]));
    }

    #[test]
    fn spin_down_is_the_south_pole() {
        let c = majorana_stars(&SpinKet::basis(h(1), h(-1)).unwrap()).unwrap();
        assert_eq!(c.points().len(), 1);
        assert!(close(&c.points()[0], [0.0, 0.0, -1.0]));
    }

    #[test]
    fn coherent_state_stars_point_along_its_direction() {
        let (z1, z2) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let dir = coherent_direction(z1, z2).unwrap();
        let c = majorana_stars(&coherent_state(h(1), z1, z2).unwrap()).unwrap();
        assert!(c.stars[0].0.angle(&dir) < 1e-12);
    }

    #[test]
    fn multi_irrep_input_is_rejected() {
        let ket = SpinKet::from_terms([(h(0), h(0), C64::new(1.0, 0.0)), (h(2), h(0), C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(majorana_stars(&ket), Err(Error::MultipleIrreps(_))));
    }

    #[test]
    fn half_turn_about_x_swaps_poles() {
        let c = majorana_stars(&SpinKet::basis(h(1), h(1)).unwrap()).unwrap();
        let o = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0);
        let r = rotate_constellation(&c, &o).unwrap();
        assert!(close(&r.stars[0].0, [0.0, 0.0, -1.0]));
        assert_eq!(rotate_constellation(&c, &Matrix3::identity()).unwrap(), c);
        assert!(rotate_constellation(&c, &Matrix3::from_diagonal_element(-1.0)).is_err());
    }

    #[test]
    fn stereographic_round_trip() {
        let w = C64::new(0.3, -1.7);
        let back = root_of_star(&star_of_root(w)).unwrap();
        assert!((back - w).norm() < 1e-14);
    }
}
