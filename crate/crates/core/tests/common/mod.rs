#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rotacov::poly::GroupElement;
use rotacov::{BlockDensity, CMatrix, HalfInt, SpinKet, C64};

pub fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gauss(r: &mut StdRng) -> f64 {
    // Box-Muller
    let (a, b): (f64, f64) = (r.random::<f64>().max(1e-300), r.random());
    (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos()
}

pub fn cgauss(r: &mut StdRng) -> C64 {
    C64::new(gauss(r), gauss(r))
}

/// Haar-random SU(2) element.
pub fn group_element(r: &mut StdRng) -> GroupElement {
    let (u, v) = (cgauss(r), cgauss(r));
    let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
    GroupElement::new(u / n, v / n).unwrap()
}

/// Random normalized ket on the given irreps.
pub fn ket(r: &mut StdRng, irreps: &[HalfInt]) -> SpinKet {
    let mut k = SpinKet::new();
    for &j in irreps {
        for m in j.projections() {
            k.add(j, m, cgauss(r)).unwrap();
        }
    }
    k.normalized().unwrap()
}

/// Random density `A A† / tr` of size `n`.
pub fn psd(r: &mut StdRng, n: usize, rank: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, rank, |_, _| cgauss(r));
    let m = &a * a.adjoint();
    let t = m.trace();
    m / t
}

/// Random full-rank density on every irrep up to `jmax`, with coherences.
pub fn density(r: &mut StdRng, jmax: HalfInt) -> BlockDensity {
    let space = rotacov::SpinSpace::up_to(jmax);
    let n = space.dim();
    BlockDensity::new(space, psd(r, n, n)).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
