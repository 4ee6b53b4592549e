mod common;

use common::*;
use nalgebra::SymmetricEigen;
use rand::rngs::StdRng;
use rotacov::covariant::{
    build_kraus_index, channel_output, deterministic_feasible, fidelity_sdp, kraus_from_blocks, max_fidelity,
    max_fidelity_pure_target, max_prob, KrausBlocks,
};
use rotacov::poly::{charfun_mixed, charfun_pure, rep_matrix_eval, GroupElement};
use rotacov::u1::{su2_coherent_line_feasible, ProbSeq};
use rotacov::{BlockDensity, CMatrix, HalfInt, SpinKet, SpinSpace, C64};

fn random_channel(r: &mut StdRng, j_in: HalfInt, j_out: HalfInt) -> KrausBlocks {
    let index = build_kraus_index(j_in, j_out);
    let raw: Vec<CMatrix> = index.blocks.iter().map(|(_, p)| psd(r, p.len(), p.len())).collect();
    // rescale so every input irrep sums to 2j+1
    let mut sums = std::collections::BTreeMap::new();
    for ((_, pairs), f) in index.blocks.iter().zip(&raw) {
        for (a, &(_, j)) in pairs.iter().enumerate() {
            *sums.entry(j).or_insert(0.0) += f[(a, a)].re;
        }
    }
    let blocks = index
        .blocks
        .iter()
        .zip(&raw)
        .map(|((_, pairs), f)| {
            let d: Vec<f64> = pairs.iter().map(|&(_, j)| (j.dim() as f64 / sums[&j]).sqrt()).collect();
            CMatrix::from_fn(f.nrows(), f.ncols(), |a, b| f[(a, b)] * d[a] * d[b])
        })
        .collect();
    KrausBlocks::new(index, blocks).unwrap()
}

fn rep_on(space: &SpinSpace, g: &GroupElement) -> CMatrix {
    let mut u = CMatrix::zeros(space.dim(), space.dim());
    for &j in space.irreps() {
        let o = space.offset(j).unwrap();
        u.view_mut((o, o), (j.dim(), j.dim())).copy_from(&rep_matrix_eval(j, g));
    }
    u
}

fn sqrtm(m: &CMatrix) -> CMatrix {
    let e = SymmetricEigen::new(m.clone());
    let d = CMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `tr sqrt(sqrt σ ρ sqrt σ)` by dense eigendecomposition.
fn fidelity_dense(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let s = sqrtm(sigma);
    let inner = &s * rho * &s;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(inner).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum()
}

fn example_psi() -> SpinKet {
    let s = 6f64.sqrt();
    SpinKet::from_terms([
        (h(0), h(0), C64::new(1.0 / s, 0.0)),
        (h(2), h(0), C64::new(1.0 / s, 0.0)),
        (h(3), h(3), C64::new(2.0 / s, 0.0)),
    ])
    .unwrap()
}

#[test]
fn random_channels_preserve_trace() {
    let mut r = rng(21);
    for case in 0..50 {
        let j_in = h(1 + case % 3);
        let f = random_channel(&mut r, j_in, h(case % 3));
        let rho = density(&mut r, j_in);
        let out = channel_output(&rho, &f).unwrap();
        assert!((out.trace() - rho.trace()).abs() < 1e-8, "case {case}");
    }
}

#[test]
fn random_channels_are_covariant() {
    let mut r = rng(22);
    for case in 0..20 {
        let j_in = h(1 + case % 3);
        let f = random_channel(&mut r, j_in, h(1 + case % 2));
        let rho = density(&mut r, j_in);
        let g = group_element(&mut r);
        let u_in = rep_on(rho.space(), &g);
        let rotated = BlockDensity::new(rho.space().clone(), &u_in * rho.matrix() * u_in.adjoint()).unwrap();
        let a = channel_output(&rotated, &f).unwrap();
        let b = channel_output(&rho, &f).unwrap();
        let u_out = rep_on(b.space(), &g);
        let diff = a.matrix() - &u_out * b.matrix() * u_out.adjoint();
        assert!(max_abs(&diff) < 1e-7, "case {case}: {}", max_abs(&diff));
    }
}

#[test]
fn kraus_operators_reproduce_the_channel() {
    let mut r = rng(23);
    for case in 0..10 {
        let j_in = h(1 + case % 3);
        let f = random_channel(&mut r, j_in, h(2));
        let ops = kraus_from_blocks(&f).unwrap();
        let d = f.index.input_space().dim();
        let sum: CMatrix = ops.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.matrix.adjoint() * &k.matrix);
        assert!(max_abs(&(sum - CMatrix::identity(d, d))) < 1e-7, "case {case}");

        let rho = density(&mut r, j_in);
        let dense: CMatrix = ops.iter().map(|k| &k.matrix * rho.matrix() * k.matrix.adjoint()).fold(
            CMatrix::zeros(ops[0].matrix.nrows(), ops[0].matrix.nrows()),
            |acc, x| acc + x,
        );
        assert!(max_abs(&(dense - channel_output(&rho, &f).unwrap().matrix())) < 1e-7);
    }
}

#[test]
fn rank_two_block_gives_two_families() {
    let mut r = rng(24);
    let mut f = random_channel(&mut r, h(2), h(0));
    let k = f.index.blocks.iter().position(|(_, p)| p.len() >= 3).unwrap();
    let n = f.blocks[k].nrows();
    let low = psd(&mut r, n, 2) * C64::new(f.blocks[k].trace().re, 0.0);
    f.blocks[k] = low;
    let ops = kraus_from_blocks(&f).unwrap();
    let big = f.index.blocks[k].0;
    let families: std::collections::BTreeSet<usize> =
        ops.iter().filter(|o| o.big_j == big).map(|o| o.alpha).collect();
    assert_eq!(families.len(), 2);
    assert_eq!(ops.iter().filter(|o| o.big_j == big).count(), 2 * big.dim());
}

#[test]
fn fidelity_sdp_matches_dense_formula() {
    let mut r = rng(25);
    for case in 0..10 {
        let space = SpinSpace::new([h(2)]);
        let (a, b) = (psd(&mut r, 3, 1 + case % 3), psd(&mut r, 3, 3));
        let rho = BlockDensity::new(space.clone(), a.clone()).unwrap();
        let sigma = BlockDensity::new(space, b.clone()).unwrap();
        let f = fidelity_sdp(&rho, &sigma).unwrap();
        assert!((f - fidelity_dense(&a, &b)).abs() < 1e-6, "case {case}");
    }
}

#[test]
fn mixed_target_fidelity_of_three_irrep_state() {
    let rho = BlockDensity::from_ket(&example_psi());
    let sigma = BlockDensity::from_ket(&SpinKet::basis(h(1), h(-1)).unwrap());
    let mixed = max_fidelity(&rho, &sigma).unwrap();
    assert!((mixed.fidelity - 0.93).abs() < 0.005, "F = {}", mixed.fidelity);
    let pure = max_fidelity_pure_target(&rho, &SpinKet::basis(h(1), h(-1)).unwrap()).unwrap();
    assert!((pure.fidelity - mixed.fidelity).abs() < 1e-4);
}

#[test]
fn fidelity_formulations_agree_on_pure_targets() {
    let mut r = rng(26);
    for case in 0..5 {
        let j_in = h(1 + case % 2);
        let rho = BlockDensity::new(SpinSpace::up_to(j_in), psd(&mut r, SpinSpace::up_to(j_in).dim(), 2)).unwrap();
        let target = ket(&mut r, &[h(case % 3)]);
        let a = max_fidelity(&rho, &BlockDensity::from_ket(&target)).unwrap();
        let b = max_fidelity_pure_target(&rho, &target).unwrap();
        assert!((a.fidelity - b.fidelity).abs() < 1e-4, "case {case}: {} vs {}", a.fidelity, b.fidelity);
    }
}

#[test]
fn witnesses_satisfy_the_polynomial_identity() {
    let phi = SpinKet::basis(h(1), h(-1)).unwrap();
    let psi = example_psi();
    let res = max_prob(&psi, &phi).unwrap();
    let lhs = charfun_pure(&psi);
    let rhs = &(&charfun_mixed(&res.rho) * &charfun_pure(&phi)) + &charfun_mixed(&res.sigma);
    let mut r = rng(27);
    for _ in 0..200 {
        let g = group_element(&mut r);
        assert!((lhs.evaluate(g.u, g.v) - rhs.evaluate(g.u, g.v)).norm() < 1e-6);
    }
    assert!((res.rho.trace() - res.p).abs() < 1e-6);
}

#[test]
fn deterministic_conversions_are_certain() {
    let psi = SpinKet::basis(h(2), h(2)).unwrap();
    let phi = SpinKet::basis(h(1), h(1)).unwrap();
    assert!(deterministic_feasible(&psi, &phi).unwrap().feasible);
    assert!((max_prob(&psi, &phi).unwrap().p - 1.0).abs() < 1e-6);
    let f = max_fidelity(&BlockDensity::from_ket(&psi), &BlockDensity::from_ket(&phi)).unwrap();
    assert!((f.fidelity - 1.0).abs() < 1e-5);
}

fn line_state(p: &ProbSeq) -> SpinKet {
    SpinKet::from_terms(p.iter().map(|(j, x)| (j, j, C64::new(x.sqrt(), 0.0)))).unwrap()
}

#[test]
fn line_criterion_matches_max_prob() {
    let seq = |v: &[(i32, f64)]| ProbSeq::new(v.iter().map(|&(t, x)| (h(t), x))).unwrap();
    let cases = [
        (seq(&[(2, 1.0)]), seq(&[(1, 1.0)])),
        (seq(&[(1, 1.0)]), seq(&[(2, 1.0)])),
        (seq(&[(1, 0.5), (2, 0.5)]), seq(&[(1, 1.0)])),
        (seq(&[(2, 0.25), (3, 0.5), (4, 0.25)]), seq(&[(1, 0.5), (2, 0.5)])),
        (seq(&[(2, 0.3), (3, 0.7)]), seq(&[(1, 0.5), (2, 0.5)])),
        (seq(&[(0, 0.5), (2, 0.5)]), seq(&[(0, 0.5), (1, 0.5)])),
        (seq(&[(2, 0.12), (3, 0.46), (4, 0.42)]), seq(&[(1, 0.4), (2, 0.6)])),
        (seq(&[(3, 1.0)]), seq(&[(1, 0.5), (3, 0.5)])),
        (seq(&[(0, 0.5), (4, 0.5)]), seq(&[(0, 0.5), (2, 0.5)])),
        (seq(&[(1, 0.2), (3, 0.8)]), seq(&[(0, 0.2), (2, 0.8)])),
    ];
    let (mut yes, mut no) = (0, 0);
    for (k, (p, q)) in cases.iter().enumerate() {
        let line = su2_coherent_line_feasible(p, q).unwrap().feasible;
        let prob = max_prob(&line_state(p), &line_state(q)).unwrap().p;
        assert_eq!(line, prob > 1.0 - 1e-5, "case {k}: p = {prob}");
        if line { yes += 1 } else { no += 1 }
    }
    assert!(yes >= 3 && no >= 3);
}
