//! SU(2)-covariant transformations: feasibility, maximum probability,
//! covariant channels and maximum fidelity.
//!
//! A covariant channel is fixed by one PSD matrix `F_J` per coupling spin
//! `J`, indexed by (output irrep, input irrep) pairs. Its Kraus operators are
//!
//! ```text
//! K_{J,M,α} = Σ_{(j',j)} f^α_{(j',j)} Σ_{m'} (-1)^{j'-m'} (j' J j; -m' M m'-M) |j',m'⟩⟨j,m'-M|
//! ```
//!
//! with `F_J = Σ_α f^α f^α†`. Trace preservation reads
//! `Σ_{J,j'} F_J[(j',j),(j',j)] = 2j+1` for every input irrep `j`.

mod fidelity;
mod prob;

pub use fidelity::{fidelity_sdp, max_fidelity, max_fidelity_pure_target, FidelityResult};
pub use prob::{deterministic_feasible, max_prob, Feasibility, MaxProb};

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::spin::{parity_sign, triangle, wigner_3j, BlockDensity, HalfInt, SpinKet, SpinSpace};
use crate::{CMatrix, C64};

/// Amplitudes or populations below this count as empty.
pub const OCCUPIED: f64 = 1e-12;

/// Largest irrep carrying weight.
pub trait MaxSpin {
    fn jmax(&self) -> Result<HalfInt>;
}

impl MaxSpin for SpinKet {
    fn jmax(&self) -> Result<HalfInt> {
        let mut best = None;
        for ((j, _), a) in self.iter() {
            if a.norm_sqr() > OCCUPIED {
                best = best.max(Some(j));
            }
        }
        best.ok_or(Error::EmptyState)
    }
}

impl MaxSpin for BlockDensity {
    fn jmax(&self) -> Result<HalfInt> {
        self.weights()
            .into_iter()
            .filter(|&(_, w)| w > OCCUPIED)
            .map(|(j, _)| j)
            .max()
            .ok_or(Error::EmptyState)
    }
}

pub fn jmax_of(state: &impl MaxSpin) -> Result<HalfInt> {
    state.jmax()
}

/// Pairs `(j', j)` coupled through each `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausIndex {
    pub j_in: HalfInt,
    pub j_out: HalfInt,
    pub blocks: Vec<(HalfInt, Vec<(HalfInt, HalfInt)>)>,
}

impl KrausIndex {
    /// Input irreps `j ≤ j_in`.
    pub fn input_space(&self) -> SpinSpace {
        SpinSpace::up_to(self.j_in)
    }

    /// Every output irrep appearing in some pair.
    pub fn output_space(&self) -> SpinSpace {
        SpinSpace::new(self.blocks.iter().flat_map(|(_, p)| p.iter().map(|&(jp, _)| jp)))
    }

    pub fn triples(&self) -> impl Iterator<Item = (HalfInt, HalfInt, HalfInt)> + '_ {
        self.blocks.iter().flat_map(|(big, p)| p.iter().map(move |&(jp, j)| (*big, jp, j)))
    }
}

/// `J ≤ j_in + j_out`, input `j ≤ j_in`, output `j' ≤ j_in + J`, and the
/// triple `(j', J, j)` couples to zero.
pub fn build_kraus_index(j_in: HalfInt, j_out: HalfInt) -> KrausIndex {
    let mut blocks = Vec::new();
    for big in (j_in + j_out).spins_up_to() {
        let mut pairs = Vec::new();
        for jp in (j_in + big).spins_up_to() {
            for j in j_in.spins_up_to() {
                if triangle(jp, big, j) {
                    pairs.push((jp, j));
                }
            }
        }
        if !pairs.is_empty() {
            blocks.push((big, pairs));
        }
    }
    KrausIndex { j_in, j_out, blocks }
}

/// `(-1)^{j'-m'} (j' J j; -m' M m'-M)`.
fn coupling(jp: HalfInt, big: HalfInt, j: HalfInt, mp: HalfInt, m_big: HalfInt) -> f64 {
    parity_sign(jp - mp) * wigner_3j(jp, big, j, -mp, m_big, mp - m_big)
}

/// Entry `(r, c)` of the channel output, as a linear function of the
/// `F_J` entries: `(block, a, b, coef)`.
type Transfer = Vec<Vec<(usize, usize, usize, C64)>>;

/// Linear map `F ↦ E(ρ)` restricted to the output irreps in `out`,
/// row-major over `out.dim()²` entries.
fn transfer(rho: &BlockDensity, index: &KrausIndex, out: &SpinSpace) -> Transfer {
    let n = out.dim();
    let mut t: Transfer = vec![Vec::new(); n * n];
    let sin = rho.space();
    let mat = rho.matrix();
    for (k, (big, pairs)) in index.blocks.iter().enumerate() {
        for (a, &(jp1, j1)) in pairs.iter().enumerate() {
            if !out.contains(jp1) || !sin.contains(j1) {
                continue;
            }
            for (b, &(jp2, j2)) in pairs.iter().enumerate() {
                if !out.contains(jp2) || !sin.contains(j2) {
                    continue;
                }
                for m_big in big.projections() {
                    for m1 in jp1.projections() {
                        let n1 = m1 - m_big;
                        if !j1.admits(n1) {
                            continue;
                        }
                        let c1 = coupling(jp1, *big, j1, m1, m_big);
                        if c1 == 0.0 {
                            continue;
                        }
                        let (r, ir) = (out.index(jp1, m1).unwrap(), sin.index(j1, n1).unwrap());
                        for m2 in jp2.projections() {
                            let n2 = m2 - m_big;
                            if !j2.admits(n2) {
                                continue;
                            }
                            let x = mat[(ir, sin.index(j2, n2).unwrap())];
                            let c2 = coupling(jp2, *big, j2, m2, m_big);
                            if c2 == 0.0 || x.norm() == 0.0 {
                                continue;
                            }
                            let c = out.index(jp2, m2).unwrap();
                            t[r * n + c].push((k, a, b, x * (c1 * c2)));
                        }
                    }
                }
            }
        }
    }
    t
}

/// Gram matrices `F_J` of a covariant channel.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausBlocks {
    pub index: KrausIndex,
    pub blocks: Vec<CMatrix>,
}

impl KrausBlocks {
    /// Checks shapes, Hermiticity and positivity (to `1e-8`).
    pub fn new(index: KrausIndex, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != index.blocks.len() {
            return Err(Error::Dimension(format!("{} blocks for {} coupling spins", blocks.len(), index.blocks.len())));
        }
        for ((big, pairs), f) in index.blocks.iter().zip(&blocks) {
            if f.nrows() != pairs.len() || f.ncols() != pairs.len() {
                return Err(Error::Dimension(format!("F_{big} must be {0}x{0}", pairs.len())));
            }
            let dev = (f - f.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > 1e-8 {
                return Err(Error::NotHermitian(dev));
            }
            let min = SymmetricEigen::new(f.clone()).eigenvalues.min();
            if min < -1e-8 {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(KrausBlocks { index, blocks })
    }

    /// `F_0[(j,j),(k,k)] = sqrt((2j+1)(2k+1))`.
    pub fn identity(j_in: HalfInt) -> Self {
        let index = build_kraus_index(j_in, j_in);
        let blocks = index
            .blocks
            .iter()
            .map(|(big, pairs)| {
                let n = pairs.len();
                let f: Vec<f64> = pairs
                    .iter()
                    .map(|&(jp, j)| if *big == HalfInt::ZERO && jp == j { (j.dim() as f64).sqrt() } else { 0.0 })
                    .collect();
                CMatrix::from_fn(n, n, |a, b| C64::new(f[a] * f[b], 0.0))
            })
            .collect();
        KrausBlocks { index, blocks }
    }

    /// `Σ_{J,j'} F_J[(j',j),(j',j)]` for each input irrep.
    pub fn normalization(&self) -> Vec<(HalfInt, f64)> {
        self.index
            .input_space()
            .irreps()
            .iter()
            .map(|&j| {
                let s = self
                    .index
                    .blocks
                    .iter()
                    .zip(&self.blocks)
                    .flat_map(|((_, pairs), f)| {
                        pairs.iter().enumerate().filter(move |(_, p)| p.1 == j).map(move |(a, _)| f[(a, a)].re)
                    })
                    .sum();
                (j, s)
            })
            .collect()
    }

    /// Fails if some input irrep violates trace preservation beyond `tol`.
    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        for (j, sum) in self.normalization() {
            let expected = j.dim() as f64;
            if (sum - expected).abs() > tol {
                return Err(Error::ChannelNormalization { j, sum, expected });
            }
        }
        Ok(())
    }
}

/// `E(ρ) = Σ K ρ K†` on every output irrep the channel can reach.
pub fn channel_output(rho: &BlockDensity, f: &KrausBlocks) -> Result<BlockDensity> {
    f.require_normalized(1e-6)?;
    let out = f.index.output_space();
    let m = apply(rho, f, &out)?;
    Ok(BlockDensity::new(out, m)?)
}

/// Channel output restricted to the irreps of `out`, as a raw matrix.
pub(crate) fn apply(rho: &BlockDensity, f: &KrausBlocks, out: &SpinSpace) -> Result<CMatrix> {
    if let Some(&j) = rho.space().irreps().iter().find(|&&j| j > f.index.j_in) {
        return Err(Error::Dimension(format!("input irrep {j} exceeds the channel's j_in = {}", f.index.j_in)));
    }
    let n = out.dim();
    let t = transfer(rho, &f.index, out);
    Ok(CMatrix::from_fn(n, n, |r, c| t[r * n + c].iter().map(|&(k, a, b, x)| x * f.blocks[k][(a, b)]).sum()))
}

/// One Kraus operator, mapping the input space (all `j ≤ j_in`) to the
/// output space (all reachable `j'`).
#[derive(Clone, Debug)]
pub struct KrausOperator {
    pub big_j: HalfInt,
    pub m: HalfInt,
    pub alpha: usize,
    pub matrix: CMatrix,
}

/// Rank-one decomposition of every `F_J` and the resulting operators for
/// all `M`. Eigenvalues below `1e-9` (relative) are dropped; below `-1e-8`
/// they are rejected.
pub fn kraus_from_blocks(f: &KrausBlocks) -> Result<Vec<KrausOperator>> {
    let sin = f.index.input_space();
    let out = f.index.output_space();
    let mut ops = Vec::new();
    for ((big, pairs), fj) in f.index.blocks.iter().zip(&f.blocks) {
        let eig = SymmetricEigen::new((fj + fj.adjoint()).scale(0.5));
        let top = eig.eigenvalues.max().max(1.0);
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let mut alpha = 0;
        for k in order {
            let lambda = eig.eigenvalues[k];
            if lambda < -1e-8 {
                return Err(Error::NotPsd(lambda));
            }
            if lambda <= 1e-9 * top {
                continue;
            }
            let vec = eig.eigenvectors.column(k) * C64::new(lambda.sqrt(), 0.0);
            for m_big in big.projections() {
                let mut k_op = CMatrix::zeros(out.dim(), sin.dim());
                for (a, &(jp, j)) in pairs.iter().enumerate() {
                    for mp in jp.projections() {
                        let m = mp - m_big;
                        if !j.admits(m) {
                            continue;
                        }
                        let c = coupling(jp, *big, j, mp, m_big);
                        k_op[(out.index(jp, mp).unwrap(), sin.index(j, m).unwrap())] += vec[a] * c;
                    }
                }
                ops.push(KrausOperator { big_j: *big, m: m_big, alpha, matrix: k_op });
            }
            alpha += 1;
        }
    }
    Ok(ops)
}

/// Hermitian part with negative eigenvalues clipped.
pub(crate) fn psd_part(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new((m + m.adjoint()).scale(0.5));
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
