use super::{build_kraus_index, psd_part, transfer, KrausBlocks, KrausIndex, MaxSpin};
use crate::error::Result;
use crate::solver::{BlockId, BlockKind, LinearForm, SdpProblem, SolveReport};
use crate::spin::{BlockDensity, SpinKet, SpinSpace};
use crate::{CMatrix, C64};

/// Optimal covariant channel and the fidelity it reaches.
#[derive(Clone, Debug)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub channel: KrausBlocks,
    pub report: SolveReport,
}

const ONE: C64 = C64::new(1.0, 0.0);

/// Fixes the `(offset + r, offset + c)` entries of block `w` to `m`.
fn pin(sdp: &mut SdpProblem, w: BlockId, offset: usize, m: &CMatrix) {
    for c in 0..m.ncols() {
        for r in 0..=c {
            let mut f = LinearForm::new();
            f.add(w, offset + r, offset + c, ONE);
            if r == c {
                sdp.add_constraint(f, m[(r, c)].re);
            } else {
                sdp.add_complex_constraint(f, m[(r, c)]);
            }
        }
    }
}

/// `max Re tr X` subject to `[[A, X], [X†, B]] ⪰ 0` on block `w`.
fn trace_of_corner(w: BlockId, n: usize) -> LinearForm {
    let mut obj = LinearForm::new();
    for r in 0..n {
        obj.add(w, r, n + r, ONE);
    }
    obj
}

/// `F(ρ, σ) = tr sqrt(sqrt(σ) ρ sqrt(σ))` as the optimum of
/// `max ½ tr(X + X†)` subject to `[[ρ, X], [X†, σ]] ⪰ 0`.
pub fn fidelity_sdp(rho: &BlockDensity, sigma: &BlockDensity) -> Result<f64> {
    let space = SpinSpace::new(rho.space().irreps().iter().chain(sigma.space().irreps()).copied());
    let (a, b) = (rho.on_space(&space), sigma.on_space(&space));
    let n = space.dim();
    let mut sdp = SdpProblem::new();
    let w = sdp.add_block("W", 2 * n, BlockKind::Hermitian);
    pin(&mut sdp, w, 0, a.matrix());
    pin(&mut sdp, w, n, b.matrix());
    sdp.set_objective(trace_of_corner(w, n));
    Ok(sdp.solve()?.require_optimal()?.objective)
}

/// Channel variables plus trace preservation for every input irrep.
struct ChannelVar {
    index: KrausIndex,
    ids: Vec<BlockId>,
}

impl ChannelVar {
    fn new(sdp: &mut SdpProblem, index: KrausIndex) -> Self {
        let ids: Vec<BlockId> = index
            .blocks
            .iter()
            .map(|(big, pairs)| sdp.add_block(format!("F[{big}]"), pairs.len(), BlockKind::Hermitian))
            .collect();
        for &j in index.input_space().irreps() {
            let mut f = LinearForm::new();
            for ((_, pairs), &id) in index.blocks.iter().zip(&ids) {
                for (a, _) in pairs.iter().enumerate().filter(|(_, p)| p.1 == j) {
                    f.add(id, a, a, ONE);
                }
            }
            sdp.add_constraint(f, j.dim() as f64);
        }
        ChannelVar { index, ids }
    }

    /// `E(ρ)[r][c]` restricted to `out`, as linear forms.
    fn output_forms(&self, rho: &BlockDensity, out: &SpinSpace) -> Vec<LinearForm> {
        transfer(rho, &self.index, out)
            .into_iter()
            .map(|terms| {
                let mut f = LinearForm::new();
                for (k, a, b, x) in terms {
                    f.add(self.ids[k], a, b, x);
                }
                f
            })
            .collect()
    }

    fn value(self, report: &SolveReport) -> Result<KrausBlocks> {
        let blocks = self.ids.iter().map(|&id| psd_part(report.value(id))).collect();
        KrausBlocks::new(self.index, blocks)
    }
}

fn channel_setup(rho: &BlockDensity, j_out: crate::HalfInt) -> Result<(SdpProblem, ChannelVar, BlockDensity)> {
    rho.require_normalized()?;
    let index = build_kraus_index(rho.jmax()?, j_out);
    let input = rho.on_space(&index.input_space());
    let mut sdp = SdpProblem::new();
    let var = ChannelVar::new(&mut sdp, index);
    Ok((sdp, var, input))
}

/// Best fidelity with `σ` over covariant channels applied to `ρ`.
///
/// The output only enters through the irreps of `σ`, since the fidelity
/// reads nothing outside the support of `σ`; trace preservation still
/// covers every output irrep.
pub fn max_fidelity(rho: &BlockDensity, sigma: &BlockDensity) -> Result<FidelityResult> {
    sigma.require_normalized()?;
    let (mut sdp, var, input) = channel_setup(rho, sigma.jmax()?)?;
    let window = sigma.space().clone();
    let n = window.dim();
    let w = sdp.add_block("W", 2 * n, BlockKind::Hermitian);
    pin(&mut sdp, w, 0, sigma.matrix());
    let forms = var.output_forms(&input, &window);
    for c in 0..n {
        for r in 0..=c {
            // W[n+r][n+c] - E[r][c] = 0
            let mut f = forms[r * n + c].clone();
            f = scale_form(&f, -ONE);
            f.add(w, n + r, n + c, ONE);
            if r == c {
                sdp.add_constraint(f, 0.0);
            } else {
                sdp.add_complex_constraint(f, C64::new(0.0, 0.0));
            }
        }
    }
    sdp.set_objective(trace_of_corner(w, n));
    let report = sdp.solve()?.require_optimal()?;
    let fidelity = report.objective;
    let channel = var.value(&report)?;
    Ok(FidelityResult { fidelity, channel, report })
}

/// Best fidelity with a pure target: maximize `⟨σ|E(ρ)|σ⟩`, report its square root.
pub fn max_fidelity_pure_target(rho: &BlockDensity, sigma: &SpinKet) -> Result<FidelityResult> {
    sigma.require_normalized()?;
    let (mut sdp, var, input) = channel_setup(rho, sigma.jmax()?)?;
    let window = SpinSpace::new(sigma.irreps());
    let s = sigma.to_vector(&window);
    let n = window.dim();
    let forms = var.output_forms(&input, &window);
    let mut obj = LinearForm::new();
    for r in 0..n {
        for c in 0..n {
            let weight = s[r].conj() * s[c];
            if weight.norm() == 0.0 {
                continue;
            }
            for &(b, i, k, x) in forms[r * n + c].terms() {
                obj.add(b, i, k, x * weight);
            }
        }
    }
    sdp.set_objective(obj);
    let report = sdp.solve()?.require_optimal()?;
    let fidelity = report.objective.max(0.0).sqrt();
    let channel = var.value(&report)?;
    Ok(FidelityResult { fidelity, channel, report })
}

fn scale_form(f: &LinearForm, k: C64) -> LinearForm {
    let mut out = LinearForm::new();
    for &(b, r, c, x) in f.terms() {
        out.add(b, r, c, x * k);
    }
    out
}
