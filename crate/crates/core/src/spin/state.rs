use std::collections::BTreeMap;

use nalgebra::{DVector, SymmetricEigen};

use super::half::HalfInt;
use crate::error::{Error, Result};
use crate::{CMatrix, C64, TOL};

/// Multiplicity-free direct sum of irreps, in ascending order of `j`.
///
/// Basis vectors are ordered irrep by irrep and, inside each irrep, by
/// `m = j, j-1, ..., -j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSpace {
    irreps: Vec<HalfInt>,
    offsets: Vec<usize>,
    dim: usize,
}

impl SpinSpace {
    pub fn new(irreps: impl IntoIterator<Item = HalfInt>) -> Self {
        let mut irreps: Vec<_> = irreps.into_iter().collect();
        irreps.sort();
        irreps.dedup();
        assert!(irreps.iter().all(|j| !j.is_negative()), "negative irrep label");
        let mut offsets = Vec::with_capacity(irreps.len());
        let mut dim = 0;
        for j in &irreps {
            offsets.push(dim);
            dim += j.dim();
        }
        SpinSpace { irreps, offsets, dim }
    }

    /// Every irrep `0, 1/2, ..., jmax`.
    pub fn up_to(jmax: HalfInt) -> Self {
        Self::new(jmax.spins_up_to())
    }

    pub fn irreps(&self) -> &[HalfInt] {
        &self.irreps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, j: HalfInt) -> bool {
        self.irreps.binary_search(&j).is_ok()
    }

    pub fn offset(&self, j: HalfInt) -> Option<usize> {
        self.irreps.binary_search(&j).ok().map(|k| self.offsets[k])
    }

    pub fn index(&self, j: HalfInt, m: HalfInt) -> Option<usize> {
        if !j.admits(m) {
            return None;
        }
        self.offset(j).map(|o| o + j.offset_of(m))
    }

    /// Basis labels `(j, m)` in storage order.
    pub fn basis(&self) -> impl Iterator<Item = (HalfInt, HalfInt)> + '_ {
        self.irreps.iter().flat_map(|&j| j.projections().map(move |m| (j, m)))
    }

    pub fn max_spin(&self) -> Option<HalfInt> {
        self.irreps.last().copied()
    }
}

/// Pure state over a multiplicity-free sum of irreps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpinKet {
    amplitudes: BTreeMap<(HalfInt, HalfInt), C64>,
}

impl SpinKet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Basis ket `|j, m⟩`.
    pub fn basis(j: HalfInt, m: HalfInt) -> Result<Self> {
        Self::from_terms([(j, m, C64::new(1.0, 0.0))])
    }

    /// Builds a ket from `(j, m, amplitude)` terms; repeated labels add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (HalfInt, HalfInt, C64)>) -> Result<Self> {
        let mut ket = Self::new();
        for (j, m, a) in terms {
            ket.add(j, m, a)?;
        }
        Ok(ket)
    }

    pub fn add(&mut self, j: HalfInt, m: HalfInt, amplitude: C64) -> Result<()> {
        if !j.admits(m) {
            return Err(Error::InvalidLabel { j, m });
        }
        let entry = self.amplitudes.entry((j, m)).or_insert(C64::new(0.0, 0.0));
        *entry += amplitude;
        if entry.norm() == 0.0 {
            self.amplitudes.remove(&(j, m));
        }
        Ok(())
    }

    pub fn amplitude(&self, j: HalfInt, m: HalfInt) -> C64 {
        self.amplitudes.get(&(j, m)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((HalfInt, HalfInt), C64)> + '_ {
        self.amplitudes.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::EmptyState);
        }
        let s = 1.0 / n.sqrt();
        Ok(SpinKet {
            amplitudes: self.amplitudes.iter().map(|(&k, &v)| (k, v * s)).collect(),
        })
    }

    /// Fails unless the norm is 1 within the global tolerance.
    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// Irreps carrying weight above `1e-12`.
    pub fn irreps(&self) -> Vec<HalfInt> {
        let mut w: BTreeMap<HalfInt, f64> = BTreeMap::new();
        for (&(j, _), a) in &self.amplitudes {
            *w.entry(j).or_default() += a.norm_sqr();
        }
        w.into_iter().filter(|&(_, x)| x > 1e-12).map(|(j, _)| j).collect()
    }

    /// Amplitude vector of irrep `j` in the order `m = j, ..., -j`.
    pub fn component(&self, j: HalfInt) -> DVector<C64> {
        DVector::from_iterator(j.dim(), j.projections().map(|m| self.amplitude(j, m)))
    }

    /// Replaces the irrep-`j` component by `vec`.
    pub fn set_component(&mut self, j: HalfInt, vec: &DVector<C64>) {
        assert_eq!(vec.len(), j.dim());
        for (m, &a) in j.projections().zip(vec.iter()) {
            if a.norm() == 0.0 {
                self.amplitudes.remove(&(j, m));
            } else {
                self.amplitudes.insert((j, m), a);
            }
        }
    }

    /// The single irrep supporting this ket.
    pub fn single_irrep(&self) -> Result<HalfInt> {
        match self.irreps().as_slice() {
            [j] => Ok(*j),
            [] => Err(Error::EmptyState),
            many => Err(Error::MultipleIrreps(many.to_vec())),
        }
    }

    /// Dense amplitude vector over `space`; weight outside `space` is dropped.
    pub fn to_vector(&self, space: &SpinSpace) -> DVector<C64> {
        let mut v = DVector::zeros(space.dim());
        for (&(j, m), &a) in &self.amplitudes {
            if let Some(i) = space.index(j, m) {
                v[i] = a;
            }
        }
        v
    }

    pub fn inner(&self, other: &SpinKet) -> C64 {
        self.amplitudes
            .iter()
            .map(|(k, a)| a.conj() * other.amplitudes.get(k).copied().unwrap_or_default())
            .sum()
    }
}

/// Density operator on a spin space.
///
/// Diagonal blocks (one per irrep) carry the populations; off-diagonal blocks
/// carry coherences between irreps. Characteristic functions only read the
/// diagonal blocks, but covariant channels can turn coherences into
/// populations, so the full matrix is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDensity {
    space: SpinSpace,
    matrix: CMatrix,
}

impl BlockDensity {
    /// Validates Hermiticity and positivity (tolerance scaled by the largest entry).
    pub fn new(space: SpinSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-8 * scale {
            return Err(Error::NotHermitian(dev));
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        if matrix.nrows() > 0 {
            let min = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
            if min < -1e-7 * scale {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(BlockDensity { space, matrix })
    }

    /// Block-diagonal density from per-irrep blocks.
    pub fn from_blocks(blocks: impl IntoIterator<Item = (HalfInt, CMatrix)>) -> Result<Self> {
        let blocks: BTreeMap<HalfInt, CMatrix> = blocks.into_iter().collect();
        Self::from_parts(&blocks, &BTreeMap::new())
    }

    /// Density from diagonal blocks plus coherence blocks `(j1, j2)` with `j1 < j2`.
    ///
    /// The `(j1, j2)` block holds `⟨j1, m1|ρ|j2, m2⟩`; its adjoint fills `(j2, j1)`.
    pub fn from_parts(
        diagonal: &BTreeMap<HalfInt, CMatrix>,
        coherences: &BTreeMap<(HalfInt, HalfInt), CMatrix>,
    ) -> Result<Self> {
        let space = SpinSpace::new(diagonal.keys().copied());
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for (&j, b) in diagonal {
            if b.nrows() != j.dim() || b.ncols() != j.dim() {
                return Err(Error::Dimension(format!("block j = {j} must be {0}x{0}", j.dim())));
            }
            let o = space.offset(j).unwrap();
            m.view_mut((o, o), (j.dim(), j.dim())).copy_from(b);
        }
        for (&(j1, j2), b) in coherences {
            let (Some(o1), Some(o2)) = (space.offset(j1), space.offset(j2)) else {
                return Err(Error::Dimension(format!(
                    "coherence block ({j1}, {j2}) refers to an irrep without a diagonal block"
                )));
            };
            if j1 == j2 || b.nrows() != j1.dim() || b.ncols() != j2.dim() {
                return Err(Error::Dimension(format!("coherence block ({j1}, {j2}) has wrong shape")));
            }
            m.view_mut((o1, o2), (j1.dim(), j2.dim())).copy_from(b);
            m.view_mut((o2, o1), (j2.dim(), j1.dim())).copy_from(&b.adjoint());
        }
        Self::new(space, m)
    }

    /// `|ψ⟩⟨ψ|`, keeping all coherences between irreps.
    pub fn from_ket(ket: &SpinKet) -> Self {
        let space = SpinSpace::new(ket.iter().map(|((j, _), _)| j));
        let v = ket.to_vector(&space);
        let matrix = &v * v.adjoint();
        BlockDensity { space, matrix }
    }

    /// Zero operator on `space`.
    pub fn zeros(space: SpinSpace) -> Self {
        let n = space.dim();
        BlockDensity { space, matrix: CMatrix::zeros(n, n) }
    }

    pub fn space(&self) -> &SpinSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Diagonal block of irrep `j`, if present.
    pub fn block(&self, j: HalfInt) -> Option<CMatrix> {
        let o = self.space.offset(j)?;
        Some(self.matrix.view((o, o), (j.dim(), j.dim())).into_owned())
    }

    /// Block `⟨j1, ·|ρ|j2, ·⟩`.
    pub fn coherence(&self, j1: HalfInt, j2: HalfInt) -> Option<CMatrix> {
        let o1 = self.space.offset(j1)?;
        let o2 = self.space.offset(j2)?;
        Some(self.matrix.view((o1, o2), (j1.dim(), j2.dim())).into_owned())
    }

    pub fn blocks(&self) -> impl Iterator<Item = (HalfInt, CMatrix)> + '_ {
        self.space.irreps().iter().map(|&j| (j, self.block(j).unwrap()))
    }

    /// Trace of each diagonal block.
    pub fn weights(&self) -> BTreeMap<HalfInt, f64> {
        self.blocks().map(|(j, b)| (j, b.diagonal().iter().map(|z| z.re).sum())).collect()
    }

    pub fn has_coherences(&self) -> bool {
        let irreps = self.space.irreps();
        irreps.iter().enumerate().any(|(k, &a)| {
            irreps[k + 1..].iter().any(|&b| {
                self.coherence(a, b).unwrap().iter().any(|z| z.norm() > TOL)
            })
        })
    }

    /// Drops coherences between irreps.
    pub fn block_diagonal(&self) -> Self {
        Self::from_blocks(self.blocks()).expect("diagonal blocks of a valid density")
    }

    /// Re-expresses the operator on `space`: irreps missing from `space` are
    /// cut away, irreps new to `space` get zero blocks.
    pub fn on_space(&self, space: &SpinSpace) -> Self {
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        let shared: Vec<HalfInt> =
            self.space.irreps().iter().copied().filter(|j| space.contains(*j)).collect();
        for &a in &shared {
            for &b in &shared {
                let src = self.coherence(a, b).unwrap();
                let (oa, ob) = (space.offset(a).unwrap(), space.offset(b).unwrap());
                m.view_mut((oa, ob), (a.dim(), b.dim())).copy_from(&src);
            }
        }
        BlockDensity { space: space.clone(), matrix: m }
    }

    /// Fails unless the trace is 1 within the global tolerance.
    pub fn require_normalized(&self) -> Result<()> {
        let t = self.trace();
        if (t - 1.0).abs() <= TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized(t))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BlockDensity { space: self.space.clone(), matrix: self.matrix.scale(factor) }
    }
}

/// Unit vector in three dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereVec([f64; 3]);

impl SphereVec {
    pub const NORTH: SphereVec = SphereVec([0.0, 0.0, 1.0]);
    pub const SOUTH: SphereVec = SphereVec([0.0, 0.0, -1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm3(&v);
        if (n - 1.0).abs() > TOL {
            return Err(Error::NotUnitVector(n));
        }
        Ok(SphereVec(v))
    }

    /// Normalizes a nonzero vector.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let n = norm3(&v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnitVector(n));
        }
        Ok(SphereVec(v.map(|x| x / n)))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &SphereVec) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean distance through the ball.
    pub fn chordal_distance(&self, other: &SphereVec) -> f64 {
        let d = [self.0[0] - other.0[0], self.0[1] - other.0[1], self.0[2] - other.0[2]];
        norm3(&d)
    }

    /// Great-circle angle in radians.
    pub fn angle(&self, other: &SphereVec) -> f64 {
        // chordal form is accurate for nearby points, unlike acos
        2.0 * (self.chordal_distance(other) / 2.0).min(1.0).asin()
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn space_indexing() {
        let s = SpinSpace::new([h(2), h(0), h(3)]);
        assert_eq!(s.irreps(), &[h(0), h(2), h(3)]);
        assert_eq!(s.dim(), 1 + 3 + 4);
        assert_eq!(s.index(h(2), h(2)), Some(1));
        assert_eq!(s.index(h(2), h(-2)), Some(3));
        assert_eq!(s.index(h(3), h(-3)), Some(7));
        assert_eq!(s.index(h(1), h(1)), None);
        assert_eq!(s.basis().count(), s.dim());
    }

    #[test]
    fn ket_rejects_bad_labels() {
        assert!(SpinKet::basis(h(2), h(1)).is_err());
        assert!(SpinKet::basis(h(1), h(3)).is_err());
        assert!(SpinKet::basis(h(3), h(-1)).is_ok());
    }

    #[test]
    fn ket_irreps_and_normalization() {
        let one = C64::new(1.0, 0.0);
        let k = SpinKet::from_terms([(h(0), h(0), one), (h(2), h(0), one)]).unwrap();
        assert_eq!(k.irreps(), vec![h(0), h(2)]);
        assert!(k.require_normalized().is_err());
        let n = k.normalized().unwrap();
        assert!(n.is_normalized());
        assert!(matches!(n.single_irrep(), Err(Error::MultipleIrreps(_))));
        assert!(SpinKet::new().normalized().is_err());
    }

    #[test]
    fn density_from_ket_keeps_coherences() {
        let a = C64::new(0.5f64.sqrt(), 0.0);
        let k = SpinKet::from_terms([(h(0), h(0), a), (h(2), h(0), a)]).unwrap();
        let rho = BlockDensity::from_ket(&k);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.has_coherences());
        let diag = rho.block_diagonal();
        assert!(!diag.has_coherences());
        assert!((diag.trace() - 1.0).abs() < 1e-12);
        let w = rho.weights();
        assert!((w[&h(2)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0), C64::new(2.0, 0.0),
            C64::new(2.0, 0.0), C64::new(1.0, 0.0),
        ]);
        assert!(matches!(BlockDensity::from_blocks([(h(1), bad)]), Err(Error::NotPsd(_))));
        let skew = CMatrix::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0), C64::new(0.0, 1.0),
            C64::new(0.0, 1.0), C64::new(1.0, 0.0),
        ]);
        assert!(matches!(BlockDensity::from_blocks([(h(1), skew)]), Err(Error::NotHermitian(_))));
        let wrong = CMatrix::identity(3, 3);
        assert!(BlockDensity::from_blocks([(h(1), wrong)]).is_err());
    }

    #[test]
    fn on_space_pads_and_cuts() {
        let rho = BlockDensity::from_ket(&SpinKet::basis(h(2), h(2)).unwrap());
        let wide = rho.on_space(&SpinSpace::up_to(h(2)));
        assert_eq!(wide.space().dim(), 1 + 2 + 3);
        assert!((wide.trace() - 1.0).abs() < 1e-12);
        let cut = rho.on_space(&SpinSpace::up_to(h(1)));
        assert_eq!(cut.trace(), 0.0);
    }

    #[test]
    fn sphere_vectors() {
        assert!(SphereVec::new([1.0, 1.0, 0.0]).is_err());
        let a = SphereVec::normalize([1.0, 1.0, 0.0]).unwrap();
        assert!((a.dot(&a) - 1.0).abs() < 1e-15);
        assert!((SphereVec::NORTH.angle(&SphereVec::SOUTH) - std::f64::consts::PI).abs() < 1e-12);
    }
}
