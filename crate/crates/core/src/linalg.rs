//! Dense complex matrix algebra: exponentials, Hermitian eigendecomposition,
//! and joint diagonalization of commuting normal families.
//!
//! Everything here targets small dimensions (d ≤ 16 on the system space,
//! d² ≤ 256 for superoperators), so the implementations favour robustness
//! over asymptotic speed: LU with partial pivoting, two-sided Jacobi for
//! Hermitian matrices, scaling-and-squaring Padé for non-normal exponentials.
//! All defects are reported in the Frobenius norm.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::QsdeError;
use crate::{Result, C64};

/// Dense complex square matrix, row-major entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    /// Wrap an `ndarray` matrix, checking squareness and finiteness.
    pub fn new(data: Array2<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(QsdeError::InvalidInput(format!(
                "matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QsdeError::InvalidInput(
                "matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { data })
    }

    /// Build from row-major complex entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QsdeError::InvalidInput(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        let data = Array2::from_shape_vec((dim, dim), entries.to_vec())
            .expect("shape checked above");
        Self::new(data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: Array2::eye(dim),
        }
    }

    /// 1×1 matrix holding a single scalar.
    pub fn scalar(z: C64) -> Self {
        Self::from_rows(1, &[z]).expect("1x1 is always valid")
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            data: Array2::from_shape_fn((dim, dim), |(i, j)| f(i, j)),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn raw(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[[i, j]] = z;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| self.data[[j, i]].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self {
            data: self.data.dot(&rhs.data),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            data: &self.data + &rhs.data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            data: &self.data - &rhs.data,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            data: self.data.mapv(|w| w * z),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// A + z·I.
    pub fn add_scalar(&self, z: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.data[[i, i]] += z;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[[i, i]]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum column sum of absolute values (matrix 1-norm).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim())
            .map(|j| (0..self.dim()).map(|i| self.data[[i, j]].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn unitary_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .sub(&Self::identity(self.dim()))
            .frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// ‖AA* − A*A‖_F ≤ tol·‖A‖²_F.
    pub fn is_normal(&self, rel_tol: f64) -> bool {
        let n2 = self.frobenius_norm().powi(2);
        let comm = self
            .matmul(&self.adjoint())
            .sub(&self.adjoint().matmul(self))
            .frobenius_norm();
        comm <= rel_tol * n2.max(1e-300)
    }

    /// Apply to a complex vector.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length mismatch");
        (0..d)
            .map(|i| (0..d).map(|j| self.data[[i, j]] * v[j]).sum())
            .collect()
    }

    /// Solve A X = B by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let d = self.dim();
        if rhs.dim() != d {
            return Err(QsdeError::InvalidInput("solve: dimension mismatch".into()));
        }
        let mut lu = self.data.clone();
        let mut x = rhs.data.clone();
        let mut perm: Vec<usize> = (0..d).collect();
        for k in 0..d {
            let (mut pivot_row, mut pivot_mag) = (k, lu[[k, k]].norm());
            for i in k + 1..d {
                let m = lu[[i, k]].norm();
                if m > pivot_mag {
                    pivot_row = i;
                    pivot_mag = m;
                }
            }
            if pivot_mag < 1e-280 {
                return Err(QsdeError::InvalidInput(
                    "solve: matrix is numerically singular".into(),
                ));
            }
            if pivot_row != k {
                for j in 0..d {
                    lu.swap([k, j], [pivot_row, j]);
                    x.swap([k, j], [pivot_row, j]);
                }
                perm.swap(k, pivot_row);
            }
            let piv = lu[[k, k]];
            for i in k + 1..d {
                let f = lu[[i, k]] / piv;
                lu[[i, k]] = f;
                for j in k + 1..d {
                    let upd = lu[[k, j]] * f;
                    lu[[i, j]] -= upd;
                }
                for j in 0..d {
                    let upd = x[[k, j]] * f;
                    x[[i, j]] -= upd;
                }
            }
        }
        // back substitution
        for j in 0..d {
            for i in (0..d).rev() {
                let mut s = x[[i, j]];
                for m in i + 1..d {
                    s -= lu[[i, m]] * x[[m, j]];
                }
                x[[i, j]] = s / lu[[i, i]];
            }
        }
        ComplexMatrix::new(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.dim()))
    }
}

/// Eigendecomposition of a Hermitian matrix by two-sided complex Jacobi.
///
/// Returns (eigenvalues ascending, unitary V with eigenvectors as columns).
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_hermitian(1e-8 * a.frobenius_norm().max(1.0)) {
        return Err(QsdeError::InvalidInput(
            "hermitian_eigen: input is not Hermitian".into(),
        ));
    }
    let d = a.dim();
    let mut m = a.data.clone();
    let mut v = Array2::<C64>::eye(d);
    let scale = a.frobenius_norm().max(1e-300);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in p + 1..d {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[[p, q]];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p, q of M and V are rotated; then rows of M.
                for i in 0..d {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = mip * c - miq * s * phase.conj();
                    m[[i, q]] = mip * s * phase + miq * c;
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * c - viq * s * phase.conj();
                    v[[i, q]] = vip * s * phase + viq * c;
                }
                for j in 0..d {
                    let mpj = m[[p, j]];
                    let mqj = m[[q, j]];
                    m[[p, j]] = mpj * c - mqj * s * phase;
                    m[[q, j]] = mpj * s * phase.conj() + mqj * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    let evals: Vec<f64> = (0..d).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let vs = ComplexMatrix::from_fn(d, |i, j| v[[i, order[j]]]);
    Ok((sorted_vals, vs))
}

/// One spectral sector of a commuting family: a projector and, per input
/// matrix, the eigenvalue it takes on the sector.
#[derive(Debug, Clone)]
pub struct Sector {
    pub projector: ComplexMatrix,
    pub values: Vec<C64>,
}

/// Joint spectral resolution of a commuting normal family.
#[derive(Debug, Clone)]
pub struct SpectralSectors {
    pub sectors: Vec<Sector>,
}

impl SpectralSectors {
    /// Σ aᵢ Pᵢ for input index `which`.
    pub fn reconstruct(&self, which: usize) -> ComplexMatrix {
        let d = self.sectors[0].projector.dim();
        let mut out = ComplexMatrix::zeros(d);
        for s in &self.sectors {
            out = out.add(&s.projector.scale(s.values[which]));
        }
        out
    }
}

const COMMUTATOR_REL_TOL: f64 = 1e-8;

fn rel_commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let denom = (a.frobenius_norm() * b.frobenius_norm()).max(1e-300);
    a.matmul(b).sub(&b.matmul(a)).frobenius_norm() / denom
}

/// Simultaneously diagonalize a family of pairwise-commuting normal matrices.
///
/// Strategy: diagonalize a random real combination of the Hermitian and
/// skew-Hermitian parts (all of which commute for a commuting normal family),
/// then split by eigenvalue clusters and refine any block on which some input
/// fails to act as a scalar.
pub fn joint_diagonalize(family: &[ComplexMatrix]) -> Result<SpectralSectors> {
    if family.is_empty() {
        return Err(QsdeError::InvalidInput("joint_diagonalize: empty family".into()));
    }
    let d = family[0].dim();
    for (i, a) in family.iter().enumerate() {
        if a.dim() != d {
            return Err(QsdeError::InvalidInput(
                "joint_diagonalize: dimension mismatch in family".into(),
            ));
        }
        if !a.is_normal(COMMUTATOR_REL_TOL) {
            return Err(QsdeError::InvalidInput(format!(
                "joint_diagonalize: matrix {i} is not normal"
            )));
        }
    }
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let n = rel_commutator_norm(&family[i], &family[j]);
            if n > worst.2 {
                worst = (i, j, n);
            }
        }
    }
    if worst.2 > COMMUTATOR_REL_TOL {
        return Err(QsdeError::NotCommuting {
            i: worst.0,
            j: worst.1,
            norm: worst.2,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1_ab1e);
    let restricted: Vec<Array2<C64>> = family.iter().map(|m| m.data.clone()).collect();
    let basis = Array2::<C64>::eye(d);
    let mut blocks: Vec<Array2<C64>> = Vec::new();
    split_blocks(&restricted, &basis, &mut rng, 0, &mut blocks)?;

    let mut sectors = Vec::new();
    for cols in blocks {
        let k = cols.ncols();
        let mut values = Vec::with_capacity(family.len());
        for a in family {
            let m = cols.t().mapv(|z| z.conj()).dot(&a.data).dot(&cols);
            let mu = (0..k).map(|i| m[[i, i]]).sum::<C64>() / (k as f64);
            values.push(mu);
        }
        let proj = ComplexMatrix::new(cols.dot(&cols.t().mapv(|z| z.conj())))?;
        sectors.push(Sector {
            projector: proj,
            values,
        });
    }
    let out = SpectralSectors { sectors };

    // invariants: projectors resolve the identity, inputs act as scalars
    let mut sum = ComplexMatrix::zeros(d);
    for s in &out.sectors {
        sum = sum.add(&s.projector);
    }
    if sum.sub(&ComplexMatrix::identity(d)).frobenius_norm() > 1e-10 * (d as f64).sqrt().max(1.0) {
        return Err(QsdeError::InvalidInput(
            "joint_diagonalize: projectors do not resolve the identity".into(),
        ));
    }
    for (i, a) in family.iter().enumerate() {
        let na = a.frobenius_norm().max(1e-300);
        for s in &out.sectors {
            let lhs = a.matmul(&s.projector);
            let rhs = s.projector.scale(s.values[i]);
            if lhs.sub(&rhs).frobenius_norm() > 1e-8 * na {
                return Err(QsdeError::InvalidInput(
                    "joint_diagonalize: refinement failed to scalarize a sector".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// Recursively split `basis` (d×k orthonormal columns) into joint eigenblocks
/// of the restricted family.
fn split_blocks(
    restricted: &[Array2<C64>],
    basis: &Array2<C64>,
    rng: &mut ChaCha8Rng,
    depth: usize,
    out: &mut Vec<Array2<C64>>,
) -> Result<()> {
    let k = basis.ncols();
    if k == 1 {
        out.push(basis.clone());
        return Ok(());
    }
    if depth > 64 {
        return Err(QsdeError::InvalidInput(
            "joint_diagonalize: refinement recursion exceeded depth limit".into(),
        ));
    }
    // restrict family to the block
    let bdag = basis.t().mapv(|z| z.conj());
    let fam_k: Vec<Array2<C64>> = restricted.iter().map(|a| bdag.dot(a).dot(basis)).collect();

    // scalar on this block already?
    let all_scalar = fam_k.iter().all(|m| {
        let mu = (0..k).map(|i| m[[i, i]]).sum::<C64>() / (k as f64);
        let mut dev = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { mu } else { C64::new(0.0, 0.0) };
                dev += (m[[i, j]] - target).norm_sqr();
            }
        }
        dev.sqrt() <= 1e-10 * m_norm(m).max(1.0)
    });
    if all_scalar {
        out.push(basis.clone());
        return Ok(());
    }

    // random Hermitian combination of Hermitian/skew parts
    let mut combo = Array2::<C64>::zeros((k, k));
    for m in &fam_k {
        let mdag = m.t().mapv(|z| z.conj());
        let herm = (m + &mdag).mapv(|z| z * 0.5);
        let skew = (m - &mdag).mapv(|z| z * C64::new(0.0, -0.5));
        for part in [herm, skew] {
            let n = m_norm(&part);
            if n > 1e-14 {
                let c: f64 = rng.random_range(0.25..1.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
                combo = &combo + &part.mapv(|z| z * (c / n));
            }
        }
    }
    let (vals, vecs) = hermitian_eigen(&ComplexMatrix::new(combo)?)?;
    // cluster eigenvalues
    let span = (vals[k - 1] - vals[0]).abs().max(1.0);
    let gap_tol = 1e-7 * span;
    let mut cluster_start = 0usize;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for i in 1..k {
        if vals[i] - vals[i - 1] > gap_tol {
            clusters.push((cluster_start, i));
            cluster_start = i;
        }
    }
    clusters.push((cluster_start, k));

    if clusters.len() == 1 {
        // combo failed to split a non-scalar block; retry at next depth with
        // fresh random coefficients
        return split_blocks(restricted, basis, rng, depth + 1, out);
    }

    for (lo, hi) in clusters {
        let sub = vecs.raw().slice(ndarray::s![.., lo..hi]).to_owned();
        let new_basis = basis.dot(&sub);
        split_blocks(restricted, &new_basis, rng, depth + 1, out)?;
    }
    Ok(())
}

fn m_norm(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian and unitary defects of a matrix, both in the Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectNorms {
    pub hermitian_defect: f64,
    pub unitary_defect: f64,
}

pub fn defect_norms(a: &ComplexMatrix) -> DefectNorms {
    DefectNorms {
        hermitian_defect: a.hermitian_defect(),
        unitary_defect: a.unitary_defect(),
    }
}

/// Matrix exponential.
///
/// Normal matrices go through the joint spectral resolution of their
/// Hermitian/skew parts; everything else through scaling-and-squaring with a
/// [13/13] Padé approximant.
pub fn mat_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = a.dim();
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QsdeError::InvalidInput("mat_exp: non-finite entries".into()));
    }
    if a.is_normal(1e-10) {
        let sectors = joint_diagonalize(std::slice::from_ref(a))?;
        let mut out = ComplexMatrix::zeros(d);
        for s in sectors.sectors {
            out = out.add(&s.projector.scale(s.values[0].exp()));
        }
        return Ok(out);
    }
    pade_exp(a)
}

fn pade_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    const THETA13: f64 = 5.371_920_351_148_152;
    let norm = a.one_norm();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(2f64.powi(-s), 0.0));
    let b: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let d = a.dim();
    let ident = ComplexMatrix::identity(d);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let r = |x: f64| C64::new(x, 0.0);
    let u_inner = a6
        .scale(r(b[13]))
        .add(&a4.scale(r(b[11])))
        .add(&a2.scale(r(b[9])));
    let u = scaled.matmul(
        &a6.matmul(&u_inner)
            .add(&a6.scale(r(b[7])))
            .add(&a4.scale(r(b[5])))
            .add(&a2.scale(r(b[3])))
            .add(&ident.scale(r(b[1]))),
    );
    let v_inner = a6
        .scale(r(b[12]))
        .add(&a4.scale(r(b[10])))
        .add(&a2.scale(r(b[8])));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(r(b[6])))
        .add(&a4.scale(r(b[4])))
        .add(&a2.scale(r(b[2])))
        .add(&ident.scale(r(b[0])));
    let mut x = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        x = x.matmul(&x);
    }
    Ok(x)
}

/// Deterministic pseudo-random matrices for tests and seeded scenarios.
pub mod sample {
    use super::*;

    pub fn complex_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    pub fn hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let b = complex_matrix(rng, dim);
        b.add(&b.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn skew_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let b = complex_matrix(rng, dim);
        b.sub(&b.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        mat_exp(&skew_hermitian(rng, dim)).expect("exp of skew-Hermitian")
    }

    /// A commuting triple (H, K, R): H, K Hermitian, R normal, all sharing a
    /// random eigenbasis.
    pub fn commuting_hkr(
        rng: &mut ChaCha8Rng,
        dim: usize,
    ) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let u = unitary(rng, dim);
        let udag = u.adjoint();
        let mut diag = |herm: bool| {
            let d = ComplexMatrix::from_fn(dim, |i, j| {
                if i == j {
                    C64::new(
                        rng.random_range(-2.0..2.0),
                        if herm { 0.0 } else { rng.random_range(-2.0..2.0) },
                    )
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            u.matmul(&d).matmul(&udag)
        };
        let h = diag(true);
        let k = diag(true);
        let r = diag(false);
        (h, k, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn mat_exp_zero_is_identity() {
        let e = mat_exp(&ComplexMatrix::zeros(3)).unwrap();
        assert!(e.sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn mat_exp_diagonal_scalar_case() {
        let a = ComplexMatrix::from_rows(
            2,
            &[
                c(0.0, std::f64::consts::PI),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        )
        .unwrap();
        let e = mat_exp(&a).unwrap();
        assert_abs_diff_eq!(e.get(0, 0).re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.get(0, 0).im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.get(1, 1).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mat_exp_skew_hermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample::skew_hermitian(&mut rng, 4);
        let u = mat_exp(&s).unwrap();
        assert!(u.unitary_defect() < 1e-10, "defect {}", u.unitary_defect());
    }

    #[test]
    fn mat_exp_inverse_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = sample::complex_matrix(&mut rng, 4).scale(c(2.0, 0.0));
            let e = mat_exp(&a).unwrap();
            let em = mat_exp(&a.neg()).unwrap();
            let resid = e.matmul(&em).sub(&ComplexMatrix::identity(4)).frobenius_norm();
            assert!(resid < 1e-9, "exp(A)exp(-A) residual {resid}");
        }
    }

    #[test]
    fn mat_exp_nonnormal_matches_series() {
        // nilpotent upper-triangular: exp is the finite Taylor sum
        let a = ComplexMatrix::from_rows(
            3,
            &[
                c(0.0, 0.0), c(1.0, 0.5), c(0.3, -0.2),
                c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            ],
        )
        .unwrap();
        let expected = ComplexMatrix::identity(3)
            .add(&a)
            .add(&a.matmul(&a).scale(c(0.5, 0.0)));
        let e = mat_exp(&a).unwrap();
        assert!(e.sub(&expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_recovers_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample::hermitian(&mut rng, 5);
        let (vals, v) = hermitian_eigen(&a).unwrap();
        assert!(v.unitary_defect() < 1e-12);
        let lam = ComplexMatrix::from_fn(5, |i, j| {
            if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) }
        });
        let resid = v.matmul(&lam).matmul(&v.adjoint()).sub(&a).frobenius_norm();
        assert!(resid < 1e-12 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn joint_diag_already_diagonal() {
        let a = ComplexMatrix::from_rows(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        let secs = joint_diagonalize(&[a.clone()]).unwrap();
        assert_eq!(secs.sectors.len(), 2);
        let mut vals: Vec<f64> = secs.sectors.iter().map(|s| s.values[0].re).collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        for s in &secs.sectors {
            assert!(s.projector.hermitian_defect() < 1e-12);
            let idemp = s.projector.matmul(&s.projector).sub(&s.projector).frobenius_norm();
            assert!(idemp < 1e-12);
        }
    }

    #[test]
    fn joint_diag_simultaneous_pair() {
        let sz = ComplexMatrix::from_rows(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        let d12 = ComplexMatrix::from_rows(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(2., 0.)]).unwrap();
        let secs = joint_diagonalize(&[sz, d12]).unwrap();
        assert_eq!(secs.sectors.len(), 2);
        let mut pairs: Vec<(f64, f64)> = secs
            .sectors
            .iter()
            .map(|s| (s.values[0].re, s.values[1].re))
            .collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        assert_abs_diff_eq!(pairs[0].0, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pairs[0].1, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pairs[1].0, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pairs[1].1, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn joint_diag_rejects_noncommuting() {
        let sx = ComplexMatrix::from_rows(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sz = ComplexMatrix::from_rows(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        match joint_diagonalize(&[sx, sz]) {
            Err(QsdeError::NotCommuting { norm, .. }) => assert!(norm > 0.1),
            other => panic!("expected NotCommuting, got {other:?}"),
        }
    }

    #[test]
    fn joint_diag_reconstructs_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (h, k, r) = sample::commuting_hkr(&mut rng, 4);
        let fam = [h.clone(), k.clone(), r.clone()];
        let secs = joint_diagonalize(&fam).unwrap();
        for (i, a) in fam.iter().enumerate() {
            let resid = secs.reconstruct(i).sub(a).frobenius_norm();
            assert!(
                resid <= 1e-8 * a.frobenius_norm().max(1.0),
                "input {i} residual {resid}"
            );
        }
        // eigenvalues of Hermitian inputs are real
        for s in &secs.sectors {
            assert!(s.values[0].im.abs() < 1e-10);
            assert!(s.values[1].im.abs() < 1e-10);
        }
    }

    #[test]
    fn defects_identity_and_scalar() {
        let d = defect_norms(&ComplexMatrix::identity(3));
        assert_abs_diff_eq!(d.hermitian_defect, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.unitary_defect, 0.0, epsilon = 1e-15);

        let m = ComplexMatrix::scalar(c(0.0, 1.0));
        let d = defect_norms(&m);
        assert_abs_diff_eq!(d.hermitian_defect, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.unitary_defect, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn defects_random_hermitian_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = sample::hermitian(&mut rng, 6);
        assert!(defect_norms(&h).hermitian_defect <= 1e-14);
    }

    #[test]
    fn frobenius_norm_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = sample::complex_matrix(&mut rng, 4);
            let b = sample::complex_matrix(&mut rng, 4);
            assert!(
                a.matmul(&b).frobenius_norm()
                    <= a.frobenius_norm() * b.frobenius_norm() + 1e-12
            );
        }
    }

    #[test]
    fn lu_solve_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = sample::complex_matrix(&mut rng, 5).add_scalar(c(3.0, 0.0));
        let inv = a.inverse().unwrap();
        let resid = a.matmul(&inv).sub(&ComplexMatrix::identity(5)).frobenius_norm();
        assert!(resid < 1e-11, "inverse residual {resid}");
    }

    #[test]
    fn rejects_nonfinite() {
        let r = ComplexMatrix::from_rows(1, &[c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(QsdeError::InvalidInput(_))));
    }
}
