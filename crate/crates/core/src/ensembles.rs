//! Random measurement-matrix ensembles and their spectral factors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVectorView, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{OampError, Result};
use crate::model::LinearOperator;
use crate::transforms::{Dct, FastTransform};

/// Orthogonal factor of a partial orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoKind {
    Haar,
    Dct,
    Hadamard,
}

/// How the geometric singular values are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularNormalization {
    /// `sum_i lambda_i = N`.
    #[default]
    SumSingular,
    /// `sum_i lambda_i^2 = N`.
    SumSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    /// IID `N(0, 1/M)` entries.
    IidGaussian,
    /// `A = V diag(lambda) U^T` with Haar `U`, `V` and consecutive singular
    /// values in ratio `kappa^(1/M)`.
    Geometric {
        kappa: f64,
        #[serde(default)]
        normalization: SingularNormalization,
    },
    /// `A = sqrt(N/M) S U^T`, `S` a uniformly random row selector.
    PartialOrthogonal { ortho: OrthoKind },
}

/// Label stored with a matrix; also the kind byte of the binary format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Dense = 0,
    IidGaussian = 1,
    Geometric = 2,
    PartialHaar = 3,
    PartialDct = 4,
    PartialHadamard = 5,
}

impl MatrixKind {
    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0 => MatrixKind::Dense,
            1 => MatrixKind::IidGaussian,
            2 => MatrixKind::Geometric,
            3 => MatrixKind::PartialHaar,
            4 => MatrixKind::PartialDct,
            5 => MatrixKind::PartialHadamard,
            _ => return Err(OampError::Io(format!("unknown matrix kind byte {b}"))),
        })
    }

    pub fn is_partial_orthogonal(self) -> bool {
        matches!(self, MatrixKind::PartialHaar | MatrixKind::PartialDct | MatrixKind::PartialHadamard)
    }
}

/// Left singular vectors of `A` (eigenvectors of `A A^T`).
#[derive(Debug, Clone)]
pub enum LeftVectors {
    Identity(usize),
    Dense(DMatrix<f64>),
}

impl LeftVectors {
    /// `V^T y`.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        match self {
            LeftVectors::Identity(_) => y.to_vec(),
            LeftVectors::Dense(v) => v.tr_mul(&DVectorView::from_slice(y, y.len())).data.into(),
        }
    }

    /// `V c`.
    pub fn expand(&self, c: &[f64]) -> Vec<f64> {
        match self {
            LeftVectors::Identity(_) => c.to_vec(),
            LeftVectors::Dense(v) => (v * DVectorView::from_slice(c, c.len())).data.into(),
        }
    }
}

/// `A = V diag(singulars) U^T`, singular values sorted descending.
///
/// `singulars` has length `M`; entries beyond `min(M, N)` are zero.
#[derive(Debug, Clone)]
pub struct Factors {
    pub left: LeftVectors,
    pub singulars: Vec<f64>,
    /// Right singular vectors as an `N x N` orthogonal matrix, when known.
    pub right: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
enum Operator {
    Dense(DMatrix<f64>),
    Subsampled { transform: FastTransform, rows: Vec<usize>, scale: f64 },
}

/// A sampled `M x N` matrix with lazily computed spectral data.
#[derive(Debug)]
pub struct MatrixModel {
    m: usize,
    n: usize,
    kind: MatrixKind,
    op: Operator,
    frob2: f64,
    known: Option<Factors>,
    factors: OnceLock<Factors>,
    spectrum: OnceLock<Vec<f64>>,
}

impl Clone for MatrixModel {
    fn clone(&self) -> Self {
        let factors = OnceLock::new();
        if let Some(f) = self.factors.get() {
            let _ = factors.set(f.clone());
        }
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            m: self.m,
            n: self.n,
            kind: self.kind,
            op: self.op.clone(),
            frob2: self.frob2,
            known: self.known.clone(),
            factors,
            spectrum,
        }
    }
}

impl MatrixModel {
    /// Wrap an explicit matrix; spectral data is computed on demand.
    pub fn from_dense(a: DMatrix<f64>) -> Result<Self> {
        Self::from_dense_with_kind(a, MatrixKind::Dense)
    }

    fn from_dense_with_kind(a: DMatrix<f64>, kind: MatrixKind) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(OampError::InvalidParameter("matrix dimensions must be >= 1".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(OampError::InvalidParameter("matrix has non-finite entries".into()));
        }
        let (m, n) = a.shape();
        let frob2 = a.norm_squared();
        Ok(Self {
            m,
            n,
            kind,
            op: Operator::Dense(a),
            frob2,
            known: None,
            factors: OnceLock::new(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Row indices of a partial orthogonal matrix built from a fast transform.
    pub fn selected_rows(&self) -> Option<&[usize]> {
        match &self.op {
            Operator::Subsampled { rows, .. } => Some(rows),
            Operator::Dense(_) => None,
        }
    }

    /// `A` as an explicit matrix. Fast-transform operators are expanded.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.op {
            Operator::Dense(a) => a.clone(),
            Operator::Subsampled { transform, rows, scale } => {
                let n = self.n;
                let mut a = DMatrix::zeros(self.m, n);
                for (k, &r) in rows.iter().enumerate() {
                    for j in 0..n {
                        a[(k, j)] = scale * transform_entry(transform, r, j);
                    }
                }
                a
            }
        }
    }

    /// `A A^T` as an explicit `M x M` matrix.
    pub fn gram_rows(&self) -> DMatrix<f64> {
        let a = self.dense_ref();
        match a {
            std::borrow::Cow::Borrowed(a) => a * a.transpose(),
            std::borrow::Cow::Owned(a) => &a * a.transpose(),
        }
    }

    fn dense_ref(&self) -> std::borrow::Cow<'_, DMatrix<f64>> {
        match &self.op {
            Operator::Dense(a) => std::borrow::Cow::Borrowed(a),
            Operator::Subsampled { .. } => std::borrow::Cow::Owned(self.to_dense()),
        }
    }

    /// SVD factors, from the construction when known, else from an
    /// eigendecomposition of `A A^T`.
    pub fn factors(&self) -> &Factors {
        if let Some(f) = &self.known {
            return f;
        }
        self.factors.get_or_init(|| {
            let eig = SymmetricEigen::new(self.gram_rows());
            let mut order: Vec<usize> = (0..self.m).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let rank = self.m.min(self.n);
            let singulars = order
                .iter()
                .enumerate()
                .map(|(pos, &i)| if pos < rank { eig.eigenvalues[i].max(0.0).sqrt() } else { 0.0 })
                .collect();
            let v = DMatrix::from_fn(self.m, self.m, |r, c| eig.eigenvectors[(r, order[c])]);
            Factors { left: LeftVectors::Dense(v), singulars, right: None }
        })
    }

    /// Eigenvalues of `A^T A` (length `N`) sorted descending.
    pub fn spectrum(&self) -> &[f64] {
        self.spectrum.get_or_init(|| {
            let singulars: Option<&[f64]> = match (&self.known, self.factors.get()) {
                (Some(f), _) | (None, Some(f)) => Some(&f.singulars),
                _ => None,
            };
            let rank = self.m.min(self.n);
            let mut out: Vec<f64> = match singulars {
                Some(s) => s[..rank].iter().map(|v| v * v).collect(),
                None => {
                    let small = if self.m <= self.n {
                        self.gram_rows()
                    } else {
                        let a = self.dense_ref();
                        a.tr_mul(&a)
                    };
                    small.symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect()
                }
            };
            out.sort_by(|a, b| b.total_cmp(a));
            out.truncate(rank);
            out.resize(self.n, 0.0);
            out
        })
    }

    /// Whether spectral factors are available without an eigendecomposition.
    pub fn has_known_factors(&self) -> bool {
        self.known.is_some()
    }
}

fn transform_entry(t: &FastTransform, r: usize, j: usize) -> f64 {
    match t {
        FastTransform::Dct(d) => {
            let n = d.len() as f64;
            let a = if r == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            a * (std::f64::consts::PI * (2 * j + 1) as f64 * r as f64 / (2.0 * n)).cos()
        }
        FastTransform::Hadamard(n) => {
            let sign = if (r & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            sign / (*n as f64).sqrt()
        }
    }
}

impl LinearOperator for MatrixModel {
    fn rows(&self) -> usize {
        self.m
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        match &self.op {
            Operator::Dense(a) => a.apply(x),
            Operator::Subsampled { transform, rows, scale } => {
                let t = transform.forward(x);
                rows.iter().map(|&r| scale * t[r]).collect()
            }
        }
    }
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.m);
        match &self.op {
            Operator::Dense(a) => a.apply_transpose(y),
            Operator::Subsampled { transform, rows, scale } => {
                let mut full = vec![0.0; self.n];
                for (&r, &v) in rows.iter().zip(y) {
                    full[r] = scale * v;
                }
                transform.inverse(&full)
            }
        }
    }
    fn frobenius_sq(&self) -> f64 {
        self.frob2
    }
}

/// Haar-distributed `n x n` orthogonal matrix: QR of a Gaussian matrix with
/// the signs of `diag(R)` folded into `Q`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Singular values of the geometric ensemble, descending.
pub fn geometric_singulars(kappa: f64, m: usize, n: usize, norm: SingularNormalization) -> Result<Vec<f64>> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(OampError::InvalidParameter(format!("condition number must be >= 1, got {kappa}")));
    }
    let rank = m.min(n);
    let step = kappa.powf(-1.0 / m as f64);
    let raw: Vec<f64> = (0..rank).map(|i| step.powi(i as i32)).collect();
    let scale = match norm {
        SingularNormalization::SumSingular => n as f64 / raw.iter().sum::<f64>(),
        SingularNormalization::SumSquared => (n as f64 / raw.iter().map(|v| v * v).sum::<f64>()).sqrt(),
    };
    Ok(raw.into_iter().map(|v| v * scale).collect())
}

/// Draw one `M x N` matrix from `spec`.
pub fn sample_matrix<R: Rng + ?Sized>(spec: &EnsembleSpec, m: usize, n: usize, rng: &mut R) -> Result<MatrixModel> {
    if m == 0 || n == 0 {
        return Err(OampError::InvalidParameter(format!("matrix dimensions must be >= 1, got {m}x{n}")));
    }
    match *spec {
        EnsembleSpec::IidGaussian => {
            let sd = (m as f64).sqrt().recip();
            let a = DMatrix::from_fn(m, n, |_, _| {
                let g: f64 = StandardNormal.sample(rng);
                g * sd
            });
            MatrixModel::from_dense_with_kind(a, MatrixKind::IidGaussian)
        }
        EnsembleSpec::Geometric { kappa, normalization } => {
            let lambda = geometric_singulars(kappa, m, n, normalization)?;
            let v = haar_orthogonal(m, rng);
            let u = haar_orthogonal(n, rng);
            let rank = lambda.len();
            let mut vl = v.columns(0, rank).clone_owned();
            for (j, l) in lambda.iter().enumerate() {
                vl.column_mut(j).scale_mut(*l);
            }
            let a = vl * u.columns(0, rank).transpose();
            let mut model = MatrixModel::from_dense_with_kind(a, MatrixKind::Geometric)?;
            let mut singulars = lambda;
            singulars.resize(m, 0.0);
            model.known = Some(Factors { left: LeftVectors::Dense(v), singulars, right: Some(u) });
            Ok(model)
        }
        EnsembleSpec::PartialOrthogonal { ortho } => {
            if m > n {
                return Err(OampError::InvalidParameter(format!(
                    "partial orthogonal matrix needs M <= N, got {m}x{n}"
                )));
            }
            if ortho == OrthoKind::Hadamard && !n.is_power_of_two() {
                return Err(OampError::InvalidParameter(format!("Hadamard ensemble needs N a power of two, got {n}")));
            }
            let scale = (n as f64 / m as f64).sqrt();
            let (op, right, kind) = match ortho {
                OrthoKind::Haar => {
                    let u = haar_orthogonal(n, rng);
                    let rows = select_rows(n, m, rng);
                    let a = DMatrix::from_fn(m, n, |k, j| scale * u[(j, rows[k])]);
                    (Operator::Dense(a), Some(u), MatrixKind::PartialHaar)
                }
                OrthoKind::Dct => {
                    let rows = select_rows(n, m, rng);
                    let t = FastTransform::Dct(Dct::new(n)?);
                    (Operator::Subsampled { transform: t, rows, scale }, None, MatrixKind::PartialDct)
                }
                OrthoKind::Hadamard => {
                    let rows = select_rows(n, m, rng);
                    let t = FastTransform::Hadamard(n);
                    (Operator::Subsampled { transform: t, rows, scale }, None, MatrixKind::PartialHadamard)
                }
            };
            Ok(MatrixModel {
                m,
                n,
                kind,
                op,
                // tr(A^T A) = (N/M) * M
                frob2: n as f64,
                known: Some(Factors { left: LeftVectors::Identity(m), singulars: vec![scale; m], right }),
                factors: OnceLock::new(),
                spectrum: OnceLock::new(),
            })
        }
    }
}

fn select_rows<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut rows = rand::seq::index::sample(rng, n, m).into_vec();
    rows.sort_unstable();
    rows
}

const MAGIC: &[u8; 8] = b"OAMPMTX\0";

/// Write `A` as a 32-byte header (magic, `M` and `N` as u64 LE, kind byte,
/// 7 pad bytes) followed by row-major f64 LE entries.
pub fn export_matrix(model: &MatrixModel, path: &Path) -> Result<()> {
    let a = model.dense_ref();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(model.m as u64).to_le_bytes())?;
    w.write_all(&(model.n as u64).to_le_bytes())?;
    w.write_all(&[model.kind as u8, 0, 0, 0, 0, 0, 0, 0])?;
    for i in 0..model.m {
        for j in 0..model.n {
            w.write_all(&a[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a matrix written by [`export_matrix`]. The result is a dense model
/// carrying the stored kind label; spectral factors are recomputed on demand.
pub fn import_matrix(path: &Path) -> Result<MatrixModel> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 32];
    r.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(OampError::Io("bad matrix file magic".into()));
    }
    let m = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    let kind = MatrixKind::from_byte(header[24])?;
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let expected = m.checked_mul(n).and_then(|k| k.checked_mul(8));
    if expected != Some(data.len()) {
        return Err(OampError::Io(format!("matrix file holds {} bytes, header says {m}x{n}", data.len())));
    }
    let vals: Vec<f64> = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    MatrixModel::from_dense_with_kind(DMatrix::from_row_slice(m, n, &vals), kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stage};
    use nalgebra::DVector;

    fn orth_err(q: &DMatrix<f64>) -> f64 {
        let n = q.ncols();
        (q.transpose() * q - DMatrix::identity(n, n)).amax()
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = stream(1, 0, Stage::Matrix);
        for n in [1, 2, 7, 40] {
            let q = haar_orthogonal(n, &mut rng);
            assert!(orth_err(&q) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn haar_first_entry_is_symmetric() {
        // Q[0,0] of a Haar 3x3 matrix is symmetric about 0 with E{Q^2} = 1/3.
        let mut rng = stream(2, 0, Stage::Matrix);
        let reps = 20_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..reps {
            let q = haar_orthogonal(3, &mut rng);
            s += q[(0, 0)];
            s2 += q[(0, 0)].powi(2);
        }
        assert!((s / reps as f64).abs() < 0.02);
        assert!((s2 / reps as f64 - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn geometric_values() {
        let l = geometric_singulars(5.0, 4, 8, SingularNormalization::SumSingular).unwrap();
        let step: f64 = 5f64.powf(0.25);
        for i in 0..3 {
            assert!((l[i] / l[i + 1] - step).abs() < 1e-12);
        }
        assert!((l.iter().sum::<f64>() - 8.0).abs() < 1e-12);
        let flat = geometric_singulars(1.0, 4, 8, SingularNormalization::SumSingular).unwrap();
        assert!(flat.iter().all(|v| (v - 2.0).abs() < 1e-14));
        let sq = geometric_singulars(3.0, 5, 9, SingularNormalization::SumSquared).unwrap();
        assert!((sq.iter().map(|v| v * v).sum::<f64>() - 9.0).abs() < 1e-12);
        assert!(geometric_singulars(0.5, 4, 8, SingularNormalization::SumSingular).is_err());
    }

    #[test]
    fn geometric_matrix_has_prescribed_spectrum() {
        let mut rng = stream(3, 0, Stage::Matrix);
        let spec = EnsembleSpec::Geometric { kappa: 10.0, normalization: SingularNormalization::SumSingular };
        let model = sample_matrix(&spec, 12, 20, &mut rng).unwrap();
        let want = geometric_singulars(10.0, 12, 20, SingularNormalization::SumSingular).unwrap();
        let a = model.to_dense();
        let sv = a.singular_values();
        let mut got: Vec<f64> = sv.iter().copied().collect();
        got.sort_by(|a, b| b.total_cmp(a));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
        let spec_n = model.spectrum();
        assert_eq!(spec_n.len(), 20);
        assert!(spec_n[12..].iter().all(|&v| v == 0.0));
        assert!((spec_n.iter().sum::<f64>() - model.frobenius_sq()).abs() < 1e-9);
    }

    #[test]
    fn partial_orthogonal_rows_are_orthogonal() {
        for (k, ortho) in [OrthoKind::Haar, OrthoKind::Dct, OrthoKind::Hadamard].into_iter().enumerate() {
            let mut rng = stream(4, k as u64, Stage::Matrix);
            let model = sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho }, 11, 32, &mut rng).unwrap();
            let g = model.gram_rows();
            let target = DMatrix::<f64>::identity(11, 11) * (32.0 / 11.0);
            assert!((g - target).amax() < 1e-12, "{ortho:?}");
            assert!((model.frobenius_sq() - model.to_dense().norm_squared()).abs() < 1e-9);
        }
    }

    #[test]
    fn fast_operator_matches_dense() {
        for (k, ortho) in [OrthoKind::Dct, OrthoKind::Hadamard].into_iter().enumerate() {
            let mut rng = stream(5, k as u64, Stage::Matrix);
            let model = sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho }, 9, 16, &mut rng).unwrap();
            let a = model.to_dense();
            let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).cos()).collect();
            let y: Vec<f64> = (0..9).map(|i| (i as f64 * 1.1).sin()).collect();
            for (u, v) in model.apply(&x).iter().zip(a.apply(&x)) {
                assert!((u - v).abs() < 1e-12);
            }
            for (u, v) in model.apply_transpose(&y).iter().zip(a.apply_transpose(&y)) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_dct_is_orthogonal() {
        let mut rng = stream(6, 0, Stage::Matrix);
        let model =
            sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho: OrthoKind::Dct }, 16, 16, &mut rng).unwrap();
        let a = model.to_dense();
        assert!(orth_err(&a) < 1e-12);
    }

    #[test]
    fn factors_reconstruct_matrix() {
        let mut rng = stream(7, 0, Stage::Matrix);
        let model = sample_matrix(&EnsembleSpec::IidGaussian, 6, 10, &mut rng).unwrap();
        let f = model.factors();
        let LeftVectors::Dense(v) = &f.left else { panic!() };
        // A A^T = V diag(s^2) V^T
        let d = DMatrix::from_diagonal(&DVector::from_iterator(6, f.singulars.iter().map(|s| s * s)));
        let rebuilt = v * d * v.transpose();
        assert!((rebuilt - model.gram_rows()).amax() < 1e-10);
        assert!(f.singulars.windows(2).all(|w| w[0] >= w[1]));
        let spec = model.spectrum();
        for (i, s) in f.singulars.iter().enumerate() {
            assert!((spec[i] - s * s).abs() < 1e-10);
        }
    }

    #[test]
    fn tall_matrix_spectrum() {
        let mut rng = stream(8, 0, Stage::Matrix);
        let model = sample_matrix(&EnsembleSpec::IidGaussian, 10, 4, &mut rng).unwrap();
        let s = model.spectrum();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|&v| v > 0.0));
        let f = model.factors();
        assert_eq!(f.singulars.len(), 10);
        assert!(f.singulars[4..].iter().all(|&v| v == 0.0));
        for (sv, l2) in f.singulars.iter().zip(s) {
            assert!((sv.powi(2) - l2).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_shapes() {
        let mut rng = stream(9, 0, Stage::Matrix);
        let po = |o| EnsembleSpec::PartialOrthogonal { ortho: o };
        assert!(sample_matrix(&EnsembleSpec::IidGaussian, 0, 4, &mut rng).is_err());
        assert!(sample_matrix(&po(OrthoKind::Dct), 8, 4, &mut rng).is_err());
        assert!(sample_matrix(&po(OrthoKind::Hadamard), 4, 12, &mut rng).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let mut rng = stream(10, 0, Stage::Matrix);
        let model = sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho: OrthoKind::Dct }, 5, 8, &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        export_matrix(&model, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(bytes.len(), 32 + 5 * 8 * 8);
        assert_eq!(&bytes[..8], b"OAMPMTX\0");
        assert_eq!(bytes[24], MatrixKind::PartialDct as u8);
        let back = import_matrix(&p).unwrap();
        assert_eq!(back.kind(), MatrixKind::PartialDct);
        assert_eq!(back.to_dense(), model.to_dense());
        std::fs::write(&p, &bytes[..40]).unwrap();
        assert!(import_matrix(&p).is_err());
    }
}
