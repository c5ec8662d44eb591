use nalgebra::DMatrix;
use oamp_core::ensembles::{
    export_matrix, geometric_singulars, haar_orthogonal, import_matrix, sample_matrix, EnsembleSpec, MatrixKind,
    OrthoKind, SingularNormalization,
};
use oamp_core::model::LinearOperator;
use oamp_core::rng::{stream, Stage};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = EnsembleSpec> {
    prop_oneof![
        Just(EnsembleSpec::IidGaussian),
        (1.0f64..1e4, any::<bool>()).prop_map(|(kappa, sq)| EnsembleSpec::Geometric {
            kappa,
            normalization: if sq { SingularNormalization::SumSquared } else { SingularNormalization::SumSingular },
        }),
        prop_oneof![Just(OrthoKind::Haar), Just(OrthoKind::Dct), Just(OrthoKind::Hadamard)]
            .prop_map(|ortho| EnsembleSpec::PartialOrthogonal { ortho }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn binary_export_round_trips(spec in spec_strategy(), m in 1usize..20, seed in any::<u64>()) {
        let n = 32;
        let model = sample_matrix(&spec, m, n, &mut stream(seed, 0, Stage::Matrix)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.bin");
        export_matrix(&model, &path).unwrap();
        let back = import_matrix(&path).unwrap();
        prop_assert_eq!(back.kind(), model.kind());
        prop_assert_eq!(back.to_dense(), model.to_dense());
        prop_assert_eq!(std::fs::metadata(&path).unwrap().len(), 32 + 8 * (m * n) as u64);
    }

    #[test]
    fn operator_matches_dense_matrix(spec in spec_strategy(), m in 1usize..30, seed in any::<u64>()) {
        let n = 32;
        let model = sample_matrix(&spec, m, n, &mut stream(seed, 0, Stage::Matrix)).unwrap();
        let a = model.to_dense();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let y: Vec<f64> = (0..m).map(|i| (i as f64 * 0.91).cos()).collect();
        let ax = a.apply(&x);
        let aty = a.apply_transpose(&y);
        for (u, v) in model.apply(&x).iter().zip(&ax) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        for (u, v) in model.apply_transpose(&y).iter().zip(&aty) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        prop_assert!((model.frobenius_sq() - a.norm_squared()).abs() < 1e-9 * a.norm_squared());
    }

    #[test]
    fn partial_orthogonal_gram_is_scaled_identity(ortho in 0usize..3, m in 1usize..64, seed in any::<u64>()) {
        let n = 64;
        let ortho = [OrthoKind::Haar, OrthoKind::Dct, OrthoKind::Hadamard][ortho];
        let model = sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho }, m, n, &mut stream(seed, 0, Stage::Matrix)).unwrap();
        let a = model.to_dense();
        let g = &a * a.transpose();
        let expect = DMatrix::<f64>::identity(m, m) * (n as f64 / m as f64);
        prop_assert!((g - expect).amax() < 1e-10);
        prop_assert!(model.kind().is_partial_orthogonal());
    }

    #[test]
    fn geometric_singulars_have_constant_ratio(kappa in 1.0f64..1e6, m in 2usize..200, sq in any::<bool>()) {
        let n = 2 * m;
        let norm = if sq { SingularNormalization::SumSquared } else { SingularNormalization::SumSingular };
        let s = geometric_singulars(kappa, m, n, norm).unwrap();
        let ratio = kappa.powf(1.0 / m as f64);
        for w in s.windows(2) {
            prop_assert!((w[0] / w[1] - ratio).abs() < 1e-12 * ratio);
        }
        let total: f64 = if sq { s.iter().map(|v| v * v).sum() } else { s.iter().sum() };
        prop_assert!((total - n as f64).abs() < 1e-9 * n as f64);
        // The literal ratio gives max/min = kappa^((M-1)/M).
        let cond = s[0] / s[m - 1];
        prop_assert!((cond.ln() - kappa.ln() * (m - 1) as f64 / m as f64).abs() < 1e-9);
    }
}

#[test]
fn haar_matrices_are_orthogonal() {
    let mut rng = stream(1, 0, Stage::Matrix);
    for n in [1, 2, 17, 64] {
        let q = haar_orthogonal(n, &mut rng);
        assert!((q.transpose() * &q - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
    }
}

#[test]
fn haar_first_row_is_uniform_on_the_sphere() {
    // E[q_11^2] = 1/n and E[q_11^4] = 3/(n(n+2)).
    let n = 8;
    let mut rng = stream(2, 0, Stage::Matrix);
    let draws = 4000;
    let (mut s2, mut s4) = (0.0, 0.0);
    for _ in 0..draws {
        let v = haar_orthogonal(n, &mut rng)[(0, 0)];
        s2 += v * v;
        s4 += v.powi(4);
    }
    let (m2, m4) = (s2 / draws as f64, s4 / draws as f64);
    assert!((m2 - 1.0 / n as f64).abs() < 0.01, "{m2}");
    assert!((m4 - 3.0 / (n * (n + 2)) as f64).abs() < 0.005, "{m4}");
}

#[test]
fn iid_entries_have_variance_one_over_m() {
    let (m, n) = (200, 300);
    let a = sample_matrix(&EnsembleSpec::IidGaussian, m, n, &mut stream(3, 0, Stage::Matrix)).unwrap().to_dense();
    let mean = a.sum() / (m * n) as f64;
    let var = a.norm_squared() / (m * n) as f64;
    assert!(mean.abs() < 4.0 / ((m * n) as f64 * m as f64).sqrt());
    assert!((var * m as f64 - 1.0).abs() < 0.02);
}

#[test]
fn geometric_matrix_has_prescribed_spectrum() {
    let (m, n) = (20, 50);
    let spec = EnsembleSpec::Geometric { kappa: 100.0, normalization: SingularNormalization::SumSingular };
    let model = sample_matrix(&spec, m, n, &mut stream(4, 0, Stage::Matrix)).unwrap();
    let a = model.to_dense();
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let expect = geometric_singulars(100.0, m, n, SingularNormalization::SumSingular).unwrap();
    for (u, v) in sv.iter().zip(&expect) {
        assert!((u - v).abs() < 1e-10 * v.max(1.0));
    }
    assert_eq!(model.kind(), MatrixKind::Geometric);
}

#[test]
fn invalid_requests_are_errors() {
    let mut rng = stream(5, 0, Stage::Matrix);
    let had = EnsembleSpec::PartialOrthogonal { ortho: OrthoKind::Hadamard };
    assert!(sample_matrix(&had, 4, 24, &mut rng).is_err());
    assert!(sample_matrix(&EnsembleSpec::PartialOrthogonal { ortho: OrthoKind::Dct }, 40, 32, &mut rng).is_err());
    assert!(sample_matrix(&EnsembleSpec::IidGaussian, 0, 4, &mut rng).is_err());
    assert!(geometric_singulars(0.5, 4, 8, SingularNormalization::SumSingular).is_err());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, b"not a matrix file at all, really not").unwrap();
    assert!(import_matrix(&bad).is_err());
}
