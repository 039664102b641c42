use super::*;
use crate::geometry::{sample, Metric, SamplerKind, SamplerSpec};

fn torus_grid(per_axis: usize) -> PointCloud<f64> {
    let spec =
        SamplerSpec { kind: SamplerKind::DeterministicGrid { per_axis, lower: 0.0, upper: 1.0 }, seed: 0, stream: 0 };
    sample::<f64>(&spec, 0, 2).unwrap().with_metric(Metric::Torus).unwrap()
}

fn vertex_near(cloud: &PointCloud<f64>, p: &[f64]) -> usize {
    SpatialIndex::for_knn(cloud, 1).k_nearest_point(p, None, 1)[0].index
}

#[test]
fn continuum_of_x1_plus_square_is_two() {
    let phi = SmoothTestFunction::x1_plus_x1_squared(2);
    let f = DensityModel::Constant { value: 1.0 };
    for x in [[0.1, 0.3], [0.5, 0.5], [2.0, -1.0]] {
        assert!((continuum_operator(&phi, &f, 0.0, &x).unwrap() - 2.0).abs() < 1e-12);
        assert!((continuum_operator(&phi, &f, 3.0, &x).unwrap() - 2.0).abs() < 1e-12);
    }
}

#[test]
fn linear_drift_term() {
    let phi = SmoothTestFunction::Linear { p: vec![0.7, -0.2] };
    let f = DensityModel::Trig { level: 1.0, amplitude: 0.5, wavevector: vec![1, 1] };
    let x = [0.3, 0.1];
    let b = f.log_gradient(&x);
    let expect = 2.0 * 1.5 * (0.7 * b[0] - 0.2 * b[1]);
    assert!((continuum_operator(&phi, &f, 1.5, &x).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn vanishing_gradient_is_an_error() {
    let phi = SmoothTestFunction::x1_plus_x1_squared(2);
    let f = DensityModel::Constant { value: 1.0 };
    assert!(matches!(continuum_operator(&phi, &f, 0.0, &[-0.5, 0.0]), Err(Error::VanishingGradient { .. })));
    let cloud = PointCloud::new(vec![vec![-0.5, 0.0], vec![-0.4, 0.0]], 2, Metric::Euclidean).unwrap();
    let k = Kernel::indicator(0.2).unwrap();
    let r = discrete_consistency_check(&cloud, &k, 0.0, &phi, &f, 0, &ConsistencyOptions::default());
    assert!(matches!(r, Err(Error::VanishingGradient { .. })));
}

#[test]
fn grid_consistency_for_x1_plus_square() {
    let phi = SmoothTestFunction::x1_plus_x1_squared(2);
    let f = DensityModel::Constant { value: 1.0 };
    for h in [0.2f64, 0.1, 0.05] {
        let cloud = torus_grid((20.0 / h).round() as usize);
        let k = Kernel::indicator(h).unwrap();
        let x = vertex_near(&cloud, &[0.5, 0.5]);
        let r = discrete_consistency_check(&cloud, &k, 0.0, &phi, &f, x, &ConsistencyOptions::default()).unwrap();
        assert!(r.is_quantitative());
        assert!(r.error.unwrap() < 0.05, "h = {h}: {r:?}");
        assert_eq!(r.sign_agrees, Some(true));
    }
}

#[test]
fn linear_function_on_symmetric_grid_gives_zero() {
    let phi = SmoothTestFunction::Linear { p: vec![1.0, 0.5] };
    let f = DensityModel::Constant { value: 1.0 };
    let cloud = torus_grid(100);
    let k = Kernel::indicator(0.1).unwrap();
    let r = discrete_consistency_check(&cloud, &k, 0.0, &phi, &f, 4321, &ConsistencyOptions::default()).unwrap();
    assert!(r.discrete.abs() < 1e-9, "{r:?}");
    assert_eq!(r.sign_agrees, None);
}

#[test]
fn drift_sign_matches_density_gradient() {
    let phi = SmoothTestFunction::Linear { p: vec![1.0, 0.0] };
    let f = DensityModel::Trig { level: 1.0, amplitude: 0.5, wavevector: vec![1, 0] };
    let cloud = torus_grid(200);
    let k = Kernel::smooth_bump(0.05).unwrap();
    let vertices: Vec<usize> = (0..40).map(|i| vertex_near(&cloud, &[i as f64 / 40.0, 0.5])).collect();
    let opts = ConsistencyOptions::default();
    let reports = consistency_batch(&cloud, &k, 1.0, &phi, &f, &vertices, &opts).unwrap();
    let judged: Vec<_> = reports.iter().filter_map(|r| r.sign_agrees).collect();
    assert!(judged.len() > 20);
    assert!(judged.iter().all(|&s| s), "{reports:?}");
    assert!(reports.iter().all(|r| r.error.is_none()));

    let kde = ConsistencyOptions { degrees: DegreeSource::Kde { n_unlabeled: cloud.len() }, margin: 0.5 };
    let reports = consistency_batch(&cloud, &k, 1.0, &phi, &f, &vertices, &kde).unwrap();
    // a uniform grid has constant KDE degrees, so no drift is seen
    assert!(reports.iter().all(|r| r.discrete.abs() < 1e-6), "{reports:?}");
}

#[test]
fn grid_kde_beats_random_sampling() {
    let h = 0.05;
    let k = Kernel::indicator(h).unwrap();
    let target = DensityModel::Constant { value: 1.0 };
    let grid = torus_grid(200);
    let spec = SamplerSpec { kind: SamplerKind::UniformBox { lower: vec![0.0], upper: vec![1.0] }, seed: 3, stream: 0 };
    let random = sample::<f64>(&spec, grid.len(), 2).unwrap().with_metric(Metric::Torus).unwrap();
    let g = kde_error(&grid, &k, &target, grid.len(), true).unwrap();
    let r = kde_error(&random, &k, &target, random.len(), true).unwrap();
    assert!(g.r_n < r.r_n, "{g:?} {r:?}");
    assert!(g.r_n < 0.05);
    let unnormalized = kde_error_with(&grid, &k, |_| k.integral(2), grid.len(), false).unwrap();
    assert!((unnormalized.r_n / k.integral(2) - g.r_n).abs() < 1e-12);
    assert!((g.r_n_over_h - g.r_n / h).abs() < 1e-15);
}

#[test]
fn csv_output() {
    let rows = vec![
        ConsistencyReport { h: 0.1, discrete: 2.1, continuum: 2.0, error: Some(0.1), sign_agrees: Some(true) },
        ConsistencyReport { h: 0.1, discrete: -1.0, continuum: -3.0, error: None, sign_agrees: Some(true) },
    ];
    let mut out = Vec::new();
    write_consistency_csv(&rows, &mut out).unwrap();
    let s = String::from_utf8(out).unwrap();
    assert_eq!(s.lines().next().unwrap(), "h,discrete,continuum,error");
    assert!(s.lines().nth(2).unwrap().ends_with(','));
}
