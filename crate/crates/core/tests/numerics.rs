use ringcpd::analytic::{critical_value, tail_probability, Quadrature, TailConfig};
use ringcpd::permutation::{permutation_pvalue, PermPlan};
use ringcpd::rank_graph::{
    build_graph_sequence, compute_distances, graph_induced_ranks, GraphKind, Metric, RankMatrix,
};
use ringcpd::scan::{condition_diagnostics, Alternative, ConditionStatus, ScanSpec, StatisticKind};
use ringcpd::simulate::{
    run_convergence_study, run_power_study, sample_sequence, AltKind, ConvergenceConfig, ConvergenceSetting,
    CovarianceSpec, Family, PowerConfig, PowerSetting, SamplerSpec,
};

fn gaussian(d: usize, sigma: CovarianceSpec) -> SamplerSpec {
    SamplerSpec::shifted(Family::Gaussian, d, 0.0, sigma)
}

fn knn_ranks(n: usize, d: usize, k: usize, seed: u64) -> RankMatrix {
    let spec = gaussian(d, CovarianceSpec::Identity);
    let seq = sample_sequence(&spec, &spec, n, n, seed).unwrap();
    let dm = compute_distances(&seq, Metric::Euclidean).unwrap();
    graph_induced_ranks(&build_graph_sequence(&dm, k, GraphKind::Knn).unwrap())
}

#[test]
fn doubling_quadrature_nodes_is_stable_near_critical_values() {
    let fine = Quadrature { omega_nodes: 128, x_nodes: 512, ..Quadrature::default() };
    for kind in [StatisticKind::T, StatisticKind::M] {
        for alt in [Alternative::Single, Alternative::Interval] {
            for lo in [25, 100] {
                let cfg = TailConfig::new(1000, kind, alt, lo, 1000 - lo).unwrap();
                let b = critical_value(&cfg, 0.05, None).unwrap();
                let coarse = tail_probability(&cfg, b, None).unwrap();
                let refined = tail_probability(&cfg.with_quadrature(fine).unwrap(), b, None).unwrap();
                assert!((coarse - refined).abs() < 1e-5, "{kind:?} {alt:?} lo={lo}: {coarse} vs {refined}");
            }
        }
    }
}

#[test]
fn sampled_p_value_agrees_with_exhaustive() {
    let r = knn_ranks(7, 3, 2, 77);
    for kind in [StatisticKind::T, StatisticKind::M] {
        let spec = ScanSpec::with_default_window(kind, Alternative::Single, 7);
        let exact = permutation_pvalue(&r, spec, &PermPlan::exhaustive()).unwrap().p_value;
        let b = 50_000.0;
        let sampled = permutation_pvalue(&r, spec, &PermPlan::sampled(50_000, 78)).unwrap().p_value;
        let se = (exact * (1.0 - exact) / b).sqrt();
        assert!((sampled - exact).abs() <= 3.0 * se + 1.0 / b, "{kind:?}: {sampled} vs {exact}");
    }
}

#[test]
fn diagnostics_are_finite_for_sparse_graphs() {
    let r = knn_ranks(100, 5, 1, 91);
    let rep = condition_diagnostics(&r);
    assert_eq!(rep.checks.len(), 6);
    for c in &rep.checks {
        assert!(c.ratio.is_finite(), "c{} = {}", c.index, c.ratio);
        assert_ne!(c.status, ConditionStatus::Undefined);
    }
}

#[test]
fn ar1_sample_covariance() {
    let spec = gaussian(5, CovarianceSpec::Ar1(0.5));
    let n = 100_000;
    let seq = sample_sequence(&spec, &spec, n, n, 5).unwrap();
    let mut mean = [0.0; 5];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(seq.item(i)) {
            *m += x / n as f64;
        }
    }
    for a in 0..5 {
        for b in 0..5 {
            let c: f64 = (0..n).map(|i| (seq.item(i)[a] - mean[a]) * (seq.item(i)[b] - mean[b])).sum::<f64>()
                / (n - 1) as f64;
            let want = 0.5f64.powi((a as i32 - b as i32).abs());
            assert!((c - want).abs() <= 0.02, "({a},{b}): {c} vs {want}");
        }
    }
}

#[test]
fn power_does_not_drop_when_shift_doubles() {
    let (pre, post) = PowerSetting::I.pair(AltKind::Location, 50);
    let delta = post.mu[0];
    let run = |shift: f64| {
        let post = SamplerSpec::shifted(Family::Gaussian, 50, shift, post.sigma.clone());
        let mut cfg = PowerConfig::new(pre.clone(), post);
        cfg.n = 100;
        cfg.tau = 33;
        cfg.replicates = 80;
        cfg.detector.permutations = Some(300);
        cfg.seed = 31;
        run_power_study(&cfg).unwrap().power()
    };
    let (p1, p2) = (run(delta), run(2.0 * delta));
    let noise = 2.0 * (p1 * (1.0 - p1) / 80.0).sqrt();
    assert!(p2 >= p1 - noise, "power {p1} -> {p2}");
}

#[test]
fn studies_are_reproducible() {
    let (pre, post) = PowerSetting::II.pair(AltKind::LocationSimpleScale, 20);
    let mut cfg = PowerConfig::new(pre, post);
    cfg.n = 60;
    cfg.tau = 20;
    cfg.replicates = 8;
    cfg.detector.permutations = Some(99);
    assert_eq!(run_power_study(&cfg).unwrap(), run_power_study(&cfg).unwrap());
}

#[test]
fn scaled_curves_concentrate_as_n_grows() {
    let mut cfg = ConvergenceConfig::new(ConvergenceSetting::Gaussian);
    cfg.d = 200;
    cfg.ns = vec![100, 800];
    cfg.runs = 8;
    let curves = run_convergence_study(&cfg).unwrap();
    let spread = |n: usize| {
        let v: Vec<f64> = curves.iter().filter(|c| c.n == n).map(|c| c.at(0.3).1).collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let (small, large) = (spread(100), spread(800));
    assert!(large < small, "spread {small} at n=100, {large} at n=800");
}
