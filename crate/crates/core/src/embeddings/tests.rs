use super::*;
use crate::sdspace::{sd_norm, FunctionalValue};
use crate::testfns::TestFnConfig;
use std::sync::OnceLock;

fn family(dim: usize) -> &'static TestFamily {
    static F1: OnceLock<TestFamily> = OnceLock::new();
    static F2: OnceLock<TestFamily> = OnceLock::new();
    let cell = if dim == 1 { &F1 } else { &F2 };
    cell.get_or_init(|| TestFamily::for_functionals(dim, 200, TestFnConfig::default()).unwrap())
}

fn cfg(k_max: u64) -> SdConfig {
    SdConfig {
        k_max,
        ..SdConfig::default()
    }
}

fn constants(dim: usize, q: f64) -> EmbeddingConstants {
    EmbeddingConstants::compute(family(dim), q, 200).unwrap()
}

fn unit_mass_bump(grid: &Grid) -> SampledField {
    let g = Generator::Bump {
        center: vec![0.2; grid.dim()],
        radius: 1.0,
        amplitude: 1.0,
    };
    let f = g.field(grid).unwrap();
    let mass = f.norm(1.0);
    f.scaled(1.0 / mass)
}

#[test]
fn profiles() {
    assert_eq!(bump_profile(0.0), 1.0);
    assert_eq!(bump_profile(1.0), 0.0);
    assert_eq!(bump_profile(-1.5), 0.0);
    assert_eq!(smooth_cutoff(0.3), 1.0);
    assert_eq!(smooth_cutoff(1.0), 0.0);
    let mid = smooth_cutoff(0.75);
    assert!((mid - 0.5).abs() < 1e-15);
}

#[test]
fn embedding_of_zero_field() {
    let grid = Grid::cube(2, 3.0, 41).unwrap();
    let zero = SampledField::zeros(grid);
    for q in [1.0, 2.0, f64::INFINITY] {
        let r = check_embedding_lp(family(2), &zero, &constants(2, q), &cfg(200)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert!(r.passed);
    }
}

#[test]
fn embedding_of_unit_mass_bump() {
    let grid = Grid::cube(2, 3.0, 61).unwrap();
    let f = unit_mass_bump(&grid);
    for q in [1.0, 2.0, f64::INFINITY] {
        let c = constants(2, q);
        let r = check_embedding_lp(family(2), &f, &c, &cfg(200)).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.lhs > 0.0);
        assert!(r.c_q_below_one);
        if q == 1.0 {
            assert!((r.norm_q - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn compactness_of_constant_sequence_is_flagged() {
    let grid = Grid::cube(1, 3.0, 601).unwrap();
    let f = unit_mass_bump(&grid);
    let seq = vec![f.clone(), f.clone(), f.clone(), f];
    let r = check_compactness(family(1), &seq, &cfg(100)).unwrap();
    assert!(r.not_weakly_null);
    assert!(!r.passed);
    assert!(r.norms.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn oscillatory_sequence_decays() {
    // m up to 128 needs ~20 nodes per period
    let grid = Grid::cube(1, 2.0, 8001).unwrap();
    let seq = oscillatory_sequence(&grid, 1.5, 128).unwrap();
    assert_eq!(seq.len(), 8);
    let r = check_compactness(family(1), &seq, &cfg(200)).unwrap();
    assert!(r.passed, "{:?}", r.norms);
    assert!(!r.not_weakly_null);
    // Riemann–Lebesgue: functionals whose cube spans many periods of the
    // last frequency have decayed
    let sets: Vec<FunctionalSet> = seq
        .iter()
        .map(|f| FunctionalSet::compute(family(1), f, &cfg(20)).unwrap())
        .collect();
    let period = 2.0 * core::f64::consts::PI / 128.0;
    let mut checked = 0;
    for k in 0..20 {
        if family(1).cube(k as u64 + 1).unwrap().edge < 8.0 * period {
            continue;
        }
        let peak = sets
            .iter()
            .fold(0.0f64, |m, s| m.max(s.values[k].value.norm()));
        assert!(sets[7].values[k].value.norm() <= 0.05 * peak);
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn translates_leave_every_fixed_cube() {
    let grid = Grid::cube(1, 40.0, 4001).unwrap();
    let seq = translate_sequence(&grid, &[4.0], 0.8, 8).unwrap();
    let r = check_compactness(family(1), &seq, &cfg(60)).unwrap();
    let last = FunctionalSet::compute(family(1), seq.last().unwrap(), &cfg(60)).unwrap();
    for k in 1..=60u64 {
        let cube = family(1).cube(k).unwrap();
        let (lo, hi) = cube.bounds(0);
        if hi < 32.0 - 0.8 || lo > 32.0 + 0.8 {
            assert_eq!(last.values[k as usize - 1].value.norm(), 0.0);
        }
    }
    assert!(r.max_functional[8] < r.max_functional[0]);
}

#[test]
fn weak_derivative_identity_multi_index() {
    let grid = Grid::cube(2, 3.0, 61).unwrap();
    let f = unit_mass_bump(&grid);
    let r = check_weak_derivative(family(2), &f, &[0, 0], &cfg(20)).unwrap();
    assert_eq!(r.ratio, 1.0);
    assert_eq!(r.max_residual, 0.0);
    assert!(r.compact_support);
}

fn gaussian_2d(nodes: usize) -> SampledField {
    let grid = Grid::cube(2, 3.0, nodes).unwrap();
    Generator::Gaussian {
        center: vec![0.1, -0.2],
        width: 0.4,
        amplitude: 1.0,
    }
    .field(&grid)
    .unwrap()
}

#[test]
fn weak_derivative_duality_for_gaussian() {
    let f = gaussian_2d(601);
    let r = check_weak_derivative(family(2), &f, &[1, 0], &cfg(100)).unwrap();
    assert!(r.compact_support);
    assert!(r.max_residual <= 1e-6, "{}", r.max_residual);
    assert!(r.ratio.is_finite() && r.ratio > 0.0);
}

#[test]
fn weak_derivative_residual_is_second_order() {
    let coarse = check_weak_derivative(family(2), &gaussian_2d(121), &[1, 0], &cfg(30)).unwrap();
    let fine = check_weak_derivative(family(2), &gaussian_2d(241), &[1, 0], &cfg(30)).unwrap();
    let order = (coarse.max_residual / fine.max_residual).log2();
    assert!(order >= 1.8, "order {order}");
}

#[test]
fn weak_derivative_flags_boundary_mass() {
    let grid = Grid::cube(2, 1.0, 41).unwrap();
    let f = Generator::Gaussian {
        center: vec![0.0, 0.0],
        width: 1.0,
        amplitude: 1.0,
    }
    .field(&grid)
    .unwrap();
    let r = check_weak_derivative(family(2), &f, &[0, 1], &cfg(5)).unwrap();
    assert!(!r.compact_support);
}

#[test]
fn multi_index_enumeration() {
    assert_eq!(multi_indices(2, 0), vec![vec![0, 0]]);
    assert_eq!(multi_indices(2, 1).len(), 3);
    assert_eq!(multi_indices(3, 2).len(), 10);
}

#[test]
fn sobolev_membership_cases() {
    let grid = Grid::cube(2, 3.0, 81).unwrap();
    let zero = SampledField::zeros(grid.clone());
    let c2 = constants(2, 2.0);
    let r = check_sobolev_membership(family(2), &zero, 2, &c2, &cfg(200)).unwrap();
    assert!(r.passed && r.lhs == 0.0);
    let f = gaussian_2d(81);
    let r = check_sobolev_membership(family(2), &f, 2, &c2, &cfg(200)).unwrap();
    assert!(r.passed, "{r:?}");
    let cinf = constants(2, f64::INFINITY);
    let r = check_sobolev_membership(family(2), &f, 1, &cinf, &cfg(200)).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn minkowski_cases() {
    let f = gaussian_2d(61);
    let fam = family(2);
    let r = check_minkowski(fam, &f, &f.scaled(-1.0), 3.0, &cfg(100)).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.passed);
    let r = check_minkowski(fam, &f, &f, 2.0, &cfg(100)).unwrap();
    let single = sd_norm(fam, &f, &cfg(100)).unwrap().value;
    assert!((r.lhs - 2.0 * single).abs() <= 1e-12 * r.lhs);
    let mut rng = Rng::seeded(7);
    let g = SampledField::from_fn(f.grid.clone(), |x, out| {
        out[0] = (x[0] * 1.3).sin() * (-x[1] * x[1]).exp();
        out[1] = (-(x[0] - 1.0).powi(2)).exp();
    })
    .unwrap();
    for _ in 0..3 {
        let p = rng.uniform_in(1.0, 5.0);
        assert!(check_minkowski(fam, &f, &g, p, &cfg(100)).unwrap().passed);
    }
}

#[test]
fn sd_infinity_in_sd_p() {
    let fam = family(2);
    let grid = Grid::cube(2, 3.0, 61).unwrap();
    let zero = SampledField::zeros(grid.clone());
    let r = check_sdinfty_in_sdp(fam, &zero, 2.0, &cfg(100)).unwrap();
    assert!(r.passed && r.lhs == 0.0);
    // a field aligned with Re E_1 makes F_1 dominant
    let cube = fam.cube(1).unwrap();
    let aligned = SampledField::from_fn(grid, |x, out| {
        let e = fam.eval_e(&cube, x);
        for (o, v) in out.iter_mut().zip(e) {
            *o = v.re;
        }
    })
    .unwrap();
    let set = FunctionalSet::compute(fam, &aligned, &cfg(100)).unwrap();
    let top = set
        .values
        .iter()
        .max_by(|a: &&FunctionalValue, b| a.value.norm().total_cmp(&b.value.norm()))
        .unwrap();
    assert_eq!(top.k, 1);
    for p in [1.0, 2.0, 4.0] {
        let r = check_sdinfty_in_sdp(fam, &aligned, p, &cfg(100)).unwrap();
        assert!(r.passed, "{r:?}");
    }
    let r = check_sdinfty_in_sdp(fam, &gaussian_2d(61), 3.0, &cfg(100)).unwrap();
    assert!(r.passed);
}

#[test]
fn bmo_of_constant_and_bounded_fields() {
    let grid = Grid::cube(2, 2.0, 64).unwrap();
    let c = ScalarField::from_fn(grid.clone(), |_| 3.0).unwrap();
    assert_eq!(bmo_norm(&c, 500, 1), 0.0);
    let g = ScalarField::from_fn(grid, |x| (3.0 * x[0]).sin() * (x[1]).cos()).unwrap();
    let b = bmo_norm(&g, 2000, 2);
    assert!(b > 0.0 && b <= 2.0 * g.max_abs());
}

/// `sup_b` of the mean oscillation of `ln|t|` over `[−b, 1]`; by scaling
/// and symmetry every interval touching 0 reduces to this family.
fn log_bmo_oracle() -> f64 {
    // I(c) = ∫_0^c |ln t − m| dt in closed form
    let integral = |c: f64, m: f64| {
        let f = |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                t * t.ln() - t - m * t
            }
        };
        if c <= m.exp() {
            -f(c)
        } else {
            f(c) + 2.0 * m.exp()
        }
    };
    (1..=100_000)
        .map(|i| {
            let b = i as f64 / 100_000.0;
            let m = (b * b.ln() - b - 1.0) / (1.0 + b);
            (integral(b, m) + integral(1.0, m)) / (1.0 + b)
        })
        .fold(0.0, f64::max)
}

#[test]
fn bmo_of_log_is_stable() {
    let oracle = log_bmo_oracle();
    // symmetric intervals give 2/e; asymmetric ones do better
    assert!(oracle > 2.0 / core::f64::consts::E);
    let mut values = Vec::new();
    for nodes in [2000usize, 8000] {
        let grid = Grid::cube(1, 1.0, nodes).unwrap();
        let g = ScalarField::from_fn(grid, |x| x[0].abs().ln()).unwrap();
        values.push(bmo_norm(&g, 4000, 3));
    }
    for v in &values {
        assert!((v - oracle).abs() < 0.01, "{v} vs {oracle}");
    }
    assert!((values[0] - values[1]).abs() < 0.01);
}

#[test]
fn bmo_log_generator_rejects_node_on_axis() {
    let grid = Grid::cube(1, 1.0, 11).unwrap();
    assert!(Generator::BmoLog { radius: 0.5 }.field(&grid).is_err());
}

#[test]
fn bmo_inverse_pairing_cases() {
    let fam = family(2);
    let grid = Grid::cube(2, 3.0, 400).unwrap();
    let consts: Vec<ScalarField> = (0..2)
        .map(|i| ScalarField::from_fn(grid.clone(), |_| 1.5 + i as f64).unwrap())
        .collect();
    let r = check_bmo_inverse_pairing(fam, &consts, &cfg(40), 200, 1).unwrap();
    assert_eq!(r.sd_infinity, 0.0);
    assert!(r.bmo_norms.iter().all(|&b| b == 0.0));

    let log = Generator::BmoLog { radius: 2.0 }.scalar(&grid).unwrap();
    let zero = ScalarField::from_fn(grid.clone(), |_| 0.0).unwrap();
    let r = check_bmo_inverse_pairing(fam, &[log, zero], &cfg(40), 500, 2).unwrap();
    assert!(r.sup_finite);
    assert!(r.bmo_norms[0] > 0.3 && r.bmo_norms[0].is_finite());

    let smooth: Vec<ScalarField> = (0..2)
        .map(|i| {
            let g = Generator::Gaussian {
                center: vec![0.3 * i as f64, -0.1],
                width: 0.5,
                amplitude: 1.0,
            };
            g.scalar(&Grid::cube(2, 3.0, 801).unwrap()).unwrap()
        })
        .collect();
    let r = check_bmo_inverse_pairing(fam, &smooth, &cfg(60), 200, 3).unwrap();
    assert!(r.max_residual <= 1e-6, "{}", r.max_residual);
}

#[test]
fn standard_corpus_suite_passes() {
    let mut spec = CorpusSpec::standard(2, 4.0, 80, 200, 11);
    // h = 0.1: the finite-difference duality error is ~1e-4 here
    spec.duality_tol = 1e-3;
    assert_eq!(spec.items.len(), 20);
    let records = run_suite(family(2), &spec, &cfg(200)).unwrap();
    let failed: Vec<_> = records.iter().filter(|r| !r.passed).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(records.iter().filter(|r| r.check == "embedding_lp").count() == 60);
}

#[test]
fn suite_is_deterministic() {
    let spec = CorpusSpec::standard(1, 4.0, 200, 40, 5);
    let a = run_suite(family(1), &spec, &cfg(40)).unwrap();
    let b = run_suite(family(1), &spec, &cfg(40)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fine_corpus_suite_meets_duality_tolerance() {
    let spec = CorpusSpec::standard(1, 4.0, 8000, 100, 12);
    assert_eq!(spec.duality_tol, 1e-6);
    let records = run_suite(family(1), &spec, &cfg(100)).unwrap();
    let failed: Vec<_> = records.iter().filter(|r| !r.passed).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(records.iter().any(|r| r.check == "weak_derivative"));
}
