use super::*;
use crate::testfns::TestFnConfig;
use proptest::prelude::*;
use std::sync::OnceLock;

fn family(dim: usize) -> &'static TestFamily {
    static F1: OnceLock<TestFamily> = OnceLock::new();
    static F2: OnceLock<TestFamily> = OnceLock::new();
    let cell = if dim == 1 { &F1 } else { &F2 };
    cell.get_or_init(|| TestFamily::for_functionals(dim, 200, TestFnConfig::default()).unwrap())
}

fn gaussian_1d(nodes: usize, half: f64, center: f64) -> SampledField {
    let grid = Grid::cube(1, half, nodes).unwrap();
    SampledField::from_fn(grid, |x, out| out[0] = (-(x[0] - center).powi(2)).exp()).unwrap()
}

fn gaussian_2d(nodes: usize, half: f64) -> SampledField {
    let grid = Grid::cube(2, half, nodes).unwrap();
    SampledField::from_fn(grid, |x, out| {
        let r2 = (x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2);
        out[0] = (-r2).exp();
        out[1] = x[0] * (-r2).exp();
    })
    .unwrap()
}

fn cfg(k_max: u64) -> SdConfig {
    SdConfig {
        k_max,
        ..SdConfig::default()
    }
}

#[test]
fn functional_of_zero_and_scaling() {
    let fam = family(2);
    let f = gaussian_2d(41, 4.0);
    let zero = SampledField::zeros(f.grid.clone());
    let twice = f.scaled(2.0);
    for k in 1..=30 {
        let cube = fam.cube(k).unwrap();
        let z = functional_f(fam, &cube, &zero, &cfg(1)).unwrap();
        assert_eq!(z.value, ZERO);
        let a = functional_f(fam, &cube, &f, &cfg(1)).unwrap().value;
        let b = functional_f(fam, &cube, &twice, &cfg(1)).unwrap().value;
        assert!((b - a * 2.0).norm() <= 1e-14 * a.norm().max(1e-300) + 1e-300);
    }
}

/// Midpoint-rule oracle for `∫_{B_k} E_k` using pointwise evaluation.
fn riemann_e_integral(fam: &TestFamily, cube: &CubeIndex, cells: usize) -> Vec<Complex64> {
    let dim = fam.dim();
    let mut acc = vec![ZERO; dim];
    let h = cube.edge / cells as f64;
    let total = cells.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for flat in 0..total {
        let mut rem = flat;
        for a in 0..dim {
            let (lo, _) = cube.bounds(a);
            x[a] = lo + (rem % cells) as f64 * h + 0.5 * h;
            rem /= cells;
        }
        for (s, e) in acc.iter_mut().zip(fam.eval_e(cube, &x)) {
            *s += e;
        }
    }
    acc.iter().map(|s| s * h.powi(dim as i32)).collect()
}

#[test]
fn constant_field_matches_riemann_oracle() {
    for dim in [1usize, 2] {
        let fam = family(dim);
        let grid = Grid::cube(dim, 6.0, 25).unwrap();
        let c = [0.7, -1.3];
        let field = SampledField::from_fn(grid, |_, out| {
            for (o, v) in out.iter_mut().zip(c) {
                *o = v;
            }
        })
        .unwrap();
        let ks: &[u64] = if dim == 1 {
            &[1, 2, 3, 5, 8, 13, 40]
        } else {
            &[1, 2, 4, 7]
        };
        for &k in ks {
            let cube = fam.cube(k).unwrap();
            let cells = if dim == 1 { 20_000 } else { 1500 };
            let oracle = riemann_e_integral(fam, &cube, cells);
            let expected: Complex64 = oracle.iter().zip(c).map(|(e, v)| e * v).sum();
            let got = functional_f(fam, &cube, &field, &cfg(1)).unwrap().value;
            let scale = 1.0 / (cube.scale * dim as f64);
            assert!(
                (got - expected).norm() <= 1e-8 * scale,
                "dim {dim} k {k}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn disjoint_cube_gives_zero() {
    let fam = family(1);
    let f = gaussian_1d(101, 0.2, 0.0);
    // k = 3 is centered at x = 1 with edge π/3
    let cube = fam.cube(3).unwrap();
    assert!(cube.bounds(0).0 > 0.2);
    assert_eq!(functional_f(fam, &cube, &f, &cfg(1)).unwrap().value, ZERO);
}

#[test]
fn inner_product_is_hermitian_and_matches_norm() {
    let fam = family(2);
    let f = gaussian_2d(61, 4.0);
    let g = SampledField::from_fn(f.grid.clone(), |x, out| {
        out[0] = (x[1]).sin() * (-x[0] * x[0]).exp();
        out[1] = (-x[1] * x[1] - x[0]).exp() * 0.1;
    })
    .unwrap();
    let c = cfg(60);
    let ff = sd_inner(fam, &f, &f, &c).unwrap();
    assert!(ff.value.re >= 0.0);
    assert!(ff.value.im.abs() <= 1e-14 * ff.value.re);
    let fg = sd_inner(fam, &f, &g, &c).unwrap();
    let gf = sd_inner(fam, &g, &f, &c).unwrap();
    assert!((fg.value - gf.value.conj()).norm() <= 1e-15 * ff.value.norm());
    let n2 = sd_norm_p(fam, &f, 2.0, &c).unwrap();
    assert!((n2.value - ff.value.re.sqrt()).abs() <= 1e-14 * n2.value);
    assert!((n2.tail_bound - ff.tail_bound.sqrt()).abs() <= 1e-14 * n2.tail_bound);
}

#[test]
fn tail_bound_at_thirty() {
    let fam = family(2);
    let f = gaussian_2d(41, 4.0);
    let g = f.scaled(-0.5);
    let v = sd_inner(fam, &f, &g, &cfg(30)).unwrap();
    assert!(v.tail_bound <= 0.5f64.powi(30) * f.norm(1.0) * g.norm(1.0));
}

#[test]
fn truncation_is_monotone_within_tail() {
    let fam = family(1);
    let f = gaussian_1d(801, 8.0, 0.4);
    let full = FunctionalSet::compute(fam, &f, &cfg(200)).unwrap();
    let mut prev_tail = f64::INFINITY;
    for kk in [5u64, 10, 20, 40, 80, 160] {
        let head = FunctionalSet {
            values: full.values[..kk as usize].to_vec(),
            bound: full.bound,
        };
        for p in [1.0, 2.0, 3.0] {
            let a = sd_norm_p_set(&head, p).unwrap();
            let b = sd_norm_p_set(&full, p).unwrap();
            assert!(b.value - a.value <= a.tail_bound * (1.0 + 1e-12));
            assert!(b.value >= a.value);
        }
        let t = sd_norm_p_set(&head, 2.0).unwrap().tail_bound;
        assert!(t <= prev_tail);
        prev_tail = t;
    }
}

#[test]
fn holder_per_term() {
    let fam = family(1);
    let f = gaussian_1d(1601, 8.0, -0.3);
    let set = FunctionalSet::compute(fam, &f, &cfg(200)).unwrap();
    for q in [1.0, 2.0, f64::INFINITY] {
        let (_, e_norms) = embedding_constant(fam, q, 200).unwrap();
        let fq = f.norm(q);
        for (v, en) in set.values.iter().zip(&e_norms) {
            assert!(
                v.value.norm() <= en * fq * (1.0 + 1e-9),
                "q {q} k {}: {} > {}",
                v.k,
                v.value.norm(),
                en * fq
            );
        }
    }
}

#[test]
fn holder_per_term_2d() {
    let fam = family(2);
    let f = gaussian_2d(81, 4.0);
    let set = FunctionalSet::compute(fam, &f, &cfg(60)).unwrap();
    for q in [1.0, 2.0, f64::INFINITY] {
        let (_, e_norms) = embedding_constant(fam, q, 60).unwrap();
        let fq = f.norm(q);
        for (v, en) in set.values.iter().zip(&e_norms) {
            assert!(v.value.norm() <= en * fq * (1.0 + 1e-9));
        }
    }
}

#[test]
fn sup_norm_bounded_by_l1() {
    let fam = family(2);
    let f = gaussian_2d(41, 4.0);
    let v = sd_norm_p(fam, &f, f64::INFINITY, &cfg(100)).unwrap();
    assert!(v.value <= f.norm(1.0));
    assert!(v.value + v.tail_bound <= f.norm(1.0) / 2f64.sqrt() * (1.0 + 1e-12));
    let zero = SampledField::zeros(f.grid.clone());
    assert_eq!(sd_norm_p(fam, &zero, 3.0, &cfg(10)).unwrap().value, 0.0);
    assert!(sd_norm_p(fam, &f, 0.5, &cfg(10)).is_err());
}

#[test]
fn gaussian_bump_below_l2_embedding() {
    let fam = family(1);
    let f = gaussian_1d(1601, 8.0, 0.0);
    let c = cfg(200);
    let (c2, _) = embedding_constant(fam, 2.0, 200).unwrap();
    let n = sd_norm(fam, &f, &c).unwrap();
    assert!(n.value <= c2 * f.norm(2.0) + n.tail_bound);
}

#[test]
fn mismatched_grids_rejected() {
    let fam = family(1);
    let f = gaussian_1d(101, 4.0, 0.0);
    let g = gaussian_1d(103, 4.0, 0.0);
    assert_eq!(sd_inner(fam, &f, &g, &cfg(3)), Err(Error::GridMismatch));
}

#[test]
fn under_resolved_cubes_are_flagged() {
    let fam = family(1);
    let f = gaussian_1d(17, 8.0, 0.0);
    let v = sd_norm(fam, &f, &cfg(40)).unwrap();
    assert!(!v.under_resolved.is_empty());
    for k in &v.under_resolved {
        assert!(fam.cube(*k).unwrap().edge < f.grid.max_step());
    }
}

#[test]
fn alexiewicz_of_nonnegative_field_is_total() {
    let grid = Grid::cube(2, 3.0, 61).unwrap();
    let f =
        ScalarField::from_fn(grid, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() + 0.01).unwrap();
    let total: f64 = f.values.iter().sum::<f64>() * f.grid.cell_volume();
    assert!((alexiewicz_norm(&f) - total).abs() <= 1e-12 * total);
    assert!((alexiewicz_norm_anchored(&f) - total).abs() <= 1e-12 * total);
}

#[test]
fn alexiewicz_of_odd_field_vanishes() {
    let grid = Grid::cube(3, 2.0, 21).unwrap();
    let f = ScalarField::from_fn(grid, |x| {
        x[0] * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
    })
    .unwrap();
    assert!(alexiewicz_norm(&f) <= 1e-15);
}

#[test]
fn alexiewicz_sinc_matches_cumulative_sum() {
    let half = 40.0 * core::f64::consts::PI;
    let nodes = 40_001;
    let grid = Grid::cube(1, half, nodes).unwrap();
    let f =
        ScalarField::from_fn(grid, |x| if x[0] == 0.0 { 1.0 } else { x[0].sin() / x[0] }).unwrap();
    let c = nodes / 2;
    let h = f.grid.step(0);
    let mut s = f.values[c];
    let mut best = s.abs();
    for m in 1..=c {
        s += f.values[c - m] + f.values[c + m];
        best = best.max(s.abs());
    }
    best *= h;
    assert!((alexiewicz_norm(&f) - best).abs() <= 1e-10);
    assert!(best > 3.0);
}

#[test]
fn vitali_variation_cases() {
    let grid = Grid::cube(2, 4.0, 401).unwrap();
    let constant = ScalarField::from_fn(grid.clone(), |_| 2.5).unwrap();
    assert!(vitali_variation(&constant) < 1e-12);
    let linear = ScalarField::from_fn(grid.clone(), |x| 3.0 * x[0] + 1.0).unwrap();
    assert!(vitali_variation(&linear) < 1e-10);

    let g1 = |x: f64| (-(x - 0.3) * (x - 0.3)).exp();
    let g2 = |y: f64| (-2.0 * y * y).exp();
    let sep = ScalarField::from_fn(grid.clone(), |x| g1(x[0]) * g2(x[1])).unwrap();
    let one_d = |g: &dyn Fn(f64) -> f64| {
        let g1d = Grid::cube(1, 4.0, 401).unwrap();
        let s = ScalarField::from_fn(g1d, |x| g(x[0])).unwrap();
        let d = s.derivative(0);
        (0..401)
            .map(|i| d.grid.trapezoid_weight(0, i) * d.values[i].abs())
            .sum::<f64>()
    };
    let expected = one_d(&g1) * one_d(&g2);
    assert!((vitali_variation(&sep) - expected).abs() <= 1e-6 * expected);
    // and both approximate ∫|g1'|·∫|g2'| = 2·2
    assert!((expected - 4.0).abs() < 5e-3, "{expected}");
}

#[test]
fn hk_pairing_reports() {
    let grid = Grid::cube(1, 6.0, 4001).unwrap();
    let zero = ScalarField::from_fn(grid.clone(), |_| 0.0).unwrap();
    let g = ScalarField::from_fn(grid.clone(), |x| (-(x[0] - 1.0).powi(2)).exp()).unwrap();
    let r = hk_pairing_bound(&zero, &g).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.satisfied && r.vanishes_at_lower_faces);

    let bump = |x: f64| (-x * x).exp();
    let f = ScalarField::from_fn(grid.clone(), |x| (50.0 * x[0]).sin() * bump(x[0])).unwrap();
    let r = hk_pairing_bound(&f, &g).unwrap();
    assert!(r.satisfied, "{r:?}");

    let c = ScalarField::from_fn(grid.clone(), |_| 2.0).unwrap();
    let pos = ScalarField::from_fn(grid, |x| bump(x[0])).unwrap();
    let r = hk_pairing_bound(&pos, &c).unwrap();
    assert!(r.rhs < 1e-12);
    assert!(!r.satisfied);
    assert!(!r.vanishes_at_lower_faces);
}

#[test]
fn anchored_norm_controls_pairing_with_test_fields() {
    // 1-D: |F_k(f)| ≤ ‖f‖_anchored · ∫|E_k'|, so the SD² norm is bounded
    // by the anchored norm times sup_k V(E_k)
    let fam = family(1);
    let f = gaussian_1d(4001, 8.0, 0.2);
    let f = SampledField::from_fn(f.grid.clone(), |x, out| {
        out[0] = (7.0 * x[0]).cos() * (-(x[0] - 0.2).powi(2)).exp()
    })
    .unwrap();
    let c = cfg(120);
    let n = sd_norm(fam, &f, &c).unwrap();
    let mut sup_v = 0.0f64;
    for k in 1..=120 {
        let cube = fam.cube(k).unwrap();
        let (lo, hi) = cube.bounds(0);
        let v = quad::composite(|x| fam.eval_de(&cube, &[x], 0)[0].norm(), lo, hi, 64);
        sup_v = sup_v.max(v);
    }
    let a = alexiewicz_norm_anchored(&f.component(0));
    assert!(n.value.powi(2) <= (a * sup_v).powi(2) + n.tail_bound.powi(2) * 3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functionals_are_linear(
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        a in proptest::collection::vec(-1.0f64..1.0, 41),
        b in proptest::collection::vec(-1.0f64..1.0, 41),
        k in 1u64..200,
    ) {
        let fam = family(1);
        let grid = Grid::cube(1, 3.0, 41).unwrap();
        let f = SampledField::new(grid.clone(), vec![a]).unwrap();
        let g = SampledField::new(grid, vec![b]).unwrap();
        let h = f.combine(alpha, &g, beta).unwrap();
        let cube = fam.cube(k).unwrap();
        let c = cfg(1);
        let ff = functional_f(fam, &cube, &f, &c).unwrap().value;
        let fg = functional_f(fam, &cube, &g, &c).unwrap().value;
        let fh = functional_f(fam, &cube, &h, &c).unwrap().value;
        let scale = (ff.norm() + fg.norm()) * 3.0 + 1e-300;
        prop_assert!((fh - (ff * alpha + fg * beta)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn minkowski_holds_for_random_pairs(
        a in proptest::collection::vec(-1.0f64..1.0, 33),
        b in proptest::collection::vec(-1.0f64..1.0, 33),
        p in 1.0f64..6.0,
    ) {
        let fam = family(1);
        let grid = Grid::cube(1, 2.0, 33).unwrap();
        let f = SampledField::new(grid.clone(), vec![a]).unwrap();
        let g = SampledField::new(grid, vec![b]).unwrap();
        let s = f.combine(1.0, &g, 1.0).unwrap();
        let c = cfg(40);
        let nf = sd_norm_p(fam, &f, p, &c).unwrap().value;
        let ng = sd_norm_p(fam, &g, p, &c).unwrap().value;
        let ns = sd_norm_p(fam, &s, p, &c).unwrap().value;
        prop_assert!(ns <= (nf + ng) * (1.0 + 1e-12) + 1e-300);
    }
}
