use plp_blindspot::analytic::{
    asymptotic_blindspot, conditional_blindspot, gamma_cell_area_cdf, gamma_cell_area_mean, gamma_cell_area_pdf,
    independent_blindspot_lines,
};
use proptest::prelude::*;

fn grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 100.0).collect()
}

/// Composite Simpson rule on a uniform grid; independent of the crate's
/// adaptive quadrature.
fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn pdf_normalization_and_mean() {
    for lambda0 in [0.01, 0.03, 0.2] {
        let upper = 4.0 / lambda0 * 20.0;
        let pdf = |a: f64| gamma_cell_area_pdf(a, lambda0).unwrap();
        let mass = simpson(pdf, 0.0, upper, 400_000);
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
        let mean = simpson(|a| a * pdf(a), 0.0, upper, 400_000);
        let target = 4.0 / lambda0;
        assert!(((mean - target) / target).abs() < 5e-3, "mean {mean} vs {target}");
        assert!(((gamma_cell_area_mean(lambda0).unwrap() - mean) / mean).abs() < 1e-8);
        assert!((gamma_cell_area_cdf(upper, lambda0).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn asymptotic_matches_simpson_oracle() {
    for lambda in [0.01, 0.05, 0.1] {
        let lambda0 = 0.03;
        let upper = 4.0 / lambda0 * 20.0;
        let oracle = simpson(
            |a| conditional_blindspot(lambda, a, 3).unwrap() * gamma_cell_area_pdf(a, lambda0).unwrap(),
            0.0,
            upper,
            400_000,
        );
        let b = asymptotic_blindspot(lambda, lambda0, 3).unwrap();
        assert!(((b - oracle) / oracle).abs() < 1e-7, "lambda {lambda}: {b} vs {oracle}");
    }
}

#[test]
fn asymptotic_is_monotone_on_grid() {
    let g = grid();
    for &l0 in &g {
        let row: Vec<f64> = g.iter().map(|&l| asymptotic_blindspot(l, l0, 3).unwrap()).collect();
        assert!(
            row.windows(2).all(|w| w[1] < w[0]),
            "decreasing in lambda at lambda0 {l0}"
        );
        assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
    }
    for &l in &g {
        let col: Vec<f64> = g.iter().map(|&l0| asymptotic_blindspot(l, l0, 3).unwrap()).collect();
        assert!(
            col.windows(2).all(|w| w[1] > w[0]),
            "increasing in lambda0 at lambda {l}"
        );
    }
}

#[test]
fn asymptotic_depends_only_on_ratio() {
    for &l in &grid() {
        for &l0 in &[0.02, 0.03, 0.07] {
            let base = asymptotic_blindspot(l, l0, 3).unwrap();
            for t in [0.5, 2.0, 10.0] {
                let scaled = asymptotic_blindspot(t * l, t * l0, 3).unwrap();
                assert!((base - scaled).abs() < 1e-8, "{l} {l0} x{t}: {base} vs {scaled}");
            }
        }
    }
}

#[test]
fn independent_baseline_versus_asymptotic() {
    // P(Poisson(m) <= 2) is concave for small m, so with about one visible
    // anchor on average the independent baseline lies above the average over
    // cell areas; once m is past the inflection it lies below.
    let low = 0.01;
    assert!(independent_blindspot_lines(low, 0.03, 20.0, 3).unwrap() > asymptotic_blindspot(low, 0.03, 3).unwrap());
    for &l in &grid()[1..] {
        let ind = independent_blindspot_lines(l, 0.03, 20.0, 3).unwrap();
        let asym = asymptotic_blindspot(l, 0.03, 3).unwrap();
        assert!(ind < asym, "lambda {l}: {ind} >= {asym}");
    }
}

proptest! {
    #[test]
    fn conditional_monotonicity(lambda in 0.0..0.5f64, area in 0.0..2000.0f64, da in 0.0..100.0f64,
                                dl in 0.0..0.1f64, k in 1u32..8) {
        let base = conditional_blindspot(lambda, area, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(conditional_blindspot(lambda, area + da, k).unwrap() <= base + 1e-15);
        prop_assert!(conditional_blindspot(lambda + dl, area, k).unwrap() <= base + 1e-15);
        prop_assert!(conditional_blindspot(lambda, area, k + 1).unwrap() >= base - 1e-15);
    }

    #[test]
    fn pdf_scale_law(area in 0.0..2000.0f64, l0 in 0.005..0.5f64, l0p in 0.005..0.5f64) {
        let lhs = gamma_cell_area_pdf(area, l0).unwrap();
        let rhs = (l0 / l0p) * gamma_cell_area_pdf(area * l0 / l0p, l0p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs() + 1e-300, "{} vs {}", lhs, rhs);
    }
}
