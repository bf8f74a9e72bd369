use hegy_core::boot_block::{draw_block_starts, seasonal_block_resample, Taper};
use hegy_core::boot_iid::{bootstrap_model, resample_seasonal_iid_indices};
use hegy_core::bootstrap::{bootstrap_decision, PValueRule};
use hegy_core::hegy::{
    augmented_hegy, seasonal_regression, truncate_pi, unaugmented_hegy, Hypothesis,
    SeasonalRegressionOptions, Tail,
};
use hegy_core::linreg::{
    f_statistic, ols_fit, stepwise_t_prune, stepwise_vif_prune, t_statistic, DesignMatrix,
};
use hegy_core::series::{
    ar_recursion, hegy_transform, multiply_polynomials, seasonal_difference, LagPolynomial,
    QuarterlySeries,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn seasonal_walk(seed: u64, n: usize) -> QuarterlySeries {
    let y = ar_recursion(
        &LagPolynomial::monic_binomial(4, 1.0),
        &normals(seed, n),
        &[0.0; 4],
    )
    .unwrap();
    QuarterlySeries::from_values(y).unwrap()
}

fn design(seed: u64, n: usize, p: usize) -> (DesignMatrix, Vec<f64>) {
    let v = normals(seed, n * (p + 1));
    let cols = (0..p)
        .map(|j| (format!("x{j}"), v[j * n..(j + 1) * n].to_vec()))
        .collect();
    (
        DesignMatrix::from_columns(cols).unwrap(),
        v[p * n..].to_vec(),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}

fn poly() -> impl Strategy<Value = LagPolynomial> {
    prop::collection::vec(-2.0f64..2.0, 1..6).prop_map(LagPolynomial::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seasonal_difference_inverts_the_seasonal_recursion(v in prop::collection::vec(-10.0f64..10.0, 5..80)) {
        let y = ar_recursion(&LagPolynomial::monic_binomial(4, 1.0), &v, &[0.0; 4]).unwrap();
        let d = seasonal_difference(&QuarterlySeries::from_values(y).unwrap()).unwrap();
        for (a, b) in d.values().iter().zip(&v[4..]) {
            prop_assert!(close(*a, *b, 1e-12) || (a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_product_algebra(a in poly(), b in poly(), c in poly()) {
        let ab = multiply_polynomials(&a, &b);
        let ba = multiply_polynomials(&b, &a);
        prop_assert_eq!(ab.degree(), a.degree() + b.degree());
        for (x, y) in ab.coefficients().iter().zip(ba.coefficients()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        let l = multiply_polynomials(&ab, &c);
        let r = multiply_polynomials(&a, &multiply_polynomials(&b, &c));
        for (x, y) in l.coefficients().iter().zip(r.coefficients()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn channel_selectivity(years in 2usize..30, amp in 0.1f64..10.0) {
        let n = 4 * years;
        let mk = |f: &dyn Fn(usize) -> f64| {
            hegy_transform(&QuarterlySeries::from_values((1..=n).map(f).collect()).unwrap()).unwrap()
        };
        let nonzero = |r: &hegy_core::series::HegyRegressors| -> Vec<bool> {
            r.series.iter().map(|s| s.values().iter().any(|v| v.abs() > 1e-9)).collect()
        };
        let constant = mk(&|_| amp);
        prop_assert_eq!(nonzero(&constant), vec![true, false, false, false]);
        let alt = mk(&|t| if t % 2 == 0 { amp } else { -amp });
        prop_assert_eq!(nonzero(&alt), vec![false, true, false, false]);
        let annual = mk(&|t| amp * (std::f64::consts::FRAC_PI_2 * t as f64).sin());
        let nz = nonzero(&annual);
        prop_assert!(!nz[0] && !nz[1] && (nz[2] || nz[3]));
    }

    #[test]
    fn y3_lags_y4(v in prop::collection::vec(-5.0f64..5.0, 8..60)) {
        let r = hegy_transform(&QuarterlySeries::from_values(v).unwrap()).unwrap();
        let y3 = r.series[2].values();
        let y4 = r.series[3].values();
        for t in 1..y3.len() {
            prop_assert!((y3[t] - y4[t - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn ols_permutation_invariance(seed in any::<u64>(), p in 1usize..6, shift in 0usize..5) {
        let n = 12 + p;
        let (x, y) = design(seed, n, p);
        let fit = ols_fit(&x, &y).unwrap();
        let names = x.names().to_vec();
        let perm: Vec<(String, Vec<f64>)> = (0..p)
            .map(|i| {
                let j = (i + shift) % p;
                (names[j].clone(), x.column(j).to_vec())
            })
            .collect();
        let xp = DesignMatrix::from_columns(perm).unwrap();
        let fp = ols_fit(&xp, &y).unwrap();
        for name in &names {
            prop_assert!(close(fit.coefficient(name).unwrap(), fp.coefficient(name).unwrap(), 1e-10));
            prop_assert!(close(t_statistic(&fit, name).unwrap(), t_statistic(&fp, name).unwrap(), 1e-10));
        }
    }

    #[test]
    fn ols_scale_equivariance(seed in any::<u64>(), p in 1usize..6, c in 0.01f64..100.0) {
        let (x, y) = design(seed, 15, p);
        let fit = ols_fit(&x, &y).unwrap();
        let mut cols: Vec<(String, Vec<f64>)> = x
            .names()
            .iter()
            .enumerate()
            .map(|(j, n)| (n.clone(), x.column(j).to_vec()))
            .collect();
        for v in cols[0].1.iter_mut() {
            *v *= c;
        }
        let xs = DesignMatrix::from_columns(cols).unwrap();
        let fs = ols_fit(&xs, &y).unwrap();
        prop_assert!(close(fs.coefficients[0] * c, fit.coefficients[0], 1e-8));
        prop_assert!(close(t_statistic(&fs, "x0").unwrap(), t_statistic(&fit, "x0").unwrap(), 1e-8));
    }

    #[test]
    fn ols_contract(seed in any::<u64>(), p in 1usize..6, extra in 2usize..20) {
        let (x, y) = design(seed, p + extra, p);
        let fit = ols_fit(&x, &y).unwrap();
        let e = &fit.residuals;
        let enorm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..p {
            let col = x.column(j);
            let xn = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dot: f64 = col.iter().zip(e).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() <= 1e-8 * xn * enorm.max(1e-300));
            let f = f_statistic(&fit, &[x.names()[j].as_str()]).unwrap();
            let t = t_statistic(&fit, &x.names()[j]).unwrap();
            prop_assert!(close(f, t * t, 1e-10));
        }
        prop_assert!(close(fit.rss, e.iter().map(|v| v * v).sum(), 1e-10));
        for i in 0..p {
            prop_assert!(fit.cov(i, i) > 0.0);
            for j in 0..p {
                prop_assert_eq!(fit.cov(i, j), fit.cov(j, i));
            }
        }
    }

    #[test]
    fn stepwise_procedures_are_deterministic(seed in any::<u64>()) {
        let (x, y) = design(seed, 30, 5);
        let a = stepwise_t_prune(&x, &y, &["x2", "x3", "x4"], 1.65).unwrap();
        let b = stepwise_t_prune(&x, &y, &["x2", "x3", "x4"], 1.65).unwrap();
        prop_assert_eq!(&a.removed, &b.removed);
        prop_assert_eq!(a.fit, b.fit);
        let a = stepwise_vif_prune(&x, 1.05, &[]).unwrap();
        let b = stepwise_vif_prune(&x, 1.05, &[]).unwrap();
        prop_assert_eq!(a.removed, b.removed);
    }

    #[test]
    fn unaugmented_equals_augmented_without_lags(seed in any::<u64>(), years in 6usize..50) {
        let y = seasonal_walk(seed, 4 * years);
        prop_assert_eq!(augmented_hegy(&y, 0, false).unwrap(), unaugmented_hegy(&y).unwrap());
    }

    #[test]
    fn pruning_retains_a_subset(seed in any::<u64>(), k in 1usize..6) {
        let y = seasonal_walk(seed, 160);
        let full = augmented_hegy(&y, k, false).unwrap();
        prop_assert_eq!(&full.retained_lags, &(1..=k).collect::<Vec<_>>());
        let pruned = augmented_hegy(&y, k, true).unwrap();
        prop_assert!(pruned.retained_lags.iter().all(|l| full.retained_lags.contains(l)));
        prop_assert!(pruned.f.f12 >= 0.0 && pruned.f.f34 >= 0.0 && pruned.f.f1234 >= 0.0);
    }

    #[test]
    fn truncated_fit_is_nonpositive(seed in any::<u64>(), aug in any::<bool>()) {
        let y = seasonal_walk(seed, 160);
        let opts = if aug {
            SeasonalRegressionOptions::augmented(4, &[1])
        } else {
            SeasonalRegressionOptions::unaugmented()
        };
        let fit = truncate_pi(&seasonal_regression(&y, &opts).unwrap());
        for s in 0..4 {
            for j in 0..3 {
                prop_assert!(fit.pi[s][j] <= 0.0);
            }
            prop_assert_eq!(fit.residuals[s].len(), fit.times[s].len());
        }
    }

    #[test]
    fn null_is_imposed_in_the_generation_model(seed in any::<u64>(), h in 0usize..7) {
        let h = Hypothesis::ALL[h];
        let model = bootstrap_model(&seasonal_walk(seed, 120), h, 4).unwrap();
        for s in 0..4 {
            for &j in h.root_set() {
                prop_assert_eq!(model.pi[s][j - 1], 0.0);
            }
        }
    }

    #[test]
    fn seasonal_iid_draws_stay_in_season(seed in any::<u64>(), start in 1u8..=4) {
        let v = normals(seed, 120);
        let y = QuarterlySeries::new(
            ar_recursion(&LagPolynomial::monic_binomial(4, 1.0), &v, &[0.0; 4]).unwrap(),
            start,
        )
        .unwrap();
        let model = bootstrap_model(&y, Hypothesis::Root1, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let draws = resample_seasonal_iid_indices(&model, 120, &mut rng).unwrap();
        for (p, (season, i)) in draws.into_iter().enumerate() {
            prop_assert_eq!(season, y.season_of(p + 1));
            prop_assert!(i < model.residuals[season as usize - 1].len());
        }
    }

    #[test]
    fn block_resample_keeps_seasons(seed in any::<u64>(), n in 4usize..200, b in 1usize..40, taper in any::<bool>()) {
        prop_assume!(b <= n);
        let v: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (t, start, len) in draw_block_starts(n, b, &mut rng).unwrap() {
            prop_assert_eq!(start % 4, t % 4);
            prop_assert!(start + len - 1 <= n);
        }
        let taper = if taper { Taper::default() } else { Taper::None };
        let out = seasonal_block_resample(&v, b, taper, &mut rng).unwrap();
        prop_assert_eq!(out.len(), n);
        if taper == Taper::None {
            for (p, x) in out.iter().enumerate() {
                prop_assert_eq!((*x as usize) % 4, (p + 1) % 4);
            }
        }
    }

    #[test]
    fn pvalues_agree_with_decisions(
        obs in -5.0f64..5.0,
        reps in prop::collection::vec(-5.0f64..5.0, 1..300),
        level in 0.01f64..0.5,
        left in any::<bool>(),
    ) {
        let tail = if left { Tail::Left } else { Tail::Right };
        let (p, reject) = bootstrap_decision(obs, &reps, tail, PValueRule::Smoothed, level);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert_eq!(reject, p <= level);
        let extreme = reps.iter().filter(|&&r| if left { r <= obs } else { r >= obs }).count();
        prop_assert!((p - (1.0 + extreme as f64) / (reps.len() as f64 + 1.0)).abs() < 1e-15);
        let (p, reject) = bootstrap_decision(obs, &reps, tail, PValueRule::PaperCount, level);
        prop_assert!((0.0..=1.0).contains(&p));
        let count = reps.iter().filter(|&&r| if left { obs <= r } else { obs >= r }).count();
        prop_assert_eq!(reject, count as f64 > reps.len() as f64 * (1.0 - level));
    }
}
