use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spaceform::weitzenbock::{
    increasing_tuples, random_context, ricci_contract, riemann_constant_curvature, star_involution_sign, verify_suite, weitzenbock_sums,
    Rational, RationalTensorContext, Tensor,
};
use spaceform::Error;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| q(i64::from(i == j))).collect()).collect()
}

/// Integer brute force of the two sums for an orthonormal frame, written out
/// straight from the component formula.
fn brute_force(n: usize, k: i64, alpha: &dyn Fn(&[usize]) -> i64) -> impl Fn(&[usize]) -> i64 + '_ {
    let riemann = move |i: usize, j: usize, l: usize, m: usize| k * (i64::from(i == m && j == l) - i64::from(i == l && j == m));
    let ricci = move |j: usize, l: usize| (0..n).map(|i| riemann(i, j, l, i)).sum::<i64>();
    move |idx: &[usize]| {
        let r = idx.len();
        let mut total = 0;
        for nu in 0..r {
            let sign = if (nu + 1) % 2 == 0 { 1 } else { -1 };
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != nu).map(|(_, &x)| x).collect();
            for h in 0..n {
                let mut args = vec![h];
                args.extend(&rest);
                total += sign * ricci(h, idx[nu]) * alpha(&args);
            }
        }
        for nu in 0..r {
            for mu in 0..nu {
                let sign = if (mu + nu + 2) % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != mu && p != nu).map(|(_, &x)| x).collect();
                for h in 0..n {
                    for i in 0..n {
                        let mut args = vec![i, h];
                        args.extend(&rest);
                        total -= 2 * sign * riemann(h, idx[nu], idx[mu], i) * alpha(&args);
                    }
                }
            }
        }
        total
    }
}

#[test]
fn four_dimensional_two_forms_pick_up_four_alpha() {
    let n = 4;
    let comps = [3, -1, 4, 1, -5, 9];
    let pairs = increasing_tuples(n, 2);
    let alpha_int = |idx: &[usize]| -> i64 {
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            return 0;
        }
        let p = pairs.iter().position(|t| t[..] == [i.min(j), i.max(j)][..]).unwrap();
        if i < j { comps[p] } else { -comps[p] }
    };
    let oracle = brute_force(n, -1, &alpha_int);

    let alpha = Tensor::antisymmetric_from(n, 2, &comps.map(q)).unwrap();
    let ctx = RationalTensorContext::new(identity(n), q(-1), alpha.clone()).unwrap();
    let sums = weitzenbock_sums(&ctx, &riemann_constant_curvature(&ctx)).unwrap();
    for idx in sums.indices() {
        assert_eq!(sums.get(&idx), &q(oracle(&idx)), "{idx:?}");
        assert_eq!(sums.get(&idx), &(alpha.get(&idx) * q(4)));
    }
}

#[test]
fn brute_force_agrees_on_three_forms_in_five_dimensions() {
    let n = 5;
    let triples = increasing_tuples(n, 3);
    let comps: Vec<i64> = (0..triples.len() as i64).map(|i| i * i - 7).collect();
    let alpha = Tensor::antisymmetric_from(n, 3, &comps.iter().map(|&c| q(c)).collect::<Vec<_>>()).unwrap();
    let alpha_int = |idx: &[usize]| -> i64 {
        let v = alpha.get(idx);
        assert!(v.is_integer());
        i64::try_from(v.to_integer()).unwrap()
    };
    let oracle = brute_force(n, -4, &alpha_int);
    let ctx = RationalTensorContext::new(identity(n), q(-4), alpha.clone()).unwrap();
    let sums = weitzenbock_sums(&ctx, &riemann_constant_curvature(&ctx)).unwrap();
    for idx in sums.indices() {
        assert_eq!(sums.get(&idx), &q(oracle(&idx)), "{idx:?}");
    }
}

#[test]
fn rescaling_the_metric_keeps_mixed_quantities() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, k) in [(3, 1), (4, 2), (5, 2)] {
        let ctx = random_context(n, k, &mut rng).unwrap();
        let t = Rational::new(BigInt::from(3), BigInt::from(2));
        let t2 = &t * &t;
        let r = riemann_constant_curvature(&ctx);
        let base_ricci = ricci_contract(&r, &ctx);
        let base = weitzenbock_sums(&ctx, &r).unwrap();

        // same K: mixed Ricci and the Weitzenböck sums are unchanged
        let same = ctx.rescaled(&t, ctx.curvature().clone()).unwrap();
        let rs = riemann_constant_curvature(&same);
        assert_eq!(ricci_contract(&rs, &same).mixed, base_ricci.mixed);
        assert_eq!(weitzenbock_sums(&same, &rs).unwrap(), base);

        // K / t²: the covariant Ricci tensor is unchanged, mixed quantities scale by 1 / t²
        let scaled = ctx.rescaled(&t, ctx.curvature() / &t2).unwrap();
        let rk = riemann_constant_curvature(&scaled);
        let ricci = ricci_contract(&rk, &scaled);
        assert_eq!(ricci.lower, base_ricci.lower);
        let inv = Rational::one() / &t2;
        assert_eq!(weitzenbock_sums(&scaled, &rk).unwrap(), base.scaled(&inv));
    }
}

#[test]
fn suite_passes_and_is_reproducible() {
    let a = verify_suite(4, 10, 7).unwrap();
    assert!(a.all_passed());
    assert_eq!(a.cases.len(), 3 + 4 + 5);
    for c in &a.cases {
        // the opposite sign only holds when both sides vanish
        if c.degree == 0 || c.degree == c.dim {
            assert_eq!(c.positive_sign_matches, c.trials);
        }
    }
    let b = verify_suite(4, 10, 7).unwrap();
    assert_eq!(format!("{:?}", a.cases), format!("{:?}", b.cases));
}

#[test]
fn star_sign_follows_parity() {
    for n in 2..=6 {
        for k in 0..=n {
            let expected = if (k * (n - k)) % 2 == 0 { 1 } else { -1 };
            assert_eq!(star_involution_sign(n, k).unwrap(), expected);
        }
    }
}

#[test]
fn invalid_contexts_are_rejected() {
    let zero = Tensor::zeros(3, 1);
    assert!(matches!(RationalTensorContext::new(identity(3), q(1), zero.clone()), Err(Error::Domain(_))));
    assert!(matches!(RationalTensorContext::new(identity(7), q(-1), Tensor::zeros(7, 1)), Err(Error::Configuration(_))));
    let mut bad_g = identity(3);
    bad_g[0][1] = q(1);
    assert!(matches!(RationalTensorContext::new(bad_g, q(-1), zero.clone()), Err(Error::Invalid(_))));
    let mut indefinite = identity(3);
    indefinite[2][2] = q(-1);
    assert!(matches!(RationalTensorContext::new(indefinite, q(-1), zero), Err(Error::Invalid(_))));
    let mut lopsided = Tensor::zeros(3, 2);
    lopsided.set(&[0, 1], q(1));
    assert!(matches!(RationalTensorContext::new(identity(3), q(-1), lopsided), Err(Error::Precondition(_))));
    assert!(matches!(verify_suite(7, 1, 0), Err(Error::Configuration(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sums_are_antisymmetric_multiples_of_alpha(seed in any::<u64>(), n in 2usize..=4, k_frac in 0.0..1.0f64) {
        let k = ((n + 1) as f64 * k_frac) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_context(n, k, &mut rng).unwrap();
        let sums = weitzenbock_sums(&ctx, &riemann_constant_curvature(&ctx)).unwrap();
        prop_assert!(sums.is_antisymmetric());
        let c = -ctx.curvature() * q((k * (n - k)) as i64);
        prop_assert_eq!(&sums, &ctx.alpha().scaled(&c));
        prop_assert!(c.is_zero() || k * (n - k) > 0);
    }
}
