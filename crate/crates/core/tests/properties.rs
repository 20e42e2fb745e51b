use gwasym::empirics::{monotone_from, ratio_extrapolate, root_increases, Sequence};
use gwasym::numerics::{gamma_half_integer, to_real, ExactRational, Parity, ParityReal, Precision};
use gwasym::recursions::{model_closed_form, model_recursion, p2_kernel, p3_kernel, ModelSpec};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::from((n, d))
}

proptest! {
    #[test]
    fn plane_kernel_symmetric_and_positive(d1 in 1u64..200, d2 in 1u64..200) {
        let a = p2_kernel(d1, d2).unwrap();
        prop_assert_eq!(&a, &p2_kernel(d2, d1).unwrap());
        prop_assert!(a > 0);
    }

    #[test]
    fn space_kernel_vanishes_outside_binomial_support(d1 in 1u64..8, d2 in 1u64..8, p1 in 0u64..17, p2 in 0u64..17) {
        let (d, p) = (d1 + d2, p1 + p2);
        prop_assume!(p1 <= 2 * d1 && p2 <= 2 * d2 && p > 1 && p < 2 * d);
        let k = p3_kernel(d1, d2, p1, p2).unwrap();
        if 2 * d1 < p1 + 1 {
            prop_assert_eq!(k, 0);
        }
    }

    #[test]
    fn model_closed_form_matches_recursion(
        an in 1i64..6, ad in 1i64..6, k in 0u32..5, nn in 1i64..6, nd in 1i64..6,
    ) {
        let spec = ModelSpec::new(q(an, ad), k, q(nn, nd)).unwrap();
        prop_assert_eq!(model_closed_form(&spec, 16), model_recursion(&spec, 16));
    }

    #[test]
    fn root_comparison_agrees_with_floats(n in 1i64..10_000, m in 1i64..10_000, den in 1i64..50, d in 1usize..30) {
        let a = q(n, den);
        let b = q(m, den);
        let prec = Precision::new(256).unwrap();
        let lhs = Float::with_val(256, to_real(&a, prec).ln() / d as u32);
        let rhs = Float::with_val(256, to_real(&b, prec).ln() / (d + 1) as u32);
        let gap = Float::with_val(256, &rhs - &lhs).abs();
        prop_assume!(gap > 1e-30);
        prop_assert_eq!(root_increases(&a, &b, d), rhs > lhs);
    }

    #[test]
    fn geometric_ratio_is_exact(num in 1i64..20, den in 1i64..20, order in 0usize..6) {
        let b = q(num, den);
        let mut values = Vec::new();
        let mut x = q(3, 7);
        for _ in 0..(order + 6) {
            values.push(x.clone());
            x *= &b;
        }
        let est = ratio_extrapolate(&Sequence::new(1, values), order, Precision::new(128).unwrap()).unwrap();
        prop_assert_eq!(est.exact, b);
    }

    #[test]
    fn gamma_recurrence(m in 0u32..60) {
        let prec = Precision::new(200).unwrap();
        let lhs = gamma_half_integer(m + 1, prec);
        let rhs = Float::with_val(200, gamma_half_integer(m, prec) * (m as f64 + 0.5));
        let rel = Float::with_val(200, Float::with_val(200, &lhs - &rhs) / &lhs).abs();
        prop_assert!(rel < 1e-55);
    }

    #[test]
    fn parity_product_rules(x in -1e6f64..1e6, y in -1e6f64..1e6, px in any::<bool>(), py in any::<bool>()) {
        let par = |b: bool| if b { Parity::Imaginary } else { Parity::Real };
        let a = ParityReal::new(Float::with_val(128, x), par(px));
        let b = ParityReal::new(Float::with_val(128, y), par(py));
        let prod = a.mul(&b);
        let expected_parity = if px ^ py { Parity::Imaginary } else { Parity::Real };
        prop_assert_eq!(prod.parity, expected_parity);
        let sign = if px && py { -1.0 } else { 1.0 };
        prop_assert_eq!(prod.value.to_f64(), sign * x * y);
        prop_assume!(y != 0.0);
        let back = prod.div(&b);
        prop_assert_eq!(back.parity, a.parity);
        let rel = ((back.value.to_f64() - x) / x.abs().max(1e-300)).abs();
        prop_assert!(rel < 1e-12);
    }
}

#[test]
fn catalan_roots_increase_from_the_start() {
    let spec = ModelSpec::new(q(1, 1), 0, q(1, 1)).unwrap();
    let seq = Sequence::new(1, model_closed_form(&spec, 80));
    assert_eq!(monotone_from(&seq).unwrap(), Some(1));
}

#[test]
fn ratio_recovers_growth_of_power_corrected_sequence() {
    // n_d = 5^{−d}·d^{−7/2}, stored to 1200 bits.
    let d_max = 300usize;
    let values: Vec<ExactRational> = (1..=d_max)
        .map(|d| {
            let x = Float::with_val(1200, d).pow(-3.5f64) / Float::with_val(1200, 5).pow(d as u32);
            x.to_rational().unwrap()
        })
        .collect();
    let est = ratio_extrapolate(&Sequence::new(1, values), 3, Precision::new(256).unwrap()).unwrap();
    let err = Float::with_val(256, &est.b - 0.2f64).abs();
    assert!(err < 1e-8, "error {err}");
}
