use proptest::prelude::*;

use hyperdelta::delta::{
    delta_1d_integrate, delta_affine_integrate, delta_affine_integrate_on_chart, delta_product_integrate,
    AffineFactorization, AffineFunction, HyperplaneChart, IntegrationConfig, Method, TestFunction,
};
use hyperdelta::poly::RootPoly;

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300)
}

fn nonzero_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, dim).prop_filter("tiny gradient", |g| g.iter().map(|x| x * x).sum::<f64>() > 0.1)
}

fn affine(dim: usize) -> impl Strategy<Value = AffineFunction> {
    (nonzero_vec(dim), -1.5..1.5f64).prop_map(|(g, c)| AffineFunction::new(g, c).unwrap())
}

fn gaussian(dim: usize) -> impl Strategy<Value = TestFunction> {
    (prop::collection::vec(-1.0..1.0f64, dim), 0.5..1.5f64)
        .prop_map(|(c, w)| TestFunction::gaussian(c, w).unwrap())
}

fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rescaling_divides_by_the_factor(
        (f, phi) in (2usize..=4).prop_flat_map(|d| (affine(d), gaussian(d))),
        lambda in prop_oneof![-4.0..-0.25f64, 0.25..4.0f64],
    ) {
        let cfg = IntegrationConfig::default();
        let base = delta_affine_integrate(&f, &phi, &cfg).unwrap().value;
        let scaled = delta_affine_integrate(&f.scaled(lambda).unwrap(), &phi, &cfg).unwrap().value;
        prop_assert!(close(scaled * lambda.abs(), base, 1e-9), "{scaled} * |{lambda}| vs {base}");
        prop_assert!(base >= 0.0);
    }

    #[test]
    fn parallel_products_reduce_to_the_line(
        dim in 1usize..=3,
        offsets in prop::collection::vec(-2.0..2.0f64, 1..=4)
            .prop_filter("offsets too close", |c| c.iter().enumerate().all(|(i, x)| c[i + 1..].iter().all(|y| (x - y).abs() > 0.1))),
        scales in prop::collection::vec(prop_oneof![-2.0..-0.5f64, 0.5..2.0f64], 4),
        seed in any::<u64>(),
        width in 0.5..1.5f64,
    ) {
        // all factors share the unit normal e, so only t = e·y matters and
        // φ pushes forward to N(e·centre, width²)
        let mut e: Vec<f64> = (0..dim).map(|k| ((seed >> (8 * k)) as u8 as f64) - 127.5).collect();
        let len = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(len > 1.0);
        e.iter_mut().for_each(|x| *x /= len);
        let centre: Vec<f64> = (0..dim).map(|k| 0.3 * k as f64 - 0.2).collect();
        let phi = TestFunction::gaussian(centre.clone(), width).unwrap();
        let factors: Vec<AffineFunction> = offsets
            .iter()
            .zip(&scales)
            .map(|(&c, &s)| AffineFunction::new(e.iter().map(|x| s * x).collect(), s * c).unwrap())
            .collect();
        let fac = AffineFactorization::new(factors.clone()).unwrap();
        let value = delta_product_integrate(&fac, &phi, &IntegrationConfig::default()).unwrap().value;

        let leading: f64 = scales[..offsets.len()].iter().product();
        let line = RootPoly::a_family(leading, offsets.iter().map(|c| -c).collect()).unwrap();
        let mean: f64 = e.iter().zip(&centre).map(|(a, b)| a * b).sum();
        let expected = delta_1d_integrate(&line, |t| normal_pdf(t, mean, width)).unwrap();
        prop_assert!(close(value, expected, 1e-9), "{value} vs {expected}");

        let mut reversed = factors;
        reversed.reverse();
        let again = delta_product_integrate(&AffineFactorization::new(reversed).unwrap(), &phi, &IntegrationConfig::default())
            .unwrap()
            .value;
        prop_assert!(close(value, again, 1e-12), "{value} vs {again}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chart_choice_does_not_matter(f in affine(3), phi in gaussian(3), turn in 0.0..std::f64::consts::TAU) {
        let cfg = IntegrationConfig { rel_tol: 1e-9, ..IntegrationConfig::default() }.with_method(Method::Quadrature);
        let chart = HyperplaneChart::new(&f);
        let (b0, b1) = (&chart.basis()[0], &chart.basis()[1]);
        let (s, c) = turn.sin_cos();
        let rotated = vec![
            b0.iter().zip(b1).map(|(x, y)| c * x + s * y).collect(),
            b0.iter().zip(b1).map(|(x, y)| c * y - s * x).collect(),
        ];
        let other = HyperplaneChart::with_basis(&f, rotated).unwrap();
        let v1 = delta_affine_integrate_on_chart(&f, &chart, &phi, &cfg).unwrap().value;
        let v2 = delta_affine_integrate_on_chart(&f, &other, &phi, &cfg).unwrap().value;
        let exact = delta_affine_integrate(&f, &phi, &IntegrationConfig::default()).unwrap().value;
        prop_assert!(close(v1, v2, 1e-7), "{v1} vs {v2}");
        prop_assert!(close(v1, exact, 1e-7), "{v1} vs {exact}");
    }
}
