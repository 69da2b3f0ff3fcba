use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use twistcohom::simplicial::data::complex_names;
use twistcohom::simplicial::{
    bundled_cocycle, bundled_complex, coboundary_square, twisted_betti, twisted_coboundary, untwisted_coboundary,
    EdgeCocycle, LocalSystem, LogRational, SimplicialComplex,
};
use twistcohom::{TorusModel, TwistedCalculus};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_potential(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<LogRational> {
    (0..n)
        .map(|_| LogRational::ln(q(rng.random_range(1..=9), rng.random_range(1..=9))))
        .collect()
}

#[test]
fn classical_betti_numbers() {
    let expected = [
        ("circle3", vec![1, 1]),
        ("tetra_boundary", vec![1, 0, 1]),
        ("torus7", vec![1, 2, 1]),
        ("klein12", vec![1, 1, 0]),
        ("rp3_11", vec![1, 0, 0, 1]),
    ];
    for (name, dims) in expected {
        let c = bundled_complex(name).unwrap();
        let r = twisted_betti(&c, &EdgeCocycle::zero(&c), 0.0).unwrap();
        assert_eq!(r.dims, dims, "{name}");
        assert!(r.euler_check() && r.passed);
    }
}

#[test]
fn untwisted_square_is_zero() {
    for name in complex_names() {
        let c = bundled_complex(name).unwrap();
        for k in 0..c.dim().saturating_sub(1) {
            let a = untwisted_coboundary(&c, k);
            assert_eq!(a.compose_max_abs(&untwisted_coboundary(&c, k + 1)), 0.0);
        }
    }
}

#[test]
fn gauge_changes_nothing() {
    let torus = bundled_complex("torus7").unwrap();
    let ln2 = bundled_cocycle("torus7_ln2").unwrap();
    let mut rng = TwistedCalculus::rng(8);
    for _ in 0..5 {
        let p = random_potential(7, &mut rng);
        assert_eq!(
            twisted_betti(&torus, &ln2.vertex_gauge(&p), 0.0).unwrap().dims,
            vec![0, 0, 0]
        );
        let exact = EdgeCocycle::coboundary(&torus, &p);
        assert_eq!(twisted_betti(&torus, &exact, 0.0).unwrap().dims, vec![1, 2, 1]);
    }
    let zero = vec![LogRational::zero(); 7];
    assert_eq!(ln2.vertex_gauge(&zero), ln2);
}

#[test]
fn float_fallback_matches_exact() {
    let torus = bundled_complex("torus7").unwrap();
    let ln2 = bundled_cocycle("torus7_ln2").unwrap();
    let exact = LocalSystem::from_cocycle(&torus, &ln2).unwrap();
    let float = LocalSystem::float_from(&torus, &ln2).unwrap();
    assert!(coboundary_square(&torus, &float) <= 1e-13);
    for k in 0..2 {
        let a = twisted_coboundary(&torus, &exact, k).to_f64();
        let b = twisted_coboundary(&torus, &float, k).to_f64();
        assert!((a - b).amax() < 1e-15);
    }
    // rational twist values force floating weights
    let mut theta = EdgeCocycle::zero(&torus);
    for (&(a, b), v) in ln2.values() {
        let sign = if v.log > q(1, 1) {
            1
        } else if v.log < q(1, 1) {
            -1
        } else {
            0
        };
        theta.set(a, b, LogRational::rational(q(sign, 3)));
    }
    let r = twisted_betti(&torus, &theta, 1e-10).unwrap();
    assert_eq!(r.dims, vec![0, 0, 0]);
    assert_eq!(r.rank_tolerance, 1e-10);
}

#[test]
fn cross_backend_on_the_torus() {
    let torus = bundled_complex("torus7").unwrap();
    let t = TorusModel::new(2, 4).unwrap();
    for (theta, bar) in [
        (EdgeCocycle::zero(&torus), [0.0, 0.0]),
        (bundled_cocycle("torus7_ln2").unwrap(), [2f64.ln(), 0.0]),
    ] {
        let simplicial = twisted_betti(&torus, &theta, 0.0).unwrap().dims;
        let spectral = t.harmonic_dims(&t.twist(&bar, None)).unwrap().dims;
        assert_eq!(simplicial, spectral);
    }
}

#[test]
fn rp3_random_twists_keep_euler() {
    let rp3 = bundled_complex("rp3_11").unwrap();
    let mut rng = TwistedCalculus::rng(3);
    for _ in 0..3 {
        let theta = EdgeCocycle::random_rational(&rp3, &mut rng);
        let r = twisted_betti(&rp3, &theta, 0.0).unwrap();
        assert_eq!(r.euler_characteristic, 0);
        assert!(r.euler_check());
    }
}

#[test]
fn cocycle_file_round_trip() {
    let text = "0 1 ln(2)\n0 2 1/3\n1 2 ln(3/4)-1/3\n";
    let c = EdgeCocycle::parse(text).unwrap();
    assert_eq!(c.to_text(), text);
    assert!(EdgeCocycle::parse("0 1\n").is_err());
    assert!(EdgeCocycle::parse("0 0 1\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_rational_systems(seed in any::<u64>(), which in 0usize..5) {
        let name = complex_names()[which];
        let complex = bundled_complex(name).unwrap();
        let mut rng = TwistedCalculus::rng(seed);
        let theta = EdgeCocycle::random_rational(&complex, &mut rng);
        let rho = LocalSystem::from_cocycle(&complex, &theta).unwrap();
        prop_assert!(rho.is_exact());
        prop_assert_eq!(rho.compatibility_defect(&complex), 0.0);
        prop_assert_eq!(coboundary_square(&complex, &rho), 0.0);
        let r = twisted_betti(&complex, &theta, 0.0).unwrap();
        prop_assert!(r.euler_check());
        let p = random_potential(complex.vertex_count(), &mut rng);
        let gauged = twisted_betti(&complex, &theta.vertex_gauge(&p), 0.0).unwrap();
        prop_assert_eq!(gauged.dims, r.dims);
    }

    #[test]
    fn complex_text_round_trip(n in 3usize..8, seed in any::<u64>()) {
        let mut rng = TwistedCalculus::rng(seed);
        let mut facets: Vec<Vec<usize>> = (0..n).map(|v| vec![v, (v + 1) % n]).collect();
        facets.push(vec![0, rng.random_range(2..n)]);
        facets.dedup();
        if let Ok(c) = SimplicialComplex::build(facets) {
            prop_assert_eq!(SimplicialComplex::parse(&c.to_text()).unwrap(), c);
        }
    }
}
