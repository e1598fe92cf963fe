use splab::experiments::{gen_example, gen_unit_perturbation, ExampleSpec, SplabRng};
use splab::linalg::eig;
use splab::partition::{
    gap_delta0, gap_delta1, gap_delta_lambda, match_partition, partition, MatchStrategy, SpectralSelector,
};
use splab::{Complex64, Matrix, Tolerances};

#[test]
fn delta0_never_exceeds_delta1() {
    for seed in 0..500u64 {
        let mut g = SplabRng::new(seed);
        let n1 = g.range(1, 4);
        let n2 = g.range(1, 4);
        let mut draw =
            |k: usize| -> Vec<Complex64> { (0..k).map(|_| Complex64::new(g.normal(), g.normal())).collect() };
        let (l1, l2) = (draw(n1), draw(n2));
        let (d0, _) = gap_delta0(&l1, &l2);
        let d1 = gap_delta1(&l1, &l2);
        assert!(d0 >= 0.0 && d0 <= d1 * (1.0 + 1e-12), "seed {seed}: {d0} > {d1}");
    }
}

#[test]
fn unpermute_and_zero_perturbation_match() {
    let tol = Tolerances::default();
    for seed in 0..20u64 {
        let mut g = SplabRng::new(seed);
        let n = g.range(3, 8);
        let a = Matrix::from_fn(n, n, |_, _| Complex64::new(g.normal(), g.normal()));
        let ed = eig(&a, &tol).unwrap();
        let sel = SpectralSelector::IndexSet(vec![n - 1, 0]);
        let part = partition(&ed, &sel, &tol).unwrap();
        let back = part.unpermute();
        assert_eq!(back.x, ed.x);
        assert_eq!(back.lambda, ed.lambda);
        assert_eq!(back.v, ed.v);
        let m = match_partition(&ed, &part, &MatchStrategy::NearestAssignment, &tol).unwrap();
        assert_eq!(m.part.lambda1, part.lambda1);
        assert_eq!(m.part.lambda2, part.lambda2);
    }
}

#[test]
fn example_gap_after_unit_perturbations() {
    let tol = Tolerances::default();
    let eps = 1e-4;
    let a = gen_example(&ExampleSpec::Example11 { eps }).unwrap().a;
    let ed = eig(&a, &tol).unwrap();
    let part = partition(&ed, &SpectralSelector::TopKMagnitude(2), &tol).unwrap();
    for i in 1..=3 {
        for j in 1..=3 {
            let at = &a + &gen_unit_perturbation(3, i, j, 1e-6).unwrap();
            let edt = eig(&at, &tol).unwrap();
            let m = match_partition(&edt, &part, &MatchStrategy::NearestAssignment, &tol).unwrap();
            let dl = gap_delta_lambda(&m.part.lambda1, &part.lambda2);
            assert!((dl - (0.5 - eps.sqrt())).abs() <= 1e-3, "({i},{j}): {dl}");
        }
    }
}

#[test]
fn selector_strings_round_trip() {
    for s in ["topk:2", "indices:0,1,4", "disk:1.0+0.0i:0.3:inside"] {
        let sel: SpectralSelector = s.parse().unwrap();
        assert_eq!(sel.to_string().parse::<SpectralSelector>().unwrap(), sel);
    }
    assert!("topk:x".parse::<SpectralSelector>().is_err());
}
