mod common;

use proptest::prelude::*;
use rand::Rng;

use semired::det_lines::{
    compose, det_complex, det_iso_of_quasi_iso, random_complex, random_homotopic, random_quasi_iso, random_splitting,
    standard_splitting, trivialize_acyclic, trivialize_with, BasedComplex,
};
use semired::PrimeField;

fn complex(rng: &mut rand_chacha::ChaCha8Rng, f: &PrimeField) -> BasedComplex<PrimeField> {
    let n = rng.gen_range(1..=4);
    let h: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    let beta: Vec<usize> = (0..n).map(|i| if i + 1 == n { 0 } else { rng.gen_range(0..=2) }).collect();
    let start = rng.gen_range(-2..=2);
    random_complex(f, rng, start, &h, &beta).unwrap()
}

fn field(rng: &mut rand_chacha::ChaCha8Rng) -> PrimeField {
    PrimeField::new([2, 3, 7, 13][rng.gen_range(0..4)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn homotopic_maps_induce_equal_isomorphisms(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = field(&mut rng);
        let c = complex(&mut rng, &f);
        let (d, phi) = random_quasi_iso(&c, &mut rng, 2).unwrap();
        let psi = random_homotopic(&c, &d, &phi, &mut rng);
        prop_assert_eq!(det_iso_of_quasi_iso(&c, &d, &phi).unwrap().scalar, det_iso_of_quasi_iso(&c, &d, &psi).unwrap().scalar);
    }

    #[test]
    fn isomorphisms_compose(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = field(&mut rng);
        let c = complex(&mut rng, &f);
        let (d, phi) = random_quasi_iso(&c, &mut rng, 2).unwrap();
        let (e, psi) = random_quasi_iso(&d, &mut rng, 2).unwrap();
        let a = det_iso_of_quasi_iso(&c, &d, &phi).unwrap();
        let b = det_iso_of_quasi_iso(&d, &e, &psi).unwrap();
        let ab = det_iso_of_quasi_iso(&c, &e, &compose(&f, &psi, &phi)).unwrap();
        prop_assert_eq!(ab.scalar, a.then(&f, &b).scalar);
    }

    #[test]
    fn parity_is_the_euler_characteristic(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = field(&mut rng);
        let c = complex(&mut rng, &f);
        let euler: i64 = (c.start()..c.end())
            .map(|j| if j.rem_euclid(2) == 0 { 1 } else { -1 } * c.homology_dim(j) as i64)
            .sum();
        prop_assert_eq!(det_complex(&c).parity, euler.rem_euclid(2) == 1);
    }

    #[test]
    fn trivialization_ignores_the_splitting(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = field(&mut rng);
        let n = rng.gen_range(1..=4);
        let beta: Vec<usize> = (0..n).map(|i| if i + 1 == n { 0 } else { rng.gen_range(0..=3) }).collect();
        let c = random_complex(&f, &mut rng, 0, &vec![0; n], &beta).unwrap();
        let base = standard_splitting(&c);
        let t = trivialize_acyclic(&c).unwrap();
        for _ in 0..2 {
            let alt = random_splitting(&c, &base, &mut rng);
            prop_assert_eq!(trivialize_with(&c, &alt).unwrap(), t);
        }
    }
}
