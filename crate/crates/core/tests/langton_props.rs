mod common;

use proptest::prelude::*;
use rand::Rng;

use semired::catalog::random_initial_model;
use semired::hilbert_poly::TruncatedOrder;
use semired::langton::{flip, langton_run_from, LangtonConfig};
use semired::lattice_model::reduction;
use semired::quiver::{is_semistable, StabilityData};
use semired::Matrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flips_preserve_dimensions_and_invert_up_to_pi(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let b = common::backend(&mut rng);
        let rep = common::rep(&mut rng, &b, 3);
        let model = random_initial_model(&rep, &mut rng).unwrap();
        let red = reduction(&model).unwrap();
        let p = red.field().characteristic();
        let v = rng.gen_range(0..red.dims().len());
        let gens: Vec<Matrix<u32>> = red
            .dims()
            .iter()
            .enumerate()
            .map(|(u, &d)| Matrix::from_fn(d, usize::from(u == v), |_, _| rng.gen_range(0..p)))
            .collect();
        let b0 = red.generated_subrep(&gens);
        let step = flip(&model, &b0).unwrap();
        prop_assert_eq!(step.output_reduction.dims(), red.dims());
        for u in 0..red.dims().len() {
            prop_assert_eq!(step.quotient.dims()[u] + step.destabilizing_rep.dims()[u], step.output_reduction.dims()[u]);
        }
        let back = flip(&step.output, &step.kernel_witness()).unwrap();
        prop_assert_eq!(back.output, model.scale(1));
    }

    #[test]
    fn traces_satisfy_the_termination_invariants(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let b = common::backend(&mut rng);
        let rep = common::rep(&mut rng, &b, 2);
        let arity = rng.gen_range(1..=2);
        let theta = (0..arity).map(|_| (0..rep.dims().len()).map(|_| rng.gen_range(-1..=2)).collect()).collect();
        let s = StabilityData::with_unit_denominator(theta).unwrap();
        let start = random_initial_model(&rep, &mut rng).unwrap();
        let trace = langton_run_from(&start, &s, LangtonConfig { cap: 24, ..LangtonConfig::default() }).unwrap();
        prop_assert!(trace.codimension_monotone());
        prop_assert!(trace.destabilizer_monotone());
        if trace.terminated() {
            let fresh = reduction(&trace.final_model).unwrap();
            let verdict = is_semistable(&fresh, &s, s.arity(), TruncatedOrder::Lexicographic, 1 << 20).unwrap();
            prop_assert!(verdict.semistable);
        }
    }
}
