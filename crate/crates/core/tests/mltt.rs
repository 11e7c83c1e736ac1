mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{checker_context, naive_nf, nbe_nf, Mltt, Sample, TermGen};
use datatt::env::GlobalEnv;
use datatt::translate::{is_repr_free, translate, translate_program};
use datatt::typeck::Checker;

fn sample(m: &Mltt, seed: u64) -> (common::Ty, Sample) {
    TermGen {
        m,
        rng: ChaCha8Rng::seed_from_u64(seed),
    }
    .sample(30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_terms_are_well_typed(seed in any::<u64>()) {
        let m = Mltt::new();
        let (ty, t) = sample(&m, seed);
        let ck = Checker::new(&m.env);
        let ctx = checker_context(&m, &ck);
        let tyv = ck.eval(&ctx, &ty.term(&m));
        let r = ck.check(&ctx, &t.checkable, &tyv);
        prop_assert!(r.is_ok(), "{:?} : {:?}: {:?}", t.checkable, ty, r);
        prop_assert_eq!(nbe_nf(&m, &m.env, &t.checkable), nbe_nf(&m, &m.env, &t.term));
    }

    #[test]
    fn nbe_agrees_with_substitution(seed in any::<u64>()) {
        let m = Mltt::new();
        let t = sample(&m, seed).1.term;
        prop_assert_eq!(nbe_nf(&m, &m.env, &t), naive_nf(&m.program, &t));
    }

    #[test]
    fn translation_preserves_normal_forms(seed in any::<u64>()) {
        let m = Mltt::new();
        let t = sample(&m, seed).1.term;
        let rt = translate(&t);
        prop_assert!(is_repr_free(&rt));
        let renv = GlobalEnv::from_program(&translate_program(&m.program));
        prop_assert_eq!(nbe_nf(&m, &renv, &rt), nbe_nf(&m, &m.env, &t));
    }

    #[test]
    fn normal_forms_are_stable(seed in any::<u64>()) {
        let m = Mltt::new();
        let t = sample(&m, seed).1.term;
        let n = naive_nf(&m.program, &t);
        prop_assert_eq!(naive_nf(&m.program, &n), n.clone());
        prop_assert_eq!(nbe_nf(&m, &m.env, &n), n);
    }
}

#[test]
fn samples_are_varied() {
    let m = Mltt::new();
    let sizes: Vec<usize> = (0..200).map(|s| sample(&m, s).1.term.size()).collect();
    assert!(sizes.iter().all(|&s| s <= 30));
    assert!(sizes.iter().any(|&s| s >= 15), "{sizes:?}");
    let redexes = (0..200)
        .filter(|&s| {
            let t = sample(&m, s).1.term;
            naive_nf(&m.program, &t) != t
        })
        .count();
    assert!(redexes >= 50, "only {redexes} samples reduce");
}

