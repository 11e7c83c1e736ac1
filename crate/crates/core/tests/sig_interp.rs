mod common;

use proptest::prelude::*;

use common::sigs::{random_signature, shape_laws, with_signature};
use common::Mltt;
use datatt::interp::{op_inputs, op_output, section_apply, telescope_vars};
use datatt::syntax::Term;
use datatt::typeck::Checker;

#[test]
fn stdlib_signatures_obey_the_laws() {
    let el = common::elaborate_files(&["stdlib/prelude.dtt", "stdlib/list.dtt", "stdlib/vec.dtt"]).unwrap();
    for name in ["Nat", "Vec", "List"] {
        let id = el.env.sig_by_name(name).unwrap();
        shape_laws(&el.env, el.env.sig(id)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn vec_inputs_and_outputs() {
    let el = common::elaborate_files(&["stdlib/prelude.dtt", "stdlib/list.dtt", "stdlib/vec.dtt"]).unwrap();
    let vec = el.env.sig(el.env.sig_by_name("Vec").unwrap());
    let nat = el.env.sig(el.env.sig_by_name("Nat").unwrap());
    assert_eq!(op_inputs(&nat.ops[1], &Term::postulate("N")).len(), 1);
    let cons = &vec.ops[1];
    assert_eq!(op_inputs(cons, &Term::postulate("V")).len(), 4);
    let nu: Vec<Term> = ["T", "n", "t", "ts"].iter().map(|s| Term::postulate(s)).collect();
    let out = op_output(cons, &nu);
    assert_eq!(out[0], nu[0]);
    assert_eq!(out[1], Term::app(Term::global("succ"), nu[1].clone()));
    let nil_out = op_output(&vec.ops[0], &nu[..1]);
    assert_eq!(nil_out, vec![nu[0].clone(), Term::global("zero")]);
    // cons with ν = (T, n, t, ts) samples the section at (T, n) ts.
    let sec = section_apply(&Term::postulate("sigma"), cons, &nu);
    assert_eq!(sec.len(), 5);
    let expected = Term::apps(Term::postulate("sigma"), [nu[0].clone(), nu[1].clone(), nu[3].clone()]);
    assert_eq!(sec[4], Term::lam(expected));
    assert_eq!(telescope_vars(2), vec![Term::Var(1), Term::Var(0)]);
}

#[test]
fn twenty_random_signatures() {
    let m = Mltt::new();
    for seed in 0..20 {
        let sig = random_signature(&m, seed);
        let (env, id) = with_signature(&m, sig.clone());
        Checker::new(&env).check_signature(id).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        shape_laws(&env, &sig).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

proptest! {
    #[test]
    fn random_signatures_obey_the_laws(seed in any::<u64>()) {
        let m = Mltt::new();
        let sig = random_signature(&m, seed);
        let (env, id) = with_signature(&m, sig.clone());
        prop_assert!(Checker::new(&env).check_signature(id).is_ok());
        let r = shape_laws(&env, &sig);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
