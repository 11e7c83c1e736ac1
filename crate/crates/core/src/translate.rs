//! The repr-free translation: every represented data type is replaced by its
//! carrier, constructors by the algebra operations and eliminators by the
//! section of the induction witness. `Repr`, `repr` and `unrepr` disappear.

use std::sync::Arc;

use crate::env::GlobalEnv;
use crate::interp::apps_beta;
use crate::program::{CoreDecl, CoreProgram};
use crate::syntax::{Algebra, OpArg, Operation, Signature, Telescope, Term};
use crate::typeck::{Checker, Ctx, TypeError};

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("`repr {target} as …`: the image has type {found}, expected {expected}")]
    ReprFnType {
        target: String,
        expected: String,
        found: String,
    },
    #[error("`repr {0} as …`: {1}")]
    ReprFn(String, TypeError),
}

/// Translates a term. Default data types are left in place.
pub fn translate(t: &Term) -> Term {
    let r = |t: &Term| Arc::new(translate(t));
    match t {
        Term::Var(_)
        | Term::Universe
        | Term::Unit
        | Term::Tt
        | Term::Global(_)
        | Term::Postulate(_) => t.clone(),
        Term::Pi(a, b) => Term::Pi(r(a), r(b)),
        Term::Lam(b) => Term::Lam(r(b)),
        Term::App(f, a) => Term::App(r(f), r(a)),
        Term::Sigma(a, b) => Term::Sigma(r(a), r(b)),
        Term::Pair(a, b) => Term::Pair(r(a), r(b)),
        Term::Fst(p) => Term::Fst(r(p)),
        Term::Snd(p) => Term::Snd(r(p)),
        Term::SubsetSigma(a, b) => Term::SubsetSigma(r(a), r(b)),
        Term::SubsetPair(a, b) => Term::SubsetPair(r(a), r(b)),
        Term::SubsetFst(p) => Term::SubsetFst(r(p)),
        Term::SubsetSnd(p) => Term::SubsetSnd(r(p)),
        Term::Eq(a, x, y) => Term::Eq(r(a), r(x), r(y)),
        Term::Refl(a) => Term::Refl(r(a)),
        Term::J(m, c, p) => Term::J(r(m), r(c), r(p)),
        Term::ReprTy(a) | Term::ReprTm(a) | Term::UnreprTm(a) => translate(a),
        Term::DataTy { sig, alg, indices } => {
            let indices: Vec<Term> = indices.iter().map(translate).collect();
            match alg {
                Algebra::Default => Term::DataTy {
                    sig: *sig,
                    alg: Algebra::Default,
                    indices,
                },
                Algebra::Custom(spine) => apps_beta(&translate(&spine[0]), &indices),
            }
        }
        Term::Ctor { sig, op, alg, args } => {
            let args: Vec<Term> = args.iter().map(translate).collect();
            match alg {
                Algebra::Default => Term::Ctor {
                    sig: *sig,
                    op: *op,
                    alg: Algebra::Default,
                    args,
                },
                Algebra::Custom(spine) => apps_beta(&translate(&spine[1 + op]), &args),
            }
        }
        Term::Elim {
            sig,
            alg,
            motive,
            methods,
            indices,
            scrutinee,
        } => {
            let methods: Vec<Term> = methods.iter().map(translate).collect();
            let indices: Vec<Term> = indices.iter().map(translate).collect();
            let scrutinee = translate(scrutinee);
            match alg {
                Algebra::Default => Term::Elim {
                    sig: *sig,
                    alg: Algebra::Default,
                    motive: r(motive),
                    methods,
                    indices,
                    scrutinee: Arc::new(scrutinee),
                },
                Algebra::Custom(spine) => {
                    let kappa = translate(spine.last().expect("algebra spine"));
                    let mut args = vec![Term::lams(indices.len() + 1, translate(motive))];
                    args.extend(methods);
                    let section = fst_beta(apps_beta(&kappa, &args));
                    let mut at = indices;
                    at.push(scrutinee);
                    apps_beta(&section, &at)
                }
            }
        }
    }
}

fn fst_beta(t: Term) -> Term {
    match t {
        Term::Pair(a, _) => (*a).clone(),
        t => Term::fst(t),
    }
}

fn translate_telescope(tel: &Telescope) -> Telescope {
    Telescope {
        names: tel.names.clone(),
        types: tel.types.iter().map(translate).collect(),
    }
}

/// Translates the argument and index types of a signature.
pub fn translate_signature(sig: &Signature) -> Signature {
    Signature {
        name: sig.name.clone(),
        indices: translate_telescope(&sig.indices),
        ops: sig
            .ops
            .iter()
            .map(|op| Operation {
                label: op.label.clone(),
                arg_names: op.arg_names.clone(),
                args: op
                    .args
                    .iter()
                    .map(|a| match a {
                        OpArg::Ext(t) => OpArg::Ext(translate(t)),
                        OpArg::Int(ix) => OpArg::Int(ix.iter().map(translate).collect()),
                    })
                    .collect(),
                ret: op.ret.iter().map(translate).collect(),
            })
            .collect(),
    }
}

/// Translates every declaration. `repr f as g` declarations are kept, with
/// their images translated, for code generation to substitute.
pub fn translate_program(p: &CoreProgram) -> CoreProgram {
    CoreProgram {
        sigs: p.sigs.iter().map(translate_signature).collect(),
        decls: p
            .decls
            .iter()
            .map(|d| match d {
                CoreDecl::Def {
                    name,
                    ty,
                    body,
                    params,
                } => CoreDecl::Def {
                    name: name.clone(),
                    ty: translate(ty),
                    body: translate(body),
                    params: *params,
                },
                CoreDecl::Postulate { name, ty } => CoreDecl::Postulate {
                    name: name.clone(),
                    ty: translate(ty),
                },
                CoreDecl::ReprFn { target, image } => CoreDecl::ReprFn {
                    target: target.clone(),
                    image: translate(image),
                },
            })
            .collect(),
    }
}

/// Checks that every `repr f as g` image has the translated type of `f`.
pub fn check_repr_fns(translated: &CoreProgram) -> Result<(), TranslateError> {
    let env = GlobalEnv::from_program(translated);
    let mut ck = Checker::new(&env);
    ck.limit = usize::MAX;
    let ctx = Ctx::new();
    for (target, image) in &env.repr_fns {
        let err = |e| TranslateError::ReprFn(target.clone(), e);
        let expected = ck.global_type(target).map_err(err)?;
        let found = ck.infer(&ctx, image).map_err(err)?;
        if !ck.nbe.conv(0, &expected, &found, None) {
            return Err(TranslateError::ReprFnType {
                target: target.clone(),
                expected: crate::pretty::pretty(&ck.quote(&ctx, &expected), &env.sigs, &[]),
                found: crate::pretty::pretty(&ck.quote(&ctx, &found), &env.sigs, &[]),
            });
        }
    }
    Ok(())
}

/// True when no `Repr`, `repr`, `unrepr` or represented data node occurs.
pub fn is_repr_free(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |s| match s {
        Term::ReprTy(_) | Term::ReprTm(_) | Term::UnreprTm(_) => ok = false,
        Term::DataTy { alg, .. } | Term::Ctor { alg, .. } | Term::Elim { alg, .. } if !alg.is_default() => {
            ok = false
        }
        _ => {}
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::SigId;

    fn nat_alg() -> Algebra {
        let kappa = Term::lams(
            3,
            Term::pair(
                Term::apps(Term::postulate("elim"), [Term::Var(2), Term::Var(1), Term::Var(0)]),
                Term::Tt,
            ),
        );
        Algebra::Custom(Arc::new(vec![
            Term::postulate("N"),
            Term::postulate("z"),
            Term::postulate("s"),
            kappa,
        ]))
    }

    #[test]
    fn repr_forms_vanish() {
        let t = Term::repr(Term::unrepr(Term::Var(0)));
        assert_eq!(translate(&t), Term::Var(0));
        assert_eq!(translate(&Term::repr_ty(Term::Universe)), Term::Universe);
    }

    #[test]
    fn represented_nodes_use_the_algebra() {
        let sig = SigId(0);
        let alg = nat_alg();
        let one = Term::Ctor {
            sig,
            op: 1,
            alg: alg.clone(),
            args: vec![Term::Ctor {
                sig,
                op: 0,
                alg: alg.clone(),
                args: vec![],
            }],
        };
        assert_eq!(
            translate(&one),
            Term::app(Term::postulate("s"), Term::postulate("z"))
        );
        let e = Term::Elim {
            sig,
            alg: alg.clone(),
            motive: Arc::new(Term::Unit),
            methods: vec![Term::Tt, Term::lams(2, Term::Tt)],
            indices: vec![],
            scrutinee: Arc::new(Term::Var(0)),
        };
        let got = translate(&e);
        assert!(is_repr_free(&got));
        assert_eq!(
            got,
            Term::apps(
                Term::postulate("elim"),
                [
                    Term::lam(Term::Unit),
                    Term::Tt,
                    Term::lams(2, Term::Tt),
                    Term::Var(0)
                ]
            )
        );
    }
}
