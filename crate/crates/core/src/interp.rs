//! Signature interpretation: algebras, displayed algebras, coherence,
//! induction types and inductive-algebra telescopes, built as core syntax.
//!
//! Every builder takes its term arguments in an ambient context Γ and returns
//! telescopes or types in Γ. Signatures are closed, so their components only
//! refer to the arguments of their own operation.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::syntax::{
    instantiate, map_vars, shift, subst1, OpArg, Operation, Signature, Telescope, Term,
};

/// `[Var(n-1), …, Var(0)]`: the variables of a telescope of length `n`, in
/// telescope order.
pub fn telescope_vars(n: usize) -> Vec<Term> {
    (0..n).rev().map(Term::Var).collect()
}

/// Applies `f` to `args`, contracting head β-redexes.
pub fn apps_beta(f: &Term, args: &[Term]) -> Term {
    let mut head = f.clone();
    let mut rest = args;
    while let (Term::Lam(body), [a, tail @ ..]) = (&head, rest) {
        head = subst1(body, a);
        rest = tail;
    }
    Term::apps(head, rest.iter().cloned())
}

/// Right-nested Σ over a telescope, ending in ⊤.
pub fn sigmas(tel: &Telescope) -> Term {
    tel.types
        .iter()
        .rev()
        .fold(Term::Unit, |acc, t| Term::sigma(t.clone(), acc))
}

/// Right-nested tuple matching [`sigmas`].
pub fn tuple(items: &[Term]) -> Term {
    items
        .iter()
        .rev()
        .fold(Term::Tt, |acc, t| Term::pair(t.clone(), acc))
}

/// Projects entry `k` out of a right-nested tuple.
pub fn tuple_get(t: Term, k: usize) -> Term {
    let mut t = t;
    for _ in 0..k {
        t = Term::snd(t);
    }
    Term::fst(t)
}

/// Moves a term scoped over Γ and the first `k` operation arguments into
/// Γ extended by `len` entries, where argument `a` sits at entry `pos[a]`.
fn relocate(t: &Term, k: usize, pos: &[usize], len: usize) -> Term {
    map_vars(t, 0, &|i, d| {
        if i < d {
            return Term::Var(i);
        }
        let j = i - d;
        if j < k {
            Term::Var(d + len - 1 - pos[k - 1 - j])
        } else {
            Term::Var(d + j - k + len)
        }
    })
}

/// `O^IN X`: one entry per argument, recursive ones read as `X δ`.
pub fn op_inputs(op: &Operation, carrier: &Term) -> Telescope {
    let mut tel = Telescope::new();
    for (k, (name, arg)) in op.arg_names.iter().zip(&op.args).enumerate() {
        let ty = match arg {
            OpArg::Ext(a) => a.clone(),
            OpArg::Int(ix) => apps_beta(&shift(carrier, k, 0), ix),
        };
        tel.push(name.clone(), ty);
    }
    tel
}

/// `{O} ν^OUT`: the return indices with the inputs substituted.
pub fn op_output(op: &Operation, inputs: &[Term]) -> Vec<Term> {
    op.ret.iter().map(|r| instantiate(r, inputs)).collect()
}

/// `S^A X`: one entry `(ν :: O^IN X) → X ν^OUT` per operation.
pub fn algebra_telescope(sig: &Signature, carrier: &Term) -> Telescope {
    let mut tel = Telescope::new();
    for (i, op) in sig.ops.iter().enumerate() {
        let x = shift(carrier, i, 0);
        let inputs = op_inputs(op, &x);
        let body = apps_beta(&shift(&x, inputs.len(), 0), &op.ret);
        tel.push(op.label.clone(), Term::pis(&inputs, body));
    }
    tel
}

/// Displayed inputs of an operation together with the position of every
/// argument inside them.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplayedInputs {
    pub tel: Telescope,
    pub positions: Vec<usize>,
}

impl DisplayedInputs {
    /// The input spine `ν` inside the displayed context, dropping the
    /// hypotheses.
    pub fn plain_vars(&self) -> Vec<Term> {
        let len = self.tel.len();
        self.positions
            .iter()
            .map(|p| Term::Var(len - 1 - p))
            .collect()
    }
}

/// `O^DI`: like [`op_inputs`] but every recursive `x : X δ` is followed by a
/// lazy hypothesis `⊤ → Y δ x`.
pub fn displayed_inputs(op: &Operation, carrier: &Term, motive: &Term) -> DisplayedInputs {
    let mut tel = Telescope::new();
    let mut positions = Vec::with_capacity(op.arity());
    for (k, (name, arg)) in op.arg_names.iter().zip(&op.args).enumerate() {
        let cur = tel.len();
        match arg {
            OpArg::Ext(a) => {
                tel.push(name.clone(), relocate(a, k, &positions, cur));
                positions.push(cur);
            }
            OpArg::Int(ix) => {
                let idx: Vec<Term> = ix.iter().map(|t| relocate(t, k, &positions, cur)).collect();
                tel.push(name.clone(), apps_beta(&shift(carrier, cur, 0), &idx));
                positions.push(cur);
                let mut args: Vec<Term> = idx.iter().map(|t| shift(t, 1, 0)).collect();
                args.push(Term::Var(0));
                let hyp = apps_beta(&shift(motive, cur + 1, 0), &args);
                tel.push(format!("{name}-ih"), Term::arrow(Term::Unit, hyp));
            }
        }
    }
    DisplayedInputs { tel, positions }
}

/// `O^DO`: the indices and scrutinee a method returns at, inside the
/// displayed context.
pub fn displayed_output(op: &Operation, alg_op: &Term, shape: &DisplayedInputs) -> (Vec<Term>, Term) {
    let len = shape.tel.len();
    let idx = op
        .ret
        .iter()
        .map(|r| relocate(r, op.arity(), &shape.positions, len))
        .collect();
    let scrut = apps_beta(&shift(alg_op, len, 0), &shape.plain_vars());
    (idx, scrut)
}

/// `α^D Y`: the method telescope of a displayed algebra.
pub fn displayed_telescope(sig: &Signature, carrier: &Term, alg: &[Term], motive: &Term) -> Telescope {
    let mut tel = Telescope::new();
    for (i, op) in sig.ops.iter().enumerate() {
        let x = shift(carrier, i, 0);
        let y = shift(motive, i, 0);
        let a = shift(&alg[i], i, 0);
        let shape = displayed_inputs(op, &x, &y);
        let (mut idx, scrut) = displayed_output(op, &a, &shape);
        idx.push(scrut);
        let body = apps_beta(&shift(&y, shape.tel.len(), 0), &idx);
        tel.push(format!("{}-m", op.label), Term::pis(&shape.tel, body));
    }
    tel
}

/// `σ $ ν`: the inputs interleaved with lazily sampled hypotheses.
pub fn section_apply(section: &Term, op: &Operation, inputs: &[Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for (k, arg) in op.args.iter().enumerate() {
        out.push(inputs[k].clone());
        if let OpArg::Int(ix) = arg {
            let mut args: Vec<Term> = ix
                .iter()
                .map(|t| crate::syntax::substitute(t, &inputs[..k], 0))
                .collect();
            args.push(inputs[k].clone());
            out.push(Term::lam(shift(&apps_beta(section, &args), 1, 0)));
        }
    }
    out
}

/// The coherence condition of operation `i`, in Γ:
/// `(ν :: O^IN X) → σ (ν^OUT) (α_O ν) ≡ β_O (σ $ ν)`.
pub fn coherence_entry(
    sig: &Signature,
    i: usize,
    carrier: &Term,
    alg_op: &Term,
    motive: &Term,
    method: &Term,
    section: &Term,
) -> Term {
    let op = &sig.ops[i];
    let inputs = op_inputs(op, carrier);
    let n = inputs.len();
    let nu = telescope_vars(n);
    let a = apps_beta(&shift(alg_op, n, 0), &nu);
    let mut at = op.ret.clone();
    at.push(a);
    let sec = shift(section, n, 0);
    let lhs = apps_beta(&sec, &at);
    let rhs = apps_beta(&shift(method, n, 0), &section_apply(&sec, op, &nu));
    let ty = apps_beta(&shift(motive, n, 0), &at);
    Term::pis(&inputs, Term::eq(ty, lhs, rhs))
}

/// `β^COH σ`.
pub fn coherence_telescope(
    sig: &Signature,
    carrier: &Term,
    alg: &[Term],
    motive: &Term,
    methods: &[Term],
    section: &Term,
) -> Telescope {
    let mut tel = Telescope::new();
    for (i, op) in sig.ops.iter().enumerate() {
        let sh = |t: &Term| shift(t, i, 0);
        let entry = coherence_entry(
            sig,
            i,
            &sh(carrier),
            &sh(&alg[i]),
            &sh(motive),
            &sh(&methods[i]),
            &sh(section),
        );
        tel.push(format!("{}-coh", op.label), entry);
    }
    tel
}

/// `(δ :: Δ) → X δ → 𝒰`.
pub fn motive_type(sig: &Signature, carrier: &Term) -> Term {
    let d = sig.indices.len();
    let x = apps_beta(&shift(carrier, d, 0), &telescope_vars(d));
    Term::pis(&sig.indices, Term::pi(x, Term::Universe))
}

/// `(δ :: Δ) → (x : X δ) → Y δ x`.
pub fn section_type(sig: &Signature, carrier: &Term, motive: &Term) -> Term {
    let d = sig.indices.len();
    let x = apps_beta(&shift(carrier, d, 0), &telescope_vars(d));
    let body = apps_beta(&shift(motive, d + 1, 0), &telescope_vars(d + 1));
    Term::pis(&sig.indices, Term::pi(x, body))
}

/// `(Y : …) → (β :: α^D Y) → (δ :: Δ) → (x : X δ) → Y δ x`: the shape an
/// eliminator image must have.
pub fn eliminator_type(sig: &Signature, carrier: &Term, alg: &[Term]) -> Term {
    let m = sig.ops.len();
    let x1 = shift(carrier, 1, 0);
    let a1: Vec<Term> = alg.iter().map(|t| shift(t, 1, 0)).collect();
    let methods = displayed_telescope(sig, &x1, &a1, &Term::Var(0));
    let sect = section_type(sig, &shift(carrier, 1 + m, 0), &Term::Var(m));
    Term::pi(motive_type(sig, carrier), Term::pis(&methods, sect))
}

/// `∀ Y β. coherence entry i` with the section `elim Y β`.
pub fn coherence_obligation(sig: &Signature, carrier: &Term, alg: &[Term], elim: &Term, i: usize) -> Term {
    let m = sig.ops.len();
    let x1 = shift(carrier, 1, 0);
    let a1: Vec<Term> = alg.iter().map(|t| shift(t, 1, 0)).collect();
    let methods = displayed_telescope(sig, &x1, &a1, &Term::Var(0));
    let up = 1 + m;
    let mut args = vec![Term::Var(m)];
    args.extend(telescope_vars(m));
    let section = apps_beta(&shift(elim, up, 0), &args);
    let entry = coherence_entry(
        sig,
        i,
        &shift(carrier, up, 0),
        &shift(&alg[i], up, 0),
        &Term::Var(m),
        &Term::Var(m - 1 - i),
        &section,
    );
    Term::pi(motive_type(sig, carrier), Term::pis(&methods, entry))
}

/// `α^IND`.
pub fn induction_type(sig: &Signature, carrier: &Term, alg: &[Term]) -> Term {
    let m = sig.ops.len();
    let x1 = shift(carrier, 1, 0);
    let a1: Vec<Term> = alg.iter().map(|t| shift(t, 1, 0)).collect();
    let methods = displayed_telescope(sig, &x1, &a1, &Term::Var(0));
    let sect = section_type(sig, &shift(carrier, 1 + m, 0), &Term::Var(m));
    let up = m + 2;
    let coh = coherence_telescope(
        sig,
        &shift(carrier, up, 0),
        &alg.iter().map(|t| shift(t, up, 0)).collect::<Vec<_>>(),
        &Term::Var(m + 1),
        &(1..=m).rev().map(Term::Var).collect::<Vec<_>>(),
        &Term::Var(0),
    );
    Term::pi(
        motive_type(sig, carrier),
        Term::pis(&methods, Term::sigma(sect, sigmas(&coh))),
    )
}

/// `S^INDA = (X : Δ → 𝒰, α :: S^A X, κ : α^IND)`.
pub fn inductive_algebra_telescope(sig: &Signature) -> Telescope {
    let m = sig.ops.len();
    let mut tel = Telescope::new().with("X", Term::pis(&sig.indices, Term::Universe));
    let ops = algebra_telescope(sig, &Term::Var(0));
    for (n, t) in ops.names.into_iter().zip(ops.types) {
        tel.push(n, t);
    }
    let alg = telescope_vars(m);
    tel.push("κ", induction_type(sig, &Term::Var(m), &alg));
    tel
}

/// The induction witness `κ = λ Y β. (elim Y β, (coh₀ Y β, (…, tt)))`.
pub fn induction_witness(m: usize, elim: &Term, coherence: &[Term]) -> Term {
    let mut args = vec![Term::Var(m)];
    args.extend(telescope_vars(m));
    let up = |t: &Term| apps_beta(&shift(t, m + 1, 0), &args);
    let rho = tuple(&coherence.iter().map(up).collect::<Vec<_>>());
    Term::lams(m + 1, Term::pair(up(elim), rho))
}

/// Memo table for [`algebra_telescope`], keyed by signature name and
/// carrier. Safe to share between threads.
#[derive(Default)]
pub struct AlgebraCache {
    table: Mutex<HashMap<(String, String), Telescope>>,
}

impl AlgebraCache {
    pub fn algebra_telescope(&self, sig: &Signature, carrier: &Term) -> Telescope {
        let key = (sig.name.clone(), carrier.to_string());
        let mut table = self.table.lock().unwrap_or_else(|e| e.into_inner());
        table
            .entry(key)
            .or_insert_with(|| algebra_telescope(sig, carrier))
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{SigId, Algebra};

    pub(crate) fn nat() -> Signature {
        Signature {
            name: "Nat".into(),
            indices: Telescope::new(),
            ops: vec![
                Operation {
                    label: "zero".into(),
                    arg_names: vec![],
                    args: vec![],
                    ret: vec![],
                },
                Operation {
                    label: "succ".into(),
                    arg_names: vec!["n".into()],
                    args: vec![OpArg::Int(vec![])],
                    ret: vec![],
                },
            ],
        }
    }

    #[test]
    fn empty_signature_is_empty() {
        let eps = Signature {
            name: "E".into(),
            indices: Telescope::new(),
            ops: vec![],
        };
        assert!(algebra_telescope(&eps, &Term::Var(0)).is_empty());
        assert!(displayed_telescope(&eps, &Term::Var(1), &[], &Term::Var(0)).is_empty());
        let tel = inductive_algebra_telescope(&eps);
        assert_eq!(tel.len(), 2);
    }

    #[test]
    fn nat_algebra() {
        let n = Term::global("N");
        let tel = algebra_telescope(&nat(), &n);
        assert_eq!(tel.names, vec!["zero", "succ"]);
        assert_eq!(tel.types[0], n);
        assert_eq!(tel.types[1], Term::arrow(n.clone(), n.clone()));
    }

    #[test]
    fn nat_displayed() {
        let x = Term::global("X");
        let y = Term::global("Y");
        let alg = [Term::global("z"), Term::global("s")];
        let tel = displayed_telescope(&nat(), &x, &alg, &y);
        assert_eq!(tel.types[0], Term::app(y.clone(), alg[0].clone()));
        // (x : X) → (⊤ → Y x) → Y (s x)
        let expected = Term::pi(
            x.clone(),
            Term::pi(
                Term::arrow(Term::Unit, Term::app(y.clone(), Term::Var(0))),
                Term::app(y.clone(), Term::app(alg[1].clone(), Term::Var(1))),
            ),
        );
        assert_eq!(tel.types[1], expected);
    }

    #[test]
    fn section_apply_thunks() {
        let sig = nat();
        let sigma = Term::global("σ");
        let x = Term::global("x");
        let out = section_apply(&sigma, &sig.ops[1], std::slice::from_ref(&x));
        assert_eq!(out, vec![x.clone(), Term::lam(Term::app(sigma, x))]);
        assert!(section_apply(&Term::Var(0), &sig.ops[0], &[]).is_empty());
    }

    #[test]
    fn nat_coherence() {
        let sig = nat();
        let [x, y, z, s, zm, sm, sec] =
            ["X", "Y", "z", "s", "zm", "sm", "σ"].map(Term::global);
        let tel = coherence_telescope(&sig, &x, &[z.clone(), s.clone()], &y, &[zm.clone(), sm.clone()], &sec);
        assert_eq!(
            tel.types[0],
            Term::eq(Term::app(y.clone(), z.clone()), Term::app(sec.clone(), z), zm)
        );
        let sx = Term::app(s, Term::Var(0));
        assert_eq!(
            tel.types[1],
            Term::pi(
                x,
                Term::eq(
                    Term::app(y, sx.clone()),
                    Term::app(sec.clone(), sx),
                    Term::apps(sm, [Term::Var(0), Term::lam(Term::app(sec, Term::Var(1)))])
                )
            )
        );
    }

    #[test]
    fn ctor_algebra_reduces() {
        let sig = nat();
        let data = Term::DataTy {
            sig: SigId(0),
            alg: Algebra::Default,
            indices: vec![],
        };
        let succ = Term::lam(Term::Ctor {
            sig: SigId(0),
            op: 1,
            alg: Algebra::Default,
            args: vec![Term::Var(0)],
        });
        let y = Term::lam(Term::global("P"));
        let zero = Term::Ctor {
            sig: SigId(0),
            op: 0,
            alg: Algebra::Default,
            args: vec![],
        };
        let tel = displayed_telescope(&sig, &data, &[zero, succ], &y);
        assert_eq!(tel.types[0], Term::global("P"));
    }

    #[test]
    fn cache_agrees() {
        let cache = AlgebraCache::default();
        let n = Term::global("N");
        let a = cache.algebra_telescope(&nat(), &n);
        assert_eq!(a, algebra_telescope(&nat(), &n));
        assert_eq!(cache.algebra_telescope(&nat(), &n), a);
    }
}
