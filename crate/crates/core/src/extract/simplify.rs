//! Semantics-preserving cleanup of erased programs: administrative
//! β-redexes, dead lets, unit plumbing and numeral folding.

use num_bigint::BigUint;

use super::ir::{Ir, PrimRole, PrimTable};

/// Rewrites to a fixpoint.
pub fn simplify(ir: &Ir, prims: &PrimTable) -> Ir {
    let mut cur = ir.clone();
    loop {
        let next = step(&cur, prims);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn boxed(ir: &Ir, prims: &PrimTable) -> Box<Ir> {
    Box::new(step(ir, prims))
}

fn step(ir: &Ir, prims: &PrimTable) -> Ir {
    match ir {
        Ir::Var(_) | Ir::Global(_) | Ir::Unit | Ir::Nat(_) => ir.clone(),
        Ir::Prim(p, args) => {
            let args: Vec<Ir> = args.iter().map(|a| step(a, prims)).collect();
            match (prims.role(p), args.as_slice()) {
                (PrimRole::Zero, []) => Ir::Nat(BigUint::from(0u8)),
                (PrimRole::Succ, [Ir::Nat(n)]) => Ir::Nat(n + 1u8),
                _ => Ir::Prim(p.clone(), args),
            }
        }
        Ir::Lam(b) => Ir::Lam(boxed(b, prims)),
        Ir::App(f, a) => {
            let f = step(f, prims);
            let a = step(a, prims);
            match f {
                Ir::Lam(body) => beta(*body, a),
                Ir::Thunk(body) => *body,
                Ir::Let(x, body) => Ir::Let(x, Box::new(Ir::app(*body, a.shift(1)))),
                f => Ir::app(f, a),
            }
        }
        Ir::Let(a, b) => {
            let a = step(a, prims);
            beta(step(b, prims), a)
        }
        Ir::Pair(a, b) => Ir::Pair(boxed(a, prims), boxed(b, prims)),
        Ir::Fst(p) => match step(p, prims) {
            Ir::Pair(a, _) => *a,
            p => Ir::Fst(Box::new(p)),
        },
        Ir::Snd(p) => match step(p, prims) {
            Ir::Pair(_, b) => *b,
            p => Ir::Snd(Box::new(p)),
        },
        Ir::Ctor { origin, tag, args } => Ir::Ctor {
            origin: origin.clone(),
            tag: *tag,
            args: args.iter().map(|a| step(a, prims)).collect(),
        },
        Ir::Switch(s, cases) => {
            let s = step(s, prims);
            if let Ir::Ctor { tag, args, .. } = &s {
                if let Some((n, body)) = cases.get(*tag) {
                    if *n == args.len() {
                        return args
                            .iter()
                            .enumerate()
                            .rev()
                            .fold(body.clone(), |b, (k, a)| Ir::Let(Box::new(a.shift(k)), Box::new(b)));
                    }
                }
            }
            Ir::Switch(
                Box::new(s),
                cases.iter().map(|(n, c)| (*n, step(c, prims))).collect(),
            )
        }
        Ir::Fix(b) => Ir::Fix(boxed(b, prims)),
        Ir::Thunk(b) => match step(b, prims) {
            Ir::Force(e) if matches!(*e, Ir::Thunk(_)) => *e,
            b => Ir::Thunk(Box::new(b)),
        },
        Ir::Force(b) => match step(b, prims) {
            Ir::Thunk(e) => *e,
            b => Ir::Force(Box::new(b)),
        },
    }
}

/// Contracts `(\x. body) a`, keeping a `let` when substituting would
/// duplicate work.
fn beta(body: Ir, a: Ir) -> Ir {
    let (count, guarded) = body.occurrences(0);
    if count == 0 || a.is_atomic() || (count == 1 && !guarded) {
        body.instantiate(&a)
    } else {
        Ir::Let(Box::new(a), Box::new(body))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: &str) -> Ir {
        Ir::Global(name.into())
    }

    #[test]
    fn unit_wrappers_collapse_to_identity() {
        let j = Ir::lam(Ir::lam(Ir::Var(0)));
        let t = Ir::lam(Ir::app(Ir::app(j, Ir::Unit), Ir::Var(0)));
        assert_eq!(simplify(&t, &PrimTable::default()), Ir::identity());
    }

    #[test]
    fn shared_arguments_become_lets() {
        let arg = Ir::app(g("f"), g("x"));
        let body = Ir::Pair(Box::new(Ir::Var(0)), Box::new(Ir::Var(0)));
        let t = Ir::app(Ir::lam(body.clone()), arg.clone());
        assert_eq!(
            simplify(&t, &PrimTable::default()),
            Ir::Let(Box::new(arg), Box::new(body))
        );
    }

    #[test]
    fn dead_lets_vanish() {
        let t = Ir::Let(Box::new(Ir::app(g("f"), g("x"))), Box::new(g("y")));
        assert_eq!(simplify(&t, &PrimTable::default()), g("y"));
    }

    #[test]
    fn thunks_of_forced_thunks() {
        let th = Ir::Thunk(Box::new(g("a")));
        let t = Ir::Thunk(Box::new(Ir::Force(Box::new(th.clone()))));
        assert_eq!(simplify(&t, &PrimTable::default()), th);
    }

    #[test]
    fn numerals_fold() {
        let one = Ir::Prim("ubig-1+".into(), vec![Ir::Prim("ubig-0".into(), vec![])]);
        assert_eq!(simplify(&one, &PrimTable::default()), Ir::Nat(1u8.into()));
    }

    #[test]
    fn known_constructors_select_their_case() {
        let c = Ir::Ctor {
            origin: "List".into(),
            tag: 1,
            args: vec![g("h"), g("t")],
        };
        let t = Ir::Switch(Box::new(c), vec![(0, Ir::Unit), (2, Ir::Var(1))]);
        assert_eq!(simplify(&t, &PrimTable::default()), g("h"));
    }
}
