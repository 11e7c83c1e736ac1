//! Shared test support: fixture loading, random well-typed terms and a
//! substitution-based reference normalizer.
#![allow(dead_code)]

pub mod sigs;

use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use datatt::elab::{elaborate, Elaborator, Options};
use datatt::env::GlobalEnv;
use datatt::program::CoreProgram;
use datatt::surface::SourceMap;
use datatt::syntax::{shift, subst1, substitute, Algebra, SigId, Term};
use datatt::typeck::{Checker, Ctx};
use datatt::value::Val;

pub const STDLIB: &[&str] = &[
    "stdlib/prelude.dtt",
    "stdlib/list.dtt",
    "stdlib/vec.dtt",
    "stdlib/fin.dtt",
    "stdlib/reindex.dtt",
];

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> String {
    format!("crates/core/tests/fixtures/{name}")
}

pub fn sources(files: &[&str]) -> SourceMap {
    let mut sm = SourceMap::default();
    for f in files {
        let path = root().join(f);
        let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        sm.add(*f, src);
    }
    sm
}

pub fn elaborate_files(files: &[&str]) -> Result<Elaborator, String> {
    let sm = sources(files);
    elaborate(&sm, Options::default()).map_err(|e| format!("{}: {}", sm.locate(e.span), e.kind))
}

/// Two plain inductive types, with no representation attached.
pub const MLTT_DATA: &str = "data N : U where\n  | z : N\n  | s : N -> N\n\ndata B : U where\n  | t : B\n  | f : B\n";

pub struct Mltt {
    pub program: CoreProgram,
    pub env: GlobalEnv,
    pub nat: SigId,
    pub bool: SigId,
}

impl Mltt {
    pub fn new() -> Mltt {
        let mut sm = SourceMap::default();
        sm.add("mltt.dtt", MLTT_DATA);
        let el = elaborate(&sm, Options::default()).unwrap_or_else(|e| panic!("{}", e.kind));
        let program = el.env.to_program();
        let nat = program.sig_by_name("N").unwrap();
        let bool = program.sig_by_name("B").unwrap();
        Mltt {
            env: GlobalEnv::from_program(&program),
            program,
            nat,
            bool,
        }
    }
}

/// Simple types of the generated fragment. None of them depends on terms,
/// so they are closed and need no shifting.
#[derive(Clone, Debug, PartialEq)]
pub enum Ty {
    N,
    B,
    Unit,
    Arrow(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn term(&self, m: &Mltt) -> Term {
        match self {
            Ty::N => data(m.nat),
            Ty::B => data(m.bool),
            Ty::Unit => Term::Unit,
            Ty::Arrow(a, b) => Term::arrow(a.term(m), b.term(m)),
            Ty::Prod(a, b) => Term::sigma(a.term(m), shift(&b.term(m), 1, 0)),
        }
    }
}

fn data(sig: SigId) -> Term {
    Term::DataTy {
        sig,
        alg: Algebra::Default,
        indices: vec![],
    }
}

fn ctor(sig: SigId, op: usize, args: Vec<Term>) -> Term {
    Term::Ctor {
        sig,
        op,
        alg: Algebra::Default,
        args,
    }
}

fn elim(sig: SigId, motive: Term, methods: Vec<Term>, scrutinee: Term) -> Term {
    Term::Elim {
        sig,
        alg: Algebra::Default,
        motive: Arc::new(motive),
        methods,
        indices: vec![],
        scrutinee: Arc::new(scrutinee),
    }
}

/// The free variables every generated term may use, outermost first.
pub fn base_context() -> Vec<Ty> {
    vec![Ty::N, Ty::arrow(Ty::N, Ty::N), Ty::B, Ty::prod(Ty::N, Ty::B)]
}

pub struct TermGen<'m> {
    pub m: &'m Mltt,
    pub rng: ChaCha8Rng,
}

/// A generated term together with a twin the bidirectional checker can
/// verify: the twin wraps each β-redex's function in `elim-B` with a
/// constant motive, which fixes the function's type.
#[derive(Clone, Debug)]
pub struct Sample {
    pub term: Term,
    pub checkable: Term,
}

impl Sample {
    fn both(t: Term) -> Sample {
        Sample {
            checkable: t.clone(),
            term: t,
        }
    }

    fn map(self, f: impl Fn(Term) -> Term) -> Sample {
        Sample {
            term: f(self.term),
            checkable: f(self.checkable),
        }
    }

    fn zip(self, other: Sample, f: impl Fn(Term, Term) -> Term) -> Sample {
        Sample {
            term: f(self.term, other.term),
            checkable: f(self.checkable, other.checkable),
        }
    }
}

impl TermGen<'_> {
    fn small_type(&mut self, depth: usize) -> Ty {
        match self.rng.gen_range(0..if depth == 0 { 3 } else { 6 }) {
            0 | 3 => Ty::N,
            1 => Ty::B,
            2 => Ty::Unit,
            4 => Ty::arrow(self.small_type(depth - 1), self.small_type(depth - 1)),
            _ => Ty::prod(self.small_type(depth - 1), self.small_type(depth - 1)),
        }
    }

    /// `t` in a position where its type `ty` can be inferred.
    fn annotate(&self, ty: &Ty, t: Term) -> Term {
        let m = self.m;
        let motive = shift(&ty.term(m), 1, 0);
        elim(m.bool, motive, vec![t.clone(), t], ctor(m.bool, 0, vec![]))
    }

    /// A neutral use of a context variable at `ty`, if one exists.
    fn use_var(&mut self, ctx: &[Ty], ty: &Ty, fuel: usize) -> Option<Sample> {
        let mut options = Vec::new();
        for (pos, t) in ctx.iter().enumerate() {
            let v = Term::Var(ctx.len() - 1 - pos);
            if t == ty {
                options.push((v.clone(), None));
            }
            match t {
                Ty::Arrow(a, b) if **b == *ty && fuel > 0 => options.push((v.clone(), Some((**a).clone()))),
                Ty::Prod(a, _) if **a == *ty => options.push((Term::fst(v.clone()), None)),
                Ty::Prod(_, b) if **b == *ty => options.push((Term::snd(v.clone()), None)),
                _ => {}
            }
        }
        if options.is_empty() {
            return None;
        }
        let (head, arg) = options.swap_remove(self.rng.gen_range(0..options.len()));
        Some(match arg {
            Some(a) => self.term(ctx, &a, fuel - 1).map(|x| Term::app(head.clone(), x)),
            None => Sample::both(head),
        })
    }

    fn intro(&mut self, ctx: &[Ty], ty: &Ty, fuel: usize) -> Sample {
        let m = self.m;
        match ty {
            Ty::N => {
                if fuel > 0 && self.rng.gen_bool(0.5) {
                    self.term(ctx, &Ty::N, fuel - 1).map(|x| ctor(m.nat, 1, vec![x]))
                } else {
                    Sample::both(ctor(m.nat, 0, vec![]))
                }
            }
            Ty::B => Sample::both(ctor(m.bool, self.rng.gen_range(0..2), vec![])),
            Ty::Unit => Sample::both(Term::Tt),
            Ty::Arrow(a, b) => {
                let mut inner = ctx.to_vec();
                inner.push((**a).clone());
                self.term(&inner, b, fuel.saturating_sub(1)).map(Term::lam)
            }
            Ty::Prod(a, b) => {
                let half = fuel / 2;
                let x = self.term(ctx, a, half);
                let y = self.term(ctx, b, half);
                x.zip(y, Term::pair)
            }
        }
    }

    /// A term of type `ty` in `ctx`, of size roughly bounded by `fuel`.
    pub fn term(&mut self, ctx: &[Ty], ty: &Ty, fuel: usize) -> Sample {
        let m = self.m;
        if fuel == 0 {
            return match self.use_var(ctx, ty, 0) {
                Some(s) => s,
                None => self.intro(ctx, ty, 0),
            };
        }
        let f = fuel - 1;
        match self.rng.gen_range(0..10) {
            0 | 1 => {
                let a = self.small_type(1);
                let mut inner = ctx.to_vec();
                inner.push(a.clone());
                let body = self.term(&inner, ty, f / 2);
                let arg = self.term(ctx, &a, f / 2);
                let fun_ty = Ty::arrow(a, ty.clone());
                Sample {
                    term: Term::app(Term::lam(body.term), arg.term),
                    checkable: Term::app(self.annotate(&fun_ty, Term::lam(body.checkable)), arg.checkable),
                }
            }
            2 => {
                let mut step_ctx = ctx.to_vec();
                step_ctx.push(Ty::N);
                step_ctx.push(Ty::arrow(Ty::Unit, ty.clone()));
                let zero = self.term(ctx, ty, f / 3);
                let step = self.term(&step_ctx, ty, f / 3).map(|b| Term::lams(2, b));
                let scrut = self.term(ctx, &Ty::N, f / 3);
                let motive = shift(&ty.term(m), 1, 0);
                let methods = zero.zip(step, Term::pair);
                methods.zip(scrut, |ms, s| match ms {
                    Term::Pair(a, b) => elim(m.nat, motive.clone(), vec![(*a).clone(), (*b).clone()], s),
                    _ => unreachable!(),
                })
            }
            3 => {
                let a = self.term(ctx, ty, f / 3);
                let b = self.term(ctx, ty, f / 3);
                let scrut = self.term(ctx, &Ty::B, f / 3);
                let motive = shift(&ty.term(m), 1, 0);
                a.zip(b, Term::pair).zip(scrut, |ms, s| match ms {
                    Term::Pair(a, b) => elim(m.bool, motive.clone(), vec![(*a).clone(), (*b).clone()], s),
                    _ => unreachable!(),
                })
            }
            4 => {
                let mut inner = ctx.to_vec();
                inner.push(Ty::N);
                let refl_case = self.term(&inner, ty, f / 2);
                let proof = self.term(ctx, &Ty::N, f / 2).map(Term::refl);
                let motive = shift(&ty.term(m), 3, 0);
                refl_case.zip(proof, |r, p| Term::j(motive.clone(), r, p))
            }
            5 => {
                let other = self.small_type(0);
                let (pair_ty, proj): (Ty, fn(Term) -> Term) = if self.rng.gen_bool(0.5) {
                    (Ty::prod(ty.clone(), other), Term::fst)
                } else {
                    (Ty::prod(other, ty.clone()), Term::snd)
                };
                let p = self.term(ctx, &pair_ty, f);
                Sample {
                    term: proj(p.term),
                    checkable: proj(self.annotate(&pair_ty, p.checkable)),
                }
            }
            6 | 7 => match self.use_var(ctx, ty, f) {
                Some(s) => s,
                None => self.intro(ctx, ty, f),
            },
            _ => self.intro(ctx, ty, f),
        }
    }

    /// A random type and a term of that type in the base context, with at
    /// most `max_size` nodes.
    pub fn sample(&mut self, max_size: usize) -> (Ty, Sample) {
        loop {
            let ty = self.small_type(2);
            let fuel = self.rng.gen_range(2..12);
            let s = self.term(&base_context(), &ty, fuel);
            if s.term.size() <= max_size {
                return (ty, s);
            }
        }
    }
}

/// The checker context for `base_context`.
pub fn checker_context(m: &Mltt, ck: &Checker) -> Ctx {
    let mut ctx = Ctx::new();
    for ty in base_context() {
        let v: Val = ck.eval(&ctx, &ty.term(m));
        ctx = ctx.bind(v);
    }
    ctx
}

/// β-normal form by repeated substitution. Eliminators on constructors
/// pass each recursive field followed by `λ_. elim … field`.
pub fn naive_nf(p: &CoreProgram, t: &Term) -> Term {
    let nf = |t: &Term| naive_nf(p, t);
    match t {
        Term::Var(_) | Term::Universe | Term::Unit | Term::Tt | Term::Global(_) | Term::Postulate(_) => t.clone(),
        Term::Pi(a, b) => Term::pi(nf(a), nf(b)),
        Term::Sigma(a, b) => Term::sigma(nf(a), nf(b)),
        Term::SubsetSigma(a, b) => Term::subset(nf(a), nf(b)),
        Term::Lam(b) => Term::lam(nf(b)),
        Term::App(f, a) => match nf(f) {
            Term::Lam(body) => nf(&subst1(&body, a)),
            f => Term::app(f, nf(a)),
        },
        Term::Pair(a, b) => Term::pair(nf(a), nf(b)),
        Term::Fst(q) => match nf(q) {
            Term::Pair(a, _) => (*a).clone(),
            q => Term::fst(q),
        },
        Term::Snd(q) => match nf(q) {
            Term::Pair(_, b) => (*b).clone(),
            q => Term::snd(q),
        },
        Term::SubsetPair(a, b) => Term::spair(nf(a), nf(b)),
        Term::SubsetFst(q) => match nf(q) {
            Term::SubsetPair(a, _) => (*a).clone(),
            q => Term::sfst(q),
        },
        Term::SubsetSnd(q) => match nf(q) {
            Term::SubsetPair(_, b) => (*b).clone(),
            q => Term::ssnd(q),
        },
        Term::Eq(a, x, y) => Term::eq(nf(a), nf(x), nf(y)),
        Term::Refl(a) => Term::refl(nf(a)),
        Term::J(mo, r, q) => match nf(q) {
            Term::Refl(a) => nf(&subst1(r, &a)),
            q => Term::j(nf(mo), nf(r), q),
        },
        Term::DataTy { sig, alg, indices } => Term::DataTy {
            sig: *sig,
            alg: alg.clone(),
            indices: indices.iter().map(nf).collect(),
        },
        Term::Ctor { sig, op, alg, args } => Term::Ctor {
            sig: *sig,
            op: *op,
            alg: alg.clone(),
            args: args.iter().map(nf).collect(),
        },
        Term::Elim {
            sig,
            alg,
            motive,
            methods,
            indices,
            scrutinee,
        } => match nf(scrutinee) {
            Term::Ctor { op, args, .. } => {
                let operation = &p.sig(*sig).ops[op];
                let mut inputs = Vec::new();
                for (k, a) in args.iter().enumerate() {
                    inputs.push(a.clone());
                    if operation.is_recursive(k) {
                        let rec = Term::Elim {
                            sig: *sig,
                            alg: alg.clone(),
                            motive: motive.clone(),
                            methods: methods.clone(),
                            indices: recursive_indices(p, *sig, op, k, &args),
                            scrutinee: Arc::new(a.clone()),
                        };
                        inputs.push(Term::lam(shift(&rec, 1, 0)));
                    }
                }
                nf(&Term::apps(methods[op].clone(), inputs))
            }
            s => Term::Elim {
                sig: *sig,
                alg: alg.clone(),
                motive: Arc::new(nf(motive)),
                methods: methods.iter().map(nf).collect(),
                indices: indices.iter().map(nf).collect(),
                scrutinee: Arc::new(s),
            },
        },
        Term::ReprTy(a) => Term::repr_ty(nf(a)),
        Term::ReprTm(a) => Term::repr(nf(a)),
        Term::UnreprTm(a) => Term::unrepr(nf(a)),
    }
}

fn recursive_indices(p: &CoreProgram, sig: SigId, op: usize, k: usize, args: &[Term]) -> Vec<Term> {
    match &p.sig(sig).ops[op].args[k] {
        datatt::syntax::OpArg::Int(ix) => ix.iter().map(|t| substitute(t, &args[..k], 0)).collect(),
        datatt::syntax::OpArg::Ext(_) => vec![],
    }
}

/// Normal form by evaluation and read-back in the base context.
pub fn nbe_nf(m: &Mltt, env: &GlobalEnv, t: &Term) -> Term {
    let ck = Checker::new(env);
    let ctx = checker_context(m, &ck);
    ck.quote(&ctx, &ck.eval(&ctx, t))
}
