//! Type checking of core terms.
//!
//! The elaborator produces core terms; this checker re-checks them and is
//! the only line of defence for programs loaded from a core dump.

use std::cell::RefCell;
use std::sync::Arc;

use thiserror::Error;

use crate::env::GlobalEnv;
use crate::interp::{
    algebra_telescope, displayed_telescope, inductive_algebra_telescope, op_inputs, op_output,
    telescope_vars,
};
use crate::nbe::Nbe;
use crate::syntax::{Algebra, OpArg, SigId, Signature, Telescope, Term};
use crate::value::{Env, Frame, Val, Value};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TypeError {
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: Box<Term>, found: Box<Term> },
    #[error("terms are not definitionally equal: {lhs} and {rhs}")]
    NotEqual { lhs: Box<Term>, rhs: Box<Term> },
    #[error("expected a function type, found {0}")]
    NotAFunction(Box<Term>),
    #[error("expected a pair type, found {0}")]
    NotAPair(Box<Term>),
    #[error("expected a subset type, found {0}")]
    NotASubset(Box<Term>),
    #[error("expected an equality type, found {0}")]
    NotAnEquality(Box<Term>),
    #[error("cannot infer the type of {0}")]
    CannotInfer(&'static str),
    #[error("unknown global `{0}`")]
    UnknownGlobal(String),
    #[error("`{0}` is used before it is declared")]
    ForwardReference(String),
    #[error("variable {0} is out of scope")]
    UnboundVariable(usize),
    #[error("`{0}` expects {1} arguments but got {2}")]
    Arity(String, usize, usize),
    #[error("ill-formed signature `{0}`: {1}")]
    BadSignature(String, String),
}

type Result<T> = std::result::Result<T, TypeError>;

/// A typing context of values. Entry `k` is the type of de Bruijn level `k`.
#[derive(Clone, Debug, Default)]
pub struct Ctx {
    pub types: Vec<Val>,
    pub env: Env,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn depth(&self) -> usize {
        self.types.len()
    }

    /// Extends the context with a fresh variable.
    pub fn bind(&self, ty: Val) -> Ctx {
        self.define(ty, Value::var(self.depth()))
    }

    /// Extends the context with a variable standing for `value`.
    pub fn define(&self, ty: Val, value: Val) -> Ctx {
        let mut types = self.types.clone();
        types.push(ty);
        Ctx {
            types,
            env: self.env.push(value),
        }
    }
}

/// `λ δ. data S γ δ`.
pub fn data_former(sig: &Signature, id: SigId, alg: &Algebra) -> Term {
    let d = sig.indices.len();
    Term::lams(
        d,
        Term::DataTy {
            sig: id,
            alg: alg.clone(),
            indices: telescope_vars(d),
        },
    )
}

/// `λ ν. ctor_O ν`.
pub fn ctor_function(sig: &Signature, id: SigId, alg: &Algebra, op: usize) -> Term {
    let n = sig.ops[op].arity();
    Term::lams(
        n,
        Term::Ctor {
            sig: id,
            op,
            alg: alg.clone(),
            args: telescope_vars(n),
        },
    )
}

/// `λ Y β δ x. elim Y β δ x`, the body of the generated eliminator.
pub fn elim_function(sig: &Signature, id: SigId, alg: &Algebra) -> Term {
    let m = sig.ops.len();
    let d = sig.indices.len();
    Term::lams(
        m + d + 2,
        Term::Elim {
            sig: id,
            alg: alg.clone(),
            motive: Arc::new(Term::apps(Term::Var(m + 2 * d + 2), telescope_vars(d + 1))),
            methods: (0..m).map(|i| Term::Var(m + d - i)).collect(),
            indices: (1..=d).rev().map(Term::Var).collect(),
            scrutinee: Arc::new(Term::Var(0)),
        },
    )
}

pub fn ctor_functions(sig: &Signature, id: SigId, alg: &Algebra) -> Vec<Term> {
    (0..sig.ops.len()).map(|i| ctor_function(sig, id, alg, i)).collect()
}

/// Evaluates telescope entries against a spine of values, one at a time.
pub fn telescope_entry(nbe: &Nbe, tel: &Telescope, base: &Env, done: &[Val], k: usize) -> Val {
    nbe.eval(&tel.types[k], &base.extend(done[..k].iter().cloned()))
}

pub struct Checker<'g> {
    pub nbe: Nbe<'g>,
    /// Declarations at or after this position are not yet visible.
    pub limit: usize,
    checked_sigs: RefCell<Vec<bool>>,
    checked_algs: RefCell<Vec<(SigId, Arc<Vec<Term>>)>>,
}

impl<'g> Checker<'g> {
    pub fn new(globals: &'g GlobalEnv) -> Checker<'g> {
        Checker {
            nbe: Nbe::new(globals),
            limit: usize::MAX,
            checked_sigs: RefCell::new(vec![false; globals.sigs.len()]),
            checked_algs: RefCell::new(Vec::new()),
        }
    }

    fn globals(&self) -> &'g GlobalEnv {
        self.nbe.globals
    }

    pub fn eval(&self, ctx: &Ctx, t: &Term) -> Val {
        self.nbe.eval(t, &ctx.env)
    }

    pub fn quote(&self, ctx: &Ctx, v: &Val) -> Term {
        self.nbe.quote(v, ctx.depth())
    }

    fn universe() -> Val {
        Arc::new(Value::Universe)
    }

    /// Checks `a ≡ b` at `ty`, reporting a mismatch of types.
    pub fn expect_type(&self, ctx: &Ctx, expected: &Val, found: &Val) -> Result<()> {
        if self
            .nbe
            .conv(ctx.depth(), expected, found, Some(&Self::universe()))
        {
            Ok(())
        } else {
            Err(TypeError::Mismatch {
                expected: Box::new(self.quote(ctx, expected)),
                found: Box::new(self.quote(ctx, found)),
            })
        }
    }

    pub fn expect_equal(&self, ctx: &Ctx, a: &Val, b: &Val, ty: &Val) -> Result<()> {
        if self.nbe.conv(ctx.depth(), a, b, Some(ty)) {
            Ok(())
        } else {
            Err(TypeError::NotEqual {
                lhs: Box::new(self.quote(ctx, a)),
                rhs: Box::new(self.quote(ctx, b)),
            })
        }
    }

    pub fn global_type(&self, name: &str) -> Result<Val> {
        match self.globals().position(name) {
            None => Err(TypeError::UnknownGlobal(name.into())),
            Some(p) if p >= self.limit => Err(TypeError::ForwardReference(name.into())),
            Some(_) => Ok(self.nbe.global_type(name).expect("indexed global")),
        }
    }

    pub fn check_type(&self, ctx: &Ctx, t: &Term) -> Result<()> {
        self.check(ctx, t, &Self::universe())
    }

    pub fn check(&self, ctx: &Ctx, t: &Term, ty: &Val) -> Result<()> {
        let ty = self.nbe.force(ty);
        match (t, &*ty) {
            (Term::Lam(body), Value::Pi(dom, cod)) => {
                let x = Value::var(ctx.depth());
                let cod = self.nbe.apply_closure(cod, &[x]);
                self.check(&ctx.bind(dom.clone()), body, &cod)
            }
            (Term::Lam(_), _) => Err(TypeError::NotAFunction(Box::new(self.quote(ctx, &ty)))),
            (Term::Pair(a, b), Value::Sigma(dom, fam)) => {
                self.check(ctx, a, dom)?;
                let av = self.eval(ctx, a);
                self.check(ctx, b, &self.nbe.apply_closure(fam, &[av]))
            }
            (Term::Pair(..), _) => Err(TypeError::NotAPair(Box::new(self.quote(ctx, &ty)))),
            (Term::SubsetPair(a, b), Value::Subset(dom, fam)) => {
                self.check(ctx, a, dom)?;
                let av = self.eval(ctx, a);
                self.check(ctx, b, &self.nbe.apply_closure(fam, &[av]))
            }
            (Term::SubsetPair(..), _) => Err(TypeError::NotASubset(Box::new(self.quote(ctx, &ty)))),
            (Term::Refl(a), Value::Eq(aty, x, y)) => {
                self.check(ctx, a, aty)?;
                let av = self.eval(ctx, a);
                self.expect_equal(ctx, &av, x, aty)?;
                self.expect_equal(ctx, &av, y, aty)
            }
            (Term::UnreprTm(a), _) => self.check(ctx, a, &self.nbe.repr_ty(&ty)),
            _ => {
                let found = self.infer(ctx, t)?;
                self.expect_type(ctx, &ty, &found)
            }
        }
    }

    pub fn infer(&self, ctx: &Ctx, t: &Term) -> Result<Val> {
        let u = Self::universe;
        match t {
            Term::Var(i) => ctx
                .types
                .len()
                .checked_sub(i + 1)
                .map(|l| ctx.types[l].clone())
                .ok_or(TypeError::UnboundVariable(*i)),
            Term::Universe | Term::Unit => Ok(u()),
            Term::Tt => Ok(Arc::new(Value::Unit)),
            Term::Pi(a, b) | Term::Sigma(a, b) | Term::SubsetSigma(a, b) => {
                self.check_type(ctx, a)?;
                let av = self.eval(ctx, a);
                self.check_type(&ctx.bind(av), b)?;
                Ok(u())
            }
            Term::Lam(_) => Err(TypeError::CannotInfer("an unannotated lambda")),
            Term::Pair(..) | Term::SubsetPair(..) => Err(TypeError::CannotInfer("a pair")),
            Term::App(f, a) => {
                let fty = self.nbe.force(&self.infer(ctx, f)?);
                match &*fty {
                    Value::Pi(dom, cod) => {
                        self.check(ctx, a, dom)?;
                        Ok(self.nbe.apply_closure(cod, &[self.eval(ctx, a)]))
                    }
                    _ => Err(TypeError::NotAFunction(Box::new(self.quote(ctx, &fty)))),
                }
            }
            Term::Fst(p) | Term::Snd(p) => {
                let pty = self.nbe.force(&self.infer(ctx, p)?);
                match &*pty {
                    Value::Sigma(dom, fam) => match t {
                        Term::Fst(_) => Ok(dom.clone()),
                        _ => {
                            let a = self.nbe.fst(&self.eval(ctx, p));
                            Ok(self.nbe.apply_closure(fam, &[a]))
                        }
                    },
                    _ => Err(TypeError::NotAPair(Box::new(self.quote(ctx, &pty)))),
                }
            }
            Term::SubsetFst(p) | Term::SubsetSnd(p) => {
                let pty = self.nbe.force(&self.infer(ctx, p)?);
                match &*pty {
                    Value::Subset(dom, fam) => match t {
                        Term::SubsetFst(_) => Ok(dom.clone()),
                        _ => {
                            let a = self.nbe.sfst(&self.eval(ctx, p));
                            Ok(self.nbe.apply_closure(fam, &[a]))
                        }
                    },
                    _ => Err(TypeError::NotASubset(Box::new(self.quote(ctx, &pty)))),
                }
            }
            Term::Eq(a, x, y) => {
                self.check_type(ctx, a)?;
                let av = self.eval(ctx, a);
                self.check(ctx, x, &av)?;
                self.check(ctx, y, &av)?;
                Ok(u())
            }
            Term::Refl(a) => {
                let aty = self.infer(ctx, a)?;
                let av = self.eval(ctx, a);
                Ok(Arc::new(Value::Eq(aty, av.clone(), av)))
            }
            Term::J(motive, refl, p) => {
                let pty = self.nbe.force(&self.infer(ctx, p)?);
                let (aty, x, y) = match &*pty {
                    Value::Eq(a, x, y) => (a.clone(), x.clone(), y.clone()),
                    _ => return Err(TypeError::NotAnEquality(Box::new(self.quote(ctx, &pty)))),
                };
                let d = ctx.depth();
                let c1 = ctx.bind(aty.clone());
                let c2 = c1.bind(aty.clone());
                let eq = Arc::new(Value::Eq(aty.clone(), Value::var(d), Value::var(d + 1)));
                self.check_type(&c2.bind(eq), motive)?;
                let a = Value::var(d);
                let want = self.nbe.eval(
                    motive,
                    &ctx.env
                        .extend([a.clone(), a.clone(), Arc::new(Value::Refl(a))]),
                );
                self.check(&c1, refl, &want)?;
                let pv = self.eval(ctx, p);
                Ok(self.nbe.eval(motive, &ctx.env.extend([x, y, pv])))
            }
            Term::DataTy { sig, alg, indices } => {
                self.check_data_header(*sig, alg)?;
                let s = self.globals().sig(*sig);
                self.check_spine(ctx, &s.name, &s.indices, &Env::new(), indices)?;
                Ok(u())
            }
            Term::Ctor { sig, op, alg, args } => {
                self.check_data_header(*sig, alg)?;
                let s = self.globals().sig(*sig);
                let o = s.ops.get(*op).ok_or_else(|| {
                    TypeError::BadSignature(s.name.clone(), format!("no operation {op}"))
                })?;
                let carrier = data_former(s, *sig, alg);
                let inputs = op_inputs(o, &carrier);
                self.check_spine(ctx, &o.label, &inputs, &Env::new(), args)?;
                let out = op_output(o, args);
                Ok(self.eval(
                    ctx,
                    &Term::DataTy {
                        sig: *sig,
                        alg: alg.clone(),
                        indices: out,
                    },
                ))
            }
            Term::Elim {
                sig,
                alg,
                motive,
                methods,
                indices,
                scrutinee,
            } => {
                self.check_data_header(*sig, alg)?;
                let s = self.globals().sig(*sig);
                let d = s.indices.len();
                let mut mctx = ctx.clone();
                let mut vars = Vec::new();
                for k in 0..d {
                    let ty = telescope_entry(&self.nbe, &s.indices, &Env::new(), &vars, k);
                    vars.push(Value::var(mctx.depth()));
                    mctx = mctx.bind(ty);
                }
                let dty = Arc::new(Value::Data {
                    sig: *sig,
                    alg: alg.clone(),
                    indices: vars,
                });
                self.check_type(&mctx.bind(dty), motive)?;
                let carrier = data_former(s, *sig, alg);
                let ctors = ctor_functions(s, *sig, alg);
                let motive_fn = Term::lams(d + 1, (**motive).clone());
                let tel = displayed_telescope(s, &carrier, &ctors, &motive_fn);
                let name = format!("elim-{}", s.name);
                self.check_spine(ctx, &name, &tel, &ctx.env, methods)?;
                let ivals = self.check_spine(ctx, &name, &s.indices, &Env::new(), indices)?;
                let dty = Arc::new(Value::Data {
                    sig: *sig,
                    alg: alg.clone(),
                    indices: ivals.clone(),
                });
                self.check(ctx, scrutinee, &dty)?;
                let mut at = ivals;
                at.push(self.eval(ctx, scrutinee));
                Ok(self.nbe.eval(motive, &ctx.env.extend(at)))
            }
            Term::ReprTy(a) => {
                self.check_type(ctx, a)?;
                Ok(u())
            }
            Term::ReprTm(a) => {
                let aty = self.infer(ctx, a)?;
                Ok(self.nbe.repr_ty(&aty))
            }
            Term::UnreprTm(a) => {
                let aty = self.nbe.force(&self.infer(ctx, a)?);
                match &*aty {
                    Value::Neutral(h, frames) if matches!(frames.last(), Some(Frame::ReprTy)) => {
                        Ok(Arc::new(Value::Neutral(
                            h.clone(),
                            frames[..frames.len() - 1].to_vec(),
                        )))
                    }
                    _ => Err(TypeError::CannotInfer("`unrepr` without an expected type")),
                }
            }
            Term::Global(n) | Term::Postulate(n) => self.global_type(n),
        }
    }

    /// Checks a spine against a telescope whose entries are evaluated in
    /// `base` extended by the earlier entries.
    pub fn check_spine(
        &self,
        ctx: &Ctx,
        what: &str,
        tel: &Telescope,
        base: &Env,
        args: &[Term],
    ) -> Result<Vec<Val>> {
        if tel.len() != args.len() {
            return Err(TypeError::Arity(what.into(), tel.len(), args.len()));
        }
        let mut vals = Vec::with_capacity(args.len());
        for (k, a) in args.iter().enumerate() {
            let ty = telescope_entry(&self.nbe, tel, base, &vals, k);
            self.check(ctx, a, &ty)?;
            vals.push(self.eval(ctx, a));
        }
        Ok(vals)
    }

    fn check_data_header(&self, sig: SigId, alg: &Algebra) -> Result<()> {
        if sig.0 >= self.globals().sigs.len() {
            return Err(TypeError::BadSignature(format!("#{}", sig.0), "unknown".into()));
        }
        self.check_signature(sig)?;
        if let Algebra::Custom(spine) = alg {
            let seen = self
                .checked_algs
                .borrow()
                .iter()
                .any(|(s, a)| *s == sig && (Arc::ptr_eq(a, spine) || a == spine));
            if !seen {
                let s = self.globals().sig(sig);
                let tel = inductive_algebra_telescope(s);
                self.check_spine(&Ctx::new(), &s.name, &tel, &Env::new(), spine)?;
                self.checked_algs.borrow_mut().push((sig, spine.clone()));
            }
        }
        Ok(())
    }

    /// Checks that a signature is well formed. Signatures are closed, so
    /// this only needs doing once.
    pub fn check_signature(&self, id: SigId) -> Result<()> {
        if self.checked_sigs.borrow().get(id.0).copied().unwrap_or(false) {
            return Ok(());
        }
        let s = self.globals().sig(id);
        let bad = |msg: String| TypeError::BadSignature(s.name.clone(), msg);
        let mut ctx = Ctx::new();
        for t in &s.indices.types {
            self.check_type(&ctx, t)?;
            let v = self.eval(&ctx, t);
            ctx = ctx.bind(v);
        }
        let index_tel = &s.indices;
        for op in &s.ops {
            if op.arg_names.len() != op.args.len() {
                return Err(bad(format!("operation `{}` has mismatched names", op.label)));
            }
            let mut ctx = Ctx::new();
            let mut recursive = Vec::new();
            for (k, arg) in op.args.iter().enumerate() {
                let ty = match arg {
                    OpArg::Ext(a) => {
                        for &r in &recursive {
                            if a.mentions(k - 1 - r) {
                                return Err(bad(format!(
                                    "operation `{}` depends on a recursive argument",
                                    op.label
                                )));
                            }
                        }
                        self.check_type(&ctx, a)?;
                        self.eval(&ctx, a)
                    }
                    OpArg::Int(ix) => {
                        self.check_spine(&ctx, &op.label, index_tel, &Env::new(), ix)?;
                        recursive.push(k);
                        Arc::new(Value::Unit)
                    }
                };
                ctx = ctx.bind(ty);
            }
            self.check_spine(&ctx, &op.label, index_tel, &Env::new(), &op.ret)?;
        }
        self.checked_sigs.borrow_mut().resize(self.globals().sigs.len(), false);
        self.checked_sigs.borrow_mut()[id.0] = true;
        Ok(())
    }
}

/// The type of constructor `op` at the given carrier:
/// `(ν :: O^IN X) → X ν^OUT`.
pub fn ctor_type(sig: &Signature, carrier: &Term, op: usize) -> Term {
    let tel = algebra_telescope(sig, carrier);
    crate::syntax::unshift(&tel.types[op], op, 0)
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("in `{name}`: {error}")]
pub struct DeclError {
    pub name: String,
    pub error: TypeError,
}

/// Checks every declaration of an environment in order.
pub fn check_globals(globals: &GlobalEnv, trace: bool) -> std::result::Result<(), DeclError> {
    let mut checker = Checker::new(globals);
    checker.nbe.trace = trace;
    for (pos, e) in globals.entries().enumerate() {
        checker.limit = pos;
        let wrap = |error| DeclError {
            name: e.name.clone(),
            error,
        };
        let ctx = Ctx::new();
        checker.check_type(&ctx, &e.ty).map_err(wrap)?;
        if let Some(body) = e.body() {
            checker.limit = pos;
            let ty = checker.eval(&ctx, &e.ty);
            checker.check(&ctx, body, &ty).map_err(wrap)?;
        }
    }
    checker.limit = usize::MAX;
    for (target, image) in &globals.repr_fns {
        let wrap = |error| DeclError {
            name: target.clone(),
            error,
        };
        checker.global_type(target).map_err(wrap)?;
        checker.infer(&Ctx::new(), image).map_err(wrap)?;
    }
    Ok(())
}
