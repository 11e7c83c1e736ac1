//! Bidirectional elaboration of surface expressions.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{DataInfo, ElabError, ErrorKind};
use crate::interp::apps_beta;
use crate::pretty::pretty;
use crate::surface::{Expr, ExprKind, Span};
use crate::syntax::{shift, subst1, substitute, Term};
use crate::typeck::{Checker, Ctx, TypeError};
use crate::value::{Closure, Frame, Val, Value};

type R<T> = Result<T, ElabError>;

/// Named local variables over a typing context.
#[derive(Clone, Debug, Default)]
pub struct Locals {
    pub names: Vec<String>,
    pub ctx: Ctx,
}

impl Locals {
    pub fn new() -> Locals {
        Locals::default()
    }

    pub fn depth(&self) -> usize {
        self.ctx.depth()
    }

    pub fn bind(&self, name: &str, ty: Val) -> Locals {
        let mut names = self.names.clone();
        names.push(name.to_string());
        Locals {
            names,
            ctx: self.ctx.bind(ty),
        }
    }

    pub fn define(&self, name: &str, ty: Val, value: Val) -> Locals {
        let mut names = self.names.clone();
        names.push(name.to_string());
        Locals {
            names,
            ctx: self.ctx.define(ty, value),
        }
    }

    fn lookup(&self, name: &str) -> Option<(usize, Val)> {
        let level = self.names.iter().rposition(|n| n == name)?;
        Some((self.depth() - 1 - level, self.ctx.types[level].clone()))
    }
}

fn err(kind: ErrorKind, span: Span) -> ElabError {
    ElabError { kind, span }
}

pub struct ExprElab<'a> {
    pub ck: Checker<'a>,
    pub data: &'a HashMap<String, DataInfo>,
    pub owner: &'a HashMap<String, String>,
    pub used: &'a RefCell<HashSet<String>>,
}

impl<'a> ExprElab<'a> {
    fn universe() -> Val {
        Arc::new(Value::Universe)
    }

    fn eval(&self, loc: &Locals, t: &Term) -> Val {
        self.ck.eval(&loc.ctx, t)
    }

    fn quote(&self, loc: &Locals, v: &Val) -> Term {
        self.ck.quote(&loc.ctx, v)
    }

    pub fn show(&self, loc: &Locals, v: &Val) -> String {
        self.show_term(loc, &self.quote(loc, v))
    }

    pub fn show_term(&self, loc: &Locals, t: &Term) -> String {
        pretty(t, &self.ck.nbe.globals.sigs, &loc.names)
    }

    /// Converts a core checker error into a located elaboration error.
    pub fn core_error(&self, loc: &Locals, e: TypeError, span: Span) -> ElabError {
        let kind = match e {
            TypeError::Mismatch { expected, found } => ErrorKind::TypeMismatch {
                expected: self.show_term(loc, &expected),
                found: self.show_term(loc, &found),
            },
            TypeError::NotEqual { lhs, rhs } => ErrorKind::NotEqual {
                lhs: self.show_term(loc, &lhs),
                rhs: self.show_term(loc, &rhs),
            },
            other => ErrorKind::Other(other.to_string()),
        };
        err(kind, span)
    }

    fn mismatch(&self, loc: &Locals, expected: &Val, found: &Val, span: Span) -> ElabError {
        err(
            ErrorKind::TypeMismatch {
                expected: self.show(loc, expected),
                found: self.show(loc, found),
            },
            span,
        )
    }

    fn expect_type(&self, loc: &Locals, expected: &Val, found: &Val, span: Span) -> R<()> {
        if self
            .ck
            .nbe
            .conv(loc.depth(), expected, found, Some(&Self::universe()))
        {
            Ok(())
        } else {
            Err(self.mismatch(loc, expected, found, span))
        }
    }

    pub fn check_type(&self, loc: &Locals, e: &Expr) -> R<Term> {
        self.check(loc, e, &Self::universe())
    }

    pub fn check(&self, loc: &Locals, e: &Expr, ty: &Val) -> R<Term> {
        let nbe = &self.ck.nbe;
        let ty = nbe.force(ty);
        match (&e.kind, &*ty) {
            (ExprKind::Lam(x, ann, body), Value::Pi(dom, cod)) => {
                if let Some(a) = ann {
                    let at = self.check_type(loc, a)?;
                    self.expect_type(loc, dom, &self.eval(loc, &at), a.span)?;
                }
                let cod = nbe.apply_closure(cod, &[Value::var(loc.depth())]);
                let b = self.check(&loc.bind(x, dom.clone()), body, &cod)?;
                Ok(Term::lam(b))
            }
            (ExprKind::Lam(..), _) => Err(err(ErrorKind::NotAFunction(self.show(loc, &ty)), e.span)),
            (ExprKind::Pair(a, b), Value::Sigma(dom, fam) | Value::Subset(dom, fam)) => {
                let at = self.check(loc, a, dom)?;
                let fb = nbe.apply_closure(fam, &[self.eval(loc, &at)]);
                let bt = self.check(loc, b, &fb)?;
                Ok(match &*ty {
                    Value::Sigma(..) => Term::pair(at, bt),
                    _ => Term::spair(at, bt),
                })
            }
            (ExprKind::Refl, Value::Eq(aty, x, y)) => {
                if nbe.conv(loc.depth(), x, y, Some(aty)) {
                    Ok(Term::refl(self.quote(loc, x)))
                } else {
                    Err(err(
                        ErrorKind::NotEqual {
                            lhs: self.show(loc, x),
                            rhs: self.show(loc, y),
                        },
                        e.span,
                    ))
                }
            }
            (ExprKind::Let(..) | ExprKind::LetPair(..), _) => Ok(self.let_in(loc, e, Some(&ty))?.0),
            (ExprKind::Unrepr(a), _) => {
                let at = self.check(loc, a, &nbe.repr_ty(&ty))?;
                Ok(Term::unrepr(at))
            }
            _ => {
                let (t, found) = self.infer(loc, e)?;
                self.expect_type(loc, &ty, &found, e.span)?;
                Ok(t)
            }
        }
    }

    fn let_in(&self, loc: &Locals, e: &Expr, expected: Option<&Val>) -> R<(Term, Val)> {
        let nbe = &self.ck.nbe;
        let body_in = |inner: &Locals, body: &Expr| -> R<(Term, Val)> {
            match expected {
                Some(ty) => Ok((self.check(inner, body, ty)?, ty.clone())),
                None => self.infer(inner, body),
            }
        };
        match &e.kind {
            ExprKind::Let(x, v, body) => {
                let (vt, vty) = self.infer(loc, v)?;
                let inner = loc.define(x, vty, self.eval(loc, &vt));
                let (bt, bty) = body_in(&inner, body)?;
                Ok((subst1(&bt, &vt), bty))
            }
            ExprKind::LetPair(x, y, v, body) => {
                let (vt, vty) = self.infer(loc, v)?;
                let vty = nbe.force(&vty);
                let (first, second, dom, fam) = match &*vty {
                    Value::Sigma(dom, fam) => (Term::fst(vt.clone()), Term::snd(vt), dom, fam),
                    Value::Subset(dom, fam) => (Term::sfst(vt.clone()), Term::ssnd(vt), dom, fam),
                    _ => return Err(err(ErrorKind::NotAPair(self.show(loc, &vty)), v.span)),
                };
                let fv = self.eval(loc, &first);
                let sty = nbe.apply_closure(fam, std::slice::from_ref(&fv));
                let inner = loc
                    .define(x, dom.clone(), fv)
                    .define(y, sty, self.eval(loc, &second));
                let (bt, bty) = body_in(&inner, body)?;
                Ok((substitute(&bt, &[first, second], 0), bty))
            }
            _ => unreachable!("let_in on a non-let"),
        }
    }

    fn global(&self, name: &str, span: Span) -> R<(Term, Val)> {
        match self.ck.nbe.global_type(name) {
            Some(ty) => {
                if let Some(d) = self.owner.get(name) {
                    self.used.borrow_mut().insert(d.clone());
                }
                Ok((Term::global(name), ty))
            }
            None => Err(err(ErrorKind::UnboundVariable(name.into()), span)),
        }
    }

    fn literal(&self, n: u64, span: Span) -> R<(Term, Val)> {
        let missing = || err(ErrorKind::Other("numeric literals need the `Nat` data type".into()), span);
        let info = self.data.get("Nat").ok_or_else(missing)?;
        let sig = self.ck.nbe.globals.sig(info.sig);
        let zero = sig.ops.iter().position(|o| o.arity() == 0).ok_or_else(missing)?;
        let succ = sig
            .ops
            .iter()
            .position(|o| o.arity() == 1 && o.is_recursive(0))
            .ok_or_else(missing)?;
        let (zt, ty) = self.global(&info.ctors[zero], span)?;
        let (st, _) = self.global(&info.ctors[succ], span)?;
        let t = (0..n).fold(zt, |acc, _| Term::app(st.clone(), acc));
        Ok((t, ty))
    }

    pub fn infer(&self, loc: &Locals, e: &Expr) -> R<(Term, Val)> {
        let nbe = &self.ck.nbe;
        let u = Self::universe;
        match &e.kind {
            ExprKind::Var(x) => match loc.lookup(x) {
                Some((i, ty)) => Ok((Term::Var(i), ty)),
                None => self.global(x, e.span),
            },
            ExprKind::Num(n) => self.literal(*n, e.span),
            ExprKind::Universe => Ok((Term::Universe, u())),
            ExprKind::UnitTy => Ok((Term::Unit, u())),
            ExprKind::Tt => Ok((Term::Tt, Arc::new(Value::Unit))),
            ExprKind::Refl => Err(err(ErrorKind::CannotInfer("`refl`".into()), e.span)),
            ExprKind::App(f, a) if matches!(f.kind, ExprKind::Refl) => {
                let (at, aty) = self.infer(loc, a)?;
                let av = self.eval(loc, &at);
                Ok((Term::refl(at), Arc::new(Value::Eq(aty, av.clone(), av))))
            }
            ExprKind::App(f, a) => {
                let (ft, fty) = self.infer(loc, f)?;
                let fty = nbe.force(&fty);
                match &*fty {
                    Value::Pi(dom, cod) => {
                        let at = self.check(loc, a, dom)?;
                        let ty = nbe.apply_closure(cod, &[self.eval(loc, &at)]);
                        Ok((Term::app(ft, at), ty))
                    }
                    _ => Err(err(ErrorKind::NotAFunction(self.show(loc, &fty)), f.span)),
                }
            }
            ExprKind::Lam(x, Some(ann), body) => {
                let at = self.check_type(loc, ann)?;
                let av = self.eval(loc, &at);
                let inner = loc.bind(x, av.clone());
                let (bt, bty) = self.infer(&inner, body)?;
                let cod = Closure::Syntax {
                    env: loc.ctx.env.clone(),
                    body: Arc::new(self.quote(&inner, &bty)),
                };
                Ok((Term::lam(bt), Arc::new(Value::Pi(av, cod))))
            }
            ExprKind::Lam(_, None, _) => Err(err(
                ErrorKind::CannotInfer("an unannotated lambda".into()),
                e.span,
            )),
            ExprKind::Pi(x, a, b) | ExprKind::Sigma(x, a, b) | ExprKind::Subset(x, a, b) => {
                let at = self.check_type(loc, a)?;
                let bt = self.check_type(&loc.bind(x, self.eval(loc, &at)), b)?;
                let t = match &e.kind {
                    ExprKind::Pi(..) => Term::pi(at, bt),
                    ExprKind::Sigma(..) => Term::sigma(at, bt),
                    _ => Term::subset(at, bt),
                };
                Ok((t, u()))
            }
            ExprKind::Pair(a, b) => {
                let (at, aty) = self.infer(loc, a)?;
                let (bt, bty) = self.infer(loc, b)?;
                let fam = Closure::Syntax {
                    env: loc.ctx.env.clone(),
                    body: Arc::new(shift(&self.quote(loc, &bty), 1, 0)),
                };
                Ok((Term::pair(at, bt), Arc::new(Value::Sigma(aty, fam))))
            }
            ExprKind::Fst(p) | ExprKind::Snd(p) => {
                let (pt, pty) = self.infer(loc, p)?;
                let pty = nbe.force(&pty);
                let first = matches!(e.kind, ExprKind::Fst(_));
                match &*pty {
                    Value::Sigma(dom, fam) | Value::Subset(dom, fam) => {
                        let subset = matches!(&*pty, Value::Subset(..));
                        let fst = if subset {
                            Term::sfst(pt.clone())
                        } else {
                            Term::fst(pt.clone())
                        };
                        if first {
                            return Ok((fst, dom.clone()));
                        }
                        let ty = nbe.apply_closure(fam, &[self.eval(loc, &fst)]);
                        let snd = if subset { Term::ssnd(pt) } else { Term::snd(pt) };
                        Ok((snd, ty))
                    }
                    _ => Err(err(ErrorKind::NotAPair(self.show(loc, &pty)), p.span)),
                }
            }
            ExprKind::Eq(a, b) => {
                let (at, bt, ty) = match self.infer(loc, a) {
                    Ok((at, aty)) => {
                        let bt = self.check(loc, b, &aty)?;
                        (at, bt, aty)
                    }
                    Err(ElabError {
                        kind: ErrorKind::CannotInfer(_),
                        ..
                    }) => {
                        let (bt, bty) = self.infer(loc, b)?;
                        let at = self.check(loc, a, &bty)?;
                        (at, bt, bty)
                    }
                    Err(other) => return Err(other),
                };
                Ok((Term::eq(self.quote(loc, &ty), at, bt), u()))
            }
            ExprKind::Ann(x, t) => {
                let tt = self.check_type(loc, t)?;
                let tv = self.eval(loc, &tt);
                Ok((self.check(loc, x, &tv)?, tv))
            }
            ExprKind::Let(..) | ExprKind::LetPair(..) => self.let_in(loc, e, None),
            ExprKind::ReprTy(a) => Ok((Term::repr_ty(self.check_type(loc, a)?), u())),
            ExprKind::Repr(a) => {
                let (at, aty) = self.infer(loc, a)?;
                Ok((Term::repr(at), nbe.repr_ty(&aty)))
            }
            ExprKind::Unrepr(a) => {
                let (at, aty) = self.infer(loc, a)?;
                match &*nbe.force(&aty) {
                    Value::Neutral(h, frames) if matches!(frames.last(), Some(Frame::ReprTy)) => {
                        let ty = Value::Neutral(h.clone(), frames[..frames.len() - 1].to_vec());
                        Ok((Term::unrepr(at), Arc::new(ty)))
                    }
                    _ => Err(err(
                        ErrorKind::CannotInfer("`unrepr` without an expected type".into()),
                        e.span,
                    )),
                }
            }
            ExprKind::J(m, r, p) => self.infer_j(loc, m, r, p),
        }
    }

    fn infer_j(&self, loc: &Locals, m: &Expr, r: &Expr, p: &Expr) -> R<(Term, Val)> {
        let nbe = &self.ck.nbe;
        let (pt, pty) = self.infer(loc, p)?;
        let pty = nbe.force(&pty);
        let (aty, x, y) = match &*pty {
            Value::Eq(a, x, y) => (a.clone(), x.clone(), y.clone()),
            _ => return Err(err(ErrorKind::NotAnEquality(self.show(loc, &pty)), p.span)),
        };
        let a = self.quote(loc, &aty);
        let motive_ty = Term::pi(
            a.clone(),
            Term::pi(
                shift(&a, 1, 0),
                Term::pi(
                    Term::eq(shift(&a, 2, 0), Term::Var(1), Term::Var(0)),
                    Term::Universe,
                ),
            ),
        );
        let mt = self.check(loc, m, &self.eval(loc, &motive_ty))?;
        let refl_ty = Term::pi(
            a,
            apps_beta(
                &shift(&mt, 1, 0),
                &[Term::Var(0), Term::Var(0), Term::refl(Term::Var(0))],
            ),
        );
        let rt = self.check(loc, r, &self.eval(loc, &refl_ty))?;
        let motive = apps_beta(&shift(&mt, 3, 0), &[Term::Var(2), Term::Var(1), Term::Var(0)]);
        let refl = apps_beta(&shift(&rt, 1, 0), &[Term::Var(0)]);
        let ty = nbe.apply_all(&self.eval(loc, &mt), &[x, y, self.eval(loc, &pt)]);
        Ok((Term::j(motive, refl, pt), ty))
    }
}
