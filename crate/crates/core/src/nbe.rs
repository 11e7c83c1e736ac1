//! Evaluation, Repr computation and quotation.

use std::sync::{Arc, OnceLock};

use crate::env::{EntryKind, GlobalEnv};
use crate::syntax::{Algebra, OpArg, SigId, Term};
use crate::value::{
    Closure, ElimFrame, Env, Frame, Head, Hypothesis, MethodState, ReprCtor, Val, Value, Wrap,
};

/// An evaluator bound to a global environment.
#[derive(Clone, Copy)]
pub struct Nbe<'g> {
    pub globals: &'g GlobalEnv,
    pub trace: bool,
}

fn val(v: Value) -> Val {
    Arc::new(v)
}

fn neutral(h: Head, frames: Vec<Frame>) -> Val {
    val(Value::Neutral(h, frames))
}

fn with_frame(h: &Head, frames: &[Frame], f: Frame) -> Val {
    let mut fr = frames.to_vec();
    fr.push(f);
    neutral(h.clone(), fr)
}

impl<'g> Nbe<'g> {
    pub fn new(globals: &'g GlobalEnv) -> Nbe<'g> {
        Nbe {
            globals,
            trace: false,
        }
    }

    pub fn eval(&self, t: &Term, env: &Env) -> Val {
        let syn = |body: &Arc<Term>| Closure::Syntax {
            env: env.clone(),
            body: body.clone(),
        };
        let ev = |t: &Term| self.eval(t, env);
        let all = |ts: &[Term]| ts.iter().map(ev).collect::<Vec<_>>();
        match t {
            Term::Var(i) => env.get(*i).clone(),
            Term::Universe => val(Value::Universe),
            Term::Unit => val(Value::Unit),
            Term::Tt => val(Value::Tt),
            Term::Pi(a, b) => val(Value::Pi(ev(a), syn(b))),
            Term::Lam(b) => val(Value::Lam(syn(b))),
            Term::App(f, a) => self.apply(&ev(f), ev(a)),
            Term::Sigma(a, b) => val(Value::Sigma(ev(a), syn(b))),
            Term::Pair(a, b) => val(Value::Pair(ev(a), ev(b))),
            Term::Fst(p) => self.fst(&ev(p)),
            Term::Snd(p) => self.snd(&ev(p)),
            Term::SubsetSigma(a, b) => val(Value::Subset(ev(a), syn(b))),
            Term::SubsetPair(a, b) => val(Value::SPair(ev(a), ev(b))),
            Term::SubsetFst(p) => self.sfst(&ev(p)),
            Term::SubsetSnd(p) => self.ssnd(&ev(p)),
            Term::Eq(a, x, y) => val(Value::Eq(ev(a), ev(x), ev(y))),
            Term::Refl(a) => val(Value::Refl(ev(a))),
            Term::J(m, r, p) => self.j(syn(m), syn(r), &ev(p)),
            Term::DataTy { sig, alg, indices } => val(Value::Data {
                sig: *sig,
                alg: alg.clone(),
                indices: all(indices),
            }),
            Term::Ctor { sig, op, alg, args } => val(Value::Ctor {
                sig: *sig,
                op: *op,
                alg: alg.clone(),
                args: all(args),
            }),
            Term::Elim {
                sig,
                alg,
                motive,
                methods,
                indices,
                scrutinee,
            } => {
                let frame = ElimFrame {
                    sig: *sig,
                    alg: alg.clone(),
                    motive: syn(motive),
                    methods: all(methods),
                };
                self.elim(&frame, all(indices), &ev(scrutinee))
            }
            Term::ReprTy(a) => self.repr_ty(&ev(a)),
            Term::ReprTm(a) => self.repr(&ev(a)),
            Term::UnreprTm(a) => self.unrepr(&ev(a)),
            Term::Global(n) => self.global(n),
            Term::Postulate(n) => Value::postulate(n.clone()),
        }
    }

    pub fn eval_closed(&self, t: &Term) -> Val {
        self.eval(t, &Env::new())
    }

    pub fn global(&self, name: &str) -> Val {
        let entry = self
            .globals
            .get(name)
            .unwrap_or_else(|| panic!("unknown global `{name}`"));
        match &entry.kind {
            EntryKind::Def(body) => entry
                .value
                .get_or_init(|| self.eval_closed(body))
                .clone(),
            EntryKind::Postulate => Value::postulate(name.into()),
        }
    }

    pub fn global_type(&self, name: &str) -> Option<Val> {
        let entry = self.globals.get(name)?;
        Some(entry.ty_value.get_or_init(|| self.eval_closed(&entry.ty)).clone())
    }

    pub fn apply_closure(&self, c: &Closure, args: &[Val]) -> Val {
        match c {
            Closure::Syntax { env, body } => self.eval(body, &env.extend(args.iter().cloned())),
            Closure::Post(inner, w) => self.wrap(*w, &self.apply_closure(inner, args)),
            Closure::Pre(inner, w) => {
                let args: Vec<Val> = args.iter().map(|a| self.wrap(*w, a)).collect();
                self.apply_closure(inner, &args)
            }
            Closure::Eta(f) => self.apply_all(f, args),
            Closure::Hyp(h) => h
                .cell
                .get_or_init(|| self.elim(&h.frame, h.indices.clone(), &h.scrutinee))
                .clone(),
            Closure::Method(m) => {
                let mut got = m.got.clone();
                got.extend(args.iter().cloned());
                if got.len() < m.hyp_mask.len() {
                    return val(Value::Lam(Closure::Method(Arc::new(MethodState {
                        method: m.method.clone(),
                        hyp_mask: m.hyp_mask.clone(),
                        got,
                        dir: m.dir,
                    }))));
                }
                // Hypotheses arrive on the transported side and are mapped
                // back before calling the original method.
                let back = match m.dir {
                    Wrap::Repr => Wrap::Unrepr,
                    _ => Wrap::Repr,
                };
                let inputs: Vec<Val> = got
                    .iter()
                    .zip(m.hyp_mask.iter())
                    .map(|(a, &is_hyp)| {
                        if is_hyp {
                            val(Value::Lam(Closure::Post(
                                Arc::new(Closure::Eta(a.clone())),
                                back,
                            )))
                        } else {
                            a.clone()
                        }
                    })
                    .collect();
                self.wrap(m.dir, &self.apply_all(&m.method, &inputs))
            }
        }
    }

    fn wrap(&self, w: Wrap, v: &Val) -> Val {
        match w {
            Wrap::ReprTy => self.repr_ty(v),
            Wrap::Repr => self.repr(v),
            Wrap::Unrepr => self.unrepr(v),
        }
    }

    pub fn apply(&self, f: &Val, a: Val) -> Val {
        match &**f {
            Value::ReprCtor(_) => self.apply(&self.force(f), a),
            Value::Lam(c) => self.apply_closure(c, &[a]),
            Value::Neutral(Head::Unrepr(w), frames) if frames.is_empty() => {
                self.unrepr(&self.apply(w, a))
            }
            Value::Neutral(h, frames) => with_frame(h, frames, Frame::App(a)),
            _ => panic!("application of a non-function"),
        }
    }

    pub fn apply_all(&self, f: &Val, args: &[Val]) -> Val {
        args.iter().fold(f.clone(), |f, a| self.apply(&f, a.clone()))
    }

    pub fn fst(&self, p: &Val) -> Val {
        match &**p {
            Value::ReprCtor(_) => self.fst(&self.force(p)),
            Value::Pair(a, _) => a.clone(),
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => self.unrepr(&self.fst(w)),
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::Fst),
            _ => panic!("first projection of a non-pair"),
        }
    }

    pub fn snd(&self, p: &Val) -> Val {
        match &**p {
            Value::ReprCtor(_) => self.snd(&self.force(p)),
            Value::Pair(_, b) => b.clone(),
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => self.unrepr(&self.snd(w)),
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::Snd),
            _ => panic!("second projection of a non-pair"),
        }
    }

    pub fn sfst(&self, p: &Val) -> Val {
        match &**p {
            Value::ReprCtor(_) => self.sfst(&self.force(p)),
            Value::SPair(a, _) => a.clone(),
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => self.unrepr(&self.sfst(w)),
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::SFst),
            _ => panic!("subset projection of a non-pair"),
        }
    }

    pub fn ssnd(&self, p: &Val) -> Val {
        match &**p {
            Value::ReprCtor(_) => self.ssnd(&self.force(p)),
            Value::SPair(_, b) => b.clone(),
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => self.unrepr(&self.ssnd(w)),
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::SSnd),
            _ => panic!("subset projection of a non-pair"),
        }
    }

    pub fn j(&self, motive: Closure, refl: Closure, p: &Val) -> Val {
        match &**p {
            Value::ReprCtor(_) => self.j(motive, refl, &self.force(p)),
            Value::Refl(a) => self.apply_closure(&refl, std::slice::from_ref(a)),
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => match &**w {
                Value::Refl(a) => self.apply_closure(&refl, &[self.unrepr(a)]),
                _ => with_frame(&Head::Unrepr(w.clone()), fr, Frame::J { motive, refl }),
            },
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::J { motive, refl }),
            _ => panic!("J on a non-proof"),
        }
    }

    pub fn elim(&self, frame: &ElimFrame, indices: Vec<Val>, scrut: &Val) -> Val {
        match &**scrut {
            Value::Ctor { op, args, .. } => self.data_comp(frame, *op, args),
            Value::ReprCtor(_) => self.elim(frame, indices, &self.force(scrut)),
            Value::Neutral(h, fr) => with_frame(
                h,
                fr,
                Frame::Elim {
                    frame: frame.clone(),
                    indices,
                },
            ),
            _ => panic!("eliminator applied to a non-constructor"),
        }
    }

    /// `elim M β ν^OUT (ctor_O ν) = β_O (elim M β $ ν)`, with lazily sampled
    /// hypotheses.
    fn data_comp(&self, frame: &ElimFrame, op: usize, args: &[Val]) -> Val {
        let sig = self.globals.sig(frame.sig);
        let mut inputs = Vec::with_capacity(args.len() * 2);
        for (k, arg) in sig.ops[op].args.iter().enumerate() {
            inputs.push(args[k].clone());
            if let OpArg::Int(ix) = arg {
                let env = Env::new().extend(args[..k].iter().cloned());
                let indices = ix.iter().map(|t| self.eval(t, &env)).collect();
                inputs.push(val(Value::Lam(Closure::Hyp(Arc::new(Hypothesis {
                    frame: frame.clone(),
                    indices,
                    scrutinee: args[k].clone(),
                    cell: OnceLock::new(),
                })))));
            }
        }
        self.apply_all(&frame.methods[op], &inputs)
    }

    fn hyp_mask(&self, sig: SigId, op: usize) -> Arc<Vec<bool>> {
        let mut mask = Vec::new();
        for a in &self.globals.sig(sig).ops[op].args {
            mask.push(false);
            if matches!(a, OpArg::Int(_)) {
                mask.push(true);
            }
        }
        Arc::new(mask)
    }

    /// `repr* β` or `unrepr* β`, depending on `dir`.
    fn transport_methods(&self, frame: &ElimFrame, dir: Wrap) -> Vec<Val> {
        frame
            .methods
            .iter()
            .enumerate()
            .map(|(op, m)| {
                let mask = self.hyp_mask(frame.sig, op);
                if mask.is_empty() {
                    return self.wrap(dir, m);
                }
                if let Value::Lam(Closure::Method(st)) = &**m {
                    if st.got.is_empty() && st.dir != dir {
                        return st.method.clone();
                    }
                }
                val(Value::Lam(Closure::Method(Arc::new(MethodState {
                    method: m.clone(),
                    hyp_mask: mask,
                    got: Vec::new(),
                    dir,
                }))))
            })
            .collect()
    }

    /// Evaluates a `ReprCtor` to the algebra operation applied to the
    /// represented inputs.
    pub fn force(&self, v: &Val) -> Val {
        let mut v = v.clone();
        while let Value::ReprCtor(rc) = &*v {
            let next = rc
                .forced
                .get_or_init(|| {
                    let sig = self.globals.sig(rc.sig);
                    let args: Vec<Val> = rc
                        .args
                        .iter()
                        .zip(&sig.ops[rc.op].args)
                        .map(|(a, k)| match k {
                            OpArg::Int(_) => self.repr(a),
                            OpArg::Ext(_) => a.clone(),
                        })
                        .collect();
                    match &rc.alg {
                        Algebra::Custom(_) => {
                            let op = rc.alg.operation(rc.op).expect("algebra operation");
                            self.apply_all(&self.eval_closed(op), &args)
                        }
                        Algebra::Default => val(Value::Ctor {
                            sig: rc.sig,
                            op: rc.op,
                            alg: Algebra::Default,
                            args,
                        }),
                    }
                })
                .clone();
            v = next;
        }
        v
    }

    pub fn repr_ty(&self, v: &Val) -> Val {
        match &**v {
            Value::Universe | Value::Unit => v.clone(),
            Value::Pi(a, c) => val(Value::Pi(a.clone(), Closure::Post(Arc::new(c.clone()), Wrap::ReprTy))),
            Value::Sigma(a, c) => val(Value::Sigma(self.repr_ty(a), repr_family(c))),
            Value::Subset(a, c) => val(Value::Subset(self.repr_ty(a), repr_family(c))),
            Value::Eq(a, x, y) => val(Value::Eq(self.repr_ty(a), self.repr(x), self.repr(y))),
            Value::Data { alg, indices, .. } => match alg.carrier() {
                Some(x) => self.apply_all(&self.eval_closed(x), indices),
                None => v.clone(),
            },
            Value::Neutral(h, fr) => with_frame(h, fr, Frame::ReprTy),
            _ => v.clone(),
        }
    }

    pub fn repr(&self, v: &Val) -> Val {
        match &**v {
            Value::Lam(c) => val(Value::Lam(Closure::Post(Arc::new(c.clone()), Wrap::Repr))),
            Value::Pair(a, b) => val(Value::Pair(self.repr(a), self.repr(b))),
            Value::SPair(a, b) => val(Value::SPair(self.repr(a), self.repr(b))),
            Value::Refl(a) => val(Value::Refl(self.repr(a))),
            Value::Ctor { sig, op, alg, args } => val(Value::ReprCtor(Arc::new(ReprCtor {
                sig: *sig,
                op: *op,
                alg: alg.clone(),
                args: args.clone(),
                forced: OnceLock::new(),
            }))),
            Value::ReprCtor(_) => self.repr(&self.force(v)),
            Value::Neutral(h, fr) => self.repr_neutral(h, fr),
            _ => v.clone(),
        }
    }

    fn repr_neutral(&self, h: &Head, frames: &[Frame]) -> Val {
        for i in (0..frames.len()).rev() {
            let mut fr = frames.to_vec();
            match &frames[i] {
                Frame::App(_) | Frame::Fst | Frame::Snd | Frame::SFst | Frame::SSnd => continue,
                Frame::Unrepr => {
                    fr.remove(i);
                }
                Frame::J { motive, refl } => {
                    fr[i] = Frame::J {
                        motive: Closure::Post(Arc::new(motive.clone()), Wrap::ReprTy),
                        refl: Closure::Post(Arc::new(refl.clone()), Wrap::Repr),
                    };
                }
                Frame::Elim { frame, indices } => {
                    let methods = self.transport_methods(frame, Wrap::Repr);
                    fr[i] = Frame::Elim {
                        frame: ElimFrame {
                            sig: frame.sig,
                            alg: frame.alg.clone(),
                            motive: Closure::Post(Arc::new(frame.motive.clone()), Wrap::ReprTy),
                            methods,
                        },
                        indices: indices.clone(),
                    };
                }
                Frame::Repr | Frame::ReprTy => fr.insert(i + 1, Frame::Repr),
            }
            return neutral(h.clone(), fr);
        }
        match h {
            Head::Unrepr(w) => self.replay(w, frames),
            _ => {
                let mut fr = frames.to_vec();
                fr.insert(0, Frame::Repr);
                neutral(h.clone(), fr)
            }
        }
    }

    pub fn unrepr(&self, v: &Val) -> Val {
        match &**v {
            Value::ReprCtor(rc) => val(Value::Ctor {
                sig: rc.sig,
                op: rc.op,
                alg: rc.alg.clone(),
                args: rc.args.clone(),
            }),
            Value::Universe
            | Value::Pi(..)
            | Value::Sigma(..)
            | Value::Subset(..)
            | Value::Eq(..)
            | Value::Unit
            | Value::Data { .. } => v.clone(),
            Value::Neutral(h, fr) => self.unrepr_neutral(h, fr),
            _ => neutral(Head::Unrepr(v.clone()), Vec::new()),
        }
    }

    fn unrepr_neutral(&self, h: &Head, frames: &[Frame]) -> Val {
        for i in (0..frames.len()).rev() {
            let mut fr = frames.to_vec();
            match &frames[i] {
                Frame::App(_) | Frame::Fst | Frame::Snd | Frame::SFst | Frame::SSnd => continue,
                Frame::Repr => {
                    fr.remove(i);
                    return neutral(h.clone(), fr);
                }
                Frame::J { motive, refl } => {
                    if let Some(m) = unwrap_repr_motive(motive) {
                        fr[i] = Frame::J {
                            motive: m,
                            refl: Closure::Post(Arc::new(refl.clone()), Wrap::Unrepr),
                        };
                        return neutral(h.clone(), fr);
                    }
                }
                Frame::Elim { frame, indices } => {
                    if let Some(m) = unwrap_repr_motive(&frame.motive) {
                        let methods = self.transport_methods(frame, Wrap::Unrepr);
                        fr[i] = Frame::Elim {
                            frame: ElimFrame {
                                sig: frame.sig,
                                alg: frame.alg.clone(),
                                motive: m,
                                methods,
                            },
                            indices: indices.clone(),
                        };
                        return neutral(h.clone(), fr);
                    }
                }
                Frame::Unrepr | Frame::ReprTy => {}
            }
            break;
        }
        with_frame(h, frames, Frame::Unrepr)
    }

    /// Re-applies a list of elimination frames to a value.
    pub fn replay(&self, v: &Val, frames: &[Frame]) -> Val {
        frames.iter().fold(v.clone(), |acc, f| match f {
            Frame::App(a) => self.apply(&acc, a.clone()),
            Frame::Fst => self.fst(&acc),
            Frame::Snd => self.snd(&acc),
            Frame::SFst => self.sfst(&acc),
            Frame::SSnd => self.ssnd(&acc),
            Frame::J { motive, refl } => self.j(motive.clone(), refl.clone(), &acc),
            Frame::Elim { frame, indices } => self.elim(frame, indices.clone(), &acc),
            Frame::Repr => self.repr(&acc),
            Frame::Unrepr => self.unrepr(&acc),
            Frame::ReprTy => self.repr_ty(&acc),
        })
    }

    pub fn quote(&self, v: &Val, depth: usize) -> Term {
        let q = |v: &Val| self.quote(v, depth);
        let under = |c: &Closure, n: usize| {
            let vars: Vec<Val> = (depth..depth + n).map(Value::var).collect();
            self.quote(&self.apply_closure(c, &vars), depth + n)
        };
        match &**v {
            Value::Universe => Term::Universe,
            Value::Unit => Term::Unit,
            Value::Tt => Term::Tt,
            Value::Pi(a, c) => Term::pi(q(a), under(c, 1)),
            Value::Lam(c) => Term::lam(under(c, 1)),
            Value::Sigma(a, c) => Term::sigma(q(a), under(c, 1)),
            Value::Pair(a, b) => Term::pair(q(a), q(b)),
            Value::Subset(a, c) => Term::subset(q(a), under(c, 1)),
            Value::SPair(a, b) => Term::spair(q(a), q(b)),
            Value::Eq(a, x, y) => Term::eq(q(a), q(x), q(y)),
            Value::Refl(a) => Term::refl(q(a)),
            Value::Data { sig, alg, indices } => Term::DataTy {
                sig: *sig,
                alg: alg.clone(),
                indices: indices.iter().map(q).collect(),
            },
            Value::Ctor { sig, op, alg, args } => Term::Ctor {
                sig: *sig,
                op: *op,
                alg: alg.clone(),
                args: args.iter().map(q).collect(),
            },
            Value::ReprCtor(_) => q(&self.force(v)),
            Value::Neutral(h, frames) => {
                let head = match h {
                    Head::Var(l) => Term::Var(depth - 1 - l),
                    Head::Postulate(n) => Term::Postulate(n.clone()),
                    Head::Unrepr(w) => Term::unrepr(q(w)),
                };
                frames.iter().fold(head, |t, f| match f {
                    Frame::App(a) => Term::app(t, q(a)),
                    Frame::Fst => Term::fst(t),
                    Frame::Snd => Term::snd(t),
                    Frame::SFst => Term::sfst(t),
                    Frame::SSnd => Term::ssnd(t),
                    Frame::J { motive, refl } => Term::j(under(motive, 3), under(refl, 1), t),
                    Frame::Elim { frame, indices } => Term::Elim {
                        sig: frame.sig,
                        alg: frame.alg.clone(),
                        motive: Arc::new(under(&frame.motive, indices.len() + 1)),
                        methods: frame.methods.iter().map(q).collect(),
                        indices: indices.iter().map(q).collect(),
                        scrutinee: Arc::new(t),
                    },
                    Frame::Repr => Term::repr(t),
                    Frame::Unrepr => Term::unrepr(t),
                    Frame::ReprTy => Term::repr_ty(t),
                })
            }
        }
    }

    /// Normal form of a term whose free variables are `depth` neutral
    /// variables.
    pub fn normalize(&self, t: &Term, depth: usize) -> Term {
        self.quote(&self.eval(t, &fresh_env(depth)), depth)
    }
}

/// An environment of `depth` fresh variables.
pub fn fresh_env(depth: usize) -> Env {
    Env::new().extend((0..depth).map(Value::var))
}

/// `x. Repr (B [unrepr x])`.
fn repr_family(c: &Closure) -> Closure {
    Closure::Pre(
        Arc::new(Closure::Post(Arc::new(c.clone()), Wrap::ReprTy)),
        Wrap::Unrepr,
    )
}

fn unwrap_repr_motive(c: &Closure) -> Option<Closure> {
    match c {
        Closure::Post(inner, Wrap::ReprTy) => Some((**inner).clone()),
        Closure::Syntax { env, body } => match &**body {
            Term::ReprTy(b) => Some(Closure::Syntax {
                env: env.clone(),
                body: b.clone(),
            }),
            _ => None,
        },
        _ => None,
    }
}
