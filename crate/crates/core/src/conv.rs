//! Definitional equality on values.

use crate::nbe::Nbe;
use crate::value::{Closure, Frame, Head, Val, Value};

impl Nbe<'_> {
    /// Decides `a = b`, using `ty` (when known) for η-laws.
    pub fn conv(&self, depth: usize, a: &Val, b: &Val, ty: Option<&Val>) -> bool {
        if self.trace {
            eprintln!(
                "conv[{depth}] {}  ≟  {}",
                self.quote(a, depth),
                self.quote(b, depth)
            );
        }
        let a = self.force(a);
        let b = self.force(b);
        if std::sync::Arc::ptr_eq(&a, &b) {
            return true;
        }
        let result = match ty.map(|t| &**t) {
            Some(Value::Pi(_, cod)) => {
                let x = Value::var(depth);
                let cod = self.apply_closure(cod, std::slice::from_ref(&x));
                self.conv(
                    depth + 1,
                    &self.apply(&a, x.clone()),
                    &self.apply(&b, x),
                    Some(&cod),
                )
            }
            Some(Value::Sigma(dom, fam)) => {
                let fa = self.fst(&a);
                self.conv(depth, &fa, &self.fst(&b), Some(dom))
                    && self.conv(
                        depth,
                        &self.snd(&a),
                        &self.snd(&b),
                        Some(&self.apply_closure(fam, std::slice::from_ref(&fa))),
                    )
            }
            Some(Value::Subset(dom, fam)) => {
                let fa = self.sfst(&a);
                self.conv(depth, &fa, &self.sfst(&b), Some(dom))
                    && self.conv(
                        depth,
                        &self.ssnd(&a),
                        &self.ssnd(&b),
                        Some(&self.apply_closure(fam, std::slice::from_ref(&fa))),
                    )
            }
            Some(Value::Unit) => true,
            Some(Value::Eq(..)) => self.conv_struct(depth, &self.open_refl(&a), &self.open_refl(&b)),
            _ => self.conv_struct(depth, &a, &b),
        };
        if self.trace && !result {
            eprintln!("conv[{depth}] mismatch");
        }
        result
    }

    /// `unrepr (refl x) = refl (unrepr x)`, usable once the type is known to
    /// be an equality.
    fn open_refl(&self, v: &Val) -> Val {
        match &**v {
            Value::Neutral(Head::Unrepr(w), fr) if fr.is_empty() => match &**w {
                Value::Refl(x) => std::sync::Arc::new(Value::Refl(self.unrepr(x))),
                _ => v.clone(),
            },
            _ => v.clone(),
        }
    }

    fn conv_under(&self, depth: usize, c1: &Closure, c2: &Closure, n: usize, ty: Option<&Val>) -> bool {
        let vars: Vec<Val> = (depth..depth + n).map(Value::var).collect();
        self.conv(
            depth + n,
            &self.apply_closure(c1, &vars),
            &self.apply_closure(c2, &vars),
            ty,
        )
    }

    fn conv_all(&self, depth: usize, a: &[Val], b: &[Val]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.conv(depth, x, y, None))
    }

    fn conv_struct(&self, depth: usize, a: &Val, b: &Val) -> bool {
        let u = std::sync::Arc::new(Value::Universe);
        let is_open = |v: &Val| matches!(&**v, Value::Neutral(..));
        match (&**a, &**b) {
            (Value::Universe, Value::Universe)
            | (Value::Unit, Value::Unit)
            | (Value::Tt, Value::Tt)
            | (Value::Tt, Value::Neutral(..))
            | (Value::Neutral(..), Value::Tt) => true,
            (Value::Pi(a1, c1), Value::Pi(a2, c2))
            | (Value::Sigma(a1, c1), Value::Sigma(a2, c2))
            | (Value::Subset(a1, c1), Value::Subset(a2, c2)) => {
                self.conv(depth, a1, a2, Some(&u)) && self.conv_under(depth, c1, c2, 1, Some(&u))
            }
            (Value::Lam(_), Value::Lam(_) | Value::Neutral(..))
            | (Value::Neutral(..), Value::Lam(_)) => {
                let x = Value::var(depth);
                self.conv(depth + 1, &self.apply(a, x.clone()), &self.apply(b, x), None)
            }
            (Value::Pair(..), _) if matches!(&**b, Value::Pair(..)) || is_open(b) => {
                self.conv(depth, &self.fst(a), &self.fst(b), None)
                    && self.conv(depth, &self.snd(a), &self.snd(b), None)
            }
            (_, Value::Pair(..)) if is_open(a) => {
                self.conv(depth, &self.fst(a), &self.fst(b), None)
                    && self.conv(depth, &self.snd(a), &self.snd(b), None)
            }
            (Value::SPair(..), _) if matches!(&**b, Value::SPair(..)) || is_open(b) => {
                self.conv(depth, &self.sfst(a), &self.sfst(b), None)
                    && self.conv(depth, &self.ssnd(a), &self.ssnd(b), None)
            }
            (_, Value::SPair(..)) if is_open(a) => {
                self.conv(depth, &self.sfst(a), &self.sfst(b), None)
                    && self.conv(depth, &self.ssnd(a), &self.ssnd(b), None)
            }
            (Value::Eq(t1, x1, y1), Value::Eq(t2, x2, y2)) => {
                self.conv(depth, t1, t2, Some(&u))
                    && self.conv(depth, x1, x2, Some(t1))
                    && self.conv(depth, y1, y2, Some(t1))
            }
            (Value::Refl(x), Value::Refl(y)) => self.conv(depth, x, y, None),
            (
                Value::Data {
                    sig: s1,
                    indices: i1,
                    ..
                },
                Value::Data {
                    sig: s2,
                    indices: i2,
                    ..
                },
            ) => s1 == s2 && self.conv_all(depth, i1, i2),
            (
                Value::Ctor {
                    sig: s1,
                    op: o1,
                    args: a1,
                    ..
                },
                Value::Ctor {
                    sig: s2,
                    op: o2,
                    args: a2,
                    ..
                },
            ) => s1 == s2 && o1 == o2 && self.conv_all(depth, a1, a2),
            (Value::Neutral(Head::Unrepr(_), f), Value::Refl(_)) if f.is_empty() => {
                self.conv_struct(depth, &self.open_refl(a), b)
            }
            (Value::Refl(_), Value::Neutral(Head::Unrepr(_), f)) if f.is_empty() => {
                self.conv_struct(depth, a, &self.open_refl(b))
            }
            (Value::Neutral(Head::Unrepr(y), f), _) if f.is_empty() && !is_unrepr(b) => {
                self.conv(depth, y, &self.repr(b), None)
            }
            (_, Value::Neutral(Head::Unrepr(y), f)) if f.is_empty() && !is_unrepr(a) => {
                self.conv(depth, &self.repr(a), y, None)
            }
            (Value::Neutral(h1, f1), Value::Neutral(h2, f2)) => {
                self.conv_head(depth, h1, h2)
                    && f1.len() == f2.len()
                    && f1.iter().zip(f2).all(|(x, y)| self.conv_frame(depth, x, y))
            }
            _ => false,
        }
    }

    fn conv_head(&self, depth: usize, a: &Head, b: &Head) -> bool {
        match (a, b) {
            (Head::Var(x), Head::Var(y)) => x == y,
            (Head::Postulate(x), Head::Postulate(y)) => x == y,
            (Head::Unrepr(x), Head::Unrepr(y)) => self.conv(depth, x, y, None),
            _ => false,
        }
    }

    fn conv_frame(&self, depth: usize, a: &Frame, b: &Frame) -> bool {
        let u = std::sync::Arc::new(Value::Universe);
        match (a, b) {
            (Frame::App(x), Frame::App(y)) => self.conv(depth, x, y, None),
            (Frame::Fst, Frame::Fst)
            | (Frame::Snd, Frame::Snd)
            | (Frame::SFst, Frame::SFst)
            | (Frame::SSnd, Frame::SSnd)
            | (Frame::Repr, Frame::Repr)
            | (Frame::Unrepr, Frame::Unrepr)
            | (Frame::ReprTy, Frame::ReprTy) => true,
            (
                Frame::J {
                    motive: m1,
                    refl: r1,
                },
                Frame::J {
                    motive: m2,
                    refl: r2,
                },
            ) => self.conv_under(depth, m1, m2, 3, Some(&u)) && self.conv_under(depth, r1, r2, 1, None),
            (
                Frame::Elim {
                    frame: e1,
                    indices: i1,
                },
                Frame::Elim {
                    frame: e2,
                    indices: i2,
                },
            ) => {
                e1.sig == e2.sig
                    && self.conv_all(depth, i1, i2)
                    && self.conv_under(depth, &e1.motive, &e2.motive, i1.len() + 1, Some(&u))
                    && self.conv_all(depth, &e1.methods, &e2.methods)
            }
            _ => false,
        }
    }
}

fn is_unrepr(v: &Val) -> bool {
    matches!(&**v, Value::Neutral(Head::Unrepr(_), f) if f.is_empty())
}
