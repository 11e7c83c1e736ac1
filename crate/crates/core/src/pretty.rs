//! Human-readable rendering of core terms in surface-like syntax.

use crate::syntax::{Signature, Term};

const LOW: u8 = 0;
const EQ: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

pub struct Pretty<'a> {
    sigs: &'a [Signature],
    names: Vec<String>,
}

impl<'a> Pretty<'a> {
    /// `names` are the variables in scope, outermost first.
    pub fn new(sigs: &'a [Signature], names: Vec<String>) -> Pretty<'a> {
        Pretty { sigs, names }
    }

    pub fn term(&mut self, t: &Term) -> String {
        self.go(t, LOW)
    }

    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
        if !self.names.iter().any(|n| n == base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !self.names.iter().any(|m| m == n))
            .unwrap()
    }

    fn under<R>(&mut self, n: usize, hints: &[&str], f: impl FnOnce(&mut Self, &[String]) -> R) -> R {
        let mut bound = Vec::new();
        for k in 0..n {
            let name = self.fresh(hints.get(k).copied().unwrap_or("x"));
            self.names.push(name.clone());
            bound.push(name);
        }
        let r = f(self, &bound);
        self.names.truncate(self.names.len() - n);
        r
    }

    fn sig_name(&self, id: crate::syntax::SigId) -> String {
        self.sigs
            .get(id.0)
            .map_or_else(|| format!("#{}", id.0), |s| s.name.clone())
    }

    fn spine(&mut self, head: String, args: &[Term]) -> (String, u8) {
        if args.is_empty() {
            return (head, ATOM);
        }
        let mut out = head;
        for a in args {
            out.push(' ');
            out.push_str(&self.go(a, ATOM));
        }
        (out, APP)
    }

    fn go(&mut self, t: &Term, prec: u8) -> String {
        let (s, p) = self.render(t);
        if p < prec {
            format!("({s})")
        } else {
            s
        }
    }

    fn binder(&mut self, sep: &str, a: &Term, b: &Term) -> String {
        if b.mentions(0) {
            let a = self.go(a, LOW);
            self.under(1, &[], |p, x| format!("({} : {a}) {sep} {}", x[0], p.go(b, LOW)))
        } else {
            let a = self.go(a, if sep == "->" { EQ } else { APP });
            self.under(1, &["_"], |p, _| format!("{a} {sep} {}", p.go(b, LOW)))
        }
    }

    fn render(&mut self, t: &Term) -> (String, u8) {
        match t {
            Term::Var(i) => {
                let n = self.names.len();
                let s = if *i < n {
                    self.names[n - 1 - i].clone()
                } else {
                    format!("#{}", i - n)
                };
                (s, ATOM)
            }
            Term::Universe => ("U".into(), ATOM),
            Term::Unit => ("Unit".into(), ATOM),
            Term::Tt => ("tt".into(), ATOM),
            Term::Global(n) | Term::Postulate(n) => (n.to_string(), ATOM),
            Term::Pi(a, b) => (self.binder("->", a, b), LOW),
            Term::Sigma(a, b) => (self.binder("*", a, b), LOW),
            Term::SubsetSigma(a, b) => {
                let a = self.go(a, LOW);
                let s = self.under(1, &[], |p, x| format!("{{{} : {a} | {}}}", x[0], p.go(b, LOW)));
                (s, ATOM)
            }
            Term::Lam(_) => {
                let mut body = t;
                let mut n = 0;
                while let Term::Lam(b) = body {
                    body = b;
                    n += 1;
                }
                let s = self.under(n, &[], |p, xs| format!("\\{}. {}", xs.join(" "), p.go(body, LOW)));
                (s, LOW)
            }
            Term::App(..) => {
                let (head, args) = t.unapply();
                let head = self.go(head, ATOM);
                let args: Vec<Term> = args.into_iter().cloned().collect();
                self.spine(head, &args)
            }
            Term::Pair(a, b) | Term::SubsetPair(a, b) => {
                (format!("({}, {})", self.go(a, LOW), self.go(b, LOW)), ATOM)
            }
            Term::Fst(p) | Term::SubsetFst(p) => (format!("fst {}", self.go(p, ATOM)), APP),
            Term::Snd(p) | Term::SubsetSnd(p) => (format!("snd {}", self.go(p, ATOM)), APP),
            Term::Eq(_, a, b) => (format!("{} = {}", self.go(a, APP), self.go(b, APP)), EQ),
            Term::Refl(a) => (format!("refl {}", self.go(a, ATOM)), APP),
            Term::J(m, r, p) => {
                let m = self.under(3, &["a", "b", "p"], |pp, xs| {
                    format!("(\\{}. {})", xs.join(" "), pp.go(m, LOW))
                });
                let r = self.under(1, &["a"], |pp, xs| format!("(\\{}. {})", xs[0], pp.go(r, LOW)));
                (format!("J {m} {r} {}", self.go(p, ATOM)), APP)
            }
            Term::DataTy { sig, indices, .. } => {
                let head = self.sig_name(*sig);
                self.spine(head, indices)
            }
            Term::Ctor { sig, op, args, .. } => {
                let head = self
                    .sigs
                    .get(sig.0)
                    .and_then(|s| s.ops.get(*op))
                    .map_or_else(|| format!("ctor{op}"), |o| o.label.clone());
                self.spine(head, args)
            }
            Term::Elim {
                sig,
                motive,
                methods,
                indices,
                scrutinee,
                ..
            } => {
                let head = format!("elim-{}", self.sig_name(*sig));
                let m = self.under(indices.len() + 1, &[], |p, xs| {
                    format!("(\\{}. {})", xs.join(" "), p.go(motive, LOW))
                });
                let mut args = vec![m];
                args.extend(methods.iter().chain(indices).map(|a| self.go(a, ATOM)));
                args.push(self.go(scrutinee, ATOM));
                (format!("{head} {}", args.join(" ")), APP)
            }
            Term::ReprTy(a) => (format!("Repr {}", self.go(a, ATOM)), APP),
            Term::ReprTm(a) => (format!("repr {}", self.go(a, ATOM)), APP),
            Term::UnreprTm(a) => (format!("unrepr {}", self.go(a, ATOM)), APP),
        }
    }
}

/// Renders a term in a context with the given variable names.
pub fn pretty(t: &Term, sigs: &[Signature], names: &[String]) -> String {
    Pretty::new(sigs, names.to_vec()).term(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binders_and_arrows() {
        let t = Term::pi(
            Term::Universe,
            Term::pi(Term::Var(0), Term::arrow(Term::Var(0), Term::Var(1))),
        );
        assert_eq!(pretty(&t, &[], &[]), "(x : U) -> (x1 : x) -> x1 -> x");
    }

    #[test]
    fn application_and_equality() {
        let t = Term::eq(
            Term::Universe,
            Term::app(Term::global("f"), Term::app(Term::global("g"), Term::Var(0))),
            Term::Var(0),
        );
        assert_eq!(pretty(&t, &[], &["n".into()]), "f (g n) = n");
    }

    #[test]
    fn lambdas_collapse() {
        let t = Term::lam(Term::lam(Term::app(Term::Var(1), Term::Var(0))));
        assert_eq!(pretty(&t, &[], &[]), "\\x x1. x x1");
    }
}
