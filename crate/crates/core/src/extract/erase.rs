//! Erasure from repr-free core terms to the untyped IR.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::env::{EntryKind, GlobalEnv};
use crate::nbe::Nbe;
use crate::program::CoreProgram;
use crate::syntax::{Algebra, Term};
use crate::value::Value;

use super::ir::{Ir, PrimTable};
use super::ExtractError;

pub struct Eraser<'p> {
    env: GlobalEnv,
    prog: &'p CoreProgram,
    prims: &'p PrimTable,
    erasable: RefCell<HashMap<String, Option<usize>>>,
}

impl<'p> Eraser<'p> {
    /// `prog` must be the output of the repr-free translation.
    pub fn new(prog: &'p CoreProgram, prims: &'p PrimTable) -> Eraser<'p> {
        Eraser {
            env: GlobalEnv::from_program(prog),
            prog,
            prims,
            erasable: RefCell::new(HashMap::new()),
        }
    }

    /// `Some(n)` when the global takes `n` arguments and returns a type or
    /// an equality proof.
    pub fn erasable_arity(&self, name: &str) -> Option<usize> {
        if let Some(r) = self.erasable.borrow().get(name) {
            return *r;
        }
        let nbe = Nbe::new(&self.env);
        let r = nbe.global_type(name).and_then(|mut ty| {
            let mut n = 0;
            loop {
                ty = nbe.force(&ty);
                match &*ty {
                    Value::Universe | Value::Eq(..) => return Some(n),
                    Value::Pi(_, cod) => {
                        ty = nbe.apply_closure(cod, &[Value::var(n)]);
                        n += 1;
                    }
                    _ => return None,
                }
            }
        });
        self.erasable.borrow_mut().insert(name.to_string(), r);
        r
    }

    pub fn erase(&self, t: &Term) -> Result<Ir, ExtractError> {
        match t {
            Term::Var(i) => Ok(Ir::Var(*i)),
            Term::Universe
            | Term::Unit
            | Term::Tt
            | Term::Pi(..)
            | Term::Sigma(..)
            | Term::SubsetSigma(..)
            | Term::Eq(..)
            | Term::Refl(_)
            | Term::SubsetSnd(_)
            | Term::DataTy { .. } => Ok(Ir::Unit),
            Term::Lam(b) => Ok(Ir::lam(self.erase(b)?)),
            Term::App(..) | Term::Global(_) | Term::Postulate(_) => {
                let (head, args) = t.unapply();
                let args = args
                    .into_iter()
                    .map(|a| self.erase(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.spine(head, args)
            }
            Term::Pair(a, b) => Ok(Ir::Pair(Box::new(self.erase(a)?), Box::new(self.erase(b)?))),
            Term::Fst(p) => Ok(Ir::Fst(Box::new(self.erase(p)?))),
            Term::Snd(p) => Ok(Ir::Snd(Box::new(self.erase(p)?))),
            Term::SubsetPair(a, _) | Term::SubsetFst(a) => self.erase(a),
            Term::J(_, r, _) => Ok(self.erase(r)?.instantiate(&Ir::Unit)),
            Term::Ctor { sig, op, alg, args } => {
                debug_assert!(alg.is_default());
                Ok(Ir::Ctor {
                    origin: self.prog.sig(*sig).name.clone(),
                    tag: *op,
                    args: args.iter().map(|a| self.erase(a)).collect::<Result<_, _>>()?,
                })
            }
            Term::Elim {
                sig,
                alg,
                methods,
                scrutinee,
                ..
            } => {
                debug_assert!(matches!(alg, Algebra::Default));
                let sig = self.prog.sig(*sig);
                let methods = methods
                    .iter()
                    .map(|m| self.erase(m))
                    .collect::<Result<Vec<_>, _>>()?;
                let cases = sig
                    .ops
                    .iter()
                    .zip(&methods)
                    .map(|(op, m)| {
                        let a = op.arity();
                        let mut args = Vec::new();
                        for k in 0..a {
                            let field = Ir::Var(a - 1 - k);
                            if op.is_recursive(k) {
                                args.push(field.clone());
                                args.push(Ir::Thunk(Box::new(Ir::app(Ir::Var(a + 1), field))));
                            } else {
                                args.push(field);
                            }
                        }
                        (a, Ir::apps(m.shift(a + 2), args))
                    })
                    .collect();
                let rec = Ir::Fix(Box::new(Ir::lam(Ir::Switch(Box::new(Ir::Var(0)), cases))));
                Ok(Ir::app(rec, self.erase(scrutinee)?))
            }
            Term::ReprTy(a) | Term::ReprTm(a) | Term::UnreprTm(a) => self.erase(a),
        }
    }

    fn spine(&self, head: &Term, args: Vec<Ir>) -> Result<Ir, ExtractError> {
        let name = match head {
            Term::Global(n) | Term::Postulate(n) => n.to_string(),
            _ => return Ok(Ir::apps(self.erase(head)?, args)),
        };
        if let Some(n) = self.erasable_arity(&name) {
            return Ok(Ir::lams(n.saturating_sub(args.len()), Ir::Unit));
        }
        let postulate = matches!(head, Term::Postulate(_))
            || matches!(self.env.get(&name).map(|e| &e.kind), Some(EntryKind::Postulate));
        if !postulate {
            return Ok(Ir::apps(Ir::Global(name), args));
        }
        let entry = self
            .prims
            .get(&name)
            .ok_or_else(|| ExtractError::UnmappedPostulate(name.clone()))?;
        let k = entry.arity;
        if args.len() >= k {
            let mut args = args;
            let rest = args.split_off(k);
            return Ok(Ir::apps(Ir::Prim(name, args), rest));
        }
        let missing = k - args.len();
        let mut full: Vec<Ir> = args.iter().map(|a| a.shift(missing)).collect();
        full.extend((0..missing).rev().map(Ir::Var));
        Ok(Ir::lams(missing, Ir::Prim(name, full)))
    }
}
