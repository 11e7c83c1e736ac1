//! A reference interpreter for the IR, used to test erasure and code
//! generation against each other.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::ir::{Ir, PrimTable};

#[derive(Clone, Debug)]
pub enum RVal {
    Unit,
    Nat(BigUint),
    Pair(Rc<RVal>, Rc<RVal>),
    Ctor(usize, Rc<Vec<RVal>>),
    Closure(Rc<Closure>),
    Thunk(Rc<Closure>),
    /// An already evaluated thunk.
    Ready(Rc<RVal>),
}

#[derive(Debug)]
pub struct Closure {
    body: Ir,
    env: Vec<RVal>,
    recursive: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RunError {
    #[error("unknown global `{0}`")]
    UnknownGlobal(String),
    #[error("unknown primitive `{0}`")]
    UnknownPrim(String),
    #[error("runtime type error: {0}")]
    Stuck(&'static str),
}

impl fmt::Display for RVal {
    /// The canonical printer shared with the runtime: decimal numbers,
    /// `[tag args…]` for tagged values, `(a, b)` for pairs, `<fn>` for
    /// functions and thunks.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RVal::Unit => write!(f, "()"),
            RVal::Nat(n) => write!(f, "{n}"),
            RVal::Pair(a, b) => write!(f, "({a}, {b})"),
            RVal::Ctor(tag, args) => {
                write!(f, "[{tag}")?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                write!(f, "]")
            }
            RVal::Closure(_) | RVal::Thunk(_) | RVal::Ready(_) => write!(f, "<fn>"),
        }
    }
}

pub struct Machine<'a> {
    prims: &'a PrimTable,
    globals: HashMap<String, RVal>,
}

type R<T> = Result<T, RunError>;

impl<'a> Machine<'a> {
    /// Evaluates the globals in order.
    pub fn new(globals: &[(String, Ir)], prims: &'a PrimTable) -> R<Machine<'a>> {
        let mut m = Machine {
            prims,
            globals: HashMap::new(),
        };
        for (name, ir) in globals {
            let v = m.eval(ir, &[])?;
            m.globals.insert(name.clone(), v);
        }
        Ok(m)
    }

    pub fn global(&self, name: &str) -> Option<&RVal> {
        self.globals.get(name)
    }

    pub fn eval(&self, ir: &Ir, env: &[RVal]) -> R<RVal> {
        Ok(match ir {
            Ir::Var(i) => env[env.len() - 1 - i].clone(),
            Ir::Global(g) => self
                .globals
                .get(g)
                .cloned()
                .ok_or_else(|| RunError::UnknownGlobal(g.clone()))?,
            Ir::Prim(p, args) => {
                let args = args.iter().map(|a| self.eval(a, env)).collect::<R<Vec<_>>>()?;
                self.prim(p, args)?
            }
            Ir::Unit => RVal::Unit,
            Ir::Nat(n) => RVal::Nat(n.clone()),
            Ir::Lam(b) => RVal::Closure(Rc::new(Closure {
                body: (**b).clone(),
                env: env.to_vec(),
                recursive: false,
            })),
            Ir::App(f, a) => {
                let f = self.eval(f, env)?;
                let a = self.eval(a, env)?;
                self.apply(&f, a)?
            }
            Ir::Let(a, b) => {
                let a = self.eval(a, env)?;
                let mut env = env.to_vec();
                env.push(a);
                self.eval(b, &env)?
            }
            Ir::Pair(a, b) => RVal::Pair(Rc::new(self.eval(a, env)?), Rc::new(self.eval(b, env)?)),
            Ir::Fst(p) => match self.eval(p, env)? {
                RVal::Pair(a, _) => (*a).clone(),
                _ => return Err(RunError::Stuck("fst of a non-pair")),
            },
            Ir::Snd(p) => match self.eval(p, env)? {
                RVal::Pair(_, b) => (*b).clone(),
                _ => return Err(RunError::Stuck("snd of a non-pair")),
            },
            Ir::Ctor { tag, args, .. } => {
                let args = args.iter().map(|a| self.eval(a, env)).collect::<R<Vec<_>>>()?;
                RVal::Ctor(*tag, Rc::new(args))
            }
            Ir::Switch(s, cases) => match self.eval(s, env)? {
                RVal::Ctor(tag, args) => {
                    let (n, body) = cases.get(tag).ok_or(RunError::Stuck("tag out of range"))?;
                    if *n != args.len() {
                        return Err(RunError::Stuck("constructor arity"));
                    }
                    let mut env = env.to_vec();
                    env.extend(args.iter().cloned());
                    self.eval(body, &env)?
                }
                _ => return Err(RunError::Stuck("switch on a non-constructor")),
            },
            Ir::Fix(b) => match &**b {
                Ir::Lam(body) => RVal::Closure(Rc::new(Closure {
                    body: (**body).clone(),
                    env: env.to_vec(),
                    recursive: true,
                })),
                _ => return Err(RunError::Stuck("fix of a non-function")),
            },
            Ir::Thunk(b) => RVal::Thunk(Rc::new(Closure {
                body: (**b).clone(),
                env: env.to_vec(),
                recursive: false,
            })),
            Ir::Force(b) => {
                let t = self.eval(b, env)?;
                self.force(&t)?
            }
        })
    }

    fn force(&self, t: &RVal) -> R<RVal> {
        match t {
            RVal::Thunk(c) => self.eval(&c.body, &c.env),
            RVal::Ready(v) => Ok((**v).clone()),
            _ => Err(RunError::Stuck("force of a non-thunk")),
        }
    }

    pub fn apply(&self, f: &RVal, a: RVal) -> R<RVal> {
        match f {
            RVal::Closure(c) => {
                let mut env = c.env.clone();
                if c.recursive {
                    env.push(f.clone());
                }
                env.push(a);
                self.eval(&c.body, &env)
            }
            RVal::Thunk(_) | RVal::Ready(_) => self.force(f),
            _ => Err(RunError::Stuck("application of a non-function")),
        }
    }

    fn nat(v: &RVal) -> R<&BigUint> {
        match v {
            RVal::Nat(n) => Ok(n),
            _ => Err(RunError::Stuck("expected a number")),
        }
    }

    fn prim(&self, p: &str, args: Vec<RVal>) -> R<RVal> {
        let entry = self.prims.get(p).ok_or_else(|| RunError::UnknownPrim(p.into()))?;
        Ok(match (entry.target.as_str(), args.as_slice()) {
            ("ubig_zero", []) => RVal::Nat(BigUint::zero()),
            ("ubig_one_plus", [n]) => RVal::Nat(Self::nat(n)? + 1u8),
            ("ubig_add", [a, b]) => RVal::Nat(Self::nat(a)? + Self::nat(b)?),
            ("ubig_elim", [_, base, step, n]) => {
                let n = Self::nat(n)?.to_u64().ok_or(RunError::Stuck("number too large"))?;
                let mut acc = base.clone();
                for i in 0..n {
                    let f = self.apply(step, RVal::Nat(BigUint::from(i)))?;
                    acc = self.apply(&f, RVal::Ready(Rc::new(acc)))?;
                }
                acc
            }
            _ => return Err(RunError::UnknownPrim(p.into())),
        })
    }
}
