//! The semantic domain of the evaluator.

use std::sync::{Arc, OnceLock};

use crate::syntax::{Algebra, SigId, Tm};

pub type Val = Arc<Value>;

/// A persistent evaluation environment; index 0 is the innermost binding.
#[derive(Clone, Debug, Default)]
pub struct Env {
    node: Option<Arc<EnvNode>>,
    len: usize,
}

#[derive(Debug)]
struct EnvNode {
    head: Val,
    tail: Option<Arc<EnvNode>>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&self, v: Val) -> Env {
        Env {
            node: Some(Arc::new(EnvNode {
                head: v,
                tail: self.node.clone(),
            })),
            len: self.len + 1,
        }
    }

    pub fn extend(&self, vs: impl IntoIterator<Item = Val>) -> Env {
        vs.into_iter().fold(self.clone(), |e, v| e.push(v))
    }

    pub fn get(&self, index: usize) -> &Val {
        let mut node = self.node.as_deref();
        for _ in 0..index {
            node = node.and_then(|n| n.tail.as_deref());
        }
        match node {
            Some(n) => &n.head,
            None => panic!("variable index {index} out of scope (depth {})", self.len),
        }
    }

    /// The bindings from outermost to innermost.
    pub fn to_vec(&self) -> Vec<Val> {
        let mut out = Vec::with_capacity(self.len);
        let mut node = self.node.as_deref();
        while let Some(n) = node {
            out.push(n.head.clone());
            node = n.tail.as_deref();
        }
        out.reverse();
        out
    }
}

/// A post-processing step attached to a closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrap {
    ReprTy,
    Repr,
    Unrepr,
}

#[derive(Clone, Debug)]
pub enum Closure {
    /// A syntactic body under a captured environment.
    Syntax { env: Env, body: Tm },
    /// `λ x⃗. w (c x⃗)`.
    Post(Arc<Closure>, Wrap),
    /// `λ x. c (w x)`; single-argument closures only.
    Pre(Arc<Closure>, Wrap),
    /// `λ x. f x`.
    Eta(Val),
    /// A method of a displayed algebra transported along repr/unrepr,
    /// collecting its arguments one by one.
    Method(Arc<MethodState>),
    /// `λ _. elim …`: a memoized inductive hypothesis.
    Hyp(Arc<Hypothesis>),
}

#[derive(Debug)]
pub struct MethodState {
    pub method: Val,
    /// One flag per displayed input; set for inductive hypotheses.
    pub hyp_mask: Arc<Vec<bool>>,
    pub got: Vec<Val>,
    /// `Repr` builds `repr* β`, `Unrepr` builds `unrepr* β`.
    pub dir: Wrap,
}

#[derive(Debug)]
pub struct Hypothesis {
    pub frame: ElimFrame,
    pub indices: Vec<Val>,
    pub scrutinee: Val,
    pub cell: OnceLock<Val>,
}

#[derive(Clone, Debug)]
pub struct ElimFrame {
    pub sig: SigId,
    pub alg: Algebra,
    /// Binds the indices followed by the scrutinee.
    pub motive: Closure,
    pub methods: Vec<Val>,
}

#[derive(Clone, Debug)]
pub enum Head {
    /// A de Bruijn level.
    Var(usize),
    Postulate(Arc<str>),
    /// `unrepr v` where `v` is an introduction form that cannot be pushed
    /// through without knowing its type.
    Unrepr(Val),
}

#[derive(Clone, Debug)]
pub enum Frame {
    App(Val),
    Fst,
    Snd,
    SFst,
    SSnd,
    J { motive: Closure, refl: Closure },
    Elim { frame: ElimFrame, indices: Vec<Val> },
    Repr,
    Unrepr,
    ReprTy,
}

/// `repr (ctor ν)`, kept as a constructor so that `unrepr` can undo it, and
/// forced to the algebra operation on demand.
#[derive(Debug)]
pub struct ReprCtor {
    pub sig: SigId,
    pub op: usize,
    pub alg: Algebra,
    pub args: Vec<Val>,
    pub forced: OnceLock<Val>,
}

#[derive(Clone, Debug)]
pub enum Value {
    Universe,
    Pi(Val, Closure),
    Lam(Closure),
    Sigma(Val, Closure),
    Pair(Val, Val),
    Subset(Val, Closure),
    SPair(Val, Val),
    Eq(Val, Val, Val),
    Refl(Val),
    Unit,
    Tt,
    Data {
        sig: SigId,
        alg: Algebra,
        indices: Vec<Val>,
    },
    Ctor {
        sig: SigId,
        op: usize,
        alg: Algebra,
        args: Vec<Val>,
    },
    ReprCtor(Arc<ReprCtor>),
    Neutral(Head, Vec<Frame>),
}

impl Value {
    pub fn var(level: usize) -> Val {
        Arc::new(Value::Neutral(Head::Var(level), Vec::new()))
    }

    pub fn postulate(name: Arc<str>) -> Val {
        Arc::new(Value::Neutral(Head::Postulate(name), Vec::new()))
    }
}
