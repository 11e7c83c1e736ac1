//! Core syntax: terms, telescopes, spines, signatures and the de Bruijn
//! substitution calculus.
//!
//! Variables are de Bruijn indices. A telescope entry `k` lives in the
//! ambient context extended by entries `0..k`; a spine is a list of terms
//! in the ambient context. When a term is scoped over a telescope of length
//! `n`, the last entry of the telescope is `Var(0)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Handle to an interned signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigId(pub usize);

/// The representation chosen for a data type.
///
/// A custom algebra is the spine `[X, α_0, …, α_{k-1}, κ]` of an inductive
/// algebra. Its entries are closed terms.
#[derive(Clone, Debug)]
pub enum Algebra {
    Default,
    Custom(Arc<Vec<Term>>),
}

impl Algebra {
    pub fn is_default(&self) -> bool {
        matches!(self, Algebra::Default)
    }

    pub fn carrier(&self) -> Option<&Term> {
        match self {
            Algebra::Default => None,
            Algebra::Custom(spine) => spine.first(),
        }
    }

    pub fn operation(&self, op: usize) -> Option<&Term> {
        match self {
            Algebra::Default => None,
            Algebra::Custom(spine) => spine.get(1 + op),
        }
    }

    pub fn induction(&self) -> Option<&Term> {
        match self {
            Algebra::Default => None,
            Algebra::Custom(spine) => spine.last(),
        }
    }
}

// Algebras are determined by their signature within a program, so two
// occurrences are interchangeable whenever the signatures agree.
impl PartialEq for Algebra {
    fn eq(&self, other: &Algebra) -> bool {
        match (self, other) {
            (Algebra::Default, Algebra::Default) => true,
            (Algebra::Custom(a), Algebra::Custom(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

pub type Tm = Arc<Term>;

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(usize),
    Universe,
    Pi(Tm, Tm),
    Lam(Tm),
    App(Tm, Tm),
    Sigma(Tm, Tm),
    Pair(Tm, Tm),
    Fst(Tm),
    Snd(Tm),
    /// `{x : A | B}`: a pair type whose right component is erased at runtime.
    SubsetSigma(Tm, Tm),
    SubsetPair(Tm, Tm),
    SubsetFst(Tm),
    /// Projection of the erased component. Only meaningful in erased positions.
    SubsetSnd(Tm),
    Eq(Tm, Tm, Tm),
    Refl(Tm),
    /// `J motive refl_case proof`; the motive binds `a, b, p` and the refl
    /// case binds `a`.
    J(Tm, Tm, Tm),
    Unit,
    Tt,
    DataTy {
        sig: SigId,
        alg: Algebra,
        indices: Vec<Term>,
    },
    Ctor {
        sig: SigId,
        op: usize,
        alg: Algebra,
        args: Vec<Term>,
    },
    /// The motive binds the index telescope followed by the scrutinee.
    Elim {
        sig: SigId,
        alg: Algebra,
        motive: Tm,
        methods: Vec<Term>,
        indices: Vec<Term>,
        scrutinee: Tm,
    },
    ReprTy(Tm),
    ReprTm(Tm),
    UnreprTm(Tm),
    Global(Arc<str>),
    Postulate(Arc<str>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }
    pub fn pi(a: Term, b: Term) -> Term {
        Term::Pi(Arc::new(a), Arc::new(b))
    }
    pub fn lam(b: Term) -> Term {
        Term::Lam(Arc::new(b))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn sigma(a: Term, b: Term) -> Term {
        Term::Sigma(Arc::new(a), Arc::new(b))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Arc::new(a), Arc::new(b))
    }
    pub fn fst(p: Term) -> Term {
        Term::Fst(Arc::new(p))
    }
    pub fn snd(p: Term) -> Term {
        Term::Snd(Arc::new(p))
    }
    pub fn subset(a: Term, b: Term) -> Term {
        Term::SubsetSigma(Arc::new(a), Arc::new(b))
    }
    pub fn spair(a: Term, b: Term) -> Term {
        Term::SubsetPair(Arc::new(a), Arc::new(b))
    }
    pub fn sfst(p: Term) -> Term {
        Term::SubsetFst(Arc::new(p))
    }
    pub fn ssnd(p: Term) -> Term {
        Term::SubsetSnd(Arc::new(p))
    }
    pub fn eq(ty: Term, a: Term, b: Term) -> Term {
        Term::Eq(Arc::new(ty), Arc::new(a), Arc::new(b))
    }
    pub fn refl(a: Term) -> Term {
        Term::Refl(Arc::new(a))
    }
    pub fn j(motive: Term, refl_case: Term, proof: Term) -> Term {
        Term::J(Arc::new(motive), Arc::new(refl_case), Arc::new(proof))
    }
    pub fn repr_ty(a: Term) -> Term {
        Term::ReprTy(Arc::new(a))
    }
    pub fn repr(a: Term) -> Term {
        Term::ReprTm(Arc::new(a))
    }
    pub fn unrepr(a: Term) -> Term {
        Term::UnreprTm(Arc::new(a))
    }
    pub fn global(name: &str) -> Term {
        Term::Global(name.into())
    }
    pub fn postulate(name: &str) -> Term {
        Term::Postulate(name.into())
    }

    /// Non-dependent function type; `b` is given in the outer context.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::pi(a, shift(&b, 1, 0))
    }

    /// Iterated `Pi` over a telescope.
    pub fn pis(tel: &Telescope, body: Term) -> Term {
        tel.types
            .iter()
            .rev()
            .fold(body, |acc, a| Term::pi(a.clone(), acc))
    }

    pub fn lams(n: usize, body: Term) -> Term {
        (0..n).fold(body, |acc, _| Term::lam(acc))
    }

    /// Splits an application spine into its head and arguments.
    pub fn unapply(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal over every node, including algebra spines.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_)
            | Term::Universe
            | Term::Unit
            | Term::Tt
            | Term::Global(_)
            | Term::Postulate(_) => {}
            Term::Lam(b)
            | Term::Fst(b)
            | Term::Snd(b)
            | Term::SubsetFst(b)
            | Term::SubsetSnd(b)
            | Term::Refl(b)
            | Term::ReprTy(b)
            | Term::ReprTm(b)
            | Term::UnreprTm(b) => b.visit(f),
            Term::Pi(a, b)
            | Term::App(a, b)
            | Term::Sigma(a, b)
            | Term::Pair(a, b)
            | Term::SubsetSigma(a, b)
            | Term::SubsetPair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Eq(a, b, c) | Term::J(a, b, c) => {
                a.visit(f);
                b.visit(f);
                c.visit(f);
            }
            Term::DataTy { alg, indices, .. } => {
                visit_alg(alg, f);
                indices.iter().for_each(|t| t.visit(f));
            }
            Term::Ctor { alg, args, .. } => {
                visit_alg(alg, f);
                args.iter().for_each(|t| t.visit(f));
            }
            Term::Elim {
                alg,
                motive,
                methods,
                indices,
                scrutinee,
                ..
            } => {
                visit_alg(alg, f);
                motive.visit(f);
                methods.iter().for_each(|t| t.visit(f));
                indices.iter().for_each(|t| t.visit(f));
                scrutinee.visit(f);
            }
        }
    }

    /// Whether the term mentions `Var(index)` once binders are accounted for.
    pub fn mentions(&self, index: usize) -> bool {
        let mut found = false;
        self.visit_free_vars(0, &mut |i| found |= i == index);
        found
    }

    /// Calls `f` with every free index, relative to the outside of the term.
    pub fn visit_free_vars(&self, depth: usize, f: &mut dyn FnMut(usize)) {
        let go = |t: &Term, d: usize, f: &mut dyn FnMut(usize)| t.visit_free_vars(d, f);
        match self {
            Term::Var(i) => {
                if *i >= depth {
                    f(i - depth)
                }
            }
            Term::Universe | Term::Unit | Term::Tt | Term::Global(_) | Term::Postulate(_) => {}
            Term::Lam(b) => go(b, depth + 1, f),
            Term::Fst(b)
            | Term::Snd(b)
            | Term::SubsetFst(b)
            | Term::SubsetSnd(b)
            | Term::Refl(b)
            | Term::ReprTy(b)
            | Term::ReprTm(b)
            | Term::UnreprTm(b) => go(b, depth, f),
            Term::Pi(a, b) | Term::Sigma(a, b) | Term::SubsetSigma(a, b) => {
                go(a, depth, f);
                go(b, depth + 1, f);
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::SubsetPair(a, b) => {
                go(a, depth, f);
                go(b, depth, f);
            }
            Term::Eq(a, b, c) => {
                go(a, depth, f);
                go(b, depth, f);
                go(c, depth, f);
            }
            Term::J(m, r, p) => {
                go(m, depth + 3, f);
                go(r, depth + 1, f);
                go(p, depth, f);
            }
            Term::DataTy { indices, .. } => indices.iter().for_each(|t| go(t, depth, f)),
            Term::Ctor { args, .. } => args.iter().for_each(|t| go(t, depth, f)),
            Term::Elim {
                motive,
                methods,
                indices,
                scrutinee,
                ..
            } => {
                go(motive, depth + indices.len() + 1, f);
                methods.iter().for_each(|t| go(t, depth, f));
                indices.iter().for_each(|t| go(t, depth, f));
                go(scrutinee, depth, f);
            }
        }
    }

    /// Largest free index plus one, or zero for closed terms.
    pub fn scope_bound(&self) -> usize {
        let mut bound = 0;
        self.visit_free_vars(0, &mut |i| bound = bound.max(i + 1));
        bound
    }
}

fn visit_alg(alg: &Algebra, f: &mut dyn FnMut(&Term)) {
    if let Algebra::Custom(spine) = alg {
        spine.iter().for_each(|t| t.visit(f));
    }
}

/// A dependent list of types with display names.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Telescope {
    pub names: Vec<String>,
    pub types: Vec<Term>,
}

impl Telescope {
    pub fn new() -> Telescope {
        Telescope::default()
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Term) {
        self.names.push(name.into());
        self.types.push(ty);
    }

    pub fn with(mut self, name: impl Into<String>, ty: Term) -> Telescope {
        self.push(name, ty);
        self
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    /// Concatenation; `rest` must already be scoped over `self`.
    pub fn append(mut self, rest: Telescope) -> Telescope {
        self.names.extend(rest.names);
        self.types.extend(rest.types);
        self
    }
}

/// A list of terms matching a telescope.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spine(pub Vec<Term>);

impl Spine {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.0.iter()
    }
}

impl From<Vec<Term>> for Spine {
    fn from(v: Vec<Term>) -> Spine {
        Spine(v)
    }
}

/// One argument of an operation.
#[derive(Clone, Debug, PartialEq)]
pub enum OpArg {
    /// `A →ext O`: an external argument of type `A`.
    Ext(Term),
    /// `ι δ →int O`: a recursive argument at indices `δ`.
    Int(Vec<Term>),
}

/// An operation of a signature, flattened into its argument list and return
/// indices.
///
/// Argument `k` (and its index spine) is scoped over arguments `0..k`, and
/// the return spine over all arguments. Every argument binds a variable, but
/// later arguments never mention a recursive one.
#[derive(Clone, Debug, PartialEq)]
pub struct Operation {
    pub label: String,
    pub arg_names: Vec<String>,
    pub args: Vec<OpArg>,
    pub ret: Vec<Term>,
}

impl Operation {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn recursive_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, OpArg::Int(_)))
            .map(|(i, _)| i)
    }

    pub fn is_recursive(&self, pos: usize) -> bool {
        matches!(self.args.get(pos), Some(OpArg::Int(_)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub name: String,
    pub indices: Telescope,
    pub ops: Vec<Operation>,
}

impl Signature {
    pub fn op_index(&self, label: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.label == label)
    }
}

/// A typing context. Entry `k` is a type in entries `0..k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    pub types: Vec<Term>,
}

impl Context {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// The type of `Var(index)`, weakened into the whole context.
    pub fn lookup(&self, index: usize) -> Option<Term> {
        let pos = self.types.len().checked_sub(index + 1)?;
        Some(shift(&self.types[pos], index + 1, 0))
    }
}

pub fn extend_context(ctx: &Context, tel: &Telescope) -> Context {
    let mut types = ctx.types.clone();
    types.extend(tel.types.iter().cloned());
    Context { types }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpineError {
    #[error("unknown spine label `{0}`")]
    UnknownLabel(String),
}

pub enum Projection<'a> {
    Position(usize),
    Label(&'a str, &'a Telescope),
}

/// `δ.y`: extracts an entry from a spine by position or telescope label.
pub fn spine_project(spine: &Spine, key: Projection<'_>) -> Result<Term, SpineError> {
    let (pos, name) = match key {
        Projection::Position(p) => (Some(p), p.to_string()),
        Projection::Label(l, tel) => (tel.position(l), l.to_string()),
    };
    pos.and_then(|p| spine.0.get(p).cloned())
        .ok_or(SpineError::UnknownLabel(name))
}

/// Increases every free index `≥ cutoff` by `amount`.
pub fn shift(t: &Term, amount: usize, cutoff: usize) -> Term {
    if amount == 0 {
        return t.clone();
    }
    map_vars(t, cutoff, &|i, depth| {
        if i >= depth {
            Term::Var(i + amount)
        } else {
            Term::Var(i)
        }
    })
}

/// Decreases free indices `≥ cutoff + amount` by `amount`. Indices in
/// `cutoff..cutoff + amount` must not occur.
pub fn unshift(t: &Term, amount: usize, cutoff: usize) -> Term {
    map_vars(t, cutoff, &|i, depth| {
        if i >= depth {
            assert!(i >= depth + amount, "unshift of a bound variable");
            Term::Var(i - amount)
        } else {
            Term::Var(i)
        }
    })
}

/// Simultaneous substitution of a spine for the innermost `sub.len()`
/// variables at binder depth `depth`. `sub` is in telescope order, so its
/// last entry replaces `Var(depth)`. Terms in `sub` live in the context
/// outside the substituted variables.
pub fn substitute(t: &Term, sub: &[Term], depth: usize) -> Term {
    let n = sub.len();
    if n == 0 {
        return t.clone();
    }
    map_vars(t, depth, &|i, d| {
        if i < d {
            Term::Var(i)
        } else if i < d + n {
            shift(&sub[n - 1 - (i - d)], d, 0)
        } else {
            Term::Var(i - n)
        }
    })
}

/// `t[a]` for a body with one bound variable.
pub fn subst1(t: &Term, a: &Term) -> Term {
    substitute(t, std::slice::from_ref(a), 0)
}

/// Instantiates a body scoped over a telescope with a spine.
pub fn instantiate(t: &Term, spine: &[Term]) -> Term {
    substitute(t, spine, 0)
}

/// Rebuilds `t`, replacing each variable via `f(index, binder_depth)`.
pub fn map_vars(t: &Term, depth: usize, f: &dyn Fn(usize, usize) -> Term) -> Term {
    let go = |t: &Term, d: usize| Arc::new(map_vars(t, d, f));
    let all = |ts: &[Term], d: usize| ts.iter().map(|t| map_vars(t, d, f)).collect::<Vec<_>>();
    match t {
        Term::Var(i) => f(*i, depth),
        Term::Universe | Term::Unit | Term::Tt | Term::Global(_) | Term::Postulate(_) => t.clone(),
        Term::Pi(a, b) => Term::Pi(go(a, depth), go(b, depth + 1)),
        Term::Lam(b) => Term::Lam(go(b, depth + 1)),
        Term::App(a, b) => Term::App(go(a, depth), go(b, depth)),
        Term::Sigma(a, b) => Term::Sigma(go(a, depth), go(b, depth + 1)),
        Term::Pair(a, b) => Term::Pair(go(a, depth), go(b, depth)),
        Term::Fst(p) => Term::Fst(go(p, depth)),
        Term::Snd(p) => Term::Snd(go(p, depth)),
        Term::SubsetSigma(a, b) => Term::SubsetSigma(go(a, depth), go(b, depth + 1)),
        Term::SubsetPair(a, b) => Term::SubsetPair(go(a, depth), go(b, depth)),
        Term::SubsetFst(p) => Term::SubsetFst(go(p, depth)),
        Term::SubsetSnd(p) => Term::SubsetSnd(go(p, depth)),
        Term::Eq(a, b, c) => Term::Eq(go(a, depth), go(b, depth), go(c, depth)),
        Term::Refl(a) => Term::Refl(go(a, depth)),
        Term::J(m, r, p) => Term::J(go(m, depth + 3), go(r, depth + 1), go(p, depth)),
        Term::DataTy { sig, alg, indices } => Term::DataTy {
            sig: *sig,
            alg: alg.clone(),
            indices: all(indices, depth),
        },
        Term::Ctor { sig, op, alg, args } => Term::Ctor {
            sig: *sig,
            op: *op,
            alg: alg.clone(),
            args: all(args, depth),
        },
        Term::Elim {
            sig,
            alg,
            motive,
            methods,
            indices,
            scrutinee,
        } => Term::Elim {
            sig: *sig,
            alg: alg.clone(),
            motive: go(motive, depth + indices.len() + 1),
            methods: all(methods, depth),
            indices: all(indices, depth),
            scrutinee: go(scrutinee, depth),
        },
        Term::ReprTy(a) => Term::ReprTy(go(a, depth)),
        Term::ReprTm(a) => Term::ReprTm(go(a, depth)),
        Term::UnreprTm(a) => Term::UnreprTm(go(a, depth)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dump::term_to_sexpr(self, &|s| format!("#{}", s.0)))
    }
}
