//! Elaboration of surface declarations into a checked global environment.

mod expr;

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

pub use expr::{ExprElab, Locals};

use crate::env::GlobalEnv;
use crate::interp::{coherence_obligation, eliminator_type, induction_witness};
use crate::surface::{parse_file, CtorDecl, Decl, DeclKind, ElimEntry, Expr, ExprKind, ReprEntry, SourceMap, Span};
use crate::syntax::{unshift, Algebra, OpArg, Operation, SigId, Signature, Telescope, Term};
use crate::typeck::{ctor_function, ctor_type, data_former, elim_function, Checker};
use crate::value::Val;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("{0}")]
    Parse(String),
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    TypeMismatch { expected: String, found: String },
    #[error("`{lhs}` and `{rhs}` are not definitionally equal")]
    NotEqual { lhs: String, rhs: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("expected a function, found something of type `{0}`")]
    NotAFunction(String),
    #[error("expected a pair, found something of type `{0}`")]
    NotAPair(String),
    #[error("expected an equality proof, found something of type `{0}`")]
    NotAnEquality(String),
    #[error("`{0}` is not a data type")]
    NotAData(String),
    #[error("cannot infer the type of {0}; add an annotation")]
    CannotInfer(String),
    #[error("`{0}` is already defined")]
    DuplicateName(String),
    #[error("constructor `{0}` has a negative occurrence of its data type")]
    NegativeOccurrence(String),
    #[error("constructor `{ctor}`: {msg}")]
    BadIndexSpine { ctor: String, msg: String },
    #[error("`{0}` already has a representation")]
    DuplicateRepr(String),
    #[error("`{0}` is used before its representation is declared")]
    ReprAfterUse(String),
    #[error("missing image for `{0}`")]
    MissingCtorImage(String),
    #[error("`{ctor}` is not a constructor of `{data}`")]
    UnknownCtor { data: String, ctor: String },
    #[error("image of `{ctor}` is ill-typed: {detail}")]
    CtorImageTypeMismatch { ctor: String, detail: String },
    #[error("eliminator image is ill-typed: {0}")]
    ElimImageTypeMismatch(String),
    #[error("coherence proof for `{label}` does not prove its obligation: {detail}")]
    CoherenceMismatch { label: String, detail: String },
    #[error("missing coherence proof for `{0}`")]
    MissingCoherenceProof(String),
    #[error("too many coherence proofs; expected {0}")]
    ExtraCoherenceProof(usize),
    #[error("unknown representation target `{0}`")]
    UnknownReprTarget(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct ElabError {
    pub kind: ErrorKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub msg: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Reject repr blocks whose coherence proofs are missing or wrong.
    pub coherence_check: bool,
    pub trace: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            coherence_check: true,
            trace: false,
        }
    }
}

/// What the elaborator remembers about a declared data type.
#[derive(Clone, Debug)]
pub struct DataInfo {
    pub sig: SigId,
    pub ctors: Vec<String>,
    pub elim: String,
    pub represented: bool,
}

pub struct Elaborator {
    pub env: GlobalEnv,
    pub opts: Options,
    pub warnings: Vec<Warning>,
    pub data: HashMap<String, DataInfo>,
    /// Generated globals, mapped to the data type they belong to.
    owner: HashMap<String, String>,
    used: RefCell<HashSet<String>>,
}

type R<T> = Result<T, ElabError>;

fn err(kind: ErrorKind, span: Span) -> ElabError {
    ElabError { kind, span }
}

/// Parses and elaborates every file of a source map in order.
pub fn elaborate(sources: &SourceMap, opts: Options) -> R<Elaborator> {
    let mut el = Elaborator::new(opts);
    for (i, (_, src)) in sources.files.iter().enumerate() {
        let decls = parse_file(src, i).map_err(|e| err(ErrorKind::Parse(e.msg), e.span))?;
        for d in &decls {
            el.declare(d)?;
        }
    }
    Ok(el)
}

impl Elaborator {
    pub fn new(opts: Options) -> Elaborator {
        Elaborator {
            env: GlobalEnv::new(),
            opts,
            warnings: Vec::new(),
            data: HashMap::new(),
            owner: HashMap::new(),
            used: RefCell::new(HashSet::new()),
        }
    }

    pub fn expr(&self) -> ExprElab<'_> {
        let mut ck = Checker::new(&self.env);
        ck.nbe.trace = self.opts.trace;
        ExprElab {
            ck,
            data: &self.data,
            owner: &self.owner,
            used: &self.used,
        }
    }

    fn fresh_name(&self, name: &str, span: Span) -> R<()> {
        if self.env.contains(name) {
            Err(err(ErrorKind::DuplicateName(name.into()), span))
        } else {
            Ok(())
        }
    }

    pub fn declare(&mut self, d: &Decl) -> R<()> {
        match &d.kind {
            DeclKind::Def {
                name,
                params,
                ty,
                body,
            } => {
                self.fresh_name(name, d.span)?;
                let x = self.expr();
                let mut loc = Locals::new();
                let mut tel = Telescope::new();
                for p in params {
                    let pt = x.check_type(&loc, &p.ty)?;
                    let pv = x.ck.eval(&loc.ctx, &pt);
                    loc = loc.bind(&p.name, pv);
                    tel.push(p.name.clone(), pt);
                }
                let tt = x.check_type(&loc, ty)?;
                let tv = x.ck.eval(&loc.ctx, &tt);
                let bt = x.check(&loc, body, &tv)?;
                let n = tel.len();
                let full_ty = Term::pis(&tel, tt);
                drop(x);
                self.env.add_def(name, full_ty, Term::lams(n, bt), n);
            }
            DeclKind::Postulate { name, ty } => {
                self.fresh_name(name, d.span)?;
                let tt = self.expr().check_type(&Locals::new(), ty)?;
                self.env.add_postulate(name, tt);
            }
            DeclKind::Data { name, ty, ctors } => self.declare_data(name, ty, ctors, d.span)?,
            DeclKind::Repr {
                target,
                carrier,
                ctors,
                elim,
            } => self.declare_repr(target, carrier, ctors, elim.as_ref(), d.span)?,
            DeclKind::ReprFn { target, image } => {
                if !self.env.contains(target) {
                    return Err(err(ErrorKind::UnknownReprTarget(target.clone()), d.span));
                }
                if self.data.contains_key(target) {
                    return Err(err(
                        ErrorKind::Other(format!("`{target}` is a data type; give it a repr block")),
                        d.span,
                    ));
                }
                if self.env.repr_fns.iter().any(|(t, _)| t == target) {
                    return Err(err(ErrorKind::DuplicateRepr(target.clone()), d.span));
                }
                let (it, _) = self.expr().infer(&Locals::new(), image)?;
                self.env.repr_fns.push((target.clone(), it));
            }
        }
        Ok(())
    }

    fn declare_data(&mut self, name: &str, ty: &Expr, ctors: &[CtorDecl], span: Span) -> R<()> {
        self.fresh_name(name, span)?;
        let elim_name = format!("elim-{name}");
        self.fresh_name(&elim_name, span)?;
        for (i, c) in ctors.iter().enumerate() {
            self.fresh_name(&c.name, c.span)?;
            if ctors[..i].iter().any(|o| o.name == c.name) || c.name == name || c.name == elim_name {
                return Err(err(ErrorKind::DuplicateName(c.name.clone()), c.span));
            }
        }
        let x = self.expr();
        let tt = x.check_type(&Locals::new(), ty)?;
        let mut indices = Telescope::new();
        let mut t = &tt;
        let mut surface = ty;
        while let Term::Pi(a, b) = t {
            let k = indices.len();
            let hint = match &surface.kind {
                ExprKind::Pi(n, _, rest) => {
                    surface = rest;
                    n.clone()
                }
                _ => "_".into(),
            };
            let n = if hint == "_" { format!("i{k}") } else { hint };
            indices.push(n, (**a).clone());
            t = b;
        }
        if !matches!(t, Term::Universe) {
            return Err(err(
                ErrorKind::Other("the type of a data declaration must end in `U`".into()),
                ty.span,
            ));
        }
        let loc = Locals::new().bind(name, x.ck.eval(&Default::default(), &tt));
        let mut ops = Vec::with_capacity(ctors.len());
        for c in ctors {
            let ct = x.check_type(&loc, &c.ty)?;
            ops.push(operation(&c.name, &ct, &c.ty, indices.len(), c.span)?);
        }
        drop(x);
        let sig = Signature {
            name: name.to_string(),
            indices,
            ops,
        };
        let id = self.env.add_sig(sig.clone());
        let alg = Algebra::Default;
        let d = sig.indices.len();
        self.env.add_def(name, tt, data_former(&sig, id, &alg), d);
        let former = Term::global(name);
        for (i, c) in ctors.iter().enumerate() {
            let arity = sig.ops[i].arity();
            self.env
                .add_def(&c.name, ctor_type(&sig, &former, i), ctor_function(&sig, id, &alg, i), arity);
        }
        let ctor_globals: Vec<Term> = ctors.iter().map(|c| Term::global(&c.name)).collect();
        self.env.add_def(
            &elim_name,
            eliminator_type(&sig, &former, &ctor_globals),
            elim_function(&sig, id, &alg),
            sig.ops.len() + d + 2,
        );
        for g in ctors.iter().map(|c| c.name.clone()).chain([name.to_string(), elim_name.clone()]) {
            self.owner.insert(g, name.to_string());
        }
        self.data.insert(
            name.to_string(),
            DataInfo {
                sig: id,
                ctors: ctors.iter().map(|c| c.name.clone()).collect(),
                elim: elim_name,
                represented: false,
            },
        );
        Ok(())
    }

    fn declare_repr(
        &mut self,
        target: &str,
        carrier: &Expr,
        entries: &[ReprEntry],
        elim: Option<&ElimEntry>,
        span: Span,
    ) -> R<()> {
        let info = match self.data.get(target) {
            Some(i) => i.clone(),
            None if self.env.contains(target) => {
                return Err(err(ErrorKind::NotAData(target.into()), span));
            }
            None => return Err(err(ErrorKind::UnknownReprTarget(target.into()), span)),
        };
        if info.represented {
            return Err(err(ErrorKind::DuplicateRepr(target.into()), span));
        }
        if self.used.borrow().contains(target) {
            return Err(err(ErrorKind::ReprAfterUse(target.into()), span));
        }
        let sig = self.env.sig(info.sig).clone();
        for e in entries {
            if sig.op_index(&e.ctor).is_none() && !info.ctors.contains(&e.ctor) {
                return Err(err(
                    ErrorKind::UnknownCtor {
                        data: target.into(),
                        ctor: e.ctor.clone(),
                    },
                    e.span,
                ));
            }
        }
        let mut placeholders = Vec::new();
        let x = self.expr();
        let loc = Locals::new();
        let ctor_ty = Term::pis(&sig.indices, Term::Universe);
        let ct = x.check(&loc, carrier, &x.ck.eval(&loc.ctx, &ctor_ty))?;
        let mut images = Vec::with_capacity(sig.ops.len());
        for (i, name) in info.ctors.iter().enumerate() {
            let found: Vec<&ReprEntry> = entries.iter().filter(|e| &e.ctor == name).collect();
            let entry = match found.as_slice() {
                [] => return Err(err(ErrorKind::MissingCtorImage(name.clone()), span)),
                [e] => e,
                [_, e, ..] => return Err(err(ErrorKind::DuplicateName(name.clone()), e.span)),
            };
            let want = x.ck.eval(&loc.ctx, &ctor_type(&sig, &ct, i));
            let it = x.check(&loc, &entry.image, &want).map_err(|e| match e.kind {
                ErrorKind::TypeMismatch { .. } => err(
                    ErrorKind::CtorImageTypeMismatch {
                        ctor: name.clone(),
                        detail: e.kind.to_string(),
                    },
                    e.span,
                ),
                _ => e,
            })?;
            images.push(it);
        }
        let elim = elim.ok_or_else(|| err(ErrorKind::MissingCtorImage("elim".into()), span))?;
        let want = x.ck.eval(&loc.ctx, &eliminator_type(&sig, &ct, &images));
        let et = x.check(&loc, &elim.image, &want).map_err(|e| match e.kind {
            ErrorKind::TypeMismatch { .. } => {
                err(ErrorKind::ElimImageTypeMismatch(e.kind.to_string()), e.span)
            }
            _ => e,
        })?;
        if elim.proofs.len() > sig.ops.len() {
            return Err(err(ErrorKind::ExtraCoherenceProof(sig.ops.len()), elim.span));
        }
        let mut proofs = Vec::with_capacity(sig.ops.len());
        let mut warnings = Vec::new();
        for (i, op) in sig.ops.iter().enumerate() {
            let label = &info.ctors[i];
            let obligation = coherence_obligation(&sig, &ct, &images, &et, i);
            let checked = match elim.proofs.get(i) {
                None => Err(err(ErrorKind::MissingCoherenceProof(label.clone()), elim.span)),
                Some(p) => {
                    let want = x.ck.eval(&loc.ctx, &obligation);
                    x.check(&loc, p, &want).map_err(|e| match e.kind {
                        ErrorKind::TypeMismatch { .. } | ErrorKind::NotEqual { .. } => err(
                            ErrorKind::CoherenceMismatch {
                                label: label.clone(),
                                detail: e.kind.to_string(),
                            },
                            e.span,
                        ),
                        _ => e,
                    })
                }
            };
            match checked {
                Ok(t) => proofs.push(t),
                Err(e) if !self.opts.coherence_check
                    && matches!(
                        e.kind,
                        ErrorKind::CoherenceMismatch { .. } | ErrorKind::MissingCoherenceProof(_)
                    ) =>
                {
                    warnings.push(Warning {
                        msg: format!("{} (assumed)", e.kind),
                        span: e.span,
                    });
                    let name = format!("{target}-{}-coherence", op.label);
                    proofs.push(Term::global(&name));
                    placeholders.push((name, obligation));
                }
                Err(e) => return Err(e),
            }
        }
        drop(x);
        for (name, ty) in placeholders {
            self.fresh_name(&name, span)?;
            self.env.add_postulate(&name, ty);
        }
        self.warnings.extend(warnings);
        let kappa = induction_witness(sig.ops.len(), &et, &proofs);
        let mut spine = vec![ct];
        spine.extend(images);
        spine.push(kappa);
        let alg = Algebra::Custom(Arc::new(spine));
        self.install_algebra(target, &info, &sig, alg);
        Ok(())
    }

    /// Points the generated globals of a data type at a new algebra.
    fn install_algebra(&mut self, name: &str, info: &DataInfo, sig: &Signature, alg: Algebra) {
        let id = info.sig;
        let ty = |env: &GlobalEnv, n: &str| env.get(n).expect("generated global").ty.clone();
        let t = ty(&self.env, name);
        self.env.redefine(name, t, data_former(sig, id, &alg));
        for (i, c) in info.ctors.iter().enumerate() {
            let t = ty(&self.env, c);
            self.env.redefine(c, t, ctor_function(sig, id, &alg, i));
        }
        let t = ty(&self.env, &info.elim);
        self.env.redefine(&info.elim, t, elim_function(sig, id, &alg));
        if let Some(d) = self.data.get_mut(name) {
            d.represented = true;
        }
    }

    /// Re-checks the whole environment with the core checker.
    pub fn recheck(&self) -> Result<(), crate::typeck::DeclError> {
        crate::typeck::check_globals(&self.env, self.opts.trace)
    }

    pub fn value_of(&self, name: &str) -> Option<Val> {
        self.env.get(name)?;
        Some(crate::nbe::Nbe::new(&self.env).global(name))
    }
}

/// Reads a constructor type, elaborated with the data type bound as the
/// innermost variable, as an operation.
fn operation(label: &str, ty: &Term, surface: &Expr, d: usize, span: Span) -> R<Operation> {
    let bad = |msg: &str| {
        err(
            ErrorKind::BadIndexSpine {
                ctor: label.into(),
                msg: msg.into(),
            },
            span,
        )
    };
    let mut names = Vec::new();
    let mut args = Vec::new();
    let mut recursive: Vec<usize> = Vec::new();
    let mut t = ty;
    let mut surface = surface;
    let self_app = |t: &Term, k: usize| -> Option<Vec<Term>> {
        let (head, xs) = t.unapply();
        if *head != Term::Var(k) || xs.len() != d || xs.iter().any(|x| x.mentions(k)) {
            return None;
        }
        Some(xs.into_iter().map(|x| unshift(x, 1, k)).collect())
    };
    let depends = |t: &Term, k: usize, recursive: &[usize]| recursive.iter().any(|&r| t.mentions(k - 1 - r));
    while let Term::Pi(dom, cod) = t {
        let k = args.len();
        let hint = match &surface.kind {
            ExprKind::Pi(n, _, rest) => {
                surface = rest;
                n.clone()
            }
            _ => "_".into(),
        };
        names.push(if hint == "_" { format!("x{k}") } else { hint });
        if depends(dom, k, &recursive) {
            return Err(bad("an argument depends on a recursive argument"));
        }
        if !dom.mentions(k) {
            args.push(OpArg::Ext(unshift(dom, 1, k)));
        } else if let Some(ix) = self_app(dom, k) {
            recursive.push(k);
            args.push(OpArg::Int(ix));
        } else if matches!(**dom, Term::Pi(..)) {
            return Err(err(ErrorKind::NegativeOccurrence(label.into()), span));
        } else {
            return Err(bad("the data type may only occur applied to its indices"));
        }
        t = cod;
    }
    let n = args.len();
    let ret = self_app(t, n).ok_or_else(|| bad("the constructor must return the data type"))?;
    if depends(t, n, &recursive) {
        return Err(bad("the return indices depend on a recursive argument"));
    }
    Ok(Operation {
        label: label.into(),
        arg_names: names,
        args,
        ret,
    })
}
