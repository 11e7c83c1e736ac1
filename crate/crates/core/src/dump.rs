//! The core dump format: parenthesised S-expressions, one declaration per
//! line.
//!
//! ```text
//! (signature Nat (tel) ((op zero () ()) (op succ ((n (int ()))) ())))
//! (post UBig U)
//! (def plus 0 (pi (data Nat default ()) ...) (lam ...))
//! (reprfn plus (post ubig-add))
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::program::{CoreDecl, CoreProgram};
use crate::syntax::{Algebra, OpArg, Operation, SigId, Signature, Telescope, Term};

#[derive(Debug, Error, PartialEq)]
pub enum DumpError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

pub fn term_to_sexpr(t: &Term, sig_name: &dyn Fn(SigId) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, t, sig_name);
    out
}

fn write_alg(out: &mut String, alg: &Algebra, sig_name: &dyn Fn(SigId) -> String) {
    match alg {
        Algebra::Default => out.push_str("default"),
        Algebra::Custom(spine) => {
            out.push_str("(alg");
            for t in spine.iter() {
                out.push(' ');
                write_term(out, t, sig_name);
            }
            out.push(')');
        }
    }
}

fn write_list(out: &mut String, ts: &[Term], sig_name: &dyn Fn(SigId) -> String) {
    out.push('(');
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_term(out, t, sig_name);
    }
    out.push(')');
}

fn write_term(out: &mut String, t: &Term, sig_name: &dyn Fn(SigId) -> String) {
    let node = |out: &mut String, tag: &str, kids: &[&Term]| {
        out.push('(');
        out.push_str(tag);
        for k in kids {
            out.push(' ');
            write_term(out, k, sig_name);
        }
        out.push(')');
    };
    match t {
        Term::Var(i) => {
            let _ = write!(out, "(var {i})");
        }
        Term::Universe => out.push('U'),
        Term::Unit => out.push_str("unit"),
        Term::Tt => out.push_str("tt"),
        Term::Pi(a, b) => node(out, "pi", &[a, b]),
        Term::Lam(b) => node(out, "lam", &[b]),
        Term::App(f, a) => node(out, "app", &[f, a]),
        Term::Sigma(a, b) => node(out, "sig", &[a, b]),
        Term::Pair(a, b) => node(out, "pair", &[a, b]),
        Term::Fst(p) => node(out, "fst", &[p]),
        Term::Snd(p) => node(out, "snd", &[p]),
        Term::SubsetSigma(a, b) => node(out, "sub", &[a, b]),
        Term::SubsetPair(a, b) => node(out, "spair", &[a, b]),
        Term::SubsetFst(p) => node(out, "sfst", &[p]),
        Term::SubsetSnd(p) => node(out, "ssnd", &[p]),
        Term::Eq(a, x, y) => node(out, "eq", &[a, x, y]),
        Term::Refl(a) => node(out, "refl", &[a]),
        Term::J(m, r, p) => node(out, "J", &[m, r, p]),
        Term::ReprTy(a) => node(out, "Repr", &[a]),
        Term::ReprTm(a) => node(out, "repr", &[a]),
        Term::UnreprTm(a) => node(out, "unrepr", &[a]),
        Term::Global(n) => {
            let _ = write!(out, "(global {n})");
        }
        Term::Postulate(n) => {
            let _ = write!(out, "(post {n})");
        }
        Term::DataTy { sig, alg, indices } => {
            let _ = write!(out, "(data {} ", sig_name(*sig));
            write_alg(out, alg, sig_name);
            out.push(' ');
            write_list(out, indices, sig_name);
            out.push(')');
        }
        Term::Ctor { sig, op, alg, args } => {
            let _ = write!(out, "(ctor {} {op} ", sig_name(*sig));
            write_alg(out, alg, sig_name);
            out.push(' ');
            write_list(out, args, sig_name);
            out.push(')');
        }
        Term::Elim {
            sig,
            alg,
            motive,
            methods,
            indices,
            scrutinee,
        } => {
            let _ = write!(out, "(elim {} ", sig_name(*sig));
            write_alg(out, alg, sig_name);
            out.push(' ');
            write_term(out, motive, sig_name);
            out.push(' ');
            write_list(out, methods, sig_name);
            out.push(' ');
            write_list(out, indices, sig_name);
            out.push(' ');
            write_term(out, scrutinee, sig_name);
            out.push(')');
        }
    }
}

fn write_signature(out: &mut String, s: &Signature, sig_name: &dyn Fn(SigId) -> String) {
    let _ = write!(out, "(signature {} (tel", s.name);
    for (n, t) in s.indices.names.iter().zip(&s.indices.types) {
        let _ = write!(out, " ({n} ");
        write_term(out, t, sig_name);
        out.push(')');
    }
    out.push_str(") (");
    for (i, op) in s.ops.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "(op {} (", op.label);
        for (k, (n, a)) in op.arg_names.iter().zip(&op.args).enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({n} ");
            match a {
                OpArg::Ext(t) => {
                    out.push_str("(ext ");
                    write_term(out, t, sig_name);
                    out.push(')');
                }
                OpArg::Int(ix) => {
                    out.push_str("(int ");
                    write_list(out, ix, sig_name);
                    out.push(')');
                }
            }
            out.push(')');
        }
        out.push_str(") ");
        write_list(out, &op.ret, sig_name);
        out.push(')');
    }
    out.push_str("))");
}

pub fn program_to_string(p: &CoreProgram) -> String {
    let names = |id: SigId| p.sigs[id.0].name.clone();
    let mut out = String::new();
    for s in &p.sigs {
        write_signature(&mut out, s, &names);
        out.push('\n');
    }
    for d in &p.decls {
        match d {
            CoreDecl::Def {
                name,
                ty,
                body,
                params,
            } => {
                let _ = write!(out, "(def {name} {params} ");
                write_term(&mut out, ty, &names);
                out.push(' ');
                write_term(&mut out, body, &names);
                out.push(')');
            }
            CoreDecl::Postulate { name, ty } => {
                let _ = write!(out, "(post {name} ");
                write_term(&mut out, ty, &names);
                out.push(')');
            }
            CoreDecl::ReprFn { target, image } => {
                let _ = write!(out, "(reprfn {target} ");
                write_term(&mut out, image, &names);
                out.push(')');
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub fn parse_sexps(src: &str) -> Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut atom = String::new();
    let flush = |atom: &mut String, stack: &mut Vec<Vec<Sexp>>| {
        if !atom.is_empty() {
            stack.last_mut().unwrap().push(Sexp::Atom(std::mem::take(atom)));
        }
    };
    for c in src.chars() {
        match c {
            '(' => {
                flush(&mut atom, &mut stack);
                stack.push(Vec::new());
            }
            ')' => {
                flush(&mut atom, &mut stack);
                let done = stack.pop().ok_or("unbalanced `)`")?;
                stack
                    .last_mut()
                    .ok_or("unbalanced `)`")?
                    .push(Sexp::List(done));
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut stack);
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

struct Reader<'a> {
    sig_id: &'a dyn Fn(&str) -> Option<SigId>,
}

type R<T> = Result<T, String>;

fn atom(s: &Sexp) -> R<&str> {
    match s {
        Sexp::Atom(a) => Ok(a),
        Sexp::List(_) => Err("expected an atom".into()),
    }
}

fn list(s: &Sexp) -> R<&[Sexp]> {
    match s {
        Sexp::List(l) => Ok(l),
        Sexp::Atom(a) => Err(format!("expected a list, found `{a}`")),
    }
}

impl Reader<'_> {
    fn terms(&self, s: &Sexp) -> R<Vec<Term>> {
        list(s)?.iter().map(|t| self.term(t)).collect()
    }

    fn alg(&self, s: &Sexp) -> R<Algebra> {
        match s {
            Sexp::Atom(a) if a == "default" => Ok(Algebra::Default),
            Sexp::List(l) if matches!(l.first(), Some(Sexp::Atom(a)) if a == "alg") => Ok(
                Algebra::Custom(Arc::new(
                    l[1..].iter().map(|t| self.term(t)).collect::<R<_>>()?,
                )),
            ),
            _ => Err("malformed algebra".into()),
        }
    }

    fn sig(&self, s: &Sexp) -> R<SigId> {
        let name = atom(s)?;
        (self.sig_id)(name).ok_or_else(|| format!("unknown signature `{name}`"))
    }

    fn term(&self, s: &Sexp) -> R<Term> {
        let l = match s {
            Sexp::Atom(a) => {
                return match a.as_str() {
                    "U" => Ok(Term::Universe),
                    "unit" => Ok(Term::Unit),
                    "tt" => Ok(Term::Tt),
                    _ => Err(format!("unknown atom `{a}`")),
                }
            }
            Sexp::List(l) => l,
        };
        let tag = atom(l.first().ok_or("empty list")?)?;
        let arg = |i: usize| -> R<Term> {
            self.term(l.get(i).ok_or_else(|| format!("`{tag}` is missing an argument"))?)
        };
        let want = |n: usize| -> R<()> {
            if l.len() == n + 1 {
                Ok(())
            } else {
                Err(format!("`{tag}` expects {n} arguments"))
            }
        };
        let t = match tag {
            "var" => {
                want(1)?;
                Term::Var(atom(&l[1])?.parse().map_err(|_| "bad index")?)
            }
            "global" => {
                want(1)?;
                Term::global(atom(&l[1])?)
            }
            "post" => {
                want(1)?;
                Term::postulate(atom(&l[1])?)
            }
            "pi" => {
                want(2)?;
                Term::pi(arg(1)?, arg(2)?)
            }
            "lam" => {
                want(1)?;
                Term::lam(arg(1)?)
            }
            "app" => {
                want(2)?;
                Term::app(arg(1)?, arg(2)?)
            }
            "sig" => {
                want(2)?;
                Term::sigma(arg(1)?, arg(2)?)
            }
            "pair" => {
                want(2)?;
                Term::pair(arg(1)?, arg(2)?)
            }
            "fst" => {
                want(1)?;
                Term::fst(arg(1)?)
            }
            "snd" => {
                want(1)?;
                Term::snd(arg(1)?)
            }
            "sub" => {
                want(2)?;
                Term::subset(arg(1)?, arg(2)?)
            }
            "spair" => {
                want(2)?;
                Term::spair(arg(1)?, arg(2)?)
            }
            "sfst" => {
                want(1)?;
                Term::sfst(arg(1)?)
            }
            "ssnd" => {
                want(1)?;
                Term::ssnd(arg(1)?)
            }
            "eq" => {
                want(3)?;
                Term::eq(arg(1)?, arg(2)?, arg(3)?)
            }
            "refl" => {
                want(1)?;
                Term::refl(arg(1)?)
            }
            "J" => {
                want(3)?;
                Term::j(arg(1)?, arg(2)?, arg(3)?)
            }
            "Repr" => {
                want(1)?;
                Term::repr_ty(arg(1)?)
            }
            "repr" => {
                want(1)?;
                Term::repr(arg(1)?)
            }
            "unrepr" => {
                want(1)?;
                Term::unrepr(arg(1)?)
            }
            "data" => {
                want(3)?;
                Term::DataTy {
                    sig: self.sig(&l[1])?,
                    alg: self.alg(&l[2])?,
                    indices: self.terms(&l[3])?,
                }
            }
            "ctor" => {
                want(4)?;
                Term::Ctor {
                    sig: self.sig(&l[1])?,
                    op: atom(&l[2])?.parse().map_err(|_| "bad operation index")?,
                    alg: self.alg(&l[3])?,
                    args: self.terms(&l[4])?,
                }
            }
            "elim" => {
                want(6)?;
                Term::Elim {
                    sig: self.sig(&l[1])?,
                    alg: self.alg(&l[2])?,
                    motive: Arc::new(arg(3)?),
                    methods: self.terms(&l[4])?,
                    indices: self.terms(&l[5])?,
                    scrutinee: Arc::new(arg(6)?),
                }
            }
            _ => return Err(format!("unknown node tag `{tag}`")),
        };
        Ok(t)
    }

    fn signature(&self, l: &[Sexp]) -> R<Signature> {
        if l.len() != 4 {
            return Err("`signature` expects a name, a telescope and operations".into());
        }
        let name = atom(&l[1])?.to_string();
        let tel = list(&l[2])?;
        if tel.first().map(atom).transpose()? != Some("tel") {
            return Err("expected `(tel …)`".into());
        }
        let mut indices = Telescope::new();
        for e in &tel[1..] {
            let e = list(e)?;
            if e.len() != 2 {
                return Err("malformed telescope entry".into());
            }
            indices.push(atom(&e[0])?, self.term(&e[1])?);
        }
        let mut ops = Vec::new();
        for o in list(&l[3])? {
            let o = list(o)?;
            if o.len() != 4 || atom(&o[0])? != "op" {
                return Err("malformed operation".into());
            }
            let mut arg_names = Vec::new();
            let mut args = Vec::new();
            for a in list(&o[2])? {
                let a = list(a)?;
                if a.len() != 2 {
                    return Err("malformed operation argument".into());
                }
                arg_names.push(atom(&a[0])?.to_string());
                let k = list(&a[1])?;
                let kind = atom(k.first().ok_or("empty argument")?)?;
                let payload = k.get(1).ok_or("missing argument payload")?;
                args.push(match kind {
                    "ext" => OpArg::Ext(self.term(payload)?),
                    "int" => OpArg::Int(self.terms(payload)?),
                    other => return Err(format!("unknown argument kind `{other}`")),
                });
            }
            ops.push(Operation {
                label: atom(&o[1])?.to_string(),
                arg_names,
                args,
                ret: self.terms(&o[3])?,
            });
        }
        Ok(Signature { name, indices, ops })
    }
}

pub fn parse_term(src: &str, sig_id: &dyn Fn(&str) -> Option<SigId>) -> Result<Term, String> {
    let sexps = parse_sexps(src)?;
    match sexps.as_slice() {
        [one] => Reader { sig_id }.term(one),
        _ => Err("expected exactly one term".into()),
    }
}

pub fn parse_program(src: &str) -> Result<CoreProgram, DumpError> {
    let mut prog = CoreProgram::default();
    for (lineno, line) in src.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |msg: String| DumpError::Malformed { line: line_no, msg };
        if line.trim().is_empty() {
            continue;
        }
        let sexps = parse_sexps(line).map_err(err)?;
        let [Sexp::List(l)] = sexps.as_slice() else {
            return Err(err("expected one declaration per line".into()));
        };
        let names: Vec<String> = prog.sigs.iter().map(|s| s.name.clone()).collect();
        let lookup = |n: &str| names.iter().position(|m| m == n).map(SigId);
        let reader = Reader { sig_id: &lookup };
        let tag = l.first().map(atom).transpose().map_err(err)?.unwrap_or("");
        match tag {
            "signature" => {
                let s = reader.signature(l).map_err(err)?;
                prog.sigs.push(s);
            }
            "def" if l.len() == 5 => {
                let name = atom(&l[1]).map_err(err)?.to_string();
                let params = atom(&l[2])
                    .map_err(err)?
                    .parse()
                    .map_err(|_| err("bad parameter count".into()))?;
                let ty = reader.term(&l[3]).map_err(err)?;
                let body = reader.term(&l[4]).map_err(err)?;
                prog.decls.push(CoreDecl::Def {
                    name,
                    ty,
                    body,
                    params,
                });
            }
            "post" if l.len() == 3 => {
                let name = atom(&l[1]).map_err(err)?.to_string();
                let ty = reader.term(&l[2]).map_err(err)?;
                prog.decls.push(CoreDecl::Postulate { name, ty });
            }
            "reprfn" if l.len() == 3 => {
                let target = atom(&l[1]).map_err(err)?.to_string();
                let image = reader.term(&l[2]).map_err(err)?;
                prog.decls.push(CoreDecl::ReprFn { target, image });
            }
            other => return Err(err(format!("unknown or malformed declaration `{other}`"))),
        }
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_sig() -> Signature {
        Signature {
            name: "Nat".into(),
            indices: Telescope::new(),
            ops: vec![
                Operation {
                    label: "zero".into(),
                    arg_names: vec![],
                    args: vec![],
                    ret: vec![],
                },
                Operation {
                    label: "succ".into(),
                    arg_names: vec!["n".into()],
                    args: vec![OpArg::Int(vec![])],
                    ret: vec![],
                },
            ],
        }
    }

    #[test]
    fn program_round_trip() {
        let nat = Term::DataTy {
            sig: SigId(0),
            alg: Algebra::Default,
            indices: vec![],
        };
        let prog = CoreProgram {
            sigs: vec![nat_sig()],
            decls: vec![
                CoreDecl::Postulate {
                    name: "UBig".into(),
                    ty: Term::Universe,
                },
                CoreDecl::Def {
                    name: "id".into(),
                    ty: Term::arrow(nat.clone(), nat.clone()),
                    body: Term::lam(Term::Var(0)),
                    params: 0,
                },
                CoreDecl::ReprFn {
                    target: "id".into(),
                    image: Term::lam(Term::Var(0)),
                },
            ],
        };
        let text = program_to_string(&prog);
        assert_eq!(parse_program(&text).unwrap(), prog);
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn stable_node_tags() {
        let t = Term::j(
            Term::Universe,
            Term::repr(Term::unrepr(Term::Var(0))),
            Term::refl(Term::Tt),
        );
        let s = term_to_sexpr(&t, &|_| String::new());
        assert_eq!(s, "(J U (repr (unrepr (var 0))) (refl tt))");
    }

    #[test]
    fn rejects_unknown_tags() {
        assert!(parse_term("(frob U)", &|_| None).is_err());
        assert!(parse_program("(def x)").is_err());
    }
}
