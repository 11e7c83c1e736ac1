//! Surface syntax of `.dtt` files.

pub mod lexer;
pub mod parser;

pub use parser::{parse_file, ParseError};

/// A byte range in one input file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub file: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span {
            file: self.file,
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Var(String),
    Num(u64),
    Universe,
    UnitTy,
    Tt,
    Refl,
    Lam(String, Option<Box<Expr>>, Box<Expr>),
    Pi(String, Box<Expr>, Box<Expr>),
    Sigma(String, Box<Expr>, Box<Expr>),
    Subset(String, Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Ann(Box<Expr>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    LetPair(String, String, Box<Expr>, Box<Expr>),
    ReprTy(Box<Expr>),
    Repr(Box<Expr>),
    Unrepr(Box<Expr>),
    J(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorDecl {
    pub name: String,
    pub ty: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReprEntry {
    pub ctor: String,
    pub image: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElimEntry {
    pub image: Expr,
    pub proofs: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    Def {
        name: String,
        params: Vec<Param>,
        ty: Expr,
        body: Expr,
    },
    Postulate {
        name: String,
        ty: Expr,
    },
    Data {
        name: String,
        ty: Expr,
        ctors: Vec<CtorDecl>,
    },
    Repr {
        target: String,
        carrier: Expr,
        ctors: Vec<ReprEntry>,
        elim: Option<ElimEntry>,
    },
    ReprFn {
        target: String,
        image: Expr,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: Span,
}

/// The input files of one run, for rendering locations.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    pub files: Vec<(String, String)>,
}

impl SourceMap {
    pub fn add(&mut self, name: impl Into<String>, src: impl Into<String>) -> usize {
        self.files.push((name.into(), src.into()));
        self.files.len() - 1
    }

    /// `file:line:col` of the start of a span, both counted from 1.
    pub fn locate(&self, span: Span) -> String {
        let Some((name, src)) = self.files.get(span.file) else {
            return "<unknown>".into();
        };
        let before = &src[..span.start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        format!("{name}:{line}:{col}")
    }
}
