//! Recursive-descent parser for `.dtt` files.
//!
//! Precedence from loosest to tightest: `->`, `*`, `=`, application.
//! A token in the first column of a line always ends the current
//! declaration, so declarations need no terminator.

use super::lexer::{lex, Tok, Token};
use super::{CtorDecl, Decl, DeclKind, ElimEntry, Expr, ExprKind, Param, ReprEntry, Span};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{msg}")]
pub struct ParseError {
    pub msg: String,
    pub span: Span,
}

const KEYWORDS: &[&str] = &[
    "def", "postulate", "data", "where", "repr", "as", "by", "let", "in", "fst", "snd", "Repr",
    "unrepr", "J", "U", "Unit", "tt", "refl",
];

pub fn parse_file(src: &str, file: usize) -> Result<Vec<Decl>, ParseError> {
    let toks = lex(src, file).map_err(|(msg, span)| ParseError { msg, span })?;
    let eof = Span {
        file,
        start: src.len(),
        end: src.len(),
    };
    let mut p = Parser { toks, pos: 0, eof };
    let mut decls = Vec::new();
    while p.pos < p.toks.len() {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

/// Parses a single expression, for tests and tooling.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src, 0).map_err(|(msg, span)| ParseError { msg, span })?;
    let eof = Span {
        file: 0,
        start: src.len(),
        end: src.len(),
    };
    let mut p = Parser { toks, pos: 0, eof };
    let e = p.expr()?;
    match p.toks.get(p.pos) {
        None => Ok(e),
        Some(t) => Err(p.unexpected(t.clone(), "end of input")),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: Span,
}

type Result<T, E = ParseError> = std::result::Result<T, E>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    /// The next token, unless the current expression has ended.
    fn peek_expr(&self) -> Option<&Tok> {
        match self.toks.get(self.pos) {
            Some(t) if !t.bol || self.pos == 0 => Some(&t.tok),
            _ => None,
        }
    }

    fn span_here(&self) -> Span {
        self.toks.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn last_span(&self) -> Span {
        if self.pos == 0 {
            return self.span_here();
        }
        self.toks[self.pos - 1].span
    }

    fn unexpected(&self, t: Token, wanted: &str) -> ParseError {
        ParseError {
            msg: format!("expected {wanted}, found {}", t.tok),
            span: t.span,
        }
    }

    fn fail<T>(&self, wanted: &str) -> Result<T> {
        match self.toks.get(self.pos) {
            Some(t) => Err(self.unexpected(t.clone(), wanted)),
            None => Err(ParseError {
                msg: format!("expected {wanted}, found end of input"),
                span: self.eof,
            }),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.fail(&tok.to_string())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn is_kw_expr(&self, kw: &str) -> bool {
        matches!(self.peek_expr(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("an identifier"),
        }
    }

    fn binder_name(&mut self) -> Result<String> {
        if self.eat(&Tok::Underscore) {
            return Ok("_".into());
        }
        self.ident()
    }

    fn is_name_at(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Some(Tok::Ident(s)) => !KEYWORDS.contains(&s.as_str()),
            Some(Tok::Underscore) => true,
            _ => false,
        }
    }

    /// Whether `( x y … :` starts at the cursor.
    fn at_binder_group(&self) -> bool {
        if self.peek_expr() != Some(&Tok::LParen) {
            return false;
        }
        let mut k = 1;
        while self.is_name_at(k) {
            k += 1;
        }
        k > 1 && self.peek_at(k) == Some(&Tok::Colon)
    }

    fn binder_group(&mut self) -> Result<Vec<Param>> {
        self.expect(Tok::LParen)?;
        let mut names = Vec::new();
        while !self.eat(&Tok::Colon) {
            names.push(self.binder_name()?);
        }
        let ty = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(names
            .into_iter()
            .map(|name| Param {
                name,
                ty: ty.clone(),
            })
            .collect())
    }

    /// Parses `(x : A) (y : B) …` when followed by `next`; otherwise leaves
    /// the cursor untouched.
    fn binder_prefix(&mut self, next: &Tok) -> Result<Option<(Span, Vec<Param>)>> {
        if !self.at_binder_group() {
            return Ok(None);
        }
        let save = self.pos;
        let start = self.span_here();
        let mut params = Vec::new();
        while self.at_binder_group() {
            match self.binder_group() {
                Ok(ps) => params.extend(ps),
                Err(_) => {
                    self.pos = save;
                    return Ok(None);
                }
            }
        }
        if self.peek_expr() == Some(next) {
            self.pos += 1;
            Ok(Some((start, params)))
        } else {
            self.pos = save;
            Ok(None)
        }
    }

    fn decl(&mut self) -> Result<Decl> {
        let start = self.span_here();
        let kind = if self.eat_kw("def") {
            let name = self.ident()?;
            let mut params = Vec::new();
            while self.peek() == Some(&Tok::LParen) {
                params.extend(self.binder_group()?);
            }
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            self.expect(Tok::Define)?;
            let body = self.expr()?;
            DeclKind::Def {
                name,
                params,
                ty,
                body,
            }
        } else if self.eat_kw("postulate") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            DeclKind::Postulate { name, ty }
        } else if self.eat_kw("data") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            self.expect_kw("where")?;
            let mut ctors = Vec::new();
            while self.peek() == Some(&Tok::Bar) {
                let cstart = self.span_here();
                self.pos += 1;
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.expr()?;
                ctors.push(CtorDecl {
                    name,
                    ty,
                    span: cstart.join(self.last_span()),
                });
            }
            DeclKind::Data { name, ty, ctors }
        } else if self.eat_kw("repr") {
            self.repr_decl()?
        } else {
            return self.fail("a declaration");
        };
        Ok(Decl {
            kind,
            span: start.join(self.last_span()),
        })
    }

    fn repr_decl(&mut self) -> Result<DeclKind> {
        let target = self.ident()?;
        self.expect_kw("as")?;
        let image = self.expr()?;
        if !self.eat(&Tok::LBrace) {
            return Ok(DeclKind::ReprFn { target, image });
        }
        let mut ctors = Vec::new();
        let mut elim = None;
        while !self.eat(&Tok::RBrace) {
            let estart = self.span_here();
            let name = self.ident()?;
            self.expect_kw("as")?;
            let img = self.expr()?;
            if name == "elim" {
                let mut proofs = Vec::new();
                if self.eat_kw("by") {
                    proofs.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        proofs.push(self.expr()?);
                    }
                }
                if elim.is_some() {
                    return Err(ParseError {
                        msg: "duplicate `elim` entry".into(),
                        span: estart,
                    });
                }
                elim = Some(ElimEntry {
                    image: img,
                    proofs,
                    span: estart.join(self.last_span()),
                });
            } else {
                ctors.push(ReprEntry {
                    ctor: name,
                    image: img,
                    span: estart.join(self.last_span()),
                });
            }
            if !self.eat(&Tok::Semi) && self.peek() != Some(&Tok::RBrace) {
                return self.fail("`;` or `}`");
            }
        }
        Ok(DeclKind::Repr {
            target,
            carrier: image,
            ctors,
            elim,
        })
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let start = self.span_here();
        if self.peek_expr() == Some(&Tok::Backslash) {
            return self.lambda();
        }
        if self.is_kw_expr("let") {
            self.pos += 1;
            if self.eat(&Tok::LParen) {
                let a = self.binder_name()?;
                self.expect(Tok::Comma)?;
                let b = self.binder_name()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Equals)?;
                let e = self.expr()?;
                self.expect_kw("in")?;
                let body = self.expr()?;
                let span = start.join(body.span);
                return Ok(Expr::new(
                    ExprKind::LetPair(a, b, Box::new(e), Box::new(body)),
                    span,
                ));
            }
            let x = self.binder_name()?;
            self.expect(Tok::Equals)?;
            let e = self.expr()?;
            self.expect_kw("in")?;
            let body = self.expr()?;
            let span = start.join(body.span);
            return Ok(Expr::new(ExprKind::Let(x, Box::new(e), Box::new(body)), span));
        }
        self.arrow()
    }

    fn lambda(&mut self) -> Result<Expr> {
        let start = self.span_here();
        self.expect(Tok::Backslash)?;
        let mut binders: Vec<(String, Option<Expr>)> = Vec::new();
        while !self.eat(&Tok::Dot) {
            if self.peek() == Some(&Tok::LParen) {
                for p in self.binder_group()? {
                    binders.push((p.name, Some(p.ty)));
                }
            } else {
                binders.push((self.binder_name()?, None));
            }
        }
        if binders.is_empty() {
            return self.fail("a binder");
        }
        let body = self.expr()?;
        let span = start.join(body.span);
        Ok(binders.into_iter().rev().fold(body, |acc, (x, ty)| {
            Expr::new(ExprKind::Lam(x, ty.map(Box::new), Box::new(acc)), span)
        }))
    }

    fn arrow(&mut self) -> Result<Expr> {
        if let Some((start, params)) = self.binder_prefix(&Tok::Arrow)? {
            let cod = self.expr()?;
            let span = start.join(cod.span);
            return Ok(params.into_iter().rev().fold(cod, |acc, p| {
                Expr::new(ExprKind::Pi(p.name, Box::new(p.ty), Box::new(acc)), span)
            }));
        }
        let lhs = self.product()?;
        if self.peek_expr() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.expr()?;
            let span = lhs.span.join(rhs.span);
            return Ok(Expr::new(
                ExprKind::Pi("_".into(), Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        if let Some((start, params)) = self.binder_prefix(&Tok::Star)? {
            let rest = self.product()?;
            let span = start.join(rest.span);
            return Ok(params.into_iter().rev().fold(rest, |acc, p| {
                Expr::new(ExprKind::Sigma(p.name, Box::new(p.ty), Box::new(acc)), span)
            }));
        }
        let lhs = self.equation()?;
        if self.peek_expr() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.product()?;
            let span = lhs.span.join(rhs.span);
            return Ok(Expr::new(
                ExprKind::Sigma("_".into(), Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn equation(&mut self) -> Result<Expr> {
        let lhs = self.application()?;
        if self.peek_expr() == Some(&Tok::Equals) {
            self.pos += 1;
            let rhs = self.application()?;
            let span = lhs.span.join(rhs.span);
            return Ok(Expr::new(ExprKind::Eq(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek_expr() {
            Some(Tok::Ident(s)) => {
                !KEYWORDS.contains(&s.as_str()) || matches!(s.as_str(), "U" | "Unit" | "tt" | "refl")
            }
            Some(Tok::Num(_)) | Some(Tok::LParen) => true,
            Some(Tok::LBrace) => {
                self.is_name_at(1) && self.peek_at(2) == Some(&Tok::Colon)
            }
            _ => false,
        }
    }

    fn application(&mut self) -> Result<Expr> {
        let mut head = self.app_head()?;
        loop {
            let arg = if self.peek_expr() == Some(&Tok::Backslash) {
                self.lambda()?
            } else if self.starts_atom() {
                self.atom()?
            } else {
                break;
            };
            let span = head.span.join(arg.span);
            head = Expr::new(ExprKind::App(Box::new(head), Box::new(arg)), span);
        }
        Ok(head)
    }

    fn app_head(&mut self) -> Result<Expr> {
        let start = self.span_here();
        let unary: Option<fn(Box<Expr>) -> ExprKind> = match self.peek_expr() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "fst" => Some(ExprKind::Fst),
                "snd" => Some(ExprKind::Snd),
                "Repr" => Some(ExprKind::ReprTy),
                "repr" => Some(ExprKind::Repr),
                "unrepr" => Some(ExprKind::Unrepr),
                _ => None,
            },
            _ => None,
        };
        if let Some(k) = unary {
            self.pos += 1;
            let arg = self.atom()?;
            let span = start.join(arg.span);
            return Ok(Expr::new(k(Box::new(arg)), span));
        }
        if self.is_kw_expr("J") {
            self.pos += 1;
            let m = self.atom()?;
            let r = self.atom()?;
            let p = self.atom()?;
            let span = start.join(p.span);
            return Ok(Expr::new(
                ExprKind::J(Box::new(m), Box::new(r), Box::new(p)),
                span,
            ));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.span_here();
        let kind = match self.peek_expr().cloned() {
            Some(Tok::Ident(s)) => {
                let kind = match s.as_str() {
                    "U" => ExprKind::Universe,
                    "Unit" => ExprKind::UnitTy,
                    "tt" => ExprKind::Tt,
                    "refl" => ExprKind::Refl,
                    _ if KEYWORDS.contains(&s.as_str()) => return self.fail("an expression"),
                    _ => ExprKind::Var(s),
                };
                self.pos += 1;
                kind
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                ExprKind::Num(n)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.expr()?;
                if self.eat(&Tok::Colon) {
                    let ty = self.expr()?;
                    self.expect(Tok::RParen)?;
                    ExprKind::Ann(Box::new(first), Box::new(ty))
                } else {
                    let mut items = vec![first];
                    while self.eat(&Tok::Comma) {
                        items.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    let last = items.pop().unwrap();
                    if items.is_empty() {
                        return Ok(Expr::new(last.kind, start.join(self.last_span())));
                    }
                    let span = start.join(self.last_span());
                    return Ok(items.into_iter().rev().fold(last, |acc, a| {
                        Expr::new(ExprKind::Pair(Box::new(a), Box::new(acc)), span)
                    }));
                }
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let x = self.binder_name()?;
                self.expect(Tok::Colon)?;
                let a = self.expr()?;
                self.expect(Tok::Bar)?;
                let b = self.expr()?;
                self.expect(Tok::RBrace)?;
                ExprKind::Subset(x, Box::new(a), Box::new(b))
            }
            _ => return self.fail("an expression"),
        };
        Ok(Expr::new(kind, start.join(self.last_span())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(e: &Expr) -> String {
        match &e.kind {
            ExprKind::Var(x) => x.clone(),
            ExprKind::Num(n) => n.to_string(),
            ExprKind::Universe => "U".into(),
            ExprKind::UnitTy => "Unit".into(),
            ExprKind::Tt => "tt".into(),
            ExprKind::Refl => "refl".into(),
            ExprKind::Lam(x, _, b) => format!("(\\{x}. {})", show(b)),
            ExprKind::Pi(x, a, b) => format!("(({x} : {}) -> {})", show(a), show(b)),
            ExprKind::Sigma(x, a, b) => format!("(({x} : {}) * {})", show(a), show(b)),
            ExprKind::Subset(x, a, b) => format!("{{{x} : {} | {}}}", show(a), show(b)),
            ExprKind::App(f, a) => format!("({} {})", show(f), show(a)),
            ExprKind::Pair(a, b) => format!("({}, {})", show(a), show(b)),
            ExprKind::Fst(a) => format!("(fst {})", show(a)),
            ExprKind::Snd(a) => format!("(snd {})", show(a)),
            ExprKind::Eq(a, b) => format!("({} = {})", show(a), show(b)),
            ExprKind::Ann(a, b) => format!("({} : {})", show(a), show(b)),
            ExprKind::Let(x, e, b) => format!("(let {x} = {} in {})", show(e), show(b)),
            ExprKind::LetPair(x, y, e, b) => {
                format!("(let ({x}, {y}) = {} in {})", show(e), show(b))
            }
            ExprKind::ReprTy(a) => format!("(Repr {})", show(a)),
            ExprKind::Repr(a) => format!("(repr {})", show(a)),
            ExprKind::Unrepr(a) => format!("(unrepr {})", show(a)),
            ExprKind::J(m, r, p) => format!("(J {} {} {})", show(m), show(r), show(p)),
        }
    }

    fn parse(s: &str) -> String {
        show(&parse_expr(s).unwrap())
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("A * B -> C"), "((_ : ((_ : A) * B)) -> C)");
        assert_eq!(parse("f x = g y -> P"), "((_ : ((f x) = (g y))) -> P)");
        assert_eq!(parse("A -> B -> C"), "((_ : A) -> ((_ : B) -> C))");
    }

    #[test]
    fn binders() {
        assert_eq!(
            parse("(A : U) (x y : A) -> x = y"),
            "((A : U) -> ((x : A) -> ((y : A) -> (x = y))))"
        );
        assert_eq!(parse("(x : A) * P x"), "((x : A) * (P x))");
        assert_eq!(parse("(x : A)"), "(x : A)");
        assert_eq!(
            parse("{l : List A | length l = n}"),
            "{l : (List A) | ((length l) = n)}"
        );
    }

    #[test]
    fn lambdas_and_lets() {
        assert_eq!(parse("\\x _. f x"), "(\\x. (\\_. (f x)))");
        assert_eq!(
            parse("let (l, _) = repr v in l"),
            "(let (l, _) = (repr v) in l)"
        );
        assert_eq!(parse("J (\\a b p. P) r q"), "(J (\\a. (\\b. (\\p. P))) r q)");
        assert_eq!(parse("f (a, b, c)"), "(f (a, (b, c)))");
        assert_eq!(parse("subst P p \\x. x"), "(((subst P) p) (\\x. x))");
    }

    #[test]
    fn declarations() {
        let src = "\
data Nat : U where
  | zero : Nat
  | succ : Nat -> Nat
def two : Nat := succ (succ zero)
repr Nat as UBig {
  zero as ubig-0;
  succ as ubig-1+;
  elim as ubig-elim by p, q
}
repr plus as ubig-add
postulate P : Nat -> U
";
        let decls = parse_file(src, 0).unwrap();
        assert_eq!(decls.len(), 5);
        match &decls[2].kind {
            DeclKind::Repr { ctors, elim, .. } => {
                assert_eq!(ctors.len(), 2);
                assert_eq!(elim.as_ref().unwrap().proofs.len(), 2);
            }
            k => panic!("unexpected {k:?}"),
        }
        assert!(matches!(decls[3].kind, DeclKind::ReprFn { .. }));
    }

    #[test]
    fn column_zero_ends_expression() {
        let src = "def a : Nat := repr x\nrepr f as g\n";
        let decls = parse_file(src, 0).unwrap();
        assert_eq!(decls.len(), 2);
    }

    #[test]
    fn reports_position() {
        let err = parse_file("def a : := x", 0).unwrap_err();
        assert_eq!(err.span.start, 8);
    }
}
