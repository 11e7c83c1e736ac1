use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Define,
    Semi,
    Bar,
    Equals,
    Arrow,
    Star,
    Backslash,
    Dot,
    Underscore,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Num(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Define => ":=",
            Tok::Semi => ";",
            Tok::Bar => "|",
            Tok::Equals => "=",
            Tok::Arrow => "->",
            Tok::Star => "*",
            Tok::Backslash => "\\",
            Tok::Dot => ".",
            Tok::Underscore => "_",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Starts in the first column of a line, which ends any open expression.
    pub bol: bool,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '+' | '′' | '₀'..='₉')
}

pub fn lex(src: &str, file: usize) -> Result<Vec<Token>, (String, Span)> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let span = |s: usize, e: usize| Span { file, start: s, end: e };
    let bol = |p: usize| p == 0 || src.as_bytes()[p - 1] == b'\n';
    let end_of = |j: usize| chars.get(j).map(|c| c.0).unwrap_or(src.len());
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1).map(|c| c.1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if c == ':' && chars.get(i + 1).map(|c| c.1) == Some('=') {
            out.push(Token {
                tok: Tok::Define,
                span: span(pos, pos + 2),
                bol: bol(pos),
            });
            i += 2;
            continue;
        }
        if c == '-' && chars.get(i + 1).map(|c| c.1) == Some('>') {
            out.push(Token {
                tok: Tok::Arrow,
                span: span(pos, pos + 2),
                bol: bol(pos),
            });
            i += 2;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Bar),
            '=' | '≡' => Some(Tok::Equals),
            '→' => Some(Tok::Arrow),
            '*' | '×' => Some(Tok::Star),
            '\\' | 'λ' => Some(Tok::Backslash),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                span: span(pos, end_of(i + 1)),
                bol: bol(pos),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text = &src[pos..end_of(i)];
            let n = text
                .parse()
                .map_err(|_| (format!("numeral `{text}` is too large"), span(pos, end_of(i))))?;
            out.push(Token {
                tok: Tok::Num(n),
                span: span(pos, end_of(i)),
                bol: bol(pos),
            });
            continue;
        }
        if ident_start(c) {
            while i < chars.len() && ident_continue(chars[i].1) {
                i += 1;
            }
            let text = &src[pos..end_of(i)];
            let tok = if text == "_" {
                Tok::Underscore
            } else {
                Tok::Ident(text.to_string())
            };
            out.push(Token {
                tok,
                span: span(pos, end_of(i)),
                bol: bol(pos),
            });
            continue;
        }
        return Err((format!("unexpected character `{c}`"), span(pos, end_of(i + 1))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s, 0).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn identifiers_with_symbols() {
        assert_eq!(
            toks("ubig-1+ elim-List' x -> y"),
            vec![
                Tok::Ident("ubig-1+".into()),
                Tok::Ident("elim-List'".into()),
                Tok::Ident("x".into()),
                Tok::Arrow,
                Tok::Ident("y".into()),
            ]
        );
    }

    #[test]
    fn comments_and_lambdas() {
        assert_eq!(
            toks("-- note\n\\x. _ 12"),
            vec![
                Tok::Backslash,
                Tok::Ident("x".into()),
                Tok::Dot,
                Tok::Underscore,
                Tok::Num(12)
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(lex("a # b", 0).is_err());
    }
}
