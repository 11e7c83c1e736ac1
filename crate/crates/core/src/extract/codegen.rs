//! JavaScript code generation for the untyped IR.

use std::fmt::Write;

use super::ir::{Ir, PrimTable};
use super::ExtractError;

const RESERVED: &[&str] = &[
    "arguments", "await", "break", "case", "catch", "class", "const", "continue", "debugger",
    "default", "delete", "do", "else", "enum", "eval", "export", "extends", "false", "finally",
    "for", "function", "if", "implements", "import", "in", "instanceof", "interface", "let", "new",
    "null", "package", "private", "protected", "public", "return", "static", "super", "switch",
    "this", "throw", "true", "try", "typeof", "undefined", "var", "void", "while", "with", "yield",
    "rt", "module", "require",
];

/// A JavaScript identifier for a global. Distinct names map to distinct
/// identifiers.
pub fn mangle(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' => out.push(c),
            '-' => out.push('_'),
            c => {
                let _ = write!(out, "${:x}$", c as u32);
            }
        }
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) || RESERVED.contains(&out.as_str()) {
        out.insert(0, '$');
    }
    out
}

struct Gen<'a> {
    prims: &'a PrimTable,
    /// Names of the variables in scope, innermost last.
    scope: Vec<String>,
}

impl Gen<'_> {
    fn bind(&mut self, prefix: &str) -> String {
        let name = format!("${prefix}{}", self.scope.len());
        self.scope.push(name.clone());
        name
    }

    fn var(&self, i: usize) -> String {
        self.scope[self.scope.len() - 1 - i].clone()
    }

    fn expr(&mut self, ir: &Ir) -> Result<String, ExtractError> {
        Ok(match ir {
            Ir::Var(i) => self.var(*i),
            Ir::Global(g) => mangle(g),
            Ir::Prim(p, args) => {
                let entry = self
                    .prims
                    .get(p)
                    .ok_or_else(|| ExtractError::UnmappedPostulate(p.clone()))?;
                if entry.arity == 0 {
                    format!("rt.{}", entry.target)
                } else {
                    let args = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                    format!("rt.{}({})", entry.target, args.join(", "))
                }
            }
            Ir::Unit => "null".into(),
            Ir::Nat(n) => format!("{n}n"),
            Ir::Lam(b) => {
                let x = self.bind("x");
                let body = self.expr(b)?;
                self.scope.pop();
                format!("(({x}) => {body})")
            }
            Ir::App(f, a) => {
                let f = self.expr(f)?;
                let a = self.expr(a)?;
                format!("{f}({a})")
            }
            Ir::Let(a, b) => {
                let a = self.expr(a)?;
                let x = self.bind("x");
                let body = self.expr(b)?;
                self.scope.pop();
                format!("(({x}) => {body})({a})")
            }
            Ir::Pair(a, b) => format!("[{}, {}]", self.expr(a)?, self.expr(b)?),
            Ir::Fst(p) => format!("{}[0]", self.expr(p)?),
            Ir::Snd(p) => format!("{}[1]", self.expr(p)?),
            Ir::Ctor { tag, args, .. } => {
                let args = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                format!("{{ t: {tag}, a: [{}] }}", args.join(", "))
            }
            Ir::Switch(s, cases) => {
                let scrut = self.expr(s)?;
                let v = format!("$s{}", self.scope.len());
                let mut out = format!("(({v}) => {{ switch ({v}.t) {{");
                for (tag, (n, body)) in cases.iter().enumerate() {
                    let _ = write!(out, " case {tag}: {{");
                    for k in 0..*n {
                        let x = self.bind("x");
                        let _ = write!(out, " const {x} = {v}.a[{k}];");
                    }
                    let body = self.expr(body)?;
                    self.scope.truncate(self.scope.len() - n);
                    let _ = write!(out, " return {body}; }}");
                }
                let _ = write!(out, " default: throw new Error(\"bad tag\"); }} }})({scrut})");
                out
            }
            Ir::Fix(b) => {
                let f = self.bind("f");
                let out = match &**b {
                    Ir::Lam(body) => {
                        let x = self.bind("x");
                        let body = self.expr(body)?;
                        self.scope.pop();
                        format!("(function {f}({x}) {{ return {body}; }})")
                    }
                    other => {
                        let body = self.expr(other)?;
                        format!("(() => {{ const {f} = (y) => {body}(y); return {f}; }})()")
                    }
                };
                self.scope.pop();
                out
            }
            Ir::Thunk(b) => format!("(() => {})", self.expr(b)?),
            Ir::Force(b) => format!("{}()", self.expr(b)?),
        })
    }
}

/// Renders one closed IR term as a JavaScript expression.
pub fn expression(ir: &Ir, prims: &PrimTable) -> Result<String, ExtractError> {
    Gen {
        prims,
        scope: Vec::new(),
    }
    .expr(ir)
}

/// Emits a CommonJS module binding each global in order and exporting
/// `main` when present.
pub fn module(globals: &[(String, Ir)], prims: &PrimTable) -> Result<String, ExtractError> {
    let mut out = String::from("\"use strict\";\nconst rt = require(\"./dtt_runtime\");\n");
    for (name, ir) in globals {
        let _ = write!(out, "\nconst {} = {};\n", mangle(name), expression(ir, prims)?);
    }
    if globals.iter().any(|(n, _)| n == "main") {
        out.push_str("\nmodule.exports = { main };\n");
    } else {
        out.push_str("\nmodule.exports = {};\n");
    }
    Ok(out)
}
