//! Program extraction: erasure to an untyped IR, simplification and code
//! generation.

pub mod codegen;
pub mod erase;
pub mod interp;
pub mod ir;
pub mod simplify;

use std::collections::{BTreeSet, HashMap};

use crate::program::{CoreDecl, CoreProgram};

use erase::Eraser;
use ir::{Ir, PrimTable};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("postulate `{0}` has no runtime implementation")]
    UnmappedPostulate(String),
}

/// Replaces references to the targets of `repr f as g` by the erased images.
pub fn substitute_globals(ir: &Ir, images: &HashMap<String, Ir>) -> Ir {
    match ir {
        Ir::Global(g) => images.get(g).cloned().unwrap_or_else(|| ir.clone()),
        Ir::Var(_) | Ir::Unit | Ir::Nat(_) => ir.clone(),
        Ir::Prim(p, args) => Ir::Prim(p.clone(), args.iter().map(|a| substitute_globals(a, images)).collect()),
        Ir::Lam(b) => Ir::lam(substitute_globals(b, images)),
        Ir::App(a, b) => Ir::app(substitute_globals(a, images), substitute_globals(b, images)),
        Ir::Let(a, b) => Ir::Let(
            Box::new(substitute_globals(a, images)),
            Box::new(substitute_globals(b, images)),
        ),
        Ir::Pair(a, b) => Ir::Pair(
            Box::new(substitute_globals(a, images)),
            Box::new(substitute_globals(b, images)),
        ),
        Ir::Fst(p) => Ir::Fst(Box::new(substitute_globals(p, images))),
        Ir::Snd(p) => Ir::Snd(Box::new(substitute_globals(p, images))),
        Ir::Ctor { origin, tag, args } => Ir::Ctor {
            origin: origin.clone(),
            tag: *tag,
            args: args.iter().map(|a| substitute_globals(a, images)).collect(),
        },
        Ir::Switch(s, cases) => Ir::Switch(
            Box::new(substitute_globals(s, images)),
            cases.iter().map(|(n, c)| (*n, substitute_globals(c, images))).collect(),
        ),
        Ir::Fix(b) => Ir::Fix(Box::new(substitute_globals(b, images))),
        Ir::Thunk(b) => Ir::Thunk(Box::new(substitute_globals(b, images))),
        Ir::Force(b) => Ir::Force(Box::new(substitute_globals(b, images))),
    }
}

/// Small closed definitions such as constructor wrappers are inlined into
/// later definitions.
fn inlinable(ir: &Ir) -> bool {
    let mut ok = ir.size() <= 12;
    ir.visit(&mut |t| ok &= !matches!(t, Ir::Global(_) | Ir::Fix(_)));
    ok
}

fn globals_of(ir: &Ir) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    ir.visit(&mut |t| {
        if let Ir::Global(g) = t {
            out.insert(g.clone());
        }
    });
    out
}

/// Erases and simplifies each definition in order, substituting repr
/// images and inlining small definitions into later ones.
fn process(
    eraser: &Eraser,
    translated: &CoreProgram,
    prims: &PrimTable,
    emit: &mut dyn FnMut(&str, &Ir),
) -> Result<HashMap<String, Ir>, ExtractError> {
    let mut images = HashMap::new();
    for d in &translated.decls {
        if let CoreDecl::ReprFn { target, image } = d {
            images.insert(target.clone(), eraser.erase(image)?);
        }
    }
    for d in &translated.decls {
        if let CoreDecl::Def { name, body, .. } = d {
            if eraser.erasable_arity(name) == Some(0) {
                continue;
            }
            let ir = simplify::simplify(&substitute_globals(&eraser.erase(body)?, &images), prims);
            if inlinable(&ir) && !images.contains_key(name) {
                images.insert(name.clone(), ir.clone());
            }
            emit(name, &ir);
        }
    }
    Ok(images)
}

fn inline_images(eraser: &Eraser, translated: &CoreProgram, prims: &PrimTable) -> Result<HashMap<String, Ir>, ExtractError> {
    process(eraser, translated, prims, &mut |_, _| {})
}

/// Erases and simplifies every definition of a translated program. When a
/// `main` is defined only the definitions it reaches are kept.
pub fn extract(translated: &CoreProgram, prims: &PrimTable) -> Result<Vec<(String, Ir)>, ExtractError> {
    let eraser = Eraser::new(translated, prims);
    let mut defs = Vec::new();
    process(&eraser, translated, prims, &mut |name, ir| defs.push((name.to_string(), ir.clone())))?;
    if !defs.iter().any(|(n, _)| n == "main") {
        return Ok(defs);
    }
    let index: HashMap<&str, &Ir> = defs.iter().map(|(n, i)| (n.as_str(), i)).collect();
    let mut live = BTreeSet::from(["main".to_string()]);
    let mut todo = vec!["main".to_string()];
    while let Some(n) = todo.pop() {
        if let Some(ir) = index.get(n.as_str()) {
            for g in globals_of(ir) {
                if live.insert(g.clone()) {
                    todo.push(g);
                }
            }
        }
    }
    Ok(defs.into_iter().filter(|(n, _)| live.contains(n)).collect())
}

/// Erases one open term, as it appears under `depth` binders, and
/// simplifies it.
pub fn extract_term(translated: &CoreProgram, prims: &PrimTable, t: &crate::syntax::Term) -> Result<Ir, ExtractError> {
    let eraser = Eraser::new(translated, prims);
    let images = inline_images(&eraser, translated, prims)?;
    Ok(simplify::simplify(&substitute_globals(&eraser.erase(t)?, &images), prims))
}

/// The full back end: extraction followed by JavaScript generation.
pub fn compile(translated: &CoreProgram, prims: &PrimTable) -> Result<String, ExtractError> {
    codegen::module(&extract(translated, prims)?, prims)
}

/// Data types whose tagged values the IR may allocate.
pub fn ctor_origins(globals: &[(String, Ir)]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (_, ir) in globals {
        ir.visit(&mut |t| {
            if let Ir::Ctor { origin, .. } = t {
                out.insert(origin.clone());
            }
        });
    }
    out
}
