use std::path::PathBuf;

use datatt::elab::{elaborate, Options};
use datatt::extract::interp::Machine;
use datatt::extract::ir::{Ir, PrimTable};
use datatt::extract::{ctor_origins, extract, extract_term};
use datatt::program::{CoreDecl, CoreProgram};
use datatt::surface::SourceMap;
use datatt::syntax::Term;
use datatt::translate::translate_program;
use datatt::with_big_stack;

const STDLIB: &[&str] = &[
    "stdlib/prelude.dtt",
    "stdlib/list.dtt",
    "stdlib/vec.dtt",
    "stdlib/fin.dtt",
    "stdlib/reindex.dtt",
];

fn translated(extra: &[&str]) -> CoreProgram {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut sm = SourceMap::default();
    for f in STDLIB.iter().chain(extra) {
        sm.add(*f, std::fs::read_to_string(root.join(f)).unwrap());
    }
    let el = elaborate(&sm, Options::default()).unwrap_or_else(|e| panic!("{}: {}", sm.locate(e.span), e.kind));
    translate_program(&el.env.to_program())
}

/// The body of `name` with all but its last parameter abstracted into
/// the context.
fn last_lambda(p: &CoreProgram, name: &str) -> Term {
    let (params, body) = p
        .decls
        .iter()
        .find_map(|d| match d {
            CoreDecl::Def { name: n, params, body, .. } if n == name => Some((*params, body.clone())),
            _ => None,
        })
        .unwrap();
    let mut t = body;
    for _ in 1..params {
        t = match t {
            Term::Lam(b) => (*b).clone(),
            other => panic!("{name}: expected a lambda, found {other:?}"),
        };
    }
    t
}

#[test]
fn nathack_runs_on_numbers() {
    with_big_stack(|| {
        let p = translated(&["examples/nathack.dtt"]);
        let prims = PrimTable::default();
        let globals = extract(&p, &prims).unwrap();
        assert!(!ctor_origins(&globals).contains("Nat"));
        let m = Machine::new(&globals, &prims).unwrap();
        assert_eq!(m.global("main").unwrap().to_string(), "2000");
    });
}

#[test]
fn roundtrip_runs() {
    with_big_stack(|| {
        let p = translated(&["examples/roundtrip.dtt"]);
        let prims = PrimTable::default();
        let globals = extract(&p, &prims).unwrap();
        let m = Machine::new(&globals, &prims).unwrap();
        assert_eq!(m.global("main").unwrap().to_string(), "[1 () 5 [1 () 7 [0 ()]]]");
    });
}

#[test]
fn conversions_extract_to_identity() {
    with_big_stack(|| {
        let p = translated(&[]);
        let prims = PrimTable::default();
        for name in ["forget-length", "remember-length", "conv-p"] {
            let ir = extract_term(&p, &prims, &last_lambda(&p, name)).unwrap();
            assert_eq!(ir, Ir::identity(), "{name}: {ir}");
        }
    });
}
