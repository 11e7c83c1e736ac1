//! One line per acceptance criterion of the core language, written straight
//! to stdout so it shows up without `--nocapture`.

mod common;

use std::io::Write;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::sigs::{random_signature, shape_laws, with_signature};
use common::{elaborate_files, fixture, naive_nf, nbe_nf, sources, Mltt, TermGen, STDLIB};
use datatt::elab::{elaborate, ErrorKind, Options};
use datatt::env::GlobalEnv;
use datatt::extract::extract_term;
use datatt::extract::ir::{Ir, PrimTable};
use datatt::program::{CoreDecl, CoreProgram};
use datatt::surface::{parse_file, DeclKind, ExprKind, SourceMap};
use datatt::syntax::Term;
use datatt::translate::{is_repr_free, translate, translate_program};
use datatt::typeck::Checker;
use datatt::with_big_stack;

type Outcome = Result<String, String>;

fn stdlib_with(extra: &[&str]) -> Vec<String> {
    STDLIB.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn translated(files: &[String]) -> Result<CoreProgram, String> {
    let files: Vec<&str> = files.iter().map(String::as_str).collect();
    let el = elaborate_files(&files)?;
    Ok(translate_program(&el.env.to_program()))
}

/// Golden definitional equalities, each declared on its own after the
/// standard library.
fn defeq_suite() -> Outcome {
    let path = fixture("defeq.dtt");
    let mut sm = sources(STDLIB);
    let mut el = elaborate(&sm, Options::default()).map_err(|e| e.kind.to_string())?;
    let src = std::fs::read_to_string(common::root().join(&path)).map_err(|e| e.to_string())?;
    let file = sm.add(path.clone(), src.clone());
    let decls = parse_file(&src, file).map_err(|e| e.msg)?;
    let mut passed = 0;
    let mut failed = Vec::new();
    let mut comp = 0;
    for d in &decls {
        let DeclKind::Def { name, body, .. } = &d.kind else {
            return Err("fixture holds a non-definition".into());
        };
        if body.kind != ExprKind::Refl {
            return Err(format!("`{name}` is not proved by refl"));
        }
        comp += usize::from(name.starts_with("comp-"));
        match el.declare(d) {
            Ok(()) => passed += 1,
            Err(e) => failed.push(format!("{name}: {}", e.kind)),
        }
    }
    let ctors: usize = el.data.values().map(|d| d.ctors.len()).sum();
    if !failed.is_empty() {
        return Err(failed.join("; "));
    }
    if passed < 25 || comp < ctors {
        return Err(format!("{passed} checks, {comp} computation rules for {ctors} constructors"));
    }
    Ok(format!("{passed}/{} golden refl checks, computation rules for all {ctors} constructors", decls.len()))
}

fn samples(m: &Mltt, n: u64) -> Vec<Term> {
    (0..n)
        .map(|seed| {
            TermGen {
                m,
                rng: ChaCha8Rng::seed_from_u64(seed),
            }
            .sample(30)
            .1
            .term
        })
        .collect()
}

fn translation_preserves_nf() -> Outcome {
    let m = Mltt::new();
    let renv = GlobalEnv::from_program(&translate_program(&m.program));
    let terms = samples(&m, 500);
    let ok = terms
        .iter()
        .filter(|t| nbe_nf(&m, &renv, &translate(t)) == nbe_nf(&m, &m.env, t))
        .count();
    if ok == terms.len() {
        Ok(format!("{ok}/{} random terms of size at most 30", terms.len()))
    } else {
        Err(format!("{ok}/{} agree", terms.len()))
    }
}

fn erasure_complete() -> Outcome {
    let mut terms = 0;
    for example in ["examples/nathack.dtt", "examples/roundtrip.dtt"] {
        let p = translated(&stdlib_with(&[example]))?;
        for t in p.terms() {
            terms += 1;
            if !is_repr_free(t) {
                return Err(format!("{example}: representation node left in {t:?}"));
            }
        }
    }
    Ok(format!("{terms} translated terms are free of representation nodes"))
}

fn last_parameter_body(p: &CoreProgram, name: &str) -> Result<Term, String> {
    let (params, mut t) = p
        .decls
        .iter()
        .find_map(|d| match d {
            CoreDecl::Def { name: n, params, body, .. } if n == name => Some((*params, body.clone())),
            _ => None,
        })
        .ok_or_else(|| format!("`{name}` is not defined"))?;
    for _ in 1..params {
        t = match t {
            Term::Lam(b) => (*b).clone(),
            _ => return Err(format!("`{name}` has fewer lambdas than parameters")),
        };
    }
    Ok(t)
}

fn conversions_are_identities() -> Outcome {
    let p = translated(&stdlib_with(&[]))?;
    let prims = PrimTable::default();
    for name in ["forget-length", "remember-length", "conv-p"] {
        let ir = extract_term(&p, &prims, &last_parameter_body(&p, name)?).map_err(|e| e.to_string())?;
        if ir != Ir::identity() {
            return Err(format!("{name} extracts to {ir}"));
        }
    }
    Ok("forget-length, remember-length and conv-p extract to \\x. x".into())
}

const MUTATED_ZERO_ID: &str = "  -> ubig-elim P b r (ubig-1+ ubig-0) = r ubig-0 (\\_. b)\n";

fn prelude_variant(edit: impl Fn(&str) -> String) -> Result<String, String> {
    let src = std::fs::read_to_string(common::root().join("stdlib/prelude.dtt")).map_err(|e| e.to_string())?;
    let out = edit(&src);
    if out == src {
        return Err("prelude edit did not apply".into());
    }
    Ok(out)
}

fn cli_exit_code(prelude: &str) -> Result<Option<i32>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("prelude.dtt");
    std::fs::write(&path, prelude).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_datatt"))
        .arg("check")
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(out.status.code())
}

fn coherence_gate() -> Outcome {
    let mutated = prelude_variant(|s| s.replace("  -> ubig-elim P b r ubig-0 = b\n", MUTATED_ZERO_ID))?;
    let missing = prelude_variant(|s| s.replace(" by ubig-elim-zero-id, ubig-elim-add-one-id", ""))?;
    let check = |src: &str| {
        let mut sm = SourceMap::default();
        sm.add("prelude.dtt", src);
        elaborate(&sm, Options::default()).err().map(|e| e.kind)
    };
    match check(&mutated) {
        Some(ErrorKind::CoherenceMismatch { label, .. }) if label == "zero" => {}
        other => return Err(format!("mutated zero law gave {other:?}")),
    }
    match check(&missing) {
        Some(ErrorKind::MissingCoherenceProof(_)) => {}
        other => return Err(format!("missing proofs gave {other:?}")),
    }
    let codes = (cli_exit_code(&mutated)?, cli_exit_code(&missing)?);
    if codes != (Some(1), Some(1)) {
        return Err(format!("exit codes {codes:?}"));
    }
    Ok("wrong zero law is a coherence mismatch, missing proofs are rejected, both exit 1".into())
}

fn nbe_matches_naive() -> Outcome {
    let m = Mltt::new();
    let terms = samples(&m, 200);
    let ok = terms
        .iter()
        .filter(|t| nbe_nf(&m, &m.env, t) == naive_nf(&m.program, t))
        .count();
    if ok == terms.len() {
        Ok(format!("{ok}/{} random terms", terms.len()))
    } else {
        Err(format!("{ok}/{} agree", terms.len()))
    }
}

fn disjointness() -> Outcome {
    let mut sm = sources(&["stdlib/prelude.dtt"]);
    sm.add("bad.dtt", "def bad (x : Nat) : zero = succ x := refl\n");
    match elaborate(&sm, Options::default()) {
        Err(e) if matches!(e.kind, ErrorKind::TypeMismatch { .. } | ErrorKind::NotEqual { .. }) => {}
        Err(e) => return Err(format!("rejected for the wrong reason: {}", e.kind)),
        Ok(_) => return Err("refl : zero = succ x was accepted".into()),
    }
    let el = elaborate_files(&["stdlib/prelude.dtt"])?;
    if el.env.get("zero-not-succ").is_none() {
        return Err("zero-not-succ is missing".into());
    }
    Ok("refl : zero = succ x rejected, zero-not-succ accepted".into())
}

fn shape_laws_hold() -> Outcome {
    let el = elaborate_files(&["stdlib/prelude.dtt", "stdlib/list.dtt", "stdlib/vec.dtt"])?;
    for name in ["Nat", "Vec"] {
        let id = el.env.sig_by_name(name).ok_or(format!("no signature {name}"))?;
        shape_laws(&el.env, el.env.sig(id)).map_err(|e| format!("{name}: {e}"))?;
    }
    let m = Mltt::new();
    for seed in 0..20 {
        let sig = random_signature(&m, seed);
        let (env, id) = with_signature(&m, sig.clone());
        Checker::new(&env)
            .check_signature(id)
            .map_err(|e| format!("random signature {seed}: {e}"))?;
        shape_laws(&env, &sig).map_err(|e| format!("random signature {seed}: {e}"))?;
    }
    Ok("Nat, Vec and 20 random signatures".into())
}

#[test]
fn acceptance() {
    let criteria: Vec<(u8, fn() -> Outcome)> = vec![
        (1, defeq_suite),
        (2, translation_preserves_nf),
        (3, erasure_complete),
        (4, conversions_are_identities),
        (6, coherence_gate),
        (7, nbe_matches_naive),
        (8, disjointness),
        (9, shape_laws_hold),
    ];
    let results: Vec<(u8, Outcome)> = with_big_stack(|| criteria.iter().map(|(n, f)| (*n, f())).collect());
    let mut out = std::io::stdout().lock();
    let mut failures = 0;
    for (n, r) in &results {
        let line = match r {
            Ok(msg) => format!("acceptance criterion {n}: PASS ({msg})"),
            Err(msg) => {
                failures += 1;
                format!("acceptance criterion {n}: FAIL ({msg})")
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    drop(out);
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
