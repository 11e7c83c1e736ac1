//! Random signatures over the MLTT fixture types and the shape laws of
//! the signature interpretation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use datatt::env::GlobalEnv;
use datatt::interp::{
    algebra_telescope, coherence_telescope, displayed_inputs, displayed_telescope, inductive_algebra_telescope,
    op_inputs, op_output, section_apply,
};
use datatt::program::CoreProgram;
use datatt::syntax::{substitute, Algebra, OpArg, Operation, SigId, Signature, Telescope, Term};
use datatt::typeck::{Checker, Ctx};

use super::Mltt;

#[derive(Clone, Copy, PartialEq)]
enum Sort {
    N,
    B,
}

struct SigGen<'m> {
    m: &'m Mltt,
    rng: ChaCha8Rng,
}

impl SigGen<'_> {
    fn sort(&mut self) -> Sort {
        if self.rng.gen_bool(0.5) {
            Sort::N
        } else {
            Sort::B
        }
    }

    fn ty(&self, s: Sort) -> Term {
        let sig = match s {
            Sort::N => self.m.nat,
            Sort::B => self.m.bool,
        };
        Term::DataTy {
            sig,
            alg: Algebra::Default,
            indices: vec![],
        }
    }

    /// A term of sort `s` in the scope of `scope` (outermost first), where
    /// `None` marks a recursive argument that must not be mentioned.
    fn index(&mut self, scope: &[Option<Sort>], s: Sort, depth: usize) -> Term {
        let usable: Vec<usize> = (0..scope.len()).filter(|&j| scope[j] == Some(s)).collect();
        if !usable.is_empty() && self.rng.gen_bool(0.6) {
            let j = usable[self.rng.gen_range(0..usable.len())];
            return Term::Var(scope.len() - 1 - j);
        }
        let (sig, op) = match s {
            Sort::N => (self.m.nat, if depth > 0 && self.rng.gen_bool(0.5) { 1 } else { 0 }),
            Sort::B => (self.m.bool, self.rng.gen_range(0..2)),
        };
        let args = if s == Sort::N && op == 1 {
            vec![self.index(scope, Sort::N, depth - 1)]
        } else {
            vec![]
        };
        Term::Ctor {
            sig,
            op,
            alg: Algebra::Default,
            args,
        }
    }

    fn signature(&mut self, name: &str) -> Signature {
        let sorts: Vec<Sort> = (0..self.rng.gen_range(0..3)).map(|_| self.sort()).collect();
        let mut indices = Telescope::new();
        for (i, s) in sorts.iter().enumerate() {
            indices.push(format!("i{i}"), self.ty(*s));
        }
        let ops = (0..self.rng.gen_range(0..4))
            .map(|o| {
                let mut scope: Vec<Option<Sort>> = Vec::new();
                let mut args = Vec::new();
                let mut names = Vec::new();
                for k in 0..self.rng.gen_range(0..4) {
                    names.push(format!("a{k}"));
                    if self.rng.gen_bool(0.4) {
                        let ix = sorts.iter().map(|&s| self.index(&scope, s, 2)).collect();
                        args.push(OpArg::Int(ix));
                        scope.push(None);
                    } else {
                        let s = self.sort();
                        args.push(OpArg::Ext(self.ty(s)));
                        scope.push(Some(s));
                    }
                }
                let ret = sorts.iter().map(|&s| self.index(&scope, s, 2)).collect();
                Operation {
                    label: format!("op{o}"),
                    arg_names: names,
                    args,
                    ret,
                }
            })
            .collect();
        Signature {
            name: name.into(),
            indices,
            ops,
        }
    }
}

pub fn random_signature(m: &Mltt, seed: u64) -> Signature {
    SigGen {
        m,
        rng: ChaCha8Rng::seed_from_u64(seed),
    }
    .signature("R")
}

/// Checks the laws for one signature living in `env`, returning the first
/// violation.
pub fn shape_laws(env: &GlobalEnv, sig: &Signature) -> Result<(), String> {
    let m = sig.ops.len();
    let x = Term::postulate("X");
    let alg: Vec<Term> = (0..m).map(|i| Term::postulate(&format!("alpha{i}"))).collect();
    let y = Term::postulate("Y");
    let beta: Vec<Term> = (0..m).map(|i| Term::postulate(&format!("beta{i}"))).collect();
    let sigma = Term::postulate("sigma");
    let lens = [
        algebra_telescope(sig, &x).len(),
        displayed_telescope(sig, &x, &alg, &y).len(),
        coherence_telescope(sig, &x, &alg, &y, &beta, &sigma).len(),
    ];
    if lens != [m; 3] {
        return Err(format!("telescope lengths {lens:?}, expected {m}"));
    }
    if inductive_algebra_telescope(sig).len() != m + 2 {
        return Err("inductive algebra telescope length".into());
    }
    for op in &sig.ops {
        let n = op.arity();
        let recursive = op.recursive_positions().count();
        if op_inputs(op, &x).len() != n {
            return Err(format!("{}: input telescope length", op.label));
        }
        if displayed_inputs(op, &x, &y).tel.len() != n + recursive {
            return Err(format!("{}: displayed input length", op.label));
        }
        let nu: Vec<Term> = (0..n).map(|k| Term::postulate(&format!("nu{k}"))).collect();
        if section_apply(&sigma, op, &nu).len() != n + recursive {
            return Err(format!("{}: section spine length", op.label));
        }
        if op_output(op, &nu).len() != sig.indices.len() {
            return Err(format!("{}: output length", op.label));
        }
        // Open inputs over two free variables, then substitute them away.
        let open: Vec<Term> = (0..n)
            .map(|k| match k % 3 {
                0 => Term::Var(0),
                1 => Term::Var(1),
                _ => Term::app(Term::Var(1), Term::Var(0)),
            })
            .collect();
        let s = [Term::postulate("s0"), Term::postulate("s1")];
        let after: Vec<Term> = op_output(op, &open).iter().map(|t| substitute(t, &s, 0)).collect();
        let before = op_output(op, &open.iter().map(|t| substitute(t, &s, 0)).collect::<Vec<_>>());
        if after != before {
            return Err(format!("{}: output not stable under substitution", op.label));
        }
    }
    let ck = Checker::new(env);
    let tel = inductive_algebra_telescope(sig);
    ck.check_type(&Ctx::new(), &Term::pis(&tel, Term::Unit))
        .map_err(|e| format!("inductive algebra telescope is ill-formed: {e}"))
}

pub fn with_signature(m: &Mltt, sig: Signature) -> (GlobalEnv, SigId) {
    let mut p: CoreProgram = m.program.clone();
    p.sigs.push(sig);
    let id = SigId(p.sigs.len() - 1);
    (GlobalEnv::from_program(&p), id)
}

