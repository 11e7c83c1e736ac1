//! The untyped intermediate language produced by erasure.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

/// Untyped terms with de Bruijn indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ir {
    Var(usize),
    Global(String),
    /// A saturated call of a runtime primitive.
    Prim(String, Vec<Ir>),
    Unit,
    Nat(BigUint),
    Lam(Box<Ir>),
    App(Box<Ir>, Box<Ir>),
    /// `let x = a in b`, with `b` binding `x`.
    Let(Box<Ir>, Box<Ir>),
    Pair(Box<Ir>, Box<Ir>),
    Fst(Box<Ir>),
    Snd(Box<Ir>),
    /// A tagged value. `origin` names the data type it came from.
    Ctor {
        origin: String,
        tag: usize,
        args: Vec<Ir>,
    },
    /// Case `i` binds the fields of a value with tag `i`, first field
    /// outermost.
    Switch(Box<Ir>, Vec<(usize, Ir)>),
    /// A recursive function: the body binds the function itself.
    Fix(Box<Ir>),
    Thunk(Box<Ir>),
    Force(Box<Ir>),
}

impl Ir {
    pub fn lam(b: Ir) -> Ir {
        Ir::Lam(Box::new(b))
    }

    pub fn app(f: Ir, a: Ir) -> Ir {
        Ir::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Ir, args: impl IntoIterator<Item = Ir>) -> Ir {
        args.into_iter().fold(f, Ir::app)
    }

    pub fn lams(n: usize, body: Ir) -> Ir {
        (0..n).fold(body, |b, _| Ir::lam(b))
    }

    pub fn identity() -> Ir {
        Ir::lam(Ir::Var(0))
    }

    /// Variables, units, literals and globals: safe to duplicate.
    pub fn is_atomic(&self) -> bool {
        match self {
            Ir::Var(_) | Ir::Global(_) | Ir::Unit | Ir::Nat(_) => true,
            Ir::Prim(_, args) => args.is_empty(),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Ir)) {
        f(self);
        match self {
            Ir::Var(_) | Ir::Global(_) | Ir::Unit | Ir::Nat(_) => {}
            Ir::Prim(_, args) | Ir::Ctor { args, .. } => args.iter().for_each(|a| a.visit(f)),
            Ir::Lam(b) | Ir::Fst(b) | Ir::Snd(b) | Ir::Fix(b) | Ir::Thunk(b) | Ir::Force(b) => b.visit(f),
            Ir::App(a, b) | Ir::Let(a, b) | Ir::Pair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Ir::Switch(s, cases) => {
                s.visit(f);
                cases.iter().for_each(|(_, c)| c.visit(f));
            }
        }
    }

    /// Rebuilds the term, mapping every variable `i` found under `depth`
    /// extra binders through `f(i, depth)`.
    pub fn map_vars(&self, depth: usize, f: &dyn Fn(usize, usize) -> Ir) -> Ir {
        let go = |t: &Ir, d: usize| Box::new(t.map_vars(d, f));
        match self {
            Ir::Var(i) => f(*i, depth),
            Ir::Global(_) | Ir::Unit | Ir::Nat(_) => self.clone(),
            Ir::Prim(p, args) => Ir::Prim(p.clone(), args.iter().map(|a| a.map_vars(depth, f)).collect()),
            Ir::Lam(b) => Ir::Lam(go(b, depth + 1)),
            Ir::App(a, b) => Ir::App(go(a, depth), go(b, depth)),
            Ir::Let(a, b) => Ir::Let(go(a, depth), go(b, depth + 1)),
            Ir::Pair(a, b) => Ir::Pair(go(a, depth), go(b, depth)),
            Ir::Fst(p) => Ir::Fst(go(p, depth)),
            Ir::Snd(p) => Ir::Snd(go(p, depth)),
            Ir::Ctor { origin, tag, args } => Ir::Ctor {
                origin: origin.clone(),
                tag: *tag,
                args: args.iter().map(|a| a.map_vars(depth, f)).collect(),
            },
            Ir::Switch(s, cases) => Ir::Switch(
                go(s, depth),
                cases.iter().map(|(n, c)| (*n, c.map_vars(depth + n, f))).collect(),
            ),
            Ir::Fix(b) => Ir::Fix(go(b, depth + 1)),
            Ir::Thunk(b) => Ir::Thunk(go(b, depth)),
            Ir::Force(b) => Ir::Force(go(b, depth)),
        }
    }

    pub fn shift(&self, amount: usize) -> Ir {
        self.map_vars(0, &|i, d| if i >= d { Ir::Var(i + amount) } else { Ir::Var(i) })
    }

    /// Replaces variable 0 by `a` and lowers the others.
    pub fn instantiate(&self, a: &Ir) -> Ir {
        self.map_vars(0, &|i, d| {
            if i < d {
                Ir::Var(i)
            } else if i == d {
                a.shift(d)
            } else {
                Ir::Var(i - 1)
            }
        })
    }

    /// Occurrences of variable `index`, and whether any sits under a
    /// binder that may run more than once.
    pub fn occurrences(&self, index: usize) -> (usize, bool) {
        let mut count = 0;
        let mut guarded = false;
        self.count_at(index, false, &mut count, &mut guarded);
        (count, guarded)
    }

    fn count_at(&self, index: usize, under: bool, count: &mut usize, guarded: &mut bool) {
        let mut hit = |t: &Ir, i: usize, u: bool| t.count_at(i, u, count, guarded);
        match self {
            Ir::Var(i) => {
                if *i == index {
                    *count += 1;
                    *guarded |= under;
                }
            }
            Ir::Global(_) | Ir::Unit | Ir::Nat(_) => {}
            Ir::Prim(_, args) | Ir::Ctor { args, .. } => args.iter().for_each(|a| hit(a, index, under)),
            Ir::Lam(b) => hit(b, index + 1, true),
            Ir::Fix(b) => hit(b, index + 1, true),
            Ir::Thunk(b) => hit(b, index, true),
            Ir::Fst(b) | Ir::Snd(b) | Ir::Force(b) => hit(b, index, under),
            Ir::App(a, b) | Ir::Pair(a, b) => {
                hit(a, index, under);
                hit(b, index, under);
            }
            Ir::Let(a, b) => {
                hit(a, index, under);
                hit(b, index + 1, under);
            }
            Ir::Switch(s, cases) => {
                hit(s, index, under);
                for (n, c) in cases {
                    hit(c, index + n, under);
                }
            }
        }
    }

    pub fn mentions(&self, index: usize) -> bool {
        self.occurrences(index).0 > 0
    }
}

impl fmt::Display for Ir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ir::Var(i) => write!(f, "#{i}"),
            Ir::Global(g) => write!(f, "{g}"),
            Ir::Prim(p, args) => {
                write!(f, "(%{p}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Ir::Unit => write!(f, "()"),
            Ir::Nat(n) => write!(f, "{n}"),
            Ir::Lam(b) => write!(f, "(\\ {b})"),
            Ir::App(a, b) => write!(f, "({a} {b})"),
            Ir::Let(a, b) => write!(f, "(let {a} {b})"),
            Ir::Pair(a, b) => write!(f, "({a}, {b})"),
            Ir::Fst(p) => write!(f, "(fst {p})"),
            Ir::Snd(p) => write!(f, "(snd {p})"),
            Ir::Ctor { origin, tag, args } => {
                write!(f, "[{origin}.{tag}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, "]")
            }
            Ir::Switch(s, cases) => {
                write!(f, "(switch {s}")?;
                for (n, c) in cases {
                    write!(f, " ({n} {c})")?;
                }
                write!(f, ")")
            }
            Ir::Fix(b) => write!(f, "(fix {b})"),
            Ir::Thunk(b) => write!(f, "(thunk {b})"),
            Ir::Force(b) => write!(f, "(force {b})"),
        }
    }
}

/// How the numeral folding in `simplify` may treat a primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimRole {
    Zero,
    Succ,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimEntry {
    /// Name of the export in the runtime module.
    pub target: String,
    pub arity: usize,
    /// Whether every argument is evaluated before the call.
    pub strict: bool,
    pub role: PrimRole,
}

/// Maps postulate names to runtime primitives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimTable(pub BTreeMap<String, PrimEntry>);

impl PrimTable {
    pub fn get(&self, name: &str) -> Option<&PrimEntry> {
        self.0.get(name)
    }

    pub fn role(&self, name: &str) -> PrimRole {
        self.get(name).map_or(PrimRole::Other, |e| e.role)
    }
}

impl Default for PrimTable {
    fn default() -> PrimTable {
        let entries = [
            ("ubig-0", "ubig_zero", 0, PrimRole::Zero),
            ("ubig-1+", "ubig_one_plus", 1, PrimRole::Succ),
            ("ubig-add", "ubig_add", 2, PrimRole::Other),
            ("ubig-elim", "ubig_elim", 4, PrimRole::Other),
        ];
        PrimTable(
            entries
                .into_iter()
                .map(|(name, target, arity, role)| {
                    (
                        name.to_string(),
                        PrimEntry {
                            target: target.into(),
                            arity,
                            strict: true,
                            role,
                        },
                    )
                })
                .collect(),
        )
    }
}
