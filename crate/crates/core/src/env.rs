//! The global environment: interned signatures and named declarations in
//! dependency order.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::program::{CoreDecl, CoreProgram};
use crate::syntax::{SigId, Signature, Term};
use crate::value::Val;

#[derive(Clone, Debug, PartialEq)]
pub enum EntryKind {
    Def(Term),
    Postulate,
}

#[derive(Debug)]
pub struct GlobalEntry {
    pub name: String,
    pub ty: Term,
    pub kind: EntryKind,
    pub params: usize,
    pub(crate) value: OnceLock<Val>,
    pub(crate) ty_value: OnceLock<Val>,
}

impl GlobalEntry {
    fn new(name: String, ty: Term, kind: EntryKind, params: usize) -> GlobalEntry {
        GlobalEntry {
            name,
            ty,
            kind,
            params,
            value: OnceLock::new(),
            ty_value: OnceLock::new(),
        }
    }

    pub fn body(&self) -> Option<&Term> {
        match &self.kind {
            EntryKind::Def(b) => Some(b),
            EntryKind::Postulate => None,
        }
    }
}

#[derive(Debug, Default)]
pub struct GlobalEnv {
    pub sigs: Vec<Signature>,
    entries: Vec<GlobalEntry>,
    index: HashMap<String, usize>,
    pub repr_fns: Vec<(String, Term)>,
}

impl GlobalEnv {
    pub fn new() -> GlobalEnv {
        GlobalEnv::default()
    }

    pub fn sig(&self, id: SigId) -> &Signature {
        &self.sigs[id.0]
    }

    pub fn add_sig(&mut self, sig: Signature) -> SigId {
        self.sigs.push(sig);
        SigId(self.sigs.len() - 1)
    }

    pub fn sig_by_name(&self, name: &str) -> Option<SigId> {
        self.sigs.iter().position(|s| s.name == name).map(SigId)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&GlobalEntry> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    /// Declaration order of a global.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = &GlobalEntry> {
        self.entries.iter()
    }

    pub fn add_def(&mut self, name: &str, ty: Term, body: Term, params: usize) {
        self.push(GlobalEntry::new(name.into(), ty, EntryKind::Def(body), params));
    }

    pub fn add_postulate(&mut self, name: &str, ty: Term) {
        self.push(GlobalEntry::new(name.into(), ty, EntryKind::Postulate, 0));
    }

    fn push(&mut self, e: GlobalEntry) {
        assert!(!self.index.contains_key(&e.name), "duplicate global {}", e.name);
        self.index.insert(e.name.clone(), self.entries.len());
        self.entries.push(e);
    }

    /// Replaces the type and body of an existing definition and moves it to
    /// the end of the declaration order. Cached values are dropped.
    pub fn redefine(&mut self, name: &str, ty: Term, body: Term) {
        let i = self.index[name];
        let params = self.entries[i].params;
        self.entries.remove(i);
        for e in &mut self.entries {
            e.value = OnceLock::new();
            e.ty_value = OnceLock::new();
        }
        self.index = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| (e.name.clone(), k))
            .collect();
        self.push(GlobalEntry::new(name.into(), ty, EntryKind::Def(body), params));
    }

    pub fn to_program(&self) -> CoreProgram {
        let mut decls: Vec<CoreDecl> = self
            .entries
            .iter()
            .map(|e| match &e.kind {
                EntryKind::Def(body) => CoreDecl::Def {
                    name: e.name.clone(),
                    ty: e.ty.clone(),
                    body: body.clone(),
                    params: e.params,
                },
                EntryKind::Postulate => CoreDecl::Postulate {
                    name: e.name.clone(),
                    ty: e.ty.clone(),
                },
            })
            .collect();
        decls.extend(self.repr_fns.iter().map(|(t, i)| CoreDecl::ReprFn {
            target: t.clone(),
            image: i.clone(),
        }));
        CoreProgram {
            sigs: self.sigs.clone(),
            decls,
        }
    }

    /// Loads a program without checking it.
    pub fn from_program(p: &CoreProgram) -> GlobalEnv {
        let mut env = GlobalEnv {
            sigs: p.sigs.clone(),
            ..GlobalEnv::default()
        };
        for d in &p.decls {
            match d {
                CoreDecl::Def {
                    name,
                    ty,
                    body,
                    params,
                } => env.add_def(name, ty.clone(), body.clone(), *params),
                CoreDecl::Postulate { name, ty } => env.add_postulate(name, ty.clone()),
                CoreDecl::ReprFn { target, image } => env.repr_fns.push((target.clone(), image.clone())),
            }
        }
        env
    }
}
