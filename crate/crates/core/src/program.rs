//! Flat, self-contained programs: the unit exchanged between checking,
//! translation and extraction, and the payload of the core dump format.

use std::collections::HashMap;

use crate::syntax::{SigId, Signature, Term};

#[derive(Clone, Debug, PartialEq)]
pub enum CoreDecl {
    /// `params` counts the leading lambdas of `body` that were written as
    /// declaration parameters.
    Def {
        name: String,
        ty: Term,
        body: Term,
        params: usize,
    },
    Postulate {
        name: String,
        ty: Term,
    },
    /// Replace `target` by `image` when generating code.
    ReprFn {
        target: String,
        image: Term,
    },
}

impl CoreDecl {
    pub fn name(&self) -> &str {
        match self {
            CoreDecl::Def { name, .. } | CoreDecl::Postulate { name, .. } => name,
            CoreDecl::ReprFn { target, .. } => target,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoreProgram {
    pub sigs: Vec<Signature>,
    pub decls: Vec<CoreDecl>,
}

impl CoreProgram {
    pub fn sig(&self, id: SigId) -> &Signature {
        &self.sigs[id.0]
    }

    pub fn sig_by_name(&self, name: &str) -> Option<SigId> {
        self.sigs.iter().position(|s| s.name == name).map(SigId)
    }

    pub fn lookup(&self, name: &str) -> Option<&CoreDecl> {
        self.decls.iter().find(|d| match d {
            CoreDecl::ReprFn { .. } => false,
            d => d.name() == name,
        })
    }

    pub fn repr_fns(&self) -> HashMap<String, Term> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                CoreDecl::ReprFn { target, image } => Some((target.clone(), image.clone())),
                _ => None,
            })
            .collect()
    }

    /// Every term in the program, including signature components.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        for s in &self.sigs {
            out.extend(s.indices.types.iter());
            for op in &s.ops {
                for a in &op.args {
                    match a {
                        crate::syntax::OpArg::Ext(t) => out.push(t),
                        crate::syntax::OpArg::Int(ix) => out.extend(ix.iter()),
                    }
                }
                out.extend(op.ret.iter());
            }
        }
        for d in &self.decls {
            match d {
                CoreDecl::Def { ty, body, .. } => {
                    out.push(ty);
                    out.push(body);
                }
                CoreDecl::Postulate { ty, .. } => out.push(ty),
                CoreDecl::ReprFn { image, .. } => out.push(image),
            }
        }
        out
    }
}
