//! Triangular substitutions: a persistent mapping from variable ids to
//! terms. Bound terms may themselves contain bound variables; resolution
//! is by repeated walking (see [`crate::unify`]).

use crate::term::{Term, VarId};

/// Persistent variable binding map. Cloning is O(1) and clones share
/// structure, so sibling search branches share ancestor bindings.
#[derive(Clone, Default, Debug)]
pub struct Substitution {
    map: im::HashMap<VarId, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, v: VarId) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.map.contains_key(&v)
    }

    /// A new substitution extended with `v ↦ t`. The binding must be fresh;
    /// extensions never overwrite.
    pub fn with(&self, v: VarId, t: Term) -> Self {
        debug_assert!(!self.contains(v), "substitution bindings are never overwritten");
        Substitution {
            map: self.map.update(v, t),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
