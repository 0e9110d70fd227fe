//! Disequality constraint store.
//!
//! A constraint is stored as the extension its violating unification would
//! need: it is violated only when *every* recorded pair has collapsed to an
//! equality, and satisfied as long as at least one pair can still differ.
//! New disequalities are normalized through [`unify`], and the whole store
//! is revalidated after every successful unification step.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::subst::Substitution;
use crate::term::{render_term_with, Term, VarId};
use crate::unify::{deep_walk, unify, Binding, CyclicTerm, FailReason, TypeMismatch, UnifyOutcome};

/// One disequality, kept as the non-empty set of bindings whose
/// simultaneous satisfaction would violate it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiseqConstraint {
    alternatives: Vec<Binding>,
}

impl DiseqConstraint {
    pub fn alternatives(&self) -> &[Binding] {
        &self.alternatives
    }

    pub fn render_with(&self, namer: &dyn Fn(VarId) -> String) -> String {
        if self.alternatives.len() == 1 {
            let b = &self.alternatives[0];
            format!("{} =/= {}", namer(b.var), render_term_with(&b.value, namer))
        } else {
            let lhs: Vec<String> = self.alternatives.iter().map(|b| namer(b.var)).collect();
            let rhs: Vec<String> = self
                .alternatives
                .iter()
                .map(|b| render_term_with(&b.value, namer))
                .collect();
            format!("({}) =/= ({})", lhs.join(" "), rhs.join(" "))
        }
    }
}

/// Ordered list of live disequality constraints. Cloning shares the
/// individual constraints.
#[derive(Clone, Default, Debug)]
pub struct ConstraintStore {
    constraints: Vec<Arc<DiseqConstraint>>,
}

/// Result of touching the store: a new store, or a violated disequality.
#[derive(Clone, Debug)]
pub enum StoreOutcome {
    Ok(ConstraintStore),
    Violated(FailReason),
}

impl ConstraintStore {
    pub fn new() -> Self {
        ConstraintStore::default()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &DiseqConstraint> {
        self.constraints.iter().map(|c| c.as_ref())
    }
}

/// Records `a =/= b`. Trivially-true disequalities are dropped; terms that
/// are already equal violate immediately. The substitution is not modified.
pub fn add_diseq(
    a: &Term,
    b: &Term,
    s: &Substitution,
    store: &ConstraintStore,
    occurs_check: bool,
) -> Result<StoreOutcome, TypeMismatch> {
    match unify(a, b, s, occurs_check)? {
        UnifyOutcome::Failure(_) => Ok(StoreOutcome::Ok(store.clone())),
        UnifyOutcome::Extended { extension, .. } => {
            if extension.is_empty() {
                return Ok(StoreOutcome::Violated(FailReason::ConstraintViolated {
                    constraint: format!(
                        "{} =/= {}",
                        crate::term::render_term(a),
                        crate::term::render_term(b)
                    ),
                }));
            }
            let mut next = store.clone();
            next.constraints.push(Arc::new(DiseqConstraint {
                alternatives: extension,
            }));
            Ok(StoreOutcome::Ok(next))
        }
    }
}

/// Re-normalizes every constraint against the substitution produced by a
/// successful unification. Constraints that can no longer be violated are
/// dropped; a constraint whose alternatives have all collapsed to
/// equalities reports violation; the rest are narrowed in place.
pub fn revalidate(store: &ConstraintStore, s: &Substitution, occurs_check: bool) -> StoreOutcome {
    let mut next = ConstraintStore::new();
    for constraint in &store.constraints {
        match renormalize(constraint, s, occurs_check) {
            Renorm::Satisfied => {}
            Renorm::Narrowed(alts) => {
                if alts == constraint.alternatives {
                    next.constraints.push(Arc::clone(constraint));
                } else {
                    next.constraints
                        .push(Arc::new(DiseqConstraint { alternatives: alts }));
                }
            }
            Renorm::Violated => {
                return StoreOutcome::Violated(FailReason::ConstraintViolated {
                    constraint: constraint.render_with(&|v| v.to_string()),
                });
            }
        }
    }
    StoreOutcome::Ok(next)
}

enum Renorm {
    Satisfied,
    Narrowed(Vec<Binding>),
    Violated,
}

/// Unifies a constraint's alternatives as one simultaneous term pair.
fn renormalize(constraint: &DiseqConstraint, s: &Substitution, occurs_check: bool) -> Renorm {
    let mut current = s.clone();
    let mut narrowed: Vec<Binding> = Vec::new();
    for binding in &constraint.alternatives {
        let var = Term::var(binding.var, binding.tag.clone());
        match unify(&var, &binding.value, &current, occurs_check) {
            // alternatives were tag-checked at insertion; unification keeps
            // tags consistent afterwards
            Err(_) => unreachable!("revalidation cannot raise a type error"),
            Ok(UnifyOutcome::Failure(_)) => return Renorm::Satisfied,
            Ok(UnifyOutcome::Extended { subst, extension }) => {
                current = subst;
                narrowed.extend(extension);
            }
        }
    }
    if narrowed.is_empty() {
        Renorm::Violated
    } else {
        Renorm::Narrowed(narrowed)
    }
}

/// Deep-walked constraints that mention at least one variable reachable
/// from `relevant`, as `(lhs, rhs)` pairs for reification. Multi-pair
/// constraints are grouped into one simultaneous list disequality.
pub fn residual_constraints(
    store: &ConstraintStore,
    s: &Substitution,
    relevant: &BTreeSet<VarId>,
) -> Result<Vec<(Term, Term)>, CyclicTerm> {
    let mut reachable: BTreeSet<VarId> = BTreeSet::new();
    for v in relevant {
        reachable.insert(*v);
        if let Some(bound) = s.get(*v) {
            reachable.extend(deep_walk(bound, s)?.vars());
        }
    }

    let mut out = Vec::new();
    for constraint in &store.constraints {
        let mut pairs: Vec<(Term, Term)> = Vec::new();
        let mut mentioned: BTreeSet<VarId> = BTreeSet::new();
        for binding in &constraint.alternatives {
            let lhs = deep_walk(&Term::var(binding.var, binding.tag.clone()), s)?;
            let rhs = deep_walk(&binding.value, s)?;
            mentioned.extend(lhs.vars());
            mentioned.extend(rhs.vars());
            pairs.push((lhs, rhs));
        }
        if mentioned.intersection(&reachable).next().is_none() {
            continue;
        }
        if pairs.len() == 1 {
            out.push(pairs.pop().expect("non-empty"));
        } else {
            let group = crate::term::TypeTag::new("?");
            let lhs = Term::list(&group, pairs.iter().map(|(l, _)| l.clone()));
            let rhs = Term::list(&group, pairs.iter().map(|(_, r)| r.clone()));
            out.push((lhs, rhs));
        }
    }
    Ok(out)
}
