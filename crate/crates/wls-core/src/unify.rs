//! Walking, occurs check, and first-order unification with type-tag
//! enforcement.
//!
//! Unification has three outcomes: success (with the list of bindings it
//! added), failure (a normal result during search), and a type error. The
//! last arises when two terms with *different known tags* meet; that is a
//! program bug rather than a legitimate dead search branch, and it aborts
//! the whole run.

use crate::subst::Substitution;
use crate::term::{render_term, Term, TypeTag, VarId};
use thiserror::Error;

/// Two terms with different known type tags met during unification.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("type mismatch: {left_tag} vs {right_tag} (unifying {left} with {right})")]
pub struct TypeMismatch {
    pub left_tag: TypeTag,
    pub right_tag: TypeTag,
    pub left: String,
    pub right: String,
}

/// Deep resolution reached a cycle. Only possible when the occurs check
/// was disabled.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("cyclic term: variable {var} occurs in its own binding")]
pub struct CyclicTerm {
    pub var: VarId,
}

/// Why a unification failed. Recorded in traces as failure provenance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FailReason {
    AtomMismatch { left: String, right: String },
    CtorMismatch { left: String, right: String },
    ArityMismatch { name: String, left: usize, right: usize },
    Occurs { var: VarId, term: String },
    ConstraintViolated { constraint: String },
}

impl std::fmt::Display for FailReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailReason::AtomMismatch { left, right } => {
                write!(f, "{} does not match {}", left, right)
            }
            FailReason::CtorMismatch { left, right } => {
                write!(f, "constructor {} does not match {}", left, right)
            }
            FailReason::ArityMismatch { name, left, right } => {
                write!(f, "arity of {}: {} vs {}", name, left, right)
            }
            FailReason::Occurs { var, term } => {
                write!(f, "occurs check: {} occurs in {}", var, term)
            }
            FailReason::ConstraintViolated { constraint } => {
                write!(f, "disequality violated: {}", constraint)
            }
        }
    }
}

/// One binding added by a unification step. The variable's tag is kept so
/// the disequality store can re-unify alternatives later.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Binding {
    pub var: VarId,
    pub tag: TypeTag,
    pub value: Term,
}

/// The ordered list of bindings one unification added.
pub type Extension = Vec<Binding>;

/// Result of a unification: an extended substitution, or a normal failure.
#[derive(Clone, Debug)]
pub enum UnifyOutcome {
    Extended {
        subst: Substitution,
        extension: Extension,
    },
    Failure(FailReason),
}

/// Shallow resolution: follow variable bindings until an unbound variable
/// or a non-variable term. Terminates even on cyclic chains (possible only
/// with the occurs check disabled) by stopping at a revisited id.
pub fn walk<'a>(t: &'a Term, s: &'a Substitution) -> &'a Term {
    let mut current = t;
    let mut seen: Vec<VarId> = Vec::new();
    while let Term::Var(v, _) = current {
        match s.get(*v) {
            Some(bound) => {
                if seen.contains(v) {
                    return current;
                }
                seen.push(*v);
                current = bound;
            }
            None => return current,
        }
    }
    current
}

/// Recursive resolution: applies [`walk`] at every position. The result
/// contains only unbound variables, or `CyclicTerm` if a cycle is reached.
pub fn deep_walk(t: &Term, s: &Substitution) -> Result<Term, CyclicTerm> {
    let mut expanding = Vec::new();
    deep_walk_inner(t, s, &mut expanding)
}

fn deep_walk_inner(
    t: &Term,
    s: &Substitution,
    expanding: &mut Vec<VarId>,
) -> Result<Term, CyclicTerm> {
    // Resolve the head, keeping the chain of variables followed so a
    // variable reached again while its own binding is being expanded is
    // reported as a cycle.
    let mut current = t.clone();
    let mut chain: Vec<VarId> = Vec::new();
    loop {
        let v = match &current {
            Term::Var(v, _) => *v,
            _ => break,
        };
        if expanding.contains(&v) || chain.contains(&v) {
            return Err(CyclicTerm { var: v });
        }
        match s.get(v) {
            Some(bound) => {
                chain.push(v);
                current = bound.clone();
            }
            None => break,
        }
    }
    match &current {
        Term::Var(..) | Term::Atom(_) => Ok(current),
        Term::Ctor(c) => {
            let depth = expanding.len();
            expanding.extend(chain);
            let mut args = Vec::with_capacity(c.args.len());
            for a in &c.args {
                args.push(deep_walk_inner(a, s, expanding)?);
            }
            expanding.truncate(depth);
            Ok(Term::ctor(c.name.clone(), c.tag.clone(), args))
        }
    }
}

/// True iff `v` occurs in the deep resolution of `t`, computed without
/// materializing it. Terminates on cyclic substitutions by memoizing the
/// variables already expanded.
pub fn occurs(v: VarId, t: &Term, s: &Substitution) -> bool {
    let mut expanded: Vec<VarId> = Vec::new();
    occurs_inner(v, t, s, &mut expanded)
}

fn occurs_inner(v: VarId, t: &Term, s: &Substitution, expanded: &mut Vec<VarId>) -> bool {
    match walk(t, s) {
        Term::Var(w, _) => *w == v,
        Term::Atom(_) => false,
        Term::Ctor(c) => {
            if let Term::Var(w, _) = t {
                if expanded.contains(w) {
                    return false;
                }
                expanded.push(*w);
            }
            c.args.iter().any(|a| occurs_inner(v, a, s, expanded))
        }
    }
}

fn known_tags_conflict(a: &Term, b: &Term) -> Option<TypeMismatch> {
    match (a.tag(), b.tag()) {
        (Some(ta), Some(tb)) if ta != tb => Some(TypeMismatch {
            left_tag: ta,
            right_tag: tb,
            left: render_term(a),
            right: render_term(b),
        }),
        _ => None,
    }
}

/// First-order unification over walked heads. `occurs_check` enables the
/// cycle-preventing test when binding a variable to a term.
pub fn unify(
    a: &Term,
    b: &Term,
    s: &Substitution,
    occurs_check: bool,
) -> Result<UnifyOutcome, TypeMismatch> {
    let mut subst = s.clone();
    let mut extension = Extension::new();
    match unify_step(a, b, &mut subst, &mut extension, occurs_check)? {
        None => Ok(UnifyOutcome::Extended { subst, extension }),
        Some(reason) => Ok(UnifyOutcome::Failure(reason)),
    }
}

/// Ok(None) = unified; Ok(Some(reason)) = normal failure.
fn unify_step(
    a: &Term,
    b: &Term,
    subst: &mut Substitution,
    extension: &mut Extension,
    occurs_check: bool,
) -> Result<Option<FailReason>, TypeMismatch> {
    let a = walk(a, subst).clone();
    let b = walk(b, subst).clone();
    if let Some(err) = known_tags_conflict(&a, &b) {
        return Err(err);
    }
    match (&a, &b) {
        (Term::Var(x, _), Term::Var(y, _)) if x == y => Ok(None),
        (Term::Var(x, tag), _) => bind(*x, tag, &b, subst, extension, occurs_check),
        (_, Term::Var(y, tag)) => bind(*y, tag, &a, subst, extension, occurs_check),
        (Term::Atom(av), Term::Atom(bv)) => {
            if av == bv {
                Ok(None)
            } else {
                Ok(Some(FailReason::AtomMismatch {
                    left: render_term(&a),
                    right: render_term(&b),
                }))
            }
        }
        (Term::Ctor(ca), Term::Ctor(cb)) => {
            if ca.name != cb.name {
                return Ok(Some(FailReason::CtorMismatch {
                    left: ca.name.clone(),
                    right: cb.name.clone(),
                }));
            }
            if ca.args.len() != cb.args.len() {
                return Ok(Some(FailReason::ArityMismatch {
                    name: ca.name.clone(),
                    left: ca.args.len(),
                    right: cb.args.len(),
                }));
            }
            for (x, y) in ca.args.iter().zip(cb.args.iter()) {
                if let Some(reason) = unify_step(x, y, subst, extension, occurs_check)? {
                    return Ok(Some(reason));
                }
            }
            Ok(None)
        }
        (Term::Atom(_), Term::Ctor(_)) | (Term::Ctor(_), Term::Atom(_)) => {
            Ok(Some(FailReason::CtorMismatch {
                left: render_term(&a),
                right: render_term(&b),
            }))
        }
    }
}

fn bind(
    v: VarId,
    tag: &TypeTag,
    t: &Term,
    subst: &mut Substitution,
    extension: &mut Extension,
    occurs_check: bool,
) -> Result<Option<FailReason>, TypeMismatch> {
    if occurs_check && occurs(v, t, subst) {
        return Ok(Some(FailReason::Occurs {
            var: v,
            term: render_term(t),
        }));
    }
    *subst = subst.with(v, t.clone());
    extension.push(Binding {
        var: v,
        tag: tag.clone(),
        value: t.clone(),
    });
    Ok(None)
}
