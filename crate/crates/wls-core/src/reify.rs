//! Reification: turn a final state into a printable, canonical answer.
//!
//! Query variables are deep-walked, residual variables renamed `_.0`,
//! `_.1`, ... in first-occurrence order (bindings first, then residual
//! constraints), and still-live disequalities attached.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::constraints::residual_constraints;
use crate::search::State;
use crate::term::{render_term, Term, VarId};
use crate::unify::{deep_walk, CyclicTerm};

/// A canonical answer: no variable ids remain, only `_.N` names.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Answer {
    pub bindings: Vec<(String, Term)>,
    pub residuals: Vec<(Term, Term)>,
}

/// Reifies the query variables of a final state.
pub fn reify(st: &State, query_vars: &[(String, Term)]) -> Result<Answer, CyclicTerm> {
    let mut walked: Vec<(String, Term)> = Vec::with_capacity(query_vars.len());
    for (name, var) in query_vars {
        walked.push((name.clone(), deep_walk(var, &st.subst)?));
    }

    let mut order: Vec<VarId> = Vec::new();
    for (_, t) in &walked {
        collect_order(t, &mut order);
    }

    let reachable: BTreeSet<VarId> = order.iter().copied().collect();
    let residual_pairs = residual_constraints(&st.store, &st.subst, &reachable)?;
    for (lhs, rhs) in &residual_pairs {
        collect_order(lhs, &mut order);
        collect_order(rhs, &mut order);
    }

    let names: BTreeMap<VarId, String> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, format!("_.{}", i)))
        .collect();

    Ok(Answer {
        bindings: walked
            .into_iter()
            .map(|(name, t)| (name, canonicalize(&t, &names)))
            .collect(),
        residuals: residual_pairs
            .into_iter()
            .map(|(l, r)| (canonicalize(&l, &names), canonicalize(&r, &names)))
            .collect(),
    })
}

fn collect_order(t: &Term, order: &mut Vec<VarId>) {
    match t {
        Term::Var(v, _) => {
            if !order.contains(v) {
                order.push(*v);
            }
        }
        Term::Atom(_) => {}
        Term::Ctor(c) => {
            for a in &c.args {
                collect_order(a, order);
            }
        }
    }
}

fn canonicalize(t: &Term, names: &BTreeMap<VarId, String>) -> Term {
    match t {
        Term::Var(v, _) => Term::sym(names[v].clone()),
        Term::Atom(_) => t.clone(),
        Term::Ctor(c) => Term::ctor(
            c.name.clone(),
            c.tag.clone(),
            c.args.iter().map(|a| canonicalize(a, names)).collect(),
        ),
    }
}

fn residual_suffix(a: &Answer) -> String {
    if a.residuals.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = a
        .residuals
        .iter()
        .map(|(l, r)| format!("({} =/= {})", render_term(l), render_term(r)))
        .collect();
    format!(" where {}", parts.join(", "))
}

/// Deterministic textual form: one line per query var `name = term`, with
/// residual disequalities appended to the last line.
pub fn render(a: &Answer) -> String {
    if a.bindings.is_empty() {
        return format!("ok{}", residual_suffix(a));
    }
    let mut lines: Vec<String> = a
        .bindings
        .iter()
        .map(|(name, t)| format!("{} = {}", name, render_term(t)))
        .collect();
    let last = lines.len() - 1;
    lines[last].push_str(&residual_suffix(a));
    lines.join("\n")
}

/// Single-line form used in trace details.
pub fn render_compact(a: &Answer) -> String {
    if a.bindings.is_empty() {
        return format!("ok{}", residual_suffix(a));
    }
    let parts: Vec<String> = a
        .bindings
        .iter()
        .map(|(name, t)| format!("{} = {}", name, render_term(t)))
        .collect();
    format!("{}{}", parts.join("; "), residual_suffix(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{AnswerLimit, EngineConfig, Goal};
    use crate::term::TypeTag;

    fn run_one(
        vars: &[(&str, TypeTag)],
        body: impl FnOnce(&[Term]) -> Goal,
    ) -> Vec<String> {
        let query: Vec<(String, TypeTag)> = vars
            .iter()
            .map(|(n, t)| (n.to_string(), t.clone()))
            .collect();
        let out = crate::search::run(AnswerLimit::All, &query, body, &EngineConfig::default())
            .expect("no engine error");
        out.answers.iter().map(render).collect()
    }

    #[test]
    fn ground_binding() {
        let answers = run_one(&[("q", TypeTag::int())], |vs| {
            Goal::eq(vs[0].clone(), Term::int(5))
        });
        assert_eq!(answers, vec!["q = 5"]);
    }

    #[test]
    fn unbound_is_canonical() {
        let answers = run_one(&[("q", TypeTag::int())], |_| Goal::succeed());
        assert_eq!(answers, vec!["q = _.0"]);
    }

    #[test]
    fn sharing_gets_one_name() {
        // q = cons(x, x) with x unbound renders with a single canonical name
        let elem = TypeTag::int();
        let list = TypeTag::list_of(&elem);
        let answers = run_one(&[("q", list.clone())], |vs| {
            let q = vs[0].clone();
            let elem = elem.clone();
            Goal::fresh(TypeTag::list_of(&elem), move |x| {
                Goal::eq(
                    q.clone(),
                    Term::cons(&TypeTag::int(), x.clone(), x.clone()),
                )
            })
        });
        assert_eq!(answers, vec!["q = (_.0 . _.0)"]);
    }

    #[test]
    fn residual_constraint_rendered() {
        let answers = run_one(&[("q", TypeTag::int())], |vs| {
            Goal::neq(vs[0].clone(), Term::int(5))
        });
        assert_eq!(answers, vec!["q = _.0 where (_.0 =/= 5)"]);
    }

    #[test]
    fn reification_is_stable() {
        let cfg = EngineConfig::default();
        let query = vec![("q".to_string(), TypeTag::int())];
        let out = crate::search::run(
            AnswerLimit::All,
            &query,
            |vs| Goal::neq(vs[0].clone(), Term::int(3)),
            &cfg,
        )
        .unwrap();
        let again = crate::search::run(
            AnswerLimit::All,
            &query,
            |vs| Goal::neq(vs[0].clone(), Term::int(3)),
            &cfg,
        )
        .unwrap();
        assert_eq!(out.answers, again.answers);
    }
}
