//! Canonical relations and type descriptors used by examples, tests, and
//! the evaluation harness: list relations over any element type, and Peano
//! arithmetic as the recursive user type.

use crate::generics::{TypeDesc, TypeRegistry};
use crate::search::Goal;
use crate::term::{Term, TypeTag};

/// Registers the stdlib types: `Peano` and the common list instantiations.
pub fn register_stdlib(registry: &mut TypeRegistry) {
    if registry.lookup(&TypeTag::peano()).is_none() {
        registry.register(peano_desc()).expect("fresh registry");
    }
    registry.ensure_list(&TypeTag::int());
    registry.ensure_list(&TypeTag::boolean());
    registry.ensure_list(&TypeTag::string());
    registry.ensure_list(&TypeTag::symbol());
}

pub fn peano_desc() -> TypeDesc {
    TypeDesc::new(
        TypeTag::peano(),
        vec![("z", vec![]), ("s", vec![TypeTag::peano()])],
    )
}

pub fn zero() -> Term {
    Term::ctor("z", TypeTag::peano(), vec![])
}

pub fn succ(n: Term) -> Term {
    Term::ctor("s", TypeTag::peano(), vec![n])
}

/// The Peano numeral for `n`.
pub fn nat(n: u64) -> Term {
    (0..n).fold(zero(), |acc, _| succ(acc))
}

/// Reads a ground Peano numeral back, if the term is one.
pub fn from_peano(t: &Term) -> Option<u64> {
    let mut n = 0;
    let mut cur = t;
    loop {
        match cur {
            Term::Ctor(c) if c.name == "z" && c.args.is_empty() => return Some(n),
            Term::Ctor(c) if c.name == "s" && c.args.len() == 1 => {
                n += 1;
                cur = &c.args[0];
            }
            _ => return None,
        }
    }
}

pub fn int_list(items: &[i64]) -> Term {
    Term::list(&TypeTag::int(), items.iter().map(|&i| Term::int(i)))
}

pub fn sym_list(items: &[&str]) -> Term {
    Term::list(&TypeTag::symbol(), items.iter().map(|s| Term::sym(*s)))
}

/// `l` is the cons of `h` onto `t`.
pub fn conso(elem: &TypeTag, h: Term, t: Term, l: Term) -> Goal {
    let args = vec![h.clone(), t.clone(), l.clone()];
    Goal::traced("conso", args, Goal::eq(l, Term::cons(elem, h, t)))
}

/// `ab` is the concatenation of `a` and `b`.
pub fn appendo(elem: &TypeTag, a: Term, b: Term, ab: Term) -> Goal {
    let elem = elem.clone();
    let list = TypeTag::list_of(&elem);
    let args = vec![a.clone(), b.clone(), ab.clone()];
    let base = Goal::conj(vec![
        Goal::eq(a.clone(), Term::nil()),
        Goal::eq(b.clone(), ab.clone()),
    ]);
    let step = {
        let elem = elem.clone();
        Goal::fresh_many(vec![elem.clone(), list.clone(), list], move |vs| {
            let (h, t, rest) = (vs[0].clone(), vs[1].clone(), vs[2].clone());
            let recur = {
                let (elem, t, b, rest) = (elem.clone(), t.clone(), b.clone(), rest.clone());
                Goal::delay_labeled("appendo", move || {
                    appendo(&elem, t.clone(), b.clone(), rest.clone())
                })
            };
            Goal::conj(vec![
                Goal::eq(a.clone(), Term::cons(&elem, h.clone(), t)),
                Goal::eq(ab.clone(), Term::cons(&elem, h, rest)),
                recur,
            ])
        })
    };
    Goal::traced("appendo", args, Goal::disj(vec![base, step]))
}

/// `x` unifies with some member of `l`; duplicates answer once each.
pub fn membero(elem: &TypeTag, x: Term, l: Term) -> Goal {
    let elem = elem.clone();
    let list = TypeTag::list_of(&elem);
    let args = vec![x.clone(), l.clone()];
    let inner = {
        let elem = elem.clone();
        Goal::fresh_many(vec![elem.clone(), list], move |vs| {
            let (h, t) = (vs[0].clone(), vs[1].clone());
            let recur = {
                let (elem, x, t) = (elem.clone(), x.clone(), t.clone());
                Goal::delay_labeled("membero", move || membero(&elem, x.clone(), t.clone()))
            };
            Goal::conj(vec![
                Goal::eq(l.clone(), Term::cons(&elem, h.clone(), t)),
                Goal::disj(vec![Goal::eq(x.clone(), h), recur]),
            ])
        })
    };
    Goal::traced("membero", args, inner)
}

/// Peano addition: `a + b = c`.
pub fn pluso(a: Term, b: Term, c: Term) -> Goal {
    let peano = TypeTag::peano();
    let args = vec![a.clone(), b.clone(), c.clone()];
    let base = Goal::conj(vec![
        Goal::eq(a.clone(), zero()),
        Goal::eq(b.clone(), c.clone()),
    ]);
    let step = Goal::fresh_many(vec![peano.clone(), peano], move |vs| {
        let (a1, c1) = (vs[0].clone(), vs[1].clone());
        let recur = {
            let (a1, b, c1) = (a1.clone(), b.clone(), c1.clone());
            Goal::delay_labeled("pluso", move || pluso(a1.clone(), b.clone(), c1.clone()))
        };
        Goal::conj(vec![
            Goal::eq(a.clone(), succ(a1)),
            Goal::eq(c.clone(), succ(c1)),
            recur,
        ])
    });
    Goal::traced("pluso", args, Goal::disj(vec![base, step]))
}

/// Relational list length: `n` is the Peano length of `l`.
pub fn lengtho(elem: &TypeTag, l: Term, n: Term) -> Goal {
    let elem = elem.clone();
    let list = TypeTag::list_of(&elem);
    let args = vec![l.clone(), n.clone()];
    let base = Goal::conj(vec![
        Goal::eq(l.clone(), Term::nil()),
        Goal::eq(n.clone(), zero()),
    ]);
    let step = {
        let elem = elem.clone();
        Goal::fresh_many(vec![elem.clone(), list, TypeTag::peano()], move |vs| {
            let (h, t, m) = (vs[0].clone(), vs[1].clone(), vs[2].clone());
            let recur = {
                let (elem, t, m) = (elem.clone(), t.clone(), m.clone());
                Goal::delay_labeled("lengtho", move || lengtho(&elem, t.clone(), m.clone()))
            };
            Goal::conj(vec![
                Goal::eq(l.clone(), Term::cons(&elem, h, t)),
                Goal::eq(n.clone(), succ(m)),
                recur,
            ])
        })
    };
    Goal::traced("lengtho", args, Goal::disj(vec![base, step]))
}
