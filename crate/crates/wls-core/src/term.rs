//! The logic term universe: atoms, constructor applications, and
//! type-tagged logic variables.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Identifier of a logic variable. Ids are allocated strictly increasing
/// within one run and never reused.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Dynamic type tag. Equality is string equality on the normalized name
/// (surrounding whitespace stripped). Parameterized types are spelled out
/// per instantiation, e.g. `List Int`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TypeTag(Arc<str>);

impl TypeTag {
    /// Builds a tag from a name. Panics on empty names: a tag without a
    /// name cannot participate in unification checks.
    pub fn new(name: impl AsRef<str>) -> Self {
        let trimmed = name.as_ref().trim();
        assert!(!trimmed.is_empty(), "type tag name must be non-empty");
        TypeTag(Arc::from(trimmed))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn int() -> Self {
        TypeTag::new("Int")
    }

    pub fn boolean() -> Self {
        TypeTag::new("Bool")
    }

    pub fn string() -> Self {
        TypeTag::new("String")
    }

    pub fn symbol() -> Self {
        TypeTag::new("Sym")
    }

    pub fn peano() -> Self {
        TypeTag::new("Peano")
    }

    /// True for the four builtin atom tags.
    pub fn is_builtin(&self) -> bool {
        matches!(self.as_str(), "Int" | "Bool" | "String" | "Sym")
    }

    /// The tag of a list over `elem`, e.g. `List Int` or `List (List Int)`.
    pub fn list_of(elem: &TypeTag) -> Self {
        if elem.as_str().contains(' ') {
            TypeTag::new(format!("List ({})", elem.as_str()))
        } else {
            TypeTag::new(format!("List {}", elem.as_str()))
        }
    }

    /// Inverse of [`TypeTag::list_of`]: the element tag when this tag is a
    /// list instantiation.
    pub fn list_elem(&self) -> Option<TypeTag> {
        let rest = self.as_str().strip_prefix("List ")?;
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest);
        Some(TypeTag::new(inner))
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Atomic values. Symbols and strings are distinct kinds and never compare
/// equal. `Nil` is the empty list; it carries no tag of its own.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Int(i64),
    Bool(bool),
    Str(String),
    Sym(String),
    Nil,
}

impl Atom {
    /// The builtin tag of this atom, when it has one. `Nil` is polymorphic
    /// over list types and reports no tag.
    pub fn tag(&self) -> Option<TypeTag> {
        match self {
            Atom::Int(_) => Some(TypeTag::int()),
            Atom::Bool(_) => Some(TypeTag::boolean()),
            Atom::Str(_) => Some(TypeTag::string()),
            Atom::Sym(_) => Some(TypeTag::symbol()),
            Atom::Nil => None,
        }
    }
}

/// A constructor application. Shared behind an `Arc` so terms clone cheaply
/// during search.
#[derive(PartialEq, Eq, Hash, Debug)]
pub struct Ctor {
    pub name: String,
    pub tag: TypeTag,
    pub args: Vec<Term>,
}

/// A logic term: a tagged variable, an atom, or a constructor application.
/// Terms are immutable values and safe to share between threads.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(VarId, TypeTag),
    Atom(Atom),
    Ctor(Arc<Ctor>),
}

impl Term {
    pub fn var(id: VarId, tag: TypeTag) -> Term {
        Term::Var(id, tag)
    }

    pub fn int(v: i64) -> Term {
        Term::Atom(Atom::Int(v))
    }

    pub fn bool(v: bool) -> Term {
        Term::Atom(Atom::Bool(v))
    }

    pub fn str(v: impl Into<String>) -> Term {
        Term::Atom(Atom::Str(v.into()))
    }

    pub fn sym(v: impl Into<String>) -> Term {
        Term::Atom(Atom::Sym(v.into()))
    }

    pub fn nil() -> Term {
        Term::Atom(Atom::Nil)
    }

    /// Unchecked constructor application, for embedded use. Arity checking
    /// against a registry is in `TypeRegistry::make_ctor`.
    pub fn ctor(name: impl Into<String>, tag: TypeTag, args: Vec<Term>) -> Term {
        Term::Ctor(Arc::new(Ctor {
            name: name.into(),
            tag,
            args,
        }))
    }

    /// A `cons` cell of the list type over `elem`.
    pub fn cons(elem: &TypeTag, head: Term, tail: Term) -> Term {
        Term::ctor("cons", TypeTag::list_of(elem), vec![head, tail])
    }

    /// A proper list term from the given elements.
    pub fn list(elem: &TypeTag, items: impl IntoIterator<Item = Term>) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |acc, h| Term::cons(elem, h, acc))
    }

    /// The tag of this term, when known. Variables and constructor
    /// applications always carry one; atoms report their builtin tag,
    /// except `nil` which is polymorphic.
    pub fn tag(&self) -> Option<TypeTag> {
        match self {
            Term::Var(_, tag) => Some(tag.clone()),
            Term::Atom(a) => a.tag(),
            Term::Ctor(c) => Some(c.tag.clone()),
        }
    }

    /// The set of variable ids occurring syntactically in this term, with
    /// no substitution applied.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v, _) => {
                out.insert(*v);
            }
            Term::Atom(_) => {}
            Term::Ctor(c) => {
                for a in &c.args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(..))
    }
}

/// Structural equality, including variable ids and tags.
pub fn term_eq(a: &Term, b: &Term) -> bool {
    a == b
}

/// Renders a term with a caller-supplied variable namer. Proper lists print
/// as `(1 2 3)`, improper lists as dotted pairs, symbols bare, strings
/// quoted with escapes, nullary constructors as their bare name.
pub fn render_term_with(t: &Term, namer: &dyn Fn(VarId) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, t, namer);
    out
}

/// Renders a term with internal variable names (`v0`, `v1`, ...).
pub fn render_term(t: &Term) -> String {
    render_term_with(t, &|v| format!("v{}", v.0))
}

fn write_term(out: &mut String, t: &Term, namer: &dyn Fn(VarId) -> String) {
    match t {
        Term::Var(v, _) => out.push_str(&namer(*v)),
        Term::Atom(a) => write_atom(out, a),
        Term::Ctor(c) if c.name == "cons" && c.args.len() == 2 => {
            write_list(out, &c.args[0], &c.args[1], namer)
        }
        Term::Ctor(c) => {
            if c.args.is_empty() {
                out.push_str(&c.name);
            } else {
                out.push('(');
                out.push_str(&c.name);
                for a in &c.args {
                    out.push(' ');
                    write_term(out, a, namer);
                }
                out.push(')');
            }
        }
    }
}

fn write_atom(out: &mut String, a: &Atom) {
    match a {
        Atom::Int(i) => out.push_str(&i.to_string()),
        Atom::Bool(true) => out.push_str("#t"),
        Atom::Bool(false) => out.push_str("#f"),
        Atom::Str(s) => {
            out.push('"');
            for ch in s.chars() {
                match ch {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    _ => out.push(ch),
                }
            }
            out.push('"');
        }
        Atom::Sym(s) => out.push_str(s),
        Atom::Nil => out.push_str("()"),
    }
}

fn write_list(out: &mut String, head: &Term, tail: &Term, namer: &dyn Fn(VarId) -> String) {
    out.push('(');
    write_term(out, head, namer);
    let mut rest = tail;
    loop {
        match rest {
            Term::Atom(Atom::Nil) => break,
            Term::Ctor(c) if c.name == "cons" && c.args.len() == 2 => {
                out.push(' ');
                write_term(out, &c.args[0], namer);
                rest = &c.args[1];
            }
            other => {
                out.push_str(" . ");
                write_term(out, other, namer);
                break;
            }
        }
    }
    out.push(')');
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}
