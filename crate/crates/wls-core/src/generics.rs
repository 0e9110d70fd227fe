//! Structural type descriptors and the bidirectional mapping between
//! ground data values and logic terms.
//!
//! The registry is value-level and monomorphic: parameterized types are
//! registered per instantiation (`List Int`, `List (List Int)`, ...).
//! Descriptors are sums of products; recursive field references are fine.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::search::State;
use crate::subst::Substitution;
use crate::term::{render_term, Atom, Term, TypeTag};
use crate::unify::{deep_walk, CyclicTerm};

/// One constructor of a declared type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CtorDesc {
    pub name: String,
    pub fields: Vec<TypeTag>,
}

/// A declared type: its tag and its constructors, in declaration order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeDesc {
    pub tag: TypeTag,
    pub ctors: Vec<CtorDesc>,
}

impl TypeDesc {
    pub fn new(tag: TypeTag, ctors: Vec<(&str, Vec<TypeTag>)>) -> TypeDesc {
        TypeDesc {
            tag,
            ctors: ctors
                .into_iter()
                .map(|(name, fields)| CtorDesc {
                    name: name.to_string(),
                    fields,
                })
                .collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum GenericsError {
    #[error("duplicate type tag {0}")]
    DuplicateTag(TypeTag),
    #[error("duplicate constructor {name} in type {tag}")]
    DuplicateCtor { tag: TypeTag, name: String },
    #[error("unknown field tag {field} in constructor {ctor} of {tag}")]
    UnknownFieldTag {
        tag: TypeTag,
        ctor: String,
        field: TypeTag,
    },
    #[error("unknown constructor {name} for type {tag}")]
    UnknownCtor { tag: TypeTag, name: String },
    #[error("constructor {name} of {tag} takes {expected} arguments, got {got}")]
    ArityMismatch {
        tag: TypeTag,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("value does not conform to its type descriptor: {reason}")]
    NonConformant { reason: String },
    #[error(transparent)]
    Cyclic(#[from] CyclicTerm),
}

/// Mapping from type tags to descriptors. Built before runs, immutable
/// afterwards. `finalize` checks closure: every field tag must itself be
/// registered or builtin.
#[derive(Clone, Default, Debug)]
pub struct TypeRegistry {
    types: BTreeMap<TypeTag, TypeDesc>,
}

impl TypeRegistry {
    pub fn new() -> Self {
        TypeRegistry::default()
    }

    pub fn register(&mut self, desc: TypeDesc) -> Result<(), GenericsError> {
        if desc.tag.is_builtin() || self.types.contains_key(&desc.tag) {
            return Err(GenericsError::DuplicateTag(desc.tag));
        }
        for (i, c) in desc.ctors.iter().enumerate() {
            if desc.ctors[..i].iter().any(|d| d.name == c.name) {
                return Err(GenericsError::DuplicateCtor {
                    tag: desc.tag.clone(),
                    name: c.name.clone(),
                });
            }
        }
        self.types.insert(desc.tag.clone(), desc);
        Ok(())
    }

    /// Checks that every field tag of every registered descriptor resolves.
    /// Dangling references are fine until this point.
    pub fn finalize(&self) -> Result<(), GenericsError> {
        for desc in self.types.values() {
            for ctor in &desc.ctors {
                for field in &ctor.fields {
                    if !field.is_builtin() && !self.types.contains_key(field) {
                        return Err(GenericsError::UnknownFieldTag {
                            tag: desc.tag.clone(),
                            ctor: ctor.name.clone(),
                            field: field.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lookup(&self, tag: &TypeTag) -> Option<&TypeDesc> {
        self.types.get(tag)
    }

    pub fn contains(&self, tag: &TypeTag) -> bool {
        tag.is_builtin() || self.types.contains_key(tag)
    }

    pub fn ctor_desc(&self, tag: &TypeTag, name: &str) -> Option<&CtorDesc> {
        self.lookup(tag)?.ctors.iter().find(|c| c.name == name)
    }

    pub fn tags(&self) -> impl Iterator<Item = &TypeTag> {
        self.types.keys()
    }

    /// Types (other than the builtins) in registration-independent order.
    pub fn descs(&self) -> impl Iterator<Item = &TypeDesc> {
        self.types.values()
    }

    /// Registers the list instantiation over `elem` if absent. Lists are
    /// structural: `cons` plus the untagged `nil` atom.
    pub fn ensure_list(&mut self, elem: &TypeTag) -> TypeTag {
        let tag = TypeTag::list_of(elem);
        if !self.types.contains_key(&tag) {
            self.types.insert(
                tag.clone(),
                TypeDesc::new(tag.clone(), vec![("cons", vec![elem.clone(), tag.clone()])]),
            );
        }
        tag
    }

    /// Arity-checked constructor application.
    pub fn make_ctor(
        &self,
        name: &str,
        tag: TypeTag,
        args: Vec<Term>,
    ) -> Result<Term, GenericsError> {
        let desc = self
            .ctor_desc(&tag, name)
            .ok_or_else(|| GenericsError::UnknownCtor {
                tag: tag.clone(),
                name: name.to_string(),
            })?;
        if desc.fields.len() != args.len() {
            return Err(GenericsError::ArityMismatch {
                tag: tag.clone(),
                name: name.to_string(),
                expected: desc.fields.len(),
                got: args.len(),
            });
        }
        Ok(Term::ctor(name, tag, args))
    }
}

/// A ground data value conforming to some registered type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Sym(String),
    Nil,
    Ctor {
        tag: TypeTag,
        name: String,
        fields: Vec<Value>,
    },
}

impl Value {
    fn kind(&self) -> String {
        match self {
            Value::Int(_) => "Int".into(),
            Value::Bool(_) => "Bool".into(),
            Value::Str(_) => "String".into(),
            Value::Sym(_) => "Sym".into(),
            Value::Nil => "()".into(),
            Value::Ctor { tag, .. } => tag.to_string(),
        }
    }

    fn fits(&self, expected: &TypeTag) -> bool {
        match self {
            Value::Int(_) => *expected == TypeTag::int(),
            Value::Bool(_) => *expected == TypeTag::boolean(),
            Value::Str(_) => *expected == TypeTag::string(),
            Value::Sym(_) => *expected == TypeTag::symbol(),
            Value::Nil => expected.list_elem().is_some(),
            Value::Ctor { tag, .. } => tag == expected,
        }
    }
}

/// Structural encoding of a value as a term. Atoms map to atoms,
/// constructed values to constructor applications.
pub fn inject(v: &Value, registry: &TypeRegistry) -> Result<Term, GenericsError> {
    match v {
        Value::Int(i) => Ok(Term::int(*i)),
        Value::Bool(b) => Ok(Term::bool(*b)),
        Value::Str(s) => Ok(Term::str(s.clone())),
        Value::Sym(s) => Ok(Term::sym(s.clone())),
        Value::Nil => Ok(Term::nil()),
        Value::Ctor { tag, name, fields } => {
            let desc =
                registry
                    .ctor_desc(tag, name)
                    .cloned()
                    .ok_or_else(|| GenericsError::UnknownCtor {
                        tag: tag.clone(),
                        name: name.clone(),
                    })?;
            if desc.fields.len() != fields.len() {
                return Err(GenericsError::ArityMismatch {
                    tag: tag.clone(),
                    name: name.clone(),
                    expected: desc.fields.len(),
                    got: fields.len(),
                });
            }
            let mut args = Vec::with_capacity(fields.len());
            for (fv, ftag) in fields.iter().zip(&desc.fields) {
                if !fv.fits(ftag) {
                    return Err(GenericsError::NonConformant {
                        reason: format!(
                            "field of {}.{} has kind {}, expected {}",
                            tag,
                            name,
                            fv.kind(),
                            ftag
                        ),
                    });
                }
                args.push(inject(fv, registry)?);
            }
            Ok(Term::ctor(name.clone(), tag.clone(), args))
        }
    }
}

/// Result of decoding a term: a ground value, or the deep-walked term when
/// unbound variables remain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Projected {
    Value(Value),
    Partial(Term),
}

/// Deep-walks a term and decodes it back into a value.
pub fn project(
    t: &Term,
    s: &Substitution,
    registry: &TypeRegistry,
) -> Result<Projected, GenericsError> {
    let walked = deep_walk(t, s)?;
    match decode(&walked, registry)? {
        Some(v) => Ok(Projected::Value(v)),
        None => Ok(Projected::Partial(walked)),
    }
}

fn decode(t: &Term, registry: &TypeRegistry) -> Result<Option<Value>, GenericsError> {
    match t {
        Term::Var(..) => Ok(None),
        Term::Atom(a) => Ok(Some(match a {
            Atom::Int(i) => Value::Int(*i),
            Atom::Bool(b) => Value::Bool(*b),
            Atom::Str(s) => Value::Str(s.clone()),
            Atom::Sym(s) => Value::Sym(s.clone()),
            Atom::Nil => Value::Nil,
        })),
        Term::Ctor(c) => {
            let desc = registry.ctor_desc(&c.tag, &c.name).ok_or_else(|| {
                GenericsError::UnknownCtor {
                    tag: c.tag.clone(),
                    name: c.name.clone(),
                }
            })?;
            if desc.fields.len() != c.args.len() {
                return Err(GenericsError::NonConformant {
                    reason: format!(
                        "term {} has arity {}, descriptor says {}",
                        render_term(t),
                        c.args.len(),
                        desc.fields.len()
                    ),
                });
            }
            let mut fields = Vec::with_capacity(c.args.len());
            for a in &c.args {
                match decode(a, registry)? {
                    None => return Ok(None),
                    Some(v) => fields.push(v),
                }
            }
            Ok(Some(Value::Ctor {
                tag: c.tag.clone(),
                name: c.name.clone(),
                fields,
            }))
        }
    }
}

/// A constructor application with one fresh variable per field, tagged
/// with the field tags; the building block for pattern-like goals.
pub fn skeleton(
    tag: &TypeTag,
    ctor: &str,
    st: State,
    registry: &TypeRegistry,
) -> Result<(Term, State), GenericsError> {
    let desc = registry
        .ctor_desc(tag, ctor)
        .cloned()
        .ok_or_else(|| GenericsError::UnknownCtor {
            tag: tag.clone(),
            name: ctor.to_string(),
        })?;
    let mut st = st;
    let mut args = Vec::with_capacity(desc.fields.len());
    for field in &desc.fields {
        let (v, next) = st.fresh_var(field.clone());
        args.push(v);
        st = next;
    }
    Ok((Term::ctor(ctor, tag.clone(), args), st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::EngineConfig;

    fn peano() -> TypeDesc {
        TypeDesc::new(
            TypeTag::peano(),
            vec![("z", vec![]), ("s", vec![TypeTag::peano()])],
        )
    }

    fn registry() -> TypeRegistry {
        let mut r = TypeRegistry::new();
        r.register(peano()).unwrap();
        r.ensure_list(&TypeTag::int());
        r.finalize().unwrap();
        r
    }

    fn peano_val(n: usize) -> Value {
        (0..n).fold(
            Value::Ctor {
                tag: TypeTag::peano(),
                name: "z".into(),
                fields: vec![],
            },
            |acc, _| Value::Ctor {
                tag: TypeTag::peano(),
                name: "s".into(),
                fields: vec![acc],
            },
        )
    }

    #[test]
    fn register_rejects_duplicates() {
        let mut r = TypeRegistry::new();
        r.register(peano()).unwrap();
        assert!(matches!(
            r.register(peano()),
            Err(GenericsError::DuplicateTag(_))
        ));
    }

    #[test]
    fn finalize_checks_closure() {
        let mut r = TypeRegistry::new();
        r.register(TypeDesc::new(
            TypeTag::new("T"),
            vec![("mk", vec![TypeTag::new("Missing")])],
        ))
        .unwrap();
        assert!(matches!(
            r.finalize(),
            Err(GenericsError::UnknownFieldTag { .. })
        ));
        // dangling references are fine before finalize
        r.register(TypeDesc::new(TypeTag::new("Missing"), vec![("m", vec![])]))
            .unwrap();
        r.finalize().unwrap();
    }

    #[test]
    fn make_ctor_checks_arity() {
        let r = registry();
        assert!(r.make_ctor("z", TypeTag::peano(), vec![]).is_ok());
        assert!(matches!(
            r.make_ctor(
                "cons",
                TypeTag::list_of(&TypeTag::int()),
                vec![Term::int(1)]
            ),
            Err(GenericsError::ArityMismatch { .. })
        ));
        assert!(matches!(
            r.make_ctor("bogus", TypeTag::peano(), vec![]),
            Err(GenericsError::UnknownCtor { .. })
        ));
    }

    #[test]
    fn inject_examples() {
        let r = registry();
        let two = inject(&peano_val(2), &r).unwrap();
        assert_eq!(render_term(&two), "(s (s z))");
        assert_eq!(inject(&Value::Int(42), &r).unwrap(), Term::int(42));

        let list = Value::Ctor {
            tag: TypeTag::list_of(&TypeTag::int()),
            name: "cons".into(),
            fields: vec![
                Value::Int(1),
                Value::Ctor {
                    tag: TypeTag::list_of(&TypeTag::int()),
                    name: "cons".into(),
                    fields: vec![Value::Int(2), Value::Nil],
                },
            ],
        };
        assert_eq!(render_term(&inject(&list, &r).unwrap()), "(1 2)");
    }

    #[test]
    fn inject_rejects_nonconformant() {
        let r = registry();
        let bad = Value::Ctor {
            tag: TypeTag::peano(),
            name: "s".into(),
            fields: vec![Value::Int(3)],
        };
        assert!(matches!(
            inject(&bad, &r),
            Err(GenericsError::NonConformant { .. })
        ));
    }

    #[test]
    fn project_round_trip_and_partial() {
        let r = registry();
        let s = Substitution::new();
        let v = peano_val(3);
        let t = inject(&v, &r).unwrap();
        assert_eq!(project(&t, &s, &r).unwrap(), Projected::Value(v));

        let partial = Term::cons(
            &TypeTag::int(),
            Term::int(1),
            Term::var(crate::term::VarId(0), TypeTag::list_of(&TypeTag::int())),
        );
        match project(&partial, &s, &r).unwrap() {
            Projected::Partial(t) => assert_eq!(render_term(&t), "(1 . v0)"),
            other => panic!("expected partial, got {:?}", other),
        }

        let bogus = Term::ctor("bogus", TypeTag::peano(), vec![]);
        assert!(matches!(
            project(&bogus, &s, &r),
            Err(GenericsError::UnknownCtor { .. })
        ));
    }

    #[test]
    fn skeleton_allocates_field_vars() {
        let r = registry();
        let st = State::initial(&EngineConfig::default());
        let (t, st) = skeleton(&TypeTag::peano(), "s", st, &r).unwrap();
        assert_eq!(st.next_var, 1);
        assert_eq!(render_term(&t), "(s v0)");

        let (z, st) = skeleton(&TypeTag::peano(), "z", st, &r).unwrap();
        assert_eq!(st.next_var, 1);
        assert_eq!(render_term(&z), "z");

        let (cell, st) = skeleton(&TypeTag::list_of(&TypeTag::int()), "cons", st, &r).unwrap();
        assert_eq!(st.next_var, 3);
        assert_eq!(render_term(&cell), "(v1 . v2)");
    }
}
