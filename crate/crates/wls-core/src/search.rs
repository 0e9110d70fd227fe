//! Goals, lazy answer streams, interleaving combinators, on-demand delay,
//! fuel-bounded pulling, and the run interface.
//!
//! A goal maps a search state to a stream of successor states. Streams are
//! lazy: an `Immature` node is a suspended computation that is only forced
//! when an answer is demanded, and `pull` bounds the number of forcings per
//! demand with optional fuel, so divergence is observable and resumable.

use std::sync::Arc;

use thiserror::Error;

use crate::constraints::{add_diseq, revalidate, ConstraintStore, StoreOutcome};
use crate::reify::{self, Answer};
use crate::subst::Substitution;
use crate::term::{render_term_with, Term, TypeTag, VarId};
use crate::trace::{ParentRef, TraceKind, TraceLimits, TraceSink, TraceTree};
use crate::unify::{deep_walk, unify, CyclicTerm, Extension, TypeMismatch, UnifyOutcome};

/// Disjunction discipline: fair interleaving, or classic depth-first.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Interleaving,
    DepthFirst,
}

/// Engine-wide knobs. One engine, one flag per behavior, so strategy
/// comparisons hold everything else constant.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub occurs_check: bool,
    pub strategy: Strategy,
    /// Bound on `Immature` forcings per pull; `None` is unlimited.
    pub fuel: Option<u64>,
    pub trace_enabled: bool,
    pub trace_limits: TraceLimits,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            occurs_check: true,
            strategy: Strategy::Interleaving,
            fuel: None,
            trace_enabled: false,
            trace_limits: TraceLimits::default(),
        }
    }
}

/// A hard error that aborts the whole run, as opposed to a failed branch.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Type(#[from] TypeMismatch),
    #[error(transparent)]
    Cyclic(#[from] CyclicTerm),
}

/// One search state: substitution, constraint store, fresh-variable
/// counter, and this run's trace handle.
#[derive(Clone, Debug)]
pub struct State {
    pub subst: Substitution,
    pub store: ConstraintStore,
    pub next_var: u32,
    pub occurs_check: bool,
    pub strategy: Strategy,
    trace: TraceSink,
    trace_parent: ParentRef,
}

impl State {
    pub fn initial(cfg: &EngineConfig) -> State {
        State {
            subst: Substitution::new(),
            store: ConstraintStore::new(),
            next_var: 0,
            occurs_check: cfg.occurs_check,
            strategy: cfg.strategy,
            trace: if cfg.trace_enabled {
                TraceSink::enabled(cfg.trace_limits)
            } else {
                TraceSink::disabled()
            },
            trace_parent: ParentRef::Root,
        }
    }

    /// Allocates the next variable with the given tag.
    pub fn fresh_var(mut self, tag: TypeTag) -> (Term, State) {
        let v = VarId(self.next_var);
        self.next_var += 1;
        (Term::var(v, tag), self)
    }

    /// Allocates a variable and registers its display name for traces.
    pub fn fresh_named_var(self, name: &str, tag: TypeTag) -> (Term, State) {
        let (t, st) = self.fresh_var(tag);
        if let Term::Var(v, _) = &t {
            st.trace.set_var_name(*v, name);
        }
        (t, st)
    }

    pub fn trace(&self) -> &TraceSink {
        &self.trace
    }

    fn with_parent(mut self, parent: ParentRef) -> State {
        self.trace_parent = parent;
        self
    }

    fn render(&self, t: &Term) -> String {
        let sink = self.trace.clone();
        render_term_with(t, &move |v| sink.var_name(v))
    }

    /// Renders a term deep-walked under this state's substitution, falling
    /// back to the raw term when resolution hits a cycle.
    fn render_resolved(&self, t: &Term) -> String {
        match deep_walk(t, &self.subst) {
            Ok(w) => self.render(&w),
            Err(_) => self.render(t),
        }
    }

    fn render_extension(&self, ext: &Extension) -> String {
        if ext.is_empty() {
            return "no new bindings".to_string();
        }
        ext.iter()
            .map(|b| format!("{} := {}", self.trace.var_name(b.var), self.render(&b.value)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A suspended stream computation.
pub struct Thunk(Box<dyn FnOnce() -> Stream + Send>);

impl Thunk {
    pub fn new(f: impl FnOnce() -> Stream + Send + 'static) -> Thunk {
        Thunk(Box::new(f))
    }

    pub fn force(self) -> Stream {
        (self.0)()
    }
}

impl std::fmt::Debug for Thunk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<thunk>")
    }
}

/// A lazy answer sequence. `Fault` carries a hard error toward the caller.
#[derive(Debug)]
pub enum Stream {
    Empty,
    Mature(Box<State>, Box<Stream>),
    Immature(Thunk),
    Fault(EngineError),
}

impl Stream {
    pub fn unit(st: State) -> Stream {
        Stream::Mature(Box::new(st), Box::new(Stream::Empty))
    }
}

/// A function from state to stream. Goals never mutate their input state.
#[derive(Clone)]
pub struct Goal(Arc<dyn Fn(State) -> Stream + Send + Sync>);

impl std::fmt::Debug for Goal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<goal>")
    }
}

impl Goal {
    pub fn new(f: impl Fn(State) -> Stream + Send + Sync + 'static) -> Goal {
        Goal(Arc::new(f))
    }

    pub fn apply(&self, st: State) -> Stream {
        (self.0)(st)
    }

    /// The goal that always succeeds without binding anything.
    pub fn succeed() -> Goal {
        Goal::new(Stream::unit)
    }

    /// The goal that always fails.
    pub fn fail() -> Goal {
        Goal::new(|_| Stream::Empty)
    }

    /// Unification goal: unify, revalidate the constraint store, emit trace
    /// events. A tag clash is a hard error that aborts the run.
    pub fn eq(a: Term, b: Term) -> Goal {
        Goal::new(move |st: State| match unify(&a, &b, &st.subst, st.occurs_check) {
            Err(err) => {
                st.trace
                    .record(st.trace_parent, TraceKind::Failure, "==", err.to_string());
                Stream::Fault(EngineError::Type(err))
            }
            Ok(UnifyOutcome::Failure(reason)) => {
                st.trace
                    .record(st.trace_parent, TraceKind::Failure, "==", reason.to_string());
                Stream::Empty
            }
            Ok(UnifyOutcome::Extended { subst, extension }) => {
                match revalidate(&st.store, &subst, st.occurs_check) {
                    StoreOutcome::Violated(reason) => {
                        st.trace.record(
                            st.trace_parent,
                            TraceKind::Failure,
                            "==",
                            reason.to_string(),
                        );
                        Stream::Empty
                    }
                    StoreOutcome::Ok(store) => {
                        if st.trace.is_enabled() {
                            let detail = st.render_extension(&extension);
                            st.trace
                                .record(st.trace_parent, TraceKind::Unify, "==", detail);
                        }
                        Stream::unit(State { subst, store, ..st })
                    }
                }
            }
        })
    }

    /// Disequality goal: normalize `a =/= b` into the constraint store.
    pub fn neq(a: Term, b: Term) -> Goal {
        Goal::new(move |st: State| {
            match add_diseq(&a, &b, &st.subst, &st.store, st.occurs_check) {
                Err(err) => {
                    st.trace
                        .record(st.trace_parent, TraceKind::Failure, "=/=", err.to_string());
                    Stream::Fault(EngineError::Type(err))
                }
                Ok(StoreOutcome::Violated(reason)) => {
                    st.trace.record(
                        st.trace_parent,
                        TraceKind::Failure,
                        "=/=",
                        reason.to_string(),
                    );
                    Stream::Empty
                }
                Ok(StoreOutcome::Ok(store)) => {
                    if st.trace.is_enabled() {
                        let detail = format!(
                            "{} =/= {}",
                            st.render_resolved(&a),
                            st.render_resolved(&b)
                        );
                        st.trace
                            .record(st.trace_parent, TraceKind::Diseq, "=/=", detail);
                    }
                    Stream::unit(State { store, ..st })
                }
            }
        })
    }

    /// Allocates a fresh variable with the given tag and runs the body.
    pub fn fresh(tag: TypeTag, body: impl Fn(Term) -> Goal + Send + Sync + 'static) -> Goal {
        Goal::new(move |st: State| {
            let (v, st) = st.fresh_var(tag.clone());
            body(v).apply(st)
        })
    }

    /// [`Goal::fresh`] with a display name registered for traces.
    pub fn fresh_named(
        name: impl Into<String>,
        tag: TypeTag,
        body: impl Fn(Term) -> Goal + Send + Sync + 'static,
    ) -> Goal {
        let name = name.into();
        Goal::new(move |st: State| {
            let (v, st) = st.fresh_named_var(&name, tag.clone());
            body(v).apply(st)
        })
    }

    /// Allocates one fresh variable per tag, in order.
    pub fn fresh_many(
        tags: Vec<TypeTag>,
        body: impl Fn(&[Term]) -> Goal + Send + Sync + 'static,
    ) -> Goal {
        Goal::new(move |mut st: State| {
            let mut vars = Vec::with_capacity(tags.len());
            for tag in &tags {
                let (v, next) = st.fresh_var(tag.clone());
                vars.push(v);
                st = next;
            }
            body(&vars).apply(st)
        })
    }

    /// Left-to-right conjunction.
    pub fn conj(goals: Vec<Goal>) -> Goal {
        Goal::new(move |st: State| {
            let strategy = st.strategy;
            let mut iter = goals.iter();
            let mut stream = match iter.next() {
                None => Stream::unit(st),
                Some(g) => g.apply(st),
            };
            for g in iter {
                stream = bind(stream, g.clone(), strategy);
            }
            stream
        })
    }

    /// Disjunction under the active strategy. Each branch opens a branch
    /// trace node at activation.
    pub fn disj(goals: Vec<Goal>) -> Goal {
        Goal::new(move |st: State| {
            let strategy = st.strategy;
            let streams: Vec<Stream> = goals
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let branch = st.trace.record(
                        st.trace_parent,
                        TraceKind::Branch,
                        i.to_string(),
                        "",
                    );
                    g.apply(st.clone().with_parent(branch))
                })
                .collect();
            let mut streams = streams.into_iter().rev();
            match streams.next() {
                None => Stream::Empty,
                Some(last) => streams.fold(last, |acc, s| mplus(s, acc, strategy)),
            }
        })
    }

    /// Suspends a goal: nothing runs until the stream is forced by `pull`.
    /// Recursive relations must wrap their self-calls in `delay`.
    pub fn delay(build: impl Fn() -> Goal + Send + Sync + 'static) -> Goal {
        Goal::delay_labeled("", build)
    }

    /// [`Goal::delay`] with a label (typically the relation name) for the
    /// delay/force trace nodes.
    pub fn delay_labeled(
        label: impl Into<String>,
        build: impl Fn() -> Goal + Send + Sync + 'static,
    ) -> Goal {
        let label = label.into();
        let build: Arc<dyn Fn() -> Goal + Send + Sync> = Arc::new(build);
        Goal::new(move |st: State| {
            let delay_ref = st
                .trace
                .record(st.trace_parent, TraceKind::Delay, label.clone(), "");
            let st = st.with_parent(delay_ref);
            let build = Arc::clone(&build);
            let label = label.clone();
            Stream::Immature(Thunk::new(move || {
                let force_ref = st
                    .trace
                    .record(delay_ref, TraceKind::Force, label, "");
                let st = st.with_parent(force_ref);
                build().apply(st)
            }))
        })
    }

    /// Wraps a goal in a named activation node, the unit traces group by.
    pub fn traced(label: impl Into<String>, args: Vec<Term>, inner: Goal) -> Goal {
        let label = label.into();
        Goal::new(move |st: State| {
            let node = if st.trace.is_enabled() {
                let rendered: Vec<String> =
                    args.iter().map(|a| st.render_resolved(a)).collect();
                let detail = format!("({} {})", label, rendered.join(" "));
                st.trace
                    .record(st.trace_parent, TraceKind::Goal, label.clone(), detail)
            } else {
                ParentRef::Suppressed
            };
            inner.apply(st.with_parent(node))
        })
    }
}

/// Merges two streams under the given strategy. Interleaving swaps the
/// arguments at every mature head and every forcing, which is what makes
/// the search fair; depth-first exhausts the first stream first.
pub fn mplus(s1: Stream, s2: Stream, strategy: Strategy) -> Stream {
    match s1 {
        Stream::Empty => s2,
        Stream::Fault(e) => Stream::Fault(e),
        Stream::Mature(head, tail) => match strategy {
            Strategy::Interleaving => {
                Stream::Mature(head, Box::new(mplus(s2, *tail, strategy)))
            }
            Strategy::DepthFirst => Stream::Mature(head, Box::new(mplus(*tail, s2, strategy))),
        },
        Stream::Immature(k) => match strategy {
            Strategy::Interleaving => {
                Stream::Immature(Thunk::new(move || mplus(s2, k.force(), strategy)))
            }
            Strategy::DepthFirst => {
                Stream::Immature(Thunk::new(move || mplus(k.force(), s2, strategy)))
            }
        },
    }
}

/// Feeds every state of a stream through a goal, merging the results.
pub fn bind(s: Stream, g: Goal, strategy: Strategy) -> Stream {
    match s {
        Stream::Empty => Stream::Empty,
        Stream::Fault(e) => Stream::Fault(e),
        Stream::Mature(head, tail) => mplus(
            g.apply(*head),
            bind(*tail, g, strategy),
            strategy,
        ),
        Stream::Immature(k) => Stream::Immature(Thunk::new(move || bind(k.force(), g, strategy))),
    }
}

/// Result of demanding one answer from a stream.
#[derive(Debug)]
pub enum Pulled {
    /// An answer, the remaining stream, and the forcings spent.
    Answer {
        state: State,
        rest: Stream,
        steps_used: u64,
    },
    /// The stream is exhausted; no further answers exist.
    Done { steps_used: u64 },
    /// Fuel ran out; the partially-forced stream can be resumed.
    Exhausted { rest: Stream, steps_used: u64 },
}

/// Forces `Immature` nodes until a mature head or the end of the stream,
/// or until `fuel` forcings have been spent.
pub fn pull(mut s: Stream, fuel: Option<u64>) -> Result<Pulled, EngineError> {
    let mut steps: u64 = 0;
    loop {
        match s {
            Stream::Empty => return Ok(Pulled::Done { steps_used: steps }),
            Stream::Fault(e) => return Err(e),
            Stream::Mature(head, tail) => {
                return Ok(Pulled::Answer {
                    state: *head,
                    rest: *tail,
                    steps_used: steps,
                })
            }
            Stream::Immature(k) => {
                if let Some(limit) = fuel {
                    if steps >= limit {
                        return Ok(Pulled::Exhausted {
                            rest: Stream::Immature(k),
                            steps_used: steps,
                        });
                    }
                }
                steps += 1;
                s = k.force();
            }
        }
    }
}

/// How many answers a run asks for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AnswerLimit {
    All,
    First(usize),
}

/// Pull/forcing counters for one run.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct RunStats {
    pub pulls: u64,
    pub forcings: u64,
}

/// Why a run stopped producing answers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RunStatus {
    Complete,
    FuelExhausted,
}

/// Answers plus the recorded trace and counters.
#[derive(Debug)]
pub struct RunOutcome {
    pub answers: Vec<Answer>,
    pub trace: TraceTree,
    pub stats: RunStats,
    pub status: RunStatus,
}

/// A hard error, with everything gathered before it struck.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct RunError {
    pub error: EngineError,
    pub answers: Vec<Answer>,
    pub trace: TraceTree,
    pub stats: RunStats,
}

/// An in-flight query: a live stream plus the reification context, so
/// callers can keep pulling answers on demand.
pub struct RunSession {
    stream: Stream,
    query_vars: Vec<(String, Term)>,
    sink: TraceSink,
    fuel: Option<u64>,
    stats: RunStats,
}

/// One step of a session.
#[derive(Debug)]
pub enum SessionStep {
    Answer(Answer),
    Done,
    Exhausted,
}

impl RunSession {
    /// Allocates one fresh variable per query var and applies the goal the
    /// body builds from them.
    pub fn start(
        query_vars: &[(String, TypeTag)],
        body: impl FnOnce(&[Term]) -> Goal,
        cfg: &EngineConfig,
    ) -> RunSession {
        let mut st = State::initial(cfg);
        let mut vars: Vec<(String, Term)> = Vec::with_capacity(query_vars.len());
        for (name, tag) in query_vars {
            let (v, next) = st.fresh_named_var(name, tag.clone());
            vars.push((name.clone(), v));
            st = next;
        }
        let terms: Vec<Term> = vars.iter().map(|(_, t)| t.clone()).collect();
        let sink = st.trace().clone();
        let goal = body(&terms);
        let stream = goal.apply(st);
        RunSession {
            stream,
            query_vars: vars,
            sink,
            fuel: cfg.fuel,
            stats: RunStats::default(),
        }
    }

    /// Demands the next answer, spending at most the configured fuel.
    pub fn next(&mut self) -> Result<SessionStep, EngineError> {
        let stream = std::mem::replace(&mut self.stream, Stream::Empty);
        match pull(stream, self.fuel)? {
            Pulled::Answer {
                state,
                rest,
                steps_used,
            } => {
                self.stats.pulls += 1;
                self.stats.forcings += steps_used;
                self.stream = rest;
                let answer = reify::reify(&state, &self.query_vars)
                    .map_err(EngineError::Cyclic)?;
                state.trace.record(
                    state.trace_parent,
                    TraceKind::Success,
                    "answer",
                    reify::render_compact(&answer),
                );
                Ok(SessionStep::Answer(answer))
            }
            Pulled::Done { steps_used } => {
                self.stats.pulls += 1;
                self.stats.forcings += steps_used;
                Ok(SessionStep::Done)
            }
            Pulled::Exhausted { rest, steps_used } => {
                self.stats.pulls += 1;
                self.stats.forcings += steps_used;
                self.stream = rest;
                Ok(SessionStep::Exhausted)
            }
        }
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn trace(&self) -> TraceTree {
        self.sink.snapshot()
    }
}

/// Runs a goal over freshly allocated query variables and reifies up to
/// `limit` answers.
pub fn run(
    limit: AnswerLimit,
    query_vars: &[(String, TypeTag)],
    body: impl FnOnce(&[Term]) -> Goal,
    cfg: &EngineConfig,
) -> Result<RunOutcome, RunError> {
    let mut session = RunSession::start(query_vars, body, cfg);
    let mut answers = Vec::new();
    let status = loop {
        if let AnswerLimit::First(n) = limit {
            if answers.len() >= n {
                break RunStatus::Complete;
            }
        }
        match session.next() {
            Err(error) => {
                return Err(RunError {
                    error,
                    answers,
                    trace: session.trace(),
                    stats: session.stats(),
                })
            }
            Ok(SessionStep::Answer(a)) => answers.push(a),
            Ok(SessionStep::Done) => break RunStatus::Complete,
            Ok(SessionStep::Exhausted) => break RunStatus::FuelExhausted,
        }
    };
    Ok(RunOutcome {
        answers,
        trace: session.trace(),
        stats: session.stats(),
        status,
    })
}
