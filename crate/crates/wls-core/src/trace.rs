//! Structured search traces: a bounded tree of goal activations,
//! unifications, branches, delays, successes, and failures, with text,
//! JSON, and DOT renderers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::term::VarId;

/// What a trace node records.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceKind {
    Goal,
    Unify,
    Diseq,
    Branch,
    Delay,
    Force,
    Success,
    Failure,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceKind::Goal => "goal",
            TraceKind::Unify => "unify",
            TraceKind::Diseq => "diseq",
            TraceKind::Branch => "branch",
            TraceKind::Delay => "delay",
            TraceKind::Force => "force",
            TraceKind::Success => "success",
            TraceKind::Failure => "failure",
        }
    }
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One recorded event. Ids are dense in creation order; the step counter is
/// global and strictly increasing with id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceNode {
    pub id: u32,
    pub parent: Option<u32>,
    pub step: u64,
    pub kind: TraceKind,
    pub label: String,
    pub detail: String,
}

/// Recording bounds. Nodes past `max_nodes`, or deeper than `max_depth`,
/// are dropped and the trace is marked truncated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TraceLimits {
    pub max_depth: u32,
    pub max_nodes: u32,
}

impl Default for TraceLimits {
    fn default() -> Self {
        TraceLimits {
            max_depth: 256,
            max_nodes: 100_000,
        }
    }
}

/// Where a new node hangs: at the root, under a node, or nowhere because
/// an ancestor was already dropped.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParentRef {
    Root,
    Node(u32),
    Suppressed,
}

impl ParentRef {
    fn as_option(self) -> Option<u32> {
        match self {
            ParentRef::Node(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Debug)]
struct TraceBuf {
    nodes: Vec<TraceNode>,
    depths: Vec<u32>,
    truncated: bool,
    limits: TraceLimits,
    steps: u64,
    var_names: HashMap<VarId, String>,
}

/// Shared handle to a run's trace buffer. A disabled sink records nothing
/// and costs nothing.
#[derive(Clone, Debug)]
pub struct TraceSink(Option<Arc<Mutex<TraceBuf>>>);

impl TraceSink {
    pub fn disabled() -> Self {
        TraceSink(None)
    }

    pub fn enabled(limits: TraceLimits) -> Self {
        TraceSink(Some(Arc::new(Mutex::new(TraceBuf {
            nodes: Vec::new(),
            depths: Vec::new(),
            truncated: false,
            limits,
            steps: 0,
            var_names: HashMap::new(),
        }))))
    }

    pub fn is_enabled(&self) -> bool {
        self.0.is_some()
    }

    /// Appends a node unless the sink is disabled or limits were hit.
    /// Returns the reference under which children of this event nest.
    pub fn record(
        &self,
        parent: ParentRef,
        kind: TraceKind,
        label: impl Into<String>,
        detail: impl Into<String>,
    ) -> ParentRef {
        let Some(buf) = &self.0 else {
            return ParentRef::Suppressed;
        };
        let mut b = buf.lock().expect("trace sink lock");
        let step = b.steps;
        b.steps += 1;
        if matches!(parent, ParentRef::Suppressed) {
            b.truncated = true;
            return ParentRef::Suppressed;
        }
        if b.nodes.len() as u32 >= b.limits.max_nodes {
            b.truncated = true;
            return ParentRef::Suppressed;
        }
        let depth = match parent {
            ParentRef::Root => 0,
            ParentRef::Node(p) => b.depths[p as usize] + 1,
            ParentRef::Suppressed => unreachable!(),
        };
        if depth > b.limits.max_depth {
            b.truncated = true;
            return ParentRef::Suppressed;
        }
        let id = b.nodes.len() as u32;
        b.nodes.push(TraceNode {
            id,
            parent: parent.as_option(),
            step,
            kind,
            label: label.into(),
            detail: detail.into(),
        });
        b.depths.push(depth);
        ParentRef::Node(id)
    }

    /// Associates a user-facing name with a variable for detail rendering.
    pub fn set_var_name(&self, v: VarId, name: impl Into<String>) {
        if let Some(buf) = &self.0 {
            buf.lock().expect("trace sink lock").var_names.insert(v, name.into());
        }
    }

    /// The display name of a variable: the registered name, or `vN`.
    pub fn var_name(&self, v: VarId) -> String {
        if let Some(buf) = &self.0 {
            if let Some(name) = buf.lock().expect("trace sink lock").var_names.get(&v) {
                return name.clone();
            }
        }
        v.to_string()
    }

    /// The tree recorded so far.
    pub fn snapshot(&self) -> TraceTree {
        match &self.0 {
            None => TraceTree::default(),
            Some(buf) => {
                let b = buf.lock().expect("trace sink lock");
                TraceTree {
                    nodes: b.nodes.clone(),
                    truncated: b.truncated,
                }
            }
        }
    }
}

/// Options for [`TraceTree::render_text`].
#[derive(Clone, Copy, Default, Debug)]
pub struct RenderOpts {
    pub max_depth: Option<u32>,
    pub hide_failures: bool,
}

/// A completed (immutable) trace forest.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct TraceTree {
    pub nodes: Vec<TraceNode>,
    pub truncated: bool,
}

impl TraceTree {
    pub fn count_kind(&self, kind: TraceKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    fn children(&self) -> Vec<Vec<u32>> {
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); self.nodes.len()];
        for n in &self.nodes {
            if let Some(p) = n.parent {
                children[p as usize].push(n.id);
            }
        }
        children
    }

    fn roots(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .map(|n| n.id)
            .collect()
    }

    /// Indented tree, one node per line: `[kind] label — detail`.
    pub fn render_text(&self, opts: &RenderOpts) -> String {
        let children = self.children();
        // keep a node iff some leaf below it is not a failure
        let mut keep = vec![true; self.nodes.len()];
        if opts.hide_failures {
            for id in (0..self.nodes.len()).rev() {
                keep[id] = if children[id].is_empty() {
                    self.nodes[id].kind != TraceKind::Failure
                } else {
                    children[id].iter().any(|&c| keep[c as usize])
                };
            }
        }
        let mut out = String::new();
        let mut stack: Vec<(u32, u32)> = self.roots().into_iter().rev().map(|r| (r, 0)).collect();
        while let Some((id, depth)) = stack.pop() {
            if !keep[id as usize] {
                continue;
            }
            if let Some(max) = opts.max_depth {
                if depth > max {
                    continue;
                }
            }
            let n = &self.nodes[id as usize];
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push('[');
            out.push_str(n.kind.as_str());
            out.push_str("] ");
            out.push_str(&n.label);
            if !n.detail.is_empty() {
                out.push_str(" — ");
                out.push_str(&n.detail);
            }
            out.push('\n');
            for &c in children[id as usize].iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }

    /// UTF-8 JSON bytes with the fixed field order
    /// `{"version":1,"truncated":…,"nodes":[{"id","parent","step","kind","label","detail"}]}`.
    pub fn export_json(&self) -> Vec<u8> {
        use serde_json::{json, Map, Value};
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let mut m = Map::new();
                m.insert("id".into(), json!(n.id));
                m.insert(
                    "parent".into(),
                    n.parent.map(|p| json!(p)).unwrap_or(Value::Null),
                );
                m.insert("step".into(), json!(n.step));
                m.insert("kind".into(), json!(n.kind.as_str()));
                m.insert("label".into(), json!(n.label));
                m.insert("detail".into(), json!(n.detail));
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        root.insert("version".into(), json!(1));
        root.insert("truncated".into(), json!(self.truncated));
        root.insert("nodes".into(), Value::Array(nodes));
        serde_json::to_vec(&Value::Object(root)).expect("trace serialization")
    }

    /// Graphviz digraph; failures are boxes, successes doublecircles.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph trace {\n");
        for n in &self.nodes {
            let shape = match n.kind {
                TraceKind::Failure => "box",
                TraceKind::Success => "doublecircle",
                _ => "ellipse",
            };
            let mut label = format!("[{}] {}", n.kind.as_str(), n.label);
            label = label.replace('\\', "\\\\").replace('"', "\\\"");
            out.push_str(&format!("  n{} [label=\"{}\" shape={}];\n", n.id, label, shape));
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                out.push_str(&format!("  n{} -> n{};\n", p, n.id));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Drops nodes deeper than `max_depth` and renumbers ids densely.
    pub fn prune(&self, max_depth: u32) -> TraceTree {
        let mut depths: Vec<u32> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let d = match n.parent {
                None => 0,
                Some(p) => depths[p as usize] + 1,
            };
            depths.push(d);
        }
        let mut id_map: HashMap<u32, u32> = HashMap::new();
        let mut nodes = Vec::new();
        for n in &self.nodes {
            if depths[n.id as usize] > max_depth {
                continue;
            }
            let new_id = nodes.len() as u32;
            id_map.insert(n.id, new_id);
            nodes.push(TraceNode {
                id: new_id,
                parent: n.parent.map(|p| id_map[&p]),
                ..n.clone()
            });
        }
        let removed = nodes.len() < self.nodes.len();
        TraceTree {
            nodes,
            truncated: self.truncated || removed,
        }
    }

    /// Concatenates trace forests, renumbering ids and steps so both stay
    /// strictly increasing.
    pub fn concat(trees: impl IntoIterator<Item = TraceTree>) -> TraceTree {
        let mut nodes: Vec<TraceNode> = Vec::new();
        let mut truncated = false;
        let mut step_base: u64 = 0;
        for t in trees {
            let id_base = nodes.len() as u32;
            truncated |= t.truncated;
            let mut max_step = 0;
            for n in &t.nodes {
                max_step = max_step.max(n.step + 1);
                nodes.push(TraceNode {
                    id: id_base + n.id,
                    parent: n.parent.map(|p| id_base + p),
                    step: step_base + n.step,
                    ..n.clone()
                });
            }
            step_base += max_step;
        }
        TraceTree { nodes, truncated }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sink_with(limits: TraceLimits) -> TraceSink {
        TraceSink::enabled(limits)
    }

    #[test]
    fn record_assigns_dense_ids() {
        let sink = sink_with(TraceLimits::default());
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "g", "");
        let b = sink.record(a, TraceKind::Unify, "==", "v0 := 5");
        assert_eq!(a, ParentRef::Node(0));
        assert_eq!(b, ParentRef::Node(1));
        let t = sink.snapshot();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[0].parent, None);
        assert_eq!(t.nodes[1].parent, Some(0));
        assert!(t.nodes[0].step < t.nodes[1].step);
        assert!(!t.truncated);
    }

    #[test]
    fn max_nodes_truncates() {
        let sink = sink_with(TraceLimits {
            max_depth: 16,
            max_nodes: 1,
        });
        sink.record(ParentRef::Root, TraceKind::Goal, "a", "");
        let second = sink.record(ParentRef::Root, TraceKind::Goal, "b", "");
        assert_eq!(second, ParentRef::Suppressed);
        let t = sink.snapshot();
        assert_eq!(t.nodes.len(), 1);
        assert!(t.truncated);
    }

    #[test]
    fn disabled_sink_records_nothing() {
        let sink = TraceSink::disabled();
        let r = sink.record(ParentRef::Root, TraceKind::Goal, "a", "");
        assert_eq!(r, ParentRef::Suppressed);
        assert!(sink.snapshot().nodes.is_empty());
    }

    #[test]
    fn depth_limit_suppresses_descendants() {
        let sink = sink_with(TraceLimits {
            max_depth: 0,
            max_nodes: 100,
        });
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "root", "");
        let child = sink.record(a, TraceKind::Unify, "==", "");
        assert_eq!(child, ParentRef::Suppressed);
        let grandchild = sink.record(child, TraceKind::Unify, "==", "");
        assert_eq!(grandchild, ParentRef::Suppressed);
        let t = sink.snapshot();
        assert_eq!(t.nodes.len(), 1);
        assert!(t.truncated);
    }

    #[test]
    fn render_text_formats() {
        let sink = sink_with(TraceLimits::default());
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "appendo", "(appendo () () ())");
        sink.record(a, TraceKind::Unify, "==", "v0 := 5");
        let text = sink.snapshot().render_text(&RenderOpts::default());
        assert_eq!(
            text,
            "[goal] appendo — (appendo () () ())\n  [unify] == — v0 := 5\n"
        );
        assert_eq!(TraceTree::default().render_text(&RenderOpts::default()), "");
    }

    #[test]
    fn hide_failures_drops_failed_subtrees() {
        let sink = sink_with(TraceLimits::default());
        let root = sink.record(ParentRef::Root, TraceKind::Goal, "g", "");
        let b0 = sink.record(root, TraceKind::Branch, "0", "");
        sink.record(b0, TraceKind::Failure, "==", "1 does not match 2");
        let b1 = sink.record(root, TraceKind::Branch, "1", "");
        sink.record(b1, TraceKind::Unify, "==", "v0 := 2");
        let text = sink.snapshot().render_text(&RenderOpts {
            hide_failures: true,
            max_depth: None,
        });
        assert!(!text.contains("[failure]"));
        assert!(!text.contains("[branch] 0"));
        assert!(text.contains("[branch] 1"));
    }

    #[test]
    fn json_schema_and_round_trip() {
        assert_eq!(
            TraceTree::default().export_json(),
            br#"{"version":1,"truncated":false,"nodes":[]}"#.to_vec()
        );
        let sink = sink_with(TraceLimits::default());
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "g", "d");
        sink.record(a, TraceKind::Success, "answer", "q = 5");
        let bytes = sink.snapshot().export_json();
        let parsed: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(serde_json::to_vec(&parsed).unwrap(), bytes);
        assert_eq!(parsed["nodes"][0]["id"], 0);
        assert_eq!(parsed["nodes"][1]["parent"], 0);
        assert_eq!(parsed["nodes"][1]["kind"], "success");
    }

    #[test]
    fn dot_output() {
        assert_eq!(TraceTree::default().export_dot(), "digraph trace {\n}\n");
        let sink = sink_with(TraceLimits::default());
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "g", "");
        sink.record(a, TraceKind::Success, "answer", "");
        let dot = sink.snapshot().export_dot();
        assert!(dot.contains("doublecircle"));
        assert_eq!(dot.matches(" -> ").count(), 1);
    }

    #[test]
    fn prune_renumbers_densely() {
        let sink = sink_with(TraceLimits::default());
        let a = sink.record(ParentRef::Root, TraceKind::Goal, "a", "");
        let b = sink.record(a, TraceKind::Branch, "0", "");
        sink.record(b, TraceKind::Unify, "==", "");
        sink.record(ParentRef::Root, TraceKind::Goal, "z", "");
        let t = sink.snapshot();

        let only_roots = t.prune(0);
        assert_eq!(only_roots.nodes.len(), 2);
        assert!(only_roots.truncated);
        assert_eq!(only_roots.nodes[1].id, 1);
        assert_eq!(only_roots.nodes[1].label, "z");

        let identity = t.prune(10);
        assert_eq!(identity.nodes, t.nodes);
        for n in &identity.nodes {
            if let Some(p) = n.parent {
                assert!(p < n.id);
            }
        }
    }
}
