//! Graphviz export. Solid edges are high (true) branches, dashed edges low;
//! terminals show the leaf value with the policy annotation in parentheses.

use super::{NodeId, XaddNode, XaddStore};
use std::collections::HashMap;
use std::fmt::Write as _;

impl XaddStore {
    /// Render one diagram as a DOT graph with stable topological numbering,
    /// so identical runs produce byte-identical files.
    pub fn to_dot(&self, root: NodeId, graph_name: &str) -> String {
        let mut order = Vec::new();
        let mut index: HashMap<NodeId, usize> = HashMap::new();
        self.dot_number(root, &mut order, &mut index);

        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{graph_name}\" {{");
        let _ = writeln!(out, "  ordering=out;");
        for &id in &order {
            let n = index[&id];
            match self.node(id) {
                XaddNode::Leaf { value, ann } => {
                    let mut label = value.render(&self.registry);
                    if let Some(ann) = ann {
                        let _ = write!(label, " ({})", self.render_annotation(ann));
                    }
                    let _ = writeln!(
                        out,
                        "  n{n} [shape=box, label=\"{}\"];",
                        escape(&label)
                    );
                }
                XaddNode::Internal { dec, hi, lo } => {
                    let label = self.decision(*dec).render(&self.registry);
                    let _ = writeln!(
                        out,
                        "  n{n} [shape=ellipse, label=\"{}\"];",
                        escape(&label)
                    );
                    let _ = writeln!(out, "  n{n} -> n{} [style=solid];", index[hi]);
                    let _ = writeln!(out, "  n{n} -> n{} [style=dashed];", index[lo]);
                }
            }
        }
        let _ = writeln!(out, "}}");
        out
    }

    fn dot_number(
        &self,
        f: NodeId,
        order: &mut Vec<NodeId>,
        index: &mut HashMap<NodeId, usize>,
    ) {
        if index.contains_key(&f) {
            return;
        }
        index.insert(f, order.len());
        order.push(f);
        if let XaddNode::Internal { hi, lo, .. } = *self.node(f) {
            self.dot_number(hi, order, index);
            self.dot_number(lo, order, index);
        }
    }

    /// Compact text for a policy annotation: action name plus each
    /// parameter's maximizer, flattening case-valued maximizers into
    /// `{cond & ...: expr; ...}`.
    pub fn render_annotation(&self, ann: &super::Annotation) -> String {
        let mut parts = Vec::new();
        if let Some(action) = &ann.action {
            parts.push(action.clone());
        }
        for &(v, node) in &ann.params {
            let name = self.registry.name(v);
            parts.push(format!("{name} = {}", self.render_case(node)));
        }
        parts.join("; ")
    }

    /// Render a diagram as inline case text; single leaves render bare.
    pub fn render_case(&self, root: NodeId) -> String {
        if let XaddNode::Leaf { value, .. } = self.node(root) {
            return value.render(&self.registry);
        }
        let mut cases = Vec::new();
        for (path, leaf) in self.export_paths(root) {
            let conds: Vec<String> = path
                .iter()
                .map(|&(dec, branch)| {
                    let d = self.decision(dec).render(&self.registry);
                    if branch {
                        d
                    } else {
                        format!("!({d})")
                    }
                })
                .collect();
            if let XaddNode::Leaf { value, .. } = self.node(leaf) {
                cases.push(format!(
                    "{}: {}",
                    conds.join(" & "),
                    value.render(&self.registry)
                ));
            }
        }
        format!("{{{}}}", cases.join("; "))
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
