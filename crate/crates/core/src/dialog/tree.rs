use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::DialogError;
use crate::nlu::SlotKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgentKind {
    Dialog,
    Request,
    Inform,
    Execute,
    Step,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentNode {
    pub id: String,
    pub kind: AgentKind,
    pub children: Vec<AgentNode>,
    pub owned_concepts: BTreeSet<SlotKey>,
    /// Request only. Any one of them completes the node, and binding one
    /// clears the others.
    pub request_targets: Vec<SlotKey>,
    /// Execute only.
    pub executor_ref: Option<String>,
    /// Execute only: rebinding any of these keys re-runs the executor.
    pub depends_on: Vec<SlotKey>,
    /// Inform only: the concept this node reads back and waits on.
    pub confirms: Option<SlotKey>,
    pub prompt_key: String,
}

impl AgentNode {
    fn leaf(id: &str, kind: AgentKind, prompt_key: &str) -> Self {
        AgentNode {
            id: id.to_string(),
            kind,
            children: Vec::new(),
            owned_concepts: BTreeSet::new(),
            request_targets: Vec::new(),
            executor_ref: None,
            depends_on: Vec::new(),
            confirms: None,
            prompt_key: prompt_key.to_string(),
        }
    }

    pub fn dialog(
        id: &str,
        owned: impl IntoIterator<Item = SlotKey>,
        children: Vec<AgentNode>,
    ) -> Self {
        AgentNode {
            children,
            owned_concepts: owned.into_iter().collect(),
            ..Self::leaf(id, AgentKind::Dialog, "")
        }
    }

    pub fn request(id: &str, targets: &[SlotKey], prompt_key: &str) -> Self {
        AgentNode {
            request_targets: targets.to_vec(),
            ..Self::leaf(id, AgentKind::Request, prompt_key)
        }
    }

    pub fn inform(id: &str, prompt_key: &str) -> Self {
        Self::leaf(id, AgentKind::Inform, prompt_key)
    }

    /// An Inform that reads back `key` and waits for yes, no or a correction.
    pub fn confirm(id: &str, key: SlotKey, prompt_key: &str) -> Self {
        AgentNode {
            confirms: Some(key),
            ..Self::leaf(id, AgentKind::Inform, prompt_key)
        }
    }

    pub fn execute(id: &str, executor_ref: &str, depends_on: &[SlotKey]) -> Self {
        AgentNode {
            executor_ref: Some(executor_ref.to_string()),
            depends_on: depends_on.to_vec(),
            ..Self::leaf(id, AgentKind::Execute, "")
        }
    }

    pub fn step(id: &str, prompt_key: &str) -> Self {
        Self::leaf(id, AgentKind::Step, prompt_key)
    }

    pub fn with_owned(mut self, owned: impl IntoIterator<Item = SlotKey>) -> Self {
        self.owned_concepts.extend(owned);
        self
    }
}

/// A validated agent tree, flattened in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskTree {
    root: AgentNode,
    /// Preorder; each copy has its children removed.
    nodes: Vec<AgentNode>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    index: BTreeMap<String, usize>,
}

impl TaskTree {
    pub fn new(root: AgentNode) -> Result<Self, DialogError> {
        let mut tree = TaskTree {
            root: root.clone(),
            nodes: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            index: BTreeMap::new(),
        };
        tree.flatten(&root, None)?;
        tree.validate()?;
        Ok(tree)
    }

    fn flatten(&mut self, node: &AgentNode, parent: Option<usize>) -> Result<usize, DialogError> {
        let i = self.nodes.len();
        if self.index.insert(node.id.clone(), i).is_some() {
            return Err(DialogError::DuplicateId(node.id.clone()));
        }
        self.nodes.push(AgentNode {
            children: Vec::new(),
            ..node.clone()
        });
        self.parent.push(parent);
        self.children.push(Vec::new());
        for child in &node.children {
            let c = self.flatten(child, Some(i))?;
            self.children[i].push(c);
        }
        Ok(i)
    }

    fn validate(&self) -> Result<(), DialogError> {
        let bad = |id: &str, reason: String| DialogError::Invalid {
            id: id.to_string(),
            reason,
        };
        let mut owner: BTreeMap<SlotKey, &str> = BTreeMap::new();
        for n in &self.nodes {
            for &k in &n.owned_concepts {
                if let Some(other) = owner.insert(k, &n.id) {
                    return Err(bad(&n.id, format!("{k} is already owned by {other}")));
                }
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let active = self.active_at(i);
            if n.kind != AgentKind::Dialog && !self.children[i].is_empty() {
                return Err(bad(&n.id, "only dialog nodes have children".into()));
            }
            match n.kind {
                AgentKind::Request if n.request_targets.is_empty() => {
                    return Err(bad(&n.id, "request without a target".into()));
                }
                AgentKind::Execute if n.executor_ref.is_none() => {
                    return Err(bad(&n.id, "execute without an executor".into()));
                }
                _ => {}
            }
            if n.kind != AgentKind::Dialog
                && n.kind != AgentKind::Execute
                && n.prompt_key.is_empty()
            {
                return Err(bad(&n.id, "missing prompt key".into()));
            }
            for k in n.request_targets.iter().chain(&n.confirms) {
                if !active.contains(k) {
                    return Err(bad(&n.id, format!("{k} is not active here")));
                }
            }
            for k in &n.depends_on {
                if !owner.contains_key(k) {
                    return Err(bad(&n.id, format!("depends on {k}, which no node owns")));
                }
            }
        }
        Ok(())
    }

    pub fn root(&self) -> &AgentNode {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `i` in traversal order, without its children.
    pub fn node(&self, i: usize) -> &AgentNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[AgentNode] {
        &self.nodes
    }

    pub fn position(&self, id: &str) -> Result<usize, DialogError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| DialogError::UnknownNode(id.to_string()))
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Concepts owned by node `i` and every ancestor.
    pub fn active_at(&self, i: usize) -> BTreeSet<SlotKey> {
        let mut out = BTreeSet::new();
        let mut at = Some(i);
        while let Some(n) = at {
            out.extend(self.nodes[n].owned_concepts.iter().copied());
            at = self.parent[n];
        }
        out
    }

    pub fn active_concepts(&self, id: &str) -> Result<BTreeSet<SlotKey>, DialogError> {
        Ok(self.active_at(self.position(id)?))
    }
}
