use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    Action, AgentKind, ConceptStore, ConceptValue, DialogError, EngineOutput, Fill, Payload, Speak,
    StepItem, TaskTree, CLARIFY_SUFFIX, HELP_SUFFIX, NO_ALTERNATIVE, PAUSE_ACK, STEP_REPROMPT,
};
use crate::nlu::SlotKey;

/// Strongest first; one control key acts per turn.
pub const CONTROL_PRECEDENCE: [SlotKey; 7] = [
    SlotKey::Restart,
    SlotKey::Pause,
    SlotKey::Repeat,
    SlotKey::Change,
    SlotKey::Continue,
    SlotKey::No,
    SlotKey::Yes,
];

/// Split fills into control and content keys, keeping their order.
pub fn control_slots(fills: Vec<Fill>) -> (Vec<Fill>, Vec<Fill>) {
    fills.into_iter().partition(|f| f.key.is_control())
}

pub fn strongest_control(control: &[Fill]) -> Option<SlotKey> {
    CONTROL_PRECEDENCE
        .into_iter()
        .find(|k| control.iter().any(|f| f.key == *k))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindResult {
    pub bound: Vec<SlotKey>,
    pub ignored: Vec<SlotKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCursor {
    pub node: usize,
    pub steps: Vec<StepItem>,
    /// In `0..=steps.len()`.
    pub index: usize,
}

/// Dialog state over a shared task tree.
#[derive(Debug, Clone)]
pub struct DialogEngine {
    tree: Arc<TaskTree>,
    /// The node the engine is waiting at.
    current: Option<usize>,
    /// Flags for Inform, Execute and Step nodes; Request and Dialog
    /// completion is derived.
    done: Vec<bool>,
    concepts: ConceptStore,
    cursor: Option<StepCursor>,
    payloads: BTreeMap<usize, Payload>,
    turn: u32,
    no_parse: u32,
    last_spoken: EngineOutput,
    /// Read-backs spoken in the last output; a NO in the next turn
    /// rejects one of them.
    pending: Vec<usize>,
    /// False for turns whose output must not replace `last_spoken`.
    record: bool,
    ended: bool,
}

impl DialogEngine {
    pub fn new(tree: Arc<TaskTree>) -> Self {
        let n = tree.len();
        DialogEngine {
            tree,
            current: None,
            done: vec![false; n],
            concepts: ConceptStore::default(),
            cursor: None,
            payloads: BTreeMap::new(),
            turn: 0,
            no_parse: 0,
            last_spoken: EngineOutput::default(),
            pending: Vec::new(),
            record: true,
            ended: false,
        }
    }

    pub fn tree(&self) -> &TaskTree {
        &self.tree
    }

    pub fn concepts(&self) -> &ConceptStore {
        &self.concepts
    }

    pub fn turn(&self) -> u32 {
        self.turn
    }

    pub fn ended(&self) -> bool {
        self.ended
    }

    pub fn step_cursor(&self) -> Option<&StepCursor> {
        self.cursor.as_ref()
    }

    pub fn current_node(&self) -> Option<&str> {
        self.current.map(|i| self.tree.node(i).id.as_str())
    }

    pub fn active_concepts(&self, node_id: &str) -> Result<BTreeSet<SlotKey>, DialogError> {
        self.tree.active_concepts(node_id)
    }

    fn complete_at(&self, i: usize) -> bool {
        let node = self.tree.node(i);
        match node.kind {
            AgentKind::Request => node
                .request_targets
                .iter()
                .any(|k| self.concepts.contains(*k)),
            AgentKind::Dialog => self.tree.children(i).iter().all(|&c| self.complete_at(c)),
            _ => self.done[i],
        }
    }

    pub fn is_complete(&self, node_id: &str) -> Result<bool, DialogError> {
        Ok(self.complete_at(self.tree.position(node_id)?))
    }

    fn first_incomplete(&self) -> Option<usize> {
        (0..self.tree.len())
            .find(|&i| self.tree.node(i).kind != AgentKind::Dialog && !self.complete_at(i))
    }

    fn speak(&self, i: usize, prompt_key: &str) -> Action {
        let concepts = self
            .tree
            .active_at(i)
            .into_iter()
            .filter_map(|k| self.concepts.value(k).map(|v| (k, v.clone())))
            .collect();
        let node = self.tree.node(i);
        let payload = self.payloads.get(&i).cloned();
        let prompt_key = match payload.as_ref().and_then(|p| p.prompt_key.as_deref()) {
            Some(over) if prompt_key == node.prompt_key => over,
            _ => prompt_key,
        };
        Action::Speak(Speak {
            prompt_key: prompt_key.to_string(),
            node_id: node.id.clone(),
            concepts,
            payload,
            step: None,
        })
    }

    fn speak_step(&self, cursor: &StepCursor) -> Action {
        let item = &cursor.steps[cursor.index];
        match self.speak(cursor.node, &item.prompt_key) {
            Action::Speak(s) => Action::Speak(Speak {
                payload: Some(item.payload.clone()),
                step: Some(cursor.index),
                ..s
            }),
            other => other,
        }
    }

    /// Walk to the first incomplete leaf, emitting what each node does on
    /// the way. Stops at anything that waits: a Request, an Execute (for
    /// the caller to run) or a Step. Informs speak and complete; a
    /// read-back stays open to rejection for one turn.
    pub fn advance(&mut self) -> EngineOutput {
        let mut out = EngineOutput::default();
        if self.ended {
            return out;
        }
        loop {
            let Some(i) = self.first_incomplete() else {
                self.current = None;
                self.ended = true;
                out.push(Action::EndDialog);
                return out;
            };
            if self.current != Some(i) {
                self.no_parse = 0;
            }
            self.current = Some(i);
            let node = self.tree.node(i);
            match node.kind {
                AgentKind::Request => {
                    out.push(self.speak(i, &node.prompt_key));
                    return out;
                }
                AgentKind::Inform => {
                    out.push(self.speak(i, &node.prompt_key));
                    if node.confirms.is_some() {
                        self.pending.push(i);
                    }
                    self.done[i] = true;
                }
                AgentKind::Execute => {
                    out.push(Action::CallExecutor {
                        executor_ref: node.executor_ref.clone().unwrap_or_default(),
                        node_id: node.id.clone(),
                    });
                    return out;
                }
                AgentKind::Step => match &self.cursor {
                    Some(c) if c.node == i && c.index < c.steps.len() => {
                        out.push(self.speak_step(c));
                        return out;
                    }
                    _ => self.done[i] = true,
                },
                AgentKind::Dialog => unreachable!("dialog nodes are never current"),
            }
        }
    }

    /// Write every fill whose key is active at the current node.
    pub fn bind(&mut self, fills: &[Fill]) -> BindResult {
        let active = self.tree.active_at(self.current.unwrap_or(0));
        let mut result = BindResult::default();
        for fill in fills {
            if !active.contains(&fill.key) {
                result.ignored.push(fill.key);
                continue;
            }
            for i in 0..self.tree.len() {
                let node = self.tree.node(i);
                if node.request_targets.contains(&fill.key) {
                    for &other in node.request_targets.iter().filter(|k| **k != fill.key) {
                        self.concepts.remove(other);
                    }
                }
            }
            self.concepts
                .insert(fill.key, fill.value.clone(), self.turn);
            self.invalidate(fill.key);
            result.bound.push(fill.key);
        }
        result
    }

    /// Mark executors and read-backs that used `key` as not done.
    fn invalidate(&mut self, key: SlotKey) {
        for i in 0..self.tree.len() {
            let node = self.tree.node(i);
            if node.depends_on.contains(&key) || node.confirms == Some(key) {
                self.done[i] = false;
            }
        }
    }

    /// Clear `key` so its Request runs again, along with everything that
    /// depended on it.
    pub fn reopen(&mut self, key: SlotKey) {
        self.concepts.remove(key);
        self.invalidate(key);
    }

    /// Replace a concept's value without counting it as a user rebind.
    pub fn resolve_concept(&mut self, key: SlotKey, value: ConceptValue) {
        let turn = self
            .concepts
            .get(key)
            .map_or(self.turn, |e| e.filled_at_turn);
        self.concepts.insert(key, value, turn);
    }

    pub fn complete_execute(&mut self, node_id: &str) -> Result<(), DialogError> {
        let i = self.tree.position(node_id)?;
        self.done[i] = true;
        Ok(())
    }

    pub fn set_payload(&mut self, node_id: &str, payload: Payload) -> Result<(), DialogError> {
        let i = self.tree.position(node_id)?;
        self.payloads.insert(i, payload);
        Ok(())
    }

    /// Install a fresh step list and rewind to its first step.
    pub fn load_steps(&mut self, node_id: &str, steps: Vec<StepItem>) -> Result<(), DialogError> {
        let node = self.tree.position(node_id)?;
        self.done[node] = false;
        self.cursor = Some(StepCursor {
            node,
            steps,
            index: 0,
        });
        Ok(())
    }

    /// Keep `out` as the answer to a later REPEAT, if this turn may be
    /// repeated. Callers that add their own actions to a turn pass the
    /// whole turn here.
    pub fn remember(&mut self, out: &EngineOutput) {
        if self.record {
            self.last_spoken = EngineOutput {
                actions: out
                    .actions
                    .iter()
                    .filter(|a| matches!(a, Action::Speak(_)))
                    .cloned()
                    .collect(),
            };
        }
    }

    fn reset(&mut self) {
        self.current = None;
        self.done.iter_mut().for_each(|d| *d = false);
        self.concepts = ConceptStore::default();
        self.cursor = None;
        self.payloads.clear();
        self.pending.clear();
        self.no_parse = 0;
        self.ended = false;
    }

    fn notice(&mut self, prompt_key: &str) -> EngineOutput {
        self.record = false;
        let at = self.current.unwrap_or(0);
        EngineOutput {
            actions: vec![self.speak(at, prompt_key)],
        }
    }

    pub fn handle_turn(&mut self, fills: Vec<Fill>) -> EngineOutput {
        if self.ended {
            return EngineOutput::default();
        }
        self.turn += 1;
        self.record = true;
        let (control, content) = control_slots(fills);
        let top = strongest_control(&control);
        let out = self.turn_inner(top, &content);
        self.remember(&out);
        out
    }

    fn turn_inner(&mut self, top: Option<SlotKey>, content: &[Fill]) -> EngineOutput {
        if top == Some(SlotKey::Restart) {
            self.reset();
            return self.advance();
        }
        let Some(at) = self.current else {
            return self.advance();
        };
        if self.tree.node(at).kind == AgentKind::Step {
            return self.step_turn(top);
        }
        match top {
            Some(SlotKey::Pause) => return self.notice(PAUSE_ACK),
            Some(SlotKey::Repeat) => {
                self.record = false;
                return self.last_spoken.clone();
            }
            Some(SlotKey::Change) => return self.notice(NO_ALTERNATIVE),
            _ => {}
        }

        // NO rejects the read-back whose concept the turn corrects, else
        // the latest one.
        let pending = std::mem::take(&mut self.pending);
        let mut acted = false;
        if top == Some(SlotKey::No) {
            let confirmed = |i: &usize| self.tree.node(*i).confirms;
            let target = pending
                .iter()
                .rev()
                .find(|i| content.iter().any(|f| Some(f.key) == confirmed(i)))
                .or(pending.last())
                .and_then(confirmed);
            if let Some(key) = target {
                self.reopen(key);
                acted = true;
            }
        }
        let bound = self.bind(content);
        if !acted && bound.bound.is_empty() {
            let prompt = self.tree.node(at).prompt_key.clone();
            if top.is_some() {
                // A bare acknowledgment: say the current prompt again.
                return EngineOutput {
                    actions: vec![self.speak(at, &prompt)],
                };
            }
            self.no_parse += 1;
            let suffix = if self.no_parse >= 2 {
                HELP_SUFFIX
            } else {
                CLARIFY_SUFFIX
            };
            return EngineOutput {
                actions: vec![self.speak(at, &format!("{prompt}{suffix}"))],
            };
        }
        self.no_parse = 0;
        self.advance()
    }

    /// A turn while instructions are being delivered.
    fn step_turn(&mut self, top: Option<SlotKey>) -> EngineOutput {
        let Some(cursor) = self.cursor.as_mut() else {
            return self.advance();
        };
        match top {
            Some(SlotKey::Continue | SlotKey::Yes) => {
                cursor.index += 1;
                if cursor.index >= cursor.steps.len() {
                    cursor.index = cursor.steps.len();
                    let node = cursor.node;
                    self.done[node] = true;
                }
                self.advance()
            }
            Some(SlotKey::Repeat) => {
                self.record = false;
                let c = self.cursor.as_ref().expect("checked above");
                EngineOutput {
                    actions: vec![self.speak_step(c)],
                }
            }
            Some(SlotKey::Pause) => self.notice(PAUSE_ACK),
            Some(SlotKey::Change) => {
                self.record = false;
                EngineOutput {
                    actions: vec![Action::SwitchAlternative],
                }
            }
            _ => self.notice(STEP_REPROMPT),
        }
    }
}
