use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TestId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Action,
    Test,
}

/// Where a symbol came from. `side` is `None` when the symbol is shared by both programs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Free,
    Event { side: Option<Side>, callee: String, arity: usize, texts: Vec<String> },
    Assign { side: Option<Side>, text: String },
    Cond { side: Option<Side>, text: String },
}

impl Origin {
    pub fn side(&self) -> Option<Side> {
        match self {
            Origin::Free => None,
            Origin::Event { side, .. } | Origin::Assign { side, .. } | Origin::Cond { side, .. } => *side,
        }
    }

    pub fn source_text(&self) -> String {
        match self {
            Origin::Free => String::new(),
            Origin::Event { texts, .. } => texts.join(" | "),
            Origin::Assign { text, .. } | Origin::Cond { text, .. } => text.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolInfo {
    pub name: String,
    pub kind: SymbolKind,
    pub origin: Origin,
}

/// Interning table for both sorts. Ids index the per-kind vectors, so the two id spaces
/// never overlap in meaning.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTable {
    actions: Vec<SymbolInfo>,
    tests: Vec<SymbolInfo>,
    #[serde(skip)]
    action_names: BTreeMap<String, ActionId>,
    #[serde(skip)]
    test_names: BTreeMap<String, TestId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn unique(names: &BTreeMap<String, impl Copy>, base: &str) -> String {
        if !names.contains_key(base) {
            return base.to_string();
        }
        (2..).map(|i| format!("{base}{i}")).find(|n| !names.contains_key(n)).unwrap()
    }

    /// Adds a new action; the name gets a numeric suffix if already taken.
    pub fn add_action(&mut self, name: &str, origin: Origin) -> ActionId {
        let name = Self::unique(&self.action_names, name);
        let id = ActionId(self.actions.len() as u32);
        self.action_names.insert(name.clone(), id);
        self.actions.push(SymbolInfo { name, kind: SymbolKind::Action, origin });
        id
    }

    pub fn add_test(&mut self, name: &str, origin: Origin) -> TestId {
        let name = Self::unique(&self.test_names, name);
        let id = TestId(self.tests.len() as u32);
        self.test_names.insert(name.clone(), id);
        self.tests.push(SymbolInfo { name, kind: SymbolKind::Test, origin });
        id
    }

    pub fn intern_action(&mut self, name: &str) -> ActionId {
        match self.action_names.get(name) {
            Some(&id) => id,
            None => self.add_action(name, Origin::Free),
        }
    }

    pub fn intern_test(&mut self, name: &str) -> TestId {
        match self.test_names.get(name) {
            Some(&id) => id,
            None => self.add_test(name, Origin::Free),
        }
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_names.get(name).copied()
    }

    pub fn test_by_name(&self, name: &str) -> Option<TestId> {
        self.test_names.get(name).copied()
    }

    pub fn action(&self, id: ActionId) -> &SymbolInfo {
        &self.actions[id.0 as usize]
    }

    pub fn test(&self, id: TestId) -> &SymbolInfo {
        &self.tests[id.0 as usize]
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        self.actions.get(id.0 as usize).map(|s| s.name.as_str()).unwrap_or("?")
    }

    pub fn test_name(&self, id: TestId) -> &str {
        self.tests.get(id.0 as usize).map(|s| s.name.as_str()).unwrap_or("?")
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_tests(&self) -> usize {
        self.tests.len()
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn test_ids(&self) -> impl Iterator<Item = TestId> {
        (0..self.tests.len() as u32).map(TestId)
    }

    /// Rebuilds the name indices after deserialization.
    pub fn reindex(&mut self) {
        self.action_names =
            self.actions.iter().enumerate().map(|(i, s)| (s.name.clone(), ActionId(i as u32))).collect();
        self.test_names =
            self.tests.iter().enumerate().map(|(i, s)| (s.name.clone(), TestId(i as u32))).collect();
    }

    /// One line per symbol: `name  kind  origin`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in self.actions.iter().chain(self.tests.iter()) {
            let kind = match s.kind {
                SymbolKind::Action => "action",
                SymbolKind::Test => "test",
            };
            let side = match s.origin.side() {
                Some(side) => format!("@{side}"),
                None => String::new(),
            };
            out.push_str(&format!("{:<16} {:<6} {}{}\n", s.name, kind, s.origin.source_text(), side));
        }
        out
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Action => write!(f, "action"),
            SymbolKind::Test => write!(f, "test"),
        }
    }
}
