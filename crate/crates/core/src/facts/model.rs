use serde::{Deserialize, Serialize};

pub const FACTS_SCHEMA: &str = "facts/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Interface,
}

/// A class or interface of the analyzed system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeRef {
    pub id: String,
    pub qualified_name: String,
    pub kind: TypeKind,
    /// Package path; a dot-prefix of `qualified_name` (may be empty).
    pub container: String,
}

/// A declared method together with the body summary supplied by the facts producer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodRef {
    pub id: String,
    pub declaring_type: String,
    pub name: String,
    pub signature: String,
    pub is_constructor: bool,
    /// The body only assigns one field.
    pub sets_single_field: bool,
    /// The body only returns one field reference.
    pub returns_single_field: bool,
}

/// One call site. Several edges between the same pair of methods are told
/// apart by `site_ordinal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallEdge {
    pub caller: String,
    pub callee: String,
    pub site_ordinal: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

/// The on-disk `facts/1` document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactsDocument {
    pub schema: String,
    pub types: Vec<TypeRef>,
    pub methods: Vec<MethodRef>,
    pub calls: Vec<CallEdge>,
}

impl FactsDocument {
    pub fn empty() -> Self {
        Self {
            schema: FACTS_SCHEMA.to_string(),
            ..Default::default()
        }
    }
}

/// Crosscutting concern sorts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort {
    ConsistentBehavior,
    ContractEnforcement,
    RedirectionLayer,
    RoleSuperimposition,
}

/// Sorts sharing an implementation idiom. Consistent behavior and contract
/// enforcement are only told apart by reading intent, so they form one family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortFamily {
    ConsistentCalls,
    Redirection,
    Role,
}

impl Sort {
    pub const ALL: [Sort; 4] = [
        Sort::ConsistentBehavior,
        Sort::ContractEnforcement,
        Sort::RedirectionLayer,
        Sort::RoleSuperimposition,
    ];

    pub fn family(self) -> SortFamily {
        match self {
            Sort::ConsistentBehavior | Sort::ContractEnforcement => SortFamily::ConsistentCalls,
            Sort::RedirectionLayer => SortFamily::Redirection,
            Sort::RoleSuperimposition => SortFamily::Role,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sort::ConsistentBehavior => "ConsistentBehavior",
            Sort::ContractEnforcement => "ContractEnforcement",
            Sort::RedirectionLayer => "RedirectionLayer",
            Sort::RoleSuperimposition => "RoleSuperimposition",
        }
    }
}

impl std::fmt::Display for Sort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
