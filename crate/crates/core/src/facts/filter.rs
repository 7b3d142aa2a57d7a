use serde::{Deserialize, Serialize};

use super::glob::Glob;
use super::program::{Call, MethodIdx, ProgramFacts, TypeIdx};
use super::MethodRef;

/// Utility and accessor filter settings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    /// Globs over qualified names of types, methods or packages.
    #[serde(default)]
    pub utility_patterns: Vec<String>,
    /// Treat `get*` / `set*` methods (other than constructors) as accessors.
    #[serde(default)]
    pub accessor_by_name: bool,
    /// Treat methods whose body only sets or returns one field as accessors.
    #[serde(default)]
    pub accessor_by_impl: bool,
}

impl FilterConfig {
    /// No filtering at all.
    pub fn none() -> Self {
        Self::default()
    }

    /// Test classes and collection wrappers are utilities; accessors are
    /// filtered by name and by implementation. Used for fan-in and grouped calls.
    pub fn call_analysis_default() -> Self {
        Self {
            utility_patterns: vec![TEST_PATTERN.to_string(), COLLECTIONS_PATTERN.to_string()],
            accessor_by_name: true,
            accessor_by_impl: true,
        }
    }

    /// Test classes only, no accessor filtering. Used for redirections.
    pub fn redirection_default() -> Self {
        Self {
            utility_patterns: vec![TEST_PATTERN.to_string()],
            accessor_by_name: false,
            accessor_by_impl: false,
        }
    }

    pub fn accessor_filtering(&self) -> bool {
        self.accessor_by_name || self.accessor_by_impl
    }
}

pub const TEST_PATTERN: &str = "**.test.**";
pub const COLLECTIONS_PATTERN: &str = "**.util.collections.**";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementRef {
    Method(MethodIdx),
    Type(TypeIdx),
}

/// Compiled utility patterns.
#[derive(Clone, Debug)]
pub struct UtilityMatcher {
    globs: Vec<Glob>,
}

impl UtilityMatcher {
    pub fn new(cfg: &FilterConfig) -> Self {
        Self {
            globs: cfg.utility_patterns.iter().map(|p| Glob::new(p)).collect(),
        }
    }

    fn any(&self, name: &str) -> bool {
        self.globs.iter().any(|g| g.matches(name))
    }

    pub fn is_utility_type(&self, facts: &ProgramFacts, t: TypeIdx) -> bool {
        if self.globs.is_empty() {
            return false;
        }
        let ty = facts.ty(t);
        self.any(&ty.qualified_name) || (!ty.container.is_empty() && self.any(&ty.container))
    }

    pub fn is_utility_method(&self, facts: &ProgramFacts, m: MethodIdx) -> bool {
        if self.globs.is_empty() {
            return false;
        }
        self.any(&facts.qualified_method_name(m)) || self.is_utility_type(facts, facts.declaring_type(m))
    }

    pub fn is_utility(&self, facts: &ProgramFacts, element: ElementRef) -> bool {
        match element {
            ElementRef::Method(m) => self.is_utility_method(facts, m),
            ElementRef::Type(t) => self.is_utility_type(facts, t),
        }
    }
}

/// True iff the element, its declaring type or its package matches a utility pattern.
pub fn is_utility(facts: &ProgramFacts, element: ElementRef, cfg: &FilterConfig) -> bool {
    UtilityMatcher::new(cfg).is_utility(facts, element)
}

/// Getter/setter test by name and/or by body summary, as enabled in `cfg`.
pub fn is_accessor(m: &MethodRef, cfg: &FilterConfig) -> bool {
    let by_name = cfg.accessor_by_name && !m.is_constructor && (m.name.starts_with("get") || m.name.starts_with("set"));
    let by_impl = cfg.accessor_by_impl && (m.sets_single_field || m.returns_single_field);
    by_name || by_impl
}

/// The call relation with every edge touching a utility method removed.
/// Accessors are left in place; they are filtered on the candidate side only.
#[derive(Clone, Debug)]
pub struct EffectiveRelation<'a> {
    facts: &'a ProgramFacts,
    utility: Vec<bool>,
    kept: Vec<bool>,
    kept_count: usize,
}

pub fn effective_call_relation<'a>(facts: &'a ProgramFacts, cfg: &FilterConfig) -> EffectiveRelation<'a> {
    EffectiveRelation::new(facts, cfg)
}

impl<'a> EffectiveRelation<'a> {
    pub fn new(facts: &'a ProgramFacts, cfg: &FilterConfig) -> Self {
        let matcher = UtilityMatcher::new(cfg);
        let utility: Vec<bool> = (0..facts.method_count())
            .map(|i| matcher.is_utility_method(facts, MethodIdx(i as u32)))
            .collect();
        let kept: Vec<bool> = facts
            .calls()
            .iter()
            .map(|c| !utility[c.caller.ix()] && !utility[c.callee.ix()])
            .collect();
        let kept_count = kept.iter().filter(|&&k| k).count();
        Self {
            facts,
            utility,
            kept,
            kept_count,
        }
    }

    pub fn facts(&self) -> &'a ProgramFacts {
        self.facts
    }

    pub fn is_utility(&self, m: MethodIdx) -> bool {
        self.utility[m.ix()]
    }

    pub fn len(&self) -> usize {
        self.kept_count
    }

    pub fn is_empty(&self) -> bool {
        self.kept_count == 0
    }

    /// Remaining edges in canonical order.
    pub fn calls(&self) -> impl Iterator<Item = &'a Call> + '_ {
        self.facts
            .calls()
            .iter()
            .zip(self.kept.iter())
            .filter_map(|(c, &k)| k.then_some(c))
    }

    /// Remaining edges targeting `m`.
    pub fn incoming(&self, m: MethodIdx) -> impl Iterator<Item = &'a Call> + '_ {
        let calls = self.facts.calls();
        self.facts
            .incoming(m)
            .iter()
            .filter(|&&e| self.kept[e as usize])
            .map(move |&e| &calls[e as usize])
    }

    /// Remaining edges leaving `m`.
    pub fn outgoing(&self, m: MethodIdx) -> impl Iterator<Item = &'a Call> + '_ {
        let calls = self.facts.calls();
        self.facts
            .outgoing(m)
            .iter()
            .filter(|&&e| self.kept[e as usize])
            .map(move |&e| &calls[e as usize])
    }

    /// Distinct callers of `m` other than `m` itself, ascending.
    pub fn callers(&self, m: MethodIdx) -> Vec<MethodIdx> {
        // incoming edges are sorted by caller already
        let mut out: Vec<MethodIdx> = self
            .incoming(m)
            .filter(|c| !c.is_self_call())
            .map(|c| c.caller)
            .collect();
        out.dedup();
        out
    }

    /// Distinct callees of `m` other than `m` itself, ascending.
    pub fn callees(&self, m: MethodIdx) -> Vec<MethodIdx> {
        let mut out: Vec<MethodIdx> = self
            .outgoing(m)
            .filter(|c| !c.is_self_call())
            .map(|c| c.callee)
            .collect();
        out.dedup();
        out
    }
}
