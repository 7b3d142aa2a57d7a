use crate::facts::{EffectiveRelation, FilterConfig, MethodIdx, ProgramFacts};

use super::ConceptError;

/// Binary relation between callers (objects) and callees (attributes).
/// Objects and attributes are kept in ascending id order; rows and columns
/// hold sorted indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<Vec<u32>>,
    columns: Vec<Vec<u32>>,
}

impl FormalContext {
    /// `incidence` holds `(object index, attribute index)` pairs; duplicates
    /// are merged. Both name lists must be strictly ascending.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ConceptError> {
        if objects.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConceptError::InvalidContext(
                "objects must be strictly ascending".into(),
            ));
        }
        if attributes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConceptError::InvalidContext(
                "attributes must be strictly ascending".into(),
            ));
        }
        let mut rows = vec![Vec::new(); objects.len()];
        let mut columns = vec![Vec::new(); attributes.len()];
        for (o, a) in incidence {
            if o >= objects.len() || a >= attributes.len() {
                return Err(ConceptError::InvalidContext(format!(
                    "incidence ({o}, {a}) out of range"
                )));
            }
            rows[o].push(a as u32);
            columns[a].push(o as u32);
        }
        for v in rows.iter_mut().chain(columns.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        Ok(Self {
            objects,
            attributes,
            rows,
            columns,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Attributes of object `o`.
    pub fn row(&self, o: usize) -> &[u32] {
        &self.rows[o]
    }

    /// Objects having attribute `a`.
    pub fn column(&self, a: usize) -> &[u32] {
        &self.columns[a]
    }

    pub fn incidence_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn has(&self, o: usize, a: usize) -> bool {
        self.rows[o].binary_search(&(a as u32)).is_ok()
    }
}

/// Context over the whole effective relation: every non-utility method with
/// an outgoing edge is an object, every one with an incoming edge an
/// attribute. Accessors stay in; self calls are left out.
pub fn build_context(facts: &ProgramFacts, filter: &FilterConfig) -> FormalContext {
    let rel = EffectiveRelation::new(facts, filter);
    context_from_relation(&rel)
}

pub(crate) fn context_from_relation(rel: &EffectiveRelation<'_>) -> FormalContext {
    let facts = rel.facts();
    let n = facts.method_count();
    let mut object_slot = vec![u32::MAX; n];
    let mut attribute_slot = vec![u32::MAX; n];
    let mut has_out = vec![false; n];
    let mut has_in = vec![false; n];
    for c in rel.calls().filter(|c| !c.is_self_call()) {
        has_out[c.caller.ix()] = true;
        has_in[c.callee.ix()] = true;
    }
    let mut objects = Vec::new();
    let mut attributes = Vec::new();
    for i in 0..n {
        let id = facts.method_id(MethodIdx(i as u32));
        if has_out[i] {
            object_slot[i] = objects.len() as u32;
            objects.push(id.to_string());
        }
        if has_in[i] {
            attribute_slot[i] = attributes.len() as u32;
            attributes.push(id.to_string());
        }
    }
    let pairs: Vec<(usize, usize)> = rel
        .calls()
        .filter(|c| !c.is_self_call())
        .map(|c| {
            (
                object_slot[c.caller.ix()] as usize,
                attribute_slot[c.callee.ix()] as usize,
            )
        })
        .collect();
    FormalContext::new(objects, attributes, pairs).expect("method ids are unique and ascending")
}
