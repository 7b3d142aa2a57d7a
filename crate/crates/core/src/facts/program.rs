use std::collections::{BTreeSet, HashMap};

use serde_json::Value;
use sha2::{Digest, Sha256};

use super::model::{CallEdge, FactsDocument, MethodRef, TypeRef, FACTS_SCHEMA};
use super::FactsError;

/// Dense index of a method inside one [`ProgramFacts`]. Indices follow
/// ascending method id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodIdx(pub u32);

/// Dense index of a type inside one [`ProgramFacts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeIdx(pub u32);

impl MethodIdx {
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

impl TypeIdx {
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

/// A resolved call edge in index space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Call {
    pub caller: MethodIdx,
    pub callee: MethodIdx,
    pub site_ordinal: u32,
}

impl Call {
    pub fn is_self_call(&self) -> bool {
        self.caller == self.callee
    }
}

/// Immutable model of the analyzed system. Records are held in canonical
/// order (by id), so the model does not depend on input record order.
#[derive(Clone, Debug)]
pub struct ProgramFacts {
    types: Vec<TypeRef>,
    methods: Vec<MethodRef>,
    edges: Vec<CallEdge>,
    calls: Vec<Call>,
    method_type: Vec<TypeIdx>,
    type_methods: Vec<Vec<MethodIdx>>,
    method_index: HashMap<String, MethodIdx>,
    type_index: HashMap<String, TypeIdx>,
    incoming: Vec<Vec<u32>>,
    outgoing: Vec<Vec<u32>>,
    fingerprint: String,
}

impl ProgramFacts {
    /// Parses and validates a `facts/1` JSON document.
    pub fn from_json(text: &str) -> Result<Self, FactsError> {
        let value: Value = serde_json::from_str(text).map_err(|e| FactsError::Syntax(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self, FactsError> {
        let value: Value = serde_json::from_reader(reader).map_err(|e| FactsError::Syntax(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, FactsError> {
        let file = std::fs::File::open(path).map_err(|e| FactsError::Io(path.display().to_string(), e))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    fn from_value(value: Value) -> Result<Self, FactsError> {
        let Value::Object(mut root) = value else {
            return Err(FactsError::schema("document", "expected a JSON object"));
        };
        for key in root.keys() {
            if !matches!(key.as_str(), "schema" | "types" | "methods" | "calls") {
                return Err(FactsError::schema("document", format!("unknown field `{key}`")));
            }
        }
        match root.remove("schema") {
            Some(Value::String(s)) if s == FACTS_SCHEMA => {}
            Some(other) => {
                return Err(FactsError::schema(
                    "schema",
                    format!("expected \"{FACTS_SCHEMA}\", found {other}"),
                ))
            }
            None => return Err(FactsError::schema("schema", "missing schema header")),
        }
        let types = records(&mut root, "types")?;
        let methods = records(&mut root, "methods")?;
        let calls = records(&mut root, "calls")?;
        Self::from_document(FactsDocument {
            schema: FACTS_SCHEMA.to_string(),
            types,
            methods,
            calls,
        })
    }

    /// Validates the document, resolves references and builds the indexes.
    pub fn from_document(doc: FactsDocument) -> Result<Self, FactsError> {
        if doc.schema != FACTS_SCHEMA {
            return Err(FactsError::schema(
                "schema",
                format!("expected \"{FACTS_SCHEMA}\", found \"{}\"", doc.schema),
            ));
        }
        let FactsDocument {
            mut types,
            mut methods,
            mut calls,
            ..
        } = doc;

        types.sort_by(|a, b| a.id.cmp(&b.id));
        methods.sort_by(|a, b| a.id.cmp(&b.id));

        let mut type_index = HashMap::with_capacity(types.len());
        for (i, t) in types.iter().enumerate() {
            if t.qualified_name.is_empty() {
                return Err(FactsError::schema(format!("type `{}`", t.id), "empty qualified_name"));
            }
            if !t.container.is_empty() && !t.qualified_name.starts_with(&format!("{}.", t.container)) {
                return Err(FactsError::schema(
                    format!("type `{}`", t.id),
                    format!(
                        "container `{}` is not a package prefix of `{}`",
                        t.container, t.qualified_name
                    ),
                ));
            }
            if type_index.insert(t.id.clone(), TypeIdx(i as u32)).is_some() {
                return Err(FactsError::Duplicate(format!("type `{}`", t.id)));
            }
        }

        let mut method_index = HashMap::with_capacity(methods.len());
        let mut method_type = Vec::with_capacity(methods.len());
        let mut type_methods = vec![Vec::new(); types.len()];
        for (i, m) in methods.iter().enumerate() {
            let Some(&t) = type_index.get(&m.declaring_type) else {
                return Err(FactsError::Resolution(format!(
                    "method `{}` declares unknown type `{}`",
                    m.id, m.declaring_type
                )));
            };
            if method_index.insert(m.id.clone(), MethodIdx(i as u32)).is_some() {
                return Err(FactsError::Duplicate(format!("method `{}`", m.id)));
            }
            method_type.push(t);
            type_methods[t.ix()].push(MethodIdx(i as u32));
        }

        let mut resolved = Vec::with_capacity(calls.len());
        for edge in &calls {
            let caller = *method_index.get(&edge.caller).ok_or_else(|| {
                FactsError::Resolution(format!("call edge references unknown caller `{}`", edge.caller))
            })?;
            let callee = *method_index.get(&edge.callee).ok_or_else(|| {
                FactsError::Resolution(format!("call edge references unknown callee `{}`", edge.callee))
            })?;
            resolved.push(Call {
                caller,
                callee,
                site_ordinal: edge.site_ordinal,
            });
        }
        let mut order: Vec<usize> = (0..calls.len()).collect();
        order.sort_by_key(|&i| resolved[i]);
        let resolved: Vec<Call> = order.iter().map(|&i| resolved[i]).collect();
        let mut slots: Vec<Option<CallEdge>> = calls.drain(..).map(Some).collect();
        let edges: Vec<CallEdge> = order
            .iter()
            .map(|&i| slots[i].take().expect("each edge taken once"))
            .collect();
        for (w, pair) in resolved.windows(2).enumerate() {
            if pair[0] == pair[1] {
                let e = &edges[w + 1];
                return Err(FactsError::Duplicate(format!(
                    "call edge ({} -> {}, site {})",
                    e.caller, e.callee, e.site_ordinal
                )));
            }
        }

        let mut incoming = vec![Vec::new(); methods.len()];
        let mut outgoing = vec![Vec::new(); methods.len()];
        for (i, c) in resolved.iter().enumerate() {
            outgoing[c.caller.ix()].push(i as u32);
            incoming[c.callee.ix()].push(i as u32);
        }

        let mut facts = ProgramFacts {
            types,
            methods,
            edges,
            calls: resolved,
            method_type,
            type_methods,
            method_index,
            type_index,
            incoming,
            outgoing,
            fingerprint: String::new(),
        };
        let digest = Sha256::digest(facts.to_canonical_json().as_bytes());
        facts.fingerprint = hex::encode(digest);
        Ok(facts)
    }

    pub fn types(&self) -> &[TypeRef] {
        &self.types
    }

    pub fn methods(&self) -> &[MethodRef] {
        &self.methods
    }

    pub fn edges(&self) -> &[CallEdge] {
        &self.edges
    }

    pub fn calls(&self) -> &[Call] {
        &self.calls
    }

    pub fn method_count(&self) -> usize {
        self.methods.len()
    }

    pub fn method(&self, m: MethodIdx) -> &MethodRef {
        &self.methods[m.ix()]
    }

    pub fn method_id(&self, m: MethodIdx) -> &str {
        &self.methods[m.ix()].id
    }

    pub fn ty(&self, t: TypeIdx) -> &TypeRef {
        &self.types[t.ix()]
    }

    pub fn method_by_id(&self, id: &str) -> Option<MethodIdx> {
        self.method_index.get(id).copied()
    }

    pub fn type_by_id(&self, id: &str) -> Option<TypeIdx> {
        self.type_index.get(id).copied()
    }

    pub fn declaring_type(&self, m: MethodIdx) -> TypeIdx {
        self.method_type[m.ix()]
    }

    /// Methods declared by `t`, ascending by id.
    pub fn methods_of(&self, t: TypeIdx) -> &[MethodIdx] {
        &self.type_methods[t.ix()]
    }

    /// `type.qualified_name + "." + name`.
    pub fn qualified_method_name(&self, m: MethodIdx) -> String {
        let method = self.method(m);
        format!("{}.{}", self.ty(self.declaring_type(m)).qualified_name, method.name)
    }

    /// Indices into [`calls`](Self::calls) of edges targeting `m`.
    pub fn incoming(&self, m: MethodIdx) -> &[u32] {
        &self.incoming[m.ix()]
    }

    /// Indices into [`calls`](Self::calls) of edges leaving `m`.
    pub fn outgoing(&self, m: MethodIdx) -> &[u32] {
        &self.outgoing[m.ix()]
    }

    /// Distinct callers of `m`, including `m` itself when it is self-recursive.
    pub fn callers_of(&self, m: MethodIdx) -> BTreeSet<MethodIdx> {
        self.incoming(m)
            .iter()
            .map(|&e| self.calls[e as usize].caller)
            .collect()
    }

    /// Distinct callees of `m`.
    pub fn callees_of(&self, m: MethodIdx) -> BTreeSet<MethodIdx> {
        self.outgoing(m)
            .iter()
            .map(|&e| self.calls[e as usize].callee)
            .collect()
    }

    /// Content hash of the canonical serialization.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn to_document(&self) -> FactsDocument {
        FactsDocument {
            schema: FACTS_SCHEMA.to_string(),
            types: self.types.clone(),
            methods: self.methods.clone(),
            calls: self.edges.clone(),
        }
    }

    /// Pretty JSON of the canonical document. Byte-identical for any
    /// permutation of the input records.
    pub fn to_canonical_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct View<'a> {
            schema: &'a str,
            types: &'a [TypeRef],
            methods: &'a [MethodRef],
            calls: &'a [CallEdge],
        }
        let mut out = serde_json::to_string_pretty(&View {
            schema: FACTS_SCHEMA,
            types: &self.types,
            methods: &self.methods,
            calls: &self.edges,
        })
        .expect("facts serialize");
        out.push('\n');
        out
    }
}

fn records<T: serde::de::DeserializeOwned>(
    root: &mut serde_json::Map<String, Value>,
    key: &str,
) -> Result<Vec<T>, FactsError> {
    let Some(value) = root.remove(key) else {
        return Err(FactsError::schema(key, "missing array"));
    };
    let Value::Array(items) = value else {
        return Err(FactsError::schema(key, "expected an array"));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            serde_json::from_value(item).map_err(|e| FactsError::schema(format!("{key}[{i}]"), e.to_string()))
        })
        .collect()
}
