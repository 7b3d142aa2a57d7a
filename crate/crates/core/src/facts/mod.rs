//! Program facts: types, methods and call edges of the analyzed system,
//! plus the utility and accessor filters applied before mining.

mod filter;
mod glob;
mod model;
mod program;

pub use filter::{
    effective_call_relation, is_accessor, is_utility, EffectiveRelation, ElementRef, FilterConfig, UtilityMatcher,
    COLLECTIONS_PATTERN, TEST_PATTERN,
};
pub use glob::Glob;
pub use model::{CallEdge, FactsDocument, MethodRef, Sort, SortFamily, TypeKind, TypeRef, FACTS_SCHEMA};
pub use program::{Call, MethodIdx, ProgramFacts, TypeIdx};

#[derive(Debug, thiserror::Error)]
pub enum FactsError {
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("schema violation in {record}: {message}")]
    Schema { record: String, message: String },
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("unresolved reference: {0}")]
    Resolution(String),
}

impl FactsError {
    pub(crate) fn schema(record: impl Into<String>, message: impl Into<String>) -> Self {
        FactsError::Schema {
            record: record.into(),
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(id: &str, qname: &str) -> TypeRef {
        let container = qname.rsplit_once('.').map(|(p, _)| p.to_string()).unwrap_or_default();
        TypeRef {
            id: id.into(),
            qualified_name: qname.into(),
            kind: TypeKind::Class,
            container,
        }
    }

    fn method(id: &str, ty: &str, name: &str) -> MethodRef {
        MethodRef {
            id: id.into(),
            declaring_type: ty.into(),
            name: name.into(),
            signature: "()".into(),
            is_constructor: false,
            sets_single_field: false,
            returns_single_field: false,
        }
    }

    fn edge(caller: &str, callee: &str, site: u32) -> CallEdge {
        CallEdge {
            caller: caller.into(),
            callee: callee.into(),
            site_ordinal: site,
            location: None,
        }
    }

    fn doc(types: Vec<TypeRef>, methods: Vec<MethodRef>, calls: Vec<CallEdge>) -> FactsDocument {
        FactsDocument {
            schema: FACTS_SCHEMA.into(),
            types,
            methods,
            calls,
        }
    }

    #[test]
    fn empty_document_loads() {
        let facts = ProgramFacts::from_json(r#"{"schema":"facts/1","types":[],"methods":[],"calls":[]}"#).unwrap();
        assert_eq!(facts.method_count(), 0);
        assert!(facts.calls().is_empty());
    }

    #[test]
    fn single_edge_inverts() {
        let facts = ProgramFacts::from_document(doc(
            vec![ty("T", "app.T")],
            vec![method("a", "T", "a"), method("b", "T", "b")],
            vec![edge("a", "b", 0)],
        ))
        .unwrap();
        let a = facts.method_by_id("a").unwrap();
        let b = facts.method_by_id("b").unwrap();
        assert_eq!(facts.callers_of(b).into_iter().collect::<Vec<_>>(), vec![a]);
        assert_eq!(facts.callees_of(a).into_iter().collect::<Vec<_>>(), vec![b]);
        assert!(facts.callers_of(a).is_empty());
    }

    #[test]
    fn missing_schema_header_is_rejected() {
        let err = ProgramFacts::from_json(r#"{"types":[],"methods":[],"calls":[]}"#).unwrap_err();
        assert!(matches!(err, FactsError::Schema { .. }), "{err}");
        let err = ProgramFacts::from_json(r#"{"schema":"facts/2","types":[],"methods":[],"calls":[]}"#).unwrap_err();
        assert!(err.to_string().contains("facts/1"));
    }

    #[test]
    fn unknown_fields_name_the_record() {
        let text = r#"{"schema":"facts/1","types":[{"id":"T","qualified_name":"a.T","kind":"class","container":"a"}],
            "methods":[{"id":"m","declaring_type":"T","name":"m","signature":"()","is_constructor":false,
            "sets_single_field":false,"returns_single_field":false,"color":"red"}],"calls":[]}"#;
        let err = ProgramFacts::from_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("methods[0]"), "{msg}");
        assert!(msg.contains("color"), "{msg}");

        let err =
            ProgramFacts::from_json(r#"{"schema":"facts/1","types":[],"methods":[],"calls":[],"x":1}"#).unwrap_err();
        assert!(err.to_string().contains("`x`"));
    }

    #[test]
    fn dangling_references_fail_resolution() {
        let err = ProgramFacts::from_document(doc(vec![], vec![method("m", "Nope", "m")], vec![])).unwrap_err();
        assert!(matches!(err, FactsError::Resolution(_)));
        let err = ProgramFacts::from_document(doc(
            vec![ty("T", "a.T")],
            vec![method("m", "T", "m")],
            vec![edge("m", "ghost", 0)],
        ))
        .unwrap_err();
        assert!(matches!(err, FactsError::Resolution(ref s) if s.contains("ghost")));
    }

    #[test]
    fn duplicates_rejected() {
        let err = ProgramFacts::from_document(doc(
            vec![ty("T", "a.T")],
            vec![method("m", "T", "m"), method("n", "T", "n")],
            vec![edge("m", "n", 0), edge("m", "n", 0)],
        ))
        .unwrap_err();
        assert!(matches!(err, FactsError::Duplicate(_)));
        let err = ProgramFacts::from_document(doc(vec![ty("T", "a.T"), ty("T", "a.U")], vec![], vec![])).unwrap_err();
        assert!(matches!(err, FactsError::Duplicate(_)));
    }

    #[test]
    fn container_must_prefix_qualified_name() {
        let mut t = ty("T", "a.b.T");
        t.container = "x".into();
        let err = ProgramFacts::from_document(doc(vec![t], vec![], vec![])).unwrap_err();
        assert!(matches!(err, FactsError::Schema { .. }));
    }

    #[test]
    fn utility_patterns() {
        let facts = ProgramFacts::from_document(doc(
            vec![
                ty("T", "org.test.FooTest"),
                ty("W", "util.collections.SetWrapper"),
                ty("A", "app.Core"),
            ],
            vec![
                method("t", "T", "testIt"),
                method("w", "W", "add"),
                method("a", "A", "run"),
            ],
            vec![],
        ))
        .unwrap();
        let m = |id| ElementRef::Method(facts.method_by_id(id).unwrap());
        let cfg = FilterConfig {
            utility_patterns: vec!["*.test.*".into()],
            ..Default::default()
        };
        assert!(is_utility(&facts, m("t"), &cfg));
        assert!(!is_utility(&facts, m("a"), &cfg));
        assert!(!is_utility(&facts, m("t"), &FilterConfig::none()));

        let cfg = FilterConfig {
            utility_patterns: vec!["util.collections.*".into()],
            ..Default::default()
        };
        assert!(is_utility(
            &facts,
            ElementRef::Type(facts.type_by_id("W").unwrap()),
            &cfg
        ));
        assert!(is_utility(&facts, m("w"), &cfg));

        // a bare package name selects everything in it
        let cfg = FilterConfig {
            utility_patterns: vec!["util.collections".into()],
            ..Default::default()
        };
        assert!(is_utility(&facts, m("w"), &cfg));
    }

    #[test]
    fn accessor_tests() {
        let by_name = FilterConfig {
            accessor_by_name: true,
            ..Default::default()
        };
        let by_impl = FilterConfig {
            accessor_by_impl: true,
            ..Default::default()
        };
        let getter = method("g", "T", "getTextHolder");
        assert!(is_accessor(&getter, &by_name));
        assert!(!is_accessor(&getter, &by_impl));

        let execute = method("e", "T", "execute");
        assert!(!is_accessor(&execute, &by_name));
        assert!(!is_accessor(&execute, &FilterConfig::call_analysis_default()));

        let mut view = method("v", "T", "view");
        view.returns_single_field = true;
        assert!(is_accessor(&view, &by_impl));
        assert!(!is_accessor(&view, &by_name));

        let mut ctor = method("c", "T", "setup");
        ctor.is_constructor = true;
        assert!(!is_accessor(&ctor, &by_name));
    }

    #[test]
    fn effective_relation_drops_utility_edges_only() {
        let mut getter = method("g", "A", "getX");
        getter.returns_single_field = true;
        let facts = ProgramFacts::from_document(doc(
            vec![ty("T", "org.test.FooTest"), ty("A", "app.Core")],
            vec![
                method("t", "T", "testIt"),
                method("a", "A", "run"),
                method("b", "A", "log"),
                getter,
            ],
            vec![
                edge("t", "b", 0),
                edge("a", "b", 0),
                edge("a", "g", 1),
                edge("a", "a", 2),
            ],
        ))
        .unwrap();
        let none = effective_call_relation(&facts, &FilterConfig::none());
        assert_eq!(none.len(), facts.calls().len());

        let rel = effective_call_relation(&facts, &FilterConfig::call_analysis_default());
        assert_eq!(rel.len(), 3);
        let b = facts.method_by_id("b").unwrap();
        let a = facts.method_by_id("a").unwrap();
        assert_eq!(rel.callers(b), vec![a]);
        // self edge stays in the relation but is not a caller
        assert!(rel.callers(a).is_empty());
        assert_eq!(rel.incoming(a).count(), 1);
    }
}
