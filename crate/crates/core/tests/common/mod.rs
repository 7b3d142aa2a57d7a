#![allow(dead_code)]
pub mod recorded;

use std::collections::BTreeSet;

use aspectmine::concepts::FormalContext;
use aspectmine::facts::{CallEdge, FactsDocument, MethodRef, ProgramFacts, TypeKind, TypeRef, FACTS_SCHEMA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(callees, callers)` of a concept, both ascending.
pub type Rect = (Vec<String>, Vec<String>);

/// Closes every attribute subset and keeps the distinct concepts that meet
/// the thresholds. Exponential; only for small contexts.
pub fn brute_force_concepts(ctx: &FormalContext, min_extent: usize, min_intent: usize) -> BTreeSet<Rect> {
    let n_obj = ctx.objects().len();
    let n_attr = ctx.attributes().len();
    assert!(n_attr <= 16, "brute force is for small contexts");
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << n_attr) {
        let extent: Vec<usize> = (0..n_obj)
            .filter(|&o| (0..n_attr).all(|a| mask & (1 << a) == 0 || ctx.has(o, a)))
            .collect();
        let intent: Vec<usize> = (0..n_attr).filter(|&a| extent.iter().all(|&o| ctx.has(o, a))).collect();
        if extent.len() >= min_extent && intent.len() >= min_intent {
            out.insert((
                intent.iter().map(|&a| ctx.attributes()[a].clone()).collect(),
                extent.iter().map(|&o| ctx.objects()[o].clone()).collect(),
            ));
        }
    }
    out
}

pub fn random_context(rng: &mut ChaCha8Rng, max_objects: usize, max_attributes: usize) -> FormalContext {
    let n_obj = rng.gen_range(0..=max_objects);
    let n_attr = rng.gen_range(0..=max_attributes);
    let density: f64 = rng.gen_range(0.05..0.95);
    let objects = (0..n_obj).map(|i| format!("o{i:02}")).collect();
    let attributes = (0..n_attr).map(|i| format!("a{i:02}")).collect();
    let mut incidence = Vec::new();
    for o in 0..n_obj {
        for a in 0..n_attr {
            if rng.gen_bool(density) {
                incidence.push((o, a));
            }
        }
    }
    FormalContext::new(objects, attributes, incidence).expect("valid context")
}

/// Derivation check: the extent's common attributes are the intent and the
/// intent's common objects are the extent.
pub fn is_closed(ctx: &FormalContext, callees: &[String], callers: &[String]) -> bool {
    let attr_ix: Vec<usize> = callees
        .iter()
        .map(|c| ctx.attributes().iter().position(|a| a == c).expect("known attribute"))
        .collect();
    let obj_ix: Vec<usize> = callers
        .iter()
        .map(|c| ctx.objects().iter().position(|o| o == c).expect("known object"))
        .collect();
    let common_attrs: Vec<usize> = (0..ctx.attributes().len())
        .filter(|&a| obj_ix.iter().all(|&o| ctx.has(o, a)))
        .collect();
    let common_objs: Vec<usize> = (0..ctx.objects().len())
        .filter(|&o| attr_ix.iter().all(|&a| ctx.has(o, a)))
        .collect();
    common_attrs == attr_ix && common_objs == obj_ix
}

/// Random facts document: `classes` classes of `per_class` methods spread
/// over packages, one of them a test package, with random calls.
pub fn random_document(seed: u64, classes: usize, per_class: usize, edges: usize) -> FactsDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = FactsDocument::empty();
    let mut ids = Vec::new();
    for c in 0..classes {
        let package = match c % 4 {
            0 => "app.test",
            1 => "app.util.collections",
            _ => "app.model",
        };
        let class = format!("{package}.K{c:03}");
        doc.types.push(TypeRef {
            id: class.clone(),
            qualified_name: class.clone(),
            kind: if c % 7 == 6 {
                TypeKind::Interface
            } else {
                TypeKind::Class
            },
            container: package.to_string(),
        });
        for m in 0..per_class {
            let name = match rng.gen_range(0..6) {
                0 => format!("getX{m}"),
                1 => format!("setX{m}"),
                _ => format!("run{m}"),
            };
            let id = format!("{class}.{name}#{m}");
            doc.methods.push(MethodRef {
                id: id.clone(),
                declaring_type: class.clone(),
                name,
                signature: "()".into(),
                is_constructor: m == 0,
                sets_single_field: rng.gen_bool(0.1),
                returns_single_field: rng.gen_bool(0.1),
            });
            ids.push(id);
        }
    }
    if !ids.is_empty() {
        let mut seen = BTreeSet::new();
        for _ in 0..edges {
            let caller = ids[rng.gen_range(0..ids.len())].clone();
            let callee = ids[rng.gen_range(0..ids.len())].clone();
            let ordinal = rng.gen_range(0..4u32);
            if seen.insert((caller.clone(), callee.clone(), ordinal)) {
                doc.calls.push(CallEdge {
                    caller,
                    callee,
                    site_ordinal: ordinal,
                    location: None,
                });
            }
        }
    }
    doc
}

pub fn random_facts(seed: u64, classes: usize, per_class: usize, edges: usize) -> ProgramFacts {
    ProgramFacts::from_document(random_document(seed, classes, per_class, edges)).expect("valid random facts")
}

pub fn shuffled(doc: &FactsDocument, seed: u64) -> FactsDocument {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = doc.clone();
    out.types.shuffle(&mut rng);
    out.methods.shuffle(&mut rng);
    out.calls.shuffle(&mut rng);
    out
}

pub fn schema() -> &'static str {
    FACTS_SCHEMA
}

/// Facts with `classes * per_class` methods and exactly `edges` distinct
/// call edges whose callees follow a Zipf-like law of exponent `s`, giving
/// the hub methods and shared caller groups of real systems.
pub fn skewed_facts(seed: u64, classes: usize, per_class: usize, edges: usize, s: f64) -> ProgramFacts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = FactsDocument::empty();
    let mut ids = Vec::new();
    for c in 0..classes {
        let package = format!("app.p{}", c % 20);
        let class = format!("{package}.C{c:04}");
        doc.types.push(TypeRef {
            id: class.clone(),
            qualified_name: class.clone(),
            kind: TypeKind::Class,
            container: package,
        });
        for m in 0..per_class {
            let id = format!("{class}.m{m:02}");
            doc.methods.push(MethodRef {
                id: id.clone(),
                declaring_type: class.clone(),
                name: format!("m{m:02}"),
                signature: "()".into(),
                is_constructor: false,
                sets_single_field: false,
                returns_single_field: false,
            });
            ids.push(id);
        }
    }
    let n = ids.len();
    let mut rank: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(rank.as_mut_slice(), &mut rng);
    let weights: Vec<f64> = (0..n).map(|r| 1.0 / ((r + 1) as f64).powf(s)).collect();
    let dist = rand::distributions::WeightedIndex::new(&weights).expect("positive weights");
    let mut seen = BTreeSet::new();
    while seen.len() < edges {
        let caller = rng.gen_range(0..n);
        let callee = rank[rand::distributions::Distribution::sample(&dist, &mut rng)];
        if caller != callee && seen.insert((caller, callee)) {
            doc.calls.push(CallEdge {
                caller: ids[caller].clone(),
                callee: ids[callee].clone(),
                site_ordinal: 0,
                location: None,
            });
        }
    }
    ProgramFacts::from_document(doc).expect("valid skewed facts")
}
