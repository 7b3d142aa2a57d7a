use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::facts::{CallEdge, FactsDocument, MethodRef, ProgramFacts, TypeKind, TypeRef, FACTS_SCHEMA};
use crate::redirect::RedirectionPair;

use super::TRUTH_SCHEMA;
use super::{
    Background, CallPlant, Corpus, CorpusSpec, ForgeError, GroundTruth, PlantSpec, PlantedConcern, RedirectPlant,
};

const ROOT: &str = "app";
const WRAPPER_KINDS: [&str; 4] = ["Set", "List", "Iterator", "Map"];
const WRAPPER_OPS: [&str; 4] = ["add", "contains", "iterator", "size"];

#[derive(Default)]
struct Builder {
    types: Vec<TypeRef>,
    methods: Vec<MethodRef>,
    calls: Vec<CallEdge>,
    next_site: BTreeMap<String, u32>,
}

struct MethodSpec<'a> {
    name: &'a str,
    is_constructor: bool,
    sets_single_field: bool,
    returns_single_field: bool,
}

impl<'a> MethodSpec<'a> {
    fn plain(name: &'a str) -> Self {
        Self {
            name,
            is_constructor: false,
            sets_single_field: false,
            returns_single_field: false,
        }
    }

    fn constructor(name: &'a str) -> Self {
        Self {
            is_constructor: true,
            ..Self::plain(name)
        }
    }
}

impl Builder {
    fn class(&mut self, package: &str, simple: &str) -> String {
        let qualified = format!("{package}.{simple}");
        self.types.push(TypeRef {
            id: qualified.clone(),
            qualified_name: qualified.clone(),
            kind: TypeKind::Class,
            container: package.to_string(),
        });
        qualified
    }

    fn method(&mut self, class: &str, spec: MethodSpec<'_>) -> String {
        let id = format!("{class}.{}", spec.name);
        self.methods.push(MethodRef {
            id: id.clone(),
            declaring_type: class.to_string(),
            name: spec.name.to_string(),
            signature: "()".to_string(),
            is_constructor: spec.is_constructor,
            sets_single_field: spec.sets_single_field,
            returns_single_field: spec.returns_single_field,
        });
        id
    }

    fn call(&mut self, caller: &str, callee: &str) {
        let site = self.next_site.entry(caller.to_string()).or_insert(0);
        self.calls.push(CallEdge {
            caller: caller.to_string(),
            callee: callee.to_string(),
            site_ordinal: *site,
            location: None,
        });
        *site += 1;
    }
}

struct Pools {
    /// Background methods that may call others (no accessors).
    callers: Vec<String>,
    /// Every background method.
    callees: Vec<String>,
}

impl Pools {
    fn random_callee(&self, rng: &mut ChaCha8Rng, avoid: &str) -> Option<String> {
        if self.callees.is_empty() || (self.callees.len() == 1 && self.callees[0] == avoid) {
            return None;
        }
        loop {
            let c = self.callees.choose(rng).expect("non-empty");
            if c != avoid {
                return Some(c.clone());
            }
        }
    }
}

fn check_background(bg: &Background) -> Result<(), ForgeError> {
    let ratio_ok = |x: f64| x.is_finite() && x >= 0.0;
    if !ratio_ok(bg.calls_per_method) || !ratio_ok(bg.wrapper_calls_per_method) {
        return Err(ForgeError::Background(
            "call densities must be finite and non-negative".into(),
        ));
    }
    if !(0.0..=1.0).contains(&bg.accessor_fraction) {
        return Err(ForgeError::Background("accessor_fraction must lie in [0, 1]".into()));
    }
    if bg.classes > 0 && bg.packages == 0 {
        return Err(ForgeError::Background("packages must be at least 1".into()));
    }
    Ok(())
}

fn background(b: &mut Builder, bg: &Background, rng: &mut ChaCha8Rng) -> Pools {
    let mut pools = Pools {
        callers: Vec::new(),
        callees: Vec::new(),
    };
    for c in 0..bg.classes {
        let package = format!("{ROOT}.core{}", c % bg.packages);
        let simple = format!("Class{c:04}");
        let class = b.class(&package, &simple);
        for m in 0..bg.methods_per_class {
            if m == 0 {
                let id = b.method(&class, MethodSpec::constructor(&simple));
                pools.callers.push(id.clone());
                pools.callees.push(id);
                continue;
            }
            if rng.gen_bool(bg.accessor_fraction) {
                let (name, spec) = match rng.gen_range(0..3) {
                    0 => {
                        let name = format!("getField{m:02}");
                        (name, (false, true))
                    }
                    1 => {
                        let name = format!("setField{m:02}");
                        (name, (true, false))
                    }
                    _ => {
                        let name = format!("field{m:02}");
                        (name, (false, true))
                    }
                };
                let id = b.method(
                    &class,
                    MethodSpec {
                        sets_single_field: spec.0,
                        returns_single_field: spec.1,
                        ..MethodSpec::plain(&name)
                    },
                );
                pools.callees.push(id);
            } else {
                let id = b.method(&class, MethodSpec::plain(&format!("op{m:02}")));
                pools.callers.push(id.clone());
                pools.callees.push(id);
            }
        }
    }

    let total = pools.callees.len();
    let edges = (total as f64 * bg.calls_per_method).round() as usize;
    if !pools.callers.is_empty() {
        for _ in 0..edges {
            let caller = pools.callers.choose(rng).expect("non-empty").clone();
            if let Some(callee) = pools.random_callee(rng, &caller) {
                b.call(&caller, &callee);
            }
        }
    }

    let mut wrappers = Vec::new();
    for w in 0..bg.wrapper_classes {
        let class = b.class(
            &format!("{ROOT}.util.collections"),
            &format!("{}Wrapper{w:02}", WRAPPER_KINDS[w % WRAPPER_KINDS.len()]),
        );
        for op in WRAPPER_OPS {
            wrappers.push(b.method(&class, MethodSpec::plain(op)));
        }
    }
    if !wrappers.is_empty() && !pools.callers.is_empty() {
        let n = (total as f64 * bg.wrapper_calls_per_method).round() as usize;
        for _ in 0..n {
            let caller = pools.callers.choose(rng).expect("non-empty").clone();
            let callee = wrappers.choose(rng).expect("non-empty").clone();
            b.call(&caller, &callee);
        }
    }

    for t in 0..bg.test_classes {
        let class = b.class(&format!("{ROOT}.test"), &format!("Suite{t:02}Test"));
        for m in 0..bg.methods_per_class {
            let id = b.method(&class, MethodSpec::plain(&format!("test{m:02}")));
            for _ in 0..bg.test_calls_per_method {
                if let Some(callee) = pools.random_callee(rng, &id) {
                    b.call(&id, &callee);
                }
            }
        }
    }
    pools
}

fn call_plant(
    b: &mut Builder,
    pools: &Pools,
    rng: &mut ChaCha8Rng,
    name: &str,
    spec: &CallPlant,
    check_first: bool,
) -> Result<PlantedConcern, ForgeError> {
    if spec.callees == 0 {
        return Err(ForgeError::Impossible {
            plant: name.to_string(),
            reason: "a consistent-call plant needs at least one callee".into(),
        });
    }
    let package = format!("{ROOT}.plants.{name}");
    let provider = b.class(&package, "Provider");
    let verb = if check_first { "check" } else { "notify" };
    let callees: Vec<String> = (0..spec.callees)
        .map(|i| b.method(&provider, MethodSpec::plain(&format!("{verb}{i:02}"))))
        .collect();

    let mut noise = Vec::new();
    let mut extra = Vec::new();
    if spec.decoy_callees + spec.accessor_callees > 0 {
        let context = b.class(&package, "Context");
        for i in 0..spec.decoy_callees {
            let id = b.method(&context, MethodSpec::plain(&format!("view{i:02}")));
            noise.push(id.clone());
            extra.push(id);
        }
        for i in 0..spec.accessor_callees {
            let id = b.method(
                &context,
                MethodSpec {
                    returns_single_field: true,
                    ..MethodSpec::plain(&format!("getState{i:02}"))
                },
            );
            noise.push(id.clone());
            extra.push(id);
        }
    }

    let mut callers = Vec::new();
    for i in 0..spec.concern_callers {
        let simple = format!("Command{i:02}");
        let class = b.class(&package, &simple);
        b.method(&class, MethodSpec::constructor(&simple));
        let caller = b.method(&class, MethodSpec::plain("execute"));
        if check_first {
            for c in &callees {
                b.call(&caller, c);
            }
        }
        for e in &extra {
            b.call(&caller, e);
        }
        for _ in 0..spec.work_calls {
            if let Some(w) = pools.random_callee(rng, &caller) {
                b.call(&caller, &w);
            }
        }
        if !check_first {
            for c in &callees {
                b.call(&caller, c);
            }
        }
        callers.push(caller);
    }
    for i in 0..spec.noise_callers {
        let simple = format!("Handler{i:02}");
        let class = b.class(&package, &simple);
        let handler = b.method(&class, MethodSpec::plain("actionPerformed"));
        b.call(&handler, &callees[0]);
        noise.push(handler);
    }
    Ok(PlantedConcern {
        name: name.to_string(),
        sort: if check_first {
            crate::facts::Sort::ContractEnforcement
        } else {
            crate::facts::Sort::ConsistentBehavior
        },
        callees,
        callers,
        redirector_class: None,
        target_class: None,
        pairs: Vec::new(),
        noise,
    })
}

fn redirect_plant(
    b: &mut Builder,
    pools: &Pools,
    rng: &mut ChaCha8Rng,
    name: &str,
    spec: &RedirectPlant,
) -> Result<PlantedConcern, ForgeError> {
    let impossible = |reason: String| ForgeError::Impossible {
        plant: name.to_string(),
        reason,
    };
    if spec.pairs > spec.eligible_methods {
        return Err(impossible(format!(
            "{} pairs exceed {} eligible methods",
            spec.pairs, spec.eligible_methods
        )));
    }
    if !(0.0..=1.0).contains(&spec.name_match_fraction) {
        return Err(impossible("name_match_fraction must lie in [0, 1]".into()));
    }
    let package = format!("{ROOT}.plants.{name}");
    let decorator = b.class(&package, "Decorator");
    let component = b.class(&package, "Component");
    b.method(&decorator, MethodSpec::constructor("Decorator"));
    b.method(&component, MethodSpec::constructor("Component"));
    let matched = (spec.pairs as f64 * spec.name_match_fraction).round() as usize;

    let mut pairs = Vec::new();
    for i in 0..spec.eligible_methods {
        let redirector = b.method(&decorator, MethodSpec::plain(&format!("op{i:02}")));
        if i < spec.pairs {
            let target_name = if i < matched {
                format!("op{i:02}")
            } else {
                format!("perform{i:02}")
            };
            let target = b.method(&component, MethodSpec::plain(&target_name));
            b.call(&redirector, &target);
            pairs.push(RedirectionPair { redirector, target });
        } else if let Some(w) = pools.random_callee(rng, &redirector) {
            b.call(&redirector, &w);
        }
    }
    for i in 0..2 {
        b.method(&component, MethodSpec::plain(&format!("internal{i:02}")));
    }
    pairs.sort();
    Ok(PlantedConcern {
        name: name.to_string(),
        sort: crate::facts::Sort::RedirectionLayer,
        callees: Vec::new(),
        callers: Vec::new(),
        redirector_class: Some(decorator),
        target_class: Some(component),
        pairs,
        noise: Vec::new(),
    })
}

/// Builds the corpus. The same `spec` and `seed` always give byte-identical
/// facts and truth documents.
pub fn generate(spec: &CorpusSpec, seed: u64) -> Result<Corpus, ForgeError> {
    check_background(&spec.background)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::default();
    let pools = background(&mut b, &spec.background, &mut rng);

    let mut concerns = Vec::new();
    let mut names = std::collections::BTreeSet::new();
    for (k, plant) in spec.plants.iter().enumerate() {
        let name = match plant {
            PlantSpec::ConsistentBehavior(p) | PlantSpec::ContractEnforcement(p) => p.name.clone(),
            PlantSpec::RedirectionLayer(p) => p.name.clone(),
        }
        .unwrap_or_else(|| format!("concern{k:02}"));
        if name.is_empty() || name.contains(|c: char| c == '.' || c.is_whitespace()) || !names.insert(name.clone()) {
            return Err(ForgeError::Impossible {
                plant: name,
                reason: "plant names must be unique single package segments".into(),
            });
        }
        let concern = match plant {
            PlantSpec::ConsistentBehavior(p) => call_plant(&mut b, &pools, &mut rng, &name, p, false)?,
            PlantSpec::ContractEnforcement(p) => call_plant(&mut b, &pools, &mut rng, &name, p, true)?,
            PlantSpec::RedirectionLayer(p) => redirect_plant(&mut b, &pools, &mut rng, &name, p)?,
        };
        concerns.push(concern);
    }

    let facts = ProgramFacts::from_document(FactsDocument {
        schema: FACTS_SCHEMA.to_string(),
        types: b.types,
        methods: b.methods,
        calls: b.calls,
    })?;
    let truth = GroundTruth {
        schema: TRUTH_SCHEMA.to_string(),
        fingerprint: facts.fingerprint().to_string(),
        concerns,
    };
    Ok(Corpus { facts, truth })
}
