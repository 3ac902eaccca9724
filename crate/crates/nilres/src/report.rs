//! JSON report envelope shared by every CLI command: a fixed top level
//! with serializable result payloads; big integers travel as strings.

use serde::Serialize;
use serde_json::{json, Value};

use crate::pcp::PcPresentation;
use crate::subgroup::SubgroupBasis;
use crate::witness::WitnessCertificate;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub group: String,
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(group: &str, command: &str, params: Value) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            group: group.to_string(),
            command: command.to_string(),
            params,
            results: Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn results(mut self, r: impl Serialize) -> Self {
        self.results = serde_json::to_value(r).expect("serializable results");
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

/// A subgroup as its echelon rows, each row a word in the generators.
pub fn subgroup_json(p: &PcPresentation, s: &SubgroupBasis) -> Value {
    let rows: Vec<String> = s.rows().iter().map(|r| p.element_string(r)).collect();
    json!({
        "rows": rows,
        "index": s.index(p).map(|i| i.to_string()),
    })
}

/// A witness certificate with its kernel and morphism images embedded so
/// the result is independently checkable.
pub fn certificate_json(p: &PcPresentation, c: &WitnessCertificate) -> Value {
    let images: Vec<String> = (0..p.rank())
        .map(|i| {
            let g = c.kernel.reduce(p, &p.generator(i));
            c.quotient.element_string(&g)
        })
        .collect();
    json!({
        "prime": c.prime.to_string(),
        "order": c.order.to_string(),
        "exact": c.exact,
        "kernel": subgroup_json(p, &c.kernel),
        "generator_images": images,
        "element_image": c.quotient.element_string(&c.image),
    })
}

#[cfg(test)]
mod report_tests {
    use super::*;
    use crate::catalog;
    use crate::structure::power_subgroup_closure;
    use num_bigint::BigInt;

    #[test]
    fn envelope_shape() {
        let r = Report::new("heisenberg", "depth", json!({"element": "x3"}))
            .results(json!({"order": "8"}));
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["tool_version", "group", "command", "params", "results", "warnings"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["results"]["order"], "8");
    }

    #[test]
    fn subgroup_serialization() {
        let p = catalog::heisenberg().unwrap();
        let s = power_subgroup_closure(&p, &BigInt::from(3), None);
        let v = subgroup_json(&p, &s);
        assert_eq!(v["index"], "27");
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    }
}
