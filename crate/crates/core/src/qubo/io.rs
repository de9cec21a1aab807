//! Canonical QUBO interchange: a JSON document and a COO text dump.
//!
//! Both writers sort everything and print coefficients with exactly three
//! fractional digits, so equal QUBOs serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Qubo, QuboBuilder, QuboError};
use crate::fixed::Milli;
use crate::graph::NodeId;

/// Wire form of a [`Qubo`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuboDoc {
    pub variables: Vec<NodeId>,
    pub linear: BTreeMap<NodeId, Milli>,
    pub quadratic: Vec<(NodeId, NodeId, Milli)>,
    pub offset: Milli,
}

impl From<&Qubo> for QuboDoc {
    fn from(q: &Qubo) -> Self {
        QuboDoc {
            variables: q.variables().to_vec(),
            linear: q.linear().clone(),
            quadratic: q.quadratic().iter().map(|(&(i, j), &c)| (i, j, c)).collect(),
            offset: q.offset(),
        }
    }
}

impl TryFrom<QuboDoc> for Qubo {
    type Error = QuboError;

    fn try_from(doc: QuboDoc) -> Result<Self, QuboError> {
        let mut b = QuboBuilder::new();
        b.add_variables(doc.variables.iter().copied());
        let known = |v: NodeId| {
            doc.variables
                .binary_search(&v)
                .map_err(|_| QuboError::Format(format!("term on variable {v} missing from `variables`")))
        };
        if doc.variables.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QuboError::Format("`variables` must be strictly ascending".into()));
        }
        for (&v, &c) in &doc.linear {
            known(v)?;
            b.add_linear(v, c);
        }
        let mut last = None;
        for &(i, j, c) in &doc.quadratic {
            if i >= j {
                return Err(QuboError::Format(format!("quadratic key ({i},{j}) must have i < j")));
            }
            if last.is_some_and(|p| p >= (i, j)) {
                return Err(QuboError::Format(format!("quadratic key ({i},{j}) out of order or repeated")));
            }
            last = Some((i, j));
            known(i)?;
            known(j)?;
            b.add_quadratic(i, j, c)?;
        }
        b.add_offset(doc.offset);
        Ok(b.build())
    }
}

impl Serialize for Qubo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuboDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Qubo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = QuboDoc::deserialize(d)?;
        Qubo::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Qubo {
    /// Pretty-printed canonical JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("qubo serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Qubo, QuboError> {
        serde_json::from_str(text).map_err(|e| QuboError::Format(e.to_string()))
    }
}

/// COO dump: `i j value` per term, `i == j` for linear terms, sorted by `(i, j)`.
/// The offset and full variable list ride in leading comment lines.
pub fn to_coo(q: &Qubo) -> String {
    let mut out = String::new();
    writeln!(out, "# offset {}", q.offset()).unwrap();
    let vars: Vec<String> = q.variables().iter().map(ToString::to_string).collect();
    writeln!(out, "# variables {}", vars.join(" ")).unwrap();
    let mut terms: Vec<(NodeId, NodeId, Milli)> = q.linear().iter().map(|(&v, &c)| (v, v, c)).collect();
    terms.extend(q.quadratic().iter().map(|(&(i, j), &c)| (i, j, c)));
    terms.sort_unstable_by_key(|&(i, j, _)| (i, j));
    for (i, j, c) in terms {
        writeln!(out, "{i} {j} {c}").unwrap();
    }
    out
}

pub fn from_coo(text: &str) -> Result<Qubo, QuboError> {
    let mut b = QuboBuilder::new();
    let err = |line: usize, msg: &str| QuboError::Format(format!("line {line}: {msg}"));
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("offset") {
                b.add_offset(v.trim().parse().map_err(|_| err(line_no, "bad offset"))?);
            } else if let Some(vs) = rest.strip_prefix("variables") {
                for tok in vs.split_whitespace() {
                    b.add_variable(tok.parse().map_err(|_| err(line_no, "bad variable id"))?);
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [i, j, c] = toks.as_slice() else {
            return Err(err(line_no, "expected \"i j value\""));
        };
        let i: NodeId = i.parse().map_err(|_| err(line_no, "bad id"))?;
        let j: NodeId = j.parse().map_err(|_| err(line_no, "bad id"))?;
        let c: Milli = c.parse().map_err(|e| err(line_no, &format!("{e}")))?;
        if i == j {
            b.add_linear(i, c);
        } else {
            b.add_quadratic(i, j, c)?;
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_dense_qubo;
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Qubo {
        let mut b = QuboBuilder::new();
        b.add_variables([2, 10, 3]);
        b.add_linear(10, Milli(-100)).add_linear(2, Milli(1500));
        b.add_quadratic(10, 2, Milli(-10)).unwrap();
        b.add_quadratic(2, 3, Milli(1000)).unwrap();
        b.add_offset(Milli(5));
        b.build()
    }

    #[test]
    fn json_layout() {
        let text = serde_json::to_string(&sample()).unwrap();
        assert_eq!(
            text,
            r#"{"variables":[2,3,10],"linear":{"2":"1.500","10":"-0.100"},"quadratic":[[2,3,"1.000"],[2,10,"-0.010"]],"offset":"0.005"}"#
        );
        assert_eq!(Qubo::from_json(&sample().to_json()).unwrap(), sample());
    }

    #[test]
    fn json_validation() {
        let bad_order = r#"{"variables":[1,2],"linear":{},"quadratic":[[2,1,"1.000"]],"offset":"0.000"}"#;
        assert!(Qubo::from_json(bad_order).is_err());
        let unknown = r#"{"variables":[1],"linear":{"4":"1.000"},"quadratic":[],"offset":"0.000"}"#;
        assert!(Qubo::from_json(unknown).is_err());
        let precise = r#"{"variables":[1],"linear":{"1":"1.0001"},"quadratic":[],"offset":"0.000"}"#;
        assert!(Qubo::from_json(precise).is_err());
    }

    #[test]
    fn coo_layout() {
        assert_eq!(
            to_coo(&sample()),
            "# offset 0.005\n# variables 2 3 10\n2 2 1.500\n2 3 1.000\n2 10 -0.010\n10 10 -0.100\n"
        );
        assert_eq!(from_coo(&to_coo(&sample())).unwrap(), sample());
        assert!(from_coo("1 2").is_err());
        assert!(from_coo("1 2 x").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn writers_roundtrip(n in 0u32..12, seed: u64) {
            let q = random_dense_qubo(n, 0.4, seed);
            prop_assert_eq!(Qubo::from_json(&q.to_json()).unwrap(), q.clone());
            prop_assert_eq!(from_coo(&to_coo(&q)).unwrap(), q.clone());
            prop_assert_eq!(Qubo::from_json(&q.to_json()).unwrap().to_json(), q.to_json());
        }
    }
}
