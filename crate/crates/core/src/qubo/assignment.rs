use std::collections::BTreeMap;

use super::QuboError;
use crate::graph::NodeId;

/// A 0/1 value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    bits: BTreeMap<NodeId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, bool)>) -> Self {
        Assignment { bits: pairs.into_iter().collect() }
    }

    pub fn uniform(vars: &[NodeId], value: bool) -> Self {
        Self::from_pairs(vars.iter().map(|&v| (v, value)))
    }

    /// Parse a `0`/`1` string whose characters follow `order`.
    pub fn from_bitstring(order: &[NodeId], s: &str) -> Result<Self, QuboError> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != order.len() {
            return Err(QuboError::BitstringLength { expected: order.len(), got: chars.len() });
        }
        let mut bits = BTreeMap::new();
        for (&v, c) in order.iter().zip(chars) {
            let b = match c {
                '0' => false,
                '1' => true,
                other => return Err(QuboError::BitstringChar(other)),
            };
            bits.insert(v, b);
        }
        Ok(Assignment { bits })
    }

    pub fn to_bitstring(&self, order: &[NodeId]) -> Result<String, QuboError> {
        order
            .iter()
            .map(|&v| match self.get(v) {
                Some(true) => Ok('1'),
                Some(false) => Ok('0'),
                None => Err(QuboError::MissingVariable(v)),
            })
            .collect()
    }

    pub fn get(&self, v: NodeId) -> Option<bool> {
        self.bits.get(&v).copied()
    }

    pub fn set(&mut self, v: NodeId, value: bool) {
        self.bits.insert(v, value);
    }

    /// Copy with `v` negated (inserted as `true` when absent).
    pub fn flipped(&self, v: NodeId) -> Self {
        let mut out = self.clone();
        let old = out.get(v).unwrap_or(false);
        out.set(v, !old);
        out
    }

    /// Keep only the listed variables (those present).
    pub fn restrict(&self, vars: &[NodeId]) -> Self {
        Self::from_pairs(vars.iter().filter_map(|&v| self.get(v).map(|b| (v, b))))
    }

    /// Union with `other`; `other` wins on shared variables.
    pub fn extend(&mut self, other: &Assignment) {
        self.bits.extend(other.iter());
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, bool)> + '_ {
        self.bits.iter().map(|(&v, &b)| (v, b))
    }

    pub fn variables(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.values().filter(|&&b| b).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings() {
        let a = Assignment::from_bitstring(&[5, 2, 9], "101").unwrap();
        assert_eq!(a.get(5), Some(true));
        assert_eq!(a.get(2), Some(false));
        assert_eq!(a.to_bitstring(&[2, 5, 9]).unwrap(), "011");
        assert_eq!(Assignment::from_bitstring(&[1, 2], "1"), Err(QuboError::BitstringLength { expected: 2, got: 1 }));
        assert_eq!(Assignment::from_bitstring(&[1], "x"), Err(QuboError::BitstringChar('x')));
        assert_eq!(a.to_bitstring(&[7]), Err(QuboError::MissingVariable(7)));
    }

    #[test]
    fn flip_and_restrict() {
        let a = Assignment::from_pairs([(1, true), (2, false), (3, true)]);
        assert_eq!(a.flipped(2).get(2), Some(true));
        assert_eq!(a.flipped(2).get(1), Some(true));
        let r = a.restrict(&[1, 3, 8]);
        assert_eq!(r.len(), 2);
        assert_eq!(r.count_ones(), 2);
    }
}
