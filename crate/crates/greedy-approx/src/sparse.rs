//! Sparse coefficient vectors over an unbounded natural index set.
//!
//! Everything downstream works in coordinates: a vector is a finite map
//! `index -> coefficient` with no stored zeros, so `support(x)` is exactly the
//! key set and structural equality is canonical. Indices are arbitrary
//! precision because the index families of interest (powers of two and three)
//! are used at exponents far beyond `u128`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// 1-based coordinate index, arbitrary precision.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index(BigUint);

/// Indices travel through JSON as decimal strings so unbounded values stay
/// bit-exact.
impl Serialize for Index {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = String::deserialize(deserializer)?;
        raw.parse()
            .map_err(|e| DeError::custom(format!("bad index {raw:?}: {e}")))
    }
}

impl Index {
    /// Fails on zero: indices are strictly positive.
    pub fn new(value: BigUint) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::InvalidIndex("0".to_string()));
        }
        Ok(Index(value))
    }

    /// Convenience constructor for literal indices.
    ///
    /// # Panics
    /// Panics on zero; use [`Index::new`] for untrusted input.
    pub fn from_u64(n: u64) -> Self {
        assert!(n >= 1, "index must be >= 1");
        Index(BigUint::from(n))
    }

    /// 2^k, exact at any exponent.
    pub fn pow2(k: u32) -> Self {
        Index(BigUint::from(2u32).pow(k))
    }

    /// 3^k, exact at any exponent.
    pub fn pow3(k: u32) -> Self {
        Index(BigUint::from(3u32).pow(k))
    }

    /// True for 1, 2, 4, 8, ...
    pub fn is_power_of_two(&self) -> bool {
        self.0.count_ones() == 1
    }

    /// True for 1, 3, 9, 27, ...
    pub fn is_power_of_three(&self) -> bool {
        let three = BigUint::from(3u32);
        let mut v = self.0.clone();
        while &v % &three == BigUint::zero() {
            v /= &three;
        }
        v.is_one()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// The index as `u64` when it fits, for dense-range constructions.
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Index {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = BigUint::from_str(s).map_err(|_| Error::InvalidIndex(s.to_string()))?;
        Index::new(v)
    }
}

/// Finite index set; ordered so iteration and serialization are canonical.
pub type IndexSet = BTreeSet<Index>;

/// Builds `{1, 2, ..., n}`.
pub fn range_set(n: u64) -> IndexSet {
    (1..=n).map(Index::from_u64).collect()
}

/// Builds an index set from `u64` literals.
pub fn set_of(indices: &[u64]) -> IndexSet {
    indices.iter().copied().map(Index::from_u64).collect()
}

/// `sgn(c)` with the convention `sgn(0) = +1`.
pub fn sgn(c: f64) -> f64 {
    if c < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Finitely supported coefficient sequence. Canonical: no stored zeros.
#[derive(Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: BTreeMap<Index, f64>,
}

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector::default()
    }

    /// Collects entries, dropping zero coefficients and summing duplicates.
    pub fn from_entries<I: IntoIterator<Item = (Index, f64)>>(iter: I) -> Self {
        let mut entries = BTreeMap::new();
        for (n, c) in iter {
            *entries.entry(n).or_insert(0.0) += c;
        }
        entries.retain(|_, c| *c != 0.0);
        SparseVector { entries }
    }

    /// Convenience constructor for literal vectors.
    pub fn from_u64_entries(pairs: &[(u64, f64)]) -> Self {
        Self::from_entries(pairs.iter().map(|&(n, c)| (Index::from_u64(n), c)))
    }

    /// All-ones indicator 1_A.
    pub fn indicator(set: &IndexSet) -> Self {
        Self::from_entries(set.iter().map(|n| (n.clone(), 1.0)))
    }

    pub fn coefficient(&self, n: &Index) -> f64 {
        self.entries.get(n).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Index> {
        self.entries.keys()
    }

    pub fn support_set(&self) -> IndexSet {
        self.entries.keys().cloned().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Index, f64)> {
        self.entries.iter().map(|(n, c)| (n, *c))
    }

    pub fn max_support_index(&self) -> Option<&Index> {
        self.entries.keys().next_back()
    }

    /// ∥x∥_∞ over the support; 0 for the zero vector.
    pub fn sup_norm(&self) -> f64 {
        self.entries.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Smallest nonzero coefficient magnitude; +∞ for the zero vector.
    pub fn min_abs_coefficient(&self) -> f64 {
        self.entries
            .values()
            .map(|c| c.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// P_A(x): restriction to A.
    pub fn project(&self, set: &IndexSet) -> Self {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| set.contains(*n))
                .map(|(n, c)| (n.clone(), *c))
                .collect(),
        }
    }

    /// P_{A^c}(x) = x − P_A(x): restriction to support \ A.
    pub fn project_complement(&self, set: &IndexSet) -> Self {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| !set.contains(*n))
                .map(|(n, c)| (n.clone(), *c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_entries(
            self.entries()
                .chain(other.entries())
                .map(|(n, c)| (n.clone(), c)),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_entries(
            self.entries()
                .map(|(n, c)| (n.clone(), c))
                .chain(other.entries().map(|(n, c)| (n.clone(), -c))),
        )
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::from_entries(self.entries().map(|(n, c)| (n.clone(), t * c)))
    }

    /// Replaces the coefficient at `n` (removing the entry when zero).
    pub fn with_coefficient(&self, n: &Index, c: f64) -> Self {
        let mut entries = self.entries.clone();
        if c == 0.0 {
            entries.remove(n);
        } else {
            entries.insert(n.clone(), c);
        }
        SparseVector { entries }
    }
}

impl fmt::Debug for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// Interchange format: `{"entries": [[index_as_decimal_string, coefficient], ...]}`
/// with indices strictly increasing. Decimal strings keep unbounded indices
/// bit-exact through JSON.
#[derive(Serialize, Deserialize)]
struct VectorRepr {
    entries: Vec<(String, f64)>,
}

impl Serialize for SparseVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = VectorRepr {
            entries: self
                .entries
                .iter()
                .map(|(n, c)| (n.to_string(), *c))
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = VectorRepr::deserialize(deserializer)?;
        let mut entries = BTreeMap::new();
        let mut previous: Option<Index> = None;
        for (raw, c) in repr.entries {
            let n: Index = raw
                .parse()
                .map_err(|e| DeError::custom(format!("bad index {raw:?}: {e}")))?;
            if let Some(prev) = &previous {
                if *prev >= n {
                    return Err(DeError::custom(format!(
                        "indices must be strictly increasing, saw {n} after {prev}"
                    )));
                }
            }
            previous = Some(n.clone());
            if c != 0.0 {
                entries.insert(n, c);
            }
        }
        Ok(SparseVector { entries })
    }
}

/// Finite map index -> ±1 used to attach signs to indicator vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SignPattern {
    signs: BTreeMap<Index, f64>,
}

impl SignPattern {
    pub fn empty() -> Self {
        SignPattern {
            signs: BTreeMap::new(),
        }
    }

    /// All +1 on the given set.
    pub fn plus(set: &IndexSet) -> Self {
        SignPattern {
            signs: set.iter().map(|n| (n.clone(), 1.0)).collect(),
        }
    }

    /// Signs read off a vector: sgn of each coefficient over its support.
    pub fn of_vector(x: &SparseVector) -> Self {
        SignPattern {
            signs: x.entries().map(|(n, c)| (n.clone(), sgn(c))).collect(),
        }
    }

    /// Builds from explicit ±1 assignments; rejects values other than ±1.
    pub fn from_signs<I: IntoIterator<Item = (Index, f64)>>(iter: I) -> Result<Self> {
        let mut signs = BTreeMap::new();
        for (n, s) in iter {
            if s != 1.0 && s != -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "sign at index {n} must be +1 or -1, got {s}"
                )));
            }
            signs.insert(n, s);
        }
        Ok(SignPattern { signs })
    }

    /// The k-th of the 2^|set| sign assignments on `set`, bit i of `k`
    /// flipping the i-th smallest index. Used to enumerate sign patterns.
    pub fn enumerated(set: &IndexSet, k: u32) -> Self {
        SignPattern {
            signs: set
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), if k >> i & 1 == 1 { -1.0 } else { 1.0 }))
                .collect(),
        }
    }

    pub fn get(&self, n: &Index) -> Option<f64> {
        self.signs.get(n).copied()
    }
}

/// 1_{εA}: the signed indicator Σ_{n∈A} ε_n e_n. Every index of A must carry
/// a sign.
pub fn signed_indicator(set: &IndexSet, eps: &SignPattern) -> Result<SparseVector> {
    let mut entries = Vec::with_capacity(set.len());
    for n in set {
        let s = eps
            .get(n)
            .ok_or_else(|| Error::MissingSign(n.to_string()))?;
        entries.push((n.clone(), s));
    }
    Ok(SparseVector::from_entries(entries))
}

/// Shared closure type for user-supplied evaluators.
pub type SetFn = Arc<dyn Fn(&IndexSet) -> f64 + Send + Sync>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_reads() {
        let x = SparseVector::from_u64_entries(&[(3, 2.5)]);
        assert_eq!(SparseVector::zero().coefficient(&Index::from_u64(5)), 0.0);
        assert_eq!(x.coefficient(&Index::from_u64(3)), 2.5);
        assert_eq!(x.coefficient(&Index::from_u64(4)), 0.0);
    }

    #[test]
    fn projection_examples() {
        let x = SparseVector::from_u64_entries(&[(1, 1.0), (2, -3.0), (5, 2.0)]);
        assert!(x.project(&IndexSet::new()).is_zero());
        assert_eq!(x.project(&x.support_set()), x);
        assert_eq!(
            x.project(&set_of(&[2, 5, 9])),
            SparseVector::from_u64_entries(&[(2, -3.0), (5, 2.0)])
        );
    }

    #[test]
    fn projection_composes_as_intersection() {
        let x = SparseVector::from_u64_entries(&[(1, 1.0), (2, 2.0), (3, 3.0), (7, -1.0)]);
        let a = set_of(&[1, 2, 7, 9]);
        let b = set_of(&[2, 3, 7]);
        let ab: IndexSet = a.intersection(&b).cloned().collect();
        assert_eq!(x.project(&a).project(&b), x.project(&ab));
    }

    #[test]
    fn projection_decomposition_is_exact() {
        let x = SparseVector::from_u64_entries(&[(1, 0.25), (4, -7.5), (10, 1e-3)]);
        let a = set_of(&[4, 6]);
        assert_eq!(x.project(&a).add(&x.project_complement(&a)), x);
    }

    #[test]
    fn signed_indicator_examples() {
        assert!(signed_indicator(&IndexSet::new(), &SignPattern::empty())
            .unwrap()
            .is_zero());
        let a = set_of(&[1, 4]);
        assert_eq!(
            signed_indicator(&a, &SignPattern::plus(&a)).unwrap(),
            SparseVector::from_u64_entries(&[(1, 1.0), (4, 1.0)])
        );
        let b = set_of(&[2, 7]);
        let eps = SignPattern::from_signs([(Index::from_u64(2), -1.0), (Index::from_u64(7), 1.0)])
            .unwrap();
        assert_eq!(
            signed_indicator(&b, &eps).unwrap(),
            SparseVector::from_u64_entries(&[(2, -1.0), (7, 1.0)])
        );
        assert_eq!(
            signed_indicator(&b, &eps).unwrap().sup_norm(),
            1.0,
            "signed indicators of nonempty sets have sup-norm 1"
        );
    }

    #[test]
    fn signed_indicator_rejects_missing_sign() {
        let b = set_of(&[2, 7]);
        let eps = SignPattern::from_signs([(Index::from_u64(2), -1.0)]).unwrap();
        assert!(matches!(
            signed_indicator(&b, &eps),
            Err(Error::MissingSign(_))
        ));
    }

    #[test]
    fn sgn_convention() {
        assert_eq!(sgn(0.0), 1.0);
        assert_eq!(sgn(-0.0), 1.0);
        assert_eq!(sgn(-3.2), -1.0);
        assert_eq!(sgn(0.5), 1.0);
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let x = SparseVector::from_u64_entries(&[(1, 1.0), (2, 0.0), (3, -1.0), (3, 1.0)]);
        assert_eq!(x.support_len(), 1);
        assert_eq!(x.coefficient(&Index::from_u64(1)), 1.0);
    }

    #[test]
    fn index_class_predicates() {
        assert!(Index::from_u64(1).is_power_of_two());
        assert!(Index::pow2(100).is_power_of_two());
        assert!(!Index::from_u64(6).is_power_of_two());
        assert!(Index::from_u64(1).is_power_of_three());
        assert!(Index::pow3(100).is_power_of_three());
        assert!(!Index::from_u64(6).is_power_of_three());
        // 3^100 does not fit in u64/u128 but stays exact.
        assert!(Index::pow3(100).to_u64().is_none());
        assert_eq!(Index::pow2(10), Index::from_u64(1024));
    }

    #[test]
    fn index_rejects_zero() {
        assert!(Index::new(BigUint::zero()).is_err());
        assert!("0".parse::<Index>().is_err());
        assert!("17".parse::<Index>().is_ok());
        assert!("x".parse::<Index>().is_err());
    }

    #[test]
    fn serde_round_trip_is_identity() {
        let x = SparseVector::from_entries([
            (Index::from_u64(3), 2.5),
            (Index::pow3(40), -1.0),
            (Index::from_u64(17), 0.125),
        ]);
        let json = serde_json::to_string(&x).unwrap();
        let back: SparseVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        // Canonical serialized form: increasing decimal-string indices.
        assert!(json.starts_with(r#"{"entries":[["3",2.5],["17",0.125],"#));
    }

    #[test]
    fn serde_rejects_disorder_and_bad_indices() {
        let disorder = r#"{"entries":[["5",1.0],["3",1.0]]}"#;
        assert!(serde_json::from_str::<SparseVector>(disorder).is_err());
        let duplicate = r#"{"entries":[["5",1.0],["5",2.0]]}"#;
        assert!(serde_json::from_str::<SparseVector>(duplicate).is_err());
        let zero = r#"{"entries":[["0",1.0]]}"#;
        assert!(serde_json::from_str::<SparseVector>(zero).is_err());
        // Stored zero coefficients are pruned on read, keeping vectors canonical.
        let padded = r#"{"entries":[["2",0.0],["4",1.0]]}"#;
        let x: SparseVector = serde_json::from_str(padded).unwrap();
        assert_eq!(x.support_len(), 1);
    }
}
