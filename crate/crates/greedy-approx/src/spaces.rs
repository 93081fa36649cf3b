//! Catalog of norm evaluators with declared structural metadata.
//!
//! Each space is a pure function `SparseVector -> [0, ∞)` plus flags recording
//! what is analytically known about it: lattice monotonicity and the exact
//! values (when available) of the suppression constant K_s, the partial-sum
//! constant K_b, the truncation constant C_l, and the basis normalization
//! bounds c1 ≤ ∥e_n∥ ≤ c2, c1* ≤ ∥e_n*∥ ≤ c2*.
//!
//! The catalog's centerpiece is the `m3` norm: a sum of two Lorentz-type
//! rearrangement norms, one over the coordinates whose index is a power of two
//! (≥ 2) with weights n^{-1/2}, one over all remaining coordinates with
//! harmonic weights 1/n. Indicator norms then depend only on how many indices
//! fall in each class, so equal-size sets from the two classes have norm ratio
//! (Σ n^{-1/2})/(Σ 1/n), which grows without bound.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sparse::{Index, SparseVector};

/// What is analytically known about a space. `None` means "no certified
/// value": estimators may search for lower bounds but inequality checks that
/// need the constant must abort rather than guess.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceFlags {
    pub lattice_monotone: bool,
    /// Suppression constant: sup over finite A of ∥P_A∥.
    pub k_s: Option<f64>,
    /// Partial-sum constant: sup over m of ∥S_m∥.
    pub k_b: Option<f64>,
    /// Truncation constant: bound for ∥T_α∥ and suppression quasi-greediness.
    pub c_l: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub c1_star: f64,
    pub c2_star: f64,
}

impl SpaceFlags {
    /// All constants 1: lattice norms with normalized unit vectors.
    fn unit_lattice() -> Self {
        SpaceFlags {
            lattice_monotone: true,
            k_s: Some(1.0),
            k_b: Some(1.0),
            c_l: Some(1.0),
            c1: 1.0,
            c2: 1.0,
            c1_star: 1.0,
            c2_star: 1.0,
        }
    }
}

#[derive(Clone)]
enum SpaceKind {
    /// (Σ |x_i|^p)^{1/p}, 1 ≤ p < ∞.
    Lp(f64),
    /// max |x_i|.
    Sup,
    /// The two-class rearrangement norm described in the module docs.
    SplitLorentz,
    /// max(∥x∥_∞, sup_k |Σ_{n≤k} x_n|): a conditional norm, not lattice
    /// monotone, kept to exercise the Chebyshev solver off the lattice path.
    Summing,
    /// User-supplied evaluator; flags are taken on trust from the caller.
    Custom(Arc<dyn Fn(&SparseVector) -> f64 + Send + Sync>),
}

/// A named norm evaluator plus structural flags.
#[derive(Clone)]
pub struct NormSpace {
    name: String,
    kind: SpaceKind,
    flags: SpaceFlags,
    note: Option<String>,
}

impl fmt::Debug for NormSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormSpace({})", self.name)
    }
}

impl NormSpace {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flags(&self) -> &SpaceFlags {
        &self.flags
    }

    pub fn is_lattice(&self) -> bool {
        self.flags.lattice_monotone
    }

    /// Extra label carried into reports (set on catalog entries that need
    /// qualification, like the conditional summing norm).
    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn l1() -> Self {
        Self::lp(1.0).expect("p = 1 is valid")
    }

    pub fn l2() -> Self {
        Self::lp(2.0).expect("p = 2 is valid")
    }

    pub fn linf() -> Self {
        NormSpace {
            name: "linf".to_string(),
            kind: SpaceKind::Sup,
            flags: SpaceFlags::unit_lattice(),
            note: None,
        }
    }

    /// ℓp norm; `p = ∞` is accepted and aliases the sup-norm.
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "lp exponent must satisfy p >= 1, got {p}"
            )));
        }
        if p.is_infinite() {
            return Ok(Self::linf());
        }
        let name = if p == 1.0 {
            "l1".to_string()
        } else if p == 2.0 {
            "l2".to_string()
        } else {
            format!("lp:{p}")
        };
        Ok(NormSpace {
            name,
            kind: SpaceKind::Lp(p),
            flags: SpaceFlags::unit_lattice(),
            note: None,
        })
    }

    /// The two-class rearrangement norm (catalog name `m3`).
    pub fn split_lorentz() -> Self {
        NormSpace {
            name: "m3".to_string(),
            kind: SpaceKind::SplitLorentz,
            flags: SpaceFlags::unit_lattice(),
            note: None,
        }
    }

    /// The conditional summing norm (catalog name `summing`).
    ///
    /// Not lattice monotone: flipping a sign can grow a running sum, e.g.
    /// ∥(1, −1, 1)∥ = 1 but ∥(1, 0, 1)∥ = 2, so no suppression or truncation
    /// constant is certified here. Partial sums only discard trailing terms,
    /// so K_b = 1 still holds.
    pub fn summing() -> Self {
        NormSpace {
            name: "summing".to_string(),
            kind: SpaceKind::Summing,
            flags: SpaceFlags {
                lattice_monotone: false,
                k_s: None,
                k_b: Some(1.0),
                c_l: None,
                c1: 1.0,
                c2: 1.0,
                c1_star: 1.0,
                c2_star: 1.0,
            },
            note: Some(
                "conditional norm outside the lattice catalog; exercises the \
                 Chebyshev solver's iterative path"
                    .to_string(),
            ),
        }
    }

    /// Wraps a caller-supplied evaluator. The flags are the caller's claim and
    /// are not verified here; run [`check_norm_axioms`] to probe them.
    pub fn custom(
        name: &str,
        evaluate: Arc<dyn Fn(&SparseVector) -> f64 + Send + Sync>,
        flags: SpaceFlags,
    ) -> Self {
        NormSpace {
            name: name.to_string(),
            kind: SpaceKind::Custom(evaluate),
            flags,
            note: Some("user-supplied evaluator; flags unverified".to_string()),
        }
    }

    /// Catalog lookup: `l1`, `l2`, `linf`, `lp:<p>`, `m3`, `summing`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "l1" => Ok(Self::l1()),
            "l2" => Ok(Self::l2()),
            "linf" => Ok(Self::linf()),
            "m3" => Ok(Self::split_lorentz()),
            "summing" => Ok(Self::summing()),
            _ => {
                if let Some(raw) = name.strip_prefix("lp:") {
                    let p: f64 = raw.parse().map_err(|_| Error::UnknownSpace {
                        name: name.to_string(),
                        catalog: Self::catalog().join(", "),
                    })?;
                    return Self::lp(p);
                }
                Err(Error::UnknownSpace {
                    name: name.to_string(),
                    catalog: Self::catalog().join(", "),
                })
            }
        }
    }

    pub fn catalog() -> Vec<&'static str> {
        vec!["l1", "l2", "linf", "lp:<p>", "m3", "summing"]
    }

    pub fn evaluate(&self, x: &SparseVector) -> f64 {
        match &self.kind {
            SpaceKind::Lp(p) => eval_lp(x, *p),
            SpaceKind::Sup => x.sup_norm(),
            SpaceKind::SplitLorentz => eval_split_lorentz(x),
            SpaceKind::Summing => eval_summing(x),
            SpaceKind::Custom(f) => f(x),
        }
    }
}

/// Membership in the weighted class {2^k : k ≥ 1}; note index 1 = 2^0 is
/// excluded and lands in the harmonic class.
pub fn in_sqrt_class(n: &Index) -> bool {
    n.is_power_of_two() && !n.is_one()
}

fn eval_lp(x: &SparseVector, p: f64) -> f64 {
    if p == 1.0 {
        x.entries().map(|(_, c)| c.abs()).sum()
    } else if p == 2.0 {
        x.entries().map(|(_, c)| c * c).sum::<f64>().sqrt()
    } else {
        x.entries()
            .map(|(_, c)| c.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Σ_j u_j / √j + Σ_j v_j / j where u, v are the decreasing rearrangements of
/// the coefficient magnitudes in the two index classes. The sup over index
/// pairings collapses to this closed form: both weight ladders decrease, so
/// the best pairing is largest magnitude to largest weight. Sorting is stable,
/// so equal magnitudes keep ascending index order and indicator norms sum in
/// the same order as a direct 1/√n (resp. 1/n) partial sum.
fn eval_split_lorentz(x: &SparseVector) -> f64 {
    let mut sqrt_class: Vec<f64> = Vec::new();
    let mut harmonic_class: Vec<f64> = Vec::new();
    for (n, c) in x.entries() {
        if in_sqrt_class(n) {
            sqrt_class.push(c.abs());
        } else {
            harmonic_class.push(c.abs());
        }
    }
    sqrt_class.sort_by(|a, b| b.total_cmp(a));
    harmonic_class.sort_by(|a, b| b.total_cmp(a));
    let s: f64 = sqrt_class
        .iter()
        .enumerate()
        .map(|(j, v)| v / ((j + 1) as f64).sqrt())
        .sum();
    let h: f64 = harmonic_class
        .iter()
        .enumerate()
        .map(|(j, v)| v / ((j + 1) as f64))
        .sum();
    s + h
}

fn eval_summing(x: &SparseVector) -> f64 {
    let mut running = 0.0;
    let mut best = x.sup_norm();
    for (_, c) in x.entries() {
        running += c;
        best = best.max(running.abs());
    }
    best
}

/// One failed axiom probe: which axiom, on what, by how much.
#[derive(Debug, Clone)]
pub struct AxiomViolation {
    pub axiom: String,
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct NormAxiomReport {
    pub checks: usize,
    pub violations: Vec<AxiomViolation>,
}

impl NormAxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, axiom: &str, detail: String, lhs: f64, rhs: f64) {
        self.checks += 1;
        if !ok {
            self.violations.push(AxiomViolation {
                axiom: axiom.to_string(),
                detail,
                lhs,
                rhs,
            });
        }
    }
}

/// Probes the norm axioms on the given samples: positivity, absolute
/// homogeneity, triangle inequality, semi-normalization against the declared
/// c1/c2, and (when flagged) lattice monotonicity. Violations are reported
/// with witnesses, not raised.
pub fn check_norm_axioms(space: &NormSpace, samples: &[SparseVector], tol: f64) -> NormAxiomReport {
    let mut report = NormAxiomReport::default();
    let near = |a: f64, b: f64| (a - b).abs() <= tol * 1.0f64.max(a.abs()).max(b.abs());

    let zero_norm = space.evaluate(&SparseVector::zero());
    report.check(
        zero_norm == 0.0,
        "positivity",
        "norm of the zero vector".to_string(),
        zero_norm,
        0.0,
    );

    for (i, x) in samples.iter().enumerate() {
        let nx = space.evaluate(x);
        if !x.is_zero() {
            report.check(
                nx > 0.0,
                "positivity",
                format!("sample {i} is nonzero"),
                nx,
                0.0,
            );
        }

        for t in [-2.0, -0.5, 0.25, 3.0] {
            let scaled = space.evaluate(&x.scale(t));
            report.check(
                near(scaled, t.abs() * nx),
                "homogeneity",
                format!("sample {i}, factor {t}"),
                scaled,
                t.abs() * nx,
            );
        }

        if space.flags().lattice_monotone {
            // Shrink magnitudes with a fixed per-position factor pattern;
            // lattice monotonicity demands the norm not grow.
            let factors = [0.9, 0.5, 0.0, 0.75, 1.0];
            let shrunk = SparseVector::from_entries(
                x.entries()
                    .enumerate()
                    .map(|(j, (n, c))| (n.clone(), c * factors[j % factors.len()])),
            );
            let ns = space.evaluate(&shrunk);
            report.check(
                ns <= nx + tol * 1.0f64.max(nx),
                "lattice monotonicity",
                format!("sample {i}, coefficientwise shrink"),
                ns,
                nx,
            );
        }
    }

    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate().skip(i + 1) {
            let lhs = space.evaluate(&x.add(y));
            let rhs = space.evaluate(x) + space.evaluate(y);
            report.check(
                lhs <= rhs + tol * 1.0f64.max(rhs),
                "triangle inequality",
                format!("samples {i} + {j}"),
                lhs,
                rhs,
            );
        }
    }

    // Semi-normalization on a spread of basis vectors, including both index
    // classes of the m3 norm.
    let basis_probe: Vec<Index> = (1..=8u64)
        .map(Index::from_u64)
        .chain([
            Index::pow2(5),
            Index::pow3(5),
            Index::pow2(20),
            Index::pow3(20),
        ])
        .collect();
    for n in basis_probe {
        let e = SparseVector::from_entries([(n.clone(), 1.0)]);
        let ne = space.evaluate(&e);
        report.check(
            space.flags().c1 - tol <= ne && ne <= space.flags().c2 + tol,
            "semi-normalization",
            format!("basis vector at index {n}"),
            ne,
            space.flags().c2,
        );
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{set_of, IndexSet, SignPattern};

    fn sqrt_block(n: u32) -> IndexSet {
        (1..=n).map(Index::pow2).collect()
    }

    fn harmonic_block(n: u32) -> IndexSet {
        (1..=n).map(Index::pow3).collect()
    }

    #[test]
    fn lp_examples() {
        let x = SparseVector::from_u64_entries(&[(1, 1.0), (2, -2.0)]);
        assert_eq!(NormSpace::l1().evaluate(&x), 3.0);
        assert_eq!(NormSpace::linf().evaluate(&x), 2.0);
        let y = SparseVector::from_u64_entries(&[(3, 3.0), (4, 4.0)]);
        assert!((NormSpace::l2().evaluate(&y) - 5.0).abs() < 1e-12);
        assert!((NormSpace::lp(3.0).unwrap().evaluate(&y) - 91.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn lp_rejects_bad_exponents() {
        assert!(NormSpace::lp(0.5).is_err());
        assert!(NormSpace::lp(f64::NAN).is_err());
        assert_eq!(NormSpace::lp(f64::INFINITY).unwrap().name(), "linf");
    }

    #[test]
    fn catalog_lookup() {
        for name in ["l1", "l2", "linf", "m3", "summing", "lp:1.5"] {
            assert!(NormSpace::by_name(name).is_ok(), "{name}");
        }
        let err = NormSpace::by_name("l0").unwrap_err();
        assert!(err.to_string().contains("catalog"));
    }

    #[test]
    fn split_lorentz_indicator_values() {
        let space = NormSpace::split_lorentz();
        // Powers of three land in the harmonic class: Σ_{n≤4} 1/n = 25/12.
        let a = SparseVector::indicator(&harmonic_block(4));
        assert!((space.evaluate(&a) - 25.0 / 12.0).abs() < 1e-12);
        // Powers of two (≥ 2) land in the √ class: Σ_{n≤4} n^{-1/2}.
        let b = SparseVector::indicator(&sqrt_block(4));
        let direct: f64 = (1..=4).map(|n| 1.0 / (n as f64).sqrt()).sum();
        assert_eq!(space.evaluate(&b), direct);
        assert!((direct - 2.784_457_050_376_173).abs() < 1e-12);
    }

    #[test]
    fn split_lorentz_unit_vectors_are_normalized() {
        let space = NormSpace::split_lorentz();
        for n in [
            Index::from_u64(1),
            Index::from_u64(2),
            Index::from_u64(3),
            Index::from_u64(6),
            Index::pow2(17),
            Index::pow3(40),
        ] {
            let e = SparseVector::from_entries([(n, 1.0)]);
            assert_eq!(space.evaluate(&e), 1.0);
        }
    }

    #[test]
    fn split_lorentz_mixed_classes() {
        let space = NormSpace::split_lorentz();
        // √ class {2 -> 3, 4 -> 1}: 3/√1 + 1/√2; harmonic class {1 -> 2, 5 -> 1}: 2/1 + 1/2.
        let x = SparseVector::from_u64_entries(&[(1, 2.0), (2, 3.0), (4, 1.0), (5, 1.0)]);
        let expected = 3.0 + 1.0 / 2.0f64.sqrt() + 2.0 + 0.5;
        assert!((space.evaluate(&x) - expected).abs() < 1e-12);
    }

    #[test]
    fn split_lorentz_is_sign_invariant() {
        let space = NormSpace::split_lorentz();
        let set = set_of(&[2, 3, 4, 5, 8, 9]);
        let plain = SparseVector::indicator(&set);
        for k in 0..1u32 << set.len() {
            let eps = SignPattern::enumerated(&set, k);
            let signed = crate::sparse::signed_indicator(&set, &eps).unwrap();
            assert_eq!(space.evaluate(&signed), space.evaluate(&plain));
        }
    }

    #[test]
    fn split_lorentz_harmonic_lower_bound_spot() {
        // Any N distinct indices are bounded below by the harmonic sum H_N:
        // each class weight satisfies 1/√j ≥ 1/j and merging two harmonic
        // heads never beats one longer head.
        let space = NormSpace::split_lorentz();
        let h8: f64 = (1..=8).map(|n| 1.0 / (n as f64)).sum();
        let picks: [&[u64]; 3] = [
            &[1, 2, 3, 4, 5, 6, 7, 8],
            &[2, 4, 8, 16, 32, 64, 128, 256],
            &[5, 9, 10, 27, 64, 100, 1000, 4096],
        ];
        for pick in picks {
            let x = SparseVector::indicator(&set_of(pick));
            assert!(space.evaluate(&x) >= h8 - 1e-12, "{pick:?}");
        }
    }

    #[test]
    fn lp_is_rearrangement_invariant() {
        let x = SparseVector::from_u64_entries(&[(1, 0.3), (4, -2.0), (9, 1.1)]);
        let y = SparseVector::from_u64_entries(&[(2, -2.0), (3, 0.3), (70, 1.1)]);
        for space in [NormSpace::l1(), NormSpace::l2(), NormSpace::linf()] {
            assert!((space.evaluate(&x) - space.evaluate(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn summing_norm_values() {
        let space = NormSpace::summing();
        let x = SparseVector::from_u64_entries(&[(1, 1.0), (2, -1.0)]);
        assert_eq!(space.evaluate(&x), 1.0);
        let y = SparseVector::from_u64_entries(&[(1, 1.0), (2, 1.0)]);
        assert_eq!(space.evaluate(&y), 2.0);
        // Dropping the middle sign grows a running sum: no lattice monotonicity.
        let alt = SparseVector::from_u64_entries(&[(1, 1.0), (2, -1.0), (3, 1.0)]);
        let sup = alt.project(&set_of(&[1, 3]));
        assert_eq!(space.evaluate(&alt), 1.0);
        assert_eq!(space.evaluate(&sup), 2.0);
    }

    fn axiom_samples() -> Vec<SparseVector> {
        // Deterministic spread: mixed signs, magnitudes, and index classes.
        let mut samples = vec![
            SparseVector::zero(),
            SparseVector::from_u64_entries(&[(1, 1.0)]),
            SparseVector::from_u64_entries(&[(2, -0.5), (3, 2.0), (4, 0.125)]),
            SparseVector::from_u64_entries(&[(8, 1.0), (9, -1.0), (27, 3.5)]),
        ];
        let mut state = 17u64;
        for _ in 0..12 {
            let mut entries = Vec::new();
            for slot in 0..6u64 {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let mag = ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0;
                entries.push((slot + 1 + (state % 5), mag));
            }
            samples.push(SparseVector::from_entries(
                entries.into_iter().map(|(n, c)| (Index::from_u64(n), c)),
            ));
        }
        samples
    }

    #[test]
    fn axioms_hold_on_catalog_spaces() {
        for name in ["l1", "l2", "linf", "lp:2.5", "m3", "summing"] {
            let space = NormSpace::by_name(name).unwrap();
            let report = check_norm_axioms(&space, &axiom_samples(), 1e-9);
            assert!(report.passed(), "{name}: {:?}", report.violations.first());
            assert!(report.checks > 100);
        }
    }

    #[test]
    fn axioms_catch_a_broken_evaluator() {
        // Plain coefficient sum without absolute values: odd in x, so
        // homogeneity with negative factors must fail.
        let broken = NormSpace::custom(
            "broken",
            Arc::new(|x: &SparseVector| x.entries().map(|(_, c)| c).sum()),
            SpaceFlags::unit_lattice(),
        );
        let report = check_norm_axioms(&broken, &axiom_samples(), 1e-9);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.axiom == "homogeneity"));
    }
}
