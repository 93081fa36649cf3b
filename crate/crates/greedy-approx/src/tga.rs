//! The thresholding greedy algorithm and its companions.
//!
//! A greedy set of order m collects m indices whose smallest coefficient
//! magnitude dominates every excluded coefficient's magnitude. Ties at the
//! threshold magnitude make greedy sets non-unique; the definitions being
//! verified quantify over all of them, so enumeration is a first-class mode
//! here, not an afterthought. Beyond selection, this module houses greedy and
//! partial sums, the truncation operator T_α (clip magnitudes above α to
//! ±α), and Chebyshev greedy sums (best coefficients on a fixed index set).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::NormSpace;
use crate::sparse::{sgn, Index, IndexSet, SparseVector};

/// How to handle threshold ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieMode {
    /// One canonical greedy set: ties broken by smallest index.
    OneDeterministic,
    /// Every greedy set: one output per tie branch.
    All,
}

/// A greedy set together with the threshold values that certify it.
#[derive(Clone, Debug)]
pub struct GreedySelection {
    pub set: IndexSet,
    /// min_{n ∈ set} |x_n|; +∞ for the empty set.
    pub threshold_in: f64,
    /// max_{n ∉ set} |x_n| over the support; 0 when nothing is excluded.
    pub threshold_out: f64,
    /// Indices sharing the boundary magnitude (the branch points).
    pub tie_class: IndexSet,
}

/// Hard cap on enumerated tie branches.
const MAX_BRANCHES: u64 = 1 << 20;
/// Largest default ambient range materialized for padding.
const DEFAULT_AMBIENT_CAP: u64 = 4096;

fn binomial_capped(n: usize, k: usize, cap: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)?;
        acc /= (i + 1) as u64;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// All k-element subsets of `pool`, in lexicographic position order.
pub(crate) fn combinations<T: Clone>(pool: &[T], k: usize) -> Vec<Vec<T>> {
    if k > pool.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut picks: Vec<usize> = (0..k).collect();
    loop {
        out.push(picks.iter().map(|&i| pool[i].clone()).collect());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if picks[i] != i + pool.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        picks[i] += 1;
        for j in i + 1..k {
            picks[j] = picks[j - 1] + 1;
        }
    }
}

/// Whether `set` is a greedy set of `x`: every member's coefficient magnitude
/// (zero off support) must reach every non-member's.
pub fn is_greedy_set(x: &SparseVector, set: &IndexSet) -> bool {
    let min_in = set
        .iter()
        .map(|n| x.coefficient(n).abs())
        .fold(f64::INFINITY, f64::min);
    let max_out = x
        .entries()
        .filter(|(n, _)| !set.contains(n))
        .map(|(_, c)| c.abs())
        .fold(0.0, f64::max);
    min_in >= max_out
}

/// Greedy sets of order m. With `TieMode::All`, every tie branch is returned
/// (ascending in branch order); the head above the threshold is common to all.
///
/// m may exceed the support size: indicator-sum constructions build greedy
/// sets reaching past the support, so the balance is padded with
/// zero-coefficient indices from `universe` (default `{1..max(support ∪ {m})}`
/// when that range is small enough to materialize).
pub fn greedy_sets(
    x: &SparseVector,
    m: usize,
    mode: TieMode,
    universe: Option<&IndexSet>,
) -> Result<Vec<GreedySelection>> {
    if m == 0 {
        return Ok(vec![GreedySelection {
            set: IndexSet::new(),
            threshold_in: f64::INFINITY,
            threshold_out: x.sup_norm(),
            tie_class: IndexSet::new(),
        }]);
    }

    // Support entries by decreasing magnitude; the sort is stable, so equal
    // magnitudes stay in ascending index order.
    let mut sorted: Vec<(&Index, f64)> = x.entries().map(|(n, c)| (n, c.abs())).collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let s = sorted.len();

    if m <= s {
        let t = sorted[m - 1].1;
        let head: Vec<&Index> = sorted
            .iter()
            .take_while(|(_, mag)| *mag > t)
            .map(|(n, _)| *n)
            .collect();
        let tie: Vec<&Index> = sorted
            .iter()
            .filter(|(_, mag)| *mag == t)
            .map(|(n, _)| *n)
            .collect();
        let need = m - head.len();
        let threshold_out = if tie.len() > need {
            t
        } else if m < s {
            sorted[m].1
        } else {
            0.0
        };
        let tie_class: IndexSet = tie.iter().map(|n| (*n).clone()).collect();

        let chosen: Vec<Vec<&Index>> = match mode {
            TieMode::OneDeterministic => vec![tie[..need].to_vec()],
            TieMode::All => {
                if binomial_capped(tie.len(), need, MAX_BRANCHES).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "tie class of size {} at rank {m} exceeds the {MAX_BRANCHES} branch cap",
                        tie.len()
                    )));
                }
                combinations(&tie, need)
            }
        };
        return Ok(chosen
            .into_iter()
            .map(|picked| {
                let mut set: IndexSet = head.iter().map(|n| (*n).clone()).collect();
                set.extend(picked.into_iter().cloned());
                GreedySelection {
                    set,
                    threshold_in: t,
                    threshold_out,
                    tie_class: tie_class.clone(),
                }
            })
            .collect());
    }

    // Padding branch: every support index is in, plus m − s zero-coefficient
    // indices. Any such set is greedy (threshold 0 ≥ 0).
    let need_pad = m - s;
    let candidates: Vec<Index> = match universe {
        Some(u) => u
            .iter()
            .filter(|n| x.coefficient(n) == 0.0)
            .cloned()
            .collect(),
        None => {
            let hi = x
                .max_support_index()
                .map(|n| {
                    n.to_u64().ok_or_else(|| {
                        Error::PaddingUnavailable(format!(
                            "support reaches index {n}; pass an explicit universe to pad"
                        ))
                    })
                })
                .transpose()?
                .unwrap_or(0)
                .max(m as u64);
            if hi > DEFAULT_AMBIENT_CAP {
                return Err(Error::PaddingUnavailable(format!(
                    "default ambient range 1..={hi} exceeds {DEFAULT_AMBIENT_CAP}; \
                     pass an explicit universe"
                )));
            }
            (1..=hi)
                .map(Index::from_u64)
                .filter(|n| x.coefficient(n) == 0.0)
                .collect()
        }
    };
    if candidates.len() < need_pad {
        return Err(Error::RankExceedsUniverse {
            m,
            universe: s + candidates.len(),
        });
    }
    let tie_class: IndexSet = candidates.iter().cloned().collect();
    let picks: Vec<Vec<Index>> = match mode {
        TieMode::OneDeterministic => vec![candidates[..need_pad].to_vec()],
        TieMode::All => {
            if binomial_capped(candidates.len(), need_pad, MAX_BRANCHES).is_none() {
                return Err(Error::InvalidParameter(format!(
                    "padding {need_pad} from {} candidates exceeds the {MAX_BRANCHES} branch cap",
                    candidates.len()
                )));
            }
            combinations(&candidates, need_pad)
        }
    };
    Ok(picks
        .into_iter()
        .map(|picked| {
            let mut set = x.support_set();
            set.extend(picked);
            GreedySelection {
                set,
                threshold_in: 0.0,
                threshold_out: 0.0,
                tie_class: tie_class.clone(),
            }
        })
        .collect())
}

/// G_m(x) for a given greedy set: the projection onto it. Rejects sets that
/// fail the threshold inequality.
pub fn greedy_sum(x: &SparseVector, set: &IndexSet) -> Result<SparseVector> {
    if !is_greedy_set(x, set) {
        return Err(Error::NotGreedy(format!(
            "min-in magnitude falls below an excluded magnitude for a set of size {}",
            set.len()
        )));
    }
    Ok(x.project(set))
}

/// S_k(x): projection onto the initial window {1..k}.
pub fn partial_sum(x: &SparseVector, k: u64) -> SparseVector {
    SparseVector::from_entries(
        x.entries()
            .filter(|(n, _)| n.to_u64().is_some_and(|v| v <= k))
            .map(|(n, c)| (n.clone(), c)),
    )
}

/// Indices with |x_n| strictly above α.
pub fn indices_above(x: &SparseVector, alpha: f64) -> IndexSet {
    x.entries()
        .filter(|(_, c)| c.abs() > alpha)
        .map(|(n, _)| n.clone())
        .collect()
}

/// T_α(x): clip coefficients with |c| > α to sgn(c)·α; the comparison is
/// strict, so coefficients at exactly ±α pass through unchanged.
pub fn truncate(x: &SparseVector, alpha: f64) -> Result<SparseVector> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "truncation level must be positive and finite, got {alpha}"
        )));
    }
    Ok(SparseVector::from_entries(x.entries().map(|(n, c)| {
        let clipped = if c.abs() > alpha { sgn(c) * alpha } else { c };
        (n.clone(), clipped)
    })))
}

/// Best approximation with free coefficients on a fixed index set.
#[derive(Clone, Debug, Serialize)]
pub struct ChebyshevResult {
    /// The approximant Σ a_n e_n; support ⊆ the given set.
    pub coefficients: SparseVector,
    pub residual_norm: f64,
    /// Distance-to-optimum bookkeeping: exactly 0 on the closed-form paths;
    /// on the iterative path it is the final cycle's improvement, a stopping
    /// measure rather than a proof.
    pub gap: f64,
    pub converged: bool,
}

const CD_MAX_CYCLES: usize = 200;
const GOLDEN_MAX_ITERS: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimum of a unimodal f over [lo, hi].
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..GOLDEN_MAX_ITERS {
        if hi - lo <= xtol {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// CG on a fixed set: minimizes ∥x − Σ_{n∈Λ} a_n e_n∥ over the coefficients.
///
/// Lattice-monotone spaces take the closed form a = x on Λ: the projection
/// residual vanishes on Λ and matches any competitor off Λ, so it is
/// coordinatewise dominated by every competitor's residual. Other spaces run
/// cyclic coordinate descent, each coordinate minimized by golden section
/// over [−M, M] with M = 2∥x∥_∞|Λ|(c2/c1); any optimum outside that bracket
/// would give a residual worse than the all-zero coefficients already achieve.
pub fn chebyshev_sum(
    space: &NormSpace,
    x: &SparseVector,
    lambda: &IndexSet,
    tol: f64,
) -> Result<ChebyshevResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    if lambda.is_empty() || x.is_zero() {
        let residual_norm = space.evaluate(x);
        return Ok(ChebyshevResult {
            coefficients: SparseVector::zero(),
            residual_norm,
            gap: 0.0,
            converged: true,
        });
    }
    if space.is_lattice() {
        let coefficients = x.project(lambda);
        let residual_norm = space.evaluate(&x.project_complement(lambda));
        return Ok(ChebyshevResult {
            coefficients,
            residual_norm,
            gap: 0.0,
            converged: true,
        });
    }

    let flags = space.flags();
    let m = 2.0 * x.sup_norm() * lambda.len() as f64 * (flags.c2 / flags.c1);
    let xtol = tol.min(1e-10) * (1.0 + m);
    let mut approx = x.project(lambda);
    let mut residual = space.evaluate(&x.sub(&approx));
    let mut converged = false;
    let mut gap = f64::INFINITY;
    for _ in 0..CD_MAX_CYCLES {
        for n in lambda {
            let without = approx.with_coefficient(n, 0.0);
            let base = x.sub(&without);
            let xn = base.coefficient(n);
            let objective = |t: f64| space.evaluate(&base.with_coefficient(n, xn - t));
            let best = golden_min(objective, -m, m, xtol);
            // Keep the better of the line-search point and zero, so a flat
            // search can never push the residual up.
            let candidate = if objective(best) <= objective(approx.coefficient(n)) {
                best
            } else {
                approx.coefficient(n)
            };
            approx = approx.with_coefficient(n, candidate);
        }
        let next = space.evaluate(&x.sub(&approx));
        gap = (residual - next).max(0.0);
        residual = next;
        if gap <= tol {
            converged = true;
            break;
        }
    }
    Ok(ChebyshevResult {
        coefficients: approx,
        residual_norm: residual,
        gap,
        converged,
    })
}
