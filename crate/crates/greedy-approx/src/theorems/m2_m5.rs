//! Characterization of weighted almost-greediness. For every greedy set A
//! and every admissible projection competitor B, the residual obeys
//! ∥x − P_A(x)∥ ≤ C_ℓ·C_b·∥x − P_B(x)∥, replayed through the truncation
//! chain: split off the B-block, clip the surviving A-coefficients at
//! α = min_{n∈A}|x_n| (an exact coefficient-level identity), bound the
//! clipped vector by the remove-and-replace inequality, and bound the
//! truncation by the quasi-greedy constant. The same run checks the
//! downstream consequences: the suppression quasi-greedy bound against the
//! plain norm and signed-indicator democracy on admissible disjoint pairs.

use crate::family::Family;
use crate::oracles::{sigma_tilde_omega, sigma_tilde_with_constraint};
use crate::sparse::{sgn, signed_indicator, Index, IndexSet, SparseVector};
use crate::tga::{greedy_sets, truncate, TieMode};
use crate::weights::admissible_competitor;

use super::{fmt_set, signs_on, small_sets, Checker, Result, SuiteConfig, SuiteReport};

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut ck = Checker::new("m2-m5", cfg.tol);
    let c_l = ck.need(&cfg.space, &cfg.weight, "C_l")?;
    let c_b = ck.need(&cfg.space, &cfg.weight, "C_b_omega")?;
    let bound = c_l * c_b;

    let family = Family::standard(cfg.dim, cfg.family_size, 2, cfg.seed);
    let tie_mode = if cfg.dim <= 10 {
        TieMode::All
    } else {
        TieMode::OneDeterministic
    };

    for (xi, x) in family.vectors.iter().enumerate() {
        let supp: Vec<Index> = x.support().cloned().collect();
        let mut competitors = vec![IndexSet::new()];
        competitors.extend(small_sets(&supp, supp.len()));

        for m in 1..=x.support_len().min(3) {
            for (si, sel) in greedy_sets(x, m, tie_mode, None)?.iter().enumerate() {
                let a = &sel.set;
                let alpha = x.project(a).min_abs_coefficient();
                let residual = cfg.space.evaluate(&x.project_complement(a));

                // Projections outside the support change nothing, so the
                // competitor scan stays inside it.
                for b in &competitors {
                    if !admissible_competitor(&cfg.weight, b, a)? {
                        continue;
                    }
                    ck.tick();
                    let id = format!("chain/x{xi:02}/m{m}/g{si}/B{}", fmt_set(b));

                    let tail = x.project_complement(b);
                    let a_minus_b: IndexSet = a.difference(b).cloned().collect();
                    let mut aub = a.clone();
                    aub.extend(b.iter().cloned());

                    // Exact split of the B-complement into the surviving
                    // A-block and the outside block.
                    ck.check_identity(
                        &id,
                        &tail,
                        &x.project(&a_minus_b).add(&x.project_complement(&aub)),
                        "B-complement splits into A\\B and the outside block",
                    );

                    // Clipping at alpha sends the A\B block to its signed
                    // indicator and leaves the outside block alone; greedy
                    // thresholds make this exact.
                    let clipped = truncate(&tail, alpha)?;
                    let expected = SparseVector::from_entries(
                        a_minus_b
                            .iter()
                            .map(|n| (n.clone(), alpha * sgn(x.coefficient(n)))),
                    )
                    .add(&x.project_complement(&aub));
                    ck.check_identity(&id, &clipped, &expected, "clipping identity");

                    // Remove-and-replace bound, then the truncation bound.
                    ck.check_le(
                        &id,
                        residual,
                        c_b * cfg.space.evaluate(&clipped),
                        "remove-and-replace bound on the clipped vector",
                    );
                    ck.check_le(
                        &id,
                        cfg.space.evaluate(&clipped),
                        c_l * cfg.space.evaluate(&tail),
                        "truncation bound",
                    );
                    ck.check_le(
                        &id,
                        residual,
                        bound * cfg.space.evaluate(&tail),
                        "end-to-end projection bound",
                    );
                }

                // Against the oracle minimum, with witness re-evaluation.
                let orc = sigma_tilde_omega(&cfg.space, &cfg.weight, x, a, None, cfg.par)?;
                ck.tick();
                let id = format!("oracle/x{xi:02}/m{m}/g{si}");
                let reval = orc.reevaluate(&cfg.space, x);
                ck.check_le(
                    &id,
                    (reval - orc.value).abs(),
                    1e-12 * (1.0 + orc.value),
                    "witness re-evaluation",
                );
                ck.check_le(
                    &id,
                    residual,
                    bound * orc.value + cfg.tol,
                    "residual vs projection benchmark",
                );

                // Downstream consequence: the empty competitor is always
                // admissible, so the residual is controlled by the norm.
                ck.check_le(
                    &id,
                    residual,
                    bound * cfg.space.evaluate(x) + cfg.tol,
                    "suppression quasi-greedy consequence",
                );
            }
        }
    }

    // Signed-indicator democracy on admissible disjoint pairs, the
    // indicator shadow of the largest-coefficient inequality.
    let pool: Vec<Index> = family.pool.iter().take(6).cloned().collect();
    let sets = small_sets(&pool, 2);
    for a in &sets {
        for b in &sets {
            if a.intersection(b).next().is_some() || cfg.weight.weight(a)? > cfg.weight.weight(b)? {
                continue;
            }
            for (ei, eps) in signs_on(a, 2).iter().enumerate() {
                for (di, delta) in signs_on(b, 2).iter().enumerate() {
                    ck.tick();
                    let id = format!("democracy/A{}/B{}/e{ei}/d{di}", fmt_set(a), fmt_set(b));
                    ck.check_le(
                        &id,
                        cfg.space.evaluate(&signed_indicator(a, eps)?),
                        c_b * cfg.space.evaluate(&signed_indicator(b, delta)?),
                        "signed-indicator democracy",
                    );
                }
            }
        }
    }

    // Negative control: reversed admissibility admits the full support, the
    // projection benchmark collapses to zero, and the bound must break.
    let steep = SparseVector::from_entries(
        pool.iter()
            .take(3)
            .enumerate()
            .map(|(i, n)| (n.clone(), 4.0 / (1 << i) as f64)),
    );
    let lam = greedy_sets(&steep, 1, TieMode::OneDeterministic, None)?[0]
        .set
        .clone();
    let w = cfg.weight.clone();
    let lam_for_rule = lam.clone();
    let reversed_rule = move |set: &IndexSet| admissible_competitor(&w, &lam_for_rule, set);
    let rev = sigma_tilde_with_constraint(&cfg.space, &steep, &lam, &reversed_rule, cfg.par)?;
    let steep_res = cfg.space.evaluate(&steep.project_complement(&lam));
    let fired = steep_res > bound * rev.value + cfg.tol;
    if fired {
        ck.note(format!(
            "negative control fired: reversed admissibility collapses the projection benchmark to {:.3e} against residual {steep_res:.6}",
            rev.value
        ));
    }

    Ok(ck.finish(cfg.seed, fired))
}
