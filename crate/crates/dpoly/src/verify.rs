//! Cross-checks pairing each constructive route with an independent one on
//! a single instance, collected into a machine-readable pass/fail report
//! with verbatim counterexamples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bonds::{self, BondSystem};
use crate::exact::{solve, Rat, RatVector};
use crate::gencycle::{
    classify_cycle, enumerate_comb_support_with_cap, enumerate_simple_cycles,
    signed_circuit_oracle_with_cap, CombSupport, CycleClass, DEFAULT_CYCLE_CAP,
    DEFAULT_ORACLE_CAP,
};
use crate::graph::{ArcParamDigraph, SignedArcSet};
use crate::planar::{is_breakeven, BreakevenCheck};
use crate::poly::{sample_members, DPolyhedron};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckOutcome {
    fn pass(name: &'static str, details: String) -> Self {
        CheckOutcome { name, passed: true, details, counterexample: None }
    }

    fn fail(name: &'static str, details: String, counterexample: Value) -> Self {
        CheckOutcome { name, passed: false, details, counterexample: Some(counterexample) }
    }
}

/// Enumerated supports against the subset-kernel oracle (set equality of
/// canonical signed supports).
pub fn check_support_oracle(
    d: &ArcParamDigraph,
    supports: &[CombSupport],
    oracle_cap: usize,
) -> Result<CheckOutcome> {
    const NAME: &str = "support-oracle-equivalence";
    let oracle = signed_circuit_oracle_with_cap(d, oracle_cap)?;
    let mine: Vec<SignedArcSet> = supports.iter().map(|h| h.signed().clone()).collect();
    let bicycles = supports.iter().filter(|h| h.is_bicycle()).count();
    let details = format!(
        "{} supports ({} breakeven cycles, {} bicycles)",
        supports.len(),
        supports.len() - bicycles,
        bicycles
    );
    if mine == oracle {
        return Ok(CheckOutcome::pass(NAME, details));
    }
    let missing: Vec<&SignedArcSet> = oracle.iter().filter(|s| !mine.contains(s)).collect();
    let extra: Vec<&SignedArcSet> = mine.iter().filter(|s| !oracle.contains(s)).collect();
    Ok(CheckOutcome::fail(
        NAME,
        details,
        json!({
            "only_in_oracle": missing.iter().map(|s| s.signs().to_vec()).collect::<Vec<_>>(),
            "only_in_enumeration": extra.iter().map(|s| s.signs().to_vec()).collect::<Vec<_>>(),
        }),
    ))
}

/// Membership in the row space of the network matrix against vanishing of
/// every bicircular balance, on random vectors and random true bonds.
pub fn check_balance_membership(
    d: &ArcParamDigraph,
    supports: &[CombSupport],
    trials: usize,
    seed: u64,
) -> CheckOutcome {
    const NAME: &str = "balance-vs-row-space";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nt = d.network_matrix().transpose();
    for t in 0..trials {
        let x: RatVector = if t % 2 == 0 {
            (0..d.m()).map(|_| Rat::new(rng.gen_range(-9..=9), rng.gen_range(1..=3))).collect()
        } else {
            let p: RatVector = (0..d.n()).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
            bonds::bond_of_potential(d, &p)
        };
        let by_solve = solve(&nt, &x).is_some();
        let by_balance = supports.iter().all(|h| x.dot(h.flow()).is_zero());
        if by_solve != by_balance {
            return CheckOutcome::fail(
                NAME,
                format!("disagreement after {t} trials"),
                json!({ "x": x, "in_row_space": by_solve, "balances_vanish": by_balance }),
            );
        }
    }
    CheckOutcome::pass(NAME, format!("{trials} vectors agree"))
}

/// Bond-potential bijection: random potentials survive the round trip
/// through the reduced system exactly.
pub fn check_bond_round_trip(d: &ArcParamDigraph, trials: usize, seed: u64) -> Result<CheckOutcome> {
    const NAME: &str = "bond-potential-round-trip";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = BondSystem::one_sided(d.clone(), RatVector::zeros(d.m()));
    let reduced = bonds::reduce(&system)?;
    for _ in 0..trials {
        let p: RatVector =
            (0..d.n()).map(|_| Rat::new(rng.gen_range(-8..=8), rng.gen_range(1..=3))).collect();
        let x = bonds::bond_of_potential(d, &p);
        let q = bonds::potential_of_bond(&reduced, &x)?;
        let back = bonds::bond_of_potential(d, &q);
        if back != x {
            return Ok(CheckOutcome::fail(
                NAME,
                "bond changed under the round trip".into(),
                json!({ "potential": p, "bond": x, "round_trip": back }),
            ));
        }
    }
    Ok(CheckOutcome::pass(NAME, format!("{trials} potentials agree")))
}

/// Componentwise max and min of sampled members stay members of the
/// polyhedron with unit capacities.
pub fn check_closure_sampling(d: &ArcParamDigraph, pairs: usize, seed: u64) -> Result<CheckOutcome> {
    const NAME: &str = "lattice-closure-sampling";
    let ones: RatVector = (0..d.m()).map(|_| Rat::one()).collect();
    let poly = DPolyhedron::inequalities(d.clone(), ones);
    let h = poly.to_hpolyhedron();
    let points = sample_members(&h, 2 * pairs, seed);
    if points.is_empty() {
        return Ok(CheckOutcome::pass(NAME, "polyhedron has no sampled points".into()));
    }
    for chunk in points.chunks(2) {
        let (p, q) = (&chunk[0], chunk.get(1).unwrap_or(&chunk[0]));
        for (op, r) in [("join", p.join(q)), ("meet", p.meet(q))] {
            if let Some(row) = poly.violated_arc(&r) {
                return Ok(CheckOutcome::fail(
                    NAME,
                    format!("{op} of two members leaves the polyhedron"),
                    json!({ "p": p, "q": q, "result": r, "violated_arc": row }),
                ));
            }
        }
    }
    Ok(CheckOutcome::pass(NAME, format!("{} member pairs closed", points.len() / 2)))
}

/// Breakeven recognition self-check: accepted graphs expose positive
/// potentials in the cokernel, rejected ones a cycle with multiplier != 1.
pub fn check_breakeven_witness(d: &ArcParamDigraph) -> CheckOutcome {
    const NAME: &str = "breakeven-witness";
    let nt = d.network_matrix().transpose();
    match is_breakeven(d) {
        BreakevenCheck::Breakeven { mu } => {
            let positive = mu.iter().all(|v| v.is_positive());
            let annihilates = (0..nt.rows()).all(|r| nt.row(r).dot(&mu).is_zero());
            if positive && annihilates {
                CheckOutcome::pass(NAME, "breakeven with positive vertex potentials".into())
            } else {
                CheckOutcome::fail(
                    NAME,
                    "claimed potentials fail verification".into(),
                    json!({ "mu": mu, "positive": positive, "annihilates": annihilates }),
                )
            }
        }
        BreakevenCheck::NotBreakeven { witness, multiplier } => {
            let recomputed = witness.multiplier(d).ok();
            let ok = witness.is_closed()
                && recomputed.as_ref() == Some(&multiplier)
                && multiplier != Rat::one();
            if ok {
                CheckOutcome::pass(
                    NAME,
                    format!("witness cycle with multiplier {multiplier}"),
                )
            } else {
                CheckOutcome::fail(
                    NAME,
                    "witness cycle fails verification".into(),
                    json!({
                        "arcs": witness.steps().iter().map(|s| s.arc).collect::<Vec<_>>(),
                        "claimed": multiplier.to_string(),
                    }),
                )
            }
        }
    }
}

/// No bicycle support contains the support of a breakeven cycle.
pub fn check_bicycle_exclusion(
    d: &ArcParamDigraph,
    supports: &[CombSupport],
    enum_cap: usize,
) -> Result<CheckOutcome> {
    const NAME: &str = "bicycle-breakeven-exclusion";
    let mut breakeven_supports: Vec<Vec<usize>> = Vec::new();
    for c in enumerate_simple_cycles(d, enum_cap)? {
        if classify_cycle(d, &c)? == CycleClass::Breakeven {
            let mut arcs: Vec<usize> = c.steps().iter().map(|s| s.arc).collect();
            arcs.sort_unstable();
            breakeven_supports.push(arcs);
        }
    }
    let mut bicycles = 0usize;
    for h in supports.iter().filter(|h| h.is_bicycle()) {
        bicycles += 1;
        let sup = h.signed().support();
        for b in &breakeven_supports {
            if b.iter().all(|a| sup.contains(a)) {
                return Ok(CheckOutcome::fail(
                    NAME,
                    "a bicycle contains a breakeven cycle".into(),
                    json!({ "bicycle_support": sup, "breakeven_cycle": b }),
                ));
            }
        }
    }
    Ok(CheckOutcome::pass(
        NAME,
        format!("{bicycles} bicycles against {} breakeven cycles", breakeven_supports.len()),
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub oracle_cap: usize,
    pub enum_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            seed: 0,
            oracle_cap: DEFAULT_ORACLE_CAP,
            enum_cap: DEFAULT_CYCLE_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub seed: u64,
    pub supports: usize,
    pub breakeven_cycles: usize,
    pub bicycles: usize,
    pub checks: Vec<CheckOutcome>,
}

/// Runs the whole suite on one instance. Capacity errors propagate so the
/// caller can distinguish "too big" from "failed".
pub fn run_all(d: &ArcParamDigraph, opts: &VerifyOptions) -> Result<VerifyReport> {
    let supports = enumerate_comb_support_with_cap(d, opts.enum_cap)?;
    let bicycles = supports.iter().filter(|h| h.is_bicycle()).count();
    let checks = vec![
        check_support_oracle(d, &supports, opts.oracle_cap)?,
        check_balance_membership(d, &supports, opts.trials, opts.seed),
        check_bond_round_trip(d, opts.trials, opts.seed)?,
        check_closure_sampling(d, opts.trials, opts.seed)?,
        check_breakeven_witness(d),
        check_bicycle_exclusion(d, &supports, opts.enum_cap)?,
    ];
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        seed: opts.seed,
        supports: supports.len(),
        breakeven_cycles: supports.len() - bicycles,
        bicycles,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gencycle::enumerate_comb_support;

    #[test]
    fn fixture_suites_pass() {
        for d in [fixtures::g1(), fixtures::g2(), fixtures::digon(), fixtures::two_loops()] {
            let report = run_all(&d, &VerifyOptions { trials: 40, ..Default::default() }).unwrap();
            assert!(report.passed, "all checks pass on {d:?}: {report:?}");
        }
        let report =
            run_all(&fixtures::g2(), &VerifyOptions { trials: 10, ..Default::default() }).unwrap();
        assert_eq!(report.bicycles, 1);
        assert_eq!(report.supports, 1);
    }

    #[test]
    fn corrupted_flow_is_caught() {
        let d = fixtures::g2();
        let mut supports = enumerate_comb_support(&d).unwrap();
        let mut flow = supports[0].flow().clone();
        flow[1] = Rat::from_int(7);
        supports[0] = CombSupport::with_parts(supports[0].shape().clone(), flow);
        let outcome = check_balance_membership(&d, &supports, 50, 0);
        assert!(!outcome.passed);
        assert!(outcome.counterexample.is_some());
    }

    #[test]
    fn oracle_mismatch_is_reported() {
        let d = fixtures::g2();
        // Hide the only support from the enumeration side.
        let outcome = check_support_oracle(&d, &[], DEFAULT_ORACLE_CAP).unwrap();
        assert!(!outcome.passed);
        let ce = outcome.counterexample.unwrap();
        assert_eq!(ce["only_in_oracle"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn report_serializes() {
        let report = run_all(
            &fixtures::g1(),
            &VerifyOptions { trials: 10, ..Default::default() },
        )
        .unwrap();
        let js = serde_json::to_value(&report).unwrap();
        assert_eq!(js["passed"], serde_json::Value::Bool(true));
        assert!(js["checks"].as_array().unwrap().len() >= 6);
    }
}
