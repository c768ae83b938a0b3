//! Combinatorics of the flow space `Ker(N)`: cycle classification by
//! multiplier, inner flows along walks, enumeration of the support-minimal
//! kernel vectors as breakeven cycles and bicycles, and membership tests for
//! prescribed bicircular balances.
//!
//! Canonical flow normalization: the first nonzero entry in arc-index order
//! is 1 (a Euclidean normalization would leave the rationals). Prescribed
//! balance values are relative to this normalization; zero prescriptions are
//! unaffected by scaling.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::exact::{kernel_basis, solve, Rat, RatMatrix, RatVector};
use crate::graph::{ArcParamDigraph, SignedArcSet, Walk, WalkStep};
use crate::par;
use crate::{Error, Result};

/// Cycle class by exact comparison of the multiplier with 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleClass {
    Lossy,
    Gainy,
    Breakeven,
}

pub fn classify_cycle(d: &ArcParamDigraph, c: &Walk) -> Result<CycleClass> {
    if !c.is_closed() {
        return Err(Error::WalkNotClosed { start: c.start(), end: c.end() });
    }
    let lam = c.multiplier(d)?;
    let one = Rat::one();
    Ok(if lam == one {
        CycleClass::Breakeven
    } else if lam > one {
        CycleClass::Gainy
    } else {
        CycleClass::Lossy
    })
}

/// The one-dimensional space of flows conserved at the interior junctions of
/// a walk, fixed by the value `f0` on the first arc. Consecutive values obey
/// a four-case chain rule driven by the traversal directions; the sign
/// pattern is `sign(W)` scaled by the sign of `f0` relative to the first
/// direction.
pub fn inner_flow(d: &ArcParamDigraph, w: &Walk, f0: &Rat) -> Result<RatVector> {
    assert!(!f0.is_zero(), "inner flow seed must be nonzero");
    let steps = w.steps();
    if !w.is_arc_simple() {
        let mut seen = HashSet::new();
        let dup = steps.iter().find(|s| !seen.insert(s.arc)).expect("duplicate exists");
        return Err(Error::WalkRepeatsArc { arc: dup.arc });
    }
    let zero_div = |arc: usize| Error::ZeroInversion {
        what: format!("lambda of arc {arc} on a conserved chain"),
    };
    let mut f = RatVector::zeros(d.m());
    let mut cur = f0.clone();
    f[steps[0].arc] = cur.clone();
    for pair in steps.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let lam_prev = &d.arc(prev.arc).lambda;
        let lam_next = &d.arc(next.arc).lambda;
        cur = match (prev.dir, next.dir) {
            (1, 1) => cur.checked_div(lam_next).map_err(|_| zero_div(next.arc))?,
            (1, -1) => -&cur,
            (-1, 1) => (-&(lam_prev * &cur))
                .checked_div(lam_next)
                .map_err(|_| zero_div(next.arc))?,
            (-1, -1) => lam_prev * &cur,
            _ => unreachable!("directions are validated to +-1"),
        };
        f[next.arc] = cur.clone();
    }
    Ok(f)
}

/// Default ceiling on enumerated cycles and supports.
pub const DEFAULT_CYCLE_CAP: usize = 10_000;

/// All simple cycles of the underlying graph, each reported once, oriented
/// so its lowest arc index is traversed forward. Loops are length-one
/// cycles.
pub fn enumerate_simple_cycles(d: &ArcParamDigraph, cap: usize) -> Result<Vec<Walk>> {
    let m = d.m();
    let mut out = Vec::new();
    for a0 in 0..m {
        let first = d.arc(a0);
        if first.is_loop() {
            out.push(Walk::new(d, vec![WalkStep::new(a0, 1)]).expect("loop walk valid"));
            continue;
        }
        // Depth-first search over arcs with larger indices; vertices stay
        // distinct, so each cycle appears exactly once with a0 minimal.
        let target = first.tail;
        let mut steps = vec![WalkStep::new(a0, 1)];
        let mut visited: HashSet<usize> = HashSet::from([first.tail, first.head]);
        extend_cycles(d, a0, target, first.head, &mut steps, &mut visited, &mut out, cap)?;
    }
    if out.len() > cap {
        return Err(Error::CapacityExceeded {
            what: "simple cycle enumeration".into(),
            requested: out.len(),
            limit: cap,
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend_cycles(
    d: &ArcParamDigraph,
    a0: usize,
    target: usize,
    current: usize,
    steps: &mut Vec<WalkStep>,
    visited: &mut HashSet<usize>,
    out: &mut Vec<Walk>,
    cap: usize,
) -> Result<()> {
    for b in (a0 + 1)..d.m() {
        let arc = d.arc(b);
        if arc.is_loop() {
            continue;
        }
        for dir in [1i8, -1] {
            let (from, to) = if dir == 1 { (arc.tail, arc.head) } else { (arc.head, arc.tail) };
            if from != current {
                continue;
            }
            if to == target {
                steps.push(WalkStep::new(b, dir));
                if out.len() >= cap {
                    return Err(Error::CapacityExceeded {
                        what: "simple cycle enumeration".into(),
                        requested: out.len() + 1,
                        limit: cap,
                    });
                }
                out.push(Walk::new(d, steps.clone()).expect("cycle walk valid"));
                steps.pop();
            } else if !visited.contains(&to) {
                steps.push(WalkStep::new(b, dir));
                visited.insert(to);
                extend_cycles(d, a0, target, to, steps, visited, out, cap)?;
                visited.remove(&to);
                steps.pop();
            }
        }
    }
    Ok(())
}

/// Structural description of a support-minimal flow: a breakeven cycle, or a
/// gainy cycle and a lossy cycle glued along a shared path, a shared vertex,
/// or a connector walk oriented from the lossy to the gainy cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SupportShape {
    Breakeven { cycle: Walk },
    Bicycle { gainy: Walk, connector: Option<Walk>, lossy: Walk },
}

/// A combinatorial support element with its canonical signed support and
/// canonical flow (first nonzero entry 1, conservation verified exactly).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CombSupport {
    shape: SupportShape,
    signed: SignedArcSet,
    flow: RatVector,
}

impl CombSupport {
    pub fn shape(&self) -> &SupportShape {
        &self.shape
    }

    pub fn signed(&self) -> &SignedArcSet {
        &self.signed
    }

    pub fn flow(&self) -> &RatVector {
        &self.flow
    }

    pub fn is_bicycle(&self) -> bool {
        matches!(self.shape, SupportShape::Bicycle { .. })
    }

    /// Assembles a support from parts without rederiving the flow; the
    /// negative controls in the consistency suite corrupt flows through
    /// this hook.
    #[cfg(test)]
    pub(crate) fn with_parts(shape: SupportShape, flow: RatVector) -> CombSupport {
        let signed = SignedArcSet::of_vector(&flow);
        CombSupport { shape, signed, flow }
    }
}

fn not_circuit(reason: impl Into<String>) -> Error {
    Error::NotACircuit { reason: reason.into() }
}

/// Inner flow seeded so the sign pattern equals the walk's own signs.
fn walk_flow(d: &ArcParamDigraph, w: &Walk) -> Result<RatVector> {
    let seed = Rat::from_int(w.steps()[0].dir as i64);
    inner_flow(d, w, &seed)
}

fn inner_vertices(w: &Walk) -> BTreeSet<usize> {
    let v = w.vertices();
    if w.is_closed() {
        v[..v.len() - 1].iter().copied().collect()
    } else {
        v.iter().copied().collect()
    }
}

/// The unique flow supported on the given shape, scaled so its first nonzero
/// entry is 1. Construction: inner flows on each piece, with the connector
/// and lossy coefficients chosen to cancel the excesses at the attachment
/// vertices; conservation of the result is verified exactly.
pub fn flow_of_support(d: &ArcParamDigraph, shape: &SupportShape) -> Result<RatVector> {
    let f = match shape {
        SupportShape::Breakeven { cycle } => {
            if !cycle.is_simple_cycle() {
                return Err(not_circuit("breakeven piece is not a simple cycle"));
            }
            if classify_cycle(d, cycle)? != CycleClass::Breakeven {
                return Err(not_circuit("cycle multiplier is not 1"));
            }
            walk_flow(d, cycle)?
        }
        SupportShape::Bicycle { gainy, connector, lossy } => {
            for (w, want, name) in [
                (gainy, CycleClass::Gainy, "gainy"),
                (lossy, CycleClass::Lossy, "lossy"),
            ] {
                if !w.is_simple_cycle() {
                    return Err(not_circuit(format!("{name} piece is not a simple cycle")));
                }
                if classify_cycle(d, w)? != want {
                    return Err(not_circuit(format!("{name} piece has the wrong multiplier class")));
                }
            }
            let vg = inner_vertices(gainy);
            let vl = inner_vertices(lossy);
            match connector {
                None => {
                    let common: Vec<usize> = vg.intersection(&vl).copied().collect();
                    let base = *common
                        .first()
                        .ok_or_else(|| not_circuit("cycles share no vertex and no connector given"))?;
                    let fg = walk_flow(d, &gainy.rotated_to(base))?;
                    let fl = walk_flow(d, &lossy.rotated_to(base))?;
                    let wg = d.excess(&fg, base);
                    let wl = d.excess(&fl, base);
                    let beta = (-&wg)
                        .checked_div(&wl)
                        .map_err(|_| not_circuit("lossy excess vanishes at the base"))?;
                    if !beta.is_positive() {
                        return Err(not_circuit("excesses at the base do not oppose"));
                    }
                    fg.add(&fl.scale(&beta))
                }
                Some(w) => {
                    let wv = w.vertices();
                    let distinct: HashSet<_> = wv.iter().collect();
                    if w.is_closed() || distinct.len() != wv.len() {
                        return Err(not_circuit("connector is not a simple open path"));
                    }
                    if !vl.contains(&w.start()) || !vg.contains(&w.end()) {
                        return Err(not_circuit(
                            "connector must run from the lossy cycle to the gainy cycle",
                        ));
                    }
                    for v in &wv[1..wv.len() - 1] {
                        if vg.contains(v) || vl.contains(v) {
                            return Err(not_circuit("connector interior touches a cycle"));
                        }
                    }
                    if vg.contains(&w.start()) || vl.contains(&w.end()) {
                        return Err(not_circuit("connector endpoint lies on both cycles"));
                    }
                    let cycle_arcs: HashSet<usize> = gainy
                        .steps()
                        .iter()
                        .chain(lossy.steps())
                        .map(|s| s.arc)
                        .collect();
                    if w.steps().iter().any(|s| cycle_arcs.contains(&s.arc)) {
                        return Err(not_circuit("connector reuses a cycle arc"));
                    }
                    let fg = walk_flow(d, &gainy.rotated_to(w.end()))?;
                    let fl = walk_flow(d, &lossy.rotated_to(w.start()))?;
                    let g = walk_flow(d, w)?;
                    let alpha = (-&d.excess(&fg, w.end()))
                        .checked_div(&d.excess(&g, w.end()))
                        .map_err(|_| not_circuit("connector excess vanishes at its end"))?;
                    let beta = (-&(&alpha * &d.excess(&g, w.start())))
                        .checked_div(&d.excess(&fl, w.start()))
                        .map_err(|_| not_circuit("lossy excess vanishes at the attachment"))?;
                    if !alpha.is_positive() || !beta.is_positive() {
                        return Err(not_circuit("attachment excesses do not oppose"));
                    }
                    fg.add(&g.scale(&alpha)).add(&fl.scale(&beta))
                }
            }
        }
    };
    let excess = d.excess_vector(&f);
    if let Some(&v) = excess.support().first() {
        return Err(not_circuit(format!("conservation fails at vertex {}", v + 1)));
    }
    let (_, lead) = f.first_nonzero().expect("flow is nonzero");
    let inv = lead.recip().expect("leading entry nonzero");
    Ok(f.scale(&inv))
}

/// Enumerates the combinatorial support: all breakeven cycles plus all
/// bicycles (shared-interval, shared-vertex, and connector kinds), each with
/// its canonical flow, deduplicated by signed support and sorted by support
/// then signs.
pub fn enumerate_comb_support(d: &ArcParamDigraph) -> Result<Vec<CombSupport>> {
    enumerate_comb_support_with_cap(d, DEFAULT_CYCLE_CAP)
}

pub fn enumerate_comb_support_with_cap(d: &ArcParamDigraph, cap: usize) -> Result<Vec<CombSupport>> {
    let cycles = enumerate_simple_cycles(d, cap)?;
    let mut out: Vec<CombSupport> = Vec::new();
    let mut seen: BTreeSet<SignedArcSet> = BTreeSet::new();
    let push = |shape: SupportShape, out: &mut Vec<CombSupport>, seen: &mut BTreeSet<SignedArcSet>| -> Result<()> {
        let flow = flow_of_support(d, &shape)?;
        let signed = SignedArcSet::of_vector(&flow);
        if seen.insert(signed.clone()) {
            if out.len() >= cap {
                return Err(Error::CapacityExceeded {
                    what: "combinatorial support enumeration".into(),
                    requested: out.len() + 1,
                    limit: cap,
                });
            }
            out.push(CombSupport { shape, signed, flow });
        }
        Ok(())
    };

    // Both orientations of every cycle, classified once.
    let mut gainy: Vec<Walk> = Vec::new();
    let mut lossy: Vec<Walk> = Vec::new();
    for c in &cycles {
        match classify_cycle(d, c)? {
            CycleClass::Breakeven => {
                push(SupportShape::Breakeven { cycle: c.clone() }, &mut out, &mut seen)?;
            }
            CycleClass::Gainy => gainy.push(c.clone()),
            CycleClass::Lossy => lossy.push(c.clone()),
        }
        // The reversal has the reciprocal multiplier; skip it when a zero
        // multiplier cannot be inverted (zero-gain loops).
        let rev = c.reversed();
        match classify_cycle(d, &rev) {
            Ok(CycleClass::Gainy) => gainy.push(rev),
            Ok(CycleClass::Lossy) => lossy.push(rev),
            _ => {}
        }
    }

    for g in &gainy {
        let ag = arc_directions(g);
        let vg = inner_vertices(g);
        for l in &lossy {
            let al = arc_directions(l);
            let vl = inner_vertices(l);
            let shared: Vec<usize> = ag.keys().filter(|a| al.contains_key(a)).copied().collect();
            if !shared.is_empty() {
                if shared.iter().any(|a| ag[a] != al[a]) {
                    continue;
                }
                if !shared_run_is_interval(g, &shared) || !shared_run_is_interval(l, &shared) {
                    continue;
                }
                // Vertex overlap must be exactly the shared path's vertices.
                let shared_set: HashSet<usize> = shared.iter().copied().collect();
                let mut path_vertices: BTreeSet<usize> = BTreeSet::new();
                for s in g.steps() {
                    if shared_set.contains(&s.arc) {
                        let arc = d.arc(s.arc);
                        path_vertices.insert(arc.tail);
                        path_vertices.insert(arc.head);
                    }
                }
                let overlap: BTreeSet<usize> = vg.intersection(&vl).copied().collect();
                if overlap != path_vertices {
                    continue;
                }
                push(
                    SupportShape::Bicycle { gainy: g.clone(), connector: None, lossy: l.clone() },
                    &mut out,
                    &mut seen,
                )?;
            } else {
                let overlap: Vec<usize> = vg.intersection(&vl).copied().collect();
                match overlap.len() {
                    1 => push(
                        SupportShape::Bicycle {
                            gainy: g.clone(),
                            connector: None,
                            lossy: l.clone(),
                        },
                        &mut out,
                        &mut seen,
                    )?,
                    0 => {
                        for w in connector_paths(d, &vl, &vg, &ag, &al) {
                            push(
                                SupportShape::Bicycle {
                                    gainy: g.clone(),
                                    connector: Some(w),
                                    lossy: l.clone(),
                                },
                                &mut out,
                                &mut seen,
                            )?;
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    out.sort_by(|a, b| {
        (a.signed.support(), a.signed.signs().to_vec())
            .cmp(&(b.signed.support(), b.signed.signs().to_vec()))
    });
    Ok(out)
}

fn arc_directions(w: &Walk) -> HashMap<usize, i8> {
    w.steps().iter().map(|s| (s.arc, s.dir)).collect()
}

/// Do the given arcs occupy one contiguous cyclic run of the cycle's steps?
fn shared_run_is_interval(cycle: &Walk, shared: &[usize]) -> bool {
    let shared_set: HashSet<usize> = shared.iter().copied().collect();
    let flags: Vec<bool> = cycle.steps().iter().map(|s| shared_set.contains(&s.arc)).collect();
    let k = flags.len();
    let blocks = (0..k)
        .filter(|&i| flags[i] && !flags[(i + k - 1) % k])
        .count();
    blocks <= 1
}

/// Every simple path from a vertex of the lossy cycle to a vertex of the
/// gainy cycle whose interior avoids both cycles and whose arcs belong to
/// neither. Paths are emitted in the flow direction (lossy to gainy).
fn connector_paths(
    d: &ArcParamDigraph,
    from: &BTreeSet<usize>,
    to: &BTreeSet<usize>,
    gainy_arcs: &HashMap<usize, i8>,
    lossy_arcs: &HashMap<usize, i8>,
) -> Vec<Walk> {
    let mut out = Vec::new();
    let forbidden: HashSet<usize> =
        gainy_arcs.keys().chain(lossy_arcs.keys()).copied().collect();
    for &start in from {
        let mut steps: Vec<WalkStep> = Vec::new();
        let mut visited: HashSet<usize> = HashSet::from([start]);
        extend_connectors(d, start, from, to, &forbidden, &mut steps, &mut visited, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_connectors(
    d: &ArcParamDigraph,
    current: usize,
    from: &BTreeSet<usize>,
    to: &BTreeSet<usize>,
    forbidden: &HashSet<usize>,
    steps: &mut Vec<WalkStep>,
    visited: &mut HashSet<usize>,
    out: &mut Vec<Walk>,
) {
    for b in 0..d.m() {
        let arc = d.arc(b);
        if arc.is_loop() || forbidden.contains(&b) || steps.iter().any(|s| s.arc == b) {
            continue;
        }
        for dir in [1i8, -1] {
            let (tail, head) = if dir == 1 { (arc.tail, arc.head) } else { (arc.head, arc.tail) };
            if tail != current {
                continue;
            }
            if to.contains(&head) {
                steps.push(WalkStep::new(b, dir));
                out.push(Walk::new(d, steps.clone()).expect("connector walk valid"));
                steps.pop();
            } else if !from.contains(&head) && !visited.contains(&head) {
                steps.push(WalkStep::new(b, dir));
                visited.insert(head);
                extend_connectors(d, head, from, to, forbidden, steps, visited, out);
                visited.remove(&head);
                steps.pop();
            }
        }
    }
}

/// `<x, f(H)>` under the canonical normalization of `f(H)`.
pub fn bicircular_balance(d: &ArcParamDigraph, h: &CombSupport, x: &RatVector) -> Rat {
    assert_eq!(x.len(), d.m(), "arc vector length mismatch");
    x.dot(&h.flow)
}

/// Per-support balance prescription keyed by position in the enumerated
/// combinatorial support; missing entries mean zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaSpec {
    values: BTreeMap<usize, Rat>,
}

impl DeltaSpec {
    pub fn zero() -> Self {
        DeltaSpec::default()
    }

    pub fn set(&mut self, support_index: usize, value: Rat) {
        if value.is_zero() {
            self.values.remove(&support_index);
        } else {
            self.values.insert(support_index, value);
        }
    }

    pub fn with(mut self, support_index: usize, value: Rat) -> Self {
        self.set(support_index, value);
        self
    }

    pub fn get(&self, support_index: usize) -> Rat {
        self.values.get(&support_index).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.values.iter().map(|(&k, v)| (k, v))
    }
}

/// True iff `x <= c` componentwise and every enumerated support H satisfies
/// `<x, f(H)> = delta_H`.
pub fn is_generalized_delta_bond(
    d: &ArcParamDigraph,
    c: &RatVector,
    spec: &DeltaSpec,
    x: &RatVector,
) -> Result<bool> {
    assert_eq!(c.len(), d.m(), "capacity length mismatch");
    assert_eq!(x.len(), d.m(), "arc vector length mismatch");
    if !x.le(c) {
        return Ok(false);
    }
    let supports = enumerate_comb_support(d)?;
    Ok(supports
        .iter()
        .enumerate()
        .all(|(i, h)| x.dot(&h.flow) == spec.get(i)))
}

/// Solves for any vector realizing all prescribed balances, or reports that
/// the prescription is inconsistent (the balance functionals can be linearly
/// dependent). A witness ignores capacities.
pub fn delta_witness(
    d: &ArcParamDigraph,
    supports: &[CombSupport],
    spec: &DeltaSpec,
) -> Option<RatVector> {
    if supports.is_empty() {
        return Some(RatVector::zeros(d.m()));
    }
    let rows: Vec<RatVector> = supports.iter().map(|h| h.flow.clone()).collect();
    let rhs: RatVector = (0..supports.len()).map(|i| spec.get(i)).collect();
    solve(&RatMatrix::from_rows(rows), &rhs)
}

/// Default ceiling on the arc count for the subset oracle.
pub const DEFAULT_ORACLE_CAP: usize = 14;

pub fn signed_circuit_oracle(d: &ArcParamDigraph) -> Result<Vec<SignedArcSet>> {
    signed_circuit_oracle_with_cap(d, DEFAULT_ORACLE_CAP)
}

/// Brute-force support-minimal kernel supports: for each arc subset in
/// increasing size, keep it when the kernel of the corresponding column
/// submatrix is one-dimensional and nowhere zero on the subset. Signs are
/// canonicalized to a positive lowest-index arc; output sorted by support
/// then signs.
pub fn signed_circuit_oracle_with_cap(d: &ArcParamDigraph, cap: usize) -> Result<Vec<SignedArcSet>> {
    let m = d.m();
    if m > cap {
        return Err(Error::CapacityExceeded {
            what: "arc subset oracle".into(),
            requested: m,
            limit: cap,
        });
    }
    let nmat = d.network_matrix();
    let mut found: Vec<(u32, SignedArcSet)> = Vec::new();
    for size in 1..=m {
        let masks: Vec<u32> = (1u32..(1 << m))
            .filter(|mask| mask.count_ones() as usize == size)
            .filter(|mask| !found.iter().any(|(f, _)| mask & f == *f))
            .collect();
        let batch = par::filter_map_slice(&masks, |&mask| {
            let cols: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
            let sub = RatMatrix::from_cols(cols.iter().map(|&a| nmat.col(a)).collect());
            let ker = kernel_basis(&sub);
            if ker.len() != 1 || ker[0].support().len() != cols.len() {
                return None;
            }
            let mut full = RatVector::zeros(m);
            for (slot, &a) in cols.iter().enumerate() {
                full[a] = ker[0][slot].clone();
            }
            Some((mask, SignedArcSet::of_vector(&full).canonical()))
        });
        found.extend(batch);
    }
    let mut out: Vec<SignedArcSet> = found.into_iter().map(|(_, s)| s).collect();
    out.sort_by(|a, b| (a.support(), a.signs().to_vec()).cmp(&(b.support(), b.signs().to_vec())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(xs: &[i64]) -> RatVector {
        RatVector::from_ints(xs)
    }

    fn walk(d: &ArcParamDigraph, steps: &[(usize, i8)]) -> Walk {
        Walk::new(d, steps.iter().map(|&(a, dir)| WalkStep::new(a, dir)).collect()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let g1 = fixtures::g1();
        let tri = walk(&g1, &[(0, 1), (1, 1), (2, -1)]);
        assert_eq!(classify_cycle(&g1, &tri).unwrap(), CycleClass::Breakeven);
        let g2 = fixtures::g2();
        assert_eq!(
            classify_cycle(&g2, &walk(&g2, &[(0, 1), (1, 1)])).unwrap(),
            CycleClass::Gainy
        );
        assert_eq!(
            classify_cycle(&g2, &walk(&g2, &[(2, 1), (1, 1)])).unwrap(),
            CycleClass::Lossy
        );
        // Open walks are not cycles.
        assert!(matches!(
            classify_cycle(&g1, &walk(&g1, &[(0, 1)])),
            Err(Error::WalkNotClosed { .. })
        ));
    }

    #[test]
    fn inner_flow_examples() {
        let g1 = fixtures::g1();
        let w = walk(&g1, &[(0, 1), (1, 1)]);
        assert_eq!(inner_flow(&g1, &w, &Rat::from_int(3)).unwrap(), rv(&[3, 1, 0]));
        // Interior conservation.
        let f = inner_flow(&g1, &w, &Rat::from_int(3)).unwrap();
        assert!(g1.excess(&f, 2).is_zero());
        // Single arc: value passes through.
        let single = walk(&g1, &[(1, 1)]);
        assert_eq!(inner_flow(&g1, &single, &Rat::from_int(5)).unwrap(), rv(&[0, 5, 0]));
        // Linearity in the seed.
        let f2 = inner_flow(&g1, &w, &Rat::from_int(6)).unwrap();
        assert_eq!(f2, f.scale(&Rat::from_int(2)));
    }

    #[test]
    fn inner_flow_chain_rule_all_cases() {
        // Walk with all four direction pairs, checked by interior excesses.
        let d = ArcParamDigraph::from_triples(
            5,
            &[
                (1, 2, Rat::from_int(2)),
                (2, 3, Rat::from_int(3)),
                (4, 3, Rat::from_int(5)),
                (4, 5, Rat::new(1, 2)),
            ],
        )
        .unwrap();
        let w = walk(&d, &[(0, 1), (1, 1), (2, -1), (3, 1)]);
        let f = inner_flow(&d, &w, &Rat::from_int(6)).unwrap();
        for v in [2, 3, 4] {
            assert!(d.excess(&f, v).is_zero(), "conservation at vertex {v}");
        }
        // Closed form along the walk.
        let k = Rat::from_int(2); // forward first step contributes lambda^1, forward last lambda^0
        let lam_w = w.multiplier(&d).unwrap();
        let expect_last = &(&k * &lam_w.recip().unwrap()) * &Rat::from_int(6);
        assert_eq!(f[3], expect_last);
    }

    #[test]
    fn inner_flow_walk_formula_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 100 {
            let d = fixtures::random_lambda_graph(&mut rng, 5, 8);
            let Some(w) = fixtures::random_walk(&mut rng, &d, 6) else { continue };
            let f0 = Rat::from_int(3);
            let f = inner_flow(&d, &w, &f0).unwrap();
            let steps = w.steps();
            let (w0, wk) = (steps[0].dir, steps[steps.len() - 1].dir);
            let lam0 = &d.arc(steps[0].arc).lambda;
            let lamk = &d.arc(steps[steps.len() - 1].arc).lambda;
            let mut k = Rat::from_int((w0 * wk) as i64);
            if w0 > 0 {
                k = &k * lam0;
            }
            if wk < 0 {
                k = &k * &lamk.recip().unwrap();
            }
            let lam_w = w.multiplier(&d).unwrap();
            assert_eq!(f[steps[steps.len() - 1].arc], &(&k * &lam_w.recip().unwrap()) * &f0);
            // Junctions visited exactly once in the interior conserve.
            let vs = w.vertices();
            for i in 1..vs.len() - 1 {
                let v = vs[i];
                if vs.iter().filter(|&&u| u == v).count() == 1 {
                    assert!(d.excess(&f, v).is_zero());
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn simple_cycle_enumeration() {
        let g1 = fixtures::g1();
        let cycles = enumerate_simple_cycles(&g1, 100).unwrap();
        assert_eq!(cycles.len(), 1);
        assert!(cycles[0].is_simple_cycle());
        let g2 = fixtures::g2();
        let cycles = enumerate_simple_cycles(&g2, 100).unwrap();
        assert_eq!(cycles.len(), 3, "two digon-style cycles plus the parallel pair");
        let loops = enumerate_simple_cycles(&fixtures::two_loops(), 100).unwrap();
        assert_eq!(loops.len(), 2);
        assert!(matches!(
            enumerate_simple_cycles(&g2, 1),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn canonical_flows() {
        let g1 = fixtures::g1();
        let tri = walk(&g1, &[(0, 1), (1, 1), (2, -1)]);
        let f = flow_of_support(&g1, &SupportShape::Breakeven { cycle: tri }).unwrap();
        assert_eq!(f, RatVector::new(vec![Rat::one(), Rat::new(1, 3), Rat::new(-1, 3)]));

        let g2 = fixtures::g2();
        let shape = SupportShape::Bicycle {
            gainy: walk(&g2, &[(0, 1), (1, 1)]),
            connector: None,
            lossy: walk(&g2, &[(2, 1), (1, 1)]),
        };
        assert_eq!(flow_of_support(&g2, &shape).unwrap(), rv(&[1, 3, 2]));

        let tl = fixtures::two_loops();
        let shape = SupportShape::Bicycle {
            gainy: walk(&tl, &[(0, 1)]),
            connector: None,
            lossy: walk(&tl, &[(1, 1)]),
        };
        assert_eq!(flow_of_support(&tl, &shape).unwrap(), rv(&[1, 3]));
    }

    #[test]
    fn flow_of_support_rejects_wrong_shapes() {
        let g2 = fixtures::g2();
        // Gainy piece is actually lossy.
        let shape = SupportShape::Bicycle {
            gainy: walk(&g2, &[(2, 1), (1, 1)]),
            connector: None,
            lossy: walk(&g2, &[(0, 1), (1, 1)]),
        };
        assert!(matches!(flow_of_support(&g2, &shape), Err(Error::NotACircuit { .. })));
        // Breakeven claim on a gainy cycle.
        let shape = SupportShape::Breakeven { cycle: walk(&g2, &[(0, 1), (1, 1)]) };
        assert!(matches!(flow_of_support(&g2, &shape), Err(Error::NotACircuit { .. })));
    }

    #[test]
    fn connector_bicycle_flow() {
        // Gainy loop at 1, lossy loop at 3, connector 3 -> 2 -> 1.
        let d = ArcParamDigraph::from_triples(
            3,
            &[
                (1, 1, Rat::from_int(2)),
                (3, 3, Rat::new(1, 2)),
                (3, 2, Rat::one()),
                (2, 1, Rat::one()),
            ],
        )
        .unwrap();
        let shape = SupportShape::Bicycle {
            gainy: walk(&d, &[(0, 1)]),
            connector: Some(walk(&d, &[(2, 1), (3, 1)])),
            lossy: walk(&d, &[(1, 1)]),
        };
        assert_eq!(flow_of_support(&d, &shape).unwrap(), rv(&[1, 2, 1, 1]));
        let supports = enumerate_comb_support(&d).unwrap();
        assert_eq!(supports.len(), 1);
        assert_eq!(supports[0].flow(), &rv(&[1, 2, 1, 1]));
        assert!(supports[0].is_bicycle());
    }

    #[test]
    fn all_connectors_are_enumerated() {
        // Two disjoint loops joined by both a direct arc and a two-arc path;
        // a third circuit is the breakeven cycle through both connectors.
        let d = ArcParamDigraph::from_triples(
            3,
            &[
                (1, 1, Rat::from_int(2)),
                (3, 3, Rat::new(1, 2)),
                (3, 1, Rat::one()),
                (3, 2, Rat::one()),
                (2, 1, Rat::one()),
            ],
        )
        .unwrap();
        let supports = enumerate_comb_support(&d).unwrap();
        assert_eq!(supports.len(), 3);
        let bicycles = supports.iter().filter(|h| h.is_bicycle()).count();
        assert_eq!(bicycles, 2);
        let oracle = signed_circuit_oracle(&d).unwrap();
        let signs: Vec<SignedArcSet> = supports.iter().map(|h| h.signed().clone()).collect();
        assert_eq!(signs, oracle);
    }

    #[test]
    fn enumerate_matches_fixtures() {
        let supports = enumerate_comb_support(&fixtures::g1()).unwrap();
        assert_eq!(supports.len(), 1);
        assert!(!supports[0].is_bicycle());
        assert_eq!(supports[0].signed().signs(), &[1, 1, -1]);

        let supports = enumerate_comb_support(&fixtures::g2()).unwrap();
        assert_eq!(supports.len(), 1);
        assert!(supports[0].is_bicycle());
        assert_eq!(supports[0].signed().signs(), &[1, 1, 1]);
        assert_eq!(supports[0].flow(), &rv(&[1, 3, 2]));

        let supports = enumerate_comb_support(&fixtures::two_loops()).unwrap();
        assert_eq!(supports.len(), 1);
        assert_eq!(supports[0].flow(), &rv(&[1, 3]));

        let supports = enumerate_comb_support(&fixtures::digon()).unwrap();
        assert_eq!(supports.len(), 1);
        assert_eq!(supports[0].signed().signs(), &[1, 1]);
        assert_eq!(supports[0].flow(), &rv(&[1, 1]));
    }

    #[test]
    fn oracle_examples() {
        let sets = signed_circuit_oracle(&fixtures::g1()).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].signs(), &[1, 1, -1]);
        let sets = signed_circuit_oracle(&fixtures::g2()).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].signs(), &[1, 1, 1]);
        let sets = signed_circuit_oracle(&fixtures::digon()).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].signs(), &[1, 1]);
        assert!(signed_circuit_oracle_with_cap(&fixtures::g1(), 2).is_err());
    }

    #[test]
    fn enumeration_agrees_with_oracle_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..15 {
            let d = fixtures::random_lambda_graph(&mut rng, 4, 6);
            let supports = enumerate_comb_support(&d).unwrap();
            let signs: Vec<SignedArcSet> = supports.iter().map(|h| h.signed().clone()).collect();
            let oracle = signed_circuit_oracle(&d).unwrap();
            assert_eq!(signs, oracle, "mismatch on {:?}", d);
        }
    }

    #[test]
    fn balance_examples() {
        let g1 = fixtures::g1();
        let h = &enumerate_comb_support(&g1).unwrap()[0];
        assert_eq!(bicircular_balance(&g1, h, &rv(&[1, -2, 1])), Rat::zero());
        let self_pair = bicircular_balance(&g1, h, h.flow());
        assert_eq!(self_pair, Rat::one() + Rat::new(1, 9) + Rat::new(1, 9));

        let g2 = fixtures::g2();
        let h = &enumerate_comb_support(&g2).unwrap()[0];
        assert_eq!(bicircular_balance(&g2, h, &rv(&[-4, 2, -1])), Rat::zero());
    }

    #[test]
    fn delta_bond_membership() {
        let g2 = fixtures::g2();
        let x = rv(&[-4, 2, -1]);
        let spec = DeltaSpec::zero();
        assert!(is_generalized_delta_bond(&g2, &rv(&[0, 3, 0]), &spec, &x).unwrap());
        // Tighter capacity on the first arc refutes membership.
        assert!(!is_generalized_delta_bond(&g2, &rv(&[-5, 3, 0]), &spec, &x).unwrap());
        // A bond sitting exactly on its capacities is a member.
        assert!(is_generalized_delta_bond(&g2, &x, &spec, &x).unwrap());
        // Nonzero prescription.
        let supports = enumerate_comb_support(&g2).unwrap();
        let spec = DeltaSpec::zero().with(0, Rat::from_int(5));
        let w = delta_witness(&g2, &supports, &spec).unwrap();
        assert_eq!(w.dot(supports[0].flow()), Rat::from_int(5));
        assert!(is_generalized_delta_bond(&g2, &rv(&[9, 9, 9]), &spec, &w).unwrap());
    }

    #[test]
    fn inconsistent_prescriptions_have_no_witness() {
        // Three parallel unit arcs: the three digon-style circuits are
        // linearly dependent, so these prescriptions cannot all hold.
        let d = ArcParamDigraph::from_triples(
            2,
            &[(1, 2, Rat::one()), (1, 2, Rat::one()), (1, 2, Rat::one())],
        )
        .unwrap();
        let supports = enumerate_comb_support(&d).unwrap();
        assert_eq!(supports.len(), 3);
        let spec = DeltaSpec::zero().with(2, Rat::one());
        assert!(delta_witness(&d, &supports, &spec).is_none());
        let consistent = DeltaSpec::zero();
        assert!(delta_witness(&d, &supports, &consistent).is_some());
    }

    #[test]
    fn bicycles_contain_no_breakeven_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..15 {
            let d = fixtures::random_lambda_graph(&mut rng, 4, 6);
            let supports = enumerate_comb_support(&d).unwrap();
            let breakeven: Vec<Vec<usize>> = supports
                .iter()
                .filter(|h| !h.is_bicycle())
                .map(|h| h.signed().support())
                .collect();
            for h in supports.iter().filter(|h| h.is_bicycle()) {
                let sup: HashSet<usize> = h.signed().support().into_iter().collect();
                for b in &breakeven {
                    assert!(
                        !b.iter().all(|a| sup.contains(a)),
                        "bicycle support swallows a breakeven cycle"
                    );
                }
            }
        }
    }

    #[test]
    fn path_and_cycle_excess_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut paths = 0;
        while paths < 60 {
            let d = fixtures::random_lambda_graph(&mut rng, 5, 8);
            let Some(w) = fixtures::random_simple_path(&mut rng, &d, 4) else { continue };
            let f = walk_flow(&d, &w).unwrap();
            assert!(d.excess(&f, w.start()).is_negative(), "source pays");
            assert!(d.excess(&f, w.end()).is_positive(), "sink receives");
            paths += 1;
        }
        let mut cycles_checked = 0;
        let mut seed = 0u64;
        while cycles_checked < 60 {
            seed += 1;
            let d = fixtures::random_lambda_graph(&mut ChaCha8Rng::seed_from_u64(seed), 5, 8);
            for c in enumerate_simple_cycles(&d, 100).unwrap() {
                let f = walk_flow(&d, &c).unwrap();
                let base = c.start();
                let lam = c.multiplier(&d).unwrap();
                let excess = d.excess(&f, base);
                assert_eq!(excess.signum(), (Rat::one() - lam).signum());
                cycles_checked += 1;
            }
        }
    }
}
