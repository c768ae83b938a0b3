//! Polyhedra in potential space and closure under componentwise max/min.
//!
//! A `DPolyhedron` is `{p : p_head - lambda * p_tail <= c_a}` over an
//! arc-parameterized digraph, optionally with equality rows; such sets are
//! closed under join (max) and meet (min). `HPolyhedron` is a general
//! `A p <= / = b` system; `recognize_network_form` scales its rows into arc
//! shape when possible, and `sample_distributivity` hunts for closure
//! violations with an exact Fourier-Motzkin feasibility walk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{Rat, RatMatrix, RatVector};
use crate::graph::{Arc, ArcParamDigraph};
use crate::par;
use crate::{Error, Result};

/// Row relation of an `HPolyhedron`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    Le,
    Eq,
}

/// `{x : A x <= b}` with some rows optionally tightened to equalities.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(into = "HPolyJson")]
pub struct HPolyhedron {
    a: RatMatrix,
    b: RatVector,
    rel: Vec<Rel>,
}

#[derive(Serialize, Deserialize)]
struct HPolyJson {
    #[serde(rename = "A")]
    a: RatMatrix,
    b: RatVector,
    #[serde(default)]
    rel: Option<Vec<Rel>>,
}

impl From<HPolyhedron> for HPolyJson {
    fn from(h: HPolyhedron) -> Self {
        HPolyJson { a: h.a, b: h.b, rel: Some(h.rel) }
    }
}

impl<'de> Deserialize<'de> for HPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = HPolyJson::deserialize(deserializer)?;
        let rel = raw.rel.unwrap_or_else(|| vec![Rel::Le; raw.a.rows()]);
        if raw.b.len() != raw.a.rows() || rel.len() != raw.a.rows() {
            return Err(serde::de::Error::custom("row count mismatch between A, b, rel"));
        }
        Ok(HPolyhedron { a: raw.a, b: raw.b, rel })
    }
}

impl HPolyhedron {
    pub fn new(a: RatMatrix, b: RatVector, rel: Vec<Rel>) -> Self {
        assert_eq!(b.len(), a.rows(), "rhs length mismatch");
        assert_eq!(rel.len(), a.rows(), "relation length mismatch");
        HPolyhedron { a, b, rel }
    }

    pub fn all_le(a: RatMatrix, b: RatVector) -> Self {
        let rows = a.rows();
        HPolyhedron::new(a, b, vec![Rel::Le; rows])
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &RatVector {
        &self.b
    }

    pub fn relations(&self) -> &[Rel] {
        &self.rel
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// Index of the first violated row, if any.
    pub fn violated_row(&self, x: &RatVector) -> Option<usize> {
        assert_eq!(x.len(), self.cols(), "point dimension mismatch");
        (0..self.rows()).find(|&r| {
            let lhs = self.a.row(r).dot(x);
            match self.rel[r] {
                Rel::Le => lhs > self.b[r],
                Rel::Eq => lhs != self.b[r],
            }
        })
    }

    pub fn member(&self, x: &RatVector) -> bool {
        self.violated_row(x).is_none()
    }
}

/// `{p : p_j - lambda_a p_i <= c_a}` over a digraph, with equality rows where
/// `eq` is set.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(into = "DPolyJson")]
pub struct DPolyhedron {
    graph: ArcParamDigraph,
    c: RatVector,
    eq: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct DPolyJson {
    graph: ArcParamDigraph,
    c: RatVector,
    #[serde(default)]
    eq: Option<Vec<bool>>,
}

impl From<DPolyhedron> for DPolyJson {
    fn from(p: DPolyhedron) -> Self {
        DPolyJson { graph: p.graph, c: p.c, eq: Some(p.eq) }
    }
}

impl<'de> Deserialize<'de> for DPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DPolyJson::deserialize(deserializer)?;
        let eq = raw.eq.unwrap_or_else(|| vec![false; raw.graph.m()]);
        DPolyhedron::new(raw.graph, raw.c, eq).map_err(serde::de::Error::custom)
    }
}

impl DPolyhedron {
    pub fn new(graph: ArcParamDigraph, c: RatVector, eq: Vec<bool>) -> Result<Self> {
        assert_eq!(c.len(), graph.m(), "capacity length mismatch");
        assert_eq!(eq.len(), graph.m(), "equality mask length mismatch");
        Ok(DPolyhedron { graph, c, eq })
    }

    pub fn inequalities(graph: ArcParamDigraph, c: RatVector) -> Self {
        let m = graph.m();
        DPolyhedron::new(graph, c, vec![false; m]).expect("mask sized to match")
    }

    pub fn graph(&self) -> &ArcParamDigraph {
        &self.graph
    }

    pub fn capacities(&self) -> &RatVector {
        &self.c
    }

    pub fn equality_mask(&self) -> &[bool] {
        &self.eq
    }

    /// Value of the arc form `p_head - lambda * p_tail`.
    pub fn arc_value(&self, arc: usize, p: &RatVector) -> Rat {
        let a = self.graph.arc(arc);
        &p[a.head - 1] - &(&a.lambda * &p[a.tail - 1])
    }

    pub fn violated_arc(&self, p: &RatVector) -> Option<usize> {
        assert_eq!(p.len(), self.graph.n(), "potential dimension mismatch");
        (0..self.graph.m()).find(|&idx| {
            let v = self.arc_value(idx, p);
            if self.eq[idx] {
                v != self.c[idx]
            } else {
                v > self.c[idx]
            }
        })
    }

    pub fn member(&self, p: &RatVector) -> bool {
        self.violated_arc(p).is_none()
    }

    /// Componentwise max of two members; membership of the result is
    /// re-verified before returning.
    pub fn join(&self, p: &RatVector, q: &RatVector) -> Result<RatVector> {
        self.lattice_op(p, q, true)
    }

    /// Componentwise min of two members.
    pub fn meet(&self, p: &RatVector, q: &RatVector) -> Result<RatVector> {
        self.lattice_op(p, q, false)
    }

    fn lattice_op(&self, p: &RatVector, q: &RatVector, max: bool) -> Result<RatVector> {
        for (name, point) in [("first", p), ("second", q)] {
            if let Some(row) = self.violated_arc(point) {
                let _ = name;
                return Err(Error::NotAMember { row });
            }
        }
        let r = if max { p.join(q) } else { p.meet(q) };
        if let Some(row) = self.violated_arc(&r) {
            return Err(Error::NotAMember { row });
        }
        Ok(r)
    }

    /// Equality rows rewritten as pairs of inequality arcs describing the same
    /// point set: a `lambda != 0` arc gets a reversed twin with `lambda^{-1}`
    /// and capacity `-lambda^{-1} c`, a `lambda = 0` loop gets a `lambda = 2`
    /// loop with capacity `-c`. Pure inequality systems pass through intact.
    pub fn rewrite_equalities(&self) -> DPolyhedron {
        let mut arcs = Vec::new();
        let mut c = Vec::new();
        for (idx, a) in self.graph.arcs().iter().enumerate() {
            arcs.push(a.clone());
            c.push(self.c[idx].clone());
            if !self.eq[idx] {
                continue;
            }
            if a.lambda.is_zero() {
                arcs.push(Arc::new(a.tail, a.head, Rat::from_int(2)));
                c.push(-&self.c[idx]);
            } else {
                let inv = a.lambda.recip().expect("nonzero lambda");
                arcs.push(Arc::new(a.head, a.tail, inv.clone()));
                c.push(-&(&inv * &self.c[idx]));
            }
        }
        let graph = ArcParamDigraph::new(self.graph.n(), arcs).expect("rewritten arcs valid");
        DPolyhedron::inequalities(graph, RatVector::new(c))
    }

    /// The same set as a row system: row `a` is `e_head - lambda e_tail`.
    pub fn to_hpolyhedron(&self) -> HPolyhedron {
        let a = self.graph.network_matrix().transpose();
        let rel = self.eq.iter().map(|&e| if e { Rel::Eq } else { Rel::Le }).collect();
        HPolyhedron::new(a, self.c.clone(), rel)
    }
}

/// Scales each row of `h` into arc shape `e_j - lambda e_i` (dividing by the
/// positive entry) and returns the resulting system, or `None` when some row
/// has more than two nonzeros or equal signs. Zero rows `0 <= b` with
/// `b >= 0` are dropped; unsatisfiable zero rows yield a two-loop gadget that
/// makes the returned set empty.
pub fn recognize_network_form(h: &HPolyhedron) -> Option<DPolyhedron> {
    let n = h.cols();
    let mut arcs = Vec::new();
    let mut c = Vec::new();
    let mut eq = Vec::new();
    let mut infeasible = false;
    for r in 0..h.rows() {
        let row = h.matrix().row(r);
        let nz = row.support();
        let rel = h.relations()[r];
        match nz.len() {
            0 => {
                let bad = match rel {
                    Rel::Le => h.rhs()[r].is_negative(),
                    Rel::Eq => !h.rhs()[r].is_zero(),
                };
                if bad {
                    infeasible = true;
                }
            }
            1 => {
                let i = nz[0];
                let z = &row[i];
                if z.is_positive() {
                    arcs.push(Arc::new(i + 1, i + 1, Rat::zero()));
                    c.push(h.rhs()[r].checked_div(z).expect("nonzero"));
                } else {
                    let mu = -z;
                    arcs.push(Arc::new(i + 1, i + 1, Rat::from_int(2)));
                    c.push(h.rhs()[r].checked_div(&mu).expect("nonzero"));
                }
                eq.push(rel == Rel::Eq);
            }
            2 => {
                let (i, j) = (nz[0], nz[1]);
                let (zi, zj) = (&row[i], &row[j]);
                if zi.signum() == zj.signum() {
                    return None;
                }
                let (pos, neg) = if zi.is_positive() { (i, j) } else { (j, i) };
                let lambda = (-&row[neg]).checked_div(&row[pos]).expect("nonzero");
                arcs.push(Arc::new(neg + 1, pos + 1, lambda));
                c.push(h.rhs()[r].checked_div(&row[pos]).expect("nonzero"));
                eq.push(rel == Rel::Eq);
            }
            _ => return None,
        }
    }
    if infeasible {
        if n == 0 {
            return None;
        }
        arcs.push(Arc::new(1, 1, Rat::zero()));
        c.push(Rat::zero());
        eq.push(false);
        arcs.push(Arc::new(1, 1, Rat::from_int(2)));
        c.push(Rat::from_int(-1));
        eq.push(false);
    }
    let graph = ArcParamDigraph::new(n, arcs).ok()?;
    Some(DPolyhedron::new(graph, RatVector::new(c), eq).expect("lengths match"))
}

/// Outcome of randomized closure testing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SampleOutcome {
    /// Members of `h` whose max or min is not a member.
    Refuted { x: RatVector, y: RatVector },
    /// No violation found (vacuously so when `h` has no sampled members).
    NoRefutation { trials: usize },
}

/// Samples `trials` member pairs with the exact feasibility walk and checks
/// closure under max and min. The lowest refuting trial index wins, so the
/// outcome is deterministic in `seed`.
pub fn sample_distributivity(h: &HPolyhedron, trials: usize, seed: u64) -> SampleOutcome {
    let sampler = FmSampler::new(h);
    if !sampler.feasible {
        return SampleOutcome::NoRefutation { trials };
    }
    let hit = par::first_some(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let x = sampler.sample(&mut rng)?;
        let y = sampler.sample(&mut rng)?;
        debug_assert!(h.member(&x) && h.member(&y), "sampler must produce members");
        if !h.member(&x.join(&y)) || !h.member(&x.meet(&y)) {
            Some((x, y))
        } else {
            None
        }
    });
    match hit {
        Some((_, (x, y))) => SampleOutcome::Refuted { x, y },
        None => SampleOutcome::NoRefutation { trials },
    }
}

/// Deterministic sample of members of `h` (empty when infeasible).
pub fn sample_members(h: &HPolyhedron, count: usize, seed: u64) -> Vec<RatVector> {
    let sampler = FmSampler::new(h);
    if !sampler.feasible {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).filter_map(|_| sampler.sample(&mut rng)).collect()
}

/// Fourier-Motzkin elimination tower. `stages[k]` constrains variables
/// `0..=k`; sampling walks forward assigning each variable a random rational
/// inside its exact feasible interval given the prefix.
struct FmSampler {
    stages: Vec<Vec<(Vec<Rat>, Rat)>>,
    n: usize,
    feasible: bool,
}

impl FmSampler {
    fn new(h: &HPolyhedron) -> Self {
        let n = h.cols();
        let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for r in 0..h.rows() {
            let coeffs: Vec<Rat> = (0..n).map(|c| h.matrix().at(r, c).clone()).collect();
            rows.push((coeffs.clone(), h.rhs()[r].clone()));
            if h.relations()[r] == Rel::Eq {
                rows.push((coeffs.iter().map(|x| -x).collect(), -&h.rhs()[r]));
            }
        }
        let mut feasible = true;
        let mut stages = vec![Vec::new(); n];
        let mut current = rows;
        for k in (0..n).rev() {
            // Split off rows not involving variable k; combine the rest.
            let mut kept = Vec::new();
            let mut upper = Vec::new();
            let mut lower = Vec::new();
            let mut stage_rows = Vec::new();
            for (coeffs, rhs) in current {
                if coeffs[..=k].iter().all(Rat::is_zero) {
                    if rhs.is_negative() {
                        feasible = false;
                    }
                    continue;
                }
                stage_rows.push((coeffs.clone(), rhs.clone()));
                match coeffs[k].signum() {
                    0 => kept.push((coeffs, rhs)),
                    1 => upper.push((coeffs, rhs)),
                    _ => lower.push((coeffs, rhs)),
                }
            }
            stages[k] = stage_rows;
            let mut next = kept;
            for (lc, lr) in &lower {
                for (uc, ur) in &upper {
                    // Scale so the k coefficients cancel: u/u_k - l/(-l_k).
                    let us = uc[k].recip().expect("positive");
                    let ls = (-&lc[k]).recip().expect("positive");
                    let coeffs: Vec<Rat> = (0..n)
                        .map(|i| &(&uc[i] * &us) + &(&lc[i] * &ls))
                        .collect();
                    let rhs = &(ur * &us) + &(lr * &ls);
                    if coeffs.iter().all(Rat::is_zero) && rhs.is_negative() {
                        feasible = false;
                    }
                    next.push((coeffs, rhs));
                }
            }
            // Light dedup keeps the tower small on redundant systems.
            next.sort();
            next.dedup();
            current = next;
        }
        FmSampler { stages, n, feasible }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Option<RatVector> {
        let box_bound = Rat::from_int(10);
        let mut x = RatVector::zeros(self.n);
        for k in 0..self.n {
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for (coeffs, rhs) in &self.stages[k] {
                if coeffs[k].is_zero() {
                    continue;
                }
                let mut rest = rhs.clone();
                for i in 0..k {
                    rest -= &(&coeffs[i] * &x[i]);
                }
                let bound = rest.checked_div(&coeffs[k]).expect("nonzero");
                if coeffs[k].is_positive() {
                    hi = Some(match hi {
                        Some(h) => h.min(bound),
                        None => bound,
                    });
                } else {
                    lo = Some(match lo {
                        Some(l) => l.max(bound),
                        None => bound,
                    });
                }
            }
            let (low, high) = match (lo, hi) {
                (Some(l), Some(h)) => (l, h),
                (Some(l), None) => {
                    let h = &l + &(&box_bound + &box_bound);
                    (l, h)
                }
                (None, Some(h)) => {
                    let l = &h - &(&box_bound + &box_bound);
                    (l, h)
                }
                (None, None) => (-&box_bound, box_bound.clone()),
            };
            if low > high {
                // Exact elimination guarantees extendability; reaching this
                // means the system was infeasible from the start.
                return None;
            }
            let t = Rat::new(rng.gen_range(0..=16), 16);
            x[k] = &low + &(&(&high - &low) * &t);
        }
        Some(x)
    }
}
