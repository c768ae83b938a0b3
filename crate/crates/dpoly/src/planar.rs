//! Sphere embeddings given as explicit clockwise face lists, the dual
//! orientation rule (each arc crosses from the face seeing it backward to
//! the face seeing it forward), breakeven recognition via multiplicative
//! vertex potentials, and the dualization `N* = M S(sigma)` that turns the
//! flow space of a breakeven planar digraph into the bond lattice of its
//! dual.

use serde::{Deserialize, Serialize};

use crate::bonds::{self, BondSystem};
use crate::exact::{solve, Rat, RatMatrix, RatVector};
use crate::gencycle::inner_flow;
use crate::graph::{Arc, ArcParamDigraph, Walk, WalkStep};
use crate::{Error, Result};

/// A connected digraph together with the clockwise facial walks of a sphere
/// embedding. Every arc appears in exactly two distinct faces, once per
/// direction; faces are vertex-simple; loops are rejected (their faces
/// degenerate) and bridges cannot satisfy the two-face rule.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(into = "EmbeddingJson")]
pub struct PlanarEmbedding {
    base: ArcParamDigraph,
    faces: Vec<Walk>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    #[serde(flatten)]
    graph: ArcParamDigraph,
    faces: Vec<Vec<WalkStep>>,
}

impl From<PlanarEmbedding> for EmbeddingJson {
    fn from(e: PlanarEmbedding) -> Self {
        EmbeddingJson {
            graph: e.base,
            faces: e.faces.iter().map(|f| f.steps().to_vec()).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for PlanarEmbedding {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = EmbeddingJson::deserialize(deserializer)?;
        let faces = raw
            .faces
            .into_iter()
            .map(|steps| Walk::new(&raw.graph, steps))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PlanarEmbedding::new(raw.graph, faces).map_err(serde::de::Error::custom)
    }
}

fn invalid(reason: impl Into<String>) -> Error {
    Error::EmbeddingInvalid { reason: reason.into() }
}

impl PlanarEmbedding {
    pub fn new(base: ArcParamDigraph, faces: Vec<Walk>) -> Result<Self> {
        if !base.is_connected() {
            return Err(Error::Disconnected);
        }
        let m = base.m();
        if let Some(a) = (0..m).find(|&a| base.arc(a).is_loop()) {
            return Err(invalid(format!("arc {a} is a loop; its faces degenerate")));
        }
        for (i, f) in faces.iter().enumerate() {
            if !f.is_closed() {
                return Err(invalid(format!("face {i} is not closed")));
            }
            if !f.is_simple_cycle() {
                return Err(invalid(format!("face {i} is not a simple cycle")));
            }
        }
        let mut fwd: Vec<Option<usize>> = vec![None; m];
        let mut bwd: Vec<Option<usize>> = vec![None; m];
        for (i, face) in faces.iter().enumerate() {
            for s in face.steps() {
                let slot = if s.dir == 1 { &mut fwd } else { &mut bwd };
                if slot[s.arc].is_some() {
                    return Err(invalid(format!(
                        "arc {} is traversed twice in the same direction",
                        s.arc
                    )));
                }
                slot[s.arc] = Some(i);
            }
        }
        for a in 0..m {
            match (fwd[a], bwd[a]) {
                (Some(i), Some(j)) if i != j => {}
                (Some(_), Some(_)) => {
                    return Err(invalid(format!("arc {a} borders the same face twice")));
                }
                _ => return Err(invalid(format!("arc {a} is not covered once per direction"))),
            }
        }
        if base.n() + faces.len() != m + 2 {
            return Err(invalid(format!(
                "Euler check fails: {} - {} + {} != 2",
                base.n(),
                m,
                faces.len()
            )));
        }
        Ok(PlanarEmbedding { base, faces })
    }

    pub fn base(&self) -> &ArcParamDigraph {
        &self.base
    }

    pub fn faces(&self) -> &[Walk] {
        &self.faces
    }

    /// Face indices (forward-side, backward-side) per arc; total by
    /// construction.
    fn sides(&self) -> Vec<(usize, usize)> {
        let mut fwd = vec![usize::MAX; self.base.m()];
        let mut bwd = vec![usize::MAX; self.base.m()];
        for (i, face) in self.faces.iter().enumerate() {
            for s in face.steps() {
                if s.dir == 1 {
                    fwd[s.arc] = i;
                } else {
                    bwd[s.arc] = i;
                }
            }
        }
        fwd.into_iter().zip(bwd).collect()
    }
}

/// Skeleton of the dual digraph under the orientation rule: arc `a` becomes
/// a dual arc from the face traversing it backward to the face traversing
/// it forward, keeping the arc index. Parameters are set to 1.
pub fn dual_digraph(e: &PlanarEmbedding) -> ArcParamDigraph {
    let arcs: Vec<Arc> = e
        .sides()
        .into_iter()
        .map(|(fwd, bwd)| Arc::new(bwd + 1, fwd + 1, Rat::one()))
        .collect();
    ArcParamDigraph::new(e.faces.len(), arcs).expect("validated embedding yields a digraph")
}

/// Outcome of breakeven recognition: multiplicative vertex potentials
/// realizing every parameter as a quotient, or a cycle whose multiplier is
/// not 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BreakevenCheck {
    Breakeven { mu: RatVector },
    NotBreakeven { witness: Walk, multiplier: Rat },
}

impl BreakevenCheck {
    pub fn is_breakeven(&self) -> bool {
        matches!(self, BreakevenCheck::Breakeven { .. })
    }
}

/// Every cycle has multiplier 1 iff positive vertex potentials `mu` exist
/// with `lambda_a = mu_head / mu_tail`. Potentials are assigned along a
/// spanning forest (roots get 1) and every arc is checked against them; a
/// failing arc yields its fundamental cycle as witness.
pub fn is_breakeven(d: &ArcParamDigraph) -> BreakevenCheck {
    let n = d.n();
    let mut mu: Vec<Option<Rat>> = vec![None; n + 1];
    // Parent entry: (arc index, +1 when the tree arc points parent->child).
    let mut parent: Vec<Option<(usize, i8)>> = vec![None; n + 1];
    let mut depth = vec![0usize; n + 1];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (idx, a) in d.arcs().iter().enumerate() {
        if !a.is_loop() {
            adj[a.tail].push(idx);
            adj[a.head].push(idx);
        }
    }
    for root in 1..=n {
        if mu[root].is_some() {
            continue;
        }
        mu[root] = Some(Rat::one());
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &idx in &adj[v] {
                let a = d.arc(idx);
                let (child, dir) = if a.tail == v { (a.head, 1) } else { (a.tail, -1) };
                if mu[child].is_some() {
                    continue;
                }
                let mv = mu[v].clone().expect("visited vertex has a potential");
                mu[child] = Some(if dir == 1 {
                    &mv * &a.lambda
                } else {
                    // Non-loop arcs have positive parameters by invariant.
                    mv.checked_div(&a.lambda).expect("non-loop parameter positive")
                });
                parent[child] = Some((idx, dir));
                depth[child] = depth[v] + 1;
                queue.push_back(child);
            }
        }
    }
    for (idx, a) in d.arcs().iter().enumerate() {
        let (mt, mh) = (
            mu[a.tail].clone().expect("all vertices reached"),
            mu[a.head].clone().expect("all vertices reached"),
        );
        if &a.lambda * &mt == mh {
            continue;
        }
        let witness = if a.is_loop() {
            Walk::new(d, vec![WalkStep::new(idx, 1)]).expect("loop walk valid")
        } else {
            let mut steps = vec![WalkStep::new(idx, 1)];
            steps.extend(tree_path(d, &parent, &depth, a.head, a.tail));
            Walk::new(d, steps).expect("fundamental cycle valid")
        };
        let multiplier = witness.multiplier(d).expect("forward loop or positive parameters");
        return BreakevenCheck::NotBreakeven { witness, multiplier };
    }
    let mu: RatVector = (1..=n).map(|v| mu[v].clone().expect("assigned")).collect();
    BreakevenCheck::Breakeven { mu }
}

/// Steps along the spanning forest from `from` to `to` (same component).
fn tree_path(
    d: &ArcParamDigraph,
    parent: &[Option<(usize, i8)>],
    depth: &[usize],
    from: usize,
    to: usize,
) -> Vec<WalkStep> {
    let parent_of = |v: usize| -> (usize, i8, usize) {
        let (arc, dir) = parent[v].expect("non-root vertex has a parent");
        let p = if dir == 1 { d.arc(arc).tail } else { d.arc(arc).head };
        (arc, dir, p)
    };
    let mut up = Vec::new();
    let mut down = Vec::new();
    let (mut x, mut y) = (from, to);
    while depth[x] > depth[y] {
        let (arc, dir, p) = parent_of(x);
        up.push(WalkStep::new(arc, -dir));
        x = p;
    }
    while depth[y] > depth[x] {
        let (arc, dir, p) = parent_of(y);
        down.push(WalkStep::new(arc, dir));
        y = p;
    }
    while x != y {
        let (arc, dir, p) = parent_of(x);
        up.push(WalkStep::new(arc, -dir));
        x = p;
        let (arc, dir, p) = parent_of(y);
        down.push(WalkStep::new(arc, dir));
        y = p;
    }
    down.reverse();
    up.extend(down);
    up
}

/// The dualization of a breakeven planar digraph: facial flows stacked into
/// `M`, the positive column scale `sigma`, and the dual digraph whose
/// network matrix is exactly `M S(sigma)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualResult {
    base: ArcParamDigraph,
    dual: ArcParamDigraph,
    sigma: RatVector,
    facial: RatMatrix,
}

impl DualResult {
    pub fn base(&self) -> &ArcParamDigraph {
        &self.base
    }

    pub fn dual(&self) -> &ArcParamDigraph {
        &self.dual
    }

    pub fn sigma(&self) -> &RatVector {
        &self.sigma
    }

    pub fn facial_flows(&self) -> &RatMatrix {
        &self.facial
    }
}

impl Serialize for DualResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct DualJson<'a> {
            dual: &'a ArcParamDigraph,
            sigma: &'a RatVector,
            facial_flows: Vec<RatVector>,
        }
        DualJson {
            dual: &self.dual,
            sigma: &self.sigma,
            facial_flows: (0..self.facial.rows()).map(|i| self.facial.row(i)).collect(),
        }
        .serialize(serializer)
    }
}

/// Builds the dual: one row of `M` per face (the conserved flow around the
/// facial cycle, signs matching the face orientation), `sigma_a` the
/// reciprocal of the positive column entry, `lambda*_a` minus the ratio of
/// the negative to the positive entry. The skeleton is checked against the
/// direct orientation rule.
pub fn dualize_flow_space(e: &PlanarEmbedding) -> Result<DualResult> {
    let d = e.base();
    if let BreakevenCheck::NotBreakeven { witness, multiplier } = is_breakeven(d) {
        return Err(Error::NotBreakeven {
            arcs: witness.steps().iter().map(|s| s.arc).collect(),
            multiplier: multiplier.to_string(),
        });
    }
    let m = d.m();
    let mut rows = Vec::with_capacity(e.faces().len());
    for face in e.faces() {
        let seed = Rat::from_int(face.steps()[0].dir as i64);
        let f = inner_flow(d, face, &seed)?;
        debug_assert!(d.excess_vector(&f).is_zero(), "facial cycle is breakeven");
        rows.push(f);
    }
    let mut sigma = Vec::with_capacity(m);
    let mut arcs = Vec::with_capacity(m);
    for a in 0..m {
        let mut pos: Option<(usize, Rat)> = None;
        let mut neg: Option<(usize, Rat)> = None;
        for (i, row) in rows.iter().enumerate() {
            let v = &row[a];
            if v.is_zero() {
                continue;
            }
            let slot = if v.is_positive() { &mut pos } else { &mut neg };
            if slot.is_some() {
                return Err(invalid(format!("column {a} of M has a repeated sign")));
            }
            *slot = Some((i, v.clone()));
        }
        let (pf, mu_a) = pos.ok_or_else(|| invalid(format!("column {a} of M lacks a positive entry")))?;
        let (nf, nu_a) = neg.ok_or_else(|| invalid(format!("column {a} of M lacks a negative entry")))?;
        let lambda_star = (-&nu_a).checked_div(&mu_a).expect("positive entry nonzero");
        sigma.push(mu_a.recip().expect("positive entry nonzero"));
        arcs.push(Arc::new(nf + 1, pf + 1, lambda_star));
    }
    let dual = ArcParamDigraph::new(e.faces().len(), arcs)?;
    let rule = dual_digraph(e);
    for a in 0..m {
        if dual.arc(a).tail != rule.arc(a).tail || dual.arc(a).head != rule.arc(a).head {
            return Err(invalid(format!("dual arc {a} disagrees with the orientation rule")));
        }
    }
    Ok(DualResult {
        base: d.clone(),
        dual,
        sigma: RatVector::new(sigma),
        facial: RatMatrix::from_rows(rows),
    })
}

/// `x = S(sigma) f` for a flow `f` of the base; the image is verified to be
/// a bond of the dual.
pub fn flow_to_bond(r: &DualResult, f: &RatVector) -> Result<RatVector> {
    assert_eq!(f.len(), r.base.m(), "flow length mismatch");
    let excess = r.base.excess_vector(f);
    if let Some(&v) = excess.support().first() {
        return Err(Error::NotAFlow { vertex: v + 1 });
    }
    let x: RatVector = (0..f.len()).map(|a| &r.sigma[a] * &f[a]).collect();
    if solve(&r.dual.network_matrix().transpose(), &x).is_none() {
        return Err(Error::NotABond {
            reason: "image is not in the row space of the dual".into(),
        });
    }
    Ok(x)
}

/// `f = S(sigma)^{-1} x` for a bond `x` of the dual; the image is verified
/// to be conserved in the base.
pub fn bond_to_flow(r: &DualResult, x: &RatVector) -> Result<RatVector> {
    assert_eq!(x.len(), r.base.m(), "bond length mismatch");
    if solve(&r.dual.network_matrix().transpose(), x).is_none() {
        return Err(Error::NotABond {
            reason: "input is not a bond of the dual".into(),
        });
    }
    let f: RatVector = (0..x.len())
        .map(|a| x[a].checked_div(&r.sigma[a]).expect("sigma positive"))
        .collect();
    let excess = r.base.excess_vector(&f);
    if let Some(&v) = excess.support().first() {
        return Err(Error::NotAFlow { vertex: v + 1 });
    }
    Ok(f)
}

pub fn flow_join(
    e: &PlanarEmbedding,
    c: &RatVector,
    f: &RatVector,
    g: &RatVector,
) -> Result<RatVector> {
    flow_lattice_op(e, c, f, g, true)
}

pub fn flow_meet(
    e: &PlanarEmbedding,
    c: &RatVector,
    f: &RatVector,
    g: &RatVector,
) -> Result<RatVector> {
    flow_lattice_op(e, c, f, g, false)
}

/// Capacity-respecting lattice operations on flows: transport both flows to
/// bonds of the dual with capacities `S(sigma) c`, apply the bond lattice
/// there, and transport back.
fn flow_lattice_op(
    e: &PlanarEmbedding,
    c: &RatVector,
    f: &RatVector,
    g: &RatVector,
    join: bool,
) -> Result<RatVector> {
    assert_eq!(c.len(), e.base().m(), "capacity length mismatch");
    let r = dualize_flow_space(e)?;
    let xf = flow_to_bond(&r, f)?;
    let xg = flow_to_bond(&r, g)?;
    let caps: RatVector = (0..c.len()).map(|a| &r.sigma[a] * &c[a]).collect();
    let sys = BondSystem::one_sided(r.dual.clone(), caps);
    let xr = if join { bonds::bond_join(&sys, &xf, &xg)? } else { bonds::bond_meet(&sys, &xf, &xg)? };
    let out = bond_to_flow(&r, &xr)?;
    debug_assert!(out.le(c), "lattice result respects capacities");
    Ok(out)
}

/// The breakeven arc parameterization induced by positive vertex potentials:
/// `lambda_a = mu_head / mu_tail`. Every cycle multiplier telescopes to 1.
pub fn breakeven_parameterization(d: &ArcParamDigraph, mu: &RatVector) -> Result<ArcParamDigraph> {
    assert_eq!(mu.len(), d.n(), "potential length mismatch");
    if let Some(i) = (0..d.n()).find(|&i| !mu[i].is_positive()) {
        return Err(Error::NonPositiveMultiplier { index: i });
    }
    let arcs: Vec<Arc> = d
        .arcs()
        .iter()
        .map(|a| {
            let lambda = mu[a.head - 1].checked_div(&mu[a.tail - 1]).expect("mu positive");
            Arc::new(a.tail, a.head, lambda)
        })
        .collect();
    ArcParamDigraph::new(d.n(), arcs)
}
