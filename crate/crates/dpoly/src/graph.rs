//! Arc-parameterized digraphs and their generalized network matrices.
//!
//! Vertices are 1-based. Arc `a = (i, j)` with parameter `lambda_a` stands for
//! the linear form `p_j - lambda_a * p_i`; the network matrix has the column
//! `e_j - lambda_a * e_i` (so a loop contributes `(1 - lambda_a) * e_i`).
//! `lambda_a = 0` is only allowed on loops, where the form degenerates to
//! `p_i` itself.

use serde::{Deserialize, Serialize};

use crate::exact::{Rat, RatMatrix, RatVector};
use crate::{Error, Result};

/// One parameterized arc.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub lambda: Rat,
}

impl Arc {
    pub fn new(tail: usize, head: usize, lambda: Rat) -> Self {
        Arc { tail, head, lambda }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// Multidigraph on vertices `1..=n` with a nonnegative parameter per arc.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(into = "GraphJson")]
pub struct ArcParamDigraph {
    n: usize,
    arcs: Vec<Arc>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    arcs: Vec<Arc>,
}

impl From<ArcParamDigraph> for GraphJson {
    fn from(d: ArcParamDigraph) -> Self {
        GraphJson { n: d.n, arcs: d.arcs }
    }
}

impl<'de> Deserialize<'de> for ArcParamDigraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        ArcParamDigraph::new(raw.n, raw.arcs).map_err(serde::de::Error::custom)
    }
}

impl ArcParamDigraph {
    pub fn new(n: usize, arcs: Vec<Arc>) -> Result<Self> {
        for (idx, a) in arcs.iter().enumerate() {
            for v in [a.tail, a.head] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { arc: idx, vertex: v, n });
                }
            }
            if a.lambda.is_negative() {
                return Err(Error::NegativeLambda { arc: idx, lambda: a.lambda.to_string() });
            }
            if a.lambda.is_zero() && !a.is_loop() {
                return Err(Error::ZeroLambdaNonLoop { arc: idx });
            }
        }
        Ok(ArcParamDigraph { n, arcs })
    }

    /// Convenience constructor from `(tail, head, lambda)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, Rat)]) -> Result<Self> {
        ArcParamDigraph::new(
            n,
            triples.iter().map(|(t, h, l)| Arc::new(*t, *h, l.clone())).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, idx: usize) -> &Arc {
        &self.arcs[idx]
    }

    /// `n x m` matrix with column `e_head - lambda * e_tail` per arc.
    pub fn network_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.n, self.arcs.len());
        for (idx, a) in self.arcs.iter().enumerate() {
            if a.is_loop() {
                *m.at_mut(a.tail - 1, idx) = Rat::one() - &a.lambda;
            } else {
                *m.at_mut(a.head - 1, idx) = Rat::one();
                *m.at_mut(a.tail - 1, idx) = -&a.lambda;
            }
        }
        m
    }

    /// Excess of `f` at vertex `v`: inflow minus parameter-weighted outflow.
    /// A loop at `v` contributes `f_a - lambda_a * f_a`.
    pub fn excess(&self, f: &RatVector, v: usize) -> Rat {
        assert_eq!(f.len(), self.arcs.len(), "excess: flow length mismatch");
        assert!(v >= 1 && v <= self.n, "excess: vertex {v} out of range");
        let mut acc = Rat::zero();
        for (idx, a) in self.arcs.iter().enumerate() {
            if a.head == v {
                acc += &f[idx];
            }
            if a.tail == v {
                acc -= &(&a.lambda * &f[idx]);
            }
        }
        acc
    }

    /// Excess at every vertex; equals `N_Lambda * f`.
    pub fn excess_vector(&self, f: &RatVector) -> RatVector {
        (1..=self.n).map(|v| self.excess(f, v)).collect()
    }

    /// Vertex sets of the connected components of the underlying multigraph
    /// (loops connect nothing). Each component sorted, components ordered by
    /// smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for a in &self.arcs {
            if !a.is_loop() {
                let (rt, rh) = (find(&mut parent, a.tail), find(&mut parent, a.head));
                if rt != rh {
                    parent[rt.max(rh)] = rt.min(rh);
                }
            }
        }
        let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 1..=self.n {
            let root = find(&mut parent, v);
            comps.entry(root).or_default().push(v);
        }
        comps.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Arc indices of a breadth-first spanning tree rooted at vertex 1,
    /// scanning arcs in index order. Errors if the graph is disconnected.
    pub fn bfs_spanning_tree(&self) -> Result<Vec<usize>> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let mut visited = vec![false; self.n + 1];
        visited[1] = true;
        let mut tree = Vec::new();
        let mut queue = std::collections::VecDeque::from([1usize]);
        while let Some(u) = queue.pop_front() {
            for (idx, a) in self.arcs.iter().enumerate() {
                if a.is_loop() {
                    continue;
                }
                let other = if a.tail == u {
                    a.head
                } else if a.head == u {
                    a.tail
                } else {
                    continue;
                };
                if !visited[other] {
                    visited[other] = true;
                    tree.push(idx);
                    queue.push_back(other);
                }
            }
        }
        if visited[1..].iter().any(|&v| !v) {
            return Err(Error::Disconnected);
        }
        tree.sort_unstable();
        Ok(tree)
    }
}

/// A `{-1, 0, +1}` sign per arc; the support is the set of nonzero signs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedArcSet(Vec<i8>);

impl SignedArcSet {
    pub fn new(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|s| (-1..=1).contains(s)), "signs must be -1, 0 or 1");
        SignedArcSet(signs)
    }

    pub fn zeros(m: usize) -> Self {
        SignedArcSet(vec![0; m])
    }

    /// Signs of a rational vector.
    pub fn of_vector(v: &RatVector) -> Self {
        SignedArcSet(v.iter().map(Rat::signum).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sign(&self, arc: usize) -> i8 {
        self.0[arc]
    }

    pub fn set(&mut self, arc: usize, sign: i8) {
        assert!((-1..=1).contains(&sign));
        self.0[arc] = sign;
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &s)| s != 0).map(|(i, _)| i).collect()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        SignedArcSet(self.0.iter().map(|s| -s).collect())
    }

    /// Flips signs if needed so the lowest-index nonzero sign is positive.
    pub fn canonical(&self) -> Self {
        match self.0.iter().find(|&&s| s != 0) {
            Some(&s) if s < 0 => self.negated(),
            _ => self.clone(),
        }
    }
}

/// One step of a walk: an arc traversed forward (`dir = 1`) or backward
/// (`dir = -1`).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WalkStep {
    pub arc: usize,
    pub dir: i8,
}

impl WalkStep {
    pub fn new(arc: usize, dir: i8) -> Self {
        WalkStep { arc, dir }
    }
}

/// A validated walk: consecutive steps share their connecting vertex.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Walk {
    steps: Vec<WalkStep>,
    #[serde(skip)]
    vertices: Vec<usize>,
}

impl Walk {
    /// Validates `steps` against `d` and records the visited vertex sequence.
    /// The start of the first step is fixed by its direction; an empty step
    /// list is rejected by usage (panics) since it has no location.
    pub fn new(d: &ArcParamDigraph, steps: Vec<WalkStep>) -> Result<Self> {
        assert!(!steps.is_empty(), "walk must have at least one step");
        let m = d.m();
        for s in &steps {
            if s.arc >= m {
                return Err(Error::WalkArcOutOfRange { index: s.arc, m });
            }
            if s.dir != 1 && s.dir != -1 {
                return Err(Error::NotAWalk { prev: s.arc, next: s.arc });
            }
        }
        let ends = |s: &WalkStep| {
            let a = d.arc(s.arc);
            if s.dir == 1 {
                (a.tail, a.head)
            } else {
                (a.head, a.tail)
            }
        };
        let mut vertices = vec![ends(&steps[0]).0];
        for (i, s) in steps.iter().enumerate() {
            let (from, to) = ends(s);
            if from != *vertices.last().unwrap() {
                return Err(Error::NotAWalk { prev: steps[i.saturating_sub(1)].arc, next: s.arc });
            }
            vertices.push(to);
        }
        Ok(Walk { steps, vertices })
    }

    pub fn steps(&self) -> &[WalkStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Visited vertices, one more than steps.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// No repeated arcs.
    pub fn is_arc_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.steps.iter().all(|s| seen.insert(s.arc))
    }

    /// Closed and no repeated vertices except the closing one.
    pub fn is_simple_cycle(&self) -> bool {
        if !self.is_closed() {
            return false;
        }
        let inner = &self.vertices[..self.vertices.len() - 1];
        let set: std::collections::HashSet<_> = inner.iter().collect();
        set.len() == inner.len()
    }

    /// Per-step product of `lambda^dir`.
    pub fn multiplier(&self, d: &ArcParamDigraph) -> Result<Rat> {
        let mut acc = Rat::one();
        for s in &self.steps {
            let lam = &d.arc(s.arc).lambda;
            if s.dir == 1 {
                acc *= lam;
            } else {
                acc *= &lam.recip().map_err(|_| Error::ZeroInversion {
                    what: format!("lambda of arc {} traversed backward", s.arc),
                })?;
            }
        }
        Ok(acc)
    }

    /// Signs per arc. Usage error if an arc repeats with conflicting signs.
    pub fn signed_arc_set(&self, m: usize) -> SignedArcSet {
        let mut signs = vec![0i8; m];
        for s in &self.steps {
            assert!(
                signs[s.arc] == 0 || signs[s.arc] == s.dir,
                "walk repeats arc {} with conflicting direction",
                s.arc
            );
            signs[s.arc] = s.dir;
        }
        SignedArcSet::new(signs)
    }

    /// Same closed walk, re-rooted to begin at `v` (which must be visited).
    pub fn rotated_to(&self, v: usize) -> Walk {
        assert!(self.is_closed(), "rotation requires a closed walk");
        let pos = self
            .vertices[..self.vertices.len() - 1]
            .iter()
            .position(|&u| u == v)
            .expect("rotation target not on walk");
        let mut steps = self.steps.clone();
        steps.rotate_left(pos);
        let mut vertices: Vec<usize> = self.vertices[..self.vertices.len() - 1].to_vec();
        vertices.rotate_left(pos);
        vertices.push(vertices[0]);
        Walk { steps, vertices }
    }

    /// The reverse traversal.
    pub fn reversed(&self) -> Walk {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| WalkStep::new(s.arc, -s.dir))
            .collect();
        let vertices = self.vertices.iter().rev().copied().collect();
        Walk { steps, vertices }
    }
}

/// Multiplier of a signed arc set: product of `lambda_a^{S_a}` over the
/// support. Backward signs on `lambda = 0` loops are a data error.
pub fn multiplier(d: &ArcParamDigraph, s: &SignedArcSet) -> Result<Rat> {
    assert_eq!(s.len(), d.m(), "multiplier: sign length mismatch");
    let mut acc = Rat::one();
    for (idx, a) in d.arcs().iter().enumerate() {
        match s.sign(idx) {
            0 => {}
            1 => acc *= &a.lambda,
            _ => {
                acc *= &a.lambda.recip().map_err(|_| Error::ZeroInversion {
                    what: format!("lambda of arc {idx} with sign -1"),
                })?
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::kernel_basis;
    use crate::fixtures;

    #[test]
    fn g1_network_matrix_is_frozen() {
        let d = fixtures::g1();
        let n = d.network_matrix();
        let expected = RatMatrix::from_int_rows(&[&[-2, 0, -6], &[1, -3, 0], &[0, 1, 1]]);
        assert_eq!(n, expected);
    }

    #[test]
    fn column_shape_invariant() {
        let d = fixtures::g2();
        let n = d.network_matrix();
        assert_eq!(n.cols(), d.m());
        for c in 0..n.cols() {
            let col = n.col(c);
            let nz = col.support();
            assert_eq!(nz.len(), 2, "non-loop column has exactly two nonzeros");
            let signs: Vec<i8> = nz.iter().map(|&r| col[r].signum()).collect();
            assert_eq!(signs.iter().sum::<i8>(), 0, "opposite signs");
            assert!(nz.iter().any(|&r| col[r] == Rat::one()), "head entry is 1");
        }
    }

    #[test]
    fn loop_columns() {
        let d = ArcParamDigraph::from_triples(
            1,
            &[(1, 1, Rat::zero()), (1, 1, Rat::one()), (1, 1, Rat::from_int(3))],
        )
        .unwrap();
        let n = d.network_matrix();
        assert_eq!(n.at(0, 0), &Rat::one());
        assert_eq!(n.at(0, 1), &Rat::zero());
        assert_eq!(n.at(0, 2), &Rat::from_int(-2));
    }

    #[test]
    fn lambda_zero_on_non_loop_rejected() {
        let err = ArcParamDigraph::from_triples(2, &[(1, 2, Rat::zero())]).unwrap_err();
        assert!(matches!(err, Error::ZeroLambdaNonLoop { arc: 0 }));
        let err = ArcParamDigraph::from_triples(2, &[(1, 3, Rat::one())]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { vertex: 3, .. }));
        let err = ArcParamDigraph::from_triples(2, &[(1, 2, Rat::from_int(-1))]).unwrap_err();
        assert!(matches!(err, Error::NegativeLambda { .. }));
    }

    #[test]
    fn excess_matches_network_matrix() {
        let d = fixtures::g2();
        let f = RatVector::from_ints(&[1, 3, 2]);
        // Kernel vector of the network matrix: excess vanishes everywhere.
        assert_eq!(d.excess(&f, 1), Rat::zero());
        assert_eq!(d.excess(&f, 2), Rat::zero());
        // Arbitrary vector: excess vector equals N * f.
        let g = RatVector::from_ints(&[5, -1, 7]);
        assert_eq!(d.excess_vector(&g), d.network_matrix().mul_vec(&g));
    }

    #[test]
    fn loop_excess_contribution() {
        let d = ArcParamDigraph::from_triples(1, &[(1, 1, Rat::from_int(3))]).unwrap();
        let f = RatVector::from_ints(&[1]);
        // f_a - lambda * f_a = 1 - 3.
        assert_eq!(d.excess(&f, 1), Rat::from_int(-2));
    }

    #[test]
    fn kernel_iff_zero_excess() {
        let d = fixtures::g1();
        for v in kernel_basis(&d.network_matrix()) {
            assert!(d.excess_vector(&v).is_zero());
        }
    }

    #[test]
    fn multiplier_of_triangle_cycle_is_one() {
        let d = fixtures::g1();
        let s = SignedArcSet::new(vec![1, 1, -1]);
        assert_eq!(multiplier(&d, &s).unwrap(), Rat::one());
        // Reversal inverts.
        let m = multiplier(&d, &SignedArcSet::new(vec![1, 1, 1])).unwrap();
        let inv = multiplier(&d, &SignedArcSet::new(vec![-1, -1, -1])).unwrap();
        assert_eq!(m * inv, Rat::one());
    }

    #[test]
    fn multiplier_multiplicative_over_disjoint_supports() {
        let d = fixtures::g2();
        let s1 = SignedArcSet::new(vec![1, 0, 0]);
        let s2 = SignedArcSet::new(vec![0, -1, 0]);
        let both = SignedArcSet::new(vec![1, -1, 0]);
        let m1 = multiplier(&d, &s1).unwrap();
        let m2 = multiplier(&d, &s2).unwrap();
        assert_eq!(multiplier(&d, &both).unwrap(), m1 * m2);
    }

    #[test]
    fn zero_lambda_backward_is_an_error() {
        let d = ArcParamDigraph::from_triples(1, &[(1, 1, Rat::zero())]).unwrap();
        let s = SignedArcSet::new(vec![-1]);
        assert!(multiplier(&d, &s).is_err());
    }

    #[test]
    fn walk_validation() {
        let d = fixtures::g1();
        // 1 -> 2 -> 3 is a walk; vertices recorded.
        let w = Walk::new(&d, vec![WalkStep::new(0, 1), WalkStep::new(1, 1)]).unwrap();
        assert_eq!(w.vertices(), &[1, 2, 3]);
        assert!(!w.is_closed());
        // Closing with arc 2 backward: 3 -> 1.
        let c = Walk::new(
            &d,
            vec![WalkStep::new(0, 1), WalkStep::new(1, 1), WalkStep::new(2, -1)],
        )
        .unwrap();
        assert!(c.is_closed());
        assert!(c.is_simple_cycle());
        assert_eq!(c.multiplier(&d).unwrap(), Rat::one());
        // Disconnected steps rejected.
        let bad = Walk::new(&d, vec![WalkStep::new(0, 1), WalkStep::new(2, 1)]);
        assert!(bad.is_err());
    }

    #[test]
    fn walk_rotation_and_reversal() {
        let d = fixtures::g1();
        let c = Walk::new(
            &d,
            vec![WalkStep::new(0, 1), WalkStep::new(1, 1), WalkStep::new(2, -1)],
        )
        .unwrap();
        let r = c.rotated_to(2);
        assert_eq!(r.start(), 2);
        assert!(r.is_simple_cycle());
        assert_eq!(r.steps().len(), 3);
        let rev = c.reversed();
        assert_eq!(rev.start(), 1);
        assert_eq!(
            rev.multiplier(&d).unwrap(),
            c.multiplier(&d).unwrap().recip().unwrap()
        );
    }

    #[test]
    fn graph_json_round_trip() {
        let d = fixtures::g2();
        let js = serde_json::to_string(&d).unwrap();
        let back: ArcParamDigraph = serde_json::from_str(&js).unwrap();
        assert_eq!(back, d);
        // Validation applies on deserialize.
        let bad = r#"{"n": 2, "arcs": [{"tail": 1, "head": 2, "lambda": "0"}]}"#;
        assert!(serde_json::from_str::<ArcParamDigraph>(bad).is_err());
    }

    #[test]
    fn components_and_bfs_tree() {
        let d = ArcParamDigraph::from_triples(
            4,
            &[(1, 2, Rat::one()), (3, 4, Rat::one()), (4, 3, Rat::from_int(2))],
        )
        .unwrap();
        assert_eq!(d.connected_components(), vec![vec![1, 2], vec![3, 4]]);
        assert!(d.bfs_spanning_tree().is_err());
        let c = fixtures::g1();
        assert_eq!(c.bfs_spanning_tree().unwrap(), vec![0, 2]);
    }
}
