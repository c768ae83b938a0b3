//! Small named instances used across tests, benches, and the verify suite.

use rand::Rng;

use crate::exact::{Rat, RatMatrix, RatVector};
use crate::graph::{ArcParamDigraph, Walk, WalkStep};
use crate::planar::PlanarEmbedding;
use crate::poly::{DPolyhedron, HPolyhedron};

/// Triangle: arcs (1,2) lam=2, (2,3) lam=3, (1,3) lam=6. Its one cycle is
/// breakeven; the flow space is spanned by (1, 1/3, -1/3).
pub fn g1() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(
        3,
        &[
            (1, 2, Rat::from_int(2)),
            (2, 3, Rat::from_int(3)),
            (1, 3, Rat::from_int(6)),
        ],
    )
    .unwrap()
}

/// Two vertices, arcs (1,2) lam=2, (2,1) lam=1, (1,2) lam=1/2. No breakeven
/// cycle; exactly one bicycle with flow (1, 3, 2).
pub fn g2() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(
        2,
        &[(1, 2, Rat::from_int(2)), (2, 1, Rat::one()), (1, 2, Rat::new(1, 2))],
    )
    .unwrap()
}

/// Directed 2-cycle with unit parameters.
pub fn digon() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(2, &[(1, 2, Rat::one()), (2, 1, Rat::one())]).unwrap()
}

/// Path 1 -> 2 -> 3 with unit parameters.
pub fn path3() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(3, &[(1, 2, Rat::one()), (2, 3, Rat::one())]).unwrap()
}

/// Path-shaped graph oriented out of its middle vertex: arcs (1,2) and (1,3),
/// unit parameters. Its bond lattice for 0/1 capacities is the 2x2 grid.
pub fn fork3() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(3, &[(1, 2, Rat::one()), (1, 3, Rat::one())]).unwrap()
}

/// One vertex carrying a gainy loop (lam=3) and a lossy loop (lam=1/3).
pub fn two_loops() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(1, &[(1, 1, Rat::from_int(3)), (1, 1, Rat::new(1, 3))])
        .unwrap()
}

/// `{0 <= p1, p1 <= 1, 0 <= p2, p2 <= 1}` as loop rows.
pub fn unit_square() -> DPolyhedron {
    let g = ArcParamDigraph::from_triples(
        2,
        &[
            (1, 1, Rat::zero()),
            (1, 1, Rat::from_int(2)),
            (2, 2, Rat::zero()),
            (2, 2, Rat::from_int(2)),
        ],
    )
    .unwrap();
    DPolyhedron::inequalities(g, RatVector::from_ints(&[1, 0, 1, 0]))
}

/// Order polytope of the 2-chain, `{0 <= p1 <= p2 <= 1}`: comparability arc
/// (2,1), an upper-bound loop at 2, a lower-bound loop at 1.
pub fn order_polytope_2chain() -> DPolyhedron {
    let g = ArcParamDigraph::from_triples(
        2,
        &[(2, 1, Rat::one()), (2, 2, Rat::zero()), (1, 1, Rat::from_int(2))],
    )
    .unwrap();
    DPolyhedron::inequalities(g, RatVector::from_ints(&[0, 1, 0]))
}

/// Unit-lambda difference system with integer capacities on a 3-cycle plus a
/// chord and an upper-bound loop; unbounded below, still max/min closed.
pub fn polytrope3() -> DPolyhedron {
    let g = ArcParamDigraph::from_triples(
        3,
        &[
            (1, 2, Rat::one()),
            (2, 3, Rat::one()),
            (3, 1, Rat::one()),
            (2, 1, Rat::one()),
            (1, 3, Rat::one()),
            (3, 3, Rat::zero()),
        ],
    )
    .unwrap();
    DPolyhedron::inequalities(g, RatVector::from_ints(&[1, 0, 1, 2, 3, 2]))
}

/// The triangle graph as a polyhedron with unit capacities.
pub fn g1_polyhedron() -> DPolyhedron {
    DPolyhedron::inequalities(g1(), RatVector::from_ints(&[1, 1, 1]))
}

/// Multiplier values used by the random corpus.
pub fn lambda_choices() -> [Rat; 5] {
    [Rat::new(1, 3), Rat::new(1, 2), Rat::one(), Rat::from_int(2), Rat::from_int(3)]
}

/// Random arc-parameterized digraph: up to `max_n` vertices, 1..=`max_m`
/// arcs with multipliers drawn from `lambda_choices`. Loops and parallel
/// arcs happen naturally.
pub fn random_lambda_graph<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> ArcParamDigraph {
    let choices = lambda_choices();
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let arcs: Vec<(usize, usize, Rat)> = (0..m)
        .map(|_| {
            let tail = rng.gen_range(1..=n);
            let head = rng.gen_range(1..=n);
            (tail, head, choices[rng.gen_range(0..choices.len())].clone())
        })
        .collect();
    ArcParamDigraph::from_triples(n, &arcs).expect("generated arcs valid")
}

/// Random connected unit-gain digraph: a random spanning tree with random
/// arc orientations plus up to `max_extra` further arcs.
pub fn random_unit_connected<R: Rng>(rng: &mut R, max_n: usize, max_extra: usize) -> ArcParamDigraph {
    let n = rng.gen_range(1..=max_n);
    let mut arcs: Vec<(usize, usize, Rat)> = Vec::new();
    for v in 2..=n {
        let parent = rng.gen_range(1..v);
        if rng.gen_bool(0.5) {
            arcs.push((parent, v, Rat::one()));
        } else {
            arcs.push((v, parent, Rat::one()));
        }
    }
    for _ in 0..rng.gen_range(0..=max_extra) {
        let tail = rng.gen_range(1..=n);
        let head = rng.gen_range(1..=n);
        arcs.push((tail, head, Rat::one()));
    }
    if arcs.is_empty() {
        arcs.push((1, 1, Rat::one()));
    }
    ArcParamDigraph::from_triples(n, &arcs).expect("generated arcs valid")
}

/// The diagonal line of R^4 described by six four-nonzero rows
/// `sum_{i in A} x_i - sum_{i not in A} x_i <= 0` over all 2-subsets A;
/// no row is scalable to arc shape.
pub fn six_ineq_r4() -> HPolyhedron {
    let mut rows = Vec::new();
    for i in 0..4usize {
        for j in (i + 1)..4 {
            let row: Vec<i64> = (0..4)
                .map(|k| if k == i || k == j { 1 } else { -1 })
                .collect();
            rows.push(row);
        }
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    HPolyhedron::all_le(RatMatrix::from_int_rows(&refs), RatVector::zeros(6))
}

/// A random arc-simple walk that never traverses a zero-parameter arc
/// (their loops block conserved chains). `None` when no step is available.
pub fn random_walk<R: Rng>(rng: &mut R, d: &ArcParamDigraph, max_len: usize) -> Option<Walk> {
    let target = rng.gen_range(1..=max_len.max(1));
    let mut current = rng.gen_range(1..=d.n());
    let mut steps: Vec<WalkStep> = Vec::new();
    while steps.len() < target {
        let options: Vec<WalkStep> = (0..d.m())
            .filter(|&a| !d.arc(a).lambda.is_zero())
            .filter(|&a| steps.iter().all(|s| s.arc != a))
            .flat_map(|a| {
                let arc = d.arc(a);
                let mut from = Vec::new();
                if arc.tail == current {
                    from.push(WalkStep::new(a, 1));
                }
                if arc.head == current && !arc.is_loop() {
                    from.push(WalkStep::new(a, -1));
                }
                from
            })
            .collect();
        if options.is_empty() {
            break;
        }
        let step = options[rng.gen_range(0..options.len())];
        let arc = d.arc(step.arc);
        current = if step.dir == 1 { arc.head } else { arc.tail };
        steps.push(step);
    }
    if steps.is_empty() {
        return None;
    }
    Some(Walk::new(d, steps).expect("generated walk valid"))
}

/// A random vertex-simple open path (no loops, no revisits), or `None`.
pub fn random_simple_path<R: Rng>(rng: &mut R, d: &ArcParamDigraph, max_len: usize) -> Option<Walk> {
    let target = rng.gen_range(1..=max_len.max(1));
    let mut current = rng.gen_range(1..=d.n());
    let mut visited = vec![current];
    let mut steps: Vec<WalkStep> = Vec::new();
    while steps.len() < target {
        let options: Vec<(WalkStep, usize)> = (0..d.m())
            .filter(|&a| !d.arc(a).lambda.is_zero() && !d.arc(a).is_loop())
            .flat_map(|a| {
                let arc = d.arc(a);
                let mut from = Vec::new();
                if arc.tail == current && !visited.contains(&arc.head) {
                    from.push((WalkStep::new(a, 1), arc.head));
                }
                if arc.head == current && !visited.contains(&arc.tail) {
                    from.push((WalkStep::new(a, -1), arc.tail));
                }
                from
            })
            .collect();
        if options.is_empty() {
            break;
        }
        let (step, next) = options[rng.gen_range(0..options.len())];
        visited.push(next);
        current = next;
        steps.push(step);
    }
    if steps.is_empty() {
        return None;
    }
    Some(Walk::new(d, steps).expect("generated path valid"))
}

/// Unit-parameter wheel: hub 1 with spokes to 2,3,4 and directed rim
/// 2 -> 3 -> 4 -> 2.
pub fn wheel() -> ArcParamDigraph {
    ArcParamDigraph::from_triples(
        4,
        &[
            (1, 2, Rat::one()),
            (1, 3, Rat::one()),
            (1, 4, Rat::one()),
            (2, 3, Rat::one()),
            (3, 4, Rat::one()),
            (4, 2, Rat::one()),
        ],
    )
    .expect("wheel fixture valid")
}

fn face(d: &ArcParamDigraph, steps: &[(usize, i8)]) -> Walk {
    Walk::new(d, steps.iter().map(|&(a, dir)| WalkStep::new(a, dir)).collect())
        .expect("face walk valid")
}

/// The triangle with its inner and outer face.
pub fn g1_embedding() -> PlanarEmbedding {
    let d = g1();
    let faces = vec![
        face(&d, &[(0, 1), (1, 1), (2, -1)]),
        face(&d, &[(2, 1), (1, -1), (0, -1)]),
    ];
    PlanarEmbedding::new(d, faces).expect("triangle embedding valid")
}

/// The digon with its two faces.
pub fn digon_embedding() -> PlanarEmbedding {
    let d = digon();
    let faces = vec![face(&d, &[(0, 1), (1, 1)]), face(&d, &[(0, -1), (1, -1)])];
    PlanarEmbedding::new(d, faces).expect("digon embedding valid")
}

/// The wheel with its three hub faces and the outer rim face.
pub fn wheel_embedding() -> PlanarEmbedding {
    let d = wheel();
    let faces = vec![
        face(&d, &[(0, 1), (3, 1), (1, -1)]),
        face(&d, &[(1, 1), (4, 1), (2, -1)]),
        face(&d, &[(2, 1), (5, 1), (0, -1)]),
        face(&d, &[(5, -1), (4, -1), (3, -1)]),
    ];
    PlanarEmbedding::new(d, faces).expect("wheel embedding valid")
}
