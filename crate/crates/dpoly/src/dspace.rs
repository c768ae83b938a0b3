//! Distributivity of affine subspaces via nonnegative disjoint-support bases.
//!
//! A subspace is closed under componentwise max/min exactly when its linear
//! part has an NND basis: nonnegative vectors with pairwise disjoint supports.
//! The search enumerates support-minimal vectors (subsets of coordinates in
//! increasing size, one rank test each), greedily collects the nonnegative
//! ones, and when that fails hunts for a witness pair whose max or min leaves
//! the space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{in_span, kernel_basis, rank, Rat, RatMatrix, RatVector};
use crate::graph::{Arc, ArcParamDigraph};
use crate::par;
use crate::{Error, Result};

/// Default cap on the ambient dimension for subset enumeration.
pub const DEFAULT_ENUM_CAP: usize = 16;

/// Affine subspace given by an offset and spanning directions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSubspace {
    offset: RatVector,
    directions: Vec<RatVector>,
}

impl AffineSubspace {
    pub fn new(offset: RatVector, directions: Vec<RatVector>) -> Self {
        let n = offset.len();
        assert!(directions.iter().all(|d| d.len() == n), "direction length mismatch");
        AffineSubspace { offset, directions }
    }

    /// Linear subspace through the origin.
    pub fn linear(n: usize, directions: Vec<RatVector>) -> Self {
        AffineSubspace::new(RatVector::zeros(n), directions)
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn offset(&self) -> &RatVector {
        &self.offset
    }

    pub fn directions(&self) -> &[RatVector] {
        &self.directions
    }

    pub fn dim(&self) -> usize {
        if self.directions.is_empty() {
            0
        } else {
            rank(&RatMatrix::from_rows(self.directions.to_vec()))
        }
    }
}

/// Nonnegative vectors with pairwise disjoint supports, spanning a subspace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NNDBasis {
    n: usize,
    vectors: Vec<RatVector>,
}

impl NNDBasis {
    pub fn new(n: usize, vectors: Vec<RatVector>) -> Result<Self> {
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (idx, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), n, "basis vector length mismatch");
            if !v.is_nonnegative() {
                return Err(Error::NotNonnegative { index: idx });
            }
            if v.is_zero() {
                return Err(Error::ZeroBasisVector { index: idx });
            }
            for coord in v.support() {
                if let Some(first) = seen[coord] {
                    return Err(Error::OverlappingSupports { first, second: idx });
                }
                seen[coord] = Some(idx);
            }
        }
        Ok(NNDBasis { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> &[RatVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Whether the vectors are nonnegative with pairwise disjoint supports.
pub fn is_nnd(vectors: &[RatVector]) -> bool {
    let Some(n) = vectors.first().map(RatVector::len) else {
        return true;
    };
    let mut covered = vec![false; n];
    for v in vectors {
        if !v.is_nonnegative() {
            return false;
        }
        for coord in v.support() {
            if covered[coord] {
                return false;
            }
            covered[coord] = true;
        }
    }
    true
}

/// Result of the NND basis search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NndOutcome {
    Basis(NNDBasis),
    /// Members of the linear part whose max or min falls outside of it.
    NotDistributive { x: RatVector, y: RatVector },
}

/// Support-minimal nonzero vectors of the span, one per minimal support,
/// scaled so the first nonzero entry is 1. Sorted by support.
pub fn support_minimal_vectors(
    n: usize,
    directions: &[RatVector],
    cap: usize,
) -> Result<Vec<RatVector>> {
    if n > cap {
        return Err(Error::CapacityExceeded {
            what: "ambient dimension for subset enumeration".into(),
            requested: n,
            limit: cap,
        });
    }
    let basis = row_basis(n, directions);
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let k = basis.len();
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for mask in 1u32..(1 << n) {
        by_size[mask.count_ones() as usize].push(mask);
    }
    let mut found: Vec<(u32, RatVector)> = Vec::new();
    for size in 1..=n {
        let prior: Vec<u32> = found.iter().map(|(m, _)| *m).collect();
        let fresh = par::filter_map_slice(&by_size[size], |&mask| {
            if prior.iter().any(|&p| mask & p == p) {
                return None;
            }
            // Coefficients c with sum(c_i * basis_i) vanishing outside mask.
            let outside: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) == 0).collect();
            let mut constraint = RatMatrix::zeros(outside.len(), k);
            for (r, &j) in outside.iter().enumerate() {
                for (i, b) in basis.iter().enumerate() {
                    *constraint.at_mut(r, i) = b[j].clone();
                }
            }
            let ker = kernel_basis(&constraint);
            let c = ker.first()?;
            let mut v = RatVector::zeros(n);
            for (i, b) in basis.iter().enumerate() {
                if !c[i].is_zero() {
                    v = v.add(&b.scale(&c[i]));
                }
            }
            let supp_mask: u32 = v.support().iter().map(|&j| 1u32 << j).sum();
            if supp_mask != mask {
                // A strictly smaller support slipped through; the true
                // minimal support was or will be found at its own size.
                return None;
            }
            let (_, first) = v.first_nonzero().expect("nonzero by construction");
            let inv = first.recip().expect("first nonzero entry");
            Some((mask, v.scale(&inv)))
        });
        found.extend(fresh);
    }
    let mut vectors: Vec<RatVector> = found.into_iter().map(|(_, v)| v).collect();
    vectors.sort_by_key(|v| v.support());
    Ok(vectors)
}

fn row_basis(n: usize, directions: &[RatVector]) -> Vec<RatVector> {
    if directions.is_empty() {
        return Vec::new();
    }
    assert!(directions.iter().all(|d| d.len() == n), "direction length mismatch");
    let (r, pivots) = RatMatrix::from_rows(directions.to_vec()).rref();
    (0..pivots.len()).map(|i| r.row(i)).collect()
}

/// NND basis of the linear part of `space`, or a witness pair refuting
/// distributivity. Ambient dimensions above `cap` report a capacity error.
pub fn nnd_basis_with_cap(space: &AffineSubspace, cap: usize) -> Result<NndOutcome> {
    let n = space.ambient_dim();
    let basis = row_basis(n, space.directions());
    let circuits = support_minimal_vectors(n, space.directions(), cap)?;
    // Greedy: nonnegative support-minimal vectors with disjoint supports. In a
    // distributive space these are exactly the NND basis elements up to scale.
    let mut picked: Vec<RatVector> = Vec::new();
    let mut covered = vec![false; n];
    for c in &circuits {
        let cand = if c.is_nonnegative() {
            Some(c.clone())
        } else if c.neg().is_nonnegative() {
            Some(c.neg())
        } else {
            None
        };
        let Some(v) = cand else { continue };
        if v.support().iter().any(|&j| covered[j]) {
            continue;
        }
        for &j in &v.support() {
            covered[j] = true;
        }
        picked.push(v);
    }
    if picked.len() == basis.len() {
        let mut vectors = picked;
        vectors.sort_by_key(|v| v.support()[0]);
        return Ok(NndOutcome::Basis(NNDBasis::new(n, vectors)?));
    }
    let (x, y) = find_witness(&basis, &circuits)?;
    Ok(NndOutcome::NotDistributive { x, y })
}

/// [`nnd_basis_with_cap`] with the default cap.
pub fn nnd_basis(space: &AffineSubspace) -> Result<NndOutcome> {
    nnd_basis_with_cap(space, DEFAULT_ENUM_CAP)
}

fn escapes_span(basis: &[RatVector], x: &RatVector, y: &RatVector) -> bool {
    !in_span(basis, &x.join(y)) || !in_span(basis, &x.meet(y))
}

fn find_witness(basis: &[RatVector], circuits: &[RatVector]) -> Result<(RatVector, RatVector)> {
    // Signed pairs of support-minimal vectors first.
    for (i, ci) in circuits.iter().enumerate() {
        for cj in &circuits[i..] {
            for (x, y) in [
                (ci.clone(), cj.clone()),
                (ci.clone(), cj.neg()),
                (ci.neg(), cj.clone()),
                (ci.neg(), cj.neg()),
            ] {
                if escapes_span(basis, &x, &y) {
                    return Ok((x, y));
                }
            }
        }
    }
    // Seeded random combinations of the basis.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sample = |rng: &mut ChaCha8Rng| -> RatVector {
        let mut v = RatVector::zeros(basis[0].len());
        for b in basis {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                v = v.add(&b.scale(&Rat::from_int(c)));
            }
        }
        v
    };
    for _ in 0..2000 {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        if escapes_span(basis, &x, &y) {
            return Ok((x, y));
        }
    }
    Err(Error::WitnessSearchFailed)
}

/// Digraph whose transposed network-matrix kernel is spanned by `basis`: a
/// path of arcs along each support (ascending, lambda the entry ratio) and a
/// `lambda = 0` loop on every uncovered coordinate.
pub fn netmatrix_from_nnd(basis: &NNDBasis) -> ArcParamDigraph {
    let n = basis.n();
    let mut vectors: Vec<&RatVector> = basis.vectors().iter().collect();
    vectors.sort_by_key(|v| v.support()[0]);
    let mut arcs = Vec::new();
    let mut covered = vec![false; n];
    for v in vectors {
        let supp = v.support();
        for &j in &supp {
            covered[j] = true;
        }
        for w in supp.windows(2) {
            let lam = v[w[1]].checked_div(&v[w[0]]).expect("support entries are nonzero");
            arcs.push(Arc::new(w[0] + 1, w[1] + 1, lam));
        }
    }
    for (j, c) in covered.iter().enumerate() {
        if !c {
            arcs.push(Arc::new(j + 1, j + 1, Rat::zero()));
        }
    }
    ArcParamDigraph::new(n, arcs).expect("constructed arcs are valid")
}

/// NND basis of `Ker(N^T)` for a disjoint union of trees and loops: one
/// vector per tree component, rooted at its lowest vertex with entry 1 and
/// walk-product entries elsewhere. Loop components with `lambda != 1` pin
/// their vertex and contribute nothing.
pub fn kernel_nnd_basis(d: &ArcParamDigraph) -> Result<NNDBasis> {
    let n = d.n();
    let mut has_nonloop = vec![false; n + 1];
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (idx, a) in d.arcs().iter().enumerate() {
        if a.is_loop() {
            continue;
        }
        has_nonloop[a.tail] = true;
        has_nonloop[a.head] = true;
        let (rt, rh) = (find(&mut parent, a.tail), find(&mut parent, a.head));
        if rt == rh {
            return Err(Error::NotForestAndLoops {
                reason: format!("arc {idx} closes a cycle through non-loop arcs"),
            });
        }
        parent[rt.max(rh)] = rt.min(rh);
    }
    for (idx, a) in d.arcs().iter().enumerate() {
        if a.is_loop() && has_nonloop[a.tail] {
            return Err(Error::NotForestAndLoops {
                reason: format!("loop {idx} sits on a tree vertex {}", a.tail),
            });
        }
    }
    // lambda != 1 loops force their vertex to zero.
    let mut pinned = vec![false; n + 1];
    for a in d.arcs() {
        if a.is_loop() && a.lambda != Rat::one() {
            pinned[a.tail] = true;
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 1..=n {
        let root = find(&mut parent, v);
        comps.entry(root).or_default().push(v);
    }
    let mut vectors = Vec::new();
    for (_, verts) in comps {
        if verts.iter().any(|&v| pinned[v]) {
            continue;
        }
        let root = verts[0];
        let mut entries = vec![None::<Rat>; n + 1];
        entries[root] = Some(Rat::one());
        let mut frontier = vec![root];
        while let Some(u) = frontier.pop() {
            let bu = entries[u].clone().unwrap();
            for a in d.arcs() {
                if a.is_loop() {
                    continue;
                }
                if a.tail == u && entries[a.head].is_none() {
                    entries[a.head] = Some(&bu * &a.lambda);
                    frontier.push(a.head);
                } else if a.head == u && entries[a.tail].is_none() {
                    entries[a.tail] =
                        Some(bu.checked_div(&a.lambda).expect("non-loop lambda is positive"));
                    frontier.push(a.tail);
                }
            }
        }
        let mut v = RatVector::zeros(n);
        for u in verts {
            v[u - 1] = entries[u].clone().expect("component vertices are reachable");
        }
        vectors.push(v);
    }
    NNDBasis::new(n, vectors)
}
