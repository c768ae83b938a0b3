//! One function per subcommand. Each returns the JSON payload plus the
//! negative/positive verdict; exit-code mapping and artifact emission live
//! in `main` and `io`.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use dpoly::bonds::{
    self, circular_balance, delta_translate, enumerate_integral_bonds_with_cap,
    validate_spanning_tree, BondSystem, DEFAULT_LATTICE_CAP,
};
use dpoly::dspace::{
    netmatrix_from_nnd, nnd_basis_with_cap, AffineSubspace, NNDBasis, NndOutcome,
    DEFAULT_ENUM_CAP,
};
use dpoly::gencycle::{
    bicircular_balance, classify_cycle, enumerate_comb_support_with_cap,
    enumerate_simple_cycles, is_generalized_delta_bond, CombSupport, DeltaSpec, SupportShape,
    DEFAULT_CYCLE_CAP, DEFAULT_ORACLE_CAP,
};
use dpoly::graph::{ArcParamDigraph, Walk, WalkStep};
use dpoly::planar::{dualize_flow_space, breakeven_parameterization, PlanarEmbedding};
use dpoly::poly::{recognize_network_form, sample_distributivity, DPolyhedron, HPolyhedron, SampleOutcome};
use dpoly::verify::{run_all, VerifyOptions};
use dpoly::{Error, Rat, RatVector};

use crate::dot;
use crate::io::{lib_failure, load, val, Failure, Outcome};

type CmdResult = Result<Outcome, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn expect_len(what: &str, got: usize, want: usize) -> Result<(), Failure> {
    if got == want {
        Ok(())
    } else {
        Err(usage(format!("{what} has length {got}, expected {want}")))
    }
}

fn load_graph(path: &Path) -> Result<ArcParamDigraph, Failure> {
    load(path)
}

fn unit_gains(d: &ArcParamDigraph, what: &str) -> Result<(), Failure> {
    if d.arcs().iter().all(|a| a.lambda == Rat::one()) {
        Ok(())
    } else {
        Err(usage(format!("{what} requires unit arc parameters")))
    }
}

pub fn check_distributive(h: &Path, trials: usize, seed: u64) -> CmdResult {
    let h: HPolyhedron = load(h)?;
    if let Some(dp) = recognize_network_form(&h) {
        return Ok(Outcome::pass(json!({
            "recognized": true,
            "refuted": false,
            "polyhedron": val(&dp),
        })));
    }
    match sample_distributivity(&h, trials, seed) {
        SampleOutcome::Refuted { x, y } => Ok(Outcome::negative(json!({
            "recognized": false,
            "refuted": true,
            "x": val(&x),
            "y": val(&y),
            "trials": trials,
        }))),
        SampleOutcome::NoRefutation { trials } => Ok(Outcome::pass(json!({
            "recognized": false,
            "refuted": false,
            "trials": trials,
        }))),
    }
}

#[derive(Deserialize)]
struct SpaceJson {
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    offset: Option<RatVector>,
    directions: Vec<RatVector>,
}

pub fn nnd_basis(space: &Path, cap: Option<usize>) -> CmdResult {
    let raw: SpaceJson = load(space)?;
    let n = raw
        .offset
        .as_ref()
        .map(RatVector::len)
        .or(raw.n)
        .or_else(|| raw.directions.first().map(RatVector::len))
        .ok_or_else(|| usage("ambient dimension underdetermined: give n, offset, or directions"))?;
    for (i, dir) in raw.directions.iter().enumerate() {
        expect_len(&format!("direction {i}"), dir.len(), n)?;
    }
    let offset = raw.offset.unwrap_or_else(|| RatVector::zeros(n));
    expect_len("offset", offset.len(), n)?;
    let space = AffineSubspace::new(offset, raw.directions);
    match nnd_basis_with_cap(&space, cap.unwrap_or(DEFAULT_ENUM_CAP)).map_err(lib_failure)? {
        NndOutcome::Basis(b) => Ok(Outcome::pass(json!({
            "distributive": true,
            "n": b.n(),
            "basis": val(&b.vectors()),
        }))),
        NndOutcome::NotDistributive { x, y } => Ok(Outcome::negative(json!({
            "distributive": false,
            "x": val(&x),
            "y": val(&y),
        }))),
    }
}

#[derive(Deserialize)]
struct BasisJson {
    n: usize,
    vectors: Vec<RatVector>,
}

pub fn netmatrix(basis: &Path) -> CmdResult {
    let raw: BasisJson = load(basis)?;
    for (i, v) in raw.vectors.iter().enumerate() {
        expect_len(&format!("basis vector {i}"), v.len(), raw.n)?;
    }
    let basis = NNDBasis::new(raw.n, raw.vectors).map_err(lib_failure)?;
    let g = netmatrix_from_nnd(&basis);
    let rendering = dot::graph("netmatrix", &g, &HashSet::new());
    Ok(Outcome::pass(json!({ "graph": val(&g) })).with_dot(rendering))
}

fn load_poly(graph: &Path, c: &Path) -> Result<DPolyhedron, Failure> {
    let d = load_graph(graph)?;
    let c: RatVector = load(c)?;
    expect_len("capacity vector", c.len(), d.m())?;
    Ok(DPolyhedron::inequalities(d, c))
}

pub fn member(graph: &Path, c: &Path, p: &Path) -> CmdResult {
    let poly = load_poly(graph, c)?;
    let p: RatVector = load(p)?;
    expect_len("potential", p.len(), poly.graph().n())?;
    match poly.violated_arc(&p) {
        None => Ok(Outcome::pass(json!({ "member": true }))),
        Some(arc) => Ok(Outcome::negative(json!({ "member": false, "violated_arc": arc }))),
    }
}

pub fn lattice_op(graph: &Path, c: &Path, p: &Path, q: &Path, join: bool) -> CmdResult {
    let poly = load_poly(graph, c)?;
    let n = poly.graph().n();
    let p: RatVector = load(p)?;
    let q: RatVector = load(q)?;
    expect_len("p", p.len(), n)?;
    expect_len("q", q.len(), n)?;
    for (name, v) in [("p", &p), ("q", &q)] {
        if let Some(arc) = poly.violated_arc(v) {
            return Ok(Outcome::negative(json!({
                "member": false,
                "which": name,
                "violated_arc": arc,
            })));
        }
    }
    let (key, out) = if join {
        ("join", poly.join(&p, &q).map_err(lib_failure)?)
    } else {
        ("meet", poly.meet(&p, &q).map_err(lib_failure)?)
    };
    Ok(Outcome::pass(json!({ key: val(&out) })))
}

fn load_system(
    graph: &Path,
    upper: &Path,
    lower: Option<&Path>,
) -> Result<BondSystem, Failure> {
    let d = load_graph(graph)?;
    let u: RatVector = load(upper)?;
    expect_len("upper capacities", u.len(), d.m())?;
    match lower {
        None => Ok(BondSystem::one_sided(d, u)),
        Some(l) => {
            let l: RatVector = load(l)?;
            expect_len("lower capacities", l.len(), d.m())?;
            BondSystem::two_sided(d, l, u).map_err(lib_failure)
        }
    }
}

pub fn reduce(graph: &Path, upper: &Path, lower: Option<&Path>) -> CmdResult {
    let sys = load_system(graph, upper, lower)?;
    let r = bonds::reduce(&sys).map_err(lib_failure)?;
    let rendering = dot::graph("reduced", r.augmented(), &HashSet::new());
    Ok(Outcome::pass(json!({
        "pins": val(&r.pins()),
        "kernel_dim": r.pins().len(),
        "augmented": val(r.augmented()),
    }))
    .with_dot(rendering))
}

pub fn bond(graph: &Path, p: &Path) -> CmdResult {
    let d = load_graph(graph)?;
    let p: RatVector = load(p)?;
    expect_len("potential", p.len(), d.n())?;
    let x = bonds::bond_of_potential(&d, &p);
    Ok(Outcome::pass(json!({ "bond": val(&x) })))
}

pub fn potential(graph: &Path, upper: &Path, lower: Option<&Path>, x: &Path) -> CmdResult {
    let sys = load_system(graph, upper, lower)?;
    let x: RatVector = load(x)?;
    expect_len("bond", x.len(), sys.graph().m())?;
    let r = bonds::reduce(&sys).map_err(lib_failure)?;
    match bonds::potential_of_bond(&r, &x) {
        Ok(p) => Ok(Outcome::pass(json!({
            "is_bond": true,
            "potential": val(&p),
            "feasible": sys.within_capacities(&x),
            "pins": val(&r.pins()),
        }))),
        Err(Error::NotABond { reason }) => {
            Ok(Outcome::negative(json!({ "is_bond": false, "reason": reason })))
        }
        Err(e) => Err(lib_failure(e)),
    }
}

pub fn delta_translate_cmd(
    graph: &Path,
    lower: &Path,
    upper: &Path,
    delta: &Path,
    tree: Option<&Path>,
) -> CmdResult {
    let d = load_graph(graph)?;
    unit_gains(&d, "balance translation")?;
    let cl: RatVector = load(lower)?;
    let cu: RatVector = load(upper)?;
    expect_len("lower capacities", cl.len(), d.m())?;
    expect_len("upper capacities", cu.len(), d.m())?;
    let deltas: Vec<(usize, Rat)> = load(delta)?;
    for &(arc, _) in &deltas {
        if arc >= d.m() {
            return Err(usage(format!("prescribed arc {arc} out of range (m = {})", d.m())));
        }
    }
    let tree = match tree {
        Some(path) => {
            let t: Vec<usize> = load(path)?;
            validate_spanning_tree(&d, &t).map_err(lib_failure)?;
            t
        }
        None => d.bfs_spanning_tree().map_err(lib_failure)?,
    };
    let (cl, cu, trans) = delta_translate(&d, &cl, &cu, &deltas, &tree).map_err(lib_failure)?;
    Ok(Outcome::pass(json!({
        "lower": val(&cl),
        "upper": val(&cu),
        "shift": val(trans.shift()),
        "tree": val(&tree),
    })))
}

pub fn lattice_enum(
    graph: &Path,
    lower: &Path,
    upper: &Path,
    delta: Option<&Path>,
    cap: Option<usize>,
) -> CmdResult {
    let d = load_graph(graph)?;
    unit_gains(&d, "integral bond enumeration")?;
    let cl: Vec<i64> = load(lower)?;
    let cu: Vec<i64> = load(upper)?;
    expect_len("lower capacities", cl.len(), d.m())?;
    expect_len("upper capacities", cu.len(), d.m())?;
    let deltas: Vec<(usize, i64)> = match delta {
        Some(path) => load(path)?,
        None => Vec::new(),
    };
    for &(arc, _) in &deltas {
        if arc >= d.m() {
            return Err(usage(format!("prescribed arc {arc} out of range (m = {})", d.m())));
        }
    }
    let lat =
        enumerate_integral_bonds_with_cap(&d, &cl, &cu, &deltas, cap.unwrap_or(DEFAULT_LATTICE_CAP))
            .map_err(lib_failure)?;
    let rendering = dot::hasse(&lat.bonds, &lat.covers);
    Ok(Outcome::pass(json!({
        "elements": val(&lat.bonds),
        "potentials": val(&lat.potentials),
        "covers": val(&lat.covers),
        "count": lat.len(),
    }))
    .with_dot(rendering))
}

fn support_json(h: &CombSupport) -> serde_json::Value {
    let shape = match h.shape() {
        SupportShape::Breakeven { cycle } => json!({
            "kind": "breakeven",
            "cycle": val(&cycle.steps()),
        }),
        SupportShape::Bicycle { gainy, connector, lossy } => json!({
            "kind": "bicycle",
            "gainy": val(&gainy.steps()),
            "lossy": val(&lossy.steps()),
            "connector": connector.as_ref().map(|w| val(&w.steps())),
        }),
    };
    json!({ "shape": shape, "flow": val(h.flow()), "signs": val(h.signed()) })
}

pub fn cycles(graph: &Path, cap: Option<usize>) -> CmdResult {
    let d = load_graph(graph)?;
    let cap = cap.unwrap_or(DEFAULT_CYCLE_CAP);
    let cycles = enumerate_simple_cycles(&d, cap).map_err(lib_failure)?;
    let mut cycle_rows = Vec::new();
    for c in &cycles {
        let class = classify_cycle(&d, c).map_err(lib_failure)?;
        let mult = c.multiplier(&d).map_err(lib_failure)?;
        cycle_rows.push(json!({
            "steps": val(&c.steps()),
            "class": val(&class),
            "multiplier": val(&mult),
        }));
    }
    let supports = enumerate_comb_support_with_cap(&d, cap).map_err(lib_failure)?;
    let mut bold = HashSet::new();
    for h in supports.iter().filter(|h| h.is_bicycle()) {
        bold.extend(h.signed().support());
    }
    let rendering = dot::graph("cycles", &d, &bold);
    Ok(Outcome::pass(json!({
        "cycles": cycle_rows,
        "supports": supports.iter().map(support_json).collect::<Vec<_>>(),
    }))
    .with_dot(rendering))
}

pub fn balance(graph: &Path, x: &Path, walk: Option<&Path>, cap: Option<usize>) -> CmdResult {
    let d = load_graph(graph)?;
    let x: RatVector = load(x)?;
    expect_len("arc vector", x.len(), d.m())?;
    match walk {
        Some(path) => {
            let steps: Vec<WalkStep> = load(path)?;
            if steps.is_empty() {
                return Err(usage("walk must have at least one step"));
            }
            let w = Walk::new(&d, steps).map_err(lib_failure)?;
            let b = circular_balance(&d, &w, &x).map_err(lib_failure)?;
            Ok(Outcome::pass(json!({ "balance": val(&b) })))
        }
        None => {
            let supports = enumerate_comb_support_with_cap(&d, cap.unwrap_or(DEFAULT_CYCLE_CAP))
                .map_err(lib_failure)?;
            let balances: Vec<_> =
                supports.iter().map(|h| val(&bicircular_balance(&d, h, &x))).collect();
            Ok(Outcome::pass(json!({
                "balances": balances,
                "supports": supports.len(),
            })))
        }
    }
}

pub fn is_bond(graph: &Path, c: &Path, x: &Path, delta: Option<&Path>) -> CmdResult {
    let d = load_graph(graph)?;
    let c: RatVector = load(c)?;
    let x: RatVector = load(x)?;
    expect_len("capacity vector", c.len(), d.m())?;
    expect_len("arc vector", x.len(), d.m())?;
    let supports = enumerate_comb_support_with_cap(&d, DEFAULT_CYCLE_CAP).map_err(lib_failure)?;
    let mut spec = DeltaSpec::zero();
    if let Some(path) = delta {
        let entries: Vec<(usize, Rat)> = load(path)?;
        for (i, v) in entries {
            if i >= supports.len() {
                return Err(usage(format!(
                    "prescription index {i} out of range ({} supports)",
                    supports.len()
                )));
            }
            spec.set(i, v);
        }
    }
    if is_generalized_delta_bond(&d, &c, &spec, &x).map_err(lib_failure)? {
        return Ok(Outcome::pass(json!({ "is_bond": true })));
    }
    let detail = if let Some(arc) = (0..d.m()).find(|&a| x[a] > c[a]) {
        json!({ "kind": "capacity", "arc": arc })
    } else {
        let (i, h) = supports
            .iter()
            .enumerate()
            .find(|(i, h)| bicircular_balance(&d, h, &x) != spec.get(*i))
            .expect("some balance must differ when membership fails");
        json!({
            "kind": "balance",
            "support": i,
            "value": val(&bicircular_balance(&d, h, &x)),
            "expected": val(&spec.get(i)),
        })
    };
    Ok(Outcome::negative(json!({ "is_bond": false, "violated": detail })))
}

pub fn dualize(embedding: &Path) -> CmdResult {
    let e: PlanarEmbedding = load(embedding)?;
    match dualize_flow_space(&e) {
        Ok(res) => {
            let rendering = format!(
                "{}{}",
                dot::graph("primal", res.base(), &HashSet::new()),
                dot::graph("dual", res.dual(), &HashSet::new())
            );
            Ok(Outcome::pass(val(&res)).with_dot(rendering))
        }
        Err(Error::NotBreakeven { arcs, multiplier }) => Ok(Outcome::negative(json!({
            "breakeven": false,
            "witness_arcs": arcs,
            "multiplier": multiplier,
        }))),
        Err(e) => Err(lib_failure(e)),
    }
}

pub fn breakeven_gen(graph: &Path, mu: &Path) -> CmdResult {
    let d = load_graph(graph)?;
    let mu: RatVector = load(mu)?;
    expect_len("vertex multipliers", mu.len(), d.n())?;
    let g = breakeven_parameterization(&d, &mu).map_err(lib_failure)?;
    let rendering = dot::graph("breakeven", &g, &HashSet::new());
    Ok(Outcome::pass(json!({ "graph": val(&g), "mu": val(&mu) })).with_dot(rendering))
}

pub fn verify(graph: &Path, seed: u64, cap: Option<usize>) -> CmdResult {
    let d = load_graph(graph)?;
    let opts = VerifyOptions {
        seed,
        oracle_cap: cap.unwrap_or(DEFAULT_ORACLE_CAP),
        ..VerifyOptions::default()
    };
    let report = run_all(&d, &opts).map_err(lib_failure)?;
    let passed = report.passed;
    let value = val(&report);
    Ok(if passed { Outcome::pass(value) } else { Outcome::negative(value) })
}
