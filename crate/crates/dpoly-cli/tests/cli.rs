//! End-to-end tests of the binary: exit codes, JSON payloads, artifact
//! routing, and byte determinism.

use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dpoly"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("output parses as JSON")
}

#[test]
fn member_accepts_tight_point() {
    let (code, out, _) = run(&[
        "member",
        &data("g1.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_tight.json"),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["member"], Value::Bool(true));
    assert_eq!(v["seed"], Value::from(0));
}

#[test]
fn member_rejects_violating_point() {
    let (code, out, _) = run(&[
        "member",
        &data("g1.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_bad.json"),
    ]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["member"], Value::Bool(false));
    assert_eq!(v["violated_arc"], Value::from(1));
}

#[test]
fn malformed_json_reports_position() {
    let (code, out, err) = run(&[
        "member",
        &data("bad.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_tight.json"),
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("bad.json:2:"), "diagnostic names line and column: {err}");
}

#[test]
fn lattice_enum_digon_is_a_three_chain() {
    let (code, out, _) = run(&[
        "lattice-enum",
        &data("digon.json"),
        "--lower",
        &data("digon_lower.json"),
        "--upper",
        &data("digon_upper.json"),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["count"], Value::from(3));
    assert_eq!(v["elements"], json(r#"[["-1","1"],["0","0"],["1","-1"]]"#));
    assert_eq!(v["covers"], json("[[0,1],[1,2]]"));
}

#[test]
fn lattice_enum_over_cap_exits_3() {
    let (code, _, err) = run(&[
        "lattice-enum",
        &data("digon.json"),
        "--lower",
        &data("digon_lower_wide.json"),
        "--upper",
        &data("digon_upper_wide.json"),
        "--cap",
        "5",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("cap"), "cap diagnostic: {err}");
}

#[test]
fn check_distributive_six_inequality_is_inconclusive() {
    let (code, out, _) = run(&["check-distributive", &data("six_ineq.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["recognized"], Value::Bool(false));
    assert_eq!(v["refuted"], Value::Bool(false));
}

#[test]
fn check_distributive_recognizes_network_rows() {
    let (code, out, _) = run(&["check-distributive", &data("h_network.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["recognized"], Value::Bool(true));
    assert_eq!(v["polyhedron"]["graph"]["arcs"][0]["lambda"], Value::from("2"));
    assert_eq!(v["polyhedron"]["c"], json(r#"["1"]"#));
}

#[test]
fn check_distributive_refutes_simplex() {
    let (code, out, _) = run(&["check-distributive", &data("simplex.json")]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["refuted"], Value::Bool(true));
    assert_eq!(v["x"].as_array().expect("witness x").len(), 2);
    assert_eq!(v["y"].as_array().expect("witness y").len(), 2);
}

#[test]
fn verify_passes_on_fixtures() {
    let (code, out, _) = run(&["verify", &data("g1.json")]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["passed"], Value::Bool(true));

    let (code, out, _) = run(&["verify", &data("g2.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["bicycles"], Value::from(1));
    for check in v["checks"].as_array().expect("checks array") {
        assert_eq!(check["passed"], Value::Bool(true), "check failed: {check}");
    }
}

#[test]
fn verify_over_cap_exits_3() {
    let (code, _, _) = run(&["verify", &data("g1.json"), "--cap", "2"]);
    assert_eq!(code, 3);
}

#[test]
fn dualize_triangle_matches_known_dual() {
    let (code, out, _) = run(&["dualize", &data("g1_embedding.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["sigma"], json(r#"["1","3","1"]"#));
    assert_eq!(
        v["facial_flows"],
        json(r#"[["1","1/3","-1/3"],["-3","-1","1"]]"#)
    );
    let lambdas: Vec<&str> = v["dual"]["arcs"]
        .as_array()
        .expect("dual arcs")
        .iter()
        .map(|a| a["lambda"].as_str().expect("lambda string"))
        .collect();
    assert_eq!(lambdas, ["3", "3", "1/3"]);
}

#[test]
fn join_and_meet_return_componentwise_extremes() {
    let base = [
        data("g1.json"),
        "--c".into(),
        data("c_wide.json"),
        "--p".into(),
        data("p_tight.json"),
        "--q".into(),
        data("q_cone.json"),
    ];
    let args: Vec<&str> = std::iter::once("join").chain(base.iter().map(String::as_str)).collect();
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["join"], json(r#"["1","2","6"]"#));

    let args: Vec<&str> = std::iter::once("meet").chain(base.iter().map(String::as_str)).collect();
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["meet"], json(r#"["0","1","1"]"#));
}

#[test]
fn join_rejects_non_member_argument() {
    let (code, out, _) = run(&[
        "join",
        &data("g1.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_tight.json"),
        "--q",
        &data("q_cone.json"),
    ]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["member"], Value::Bool(false));
    assert_eq!(v["which"], Value::from("q"));
}

#[test]
fn bond_and_potential_round_trip() {
    let (code, out, _) = run(&["bond", &data("g1.json"), "--p", &data("p_tight.json")]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["bond"], json(r#"["1","-2","1"]"#));

    let (code, out, _) = run(&[
        "potential",
        &data("g1.json"),
        "--upper",
        &data("c_wide.json"),
        "--x",
        &data("c_tight.json"),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["is_bond"], Value::Bool(true));
    assert_eq!(v["potential"], json(r#"["0","1","1"]"#));
    assert_eq!(v["pins"], json("[1]"));
}

#[test]
fn reduce_pins_the_kernel_support() {
    let (code, out, _) = run(&["reduce", &data("g1.json"), "--upper", &data("c_wide.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["pins"], json("[1]"));
    assert_eq!(v["kernel_dim"], Value::from(1));
    let arcs = v["augmented"]["arcs"].as_array().expect("augmented arcs");
    assert_eq!(arcs.len(), 4);
    assert_eq!(arcs[3]["tail"], Value::from(1));
    assert_eq!(arcs[3]["head"], Value::from(1));
    assert_eq!(arcs[3]["lambda"], Value::from("0"));
}

#[test]
fn cycles_reports_classes_and_the_bicycle() {
    let (code, out, _) = run(&["cycles", &data("g2.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    let cycles = v["cycles"].as_array().expect("cycles array");
    assert_eq!(cycles.len(), 3);
    let mults: Vec<&str> =
        cycles.iter().map(|c| c["multiplier"].as_str().expect("multiplier")).collect();
    assert_eq!(mults, ["2", "4", "1/2"]);
    let classes: Vec<&str> =
        cycles.iter().map(|c| c["class"].as_str().expect("class")).collect();
    assert_eq!(classes, ["gainy", "gainy", "lossy"]);

    let supports = v["supports"].as_array().expect("supports array");
    assert_eq!(supports.len(), 1);
    assert_eq!(supports[0]["shape"]["kind"], Value::from("bicycle"));
    assert_eq!(supports[0]["flow"], json(r#"["1","3","2"]"#));
}

#[test]
fn is_bond_checks_capacities_and_balances() {
    let (code, out, _) = run(&[
        "is-bond",
        &data("g2.json"),
        "--c",
        &data("g2_caps.json"),
        "--x",
        &data("g2_bond.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["is_bond"], Value::Bool(true));

    let (code, out, _) = run(&[
        "is-bond",
        &data("g2.json"),
        "--c",
        &data("g2_caps.json"),
        "--x",
        &data("g2_bad_bond.json"),
    ]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["is_bond"], Value::Bool(false));
    assert_eq!(v["violated"]["kind"], Value::from("capacity"));
    assert_eq!(v["violated"]["arc"], Value::from(0));
}

#[test]
fn balance_handles_walks_and_supports() {
    let (code, out, _) = run(&[
        "balance",
        &data("digon.json"),
        "--x",
        &data("ones2.json"),
        "--walk",
        &data("digon_cycle.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["balance"], Value::from("2"));

    let (code, out, _) = run(&["balance", &data("g2.json"), "--x", &data("g2_bond.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["supports"], Value::from(1));
    assert_eq!(v["balances"], json(r#"["0"]"#));
}

#[test]
fn delta_translate_shifts_the_non_tree_arc() {
    let (code, out, _) = run(&[
        "delta-translate",
        &data("digon.json"),
        "--lower",
        &data("digon_lower.json"),
        "--upper",
        &data("digon_upper.json"),
        "--delta",
        &data("digon_delta.json"),
        "--tree",
        &data("digon_tree.json"),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["shift"], json(r#"["0","1"]"#));
    assert_eq!(v["lower"], json(r#"["-1","-2"]"#));
    assert_eq!(v["upper"], json(r#"["1","0"]"#));
}

#[test]
fn nnd_basis_accepts_the_diagonal_and_refutes_the_antidiagonal() {
    let (code, out, _) = run(&["nnd-basis", &data("span_diag.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["distributive"], Value::Bool(true));
    assert_eq!(v["basis"], json(r#"[["1","1","1","1"]]"#));

    let (code, out, _) = run(&["nnd-basis", &data("span_refuted.json")]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["distributive"], Value::Bool(false));
    assert!(v["x"].is_array() && v["y"].is_array(), "witness pair present");
}

#[test]
fn netmatrix_realizes_the_diagonal_basis_as_a_unit_path() {
    let (code, out, _) = run(&["netmatrix", &data("basis_diag.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["graph"]["n"], Value::from(4));
    let arcs = v["graph"]["arcs"].as_array().expect("arcs");
    assert_eq!(arcs.len(), 3);
    assert!(arcs.iter().all(|a| a["lambda"] == Value::from("1")));
}

#[test]
fn breakeven_gen_reproduces_the_triangle_parameters() {
    let (code, out, _) = run(&[
        "breakeven-gen",
        &data("g1.json"),
        "--mu",
        &data("mu_g1.json"),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    let lambdas: Vec<&str> = v["graph"]["arcs"]
        .as_array()
        .expect("arcs")
        .iter()
        .map(|a| a["lambda"].as_str().expect("lambda"))
        .collect();
    assert_eq!(lambdas, ["2", "3", "6"]);
}

#[test]
fn output_is_byte_deterministic_and_echoes_the_seed() {
    let (c1, out1, _) = run(&["verify", &data("g2.json")]);
    let (c2, out2, _) = run(&["verify", &data("g2.json")]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(out1, out2, "identical inputs and seed give identical bytes");

    let (_, seeded, _) = run(&["check-distributive", &data("six_ineq.json"), "--seed", "42"]);
    assert_eq!(json(&seeded)["seed"], Value::from(42));
}

#[test]
fn output_flag_routes_the_artifact_to_a_file() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("member.json");
    let (code, stdout, _) = run(&[
        "member",
        &data("g1.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_tight.json"),
        "--output",
        path.to_str().expect("utf8 path"),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty(), "artifact goes to the file only");
    let written = std::fs::read_to_string(&path).expect("file written");
    assert_eq!(json(&written)["member"], Value::Bool(true));
}

#[test]
fn dot_renders_the_hasse_diagram() {
    let (code, out, _) = run(&[
        "lattice-enum",
        &data("digon.json"),
        "--lower",
        &data("digon_lower.json"),
        "--upper",
        &data("digon_upper.json"),
        "--dot",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph hasse {"), "DOT artifact: {out}");
    assert_eq!(out.matches("->").count(), 2, "two cover edges");
}

#[test]
fn dot_without_a_rendering_is_a_usage_error() {
    let (code, _, err) = run(&[
        "member",
        &data("g1.json"),
        "--c",
        &data("c_tight.json"),
        "--p",
        &data("p_tight.json"),
        "--dot",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("DOT"), "explains the missing rendering: {err}");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}
