use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eprkit::io::{self, Object, SerializedObject};
use eprkit::linalg::{self, re, ComplexMatrix, ComplexVector};
use eprkit::states::{self, bell_state, Seed};
use eprkit::PureState;

const BIN: &str = env!("CARGO_BIN_EXE_eprkit");

struct Fixtures {
    dir: tempfile::TempDir,
}

impl Fixtures {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn save(&self, name: &str, object: Object) -> PathBuf {
        let p = self.path(name);
        io::save(&p, &object).unwrap();
        p
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("EPRKIT_SEED").output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn records(out: &Output) -> Vec<SerializedObject> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| io::parse_record(l).unwrap())
        .collect()
}

fn objects(out: &Output) -> Vec<Object> {
    records(out).iter().map(|r| r.to_object().unwrap()).collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn report(object: &Object) -> &io::Report {
    match object {
        Object::Report(r) => r,
        other => panic!("expected report, got {:?}", other.kind()),
    }
}

#[test]
fn schmidt_of_bell_state() {
    let f = Fixtures::new();
    let bell = f.save("bell0.state", Object::PureState(bell_state(0).unwrap()));
    let out = run(&["schmidt", arg(&bell), "--out", arg(&f.path("bell0.schmidt"))]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs[0].meta["class"], "maximally_entangled");
    match recs[0].to_object().unwrap() {
        Object::Schmidt(d) => {
            assert!((d.coefficients[0] - 0.5).abs() < 1e-12);
            assert!((d.coefficients[1] - 0.5).abs() < 1e-12);
        }
        other => panic!("wrong kind {:?}", other.kind()),
    }
    assert!(matches!(io::load(f.path("bell0.schmidt")).unwrap(), Object::Schmidt(_)));

    let pretty = run(&["--pretty", "schmidt", arg(&bell)]);
    assert_eq!(code(&pretty), 0);
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("maximally_entangled"));
}

#[test]
fn schmidt_of_2x3_state_reconstructs() {
    let f = Fixtures::new();
    let psi = states::random_pure(&[2, 3], &mut Seed(1).rng()).unwrap();
    let path = f.save("psi.state", Object::PureState(psi.clone()));
    let out = run(&["schmidt", arg(&path)]);
    assert_eq!(code(&out), 0);
    match &objects(&out)[0] {
        Object::Schmidt(d) => assert!(linalg::max_abs_diff(&d.reconstruct(), psi.amplitudes()) < 1e-12),
        other => panic!("wrong kind {:?}", other.kind()),
    }
}

#[test]
fn smap_both_directions() {
    let f = Fixtures::new();
    let psi = states::random_pure(&[2, 3], &mut Seed(2).rng()).unwrap();
    let path = f.save("psi.state", Object::PureState(psi));
    for (dir, shape) in [("ba", (3, 2)), ("ab", (2, 3))] {
        let out = run(&["smap", arg(&path), "--direction", dir]);
        assert_eq!(code(&out), 0);
        match &objects(&out)[0] {
            Object::AntilinearMap(s) => assert_eq!((s.dst_dim(), s.src_dim()), shape),
            other => panic!("wrong kind {:?}", other.kind()),
        }
    }
    assert_eq!(code(&run(&["smap", arg(&path), "--direction", "sideways"])), 2);
}

#[test]
fn channel_build_apply_dual() {
    let f = Fixtures::new();
    let rho = states::random_density(&[2, 2], 3, &mut Seed(3).rng()).unwrap();
    let rho_path = f.save("rho.density", Object::Density(rho.clone()));
    let out = run(&["channel", "build", arg(&rho_path)]);
    assert_eq!(code(&out), 0);
    let channel_path = f.write("phi.channel", &String::from_utf8(out.stdout).unwrap());

    let pi = linalg::projector(&linalg::basis_vector(2, 0));
    let pi_path = f.save("pi.op", Object::Operator(pi.clone()));
    let out = run(&["channel", "apply", arg(&channel_path), arg(&pi_path)]);
    assert_eq!(code(&out), 0);
    let applied = match &objects(&out)[0] {
        Object::Operator(m) => m.clone(),
        other => panic!("wrong kind {:?}", other.kind()),
    };
    // π ⊗ Φ(π) is the Lüders-projected state
    let lifted = linalg::tensor(&pi, &linalg::identity(2));
    let projected = &lifted * rho.matrix() * &lifted;
    assert!(linalg::max_abs_diff(&linalg::tensor(&pi, &applied), &projected) < 1e-10);

    let y_path = f.save("y.op", Object::Operator(linalg::identity(2)));
    let out = run(&["channel", "dual", arg(&channel_path), arg(&y_path)]);
    assert_eq!(code(&out), 0);
    match &objects(&out)[0] {
        Object::Operator(x) => {
            let rho_a = rho.partial_trace(0).unwrap();
            assert!(linalg::max_abs_diff(x, rho_a.matrix()) < 1e-10);
        }
        other => panic!("wrong kind {:?}", other.kind()),
    }
}

#[test]
fn measure_writes_post_state() {
    let f = Fixtures::new();
    let bell = f.save("bell.state", Object::PureState(bell_state(0).unwrap()));
    let v = f.save("zero.state", Object::PureState(PureState::new(vec![2], linalg::basis_vector(2, 0)).unwrap()));
    let post = f.path("post.density");
    let out = run(&["measure", arg(&bell), "--vector", arg(&v), "--out", arg(&post)]);
    assert_eq!(code(&out), 0);
    let objs = objects(&out);
    let probability = report(&objs[0]).column("probability").unwrap()[0];
    assert!((probability - 0.5).abs() < 1e-12);
    match io::load(&post).unwrap() {
        Object::Density(rho) => {
            assert!(rho.is_subnormalized());
            assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        }
        other => panic!("wrong kind {:?}", other.kind()),
    }
}

#[test]
fn teleport_run_with_derived_corrections() {
    let f = Fixtures::new();
    let input = states::random_pure(&[2], &mut Seed(4).rng()).unwrap();
    let input_path = f.save("in.state", Object::PureState(input));
    let ancilla = f.save("bell.state", Object::PureState(bell_state(0).unwrap()));
    let out = run(&[
        "teleport", "run", "--input", arg(&input_path), "--ancilla", arg(&ancilla), "--basis", "bell", "--corrections", "derive",
    ]);
    assert_eq!(code(&out), 0);
    let objs = objects(&out);
    let table = report(&objs[0]);
    for p in table.column("probability").unwrap() {
        assert!((p - 0.25).abs() < 1e-10);
    }
    for fid in table.column("fidelity").unwrap() {
        assert!((fid - 1.0).abs() < 1e-9);
    }
}

#[test]
fn teleport_run_with_files_and_samples() {
    let f = Fixtures::new();
    let input = states::random_pure(&[2], &mut Seed(5).rng()).unwrap();
    let input_path = f.save("in.state", Object::PureState(input));
    let ancilla = f.save("w.density", Object::Density(states::werner(0.6).unwrap()));
    let basis = f.save("bell.basis", Object::Basis(states::bell_basis()));
    let us = eprkit::teleport::derive_corrections(&bell_state(0).unwrap(), &states::bell_basis()).unwrap();
    let lines: Vec<String> = us
        .into_iter()
        .map(|u| SerializedObject::from_object(&Object::Operator(u)).to_json_line())
        .collect();
    let corrections = f.write("us.jsonl", &lines.join("\n"));
    let args = [
        "teleport", "run", "--input", arg(&input_path), "--ancilla", arg(&ancilla), "--basis", arg(&basis),
        "--corrections", arg(&corrections), "--samples", "20", "--seed", "9",
    ];
    let first = run(&args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let objs = objects(&first);
    for fid in report(&objs[0]).column("fidelity").unwrap() {
        assert!((fid - 0.8).abs() < 1e-9);
    }
    let draws = report(&objs[1]).column("outcome").unwrap();
    assert_eq!(draws.len(), 20);
    assert!(draws.iter().all(|&i| (0.0..4.0).contains(&i)));

    // the environment supplies the default seed
    let no_seed: Vec<&str> = args[..args.len() - 2].to_vec();
    let env = Command::new(BIN).args(&no_seed).env("EPRKIT_SEED", "9").output().unwrap();
    assert_eq!(env.stdout, first.stdout);
}

#[test]
fn teleport_sweep_csv() {
    let out = run(&["teleport", "sweep", "--werner-p", "0,0.5,1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,outcome,probability,trace_norm,sqrt_fidelity,corrected_fidelity");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[5] - 1.0).abs() < 1e-9);
    for row in &rows {
        assert!((row[5] - (1.0 + row[0]) / 2.0).abs() < 1e-9);
    }
    assert_eq!(code(&run(&["teleport", "sweep", "--werner-p", "0,1.5"])), 2);
}

#[test]
fn modular_reports_all_relations() {
    let f = Fixtures::new();
    let psi = states::random_pure(&[2, 2], &mut Seed(6).rng()).unwrap();
    let path = f.save("psi.state", Object::PureState(psi));
    let out = run(&["modular", arg(&path)]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    let names: Vec<&str> = recs[..3].iter().map(|r| r.meta["name"].as_str()).collect();
    assert_eq!(names, ["J", "delta", "S"]);
    let objs = objects(&out);
    let table = report(&objs[3]);
    let support = table.column("support_residual").unwrap();
    assert!(support[0] < 1e-9 && support[1] < 1e-9 && support[2] < 1e-9 && support[4] < 1e-9);
}

#[test]
fn verify_all_small_and_reproducible() {
    let args = ["verify", "all", "--dims", "2,2", "--trials", "10", "--seed", "7"];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, run(&args).stdout);
    for r in records(&a) {
        assert_eq!(r.meta["status"], "pass", "{}", r.meta["suite"]);
    }
    assert_eq!(code(&run(&["verify", "all", "--dims", "2"])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["schmidt", "/nonexistent/file.state"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn parse_errors_exit_3() {
    let f = Fixtures::new();
    let broken = f.write("broken.state", "{\"schema\": \"eprkit/1\",\n  \"kind\": ");
    let out = run(&["schmidt", arg(&broken)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let mut record = SerializedObject::from_object(&Object::PureState(bell_state(0).unwrap()));
    record.schema = "eprkit/0".into();
    let old = f.write("old.state", &record.to_json_line());
    assert_eq!(code(&run(&["schmidt", arg(&old)])), 3);
}

#[test]
fn invariant_errors_exit_1() {
    let f = Fixtures::new();
    let m = ComplexMatrix::from_row_slice(2, 2, &[re(0.5), re(0.0), re(0.0), re(0.4)]);
    let record = SerializedObject {
        schema: io::SCHEMA.into(),
        kind: "density".into(),
        dims: vec![2],
        data: m.transpose().iter().map(|z| [z.re, z.im]).collect(),
        meta: Default::default(),
    };
    let path = f.write("short.density", &record.to_json_line());
    let v = f.save("zero.state", Object::PureState(PureState::new(vec![2], ComplexVector::from_vec(vec![re(1.0), re(0.0)])).unwrap()));
    let out = run(&["measure", arg(&path), "--vector", arg(&v)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit_trace"));
}
