use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dsrg::catalog::{dedup_and_classify, Catalog};
use dsrg::enumerate::brute_force_enumerate;
use dsrg::io::write_graph;
use dsrg::params::DsrgParams;
use dsrg::perm::Permutation;

const CYCLE: &str = "3 1 0 0 1\n010\n001\n100\n";

fn dsrg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsrg"))
        .args(args)
        .current_dir(dir)
        .env_remove("DSRG_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_reports_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dsrg(&["check", "36", "10", "5", "2", "3"], dir.path());
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("100 = 100"));
    assert!(stdout(&ok).contains("pass"));
    let bad = dsrg(&["check", "52", "15", "6", "5", "6"], dir.path());
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("225 \u{2260} 297"));
    assert_eq!(code(&dsrg(&["check", "3", "1", "0", "0", "1"], dir.path())), 0);
}

#[test]
fn derive_cycle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c3.txt"), CYCLE).unwrap();
    let out = dsrg(&["derive", "c3.txt", "-p", "3", "-o", "z3"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("z3/om_001.om")).unwrap(), "3 1 0 0 1\n3 1 R\n3\n1\n");
    assert_eq!(fs::read_to_string(dir.path().join("z3/index.tsv")).unwrap().lines().count(), 2);

    let out = dsrg(&["derive", "c3.txt", "-p", "2", "-o", "z2"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("z2/index.tsv")).unwrap().lines().count(), 1);

    fs::write(dir.path().join("bad.txt"), "3 1 0 0 1\n011\n000\n000\n").unwrap();
    assert_eq!(code(&dsrg(&["derive", "bad.txt", "-p", "3"], dir.path())), 1);
}

#[test]
fn derive_uses_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c3.txt"), CYCLE).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dsrg"))
        .args(["derive", "c3.txt", "-p", "3"])
        .current_dir(dir.path())
        .env("DSRG_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("from-env/index.tsv").exists());
}

#[test]
fn validate_om_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ok.om"), "6 2 1 0 1\n3 2 R\n3 3\n1 1\n1 1\n").unwrap();
    let out = dsrg(&["validate-om", "ok.om"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("valid\n"));
    fs::write(dir.path().join("bad.om"), "6 2 1 0 1\n3 2 R\n3 3\n2 0\n0 2\n").unwrap();
    let out = dsrg(&["validate-om", "bad.om"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("condition"));
    fs::write(dir.path().join("garbled.om"), "6 2 1 0 1\n3 2 Q\n").unwrap();
    assert_eq!(code(&dsrg(&["validate-om", "garbled.om"], dir.path())), 1);
}

fn write_manifest(dir: &Path, name: &str, om: &str, seed: Option<u64>) {
    fs::write(dir.join(format!("{name}.om")), om).unwrap();
    let p: Vec<&str> = om.lines().next().unwrap().split(' ').collect();
    let mut text = format!(
        "params = {{ v = {}, k = {}, t = {}, lambda = {}, mu = {} }}\norbit_matrix = \"{name}.om\"\n\n[ga]\nPOP = 20\nMaxNrOfGenerations = 200\nMaxNrOfCompleteResets = 2\nMaxNrOfPartialResets = 2\nFitnessForDSRGNrOfRepeatsMax = 20\n",
        p[0], p[1], p[2], p[3], p[4]
    );
    if let Some(s) = seed {
        text.push_str(&format!("seed = {s}\n"));
    }
    fs::write(dir.join(format!("{name}.toml")), text).unwrap();
}

#[test]
fn search_cycle_finds_one_class_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), "c3", "3 1 0 0 1\n3 1 R\n3\n1\n", Some(5));
    let a = dsrg(&["search", "c3.toml", "-o", "a"], dir.path());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = dsrg(&["search", "c3.toml", "-o", "b"], dir.path());
    assert_eq!(code(&b), 0);
    let cat_a = fs::read_to_string(dir.path().join("a/catalog.txt")).unwrap();
    assert_eq!(cat_a, fs::read_to_string(dir.path().join("b/catalog.txt")).unwrap());
    assert_eq!(Catalog::parse(&cat_a).unwrap().len(), 1);
    assert_eq!(
        fs::read(dir.path().join("a/runs/seed_5.json")).unwrap(),
        fs::read(dir.path().join("b/runs/seed_5.json")).unwrap()
    );
    assert!(dir.path().join("a/summary.csv").exists());

    // the written manifest replays the run
    let c = dsrg(&["search", "a/manifest.toml", "-o", "c"], dir.path());
    assert_eq!(code(&c), 0);
    assert_eq!(cat_a, fs::read_to_string(dir.path().join("c/catalog.txt")).unwrap());
}

#[test]
fn search_without_seed_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), "c3", "3 1 0 0 1\n3 1 R\n3\n1\n", None);
    let out = dsrg(&["search", "c3.toml", "-o", "out", "--stop-on-first"], dir.path());
    assert_eq!(code(&out), 0);
    let line = stdout(&out).lines().next().unwrap().to_string();
    assert!(line.starts_with("seed ") && line.ends_with("(drawn from entropy)"), "{line}");
    let seed = line.split(' ').nth(1).unwrap();
    assert!(dir.path().join(format!("out/runs/seed_{seed}.json")).exists());
}

#[test]
fn search_trivial_action_matches_oracle_classes() {
    let p = DsrgParams::new(6, 2, 1, 0, 1).unwrap();
    let oracle = dedup_and_classify(&brute_force_enumerate(&p, 8).unwrap(), &p).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut merged_inputs = Vec::new();
    for (idx, entry) in oracle.entries().enumerate() {
        // the trivial action's orbit matrix is the adjacency matrix itself
        let g = &entry.canonical;
        let mut om = String::from("6 2 1 0 1\n1 6 R\n1 1 1 1 1 1\n");
        for row in g.row_strings() {
            let cells: Vec<String> = row.chars().map(String::from).collect();
            om.push_str(&cells.join(" "));
            om.push('\n');
        }
        let name = format!("t{idx}");
        write_manifest(dir.path(), &name, &om, Some(1));
        let out = dsrg(&["search", &format!("{name}.toml"), "-o", &name], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        merged_inputs.push(format!("{name}/catalog.txt"));
    }
    let mut args = vec!["catalog-merge", "-o", "all.txt"];
    args.extend(merged_inputs.iter().map(String::as_str));
    assert_eq!(code(&dsrg(&args, dir.path())), 0);
    let merged = Catalog::parse(&fs::read_to_string(dir.path().join("all.txt")).unwrap()).unwrap();
    let keys = |c: &Catalog| c.entries().map(|e| e.canonical_bytes.clone()).collect::<Vec<_>>();
    assert_eq!(keys(&merged), keys(&oracle));
}

#[test]
fn search_rejects_invalid_orbit_matrix() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), "bad", "6 2 1 0 1\n3 2 R\n3 3\n2 0\n0 2\n", Some(1));
    let out = dsrg(&["search", "bad.toml", "-o", "out"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("condition"));
}

#[test]
fn verify_canon_fitness() {
    let dir = tempfile::tempdir().unwrap();
    let p = DsrgParams::new(6, 2, 1, 0, 1).unwrap();
    let g = brute_force_enumerate(&p, 8).unwrap().remove(0);
    let relabeled = g.relabel(&Permutation::parse_cycles("(0 3 5)(1 2)", 6).unwrap());
    fs::write(dir.path().join("g.txt"), write_graph(&p, &g)).unwrap();
    fs::write(dir.path().join("h.txt"), write_graph(&p, &relabeled)).unwrap();
    fs::write(dir.path().join("z.txt"), "6 2 1 0 1\n000000\n000000\n000000\n000000\n000000\n000000\n").unwrap();

    let v = dsrg(&["verify", "g.txt"], dir.path());
    assert_eq!(code(&v), 0);
    let z = dsrg(&["verify", "z.txt"], dir.path());
    assert_eq!(code(&z), 1);
    assert!(stdout(&z).contains("regularity"));

    let cg = dsrg(&["canon", "g.txt"], dir.path());
    let ch = dsrg(&["canon", "h.txt"], dir.path());
    assert_eq!(code(&cg), 0);
    assert_eq!(cg.stdout, ch.stdout);

    let f = dsrg(&["fitness", "g.txt"], dir.path());
    assert!(stdout(&f).contains("deficit 0"));
    let f = dsrg(&["fitness", "z.txt"], dir.path());
    assert!(stdout(&f).contains("deficit 24"), "{}", stdout(&f));

    assert_eq!(code(&dsrg(&["verify", "missing.txt"], dir.path())), 1);
}
