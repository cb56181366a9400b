use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("membrane-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn membrane(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_membrane")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn check_example1_is_ill_formed() {
    let (code, out, _) = membrane(&["check", &example("example1_attack.mem")]);
    assert_eq!(code, 1);
    assert_eq!(
        out,
        "mode: entry/set\n\
         coherent: yes\n\
         well-formed: no\n  \
         bob: action `take` not in {info, req} [t-mig > t-act] at `take.nil`\n  \
         alice: action `take` not in {give} [t-mig > t-act > t-mig > t-act] at `take.nil`\n"
    );
}

#[test]
fn run_example1_admits_the_lying_digest() {
    let (code, out, _) = membrane(&["run", &example("example1_attack.mem"), "--steps", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("bob -> home {info, req} admitted"), "{out}");
    assert!(out.contains("final:\n"));
}

#[test]
fn run_licence_denies_the_third_arrival() {
    let (code, out, _) = membrane(&[
        "run",
        &example("licence.mem"),
        "--regime",
        "multiset",
        "--membrane",
        "dynamic",
        "--theta",
        &example("licence.theta"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "#1 c3 -> licence_serv {get_licence} admitted\n\
         #2 c2 -> licence_serv {get_licence} admitted\n\
         #3 licence_serv: get_licence\n\
         #4 licence_serv: get_licence\n\
         #5 c1 -> licence_serv {get_licence} denied: needs {get_licence}, only {} remains\n\
         # stuck for good: c1 -> licence_serv (budgets only shrink)\n\
         final:\n\
         c1[ trust { c1: good }; policy {}; go(licence_serv, {get_licence}).get_licence.nil ]\n\
         || c2[ trust { c2: good }; policy {}; nil ]\n\
         || c3[ trust { c3: good }; policy {}; nil ]\n\
         || licence_serv[ trust { c1: good, c2: good, c3: good, licence_serv: good }; policy {}; nil ]\n"
    );
}

#[test]
fn zero_steps_gives_an_empty_trace() {
    let (code, out, _) = membrane(&["run", &example("mail_spam_set.mem"), "--steps", "0"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("final:\n"), "{out}");
}

#[test]
fn derived_resident_record_is_announced() {
    let (code, out, _) =
        membrane(&["check", &example("licence.mem"), "--regime", "multiset", "--membrane", "dynamic"]);
    assert_eq!(code, 0);
    assert!(out.contains("resident record: derived from the initial system"), "{out}");
}

#[test]
fn spam_passes_set_membranes_and_not_multiset_ones() {
    let (_, set_run, _) = membrane(&["run", &example("mail_spam_set.mem"), "--steps", "3"]);
    assert!(set_run.contains("spam -> mail_serv {send} admitted"), "{set_run}");
    let (_, ms_run, _) = membrane(&["run", &example("mail_spam_set.mem"), "--regime", "multiset", "--steps", "3"]);
    assert!(ms_run.contains("spam -> mail_serv {send} denied"), "{ms_run}");
}

#[test]
fn verify_mail_server_is_clean() {
    let (code, out, _) = membrane(&["verify", &example("mail_spam_multiset.mem"), "--regime", "multiset"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("SUMMARY ok\n"));
}

#[test]
fn verify_example1_reports_take() {
    let (code, out, _) = membrane(&["verify", &example("example1_attack.mem"), "--format", "report"]);
    assert_eq!(code, 1);
    assert!(out.contains("home\t-\ttake\t`take` exceeds {info, req, secure}\n"), "{out}");
    assert!(out.contains("secure\t-\ttake\t`take` exceeds {give, home}\n"), "{out}");
    assert!(out.ends_with("SUMMARY violations=4\n"), "{out}");
    assert!(!out.starts_with("mode:"));
}

#[test]
fn dfa_examples_are_well_formed_and_safe() {
    let bundle = example("policies.dfa");
    for file in ["mail_dfa.mem", "lock_unlock.mem", "secrecy.mem"] {
        let (code, out, err) = membrane(&["check", &example(file), "--regime", "dfa", "--dfa", &bundle]);
        assert_eq!(code, 0, "{file}: {out}{err}");
        let (code, out, _) = membrane(&["verify", &example(file), "--regime", "dfa", "--dfa", &bundle]);
        assert_eq!(code, 0, "{file}: {out}");
    }
    let (_, out, _) = membrane(&["run", &example("secrecy.mem"), "--regime", "dfa", "--dfa", &bundle]);
    assert!(out.contains("l -> home @secrecy denied: code violates @secrecy: `secret l` rejected"), "{out}");
}

#[test]
fn tiny_bound_is_undecided() {
    let bundle = scratch("all.dfa", "states: q\nalphabet: lock unlock\nstart: q\nfinal: q\ntrans: q lock -> q\ntrans: q unlock -> q\n");
    let sys = scratch("repl.mem", "s[ trust { s: good }; policy @all; !lock.unlock.nil ]\n");
    let (code, out, _) = membrane(&["check", &sys, "--regime", "dfa", "--dfa", &bundle, "--bound", "1"]);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("well-formed: unknown"), "{out}");
    let (code, out, _) = membrane(&["verify", &sys, "--regime", "dfa", "--dfa", &bundle, "--bound", "1", "--depth", "3"]);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("# undecided checks:"), "{out}");
}

#[test]
fn empty_system_is_well_formed() {
    let sys = scratch("empty.mem", "");
    let (code, out, _) = membrane(&["check", &sys]);
    assert_eq!(code, 0);
    assert!(out.contains("well-formed: yes"));
}

#[test]
fn input_errors_exit_2() {
    let (code, _, err) = membrane(&["check", "/nonexistent/x.mem"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, err) = membrane(&["check", &example("mail_dfa.mem"), "--regime", "dfa"]);
    assert_eq!((code, err.as_str()), (2, "the dfa regime needs an automaton bundle (--dfa)\n"));
    let (code, _, _) = membrane(&["check", &example("example1_attack.mem"), "--membrane", "static"]);
    assert_eq!(code, 2);
    let bad = scratch("bad.mem", "s[ trust {}; policy {a}; a. ]");
    let (code, _, err) = membrane(&["check", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.mem:1:"), "{err}");
}

#[test]
fn infer_prints_least_policies() {
    assert_eq!(membrane(&["infer", "!send.nil"]).1, "{send^w}\n");
    assert_eq!(membrane(&["infer", "nil"]).1, "{}\n");
    let (code, out, err) = membrane(&["infer", "go(l,{a^1}).a.a.nil"]);
    assert_eq!((code, out.as_str()), (0, "undefined\n"));
    assert!(err.contains("does not enforce"), "{err}");
}

#[test]
fn same_seed_same_bytes() {
    let args = ["run", &example("example1_attack.mem"), "--seed", "11", "--steps", "10"];
    assert_eq!(membrane(&args), membrane(&args));
}
