use std::path::Path;
use std::process::{Command, Output};

fn gtcert(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtcert")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcert(dir.path(), &["certify", "--family", "fibonacci", "--param", "m=4", "--out", "f4.gtc"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = gtcert(dir.path(), &["verify", "f4.gtc", "--method", "proof,coset"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("status=verified\nproof=pass"), "{text}");
    assert!(text.contains("coset=pass"), "{text}");
}

#[test]
fn corrupted_certificate_fails() {
    let dir = tempfile::tempdir().unwrap();
    gtcert(dir.path(), &["certify", "--family", "klein", "--out", "k.gtc"]);
    let good = std::fs::read_to_string(dir.path().join("k.gtc")).unwrap();
    let bad = good.replace("factor: y | 1", "factor: y^2 | 1");
    assert_ne!(bad, good);
    std::fs::write(dir.path().join("bad.gtc"), bad).unwrap();
    let o = gtcert(dir.path(), &["verify", "bad.gtc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("proof=fail"), "{}", stdout(&o));
}

#[test]
fn batch_keeps_input_order_and_names_failures() {
    let dir = tempfile::tempdir().unwrap();
    let families: [&[&str]; 3] = [
        &["--family", "rss", "--param", "p=5,q=2,m=-3"],
        &["--family", "torusbundle", "--param", "a=0,b=-1,c=1,d=-1"],
        &["--family", "fibonacci", "--param", "m=7"],
    ];
    let mut names = Vec::new();
    for (i, family) in families.iter().enumerate() {
        let name = format!("c{i}.gtc");
        let mut args = vec!["certify"];
        args.extend_from_slice(family);
        args.extend_from_slice(&["--out", &name]);
        assert_eq!(gtcert(dir.path(), &args).status.code(), Some(0));
        names.push(name);
    }
    let mut args = vec!["verify", "--method", "proof,coset,normal-form,abelian"];
    args.extend(names.iter().map(String::as_str));
    let o = gtcert(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("status=verified").count(), 3, "{text}");
    let order: Vec<&str> = text.lines().filter(|l| l.starts_with("file=")).collect();
    assert_eq!(order, ["file=c0.gtc", "file=c1.gtc", "file=c2.gtc"]);

    args.push("missing.gtc");
    let o = gtcert(dir.path(), &args);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("file=missing.gtc\nstatus=error\nerror=cannot read"), "{text}");
    // identical input gives identical output
    assert_eq!(stdout(&gtcert(dir.path(), &args)), text);
}

#[test]
fn empty_batch_is_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcert(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 certificates"));
}

#[test]
fn conditional_certificates_and_strict_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcert(dir.path(), &["classify", "--circle-bundle", "base=klein,orientable=true", "--out", "kb.gtc"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certificate=kb.gtc\ncertificate_status=conditionally-verified"));
    assert_eq!(gtcert(dir.path(), &["verify", "kb.gtc"]).status.code(), Some(0));
    assert_eq!(gtcert(dir.path(), &["verify", "--strict", "kb.gtc"]).status.code(), Some(1));
}

#[test]
fn enumerate_fibonacci_seven() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcert(dir.path(), &["enumerate", "fibonacci:m=7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "order=29"));
}

#[test]
fn presentation_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q8.pres"), "# quaternion\ngens: i j\nrel: i^4\nrel: i^2 j^-2\nrel: j^-1 i j i\n").unwrap();
    let o = gtcert(dir.path(), &["enumerate", "q8.pres"]);
    assert!(stdout(&o).contains("order=8"), "{}", stdout(&o));
    let o = gtcert(dir.path(), &["info", "q8.pres"]);
    assert!(stdout(&o).starts_with("label=quaternion\n"), "{}", stdout(&o));
}

#[test]
fn timings_go_to_stderr_only() {
    let dir = tempfile::tempdir().unwrap();
    let plain = gtcert(dir.path(), &["abelianize", "fibonacci:m=6"]);
    let timed = gtcert(dir.path(), &["--timings", "abelianize", "fibonacci:m=6"]);
    assert_eq!(plain.stdout, timed.stdout);
    assert!(String::from_utf8_lossy(&timed.stderr).contains("elapsed"));
}
