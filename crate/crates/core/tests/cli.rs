//! The `zzup` front end: output shapes and exit codes.

use std::path::PathBuf;

use zigzag_update::cli::run;

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Dir {
        let p = std::env::temp_dir().join(format!("zzup-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn zzup(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("zzup").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const TRI: &str = "i 0\ni 1\ni 0 1\nd 0 1\nd 1\nd 0\n";

#[test]
fn barcode_of_tri() {
    let d = Dir::new("tri");
    let (code, out, _) = zzup(&["barcode", &d.file("f.txt", TRI)]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 1 5\n0 2 2\n0 4 4\n");
}

#[test]
fn empty_filtration_has_empty_barcode() {
    let d = Dir::new("empty");
    let (code, out, _) = zzup(&["barcode", &d.file("f.txt", "# nothing\n")]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn malformed_line_is_reported() {
    let d = Dir::new("bad");
    let (code, _, err) = zzup(&["barcode", &d.file("f.txt", "i 0\nq 1\n")]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, _) = zzup(&["barcode", "/nonexistent/zzup/file"]);
    assert_eq!(code, 2);
}

#[test]
fn update_with_both_engines() {
    let d = Dir::new("update");
    let f = d.file("f.txt", TRI);
    let s = d.file("s.txt", "ic 2\nie 2 0 1\nfs 0\n");
    let (code, out, err) = zzup(&["update", &f, &s, "--engine", "both", "--check"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("op 0 ic 2\n  moved 0 0 1 5 -> 0 1 3\n  died 2 0 4 4\n"), "{out}");
    assert!(out.ends_with("barcode\n0 1 5\n0 2 2\n0 4 4\n"), "{out}");
}

#[test]
fn outward_ops_are_refused_by_fzz() {
    let d = Dir::new("fzz");
    let f = d.file("f.txt", TRI);
    let s = d.file("s.txt", "oe 1 0\n");
    assert_eq!(zzup(&["update", &f, &s, "--engine", "fzz"]).0, 3);
    assert_eq!(zzup(&["update", &f, &s]).0, 0);
    let illegal = d.file("t.txt", "fs 1\n");
    assert_eq!(zzup(&["update", &f, &illegal]).0, 2);
}

#[test]
fn vineyard_of_one_point() {
    let d = Dir::new("one");
    let csv = d.file("p.csv", "t,id,x,y\n0,0,0,0\n1,0,1,0\n");
    let (code, out, err) = zzup(&["vineyard", &csv, "--check-every", "1"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "band 0 delta_hi inf delta_lo 0\n0 1 1 0\n");
}

#[test]
fn vineyard_of_three_points() {
    let d = Dir::new("three");
    let csv = d.file("p.csv", "t,id,x,y\n0,0,0,0\n0,1,1,0\n0,2,3,0\n1,0,0,0\n1,1,2,0\n1,2,3,0\n");
    let (code, out, err) = zzup(&["vineyard", &csv, "--check-every", "1"]);
    assert_eq!(code, 0, "{err}");
    let bands = out.lines().filter(|l| l.starts_with("band ")).count();
    assert!(bands >= 3, "{out}");
    // At the top band everything is one component for the whole span.
    assert!(out.starts_with("band 0 delta_hi inf"), "{out}");
}

#[test]
fn bench_columns() {
    let d = Dir::new("bench");
    let csv = d.file("p.csv", "");
    let (code, out, _) = zzup(&["bench", "--points-csv", &csv, "--no-times"]);
    assert_eq!(code, 0);
    assert_eq!(out, "fw_sw bw_sw ow_sw iw_sw iw_con ow_con iw_exp ow_exp MLen\n0 0 0 0 0 0 0 0 0\n");
    let (code, out, _) = zzup(&["bench", "--points", "4", "--samples", "4", "--no-times"]);
    assert_eq!(code, 0);
    let again = zzup(&["bench", "--points", "4", "--samples", "4", "--no-times"]).1;
    assert_eq!(out, again);
    let (code, out, _) = zzup(&["bench", "--points", "3", "--samples", "3"]);
    assert_eq!(code, 0);
    assert!(out.lines().next().unwrap().ends_with("MLen T_update T_from_scratch"));
}
