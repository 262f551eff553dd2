use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn golden_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "t"))
        .collect();
    files.sort();
    files
}

/// Runs `htv` with `args` in `cwd`, ignoring any `HTV_WINDOW` in the environment.
pub fn htv(args: &[String], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htv"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HTV_WINDOW")
        .output()
        .unwrap()
}

/// The transcript of `$ htv ...` run in a fresh directory.
pub fn transcript(line: &str) -> String {
    let rest = line.strip_prefix("$ htv").expect("line starts with `$ htv`");
    let data = data_dir();
    let args: Vec<String> = shlex::split(rest)
        .expect("valid quoting")
        .into_iter()
        .map(|a| a.replace("$DATA", data.to_str().unwrap()))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let out = htv(&args, dir.path());
    let mut text = format!("{line}\n");
    text.push_str(&String::from_utf8(out.stdout).unwrap());
    text.push_str(&String::from_utf8(out.stderr).unwrap());
    text.push_str(&format!("[exit {}]\n", out.status.code().unwrap_or(-1)));
    text
}

/// Files whose transcript differs from the stored one.
pub fn golden_mismatches(update: bool) -> Vec<String> {
    let mut bad = Vec::new();
    for file in golden_files() {
        let want = fs::read_to_string(&file).unwrap();
        let got = transcript(want.lines().next().unwrap_or_default());
        if update {
            fs::write(&file, &got).unwrap();
        } else if got != want {
            bad.push(format!("{}:\n--- expected\n{want}--- got\n{got}", file.display()));
        }
    }
    bad
}
