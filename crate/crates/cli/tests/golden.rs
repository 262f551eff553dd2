//! Transcript tests: each `tests/golden/*.t` file holds one command line
//! (`$ htv ...`), its exact output and the exit status. Set `UPDATE_GOLDEN=1`
//! to rewrite the files from the current binary.

mod common;

#[test]
fn transcripts() {
    let n = common::golden_files().len();
    assert!(n >= 30, "only {n} transcripts");
    let bad = common::golden_mismatches(std::env::var_os("UPDATE_GOLDEN").is_some());
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
