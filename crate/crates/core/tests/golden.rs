use rdfstar2pg::conformance::{builtin_corpus, expected_shape_table, Basis};
use rdfstar2pg::transform::Approach;
use sha2::{Digest, Sha256};

const TABLE: &str = include_str!("../data/expected_shapes.json");
const CHANGELOG: &str = include_str!("../data/expected_shapes.changelog.md");

#[test]
fn changelog_records_current_digest() {
    let digest: String = Sha256::digest(TABLE.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let last = CHANGELOG
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("sha256: "))
        .expect("changelog lists a digest");
    assert_eq!(last.trim(), digest, "expected_shapes.json changed without a changelog entry");
}

#[test]
fn table_covers_every_case_and_approach() {
    let table = expected_shape_table();
    assert_eq!(table.len(), builtin_corpus().len() * Approach::ALL.len());
    for case in builtin_corpus() {
        for a in Approach::ALL {
            assert!(table.contains_key(&(case.id.to_owned(), a)), "missing {} {a}", case.id);
        }
    }
}

#[test]
fn figure_rows_are_pinned() {
    let table = expected_shape_table();
    let figure: Vec<(&str, Approach)> = table
        .iter()
        .filter(|(_, row)| row.basis == Basis::Figure)
        .map(|((c, a), _)| (c.as_str(), *a))
        .collect();
    for key in [("1", Approach::Rpt), ("3.1", Approach::Rpt), ("3.1", Approach::Pgt), ("9", Approach::Rpt), ("9", Approach::Pgt)] {
        assert!(figure.contains(&key), "{key:?} not marked as figure-backed");
    }
}
