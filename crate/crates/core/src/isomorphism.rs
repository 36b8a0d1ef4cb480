//! Dataset isomorphism up to blank-node renaming.
//!
//! Blank nodes are first colored by iterated neighborhood refinement; the
//! search then only tries pairings between blank nodes of equal color and
//! rejects a partial mapping as soon as a fully mapped statement has no
//! counterpart.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::rdf::{BlankNode, Dataset, Iri, Statement, Term};

type Quad = (Option<Iri>, Statement);

fn quads(d: &Dataset) -> Vec<Quad> {
    d.statements().map(|(g, s)| (g.cloned(), s.clone())).collect()
}

fn collect_blanks(term: &Term, out: &mut BTreeSet<String>) {
    match term {
        Term::BlankNode(b) => {
            out.insert(b.label().to_owned());
        }
        Term::Quoted(s) => {
            collect_blanks(s.subject(), out);
            collect_blanks(s.object(), out);
        }
        _ => {}
    }
}

fn blanks_of(stmt: &Statement) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_blanks(stmt.subject(), &mut out);
    collect_blanks(stmt.object(), &mut out);
    out
}

fn rename_term(term: &Term, f: &dyn Fn(&str) -> String) -> Term {
    match term {
        Term::BlankNode(b) => Term::BlankNode(BlankNode::new(f(b.label()))),
        Term::Quoted(s) => Term::Quoted(Box::new(rename(s, f))),
        t => t.clone(),
    }
}

fn rename(stmt: &Statement, f: &dyn Fn(&str) -> String) -> Statement {
    Statement::new(
        rename_term(stmt.subject(), f),
        stmt.predicate().clone(),
        rename_term(stmt.object(), f),
    )
    .expect("renaming keeps statements valid")
}

/// Color per blank node, refined until the partition stops splitting.
fn colors(quads: &[Quad], blanks: &BTreeSet<String>) -> BTreeMap<String, String> {
    let mut color: BTreeMap<String, String> = blanks.iter().map(|b| (b.clone(), String::new())).collect();
    let mut classes = 1;
    for _ in 0..=blanks.len() {
        let mut next = BTreeMap::new();
        for b in blanks {
            let mut sig: Vec<String> = quads
                .iter()
                .filter(|(_, s)| blanks_of(s).contains(b))
                .map(|(g, s)| {
                    let r = rename(s, &|l| if l == b { "self".into() } else { format!("c{}", color[l]) });
                    format!("{g:?} {r}")
                })
                .collect();
            sig.sort();
            next.insert(b.clone(), format!("{:016x}", fnv(&sig.join("\n"))));
        }
        let n = next.values().collect::<HashSet<_>>().len();
        color = next;
        if n == classes {
            break;
        }
        classes = n;
    }
    color
}

fn fnv(text: &str) -> u64 {
    text.bytes().fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// True when `a` and `b` contain the same statements in the same graphs up to
/// a bijective renaming of blank nodes.
pub fn is_isomorphic(a: &Dataset, b: &Dataset) -> bool {
    let qa = quads(a);
    let qb = quads(b);
    if qa.len() != qb.len() {
        return false;
    }
    let set_b: HashSet<&Quad> = qb.iter().collect();
    let blanks_a: BTreeSet<String> = qa.iter().flat_map(|(_, s)| blanks_of(s)).collect();
    let blanks_b: BTreeSet<String> = qb.iter().flat_map(|(_, s)| blanks_of(s)).collect();
    if blanks_a.len() != blanks_b.len() {
        return false;
    }
    if blanks_a.is_empty() {
        return qa.iter().all(|q| set_b.contains(q));
    }
    let ca = colors(&qa, &blanks_a);
    let cb = colors(&qb, &blanks_b);
    let mut hist_a: Vec<&String> = ca.values().collect();
    let mut hist_b: Vec<&String> = cb.values().collect();
    hist_a.sort();
    hist_b.sort();
    if hist_a != hist_b {
        return false;
    }

    // Most constrained blank nodes (rarest color) first.
    let mut freq: HashMap<&String, usize> = HashMap::new();
    for c in ca.values() {
        *freq.entry(c).or_default() += 1;
    }
    let mut order: Vec<&String> = blanks_a.iter().collect();
    order.sort_by_key(|l| (freq[&ca[*l]], (*l).clone()));

    let per_stmt: Vec<BTreeSet<String>> = qa.iter().map(|(_, s)| blanks_of(s)).collect();
    let mut mapping: HashMap<String, String> = HashMap::new();
    let mut used: HashSet<String> = HashSet::new();
    search(0, &order, &ca, &cb, &qa, &per_stmt, &set_b, &mut mapping, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search(
    depth: usize,
    order: &[&String],
    ca: &BTreeMap<String, String>,
    cb: &BTreeMap<String, String>,
    qa: &[Quad],
    per_stmt: &[BTreeSet<String>],
    set_b: &HashSet<&Quad>,
    mapping: &mut HashMap<String, String>,
    used: &mut HashSet<String>,
) -> bool {
    let consistent = |mapping: &HashMap<String, String>| {
        qa.iter().zip(per_stmt).all(|((g, s), bl)| {
            if !bl.iter().all(|l| mapping.contains_key(l)) {
                return true;
            }
            let mapped = (g.clone(), rename(s, &|l| mapping[l].clone()));
            set_b.contains(&mapped)
        })
    };
    if depth == order.len() {
        return consistent(mapping);
    }
    let from = order[depth];
    for (to, color) in cb {
        if color != &ca[from] || used.contains(to) {
            continue;
        }
        mapping.insert(from.clone(), to.clone());
        used.insert(to.clone());
        if consistent(mapping) && search(depth + 1, order, ca, cb, qa, per_stmt, set_b, mapping, used) {
            return true;
        }
        mapping.remove(from);
        used.remove(to);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turtle::parse_turtle_star;

    fn parse(text: &str) -> Dataset {
        parse_turtle_star(text).unwrap()
    }

    #[test]
    fn relabelled_blank_nodes_match() {
        let a = parse("@prefix ex: <http://example.org/> . _:x ex:p _:y . _:y ex:q \"1\" .");
        let b = parse("@prefix ex: <http://example.org/> . _:m ex:q \"1\" . _:n ex:p _:m .");
        assert!(is_isomorphic(&a, &b));
    }

    #[test]
    fn structure_differences_are_detected() {
        let a = parse("@prefix ex: <http://example.org/> . _:x ex:p _:y . _:y ex:p _:x .");
        let b = parse("@prefix ex: <http://example.org/> . _:x ex:p _:x . _:y ex:p _:y .");
        assert!(!is_isomorphic(&a, &b));
        let c = parse("@prefix ex: <http://example.org/> . ex:a ex:p ex:b .");
        let d = parse("@prefix ex: <http://example.org/> . ex:a ex:p ex:c .");
        assert!(!is_isomorphic(&c, &d));
    }

    #[test]
    fn symmetric_cycles_need_search() {
        let a = parse("@prefix ex: <http://example.org/> . _:a ex:p _:b . _:b ex:p _:c . _:c ex:p _:a . _:d ex:p _:e . _:e ex:p _:f . _:f ex:p _:d .");
        let b = parse("@prefix ex: <http://example.org/> . _:1 ex:p _:2 . _:2 ex:p _:3 . _:3 ex:p _:1 . _:4 ex:p _:5 . _:5 ex:p _:6 . _:6 ex:p _:4 .");
        let c = parse("@prefix ex: <http://example.org/> . _:1 ex:p _:2 . _:2 ex:p _:3 . _:3 ex:p _:4 . _:4 ex:p _:5 . _:5 ex:p _:6 . _:6 ex:p _:1 .");
        assert!(is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn blank_nodes_inside_quoted_triples_and_graphs() {
        let a = parse("@prefix ex: <http://example.org/> . ex:g { <<_:x ex:p ex:o>> ex:q _:x . }");
        let b = parse("@prefix ex: <http://example.org/> . ex:g { <<_:z ex:p ex:o>> ex:q _:z . }");
        let c = parse("@prefix ex: <http://example.org/> . ex:h { <<_:z ex:p ex:o>> ex:q _:z . }");
        assert!(is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &c));
    }
}
