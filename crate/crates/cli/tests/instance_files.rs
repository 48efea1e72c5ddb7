use dkoszul::instance::{ErrorKind, ModuleSpec};
use dkoszul::{parse_instance, InstanceFile};
use dkoszul_core::builtins::builtins;
use dkoszul_core::scalar::FieldDescriptor;

const QUANTUM: &str = "\
# comment line
convention: application-order
field: rational
vertices: o
arrow x: o -> o
arrow y: o \u{2192} o   # unicode arrow
relation: [x, y] - 1/2 [y, x]
module k = trivial
module w = syzygy k 2
module w1 = shift w -1
";

#[test]
fn parses_and_round_trips() {
    let f = parse_instance(QUANTUM).unwrap();
    assert_eq!(f.field, FieldDescriptor::Rational);
    assert_eq!(f.vertices, vec!["o"]);
    assert_eq!(f.arrows.len(), 2);
    assert_eq!(f.relations[0].len(), 2);
    assert_eq!(f.relations[0][1].0.to_string(), "-1/2");
    assert_eq!(f.module("w1").unwrap().spec, ModuleSpec::Shift("w".into(), -1));
    let again = parse_instance(&f.serialize()).unwrap();
    assert_eq!(again, f);
    assert_eq!(again.serialize(), f.serialize());
}

#[test]
fn builtins_round_trip() {
    for b in builtins() {
        let f = InstanceFile::from_builtin(&b);
        let text = f.serialize();
        assert_eq!(parse_instance(&text).unwrap(), f, "{}", b.name);
    }
}

#[test]
fn names_are_nfc_normalized() {
    // "é" written decomposed in the declaration and composed in the use
    let text = "convention: application-order\nvertices: e\u{301} b\narrow a: \u{e9} -> b\n";
    let f = parse_instance(text).unwrap();
    assert_eq!(f.arrows[0].source, "\u{e9}");
}

fn errors(text: &str) -> Vec<(usize, ErrorKind, String)> {
    parse_instance(text)
        .unwrap_err()
        .into_iter()
        .map(|e| (e.line, e.kind, e.message))
        .collect()
}

#[test]
fn convention_comes_first() {
    let e = errors("vertices: a\n");
    assert_eq!(e[0].0, 1);
    assert_eq!(e[0].1, ErrorKind::Syntax);
    assert!(parse_instance("").is_err());
}

#[test]
fn semantic_errors_carry_positions() {
    let text = "\
convention: application-order
vertices: a b
arrow x: a -> b
arrow x: b -> a
arrow y: a -> c
relation: [x, x]
relation: [x]
relation: [x, z] + [x, x]
module M = simple q
module N = shift P 1
";
    let e = errors(text);
    let lines: Vec<usize> = e.iter().map(|x| x.0).collect();
    assert_eq!(lines, vec![4, 5, 6, 7, 8, 9, 10]);
    assert!(e.iter().all(|x| x.1 == ErrorKind::Semantic));
    assert!(e[0].2.contains("duplicate"), "{:?}", e[0]);
    assert!(e[1].2.contains("unknown vertex 'c'"));
    let mut sorted = e.clone();
    sorted.sort_by_key(|x| x.0);
    assert_eq!(sorted, e);
}

#[test]
fn syntax_errors() {
    for bad in [
        "convention: application-order\nvertices a b\n",
        "convention: application-order\nvertices: a\narrow x a -> a\n",
        "convention: application-order\nvertices: a\narrow x: a -> a\nrelation: [x, x\n",
        "convention: application-order\nfield: prime:12\n",
        "convention: composition-order\n",
    ] {
        let e = parse_instance(bad).unwrap_err();
        assert!(!e.is_empty(), "{bad}");
        let rendered = e[0].to_string();
        assert!(rendered.contains(" error: "), "{rendered}");
    }
}

#[test]
fn relations_must_be_homogeneous_and_parallel() {
    let base = "convention: application-order\nvertices: a b\narrow x: a -> a\narrow y: a -> b\n";
    let e = errors(&format!("{base}relation: [x, x] + [x, x, x]\n"));
    assert!(e[0].2.contains("homogeneous") || e[0].2.contains("length"), "{e:?}");
    let e = errors(&format!("{base}relation: [x, x] + [x, y]\n"));
    assert!(e[0].2.contains("parallel"), "{e:?}");
    let e = errors(&format!("{base}relation: [x, x] - [x, x]\n"));
    assert!(!e.is_empty());
}
