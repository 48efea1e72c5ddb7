use std::fs;
use std::sync::Arc;

use dkoszul::cache::{cache_key, Cache};
use dkoszul_core::algebra::GradedAlgebra;
use dkoszul_core::builtins::builtin;
use dkoszul_core::gmod::GradedModule;
use dkoszul_core::resolve::{minimal_resolution_to, ResolutionProvider};
use dkoszul_core::scalar::PrimeField;

fn simple() -> Arc<GradedModule<PrimeField>> {
    let p = builtin("loop-chain").unwrap().presentation(PrimeField::default()).unwrap();
    let a = Arc::new(GradedAlgebra::from_presentation(&p, 14));
    Arc::new(GradedModule::simple(a, 0).unwrap())
}

fn bytes(r: &dkoszul_core::resolve::Resolution<PrimeField>) -> Vec<u8> {
    let mut out = Vec::new();
    r.encode(&mut out);
    out
}

#[test]
fn disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = simple();
    let fresh = minimal_resolution_to(&m, 5, 10).unwrap();
    let first = Cache::new(Some(dir.path().to_path_buf()), false);
    let a = first.resolve(&m, 5, 10).unwrap();
    assert_eq!(first.stats().misses, 1);
    assert_eq!(bytes(&a), bytes(&fresh));
    let path = dir.path().join(format!("{}.json", cache_key(&m, 5, 10)));
    assert!(path.exists());

    let second = Cache::new(Some(dir.path().to_path_buf()), false);
    let b = second.resolve(&m, 5, 10).unwrap();
    assert_eq!(second.stats().hits, 1);
    assert_eq!(second.stats().misses, 0);
    assert_eq!(bytes(&b), bytes(&fresh));
}

#[test]
fn keys_separate_bounds() {
    let m = simple();
    assert_ne!(cache_key(&m, 5, 10), cache_key(&m, 4, 10));
    assert_ne!(cache_key(&m, 5, 10), cache_key(&m, 5, 11));
    assert_ne!(cache_key(&m, 5, 10), cache_key(&Arc::new(m.shift(1)), 5, 10));
}

#[test]
fn verification_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let m = simple();
    Cache::new(Some(dir.path().to_path_buf()), false).resolve(&m, 4, 10).unwrap();
    let path = dir.path().join(format!("{}.json", cache_key(&m, 4, 10)));
    let mut stored: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    // change one differential coefficient
    let levels = stored["levels"].as_array_mut().unwrap();
    let entry = levels
        .iter_mut()
        .skip(1)
        .flat_map(|l| l["images"].as_array_mut().unwrap().iter_mut())
        .find(|img| !img.as_array().unwrap().is_empty())
        .unwrap();
    entry[0][1] = serde_json::json!("2");
    fs::write(&path, serde_json::to_string(&stored).unwrap()).unwrap();

    let trusting = Cache::new(Some(dir.path().to_path_buf()), false);
    let bad = trusting.resolve(&m, 4, 10).unwrap();
    let fresh = minimal_resolution_to(&m, 4, 10).unwrap();
    assert_ne!(bytes(&bad), bytes(&fresh));

    let checking = Cache::new(Some(dir.path().to_path_buf()), true);
    let good = checking.resolve(&m, 4, 10).unwrap();
    assert_eq!(checking.stats().mismatches, 1);
    assert_eq!(bytes(&good), bytes(&fresh));
    // the entry was rewritten
    let again = Cache::new(Some(dir.path().to_path_buf()), true);
    again.resolve(&m, 4, 10).unwrap();
    assert_eq!(again.stats().mismatches, 0);
    assert_eq!(again.stats().hits, 1);
}

#[test]
fn garbage_entries_are_misses() {
    let dir = tempfile::tempdir().unwrap();
    let m = simple();
    let path = dir.path().join(format!("{}.json", cache_key(&m, 3, 10)));
    fs::write(&path, "{ not json").unwrap();
    let c = Cache::new(Some(dir.path().to_path_buf()), false);
    let r = c.resolve(&m, 3, 10).unwrap();
    assert_eq!(c.stats().misses, 1);
    assert_eq!(bytes(&r), bytes(&minimal_resolution_to(&m, 3, 10).unwrap()));
}

#[test]
fn shared_between_threads() {
    let dir = tempfile::tempdir().unwrap();
    let m = simple();
    let c = Cache::new(Some(dir.path().to_path_buf()), false);
    let encoded: Vec<Vec<u8>> = std::thread::scope(|s| {
        let hs: Vec<_> = (0..4).map(|_| s.spawn(|| bytes(&c.resolve(&m, 5, 10).unwrap()))).collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(encoded.windows(2).all(|w| w[0] == w[1]));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}
