mod common;

use common::data_file;
use latsample_core::topology::synthetic::{metro, MetroParams};
use latsample_core::{all_pairs, build_path_model, load_topology, route, Error, Role};

#[test]
fn two_path_file_has_the_calibrated_paths() {
    let t = load_topology(data_file("two-path.toml")).unwrap();
    let p1 = route(&t, "src", "dst1").unwrap();
    let p2 = route(&t, "src", "dst2").unwrap();
    assert!((t.path_length_km(&p1) - 8.8).abs() < 1e-9);
    assert!((t.path_length_km(&p2) - 13.6).abs() < 1e-9);
    let blue = build_path_model(&t, &p1).unwrap();
    let green = build_path_model(&t, &p2).unwrap();
    assert!((blue.mean_us() - 63.0).abs() < 1e-9);
    assert!((green.mean_us() - 73.0).abs() < 1e-9);
    assert!((blue.propagation_us() - 5.0 * t.path_length_km(&p1)).abs() < 1e-12);
    assert_eq!(all_pairs(&t).len(), 2);
}

#[test]
fn shipped_metro_matches_its_generator() {
    let path = data_file("metro-synthetic.toml");
    let shipped = std::fs::read_to_string(&path).unwrap();
    assert_eq!(shipped, metro(&MetroParams::default()).to_toml());
    let t = load_topology(&path).unwrap();
    assert_eq!(t.ids_with_role(Role::Aco).len(), 35);
    assert_eq!(t.ids_with_role(Role::Maco).len(), 17);
    assert_eq!(all_pairs(&t).len(), 595);
}

#[test]
fn loading_is_a_pure_function_of_bytes() {
    let path = data_file("metro-synthetic.toml");
    assert_eq!(load_topology(&path).unwrap(), load_topology(&path).unwrap());
    let t = load_topology(&path).unwrap();
    let dir = std::env::temp_dir().join(format!("latsample-topo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let copy = dir.join("copy.toml");
    std::fs::write(&copy, t.to_toml()).unwrap();
    assert_eq!(load_topology(&copy).unwrap(), t);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load_topology("/nonexistent/topology.toml"),
        Err(Error::Io { .. })
    ));
}

#[test]
fn every_metro_pair_routes() {
    let t = load_topology(data_file("metro-synthetic.toml")).unwrap();
    for (a, m) in all_pairs(&t) {
        let p = route(&t, &a, &m).unwrap();
        t.validate_path(&p).unwrap();
        assert_eq!(route(&t, &m, &a).unwrap(), p.reversed());
    }
}
