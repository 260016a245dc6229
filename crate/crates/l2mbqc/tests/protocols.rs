use l2mbqc::boolean::{bits_to_index, parse_bits, BooleanFunction};
use l2mbqc::mbqc::{compile_pfd_to_ghz, mod3_protocol, or_protocol, MeasurementSchedule};
use l2mbqc::pfd::solve_pfd;
use l2mbqc::sim::{run_shot, verify_protocol, EngineKind};

#[test]
fn mod3_n4_is_deterministic() {
    let s = mod3_protocol(4).unwrap();
    let f = BooleanFunction::mod_p(3, 0, 4).unwrap();
    let r = verify_protocol(&s, &f, 100, 1, EngineKind::Auto).unwrap();
    assert_eq!(r.inputs.len(), 16);
    assert_eq!(r.empirical_rate, 1.0);
    assert!(r.passed(1e-9));
    assert_eq!(r.resources.tuple(), (21, 6, 5, 3));
    let x = bits_to_index(&parse_bits("1110").unwrap());
    assert!((0..50).all(|seed| !run_shot(&s, x, seed, EngineKind::Mps).unwrap().y));
}

#[test]
fn or4_always_outputs_or() {
    let s = or_protocol(4).unwrap();
    assert_eq!(s.len(), 45);
    let r = verify_protocol(&s, &BooleanFunction::or(4).unwrap(), 200, 2, EngineKind::Mps).unwrap();
    assert_eq!(r.empirical_rate, 1.0);
    assert!(r.min_analytic.is_none());
}

#[test]
fn and2_ghz_is_exact() {
    let f = BooleanFunction::and(2).unwrap();
    let g = compile_pfd_to_ghz(&solve_pfd(&f, None).unwrap(), false).unwrap();
    let r = verify_protocol(&g, &f, 10, 3, EngineKind::Dense).unwrap();
    for i in &r.inputs {
        assert!((i.analytic.unwrap() - 1.0).abs() < 1e-12);
        assert!((i.exact.unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(!g.is_adaptive());
}

#[test]
fn schedules_survive_json() {
    let s = mod3_protocol(3).unwrap();
    let back = MeasurementSchedule::from_json_str(&s.to_json_string()).unwrap();
    assert_eq!(back.resources(), s.resources());
    let f = BooleanFunction::mod_p(3, 0, 3).unwrap();
    let a = verify_protocol(&s, &f, 20, 9, EngineKind::Mps).unwrap();
    let b = verify_protocol(&back, &f, 20, 9, EngineKind::Mps).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}
