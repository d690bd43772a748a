use gsp6_core::rhs::verify_main_identity;
use gsp6_core::symbols::Setting;

#[test]
fn main_identity_all_configurations() {
    for (p, d) in [(3, 5), (5, 2), (3, 13), (5, 11)] {
        let st = Setting::new(p, d, 16).unwrap();
        let t = std::time::Instant::now();
        let r = verify_main_identity(&st, 4).unwrap();
        eprintln!("p={p} D={d}: {} in {:?}", r.status, t.elapsed());
        assert!(r.passed(), "{}", serde_json::to_string_pretty(&r.comparisons).unwrap());
    }
}

#[test]
fn rmax_zero_is_trivial() {
    let st = Setting::new(3, 5, 8).unwrap();
    let r = verify_main_identity(&st, 0).unwrap();
    assert!(r.passed());
    assert_eq!(r.coefficients.len(), 1);
    assert_eq!(r.coefficients[0].terms.len(), 1);
    assert_eq!(r.coefficients[0].terms[0].rational, "1");
}
