//! Full-pipeline certification at production settings (the defaults the
//! command-line harness uses).

use emfow::{certify, ProblemSpec, Variant, Verdict};

#[test]
fn laplace_desk_case_certifies_with_defaults() {
    let spec = ProblemSpec::new(Variant::Laplace, 3, 2.0, 0.5, 1.0).unwrap();
    let cert = certify(&spec).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(cert.solver_gap <= 1e-8, "solver gap {}", cert.solver_gap);
    assert!(cert.bound_margins.is_empty());
    assert!(cert.harmonic_gap.unwrap() <= 1e-9);
}

#[test]
fn absorption_desk_case_certifies_with_defaults() {
    let spec = ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 1.0).unwrap();
    let cert = certify(&spec).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified, "caveats: {:?}", cert.caveats);
    assert_eq!(cert.bound_margins.len(), 4);
    for (label, margin) in &cert.bound_margins {
        assert!(*margin >= -1e-7, "{}: {}", label, margin);
    }
    assert!(cert.positivity_margin >= -1e-8 * spec.k);
    assert!(cert.relative_residual <= 1e-8);
    assert!(!cert.shoot_flags.exceeded_k);
}

#[test]
fn source_desk_case_certifies_with_defaults() {
    let spec = ProblemSpec::new(Variant::Source, 3, 2.0, 0.5, 0.5).unwrap();
    let cert = certify(&spec).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified, "caveats: {:?}", cert.caveats);
    assert!(cert.bound_margins["Eq23"] >= -1e-7 * spec.k.max(1.0));
    assert!(cert.bound_margins["Eq25"] >= -1e-7 * spec.k.max(1.0));
}

#[test]
fn invalid_exponent_is_rejected_before_any_solve() {
    // (n+2)/(n-2) = 5 for n = 3, so 5.1 is outside the admissible window
    let bad = ProblemSpec {
        variant: Variant::Absorption,
        n: 3,
        q: 5.1,
        d: 0.5,
        k: 1.0,
    };
    assert!(matches!(
        certify(&bad),
        Err(emfow::Error::ExponentOutOfRange { .. })
    ));
}
