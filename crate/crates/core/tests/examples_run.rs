//! Every example runs and prints its headline numbers.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!($path);
        }
    };
}

example!(mate, "../examples/mate.rs");
example!(kernel_gram, "../examples/kernel_gram.rs");
example!(verify, "../examples/verify.rs");
example!(extension_model, "../examples/extension_model.rs");
example!(brownian_shift, "../examples/brownian_shift.rs");
example!(invariant_subspaces, "../examples/invariant_subspaces.rs");

#[test]
fn mate_example() {
    let out = mate::run_example().unwrap();
    assert!(out.contains("a(0) = 0.500000"));
    assert!(out.contains("a(0) = 0.866025"));
}

#[test]
fn kernel_gram_example() {
    let out = kernel_gram::run_example().unwrap();
    assert!(out.contains("0.875000+0.000000i"));
    assert!(out.contains("‖1‖² = 2.000000"));
    assert!(out.contains("   2.000   6.000  10.000  14.000"));
}

#[test]
fn verify_example() {
    let out = verify::run_example().unwrap();
    assert!(out.contains("b = 0: strict order Some(1)"));
    assert!(out.contains("b = (1+z)/2: strict order Some(2)"));
}

#[test]
fn extension_model_example() {
    let out = extension_model::run_example().unwrap();
    assert!(out.contains("step 1: s = 0.500000"));
    assert!(out.contains("strict order Some(6)"));
    assert!(out.contains("multiplicity 3"));
}

#[test]
fn brownian_shift_example() {
    let out = brownian_shift::run_example().unwrap();
    assert!(out.contains("σ = 1: ‖b‖² = 1.000000"));
    assert_eq!(out.matches("order Some(2)").count(), 3);
}

#[test]
fn invariant_subspaces_example() {
    let out = invariant_subspaces::run_example().unwrap();
    assert!(out.contains("f = 1: Full"));
    assert!(out.contains("f = z - 1: Classified"));
    assert!(out.contains("f = z + 3: Full"));
}
