//! The acceptance suite: one test per criterion, each printing its status line.

use sphere_ls_lab::acceptance::{run_criterion, Fault};

fn check(id: u8) {
    let result = run_criterion(id, &[]).unwrap();
    println!("{result}");
    assert!(result.passed, "{result}");
}

#[test]
fn criterion_01_christoffel_darboux() {
    check(1);
}

#[test]
fn criterion_02_kernel_trace() {
    check(2);
}

#[test]
fn criterion_03_quadrature_exactness() {
    check(3);
}

#[test]
fn criterion_04_toeplitz_oracle() {
    check(4);
}

#[test]
fn criterion_05_axisymmetric_oracle() {
    check(5);
}

#[test]
fn criterion_06_full_empty_nested() {
    check(6);
}

#[test]
fn criterion_07_fixed_cap_decays() {
    check(7);
}

#[test]
fn criterion_08_dense_family_stabilizes() {
    check(8);
}

#[test]
fn criterion_09_uncertainty_principle() {
    check(9);
}

#[test]
fn criterion_10_szego_estimate() {
    check(10);
}

#[test]
fn criterion_11_sup_norm() {
    check(11);
}

#[test]
fn criterion_12_regularization() {
    check(12);
}

#[test]
fn criterion_13_determinism() {
    check(13);
}

#[test]
fn doubled_kernel_normalization_fails_christoffel_darboux() {
    let result = run_criterion(1, &[Fault::KernelNormalization]).unwrap();
    println!("{result}");
    assert!(!result.passed);
}

#[test]
fn halved_quadrature_fails_exactness_and_names_the_entry() {
    let result = run_criterion(3, &[Fault::HalvedQuadrature]).unwrap();
    println!("{result}");
    assert!(!result.passed);
    assert!(result.measured.contains("(i,j)=("), "{}", result.measured);
}

#[test]
fn faults_leave_other_criteria_alone() {
    let result = run_criterion(10, &[Fault::KernelNormalization, Fault::HalvedQuadrature]).unwrap();
    assert!(result.passed, "{result}");
}

#[test]
fn unknown_criterion_is_an_error() {
    assert!(run_criterion(14, &[]).is_err());
}
