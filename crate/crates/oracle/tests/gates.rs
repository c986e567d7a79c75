use num_complex::Complex64;
use stabsim::gates::Gate;
use stabsim::pauli::Pauli;
use stabsim::tableau::{Generator, Tableau};
use stabsim_oracle::*;

fn unitary_gates() -> impl Iterator<Item = Gate> {
    Gate::all().filter(|g| g.is_unitary())
}

/// Every single-entry corruption of a tableau: each sign, and each Pauli
/// term replaced by each of the other three.
fn corruptions(t: &Tableau) -> Vec<Tableau> {
    let n = t.num_qubits();
    let mut out = Vec::new();
    for g in [Generator::X, Generator::Z] {
        for col in 0..n {
            let mut c = t.clone();
            c.set_sign(g, col, !t.sign(g, col));
            out.push(c);
            for q in 0..n {
                let image = t.image(g, col);
                for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                    if p == image.get(q) {
                        continue;
                    }
                    let mut changed = image.clone();
                    changed.set(q, p);
                    let mut c = t.clone();
                    c.set_image(g, col, &changed);
                    out.push(c);
                }
            }
        }
    }
    out
}

#[test]
fn every_registry_gate_agrees_with_its_matrix() {
    for g in unitary_gates() {
        assert!(duality_check(g).unwrap(), "{g}");
    }
}

#[test]
fn every_corruption_is_caught() {
    for g in unitary_gates() {
        let u = g.unitary_matrix().unwrap();
        let t = g.tableau().unwrap();
        let all = corruptions(t);
        let expected = 2 * t.num_qubits() * (1 + 3 * t.num_qubits());
        assert_eq!(all.len(), expected);
        for c in all {
            assert!(!duality_check_tableau(&c, &u).unwrap(), "{g} accepted corrupted\n{c}");
        }
    }
}

#[test]
fn cy_tableau_and_sign_flip() {
    let t = Tableau::from_columns(&["+XY", "+ZX"], &["+Z_", "+ZZ"]).unwrap();
    let u = Gate::Cy.unitary_matrix().unwrap();
    assert!(duality_check_tableau(&t, &u).unwrap());
    let bad = Tableau::from_columns(&["-XY", "+ZX"], &["+Z_", "+ZZ"]).unwrap();
    assert!(!duality_check_tableau(&bad, &u).unwrap());
}

#[test]
fn h_yz_tableau_matches_matrix() {
    let t = Tableau::from_columns(&["-X"], &["+Y"]).unwrap();
    assert!(duality_check_tableau(&t, &h_yz()).unwrap());
    let wrong = Tableau::from_columns(&["+X"], &["+Y"]).unwrap();
    assert!(!duality_check_tableau(&wrong, &h_yz()).unwrap());
}

#[test]
fn sqrt_y_identities() {
    assert!(identity_check_sqrt_y());
    let a = Gate::SqrtY.unitary_matrix().unwrap();
    let b = Gate::SqrtYDag.unitary_matrix().unwrap();
    assert!(!identity_check_sqrt_y_with(&b, &a));
    let y = pauli_matrix(Pauli::Y);
    assert!(equal_up_to_phase(&mat_mul(&a, &a, 2), &y));
    let half = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
    let printed = [half(1.0, -1.0), half(1.0, -1.0), half(-1.0, 1.0), half(1.0, -1.0)];
    assert!(equal_up_to_phase(&mat_mul(&printed, &printed, 2), &y));
    assert!(approx_equal(&printed, &b));
}

#[test]
fn registry_matrices_are_unitary() {
    for g in unitary_gates() {
        let u = g.unitary_matrix().unwrap();
        let d = 1 << g.arity();
        let id: Vec<Complex64> = (0..d * d)
            .map(|i| if i % (d + 1) == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        assert!(approx_equal(&mat_mul(&u, &dagger(&u, d), d), &id), "{g}");
    }
}
