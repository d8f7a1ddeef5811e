use std::sync::Arc;

use redform::expr::parse_element;
use redform::field::{Field, FieldElement, Poly};
use redform::linsys::{is_hamiltonian, is_symplectic, Matrix};
use redform::nve::normalize_variational;

fn hill_field(h: i64) -> Arc<Field> {
    let d = Poly::from_ints(&[2 * h, 0, -1, 0, 0, 0, 4]);
    let f = Field::with_extension("t", &d).unwrap();
    let w = FieldElement::sqrt_d(&f).unwrap();
    f.with_weight(&w).unwrap()
}

fn hill_a(f: &Arc<Field>) -> Matrix {
    Matrix::parse(
        f,
        &[
            vec!["0", "-4*t^2", "0", "-i"],
            vec!["0", "0", "-i", "0"],
            vec!["0", "-i*(1-60*t^4)", "0", "0"],
            vec!["-i*(1-60*t^4)", "-8*i*t*sqrtD", "4*t^2", "0"],
        ],
    )
    .unwrap()
}

#[test]
fn hill_normal_variational_equation_matches_display() {
    for h in [1, 0] {
        let f = hill_field(h);
        let a = hill_a(&f);
        assert!(is_hamiltonian(&a).unwrap());
        let z: Vec<FieldElement> =
            ["sqrtD", "0", "0", "i*(12*t^5-t)"].iter().map(|s| parse_element(s, &f).unwrap()).collect();
        let ns = normalize_variational(&a, &z).unwrap();
        assert!(is_symplectic(&ns.p).unwrap());
        let fpp = "(12*t^5-t)";
        let big_f = format!("8*i*t*(8*t^6-2*{h})/sqrtD");
        let expected = Matrix::parse(
            &f,
            &[
                vec!["0", "-4*t^2/sqrtD", "0", "-i/sqrtD"],
                vec!["0", &format!("{fpp}/sqrtD"), "-i/sqrtD", "0"],
                vec!["0", "0", "0", "0"],
                vec!["0", &big_f, "4*t^2/sqrtD", &format!("-{fpp}/sqrtD")],
            ],
        )
        .unwrap();
        assert_eq!(ns.a_n, expected, "h = {h}");
    }
}
