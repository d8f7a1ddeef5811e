use std::sync::Arc;

use redform::diffop::{rational_solutions, DiffOp, SolveOptions};
use redform::expr::parse_element;
use redform::field::{Field, FieldElement, Poly};
use redform::kovacic2::{classify_and_reduce, system_to_scalar, NveCase, NveClassification};
use redform::linsys::{gauge, Matrix};

fn m(f: &Arc<Field>, rows: &[[&str; 2]]) -> Matrix {
    Matrix::parse(f, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn classify(n: &Matrix) -> NveClassification {
    let c = classify_and_reduce(n, SolveOptions::default()).unwrap();
    assert!(c.p.det().unwrap().is_one(), "det P = 1");
    assert_eq!(gauge(&c.p, n).unwrap(), c.reduced);
    c
}

fn is_upper(m: &Matrix) -> bool {
    m.get(1, 0).is_zero()
}

#[test]
fn additive_example() {
    let f = Field::rational("t");
    let n = m(&f, &[["0", "1/t"], ["0", "0"]]);
    let c = classify(&n);
    assert_eq!(c.case, NveCase::Additive);
    assert_eq!(c.p, Matrix::identity(&f, 2));
    assert!(is_upper(&c.reduced) && c.reduced.get(0, 0).is_zero());
}

#[test]
fn diagonal_is_multiplicative() {
    let f = Field::rational("t");
    let n = m(&f, &[["1", "0"], ["0", "-1"]]);
    let c = classify(&n);
    assert_eq!(c.case, NveCase::Multiplicative);
    assert_eq!(c.p, Matrix::identity(&f, 2));
    assert_eq!(c.reduced, n);
}

#[test]
fn conjugated_diagonal_is_found() {
    let f = Field::rational("t");
    let d = m(&f, &[["1/(3*t)", "0"], ["0", "-1/(3*t)"]]);
    let q = m(&f, &[["1", "1"], ["1", "2"]]);
    let n = gauge(&q, &d).unwrap();
    assert!(!n.get(0, 1).is_zero() && !n.get(1, 0).is_zero());
    let c = classify(&n);
    assert_eq!(c.case, NveCase::Multiplicative);
    assert!(c.reduced.get(0, 1).is_zero() && c.reduced.get(1, 0).is_zero());
}

#[test]
fn triangular_without_risch_solution_is_borel() {
    let f = Field::rational("t");
    let n = m(&f, &[["1/(2*t)", "1"], ["0", "-1/(2*t)"]]);
    assert_eq!(classify(&n).case, NveCase::Borel);
}

#[test]
fn airy_is_unknown() {
    let f = Field::rational("t");
    let n = m(&f, &[["0", "1"], ["t", "0"]]);
    assert_eq!(classify(&n).case, NveCase::FullOrUnknown);
}

#[test]
fn companion_and_diagonal_scalar_forms() {
    let f = Field::rational("t");
    let s = system_to_scalar(&m(&f, &[["0", "1"], ["t^2+1", "0"]])).unwrap();
    let expected = DiffOp::new(&f, vec![parse_element("-(t^2+1)", &f).unwrap(), FieldElement::zero(&f), FieldElement::one(&f)]);
    assert_eq!(s.operator, expected);
    // diag(a, -a) with a = 1/t: the operator D^2 - (a'/a) D - a^2 is reached
    let s = system_to_scalar(&m(&f, &[["1/t", "0"], ["0", "-1/t"]])).unwrap();
    let expected = DiffOp::new(
        &f,
        vec![parse_element("-1/t^2", &f).unwrap(), parse_element("1/t", &f).unwrap(), FieldElement::one(&f)],
    );
    assert_eq!(s.operator, expected);
}

#[test]
fn hill_nve_is_finite() {
    for h in [1i64, 0] {
        let d = Poly::from_ints(&[2 * h, 0, -1, 0, 0, 0, 4]);
        let base = Field::with_extension("t", &d).unwrap();
        let f = base.with_weight(&FieldElement::sqrt_d(&base).unwrap()).unwrap();
        let big_f = format!("8*i*t*(8*t^6-2*{h})/sqrtD");
        let n = m(&f, &[["(12*t^5-t)/sqrtD", "0"], [&big_f, "-(12*t^5-t)/sqrtD"]]);
        let s = system_to_scalar(&n).unwrap();
        assert_eq!(rational_solutions(&s.operator, SolveOptions::default()).unwrap().dimension(), 2);
        let c = classify(&n);
        assert_eq!(c.case, NveCase::Finite);
        assert!(c.reduced.is_zero());
        // the displayed fundamental matrix is also a solution matrix
        let u_n = m(&f, &[["sqrtD", "0"], [&format!("8*i*(t^8-{h}*t^2)/sqrtD"), "1/sqrtD"]]);
        assert!(gauge(&u_n, &n).unwrap().is_zero());
    }
}
