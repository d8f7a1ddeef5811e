use std::sync::Arc;

use redform::expr::parse_element;
use redform::field::Field;
use redform::linsys::{ConstMatrix, Matrix};
use redform::sp4::ReducedShape;
use redform::weinorman::{fundamental_shape, solve_abelian, verify_fundamental, Expr, WeiNormanError};

fn combo(f: &Arc<Field>, terms: &[(&str, ConstMatrix)]) -> Matrix {
    terms.iter().fold(Matrix::zeros(f, 4, 4), |acc, (c, m)| {
        acc.try_add(&Matrix::from_const(f, m).scale(&parse_element(c, f).unwrap())).unwrap()
    })
}

#[test]
fn single_nilpotent_direction() {
    let f = Field::rational("t");
    let r = combo(&f, &[("1/(t^2+1)", ConstMatrix::m3())]);
    let u = solve_abelian(&r).unwrap();
    assert_eq!(u.primitives.items().len(), 1);
    assert!(verify_fundamental(&u, &r).unwrap());
    assert!(u.is_symplectic());
    let other = combo(&f, &[("t", ConstMatrix::m3())]);
    assert!(!verify_fundamental(&u, &other).unwrap());
}

#[test]
fn shared_coefficient_splits_into_diagonal_and_nilpotent() {
    // one coefficient on Mm + 2 M3: a single mixed basis matrix
    let f = Field::rational("t");
    let r = combo(&f, &[("1/t", ConstMatrix::mm()), ("2/t", ConstMatrix::m3())]);
    let u = solve_abelian(&r).unwrap();
    // the basis matrix comes out as Mm/2 + M3 with coefficient 2/t
    assert_eq!(u.primitives.describe(), ["E1' = (1/t) E1", "Omega1' = (2/t)"]);
    assert!(verify_fundamental(&u, &r).unwrap());
    assert!(u.is_symplectic());
}

#[test]
fn multiplicative_direction_uses_an_exponential() {
    let f = Field::rational("t");
    let r = combo(&f, &[("1/t", ConstMatrix::mm()), ("t", ConstMatrix::m3())]);
    let u = solve_abelian(&r).unwrap();
    assert!(verify_fundamental(&u, &r).unwrap());
    assert!(u.is_symplectic());
    let strings = u.to_strings();
    assert_eq!(strings[1][1], "E2");
    assert_eq!(strings[3][3], "E2^(-1)");
    assert_eq!(strings[0][0], "(1)");
}

#[test]
fn abelian_two_dimensional() {
    let f = Field::rational("t");
    let r = combo(&f, &[("1/t", ConstMatrix::m1().add(&ConstMatrix::m2())), ("t^3", ConstMatrix::m3())]);
    let u = solve_abelian(&r).unwrap();
    assert!(verify_fundamental(&u, &r).unwrap());
    assert!(u.is_symplectic());
}

#[test]
fn non_abelian_is_rejected() {
    let f = Field::rational("t");
    let r = combo(&f, &[("1", ConstMatrix::m1()), ("t", ConstMatrix::m2())]);
    assert_eq!(solve_abelian(&r).unwrap_err(), WeiNormanError::NonAbelianInput);
}

#[test]
fn table_templates_solve_the_shapes() {
    let f = Field::rational("t");
    let shapes = [
        combo(&f, &[("t", ConstMatrix::m1()), ("1/t", ConstMatrix::m2()), ("t^2", ConstMatrix::m3())]),
        combo(&f, &[("t", ConstMatrix::m1()), ("1/t", ConstMatrix::m2()), ("t^2", ConstMatrix::m3()), ("1/(t-1)", ConstMatrix::ma())]),
        combo(&f, &[("t", ConstMatrix::m1()), ("1/t", ConstMatrix::m2()), ("t^2", ConstMatrix::m3()), ("1/(t+1)", ConstMatrix::mm())]),
    ];
    for b in &shapes {
        let shape = ReducedShape::read(b).unwrap();
        let u = fundamental_shape(&shape);
        assert!(verify_fundamental(&u, b).unwrap(), "{:?}", shape.case);
        assert!(u.is_symplectic());
        assert_eq!(u.inner_block_det(), Expr::one(&f));
    }
    let u = fundamental_shape(&ReducedShape::read(&shapes[0]).unwrap());
    assert_eq!(u.to_strings()[3][2], "(-1)*Omega1");
    let u = fundamental_shape(&ReducedShape::read(&shapes[1]).unwrap());
    assert_eq!(u.to_strings()[0][3], "L*Omega1 + Omega2");
    let u = fundamental_shape(&ReducedShape::read(&shapes[2]).unwrap());
    assert_eq!(u.to_strings()[0][1], "E*Omega1");
    assert_eq!(u.to_strings()[0][3], "E^(-1)*Omega2");
}

#[test]
fn corrupted_template_fails() {
    let f = Field::rational("t");
    let b = combo(&f, &[("t", ConstMatrix::m1()), ("1/t", ConstMatrix::m2())]);
    let mut u = fundamental_shape(&ReducedShape::read(&b).unwrap());
    let (x, y) = (u.get(0, 1).clone(), u.get(0, 3).clone());
    u.set(0, 1, y);
    u.set(0, 3, x);
    assert!(!verify_fundamental(&u, &b).unwrap());
}
