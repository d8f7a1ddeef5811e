use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use redform::field::{Field, FieldElement, Poly, RatFunc};
use redform::linsys::{gauge, is_hamiltonian, is_symplectic, standard_j, symplectic_gram_schmidt, Matrix, SymplecticForm};

use crate::Outcome;

const CASES: usize = 200;
const DENOMINATORS: [&[i64]; 5] = [&[1], &[0, 1], &[1, 1], &[1, 0, 1], &[-2, 0, 1]];

fn ratfunc(rng: &mut StdRng) -> RatFunc {
    let len = rng.gen_range(0..4);
    let num: Vec<i64> = (0..len).map(|_| rng.gen_range(-3..=3)).collect();
    let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
    RatFunc::new(Poly::from_ints(&num), Poly::from_ints(den))
}

fn element(rng: &mut StdRng, field: &Arc<Field>) -> FieldElement {
    let a = ratfunc(rng);
    if field.has_extension() {
        FieldElement::from_parts(field, a, ratfunc(rng))
    } else {
        FieldElement::from_ratfunc(field, a)
    }
}

fn affine(rng: &mut StdRng, field: &Arc<Field>) -> FieldElement {
    FieldElement::from_poly(field, Poly::from_ints(&[rng.gen_range(-3..=3), rng.gen_range(-1..=1)]))
}

/// `[[X, Y], [Z, -X^T]]` with `Y`, `Z` symmetric.
fn hamiltonian(rng: &mut StdRng, field: &Arc<Field>) -> Matrix {
    let mut a = Matrix::zeros(field, 4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let x = element(rng, field);
            a.set(j + 2, i + 2, -&x);
            a.set(i, j, x);
        }
    }
    for (r0, c0) in [(0, 2), (2, 0)] {
        let (d0, d1, off) = (element(rng, field), element(rng, field), element(rng, field));
        a.set(r0, c0, d0);
        a.set(r0 + 1, c0 + 1, d1);
        a.set(r0, c0 + 1, off.clone());
        a.set(r0 + 1, c0, off);
    }
    a
}

/// Product of one or two transvections `Id + f N` with `N` Hamiltonian, `N^2 = 0`.
fn symplectic(rng: &mut StdRng, field: &Arc<Field>) -> Matrix {
    let mut p = Matrix::identity(field, 4);
    for _ in 0..rng.gen_range(1..=2) {
        let f = element(rng, field);
        let mut n = Matrix::zeros(field, 4, 4);
        match rng.gen_range(0..4) {
            0 => {
                n.set(0, 2, f.clone());
                n.set(1, 3, f);
            }
            1 => {
                n.set(2, 1, f.clone());
                n.set(3, 0, f);
            }
            2 => {
                n.set(3, 2, -&f);
                n.set(0, 1, f);
            }
            _ => n.set(3, 1, f),
        }
        p = p.try_mul(&Matrix::identity(field, 4).try_add(&n).unwrap()).unwrap();
    }
    p
}

fn suite(out: &mut Outcome, name: &str, seed: u64, mut case: impl FnMut(&mut StdRng) -> Option<bool>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut ran, mut failed) = (0, 0);
    while ran < CASES {
        match case(&mut rng) {
            Some(ok) => {
                ran += 1;
                failed += usize::from(!ok);
            }
            None => continue,
        }
    }
    out.note(format!("{name}: {ran} cases, {failed} failures"));
    out.check(failed == 0, format!("{name}: {failed} of {ran} cases fail"));
}

pub fn run() -> Outcome {
    let mut out = Outcome::new();
    let plain = Field::rational("t");
    let radical = {
        let f = Field::with_extension("t", &Poly::from_ints(&[1, 0, 0, 1])).unwrap();
        f.with_weight(&FieldElement::sqrt_radicand(&f)).unwrap()
    };

    suite(&mut out, "gauge composition", 1, |rng| {
        let a = hamiltonian(rng, &plain);
        let (p, q) = (symplectic(rng, &plain), symplectic(rng, &plain));
        let pq = p.try_mul(&q).unwrap();
        Some(gauge(&pq, &a).unwrap() == gauge(&q, &gauge(&p, &a).unwrap()).unwrap())
    });
    suite(&mut out, "inverse round trip", 2, |rng| {
        let a = hamiltonian(rng, &plain);
        let p = symplectic(rng, &plain);
        Some(gauge(&p.inverse().unwrap(), &gauge(&p, &a).unwrap()).unwrap() == a)
    });
    suite(&mut out, "symplectic gauge preserves sp(4)", 3, |rng| {
        let a = hamiltonian(rng, &plain);
        let p = symplectic(rng, &plain);
        Some(is_hamiltonian(&a).unwrap() && is_symplectic(&p).unwrap() && is_hamiltonian(&gauge(&p, &a).unwrap()).unwrap())
    });
    suite(&mut out, "symplectic Gram-Schmidt", 4, |rng| {
        let mut u = Matrix::identity(&plain, 4);
        for i in 0..4 {
            for j in i + 1..4 {
                u.set(i, j, affine(rng, &plain));
            }
        }
        let omega = u.transpose().try_mul(&standard_j(&plain, 2)).unwrap().try_mul(&u).unwrap();
        let form = SymplecticForm::new(omega.clone()).unwrap();
        let v = Matrix::new(&plain, 4, 4, (0..16).map(|_| affine(rng, &plain)).collect());
        if v.det().unwrap().is_zero() {
            return None;
        }
        let vectors: Vec<_> = (0..4).map(|j| v.column(j)).collect();
        let Ok(basis) = symplectic_gram_schmidt(&vectors, &form) else { return Some(false) };
        let e = Matrix::from_columns(&plain, &basis);
        Some(e.transpose().try_mul(&omega).unwrap().try_mul(&e).unwrap() == standard_j(&plain, 2))
    });
    suite(&mut out, "Leibniz rule", 5, |rng| {
        let field = if rng.gen_bool(0.5) { &plain } else { &radical };
        let (x, y) = (element(rng, field), element(rng, field));
        Some((&x * &y).derive() == &(&x.derive() * &y) + &(&x * &y.derive()))
    });
    out
}
