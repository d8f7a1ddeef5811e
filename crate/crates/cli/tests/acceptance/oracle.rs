//! Brute-force ansatz oracles for rational solutions and Risch equations over Q(t).
//!
//! A rational solution can only have poles where the leading coefficient (resp. the
//! denominators of `f`, `g`) vanish, so the oracle looks for `y = N / s^K` with `s`
//! the squarefree part of those denominators, pole order and degree at infinity at
//! most 8. Solver answers that are genuine solutions outside that ansatz are
//! counted separately instead of being compared. Everything here uses its own
//! polynomial arithmetic over Q.

use std::sync::Arc;

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use redform::diffop::{rational_solutions, risch_solve, DiffOp, SolveOptions};
use redform::field::{Field, FieldElement, GaussianRational as G, Poly, RatFunc};

use crate::Outcome;

const POLE_ORDER: usize = 8;
const DEGREE_AT_INFINITY: usize = 8;

/// Dense polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
struct P(Vec<Q>);

impl P {
    fn trim(mut v: Vec<Q>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        P(v)
    }

    fn ints(c: &[i64]) -> Self {
        P::trim(c.iter().map(|&x| Q::from_integer(x.into())).collect())
    }

    fn one() -> Self {
        P::ints(&[1])
    }

    fn monomial(k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = Q::one();
        P(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    fn add(&self, o: &P) -> P {
        let n = self.0.len().max(o.0.len());
        P::trim((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    fn scale(&self, c: &Q) -> P {
        P::trim(self.0.iter().map(|x| x * c).collect())
    }

    fn sub(&self, o: &P) -> P {
        self.add(&o.scale(&-Q::one()))
    }

    fn mul(&self, o: &P) -> P {
        if self.is_zero() || o.is_zero() {
            return P(Vec::new());
        }
        let mut v = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        P::trim(v)
    }

    fn pow(&self, e: usize) -> P {
        (0..e).fold(P::one(), |acc, _| acc.mul(self))
    }

    fn deriv(&self) -> P {
        P::trim(self.0.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer((k as i64).into())).collect())
    }

    fn div_rem(&self, d: &P) -> (P, P) {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        let mut q = vec![Q::zero(); self.0.len().saturating_sub(d.deg())];
        while r.len() >= d.0.len() && !r.is_empty() {
            let shift = r.len() - d.0.len();
            let c = r.last().unwrap() / &dl;
            for (k, dc) in d.0.iter().enumerate() {
                r[shift + k] -= &c * dc;
            }
            q[shift] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (P::trim(q), P::trim(r))
    }

    fn monic(&self) -> P {
        self.scale(&(Q::one() / self.0.last().unwrap()))
    }

    fn gcd(&self, o: &P) -> P {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn squarefree(&self) -> P {
        self.div_rem(&self.gcd(&self.deriv())).0.monic()
    }

    fn to_library(&self) -> Poly {
        Poly::new(self.0.iter().map(|c| G::from_rational(c.clone())).collect())
    }
}

fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        let pivot: Vec<Q> = rows[r].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// Linear system `sum_j c_j cols[j] = rhs` in polynomial coefficients.
struct Ansatz {
    s: P,
    size: usize,
    cols: Vec<P>,
    rhs: P,
}

impl Ansatz {
    fn rows(&self, with_rhs: bool) -> Vec<Vec<Q>> {
        let height = self.cols.iter().chain([&self.rhs]).map(|p| p.0.len()).max().unwrap_or(0);
        (0..height)
            .map(|k| {
                let mut row: Vec<Q> = self.cols.iter().map(|p| p.coeff(k)).collect();
                if with_rhs {
                    row.push(self.rhs.coeff(k));
                }
                row
            })
            .collect()
    }

    fn homogeneous_dimension(&self) -> usize {
        self.size - rank(self.rows(false))
    }

    fn solvable(&self) -> bool {
        rank(self.rows(false)) == rank(self.rows(true))
    }

    /// Coefficients of `y s^K` when `y = num/den` fits the ansatz.
    fn coordinates(&self, num: &P, den: &P) -> Option<Vec<Q>> {
        let (q, r) = num.mul(&self.s.pow(POLE_ORDER)).div_rem(den);
        (r.is_zero() && q.0.len() <= self.size).then(|| (0..self.size).map(|k| q.coeff(k)).collect())
    }

    fn image(&self, c: &[Q]) -> P {
        self.cols.iter().zip(c).fold(P(Vec::new()), |acc, (p, x)| acc.add(&p.scale(x)))
    }

    fn satisfies(&self, c: &[Q]) -> bool {
        self.image(c) == self.rhs
    }
}

fn size_for(s: &P) -> usize {
    DEGREE_AT_INFINITY + POLE_ORDER * s.deg() + 1
}

/// `sum a_i D^i (t^j / s^K) * s^(K+n)` for every ansatz monomial.
fn operator_ansatz(a: &[P]) -> Ansatz {
    let n = a.len() - 1;
    let s = a[n].squarefree();
    let ds = s.deriv();
    let size = size_for(&s);
    let cols = (0..size)
        .map(|j| {
            let mut term = (P::monomial(j), POLE_ORDER);
            let mut total = P(Vec::new());
            for (i, ai) in a.iter().enumerate() {
                total = total.add(&ai.mul(&term.0).mul(&s.pow(n - i)));
                let e = Q::from_integer((term.1 as i64).into());
                term = (term.0.deriv().mul(&s).sub(&term.0.mul(&ds).scale(&e)), term.1 + 1);
            }
            total
        })
        .collect();
    Ansatz { s, size, cols, rhs: P(Vec::new()) }
}

/// `y' = f y + g` times `fd gd s^(K+1)`.
fn risch_ansatz(f: &(P, P), g: &(P, P)) -> Ansatz {
    let s = f.1.mul(&g.1).squarefree();
    let ds = s.deriv();
    let size = size_for(&s);
    let k = Q::from_integer((POLE_ORDER as i64).into());
    let dens = f.1.mul(&g.1);
    let cols = (0..size)
        .map(|j| {
            let m = P::monomial(j);
            let dy = m.deriv().mul(&s).sub(&m.mul(&ds).scale(&k));
            dy.mul(&dens).sub(&f.0.mul(&g.1).mul(&m).mul(&s))
        })
        .collect();
    let rhs = g.0.mul(&f.1).mul(&s.pow(POLE_ORDER + 1));
    Ansatz { s, size, cols, rhs }
}

/// Real and imaginary parts of a library element over the common real denominator.
fn parts(y: &FieldElement) -> (P, P, P) {
    let r = y.a();
    let num = r.num() * &r.den().conj();
    let den = r.den() * &r.den().conj();
    let real = |p: &Poly| P::trim(p.coeffs().iter().map(|c| c.re.clone()).collect());
    let imag = |p: &Poly| P::trim(p.coeffs().iter().map(|c| c.im.clone()).collect());
    (real(&num), imag(&num), real(&den))
}

fn element(field: &Arc<Field>, num: &P, den: &P) -> FieldElement {
    FieldElement::from_ratfunc(field, RatFunc::new(num.to_library(), den.to_library()))
}

fn random_poly(rng: &mut StdRng, max_deg: usize) -> P {
    let d = rng.gen_range(0..=max_deg);
    P::ints(&(0..=d).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>())
}

fn nonzero_poly(rng: &mut StdRng, max_deg: usize) -> P {
    loop {
        let p = random_poly(rng, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

const DENOMINATORS: [&[i64]; 6] = [&[1], &[0, 1], &[1, 1], &[1, 0, 1], &[-2, 1], &[0, 0, 1]];

fn denominator(rng: &mut StdRng) -> P {
    P::ints(DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())])
}

/// Operators of order at most 2 with polynomial coefficients of degree at most 3:
/// generic ones, ones built around a planted rational solution, and Euler operators.
fn random_operator(rng: &mut StdRng, kind: usize) -> Vec<P> {
    match kind {
        0 => {
            let order = rng.gen_range(1..=2);
            let mut a: Vec<P> = (0..order).map(|_| random_poly(rng, 3)).collect();
            a.push(nonzero_poly(rng, 3));
            a
        }
        1 | 2 => {
            let (p, q) = (nonzero_poly(rng, 1), denominator(rng));
            let lead = p.mul(&q);
            let b = p.deriv().mul(&q).sub(&p.mul(&q.deriv()));
            if kind == 1 {
                vec![b.scale(&-Q::one()), lead]
            } else {
                let c = Q::from_integer(rng.gen_range(-2i64..=2).into());
                vec![b.deriv().scale(&-Q::one()).add(&b.scale(&c)), lead.deriv().sub(&b).sub(&lead.scale(&c)), lead]
            }
        }
        _ => {
            let shift = P::ints(&[rng.gen_range(-2..=2), 1]);
            let alpha = Q::from_integer(rng.gen_range(-3i64..=3).into());
            let beta = Q::from_integer(rng.gen_range(-3i64..=3).into());
            vec![P::one().scale(&beta), shift.scale(&alpha), shift.pow(2)]
        }
    }
}

/// Rational function over Q as an unreduced fraction, for direct substitution.
#[derive(Clone)]
struct R(P, P);

impl R {
    fn poly(p: &P) -> R {
        R(p.clone(), P::one())
    }

    fn add(&self, o: &R) -> R {
        R(self.0.mul(&o.1).add(&o.0.mul(&self.1)), self.1.mul(&o.1))
    }

    fn mul(&self, o: &R) -> R {
        R(self.0.mul(&o.0), self.1.mul(&o.1))
    }

    fn neg(&self) -> R {
        R(self.0.scale(&-Q::one()), self.1.clone())
    }

    fn deriv(&self) -> R {
        R(self.0.deriv().mul(&self.1).sub(&self.0.mul(&self.1.deriv())), self.1.mul(&self.1))
    }
}

/// Comparison of the solver with the oracle on one instance.
enum Check {
    Agree,
    Disagree(String),
    /// The solver returned a genuine solution that the bounded ansatz cannot see.
    Beyond,
}

fn applies_to_zero(a: &[P], y: &R) -> bool {
    let mut d = y.clone();
    let mut total = R(P(Vec::new()), P::one());
    for ai in a {
        total = total.add(&R::poly(ai).mul(&d));
        d = d.deriv();
    }
    total.0.is_zero()
}

fn check_operator(field: &Arc<Field>, a: &[P]) -> (Check, usize) {
    let ans = operator_ansatz(a);
    let expected = ans.homogeneous_dimension();
    let op = DiffOp::new(field, a.iter().map(|p| element(field, p, &P::one())).collect());
    let space = match rational_solutions(&op, SolveOptions::default()) {
        Ok(s) => s,
        Err(e) => return (Check::Disagree(format!("rational_solutions {a:?}: {e}")), expected),
    };
    let mut vectors = Vec::new();
    for y in &space.basis {
        let (re, im, den) = parts(y);
        for part in [re, im] {
            match ans.coordinates(&part, &den) {
                Some(c) if ans.satisfies(&c) => vectors.push(c),
                Some(_) => return (Check::Disagree(format!("{a:?}: reported solution {y:?} does not solve the operator")), expected),
                None if applies_to_zero(a, &R(part, den.clone())) => return (Check::Beyond, expected),
                None => return (Check::Disagree(format!("{a:?}: reported solution {y:?} does not solve the operator")), expected),
            }
        }
    }
    if space.dimension() == expected && rank(vectors) == expected {
        (Check::Agree, expected)
    } else {
        (Check::Disagree(format!("{a:?}: dimension {} reported, oracle finds {expected}", space.dimension())), expected)
    }
}

fn check_risch(field: &Arc<Field>, f: &(P, P), g: &(P, P)) -> (Check, bool) {
    let ans = risch_ansatz(f, g);
    let expected = ans.solvable();
    let (fe, ge) = (element(field, &f.0, &f.1), element(field, &g.0, &g.1));
    let outcome = match risch_solve(&fe, &ge, SolveOptions::default()) {
        Ok(o) => o,
        Err(e) => return (Check::Disagree(format!("risch_solve {f:?} {g:?}: {e}")), expected),
    };
    let describe = || format!("y' = f y + g with f = {f:?}, g = {g:?}: solver {:?}, oracle solvable = {expected}", outcome.solution);
    let Some(y) = &outcome.solution else {
        return (if expected { Check::Disagree(describe()) } else { Check::Agree }, expected);
    };
    let (re, im, den) = parts(y);
    // an imaginary part can only come from a homogeneous solution
    let inside = ans.coordinates(&re, &den).zip(ans.coordinates(&im, &den));
    let fr = R(f.0.clone(), f.1.clone());
    let residual = |part: &P, inhomogeneous: bool| {
        let y = R(part.clone(), den.clone());
        let mut r = y.deriv().add(&fr.mul(&y).neg());
        if inhomogeneous {
            r = r.add(&R(g.0.clone(), g.1.clone()).neg());
        }
        r.0.is_zero()
    };
    let check = match inside {
        Some((c, d)) if expected && ans.satisfies(&c) && ans.image(&d).is_zero() => Check::Agree,
        None if residual(&re, true) && residual(&im, false) => Check::Beyond,
        _ => Check::Disagree(describe()),
    };
    (check, expected)
}

pub fn run() -> Outcome {
    let mut out = Outcome::new();
    let field = Field::rational("t");
    let mut rng = StdRng::seed_from_u64(6);

    let (mut compared, mut with_solutions, mut beyond) = (0, 0, 0);
    for (kind, count) in [(0, 40), (1, 30), (2, 25), (3, 25)] {
        let mut done = 0;
        while done < count {
            let a = random_operator(&mut rng, kind);
            match check_operator(&field, &a) {
                (Check::Beyond, _) => beyond += 1,
                (check, dim) => {
                    if let Check::Disagree(msg) = check {
                        out.check(false, msg);
                    }
                    done += 1;
                    with_solutions += usize::from(dim > 0);
                }
            }
        }
        compared += done;
    }
    out.note(format!(
        "rational solutions: {compared} operators compared, {with_solutions} with non-trivial solutions, {beyond} skipped as beyond the ansatz"
    ));

    let (mut compared, mut solvable, mut beyond) = (0, 0, 0);
    while compared < 100 {
        let f = (random_poly(&mut rng, 2), denominator(&mut rng));
        let g = if compared % 2 == 0 {
            // planted solution y0 = p/q: g = y0' - f y0
            let (p, q) = (random_poly(&mut rng, 2), denominator(&mut rng));
            let num = p.deriv().mul(&q).sub(&p.mul(&q.deriv())).mul(&f.1).sub(&f.0.mul(&p).mul(&q));
            (num, q.pow(2).mul(&f.1))
        } else {
            (random_poly(&mut rng, 3), denominator(&mut rng))
        };
        if g.0.is_zero() {
            continue;
        }
        match check_risch(&field, &f, &g) {
            (Check::Beyond, _) => beyond += 1,
            (check, exists) => {
                if let Check::Disagree(msg) = check {
                    out.check(false, msg);
                }
                compared += 1;
                solvable += usize::from(exists);
            }
        }
    }
    out.note(format!("Risch equations: {compared} instances compared, {solvable} solvable, {beyond} skipped as beyond the ansatz"));
    out
}
