//! Closed-form fundamental matrices of abelian systems, in terms of formal
//! primitives `Omega' = ...` and exponentials `E' = a E`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{Field, FieldElement, GaussianRational as G};
use crate::linsys::{associated_lie_algebra, ConstMatrix, Matrix};
use crate::sp4::{ReducedShape, ShapeCase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeiNormanError {
    #[error("the associated Lie algebra is not abelian")]
    NonAbelianInput,
    #[error("basis matrix is not diagonal plus a commuting nilpotent part")]
    UnsupportedDirection,
    #[error("primitives and matrix live over different fields")]
    InconsistentPrimitives,
}

/// Monomial in the primitive symbols: sorted `(symbol, exponent)` pairs.
type Monomial = Vec<(usize, i32)>;

/// Polynomial in the primitives (Laurent in the exponentials) with field coefficients.
#[derive(Clone, PartialEq)]
pub struct Expr {
    field: Arc<Field>,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl Expr {
    pub fn zero(field: &Arc<Field>) -> Self {
        Self { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(c: &FieldElement) -> Self {
        let mut e = Self::zero(c.field());
        if !c.is_zero() {
            e.terms.insert(Vec::new(), c.clone());
        }
        e
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::constant(&FieldElement::one(field))
    }

    /// `sym^power`.
    pub fn symbol(field: &Arc<Field>, sym: usize, power: i32) -> Self {
        let mut e = Self::zero(field);
        e.terms.insert(if power == 0 { Vec::new() } else { vec![(sym, power)] }, FieldElement::one(field));
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// The coefficient when the expression has no symbols.
    pub fn as_field_element(&self) -> Option<FieldElement> {
        match self.terms.len() {
            0 => Some(FieldElement::zero(&self.field)),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(|| FieldElement::zero(&c.field().clone()));
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { field: self.field.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = Self::zero(&self.field);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(&self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    /// Formal derivative, substituting the primitives' derivatives.
    pub fn derive(&self, prims: &Primitives) -> Self {
        let mut out = Self::zero(&self.field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.derive());
            for (k, &(sym, e)) in m.iter().enumerate() {
                let ce = c.scale(&G::from_int(e as i64));
                match &prims.items[sym].kind {
                    PrimitiveKind::Exponential(rate) => out.add_term(m.clone(), &ce * rate),
                    PrimitiveKind::Integral(d) => {
                        let mut rest = m.clone();
                        if e == 1 {
                            rest.remove(k);
                        } else {
                            rest[k].1 -= 1;
                        }
                        let part = Self { field: self.field.clone(), terms: BTreeMap::from([(rest, ce)]) };
                        out = out.add(&part.mul(d));
                    }
                }
            }
        }
        out
    }

    pub fn display(&self, prims: &Primitives) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                if !c.is_one() || m.is_empty() {
                    factors.push(format!("({})", c.to_expr_string()));
                }
                for &(s, e) in m {
                    let name = &prims.items[s].name;
                    factors.push(if e == 1 { name.clone() } else { format!("{name}^({e})") });
                }
                factors.join("*")
            })
            .collect();
        parts.join(" + ")
    }
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut map: BTreeMap<usize, i32> = a.iter().copied().collect();
    for &(s, e) in b {
        *map.entry(s).or_insert(0) += e;
    }
    map.into_iter().filter(|&(_, e)| e != 0).collect()
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, c) in &self.terms {
            write!(f, "[{c} {m:?}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveKind {
    /// `Omega' = expr`.
    Integral(Expr),
    /// `E' = rate E`.
    Exponential(FieldElement),
}

/// A named symbol with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalPrimitive {
    pub name: String,
    pub kind: PrimitiveKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Primitives {
    items: Vec<FormalPrimitive>,
}

impl Primitives {
    pub fn items(&self) -> &[FormalPrimitive] {
        &self.items
    }

    /// Adds `name' = derivative`; returns the symbol index.
    pub fn integral(&mut self, name: &str, derivative: Expr) -> usize {
        self.items.push(FormalPrimitive { name: name.into(), kind: PrimitiveKind::Integral(derivative) });
        self.items.len() - 1
    }

    /// Adds `name' = rate * name`.
    pub fn exponential(&mut self, name: &str, rate: FieldElement) -> usize {
        self.items.push(FormalPrimitive { name: name.into(), kind: PrimitiveKind::Exponential(rate) });
        self.items.len() - 1
    }

    pub fn describe(&self) -> Vec<String> {
        self.items
            .iter()
            .map(|p| match &p.kind {
                PrimitiveKind::Integral(d) => format!("{}' = {}", p.name, d.display(self)),
                PrimitiveKind::Exponential(r) => format!("{}' = ({}) {}", p.name, r.to_expr_string(), p.name),
            })
            .collect()
    }
}

/// Square matrix of expressions together with the primitives it uses.
#[derive(Debug, Clone)]
pub struct FundamentalMatrixExpr {
    pub primitives: Primitives,
    n: usize,
    entries: Vec<Expr>,
}

impl FundamentalMatrixExpr {
    fn identity(field: &Arc<Field>, n: usize, primitives: Primitives) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { Expr::one(field) } else { Expr::zero(field) }).collect();
        Self { primitives, n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.entries[i * self.n + j] = e;
    }

    fn field(&self) -> &Arc<Field> {
        self.entries[0].field()
    }

    fn product(&self, a: &[Expr], b: &[Expr]) -> Vec<Expr> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Expr::zero(self.field());
                for k in 0..n {
                    s = s.add(&a[i * n + k].mul(&b[k * n + j]));
                }
                out.push(s);
            }
        }
        out
    }

    fn lift(&self, m: &Matrix) -> Vec<Expr> {
        m.entries().iter().map(Expr::constant).collect()
    }

    fn lift_const(&self, m: &ConstMatrix) -> Vec<Expr> {
        m.entries().iter().map(|c| Expr::constant(&FieldElement::constant(self.field(), c.clone()))).collect()
    }

    /// `self * other`, sharing the primitive table.
    fn times(&self, other: &[Expr]) -> Self {
        Self { primitives: self.primitives.clone(), n: self.n, entries: self.product(&self.entries, other) }
    }

    pub fn derive(&self) -> Vec<Expr> {
        self.entries.iter().map(|e| e.derive(&self.primitives)).collect()
    }

    /// `U^T J U - J`, entrywise.
    pub fn symplectic_defect(&self) -> Vec<Expr> {
        let n = self.n;
        let j = self.lift_const(&ConstMatrix::standard_j(n / 2));
        let t: Vec<Expr> = (0..n * n).map(|k| self.entries[(k % n) * n + k / n].clone()).collect();
        let tju = self.product(&self.product(&t, &j), &self.entries);
        tju.iter().zip(&j).map(|(a, b)| a.sub(b)).collect()
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_defect().iter().all(Expr::is_zero)
    }

    /// Determinant of the block on rows and columns 2 and 4.
    pub fn inner_block_det(&self) -> Expr {
        self.get(1, 1).mul(self.get(3, 3)).sub(&self.get(1, 3).mul(self.get(3, 1)))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).display(&self.primitives)).collect()).collect()
    }
}

fn is_nilpotent(m: &ConstMatrix) -> bool {
    (1..m.rows()).try_fold(m.clone(), |p, _| Some(p.mul(m))).is_some_and(|p| p.is_zero())
}

fn diagonal(m: &ConstMatrix) -> Option<Vec<G>> {
    let n = m.rows();
    let off = (0..n).any(|i| (0..n).any(|j| i != j && !m.get(i, j).is_zero()));
    (!off).then(|| (0..n).map(|i| m.get(i, i).clone()).collect())
}

fn as_integer(g: &G) -> Option<i32> {
    let r = g.as_rational()?;
    if r.is_integer() { r.to_integer().try_into().ok() } else { None }
}

/// `exp(Omega N)` for nilpotent `N`, as a finite series in a new integral `Omega`.
fn nilpotent_factor(u: &mut FundamentalMatrixExpr, name: String, f: &FieldElement, m: &ConstMatrix) -> Vec<Expr> {
    let field = f.field().clone();
    let n = m.rows();
    let sym = u.primitives.integral(&name, Expr::constant(f));
    let mut out = FundamentalMatrixExpr::identity(&field, n, Primitives::default());
    let mut power = out.entries.clone();
    for k in 1..n {
        power = out.product(&power, &out.lift_const(m));
        if power.iter().all(Expr::is_zero) {
            break;
        }
        let c = FieldElement::constant(&field, G::from_int((1..=k as i64).product()).inv().unwrap());
        let om = Expr::symbol(&field, sym, k as i32).scale(&c);
        out.entries = out.entries.iter().zip(&power).map(|(a, p)| a.add(&p.mul(&om))).collect();
    }
    out.entries
}

/// `q` and integers `k_i` with `d_i = k_i q`, for a rational diagonal.
fn common_rate(d: &[G]) -> Option<(BigRational, Vec<i32>)> {
    let rs: Vec<&BigRational> = d.iter().map(G::as_rational).collect::<Option<_>>()?;
    let nonzero: Vec<&&BigRational> = rs.iter().filter(|r| !r.is_zero()).collect();
    let num = nonzero.iter().fold(BigInt::zero(), |g, r| g.gcd(r.numer()));
    let den = nonzero.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    if num.is_zero() {
        return None;
    }
    let q = BigRational::new(num, den);
    let ks = rs.iter().map(|r| (*r / &q).to_integer().try_into().ok()).collect::<Option<_>>()?;
    Some((q, ks))
}

/// `exp((int f) diag(d))` as powers of one exponential when `d` is a multiple of a
/// rational vector; otherwise one exponential per rate, opposite rates sharing it.
fn diagonal_factor(u: &mut FundamentalMatrixExpr, name: String, f: &FieldElement, d: &[G]) -> Vec<Expr> {
    let field = f.field().clone();
    let mut out = FundamentalMatrixExpr::identity(&field, d.len(), Primitives::default());
    if let Some(ints) = d.iter().map(as_integer).collect::<Option<Vec<i32>>>() {
        let sym = u.primitives.exponential(&name, f.clone());
        for (i, e) in ints.into_iter().enumerate() {
            out.set(i, i, Expr::symbol(&field, sym, e));
        }
    } else if let Some((q, ks)) = common_rate(d) {
        let sym = u.primitives.exponential(&name, f.scale(&G::from_rational(q)));
        for (i, e) in ks.into_iter().enumerate() {
            out.set(i, i, Expr::symbol(&field, sym, e));
        }
    } else {
        let mut seen: Vec<(G, usize)> = Vec::new();
        for (i, di) in d.iter().enumerate() {
            if di.is_zero() {
                continue;
            }
            let e = match seen.iter().find(|(r, _)| r == di || *r == -di) {
                Some((r, sym)) => Expr::symbol(&field, *sym, if r == di { 1 } else { -1 }),
                None => {
                    let sym = u.primitives.exponential(&format!("{name}_{}", i + 1), f.scale(di));
                    seen.push((di.clone(), sym));
                    Expr::symbol(&field, sym, 1)
                }
            };
            out.set(i, i, e);
        }
    }
    out.entries
}

/// `U = prod exp((int f_i) M_i)` over the decomposition of an abelian `R`. A basis
/// matrix that is neither nilpotent nor diagonal is split into its diagonal part and
/// a commuting nilpotent rest.
pub fn solve_abelian(r: &Matrix) -> Result<FundamentalMatrixExpr, WeiNormanError> {
    let (dec, alg) = associated_lie_algebra(r);
    if !alg.is_abelian() {
        return Err(WeiNormanError::NonAbelianInput);
    }
    let field = r.field().clone();
    let n = r.rows();
    let mut u = FundamentalMatrixExpr::identity(&field, n, Primitives::default());
    for (idx, (f, m)) in dec.iter().enumerate() {
        let k = idx + 1;
        if is_nilpotent(m) {
            let factor = nilpotent_factor(&mut u, format!("Omega{k}"), f, m);
            u = u.times(&factor);
        } else if let Some(d) = diagonal(m) {
            let factor = diagonal_factor(&mut u, format!("E{k}"), f, &d);
            u = u.times(&factor);
        } else {
            let d: Vec<G> = (0..n).map(|i| m.get(i, i).clone()).collect();
            let dm = ConstMatrix::new(n, n, (0..n * n).map(|x| if x % (n + 1) == 0 { d[x / n].clone() } else { G::zero() }).collect());
            let rest = m.sub(&dm);
            if !is_nilpotent(&rest) || !dm.mul(&rest).sub(&rest.mul(&dm)).is_zero() {
                return Err(WeiNormanError::UnsupportedDirection);
            }
            let factor = diagonal_factor(&mut u, format!("E{k}"), f, &d);
            u = u.times(&factor);
            let factor = nilpotent_factor(&mut u, format!("Omega{k}"), f, &rest);
            u = u.times(&factor);
        }
    }
    Ok(u)
}

/// Whether `U' = A U` holds formally.
pub fn verify_fundamental(u: &FundamentalMatrixExpr, a: &Matrix) -> Result<bool, WeiNormanError> {
    if a.rows() != u.n || !a.field().same(u.field()) {
        return Err(WeiNormanError::InconsistentPrimitives);
    }
    let au = u.product(&u.lift(a), &u.entries);
    Ok(u.derive().iter().zip(&au).all(|(x, y)| x.sub(y).is_zero()))
}

/// The fundamental matrix of the reduced shape, with `Omega1, Omega2, Omega3` and
/// `L` or `E` as primitives.
pub fn fundamental_shape(shape: &ReducedShape) -> FundamentalMatrixExpr {
    let f = shape.field().clone();
    let c = |x: &FieldElement| Expr::constant(x);
    let mut p = Primitives::default();
    let mut u = FundamentalMatrixExpr::identity(&f, 4, Primitives::default());
    let sym = |s: usize| Expr::symbol(&f, s, 1);
    // Omega3' = a13 + a12 Omega2 - a14 Omega1 in every case
    let omega3 = |p: &mut Primitives, o1: usize, o2: usize| {
        let d = c(&shape.a13).add(&sym(o2).scale(&shape.a12)).sub(&sym(o1).scale(&shape.a14));
        p.integral("Omega3", d)
    };
    match shape.case {
        ShapeCase::TrivialGN => {
            let o1 = p.integral("Omega1", c(&shape.a12));
            let o2 = p.integral("Omega2", c(&shape.a14));
            let o3 = omega3(&mut p, o1, o2);
            u.set(0, 1, sym(o1));
            u.set(0, 2, sym(o3));
            u.set(0, 3, sym(o2));
            u.set(1, 2, sym(o2));
            u.set(3, 2, sym(o1).neg());
        }
        ShapeCase::AdditiveGN => {
            let a24 = shape.a24.clone().unwrap_or_else(|| FieldElement::zero(&f));
            let l = p.integral("L", c(&a24));
            let o1 = p.integral("Omega1", c(&shape.a12));
            let o2 = p.integral("Omega2", c(&shape.a14).sub(&sym(o1).scale(&a24)));
            let o3 = omega3(&mut p, o1, o2);
            u.set(0, 1, sym(o1));
            u.set(0, 2, sym(o3));
            u.set(0, 3, sym(o2).add(&sym(l).mul(&sym(o1))));
            u.set(1, 2, sym(o2));
            u.set(1, 3, sym(l));
            u.set(3, 2, sym(o1).neg());
        }
        ShapeCase::MultiplicativeGN => {
            let a22 = shape.a22.clone().unwrap_or_else(|| FieldElement::zero(&f));
            let e = p.exponential("E", a22.clone());
            // Omega1' = a12 - a22 Omega1, Omega2' = a14 + a22 Omega2
            let (o1, o2) = (e + 1, e + 2);
            p.integral("Omega1", c(&shape.a12).sub(&sym(o1).scale(&a22)));
            p.integral("Omega2", c(&shape.a14).add(&sym(o2).scale(&a22)));
            let o3 = omega3(&mut p, o1, o2);
            let einv = Expr::symbol(&f, e, -1);
            u.set(0, 1, sym(e).mul(&sym(o1)));
            u.set(0, 2, sym(o3));
            u.set(0, 3, sym(o2).mul(&einv));
            u.set(1, 1, sym(e));
            u.set(1, 2, sym(o2));
            u.set(3, 2, sym(o1).neg());
            u.set(3, 3, einv);
        }
    }
    u.primitives = p;
    u
}
