//! Exact linear algebra over `Q(i)` and over the coefficient field.

use crate::field::{FieldElement, GaussianRational as G, Poly};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<G>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : M x = 0}` for an `m x ncols` matrix given by rows.
pub fn nullspace(rows: &[Vec<G>], ncols: usize) -> Vec<Vec<G>> {
    let mut m: Vec<Vec<G>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![G::zero(); ncols];
        v[free] = G::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        basis.push(v);
    }
    basis
}

/// Rank of a matrix over `Q(i)`.
pub fn rank(rows: &[Vec<G>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Rows of the `Q(i)`-coefficient matrix of a family of polynomials (one column per
/// polynomial, one row per degree).
fn coefficient_rows(polys: &[Poly]) -> Vec<Vec<G>> {
    let deg = polys.iter().map(|p| p.deg()).max().unwrap_or(-1);
    (0..=deg.max(-1))
        .map(|k| polys.iter().map(|p| p.coeff(k as usize)).collect())
        .collect()
}

/// Basis of the `Q(i)`-linear relations `sum c_j x_j = 0` among field elements.
pub fn linear_relations(xs: &[FieldElement]) -> Vec<Vec<G>> {
    if xs.is_empty() {
        return Vec::new();
    }
    let mut rows = Vec::new();
    for part in 0..2 {
        let rfs: Vec<_> = xs.iter().map(|x| if part == 0 { x.a() } else { x.b() }).collect();
        let mut l = Poly::one();
        for r in &rfs {
            l = l.lcm(r.den());
        }
        let polys: Vec<Poly> = rfs.iter().map(|r| r.num() * &l.exact_div(r.den())).collect();
        rows.extend(coefficient_rows(&polys));
    }
    nullspace(&rows, xs.len())
}

/// Indices of a maximal `Q(i)`-independent subfamily (greedy, in order).
pub fn independent_subset(xs: &[FieldElement]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let mut fam: Vec<FieldElement> = chosen.iter().map(|&j| xs[j].clone()).collect();
        fam.push(x.clone());
        if linear_relations(&fam).is_empty() {
            chosen.push(i);
        }
    }
    chosen
}

/// Expresses `y` as a `Q(i)`-combination of `xs`, if possible.
pub fn express_in(xs: &[FieldElement], y: &FieldElement) -> Option<Vec<G>> {
    let mut fam = xs.to_vec();
    fam.push(y.clone());
    let rel = linear_relations(&fam);
    let n = xs.len();
    // a relation with nonzero last entry gives y = sum (-r_j / r_n) x_j
    let r = rel.iter().find(|r| !r[n].is_zero())?;
    let s = -&r[n].inv().unwrap();
    Some(r[..n].iter().map(|c| c * &s).collect())
}

pub(crate) fn size(x: &FieldElement) -> i64 {
    let d = |r: &crate::field::RatFunc| r.num().deg() + r.den().deg();
    d(x.a()) + d(x.b())
}

/// Gaussian elimination over the field: reduces `m` (rows) in place to reduced echelon
/// form and returns pivot columns. Pivots are chosen among the smallest entries.
pub fn field_rref(m: &mut Vec<Vec<FieldElement>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| size(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        if !inv.is_one() {
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Solves `A x = b` over the field; `None` if inconsistent. Free variables are set to 0.
pub fn field_solve(a: &[Vec<FieldElement>], b: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let field = b.first().map(|x| x.field().clone())?;
    let mut m: Vec<Vec<FieldElement>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = field_rref(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![FieldElement::zero(&field); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Basis of the right nullspace over the field.
pub fn field_nullspace(a: &[Vec<FieldElement>], ncols: usize) -> Vec<Vec<FieldElement>> {
    let Some(field) = a.iter().flatten().next().map(|x| x.field().clone()) else {
        return Vec::new();
    };
    let mut m = a.to_vec();
    let pivots = field_rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElement::zero(&field); ncols];
        v[free] = FieldElement::one(&field);
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        basis.push(v);
    }
    basis
}
