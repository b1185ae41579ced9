//! Dense matrices over a context field: elimination, kernels, inverses,
//! Kronecker products and characteristic polynomials.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElem::ONE;
        }
        m
    }

    pub fn diag(entries: &[FieldElem]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from columns, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<FieldElem>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn map(&self, f: impl Fn(FieldElem) -> FieldElem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ctx.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ctx.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElem) -> Matrix {
        self.map(|x| ctx.mul(x, c))
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        out.data[base + j] = ctx.add(out.data[base + j], ctx.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, ctx: &FieldCtx, mut e: u64) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(ctx, &b);
            }
        }
        acc
    }

    /// Kronecker product; index `(i, k)` of the result is `i * other.rows + k`.
    pub fn kron(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Matrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = ctx.mul(a, other[(k, l)]);
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, ctx: &FieldCtx) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = ctx.inv(m[(r, c)]).expect("pivot nonzero");
            for j in c..m.cols {
                m[(r, j)] = ctx.mul(m[(r, j)], inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = ctx.mul(f, m[(r, j)]);
                    m[(i, j)] = ctx.sub(m[(i, j)], v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // forward elimination only
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = ctx.inv(m[(r, c)]).expect("pivot nonzero");
            for i in r + 1..m.rows {
                let f = m[(i, c)];
                if f.is_zero() {
                    continue;
                }
                let f = ctx.mul(f, inv);
                for j in c..m.cols {
                    let v = ctx.mul(f, m[(r, j)]);
                    m[(i, j)] = ctx.sub(m[(i, j)], v);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the null space, as the columns of an `cols x d` matrix.
    pub fn kernel(&self, ctx: &FieldCtx) -> Matrix {
        let (rr, pivots) = self.rref(ctx);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = FieldElem::ONE;
            for (r, &p) in pivots.iter().enumerate() {
                out[(p, k)] = ctx.neg(rr[(r, f)]);
            }
        }
        out
    }

    /// A basis of the column space, chosen among the columns themselves.
    pub fn column_basis(&self, ctx: &FieldCtx) -> Matrix {
        let (_, pivots) = self.rref(ctx);
        self.select_cols(&pivots)
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Matrix::identity(0));
        }
        let aug = self.hstack(&Matrix::identity(n));
        let (rr, pivots) = aug.rref(ctx);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(rr.select(&rows, &cols))
    }

    /// Coordinates `X` with `self * X = rhs`, where `self` has independent columns.
    pub fn solve(&self, ctx: &FieldCtx, rhs: &Matrix) -> Result<Matrix> {
        let k = self.cols;
        let aug = self.hstack(rhs);
        let (rr, pivots) = aug.rref(ctx);
        if pivots.iter().take_while(|&&p| p < k).count() < k {
            return Err(Error::InvalidInput("columns are dependent".into()));
        }
        if pivots.iter().any(|&p| p >= k) {
            return Err(Error::InvalidInput("right-hand side outside the column span".into()));
        }
        let rows: Vec<usize> = (0..k).collect();
        let cols: Vec<usize> = (k..k + rhs.cols).collect();
        Ok(rr.select(&rows, &cols))
    }

    pub fn det(&self, ctx: &FieldCtx) -> FieldElem {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = FieldElem::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return FieldElem::ZERO;
            };
            if p != c {
                m.swap_rows(p, c);
                det = ctx.neg(det);
            }
            let piv = m[(c, c)];
            det = ctx.mul(det, piv);
            let inv = ctx.inv(piv).expect("pivot nonzero");
            for i in c + 1..n {
                let f = ctx.mul(m[(i, c)], inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = ctx.mul(f, m[(c, j)]);
                    m[(i, j)] = ctx.sub(m[(i, j)], v);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(X - A)` via reduction to Hessenberg form.
    pub fn charpoly(&self, ctx: &FieldCtx) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
                continue;
            };
            if i != m {
                h.swap_rows(i, m);
                h.swap_cols(i, m);
            }
            let inv = ctx.inv(h[(m, m - 1)]).expect("pivot nonzero");
            for j in m + 1..n {
                let u = ctx.mul(h[(j, m - 1)], inv);
                if u.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = ctx.mul(u, h[(m, c)]);
                    h[(j, c)] = ctx.sub(h[(j, c)], v);
                }
                for r in 0..n {
                    let v = ctx.mul(u, h[(r, j)]);
                    h[(r, m)] = ctx.add(h[(r, m)], v);
                }
            }
        }
        // one-based accessor for the recurrence below
        let at = |i: usize, j: usize| h[(i - 1, j - 1)];
        let mut p: Vec<Poly> = vec![Poly::one()];
        for m in 1..=n {
            let lin = Poly::from_coeffs(vec![ctx.neg(at(m, m)), FieldElem::ONE]);
            let mut pm = lin.mul(ctx, &p[m - 1]);
            let mut t = FieldElem::ONE;
            for i in 1..m {
                t = ctx.mul(t, at(m - i + 1, m - i));
                if t.is_zero() {
                    break;
                }
                let c = ctx.mul(at(m - i, m), t);
                pm = pm.sub(ctx, &p[m - i - 1].scale(ctx, c));
            }
            p.push(pm);
        }
        p.pop().expect("nonempty")
    }

    /// Evaluates the polynomial at this square matrix (Horner's rule).
    pub fn eval_poly(&self, ctx: &FieldCtx, f: &Poly) -> Matrix {
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n);
        for &c in f.coeffs().iter().rev() {
            acc = acc.mul(ctx, self);
            for i in 0..n {
                acc[(i, i)] = ctx.add(acc[(i, i)], c);
            }
        }
        acc
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = FieldElem;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElem {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_ctx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(ctx: &FieldCtx, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        let mut m = Matrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m[(i, j)] = ctx.from_code(rng.gen_range(0..ctx.size())).unwrap();
            }
        }
        m
    }

    #[test]
    fn charpoly_matches_determinant_at_every_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(ell, q) in &[(5u64, 2u64), (3, 2), (2, 3), (7, 3)] {
            let ctx = make_ctx(ell, q, 1).unwrap();
            for n in 1..7 {
                let a = random(&ctx, &mut rng, n, n);
                let cp = a.charpoly(&ctx);
                assert_eq!(cp.degree(), Some(n));
                for x in ctx.elements() {
                    let xi = Matrix::identity(n).scale(&ctx, x).sub(&ctx, &a);
                    assert_eq!(cp.eval(&ctx, x), xi.det(&ctx));
                }
                // Cayley-Hamilton
                assert!(a.eval_poly(&ctx, &cp).is_zero());
            }
        }
    }

    #[test]
    fn inverse_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = make_ctx(3, 2, 1).unwrap();
        for _ in 0..30 {
            let a = random(&ctx, &mut rng, 5, 5);
            let k = a.kernel(&ctx);
            assert!(a.mul(&ctx, &k).is_zero());
            assert_eq!(k.cols() + a.rank(&ctx), 5);
            match a.inverse(&ctx) {
                Ok(inv) => assert_eq!(a.mul(&ctx, &inv), Matrix::identity(5)),
                Err(_) => assert!(a.rank(&ctx) < 5),
            }
        }
    }

    #[test]
    fn solve_recovers_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ctx = make_ctx(5, 2, 1).unwrap();
        let basis = random(&ctx, &mut rng, 6, 3).column_basis(&ctx);
        let x = random(&ctx, &mut rng, basis.cols(), 2);
        let rhs = basis.mul(&ctx, &x);
        assert_eq!(basis.solve(&ctx, &rhs).unwrap(), x);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = make_ctx(5, 2, 1).unwrap();
        let (a, b) = (random(&ctx, &mut rng, 2, 2), random(&ctx, &mut rng, 3, 3));
        let (c, d) = (random(&ctx, &mut rng, 2, 2), random(&ctx, &mut rng, 3, 3));
        let lhs = a.kron(&ctx, &b).mul(&ctx, &c.kron(&ctx, &d));
        let rhs = a.mul(&ctx, &c).kron(&ctx, &b.mul(&ctx, &d));
        assert_eq!(lhs, rhs);
    }
}
