//! Explicit matrix pairs `(F, U)` for classes on unramified lines, and the
//! algorithms turning such pairs back into normal forms.

use std::collections::BTreeMap;

use crate::deligne::{dsum, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::field::{make_ctx, Embedding, FieldCtx, FieldElem};
use crate::laurent::{LaurentPoly, RationalFraction};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::weil::{locate, IrredRep, Line};

/// Frobenius matrix `f` and operator `u` with `u f = q f u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixDeligne {
    pub ctx: FieldCtx,
    pub f: Matrix,
    pub u: Matrix,
}

/// Additive Jordan decomposition `u = d + n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPair {
    pub d: Matrix,
    pub n: Matrix,
}

impl MatrixDeligne {
    pub fn new(ctx: &FieldCtx, f: Matrix, u: Matrix) -> Self {
        MatrixDeligne {
            ctx: ctx.clone(),
            f,
            u,
        }
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    /// `(g f g^-1, g u g^-1)`.
    pub fn conjugate(&self, g: &Matrix) -> Result<MatrixDeligne> {
        let ctx = &self.ctx;
        let gi = g.inverse(ctx)?;
        Ok(MatrixDeligne::new(
            ctx,
            g.mul(ctx, &self.f).mul(ctx, &gi),
            g.mul(ctx, &self.u).mul(ctx, &gi),
        ))
    }

    pub fn scale_operator(&self, c: FieldElem) -> MatrixDeligne {
        MatrixDeligne::new(&self.ctx, self.f.clone(), self.u.scale(&self.ctx, c))
    }

    /// Text dump: the context header, then `F:` and `U:` with one row per line.
    pub fn render(&self) -> String {
        let ctx = &self.ctx;
        let row = |m: &Matrix, i: usize| -> String {
            m.row(i)
                .iter()
                .map(|&x| {
                    let c: Vec<String> = ctx.coeffs(x).iter().map(u32::to_string).collect();
                    format!("[{}]", c.join(","))
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = ctx.header();
        s.push_str("\nF:\n");
        for i in 0..self.f.rows() {
            s.push_str(&row(&self.f, i));
            s.push('\n');
        }
        s.push_str("U:\n");
        for i in 0..self.u.rows() {
            s.push_str(&row(&self.u, i));
            s.push('\n');
        }
        s
    }
}

fn distinct_roots(ctx: &FieldCtx, p: &Poly) -> Vec<FieldElem> {
    let mut r = p.roots(ctx);
    r.dedup();
    r
}

/// Checks shapes, invertibility of `f`, the relation and diagonalizability of `f`.
pub fn validate(m: &MatrixDeligne) -> Result<()> {
    let ctx = &m.ctx;
    let n = m.f.rows();
    if !m.f.is_square() || !m.u.is_square() || m.u.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "F is {}x{}, U is {}x{}",
            m.f.rows(),
            m.f.cols(),
            m.u.rows(),
            m.u.cols()
        )));
    }
    if m.f.det(ctx).is_zero() {
        return Err(Error::FNotInvertible);
    }
    let lhs = m.u.mul(ctx, &m.f);
    let rhs = m.f.mul(ctx, &m.u).scale(ctx, ctx.q_img());
    if lhs != rhs {
        return Err(Error::RelationViolated);
    }
    if m.f.is_diagonal() {
        return Ok(());
    }
    let chi = m.f.charpoly(ctx);
    let semisimple = m.f.eval_poly(ctx, &chi.radical(ctx)).is_zero();
    if !semisimple {
        return Err(Error::NotSemisimple);
    }
    if chi.roots(ctx).len() < n {
        return Err(Error::NeedsLargerField(
            "Frobenius eigenvalues outside the context field".into(),
        ));
    }
    Ok(())
}

/// Semisimple and nilpotent parts of `u`, by Newton iteration on the
/// squarefree part of the characteristic polynomial.
pub fn jordan_chevalley(ctx: &FieldCtx, u: &Matrix) -> Result<JordanPair> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch("operator must be square".into()));
    }
    let p = u.charpoly(ctx).radical(ctx);
    let dp = p.derivative(ctx);
    let mut d = u.clone();
    loop {
        let pd = d.eval_poly(ctx, &p);
        if pd.is_zero() {
            break;
        }
        let step = pd.mul(ctx, &d.eval_poly(ctx, &dp).inverse(ctx)?);
        d = d.sub(ctx, &step);
    }
    let n = u.sub(ctx, &d);
    Ok(JordanPair { d, n })
}

fn unram_value(line: &Line) -> Result<FieldElem> {
    match line.base() {
        IrredRep::Char(t) => Ok(*t),
        IrredRep::Abstract(_) => Err(Error::RamifiedLine),
    }
}

fn lower_shift(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for j in 0..n.saturating_sub(1) {
        m[(j + 1, j)] = FieldElem::ONE;
    }
    m
}

/// The cyclic shift on `o` twists: `e_k -> e_{k+1}`, `e_{o-1} -> e_0`.
fn cycle_matrix(o: usize) -> Matrix {
    let mut m = lower_shift(o);
    m[(0, o - 1)] = FieldElem::ONE;
    m
}

fn realize_indec(ctx: &FieldCtx, x: &Indec) -> Result<(Matrix, Matrix)> {
    let t = unram_value(x.line())?;
    match x {
        Indec::Seg { r, a, .. } => {
            let r = *r as usize;
            let diag: Vec<FieldElem> = (0..r)
                .map(|j| ctx.mul(t, ctx.nu_pow(*a as i64 + j as i64)))
                .collect();
            Ok((Matrix::diag(&diag), lower_shift(r)))
        }
        Indec::Cyc { line, r } => {
            let (r, o) = (*r as usize, line.order() as usize);
            let outer: Vec<FieldElem> = (0..r).map(|i| ctx.nu_pow(i as i64)).collect();
            let inner: Vec<FieldElem> = (0..o).map(|k| ctx.mul(t, ctx.nu_pow(k as i64))).collect();
            let f = Matrix::diag(&outer).kron(ctx, &Matrix::diag(&inner));
            let u = lower_shift(r)
                .kron(ctx, &Matrix::identity(o))
                .add(ctx, &Matrix::identity(r).kron(ctx, &cycle_matrix(o)));
            Ok((f, u))
        }
    }
}

/// Block-diagonal realization, one block per indecomposable summand in order.
pub fn realize(ctx: &FieldCtx, a: &DeligneClass) -> Result<MatrixDeligne> {
    let mut fs = Vec::new();
    let mut us = Vec::new();
    for (x, m) in a.iter() {
        let (f, u) = realize_indec(ctx, x)?;
        for _ in 0..m {
            fs.push(f.clone());
            us.push(u.clone());
        }
    }
    Ok(MatrixDeligne::new(
        ctx,
        Matrix::block_diag(&fs),
        Matrix::block_diag(&us),
    ))
}

/// The operator restricted to twist-graded pieces of one line.
struct GradedLine {
    line: Line,
    dims: Vec<usize>,
    /// `maps[g]` sends grade `g` to grade `g + 1 mod o`.
    maps: Vec<Matrix>,
}

impl GradedLine {
    fn order(&self) -> usize {
        self.dims.len()
    }

    fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    fn map(&self, g: usize) -> &Matrix {
        &self.maps[g % self.order()]
    }

    /// Stable kernel of the operator within grade `h`, as columns.
    fn nilpotent_part(&self, ctx: &FieldCtx, h: usize) -> Matrix {
        let mut m = Matrix::identity(self.dims[h]);
        for s in 0..self.total() {
            m = self.map(h + s).mul(ctx, &m);
        }
        m.kernel(ctx)
    }

    /// Return map `V_0 -> V_0` around the cycle.
    fn monodromy(&self, ctx: &FieldCtx) -> Matrix {
        let mut m = Matrix::identity(self.dims[0]);
        for g in 0..self.order() {
            m = self.map(g).mul(ctx, &m);
        }
        m
    }

    /// Basis of the stable image of the monodromy.
    fn bijective_part(&self, ctx: &FieldCtx) -> Matrix {
        let t0 = self.monodromy(ctx);
        t0.pow(ctx, self.dims[0] as u64).column_basis(ctx)
    }
}

/// Splits the space by lines and twist grades of the Frobenius eigenvalues.
fn graded_lines(m: &MatrixDeligne) -> Result<Vec<GradedLine>> {
    validate(m)?;
    let ctx = &m.ctx;
    let n = m.dim();
    // eigenvectors grouped by (line, grade)
    let mut groups: BTreeMap<(Line, u32), Vec<Vec<FieldElem>>> = BTreeMap::new();
    if m.f.is_diagonal() {
        for i in 0..n {
            let key = locate(ctx, &IrredRep::unram(m.f[(i, i)]));
            let mut v = vec![FieldElem::ZERO; n];
            v[i] = FieldElem::ONE;
            groups.entry(key).or_default().push(v);
        }
    } else {
        for lam in distinct_roots(ctx, &m.f.charpoly(ctx)) {
            let shifted = m.f.sub(ctx, &Matrix::identity(n).scale(ctx, lam));
            let basis = shifted.kernel(ctx);
            let key = locate(ctx, &IrredRep::unram(lam));
            let entry = groups.entry(key).or_default();
            for j in 0..basis.cols() {
                entry.push(basis.col(j));
            }
        }
    }
    let mut order: Vec<(Line, Vec<usize>)> = Vec::new();
    let mut cols = Vec::new();
    for ((line, g), vecs) in groups {
        if order.last().map(|(l, _)| l != &line).unwrap_or(true) {
            let o = line.order() as usize;
            order.push((line.clone(), vec![0; o]));
        }
        order.last_mut().expect("pushed").1[g as usize] = vecs.len();
        cols.extend(vecs);
    }
    let p = Matrix::from_cols(n, &cols);
    let u = if m.f.is_diagonal() && p == Matrix::identity(n) {
        m.u.clone()
    } else {
        p.inverse(ctx)?.mul(ctx, &m.u).mul(ctx, &p)
    };
    let mut out = Vec::new();
    let mut offset = 0;
    for (line, dims) in order {
        let o = dims.len();
        let starts: Vec<usize> = dims
            .iter()
            .scan(offset, |acc, &d| {
                let s = *acc;
                *acc += d;
                Some(s)
            })
            .collect();
        let range = |g: usize| -> Vec<usize> { (starts[g]..starts[g] + dims[g]).collect() };
        let maps = (0..o)
            .map(|g| u.select(&range((g + 1) % o), &range(g)))
            .collect();
        offset += dims.iter().sum::<usize>();
        out.push(GradedLine { line, dims, maps });
    }
    Ok(out)
}

fn decompose_line(ctx: &FieldCtx, gl: &GradedLine) -> Result<DeligneClass> {
    let o = gl.order();
    let n = gl.total();
    // rho[h][j] = rank of U^j on the nilpotent part of grade h
    let mut rho = vec![vec![0usize; n + 2]; o];
    for (h, row) in rho.iter_mut().enumerate() {
        let mut x = gl.nilpotent_part(ctx, h);
        row[0] = x.cols();
        for j in 1..=n {
            if row[j - 1] == 0 {
                break;
            }
            x = gl.map(h + j - 1).mul(ctx, &x);
            row[j] = x.rank(ctx);
        }
    }
    let idx = |g: usize, j: usize| (g + o * (n + 1) - j % o) % o;
    // strings ending in grade g whose length exceeds j
    let ending = |g: usize, j: usize| -> usize {
        let h = idx(g, j);
        rho[h][j] - rho[h][j + 1]
    };
    let mut out = DeligneClass::new();
    for g in 0..o {
        for r in 1..=n {
            let count = ending(g, r - 1) - ending(g, r);
            if count > 0 {
                let a = ((g + o * n + 1 - r) % o) as u32;
                out.insert(
                    Indec::Seg {
                        line: gl.line.clone(),
                        r: r as u32,
                        a,
                    },
                    count as u64,
                );
            }
        }
    }
    if gl.dims[0] > 0 {
        let w = gl.bijective_part(ctx);
        if w.cols() > 0 {
            let t = w.solve(ctx, &gl.monodromy(ctx).mul(ctx, &w))?;
            let nil = jordan_chevalley(ctx, &t)?.n;
            let k = t.rows();
            let mut ranks = vec![0usize; k + 2];
            let mut p = Matrix::identity(k);
            ranks[0] = k;
            for s in 1..=k {
                p = p.mul(ctx, &nil);
                ranks[s] = p.rank(ctx);
            }
            for s in 1..=k {
                let mult = ranks[s - 1] + ranks[s + 1] - 2 * ranks[s];
                if mult > 0 {
                    out.insert(
                        Indec::Cyc {
                            line: gl.line.clone(),
                            r: s as u32,
                        },
                        mult as u64,
                    );
                }
            }
        }
    }
    Ok(out)
}

/// The normalized class of a valid pair.
pub fn decompose(m: &MatrixDeligne) -> Result<DeligneClass> {
    let mut out = DeligneClass::new();
    for gl in graded_lines(m)? {
        out = dsum(&out, &decompose_line(&m.ctx, &gl)?);
    }
    Ok(out)
}

/// Jordan-Hoelder constituents: characters and full cycles.
pub fn semisimplify(m: &MatrixDeligne) -> Result<DeligneClass> {
    let ctx = &m.ctx;
    let mut out = DeligneClass::new();
    for gl in graded_lines(m)? {
        for g in 0..gl.order() {
            let k = gl.nilpotent_part(ctx, g).cols() as u64;
            out.insert(
                Indec::Seg {
                    line: gl.line.clone(),
                    r: 1,
                    a: g as u32,
                },
                k,
            );
        }
        if gl.dims[0] > 0 {
            let w = gl.bijective_part(ctx).cols() as u64;
            out.insert(
                Indec::Cyc {
                    line: gl.line.clone(),
                    r: 1,
                },
                w,
            );
        }
    }
    Ok(out)
}

/// An invertible `p` commuting with `f` and with `p (lambda u) = u p`.
pub fn rescale_witness(m: &MatrixDeligne, lambda: FieldElem) -> Result<Matrix> {
    let ctx = &m.ctx;
    validate(m)?;
    if lambda.is_zero() {
        return Err(Error::InvalidInput("scalar must be nonzero".into()));
    }
    let n = m.dim();
    if !m.u.pow(ctx, n as u64).is_zero() {
        return Err(Error::NotNilpotent);
    }
    let eigen: Vec<FieldElem> = if m.f.is_diagonal() {
        let mut v: Vec<FieldElem> = (0..n).map(|i| m.f[(i, i)]).collect();
        v.sort();
        v.dedup();
        v
    } else {
        distinct_roots(ctx, &m.f.charpoly(ctx))
    };
    let height = (0..=n)
        .find(|&h| m.u.pow(ctx, h as u64).is_zero())
        .expect("nilpotent");
    // chain tops with their heights
    let mut tops: Vec<(Vec<FieldElem>, usize)> = Vec::new();
    for h in (1..=height).rev() {
        let lower = m.u.pow(ctx, (h - 1) as u64);
        let mut span = lower.kernel(ctx);
        for (v, r) in &tops {
            let mut w = Matrix::from_cols(n, &[v.clone()]);
            w = m.u.pow(ctx, (r - h) as u64).mul(ctx, &w);
            span = span.hstack(&w);
        }
        let mut rank = span.rank(ctx);
        let upper = m.u.pow(ctx, h as u64);
        for &lam in &eigen {
            let shifted = m.f.sub(ctx, &Matrix::identity(n).scale(ctx, lam));
            let stacked = Matrix::from_rows(
                (0..n)
                    .map(|i| shifted.row(i).to_vec())
                    .chain((0..n).map(|i| upper.row(i).to_vec()))
                    .collect(),
            )?;
            let cand = stacked.kernel(ctx);
            for j in 0..cand.cols() {
                let v = cand.col(j);
                let trial = span.hstack(&Matrix::from_cols(n, &[v.clone()]));
                let tr = trial.rank(ctx);
                if tr > rank {
                    span = trial;
                    rank = tr;
                    tops.push((v, h));
                }
            }
        }
    }
    let mut basis = Vec::new();
    let mut scales = Vec::new();
    for (v, r) in &tops {
        let mut w = Matrix::from_cols(n, &[v.clone()]);
        for j in 0..*r {
            basis.push(w.col(0));
            scales.push(ctx.powu(lambda, (r - 1 - j) as u64));
            w = m.u.mul(ctx, &w);
        }
    }
    let b = Matrix::from_cols(n, &basis);
    Ok(b.mul(ctx, &Matrix::diag(&scales)).mul(ctx, &b.inverse(ctx)?))
}

/// `(f (x) f', u (x) 1 + 1 (x) u')`.
pub fn raw_tensor(m: &MatrixDeligne, other: &MatrixDeligne) -> Result<MatrixDeligne> {
    if m.ctx != other.ctx {
        return Err(Error::ContextMismatch);
    }
    let ctx = &m.ctx;
    let (n, k) = (m.dim(), other.dim());
    let f = m.f.kron(ctx, &other.f);
    let u = m
        .u
        .kron(ctx, &Matrix::identity(k))
        .add(ctx, &Matrix::identity(n).kron(ctx, &other.u));
    Ok(MatrixDeligne::new(ctx, f, u))
}

/// Contragredient pair `(f^-T, -u^T)`.
pub fn dual_matrix(m: &MatrixDeligne) -> Result<MatrixDeligne> {
    let ctx = &m.ctx;
    let f = m.f.inverse(ctx).map_err(|_| Error::FNotInvertible)?.transpose();
    let u = m.u.transpose().scale(ctx, ctx.neg(FieldElem::ONE));
    Ok(MatrixDeligne::new(ctx, f, u))
}

/// `1 / det(1 - X f)` on the kernel of `u`.
pub fn l_factor_matrix(m: &MatrixDeligne) -> Result<RationalFraction> {
    validate(m)?;
    let ctx = &m.ctx;
    let k = m.u.kernel(ctx);
    if k.cols() == 0 {
        return Ok(RationalFraction::one());
    }
    let restricted = k.solve(ctx, &m.f.mul(ctx, &k))?;
    let chi = restricted.charpoly(ctx);
    let d = chi.degree().unwrap_or(0);
    let reversed = Poly::from_coeffs((0..=d).map(|i| chi.coeff(d - i)).collect());
    RationalFraction::new(ctx, LaurentPoly::one(), LaurentPoly::from_poly(reversed))
}

/// Whether `lambda a + mu b` is nonzero and injective in `(a, b)`.
fn admissible(ctx: &FieldCtx, lam: FieldElem, mu: FieldElem, a: &[FieldElem], b: &[FieldElem]) -> bool {
    let mut seen = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            let s = ctx.add(ctx.mul(lam, x), ctx.mul(mu, y));
            if s.is_zero() || seen.contains(&s) {
                return false;
            }
            seen.push(s);
        }
    }
    true
}

fn nonzero_spectrum(ctx: &FieldCtx, d: &Matrix) -> Result<Vec<FieldElem>> {
    let p = d.charpoly(ctx).radical(ctx);
    let roots = distinct_roots(ctx, &p);
    if roots.len() < p.degree().unwrap_or(0) {
        return Err(Error::NeedsLargerField("operator eigenvalues".into()));
    }
    Ok(roots.into_iter().filter(|x| !x.is_zero()).collect())
}

/// Scalars `(lambda, mu)` in the admissible set, by increasing discrete logs.
fn search_scalars(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Option<(FieldElem, FieldElem)> {
    let units = ctx.size() as u64 - 1;
    for i in 0..units {
        for j in 0..units {
            let (lam, mu) = (ctx.exp_gen(i), ctx.exp_gen(j));
            if admissible(ctx, lam, mu, a, b) {
                return Some((lam, mu));
            }
        }
    }
    None
}

/// Maps every line of a class computed in a larger field back to `ctx`.
fn pull_class(emb: &Embedding, ctx: &FieldCtx, c: &DeligneClass) -> Result<DeligneClass> {
    let big = emb.target();
    let mut out = DeligneClass::new();
    for (x, m) in c.iter() {
        let t = unram_value(x.line())?;
        let small = emb
            .pull(t)
            .ok_or_else(|| Error::NeedsLargerField("eigenvalue outside the base field".into()))?;
        let psi = IrredRep::unram(small);
        let y = match x {
            Indec::Seg { r, a, .. } => Indec::seg(ctx, &psi, *r, *a as i64)?,
            Indec::Cyc { r, .. } => Indec::cyc(ctx, &psi, *r)?,
        };
        let _ = big;
        out.insert(y, m);
    }
    Ok(out)
}

fn oracle_pair(ctx: &FieldCtx, x: &Indec, y: &Indec) -> Result<DeligneClass> {
    let (f1, u1) = realize_indec(ctx, x)?;
    let (f2, u2) = realize_indec(ctx, y)?;
    let mut ext = 1u32;
    loop {
        let big = if ext == 1 {
            ctx.clone()
        } else {
            make_ctx(ctx.ell(), ctx.q_residue(), ctx.ext_deg() * ext)?
        };
        let emb = Embedding::new(ctx, &big)?;
        let lift = |m: &Matrix| m.map(|v| emb.map(v));
        let (f1, u1, f2, u2) = (lift(&f1), lift(&u1), lift(&f2), lift(&u2));
        let jc1 = jordan_chevalley(&big, &u1)?;
        let jc2 = jordan_chevalley(&big, &u2)?;
        let a = nonzero_spectrum(&big, &jc1.d)?;
        let b = nonzero_spectrum(&big, &jc2.d)?;
        if let Some((lam, mu)) = search_scalars(&big, &a, &b) {
            let left = MatrixDeligne::new(
                &big,
                f1,
                jc1.n.add(&big, &jc1.d.scale(&big, lam)),
            );
            let right = MatrixDeligne::new(
                &big,
                f2,
                jc2.n.add(&big, &jc2.d.scale(&big, mu)),
            );
            let c = decompose(&raw_tensor(&left, &right)?)?;
            return if ext == 1 { Ok(c) } else { pull_class(&emb, ctx, &c) };
        }
        ext *= 2;
        if ext > 16 {
            return Err(Error::NeedsLargerField("no admissible scalars".into()));
        }
    }
}

/// Semisimple tensor product computed on explicit matrices at admissible
/// operator scalings, summand by summand.
pub fn oracle_tensor_ss(ctx: &FieldCtx, a: &DeligneClass, b: &DeligneClass) -> Result<DeligneClass> {
    let mut out = DeligneClass::new();
    for (x, mx) in a.iter() {
        for (y, my) in b.iter() {
            let c = oracle_pair(ctx, x, y)?;
            out = dsum(&out, &c.scale(mx * my));
        }
    }
    Ok(out)
}
