//! Equivalence classes of Frobenius-semisimple Deligne representations in
//! normal form: finite multisets of segments `[0,r-1] (x) nu^a Psi` and
//! cycles `[0,r-1] (x) C(Z_Psi)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::Matrix;
use crate::weil::{dual_irr, locate, twist_by_char, FusionTable, IrredRep, Line};

/// An indecomposable class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Indec {
    /// Length-`r` segment starting at `nu^a base(line)`: the operator maps the
    /// `nu^{a+j}` constituent to the `nu^{a+j+1}` one and kills the last.
    Seg { line: Line, r: u32, a: u32 },
    /// Cycle on the whole line, with a length-`r` segment factor.
    Cyc { line: Line, r: u32 },
}

impl Indec {
    fn sort_key(&self) -> (&Line, u8, u32, u32) {
        match self {
            Indec::Seg { line, r, a } => (line, 0, *r, *a),
            Indec::Cyc { line, r } => (line, 1, *r, 0),
        }
    }

    /// `[0,r-1] (x) nu^a psi`, normalized.
    pub fn seg(ctx: &FieldCtx, psi: &IrredRep, r: u32, a: i64) -> Result<Indec> {
        psi.validate(ctx)?;
        if r == 0 {
            return Err(Error::InvalidInput("segment length must be positive".into()));
        }
        let (line, shift) = locate(ctx, psi);
        let a = (shift as i64 + a).rem_euclid(line.order() as i64) as u32;
        Ok(Indec::Seg { line, r, a })
    }

    /// `[0,r-1] (x) C(Z_psi)`.
    pub fn cyc(ctx: &FieldCtx, psi: &IrredRep, r: u32) -> Result<Indec> {
        psi.validate(ctx)?;
        if r == 0 {
            return Err(Error::InvalidInput("cycle length must be positive".into()));
        }
        Ok(Indec::Cyc {
            line: Line::of(ctx, psi),
            r,
        })
    }

    pub fn line(&self) -> &Line {
        match self {
            Indec::Seg { line, .. } | Indec::Cyc { line, .. } => line,
        }
    }

    pub fn r(&self) -> u32 {
        match self {
            Indec::Seg { r, .. } | Indec::Cyc { r, .. } => *r,
        }
    }

    pub fn is_seg(&self) -> bool {
        matches!(self, Indec::Seg { .. })
    }

    pub fn dim(&self) -> u64 {
        match self {
            Indec::Seg { line, r, .. } => *r as u64 * line.dim() as u64,
            Indec::Cyc { line, r } => *r as u64 * line.order() as u64 * line.dim() as u64,
        }
    }

    /// Irreducible Weil-group constituents as `(twist mod o, count)` on the line.
    pub fn constituents(&self) -> Vec<(u32, u64)> {
        match self {
            Indec::Seg { line, r, a } => {
                let o = line.order();
                let mut counts = vec![0u64; o as usize];
                for j in 0..*r {
                    counts[((a + j) % o) as usize] += 1;
                }
                counts
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c > 0)
                    .map(|(k, c)| (k as u32, c))
                    .collect()
            }
            Indec::Cyc { line, r } => (0..line.order()).map(|k| (k, *r as u64)).collect(),
        }
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        match self {
            Indec::Seg { line, r, a } => {
                format!("seg({}; r={}; a={})", line.base().render(ctx), r, a)
            }
            Indec::Cyc { line, r } => format!("cyc({}; r={})", line.render(ctx), r),
        }
    }
}

impl Ord for Indec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Indec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Unnormalized indecomposable, as written by a user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawIndec {
    Seg { irr: IrredRep, r: u32, a: i64 },
    Cyc { irr: IrredRep, r: u32 },
}

/// A class in normal form: a sorted multiset of indecomposables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeligneClass {
    items: BTreeMap<Indec, u64>,
}

impl DeligneClass {
    pub fn new() -> Self {
        DeligneClass::default()
    }

    pub fn from_indecs(items: impl IntoIterator<Item = (Indec, u64)>) -> Self {
        let mut c = DeligneClass::new();
        for (x, m) in items {
            c.insert(x, m);
        }
        c
    }

    pub fn single(x: Indec) -> Self {
        DeligneClass::from_indecs([(x, 1)])
    }

    pub fn insert(&mut self, x: Indec, m: u64) {
        if m > 0 {
            *self.items.entry(x).or_insert(0) += m;
        }
    }

    /// Drops one copy of `x`, if present.
    pub fn remove_one(&mut self, x: &Indec) {
        if let Some(m) = self.items.get_mut(x) {
            *m -= 1;
            if *m == 0 {
                self.items.remove(x);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Indec, u64)> {
        self.items.iter().map(|(x, &m)| (x, m))
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn multiplicity(&self, x: &Indec) -> u64 {
        self.items.get(x).copied().unwrap_or(0)
    }

    /// Number of indecomposable summands counted with multiplicity.
    pub fn count(&self) -> u64 {
        self.items.values().sum()
    }

    pub fn dim(&self) -> u64 {
        self.iter().map(|(x, m)| x.dim() * m).sum()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.items.keys().all(Indec::is_seg)
    }

    pub fn is_unramified(&self) -> bool {
        self.items.keys().all(|x| !x.line().is_ramified())
    }

    pub fn lines(&self) -> BTreeSet<Line> {
        self.items.keys().map(|x| x.line().clone()).collect()
    }

    pub fn restrict(&self, line: &Line) -> DeligneClass {
        DeligneClass::from_indecs(
            self.iter()
                .filter(|(x, _)| x.line() == line)
                .map(|(x, m)| (x.clone(), m)),
        )
    }

    pub fn scale(&self, k: u64) -> DeligneClass {
        DeligneClass::from_indecs(self.iter().map(|(x, m)| (x.clone(), m * k)))
    }

    /// Weil-group constituents `(line, twist) -> multiplicity`.
    pub fn constituents(&self) -> BTreeMap<(Line, u32), u64> {
        let mut out = BTreeMap::new();
        for (x, m) in self.iter() {
            for (k, c) in x.constituents() {
                *out.entry((x.line().clone(), k)).or_insert(0) += c * m;
            }
        }
        out
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        if self.is_empty() {
            return "{}".into();
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(x, m)| {
                if m == 1 {
                    x.render(ctx)
                } else {
                    format!("{}*{}", x.render(ctx), m)
                }
            })
            .collect();
        format!("{{ {} }}", parts.join(", "))
    }
}

pub fn normalize(ctx: &FieldCtx, raw: &[(RawIndec, u64)]) -> Result<DeligneClass> {
    let mut c = DeligneClass::new();
    for (x, m) in raw {
        let ind = match x {
            RawIndec::Seg { irr, r, a } => Indec::seg(ctx, irr, *r, *a)?,
            RawIndec::Cyc { irr, r } => Indec::cyc(ctx, irr, *r)?,
        };
        c.insert(ind, *m);
    }
    Ok(c)
}

pub fn dsum(a: &DeligneClass, b: &DeligneClass) -> DeligneClass {
    let mut c = a.clone();
    for (x, m) in b.iter() {
        c.insert(x.clone(), m);
    }
    c
}

pub fn dual_indec(ctx: &FieldCtx, x: &Indec) -> Indec {
    match x {
        Indec::Seg { line, r, a } => {
            let d = dual_irr(ctx, line.base());
            Indec::seg(ctx, &d, *r, -(*a as i64) - *r as i64 + 1).expect("valid input")
        }
        Indec::Cyc { line, r } => Indec::Cyc {
            line: line.dual(ctx),
            r: *r,
        },
    }
}

pub fn dual_class(ctx: &FieldCtx, a: &DeligneClass) -> DeligneClass {
    DeligneClass::from_indecs(a.iter().map(|(x, m)| (dual_indec(ctx, x), m)))
}

/// Twisting data: a power of `nu` or an unramified character `chi_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    Nu(i64),
    Char(FieldElem),
}

pub fn twist_indec(ctx: &FieldCtx, x: &Indec, by: Twist) -> Indec {
    match (x, by) {
        (Indec::Seg { line, r, a }, Twist::Nu(k)) => {
            Indec::seg(ctx, line.base(), *r, *a as i64 + k).expect("valid input")
        }
        (Indec::Seg { line, r, a }, Twist::Char(s)) => {
            Indec::seg(ctx, &twist_by_char(ctx, line.base(), s), *r, *a as i64)
                .expect("valid input")
        }
        (Indec::Cyc { .. }, Twist::Nu(_)) => x.clone(),
        (Indec::Cyc { line, r }, Twist::Char(s)) => Indec::Cyc {
            line: line.twist_by_char(ctx, s),
            r: *r,
        },
    }
}

pub fn twist_class(ctx: &FieldCtx, a: &DeligneClass, by: Twist) -> Result<DeligneClass> {
    if let Twist::Char(s) = by {
        if s.is_zero() {
            return Err(Error::InvalidInput("twisting character must be nonzero".into()));
        }
    }
    Ok(DeligneClass::from_indecs(
        a.iter().map(|(x, m)| (twist_indec(ctx, x, by), m)),
    ))
}

fn binomials_mod(ell: u64, n: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = 1 % ell;
        for j in 1..=i {
            b[i][j] = (b[i - 1][j - 1] + b[i - 1][j]) % ell;
        }
    }
    b
}

/// Intervals `[c, d]` of the graded decomposition of `[0,n-1] (x) [0,m-1]`
/// under `N_n (x) 1 + 1 (x) N_m`, read off from ranks over the prime field.
pub fn seg_tensor_profile(ctx: &FieldCtx, n: u32, m: u32) -> Vec<(u32, u32)> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, u32), Vec<(u32, u32)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (ctx.ell(), n, m);
    if let Some(p) = cache.lock().expect("profile cache poisoned").get(&key) {
        return p.clone();
    }
    let p = compute_profile(ctx, n, m);
    cache
        .lock()
        .expect("profile cache poisoned")
        .insert(key, p.clone());
    p
}

fn compute_profile(ctx: &FieldCtx, n: u32, m: u32) -> Vec<(u32, u32)> {
    assert!(n >= 1 && m >= 1, "segment lengths are positive");
    let (n, m) = (n as i64, m as i64);
    let top = n + m - 2;
    let binom = binomials_mod(ctx.ell(), (top + 1) as usize);
    // basis of the degree-d piece: pairs (a, d - a)
    let piece = |d: i64| -> Vec<i64> {
        if d < 0 || d > top {
            return Vec::new();
        }
        ((d - m + 1).max(0)..=d.min(n - 1)).collect()
    };
    let rank = |d: i64, j: i64| -> i64 {
        let src = piece(d);
        if src.is_empty() || j < 0 {
            return 0;
        }
        if j == 0 {
            return src.len() as i64;
        }
        let dst = piece(d + j);
        if dst.is_empty() {
            return 0;
        }
        let mut mat = Matrix::zeros(dst.len(), src.len());
        for (col, &a) in src.iter().enumerate() {
            for (row, &a2) in dst.iter().enumerate() {
                let i = a2 - a;
                if (0..=j).contains(&i) {
                    mat[(row, col)] = ctx.from_int(binom[j as usize][i as usize] as i64);
                }
            }
        }
        mat.rank(ctx) as i64
    };
    let mut out = Vec::new();
    for d in 0..=top {
        for e in d..=top {
            let mult = rank(d, e - d) - rank(d - 1, e - d + 1) - rank(d, e - d + 1)
                + rank(d - 1, e - d + 2);
            debug_assert!(mult >= 0, "interval multiplicities are nonnegative");
            for _ in 0..mult {
                out.push((d as u32, e as u32));
            }
        }
    }
    out
}

fn tensor_indec(
    ctx: &FieldCtx,
    x: &Indec,
    y: &Indec,
    table: &FusionTable,
) -> Result<DeligneClass> {
    let profile = seg_tensor_profile(ctx, x.r(), y.r());
    let fused = table.fuse(ctx, x.line().base(), y.line().base())?;
    let mut out = DeligneClass::new();
    if let (Indec::Seg { a, .. }, Indec::Seg { a: b, .. }) = (x, y) {
        for (k, theta) in &fused {
            for &(c, d) in &profile {
                let shift = *a as i64 + *b as i64 + c as i64 + k;
                out.insert(Indec::seg(ctx, theta, d - c + 1, shift)?, 1);
            }
        }
        return Ok(out);
    }
    // At least one cycle: the result is bijective. Collect the Weil-group
    // constituents of the irreducible parts and split them into full lines.
    let shifts = |z: &Indec| -> Vec<i64> {
        match z {
            Indec::Seg { a, .. } => vec![*a as i64],
            Indec::Cyc { line, .. } => (0..line.order() as i64).collect(),
        }
    };
    let mut counts: BTreeMap<Line, Vec<u64>> = BTreeMap::new();
    for (k, theta) in &fused {
        for i in shifts(x) {
            for j in shifts(y) {
                let (line, tw) = locate(ctx, &crate::weil::twist(ctx, theta, i + j + k));
                let o = line.order() as usize;
                counts.entry(line).or_insert_with(|| vec![0; o])[tw as usize] += 1;
            }
        }
    }
    for (line, per_twist) in counts {
        let c = per_twist[0];
        if per_twist.iter().any(|&v| v != c) {
            return Err(Error::InconsistentFusion(format!(
                "constituents on {} do not form full orbits",
                line.render(ctx)
            )));
        }
        for &(lo, hi) in &profile {
            out.insert(
                Indec::Cyc {
                    line: line.clone(),
                    r: hi - lo + 1,
                },
                c,
            );
        }
    }
    Ok(out)
}

/// Semisimple tensor product, extended bilinearly over direct sums.
pub fn tensor_ss(
    ctx: &FieldCtx,
    a: &DeligneClass,
    b: &DeligneClass,
    table: &FusionTable,
) -> Result<DeligneClass> {
    let mut out = DeligneClass::new();
    for (x, mx) in a.iter() {
        for (y, my) in b.iter() {
            let t = tensor_indec(ctx, x, y, table)?;
            out = dsum(&out, &t.scale(mx * my));
        }
    }
    Ok(out)
}

/// Splits a nilpotent class on one line into its acyclic part and the
/// segments forming full twist orbits.
pub fn split_cyclic(a: &DeligneClass) -> Result<(DeligneClass, DeligneClass)> {
    if !a.is_nilpotent() {
        return Err(Error::ContainsCyc);
    }
    let lines = a.lines();
    if lines.len() > 1 {
        return Err(Error::MixedLines);
    }
    let Some(line) = lines.into_iter().next() else {
        return Ok((DeligneClass::new(), DeligneClass::new()));
    };
    let o = line.order();
    let lengths: BTreeSet<u32> = a.iter().map(|(x, _)| x.r()).collect();
    let mut acyclic = a.clone();
    let mut cyclic = DeligneClass::new();
    for r in lengths {
        let seg = |k: u32| Indec::Seg {
            line: line.clone(),
            r,
            a: k,
        };
        let b = (0..o).map(|k| a.multiplicity(&seg(k))).min().unwrap_or(0);
        if b == 0 {
            continue;
        }
        for k in 0..o {
            cyclic.insert(seg(k), b);
            let e = acyclic.items.get_mut(&seg(k)).expect("present");
            *e -= b;
            if *e == 0 {
                acyclic.items.remove(&seg(k));
            }
        }
    }
    Ok((acyclic, cyclic))
}

/// Replaces every full orbit of length-`j` segments by a cycle `[0,j-1] (x) C(Z)`.
pub fn cv_map(a: &DeligneClass) -> Result<DeligneClass> {
    if !a.is_nilpotent() {
        return Err(Error::ContainsCyc);
    }
    let mut out = DeligneClass::new();
    for line in a.lines() {
        let (acyclic, cyclic) = split_cyclic(&a.restrict(&line))?;
        out = dsum(&out, &acyclic);
        let o = line.order() as u64;
        let mut per_len: BTreeMap<u32, u64> = BTreeMap::new();
        for (x, m) in cyclic.iter() {
            *per_len.entry(x.r()).or_insert(0) += m;
        }
        for (r, total) in per_len {
            out.insert(
                Indec::Cyc {
                    line: line.clone(),
                    r,
                },
                total / o,
            );
        }
    }
    Ok(out)
}

/// A formal character value: an unramified part and a product of determinants
/// of abstract irreducibles, keyed by label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    pub finite: BTreeMap<String, i64>,
    pub unram: FieldElem,
}

impl Character {
    pub fn trivial() -> Self {
        Character {
            finite: BTreeMap::new(),
            unram: FieldElem::ONE,
        }
    }

    pub fn unramified(t: FieldElem) -> Self {
        Character {
            finite: BTreeMap::new(),
            unram: t,
        }
    }

    fn mul_label(&mut self, label: &str, dual_label: &str, e: i64) {
        let (key, e, modulus) = if label == dual_label {
            (label, e, Some(2))
        } else if label < dual_label {
            (label, e, None)
        } else {
            (dual_label, -e, None)
        };
        let v = self.finite.entry(key.to_string()).or_insert(0);
        *v += e;
        if let Some(m) = modulus {
            *v = v.rem_euclid(m);
        }
        if *v == 0 {
            self.finite.remove(key);
        }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Character) -> Character {
        let mut out = self.clone();
        out.unram = ctx.mul(self.unram, other.unram);
        for (k, &e) in &other.finite {
            let v = out.finite.entry(k.clone()).or_insert(0);
            *v += e;
        }
        out.finite.retain(|_, v| *v != 0);
        out
    }

    /// Determinant of the irreducible `nu^a base(line)`.
    pub fn of_constituent(ctx: &FieldCtx, line: &Line, a: u32) -> Character {
        let member = line.member(ctx, a as i64);
        let mut c = Character::unramified(ctx.powu(member.twist_value(), member.dim() as u64));
        if let IrredRep::Abstract(irr) = &member {
            c.mul_label(&irr.label, &irr.dual_label, 1);
        }
        c
    }

    pub fn render(&self, ctx: &FieldCtx) -> String {
        let mut s = format!("char(unram={}", ctx.format(self.unram));
        for (k, e) in &self.finite {
            s.push_str(&format!("; det({k})^{e}"));
        }
        s.push(')');
        s
    }
}

pub fn det_class(ctx: &FieldCtx, a: &DeligneClass) -> Character {
    let mut out = Character::trivial();
    for ((line, k), m) in a.constituents() {
        let c = Character::of_constituent(ctx, &line, k);
        for _ in 0..m {
            out = out.mul(ctx, &c);
        }
    }
    // self-dual labels only matter modulo 2
    let mut fixed = Character::unramified(out.unram);
    for (k, e) in out.finite {
        let self_dual = a
            .lines()
            .iter()
            .any(|l| matches!(l.base(), IrredRep::Abstract(i) if i.label == k && i.dual_label == k));
        fixed.mul_label(&k, if self_dual { &k } else { "\u{10FFFF}" }, e);
    }
    fixed
}
