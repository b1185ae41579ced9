//! Exact arithmetic in a finite field F_{ell^k}, together with the modular
//! data attached to the residual cardinality q: its image in the field, the
//! multiplicative order of that image and a fixed square root.
//!
//! Elements are stored as integer codes `c_0 + c_1 ell + ... + c_{k-1} ell^{k-1}`
//! of their coefficient vectors in the power basis of the modulus.
//! Multiplication goes through discrete-log tables built once per context,
//! and contexts are cached so rebuilding the same parameters is cheap.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported field size; the log tables are linear in it.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of the context field, identified by its coefficient code.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    ell: u32,
    q_residue: u64,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    generator: FieldElem,
    q_img: FieldElem,
    q_inv: FieldElem,
    o_nu: u32,
    sqrt_q: FieldElem,
}

/// Shared handle to a finite field context. Cloning is cheap.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ell == other.0.ell
                && self.0.degree == other.0.degree
                && self.0.q_residue == other.0.q_residue)
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.header())
    }
}

/// Builds (or fetches from the cache) the context for `(ell, q, ext_deg)`.
/// The degree is doubled until `q mod ell` has a square root in the field.
pub fn make_ctx(ell: u64, q_residue: u64, ext_deg: u32) -> Result<FieldCtx> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u32), FieldCtx>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (ell, q_residue, ext_deg);
    if let Some(ctx) = cache.lock().expect("context cache poisoned").get(&key) {
        return Ok(ctx.clone());
    }
    let ctx = build_ctx(ell, q_residue, ext_deg)?;
    cache
        .lock()
        .expect("context cache poisoned")
        .insert(key, ctx.clone());
    Ok(ctx)
}

fn build_ctx(ell: u64, q_residue: u64, ext_deg: u32) -> Result<FieldCtx> {
    if !is_prime(ell) {
        return Err(Error::NonPrime(ell));
    }
    if q_residue % ell == 0 {
        return Err(Error::QDivisibleByEll { ell, q: q_residue });
    }
    if ext_deg == 0 {
        return Err(Error::InvalidInput("extension degree must be positive".into()));
    }
    let mut degree = ext_deg;
    loop {
        let size = checked_size(ell, degree)?;
        let ell32 = ell as u32;
        let modulus = least_irreducible(ell32, degree);
        let generator = least_primitive(ell32, &modulus, size);
        let (exp, log) = log_tables(ell32, &modulus, size, generator);
        let q_code = (q_residue % ell) as u32;
        let order = size - 1;
        let q_log = log[q_code as usize];
        let sqrt_log = if ell == 2 {
            // squaring is a bijection and 2 is invertible modulo the odd group order
            Some((q_log as u64 * (size as u64 / 2) % order as u64) as u32)
        } else if q_log % 2 == 0 {
            // the two roots have logs q_log/2 and q_log/2 + order/2
            Some(q_log / 2)
        } else {
            None
        };
        let Some(sqrt_log) = sqrt_log else {
            degree *= 2;
            continue;
        };
        let o_nu = order / gcd(q_log, order);
        let q_inv_log = (order - q_log) % order;
        let inner = Inner {
            ell: ell32,
            q_residue,
            degree,
            size,
            modulus,
            q_img: FieldElem(q_code),
            q_inv: FieldElem(exp[q_inv_log as usize]),
            sqrt_q: FieldElem(exp[sqrt_log as usize]),
            generator: FieldElem(generator),
            o_nu,
            exp,
            log,
        };
        return Ok(FieldCtx(Arc::new(inner)));
    }
}

fn checked_size(ell: u64, degree: u32) -> Result<u32> {
    let mut size: u64 = 1;
    for _ in 0..degree {
        size = size.saturating_mul(ell);
        if size > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge { ell, degree });
        }
    }
    Ok(size as u32)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits(mut code: u32, ell: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % ell);
        code /= ell;
    }
    out
}

fn undigits(d: &[u32], ell: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * ell + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over F_ell (coefficients low to high).
fn prime_rem(a: &[u32], m: &[u32], ell: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().expect("nonempty");
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = (lead as u64 * c as u64 % ell as u64) as u32;
                r[shift + i] = (r[shift + i] + ell - sub) % ell;
            }
        }
    }
    r.resize(dm, 0);
    r
}

fn prime_mulmod(a: &[u32], b: &[u32], m: &[u32], ell: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % ell as u64) as u32;
        }
    }
    prime_rem(&prod, m, ell)
}

fn is_irreducible(f: &[u32], ell: u32) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        for code in 0..ell.pow(d as u32) {
            let mut g = digits(code, ell, d);
            g.push(1);
            if prime_rem(f, &g, ell).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Monic irreducible of the given degree whose lower coefficients, read as
/// a base-ell number with the top coefficient most significant, are least.
fn least_irreducible(ell: u32, degree: u32) -> Vec<u32> {
    let k = degree as usize;
    for code in 0..ell.pow(degree) {
        let mut f = digits(code, ell, k);
        f.push(1);
        if is_irreducible(&f, ell) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn code_pow(base: u32, mut e: u64, ell: u32, m: &[u32]) -> Vec<u32> {
    let k = m.len() - 1;
    let mut acc = digits(1, ell, k);
    let mut b = digits(base, ell, k);
    while e > 0 {
        if e & 1 == 1 {
            acc = prime_mulmod(&acc, &b, m, ell);
        }
        b = prime_mulmod(&b, &b, m, ell);
        e >>= 1;
    }
    acc
}

fn least_primitive(ell: u32, m: &[u32], size: u32) -> u32 {
    let order = size - 1;
    let factors = prime_factors(order);
    let one = digits(1, ell, m.len() - 1);
    (1..size)
        .find(|&g| {
            factors
                .iter()
                .all(|&p| code_pow(g, (order / p) as u64, ell, m) != one)
        })
        .expect("finite fields have primitive elements")
}

fn log_tables(ell: u32, m: &[u32], size: u32, generator: u32) -> (Vec<u32>, Vec<u32>) {
    let order = (size - 1) as usize;
    let k = m.len() - 1;
    let g = digits(generator, ell, k);
    let mut exp = vec![0u32; 2 * order.max(1)];
    let mut log = vec![0u32; size as usize];
    let mut cur = digits(1, ell, k);
    for i in 0..order {
        let c = undigits(&cur, ell);
        exp[i] = c;
        log[c as usize] = i as u32;
        cur = prime_mulmod(&cur, &g, m, ell);
    }
    for i in order..2 * order {
        exp[i] = exp[i - order];
    }
    (exp, log)
}

impl FieldCtx {
    pub fn ell(&self) -> u64 {
        self.0.ell as u64
    }

    /// Residual cardinality as supplied by the caller.
    pub fn q_residue(&self) -> u64 {
        self.0.q_residue
    }

    pub fn ext_deg(&self) -> u32 {
        self.0.degree
    }

    /// Number of elements of the field.
    pub fn size(&self) -> u32 {
        self.0.size
    }

    /// Monic modulus, coefficients from low to high degree.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn q_img(&self) -> FieldElem {
        self.0.q_img
    }

    pub fn q_inv(&self) -> FieldElem {
        self.0.q_inv
    }

    /// Multiplicative order of `q_img`, the number of distinct unramified twists.
    pub fn o_nu(&self) -> u32 {
        self.0.o_nu
    }

    pub fn sqrt_q(&self) -> FieldElem {
        self.0.sqrt_q
    }

    /// The least primitive element; discrete logs are taken with respect to it.
    pub fn generator(&self) -> FieldElem {
        self.0.generator
    }

    pub fn header(&self) -> String {
        format!(
            "ctx ell={} q={} k={}",
            self.0.ell, self.0.q_residue, self.0.degree
        )
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.0.ell as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem> {
        if coeffs.len() > self.0.degree as usize {
            return Err(Error::InvalidInput(format!(
                "{} coefficients given for a degree {} field",
                coeffs.len(),
                self.0.degree
            )));
        }
        let ell = self.0.ell as i64;
        let d: Vec<u32> = coeffs.iter().map(|c| c.rem_euclid(ell) as u32).collect();
        Ok(FieldElem(undigits(&d, self.0.ell)))
    }

    pub fn from_code(&self, code: u32) -> Option<FieldElem> {
        (code < self.0.size).then_some(FieldElem(code))
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        digits(x.0, self.0.ell, self.0.degree as usize)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.0.size).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let ell = self.0.ell;
        if ell == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if self.0.degree == 1 {
            return FieldElem((a.0 + b.0) % ell);
        }
        let (mut x, mut y, mut place, mut out) = (a.0, b.0, 1u32, 0u32);
        while x > 0 || y > 0 {
            out += (x % ell + y % ell) % ell * place;
            x /= ell;
            y /= ell;
            place *= ell;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let ell = self.0.ell;
        if ell == 2 {
            return a;
        }
        if self.0.degree == 1 {
            return FieldElem((ell - a.0) % ell);
        }
        let (mut x, mut place, mut out) = (a.0, 1u32, 0u32);
        while x > 0 {
            out += (ell - x % ell) % ell * place;
            x /= ell;
            place *= ell;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let s = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        FieldElem(self.0.exp[s as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.0.size - 1;
        let l = self.0.log[a.0 as usize];
        Ok(FieldElem(self.0.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer exponent; `0^e` with `e < 0` is an error.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        if a.0 == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::DivisionByZero),
                std::cmp::Ordering::Equal => Ok(FieldElem::ONE),
                std::cmp::Ordering::Greater => Ok(FieldElem::ZERO),
            };
        }
        let order = (self.0.size - 1) as i64;
        let l = self.0.log[a.0 as usize] as i64;
        let idx = (l * e.rem_euclid(order)).rem_euclid(order);
        Ok(FieldElem(self.0.exp[idx as usize]))
    }

    /// `a^e` for a nonzero `a`; panics never, treats zero as zero.
    pub fn powu(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let order = (self.0.size - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        FieldElem(self.0.exp[(l * (e % order) % order) as usize])
    }

    /// `q_img^{-k}`, the value of the unramified character nu^k on Frobenius.
    pub fn nu_pow(&self, k: i64) -> FieldElem {
        self.pow(self.0.q_img, -k).expect("q_img is nonzero")
    }

    /// Discrete logarithm with respect to [`FieldCtx::generator`].
    pub fn dlog(&self, a: FieldElem) -> Result<u32> {
        if a.0 == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.0.log[a.0 as usize])
    }

    pub fn exp_gen(&self, e: u64) -> FieldElem {
        let order = (self.0.size - 1) as u64;
        FieldElem(self.0.exp[(e % order) as usize])
    }

    pub fn mult_order(&self, a: FieldElem) -> Result<u32> {
        let l = self.dlog(a)?;
        let order = self.0.size - 1;
        Ok(order / gcd(l, order))
    }

    /// The unique `ell`-th root (Frobenius is bijective on a finite field).
    pub fn frobenius_root(&self, a: FieldElem) -> FieldElem {
        let e = (self.0.size / self.0.ell) as u64;
        self.powu(a, e)
    }

    /// Textual form `[c0,...,c_{k-1}]@F(ell^k)`.
    pub fn format(&self, a: FieldElem) -> String {
        let c: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]@F({}^{})", c.join(","), self.0.ell, self.0.degree)
    }
}

/// A field embedding `source -> target` given by sending the generator of the
/// power basis of `source` to the least root of its modulus in `target`.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FieldCtx,
    target: FieldCtx,
    image: Vec<FieldElem>,
    preimage: HashMap<FieldElem, FieldElem>,
}

impl Embedding {
    pub fn new(source: &FieldCtx, target: &FieldCtx) -> Result<Self> {
        if source.ell() != target.ell() || target.ext_deg() % source.ext_deg() != 0 {
            return Err(Error::InvalidInput(format!(
                "no embedding of F({}^{}) into F({}^{})",
                source.ell(),
                source.ext_deg(),
                target.ell(),
                target.ext_deg()
            )));
        }
        let modulus: Vec<FieldElem> = source.modulus().iter().map(|&c| FieldElem(c)).collect();
        let eval = |x: FieldElem| {
            modulus
                .iter()
                .rev()
                .fold(FieldElem::ZERO, |acc, &c| target.add(target.mul(acc, x), c))
        };
        let root = target
            .elements()
            .find(|&x| eval(x).is_zero())
            .ok_or_else(|| Error::NeedsLargerField("modulus has no root in target".into()))?;
        let mut image = Vec::with_capacity(source.size() as usize);
        let mut preimage = HashMap::new();
        for x in source.elements() {
            let y = source
                .coeffs(x)
                .iter()
                .rev()
                .fold(FieldElem::ZERO, |acc, &c| {
                    target.add(target.mul(acc, root), FieldElem(c))
                });
            image.push(y);
            preimage.insert(y, x);
        }
        Ok(Embedding {
            source: source.clone(),
            target: target.clone(),
            image,
            preimage,
        })
    }

    pub fn source(&self) -> &FieldCtx {
        &self.source
    }

    pub fn target(&self) -> &FieldCtx {
        &self.target
    }

    pub fn map(&self, x: FieldElem) -> FieldElem {
        self.image[x.0 as usize]
    }

    /// Preimage of `y`, if it lies in the image of the embedding.
    pub fn pull(&self, y: FieldElem) -> Option<FieldElem> {
        self.preimage.get(&y).copied()
    }
}
