//! Finite fields given as towers of simple extensions over a prime field.
//!
//! An element is stored as a packed integer holding its coordinate vector
//! over F_p in the tower power basis. The first coordinate is the most
//! significant digit, so integer order on [`FFElem`] is the lexicographic
//! order of coordinate vectors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::poly::Poly;

/// Fields up to this size get log/exp tables for multiplication.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("defining polynomial at tower level {level} is reducible")]
    ReducibleDefiningPolynomial { level: usize },
    #[error("defining polynomial at tower level {level} is not monic of degree >= 1")]
    NotMonic { level: usize },
    #[error("field of order p^{0} does not fit in 63 bits")]
    TooLarge(usize),
    #[error("coordinate vector {0:?} is not valid for this field")]
    BadCoordinates(Vec<u64>),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("argument must be nonzero")]
    ZeroArgument,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FFElem(u64);

impl FFElem {
    pub const ZERO: FFElem = FFElem(0);

    /// Position of the element in lexicographic order.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Level {
    degree: usize,
    /// Absolute degree of the level below.
    base_dim: usize,
    /// Non-leading coefficients of the monic modulus, as elements of the level below.
    modulus: Vec<u64>,
}

struct Tables {
    exp: Vec<u64>,
    log: Vec<u32>,
}

pub struct FieldSpec {
    p: u64,
    levels: Vec<Level>,
    dim: usize,
    order: u64,
    pow_p: Vec<u64>,
    tables: OnceLock<Option<Tables>>,
    generator: OnceLock<FFElem>,
    factors_of_group_order: OnceLock<Vec<u64>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)?;
        for l in &self.levels {
            write!(f, "[deg {}]", l.degree)?;
        }
        Ok(())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.levels == other.levels
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Arc<FieldSpec>, FieldError> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        Ok(Arc::new(Self::build(p, Vec::new())))
    }

    /// Builds a tower from coordinate data: level `k` is a list of coefficients
    /// (ascending, monic) where each coefficient is a coordinate vector over F_p
    /// of an element of level `k-1`.
    pub fn new(p: u64, tower: &[Vec<Vec<u64>>]) -> Result<Arc<FieldSpec>, FieldError> {
        let mut field = Self::prime(p)?;
        for (k, level) in tower.iter().enumerate() {
            let coeffs = level
                .iter()
                .map(|c| field.from_coords(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| FieldError::NotMonic { level: k })?;
            field = field.extend_at(&coeffs, k)?;
        }
        Ok(field)
    }

    fn build(p: u64, levels: Vec<Level>) -> FieldSpec {
        let dim = levels.iter().map(|l| l.degree).product::<usize>();
        let mut pow_p = vec![1u64];
        for _ in 0..dim {
            pow_p.push(pow_p.last().unwrap() * p);
        }
        FieldSpec {
            p,
            levels,
            dim,
            order: pow_p[dim],
            pow_p,
            tables: OnceLock::new(),
            generator: OnceLock::new(),
            factors_of_group_order: OnceLock::new(),
        }
    }

    /// Adjoins a root of the monic polynomial with ascending coefficients `modulus`.
    pub fn extend(self: &Arc<Self>, modulus: &[FFElem]) -> Result<Arc<FieldSpec>, FieldError> {
        self.extend_at(modulus, self.levels.len())
    }

    fn extend_at(
        self: &Arc<Self>,
        modulus: &[FFElem],
        level: usize,
    ) -> Result<Arc<FieldSpec>, FieldError> {
        if modulus.len() < 2 || *modulus.last().unwrap() != self.one() {
            return Err(FieldError::NotMonic { level });
        }
        let degree = modulus.len() - 1;
        let bits = (self.dim * degree) as f64 * (self.p as f64).log2();
        if bits >= 63.0 {
            return Err(FieldError::TooLarge(self.dim * degree));
        }
        let poly = Poly::new(self.clone(), modulus.to_vec());
        if !poly.is_irreducible() {
            return Err(FieldError::ReducibleDefiningPolynomial { level });
        }
        let mut levels = self.levels.clone();
        levels.push(Level {
            degree,
            base_dim: self.dim,
            modulus: modulus[..degree].iter().map(|c| c.0).collect(),
        });
        Ok(Arc::new(Self::build(self.p, levels)))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Cardinality of the field.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Degree over the prime field.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// The field given by the first `k` tower levels.
    pub fn prefix(&self, k: usize) -> Arc<FieldSpec> {
        Arc::new(Self::build(self.p, self.levels[..k].to_vec()))
    }

    /// Whether `self` is a tower prefix of `other`, hence a subfield with compatible coordinates.
    pub fn is_prefix_of(&self, other: &FieldSpec) -> bool {
        self.p == other.p
            && self.levels.len() <= other.levels.len()
            && self.levels[..] == other.levels[..self.levels.len()]
    }

    /// Defining polynomials as coordinate data, inverse to [`FieldSpec::new`].
    pub fn tower_coords(&self) -> Vec<Vec<Vec<u64>>> {
        self.levels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let base = self.prefix(k);
                let mut out: Vec<Vec<u64>> =
                    l.modulus.iter().map(|&c| base.coords(FFElem(c))).collect();
                out.push(base.coords(base.one()));
                out
            })
            .collect()
    }

    pub fn zero(&self) -> FFElem {
        FFElem(0)
    }

    pub fn one(&self) -> FFElem {
        self.from_int(1)
    }

    /// Image of an integer under Z -> F_p -> F.
    pub fn from_int(&self, n: i64) -> FFElem {
        let c = n.rem_euclid(self.p as i64) as u64;
        FFElem(c * self.pow_p[self.dim - 1])
    }

    /// The adjoined root of the top tower level.
    pub fn generator_of_top_level(&self) -> FFElem {
        let top = self
            .levels
            .last()
            .expect("prime field has no adjoined root");
        if top.degree == 1 {
            return self.neg(FFElem(top.modulus[0]));
        }
        FFElem(self.pow_p[self.dim - 1 - top.base_dim])
    }

    pub fn coords(&self, a: FFElem) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        let mut x = a.0;
        for i in (0..self.dim).rev() {
            out[i] = x % self.p;
            x /= self.p;
        }
        out
    }

    pub fn from_coords(&self, c: &[u64]) -> Result<FFElem, FieldError> {
        if c.len() > self.dim || c.iter().any(|&x| x >= self.p) {
            return Err(FieldError::BadCoordinates(c.to_vec()));
        }
        let mut x = 0u64;
        for i in 0..self.dim {
            x = x * self.p + c.get(i).copied().unwrap_or(0);
        }
        Ok(FFElem(x))
    }

    /// Element from its lexicographic index.
    pub fn from_index(&self, i: u64) -> FFElem {
        assert!(i < self.order);
        FFElem(i)
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.order).map(FFElem)
    }

    /// Embeds an element of a prefix subfield.
    pub fn embed(&self, sub: &FieldSpec, a: FFElem) -> FFElem {
        debug_assert!(sub.is_prefix_of(self));
        FFElem(a.0 * self.pow_p[self.dim - sub.dim])
    }

    /// Inverse of [`embed`](Self::embed); `None` when `a` is outside the subfield.
    pub fn project(&self, sub: &FieldSpec, a: FFElem) -> Option<FFElem> {
        let s = self.pow_p[self.dim - sub.dim];
        (a.0 % s == 0).then(|| FFElem(a.0 / s))
    }

    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        if self.dim == 1 {
            return FFElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u64, 1u64);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        FFElem(out)
    }

    pub fn neg(&self, a: FFElem) -> FFElem {
        if self.dim == 1 {
            return FFElem((self.p - a.0) % self.p);
        }
        let (mut x, mut out, mut scale) = (a.0, 0u64, 1u64);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * scale;
            x /= self.p;
            scale *= self.p;
        }
        FFElem(out)
    }

    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        if a.0 == 0 || b.0 == 0 {
            return FFElem(0);
        }
        if self.dim == 1 {
            return FFElem(a.0 * b.0 % self.p);
        }
        if let Some(t) = self.tables() {
            let n = self.order - 1;
            let e = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % n;
            return FFElem(t.exp[e as usize]);
        }
        self.mul_generic(a, b)
    }

    pub fn square(&self, a: FFElem) -> FFElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FFElem, mut e: u128) -> FFElem {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return a;
        }
        e %= (self.order - 1) as u128;
        if let Some(t) = self.tables() {
            let n = (self.order - 1) as u128;
            let l = (t.log[a.0 as usize] as u128 * e) % n;
            return FFElem(t.exp[l as usize]);
        }
        self.pow_generic(a, e)
    }

    /// Integer power allowing negative exponents for nonzero bases.
    pub fn pow_signed(&self, a: FFElem, e: i128) -> Result<FFElem, FieldError> {
        if e >= 0 {
            return Ok(self.pow(a, e as u128));
        }
        let inv = self.inv(a)?;
        Ok(self.pow(inv, e.unsigned_abs()))
    }

    fn pow_generic(&self, a: FFElem, mut e: u128) -> FFElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FFElem) -> Result<FFElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(t) = self.tables() {
            let n = self.order - 1;
            let l = (n - t.log[a.0 as usize] as u64) % n;
            return Ok(FFElem(t.exp[l as usize]));
        }
        Ok(self.pow(a, (self.order - 2) as u128))
    }

    pub fn div(&self, a: FFElem, b: FFElem) -> Result<FFElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^(q^n) where q = `base_order`.
    pub fn frobenius_power(&self, a: FFElem, base_order: u64, n: u32) -> FFElem {
        if a.0 == 0 || n == 0 {
            return a;
        }
        let m = (self.order - 1) as u128;
        let mut e = 1u128;
        for _ in 0..n {
            e = e * base_order as u128 % m;
        }
        if e == 0 {
            e = m;
        }
        self.pow(a, e)
    }

    pub fn frobenius(&self, a: FFElem, q: u64) -> FFElem {
        self.frobenius_power(a, q, 1)
    }

    pub fn is_dth_power(&self, a: FFElem, d: u64) -> Result<bool, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let n = self.order - 1;
        let g = gcd(d, n);
        Ok(self.pow(a, (n / g) as u128) == self.one())
    }

    /// Cube test in this field; used with the base field F_q.
    pub fn is_cube_in_base(&self, c: FFElem) -> Result<bool, FieldError> {
        self.is_dth_power(c, 3)
    }

    pub fn multiplicative_order(&self, a: FFElem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let mut ord = self.order - 1;
        for &r in self.group_order_factors() {
            while ord % r == 0 && self.pow(a, (ord / r) as u128) == self.one() {
                ord /= r;
            }
        }
        Ok(ord)
    }

    fn group_order_factors(&self) -> &[u64] {
        self.factors_of_group_order
            .get_or_init(|| prime_factors(self.order - 1))
    }

    fn is_primitive_generic(&self, a: FFElem) -> bool {
        let n = self.order - 1;
        a.0 != 0
            && self
                .group_order_factors()
                .iter()
                .all(|&r| self.pow_generic(a, (n / r) as u128) != self.one())
    }

    /// Smallest element in lexicographic order whose multiplicative order is |F|-1.
    pub fn canonical_generator(&self) -> FFElem {
        *self.generator.get_or_init(|| {
            (1..self.order)
                .map(FFElem)
                .find(|&a| self.is_primitive_generic(a))
                .expect("finite field has a primitive element")
        })
    }

    /// Discrete logarithm to the canonical generator, by baby-step giant-step.
    pub fn discrete_log(&self, a: FFElem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let n = self.order - 1;
        let g = self.canonical_generator();
        let m = (n as f64).sqrt().ceil() as u64 + 1;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = self.one();
        for j in 0..m {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, g);
        }
        let giant = self.inv(self.pow(g, m as u128))?;
        let mut y = a;
        for i in 0..=m {
            if let Some(&j) = baby.get(&y) {
                return Ok((i * m + j) % n);
            }
            y = self.mul(y, giant);
        }
        unreachable!("discrete log exists in a cyclic group")
    }

    /// Class of `a` in F*/F*^d, as dlog(a) mod gcd(d, |F|-1).
    pub fn coset_class(&self, a: FFElem, d: u64) -> Result<u64, FieldError> {
        let e = gcd(d, self.order - 1);
        Ok(self.discrete_log(a)? % e)
    }

    /// Normative coset test: a and b differ by a d-th power.
    pub fn same_coset(&self, a: FFElem, b: FFElem, d: u64) -> Result<bool, FieldError> {
        self.is_dth_power(self.div(a, b)?, d)
    }

    fn tables(&self) -> Option<&Tables> {
        self.tables
            .get_or_init(|| {
                if self.order > TABLE_LIMIT || self.dim == 1 {
                    return None;
                }
                let n = (self.order - 1) as usize;
                let g = self.canonical_generator();
                let mut exp = vec![0u64; n];
                let mut log = vec![0u32; self.order as usize];
                let mut cur = self.one();
                for (i, slot) in exp.iter_mut().enumerate() {
                    *slot = cur.0;
                    log[cur.0 as usize] = i as u32;
                    cur = self.mul_generic(cur, g);
                }
                Some(Tables { exp, log })
            })
            .as_ref()
    }

    fn mul_generic(&self, a: FFElem, b: FFElem) -> FFElem {
        let x = self.coords(a);
        let y = self.coords(b);
        let z = self.mul_level(self.levels.len(), &x, &y);
        self.from_coords(&z).expect("reduced coordinates")
    }

    fn mul_level(&self, k: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        if k == 0 {
            return vec![a[0] * b[0] % self.p];
        }
        let lvl = &self.levels[k - 1];
        let (d, w) = (lvl.degree, lvl.base_dim);
        let chunk = |v: &[u64], i: usize| v[i * w..(i + 1) * w].to_vec();
        let mut prod = vec![vec![0u64; w]; 2 * d - 1];
        for i in 0..d {
            let ai = chunk(a, i);
            if ai.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..d {
                let bj = chunk(b, j);
                if bj.iter().all(|&c| c == 0) {
                    continue;
                }
                let t = self.mul_level(k - 1, &ai, &bj);
                add_assign_mod(&mut prod[i + j], &t, self.p);
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = prod[i].clone();
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for (j, &mj) in lvl.modulus.iter().enumerate() {
                let mc = digits(mj, w, self.p);
                let t = self.mul_level(k - 1, &c, &mc);
                sub_assign_mod(&mut prod[i - d + j], &t, self.p);
            }
        }
        prod.truncate(d);
        prod.concat()
    }
}

fn digits(mut x: u64, w: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; w];
    for i in (0..w).rev() {
        out[i] = x % p;
        x /= p;
    }
    out
}

fn add_assign_mod(acc: &mut [u64], t: &[u64], p: u64) {
    for (a, &b) in acc.iter_mut().zip(t) {
        *a = (*a + b) % p;
    }
}

fn sub_assign_mod(acc: &mut [u64], t: &[u64], p: u64) {
    for (a, &b) in acc.iter_mut().zip(t) {
        *a = (*a + p - b) % p;
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
