//! Truncated Laurent series over a finite field with capped absolute precision,
//! and polynomials with such coefficients.

use crate::field::{FFElem, FieldSpec};
use crate::poly::Poly;

/// Precision used for values known exactly.
pub const EXACT: i64 = i64::MAX / 8;

fn cap(x: i64) -> i64 {
    x.min(EXACT)
}

/// Σ digits[i]·t^(start+i) + O(t^prec). `digits` carries no leading or trailing zeros;
/// an empty digit list means the value is zero to the stated precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    start: i64,
    digits: Vec<FFElem>,
    prec: i64,
}

impl Series {
    pub fn new(start: i64, mut digits: Vec<FFElem>, prec: i64) -> Series {
        let keep = (prec - start).clamp(0, digits.len() as i64) as usize;
        digits.truncate(keep);
        let lead = digits.iter().position(|c| !c.is_zero());
        let Some(lead) = lead else {
            return Series {
                start: prec,
                digits: Vec::new(),
                prec,
            };
        };
        let tail = digits.iter().rposition(|c| !c.is_zero()).unwrap();
        Series {
            start: start + lead as i64,
            digits: digits[lead..=tail].to_vec(),
            prec,
        }
    }

    pub fn zero(prec: i64) -> Series {
        Series {
            start: prec,
            digits: Vec::new(),
            prec,
        }
    }

    pub fn constant(c: FFElem, prec: i64) -> Series {
        Series::new(0, vec![c], prec)
    }

    pub fn exact_constant(c: FFElem) -> Series {
        Series::constant(c, EXACT)
    }

    /// A polynomial in t, known exactly.
    pub fn from_poly(p: &Poly) -> Series {
        Series::new(0, p.coeffs().to_vec(), EXACT)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Valuation, or `None` when the value is zero to the known precision.
    pub fn val(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.start)
    }

    /// Valuation, or the precision as a lower bound when unknown.
    pub fn val_bound(&self) -> i64 {
        self.val().unwrap_or(self.prec)
    }

    pub fn is_known_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit of t^e; zero outside the stored range. Callers check `e < prec`.
    pub fn coeff(&self, e: i64) -> FFElem {
        if e < self.start {
            return FFElem::ZERO;
        }
        self.digits
            .get((e - self.start) as usize)
            .copied()
            .unwrap_or(FFElem::ZERO)
    }

    /// Digits of t^0..t^(n-1).
    pub fn digits_from_zero(&self, n: usize) -> Vec<FFElem> {
        (0..n as i64).map(|e| self.coeff(e)).collect()
    }

    pub fn truncate(&self, prec: i64) -> Series {
        let p = prec.min(self.prec);
        Series::new(self.start, self.digits.clone(), p)
    }

    pub fn with_prec(&self, prec: i64) -> Series {
        Series::new(self.start, self.digits.clone(), prec)
    }

    pub fn add(&self, f: &FieldSpec, other: &Series) -> Series {
        let prec = self.prec.min(other.prec);
        if other.digits.is_empty() {
            return self.truncate(prec);
        }
        if self.digits.is_empty() {
            return other.truncate(prec);
        }
        let lo = self.start.min(other.start).min(prec);
        let hi = (self.start + self.digits.len() as i64)
            .max(other.start + other.digits.len() as i64)
            .min(prec);
        let digits = (lo..hi.max(lo))
            .map(|e| f.add(self.coeff(e), other.coeff(e)))
            .collect();
        Series::new(lo, digits, prec)
    }

    pub fn neg(&self, f: &FieldSpec) -> Series {
        Series {
            start: self.start,
            digits: self.digits.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, f: &FieldSpec, other: &Series) -> Series {
        self.add(f, &other.neg(f))
    }

    pub fn mul(&self, f: &FieldSpec, other: &Series) -> Series {
        let va = self.val_bound();
        let vb = other.val_bound();
        let prec = cap(self.prec.saturating_add(vb)).min(cap(other.prec.saturating_add(va)));
        if self.digits.is_empty() || other.digits.is_empty() {
            return Series::zero(prec);
        }
        let start = self.start + other.start;
        let len = ((prec - start).max(0) as usize).min(self.digits.len() + other.digits.len() - 1);
        let mut out = vec![FFElem::ZERO; len];
        for (i, &a) in self.digits.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.digits.iter().enumerate().take(len - i) {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Series::new(start, out, prec)
    }

    pub fn scale(&self, f: &FieldSpec, c: FFElem) -> Series {
        if c.is_zero() {
            return Series::zero(self.prec);
        }
        Series {
            start: self.start,
            digits: self.digits.iter().map(|&d| f.mul(d, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Series {
        Series {
            start: self.start + k,
            digits: self.digits.clone(),
            prec: cap(self.prec.saturating_add(k)),
        }
    }

    /// Inverse of a value with known valuation, to relative precision at most `rel_cap`.
    pub fn inv(&self, f: &FieldSpec, rel_cap: i64) -> Option<Series> {
        let v = self.val()?;
        let rp = (self.prec - v).min(rel_cap);
        let n = rp as usize;
        let u0inv = f.inv(self.digits[0]).ok()?;
        let mut out = vec![FFElem::ZERO; n];
        for k in 0..n {
            // Σ_{i≤k} u_i·w_{k-i} = δ_k0
            let mut acc = if k == 0 { f.one() } else { FFElem::ZERO };
            for i in 1..=k.min(self.digits.len() - 1) {
                acc = f.sub(acc, f.mul(self.digits[i], out[k - i]));
            }
            out[k] = f.mul(acc, u0inv);
        }
        Some(Series::new(-v, out, -v + rp))
    }

    pub fn map_digits(&self, g: impl Fn(FFElem) -> FFElem) -> Series {
        Series::new(
            self.start,
            self.digits.iter().map(|&c| g(c)).collect(),
            self.prec,
        )
    }

    pub fn try_map_digits(&self, g: impl Fn(FFElem) -> Option<FFElem>) -> Option<Series> {
        let d = self
            .digits
            .iter()
            .map(|&c| g(c))
            .collect::<Option<Vec<_>>>()?;
        Some(Series::new(self.start, d, self.prec))
    }

    /// Substitutes t = c·w^b.
    pub fn ramify(&self, f: &FieldSpec, b: i64, c: FFElem) -> Series {
        let prec = if self.prec >= EXACT {
            EXACT
        } else {
            self.prec * b
        };
        if self.digits.is_empty() {
            return Series::zero(prec);
        }
        let n = self.digits.len();
        let mut digits = vec![FFElem::ZERO; if n == 0 { 0 } else { (n - 1) * b as usize + 1 }];
        for (i, &d) in self.digits.iter().enumerate() {
            let e = self.start + i as i64;
            let ce = f
                .pow_signed(c, e as i128)
                .expect("nonzero substitution constant");
            digits[i * b as usize] = f.mul(d, ce);
        }
        Series::new(self.start * b, digits, prec)
    }

    /// Inverse of [`ramify`](Self::ramify): w^(b·k) becomes c^(-k)·t^k. `None` if some
    /// digit sits at an exponent not divisible by b.
    pub fn descend(&self, f: &FieldSpec, b: i64, c: FFElem) -> Option<Series> {
        if self.digits.is_empty() {
            return Some(Series::zero(div_ceil(self.prec, b)));
        }
        if self.start.rem_euclid(b) != 0 {
            return None;
        }
        let mut digits = Vec::new();
        for (i, &d) in self.digits.iter().enumerate() {
            let e = self.start + i as i64;
            if e.rem_euclid(b) != 0 {
                if !d.is_zero() {
                    return None;
                }
                continue;
            }
            let k = e.div_euclid(b);
            let ck = f
                .pow_signed(c, -(k as i128))
                .expect("nonzero substitution constant");
            digits.push(f.mul(d, ck));
        }
        let prec = if self.prec >= EXACT {
            EXACT
        } else {
            div_ceil(self.prec, b)
        };
        Some(Series::new(self.start.div_euclid(b), digits, prec))
    }
}

pub fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Polynomial in x with series coefficients, ascending.
pub type LPoly = Vec<Series>;

pub fn lp_degree(g: &LPoly) -> usize {
    g.len() - 1
}

pub fn lp_mul(f: &FieldSpec, a: &LPoly, b: &LPoly) -> LPoly {
    let mut out = vec![Series::zero(EXACT); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(f, &x.mul(f, y));
        }
    }
    out
}

pub fn lp_add(f: &FieldSpec, a: &LPoly, b: &LPoly) -> LPoly {
    let n = a.len().max(b.len());
    let z = Series::zero(EXACT);
    (0..n)
        .map(|i| a.get(i).unwrap_or(&z).add(f, b.get(i).unwrap_or(&z)))
        .collect()
}

/// g(x + c) for a constant c.
pub fn lp_taylor_shift(f: &FieldSpec, g: &LPoly, c: FFElem) -> LPoly {
    let mut v = g.clone();
    let n = v.len();
    if c.is_zero() {
        return v;
    }
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = v[j + 1].scale(f, c);
            v[j] = v[j].add(f, &t);
        }
    }
    v
}

/// g(t^a·x)/t^(a·deg g).
pub fn lp_scale_roots(g: &LPoly, a: i64) -> LPoly {
    let d = lp_degree(g) as i64;
    g.iter()
        .enumerate()
        .map(|(j, s)| s.shift(a * (j as i64 - d)))
        .collect()
}

/// t^(a·deg g)·g(x/t^a), inverse of [`lp_scale_roots`].
pub fn lp_unscale_roots(g: &LPoly, a: i64) -> LPoly {
    let d = lp_degree(g) as i64;
    g.iter()
        .enumerate()
        .map(|(j, s)| s.shift(a * (d - j as i64)))
        .collect()
}

/// Minimum precision over the non-leading coefficients.
pub fn lp_prec(g: &LPoly) -> i64 {
    g[..g.len() - 1]
        .iter()
        .map(|s| s.prec())
        .min()
        .unwrap_or(EXACT)
}

/// Monic polynomial with exactly-known leading coefficient and the rest truncated to `prec`.
pub fn lp_truncate(g: &LPoly, prec: i64) -> LPoly {
    let n = g.len();
    g.iter()
        .enumerate()
        .map(|(i, s)| {
            if i + 1 == n {
                s.clone()
            } else {
                s.truncate(prec)
            }
        })
        .collect()
}

/// Residue polynomial over F, or `None` if a coefficient is not known to be integral
/// or is unknown modulo t.
pub fn lp_residue(f: &std::sync::Arc<FieldSpec>, g: &LPoly) -> Option<Poly> {
    let mut v = Vec::with_capacity(g.len());
    for s in g {
        if s.prec() < 1 || s.val().is_some_and(|x| x < 0) {
            return None;
        }
        v.push(s.coeff(0));
    }
    Some(Poly::new(f.clone(), v))
}

/// t-adic digit polynomials: result[k] is the coefficient of t^k, a polynomial in x.
pub fn lp_to_adic(f: &std::sync::Arc<FieldSpec>, g: &LPoly, prec: usize) -> Vec<Poly> {
    (0..prec as i64)
        .map(|k| Poly::new(f.clone(), g.iter().map(|s| s.coeff(k)).collect()))
        .collect()
}

/// Inverse of [`lp_to_adic`] for a polynomial of the given degree, monic when `monic` is set.
pub fn lp_from_adic(digits: &[Poly], degree: usize, monic: bool, f: &FieldSpec) -> LPoly {
    let prec = digits.len() as i64;
    let mut out: LPoly = (0..=degree)
        .map(|j| Series::new(0, digits.iter().map(|d| d.coeff(j)).collect(), prec))
        .collect();
    if monic {
        out[degree] = Series::exact_constant(f.one());
    }
    out
}
