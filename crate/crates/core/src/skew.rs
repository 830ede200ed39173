//! The twisted polynomial ring L{τ}, Drinfeld modules over L, and the modules
//! whose Frobenius satisfies a given Weil polynomial.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::base_ring::APoly;
use crate::charpoly::CharPoly;
use crate::context::ClassContext;
use crate::field::{FFElem, FieldSpec};
use crate::weil::{check_weil_fast, WeilError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkewError {
    #[error("operands live over different fields or Frobenius bases")]
    FieldMismatch,
    #[error("M is not a Weil polynomial for this context")]
    NotAWeilPolynomial,
    #[error("the top coefficient g_r must be nonzero")]
    ZeroLeadingCoefficient,
    #[error(transparent)]
    Weil(#[from] WeilError),
}

/// Σ c_i τ^i over L with τ·c = c^q·τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewPoly {
    field: Arc<FieldSpec>,
    q: u64,
    coeffs: Vec<FFElem>,
}

impl SkewPoly {
    pub fn new(field: Arc<FieldSpec>, q: u64, mut coeffs: Vec<FFElem>) -> SkewPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { field, q, coeffs }
    }

    pub fn zero(field: &Arc<FieldSpec>, q: u64) -> SkewPoly {
        SkewPoly::new(field.clone(), q, Vec::new())
    }

    pub fn constant(field: &Arc<FieldSpec>, q: u64, c: FFElem) -> SkewPoly {
        SkewPoly::new(field.clone(), q, vec![c])
    }

    /// τ^k
    pub fn tau_power(field: &Arc<FieldSpec>, q: u64, k: usize) -> SkewPoly {
        let mut c = vec![FFElem::ZERO; k + 1];
        c[k] = field.one();
        SkewPoly::new(field.clone(), q, c)
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FFElem {
        self.coeffs.get(i).copied().unwrap_or(FFElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    fn compatible(&self, other: &SkewPoly) -> bool {
        self.q == other.q && (Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field)
    }

    pub fn add(&self, other: &SkewPoly) -> Result<SkewPoly, SkewError> {
        if !self.compatible(other) {
            return Err(SkewError::FieldMismatch);
        }
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(SkewPoly::new(f.clone(), self.q, c))
    }

    /// Left multiplication by a scalar.
    pub fn scale(&self, c: FFElem) -> SkewPoly {
        let f = &self.field;
        SkewPoly::new(
            f.clone(),
            self.q,
            self.coeffs.iter().map(|&x| f.mul(c, x)).collect(),
        )
    }
}

/// The product in L{τ}: (a τ^i)(b τ^j) = a·b^(q^i) τ^(i+j).
pub fn skew_mul(f: &SkewPoly, g: &SkewPoly) -> Result<SkewPoly, SkewError> {
    if !f.compatible(g) {
        return Err(SkewError::FieldMismatch);
    }
    if f.is_zero() || g.is_zero() {
        return Ok(SkewPoly::zero(&f.field, f.q));
    }
    let fl = &f.field;
    let mut out = vec![FFElem::ZERO; f.coeffs.len() + g.coeffs.len() - 1];
    let mut twisted: Vec<FFElem> = g.coeffs.clone();
    for (i, &a) in f.coeffs.iter().enumerate() {
        if i > 0 {
            for b in twisted.iter_mut() {
                *b = fl.frobenius(*b, f.q);
            }
        }
        if a.is_zero() {
            continue;
        }
        for (j, &b) in twisted.iter().enumerate() {
            out[i + j] = fl.add(out[i + j], fl.mul(a, b));
        }
    }
    Ok(SkewPoly::new(fl.clone(), f.q, out))
}

/// φ_T = γ_T + g_1 τ + ... + g_r τ^r over L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrinfeldModule {
    field: Arc<FieldSpec>,
    fq: Arc<FieldSpec>,
    gamma_t: FFElem,
    g: Vec<FFElem>,
}

impl std::hash::Hash for DrinfeldModule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.gamma_t.hash(state);
        self.g.hash(state);
    }
}

impl DrinfeldModule {
    pub fn new(
        fq: Arc<FieldSpec>,
        field: Arc<FieldSpec>,
        gamma_t: FFElem,
        g: Vec<FFElem>,
    ) -> Result<DrinfeldModule, SkewError> {
        if !fq.is_prefix_of(&field) {
            return Err(SkewError::FieldMismatch);
        }
        if g.last().is_none_or(|c| c.is_zero()) {
            return Err(SkewError::ZeroLeadingCoefficient);
        }
        Ok(DrinfeldModule {
            field,
            fq,
            gamma_t,
            g,
        })
    }

    pub fn rank(&self) -> usize {
        self.g.len()
    }

    /// g_1..g_r
    pub fn coefficients(&self) -> &[FFElem] {
        &self.g
    }

    /// g_k for 1 ≤ k ≤ r.
    pub fn g(&self, k: usize) -> FFElem {
        self.g[k - 1]
    }

    pub fn gamma_t(&self) -> FFElem {
        self.gamma_t
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn fq(&self) -> &Arc<FieldSpec> {
        &self.fq
    }

    pub fn q(&self) -> u64 {
        self.fq.order()
    }

    pub fn phi_t(&self) -> SkewPoly {
        let mut c = vec![self.gamma_t];
        c.extend_from_slice(&self.g);
        SkewPoly::new(self.field.clone(), self.q(), c)
    }

    /// The module with g_k replaced by g_k·x^(q^k - 1), isomorphic over L.
    pub fn twist(&self, x: FFElem) -> DrinfeldModule {
        let l = &self.field;
        let q = self.q() as u128;
        let g = self
            .g
            .iter()
            .enumerate()
            .map(|(i, &c)| l.mul(c, l.pow(x, q.pow(i as u32 + 1) - 1)))
            .collect();
        DrinfeldModule { g, ..self.clone() }
    }
}

/// φ_a for a ∈ A, by Horner's rule in φ_T.
pub fn drinfeld_eval(phi: &DrinfeldModule, a: &APoly) -> SkewPoly {
    let l = &phi.field;
    let q = phi.q();
    let pt = phi.phi_t();
    a.coeffs()
        .iter()
        .rev()
        .fold(SkewPoly::zero(l, q), |acc, &c| {
            let c = SkewPoly::constant(l, q, l.embed(&phi.fq, c));
            skew_mul(&acc, &pt).unwrap().add(&c).unwrap()
        })
}

/// M(π) in L{τ} with π = τ^s, s = [L : F_q]: Σ φ(c_k)·τ^(s·k) over the coefficients c_k of M.
pub fn char_equation_residual(phi: &DrinfeldModule, m: &CharPoly, ctx: &ClassContext) -> SkewPoly {
    let s = ctx.s_frob();
    let l = &phi.field;
    let q = phi.q();
    let mut acc = SkewPoly::zero(l, q);
    for (k, c) in m.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = skew_mul(&drinfeld_eval(phi, c), &SkewPoly::tau_power(l, q, s * k)).unwrap();
        acc = acc.add(&term).unwrap();
    }
    acc
}

/// Residual coefficients of τ^0..τ^j with g_(j+1).. set to zero; they are final
/// once g_1..g_j are fixed.
fn residual_prefix_vanishes(prefix: &[FFElem], r: usize, m: &CharPoly, ctx: &ClassContext) -> bool {
    let mut g = prefix.to_vec();
    g.resize(r, FFElem::ZERO);
    let phi = DrinfeldModule {
        field: ctx.l.clone(),
        fq: ctx.fq.clone(),
        gamma_t: ctx.gamma_t,
        g,
    };
    let res = char_equation_residual(&phi, m, ctx);
    (0..=prefix.len()).all(|j| res.coeff(j).is_zero())
}

fn extend(
    prefix: &mut Vec<FFElem>,
    r: usize,
    m: &CharPoly,
    ctx: &ClassContext,
    out: &mut Vec<DrinfeldModule>,
) {
    let j = prefix.len();
    for c in ctx.l.elements() {
        if j + 1 == r && c.is_zero() {
            continue;
        }
        prefix.push(c);
        if j + 1 == r {
            let phi = DrinfeldModule {
                field: ctx.l.clone(),
                fq: ctx.fq.clone(),
                gamma_t: ctx.gamma_t,
                g: prefix.clone(),
            };
            if char_equation_residual(&phi, m, ctx).is_zero() {
                out.push(phi);
            }
        } else if residual_prefix_vanishes(prefix, r, m, ctx) {
            extend(prefix, r, m, ctx, out);
        }
        prefix.pop();
    }
}

/// All rank-r modules over L with γ(T) = γ_T whose Frobenius is a root of M,
/// in lexicographic order of (g_1, ..., g_r).
pub fn solve_isogeny_class(
    m: &CharPoly,
    ctx: &ClassContext,
) -> Result<Vec<DrinfeldModule>, SkewError> {
    if !check_weil_fast(m, ctx)?.verdict {
        return Err(SkewError::NotAWeilPolynomial);
    }
    Ok(solve_unchecked(m, ctx))
}

/// The scan of [`solve_isogeny_class`] without the Weil precheck.
pub fn solve_unchecked(m: &CharPoly, ctx: &ClassContext) -> Vec<DrinfeldModule> {
    let r = ctx.r;
    let firsts: Vec<FFElem> = ctx.l.elements().filter(|c| r > 1 || !c.is_zero()).collect();
    let mut parts: Vec<Vec<DrinfeldModule>> = firsts
        .par_iter()
        .map(|&g1| {
            let mut out = Vec::new();
            let mut prefix = vec![g1];
            if r == 1 {
                let phi = DrinfeldModule {
                    field: ctx.l.clone(),
                    fq: ctx.fq.clone(),
                    gamma_t: ctx.gamma_t,
                    g: prefix,
                };
                if char_equation_residual(&phi, m, ctx).is_zero() {
                    out.push(phi);
                }
            } else if residual_prefix_vanishes(&prefix, r, m, ctx) {
                extend(&mut prefix, r, m, ctx, &mut out);
            }
            out
        })
        .collect();
    let mut all: Vec<DrinfeldModule> = parts.drain(..).flatten().collect();
    all.sort_by(|a, b| a.g.cmp(&b.g));
    all
}
