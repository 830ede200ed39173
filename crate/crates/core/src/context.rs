//! The ambient data of an isogeny-class computation.

use std::sync::Arc;

use thiserror::Error;

use crate::base_ring::{APoly, Place, ResidueField};
use crate::field::{FFElem, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("p_v must be monic irreducible")]
    BadPlace,
    #[error("L does not extend the tower of F_q")]
    NotAnExtension,
    #[error("|L| = {actual} but |A/p_v|^m = {expected}")]
    WrongCardinality { actual: u64, expected: u128 },
    #[error("gamma(p_v) is not zero in L")]
    GammaNotInKernel,
    #[error("rank must be at least 1")]
    BadRank,
    #[error("m must be at least 1")]
    BadDegree,
}

/// F_q, the prime p_v = ker γ, the A-field L with γ(T) = γ_T, and the rank r.
#[derive(Clone, Debug)]
pub struct ClassContext {
    pub fq: Arc<FieldSpec>,
    pub pv: APoly,
    pub place: Place,
    pub m: usize,
    pub l: Arc<FieldSpec>,
    pub gamma_t: FFElem,
    pub r: usize,
    residue: ResidueField,
}

impl ClassContext {
    pub fn new(
        fq: Arc<FieldSpec>,
        pv: APoly,
        m: usize,
        l: Arc<FieldSpec>,
        gamma_t: FFElem,
        r: usize,
    ) -> Result<ClassContext, ContextError> {
        if r == 0 {
            return Err(ContextError::BadRank);
        }
        if m == 0 {
            return Err(ContextError::BadDegree);
        }
        let place = Place::finite(pv.clone()).map_err(|_| ContextError::BadPlace)?;
        if !fq.is_prefix_of(&l) {
            return Err(ContextError::NotAnExtension);
        }
        let expected = (fq.order() as u128).pow((pv.deg() * m) as u32);
        if l.order() as u128 != expected {
            return Err(ContextError::WrongCardinality {
                actual: l.order(),
                expected,
            });
        }
        let ctx = ClassContext {
            residue: ResidueField::new(&pv),
            fq,
            pv,
            place,
            m,
            l,
            gamma_t,
            r,
        };
        if !ctx.gamma(&ctx.pv).is_zero() {
            return Err(ContextError::GammaNotInKernel);
        }
        Ok(ctx)
    }

    pub fn q(&self) -> u64 {
        self.fq.order()
    }

    pub fn p(&self) -> u64 {
        self.fq.characteristic()
    }

    pub fn deg_pv(&self) -> usize {
        self.pv.deg()
    }

    /// [L : F_q], the exponent s with π = τ^s.
    pub fn s_frob(&self) -> usize {
        self.m * self.deg_pv()
    }

    /// ceil(m·deg p_v / r), the scaling exponent at infinity.
    pub fn s_inf(&self) -> usize {
        self.s_frob().div_ceil(self.r)
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    /// Embedding of F_q into L.
    pub fn to_l(&self, c: FFElem) -> FFElem {
        self.l.embed(&self.fq, c)
    }

    /// γ(a) ∈ L.
    pub fn gamma(&self, a: &APoly) -> FFElem {
        let l = &self.l;
        a.coeffs().iter().rev().fold(FFElem::ZERO, |acc, &c| {
            l.add(l.mul(acc, self.gamma_t), self.to_l(c))
        })
    }
}
