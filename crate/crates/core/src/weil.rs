//! Deciding whether a polynomial over A is the Weil polynomial of a rank-r
//! Drinfeld module over L, and enumerating all of them for a context.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::base_ring::{split_power, valuation, APoly, Place};
use crate::charpoly::{
    disc_monic, infinity_normalize, precisions, separability_split, template_check, CharPoly,
    ShapeError, WeilShape,
};
use crate::context::ClassContext;
use crate::field::{FFElem, FieldSpec};
use crate::local::{factor_local, unit_resultants, LocalError, LocalFactorization};
use crate::poly::Poly;
use crate::series::{lp_mul, LPoly, Series};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("M is not irreducible over F_q(T)")]
    NotIrreducibleOverK,
    #[error("M is inseparable")]
    InseparableInput,
    #[error("characteristic 3 has no rank-3 standard form")]
    CharThree,
    #[error("irreducibility over F_q(T) could not be decided")]
    IrreducibilityUndecided,
    #[error(transparent)]
    Local(#[from] LocalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureReason {
    Shape,
    InfinityCondition,
    ZeroCondition,
    ReducibleOverK,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::Shape => "shape",
            FailureReason::InfinityCondition => "infinity-condition",
            FailureReason::ZeroCondition => "zero-condition",
            FailureReason::ReducibleOverK => "reducible-over-k",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InfinityCase {
    S1,
    S2,
    S3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroCase {
    S4,
    S5,
    S6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FastPath {
    Generic,
    ShortcutC2Cor,
    Rank3 {
        infinity: Option<InfinityCase>,
        zero: Option<ZeroCase>,
    },
}

impl FastPath {
    pub fn tag(&self) -> String {
        match self {
            FastPath::Generic => "generic".into(),
            FastPath::ShortcutC2Cor => "shortcut-c2cor".into(),
            FastPath::Rank3 { infinity, zero } => {
                let mut s = String::from("rank3");
                if let Some(i) = infinity {
                    s.push_str(["-s1", "-s2", "-s3"][*i as usize]);
                }
                if let Some(z) = zero {
                    s.push_str(["-s4", "-s5", "-s6"][*z as usize]);
                }
                s
            }
        }
    }
}

/// x³ + c1·x + c2 together with the maps back to M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    pub c1: APoly,
    pub c2: APoly,
    /// a_1/3: M(x - a_1/3) is depressed.
    pub shift: APoly,
    /// gcd(g1, g2)
    pub scale: APoly,
}

#[derive(Clone, Debug, Default)]
pub struct Evidence {
    pub infinity: Option<LocalFactorization>,
    pub finite: Option<LocalFactorization>,
    /// Res(f̄_i, M̄/f̄_i) in the residue field at v.
    pub resultants: Vec<FFElem>,
    pub standard_form: Option<StandardForm>,
}

#[derive(Clone, Debug)]
pub struct WeilReport {
    pub verdict: bool,
    pub shape: Option<WeilShape>,
    pub shape_error: Option<ShapeError>,
    pub failure: Option<FailureReason>,
    pub evidence: Evidence,
    pub fast_path: FastPath,
}

impl WeilReport {
    fn fail(
        shape: Option<WeilShape>,
        reason: FailureReason,
        evidence: Evidence,
        fast_path: FastPath,
    ) -> WeilReport {
        WeilReport {
            verdict: false,
            shape,
            shape_error: None,
            failure: Some(reason),
            evidence,
            fast_path,
        }
    }

    fn shape_failure(err: ShapeError, fast_path: FastPath) -> WeilReport {
        WeilReport {
            verdict: false,
            shape: None,
            shape_error: Some(err),
            failure: Some(FailureReason::Shape),
            evidence: Evidence::default(),
            fast_path,
        }
    }

    /// The report of a polynomial rejected for being reducible over k.
    pub fn reducible() -> WeilReport {
        WeilReport::fail(
            None,
            FailureReason::ReducibleOverK,
            Evidence::default(),
            FastPath::Generic,
        )
    }
}

fn apoly_from_digits(fq: &Arc<FieldSpec>, digits: &[FFElem], c: FFElem) -> APoly {
    let lin = Poly::new(fq.clone(), vec![fq.neg(c), fq.one()]);
    digits.iter().rev().fold(Poly::zero(fq), |acc, &d| {
        &(&acc * &lin) + &Poly::constant(fq, d)
    })
}

/// Quotient of M by a monic g in A[x], if g divides M.
pub fn divide_exact(m: &[APoly], g: &[APoly]) -> Option<Vec<APoly>> {
    let n = m.len() - 1;
    let d = g.len() - 1;
    if d > n {
        return None;
    }
    let fq = m[0].field();
    let mut r = m.to_vec();
    let mut q = vec![Poly::zero(fq); n - d + 1];
    for i in (0..=n - d).rev() {
        let c = r[i + d].clone();
        for (j, gj) in g.iter().enumerate() {
            r[i + j] = &r[i + j] - &(&c * gj);
        }
        q[i] = c;
    }
    r.iter().all(|x| x.is_zero()).then_some(q)
}

/// Whether a ∈ A is a p-th power in k.
fn is_pth_power(a: &APoly, p: usize) -> bool {
    a.coeffs()
        .iter()
        .enumerate()
        .all(|(i, c)| c.is_zero() || i % p == 0)
}

/// Irreducibility of a monic M over k = F_q(T).
///
/// Factors M over F_q((T - c)) and recombines the local factors: a monic factor
/// over A has coefficients of degree at most j·β (β = max deg a_i / i), so they
/// are read off exactly from t-adic digits once the precision exceeds that.
pub fn is_irreducible_over_k(m: &CharPoly) -> Result<bool, WeilError> {
    let n = m.degree();
    if n == 1 {
        return Ok(true);
    }
    let fq = m.fq().clone();
    let p = fq.characteristic() as usize;
    if disc_monic(m).is_zero() {
        let Ok((f, _)) = separability_split(m, p as u64) else {
            return Ok(false);
        };
        if !is_irreducible_over_k(&f)? {
            return Ok(false);
        }
        return Ok(!f.coeffs().iter().all(|c| is_pth_power(c, p)));
    }
    // deg of the x^(d-j) coefficient of a monic factor is at most j·β
    let bound_num: Vec<(usize, usize)> =
        (1..=n).map(|i| (m.a(i).degree().unwrap_or(0), i)).collect();
    let coeff_bound = |j: usize| bound_num.iter().map(|&(d, i)| j * d / i).max().unwrap();
    let prec = coeff_bound(n) + 1;
    let mut best: Option<(FFElem, LocalFactorization)> = None;
    for c in fq.elements().take(8) {
        let place = Place::Finite(Poly::new(fq.clone(), vec![fq.neg(c), fq.one()]));
        let Ok(fac) = factor_local(m, &place, prec) else {
            continue;
        };
        if fac.factors.len() == 1 {
            return Ok(true);
        }
        if best
            .as_ref()
            .is_none_or(|(_, b)| fac.factors.len() < b.factors.len())
        {
            best = Some((c, fac));
        }
    }
    let (c, fac) = best.ok_or(WeilError::IrreducibilityUndecided)?;
    let k = fac.factors.len();
    let lps: Vec<LPoly> = fac
        .factors
        .iter()
        .map(|f| {
            f.coeffs
                .iter()
                .map(|d| Series::new(0, d.clone(), prec as i64))
                .collect()
        })
        .collect();
    for mask in 1u64..(1u64 << k) - 1 {
        let deg: usize = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| fac.factors[i].degree())
            .sum();
        if 2 * deg > n {
            continue;
        }
        let mut acc: LPoly = vec![Series::exact_constant(fq.one())];
        for (i, lp) in lps.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = lp_mul(&fq, &acc, lp);
            }
        }
        let cand: Vec<APoly> = acc
            .iter()
            .map(|s| apoly_from_digits(&fq, &s.digits_from_zero(prec), c))
            .collect();
        let fits = cand
            .iter()
            .enumerate()
            .all(|(i, a)| a.degree().is_none_or(|d| d <= coeff_bound(deg - i)));
        if fits && divide_exact(m.coeffs(), &cand).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local factorization of the normalized polynomial at infinity; true iff one factor.
fn infinity_step(
    f: &CharPoly,
    scale: usize,
    h: i64,
) -> Result<(bool, LocalFactorization), WeilError> {
    let m0 = infinity_normalize(f, scale).expect("degree bounds hold after the shape check");
    let m0 = CharPoly::new(m0).expect("normalization keeps M monic");
    let fac = factor_local(&m0, &Place::Infinity, h.max(1) as usize)?;
    Ok((fac.factors.len() == 1, fac))
}

/// Local factorization at v; true iff the residues of the factors are pairwise coprime.
fn finite_step(
    f: &CharPoly,
    ctx: &ClassContext,
    n: i64,
) -> Result<(bool, LocalFactorization, Vec<FFElem>), WeilError> {
    let fac = factor_local(f, &ctx.place, n.max(1) as usize)?;
    let res = unit_resultants(&fac);
    Ok((res.iter().all(|r| !r.is_zero()), fac, res))
}

/// The separable Weil test: shape, one place above infinity, one zero above v.
pub fn check_weil_separable(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, WeilError> {
    run_generic(m, ctx, false)
}

fn run_generic(m: &CharPoly, ctx: &ClassContext, shortcut: bool) -> Result<WeilReport, WeilError> {
    let disc = disc_monic(m);
    if disc.is_zero() {
        return Err(WeilError::InseparableInput);
    }
    if !is_irreducible_over_k(m)? {
        return Err(WeilError::NotIrreducibleOverK);
    }
    let mut shape = match template_check(m, ctx, 0) {
        Ok(s) => s,
        Err(e) => return Ok(WeilReport::shape_failure(e, FastPath::Generic)),
    };
    let (n, h) = precisions(&disc, &ctx.pv, shape.s, shape.r1);
    shape.n = Some(n);
    shape.h = Some(h);
    let mut evidence = Evidence::default();
    let (ok, fac) = infinity_step(m, shape.s, h)?;
    evidence.infinity = Some(fac);
    if !ok {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::InfinityCondition,
            evidence,
            FastPath::Generic,
        ));
    }
    if shortcut && linear_coeff_shortcut(m, ctx) {
        return Ok(WeilReport {
            verdict: true,
            shape: Some(shape),
            shape_error: None,
            failure: None,
            evidence,
            fast_path: FastPath::ShortcutC2Cor,
        });
    }
    let (ok, fac, res) = finite_step(m, ctx, n)?;
    evidence.finite = Some(fac);
    evidence.resultants = res;
    if !ok {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::ZeroCondition,
            evidence,
            FastPath::Generic,
        ));
    }
    Ok(WeilReport {
        verdict: true,
        shape: Some(shape),
        shape_error: None,
        failure: None,
        evidence,
        fast_path: FastPath::Generic,
    })
}

/// The Weil test for any monic M: separable input goes to
/// [`check_weil_separable`], inseparable M = f(x^(p^e)) is decided through f.
pub fn check_weil(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, WeilError> {
    if !disc_monic(m).is_zero() {
        return check_weil_separable(m, ctx);
    }
    check_weil_inseparable(m, ctx)
}

fn check_weil_inseparable(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, WeilError> {
    if !is_irreducible_over_k(m)? {
        return Err(WeilError::NotIrreducibleOverK);
    }
    let (f, e) = separability_split(m, ctx.p()).map_err(|_| WeilError::NotIrreducibleOverK)?;
    let mut shape = match template_check(&f, ctx, e) {
        Ok(s) => s,
        Err(err) => return Ok(WeilReport::shape_failure(err, FastPath::Generic)),
    };
    if shape.r1 as u64 % ctx.p() == 0 {
        return Ok(WeilReport::shape_failure(
            ShapeError::RankMismatch { r1: shape.r1 },
            FastPath::Generic,
        ));
    }
    let disc = disc_monic(&f);
    let (n, h) = precisions(&disc, &ctx.pv, shape.s, shape.r1);
    shape.n = Some(n);
    shape.h = Some(h);
    let pe = (ctx.p() as usize).pow(e);
    let mut evidence = Evidence::default();
    let (ok, fac) = infinity_step(&f, pe * shape.s, h)?;
    evidence.infinity = Some(fac);
    if !ok {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::InfinityCondition,
            evidence,
            FastPath::Generic,
        ));
    }
    let (ok, fac, res) = finite_step(&f, ctx, n)?;
    evidence.finite = Some(fac);
    evidence.resultants = res;
    if !ok {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::ZeroCondition,
            evidence,
            FastPath::Generic,
        ));
    }
    Ok(WeilReport {
        verdict: true,
        shape: Some(shape),
        shape_error: None,
        failure: None,
        evidence,
        fast_path: FastPath::Generic,
    })
}

/// p_v ∤ a_(r1-1), which settles the zero condition without factoring at v.
pub fn linear_coeff_shortcut(m: &CharPoly, ctx: &ClassContext) -> bool {
    let a = m.a(m.degree() - 1);
    !a.is_zero() && !a.rem(&ctx.pv).is_zero()
}

fn sqfree_root_power(b: &APoly, k: usize) -> APoly {
    let fq = b.field();
    let (_, parts) = b.squarefree_decomposition();
    parts
        .iter()
        .fold(Poly::one(fq), |acc, (f, i)| &acc * &f.pow((i / k) as u64))
}

/// Depressed, content-reduced form x³ + c1·x + c2 of a monic cubic.
pub fn to_standard_form(m: &CharPoly, ctx: &ClassContext) -> Result<StandardForm, WeilError> {
    if ctx.p() == 3 {
        return Err(WeilError::CharThree);
    }
    let fq = m.fq();
    let (a1, a2, a3) = (m.a(1), m.a(2), m.a(3));
    let inv3 = fq.inv(fq.from_int(3)).unwrap();
    let inv27 = fq.inv(fq.from_int(27)).unwrap();
    let a1sq = a1 * a1;
    let b1 = a2 - &a1sq.scale(inv3);
    let b2 = &(&(&a1sq * a1).scale(fq.mul(fq.from_int(2), inv27)) - &(a1 * a2).scale(inv3)) + a3;
    let g1 = if b1.is_zero() {
        None
    } else {
        Some(sqfree_root_power(&b1, 2))
    };
    let g2 = if b2.is_zero() {
        None
    } else {
        Some(sqfree_root_power(&b2, 3))
    };
    let g = match (g1, g2) {
        (Some(x), Some(y)) => x.gcd(&y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => Poly::one(fq),
    };
    let c1 = b1.exact_div(&g.pow(2));
    let c2 = b2.exact_div(&g.pow(3));
    Ok(StandardForm {
        c1,
        c2,
        shift: a1.scale(inv3),
        scale: g,
    })
}

/// The cases certifying a single place above infinity for x³ + c1·x + c2.
pub fn rank3_infinity_test(c1: &APoly, c2: &APoly, fq: &Arc<FieldSpec>) -> Option<InfinityCase> {
    let d2 = c2.degree()? as i64;
    // deg 0 = -∞ never reaches equality
    let d1 = c1.degree().map(|d| d as i64).unwrap_or(i64::MIN / 4);
    if 3 * d1 < 2 * d2 && d2 % 3 == 0 && !fq.is_dth_power(c2.lc(), 3).unwrap() {
        return Some(InfinityCase::S1);
    }
    if 3 * d1 == 2 * d2 {
        let (l1, l2) = (c1.lc(), c2.lc());
        let d = fq.add(
            fq.mul(fq.from_int(4), fq.pow(l1, 3)),
            fq.mul(fq.from_int(27), fq.square(l2)),
        );
        let cubic = Poly::new(fq.clone(), vec![l2, l1, FFElem::ZERO, fq.one()]);
        if !d.is_zero() && cubic.roots().is_empty() {
            return Some(InfinityCase::S2);
        }
    }
    if 3 * d1 < 2 * d2 && d2 % 3 != 0 {
        return Some(InfinityCase::S3);
    }
    None
}

/// The cases certifying a unique zero above v for a rank-3 template.
pub fn rank3_zero_test(m: &CharPoly, ctx: &ClassContext) -> Result<Option<ZeroCase>, WeilError> {
    Ok(rank3_zero_case(m, ctx)?.0)
}

fn rank3_zero_case(
    m: &CharPoly,
    ctx: &ClassContext,
) -> Result<(Option<ZeroCase>, Option<LocalFactorization>), WeilError> {
    let (a1, a2) = (m.a(1), m.a(2));
    let divides = |a: &APoly| a.is_zero() || a.rem(&ctx.pv).is_zero();
    if !divides(a2) {
        return Ok((Some(ZeroCase::S6), None));
    }
    if !divides(a1) {
        let v2 = valuation(a2, &ctx.place).finite().unwrap_or(i64::MAX / 4);
        return Ok(((2 * v2 >= ctx.m as i64).then_some(ZeroCase::S4), None));
    }
    let disc = disc_monic(m);
    let n = valuation(&disc, &ctx.place).finite().expect("separable") + 1;
    let fac = factor_local(m, &ctx.place, n as usize)?;
    let one = fac.factors.len() == 1;
    Ok((one.then_some(ZeroCase::S5), Some(fac)))
}

/// The rank-3 test through the standard form and the case lists at infinity and at v.
pub fn check_weil_rank3(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, WeilError> {
    let stdf = to_standard_form(m, ctx)?;
    let disc = disc_monic(m);
    if disc.is_zero() {
        return Err(WeilError::InseparableInput);
    }
    if !is_irreducible_over_k(m)? {
        return Err(WeilError::NotIrreducibleOverK);
    }
    let tag = |infinity, zero| FastPath::Rank3 { infinity, zero };
    let mut shape = match template_check(m, ctx, 0) {
        Ok(s) if s.r1 == 3 => s,
        Ok(_) => {
            return Ok(WeilReport::shape_failure(
                ShapeError::RankMismatch { r1: m.degree() },
                tag(None, None),
            ))
        }
        Err(e) => return Ok(WeilReport::shape_failure(e, tag(None, None))),
    };
    let (n, h) = precisions(&disc, &ctx.pv, shape.s, shape.r1);
    shape.n = Some(n);
    shape.h = Some(h);
    let inf = rank3_infinity_test(&stdf.c1, &stdf.c2, m.fq());
    let mut evidence = Evidence {
        standard_form: Some(stdf),
        ..Evidence::default()
    };
    if inf.is_none() {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::InfinityCondition,
            evidence,
            tag(None, None),
        ));
    }
    let (zero, fac) = rank3_zero_case(m, ctx)?;
    evidence.finite = fac;
    if zero.is_none() {
        return Ok(WeilReport::fail(
            Some(shape),
            FailureReason::ZeroCondition,
            evidence,
            tag(inf, None),
        ));
    }
    Ok(WeilReport {
        verdict: true,
        shape: Some(shape),
        shape_error: None,
        failure: None,
        evidence,
        fast_path: tag(inf, zero),
    })
}

/// The checker used by the enumerator and the command line: the rank-3 path
/// where it applies, else the generic test with the linear-coefficient shortcut.
pub fn check_weil_fast(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, WeilError> {
    if disc_monic(m).is_zero() {
        return check_weil_inseparable(m, ctx);
    }
    if ctx.r == 3 && m.degree() == 3 && ctx.p() != 3 {
        return check_weil_rank3(m, ctx);
    }
    run_generic(m, ctx, true)
}

/// The (r1, r2) templates with r1·r2 = r and r2 | m, r1 descending.
pub fn templates(ctx: &ClassContext) -> Vec<(usize, usize)> {
    (1..=ctx.r)
        .rev()
        .filter(|r1| ctx.r % r1 == 0 && ctx.m % (ctx.r / r1) == 0)
        .map(|r1| (r1, ctx.r / r1))
        .collect()
}

/// floor(i·m·deg p_v / r) for i = 1..r1-1.
pub fn degree_bounds(ctx: &ClassContext, r1: usize) -> Vec<usize> {
    (1..r1).map(|i| i * ctx.s_frob() / ctx.r).collect()
}

/// Number of coefficient tuples per unit μ for a template: ∏ q^(floor(i·m·deg p_v/r) + 1).
pub fn tuples_per_unit(ctx: &ClassContext, r1: usize) -> u128 {
    degree_bounds(ctx, r1)
        .iter()
        .map(|&b| (ctx.q() as u128).pow(b as u32 + 1))
        .product()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub candidates: u64,
    /// (r1, r2, candidates) per template.
    pub per_template: Vec<(usize, usize, u64)>,
    pub reducible: u64,
    pub accepted: u64,
    /// Accepted without factoring at v.
    pub shortcut_skips: u64,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub records: Vec<(CharPoly, WeilReport)>,
    pub stats: EnumerationStats,
}

fn decode_apoly(fq: &Arc<FieldSpec>, mut idx: u128, len: usize) -> APoly {
    let q = fq.order() as u128;
    let mut c = vec![FFElem::ZERO; len];
    // ascending coefficient vectors, compared from the constant term
    for slot in c.iter_mut().rev() {
        *slot = fq.from_index((idx % q) as u64);
        idx /= q;
    }
    Poly::new(fq.clone(), c)
}

/// Candidate number `idx` of a template in canonical order.
pub fn candidate(ctx: &ClassContext, r1: usize, r2: usize, mu: FFElem, mut idx: u128) -> CharPoly {
    let fq = &ctx.fq;
    let bounds = degree_bounds(ctx, r1);
    let q = fq.order() as u128;
    let mut a = vec![Poly::zero(fq); r1];
    for i in (0..bounds.len()).rev() {
        let size = q.pow(bounds[i] as u32 + 1);
        a[i] = decode_apoly(fq, idx % size, bounds[i] + 1);
        idx /= size;
    }
    a[r1 - 1] = ctx.pv.pow((ctx.m / r2) as u64).scale(mu);
    CharPoly::from_template(fq, &a)
}

/// All Weil polynomials of the context in canonical order: templates by r1
/// descending, μ by powers of the canonical generator, then coefficient tuples.
pub fn enumerate_weil(ctx: &ClassContext) -> Enumeration {
    let fq = &ctx.fq;
    let g = fq.canonical_generator();
    let units: Vec<FFElem> = (0..fq.order() - 1).map(|j| fq.pow(g, j as u128)).collect();
    let mut stats = EnumerationStats::default();
    let mut jobs = Vec::new();
    for (r1, r2) in templates(ctx) {
        let per = tuples_per_unit(ctx, r1);
        stats
            .per_template
            .push((r1, r2, per as u64 * units.len() as u64));
        for &mu in &units {
            for idx in 0..per {
                jobs.push((r1, r2, mu, idx));
            }
        }
    }
    stats.candidates = jobs.len() as u64;
    let results: Vec<(CharPoly, Result<WeilReport, WeilError>)> = jobs
        .par_iter()
        .map(|&(r1, r2, mu, idx)| {
            let m = candidate(ctx, r1, r2, mu, idx);
            let rep = check_weil_fast(&m, ctx);
            (m, rep)
        })
        .collect();
    let mut records = Vec::new();
    for (m, rep) in results {
        match rep {
            Ok(rep) if rep.verdict => {
                if rep.fast_path == FastPath::ShortcutC2Cor {
                    stats.shortcut_skips += 1;
                }
                records.push((m, rep));
            }
            Err(WeilError::NotIrreducibleOverK) => stats.reducible += 1,
            _ => {}
        }
    }
    stats.accepted = records.len() as u64;
    Enumeration { records, stats }
}

/// The unit μ and exponent of the constant term, when it is μ·p_v^e.
pub fn constant_shape(m: &CharPoly, ctx: &ClassContext) -> Option<(FFElem, usize)> {
    let c = m.constant();
    if c.is_zero() {
        return None;
    }
    let (u, e) = split_power(c, &ctx.pv);
    (u.deg() == 0).then(|| (u.coeff(0), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_ring::parse_apoly;

    fn fixture_ctx() -> ClassContext {
        let f = FieldSpec::prime(5).unwrap();
        let l = f.extend(&[f.from_int(2), f.from_int(4), f.one()]).unwrap();
        let t = parse_apoly(&f, "T", 'T').unwrap();
        ClassContext::new(f, t, 2, l, FFElem::ZERO, 3).unwrap()
    }

    fn cp(f: &Arc<FieldSpec>, c: &[&str]) -> CharPoly {
        CharPoly::new(c.iter().map(|s| parse_apoly(f, s, 'T').unwrap()).collect()).unwrap()
    }

    #[test]
    fn fixture_is_weil() {
        let ctx = fixture_ctx();
        let m = cp(&ctx.fq, &["T^2", "1+T", "3", "1"]);
        let rep = check_weil_separable(&m, &ctx).unwrap();
        assert!(rep.verdict);
        let shape = rep.shape.unwrap();
        assert_eq!((shape.n, shape.h), (Some(2), Some(3)));
        let fast = check_weil_rank3(&m, &ctx).unwrap();
        assert!(fast.verdict);
        assert_eq!(fast.fast_path.tag(), "rank3-s3-s6");
        assert!(linear_coeff_shortcut(&m, &ctx));
    }

    #[test]
    fn fixture_standard_form() {
        let ctx = fixture_ctx();
        let m = cp(&ctx.fq, &["T^2", "1+T", "3", "1"]);
        let s = to_standard_form(&m, &ctx).unwrap();
        assert_eq!(s.c1.display("T"), "T+3");
        assert_eq!(s.c2.display("T"), "T^2+4*T+1");
        assert_eq!(
            rank3_infinity_test(&s.c1, &s.c2, &ctx.fq),
            Some(InfinityCase::S3)
        );
    }

    #[test]
    fn reducible_detected() {
        let f = FieldSpec::prime(5).unwrap();
        // (x + T)(x^2 + 1)
        let m = cp(&f, &["T", "1", "T", "1"]);
        assert!(!is_irreducible_over_k(&m).unwrap());
        let m = cp(&f, &["T^2", "1+T", "3", "1"]);
        assert!(is_irreducible_over_k(&m).unwrap());
        // x^4 + T^2 + ... with two quadratic factors (x^2 + T)(x^2 + T + 1)
        let m = cp(&f, &["T^2+T", "0", "2*T+1", "0", "1"]);
        assert!(!is_irreducible_over_k(&m).unwrap());
    }

    #[test]
    fn shape_failure_for_rank_six() {
        let f = FieldSpec::prime(5).unwrap();
        let l = f.extend(&[f.from_int(2), f.from_int(4), f.one()]).unwrap();
        let ctx = ClassContext::new(
            f.clone(),
            parse_apoly(&f, "T", 'T').unwrap(),
            2,
            l,
            FFElem::ZERO,
            6,
        )
        .unwrap();
        let m = cp(&f, &["T^2", "1+T", "3", "1"]);
        let rep = check_weil(&m, &ctx).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failure, Some(FailureReason::Shape));
    }

    #[test]
    fn inseparable_square_root_of_t() {
        let f = FieldSpec::prime(2).unwrap();
        let t = parse_apoly(&f, "T", 'T').unwrap();
        let ctx = ClassContext::new(f.clone(), t, 1, f.clone(), FFElem::ZERO, 2).unwrap();
        let m = cp(&f, &["T", "0", "1"]);
        let rep = check_weil(&m, &ctx).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.shape.unwrap().inseparable, Some((1, 1)));
        let sq = cp(&f, &["T^2", "0", "1"]);
        assert_eq!(
            check_weil(&sq, &ctx).unwrap_err(),
            WeilError::NotIrreducibleOverK
        );
    }

    #[test]
    fn zero_cases() {
        let ctx = fixture_ctx();
        let f = &ctx.fq;
        let m = cp(f, &["T^2", "T", "1", "1"]);
        assert_eq!(rank3_zero_test(&m, &ctx).unwrap(), Some(ZeroCase::S4));
        let m = cp(f, &["T^2", "1+T", "3", "1"]);
        assert_eq!(rank3_zero_test(&m, &ctx).unwrap(), Some(ZeroCase::S6));
    }
}
