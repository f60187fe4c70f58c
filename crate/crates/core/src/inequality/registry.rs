//! The table of registered inequalities and their evaluation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{Estimate, InequalityReport, Relation};
use crate::bodies::BodyModel;
use crate::error::{GeometryError, Result};
use crate::functionals::{self, Exponent, POLE_GUARD};
use crate::numeric::unit_ball_volume;
use crate::quadrature::QuadratureRule;

/// Registered checks. Each one encodes a single inequality together
/// with its precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckId {
    #[serde(rename = "AF-MIXED")]
    AfMixed,
    #[serde(rename = "AF-MINUS-N")]
    AfMinusN,
    #[serde(rename = "ISO-I")]
    IsoI,
    #[serde(rename = "ISO-II")]
    IsoII,
    #[serde(rename = "ISO-III")]
    IsoIII,
    #[serde(rename = "ELLIPSOID-DOM")]
    EllipsoidDom,
    #[serde(rename = "SANTALO-MIXED")]
    SantaloMixed,
    #[serde(rename = "HOLDER-CHAIN")]
    HolderChain,
    #[serde(rename = "HOLDER-DUAL")]
    HolderDual,
    #[serde(rename = "MONO-DUAL")]
    MonoDual,
    #[serde(rename = "MONO-ZERO")]
    MonoZero,
    #[serde(rename = "MINUS-N-INTERP")]
    MinusNInterp,
    #[serde(rename = "ITH-HOLDER")]
    IthHolder,
    #[serde(rename = "ITH-SANTALO")]
    IthSantalo,
    #[serde(rename = "ITH-ISO-I")]
    IthIsoI,
    #[serde(rename = "ITH-ISO-II")]
    IthIsoII,
    #[serde(rename = "ITH-ISO-III")]
    IthIsoIII,
    #[serde(rename = "ITH-ISO-IV")]
    IthIsoIV,
    #[serde(rename = "ITH-ISO-V")]
    IthIsoV,
}

impl CheckId {
    pub const ALL: [CheckId; 19] = [
        Self::AfMixed,
        Self::AfMinusN,
        Self::IsoI,
        Self::IsoII,
        Self::IsoIII,
        Self::EllipsoidDom,
        Self::SantaloMixed,
        Self::HolderChain,
        Self::HolderDual,
        Self::MonoDual,
        Self::MonoZero,
        Self::MinusNInterp,
        Self::IthHolder,
        Self::IthSantalo,
        Self::IthIsoI,
        Self::IthIsoII,
        Self::IthIsoIII,
        Self::IthIsoIV,
        Self::IthIsoV,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::AfMixed => "AF-MIXED",
            Self::AfMinusN => "AF-MINUS-N",
            Self::IsoI => "ISO-I",
            Self::IsoII => "ISO-II",
            Self::IsoIII => "ISO-III",
            Self::EllipsoidDom => "ELLIPSOID-DOM",
            Self::SantaloMixed => "SANTALO-MIXED",
            Self::HolderChain => "HOLDER-CHAIN",
            Self::HolderDual => "HOLDER-DUAL",
            Self::MonoDual => "MONO-DUAL",
            Self::MonoZero => "MONO-ZERO",
            Self::MinusNInterp => "MINUS-N-INTERP",
            Self::IthHolder => "ITH-HOLDER",
            Self::IthSantalo => "ITH-SANTALO",
            Self::IthIsoI => "ITH-ISO-I",
            Self::IthIsoII => "ITH-ISO-II",
            Self::IthIsoIII => "ITH-ISO-III",
            Self::IthIsoIV => "ITH-ISO-IV",
            Self::IthIsoV => "ITH-ISO-V",
        }
    }

    /// The inequality being checked, in words.
    pub fn statement(&self) -> &'static str {
        match self {
            Self::AfMixed => "as_p^m(K_1..K_n) <= prod_{i<m} as_p(K_1..K_{n-m}, K_{n-i} x m); equality for dilates",
            Self::AfMinusN => "Alexandrov-Fenchel type inequality for the mixed (-n)-affine surface area",
            Self::IsoI => "p >= 0: as_p^n / as_p^n(B) <= (prod |K_i| / |B|)^{(n-p)/(n+p)}",
            Self::IsoII => "0 <= p <= n: as_p / as_p(B) <= (V(K_1..K_n) / |B|)^{(n-p)/(n+p)}",
            Self::IsoIII => "p >= n: as_p / as_p(B) <= (dual V(K_1..K_n) / |B|)^{(n-p)/(n+p)}",
            Self::EllipsoidDom => "as_p(K_1..K_n) <= as_p(E) when all K_i lie in E (p < n) or contain E (p > n)",
            Self::SantaloMixed => "p >= 0: as_p^n(K) as_p^n(K polar) <= n^{2n} prod |K_i||K_i polar| and as_p as_p(polar) <= as_p^2(B)",
            Self::HolderChain => "as_p <= as_r^a as_s^b when (n+p)(r-s)/((n+r)(p-s)) > 1",
            Self::HolderDual => "as_p <= as_r^{(n+r)/(n+p)} (n dual V(polars))^{(p-r)/(n+p)} when (n+p)/(n+r) > 1",
            Self::MonoDual => "(as_p / n dual V(polars))^{n+p} <= (as_r / n dual V(polars))^{n+r} for -n<r<p or r<p<-n",
            Self::MonoZero => "(as_p / as_0)^{(n+p)/p} <= (as_r / as_0)^{(n+r)/r}",
            Self::MinusNInterp => "as_p compared with as_{-n}^{2n(s-p)/((n+p)(n+s))} as_s",
            Self::IthHolder => "as_{p,i} <= as_{p,j}^{(k-i)/(k-j)} as_{p,k}^{(i-j)/(k-j)} for i between j and k",
            Self::IthSantalo => "p >= 0, 0 <= i <= n: as_{p,i}(K,L) as_{p,i}(K polar, L polar) <= as_p^2(B)",
            Self::IthIsoI => "p >= 0, 0 <= i <= n: upper isoperimetric bound for as_{p,i}(K)",
            Self::IthIsoII => "p >= 0, i >= n: lower isoperimetric bound for as_{p,i}(K)",
            Self::IthIsoIII => "-n < p < 0, i <= 0: lower isoperimetric bound; product bound involves the inverse Santalo constant",
            Self::IthIsoIV => "p < -n, i <= 0: bounds involving the inverse Santalo constant",
            Self::IthIsoV => "i <= 0: lower isoperimetric bounds for as_{-n,i}(K)",
        }
    }

    /// Whether the check takes a pair (K, L) instead of an n-tuple.
    pub fn uses_pair(&self) -> bool {
        matches!(self, Self::IthHolder | Self::IthSantalo)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| GeometryError::InvalidInput(format!("unknown check id {s:?}")))
    }
}

/// Scalar parameters of a check; each check reads the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckParams {
    pub p: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub m: usize,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            p: Exponent::Finite(1.0),
            r: Exponent::Finite(2.0),
            s: Exponent::Finite(0.0),
            m: 2,
            i: 1.0,
            j: 0.0,
            k: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Primal,
    Polar,
}

/// Bodies of one check instance, with lazily computed polars and a cache
/// of functional values shared by all checks on the same tuple.
pub struct CheckContext {
    bodies: Vec<BodyModel>,
    label: String,
    rule: QuadratureRule,
    floor: f64,
    polars: OnceLock<std::result::Result<Vec<BodyModel>, GeometryError>>,
    ball: BodyModel,
    cache: Mutex<HashMap<String, Estimate>>,
}

impl CheckContext {
    /// `bodies` is the n-tuple K_1..K_n; pair checks use K = K_1, L = K_2.
    pub fn new(bodies: Vec<BodyModel>, label: impl Into<String>, rule: QuadratureRule, floor: f64) -> Result<Self> {
        let n = bodies.first().map(|b| b.dim()).unwrap_or(0);
        if bodies.len() != n {
            return Err(GeometryError::InvalidInput(format!(
                "a check tuple in dimension {n} needs {n} bodies, got {}",
                bodies.len()
            )));
        }
        if let Some(b) = bodies.iter().find(|b| b.dim() != n) {
            return Err(GeometryError::DimensionMismatch { expected: n, got: b.dim() });
        }
        if rule.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: rule.dim() });
        }
        if !(floor >= 0.0) {
            return Err(GeometryError::InvalidInput(format!("tolerance must be nonnegative, got {floor}")));
        }
        Ok(Self {
            bodies,
            label: label.into(),
            rule,
            floor,
            polars: OnceLock::new(),
            ball: BodyModel::unit_ball(n),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.bodies.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bodies(&self) -> &[BodyModel] {
        &self.bodies
    }

    fn n(&self) -> f64 {
        self.dim() as f64
    }

    fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim())
    }

    /// as_p of the unit ball, n |B|.
    fn ball_asp(&self) -> Estimate {
        Estimate::exact(self.n() * self.ball_volume())
    }

    fn side(&self, side: Side) -> Result<&[BodyModel]> {
        match side {
            Side::Primal => Ok(&self.bodies),
            Side::Polar => self
                .polars
                .get_or_init(|| self.bodies.iter().map(|b| b.polar_body()).collect())
                .as_deref()
                .map_err(|e| e.clone()),
        }
    }

    fn cached(&self, key: String, compute: impl FnOnce() -> Result<Estimate>) -> Result<Estimate> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = compute()?;
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    fn pick(&self, side: Side, idx: &[usize]) -> Result<Vec<BodyModel>> {
        let bodies = self.side(side)?;
        Ok(idx.iter().map(|&k| bodies[k].clone()).collect())
    }

    fn mixed(&self, side: Side, idx: &[usize], p: Exponent) -> Result<Estimate> {
        self.cached(format!("mixed:{side:?}:{idx:?}:{p}"), || {
            Ok(functionals::mixed_p_affine(&self.pick(side, idx)?, p, &self.rule)?.into())
        })
    }

    fn all(&self) -> Vec<usize> {
        (0..self.dim()).collect()
    }

    fn minus_n(&self, side: Side, idx: &[usize]) -> Result<Estimate> {
        self.cached(format!("minus_n:{side:?}:{idx:?}"), || {
            Ok(functionals::mixed_minus_n(&self.pick(side, idx)?)?.into())
        })
    }

    fn volume(&self, side: Side, k: usize) -> Result<Estimate> {
        self.cached(format!("volume:{side:?}:{k}"), || {
            Ok(functionals::volume(&self.side(side)?[k], &self.rule)?.into())
        })
    }

    /// as_{p,i}(K, L) with K = body 0 and L = body 1, or L = B when `with_ball`.
    /// p = -n selects the maximum-based definition.
    fn ith(&self, side: Side, with_ball: bool, p: Exponent, i: f64) -> Result<Estimate> {
        self.cached(format!("ith:{side:?}:{with_ball}:{p}:{i}"), || {
            let bodies = self.side(side)?;
            let k = &bodies[0];
            let l = if with_ball { &self.ball } else { &bodies[1] };
            let v = if is_minus_n(p, self.dim()) {
                functionals::ith_mixed_minus_n(k, l, i)?
            } else {
                functionals::ith_mixed(k, l, p, i, &self.rule)?
            };
            Ok(v.into())
        })
    }

    fn dual_mixed(&self) -> Result<Estimate> {
        self.cached("dual_mixed".into(), || Ok(functionals::dual_mixed_volume(&self.bodies, &self.rule)?.into()))
    }

    fn mixed_volume(&self) -> Result<Estimate> {
        self.cached("mixed_volume".into(), || {
            Ok(functionals::mixed_volume_2d(&self.bodies[0], &self.bodies[1], &self.rule)?.into())
        })
    }

    fn all_equal(&self) -> bool {
        self.bodies.windows(2).all(|w| w[0] == w[1])
    }

    fn report(&self, check: CheckId, part: &str, params: &str, rel: Relation, lhs: Estimate, rhs: Estimate) -> InequalityReport {
        InequalityReport::evaluate(check, part, &self.digest(params), rel, lhs, rhs, self.floor)
    }

    fn skip(&self, check: CheckId, part: &str, params: &str, rel: Relation, reason: &str) -> InequalityReport {
        InequalityReport::skipped(check, part, &self.digest(params), rel, reason)
    }

    fn digest(&self, params: &str) -> String {
        format!("{} {params}", self.label)
    }
}

fn is_minus_n(p: Exponent, n: usize) -> bool {
    matches!(p, Exponent::Finite(v) if (v + n as f64).abs() < POLE_GUARD)
}

/// (n - p) / (n + p), extended by -1 at p = ±inf.
fn ratio(n: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Finite(p) => (n - p) / (n + p),
        _ => -1.0,
    }
}

fn finite(p: Exponent) -> Option<f64> {
    match p {
        Exponent::Finite(v) => Some(v),
        _ => None,
    }
}

fn nonneg(p: Exponent) -> bool {
    match p {
        Exponent::Finite(v) => v >= 0.0,
        Exponent::PosInf => true,
        Exponent::NegInf => false,
    }
}

fn off_pole(x: f64, n: f64) -> bool {
    (x + n).abs() >= POLE_GUARD
}

/// Evaluates one registered check on the context's bodies.
pub fn run_check(check: CheckId, params: &CheckParams, ctx: &CheckContext) -> Result<Vec<InequalityReport>> {
    let n = ctx.dim();
    let nf = n as f64;
    let all = ctx.all();
    let pd = params.p;
    use Relation::{Ge, Le};
    use Side::{Polar, Primal};

    let out = match check {
        CheckId::AfMixed | CheckId::AfMinusN => {
            let m = params.m;
            let minus = check == CheckId::AfMinusN;
            let desc = if minus { format!("m={m}") } else { format!("p={pd} m={m}") };
            let part = format!("m={m}");
            if m < 1 || m > n {
                vec![ctx.skip(check, &part, &desc, Le, "requires 1 <= m <= n")]
            } else if !minus && is_minus_n(pd, n) {
                vec![ctx.skip(check, &part, &desc, Le, "requires p != -n")]
            } else {
                let eval = |idx: &[usize]| if minus { ctx.minus_n(Primal, idx) } else { ctx.mixed(Primal, idx, pd) };
                let lhs = eval(&all)?.powi(m as i32);
                let mut rhs = Estimate::exact(1.0);
                for i in 0..m {
                    let mut idx: Vec<usize> = (0..n - m).collect();
                    idx.extend(std::iter::repeat_n(n - 1 - i, m));
                    rhs = rhs.mul(eval(&idx)?);
                }
                vec![ctx.report(check, &part, &desc, Le, lhs, rhs)]
            }
        }
        CheckId::IsoI => {
            let desc = format!("p={pd}");
            if !nonneg(pd) {
                vec![ctx.skip(check, "i", &desc, Le, "requires p >= 0")]
            } else {
                let lhs = ctx.mixed(Primal, &all, pd)?.div(ctx.ball_asp()).powi(n as i32);
                let mut rhs = Estimate::exact(1.0);
                for k in 0..n {
                    rhs = rhs.mul(ctx.volume(Primal, k)?.scale(1.0 / ctx.ball_volume()).pow(ratio(nf, pd)));
                }
                vec![ctx.report(check, "i", &desc, Le, lhs, rhs)]
            }
        }
        CheckId::IsoII => {
            let desc = format!("p={pd}");
            let in_range = matches!(pd, Exponent::Finite(v) if (0.0..=nf).contains(&v));
            if !in_range {
                vec![ctx.skip(check, "ii", &desc, Le, "requires 0 <= p <= n")]
            } else if n != 2 && !ctx.all_equal() {
                vec![ctx.skip(check, "ii", &desc, Le, "mixed volume restricted to n = 2 or all-equal bodies")]
            } else {
                let v = if n == 2 { ctx.mixed_volume()? } else { ctx.volume(Primal, 0)? };
                let lhs = ctx.mixed(Primal, &all, pd)?.div(ctx.ball_asp());
                let rhs = v.scale(1.0 / ctx.ball_volume()).pow(ratio(nf, pd));
                let note = if n == 2 { "planar mixed volume" } else { "all-equal bodies: V = |K|" };
                vec![ctx.report(check, "ii", &desc, Le, lhs, rhs).with_note(note)]
            }
        }
        CheckId::IsoIII => {
            let desc = format!("p={pd}");
            let in_range = match pd {
                Exponent::Finite(v) => v >= nf,
                _ => true,
            };
            if !in_range {
                vec![ctx.skip(check, "iii", &desc, Le, "requires p >= n")]
            } else {
                let lhs = ctx.mixed(Primal, &all, pd)?.div(ctx.ball_asp());
                let rhs = ctx.dual_mixed()?.scale(1.0 / ctx.ball_volume()).pow(ratio(nf, pd));
                vec![ctx.report(check, "iii", &desc, Le, lhs, rhs)]
            }
        }
        CheckId::EllipsoidDom => {
            let desc = format!("p={pd}");
            let (below, above) = match pd {
                Exponent::Finite(v) => (v >= 0.0 && v <= nf, v > nf),
                Exponent::PosInf => (false, true),
                Exponent::NegInf => (false, false),
            };
            if !below && !above {
                vec![ctx.skip(check, "dom", &desc, Le, "requires 0 <= p <= n or p > n")]
            } else {
                let radius = if below { circumradius(ctx)? * (1.0 + 1e-3) } else { inradius(ctx)? * (1.0 - 1e-3) };
                let e = BodyModel::ball(n, radius)?;
                let lhs: Estimate = ctx.mixed(Primal, &all, pd)?;
                let rhs: Estimate = functionals::lp_affine(&e, pd, &ctx.rule)?.into();
                let note = if below { "E = circumscribed ball" } else { "E = inscribed ball" };
                vec![ctx.report(check, "dom", &format!("{desc} r_E={radius:.6}"), Le, lhs, rhs).with_note(note)]
            }
        }
        CheckId::SantaloMixed => {
            let desc = format!("p={pd}");
            if !nonneg(pd) {
                vec![
                    ctx.skip(check, "a", &desc, Le, "requires p >= 0"),
                    ctx.skip(check, "b", &desc, Le, "requires p >= 0"),
                ]
            } else {
                let a = ctx.mixed(Primal, &all, pd)?;
                let b = ctx.mixed(Polar, &all, pd)?;
                let mut vols = Estimate::exact(nf.powi(2 * n as i32));
                for k in 0..n {
                    vols = vols.mul(ctx.volume(Primal, k)?).mul(ctx.volume(Polar, k)?);
                }
                let lhs_a = a.powi(n as i32).mul(b.powi(n as i32));
                let ball2 = ctx.ball_asp().powi(2);
                vec![
                    ctx.report(check, "a", &desc, Le, lhs_a, vols),
                    ctx.report(check, "b", &desc, Le, a.mul(b), ball2),
                ]
            }
        }
        CheckId::HolderChain => {
            let desc = format!("p={pd} r={} s={}", params.r, params.s);
            match (finite(pd), finite(params.r), finite(params.s)) {
                (Some(p), Some(r), Some(s)) if off_pole(p, nf) && off_pole(r, nf) && off_pole(s, nf) => {
                    let cond = (nf + p) * (r - s) / ((nf + r) * (p - s));
                    if !(cond > 1.0 && cond.is_finite()) {
                        vec![ctx.skip(check, "i", &desc, Le, &format!("condition value {cond} is not > 1"))]
                    } else {
                        let a = (p - s) * (nf + r) / ((r - s) * (nf + p));
                        let b = (r - p) * (nf + s) / ((r - s) * (nf + p));
                        let lhs = ctx.mixed(Primal, &all, pd)?;
                        let rhs = ctx.mixed(Primal, &all, params.r)?.pow(a).mul(ctx.mixed(Primal, &all, params.s)?.pow(b));
                        vec![ctx.report(check, "i", &desc, Le, lhs, rhs)]
                    }
                }
                _ => vec![ctx.skip(check, "i", &desc, Le, "requires finite p, r, s different from -n")],
            }
        }
        CheckId::HolderDual => {
            let desc = format!("p={pd} r={}", params.r);
            match (finite(pd), finite(params.r)) {
                (Some(p), Some(r)) if off_pole(p, nf) && off_pole(r, nf) && (nf + p) / (nf + r) > 1.0 => {
                    let lhs = ctx.mixed(Primal, &all, pd)?;
                    let dual = ctx.mixed(Primal, &all, Exponent::PosInf)?;
                    let rhs = ctx
                        .mixed(Primal, &all, params.r)?
                        .pow((nf + r) / (nf + p))
                        .mul(dual.pow((p - r) / (nf + p)));
                    vec![ctx.report(check, "ii", &desc, Le, lhs, rhs)]
                }
                _ => vec![ctx.skip(check, "ii", &desc, Le, "requires (n+p)/(n+r) > 1")],
            }
        }
        CheckId::MonoDual => {
            let desc = format!("p={pd} r={}", params.r);
            match (finite(pd), finite(params.r)) {
                (Some(p), Some(r)) if (-nf < r && r < p) || (r < p && p < -nf) => {
                    let dual = ctx.mixed(Primal, &all, Exponent::PosInf)?;
                    let lhs = ctx.mixed(Primal, &all, pd)?.div(dual).pow(nf + p);
                    let rhs = ctx.mixed(Primal, &all, params.r)?.div(dual).pow(nf + r);
                    vec![ctx.report(check, "i", &desc, Le, lhs, rhs)]
                }
                _ => vec![ctx.skip(check, "i", &desc, Le, "requires -n < r < p or r < p < -n")],
            }
        }
        CheckId::MonoZero => {
            let desc = format!("p={pd} r={}", params.r);
            let ok = |p: f64, r: f64| {
                (0.0 < p && p < r) || (p < r && r < -nf) || (r < -nf && p > 0.0) || (-nf < p && p < r && r < 0.0)
            };
            match (finite(pd), finite(params.r)) {
                (Some(p), Some(r)) if ok(p, r) => {
                    let zero = ctx.mixed(Primal, &all, Exponent::Finite(0.0))?;
                    let lhs = ctx.mixed(Primal, &all, pd)?.div(zero).pow((nf + p) / p);
                    let rhs = ctx.mixed(Primal, &all, params.r)?.div(zero).pow((nf + r) / r);
                    vec![ctx.report(check, "ii", &desc, Le, lhs, rhs)]
                }
                _ => vec![ctx.skip(check, "ii", &desc, Le, "exponent pair outside the admissible cases")],
            }
        }
        CheckId::MinusNInterp => {
            let desc = format!("p={pd} s={}", params.s);
            match (finite(pd), finite(params.s)) {
                (Some(p), Some(s)) if off_pole(p, nf) && off_pole(s, nf) => {
                    let e = 2.0 * nf * (s - p) / ((nf + p) * (nf + s));
                    let (part, rel) = if e >= 0.0 { ("iii", Le) } else { ("iv", Ge) };
                    let lhs = ctx.mixed(Primal, &all, pd)?;
                    let rhs = ctx.minus_n(Primal, &all)?.pow(e).mul(ctx.mixed(Primal, &all, params.s)?);
                    vec![ctx.report(check, part, &desc, rel, lhs, rhs)]
                }
                _ => vec![ctx.skip(check, "iii", &desc, Le, "requires finite p, s different from -n")],
            }
        }
        CheckId::IthHolder => {
            let (i, j, k) = (params.i, params.j, params.k);
            let desc = format!("p={pd} i={i} j={j} k={k}");
            if (j < i && i < k) || (k < i && i < j) {
                let lhs = ctx.ith(Primal, false, pd, i)?;
                let rhs = ctx
                    .ith(Primal, false, pd, j)?
                    .pow((k - i) / (k - j))
                    .mul(ctx.ith(Primal, false, pd, k)?.pow((i - j) / (k - j)));
                vec![ctx.report(check, "holder", &desc, Le, lhs, rhs)]
            } else {
                vec![ctx.skip(check, "holder", &desc, Le, "requires i strictly between j and k")]
            }
        }
        CheckId::IthSantalo => {
            let i = params.i;
            let desc = format!("p={pd} i={i}");
            if nonneg(pd) && (0.0..=nf).contains(&i) {
                let lhs = ctx.ith(Primal, false, pd, i)?.mul(ctx.ith(Polar, false, pd, i)?);
                vec![ctx.report(check, "santalo", &desc, Le, lhs, ctx.ball_asp().powi(2))]
            } else {
                vec![ctx.skip(check, "santalo", &desc, Le, "requires p >= 0 and 0 <= i <= n")]
            }
        }
        CheckId::IthIsoI | CheckId::IthIsoII | CheckId::IthIsoIII | CheckId::IthIsoIV => {
            let i = params.i;
            let desc = format!("p={pd} i={i}");
            let p_val = pd.as_f64();
            let (admissible, rel, reason) = match check {
                CheckId::IthIsoI => (nonneg(pd) && (0.0..=nf).contains(&i), Le, "requires p >= 0 and 0 <= i <= n"),
                CheckId::IthIsoII => (nonneg(pd) && i >= nf, Ge, "requires p >= 0 and i >= n"),
                CheckId::IthIsoIII => (-nf < p_val && p_val < 0.0 && i <= 0.0, Ge, "requires -n < p < 0 and i <= 0"),
                _ => (p_val < -nf && p_val.is_finite() && i <= 0.0, Ge, "requires p < -n and i <= 0"),
            };
            if !admissible {
                vec![
                    ctx.skip(check, "ratio", &desc, rel, reason),
                    ctx.skip(check, "product", &desc, rel, reason),
                ]
            } else {
                let ratio_lhs = ctx.ith(Primal, true, pd, i)?.div(ctx.ball_asp());
                let ratio_rhs = ctx
                    .volume(Primal, 0)?
                    .scale(1.0 / ctx.ball_volume())
                    .pow(ratio(nf, pd) * (nf - i) / nf);
                let prod_lhs = ctx.ith(Primal, true, pd, i)?.mul(ctx.ith(Polar, true, pd, i)?);
                let prod_rhs = ctx.ball_asp().powi(2);
                let with_c = "bound involves the inverse Santalo constant c, reported with c omitted";
                let ratio_report = ctx.report(check, "ratio", &desc, rel, ratio_lhs, ratio_rhs);
                let prod_report = ctx.report(check, "product", &desc, rel, prod_lhs, prod_rhs);
                match check {
                    CheckId::IthIsoIII => vec![ratio_report, prod_report.report_only(with_c)],
                    CheckId::IthIsoIV => vec![ratio_report.report_only(with_c), prod_report.report_only(with_c)],
                    _ => vec![ratio_report, prod_report],
                }
            }
        }
        CheckId::IthIsoV => {
            let i = params.i;
            let desc = format!("i={i}");
            if i <= 0.0 {
                let minus = Exponent::Finite(-nf);
                let ratio_lhs = ctx.ith(Primal, true, minus, i)?;
                let ratio_rhs = ctx.volume(Primal, 0)?.scale(1.0 / ctx.ball_volume()).pow((nf - i) / nf);
                let prod_lhs = ratio_lhs.mul(ctx.ith(Polar, true, minus, i)?);
                vec![
                    ctx.report(check, "ratio", &desc, Ge, ratio_lhs, ratio_rhs),
                    ctx.report(check, "product", &desc, Ge, prod_lhs, Estimate::exact(1.0)),
                ]
            } else {
                vec![
                    ctx.skip(check, "ratio", &desc, Ge, "requires i <= 0"),
                    ctx.skip(check, "product", &desc, Ge, "requires i <= 0"),
                ]
            }
        }
    };
    Ok(out)
}

/// Max over rule nodes of the support functions of the tuple.
fn circumradius(ctx: &CheckContext) -> Result<f64> {
    let mut best: f64 = 0.0;
    for b in ctx.bodies() {
        for u in ctx.rule.nodes() {
            best = best.max(b.support(u)?);
        }
    }
    Ok(best)
}

/// Min over rule nodes of the radial functions of the tuple.
fn inradius(ctx: &CheckContext) -> Result<f64> {
    let mut best = f64::INFINITY;
    for b in ctx.bodies() {
        for u in ctx.rule.nodes() {
            best = best.min(b.radial(u)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::Verdict;

    fn ctx(bodies: Vec<BodyModel>) -> CheckContext {
        let rule = QuadratureRule::with_size(bodies[0].dim(), None, 0).unwrap();
        CheckContext::new(bodies, "t", rule, 1e-8).unwrap()
    }

    #[test]
    fn af_mixed_on_dilated_balls_is_equality() {
        let c = ctx(vec![BodyModel::unit_ball(2), BodyModel::ball(2, 2.0).unwrap()]);
        let params = CheckParams { p: Exponent::Finite(2.0), m: 2, ..Default::default() };
        let r = &run_check(CheckId::AfMixed, &params, &c).unwrap()[0];
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.equality_flag, "{r:?}");
    }

    #[test]
    fn iso_iii_saturated_by_balls_at_infinity() {
        let c = ctx(vec![BodyModel::unit_ball(2), BodyModel::unit_ball(2)]);
        let params = CheckParams { p: Exponent::PosInf, ..Default::default() };
        let r = &run_check(CheckId::IsoIII, &params, &c).unwrap()[0];
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.lhs - r.rhs).abs() < 1e-12);
    }

    #[test]
    fn holder_chain_precondition_arithmetic() {
        let c = ctx(vec![BodyModel::unit_ball(2), BodyModel::unit_ball(2)]);
        let run = |p: f64, r: f64, s: f64| {
            let params = CheckParams { p: p.into(), r: r.into(), s: s.into(), ..Default::default() };
            run_check(CheckId::HolderChain, &params, &c).unwrap()[0].verdict
        };
        // (n+p)(r-s)/((n+r)(p-s)) with n = 2:
        // (2, 1, 3): 4 * -2 / (3 * -1) = 8/3 > 1.
        assert_eq!(run(2.0, 1.0, 3.0), Verdict::Pass);
        // (0, 1, 2): 2 * -1 / (3 * -2) = 1/3.
        assert_eq!(run(0.0, 1.0, 2.0), Verdict::SkippedPrecondition);
    }

    #[test]
    fn check_ids_round_trip() {
        for c in CheckId::ALL {
            assert_eq!(c.as_str().parse::<CheckId>().unwrap(), c);
        }
        assert!("NOPE".parse::<CheckId>().is_err());
    }
}
