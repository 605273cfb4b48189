//! Mass-shell densities on momentum space — the Leray densities `ω±_m`, the
//! normalized shells `ε±_m = ω±_m/(2π)`, the principal-value densities
//! `e±_m` and `e_m = e⁺_m − e⁻_m`, and the four `iε`-regularized pole densities
//! `ō(m,±,±)` — together with their massless position-space twins (light-cone
//! densities `ε±`, `e±`, `e`, `ō(±,±)`).
//!
//! Definitions (pairings against a 4D test function `u`):
//! - `⟨ω[p₀∓E_m], u⟩ = ∫d³p u(±E_m, p)` (the plain Leray density);
//! - `⟨ω±_m, u⟩ = ±∫d³p/(2E_m) u(±E_m, p)`;
//! - `⟨e±_m, u⟩ = (1/4π²)∫d³p (1/E_m) pv∫dp₀ u(p₀, p)/(p₀ ∓ E_m)`;
//! - `⟨ō(m,s₁,s₂), u⟩ = lim_{ε→0⁺} ∫d⁴p u/(E_m (p₀ + s₁E_m + i s₂ ε))`.
//!
//! The massless position-space twins are the same functionals with `m = 0`
//! applied to a function of `x = (t, x⊥)`: e.g. `ε± = ±δ(t∓r)/(4πr) d⁴x` and
//! `e = 1/(2π²(t²−r²))` (principal value).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::kernels::{ladder_temporal, pv_temporal};
use crate::parallel;
use crate::quadrature::{extrapolate_ladder, PairingResult, QuadConfig, VecQuad};
pub use crate::report::CheckLine;
use crate::shell::{default_panel, envelope_groups, shell_integrate, ShellBatch};
use crate::testfns::{Sign, TestFn};
use crate::{Error, Mass, Result, C64};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Family of a mass-shell density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ShellFamily {
    /// The plain Leray density `ω[p₀ ∓ E_m]` (no `1/(2E)` factor).
    OmegaLeray(Sign),
    /// `ω±_m`.
    Omega(Sign),
    /// `ε±_m = ω±_m/(2π)`.
    Eps(Sign),
    /// The principal-value density `e±_m`.
    EPv(Sign),
    /// `e_m = e⁺_m − e⁻_m`.
    EFull,
    /// `ō(m, s₁, s₂)`.
    Opp(Sign, Sign),
}

/// Whether a density lives on momentum space or (massless only) on position
/// space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Space {
    /// Momentum space, any mass.
    Momentum,
    /// Position space; only the massless twins exist.
    Position,
}

/// A mass-shell density: family, mass and space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomShellDist {
    /// Which density.
    pub family: ShellFamily,
    /// The mass `m`.
    pub mass: Mass,
    /// Momentum or position space.
    pub space: Space,
}

impl MomShellDist {
    /// A momentum-space density.
    pub fn momentum(family: ShellFamily, mass: Mass) -> Self {
        Self { family, mass, space: Space::Momentum }
    }

    /// A massless position-space twin.
    pub fn position(family: ShellFamily) -> Self {
        Self { family, mass: Mass::zero(), space: Space::Position }
    }

    /// Parses the CLI grammar (`omega+`, `eps-`, `epv+`, `e`, `opp-+`, …,
    /// optionally suffixed with `@pos`; `leray±` names the plain Leray
    /// density).
    pub fn parse(name: &str, mass: Mass) -> Result<Self> {
        let (base, space) = match name.strip_suffix("@pos") {
            Some(b) => (b, Space::Position),
            None => (name, Space::Momentum),
        };
        let sign = |c: char| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("unknown distribution name {name:?}"))),
        };
        let last = |s: &str| s.chars().last().ok_or_else(|| Error::InvalidArgument("empty distribution name".into()));
        let family = if base == "e" {
            ShellFamily::EFull
        } else if let Some(rest) = base.strip_prefix("opp") {
            let cs: Vec<char> = rest.chars().collect();
            if cs.len() != 2 {
                return Err(Error::InvalidArgument(format!("unknown distribution name {name:?}")));
            }
            ShellFamily::Opp(sign(cs[0])?, sign(cs[1])?)
        } else {
            let s = sign(last(base)?)?;
            match &base[..base.len() - 1] {
                "omega" => ShellFamily::Omega(s),
                "leray" => ShellFamily::OmegaLeray(s),
                "eps" => ShellFamily::Eps(s),
                "epv" => ShellFamily::EPv(s),
                _ => return Err(Error::InvalidArgument(format!("unknown distribution name {name:?}"))),
            }
        };
        if space == Space::Position && mass.value() != 0.0 {
            return Err(Error::InvalidArgument("position-space twins exist only for mass 0".into()));
        }
        Ok(Self { family, mass, space })
    }
}

impl fmt::Display for ShellFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShellFamily::OmegaLeray(s) => write!(f, "leray{}", s.symbol()),
            ShellFamily::Omega(s) => write!(f, "omega{}", s.symbol()),
            ShellFamily::Eps(s) => write!(f, "eps{}", s.symbol()),
            ShellFamily::EPv(s) => write!(f, "epv{}", s.symbol()),
            ShellFamily::EFull => write!(f, "e"),
            ShellFamily::Opp(a, b) => write!(f, "opp{}{}", a.symbol(), b.symbol()),
        }
    }
}

impl fmt::Display for MomShellDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.space == Space::Position {
            write!(f, "@pos")?;
        }
        Ok(())
    }
}

impl FromStr for ShellFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MomShellDist::parse(s, Mass::zero()).map(|d| d.family)
    }
}

/// Raw shell functionals from which every density is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Prim {
    /// `∫d³p u(sE, p)`.
    Leray(Sign),
    /// `∫d³p u(sE, p)/(2E)`.
    Shell(Sign),
    /// `∫d³p (1/E) pv∫dp₀ u/(p₀ − sE)`.
    Pv(Sign),
    /// `lim ∫d³p (1/E) ∫dp₀ u/(p₀ + s₁E + i s₂ ε)`.
    Opp(Sign, Sign),
}

/// A primitive value with its extrapolation spread (zero when no ladder is
/// involved).
#[derive(Clone, Copy, Debug)]
pub(crate) struct PrimValue {
    pub result: PairingResult,
    pub spread: f64,
}

/// Evaluates the primitives for a batch of functions sharing one envelope.
/// Returns `out[f][prim]`.
pub(crate) fn shell_prims_batch(fns: &[&TestFn], m: f64, prims: &[Prim], cfg: &QuadConfig) -> Result<Vec<Vec<PrimValue>>> {
    let batch = ShellBatch::new(fns)?;
    let nk = cfg.pv_count;
    let widths: Vec<usize> = prims.iter().map(|p| if matches!(p, Prim::Opp(..)) { nk } else { 1 }).collect();
    let offsets: Vec<usize> = widths.iter().scan(0, |acc, w| Some(std::mem::replace(acc, *acc + w))).collect();
    let n_out: usize = widths.iter().sum();
    let nj = batch.nj();
    let kcfg = cfg.tightened(0.1);
    let mut gbuf = vec![C64::new(0.0, 0.0); nj];
    let panel = default_panel(&batch, batch.temporal.sigma);
    let raw = shell_integrate(
        &batch,
        m,
        n_out,
        panel,
        |_rho, e, t, out| {
            let mut err = 0.0_f64;
            let mut pv_cache: [Option<VecQuad>; 2] = [None, None];
            for (pi, prim) in prims.iter().enumerate() {
                let col = offsets[pi];
                match *prim {
                    Prim::Leray(s) | Prim::Shell(s) => {
                        t.values(s.value() * e, &mut gbuf);
                        let w = if matches!(prim, Prim::Shell(_)) { 0.5 / e } else { 1.0 };
                        for j in 0..nj {
                            out[j * n_out + col] = gbuf[j] * w;
                        }
                    }
                    Prim::Pv(s) => {
                        let slot = usize::from(s == Sign::Minus);
                        let r = pv_cache[slot].get_or_insert_with(|| pv_temporal(t, s.value() * e, &kcfg));
                        for j in 0..nj {
                            out[j * n_out + col] = r.values[j] / e;
                            err = err.max(r.errors[j] / e);
                        }
                    }
                    Prim::Opp(s1, s2) => {
                        let r = ladder_temporal(t, -s1.value() * e, s2.value(), &kcfg);
                        for j in 0..nj {
                            for k in 0..nk {
                                out[j * n_out + col + k] = r.values[j * nk + k] / e;
                                err = err.max(r.errors[j * nk + k] / e);
                            }
                        }
                    }
                }
            }
            err
        },
        cfg,
    );
    let mut out = Vec::with_capacity(fns.len());
    for f in 0..fns.len() {
        let mut row = Vec::with_capacity(prims.len());
        for (pi, prim) in prims.iter().enumerate() {
            let base = f * n_out + offsets[pi];
            let pv = match prim {
                Prim::Opp(..) => {
                    let mut sub = VecQuad::zeros(nk);
                    sub.values.copy_from_slice(&raw.values[base..base + nk]);
                    sub.errors.copy_from_slice(&raw.errors[base..base + nk]);
                    sub.evaluations = raw.evaluations;
                    sub.converged = raw.converged;
                    let (ex, spreads) = extrapolate_ladder(&sub, 1, cfg);
                    PrimValue { result: ex.component(0), spread: spreads[0] }
                }
                _ => PrimValue { result: raw.component(base), spread: 0.0 },
            };
            row.push(pv);
        }
        out.push(row);
    }
    Ok(out)
}

/// Evaluates the primitives for arbitrary functions (grouped by envelope,
/// groups processed in parallel). Returns `out[f][prim]`.
pub(crate) fn shell_prims(fns: &[TestFn], m: f64, prims: &[Prim], cfg: &QuadConfig) -> Result<Vec<Vec<PrimValue>>> {
    let groups = envelope_groups(fns);
    let results = parallel::map(&groups, |g| {
        let refs: Vec<&TestFn> = g.iter().map(|&i| &fns[i]).collect();
        shell_prims_batch(&refs, m, prims, cfg)
    });
    let mut out: Vec<Option<Vec<PrimValue>>> = vec![None; fns.len()];
    for (g, r) in groups.iter().zip(results) {
        for (&i, row) in g.iter().zip(r?) {
            out[i] = Some(row);
        }
    }
    Ok(out.into_iter().map(|r| r.expect("every function belongs to a group")).collect())
}

/// The primitives needed for one family, and how to combine them.
fn family_plan(family: ShellFamily) -> (Vec<Prim>, Vec<C64>) {
    let r = |x: f64| C64::new(x, 0.0);
    let pv_norm = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    match family {
        ShellFamily::OmegaLeray(s) => (vec![Prim::Leray(s)], vec![r(1.0)]),
        ShellFamily::Omega(s) => (vec![Prim::Shell(s)], vec![r(s.value())]),
        ShellFamily::Eps(s) => (vec![Prim::Shell(s)], vec![r(s.value() / TWO_PI)]),
        ShellFamily::EPv(s) => (vec![Prim::Pv(s)], vec![r(pv_norm)]),
        ShellFamily::EFull => (vec![Prim::Pv(Sign::Plus), Prim::Pv(Sign::Minus)], vec![r(pv_norm), r(-pv_norm)]),
        ShellFamily::Opp(a, b) => (vec![Prim::Opp(a, b)], vec![r(1.0)]),
    }
}

/// Pairs several densities of one mass against several functions in one
/// pass per envelope group. Returns `out[f][d]` with the ladder spread
/// (maximum over contributing primitives).
pub(crate) fn pair_families(families: &[ShellFamily], m: f64, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<Vec<(PairingResult, f64)>>> {
    let mut prims: Vec<Prim> = Vec::new();
    let plans: Vec<(Vec<usize>, Vec<C64>)> = families
        .iter()
        .map(|&fam| {
            let (ps, cs) = family_plan(fam);
            let idx = ps
                .into_iter()
                .map(|p| match prims.iter().position(|q| *q == p) {
                    Some(i) => i,
                    None => {
                        prims.push(p);
                        prims.len() - 1
                    }
                })
                .collect();
            (idx, cs)
        })
        .collect();
    let raw = shell_prims(fns, m, &prims, cfg)?;
    Ok(raw
        .iter()
        .map(|row| {
            plans
                .iter()
                .map(|(idx, cs)| {
                    let parts: Vec<(C64, &PairingResult)> = idx.iter().zip(cs).map(|(&i, &c)| (c, &row[i].result)).collect();
                    let spread = idx.iter().map(|&i| row[i].spread).fold(0.0, f64::max);
                    (PairingResult::combine(&parts), spread)
                })
                .collect()
        })
        .collect())
}

fn check_dim4(u: &TestFn) -> Result<()> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: u.dim() });
    }
    Ok(())
}

/// Pairs a momentum-space density with a 4D test function of momentum.
pub fn pair_momentum(d: &MomShellDist, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    if d.space != Space::Momentum {
        return Err(Error::InvalidArgument(format!("{d} is a position-space density")));
    }
    check_dim4(u)?;
    cfg.validate()?;
    Ok(pair_families(&[d.family], d.mass.value(), std::slice::from_ref(u), cfg)?[0][0].0)
}

/// Pairs a massless position-space twin with a 4D test function of `x`.
pub fn pair_position_m0(d: &MomShellDist, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    if d.space != Space::Position || d.mass.value() != 0.0 {
        return Err(Error::InvalidArgument(format!("{d} is not a massless position-space density")));
    }
    check_dim4(u)?;
    cfg.validate()?;
    Ok(pair_families(&[d.family], 0.0, std::slice::from_ref(u), cfg)?[0][0].0)
}

/// Pairs any mass-shell density (dispatching on its space).
pub fn pair(d: &MomShellDist, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    match d.space {
        Space::Momentum => pair_momentum(d, u, cfg),
        Space::Position => pair_position_m0(d, u, cfg),
    }
}

/// Tolerance on the `ō` residuals.
pub const OPP_TOL: f64 = 1e-5;
/// Tolerance on the `ε`-ladder extrapolation spread.
pub const OPP_SPREAD_TOL: f64 = 1e-6;

/// Checks the four inversion identities `ō = (2π)²(e ± iε)` and the two
/// sum and difference identities on `count` seeded random test
/// functions.
pub fn check_opp_decomposition(m: Mass, seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let fns = TestFn::random_family(seed, 4, count);
    check_opp_decomposition_on(m, &fns, cfg)
}

/// [`check_opp_decomposition`] on explicit test functions.
pub fn check_opp_decomposition_on(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    use ShellFamily::*;
    use Sign::*;
    let fams = [Opp(Minus, Minus), Opp(Minus, Plus), Opp(Plus, Minus), Opp(Plus, Plus), EPv(Plus), EPv(Minus), Eps(Plus), Eps(Minus)];
    let vals = pair_families(&fams, m.value(), fns, cfg)?;
    type Combo = (&'static str, fn(&[C64]) -> (C64, C64));
    let combos: [Combo; 6] = [
        ("opp(-,-) = (2pi)^2 (e+ + i eps+)", |v| (v[0], c4() * (v[4] + ii() * v[6]))),
        ("opp(-,+) = (2pi)^2 (e+ - i eps+)", |v| (v[1], c4() * (v[4] - ii() * v[6]))),
        ("opp(+,-) = (2pi)^2 (e- - i eps-)", |v| (v[2], c4() * (v[5] - ii() * v[7]))),
        ("opp(+,+) = (2pi)^2 (e- + i eps-)", |v| (v[3], c4() * (v[5] + ii() * v[7]))),
        ("opp(+,+) - opp(+,-) = 2 (2pi)^2 i eps-", |v| (v[3] - v[2], 2.0 * c4() * ii() * v[7])),
        ("opp(-,-) + opp(-,+) = 2 (2pi)^2 e+", |v| (v[0] + v[1], 2.0 * c4() * v[4])),
    ];
    let mut lines = Vec::new();
    for (name, f) in combos {
        let mut residual = 0.0_f64;
        let mut spread = 0.0_f64;
        for row in &vals {
            let v: Vec<C64> = row.iter().map(|(r, _)| r.value).collect();
            let (lhs, rhs) = f(&v);
            residual = residual.max((lhs - rhs).norm());
            spread = spread.max(row[..4].iter().map(|(_, s)| *s).fold(0.0, f64::max));
        }
        let mut line = CheckLine::new(name, m.value(), residual, OPP_TOL);
        line.spread = Some(spread);
        line.pass = residual <= OPP_TOL && spread <= OPP_SPREAD_TOL;
        lines.push(line);
    }
    Ok(lines)
}

fn c4() -> C64 {
    C64::new(TWO_PI * TWO_PI, 0.0)
}

fn ii() -> C64 {
    C64::new(0.0, 1.0)
}
