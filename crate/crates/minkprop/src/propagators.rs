//! The scalar propagator family `D±_m`, `D_m`, `D°_m`, `D•_m`, `D^ret_m`,
//! `D^adv_m`, `D^F_m` as pairing functionals `u ↦ ⟨D η, u⟩` on position-space
//! test functions (`η = d⁴x`), together with the Klein–Gordon residuals, the
//! massless light-cone closed forms, time-windowed pairings and the identity
//! suite.
//!
//! Canonical route (every mass): one shell pass over `F⁺u`,
//! - `⟨D⁺η, u⟩ = ⟨ε⁺_m, F⁺u⟩`, `⟨D⁻η, u⟩ = ⟨ε⁻_m, F⁺u⟩`,
//! - `D = D⁺ + D⁻`, `D° = D⁺ − D⁻`,
//! - `⟨iD•η, u⟩ = −½⟨e_m, F⁺u⟩`,
//! - `D^ret = D• + ½D`, `D^adv = D• − ½D`, `D^F = D• + ½D°`.
//!
//! Massless cross-check route (light-cone densities of `x`):
//! `D^ret = −iε⁺`, `D^adv = iε⁻`, `D = −i(ε⁺+ε⁻)`, `D° = −e`,
//! `D• = −(i/2)(ε⁺−ε⁻)`, `D^F = −½e − (i/2)(ε⁺−ε⁻)`,
//! `D± = ∓½e − (i/2)(ε⁺+ε⁻)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::kernels::half_line_temporal;
use crate::mass_shell::{pair_families, ShellFamily};
use crate::quadrature::{richardson, PairingResult, QuadConfig};
use crate::report::CheckLine;
use crate::shell::{default_panel, envelope_groups, shell_integrate, ShellBatch};
use crate::testfns::{Sign, Term, TestFn};
use crate::{parallel, Error, Mass, Result, C64};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Which member of the propagator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PropTag {
    /// `D⁺_m`.
    Dplus,
    /// `D⁻_m`.
    Dminus,
    /// `D_m = D⁺_m + D⁻_m` (the commutator function).
    D,
    /// `D°_m = D⁺_m − D⁻_m`.
    Dcirc,
    /// `D•_m` (the principal-value propagator).
    Dbullet,
    /// The retarded propagator.
    Dret,
    /// The advanced propagator.
    Dadv,
    /// The Feynman propagator.
    DF,
}

impl PropTag {
    /// All eight kinds.
    pub const ALL: [PropTag; 8] =
        [PropTag::Dplus, PropTag::Dminus, PropTag::D, PropTag::Dcirc, PropTag::Dbullet, PropTag::Dret, PropTag::Dadv, PropTag::DF];

    /// The elementary solutions (`i·D` solves `(□+m²)ξ = δ`).
    pub const ELEMENTARY: [PropTag; 4] = [PropTag::Dret, PropTag::Dadv, PropTag::DF, PropTag::Dbullet];

    /// The homogeneous solutions.
    pub const HOMOGENEOUS: [PropTag; 4] = [PropTag::Dplus, PropTag::Dminus, PropTag::D, PropTag::Dcirc];

    /// Whether `i·D` is an elementary solution of Klein–Gordon.
    pub fn is_elementary(self) -> bool {
        Self::ELEMENTARY.contains(&self)
    }

    /// CLI name.
    pub fn name(self) -> &'static str {
        match self {
            PropTag::Dplus => "Dplus",
            PropTag::Dminus => "Dminus",
            PropTag::D => "D",
            PropTag::Dcirc => "Dcirc",
            PropTag::Dbullet => "Dbullet",
            PropTag::Dret => "Dret",
            PropTag::Dadv => "Dadv",
            PropTag::DF => "DF",
        }
    }

    /// Coefficients on `[⟨ε⁺_m,F⁺u⟩, ⟨ε⁻_m,F⁺u⟩, ⟨e⁺_m,F⁺u⟩, ⟨e⁻_m,F⁺u⟩]`.
    fn momentum_coeffs(self) -> [C64; 4] {
        let r = |x: f64| C64::new(x, 0.0);
        // D• = (i/2)(P⁺ − P⁻), from iD• = −½⟨e, F⁺u⟩.
        let b = [r(0.0), r(0.0), C64::new(0.0, 0.5), C64::new(0.0, -0.5)];
        let with = |a: f64, c: f64, bullet: bool| {
            let mut out = [r(a), r(c), r(0.0), r(0.0)];
            if bullet {
                out[2] = b[2];
                out[3] = b[3];
            }
            out
        };
        match self {
            PropTag::Dplus => with(1.0, 0.0, false),
            PropTag::Dminus => with(0.0, 1.0, false),
            PropTag::D => with(1.0, 1.0, false),
            PropTag::Dcirc => with(1.0, -1.0, false),
            PropTag::Dbullet => with(0.0, 0.0, true),
            PropTag::Dret => with(0.5, 0.5, true),
            PropTag::Dadv => with(-0.5, -0.5, true),
            PropTag::DF => with(0.5, -0.5, true),
        }
    }

    /// Coefficients on the light-cone pairings `[⟨ε⁺,u⟩, ⟨ε⁻,u⟩, ⟨e,u⟩]`.
    fn light_cone_coeffs(self) -> [C64; 3] {
        let c = |re: f64, im: f64| C64::new(re, im);
        match self {
            PropTag::Dret => [c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)],
            PropTag::Dadv => [c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            PropTag::D => [c(0.0, -1.0), c(0.0, -1.0), c(0.0, 0.0)],
            PropTag::Dcirc => [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            PropTag::Dbullet => [c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)],
            PropTag::DF => [c(0.0, -0.5), c(0.0, 0.5), c(-0.5, 0.0)],
            PropTag::Dplus => [c(0.0, -0.5), c(0.0, -0.5), c(-0.5, 0.0)],
            PropTag::Dminus => [c(0.0, -0.5), c(0.0, -0.5), c(0.5, 0.0)],
        }
    }
}

impl fmt::Display for PropTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PropTag::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::InvalidArgument(format!("unknown propagator {s:?}")))
    }
}

/// A propagator kind at a given mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropKind {
    /// Which member of the family.
    pub tag: PropTag,
    /// The mass.
    pub mass: Mass,
}

impl PropKind {
    /// Constructor.
    pub fn new(tag: PropTag, mass: Mass) -> Self {
        Self { tag, mass }
    }
}

fn check_dim4(u: &TestFn) -> Result<()> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: u.dim() });
    }
    Ok(())
}

/// Pairs every tag with every function via the momentum-shell route.
/// Returns `out[f][tag]`.
pub fn pair_propagators(tags: &[PropTag], m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<Vec<PairingResult>>> {
    cfg.validate()?;
    fns.iter().try_for_each(check_dim4)?;
    let coeffs: Vec<[C64; 4]> = tags.iter().map(|t| t.momentum_coeffs()).collect();
    let need_pv = coeffs.iter().any(|c| c[2] != C64::new(0.0, 0.0));
    let mut families = vec![ShellFamily::Eps(Sign::Plus), ShellFamily::Eps(Sign::Minus)];
    if need_pv {
        families.push(ShellFamily::EPv(Sign::Plus));
        families.push(ShellFamily::EPv(Sign::Minus));
    }
    let transformed: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Plus)).collect();
    let raw = pair_families(&families, m.value(), &transformed, cfg)?;
    Ok(raw.iter().map(|row| combine_rows(row, &coeffs)).collect())
}

fn combine_rows(row: &[(PairingResult, f64)], coeffs: &[impl AsRef<[C64]>]) -> Vec<PairingResult> {
    coeffs
        .iter()
        .map(|c| {
            let parts: Vec<(C64, &PairingResult)> =
                c.as_ref().iter().zip(row).filter(|(c, _)| **c != C64::new(0.0, 0.0)).map(|(c, (r, _))| (*c, r)).collect();
            PairingResult::combine(&parts)
        })
        .collect()
}

/// `⟨D^k η, u⟩` by the momentum-shell route.
pub fn pair_propagator(k: &PropKind, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    Ok(pair_propagators(&[k.tag], k.mass, std::slice::from_ref(u), cfg)?[0][0])
}

/// Massless closed forms through the light-cone densities, for every tag and
/// function. Returns `out[f][tag]`.
pub fn pair_massless_closed_many(tags: &[PropTag], fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<Vec<PairingResult>>> {
    cfg.validate()?;
    fns.iter().try_for_each(check_dim4)?;
    let coeffs: Vec<[C64; 3]> = tags.iter().map(|t| t.light_cone_coeffs()).collect();
    let need_e = coeffs.iter().any(|c| c[2] != C64::new(0.0, 0.0));
    let mut families = vec![ShellFamily::Eps(Sign::Plus), ShellFamily::Eps(Sign::Minus)];
    if need_e {
        families.push(ShellFamily::EFull);
    }
    let raw = pair_families(&families, 0.0, fns, cfg)?;
    Ok(raw.iter().map(|row| combine_rows(row, &coeffs)).collect())
}

/// `⟨D^k η, u⟩` for `m = 0` by the light-cone closed form.
pub fn pair_massless_closed(k: &PropKind, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    if k.mass.value() != 0.0 {
        return Err(Error::InvalidArgument("closed forms exist only for mass 0".into()));
    }
    Ok(pair_massless_closed_many(&[k.tag], std::slice::from_ref(u), cfg)?[0][0])
}

/// Klein–Gordon residual. For elementary kinds returns
/// `⟨iD^k η, (□+m²)u⟩ − u(0)`; for homogeneous kinds `⟨D^k η, (□+m²)u⟩`.
pub fn kg_residual(k: &PropKind, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    Ok(kg_residuals(&[k.tag], k.mass, std::slice::from_ref(u), cfg)?[0][0])
}

/// [`kg_residual`] for many kinds and functions (`out[f][tag]`).
pub fn kg_residuals(tags: &[PropTag], m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<Vec<PairingResult>>> {
    let boxed: Vec<TestFn> = fns.iter().map(|u| u.dalembertian_plus_m2(m)).collect::<Result<_>>()?;
    let vals = pair_propagators(tags, m, &boxed, cfg)?;
    Ok(vals
        .into_iter()
        .zip(fns)
        .map(|(row, u)| {
            let u0 = u.eval_unchecked(&[0.0; 4]);
            row.into_iter()
                .zip(tags)
                .map(|(r, t)| if t.is_elementary() { r.scale(C64::new(0.0, 1.0)).sub(&PairingResult::exact(u0)) } else { r })
                .collect()
        })
        .collect())
}

/// `⟨∂₀D^k η, u⟩ = −⟨D^k η, ∂₀u⟩`.
pub fn time_derivative_pair(k: &PropKind, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    let du = u.derivative(0)?;
    Ok(pair_propagator(k, &du, cfg)?.scale(C64::new(-1.0, 0.0)))
}

/// A time window inserted into the pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Window {
    /// `H(t)`.
    Future,
    /// `H(−t)`.
    Past,
    /// `sgn(t)`.
    Sign,
}

impl FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t>0" | "future" => Ok(Window::Future),
            "t<0" | "past" => Ok(Window::Past),
            "sgn" => Ok(Window::Sign),
            _ => Err(Error::InvalidArgument(format!("unknown window {s:?}"))),
        }
    }
}

/// Windowed pairings of `D⁺` and `D⁻` on both half-lines:
/// `[⟨H(t)D⁺η,u⟩, ⟨H(−t)D⁺η,u⟩, ⟨H(t)D⁻η,u⟩, ⟨H(−t)D⁻η,u⟩]`.
///
/// The spatial transform `F⁺_⊥u` is integrated over the shell while the time
/// integral of `e^{∓iE t}` is restricted analytically to the half-line.
fn windowed_parts(m: f64, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<[PairingResult; 4]>> {
    let spatial: Vec<TestFn> = fns.iter().map(|u| u.fourier_axes(Sign::Plus, &[false, true, true, true])).collect::<Result<_>>()?;
    let groups = envelope_groups(&spatial);
    let results = parallel::map(&groups, |g| -> Result<Vec<[PairingResult; 4]>> {
        let refs: Vec<&TestFn> = g.iter().map(|&i| &spatial[i]).collect();
        let batch = ShellBatch::new(&refs)?;
        let nj = batch.nj();
        let kcfg = cfg.tightened(0.1);
        let scale = 1.0 / (TWO_PI * TWO_PI.sqrt());
        let t = &batch.temporal;
        let reach = t.center.abs() + 3.0 * t.sigma;
        let panel = default_panel(&batch, (1.0 / reach).min(t.sigma));
        let raw = shell_integrate(
            &batch,
            m,
            4,
            panel,
            |_rho, e, t, out| {
                let mut err = 0.0_f64;
                for (s, sv) in [(0usize, 1.0), (1, -1.0)] {
                    let h = half_line_temporal(t, sv * e, &kcfg);
                    let w = sv * scale / (2.0 * e);
                    for j in 0..nj {
                        for half in 0..2 {
                            out[j * 4 + 2 * s + half] = h.values[half * nj + j] * w;
                            err = err.max(h.errors[half * nj + j] * w.abs());
                        }
                    }
                }
                err
            },
            cfg,
        );
        Ok((0..refs.len()).map(|f| std::array::from_fn(|l| raw.component(f * 4 + l))).collect())
    });
    let mut out: Vec<Option<[PairingResult; 4]>> = vec![None; fns.len()];
    for (g, r) in groups.iter().zip(results) {
        for (&i, v) in g.iter().zip(r?) {
            out[i] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("grouped")).collect())
}

/// Windowed pairings `⟨w·D^k η, u⟩` for the homogeneous kinds
/// (`out[f][tag]`).
pub fn pair_windowed_many(tags: &[PropTag], window: Window, m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<Vec<PairingResult>>> {
    cfg.validate()?;
    fns.iter().try_for_each(check_dim4)?;
    let mut coeffs = Vec::with_capacity(tags.len());
    for t in tags {
        let (a, b) = match t {
            PropTag::Dplus => (1.0, 0.0),
            PropTag::Dminus => (0.0, 1.0),
            PropTag::D => (1.0, 1.0),
            PropTag::Dcirc => (1.0, -1.0),
            other => return Err(Error::Unsupported(format!("windowed pairing of {other} (only D±, D, D°)"))),
        };
        let (f, p) = match window {
            Window::Future => (1.0, 0.0),
            Window::Past => (0.0, 1.0),
            Window::Sign => (1.0, -1.0),
        };
        coeffs.push([a * f, a * p, b * f, b * p].map(|x| C64::new(x, 0.0)));
    }
    let parts = windowed_parts(m.value(), fns, cfg)?;
    Ok(parts
        .iter()
        .map(|p| {
            let row: Vec<(PairingResult, f64)> = p.iter().map(|r| (*r, 0.0)).collect();
            combine_rows(&row, &coeffs)
        })
        .collect())
}

/// `⟨w·D^k η, u⟩` for a homogeneous kind and a time window.
pub fn pair_windowed(k: &PropKind, window: Window, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    Ok(pair_windowed_many(&[k.tag], window, k.mass, std::slice::from_ref(u), cfg)?[0][0])
}

/// Tolerance of the propagator identity suite.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Relative tolerance of the massless cross-route comparison.
pub const CROSS_ROUTE_TOL: f64 = 1e-7;
/// Relative tolerance of the elementary Klein–Gordon residuals (relative to
/// `|u(0)| + ‖u‖`).
pub const KG_TOL: f64 = 1e-6;
/// Absolute tolerance of the homogeneous Klein–Gordon residuals.
pub const KG_HOMOGENEOUS_TOL: f64 = 1e-7;
/// Microcausality bound relative to `‖u‖_{L¹}`.
pub const MICROCAUSALITY_TOL: f64 = 1e-6;

fn max_norm(it: impl IntoIterator<Item = C64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Klein–Gordon residual report at one mass: elementary kinds relative to
/// `|u(0)| + ‖u‖`, homogeneous kinds absolute.
pub fn kg_suite(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let vals = kg_residuals(&PropTag::ALL, m, fns, cfg)?;
    Ok(PropTag::ALL
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            if t.is_elementary() {
                let res = vals
                    .iter()
                    .zip(fns)
                    .map(|(row, u)| row[ti].value.norm() / (u.eval_unchecked(&[0.0; 4]).norm() + u.l1_bound()))
                    .fold(0.0, f64::max);
                CheckLine::new(format!("<i {t}, (box+m^2) u> = u(0)"), m.value(), res, KG_TOL)
            } else {
                let res = max_norm(vals.iter().map(|row| row[ti].value));
                CheckLine::new(format!("<{t}, (box+m^2) u> = 0"), m.value(), res, KG_HOMOGENEOUS_TOL)
            }
        })
        .collect())
}

/// Massless cross-route: momentum-shell route vs light-cone closed form for
/// all eight kinds; residual relative to `max(|value|, ‖u‖)`.
pub fn massless_cross_route(fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let mom = pair_propagators(&PropTag::ALL, Mass::zero(), fns, cfg)?;
    let pos = pair_massless_closed_many(&PropTag::ALL, fns, cfg)?;
    Ok(PropTag::ALL
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let res = mom
                .iter()
                .zip(&pos)
                .zip(fns)
                .map(|((a, b), u)| {
                    let scale = a[ti].value.norm().max(b[ti].value.norm()).max(u.l1_bound());
                    (a[ti].value - b[ti].value).norm() / scale
                })
                .fold(0.0, f64::max);
            CheckLine::new(format!("{t}: momentum route = light-cone closed form"), 0.0, res, CROSS_ROUTE_TOL)
        })
        .collect())
}

/// The algebraic, window and parity identities at one mass.
pub fn identity_suite(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    use PropTag::*;
    let mv = m.value();
    let tags = PropTag::ALL;
    let idx = |t: PropTag| tags.iter().position(|x| *x == t).expect("tag listed");
    let vals = pair_propagators(&tags, m, fns, cfg)?;
    let reflected: Vec<TestFn> = fns.iter().map(TestFn::reflect).collect();
    let rvals = pair_propagators(&tags, m, &reflected, cfg)?;
    let win_tags = [Dplus, Dminus, D];
    let fut = pair_windowed_many(&win_tags, Window::Future, m, fns, cfg)?;
    let past = pair_windowed_many(&win_tags, Window::Past, m, fns, cfg)?;
    let sgn = pair_windowed_many(&[D], Window::Sign, m, fns, cfg)?;

    let mut lines = Vec::new();
    let mut push = |name: &str, f: &dyn Fn(usize) -> C64| {
        let res = max_norm((0..fns.len()).map(f));
        lines.push(CheckLine::new(name, mv, res, IDENTITY_TOL));
    };
    let v = |f: usize, t: PropTag| vals[f][idx(t)].value;
    let rv = |f: usize, t: PropTag| rvals[f][idx(t)].value;
    push("Dret - Dadv = D", &|f| v(f, Dret) - v(f, Dadv) - v(f, D));
    push("(Dret + Dadv)/2 = Dbullet", &|f| 0.5 * (v(f, Dret) + v(f, Dadv)) - v(f, Dbullet));
    push("DF = Dbullet + Dcirc/2", &|f| v(f, DF) - v(f, Dbullet) - 0.5 * v(f, Dcirc));
    push("D = Dplus + Dminus", &|f| v(f, D) - v(f, Dplus) - v(f, Dminus));
    push("Dret = H(t) D", &|f| v(f, Dret) - fut[f][2].value);
    push("Dadv = -H(-t) D", &|f| v(f, Dadv) + past[f][2].value);
    push("DF = H(t) Dplus - H(-t) Dminus", &|f| v(f, DF) - fut[f][0].value + past[f][1].value);
    push("Dbullet = sgn(t) D / 2", &|f| v(f, Dbullet) - 0.5 * sgn[f][0].value);
    push("H(t) D + H(-t) D = D", &|f| fut[f][2].value + past[f][2].value - v(f, D));
    push("D(-x) = -D(x)", &|f| rv(f, D) + v(f, D));
    push("Dcirc(-x) = Dcirc(x)", &|f| rv(f, Dcirc) - v(f, Dcirc));
    push("Dplus(-x) = -Dminus(x)", &|f| rv(f, Dplus) + v(f, Dminus));
    push("Dret(-x) = Dadv(x)", &|f| rv(f, Dret) - v(f, Dadv));
    push("Dbullet(-x) = Dbullet(x)", &|f| rv(f, Dbullet) - v(f, Dbullet));
    push("DF(-x) = DF(x)", &|f| rv(f, DF) - v(f, DF));
    Ok(lines)
}

/// Temporal widths of the `t = 0` derivative ladder.
pub const T0_LADDER: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

/// A test function `φ_σ(t)·v(x⊥)` with `φ_σ` the unit-mass Gaussian of width
/// `σ_t` centered at `t = 0`; `v` is the spatial part of `u` (temporal powers
/// and phase dropped).
fn time_delta_family(u: &TestFn, sigma_t: f64) -> Result<TestFn> {
    let terms: Vec<Term> = u.terms().iter().filter(|t| t.alpha[0] == 0).cloned().collect();
    let terms = if terms.is_empty() { vec![Term { coeff: C64::new(1.0, 0.0), alpha: vec![0, 0, 0, 0] }] } else { terms };
    let norm = 1.0 / (TWO_PI.sqrt() * sigma_t);
    let terms = terms.into_iter().map(|t| Term { coeff: t.coeff * norm, ..t }).collect();
    let mut center = u.center().to_vec();
    let mut widths = u.widths().to_vec();
    let mut phase = u.phase().to_vec();
    center[0] = 0.0;
    widths[0] = sigma_t;
    phase[0] = 0.0;
    TestFn::new(4, terms, center, widths, phase)
}

/// The `t = 0` derivative facts `D_{,0}(0,x⊥) = −iδ(x⊥)`,
/// `D±_{,0}(0,x⊥) = −(i/2)δ(x⊥)` and `D°_{,0}(0,x⊥) = 0`, checked by shrinking
/// a normalized temporal Gaussian (ladder [`T0_LADDER`], Richardson in `σ²`).
pub fn t0_derivative_suite(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    use PropTag::*;
    let tags = [D, Dplus, Dminus, Dcirc];
    let targets = [C64::new(0.0, -1.0), C64::new(0.0, -0.5), C64::new(0.0, -0.5), C64::new(0.0, 0.0)];
    let mut family = Vec::new();
    for u in fns {
        for &s in &T0_LADDER {
            family.push(time_delta_family(u, s)?.derivative(0)?);
        }
    }
    let vals = pair_propagators(&tags, m, &family, cfg)?;
    let nl = T0_LADDER.len();
    let exps: Vec<i32> = (1..nl as i32).map(|k| 2 * k).collect();
    let ratio = T0_LADDER[1] / T0_LADDER[0];
    let mut lines = Vec::new();
    for (ti, t) in tags.iter().enumerate() {
        let mut res = 0.0_f64;
        let mut spread = 0.0_f64;
        for (fi, u) in fns.iter().enumerate() {
            // ⟨∂₀D, φ⊗v⟩ = −⟨D, ∂₀(φ⊗v)⟩.
            let seq: Vec<C64> = (0..nl).map(|k| -vals[fi * nl + k][ti].value).collect();
            let (lim, sp) = richardson(&seq, ratio, &exps);
            let v0 = time_delta_family(u, 1.0)?.eval_unchecked(&[0.0; 4]) * TWO_PI.sqrt();
            res = res.max((lim - targets[ti] * v0).norm());
            spread = spread.max(sp);
        }
        let name = match t {
            D => "D_,0(0,x) = -i delta(x)",
            Dplus => "Dplus_,0(0,x) = -(i/2) delta(x)",
            Dminus => "Dminus_,0(0,x) = -(i/2) delta(x)",
            _ => "Dcirc_,0(0,x) = 0",
        };
        lines.push(CheckLine::new(name, m.value(), res, IDENTITY_TOL).with_spread(spread, IDENTITY_TOL));
    }
    Ok(lines)
}

/// Test functions localized around `t = 0`, `|x⊥| = 8σ` (well outside the
/// light cone): a Gaussian envelope of width `σ` with random plane-wave phase
/// `|k| ≤ 1` and a random first-degree polynomial prefactor.
pub fn spacelike_family(seed: u64, count: usize) -> Vec<TestFn> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let d: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = crate::kinematics::norm3(&d);
        if n > 0.1 && n <= 1.0 {
            break d.map(|x| x / n);
        }
    };
    (0..count)
        .map(|_| {
            let sigma: f64 = rng.gen_range(0.5..1.0);
            let dir = unit(&mut rng);
            let kdir = unit(&mut rng);
            let kmag: f64 = rng.gen_range(0.0..1.0);
            let k0: f64 = rng.gen_range(-1.0..1.0);
            let mut terms = vec![Term { coeff: C64::new(1.0, 0.0), alpha: vec![0; 4] }];
            let axis = rng.gen_range(0..4);
            let mut alpha = vec![0; 4];
            alpha[axis] = 1;
            terms.push(Term { coeff: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), alpha });
            TestFn::new(
                4,
                terms,
                vec![0.0, 8.0 * sigma * dir[0], 8.0 * sigma * dir[1], 8.0 * sigma * dir[2]],
                vec![sigma; 4],
                vec![k0, kmag * kdir[0], kmag * kdir[1], kmag * kdir[2]],
            )
            .expect("valid test function")
        })
        .collect()
}

/// Microcausality: `|⟨D_m η, u⟩| ≤ 1e−6·‖u‖_{L¹}` for spacelike-localized `u`.
pub fn microcausality_check(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<CheckLine> {
    let vals = pair_propagators(&[PropTag::D], m, fns, cfg)?;
    let res = vals.iter().zip(fns).map(|(r, u)| r[0].value.norm() / u.l1_bound()).fold(0.0, f64::max);
    Ok(CheckLine::new("|<D, u>| / |u|_1 outside the light cone", m.value(), res, MICROCAUSALITY_TOL))
}

/// The full propagator verification at the given masses: identities,
/// Klein–Gordon residuals, `t = 0` derivative facts, microcausality (for the
/// masses listed) and, when `0` is among the masses, the massless cross-route.
pub fn verify_propagators(masses: &[Mass], seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let fns = TestFn::random_family(seed, 4, count);
    let spacelike = spacelike_family(seed, count);
    let mut lines = Vec::new();
    for &m in masses {
        lines.extend(identity_suite(m, &fns, cfg)?);
        lines.extend(kg_suite(m, &fns, cfg)?);
        lines.extend(t0_derivative_suite(m, &fns[..fns.len().min(3)], cfg)?);
        lines.push(microcausality_check(m, &spacelike, cfg)?);
        if m.value() == 0.0 {
            lines.extend(massless_cross_route(&fns, cfg)?);
        }
    }
    Ok(lines)
}

/// One point of a smeared propagator table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TablePoint {
    /// Time coordinate of the smearing center.
    pub t: f64,
    /// Radial coordinate (along `x¹`) of the smearing center.
    pub r: f64,
    /// The smeared value.
    pub value: C64,
    /// Its error estimate.
    pub abs_err: f64,
}

/// Values of `D^k` smeared with unit-mass Gaussians of width `sigma`
/// centered at `(t, r, 0, 0)` on the grid `ts × rs`.
pub fn smeared_table(k: &PropKind, ts: &[f64], rs: &[f64], sigma: f64, cfg: &QuadConfig) -> Result<Vec<TablePoint>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("smearing width must be positive, got {sigma}")));
    }
    let norm = (TWO_PI * sigma * sigma).powi(-2);
    let mut pts = Vec::new();
    let mut fns = Vec::new();
    for &t in ts {
        for &r in rs {
            let g = TestFn::gaussian(vec![t, r, 0.0, 0.0], vec![sigma; 4], vec![0.0; 4])?.scale(C64::new(norm, 0.0));
            pts.push((t, r));
            fns.push(g);
        }
    }
    let vals = pair_propagators(&[k.tag], k.mass, &fns, cfg)?;
    Ok(pts.into_iter().zip(vals).map(|((t, r), v)| TablePoint { t, r, value: v[0].value, abs_err: v[0].abs_err }).collect())
}
