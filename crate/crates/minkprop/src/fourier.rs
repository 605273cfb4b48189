//! Distributional Fourier transforms by adjointness, `⟨F±θ, u⟩ := ⟨θ, F±u⟩`,
//! including the partial (temporal `F_∥`, spatial `F_⊥`) transforms, and the
//! verification suites for the Fourier transforms of the mass-shell
//! densities:
//!
//! - the spatial lemma `⟨F±_⊥ε±_m, v⟩ = ±(2π)^{−3/2} ∫d³x (1/r) ∫_m^∞ dτ
//!   v(±τ, x) sin(r√(τ²−m²))`;
//! - the digamma representation `F⁺ε⁺_m = (2π)^{−2} Ϝ⁺_m/r`,
//!   `F⁺ε⁻_m = −(2π)^{−2} Ϝ⁻_m/r` with
//!   `Ϝ±_m(t,r) = ∫_m^∞ dτ sin(r√(τ²−m²)) e^{∓iτt}`, which is only ever
//!   integrated against the damping of a test function;
//! - `F⁺ε⁺_m + F⁻ε⁻_m = 0 = F⁺ε⁻_m + F⁻ε⁺_m`;
//! - `ê_m = ě_m = −i sgn(t) D_m` with `ê = F⁺e_m`, `ě = F⁻e_m`;
//! - the massless table `ε̂±₀ = ∓½e − (i/2)(ε⁺+ε⁻)`,
//!   `ε̌±₀ = ∓½e + (i/2)(ε⁺+ε⁻)`, `ê₀ = ě₀ = ε⁻ − ε⁺`.

use serde::Serialize;

use crate::densities_1d::{pair_1d, Dist1d};
use crate::kernels::sine_transform;
use crate::mass_shell::{pair, pair_families, MomShellDist, ShellFamily};
use crate::propagators::{pair_windowed_many, PropTag, Window};
use crate::quadrature::{PairingResult, QuadConfig};
use crate::report::CheckLine;
use crate::shell::{default_panel, envelope_groups, shell_integrate, ShellBatch};
use crate::testfns::{Sign, Term, TestFn};
use crate::{parallel, Error, FourVector, Mass, Result, C64};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Which coordinates a transform acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Partial {
    /// All coordinates.
    Full,
    /// Time only (`F_∥`).
    Temporal,
    /// Space only (`F_⊥`).
    Spatial,
}

impl Partial {
    fn axes(self) -> [bool; 4] {
        match self {
            Partial::Full => [true; 4],
            Partial::Temporal => [true, false, false, false],
            Partial::Spatial => [false, true, true, true],
        }
    }
}

/// The density being transformed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Base {
    /// A mass-shell density (or massless twin).
    Shell(MomShellDist),
    /// A one-dimensional density.
    OneD(Dist1d),
    /// The point mass `δ[b]` on 4D space.
    Delta(FourVector),
}

/// `F±` (full or partial) of a base density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformedDist {
    /// The density.
    pub base: Base,
    /// Transform sign.
    pub sign: Sign,
    /// Which coordinates are transformed.
    pub partial: Partial,
}

impl TransformedDist {
    /// Full transform of a base density.
    pub fn full(base: Base, sign: Sign) -> Self {
        Self { base, sign, partial: Partial::Full }
    }
}

/// `⟨F±θ, u⟩ = ⟨θ, F±u⟩` (partial transforms act on the corresponding axes
/// of `u`).
pub fn pair_transformed(t: &TransformedDist, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    let fu = match t.partial {
        Partial::Full => u.fourier_analytic(t.sign),
        p => {
            if u.dim() != 4 {
                return Err(Error::InvalidArgument("partial transforms need a 4D test function".into()));
            }
            u.fourier_axes(t.sign, &p.axes())?
        }
    };
    match &t.base {
        Base::Shell(d) => pair(d, &fu, cfg),
        Base::OneD(d) => {
            if t.partial != Partial::Full {
                return Err(Error::InvalidArgument("1D densities have no partial transforms".into()));
            }
            pair_1d(d, &fu, cfg)
        }
        Base::Delta(b) => {
            if fu.dim() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, got: fu.dim() });
            }
            Ok(PairingResult::exact(fu.eval_unchecked(&b.0)))
        }
    }
}

/// `∫d³x (1/r) Σ_j S_{f,j}(x) ∫_m^∞ dτ h_{f,j}(τ) sin(r√(τ²−m²))` for every
/// function, where `h` is built from the temporal factor family by `make_h`
/// (which returns, per temporal power, a 1D test function of `τ`).
fn radial_sine_pairing<M>(m: f64, fns: &[TestFn], make_h: M, cfg: &QuadConfig) -> Result<Vec<PairingResult>>
where
    M: Fn(&TestFn) -> TestFn + Sync,
{
    let groups = envelope_groups(fns);
    let results = parallel::map(&groups, |g| -> Result<Vec<PairingResult>> {
        let refs: Vec<&TestFn> = g.iter().map(|&i| &fns[i]).collect();
        let batch = ShellBatch::new(&refs)?;
        let t = batch.temporal.clone();
        let hs: Vec<TestFn> = t
            .powers
            .iter()
            .map(|&j| {
                let g = TestFn::new(1, vec![Term { coeff: C64::new(1.0, 0.0), alpha: vec![j] }], vec![t.center], vec![t.sigma], vec![t.phase])?;
                Ok(make_h(&g))
            })
            .collect::<Result<_>>()?;
        let (hc, hs_sigma) = (hs[0].center()[0], hs[0].widths()[0]);
        let nj = hs.len();
        let kcfg = cfg.tightened(0.1);
        let panel = default_panel(&batch, 1.0);
        let raw = shell_integrate(
            &batch,
            0.0,
            1,
            panel,
            |r, _e, _t, out| {
                if r == 0.0 {
                    out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    return 0.0;
                }
                let s = sine_transform(
                    nj,
                    |tau, o: &mut [C64]| hs.iter().zip(o.iter_mut()).for_each(|(h, v)| *v = h.eval_unchecked(&[tau])),
                    hc,
                    hs_sigma,
                    m,
                    r,
                    &kcfg,
                );
                let mut err = 0.0_f64;
                for j in 0..nj {
                    out[j] = s.values[j] / r;
                    err = err.max(s.errors[j] / r);
                }
                err
            },
            cfg,
        );
        Ok((0..refs.len()).map(|f| raw.component(f)).collect())
    });
    let mut out = vec![None; fns.len()];
    for (g, r) in groups.iter().zip(results) {
        for (&i, v) in g.iter().zip(r?) {
            out[i] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("grouped")).collect())
}

/// `∫d⁴x u(x) Ϝ^s_m(t, r)/r`, with `Ϝ^s_m(t,r) = ∫_m^∞ dτ sin(r√(τ²−m²))
/// e^{∓iτt}`; the time integral is taken first, analytically, so the
/// conditionally convergent `τ`-integral is always damped.
pub fn digamma_pairing(m: Mass, sign: Sign, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<PairingResult>> {
    cfg.validate()?;
    // ∫dt g(t) e^{∓iτt} = √(2π) (F±g)(τ).
    let root = TWO_PI.sqrt();
    radial_sine_pairing(m.value(), fns, |g| g.fourier_analytic(sign).scale(C64::new(root, 0.0)), cfg)
}

/// Right-hand side of the spatial lemma:
/// `±(2π)^{−3/2} ∫d³x (1/r) ∫_m^∞ dτ v(±τ, x) sin(r√(τ²−m²))` for the shell
/// sign `shell`.
pub fn f_perp_kernel_pairing(m: Mass, shell: Sign, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<PairingResult>> {
    cfg.validate()?;
    let raw = radial_sine_pairing(
        m.value(),
        fns,
        |g| match shell {
            Sign::Plus => g.clone(),
            Sign::Minus => g.reflect(),
        },
        cfg,
    )?;
    let c = C64::new(shell.value() * TWO_PI.powf(-1.5), 0.0);
    Ok(raw.into_iter().map(|r| r.scale(c)).collect())
}

/// Tolerance of the spatial-lemma and corollary checks (relative to `‖u‖`).
pub const FOURIER_TOL: f64 = 1e-6;
/// Tolerance of the `ê` identities.
pub const EHAT_TOL: f64 = 1e-6;
/// Tolerance of the massless transform table.
pub const MASSLESS_TABLE_TOL: f64 = 1e-6;

fn rel_max(res: impl Iterator<Item = (C64, f64)>) -> f64 {
    res.map(|(d, n)| d.norm() / n).fold(0.0, f64::max)
}

/// The spatial lemma: `F⁺_⊥ε±_m = F⁻_⊥ε±_m` and both equal the sine-kernel
/// density, on the given functions of `(τ, x⊥)`.
pub fn verify_f_perp_lemma_on(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let plus: Vec<TestFn> = fns.iter().map(|v| v.fourier_axes(Sign::Plus, &Partial::Spatial.axes())).collect::<Result<_>>()?;
    let minus: Vec<TestFn> = fns.iter().map(|v| v.fourier_axes(Sign::Minus, &Partial::Spatial.axes())).collect::<Result<_>>()?;
    let fams = [ShellFamily::Eps(Sign::Plus), ShellFamily::Eps(Sign::Minus)];
    let p = pair_families(&fams, m.value(), &plus, cfg)?;
    let q = pair_families(&fams, m.value(), &minus, cfg)?;
    let kp = f_perp_kernel_pairing(m, Sign::Plus, fns, cfg)?;
    let km = f_perp_kernel_pairing(m, Sign::Minus, fns, cfg)?;
    let norms: Vec<f64> = fns.iter().map(TestFn::l1_bound).collect();
    let mv = m.value();
    let line = |name: &str, d: Vec<C64>| CheckLine::new(name, mv, rel_max(d.into_iter().zip(norms.iter().copied())), FOURIER_TOL);
    let n = fns.len();
    Ok(vec![
        line("F+perp eps+ = F-perp eps+", (0..n).map(|f| p[f][0].0.value - q[f][0].0.value).collect()),
        line("F+perp eps- = F-perp eps-", (0..n).map(|f| p[f][1].0.value - q[f][1].0.value).collect()),
        line("F+perp eps+ = sine kernel", (0..n).map(|f| p[f][0].0.value - kp[f].value).collect()),
        line("F+perp eps- = sine kernel", (0..n).map(|f| p[f][1].0.value - km[f].value).collect()),
    ])
}

/// [`verify_f_perp_lemma_on`] on `count` seeded random functions.
pub fn verify_f_perp_lemma(m: Mass, seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    verify_f_perp_lemma_on(m, &TestFn::random_family(seed, 4, count), cfg)
}

/// The corollary identities `F⁺ε⁺_m + F⁻ε⁻_m = 0`, `F⁺ε⁻_m + F⁻ε⁺_m = 0` and
/// the digamma representation of `F⁺ε±_m`; residuals relative to `‖u‖`.
pub fn verify_corollary_on(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let fp: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Plus)).collect();
    let fm: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Minus)).collect();
    let fams = [ShellFamily::Eps(Sign::Plus), ShellFamily::Eps(Sign::Minus)];
    let p = pair_families(&fams, m.value(), &fp, cfg)?;
    let q = pair_families(&fams, m.value(), &fm, cfg)?;
    let dg_plus = digamma_pairing(m, Sign::Plus, fns, cfg)?;
    let dg_minus = digamma_pairing(m, Sign::Minus, fns, cfg)?;
    let c = TWO_PI.powi(-2);
    let norms: Vec<f64> = fns.iter().map(TestFn::l1_bound).collect();
    let mv = m.value();
    let line = |name: &str, d: Vec<C64>| CheckLine::new(name, mv, rel_max(d.into_iter().zip(norms.iter().copied())), FOURIER_TOL);
    let n = fns.len();
    Ok(vec![
        line("F+ eps+ + F- eps- = 0", (0..n).map(|f| p[f][0].0.value + q[f][1].0.value).collect()),
        line("F+ eps- + F- eps+ = 0", (0..n).map(|f| p[f][1].0.value + q[f][0].0.value).collect()),
        line("F+ eps+ = (2pi)^-2 digamma+/r", (0..n).map(|f| p[f][0].0.value - c * dg_plus[f].value).collect()),
        line("F+ eps- = -(2pi)^-2 digamma-/r", (0..n).map(|f| p[f][1].0.value + c * dg_minus[f].value).collect()),
    ])
}

/// [`verify_corollary_on`] on `count` seeded random functions.
pub fn verify_corollary(m: Mass, seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    verify_corollary_on(m, &TestFn::random_family(seed, 4, count), cfg)
}

/// `ê_m = ě_m`, `ê_m = −i sgn(t) D_m` (windowed route) and, at `m = 0`,
/// `ê₀ = ε⁻ − ε⁺` against the light-cone densities.
pub fn verify_ehat_identities_on(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let fp: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Plus)).collect();
    let fm: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Minus)).collect();
    let e = [ShellFamily::EFull];
    let hat = pair_families(&e, m.value(), &fp, cfg)?;
    let check = pair_families(&e, m.value(), &fm, cfg)?;
    let sgn_d = pair_windowed_many(&[PropTag::D], Window::Sign, m, fns, cfg)?;
    let norms: Vec<f64> = fns.iter().map(TestFn::l1_bound).collect();
    let mv = m.value();
    let line = |name: &str, d: Vec<C64>| CheckLine::new(name, mv, rel_max(d.into_iter().zip(norms.iter().copied())), EHAT_TOL);
    let n = fns.len();
    let mi = C64::new(0.0, -1.0);
    let mut lines = vec![
        line("e-hat = e-check", (0..n).map(|f| hat[f][0].0.value - check[f][0].0.value).collect()),
        line("e-hat = -i sgn(t) D", (0..n).map(|f| hat[f][0].0.value - mi * sgn_d[f][0].value).collect()),
    ];
    if mv == 0.0 {
        let cone = pair_families(&[ShellFamily::Eps(Sign::Plus), ShellFamily::Eps(Sign::Minus)], 0.0, fns, cfg)?;
        lines.push(line("e-hat (m=0) = eps- - eps+", (0..n).map(|f| hat[f][0].0.value - (cone[f][1].0.value - cone[f][0].0.value)).collect()));
    }
    Ok(lines)
}

/// [`verify_ehat_identities_on`] on `count` seeded random functions.
pub fn verify_ehat_identities(m: Mass, seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    verify_ehat_identities_on(m, &TestFn::random_family(seed, 4, count), cfg)
}

/// The massless transform table at pairing level (eight identities).
pub fn verify_massless_table_on(fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    use ShellFamily::*;
    let fams = [Eps(Sign::Plus), Eps(Sign::Minus), EFull];
    let fp: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Plus)).collect();
    let fm: Vec<TestFn> = fns.iter().map(|u| u.fourier_analytic(Sign::Minus)).collect();
    let hat = pair_families(&fams, 0.0, &fp, cfg)?;
    let chk = pair_families(&fams, 0.0, &fm, cfg)?;
    let pos = pair_families(&fams, 0.0, fns, cfg)?;
    let norms: Vec<f64> = fns.iter().map(TestFn::l1_bound).collect();
    let half_i = C64::new(0.0, 0.5);
    type Row = (&'static str, fn(&[C64; 3], &[C64; 3], &[C64; 3], C64) -> C64);
    let rows: [Row; 8] = [
        ("eps+ hat = -e/2 - (i/2)(eps+ + eps-)", |h, _, p, hi| h[0] - (-0.5 * p[2] - hi * (p[0] + p[1]))),
        ("eps- hat = e/2 - (i/2)(eps+ + eps-)", |h, _, p, hi| h[1] - (0.5 * p[2] - hi * (p[0] + p[1]))),
        ("eps+ check = -e/2 + (i/2)(eps+ + eps-)", |_, c, p, hi| c[0] - (-0.5 * p[2] + hi * (p[0] + p[1]))),
        ("eps- check = e/2 + (i/2)(eps+ + eps-)", |_, c, p, hi| c[1] - (0.5 * p[2] + hi * (p[0] + p[1]))),
        ("e hat = eps- - eps+", |h, _, p, _| h[2] - (p[1] - p[0])),
        ("e check = eps- - eps+", |_, c, p, _| c[2] - (p[1] - p[0])),
        ("eps+ hat + eps- hat = -i (eps+ + eps-)", |h, _, p, hi| h[0] + h[1] + 2.0 * hi * (p[0] + p[1])),
        ("eps+ hat - eps- hat = -e", |h, _, p, _| h[0] - h[1] + p[2]),
    ];
    let vals = |r: &Vec<(PairingResult, f64)>| -> [C64; 3] { std::array::from_fn(|i| r[i].0.value) };
    Ok(rows
        .iter()
        .map(|(name, f)| {
            let res = rel_max((0..fns.len()).map(|i| (f(&vals(&hat[i]), &vals(&chk[i]), &vals(&pos[i]), half_i), norms[i])));
            CheckLine::new(*name, 0.0, res, MASSLESS_TABLE_TOL)
        })
        .collect())
}

/// The whole Fourier suite at the given masses: spatial lemma, corollary,
/// `ê` identities, and (once) the massless table.
pub fn verify_fourier(masses: &[Mass], seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let fns = TestFn::random_family(seed, 4, count);
    let mut lines = Vec::new();
    for &m in masses {
        lines.extend(verify_f_perp_lemma_on(m, &fns, cfg)?);
        lines.extend(verify_corollary_on(m, &fns, cfg)?);
        lines.extend(verify_ehat_identities_on(m, &fns, cfg)?);
    }
    lines.extend(verify_massless_table_on(&fns, cfg)?);
    Ok(lines)
}
