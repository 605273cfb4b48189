//! One-dimensional special densities — Dirac deltas, the Heaviside step, the
//! sign function, shifted principal values, characteristic functions of
//! intervals, plane phases, half-line phases and the damped poles
//! `1/(x − a ∓ iε)` — as pairing functionals on 1D test functions, and the
//! verification of their Fourier-transform table.
//!
//! Every transform is checked at pairing level through adjointness,
//! `⟨F±θ, u⟩ = ⟨θ, F±u⟩`: the left side pairs `θ` with the analytic transform
//! of `u`, the right side pairs the closed-form transform with `u` itself, and
//! both sides are computed by independent quadratures.

use serde::Serialize;

use crate::quadrature::{adaptive_vec, extrapolate_ladder, gaussian_breaks, ladder_vec, pv_vec, PairingResult, QuadConfig, TRUNCATION_WIDTHS};
use crate::testfns::{Sign, TestFn};
use crate::{parallel, Error, Result, C64};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// A one-dimensional generalized density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Dist1d {
    /// `δ_b`.
    Delta { b: f64 },
    /// `H(±x)`.
    Heaviside { orientation: Sign },
    /// `sgn(x)`.
    SignFn,
    /// `pv 1/(x − a)`.
    PvShift { a: f64 },
    /// `χ_{[a,b]}`, `a < b`.
    CharInterval { a: f64, b: f64 },
    /// `1/(x − a ∓ iε)` with `side = ±`, `ε > 0`.
    DampedPole { a: f64, side: Sign, eps: f64 },
    /// The plane phase `e^{iαx}` (a tempered function).
    PlanePhase { alpha: f64 },
    /// `H(ax) e^{iβx}` (a half-line phase), `a ≠ 0`.
    HalfLinePhase { a: f64, beta: f64 },
}

impl Dist1d {
    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Dist1d::Delta { b } => b.is_finite(),
            Dist1d::Heaviside { .. } | Dist1d::SignFn => true,
            Dist1d::PvShift { a } => a.is_finite(),
            Dist1d::CharInterval { a, b } => a.is_finite() && b.is_finite() && a < b,
            Dist1d::DampedPole { a, eps, .. } => a.is_finite() && eps > 0.0 && eps.is_finite(),
            Dist1d::PlanePhase { alpha } => alpha.is_finite(),
            Dist1d::HalfLinePhase { a, beta } => a.is_finite() && a != 0.0 && beta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid 1D density {self:?}")))
        }
    }
}

fn check_dim1(u: &TestFn) -> Result<()> {
    if u.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: u.dim() });
    }
    Ok(())
}

/// Truncated support `[c − 40σ, c + 40σ]` of a 1D test function.
fn support(u: &TestFn) -> (f64, f64) {
    let c = u.center()[0];
    let s = u.widths()[0];
    (c - TRUNCATION_WIDTHS * s, c + TRUNCATION_WIDTHS * s)
}

/// Breakpoints over `[lo, hi]` adapted to `u`'s envelope, with the given
/// extra points inserted.
fn line_breaks(u: &TestFn, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut b = gaussian_breaks(lo, hi, u.center()[0], u.widths()[0]);
    for &x in extra {
        if x > lo && x < hi {
            b.push(x);
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `∫_lo^hi w(x) u(x) dx` clipped to `u`'s truncated support.
fn weighted_integral<W>(u: &TestFn, w: W, lo: f64, hi: f64, extra: &[f64], cfg: &QuadConfig) -> PairingResult
where
    W: Fn(f64) -> C64,
{
    let (slo, shi) = support(u);
    let (a, b) = (lo.max(slo), hi.min(shi));
    if b <= a {
        return PairingResult::exact(C64::new(0.0, 0.0));
    }
    let breaks = line_breaks(u, a, b, extra);
    adaptive_vec(1, |x, out: &mut [C64]| out[0] = w(x) * u.eval_unchecked(&[x]), &breaks, cfg).component(0)
}

/// `pv∫ w(x) u(x)/(x − pole) dx` over `u`'s support.
fn pv_integral<W>(u: &TestFn, w: W, pole: f64, cfg: &QuadConfig) -> PairingResult
where
    W: Fn(f64) -> C64,
{
    let (lo, hi) = support(u);
    let fold = u.widths()[0].min(1.0);
    let breaks = line_breaks(u, lo.min(pole - 2.0 * fold), hi.max(pole + 2.0 * fold), &[pole]);
    pv_vec(1, |x, out: &mut [C64]| out[0] = w(x) * u.eval_unchecked(&[x]), pole, &breaks, fold, cfg).component(0)
}

/// The `ε`-ladder limit `lim_{ε→0⁺} ∫ w(x)u(x)/(x − a − i·side·ε) dx`
/// (Richardson in all powers of `ε`); returns the value and the spread.
fn damped_limit<W>(u: &TestFn, w: W, a: f64, side: Sign, cfg: &QuadConfig) -> (PairingResult, f64)
where
    W: Fn(f64) -> C64,
{
    let (lo, hi) = support(u);
    let fold = u.widths()[0].min(1.0);
    let breaks = line_breaks(u, lo.min(a - 2.0 * fold), hi.max(a + 2.0 * fold), &[]);
    let raw = ladder_vec(1, |x, out: &mut [C64]| out[0] = w(x) * u.eval_unchecked(&[x]), a, -side.value(), &breaks, fold, cfg);
    let (ex, spreads) = extrapolate_ladder(&raw, 1, cfg);
    (ex.component(0), spreads[0])
}

/// Pairs a 1D density with a 1D test function by its defining integral or
/// limit.
pub fn pair_1d(d: &Dist1d, u: &TestFn, cfg: &QuadConfig) -> Result<PairingResult> {
    check_dim1(u)?;
    d.validate()?;
    cfg.validate()?;
    let one = |_x: f64| C64::new(1.0, 0.0);
    let inf = f64::INFINITY;
    Ok(match *d {
        Dist1d::Delta { b } => PairingResult::exact(u.eval_unchecked(&[b])),
        Dist1d::Heaviside { orientation: Sign::Plus } => weighted_integral(u, one, 0.0, inf, &[], cfg),
        Dist1d::Heaviside { orientation: Sign::Minus } => weighted_integral(u, one, -inf, 0.0, &[], cfg),
        Dist1d::SignFn => {
            let p = weighted_integral(u, one, 0.0, inf, &[], cfg);
            let m = weighted_integral(u, one, -inf, 0.0, &[], cfg);
            p.sub(&m)
        }
        Dist1d::PvShift { a } => {
            let r = pv_integral(u, one, a, cfg);
            if r.abs_err > 1e-3 * r.value.norm().max(1.0) {
                return Err(Error::Extrapolation(format!("principal value at {a} did not settle")));
            }
            r
        }
        Dist1d::CharInterval { a, b } => weighted_integral(u, one, a, b, &[], cfg),
        Dist1d::DampedPole { a, side, eps } => {
            // Resolve the Lorentzian scale with geometric breakpoints.
            let (lo, hi) = support(u);
            let mut extra = vec![a];
            let mut w = eps;
            while w < (hi - lo) {
                extra.push(a - w);
                extra.push(a + w);
                w *= 4.0;
            }
            let shift = C64::new(a, side.value() * eps);
            weighted_integral(u, |x| C64::new(1.0, 0.0) / (C64::new(x, 0.0) - shift), lo.min(a - eps), hi.max(a + eps), &extra, cfg)
        }
        Dist1d::PlanePhase { alpha } => weighted_integral(u, |x| C64::from_polar(1.0, alpha * x), -inf, inf, &[], cfg),
        Dist1d::HalfLinePhase { a, beta } => {
            let w = |x: f64| C64::from_polar(1.0, beta * x);
            if a > 0.0 {
                weighted_integral(u, w, 0.0, inf, &[], cfg)
            } else {
                weighted_integral(u, w, -inf, 0.0, &[], cfg)
            }
        }
    })
}

/// `ε → 0⁺` limit of the damped pole `1/(x − a ∓ iε)` paired with `u`, with
/// the ladder spread.
pub fn pair_damped_limit(a: f64, side: Sign, u: &TestFn, cfg: &QuadConfig) -> Result<(PairingResult, f64)> {
    check_dim1(u)?;
    cfg.validate()?;
    Ok(damped_limit(u, |_| C64::new(1.0, 0.0), a, side, cfg))
}

/// One row of the Fourier-table verification report.
#[derive(Clone, Debug, Serialize)]
pub struct FtRow {
    /// Row label.
    pub row: String,
    /// Largest `|⟨F±θ,u⟩ − closed form|` over the test functions.
    pub max_abs_err: f64,
    /// Largest ladder spread (ε-representation rows only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    /// `max_abs_err ≤ tol`.
    pub pass: bool,
}

/// Tolerance of the Fourier-table rows.
pub const FT_TABLE_TOL: f64 = 1e-6;

/// Parameters of the table rows (shift points and intervals).
const SHIFT_A: f64 = 0.7;
const DELTA_B: f64 = -0.4;
const PHASE_ALPHA: f64 = 0.9;
const CHI: (f64, f64) = (-0.5, 1.2);

type RowFn = Box<dyn Fn(&TestFn, &QuadConfig) -> Result<(C64, C64, f64)> + Send + Sync>;

/// The table rows: each returns `(⟨θ, F±u⟩, closed-form pairing, spread)`.
fn table_rows() -> Vec<(String, RowFn)> {
    let mut rows: Vec<(String, RowFn)> = Vec::new();
    for s in [Sign::Plus, Sign::Minus] {
        let sv = s.value();
        let tag = s.symbol();
        rows.push((
            format!("F{tag} delta_b"),
            Box::new(move |u, cfg| {
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::Delta { b: DELTA_B }, &fu, cfg)?.value;
                let rhs =
                    weighted_integral(u, |y| C64::from_polar(1.0 / SQRT_2PI, -sv * y * DELTA_B), f64::NEG_INFINITY, f64::INFINITY, &[], cfg).value;
                Ok((lhs, rhs, 0.0))
            }),
        ));
        rows.push((
            format!("F{tag} plane phase"),
            Box::new(move |u, cfg| {
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::PlanePhase { alpha: PHASE_ALPHA }, &fu, cfg)?.value;
                let rhs = SQRT_2PI * u.eval_unchecked(&[sv * PHASE_ALPHA]);
                Ok((lhs, rhs, 0.0))
            }),
        ));
        rows.push((
            format!("F{tag} pv 1/(x-a)"),
            Box::new(move |u, cfg| {
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::PvShift { a: SHIFT_A }, &fu, cfg)?.value;
                // ∓i√(π/2) ∫ e^{∓iay} sgn(y) u(y) dy
                let ph = |y: f64| C64::from_polar(1.0, -sv * SHIFT_A * y);
                let pos = weighted_integral(u, ph, 0.0, f64::INFINITY, &[], cfg).value;
                let neg = weighted_integral(u, ph, f64::NEG_INFINITY, 0.0, &[], cfg).value;
                let rhs = C64::new(0.0, -sv * (std::f64::consts::PI / 2.0).sqrt()) * (pos - neg);
                Ok((lhs, rhs, 0.0))
            }),
        ));
        rows.push((
            format!("F{tag} sgn"),
            Box::new(move |u, cfg| {
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::SignFn, &fu, cfg)?.value;
                let pv = pair_1d(&Dist1d::PvShift { a: 0.0 }, u, cfg)?.value;
                let rhs = C64::new(0.0, -sv * (2.0 / std::f64::consts::PI).sqrt()) * pv;
                Ok((lhs, rhs, 0.0))
            }),
        ));
        rows.push((
            format!("F{tag} H"),
            Box::new(move |u, cfg| {
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::Heaviside { orientation: Sign::Plus }, &fu, cfg)?.value;
                let pv = pair_1d(&Dist1d::PvShift { a: 0.0 }, u, cfg)?.value;
                let rhs = (C64::new(0.0, -sv) * pv + std::f64::consts::PI * u.eval_unchecked(&[0.0])) / SQRT_2PI;
                Ok((lhs, rhs, 0.0))
            }),
        ));
        rows.push((
            format!("F{tag} chi_[a,b]"),
            Box::new(move |u, cfg| {
                let (a, b) = CHI;
                let fu = u.fourier_analytic(s);
                let lhs = pair_1d(&Dist1d::CharInterval { a, b }, &fu, cfg)?.value;
                // (±i/√2π)(e^{∓iby} − e^{∓iay})/y, written without cancellation
                // as (2/√2π) e^{∓i(a+b)y/2} sin((b−a)y/2)/y.
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                let kernel = move |y: f64| {
                    let sinc = if (half * y).abs() < 1e-8 { half } else { (half * y).sin() / y };
                    C64::from_polar(2.0 * sinc / SQRT_2PI, -sv * mid * y)
                };
                let rhs = weighted_integral(u, kernel, f64::NEG_INFINITY, f64::INFINITY, &[0.0], cfg).value;
                Ok((lhs, rhs, 0.0))
            }),
        ));
        for a in [SHIFT_A, -SHIFT_A] {
            for phase in [Sign::Plus, Sign::Minus] {
                let beta = phase.value() * a;
                rows.push((
                    format!("F{tag} H({a}x) e^(i({beta})x)"),
                    Box::new(move |u, cfg| {
                        let fu = u.fourier_analytic(s);
                        let lhs = pair_1d(&Dist1d::HalfLinePhase { a, beta }, &fu, cfg)?.value;
                        // (1/√2π)(π u(sβ) − i sgn(a) pv∫ u(y)/(s y − β) dy),
                        // with pv∫u/(sy − β) = s·pv∫u/(y − sβ).
                        let pv = pair_1d(&Dist1d::PvShift { a: sv * beta }, u, cfg)?.value * sv;
                        let rhs = (std::f64::consts::PI * u.eval_unchecked(&[sv * beta]) - C64::new(0.0, a.signum()) * pv) / SQRT_2PI;
                        Ok((lhs, rhs, 0.0))
                    }),
                ));
            }
        }
    }
    // ε-representations of the half-line phases:
    // ±2πi H(±y) e^{iay} = √(2π) lim F⁻(1/(x − a ∓ iε)),
    // ±2πi H(∓y) e^{−iay} = √(2π) lim F⁺(1/(x − a ∓ iε)).
    for side in [Sign::Plus, Sign::Minus] {
        for s in [Sign::Minus, Sign::Plus] {
            let label = format!(
                "{}2pi i H({}y) e^({}iay) = sqrt(2pi) lim F{} 1/(x-a{}i eps)",
                side.symbol(),
                if s == Sign::Minus { side.symbol() } else { side.flip().symbol() },
                if s == Sign::Minus { "+" } else { "-" },
                s.symbol(),
                side.flip().symbol()
            );
            rows.push((
                label,
                Box::new(move |u, cfg| {
                    let fu = u.fourier_analytic(s);
                    let (lim, spread) = damped_limit(&fu, |_| C64::new(1.0, 0.0), SHIFT_A, side, cfg);
                    let lhs = SQRT_2PI * lim.value;
                    // Half-line orientation and phase sign depend on the
                    // transform sign.
                    let (orient, ph) = if s == Sign::Minus { (side, 1.0) } else { (side.flip(), -1.0) };
                    let (lo, hi) = if orient == Sign::Plus { (0.0, f64::INFINITY) } else { (f64::NEG_INFINITY, 0.0) };
                    let half = weighted_integral(u, |y| C64::from_polar(1.0, ph * SHIFT_A * y), lo, hi, &[], cfg).value;
                    let rhs = C64::new(0.0, side.value() * 2.0 * std::f64::consts::PI) * half;
                    Ok((lhs, rhs, spread))
                }),
            ));
        }
    }
    rows
}

/// Verifies every row of the 1D Fourier table on `count` seeded random test
/// functions; returns per-row maximal absolute errors.
pub fn verify_ft_table(seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<FtRow>> {
    cfg.validate()?;
    let fns = TestFn::random_family(seed, 1, count);
    let rows = table_rows();
    let results = parallel::map(&rows, |(name, f)| -> Result<FtRow> {
        let mut max_err = 0.0_f64;
        let mut spread = 0.0_f64;
        for u in &fns {
            let (lhs, rhs, sp) = f(u, cfg)?;
            max_err = max_err.max((lhs - rhs).norm());
            spread = spread.max(sp);
        }
        let is_ladder = name.contains("eps");
        Ok(FtRow { row: name.clone(), max_abs_err: max_err, spread: is_ladder.then_some(spread), pass: max_err <= FT_TABLE_TOL })
    });
    results.into_iter().collect()
}
