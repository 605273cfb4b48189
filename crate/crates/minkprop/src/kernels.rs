//! One-dimensional kernels evaluated at each radial node of the shell engine:
//! principal values and `ε`-ladders across the temporal factor, half-line
//! Fourier transforms (time windows), and the oscillatory sine transforms of
//! the digamma-type representations.

use crate::quadrature::{adaptive_vec, gaussian_breaks, ladder_vec, pv_vec, uniform_breaks, QuadConfig, VecQuad, ACTIVE_WIDTHS, TRUNCATION_WIDTHS};
use crate::shell::Temporal;
use crate::C64;

/// Partition of the temporal Gaussian's truncated support, widened to contain
/// `pole` with a margin of at least `margin`.
fn temporal_breaks(t: &Temporal, pole: f64, margin: f64) -> Vec<f64> {
    let lo = (t.center - TRUNCATION_WIDTHS * t.sigma).min(pole - margin);
    let hi = (t.center + TRUNCATION_WIDTHS * t.sigma).max(pole + margin);
    gaussian_breaks(lo, hi, t.center, t.sigma)
}

/// Half-width of the folding window around a pole.
fn fold_width(t: &Temporal) -> f64 {
    t.sigma.min(1.0)
}

/// `pv∫ g_j(x)/(x − pole) dx` for every temporal power `j` (symmetric
/// excision with extrapolation).
pub(crate) fn pv_temporal(t: &Temporal, pole: f64, cfg: &QuadConfig) -> VecQuad {
    let fold = fold_width(t);
    let breaks = temporal_breaks(t, pole, 2.0 * fold);
    pv_vec(t.len(), |x, out: &mut [C64]| t.values(x, out), pole, &breaks, fold, cfg)
}

/// Raw `ε`-ladder `∫ g_j(x)/(x − pole + i·s·ε_k) dx` (layout `j * rungs + k`).
pub(crate) fn ladder_temporal(t: &Temporal, pole: f64, s: f64, cfg: &QuadConfig) -> VecQuad {
    let fold = fold_width(t);
    let breaks = temporal_breaks(t, pole, 2.0 * fold);
    ladder_vec(t.len(), |x, out: &mut [C64]| t.values(x, out), pole, s, &breaks, fold, cfg)
}

/// Half-line transforms `∫_{t>0} g_j(t) e^{−iωt} dt` (first `nj` entries) and
/// `∫_{t<0} g_j(t) e^{−iωt} dt` (next `nj` entries).
pub(crate) fn half_line_temporal(t: &Temporal, omega: f64, cfg: &QuadConfig) -> VecQuad {
    let nj = t.len();
    let lo = t.center - TRUNCATION_WIDTHS * t.sigma;
    let hi = t.center + TRUNCATION_WIDTHS * t.sigma;
    let width = t.sigma.min(std::f64::consts::PI / omega.abs().max(1e-12));
    let mut out = VecQuad::zeros(2 * nj);
    let mut buf = vec![C64::new(0.0, 0.0); nj];
    for (half, (a, b)) in [(0.0f64.max(lo), hi), (lo, 0.0f64.min(hi))].into_iter().enumerate() {
        if b <= a {
            continue;
        }
        let breaks = oscillatory_breaks(a, b, t.center, t.sigma, width);
        let r = adaptive_vec(
            nj,
            |x, o: &mut [C64]| {
                t.values(x, &mut buf);
                let ph = C64::from_polar(1.0, -omega * x);
                for (oi, bi) in o.iter_mut().zip(&buf) {
                    *oi = bi * ph;
                }
            },
            &breaks,
            cfg,
        );
        for j in 0..nj {
            out.values[half * nj + j] = r.values[j];
            out.errors[half * nj + j] = r.errors[j];
        }
        out.evaluations += r.evaluations;
        out.converged &= r.converged;
    }
    out
}

/// Like [`gaussian_breaks`] but with an independent panel width inside the
/// active region (for oscillatory integrands).
fn oscillatory_breaks(a: f64, b: f64, center: f64, sigma: f64, width: f64) -> Vec<f64> {
    let lo = (center - ACTIVE_WIDTHS * sigma).max(a);
    let hi = (center + ACTIVE_WIDTHS * sigma).min(b);
    let mut out = vec![a];
    if hi > lo {
        out.extend(uniform_breaks(lo, hi, width));
        out.push(b);
    } else {
        out.push(b);
    }
    out.dedup();
    out
}

/// `∫_m^∞ dτ h_j(τ) sin(r√(τ²−m²))` for a Gaussian-damped family `h`
/// (center `center`, width `sigma`), computed in the variable
/// `κ = √(τ²−m²)` (`dτ = κ/τ dκ`), which removes the square-root endpoint
/// behavior.
#[allow(clippy::too_many_arguments)]
pub(crate) fn sine_transform<H>(nj: usize, mut h: H, center: f64, sigma: f64, m: f64, r: f64, cfg: &QuadConfig) -> VecQuad
where
    H: FnMut(f64, &mut [C64]),
{
    let kappa = |tau: f64| (tau * tau - m * m).max(0.0).sqrt();
    let tau_cut = m.max(center) + TRUNCATION_WIDTHS * sigma;
    let k_cut = kappa(tau_cut);
    let k_lo = kappa((center - ACTIVE_WIDTHS * sigma).max(m));
    let k_hi = kappa((center + ACTIVE_WIDTHS * sigma).max(m));
    if k_hi <= 0.0 {
        // The damped family is negligible on [m, ∞).
        return VecQuad::zeros(nj);
    }
    let width = sigma.min(std::f64::consts::PI / r.max(1e-12));
    let mut breaks = vec![0.0];
    breaks.extend(uniform_breaks(k_lo, k_hi, width));
    if k_cut > k_hi {
        breaks.push(k_cut);
    }
    breaks.dedup();
    adaptive_vec(
        nj,
        |k, out: &mut [C64]| {
            let tau = m.hypot(k);
            h(tau, out);
            let w = if tau > 0.0 { k / tau } else { 1.0 } * (r * k).sin();
            out.iter_mut().for_each(|v| *v *= w);
        },
        &breaks,
        cfg,
    )
}
