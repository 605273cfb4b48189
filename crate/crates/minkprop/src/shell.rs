//! The spherical-shell integration engine shared by every mass-shell,
//! light-cone and propagator pairing.
//!
//! A batch of 4D test functions sharing one envelope is split per term into a
//! temporal factor `g_j(x⁰) = (x⁰−c₀)^j e^{−(x⁰−c₀)²/(2σ₀²)} e^{ik₀x⁰}` and a
//! spatial factor `S_{f,j}(x⊥)` (polynomial × common 3D Gaussian × phase).
//! The engine evaluates
//!
//! `I_{f,l} = ∫₀^∞ ρ² dρ Σ_j K_{j,l}(ρ, E_m(ρ)) ∫ dΩ S_{f,j}(ρ n̂)`
//!
//! where the radial kernel `K` (point evaluation on the shell, principal
//! value in `x⁰`, an `ε`-ladder, a half-line transform, …) is supplied by the
//! caller. The angular integral does not depend on the kernel, so it is
//! computed once per radial node for all `(f, j)`.

use crate::kinematics::{energy, norm3};
use crate::quadrature::{adaptive_vec_checked, sphere_vec, uniform_breaks, QuadConfig, VecQuad, TRUNCATION_WIDTHS};
use crate::testfns::{abs_gaussian_moment, fill_powers, TestFn};
use crate::{Error, Result, C64};

/// Radial half-width (in largest spatial widths) of the region where the
/// envelope exceeds `e^{−40}`; beyond it the integrand is integrated as a
/// single panel up to the 40-width truncation radius.
const RADIAL_ACTIVE_WIDTHS: f64 = 9.0;

/// Exponent below which an envelope factor is treated as numerically zero
/// (`e^{−70} ≈ 4e−31`).
const NEGLIGIBLE_EXPONENT: f64 = 70.0;

/// The temporal factor family `g_j`, `j ∈ powers`.
#[derive(Clone, Debug)]
pub(crate) struct Temporal {
    pub center: f64,
    pub sigma: f64,
    pub phase: f64,
    pub powers: Vec<u32>,
}

impl Temporal {
    /// `out[jj] = g_{powers[jj]}(x)`.
    #[inline]
    pub(crate) fn values(&self, x: f64, out: &mut [C64]) {
        let z = x - self.center;
        let base = C64::from_polar((-z * z / (2.0 * self.sigma * self.sigma)).exp(), self.phase * x);
        for (o, &j) in out.iter_mut().zip(&self.powers) {
            *o = base * z.powi(j as i32);
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.powers.len()
    }
}

#[derive(Clone, Debug)]
struct PolyTerm {
    coeff: C64,
    alpha: [usize; 3],
}

/// A batch of test functions prepared for shell integration.
#[derive(Clone, Debug)]
pub(crate) struct ShellBatch {
    pub temporal: Temporal,
    center: [f64; 3],
    inv_two_s2: [f64; 3],
    sigma_min: f64,
    sigma_max: f64,
    phase: [f64; 3],
    max_deg: [usize; 3],
    /// Index `f * nj + jj`.
    polys: Vec<Vec<PolyTerm>>,
    nf: usize,
    /// Largest `L¹` bound of a spatial factor `S_{f,j}`; sets the absolute
    /// accuracy scale of the angular integrals.
    spatial_l1: f64,
}

impl ShellBatch {
    /// Prepares a batch; all functions must be 4D and share one envelope.
    pub(crate) fn new(fns: &[&TestFn]) -> Result<Self> {
        let first = fns.first().ok_or_else(|| Error::InvalidArgument("empty batch".into()))?;
        if first.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: first.dim() });
        }
        for f in fns {
            if !f.same_envelope(first) {
                return Err(Error::InvalidArgument("batch functions must share one envelope".into()));
            }
        }
        let mut powers: Vec<u32> = fns.iter().flat_map(|f| f.terms().iter().map(|t| t.alpha[0])).collect();
        powers.sort_unstable();
        powers.dedup();
        let nj = powers.len();
        let mut polys: Vec<Vec<PolyTerm>> = vec![Vec::new(); fns.len() * nj];
        let mut max_deg = [0usize; 3];
        let s = first.widths();
        let mut l1 = vec![0.0; fns.len() * nj];
        for (fi, f) in fns.iter().enumerate() {
            for t in f.terms() {
                let jj = powers.binary_search(&t.alpha[0]).expect("power collected above");
                let alpha = [t.alpha[1] as usize, t.alpha[2] as usize, t.alpha[3] as usize];
                for i in 0..3 {
                    max_deg[i] = max_deg[i].max(alpha[i]);
                }
                l1[fi * nj + jj] += t.coeff.norm() * (1..4).map(|i| abs_gaussian_moment(t.alpha[i], s[i])).product::<f64>();
                polys[fi * nj + jj].push(PolyTerm { coeff: t.coeff, alpha });
            }
        }
        let c = first.center();
        let k = first.phase();
        Ok(Self {
            temporal: Temporal { center: c[0], sigma: s[0], phase: k[0], powers },
            center: [c[1], c[2], c[3]],
            inv_two_s2: [1.0 / (2.0 * s[1] * s[1]), 1.0 / (2.0 * s[2] * s[2]), 1.0 / (2.0 * s[3] * s[3])],
            sigma_min: s[1].min(s[2]).min(s[3]),
            sigma_max: s[1].max(s[2]).max(s[3]),
            phase: [k[1], k[2], k[3]],
            max_deg,
            polys,
            nf: fns.len(),
            spatial_l1: l1.into_iter().fold(0.0, f64::max),
        })
    }

    pub(crate) fn nj(&self) -> usize {
        self.temporal.len()
    }

    /// Spatial factors at `p`: `out[f * nj + jj] = S_{f,j}(p)`.
    #[inline]
    fn spatial_values(&self, p: &[f64; 3], out: &mut [C64]) {
        let mut expo = 0.0;
        let mut arg = 0.0;
        let mut pw = [[0.0f64; 16]; 3];
        for i in 0..3 {
            let z = p[i] - self.center[i];
            expo -= z * z * self.inv_two_s2[i];
            arg += self.phase[i] * p[i];
            fill_powers(&mut pw[i], z, self.max_deg[i]);
        }
        let env = C64::from_polar(expo.exp(), arg);
        for (o, poly) in out.iter_mut().zip(&self.polys) {
            let mut acc = C64::new(0.0, 0.0);
            for t in poly {
                acc += t.coeff * (pw[0][t.alpha[0]] * pw[1][t.alpha[1]] * pw[2][t.alpha[2]]);
            }
            *o = acc * env;
        }
    }

    /// Upper bound of `|S|` on the sphere of radius `ρ` (envelope times
    /// polynomial bound).
    fn sphere_bound_exponent(&self, rho: f64) -> f64 {
        let c = norm3(&self.center);
        let d = (rho - c).max(0.0);
        d * d / (2.0 * self.sigma_max * self.sigma_max)
    }

    /// `∫ dΩ S_{f,j}(ρ n̂)` for all `(f, j)`.
    fn angular(&self, rho: f64, cfg: &QuadConfig) -> VecQuad {
        let n = self.polys.len();
        if rho == 0.0 {
            let mut out = VecQuad::zeros(n);
            self.spatial_values(&[0.0; 3], &mut out.values);
            out.values.iter_mut().for_each(|v| *v *= 4.0 * std::f64::consts::PI);
            out.evaluations = 1;
            return out;
        }
        sphere_vec(n, |u, out| self.spatial_values(&[rho * u[0], rho * u[1], rho * u[2]], out), &self.center, cfg)
    }
}

/// Runs the shell integral. `kernel(ρ, E, temporal, out)` must fill
/// `out[jj * n_out + l]` and return an absolute error bound for its values.
/// `panel` is the initial radial panel width. Returns `I` with layout
/// `f * n_out + l`.
pub(crate) fn shell_integrate<K>(batch: &ShellBatch, mass: f64, n_out: usize, panel: f64, mut kernel: K, cfg: &QuadConfig) -> VecQuad
where
    K: FnMut(f64, f64, &Temporal, &mut [C64]) -> f64,
{
    let nf = batch.nf;
    let nj = batch.nj();
    let n = nf * n_out;
    let c = norm3(&batch.center);
    let lo = (c - RADIAL_ACTIVE_WIDTHS * batch.sigma_max).max(0.0);
    let hi = c + RADIAL_ACTIVE_WIDTHS * batch.sigma_max;
    let cut = c + TRUNCATION_WIDTHS * batch.sigma_max;
    let mut breaks = Vec::new();
    if lo > 0.0 {
        breaks.push(0.0);
    }
    breaks.extend(uniform_breaks(lo, hi, panel));
    breaks.push(cut);
    // Angular integrals only need absolute accuracy relative to the size of
    // the spatial factors: an error δ at every node changes the radial
    // integral by at most δ·ρ²·(active length).
    let target = 0.1 * cfg.abs_tol.max(cfg.rel_tol * batch.spatial_l1);
    let span = hi - lo + batch.sigma_max;
    let mut kbuf = vec![C64::new(0.0, 0.0); nj * n_out];
    let mut inner_evals = 0u64;
    let mut inner_ok = true;
    let mut res = adaptive_vec_checked(
        n + 1,
        n,
        |rho, out: &mut [C64]| {
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            if batch.sphere_bound_exponent(rho) > NEGLIGIBLE_EXPONENT {
                return;
            }
            let node_cfg = QuadConfig { abs_tol: target / (rho.max(batch.sigma_min).powi(2) * span), rel_tol: cfg.rel_tol, ..*cfg };
            let ang = batch.angular(rho, &node_cfg);
            inner_evals += ang.evaluations;
            inner_ok &= ang.converged;
            let e = energy(mass, rho);
            let kerr = kernel(rho, e, &batch.temporal, &mut kbuf);
            let w = rho * rho;
            let mut err = 0.0_f64;
            for f in 0..nf {
                for l in 0..n_out {
                    let mut acc = C64::new(0.0, 0.0);
                    let mut e_acc = 0.0;
                    for jj in 0..nj {
                        let a = ang.values[f * nj + jj];
                        let k = kbuf[jj * n_out + l];
                        acc += a * k;
                        e_acc += ang.errors[f * nj + jj] * k.norm() + a.norm() * kerr;
                    }
                    out[f * n_out + l] = acc * w;
                    err = err.max(e_acc * w);
                }
            }
            out[n] = C64::new(err, 0.0);
        },
        &breaks,
        cfg,
    );
    let extra = res.values[n].re.abs();
    res.values.truncate(n);
    res.errors.truncate(n);
    res.errors.iter_mut().for_each(|e| *e += extra);
    res.evaluations += inner_evals;
    res.converged &= inner_ok;
    res
}

/// Radial panel width suited to the batch and a temporal resolution.
pub(crate) fn default_panel(batch: &ShellBatch, temporal_width: f64) -> f64 {
    (2.0 * batch.sigma_min).min(2.0 * temporal_width).max(1e-3)
}

/// Indices of `fns` grouped by shared envelope (first-occurrence order).
pub(crate) fn envelope_groups(fns: &[TestFn]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        match groups.iter_mut().find(|g| fns[g[0]].same_envelope(f)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}
