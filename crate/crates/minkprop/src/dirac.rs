//! Clifford algebra in the Dirac representation, the contravariant Dirac map
//! `γ#: p ↦ p_λγ^λ`, and the Weyl/Dirac propagators
//! `𝒟̸^k_m η = −(iγ^λ∂_λ + m) 𝒟^k_m η` as matrix-valued pairings.
//!
//! Every matrix pairing is assembled from scalar propagator pairings against
//! `u` and its derivatives (which share one Gaussian envelope and therefore
//! one shell pass):
//! `⟨𝒟̸^k η, u⟩ = iγ^λ⟨𝒟^k η, ∂_λu⟩ − m⟨𝒟^k η, u⟩·Id`.
//! For the elementary kinds `Ψ = i𝒟̸^k η` solves `(iγ^λ∂_λ − m)Ψ = Id·δ`.

use serde::Serialize;

use crate::kinematics::{FourVector, Metric};
use crate::mass_shell::{pair_families, ShellFamily};
use crate::propagators::{pair_propagators, PropTag};
use crate::quadrature::QuadConfig;
use crate::report::CheckLine;
use crate::testfns::{Sign, TestFn};
use crate::{minkowski_square, Error, Mass, Result, C64};

/// A complex 4×4 matrix (row-major).
pub type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The zero matrix.
pub fn zero() -> Mat4 {
    [[ZERO; 4]; 4]
}

/// The identity matrix.
pub fn identity() -> Mat4 {
    let mut m = zero();
    (0..4).for_each(|i| m[i][i] = ONE);
    m
}

/// Matrix product.
pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = zero();
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Matrix sum.
pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

/// Scalar multiple.
pub fn scale(a: &Mat4, s: C64) -> Mat4 {
    a.map(|row| row.map(|z| z * s))
}

/// Conjugate transpose.
pub fn adjoint(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

/// Largest entry modulus.
pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Trace.
pub fn trace(a: &Mat4) -> C64 {
    (0..4).map(|i| a[i][i]).sum()
}

/// The four Dirac matrices with the `(+,−,−,−)` metric.
#[derive(Clone, Debug, Serialize)]
pub struct GammaAlgebra {
    /// `γ⁰ … γ³` in the Dirac (standard) representation.
    pub gamma: [Mat4; 4],
}

impl Default for GammaAlgebra {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaAlgebra {
    /// The Dirac representation: `γ⁰ = diag(1,1,−1,−1)`,
    /// `γ^k = [[0, σ_k], [−σ_k, 0]]`.
    pub fn dirac() -> Self {
        let c = |re: f64, im: f64| C64::new(re, im);
        let pauli: [[[C64; 2]; 2]; 3] = [
            [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        ];
        let mut gamma = [zero(); 4];
        for i in 0..4 {
            gamma[0][i][i] = if i < 2 { ONE } else { -ONE };
        }
        for (k, s) in pauli.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    gamma[k + 1][a][b + 2] = s[a][b];
                    gamma[k + 1][a + 2][b] = -s[a][b];
                }
            }
        }
        Self { gamma }
    }

    /// `γ#(p) = p_λ γ^λ`.
    pub fn gamma_sharp(&self, p: &FourVector) -> Mat4 {
        (0..4).fold(zero(), |acc, l| add(&acc, &scale(&self.gamma[l], C64::new(p.0[l], 0.0))))
    }

    /// `max_{λ,μ} ‖{γ^λ, γ^μ} − 2g^{λμ}Id‖_max`.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..4 {
            for m in 0..4 {
                let ac = add(&mul(&self.gamma[l], &self.gamma[m]), &mul(&self.gamma[m], &self.gamma[l]));
                let g = if l == m { 2.0 * Metric::diag(l) } else { 0.0 };
                worst = worst.max(max_abs(&add(&ac, &scale(&identity(), C64::new(-g, 0.0)))));
            }
        }
        worst
    }

    /// `max_λ ‖(γ^λ)† − g^{λλ}γ^λ‖_max` (`γ⁰` hermitian, `γ^k`
    /// antihermitian).
    pub fn hermiticity_defect(&self) -> f64 {
        (0..4).map(|l| max_abs(&add(&adjoint(&self.gamma[l]), &scale(&self.gamma[l], C64::new(-Metric::diag(l), 0.0))))).fold(0.0, f64::max)
    }
}

/// A matrix-valued pairing.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MatPairing {
    /// The matrix.
    pub value: Mat4,
    /// Absolute error estimate (entrywise bound).
    pub abs_err: f64,
}

/// Index of `∂_λ∂_μ u` (`λ ≤ μ`) in the derivative list.
fn second_index(l: usize, m: usize) -> usize {
    let (a, b) = if l <= m { (l, m) } else { (m, l) };
    // Pairs (a,b) with a ≤ b in lexicographic order, after u and ∂_λu.
    5 + (0..a).map(|i| 4 - i).sum::<usize>() + (b - a)
}

/// `[u, ∂₀u, …, ∂₃u, ∂_λ∂_μu (λ ≤ μ)]`.
fn derivative_family(u: &TestFn, second: bool) -> Result<Vec<TestFn>> {
    let mut out = vec![u.clone()];
    let first: Vec<TestFn> = (0..4).map(|l| u.derivative(l)).collect::<Result<_>>()?;
    out.extend(first.iter().cloned());
    if second {
        for l in 0..4 {
            for m in l..4 {
                out.push(first[l].derivative(m)?);
            }
        }
    }
    Ok(out)
}

/// `iγ^λ s_λ − m s·Id` from scalar pairings `s` (of `u`) and `s_λ` (of
/// `∂_λu`), with the error bound.
fn slash(alg: &GammaAlgebra, m: f64, s: (C64, f64), ds: [(C64, f64); 4]) -> MatPairing {
    let mut value = scale(&identity(), C64::new(-m, 0.0) * s.0);
    let mut err = m * s.1;
    for (l, (v, e)) in ds.iter().enumerate() {
        value = add(&value, &scale(&alg.gamma[l], I * v));
        err += e;
    }
    MatPairing { value, abs_err: err }
}

/// `⟨𝒟̸^k_m η, u⟩ = iγ^λ⟨𝒟^k η, ∂_λu⟩ − m⟨𝒟^k η, u⟩·Id`.
pub fn pair_dirac_propagator(tag: PropTag, m: Mass, u: &TestFn, cfg: &QuadConfig) -> Result<MatPairing> {
    Ok(pair_dirac_many(&[tag], m, u, cfg)?.remove(0))
}

/// [`pair_dirac_propagator`] for several kinds (one shell pass).
pub fn pair_dirac_many(tags: &[PropTag], m: Mass, u: &TestFn, cfg: &QuadConfig) -> Result<Vec<MatPairing>> {
    let fam = derivative_family(u, false)?;
    let vals = pair_propagators(tags, m, &fam, cfg)?;
    let alg = GammaAlgebra::dirac();
    Ok((0..tags.len())
        .map(|t| {
            let s = |i: usize| (vals[i][t].value, vals[i][t].abs_err);
            slash(&alg, m.value(), s(0), [s(1), s(2), s(3), s(4)])
        })
        .collect())
}

/// Dirac (Weyl for `m = 0`) residuals for several kinds. For elementary kinds
/// with `Ψ = i𝒟̸^k η`: `R = −iγ^λ⟨Ψ, ∂_λu⟩ − m⟨Ψ, u⟩ − u(0)·Id`; for
/// homogeneous kinds the same expression with `Ψ = 𝒟̸^k η` and without the
/// `u(0)` term.
pub fn dirac_residuals(tags: &[PropTag], m: Mass, u: &TestFn, cfg: &QuadConfig) -> Result<Vec<MatPairing>> {
    let fam = derivative_family(u, true)?;
    let vals = pair_propagators(tags, m, &fam, cfg)?;
    let alg = GammaAlgebra::dirac();
    let mv = m.value();
    let u0 = u.eval_unchecked(&[0.0; 4]);
    Ok(tags
        .iter()
        .enumerate()
        .map(|(t, tag)| {
            let s = |i: usize| (vals[i][t].value, vals[i][t].abs_err);
            let psi_u = slash(&alg, mv, s(0), [s(1), s(2), s(3), s(4)]);
            let psi_d: Vec<MatPairing> = (0..4).map(|l| slash(&alg, mv, s(1 + l), std::array::from_fn(|k| s(second_index(l, k))))).collect();
            let c = if tag.is_elementary() { I } else { ONE };
            let mut r = scale(&psi_u.value, C64::new(-mv, 0.0) * c);
            let mut err = mv * psi_u.abs_err;
            for (l, p) in psi_d.iter().enumerate() {
                r = add(&r, &scale(&mul(&alg.gamma[l], &p.value), -I * c));
                err += 2.0 * p.abs_err;
            }
            if tag.is_elementary() {
                r = add(&r, &scale(&identity(), -u0));
            }
            MatPairing { value: r, abs_err: err }
        })
        .collect())
}

/// `R` for one kind; see [`dirac_residuals`].
pub fn dirac_residual(tag: PropTag, m: Mass, u: &TestFn, cfg: &QuadConfig) -> Result<MatPairing> {
    Ok(dirac_residuals(&[tag], m, u, cfg)?.remove(0))
}

/// Tolerance of the factorization `(γ#+m)(γ#−m) = (p²−m²)Id`.
pub const FACTORIZATION_TOL: f64 = 1e-12;
/// Relative tolerance (to `|u(0)| + ‖u‖`) of the elementary residuals.
pub const DIRAC_TOL: f64 = 1e-6;
/// Absolute tolerance of the homogeneous residuals.
pub const DIRAC_HOMOGENEOUS_TOL: f64 = 1e-7;
/// Tolerance of the matrix-level propagator identities.
pub const DIRAC_IDENTITY_TOL: f64 = 1e-6;

fn random_momenta(seed: u64, count: usize) -> Vec<FourVector> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| FourVector(std::array::from_fn(|_| rng.gen_range(-3.0..3.0)))).collect()
}

/// Algebraic checks: Clifford relations, hermiticity, `γ#(p)² = p²Id` and
/// the massive factorization on random momenta.
pub fn verify_clifford(m: Mass, seed: u64) -> Vec<CheckLine> {
    let alg = GammaAlgebra::dirac();
    let mv = m.value();
    let square = random_momenta(seed, 20)
        .iter()
        .map(|p| {
            let g = alg.gamma_sharp(p);
            max_abs(&add(&mul(&g, &g), &scale(&identity(), C64::new(-minkowski_square(p), 0.0)))) / (1.0 + minkowski_square(p).abs())
        })
        .fold(0.0, f64::max);
    let fact = random_momenta(seed.wrapping_add(1), 50)
        .iter()
        .map(|p| {
            let g = alg.gamma_sharp(p);
            let mi = scale(&identity(), C64::new(mv, 0.0));
            let lhs = mul(&add(&g, &mi), &add(&g, &scale(&mi, -ONE)));
            let rhs = scale(&identity(), C64::new(minkowski_square(p) - mv * mv, 0.0));
            max_abs(&add(&lhs, &scale(&rhs, -ONE))) / (1.0 + minkowski_square(p).abs() + mv * mv)
        })
        .fold(0.0, f64::max);
    vec![
        CheckLine::new("{gamma^l, gamma^m} = 2 g^lm Id", mv, alg.clifford_defect(), 0.0),
        CheckLine::new("gamma^0 hermitian, gamma^k antihermitian", mv, alg.hermiticity_defect(), 0.0),
        CheckLine::new("gamma#(p)^2 = g(p,p) Id", mv, square, 1e-13),
        CheckLine::new("(gamma# + m)(gamma# - m) = (p^2 - m^2) Id", mv, fact, FACTORIZATION_TOL),
    ]
}

/// Dirac/Weyl residuals, matrix-level identities, the `Id`-part consistency
/// and (at `m = 0`) the light-cone cross-check `𝒟̸^ret η = −γ#.ε⁺`.
pub fn verify_dirac_on(m: Mass, fns: &[TestFn], cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    use PropTag::*;
    let mv = m.value();
    let eq = if mv == 0.0 { "Weyl" } else { "Dirac" };
    let mut worst_elem = [0.0_f64; 4];
    let mut worst_hom = [0.0_f64; 4];
    let mut ret_adv = 0.0_f64;
    let mut id_part = 0.0_f64;
    let mut cone = 0.0_f64;
    let alg = GammaAlgebra::dirac();
    for u in fns {
        let scale_u = u.eval_unchecked(&[0.0; 4]).norm() + u.l1_bound();
        let res = dirac_residuals(&PropTag::ALL, m, u, cfg)?;
        for (i, t) in PropTag::ELEMENTARY.iter().enumerate() {
            let k = PropTag::ALL.iter().position(|x| x == t).expect("listed");
            worst_elem[i] = worst_elem[i].max(max_abs(&res[k].value) / scale_u);
        }
        for (i, t) in PropTag::HOMOGENEOUS.iter().enumerate() {
            let k = PropTag::ALL.iter().position(|x| x == t).expect("listed");
            worst_hom[i] = worst_hom[i].max(max_abs(&res[k].value));
        }
        let mats = pair_dirac_many(&[Dret, Dadv, D], m, u, cfg)?;
        ret_adv = ret_adv.max(max_abs(&add(&add(&mats[0].value, &scale(&mats[1].value, -ONE)), &scale(&mats[2].value, -ONE))));
        let scalar = pair_propagators(&[Dret], m, std::slice::from_ref(u), cfg)?[0][0].value;
        id_part = id_part.max((trace(&mats[0].value) / 4.0 + mv * scalar).norm());
        if mv == 0.0 {
            // ⟨−γ^λ∂_λε⁺, u⟩ = γ^λ⟨ε⁺, ∂_λu⟩.
            let fam = derivative_family(u, false)?;
            let eps = pair_families(&[ShellFamily::Eps(Sign::Plus)], 0.0, &fam[1..], cfg)?;
            let rhs = (0..4).fold(zero(), |acc, l| add(&acc, &scale(&alg.gamma[l], eps[l][0].0.value)));
            cone = cone.max(max_abs(&add(&mats[0].value, &scale(&rhs, -ONE))) / u.l1_bound());
        }
    }
    let mut lines = Vec::new();
    for (i, t) in PropTag::ELEMENTARY.iter().enumerate() {
        lines.push(CheckLine::new(format!("{eq} residual of i slash-{t}"), mv, worst_elem[i], DIRAC_TOL));
    }
    for (i, t) in PropTag::HOMOGENEOUS.iter().enumerate() {
        lines.push(CheckLine::new(format!("homogeneous {eq} residual of slash-{t}"), mv, worst_hom[i], DIRAC_HOMOGENEOUS_TOL));
    }
    lines.push(CheckLine::new("slash-Dret - slash-Dadv = slash-D", mv, ret_adv, DIRAC_IDENTITY_TOL));
    lines.push(CheckLine::new("Id part of slash-Dret = -m Dret", mv, id_part, 1e-9));
    if mv == 0.0 {
        lines.push(CheckLine::new("slash-Dret = -gamma#.eps+ (light cone)", mv, cone, 1e-7));
    }
    Ok(lines)
}

/// Full Dirac suite at the given masses.
pub fn verify_dirac(masses: &[Mass], seed: u64, count: usize, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    if masses.is_empty() {
        return Err(Error::InvalidArgument("no masses given".into()));
    }
    let fns = TestFn::random_family(seed, 4, count);
    let mut lines = Vec::new();
    for &m in masses {
        lines.extend(verify_clifford(m, seed));
        lines.extend(verify_dirac_on(m, &fns, cfg)?);
    }
    Ok(lines)
}
