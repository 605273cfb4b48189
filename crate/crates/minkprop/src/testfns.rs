//! The concrete Schwartz-class test family: complex polynomials times
//! anisotropic Gaussians times plane-wave phases,
//!
//! `u(x) = Σ_t coeff_t·Π_i (x_i − c_i)^{α_{t,i}} · exp(−Σ_i (x_i−c_i)²/(2σ_i²)) · exp(i k·x)`.
//!
//! All terms share one envelope (center `c`, widths `σ`, phase `k`), so every
//! term factorizes over the axes. The family is closed under partial
//! derivatives, translation, reflection, complex conjugation and the Fourier
//! transforms `F^±`, all of which are implemented exactly on the parameters.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::kinematics::{Mass, Metric};
use crate::{Error, Result, C64};

/// Maximum total polynomial degree accepted for externally supplied test
/// functions; derived functions (derivatives, `□ + m²`) may exceed it.
pub const MAX_INPUT_DEGREE: u32 = 4;

/// Degree cap for derived functions used by the verification suites.
pub const MAX_DERIVED_DEGREE: u32 = 6;

/// A sign label `±` (for `F^±`, `ε^±`, windows, …).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    /// `+`
    Plus,
    /// `−`
    Minus,
}

impl Sign {
    /// `+1.0` or `−1.0`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The opposite sign.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `"+"` or `"-"`.
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// One polynomial term `coeff·Π(x−c)^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    /// Complex coefficient.
    pub coeff: C64,
    /// Multi-index, one exponent per axis.
    pub alpha: Vec<u32>,
}

impl Term {
    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

/// A Gaussian–Hermite packet on `R^d`, `d ∈ {1, 3, 4}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFn {
    dim: usize,
    terms: Vec<Term>,
    center: Vec<f64>,
    widths: Vec<f64>,
    phase: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    alpha: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TestFnJson {
    dim: usize,
    terms: Vec<TermJson>,
    center: Vec<f64>,
    widths: Vec<f64>,
    phase: Vec<f64>,
}

impl Serialize for TestFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TestFnJson {
            dim: self.dim,
            terms: self.terms.iter().map(|t| TermJson { re: t.coeff.re, im: t.coeff.im, alpha: t.alpha.clone() }).collect(),
            center: self.center.clone(),
            widths: self.widths.clone(),
            phase: self.phase.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TestFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TestFnJson::deserialize(d)?;
        let terms = j.terms.into_iter().map(|t| Term { coeff: C64::new(t.re, t.im), alpha: t.alpha }).collect();
        TestFn::new(j.dim, terms, j.center, j.widths, j.phase).map_err(serde::de::Error::custom)
    }
}

impl TestFn {
    /// Validated constructor for externally supplied test functions
    /// (degree ≤ [`MAX_INPUT_DEGREE`]).
    pub fn new(dim: usize, terms: Vec<Term>, center: Vec<f64>, widths: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let f = Self::new_unchecked_degree(dim, terms, center, widths, phase)?;
        if let Some(t) = f.terms.iter().find(|t| t.degree() > MAX_INPUT_DEGREE) {
            return Err(Error::InvalidArgument(format!("term degree {} exceeds the input cap {MAX_INPUT_DEGREE}", t.degree())));
        }
        Ok(f)
    }

    fn new_unchecked_degree(dim: usize, terms: Vec<Term>, center: Vec<f64>, widths: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if !matches!(dim, 1 | 3 | 4) {
            return Err(Error::InvalidArgument(format!("dimension must be 1, 3 or 4, got {dim}")));
        }
        for (name, v) in [("center", &center), ("widths", &widths), ("phase", &phase)] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite {name}")));
            }
        }
        if widths.iter().any(|s| *s <= 0.0) {
            return Err(Error::InvalidArgument("all widths must be positive".into()));
        }
        for t in &terms {
            if t.alpha.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: t.alpha.len() });
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
        }
        Ok(Self { dim, terms, center, widths, phase })
    }

    /// A pure Gaussian-times-phase (polynomial `1`).
    pub fn gaussian(center: Vec<f64>, widths: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let dim = center.len();
        Self::new(dim, vec![Term { coeff: C64::new(1.0, 0.0), alpha: vec![0; dim] }], center, widths, phase)
    }

    /// The standard Gaussian `exp(−|x|²/2)` on `R^dim`.
    pub fn standard(dim: usize) -> Self {
        Self::gaussian(vec![0.0; dim], vec![1.0; dim], vec![0.0; dim]).expect("valid standard Gaussian")
    }

    /// Replaces the polynomial part, keeping the envelope.
    pub fn with_terms(&self, terms: Vec<Term>) -> Result<Self> {
        Self::new_unchecked_degree(self.dim, terms, self.center.clone(), self.widths.clone(), self.phase.clone())
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }
    /// Polynomial terms.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
    /// Envelope center `c`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }
    /// Envelope widths `σ`.
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }
    /// Plane-wave phase `k`.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// Maximum total degree over the terms.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    /// Maximum exponent on a given axis.
    pub fn axis_degree(&self, axis: usize) -> u32 {
        self.terms.iter().map(|t| t.alpha[axis]).max().unwrap_or(0)
    }

    /// Whether two functions share center, widths and phase exactly.
    pub fn same_envelope(&self, other: &TestFn) -> bool {
        self.dim == other.dim && self.center == other.center && self.widths == other.widths && self.phase == other.phase
    }

    /// Value at `x` (dimension checked).
    pub fn eval(&self, x: &[f64]) -> Result<C64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Value at `x`; `x.len()` must equal the dimension.
    pub fn eval_unchecked(&self, x: &[f64]) -> C64 {
        let mut expo = 0.0;
        let mut arg = 0.0;
        let mut powers: [[f64; 16]; 4] = [[0.0; 16]; 4];
        for i in 0..self.dim {
            let z = x[i] - self.center[i];
            expo -= z * z / (2.0 * self.widths[i] * self.widths[i]);
            arg += self.phase[i] * x[i];
            let deg = self.axis_degree(i) as usize;
            fill_powers(&mut powers[i], z, deg);
        }
        let mut poly = C64::new(0.0, 0.0);
        for t in &self.terms {
            let mut m = 1.0;
            for i in 0..self.dim {
                m *= powers[i][t.alpha[i] as usize];
            }
            poly += t.coeff * m;
        }
        poly * C64::from_polar(expo.exp(), arg)
    }

    /// Merges equal multi-indices and drops exactly-zero coefficients.
    fn canonical(dim: usize, terms: impl IntoIterator<Item = Term>) -> Vec<Term> {
        let mut map: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for t in terms {
            *map.entry(t.alpha).or_insert(C64::new(0.0, 0.0)) += t.coeff;
        }
        let mut out: Vec<Term> = map.into_iter().filter(|(_, c)| *c != C64::new(0.0, 0.0)).map(|(alpha, coeff)| Term { coeff, alpha }).collect();
        if out.is_empty() {
            out.push(Term { coeff: C64::new(0.0, 0.0), alpha: vec![0; dim] });
        }
        out
    }

    fn rebuild(&self, terms: Vec<Term>) -> TestFn {
        TestFn {
            dim: self.dim,
            terms: Self::canonical(self.dim, terms),
            center: self.center.clone(),
            widths: self.widths.clone(),
            phase: self.phase.clone(),
        }
    }

    /// Exact partial derivative `∂f/∂x^axis`.
    ///
    /// `∂_i[(x−c)^α G e^{ik·x}] = [α_i(x−c)^{α−e_i} − (x_i−c_i)/σ_i²·(x−c)^α + i k_i (x−c)^α] G e^{ik·x}`.
    pub fn derivative(&self, axis: usize) -> Result<TestFn> {
        if axis >= self.dim {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", self.dim)));
        }
        let s2 = self.widths[axis] * self.widths[axis];
        let k = self.phase[axis];
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            let a = t.alpha[axis];
            if a > 0 {
                let mut alpha = t.alpha.clone();
                alpha[axis] -= 1;
                out.push(Term { coeff: t.coeff * a as f64, alpha });
            }
            let mut up = t.alpha.clone();
            up[axis] += 1;
            out.push(Term { coeff: -t.coeff / s2, alpha: up });
            if k != 0.0 {
                out.push(Term { coeff: t.coeff * C64::new(0.0, k), alpha: t.alpha.clone() });
            }
        }
        Ok(self.rebuild(out))
    }

    /// `(∂₀² − ∂₁² − ∂₂² − ∂₃² + m²) f`, exactly (dimension 4 only).
    pub fn dalembertian_plus_m2(&self, m: Mass) -> Result<TestFn> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.dim });
        }
        let mut terms: Vec<Term> = self.terms.iter().map(|t| Term { coeff: t.coeff * (m.value() * m.value()), alpha: t.alpha.clone() }).collect();
        for axis in 0..4 {
            let d2 = self.derivative(axis)?.derivative(axis)?;
            let g = Metric::diag(axis);
            terms.extend(d2.terms.into_iter().map(|t| Term { coeff: t.coeff * g, alpha: t.alpha }));
        }
        Ok(self.rebuild(terms))
    }

    /// `x ↦ f(x − b)`: center moves by `b`; the phase factor `e^{−ik·b}` is
    /// absorbed into the coefficients.
    pub fn translate(&self, b: &[f64]) -> Result<TestFn> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: b.len() });
        }
        let kb: f64 = self.phase.iter().zip(b).map(|(k, b)| k * b).sum();
        let factor = C64::from_polar(1.0, -kb);
        Ok(TestFn {
            dim: self.dim,
            terms: self.terms.iter().map(|t| Term { coeff: t.coeff * factor, alpha: t.alpha.clone() }).collect(),
            center: self.center.iter().zip(b).map(|(c, b)| c + b).collect(),
            widths: self.widths.clone(),
            phase: self.phase.clone(),
        })
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> TestFn {
        TestFn {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let sign = if t.degree() % 2 == 0 { 1.0 } else { -1.0 };
                    Term { coeff: t.coeff * sign, alpha: t.alpha.clone() }
                })
                .collect(),
            center: self.center.iter().map(|c| -c).collect(),
            widths: self.widths.clone(),
            phase: self.phase.iter().map(|k| -k).collect(),
        }
    }

    /// Reflection of a subset of axes, `x_i ↦ −x_i` for `axes[i] = true`.
    pub fn reflect_axes(&self, axes: &[bool]) -> Result<TestFn> {
        if axes.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: axes.len() });
        }
        let flip = |v: &Vec<f64>| v.iter().zip(axes).map(|(x, &a)| if a { -x } else { *x }).collect::<Vec<_>>();
        Ok(TestFn {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let odd: u32 = t.alpha.iter().zip(axes).filter(|(_, &a)| a).map(|(p, _)| *p).sum();
                    let sign = if odd.is_multiple_of(2) { 1.0 } else { -1.0 };
                    Term { coeff: t.coeff * sign, alpha: t.alpha.clone() }
                })
                .collect(),
            center: flip(&self.center),
            widths: self.widths.clone(),
            phase: flip(&self.phase),
        })
    }

    /// Complex conjugate `x ↦ conj f(x)`: conjugated coefficients, `k ↦ −k`.
    pub fn conjugate(&self) -> TestFn {
        TestFn {
            dim: self.dim,
            terms: self.terms.iter().map(|t| Term { coeff: t.coeff.conj(), alpha: t.alpha.clone() }).collect(),
            center: self.center.clone(),
            widths: self.widths.clone(),
            phase: self.phase.iter().map(|k| -k).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: C64) -> TestFn {
        TestFn { dim: self.dim, terms: self.terms.iter().map(|t| Term { coeff: t.coeff * c, alpha: t.alpha.clone() }).collect(), ..self.clone() }
    }

    /// `self + other` for functions sharing the same envelope.
    pub fn add(&self, other: &TestFn) -> Result<TestFn> {
        if !self.same_envelope(other) {
            return Err(Error::InvalidArgument("sum requires a common envelope".into()));
        }
        Ok(self.rebuild(self.terms.iter().chain(other.terms.iter()).cloned().collect()))
    }

    /// Exact Fourier transform `F^± f` over all axes,
    /// `F^±f(y) = (2π)^{−d/2} ∫ f(x) e^{∓i⟨y,x⟩} dx`.
    pub fn fourier_analytic(&self, sign: Sign) -> TestFn {
        self.fourier_axes(sign, &vec![true; self.dim]).expect("mask has the right length")
    }

    /// Exact partial Fourier transform over the axes flagged in `axes`.
    ///
    /// Per transformed axis, `(x−c)^n G_σ(x−c) e^{ikx}` maps to
    /// `σ e^{ikc} Q_n(w) G_{1/σ}(y − s k) e^{−i s c y}` with `s = ±1`,
    /// `w = −s(y − s k)` and `Q_{n+1} = −i(Q_n' − σ² w Q_n)`, `Q_0 = 1`.
    pub fn fourier_axes(&self, sign: Sign, axes: &[bool]) -> Result<TestFn> {
        if axes.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: axes.len() });
        }
        let s = sign.value();
        let mut center = self.center.clone();
        let mut widths = self.widths.clone();
        let mut phase = self.phase.clone();
        let mut constant = C64::new(1.0, 0.0);
        // Per axis: polynomial images of (x−c)^n as coefficient vectors in (y − s k).
        let mut images: Vec<Vec<Vec<C64>>> = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let deg = self.axis_degree(i) as usize;
            if !axes[i] {
                images.push(
                    (0..=deg)
                        .map(|n| {
                            let mut v = vec![C64::new(0.0, 0.0); n + 1];
                            v[n] = C64::new(1.0, 0.0);
                            v
                        })
                        .collect(),
                );
                continue;
            }
            let (c, sig, k) = (self.center[i], self.widths[i], self.phase[i]);
            constant *= C64::from_polar(sig, k * c);
            let q = hermite_images(sig, deg);
            images.push(q.into_iter().map(|qn| qn.into_iter().enumerate().map(|(j, a)| if j % 2 == 1 { a * (-s) } else { a }).collect()).collect());
            center[i] = s * k;
            widths[i] = 1.0 / sig;
            phase[i] = -s * c;
        }
        let mut out = Vec::new();
        for t in &self.terms {
            // Expand Π_i image_i(α_i) into monomials.
            let mut partial: Vec<(C64, Vec<u32>)> = vec![(t.coeff * constant, Vec::with_capacity(self.dim))];
            for i in 0..self.dim {
                let img = &images[i][t.alpha[i] as usize];
                let mut next = Vec::with_capacity(partial.len() * img.len());
                for (coeff, alpha) in &partial {
                    for (j, a) in img.iter().enumerate() {
                        if *a == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut al = alpha.clone();
                        al.push(j as u32);
                        next.push((coeff * a, al));
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(coeff, alpha)| Term { coeff, alpha }));
        }
        Ok(TestFn { dim: self.dim, terms: Self::canonical(self.dim, out), center, widths, phase })
    }

    /// The `L¹` norm bound `Σ_t |coeff_t| Π_i ∫|z|^{α_i} e^{−z²/(2σ_i²)} dz`
    /// (exact for a single Gaussian term); used as `‖u‖` in tolerances.
    pub fn l1_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm() * t.alpha.iter().zip(&self.widths).map(|(&a, &s)| abs_gaussian_moment(a, s)).product::<f64>()).sum()
    }

    /// Draws a random test function with the documented parameter ranges:
    /// `σ_i ∈ [0.5, 2]`, `|c| ≤ 2`, `|k| ≤ 2`, total degree ≤ 2, one to three
    /// terms with coefficients in the unit disk.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> TestFn {
        let widths: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..=2.0)).collect();
        let center = random_in_ball(rng, dim, 2.0);
        let phase = random_in_ball(rng, dim, 2.0);
        let nterms = rng.gen_range(1..=3);
        let mut terms = Vec::with_capacity(nterms);
        for _ in 0..nterms {
            let degree = rng.gen_range(0..=2u32);
            let mut alpha = vec![0u32; dim];
            for _ in 0..degree {
                alpha[rng.gen_range(0..dim)] += 1;
            }
            let r = rng.gen_range(0.0f64..1.0).sqrt();
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            terms.push(Term { coeff: C64::from_polar(r.max(0.05), th), alpha });
        }
        let terms = Self::canonical(dim, terms);
        TestFn::new(dim, terms, center, widths, phase).expect("random parameters are valid")
    }

    /// `count` seeded random test functions (ChaCha8 stream).
    pub fn random_family(seed: u64, dim: usize, count: usize) -> Vec<TestFn> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| TestFn::random(&mut rng, dim)).collect()
    }

    /// JSON text in the documented schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialization of plain data")
    }

    /// Parses the documented JSON schema.
    pub fn from_json(text: &str) -> Result<TestFn> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `∫ |z|^a e^{−z²/(2σ²)} dz = σ^{a+1} 2^{(a+1)/2} Γ((a+1)/2)`.
pub(crate) fn abs_gaussian_moment(a: u32, sigma: f64) -> f64 {
    let s = (a + 1) as f64 / 2.0;
    sigma.powi(a as i32 + 1) * 2f64.powf(s) * gamma_half_integer(a + 1)
}

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half_integer(n: u32) -> f64 {
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x+1) = xΓ(x).
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if n.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    while 2.0 * x < n as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

/// `powers[j] = z^j` for `j ≤ deg`.
#[inline]
pub(crate) fn fill_powers(powers: &mut [f64], z: f64, deg: usize) {
    powers[0] = 1.0;
    for j in 1..=deg {
        powers[j] = powers[j - 1] * z;
    }
}

/// Coefficients (in `w`) of `Q_n(w)` for `n = 0..=deg`, where
/// `(−i∂_w)^n e^{−σ²w²/2} = Q_n(w) e^{−σ²w²/2}`, times `σ` is the 1D Fourier image.
fn hermite_images(sigma: f64, deg: usize) -> Vec<Vec<C64>> {
    let s2 = sigma * sigma;
    let mut out: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    for n in 0..deg {
        let q = &out[n];
        let mut next = vec![C64::new(0.0, 0.0); n + 2];
        // Q' term.
        for j in 1..q.len() {
            next[j - 1] += q[j] * j as f64;
        }
        // −σ² w Q term.
        for j in 0..q.len() {
            next[j + 1] -= q[j] * s2;
        }
        let minus_i = C64::new(0.0, -1.0);
        out.push(next.into_iter().map(|v| v * minus_i).collect());
    }
    out
}
