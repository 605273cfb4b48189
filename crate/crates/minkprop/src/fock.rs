//! Graded emission/absorption operator algebra on a finite momentum lattice.
//!
//! Operators are kept symbolically as normal-ordered polynomials
//! ([`OpExpr`]) in the generators `absorb/emit × {particle, antiparticle} ×
//! mode`. The discretized super-commutation rule is
//! `⟦absorb(k), emit(j)⟧ = δ_kj/dp³`, so that `Σ dp³·δ_lattice = 1`. A dense
//! truncated-Fock realization ([`FockMatrix`]) serves as an independent
//! oracle for the sign and contraction bookkeeping.
//!
//! Free fields on the lattice are
//! `φ(x) = Σ_p dp³(2π)^{−3/2}(2E)^{−1/2}(e^{−i⟨p,x⟩} absorb_P(p) + e^{i⟨p,x⟩} emit_A(p))`,
//! `φ̃(x) = Σ_p dp³(2π)^{−3/2}(2E)^{−1/2}(±e^{−i⟨p,x⟩} absorb_A(p) + e^{i⟨p,x⟩} emit_P(p))`
//! (upper sign bosons), with `p₀ = E_m(p⊥)` and the plain pairing `⟨p,x⟩`.
//! Their graded commutator is the lattice version of `𝒟_m(x − y)`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::propagators::{pair_propagator, PropKind, PropTag};
use crate::quadrature::QuadConfig;
use crate::report::CheckLine;
use crate::testfns::{Sign, TestFn};
use crate::{energy_on_shell, parallel, Error, FourVector, Mass, Result, C64};

/// Particle statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    /// Commuting generators.
    Boson,
    /// Anticommuting generators.
    Fermion,
}

impl Statistics {
    /// The sign picked up when two generators are swapped.
    pub fn swap_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    /// The antifield's absorption sign (`+` bosons, `−` fermions).
    pub fn antifield_sign(self) -> f64 {
        self.swap_sign()
    }
}

impl FromStr for Statistics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boson" => Ok(Statistics::Boson),
            "fermion" => Ok(Statistics::Fermion),
            _ => Err(Error::InvalidArgument(format!("unknown statistics {s:?} (expected boson|fermion)"))),
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

/// Particle or antiparticle register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Register {
    /// Particle register.
    Particle,
    /// Antiparticle register.
    Anti,
}

/// The four generator kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenKind {
    /// Absorbs a particle.
    AbsorbParticle,
    /// Emits a particle.
    EmitParticle,
    /// Absorbs an antiparticle.
    AbsorbAnti,
    /// Emits an antiparticle.
    EmitAnti,
}

impl GenKind {
    fn parts(self) -> (bool, Register) {
        match self {
            GenKind::AbsorbParticle => (false, Register::Particle),
            GenKind::EmitParticle => (true, Register::Particle),
            GenKind::AbsorbAnti => (false, Register::Anti),
            GenKind::EmitAnti => (true, Register::Anti),
        }
    }
}

/// A finite momentum lattice `p⊥ ∈ dp·{−n_half..n_half}³` with two registers.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeSpec {
    /// Lattice spacing.
    pub dp: f64,
    /// Half-width in modes per axis.
    pub n_half: usize,
    /// Field mass.
    pub mass: Mass,
    /// Statistics.
    pub statistics: Statistics,
    /// Internal dimension (only the scalar sector, 1, is supported).
    pub internal_dim: usize,
}

/// Largest supported number of lattice modes.
pub const MAX_MODES: usize = 2_000_000;

impl LatticeSpec {
    /// Validated lattice with `internal_dim = 1`.
    pub fn new(dp: f64, n_half: usize, mass: Mass, statistics: Statistics) -> Result<Self> {
        if !(dp > 0.0 && dp.is_finite()) {
            return Err(Error::InvalidArgument(format!("lattice spacing must be positive, got {dp}")));
        }
        let side = 2 * n_half + 1;
        if side.checked_pow(3).is_none_or(|n| n > MAX_MODES) {
            return Err(Error::InvalidArgument(format!("lattice with n_half = {n_half} is too large")));
        }
        Ok(Self { dp, n_half, mass, statistics, internal_dim: 1 })
    }

    /// Number of momentum modes `(2n_half+1)³`.
    pub fn modes(&self) -> usize {
        (2 * self.n_half + 1).pow(3)
    }

    /// Number of generator slots (modes × 2 registers).
    pub fn slots(&self) -> usize {
        2 * self.modes()
    }

    /// The contraction value `1/dp³`.
    pub fn contraction(&self) -> f64 {
        1.0 / (self.dp * self.dp * self.dp)
    }

    /// The lattice measure `dp³`.
    pub fn cell(&self) -> f64 {
        self.dp * self.dp * self.dp
    }

    /// Spatial momentum of a mode.
    pub fn momentum(&self, mode: usize) -> [f64; 3] {
        let side = 2 * self.n_half + 1;
        let n = self.n_half as f64;
        let k = [mode / (side * side), (mode / side) % side, mode % side];
        k.map(|k| (k as f64 - n) * self.dp)
    }

    /// On-shell four-momentum `(E_m(p⊥), p⊥)` of a mode.
    pub fn four_momentum(&self, mode: usize) -> FourVector {
        let p = self.momentum(mode);
        FourVector::new(energy_on_shell(self.mass, &p), p[0], p[1], p[2])
    }

    fn slot(&self, reg: Register, mode: usize) -> u32 {
        (match reg {
            Register::Particle => mode,
            Register::Anti => self.modes() + mode,
        }) as u32
    }

    /// The single-generator expression.
    pub fn generator(&self, kind: GenKind, mode: usize) -> Result<OpExpr> {
        if mode >= self.modes() {
            return Err(Error::InvalidArgument(format!("mode {mode} outside a lattice of {} modes", self.modes())));
        }
        let (emit, reg) = kind.parts();
        let s = self.slot(reg, mode);
        let mono = if emit { Monomial { emit: vec![s], absorb: vec![] } } else { Monomial { emit: vec![], absorb: vec![s] } };
        Ok(OpExpr::from_terms([(mono, C64::new(1.0, 0.0))]))
    }

    /// Composition with all Wick contractions.
    pub fn multiply(&self, a: &OpExpr, b: &OpExpr) -> OpExpr {
        self.product(a, b, true)
    }

    /// Composition with normal reordering and *no* contractions.
    pub fn normal_order_free(&self, a: &OpExpr, b: &OpExpr) -> OpExpr {
        self.product(a, b, false)
    }

    fn product(&self, a: &OpExpr, b: &OpExpr, contract: bool) -> OpExpr {
        let mut out = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let mut word: Vec<(bool, u32)> = Vec::with_capacity(ma.len() + mb.len());
                word.extend(ma.emit.iter().map(|&s| (true, s)));
                word.extend(ma.absorb.iter().map(|&s| (false, s)));
                word.extend(mb.emit.iter().map(|&s| (true, s)));
                word.extend(mb.absorb.iter().map(|&s| (false, s)));
                self.order_word(word, ca * cb, contract, &mut out);
            }
        }
        OpExpr::from_map(out)
    }

    /// Wick-reorders a generator word into `out`.
    fn order_word(&self, mut word: Vec<(bool, u32)>, coeff: C64, contract: bool, out: &mut BTreeMap<Monomial, C64>) {
        let swap = self.statistics.swap_sign();
        // First absorption directly followed by an emission.
        if let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| !word[i].0 && word[i + 1].0) {
            if contract && word[i].1 == word[i + 1].1 {
                let mut rest = word.clone();
                rest.drain(i..i + 2);
                self.order_word(rest, coeff * self.contraction(), contract, out);
            }
            word.swap(i, i + 1);
            self.order_word(word, coeff * swap, contract, out);
            return;
        }
        let split = word.iter().position(|g| !g.0).unwrap_or(word.len());
        let mut emit: Vec<u32> = word[..split].iter().map(|g| g.1).collect();
        let mut absorb: Vec<u32> = word[split..].iter().map(|g| g.1).collect();
        let (Some(se), Some(sa)) = (self.sort_list(&mut emit), self.sort_list(&mut absorb)) else {
            return;
        };
        *out.entry(Monomial { emit, absorb }).or_insert(C64::new(0.0, 0.0)) += coeff * se * sa;
    }

    /// Canonical order inside one list; `None` for a vanishing fermion term.
    fn sort_list(&self, list: &mut [u32]) -> Option<f64> {
        let mut sign = 1.0;
        // Insertion sort, counting transpositions.
        for i in 1..list.len() {
            let mut j = i;
            while j > 0 && list[j - 1] > list[j] {
                list.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        match self.statistics {
            Statistics::Boson => Some(1.0),
            Statistics::Fermion if list.windows(2).any(|w| w[0] == w[1]) => None,
            Statistics::Fermion => Some(sign),
        }
    }

    /// Grade (generator-count parity for fermions, 0 for bosons) of an
    /// expression with definite grade.
    pub fn grade(&self, a: &OpExpr) -> Result<u32> {
        if self.statistics == Statistics::Boson {
            return Ok(0);
        }
        let mut grades = a.terms.keys().map(|m| (m.len() % 2) as u32);
        let first = grades.next().unwrap_or(0);
        if grades.all(|g| g == first) {
            Ok(first)
        } else {
            Err(Error::Algebra("expression has indefinite grade".into()))
        }
    }

    /// `⟦a,b⟧ = ab − (−1)^{|a||b|} ba` by full Wick expansion.
    pub fn graded_commutator(&self, a: &OpExpr, b: &OpExpr) -> Result<OpExpr> {
        let sign = if self.grade(a)? * self.grade(b)? == 1 { -1.0 } else { 1.0 };
        Ok(self.multiply(a, b).add_scaled(&self.multiply(b, a), C64::new(-sign, 0.0)))
    }

    /// `⟦a,b⟧` for expressions linear in the generators: only the
    /// contractions survive, giving a multiple of the identity. Cost is
    /// linear in the number of terms.
    pub fn linear_commutator(&self, a: &OpExpr, b: &OpExpr) -> Result<C64> {
        let (la, lb) = (a.linear_parts()?, b.linear_parts()?);
        // ⟦absorb(s), emit(s)⟧ = c; ⟦emit(s), absorb(s)⟧ = −swap·c.
        let c = self.contraction();
        let swap = self.statistics.swap_sign();
        let mut total = C64::new(0.0, 0.0);
        for (s, (ea, aa)) in la.iter() {
            if let Some((eb, ab)) = lb.get(s) {
                total += aa * eb * c - ea * ab * (swap * c);
            }
        }
        Ok(total)
    }

    /// Field expression `φ` (or `φ̃`, `φ*`, optionally `∂₀`) at `x`.
    pub fn field_expr(&self, field: Field, x: &FourVector, dt: bool) -> OpExpr {
        self.field_from_phases(field, dt, |_, p| {
            let ph = p.pairing(x);
            (C64::from_polar(1.0, -ph), C64::from_polar(1.0, ph))
        })
    }

    /// `φ(x)` with the lattice normalization.
    pub fn field(&self, x: &FourVector) -> OpExpr {
        self.field_expr(Field::Phi, x, false)
    }

    /// `φ̃(x)` with the statistics-dependent absorption sign.
    pub fn antifield(&self, x: &FourVector) -> OpExpr {
        self.field_expr(Field::PhiTilde, x, false)
    }

    /// Smeared field `∫u(x)F(x)d⁴x`, using the analytic transforms
    /// `∫u e^{∓i⟨p,x⟩} = (2π)² F^±u(p)`.
    pub fn smeared_field(&self, field: Field, u: &TestFn, dt: bool) -> Result<OpExpr> {
        if u.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: u.dim() });
        }
        let (fp, fm) = (u.fourier_analytic(Sign::Plus), u.fourier_analytic(Sign::Minus));
        let norm = 4.0 * PI * PI;
        Ok(self.field_from_phases(field, dt, |_, p| (fp.eval_unchecked(&p.0) * norm, fm.eval_unchecked(&p.0) * norm)))
    }

    /// Assembles a field from the per-mode weights of `e^{−i⟨p,x⟩}` and
    /// `e^{i⟨p,x⟩}`.
    fn field_from_phases<F>(&self, field: Field, dt: bool, phases: F) -> OpExpr
    where
        F: Fn(usize, &FourVector) -> (C64, C64) + Sync,
    {
        let modes: Vec<usize> = (0..self.modes()).collect();
        let pref = self.cell() * (2.0 * PI).powf(-1.5);
        let per_mode = parallel::map(&modes, |&k| {
            let p = self.four_momentum(k);
            let (mut neg, mut pos) = phases(k, &p);
            let w = pref / (2.0 * p.time()).sqrt();
            if dt {
                // ∂₀ e^{∓i⟨p,x⟩} = ∓iE e^{∓i⟨p,x⟩}.
                neg *= C64::new(0.0, -p.time());
                pos *= C64::new(0.0, p.time());
            }
            (k, neg * w, pos * w)
        });
        let sign = self.statistics.antifield_sign();
        let mut terms = Vec::with_capacity(2 * modes.len());
        for (k, neg, pos) in per_mode {
            let (ab, em) = match field {
                Field::Phi => ((self.slot(Register::Particle, k), neg), (self.slot(Register::Anti, k), pos)),
                Field::PhiTilde => ((self.slot(Register::Anti, k), neg * sign), (self.slot(Register::Particle, k), pos)),
                Field::PhiStar => ((self.slot(Register::Particle, k), pos.conj()), (self.slot(Register::Anti, k), neg.conj())),
            };
            terms.push((Monomial { emit: vec![], absorb: vec![ab.0] }, ab.1));
            terms.push((Monomial { emit: vec![em.0], absorb: vec![] }, em.1));
        }
        OpExpr::from_terms(terms)
    }

    /// Direct lattice sum `(2π)^{−3} Σ dp³ e^{i p⊥·d}`.
    pub fn lattice_delta(&self, d: &[f64; 3]) -> f64 {
        let n = self.modes();
        let s: f64 = (0..n)
            .map(|k| {
                let p = self.momentum(k);
                (p[0] * d[0] + p[1] * d[1] + p[2] * d[2]).cos()
            })
            .sum();
        s * self.cell() / (2.0 * PI).powi(3)
    }

    /// Direct lattice sum `(2π)^{−3} Σ dp³/(2E) (e^{i⟨p,d⟩} − e^{−i⟨p,d⟩})`
    /// with `d = y − x` — the lattice `𝒟_m(x − y)`.
    pub fn lattice_propagator(&self, x: &FourVector, y: &FourVector) -> C64 {
        let d = *y - *x;
        let s: C64 = (0..self.modes())
            .map(|k| {
                let p = self.four_momentum(k);
                C64::new(0.0, 2.0 * p.pairing(&d).sin()) / (2.0 * p.time())
            })
            .sum();
        s * self.cell() / (2.0 * PI).powi(3)
    }
}

/// Which free field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Field {
    /// `φ`: absorbs particles, emits antiparticles.
    Phi,
    /// `φ̃`: absorbs antiparticles (with the statistics sign), emits
    /// particles.
    PhiTilde,
    /// `φ*`: `φ` with complex-conjugated mode functions on the same
    /// generators.
    PhiStar,
}

/// A normal-ordered monomial: emissions (left) then absorptions, each list
/// in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    /// Emission slots.
    pub emit: Vec<u32>,
    /// Absorption slots.
    pub absorb: Vec<u32>,
}

impl Monomial {
    /// Number of generators.
    pub fn len(&self) -> usize {
        self.emit.len() + self.absorb.len()
    }

    /// Whether this is the identity.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A normal-ordered polynomial in the generators with complex coefficients.
/// Exactly-zero coefficients are dropped, so the zero operator has no terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OpExpr {
    terms: BTreeMap<Monomial, C64>,
}

impl OpExpr {
    /// The zero operator.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The identity operator times `c`.
    pub fn scalar(c: C64) -> Self {
        Self::from_terms([(Monomial { emit: vec![], absorb: vec![] }, c)])
    }

    /// Sums the given terms. Monomials must already be canonical.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C64)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    fn from_map(mut map: BTreeMap<Monomial, C64>) -> Self {
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { terms: map }
    }

    /// The terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether this is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether there are no terms (same as [`OpExpr::is_zero`]).
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &OpExpr, s: C64) -> OpExpr {
        let mut map = self.terms.clone();
        for (m, c) in &other.terms {
            *map.entry(m.clone()).or_insert(C64::new(0.0, 0.0)) += c * s;
        }
        Self::from_map(map)
    }

    /// `c·self`.
    pub fn scale(&self, c: C64) -> OpExpr {
        Self::from_map(self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect())
    }

    /// Coefficient of the identity, provided no other term is present.
    pub fn central_value(&self) -> Result<C64> {
        let mut val = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            if !m.is_empty() {
                return Err(Error::Algebra(format!("non-central term {m:?} with coefficient {c}")));
            }
            val = *c;
        }
        Ok(val)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest emission count over the terms.
    pub fn max_emissions(&self) -> usize {
        self.terms.keys().map(|m| m.emit.len()).max().unwrap_or(0)
    }

    /// Per-slot `(emission, absorption)` coefficients of a linear expression.
    fn linear_parts(&self) -> Result<HashMap<u32, (C64, C64)>> {
        let mut out: HashMap<u32, (C64, C64)> = HashMap::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            match (m.emit.as_slice(), m.absorb.as_slice()) {
                ([s], []) => out.entry(*s).or_default().0 += c,
                ([], [s]) => out.entry(*s).or_default().1 += c,
                _ => return Err(Error::Algebra("expression is not linear in the generators".into())),
            }
        }
        Ok(out)
    }
}

/// Random expression of `terms` monomials, each with exactly `degree`
/// generators drawn from `slots` (definite grade), coefficients in the unit
/// disk. Monomials are canonicalized through [`LatticeSpec::normal_order_free`].
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, spec: &LatticeSpec, terms: usize, degree: usize) -> OpExpr {
    let slots = spec.slots() as u32;
    let mut out = OpExpr::zero();
    for _ in 0..terms {
        let mut word = OpExpr::scalar(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for _ in 0..degree {
            let s = rng.gen_range(0..slots);
            let g = if rng.gen_bool(0.5) { Monomial { emit: vec![s], absorb: vec![] } } else { Monomial { emit: vec![], absorb: vec![s] } };
            word = spec.normal_order_free(&word, &OpExpr::from_terms([(g, C64::new(1.0, 0.0))]));
        }
        out = out.add_scaled(&word, C64::new(1.0, 0.0));
    }
    out
}

/// Largest supported truncated-Fock dimension.
pub const MAX_FOCK_DIM: usize = 20_000;

/// Dense realization of operators on occupation states with total particle
/// number `≤ n_max`. Emission out of the truncation maps to zero.
#[derive(Clone, Debug)]
pub struct FockMatrix {
    /// Occupation vectors, one per basis state.
    pub states: Vec<Vec<u8>>,
    /// Row-major entries.
    pub data: Vec<C64>,
}

impl FockMatrix {
    /// Dimension.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    /// Matrix product.
    pub fn mul(&self, other: &FockMatrix) -> FockMatrix {
        let n = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        FockMatrix { states: self.states.clone(), data }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &FockMatrix, s: C64) -> FockMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b * s).collect();
        FockMatrix { states: self.states.clone(), data }
    }

    /// Largest `|self − other|` over columns whose state has total particle
    /// number `≤ max_total` (the headroom states).
    pub fn headroom_diff(&self, other: &FockMatrix, max_total: usize) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..n {
            if self.states[j].iter().map(|&o| o as usize).sum::<usize>() > max_total {
                continue;
            }
            for i in 0..n {
                worst = worst.max((self.data[i * n + j] - other.data[i * n + j]).norm());
            }
        }
        worst
    }
}

/// Truncated Fock basis over all slots of `spec`.
fn fock_basis(spec: &LatticeSpec, n_max: usize) -> Result<Vec<Vec<u8>>> {
    let slots = spec.slots();
    let per = match spec.statistics {
        Statistics::Boson => n_max,
        Statistics::Fermion => 1,
    };
    let mut out = Vec::new();
    let mut cur = vec![0u8; slots];
    fn rec(i: usize, left: usize, per: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) -> bool {
        if i == cur.len() {
            out.push(cur.clone());
            return out.len() <= MAX_FOCK_DIM;
        }
        for o in 0..=per.min(left) {
            cur[i] = o as u8;
            if !rec(i + 1, left - o, per, cur, out) {
                return false;
            }
        }
        cur[i] = 0;
        true
    }
    if !rec(0, n_max, per, &mut cur, &mut out) {
        return Err(Error::InvalidArgument(format!("truncated Fock dimension exceeds {MAX_FOCK_DIM}")));
    }
    Ok(out)
}

/// Dense matrix of `a` on the truncation `n_max`.
pub fn matrix_realize(spec: &LatticeSpec, a: &OpExpr, n_max: usize) -> Result<FockMatrix> {
    let states = fock_basis(spec, n_max)?;
    let index: HashMap<Vec<u8>, usize> = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let n = states.len();
    let scale = spec.contraction().sqrt();
    let fermion = spec.statistics == Statistics::Fermion;
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    // Applies one generator; `None` when the result vanishes.
    let apply = |state: &mut Vec<u8>, emit: bool, s: usize| -> Option<f64> {
        let occ = state[s] as usize;
        let jw = if fermion && state[..s].iter().map(|&o| o as usize).sum::<usize>() % 2 == 1 { -1.0 } else { 1.0 };
        if emit {
            let total: usize = state.iter().map(|&o| o as usize).sum();
            if total + 1 > n_max || (fermion && occ == 1) {
                return None;
            }
            state[s] += 1;
            Some(scale * jw * if fermion { 1.0 } else { ((occ + 1) as f64).sqrt() })
        } else {
            if occ == 0 {
                return None;
            }
            state[s] -= 1;
            Some(scale * jw * if fermion { 1.0 } else { (occ as f64).sqrt() })
        }
    };
    for (j, start) in states.iter().enumerate() {
        'term: for (m, c) in a.terms() {
            let mut st = start.clone();
            let mut amp = *c;
            let gens = m.absorb.iter().rev().map(|&s| (false, s)).chain(m.emit.iter().rev().map(|&s| (true, s)));
            for (emit, s) in gens {
                match apply(&mut st, emit, s as usize) {
                    Some(f) => amp *= f,
                    None => continue 'term,
                }
            }
            data[index[&st] * n + j] += amp;
        }
    }
    Ok(FockMatrix { states, data })
}

/// Which graded commutator of free fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    /// `⟦φ(x), φ̃(y)⟧`.
    FieldAntifield,
    /// `⟦φ(x), φ̃_{,0}(y)⟧`.
    FieldAntifieldDt,
    /// `⟦φ_{,0}(x), φ̃(y)⟧`.
    DtFieldAntifield,
    /// `⟦φ(x), φ(y)⟧`.
    FieldField,
    /// `⟦φ(x), φ*(y)⟧`.
    FieldFieldStar,
}

impl Which {
    /// All variants.
    pub const ALL: [Which; 5] = [Which::FieldAntifield, Which::FieldAntifieldDt, Which::DtFieldAntifield, Which::FieldField, Which::FieldFieldStar];

    fn operands(self) -> ((Field, bool), (Field, bool)) {
        match self {
            Which::FieldAntifield => ((Field::Phi, false), (Field::PhiTilde, false)),
            Which::FieldAntifieldDt => ((Field::Phi, false), (Field::PhiTilde, true)),
            Which::DtFieldAntifield => ((Field::Phi, true), (Field::PhiTilde, false)),
            Which::FieldField => ((Field::Phi, false), (Field::Phi, false)),
            Which::FieldFieldStar => ((Field::Phi, false), (Field::PhiStar, false)),
        }
    }
}

/// The central value of a field commutator (linear fast path).
pub fn commutator_value(x: &FourVector, y: &FourVector, which: Which, spec: &LatticeSpec) -> Result<C64> {
    let ((fa, da), (fb, db)) = which.operands();
    spec.linear_commutator(&spec.field_expr(fa, x, da), &spec.field_expr(fb, y, db))
}

/// The field commutator by full Wick expansion, checked to be central.
pub fn commutator_value_expanded(x: &FourVector, y: &FourVector, which: Which, spec: &LatticeSpec) -> Result<C64> {
    let ((fa, da), (fb, db)) = which.operands();
    spec.graded_commutator(&spec.field_expr(fa, x, da), &spec.field_expr(fb, y, db))?.central_value()
}

/// Symbolic generator-relation tolerance (and matrix-oracle tolerance).
pub const FOCK_TOL: f64 = 1e-12;

/// The canonical (anti)commutation suite on `spec`.
pub fn ccr_suite(spec: &LatticeSpec, seed: u64) -> Result<Vec<CheckLine>> {
    use rand::SeedableRng;
    let m = spec.mass.value();
    let c = spec.contraction();
    let mut lines = Vec::new();

    // Generator relations on every slot pair of a small sub-block.
    let probe: Vec<usize> = (0..spec.modes().min(4)).collect();
    let mut gen_res = 0.0_f64;
    for &k in &probe {
        for &j in &probe {
            let kinds = [GenKind::AbsorbParticle, GenKind::EmitParticle, GenKind::AbsorbAnti, GenKind::EmitAnti];
            for ka in kinds {
                for kb in kinds {
                    let r = spec.graded_commutator(&spec.generator(ka, k)?, &spec.generator(kb, j)?)?;
                    let (ea, ra) = ka.parts();
                    let (eb, rb) = kb.parts();
                    let expected = if k == j && ra == rb && ea != eb {
                        if ea {
                            -spec.statistics.swap_sign() * c
                        } else {
                            c
                        }
                    } else {
                        0.0
                    };
                    let got = r.central_value()?;
                    gen_res = gen_res.max((got - expected).norm() / c);
                }
            }
        }
    }
    lines.push(CheckLine::new("generator super-commutation rules (symbolic)", m, gen_res, FOCK_TOL));

    // Dense-matrix oracle on 2 modes (one momentum, two registers), n_max = 3.
    let small = LatticeSpec::new(spec.dp, 0, spec.mass, spec.statistics)?;
    let n_max: usize = 3;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = 0.0_f64;
    for _ in 0..50 {
        let da = rng.gen_range(1..=2);
        let db = rng.gen_range(1..=2);
        let a = random_expr(&mut rng, &small, 2, da);
        let b = random_expr(&mut rng, &small, 2, db);
        let headroom = n_max.saturating_sub(a.max_emissions() + b.max_emissions());
        let (ma, mb) = (matrix_realize(&small, &a, n_max)?, matrix_realize(&small, &b, n_max)?);
        let prod = matrix_realize(&small, &small.multiply(&a, &b), n_max)?;
        oracle = oracle.max(prod.headroom_diff(&ma.mul(&mb), headroom) / c);
        let sign = if small.grade(&a)? * small.grade(&b)? == 1 { -1.0 } else { 1.0 };
        let comm = matrix_realize(&small, &small.graded_commutator(&a, &b)?, n_max)?;
        let dense = ma.mul(&mb).add_scaled(&mb.mul(&ma), C64::new(-sign, 0.0));
        oracle = oracle.max(comm.headroom_diff(&dense, headroom) / c);
    }
    lines.push(CheckLine::new("symbolic products and commutators vs dense Fock matrices", m, oracle, FOCK_TOL));

    // Equal-time field relations at a few spatial separations.
    let side = spec.dp * spec.n_half.max(1) as f64;
    let t = rng.gen_range(-1.0..1.0);
    let mut pts = vec![(FourVector::new(t, 0.0, 0.0, 0.0), FourVector::new(t, 0.0, 0.0, 0.0))];
    for _ in 0..2 {
        let r = |rng: &mut rand_chacha::ChaCha8Rng| rng.gen_range(-2.0 / side..2.0 / side);
        pts.push((FourVector::new(t, r(&mut rng), r(&mut rng), r(&mut rng)), FourVector::new(t, r(&mut rng), r(&mut rng), r(&mut rng))));
    }
    let delta0 = spec.lattice_delta(&[0.0; 3]);
    let (mut ccr, mut ccr_rev, mut zero_et, mut vanish, mut agree) = (0.0_f64, 0.0_f64, 0.0_f64, 0usize, 0.0_f64);
    let i = C64::new(0.0, 1.0);
    for (x, y) in &pts {
        let d = y.spatial();
        let d = [d[0] - x.0[1], d[1] - x.0[2], d[2] - x.0[3]];
        let delta = spec.lattice_delta(&d);
        let phi = spec.field(x);
        let pi_y = spec.field_expr(Field::PhiTilde, y, true);
        ccr = ccr.max((spec.graded_commutator(&phi, &pi_y)?.central_value()? - i * delta).norm() / delta0);
        let dphi = spec.field_expr(Field::Phi, x, true);
        let r = spec.graded_commutator(&dphi, &spec.antifield(y))?.central_value()?;
        ccr_rev = ccr_rev.max((r + i * delta).norm() / delta0);
        let r = spec.graded_commutator(&phi, &spec.antifield(y))?.central_value()?;
        zero_et = zero_et.max(r.norm() / delta0);
        let pi_x = spec.field_expr(Field::PhiTilde, x, true);
        for comm in [
            spec.graded_commutator(&phi, &spec.field(y))?,
            spec.graded_commutator(&pi_x, &pi_y)?,
            spec.graded_commutator(&phi, &spec.field_expr(Field::PhiStar, y, false))?,
        ] {
            vanish += comm.len();
        }
        for w in Which::ALL {
            agree = agree.max((commutator_value(x, y, w, spec)? - commutator_value_expanded(x, y, w, spec)?).norm() / delta0);
        }
    }
    lines.push(CheckLine::new("equal-time [phi, Pi] = +i delta_lattice", m, ccr, FOCK_TOL));
    lines.push(CheckLine::new("equal-time [phi_,0, phi~] = -i delta_lattice", m, ccr_rev, FOCK_TOL));
    lines.push(CheckLine::new("equal-time [phi, phi~] = 0", m, zero_et, FOCK_TOL));
    lines.push(CheckLine::new("[phi, phi] = [Pi, Pi] = [phi, phi*] = 0 identically (nonzero terms)", m, vanish as f64, 0.0));
    lines.push(CheckLine::new("linear fast path = full Wick expansion", m, agree, FOCK_TOL));

    // Unequal times: central and equal to the lattice propagator sum.
    let mut prop = 0.0_f64;
    for _ in 0..3 {
        let x = FourVector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let y = FourVector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let r = spec.graded_commutator(&spec.field(&x), &spec.antifield(&y))?.central_value()?;
        prop = prop.max((r - spec.lattice_propagator(&x, &y)).norm() / delta0);
    }
    lines.push(CheckLine::new("[phi(x), phi~(y)] central, = lattice D(x - y)", m, prop, FOCK_TOL));
    Ok(lines)
}

/// One rung of the lattice-refinement ladder.
#[derive(Clone, Debug, Serialize)]
pub struct BridgeRow {
    /// Lattice spacing.
    pub dp: f64,
    /// Half-width in modes.
    pub n_half: usize,
    /// Smeared lattice commutator.
    pub lattice: C64,
    /// `|lattice − quadrature| / scale`.
    pub deviation: f64,
}

/// Commutator-to-propagator refinement report.
#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    /// Smearing centre (field argument).
    pub x: FourVector,
    /// Antifield argument.
    pub y: FourVector,
    /// Mass.
    pub mass: f64,
    /// Statistics.
    pub statistics: Statistics,
    /// Gaussian smearing width.
    pub sigma: f64,
    /// Quadrature value of the smeared `𝒟_m`.
    pub quadrature: C64,
    /// Quadrature error estimate.
    pub quadrature_abs_err: f64,
    /// Normalization of the deviations: `|quadrature|`, or `‖u‖_{L¹} = 1`
    /// outside the light cone and wherever the quadrature value is below
    /// [`BRIDGE_ABSOLUTE_TOL`].
    pub scale: f64,
    /// Ladder rows.
    pub rows: Vec<BridgeRow>,
    /// Deviations non-increasing (up to the floor).
    pub monotone: bool,
    /// Whether the report meets its acceptance bound.
    pub pass: bool,
}

/// Smearing width of the bridge test function.
pub const BRIDGE_SIGMA: f64 = 0.75;
/// Required momentum reach `dp·n_half`.
pub const BRIDGE_REACH: f64 = 6.0;
/// Final relative deviation bound.
pub const BRIDGE_TOL: f64 = 0.05;
/// Absolute deviation bound used where the smeared propagator vanishes
/// (spacelike separations, coincident points).
pub const BRIDGE_ABSOLUTE_TOL: f64 = 1e-6;
/// Deviations below this floor count as converged in the monotonicity test.
pub const BRIDGE_FLOOR: f64 = 1e-9;

/// Compares `⟦φ(u_x), φ̃(y)⟧` (field smeared with a normalized Gaussian of
/// width `sigma` centred at `x`) with the quadrature pairing
/// `⟨𝒟_m, u_{x−y}⟩` over a ladder of lattice spacings, each with
/// `n_half = ⌈reach/dp⌉`.
pub fn commutator_vs_propagator(
    x: &FourVector,
    y: &FourVector,
    m: Mass,
    statistics: Statistics,
    ladder: &[f64],
    sigma: f64,
    cfg: &QuadConfig,
) -> Result<BridgeReport> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("empty lattice ladder".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("smearing width must be positive, got {sigma}")));
    }
    let norm = C64::new((2.0 * PI * sigma * sigma).powi(-2), 0.0);
    let u = TestFn::gaussian(x.0.to_vec(), vec![sigma; 4], vec![0.0; 4])?.scale(norm);
    let d = *x - *y;
    let ud = TestFn::gaussian(d.0.to_vec(), vec![sigma; 4], vec![0.0; 4])?.scale(norm);
    let q = pair_propagator(&PropKind { tag: PropTag::D, mass: m }, &ud, cfg)?;
    // Outside the light cone, or wherever the smeared propagator (nearly)
    // vanishes, deviations are measured against ‖u‖_{L¹} = 1 and must reach
    // the absolute floor instead of a relative bound.
    let absolute = crate::minkowski_square(&d) < 0.0 || q.value.norm() < BRIDGE_ABSOLUTE_TOL;
    let scale = if absolute { 1.0 } else { q.value.norm() };
    let mut rows = Vec::new();
    for &dp in ladder {
        let n_half = (BRIDGE_REACH / dp - 1e-9).ceil().max(0.0) as usize;
        let spec = LatticeSpec::new(dp, n_half, m, statistics)?;
        let phi = spec.smeared_field(Field::Phi, &u, false)?;
        let lattice = spec.linear_commutator(&phi, &spec.antifield(y))?;
        rows.push(BridgeRow { dp, n_half, lattice, deviation: (lattice - q.value).norm() / scale });
    }
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation || w[1].deviation <= BRIDGE_FLOOR);
    let last = rows.last().expect("nonempty").deviation;
    let pass = monotone && if absolute { last <= BRIDGE_ABSOLUTE_TOL } else { last <= BRIDGE_TOL };
    Ok(BridgeReport {
        x: *x,
        y: *y,
        mass: m.value(),
        statistics,
        sigma,
        quadrature: q.value,
        quadrature_abs_err: q.abs_err,
        scale,
        rows,
        monotone,
        pass,
    })
}

/// Bridge ladder used by the suites.
pub const BRIDGE_LADDER: [f64; 3] = [0.8, 0.4, 0.2];

/// Full Fock suite at mass `m`: the CCR/CAR suite for both statistics on a
/// `dp = 0.5`, `n_half = 2` lattice, the timelike commutator-to-propagator
/// bridge at `x − y = (1,0,0,0)` and the spacelike microcausality trend at
/// `x − y = (1,6,0,0)`.
pub fn verify_fock(m: Mass, seed: u64, cfg: &QuadConfig) -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    for st in [Statistics::Boson, Statistics::Fermion] {
        let spec = LatticeSpec::new(0.5, 2, m, st)?;
        lines.extend(ccr_suite(&spec, seed)?.into_iter().map(|mut l| {
            l.identity = format!("{st}: {}", l.identity);
            l
        }));
    }
    let y = FourVector::zero();
    for (x, what) in [(FourVector::new(1.0, 0.0, 0.0, 0.0), "timelike"), (FourVector::new(1.0, 6.0, 0.0, 0.0), "spacelike")] {
        let r = commutator_vs_propagator(&x, &y, m, Statistics::Boson, &BRIDGE_LADDER, BRIDGE_SIGMA, cfg)?;
        let last = r.rows.last().expect("nonempty ladder").deviation;
        let tol = if what == "timelike" { BRIDGE_TOL } else { BRIDGE_ABSOLUTE_TOL };
        let mut line = CheckLine::new(format!("smeared lattice commutator -> <D, u> ({what}, monotone refinement)"), m.value(), last, tol);
        line.pass = r.pass;
        lines.push(line);
    }
    Ok(lines)
}
