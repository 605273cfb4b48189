//! Machine-readable verification reports: one [`CheckLine`] per checked
//! identity, wrapped in a versioned JSON envelope.

use serde::Serialize;

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "minkprop/1";

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    /// Identity being checked.
    pub identity: String,
    /// The mass involved.
    pub mass: f64,
    /// Largest residual over the test functions.
    pub residual: f64,
    /// Tolerance applied.
    pub tol: f64,
    /// Largest ladder extrapolation spread, when a ladder is involved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    /// Bound on the spread.
    #[serde(skip)]
    pub spread_tol: Option<f64>,
    /// `residual ≤ tol` (and the spread within its own bound where
    /// applicable).
    pub pass: bool,
}

impl CheckLine {
    /// A line passing iff `residual ≤ tol` (NaN residuals fail).
    pub fn new(identity: impl Into<String>, mass: f64, residual: f64, tol: f64) -> Self {
        Self { identity: identity.into(), mass, residual, tol, spread: None, spread_tol: None, pass: residual <= tol }
    }

    /// Attaches an extrapolation spread that must not exceed `spread_tol`.
    pub fn with_spread(mut self, spread: f64, spread_tol: f64) -> Self {
        self.spread = Some(spread);
        self.spread_tol = Some(spread_tol);
        self.pass &= spread <= spread_tol;
        self
    }

    /// Re-judges the line against an overriding residual tolerance (the
    /// spread bound is kept).
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.residual <= tol && self.spread.zip(self.spread_tol).is_none_or(|(s, t)| s <= t);
        self
    }
}

/// A named suite result.
#[derive(Clone, Debug, Serialize)]
pub struct Suite<T: Serialize> {
    /// Suite name.
    pub suite: String,
    /// Whether every line passed.
    pub pass: bool,
    /// The lines.
    pub lines: Vec<T>,
}

/// Lines that know whether they passed.
pub trait Passes {
    /// Whether the line passed.
    fn passes(&self) -> bool;
}

impl Passes for CheckLine {
    fn passes(&self) -> bool {
        self.pass
    }
}

impl Passes for crate::densities_1d::FtRow {
    fn passes(&self) -> bool {
        self.pass
    }
}

impl<T: Serialize + Passes> Suite<T> {
    /// Wraps lines into a suite, computing the overall verdict.
    pub fn new(suite: impl Into<String>, lines: Vec<T>) -> Self {
        let pass = lines.iter().all(Passes::passes);
        Self { suite: suite.into(), pass, lines }
    }
}

/// The top-level JSON envelope `{"schema": "minkprop/1", ...}`.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    /// Always [`SCHEMA`].
    pub schema: &'static str,
    /// The payload, flattened into the envelope.
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    /// Wraps a payload.
    pub fn new(body: T) -> Self {
        Self { schema: SCHEMA, body }
    }

    /// Pretty JSON text.
    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
