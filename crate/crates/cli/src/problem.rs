//! Problem files: JSON documents describing one computation over a grid.

use lfrac::analytic2::Analytic2Problem;
use lfrac::linsolve::{LinearSystemProblem, SourceTerm};
use lfrac::sequential::{ForcingAtom, SequentialProblem};
use lfrac::{Complex64, ComplexMatrix, Error, FracOrder, PowerSeries, Result, Tolerance};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub alpha: f64,
    #[serde(flatten)]
    pub kind: Kind,
    pub grid: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<TolSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Kind {
    MlEval(MlEvalPayload),
    Operator(OperatorPayload),
    LinearSystem(LinearSystemPayload),
    Sequential(SequentialPayload),
    Analytic2(Analytic2Payload),
}

/// `ML^(k)(lambda t)` along the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlEvalPayload {
    pub lambda: Complex64,
    #[serde(default)]
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Lj,
    Ld,
}

/// `c t^delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTerm {
    pub coeff: Complex64,
    pub delta: f64,
}

/// The operator applied `depth` times to `sum series[n] t^n + sum powers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPayload {
    pub op: OperatorKind,
    #[serde(default = "one")]
    pub depth: usize,
    #[serde(default)]
    pub series: Vec<Complex64>,
    #[serde(default)]
    pub powers: Vec<PowerTerm>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    Zero,
    /// One `(coeff, delta)` pair per component.
    FracPower(Vec<PowerTerm>),
    /// One coefficient array per component.
    Series(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSystemPayload {
    pub matrix: Vec<Vec<Complex64>>,
    pub x0: Vec<Complex64>,
    #[serde(default = "zero_source")]
    pub source: SourceSpec,
}

fn zero_source() -> SourceSpec {
    SourceSpec::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub beta: Complex64,
    pub mu: Complex64,
    #[serde(default)]
    pub j: usize,
}

/// `D^m x + sum_q coeffs[q] D^q x = sum beta t^j ML^(j)(mu t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialPayload {
    pub coeffs: Vec<Complex64>,
    pub init: Vec<Complex64>,
    #[serde(default)]
    pub forcing: Vec<ForcingSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Airy,
    Hermite,
}

/// `D^2 x + p D x + q x = c`. A preset fixes `p` and `q` from `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analytic2Payload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Complex64>,
    #[serde(default)]
    pub p: Vec<Complex64>,
    #[serde(default)]
    pub q: Vec<Complex64>,
    #[serde(default)]
    pub c: Vec<Complex64>,
    pub init: [Complex64; 2],
    #[serde(default = "default_analytic_terms")]
    pub n_terms: usize,
}

fn default_analytic_terms() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.t_start];
        }
        let h = (self.t_end - self.t_start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.t_end } else { self.t_start + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
    pub max_terms: Option<usize>,
}

/// Command-line overrides; each set flag wins over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct TolFlags {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
    pub max_terms: Option<usize>,
}

impl TolFlags {
    pub fn resolve(&self, file: Option<&TolSpec>) -> Result<Tolerance> {
        let d = Tolerance::default();
        let tol = Tolerance {
            rel_tol: self.rel.or(file.and_then(|f| f.rel)).unwrap_or(d.rel_tol),
            abs_tol: self.abs.or(file.and_then(|f| f.abs)).unwrap_or(d.abs_tol),
            max_terms: self.max_terms.or(file.and_then(|f| f.max_terms)).unwrap_or(d.max_terms),
            stall_window: d.stall_window,
        };
        tol.validate()?;
        Ok(tol)
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Domain(format!("problem file: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn order(&self) -> Result<FracOrder> {
        FracOrder::new(self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        self.order()?;
        let g = &self.grid;
        if !(g.t_start >= 0.0 && g.t_end.is_finite() && g.t_start <= g.t_end) {
            return Err(Error::Domain(format!("grid [{}, {}] must satisfy 0 <= t_start <= t_end", g.t_start, g.t_end)));
        }
        if g.n_points == 0 {
            return Err(Error::Domain("grid needs n_points >= 1".into()));
        }
        if g.n_points > 1 && g.t_start == g.t_end {
            return Err(Error::Domain("several grid points need t_start < t_end".into()));
        }
        match &self.kind {
            Kind::Operator(op) => {
                if op.depth == 0 {
                    return Err(Error::Domain("operator depth must be at least one".into()));
                }
                if op.powers.iter().any(|p| !(p.delta >= 0.0 && p.delta.is_finite())) {
                    return Err(Error::Domain("power exponents must be finite and nonnegative".into()));
                }
            }
            Kind::Analytic2(a) => {
                if a.preset.is_some() != a.a.is_some() {
                    return Err(Error::Domain("analytic2 presets take exactly one parameter `a`".into()));
                }
                if a.preset.is_some() && !(a.p.is_empty() && a.q.is_empty()) {
                    return Err(Error::Domain("analytic2 presets fix p and q".into()));
                }
                if a.n_terms < 2 {
                    return Err(Error::Domain("analytic2 needs n_terms >= 2".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Horizon handed to the solvers: the grid end, or 1 on a grid at 0.
    pub fn horizon(&self) -> f64 {
        if self.grid.t_end > 0.0 {
            self.grid.t_end
        } else {
            1.0
        }
    }
}

impl LinearSystemPayload {
    pub fn build(&self, order: FracOrder, horizon: f64, tol: Tolerance) -> Result<LinearSystemProblem> {
        let acal = ComplexMatrix::from_rows(&self.matrix)?;
        let source = match &self.source {
            SourceSpec::Zero => SourceTerm::Zero,
            SourceSpec::FracPower(v) => SourceTerm::FracPower(v.iter().map(|p| (p.coeff, p.delta)).collect()),
            SourceSpec::Series(v) => SourceTerm::Series(v.iter().map(|c| series(c)).collect()),
        };
        Ok(LinearSystemProblem::new(order, acal, source, self.x0.clone(), horizon)?.with_tol(tol))
    }
}

impl SequentialPayload {
    pub fn build(&self, order: FracOrder, horizon: f64, tol: Tolerance) -> Result<SequentialProblem> {
        let forcing = self.forcing.iter().map(|f| ForcingAtom { beta: f.beta, mu: f.mu, j: f.j }).collect();
        let mut p = SequentialProblem::new(order, self.coeffs.clone(), self.init.clone(), forcing)?.with_horizon(horizon);
        p.tol = tol;
        p.validate()?;
        Ok(p)
    }
}

impl Analytic2Payload {
    pub fn build(&self, order: FracOrder) -> Analytic2Problem {
        let init = (self.init[0], self.init[1]);
        let mut p = match (self.preset, self.a) {
            (Some(Preset::Airy), Some(a)) => Analytic2Problem::airy(order, a, init),
            (Some(Preset::Hermite), Some(a)) => Analytic2Problem::hermite(order, a, init),
            _ => Analytic2Problem::homogeneous(order, series(&self.p), series(&self.q), init),
        };
        p.c = series(&self.c);
        p
    }
}

/// Empty arrays become the zero series.
pub fn series(c: &[Complex64]) -> PowerSeries {
    if c.is_empty() {
        PowerSeries::zero(0)
    } else {
        PowerSeries::new(c.to_vec())
    }
}
