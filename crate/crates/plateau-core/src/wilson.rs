//! Line integrals of classical gauge fields along parametrized paths, gauge
//! covariance of the Wilson-line phase argument, and the path-variation
//! identity that singles out the straight path.
//!
//! Only the c-number phase argument `int_0^1 ds gammadot^mu(s) A_mu(gamma(s))`
//! is computed; the fermionic functional and the operator-valued exponential
//! stay out of scope.

use alloc::vec::Vec;

use crate::quad::GaussLegendre;
use crate::tensor::Vec4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WilsonError {
    #[error("gauge field evaluated to a non-finite value at {at:?}")]
    NonFiniteField { at: [f64; 4] },
    #[error("polyline needs at least two vertices")]
    DegeneratePolyline,
    #[error("field strength must be antisymmetric: F[{i}][{j}] != -F[{j}][{i}]")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("split parameter {0} must lie strictly inside (0, 1)")]
    BadSplit(f64),
}

/// Shape of the parametrization gamma(s), s in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum PathShape {
    /// gamma(s) = x + s (y - x).
    Straight,
    /// Straight chord plus a half-sine bow: gamma(s) = x + s(y-x) + sin(pi s) b.
    Arc { bulge: Vec4 },
    /// Piecewise-linear path through the tabulated interior vertices.
    Polyline { vertices: Vec<Vec4> },
}

/// Parametrized path with endpoints and a quadrature budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub start: Vec4,
    pub end: Vec4,
    pub shape: PathShape,
    /// Total quadrature node count for smooth shapes; per-segment midpoint
    /// rule for polylines ignores it.
    pub samples: usize,
}

pub const DEFAULT_PATH_SAMPLES: usize = 64;

impl PathSpec {
    pub fn straight(start: Vec4, end: Vec4) -> Self {
        PathSpec {
            start,
            end,
            shape: PathShape::Straight,
            samples: DEFAULT_PATH_SAMPLES,
        }
    }

    pub fn arc(start: Vec4, end: Vec4, bulge: Vec4) -> Self {
        PathSpec {
            start,
            end,
            shape: PathShape::Arc { bulge },
            samples: DEFAULT_PATH_SAMPLES,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(2);
        self
    }

    /// gamma(s) for the smooth shapes.
    pub fn position(&self, s: f64) -> Vec4 {
        let chord = self.end - self.start;
        match &self.shape {
            PathShape::Straight => self.start + chord * s,
            PathShape::Arc { bulge } => {
                self.start + chord * s + *bulge * libm::sin(core::f64::consts::PI * s)
            }
            PathShape::Polyline { vertices } => {
                // Uniform parameter split over segments.
                let n = vertices.len() - 1;
                let t = (s * n as f64).clamp(0.0, n as f64);
                let i = (t as usize).min(n - 1);
                let frac = t - i as f64;
                vertices[i] + (vertices[i + 1] - vertices[i]) * frac
            }
        }
    }

    /// d gamma / ds, analytic for the built-in smooth shapes.
    pub fn velocity(&self, s: f64) -> Vec4 {
        let chord = self.end - self.start;
        match &self.shape {
            PathShape::Straight => chord,
            PathShape::Arc { bulge } => {
                chord
                    + *bulge
                        * (core::f64::consts::PI * libm::cos(core::f64::consts::PI * s))
            }
            PathShape::Polyline { vertices } => {
                let n = vertices.len() - 1;
                let t = (s * n as f64).clamp(0.0, n as f64 - 1e-12);
                let i = (t as usize).min(n - 1);
                (vertices[i + 1] - vertices[i]) * n as f64
            }
        }
    }

    /// Reversed path (endpoints swapped, parametrization mirrored).
    pub fn reversed(&self) -> PathSpec {
        let shape = match &self.shape {
            PathShape::Straight => PathShape::Straight,
            PathShape::Arc { bulge } => PathShape::Arc { bulge: *bulge },
            PathShape::Polyline { vertices } => {
                let mut v = vertices.clone();
                v.reverse();
                PathShape::Polyline { vertices: v }
            }
        };
        PathSpec {
            start: self.end,
            end: self.start,
            shape,
            samples: self.samples,
        }
    }

    fn validate(&self) -> Result<(), WilsonError> {
        if let PathShape::Polyline { vertices } = &self.shape {
            if vertices.len() < 2 {
                return Err(WilsonError::DegeneratePolyline);
            }
        }
        Ok(())
    }
}

/// Analytic scalar fields used as gauge functions Lambda(x).
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    /// c . x
    Linear { c: Vec4 },
    /// x^T q x + b . x  (q need not be symmetric; the gradient uses q + q^T).
    Quadratic { q: [[f64; 4]; 4], b: Vec4 },
}

impl ScalarField {
    pub fn eval(&self, x: Vec4) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Linear { c } => c.dot(x),
            ScalarField::Quadratic { q, b } => {
                let mut acc = b.dot(x);
                for i in 0..4 {
                    for j in 0..4 {
                        acc += x[i] * q[i][j] * x[j];
                    }
                }
                acc
            }
        }
    }

    pub fn gradient(&self, x: Vec4) -> Vec4 {
        match self {
            ScalarField::Constant(_) => Vec4::ZERO,
            ScalarField::Linear { c } => *c,
            ScalarField::Quadratic { q, b } => {
                let mut g = *b;
                for i in 0..4 {
                    for j in 0..4 {
                        g[i] += (q[i][j] + q[j][i]) * x[j];
                    }
                }
                g
            }
        }
    }
}

/// Classical abelian gauge field configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeFieldSpec {
    /// A_mu constant.
    Constant { a: Vec4 },
    /// A_mu = (1/e) d_mu Lambda for a supplied scalar Lambda.
    PureGauge { lambda: ScalarField, coupling: f64 },
    /// A_mu(x) = -1/2 F_{mu nu} x^nu for a constant antisymmetric F.
    ConstantCurvature { f: [[f64; 4]; 4] },
}

impl GaugeFieldSpec {
    /// Constant-curvature field from an antisymmetric tensor; rejects
    /// non-antisymmetric input.
    pub fn constant_curvature(f: [[f64; 4]; 4]) -> Result<Self, WilsonError> {
        for i in 0..4 {
            for j in 0..4 {
                if libm::fabs(f[i][j] + f[j][i]) > 1e-14 {
                    return Err(WilsonError::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(GaugeFieldSpec::ConstantCurvature { f })
    }

    pub fn eval(&self, x: Vec4) -> Vec4 {
        match self {
            GaugeFieldSpec::Constant { a } => *a,
            GaugeFieldSpec::PureGauge { lambda, coupling } => {
                lambda.gradient(x) * (1.0 / coupling)
            }
            GaugeFieldSpec::ConstantCurvature { f } => {
                let mut a = Vec4::ZERO;
                for mu in 0..4 {
                    for nu in 0..4 {
                        a[mu] -= 0.5 * f[mu][nu] * x[nu];
                    }
                }
                a
            }
        }
    }

    /// Gauge-shifted copy: A + (1/e) grad Lambda.
    pub fn gauge_shifted(&self, gauge_fn: &ScalarField, coupling: f64) -> ShiftedField<'_> {
        ShiftedField {
            base: self,
            gauge_fn: gauge_fn.clone(),
            coupling,
        }
    }
}

/// A gauge field plus a pure-gauge shift; evaluates A + (1/e) grad Lambda.
#[derive(Debug, Clone)]
pub struct ShiftedField<'a> {
    base: &'a GaugeFieldSpec,
    gauge_fn: ScalarField,
    coupling: f64,
}

impl ShiftedField<'_> {
    fn eval(&self, x: Vec4) -> Vec4 {
        self.base.eval(x) + self.gauge_fn.gradient(x) * (1.0 / self.coupling)
    }
}

const PANEL_ORDER: usize = 16;

fn integrate_path<F: Fn(Vec4) -> Vec4>(
    path: &PathSpec,
    field: F,
) -> Result<f64, WilsonError> {
    path.validate()?;
    match &path.shape {
        PathShape::Polyline { vertices } => {
            // Per-segment midpoint rule: exact for fields linear in x.
            let mut acc = 0.0;
            for w in vertices.windows(2) {
                let mid = (w[0] + w[1]) * 0.5;
                let a = field(mid);
                if !a.is_finite() {
                    return Err(WilsonError::NonFiniteField { at: mid.0 });
                }
                acc += a.dot(w[1] - w[0]);
            }
            Ok(acc)
        }
        _ => {
            let panels = path.samples.div_ceil(PANEL_ORDER).max(1);
            let rule = GaussLegendre::new(PANEL_ORDER.min(path.samples.max(2)));
            let mut bad: Option<[f64; 4]> = None;
            let value = rule.integrate_composite(0.0, 1.0, panels, |s| {
                let x = path.position(s);
                let a = field(x);
                if !a.is_finite() {
                    bad = Some(x.0);
                }
                a.dot(path.velocity(s))
            });
            match bad {
                Some(at) => Err(WilsonError::NonFiniteField { at }),
                None => Ok(value),
            }
        }
    }
}

/// Quadrature value of `int_0^1 ds gammadot^mu A_mu(gamma(s))`.
pub fn line_integral(path: &PathSpec, field: &GaugeFieldSpec) -> Result<f64, WilsonError> {
    integrate_path(path, |x| field.eval(x))
}

/// Deviation of the gauge-transformation identity: the line integral must
/// shift by exactly the endpoint difference `(Lambda(y) - Lambda(x)) / e`.
pub fn gauge_covariance_check(
    path: &PathSpec,
    field: &GaugeFieldSpec,
    gauge_fn: &ScalarField,
    coupling: f64,
) -> Result<f64, WilsonError> {
    let base = line_integral(path, field)?;
    let shifted = field.gauge_shifted(gauge_fn, coupling);
    let transformed = integrate_path(path, |x| shifted.eval(x))?;
    let endpoint =
        (gauge_fn.eval(path.end) - gauge_fn.eval(path.start)) / coupling;
    Ok(libm::fabs(transformed - base - endpoint))
}

/// Variations of the straight path between fixed endpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum PathVariation {
    /// Reparametrization gamma(s) = x + h(s)(y - x) with h(s) = s + amp * s(1-s),
    /// i.e. a variation proportional to the chord.
    Longitudinal { amplitude: f64 },
    /// Half-sine bow of the given amplitude along `normal` (orthogonalized
    /// against the chord).
    Transverse { normal: Vec4, amplitude: f64 },
}

/// Difference `line_integral(base + variation) - line_integral(base)` for the
/// straight base path. Longitudinal (straight-path-preserving) variations
/// return 0 up to quadrature; transverse ones pick up the enclosed flux.
pub fn path_variation_check(
    base: &PathSpec,
    variation: &PathVariation,
    field: &GaugeFieldSpec,
) -> Result<f64, WilsonError> {
    let unvaried = line_integral(base, field)?;
    let varied_path = apply_variation(base, variation);
    let varied = match &varied_path {
        VariedPath::Spec(p) => line_integral(p, field)?,
        VariedPath::Reparam { amplitude } => {
            // gamma(s) = x + h(s)(y-x): integrate with the modified pullback.
            let chord = base.end - base.start;
            let panels = base.samples.div_ceil(PANEL_ORDER).max(1);
            let rule = GaussLegendre::new(PANEL_ORDER);
            let amp = *amplitude;
            let mut bad: Option<[f64; 4]> = None;
            let v = rule.integrate_composite(0.0, 1.0, panels, |s| {
                let h = s + amp * s * (1.0 - s);
                let hdot = 1.0 + amp * (1.0 - 2.0 * s);
                let x = base.start + chord * h;
                let a = field.eval(x);
                if !a.is_finite() {
                    bad = Some(x.0);
                }
                a.dot(chord) * hdot
            });
            if let Some(at) = bad {
                return Err(WilsonError::NonFiniteField { at });
            }
            v
        }
    };
    Ok(varied - unvaried)
}

enum VariedPath {
    Spec(PathSpec),
    Reparam { amplitude: f64 },
}

fn apply_variation(base: &PathSpec, variation: &PathVariation) -> VariedPath {
    match variation {
        PathVariation::Longitudinal { amplitude } => VariedPath::Reparam {
            amplitude: *amplitude,
        },
        PathVariation::Transverse { normal, amplitude } => {
            let chord = base.end - base.start;
            let n = match chord.unit() {
                Some(u) => *normal - u * normal.dot(u),
                None => *normal,
            };
            let n = n.unit().unwrap_or(Vec4::ZERO);
            VariedPath::Spec(
                PathSpec::arc(base.start, base.end, n * *amplitude)
                    .with_samples(base.samples),
            )
        }
    }
}

/// Split a path at an interior parameter into two sub-paths covering the same
/// curve (used by the additivity property).
pub fn split_path(path: &PathSpec, at: f64) -> Result<(PathSpec, PathSpec), WilsonError> {
    if !(at > 0.0 && at < 1.0) {
        return Err(WilsonError::BadSplit(at));
    }
    // Tabulate as dense polylines; the midpoint rule handles them.
    let dense = |a: f64, b: f64| {
        let n = 4096;
        let mut v = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let s = a + (b - a) * i as f64 / n as f64;
            v.push(path.position(s));
        }
        PathSpec {
            start: path.position(a),
            end: path.position(b),
            shape: PathShape::Polyline { vertices: v },
            samples: path.samples,
        }
    };
    Ok((dense(0.0, at), dense(at, 1.0)))
}
