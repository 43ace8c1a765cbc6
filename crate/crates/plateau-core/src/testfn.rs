//! Mollifiers, plateau functions, partitions of unity and the radial
//! momentum-space regulator.
//!
//! The building block is the compactly supported bump
//! `rho_eps(x) = C exp(-1 / (1 - |x/eps|^2))` on the ball `|x| < eps`,
//! normalized to unit mass. Convolving the characteristic function of an
//! inner region with it yields a plateau function: exactly 1 deep inside,
//! exactly 0 at distance `eps` outside, smooth in between. Normalizing a
//! family of plateaus subordinate to an open cover gives a decomposition of
//! unity. The same rolloff shape, applied radially in momentum space,
//! produces the cutoff profile `f(k^2)`.

use alloc::vec::Vec;

use crate::quad::GaussLegendre;

/// Surface area of the unit (d-1)-sphere, d = 1..=4.
fn sphere_area(d: usize) -> f64 {
    use core::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestFnError {
    #[error("spatial dimension {0} not supported (must be 1..=4)")]
    BadDimension(usize),
    #[error("support radius must be positive, got {0}")]
    BadSupportRadius(f64),
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("inner region is not contained in the outer region with margin >= mollifier support {margin}")]
    MarginTooSmall { margin: f64 },
    #[error("partition is not positive at point {witness:?}: sum of plateaus is zero")]
    Uncovered { witness: Vec<f64> },
    #[error("grid length {0} is not a power of two")]
    GridNotPowerOfTwo(usize),
    #[error("mollifier support {support} does not fit in half the periodic domain {domain}")]
    SupportTooWide { support: f64, domain: f64 },
    #[error("regulator needs 0 < width < lambda, got lambda {lambda}, width {width}")]
    BadRegulator { lambda: f64, width: f64 },
    #[error("negative squared momentum {0}")]
    NegativeKsq(f64),
}

/// Normalized smooth bump of compact support (Schwartz test function on a
/// ball).
#[derive(Debug, Clone)]
pub struct Mollifier {
    epsilon: f64,
    dimension: usize,
    /// Prefactor such that the integral over the support is 1.
    normalization: f64,
}

/// Unnormalized radial profile exp(-1/(1-t^2)) on t in [0, 1).
fn bump_profile(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        libm::exp(-1.0 / (1.0 - t * t))
    }
}

impl Mollifier {
    pub fn new(epsilon: f64, dimension: usize) -> Result<Self, TestFnError> {
        if !(1..=4).contains(&dimension) {
            return Err(TestFnError::BadDimension(dimension));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(TestFnError::BadSupportRadius(epsilon));
        }
        // Unit-ball mass: S_{d-1} * int_0^1 r^{d-1} exp(-1/(1-r^2)) dr.
        // The integrand is smooth with all derivatives vanishing at r = 1, so
        // a fixed high-order Gauss rule converges to machine accuracy.
        let rule = GaussLegendre::new(96);
        let d = dimension as f64;
        let radial = rule.integrate(0.0, 1.0, |r| libm::pow(r, d - 1.0) * bump_profile(r));
        let mass = sphere_area(dimension) * radial * libm::pow(epsilon, d);
        Ok(Mollifier {
            epsilon,
            dimension,
            normalization: 1.0 / mass,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Bump value at `x`; exactly 0 for |x| >= epsilon.
    pub fn eval(&self, x: &[f64]) -> Result<f64, TestFnError> {
        if x.len() != self.dimension {
            return Err(TestFnError::DimensionMismatch {
                got: x.len(),
                expected: self.dimension,
            });
        }
        let r2: f64 = x.iter().map(|c| c * c).sum();
        Ok(self.eval_radius_sq(r2))
    }

    fn eval_radius_sq(&self, r2: f64) -> f64 {
        let t2 = r2 / (self.epsilon * self.epsilon);
        if t2 >= 1.0 {
            0.0
        } else {
            self.normalization * libm::exp(-1.0 / (1.0 - t2))
        }
    }
}

/// Axis-aligned box or ball region in d <= 4 dimensions. Box bounds may be
/// infinite (half-spaces, slabs).
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn dimension(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (l, h))| c > l && c < h),
            Region::Ball { center, radius } => {
                dist_sq(x, center) < radius * radius
            }
        }
    }

    /// Euclidean distance from `x` to the region; 0 inside.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Region::Box { lo, hi } => {
                let mut d2 = 0.0;
                for (c, (l, h)) in x.iter().zip(lo.iter().zip(hi)) {
                    let d = libm::fmax(l - c, libm::fmax(0.0, c - h));
                    d2 += d * d;
                }
                libm::sqrt(d2)
            }
            Region::Ball { center, radius } => {
                libm::fmax(0.0, libm::sqrt(dist_sq(x, center)) - radius)
            }
        }
    }

    /// Distance from `x` to the complement of the region; 0 outside.
    pub fn depth(&self, x: &[f64]) -> f64 {
        match self {
            Region::Box { lo, hi } => {
                let mut depth = f64::INFINITY;
                for (c, (l, h)) in x.iter().zip(lo.iter().zip(hi)) {
                    depth = libm::fmin(depth, libm::fmin(c - l, h - c));
                }
                libm::fmax(0.0, depth)
            }
            Region::Ball { center, radius } => {
                libm::fmax(0.0, radius - libm::sqrt(dist_sq(x, center)))
            }
        }
    }

    /// Whether the `margin`-fattening of `inner` fits inside `self`.
    fn contains_fattened(&self, inner: &Region, margin: f64) -> bool {
        match (self, inner) {
            (Region::Box { lo: ol, hi: oh }, Region::Box { lo: il, hi: ih }) => {
                ol.iter().zip(il).all(|(o, i)| i - margin >= *o)
                    && oh.iter().zip(ih).all(|(o, i)| i + margin <= *o)
            }
            (
                Region::Ball {
                    center: oc,
                    radius: or,
                },
                Region::Ball {
                    center: ic,
                    radius: ir,
                },
            ) => libm::sqrt(dist_sq(oc, ic)) + ir + margin <= *or,
            (Region::Box { lo, hi }, Region::Ball { center, radius }) => center
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (l, h))| c - radius - margin >= *l && c + radius + margin <= *h),
            (
                Region::Ball {
                    center: oc,
                    radius: or,
                },
                Region::Box { lo, hi },
            ) => {
                // Farthest box corner from the ball center.
                let mut d2 = 0.0;
                for (c, (l, h)) in oc.iter().zip(lo.iter().zip(hi)) {
                    if !l.is_finite() || !h.is_finite() {
                        return false;
                    }
                    let d = libm::fmax(libm::fabs(c - l), libm::fabs(c - h));
                    d2 += d * d;
                }
                libm::sqrt(d2) + margin <= *or
            }
        }
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Open cover of a working domain: outer sets with strictly shrunken inner
/// sets that still cover the domain.
#[derive(Debug, Clone)]
pub struct OpenCover {
    pub sets: Vec<Region>,
    pub inner_sets: Vec<Region>,
}

impl OpenCover {
    /// Check that every inner set sits in its outer set with at least
    /// `margin` to spare.
    pub fn validate(&self, margin: f64) -> Result<(), TestFnError> {
        for (outer, inner) in self.sets.iter().zip(&self.inner_sets) {
            if !outer.contains_fattened(inner, margin) {
                return Err(TestFnError::MarginTooSmall { margin });
            }
        }
        Ok(())
    }
}

/// Convolution of an inner-region characteristic function with a mollifier:
/// 1 deep inside the inner region, 0 outside the outer region, smooth ramp in
/// between.
#[derive(Debug, Clone)]
pub struct PlateauFunction {
    outer: Region,
    inner: Region,
    mollifier: Mollifier,
    quad_order: usize,
}

pub const DEFAULT_PLATEAU_QUAD_ORDER: usize = 32;

impl PlateauFunction {
    pub fn new(
        outer: Region,
        inner: Region,
        mollifier: Mollifier,
    ) -> Result<Self, TestFnError> {
        Self::with_quad_order(outer, inner, mollifier, DEFAULT_PLATEAU_QUAD_ORDER)
    }

    pub fn with_quad_order(
        outer: Region,
        inner: Region,
        mollifier: Mollifier,
        quad_order: usize,
    ) -> Result<Self, TestFnError> {
        let d = mollifier.dimension();
        if outer.dimension() != d || inner.dimension() != d {
            return Err(TestFnError::DimensionMismatch {
                got: outer.dimension(),
                expected: d,
            });
        }
        if !outer.contains_fattened(&inner, mollifier.epsilon()) {
            return Err(TestFnError::MarginTooSmall {
                margin: mollifier.epsilon(),
            });
        }
        Ok(PlateauFunction {
            outer,
            inner,
            mollifier,
            quad_order,
        })
    }

    pub fn outer(&self) -> &Region {
        &self.outer
    }

    pub fn inner(&self) -> &Region {
        &self.inner
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    /// beta(x) = int chi_inner(t) rho_eps(x - t) dt, with exact 0/1
    /// short-circuits outside/inside the transition shell.
    pub fn eval(&self, x: &[f64]) -> Result<f64, TestFnError> {
        let d = self.mollifier.dimension();
        if x.len() != d {
            return Err(TestFnError::DimensionMismatch {
                got: x.len(),
                expected: d,
            });
        }
        let eps = self.mollifier.epsilon();
        if self.inner.depth(x) >= eps {
            return Ok(1.0);
        }
        if self.inner.distance(x) >= eps {
            return Ok(0.0);
        }
        // Substituting u = x - t: beta(x) = int_{|u|<eps} rho(u) chi_inner(x-u) du.
        let rule = GaussLegendre::new(self.quad_order);
        match &self.inner {
            Region::Box { lo, hi } => {
                // chi_inner(x-u) restricts u to the box [x-hi, x-lo]; the
                // integrand over the clipped box is smooth, so the product
                // Gauss rule converges fast.
                let mut lo_u = Vec::with_capacity(d);
                let mut hi_u = Vec::with_capacity(d);
                for i in 0..d {
                    lo_u.push(libm::fmax(-eps, x[i] - hi[i]));
                    hi_u.push(libm::fmin(eps, x[i] - lo[i]));
                    if lo_u[i] >= hi_u[i] {
                        return Ok(0.0);
                    }
                }
                let mut point = alloc::vec![0.0; d];
                Ok(product_quad(&rule, &lo_u, &hi_u, &mut point, 0, &mut |u| {
                    let r2: f64 = u.iter().map(|c| c * c).sum();
                    self.mollifier.eval_radius_sq(r2)
                }))
            }
            Region::Ball { .. } => {
                // Curved boundary: integrate the masked bump over the support
                // cube. Accuracy is limited by the discontinuity; callers that
                // need tight sums rely on partition normalization, not on the
                // raw plateau value.
                let lo_u = alloc::vec![-eps; d];
                let hi_u = alloc::vec![eps; d];
                let mut point = alloc::vec![0.0; d];
                let inner = &self.inner;
                Ok(product_quad(&rule, &lo_u, &hi_u, &mut point, 0, &mut |u| {
                    let r2: f64 = u.iter().map(|c| c * c).sum();
                    let rho = self.mollifier.eval_radius_sq(r2);
                    if rho == 0.0 {
                        return 0.0;
                    }
                    let shifted: Vec<f64> =
                        x.iter().zip(u).map(|(a, b)| a - b).collect();
                    if inner.contains(&shifted) {
                        rho
                    } else {
                        0.0
                    }
                }))
            }
        }
    }
}

/// Recursive product Gauss quadrature over an axis-aligned box.
fn product_quad(
    rule: &GaussLegendre,
    lo: &[f64],
    hi: &[f64],
    point: &mut [f64],
    dim: usize,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> f64 {
    if dim == lo.len() {
        return f(point);
    }
    let half = 0.5 * (hi[dim] - lo[dim]);
    let mid = 0.5 * (hi[dim] + lo[dim]);
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        point[dim] = mid + half * x;
        acc += w * product_quad(rule, lo, hi, point, dim + 1, f);
    }
    acc * half
}

/// Normalized family alpha_j = beta_j / sum_j beta_j with sum alpha_j = 1
/// pointwise wherever the inner sets cover.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    plateaus: Vec<PlateauFunction>,
}

/// Normalize a family of plateau functions, verifying positivity of the sum
/// at the supplied probe points of the working domain.
pub fn partition_normalize(
    betas: Vec<PlateauFunction>,
    probe_points: &[Vec<f64>],
) -> Result<PartitionOfUnity, TestFnError> {
    let part = PartitionOfUnity { plateaus: betas };
    for p in probe_points {
        part.alphas(p)?;
    }
    Ok(part)
}

impl PartitionOfUnity {
    pub fn len(&self) -> usize {
        self.plateaus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plateaus.is_empty()
    }

    pub fn plateaus(&self) -> &[PlateauFunction] {
        &self.plateaus
    }

    /// All alpha_j(x); errors with the witness point when sum beta_j = 0.
    pub fn alphas(&self, x: &[f64]) -> Result<Vec<f64>, TestFnError> {
        let mut betas = Vec::with_capacity(self.plateaus.len());
        let mut sum = 0.0;
        for b in &self.plateaus {
            let v = b.eval(x)?;
            sum += v;
            betas.push(v);
        }
        if sum <= 0.0 {
            return Err(TestFnError::Uncovered {
                witness: x.to_vec(),
            });
        }
        for v in betas.iter_mut() {
            *v /= sum;
        }
        Ok(betas)
    }
}

/// Rolloff profile of the radial regulator between `lambda - width` and
/// `lambda`. Only the exponential smoothstep is implemented; the variants are
/// named so configurations stay explicit about the shape in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RolloffProfile {
    #[default]
    SmoothstepExp,
}

/// Smooth radial cutoff f(k^2): 1 on |k| <= lambda - width, 0 beyond
/// |k| >= lambda, monotone C-infinity rolloff in between.
#[derive(Debug, Clone, Copy)]
pub struct PlateauRegulator {
    lambda: f64,
    width: f64,
    pub profile: RolloffProfile,
}

/// g(t) = h(t) / (h(t) + h(1-t)) with h(t) = exp(-1/t): exactly 0 at t=0,
/// exactly 1 at t=1, all derivatives vanishing at both ends.
fn smoothstep_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = libm::exp(-1.0 / t);
        let b = libm::exp(-1.0 / (1.0 - t));
        a / (a + b)
    }
}

impl PlateauRegulator {
    pub fn new(lambda: f64, width: f64) -> Result<Self, TestFnError> {
        if !(width > 0.0 && width < lambda) || !lambda.is_finite() {
            return Err(TestFnError::BadRegulator { lambda, width });
        }
        Ok(PlateauRegulator {
            lambda,
            width,
            profile: RolloffProfile::SmoothstepExp,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// f(k^2); domain error on negative squared momentum.
    pub fn eval_ksq(&self, ksq: f64) -> Result<f64, TestFnError> {
        if ksq < 0.0 {
            return Err(TestFnError::NegativeKsq(ksq));
        }
        Ok(self.eval_radius(libm::sqrt(ksq)))
    }

    /// f as a function of |k|.
    pub fn eval_radius(&self, r: f64) -> f64 {
        if r <= self.lambda - self.width {
            1.0
        } else if r >= self.lambda {
            0.0
        } else {
            smoothstep_exp((self.lambda - r) / self.width)
        }
    }
}

/// Step-function limit of the regulator: the indicator of |k| < lambda.
/// Shares the radial interface so integrands can swap the two.
#[derive(Debug, Clone, Copy)]
pub struct StepRegulator {
    pub lambda: f64,
}

impl StepRegulator {
    pub fn eval_radius(&self, r: f64) -> f64 {
        if r < self.lambda {
            1.0
        } else {
            0.0
        }
    }
}

/// In-place radix-2 FFT; `inverse` includes the 1/n normalization.
pub fn fft(re: &mut [f64], im: &mut [f64], inverse: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two() && im.len() == n);
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let (wr, wi) = (libm::cos(ang), libm::sin(ang));
        for start in (0..n).step_by(len) {
            let (mut cr, mut ci) = (1.0, 0.0);
            for k in 0..len / 2 {
                let (ur, ui) = (re[start + k], im[start + k]);
                let (vr, vi) = (
                    re[start + k + len / 2] * cr - im[start + k + len / 2] * ci,
                    re[start + k + len / 2] * ci + im[start + k + len / 2] * cr,
                );
                re[start + k] = ur + vr;
                im[start + k] = ui + vi;
                re[start + k + len / 2] = ur - vr;
                im[start + k + len / 2] = ui - vi;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for (r, i) in re.iter_mut().zip(im.iter_mut()) {
            *r *= inv;
            *i *= inv;
        }
    }
}

/// Sample a 1D mollifier on a periodic grid of `n` points with spacing `dx`,
/// centered on index 0 with wraparound.
pub fn sample_mollifier_periodic(
    m: &Mollifier,
    n: usize,
    dx: f64,
) -> Result<Vec<f64>, TestFnError> {
    if m.dimension() != 1 {
        return Err(TestFnError::DimensionMismatch {
            got: m.dimension(),
            expected: 1,
        });
    }
    let domain = n as f64 * dx;
    if 2.0 * m.epsilon() >= domain {
        return Err(TestFnError::SupportTooWide {
            support: 2.0 * m.epsilon(),
            domain,
        });
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let x = if j <= n / 2 {
            j as f64 * dx
        } else {
            (j as f64 - n as f64) * dx
        };
        out.push(m.eval(&[x])?);
    }
    Ok(out)
}

/// Maximum deviation between the position-space circular convolution of
/// `signal` with the mollifier and the inverse transform of the product of
/// their discrete transforms (the discrete convolution theorem).
pub fn convolution_fourier_check(
    signal: &[f64],
    m: &Mollifier,
    dx: f64,
) -> Result<f64, TestFnError> {
    let n = signal.len();
    if !n.is_power_of_two() {
        return Err(TestFnError::GridNotPowerOfTwo(n));
    }
    let rho = sample_mollifier_periodic(m, n, dx)?;

    // Direct circular convolution, weighted by the grid spacing.
    let mut direct = alloc::vec![0.0; n];
    for (i, out) in direct.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, s) in signal.iter().enumerate() {
            acc += s * rho[(i + n - j) % n];
        }
        *out = acc * dx;
    }

    // Fourier route: product of DFTs, back-transformed.
    let mut sr: Vec<f64> = signal.to_vec();
    let mut si = alloc::vec![0.0; n];
    let mut rr = rho;
    let mut ri = alloc::vec![0.0; n];
    fft(&mut sr, &mut si, false);
    fft(&mut rr, &mut ri, false);
    for i in 0..n {
        let (ar, ai) = (sr[i], si[i]);
        let (br, bi) = (rr[i], ri[i]);
        sr[i] = (ar * br - ai * bi) * dx;
        si[i] = (ar * bi + ai * br) * dx;
    }
    fft(&mut sr, &mut si, true);

    let mut max_dev = 0.0;
    for i in 0..n {
        max_dev = libm::fmax(max_dev, libm::fabs(sr[i] - direct[i]));
        max_dev = libm::fmax(max_dev, libm::fabs(si[i]));
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn mollifier_boundary_and_symmetry() {
        let m = Mollifier::new(1.0, 1).unwrap();
        assert_eq!(m.eval(&[1.0]).unwrap(), 0.0);
        assert_eq!(m.eval(&[-1.0]).unwrap(), 0.0);
        assert_eq!(m.eval(&[1.5]).unwrap(), 0.0);
        for &x in &[0.1, 0.37, 0.82, 0.999] {
            let a = m.eval(&[x]).unwrap();
            let b = m.eval(&[-x]).unwrap();
            assert_eq!(a, b);
            assert!(a > 0.0);
        }
    }

    #[test]
    fn mollifier_2d_support_is_the_ball() {
        let m = Mollifier::new(0.5, 2).unwrap();
        // |x| slightly over the radius but inside the bounding box.
        assert_eq!(m.eval(&[0.4, 0.4]).unwrap(), 0.0);
        assert!(m.eval(&[0.3, 0.3]).unwrap() > 0.0);
    }

    #[test]
    fn plateau_short_circuits() {
        let m = Mollifier::new(0.25, 1).unwrap();
        let b = PlateauFunction::new(
            Region::Box {
                lo: vec![-2.0],
                hi: vec![2.0],
            },
            Region::Box {
                lo: vec![-1.0],
                hi: vec![1.0],
            },
            m,
        )
        .unwrap();
        assert_eq!(b.eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(b.eval(&[0.74]).unwrap(), 1.0);
        assert_eq!(b.eval(&[1.5]).unwrap(), 0.0);
        let mid = b.eval(&[1.0]).unwrap();
        assert!((mid - 0.5).abs() < 1e-10, "{mid}");
        let v = b.eval(&[1.1]).unwrap();
        assert!(v > 0.0 && v < 0.5);
    }

    #[test]
    fn plateau_half_line_at_origin() {
        let m = Mollifier::new(1.0, 1).unwrap();
        let b = PlateauFunction::new(
            Region::Box {
                lo: vec![-10.0],
                hi: vec![f64::INFINITY],
            },
            Region::Box {
                lo: vec![0.0],
                hi: vec![f64::INFINITY],
            },
            m,
        )
        .unwrap();
        // Even mollifier against the half-line: exactly half the mass.
        assert!((b.eval(&[0.0]).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn plateau_margin_precondition() {
        let m = Mollifier::new(0.5, 1).unwrap();
        let err = PlateauFunction::new(
            Region::Box {
                lo: vec![-1.2],
                hi: vec![1.2],
            },
            Region::Box {
                lo: vec![-1.0],
                hi: vec![1.0],
            },
            m,
        );
        assert!(matches!(err, Err(TestFnError::MarginTooSmall { .. })));
    }

    #[test]
    fn partition_single_and_pair() {
        let m = Mollifier::new(0.25, 1).unwrap();
        let mk = |lo: f64, hi: f64| {
            PlateauFunction::new(
                Region::Box {
                    lo: vec![lo - 0.5],
                    hi: vec![hi + 0.5],
                },
                Region::Box {
                    lo: vec![lo],
                    hi: vec![hi],
                },
                Mollifier::new(0.25, 1).unwrap(),
            )
            .unwrap()
        };
        let _ = m;
        let single = partition_normalize(vec![mk(-1.0, 1.0)], &[vec![0.0]]).unwrap();
        assert_eq!(single.alphas(&[0.3]).unwrap()[0], 1.0);

        let pair =
            partition_normalize(vec![mk(-1.0, 1.0), mk(-1.0, 1.0)], &[vec![0.0]]).unwrap();
        let a = pair.alphas(&[0.1]).unwrap();
        assert!((a[0] - 0.5).abs() < 1e-15);
        assert!((a[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_uncovered_witness() {
        let mk = |lo: f64, hi: f64| {
            PlateauFunction::new(
                Region::Box {
                    lo: vec![lo - 0.5],
                    hi: vec![hi + 0.5],
                },
                Region::Box {
                    lo: vec![lo],
                    hi: vec![hi],
                },
                Mollifier::new(0.25, 1).unwrap(),
            )
            .unwrap()
        };
        let err = partition_normalize(vec![mk(-1.0, 1.0)], &[vec![3.0]]);
        match err {
            Err(TestFnError::Uncovered { witness }) => assert_eq!(witness, vec![3.0]),
            other => panic!("expected uncovered error, got {other:?}"),
        }
    }

    #[test]
    fn regulator_profile() {
        let f = PlateauRegulator::new(10.0, 1.0).unwrap();
        assert_eq!(f.eval_ksq(0.0).unwrap(), 1.0);
        assert_eq!(f.eval_ksq(100.0).unwrap(), 0.0);
        assert_eq!(f.eval_radius(9.0), 1.0);
        let v = f.eval_radius(9.5);
        assert!(v > 0.0 && v < 1.0);
        // Regression constant: smoothstep at the midpoint is exactly 1/2.
        assert!((v - 0.5).abs() < 1e-14);
        assert!(matches!(
            f.eval_ksq(-1.0),
            Err(TestFnError::NegativeKsq(_))
        ));
    }

    #[test]
    fn regulator_monotone_and_smooth_at_junctions() {
        let f = PlateauRegulator::new(10.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let r = 11.0 * i as f64 / 1000.0;
            let v = f.eval_radius(r);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        let h = 1e-3;
        for r0 in [9.0, 10.0] {
            let d1 = (f.eval_radius(r0 + h) - f.eval_radius(r0 - h)) / (2.0 * h);
            let d2 = (f.eval_radius(r0 + h) - 2.0 * f.eval_radius(r0)
                + f.eval_radius(r0 - h))
                / (h * h);
            assert!(d1.abs() < 1e-6, "d1 at {r0}: {d1}");
            assert!(d2.abs() < 1e-6, "d2 at {r0}: {d2}");
        }
    }

    #[test]
    fn regulator_step_limit() {
        for &r in &[3.0, 9.7, 10.3] {
            let mut widths = [1.0, 0.1, 0.01, 0.001];
            let target = if r < 10.0 { 1.0 } else { 0.0 };
            let mut last_dev = f64::INFINITY;
            for w in widths.iter_mut() {
                let f = PlateauRegulator::new(10.0, *w).unwrap();
                let dev = (f.eval_radius(r) - target).abs();
                assert!(dev <= last_dev + 1e-15);
                last_dev = dev;
            }
            assert!(last_dev < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn convolution_theorem_on_grid() {
        let n = 256;
        let dx = 4.0 / n as f64;
        let m = Mollifier::new(0.3, 1).unwrap();
        let signal: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * dx;
                libm::sin(2.0 * core::f64::consts::PI * x / 4.0) + 0.3 * libm::cos(x)
            })
            .collect();
        let dev = convolution_fourier_check(&signal, &m, dx).unwrap();
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn convolution_grid_errors() {
        let m = Mollifier::new(0.3, 1).unwrap();
        let signal = alloc::vec![0.0; 100];
        assert!(matches!(
            convolution_fourier_check(&signal, &m, 0.01),
            Err(TestFnError::GridNotPowerOfTwo(100))
        ));
        let signal = alloc::vec![0.0; 64];
        assert!(matches!(
            convolution_fourier_check(&signal, &m, 0.001),
            Err(TestFnError::SupportTooWide { .. })
        ));
    }
}
