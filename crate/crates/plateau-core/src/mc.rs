//! Seeded, worker-partitioned Monte Carlo integration over 4-balls and
//! 4-shells.
//!
//! Determinism contract: a fixed `(seed, worker_count)` pair yields
//! bit-identical results. Each worker draws from its own ChaCha stream
//! derived from the seed and worker index; worker partials are combined by
//! pairwise summation, so the reduction order is fixed regardless of how the
//! batches were produced.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{Rank2, Vec4};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(u64),
    #[error("need at least 1 worker")]
    NoWorkers,
    #[error("rejected sample fraction {fraction} exceeds the 1e-4 budget")]
    TooManyRejected { fraction: f64 },
    #[error("shell radii must satisfy 0 <= r_min < r_max, got {r_min}..{r_max}")]
    BadShell { r_min: f64, r_max: f64 },
    #[error("ball radius must be positive, got {0}")]
    BadRadius(f64),
}

/// Origin-centered integration domains in Euclidean 4-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Ball { radius: f64 },
    Shell { r_min: f64, r_max: f64 },
}

impl Domain {
    pub fn ball(radius: f64) -> Result<Self, McError> {
        if !(radius > 0.0) {
            return Err(McError::BadRadius(radius));
        }
        Ok(Domain::Ball { radius })
    }

    pub fn shell(r_min: f64, r_max: f64) -> Result<Self, McError> {
        if !(0.0 <= r_min && r_min < r_max) {
            return Err(McError::BadShell { r_min, r_max });
        }
        Ok(Domain::Shell { r_min, r_max })
    }

    /// Exact 4-volume (vol of the 4-ball is pi^2 R^4 / 2).
    pub fn volume(self) -> f64 {
        let half_pi2 = 0.5 * core::f64::consts::PI * core::f64::consts::PI;
        match self {
            Domain::Ball { radius } => half_pi2 * libm::pow(radius, 4.0),
            Domain::Shell { r_min, r_max } => {
                half_pi2 * (libm::pow(r_max, 4.0) - libm::pow(r_min, 4.0))
            }
        }
    }

    /// Uniform sample: direction uniform on S^3, radius with density r^3.
    fn sample(self, rng: &mut ChaCha8Rng) -> Vec4 {
        let dir = sample_s3(rng);
        let u = uniform_f64(rng);
        let r = match self {
            Domain::Ball { radius } => radius * libm::pow(u, 0.25),
            Domain::Shell { r_min, r_max } => {
                let a = libm::pow(r_min, 4.0);
                let b = libm::pow(r_max, 4.0);
                libm::pow(a + u * (b - a), 0.25)
            }
        };
        dir * r
    }
}

/// Uniform f64 in [0, 1) from the top 53 bits of a u64.
pub fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut u = uniform_f64(rng);
    if u == 0.0 {
        u = f64::MIN_POSITIVE;
    }
    let v = uniform_f64(rng);
    let r = libm::sqrt(-2.0 * libm::log(u));
    let phi = 2.0 * core::f64::consts::PI * v;
    (r * libm::cos(phi), r * libm::sin(phi))
}

/// Uniform direction on the unit 3-sphere (normalized 4-vector of normals).
pub fn sample_s3(rng: &mut ChaCha8Rng) -> Vec4 {
    loop {
        let (a, b) = normal_pair(rng);
        let (c, d) = normal_pair(rng);
        let v = Vec4::new(a, b, c, d);
        let n = v.norm();
        if n > 1e-12 {
            return v * (1.0 / n);
        }
    }
}

/// Per-worker generator: one ChaCha8 cipher keyed by the seed, with the
/// worker index selecting an independent stream.
pub fn worker_rng(seed: u64, worker: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Values the Monte Carlo engine can average component-wise.
pub trait McValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Component-wise product (used for sums of squares).
    fn mul_elem(self, other: Self) -> Self;
    fn sqrt_elem(self) -> Self;
    fn max_abs(self) -> f64;
}

impl McValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn mul_elem(self, o: Self) -> Self {
        self * o
    }
    fn sqrt_elem(self) -> Self {
        libm::sqrt(libm::fmax(self, 0.0))
    }
    fn max_abs(self) -> f64 {
        libm::fabs(self)
    }
}

impl McValue for Vec4 {
    fn zero() -> Self {
        Vec4::ZERO
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn mul_elem(self, o: Self) -> Self {
        Vec4([
            self.0[0] * o.0[0],
            self.0[1] * o.0[1],
            self.0[2] * o.0[2],
            self.0[3] * o.0[3],
        ])
    }
    fn sqrt_elem(self) -> Self {
        Vec4([
            libm::sqrt(libm::fmax(self.0[0], 0.0)),
            libm::sqrt(libm::fmax(self.0[1], 0.0)),
            libm::sqrt(libm::fmax(self.0[2], 0.0)),
            libm::sqrt(libm::fmax(self.0[3], 0.0)),
        ])
    }
    fn max_abs(self) -> f64 {
        Vec4::max_abs(self)
    }
}

impl McValue for Rank2 {
    fn zero() -> Self {
        Rank2::ZERO
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        Rank2::scale(self, s)
    }
    fn mul_elem(self, o: Self) -> Self {
        let mut t = Rank2::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                t.0[i][j] = self.0[i][j] * o.0[i][j];
            }
        }
        t
    }
    fn sqrt_elem(self) -> Self {
        let mut t = Rank2::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                t.0[i][j] = libm::sqrt(libm::fmax(self.0[i][j], 0.0));
            }
        }
        t
    }
    fn max_abs(self) -> f64 {
        Rank2::max_abs(self)
    }
}

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    ShellReduction,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonteCarlo => "mc",
            Method::ShellReduction => "shell-reduction",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Integral value with statistical standard error (0 for deterministic
/// methods), sample count and method tag.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate<T: McValue> {
    pub value: T,
    pub std_error: T,
    pub n_samples: u64,
    pub method: Method,
    /// Fraction of samples rejected by the singularity floor.
    pub rejected_fraction: f64,
}

impl<T: McValue> IntegralEstimate<T> {
    pub fn deterministic(value: T, method: Method) -> Self {
        IntegralEstimate {
            value,
            std_error: T::zero(),
            n_samples: 0,
            method,
            rejected_fraction: 0.0,
        }
    }
}

struct WorkerMoments<T: McValue> {
    sum: T,
    sum_sq: T,
    rejected: u64,
}

/// Uniform-sampling Monte Carlo of a (possibly tensor-valued) integrand over
/// the domain, with exact volume weighting.
///
/// The integrand returns `None` for samples rejected by the singularity
/// floor; rejected samples contribute zero and are reported in the estimate.
/// The run fails if the rejected fraction exceeds 1e-4.
pub fn mc_integrate_4d<T, F>(
    integrand: F,
    domain: Domain,
    n: u64,
    seed: u64,
    workers: u64,
) -> Result<IntegralEstimate<T>, McError>
where
    T: McValue,
    F: Fn(Vec4) -> Option<T>,
{
    if n < 2 {
        return Err(McError::TooFewSamples(n));
    }
    if workers == 0 {
        return Err(McError::NoWorkers);
    }
    let base = n / workers;
    let extra = n % workers;
    let mut partials: Vec<WorkerMoments<T>> = Vec::with_capacity(workers as usize);
    for w in 0..workers {
        let count = base + u64::from(w < extra);
        let mut rng = worker_rng(seed, w);
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        let mut rejected = 0u64;
        for _ in 0..count {
            let k = domain.sample(&mut rng);
            match integrand(k) {
                Some(v) => {
                    sum = sum.add(v);
                    sum_sq = sum_sq.add(v.mul_elem(v));
                }
                None => rejected += 1,
            }
        }
        partials.push(WorkerMoments {
            sum,
            sum_sq,
            rejected,
        });
    }

    // Pairwise reduction over worker partials.
    let (sum, sum_sq, rejected) = pairwise_reduce(&partials);
    let fraction = rejected as f64 / n as f64;
    if fraction > 1e-4 {
        return Err(McError::TooManyRejected { fraction });
    }

    let vol = domain.volume();
    let nf = n as f64;
    let mean = sum.scale(1.0 / nf);
    let var = sum_sq
        .scale(1.0 / nf)
        .add(mean.mul_elem(mean).scale(-1.0))
        .scale(nf / (nf - 1.0));
    let std_error = var.scale(1.0 / nf).sqrt_elem().scale(vol);
    Ok(IntegralEstimate {
        value: mean.scale(vol),
        std_error,
        n_samples: n,
        method: Method::MonteCarlo,
        rejected_fraction: fraction,
    })
}

fn pairwise_reduce<T: McValue>(parts: &[WorkerMoments<T>]) -> (T, T, u64) {
    match parts.len() {
        0 => (T::zero(), T::zero(), 0),
        1 => (parts[0].sum, parts[0].sum_sq, parts[0].rejected),
        len => {
            let (a, b, ra) = pairwise_reduce(&parts[..len / 2]);
            let (c, d, rb) = pairwise_reduce(&parts[len / 2..]);
            (a.add(c), b.add(d), ra + rb)
        }
    }
}
