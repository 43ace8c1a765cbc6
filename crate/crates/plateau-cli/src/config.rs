//! JSON configuration schemas, one per subcommand. Parsing is strict:
//! unknown keys are rejected, and every schema carries a `config_version`
//! so reported numbers are tied to a concrete default set.

use plateau_core::tensor::Vec4;
use plateau_core::testfn::Region;
use plateau_core::triangle::{TriangleConfig, TriangleError};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<(), String> {
    if v != CONFIG_VERSION {
        return Err(format!(
            "config_version {v} is not supported (expected {CONFIG_VERSION})"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl RegionSpec {
    pub fn to_region(&self) -> Region {
        match self {
            RegionSpec::Box { lo, hi } => Region::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            RegionSpec::Ball { center, radius } => Region::Ball {
                center: center.clone(),
                radius: *radius,
            },
        }
    }
}

/// `testfn`: regulator profile and partition-of-unity demonstration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestfnConfig {
    pub config_version: u32,
    pub lambda: f64,
    pub width: f64,
    /// Only "smoothstep-exp" is defined.
    pub profile: String,
    /// Rows in the profile plot CSV (inclusive endpoints 0 and lambda).
    pub profile_points: usize,
    /// Mollifier half-width used to build the plateau functions.
    pub epsilon: f64,
    pub cover_outer: Vec<RegionSpec>,
    pub cover_inner: Vec<RegionSpec>,
    /// Probe box for the partition check (must lie in the covered region).
    pub probe_lo: Vec<f64>,
    pub probe_hi: Vec<f64>,
    pub probe_points: usize,
}

impl Default for TestfnConfig {
    fn default() -> Self {
        let b = |lo: f64, hi: f64| RegionSpec::Box {
            lo: vec![lo],
            hi: vec![hi],
        };
        TestfnConfig {
            config_version: CONFIG_VERSION,
            lambda: 10.0,
            width: 1.0,
            profile: "smoothstep-exp".into(),
            profile_points: 201,
            epsilon: 0.2,
            cover_outer: vec![b(-0.6, 1.3), b(0.7, 2.3), b(1.7, 3.6)],
            cover_inner: vec![b(-0.3, 1.0), b(1.0, 2.0), b(2.0, 3.3)],
            probe_lo: vec![0.0],
            probe_hi: vec![3.0],
            probe_points: 10_000,
        }
    }
}

impl TestfnConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_version(self.config_version)?;
        if self.profile != "smoothstep-exp" {
            return Err(format!("unknown profile \"{}\"", self.profile));
        }
        if self.profile_points < 2 {
            return Err("profile_points must be at least 2".into());
        }
        if self.cover_outer.len() != self.cover_inner.len() {
            return Err("cover_outer and cover_inner must have equal length".into());
        }
        if self.probe_lo.len() != self.probe_hi.len() {
            return Err("probe_lo and probe_hi must have equal length".into());
        }
        Ok(())
    }
}

/// `wilson check`: geometry and fields of the line-integral check table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WilsonConfig {
    pub config_version: u32,
    pub start: [f64; 4],
    pub end: [f64; 4],
    /// Bulge vector defining the arc path.
    pub bulge: [f64; 4],
    pub samples: usize,
    pub coupling: f64,
    /// Antisymmetric field strength for the curvature checks.
    pub curvature: [[f64; 4]; 4],
    /// Linear gauge function coefficients.
    pub gauge_linear: [f64; 4],
    /// Quadratic gauge function: Lambda(x) = x.q.x + b.x.
    pub gauge_quadratic: [[f64; 4]; 4],
    pub gauge_quadratic_linear: [f64; 4],
    pub transverse_normal: [f64; 4],
    pub transverse_amplitude: f64,
    pub longitudinal_amplitude: f64,
}

impl Default for WilsonConfig {
    fn default() -> Self {
        let mut curvature = [[0.0; 4]; 4];
        curvature[0][1] = 0.8;
        curvature[1][0] = -0.8;
        curvature[2][3] = -0.3;
        curvature[3][2] = 0.3;
        let mut q = [[0.0; 4]; 4];
        q[0][0] = 0.4;
        q[1][1] = -0.2;
        q[0][2] = 0.15;
        q[2][0] = 0.15;
        q[3][3] = 0.25;
        WilsonConfig {
            config_version: CONFIG_VERSION,
            start: [0.0, 0.0, 0.0, 0.0],
            end: [1.0, 0.7, -0.4, 0.2],
            bulge: [0.0, 0.3, 0.5, 0.0],
            samples: 64,
            coupling: 0.9,
            curvature,
            gauge_linear: [0.3, -0.7, 0.1, 0.5],
            gauge_quadratic: q,
            gauge_quadratic_linear: [0.1, 0.2, -0.3, 0.05],
            transverse_normal: [0.0, 0.0, 1.0, 0.4],
            transverse_amplitude: 0.05,
            longitudinal_amplitude: 0.3,
        }
    }
}

impl WilsonConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_version(self.config_version)?;
        if self.coupling == 0.0 {
            return Err("coupling must be nonzero".into());
        }
        if self.samples < 2 {
            return Err("samples must be at least 2".into());
        }
        for i in 0..4 {
            for j in 0..4 {
                if self.curvature[i][j] != -self.curvature[j][i] {
                    return Err(format!("curvature[{i}][{j}] breaks antisymmetry"));
                }
            }
        }
        Ok(())
    }
}

/// Shared momentum-space configuration for the anomaly subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleFileConfig {
    pub config_version: u32,
    pub p1: [f64; 4],
    pub p2: [f64; 4],
    pub coupling: f64,
    pub lambda: f64,
    pub width: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub workers: u64,
    pub momentum_ratio: f64,
    pub singular_floor_ratio: f64,
    pub angular_order: usize,
}

impl Default for TriangleFileConfig {
    fn default() -> Self {
        TriangleFileConfig {
            config_version: CONFIG_VERSION,
            p1: [0.12, 0.0, 0.16, 0.0],
            p2: [0.0, 0.15, 0.0, -0.1],
            coupling: 1.0,
            lambda: 10.0,
            width: 1.0,
            mc_samples: 1_000_000,
            seed: 42,
            workers: 4,
            momentum_ratio: 0.1,
            singular_floor_ratio: 1e-6,
            angular_order: 32,
        }
    }
}

impl TriangleFileConfig {
    pub fn to_core(&self) -> Result<TriangleConfig, String> {
        check_version(self.config_version)?;
        let err = |e: TriangleError| e.to_string();
        let mut cfg = TriangleConfig::new(
            Vec4(self.p1),
            Vec4(self.p2),
            self.lambda,
            self.width,
        )
        .map_err(err)?;
        cfg.coupling = self.coupling;
        cfg.mc_samples = self.mc_samples;
        cfg.seed = self.seed;
        cfg.workers = self.workers;
        cfg.momentum_ratio = self.momentum_ratio;
        cfg.singular_floor_ratio = self.singular_floor_ratio;
        cfg.angular_order = self.angular_order;
        cfg.validate().map_err(err)?;
        Ok(cfg)
    }
}

/// `shift-demo`: smooth-regulator shift check plus hard-cutoff surface term.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftDemoConfig {
    pub triangle: TriangleFileConfig,
    /// Shift vector for the hard-cutoff demonstration.
    pub hard_p: [f64; 4],
    pub hard_lambda: f64,
    /// Per-angle Gauss order of the surface-quadrature oracle.
    pub oracle_order: usize,
}

impl Default for ShiftDemoConfig {
    fn default() -> Self {
        ShiftDemoConfig {
            triangle: TriangleFileConfig::default(),
            hard_p: [1.0, 0.0, 0.0, 0.0],
            hard_lambda: 20.0,
            oracle_order: 24,
        }
    }
}

/// `shell`: shell-domain integral, deterministic and Monte Carlo.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellConfig {
    pub config_version: u32,
    pub lambda: f64,
    /// Component index delta of the shell thickness.
    pub direction: usize,
    pub thicknesses: Vec<f64>,
    pub mc_samples: u64,
    pub seed: u64,
    pub workers: u64,
    /// |p| of the cross-section geometry plot.
    pub cross_section_momentum: f64,
    pub cross_section_points: usize,
}

impl Default for ShellConfig {
    fn default() -> Self {
        ShellConfig {
            config_version: CONFIG_VERSION,
            lambda: 10.0,
            direction: 1,
            thicknesses: vec![0.1, 0.5, 1.0],
            mc_samples: 1_000_000,
            seed: 7,
            workers: 4,
            cross_section_momentum: 1.0,
            cross_section_points: 128,
        }
    }
}

impl ShellConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_version(self.config_version)?;
        if self.direction > 3 {
            return Err(format!("direction {} out of range 0..=3", self.direction));
        }
        if self.thicknesses.is_empty() {
            return Err("thicknesses must be non-empty".into());
        }
        if self.cross_section_points < 2 {
            return Err("cross_section_points must be at least 2".into());
        }
        Ok(())
    }
}
