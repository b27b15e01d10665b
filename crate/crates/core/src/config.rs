//! Run configuration: one TOML tree, every field defaulted, validated on load.

use serde::{Deserialize, Serialize};

use crate::gallery::ModeTruncation;
use crate::green::ModelParams;
use crate::harness::FieldEvaluator;
use crate::parametrix::{CutoffSuite, RegimeConstants};
use crate::specfun::Sign;
use crate::{Error, Result, Scalar};

/// A uniform or geometric grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: Scalar,
    pub end: Scalar,
    pub count: usize,
    #[serde(default)]
    pub geometric: bool,
}

impl Grid {
    pub const fn uniform(start: Scalar, end: Scalar, count: usize) -> Self {
        Self { start, end, count, geometric: false }
    }

    pub fn points(&self) -> Vec<Scalar> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as Scalar;
        (0..self.count)
            .map(|i| {
                let s = i as Scalar / n;
                if self.geometric {
                    self.start * (self.end / self.start).powf(s)
                } else {
                    self.start + (self.end - self.start) * s
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.count >= 1
            && self.start.is_finite()
            && self.end.is_finite()
            && (self.count == 1 || self.end > self.start)
            && (!self.geometric || self.start > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("grid `{name}` is malformed: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZerosConfig {
    pub k_max: usize,
}

impl Default for ZerosConfig {
    fn default() -> Self {
        Self { k_max: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesConfig {
    pub k_max: usize,
    /// Tangential frequency of the exported modes.
    pub eta: Scalar,
    pub x: Grid,
}

impl Default for ModesConfig {
    fn default() -> Self {
        Self { k_max: 20, eta: 64.0, x: Grid::uniform(0.0, 1.0, 201) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagateConfig {
    pub t: Grid,
    pub x: Grid,
    /// y offsets from the front −t√(1+a).
    pub y: Grid,
}

impl Default for PropagateConfig {
    fn default() -> Self {
        Self { t: Grid::uniform(0.0, 0.2, 3), x: Grid::uniform(0.0, 0.2, 21), y: Grid::uniform(-0.05, 0.05, 41) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParametrixConfig {
    /// Rescaled times T.
    pub t: Grid,
    /// Rescaled X.
    pub x: Grid,
    /// Rescaled Y.
    pub y: Grid,
    pub cutoffs: CutoffSuite,
    pub consts: RegimeConstants,
}

impl Default for ParametrixConfig {
    fn default() -> Self {
        Self {
            t: Grid::uniform(1.0, 3.0, 3),
            x: Grid::uniform(0.0, 1.2, 13),
            y: Grid::uniform(-2.0, 2.0, 41),
            cutoffs: CutoffSuite::default(),
            consts: RegimeConstants::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CausticsConfig {
    pub n: usize,
    /// Times of the exported slices, as multiples of 4√(a(1+a)).
    pub slices: Grid,
}

impl Default for CausticsConfig {
    fn default() -> Self {
        Self { n: 1, slices: Grid::uniform(0.8, 1.2, 5) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub evaluator: FieldEvaluator,
    pub t: Grid,
    /// Peaks n = 1..=n_peaks are scanned when positive.
    pub n_peaks: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self { evaluator: FieldEvaluator::Spectral, t: Grid { start: 0.125, end: 1.0, count: 8, geometric: true }, n_peaks: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscintConfig {
    pub lambda: Grid,
}

impl Default for OscintConfig {
    fn default() -> Self {
        Self { lambda: Grid { start: 10.0, end: 1000.0, count: 7, geometric: true } }
    }
}

/// Everything a run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub h: Scalar,
    pub a: Scalar,
    pub d: usize,
    /// Mode truncation k ≤ ε/h.
    pub epsilon: Scalar,
    /// `Plus` is e^{−it√−Δ}; `Minus` puts the front at y = −t√(1+a).
    pub sign: Sign,
    pub amplitude: Scalar,
    pub seed: u64,
    /// 0 lets the thread pool decide.
    pub threads: usize,
    pub out: String,
    pub zeros: ZerosConfig,
    pub modes: ModesConfig,
    pub propagate: PropagateConfig,
    pub parametrix: ParametrixConfig,
    pub caustics: CausticsConfig,
    pub decay: DecayConfig,
    pub oscint: OscintConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            a: 0.1,
            d: 2,
            epsilon: 0.2,
            sign: Sign::Minus,
            amplitude: 1.0,
            seed: 0,
            threads: 0,
            out: "out".into(),
            zeros: ZerosConfig::default(),
            modes: ModesConfig::default(),
            propagate: PropagateConfig::default(),
            parametrix: ParametrixConfig::default(),
            caustics: CausticsConfig::default(),
            decay: DecayConfig::default(),
            oscint: OscintConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.h > 0.0 && self.h < 1.0) {
            return bad(format!("h must lie in (0, 1), got {}", self.h));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return bad(format!("a must lie in (0, 1], got {}", self.a));
        }
        if self.d < 2 {
            return bad(format!("d must be at least 2, got {}", self.d));
        }
        if !(self.epsilon > 0.0) || self.epsilon < self.h {
            return bad(format!("epsilon must be at least h, got {}", self.epsilon));
        }
        if self.zeros.k_max == 0 || self.modes.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        if !(self.modes.eta > 0.0) {
            return bad("modes.eta must be positive".into());
        }
        for (name, g) in [
            ("modes.x", &self.modes.x),
            ("propagate.t", &self.propagate.t),
            ("propagate.x", &self.propagate.x),
            ("propagate.y", &self.propagate.y),
            ("parametrix.t", &self.parametrix.t),
            ("parametrix.x", &self.parametrix.x),
            ("parametrix.y", &self.parametrix.y),
            ("caustics.slices", &self.caustics.slices),
            ("decay.t", &self.decay.t),
            ("oscint.lambda", &self.oscint.lambda),
        ] {
            g.validate(name)?;
        }
        if self.propagate.x.start < 0.0 || self.modes.x.start < 0.0 {
            return bad("x grids must start at x ≥ 0".into());
        }
        if self.decay.t.start <= 0.0 {
            return bad("decay.t must be positive".into());
        }
        self.parametrix.cutoffs.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.parametrix.consts.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.model().validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model(&self) -> ModelParams {
        let mut p = ModelParams::new(self.h, self.a);
        p.d = self.d;
        p.trunc = ModeTruncation::for_h(self.h, self.epsilon);
        p.propagator_sign = self.sign;
        p.amplitude = self.amplitude;
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.h = 1.0 / 128.0;
        c.decay.evaluator = FieldEvaluator::Parametrix;
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn malformed_inputs_are_config_errors() {
        for text in ["h = -1.0", "a = 2.0", "unknown = 3", "[zeros]\nk_max = 0", "[decay.t]\nstart = 1.0\nend = 0.5\ncount = 3", "h = \"x\""] {
            let e = RunConfig::from_toml(text).unwrap_err();
            assert!(matches!(e, Error::Config(_)), "{text}: {e:?}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(Grid::uniform(0.0, 1.0, 3).points(), vec![0.0, 0.5, 1.0]);
        let g = Grid { start: 1.0, end: 100.0, count: 3, geometric: true }.points();
        assert!((g[1] - 10.0).abs() < 1e-12);
    }
}
