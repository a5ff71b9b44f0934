//! Run configuration: command-line flags merged with an optional
//! `key = value` file. Flags win over the file.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use semitoric::catalog::SystemInstance;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Cso,
    Cam,
    Twoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Momentum image of one system.
    Image,
    /// Coupled angular momenta at t = 0, 0.25, 0.5, 0.75, 1.
    Montage,
    /// Polygon representative, or one per `--twist` value.
    Polygon,
    /// Toric polygon of a Hirzebruch surface.
    Hirzebruch,
}

/// Every option that can also appear in a config file. Keys in the file are
/// the long flag names without dashes.
#[derive(Args, Clone, Debug, Default)]
pub struct RunConfig {
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long = "R1", global = true)]
    pub r1: Option<f64>,
    #[arg(long = "R2", global = true)]
    pub r2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub rho1: Option<f64>,
    #[arg(long, global = true)]
    pub rho2: Option<f64>,
    #[arg(long, global = true)]
    pub s1: Option<f64>,
    #[arg(long, global = true)]
    pub s2: Option<f64>,
    /// RMS residual accepted from the Taylor series fit.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
    /// Scan resolution, region-map side, or boundary samples of a plot.
    #[arg(long, short = 'n', global = true)]
    pub grid: Option<usize>,
    /// Output file, or directory for plots that write several files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed of the random multistart in the rank-0 search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scan axis: `t` or `R` (= R2/R1) for cam, `s1` or `s2` for twoff;
    /// omit for the twoff region map.
    #[arg(long, global = true)]
    pub axis: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Cut signs, comma separated, one per focus-focus value.
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    pub sign: Option<Vec<i8>>,
    /// Vertical shear exponent applied to the polygon.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub shear: Option<i32>,
    /// Normal-form degree.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub kind: Option<PlotKind>,
    /// Twisting indices to draw polygon representatives for.
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    pub twist: Option<Vec<i32>>,
    #[arg(long = "hirzebruch-n", global = true)]
    pub hirzebruch_n: Option<u32>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Plain-text file of `key = value` lines; `#` starts a comment.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("cannot parse value {v:?} for key {key}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|s| parse(key, s.trim())).collect()
}

fn enum_value<T: ValueEnum>(key: &str, v: &str) -> Result<T, ConfigError> {
    T::from_str(v, true).map_err(|_| ConfigError(format!("invalid value {v:?} for key {key}")))
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl RunConfig {
    /// Fills unset options from one file entry.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "family" => fill(&mut self.family, enum_value(key, v)?),
            "R1" => fill(&mut self.r1, parse(key, v)?),
            "R2" => fill(&mut self.r2, parse(key, v)?),
            "t" => fill(&mut self.t, parse(key, v)?),
            "rho1" => fill(&mut self.rho1, parse(key, v)?),
            "rho2" => fill(&mut self.rho2, parse(key, v)?),
            "s1" => fill(&mut self.s1, parse(key, v)?),
            "s2" => fill(&mut self.s2, parse(key, v)?),
            "tolerance" => fill(&mut self.tolerance, parse(key, v)?),
            "grid" | "n" => fill(&mut self.grid, parse(key, v)?),
            "out" => fill(&mut self.out, PathBuf::from(v)),
            "format" => fill(&mut self.format, enum_value(key, v)?),
            "threads" => fill(&mut self.threads, parse(key, v)?),
            "seed" => fill(&mut self.seed, parse(key, v)?),
            "axis" => fill(&mut self.axis, v.to_string()),
            "from" => fill(&mut self.from, parse(key, v)?),
            "to" => fill(&mut self.to, parse(key, v)?),
            "sign" => fill(&mut self.sign, parse_list(key, v)?),
            "shear" => fill(&mut self.shear, parse(key, v)?),
            "degree" => fill(&mut self.degree, parse(key, v)?),
            "kind" => fill(&mut self.kind, enum_value(key, v)?),
            "twist" => fill(&mut self.twist, parse_list(key, v)?),
            "hirzebruch-n" => fill(&mut self.hirzebruch_n, parse(key, v)?),
            "alpha" => fill(&mut self.alpha, parse(key, v)?),
            "beta" => fill(&mut self.beta, parse(key, v)?),
            _ => return Err(ConfigError(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    pub fn merge_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Rejects non-positive tolerances and empty grids.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.grid == Some(0) {
            return Err(ConfigError("grid must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError("threads must be positive".into()));
        }
        if let Some(s) = self.sign.as_ref().and_then(|s| s.iter().find(|s| s.abs() != 1)) {
            return Err(ConfigError(format!("cut signs must be +1 or -1, got {s}")));
        }
        Ok(())
    }

    pub fn family(&self) -> Result<FamilyName, ConfigError> {
        self.family.ok_or_else(|| ConfigError("--family is required".into()))
    }

    fn need(v: Option<f64>, name: &str) -> Result<f64, ConfigError> {
        v.ok_or_else(|| ConfigError(format!("--{name} is required for this family")))
    }

    /// The system named by the family and parameter options.
    pub fn system(&self) -> Result<SystemInstance, ConfigError> {
        let sys = match self.family()? {
            FamilyName::Cso => SystemInstance::cso(self.rho1.unwrap_or(1.0), self.rho2.unwrap_or(1.0)),
            FamilyName::Cam => {
                SystemInstance::cam(Self::need(self.r1, "R1")?, Self::need(self.r2, "R2")?, Self::need(self.t, "t")?)
            }
            FamilyName::Twoff => SystemInstance::two_focus(
                Self::need(self.r1, "R1")?,
                Self::need(self.r2, "R2")?,
                Self::need(self.s1, "s1")?,
                Self::need(self.s2, "s2")?,
            ),
        };
        sys.map_err(|e| ConfigError(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_fills_only_unset_options() {
        let mut c = RunConfig { r1: Some(2.0), ..Default::default() };
        c.merge_file("family = cam\nR1 = 1\nR2 = 1.5 # comment\n\nt=0.5\nsign = 1,-1\n").unwrap();
        assert_eq!(c.family, Some(FamilyName::Cam));
        assert_eq!((c.r1, c.r2, c.t), (Some(2.0), Some(1.5), Some(0.5)));
        assert_eq!(c.sign, Some(vec![1, -1]));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::default().merge_file("colour = blue").is_err());
        assert!(RunConfig::default().merge_file("t = fast").is_err());
        assert!(RunConfig::default().merge_file("just words").is_err());
        let c = RunConfig { tolerance: Some(-1.0), ..Default::default() };
        assert!(c.validate().is_err());
    }
}
