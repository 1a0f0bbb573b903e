//! `key = value` run configuration.
//!
//! One entry per line; `#` starts a comment. Numbers are exact: integers,
//! fractions `p/q` and decimals such as `1e-3` or `0.25`. Lengths may carry a
//! `pi` factor (`2pi`, `3/2*pi`). Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::ToPrimitive;
use thiserror::Error;
use threewave_core::diffpoly::Rational;
use threewave_core::numerics::SpatialScheme;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{value}` is not a valid {expected} for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}

/// An exact number, possibly a rational multiple of π.
#[derive(Clone, Debug, PartialEq)]
pub struct Number {
    pub value: Rational,
    pub times_pi: bool,
}

impl Number {
    pub fn rational(value: Rational) -> Self {
        Number { value, times_pi: false }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.value.to_f64().unwrap_or(f64::NAN);
        if self.times_pi {
            v * std::f64::consts::PI
        } else {
            v
        }
    }

    /// The exact value, when it has no π factor.
    pub fn exact(&self) -> Option<&Rational> {
        (!self.times_pi).then_some(&self.value)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if self.times_pi {
            write!(f, "*pi")?;
        }
        Ok(())
    }
}

impl FromStr for Number {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let s = s.trim();
        let (body, times_pi) = match s.strip_suffix("pi") {
            Some(rest) => (rest.trim_end().trim_end_matches('*').trim_end(), true),
            None => (s, false),
        };
        let value = if body.is_empty() && times_pi {
            Rational::from_integer(1.into())
        } else {
            parse_exact(body).ok_or(())?
        };
        Ok(Number { value, times_pi })
    }
}

/// `p`, `p/q` or a decimal with optional exponent, converted without rounding.
fn parse_exact(s: &str) -> Option<Rational> {
    if s.contains('/') {
        return Rational::from_str(s).ok();
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(d) => ("-", d),
        None => ("", mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let scale = frac.len() as i32 - exp;
    let num = format!("{sign}{int}{frac}");
    let num = if scale < 0 {
        format!("{num}{}", "0".repeat((-scale) as usize))
    } else {
        num
    };
    let den = format!("1{}", "0".repeat(scale.max(0) as usize));
    Rational::from_str(&format!("{num}/{den}")).ok()
}

/// Settings for `simulate`, `chain` and the appendix typo toggle.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub length: Number,
    pub dt: Number,
    pub t_end: Number,
    pub amplitude: Number,
    pub modes: usize,
    pub rng_seed: u64,
    pub scheme: SpatialScheme,
    pub floor: Number,
    pub snapshot_every: usize,
    pub reality: bool,
    pub drift_tol: Number,
    pub nu01: Rational,
    pub nu10: Rational,
    pub b10: Rational,
    pub c10: Rational,
    pub seed_k: Number,
    pub seed_m: Number,
    pub seed_c: Number,
    pub tau: Number,
    pub window_x0: Number,
    pub window_x1: Number,
    pub window_t0: Number,
    pub window_t1: Number,
    pub window_nx: usize,
    pub window_nt: usize,
    pub residual_tol: Number,
    pub inject_typo: bool,
}

fn num(s: &str) -> Number {
    s.parse().expect("built-in default parses")
}

fn exact(s: &str) -> Rational {
    num(s).value
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 128,
            length: num("2pi"),
            dt: num("1/1000"),
            t_end: num("1"),
            amplitude: num("1/10"),
            modes: 16,
            rng_seed: 7,
            scheme: SpatialScheme::Spectral,
            floor: num("1e-6"),
            snapshot_every: 10,
            reality: false,
            drift_tol: num("1e-8"),
            nu01: exact("1"),
            nu10: exact("-1"),
            b10: exact("1/10"),
            c10: exact("0"),
            seed_k: num("1"),
            seed_m: num("-1"),
            seed_c: num("10"),
            tau: num("1/100"),
            window_x0: num("0"),
            window_x1: num("2pi"),
            window_t0: num("1/5"),
            window_t1: num("4/5"),
            window_nx: 9,
            window_nt: 4,
            residual_tol: num("1e-6"),
            inject_typo: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        text.parse()
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::MissingEquals { line })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.into(),
                });
            }
            seen.push(key.into());
            let bad = |expected| ConfigError::BadValue {
                line,
                key: key.into(),
                value: value.into(),
                expected,
            };
            let number = || value.parse::<Number>().map_err(|_| bad("number"));
            let rational = || {
                number()?
                    .exact()
                    .cloned()
                    .ok_or_else(|| bad("rational without pi"))
            };
            let count = || value.parse::<usize>().map_err(|_| bad("nonnegative integer"));
            let flag = || value.parse::<bool>().map_err(|_| bad("boolean"));
            match key {
                "n" => cfg.n = count()?,
                "length" => cfg.length = number()?,
                "dt" => cfg.dt = number()?,
                "t_end" => cfg.t_end = number()?,
                "amplitude" => cfg.amplitude = number()?,
                "modes" => cfg.modes = count()?,
                "rng_seed" => cfg.rng_seed = value.parse().map_err(|_| bad("integer"))?,
                "scheme" => {
                    cfg.scheme = SpatialScheme::from_name(value).ok_or_else(|| bad("scheme"))?
                }
                "floor" => cfg.floor = number()?,
                "snapshot_every" => cfg.snapshot_every = count()?,
                "reality" => cfg.reality = flag()?,
                "drift_tol" => cfg.drift_tol = number()?,
                "nu01" => cfg.nu01 = rational()?,
                "nu10" => cfg.nu10 = rational()?,
                "b10" => cfg.b10 = rational()?,
                "c10" => cfg.c10 = rational()?,
                "seed_k" => cfg.seed_k = number()?,
                "seed_m" => cfg.seed_m = number()?,
                "seed_c" => cfg.seed_c = number()?,
                "tau" => cfg.tau = number()?,
                "window_x0" => cfg.window_x0 = number()?,
                "window_x1" => cfg.window_x1 = number()?,
                "window_t0" => cfg.window_t0 = number()?,
                "window_t1" => cfg.window_t1 = number()?,
                "window_nx" => cfg.window_nx = count()?,
                "window_nt" => cfg.window_nt = count()?,
                "residual_tol" => cfg.residual_tol = number()?,
                "inject_typo" => cfg.inject_typo = flag()?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.into(),
                    })
                }
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(parse_exact("1e-3"), Some(r(1, 1000)));
        assert_eq!(parse_exact("0.25"), Some(r(1, 4)));
        assert_eq!(parse_exact("-3/6"), Some(r(-1, 2)));
        assert_eq!(parse_exact("2.5E2"), Some(r(250, 1)));
        assert_eq!(parse_exact("abc"), None);
        let two_pi: Number = "2pi".parse().unwrap();
        assert!(two_pi.times_pi && two_pi.exact().is_none());
        assert!((two_pi.to_f64() - std::f64::consts::TAU).abs() < 1e-15);
        let half_pi: Number = "1/2*pi".parse().unwrap();
        assert_eq!(half_pi.value, r(1, 2));
    }

    #[test]
    fn parses_entries_and_comments() {
        let cfg: RunConfig = "# grid\nn = 64\ndt = 5e-4  # halved\nnu10 = 3/2\nreality = true\n"
            .parse()
            .unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.dt.value, r(1, 2000));
        assert_eq!(cfg.nu10, r(3, 2));
        assert!(cfg.reality);
        assert_eq!(cfg.t_end, Number::rational(r(1, 1)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            "speed = 3".parse::<RunConfig>(),
            Err(ConfigError::UnknownKey { line: 1, key: "speed".into() })
        );
        assert!(matches!(
            "n = 3\nn = 4".parse::<RunConfig>(),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            "b10 = pi".parse::<RunConfig>(),
            Err(ConfigError::BadValue { .. })
        ));
        assert_eq!(
            "dt 3".parse::<RunConfig>(),
            Err(ConfigError::MissingEquals { line: 1 })
        );
    }
}
