//! Seeded generators for the Circle, Exp, Moon and Xor benchmark sets.
//!
//! These reconstruct the benchmark scatter plots; the generative constants
//! are collected in [`GeneratorConfig`] so they can be re-tuned. Every
//! generator is rejection-sampled on `[−1, 1]²` until both classes hold
//! `n/2` points.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::svm::LabeledDataset;

pub const MAX_DRAWS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    Circle,
    Exp,
    Moon,
    Xor,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 4] = [DatasetKind::Circle, DatasetKind::Exp, DatasetKind::Moon, DatasetKind::Xor];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Circle => "circle",
            DatasetKind::Exp => "exp",
            DatasetKind::Moon => "moon",
            DatasetKind::Xor => "xor",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(DatasetKind::Circle),
            "exp" => Ok(DatasetKind::Exp),
            "moon" => Ok(DatasetKind::Moon),
            "xor" => Ok(DatasetKind::Xor),
            other => Err(Error::InvalidArgument(format!("unknown dataset {other:?}"))),
        }
    }
}

/// Every constant the generators use.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    /// Circle: `+1` inside radius `circle_radius`.
    pub circle_radius: f64,
    /// Circle: points with `|‖x‖ − r| ≤ circle_margin` are rejected.
    pub circle_margin: f64,
    /// Exp: boundary `x₂ = exp_scale · exp(exp_rate · x₁) + exp_shift`; `+1` above.
    pub exp_scale: f64,
    pub exp_rate: f64,
    pub exp_shift: f64,
    pub exp_margin: f64,
    /// Moon: mean radius and radial width of each half-annulus.
    pub moon_radius: f64,
    pub moon_width: f64,
    /// Moon: the `+1` arc (upper, angles in `[0, π]`) is centred at
    /// `(−moon_dx, −moon_dy/2)`, the `−1` arc (lower) at `(+moon_dx, +moon_dy/2)`.
    pub moon_dx: f64,
    pub moon_dy: f64,
    /// Xor: label `sign(x₁ x₂)`, rejecting `|x₁ x₂| ≤ xor_margin`.
    pub xor_margin: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            circle_radius: 0.6,
            circle_margin: 0.05,
            exp_scale: 0.4,
            exp_rate: 2.0,
            exp_shift: -0.6,
            exp_margin: 0.05,
            moon_radius: 0.7,
            moon_width: 0.25,
            moon_dx: 0.35,
            moon_dy: 0.35,
            xor_margin: 0.05,
        }
    }
}

fn uniform_square(rng: &mut ChaCha8Rng) -> [f64; 2] {
    [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)]
}

fn in_domain(p: [f64; 2]) -> bool {
    p.iter().all(|v| (-1.0..=1.0).contains(v))
}

/// One candidate draw: `Some((point, label))` if it passes the margin rule.
fn draw(kind: DatasetKind, cfg: &GeneratorConfig, rng: &mut ChaCha8Rng, want: i8) -> Option<([f64; 2], i8)> {
    match kind {
        DatasetKind::Circle => {
            let p = uniform_square(rng);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if (r - cfg.circle_radius).abs() <= cfg.circle_margin {
                return None;
            }
            Some((p, if r < cfg.circle_radius { 1 } else { -1 }))
        }
        DatasetKind::Exp => {
            let p = uniform_square(rng);
            let boundary = cfg.exp_scale * (cfg.exp_rate * p[0]).exp() + cfg.exp_shift;
            let d = p[1] - boundary;
            if d.abs() <= cfg.exp_margin {
                return None;
            }
            Some((p, if d > 0.0 { 1 } else { -1 }))
        }
        DatasetKind::Moon => {
            let theta = rng.gen_range(0.0..=std::f64::consts::PI);
            let r = cfg.moon_radius + cfg.moon_width * (rng.gen::<f64>() - 0.5);
            let p = if want == 1 {
                [-cfg.moon_dx + r * theta.cos(), -cfg.moon_dy / 2.0 + r * theta.sin()]
            } else {
                [cfg.moon_dx - r * theta.cos(), cfg.moon_dy / 2.0 - r * theta.sin()]
            };
            in_domain(p).then_some((p, want))
        }
        DatasetKind::Xor => {
            let p = uniform_square(rng);
            let prod = p[0] * p[1];
            if prod.abs() <= cfg.xor_margin {
                return None;
            }
            Some((p, if prod > 0.0 { 1 } else { -1 }))
        }
    }
}

/// Balanced dataset of `n_points` points (`n/2` per class), interleaved
/// `+1, −1, +1, …` in emission order.
pub fn generate_with<T: Scalar>(
    kind: DatasetKind,
    n_points: usize,
    seed: u64,
    cfg: &GeneratorConfig,
) -> Result<LabeledDataset<T>> {
    if !n_points.is_multiple_of(2) {
        return Err(Error::OddPointCount);
    }
    if n_points == 0 {
        return Err(Error::InvalidArgument("n_points must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    let mut labels = Vec::with_capacity(n_points);
    let mut draws = 0usize;
    for k in 0..n_points {
        let want: i8 = if k % 2 == 0 { 1 } else { -1 };
        loop {
            draws += 1;
            if draws > MAX_DRAWS {
                return Err(Error::SamplingExhausted(MAX_DRAWS));
            }
            if let Some((p, y)) = draw(kind, cfg, &mut rng, want) {
                if y == want {
                    points.push([T::lit(p[0]), T::lit(p[1])]);
                    labels.push(y);
                    break;
                }
            }
        }
    }
    LabeledDataset::new(points, labels)
}

pub fn generate<T: Scalar>(kind: DatasetKind, n_points: usize, seed: u64) -> Result<LabeledDataset<T>> {
    generate_with(kind, n_points, seed, &GeneratorConfig::default())
}

/// `x1,x2,label` header plus one point per line.
pub fn to_csv<T: Scalar>(ds: &LabeledDataset<T>) -> String {
    let mut out = String::from("x1,x2,label\n");
    for (p, y) in ds.points().iter().zip(ds.labels()) {
        out.push_str(&format!("{},{},{y}\n", p[0], p[1]));
    }
    out
}

pub fn from_csv<T: Scalar>(text: &str) -> Result<LabeledDataset<T>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim().replace(' ', "") == "x1,x2,label" => {}
        Some((no, _)) => {
            return Err(Error::Parse {
                line: no + 1,
                message: "expected header \"x1,x2,label\"".into(),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty dataset file".into(),
            })
        }
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (no, line) in lines {
        let bad = |m: &str| Error::Parse {
            line: no + 1,
            message: m.to_string(),
        };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let x1: f64 = f[0].parse().map_err(|_| bad("bad x1"))?;
        let x2: f64 = f[1].parse().map_err(|_| bad("bad x2"))?;
        if !(x1.is_finite() && x2.is_finite()) {
            return Err(bad("non-finite coordinate"));
        }
        let y: i8 = match f[2] {
            "1" | "+1" => 1,
            "-1" => -1,
            _ => return Err(bad("label must be 1 or -1")),
        };
        points.push([T::lit(x1), T::lit(x2)]);
        labels.push(y);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "dataset has no points".into(),
        });
    }
    LabeledDataset::new(points, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(kind: DatasetKind, seed: u64) -> LabeledDataset<f64> {
        generate(kind, 100, seed).unwrap()
    }

    #[test]
    fn balanced_and_in_domain() {
        for kind in DatasetKind::ALL {
            let ds = gen(kind, 7);
            assert_eq!(ds.len(), 100);
            assert_eq!(ds.labels().iter().filter(|&&l| l == 1).count(), 50, "{kind}");
            assert!(ds.points().iter().all(|&p| in_domain(p)), "{kind}");
        }
    }

    #[test]
    fn margin_rules_hold() {
        let cfg = GeneratorConfig::default();
        for (p, &y) in gen(DatasetKind::Circle, 1).points().iter().zip(gen(DatasetKind::Circle, 1).labels()) {
            let r = p[0].hypot(p[1]);
            assert!((r - cfg.circle_radius).abs() > cfg.circle_margin);
            assert_eq!(y == 1, r < cfg.circle_radius);
        }
        let xor = gen(DatasetKind::Xor, 2);
        for (p, &y) in xor.points().iter().zip(xor.labels()) {
            assert_eq!(y, if p[0] * p[1] > 0.0 { 1 } else { -1 });
            assert!((p[0] * p[1]).abs() > cfg.xor_margin);
        }
        let exp = gen(DatasetKind::Exp, 3);
        for (p, &y) in exp.points().iter().zip(exp.labels()) {
            let d = p[1] - (0.4 * (2.0 * p[0]).exp() - 0.6);
            assert!(d.abs() > cfg.exp_margin);
            assert_eq!(y == 1, d > 0.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in DatasetKind::ALL {
            assert_eq!(gen(kind, 11), gen(kind, 11));
            assert_ne!(gen(kind, 11), gen(kind, 12));
        }
    }

    #[test]
    fn odd_count_rejected() {
        assert_eq!(generate::<f64>(DatasetKind::Xor, 3, 0).unwrap_err(), Error::OddPointCount);
        assert!(generate::<f64>(DatasetKind::Xor, 0, 0).is_err());
    }

    #[test]
    fn exhausted_sampling_is_reported() {
        let cfg = GeneratorConfig {
            circle_margin: 10.0,
            ..GeneratorConfig::default()
        };
        assert_eq!(
            generate_with::<f64>(DatasetKind::Circle, 2, 0, &cfg).unwrap_err(),
            Error::SamplingExhausted(MAX_DRAWS)
        );
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let ds = gen(DatasetKind::Moon, 5);
        let text = to_csv(&ds);
        assert_eq!(text.lines().count(), 101);
        assert_eq!(from_csv::<f64>(&text).unwrap(), ds);
        assert!(from_csv::<f64>("").is_err());
        assert!(from_csv::<f64>("x1,x2,label\n").is_err());
        assert!(from_csv::<f64>("a,b,c\n1,2,1\n").is_err());
        assert!(from_csv::<f64>("x1,x2,label\n0.1,0.2,3\n").is_err());
    }

    #[test]
    fn kind_parsing() {
        for kind in DatasetKind::ALL {
            assert_eq!(kind.as_str().parse::<DatasetKind>().unwrap(), kind);
        }
        assert!("spiral".parse::<DatasetKind>().is_err());
    }
}
