//! Flag value types shared by flags and JSON config files.
//!
//! Every type parses from text (`FromStr`) and deserializes from either a JSON
//! string or a JSON number, so `"beta": "pi/4"` and `"beta": 0.785` both work.
//! Serialization writes the resolved value in a form that parses back to the
//! same bits.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nonlinear_metrology::exact_moments::OperatingRule;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

fn from_json<'de, D, T>(deserializer: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr<Err = String>,
{
    let text = match Value::deserialize(deserializer)? {
        Value::String(s) => s,
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(","),
        other => return Err(de::Error::custom(format!("unsupported value {other}"))),
    };
    text.parse().map_err(de::Error::custom)
}

fn parse_real(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {text:?}"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {text:?}"))
    }
}

/// Parses a real number or a multiple of pi: `0.3`, `pi`, `-pi/8`, `3pi/4`,
/// `2*pi`, `0.5pi/3`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return parse_real(&t);
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let head = head.trim().trim_end_matches('*').trim();
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => parse_real(h).map_err(|_| format!("bad angle {text:?}"))?,
    };
    let tail = tail.trim();
    let divisor = if tail.is_empty() {
        1.0
    } else {
        let d = tail
            .strip_prefix('/')
            .ok_or_else(|| format!("bad angle {text:?}"))?;
        parse_real(d).map_err(|_| format!("bad angle {text:?}"))?
    };
    if divisor == 0.0 {
        return Err(format!("bad angle {text:?}: division by zero"));
    }
    Ok(coefficient * PI / divisor)
}

/// A finite real number; accepts scientific notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl FromStr for Real {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_real(s).map(Real)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

/// An angle in radians, given as a number or a fraction of pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_angle(s).map(Angle)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

/// A single value, `start:stop` (sampled with `--points`), or `start:stop:step`.
/// Endpoints accept fractions of pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Single(f64),
    Span {
        start: f64,
        stop: f64,
        step: Option<f64>,
    },
}

impl Grid {
    /// The grid with an explicit step; `start:stop` gets `points` samples.
    pub fn resolve(self, points: usize) -> Result<Grid, String> {
        match self {
            Grid::Span {
                start,
                stop,
                step: None,
            } => {
                if points < 2 {
                    return Err("a start:stop range needs --points >= 2".into());
                }
                Ok(Grid::Span {
                    start,
                    stop,
                    step: Some((stop - start) / (points - 1) as f64),
                })
            }
            other => Ok(other),
        }
    }

    /// Points `start + i * step` up to `stop` (inclusive, with a 1e-9 step slack).
    pub fn values(self, points: usize) -> Result<Vec<f64>, String> {
        match self.resolve(points)? {
            Grid::Single(v) => Ok(vec![v]),
            Grid::Span {
                start,
                stop,
                step: Some(step),
            } => {
                if step == 0.0 && start == stop {
                    return Ok(vec![start]);
                }
                if step == 0.0 || (stop - start) / step < 0.0 {
                    return Err(format!(
                        "step {step} does not move from {start} towards {stop}"
                    ));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 10_000_000 {
                    return Err(format!("range has {count} points; refusing more than 1e7"));
                }
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
            Grid::Span { .. } => unreachable!("resolve sets the step"),
        }
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => parse_angle(v).map(Grid::Single),
            [a, b] => Ok(Grid::Span {
                start: parse_angle(a)?,
                stop: parse_angle(b)?,
                step: None,
            }),
            [a, b, c] => Ok(Grid::Span {
                start: parse_angle(a)?,
                stop: parse_angle(b)?,
                step: Some(parse_angle(c)?),
            }),
            _ => Err(format!("bad range {s:?}: expected v, a:b or a:b:step")),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Single(v) => write!(f, "{v:?}"),
            Grid::Span {
                start,
                stop,
                step: None,
            } => write!(f, "{start:?}:{stop:?}"),
            Grid::Span {
                start,
                stop,
                step: Some(step),
            } => write!(f, "{start:?}:{stop:?}:{step:?}"),
        }
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Grid::Single(v) => s.serialize_f64(*v),
            span => s.collect_str(span),
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

/// Comma-separated reals, e.g. single-body eigenvalues `-0.5,0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(parse_angle)
            .collect::<Result<_, _>>()
            .map(RealList)
    }
}

impl Serialize for RealList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

/// Comma-separated `J_lo:J_hi` pairs, e.g. `1e3:1e5,1e5:1e7`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinPairs(pub Vec<(f64, f64)>);

impl FromStr for SpinPairs {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(
                |pair| match pair.split(':').collect::<Vec<_>>().as_slice() {
                    [a, b] => Ok((parse_real(a)?, parse_real(b)?)),
                    _ => Err(format!("bad J pair {pair:?}: expected lo:hi")),
                },
            )
            .collect::<Result<_, _>>()
            .map(SpinPairs)
    }
}

impl fmt::Display for SpinPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.0.iter().map(|(a, b)| format!("{a:?}:{b:?}")).collect();
        f.write_str(&text.join(","))
    }
}

impl Serialize for SpinPairs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpinPairs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

/// Operating-phase rule for scaling exponents: `phi-zero`, `inverse-sqrt-2j`
/// or `scaled-inverse-j:<c>` (`phi = c/J`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rule(pub OperatingRule);

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "phi-zero" => Ok(Rule(OperatingRule::PhiZero)),
            "inverse-sqrt-2j" => Ok(Rule(OperatingRule::InverseSqrt2J)),
            _ => match t.strip_prefix("scaled-inverse-j:") {
                Some(c) => parse_real(c).map(|c| Rule(OperatingRule::ScaledInverseJ(c))),
                None => Err(format!(
                    "unknown rule {s:?}: expected phi-zero, inverse-sqrt-2j or scaled-inverse-j:<c>"
                )),
            },
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            OperatingRule::PhiZero => f.write_str("phi-zero"),
            OperatingRule::InverseSqrt2J => f.write_str("inverse-sqrt-2j"),
            OperatingRule::ScaledInverseJ(c) => write!(f, "scaled-inverse-j:{c:?}"),
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi/8").unwrap(), -PI / 8.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle(" 0.25 ").unwrap(), 0.25);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn grids() {
        let g: Grid = "0.05:2.0:0.05".parse().unwrap();
        let v = g.values(0).unwrap();
        assert_eq!(v.len(), 40);
        assert_eq!(v[9], 0.05 + 9.0 * 0.05);
        let g: Grid = "-pi/8:pi/8".parse().unwrap();
        assert_eq!(g.values(5).unwrap().len(), 5);
        assert!("1:2".parse::<Grid>().unwrap().values(1).is_err());
        assert!("2:1:0.5".parse::<Grid>().unwrap().values(0).is_err());
    }

    #[test]
    fn grid_text_round_trips() {
        let g = "-pi/8:pi/8".parse::<Grid>().unwrap().resolve(801).unwrap();
        let back: Grid = g.to_string().parse().unwrap();
        assert_eq!(g, back);
        assert_eq!(g.values(0).unwrap(), back.values(0).unwrap());
    }

    #[test]
    fn json_accepts_numbers_and_text() {
        let a: Angle = serde_json::from_str("\"pi/2\"").unwrap();
        assert_eq!(a.0, PI / 2.0);
        let r: Real = serde_json::from_str("1e4").unwrap();
        assert_eq!(r.0, 1e4);
        let l: RealList = serde_json::from_str("[-0.5, 0.5]").unwrap();
        assert_eq!(l.0, vec![-0.5, 0.5]);
        let p: SpinPairs = serde_json::from_str("\"1e3:1e5,1e5:1e7\"").unwrap();
        assert_eq!(p.0, vec![(1e3, 1e5), (1e5, 1e7)]);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            "\"1000.0:100000.0,100000.0:10000000.0\""
        );
    }

    #[test]
    fn rules_round_trip() {
        for text in ["phi-zero", "inverse-sqrt-2j", "scaled-inverse-j:0.5"] {
            let r: Rule = text.parse().unwrap();
            assert_eq!(r.to_string(), text);
        }
        assert!("phi-one".parse::<Rule>().is_err());
    }
}
