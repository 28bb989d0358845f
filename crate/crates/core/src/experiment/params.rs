//! Experiment parameters: scalars, lists, complex pairs and range strings
//! such as `"3..8"` or `"0.1..0.9 step 0.1"`.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::series::C64;

pub struct Params<'a> {
    experiment: &'a str,
    map: &'a Map<String, Value>,
}

fn bad(experiment: &str, name: &str, what: &str) -> Error {
    Error::Config(format!("{experiment}: parameter `{name}` {what}"))
}

fn parse_range(s: &str) -> Option<Vec<f64>> {
    let (span, step) = match s.split_once("step") {
        Some((span, step)) => (span.trim(), Some(step.trim().parse::<f64>().ok()?)),
        None => (s.trim(), None),
    };
    let (a, b) = span.split_once("..")?;
    let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    let step = step.unwrap_or(1.0);
    if !(step > 0.0) || b < a {
        return None;
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Some((0..count).map(|i| a + i as f64 * step).collect())
}

impl<'a> Params<'a> {
    /// Fails on names outside `allowed`.
    pub fn new(experiment: &'a str, map: &'a Map<String, Value>, allowed: &[&str]) -> Result<Self> {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "{experiment}: unknown parameter `{key}` (expected one of {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(Self { experiment, map })
    }

    fn err(&self, name: &str, what: &str) -> Error {
        bad(self.experiment, name, what)
    }

    pub fn floats(&self, name: &str, default: &[f64]) -> Result<Vec<f64>> {
        let Some(v) = self.map.get(name) else {
            return Ok(default.to_vec());
        };
        let out = match v {
            Value::Number(n) => vec![n.as_f64().ok_or_else(|| self.err(name, "is not a number"))?],
            Value::String(s) => parse_range(s).ok_or_else(|| self.err(name, "is not a range `a..b [step s]`"))?,
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| self.err(name, "must contain numbers")))
                .collect::<Result<_>>()?,
            _ => return Err(self.err(name, "must be a number, list or range")),
        };
        if out.is_empty() {
            return Err(self.err(name, "is empty"));
        }
        Ok(out)
    }

    pub fn float(&self, name: &str, default: f64) -> Result<f64> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| self.err(name, "is not a number")),
        }
    }

    pub fn ints(&self, name: &str, default: &[i64]) -> Result<Vec<i64>> {
        if !self.map.contains_key(name) {
            return Ok(default.to_vec());
        }
        self.floats(name, &[])?
            .into_iter()
            .map(|x| {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    Ok(x as i64)
                } else {
                    Err(self.err(name, "must contain integers"))
                }
            })
            .collect()
    }

    pub fn int(&self, name: &str, default: i64) -> Result<i64> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => v.as_i64().ok_or_else(|| self.err(name, "is not an integer")),
        }
    }

    /// Positive integer.
    pub fn count(&self, name: &str, default: usize) -> Result<usize> {
        let v = self.int(name, default as i64)?;
        if v < 1 {
            return Err(self.err(name, "must be positive"));
        }
        Ok(v as usize)
    }

    fn complex_value(&self, name: &str, v: &Value) -> Result<C64> {
        match v {
            Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(self.err(name, "has a malformed [re, im] pair")),
            },
            _ => Err(self.err(name, "must hold numbers or [re, im] pairs")),
        }
    }

    /// List whose entries are reals or `[re, im]` pairs.
    pub fn complexes(&self, name: &str, default: &[C64]) -> Result<Vec<C64>> {
        match self.map.get(name) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items.iter().map(|x| self.complex_value(name, x)).collect(),
            Some(v @ Value::Number(_)) => Ok(vec![self.complex_value(name, v)?]),
            Some(_) => Err(self.err(name, "must be a list of numbers or [re, im] pairs")),
        }
    }

    pub fn complex(&self, name: &str, default: C64) -> Result<C64> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => self.complex_value(name, v),
        }
    }

    pub fn string(&self, name: &str, default: &str) -> Result<String> {
        match self.map.get(name) {
            None => Ok(default.into()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(self.err(name, "must be a string")),
        }
    }

    pub fn flag(&self, name: &str, default: bool) -> Result<bool> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| self.err(name, "must be true or false")),
        }
    }
}
