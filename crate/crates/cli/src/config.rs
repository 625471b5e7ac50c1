use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Declared type of an experiment parameter.
#[derive(Clone, Copy, Debug)]
pub enum Kind {
    UInt,
    Float,
    Text,
    UIntList,
    FloatList,
    Choice(&'static [&'static str]),
}

impl Kind {
    pub fn label(&self) -> String {
        match self {
            Kind::UInt => "uint".into(),
            Kind::Float => "float".into(),
            Kind::Text => "string".into(),
            Kind::UIntList => "uint list".into(),
            Kind::FloatList => "float list".into(),
            Kind::Choice(opts) => opts.join("|"),
        }
    }

    /// Checks `v` against the kind, promoting a scalar to a one-element list.
    fn coerce(&self, name: &str, v: Value) -> Result<Value, CliError> {
        let bad = || CliError::ConfigInvalid(format!("parameter {name}: expected {}, got {v}", self.label()));
        let uint = |x: &Value| x.as_u64().map(Value::from);
        let float = |x: &Value| x.as_f64().filter(|f| f.is_finite()).map(Value::from);
        let list = |f: &dyn Fn(&Value) -> Option<Value>| -> Option<Value> {
            match &v {
                Value::Array(items) => items.iter().map(f).collect::<Option<Vec<_>>>().map(Value::Array),
                other => f(other).map(|x| Value::Array(vec![x])),
            }
        };
        match self {
            Kind::UInt => uint(&v).ok_or_else(bad),
            Kind::Float => float(&v).ok_or_else(bad),
            Kind::Text => v.as_str().map(|s| Value::String(s.into())).ok_or_else(bad),
            Kind::UIntList => list(&uint).ok_or_else(bad),
            Kind::FloatList => list(&float).ok_or_else(bad),
            Kind::Choice(opts) => match v.as_str() {
                Some(s) if opts.contains(&s) => Ok(Value::String(s.into())),
                _ => Err(bad()),
            },
        }
    }
}

pub struct ParamDef {
    pub name: &'static str,
    pub kind: Kind,
    /// Default as a JSON literal.
    pub default: &'static str,
    pub help: &'static str,
}

/// Parameters after defaults and type checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn resolve(schema: &[ParamDef], given: &BTreeMap<String, Value>) -> Result<Self, CliError> {
        if let Some(unknown) = given.keys().find(|k| !schema.iter().any(|p| p.name == k.as_str())) {
            return Err(CliError::ConfigInvalid(format!("unknown parameter {unknown}")));
        }
        let mut out = BTreeMap::new();
        for p in schema {
            let raw = match given.get(p.name) {
                Some(v) => v.clone(),
                None => serde_json::from_str(p.default).expect("registry defaults are valid JSON"),
            };
            out.insert(p.name.to_string(), p.kind.coerce(p.name, raw)?);
        }
        Ok(Self(out))
    }

    fn get(&self, key: &str) -> &Value {
        self.0.get(key).unwrap_or_else(|| panic!("parameter {key} missing from the schema"))
    }

    pub fn usize(&self, key: &str) -> usize {
        self.get(key).as_u64().expect("validated uint") as usize
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.get(key).as_f64().expect("validated float")
    }

    pub fn str(&self, key: &str) -> &str {
        self.get(key).as_str().expect("validated string")
    }

    pub fn usize_list(&self, key: &str) -> Vec<usize> {
        self.get(key).as_array().expect("validated list").iter().map(|v| v.as_u64().unwrap() as usize).collect()
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        self.get(key).as_array().expect("validated list").iter().map(|v| v.as_f64().unwrap()).collect()
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))
    }
}

/// `key=value` with `value` read as JSON, or as a bare string otherwise.
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::ConfigInvalid(format!("expected key=value, got {s}")))?;
    let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), v))
}
