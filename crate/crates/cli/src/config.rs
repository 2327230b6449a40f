//! Experiment configuration: a flat key-value document.
//!
//! The format mirrors the instance files: a `mdlconfig v1` header, then
//! `key = value` lines with `#` comments. The instance is either a path
//! (`instance = path/to/file`) or an inline spec given through prefixed keys
//! (`instance.family = coins`, `instance.eta = 4`, ...), never both.

use std::collections::BTreeMap;
use std::path::PathBuf;

use mdlearn::instances::InstanceSpec;
use mdlearn::{Error, Result};

pub const CONFIG_HEADER: &str = "mdlconfig v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Mdl,
    Gdro,
    Rmdl,
    BatchErm,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mdl => "mdl",
            Algorithm::Gdro => "gdro",
            Algorithm::Rmdl => "rmdl",
            Algorithm::BatchErm => "batch-erm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mdl" => Ok(Algorithm::Mdl),
            "gdro" => Ok(Algorithm::Gdro),
            "rmdl" => Ok(Algorithm::Rmdl),
            "batch-erm" => Ok(Algorithm::BatchErm),
            other => Err(Error::Config {
                field: "algorithm".into(),
                message: format!("unknown algorithm `{other}`, expected mdl, gdro, rmdl, or batch-erm"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config {
                field: "format".into(),
                message: format!("unknown format `{other}`, expected csv or json"),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub enum InstanceSource {
    File(PathBuf),
    Spec(InstanceSpec),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub algorithm: Algorithm,
    pub eps: f64,
    pub delta: f64,
    pub t_scale: f64,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSource, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            instance,
            algorithm,
            eps: 0.1,
            delta: 0.1,
            t_scale: 1.0,
            seeds: vec![0],
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config { field: "seeds".into(), message: "at least one seed is required".into() });
        }
        check_unit_open("eps", self.eps)?;
        check_unit_open("delta", self.delta)?;
        if !(self.t_scale > 0.0) || !self.t_scale.is_finite() {
            return Err(Error::Config {
                field: "t_scale".into(),
                message: format!("must be positive and finite, got {}", self.t_scale),
            });
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some(CONFIG_HEADER) => {}
            other => {
                return Err(Error::Config {
                    field: "header".into(),
                    message: format!("expected `{CONFIG_HEADER}`, got {:?}", other.unwrap_or("")),
                })
            }
        }
        let mut fields = BTreeMap::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    field: line.to_string(),
                    message: "expected `key = value`".into(),
                });
            };
            let key = key.trim().to_string();
            if fields.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config { field: key, message: "duplicate field".into() });
            }
        }

        let spec_keys: Vec<String> =
            fields.keys().filter(|k| k.starts_with("instance.")).cloned().collect();
        let instance = match (fields.remove("instance"), spec_keys.is_empty()) {
            (Some(path), true) => InstanceSource::File(PathBuf::from(path)),
            (Some(_), false) => {
                return Err(Error::Config {
                    field: "instance".into(),
                    message: "give either `instance = path` or inline `instance.*` fields, not both".into(),
                })
            }
            (None, false) => {
                let mut doc = format!("{}\n", mdlearn::instances::SPEC_HEADER);
                for key in &spec_keys {
                    let value = fields.remove(key).unwrap();
                    doc.push_str(&format!("{} = {}\n", &key["instance.".len()..], value));
                }
                let spec = InstanceSpec::parse(&doc).map_err(|e| Error::Config {
                    field: "instance".into(),
                    message: e.to_string(),
                })?;
                InstanceSource::Spec(spec)
            }
            (None, true) => {
                return Err(Error::Config {
                    field: "instance".into(),
                    message: "an instance path or inline `instance.*` spec is required".into(),
                })
            }
        };

        let algorithm = match fields.remove("algorithm") {
            Some(s) => Algorithm::parse(&s)?,
            None => {
                return Err(Error::Config {
                    field: "algorithm".into(),
                    message: "required field is missing".into(),
                })
            }
        };

        let mut config = ExperimentConfig::new(instance, algorithm);
        if let Some(s) = fields.remove("eps") {
            config.eps = parse_f64("eps", &s)?;
        }
        if let Some(s) = fields.remove("delta") {
            config.delta = parse_f64("delta", &s)?;
        }
        if let Some(s) = fields.remove("t_scale") {
            config.t_scale = parse_f64("t_scale", &s)?;
        }
        if let Some(s) = fields.remove("seeds") {
            config.seeds = parse_seeds(&s)?;
        }
        if let Some(s) = fields.remove("out") {
            config.out = Some(PathBuf::from(s));
        }
        if let Some(s) = fields.remove("format") {
            config.format = OutputFormat::parse(&s)?;
        }
        if let Some((key, _)) = fields.into_iter().next() {
            return Err(Error::Config { field: key, message: "unknown field".into() });
        }
        config.validate()?;
        Ok(config)
    }
}

fn check_unit_open(field: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::Config {
            field: field.into(),
            message: format!("must lie strictly inside (0, 1), got {value}"),
        });
    }
    Ok(())
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config {
        field: field.into(),
        message: format!("expected a number, got `{s}`"),
    })
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|part| {
            part.trim().parse().map_err(|_| Error::Config {
                field: "seeds".into(),
                message: format!("expected comma-separated integers, got `{part}`"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_inline_document() {
        let text = "mdlconfig v1\n\
                    # smoke config\n\
                    algorithm = mdl\n\
                    eps = 0.2\n\
                    delta = 0.05\n\
                    t_scale = 0.5\n\
                    seeds = 3, 5, 8\n\
                    format = json\n\
                    out = runs.json\n\
                    instance.family = random-agnostic\n\
                    instance.class_size = 6\n\
                    instance.n = 3\n\
                    instance.support_size = 4\n\
                    instance.seed = 9\n";
        let config = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(config.algorithm, Algorithm::Mdl);
        assert_eq!(config.eps, 0.2);
        assert_eq!(config.seeds, vec![3, 5, 8]);
        assert_eq!(config.format, OutputFormat::Json);
        let InstanceSource::Spec(InstanceSpec::RandomAgnostic { class_size, .. }) = config.instance
        else {
            panic!("expected an inline spec");
        };
        assert_eq!(class_size, 6);
    }

    #[test]
    fn file_and_inline_instances_are_mutually_exclusive() {
        let text = "mdlconfig v1\nalgorithm = mdl\ninstance = a.mdl\ninstance.family = coins\n";
        let err = ExperimentConfig::from_text(text).unwrap_err();
        let Error::Config { field, .. } = err else { panic!("{err}") };
        assert_eq!(field, "instance");
    }

    #[test]
    fn bad_fields_name_the_field() {
        let cases = [
            ("mdlconfig v1\nalgorithm = sgd\ninstance = a.mdl\n", "algorithm"),
            ("mdlconfig v1\nalgorithm = mdl\ninstance = a.mdl\neps = 1.5\n", "eps"),
            ("mdlconfig v1\nalgorithm = mdl\ninstance = a.mdl\nseeds = 1,x\n", "seeds"),
            ("mdlconfig v1\nalgorithm = mdl\ninstance = a.mdl\nbudget = 3\n", "budget"),
            ("mdlconfig v1\nalgorithm = mdl\n", "instance"),
            ("wrong header\n", "header"),
        ];
        for (text, expected) in cases {
            let err = ExperimentConfig::from_text(text).unwrap_err();
            let Error::Config { field, .. } = err else { panic!("{err}") };
            assert_eq!(field, expected, "for {text:?}");
        }
    }
}
