//! Key-value model files:
//!
//! ```text
//! kind = icm                      # or ltm
//! steps = 1, 0.2, 0.05, 0         # regular steps (icm only), or
//! breakpoints = (0,1), (0.5,0.4), (1,0)
//! f = 0                           # optional overrides of the derived
//! c = 0.6                         # complexity parameters; all three or
//! q = 0.5                         # none, with optional L
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::complexity::{Derivation, ModelComplexity};
use super::function::{CostFunction, InfluenceFunction};
use super::BuyerModel;
use crate::error::{validation, Error, Result};

pub fn read_model_config(path: &Path) -> Result<BuyerModel> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("model file {}: {e}", path.display()),
        ))
    })?;
    parse_model_config(&text)
}

pub fn parse_model_config(text: &str) -> Result<BuyerModel> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected key = value, got {line:?}"),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        if entries
            .insert(key.clone(), (idx + 1, value.trim().to_string()))
            .is_some()
        {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("duplicate key {key:?}"),
            });
        }
    }

    let known = ["kind", "steps", "breakpoints", "f", "c", "q", "l"];
    if let Some((key, (line, _))) = entries.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        return Err(Error::Parse {
            line: *line,
            message: format!("unknown key {key:?}"),
        });
    }

    let kind = entries
        .get("kind")
        .map(|(_, v)| v.to_ascii_lowercase())
        .ok_or_else(|| validation("model config is missing `kind`"))?;

    let model = match kind.as_str() {
        "icm" => {
            let cost = match (entries.get("steps"), entries.get("breakpoints")) {
                (Some((line, v)), None) => CostFunction::regular_steps(&parse_numbers(v, *line)?)?,
                (None, Some((line, v))) => CostFunction::piecewise_linear(parse_pairs(v, *line)?)?,
                _ => {
                    return Err(validation(
                        "icm model needs exactly one of `steps` or `breakpoints`",
                    ))
                }
            };
            BuyerModel::icm(cost)?
        }
        "ltm" => {
            let Some((line, v)) = entries.get("breakpoints") else {
                return Err(validation("ltm model needs `breakpoints`"));
            };
            if entries.contains_key("steps") {
                return Err(validation("`steps` is only valid for icm models"));
            }
            BuyerModel::ltm(InfluenceFunction::piecewise_linear(parse_pairs(v, *line)?)?)?
        }
        other => return Err(validation(format!("unknown model kind {other:?}"))),
    };

    let scalar = |key: &str| -> Result<Option<f64>> {
        entries
            .get(key)
            .map(|(line, v)| parse_number(v, *line))
            .transpose()
    };
    match (scalar("f")?, scalar("c")?, scalar("q")?) {
        (None, None, None) => {
            if entries.contains_key("l") {
                return Err(validation("`L` override requires `f`, `c` and `q`"));
            }
            Ok(model)
        }
        (Some(f), Some(c), Some(q)) => {
            let l = scalar("l")?.unwrap_or(model.complexity().line_bound);
            let complexity = ModelComplexity::new(l, f, c, q, Derivation::Manual)?;
            Ok(model.with_complexity(complexity))
        }
        _ => Err(validation(
            "complexity overrides need all of `f`, `c` and `q`",
        )),
    }
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {s:?}"),
    })
}

fn parse_numbers(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split(',').map(|tok| parse_number(tok, line)).collect()
}

fn parse_pairs(s: &str, line: usize) -> Result<Vec<(f64, f64)>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = cleaned
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse {
            line,
            message: "breakpoints must look like (x,y), (x,y)".into(),
        })?;
    inner
        .split("),(")
        .map(|pair| {
            let (x, y) = pair.split_once(',').ok_or_else(|| Error::Parse {
                line,
                message: format!("bad pair {pair:?}"),
            })?;
            Ok((parse_number(x, line)?, parse_number(y, line)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;

    #[test]
    fn parses_step_model() {
        let m =
            parse_model_config("kind = icm\nsteps = 1, 0.75, 0.5, 0.25 # four steps\n").unwrap();
        assert!(matches!(m.kind(), ModelKind::Icm(_)));
        assert_eq!(m.accept_probability(0.6), Some(0.5));
    }

    #[test]
    fn parses_breakpoints_and_overrides() {
        let text = "kind = icm\nbreakpoints = (0,1), (1, 0)\nf = 0\nc = 0.5\nq = 0.5\n";
        let m = parse_model_config(text).unwrap();
        assert_eq!(m.complexity().derivation, Derivation::Manual);
        assert_eq!(m.complexity().price, 0.5);

        let ltm = parse_model_config("kind = ltm\nbreakpoints = (0,1),(1,0)").unwrap();
        assert!(matches!(ltm.kind(), ModelKind::Ltm(_)));
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(parse_model_config("steps = 1, 0").is_err());
        assert!(parse_model_config("kind = icm\nsteps = 0.9, 0").is_err());
        assert!(parse_model_config("kind = icm\nsteps = 1, 0\nc = 0.5").is_err());
        assert!(matches!(
            parse_model_config("kind = icm\nsteps = 1, x"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_model_config("kind = icm\nfoo = 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_model_config("kind = ltm\nbreakpoints = (0,0),(1,0)").is_err());
    }

    #[test]
    fn missing_file_names_path() {
        let err = read_model_config(Path::new("/nonexistent/model.cfg")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/model.cfg"));
    }
}
