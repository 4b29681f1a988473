//! Family and sequence specifications: the flag mini-language and JSON.
//!
//! Sequences are written either as strings
//!
//! * `poly:p[,offset[,scale]]` for `scale (r + offset)^p` (offset 1, scale 1),
//! * `const:c`,
//! * `geom:b,c` for `b c^r`,
//! * `table:v0,v1,...;tail=<sequence>`,
//!
//! or as JSON objects tagged by `kind`:
//! `{"kind": "polynomial", "p": 3}`, `{"kind": "constant", "c": 2}`,
//! `{"kind": "geometric", "b": 1, "c": 2}`,
//! `{"kind": "table", "values": [1, 2], "tail": ...}`.
//!
//! Families are JSON objects tagged by `family`, see [`parse_family`].

use serde_json::{Map, Value};
use stocomp_core::{GraphFamily, IntraSphere, RadialProfile, Rounding, SequenceSpec};

#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct InputError {
    pub field: String,
    pub message: String,
}

fn err<T>(field: &str, message: impl Into<String>) -> Result<T, InputError> {
    Err(InputError {
        field: field.to_string(),
        message: message.into(),
    })
}

fn number(field: &str, s: &str) -> Result<f64, InputError> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(field, format!("`{s}` is not a finite number")),
    }
}

/// Parses the mini-language; `field` names the flag in diagnostics.
pub fn parse_sequence(field: &str, text: &str) -> Result<SequenceSpec, InputError> {
    let Some((kind, rest)) = text.trim().split_once(':') else {
        return err(field, format!("`{text}` lacks a `kind:` prefix"));
    };
    let args = |n_min: usize, n_max: usize| -> Result<Vec<f64>, InputError> {
        let v = rest
            .split(',')
            .map(|s| number(field, s))
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() < n_min || v.len() > n_max {
            return err(
                field,
                format!(
                    "`{kind}` takes {n_min} to {n_max} arguments, got {}",
                    v.len()
                ),
            );
        }
        Ok(v)
    };
    let seq = match kind.trim() {
        "poly" => {
            let v = args(1, 3)?;
            SequenceSpec::Polynomial {
                power: v[0],
                offset: v.get(1).copied().unwrap_or(1.0),
                scale: v.get(2).copied().unwrap_or(1.0),
                rounding: Rounding::Nearest,
            }
        }
        "const" => SequenceSpec::constant(args(1, 1)?[0]),
        "geom" => {
            let v = args(2, 2)?;
            SequenceSpec::geometric(v[0], v[1])
        }
        "table" => {
            let Some((values, tail)) = rest.split_once(';') else {
                return err(field, "table needs `;tail=<sequence>`");
            };
            let Some(tail) = tail.trim().strip_prefix("tail=") else {
                return err(field, "table tail must be written `tail=<sequence>`");
            };
            let values = if values.trim().is_empty() {
                Vec::new()
            } else {
                values
                    .split(',')
                    .map(|s| number(field, s))
                    .collect::<Result<_, _>>()?
            };
            SequenceSpec::table(values, parse_sequence(field, tail)?)
        }
        other => return err(field, format!("unknown sequence kind `{other}`")),
    };
    seq.validate().or_else(|e| err(field, e.to_string()))?;
    Ok(seq)
}

fn object<'a>(field: &str, v: &'a Value) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .map_or_else(|| err(field, "expected an object"), Ok)
}

fn reject_unknown(
    field: &str,
    map: &Map<String, Value>,
    allowed: &[&str],
) -> Result<(), InputError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return err(
                &format!("{field}.{key}"),
                format!("unknown field; expected one of {}", allowed.join(", ")),
            );
        }
    }
    Ok(())
}

fn get<'a>(field: &str, map: &'a Map<String, Value>, key: &str) -> Result<&'a Value, InputError> {
    map.get(key)
        .map_or_else(|| err(&format!("{field}.{key}"), "missing field"), Ok)
}

fn get_number(field: &str, map: &Map<String, Value>, key: &str) -> Result<f64, InputError> {
    let path = format!("{field}.{key}");
    match get(field, map, key)?.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(&path, "expected a finite number"),
    }
}

fn opt_number(
    field: &str,
    map: &Map<String, Value>,
    key: &str,
    default: f64,
) -> Result<f64, InputError> {
    if map.contains_key(key) {
        get_number(field, map, key)
    } else {
        Ok(default)
    }
}

/// A sequence given as a mini-language string or a `kind`-tagged object.
pub fn sequence_from_json(field: &str, v: &Value) -> Result<SequenceSpec, InputError> {
    if let Some(s) = v.as_str() {
        return parse_sequence(field, s);
    }
    let map = object(field, v)?;
    let kind = match map.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => return err(&format!("{field}.kind"), "missing or not a string"),
    };
    let seq = match kind {
        "constant" => {
            reject_unknown(field, map, &["kind", "c"])?;
            SequenceSpec::constant(get_number(field, map, "c")?)
        }
        "polynomial" => {
            reject_unknown(field, map, &["kind", "p", "offset", "scale", "rounding"])?;
            let rounding = match map.get("rounding").map(|r| r.as_str()) {
                None | Some(Some("nearest")) => Rounding::Nearest,
                Some(Some("floor")) => Rounding::Floor,
                Some(Some("ceil")) => Rounding::Ceil,
                _ => {
                    return err(
                        &format!("{field}.rounding"),
                        "expected \"nearest\", \"floor\" or \"ceil\"",
                    )
                }
            };
            SequenceSpec::Polynomial {
                power: get_number(field, map, "p")?,
                offset: opt_number(field, map, "offset", 1.0)?,
                scale: opt_number(field, map, "scale", 1.0)?,
                rounding,
            }
        }
        "geometric" => {
            reject_unknown(field, map, &["kind", "b", "c"])?;
            SequenceSpec::geometric(get_number(field, map, "b")?, get_number(field, map, "c")?)
        }
        "table" => {
            reject_unknown(field, map, &["kind", "values", "tail"])?;
            let path = format!("{field}.values");
            let Some(values) = get(field, map, "values")?.as_array() else {
                return err(&path, "expected an array of numbers");
            };
            let values = values
                .iter()
                .enumerate()
                .map(|(i, x)| match x.as_f64() {
                    Some(x) => Ok(x),
                    None => err(&format!("{path}[{i}]"), "expected a number"),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let tail = sequence_from_json(&format!("{field}.tail"), get(field, map, "tail")?)?;
            SequenceSpec::table(values, tail)
        }
        other => {
            return err(
                &format!("{field}.kind"),
                format!("unknown sequence kind `{other}`"),
            )
        }
    };
    seq.validate().or_else(|e| err(field, e.to_string()))?;
    Ok(seq)
}

fn intra_from_json(field: &str, v: Option<&Value>) -> Result<IntraSphere, InputError> {
    match v {
        None => Ok(IntraSphere::None),
        Some(Value::String(s)) if s == "none" => Ok(IntraSphere::None),
        Some(Value::String(s)) if s == "complete" => Ok(IntraSphere::Complete),
        Some(v) => Ok(IntraSphere::Regular(sequence_from_json(field, v)?)),
    }
}

/// Parses a family object:
///
/// * `{"family": "tree", "k": seq}`
/// * `{"family": "decorated-tree", "k": seq, "k_tilde": seq}`
/// * `{"family": "intra-sphere-tree", "k": seq, "intra": "complete" | seq}`
/// * `{"family": "antitree", "S": seq}`
/// * `{"family": "weighted-path", "a": seq}`
/// * `{"family": "custom", "k_plus": seq, "k_minus": seq, "m_zero": seq, "S": seq}`
///
/// `intra` is also accepted on `antitree`; a sequence there means an
/// `m₀(r)`-regular graph on every sphere.
pub fn parse_family(field: &str, v: &Value) -> Result<GraphFamily, InputError> {
    let map = object(field, v)?;
    let name = match map.get("family").and_then(Value::as_str) {
        Some(n) => n,
        None => return err(&format!("{field}.family"), "missing or not a string"),
    };
    let seq = |key: &str| sequence_from_json(&format!("{field}.{key}"), get(field, map, key)?);
    let profile_err = |e: stocomp_core::Error| InputError {
        field: field.to_string(),
        message: e.to_string(),
    };
    let family = match name {
        "tree" => {
            reject_unknown(field, map, &["family", "k"])?;
            GraphFamily::SymmetricTree {
                branching: seq("k")?,
            }
        }
        "decorated-tree" => {
            reject_unknown(field, map, &["family", "k", "k_tilde"])?;
            GraphFamily::DecoratedTree {
                branching: seq("k")?,
                decorations: seq("k_tilde")?,
            }
        }
        "intra-sphere-tree" => {
            reject_unknown(field, map, &["family", "k", "intra"])?;
            let intra = match map.get("intra") {
                None => IntraSphere::Complete,
                v => intra_from_json(&format!("{field}.intra"), v)?,
            };
            GraphFamily::IntraSphereTree {
                branching: seq("k")?,
                intra,
            }
        }
        "antitree" => {
            reject_unknown(field, map, &["family", "S", "intra"])?;
            let intra = intra_from_json(&format!("{field}.intra"), map.get("intra"))?;
            let sphere = seq("S")?;
            match intra {
                IntraSphere::None => GraphFamily::Antitree { sphere },
                intra => GraphFamily::CustomRadial(
                    RadialProfile::antitree_with_intra(sphere, intra).map_err(profile_err)?,
                ),
            }
        }
        "weighted-path" => {
            reject_unknown(field, map, &["family", "a"])?;
            GraphFamily::WeightedPath { weights: seq("a")? }
        }
        "custom" => {
            reject_unknown(field, map, &["family", "k_plus", "k_minus", "m_zero", "S"])?;
            let m_zero = match map.get("m_zero") {
                Some(v) => sequence_from_json(&format!("{field}.m_zero"), v)?,
                None => SequenceSpec::constant(0.0),
            };
            GraphFamily::CustomRadial(
                RadialProfile::custom(seq("k_plus")?, seq("k_minus")?, m_zero, seq("S")?)
                    .map_err(profile_err)?,
            )
        }
        other => {
            return err(
                &format!("{field}.family"),
                format!("unknown family `{other}`"),
            )
        }
    };
    // Surface profile defects at parse time.
    if let Err(e) = family.lower_to_profile() {
        if !matches!(e, stocomp_core::Error::UnsupportedLowering { .. }) {
            return Err(profile_err(e));
        }
    }
    Ok(family)
}
