//! Named parameter maps used to select builtin laws, profiles and initial data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::EosError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
    Table(Vec<Vec<f64>>),
    Text(String),
}

pub type ParamMap = BTreeMap<String, ParamValue>;

pub(crate) fn number(map: &ParamMap, owner: &str, key: &str) -> Result<f64, EosError> {
    match map.get(key) {
        Some(ParamValue::Number(v)) => Ok(*v),
        Some(_) => Err(EosError::InvalidParameter {
            owner: owner.into(),
            key: key.into(),
            reason: "expected a number".into(),
        }),
        None => Err(EosError::MissingParameter {
            owner: owner.into(),
            key: key.into(),
        }),
    }
}

pub(crate) fn number_or(map: &ParamMap, owner: &str, key: &str, default: f64) -> Result<f64, EosError> {
    if map.contains_key(key) {
        number(map, owner, key)
    } else {
        Ok(default)
    }
}

pub(crate) fn positive(map: &ParamMap, owner: &str, key: &str) -> Result<f64, EosError> {
    let v = number(map, owner, key)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(EosError::InvalidParameter {
            owner: owner.into(),
            key: key.into(),
            reason: format!("must be positive, got {v}"),
        })
    }
}

pub(crate) fn table(map: &ParamMap, owner: &str, key: &str) -> Result<Vec<Vec<f64>>, EosError> {
    match map.get(key) {
        Some(ParamValue::Table(t)) => Ok(t.clone()),
        Some(ParamValue::List(l)) if l.is_empty() => Ok(Vec::new()),
        Some(_) => Err(EosError::InvalidParameter {
            owner: owner.into(),
            key: key.into(),
            reason: "expected a list of rows".into(),
        }),
        None => Err(EosError::MissingParameter {
            owner: owner.into(),
            key: key.into(),
        }),
    }
}

pub(crate) fn list(map: &ParamMap, owner: &str, key: &str) -> Result<Vec<f64>, EosError> {
    match map.get(key) {
        Some(ParamValue::List(l)) => Ok(l.clone()),
        Some(ParamValue::Number(v)) => Ok(vec![*v]),
        Some(_) => Err(EosError::InvalidParameter {
            owner: owner.into(),
            key: key.into(),
            reason: "expected a list of numbers".into(),
        }),
        None => Err(EosError::MissingParameter {
            owner: owner.into(),
            key: key.into(),
        }),
    }
}
