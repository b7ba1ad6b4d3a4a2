//! On-disk JSON format for instances and menus.
//!
//! Rationals are stored either as exact decimal JSON numbers or as
//! `"num/den"` strings; parsing never goes through floating point, and
//! writing uses plain integers where possible and `"num/den"` otherwise,
//! so read(write(x)) = x exactly.

use crate::model::{Contract, DeterministicMenu, Instance, ModelError, RandomizedMenu};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::One;
use serde_json::{json, Map, Value};
use std::fs;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{locus}: {message}")]
    Field { locus: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn field_err(locus: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Field { locus: locus.into(), message: message.into() }
}

fn value_to_rational(v: &Value, locus: &str) -> Result<Rational, IoError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(field_err(locus, format!("expected rational, found {other}"))),
    };
    parse_rational(&text).map_err(|e| field_err(locus, e.to_string()))
}

fn rational_to_value(x: &Rational) -> Value {
    use num_traits::ToPrimitive;
    if x.denom().is_one() {
        if let Some(i) = x.numer().to_i64() {
            return json!(i);
        }
    }
    Value::String(format_rational(x))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, locus: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| field_err(locus, format!("missing field `{key}`")))
}

fn as_object<'a>(v: &'a Value, locus: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| field_err(locus, "expected object"))
}

fn as_array<'a>(v: &'a Value, locus: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| field_err(locus, "expected array"))
}

fn string_list(v: &Value, locus: &str) -> Result<Vec<String>, IoError> {
    as_array(v, locus)?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| field_err(locus, "expected string"))
        })
        .collect()
}

pub fn parse_instance_json(text: &str) -> Result<Instance, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "instance")?;

    let types = string_list(get(obj, "types", "instance")?, "types")?;
    let actions = string_list(get(obj, "actions", "instance")?, "actions")?;
    let outcomes = string_list(get(obj, "outcomes", "instance")?, "outcomes")?;
    for name in types.iter().chain(&actions) {
        if name.contains('/') {
            return Err(field_err("types/actions", format!("identifier `{name}` may not contain '/'")));
        }
    }

    let mu_obj = as_object(get(obj, "mu", "instance")?, "mu")?;
    let mut mu = Vec::with_capacity(types.len());
    for t in &types {
        let v = mu_obj
            .get(t)
            .ok_or_else(|| field_err("mu", format!("missing type `{t}`")))?;
        mu.push(value_to_rational(v, &format!("mu.{t}"))?);
    }

    let dist_obj = as_object(get(obj, "dist", "instance")?, "dist")?;
    let cost_obj = as_object(get(obj, "cost", "instance")?, "cost")?;
    let mut dist = Vec::with_capacity(types.len());
    let mut cost = Vec::with_capacity(types.len());
    for t in &types {
        let mut rows = Vec::with_capacity(actions.len());
        let mut costs = Vec::with_capacity(actions.len());
        for a in &actions {
            let key = format!("{t}/{a}");
            let row_v = dist_obj
                .get(&key)
                .ok_or_else(|| field_err("dist", format!("missing entry `{key}`")))?;
            let row_locus = format!("dist.{key}");
            let row = as_array(row_v, &row_locus)?;
            if row.len() != outcomes.len() {
                return Err(field_err(&row_locus, format!("expected {} probabilities", outcomes.len())));
            }
            let mut parsed = Vec::with_capacity(row.len());
            for (w, v) in row.iter().enumerate() {
                parsed.push(value_to_rational(v, &format!("{row_locus}[{w}]"))?);
            }
            rows.push(parsed);
            let c_v = cost_obj
                .get(&key)
                .ok_or_else(|| field_err("cost", format!("missing entry `{key}`")))?;
            costs.push(value_to_rational(c_v, &format!("cost.{key}"))?);
        }
        dist.push(rows);
        cost.push(costs);
    }

    let reward_obj = as_object(get(obj, "reward", "instance")?, "reward")?;
    let mut reward = Vec::with_capacity(outcomes.len());
    for w in &outcomes {
        let v = reward_obj
            .get(w)
            .ok_or_else(|| field_err("reward", format!("missing outcome `{w}`")))?;
        reward.push(value_to_rational(v, &format!("reward.{w}"))?);
    }

    Ok(Instance::new(types, actions, outcomes, mu, dist, cost, reward)?)
}

pub fn instance_to_json(instance: &Instance) -> Value {
    let mut mu = Map::new();
    for (t, name) in instance.types().iter().enumerate() {
        mu.insert(name.clone(), rational_to_value(instance.mu(t)));
    }
    let mut dist = Map::new();
    let mut cost = Map::new();
    for (t, tname) in instance.types().iter().enumerate() {
        for (a, aname) in instance.actions().iter().enumerate() {
            let key = format!("{tname}/{aname}");
            let row: Vec<Value> = instance.dist_row(t, a).iter().map(rational_to_value).collect();
            dist.insert(key.clone(), Value::Array(row));
            cost.insert(key, rational_to_value(instance.cost(t, a)));
        }
    }
    let mut reward = Map::new();
    for (w, wname) in instance.outcomes().iter().enumerate() {
        reward.insert(wname.clone(), rational_to_value(instance.reward(w)));
    }
    json!({
        "types": instance.types(),
        "actions": instance.actions(),
        "outcomes": instance.outcomes(),
        "mu": mu,
        "dist": dist,
        "cost": cost,
        "reward": reward,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance_json(&text)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&instance_to_json(instance))?;
    fs::write(path, text + "\n").map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn contract_from_value(v: &Value, m: usize, locus: &str) -> Result<Contract, IoError> {
    let row = as_array(v, locus)?;
    if row.len() != m {
        return Err(field_err(locus, format!("expected {m} payments")));
    }
    let mut pay = Vec::with_capacity(m);
    for (w, x) in row.iter().enumerate() {
        pay.push(value_to_rational(x, &format!("{locus}[{w}]"))?);
    }
    Ok(Contract::new(pay)?)
}

fn contract_to_value(p: &Contract) -> Value {
    Value::Array(p.pay().iter().map(rational_to_value).collect())
}

/// Either kind of menu file, distinguished by the shape of its entries.
#[derive(Debug, Clone)]
pub enum MenuFile {
    Deterministic(DeterministicMenu),
    Randomized(RandomizedMenu),
}

pub fn parse_menu_json(text: &str, instance: &Instance) -> Result<MenuFile, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "menu")?;
    let entries_obj = as_object(get(obj, "entries", "menu")?, "entries")?;
    let m = instance.num_outcomes();

    // Probe the first entry: an array of numbers is a deterministic menu,
    // an array of {pay, weight} objects is a randomized one.
    let randomized = entries_obj
        .values()
        .next()
        .and_then(|v| v.as_array())
        .and_then(|a| a.first())
        .map(|first| first.is_object())
        .unwrap_or(false);

    if randomized {
        let mut entries = Vec::with_capacity(instance.num_types());
        for t in instance.types() {
            let locus = format!("entries.{t}");
            let v = entries_obj
                .get(t)
                .ok_or_else(|| field_err("entries", format!("missing type `{t}`")))?;
            let list = as_array(v, &locus)?;
            let mut support = Vec::with_capacity(list.len());
            for (i, item) in list.iter().enumerate() {
                let item_locus = format!("{locus}[{i}]");
                let item_obj = as_object(item, &item_locus)?;
                let pay = contract_from_value(get(item_obj, "pay", &item_locus)?, m, &item_locus)?;
                let weight = value_to_rational(get(item_obj, "weight", &item_locus)?, &item_locus)?;
                support.push((pay, weight));
            }
            entries.push(support);
        }
        Ok(MenuFile::Randomized(RandomizedMenu::new(entries, instance.types())?))
    } else {
        let mut entries = Vec::with_capacity(instance.num_types());
        for t in instance.types() {
            let v = entries_obj
                .get(t)
                .ok_or_else(|| field_err("entries", format!("missing type `{t}`")))?;
            entries.push(contract_from_value(v, m, &format!("entries.{t}"))?);
        }
        let menu = match obj.get("recommendations") {
            Some(rec_v) => {
                let rec_obj = as_object(rec_v, "recommendations")?;
                let mut recs = Vec::with_capacity(instance.num_types());
                for t in instance.types() {
                    let v = rec_obj
                        .get(t)
                        .ok_or_else(|| field_err("recommendations", format!("missing type `{t}`")))?;
                    let name = v
                        .as_str()
                        .ok_or_else(|| field_err("recommendations", "expected action name"))?;
                    let a = instance
                        .action_index(name)
                        .ok_or_else(|| ModelError::UnknownIdentifier(name.to_string()))?;
                    recs.push(a);
                }
                DeterministicMenu::with_recommendations(entries, recs)?
            }
            None => DeterministicMenu::new(entries),
        };
        Ok(MenuFile::Deterministic(menu))
    }
}

pub fn deterministic_menu_to_json(menu: &DeterministicMenu, instance: &Instance) -> Value {
    let mut entries = Map::new();
    for (t, name) in instance.types().iter().enumerate() {
        entries.insert(name.clone(), contract_to_value(menu.entry(t)));
    }
    let mut root = Map::new();
    root.insert("entries".into(), Value::Object(entries));
    if let Some(recs) = menu.recommendations() {
        let mut rec_map = Map::new();
        for (t, name) in instance.types().iter().enumerate() {
            rec_map.insert(name.clone(), Value::String(instance.actions()[recs[t]].clone()));
        }
        root.insert("recommendations".into(), Value::Object(rec_map));
    }
    Value::Object(root)
}

pub fn randomized_menu_to_json(menu: &RandomizedMenu, instance: &Instance) -> Value {
    let mut entries = Map::new();
    for (t, name) in instance.types().iter().enumerate() {
        let support: Vec<Value> = menu
            .entry(t)
            .iter()
            .map(|(p, w)| {
                json!({
                    "pay": contract_to_value(p),
                    "weight": rational_to_value(w),
                })
            })
            .collect();
        entries.insert(name.clone(), Value::Array(support));
    }
    json!({ "entries": entries })
}

pub fn read_menu(path: impl AsRef<Path>, instance: &Instance) -> Result<MenuFile, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_menu_json(&text, instance)
}

pub fn write_menu_value(value: &Value, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn tiny() -> Instance {
        Instance::new(
            vec!["t0".into(), "t1".into()],
            vec!["a0".into(), "a1".into()],
            vec!["w0".into(), "w1".into()],
            vec![rat(1, 3), rat(2, 3)],
            vec![
                vec![vec![rat(1, 2), rat(1, 2)], vec![rat_int(0), rat_int(1)]],
                vec![vec![rat_int(1), rat_int(0)], vec![rat(1, 4), rat(3, 4)]],
            ],
            vec![vec![rat_int(0), rat(1, 5)], vec![rat_int(0), rat(1, 7)]],
            vec![rat(1, 2), rat_int(1)],
        )
        .unwrap()
    }

    #[test]
    fn instance_round_trip() {
        let inst = tiny();
        let text = serde_json::to_string(&instance_to_json(&inst)).unwrap();
        let back = parse_instance_json(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn accepts_decimal_and_fraction_rationals() {
        let text = r#"{
            "types": ["t"], "actions": ["a"], "outcomes": ["w"],
            "mu": {"t": 1},
            "dist": {"t/a": [1.0]},
            "cost": {"t/a": "0/5"},
            "reward": {"w": 0.25}
        }"#;
        let inst = parse_instance_json(text).unwrap();
        assert_eq!(inst.reward(0), &rat(1, 4));
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let text = r#"{
            "types": ["t"], "actions": ["a"], "outcomes": ["w"],
            "mu": {"t": 1},
            "dist": {"t/a": ["1/0"]},
            "cost": {"t/a": 0},
            "reward": {"w": 1}
        }"#;
        let err = parse_instance_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dist.t/a[0]"), "error should carry the field locus: {msg}");
    }

    #[test]
    fn negative_cost_parses_but_fails_validation() {
        let text = r#"{
            "types": ["t"], "actions": ["a", "b"], "outcomes": ["w"],
            "mu": {"t": 1},
            "dist": {"t/a": [1], "t/b": [1]},
            "cost": {"t/a": 0, "t/b": -0.1},
            "reward": {"w": 1}
        }"#;
        let inst = parse_instance_json(text).unwrap();
        assert!(!inst.validate().is_valid());
    }

    #[test]
    fn file_round_trip_preserves_the_fixture() {
        let fixture = crate::gen::no_maximum_fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture.json");
        write_instance(&fixture, &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), fixture);
    }

    #[test]
    fn menu_round_trips() {
        let inst = tiny();
        let det = DeterministicMenu::with_recommendations(
            vec![
                Contract::new(vec![rat(1, 4), rat_int(0)]).unwrap(),
                Contract::zero(2),
            ],
            vec![1, 0],
        )
        .unwrap();
        let text = serde_json::to_string(&deterministic_menu_to_json(&det, &inst)).unwrap();
        match parse_menu_json(&text, &inst).unwrap() {
            MenuFile::Deterministic(back) => assert_eq!(back, det),
            MenuFile::Randomized(_) => panic!("expected deterministic menu"),
        }

        let rand = RandomizedMenu::new(
            vec![
                vec![
                    (Contract::zero(2), rat(1, 2)),
                    (Contract::new(vec![rat_int(0), rat(5, 3)]).unwrap(), rat(1, 2)),
                ],
                vec![(Contract::zero(2), rat_int(1))],
            ],
            inst.types(),
        )
        .unwrap();
        let text = serde_json::to_string(&randomized_menu_to_json(&rand, &inst)).unwrap();
        match parse_menu_json(&text, &inst).unwrap() {
            MenuFile::Randomized(back) => assert_eq!(back, rand),
            MenuFile::Deterministic(_) => panic!("expected randomized menu"),
        }
    }
}
