// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};

use super::output::write_bundle;
use super::run::run;
use super::Scenario;

/// One `key=v1,v2,…` axis. Keys are dotted paths into the scenario file,
/// e.g. `bath.temperature` or `chain.hopping`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParam {
    pub key: String,
    pub values: Vec<toml::Value>,
}

pub fn parse_param(text: &str) -> Result<SweepParam> {
    let (key, values) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("sweep parameter '{text}' is not key=v1,v2,...")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("bad sweep key '{key}'")));
    }
    let values: Vec<toml::Value> = values.split(',').map(|v| parse_value(v.trim())).collect();
    if values
        .iter()
        .any(|v| matches!(v, toml::Value::String(s) if s.is_empty()))
    {
        return Err(Error::Config(format!("empty value in sweep parameter '{text}'")));
    }
    Ok(SweepParam {
        key: key.to_string(),
        values,
    })
}

fn parse_value(text: &str) -> toml::Value {
    #[derive(serde::Deserialize)]
    struct Wrap {
        v: toml::Value,
    }
    toml::from_str::<Wrap>(&format!("v = {text}"))
        .map(|w| w.v)
        .unwrap_or_else(|_| toml::Value::String(text.to_string()))
}

fn display(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("validated non-empty key");
    let mut node = root;
    for p in parts {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{key}': '{p}' is not inside a table")))?;
        node = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("'{key}' does not address a table entry")))?;
    // Integers are accepted where floats are expected.
    let value = match (table.get(last), value) {
        (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    table.insert(last.to_string(), value);
    Ok(())
}

/// Apply `assignments` to `base`, re-validating the result.
pub fn apply(base: &Scenario, assignments: &[(String, toml::Value)]) -> Result<Scenario> {
    let mut value = toml::Value::try_from(base).map_err(|e| Error::Config(e.to_string()))?;
    for (k, v) in assignments {
        set_path(&mut value, k, v.clone())?;
    }
    let text = toml::to_string(&value).map_err(|e| Error::Config(e.to_string()))?;
    Scenario::from_toml_str(&text)
}

/// Outcome of one point of the sweep.
#[derive(Debug)]
pub struct SweepRun {
    pub index: usize,
    pub assignments: Vec<(String, String)>,
    pub dir: PathBuf,
    pub result: Result<super::Summary>,
}

/// Run the Cartesian product of `params` over `base`, `jobs` at a time.
/// Every point gets its own directory `out/run_XXX`; `out/index.csv` maps
/// directories to parameter values.
pub fn sweep(base: &Scenario, params: &[SweepParam], out: &Path, jobs: usize) -> Result<Vec<SweepRun>> {
    if params.is_empty() {
        return Err(Error::Config("sweep needs at least one --param".into()));
    }
    let mut points: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for p in params {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                p.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push((p.key.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    // Resolve every configuration before starting any run.
    let scenarios: Vec<Scenario> = points.iter().map(|a| apply(base, a)).collect::<Result<_>>()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<SweepRun>>> = Mutex::new((0..scenarios.len()).map(|_| None).collect());
    let workers = jobs.clamp(1, scenarios.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(s) = scenarios.get(i) else { break };
                let dir = out.join(format!("run_{i:03}"));
                let result = run(s).and_then(|r| write_bundle(&r, &dir).map(|_| r.summary));
                let assignments = points[i].iter().map(|(k, v)| (k.clone(), display(v))).collect();
                results.lock().expect("no worker panicked")[i] = Some(SweepRun {
                    index: i,
                    assignments,
                    dir,
                    result,
                });
            });
        }
    });
    let runs: Vec<SweepRun> = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every index was claimed"))
        .collect();

    let mut index = String::from("index,dir");
    for p in params {
        let _ = write!(index, ",{}", p.key);
    }
    index.push_str(",status,equilibrated,final_time,max_fd_residual\n");
    for r in &runs {
        let _ = write!(index, "{},run_{:03}", r.index, r.index);
        for (_, v) in &r.assignments {
            let _ = write!(index, ",{v}");
        }
        match &r.result {
            Ok(s) => {
                let _ = writeln!(
                    index,
                    ",ok,{},{:e},{:e}",
                    s.equilibrated, s.final_time, s.max_fd_residual
                );
            }
            Err(e) => {
                let _ = writeln!(index, ",error {},,,", e.exit_code());
            }
        }
    }
    let path = out.join("index.csv");
    std::fs::write(&path, index).map_err(|e| Error::io(&path, e))?;
    Ok(runs)
}
