use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::{Command, SubcommandOnly, SweepArgs};
use crate::commands::{self, Context};
use crate::error::CliError;
use crate::output::{flatten, Outcome, Table};

/// Largest number of grid points a sweep will run.
pub const MAX_POINTS: usize = 1_000_000;

const GLOBAL_FLAGS: [&str; 7] = ["--json", "--csv", "--units", "--tol", "--grid-n", "--seed", "--out"];

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    /// `param=start:stop:count`
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("sweep must look like param=start:stop:count, got '{spec}'"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let name = name.trim().trim_start_matches("--");
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        if name.is_empty() || parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(Axis { name: name.to_string(), start, stop, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            return self.start;
        }
        if i == self.count - 1 {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
    }
}

/// Total number of points, refusing grids over [`MAX_POINTS`].
pub fn grid_size(axes: &[Axis]) -> Result<usize, CliError> {
    let mut total: usize = 1;
    for a in axes {
        total = total
            .checked_mul(a.count)
            .filter(|t| *t <= MAX_POINTS)
            .ok_or_else(|| CliError::SweepSize(format!("sweep grid exceeds {MAX_POINTS} points")))?;
    }
    Ok(total)
}

/// Axis indices of flat point `k`, last axis fastest.
fn unravel(mut k: usize, axes: &[Axis]) -> Vec<usize> {
    let mut idx = vec![0; axes.len()];
    for (slot, a) in idx.iter_mut().zip(axes).rev() {
        *slot = k % a.count;
        k /= a.count;
    }
    idx
}

struct Point {
    params: Map<String, Value>,
    command: Command,
}

fn build_points(args: &SweepArgs, axes: &[Axis]) -> Result<Vec<Point>, CliError> {
    let sub = &args.command[0];
    if sub == "sweep" {
        return Err(CliError::Usage("sweep cannot be nested".into()));
    }
    for c in &args.command {
        let name = c.split('=').next().unwrap_or(c);
        if GLOBAL_FLAGS.contains(&name) {
            return Err(CliError::Usage(format!("put {name} before the swept subcommand")));
        }
    }
    for a in axes {
        let flag = format!("--{}", a.name);
        if args.command.iter().any(|c| c == &flag || c.starts_with(&format!("{flag}="))) {
            return Err(CliError::Usage(format!("{flag} is both swept and fixed")));
        }
    }
    let total = grid_size(axes)?;
    (0..total)
        .map(|k| {
            let idx = unravel(k, axes);
            let mut argv: Vec<String> = vec!["saext".into()];
            argv.extend(args.command.iter().cloned());
            let mut params = Map::new();
            for (a, &i) in axes.iter().zip(&idx) {
                let v = a.value(i);
                argv.push(format!("--{}", a.name));
                argv.push(format!("{v}"));
                params.insert(a.name.clone(), json!(v));
            }
            let parsed = SubcommandOnly::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Point { params, command: parsed.command })
        })
        .collect()
}

pub fn run(args: &SweepArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let axes = args.sweep.iter().map(|s| Axis::parse(s)).collect::<Result<Vec<_>, _>>()?;
    let points = build_points(args, &axes)?;
    let results: Vec<Result<Outcome, CliError>> = points.par_iter().map(|p| commands::run(&p.command, ctx)).collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut columns: Vec<String> = Vec::new();
    let mut cells: Vec<Vec<(String, String)>> = Vec::new();
    let mut failed = false;
    for (k, (p, r)) in points.iter().zip(results).enumerate() {
        let mut row = Map::new();
        row.insert("index".into(), json!(k));
        row.insert("params".into(), Value::Object(p.params.clone()));
        let mut flat = Vec::new();
        match r {
            Ok(out) => {
                flatten("", &out.json, &mut flat);
                failed |= out.failed;
                row.insert("result".into(), Value::Object(out.json));
            }
            Err(e) => {
                failed = true;
                flat.push(("error".into(), e.code().to_string()));
                row.insert("error".into(), json!({ "code": e.code(), "message": e.message() }));
            }
        }
        for (key, _) in &flat {
            if !columns.contains(key) && !axes.iter().any(|a| &a.name == key) {
                columns.push(key.clone());
            }
        }
        cells.push(flat);
        rows.push(Value::Object(row));
    }

    let mut headers: Vec<String> = vec!["index".into()];
    headers.extend(axes.iter().map(|a| a.name.clone()));
    headers.extend(columns.iter().cloned());
    let mut table = Table::new(&headers);
    for (k, (p, flat)) in points.iter().zip(&cells).enumerate() {
        let mut line = vec![k.to_string()];
        line.extend(axes.iter().map(|a| p.params[&a.name].to_string()));
        for c in &columns {
            line.push(flat.iter().find(|(key, _)| key == c).map(|(_, v)| v.clone()).unwrap_or_default());
        }
        table.push(line);
    }

    let json = json!({
        "command": args.command[0],
        "axes": axes.iter().map(|a| json!({ "name": a.name, "start": a.start, "stop": a.stop, "count": a.count })).collect::<Vec<_>>(),
        "count": rows.len(),
        "rows": rows,
    });
    let Value::Object(json) = json else { unreachable!() };
    Ok(Outcome { json, table, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a = Axis::parse("alpha=-4:-0.25:16").unwrap();
        assert_eq!(a.count, 16);
        assert_eq!(a.value(0), -4.0);
        assert_eq!(a.value(15), -0.25);
        assert_eq!(Axis::parse("k=1:2:1").unwrap().value(0), 1.0);
        assert!(Axis::parse("alpha=1:2").is_err());
        assert!(Axis::parse("=1:2:3").is_err());
    }

    #[test]
    fn size_limit() {
        let big = vec![Axis::parse("a=0:1:1001").unwrap(), Axis::parse("b=0:1:1000").unwrap()];
        assert!(matches!(grid_size(&big), Err(CliError::SweepSize(_))));
        let ok = vec![Axis::parse("a=0:1:1000").unwrap(), Axis::parse("b=0:1:1000").unwrap()];
        assert_eq!(grid_size(&ok).unwrap(), 1_000_000);
        assert_eq!(grid_size(&[Axis::parse("a=0:1:0").unwrap()]).unwrap(), 0);
    }

    #[test]
    fn unravel_order() {
        let axes = vec![Axis::parse("a=0:1:2").unwrap(), Axis::parse("b=0:1:3").unwrap()];
        assert_eq!(unravel(0, &axes), vec![0, 0]);
        assert_eq!(unravel(1, &axes), vec![0, 1]);
        assert_eq!(unravel(3, &axes), vec![1, 0]);
    }
}
