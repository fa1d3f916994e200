use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use ctqc::acceptance::{self, CriterionResult};
use ctqc::bounds::{lower_bound_fixed_point, unitary_upper_bound_depolarizing};
use ctqc::channels::{Isometry, QuantumChannel};
use ctqc::contcode::{alpha_lower_bound_check, classical_alpha_check, f_closed_form, five_qubit_code};
use ctqc::decoupling::{decoupling_bound_check, decoupling_experiment, decoupling_suite};
use ctqc::entropy::von_neumann;
use ctqc::lindblad::depolarizing_liouvillian;
use ctqc::{DensityMatrix, Rng};

use crate::table::{Cell, Table};
use crate::{Command, DecouplingArgs, DepolarizingArgs, Family, Format, GridArgs};

pub struct Context {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
}

impl Context {
    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => {
                Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?))
            }
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit(&self, table: &Table, default: Format) -> Result<bool> {
        let mut sink = self.sink()?;
        match self.format.unwrap_or(default) {
            Format::Csv => table.write_csv(&mut sink)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink, &table.to_json())?;
                writeln!(sink)?;
            }
        }
        sink.flush()?;
        Ok(table.all_pass())
    }
}

/// Returns whether every `pass` field came out true.
pub fn run(command: Command, ctx: &Context) -> Result<bool> {
    match command {
        Command::DepolarizingBounds(a) => depolarizing_bounds(&a, ctx),
        Command::FiveQubitContinuous(a) => five_qubit(&a, ctx),
        Command::ClassicalRepetition(a) => classical(&a, ctx),
        Command::DecouplingMc(a) => decoupling(&a, ctx),
        Command::FSurface(a) => f_surface(&a, ctx),
        Command::EntropyChecks => entropy_checks(ctx),
        Command::Selftest => selftest(ctx),
    }
}

fn cells(a: &GridArgs) -> Vec<(f64, f64)> {
    a.t.values().iter().flat_map(|&t| a.r.values().iter().map(move |&r| (t, r))).collect()
}

fn depolarizing_bounds(a: &DepolarizingArgs, ctx: &Context) -> Result<bool> {
    let rho0 = match &a.rho0 {
        Some(p) if p.len() != a.d => bail!("--rho0 has {} entries but --d is {}", p.len(), a.d),
        Some(p) => DensityMatrix::diagonal(p)?,
        None => DensityMatrix::maximally_mixed(a.d),
    };
    let mut columns = vec!["r", "t", "d", "s_rho0", "upper"];
    if a.k_max.is_some() {
        columns.extend(["lower", "k"]);
    }
    let s = von_neumann(&rho0)?;
    let grid: Vec<(f64, f64)> = a.r.values().iter().flat_map(|&r| a.t.values().iter().map(move |&t| (r, t))).collect();
    let rows = grid
        .par_iter()
        .map(|&(r, t)| -> Result<Vec<Cell>> {
            let upper = unitary_upper_bound_depolarizing(r, t, &rho0)?;
            let mut row: Vec<Cell> = vec![r.into(), t.into(), a.d.into(), s.into(), upper.value.into()];
            if let Some(k_max) = a.k_max {
                let l = depolarizing_liouvillian(r, &rho0)?;
                let lower = lower_bound_fixed_point(&l, t, &rho0, k_max, a.c)?;
                row.push(lower.value.into());
                row.push((lower.parameters["k"] as usize).into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&columns);
    rows.into_iter().for_each(|r| table.push(r));
    ctx.emit(&table, Format::Csv)
}

fn five_qubit(a: &GridArgs, ctx: &Context) -> Result<bool> {
    let code = five_qubit_code();
    let noise = QuantumChannel::pauli_depolarizing();
    let rows = cells(a)
        .par_iter()
        .map(|&(t, r)| -> Result<Vec<Cell>> {
            let c = alpha_lower_bound_check(&code, &noise, t, r)?;
            Ok(vec![t.into(), r.into(), c.f_e.into(), c.f_bound.into(), c.pass.into()])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["t", "r", "f_e", "f_bound", "pass"]);
    rows.into_iter().for_each(|r| table.push(r));
    ctx.emit(&table, Format::Csv)
}

fn classical(a: &GridArgs, ctx: &Context) -> Result<bool> {
    let mut table = Table::new(&["t", "r", "tv_distance", "f_bound", "pass"]);
    for (t, r) in cells(a) {
        let c = classical_alpha_check(t, r)?;
        table.push(vec![t.into(), r.into(), c.tv_distance.into(), c.f_bound.into(), c.pass.into()]);
    }
    ctx.emit(&table, Format::Csv)
}

fn f_surface(a: &GridArgs, ctx: &Context) -> Result<bool> {
    let mut table = Table::new(&["t", "r", "f"]);
    for (t, r) in cells(a) {
        table.push(vec![t.into(), r.into(), f_closed_form(t, r).into()]);
    }
    ctx.emit(&table, Format::Csv)
}

struct Instance {
    label: String,
    param: Option<f64>,
    channel: QuantumChannel,
    probe: DensityMatrix,
    encoder: Isometry,
}

fn decoupling(a: &DecouplingArgs, ctx: &Context) -> Result<bool> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let instances: Vec<Instance> = match a.family {
        Family::Suite => decoupling_suite(ctx.seed)?
            .into_iter()
            .map(|i| Instance {
                probe: i.probe_density(),
                label: i.label,
                param: None,
                channel: i.channel,
                encoder: i.encoder,
            })
            .collect(),
        family => {
            let Some(params) = &a.param else { bail!("--param is required for this family") };
            params
                .values()
                .iter()
                .map(|&p| -> Result<Instance> {
                    let (name, channel) = match family {
                        Family::Depolarizing => ("depolarizing", QuantumChannel::qubit_depolarizing(p)?),
                        _ => ("amplitude-damping", QuantumChannel::amplitude_damping(p)?),
                    };
                    Ok(Instance {
                        label: format!("{name}-{p}"),
                        param: Some(p),
                        channel,
                        probe: DensityMatrix::maximally_entangled(2),
                        encoder: Isometry::identity(2),
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let rng = Rng::new(ctx.seed);
    let mut table = Table::new(&["label", "param", "n", "s_env", "mean", "std_err", "min", "max", "rhs", "pass"]);
    let mut runs = Vec::new();
    for inst in &instances {
        let run = decoupling_experiment(&inst.label, &inst.channel, &inst.probe, &inst.encoder, a.n, &rng)?;
        let check = decoupling_bound_check(&run, &inst.probe, &inst.channel, &inst.encoder)?;
        let comp = inst.channel.complementary();
        let s_env = von_neumann(&comp.apply(&DensityMatrix::maximally_mixed(inst.channel.d_in()))?)?;
        table.push(vec![
            inst.label.as_str().into(),
            inst.param.map_or(Cell::Text(String::new()), Cell::Num),
            a.n.into(),
            s_env.into(),
            run.mean.into(),
            run.std_err.into(),
            run.min.into(),
            run.max.into(),
            check.rhs.into(),
            check.pass.into(),
        ]);
        runs.push(json!({ "param": inst.param, "s_env": s_env, "run": run, "check": check }));
    }
    if ctx.format.unwrap_or(Format::Json) == Format::Csv {
        return ctx.emit(&table, Format::Csv);
    }
    let mut sink = ctx.sink()?;
    serde_json::to_writer_pretty(&mut sink, &Value::Array(runs))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(table.all_pass())
}

fn check_rows(table: &mut Table, result: &CriterionResult) {
    for c in &result.checks {
        table.push(vec![
            (result.id as usize).into(),
            result.title.into(),
            c.name.as_str().into(),
            c.value.into(),
            c.relation.into(),
            c.limit.into(),
            c.pass.into(),
        ]);
    }
}

const CHECK_COLUMNS: [&str; 7] = ["criterion", "title", "check", "value", "relation", "limit", "pass"];

fn entropy_checks(ctx: &Context) -> Result<bool> {
    let mut table = Table::new(&CHECK_COLUMNS);
    for id in [7, 8] {
        check_rows(&mut table, &acceptance::run(id, ctx.seed)?);
    }
    ctx.emit(&table, Format::Csv)
}

/// Prints one PASS/FAIL line per criterion; the artifact holds no timings.
fn selftest(ctx: &Context) -> Result<bool> {
    let mut results = Vec::new();
    let mut all = true;
    for id in acceptance::CRITERIA {
        let start = Instant::now();
        let outcome = acceptance::run(id, ctx.seed);
        let elapsed = start.elapsed();
        let budget = acceptance::budget(id);
        let in_time = budget.is_none_or(|b| elapsed <= b);
        match outcome {
            Ok(result) => {
                let pass = result.pass && in_time;
                println!("criterion {id:>2} {}: {}", if pass { "PASS" } else { "FAIL" }, result.title);
                for c in result.failures() {
                    println!("    {}: {:e} {} {:e}", c.name, c.value, c.relation, c.limit);
                }
                if !in_time {
                    println!("    over the time budget of {:?}", budget.unwrap_or_default());
                }
                all &= pass;
                results.push(result);
            }
            Err(e) => {
                println!("criterion {id:>2} FAIL: {} ({e})", acceptance::title(id));
                all = false;
            }
        }
        eprintln!("criterion {id:>2} took {:.3} s", elapsed.as_secs_f64());
    }

    let path = ctx.out.clone().unwrap_or_else(|| PathBuf::from("selftest.json"));
    let mut sink = BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?);
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => {
            let pass = results.iter().all(|r| r.pass) && results.len() == acceptance::CRITERIA.count();
            serde_json::to_writer_pretty(&mut sink, &json!({ "seed": ctx.seed, "pass": pass, "criteria": results }))?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut table = Table::new(&CHECK_COLUMNS);
            results.iter().for_each(|r| check_rows(&mut table, r));
            table.write_csv(&mut sink)?;
        }
    }
    sink.flush()?;
    Ok(all)
}
