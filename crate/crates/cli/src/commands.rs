use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use biorth_core::asymptotics::{empirical_tables, make_predictor, AsymptoticPredictor, Table, TableKind};
use biorth_core::equilibrium::{solve_equilibrium_with, EquilibriumDocument, EquilibriumSolution, Initialization};
use biorth_core::ext::tolerance;
use biorth_core::hp_solver::{HpSolution, HpSolver, SolutionDocument};
use biorth_core::nikishin::NikishinSystem;
use serde::Serialize;

use crate::config::Setup;
use crate::error::{input, numeric, Failure, Outcome};
use crate::store::{read_json, write_atomic, write_json, Direction, Layout};

pub fn system_for(setup: &Setup, dir: Direction) -> Arc<NikishinSystem> {
    match dir {
        Direction::Forward => setup.system.clone(),
        Direction::Reversed => Arc::new(setup.system.reversed()),
    }
}

/// Post-solve checks: imposed conditions met, expansion vanishing, zeros in place.
fn check_solution(sol: &HpSolution, tol: f64) -> Result<(), String> {
    let d = sol.diagnostics();
    if !(d.orthogonality <= tol) {
        return Err(format!("orthogonality residual {:e} above {tol:e}", d.orthogonality));
    }
    if !(d.expansion <= tol) {
        return Err(format!("expansion residual {:e} above {tol:e}", d.expansion));
    }
    let sys = sol.system();
    for j in 1..=sol.m() {
        let z = sol.zeros(j);
        if z.len() != sol.n() || !z.iter().all(|x| sys.interval(j).contains_open(x)) {
            return Err(format!("zeros of form {j} are not {} points inside {}", sol.n(), sys.interval(j)));
        }
    }
    Ok(())
}

/// Solves and stores every missing degree in one direction; returns the failures.
fn solve_direction(setup: &Setup, layout: &Layout, dir: Direction, force: bool) -> Outcome<Vec<String>> {
    let n_max = setup.config.n_max;
    let todo: Vec<usize> = (0..=n_max).filter(|&n| force || !layout.solution(dir, n).exists()).collect();
    if todo.is_empty() {
        log::info!("{}: all {} degrees present", dir.name(), n_max + 1);
        return Ok(Vec::new());
    }
    log::info!("{}: solving {} degrees", dir.name(), todo.len());
    let solver = HpSolver::new(system_for(setup, dir), n_max);
    let tol = tolerance(setup.prec(), 1, 2).to_f64();
    let results = setup.exec.map(todo.len(), |i| {
        let n = todo[i];
        let sol = solver.solve(n).map_err(|e| format!("{} n={n}: {e}", dir.name()))?;
        check_solution(&sol, tol).map_err(|e| format!("{} n={n}: {e}", dir.name()))?;
        write_json(&layout.solution(dir, n), &sol.to_document()).map_err(|e| e.to_string())?;
        log::info!("{} n={n}: cond {:.3e}", dir.name(), sol.diagnostics().cond);
        Ok::<(), String>(())
    });
    Ok(results.into_iter().filter_map(|r| r.err()).collect())
}

#[derive(Serialize)]
struct DiagnosticRow {
    direction: &'static str,
    n: usize,
    cond: f64,
    orthogonality: f64,
    expansion: f64,
    next_row: f64,
}

fn write_diagnostics(setup: &Setup, layout: &Layout) -> Outcome<()> {
    let mut rows = Vec::new();
    for dir in [Direction::Forward, Direction::Reversed] {
        for n in 0..=setup.config.n_max {
            if let Some(doc) = read_json::<SolutionDocument>(&layout.solution(dir, n))? {
                let d = doc.diagnostics;
                rows.push(DiagnosticRow {
                    direction: dir.name(),
                    n,
                    cond: d.cond,
                    orthogonality: d.orthogonality,
                    expansion: d.expansion,
                    next_row: d.next_row,
                });
            }
        }
    }
    write_json(&layout.diagnostics(), &rows)
}

pub fn solve_hp(setup: &Setup, force: bool) -> Outcome<()> {
    let layout = Layout::new(&setup.out);
    let mut failures = solve_direction(setup, &layout, Direction::Forward, force)?;
    failures.extend(solve_direction(setup, &layout, Direction::Reversed, force)?);
    write_diagnostics(setup, &layout)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Solver(failures.join("; ")))
    }
}

/// Stored solutions for `0..=n_max`. Values always come from the files so that
/// fresh and resumed runs produce identical downstream output.
pub fn load_solutions(setup: &Setup, dir: Direction) -> Outcome<Vec<HpSolution>> {
    let layout = Layout::new(&setup.out);
    let sys = system_for(setup, dir);
    let docs = setup.exec.map(setup.config.n_max + 1, |n| read_json::<SolutionDocument>(&layout.solution(dir, n)));
    let mut out = Vec::with_capacity(docs.len());
    for (n, doc) in docs.into_iter().enumerate() {
        let doc = doc?.ok_or_else(|| {
            Failure::Validation(format!("missing {} solution for n={n}; run solve-hp first", dir.name()))
        })?;
        if doc.m != sys.m() || doc.precision != sys.prec() || doc.n != n {
            return Err(Failure::Validation(format!(
                "stored {} solution n={n} does not match the configuration; rerun solve-hp with --force",
                dir.name()
            )));
        }
        out.push(HpSolution::from_document(sys.clone(), &doc).map_err(input)?);
    }
    Ok(out)
}

fn solve_equilibrium_dir(setup: &Setup, dir: Direction) -> Outcome<EquilibriumSolution> {
    let mut ivs = setup.intervals.clone();
    if dir == Direction::Reversed {
        ivs.reverse();
    }
    let eq = &setup.config.equilibrium;
    solve_equilibrium_with(
        &ivs,
        &setup.interaction,
        eq.cells,
        setup.eq_tol,
        eq.max_iter,
        Initialization::Arcsine,
        setup.exec,
    )
    .map_err(numeric)
}

/// Stored equilibrium for one interval order, computed and written when absent.
pub fn ensure_equilibrium(setup: &Setup, dir: Direction, force: bool) -> Outcome<EquilibriumSolution> {
    let path = Layout::new(&setup.out).equilibrium(dir);
    if !force {
        if let Some(doc) = read_json::<EquilibriumDocument>(&path)? {
            let eq = EquilibriumSolution::from_document(&doc).map_err(input)?;
            let same = eq.lambdas.len() == setup.m()
                && eq.lambdas[0].cell_count() == setup.config.equilibrium.cells;
            if same {
                return Ok(eq);
            }
            log::warn!("{} does not match the configuration; recomputing", path.display());
        }
    }
    let eq = solve_equilibrium_dir(setup, dir)?;
    log::info!("equilibrium ({}): ω' = {:?}, residual {:.2e}", dir.name(), eq.omega_prime, eq.residual);
    write_json(&path, &eq.to_document())?;
    let doc = read_json::<EquilibriumDocument>(&path)?.expect("just written");
    EquilibriumSolution::from_document(&doc).map_err(input)
}

pub fn solve_eq(setup: &Setup, force: bool, reversed: bool) -> Outcome<()> {
    ensure_equilibrium(setup, Direction::Forward, force)?;
    if reversed {
        ensure_equilibrium(setup, Direction::Reversed, force)?;
    }
    Ok(())
}

pub fn predictor(setup: &Setup, force: bool) -> Outcome<AsymptoticPredictor> {
    make_predictor(ensure_equilibrium(setup, Direction::Forward, force)?).map_err(numeric)
}

pub fn build_table(
    setup: &Setup,
    sols: &[HpSolution],
    pred: &AsymptoticPredictor,
    kind: TableKind,
) -> Outcome<Table> {
    if kind == TableKind::Rate && setup.m() < 2 {
        return Err(Failure::Validation("the rate table needs a system with m ≥ 2".into()));
    }
    empirical_tables(sols, pred, &setup.probes, kind, setup.exec).map_err(numeric)
}

/// One block per (quantity, probe) series: `n  measured/predicted`.
fn plot_data(table: &Table) -> String {
    let key = |r: &biorth_core::asymptotics::TableRow| {
        let probe = match &r.probe {
            Some(z) => {
                let (re, im) = z.to_f64_pair();
                format!("{re}{im:+}i")
            }
            None => "-".into(),
        };
        (r.quantity.clone(), probe)
    };
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for r in &table.rows {
        if seen.insert(key(r)) {
            order.push(key(r));
        }
    }
    let mut out = String::new();
    for (q, p) in order {
        let _ = writeln!(out, "# {q} {p}");
        for r in table.rows.iter().filter(|r| key(r) == (q.clone(), p.clone())) {
            let _ = writeln!(out, "{} {:.17e}", r.n, r.measured.to_f64() / r.predicted);
        }
        out.push_str("\n\n");
    }
    out
}

pub fn tables(setup: &Setup, which: &[TableKind], force: bool) -> Outcome<()> {
    let kinds: Vec<TableKind> = if which.is_empty() {
        TableKind::all().into_iter().filter(|k| *k != TableKind::Rate || setup.m() >= 2).collect()
    } else {
        which.to_vec()
    };
    if kinds.contains(&TableKind::Rate) && setup.m() < 2 {
        return Err(Failure::Validation("the rate table needs a system with m ≥ 2".into()));
    }
    let sols = load_solutions(setup, Direction::Forward)?;
    let pred = predictor(setup, force)?;
    let layout = Layout::new(&setup.out);
    for kind in kinds {
        let table = build_table(setup, &sols, &pred, kind)?;
        let name = kind.name();
        write_atomic(&layout.table(name, "csv"), table.to_csv().as_bytes())?;
        write_json(&layout.table(name, "json"), &table.to_json())?;
        write_atomic(&layout.plot(name), plot_data(&table).as_bytes())?;
        log::info!("table {name}: {} rows", table.rows.len());
    }
    Ok(())
}
