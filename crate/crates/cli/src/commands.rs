use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;
use threewave_core::diffpoly::{
    parse_expr, parse_raw, DiffPolyError, FieldId, ParamPoly, ParamRegistry, ParamSymbol,
    RatExpr, Rational,
};
use threewave_core::hierarchy::{
    check_hamiltonian, conservation_check, density_one, density_two,
    derive_parameter_constraints, hm_matrix, is_symmetric, on_space, residual_witness,
    resolve_first_degree, rig3_perturbed, second_degree_family, second_degree_flux_one,
    second_degree_flux_two, shift_point, space_from_relations, three_wave_point,
    verify_appendix, zero_degree_family, AppendixCheck, AppendixReading, FlowFamily,
    HierarchyError, FIRST_DEGREE_RELATIONS, GD_RELATIONS, HM_RELATIONS, NU_RELATIONS,
};
use threewave_core::model3wave::{
    base_system, compose, inverse_transformation, on_shell_reduce, shift_flow, symmetry_residual,
    transformation, transformation_for, EvolutionSystem, ModelError, RawExpr, Substitution,
    TransformId,
};
use threewave_core::numerics::{
    chain_generate, functional_monitor, integrate_flow, pde_residual, relative_drift,
    seed_solution, smooth_random_state, write_monitor_csv, write_snapshot_csv, ChainOptions,
    Grid, IntegratorOptions, NumericsError, SeedKind, SeedParams, Window,
};

use crate::config::{ConfigError, RunConfig};
use crate::report::{Check, ConstraintSummary, Report};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Wall-clock phases, reported only on request.
#[derive(Default)]
pub struct Timer {
    phases: BTreeMap<String, u64>,
}

impl Timer {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.phases.entry(phase.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }

    pub fn into_map(self) -> BTreeMap<String, u64> {
        self.phases
    }
}

/// Transformations named on the command line, with their original spelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformSelection {
    pub label: String,
    pub ids: Vec<TransformId>,
}

impl TransformSelection {
    pub fn all() -> Self {
        TransformSelection {
            label: "all".into(),
            ids: TransformId::ALL.to_vec(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Self::all());
        }
        let ids = s
            .split(',')
            .map(|p| match p.trim() {
                "t1" => Ok(TransformId::T1),
                "t2" => Ok(TransformId::T2),
                "t3" => Ok(TransformId::T3),
                other => Err(format!("unknown transformation `{other}` (t1, t2, t3 or all)")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TransformSelection {
            label: s.to_string(),
            ids,
        })
    }
}

fn witness_of(e: &RatExpr) -> Option<String> {
    (!e.is_zero()).then(|| residual_witness(e))
}

fn first_difference(diffs: &[(FieldId, RatExpr)]) -> Option<String> {
    diffs
        .first()
        .map(|(f, e)| format!("{f}: {}", residual_witness(e)))
}

pub fn verify_base(
    sel: &TransformSelection,
    flip: Option<FieldId>,
    timer: &mut Timer,
) -> Result<Report, CommandError> {
    let mut command = format!("verify base --transform {}", sel.label);
    let sys = match flip {
        Some(f) => {
            command.push_str(&format!(" --flip-sign {f}"));
            base_system().with_flipped_coupling(f)
        }
        None => base_system(),
    };
    let mut checks = Vec::new();
    for &t in &sel.ids {
        let residuals = timer.time(t.name(), || -> Result<_, CommandError> {
            let sub = match flip {
                Some(_) => transformation_for(t, &sys)?,
                None => transformation(t)?,
            };
            Ok(symmetry_residual(&sys, &sub)?)
        })?;
        for (f, r) in residuals {
            checks.push(Check::from_witness(
                format!("{t}/{f}"),
                witness_of(&r),
                format!("symmetry residual of the {} system under {t}", sys.name()),
            ));
        }
    }
    Ok(Report::new(command, checks))
}

pub fn verify_commute(timer: &mut Timer) -> Result<Report, CommandError> {
    let t1 = transformation(TransformId::T1)?;
    let t2 = transformation(TransformId::T2)?;
    let t3 = transformation(TransformId::T3)?;
    let (t12, t21) = timer.time("compose", || -> Result<_, CommandError> {
        Ok((compose(&t1, &t2)?, compose(&t2, &t1)?))
    })?;
    let checks = vec![
        Check::from_witness(
            "t1t2=t3",
            first_difference(&t12.differences(&t3)),
            "t1 applied after t2 equals t3 in all six components",
        ),
        Check::from_witness(
            "t2t1=t3",
            first_difference(&t21.differences(&t3)),
            "t2 applied after t1 equals t3 in all six components",
        ),
    ];
    Ok(Report::new("verify commute", checks))
}

pub fn verify_inverse(sel: &TransformSelection, timer: &mut Timer) -> Result<Report, CommandError> {
    let id = Substitution::identity();
    let mut checks = Vec::new();
    for &t in &sel.ids {
        let (right, left) = timer.time(t.name(), || -> Result<_, CommandError> {
            let fwd = transformation(t)?;
            let inv = inverse_transformation(t)?;
            Ok((compose(&fwd, &inv)?, compose(&inv, &fwd)?))
        })?;
        checks.push(Check::from_witness(
            format!("{t}/right-inverse"),
            first_difference(&right.differences(&id)),
            format!("{t} after its inverse is the identity"),
        ));
        checks.push(Check::from_witness(
            format!("{t}/left-inverse"),
            first_difference(&left.differences(&id)),
            format!("inverse of {t} after {t} is the identity"),
        ));
    }
    Ok(Report::new(
        format!("verify inverse --transform {}", sel.label),
        checks,
    ))
}

fn names(ps: &[ParamSymbol]) -> Vec<String> {
    ps.iter().map(|p| p.name().to_string()).collect()
}

fn free_parameter_check(found: &[ParamSymbol], want: &[&str]) -> Check {
    let found = names(found);
    Check::expect(
        "free-parameters",
        found == want,
        found.join(", "),
        format!("free parameters {}", want.join(", ")),
    )
}

fn dimension_check(dim: usize, want: usize) -> Check {
    Check::expect(
        "dimension",
        dim == want,
        dim.to_string(),
        format!("solution space has dimension {want}"),
    )
}

fn to_poly_map(point: BTreeMap<ParamSymbol, Rational>) -> BTreeMap<ParamSymbol, ParamPoly> {
    point
        .into_iter()
        .map(|(k, v)| (k, ParamPoly::constant(v)))
        .collect()
}

pub fn derive(
    degree: u8,
    sel: &TransformSelection,
    timer: &mut Timer,
) -> Result<Report, CommandError> {
    let command = format!("derive --degree {degree} --transforms {}", sel.label);
    let (checks, space) = match degree {
        0 => {
            let fam = zero_degree_family();
            let space = timer.time("derive", || derive_parameter_constraints(&fam, &sel.ids))?;
            let checks = vec![
                dimension_check(space.dimension(), 2),
                free_parameter_check(space.free_parameters(), &["b", "c"]),
            ];
            (checks, space)
        }
        1 => {
            let res = timer.time("derive", || resolve_first_degree(&sel.ids))?;
            let stated = space_from_relations(&FIRST_DEGREE_RELATIONS, res.family.params())?;
            let rejected = res
                .rejected_dimension
                .map_or("has no solutions".to_string(), |d| format!("gives dimension {d}"));
            let daa = res.family.specialize(&to_poly_map(three_wave_point()))?;
            let shift = res.family.specialize(&to_poly_map(shift_point()))?;
            let checks = vec![
                Check::pass(
                    "sign-convention",
                    format!(
                        "{} kept; the other convention {rejected}",
                        res.convention.name()
                    ),
                ),
                dimension_check(res.space.dimension(), 2),
                Check::expect(
                    "matches-stated-relations",
                    res.space.equals(&stated),
                    res.space.relation_strings().join("; "),
                    FIRST_DEGREE_RELATIONS.join("; "),
                ),
                Check::expect(
                    "three-wave-specialization",
                    res.space.contains_point(&three_wave_point()) && daa.equals(&base_system()),
                    daa.to_string(),
                    "the three-wave system lies in the space",
                ),
                Check::expect(
                    "shift-specialization",
                    res.space.contains_point(&shift_point()) && shift.equals(&shift_flow()),
                    shift.to_string(),
                    "the shift flow lies in the space",
                ),
            ];
            (checks, res.space)
        }
        _ => {
            let fam = second_degree_family();
            let space = timer.time("derive", || derive_parameter_constraints(&fam, &sel.ids))?;
            let stated: Vec<&str> = HM_RELATIONS
                .iter()
                .chain(GD_RELATIONS.iter())
                .chain(NU_RELATIONS.iter())
                .copied()
                .collect();
            let stated_space = space_from_relations(&stated, fam.params())?;
            let checks = vec![
                dimension_check(space.dimension(), 2),
                free_parameter_check(space.free_parameters(), &["b10", "c10"]),
                Check::expect(
                    "matches-stated-relations",
                    space.equals(&stated_space),
                    space.relation_strings().join("; "),
                    stated.join("; "),
                ),
                Check::expect(
                    "coefficient-matrix-symmetric",
                    is_symmetric(&hm_matrix(&space)),
                    "asymmetric",
                    "matrix of the a, b, c coefficients is symmetric",
                ),
            ];
            (checks, space)
        }
    };
    Ok(Report::new(command, checks).with_constraints(ConstraintSummary::from(&space)))
}

pub fn verify_hamiltonian(timer: &mut Timer) -> Result<Report, CommandError> {
    let res = resolve_first_degree(&TransformId::ALL)?;
    let check = timer.time("hamiltonian", || check_hamiltonian(&res))?;
    let c = match check.sign {
        Some(s) => Check::pass(
            "hamiltonian-flow",
            format!("bracket sign {s} reproduces the constrained first-degree family"),
        ),
        None => Check::from_witness(
            "hamiltonian-flow",
            check
                .mismatches
                .first()
                .map(|(f, e)| format!("{f}: {}", residual_witness(e))),
            "neither bracket sign reproduces the family",
        ),
    };
    Ok(Report::new("verify hamiltonian", vec![c]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowChoice {
    First,
    Second,
}

impl FlowChoice {
    pub fn name(self) -> &'static str {
        match self {
            FlowChoice::First => "first",
            FlowChoice::Second => "second",
        }
    }
}

fn conserved(
    name: &str,
    density: &RatExpr,
    flow: &EvolutionSystem,
    expected: Option<&RatExpr>,
) -> Result<Vec<Check>, CommandError> {
    match conservation_check(density, flow) {
        Ok(pair) => {
            let mut out = vec![Check::pass(
                format!("{name}/exact"),
                format!("rate of {density} is D({})", pair.flux),
            )];
            if let Some(e) = expected {
                out.push(Check::expect(
                    format!("{name}/flux"),
                    pair.flux_matches(e)?,
                    pair.flux.to_string(),
                    format!("flux agrees with {e} up to a constant"),
                ));
            }
            Ok(out)
        }
        Err(HierarchyError::NotConserved { witness, .. }) => Ok(vec![Check::from_witness(
            format!("{name}/exact"),
            Some(witness),
            format!("rate of {density} has a nonzero variational derivative"),
        )]),
        Err(e) => Err(e.into()),
    }
}

pub fn verify_conservation(
    flow: FlowChoice,
    flip: Option<FieldId>,
    timer: &mut Timer,
) -> Result<Report, CommandError> {
    let mut command = format!("verify conservation --flow {}", flow.name());
    let mut checks = Vec::new();
    match flow {
        FlowChoice::First => {
            let sys = match flip {
                Some(f) => {
                    command.push_str(&format!(" --flip-sign {f}"));
                    base_system().with_flipped_coupling(f)
                }
                None => base_system(),
            };
            let f1 = parse_expr("-p10*m10")?;
            let f2 = parse_expr("p01*m01")?;
            timer.time("three-wave", || -> Result<(), CommandError> {
                checks.extend(conserved("rho1", &density_one(), &sys, Some(&f1))?);
                checks.extend(conserved("rho2", &density_two(), &sys, Some(&f2))?);
                Ok(())
            })?;
            let res = resolve_first_degree(&TransformId::ALL)?;
            let generic = res.family.specialize(&res.space.parametrization())?;
            timer.time("first-degree", || -> Result<(), CommandError> {
                checks.extend(conserved("first-degree/rho1", &density_one(), &generic, None)?);
                checks.extend(conserved("first-degree/rho2", &density_two(), &generic, None)?);
                Ok(())
            })?;
            let cross = parse_expr("p10*m01")?;
            let rejected = matches!(
                conservation_check(&cross, &sys),
                Err(HierarchyError::NotConserved { .. })
            );
            checks.push(Check::expect(
                "p10*m01/rejected",
                rejected,
                "accepted as conserved",
                "a non-conserved density is rejected by the variational test",
            ));
        }
        FlowChoice::Second => {
            let fam = second_degree_family();
            let space = timer.time("derive", || derive_parameter_constraints(&fam, &TransformId::ALL))?;
            let sys = fam.specialize(&space.parametrization())?;
            let f1 = on_space(&second_degree_flux_one(), &space)?;
            let f2 = on_space(&second_degree_flux_two(), &space)?;
            timer.time("second-degree", || -> Result<(), CommandError> {
                checks.extend(conserved("rho1", &density_one(), &sys, Some(&f1))?);
                checks.extend(conserved("rho2", &density_two(), &sys, Some(&f2))?);
                Ok(())
            })?;
        }
    }
    Ok(Report::new(command, checks))
}

pub fn verify_appendix_cmd(
    which: Option<AppendixCheck>,
    reading: AppendixReading,
    timer: &mut Timer,
) -> Result<Report, CommandError> {
    let mut command = format!(
        "verify appendix --which {}",
        which.map_or("all", AppendixCheck::name)
    );
    if reading == AppendixReading::AsPrinted {
        command.push_str(" --inject-typo");
    }
    let groups: Vec<AppendixCheck> = match which {
        Some(c) => vec![c],
        None => AppendixCheck::ALL.to_vec(),
    };
    let mut checks = Vec::new();
    for g in groups {
        let outcomes = timer.time(g.name(), || verify_appendix(g, reading))?;
        checks.extend(
            outcomes
                .into_iter()
                .map(|o| Check::from_witness(o.name, o.witness, o.detail)),
        );
        if g == AppendixCheck::Rig3 {
            let perturbed = rig3_perturbed()?;
            checks.push(Check::expect(
                "rig3-perturbed/rejected",
                !perturbed.ok,
                "perturbed identity held",
                "with a free coefficient in place of b + c the identity must fail",
            ));
        }
    }
    Ok(Report::new(command, checks))
}

/// Pin the free parameters of a solved space to the given values.
fn point_on_space(
    fam: &FlowFamily,
    space: &threewave_core::diffpoly::AffineSpace,
    values: &[(&str, Rational)],
) -> Result<EvolutionSystem, CommandError> {
    let fixed: BTreeMap<ParamSymbol, ParamPoly> = values
        .iter()
        .map(|(n, v)| Ok((ParamSymbol::new(n)?, ParamPoly::constant(v.clone()))))
        .collect::<Result<_, DiffPolyError>>()?;
    let mut point: BTreeMap<ParamSymbol, ParamPoly> = space
        .parametrization()
        .into_iter()
        .map(|(k, p)| (k, p.substitute(&fixed)))
        .collect();
    point.extend(fixed);
    Ok(fam.specialize(&point)?)
}

fn create(path: &Path) -> Result<File, CommandError> {
    File::create(path).map_err(|source| CommandError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn simulate(
    flow: FlowChoice,
    cfg: &RunConfig,
    csv_dir: Option<&Path>,
    timer: &mut Timer,
) -> Result<Report, CommandError> {
    let sys = timer.time("setup", || -> Result<_, CommandError> {
        Ok(match flow {
            FlowChoice::First => {
                let res = resolve_first_degree(&TransformId::ALL)?;
                point_on_space(
                    &res.family,
                    &res.space,
                    &[("nu01", cfg.nu01.clone()), ("nu10", cfg.nu10.clone())],
                )?
            }
            FlowChoice::Second => {
                let fam = second_degree_family();
                let space = derive_parameter_constraints(&fam, &TransformId::ALL)?;
                point_on_space(
                    &fam,
                    &space,
                    &[("b10", cfg.b10.clone()), ("c10", cfg.c10.clone())],
                )?
            }
        })
    })?;
    let grid = Grid::new(cfg.n, cfg.length.to_f64())?;
    let mut s0 = smooth_random_state(grid, cfg.amplitude.to_f64(), cfg.modes, cfg.rng_seed);
    if cfg.reality {
        s0.enforce_reality();
    }
    let opts = IntegratorOptions {
        scheme: cfg.scheme,
        floor: cfg.floor.to_f64(),
        snapshot_every: cfg.snapshot_every,
        reality: cfg.reality,
    };
    let (dt, t_end) = (cfg.dt.to_f64(), cfg.t_end.to_f64());
    let traj = timer.time("integrate", || integrate_flow(&sys, &s0, dt, t_end, &opts))?;
    let mut checks = vec![Check::pass(
        "integrate",
        format!(
            "{} flow, n = {}, dt = {}, reached t = {}",
            flow.name(),
            cfg.n,
            cfg.dt,
            traj.last().t
        ),
    )];
    let tol = cfg.drift_tol.to_f64();
    let mut series = Vec::new();
    for (name, rho) in [("rho1", density_one()), ("rho2", density_two())] {
        let s = timer.time("monitor", || functional_monitor(&traj, &rho, opts.scheme, opts.floor))?;
        let drift = relative_drift(&s);
        checks.push(Check::expect(
            format!("{name}/drift"),
            drift < tol,
            format!("{drift:.3e}"),
            format!("relative drift {drift:.3e} of the integral of {rho}, tolerance {tol:e}"),
        ));
        series.push((name, s));
    }
    if let Some(dir) = csv_dir {
        std::fs::create_dir_all(dir).map_err(|source| CommandError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        write_snapshot_csv(create(&dir.join("initial.csv"))?, traj.first())?;
        write_snapshot_csv(create(&dir.join("final.csv"))?, traj.last())?;
        for (name, s) in &series {
            write_monitor_csv(create(&dir.join(format!("monitor_{name}.csv")))?, s)?;
        }
    }
    Ok(Report::new(format!("simulate --flow {}", flow.name()), checks))
}

pub fn chain(n1: usize, n2: usize, cfg: &RunConfig, timer: &mut Timer) -> Result<Report, CommandError> {
    let params = SeedParams {
        k: cfg.seed_k.to_f64(),
        m: cfg.seed_m.to_f64(),
        c: cfg.seed_c.to_f64(),
    };
    let seed = seed_solution(SeedKind::PlusVacuum, params)?;
    let opts = ChainOptions {
        window: Window::uniform(
            (cfg.window_x0.to_f64(), cfg.window_x1.to_f64()),
            (cfg.window_t0.to_f64(), cfg.window_t1.to_f64()),
            cfg.window_nx,
            cfg.window_nt,
        ),
        tau: cfg.tau.to_f64(),
        floor: cfg.floor.to_f64(),
    };
    let tol = cfg.residual_tol.to_f64();
    let seed_residual = pde_residual(seed.as_ref(), &base_system(), &opts.window, opts.tau, opts.floor)?;
    let mut checks = vec![Check::expect(
        "seed",
        seed_residual.max <= tol,
        format!("{:.3e}", seed_residual.max),
        format!("{} residual {:.3e}", seed.label(), seed_residual.max),
    )];
    let out = timer.time("chain", || chain_generate(n1, n2, seed, &opts))?;
    for s in &out.steps {
        checks.push(Check::expect(
            format!("step{}/{}", s.index, s.transform),
            s.residual <= tol,
            format!("{:.3e}", s.residual),
            format!("residual {:.3e} with tau = {}, tolerance {tol:e}", s.residual, cfg.tau),
        ));
    }
    Ok(Report::new(format!("chain --n1 {n1} --n2 {n2}"), checks))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprOp {
    Eval,
    Diff,
    Reduce,
}

pub fn expr(op: ExprOp, text: &str) -> Result<Report, CommandError> {
    let (name, result) = match op {
        ExprOp::Eval => ("eval", parse_expr(text)?),
        ExprOp::Diff => ("diff", parse_expr(text)?.dx()?),
        ExprOp::Reduce => {
            let ast = parse_raw(text, &ParamRegistry::open())?;
            ("reduce", on_shell_reduce(&RawExpr::from_ast(&ast), &base_system())?)
        }
    };
    Ok(Report::new(
        format!("expr {name}"),
        vec![Check::pass("result", result.to_string())],
    ))
}

/// Turn a command outcome into a report, attaching timings when requested.
pub fn finish(
    command: &str,
    result: Result<Report, CommandError>,
    timer: Timer,
    timings: bool,
) -> Report {
    let mut report = result.unwrap_or_else(|e| Report::error(command, e.to_string()));
    if timings {
        report.timings_ms = Some(timer.into_map());
    }
    report
}
