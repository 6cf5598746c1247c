use mvop_core::favard::{
    reconstruct_fock, self_adjointness_bound, validate_fock, FockInput, ValidationReport,
    WitnessKind,
};
use mvop_core::fock::{assemble_fock, FockData};
use mvop_core::gradation::build_gradations_with;
use mvop_core::marginal::{jacobi_1d, marginal_functional, marginal_omega, MarginalSpec};
use mvop_core::measures::Functional;
use mvop_core::nullideal::{base_generators, monic, rank_sequence};
use mvop_core::polynomial::{monomials_up_to, MultiIndex};
use mvop_core::{Error, Rational, Scalar, Tolerances};
use serde_json::Value;

use crate::input::{all_rational, exact_capable, fock_input, functional, object, read_document, SPEC_VERSION};
use crate::output::{self, float, floats, index, indices, matrix, scalar, vector};
use crate::{Cli, Command, Failure, Mode};

pub struct Outcome {
    pub report: Value,
    /// Set when the report itself records a failed check.
    pub failure: Option<Failure>,
}

struct Inputs {
    spec: Option<Value>,
    fock: Option<Value>,
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tolerances()?;
    let inputs = Inputs {
        spec: cli.spec.as_deref().map(read_document).transpose()?,
        fock: cli.fock.as_deref().map(read_document).transpose()?,
    };
    let needs_spec = !matches!(cli.command, Command::Favard | Command::Capcheck);
    if needs_spec && inputs.spec.is_none() {
        return Err(Failure::malformed("this command needs --spec"));
    }
    if cli.command == Command::Favard && inputs.fock.is_none() {
        return Err(Failure::malformed("favard needs --fock"));
    }
    if cli.command == Command::Capcheck && inputs.spec.is_none() == inputs.fock.is_none() {
        return Err(Failure::malformed("capcheck needs exactly one of --spec or --fock"));
    }
    let exact = match cli.mode {
        Mode::Exact => true,
        Mode::Float => false,
        Mode::Auto => {
            inputs.spec.iter().chain(&inputs.fock).all(all_rational)
                && inputs.spec.as_ref().is_none_or(exact_capable)
        }
    };
    let (body, failure) = if exact {
        dispatch::<Rational>(cli, &inputs, &tol)?
    } else {
        dispatch::<f64>(cli, &inputs, &tol)?
    };
    if cli.command == Command::ExportFock {
        return Ok(Outcome { report: body, failure });
    }
    let mut report = object(vec![
        ("command", Value::from(command_name(cli.command))),
        ("mode", Value::from(if exact { "exact" } else { "float" })),
        ("max_degree", Value::from(cli.max_degree)),
    ]);
    if let (Value::Object(r), Value::Object(b)) = (&mut report, body) {
        r.extend(b);
    }
    Ok(Outcome { report, failure })
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Omega => "omega",
        Command::Rank => "rank",
        Command::Null => "null",
        Command::Moments => "moments",
        Command::Capcheck => "capcheck",
        Command::Marginal => "marginal",
        Command::Favard => "favard",
        Command::ExportFock => "export-fock",
    }
}

type Dispatched = (Value, Option<Failure>);

fn dispatch<T: Scalar>(cli: &Cli, inputs: &Inputs, tol: &Tolerances) -> Result<Dispatched, Failure> {
    let n = cli.max_degree;
    let measure = |needed: usize| -> Result<Functional<T>, Failure> {
        functional::<T>(inputs.spec.as_ref().expect("checked"), needed)
    };
    match cli.command {
        Command::Omega => Ok((omega(&*measure(2 * n)?, n, tol)?, None)),
        Command::Rank => Ok((rank(&*measure(2 * n)?, n, tol)?, None)),
        Command::Null => Ok((null(&*measure(2 * n)?, n, tol)?, None)),
        Command::Moments => {
            let top = if cli.up_to.is_empty() {
                n
            } else {
                n.max(cli.up_to.iter().map(|&e| e as usize).sum())
            };
            Ok((moments(&*measure(2 * top + 1)?, top, &cli.up_to, tol)?, None))
        }
        Command::Capcheck => {
            let fock = match &inputs.fock {
                Some(doc) => fock_input::<T>(doc)?.to_fock(*tol)?,
                None => {
                    let f = measure(2 * n + 1)?;
                    let g = build_gradations_with(&*f, n, tol)?;
                    assemble_fock(&g, &*f)?
                }
            };
            capcheck(&fock, inputs.fock.is_some())
        }
        Command::Marginal => Ok((marginal(measure(2 * n)?, &cli.coords, n, tol)?, None)),
        Command::Favard => {
            let fi = fock_input::<T>(inputs.fock.as_ref().expect("checked"))?;
            favard(&fi.to_fock(*tol)?, cli.seed)
        }
        Command::ExportFock => {
            let f = measure(2 * n + 1)?;
            let g = build_gradations_with(&*f, n, tol)?;
            let fock = assemble_fock(&g, &*f)?;
            Ok((export(&FockInput::from_fock(&fock)), None))
        }
    }
}

fn omega<T: Scalar>(f: &dyn mvop_core::measures::MomentFunctional<T>, n: usize, tol: &Tolerances) -> Result<Value, Failure> {
    let g = build_gradations_with(f, n, tol)?;
    let grams = g.levels().iter().map(|l| l.gram.clone()).collect();
    let fock = FockInput::without_preservation(g.dimension(), grams).to_fock(*tol)?;
    let levels = g
        .levels()
        .iter()
        .map(|l| {
            object(vec![
                ("degree", Value::from(l.degree)),
                ("monomials", indices(&l.monomials)),
                ("weights", vector(&l.weights)),
                ("gram", matrix(&l.gram)),
                ("omega", matrix(&l.omega())),
                ("rank", Value::from(l.rank())),
                ("nullity", Value::from(l.nullity())),
                ("spectrum", floats(&fock.nonzero_spectrum(l.degree))),
            ])
        })
        .collect();
    Ok(object(vec![
        ("dimension", Value::from(g.dimension())),
        ("levels", Value::Array(levels)),
    ]))
}

fn rank<T: Scalar>(f: &dyn mvop_core::measures::MomentFunctional<T>, n: usize, tol: &Tolerances) -> Result<Value, Failure> {
    let g = build_gradations_with(f, n, tol)?;
    let rs = rank_sequence(&g);
    let list = rs.ranks.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let summary = match rs.first_deficient {
        Some(k) => format!("ρ = {list}; deficiency at n={k}"),
        None => format!("ρ = {list}; no deficiency"),
    };
    Ok(object(vec![
        ("dimension", Value::from(g.dimension())),
        ("ranks", Value::from(rs.ranks.clone())),
        ("dimensions", Value::from(rs.dimensions.clone())),
        ("has_deficiency", Value::from(rs.has_deficiency)),
        ("first_deficient", rs.first_deficient.map_or(Value::Null, Value::from)),
        ("summary", Value::from(summary)),
    ]))
}

fn null<T: Scalar>(f: &dyn mvop_core::measures::MomentFunctional<T>, n: usize, tol: &Tolerances) -> Result<Value, Failure> {
    let g = build_gradations_with(f, n, tol)?;
    let b = base_generators(&g);
    let generators = b
        .generators
        .iter()
        .map(|gen| {
            let p = monic(&gen.polynomial);
            object(vec![
                ("degree", Value::from(gen.degree)),
                ("terms", output::polynomial(&p)),
                ("seminorm_sq", scalar(&g.inner(&p, &p).unwrap_or_else(|_| T::zero()))),
            ])
        })
        .collect();
    let reductions = b
        .reductions
        .iter()
        .map(|r| {
            object(vec![
                ("degree", Value::from(r.degree)),
                ("kernel_dim", Value::from(r.kernel_dim)),
                ("inherited_dim", Value::from(r.inherited_dim)),
                ("new_generators", Value::from(r.new_generators)),
            ])
        })
        .collect();
    Ok(object(vec![
        ("dimension", Value::from(g.dimension())),
        ("generators", Value::Array(generators)),
        ("kernel_dims", Value::from(b.kernel_dims.clone())),
        ("reductions", Value::Array(reductions)),
    ]))
}

fn moments<T: Scalar>(
    f: &dyn mvop_core::measures::MomentFunctional<T>,
    top: usize,
    up_to: &[u32],
    tol: &Tolerances,
) -> Result<Value, Failure> {
    let dim = f.dimension();
    if !up_to.is_empty() && up_to.len() != dim {
        return Err(Failure::malformed(format!("--up-to needs {dim} entries")));
    }
    let g = build_gradations_with(f, top, tol)?;
    let fock = assemble_fock(&g, f)?;
    let wanted: Vec<MultiIndex> = monomials_up_to(dim, top)
        .into_iter()
        .filter(|k| up_to.is_empty() || k.entries().iter().zip(up_to).all(|(a, b)| a <= b))
        .collect();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(wanted.len());
    for k in &wanted {
        let m = f.moment(k)?;
        let v = fock.vacuum_moment(k)?;
        let d = (m.clone() - v.clone()).abs();
        worst = worst.max(d.to_f64());
        rows.push(object(vec![
            ("index", index(k)),
            ("moment", scalar(&m)),
            ("vacuum", scalar(&v)),
            ("discrepancy", scalar(&d)),
        ]));
    }
    Ok(object(vec![
        ("dimension", Value::from(dim)),
        ("rows", Value::Array(rows)),
        ("max_discrepancy", float(worst)),
    ]))
}

fn validation(r: &ValidationReport) -> Value {
    let witnesses = r
        .witnesses
        .iter()
        .map(|w| {
            object(vec![
                ("degree", Value::from(w.degree)),
                ("coordinate", Value::from(w.coordinate + 1)),
                (
                    "kind",
                    Value::from(match w.kind {
                        WitnessKind::Creation => "creation",
                        WitnessKind::Preservation => "preservation",
                    }),
                ),
                ("vector", floats(&w.vector)),
                ("seminorm", float(w.seminorm)),
            ])
        })
        .collect();
    let entries = r
        .condition_ii
        .entries
        .iter()
        .map(|e| {
            object(vec![
                ("j", Value::from(e.j + 1)),
                ("k", Value::from(e.k + 1)),
                ("degree", Value::from(e.degree)),
                ("cr1", float(e.cr1)),
                ("cr2", float(e.cr2)),
                ("cr3", float(e.cr3)),
                ("passed", Value::from(e.passed)),
            ])
        })
        .collect();
    object(vec![
        ("condition_i", Value::from(r.condition_i)),
        ("witnesses", Value::Array(witnesses)),
        (
            "condition_ii",
            object(vec![
                ("passed", Value::from(r.condition_ii.passed)),
                ("tolerance", float(r.condition_ii.tolerance)),
                ("max_residual", float(r.condition_ii.max_residual())),
                ("entries", Value::Array(entries)),
            ]),
        ),
        ("hermiticity", Value::from(r.hermiticity)),
        ("symmetry_residual", float(r.symmetry_residual)),
        ("adjointness_residual", float(r.adjointness_residual)),
        ("passed", Value::from(r.passed)),
    ])
}

fn capcheck<T: Scalar>(fock: &FockData<T>, supplied: bool) -> Result<Dispatched, Failure> {
    let report = validate_fock(fock);
    let degrees: Vec<usize> = (1..=fock.max_degree().saturating_sub(2)).collect();
    let growth = if degrees.is_empty() {
        Value::Null
    } else {
        let s = self_adjointness_bound(fock, &degrees)?;
        object(vec![
            ("degrees", Value::from(s.degrees.clone())),
            ("bounds", floats(&s.bounds)),
            ("exponent", s.exponent.map_or(Value::Null, float)),
            ("divergent_sum", Value::from(s.divergent_sum)),
            ("note", Value::from(s.note)),
        ])
    };
    let failure = (!report.passed).then(|| Failure::validation("Fock data failed validation"));
    Ok((
        object(vec![
            ("source", Value::from(if supplied { "fock_input" } else { "measure" })),
            ("dimension", Value::from(fock.dimension())),
            ("validation", validation(&report)),
            ("x_commutativity", floats(&x_residuals(fock))),
            ("self_adjointness", growth),
        ]),
        failure,
    ))
}

fn x_residuals<T: Scalar>(fock: &FockData<T>) -> Vec<f64> {
    let d = fock.dimension();
    let mut out = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            out.push(fock.x_commutator_residual(j, k));
        }
    }
    out
}

fn marginal<T: Scalar>(f: Functional<T>, coords: &[usize], n: usize, tol: &Tolerances) -> Result<Value, Failure> {
    if coords.is_empty() {
        return Err(Failure::malformed("marginal needs --coords"));
    }
    if coords.contains(&0) {
        return Err(Failure::malformed("--coords are 1-based"));
    }
    let spec = MarginalSpec::new(f, coords.iter().map(|c| c - 1).collect())?;
    let omegas = (0..=n)
        .map(|k| marginal_omega(&spec, k, tol).map(|m| matrix(&m)))
        .collect::<Result<Vec<_>, Error>>()?;
    let jacobi = if coords.len() == 1 {
        let j = jacobi_1d(&*marginal_functional(&spec), n, tol)?;
        object(vec![("omega", vector(&j.omega)), ("alpha", vector(&j.alpha))])
    } else {
        Value::Null
    };
    Ok(object(vec![
        ("coords", Value::from(coords.to_vec())),
        ("jacobi", jacobi),
        ("omega_sequence", Value::Array(omegas)),
    ]))
}

fn favard<T: Scalar>(fock: &FockData<T>, seed: u64) -> Result<Dispatched, Failure> {
    let report = validate_fock(fock);
    let (reconstruction, refusal) = if report.passed {
        match reconstruct_fock(fock, seed) {
            Ok(r) => {
                let atoms = r
                    .measure
                    .atoms()
                    .iter()
                    .map(|a| floats(a))
                    .collect();
                let snapped = r
                    .snapped
                    .iter()
                    .map(|s| match s {
                        Some(v) => Value::Array(
                            v.iter()
                                .map(|&(p, q)| Value::from(if q == 1 { p.to_string() } else { format!("{p}/{q}") }))
                                .collect(),
                        ),
                        None => Value::Null,
                    })
                    .collect();
                (
                    object(vec![
                        ("atoms", Value::Array(atoms)),
                        ("weights", floats(r.measure.weights())),
                        ("snapped", Value::Array(snapped)),
                        ("termination", Value::from(r.termination)),
                        ("attempts", r.attempts.map_or(Value::Null, Value::from)),
                        ("seed", Value::from(seed)),
                    ]),
                    None,
                )
            }
            Err(e) => (Value::Null, Some(Failure::from(e))),
        }
    } else {
        (Value::Null, Some(Failure::validation("Fock data failed validation; refusing to reconstruct")))
    };
    let verdict = if refusal.is_none() { "pass" } else { "fail" };
    Ok((
        object(vec![
            ("dimension", Value::from(fock.dimension())),
            ("validation", validation(&report)),
            ("reconstruction", reconstruction),
            ("refusal", refusal.as_ref().map_or(Value::Null, |f| Value::from(f.message.clone()))),
            ("verdict", Value::from(verdict)),
        ]),
        refusal,
    ))
}

fn export<T: Scalar>(fi: &FockInput<T>) -> Value {
    object(vec![
        ("spec_version", Value::from(SPEC_VERSION)),
        ("dimension", Value::from(fi.dim)),
        ("depth", Value::from(fi.depth())),
        ("gram", Value::Array(fi.gram.iter().map(matrix).collect())),
        (
            "preservation",
            Value::Array(
                fi.preservation
                    .iter()
                    .map(|per_i| Value::Array(per_i.iter().map(matrix).collect()))
                    .collect(),
            ),
        ),
    ])
}
