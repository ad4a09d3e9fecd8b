//! One function per command, each turning a validated config into records.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::{square_matrix, Command, RunConfig, StructureConfig};
use super::report::Record;
use crate::fock::{build_operators, coherent, fock_state, resolution_of_unity, uncertainty_product, vacuum, FockSpace};
use crate::foliation::{
    build_foliated, complement_resolution, hybrid_coherent, leaf_resolution, overlap_factorization_residual,
    BuildOptions, ComplementSpec, FoliatedSpace, HybridState,
};
use crate::linalg::{max_abs_c, ComplexJson};
use crate::phase_space::{check_acs, check_compatibility, nijenhuis, Chart, SymplecticForm};
use crate::torus::{
    classify_moduli_pair, kahler_coefficient, parse_complex, quasi_periodicity, reduce_to_fundamental_domain,
    theta_with_accuracy, SL2ZMatrix, TauPoint,
};
use crate::transform::{
    classify_standard, coherence_residual, cr_residual, lift_normal_ordered, primed_vacuum, vacuum_transport_residual,
    TransitionMap,
};

pub fn dispatch(config: &RunConfig) -> Vec<Record> {
    match config.command {
        Command::CheckIntegrability => check_integrability(config),
        Command::CoherentReport => coherent_report(config),
        Command::ClassifyMap => classify_map(config),
        Command::TransformVacuum => transform_vacuum(config),
        Command::Torus => torus(config),
        Command::Foliate => foliate(config),
    }
}

fn cj(z: Complex64) -> Value {
    json!(ComplexJson::from(z))
}

fn cjs(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| cj(z)).collect())
}

/// `pass` for an informational record with an optional expectation.
fn expected(actual: bool, expectation: Option<bool>) -> bool {
    expectation.is_none_or(|e| e == actual)
}

fn chart_and_structure(
    chart: &Option<super::config::ChartConfig>,
    structure: &Option<StructureConfig>,
) -> Result<(Chart, crate::phase_space::AlmostComplexStructure), String> {
    let chart = chart.as_ref().ok_or("missing chart")?.build()?;
    let j = structure.as_ref().ok_or("missing structure")?.build(&chart)?;
    Ok((chart, j))
}

fn check_integrability(config: &RunConfig) -> Vec<Record> {
    let tol = &config.tolerances;
    let (chart, j) = match chart_and_structure(&config.chart, &config.structure) {
        Ok(x) => x,
        Err(e) => return vec![Record::failed("structure", e)],
    };
    let mut out = Vec::new();
    out.push(match check_acs(&j, &chart, tol.acs) {
        Ok(r) => Record::new(
            "acs",
            json!({"max_deviation": r.max_deviation, "worst_point": r.worst_point}),
            Some(tol.acs),
            r.pass,
        ),
        Err(e) => Record::failed("acs", e),
    });
    let omega = SymplecticForm::standard(chart.degrees_of_freedom());
    out.push(match check_compatibility(&j, &omega, &chart, tol.compatibility) {
        Ok(r) => Record::new(
            "compatibility",
            json!({
                "max_residual": r.max_residual,
                "metric_asymmetry": r.metric_asymmetry,
                "min_metric_eigenvalue": r.min_metric_eigenvalue,
                "preserves_omega": r.preserves_omega,
                "positive": r.positive,
            }),
            Some(tol.compatibility),
            expected(r.pass, config.expect.compatible.or(Some(true))),
        ),
        Err(e) => Record::failed("compatibility", e),
    });
    out.push(match nijenhuis(&j, &chart, tol.nijenhuis) {
        Ok(r) => Record::new(
            "nijenhuis_max",
            json!({
                "max_norm": r.max_norm,
                "worst_point": r.worst_point,
                "worst_pair": [r.worst_pair.0, r.worst_pair.1],
                "antisymmetry_residual": r.antisymmetry_residual,
                "integrable": r.integrable,
            }),
            Some(tol.nijenhuis),
            expected(r.integrable, config.expect.integrable.or(Some(true))),
        ),
        Err(e) => Record::failed("nijenhuis_max", e),
    });
    out
}

fn coherent_report(config: &RunConfig) -> Vec<Record> {
    let tol = &config.tolerances;
    let fock = config.fock.expect("validated");
    let space = match FockSpace::single(fock.dimension) {
        Ok(s) => s,
        Err(e) => return vec![Record::failed("fock", e)],
    };
    let ops = match build_operators(&space) {
        Ok(o) => o.into_iter().next().expect("one mode"),
        Err(e) => return vec![Record::failed("fock", e)],
    };
    let d = space.dim();
    let mut out = Vec::new();

    // below the top level [Q, P] = i exactly; the top entry carries the cutoff
    let comm = ops.q.commutator(&ops.p);
    let lower = d - 2;
    let target = DMatrix::<Complex64>::identity(d, d) * Complex64::i();
    let diff = comm.matrix() - target;
    let below_top = max_abs_c(&diff.view((0, 0), (lower + 1, lower + 1)).into_owned());
    out.push(Record::new(
        "heisenberg_commutator",
        json!({
            "max_deviation": below_top,
            "levels": [0, lower],
            "top_entry": cj(comm.matrix()[(d - 1, d - 1)]),
        }),
        Some(tol.commutator),
        below_top < tol.commutator,
    ));

    let vac = vacuum(&space);
    let vac_residual = ops.big_a.apply(&vac).norm();
    out.push(Record::new(
        "vacuum_annihilated",
        json!({"residual": vac_residual}),
        Some(tol.eigenvalue),
        vac_residual < tol.eigenvalue,
    ));

    for (k, &z) in config.states.iter().flatten().enumerate() {
        let z = Complex64::from(z);
        let state = match coherent(&space, &[z]) {
            Ok(s) => s,
            Err(e) => {
                out.push(Record::failed(format!("coherent[{k}]"), e));
                continue;
            }
        };
        let residual = (ops.big_a.apply(&state) - state.amplitudes() * z).norm();
        out.push(Record::new(
            format!("coherent[{k}].eigenvalue"),
            json!({"z": cj(z), "residual": residual}),
            Some(tol.eigenvalue),
            residual < tol.eigenvalue,
        ));
        let u = uncertainty_product(&state, &ops.q, &ops.p);
        out.push(Record::new(
            format!("coherent[{k}].uncertainty"),
            json!({"z": cj(z), "product": u, "deviation": (u - 0.5).abs()}),
            Some(tol.uncertainty),
            (u - 0.5).abs() < tol.uncertainty,
        ));
    }

    for &n in config.fock_levels.iter().flatten() {
        let name = format!("fock[{n}].uncertainty");
        match fock_state(&space, &[n]) {
            Ok(state) => {
                let u = uncertainty_product(&state, &ops.q, &ops.p);
                let exact = (2 * n + 1) as f64 / 2.0;
                out.push(Record::new(
                    name,
                    json!({"product": u, "expected": exact, "deviation": (u - exact).abs()}),
                    Some(tol.uncertainty),
                    (u - exact).abs() < tol.uncertainty,
                ));
            }
            Err(e) => out.push(Record::failed(name, e)),
        }
    }

    if let Some(q) = &config.quadrature {
        out.push(match resolution_of_unity(&space, &q.params(tol.resolution)) {
            Ok(r) => Record::new(
                "resolution_of_unity",
                json!({
                    "deviation": r.deviation,
                    "radius": q.radius,
                    "levels": q.levels,
                    "grid": [q.radial_nodes, q.angular_nodes],
                    "diagonal": r.diagonal(),
                }),
                Some(tol.resolution),
                r.pass,
            ),
            Err(e) => Record::failed("resolution_of_unity", e),
        });
    }
    out
}

fn classify_map(config: &RunConfig) -> Vec<Record> {
    let tol = config.tolerances.classification;
    let mut out = Vec::new();
    for (k, m) in config.linear_maps.iter().flatten().enumerate() {
        let name = m.name.clone().unwrap_or_else(|| format!("linear[{k}]"));
        let rec = square_matrix(&m.matrix)
            .and_then(|mat| classify_standard(&mat, tol).map_err(|e| e.to_string()))
            .map(|c| {
                Record::new(
                    name.clone(),
                    json!({
                        "label": c.quadrant.label(),
                        "symplectic_residual": c.symplectic_residual,
                        "complex_residual": c.complex_residual,
                        "canonical": c.canonical,
                        "holomorphic": c.holomorphic,
                    }),
                    Some(tol),
                    true,
                )
            });
        out.push(rec.unwrap_or_else(|e| Record::failed(name, e)));
    }
    if let Some(maps) = &config.transition_maps {
        let chart = match config.chart.as_ref().map(|c| c.build()) {
            Some(Ok(c)) => c,
            Some(Err(e)) => return vec![Record::failed("chart", e)],
            None => return vec![Record::failed("chart", "missing chart")],
        };
        for (k, t) in maps.iter().enumerate() {
            let name = t.name.clone().unwrap_or_else(|| format!("transition[{k}]"));
            let vars: Vec<String> = t.variables.clone().unwrap_or_else(|| chart.coordinate_names().to_vec());
            let rec = TransitionMap::parse_with(&vars, &t.components)
                .and_then(|map| cr_residual(&map, &chart, config.tolerances.residual))
                .map(|r| {
                    let label = if r.holomorphic { "holomorphic" } else { "nonholomorphic" };
                    Record::new(
                        name.clone(),
                        json!({
                            "label": label,
                            "max_residual": r.max_residual,
                            "worst_point": r.worst_point,
                            "worst_component": r.worst_component,
                            "worst_mode": r.worst_mode,
                        }),
                        Some(config.tolerances.residual),
                        true,
                    )
                });
            out.push(rec.unwrap_or_else(|e| Record::failed(name, e)));
        }
    }
    out
}

fn transform_vacuum(config: &RunConfig) -> Vec<Record> {
    let tol = config.tolerances.residual;
    let fock = config.fock.expect("validated");
    let poly = match config.lift.as_ref().expect("validated").build() {
        Ok(p) => p,
        Err(e) => return vec![Record::failed("lift", e)],
    };
    let space = match FockSpace::single(fock.dimension) {
        Ok(s) => s,
        Err(e) => return vec![Record::failed("fock", e)],
    };
    let mut out = Vec::new();
    out.push(match vacuum_transport_residual(&poly, &space) {
        Ok(r) => Record::new(
            "vacuum_transport",
            json!({"residual": r, "preserved": r < tol, "holomorphic": poly.is_holomorphic()}),
            Some(tol),
            expected(r < tol, config.expect.vacuum_preserved),
        ),
        Err(e) => Record::failed("vacuum_transport", e),
    });
    match lift_normal_ordered(&poly, &space) {
        Ok(g) => {
            for (k, &z) in config.states.iter().flatten().enumerate() {
                let z = Complex64::from(z);
                let name = format!("coherence[{k}]");
                match coherent(&space, &[z]) {
                    Ok(state) => {
                        let r = coherence_residual(&state, &g);
                        out.push(Record::new(
                            name,
                            json!({"z": cj(z), "residual": r, "preserved": r < tol}),
                            Some(tol),
                            expected(r < tol, config.expect.coherence_preserved),
                        ));
                    }
                    Err(e) => out.push(Record::failed(name, e)),
                }
            }
        }
        Err(e) => out.push(Record::failed("coherence", e)),
    }
    if poly.is_holomorphic() {
        out.push(match primed_vacuum(&poly, &space) {
            Ok(p) => Record::new(
                "primed_vacuum",
                json!({
                    "root": cj(p.root),
                    "residual": p.residual,
                    "is_unprimed_vacuum": p.is_unprimed_vacuum,
                }),
                Some(tol),
                p.residual < tol,
            ),
            Err(e) => Record::failed("primed_vacuum", e),
        });
    }
    out
}

fn matrix_json(m: SL2ZMatrix) -> Value {
    json!(m.rows())
}

fn torus(config: &RunConfig) -> Vec<Record> {
    let tol = &config.tolerances;
    let t = config.torus.as_ref().expect("validated");
    let mut taus = vec![("alpha", t.tau_alpha.as_str())];
    if let Some(b) = &t.tau_beta {
        taus.push(("beta", b.as_str()));
    }
    let mut out = Vec::new();
    let mut parsed = Vec::new();
    for (tag, src) in &taus {
        let tau = match parse_complex(src).and_then(TauPoint::new) {
            Ok(tau) => tau,
            Err(e) => {
                out.push(Record::failed(format!("tau_{tag}"), e));
                continue;
            }
        };
        parsed.push((*tag, tau));
        out.push(Record::new(
            format!("kahler[{tag}]"),
            json!({"tau": cj(tau.value()), "coefficient": kahler_coefficient(tau)}),
            None,
            true,
        ));
        out.push(match reduce_to_fundamental_domain(tau) {
            Ok(r) => Record::new(
                format!("reduction[{tag}]"),
                json!({
                    "reduced": cj(r.reduced.value()),
                    "matrix": matrix_json(r.matrix),
                    "steps": r.steps,
                }),
                None,
                true,
            ),
            Err(e) => Record::failed(format!("reduction[{tag}]"), e),
        });
    }
    if let [(_, alpha), (_, beta)] = parsed[..] {
        out.push(match classify_moduli_pair(alpha, beta) {
            Ok(c) => Record::new(
                "moduli",
                json!({
                    "label": c.label(),
                    "equivalent": c.equivalent,
                    "witness": c.witness.map(matrix_json),
                    "witness_residual": c.witness_residual,
                }),
                None,
                expected(c.equivalent, config.expect.equivalent),
            ),
            Err(e) => Record::failed("moduli", e),
        });
    }
    let samples: Vec<Complex64> = t.samples.iter().map(|&z| z.into()).collect();
    if samples.is_empty() {
        return out;
    }
    for (tag, tau) in &parsed {
        for (k, &z) in samples.iter().enumerate() {
            let name = format!("theta[{tag}][{k}]");
            out.push(match theta_with_accuracy(z, *tau, t.terms, tol.theta_accuracy) {
                Ok(v) => Record::new(
                    name,
                    json!({"z": cj(z), "value": cj(v.value), "tail_bound": v.tail_bound, "terms": v.terms}),
                    Some(tol.theta_accuracy),
                    true,
                ),
                Err(e) => Record::failed(name, e),
            });
        }
        let name = format!("quasi_periodicity[{tag}]");
        let residuals: Result<Vec<_>, _> = samples.iter().map(|&z| quasi_periodicity(z, *tau, t.terms)).collect();
        out.push(match residuals {
            Ok(rs) => {
                let real = rs.iter().map(|r| r.real_period).fold(0.0, f64::max);
                let shifted = rs.iter().map(|r| r.tau_period).fold(0.0, f64::max);
                Record::new(
                    name,
                    json!({"real_period": real, "tau_period": shifted, "samples": samples.len()}),
                    Some(tol.quasi_periodicity),
                    real < tol.quasi_periodicity && shifted < tol.quasi_periodicity,
                )
            }
            Err(e) => Record::failed(name, e),
        });
    }
    out
}

fn eigen_residual(space: &FoliatedSpace, h: &HybridState) -> Result<(f64, f64), String> {
    let mut leaf = 0.0_f64;
    for (i, &z) in h.z.iter().enumerate() {
        let a = space.leaf_annihilator(i).map_err(|e| e.to_string())?;
        leaf = leaf.max((a.apply(&h.state) - h.state.amplitudes() * z).norm());
    }
    let mut comp = 0.0_f64;
    for (j, &w) in h.w.iter().enumerate() {
        let a = space.complement_annihilator(j).map_err(|e| e.to_string())?;
        comp = comp.max((a.apply(&h.state) - h.state.amplitudes() * w).norm());
    }
    Ok((leaf, comp))
}

fn foliate(config: &RunConfig) -> Vec<Record> {
    let tol = &config.tolerances;
    let f = config.foliation.as_ref().expect("validated");
    let spec = match f.complement_chart.build().and_then(|chart| {
        f.complement_structure
            .build(&chart)
            .map(|structure| ComplementSpec { structure, chart })
    }) {
        Ok(s) => s,
        Err(e) => return vec![Record::failed("foliation", e)],
    };
    let options = BuildOptions {
        structure_tol: tol.compatibility,
        nijenhuis_tol: tol.nijenhuis,
    };
    let space = match build_foliated(f.m, f.n, f.leaf_dimension, f.complement_dimension, spec, options) {
        Ok(s) => s,
        Err(e) => return vec![Record::failed("foliation", e)],
    };
    let mut out = Vec::new();
    let ortho = space.block_orthogonality();
    out.push(Record::new(
        "block_orthogonality",
        json!({"max_cross_entry": ortho}),
        Some(0.0),
        ortho == 0.0,
    ));
    let split = space.split_residual();
    out.push(Record::new(
        "split_residual",
        json!({"residual": split}),
        Some(0.0),
        split == 0.0,
    ));
    let leaf = space.leaf_report();
    out.push(Record::new(
        "leaf_integrable",
        json!({"max_norm": leaf.max_norm, "integrable": leaf.integrable}),
        Some(tol.nijenhuis),
        space.leaf_globally_coherent(),
    ));
    let comp = space.complement_report();
    out.push(Record::new(
        "complement_integrable",
        json!({
            "max_norm": comp.max_norm,
            "worst_point": comp.worst_point,
            "integrable": comp.integrable,
            "ambient": space.is_ambient(),
        }),
        Some(tol.nijenhuis),
        expected(comp.integrable, config.expect.complement_integrable),
    ));

    let mut states = Vec::new();
    for (k, (z, w)) in f.z.iter().zip(&f.w).enumerate() {
        let z: Vec<Complex64> = z.iter().map(|&c| c.into()).collect();
        let w: Vec<Complex64> = w.iter().map(|&c| c.into()).collect();
        let name = format!("hybrid[{k}]");
        let h = match hybrid_coherent(&space, &z, &w) {
            Ok(h) => h,
            Err(e) => {
                out.push(Record::failed(name, e));
                continue;
            }
        };
        out.push(match eigen_residual(&space, &h) {
            Ok((lr, cr)) => Record::new(
                name,
                json!({
                    "z": cjs(&z),
                    "w": cjs(&w),
                    "leaf_residual": lr,
                    "complement_residual": cr,
                    "leaf_globally_coherent": h.leaf_globally_coherent,
                    "complement_chart_local": h.complement_chart_local,
                }),
                Some(tol.eigenvalue),
                lr < tol.eigenvalue && cr < tol.eigenvalue,
            ),
            Err(e) => Record::failed(name, e),
        });
        states.push(h);
    }
    if !states.is_empty() {
        let mut worst = 0.0_f64;
        for (i, a) in states.iter().enumerate() {
            for b in &states[i..] {
                worst = worst.max(overlap_factorization_residual(a, b));
            }
        }
        out.push(Record::new(
            "overlap_factorization",
            json!({"max_residual": worst, "pairs": states.len() * (states.len() + 1) / 2}),
            Some(tol.factorization),
            worst < tol.factorization,
        ));
    }

    let zero = |k: usize| vec![Complex64::new(0.0, 0.0); k];
    if let Some(q) = &f.leaf_quadrature {
        let w: Vec<Complex64> =
            f.w.first()
                .map(|w| w.iter().map(|&c| c.into()).collect())
                .unwrap_or_else(|| zero(f.n - f.m));
        out.push(match leaf_resolution(&space, &w, &q.params(tol.resolution)) {
            Ok(r) => Record::new(
                "leaf_resolution",
                json!({"deviation": r.deviation, "radius": q.radius, "levels": q.levels}),
                Some(r.tolerance),
                r.pass,
            ),
            Err(e) => Record::failed("leaf_resolution", e),
        });
    }
    if let Some(q) = &f.complement_quadrature {
        let z: Vec<Complex64> =
            f.z.first()
                .map(|z| z.iter().map(|&c| c.into()).collect())
                .unwrap_or_else(|| zero(f.m));
        out.push(match complement_resolution(&space, &z, &q.params(tol.resolution)) {
            Ok(r) => Record::new(
                "complement_resolution",
                json!({"deviation": r.deviation, "radius": q.radius, "levels": q.levels, "bound": "deviation ≥ threshold"}),
                Some(r.tolerance),
                r.pass,
            ),
            Err(e) => Record::failed("complement_resolution", e),
        });
    }
    out
}
