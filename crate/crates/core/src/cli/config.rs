//! Run configuration: JSON schema, defaults and semantic validation.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::expr::Expr;
use crate::fock::{truncation_bound, FockSpace, QuadratureParams};
use crate::linalg::ComplexJson;
use crate::phase_space::{AlmostComplexStructure, Axis, Chart};
use crate::torus::parse_complex;
use crate::transform::{PolynomialLift, TransitionMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckIntegrability,
    CoherentReport,
    ClassifyMap,
    TransformVacuum,
    Torus,
    Foliate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckIntegrability => "check-integrability",
            Command::CoherentReport => "coherent-report",
            Command::ClassifyMap => "classify-map",
            Command::TransformVacuum => "transform-vacuum",
            Command::Torus => "torus",
            Command::Foliate => "foliate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub chart: Option<ChartConfig>,
    pub structure: Option<StructureConfig>,
    pub fock: Option<FockConfig>,
    pub quadrature: Option<QuadratureConfig>,
    /// Coherent-state eigenvalues (A-convention).
    pub states: Option<Vec<ComplexJson>>,
    /// Number states for uncertainty checks.
    pub fock_levels: Option<Vec<usize>>,
    pub linear_maps: Option<Vec<LinearMapConfig>>,
    pub transition_maps: Option<Vec<TransitionConfig>>,
    pub lift: Option<LiftConfig>,
    pub torus: Option<TorusConfig>,
    pub foliation: Option<FoliationConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub expect: Expectations,
    /// Report path, overridden by `--out`.
    pub output: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub n: usize,
    /// One axis per coordinate; otherwise `min`, `max`, `count` apply to all.
    pub axes: Option<Vec<Axis>>,
    #[serde(default = "default_min")]
    pub min: f64,
    #[serde(default = "default_max")]
    pub max: f64,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_min() -> f64 {
    -1.0
}
fn default_max() -> f64 {
    1.0
}
fn default_count() -> usize {
    9
}

impl ChartConfig {
    pub fn build(&self) -> Result<Chart, String> {
        let axes = match &self.axes {
            Some(a) => a.clone(),
            None => vec![
                Axis {
                    min: self.min,
                    max: self.max,
                    count: self.count,
                };
                2 * self.n
            ],
        };
        Chart::new(self.n, axes).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StructureConfig {
    Standard,
    Constant {
        matrix: Vec<Vec<f64>>,
    },
    Rotated {
        angle: String,
        /// 0-based coordinate pair of the plane rotation.
        axes: Option<[usize; 2]>,
        /// Explicit generator, used instead of `axes`.
        generator: Option<Vec<Vec<f64>>>,
    },
    Explicit {
        entries: Vec<Vec<String>>,
    },
}

pub(crate) fn square_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err("must be a non-empty square matrix".into());
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err("entries must be finite".into());
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

impl StructureConfig {
    /// Builds the structure on `chart`'s coordinates.
    pub fn build(&self, chart: &Chart) -> Result<AlmostComplexStructure, String> {
        let n = chart.degrees_of_freedom();
        let names = chart.coordinate_names();
        match self {
            StructureConfig::Standard => Ok(AlmostComplexStructure::standard(n)),
            StructureConfig::Constant { matrix } => {
                let m = square_matrix(matrix)?;
                if m.nrows() != chart.dim() {
                    return Err(format!("matrix must be {0}×{0}", chart.dim()));
                }
                AlmostComplexStructure::constant(m).map_err(|e| e.to_string())
            }
            StructureConfig::Rotated { angle, axes, generator } => {
                let theta = Expr::parse(angle, names).map_err(|e| format!("angle: {e}"))?;
                match (axes, generator) {
                    (Some([a, b]), None) => {
                        AlmostComplexStructure::rotated(theta, (*a, *b), n).map_err(|e| e.to_string())
                    }
                    (None, Some(g)) => {
                        let g = square_matrix(g)?;
                        if g.nrows() != chart.dim() {
                            return Err(format!("generator must be {0}×{0}", chart.dim()));
                        }
                        AlmostComplexStructure::rotated_with_generator(theta, g).map_err(|e| e.to_string())
                    }
                    _ => Err("give exactly one of axes or generator".into()),
                }
            }
            StructureConfig::Explicit { entries } => {
                let d = chart.dim();
                if entries.len() != d || entries.iter().any(|r| r.len() != d) {
                    return Err(format!("entries must be {d}×{d}"));
                }
                let parsed = entries
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, s)| Expr::parse(s, names).map_err(|e| format!("entry ({i}, {j}): {e}")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                AlmostComplexStructure::explicit(parsed).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    pub dimension: usize,
    #[serde(default = "one")]
    pub modes: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub radius: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub levels: usize,
}

impl QuadratureConfig {
    pub fn params(&self, tolerance: f64) -> QuadratureParams {
        QuadratureParams {
            radius: self.radius,
            radial_nodes: self.radial_nodes,
            angular_nodes: self.angular_nodes,
            levels: self.levels,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMapConfig {
    pub name: Option<String>,
    /// Row-major `2n × 2n`.
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    pub name: Option<String>,
    pub components: Vec<String>,
    /// Coordinate names `(q1..qn, p1..pn)`; defaults to the chart's.
    pub variables: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftTerm {
    /// Power of `w`.
    pub m: usize,
    /// Power of `w̄`.
    pub k: usize,
    pub c: ComplexJson,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    pub terms: Vec<LiftTerm>,
}

impl LiftConfig {
    pub fn build(&self) -> Result<PolynomialLift, String> {
        PolynomialLift::new(self.terms.iter().map(|t| ((t.m, t.k), Complex64::from(t.c)))).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    pub tau_alpha: String,
    pub tau_beta: Option<String>,
    #[serde(default = "default_terms")]
    pub terms: usize,
    /// Sample points for θ and the lattice relations.
    #[serde(default)]
    pub samples: Vec<ComplexJson>,
}

fn default_terms() -> usize {
    50
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationConfig {
    pub m: usize,
    pub n: usize,
    pub leaf_dimension: usize,
    pub complement_dimension: usize,
    pub complement_chart: ChartConfig,
    pub complement_structure: StructureConfig,
    /// Leaf parameters of the hybrid states.
    #[serde(default)]
    pub z: Vec<Vec<ComplexJson>>,
    /// Complement parameters, paired with `z`.
    #[serde(default)]
    pub w: Vec<Vec<ComplexJson>>,
    pub leaf_quadrature: Option<QuadratureConfig>,
    pub complement_quadrature: Option<QuadratureConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub acs: f64,
    pub compatibility: f64,
    pub nijenhuis: f64,
    pub commutator: f64,
    pub eigenvalue: f64,
    pub uncertainty: f64,
    pub resolution: f64,
    pub residual: f64,
    pub classification: f64,
    pub quasi_periodicity: f64,
    pub theta_accuracy: f64,
    pub factorization: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            acs: 1e-10,
            compatibility: 1e-9,
            nijenhuis: 1e-6,
            commutator: 1e-12,
            eigenvalue: 1e-8,
            uncertainty: 1e-6,
            resolution: 1e-3,
            residual: 1e-8,
            classification: 1e-10,
            quasi_periodicity: 1e-10,
            theta_accuracy: 1e-12,
            factorization: 1e-10,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 12] {
        [
            ("acs", self.acs),
            ("compatibility", self.compatibility),
            ("nijenhuis", self.nijenhuis),
            ("commutator", self.commutator),
            ("eigenvalue", self.eigenvalue),
            ("uncertainty", self.uncertainty),
            ("resolution", self.resolution),
            ("residual", self.residual),
            ("classification", self.classification),
            ("quasi_periodicity", self.quasi_periodicity),
            ("theta_accuracy", self.theta_accuracy),
            ("factorization", self.factorization),
        ]
    }
}

/// Optional assertions turning informational records into checks.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub integrable: Option<bool>,
    pub compatible: Option<bool>,
    pub vacuum_preserved: Option<bool>,
    pub coherence_preserved: Option<bool>,
    pub equivalent: Option<bool>,
    pub complement_integrable: Option<bool>,
}

/// One schema or semantic problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

/// Parses and validates; returns the config or every diagnostic found.
pub fn load(source: &str) -> Result<RunConfig, Vec<Diagnostic>> {
    let mut de = serde_json::Deserializer::from_str(source);
    let config: RunConfig = match serde_path_to_error::deserialize(&mut de) {
        Ok(c) => c,
        Err(e) => return Err(vec![schema_diagnostic(&e)]),
    };
    if let Err(e) = de.end() {
        return Err(vec![Diagnostic {
            path: String::new(),
            message: e.to_string(),
        }]);
    }
    let diagnostics = validate(&config);
    if diagnostics.is_empty() {
        Ok(config)
    } else {
        Err(diagnostics)
    }
}

fn schema_diagnostic(e: &serde_path_to_error::Error<serde_json::Error>) -> Diagnostic {
    let mut path = e.path().to_string();
    if path == "." {
        path.clear();
    }
    let inner = e.inner().to_string();
    // point "missing field" errors at the field itself
    if let Some(rest) = inner.strip_prefix("missing field `") {
        if let Some(field) = rest.split('`').next() {
            path = if path.is_empty() {
                field.to_string()
            } else {
                format!("{path}.{field}")
            };
        }
    }
    let message = match inner.find(" at line ") {
        Some(k) => inner[..k].to_string(),
        None => inner,
    };
    Diagnostic { path, message }
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            path: path.into(),
            message: message.into(),
        });
    }

    fn require<T>(&mut self, value: &Option<T>, path: &str, command: Command) -> bool {
        if value.is_none() {
            self.push(path, format!("required for command {command}"));
            return false;
        }
        true
    }
}

fn check_complex(c: &mut Collector, path: &str, z: ComplexJson) {
    if !(z.re.is_finite() && z.im.is_finite()) {
        c.push(path, "must be finite");
    }
}

fn check_fock(c: &mut Collector, fock: &FockConfig) {
    if fock.dimension < 2 {
        c.push("fock.dimension", "must be ≥ 2");
    }
    if fock.modes == 0 {
        c.push("fock.modes", "must be > 0");
    }
    if fock.dimension >= 2 && fock.modes > 0 {
        if let Err(e) = FockSpace::new(fock.dimension, fock.modes) {
            c.push("fock", e.to_string());
        }
    }
}

fn check_quadrature(c: &mut Collector, path: &str, q: &QuadratureConfig, dim: usize) {
    if !(q.radius.is_finite() && q.radius > 0.0) {
        c.push(format!("{path}.radius"), "must be > 0");
    }
    if q.radial_nodes == 0 {
        c.push(format!("{path}.radial_nodes"), "must be > 0");
    }
    if q.angular_nodes == 0 {
        c.push(format!("{path}.angular_nodes"), "must be > 0");
    }
    if 4 * q.levels > dim {
        c.push(format!("{path}.levels"), format!("must be ≤ D/4 = {}", dim / 4));
    }
}

fn check_states(c: &mut Collector, path: &str, states: &[ComplexJson], dim: usize) {
    let bound = truncation_bound(dim);
    for (k, z) in states.iter().enumerate() {
        let p = format!("{path}[{k}]");
        check_complex(c, &p, *z);
        if Complex64::from(*z).norm() > bound {
            c.push(p, format!("|z| exceeds the truncation bound {bound:.6}"));
        }
    }
}

/// Semantic checks beyond the schema.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut c = Collector(Vec::new());
    for (name, value) in config.tolerances.entries() {
        if !(value.is_finite() && value > 0.0) {
            c.push(format!("tolerances.{name}"), "must be > 0");
        }
    }
    let cmd = config.command;
    let chart = config.chart.as_ref().map(|ch| match ch.build() {
        Ok(chart) => Some(chart),
        Err(e) => {
            c.push("chart", e);
            None
        }
    });
    match cmd {
        Command::CheckIntegrability => {
            let has_chart = c.require(&config.chart, "chart", cmd);
            let has_structure = c.require(&config.structure, "structure", cmd);
            if let (true, true, Some(Some(chart))) = (has_chart, has_structure, &chart) {
                if let Err(e) = config.structure.as_ref().expect("checked").build(chart) {
                    c.push("structure", e);
                }
            }
        }
        Command::CoherentReport => {
            if c.require(&config.fock, "fock", cmd) {
                let fock = config.fock.expect("checked");
                check_fock(&mut c, &fock);
                if fock.modes != 1 {
                    c.push("fock.modes", "coherent-report uses a single mode");
                }
                if let Some(states) = &config.states {
                    check_states(&mut c, "states", states, fock.dimension);
                }
                if let Some(levels) = &config.fock_levels {
                    for (k, &n) in levels.iter().enumerate() {
                        if n + 1 >= fock.dimension {
                            c.push(format!("fock_levels[{k}]"), "must be below fock.dimension − 1");
                        }
                    }
                }
                if let Some(q) = &config.quadrature {
                    check_quadrature(&mut c, "quadrature", q, fock.dimension);
                }
            }
        }
        Command::ClassifyMap => {
            if config.linear_maps.is_none() && config.transition_maps.is_none() {
                c.push("linear_maps", "classify-map needs linear_maps or transition_maps");
            }
            for (k, m) in config.linear_maps.iter().flatten().enumerate() {
                match square_matrix(&m.matrix) {
                    Ok(mat) if !mat.nrows().is_multiple_of(2) => {
                        c.push(format!("linear_maps[{k}].matrix"), "dimension must be even")
                    }
                    Ok(_) => {}
                    Err(e) => c.push(format!("linear_maps[{k}].matrix"), e),
                }
            }
            if let Some(maps) = &config.transition_maps {
                let has_chart = c.require(&config.chart, "chart", cmd);
                for (k, t) in maps.iter().enumerate() {
                    let vars: Vec<String> = match (&t.variables, &chart) {
                        (Some(v), _) => v.clone(),
                        (None, Some(Some(ch))) => ch.coordinate_names().to_vec(),
                        _ => continue,
                    };
                    if let (true, Some(Some(ch))) = (has_chart, &chart) {
                        if vars.len() != ch.dim() {
                            c.push(
                                format!("transition_maps[{k}].variables"),
                                format!("must list {} names", ch.dim()),
                            );
                            continue;
                        }
                    }
                    if let Err(e) = TransitionMap::parse_with(&vars, &t.components) {
                        c.push(format!("transition_maps[{k}].components"), e.to_string());
                    }
                }
            }
        }
        Command::TransformVacuum => {
            if c.require(&config.fock, "fock", cmd) {
                let fock = config.fock.expect("checked");
                check_fock(&mut c, &fock);
                if fock.modes != 1 {
                    c.push("fock.modes", "lifts act on a single mode");
                }
                if let Some(states) = &config.states {
                    check_states(&mut c, "states", states, fock.dimension);
                }
                if let Some(lift) = &config.lift {
                    let cap = fock.dimension / 4;
                    for (k, t) in lift.terms.iter().enumerate() {
                        check_complex(&mut c, &format!("lift.terms[{k}].c"), t.c);
                        if t.m + t.k > cap {
                            c.push(format!("lift.terms[{k}]"), format!("degree must be ≤ D/4 = {cap}"));
                        }
                    }
                    if lift.terms.is_empty() {
                        c.push("lift.terms", "must not be empty");
                    }
                }
            }
            c.require(&config.lift, "lift", cmd);
        }
        Command::Torus => {
            if c.require(&config.torus, "torus", cmd) {
                let t = config.torus.as_ref().expect("checked");
                let taus = [
                    ("torus.tau_alpha", Some(&t.tau_alpha)),
                    ("torus.tau_beta", t.tau_beta.as_ref()),
                ];
                for (path, tau) in taus {
                    if let Some(s) = tau {
                        match parse_complex(s) {
                            Ok(z) if z.im > 0.0 => {}
                            Ok(_) => c.push(path, "must have positive imaginary part"),
                            Err(e) => c.push(path, e.to_string()),
                        }
                    }
                }
                if t.terms == 0 {
                    c.push("torus.terms", "must be > 0");
                }
                for (k, z) in t.samples.iter().enumerate() {
                    check_complex(&mut c, &format!("torus.samples[{k}]"), *z);
                }
            }
        }
        Command::Foliate => {
            if c.require(&config.foliation, "foliation", cmd) {
                let f = config.foliation.as_ref().expect("checked");
                if f.m == 0 || f.m >= f.n {
                    c.push("foliation.m", "must satisfy 0 < m < n");
                }
                for (path, d) in [
                    ("foliation.leaf_dimension", f.leaf_dimension),
                    ("foliation.complement_dimension", f.complement_dimension),
                ] {
                    if d < 2 {
                        c.push(path, "must be ≥ 2");
                    }
                }
                match f.complement_chart.build() {
                    Ok(chart) => {
                        if let Err(e) = f.complement_structure.build(&chart) {
                            c.push("foliation.complement_structure", e);
                        }
                    }
                    Err(e) => c.push("foliation.complement_chart", e),
                }
                if f.z.len() != f.w.len() {
                    c.push("foliation.w", "must have one entry per entry of foliation.z");
                }
                for (k, z) in f.z.iter().enumerate() {
                    if z.len() != f.m {
                        c.push(format!("foliation.z[{k}]"), format!("must have {} entries", f.m));
                    }
                    check_states(&mut c, &format!("foliation.z[{k}]"), z, f.leaf_dimension);
                }
                for (k, w) in f.w.iter().enumerate() {
                    if w.len() != f.n.saturating_sub(f.m) {
                        c.push(
                            format!("foliation.w[{k}]"),
                            format!("must have {} entries", f.n.saturating_sub(f.m)),
                        );
                    }
                    check_states(&mut c, &format!("foliation.w[{k}]"), w, f.complement_dimension);
                }
                if let Some(q) = &f.leaf_quadrature {
                    check_quadrature(&mut c, "foliation.leaf_quadrature", q, f.leaf_dimension);
                }
                if let Some(q) = &f.complement_quadrature {
                    check_quadrature(&mut c, "foliation.complement_quadrature", q, f.complement_dimension);
                    if 4 * q.levels > f.leaf_dimension {
                        c.push("foliation.complement_quadrature.levels", "must be ≤ leaf_dimension/4");
                    }
                }
            }
        }
    }
    c.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diags(src: &str) -> Vec<Diagnostic> {
        match load(src) {
            Ok(_) => Vec::new(),
            Err(d) => d,
        }
    }

    #[test]
    fn missing_nested_field_names_its_path() {
        let d = diags(r#"{"command": "coherent-report", "fock": {"modes": 1}}"#);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "fock.dimension");
    }

    #[test]
    fn negative_tolerance() {
        let d = diags(
            r#"{"command": "check-integrability", "chart": {"n": 1}, "structure": {"kind": "standard"},
                "tolerances": {"nijenhuis": -1}}"#,
        );
        assert_eq!(
            d,
            vec![Diagnostic {
                path: "tolerances.nijenhuis".into(),
                message: "must be > 0".into()
            }]
        );
    }

    #[test]
    fn unknown_fields_and_commands_are_rejected() {
        let d = diags(r#"{"command": "frobnicate"}"#);
        assert_eq!(d[0].path, "command");
        let d = diags(r#"{"command": "torus", "torus": {"tau_alpha": "i", "colour": 1}}"#);
        assert_eq!(d[0].path, "torus.colour");
        assert!(d[0].message.starts_with("unknown field"), "{}", d[0].message);
    }

    #[test]
    fn semantic_errors_accumulate() {
        let d = diags(
            r#"{"command": "foliate", "foliation": {"m": 2, "n": 2, "leaf_dimension": 1,
                "complement_dimension": 8, "complement_chart": {"n": 1},
                "complement_structure": {"kind": "rotated", "angle": "x", "axes": [0, 1]}}}"#,
        );
        let paths: Vec<&str> = d.iter().map(|d| d.path.as_str()).collect();
        assert_eq!(
            paths,
            [
                "foliation.m",
                "foliation.leaf_dimension",
                "foliation.complement_structure"
            ]
        );
    }

    #[test]
    fn required_sections() {
        let d = diags(r#"{"command": "check-integrability"}"#);
        let paths: Vec<&str> = d.iter().map(|d| d.path.as_str()).collect();
        assert_eq!(paths, ["chart", "structure"]);
    }

    #[test]
    fn valid_minimal_configs() {
        assert!(diags(r#"{"command": "torus", "torus": {"tau_alpha": "i", "tau_beta": "2i"}}"#).is_empty());
        assert!(diags(r#"{"command": "classify-map", "linear_maps": [{"matrix": [[2, 0], [0, 2]]}]}"#).is_empty());
    }

    #[test]
    fn trailing_garbage_is_an_error() {
        assert!(!diags(r#"{"command": "torus", "torus": {"tau_alpha": "i"}} x"#).is_empty());
    }
}
