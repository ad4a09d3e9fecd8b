//! Product phase spaces `R^{2m} × R^{2(n−m)}` split into a holomorphic leaf
//! and a complement carrying a (generally non-integrable) structure, with
//! hybrid coherent states and the leafwise resolution of unity.
//!
//! Leaf coordinates are `(q1..qm, p1..pm)` and complement coordinates
//! `(q_{m+1}..qn, p_{m+1}..pn)` inside the block order of `R^{2n}`. State
//! vectors are `leaf ⊗ complement`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::fock::{
    build_operators, coherent, disk_integral, FockError, FockSpace, Operator, QuadratureParams, StateVector,
    DEFAULT_MAX_DIM,
};
use crate::linalg::{max_abs, operator_norm};
use crate::phase_space::{
    check_acs, check_compatibility, nijenhuis, AlmostComplexStructure, Chart, NijenhuisReport, PhaseSpaceError,
    SymplecticForm,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FoliationError {
    #[error("leaf rank must satisfy 0 < m < n, got m = {m}, n = {n}")]
    Rank { m: usize, n: usize },
    #[error("complement structure: {0}")]
    Structure(String),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{0}")]
    Mismatch(String),
}

/// The complement's almost complex structure and the chart it is checked
/// on. The structure either lives on the complement `R^{2(n−m)}` or on the
/// ambient `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementSpec {
    pub structure: AlmostComplexStructure,
    pub chart: Chart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Threshold for `J² + I` and the compatibility residuals.
    pub structure_tol: f64,
    pub nijenhuis_tol: f64,
}

impl Default for BuildOptions {
    fn default() -> BuildOptions {
        BuildOptions {
            structure_tol: 1e-9,
            nijenhuis_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FoliatedSpace {
    m: usize,
    n: usize,
    leaf: FockSpace,
    complement: FockSpace,
    omega: SymplecticForm,
    complement_spec: ComplementSpec,
    ambient: bool,
    leaf_report: NijenhuisReport,
    complement_report: NijenhuisReport,
}

pub fn build_foliated(
    m: usize,
    n: usize,
    d_leaf: usize,
    d_comp: usize,
    complement: ComplementSpec,
    options: BuildOptions,
) -> Result<FoliatedSpace, FoliationError> {
    if m == 0 || m >= n {
        return Err(FoliationError::Rank { m, n });
    }
    let j = &complement.structure;
    let chart = &complement.chart;
    if j.dim() != chart.dim() {
        return Err(FoliationError::Mismatch(format!(
            "complement structure has dimension {}, its chart {}",
            j.dim(),
            chart.dim()
        )));
    }
    let ambient = if j.dim() == 2 * n {
        true
    } else if j.dim() == 2 * (n - m) {
        false
    } else {
        return Err(FoliationError::Mismatch(format!(
            "complement structure must act on R^{} or R^{}, got R^{}",
            2 * (n - m),
            2 * n,
            j.dim()
        )));
    };
    let acs = check_acs(j, chart, options.structure_tol)?;
    if !acs.pass {
        return Err(FoliationError::Structure(format!(
            "J² = −1 fails: max deviation {:e} at {:?}",
            acs.max_deviation, acs.worst_point
        )));
    }
    let omega_c = SymplecticForm::standard(j.dim() / 2);
    let compat = check_compatibility(j, &omega_c, chart, options.structure_tol)?;
    if !compat.pass {
        return Err(FoliationError::Structure(format!(
            "not compatible with ω: residual {:e}, metric asymmetry {:e}, min eigenvalue {:e}",
            compat.max_residual, compat.metric_asymmetry, compat.min_metric_eigenvalue
        )));
    }
    let leaf = FockSpace::new(d_leaf, m)?;
    let comp = FockSpace::new(d_comp, n - m)?;
    let total = leaf.total_dim().saturating_mul(comp.total_dim());
    if total > DEFAULT_MAX_DIM {
        return Err(FockError::MemoryCap {
            dim: total,
            cap: DEFAULT_MAX_DIM,
        }
        .into());
    }
    let leaf_j = AlmostComplexStructure::standard(m);
    let leaf_report = nijenhuis(&leaf_j, &Chart::standard(m)?, options.nijenhuis_tol)?;
    let complement_report = nijenhuis(j, chart, options.nijenhuis_tol)?;
    Ok(FoliatedSpace {
        m,
        n,
        leaf,
        complement: comp,
        omega: SymplecticForm::standard(n),
        complement_spec: complement,
        ambient,
        leaf_report,
        complement_report,
    })
}

impl FoliatedSpace {
    pub fn leaf_rank(&self) -> usize {
        self.m
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.n
    }

    pub fn leaf_space(&self) -> &FockSpace {
        &self.leaf
    }

    pub fn complement_space(&self) -> &FockSpace {
        &self.complement
    }

    pub fn omega(&self) -> &SymplecticForm {
        &self.omega
    }

    pub fn complement_spec(&self) -> &ComplementSpec {
        &self.complement_spec
    }

    /// The complement structure was given on the ambient `R^{2n}`.
    pub fn is_ambient(&self) -> bool {
        self.ambient
    }

    pub fn leaf_report(&self) -> &NijenhuisReport {
        &self.leaf_report
    }

    pub fn complement_report(&self) -> &NijenhuisReport {
        &self.complement_report
    }

    /// Leaf states are coherent globally iff the leaf structure is integrable.
    pub fn leaf_globally_coherent(&self) -> bool {
        self.leaf_report.integrable
    }

    pub fn complement_integrable(&self) -> bool {
        self.complement_report.integrable
    }

    pub fn total_dim(&self) -> usize {
        self.leaf.total_dim() * self.complement.total_dim()
    }

    /// Coordinate indices of the leaf in `R^{2n}`.
    pub fn leaf_indices(&self) -> Vec<usize> {
        (0..self.m).chain(self.n..self.n + self.m).collect()
    }

    pub fn complement_indices(&self) -> Vec<usize> {
        (self.m..self.n).chain(self.n + self.m..2 * self.n).collect()
    }

    /// `max |ω(e_a, e_b)|` over leaf `a` and complement `b`.
    pub fn block_orthogonality(&self) -> f64 {
        let w = self.omega.matrix();
        let mut worst = 0.0_f64;
        for &a in &self.leaf_indices() {
            for &b in &self.complement_indices() {
                worst = worst.max(w[(a, b)].abs()).max(w[(b, a)].abs());
            }
        }
        worst
    }

    /// `max |Ω − Ω_L − Ω_L̃|` with each block embedded in `R^{2n}`.
    pub fn split_residual(&self) -> f64 {
        let embed = |idx: &[usize], k: usize| {
            let block = SymplecticForm::standard(k);
            let mut out = DMatrix::zeros(2 * self.n, 2 * self.n);
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    out[(i, j)] = block.matrix()[(r, c)];
                }
            }
            out
        };
        let leaf = embed(&self.leaf_indices(), self.m);
        let comp = embed(&self.complement_indices(), self.n - self.m);
        max_abs(&(self.omega.matrix() - leaf - comp))
    }

    /// `A_leaf^k ⊗ I` on the full space.
    pub fn leaf_annihilator(&self, mode: usize) -> Result<Operator, FoliationError> {
        let ops = build_operators(&self.leaf)?;
        let a = ops
            .get(mode)
            .ok_or_else(|| FoliationError::Mismatch(format!("no leaf mode {mode}")))?;
        Ok(a.big_a.kron_identity(self.complement.total_dim(), true))
    }

    /// `I ⊗ A_comp^j` on the full space.
    pub fn complement_annihilator(&self, mode: usize) -> Result<Operator, FoliationError> {
        let ops = build_operators(&self.complement)?;
        let a = ops
            .get(mode)
            .ok_or_else(|| FoliationError::Mismatch(format!("no complement mode {mode}")))?;
        Ok(a.big_a.kron_identity(self.leaf.total_dim(), false))
    }
}

/// `|z; w⟩ = |z⟩_leaf ⊗ |w⟩_complement`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub leaf: StateVector,
    pub complement: StateVector,
    pub state: StateVector,
    pub leaf_globally_coherent: bool,
    /// The complement factor is coherent only in the chart it was built in.
    pub complement_chart_local: bool,
}

pub fn hybrid_coherent(space: &FoliatedSpace, z: &[Complex64], w: &[Complex64]) -> Result<HybridState, FoliationError> {
    let leaf = coherent(&space.leaf, z)?;
    let complement = coherent(&space.complement, w)?;
    let state = leaf.kron(&complement);
    Ok(HybridState {
        z: z.to_vec(),
        w: w.to_vec(),
        leaf,
        complement,
        state,
        leaf_globally_coherent: space.leaf_globally_coherent(),
        complement_chart_local: !space.complement_integrable(),
    })
}

/// `|⟨a|b⟩ − ⟨z_a|z_b⟩⟨w_a|w_b⟩|`, computed on the full product vectors.
pub fn overlap_factorization_residual(a: &HybridState, b: &HybridState) -> f64 {
    let full = a.state.inner(&b.state);
    let split = a.leaf.inner(&b.leaf) * a.complement.inner(&b.complement);
    (full - split).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoliatedResolution {
    /// Operator-norm distance to the target form on the compared block.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn single_mode_quadrature(space: &FockSpace, params: &QuadratureParams, side: &str) -> Result<(), FoliationError> {
    if space.modes() != 1 {
        return Err(FoliationError::Mismatch(format!(
            "{side} quadrature needs a single {side} mode, got {}",
            space.modes()
        )));
    }
    if !(params.radius.is_finite() && params.radius > 0.0) || params.radial_nodes == 0 || params.angular_nodes == 0 {
        return Err(FockError::Quadrature("invalid radius or node counts".into()).into());
    }
    if 4 * params.levels > space.dim() {
        return Err(
            FockError::Quadrature(format!("levels {} exceed D/4 for D = {}", params.levels, space.dim())).into(),
        );
    }
    Ok(())
}

fn rank_one(v: &StateVector) -> DMatrix<Complex64> {
    let a = v.amplitudes();
    a * a.adjoint()
}

/// `Σ_L = ∫ dμ(z) |z; w⟩⟨z; w|` over the leaf disk, restricted to leaf
/// levels `0..=K`, compared with `P_K ⊗ |w⟩⟨w|`. The integral factorizes
/// into the single-mode disk integral times the fixed complement projector.
pub fn leaf_resolution(
    space: &FoliatedSpace,
    w: &[Complex64],
    params: &QuadratureParams,
) -> Result<FoliatedResolution, FoliationError> {
    single_mode_quadrature(&space.leaf, params, "leaf")?;
    let comp = coherent(&space.complement, w)?;
    let size = params.levels + 1;
    let sigma = disk_integral(
        space.leaf.dim(),
        params.radius,
        params.radial_nodes,
        params.angular_nodes,
        size,
    );
    let rho = rank_one(&comp);
    let target = DMatrix::<Complex64>::identity(size, size).kronecker(&rho);
    let deviation = operator_norm(&(sigma.kronecker(&rho) - target));
    Ok(FoliatedResolution {
        deviation,
        tolerance: params.tolerance,
        pass: deviation < params.tolerance,
    })
}

/// The transposed construction: integrate the complement parameter over its
/// disk at fixed leaf state `z`. The result is `|z⟩⟨z| ⊗ Σ_C`, rank one on
/// the leaf, and so stays at distance ≥ 1 from every `P_K ⊗ |v⟩⟨v|` once
/// `K ≥ 1`. The reported deviation is taken against `v` the leading
/// eigenvector of `Σ_C`; `pass` means the deviation is at least ½, i.e. no
/// resolution of unity arises this way.
pub fn complement_resolution(
    space: &FoliatedSpace,
    z: &[Complex64],
    params: &QuadratureParams,
) -> Result<FoliatedResolution, FoliationError> {
    single_mode_quadrature(&space.complement, params, "complement")?;
    let leaf = coherent(&space.leaf, z)?;
    let size = params.levels + 1;
    if 4 * params.levels > space.leaf.dim() {
        return Err(FockError::Quadrature("levels exceed D_leaf/4".into()).into());
    }
    let sigma_c = disk_integral(
        space.complement.dim(),
        params.radius,
        params.radial_nodes,
        params.angular_nodes,
        size,
    );
    let amps = leaf.amplitudes().rows(0, size).into_owned();
    let rho_z = &amps * amps.adjoint();
    let eig = nalgebra::SymmetricEigen::new(sigma_c.clone());
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top).into_owned();
    let target = DMatrix::<Complex64>::identity(size, size).kronecker(&(&v * v.adjoint()));
    let deviation = operator_norm(&(rho_z.kronecker(&sigma_c) - target));
    Ok(FoliatedResolution {
        deviation,
        tolerance: 0.5,
        pass: deviation >= 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::linalg::max_abs_c;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn flat_complement() -> ComplementSpec {
        ComplementSpec {
            structure: AlmostComplexStructure::standard(1),
            chart: Chart::standard(1).unwrap(),
        }
    }

    /// Compatible, non-integrable: conjugation by a `q1/p1` squeeze whose
    /// angle depends on `q2`.
    pub(crate) fn squeezed_ambient() -> ComplementSpec {
        let angle = parse("q2", &["q1", "q2", "p1", "p2"]).unwrap();
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0]));
        ComplementSpec {
            structure: AlmostComplexStructure::rotated_with_generator(angle, k).unwrap(),
            chart: Chart::standard(2).unwrap(),
        }
    }

    fn params(levels: usize) -> QuadratureParams {
        QuadratureParams {
            radius: 6.0,
            radial_nodes: 200,
            angular_nodes: 200,
            levels,
            tolerance: 1e-3,
        }
    }

    #[test]
    fn flat_product_is_integrable_on_both_sides() {
        let f = build_foliated(1, 2, 16, 8, flat_complement(), BuildOptions::default()).unwrap();
        assert!(f.leaf_globally_coherent());
        assert!(f.complement_integrable());
        assert!(!f.is_ambient());
        assert_eq!(f.block_orthogonality(), 0.0);
        assert_eq!(f.split_residual(), 0.0);
    }

    #[test]
    fn ambient_squeeze_makes_the_complement_non_integrable() {
        let f = build_foliated(1, 2, 16, 8, squeezed_ambient(), BuildOptions::default()).unwrap();
        assert!(f.is_ambient());
        assert!(f.leaf_globally_coherent());
        assert!(!f.complement_integrable());
        assert!(f.complement_report().max_norm > 1.0);
        let h = hybrid_coherent(&f, &[c(0.5, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!(h.complement_chart_local && h.leaf_globally_coherent);
    }

    #[test]
    fn rank_and_structure_errors() {
        assert_eq!(
            build_foliated(2, 2, 8, 8, flat_complement(), BuildOptions::default()).unwrap_err(),
            FoliationError::Rank { m: 2, n: 2 }
        );
        assert!(build_foliated(0, 2, 8, 8, flat_complement(), BuildOptions::default()).is_err());
        let bad = ComplementSpec {
            structure: AlmostComplexStructure::constant(DMatrix::identity(2, 2)).unwrap(),
            chart: Chart::standard(1).unwrap(),
        };
        assert!(matches!(
            build_foliated(1, 2, 8, 8, bad, BuildOptions::default()),
            Err(FoliationError::Structure(_))
        ));
        // J² = −1 but positivity fails
        let minus = ComplementSpec {
            structure: AlmostComplexStructure::constant(-crate::linalg::standard_block(1)).unwrap(),
            chart: Chart::standard(1).unwrap(),
        };
        assert!(matches!(
            build_foliated(1, 2, 8, 8, minus, BuildOptions::default()),
            Err(FoliationError::Structure(_))
        ));
    }

    #[test]
    fn three_mode_blocks() {
        let comp = ComplementSpec {
            structure: AlmostComplexStructure::standard(2),
            chart: Chart::uniform(2, -1.0, 1.0, 3).unwrap(),
        };
        let f = build_foliated(1, 3, 4, 4, comp, BuildOptions::default()).unwrap();
        assert_eq!(f.leaf_indices(), vec![0, 3]);
        assert_eq!(f.complement_indices(), vec![1, 2, 4, 5]);
        assert_eq!(f.block_orthogonality(), 0.0);
        assert_eq!(f.split_residual(), 0.0);
        assert_eq!(f.total_dim(), 64);
    }

    #[test]
    fn hybrid_vacuum_and_leaf_eigenvalue() {
        let f = build_foliated(1, 2, 64, 16, flat_complement(), BuildOptions::default()).unwrap();
        let h0 = hybrid_coherent(&f, &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        let mut vac = nalgebra::DVector::zeros(f.total_dim());
        vac[0] = c(1.0, 0.0);
        assert_eq!(h0.state.amplitudes(), &vac);

        let z = c(1.0, 1.0);
        let h = hybrid_coherent(&f, &[z], &[c(0.0, 0.0)]).unwrap();
        let a = f.leaf_annihilator(0).unwrap();
        let r = (a.apply(&h.state) - h.state.amplitudes() * z).norm();
        assert!(r < 1e-8, "{r:e}");
        let b = f.complement_annihilator(0).unwrap();
        assert!(b.apply(&h.state).norm() < 1e-15);
    }

    #[test]
    fn overlaps_factorize() {
        let f = build_foliated(1, 2, 32, 16, flat_complement(), BuildOptions::default()).unwrap();
        let a = hybrid_coherent(&f, &[c(0.3, -0.4)], &[c(1.0, 0.0)]).unwrap();
        let b = hybrid_coherent(&f, &[c(-0.5, 0.2)], &[c(0.1, 0.6)]).unwrap();
        assert!(overlap_factorization_residual(&a, &b) < 1e-10);
        // independent oracle: the closed-form Gaussian overlaps
        let expected = (-(a.z[0] - b.z[0]).norm_sqr() / 2.0 - (a.w[0] - b.w[0]).norm_sqr() / 2.0).exp();
        assert!((a.state.inner(&b.state).norm_sqr() - expected).abs() < 1e-8);
    }

    #[test]
    fn leaf_resolution_tracks_the_fock_quadrature() {
        let f = build_foliated(1, 2, 64, 16, flat_complement(), BuildOptions::default()).unwrap();
        let fock = crate::fock::resolution_of_unity(f.leaf_space(), &params(8)).unwrap();
        for w in [c(0.0, 0.0), c(1.0, 0.0)] {
            let r = leaf_resolution(&f, &[w], &params(8)).unwrap();
            // a rank-one projector tensor factor leaves the operator norm unchanged
            assert!((r.deviation - fock.deviation).abs() < 1e-12);
        }
        let wide = QuadratureParams {
            radius: 6.0 * 2f64.sqrt(),
            ..params(8)
        };
        assert!(leaf_resolution(&f, &[c(1.0, 0.0)], &wide).unwrap().pass);
    }

    #[test]
    fn transposed_construction_is_not_a_resolution() {
        let f = build_foliated(1, 2, 64, 16, flat_complement(), BuildOptions::default()).unwrap();
        let p = QuadratureParams {
            radius: 4.0,
            ..params(4)
        };
        let r = complement_resolution(&f, &[c(0.5, 0.5)], &p).unwrap();
        assert!(r.deviation >= 1.0 - 1e-6, "{}", r.deviation);
        assert!(r.pass);
    }

    #[test]
    fn leaf_operator_matches_kronecker_definition() {
        let f = build_foliated(1, 2, 4, 3, flat_complement(), BuildOptions::default()).unwrap();
        let a = f.leaf_annihilator(0).unwrap();
        // A ⊗ I maps |1⟩⊗|j⟩ to √2 |0⟩⊗|j⟩
        for j in 0..3 {
            assert!((a.matrix()[(j, 3 + j)] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        assert!(max_abs_c(a.matrix()) <= 6f64.sqrt() + 1e-12);
    }
}
