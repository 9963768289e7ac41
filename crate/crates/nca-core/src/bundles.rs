//! Hermitian bundles over an order, their arithmetic degrees, and heights
//! of free submodules together with the dual-order height identities.
//!
//! A bundle is a full lattice E in A^m that is stable under left
//! multiplication by the order, metrized by a *-hermitian positive matrix
//! H over A.  All degree and height data is carried as exact rationals
//! (squared covolumes, Gram determinants); logarithms are derived floats.

use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::algebra::AlgebraDescriptor;
use crate::arakelov::{CompleteIdeal, ExactLog};
use crate::error::Error;
use crate::linalg::{generalized_index, gram_det, ln_rat, rat_pow, Rat, RatMatrix, ZLattice};
use crate::orders::OrderLattice;
use crate::Result;

/// A metrized left module: a full, left-stable lattice `E ⊂ A^m` together
/// with a positive *-hermitian m×m matrix of algebra elements.
#[derive(Clone, Debug)]
pub struct HermitianBundle {
    order: Arc<OrderLattice>,
    lattice: ZLattice,
    metric: Vec<Vec<Vec<Rat>>>,
    /// Gram matrix of trd∘h on the flattened ambient coordinates.
    gram: RatMatrix,
}

impl HermitianBundle {
    /// Validates shape, left stability of the lattice under the order,
    /// *-hermitian symmetry of the metric, and positive definiteness of
    /// the induced rational form trd∘h.
    pub fn new(
        order: &Arc<OrderLattice>,
        lattice: ZLattice,
        metric: Vec<Vec<Vec<Rat>>>,
    ) -> Result<HermitianBundle> {
        let alg = order.algebra();
        let d = alg.dim();
        let m = metric.len();
        if m == 0 {
            return Err(Error::InvalidInput("a bundle needs at least one module factor".into()));
        }
        for row in &metric {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            for h in row {
                if h.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: h.len() });
                }
            }
        }
        if lattice.ambient_dim() != m * d {
            return Err(Error::DimensionMismatch { expected: m * d, got: lattice.ambient_dim() });
        }
        if !lattice.is_full() {
            return Err(Error::NotFull);
        }
        for r in 0..m {
            for s in 0..m {
                if alg.involute(&metric[s][r]) != metric[r][s] {
                    return Err(Error::InvalidInput("metric is not *-hermitian".into()));
                }
            }
        }
        let basis = lattice.rat_basis();
        for i in 0..order.dim() {
            let b = order.basis_matrix().row(i);
            for v in 0..basis.rows() {
                if !lattice.contains(&alg.act_on_vector(b, basis.row(v), m)) {
                    return Err(Error::InvalidInput(
                        "lattice is not stable under left multiplication by the order".into(),
                    ));
                }
            }
        }
        let gram = metric_gram(alg, &metric);
        assert!(gram.is_symmetric(), "hermitian metric must induce a symmetric trace form");
        if !gram.is_positive_definite() {
            return Err(Error::NotPositive);
        }
        Ok(HermitianBundle { order: order.clone(), lattice, metric, gram })
    }

    pub fn order(&self) -> &Arc<OrderLattice> {
        &self.order
    }

    pub fn lattice(&self) -> &ZLattice {
        &self.lattice
    }

    pub fn metric(&self) -> &[Vec<Vec<Rat>>] {
        &self.metric
    }

    /// Number of A-module factors of the ambient space A^m.
    pub fn modules(&self) -> usize {
        self.metric.len()
    }

    /// Gram matrix of trd∘h on the ambient rational space.
    pub fn ambient_gram(&self) -> &RatMatrix {
        &self.gram
    }
}

/// Ambient Gram matrix of trd∘h: block (r, s) is ρ(H_rs)·G_τ, so entry
/// (r·d+i, s·d+j) equals trd(b_i·H_rs·b_j*).
fn metric_gram(alg: &AlgebraDescriptor, metric: &[Vec<Vec<Rat>>]) -> RatMatrix {
    let d = alg.dim();
    let m = metric.len();
    let mut gram = RatMatrix::zero(m * d, m * d);
    for r in 0..m {
        for s in 0..m {
            if metric[r][s].iter().all(Rat::is_zero) {
                continue;
            }
            let block = alg.regular_representation(&metric[r][s]).mul(alg.twisted_gram());
            for i in 0..d {
                for j in 0..d {
                    if !block[(i, j)].is_zero() {
                        gram[(r * d + i, s * d + j)] = block[(i, j)].clone();
                    }
                }
            }
        }
    }
    gram
}

/// The canonical metric h_n(x, y) = Σ x_i y_i* as an n×n matrix over A.
pub fn canonical_metric(alg: &AlgebraDescriptor, n: usize) -> Vec<Vec<Vec<Rat>>> {
    (0..n)
        .map(|r| (0..n).map(|s| if r == s { alg.unit().to_vec() } else { alg.zero() }).collect())
        .collect()
}

/// The order's own power `O^n` with the canonical metric.
pub fn canonical_bundle(order: &Arc<OrderLattice>, n: usize) -> Result<HermitianBundle> {
    let lattice = power_lattice(order.lattice(), n);
    HermitianBundle::new(order, lattice, canonical_metric(order.algebra(), n))
}

/// Line bundle of a complete ideal: the ideal lattice metrized by
/// h(x, y) = x·(a∞·a∞*)·y*.  Ideal classes give isometric bundles, so the
/// Gram determinant only depends on the class.
pub fn line_bundle_of_complete_ideal(c: &CompleteIdeal) -> Result<HermitianBundle> {
    let order = c.order();
    let alg = order.algebra();
    if !alg.is_unit(c.infinite()) {
        return Err(Error::NotAUnit);
    }
    let h = alg.mul(c.infinite(), &alg.involute(c.infinite()));
    HermitianBundle::new(order, c.ideal().lattice().clone(), vec![vec![h]])
}

/// Direct sum of two bundles over the same order with block-diagonal metric.
pub fn orthogonal_sum(a: &HermitianBundle, b: &HermitianBundle) -> Result<HermitianBundle> {
    if !Arc::ptr_eq(&a.order, &b.order) {
        return Err(Error::InvalidInput("orthogonal sum needs bundles over one order".into()));
    }
    let alg = a.order.algebra();
    let d = alg.dim();
    let (ma, mb) = (a.modules(), b.modules());
    let m = ma + mb;
    let mut metric = vec![vec![alg.zero(); m]; m];
    for r in 0..ma {
        for s in 0..ma {
            metric[r][s] = a.metric[r][s].clone();
        }
    }
    for r in 0..mb {
        for s in 0..mb {
            metric[ma + r][ma + s] = b.metric[r][s].clone();
        }
    }
    let ba = a.lattice.rat_basis();
    let bb = b.lattice.rat_basis();
    let mut rows = Vec::with_capacity(ba.rows() + bb.rows());
    for i in 0..ba.rows() {
        let mut row = ba.row(i).to_vec();
        row.resize(m * d, Rat::zero());
        rows.push(row);
    }
    for i in 0..bb.rows() {
        let mut row = vec![Rat::zero(); ma * d];
        row.extend_from_slice(bb.row(i));
        rows.push(row);
    }
    HermitianBundle::new(&a.order, ZLattice::from_rat_rows(&RatMatrix::from_rows(rows)), metric)
}

/// Degree of the pushforward to Z: `−½·log |det Gram|` over a Z-basis of E,
/// returned with the exact Gram determinant.  Unimodular basis changes leave
/// the determinant fixed, so the value is basis independent.
pub fn adeg_pushforward(bundle: &HermitianBundle) -> Result<(f64, Rat)> {
    let basis = bundle.lattice.rat_basis();
    let det = gram_det(&basis, &bundle.gram);
    if det.is_zero() {
        return Err(Error::DegenerateMetric);
    }
    let det = det.abs();
    Ok((-0.5 * ln_rat(&det), det))
}

/// Degree relative to the order: pushforward degree of E minus rk(E) times
/// the pushforward degree of the trivially metrized order.  The certificate
/// is the exact ratio `|det Gram(E)| / |det Gram(O)|^rk`.
pub fn adeg_order(bundle: &HermitianBundle) -> Result<(f64, Rat)> {
    let cert = adeg_order_cert(bundle)?;
    Ok((-0.5 * ln_rat(&cert), cert))
}

/// Same degree as an exact logarithm certificate `log(1/cert)/2`.
pub fn adeg_order_exact(bundle: &HermitianBundle) -> Result<ExactLog> {
    Ok(ExactLog::new(adeg_order_cert(bundle)?.recip(), 2))
}

fn adeg_order_cert(bundle: &HermitianBundle) -> Result<Rat> {
    let (_, det_e) = adeg_pushforward(bundle)?;
    let order = &bundle.order;
    let det_o = gram_det(&order.lattice().rat_basis(), order.algebra().twisted_gram());
    debug_assert!(det_o.is_positive());
    Ok(det_e / rat_pow(&det_o, bundle.modules() as i64))
}

/// A free left A-submodule V ⊆ A^n, kept with its generators and an
/// echelonized Q-basis of the span.
#[derive(Clone, Debug)]
pub struct FreeSubmodule {
    ambient: usize,
    generators: Vec<Vec<Rat>>,
    rank: usize,
    basis: RatMatrix,
}

impl FreeSubmodule {
    pub fn new(
        alg: &AlgebraDescriptor,
        ambient: usize,
        generators: &[Vec<Rat>],
    ) -> Result<FreeSubmodule> {
        if ambient == 0 {
            return Err(Error::InvalidInput("ambient module must have at least one factor".into()));
        }
        let profile = alg.submodule_profile(ambient, generators)?;
        if !profile.free {
            return Err(Error::NotFree(format!(
                "submodule is not free: component dimensions {:?}",
                profile.component_dims
            )));
        }
        Ok(FreeSubmodule {
            ambient,
            generators: generators.to_vec(),
            rank: profile.rank,
            basis: profile.basis,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Rank of V as a free A-module.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Echelonized Q-basis of the span, rows in flattened A^n coordinates.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.generators
    }
}

/// Squared height together with its logarithm.
#[derive(Clone, Debug)]
pub struct HeightValue {
    /// Exact squared height, a positive rational.
    pub h_squared: Rat,
    /// `½·log h_squared`.
    pub log_h: f64,
}

impl HeightValue {
    fn from_squared(h_squared: Rat) -> Result<HeightValue> {
        if !h_squared.is_positive() {
            return Err(Error::NotPositive);
        }
        let log_h = 0.5 * ln_rat(&h_squared);
        Ok(HeightValue { h_squared, log_h })
    }
}

/// Block-diagonal lattice `L^n` inside the flattened ambient space.
pub fn power_lattice(base: &ZLattice, n: usize) -> ZLattice {
    let d = base.ambient_dim();
    let basis = base.rat_basis();
    let mut rows = Vec::with_capacity(n * basis.rows());
    for block in 0..n {
        for i in 0..basis.rows() {
            let mut row = vec![Rat::zero(); n * d];
            row[block * d..(block + 1) * d].clone_from_slice(basis.row(i));
            rows.push(row);
        }
    }
    ZLattice::from_rat_rows(&RatMatrix::from_rows(rows))
}

/// Block-diagonal form with `n` copies of a d×d form on the diagonal.
pub fn power_form(form: &RatMatrix, n: usize) -> RatMatrix {
    let d = form.rows();
    let mut out = RatMatrix::zero(n * d, n * d);
    for block in 0..n {
        for i in 0..d {
            for j in 0..d {
                if !form[(i, j)].is_zero() {
                    out[(block * d + i, block * d + j)] = form[(i, j)].clone();
                }
            }
        }
    }
    out
}

/// Core of every height: `det Gram(W ∩ L^n) / det Gram(L)^rank` for a
/// subspace with basis rows `basis` inside the flattened A^ambient and a
/// base lattice L that is full in A.  Positive forms yield the value
/// directly; indefinite forms go through |det| and reject vanishing
/// determinants.  The subspace need not be a left submodule; `rank` is its
/// dimension divided by dim A.
fn subspace_height_squared(
    alg: &AlgebraDescriptor,
    basis: &RatMatrix,
    rank: usize,
    ambient: usize,
    base: &ZLattice,
    form: &RatMatrix,
    definite: bool,
) -> Result<Rat> {
    debug_assert_eq!(base.ambient_dim(), alg.dim());
    let meet = power_lattice(base, ambient).intersect_subspace(basis);
    debug_assert_eq!(meet.rank(), basis.rows(), "rational subspaces meet lattices fully");
    let num = gram_det(&meet.rat_basis(), &power_form(form, ambient));
    let den = gram_det(&base.rat_basis(), form);
    if !definite && (num.is_zero() || den.is_zero()) {
        return Err(Error::ZeroGram);
    }
    Ok((num / rat_pow(&den, rank as i64)).abs())
}

fn height_squared_over(
    alg: &AlgebraDescriptor,
    v: &FreeSubmodule,
    base: &ZLattice,
    form: &RatMatrix,
    definite: bool,
) -> Result<Rat> {
    subspace_height_squared(alg, &v.basis, v.rank(), v.ambient(), base, form, definite)
}

/// Height of a free submodule over the order, squared:
/// `detGram_τ(V ∩ O^n) / detGram_τ(O)^rk` with the canonical metric.
pub fn height(order: &OrderLattice, v: &FreeSubmodule) -> Result<HeightValue> {
    let alg = order.algebra();
    HeightValue::from_squared(height_squared_over(
        alg,
        v,
        order.lattice(),
        alg.twisted_gram(),
        true,
    )?)
}

/// Height with the dual lattice `Õ` of the order (under trd∘h₁) in place of
/// the order, in both the intersection and the normalizing volume.
pub fn dual_order_height(order: &OrderLattice, v: &FreeSubmodule) -> Result<HeightValue> {
    let alg = order.algebra();
    let dual = dual_order_lattice(order)?;
    HeightValue::from_squared(height_squared_over(alg, v, &dual, alg.twisted_gram(), true)?)
}

/// Lattice dual of the order under the twisted trace form.
pub fn dual_order_lattice(order: &OrderLattice) -> Result<ZLattice> {
    order.lattice().dual(order.algebra().twisted_gram())
}

/// Kernel of the metric pairing against V's basis vectors: right
/// multiplication blocks ρ(g_i*) stacked so that `x·M` lists the
/// coordinates of Σᵢ xᵢ·gᵢ* columnwise.  That sum vanishes exactly on the
/// h_n-orthogonal complement, which is again a left submodule.
fn pairing_complement(alg: &AlgebraDescriptor, v: &FreeSubmodule) -> Result<FreeSubmodule> {
    let d = alg.dim();
    let n = v.ambient();
    let r = v.basis.rows();
    let mut m = RatMatrix::zero(n * d, r * d);
    for g in 0..r {
        for block in 0..n {
            let seg = &v.basis.row(g)[block * d..(block + 1) * d];
            let rho = alg.regular_representation(&alg.involute(seg));
            for a in 0..d {
                for b in 0..d {
                    if !rho[(a, b)].is_zero() {
                        m[(block * d + a, g * d + b)] = rho[(a, b)].clone();
                    }
                }
            }
        }
    }
    let kernel = m.left_kernel();
    let generators: Vec<Vec<Rat>> = (0..kernel.rows()).map(|i| kernel.row(i).to_vec()).collect();
    let profile = alg.submodule_profile(n, &generators)?;
    assert_eq!(
        profile.basis.rows(),
        kernel.rows(),
        "orthogonal complement must be closed under the algebra action"
    );
    if !profile.free {
        return Err(Error::NotFree(format!(
            "orthogonal complement is not free: component dimensions {:?}",
            profile.component_dims
        )));
    }
    assert_eq!(v.rank() + profile.rank, n, "complement ranks must sum to the ambient rank");
    Ok(FreeSubmodule { ambient: n, generators, rank: profile.rank, basis: profile.basis })
}

/// Basis of `{ x ∈ A^n : Σᵢ vᵢ·xᵢ = 0 for all v ∈ V }`, the orthogonal
/// complement of V under the untwisted pairing trd∘b_n.  For a left
/// submodule V this space is closed under the right action but usually not
/// the left one, so it is returned as a plain subspace basis; its dimension
/// is forced by the nondegeneracy of the reduced trace form.
fn untwisted_complement_basis(alg: &AlgebraDescriptor, v: &FreeSubmodule) -> RatMatrix {
    let d = alg.dim();
    let n = v.ambient();
    let r = v.basis.rows();
    let mut m = RatMatrix::zero(n * d, r * d);
    for g in 0..r {
        for block in 0..n {
            let seg = &v.basis.row(g)[block * d..(block + 1) * d];
            for a in 0..d {
                let row = alg.mul(seg, &alg.basis_element(a));
                for (b, entry) in row.iter().enumerate() {
                    if !entry.is_zero() {
                        m[(block * d + a, g * d + b)] = entry.clone();
                    }
                }
            }
        }
    }
    let kernel = m.left_kernel();
    assert_eq!(
        kernel.rows(),
        (n - v.rank()) * d,
        "complement dimensions must sum to the ambient dimension"
    );
    kernel
}

/// Orthogonal complement under the canonical metric:
/// `V⊥ = { x ∈ A^n : h_n(x, y) = 0 for all y ∈ V }`.
pub fn orthogonal_complement(alg: &AlgebraDescriptor, v: &FreeSubmodule) -> Result<FreeSubmodule> {
    let comp = pairing_complement(alg, v)?;
    // Positivity of h_n forces V ∩ V⊥ = 0; certify per input anyway.
    let stacked = v.basis.stack(&comp.basis);
    assert_eq!(
        stacked.rank(),
        v.basis.rows() + comp.basis.rows(),
        "complement must meet the submodule trivially"
    );
    Ok(comp)
}

/// Outcome of one verified identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One exact equality check: both sides are recorded whenever they were
/// computed, even for checks whose hypotheses failed (status Skipped).
#[derive(Clone, Debug)]
pub struct DualityCheck {
    pub status: CheckStatus,
    pub lhs: Option<Rat>,
    pub rhs: Option<Rat>,
    pub reason: Option<String>,
}

impl DualityCheck {
    fn evaluated(lhs: Rat, rhs: Rat) -> DualityCheck {
        let status = if lhs == rhs { CheckStatus::Pass } else { CheckStatus::Fail };
        DualityCheck { status, lhs: Some(lhs), rhs: Some(rhs), reason: None }
    }

    fn skipped(self, reason: &str) -> DualityCheck {
        DualityCheck { status: CheckStatus::Skipped, reason: Some(reason.into()), ..self }
    }
}

/// The three dual-order height identities for one submodule.
#[derive(Clone, Debug)]
pub struct DualityReport {
    /// Whether trd∘h₁ takes integral values on the order's basis.
    pub integral: bool,
    /// `H_O(V)² = H_Õ(V⊥)²`.
    pub dt1: DualityCheck,
    /// `H_O(V)² = H_Õ(V)²`; needs a maximal order.
    pub dt2: DualityCheck,
    /// `[V ∩ Õ^n : V ∩ O^n] = [Õ : O]^rk`; needs a maximal order.
    pub index: DualityCheck,
}

impl DualityReport {
    pub fn all_passed(&self) -> bool {
        [&self.dt1, &self.dt2, &self.index].iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn any_failed(&self) -> bool {
        [&self.dt1, &self.dt2, &self.index].iter().any(|c| c.status == CheckStatus::Fail)
    }
}

fn twisted_form_is_integral(order: &OrderLattice) -> bool {
    let b = order.basis_matrix();
    let gram = b.mul(order.algebra().twisted_gram()).mul(&b.transpose());
    (0..gram.rows()).all(|i| (0..gram.cols()).all(|j| gram[(i, j)].is_integer()))
}

/// Runs the twisted duality identities.  The integrality of trd∘h₁ on the
/// order gates all three checks; maximality additionally gates the second
/// and the index identity.  Values are still computed and recorded for
/// skipped checks so that hypothesis-violating inputs stay observable.
pub fn duality_check(order: &OrderLattice, v: &FreeSubmodule) -> Result<DualityReport> {
    let alg = order.algebra();
    let form = alg.twisted_gram();
    let integral = twisted_form_is_integral(order);
    let dual = dual_order_lattice(order)?;
    let comp = orthogonal_complement(alg, v)?;

    let h_v = height_squared_over(alg, v, order.lattice(), form, true)?;
    let dt1 = DualityCheck::evaluated(
        h_v.clone(),
        height_squared_over(alg, &comp, &dual, form, true)?,
    );
    let dt2 =
        DualityCheck::evaluated(h_v, height_squared_over(alg, v, &dual, form, true)?);
    let n = v.ambient();
    let meet_dual = power_lattice(&dual, n).intersect_subspace(&v.basis);
    let meet = power_lattice(order.lattice(), n).intersect_subspace(&v.basis);
    let index = DualityCheck::evaluated(
        generalized_index(&meet_dual, &meet)?,
        rat_pow(&generalized_index(&dual, order.lattice())?, v.rank() as i64),
    );

    let (dt1, dt2, index) = if !integral {
        let why = "twisted trace form is not integral on the order";
        (dt1.skipped(why), dt2.skipped(why), index.skipped(why))
    } else if !order.known_maximal() {
        let why = "order is not known to be maximal";
        (dt1, dt2.skipped(why), index.skipped(why))
    } else {
        (dt1, dt2, index)
    };
    Ok(DualityReport { integral, dt1, dt2, index })
}

/// Height built from the untwisted pairing b_n(x, y) = Σ x_i y_i.  The
/// rational form trd∘b_n can be indefinite, so Gram determinants enter
/// through their absolute value and a vanishing restricted determinant is
/// an error rather than a value.
pub fn untwisted_height(order: &OrderLattice, v: &FreeSubmodule) -> Result<HeightValue> {
    let alg = order.algebra();
    HeightValue::from_squared(height_squared_over(
        alg,
        v,
        order.lattice(),
        alg.reduced_gram(),
        false,
    )?)
}

/// Untwisted duality `H′_O(V) = H′_Õ′(V⊥)` where both the complement and
/// the dual lattice Õ′ are taken under the untwisted pairing.  The
/// complement is a right submodule, entering as a plain subspace of rank
/// `n - rk V`.  No integrality hypothesis; maximality still gates the
/// verdict.
pub fn untwisted_duality_check(order: &OrderLattice, v: &FreeSubmodule) -> Result<DualityCheck> {
    let alg = order.algebra();
    let form = alg.reduced_gram();
    let dual = order.lattice().dual(form)?;
    let comp = untwisted_complement_basis(alg, v);
    let n = v.ambient();
    let lhs = height_squared_over(alg, v, order.lattice(), form, false)?;
    let rhs = subspace_height_squared(alg, &comp, n - v.rank(), n, &dual, form, false)?;
    let check = DualityCheck::evaluated(lhs, rhs);
    if !order.known_maximal() {
        return Ok(check.skipped("order is not known to be maximal"));
    }
    Ok(check)
}

/// Squared heights of one submodule under two positive involutions of the
/// same algebra: the order's own and a replacement.
#[derive(Clone, Debug)]
pub struct InvolutionProbe {
    pub first: Rat,
    pub second: Rat,
    pub equal: bool,
}

/// Compares the height of V computed with the order's involution against
/// the height under `second_involution` (coordinate matrix of an
/// alternative positive involution).  Heights are reported, not asserted
/// equal: the two values genuinely differ for some positive involutions.
pub fn involution_independence_probe(
    order: &OrderLattice,
    v: &FreeSubmodule,
    second_involution: &RatMatrix,
) -> Result<InvolutionProbe> {
    let alg = order.algebra();
    let first = height(order, v)?.h_squared;
    let alg2 = Arc::new(alg.with_involution(second_involution.clone())?);
    let order2 =
        crate::orders::build_order(&alg2, order.basis_matrix(), order.known_maximal())?;
    let v2 = FreeSubmodule::new(&alg2, v.ambient(), v.generators())?;
    let second = height(&order2, &v2)?.h_squared;
    let equal = first == second;
    Ok(InvolutionProbe { first, second, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arakelov::{
        deg_exact, div_of_ideal, vol_squared, GramForm,
    };
    use crate::linalg::Int;
    use crate::orders::{preset_order, principal_left_ideal};

    fn q(n: i64) -> Rat {
        Rat::from_integer(Int::from(n))
    }

    fn qr(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn complete(order: &Arc<OrderLattice>, gen: &[Rat], inf: &[Rat]) -> CompleteIdeal {
        let ideal = principal_left_ideal(order, gen).unwrap();
        CompleteIdeal::new(ideal, inf.to_vec()).unwrap()
    }

    #[test]
    fn pushforward_of_scaled_integer_lattices() {
        let z = preset_order("Z").unwrap();
        let (v, det) = adeg_pushforward(&canonical_bundle(&z, 1).unwrap()).unwrap();
        assert_eq!(det, q(1));
        assert_eq!(v, 0.0);

        let two = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![vec![q(2)]]));
        let b = HermitianBundle::new(&z, two, vec![vec![vec![q(1)]]]).unwrap();
        let (v, det) = adeg_pushforward(&b).unwrap();
        assert_eq!(det, q(4));
        assert!((v + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pushforward_of_quaternion_orders() {
        let hz = preset_order("hurwitz").unwrap();
        let (v, det) = adeg_pushforward(&canonical_bundle(&hz, 1).unwrap()).unwrap();
        assert_eq!(det, q(4));
        assert!((v + 0.5 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn order_degree_vanishes_on_canonical_bundles() {
        for name in ["Z", "Z[i]", "lipschitz", "hurwitz", "M2(Z)", "M3(Z)", "Z[i]+M2(Z)"] {
            let o = preset_order(name).unwrap();
            for n in 1..=2 {
                let (v, cert) = adeg_order(&canonical_bundle(&o, n).unwrap()).unwrap();
                assert_eq!(cert, q(1), "preset {name} rank {n}");
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn line_bundle_of_scaled_integer_ideal() {
        let z = preset_order("Z").unwrap();
        let c = complete(&z, &[q(2)], &[q(3)]);
        let b = line_bundle_of_complete_ideal(&c).unwrap();
        let (v, det) = adeg_pushforward(&b).unwrap();
        assert_eq!(det, q(36));
        assert!((v + 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn line_bundle_determinant_is_a_class_invariant() {
        let zi = preset_order("Z[i]").unwrap();
        let a = complete(&zi, &[q(2), q(1)], &[q(1), q(1)]);
        let (_, d0) = adeg_pushforward(&line_bundle_of_complete_ideal(&a).unwrap()).unwrap();
        for u in [vec![q(0), q(1)], vec![qr(3, 5), qr(4, 5)], vec![q(1), q(2)]] {
            let moved = a.act(&u).unwrap();
            let (_, d1) =
                adeg_pushforward(&line_bundle_of_complete_ideal(&moved).unwrap()).unwrap();
            assert_eq!(d0, d1);
        }

        let hz = preset_order("hurwitz").unwrap();
        let t = CompleteIdeal::trivial(&hz);
        let (_, d0) = adeg_pushforward(&line_bundle_of_complete_ideal(&t).unwrap()).unwrap();
        let moved = t.act(&[q(1), q(1), q(0), q(0)]).unwrap();
        let (_, d1) = adeg_pushforward(&line_bundle_of_complete_ideal(&moved).unwrap()).unwrap();
        assert_eq!(d0, d1);
    }

    #[test]
    fn order_degree_of_line_bundles_matches_divisor_degree() {
        let m2 = preset_order("M2(Z)").unwrap();
        let c = complete(&m2, &[q(3), q(0), q(0), q(1)], &[q(1), q(0), q(0), q(1)]);
        let lhs = adeg_order_exact(&line_bundle_of_complete_ideal(&c).unwrap()).unwrap();
        let rhs = deg_exact(&m2, &div_of_ideal(&c).unwrap()).unwrap();
        assert!(lhs.eq_exact(&rhs));
        assert!((lhs.value() + 9f64.ln()).abs() < 1e-12);

        let zi = preset_order("Z[i]").unwrap();
        let c = complete(&zi, &[q(2), q(1)], &[q(1), q(1)]);
        let lhs = adeg_order_exact(&line_bundle_of_complete_ideal(&c).unwrap()).unwrap();
        let rhs = deg_exact(&zi, &div_of_ideal(&c).unwrap()).unwrap();
        assert!(lhs.eq_exact(&rhs));
        assert!((lhs.value() + 10f64.ln()).abs() < 1e-12);

        let hz = preset_order("hurwitz").unwrap();
        let c = complete(&hz, &[q(1), q(1), q(0), q(0)], &[q(1), q(0), q(0), q(0)]);
        let lhs = adeg_order_exact(&line_bundle_of_complete_ideal(&c).unwrap()).unwrap();
        let rhs = deg_exact(&hz, &div_of_ideal(&c).unwrap()).unwrap();
        assert!(lhs.eq_exact(&rhs));
        assert!((lhs.value() + 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pushforward_ignores_generating_redundancy() {
        let z = preset_order("Z").unwrap();
        let sparse = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![vec![q(2)]]));
        let redundant =
            ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![vec![q(2)], vec![q(6)]]));
        let h = vec![vec![vec![q(1)]]];
        let (_, d0) =
            adeg_pushforward(&HermitianBundle::new(&z, sparse, h.clone()).unwrap()).unwrap();
        let (_, d1) =
            adeg_pushforward(&HermitianBundle::new(&z, redundant, h).unwrap()).unwrap();
        assert_eq!(d0, d1);
    }

    #[test]
    fn degree_is_additive_on_orthogonal_sums() {
        let hz = preset_order("hurwitz").unwrap();
        let e1 = canonical_bundle(&hz, 1).unwrap();
        let c = complete(&hz, &[q(1), q(1), q(0), q(0)], &[q(1), q(0), q(0), q(0)]);
        let e2 = line_bundle_of_complete_ideal(&c).unwrap();
        let sum = orthogonal_sum(&e1, &e2).unwrap();
        let (_, c1) = adeg_order(&e1).unwrap();
        let (_, c2) = adeg_order(&e2).unwrap();
        let (_, cs) = adeg_order(&sum).unwrap();
        assert_eq!(cs, c1 * c2);
        assert_eq!(sum.modules(), 2);
    }

    #[test]
    fn classical_plane_heights() {
        let z = preset_order("Z").unwrap();
        let alg = z.algebra();
        let v = FreeSubmodule::new(alg, 2, &[vec![q(3), q(4)]]).unwrap();
        assert_eq!(height(&z, &v).unwrap().h_squared, q(25));

        let comp = orthogonal_complement(alg, &v).unwrap();
        assert_eq!(comp.rank(), 1);
        // Q·(4, −3), echelonized.
        assert_eq!(comp.basis().row(0), &[q(1), qr(-3, 4)]);
        assert_eq!(height(&z, &comp).unwrap().h_squared, q(25));

        let axis = FreeSubmodule::new(alg, 2, &[vec![q(1), q(0)]]).unwrap();
        assert_eq!(height(&z, &axis).unwrap().h_squared, q(1));

        let double = orthogonal_complement(alg, &comp).unwrap();
        assert_eq!(double.basis(), v.basis());

        let report = duality_check(&z, &v).unwrap();
        assert!(report.integral);
        assert!(report.all_passed());
    }

    #[test]
    fn coprimality_is_not_needed_for_plane_height_identities() {
        let z = preset_order("Z").unwrap();
        let alg = z.algebra();
        // Non-primitive direction vector: the saturated lattice divides out
        // the content, so the height sees (3, 4), not (6, 8).
        let v = FreeSubmodule::new(alg, 2, &[vec![q(6), q(8)]]).unwrap();
        assert_eq!(height(&z, &v).unwrap().h_squared, q(25));
    }

    #[test]
    fn full_and_zero_submodules_have_height_one() {
        for name in ["M2(Z)", "hurwitz"] {
            let o = preset_order(name).unwrap();
            let alg = o.algebra();
            let d = alg.dim();
            let mut gens = Vec::new();
            for block in 0..2 {
                let mut g = vec![Rat::zero(); 2 * d];
                g[block * d..(block + 1) * d].clone_from_slice(alg.unit());
                gens.push(g);
            }
            let full = FreeSubmodule::new(alg, 2, &gens).unwrap();
            assert_eq!(full.rank(), 2);
            assert_eq!(height(&o, &full).unwrap().h_squared, q(1), "preset {name}");

            let zero = orthogonal_complement(alg, &full).unwrap();
            assert_eq!(zero.rank(), 0);
            assert_eq!(height(&o, &zero).unwrap().h_squared, q(1));
        }
    }

    #[test]
    fn height_does_not_depend_on_the_generating_set() {
        let zi = preset_order("Z[i]").unwrap();
        let alg = zi.algebra();
        let v1 = FreeSubmodule::new(alg, 2, &[vec![q(1), q(0), q(1), q(1)]]).unwrap();
        // i·(1, 1+i) and 2·(1, 1+i) generate the same Q(i)-line.
        let v2 = FreeSubmodule::new(
            alg,
            2,
            &[vec![q(0), q(1), q(-1), q(1)], vec![q(2), q(0), q(2), q(2)]],
        )
        .unwrap();
        assert_eq!(v1.rank(), v2.rank());
        assert_eq!(
            height(&zi, &v1).unwrap().h_squared,
            height(&zi, &v2).unwrap().h_squared
        );
    }

    #[test]
    fn gaussian_duality_identities_hold_exactly() {
        let zi = preset_order("Z[i]").unwrap();
        let alg = zi.algebra();
        let v = FreeSubmodule::new(alg, 2, &[vec![q(1), q(0), q(1), q(1)]]).unwrap();
        assert_eq!(height(&zi, &v).unwrap().h_squared, q(9));
        assert_eq!(dual_order_height(&zi, &v).unwrap().h_squared, q(9));

        let report = duality_check(&zi, &v).unwrap();
        assert!(report.integral);
        assert!(report.all_passed());
        assert_eq!(report.dt1.lhs, Some(q(9)));
        assert_eq!(report.dt1.rhs, Some(q(9)));
        assert_eq!(report.index.lhs, Some(q(4)));
        assert_eq!(report.index.rhs, Some(q(4)));
    }

    #[test]
    fn matrix_duality_identities_hold_exactly() {
        let m2 = preset_order("M2(Z)").unwrap();
        let alg = m2.algebra();
        let one = alg.unit().to_vec();
        let mut g = one.clone();
        g.extend(alg.zero());
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        assert_eq!(v.rank(), 1);
        assert_eq!(height(&m2, &v).unwrap().h_squared, q(1));
        let report = duality_check(&m2, &v).unwrap();
        assert!(report.all_passed());

        // A less axis-aligned line: A·(1, E11 + 2·E21).
        let mut g = one;
        g.extend(vec![q(1), q(0), q(2), q(0)]);
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let report = duality_check(&m2, &v).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn non_maximal_orders_skip_the_maximality_bound_checks() {
        let lp = preset_order("lipschitz").unwrap();
        let alg = lp.algebra();
        let mut g = alg.unit().to_vec();
        g.extend(vec![q(0), q(1), q(0), q(0)]);
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let report = duality_check(&lp, &v).unwrap();
        assert!(report.integral);
        assert_eq!(report.dt1.status, CheckStatus::Pass);
        assert_eq!(report.dt2.status, CheckStatus::Skipped);
        assert_eq!(report.index.status, CheckStatus::Skipped);
        assert!(report.dt2.reason.as_deref().unwrap().contains("maximal"));
        // Values are still recorded for the skipped checks.
        assert!(report.dt2.lhs.is_some() && report.dt2.rhs.is_some());
        assert!(report.index.lhs.is_some());
    }

    /// Transpose twisted by diag(1, 2): x ↦ P·xᵀ·P⁻¹.  Positive, but not
    /// compatible with integrality of the twisted trace form on M₂(ℤ).
    fn twisted_transpose() -> RatMatrix {
        RatMatrix::from_rows(vec![
            vec![q(1), q(0), q(0), q(0)],
            vec![q(0), q(0), q(2), q(0)],
            vec![q(0), qr(1, 2), q(0), q(0)],
            vec![q(0), q(0), q(0), q(1)],
        ])
    }

    #[test]
    fn nonintegral_twisted_form_skips_all_duality_checks() {
        let m2 = preset_order("M2(Z)").unwrap();
        let alg2 = Arc::new(m2.algebra().with_involution(twisted_transpose()).unwrap());
        let o2 = Arc::new(
            crate::orders::build_order(&alg2, m2.basis_matrix(), true).unwrap(),
        );
        assert!(!twisted_form_is_integral(&o2));

        let mut g = alg2.unit().to_vec();
        g.extend(vec![q(0), q(1), q(0), q(0)]);
        let v = FreeSubmodule::new(&alg2, 2, &[g]).unwrap();
        let report = duality_check(&o2, &v).unwrap();
        assert!(!report.integral);
        assert_eq!(report.dt1.status, CheckStatus::Skipped);
        assert!(report.dt1.reason.as_deref().unwrap().contains("integral"));
        // dt1 is still evaluated on hypothesis-violating inputs.
        assert!(report.dt1.lhs.is_some() && report.dt1.rhs.is_some());
    }

    #[test]
    fn involution_probe_reports_both_heights() {
        let m2 = preset_order("M2(Z)").unwrap();
        let alg = m2.algebra();
        let mut g = alg.unit().to_vec();
        g.extend(vec![q(0), q(1), q(0), q(0)]);
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let probe = involution_independence_probe(&m2, &v, &twisted_transpose()).unwrap();
        assert_eq!(probe.first, height(&m2, &v).unwrap().h_squared);
        assert!(probe.first.is_positive() && probe.second.is_positive());
        assert_eq!(probe.equal, probe.first == probe.second);
    }

    #[test]
    fn untwisted_volume_of_the_matrix_order_is_one() {
        let m2 = preset_order("M2(Z)").unwrap();
        let v2 = vol_squared(m2.algebra(), m2.lattice(), GramForm::Reduced).unwrap();
        assert_eq!(v2, q(1));
    }

    #[test]
    fn untwisted_height_matches_twisted_over_the_rationals() {
        let z = preset_order("Z").unwrap();
        let v = FreeSubmodule::new(z.algebra(), 2, &[vec![q(3), q(4)]]).unwrap();
        assert_eq!(untwisted_height(&z, &v).unwrap().h_squared, q(25));
    }

    #[test]
    fn untwisted_duality_on_maximal_orders() {
        let zi = preset_order("Z[i]").unwrap();
        let v = FreeSubmodule::new(zi.algebra(), 2, &[vec![q(1), q(0), q(1), q(1)]]).unwrap();
        assert_eq!(untwisted_height(&zi, &v).unwrap().h_squared, q(5));
        let check = untwisted_duality_check(&zi, &v).unwrap();
        assert_eq!(check.status, CheckStatus::Pass);
        assert_eq!(check.lhs, Some(q(5)));
        assert_eq!(check.rhs, Some(q(5)));

        let m2 = preset_order("M2(Z)").unwrap();
        let alg = m2.algebra();
        let mut g = alg.unit().to_vec();
        g.extend(alg.zero());
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let check = untwisted_duality_check(&m2, &v).unwrap();
        assert_eq!(check.status, CheckStatus::Pass);
    }

    #[test]
    fn untwisted_duality_on_noncommutative_submodules() {
        // Non-axis generators separate the two pairings: the b_n-complement
        // is only right-stable here, and both sides go through genuinely
        // different lattices.  Restricted Gram for (1, E11 + 2·E21) over the
        // basis (a, a·c) has determinant -2 by hand.
        let m2 = preset_order("M2(Z)").unwrap();
        let alg = m2.algebra();
        let mut g = alg.unit().to_vec();
        g.extend(vec![q(1), q(0), q(2), q(0)]);
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let check = untwisted_duality_check(&m2, &v).unwrap();
        assert_eq!(check.status, CheckStatus::Pass);
        assert_eq!(check.lhs, Some(q(2)));
        assert_eq!(check.rhs, Some(q(2)));

        // (1, 1+i) over the Hurwitz order; (1, c) with c a unit pure
        // quaternion would be isotropic since trd(1) + trd(c²) = 0.
        let hz = preset_order("hurwitz").unwrap();
        let alg = hz.algebra();
        let mut g = alg.unit().to_vec();
        g.extend(vec![q(1), q(1), q(0), q(0)]);
        let v = FreeSubmodule::new(alg, 2, &[g]).unwrap();
        let check = untwisted_duality_check(&hz, &v).unwrap();
        assert_eq!(check.status, CheckStatus::Pass);
    }

    #[test]
    fn untwisted_height_rejects_isotropic_lines() {
        let zi = preset_order("Z[i]").unwrap();
        // (1, i) is isotropic for b₂: 1² + i² = 0.
        let v = FreeSubmodule::new(zi.algebra(), 2, &[vec![q(1), q(0), q(0), q(1)]]).unwrap();
        assert!(matches!(untwisted_height(&zi, &v), Err(Error::ZeroGram)));
    }

    #[test]
    fn dual_volume_reciprocity() {
        for name in ["Z", "Z[i]", "lipschitz", "hurwitz", "M2(Z)", "M3(Z)", "Z[i]+M2(Z)"] {
            let o = preset_order(name).unwrap();
            let alg = o.algebra();
            let dual = dual_order_lattice(&o).unwrap();
            let v = vol_squared(alg, o.lattice(), GramForm::Twisted).unwrap();
            let vd = vol_squared(alg, &dual, GramForm::Twisted).unwrap();
            assert_eq!(v * vd, q(1), "preset {name}");
        }
        let hz = preset_order("hurwitz").unwrap();
        let dual = dual_order_lattice(&hz).unwrap();
        assert_eq!(vol_squared(hz.algebra(), &dual, GramForm::Twisted).unwrap(), qr(1, 4));
    }

    #[test]
    fn complement_ranks_always_fill_the_ambient_module() {
        let hz = preset_order("hurwitz").unwrap();
        let alg = hz.algebra();
        let d = alg.dim();
        let mut gens = Vec::new();
        for block in 0..2 {
            let mut g = vec![Rat::zero(); 3 * d];
            g[block * d..(block + 1) * d].clone_from_slice(alg.unit());
            gens.push(g);
        }
        let v = FreeSubmodule::new(alg, 3, &gens).unwrap();
        assert_eq!(v.rank(), 2);
        let comp = orthogonal_complement(alg, &v).unwrap();
        assert_eq!(comp.rank(), 1);
        let report = duality_check(&hz, &v).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn bundle_validation_rejects_bad_inputs() {
        let zi = preset_order("Z[i]").unwrap();
        let unstable = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![
            vec![q(1), q(0)],
            vec![q(0), q(2)],
        ]));
        assert!(matches!(
            HermitianBundle::new(&zi, unstable, vec![vec![vec![q(1), q(0)]]]),
            Err(Error::InvalidInput(_))
        ));

        let ok = zi.lattice().clone();
        assert!(matches!(
            HermitianBundle::new(&zi, ok.clone(), vec![vec![vec![q(0), q(1)]]]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            HermitianBundle::new(&zi, ok, vec![vec![vec![q(-1), q(0)]]]),
            Err(Error::NotPositive)
        ));
    }

    #[test]
    fn non_free_submodules_are_rejected() {
        let m2 = preset_order("M2(Z)").unwrap();
        let alg = m2.algebra();
        // One column of M₂: a simple module, half of A.
        let e11 = vec![q(1), q(0), q(0), q(0)];
        let err = FreeSubmodule::new(alg, 1, &[e11]).unwrap_err();
        assert!(matches!(err, Error::NotFree(_)));
    }
}
