//! Configuration loading, command implementations, and report assembly for
//! the `nca` binary.
//!
//! Commands produce a [`VerificationReport`] whose JSON serialization is
//! byte-stable for a fixed (config, seed, bound) triple except for the
//! trailing `timing_ms` field.  Exit policy: 0 when nothing failed, 1 when
//! any check failed, 2 for configuration or input errors (handled by the
//! binary, which maps `Err` from these functions to exit 2).

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use nca_core::arakelov::{deg_exact, div_of_ideal, product_formula_check, riemann_roch_check};
use nca_core::bundles::{
    adeg_order_exact, duality_check, dual_order_height, height, involution_independence_probe,
    line_bundle_of_complete_ideal, orthogonal_complement, untwisted_duality_check,
    untwisted_height, CheckStatus, DualityCheck,
};
use nca_core::linalg::{parse_rat, rat_pow, rat_to_string, Rat, RatMatrix};
use nca_core::orders::{build_order, preset_order, primes_above};
use nca_core::sampling::{Sampler, DEFAULT_COEFF_BOUND};
use nca_core::{build_algebra, AlgebraSpec, Error, FreeSubmodule, HeightValue, OrderLattice};

pub const ENV_COEFF_BOUND: &str = "NCA_COEFF_BOUND";

/// Workspace description: which order to work over, the seed for randomized
/// suites, and an optional default output path.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceConfig {
    /// Required for explicit orders; must be absent for presets, which carry
    /// their own algebra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    pub order: OrderSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Either a named preset or an explicit generator matrix over the algebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Preset(String),
    Explicit {
        /// Rows of ring generators in algebra coordinates, "p/q" strings.
        generators: Vec<Vec<String>>,
        #[serde(default)]
        known_maximal: bool,
    },
}

/// Free submodule of A^ambient: each generator lists `ambient` algebra
/// elements, each element its coordinates as "p/q" strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmoduleSpec {
    pub ambient: usize,
    pub generators: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    ProductFormula,
    RiemannRoch,
    Duality,
    DegreeConsistency,
    InvolutionProbe,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::ProductFormula,
        Suite::RiemannRoch,
        Suite::Duality,
        Suite::DegreeConsistency,
        Suite::InvolutionProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ProductFormula => "product_formula",
            Suite::RiemannRoch => "riemann_roch",
            Suite::Duality => "duality",
            Suite::DegreeConsistency => "degree_consistency",
            Suite::InvolutionProbe => "involution_probe",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| anyhow!("unknown suite {s:?}; expected one of product_formula, riemann_roch, duality, degree_consistency, involution_probe"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Skip,
    Fail,
}

/// One exact comparison.  A `fail` always carries both sides.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeRow {
    pub p: u64,
    pub index: usize,
    pub capacity: usize,
    pub norm: String,
    pub residue_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightEntry {
    pub h_squared: String,
    pub log_h: f64,
}

impl HeightEntry {
    fn of(value: &HeightValue) -> HeightEntry {
        HeightEntry { h_squared: rat_to_string(&value.h_squared), log_h: value.log_h }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightDetails {
    /// `H_O(V⊥)` under the canonical metric.
    pub complement: HeightEntry,
    /// `H_Õ(V)` over the dual lattice of the order.
    pub dual_order: HeightEntry,
    /// `H_Õ(V⊥)`.
    pub dual_order_complement: HeightEntry,
    /// `H′_O(V)` under the untwisted pairing; absent when that pairing is
    /// degenerate on V (see `untwisted_note`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub untwisted: Option<HeightEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub untwisted_note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightSummary {
    pub h_squared: String,
    pub log_h: f64,
    pub rank: usize,
    pub details: HeightDetails,
}

/// Echo of everything that determined the run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportInputs {
    pub algebra: String,
    pub order: String,
    pub dim: usize,
    pub known_maximal: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submodule: Option<SubmoduleSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub inputs: ReportInputs,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<PrimeRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightSummary>,
    /// Wall time; the only field exempt from byte-stability.
    pub timing_ms: u64,
}

impl VerificationReport {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    /// 0 when every check passed or was skipped, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.any_failed() {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            serde_json::to_string(self).expect("report serializes")
        }
    }
}

pub fn load_config(path: &Path) -> anyhow::Result<WorkspaceConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: WorkspaceConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    Ok(cfg)
}

pub fn load_submodule(path: &Path) -> anyhow::Result<SubmoduleSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read submodule spec {}", path.display()))?;
    let spec: SubmoduleSpec = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse submodule spec {}", path.display()))?;
    Ok(spec)
}

/// Builds the order the config describes.  Presets carry their own algebra;
/// explicit orders require one.
pub fn resolve_order(cfg: &WorkspaceConfig) -> anyhow::Result<(Arc<OrderLattice>, String)> {
    match &cfg.order {
        OrderSpec::Preset(name) => {
            if cfg.algebra.is_some() {
                bail!("config lists both an algebra and the order preset {name:?}; presets carry their own algebra");
            }
            let order = preset_order(name).with_context(|| format!("order preset {name:?}"))?;
            Ok((order, name.clone()))
        }
        OrderSpec::Explicit { generators, known_maximal } => {
            let spec = cfg
                .algebra
                .as_ref()
                .ok_or_else(|| anyhow!("explicit orders require an algebra spec"))?;
            let alg = Arc::new(build_algebra(spec)?);
            let d = alg.dim();
            let mut rows = Vec::with_capacity(generators.len());
            for (i, row) in generators.iter().enumerate() {
                if row.len() != d {
                    bail!("order generator {i} has {} coordinates, algebra dimension is {d}", row.len());
                }
                rows.push(row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<Rat>, _>>()?);
            }
            let order = build_order(&alg, &RatMatrix::from_rows(rows), *known_maximal)?;
            Ok((Arc::new(order), format!("explicit({} generators)", generators.len())))
        }
    }
}

/// Effective sampling bound: flag beats the NCA_COEFF_BOUND variable beats
/// the default of 9.
pub fn effective_coeff_bound(flag: Option<i64>) -> anyhow::Result<i64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(ENV_COEFF_BOUND) {
        Ok(text) => text
            .trim()
            .parse::<i64>()
            .map_err(|_| anyhow!("{ENV_COEFF_BOUND} must be an integer, got {text:?}")),
        Err(_) => Ok(DEFAULT_COEFF_BOUND),
    }
}

fn base_inputs(cfg: &WorkspaceConfig, order: &OrderLattice, order_label: String) -> ReportInputs {
    ReportInputs {
        algebra: order.algebra().label().to_string(),
        order: order_label,
        dim: order.dim(),
        known_maximal: order.known_maximal(),
        seed: cfg.seed,
        coeff_bound: None,
        suite: None,
        count: None,
        p: None,
        submodule: None,
    }
}

fn record_duality(name: &str, check: &DualityCheck) -> CheckRecord {
    let status = match check.status {
        CheckStatus::Pass => Status::Pass,
        CheckStatus::Fail => Status::Fail,
        CheckStatus::Skipped => Status::Skip,
    };
    CheckRecord {
        name: name.to_string(),
        lhs: check.lhs.as_ref().map(rat_to_string),
        rhs: check.rhs.as_ref().map(rat_to_string),
        status,
        reason: check.reason.clone(),
    }
}

/// Lists the primes over p with their invariants, in the library's
/// canonical order.
pub fn cmd_primes(cfg: &WorkspaceConfig, p: u64) -> anyhow::Result<VerificationReport> {
    let start = Instant::now();
    let (order, label) = resolve_order(cfg)?;
    let rows = primes_above(&order, p)?
        .iter()
        .map(|q| PrimeRow {
            p,
            index: q.index,
            capacity: q.capacity,
            norm: q.norm.to_string(),
            residue_dim: q.residue_dim,
        })
        .collect();
    let mut inputs = base_inputs(cfg, &order, label);
    inputs.p = Some(p);
    Ok(VerificationReport {
        command: "primes".into(),
        inputs,
        checks: Vec::new(),
        primes: Some(rows),
        height: None,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub count: usize,
    /// Overrides the config seed when set.
    pub seed: Option<u64>,
    /// Overrides NCA_COEFF_BOUND and the default when set.
    pub coeff_bound: Option<i64>,
}

/// Runs `count` randomized exact checks of the chosen suite.
pub fn cmd_verify(cfg: &WorkspaceConfig, opts: VerifyOptions) -> anyhow::Result<VerificationReport> {
    let start = Instant::now();
    let (order, label) = resolve_order(cfg)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let bound = effective_coeff_bound(opts.coeff_bound)?;
    let mut sampler = Sampler::with_bound(seed, bound)?;
    let mut checks = Vec::new();
    for i in 0..opts.count {
        run_case(&order, opts.suite, i, &mut sampler, &mut checks)?;
    }
    let mut inputs = base_inputs(cfg, &order, label);
    inputs.seed = seed;
    inputs.coeff_bound = Some(bound);
    inputs.suite = Some(opts.suite.name().to_string());
    inputs.count = Some(opts.count);
    Ok(VerificationReport {
        command: "verify".into(),
        inputs,
        checks,
        primes: None,
        height: None,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

/// Ambient rank and submodule rank for the i-th randomized duality or probe
/// case: cycles through every (n, rank) pair with n ≤ 3.
fn case_shape(i: usize) -> (usize, usize) {
    const SHAPES: [(usize, usize); 6] = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)];
    SHAPES[i % SHAPES.len()]
}

fn run_case(
    order: &Arc<OrderLattice>,
    suite: Suite,
    i: usize,
    s: &mut Sampler,
    checks: &mut Vec<CheckRecord>,
) -> anyhow::Result<()> {
    let alg = order.algebra();
    match suite {
        Suite::ProductFormula => {
            let u = s.algebra_unit(order)?;
            let c = product_formula_check(order, &u)?;
            checks.push(CheckRecord {
                name: format!("product_formula[{i}]"),
                lhs: Some(rat_to_string(&c.lhs)),
                rhs: Some(rat_to_string(&c.rhs)),
                status: if c.passes() { Status::Pass } else { Status::Fail },
                reason: None,
            });
        }
        Suite::RiemannRoch => {
            let ideal = s.complete_ideal(order)?;
            let c = riemann_roch_check(&ideal)?;
            checks.push(CheckRecord {
                name: format!("riemann_roch[{i}]"),
                lhs: Some(rat_to_string(&c.lhs)),
                rhs: Some(rat_to_string(&c.rhs)),
                status: if c.passes() { Status::Pass } else { Status::Fail },
                reason: None,
            });
        }
        Suite::DegreeConsistency => {
            let ideal = s.complete_ideal(order)?;
            let lhs = adeg_order_exact(&line_bundle_of_complete_ideal(&ideal)?)?;
            let rhs = deg_exact(order, &div_of_ideal(&ideal)?)?;
            // Cross-powered mantissas decide certificate equality exactly.
            let lhs_str = rat_to_string(&rat_pow(lhs.mantissa(), rhs.scale() as i64));
            let rhs_str = rat_to_string(&rat_pow(rhs.mantissa(), lhs.scale() as i64));
            checks.push(CheckRecord {
                name: format!("degree_consistency[{i}]"),
                lhs: Some(lhs_str),
                rhs: Some(rhs_str),
                status: if lhs.eq_exact(&rhs) { Status::Pass } else { Status::Fail },
                reason: None,
            });
        }
        Suite::Duality => {
            let (n, rank) = case_shape(i);
            let v = s.free_submodule(alg, n, rank)?;
            let report = duality_check(order, &v)?;
            checks.push(record_duality(&format!("duality[{i}].dt1"), &report.dt1));
            checks.push(record_duality(&format!("duality[{i}].dt2"), &report.dt2));
            checks.push(record_duality(&format!("duality[{i}].index"), &report.index));
            match untwisted_duality_check(order, &v) {
                Ok(check) => {
                    checks.push(record_duality(&format!("duality[{i}].untwisted"), &check));
                }
                Err(Error::ZeroGram) => checks.push(CheckRecord {
                    name: format!("duality[{i}].untwisted"),
                    lhs: None,
                    rhs: None,
                    status: Status::Skip,
                    reason: Some("untwisted pairing is degenerate on the sampled submodule".into()),
                }),
                Err(e) => return Err(e.into()),
            }
        }
        Suite::InvolutionProbe => {
            let (n, rank) = case_shape(i);
            let v = s.free_submodule(alg, n, rank)?;
            let second = sample_positive_involution(order, s)?;
            let probe = involution_independence_probe(order, &v, &second)?;
            checks.push(CheckRecord {
                name: format!("involution_probe[{i}]"),
                lhs: Some(rat_to_string(&probe.first)),
                rhs: Some(rat_to_string(&probe.second)),
                status: Status::Pass,
                reason: Some(
                    if probe.equal {
                        "heights agree under both involutions (finding, not an assertion)"
                    } else {
                        "heights differ between the involutions (finding, not an assertion)"
                    }
                    .into(),
                ),
            });
        }
    }
    Ok(())
}

/// Random positive involution x ↦ u·x*·u⁻¹ with u = g·g* for an invertible
/// g from the order, as a coordinate matrix.
fn sample_positive_involution(
    order: &Arc<OrderLattice>,
    s: &mut Sampler,
) -> anyhow::Result<RatMatrix> {
    let alg = order.algebra();
    let g = s.invertible_order_element(order)?;
    let u = alg.mul(&g, &alg.involute(&g));
    let u_inv = alg.try_invert(&u)?;
    let rows = (0..alg.dim())
        .map(|i| alg.mul(&alg.mul(&u, &alg.involute(&alg.basis_element(i))), &u_inv))
        .collect();
    Ok(RatMatrix::from_rows(rows))
}

/// Heights of the submodule the spec describes: V itself, its complement,
/// both over the dual lattice, the untwisted variant, and the duality
/// cross-checks as report rows.
pub fn cmd_height(cfg: &WorkspaceConfig, spec: &SubmoduleSpec) -> anyhow::Result<VerificationReport> {
    let start = Instant::now();
    let (order, label) = resolve_order(cfg)?;
    let alg = order.algebra();
    let v = parse_submodule(&order, spec)?;

    let main = height(&order, &v)?;
    let comp = orthogonal_complement(alg, &v)?;
    let mut details = HeightDetails {
        complement: HeightEntry::of(&height(&order, &comp)?),
        dual_order: HeightEntry::of(&dual_order_height(&order, &v)?),
        dual_order_complement: HeightEntry::of(&dual_order_height(&order, &comp)?),
        untwisted: None,
        untwisted_note: None,
    };
    match untwisted_height(&order, &v) {
        Ok(value) => details.untwisted = Some(HeightEntry::of(&value)),
        Err(Error::ZeroGram) => {
            details.untwisted_note =
                Some("untwisted pairing is degenerate on this submodule".into());
        }
        Err(e) => return Err(e.into()),
    }

    let mut checks = Vec::new();
    let report = duality_check(&order, &v)?;
    checks.push(record_duality("duality.dt1", &report.dt1));
    checks.push(record_duality("duality.dt2", &report.dt2));
    checks.push(record_duality("duality.index", &report.index));
    match untwisted_duality_check(&order, &v) {
        Ok(check) => checks.push(record_duality("duality.untwisted", &check)),
        Err(Error::ZeroGram) => checks.push(CheckRecord {
            name: "duality.untwisted".into(),
            lhs: None,
            rhs: None,
            status: Status::Skip,
            reason: Some("untwisted pairing is degenerate on this submodule".into()),
        }),
        Err(e) => return Err(e.into()),
    }

    let mut inputs = base_inputs(cfg, &order, label);
    inputs.submodule = Some(spec.clone());
    Ok(VerificationReport {
        command: "height".into(),
        inputs,
        checks,
        primes: None,
        height: Some(HeightSummary {
            h_squared: rat_to_string(&main.h_squared),
            log_h: main.log_h,
            rank: v.rank(),
            details,
        }),
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

fn parse_submodule(order: &OrderLattice, spec: &SubmoduleSpec) -> anyhow::Result<FreeSubmodule> {
    let alg = order.algebra();
    let d = alg.dim();
    if spec.ambient == 0 {
        bail!("ambient rank must be at least 1");
    }
    let mut generators = Vec::with_capacity(spec.generators.len());
    for (gi, gen) in spec.generators.iter().enumerate() {
        if gen.len() != spec.ambient {
            bail!(
                "generator {gi} lists {} elements, ambient rank is {}",
                gen.len(),
                spec.ambient
            );
        }
        let mut flat = Vec::with_capacity(spec.ambient * d);
        for (ei, element) in gen.iter().enumerate() {
            if element.len() != d {
                bail!(
                    "generator {gi}, element {ei}: {} coordinates, algebra dimension is {d}",
                    element.len()
                );
            }
            for s in element {
                flat.push(parse_rat(s)?);
            }
        }
        generators.push(flat);
    }
    Ok(FreeSubmodule::new(alg, spec.ambient, &generators)?)
}

/// Writes the report where the flag or the config says, or to stdout.
pub fn emit_report(
    report: &VerificationReport,
    cfg: &WorkspaceConfig,
    output_flag: Option<&Path>,
    pretty: bool,
) -> anyhow::Result<()> {
    let text = report.to_json(pretty);
    match output_flag.or(cfg.output.as_deref()) {
        Some(path) => std::fs::write(path, text.as_bytes())
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}
