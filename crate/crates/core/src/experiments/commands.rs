use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::report::{Record, Report, Table};
use super::{CommandInfo, ExperimentConfig, SymbolSpec, Tolerances};
use crate::ball;
use crate::dbr::{self, KernelCombo};
use crate::error::{Error, Result};
use crate::kernels::{self, KernelSpec, PointSet, Sampler, Verdict};
use crate::linalg;
use crate::operators::{
    comp_matrix, composition_upper_bound, norm_trace, op_norm_lower, weighted_comp_matrix,
    SpaceSpec,
};
use crate::series::{BallMap, BallPoly, DiskPoly, SelfMapDisk, C64};

const MAX_COMBO_DEGREE: usize = 1024;

fn parse<P: DeserializeOwned>(params: &Map<String, Value>) -> Result<P> {
    serde_json::from_value(Value::Object(params.clone())).map_err(|e| Error::Config(e.to_string()))
}

fn echo(cfg: &ExperimentConfig, params: &impl Serialize) -> Value {
    json!({
        "name": cfg.name,
        "seed": cfg.seed,
        "params": serde_json::to_value(params).unwrap_or(Value::Null),
        "tolerances": serde_json::to_value(cfg.tolerances).unwrap_or(Value::Null),
    })
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    seed ^ (k + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Polynomial with Gaussian coefficients rescaled so their absolute sum, and
/// hence the sup on the disk, lies in `[sup / 2, sup]`.
fn random_symbol(rng: &mut impl Rng, max_degree: usize, sup: f64) -> Result<SelfMapDisk> {
    let d = rng.random_range(1..=max_degree.max(1));
    let coeffs: Vec<C64> = (0..=d).map(|_| gaussian(rng)).collect();
    let l1: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let scale = sup * rng.random_range(0.5..=1.0) / l1;
    SelfMapDisk::new(DiskPoly::new(
        coeffs.into_iter().map(|c| c * scale).collect(),
    )?)
}

fn random_combo(
    rng: &mut impl Rng,
    b: &SelfMapDisk,
    alpha: u32,
    max_nodes: usize,
    radius: f64,
) -> Result<KernelCombo> {
    let k = rng.random_range(1..=max_nodes.max(1));
    let mut last = Error::PointSet("no attempt".into());
    for _ in 0..16 {
        let pts: Vec<C64> = (0..k).map(|_| Sampler::point(rng, 1, radius)[0]).collect();
        match PointSet::disk(&pts) {
            Ok(nodes) => {
                let coeffs = (0..k).map(|_| gaussian(rng)).collect();
                return KernelCombo::new(b.clone(), alpha, nodes, coeffs);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Taylor polynomial of a kernel combination whose tail bound is at most `tol`.
fn combo_poly(f: &KernelCombo, tol: f64) -> Result<(DiskPoly, f64)> {
    let mut n = 16;
    loop {
        let tail = f.tail_bound(n);
        if tail <= tol {
            return Ok((f.to_disk_poly(n), tail));
        }
        if n >= MAX_COMBO_DEGREE {
            return Err(Error::IncreaseDegree { tail, limit: tol });
        }
        n += 16;
    }
}

fn disk_space(alpha: u32) -> Result<SpaceSpec> {
    if alpha == 1 {
        Ok(SpaceSpec::hardy())
    } else {
        SpaceSpec::bergman(alpha as f64)
    }
}

/// `c + A z` with `|c| + ||A|| <= margin`, so the row of multipliers is a
/// contraction and `K^{b,alpha}` is positive.
fn random_affine_map(rng: &mut impl Rng, offset_radius: f64, margin: f64) -> Result<BallMap> {
    let c = Sampler::point(rng, 2, offset_radius);
    let a = DMatrix::from_fn(2, 2, |_, _| gaussian(rng));
    let op_norm = linalg::hermitian_eigenvalues(&(a.adjoint() * &a))[1]
        .max(0.0)
        .sqrt();
    let c_norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = (margin - c_norm) * rng.random_range(0.5..=1.0) / op_norm;
    let coords = (0..2)
        .map(|i| {
            BallPoly::new(
                2,
                [
                    (vec![0, 0], c[i]),
                    (vec![1, 0], a[(i, 0)] * scale),
                    (vec![0, 1], a[(i, 1)] * scale),
                ],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    BallMap::new(coords)
}

struct BallFamilyParams {
    maps: usize,
    alphas: Vec<f64>,
    witness_budget: usize,
    set_size: usize,
    radius: f64,
    offset_radius: f64,
    margin: f64,
}

macro_rules! ball_family_params {
    ($name:ident { $($field:ident: $ty:ty = $default:expr),* $(,)? }) => {
        #[derive(Clone, Debug, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        struct $name {
            maps: usize,
            alphas: Vec<f64>,
            witness_budget: usize,
            set_size: usize,
            radius: f64,
            offset_radius: f64,
            margin: f64,
            $($field: $ty),*
        }

        impl Default for $name {
            fn default() -> Self {
                Self {
                    maps: 10,
                    alphas: vec![1.0, 2.0],
                    witness_budget: 200,
                    set_size: 8,
                    radius: 0.95,
                    offset_radius: 0.4,
                    margin: 0.9,
                    $($field: $default),*
                }
            }
        }

        impl $name {
            fn family(&self) -> BallFamilyParams {
                BallFamilyParams {
                    maps: self.maps,
                    alphas: self.alphas.clone(),
                    witness_budget: self.witness_budget,
                    set_size: self.set_size,
                    radius: self.radius,
                    offset_radius: self.offset_radius,
                    margin: self.margin,
                }
            }
        }
    };
}

struct CertifiedMap {
    map: BallMap,
    attempt: usize,
    trials: usize,
}

/// Random affine maps with no negative Gram matrix found for any `alpha`.
fn certified_ball_maps(
    seed: u64,
    p: &BallFamilyParams,
    tol_scale: f64,
) -> Result<Vec<CertifiedMap>> {
    let mut accepted = Vec::with_capacity(p.maps);
    let max_attempts = 10 * p.maps.max(1);
    let mut attempt = 0;
    while accepted.len() < p.maps {
        if attempt >= max_attempts {
            return Err(Error::Parameter(format!(
                "only {} of {} maps passed the positivity search",
                accepted.len(),
                p.maps
            )));
        }
        let map = random_affine_map(
            &mut stream(sub_seed(seed, 1), attempt as u64),
            p.offset_radius,
            p.margin,
        )?;
        let mut trials = 0;
        let mut negative = false;
        for (k, &alpha) in p.alphas.iter().enumerate() {
            let sampler = Sampler::new(
                sub_seed(seed, 1000 + (attempt * p.alphas.len() + k) as u64),
                p.radius,
                p.set_size,
            );
            let spec = KernelSpec::BallKb {
                b: map.clone(),
                alpha,
            };
            let search =
                kernels::search_negative_witness(&spec, sampler, p.witness_budget, tol_scale)?;
            trials += search.trials_run;
            negative |= search.found.is_some();
        }
        if !negative {
            accepted.push(CertifiedMap {
                map,
                attempt,
                trials,
            });
        }
        attempt += 1;
    }
    Ok(accepted)
}

// hardy-bound

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HardyBoundParams {
    symbol: SymbolSpec,
    degrees: Vec<usize>,
    expect_sharp: Option<bool>,
}

impl Default for HardyBoundParams {
    fn default() -> Self {
        Self {
            symbol: SymbolSpec::mobius(0.5),
            degrees: vec![16, 32, 64, 128, 256],
            expect_sharp: None,
        }
    }
}

fn hardy_bound(cfg: &ExperimentConfig) -> Result<Report> {
    let p: HardyBoundParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let b = p.symbol.build()?;
    let n = *p
        .degrees
        .iter()
        .max()
        .ok_or_else(|| Error::Config("degrees must be non-empty".into()))?;
    let trace = norm_trace(&comp_matrix(&b, &SpaceSpec::hardy(), n)?, &p.degrees);
    let upper = composition_upper_bound(b.at_origin().norm(), 1.0);
    let mut table = Table::new(&["N", "lower", "upper"]);
    for t in &trace.trace {
        table.push(vec![t.n.into(), t.lower.into(), upper.into()]);
    }
    report.push(Record::at_most(
        "largest finite-section lower bound on ||C_b|| against ((1+|b(0)|)/(1-|b(0)|))^(1/2)",
        "composition-norm-bound",
        trace.lower,
        upper,
        tol.hardy_bound,
    ));
    if p.expect_sharp.unwrap_or(p.symbol.is_inner()) {
        report.push(Record::at_most(
            format!(
                "gap between the bound and the lower bound at N = {}",
                trace.col_degree
            ),
            "inner-symbol-sharpness",
            (upper - trace.lower).abs(),
            tol.sharpness,
            0.0,
        ));
    }
    report.add_table("trace", table, true);
    Ok(report)
}

// theorem1 and the weighted half of bergman-bound

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct WeightedParams {
    trials: usize,
    alpha: u32,
    max_degree: usize,
    max_nodes: usize,
    node_radius: f64,
    sup: f64,
    section_degree: usize,
    tail: f64,
}

impl Default for WeightedParams {
    fn default() -> Self {
        Self {
            trials: 100,
            alpha: 1,
            max_degree: 4,
            max_nodes: 5,
            node_radius: 0.7,
            sup: 0.95,
            section_degree: 32,
            tail: 1e-12,
        }
    }
}

fn weighted_trials(
    seed: u64,
    p: &WeightedParams,
    tol: &Tolerances,
    report: &mut Report,
    table: &mut Table,
) -> Result<()> {
    let space = disk_space(p.alpha)?;
    for t in 0..p.trials {
        let mut rng = stream(seed, t as u64);
        let b = random_symbol(&mut rng, p.max_degree, p.sup)?;
        let f = random_combo(&mut rng, &b, p.alpha, p.max_nodes, p.node_radius)?;
        let norm = dbr::hb_norm_combo(&f)?.value;
        let (poly, _) = combo_poly(&f, p.tail)?;
        let lower =
            op_norm_lower(&weighted_comp_matrix(&poly, &b, &space, p.section_degree)?).lower;
        report.push(Record::at_most(
            format!("alpha = {}, trial {t}: lower bound on ||M_f C_b|| against ||f|| in the kernel space of b", p.alpha),
            "weighted-composition-contractive",
            lower,
            norm,
            tol.relative * norm,
        ));
        table.push(vec![
            (p.alpha as usize).into(),
            t.into(),
            b.degree().into(),
            f.nodes.len().into(),
            b.at_origin().norm().into(),
            lower.into(),
            norm.into(),
        ]);
    }
    Ok(())
}

fn weighted_table() -> Table {
    Table::new(&[
        "alpha",
        "trial",
        "degree",
        "nodes",
        "b0_modulus",
        "lower",
        "hb_norm",
    ])
}

fn theorem1(cfg: &ExperimentConfig) -> Result<Report> {
    let p: WeightedParams = parse(&cfg.params)?;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let mut table = weighted_table();
    weighted_trials(cfg.seed, &p, &cfg.tolerances, &mut report, &mut table)?;
    report.add_table("trials", table, true);
    Ok(report)
}

// szego-identity

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SzegoParams {
    symbols: Vec<SymbolSpec>,
    degrees: Vec<usize>,
    points: usize,
    radius: f64,
}

impl Default for SzegoParams {
    fn default() -> Self {
        Self {
            symbols: vec![
                SymbolSpec::poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
                SymbolSpec::poly(&[(0.1, 0.0), (0.5, 0.0), (0.3, 0.0)]),
                SymbolSpec::poly(&[(0.2, 0.0), (0.0, 0.4), (0.25, 0.0), (0.0, -0.1)]),
            ],
            degrees: vec![16, 32, 64],
            points: 10,
            radius: 0.5,
        }
    }
}

fn szego_identity(cfg: &ExperimentConfig) -> Result<Report> {
    let p: SzegoParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let mut degrees = p.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    let (Some(&lo), Some(&hi)) = (degrees.first(), degrees.last()) else {
        return Err(Error::Config("degrees must be non-empty".into()));
    };
    let pts = Sampler::new(cfg.seed, p.radius, p.points).draw(1, 0)?;
    let mut table = Table::new(&["symbol", "N", "modes", "residual"]);
    for (i, symbol) in p.symbols.iter().enumerate() {
        let b = symbol.build()?;
        let mut residuals = Vec::with_capacity(degrees.len());
        for &n in &degrees {
            let onb = dbr::onb_defect(&b, n, None)?;
            let res = dbr::szego_residual(&onb, &pts)?;
            table.push(vec![i.into(), n.into(), onb.modes.len().into(), res.into()]);
            residuals.push(res);
        }
        let last = *residuals.last().expect("non-empty");
        report.push(Record::at_most(
            format!(
                "symbol {i}: Szego reconstruction residual at N = {hi} over {} point pairs",
                p.points * p.points
            ),
            "szego-kernel-identity",
            last,
            tol.szego_residual,
            0.0,
        ));
        report.push(Record::at_most(
            format!("symbol {i}: residual at N = {hi} against residual at N = {lo}"),
            "szego-kernel-identity",
            last,
            residuals[0],
            0.0,
        ));
    }
    report.add_table("residuals", table, true);
    Ok(report)
}

// summation

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SummationParams {
    symbol: SymbolSpec,
    section_degree: usize,
    test_degree: usize,
    modes: Option<usize>,
}

impl Default for SummationParams {
    fn default() -> Self {
        Self {
            symbol: SymbolSpec::poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
            section_degree: 64,
            test_degree: 8,
            modes: None,
        }
    }
}

fn summation(cfg: &ExperimentConfig) -> Result<Report> {
    let p: SummationParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let b = p.symbol.build()?;
    let trace = dbr::summation_partial(&b, p.section_degree, p.modes, p.test_degree)?;
    let mut table = Table::new(&["M", "defect", "increment_min_eigenvalue", "max_eigenvalue"]);
    for s in &trace.steps {
        table.push(vec![
            s.modes.into(),
            s.defect.into(),
            s.increment_min_eigenvalue.into(),
            s.max_eigenvalue.into(),
        ]);
    }
    let min_inc = trace
        .steps
        .iter()
        .map(|s| s.increment_min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let max_eig = trace
        .steps
        .iter()
        .map(|s| s.max_eigenvalue)
        .fold(f64::NEG_INFINITY, f64::max);
    let defects = trace.defects();
    let rise = defects
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let last = defects.last().copied().unwrap_or(f64::NAN);
    report.push(Record::at_most(
        "negated smallest eigenvalue of any increment S_(M+1) - S_M",
        "summation-identity",
        -min_inc,
        0.0,
        tol.monotone,
    ));
    report.push(Record::at_most(
        "largest eigenvalue of any partial sum S_M",
        "summation-identity",
        max_eig,
        1.0,
        tol.bound,
    ));
    report.push(Record::at_most(
        format!(
            "largest increase between consecutive defects on degree <= {} test monomials",
            p.test_degree
        ),
        "summation-identity",
        rise,
        0.0,
        tol.bound,
    ));
    report.push(Record::at_most(
        format!("defect at M = {} kept modes", trace.steps.len()),
        "summation-identity",
        last,
        tol.summation_defect,
        0.0,
    ));
    report.add_table("partials", table, true);
    Ok(report)
}

// bergman-bound

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BergmanParams {
    alphas: Vec<u32>,
    symbols: usize,
    max_degree: usize,
    sup: f64,
    section_degree: usize,
    weighted_trials: usize,
    max_nodes: usize,
    node_radius: f64,
    tail: f64,
}

impl Default for BergmanParams {
    fn default() -> Self {
        Self {
            alphas: vec![2, 3],
            symbols: 20,
            max_degree: 4,
            sup: 0.95,
            section_degree: 32,
            weighted_trials: 20,
            max_nodes: 5,
            node_radius: 0.7,
            tail: 1e-12,
        }
    }
}

fn bergman_bound(cfg: &ExperimentConfig) -> Result<Report> {
    let p: BergmanParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let mut bounds = Table::new(&["alpha", "symbol", "b0_modulus", "lower", "upper"]);
    let mut weighted = weighted_table();
    for &alpha in &p.alphas {
        let space = disk_space(alpha)?;
        let seed = sub_seed(cfg.seed, alpha as u64);
        for s in 0..p.symbols {
            let b = random_symbol(&mut stream(seed, s as u64), p.max_degree, p.sup)?;
            let q = b.at_origin().norm();
            let lower = op_norm_lower(&comp_matrix(&b, &space, p.section_degree)?).lower;
            let upper = composition_upper_bound(q, alpha as f64);
            report.push(Record::at_most(
                format!("alpha = {alpha}, symbol {s}: lower bound on ||C_b|| against ((1+|b(0)|)/(1-|b(0)|))^(alpha/2)"),
                "bergman-composition-bound",
                lower,
                upper,
                tol.bound,
            ));
            bounds.push(vec![
                (alpha as usize).into(),
                s.into(),
                q.into(),
                lower.into(),
                upper.into(),
            ]);
        }
        let wp = WeightedParams {
            trials: p.weighted_trials,
            alpha,
            max_degree: p.max_degree,
            max_nodes: p.max_nodes,
            node_radius: p.node_radius,
            sup: p.sup,
            section_degree: p.section_degree,
            tail: p.tail,
        };
        weighted_trials(sub_seed(seed, 1), &wp, &tol, &mut report, &mut weighted)?;
    }
    report.add_table("bounds", bounds, true);
    report.add_table("weighted", weighted, false);
    Ok(report)
}

// inf-estimate

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct InfParams {
    symbol: SymbolSpec,
    alpha: u32,
    section_degree: usize,
    radii: Vec<f64>,
    angles: usize,
    circle_points: usize,
}

impl Default for InfParams {
    fn default() -> Self {
        Self {
            symbol: SymbolSpec::mobius(0.5),
            alpha: 1,
            section_degree: 64,
            radii: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            angles: 8,
            circle_points: 4096,
        }
    }
}

/// `||1/f||_inf * ||f||` for the kernel section `f = k^{b,alpha}_w`, with the sup
/// sampled on the circle.
fn kernel_section_estimate(
    b: &SelfMapDisk,
    alpha: u32,
    w: C64,
    circle_points: usize,
) -> Result<(f64, f64)> {
    let spec = if alpha == 1 {
        KernelSpec::Dbr { b: b.clone() }
    } else {
        KernelSpec::DbrAlpha {
            b: b.clone(),
            alpha,
        }
    };
    let norm = kernels::eval_kernel(&spec, &[w], &[w])?.re.max(0.0).sqrt();
    let bw = b.eval(w).conj();
    let one = C64::new(1.0, 0.0);
    let mut sup: f64 = 0.0;
    for k in 0..circle_points {
        let z = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / circle_points as f64);
        sup = sup.max(
            ((one - w.conj() * z) / (one - bw * b.eval(z)))
                .norm()
                .powi(alpha as i32),
        );
    }
    Ok((norm, sup))
}

fn inf_estimate(cfg: &ExperimentConfig) -> Result<Report> {
    let p: InfParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let b = p.symbol.build()?;
    let space = disk_space(p.alpha)?;
    let lower = op_norm_lower(&comp_matrix(&b, &space, p.section_degree)?).lower;
    let mut table = Table::new(&["w_re", "w_im", "hb_norm", "inv_sup", "estimate"]);
    let mut best = f64::INFINITY;
    for &r in &p.radii {
        let count = if r == 0.0 { 1 } else { p.angles.max(1) };
        for k in 0..count {
            let w = C64::from_polar(r, std::f64::consts::TAU * k as f64 / count as f64);
            let (norm, sup) = kernel_section_estimate(&b, p.alpha, w, p.circle_points.max(16))?;
            best = best.min(norm * sup);
            table.push(vec![
                w.re.into(),
                w.im.into(),
                norm.into(),
                sup.into(),
                (norm * sup).into(),
            ]);
        }
    }
    report.push(Record::at_most(
        "lower bound on ||C_b|| against the smallest ||1/f||_inf ||f|| over kernel sections",
        "inf-estimate",
        lower,
        best,
        tol.bound,
    ));
    report.push(Record::at_most(
        "smallest estimate over kernel sections against ((1+|b(0)|)/(1-|b(0)|))^(alpha/2)",
        "inf-estimate",
        best,
        composition_upper_bound(b.at_origin().norm(), p.alpha as f64),
        tol.bound,
    ));
    report.add_table("family", table, true);
    Ok(report)
}

// ball-lemma

ball_family_params!(BallLemmaParams {
    section_degree: usize = 10,
    row_points: usize = 10,
    row_radius: f64 = 0.9
});

fn maps_table(maps: &[CertifiedMap]) -> Table {
    let mut table = Table::new(&[
        "map",
        "attempt",
        "b0_modulus",
        "sampled_sup",
        "witness_trials",
    ]);
    for (i, m) in maps.iter().enumerate() {
        table.push(vec![
            i.into(),
            m.attempt.into(),
            m.map.origin_modulus().into(),
            m.map.sup_check().max_modulus.into(),
            m.trials.into(),
        ]);
    }
    table
}

fn ball_lemma(cfg: &ExperimentConfig) -> Result<Report> {
    let p: BallLemmaParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let maps = certified_ball_maps(cfg.seed, &p.family(), tol.psd_tol_scale)?;
    for (i, m) in maps.iter().enumerate() {
        let b = &m.map;
        for &alpha in &p.alphas {
            let coord = ball::coordinate_multiplier_norms(b, alpha, p.section_degree)?;
            report.push(Record::at_most(
                format!("map {i}, alpha = {alpha}: largest coordinate multiplier lower bound"),
                "coordinate-multipliers-contractive",
                coord.iter().copied().fold(0.0, f64::max),
                1.0,
                tol.bound,
            ));
            for j in 0..p.row_points {
                let w = Sampler::point(
                    &mut stream(sub_seed(cfg.seed, 2000 + i as u64), j as u64),
                    2,
                    p.row_radius,
                );
                let row = ball::row_mult_norm(b, alpha, &w, p.section_degree)?;
                report.push(Record::at_most(
                    format!("map {i}, alpha = {alpha}, point {j}: row multiplier lower bound against |b(w)|"),
                    "row-multiplier-bound",
                    row.row_norm_lower,
                    row.bound,
                    tol.bound,
                ));
            }
            let inv = ball::inv_kernel_mult_norm(b, alpha, p.section_degree)?;
            report.push(Record::at_most(
                format!("map {i}, alpha = {alpha}: inverse kernel multiplier lower bound against (1-|b(0)|)^(-alpha)"),
                "inverse-kernel-multiplier-bound",
                inv.bound.lower,
                inv.bound.upper.expect("upper bound attached"),
                tol.bound,
            ));
        }
    }
    report.add_table("maps", maps_table(&maps), false);
    Ok(report)
}

// ball-bound

ball_family_params!(BallBoundParams { degrees: Vec<usize> = vec![4, 8, 12, 16] });

fn ball_bound(cfg: &ExperimentConfig) -> Result<Report> {
    let p: BallBoundParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let maps = certified_ball_maps(cfg.seed, &p.family(), tol.psd_tol_scale)?;
    let mut table = Table::new(&["map", "alpha", "N", "lower", "upper"]);
    for (i, m) in maps.iter().enumerate() {
        for &alpha in &p.alphas {
            let trace = ball::ball_composition_trace(&m.map, alpha, &p.degrees)?;
            let upper = trace.upper.expect("upper bound attached");
            for t in &trace.trace {
                table.push(vec![
                    i.into(),
                    alpha.into(),
                    t.n.into(),
                    t.lower.into(),
                    upper.into(),
                ]);
            }
            report.push(Record::at_most(
                format!("map {i}, alpha = {alpha}: lower bound on ||C_b|| against ((1+|b(0)|)/(1-|b(0)|))^(alpha/2)"),
                "ball-composition-bound",
                trace.lower,
                upper,
                tol.bound,
            ));
        }
    }
    report.add_table("traces", table, true);
    report.add_table("maps", maps_table(&maps), false);
    Ok(report)
}

// br

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BrParams {
    rs: Vec<f64>,
    alpha: f64,
    degrees: Vec<usize>,
    witness_budget: usize,
    set_size: usize,
    radius: f64,
    /// Radii at or above this value (and below 1) must yield a witness.
    witness_from: f64,
    threshold_degree: usize,
    threshold: f64,
    limit_grid: usize,
}

impl Default for BrParams {
    fn default() -> Self {
        Self {
            rs: vec![0.0, 0.5, 0.8, 0.9, 0.95, 1.0],
            alpha: 1.0,
            degrees: vec![8, 16, 24, 32, 36, 40, 44, 48, 52, 56, 60],
            witness_budget: 10_000,
            set_size: 8,
            radius: 0.95,
            witness_from: 0.95,
            threshold_degree: 40,
            threshold: 3.3533665928806102,
            limit_grid: 11,
        }
    }
}

fn br(cfg: &ExperimentConfig) -> Result<Report> {
    let p: BrParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    let mut table = Table::new(&[
        "r",
        "N",
        "comp_lower",
        "psd_verdict",
        "min_eigenvalue",
        "seed",
    ]);
    let mut first_witness: Option<(f64, PointSet)> = None;
    for (i, &r) in p.rs.iter().enumerate() {
        let sampler = Sampler::new(sub_seed(cfg.seed, i as u64), p.radius, p.set_size);
        let ex = ball::br_experiment(r, p.alpha, &p.degrees, sampler, p.witness_budget)?;
        for row in ex.rows() {
            let verdict = serde_json::to_value(row.psd_verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string));
            table.push(vec![
                row.r.into(),
                row.n.into(),
                row.comp_lower.into(),
                verdict.unwrap_or_default().into(),
                row.min_eigenvalue.into(),
                row.seed.into(),
            ]);
        }
        let trace = &ex.comp_lower_trace.trace;
        if r == 1.0 {
            let flat = trace
                .windows(2)
                .filter(|w| !(w[1].lower > w[0].lower))
                .count();
            report.push(Record::at_most(
                "r = 1: non-increasing steps in the composition lower-bound trace",
                "br-unbounded-at-one",
                flat as f64,
                0.0,
                0.0,
            ));
            report.push(Record::less_than(
                format!(
                    "r = 1: closed-form section norm at N = {} against the final lower bound",
                    p.threshold_degree
                ),
                "br-unbounded-at-one",
                p.threshold,
                ex.comp_lower_trace.lower,
            ));
        } else if r > 0.0 && trace.len() >= 2 {
            let n = trace.len();
            report.push(Record::at_most(
                format!("r = {r}: change between the last two trace values"),
                "br-bounded-below-one",
                (trace[n - 1].lower - trace[n - 2].lower).abs(),
                tol.saturation,
                0.0,
            ));
        }
        if r >= p.witness_from && r < 1.0 {
            let mut record = Record::less_than(
                format!(
                    "r = {r}: smallest Gram eigenvalue of K^(b_r) within {} sampled sets",
                    ex.trials_run
                ),
                "br-kernel-not-positive",
                ex.min_eigenvalue,
                -tol.witness_eigenvalue,
            );
            record.pass &= ex.verdict == Verdict::Negative;
            report.push(record);
        }
        if let (None, Some(w)) = (&first_witness, &ex.witness) {
            first_witness = Some((r, w.clone()));
        }
    }
    report.add_table("br", table, true);
    if let Some((r0, pts)) = first_witness {
        let steps = p.limit_grid.max(2) - 1;
        let mut limit = Table::new(&["r", "min_eigenvalue"]);
        let mut values = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let r = r0 + (1.0 - r0) * k as f64 / steps as f64;
            let v = ball::br_min_eigenvalue(&pts, r, p.alpha)?;
            limit.push(vec![r.into(), v.into()]);
            values.push(v);
        }
        let rises = values.windows(2).filter(|w| !(w[1] < w[0])).count();
        report.push(Record::at_most(
            format!("witness found at r = {r0}: non-decreasing steps of its smallest eigenvalue on [r, 1]"),
            "pointwise-limit",
            rises as f64,
            0.0,
            0.0,
        ));
        report.add_table("limit", limit, false);
    }
    Ok(report)
}

// psd

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Expectation {
    Psd,
    Negative,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PsdParams {
    kernel: KernelSpec,
    points: usize,
    radius: f64,
    trials: usize,
    expect: Expectation,
}

impl Default for PsdParams {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::Szego,
            points: 50,
            radius: 0.95,
            trials: 1,
            expect: Expectation::Psd,
        }
    }
}

fn psd(cfg: &ExperimentConfig) -> Result<Report> {
    let p: PsdParams = parse(&cfg.params)?;
    let tol = cfg.tolerances;
    let mut report = Report::empty(&cfg.name, echo(cfg, &p));
    p.kernel.validate()?;
    let sampler = Sampler::new(cfg.seed, p.radius, p.points);
    let mut table = Table::new(&["trial", "min_eigenvalue", "tolerance", "verdict"]);
    match p.expect {
        Expectation::Psd => {
            for t in 0..p.trials {
                let pts = sampler.draw(p.kernel.dim(), t as u64)?;
                let cert = kernels::check_psd(&kernels::gram(&p.kernel, &pts)?, tol.psd_tol_scale)?;
                let verdict = if cert.verdict == Verdict::Psd {
                    "PSD"
                } else {
                    "NEGATIVE"
                };
                table.push(vec![
                    t.into(),
                    cert.min_eigenvalue.into(),
                    cert.tolerance.into(),
                    verdict.into(),
                ]);
                report.push(Record::at_most(
                    format!(
                        "trial {t}: negated smallest Gram eigenvalue on {} points",
                        p.points
                    ),
                    "kernel-positivity",
                    -cert.min_eigenvalue,
                    cert.tolerance,
                    0.0,
                ));
            }
        }
        Expectation::Negative => {
            let search = kernels::search_negative_witness(
                &p.kernel,
                sampler,
                p.trials.max(1),
                tol.psd_tol_scale,
            )?;
            let mut record = match &search.found {
                Some((_, cert)) => {
                    table.push(vec![
                        (search.trials_run - 1).into(),
                        cert.min_eigenvalue.into(),
                        cert.tolerance.into(),
                        "NEGATIVE".into(),
                    ]);
                    Record::less_than(
                        "smallest Gram eigenvalue of the witness",
                        "kernel-positivity",
                        cert.min_eigenvalue,
                        -cert.tolerance,
                    )
                }
                None => Record::less_than(
                    format!(
                        "smallest Gram eigenvalue within {} sampled sets",
                        search.trials_run
                    ),
                    "kernel-positivity",
                    search.best_min_eigenvalue,
                    0.0,
                ),
            };
            record.pass &= search.found.is_some();
            report.push(record);
        }
    }
    report.add_table("trials", table, true);
    Ok(report)
}

type Runner = fn(&ExperimentConfig) -> Result<Report>;

struct Entry {
    name: &'static str,
    summary: &'static str,
    anchors: &'static [&'static str],
    run: Runner,
    defaults: fn() -> Value,
}

fn defaults_of<P: Default + Serialize>() -> Value {
    serde_json::to_value(P::default()).unwrap_or(Value::Null)
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "hardy-bound",
        summary: "Hardy-space composition norm trace against the closed-form bound; sharpness at inner symbols",
        anchors: &["composition-norm-bound", "inner-symbol-sharpness"],
        run: hardy_bound,
        defaults: defaults_of::<HardyBoundParams>,
    },
    Entry {
        name: "theorem1",
        summary: "random weighted composition operators T_f C_b against the kernel-space norm of f",
        anchors: &["weighted-composition-contractive"],
        run: theorem1,
        defaults: defaults_of::<WeightedParams>,
    },
    Entry {
        name: "szego-identity",
        summary: "Szego kernel rebuilt from a defect-operator basis of H(b)",
        anchors: &["szego-kernel-identity"],
        run: szego_identity,
        defaults: defaults_of::<SzegoParams>,
    },
    Entry {
        name: "summation",
        summary: "monotone partial sums of T_f C_b C_b* T_f* over a basis of H(b)",
        anchors: &["summation-identity"],
        run: summation,
        defaults: defaults_of::<SummationParams>,
    },
    Entry {
        name: "bergman-bound",
        summary: "weighted Bergman composition bounds and weighted composition inequalities",
        anchors: &["bergman-composition-bound", "weighted-composition-contractive"],
        run: bergman_bound,
        defaults: defaults_of::<BergmanParams>,
    },
    Entry {
        name: "inf-estimate",
        summary: "composition norm against ||1/f||_inf ||f|| minimized over kernel sections",
        anchors: &["inf-estimate"],
        run: inf_estimate,
        defaults: defaults_of::<InfParams>,
    },
    Entry {
        name: "ball-lemma",
        summary: "coordinate, row and inverse-kernel multiplier checks for sampled-positive ball maps",
        anchors: &["coordinate-multipliers-contractive", "row-multiplier-bound", "inverse-kernel-multiplier-bound"],
        run: ball_lemma,
        defaults: defaults_of::<BallLemmaParams>,
    },
    Entry {
        name: "ball-bound",
        summary: "ball composition norm traces against the closed-form bound",
        anchors: &["ball-composition-bound"],
        run: ball_bound,
        defaults: defaults_of::<BallBoundParams>,
    },
    Entry {
        name: "br",
        summary: "composition traces and kernel witnesses for b_r(z1, z2) = (2r z1 z2, 0)",
        anchors: &["br-unbounded-at-one", "br-bounded-below-one", "br-kernel-not-positive", "pointwise-limit"],
        run: br,
        defaults: defaults_of::<BrParams>,
    },
    Entry {
        name: "psd",
        summary: "standalone Gram-matrix positivity certification of a kernel",
        anchors: &["kernel-positivity"],
        run: psd,
        defaults: defaults_of::<PsdParams>,
    },
];

pub(super) fn registry() -> Vec<CommandInfo> {
    ENTRIES
        .iter()
        .map(|e| CommandInfo {
            name: e.name,
            summary: e.summary,
            anchors: e.anchors,
            default_params: (e.defaults)(),
        })
        .collect()
}

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<Report> {
    let entry = ENTRIES
        .iter()
        .find(|e| e.name == cfg.name)
        .ok_or_else(|| Error::Config(format!("unknown command {:?}", cfg.name)))?;
    (entry.run)(cfg)
}
