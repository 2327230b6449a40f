//! Seeded instance generators.
//!
//! The hard families behind the sample-complexity lower bound (per-feature
//! distributions and biased coins) are exact constructions; the agnostic,
//! realizable, and convex families are randomized workloads for sweeps and
//! acceptance runs. Every generator is a pure function of its parameters
//! (and seed, where one applies).

use std::collections::BTreeSet;

use rand::Rng;

use crate::data::{DataDistribution, Datapoint};
use crate::error::{Error, Result};
use crate::hypotheses::FiniteHypothesisClass;
use crate::loss::{LossFunction, SmoothLoss};
use crate::minimax::matrix_game_value;
use crate::problem::{HypothesisSpace, MDLInstance};
use crate::rng::{substream, STREAM_GENERATOR};
use crate::space::ConvexParamSpace;

/// Cap on `class_size * n * support_size` for the randomized finite-class
/// generators.
const MAX_GENERATED_CELLS: usize = 100_000;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.125) {
        return Err(Error::invalid(format!("eps must lie in (0, 1/8), got {eps}")));
    }
    Ok(())
}

/// Which member of the lower-bound family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBoundVariant {
    /// Every feature carries `eta` copies of the baseline distribution.
    Base,
    /// Copy `copy` of feature `x_star`'s distribution is replaced by the
    /// perturbed one whose optimal label flips.
    Perturbed { x_star: usize, copy: usize },
}

/// The hard family from the sample-complexity lower bound: `w` features,
/// `eta` distributions per feature, each concentrated on its feature with
/// label masses `1/2 - 2*eps` on +1 and `1/2 + 2*eps` on -1. The perturbed
/// distribution flips the bias to `1/2 + 4*eps` on +1. The class is every
/// labeling of the `w` features, so `w` is capped at 16.
pub fn make_lower_bound_family(
    w: usize,
    eta: usize,
    eps: f64,
    variant: LowerBoundVariant,
) -> Result<MDLInstance> {
    check_eps(eps)?;
    if w == 0 || eta == 0 {
        return Err(Error::invalid("the family needs w >= 1 features and eta >= 1 copies"));
    }
    let class = FiniteHypothesisClass::all_labelings(w)?;
    if let LowerBoundVariant::Perturbed { x_star, copy } = variant {
        if x_star >= w || copy >= eta {
            return Err(Error::invalid(format!(
                "perturbation ({x_star}, {copy}) outside {w} features x {eta} copies"
            )));
        }
    }
    let mut dists = Vec::with_capacity(w * eta);
    for x in 0..w {
        for copy in 0..eta {
            let perturbed = variant == LowerBoundVariant::Perturbed { x_star: x, copy };
            dists.push(lower_bound_dist(x, eps, perturbed)?);
        }
    }
    MDLInstance::new(dists, vec![LossFunction::zero_one()], HypothesisSpace::Finite(class))
}

fn lower_bound_dist(x: usize, eps: f64, perturbed: bool) -> Result<DataDistribution> {
    let p_plus = if perturbed { 0.5 + 4.0 * eps } else { 0.5 - 2.0 * eps };
    DataDistribution::finite(vec![
        (Datapoint::discrete(x, 1)?, p_plus),
        (Datapoint::discrete(x, -1)?, 1.0 - p_plus),
    ])
}

/// Draws a variant from the lower-bound argument's prior: the base family
/// with probability 1/2, otherwise a uniformly random perturbation (each of
/// the `w * eta` choices gets mass `1/(2 w eta)`).
pub fn sample_lower_bound_variant(w: usize, eta: usize, seed: u64) -> Result<LowerBoundVariant> {
    if w == 0 || eta == 0 {
        return Err(Error::invalid("the family needs w >= 1 features and eta >= 1 copies"));
    }
    let mut rng = substream(seed, STREAM_GENERATOR);
    let u: f64 = rng.gen();
    if u < 0.5 {
        return Ok(LowerBoundVariant::Base);
    }
    let cell = (((u - 0.5) * 2.0 * (w * eta) as f64) as usize).min(w * eta - 1);
    Ok(LowerBoundVariant::Perturbed { x_star: cell / eta, copy: cell % eta })
}

/// Which coin hypothesis governs the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoinHypothesis {
    /// All coins biased toward tails (label -1) with probability `1/2 + 2*eps`.
    Null,
    /// Coin `i` biased toward heads (label +1) with probability `1/2 + 4*eps`.
    Biased(usize),
}

/// The biased-coin testing family: `eta` single-feature distributions over
/// labels heads = +1 and tails = -1, under the null or one biased alternative.
pub fn make_coin_instance(eta: usize, eps: f64, hypothesis: CoinHypothesis) -> Result<MDLInstance> {
    check_eps(eps)?;
    if eta == 0 {
        return Err(Error::invalid("the coin family needs eta >= 1 coins"));
    }
    if let CoinHypothesis::Biased(i) = hypothesis {
        if i >= eta {
            return Err(Error::invalid(format!("coin index {i} outside {eta} coins")));
        }
    }
    let class = FiniteHypothesisClass::all_labelings(1)?;
    let dists = (0..eta)
        .map(|c| {
            let p_heads = match hypothesis {
                CoinHypothesis::Biased(i) if i == c => 0.5 + 4.0 * eps,
                _ => 0.5 - 2.0 * eps,
            };
            DataDistribution::finite(vec![
                (Datapoint::discrete(0, 1)?, p_heads),
                (Datapoint::discrete(0, -1)?, 1.0 - p_heads),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    MDLInstance::new(dists, vec![LossFunction::zero_one()], HypothesisSpace::Finite(class))
}

fn check_generated_size(class_size: usize, n: usize, support_size: usize) -> Result<()> {
    if class_size == 0 || n == 0 || support_size == 0 {
        return Err(Error::invalid("generator sizes must all be >= 1"));
    }
    let cells = class_size
        .checked_mul(n)
        .and_then(|c| c.checked_mul(support_size))
        .unwrap_or(usize::MAX);
    if cells > MAX_GENERATED_CELLS {
        return Err(Error::ResourceLimit(format!(
            "generated instance would have {cells} table cells, cap is {MAX_GENERATED_CELLS}"
        )));
    }
    if support_size < 20 && class_size > (1usize << support_size) {
        return Err(Error::invalid(format!(
            "{class_size} distinct hypotheses do not exist on {support_size} features"
        )));
    }
    Ok(())
}

fn random_distinct_class(
    class_size: usize,
    features: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> FiniteHypothesisClass {
    let mut rows: BTreeSet<Vec<i8>> = BTreeSet::new();
    while rows.len() < class_size {
        let row: Vec<i8> =
            (0..features).map(|_| if rng.gen_range(0..2) == 1 { 1 } else { -1 }).collect();
        rows.insert(row);
    }
    FiniteHypothesisClass::new(rows.into_iter().collect()).expect("distinct nonempty rows")
}

fn random_label_dist(
    features: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<DataDistribution> {
    let mut support = Vec::with_capacity(2 * features);
    let mut mass = Vec::with_capacity(2 * features);
    for x in 0..features {
        for label in [-1i8, 1] {
            support.push(Datapoint::discrete(x, label)?);
            mass.push(rng.gen_range(0.05..1.0));
        }
    }
    let total: f64 = mass.iter().sum();
    DataDistribution::finite(
        support.into_iter().zip(mass.into_iter().map(|m| m / total)).collect(),
    )
}

/// Random exact-evaluable finite-class instance: `class_size` distinct
/// hypotheses over `support_size` features, `n` random label distributions,
/// zero-one loss. Workload generator for sweeps and oracle comparisons.
pub fn make_random_agnostic(
    class_size: usize,
    n: usize,
    support_size: usize,
    seed: u64,
) -> Result<MDLInstance> {
    check_generated_size(class_size, n, support_size)?;
    let mut rng = substream(seed, STREAM_GENERATOR);
    let class = random_distinct_class(class_size, support_size, &mut rng);
    let dists =
        (0..n).map(|_| random_label_dist(support_size, &mut rng)).collect::<Result<Vec<_>>>()?;
    MDLInstance::new(dists, vec![LossFunction::zero_one()], HypothesisSpace::Finite(class))
}

/// Like [`make_random_agnostic`] but every distribution labels its features
/// by one planted hypothesis from the class, so that hypothesis has zero
/// risk everywhere and the instance's optimum is 0.
pub fn make_realizable(
    class_size: usize,
    n: usize,
    support_size: usize,
    seed: u64,
) -> Result<MDLInstance> {
    check_generated_size(class_size, n, support_size)?;
    let mut rng = substream(seed, STREAM_GENERATOR);
    let class = random_distinct_class(class_size, support_size, &mut rng);
    let target = rng.gen_range(0..class_size);
    let target_labels = class.labels(target).to_vec();
    let dists = (0..n)
        .map(|_| {
            let mut support = Vec::with_capacity(support_size);
            let mut mass = Vec::with_capacity(support_size);
            for (x, &label) in target_labels.iter().enumerate() {
                support.push(Datapoint::discrete(x, label)?);
                mass.push(rng.gen_range(0.05..1.0));
            }
            let total: f64 = mass.iter().sum();
            DataDistribution::finite(
                support.into_iter().zip(mass.into_iter().map(|m| m / total)).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    MDLInstance::new(dists, vec![LossFunction::zero_one()], HypothesisSpace::Finite(class))
}

/// Convex instance family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexFamily {
    /// Linear loss `<theta, z>` over the probability simplex with entropy
    /// geometry; the optimum is a matrix-game value over group means.
    Bilinear,
    /// Normalized logistic loss over the Euclidean unit ball.
    Logistic,
}

/// Construction constants recorded alongside a generated convex instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexGdroMeta {
    /// Exact optimum when one is computable in closed form (bilinear family).
    pub exact_opt: Option<f64>,
    /// Raw coordinates were mapped as `v -> (v - shift) * scale` into [0, 1].
    pub shift: f64,
    pub scale: f64,
    /// Loss values were divided by this to land in [0, 1].
    pub normalizer: f64,
}

const BILINEAR_ATOMS: usize = 4;
const LOGISTIC_ATOMS: usize = 6;

/// Random convex group-DRO instance with a single smooth loss. See
/// [`ConvexFamily`] for the two shapes; the returned metadata records the
/// rescaling constants and, for the bilinear family, the exact optimum.
pub fn make_convex_gdro(
    dim: usize,
    n: usize,
    family: ConvexFamily,
    seed: u64,
) -> Result<(MDLInstance, ConvexGdroMeta)> {
    if dim < 2 {
        return Err(Error::invalid("convex instances need dim >= 2"));
    }
    if n == 0 {
        return Err(Error::invalid("convex instances need n >= 1 groups"));
    }
    let mut rng = substream(seed, STREAM_GENERATOR);
    match family {
        ConvexFamily::Bilinear => bilinear_instance(dim, n, &mut rng),
        ConvexFamily::Logistic => logistic_instance(dim, n, &mut rng),
    }
}

fn bilinear_instance(
    dim: usize,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(MDLInstance, ConvexGdroMeta)> {
    let mut groups: Vec<Vec<(Vec<f64>, f64)>> = Vec::with_capacity(n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..n {
        let mut atoms = Vec::with_capacity(BILINEAR_ATOMS);
        let mut mass = Vec::with_capacity(BILINEAR_ATOMS);
        for _ in 0..BILINEAR_ATOMS {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for &c in &v {
                lo = lo.min(c);
                hi = hi.max(c);
            }
            atoms.push(v);
            mass.push(rng.gen_range(0.05..1.0));
        }
        let total: f64 = mass.iter().sum();
        groups.push(atoms.into_iter().zip(mass.into_iter().map(|m| m / total)).collect());
    }
    let scale = if hi > lo { 1.0 / (hi - lo) } else { 1.0 };
    let shift = lo;

    // Group means of the rescaled coordinates; the optimum is the value of
    // the matrix game rows = coordinates, columns = groups.
    let mut means = vec![vec![0.0f64; n]; dim];
    for (i, group) in groups.iter().enumerate() {
        for (v, p) in group {
            for (j, &c) in v.iter().enumerate() {
                means[j][i] += p * (c - shift) * scale;
            }
        }
    }
    let exact_opt = matrix_game_value(&means)?.value;

    let dists = groups
        .into_iter()
        .map(|group| {
            DataDistribution::finite(
                group
                    .into_iter()
                    .map(|(v, p)| {
                        let rescaled: Vec<f64> =
                            v.iter().map(|&c| (c - shift) * scale).collect();
                        (Datapoint::Vector(rescaled), p)
                    })
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let loss = LossFunction::Smooth(SmoothLoss::new(
        |theta: &[f64], z: &Datapoint| {
            let Datapoint::Vector(c) = z else { panic!("bilinear loss expects vector points") };
            theta.iter().zip(c).map(|(t, ci)| t * ci).sum()
        },
        |_theta: &[f64], z: &Datapoint| {
            let Datapoint::Vector(c) = z else { panic!("bilinear loss expects vector points") };
            c.clone()
        },
        1.0,
    )?);
    let instance = MDLInstance::new(
        dists,
        vec![loss],
        HypothesisSpace::Convex(ConvexParamSpace::simplex(dim)?),
    )?;
    Ok((instance, ConvexGdroMeta { exact_opt: Some(exact_opt), shift, scale, normalizer: 1.0 }))
}

fn logistic_instance(
    dim: usize,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(MDLInstance, ConvexGdroMeta)> {
    let normalizer = (1.0 + std::f64::consts::E).ln();
    let dists = (0..n)
        .map(|_| {
            // Per-group ground-truth direction with label noise, so groups
            // disagree and the worst-group objective is nontrivial.
            let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w_norm = w.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            for c in &mut w {
                *c /= w_norm;
            }
            let flip = rng.gen_range(0.0..0.3);
            let atoms = (0..LOGISTIC_ATOMS)
                .map(|_| {
                    let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if norm > 1.0 {
                        for c in &mut x {
                            *c /= norm;
                        }
                    }
                    let clean: f64 = w.iter().zip(&x).map(|(wi, xi)| wi * xi).sum();
                    let mut y = if clean >= 0.0 { 1.0 } else { -1.0 };
                    if rng.gen::<f64>() < flip {
                        y = -y;
                    }
                    x.push(y);
                    (Datapoint::Vector(x), 1.0 / LOGISTIC_ATOMS as f64)
                })
                .collect();
            DataDistribution::finite(atoms)
        })
        .collect::<Result<Vec<_>>>()?;

    let instance = MDLInstance::new(
        dists,
        vec![logistic_loss()?],
        HypothesisSpace::Convex(ConvexParamSpace::ball(dim, 1.0)?),
    )?;
    Ok((instance, ConvexGdroMeta { exact_opt: None, shift: 0.0, scale: 1.0, normalizer }))
}

/// Normalized logistic loss on examples of the form `[x..., y]` with
/// `|x|_2 <= 1` and `y = +/-1`: `ln(1 + exp(-y <theta, x>))` scaled by
/// `ln(1 + e)` so values stay in `[0, 1]` and gradients stay inside the unit
/// ball whenever `theta` does.
pub fn logistic_loss() -> Result<LossFunction> {
    let normalizer = (1.0 + std::f64::consts::E).ln();
    Ok(LossFunction::Smooth(SmoothLoss::new(
        move |theta: &[f64], z: &Datapoint| {
            let (x, y) = split_example(z, theta.len());
            let margin: f64 = theta.iter().zip(x).map(|(t, xi)| t * xi).sum();
            (1.0 + (-y * margin).exp()).ln() / normalizer
        },
        move |theta: &[f64], z: &Datapoint| {
            let (x, y) = split_example(z, theta.len());
            let margin: f64 = theta.iter().zip(x).map(|(t, xi)| t * xi).sum();
            let sigma = 1.0 / (1.0 + (y * margin).exp());
            x.iter().map(|xi| -y * xi * sigma / normalizer).collect()
        },
        1.0,
    )?))
}

fn split_example(z: &Datapoint, dim: usize) -> (&[f64], f64) {
    let Datapoint::Vector(v) = z else { panic!("logistic loss expects vector points") };
    assert_eq!(v.len(), dim + 1, "example must hold {dim} features plus a label");
    (&v[..dim], v[dim])
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

pub const SPEC_HEADER: &str = "mdlspec v1";

/// A generator invocation as data: family plus parameters, serializable to
/// the flat key-value config format. [`InstanceSpec::build`] runs the
/// generator (dropping the convex families' metadata).
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    LowerBound { w: usize, eta: usize, eps: f64, variant: LowerBoundVariant },
    Coins { eta: usize, eps: f64, hypothesis: CoinHypothesis },
    RandomAgnostic { class_size: usize, n: usize, support_size: usize, seed: u64 },
    Realizable { class_size: usize, n: usize, support_size: usize, seed: u64 },
    ConvexGdro { dim: usize, n: usize, family: ConvexFamily, seed: u64 },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<MDLInstance> {
        match *self {
            InstanceSpec::LowerBound { w, eta, eps, variant } => {
                make_lower_bound_family(w, eta, eps, variant)
            }
            InstanceSpec::Coins { eta, eps, hypothesis } => {
                make_coin_instance(eta, eps, hypothesis)
            }
            InstanceSpec::RandomAgnostic { class_size, n, support_size, seed } => {
                make_random_agnostic(class_size, n, support_size, seed)
            }
            InstanceSpec::Realizable { class_size, n, support_size, seed } => {
                make_realizable(class_size, n, support_size, seed)
            }
            InstanceSpec::ConvexGdro { dim, n, family, seed } => {
                Ok(make_convex_gdro(dim, n, family, seed)?.0)
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{SPEC_HEADER}\n");
        match self {
            InstanceSpec::LowerBound { w, eta, eps, variant } => {
                out.push_str("family = lower-bound\n");
                out.push_str(&format!("w = {w}\neta = {eta}\neps = {eps}\n"));
                match variant {
                    LowerBoundVariant::Base => out.push_str("variant = base\n"),
                    LowerBoundVariant::Perturbed { x_star, copy } => {
                        out.push_str(&format!("variant = perturbed {x_star} {copy}\n"))
                    }
                }
            }
            InstanceSpec::Coins { eta, eps, hypothesis } => {
                out.push_str("family = coins\n");
                out.push_str(&format!("eta = {eta}\neps = {eps}\n"));
                match hypothesis {
                    CoinHypothesis::Null => out.push_str("hypothesis = null\n"),
                    CoinHypothesis::Biased(i) => {
                        out.push_str(&format!("hypothesis = biased {i}\n"))
                    }
                }
            }
            InstanceSpec::RandomAgnostic { class_size, n, support_size, seed } => {
                out.push_str("family = random-agnostic\n");
                out.push_str(&format!(
                    "class_size = {class_size}\nn = {n}\nsupport_size = {support_size}\nseed = {seed}\n"
                ));
            }
            InstanceSpec::Realizable { class_size, n, support_size, seed } => {
                out.push_str("family = realizable\n");
                out.push_str(&format!(
                    "class_size = {class_size}\nn = {n}\nsupport_size = {support_size}\nseed = {seed}\n"
                ));
            }
            InstanceSpec::ConvexGdro { dim, n, family, seed } => {
                out.push_str("family = convex-gdro\n");
                let family = match family {
                    ConvexFamily::Bilinear => "bilinear",
                    ConvexFamily::Logistic => "logistic",
                };
                out.push_str(&format!(
                    "dim = {dim}\nn = {n}\nconvex_family = {family}\nseed = {seed}\n"
                ));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<InstanceSpec> {
        let mut lines = text.lines();
        match lines.next() {
            Some(first) if first.trim() == SPEC_HEADER => {}
            _ => return Err(Error::invalid(format!("spec must start with `{SPEC_HEADER}`"))),
        }
        let mut fields = std::collections::BTreeMap::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("spec line `{line}` is not key = value")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("spec is missing the `{key}` field")))
        };
        let parse_usize = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| Error::invalid(format!("spec field `{key}` is not an integer")))
        };
        let parse_u64 = |key: &str| -> Result<u64> {
            get(key)?
                .parse()
                .map_err(|_| Error::invalid(format!("spec field `{key}` is not an integer")))
        };
        let parse_f64 = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| Error::invalid(format!("spec field `{key}` is not a number")))
        };
        match get("family")?.as_str() {
            "lower-bound" => {
                let variant = match get("variant")?.as_str() {
                    "base" => LowerBoundVariant::Base,
                    other => match other.strip_prefix("perturbed") {
                        Some(rest) => {
                            let parts: Vec<&str> = rest.split_whitespace().collect();
                            if parts.len() != 2 {
                                return Err(Error::invalid(
                                    "perturbed variant needs two indices: `perturbed X I`",
                                ));
                            }
                            let x_star = parts[0].parse().map_err(|_| {
                                Error::invalid("perturbed variant indices must be integers")
                            })?;
                            let copy = parts[1].parse().map_err(|_| {
                                Error::invalid("perturbed variant indices must be integers")
                            })?;
                            LowerBoundVariant::Perturbed { x_star, copy }
                        }
                        None => {
                            return Err(Error::invalid(format!("unknown variant `{other}`")))
                        }
                    },
                };
                Ok(InstanceSpec::LowerBound {
                    w: parse_usize("w")?,
                    eta: parse_usize("eta")?,
                    eps: parse_f64("eps")?,
                    variant,
                })
            }
            "coins" => {
                let hypothesis = match get("hypothesis")?.as_str() {
                    "null" => CoinHypothesis::Null,
                    other => match other.strip_prefix("biased") {
                        Some(rest) => CoinHypothesis::Biased(rest.trim().parse().map_err(
                            |_| Error::invalid("biased hypothesis needs a coin index"),
                        )?),
                        None => {
                            return Err(Error::invalid(format!("unknown hypothesis `{other}`")))
                        }
                    },
                };
                Ok(InstanceSpec::Coins {
                    eta: parse_usize("eta")?,
                    eps: parse_f64("eps")?,
                    hypothesis,
                })
            }
            "random-agnostic" => Ok(InstanceSpec::RandomAgnostic {
                class_size: parse_usize("class_size")?,
                n: parse_usize("n")?,
                support_size: parse_usize("support_size")?,
                seed: parse_u64("seed")?,
            }),
            "realizable" => Ok(InstanceSpec::Realizable {
                class_size: parse_usize("class_size")?,
                n: parse_usize("n")?,
                support_size: parse_usize("support_size")?,
                seed: parse_u64("seed")?,
            }),
            "convex-gdro" => {
                let family = match get("convex_family")?.as_str() {
                    "bilinear" => ConvexFamily::Bilinear,
                    "logistic" => ConvexFamily::Logistic,
                    other => {
                        return Err(Error::invalid(format!("unknown convex family `{other}`")))
                    }
                };
                Ok(InstanceSpec::ConvexGdro {
                    dim: parse_usize("dim")?,
                    n: parse_usize("n")?,
                    family,
                    seed: parse_u64("seed")?,
                })
            }
            other => Err(Error::invalid(format!("unknown instance family `{other}`"))),
        }
    }
}
