//! Multi-distribution learning instances.
//!
//! An [`MDLInstance`] is the object every solver consumes: `n` data
//! distributions, `m` loss functions, and a hypothesis space that is either a
//! finite class or a convex parameter space. The adversary's coordinates are
//! the `n * m` (distribution, loss) pairs in row-major order, see
//! [`MDLInstance::pair_index`].
//!
//! Finite instances with table losses serialize to a line-oriented text
//! document (`mdlinstance v1`). Probabilities and table values are written
//! with Rust's shortest round-trip float formatting, so writing and re-parsing
//! reproduces every `f64` bit-exactly.

use crate::data::{DataDistribution, Datapoint};
use crate::error::{Error, Result};
use crate::hypotheses::FiniteHypothesisClass;
use crate::loss::{LossFunction, SmoothLoss, TableLoss};
use crate::simplex::SimplexWeights;
use crate::space::ConvexParamSpace;

#[derive(Clone, Debug)]
pub enum HypothesisSpace {
    Finite(FiniteHypothesisClass),
    Convex(ConvexParamSpace),
}

#[derive(Clone, Debug)]
pub struct MDLInstance {
    distributions: Vec<DataDistribution>,
    losses: Vec<LossFunction>,
    space: HypothesisSpace,
}

impl MDLInstance {
    pub fn new(
        distributions: Vec<DataDistribution>,
        losses: Vec<LossFunction>,
        space: HypothesisSpace,
    ) -> Result<Self> {
        if distributions.is_empty() {
            return Err(Error::invalid("an instance needs at least one distribution"));
        }
        if losses.is_empty() {
            return Err(Error::invalid("an instance needs at least one loss"));
        }
        Ok(MDLInstance { distributions, losses, space })
    }

    pub fn n(&self) -> usize {
        self.distributions.len()
    }

    pub fn m(&self) -> usize {
        self.losses.len()
    }

    /// Flattened adversary coordinate of the pair (distribution i, loss j).
    pub fn pair_index(&self, dist: usize, loss: usize) -> usize {
        dist * self.m() + loss
    }

    /// Inverse of [`pair_index`](Self::pair_index).
    pub fn pair_of(&self, index: usize) -> (usize, usize) {
        (index / self.m(), index % self.m())
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    pub fn class(&self) -> Result<&FiniteHypothesisClass> {
        match &self.space {
            HypothesisSpace::Finite(c) => Ok(c),
            HypothesisSpace::Convex(_) => {
                Err(Error::invalid("operation needs a finite hypothesis class"))
            }
        }
    }

    pub fn param_space(&self) -> Result<&ConvexParamSpace> {
        match &self.space {
            HypothesisSpace::Convex(s) => Ok(s),
            HypothesisSpace::Finite(_) => {
                Err(Error::invalid("operation needs a convex parameter space"))
            }
        }
    }

    /// Dimension of the learner's action: class size for finite spaces
    /// (weights over hypotheses), parameter dimension for convex spaces.
    pub fn learner_dim(&self) -> usize {
        match &self.space {
            HypothesisSpace::Finite(c) => c.size(),
            HypothesisSpace::Convex(s) => s.dim(),
        }
    }

    pub fn distributions(&self) -> &[DataDistribution] {
        &self.distributions
    }

    pub fn distribution(&self, i: usize) -> Result<&DataDistribution> {
        self.distributions
            .get(i)
            .ok_or_else(|| Error::invalid(format!("distribution index {i} out of range")))
    }

    pub fn distribution_mut(&mut self, i: usize) -> Result<&mut DataDistribution> {
        self.distributions
            .get_mut(i)
            .ok_or_else(|| Error::invalid(format!("distribution index {i} out of range")))
    }

    pub fn losses(&self) -> &[LossFunction] {
        &self.losses
    }

    pub fn loss(&self, j: usize) -> Result<&LossFunction> {
        self.losses
            .get(j)
            .ok_or_else(|| Error::invalid(format!("loss index {j} out of range")))
    }

    /// True when every risk in the instance can be computed in closed form:
    /// finite supports, table losses, finite class.
    pub fn exact_evaluable(&self) -> bool {
        matches!(self.space, HypothesisSpace::Finite(_))
            && self.distributions.iter().all(DataDistribution::is_finite_support)
            && self.losses.iter().all(LossFunction::is_table)
    }

    /// Loss of pure hypothesis `h_idx` under loss `j` at a point.
    pub fn table_loss_value(&self, j: usize, h_idx: usize, z: &Datapoint) -> Result<f64> {
        let table = self.loss(j)?.as_table()?;
        table.value(self.class()?, h_idx, z)
    }

    /// The vector `[loss_j(f, z)]` over all hypotheses `f` in the finite class.
    pub fn loss_vector(&self, j: usize, z: &Datapoint) -> Result<Vec<f64>> {
        let class = self.class()?;
        let table = self.loss(j)?.as_table()?;
        (0..class.size()).map(|h| table.value(class, h, z)).collect()
    }

    pub fn smooth_loss(&self, j: usize) -> Result<&SmoothLoss> {
        self.loss(j)?.as_smooth()
    }

    /// Loss of the learner's current point at a datapoint: for finite spaces
    /// the point is a weight vector and the loss is its mixture under the
    /// table; for convex spaces it is the smooth loss value.
    pub fn point_loss(&self, j: usize, point: &[f64], z: &Datapoint) -> Result<f64> {
        match &self.space {
            HypothesisSpace::Finite(class) => {
                if point.len() != class.size() {
                    return Err(Error::invalid(format!(
                        "weight vector has {} entries for a class of {}",
                        point.len(),
                        class.size()
                    )));
                }
                let table = self.loss(j)?.as_table()?;
                let mut acc = 0.0;
                for (h, &w) in point.iter().enumerate() {
                    if w != 0.0 {
                        acc += w * table.value(class, h, z)?;
                    }
                }
                Ok(acc)
            }
            HypothesisSpace::Convex(_) => Ok(self.smooth_loss(j)?.value(point, z)),
        }
    }

    /// Per-distribution draw counters, in distribution order.
    pub fn draws_per_distribution(&self) -> Vec<u64> {
        self.distributions.iter().map(DataDistribution::draws).collect()
    }

    pub fn total_draws(&self) -> u64 {
        self.distributions.iter().map(DataDistribution::draws).sum()
    }

    pub fn reset_draws(&mut self) {
        for d in &mut self.distributions {
            d.reset_draws();
        }
    }
}

// ---------------------------------------------------------------------------
// Text serialization
// ---------------------------------------------------------------------------

const FORMAT_HEADER: &str = "mdlinstance v1";

/// Serializes a finite, table-loss instance to the text format. Convex spaces,
/// smooth losses, and sampler-backed distributions cannot be written.
pub fn write_instance(instance: &MDLInstance) -> Result<String> {
    let class = match instance.space() {
        HypothesisSpace::Finite(c) => c,
        HypothesisSpace::Convex(_) => {
            return Err(Error::UnsupportedExact(
                "only finite-class instances serialize to the instance format".into(),
            ))
        }
    };
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    out.push_str(&format!("n = {}\n", instance.n()));
    out.push_str(&format!("m = {}\n", instance.m()));
    out.push_str(&format!("features = {}\n", class.features()));
    out.push_str(&format!("hypotheses = {}\n", class.size()));
    for h in 0..class.size() {
        let row: Vec<String> = class.labels(h).iter().map(|&l| fmt_label(l)).collect();
        out.push_str(&format!("hypothesis {h} = {}\n", row.join(" ")));
    }
    for (j, loss) in instance.losses().iter().enumerate() {
        match loss {
            LossFunction::Table(TableLoss::ZeroOne) => {
                out.push_str(&format!("loss {j} = zero-one\n"));
            }
            LossFunction::Table(TableLoss::Explicit { values }) => {
                out.push_str(&format!("loss {j} = table\n"));
                for (h, row) in values.iter().enumerate() {
                    let cells: Vec<String> =
                        row.iter().flat_map(|pair| pair.iter().map(|v| format!("{v}"))).collect();
                    out.push_str(&format!("table {j} {h} = {}\n", cells.join(" ")));
                }
            }
            LossFunction::Smooth(_) => {
                return Err(Error::UnsupportedExact(
                    "smooth losses cannot be written to the instance format".into(),
                ))
            }
        }
    }
    for (i, dist) in instance.distributions().iter().enumerate() {
        let (points, probs) = dist.support()?;
        let atoms: Vec<String> = points
            .iter()
            .zip(probs)
            .map(|(z, &p)| match z {
                Datapoint::Discrete { feature, label } => {
                    format!("{feature}:{}:{p}", fmt_label(*label))
                }
                Datapoint::Vector(v) => {
                    let coords: Vec<String> = v.iter().map(|c| format!("{c}")).collect();
                    format!("v({}):{p}", coords.join(","))
                }
            })
            .collect();
        out.push_str(&format!("distribution {i} = {}\n", atoms.join(" ")));
    }
    Ok(out)
}

fn fmt_label(l: i8) -> String {
    if l == 1 { "+1".into() } else { "-1".into() }
}

fn parse_label(s: &str, line: usize) -> Result<i8> {
    match s {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(Error::InstanceFormat { line, message: format!("bad label `{s}`") }),
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::InstanceFormat { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| bad(line, format!("cannot parse {what} from `{s}`")))
}

/// Parses the text format produced by [`write_instance`]. Draw counters start
/// at zero on the parsed copy.
pub fn parse_instance(text: &str) -> Result<MDLInstance> {
    let mut lines = text.lines().enumerate().peekable();
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| bad(0, "empty document"))?;
    if first.trim() != FORMAT_HEADER {
        return Err(bad(first_no + 1, format!("expected `{FORMAT_HEADER}` header")));
    }

    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut features: Option<usize> = None;
    let mut hyp_count: Option<usize> = None;
    let mut hypotheses: Vec<Option<Vec<i8>>> = Vec::new();
    let mut loss_kinds: Vec<Option<String>> = Vec::new();
    let mut tables: Vec<Option<Vec<Option<Vec<[f64; 2]>>>>> = Vec::new();
    let mut dists: Vec<Option<Vec<(Datapoint, f64)>>> = Vec::new();

    for (no, raw) in lines {
        let line_no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, value) = line
            .split_once('=')
            .ok_or_else(|| bad(line_no, "expected `key = value`"))?;
        let mut head_parts = head.split_whitespace();
        let key = head_parts.next().ok_or_else(|| bad(line_no, "missing key"))?;
        let value = value.trim();
        match key {
            "n" => n = Some(parse_num(value, line_no, "n")?),
            "m" => {
                m = Some(parse_num(value, line_no, "m")?);
                loss_kinds = vec![None; m.unwrap()];
                tables = vec![None; m.unwrap()];
            }
            "features" => features = Some(parse_num(value, line_no, "features")?),
            "hypotheses" => {
                hyp_count = Some(parse_num(value, line_no, "hypothesis count")?);
                hypotheses = vec![None; hyp_count.unwrap()];
            }
            "hypothesis" => {
                let idx: usize = parse_num(
                    head_parts.next().ok_or_else(|| bad(line_no, "hypothesis needs an index"))?,
                    line_no,
                    "hypothesis index",
                )?;
                let slot = hypotheses
                    .get_mut(idx)
                    .ok_or_else(|| bad(line_no, format!("hypothesis index {idx} out of range")))?;
                let labels: Result<Vec<i8>> =
                    value.split_whitespace().map(|s| parse_label(s, line_no)).collect();
                *slot = Some(labels?);
            }
            "loss" => {
                let idx: usize = parse_num(
                    head_parts.next().ok_or_else(|| bad(line_no, "loss needs an index"))?,
                    line_no,
                    "loss index",
                )?;
                let slot = loss_kinds
                    .get_mut(idx)
                    .ok_or_else(|| bad(line_no, format!("loss index {idx} out of range")))?;
                *slot = Some(value.to_string());
            }
            "table" => {
                let j: usize = parse_num(
                    head_parts.next().ok_or_else(|| bad(line_no, "table needs a loss index"))?,
                    line_no,
                    "loss index",
                )?;
                let h: usize = parse_num(
                    head_parts.next().ok_or_else(|| bad(line_no, "table needs a hypothesis index"))?,
                    line_no,
                    "hypothesis index",
                )?;
                let nh = hyp_count.ok_or_else(|| bad(line_no, "table before hypotheses count"))?;
                let nf = features.ok_or_else(|| bad(line_no, "table before features count"))?;
                let table = tables
                    .get_mut(j)
                    .ok_or_else(|| bad(line_no, format!("loss index {j} out of range")))?
                    .get_or_insert_with(|| vec![None; nh]);
                let cells: Result<Vec<f64>> = value
                    .split_whitespace()
                    .map(|s| parse_num::<f64>(s, line_no, "table value"))
                    .collect();
                let cells = cells?;
                if cells.len() != 2 * nf {
                    return Err(bad(line_no, format!("expected {} table values, got {}", 2 * nf, cells.len())));
                }
                let row: Vec<[f64; 2]> = cells.chunks(2).map(|c| [c[0], c[1]]).collect();
                *table
                    .get_mut(h)
                    .ok_or_else(|| bad(line_no, format!("hypothesis index {h} out of range")))? =
                    Some(row);
            }
            "distribution" => {
                let i: usize = parse_num(
                    head_parts.next().ok_or_else(|| bad(line_no, "distribution needs an index"))?,
                    line_no,
                    "distribution index",
                )?;
                let count = n.ok_or_else(|| bad(line_no, "distribution before n"))?;
                if dists.is_empty() {
                    dists = vec![None; count];
                }
                let mut support = Vec::new();
                for atom in value.split_whitespace() {
                    support.push(parse_atom(atom, line_no)?);
                }
                *dists
                    .get_mut(i)
                    .ok_or_else(|| bad(line_no, format!("distribution index {i} out of range")))? =
                    Some(support);
            }
            other => return Err(bad(line_no, format!("unknown key `{other}`"))),
        }
    }

    let n = n.ok_or_else(|| bad(0, "missing n"))?;
    if dists.len() != n {
        return Err(bad(0, format!("declared n = {n} but found {} distributions", dists.len())));
    }
    let m = m.ok_or_else(|| bad(0, "missing m"))?;
    let _ = features.ok_or_else(|| bad(0, "missing features"))?;
    let labels: Result<Vec<Vec<i8>>> = hypotheses
        .into_iter()
        .enumerate()
        .map(|(h, row)| row.ok_or_else(|| bad(0, format!("hypothesis {h} missing"))))
        .collect();
    let class = FiniteHypothesisClass::new(labels?)?;

    let mut losses = Vec::with_capacity(m);
    for (j, kind) in loss_kinds.into_iter().enumerate() {
        let kind = kind.ok_or_else(|| bad(0, format!("loss {j} missing")))?;
        match kind.as_str() {
            "zero-one" => losses.push(LossFunction::zero_one()),
            "table" => {
                let rows = tables[j]
                    .take()
                    .ok_or_else(|| bad(0, format!("loss {j} declared as table but has no rows")))?;
                let values: Result<Vec<Vec<[f64; 2]>>> = rows
                    .into_iter()
                    .enumerate()
                    .map(|(h, r)| r.ok_or_else(|| bad(0, format!("table row for loss {j}, hypothesis {h} missing"))))
                    .collect();
                losses.push(LossFunction::Table(TableLoss::explicit(values?)?));
            }
            other => return Err(bad(0, format!("unknown loss kind `{other}`"))),
        }
    }

    let distributions: Result<Vec<DataDistribution>> = dists
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let support = d.ok_or_else(|| bad(0, format!("distribution {i} missing")))?;
            DataDistribution::finite(support)
        })
        .collect();

    MDLInstance::new(distributions?, losses, HypothesisSpace::Finite(class))
}

fn parse_atom(atom: &str, line: usize) -> Result<(Datapoint, f64)> {
    if let Some(rest) = atom.strip_prefix("v(") {
        let (coords, prob) = rest
            .split_once("):")
            .ok_or_else(|| bad(line, format!("bad vector atom `{atom}`")))?;
        let v: Result<Vec<f64>> =
            coords.split(',').map(|c| parse_num::<f64>(c, line, "coordinate")).collect();
        Ok((Datapoint::Vector(v?), parse_num(prob, line, "probability")?))
    } else {
        let mut parts = atom.split(':');
        let feature: usize = parse_num(
            parts.next().ok_or_else(|| bad(line, "empty atom"))?,
            line,
            "feature",
        )?;
        let label = parse_label(parts.next().ok_or_else(|| bad(line, "atom missing label"))?, line)?;
        let prob: f64 = parse_num(
            parts.next().ok_or_else(|| bad(line, "atom missing probability"))?,
            line,
            "probability",
        )?;
        Ok((Datapoint::discrete(feature, label)?, prob))
    }
}

/// Convenience: weights interpreted over the instance's finite class.
pub fn uniform_weights(instance: &MDLInstance) -> Result<SimplexWeights> {
    SimplexWeights::uniform(instance.class()?.size())
}
