//! Per-face saliency maps, evaluation metrics (CC, SIM, KLD, SE), the
//! salient-vs-non-salient sampling analysis, and a curvature x texture
//! baseline predictor.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Uniform floor added before normalizing for SIM/KLD.
const EPS_NORM: f64 = 1e-12;

/// One nonnegative density per face. `normalized` marks that the values
/// sum to 1 (a probability distribution over faces).
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl SaliencyMap {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::invalid("saliency values must be finite and >= 0"));
        }
        Ok(SaliencyMap {
            values,
            normalized: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Scale to sum 1. Errors when the total is zero.
    pub fn normalize(mut self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::ZeroSaliencyTotal);
        }
        for v in &mut self.values {
            *v /= total;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Values divided by the maximum, mapping the map onto [0,1].
    pub fn max_normalized_values(&self) -> Vec<f64> {
        let max = self.values.iter().cloned().fold(0.0f64, f64::max);
        if max <= 0.0 {
            return vec![0.0; self.values.len()];
        }
        self.values.iter().map(|&v| v / max).collect()
    }

    /// `face_index,value` CSV with a header; values at 9 significant digits.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("face_index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v:.8e}\n"));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let idx: usize = cols
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::parse(path, lineno + 1, "bad face index"))?;
            let value: f64 = cols
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::parse(path, lineno + 1, "bad value"))?;
            if idx != values.len() {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("face indices must be contiguous from 0, got {idx}"),
                ));
            }
            values.push(value);
        }
        SaliencyMap::new(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    /// Pearson correlation of raw values.
    pub cc: f64,
    /// Histogram intersection of the sum-normalized maps.
    pub sim: f64,
    /// KL divergence D(truth || pred) over sum-normalized maps.
    pub kld: f64,
    /// Mean squared error over max-normalized maps.
    pub se: f64,
    /// Set when the prediction is constant and CC is undefined (reported 0).
    pub cc_degenerate: bool,
}

impl MetricReport {
    /// Single-line record, e.g. `cc=1.000000000,sim=1.000000000,kld=0,se=0`.
    pub fn record_line(&self) -> String {
        format!(
            "cc={:.9},sim={:.9},kld={},se={}",
            self.cc, self.sim, self.kld, self.se
        )
    }

    pub fn pretty(&self) -> String {
        format!(
            "CC  (correlation)        {:>12.9}{}\nSIM (histogram overlap)  {:>12.9}\nKLD (truth || pred)      {:>12.9}\nSE  (mean squared error) {:>12.9}",
            self.cc,
            if self.cc_degenerate {
                "  [constant prediction]"
            } else {
                ""
            },
            self.sim,
            self.kld,
            self.se
        )
    }
}

/// Compare a predicted map against ground truth.
///
/// CC uses the raw values; SIM and KLD normalize both maps to sum 1 after
/// adding a uniform 1e-12 floor; SE is the mean squared difference of the
/// max-normalized maps.
pub fn compare_maps(pred: &SaliencyMap, truth: &SaliencyMap) -> Result<MetricReport> {
    if pred.len() != truth.len() {
        return Err(Error::MapLengthMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("empty saliency maps"));
    }
    if truth.total() <= 0.0 {
        return Err(Error::invalid("truth map is all-zero"));
    }

    let n = pred.len() as f64;
    let mean_p = pred.total() / n;
    let mean_q = truth.total() / n;
    let mut cov = 0.0;
    let mut var_p = 0.0;
    let mut var_q = 0.0;
    for (&p, &q) in pred.values.iter().zip(&truth.values) {
        cov += (p - mean_p) * (q - mean_q);
        var_p += (p - mean_p) * (p - mean_p);
        var_q += (q - mean_q) * (q - mean_q);
    }
    let (cc, cc_degenerate) = if var_p <= 0.0 || var_q <= 0.0 {
        (0.0, true)
    } else {
        ((cov / (var_p * var_q).sqrt()).clamp(-1.0, 1.0), false)
    };

    let pn = floor_normalize(&pred.values);
    let qn = floor_normalize(&truth.values);
    let mut sim = 0.0;
    let mut kld = 0.0;
    for (&p, &q) in pn.iter().zip(&qn) {
        sim += p.min(q);
        if q > 0.0 {
            kld += q * (q / (p + EPS_NORM)).ln();
        }
    }
    // The floor makes identical maps come out a hair below zero.
    let kld = kld.max(0.0);

    let pm = pred.max_normalized_values();
    let qm = truth.max_normalized_values();
    let se = pm
        .iter()
        .zip(&qm)
        .map(|(&p, &q)| (p - q) * (p - q))
        .sum::<f64>()
        / n;

    Ok(MetricReport {
        cc,
        sim,
        kld,
        se,
        cc_degenerate,
    })
}

fn floor_normalize(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().map(|v| v + EPS_NORM).sum();
    values.iter().map(|v| (v + EPS_NORM) / total).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisParams {
    pub repeats: usize,
    pub samples_per_repeat: usize,
    /// Fraction of faces counted as salient (top quantile of the map).
    pub salient_quantile: f64,
    pub seed: u64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            repeats: 100,
            samples_per_repeat: 1000,
            salient_quantile: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisReport {
    /// Fraction of sampled pairs where the salient face had strictly higher
    /// Gaussian curvature.
    pub curvature_concordance: f64,
    /// Same for texture color variance.
    pub variance_concordance: f64,
    pub repeats: usize,
    pub samples_per_repeat: usize,
    pub salient_quantile: f64,
}

impl AnalysisReport {
    pub fn record_line(&self) -> String {
        format!(
            "curvature_concordance={:.6},variance_concordance={:.6},repeats={},samples_per_repeat={},salient_quantile={}",
            self.curvature_concordance,
            self.variance_concordance,
            self.repeats,
            self.samples_per_repeat,
            self.salient_quantile
        )
    }
}

/// Random sampling analysis over salient vs non-salient faces.
///
/// Faces above the (1 - quantile) saliency quantile form the salient set.
/// Each repeat draws `samples_per_repeat` (salient, non-salient) pairs with
/// area-proportional probability and counts the fraction of pairs where the
/// salient face's metric strictly exceeds the other's. Deterministic in the
/// seed.
pub fn sampling_analysis(
    map: &SaliencyMap,
    face_areas: &[f64],
    curvature: &[f64],
    variance: &[f64],
    params: &AnalysisParams,
) -> Result<AnalysisReport> {
    let n = map.len();
    if n == 0 || curvature.len() != n || variance.len() != n || face_areas.len() != n {
        return Err(Error::invalid(
            "map, areas, curvature and variance must share one length",
        ));
    }
    let threshold = quantile(&map.values, 1.0 - params.salient_quantile);
    let salient: Vec<usize> = (0..n).filter(|&f| map.values[f] > threshold).collect();
    let non_salient: Vec<usize> = (0..n).filter(|&f| map.values[f] <= threshold).collect();
    if salient.is_empty() || non_salient.is_empty() {
        return Err(Error::invalid(
            "saliency map is too flat to split into salient and non-salient sets",
        ));
    }

    let salient_cdf = area_cdf(&salient, face_areas);
    let non_salient_cdf = area_cdf(&non_salient, face_areas);

    let mut curv_total = 0.0;
    let mut var_total = 0.0;
    for repeat in 0..params.repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(repeat as u64));
        let mut curv_hits = 0usize;
        let mut var_hits = 0usize;
        for _ in 0..params.samples_per_repeat {
            let s = draw(&salient, &salient_cdf, &mut rng);
            let t = draw(&non_salient, &non_salient_cdf, &mut rng);
            if curvature[s] > curvature[t] {
                curv_hits += 1;
            }
            if variance[s] > variance[t] {
                var_hits += 1;
            }
        }
        curv_total += curv_hits as f64 / params.samples_per_repeat as f64;
        var_total += var_hits as f64 / params.samples_per_repeat as f64;
    }

    Ok(AnalysisReport {
        curvature_concordance: curv_total / params.repeats as f64,
        variance_concordance: var_total / params.repeats as f64,
        repeats: params.repeats,
        samples_per_repeat: params.samples_per_repeat,
        salient_quantile: params.salient_quantile,
    })
}

fn area_cdf(faces: &[usize], areas: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    faces
        .iter()
        .map(|&f| {
            acc += areas[f];
            acc
        })
        .collect()
}

fn draw(faces: &[usize], cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().unwrap();
    let x = rng.gen_range(0.0..total);
    let pos = cdf.partition_point(|&c| c <= x);
    faces[pos.min(faces.len() - 1)]
}

/// Empirical quantile by linear interpolation over the sorted values.
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Heuristic saliency from rank-normalized curvature and texture variance.
pub fn baseline_predict(
    curvature: &[f64],
    variance: &[f64],
    w_curvature: f64,
    w_variance: f64,
) -> Result<SaliencyMap> {
    if curvature.len() != variance.len() || curvature.is_empty() {
        return Err(Error::invalid("inputs must share one nonzero length"));
    }
    if w_curvature < 0.0 || w_variance < 0.0 || w_curvature + w_variance <= 0.0 {
        return Err(Error::invalid("weights must be >= 0 and not both zero"));
    }
    let c_ranks = rank_normalize(curvature)?;
    let v_ranks = rank_normalize(variance)?;
    let values: Vec<f64> = c_ranks
        .iter()
        .zip(&v_ranks)
        .map(|(&c, &v)| w_curvature * c + w_variance * v)
        .collect();
    SaliencyMap::new(values)?.normalize()
}

/// Average ranks mapped to [0,1]; ties share their mean rank.
pub fn rank_normalize(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let first = values[order[0]];
    if values.iter().all(|&v| v == first) {
        return Err(Error::invalid("all-constant input has no ranks"));
    }
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    let denom = (n - 1) as f64;
    Ok(ranks.into_iter().map(|r| r / denom).collect())
}
