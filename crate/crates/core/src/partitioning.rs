//! Universe of discourse, fuzzy c-means clustering and unequal interval
//! construction from cluster centers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::series::TimeSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("degenerate range: min {min} is not below max {max}")]
    DegenerateRange { min: f64, max: f64 },
    #[error("margin must be finite and non-negative, got {0}")]
    InvalidMargin(f64),
    #[error("need at least {needed} distinct values, found {found}")]
    TooFewDistinctValues { needed: usize, found: usize },
    #[error("cluster count must be at least 2, got {0}")]
    InvalidClusterCount(usize),
    #[error("fuzziness must exceed 1, got {0}")]
    InvalidFuzziness(f64),
    #[error("center {center} lies outside the universe ({lower}, {upper})")]
    CenterOutsideUod { center: f64, lower: f64, upper: f64 },
    #[error("centers are not strictly ascending at position {0}")]
    UnsortedCenters(usize),
    #[error("no centers given")]
    NoCenters,
}

/// Closed interval `[y_min - d, y_max + d]` that every observation falls in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniverseOfDiscourse {
    pub lower: f64,
    pub upper: f64,
    pub margin: f64,
}

impl UniverseOfDiscourse {
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

pub fn define_uod(series: &TimeSeries, margin: f64) -> Result<UniverseOfDiscourse, PartitionError> {
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(PartitionError::InvalidMargin(margin));
    }
    let (min, max) = (series.min(), series.max());
    let (lower, upper) = (min - margin, max + margin);
    if lower >= upper {
        return Err(PartitionError::DegenerateRange { min, max });
    }
    Ok(UniverseOfDiscourse {
        lower,
        upper,
        margin,
    })
}

/// Decimal-decade binning of the range: with `step` the largest power of ten
/// not exceeding `y_max - y_min`, counts the `step`-wide bins touched by
/// `[y_min, y_max]`.
pub fn suggest_cluster_count(y_min: f64, y_max: f64) -> Result<usize, PartitionError> {
    if !(y_min < y_max) || !y_min.is_finite() || !y_max.is_finite() {
        return Err(PartitionError::DegenerateRange {
            min: y_min,
            max: y_max,
        });
    }
    let step = decade_step(y_max - y_min);
    let bins = (y_max / step).floor() - (y_min / step).floor() + 1.0;
    Ok((bins as usize).max(2))
}

fn decade_step(range: f64) -> f64 {
    let mut exp = range.log10().floor() as i32;
    // log10 can land one ulp off an integer for exact powers of ten
    if 10f64.powi(exp + 1) <= range {
        exp += 1;
    } else if 10f64.powi(exp) > range {
        exp -= 1;
    }
    10f64.powi(exp)
}

/// How the membership update turns center distances into memberships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MembershipRule {
    /// `u_ij ∝ (1/d_ij)^(1/(p-1))` on the unsquared distance. This is the
    /// rule that produces the published enrollment centers.
    #[default]
    Literal,
    /// Bezdek's `u_ij ∝ (1/d_ij)^(2/(p-1))`, the exact minimizer of the
    /// weighted SSE for fixed centers. SSE is monotone under this rule.
    Standard,
}

impl MembershipRule {
    fn exponent(self, fuzziness: f64) -> f64 {
        match self {
            MembershipRule::Literal => 1.0 / (fuzziness - 1.0),
            MembershipRule::Standard => 2.0 / (fuzziness - 1.0),
        }
    }
}

impl std::str::FromStr for MembershipRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(Self::Literal),
            "standard" => Ok(Self::Standard),
            other => Err(format!("unknown membership rule `{other}`")),
        }
    }
}

impl std::fmt::Display for MembershipRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Literal => "literal",
            Self::Standard => "standard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmParams {
    pub clusters: usize,
    pub fuzziness: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rule: MembershipRule,
}

impl FcmParams {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            fuzziness: 2.0,
            tol: 1e-5,
            max_iter: 300,
            seed: 42,
            rule: MembershipRule::Literal,
        }
    }
}

/// Result of a fuzzy c-means fit. Centers are sorted ascending and membership
/// columns follow the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub fuzziness: f64,
    pub centers: Vec<f64>,
    /// `n × c`, one row per input value.
    pub memberships: Vec<Vec<f64>>,
    pub sse: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// SSE after each center/membership update pair.
    pub sse_history: Vec<f64>,
}

impl ClusterModel {
    pub fn clusters(&self) -> usize {
        self.centers.len()
    }
}

/// Membership of `x` in each cluster. A point that coincides with a center
/// belongs to it fully.
pub fn membership_row(x: f64, centers: &[f64], fuzziness: f64, rule: MembershipRule) -> Vec<f64> {
    let dist: Vec<f64> = centers.iter().map(|v| (x - v).abs()).collect();
    if let Some(hit) = dist.iter().position(|&d| d == 0.0) {
        let mut row = vec![0.0; centers.len()];
        row[hit] = 1.0;
        return row;
    }
    let e = rule.exponent(fuzziness);
    // u_j = 1 / sum_k (d_j / d_k)^e avoids overflow for tiny distances
    let mut row: Vec<f64> = dist
        .iter()
        .map(|dj| 1.0 / dist.iter().map(|dk| (dj / dk).powf(e)).sum::<f64>())
        .collect();
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|u| *u /= total);
    row
}

/// Weighted sum of squared distances `Σ_i Σ_j u_ij^p (x_i - v_j)^2`.
pub fn weighted_sse(
    values: &[f64],
    memberships: &[Vec<f64>],
    centers: &[f64],
    fuzziness: f64,
) -> f64 {
    values
        .iter()
        .zip(memberships)
        .map(|(x, row)| {
            row.iter()
                .zip(centers)
                .map(|(u, v)| u.powf(fuzziness) * (x - v).powi(2))
                .sum::<f64>()
        })
        .sum()
}

fn update_centers(
    values: &[f64],
    memberships: &[Vec<f64>],
    fuzziness: f64,
    previous: &[f64],
) -> Vec<f64> {
    (0..previous.len())
        .map(|j| {
            let (num, den) =
                values
                    .iter()
                    .zip(memberships)
                    .fold((0.0, 0.0), |(num, den), (x, row)| {
                        let w = row[j].powf(fuzziness);
                        (num + w * x, den + w)
                    });
            if den > 0.0 {
                num / den
            } else {
                previous[j]
            }
        })
        .collect()
}

fn distinct_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted.len()
}

/// Fuzzy c-means on one-dimensional data.
///
/// Memberships start uniformly random per row (row-normalized) from a
/// ChaCha generator seeded with `params.seed`, then centers and memberships
/// alternate until the largest center move drops below `params.tol`. Hitting
/// `max_iter` is not an error; the last iterate is returned.
pub fn fcm_fit(values: &[f64], params: &FcmParams) -> Result<ClusterModel, PartitionError> {
    let c = params.clusters;
    if c < 2 {
        return Err(PartitionError::InvalidClusterCount(c));
    }
    if !(params.fuzziness > 1.0) || !params.fuzziness.is_finite() {
        return Err(PartitionError::InvalidFuzziness(params.fuzziness));
    }
    let found = distinct_count(values);
    if found < c {
        return Err(PartitionError::TooFewDistinctValues { needed: c, found });
    }

    let p = params.fuzziness;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut memberships: Vec<Vec<f64>> = values
        .iter()
        .map(|_| {
            let mut row: Vec<f64> = (0..c).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect();
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|u| *u /= total);
            row
        })
        .collect();

    let mut centers = vec![0.0; c];
    let mut sse_history = Vec::new();
    let mut converged = false;
    let mut iterations_used = 0;
    for iter in 1..=params.max_iter.max(1) {
        let next = update_centers(values, &memberships, p, &centers);
        memberships = values
            .iter()
            .map(|&x| membership_row(x, &next, p, params.rule))
            .collect();
        sse_history.push(weighted_sse(values, &memberships, &next, p));
        let shift = next
            .iter()
            .zip(&centers)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        centers = next;
        iterations_used = iter;
        if iter > 1 && shift < params.tol {
            converged = true;
            break;
        }
    }

    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]));
    let centers: Vec<f64> = order.iter().map(|&j| centers[j]).collect();
    let memberships: Vec<Vec<f64>> = memberships
        .iter()
        .map(|row| order.iter().map(|&j| row[j]).collect())
        .collect();
    let sse = weighted_sse(values, &memberships, &centers, p);

    Ok(ClusterModel {
        fuzziness: p,
        centers,
        memberships,
        sse,
        iterations_used,
        converged,
        sse_history,
    })
}

/// The universe cut at midpoints of adjacent sorted centers.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPartition {
    pub uod: UniverseOfDiscourse,
    /// `c + 1` ascending values from `uod.lower` to `uod.upper`.
    pub boundaries: Vec<f64>,
    pub centers: Vec<f64>,
}

impl IntervalPartition {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Bounds of the 1-based interval `index`.
    pub fn interval(&self, index: usize) -> (f64, f64) {
        (self.boundaries[index - 1], self.boundaries[index])
    }

    /// `index,lower,upper,center` table with a header line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("index,lower,upper,center\n");
        for k in 1..=self.len() {
            let (lo, hi) = self.interval(k);
            out.push_str(&format!("{k},{lo},{hi},{}\n", self.centers[k - 1]));
        }
        out
    }
}

pub fn build_intervals(
    uod: UniverseOfDiscourse,
    centers: &[f64],
) -> Result<IntervalPartition, PartitionError> {
    if centers.is_empty() {
        return Err(PartitionError::NoCenters);
    }
    if let Some(&center) = centers.iter().find(|&&v| !(uod.lower < v && v < uod.upper)) {
        return Err(PartitionError::CenterOutsideUod {
            center,
            lower: uod.lower,
            upper: uod.upper,
        });
    }
    if let Some(i) = centers.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(PartitionError::UnsortedCenters(i + 1));
    }
    let mut boundaries = Vec::with_capacity(centers.len() + 1);
    boundaries.push(uod.lower);
    boundaries.extend(centers.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    boundaries.push(uod.upper);
    Ok(IntervalPartition {
        uod,
        boundaries,
        centers: centers.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::builtin_enrollment;

    pub(crate) const TABLE4_CENTERS: [f64; 7] = [
        13573.95, 15130.14, 15448.22, 15885.33, 16825.08, 18190.36, 19125.23,
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn uod_examples() {
        let s = builtin_enrollment();
        let u = define_uod(&s, 8.0).unwrap();
        assert_eq!((u.lower, u.upper), (13047.0, 19345.0));
        let u0 = define_uod(&s, 0.0).unwrap();
        assert_eq!((u0.lower, u0.upper), (13055.0, 19337.0));
        let small = TimeSeries::from_values(vec![5.0, 10.0, 5.0, 10.0]).unwrap();
        let u2 = define_uod(&small, 2.0).unwrap();
        assert_eq!((u2.lower, u2.upper), (3.0, 12.0));
        assert!(define_uod(&s, -1.0).is_err());
    }

    #[test]
    fn cluster_count_examples() {
        assert_eq!(suggest_cluster_count(13055.0, 19337.0).unwrap(), 7);
        assert_eq!(suggest_cluster_count(4135.0, 6146.0).unwrap(), 3);
        assert_eq!(suggest_cluster_count(3442.0, 6108.0).unwrap(), 4);
        assert_eq!(suggest_cluster_count(3846.0, 6466.0).unwrap(), 4);
        // TAIEX 2004 range yields 3 bins; the published partition uses 2
        assert_eq!(suggest_cluster_count(5312.0, 7038.0).unwrap(), 3);
        assert!(suggest_cluster_count(5.0, 5.0).is_err());
    }

    #[test]
    fn cluster_count_by_enumeration() {
        // step 1 for range 9: integer bins 0..=9 touched by [0.5, 9.5]
        let touched = (0..20).filter(|k| {
            let (lo, hi) = (*k as f64, *k as f64 + 1.0);
            hi > 0.5 && lo <= 9.5
        });
        assert_eq!(touched.count(), 10);
        assert_eq!(suggest_cluster_count(0.5, 9.5).unwrap(), 10);
    }

    #[test]
    fn exact_power_of_ten_range() {
        assert_eq!(decade_step(1000.0), 1000.0);
        assert_eq!(decade_step(999.999), 100.0);
        assert_eq!(decade_step(0.001), 0.001);
        // step <= range, so at least two bins are always touched
        assert_eq!(suggest_cluster_count(10.0, 10.5).unwrap(), 6);
        assert_eq!(suggest_cluster_count(0.0, 1.0).unwrap(), 2);
    }

    #[test]
    fn fcm_two_coincident_pairs() {
        let m = fcm_fit(&[0.0, 0.0, 10.0, 10.0], &FcmParams::new(2)).unwrap();
        assert!(m.centers[0].abs() < 1e-6);
        assert!((m.centers[1] - 10.0).abs() < 1e-6);
        assert!(m.memberships[0][0] >= 0.999);
        assert!(m.converged);
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        for rule in [MembershipRule::Literal, MembershipRule::Standard] {
            let row = membership_row(5.0, &[0.0, 10.0], 2.0, rule);
            assert!((row[0] - 0.5).abs() < 1e-15);
            assert!((row[1] - 0.5).abs() < 1e-15);
        }
        let m = fcm_fit(&[0.0, 0.1, 5.0, 9.9, 10.0], &FcmParams::new(2)).unwrap();
        assert!((m.centers[0] + m.centers[1] - 10.0).abs() < 1e-4);
        assert!((m.memberships[2][0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn coincident_point_guard() {
        let row = membership_row(3.0, &[1.0, 3.0, 7.0], 2.0, MembershipRule::Literal);
        assert_eq!(row, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn fcm_reproduces_enrollment_centers() {
        let s = builtin_enrollment();
        let m = fcm_fit(s.values(), &FcmParams::new(7)).unwrap();
        for (got, want) in m.centers.iter().zip(TABLE4_CENTERS) {
            assert!(rel(*got, want) < 0.005, "{got} vs {want}");
        }
        let recomputed = weighted_sse(s.values(), &m.memberships, &m.centers, 2.0);
        assert!(rel(m.sse, recomputed) < 1e-6);
    }

    #[test]
    fn fcm_rejects_bad_input() {
        assert!(matches!(
            fcm_fit(&[1.0, 1.0, 2.0, 2.0], &FcmParams::new(3)),
            Err(PartitionError::TooFewDistinctValues {
                needed: 3,
                found: 2
            })
        ));
        assert!(fcm_fit(&[1.0, 2.0], &FcmParams::new(1)).is_err());
        let mut p = FcmParams::new(2);
        p.fuzziness = 1.0;
        assert!(fcm_fit(&[1.0, 2.0], &p).is_err());
    }

    #[test]
    fn fcm_max_iter_is_not_an_error() {
        let mut p = FcmParams::new(3);
        p.max_iter = 2;
        let m = fcm_fit(builtin_enrollment().values(), &p).unwrap();
        assert_eq!(m.iterations_used, 2);
        assert!(!m.converged);
    }

    #[test]
    fn fcm_is_deterministic() {
        let s = builtin_enrollment();
        let a = fcm_fit(s.values(), &FcmParams::new(7)).unwrap();
        let b = fcm_fit(s.values(), &FcmParams::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interval_examples() {
        let uod = define_uod(&builtin_enrollment(), 8.0).unwrap();
        let part = build_intervals(uod, &TABLE4_CENTERS).unwrap();
        assert!((part.boundaries[1] - 14352.045).abs() < 1e-9);
        let (lo, hi) = part.interval(7);
        assert!((lo - 18657.795).abs() < 1e-9);
        assert_eq!(hi, 19345.0);

        let tiny = UniverseOfDiscourse {
            lower: 0.0,
            upper: 10.0,
            margin: 0.0,
        };
        assert_eq!(
            build_intervals(tiny, &[4.0, 8.0]).unwrap().boundaries,
            vec![0.0, 6.0, 10.0]
        );
        assert!(matches!(
            build_intervals(tiny, &[4.0, 10.0]),
            Err(PartitionError::CenterOutsideUod { .. })
        ));
        assert!(matches!(
            build_intervals(tiny, &[8.0, 4.0]),
            Err(PartitionError::UnsortedCenters(1))
        ));
    }

    #[test]
    fn table_layout() {
        let tiny = UniverseOfDiscourse {
            lower: 0.0,
            upper: 10.0,
            margin: 0.0,
        };
        let t = build_intervals(tiny, &[4.0, 8.0]).unwrap().to_table();
        assert_eq!(t, "index,lower,upper,center\n1,0,6,4\n2,6,10,8\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn near_integer(x: f64) -> bool {
            (x - x.round()).abs() < 1e-6
        }

        proptest! {
            #[test]
            fn membership_rows_normalized(
                values in prop::collection::vec(-1e4f64..1e4, 8..40),
                c in 2usize..6,
                seed in 0u64..1000,
                standard in any::<bool>(),
            ) {
                prop_assume!(distinct_count(&values) >= c);
                let mut p = FcmParams::new(c);
                p.seed = seed;
                p.rule = if standard { MembershipRule::Standard } else { MembershipRule::Literal };
                let m = fcm_fit(&values, &p).unwrap();
                for row in &m.memberships {
                    let s: f64 = row.iter().sum();
                    prop_assert!((s - 1.0).abs() < 1e-9);
                    prop_assert!(row.iter().all(|u| (0.0..=1.0).contains(u)));
                }
                prop_assert!(m.centers.windows(2).all(|w| w[0] <= w[1]));
            }

            #[test]
            fn standard_rule_sse_is_monotone(
                values in prop::collection::vec(-1e4f64..1e4, 8..40),
                c in 2usize..6,
                seed in 0u64..1000,
            ) {
                prop_assume!(distinct_count(&values) >= c);
                let mut p = FcmParams::new(c);
                p.seed = seed;
                p.rule = MembershipRule::Standard;
                let m = fcm_fit(&values, &p).unwrap();
                for w in m.sse_history.windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{} -> {}", w[0], w[1]);
                }
            }

            #[test]
            fn symmetric_data_gives_symmetric_centers(
                half in prop::collection::vec(0.5f64..100.0, 3..12),
                pivot in -50f64..50.0,
            ) {
                let mut values: Vec<f64> = half.iter().map(|h| pivot + h).collect();
                values.extend(half.iter().map(|h| pivot - h));
                let mut p = FcmParams::new(2);
                p.tol = 1e-9;
                p.max_iter = 5000;
                let m = fcm_fit(&values, &p).unwrap();
                prop_assert!((m.centers[0] + m.centers[1] - 2.0 * pivot).abs() < 1e-5);
            }

            #[test]
            fn intervals_tile_uod(
                mut centers in prop::collection::vec(-1e3f64..1e3, 1..12),
                margin in 0.1f64..50.0,
            ) {
                centers.sort_by(f64::total_cmp);
                centers.dedup();
                let uod = UniverseOfDiscourse {
                    lower: centers[0] - margin,
                    upper: centers[centers.len() - 1] + margin,
                    margin,
                };
                let part = build_intervals(uod, &centers).unwrap();
                prop_assert_eq!(part.boundaries.len(), centers.len() + 1);
                prop_assert_eq!(part.boundaries[0], uod.lower);
                prop_assert_eq!(*part.boundaries.last().unwrap(), uod.upper);
                let widths: f64 = part.boundaries.windows(2).map(|w| w[1] - w[0]).sum();
                let span = uod.upper - uod.lower;
                prop_assert!((widths - span).abs() <= 64.0 * f64::EPSILON * span.max(1.0));
                for (k, v) in centers.iter().enumerate() {
                    let (lo, hi) = part.interval(k + 1);
                    prop_assert!(lo < *v && *v < hi);
                }
            }

            #[test]
            fn cluster_count_scale_covariant(a in -1e5f64..1e5, width in 1e-2f64..1e5) {
                let b = a + width;
                let step = decade_step(b - a);
                prop_assume!(!near_integer(a / step) && !near_integer(b / step));
                prop_assume!(!near_integer((b - a).log10()));
                let ten = 10.0;
                prop_assume!(decade_step(ten * b - ten * a) == ten * step
                    || (decade_step(ten * b - ten * a) / (ten * step) - 1.0).abs() < 1e-12);
                prop_assert_eq!(
                    suggest_cluster_count(a, b).unwrap(),
                    suggest_cluster_count(ten * a, ten * b).unwrap()
                );
            }
        }
    }
}
