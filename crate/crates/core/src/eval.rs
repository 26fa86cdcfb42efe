//! Prediction-versus-measurement evaluation.
//!
//! Errors are `predicted - measured`, so a positive error means the model
//! over-predicts path loss. RMSE is computed per dataset; a group's score is
//! the unweighted mean of its datasets' RMSEs, so a dataset with many records
//! does not dominate its group.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::clutter::nearest_rank;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geodesy::GeoPoint;
use crate::kernel::{predict, LinkSpec, PredictionResult};
use crate::profile::{extract_profile, ClutterSampling, ClutterSource};
use crate::raster::Raster;

/// Column set of the measurement interchange file, in canonical order.
pub const MEASUREMENT_COLUMNS: [&str; 10] = [
    "dataset",
    "group",
    "tx_lat",
    "tx_lon",
    "tx_h_agl_m",
    "rx_lat",
    "rx_lon",
    "rx_h_agl_m",
    "freq_mhz",
    "path_loss_db",
];

pub const DEFAULT_HISTOGRAM_WIDTH_DB: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub dataset_id: String,
    pub group_id: String,
    pub tx: GeoPoint,
    pub tx_height_agl_m: f64,
    pub rx: GeoPoint,
    pub rx_height_agl_m: f64,
    pub freq_mhz: f64,
    pub measured_loss_db: f64,
}

impl MeasurementRecord {
    pub fn link(&self) -> Result<LinkSpec> {
        LinkSpec::new(
            self.tx,
            self.rx,
            self.tx_height_agl_m,
            self.rx_height_agl_m,
            self.freq_mhz,
        )
    }
}

/// Reads measurement rows. The header must name every column in
/// [`MEASUREMENT_COLUMNS`]; extra columns are ignored.
pub fn load_measurements<R: Read>(source: R) -> Result<Vec<MeasurementRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    let mut index = [0usize; MEASUREMENT_COLUMNS.len()];
    for (slot, name) in index.iter_mut().zip(MEASUREMENT_COLUMNS) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing column `{name}`"),
        })?;
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(index[i]).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            let raw = field(i);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("column `{}`: invalid number `{raw}`", MEASUREMENT_COLUMNS[i]),
                })
        };
        let point = |lat: usize, lon: usize| -> Result<GeoPoint> {
            GeoPoint::new(num(lat)?, num(lon)?).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })
        };
        let positive = |i: usize| -> Result<f64> {
            let v = num(i)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::Parse {
                    line,
                    msg: format!("column `{}` must be positive", MEASUREMENT_COLUMNS[i]),
                })
            }
        };
        let dataset_id = field(0).to_string();
        if dataset_id.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty dataset id".into(),
            });
        }
        records.push(MeasurementRecord {
            dataset_id,
            group_id: field(1).to_string(),
            tx: point(2, 3)?,
            tx_height_agl_m: positive(4)?,
            rx: point(5, 6)?,
            rx_height_agl_m: positive(7)?,
            freq_mhz: positive(8)?,
            measured_loss_db: num(9)?,
        });
    }
    Ok(records)
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        msg: e.to_string(),
    }
}

pub fn write_measurements<W: Write>(records: &[MeasurementRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(MEASUREMENT_COLUMNS).map_err(to_io)?;
    for r in records {
        w.write_record([
            r.dataset_id.clone(),
            r.group_id.clone(),
            r.tx.lat_deg().to_string(),
            r.tx.lon_deg().to_string(),
            r.tx_height_agl_m.to_string(),
            r.rx.lat_deg().to_string(),
            r.rx.lon_deg().to_string(),
            r.rx_height_agl_m.to_string(),
            r.freq_mhz.to_string(),
            r.measured_loss_db.to_string(),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub n: usize,
    pub rmse_db: f64,
    pub mean_error_db: f64,
    pub median_error_db: f64,
}

/// RMSE, mean and nearest-rank median of `predicted - measured`.
pub fn error_stats(pairs: &[(f64, f64)]) -> Result<ErrorStats> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut errors: Vec<f64> = pairs.iter().map(|(p, m)| p - m).collect();
    let n = errors.len() as f64;
    let rmse_db = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let mean_error_db = errors.iter().sum::<f64>() / n;
    let median_error_db = nearest_rank(&mut errors, 0.5).expect("non-empty");
    Ok(ErrorStats {
        n: pairs.len(),
        rmse_db,
        mean_error_db,
        median_error_db,
    })
}

/// Unweighted mean of member-dataset RMSEs per group.
pub fn group_average(
    per_dataset_rmse: &BTreeMap<String, f64>,
    membership: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, f64>> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (dataset, rmse) in per_dataset_rmse {
        let group = membership
            .get(dataset)
            .ok_or_else(|| Error::InvalidValue(format!("dataset `{dataset}` has no group")))?;
        let slot = sums.entry(group.clone()).or_insert((0.0, 0));
        slot.0 += rmse;
        slot.1 += 1;
    }
    Ok(sums.into_iter().map(|(g, (sum, n))| (g, sum / n as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub start_db: f64,
    pub count: usize,
}

/// Counts errors in half-open bins `[k*w, (k+1)*w)`, in ascending order.
pub fn error_histogram(errors: &[f64], bin_width_db: f64) -> Result<Vec<HistogramBin>> {
    if !(bin_width_db > 0.0 && bin_width_db.is_finite()) {
        return Err(Error::InvalidValue(format!(
            "histogram bin width {bin_width_db} must be positive"
        )));
    }
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for e in errors {
        *bins.entry((e / bin_width_db).floor() as i64).or_default() += 1;
    }
    Ok(bins
        .into_iter()
        .map(|(k, count)| HistogramBin {
            start_db: k as f64 * bin_width_db,
            count,
        })
        .collect())
}

/// How profiles are built for an evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub label: String,
    pub spacing_m: f64,
    pub clutter_sampling: ClutterSampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub histogram_width_db: f64,
    pub per_frequency: bool,
    pub execution: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            histogram_width_db: DEFAULT_HISTOGRAM_WIDTH_DB,
            per_frequency: false,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReport {
    pub group_id: String,
    pub stats: ErrorStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordOutcome {
    /// Position of the record in the input list.
    pub index: usize,
    pub dataset_id: String,
    pub prediction: PredictionResult,
    pub measured_db: f64,
}

impl RecordOutcome {
    pub fn error_db(&self) -> f64 {
        self.prediction.loss_db - self.measured_db
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub strategy: Strategy,
    pub per_dataset: BTreeMap<String, DatasetReport>,
    pub per_group: BTreeMap<String, f64>,
    /// Keyed by dataset and frequency; present when requested.
    pub per_frequency: Option<BTreeMap<(String, String), ErrorStats>>,
    pub histogram_width_db: f64,
    pub histogram: Vec<HistogramBin>,
    /// Per-record outcomes sorted by dataset, then input order.
    pub outcomes: Vec<RecordOutcome>,
}

/// Predicts every record and aggregates errors per dataset and group.
pub fn run_evaluation(
    records: &[MeasurementRecord],
    terrain: &Raster,
    clutter: ClutterSource<'_>,
    strategy: &Strategy,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].dataset_id.cmp(&records[b].dataset_id));

    let mut membership: BTreeMap<String, String> = BTreeMap::new();
    for r in records {
        let g = membership
            .entry(r.dataset_id.clone())
            .or_insert_with(|| r.group_id.clone());
        if *g != r.group_id {
            return Err(Error::InvalidValue(format!(
                "dataset `{}` appears in groups `{}` and `{}`",
                r.dataset_id, g, r.group_id
            )));
        }
    }

    let predictions = options.execution.map_range(order.len(), |k| {
        let i = order[k];
        let r = &records[i];
        let run = || -> Result<PredictionResult> {
            let link = r.link()?;
            let profile = extract_profile(
                terrain,
                clutter,
                r.tx,
                r.rx,
                strategy.spacing_m,
                strategy.clutter_sampling,
            )?;
            predict(&profile, &link)
        };
        run().map_err(|e| Error::Record {
            index: i,
            dataset: r.dataset_id.clone(),
            source: Box::new(e),
        })
    });

    let mut outcomes = Vec::with_capacity(order.len());
    for (k, p) in predictions.into_iter().enumerate() {
        let i = order[k];
        outcomes.push(RecordOutcome {
            index: i,
            dataset_id: records[i].dataset_id.clone(),
            prediction: p?,
            measured_db: records[i].measured_loss_db,
        });
    }

    let mut pairs_by_dataset: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for o in &outcomes {
        pairs_by_dataset
            .entry(&o.dataset_id)
            .or_default()
            .push((o.prediction.loss_db, o.measured_db));
    }
    let mut per_dataset = BTreeMap::new();
    for (dataset, pairs) in &pairs_by_dataset {
        per_dataset.insert(
            dataset.to_string(),
            DatasetReport {
                group_id: membership[*dataset].clone(),
                stats: error_stats(pairs)?,
            },
        );
    }
    let rmse: BTreeMap<String, f64> = per_dataset.iter().map(|(k, v)| (k.clone(), v.stats.rmse_db)).collect();
    let per_group = group_average(&rmse, &membership)?;

    let per_frequency = if options.per_frequency {
        let mut by_freq: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
        for o in &outcomes {
            let key = (o.dataset_id.clone(), records[o.index].freq_mhz.to_string());
            by_freq
                .entry(key)
                .or_default()
                .push((o.prediction.loss_db, o.measured_db));
        }
        Some(
            by_freq
                .into_iter()
                .map(|(k, pairs)| error_stats(&pairs).map(|s| (k, s)))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let errors: Vec<f64> = outcomes.iter().map(RecordOutcome::error_db).collect();
    let histogram = error_histogram(&errors, options.histogram_width_db)?;

    Ok(EvalReport {
        strategy: strategy.clone(),
        per_dataset,
        per_group,
        per_frequency,
        histogram_width_db: options.histogram_width_db,
        histogram,
        outcomes,
    })
}

fn db(v: f64) -> String {
    // avoid "-0.00"
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

impl EvalReport {
    /// Machine-readable `key=value` document. dB values carry 2 decimals.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let s = &self.strategy;
        let _ = writeln!(out, "strategy.label={}", s.label);
        let _ = writeln!(out, "strategy.spacing_m={:.3}", s.spacing_m);
        let sampling = match s.clutter_sampling {
            ClutterSampling::Nearest => "nearest",
            ClutterSampling::Bilinear => "bilinear",
        };
        let _ = writeln!(out, "strategy.clutter_sampling={sampling}");
        for (id, d) in &self.per_dataset {
            let _ = writeln!(out, "dataset.{id}.group={}", d.group_id);
            let _ = writeln!(out, "dataset.{id}.n={}", d.stats.n);
            let _ = writeln!(out, "dataset.{id}.rmse_db={}", db(d.stats.rmse_db));
            let _ = writeln!(out, "dataset.{id}.mean_error_db={}", db(d.stats.mean_error_db));
            let _ = writeln!(out, "dataset.{id}.median_error_db={}", db(d.stats.median_error_db));
        }
        if let Some(freqs) = &self.per_frequency {
            for ((id, f), st) in freqs {
                let _ = writeln!(out, "frequency.{id}.{f}.n={}", st.n);
                let _ = writeln!(out, "frequency.{id}.{f}.rmse_db={}", db(st.rmse_db));
                let _ = writeln!(out, "frequency.{id}.{f}.median_error_db={}", db(st.median_error_db));
            }
        }
        for (g, rmse) in &self.per_group {
            let _ = writeln!(out, "group.{g}.rmse_db={}", db(*rmse));
        }
        let _ = writeln!(out, "histogram.bin_width_db={}", db(self.histogram_width_db));
        for b in &self.histogram {
            let _ = writeln!(out, "histogram.{}={}", db(b.start_db), b.count);
        }
        out
    }

    /// Aligned human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let w = self
            .per_dataset
            .keys()
            .chain(self.per_group.keys())
            .map(|k| k.len())
            .chain([7, 5])
            .max()
            .unwrap_or(7);
        let g = self
            .per_dataset
            .values()
            .map(|d| d.group_id.len())
            .chain([5])
            .max()
            .unwrap_or(5);
        let _ = writeln!(out, "Strategy: {}", self.strategy.label);
        let _ = writeln!(
            out,
            "{:<w$}  {:<g$}  {:>8}  {:>9}  {:>9}  {:>11}",
            "Dataset", "Group", "N", "RMSE (dB)", "Mean (dB)", "Median (dB)"
        );
        for (id, d) in &self.per_dataset {
            let _ = writeln!(
                out,
                "{:<w$}  {:<g$}  {:>8}  {:>9}  {:>9}  {:>11}",
                id,
                d.group_id,
                d.stats.n,
                db(d.stats.rmse_db),
                db(d.stats.mean_error_db),
                db(d.stats.median_error_db)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<w$}  {:>9}", "Group", "Avg RMSE");
        for (grp, rmse) in &self.per_group {
            let _ = writeln!(out, "{:<w$}  {:>9}", grp, db(*rmse));
        }
        out
    }
}

/// Group-by-strategy RMSE table across several reports, one column per
/// strategy.
pub fn sweep_table(reports: &[EvalReport]) -> String {
    let mut groups: Vec<&String> = reports.iter().flat_map(|r| r.per_group.keys()).collect();
    groups.sort();
    groups.dedup();
    let gw = groups.iter().map(|g| g.len()).chain([5]).max().unwrap_or(5);
    let cw: Vec<usize> = reports.iter().map(|r| r.strategy.label.len().max(6)).collect();
    let mut out = format!("{:<gw$}", "Group");
    for (r, w) in reports.iter().zip(&cw) {
        let _ = write!(out, "  {:>w$}", r.strategy.label);
    }
    out.push('\n');
    for g in groups {
        let _ = write!(out, "{g:<gw$}");
        for (r, w) in reports.iter().zip(&cw) {
            let cell = r.per_group.get(g).map_or_else(|| "-".to_string(), |v| db(*v));
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};
    use proptest::strategy::Strategy as _;
    use rand::{Rng, SeedableRng};

    const HEADER: &str = "dataset,group,tx_lat,tx_lon,tx_h_agl_m,rx_lat,rx_lon,rx_h_agl_m,freq_mhz,path_loss_db\n";

    #[test]
    fn loads_two_rows() {
        let text = format!(
            "{HEADER}ottawa,High-Rx CAN,45.1,-75.7,30,45.2,-75.6,10,3875,140.5\nottawa,High-Rx CAN,45.1,-75.7,30,45.15,-75.6,12,3875,135\n"
        );
        let recs = load_measurements(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].group_id, "High-Rx CAN");
        assert_eq!(recs[1].rx_height_agl_m, 12.0);
    }

    #[test]
    fn missing_column_is_named() {
        let text = "dataset,group,tx_lat,tx_lon,tx_h_agl_m,rx_lat,rx_lon,rx_h_agl_m,path_loss_db\n";
        match load_measurements(text.as_bytes()) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("freq_mhz"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_row_reports_line() {
        let text = format!("{HEADER}a,g,45,-75,30,45.1,-75,2,900,120\na,g,45,-75,30,45.1,-75,2,abc,120\n");
        match load_measurements(text.as_bytes()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("freq_mhz"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stats_examples() {
        let zero = error_stats(&[(100.0, 100.0), (90.0, 90.0)]).unwrap();
        assert_eq!(
            (zero.rmse_db, zero.mean_error_db, zero.median_error_db),
            (0.0, 0.0, 0.0)
        );

        // sqrt((9 + 16) / 2) = 3.5355
        let s = error_stats(&[(103.0, 100.0), (104.0, 100.0)]).unwrap();
        assert_abs_diff_eq!(s.rmse_db, 3.536, epsilon = 1e-3);
        assert_eq!(s.mean_error_db, 3.5);
        assert_eq!(s.median_error_db, 3.0);

        let sym = error_stats(&[(95.0, 100.0), (105.0, 100.0)]).unwrap();
        assert_eq!(sym.rmse_db, 5.0);
        assert_eq!(sym.mean_error_db, 0.0);

        assert!(matches!(error_stats(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn group_average_examples() {
        let rmse: BTreeMap<String, f64> = [("a", 8.0), ("b", 12.0), ("c", 7.0), ("d", 3.0), ("e", 5.0), ("f", 10.0)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let membership: BTreeMap<String, String> = [
            ("a", "g1"),
            ("b", "g1"),
            ("c", "g2"),
            ("d", "g3"),
            ("e", "g3"),
            ("f", "g3"),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        let g = group_average(&rmse, &membership).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g["g1"], 10.0);
        assert_eq!(g["g2"], 7.0);
        assert_eq!(g["g3"], 6.0);

        let mut orphan = rmse.clone();
        orphan.insert("z".into(), 1.0);
        assert!(group_average(&orphan, &membership).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h = error_histogram(&[0.5, 1.5], 1.0).unwrap();
        assert_eq!(
            h,
            vec![
                HistogramBin {
                    start_db: 0.0,
                    count: 1
                },
                HistogramBin {
                    start_db: 1.0,
                    count: 1
                }
            ]
        );
        assert!(error_histogram(&[], 2.0).unwrap().is_empty());
        let h = error_histogram(&[-0.5, -2.0, 2.0], 2.0).unwrap();
        assert_eq!(
            h[0],
            HistogramBin {
                start_db: -2.0,
                count: 2
            }
        );
        assert_eq!(
            h[1],
            HistogramBin {
                start_db: 2.0,
                count: 1
            }
        );

        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let errs: Vec<f64> = (0..1000).map(|_| rng.gen_range(-30.0..30.0)).collect();
        let total: usize = error_histogram(&errs, 2.0).unwrap().iter().map(|b| b.count).sum();
        assert_eq!(total, 1000);
        assert!(error_histogram(&errs, 0.0).is_err());
    }

    fn arb_record() -> impl proptest::strategy::Strategy<Value = MeasurementRecord> {
        (
            "[a-z]{1,6}",
            "[A-Za-z -]{1,10}",
            (-60.0..60.0f64, -170.0..170.0f64, 1.0..120.0f64),
            (-60.0..60.0f64, -170.0..170.0f64, 0.5..20.0f64),
            30.0..6000.0f64,
            50.0..200.0f64,
        )
            .prop_map(|(d, g, (tla, tlo, th), (rla, rlo, rh), f, l)| MeasurementRecord {
                dataset_id: d,
                group_id: g.trim().to_string() + "x",
                tx: GeoPoint::new(tla, tlo).unwrap(),
                tx_height_agl_m: th,
                rx: GeoPoint::new(rla, rlo).unwrap(),
                rx_height_agl_m: rh,
                freq_mhz: f,
                measured_loss_db: l,
            })
    }

    proptest! {
        #[test]
        fn measurement_round_trip(recs in prop::collection::vec(arb_record(), 0..8)) {
            let mut buf = Vec::new();
            write_measurements(&recs, &mut buf).unwrap();
            let back = load_measurements(buf.as_slice()).unwrap();
            prop_assert_eq!(back, recs);
        }

        #[test]
        fn rmse_is_permutation_invariant(errs in prop::collection::vec(-40.0..40.0f64, 1..50), seed in 0u64..1000) {
            let pairs: Vec<(f64, f64)> = errs.iter().map(|e| (100.0 + e, 100.0)).collect();
            let mut shuffled = pairs.clone();
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            let a = error_stats(&pairs).unwrap();
            let b = error_stats(&shuffled).unwrap();
            prop_assert!((a.rmse_db - b.rmse_db).abs() <= 1e-9 * a.rmse_db.max(1.0));
            prop_assert_eq!(a.median_error_db, b.median_error_db);
        }

        #[test]
        fn zero_error_pair_never_raises_rmse(errs in prop::collection::vec(-40.0..40.0f64, 1..50)) {
            let mut pairs: Vec<(f64, f64)> = errs.iter().map(|e| (100.0 + e, 100.0)).collect();
            let before = error_stats(&pairs).unwrap().rmse_db;
            pairs.push((80.0, 80.0));
            prop_assert!(error_stats(&pairs).unwrap().rmse_db <= before + 1e-12);
        }

        #[test]
        fn group_average_ignores_record_counts(r1 in 0.0..20.0f64, r2 in 0.0..20.0f64) {
            let membership: BTreeMap<String, String> =
                [("a", "g"), ("b", "g")].iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            // dataset b with its errors duplicated keeps the same RMSE
            let b_once = error_stats(&[(100.0 + r2, 100.0)]).unwrap().rmse_db;
            let b_many = error_stats(&[(100.0 + r2, 100.0); 7]).unwrap().rmse_db;
            let once: BTreeMap<String, f64> = [("a".to_string(), r1), ("b".to_string(), b_once)].into();
            let many: BTreeMap<String, f64> = [("a".to_string(), r1), ("b".to_string(), b_many)].into();
            let g1 = group_average(&once, &membership).unwrap()["g"];
            let g2 = group_average(&many, &membership).unwrap()["g"];
            prop_assert!((g1 - g2).abs() <= 1e-9);
            prop_assert!((g1 - (r1 + r2) / 2.0).abs() <= 1e-9);
        }
    }
}
