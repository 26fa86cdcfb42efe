//! End-to-end use of the public API: land cover to clutter heights to
//! profiles, predictions and an evaluation report.

use clutterloss::clutter::{
    build_height_raster, derive_height_table, ClutterCategory, ClutterScheme, HeightStat, HeightTable,
};
use clutterloss::coverage::{grid_for_bbox, predict_area, CoverageParams};
use clutterloss::eval::{run_evaluation, EvalOptions, MeasurementRecord, Strategy};
use clutterloss::geodesy::GeoPoint;
use clutterloss::kernel::fspl;
use clutterloss::profile::{ClutterSampling, ClutterSource};
use clutterloss::raster::{hag, resample, Geometry, Raster, RasterKind, ResampleMethod, DEFAULT_NODATA};
use clutterloss::Execution;

fn geometry() -> Geometry {
    Geometry {
        ncols: 200,
        nrows: 200,
        xll_deg: 8.0,
        yll_deg: 50.0,
        cellsize_deg: 0.0002,
    }
}

fn terrain() -> Raster {
    Raster::from_fn(geometry(), DEFAULT_NODATA, RasterKind::ElevationM, |r, c| {
        200.0 + 10.0 * ((r as f64) * 0.05).sin() + 5.0 * ((c as f64) * 0.08).cos()
    })
    .unwrap()
}

/// ESA codes: forest stripes on grassland with one built-up patch.
fn landcover() -> Raster {
    Raster::from_fn(geometry(), DEFAULT_NODATA, RasterKind::ClassCode, |r, c| {
        if (60..90).contains(&r) && (60..90).contains(&c) {
            50.0
        } else if (c / 25) % 2 == 1 {
            10.0
        } else {
            30.0
        }
    })
    .unwrap()
}

fn surface(dtm: &Raster, lc: &Raster) -> Raster {
    Raster::from_fn(geometry(), DEFAULT_NODATA, RasterKind::ElevationM, |r, c| {
        let extra = match lc.raw(r, c) as i64 {
            10 => 14.0 + ((r * 3 + c) % 11) as f64,
            50 => 6.0 + (r % 5) as f64,
            _ => 0.2,
        };
        dtm.raw(r, c) + extra
    })
    .unwrap()
}

fn records(tx: GeoPoint) -> Vec<MeasurementRecord> {
    (0..24)
        .map(|i| MeasurementRecord {
            dataset_id: format!("route{}", i % 4),
            group_id: if i % 4 == 3 { "b".into() } else { "a".into() },
            tx,
            tx_height_agl_m: 35.0,
            rx: GeoPoint::new(50.004 + 0.0013 * i as f64, 8.031 - 0.0009 * i as f64).unwrap(),
            rx_height_agl_m: 1.5,
            freq_mhz: 1800.0,
            measured_loss_db: 110.0 + i as f64,
        })
        .collect()
}

#[test]
fn stat_heights_follow_the_surface_model() {
    let dtm = terrain();
    let lc = landcover();
    let h = hag(&surface(&dtm, &lc), &dtm).unwrap();
    let scheme = ClutterScheme::esa_worldcover();
    let base = HeightTable::default();
    let p75 = derive_height_table(&base, &h, &lc, &scheme, HeightStat::P75).unwrap();
    let mean = derive_height_table(&base, &h, &lc, &scheme, HeightStat::Mean).unwrap();
    let trees = ClutterCategory::UrbanTreesForest;
    assert!(p75.height(trees) >= mean.height(trees));
    assert!((14.0..=24.0).contains(&p75.height(trees)));
    assert!((6.0..=10.0).contains(&p75.height(ClutterCategory::Suburban)));
    // Grass only reaches 0.2 m, below the floor, and open ground is never replaced.
    assert_eq!(p75.height(ClutterCategory::WaterOpenRural), 0.0);
    // No dense-urban code occurs in the scheme's cells: the default survives.
    assert_eq!(p75.height(ClutterCategory::DenseUrban), 20.0);
}

#[test]
fn clutter_strategies_rank_as_expected() {
    let dtm = terrain();
    let lc = landcover();
    let scheme = ClutterScheme::esa_worldcover();
    let heights = build_height_raster(&lc, &scheme, &HeightTable::default()).unwrap();
    let tx = GeoPoint::new(50.02, 8.02).unwrap();
    let recs = records(tx);
    let strategy = Strategy {
        label: "esa defaults".into(),
        spacing_m: 10.0,
        clutter_sampling: ClutterSampling::Nearest,
    };
    let opts = EvalOptions::default();
    let none = run_evaluation(&recs, &dtm, ClutterSource::None, &strategy, &opts).unwrap();
    let with = run_evaluation(&recs, &dtm, ClutterSource::Heights(&heights), &strategy, &opts).unwrap();
    for (a, b) in none.outcomes.iter().zip(&with.outcomes) {
        assert_eq!(a.index, b.index);
        assert!(b.prediction.loss_db >= a.prediction.loss_db);
        assert!(a.prediction.loss_db >= a.prediction.fspl_db);
    }
    assert_eq!(with.per_dataset.len(), 4);
    assert_eq!(with.per_group.len(), 2);
    assert!(with.outcomes.iter().any(|o| o.prediction.diffraction_db > 0.0));

    let coarse = resample(&heights, 5, ResampleMethod::Max, Execution::Parallel).unwrap();
    let blocky = run_evaluation(&recs, &dtm, ClutterSource::Heights(&coarse), &strategy, &opts).unwrap();
    assert_eq!(blocky.outcomes.len(), recs.len());
}

#[test]
fn execution_modes_agree_bit_for_bit() {
    let dtm = terrain();
    let lc = landcover();
    let heights = build_height_raster(&lc, &ClutterScheme::esa_worldcover(), &HeightTable::default()).unwrap();
    let tx = GeoPoint::new(50.02, 8.02).unwrap();
    let recs = records(tx);
    let strategy = Strategy {
        label: "modes".into(),
        spacing_m: 30.0,
        clutter_sampling: ClutterSampling::Bilinear,
    };
    let run = |execution| {
        let opts = EvalOptions {
            execution,
            per_frequency: true,
            ..EvalOptions::default()
        };
        run_evaluation(&recs, &dtm, ClutterSource::Heights(&heights), &strategy, &opts)
            .unwrap()
            .to_key_values()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));

    let params = CoverageParams {
        tx,
        tx_height_agl_m: 35.0,
        rx_height_agl_m: 1.5,
        freq_mhz: 900.0,
        spacing_m: 30.0,
        clutter_sampling: ClutterSampling::Nearest,
    };
    let grid = grid_for_bbox(50.005, 8.005, 50.035, 8.035, 200.0).unwrap();
    let seq = predict_area(
        &dtm,
        ClutterSource::Heights(&heights),
        &params,
        grid,
        Execution::Sequential,
    )
    .unwrap();
    let par = predict_area(
        &dtm,
        ClutterSource::Heights(&heights),
        &params,
        grid,
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(seq, par);
    assert!(seq.values().iter().all(|&v| seq.is_nodata(v) || v >= fspl(900.0, 1.0)));
}
