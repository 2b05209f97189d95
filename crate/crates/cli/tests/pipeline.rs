mod common;

use std::fs;

use common::{data_image, small_copy};
use rmln_cli::runner::{SUMMARY_HEADER, SWEEP_HEADER};
use rmln_cli::{emit_profile, load_image, run_plan, save_image, ExperimentPlan, MaskPlan};
use rmln_core::{make_random_mask, psnr, ssim, SurrogateParams, PSNR_CAP_DB};

fn quick_plan(dir: &std::path::Path, inputs: Vec<std::path::PathBuf>) -> ExperimentPlan {
    let mut plan = ExperimentPlan {
        inputs,
        output_dir: dir.join("out"),
        seeds: vec![3],
        timing: false,
        ..ExperimentPlan::default()
    };
    plan.set("outer_iters", "15").unwrap();
    plan.set("lambda", "1e3").unwrap();
    plan
}

#[test]
fn bundled_images_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["camera.png", "astronaut_rgb.png"] {
        let original = load_image(data_image(name)).unwrap();
        let path = dir.path().join(name);
        save_image(&path, &original.channels).unwrap();
        let again = load_image(&path).unwrap();
        assert_eq!(original.channels, again.channels);
        assert!(original
            .channels
            .iter()
            .all(|c| c.as_slice().iter().all(|v| (0.0..=255.0).contains(v))));
    }
    assert_eq!(
        load_image(data_image("camera.png")).unwrap().shape(),
        (256, 256)
    );
    assert_eq!(
        load_image(data_image("astronaut_rgb.png"))
            .unwrap()
            .channels
            .len(),
        3
    );
}

#[test]
fn identity_pipeline_hits_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = vec![
        small_copy(dir.path(), "camera.png", 24),
        small_copy(dir.path(), "astronaut_rgb.png", 24),
    ];
    let mut plan = quick_plan(dir.path(), inputs);
    plan.set("mr", "0").unwrap();
    plan.set("lambda", "0").unwrap();
    let outcome = run_plan(&plan).unwrap();
    assert_eq!(outcome.reports.len(), 2);
    for r in &outcome.reports {
        assert_eq!(r.psnr_db, PSNR_CAP_DB);
        assert!((r.ssim - 1.0).abs() < 1e-12);
    }
}

#[test]
fn reports_are_recomputable_from_written_images() {
    let dir = tempfile::tempdir().unwrap();
    let input = small_copy(dir.path(), "camera.png", 40);
    let mut plan = quick_plan(dir.path(), vec![input.clone()]);
    plan.set("mr", "0.5").unwrap();
    plan.set("lambda", "3e5").unwrap();
    plan.set("outer_iters", "100").unwrap();
    let outcome = run_plan(&plan).unwrap();
    let report = &outcome.reports[0];

    let original = load_image(&input).unwrap();
    let written = load_image(
        plan.output_dir
            .join("camera__rmln_reweighted_p0_8_mr0_5_seed3.png"),
    )
    .unwrap();
    let p = psnr(&original.channels[0], &written.channels[0], 255.0).unwrap();
    let s = ssim(&original.channels[0], &written.channels[0], 255.0).unwrap();
    assert!(
        (p - report.psnr_db).abs() < 0.05,
        "{p} vs {}",
        report.psnr_db
    );
    assert!((s - report.ssim).abs() < 0.002, "{s} vs {}", report.ssim);

    let degraded = load_image(plan.output_dir.join("camera__observed_mr0_5_seed3.png")).unwrap();
    let mask = make_random_mask(40, 40, 0.5, 3).unwrap();
    for i in 0..40 {
        for j in 0..40 {
            let v = degraded.channels[0][(i, j)];
            if mask.is_observed(i, j) {
                assert_eq!(v, original.channels[0][(i, j)]);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }
}

#[test]
fn repeated_plans_write_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let input = small_copy(dir.path(), "moon.png", 24);
    let mut plan = quick_plan(dir.path(), vec![input]);
    plan.set("strategy", "uniform, reweighted").unwrap();
    plan.set("sweep", "0.6, 1.0").unwrap();
    plan.set("seeds", "1, 2").unwrap();
    plan.write_images = false;
    let first = run_plan(&plan).unwrap();
    let a = fs::read(first.summary_path.unwrap()).unwrap();
    let sweep_a = fs::read(first.sweep_path.unwrap()).unwrap();
    let b = fs::read(run_plan(&plan).unwrap().summary_path.unwrap()).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SUMMARY_HEADER);
    // 2 strategies x 2 p x 2 seeds, then 4 configuration means.
    assert_eq!(lines.len(), 1 + 8 + 4);
    assert!(lines[9..].iter().all(|l| l.starts_with("mean,")));

    let sweep = String::from_utf8(sweep_a).unwrap();
    assert!(sweep.starts_with(SWEEP_HEADER));
    assert_eq!(sweep.lines().filter(|l| l.ends_with(",1")).count(), 2);
}

#[test]
fn failing_image_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let good = small_copy(dir.path(), "camera.png", 16);
    let bad = dir.path().join("broken.png");
    fs::write(&bad, b"not an image").unwrap();
    let plan = quick_plan(dir.path(), vec![bad.clone(), good]);
    let outcome = run_plan(&plan).unwrap();
    assert_eq!(outcome.failures.len(), 1);
    assert_eq!(outcome.failures[0].path, bad);
    assert_eq!(outcome.reports.len(), 1);
    assert_eq!(outcome.reports[0].image, "camera");
}

#[test]
fn block_plans_report_block_masks() {
    let dir = tempfile::tempdir().unwrap();
    let input = small_copy(dir.path(), "camera.png", 20);
    let mut plan = quick_plan(dir.path(), vec![input]);
    plan.set("blocks", "2:2:4:4, 10:10:5:5").unwrap();
    assert!(matches!(plan.mask, MaskPlan::Block { .. }));
    let outcome = run_plan(&plan).unwrap();
    let r = &outcome.reports[0];
    assert_eq!(r.mask, "2:2:4:4;10:10:5:5");
    assert!((r.mr - 41.0 / 400.0).abs() < 1e-12);
}

#[test]
fn profile_parses_back_at_ten_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let rows = emit_profile(&SurrogateParams::default(), 255.0, 101, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,rank,nuclear,mln,rmln"));
    for (line, row) in lines.zip(&rows) {
        let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let expected = [row.x, row.rank, row.nuclear, row.mln, row.rmln];
        for (p, e) in parsed.iter().zip(expected) {
            assert!((p - e).abs() <= 5e-10 * e.abs(), "{p} vs {e}");
        }
    }
    assert_eq!(rows[50].x, 0.0);
    assert_eq!(rows[50].rank, 0.0);
}

#[test]
fn shipped_plan_carries_the_defaults() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.plan");
    let plan = ExperimentPlan::from_file(&path).unwrap();
    plan.validate().unwrap();
    assert_eq!(plan.solver, rmln_core::SolverConfig::default());
    assert_eq!(plan.inputs.len(), 3);
    assert!(plan.inputs.iter().all(|p| p.exists()));
}
