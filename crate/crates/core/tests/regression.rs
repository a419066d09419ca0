use rabi_core::entanglement::{entropy_sweep, ground_state};
use rabi_core::model::{build_full, ModelConfig, ModelKind};
use rabi_core::spectra::sweep_spectrum;

fn binary_entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[test]
fn two_level_spectrum_closed_form() {
    let grid: Vec<f64> = (0..31).map(|i| 0.1 * i as f64).collect();
    let base = ModelConfig::resonant(2, 0.0, ModelKind::Qrm).unwrap();
    let sweep = sweep_spectrum(&base, &grid, 4).unwrap();
    for (g, levels) in grid.iter().zip(&sweep.levels) {
        let r = (1.0 + g * g).sqrt();
        let mut exact = [0.5 - r, 0.5 - g, 0.5 + g, 0.5 + r];
        exact.sort_by(f64::total_cmp);
        for (a, b) in levels.iter().zip(exact) {
            assert!((a - b).abs() < 1e-12, "g = {g}: {a} vs {b}");
        }
    }
}

#[test]
fn two_level_entropy_closed_form() {
    let grid: Vec<f64> = (0..31).map(|i| 0.1 * i as f64).collect();
    let base = ModelConfig::resonant(2, 0.0, ModelKind::Qrm).unwrap();
    for point in entropy_sweep(&base, &grid).unwrap() {
        let exact = if point.g == 0.0 {
            0.0
        } else {
            binary_entropy(0.5 * (1.0 + 1.0 / (1.0 + point.g * point.g).sqrt()))
        };
        assert!((point.s_qrm - exact).abs() < 1e-10, "g = {}", point.g);
        // (a + a†)² is the identity at this truncation
        assert!((point.s_qrma - exact).abs() < 1e-10, "g = {}", point.g);
    }
}

#[test]
fn entropy_snapshot_fifteen_levels() {
    let base = ModelConfig::resonant(15, 0.0, ModelKind::Qrm).unwrap();
    let points = entropy_sweep(&base, &[0.9, 1.8, 3.0]).unwrap();
    let expected = [
        (0.771254434516, 0.250938118198),
        (0.994631619463, 0.229553513099),
        (0.999326276853, 0.142634660512),
    ];
    for (p, (qrm, qrma)) in points.iter().zip(expected) {
        assert!((p.s_qrm - qrm).abs() < 1e-9, "g = {}: {}", p.g, p.s_qrm);
        assert!((p.s_qrma - qrma).abs() < 1e-9, "g = {}: {}", p.g, p.s_qrma);
    }
}

#[test]
fn parity_doublet_flag_threshold() {
    // at g = 3 and N = 15 the doublet is still split by ~2e-5
    let cfg = ModelConfig::resonant(15, 3.0, ModelKind::Qrm).unwrap();
    let gs = ground_state(&build_full(&cfg).unwrap()).unwrap();
    assert!(gs.gap < 1e-3 && gs.gap > 1e-10, "{}", gs.gap);
    assert!(!gs.quasi_degenerate);

    let cfg = ModelConfig::resonant(60, 4.0, ModelKind::Qrm).unwrap();
    let gs = ground_state(&build_full(&cfg).unwrap()).unwrap();
    assert!(gs.quasi_degenerate, "{}", gs.gap);

    let gs = ground_state(&build_full(&cfg.with_kind(ModelKind::Qrma)).unwrap()).unwrap();
    assert!(!gs.quasi_degenerate);
}
