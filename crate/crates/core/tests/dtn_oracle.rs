use num_complex::Complex64 as C64;
use tdse_core::grid::PhysicalConstants;
use tdse_core::tbc::KernelTable;
use tdse_oracles::{exterior_flux_series, Ncn1dParams};

fn trace(levels: usize, seed: f64) -> Vec<C64> {
    (0..=levels)
        .map(|m| {
            if m == 0 {
                return C64::new(0.0, 0.0);
            }
            let t = m as f64;
            C64::new(
                (0.05 * t + seed).sin() * (1.0 - (-t / 20.0).exp()),
                (0.013 * t * t / 50.0 + seed).cos() * 0.5,
            )
        })
        .collect()
}

fn max_relative_mismatch(
    v_inf_q: f64,
    hbar: f64,
    c_hbar: f64,
    h: f64,
    tau: f64,
    levels: usize,
) -> f64 {
    let par = Ncn1dParams {
        hbar,
        c_hbar,
        h,
        tau,
    };
    let phi = trace(levels, v_inf_q.sqrt());
    let flux = exterior_flux_series(par, v_inf_q, 2000, &phi);
    let consts = PhysicalConstants::new(hbar, c_hbar).unwrap();
    let table = KernelTable::build(v_inf_q, tau, h, consts, levels).unwrap();
    let r = table.values();
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for m in 1..=levels {
        let conv: C64 = (0..=m).map(|p| r[p] * phi[m - p]).sum::<C64>() * c_hbar;
        diff = diff.max((conv - flux[m]).norm());
        scale = scale.max(conv.norm());
    }
    diff / scale
}

#[test]
fn kernel_reproduces_exterior_flux() {
    for v in [0.0, 1.0, 30.0, 250.0, 1000.0] {
        let err = max_relative_mismatch(v, 1.0, 1.0, 0.01, 5e-5, 200);
        eprintln!("V_inf,q = {v}: relative mismatch {err:.3e}");
        assert!(err < 1e-8, "V_inf,q = {v}: relative mismatch {err:.3e}");
    }
}

#[test]
fn kernel_reproduces_exterior_flux_other_units() {
    let err = max_relative_mismatch(12.0, 0.7, 2.5, 0.02, 1e-4, 200);
    assert!(err < 1e-8, "relative mismatch {err:.3e}");
}
