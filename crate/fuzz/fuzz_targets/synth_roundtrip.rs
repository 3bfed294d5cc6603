#![no_main]

use libfuzzer_sys::fuzz_target;
use twoproj::decompose;
use twoproj::halmos::DEFAULT_CLASS_TOL;
use twoproj::synth::{build_pair, SynthesisSpec};

// Layout: four block sizes, a conjugation flag, then Q₀ eigenvalues as
// big-endian u16 fractions of 2¹⁶.
fuzz_target!(|data: &[u8]| {
    if data.len() < 5 {
        return;
    }
    let dims: Vec<usize> = data[..4].iter().map(|b| (b % 4) as usize).collect();
    let conjugate = data[4] & 1 == 1;
    let mut q0: Vec<f64> = data[5..]
        .chunks_exact(2)
        .take(12)
        .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65536.0)
        .filter(|&l| l > 0.0)
        .collect();
    q0.sort_by(f64::total_cmp);
    q0.dedup();
    let mut spec = SynthesisSpec::from_q0(q0.clone()).with_dims(dims[0], dims[1], dims[2], dims[3]);
    if conjugate {
        spec = spec.with_conjugation(u64::from_le_bytes([data[4]; 8]));
    }
    let Ok(pair) = build_pair(&spec) else { return };
    // well-separated spectra must come back exactly
    let separated = q0.windows(2).all(|w| w[1] - w[0] >= 1e-4)
        && q0.iter().all(|&l| l >= 1e-4 && l <= 1.0 - 1e-4);
    let form = decompose(&pair, DEFAULT_CLASS_TOL);
    if separated {
        let form = form.expect("separated spec decomposes");
        assert_eq!(form.dims().h3(), q0.len());
        for (a, b) in q0.iter().zip(form.q0_eigs()) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
});
