#![no_main]

use libfuzzer_sys::fuzz_target;
use twoproj::halmos::DEFAULT_CLASS_TOL;
use twoproj::io::PairFile;
use twoproj::spectral::{check_theorem_inclusions, oracle_anticommutator_spectrum};
use twoproj::{decompose, predicted_anticommutator_spectrum, reconstruction_residual};

// Anything that parses must either be rejected with an error or go through
// the whole pipeline without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(file) = PairFile::parse(data) else {
        return;
    };
    if file.p.n > 16 {
        return;
    }
    let Ok(pair) = file.to_pair(1e-10) else {
        return;
    };
    let Ok(form) = decompose(&pair, DEFAULT_CLASS_TOL) else {
        return;
    };
    assert_eq!(form.n(), pair.dim());
    assert_eq!(predicted_anticommutator_spectrum(&form).len(), pair.dim());
    let _ = reconstruction_residual(&form, &pair);
    let _ = oracle_anticommutator_spectrum(&pair);
    let _ = check_theorem_inclusions(&pair, &form, 1e-8);
});
