#![no_main]

use libfuzzer_sys::fuzz_target;
use twoproj::io::{parse_dims, parse_real_list};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_real_list(s) {
        assert!(values.iter().all(|v| v.is_finite()));
        // formatting and reparsing is lossless
        let text = values
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        assert_eq!(parse_real_list(&text).unwrap(), values);
    }
    let _ = parse_dims(s);
});
