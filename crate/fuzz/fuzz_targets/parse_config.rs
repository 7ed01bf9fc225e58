#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Err(e) = fracdyn::scenario::parse_config(text) {
            // every rejection must be a configuration error
            assert!(e.is_config_error(), "{e:?}");
        }
    }
});
