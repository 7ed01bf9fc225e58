#![no_main]

use fracdyn::scenario::{parse_config, render};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = parse_config(text) else { return };
    let rendered = render(&cfg);
    let again = parse_config(&rendered).expect("rendered config must parse");
    assert_eq!(again, cfg);
    assert_eq!(render(&again), rendered);
});
