#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(psi) = fracdyn::wave::parse_snapshot_csv(text) else { return };
    let mut buf = Vec::new();
    psi.write_csv(&mut buf).unwrap();
    let back = fracdyn::wave::parse_snapshot_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.samples(), psi.samples());
});
