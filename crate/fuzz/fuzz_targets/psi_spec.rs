#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(psi) = plaplace::TestFunction::parse(text) {
            // parsed weights evaluate without panicking on (0, 1]
            for r in [1e-6, 0.5, 1.0] {
                let _ = psi.psi(r) + psi.dpsi(r) + psi.d2psi(r) + psi.d3psi_times_r2(r);
            }
            let _ = psi.psi(0.0);
            let _ = psi.label();
        }
    }
});
