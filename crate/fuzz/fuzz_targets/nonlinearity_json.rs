#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(nl) = plaplace::io::parse_nonlinearity_json(data) {
        // accepted nonlinearities are safe to evaluate and round trip
        let _ = nl.eval_f(0.5) + nl.eval_big_f(-2.0) + nl.eval_fprime(1.5);
        let again = plaplace::io::write_nonlinearity_json(&nl);
        let back = plaplace::io::parse_nonlinearity_json(again.as_bytes()).expect("round trip");
        assert_eq!(back, nl);
    }
});
