#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // must never panic: clean Ok(_) or Err(_) on arbitrary bytes
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sol) = plaplace::io::parse_solution_csv(text) {
            // accepted inputs survive a write/parse round trip
            let again = plaplace::io::write_solution_csv(&sol);
            let back = plaplace::io::parse_solution_csv(&again).expect("round trip");
            assert_eq!(back, sol);
        }
    }
});
