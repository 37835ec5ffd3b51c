#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((sol, controls)) = plaplace::io::parse_solution_json(data) {
        let again = plaplace::io::write_solution_json(&sol, controls.as_ref());
        let (back, _) = plaplace::io::parse_solution_json(again.as_bytes()).expect("round trip");
        assert_eq!(back, sol);
    }
});
