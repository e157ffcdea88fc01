#![no_main]

use libfuzzer_sys::fuzz_target;
use nucnz::io::parse_allocation;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_allocation(s, None);
        let _ = parse_allocation(s, Some(3));
    }
});
