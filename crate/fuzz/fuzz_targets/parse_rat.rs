#![no_main]

use libfuzzer_sys::fuzz_target;
use nucnz::Rat;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = s.parse::<Rat>() {
            assert_eq!(r.to_string().parse::<Rat>().unwrap(), r);
        }
    }
});
