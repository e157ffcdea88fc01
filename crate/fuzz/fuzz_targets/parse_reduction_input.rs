#![no_main]

use libfuzzer_sys::fuzz_target;
use nucnz::io::{parse_reduction_input, ReductionKind};

fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let kind = [ReductionKind::A2M, ReductionKind::M2C, ReductionKind::C2B][(k % 3) as usize];
    if let Ok(s) = std::str::from_utf8(rest) {
        let _ = parse_reduction_input(kind, s);
    }
});
