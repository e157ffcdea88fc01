#![no_main]

use libfuzzer_sys::fuzz_target;
use nucnz::io::parse_subspace;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    if let Ok(s) = std::str::from_utf8(rest) {
        if let Ok(l) = parse_subspace(s, (n % 9) as usize) {
            let _ = nucnz::exact_math::integer_kernel_basis(&l);
        }
    }
});
