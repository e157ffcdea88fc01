#![no_main]

use libfuzzer_sys::fuzz_target;
use nucnz::io::parse_game_file;
use nucnz::{Coalition, GameOracle};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_game_file(s) {
            if g.player_count() <= 12 {
                let _ = g.value(Coalition::full(g.player_count()));
            }
        }
    }
});
