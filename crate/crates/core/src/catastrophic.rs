//! Catastrophic-encoder detection.

use crate::error::Result;
use crate::generators::GeneratorSet;
use crate::trellis::{build_trellis, EncoderConfig, Trellis};

/// True when the encoder has an error cycle with zero output weight other
/// than the zero-state self-loop.
pub fn is_catastrophic(gens: &GeneratorSet, cfg: &EncoderConfig) -> Result<bool> {
    Ok(has_zero_output_cycle(&build_trellis(gens, cfg)?))
}

/// Cycle search restricted to zero-output edges. For a linear code the
/// error trellis coincides with the code trellis.
pub fn has_zero_output_cycle(t: &Trellis) -> bool {
    let ns = t.num_states();
    let ni = t.num_inputs();
    let succ = |s: usize| {
        (0..ni).filter_map(move |u| {
            if (s == 0 && u == 0) || t.output_word(s, u) != 0 {
                None
            } else {
                Some(t.next_state(s, u))
            }
        })
    };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; ns];
    let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
    for root in 0..ns {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, succ(root).collect()));
        while let Some((v, rest)) = stack.last_mut() {
            match rest.pop() {
                Some(w) => match color[w] {
                    1 => return true,
                    0 => {
                        color[w] = 1;
                        let next = succ(w).collect();
                        stack.push((w, next));
                    }
                    _ => {}
                },
                None => {
                    color[*v] = 2;
                    stack.pop();
                }
            }
        }
    }
    false
}
