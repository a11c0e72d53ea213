//! Straight-line reference implementations used only by the acceptance
//! suite. Kept free of the library's abstractions on purpose.

/// Membrane backend for the reference neuron.
#[derive(Clone, Copy)]
pub enum RefLeak {
    Euler {
        tau_m: f64,
        c_m: f64,
        dt: f64,
        i_bias: f64,
    },
    Fixed {
        lambda: f64,
    },
}

/// One update of the reference neuron: membrane rule, threshold, reset,
/// refractory.
pub fn ref_step(
    leak: RefLeak,
    v_th: f64,
    r_ref: u32,
    weights: &[u8],
    v: f64,
    r: u32,
    spikes: &[bool],
) -> (f64, u32, bool) {
    let mut sum = 0.0;
    for j in 0..weights.len() {
        if spikes[j] {
            sum += weights[j] as f64;
        }
    }
    let v_tilde = match leak {
        RefLeak::Euler {
            tau_m,
            c_m,
            dt,
            i_bias,
        } => (1.0 - dt / tau_m) * v + (dt / c_m) * (sum + i_bias),
        RefLeak::Fixed { lambda } => {
            let leak_term = if v != 0.0 { lambda } else { 0.0 };
            let x = v + sum - leak_term;
            if x < 0.0 {
                0.0
            } else {
                x
            }
        }
    };
    let y = v_tilde >= v_th && r == 0;
    let v_next = if y || r > 0 { 0.0 } else { v_tilde };
    let r_next = if y { r_ref } else { r.saturating_sub(1) };
    (v_next, r_next, y)
}

/// Run the reference neuron over a whole train.
pub fn ref_run(
    leak: RefLeak,
    v_th: f64,
    r_ref: u32,
    weights: &[u8],
    train: &[Vec<bool>],
) -> Vec<(f64, u32, bool)> {
    let mut v = 0.0;
    let mut r = 0;
    train
        .iter()
        .map(|spikes| {
            let (v2, r2, y) = ref_step(leak, v_th, r_ref, weights, v, r, spikes);
            v = v2;
            r = r2;
            (v, r, y)
        })
        .collect()
}
