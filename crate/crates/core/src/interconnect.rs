//! Mux-based all-to-all spike routing.
//!
//! A dense `n × n` binary connection list decides, per ordered neuron
//! pair, whether an emitted spike is forwarded or zeroed. Entry
//! `[src][dst] = 1` forwards the output of neuron `src` to neuron `dst`'s
//! input; a disabled entry routes a hard zero, exactly like the
//! multiplexer it models. Routing is combinational; propagation delay is
//! charged by the processor's cycle accounting, not here.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("neuron index {index} out of range for {n}-neuron matrix")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("spike vector length {got} does not match network size {n}")]
    SizeMismatch { got: usize, n: usize },
    #[error("network size must be at least 1")]
    EmptyNetwork,
}

/// One cycle's worth of output spikes, one bit per neuron.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpikeVector {
    bits: Vec<bool>,
}

impl SpikeVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for SpikeVector {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

/// Dense directed connection list. `n` stays small (a few hundred at
/// most), so the n² layout mirrors the mux grid and the serialized
/// register rows one-for-one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionMatrix {
    n: usize,
    bits: Vec<bool>, // row-major, [src * n + dst]
}

impl ConnectionMatrix {
    pub fn new(n: usize) -> Result<Self, RoutingError> {
        if n == 0 {
            return Err(RoutingError::EmptyNetwork);
        }
        Ok(Self {
            n,
            bits: vec![false; n * n],
        })
    }

    /// Every ordered pair connected, self-loops included.
    pub fn all_ones(n: usize) -> Result<Self, RoutingError> {
        let mut m = Self::new(n)?;
        m.bits.fill(true);
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, src: usize, dst: usize) -> Result<usize, RoutingError> {
        for index in [src, dst] {
            if index >= self.n {
                return Err(RoutingError::IndexOutOfRange { index, n: self.n });
            }
        }
        Ok(src * self.n + dst)
    }

    pub fn set(&mut self, src: usize, dst: usize, enabled: bool) -> Result<(), RoutingError> {
        let i = self.index(src, dst)?;
        self.bits[i] = enabled;
        Ok(())
    }

    pub fn get(&self, src: usize, dst: usize) -> Result<bool, RoutingError> {
        let i = self.index(src, dst)?;
        Ok(self.bits[i])
    }

    /// Destinations fed by `src`, as that source's row of the list.
    pub fn row(&self, src: usize) -> Result<&[bool], RoutingError> {
        if src >= self.n {
            return Err(RoutingError::IndexOutOfRange {
                index: src,
                n: self.n,
            });
        }
        Ok(&self.bits[src * self.n..(src + 1) * self.n])
    }

    pub fn set_row(&mut self, src: usize, row: &[bool]) -> Result<(), RoutingError> {
        if row.len() != self.n {
            return Err(RoutingError::SizeMismatch {
                got: row.len(),
                n: self.n,
            });
        }
        if src >= self.n {
            return Err(RoutingError::IndexOutOfRange {
                index: src,
                n: self.n,
            });
        }
        self.bits[src * self.n..(src + 1) * self.n].copy_from_slice(row);
        Ok(())
    }

    /// Route one cycle of outputs through the mux grid.
    ///
    /// Returns one input vector per destination; entry `src` of
    /// destination `dst`'s vector is `outputs[src] AND [src][dst]`. The
    /// layout lines up with a destination's weight vector, so weight `j`
    /// always belongs to source neuron `j`.
    #[allow(clippy::needless_range_loop)]
    pub fn route(&self, outputs: &SpikeVector) -> Result<Vec<SpikeVector>, RoutingError> {
        if outputs.len() != self.n {
            return Err(RoutingError::SizeMismatch {
                got: outputs.len(),
                n: self.n,
            });
        }
        let mut routed = vec![SpikeVector::zeros(self.n); self.n];
        for src in 0..self.n {
            if !outputs.get(src) {
                continue;
            }
            for dst in 0..self.n {
                if self.bits[src * self.n + dst] {
                    routed[dst].set(src, true);
                }
            }
        }
        Ok(routed)
    }
}
