//! Host programming session and the device-side protocol state machine.
//!
//! A session first streams the full register image, then one packed
//! impulse update per cycle. The device loads the image when the last
//! image byte lands, and from then on every impulse update advances the
//! processor by exactly one clock cycle. Output spikes come back packed
//! like the impulse register (`⌈n/8⌉` bytes), and only for cycles where
//! at least one neuron fired (the transmit side is gated on a validated,
//! nonzero output).

use super::image::{deserialize_registers, image_len, pack_bits, packed_len, unpack_bits};
use super::{ByteChannel, UartError};
use crate::interconnect::SpikeVector;
use crate::processor::{LeakSetting, Processor, RegisterBank, SimTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DevicePhase {
    ReceivingImage,
    Running,
}

/// The device end of the link: a protocol decoder in front of a
/// processor.
///
/// Network size, refractory length, leak step, and the membrane backend
/// are init parameters, the same way the hardware fixes them in the
/// testbench; everything else arrives through the register image.
pub struct DeviceEndpoint {
    n: usize,
    refractory: u32,
    leak_step: u8,
    dynamics: LeakSetting,
    phase: DevicePhase,
    rx_buf: Vec<u8>,
    tx_queue: Vec<u8>,
    processor: Option<Processor>,
}

impl DeviceEndpoint {
    pub fn new(n: usize, refractory: u32, leak_step: u8) -> Self {
        Self {
            n,
            refractory,
            leak_step,
            dynamics: LeakSetting::FixedLeak,
            phase: DevicePhase::ReceivingImage,
            rx_buf: Vec::new(),
            tx_queue: Vec::new(),
            processor: None,
        }
    }

    /// Init parameters copied from a host-side bank.
    pub fn for_bank(bank: &RegisterBank) -> Self {
        Self::new(bank.n, bank.refractory, bank.leak_step)
    }

    pub fn with_dynamics(mut self, dynamics: LeakSetting) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn processor(&self) -> Option<&Processor> {
        self.processor.as_ref()
    }

    /// Consume one received byte, advancing the protocol state machine.
    pub fn feed_byte(&mut self, byte: u8) -> Result<(), UartError> {
        self.rx_buf.push(byte);
        match self.phase {
            DevicePhase::ReceivingImage => {
                if self.rx_buf.len() == image_len(self.n) {
                    let mut bank = deserialize_registers(&self.rx_buf, self.n)?;
                    bank.refractory = self.refractory;
                    bank.leak_step = self.leak_step;
                    self.processor = Some(Processor::new(bank, self.dynamics.clone())?);
                    self.rx_buf.clear();
                    self.phase = DevicePhase::Running;
                }
            }
            DevicePhase::Running => {
                if self.rx_buf.len() == packed_len(self.n) {
                    let impulse = SpikeVector::from_bits(unpack_bits(&self.rx_buf, self.n)?);
                    self.rx_buf.clear();
                    let proc = self
                        .processor
                        .as_mut()
                        .expect("running phase has a processor");
                    let outputs = proc.tick(&impulse)?;
                    if outputs.any() {
                        self.tx_queue.extend(pack_bits(outputs.as_slice()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Drain bytes queued for transmission to the host.
    pub fn take_tx(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.tx_queue)
    }
}

/// One scheduled cycle's exchange as seen from the host.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleExchange {
    pub cycle: u64,
    pub impulse: SpikeVector,
    pub sent: Vec<u8>,
    pub received: Vec<u8>,
}

/// Full transcript of a programming-plus-inference session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub n: usize,
    /// Bytes of register image pushed before the first impulse.
    pub image_bytes: usize,
    pub cycles: Vec<CycleExchange>,
    /// All device→host bytes, in arrival order.
    pub received: Vec<u8>,
}

impl SessionOutcome {
    /// Rebuild the run's spike view from the transcript.
    ///
    /// The update for cycle `k`'s impulse publishes its spikes at cycle
    /// `k + 1`, so the cycle-`k` exchange's received bytes land in the
    /// `k + 1` record, the same shape a direct spikes-only trace has.
    pub fn spike_trace(&self) -> Result<SimTrace, UartError> {
        let mut outputs = Vec::with_capacity(self.cycles.len());
        for exchange in &self.cycles {
            let y = if exchange.received.is_empty() {
                SpikeVector::zeros(self.n)
            } else {
                SpikeVector::from_bits(unpack_bits(&exchange.received, self.n)?)
            };
            outputs.push(y);
        }
        let mut records = Vec::new();
        for (k, exchange) in self.cycles.iter().enumerate() {
            let y = if k == 0 {
                SpikeVector::zeros(self.n)
            } else {
                outputs[k - 1].clone()
            };
            records.push((exchange.cycle, exchange.impulse.clone(), y));
        }
        if let Some(last) = outputs.last() {
            records.push((
                self.cycles.len() as u64,
                SpikeVector::zeros(self.n),
                last.clone(),
            ));
        }
        Ok(SimTrace::from_spikes(self.n, records))
    }
}

/// Program a device over `channel` and drive the impulse schedule
/// cycle-by-cycle, collecting whatever the device transmits back.
///
/// The schedule should already include any flush cycles needed to drain
/// in-flight spikes past the pipeline latency.
pub fn host_session<C: ByteChannel>(
    channel: &mut C,
    bank: &RegisterBank,
    schedule: &[SpikeVector],
) -> Result<SessionOutcome, UartError> {
    bank.validate()?;
    for imp in schedule {
        if imp.len() != bank.n {
            return Err(UartError::ImpulseSize {
                got: imp.len(),
                n: bank.n,
            });
        }
    }

    let image = super::image::serialize_registers(bank);
    channel.send(&image)?;
    let mut received = channel.recv_available()?;
    debug_assert!(
        received.is_empty(),
        "device must not transmit during programming"
    );

    let mut cycles = Vec::with_capacity(schedule.len());
    for (k, impulse) in schedule.iter().enumerate() {
        let sent = pack_bits(impulse.as_slice());
        channel.send(&sent)?;
        let got = channel.recv_available()?;
        received.extend_from_slice(&got);
        cycles.push(CycleExchange {
            cycle: k as u64,
            impulse: impulse.clone(),
            sent,
            received: got,
        });
    }

    Ok(SessionOutcome {
        n: bank.n,
        image_bytes: image.len(),
        cycles,
        received,
    })
}
