//! Message transport between workers.
//!
//! The contract is a reliable, ordered, exactly-once byte stream per ordered
//! pair of workers. [`ChannelTransport`] implements it in process; a network
//! transport would implement the same two traits.

use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FksError, Result};

/// One worker's view of the transport.
pub trait Endpoint: Send {
    fn rank(&self) -> usize;
    fn send(&mut self, to: usize, bytes: Vec<u8>) -> Result<()>;
    fn recv(&mut self, from: usize) -> Result<Vec<u8>>;
}

pub trait Transport {
    /// Endpoints for ranks `0..workers`, in rank order.
    fn connect(&self, workers: usize) -> Vec<Box<dyn Endpoint>>;
}

/// In-process transport over `std::sync::mpsc` channels.
#[derive(Debug, Clone)]
pub struct ChannelTransport {
    pub timeout: Duration,
}

impl Default for ChannelTransport {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(120),
        }
    }
}

pub struct ChannelEndpoint {
    rank: usize,
    to: Vec<Sender<Vec<u8>>>,
    from: Vec<Receiver<Vec<u8>>>,
    timeout: Duration,
}

impl ChannelTransport {
    fn endpoints(&self, workers: usize) -> Vec<ChannelEndpoint> {
        // pairs[s][r] carries s -> r
        let mut senders: Vec<Vec<Sender<Vec<u8>>>> = Vec::with_capacity(workers);
        let mut receivers: Vec<Vec<Option<Receiver<Vec<u8>>>>> =
            (0..workers).map(|_| (0..workers).map(|_| None).collect()).collect();
        for s in 0..workers {
            let mut row = Vec::with_capacity(workers);
            for recv_row in receivers.iter_mut() {
                let (tx, rx) = channel();
                row.push(tx);
                recv_row[s] = Some(rx);
            }
            senders.push(row);
        }
        senders
            .into_iter()
            .zip(receivers)
            .enumerate()
            .map(|(rank, (to, from))| ChannelEndpoint {
                rank,
                to,
                from: from.into_iter().map(|r| r.expect("all pairs connected")).collect(),
                timeout: self.timeout,
            })
            .collect()
    }
}

impl Transport for ChannelTransport {
    fn connect(&self, workers: usize) -> Vec<Box<dyn Endpoint>> {
        self.endpoints(workers)
            .into_iter()
            .map(|e| Box::new(e) as Box<dyn Endpoint>)
            .collect()
    }
}

impl Endpoint for ChannelEndpoint {
    fn rank(&self) -> usize {
        self.rank
    }

    fn send(&mut self, to: usize, bytes: Vec<u8>) -> Result<()> {
        self.to[to].send(bytes).map_err(|_| FksError::Transport {
            from: self.rank,
            to,
            reason: "receiver disconnected".into(),
        })
    }

    fn recv(&mut self, from: usize) -> Result<Vec<u8>> {
        self.from[from]
            .recv_timeout(self.timeout)
            .map_err(|e| FksError::Transport {
                from,
                to: self.rank,
                reason: match e {
                    RecvTimeoutError::Timeout => format!("no message within {:?}", self.timeout),
                    RecvTimeoutError::Disconnected => "sender disconnected".into(),
                },
            })
    }
}

/// Channel transport that sleeps a random time before every send and
/// receive. Exercises progress under skewed worker timing.
#[derive(Debug, Clone)]
pub struct DelayedTransport {
    pub inner: ChannelTransport,
    pub max_delay: Duration,
    pub seed: u64,
}

struct DelayedEndpoint {
    inner: ChannelEndpoint,
    max_delay: Duration,
    rng: ChaCha8Rng,
}

impl DelayedEndpoint {
    fn pause(&mut self) {
        let nanos = self.max_delay.as_nanos() as u64;
        if nanos > 0 {
            std::thread::sleep(Duration::from_nanos(self.rng.random_range(0..=nanos)));
        }
    }
}

impl Transport for DelayedTransport {
    fn connect(&self, workers: usize) -> Vec<Box<dyn Endpoint>> {
        self.inner
            .endpoints(workers)
            .into_iter()
            .map(|e| {
                let rng = ChaCha8Rng::seed_from_u64(self.seed ^ (e.rank as u64).wrapping_mul(0x9e37_79b9));
                Box::new(DelayedEndpoint {
                    inner: e,
                    max_delay: self.max_delay,
                    rng,
                }) as Box<dyn Endpoint>
            })
            .collect()
    }
}

impl Endpoint for DelayedEndpoint {
    fn rank(&self) -> usize {
        self.inner.rank
    }

    fn send(&mut self, to: usize, bytes: Vec<u8>) -> Result<()> {
        self.pause();
        self.inner.send(to, bytes)
    }

    fn recv(&mut self, from: usize) -> Result<Vec<u8>> {
        self.pause();
        self.inner.recv(from)
    }
}
