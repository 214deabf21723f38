//! Seeded discrete-event simulation used as an independent check on the
//! queueing and AoI models.
//!
//! Randomness comes from ChaCha8 with one stream per role: stream 0 drives
//! M/M/1 arrivals, stream 1 drives M/M/1 service, and stream `2 + m` drives
//! sensor `m` in the AoI replay. Adding a sensor never shifts another
//! sensor's draws.
//!
//! Events at equal timestamps are ordered request < generate < arrive <
//! service_start < service_end, then by id.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::aoi::age_sample;
use crate::scenario::SensorProfile;

const ARRIVAL_STREAM: u64 = 0;
const SERVICE_STREAM: u64 = 1;
const SENSOR_STREAM_BASE: u64 = 2;

/// Independent generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Request,
    Generate,
    Arrive,
    ServiceStart,
    ServiceEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub id: u64,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Customers(usize),
    Requests(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTimeline {
    pub seed: u64,
    pub horizon: Horizon,
    pub events: Vec<Event>,
}

impl EventTimeline {
    pub fn is_sorted(&self) -> bool {
        self.events.windows(2).all(|w| w[0] <= w[1])
    }

    /// One JSON record per line.
    pub fn write_ndjson(&self, mut out: impl Write) -> std::io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mm1Config {
    pub arrival_rate: f64,
    pub service_rate: f64,
    pub customers: usize,
    pub seed: u64,
    /// Leading customers excluded from the statistics.
    #[serde(default)]
    pub warmup: usize,
    #[serde(default)]
    pub record_events: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mm1Stats {
    pub mean_sojourn: f64,
    pub mean_wait: f64,
    /// Busy time over elapsed time.
    pub utilization: f64,
    pub samples: usize,
    pub elapsed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeline: Option<EventTimeline>,
}

/// Single FIFO server with Poisson arrivals and exponential service.
pub fn simulate_mm1(cfg: &Mm1Config) -> Mm1Stats {
    let mut arrivals = stream_rng(cfg.seed, ARRIVAL_STREAM);
    let mut services = stream_rng(cfg.seed, SERVICE_STREAM);
    let inter = Exp::new(cfg.arrival_rate).expect("arrival rate must be positive");
    let service = Exp::new(cfg.service_rate).expect("service rate must be positive");

    let mut agenda: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut log = cfg.record_events.then(Vec::new);
    let mut queue: VecDeque<(u64, f64)> = VecDeque::new();
    let mut in_service: Option<(u64, f64, f64)> = None;
    let mut arrived = 0usize;
    let mut done = 0usize;
    let mut busy = 0.0;
    let mut sum_sojourn = 0.0;
    let mut sum_wait = 0.0;
    let mut now = 0.0;

    if cfg.customers > 0 {
        agenda.push(Reverse(Event { time: inter.sample(&mut arrivals), kind: EventKind::Arrive, id: 0 }));
    }

    while let Some(Reverse(ev)) = agenda.pop() {
        now = ev.time;
        if let Some(log) = log.as_mut() {
            log.push(ev);
        }
        match ev.kind {
            EventKind::Arrive => {
                arrived += 1;
                queue.push_back((ev.id, ev.time));
                if arrived < cfg.customers {
                    let next = ev.time + inter.sample(&mut arrivals);
                    agenda.push(Reverse(Event { time: next, kind: EventKind::Arrive, id: ev.id + 1 }));
                }
                if in_service.is_none() {
                    agenda.push(Reverse(Event { time: now, kind: EventKind::ServiceStart, id: ev.id }));
                    in_service = Some((ev.id, f64::NAN, f64::NAN));
                }
            }
            EventKind::ServiceStart => {
                let (id, arrived_at) = queue.pop_front().expect("service start with empty queue");
                debug_assert_eq!(id, ev.id);
                let duration = service.sample(&mut services);
                in_service = Some((id, arrived_at, now));
                agenda.push(Reverse(Event { time: now + duration, kind: EventKind::ServiceEnd, id }));
            }
            EventKind::ServiceEnd => {
                let (id, arrived_at, started) = in_service.take().expect("service end while idle");
                busy += now - started;
                if id as usize >= cfg.warmup {
                    sum_sojourn += now - arrived_at;
                    sum_wait += started - arrived_at;
                }
                done += 1;
                if let Some(&(next, _)) = queue.front() {
                    agenda.push(Reverse(Event { time: now, kind: EventKind::ServiceStart, id: next }));
                    in_service = Some((next, f64::NAN, f64::NAN));
                }
            }
            EventKind::Request | EventKind::Generate => unreachable!("not scheduled by the M/M/1 model"),
        }
    }

    let samples = done.saturating_sub(cfg.warmup);
    let n = samples.max(1) as f64;
    Mm1Stats {
        mean_sojourn: sum_sojourn / n,
        mean_wait: sum_wait / n,
        utilization: if now > 0.0 { busy / now } else { 0.0 },
        samples,
        elapsed: now,
        timeline: log.map(|mut events| {
            // a departure and the next service start share a timestamp; present
            // them in the documented tie order rather than processing order
            events.sort();
            EventTimeline {
                seed: cfg.seed,
                horizon: Horizon::Customers(cfg.customers),
                events,
            }
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SojournMode {
    /// Every packet spends exactly `sojourn` seconds in the buffer.
    Fixed { sojourn: f64 },
    /// Waiting and service drawn from the stationary M/M/1 laws.
    Stochastic { arrival_rate: f64, service_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgePolicy {
    /// The n-th generated packet serves the n-th request.
    PaperMapping,
    /// Each request uses the newest packet already through the buffer.
    FreshestAvailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSensor {
    pub id: String,
    pub gen_frequency: f64,
    /// Distance per update index; packets past the end reuse the last entry.
    pub distances: Vec<f64>,
}

impl SimSensor {
    pub fn from_profile(profile: &SensorProfile, index: usize, frame: usize, updates: usize) -> Self {
        Self {
            id: profile.label(index),
            gen_frequency: profile.gen_frequency,
            distances: profile.distances_for_frame(frame, updates),
        }
    }

    fn distance(&self, n: usize) -> f64 {
        self.distances
            .get(n - 1)
            .or(self.distances.last())
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoiSimConfig {
    pub sensors: Vec<SimSensor>,
    pub request_frequency: f64,
    pub updates: usize,
    pub propagation_speed: f64,
    pub sojourn: SojournMode,
    pub policy: AgePolicy,
    pub seed: u64,
    #[serde(default)]
    pub record_events: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSensorResult {
    pub id: String,
    /// Age at each request; `None` when no packet was available yet.
    pub samples: Vec<Option<f64>>,
    pub mean_age: Option<f64>,
    pub mean_sojourn: f64,
    pub packets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoiSimResult {
    pub sensors: Vec<SimSensorResult>,
    /// Buffer time averaged over every simulated packet.
    pub mean_sojourn: f64,
    pub packets: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeline: Option<EventTimeline>,
}

struct Packet {
    generated: f64,
    propagation: f64,
    wait: f64,
    sojourn: f64,
}

impl Packet {
    fn arrived(&self) -> f64 {
        self.generated + self.propagation
    }

    fn started(&self) -> f64 {
        self.arrived() + self.wait
    }

    fn finished(&self) -> f64 {
        self.arrived() + self.sojourn
    }
}

/// Replays sensor generation, propagation, buffering and request ticks.
pub fn simulate_aoi(cfg: &AoiSimConfig) -> AoiSimResult {
    let n_req = cfg.updates;
    let last_request = n_req as f64 / cfg.request_frequency;
    let mut events = cfg.record_events.then(Vec::new);
    if let Some(ev) = events.as_mut() {
        for n in 1..=n_req {
            ev.push(Event { time: n as f64 / cfg.request_frequency, kind: EventKind::Request, id: n as u64 });
        }
    }

    let mut sensors = Vec::with_capacity(cfg.sensors.len());
    let mut total_sojourn = 0.0;
    let mut total_packets = 0usize;

    for (m, sensor) in cfg.sensors.iter().enumerate() {
        let mut rng = stream_rng(cfg.seed, SENSOR_STREAM_BASE + m as u64);
        // enough packets to cover every request under either policy
        let by_time = (last_request * sensor.gen_frequency).floor() as usize + 1;
        let count = n_req.max(by_time);
        let packets: Vec<Packet> = (1..=count)
            .map(|n| {
                let (wait, sojourn) = draw_sojourn(&cfg.sojourn, &mut rng);
                Packet {
                    generated: n as f64 / sensor.gen_frequency,
                    propagation: sensor.distance(n) / cfg.propagation_speed,
                    wait,
                    sojourn,
                }
            })
            .collect();

        if let Some(ev) = events.as_mut() {
            for (k, p) in packets.iter().enumerate() {
                let id = ((m as u64) << 32) | (k as u64 + 1);
                ev.push(Event { time: p.generated, kind: EventKind::Generate, id });
                ev.push(Event { time: p.arrived(), kind: EventKind::Arrive, id });
                ev.push(Event { time: p.started(), kind: EventKind::ServiceStart, id });
                ev.push(Event { time: p.finished(), kind: EventKind::ServiceEnd, id });
            }
        }

        let samples: Vec<Option<f64>> = (1..=n_req)
            .map(|n| {
                let requested = n as f64 / cfg.request_frequency;
                match cfg.policy {
                    AgePolicy::PaperMapping => {
                        let p = &packets[n - 1];
                        Some(age_sample(p.generated, p.propagation, p.sojourn, requested))
                    }
                    AgePolicy::FreshestAvailable => packets
                        .iter()
                        .filter(|p| p.finished() <= requested)
                        .map(|p| p.generated)
                        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.max(g))))
                        .map(|g| requested - g),
                }
            })
            .collect();

        let sum: f64 = packets.iter().map(|p| p.sojourn).sum();
        total_sojourn += sum;
        total_packets += packets.len();
        let available: Vec<f64> = samples.iter().flatten().copied().collect();
        sensors.push(SimSensorResult {
            id: sensor.id.clone(),
            mean_age: (!available.is_empty())
                .then(|| available.iter().sum::<f64>() / available.len() as f64),
            samples,
            mean_sojourn: sum / packets.len().max(1) as f64,
            packets: packets.len(),
        });
    }

    let timeline = events.map(|mut ev| {
        ev.sort();
        EventTimeline { seed: cfg.seed, horizon: Horizon::Requests(n_req), events: ev }
    });
    AoiSimResult {
        sensors,
        mean_sojourn: total_sojourn / total_packets.max(1) as f64,
        packets: total_packets,
        timeline,
    }
}

/// (waiting, time in system) for one packet.
fn draw_sojourn(mode: &SojournMode, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match *mode {
        SojournMode::Fixed { sojourn } => (0.0, sojourn),
        SojournMode::Stochastic { arrival_rate, service_rate } => {
            // stationary FIFO M/M/1: the queue is busy with probability ρ, and a
            // delayed customer waits Exp(μ − λ); service is Exp(μ)
            let rho = arrival_rate / service_rate;
            let wait = if rng.random::<f64>() < rho {
                Exp::new(service_rate - arrival_rate)
                    .expect("stochastic sojourn requires a stable buffer")
                    .sample(rng)
            } else {
                0.0
            };
            let service = Exp::new(service_rate).expect("service rate must be positive").sample(rng);
            (wait, wait + service)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm1(l: f64, m: f64, customers: usize, seed: u64) -> Mm1Config {
        Mm1Config {
            arrival_rate: l,
            service_rate: m,
            customers,
            seed,
            warmup: 0,
            record_events: false,
        }
    }

    #[test]
    fn event_order_breaks_ties_by_kind_then_id() {
        let mut ev = [
            Event { time: 0.0, kind: EventKind::ServiceEnd, id: 0 },
            Event { time: 0.0, kind: EventKind::Generate, id: 2 },
            Event { time: 0.0, kind: EventKind::Generate, id: 1 },
            Event { time: 0.0, kind: EventKind::Request, id: 9 },
            Event { time: -1.0, kind: EventKind::ServiceEnd, id: 0 },
        ];
        ev.sort();
        let kinds: Vec<_> = ev.iter().map(|e| (e.kind, e.id)).collect();
        assert_eq!(
            kinds,
            vec![
                (EventKind::ServiceEnd, 0),
                (EventKind::Request, 9),
                (EventKind::Generate, 1),
                (EventKind::Generate, 2),
                (EventKind::ServiceEnd, 0),
            ]
        );
    }

    #[test]
    fn mm1_is_deterministic_per_seed() {
        let a = simulate_mm1(&mm1(50.0, 100.0, 20_000, 7));
        let b = simulate_mm1(&mm1(50.0, 100.0, 20_000, 7));
        let c = simulate_mm1(&mm1(50.0, 100.0, 20_000, 8));
        assert_eq!(a.mean_sojourn.to_bits(), b.mean_sojourn.to_bits());
        assert_eq!(a, b);
        assert_ne!(a.mean_sojourn, c.mean_sojourn);
    }

    #[test]
    fn mm1_service_dominated_limit() {
        let s = simulate_mm1(&mm1(1.0, 1e6, 50_000, 3));
        assert!((s.mean_sojourn * 1e6 - 1.0).abs() < 0.03, "{}", s.mean_sojourn);
        assert!(s.utilization < 1e-5);
    }

    #[test]
    fn mm1_timeline_respects_fifo() {
        let mut cfg = mm1(80.0, 100.0, 500, 11);
        cfg.record_events = true;
        let stats = simulate_mm1(&cfg);
        let tl = stats.timeline.unwrap();
        assert!(tl.is_sorted());
        let mut arrive = vec![f64::NAN; 500];
        let mut start = vec![f64::NAN; 500];
        let mut end = vec![f64::NAN; 500];
        for e in &tl.events {
            let slot = match e.kind {
                EventKind::Arrive => &mut arrive,
                EventKind::ServiceStart => &mut start,
                EventKind::ServiceEnd => &mut end,
                _ => panic!("unexpected event"),
            };
            assert!(slot[e.id as usize].is_nan(), "event repeated");
            slot[e.id as usize] = e.time;
        }
        for i in 0..500 {
            assert!(start[i] >= arrive[i]);
            assert!(end[i] >= start[i]);
            if i > 0 {
                assert!(start[i] >= end[i - 1]);
            }
        }
    }

    #[test]
    fn warmup_drops_leading_customers() {
        let mut cfg = mm1(50.0, 100.0, 1_000, 5);
        cfg.warmup = 100;
        assert_eq!(simulate_mm1(&cfg).samples, 900);
    }

    #[test]
    fn adding_a_sensor_keeps_other_draws() {
        let sensor = |id: &str, f: f64| SimSensor { id: id.into(), gen_frequency: f, distances: vec![10.0] };
        let base = AoiSimConfig {
            sensors: vec![sensor("a", 100.0)],
            request_frequency: 200.0,
            updates: 50,
            propagation_speed: 3e8,
            sojourn: SojournMode::Stochastic { arrival_rate: 50.0, service_rate: 100.0 },
            policy: AgePolicy::PaperMapping,
            seed: 99,
            record_events: false,
        };
        let mut more = base.clone();
        more.sensors.push(sensor("b", 66.0));
        let r1 = simulate_aoi(&base);
        let r2 = simulate_aoi(&more);
        assert_eq!(r1.sensors[0], r2.sensors[0]);
    }

    #[test]
    fn freshest_policy_reports_unavailable_requests() {
        let cfg = AoiSimConfig {
            sensors: vec![SimSensor { id: "slow".into(), gen_frequency: 50.0, distances: vec![0.0] }],
            request_frequency: 200.0,
            updates: 8,
            propagation_speed: 3e8,
            sojourn: SojournMode::Fixed { sojourn: 0.0 },
            policy: AgePolicy::FreshestAvailable,
            seed: 1,
            record_events: true,
        };
        let r = simulate_aoi(&cfg);
        let s = &r.sensors[0].samples;
        // requests at 5,10,15 ms precede the first packet at 20 ms
        assert_eq!(&s[..3], &[None, None, None]);
        assert!((s[3].unwrap() - 0.0).abs() < 1e-15);
        assert!((s[4].unwrap() - 0.005).abs() < 1e-15);
        assert!(r.timeline.unwrap().is_sorted());
    }
}
