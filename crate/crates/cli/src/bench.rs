//! Response-time benchmarks over HTTP against an in-process server.
//!
//! The server runs with the demo data plus generated extruders, a fixture
//! CAD platform and the in-process stock mock. Budgets are the published
//! averages rounded up; they are upper bounds for a desk machine, not
//! reproductions of the original measurements.

use std::fmt;
use std::time::{Duration, Instant};

use extrucat_core::annotation::ExtruderSubmission;
use extrucat_core::assets::AssetStore;
use extrucat_core::cad::{SyncMode, SyncPolicy};
use extrucat_core::ontology::OntologyConfig;
use extrucat_core::seed::bench_submissions;
use extrucat_fixtures::{CadFixture, FixtureServer, DEMO_TOKEN};
use extrucat_server::{CadSection, Role, ServerConfig, ServerHandle, TokenEntry};
use serde_json::{json, Value};

use crate::ops::{open_store, seed, Dataset};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Scenario {
    Catalogue,
    Insert,
    Solutions,
    CadImport,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Catalogue,
        Scenario::Insert,
        Scenario::Solutions,
        Scenario::CadImport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Catalogue => "catalogue loading",
            Scenario::Insert => "extruder insertion",
            Scenario::Solutions => "solutions loading",
            Scenario::CadImport => "CAD import",
        }
    }

    /// Upper bound for the mean, in seconds.
    pub fn budget(self) -> f64 {
        match self {
            Scenario::Catalogue => 1.0,
            Scenario::Insert => 2.5,
            Scenario::Solutions => 1.5,
            Scenario::CadImport => 2.8,
        }
    }

    /// The published average, in seconds.
    pub fn published(self) -> f64 {
        match self {
            Scenario::Catalogue => 0.938,
            Scenario::Insert => 2.457,
            Scenario::Solutions => 1.428,
            Scenario::CadImport => 2.736,
        }
    }

    /// Read-only scenarios may run on several workers.
    fn concurrent(self) -> bool {
        matches!(self, Scenario::Catalogue | Scenario::Solutions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub runs: usize,
    /// Extruders in the store, the three demo ones included.
    pub extruders: usize,
    pub seed: u64,
    /// Request workers for read-only scenarios.
    pub workers: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            runs: 20,
            extruders: 50,
            seed: 7,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub scenario: Scenario,
    pub samples: Vec<Duration>,
}

impl Timing {
    pub fn mean(&self) -> f64 {
        self.samples.iter().map(Duration::as_secs_f64).sum::<f64>() / self.samples.len().max(1) as f64
    }

    pub fn min(&self) -> f64 {
        self.samples
            .iter()
            .map(Duration::as_secs_f64)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().map(Duration::as_secs_f64).fold(0.0, f64::max)
    }

    pub fn stddev(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = self
            .samples
            .iter()
            .map(|d| (d.as_secs_f64() - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        var.sqrt()
    }

    pub fn within_budget(&self) -> bool {
        self.mean() < self.scenario.budget()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub options: BenchOptions,
    pub timings: Vec<Timing>,
}

impl BenchReport {
    pub fn within_budget(&self) -> bool {
        self.timings.iter().all(Timing::within_budget)
    }

    pub fn timing(&self, scenario: Scenario) -> Option<&Timing> {
        self.timings.iter().find(|t| t.scenario == scenario)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} extruders, {} runs per scenario, {} worker(s)",
            self.options.extruders, self.options.runs, self.options.workers
        )?;
        writeln!(
            f,
            "{:<20} {:>5} {:>9} {:>9} {:>9} {:>9} {:>7} {:>9}  status",
            "scenario", "runs", "mean s", "min s", "max s", "stddev", "budget", "published"
        )?;
        for t in &self.timings {
            writeln!(
                f,
                "{:<20} {:>5} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>7.3} {:>9.3}  {}",
                t.scenario.name(),
                t.samples.len(),
                t.mean(),
                t.min(),
                t.max(),
                t.stddev(),
                t.scenario.budget(),
                t.scenario.published(),
                if t.within_budget() { "ok" } else { "OVER BUDGET" }
            )?;
        }
        write!(
            f,
            "note: published times come from an n1-standard-1 cloud instance; budgets are upper bounds, not reproductions"
        )
    }
}

const ADMIN: &str = "bench-admin";
const CUSTOMER: &str = "bench-customer";

/// A seeded server with a fixture CAD platform.
pub struct BenchEnv {
    server: ServerHandle,
    _cad: (CadFixture, FixtureServer),
    agent: ureq::Agent,
    submissions: Vec<ExtruderSubmission>,
    _dir: tempfile::TempDir,
}

impl BenchEnv {
    pub fn start(options: &BenchOptions) -> Result<Self, CliError> {
        let dir = tempfile::tempdir().map_err(|source| CliError::Io {
            path: std::env::temp_dir(),
            source,
        })?;
        let generated = options.extruders.saturating_sub(3);
        {
            let store = open_store(dir.path())?;
            let dataset = Dataset::Bench {
                count: generated,
                seed: options.seed,
            };
            seed(
                &store,
                dataset,
                &OntologyConfig::default(),
                &AssetStore::new(dir.path().join("assets")),
            )?;
        }
        // Submissions past the seeded ones have fresh ids.
        let submissions = bench_submissions(generated + options.runs, options.seed)
            .into_iter()
            .skip(generated)
            .collect();

        let fixture = CadFixture::demo();
        let cad_server = fixture
            .serve()
            .map_err(|e| CliError::Bench(format!("CAD fixture: {e}")))?;
        let token = |token: &str, role, customer: Option<&str>| TokenEntry {
            token: token.into(),
            role,
            user: token.into(),
            customer: customer.map(str::to_owned),
        };
        let config = ServerConfig {
            port: 0,
            data_dir: dir.path().to_owned(),
            seed_demo: true,
            cad: Some(CadSection {
                url: cad_server.base_url(),
                token: Some(DEMO_TOKEN.into()),
                policy: SyncPolicy {
                    mode: SyncMode::Manual,
                    staleness_secs: 300,
                },
            }),
            tokens: vec![
                token(ADMIN, Role::Admin, None),
                token(CUSTOMER, Role::Customer, Some("C001")),
            ],
            ..ServerConfig::default()
        };
        let server = ServerHandle::spawn(config).map_err(|e| CliError::Bench(e.to_string()))?;
        let agent = ureq::Agent::new_with_config(
            ureq::Agent::config_builder()
                .http_status_as_error(false)
                .timeout_global(Some(Duration::from_secs(60)))
                .build(),
        );
        Ok(BenchEnv {
            server,
            _cad: (fixture, cad_server),
            agent,
            submissions,
            _dir: dir,
        })
    }

    pub fn base_url(&self) -> String {
        self.server.base_url()
    }

    /// Sends one request and returns its wall time; non-2xx is an error.
    fn request(&self, method: &str, path: &str, token: &str, body: Option<&Value>) -> Result<Duration, CliError> {
        let url = format!("{}{path}", self.server.base_url());
        let auth = format!("Bearer {token}");
        let started = Instant::now();
        let resp = match (method, body) {
            ("GET", _) => self.agent.get(&url).header("authorization", &auth).call(),
            (_, Some(b)) => self.agent.post(&url).header("authorization", &auth).send_json(b),
            (_, None) => self.agent.post(&url).header("authorization", &auth).send_empty(),
        }
        .map_err(|e| CliError::Bench(format!("{method} {path}: {e}")))?;
        let status = resp.status().as_u16();
        let text = resp.into_body().read_to_string().unwrap_or_default();
        let elapsed = started.elapsed();
        if !(200..300).contains(&status) {
            return Err(CliError::Bench(format!("{method} {path}: HTTP {status}: {text}")));
        }
        Ok(elapsed)
    }

    fn once(&self, scenario: Scenario, run: usize) -> Result<Duration, CliError> {
        match scenario {
            Scenario::Catalogue => self.request("GET", "/api/extruders", ADMIN, None),
            Scenario::Solutions => self.request("GET", "/api/solutions/E01.M1", CUSTOMER, None),
            Scenario::Insert => {
                let sub = self
                    .submissions
                    .get(run)
                    .ok_or_else(|| CliError::Bench("more runs than prepared submissions".into()))?;
                let body = serde_json::to_value(sub).map_err(|e| CliError::Bench(e.to_string()))?;
                self.request("POST", "/api/admin/extruders", ADMIN, Some(&body))
            }
            Scenario::CadImport => {
                let body = json!({
                    "component": "E01.H1",
                    "document": "urola-e01",
                    "element": "hopper",
                    "position": { "x": 0.0, "y": 0.0, "z": -1.0 }
                });
                self.request("POST", "/api/admin/cad/import", ADMIN, Some(&body))
            }
        }
    }

    pub fn measure(&self, scenario: Scenario, options: &BenchOptions) -> Result<Timing, CliError> {
        // One unmeasured warm-up for reads.
        if scenario.concurrent() {
            self.once(scenario, 0)?;
        }
        let workers = if scenario.concurrent() {
            options.workers.max(1)
        } else {
            1
        };
        let samples = if workers == 1 {
            (0..options.runs)
                .map(|run| self.once(scenario, run))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        s.spawn(move || {
                            (w..options.runs)
                                .step_by(workers)
                                .map(|run| self.once(scenario, run))
                                .collect::<Result<Vec<_>, _>>()
                        })
                    })
                    .collect();
                let mut all = Vec::new();
                for h in handles {
                    all.extend(h.join().map_err(|_| CliError::Bench("worker panicked".into()))??);
                }
                Ok::<_, CliError>(all)
            })?
        };
        Ok(Timing { scenario, samples })
    }
}

pub fn run(options: &BenchOptions, scenarios: &[Scenario]) -> Result<BenchReport, CliError> {
    if options.runs == 0 {
        return Err(CliError::Input("runs must be at least 1".into()));
    }
    let env = BenchEnv::start(options)?;
    let timings = scenarios
        .iter()
        .map(|&s| env.measure(s, options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BenchReport {
        options: *options,
        timings,
    })
}
