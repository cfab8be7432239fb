//! Acquisition of daily meteorological records: a cached web client for the
//! NASA POWER daily-point service and a fully offline path from fixture
//! files written in the cache format.

pub mod cache;
pub mod catalog;
pub mod power;

use std::path::{Path, PathBuf};

use chrono::Duration;
use sha2::{Digest, Sha256};

use crate::dataset::{hex, DailyDataset, DateRange, GeoPoint};
use crate::error::{Error, Result};

/// Widen a range backwards so every day of the original window has `lag_days`
/// of history in front of it; the end stays put.
pub fn extend_for_lag(range: DateRange, lag_days: usize) -> DateRange {
    DateRange::new(range.start() - Duration::days(lag_days as i64), range.end())
        .expect("moving the start earlier keeps the range valid")
}

/// Stable cache key: a content hash of the canonical request description.
pub fn request_key(point: &GeoPoint, range: &DateRange, params: &[String]) -> String {
    let canonical = format!(
        "lat={};lon={};start={};end={};params={}",
        point.lat_deg(),
        point.lon_deg(),
        range.start(),
        range.end(),
        params.join(",")
    );
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    format!("pwr-{}", &hex(&hasher.finalize())[..16])
}

/// Blocking HTTP layer, swappable for tests.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> std::result::Result<String, String>;
}

/// Production transport over HTTPS.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport {
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(60))
                .build(),
        }
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> std::result::Result<String, String> {
        self.agent
            .get(url)
            .call()
            .map_err(|e| e.to_string())?
            .into_string()
            .map_err(|e| e.to_string())
    }
}

/// Cached client for the POWER daily point endpoint.
pub struct PowerClient<T: Transport> {
    transport: T,
    cache_dir: PathBuf,
    offline: bool,
}

impl PowerClient<HttpTransport> {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        PowerClient {
            transport: HttpTransport::default(),
            cache_dir: cache_dir.into(),
            offline: false,
        }
    }
}

impl<T: Transport> PowerClient<T> {
    pub fn with_transport(transport: T, cache_dir: impl Into<PathBuf>) -> Self {
        PowerClient {
            transport,
            cache_dir: cache_dir.into(),
            offline: false,
        }
    }

    /// In offline mode every request must hit the cache.
    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    /// Fetch a dataset covering every day of `range`, consulting the cache
    /// first. A network response is persisted before it is returned, so two
    /// calls with the same request key read identical bytes.
    pub fn fetch_daily(
        &self,
        point: &GeoPoint,
        range: &DateRange,
        params: &[String],
    ) -> Result<DailyDataset> {
        if params.is_empty() {
            return Err(Error::Validation("no parameters requested".into()));
        }
        let key = request_key(point, range, params);
        let cached = cache::csv_path(&self.cache_dir, &key);
        if cached.exists() {
            return load_fixture(&cached);
        }
        if self.offline {
            return Err(Error::OfflineCacheMiss { request_key: key });
        }
        let url = power::build_url(point, range, params);
        let body = self
            .transport
            .get(&url)
            .map_err(|message| Error::Transport {
                request_key: key.clone(),
                message,
            })?;
        let ds = power::parse_payload(&body, range, params)?;
        cache::store(
            &self.cache_dir,
            &key,
            &ds,
            cache::Provenance {
                latitude: point.lat_deg(),
                longitude: point.lon_deg(),
                start: range.start().to_string(),
                end: range.end().to_string(),
                parameters: params.to_vec(),
                source: "power.larc.nasa.gov".into(),
                fetched_at: chrono::Utc::now().to_rfc3339(),
            },
        )?;
        Ok(ds)
    }
}

/// Load a dataset from a cache-format CSV file (offline path).
pub fn load_fixture(path: &Path) -> Result<DailyDataset> {
    cache::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::date;
    use std::collections::BTreeMap;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct CannedTransport {
        body: String,
        hits: AtomicUsize,
    }

    impl Transport for CannedTransport {
        fn get(&self, _url: &str) -> std::result::Result<String, String> {
            self.hits.fetch_add(1, Ordering::SeqCst);
            Ok(self.body.clone())
        }
    }

    struct FailingTransport;

    impl Transport for FailingTransport {
        fn get(&self, _url: &str) -> std::result::Result<String, String> {
            Err("connection refused".into())
        }
    }

    fn payload_for(range: &DateRange) -> String {
        let n = range.num_days();
        let mut series = BTreeMap::new();
        series.insert(
            "T2M".to_string(),
            (
                "C".to_string(),
                (0..n).map(|i| Some(20.0 + (i % 9) as f64)).collect(),
            ),
        );
        power::synthesize_payload(range, &series)
    }

    #[test]
    fn extend_for_lag_examples() {
        let nominal = DateRange::new(date(2023, 5, 1), date(2024, 4, 30)).unwrap();
        let ext = extend_for_lag(nominal, 28);
        assert_eq!(ext.start(), date(2023, 4, 3));
        assert_eq!(ext.end(), date(2024, 4, 30));
        let ext6 = extend_for_lag(nominal, 6);
        assert_eq!(ext6.start(), date(2023, 4, 25));
        assert_eq!(extend_for_lag(nominal, 0), nominal);
    }

    #[test]
    fn full_year_fetch_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let range = DateRange::new(date(2023, 5, 1), date(2024, 4, 30)).unwrap();
        let transport = CannedTransport {
            body: payload_for(&range),
            hits: AtomicUsize::new(0),
        };
        let client = PowerClient::with_transport(transport, dir.path());
        let point = GeoPoint::new(-12.15, -44.99).unwrap();
        let ds = client.fetch_daily(&point, &range, &["T2M".into()]).unwrap();
        assert_eq!(ds.len(), 366);
        assert_eq!(ds.columns().len(), 1);
    }

    #[test]
    fn single_day_fetch() {
        let dir = tempfile::tempdir().unwrap();
        let range = DateRange::new(date(2023, 7, 7), date(2023, 7, 7)).unwrap();
        let transport = CannedTransport {
            body: payload_for(&range),
            hits: AtomicUsize::new(0),
        };
        let client = PowerClient::with_transport(transport, dir.path());
        let point = GeoPoint::new(0.0, 0.0).unwrap();
        let ds = client.fetch_daily(&point, &range, &["T2M".into()]).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn second_fetch_hits_cache_not_network() {
        let dir = tempfile::tempdir().unwrap();
        let range = DateRange::new(date(2023, 5, 1), date(2023, 5, 10)).unwrap();
        let transport = CannedTransport {
            body: payload_for(&range),
            hits: AtomicUsize::new(0),
        };
        let client = PowerClient::with_transport(transport, dir.path());
        let point = GeoPoint::new(-12.15, -44.99).unwrap();
        let a = client.fetch_daily(&point, &range, &["T2M".into()]).unwrap();
        let b = client.fetch_daily(&point, &range, &["T2M".into()]).unwrap();
        assert_eq!(a, b);
        assert_eq!(client.transport.hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn store_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let range = DateRange::new(date(2023, 5, 1), date(2023, 5, 5)).unwrap();
        let transport = CannedTransport {
            body: payload_for(&range),
            hits: AtomicUsize::new(0),
        };
        let client = PowerClient::with_transport(transport, dir.path());
        let point = GeoPoint::new(1.0, 2.0).unwrap();
        let params = vec!["T2M".to_string()];
        let fetched = client.fetch_daily(&point, &range, &params).unwrap();
        let key = request_key(&point, &range, &params);
        let loaded = load_fixture(&cache::csv_path(dir.path(), &key)).unwrap();
        assert_eq!(fetched, loaded);
    }

    #[test]
    fn offline_miss_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let client = PowerClient::with_transport(FailingTransport, dir.path()).offline(true);
        let range = DateRange::new(date(2023, 5, 1), date(2023, 5, 2)).unwrap();
        let point = GeoPoint::new(0.0, 0.0).unwrap();
        let err = client.fetch_daily(&point, &range, &["T2M".into()]);
        assert!(matches!(err, Err(Error::OfflineCacheMiss { .. })));
    }

    #[test]
    fn transport_failure_is_retriable_and_keyed() {
        let dir = tempfile::tempdir().unwrap();
        let client = PowerClient::with_transport(FailingTransport, dir.path());
        let range = DateRange::new(date(2023, 5, 1), date(2023, 5, 2)).unwrap();
        let point = GeoPoint::new(0.0, 0.0).unwrap();
        let params = vec!["T2M".to_string()];
        match client.fetch_daily(&point, &range, &params) {
            Err(e @ Error::Transport { .. }) => {
                assert!(e.is_retriable());
                let key = request_key(&point, &range, &params);
                assert!(e.to_string().contains(&key));
            }
            other => panic!("expected Transport error, got {other:?}"),
        }
    }

    #[test]
    fn empty_params_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let client = PowerClient::with_transport(FailingTransport, dir.path());
        let range = DateRange::new(date(2023, 5, 1), date(2023, 5, 2)).unwrap();
        let point = GeoPoint::new(0.0, 0.0).unwrap();
        assert!(client.fetch_daily(&point, &range, &[]).is_err());
    }
}
