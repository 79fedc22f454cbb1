use std::io::Read;
use std::time::Duration;

use super::FetchError;

/// Blocking byte fetch. Implementations must be shareable across download workers.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(timeout)
            .user_agent(concat!("specpower/", env!("CARGO_PKG_VERSION")))
            .build();
        Self { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(60))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        match self.agent.get(url).call() {
            Ok(resp) => {
                let mut buf = Vec::new();
                resp.into_reader()
                    .take(64 * 1024 * 1024)
                    .read_to_end(&mut buf)
                    .map_err(|e| FetchError::Network {
                        url: url.to_string(),
                        message: e.to_string(),
                    })?;
                Ok(buf)
            }
            Err(ureq::Error::Status(status, _)) => Err(FetchError::Status {
                url: url.to_string(),
                status,
            }),
            Err(ureq::Error::Transport(t)) => Err(FetchError::Network {
                url: url.to_string(),
                message: t.to_string(),
            }),
        }
    }
}

/// Refuses every request; used for `--offline` runs against a warm cache.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        Err(FetchError::Offline { url: url.to_string() })
    }
}
