//! Record sinks: newline-delimited JSON to a writer, an in-memory vector,
//! and an optional HTTP POST sink that ships the same lines in batches.

use std::io::{BufRead, Write};
use std::net::TcpStream;

use thiserror::Error;

use super::InvocationRecord;

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("sink I/O failed after {written} records: {source}")]
    Io {
        written: u64,
        #[source]
        source: std::io::Error,
    },
    #[error("record serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("http sink: {0}")]
    Http(String),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Accepts appends from the single campaign driver.
pub trait RecordSink {
    fn write_record(&mut self, record: &InvocationRecord) -> Result<(), SinkError>;
    fn flush(&mut self) -> Result<(), SinkError>;
    /// Records successfully handed off so far.
    fn written(&self) -> u64;
}

/// Newline-delimited JSON, one record per line.
pub struct JsonlSink<W: Write> {
    writer: W,
    written: u64,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(writer: W) -> Self {
        JsonlSink { writer, written: 0 }
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

impl<W: Write> RecordSink for JsonlSink<W> {
    fn write_record(&mut self, record: &InvocationRecord) -> Result<(), SinkError> {
        let line = serde_json::to_string(record)?;
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .map_err(|source| SinkError::Io {
                written: self.written,
                source,
            })?;
        self.written += 1;
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SinkError> {
        self.writer.flush().map_err(|source| SinkError::Io {
            written: self.written,
            source,
        })
    }

    fn written(&self) -> u64 {
        self.written
    }
}

/// Collects records into a borrowed vector.
pub struct VecSink<'a> {
    records: &'a mut Vec<InvocationRecord>,
}

impl<'a> VecSink<'a> {
    pub fn new(records: &'a mut Vec<InvocationRecord>) -> Self {
        VecSink { records }
    }
}

impl RecordSink for VecSink<'_> {
    fn write_record(&mut self, record: &InvocationRecord) -> Result<(), SinkError> {
        self.records.push(record.clone());
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SinkError> {
        Ok(())
    }

    fn written(&self) -> u64 {
        self.records.len() as u64
    }
}

/// POSTs newline-delimited JSON batches to a plain-http endpoint.
///
/// The client is deliberately minimal (no TLS, no redirects): the sink
/// exists for pushing batches to a collector on a trusted network, and the
/// test suite exercises it against a loopback stub.
pub struct HttpSink {
    host: String,
    port: u16,
    path: String,
    batch: Vec<String>,
    batch_size: usize,
    written: u64,
}

impl HttpSink {
    pub const DEFAULT_BATCH_SIZE: usize = 100;

    /// Accepts `http://host:port/path` URLs.
    pub fn new(url: &str) -> Result<Self, SinkError> {
        let rest = url
            .strip_prefix("http://")
            .ok_or_else(|| SinkError::Http(format!("only http:// URLs are supported: {url}")))?;
        let (authority, path) = match rest.find('/') {
            Some(idx) => (&rest[..idx], &rest[idx..]),
            None => (rest, "/"),
        };
        let (host, port) = match authority.rsplit_once(':') {
            Some((host, port)) => (
                host.to_string(),
                port.parse::<u16>()
                    .map_err(|_| SinkError::Http(format!("bad port in {url}")))?,
            ),
            None => (authority.to_string(), 80),
        };
        if host.is_empty() {
            return Err(SinkError::Http(format!("missing host in {url}")));
        }
        Ok(HttpSink {
            host,
            port,
            path: path.to_string(),
            batch: Vec::new(),
            batch_size: Self::DEFAULT_BATCH_SIZE,
            written: 0,
        })
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }

    fn post_batch(&mut self) -> Result<(), SinkError> {
        if self.batch.is_empty() {
            return Ok(());
        }
        let body = format!("{}\n", self.batch.join("\n"));
        let request = format!(
            "POST {} HTTP/1.1\r\nHost: {}\r\nContent-Type: application/x-ndjson\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            self.path,
            self.host,
            body.len(),
            body
        );
        let mut stream = TcpStream::connect((self.host.as_str(), self.port))
            .map_err(|e| SinkError::Http(format!("connect failed: {e}")))?;
        stream
            .write_all(request.as_bytes())
            .map_err(|e| SinkError::Http(format!("write failed: {e}")))?;
        let mut response = String::new();
        std::io::Read::read_to_string(&mut stream, &mut response)
            .map_err(|e| SinkError::Http(format!("read failed: {e}")))?;
        let status = response.lines().next().unwrap_or_default();
        if !(status.contains(" 200 ") || status.ends_with(" 200") || status.contains(" 204")) {
            return Err(SinkError::Http(format!("unexpected status: {status}")));
        }
        self.written += self.batch.len() as u64;
        self.batch.clear();
        Ok(())
    }
}

impl RecordSink for HttpSink {
    fn write_record(&mut self, record: &InvocationRecord) -> Result<(), SinkError> {
        self.batch.push(serde_json::to_string(record)?);
        if self.batch.len() >= self.batch_size {
            self.post_batch()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SinkError> {
        self.post_batch()
    }

    fn written(&self) -> u64 {
        self.written
    }
}

/// Write a dataset to a sink; returns the number of records written.
pub fn persist(records: &[InvocationRecord], sink: &mut dyn RecordSink) -> Result<u64, SinkError> {
    for record in records {
        sink.write_record(record)?;
    }
    sink.flush()?;
    Ok(sink.written())
}

/// Load a JSONL dataset, reporting the 1-based line number of any malformed
/// record.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<InvocationRecord>, DatasetError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| DatasetError::Malformed { line: idx + 1, source })?;
        records.push(record);
    }
    Ok(records)
}
