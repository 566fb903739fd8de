use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::error::{AuthError, AuthResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MailMessage {
    pub to: String,
    pub subject: String,
    pub body: String,
}

/// Outbound mail.
pub trait Mailer: Send + Sync {
    fn send(&self, msg: &MailMessage) -> AuthResult<()>;
}

#[derive(Debug, Default)]
pub struct StdoutMailer;

impl Mailer for StdoutMailer {
    fn send(&self, msg: &MailMessage) -> AuthResult<()> {
        println!("To: {}\nSubject: {}\n\n{}\n", msg.to, msg.subject, msg.body);
        Ok(())
    }
}

/// Writes each message as its own JSON file, `000001.json`, `000002.json`, ...
#[derive(Debug)]
pub struct SpoolMailer {
    dir: PathBuf,
    seq: AtomicU64,
}

impl SpoolMailer {
    pub fn new(dir: impl Into<PathBuf>) -> AuthResult<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let existing = std::fs::read_dir(&dir)?.filter_map(|e| e.ok()).count() as u64;
        Ok(SpoolMailer { dir, seq: AtomicU64::new(existing) })
    }
}

impl Mailer for SpoolMailer {
    fn send(&self, msg: &MailMessage) -> AuthResult<()> {
        let n = self.seq.fetch_add(1, Ordering::SeqCst) + 1;
        let path = self.dir.join(format!("{n:06}.json"));
        let body = serde_json::to_vec_pretty(msg).map_err(|e| AuthError::Mail(e.to_string()))?;
        std::fs::write(path, body).map_err(|e| AuthError::Mail(e.to_string()))
    }
}

/// Keeps messages in memory.
#[derive(Debug, Default)]
pub struct MemoryMailer(Mutex<Vec<MailMessage>>);

impl MemoryMailer {
    pub fn messages(&self) -> Vec<MailMessage> {
        self.0.lock().clone()
    }
}

impl Mailer for MemoryMailer {
    fn send(&self, msg: &MailMessage) -> AuthResult<()> {
        self.0.lock().push(msg.clone());
        Ok(())
    }
}
