//! User profiles and their persistence.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::{Algorithm, Argon2, Params, Version};
use parking_lot::{Mutex, RwLock};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{AuthError, AuthResult};
use crate::policy::HashCost;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceIds {
    pub login: String,
    pub mobile: String,
}

/// A registered user. Verifiers are Argon2id PHC strings with a per-user
/// random salt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub username: String,
    pub password_verifier: String,
    pub security_question: String,
    pub answer_verifier: String,
    pub email: String,
    pub devices: DeviceIds,
    pub created_at: f64,
}

pub trait UserStore: Send + Sync {
    fn get(&self, username: &str) -> Option<UserProfile>;
    /// Fails with `Conflict` when the username is taken.
    fn insert(&self, profile: UserProfile) -> AuthResult<()>;
}

#[derive(Debug, Default)]
pub struct MemoryStore(RwLock<HashMap<String, UserProfile>>);

impl UserStore for MemoryStore {
    fn get(&self, username: &str) -> Option<UserProfile> {
        self.0.read().get(username).cloned()
    }

    fn insert(&self, profile: UserProfile) -> AuthResult<()> {
        let mut map = self.0.write();
        if map.contains_key(&profile.username) {
            return Err(AuthError::Conflict);
        }
        map.insert(profile.username.clone(), profile);
        Ok(())
    }
}

/// One JSON profile per line, appended on write. On open, later lines for a
/// username replace earlier ones.
#[derive(Debug)]
pub struct JsonlStore {
    path: PathBuf,
    map: RwLock<HashMap<String, UserProfile>>,
    append: Mutex<()>,
}

impl JsonlStore {
    pub fn open(path: impl Into<PathBuf>) -> AuthResult<Self> {
        let path = path.into();
        let mut map = HashMap::new();
        if path.exists() {
            let f = std::fs::File::open(&path)?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let p: UserProfile = serde_json::from_str(&line)
                    .map_err(|e| AuthError::Storage(format!("{} line {}: {e}", path.display(), i + 1)))?;
                map.insert(p.username.clone(), p);
            }
        }
        Ok(JsonlStore { path, map: RwLock::new(map), append: Mutex::new(()) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl UserStore for JsonlStore {
    fn get(&self, username: &str) -> Option<UserProfile> {
        self.map.read().get(username).cloned()
    }

    fn insert(&self, profile: UserProfile) -> AuthResult<()> {
        let _guard = self.append.lock();
        if self.map.read().contains_key(&profile.username) {
            return Err(AuthError::Conflict);
        }
        let mut line = serde_json::to_string(&profile).map_err(|e| AuthError::Storage(e.to_string()))?;
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(line.as_bytes())?;
        f.sync_data()?;
        self.map.write().insert(profile.username.clone(), profile);
        Ok(())
    }
}

/// Produces and checks salted Argon2id verifiers.
#[derive(Debug, Clone)]
pub struct SecretHasher {
    cost: HashCost,
}

impl SecretHasher {
    pub fn new(cost: HashCost) -> AuthResult<Self> {
        Params::new(cost.memory_kib, cost.iterations, cost.parallelism, None)
            .map_err(|e| AuthError::Config(format!("argon2 parameters: {e}")))?;
        Ok(SecretHasher { cost })
    }

    pub fn hash(&self, secret: &str) -> AuthResult<String> {
        let params = Params::new(self.cost.memory_kib, self.cost.iterations, self.cost.parallelism, None)
            .map_err(|e| AuthError::Config(e.to_string()))?;
        let mut salt_bytes = [0u8; 16];
        rand::rng().fill_bytes(&mut salt_bytes);
        let salt = SaltString::encode_b64(&salt_bytes).map_err(|e| AuthError::Storage(e.to_string()))?;
        Argon2::new(Algorithm::Argon2id, Version::V0x13, params)
            .hash_password(secret.as_bytes(), &salt)
            .map(|h| h.to_string())
            .map_err(|e| AuthError::Storage(e.to_string()))
    }

    /// Cost parameters are read from the verifier itself.
    pub fn verify(&self, secret: &str, verifier: &str) -> bool {
        PasswordHash::new(verifier)
            .map(|h| Argon2::default().verify_password(secret.as_bytes(), &h).is_ok())
            .unwrap_or(false)
    }
}

/// Security answers are compared case- and whitespace-insensitively.
pub fn normalize_answer(answer: &str) -> String {
    answer.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}
