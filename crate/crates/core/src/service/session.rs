//! Password hashing and bearer sessions.

use std::collections::HashMap;
use std::sync::Mutex;

use argon2::password_hash::phc::PasswordHash;
use argon2::{Argon2, PasswordHasher, PasswordVerifier};
use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde::Serialize;

use crate::clock::Timestamp;
use crate::domain::{DomainError, UserId};

pub const SESSION_TTL_HOURS: i64 = 24;

/// Salted argon2id hash in PHC string form.
pub fn hash_password(password: &str) -> Result<String, DomainError> {
    let hash: PasswordHash = Argon2::default()
        .hash_password(password.as_bytes())
        .map_err(|e| DomainError::InvalidArgument(format!("cannot hash password: {e}")))?;
    Ok(hash.to_string())
}

pub fn verify_password(password: &str, stored: &str) -> bool {
    PasswordHash::new(stored)
        .map(|h| Argon2::default().verify_password(password.as_bytes(), &h).is_ok())
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionToken {
    pub token: String,
    pub user: UserId,
    pub expires_at: Timestamp,
}

/// 128 random bits, URL-safe base64.
pub fn new_token() -> String {
    URL_SAFE_NO_PAD.encode(rand::random::<[u8; 16]>())
}

#[derive(Debug, Default)]
pub struct SessionTable {
    sessions: Mutex<HashMap<String, SessionToken>>,
}

impl SessionTable {
    pub fn issue(&self, user: UserId, now: Timestamp) -> SessionToken {
        let session = SessionToken {
            token: new_token(),
            user,
            expires_at: now + chrono::Duration::hours(SESSION_TTL_HOURS),
        };
        let mut table = self.sessions.lock().expect("session table poisoned");
        table.retain(|_, s| s.expires_at > now);
        table.insert(session.token.clone(), session.clone());
        session
    }

    /// The session for `token` if it exists and has not expired.
    pub fn resolve(&self, token: &str, now: Timestamp) -> Option<SessionToken> {
        let mut table = self.sessions.lock().expect("session table poisoned");
        match table.get(token) {
            Some(s) if s.expires_at > now => Some(s.clone()),
            Some(_) => {
                table.remove(token);
                None
            }
            None => None,
        }
    }
}
