use sha2::{Digest, Sha256};

/// Content-derived model identifier: lowercase hex SHA-256 of the raw bytes.
pub fn compute_model_id(content: &[u8]) -> String {
    hex::encode(Sha256::digest(content))
}
