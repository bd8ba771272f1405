//! Client for an OpenAI-compatible chat-completions endpoint with image input.

use super::capture::CaptureRequest;
use base64::Engine;
use serde_json::{json, Value};
use std::time::Duration;
use thiserror::Error;

pub const URL_ENV: &str = "ENVISION_VLM_URL";
pub const KEY_ENV: &str = "ENVISION_VLM_KEY";
pub const MODEL_ENV: &str = "ENVISION_VLM_MODEL";
pub const DEFAULT_MODEL: &str = "gpt-4o";

/// Instruction sent with every captured view.
pub const DESCRIBE_PROMPT: &str = "Please describe the scene in no more than 2 sentences or around 30 words. Start the description with 'The scene in front of you'";

#[derive(Debug, Error)]
pub enum VlmError {
    #[error("environment variable {0} is not set")]
    MissingConfig(&'static str),
    #[error("request failed: {0}")]
    Http(String),
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response: {0}")]
    Response(String),
}

#[derive(Debug, Clone)]
pub struct VlmConfig {
    /// Full URL of the chat-completions endpoint.
    pub url: String,
    pub api_key: String,
    pub model: String,
    pub timeout: Duration,
}

impl VlmConfig {
    pub fn new(url: impl Into<String>, api_key: impl Into<String>) -> Self {
        VlmConfig {
            url: url.into(),
            api_key: api_key.into(),
            model: DEFAULT_MODEL.to_string(),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn from_env() -> Result<Self, VlmError> {
        let url = std::env::var(URL_ENV).map_err(|_| VlmError::MissingConfig(URL_ENV))?;
        let key = std::env::var(KEY_ENV).map_err(|_| VlmError::MissingConfig(KEY_ENV))?;
        let mut cfg = VlmConfig::new(url, key);
        if let Ok(model) = std::env::var(MODEL_ENV) {
            cfg.model = model;
        }
        Ok(cfg)
    }
}

pub struct VlmClient {
    config: VlmConfig,
    http: reqwest::blocking::Client,
}

impl VlmClient {
    pub fn new(config: VlmConfig) -> Result<Self, VlmError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| VlmError::Http(e.to_string()))?;
        Ok(VlmClient { config, http })
    }

    /// Chat request body: one user message with the prompt and the PNG image.
    pub fn request_body(&self, capture: &CaptureRequest) -> Value {
        let encoded = base64::engine::general_purpose::STANDARD.encode(capture.png_bytes());
        json!({
            "model": self.config.model,
            "messages": [{
                "role": "user",
                "content": [
                    {"type": "text", "text": DESCRIBE_PROMPT},
                    {"type": "image_url", "image_url": {"url": format!("data:image/png;base64,{encoded}")}}
                ]
            }],
            "max_tokens": 120
        })
    }

    pub fn describe(&self, capture: &CaptureRequest) -> Result<String, VlmError> {
        let resp = self
            .http
            .post(&self.config.url)
            .bearer_auth(&self.config.api_key)
            .json(&self.request_body(capture))
            .send()
            .map_err(|e| VlmError::Http(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| VlmError::Http(e.to_string()))?;
        if !status.is_success() {
            return Err(VlmError::Status {
                status: status.as_u16(),
                body,
            });
        }
        parse_completion(&body)
    }
}

/// Extracts the first choice's message text.
pub fn parse_completion(body: &str) -> Result<String, VlmError> {
    let v: Value = serde_json::from_str(body).map_err(|e| VlmError::Response(e.to_string()))?;
    let content = &v["choices"][0]["message"]["content"];
    let text = match content {
        Value::String(s) => s.clone(),
        // some servers return content parts
        Value::Array(parts) => parts
            .iter()
            .filter_map(|p| p["text"].as_str())
            .collect::<Vec<_>>()
            .join(""),
        _ => {
            return Err(VlmError::Response(
                "missing choices[0].message.content".into(),
            ))
        }
    };
    let text = text.trim().to_string();
    if text.is_empty() {
        return Err(VlmError::Response("empty description".into()));
    }
    Ok(text)
}
