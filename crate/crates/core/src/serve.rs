//! JSON inference endpoint: `POST /predict`, `GET /health`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::classifiers::{Classifier, Diagnosis, Model};
use crate::data_io::{decode_gray, decode_rgb};
use crate::error::{Error, Result};
use crate::pipeline::{extract_lung, extract_melanoma, ExtractConfig, Pipeline};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    #[serde(default)]
    pub features: Option<BTreeMap<String, f64>>,
    /// Base64-encoded PNG/PGM/PPM bytes.
    #[serde(default)]
    pub image: Option<String>,
    #[serde(default)]
    pub pipeline: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub label: Diagnosis,
    pub score: f64,
    pub model_kind: String,
    pub feature_echo: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub model_kind: String,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stage: Option<String>,
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.into(),
                message: message.into(),
                stage: None,
            },
        }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_request", message)
    }

    fn unprocessable(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    fn extraction(e: Error) -> Self {
        let stage = match &e {
            Error::Extraction { stage, .. } => stage.to_string(),
            _ => "features".to_string(),
        };
        let mut err = Self::unprocessable("extraction_failed", e.to_string());
        err.body.stage = Some(stage);
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

/// Shared, read-only service state.
#[derive(Debug)]
pub struct AppState {
    pub model: Model,
    pub extract: ExtractConfig,
}

impl AppState {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            extract: ExtractConfig::default(),
        }
    }

    /// Pipeline whose feature schema the model was trained on.
    pub fn pipeline(&self) -> Option<Pipeline> {
        Pipeline::for_features(self.model.feature_names())
    }

    fn features_from_map(&self, map: &BTreeMap<String, f64>) -> std::result::Result<Vec<f64>, ApiError> {
        let names = self.model.feature_names();
        if let Some(extra) = map.keys().find(|k| !names.contains(k)) {
            return Err(ApiError::unprocessable("feature_mismatch", format!("unknown feature `{extra}`")));
        }
        names
            .iter()
            .map(|n| {
                map.get(n)
                    .copied()
                    .ok_or_else(|| ApiError::unprocessable("feature_mismatch", format!("missing feature `{n}`")))
            })
            .collect()
    }

    fn features_from_image(&self, encoded: &str, pipeline: Option<&str>) -> std::result::Result<Vec<f64>, ApiError> {
        let requested: Pipeline = pipeline
            .ok_or_else(|| ApiError::malformed("image requests need a `pipeline`"))?
            .parse()
            .map_err(|e: Error| ApiError::malformed(e.to_string()))?;
        if self.pipeline() != Some(requested) {
            return Err(ApiError::unprocessable(
                "feature_mismatch",
                format!("model was not trained on {requested} features"),
            ));
        }
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(encoded.trim())
            .map_err(|e| ApiError::malformed(format!("image is not valid base64: {e}")))?;
        let decoded = |e: Error| ApiError::extraction(Error::at_stage("decode")(e));
        match requested {
            Pipeline::Lung => {
                let img = decode_gray(&bytes).map_err(decoded)?;
                Ok(extract_lung(&img, &self.extract.lung).map_err(ApiError::extraction)?.to_vec())
            }
            Pipeline::Melanoma => {
                let img = decode_rgb(&bytes).map_err(decoded)?;
                Ok(extract_melanoma(&img, None, &self.extract.melanoma)
                    .map_err(ApiError::extraction)?
                    .to_vec())
            }
            Pipeline::Breast => Err(ApiError::unprocessable(
                "feature_mismatch",
                "the breast pipeline takes features, not images",
            )),
        }
    }

    /// Answers one request; pure in `(model, request)`.
    pub fn answer(&self, req: &PredictRequest) -> std::result::Result<PredictResponse, ApiErrorBody> {
        self.answer_inner(req).map_err(|e| ApiErrorBody {
            status: e.status.as_u16(),
            error: e.body,
        })
    }

    fn answer_inner(&self, req: &PredictRequest) -> std::result::Result<PredictResponse, ApiError> {
        let row = match (&req.features, &req.image) {
            (Some(map), None) => self.features_from_map(map)?,
            (None, Some(img)) => self.features_from_image(img, req.pipeline.as_deref())?,
            _ => return Err(ApiError::malformed("exactly one of `features` and `image` is required")),
        };
        let p = self.model.predict(&row).map_err(|e| match e.kind() {
            crate::error::ErrorKind::Numeric => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "numeric", e.to_string()),
            _ => ApiError::unprocessable("feature_mismatch", e.to_string()),
        })?;
        Ok(PredictResponse {
            label: p.label,
            score: p.score,
            model_kind: self.model.kind().as_str().to_string(),
            feature_echo: self.model.feature_names().iter().cloned().zip(row).collect(),
        })
    }
}

/// Error status and body, for callers outside HTTP.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiErrorBody {
    pub status: u16,
    pub error: ErrorBody,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".into(),
        model_kind: state.model.kind().as_str().into(),
        feature_names: state.model.feature_names().to_vec(),
    })
}

async fn predict(State(state): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> Response {
    let json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(';').next().is_some_and(|m| m.trim().eq_ignore_ascii_case("application/json")));
    if !json {
        return ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "unsupported_media_type",
            "Content-Type must be application/json",
        )
        .into_response();
    }
    let req: PredictRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return ApiError::malformed(format!("invalid JSON body: {e}")).into_response(),
    };
    // feature extraction is CPU-bound
    let result = tokio::task::spawn_blocking(move || state.answer_inner(&req)).await;
    match result {
        Ok(Ok(resp)) => Json(resp).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()).into_response(),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/predict", post(predict))
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(state: AppState, addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(addr.to_string(), e))?;
    eprintln!("listening on {}", listener.local_addr().map_err(|e| Error::io(addr.to_string(), e))?);
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}
