//! Assembles a [`Pipeline`] from plain settings, for the CLI and bindings.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::GenerationProfile;
use crate::error::BackendError;
use crate::llm::{ApiKey, LanguageModel, LlmEndpointConfig, NoThinkMode, OpenAiCompatClient, ScriptedLlm};
use crate::pipeline::Pipeline;
use crate::prompts::PromptKit;
use crate::retrieval::{FixtureProvider, HttpFetcher, NoSearch, PageFetcher, SearchProvider, SerperProvider};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub llm_base_url: String,
    pub llm_model: String,
    pub llm_api_key: Option<String>,
    pub no_think_mode: NoThinkMode,
    pub profile: GenerationProfile,
    pub serper_api_key: Option<String>,
    pub serper_endpoint: Option<String>,
    /// Serve searches and pages from this fixture directory.
    pub fixtures_dir: Option<PathBuf>,
    /// Use the built-in scripted model; without fixtures, search is empty.
    pub offline: bool,
    pub prompts_dir: Option<PathBuf>,
    pub ignore_robots: bool,
    pub thinking_previews: bool,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            llm_base_url: "http://localhost:11434/v1".into(),
            llm_model: "qwen3:4b".into(),
            llm_api_key: None,
            no_think_mode: NoThinkMode::default(),
            profile: GenerationProfile::default(),
            serper_api_key: None,
            serper_endpoint: None,
            fixtures_dir: None,
            offline: false,
            prompts_dir: None,
            ignore_robots: false,
            thinking_previews: false,
        }
    }
}

fn non_empty(s: &Option<String>) -> Option<&str> {
    s.as_deref().filter(|s| !s.is_empty())
}

impl BackendConfig {
    pub fn build(&self) -> Result<Pipeline, BackendError> {
        let settings = self.profile.settings();
        let llm: Arc<dyn LanguageModel> = if self.offline {
            Arc::new(ScriptedLlm::offline())
        } else {
            let mut config = LlmEndpointConfig::new(&self.llm_base_url, self.llm_model.clone())?;
            config.api_key = non_empty(&self.llm_api_key).map(ApiKey::new);
            config.settings = settings.clone();
            config.no_think = self.no_think_mode;
            Arc::new(OpenAiCompatClient::new(config)?)
        };
        let (search, fetcher): (Arc<dyn SearchProvider>, Arc<dyn PageFetcher>) =
            match (&self.fixtures_dir, non_empty(&self.serper_api_key)) {
                (Some(dir), _) => {
                    let p = Arc::new(FixtureProvider::open(dir)?);
                    (p.clone(), p)
                }
                (None, Some(key)) => {
                    let mut provider = SerperProvider::new(key);
                    if let Some(endpoint) = &self.serper_endpoint {
                        provider = provider.with_endpoint(endpoint)?;
                    }
                    let fetcher = if self.ignore_robots {
                        HttpFetcher::default().ignore_robots()
                    } else {
                        HttpFetcher::default()
                    };
                    (Arc::new(provider), Arc::new(fetcher))
                }
                (None, None) if self.offline => (Arc::new(NoSearch), Arc::new(NoSearch)),
                (None, None) => return Err(BackendError::NoSearchBackend),
            };
        let mut pipeline = Pipeline::new(llm, search, fetcher)
            .with_generation(settings)
            .with_thinking_previews(self.thinking_previews);
        if let Some(dir) = &self.prompts_dir {
            pipeline = pipeline.with_prompts(PromptKit::from_dir(dir)?);
        }
        Ok(pipeline)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_a_search_backend() {
        assert!(matches!(
            BackendConfig::default().build(),
            Err(BackendError::NoSearchBackend)
        ));
        let offline = BackendConfig {
            offline: true,
            ..BackendConfig::default()
        };
        assert!(offline.build().is_ok());
        let parsed: BackendConfig = serde_json::from_str(r#"{"offline": true, "profile": "o4-mini"}"#).unwrap();
        assert_eq!(parsed.profile, GenerationProfile::O4Mini);
        assert!(serde_json::from_str::<BackendConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
