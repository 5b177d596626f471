//! Dataset records.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taxonomy::{Frame, RaceEthnicity, Subject};
use crate::{Error, Result};

/// One frame-annotated news item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: String,
    pub headline: String,
    pub url: String,
    pub frame: Frame,
    /// Pre-computed extractive summary; may be empty.
    pub summary: String,
    /// First three sentences of the body; may be empty.
    pub first3: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
}

impl Article {
    pub fn validate(&self) -> Result<()> {
        if self.article_id.trim().is_empty() {
            return Err(Error::Empty("article_id"));
        }
        if self.headline.trim().is_empty() {
            return Err(Error::EmptyHeadline(self.article_id.clone()));
        }
        Ok(())
    }
}

/// Lead-image data attached to an article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub article_id: String,
    pub image_uri: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_path: Option<String>,
    /// Web-entity tags in source (rank) order.
    pub api_tags: Vec<String>,
    pub caption: String,
    pub subject_id: u32,
    pub re_id: u32,
    pub relevant: bool,
}

impl ImageRecord {
    pub fn validate(&self) -> Result<()> {
        Subject::from_id(self.subject_id)?;
        RaceEthnicity::from_id(self.re_id)?;
        Ok(())
    }

    pub fn subject(&self) -> Result<Subject> {
        Subject::from_id(self.subject_id)
    }

    pub fn race_ethnicity(&self) -> Result<RaceEthnicity> {
        RaceEthnicity::from_id(self.re_id)
    }
}
