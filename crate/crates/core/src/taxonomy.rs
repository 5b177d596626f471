//! Label spaces and modality descriptions.
//!
//! Frames carry ids 1..=9 in the order of the corpus statistics table. Subject
//! categories occupy SRE positions 1..=16 and race/ethnicity categories
//! positions 17..=19.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One of the nine gun-violence news frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub enum Frame {
    Politics = 1,
    PublicOpinion = 2,
    GunControl = 3,
    SchoolSafety = 4,
    EconomicConsequences = 5,
    RaceEthnicity = 6,
    MentalHealth = 7,
    GunRights = 8,
    SocietyCulture = 9,
}

impl Frame {
    pub const COUNT: usize = 9;

    /// All frames in id order.
    pub const ALL: [Frame; 9] = [
        Frame::Politics,
        Frame::PublicOpinion,
        Frame::GunControl,
        Frame::SchoolSafety,
        Frame::EconomicConsequences,
        Frame::RaceEthnicity,
        Frame::MentalHealth,
        Frame::GunRights,
        Frame::SocietyCulture,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    /// Zero-based class index used by the classifiers.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1..=9 => Ok(Self::ALL[id as usize - 1]),
            _ => Err(Error::FrameId(id)),
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// Canonical display name.
    pub fn name(self) -> &'static str {
        match self {
            Frame::Politics => "Politics",
            Frame::PublicOpinion => "Public Opinion",
            Frame::GunControl => "Gun Control/Regulation",
            Frame::SchoolSafety => "School/Public Space Safety",
            Frame::EconomicConsequences => "Economic Consequences",
            Frame::RaceEthnicity => "Race/Ethnicity",
            Frame::MentalHealth => "Mental Health",
            Frame::GunRights => "2nd Amendment/Gun Rights",
            Frame::SocietyCulture => "Society/Culture",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|f| f.name().eq_ignore_ascii_case(name.trim())).ok_or_else(|| Error::FrameName(name.to_string()))
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Frame> for u32 {
    fn from(f: Frame) -> u32 {
        f.id()
    }
}

impl TryFrom<u32> for Frame {
    type Error = Error;

    fn try_from(id: u32) -> Result<Self> {
        Frame::from_id(id)
    }
}

/// Central subject of a lead image (SRE positions 1..=16).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Shooter = 1,
    GunActivist = 2,
    Victim = 3,
    Politician = 4,
    LawEnforcement = 5,
    Firearm = 6,
    GunStore = 7,
    Demonstrators = 8,
    ProtestSigns = 9,
    Memorial = 10,
    CrimeScene = 11,
    LegislativeBuilding = 12,
    School = 13,
    Nra = 14,
    Company = 15,
    Other = 16,
}

impl Subject {
    pub const ALL: [Subject; 16] = [
        Subject::Shooter,
        Subject::GunActivist,
        Subject::Victim,
        Subject::Politician,
        Subject::LawEnforcement,
        Subject::Firearm,
        Subject::GunStore,
        Subject::Demonstrators,
        Subject::ProtestSigns,
        Subject::Memorial,
        Subject::CrimeScene,
        Subject::LegislativeBuilding,
        Subject::School,
        Subject::Nra,
        Subject::Company,
        Subject::Other,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1..=16 => Ok(Self::ALL[id as usize - 1]),
            _ => Err(Error::SubjectId(id)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subject::Shooter => "gun shooter/suspect",
            Subject::GunActivist => "gun hobbyist/activist",
            Subject::Victim => "victim/family/bystanders",
            Subject::Politician => "politicians",
            Subject::LawEnforcement => "law enforcement",
            Subject::Firearm => "firearm/bullets",
            Subject::GunStore => "gun/hunting gear store or gun show",
            Subject::Demonstrators => "demonstrators/demonstrations",
            Subject::ProtestSigns => "protest signs",
            Subject::Memorial => "memorials",
            Subject::CrimeScene => "crime scene/police cars",
            Subject::LegislativeBuilding => "legislative buildings/courthouses",
            Subject::School => "school/campus/students",
            Subject::Nra => "NRA objects/representatives",
            Subject::Company => "company buildings/logos",
            Subject::Other => "other",
        }
    }
}

/// Race/ethnicity relation of the image (SRE positions 17..=19).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RaceEthnicity {
    None = 17,
    MinorityGroup = 18,
    HateGroup = 19,
}

impl RaceEthnicity {
    pub const ALL: [RaceEthnicity; 3] = [RaceEthnicity::None, RaceEthnicity::MinorityGroup, RaceEthnicity::HateGroup];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            17..=19 => Ok(Self::ALL[id as usize - 17]),
            _ => Err(Error::RaceEthnicityId(id)),
        }
    }
}

/// Prediction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Frame,
    Relevance,
}

impl Task {
    pub fn num_classes(self) -> usize {
        match self {
            Task::Frame => Frame::COUNT,
            Task::Relevance => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Frame => "frame",
            Task::Relevance => "relevance",
        }
    }

    /// External id of a class index: frame ids 1..=9, relevance 0 (irrelevant) / 1 (relevant).
    pub fn class_id(self, index: usize) -> u32 {
        match self {
            Task::Frame => index as u32 + 1,
            Task::Relevance => index as u32,
        }
    }

    pub fn class_name(self, index: usize) -> &'static str {
        match self {
            Task::Frame => Frame::from_index(index).map(Frame::name).unwrap_or("?"),
            Task::Relevance => match index {
                0 => "irrelevant",
                1 => "relevant",
                _ => "?",
            },
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frame" => Ok(Task::Frame),
            "relevance" => Ok(Task::Relevance),
            other => Err(Error::InvalidModality(alloc::format!("unknown task {other:?}"))),
        }
    }
}

/// One input component of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Headline,
    Api,
    Caption,
    Summary,
    First3,
    Sre,
    Image,
    FrameLabel,
}

impl Part {
    pub const ALL: [Part; 8] =
        [Part::Headline, Part::Api, Part::Caption, Part::Summary, Part::First3, Part::Sre, Part::Image, Part::FrameLabel];

    pub fn key(self) -> &'static str {
        match self {
            Part::Headline => "headline",
            Part::Api => "api",
            Part::Caption => "caption",
            Part::Summary => "summary",
            Part::First3 => "first3",
            Part::Sre => "sre",
            Part::Image => "resnet",
            Part::FrameLabel => "frame",
        }
    }

    pub fn from_key(key: &str) -> Result<Self> {
        match key.trim() {
            "headline" => Ok(Part::Headline),
            "api" => Ok(Part::Api),
            "caption" => Ok(Part::Caption),
            "summary" => Ok(Part::Summary),
            "first3" | "3sentences" => Ok(Part::First3),
            "sre" => Ok(Part::Sre),
            "resnet" | "image" => Ok(Part::Image),
            "frame" | "frame_label" => Ok(Part::FrameLabel),
            other => Err(Error::UnknownPart(other.to_string())),
        }
    }

    /// Parts that become text fed to the text encoder.
    pub fn is_text(self) -> bool {
        matches!(self, Part::Headline | Part::Api | Part::Caption | Part::Summary | Part::First3 | Part::FrameLabel)
    }

    /// Parts derived from the lead image record.
    pub fn needs_image_record(self) -> bool {
        matches!(self, Part::Api | Part::Caption | Part::Sre | Part::Image)
    }
}

/// Classifier family implied by a modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    /// Constant predictor of the training majority class.
    Majority,
    TextFineTune,
    ImageClassifier,
    SreLogReg,
    Fusion,
    SreAugmentedText,
}

/// Ordered set of input parts for a task.
///
/// The canonical text form joins part keys with `+`, e.g. `headline+api` or
/// `resnet+headline+caption`. The empty part list is spelled `majority` and
/// denotes the constant baseline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModalitySpec {
    task: Task,
    parts: Vec<Part>,
}

impl ModalitySpec {
    pub fn new(task: Task, parts: Vec<Part>) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            if parts[..i].contains(p) {
                return Err(Error::InvalidModality(alloc::format!("part {} repeated", p.key())));
            }
        }
        if task == Task::Frame && parts.contains(&Part::FrameLabel) {
            return Err(Error::InvalidModality("frame label is the prediction target of the frame task".to_string()));
        }
        if parts.contains(&Part::Image) && parts.contains(&Part::Sre) {
            return Err(Error::InvalidModality("no classifier combines raw images with SRE annotations".to_string()));
        }
        if parts.iter().all(|p| *p == Part::FrameLabel) && !parts.is_empty() {
            return Err(Error::InvalidModality("frame label alone is not a modality".to_string()));
        }
        Ok(Self { task, parts })
    }

    /// Parses a canonical key such as `headline+api+frame`.
    pub fn parse(task: Task, key: &str) -> Result<Self> {
        let key = key.trim();
        if key == "majority" {
            return Self::new(task, Vec::new());
        }
        if key.is_empty() {
            return Err(Error::InvalidModality("empty modality key".to_string()));
        }
        let parts = key.split('+').map(Part::from_key).collect::<Result<Vec<_>>>()?;
        Self::new(task, parts)
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn contains(&self, part: Part) -> bool {
        self.parts.contains(&part)
    }

    pub fn key(&self) -> String {
        if self.parts.is_empty() {
            return "majority".to_string();
        }
        let keys: Vec<&str> = self.parts.iter().map(|p| p.key()).collect();
        keys.join("+")
    }

    pub fn needs_image_record(&self) -> bool {
        self.parts.iter().any(|p| p.needs_image_record())
    }

    /// Text parts other than the frame label.
    pub fn has_content_text(&self) -> bool {
        self.parts.iter().any(|p| p.is_text() && *p != Part::FrameLabel)
    }

    pub fn has_text(&self) -> bool {
        self.parts.iter().any(|p| p.is_text())
    }

    pub fn head_kind(&self) -> HeadKind {
        if self.parts.is_empty() {
            HeadKind::Majority
        } else if self.contains(Part::Image) {
            if self.has_text() {
                HeadKind::Fusion
            } else {
                HeadKind::ImageClassifier
            }
        } else if self.contains(Part::Sre) {
            if self.has_content_text() {
                HeadKind::SreAugmentedText
            } else {
                HeadKind::SreLogReg
            }
        } else {
            HeadKind::TextFineTune
        }
    }
}

impl fmt::Display for ModalitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// The thirteen frame-task modalities in the column order of the main results table.
pub const FRAME_TABLE_MODALITIES: [&str; 13] = [
    "resnet",
    "sre",
    "headline",
    "api",
    "caption",
    "headline+api",
    "headline+caption",
    "headline+summary",
    "headline+first3",
    "resnet+headline",
    "resnet+headline+api",
    "resnet+headline+caption",
    "headline+sre",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_ids_are_a_bijection() {
        for (i, f) in Frame::ALL.iter().enumerate() {
            assert_eq!(f.id() as usize, i + 1);
            assert_eq!(Frame::from_id(f.id()).unwrap(), *f);
            assert_eq!(Frame::from_name(f.name()).unwrap(), *f);
            assert_eq!(Frame::from_index(f.index()), Some(*f));
        }
        assert!(Frame::from_id(0).is_err());
        assert!(Frame::from_id(10).is_err());
    }

    #[test]
    fn sre_id_ranges() {
        assert!(Subject::from_id(0).is_err());
        assert_eq!(Subject::from_id(16).unwrap(), Subject::Other);
        assert!(RaceEthnicity::from_id(16).is_err());
        assert_eq!(RaceEthnicity::from_id(19).unwrap(), RaceEthnicity::HateGroup);
    }

    #[test]
    fn modality_keys_round_trip() {
        for key in FRAME_TABLE_MODALITIES {
            let spec = ModalitySpec::parse(Task::Frame, key).unwrap();
            assert_eq!(spec.key(), key);
        }
        let spec = ModalitySpec::parse(Task::Relevance, "headline+api+frame").unwrap();
        assert_eq!(spec.head_kind(), HeadKind::TextFineTune);
    }

    #[test]
    fn modality_validation() {
        assert!(ModalitySpec::parse(Task::Frame, "headline+frame").is_err());
        assert!(ModalitySpec::parse(Task::Frame, "headline+headline").is_err());
        assert!(ModalitySpec::parse(Task::Frame, "resnet+sre").is_err());
        assert!(ModalitySpec::parse(Task::Frame, "bogus").is_err());
        assert!(ModalitySpec::parse(Task::Frame, "").is_err());
    }

    #[test]
    fn head_kinds() {
        let kind = |task, key| ModalitySpec::parse(task, key).unwrap().head_kind();
        assert_eq!(kind(Task::Frame, "resnet"), HeadKind::ImageClassifier);
        assert_eq!(kind(Task::Frame, "sre"), HeadKind::SreLogReg);
        assert_eq!(kind(Task::Relevance, "sre+frame"), HeadKind::SreLogReg);
        assert_eq!(kind(Task::Frame, "headline+sre"), HeadKind::SreAugmentedText);
        assert_eq!(kind(Task::Frame, "resnet+headline+api"), HeadKind::Fusion);
        assert_eq!(kind(Task::Frame, "headline+summary"), HeadKind::TextFineTune);
        assert_eq!(kind(Task::Relevance, "majority"), HeadKind::Majority);
    }
}
