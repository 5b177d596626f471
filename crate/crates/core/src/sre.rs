//! Subject / race-ethnicity one-hot features.

use serde::{Deserialize, Serialize};

use crate::taxonomy::{RaceEthnicity, Subject};
use crate::Result;

/// Length of the SRE feature vector.
pub const SRE_LEN: usize = 19;

/// 19-dimensional binary feature vector. Position `p` (1-based) is stored at index `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SreVector([u8; SRE_LEN]);

impl SreVector {
    pub fn new(subject: Subject, re: RaceEthnicity) -> Self {
        let mut values = [0u8; SRE_LEN];
        values[subject.id() as usize - 1] = 1;
        values[re.id() as usize - 1] = 1;
        SreVector(values)
    }

    pub fn values(&self) -> &[u8; SRE_LEN] {
        &self.0
    }

    /// Value at a 1-based position.
    pub fn at(&self, position: usize) -> u8 {
        self.0[position - 1]
    }

    pub fn to_f64(&self) -> [f64; SRE_LEN] {
        self.0.map(f64::from)
    }

    pub fn to_f32(&self) -> [f32; SRE_LEN] {
        self.0.map(f32::from)
    }
}

/// One-hot encodes a subject id (1..=16) and a race/ethnicity id (17..=19).
pub fn encode_sre(subject_id: u32, re_id: u32) -> Result<SreVector> {
    Ok(SreVector::new(Subject::from_id(subject_id)?, RaceEthnicity::from_id(re_id)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn politician_with_no_race_relation() {
        let v = encode_sre(4, 17).unwrap();
        for p in 1..=SRE_LEN {
            assert_eq!(v.at(p), u8::from(p == 4 || p == 17), "position {p}");
        }
    }

    #[test]
    fn other_with_hate_group() {
        let v = encode_sre(16, 19).unwrap();
        assert_eq!(v.at(16), 1);
        assert_eq!(v.at(19), 1);
        assert_eq!(v.values().iter().map(|&x| x as u32).sum::<u32>(), 2);
    }

    #[test]
    fn out_of_range_ids() {
        assert_eq!(encode_sre(0, 17), Err(Error::SubjectId(0)));
        assert_eq!(encode_sre(17, 17), Err(Error::SubjectId(17)));
        assert_eq!(encode_sre(1, 16), Err(Error::RaceEthnicityId(16)));
        assert_eq!(encode_sre(1, 20), Err(Error::RaceEthnicityId(20)));
    }
}
