//! Pipeline segments and a fixed-size per-segment value table.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// One stage of the XR frame pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Segment {
    #[serde(rename = "fg")]
    FrameGeneration,
    #[serde(rename = "vol")]
    Volumetric,
    #[serde(rename = "ext")]
    ExternalSensors,
    #[serde(rename = "ren")]
    Rendering,
    #[serde(rename = "fc")]
    Conversion,
    #[serde(rename = "en")]
    Encoding,
    #[serde(rename = "loc")]
    LocalInference,
    #[serde(rename = "rem")]
    RemoteInference,
    #[serde(rename = "tr")]
    Transmission,
    #[serde(rename = "ho")]
    Handoff,
    #[serde(rename = "coop")]
    Cooperation,
}

impl Segment {
    pub const ALL: [Segment; 11] = [
        Segment::FrameGeneration,
        Segment::Volumetric,
        Segment::ExternalSensors,
        Segment::Rendering,
        Segment::Conversion,
        Segment::Encoding,
        Segment::LocalInference,
        Segment::RemoteInference,
        Segment::Transmission,
        Segment::Handoff,
        Segment::Cooperation,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Segment::FrameGeneration => "fg",
            Segment::Volumetric => "vol",
            Segment::ExternalSensors => "ext",
            Segment::Rendering => "ren",
            Segment::Conversion => "fc",
            Segment::Encoding => "en",
            Segment::LocalInference => "loc",
            Segment::RemoteInference => "rem",
            Segment::Transmission => "tr",
            Segment::Handoff => "ho",
            Segment::Cooperation => "coop",
        }
    }

    /// Segments that only run when inference is on-device.
    pub fn is_local_only(self) -> bool {
        matches!(self, Segment::Conversion | Segment::LocalInference)
    }

    /// Segments that only run when inference is offloaded.
    pub fn is_remote_only(self) -> bool {
        matches!(
            self,
            Segment::Encoding | Segment::RemoteInference | Segment::Transmission | Segment::Handoff
        )
    }

    /// Segments during which the device idles waiting on the network or the edge.
    pub fn is_device_idle(self) -> bool {
        matches!(
            self,
            Segment::RemoteInference | Segment::Transmission | Segment::Handoff
        )
    }

    /// 0/1 weight of this segment in the end-to-end sum.
    pub fn gate(self, local: bool, include_coop: bool) -> f64 {
        let on = if self.is_local_only() {
            local
        } else if self.is_remote_only() {
            !local
        } else if self == Segment::Cooperation {
            include_coop
        } else {
            true
        };
        if on {
            1.0
        } else {
            0.0
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// One value per [`Segment`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Segments([f64; 11]);

impl Segments {
    pub fn iter(&self) -> impl Iterator<Item = (Segment, f64)> + '_ {
        Segment::ALL.iter().map(move |&s| (s, self[s]))
    }

    /// Gated sum in pipeline order.
    pub fn gated_sum(&self, local: bool, include_coop: bool) -> f64 {
        Segment::ALL
            .iter()
            .map(|&s| s.gate(local, include_coop) * self[s])
            .sum()
    }
}

impl Index<Segment> for Segments {
    type Output = f64;

    fn index(&self, seg: Segment) -> &f64 {
        &self.0[seg.index()]
    }
}

impl IndexMut<Segment> for Segments {
    fn index_mut(&mut self, seg: Segment) -> &mut f64 {
        &mut self.0[seg.index()]
    }
}
