use serde::{Deserialize, Serialize};

use super::TutorError;

/// Tunables for the tutor's movement and skill layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TutorConfig {
    pub follow_distance: f64,
    pub min_separation: f64,
    /// Partner hp fraction below which single-target heals fire.
    pub heal_threshold: f64,
    pub ult_threshold: f64,
    pub ult_min_allies: u32,
    /// Own hp fraction below which the tutor walks home.
    pub retreat_threshold: f64,
    pub cc_engage_radius: f64,
    pub passive_trigger: f64,
    pub passive_boost_pct: f64,
}

impl Default for TutorConfig {
    fn default() -> Self {
        Self {
            follow_distance: 40.0,
            min_separation: 15.0,
            heal_threshold: 0.6,
            ult_threshold: 0.4,
            ult_min_allies: 3,
            retreat_threshold: 0.25,
            cc_engage_radius: 100.0,
            passive_trigger: 0.4,
            passive_boost_pct: 70.0,
        }
    }
}

impl TutorConfig {
    /// Defaults with `ult_min_allies` scaled down for teams smaller than five.
    pub fn for_team_size(heroes_per_team: u32) -> Self {
        Self {
            ult_min_allies: 3.min(heroes_per_team.div_ceil(2)).max(1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TutorError> {
        let bad = |what: &str| Err(TutorError::Config(what.to_string()));
        if !(self.min_separation > 0.0 && self.min_separation < self.follow_distance) {
            return bad("need 0 < min_separation < follow_distance");
        }
        for (name, v) in [
            ("heal_threshold", self.heal_threshold),
            ("ult_threshold", self.ult_threshold),
            ("retreat_threshold", self.retreat_threshold),
            ("passive_trigger", self.passive_trigger),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(&format!("{name} must be in (0, 1)"));
            }
        }
        if !(self.passive_boost_pct > 0.0 && self.passive_boost_pct <= 100.0) {
            return bad("passive_boost_pct must be in (0, 100]");
        }
        if !(self.cc_engage_radius > 0.0) || self.ult_min_allies == 0 {
            return bad("cc_engage_radius and ult_min_allies must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_scale() {
        TutorConfig::default().validate().unwrap();
        assert_eq!(TutorConfig::for_team_size(5).ult_min_allies, 3);
        assert_eq!(TutorConfig::for_team_size(2).ult_min_allies, 1);
        assert_eq!(TutorConfig::for_team_size(3).ult_min_allies, 2);
    }

    #[test]
    fn separation_must_be_inside_follow_distance() {
        let cfg = TutorConfig {
            min_separation: 50.0,
            ..TutorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
