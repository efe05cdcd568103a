use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::arena::{Event, EventKind, UnitId};

/// Kill/death/assist performance factor: `(K + A) / D` when `D > 0`, else `K + A`.
pub fn kda_factor(kills: i64, deaths: i64, assists: i64) -> Result<f64, AnalyticsError> {
    if kills < 0 || deaths < 0 || assists < 0 {
        return Err(AnalyticsError::NegativeInput { kills, deaths, assists });
    }
    let takedowns = (kills + assists) as f64;
    Ok(if deaths > 0 { takedowns / deaths as f64 } else { takedowns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreLine {
    pub player: UnitId,
    pub kills: u32,
    pub deaths: u32,
    pub assists: u32,
}

impl ScoreLine {
    pub fn new(player: UnitId) -> Self {
        Self {
            player,
            kills: 0,
            deaths: 0,
            assists: 0,
        }
    }

    pub fn kda(&self) -> f64 {
        kda_factor(self.kills.into(), self.deaths.into(), self.assists.into()).expect("counts are nonnegative")
    }
}

/// Tallies hero kill events for `players`, in the order given.
pub fn scorelines_from_events<'a>(events: impl IntoIterator<Item = &'a Event>, players: &[UnitId]) -> Vec<ScoreLine> {
    let mut lines: BTreeMap<UnitId, ScoreLine> = players.iter().map(|&p| (p, ScoreLine::new(p))).collect();
    for e in events {
        if let EventKind::Kill { killer, victim, assists } = &e.kind {
            if let Some(l) = killer.and_then(|k| lines.get_mut(&k)) {
                l.kills += 1;
            }
            if let Some(l) = lines.get_mut(victim) {
                l.deaths += 1;
            }
            for a in assists {
                if let Some(l) = lines.get_mut(a) {
                    l.assists += 1;
                }
            }
        }
    }
    players.iter().map(|p| lines[p]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deathless_branch_is_plain_sum() {
        assert_eq!(kda_factor(2, 0, 3).unwrap(), 5.0);
        assert_eq!(kda_factor(0, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn ratio_branch() {
        assert_eq!(kda_factor(3, 2, 4).unwrap(), 3.5);
        assert_eq!(kda_factor(0, 7, 0).unwrap(), 0.0);
    }

    #[test]
    fn negative_counts_are_domain_errors() {
        assert!(matches!(kda_factor(-1, 0, 0), Err(AnalyticsError::NegativeInput { .. })));
        assert!(kda_factor(0, -2, 0).is_err());
        assert!(kda_factor(0, 0, -3).is_err());
    }

    #[test]
    fn tally_counts_roles() {
        let (a, b, c) = (UnitId(1), UnitId(2), UnitId(3));
        let events = vec![
            Event::new(5, EventKind::Kill { killer: Some(a), victim: c, assists: vec![b] }),
            Event::new(9, EventKind::Kill { killer: Some(c), victim: a, assists: vec![] }),
        ];
        let lines = scorelines_from_events(&events, &[a, b, c]);
        assert_eq!((lines[0].kills, lines[0].deaths, lines[0].assists), (1, 1, 0));
        assert_eq!((lines[1].kills, lines[1].deaths, lines[1].assists), (0, 0, 1));
        assert_eq!((lines[2].kills, lines[2].deaths, lines[2].assists), (1, 1, 0));
    }
}
