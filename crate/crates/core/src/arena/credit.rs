use serde::{Deserialize, Serialize};

use super::state::GameState;
use super::unit::UnitId;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KillCredit {
    /// Source of the victim's final damage.
    pub killer: Option<UnitId>,
    /// Distinct enemy heroes that damaged the victim within the assist window,
    /// killer excluded, ascending by id.
    pub assists: Vec<UnitId>,
}

/// Kill credit for a victim whose hp just reached zero at `state.tick`.
pub fn resolve_kill_credit(state: &GameState, victim: UnitId) -> KillCredit {
    let Some(victim_unit) = state.unit(victim) else {
        return KillCredit::default();
    };
    let marks = state.recent_damage.get(&victim).map(Vec::as_slice).unwrap_or(&[]);
    let killer = marks.last().map(|m| m.attacker);
    let window = state.config.assist_window;
    let mut assists: Vec<UnitId> = marks
        .iter()
        .filter(|m| state.tick.saturating_sub(m.tick) <= window)
        .map(|m| m.attacker)
        .filter(|&a| Some(a) != killer)
        .filter(|a| {
            state
                .unit(*a)
                .is_some_and(|u| u.is_hero() && u.team != victim_unit.team)
        })
        .collect();
    assists.sort();
    assists.dedup();
    KillCredit { killer, assists }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::config::ArenaConfig;
    use crate::arena::state::{new_match, DamageMark};
    use crate::arena::unit::Team;

    fn setup() -> (GameState, UnitId, UnitId, UnitId) {
        let state = new_match(&ArenaConfig::default()).unwrap();
        let blue = state.hero_ids(Team::Blue);
        let red = state.hero_ids(Team::Red);
        (state, blue[0], blue[1], red[0])
    }

    fn mark(state: &mut GameState, victim: UnitId, attacker: UnitId, tick: u64) {
        state
            .recent_damage
            .entry(victim)
            .or_default()
            .push(DamageMark { attacker, tick });
    }

    #[test]
    fn killing_blow_and_recent_assist() {
        let (mut state, a, b, victim) = setup();
        state.tick = 1000;
        mark(&mut state, victim, b, 950);
        mark(&mut state, victim, a, 1000);
        let credit = resolve_kill_credit(&state, victim);
        assert_eq!(credit.killer, Some(a));
        assert_eq!(credit.assists, vec![b]);
    }

    #[test]
    fn solo_kill_has_no_assists() {
        let (mut state, a, _, victim) = setup();
        state.tick = 10;
        mark(&mut state, victim, a, 8);
        mark(&mut state, victim, a, 10);
        let credit = resolve_kill_credit(&state, victim);
        assert_eq!(credit, KillCredit { killer: Some(a), assists: vec![] });
    }

    #[test]
    fn window_boundary_matches_log_scan() {
        let (mut state, a, b, victim) = setup();
        let window = state.config.assist_window;
        for age in [window - 1, window, window + 1, window + 50] {
            state.recent_damage.clear();
            state.tick = 5000;
            mark(&mut state, victim, b, 5000 - age);
            mark(&mut state, victim, a, 5000);
            // brute-force scan of the damage log
            let expected: Vec<UnitId> = state.recent_damage[&victim]
                .iter()
                .filter(|m| m.attacker == b && state.tick - m.tick <= window)
                .map(|m| m.attacker)
                .collect();
            assert_eq!(resolve_kill_credit(&state, victim).assists, expected, "age {age}");
        }
        state.tick = 5000;
        state.recent_damage.clear();
        mark(&mut state, victim, b, 5000 - window - 1);
        mark(&mut state, victim, a, 5000);
        assert!(resolve_kill_credit(&state, victim).assists.is_empty());
    }

    #[test]
    fn tower_kill_still_credits_hero_assists() {
        let (mut state, a, _, victim) = setup();
        let tower = state
            .units
            .values()
            .find(|u| u.kind == crate::arena::unit::UnitKind::Tower && u.team == Team::Blue)
            .unwrap()
            .id;
        state.tick = 300;
        mark(&mut state, victim, a, 250);
        mark(&mut state, victim, tower, 300);
        let credit = resolve_kill_credit(&state, victim);
        assert_eq!(credit.killer, Some(tower));
        assert_eq!(credit.assists, vec![a]);
    }
}
