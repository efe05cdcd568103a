use super::TutorError;
use crate::arena::{GameState, Lane, Team, UnitId};

/// Picks the hero the tutor supports: the ally assigned to the Bot lane (lowest id on
/// ties), otherwise the ally closest to the team's Bot lane entry point.
pub fn select_partner(state: &GameState, team: Team, tutor: Option<UnitId>) -> Result<UnitId, TutorError> {
    let allies: Vec<_> = state.team_heroes(team).filter(|h| Some(h.id) != tutor).collect();
    if let Some(bot) = allies.iter().filter(|h| h.lane == Some(Lane::Bot)).map(|h| h.id).min() {
        return Ok(bot);
    }
    let entry = state.map.lane_start(Lane::Bot, team);
    allies
        .iter()
        .min_by(|a, b| a.pos.distance(entry).total_cmp(&b.pos.distance(entry)).then(a.id.cmp(&b.id)))
        .map(|h| h.id)
        .ok_or(TutorError::NoEligibleAlly)
}
