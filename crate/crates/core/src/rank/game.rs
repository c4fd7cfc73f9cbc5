use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::engine::{mask_of, vertices_of};
use crate::error::{Error, Result};
use crate::structures::{good_types, type_of_point, ClassOracle, ExtensionType, FiniteStructure};
use crate::structures::types::DEFAULT_TYPE_BUDGET;

/// Optimal play at one position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionStrategy {
    pub position: Vec<usize>,
    pub value: usize,
    /// Index of I's pessimal type among the good types, canonical order.
    pub type_index: usize,
    pub proposal: ExtensionType,
    /// II's best realization, lowest id among the optimal ones; `None` when
    /// the type has no realization.
    pub reply: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameSolution {
    pub value: usize,
    /// Strategy for every position reachable from the start by legal play.
    pub positions: BTreeMap<u64, PositionStrategy>,
}

/// Solves the rank game from `f` by direct minimax over explicit types and
/// realizations. This deliberately shares nothing with the rank engine
/// beyond the type primitives, so the two can be compared.
pub fn game_value(host: &FiniteStructure, oracle: ClassOracle, f: &[usize]) -> Result<GameSolution> {
    if host.size() > 64 {
        return Err(Error::resource("game hosts are limited to 64 vertices"));
    }
    if !oracle.contains(host) {
        return Err(Error::input(format!("host is not in the class `{oracle}`")));
    }
    if let Some(&v) = f.iter().find(|&&v| v >= host.size()) {
        return Err(Error::input(format!("vertex {v} is not in the host")));
    }
    let mut solver = Solver { host, oracle, values: HashMap::new(), positions: BTreeMap::new() };
    let value = solver.solve(mask_of(f))?;
    Ok(GameSolution { value, positions: solver.positions })
}

struct Solver<'a> {
    host: &'a FiniteStructure,
    oracle: ClassOracle,
    values: HashMap<u64, usize>,
    positions: BTreeMap<u64, PositionStrategy>,
}

impl Solver<'_> {
    fn solve(&mut self, f: u64) -> Result<usize> {
        if let Some(&v) = self.values.get(&f) {
            return Ok(v);
        }
        let base_vertices = vertices_of(f);
        let (base, _) = self.host.induced(&base_vertices)?;
        let types = good_types(&base, &self.oracle, DEFAULT_TYPE_BUDGET)?;
        if types.is_empty() {
            return Err(Error::input("no good type to propose; the game never ends"));
        }
        let mut best: Option<(usize, usize, Option<usize>)> = None;
        for (index, ty) in types.iter().enumerate() {
            let realizations: Vec<usize> = self
                .host
                .vertices()
                .filter(|&z| f >> z & 1 == 0)
                .filter(|&z| type_of_point(self.host, &base_vertices, z) == *ty)
                .collect();
            // II's best reply: highest value, lowest vertex among ties.
            let mut reply: Option<(usize, usize)> = None;
            for &z in &realizations {
                let v = self.solve(f | 1 << z)?;
                if reply.is_none_or(|(bv, _)| v > bv) {
                    reply = Some((v, z));
                }
            }
            let survive = reply.map_or(0, |(v, _)| v + 1);
            if best.is_none_or(|(bv, _, _)| survive < bv) {
                best = Some((survive, index, reply.map(|(_, z)| z)));
            }
        }
        let (value, index, reply) = best.expect("at least one type");
        self.values.insert(f, value);
        self.positions.insert(
            f,
            PositionStrategy {
                position: base_vertices,
                value,
                type_index: index,
                proposal: types[index].clone(),
                reply,
            },
        );
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    /// Proposes types.
    One,
    /// Picks realizations.
    Two,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::One => "I",
            Player::Two => "II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameMove {
    /// Player I proposes the good type with this canonical index.
    Propose(usize),
    /// Player II answers with this host vertex.
    Pick(usize),
}

/// A position in a single play of the rank game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    host: FiniteStructure,
    oracle: ClassOracle,
    current: Vec<usize>,
    round: usize,
    pending: Option<(usize, ExtensionType)>,
    history: Vec<(ExtensionType, usize)>,
    /// Set once II cannot realize the pending type.
    lost_at: Option<usize>,
}

impl GameState {
    pub fn new(host: FiniteStructure, oracle: ClassOracle, start: &[usize]) -> Result<Self> {
        if !oracle.contains(&host) {
            return Err(Error::input(format!("host is not in the class `{oracle}`")));
        }
        if let Some(&v) = start.iter().find(|&&v| v >= host.size()) {
            return Err(Error::input(format!("vertex {v} is not in the host")));
        }
        let mut current = start.to_vec();
        current.sort_unstable();
        current.dedup();
        Ok(GameState { host, oracle, current, round: 0, pending: None, history: Vec::new(), lost_at: None })
    }

    pub fn host(&self) -> &FiniteStructure {
        &self.host
    }

    pub fn current(&self) -> &[usize] {
        &self.current
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn pending(&self) -> Option<&ExtensionType> {
        self.pending.as_ref().map(|(_, t)| t)
    }

    pub fn history(&self) -> &[(ExtensionType, usize)] {
        &self.history
    }

    /// The round in which II failed to answer, if the play is over.
    pub fn lost_at(&self) -> Option<usize> {
        self.lost_at
    }

    pub fn is_terminal(&self) -> bool {
        self.lost_at.is_some()
    }

    pub fn to_move(&self) -> Player {
        if self.pending.is_some() {
            Player::Two
        } else {
            Player::One
        }
    }

    /// Good types of the current set, canonical order.
    pub fn legal_types(&self) -> Result<Vec<ExtensionType>> {
        let (base, _) = self.host.induced(&self.current)?;
        good_types(&base, &self.oracle, DEFAULT_TYPE_BUDGET)
    }

    /// Realizations of the pending type.
    pub fn legal_picks(&self) -> Vec<usize> {
        match &self.pending {
            Some((_, ty)) => self
                .host
                .vertices()
                .filter(|z| self.current.binary_search(z).is_err())
                .filter(|&z| type_of_point(&self.host, &self.current, z) == *ty)
                .collect(),
            None => Vec::new(),
        }
    }

    /// Legal moves rendered as the commands the REPL accepts.
    pub fn legal_moves(&self) -> Result<Vec<String>> {
        if self.is_terminal() {
            return Ok(Vec::new());
        }
        Ok(match self.to_move() {
            Player::One => (0..self.legal_types()?.len()).map(|i| format!("type {i}")).collect(),
            Player::Two => self.legal_picks().into_iter().map(|z| format!("pick {z}")).collect(),
        })
    }
}

/// Applies one move. Proposing a type with no realization ends the play
/// with II losing in the current round.
pub fn game_step(state: &GameState, mv: GameMove) -> Result<GameState> {
    let illegal = |reason: String| -> Result<GameState> {
        Err(Error::Move { reason, legal: state.legal_moves()? })
    };
    if state.is_terminal() {
        return illegal("the play is over".into());
    }
    let mut next = state.clone();
    match (state.to_move(), mv) {
        (Player::One, GameMove::Propose(i)) => {
            let types = state.legal_types()?;
            let Some(ty) = types.get(i) else {
                return illegal(format!("there is no good type {i}"));
            };
            next.pending = Some((i, ty.clone()));
            if next.legal_picks().is_empty() {
                next.lost_at = Some(state.round);
            }
        }
        (Player::Two, GameMove::Pick(z)) => {
            if !state.legal_picks().contains(&z) {
                return illegal(format!("vertex {z} does not realize the pending type"));
            }
            let (_, ty) = next.pending.take().expect("II moves only with a pending type");
            next.current.push(z);
            next.current.sort_unstable();
            next.history.push((ty, z));
            next.round += 1;
        }
        (player, _) => return illegal(format!("it is player {player}'s turn")),
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> FiniteStructure {
        FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn p3_value_and_strategy() {
        let sol = game_value(&p3(), ClassOracle::Graph, &[]).unwrap();
        assert_eq!(sol.value, 2);
        let start = &sol.positions[&0];
        assert_eq!(start.type_index, 0);
        // II should pick an endpoint, the lowest id is 0.
        assert_eq!(start.reply, Some(0));
        let middle = &sol.positions.get(&0b010);
        assert!(middle.is_none() || middle.unwrap().value == 0);
    }

    #[test]
    fn three_cycle_value() {
        let c3 = FiniteStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(game_value(&c3, ClassOracle::Tournament, &[]).unwrap().value, 2);
    }

    #[test]
    fn rank_zero_position_reports_witness() {
        let sol = game_value(&p3(), ClassOracle::Graph, &[1]).unwrap();
        assert_eq!(sol.value, 0);
        let s = &sol.positions[&0b010];
        assert_eq!(s.reply, None);
    }

    #[test]
    fn playing_a_round() {
        let state = GameState::new(p3(), ClassOracle::Graph, &[]).unwrap();
        assert_eq!(state.to_move(), Player::One);
        assert_eq!(state.legal_moves().unwrap(), vec!["type 0"]);
        let s1 = game_step(&state, GameMove::Propose(0)).unwrap();
        assert_eq!(s1.legal_moves().unwrap(), vec!["pick 0", "pick 1", "pick 2"]);
        let err = game_step(&s1, GameMove::Propose(0)).unwrap_err();
        assert!(matches!(err, Error::Move { .. }));
        let s2 = game_step(&s1, GameMove::Pick(1)).unwrap();
        assert_eq!(s2.round(), 1);
        assert_eq!(s2.current(), &[1]);
        // Over the middle vertex, "non-neighbour" has no realization.
        let s3 = game_step(&s2, GameMove::Propose(0)).unwrap();
        assert!(s3.is_terminal());
        assert_eq!(s3.lost_at(), Some(1));
        assert!(game_step(&s3, GameMove::Pick(0)).is_err());
    }

    #[test]
    fn illegal_pick_lists_moves() {
        let state = GameState::new(p3(), ClassOracle::Graph, &[0]).unwrap();
        let s1 = game_step(&state, GameMove::Propose(1)).unwrap();
        match game_step(&s1, GameMove::Pick(2)) {
            Err(Error::Move { legal, .. }) => assert_eq!(legal, vec!["pick 1"]),
            other => panic!("{other:?}"),
        }
    }
}
