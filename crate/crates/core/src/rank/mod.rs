//! Exact ranks on finite hosts, the rank game and embeddability checks.

pub mod engine;
pub mod game;
pub mod search;

pub use engine::{mask_of, rank, rank_subset, vertices_of, RankMemo};
pub use game::{game_step, game_value, GameMove, GameSolution, GameState, Player};
pub use search::{
    check_intermediate_values, embeds_all_up_to, search_universality_number, unary_rank_check,
};
