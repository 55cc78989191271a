mod pairs;
mod spec_file;
mod state_channel;
mod views;

pub use pairs::{aux_state_pmf, product_pair_pmf, synced_pair_pmf};
pub use spec_file::{load_channel_spec, parse_channel_spec, render_channel_spec};
pub use state_channel::{shifted_states, DelaySet, StateChannel};
pub use views::{build_v_sequence, delayed_view, v_sequence_with_fill, window_index, window_symbols, DelayedView, VSequence};
