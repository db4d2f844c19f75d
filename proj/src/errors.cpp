#include "plf/errors.hpp"

namespace plf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_row: return "MalformedRow";
    case Errc::gap_too_large: return "GapTooLarge";
    case Errc::empty_file: return "EmptyFile";
    case Errc::wrong_column_count: return "WrongColumnCount";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::max_evaluations_exceeded: return "MaxEvaluationsExceeded";
    case Errc::non_finite_objective: return "NonFiniteObjective";
    case Errc::infeasible: return "Infeasible";
    case Errc::unbounded: return "Unbounded";
    case Errc::empty_history: return "EmptyHistory";
    case Errc::no_matching_period: return "NoMatchingPeriod";
    case Errc::empty_window: return "EmptyWindow";
    case Errc::bracket_failure: return "BracketFailure";
    case Errc::window_outside_history: return "WindowOutsideHistory";
    case Errc::insufficient_history: return "InsufficientHistory";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::zero_actual: return "ZeroActual";
    case Errc::horizon_mismatch: return "HorizonMismatch";
    case Errc::no_tasks: return "NoTasks";
    case Errc::missing_prior_year: return "MissingPriorYear";
    case Errc::empty_tasks: return "EmptyTasks";
    case Errc::weights_missing: return "WeightsMissing";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace plf
