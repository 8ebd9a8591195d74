#pragma once

#include "noneq/markov/spectral.hpp"

#include <ostream>

namespace noneq::markov {

/// Columns: index,value,u_0,...,u_{S-1}; one row per mode, index 0 first.
void write_spectrum_csv(std::ostream& out, const SpectralExpansion& ex);

/// Columns: to_state,from_state,value; non-zero entries of U, column-major.
void write_operator_csv(std::ostream& out, const TransitionOperator& op);

}  // namespace noneq::markov
