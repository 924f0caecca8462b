#pragma once

#include <stdexcept>
#include <string>

namespace photonsim {

// Base class for every error raised by the toolkit.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct dimension_error : error { using error::error; };
struct parameter_error : error { using error::error; };
struct symmetry_error : error { using error::error; };
struct consistency_error : error { using error::error; };
struct unsupported_error : error { using error::error; };
struct undefined_phase_error : error { using error::error; };
struct gap_closed_error : error { using error::error; };
struct fit_error : error { using error::error; };
struct optimization_error : error { using error::error; };

}  // namespace photonsim
