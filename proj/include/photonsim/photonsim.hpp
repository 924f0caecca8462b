#pragma once

#include <photonsim/errors.hpp>
#include <photonsim/experiments.hpp>
#include <photonsim/interference.hpp>
#include <photonsim/interferometers.hpp>
#include <photonsim/lattice.hpp>
#include <photonsim/numerics.hpp>
#include <photonsim/oracle.hpp>
#include <photonsim/photon_states.hpp>

namespace photonsim {

inline constexpr const char* version = "1.0.0";

}  // namespace photonsim
