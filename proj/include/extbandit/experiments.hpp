#pragma once

#include "extbandit/environments.hpp"

namespace extbandit {

// The four built-in synthetic benchmark tasks (ids 1..4). Throws ConfigError
// for any other id.
TaskSpec builtin_experiment(int id);

}  // namespace extbandit
