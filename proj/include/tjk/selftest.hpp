#pragma once

#include <cstdint>

#include "tjk/io.hpp"

namespace tjk {

// Runs quick randomized invariant suites. The report lists every suite with
// its case count and failures; "passed" is the conjunction.
json run_selftest(std::uint64_t seed);

}  // namespace tjk
