#pragma once

#include <iosfwd>

namespace otbag {

// Runs the built-in verification suite: statistical checks on the sampler,
// exact reductions, hand-traced ledger fixtures, the synthetic transfer
// benchmarks and the determinism/serialization contracts. Prints one
// pass/fail line per criterion and returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace otbag
