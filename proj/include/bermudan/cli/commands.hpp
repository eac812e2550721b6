#pragma once

#include <iosfwd>

namespace bermudan::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kNumericalFailure = 2,
  kPropertyFailure = 3,
};

// Entry point of the command-line tool:
//   price  --config FILE [--seed S] [--out PATH] [--format table|csv|records]
//          [--coeffs-out FILE] [--coeffs-in FILE] [--deterministic]
//   bench  --table basket_put|max_call [--cells FILTER] [--paths-scale F]
//          [--seed S] [--out PATH] [--format ...] [--deterministic]
//   verify [--fixtures LIST] [--fault-inject] [--lattice FILE]
//          [--random-lattices N] [--seed S]
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bermudan::cli
