#pragma once

#include <functional>
#include <string>

namespace dcf {

/// guaranteed: reject instances below the degree gate, abort loudly if the
/// machinery stalls past its complete fallback. best_effort: attempt any
/// instance and return a structured failure report instead.
enum class SolveMode { guaranteed, best_effort };

using TraceFn = std::function<void(const std::string&)>;

struct SolveStats {
  long long moves = 0;
  long long backtrack_nodes = 0;  // grow steps spent in re-tried variations
  bool used_backtracking = false;
  bool used_fallback = false;
};

}  // namespace dcf
