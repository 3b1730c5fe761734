#pragma once

// Sample loops: inputs are drawn serially (so results do not depend on the
// thread count), predicates are evaluated in parallel, and the smallest
// failing index wins.

#include <cstddef>
#include <exception>
#include <limits>
#include <optional>

namespace nbk {

template <class Pred>
std::optional<std::size_t> first_failure(std::size_t count, Pred&& pred) {
  std::size_t first = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) reduction(min : first)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (idx > first) continue;
    try {
      if (!pred(idx)) first = idx;
    } catch (...) {
#pragma omp critical(nbk_first_failure)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  if (first == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  return first;
}

namespace reference {
template <class Pred>
std::optional<std::size_t> first_failure(std::size_t count, Pred&& pred) {
  for (std::size_t i = 0; i < count; ++i)
    if (!pred(i)) return i;
  return std::nullopt;
}
}  // namespace reference

}  // namespace nbk
