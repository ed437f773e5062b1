#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

namespace aci::detail {

/// Element status for one hitting-set query.
enum class ElementState : std::uint8_t { Free, AlwaysIn, NeverIn };

struct HittingSet {
    std::vector<int> elements;  // sorted
    std::int64_t cost = 0;      // cost of free elements only
};

/// Exact minimum-weight hitting set by branch and bound. AlwaysIn elements hit their cores for
/// free; NeverIn elements may not be used. Returns nullopt when some core cannot be hit.
/// With exact = false the greedy hitting set is returned instead (no optimality claim).
/// Throws std::runtime_error("deadline") when the deadline passes.
std::optional<HittingSet> min_hitting_set(const std::vector<std::vector<int>>& cores,
                                          const std::vector<std::int64_t>& weights,
                                          const std::vector<ElementState>& state,
                                          std::chrono::steady_clock::time_point deadline, bool exact = true);

}  // namespace aci::detail
