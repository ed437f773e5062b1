#include "hitting_set.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace aci::detail {

namespace {

class Search {
public:
    Search(std::vector<std::vector<int>> cores, const std::vector<std::int64_t>& weights, int universe,
           std::chrono::steady_clock::time_point deadline)
        : cores_(std::move(cores)),
          weights_(weights),
          chosen_(universe, false),
          banned_(universe, 0),
          deadline_(deadline) {}

    void set_upper_bound(std::vector<int> elements, std::int64_t cost) {
        best_ = std::move(elements);
        best_cost_ = cost;
    }

    void run() { dfs(0); }

    const std::vector<int>& best() const { return best_; }
    std::int64_t best_cost() const { return best_cost_; }

private:
    bool covered(const std::vector<int>& core) const {
        for (int e : core)
            if (chosen_[e]) return true;
        return false;
    }

    void dfs(std::int64_t cost) {
        if ((++nodes_ & 4095) == 0 && std::chrono::steady_clock::now() > deadline_)
            throw std::runtime_error("deadline");

        // uncovered cores, with the count of still-allowed elements
        std::vector<std::pair<int, int>> open;  // (allowed count, core index)
        for (int c = 0; c < static_cast<int>(cores_.size()); ++c) {
            if (covered(cores_[c])) continue;
            int allowed = 0;
            for (int e : cores_[c])
                if (!banned_[e]) ++allowed;
            if (allowed == 0) return;
            open.push_back({allowed, c});
        }
        if (open.empty()) {
            if (cost < best_cost_) {
                best_cost_ = cost;
                best_.clear();
                for (int e = 0; e < static_cast<int>(chosen_.size()); ++e)
                    if (chosen_[e]) best_.push_back(e);
            }
            return;
        }
        std::stable_sort(open.begin(), open.end());

        // Dual ascent: each open core takes the cheapest residual weight among its allowed
        // elements and charges it to all of them. The charges sum to a valid lower bound.
        std::int64_t bound = 0;
        std::vector<int> touched;
        for (auto [allowed, c] : open) {
            std::int64_t cheapest = std::numeric_limits<std::int64_t>::max();
            for (int e : cores_[c])
                if (!banned_[e]) {
                    if (!mark_[e]) {
                        mark_[e] = 1;
                        residual_[e] = weights_[e];
                        touched.push_back(e);
                    }
                    cheapest = std::min(cheapest, residual_[e]);
                }
            if (cheapest == 0) continue;
            for (int e : cores_[c])
                if (!banned_[e]) residual_[e] -= cheapest;
            bound += cheapest;
        }
        for (int e : touched) mark_[e] = 0;
        if (cost + bound >= best_cost_) return;

        std::vector<int> branch;
        for (int e : cores_[open.front().second])
            if (!banned_[e]) branch.push_back(e);
        std::stable_sort(branch.begin(), branch.end(),
                         [&](int a, int b) { return weights_[a] < weights_[b]; });
        for (int e : branch) {
            chosen_[e] = true;
            dfs(cost + weights_[e]);
            chosen_[e] = false;
            ++banned_[e];
        }
        for (int e : branch) --banned_[e];
    }

    std::vector<std::vector<int>> cores_;
    const std::vector<std::int64_t>& weights_;
    std::vector<bool> chosen_;
    std::vector<int> banned_;
    std::vector<std::uint8_t> mark_ = std::vector<std::uint8_t>(chosen_.size(), 0);
    std::vector<std::int64_t> residual_ = std::vector<std::int64_t>(chosen_.size(), 0);
    std::vector<int> best_;
    std::int64_t best_cost_ = std::numeric_limits<std::int64_t>::max();
    std::chrono::steady_clock::time_point deadline_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<HittingSet> min_hitting_set(const std::vector<std::vector<int>>& cores,
                                          const std::vector<std::int64_t>& weights,
                                          const std::vector<ElementState>& state,
                                          std::chrono::steady_clock::time_point deadline, bool exact) {
    const int universe = static_cast<int>(weights.size());
    std::vector<std::vector<int>> open;
    for (const auto& core : cores) {
        bool hit = false;
        std::vector<int> usable;
        for (int e : core) {
            if (state[e] == ElementState::AlwaysIn) hit = true;
            if (state[e] == ElementState::Free) usable.push_back(e);
        }
        if (hit) continue;
        if (usable.empty()) return std::nullopt;
        std::sort(usable.begin(), usable.end());
        open.push_back(std::move(usable));
    }
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    // drop cores that contain another core
    std::vector<std::vector<int>> minimal;
    for (std::size_t i = 0; i < open.size(); ++i) {
        bool superset = false;
        for (std::size_t j = 0; j < open.size() && !superset; ++j)
            if (i != j && open[j].size() < open[i].size() &&
                std::includes(open[i].begin(), open[i].end(), open[j].begin(), open[j].end()))
                superset = true;
        if (!superset) minimal.push_back(open[i]);
    }

    // greedy upper bound: repeatedly take the element with the best weight per newly hit core
    std::vector<bool> hit(minimal.size(), false);
    std::vector<int> greedy;
    std::int64_t greedy_cost = 0;
    for (;;) {
        std::vector<int> gain(universe, 0);
        bool any = false;
        for (std::size_t c = 0; c < minimal.size(); ++c)
            if (!hit[c]) {
                any = true;
                for (int e : minimal[c]) ++gain[e];
            }
        if (!any) break;
        int pick = -1;
        for (int e = 0; e < universe; ++e) {
            if (gain[e] == 0) continue;
            // compare w_e / gain_e without division
            if (pick < 0 || static_cast<long double>(weights[e]) * gain[pick] <
                                static_cast<long double>(weights[pick]) * gain[e])
                pick = e;
        }
        greedy.push_back(pick);
        greedy_cost += weights[pick];
        for (std::size_t c = 0; c < minimal.size(); ++c)
            if (!hit[c] && std::binary_search(minimal[c].begin(), minimal[c].end(), pick)) hit[c] = true;
    }
    std::sort(greedy.begin(), greedy.end());
    if (!exact) return HittingSet{greedy, greedy_cost};

    Search search(std::move(minimal), weights, universe, deadline);
    search.set_upper_bound(greedy, greedy_cost + 1);
    search.run();
    if (search.best_cost() > greedy_cost) return HittingSet{greedy, greedy_cost};
    return HittingSet{search.best(), search.best_cost()};
}

}  // namespace aci::detail
