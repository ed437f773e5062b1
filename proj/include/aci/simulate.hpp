#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aci/core.hpp"
#include "aci/stats.hpp"

namespace aci {

/// Directed acyclic graph over at most 31 nodes, children stored as bitmasks.
class Dag {
public:
    explicit Dag(int nodes = 0);

    int size() const { return static_cast<int>(children_.size()); }
    /// Throws CycleError when the edge would close a directed cycle.
    void add_edge(int from, int to);
    bool has_edge(int from, int to) const { return (children_[from] >> to) & 1u; }
    std::uint32_t children(int v) const { return children_[v]; }
    std::uint32_t parents(int v) const { return parents_[v]; }
    /// Every node reachable by a directed path of length at least one.
    std::uint32_t descendants(int v) const;
    std::vector<int> topological_order() const;

private:
    std::vector<std::uint32_t> children_;
    std::vector<std::uint32_t> parents_;
};

/// Linear Gaussian structural model. Nodes [0, n_obs) are observed, the rest latent.
struct Scm {
    int n_obs = 0;
    int n_latent = 0;
    Dag dag;
    /// coefficient[from][to]; nonzero exactly on the edges.
    std::vector<std::vector<double>> coefficient;
    std::vector<double> noise_std;

    int nodes() const { return n_obs + n_latent; }
};

/// Random order over all nodes, each forward pair joined with probability edge_prob,
/// coefficients uniform on [-2, -0.5] or [0.5, 2], unit noise. Deterministic per seed.
Scm random_linear_model(int n_obs, int n_latent, double edge_prob, std::uint64_t seed);

/// Ancestral sampling; latent columns are dropped and observed columns are named X0, X1, ...
Dataset sample_data(const Scm& scm, int samples, std::uint64_t seed);

/// Whether every path between x and y is blocked given cond.
bool d_separated(const Dag& dag, int x, int y, CondSet cond);

/// Reachability among observed nodes, paths through latents included.
AncestralStructure true_ancestral_structure(const Scm& scm);

/// Hard (in)dependence inputs for every canonical observed triple of order at most max_order,
/// read off by d-separation over the full graph.
std::vector<WeightedInput> oracle_inputs(const Scm& scm, int max_order);

/// Text form: `obs k`, `latent k`, then one `src -> dst : coeff` line per edge.
void write_scm(std::ostream& out, const Scm& scm);
/// Throws ParseError.
Scm read_scm(std::istream& in);

}  // namespace aci
