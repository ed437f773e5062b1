#include "aci/simulate.hpp"

#include "aci/facts.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace aci {

Dag::Dag(int nodes) {
    if (nodes < 0 || nodes > kMaxVariables) throw InvalidArgument("node count out of range");
    children_.assign(nodes, 0);
    parents_.assign(nodes, 0);
}

void Dag::add_edge(int from, int to) {
    if (from < 0 || to < 0 || from >= size() || to >= size() || from == to)
        throw InvalidArgument("invalid edge");
    if ((descendants(to) >> from) & 1u) throw CycleError("edge would close a directed cycle");
    children_[from] |= 1u << to;
    parents_[to] |= 1u << from;
}

std::uint32_t Dag::descendants(int v) const {
    std::uint32_t seen = 0;
    std::uint32_t frontier = children_[v];
    while (frontier) {
        const int u = std::countr_zero(frontier);
        frontier &= frontier - 1;
        if ((seen >> u) & 1u) continue;
        seen |= 1u << u;
        frontier |= children_[u] & ~seen;
    }
    return seen;
}

std::vector<int> Dag::topological_order() const {
    std::vector<int> order;
    std::uint32_t placed = 0;
    while (static_cast<int>(order.size()) < size())
        for (int v = 0; v < size(); ++v)
            if (!((placed >> v) & 1u) && (parents_[v] & ~placed) == 0) {
                order.push_back(v);
                placed |= 1u << v;
            }
    return order;
}

Scm random_linear_model(int n_obs, int n_latent, double edge_prob, std::uint64_t seed) {
    if (n_obs < 1 || n_latent < 0 || n_obs + n_latent > kMaxVariables)
        throw InvalidArgument("node counts out of range");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw InvalidArgument("edge probability outside [0, 1]");

    std::mt19937_64 rng(seed);
    Scm scm;
    scm.n_obs = n_obs;
    scm.n_latent = n_latent;
    const int total = scm.nodes();
    scm.dag = Dag(total);
    scm.coefficient.assign(total, std::vector<double>(total, 0.0));
    scm.noise_std.assign(total, 1.0);

    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution edge(edge_prob);
    std::uniform_real_distribution<double> magnitude(0.5, 2.0);
    std::bernoulli_distribution negative(0.5);
    for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j) {
            if (!edge(rng)) continue;
            const double m = magnitude(rng);
            const bool neg = negative(rng);
            scm.dag.add_edge(order[i], order[j]);
            scm.coefficient[order[i]][order[j]] = neg ? -m : m;
        }
    return scm;
}

Dataset sample_data(const Scm& scm, int samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidArgument("need at least one sample");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto order = scm.dag.topological_order();
    Eigen::MatrixXd all(samples, scm.nodes());
    for (int s = 0; s < samples; ++s)
        for (int v : order) {
            double value = scm.noise_std[v] * noise(rng);
            for (std::uint32_t p = scm.dag.parents(v); p; p &= p - 1) {
                const int u = std::countr_zero(p);
                value += scm.coefficient[u][v] * all(s, u);
            }
            all(s, v) = value;
        }
    Dataset data;
    data.names = default_names(scm.n_obs);
    data.values = all.leftCols(scm.n_obs);
    return data;
}

bool d_separated(const Dag& dag, int x, int y, CondSet cond) {
    const int n = dag.size();
    if (x < 0 || y < 0 || x >= n || y >= n || x == y) throw InvalidArgument("invalid node pair");
    if (!cond.fits(n) || cond.contains(x) || cond.contains(y)) throw InvalidArgument("invalid conditioning set");

    // cond together with its ancestors: colliders there are open
    std::uint32_t ancestors = cond.bits();
    for (std::uint32_t frontier = cond.bits(); frontier;) {
        const int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        const std::uint32_t fresh = dag.parents(v) & ~ancestors;
        ancestors |= fresh;
        frontier |= fresh;
    }

    // (node, arrived from a child) / (node, arrived from a parent)
    std::uint32_t seen_up = 0;
    std::uint32_t seen_down = 0;
    std::vector<std::pair<int, bool>> stack{{x, true}};
    while (!stack.empty()) {
        auto [v, up] = stack.back();
        stack.pop_back();
        std::uint32_t& seen = up ? seen_up : seen_down;
        if ((seen >> v) & 1u) continue;
        seen |= 1u << v;
        const bool observed = cond.contains(v);
        if (v == y && !observed) return false;
        if (up && !observed) {
            for (std::uint32_t p = dag.parents(v); p; p &= p - 1) stack.push_back({std::countr_zero(p), true});
            for (std::uint32_t c = dag.children(v); c; c &= c - 1) stack.push_back({std::countr_zero(c), false});
        } else if (!up) {
            if (!observed)
                for (std::uint32_t c = dag.children(v); c; c &= c - 1) stack.push_back({std::countr_zero(c), false});
            if ((ancestors >> v) & 1u)
                for (std::uint32_t p = dag.parents(v); p; p &= p - 1) stack.push_back({std::countr_zero(p), true});
        }
    }
    return true;
}

AncestralStructure true_ancestral_structure(const Scm& scm) {
    const std::uint32_t observed = (1u << scm.n_obs) - 1;
    std::vector<std::uint32_t> rows(scm.n_obs);
    for (int v = 0; v < scm.n_obs; ++v) rows[v] = (scm.dag.descendants(v) & observed) | (1u << v);
    return AncestralStructure::from_rows(std::move(rows));
}

std::vector<WeightedInput> oracle_inputs(const Scm& scm, int max_order) {
    const int n = scm.n_obs;
    if (max_order < 0 || (n >= 2 && max_order > n - 2)) throw InvalidArgument("maximum order out of range");
    std::vector<CiTriple> triples;
    for (VarIndex x = 0; x < n; ++x)
        for (VarIndex y = x + 1; y < n; ++y) {
            const std::uint32_t others = ((1u << n) - 1) & ~((1u << x) | (1u << y));
            for (std::uint32_t s = others;; s = (s - 1) & others) {
                if (std::popcount(s) <= max_order) triples.push_back({x, y, CondSet(s)});
                if (s == 0) break;
            }
        }
    std::sort(triples.begin(), triples.end());
    std::vector<WeightedInput> out;
    for (const auto& t : triples) {
        const bool sep = d_separated(scm.dag, t.x, t.y, t.cond);
        out.push_back(weighted(CiStatement{t, sep ? CiPolarity::Independent : CiPolarity::Dependent}, Weight::hard()));
    }
    return out;
}

void write_scm(std::ostream& out, const Scm& scm) {
    out << "obs " << scm.n_obs << '\n' << "latent " << scm.n_latent << '\n';
    const auto old = out.precision(17);
    for (int a = 0; a < scm.nodes(); ++a)
        for (int b = 0; b < scm.nodes(); ++b)
            if (scm.dag.has_edge(a, b)) out << a << " -> " << b << " : " << scm.coefficient[a][b] << '\n';
    out.precision(old);
}

Scm read_scm(std::istream& in) {
    Scm scm;
    bool have_obs = false;
    bool have_latent = false;
    std::string line;
    int lineno = 0;
    auto ready = [&] {
        if (scm.dag.size() == 0 && have_obs && have_latent) {
            if (scm.n_obs < 1 || scm.n_latent < 0 || scm.nodes() > kMaxVariables)
                throw ParseError("node counts out of range", lineno);
            scm.dag = Dag(scm.nodes());
            scm.coefficient.assign(scm.nodes(), std::vector<double>(scm.nodes(), 0.0));
            scm.noise_std.assign(scm.nodes(), 1.0);
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head)) continue;
        if (head == "obs" || head == "latent") {
            int k = -1;
            if (!(ss >> k)) throw ParseError("expected a count after '" + head + "'", lineno);
            (head == "obs" ? scm.n_obs : scm.n_latent) = k;
            (head == "obs" ? have_obs : have_latent) = true;
            ready();
            continue;
        }
        if (scm.dag.size() == 0) throw ParseError("edge before the obs/latent header", lineno);
        std::string arrow, colon;
        int from = -1, to = -1;
        double coeff = 0.0;
        std::istringstream edge(line);
        if (!(edge >> from >> arrow >> to >> colon >> coeff) || arrow != "->" || colon != ":")
            throw ParseError("expected 'src -> dst : coeff'", lineno);
        if (from < 0 || to < 0 || from >= scm.nodes() || to >= scm.nodes() || coeff == 0.0)
            throw ParseError("invalid edge", lineno);
        try {
            scm.dag.add_edge(from, to);
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
        scm.coefficient[from][to] = coeff;
    }
    if (scm.dag.size() == 0) throw ParseError("missing obs/latent header", lineno);
    return scm;
}

}  // namespace aci
