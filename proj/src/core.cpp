#include "aci/core.hpp"

#include <sstream>

namespace aci {

CondSet CondSet::of(std::initializer_list<VarIndex> vars) {
    std::uint32_t bits = 0;
    for (VarIndex v : vars) {
        if (v < 0 || v >= kMaxVariables) throw InvalidArgument("variable index out of range");
        bits |= 1u << v;
    }
    return CondSet(bits);
}

std::vector<VarIndex> CondSet::members() const {
    std::vector<VarIndex> out;
    out.reserve(size());
    for_each_member(*this, [&](VarIndex v) { out.push_back(v); });
    return out;
}

std::string CondSet::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for_each_member(*this, [&](VarIndex v) {
        if (!first) os << ',';
        os << v;
        first = false;
    });
    os << '}';
    return os.str();
}

AncStatement causes(VarIndex cause, VarIndex effect) {
    if (cause == effect) throw InvalidArgument("ancestral statement needs two distinct variables");
    return {cause, effect, AncPolarity::Causes};
}

AncStatement not_causes(VarIndex cause, VarIndex effect) {
    if (cause == effect) throw InvalidArgument("ancestral statement needs two distinct variables");
    return {cause, effect, AncPolarity::NotCauses};
}

CiStatement canonicalize(VarIndex x, VarIndex y, CondSet cond, CiPolarity polarity) {
    if (x < 0 || y < 0 || x >= kMaxVariables || y >= kMaxVariables)
        throw InvalidArgument("variable index out of range");
    if (x == y) throw InvalidArgument("(in)dependence statement needs two distinct variables");
    if (cond.contains(x) || cond.contains(y))
        throw InvalidArgument("conditioning set contains an endpoint of the statement");
    if (x > y) std::swap(x, y);
    return {{x, y, cond}, polarity};
}

CiStatement independent(VarIndex x, VarIndex y, CondSet cond) {
    return canonicalize(x, y, cond, CiPolarity::Independent);
}

CiStatement dependent(VarIndex x, VarIndex y, CondSet cond) {
    return canonicalize(x, y, cond, CiPolarity::Dependent);
}

std::string to_string(const CiStatement& s) {
    std::ostringstream os;
    os << (s.polarity == CiPolarity::Independent ? "indep(" : "dep(") << s.triple.x << ','
       << s.triple.y << '|' << s.triple.cond.to_string() << ')';
    return os.str();
}

std::string to_string(const AncStatement& s) {
    std::ostringstream os;
    os << (s.polarity == AncPolarity::Causes ? "causes(" : "notcauses(") << s.cause << ','
       << s.effect << ')';
    return os.str();
}

// ---------------------------------------------------------------------------

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out) || out == std::numeric_limits<std::int64_t>::max())
        throw OverflowError("weight sum overflows the 64-bit milli-unit range");
    return out;
}

Weight Weight::finite(std::int64_t milli) {
    if (milli < 0) throw InvalidArgument("weights must be non-negative");
    if (milli == kHardTag) throw OverflowError("finite weight collides with the Hard sentinel");
    return Weight(milli);
}

std::int64_t Weight::value() const {
    if (is_hard()) throw std::logic_error("value() called on a Hard weight");
    return value_;
}

Weight operator+(Weight a, Weight b) {
    if (a.is_hard() || b.is_hard()) return Weight::hard();
    return Weight(checked_add(a.value_, b.value_));
}

std::string Weight::to_string() const { return is_hard() ? "inf" : std::to_string(value_); }

WeightedInput weighted(CiStatement s, Weight w) { return {s, w}; }
WeightedInput weighted(AncStatement s, Weight w) { return {s, w}; }

void validate_inputs(const std::vector<WeightedInput>& inputs, int n) {
    if (n < 1 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    for (const auto& in : inputs) {
        if (in.is_ci()) {
            const auto& t = in.ci().triple;
            if (t.x < 0 || t.x >= t.y || t.y >= n || !t.cond.fits(n) || t.cond.contains(t.x) ||
                t.cond.contains(t.y))
                throw InvalidArgument("non-canonical or out-of-range statement " + to_string(in.ci()));
        } else {
            const auto& a = in.anc();
            if (a.cause < 0 || a.effect < 0 || a.cause >= n || a.effect >= n || a.cause == a.effect)
                throw InvalidArgument("invalid ancestral statement " + to_string(a));
        }
    }
}

std::int64_t total_finite_weight(const std::vector<WeightedInput>& inputs) {
    std::int64_t total = 0;
    for (const auto& in : inputs)
        if (!in.weight.is_hard()) total = checked_add(total, in.weight.value());
    return total;
}

// ---------------------------------------------------------------------------

bool is_ancestral_structure(const std::vector<std::uint32_t>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n > kMaxVariables) return false;
    for (int x = 0; x < n; ++x) {
        if (!CondSet(rows[x]).fits(n)) return false;
        if (!((rows[x] >> x) & 1u)) return false;
    }
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y || !((rows[x] >> y) & 1u)) continue;
            if ((rows[y] >> x) & 1u) return false;
            // everything y reaches, x must reach
            if ((rows[y] & ~rows[x]) != 0) return false;
        }
    }
    return true;
}

bool is_ancestral_structure(const BoolMatrix& m) {
    const std::size_t n = m.size();
    if (n > static_cast<std::size_t>(kMaxVariables)) return false;
    std::vector<std::uint32_t> rows(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
        if (m[x].size() != n) return false;
        for (std::size_t y = 0; y < n; ++y)
            if (m[x][y]) rows[x] |= 1u << y;
    }
    return is_ancestral_structure(rows);
}

AncestralStructure AncestralStructure::identity(int n) {
    if (n < 0 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    std::vector<std::uint32_t> rows(n);
    for (int x = 0; x < n; ++x) rows[x] = 1u << x;
    return AncestralStructure(std::move(rows));
}

AncestralStructure AncestralStructure::from_rows(std::vector<std::uint32_t> rows) {
    if (!is_ancestral_structure(rows)) throw InvalidArgument("rows do not form an ancestral structure");
    return AncestralStructure(std::move(rows));
}

AncestralStructure AncestralStructure::from_matrix(const BoolMatrix& m) {
    if (!is_ancestral_structure(m)) throw InvalidArgument("matrix is not an ancestral structure");
    std::vector<std::uint32_t> rows(m.size(), 0);
    for (std::size_t x = 0; x < m.size(); ++x)
        for (std::size_t y = 0; y < m.size(); ++y)
            if (m[x][y]) rows[x] |= 1u << y;
    return AncestralStructure(std::move(rows));
}

BoolMatrix AncestralStructure::matrix() const {
    const int n = size();
    BoolMatrix m(n, std::vector<bool>(n, false));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) m[x][y] = reaches(x, y);
    return m;
}

std::string AncestralStructure::to_string() const {
    std::ostringstream os;
    bool first = true;
    os << '[';
    for (int x = 0; x < size(); ++x)
        for (int y = 0; y < size(); ++y)
            if (x != y && reaches(x, y)) {
                if (!first) os << ", ";
                os << x << "=>" << y;
                first = false;
            }
    os << ']';
    return os.str();
}

std::strong_ordering compare_row_major(const AncestralStructure& a, const AncestralStructure& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    for (int x = 0; x < a.size(); ++x) {
        const std::uint32_t diff = a.row(x) ^ b.row(x);
        if (diff == 0) continue;
        const int y = std::countr_zero(diff);
        return a.reaches(x, y) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return std::strong_ordering::equal;
}

AncestralStructure transitive_close(const std::vector<std::pair<VarIndex, VarIndex>>& edges, int n) {
    if (n < 0 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    std::vector<std::uint32_t> rows(n);
    for (int x = 0; x < n; ++x) rows[x] = 1u << x;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
        rows[a] |= 1u << b;
    }
    // Warshall over bit rows
    for (int k = 0; k < n; ++k)
        for (int x = 0; x < n; ++x)
            if ((rows[x] >> k) & 1u) rows[x] |= rows[k];
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (((rows[x] >> y) & 1u) && ((rows[y] >> x) & 1u))
                throw CycleError("edges imply " + std::to_string(x) + " => " + std::to_string(y) +
                                 " => " + std::to_string(x));
    return AncestralStructure::from_rows(std::move(rows));
}

// ---------------------------------------------------------------------------
// Enumeration: a partial order on {0..k} is a partial order on {0..k-1} plus the set D of
// elements below k (down-closed) and the set U above k (up-closed), with d => u for all pairs.

namespace {

struct Extension {
    std::uint32_t down;
    std::uint32_t up;
};

std::vector<Extension> extensions(const std::vector<std::uint32_t>& rows) {
    const int k = static_cast<int>(rows.size());
    const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
    std::vector<std::uint32_t> cols(k, 0);
    for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y)
            if ((rows[x] >> y) & 1u) cols[y] |= 1u << x;

    std::vector<std::uint32_t> down_sets, up_sets;
    for (std::uint32_t s = 0; s <= full; ++s) {
        bool down = true, up = true;
        for (std::uint32_t b = s; b != 0; b &= b - 1) {
            const int v = std::countr_zero(b);
            if ((cols[v] & ~s) != 0) down = false;
            if ((rows[v] & ~s) != 0) up = false;
        }
        if (down) down_sets.push_back(s);
        if (up) up_sets.push_back(s);
    }
    std::vector<Extension> out;
    for (std::uint32_t d : down_sets) {
        std::uint32_t common = full;
        for (std::uint32_t b = d; b != 0; b &= b - 1) common &= rows[std::countr_zero(b)];
        for (std::uint32_t u : up_sets)
            if ((u & d) == 0 && (u & ~common) == 0) out.push_back({d, u});
    }
    return out;
}

std::vector<std::uint32_t> extend(const std::vector<std::uint32_t>& rows, Extension e) {
    const int k = static_cast<int>(rows.size());
    std::vector<std::uint32_t> next(rows);
    for (std::uint32_t b = e.down; b != 0; b &= b - 1) next[std::countr_zero(b)] |= 1u << k;
    next.push_back((1u << k) | e.up);
    return next;
}

bool enumerate_rec(const std::vector<std::uint32_t>& rows, int n,
                   const std::function<bool(const AncestralStructure&)>& visit) {
    if (static_cast<int>(rows.size()) == n) return visit(AncestralStructure::from_rows(rows));
    for (const Extension& e : extensions(rows))
        if (!enumerate_rec(extend(rows, e), n, visit)) return false;
    return true;
}

std::uint64_t count_rec(const std::vector<std::uint32_t>& rows, int n) {
    if (static_cast<int>(rows.size()) == n) return 1;
    const auto ext = extensions(rows);
    if (static_cast<int>(rows.size()) + 1 == n) return ext.size();
    std::uint64_t total = 0;
    for (const Extension& e : ext) total += count_rec(extend(rows, e), n);
    return total;
}

}  // namespace

void for_each_ancestral_structure(int n, const std::function<bool(const AncestralStructure&)>& visit) {
    if (n < 0 || n > kMaxEnumerateVariables)
        throw GuardError("enumeration of ancestral structures is limited to n <= 6");
    enumerate_rec({}, n, visit);
}

std::vector<AncestralStructure> enumerate_ancestral_structures(int n) {
    std::vector<AncestralStructure> out;
    for_each_ancestral_structure(n, [&](const AncestralStructure& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

std::uint64_t count_ancestral_structures(int n) {
    if (n < 0 || n > kMaxCountVariables)
        throw GuardError("counting ancestral structures is limited to n <= 7");
    return count_rec({}, n);
}

}  // namespace aci
