#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace aci {

/// Largest number of variables any instance may have (one machine word per set).
inline constexpr int kMaxVariables = 31;

using VarIndex = int;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class GuardError : public Error {
public:
    using Error::Error;
};

class CycleError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line) : Error(what), line_(line) {}
    /// 1-based line number of the offending line, 0 when not tied to a line.
    int line() const { return line_; }

private:
    int line_;
};

// ---------------------------------------------------------------------------
// CondSet

/// A set of variables stored as a bitmask (bit v set means variable v is a member).
class CondSet {
public:
    constexpr CondSet() = default;
    constexpr explicit CondSet(std::uint32_t bits) : bits_(bits) {}

    static CondSet of(std::initializer_list<VarIndex> vars);

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr bool contains(VarIndex v) const { return (bits_ >> v) & 1u; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr CondSet with(VarIndex v) const { return CondSet(bits_ | (1u << v)); }
    constexpr CondSet without(VarIndex v) const { return CondSet(bits_ & ~(1u << v)); }
    constexpr bool fits(int n) const { return n >= 32 || (bits_ >> n) == 0; }

    std::vector<VarIndex> members() const;
    std::string to_string() const;

    friend constexpr auto operator<=>(CondSet, CondSet) = default;

private:
    std::uint32_t bits_ = 0;
};

/// Calls fn(v) for every member of s in increasing order.
template <typename Fn>
void for_each_member(CondSet s, Fn&& fn) {
    for (std::uint32_t b = s.bits(); b != 0; b &= b - 1) fn(std::countr_zero(b));
}

// ---------------------------------------------------------------------------
// Statements

enum class CiPolarity : std::uint8_t { Independent, Dependent };
enum class AncPolarity : std::uint8_t { Causes, NotCauses };

constexpr CiPolarity opposite(CiPolarity p) {
    return p == CiPolarity::Independent ? CiPolarity::Dependent : CiPolarity::Independent;
}
constexpr AncPolarity opposite(AncPolarity p) {
    return p == AncPolarity::Causes ? AncPolarity::NotCauses : AncPolarity::Causes;
}

/// Unordered pair with a conditioning set; always x < y and x, y not in cond.
struct CiTriple {
    VarIndex x = 0;
    VarIndex y = 1;
    CondSet cond;

    int order() const { return cond.size(); }
    friend auto operator<=>(const CiTriple&, const CiTriple&) = default;
};

struct CiStatement {
    CiTriple triple;
    CiPolarity polarity = CiPolarity::Independent;

    friend auto operator<=>(const CiStatement&, const CiStatement&) = default;
};

/// cause => effect (Causes) or cause =/=> effect (NotCauses).
struct AncStatement {
    VarIndex cause = 0;
    VarIndex effect = 1;
    AncPolarity polarity = AncPolarity::Causes;

    AncStatement negated() const { return {cause, effect, opposite(polarity)}; }
    friend auto operator<=>(const AncStatement&, const AncStatement&) = default;
};

AncStatement causes(VarIndex cause, VarIndex effect);
AncStatement not_causes(VarIndex cause, VarIndex effect);

/// Builds the canonical form of an (in)dependence statement; the smaller index goes first.
/// Throws InvalidArgument when x == y or either endpoint is in cond.
CiStatement canonicalize(VarIndex x, VarIndex y, CondSet cond, CiPolarity polarity);

CiStatement independent(VarIndex x, VarIndex y, CondSet cond = {});
CiStatement dependent(VarIndex x, VarIndex y, CondSet cond = {});

std::string to_string(const CiStatement& s);
std::string to_string(const AncStatement& s);

// ---------------------------------------------------------------------------
// Weight

/// Non-negative weight in milli-log-units, or the Hard (infinite) sentinel.
class Weight {
public:
    constexpr Weight() = default;

    static Weight finite(std::int64_t milli);
    static constexpr Weight hard() { return Weight(kHardTag); }
    static constexpr Weight zero() { return Weight(0); }

    constexpr bool is_hard() const { return value_ == kHardTag; }
    /// Finite value; calling this on a Hard weight is a logic error.
    std::int64_t value() const;

    /// Hard absorbs; finite sums throw OverflowError when they leave int64.
    friend Weight operator+(Weight a, Weight b);
    Weight& operator+=(Weight other) { return *this = *this + other; }

    friend constexpr bool operator==(Weight, Weight) = default;
    /// Total order with Hard above every finite value.
    friend constexpr std::strong_ordering operator<=>(Weight a, Weight b) {
        return a.value_ <=> b.value_;
    }

    std::string to_string() const;

private:
    static constexpr std::int64_t kHardTag = std::numeric_limits<std::int64_t>::max();
    constexpr explicit Weight(std::int64_t v) : value_(v) {}
    std::int64_t value_ = 0;
};

/// Adds two finite weights, throwing OverflowError on int64 overflow.
std::int64_t checked_add(std::int64_t a, std::int64_t b);

struct WeightedInput {
    std::variant<CiStatement, AncStatement> statement;
    Weight weight;

    bool is_ci() const { return std::holds_alternative<CiStatement>(statement); }
    const CiStatement& ci() const { return std::get<CiStatement>(statement); }
    const AncStatement& anc() const { return std::get<AncStatement>(statement); }
};

WeightedInput weighted(CiStatement s, Weight w);
WeightedInput weighted(AncStatement s, Weight w);

/// Checks every input references variables below n and is canonical; throws InvalidArgument.
void validate_inputs(const std::vector<WeightedInput>& inputs, int n);

/// Sum of all finite weights; throws OverflowError when the total is not representable.
std::int64_t total_finite_weight(const std::vector<WeightedInput>& inputs);

// ---------------------------------------------------------------------------
// Ancestral structures

using BoolMatrix = std::vector<std::vector<bool>>;

/// Reflexive, transitive, antisymmetric reachability relation over n variables.
/// Row x is a bitmask of every y with x => y (diagonal included).
class AncestralStructure {
public:
    static AncestralStructure identity(int n);
    /// Throws InvalidArgument unless rows describe a valid structure.
    static AncestralStructure from_rows(std::vector<std::uint32_t> rows);
    static AncestralStructure from_matrix(const BoolMatrix& m);

    int size() const { return static_cast<int>(rows_.size()); }
    bool reaches(VarIndex x, VarIndex y) const { return (rows_[x] >> y) & 1u; }
    /// True iff z => w for some w in set (the set-level causes predicate).
    bool exists_causes(VarIndex z, CondSet set) const { return (rows_[z] & set.bits()) != 0; }
    std::uint32_t row(VarIndex x) const { return rows_[x]; }
    const std::vector<std::uint32_t>& rows() const { return rows_; }

    BoolMatrix matrix() const;
    std::string to_string() const;

    friend bool operator==(const AncestralStructure&, const AncestralStructure&) = default;

private:
    explicit AncestralStructure(std::vector<std::uint32_t> rows) : rows_(std::move(rows)) {}
    std::vector<std::uint32_t> rows_;
};

/// Row-major lexicographic comparison with false < true.
std::strong_ordering compare_row_major(const AncestralStructure& a, const AncestralStructure& b);

bool is_ancestral_structure(const BoolMatrix& m);
bool is_ancestral_structure(const std::vector<std::uint32_t>& rows);

/// Reflexive-transitive closure of the given edges; throws CycleError on x => y => x.
AncestralStructure transitive_close(const std::vector<std::pair<VarIndex, VarIndex>>& edges, int n);

inline constexpr int kMaxEnumerateVariables = 6;
inline constexpr int kMaxCountVariables = 7;

/// Visits every ancestral structure over n variables exactly once in a fixed order.
/// The callback returns false to stop early. Requires n <= 6.
void for_each_ancestral_structure(int n, const std::function<bool(const AncestralStructure&)>& visit);

std::vector<AncestralStructure> enumerate_ancestral_structures(int n);

/// Number of partial orders on n labelled elements. Requires n <= 7.
std::uint64_t count_ancestral_structures(int n);

}  // namespace aci
