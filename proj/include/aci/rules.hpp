#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "aci/core.hpp"

namespace aci {

/// Set of (triple, polarity) facts. Both polarities of one triple may be present.
class FactSet {
public:
    FactSet() = default;
    FactSet(std::initializer_list<CiStatement> facts);

    /// Returns true when the fact was not present before.
    bool insert(const CiStatement& fact);
    bool insert(const CiTriple& t, CiPolarity p) { return insert(CiStatement{t, p}); }
    bool contains(const CiStatement& fact) const;
    bool contains(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) const;

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    /// Sorted by (triple, polarity).
    std::vector<CiStatement> to_vector() const;

    bool includes(const FactSet& other) const;
    friend bool operator==(const FactSet& a, const FactSet& b) {
        return a.count_ == b.count_ && a.includes(b);
    }

private:
    static std::uint64_t key(VarIndex a, VarIndex b, CondSet cond);
    std::unordered_map<std::uint64_t, std::uint8_t> flags_;
    std::size_t count_ = 0;
};

/// Chosen polarity for every input triple, plus the facts the derivation rules add on top.
struct CiAssignment {
    std::map<CiTriple, CiPolarity> truth;
    /// Facts of the closure not already in truth. Informational; consistency checks recompute it.
    std::vector<CiStatement> derived;

    FactSet seeds() const;
};

/// Builds an assignment from chosen polarities and records its derived facts.
CiAssignment make_ci_assignment(int n, std::map<CiTriple, CiPolarity> truth);

struct JointAssignment {
    AncestralStructure structure;
    CiAssignment ci;
};

/// Least fixpoint of the four derivation rules (minimal-dependence, minimal-independence,
/// independence transfer and collider rules), one conditioning variable at a time.
/// The result contains the seeds.
FactSet derive_closure(int n, const FactSet& seeds);
FactSet derive_closure(const AncestralStructure& structure, const FactSet& seeds);

/// Requirements a fact set imposes on the ancestral structure.
struct StructureConstraints {
    /// Some input triple has a derived fact of the opposite polarity.
    bool incoherent = false;
    /// Row z must intersect mask: z causes one of the listed variables.
    std::vector<std::pair<VarIndex, std::uint32_t>> must_cause_any;
    /// Row z must avoid mask: z causes none of the listed variables.
    std::vector<std::pair<VarIndex, std::uint32_t>> must_cause_none;
    struct Implication {
        VarIndex from;
        VarIndex to;
        std::uint32_t mask;
    };
    /// from => to requires from to cause some member of mask.
    std::vector<Implication> ancestor_needs;

    bool satisfied_by(const AncestralStructure& s) const;
};

StructureConstraints constraints_from_facts(int n, const std::map<CiTriple, CiPolarity>& truth,
                                            const FactSet& closure);

bool check_consistency(const AncestralStructure& structure, const CiAssignment& ci);

/// Sum of weights of violated inputs; Hard when a Hard input is violated.
Weight loss(const JointAssignment& joint, const std::vector<WeightedInput>& inputs);

/// Whether a single input is violated by the joint assignment.
bool violates(const JointAssignment& joint, const WeightedInput& input);

}  // namespace aci
