#include "aci/rules.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

namespace aci {

namespace {

constexpr std::uint8_t bit_of(CiPolarity p) { return p == CiPolarity::Dependent ? 1 : 2; }

}  // namespace

FactSet::FactSet(std::initializer_list<CiStatement> facts) {
    for (const auto& f : facts) insert(f);
}

std::uint64_t FactSet::key(VarIndex a, VarIndex b, CondSet cond) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 37) | (static_cast<std::uint64_t>(b) << 32) | cond.bits();
}

bool FactSet::insert(const CiStatement& f) {
    auto& slot = flags_[key(f.triple.x, f.triple.y, f.triple.cond)];
    const std::uint8_t b = bit_of(f.polarity);
    if (slot & b) return false;
    slot |= b;
    ++count_;
    return true;
}

bool FactSet::contains(const CiStatement& f) const {
    return contains(f.triple.x, f.triple.y, f.triple.cond, f.polarity);
}

bool FactSet::contains(VarIndex a, VarIndex b, CondSet cond, CiPolarity p) const {
    auto it = flags_.find(key(a, b, cond));
    return it != flags_.end() && (it->second & bit_of(p));
}

std::vector<CiStatement> FactSet::to_vector() const {
    std::vector<CiStatement> out;
    out.reserve(count_);
    for (auto [k, fl] : flags_) {
        CiTriple t{static_cast<VarIndex>(k >> 37), static_cast<VarIndex>((k >> 32) & 31u),
                   CondSet(static_cast<std::uint32_t>(k & 0xffffffffu))};
        if (fl & 2) out.push_back({t, CiPolarity::Independent});
        if (fl & 1) out.push_back({t, CiPolarity::Dependent});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool FactSet::includes(const FactSet& other) const {
    for (auto [k, fl] : other.flags_) {
        auto it = flags_.find(k);
        if (it == flags_.end() || (it->second & fl) != fl) return false;
    }
    return true;
}

FactSet CiAssignment::seeds() const {
    FactSet s;
    for (const auto& [t, p] : truth) s.insert(t, p);
    return s;
}

CiAssignment make_ci_assignment(int n, std::map<CiTriple, CiPolarity> truth) {
    CiAssignment ci{std::move(truth), {}};
    const FactSet seeds = ci.seeds();
    for (const auto& f : derive_closure(n, seeds).to_vector())
        if (!seeds.contains(f)) ci.derived.push_back(f);
    return ci;
}

// ---------------------------------------------------------------------------
// Semi-naive fixpoint: every newly added fact is matched against each premise position of
// each rule, with the remaining premises looked up in the current set.

namespace {

using P = CiPolarity;

class Closure {
public:
    Closure(int n, const FactSet& seeds) : n_(n), facts_(seeds) {
        for (const auto& f : seeds.to_vector()) queue_.push_back(f);
    }

    FactSet run() {
        while (!queue_.empty()) {
            const CiStatement f = queue_.front();
            queue_.pop_front();
            fire(f.triple.x, f.triple.y, f.triple.cond, f.polarity);
        }
        return std::move(facts_);
    }

private:
    bool has(VarIndex a, VarIndex b, CondSet s, P p) const { return facts_.contains(a, b, s, p); }

    void add(VarIndex a, VarIndex b, CondSet s, P p) {
        const CiStatement f = canonicalize(a, b, s, p);
        if (facts_.insert(f)) queue_.push_back(f);
    }

    // Variables outside s and not in excluded.
    template <typename Fn>
    void for_each_outside(CondSet s, std::uint32_t excluded, Fn&& fn) const {
        for (VarIndex v = 0; v < n_; ++v)
            if (!s.contains(v) && !((excluded >> v) & 1u)) fn(v);
    }

    void fire(VarIndex a, VarIndex b, CondSet s, P pol) {
        const std::uint32_t ab = (1u << a) | (1u << b);
        const VarIndex ends[2][2] = {{a, b}, {b, a}};

        if (pol == P::Independent) {
            // Minimal dependence, f = indep(X,Y|W): dep(X,Y|W+Z) gives dep(X,Z|W), dep(Y,Z|W).
            for_each_outside(s, ab, [&](VarIndex z) {
                if (has(a, b, s.with(z), P::Dependent)) {
                    add(a, z, s, P::Dependent);
                    add(b, z, s, P::Dependent);
                }
            });
            // Minimal independence, f = indep(X,Y|W+Z): dep(X,Y|W) gives dep(X,Z|W), dep(Y,Z|W).
            for_each_member(s, [&](VarIndex z) {
                const CondSet w = s.without(z);
                if (has(a, b, w, P::Dependent)) {
                    add(a, z, w, P::Dependent);
                    add(b, z, w, P::Dependent);
                }
            });
            // Transfer, f = indep(X,Y|W+Z) in second position.
            for (const auto& e : ends) {
                const VarIndex x = e[0], y = e[1];
                for_each_member(s, [&](VarIndex z) {
                    const CondSet w = s.without(z);
                    if (!has(x, y, w, P::Dependent)) return;
                    for_each_outside(w, ab | (1u << z), [&](VarIndex bv) {
                        if (has(x, z, w.with(bv), P::Independent)) add(x, y, w.with(bv), P::Independent);
                    });
                });
            }
            // Transfer, f = indep(X,Z|W+B) in third position.
            for (const auto& e : ends) {
                const VarIndex x = e[0], z = e[1];
                for_each_member(s, [&](VarIndex bv) {
                    const CondSet w = s.without(bv);
                    for_each_outside(s, ab, [&](VarIndex y) {
                        if (has(x, y, w, P::Dependent) && has(x, y, w.with(z), P::Independent))
                            add(x, y, w.with(bv), P::Independent);
                    });
                });
            }
            // Collider, f = indep(X,Y|W): dep(Z,X|W), dep(Z,Y|W) give dep(X,Y|W+Z).
            for_each_outside(s, ab, [&](VarIndex z) {
                if (has(z, a, s, P::Dependent) && has(z, b, s, P::Dependent))
                    add(a, b, s.with(z), P::Dependent);
            });
        } else {
            // Minimal dependence, f = dep(X,Y|W+Z): indep(X,Y|W).
            for_each_member(s, [&](VarIndex z) {
                const CondSet w = s.without(z);
                if (has(a, b, w, P::Independent)) {
                    add(a, z, w, P::Dependent);
                    add(b, z, w, P::Dependent);
                }
            });
            // Minimal independence, f = dep(X,Y|W): indep(X,Y|W+Z).
            for_each_outside(s, ab, [&](VarIndex z) {
                if (has(a, b, s.with(z), P::Independent)) {
                    add(a, z, s, P::Dependent);
                    add(b, z, s, P::Dependent);
                }
            });
            // Transfer, f = dep(X,Y|W) in first position.
            for (const auto& e : ends) {
                const VarIndex x = e[0], y = e[1];
                for_each_outside(s, ab, [&](VarIndex z) {
                    if (!has(x, y, s.with(z), P::Independent)) return;
                    for_each_outside(s, ab | (1u << z), [&](VarIndex bv) {
                        if (has(x, z, s.with(bv), P::Independent)) add(x, y, s.with(bv), P::Independent);
                    });
                });
            }
            // Collider, f = dep(Z,X|W) as either dependence premise.
            for (const auto& e : ends) {
                const VarIndex z = e[0], x = e[1];
                for_each_outside(s, ab, [&](VarIndex y) {
                    if (has(z, y, s, P::Dependent) && has(x, y, s, P::Independent))
                        add(x, y, s.with(z), P::Dependent);
                });
            }
        }
    }

    int n_;
    FactSet facts_;
    std::deque<CiStatement> queue_;
};

}  // namespace

FactSet derive_closure(int n, const FactSet& seeds) {
    if (n < 0 || n > kMaxVariables) throw InvalidArgument("variable count out of range");
    return Closure(n, seeds).run();
}

FactSet derive_closure(const AncestralStructure& structure, const FactSet& seeds) {
    return derive_closure(structure.size(), seeds);
}

// ---------------------------------------------------------------------------

bool StructureConstraints::satisfied_by(const AncestralStructure& s) const {
    if (incoherent) return false;
    for (auto [z, mask] : must_cause_any)
        if ((s.row(z) & mask) == 0) return false;
    for (auto [z, mask] : must_cause_none)
        if ((s.row(z) & mask) != 0) return false;
    for (const auto& imp : ancestor_needs)
        if (s.reaches(imp.from, imp.to) && (s.row(imp.from) & imp.mask) == 0) return false;
    return true;
}

StructureConstraints constraints_from_facts(int n, const std::map<CiTriple, CiPolarity>& truth,
                                            const FactSet& closure) {
    StructureConstraints out;
    for (const auto& [t, p] : truth)
        if (closure.contains(t.x, t.y, t.cond, opposite(p))) {
            out.incoherent = true;
            return out;
        }

    std::set<std::pair<VarIndex, std::uint32_t>> any, none;
    std::set<std::tuple<VarIndex, VarIndex, std::uint32_t>> needs;
    for (const auto& f : closure.to_vector()) {
        const auto [x, y, w] = f.triple;
        const std::uint32_t xy = (1u << x) | (1u << y);
        if (f.polarity == P::Independent) {
            // an independence forbids x => y unless x causes part of the conditioning set
            needs.insert({x, y, w.bits()});
            needs.insert({y, x, w.bits()});
        }
        for (VarIndex z = 0; z < n; ++z) {
            if (w.contains(z) || z == x || z == y) continue;
            const CondSet u = w.with(z);
            if (f.polarity == P::Dependent && closure.contains(x, y, u, P::Independent))
                any.insert({z, xy | w.bits()});
            if (f.polarity == P::Independent && closure.contains(x, y, u, P::Dependent))
                none.insert({z, xy | w.bits()});
        }
    }
    out.must_cause_any.assign(any.begin(), any.end());
    out.must_cause_none.assign(none.begin(), none.end());
    for (auto [a, b, m] : needs) out.ancestor_needs.push_back({a, b, m});
    return out;
}

bool check_consistency(const AncestralStructure& structure, const CiAssignment& ci) {
    const int n = structure.size();
    for (const auto& [t, p] : ci.truth)
        if (t.y >= n || !t.cond.fits(n)) return false;
    const FactSet closure = derive_closure(n, ci.seeds());
    return constraints_from_facts(n, ci.truth, closure).satisfied_by(structure);
}

bool violates(const JointAssignment& joint, const WeightedInput& input) {
    if (input.is_ci()) {
        const auto& s = input.ci();
        auto it = joint.ci.truth.find(s.triple);
        return it == joint.ci.truth.end() || it->second != s.polarity;
    }
    const auto& a = input.anc();
    const bool holds = joint.structure.reaches(a.cause, a.effect);
    return a.polarity == AncPolarity::Causes ? !holds : holds;
}

Weight loss(const JointAssignment& joint, const std::vector<WeightedInput>& inputs) {
    Weight total = Weight::zero();
    for (const auto& in : inputs)
        if (violates(joint, in)) total += in.weight;
    return total;
}

}  // namespace aci
