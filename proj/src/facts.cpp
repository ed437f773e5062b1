#include "aci/facts.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace aci {

namespace {

using StatementKey = std::variant<CiStatement, AncStatement>;

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

bool valid_name(const std::string& name) {
    return !name.empty() && name.find_first_of("#:|,") == std::string::npos;
}

Weight parse_weight(const std::string& text, int line) {
    if (text == "inf") return Weight::hard();
    std::int64_t v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end || v < 0)
        throw ParseError("bad weight '" + text + "'", line);
    try {
        return Weight::finite(v);
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
}

class Reader {
public:
    FactFile file;

    void parse_line(const std::string& raw, int line) {
        std::string text = raw.substr(0, raw.find('#'));
        const auto tokens = split_ws(text);
        if (tokens.empty()) return;
        if (tokens[0] == "vars") {
            read_vars(tokens, line);
            return;
        }
        if (!have_vars_) throw ParseError("statement before the vars line", line);

        const auto colon = text.find(':');
        if (colon == std::string::npos) throw ParseError("missing ': weight'", line);
        const auto weight_tokens = split_ws(text.substr(colon + 1));
        if (weight_tokens.size() != 1) throw ParseError("expected exactly one weight", line);
        const Weight weight = parse_weight(weight_tokens[0], line);

        std::string head = text.substr(0, colon);
        std::vector<std::string> cond_names;
        bool has_bar = false;
        if (const auto bar = head.find('|'); bar != std::string::npos) {
            has_bar = true;
            cond_names = split_ws(head.substr(bar + 1));
            head = head.substr(0, bar);
        }
        const auto words = split_ws(head);
        if (words.size() != 3) throw ParseError("expected '<kind> <x> <y>'", line);
        const std::string& kind = words[0];
        const VarIndex x = lookup(words[1], line);
        const VarIndex y = lookup(words[2], line);
        if (x == y) throw ParseError("a statement needs two distinct variables", line);

        WeightedInput input;
        if (kind == "indep" || kind == "dep") {
            CondSet cond;
            for (const auto& name : cond_names) {
                const VarIndex v = lookup(name, line);
                if (cond.contains(v)) throw ParseError("variable repeated in conditioning set", line);
                cond = cond.with(v);
            }
            const auto polarity = kind == "indep" ? CiPolarity::Independent : CiPolarity::Dependent;
            try {
                input = weighted(canonicalize(x, y, cond, polarity), weight);
            } catch (const InvalidArgument& e) {
                throw ParseError(e.what(), line);
            }
        } else if (kind == "causes" || kind == "notcauses") {
            if (has_bar) throw ParseError("ancestral statements take no conditioning set", line);
            input = weighted(kind == "causes" ? causes(x, y) : not_causes(x, y), weight);
        } else {
            throw ParseError("unknown statement kind '" + kind + "'", line);
        }
        if (!seen_.insert(input.statement).second)
            throw ParseError("duplicate statement '" + text_of(input) + "'", line);
        file.inputs.push_back(input);
    }

private:
    bool have_vars_ = false;
    std::map<std::string, VarIndex> index_;
    std::set<StatementKey> seen_;

    void read_vars(const std::vector<std::string>& tokens, int line) {
        if (have_vars_) throw ParseError("second vars line", line);
        if (tokens.size() < 2) throw ParseError("vars line names no variables", line);
        if (static_cast<int>(tokens.size()) - 1 > kMaxVariables) throw ParseError("too many variables", line);
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            if (!valid_name(tokens[i])) throw ParseError("bad variable name '" + tokens[i] + "'", line);
            if (!index_.emplace(tokens[i], static_cast<VarIndex>(i - 1)).second)
                throw ParseError("variable '" + tokens[i] + "' listed twice", line);
            file.names.push_back(tokens[i]);
        }
        have_vars_ = true;
    }

    VarIndex lookup(const std::string& name, int line) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ParseError("unknown variable '" + name + "'", line);
        return it->second;
    }

    std::string text_of(const WeightedInput& in) const {
        std::ostringstream out;
        write_facts(out, file.names, {in});
        std::string s = out.str();
        s = s.substr(s.find('\n') + 1);
        return s.substr(0, s.rfind(" :"));
    }
};

void write_statement(std::ostream& out, const std::vector<std::string>& names, const WeightedInput& in) {
    const auto name = [&](VarIndex v) -> const std::string& {
        if (v < 0 || v >= static_cast<int>(names.size())) throw InvalidArgument("statement outside the names");
        return names[v];
    };
    if (in.is_ci()) {
        const auto& s = in.ci();
        out << (s.polarity == CiPolarity::Independent ? "indep " : "dep ") << name(s.triple.x) << ' '
            << name(s.triple.y);
        if (!s.triple.cond.empty()) {
            out << " |";
            for_each_member(s.triple.cond, [&](VarIndex v) { out << ' ' << name(v); });
        }
    } else {
        const auto& s = in.anc();
        out << (s.polarity == AncPolarity::Causes ? "causes " : "notcauses ") << name(s.cause) << ' '
            << name(s.effect);
    }
    out << " : " << in.weight.to_string() << '\n';
}

}  // namespace

FactFile read_facts(std::istream& in) {
    Reader reader;
    int line = 0;
    for (std::string raw; std::getline(in, raw);) reader.parse_line(raw, ++line);
    return std::move(reader.file);
}

FactFile load_facts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    return read_facts(in);
}

FactFile merge_facts(const std::vector<FactFile>& files) {
    FactFile out;
    std::set<StatementKey> seen;
    for (const auto& f : files) {
        if (f.names.empty()) continue;
        if (out.names.empty())
            out.names = f.names;
        else if (out.names != f.names)
            throw ParseError("fact files declare different vars lines", 0);
        for (const auto& in : f.inputs) {
            if (!seen.insert(in.statement).second) {
                std::ostringstream text;
                write_statement(text, out.names, in);
                std::string s = text.str();
                throw ParseError("statement repeated across files: " + s.substr(0, s.rfind(" :")), 0);
            }
            out.inputs.push_back(in);
        }
    }
    return out;
}

void write_facts(std::ostream& out, const std::vector<std::string>& names, const std::vector<WeightedInput>& inputs) {
    for (const auto& n : names)
        if (!valid_name(n)) throw InvalidArgument("variable name '" + n + "' cannot be written");
    out << "vars";
    for (const auto& n : names) out << ' ' << n;
    out << '\n';
    for (const auto& in : inputs) write_statement(out, names, in);
}

void save_facts(const std::string& path, const std::vector<std::string>& names,
                const std::vector<WeightedInput>& inputs, bool append) {
    FactFile combined{names, inputs};
    if (append) {
        std::ifstream existing(path);
        if (existing) {
            FactFile old = read_facts(existing);
            combined = merge_facts({old, combined});
        }
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    write_facts(out, combined.names, combined.inputs);
    if (!out) throw InvalidArgument("failed writing " + path);
}

std::vector<std::string> default_names(int n) {
    std::vector<std::string> names;
    for (int v = 0; v < n; ++v) names.push_back("X" + std::to_string(v));
    return names;
}

}  // namespace aci
