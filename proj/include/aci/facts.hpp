#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aci/core.hpp"

namespace aci {

/// Line-oriented statement lists:
///
///     vars A B C
///     indep A B | C : 1609
///     dep A C : 250
///     causes A B : inf
///     notcauses B A : 3000
///
/// '#' starts a comment. The `vars` line must precede every statement; a file holding no
/// statements may omit it. Weights are nonnegative integers (milli-log-units) or `inf`.
struct FactFile {
    std::vector<std::string> names;  // empty when the file has no vars line
    std::vector<WeightedInput> inputs;

    int variables() const { return static_cast<int>(names.size()); }
};

/// Throws ParseError (with the line number) on malformed lines, unknown or repeated names and
/// duplicate canonical statements.
FactFile read_facts(std::istream& in);
FactFile load_facts(const std::string& path);

/// Concatenates files. Files with statements must share one vars line; a repeated canonical
/// statement across files is a ParseError with line 0.
FactFile merge_facts(const std::vector<FactFile>& files);

void write_facts(std::ostream& out, const std::vector<std::string>& names,
                 const std::vector<WeightedInput>& inputs);
void save_facts(const std::string& path, const std::vector<std::string>& names,
                const std::vector<WeightedInput>& inputs, bool append = false);

/// X0, X1, ...
std::vector<std::string> default_names(int n);

}  // namespace aci
