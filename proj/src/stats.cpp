#include "aci/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace aci {

int Dataset::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back({});
    return out;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
    Dataset data;
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cells = split_commas(t);
        if (!have_header) {
            for (auto& c : cells)
                if (c.empty()) throw ParseError("empty variable name in header", lineno);
            data.names = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != data.names.size())
            throw ParseError("expected " + std::to_string(data.names.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             lineno);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
                throw ParseError("not a finite number: '" + c + "'", lineno);
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("missing header row", 0);
    if (std::set<std::string>(data.names.begin(), data.names.end()).size() != data.names.size())
        throw ShapeError("duplicate variable names");
    if (data.names.size() > static_cast<std::size_t>(kMaxVariables))
        throw ShapeError("more than " + std::to_string(kMaxVariables) + " variables");
    if (rows.size() < 2) throw ShapeError("a dataset needs at least two samples");

    data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) data.values(i, j) = rows[i][j];
    for (int j = 0; j < data.variables(); ++j) {
        const auto col = data.values.col(j);
        if ((col.array() == col(0)).all())
            throw DegenerateColumnError("column '" + data.names[j] + "' has zero variance");
    }
    return data;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    for (std::size_t j = 0; j < data.names.size(); ++j) out << (j ? "," : "") << data.names[j];
    out << '\n';
    out << std::setprecision(17);
    for (int i = 0; i < data.samples(); ++i) {
        for (int j = 0; j < data.variables(); ++j) out << (j ? "," : "") << data.values(i, j);
        out << '\n';
    }
}

void save_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_dataset(out, data);
}

namespace {

void check_triple(int n, VarIndex x, VarIndex y, CondSet cond) {
    if (x < 0 || y < 0 || x >= n || y >= n || x == y) throw InvalidArgument("invalid variable pair");
    if (!cond.fits(n) || cond.contains(x) || cond.contains(y)) throw InvalidArgument("invalid conditioning set");
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& values) {
    Eigen::MatrixXd centered = values.rowwise() - values.colwise().mean();
    Eigen::VectorXd norms = centered.colwise().norm();
    for (Eigen::Index j = 0; j < centered.cols(); ++j) centered.col(j) /= norms(j);
    return centered.transpose() * centered;
}

double regression_partial(const Dataset& data, VarIndex x, VarIndex y, CondSet cond) {
    const auto members = cond.members();
    const Eigen::Index n = data.samples();
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(members.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < members.size(); ++k) design.col(k + 1) = data.values.col(members[k]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) throw SingularError("conditioning columns are collinear");
    const Eigen::VectorXd rx = data.values.col(x) - design * qr.solve(data.values.col(x));
    const Eigen::VectorXd ry = data.values.col(y) - design * qr.solve(data.values.col(y));
    const double nx = rx.norm();
    const double ny = ry.norm();
    const double scale = std::max(data.values.col(x).norm(), data.values.col(y).norm());
    if (nx <= 1e-12 * scale || ny <= 1e-12 * scale)
        throw SingularError("a variable is fully explained by the conditioning set");
    return rx.dot(ry) / (nx * ny);
}

}  // namespace

double partial_correlation_recursive(const Eigen::MatrixXd& corr, VarIndex x, VarIndex y, CondSet cond) {
    if (cond.size() == 0) return corr(x, y);
    // peel off the highest conditioning variable
    const VarIndex z = 31 - std::countl_zero(cond.bits());
    const CondSet rest = cond.without(z);
    const double rxy = partial_correlation_recursive(corr, x, y, rest);
    const double rxz = partial_correlation_recursive(corr, x, z, rest);
    const double ryz = partial_correlation_recursive(corr, y, z, rest);
    const double denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz);
    if (denom <= 1e-20) throw SingularError("conditioning columns are collinear");
    return (rxy - rxz * ryz) / std::sqrt(denom);
}

double partial_correlation(const Dataset& data, VarIndex x, VarIndex y, CondSet cond,
                           PartialCorrelationMethod method) {
    check_triple(data.variables(), x, y, cond);
    if (data.samples() <= cond.size() + 3) throw InvalidArgument("too few samples for this conditioning set");
    if (method == PartialCorrelationMethod::Regression) return regression_partial(data, x, y, cond);
    return partial_correlation_recursive(correlation_matrix(data.values), x, y, cond);
}

double clamp_correlation(double r) { return std::clamp(r, -kCorrelationClamp, kCorrelationClamp); }

double fisher_z_pvalue(double r, long samples, int order) {
    if (!(std::abs(r) < 1.0)) throw InvalidArgument("|r| must be below one");
    if (order < 0 || samples - order - 3 <= 0) throw InvalidArgument("too few samples for this order");
    const double stat = std::sqrt(static_cast<double>(samples - order - 3)) * std::atanh(r);
    return std::erfc(std::abs(stat) / std::sqrt(2.0));
}

WeightedVerdict frequentist_weight(double p, double alpha, double log_p_floor) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p-value outside [0, 1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha outside (0, 1)");
    const double log_p = p > 0.0 ? std::max(std::log(p), log_p_floor) : log_p_floor;
    const auto w = std::llround(1000.0 * std::abs(log_p - std::log(alpha)));
    return {p < alpha, Weight::finite(w)};
}

CiTestReport ci_inputs_from_data(const Dataset& data, const TestConfig& config) {
    const int n = data.variables();
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InvalidArgument("alpha outside (0, 1)");
    if (config.max_order < 0) throw InvalidArgument("negative maximum order");
    if (data.samples() <= config.max_order + 3) throw InvalidArgument("too few samples for the maximum order");

    std::vector<CiTriple> triples;
    for (VarIndex x = 0; x < n; ++x)
        for (VarIndex y = x + 1; y < n; ++y) {
            const std::uint32_t others = ((n >= 32 ? 0u : (1u << n)) - 1) & ~((1u << x) | (1u << y));
            for (std::uint32_t s = others;; s = (s - 1) & others) {
                if (std::popcount(s) <= config.max_order) triples.push_back({x, y, CondSet(s)});
                if (s == 0) break;
            }
        }
    std::sort(triples.begin(), triples.end());

    CiTestReport report;
    for (const auto& t : triples) {
        try {
            const double r = clamp_correlation(partial_correlation(data, t.x, t.y, t.cond));
            const double p = fisher_z_pvalue(r, data.samples(), t.order());
            const auto v = frequentist_weight(p, config.alpha, config.log_p_floor);
            report.inputs.push_back(
                weighted(CiStatement{t, v.reject ? CiPolarity::Dependent : CiPolarity::Independent}, v.weight));
        } catch (const SingularError& e) {
            report.skipped.push_back({t, e.what()});
        }
    }
    return report;
}

double welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InvalidArgument("each sample needs at least two values");
    auto moments = [](std::span<const double> s) {
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double ss = 0.0;
        for (double v : s) ss += (v - mean) * (v - mean);
        return std::pair(mean, ss / static_cast<double>(s.size() - 1));
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double sa = va / na;
    const double sb = vb / nb;
    if (sa + sb <= 0.0) throw InvalidArgument("both samples are constant");
    const double t = (ma - mb) / std::sqrt(sa + sb);
    const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    if (t == 0.0) return 1.0;
    boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

std::vector<WeightedInput> ancestral_inputs_from_intervention(const Dataset& obs, const Dataset& interv,
                                                              VarIndex target, const TestConfig& config) {
    if (obs.names != interv.names) throw ShapeError("observational and interventional variables differ");
    if (target < 0 || target >= obs.variables()) throw InvalidArgument("intervention target out of range");
    std::vector<WeightedInput> out;
    for (VarIndex y = 0; y < obs.variables(); ++y) {
        if (y == target) continue;
        const Eigen::VectorXd a = obs.values.col(y);
        const Eigen::VectorXd b = interv.values.col(y);
        const double p = welch_t_test({a.data(), static_cast<std::size_t>(a.size())},
                                      {b.data(), static_cast<std::size_t>(b.size())});
        const auto v = frequentist_weight(p, config.alpha, config.log_p_floor);
        out.push_back(weighted(v.reject ? causes(target, y) : not_causes(target, y), v.weight));
    }
    return out;
}

}  // namespace aci
