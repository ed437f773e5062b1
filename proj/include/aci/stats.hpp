#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aci/core.hpp"

namespace aci {

/// Samples in rows, variables in columns.
struct Dataset {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    int variables() const { return static_cast<int>(values.cols()); }
    int samples() const { return static_cast<int>(values.rows()); }
    /// Column index of a variable name, or -1.
    int index_of(const std::string& name) const;
};

class DegenerateColumnError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class SingularError : public Error {
public:
    using Error::Error;
};

/// Comma-separated values with a header row of names; '#' lines are comments.
/// Throws ParseError, ShapeError (fewer than two rows, duplicate names) or
/// DegenerateColumnError (a constant column).
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::string& path, const Dataset& data);

enum class PartialCorrelationMethod {
    Regression,  // correlation of least-squares residuals
    Recursion,   // recursive formula on the correlation matrix
};

/// Sample partial correlation of columns x and y given the columns in cond. Not clamped.
/// Throws InvalidArgument on bad indices or too few samples, SingularError when the
/// conditioning columns are (numerically) collinear.
double partial_correlation(const Dataset& data, VarIndex x, VarIndex y, CondSet cond,
                           PartialCorrelationMethod method = PartialCorrelationMethod::Regression);

/// Partial correlation from a correlation matrix by the recursive formula.
double partial_correlation_recursive(const Eigen::MatrixXd& corr, VarIndex x, VarIndex y, CondSet cond);

/// Keeps |r| strictly below one before the z-transform.
inline constexpr double kCorrelationClamp = 1.0 - 1e-12;
double clamp_correlation(double r);

/// Two-sided p-value of Fisher's z statistic sqrt(N - order - 3) * atanh(r).
double fisher_z_pvalue(double r, long samples, int order);

struct TestConfig {
    double alpha = 0.05;
    int max_order = 1;
    double log_p_floor = -700.0;
};

struct WeightedVerdict {
    /// True when the null hypothesis is rejected (p < alpha).
    bool reject = false;
    Weight weight;
};

/// Weight round(1000 * |ln p - ln alpha|) with ln p clamped below at log_p_floor.
WeightedVerdict frequentist_weight(double p, double alpha, double log_p_floor = -700.0);

struct SkippedTest {
    CiTriple triple;
    std::string reason;
};

struct CiTestReport {
    std::vector<WeightedInput> inputs;
    std::vector<SkippedTest> skipped;
};

/// One weighted (in)dependence input per canonical triple of order at most config.max_order,
/// in canonical triple order. Tests that fail are listed in `skipped` instead.
CiTestReport ci_inputs_from_data(const Dataset& data, const TestConfig& config);

/// Two-sided Welch t-test p-value.
double welch_t_test(std::span<const double> a, std::span<const double> b);

/// causes(target, y) when column y differs between the datasets, notcauses(target, y)
/// otherwise, weighted as for the independence tests. Throws ShapeError when the datasets do
/// not share their variables.
std::vector<WeightedInput> ancestral_inputs_from_intervention(const Dataset& obs, const Dataset& interv,
                                                              VarIndex target, const TestConfig& config);

}  // namespace aci
