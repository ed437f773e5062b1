#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "aci/core.hpp"
#include "aci/scoring.hpp"

namespace aci {

enum class PrTask {
    Ancestral,     // rank by score, positives are x => y
    Nonancestral,  // rank by -score, positives are x =/=> y
};

/// Predicted positives are the predictions ranked at or above the threshold. With no positives
/// in the truth, recall is reported as 1.
struct PrPoint {
    Score threshold;
    double precision = 1.0;
    double recall = 1.0;
};

/// One point per distinct ranking key, keys descending. Throws InvalidArgument unless the
/// predictions cover every ordered pair of the truth exactly once.
std::vector<PrPoint> pr_curve(const std::vector<Prediction>& predictions, const AncestralStructure& truth,
                              PrTask task);

struct ScoredModel {
    std::vector<Prediction> predictions;
    AncestralStructure truth;
};

/// The curve over the union of several models' predictions.
std::vector<PrPoint> pooled_pr_curve(const std::vector<ScoredModel>& models, PrTask task);

/// Fraction of wrong claims among predictions with |score| at or above the q-quantile of |score|
/// (linear interpolation). A positive score claims x => y, a negative one claims x =/=> y;
/// zero scores claim nothing and are left out. Returns 0 when nothing is selected.
double confident_error_rate(const std::vector<Prediction>& predictions, const AncestralStructure& truth, double q);

struct BenchmarkConfig {
    int n_obs = 6;
    int n_latent = 1;
    double edge_prob = 0.3;
    int max_order = 1;
    int models = 20;
    int samples = 500;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    /// Hard d-separation inputs instead of tests on sampled data.
    bool oracle = false;
    double time_limit_seconds = 3600.0;
    /// Models scored concurrently.
    int threads = 1;
};

struct ModelRecord {
    int model_id = 0;
    /// Input construction, solving and scoring; simulation and I/O excluded.
    double time_seconds = 0.0;
    std::string status;  // "ok", "timeout" or "error: ..."
    std::vector<Prediction> predictions;
    AncestralStructure truth = AncestralStructure::identity(1);
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<ModelRecord> models;  // by model id
    double mean_time_seconds = 0.0;
    std::vector<PrPoint> ancestral_pr;
    std::vector<PrPoint> nonancestral_pr;
};

/// Seeds used for model `index` of a batch: structure first, then sampling.
std::uint64_t model_seed(std::uint64_t batch_seed, int index);
std::uint64_t sample_seed(std::uint64_t batch_seed, int index);

/// Simulates, tests and scores every model. Failures are recorded per model.
BenchmarkReport run_benchmark(const BenchmarkConfig& config,
                              const std::function<void(const ModelRecord&)>& on_model = {});

/// `threshold,precision,recall`
void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& points);
/// `model_id,n,c,time_seconds,status`
void write_timing_csv(std::ostream& out, const BenchmarkReport& report);

/// Published mean execution times, for side-by-side display only.
struct ReferenceTime {
    int n;
    int c;
    double seconds;
};
const std::vector<ReferenceTime>& reference_times();

/// `n,c,measured_mean_seconds,measured_median_seconds,reference_seconds`; reference_seconds is
/// empty when no published value exists for the configuration.
void write_reference_table(std::ostream& out, const BenchmarkReport& report);

}  // namespace aci
