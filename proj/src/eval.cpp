#include "aci/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "aci/simulate.hpp"
#include "aci/stats.hpp"

namespace aci {

namespace {

struct Ranked {
    Score key;
    bool positive;
};

void check_coverage(const std::vector<Prediction>& predictions, const AncestralStructure& truth) {
    const int n = truth.size();
    std::set<std::pair<int, int>> seen;
    for (const auto& p : predictions) {
        if (p.cause < 0 || p.effect < 0 || p.cause >= n || p.effect >= n || p.cause == p.effect)
            throw InvalidArgument("prediction outside the truth's variables");
        if (!seen.insert({p.cause, p.effect}).second) throw InvalidArgument("pair predicted twice");
    }
    if (seen.size() != static_cast<std::size_t>(n) * (n - 1))
        throw InvalidArgument("predictions do not cover every ordered pair");
}

void append_ranked(std::vector<Ranked>& out, const std::vector<Prediction>& predictions,
                   const AncestralStructure& truth, PrTask task) {
    check_coverage(predictions, truth);
    for (const auto& p : predictions) {
        const bool reach = truth.reaches(p.cause, p.effect);
        if (task == PrTask::Ancestral)
            out.push_back({p.score, reach});
        else
            out.push_back({-p.score, !reach});
    }
}

std::vector<PrPoint> curve(std::vector<Ranked> ranked) {
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.key > b.key; });
    std::size_t positives = 0;
    for (const auto& r : ranked) positives += r.positive;
    std::vector<PrPoint> points;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        tp += ranked[i].positive;
        if (i + 1 < ranked.size() && ranked[i + 1].key == ranked[i].key) continue;
        const double predicted = static_cast<double>(i + 1);
        points.push_back({ranked[i].key, static_cast<double>(tp) / predicted,
                          positives == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(positives)});
    }
    return points;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<PrPoint> pr_curve(const std::vector<Prediction>& predictions, const AncestralStructure& truth,
                              PrTask task) {
    std::vector<Ranked> ranked;
    append_ranked(ranked, predictions, truth, task);
    return curve(std::move(ranked));
}

std::vector<PrPoint> pooled_pr_curve(const std::vector<ScoredModel>& models, PrTask task) {
    std::vector<Ranked> ranked;
    for (const auto& m : models) append_ranked(ranked, m.predictions, m.truth, task);
    return curve(std::move(ranked));
}

double confident_error_rate(const std::vector<Prediction>& predictions, const AncestralStructure& truth, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile outside [0, 1]");
    if (predictions.empty()) return 0.0;
    std::vector<double> mags;
    for (const auto& p : predictions) mags.push_back(std::abs(p.score.as_double()));
    std::sort(mags.begin(), mags.end());
    const double h = (static_cast<double>(mags.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, mags.size() - 1);
    const double frac = h - static_cast<double>(lo);
    const double cut = (frac == 0.0 || mags[lo] == mags[hi]) ? mags[lo] : mags[lo] + frac * (mags[hi] - mags[lo]);

    std::size_t selected = 0;
    std::size_t wrong = 0;
    for (const auto& p : predictions) {
        const double s = p.score.as_double();
        if (s == 0.0 || std::abs(s) < cut) continue;
        ++selected;
        if ((s > 0.0) != truth.reaches(p.cause, p.effect)) ++wrong;
    }
    return selected == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(selected);
}

std::uint64_t model_seed(std::uint64_t batch_seed, int index) {
    return splitmix64(splitmix64(batch_seed) + static_cast<std::uint64_t>(index));
}

std::uint64_t sample_seed(std::uint64_t batch_seed, int index) { return splitmix64(model_seed(batch_seed, index)); }

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const std::function<void(const ModelRecord&)>& on_model) {
    if (config.models < 0) throw InvalidArgument("negative model count");
    if (config.n_obs < 2 || config.max_order < 0 || config.max_order > config.n_obs - 2)
        throw InvalidArgument("maximum order out of range");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InvalidArgument("alpha outside (0, 1)");
    if (!config.oracle && config.samples <= config.max_order + 3) throw InvalidArgument("too few samples");

    BenchmarkReport report;
    report.config = config;
    report.models.resize(config.models);
    std::mutex callback_mutex;
    std::atomic<int> next{0};

    auto work = [&] {
        for (int m = next++; m < config.models; m = next++) {
            ModelRecord rec;
            rec.model_id = m;
            try {
                const Scm scm = random_linear_model(config.n_obs, config.n_latent, config.edge_prob,
                                                    model_seed(config.seed, m));
                rec.truth = true_ancestral_structure(scm);
                Dataset data;
                if (!config.oracle) data = sample_data(scm, config.samples, sample_seed(config.seed, m));

                const auto start = std::chrono::steady_clock::now();
                std::vector<WeightedInput> inputs;
                if (config.oracle) {
                    inputs = oracle_inputs(scm, config.max_order);
                } else {
                    TestConfig tc;
                    tc.alpha = config.alpha;
                    tc.max_order = config.max_order;
                    inputs = ci_inputs_from_data(data, tc).inputs;
                }
                SolveOptions opt;
                opt.time_limit_seconds = config.time_limit_seconds;
                auto scored = score_all_pairs_partial(inputs, config.n_obs, opt);
                rec.time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                rec.predictions = std::move(scored.predictions);
                rec.status = scored.timed_out.empty() ? "ok" : "timeout";
            } catch (const std::exception& e) {
                rec.status = std::string("error: ") + e.what();
            }
            if (on_model) {
                std::lock_guard lock(callback_mutex);
                on_model(rec);
            }
            report.models[m] = std::move(rec);
        }
    };
    const int threads = std::clamp(config.threads, 1, std::max(config.models, 1));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    std::vector<ScoredModel> complete;
    double total = 0.0;
    int timed = 0;
    for (const auto& rec : report.models) {
        if (rec.status != "ok") continue;
        total += rec.time_seconds;
        ++timed;
        complete.push_back({rec.predictions, rec.truth});
    }
    report.mean_time_seconds = timed ? total / timed : 0.0;
    if (!complete.empty()) {
        report.ancestral_pr = pooled_pr_curve(complete, PrTask::Ancestral);
        report.nonancestral_pr = pooled_pr_curve(complete, PrTask::Nonancestral);
    }
    return report;
}

void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& points) {
    out << "threshold,precision,recall\n";
    const auto old = out.precision(10);
    for (const auto& p : points) out << p.threshold.to_string() << ',' << p.precision << ',' << p.recall << '\n';
    out.precision(old);
}

void write_timing_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "model_id,n,c,time_seconds,status\n";
    for (const auto& rec : report.models) {
        std::string status = rec.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out << rec.model_id << ',' << report.config.n_obs << ',' << report.config.max_order << ','
            << std::fixed << std::setprecision(6) << rec.time_seconds << std::defaultfloat << ',' << status << '\n';
    }
}

const std::vector<ReferenceTime>& reference_times() {
    static const std::vector<ReferenceTime> table = {
        {6, 1, 0.21}, {6, 4, 1.66}, {7, 1, 1.03}, {8, 1, 9.74}, {9, 1, 146.66}};
    return table;
}

void write_reference_table(std::ostream& out, const BenchmarkReport& report) {
    std::vector<double> times;
    for (const auto& rec : report.models)
        if (rec.status == "ok") times.push_back(rec.time_seconds);
    out << "n,c,measured_mean_seconds,measured_median_seconds,reference_seconds\n";
    out << report.config.n_obs << ',' << report.config.max_order << ',' << std::fixed << std::setprecision(4)
        << report.mean_time_seconds << ',' << median(times) << ',';
    for (const auto& r : reference_times())
        if (r.n == report.config.n_obs && r.c == report.config.max_order) out << std::setprecision(2) << r.seconds;
    out << std::defaultfloat << '\n';
}

}  // namespace aci
