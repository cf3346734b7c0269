#pragma once

// Monte-Carlo harness: simulate, fit, and score estimates against the
// ground truth over a grid of sample sizes.

#include "l0dag/model.hpp"
#include "l0dag/scoring.hpp"
#include "l0dag/search.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace l0dag {

/// ||B-hat - B~(pi-hat)||_F^2 + ||Omega-hat - Omega~(pi-hat)||_F^2, where (B~, Omega~) is the
/// Gram-Schmidt representation of the population covariance under the fit's ordering.
double frobenius_error(const FitResult& fit, const CovarianceMatrix& sigma0);

struct Lambda2Rule {
    enum class Type { c_logp_over_n, fixed };
    Type type = Type::c_logp_over_n;
    double value = 2.0;  // c, or the fixed lambda2

    double at(int p, int n) const;
};

enum class ExperimentKind { rate, equal_variance };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::rate;
    int p = 0;
    std::optional<int> s0;        // random sparse model
    std::optional<double> beta0;  // AR(1) model
    std::vector<int> n_grid;
    Lambda2Rule lambda2_rule;
    ScoreMode mode = ScoreMode::profile;
    SearchMethod method = SearchMethod::exact;
    int reps = 1;
    std::uint64_t seed = 0;

    // Optional keys beyond the required schema.
    std::optional<int> max_parents;  // default p - 1 (and at most n - 2)
    double coef_lo = 0.5;
    double coef_hi = 1.0;
    bool population = false;         // fit the population covariance instead of samples
    int restarts = 1;                // greedy only
    double band_lo = 1.0 / 3.0;      // s_hat / s0 band
    double band_hi = 3.0;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int true_edge_count() const;
    void validate() const;
};

struct ExperimentRecord {
    int rep = 0;
    int n = 0;
    int p = 0;
    int s0 = 0;
    double lambda2 = 0.0;
    int s_hat = 0;
    double frob_err = 0.0;
    bool order_compatible = false;
    bool support_exact = false;
    int shd = 0;
    double ms = 0.0;  // 0 unless timing was requested

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

struct ExperimentAggregate {
    int n = 0;
    int reps = 0;
    double median_frob_err = 0.0;
    double median_s_hat = 0.0;
    double s_ratio_in_band = 0.0;
    double order_compatible_freq = 0.0;
    double support_exact_freq = 0.0;
    double median_shd = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ExperimentRecord> records;  // n_grid-major, then replication
    std::vector<ExperimentAggregate> aggregates;
    double slope = 0.0;                     // least-squares slope of log median error on log n
};

struct RunOptions {
    int threads = 1;
    bool timing = false;
};

/// Rate experiment: profile or equal-variance fits scored against the
/// ordering-specific population representation.
ExperimentReport run_rate_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Equal-variance experiment: unit noise variances, ordering and support recovery,
/// ||B-hat - B0||_F^2. Rejects models without unit noise variances.
ExperimentReport run_equal_variance_experiment(const ExperimentConfig& config, const RunOptions& options = {});

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// One record for (rep, n-index), independent of every other record.
ExperimentRecord run_replication(const ExperimentConfig& config, int rep, std::size_t n_index, bool timing);

std::vector<ExperimentAggregate> aggregate_records(const std::vector<ExperimentRecord>& records,
                                                   const std::vector<int>& n_grid, double band_lo,
                                                   double band_hi);
double log_log_slope(const std::vector<ExperimentAggregate>& aggregates);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);
nlohmann::json aggregate_json(const ExperimentReport& report);
void write_gnuplot(std::ostream& os, const ExperimentReport& report);

}  // namespace l0dag
