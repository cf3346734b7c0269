#include "l0dag/experiments.hpp"

#include "l0dag/cpdag.hpp"
#include "l0dag/errors.hpp"
#include "l0dag/representation.hpp"
#include "l0dag/rng.hpp"
#include "l0dag/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace l0dag {

double frobenius_error(const FitResult& fit, const CovarianceMatrix& sigma0) {
    if (fit.model.p() != sigma0.p() || fit.pi_hat.size() != sigma0.p())
        throw InvalidInput("frobenius_error: dimension mismatch");
    const auto target = gram_schmidt_representation(sigma0, fit.pi_hat, default_zero_tol(sigma0));
    return (fit.model.B - target.B).squaredNorm() + (fit.model.omega - target.omega).squaredNorm();
}

double Lambda2Rule::at(int p, int n) const {
    if (type == Type::fixed) return value;
    return value * std::log(static_cast<double>(std::max(p, 2))) / n;
}

// ---------------------------------------------------------------------------
// Config

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "rate")
            c.kind = ExperimentKind::rate;
        else if (kind == "equalvar")
            c.kind = ExperimentKind::equal_variance;
        else
            throw InvalidInput("experiment kind must be rate|equalvar");
        c.p = j.at("p").get<int>();
        if (j.contains("s0") && !j.at("s0").is_null()) c.s0 = j.at("s0").get<int>();
        if (j.contains("beta0") && !j.at("beta0").is_null()) c.beta0 = j.at("beta0").get<double>();
        c.n_grid = j.at("n_grid").get<std::vector<int>>();
        const auto& rule = j.at("lambda2_rule");
        const auto type = rule.at("type").get<std::string>();
        if (type == "c_logp_over_n") {
            c.lambda2_rule = {Lambda2Rule::Type::c_logp_over_n, rule.at("c").get<double>()};
        } else if (type == "fixed") {
            c.lambda2_rule = {Lambda2Rule::Type::fixed, rule.at("value").get<double>()};
        } else {
            throw InvalidInput("lambda2_rule.type must be c_logp_over_n|fixed");
        }
        c.mode = parse_score_mode(j.at("mode").get<std::string>());
        c.method = parse_search_method(j.at("method").get<std::string>());
        c.reps = j.at("reps").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();

        if (j.contains("max_parents") && !j.at("max_parents").is_null())
            c.max_parents = j.at("max_parents").get<int>();
        c.coef_lo = j.value("coef_lo", c.coef_lo);
        c.coef_hi = j.value("coef_hi", c.coef_hi);
        c.population = j.value("population", c.population);
        c.restarts = j.value("restarts", c.restarts);
        c.band_lo = j.value("band_lo", c.band_lo);
        c.band_hi = j.value("band_hi", c.band_hi);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed experiment config: ") + e.what());
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = kind == ExperimentKind::rate ? "rate" : "equalvar";
    j["p"] = p;
    j["s0"] = s0 ? nlohmann::json(*s0) : nlohmann::json(nullptr);
    j["beta0"] = beta0 ? nlohmann::json(*beta0) : nlohmann::json(nullptr);
    j["n_grid"] = n_grid;
    if (lambda2_rule.type == Lambda2Rule::Type::c_logp_over_n)
        j["lambda2_rule"] = {{"type", "c_logp_over_n"}, {"c", lambda2_rule.value}};
    else
        j["lambda2_rule"] = {{"type", "fixed"}, {"value", lambda2_rule.value}};
    j["mode"] = std::string(to_string(mode));
    j["method"] = std::string(to_string(method));
    j["reps"] = reps;
    j["seed"] = seed;
    j["max_parents"] = max_parents ? nlohmann::json(*max_parents) : nlohmann::json(nullptr);
    j["coef_lo"] = coef_lo;
    j["coef_hi"] = coef_hi;
    j["population"] = population;
    j["restarts"] = restarts;
    j["band_lo"] = band_lo;
    j["band_hi"] = band_hi;
    return j;
}

int ExperimentConfig::true_edge_count() const {
    return beta0 ? (*beta0 == 0.0 ? 0 : p - 1) : s0.value_or(0);
}

void ExperimentConfig::validate() const {
    if (p < 2) throw InvalidInput("experiment needs p >= 2");
    if (s0.has_value() == beta0.has_value())
        throw InvalidInput("experiment config needs exactly one of s0 (random sparse) or beta0 (AR(1))");
    if (n_grid.empty()) throw InvalidInput("n_grid must not be empty");
    for (int n : n_grid)
        if (n < 3) throw InvalidInput("every n in n_grid must be >= 3");
    if (reps < 1) throw InvalidInput("reps must be >= 1");
    if (lambda2_rule.value < 0.0) throw InvalidInput("lambda2 rule value must be non-negative");
    if (max_parents && *max_parents < 0) throw InvalidInput("max_parents must be non-negative");
    if (!(band_lo <= band_hi)) throw InvalidInput("band_lo must not exceed band_hi");
    if (kind == ExperimentKind::equal_variance) {
        if (beta0) throw InvalidInput("equal-variance experiments need unit noise variances; AR(1) has non-unit ones");
        if (mode != ScoreMode::equal_variance)
            throw InvalidInput("equal-variance experiments must use mode \"equalvar\"");
    }
    if (s0) {
        SimConfig sim;
        sim.p = p;
        sim.s0 = *s0;
        sim.coef_lo = coef_lo;
        sim.coef_hi = coef_hi;
        sim.validate();
    }
    if (beta0 && !(std::abs(*beta0) < 1.0)) throw InvalidInput("beta0 must satisfy |beta0| < 1");
}

// ---------------------------------------------------------------------------
// Runs

namespace {

DagModel truth_model(const ExperimentConfig& config, int rep) {
    if (config.beta0) return ar1_model(config.p, *config.beta0);
    SimConfig sim;
    sim.p = config.p;
    sim.s0 = *config.s0;
    sim.coef_lo = config.coef_lo;
    sim.coef_hi = config.coef_hi;
    sim.kind = ModelKind::random_sparse;
    sim.seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    if (config.kind == ExperimentKind::equal_variance)
        sim.omega_fixed = 1.0;
    else
        sim.omega_fixed.reset();
    return random_sparse_dag(sim);
}

ParentSets sorted_parents(ParentSets ps) {
    for (auto& s : ps) std::sort(s.begin(), s.end());
    return ps;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentRecord run_replication(const ExperimentConfig& config, int rep, std::size_t n_index, bool timing) {
    const auto start = std::chrono::steady_clock::now();
    const int n = config.n_grid.at(n_index);
    const auto truth = truth_model(config, rep);
    const auto sigma0 = covariance_of(truth);

    CovarianceMatrix sigma_hat;
    if (config.population) {
        sigma_hat = CovarianceMatrix::empirical(sigma0.matrix(), n);
    } else {
        const auto data = sample_sem(truth, n, derive_seed(config.seed, static_cast<std::uint64_t>(rep), n_index + 1));
        sigma_hat = sample_covariance(data);
    }

    const double lambda2 = config.lambda2_rule.at(config.p, n);
    const int max_parents = std::min(config.max_parents.value_or(config.p - 1), n - 2);
    FitResult fit;
    if (config.method == SearchMethod::exact && config.p <= kMaxTableNodes) {
        fit = fit_exact(LocalScoreTable::build(sigma_hat, lambda2, config.mode, max_parents));
    } else {
        GreedyOptions opts;
        opts.max_parents = max_parents;
        opts.restarts = config.restarts;
        opts.seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep), 0x9e37 + n_index);
        fit = fit_greedy(sigma_hat, lambda2, config.mode, opts);
    }

    const auto true_parents = sorted_parents(truth.parents());
    ExperimentRecord r;
    r.rep = rep;
    r.n = n;
    r.p = config.p;
    r.s0 = truth.edge_count();
    r.lambda2 = lambda2;
    r.s_hat = fit.s_hat;
    r.frob_err = config.kind == ExperimentKind::equal_variance ? (fit.model.B - truth.B).squaredNorm()
                                                               : frobenius_error(fit, sigma0);
    r.order_compatible = fit.pi_hat.is_compatible_with(true_parents);
    r.support_exact = fit.parents == true_parents;
    r.shd = cpdag_shd(Cpdag::of(fit.parents), Cpdag::of(true_parents));
    if (timing)
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<ExperimentAggregate> aggregate_records(const std::vector<ExperimentRecord>& records,
                                                   const std::vector<int>& n_grid, double band_lo,
                                                   double band_hi) {
    std::vector<ExperimentAggregate> out;
    for (int n : n_grid) {
        std::vector<double> err, s_hat, shd;
        int in_band = 0, compatible = 0, exact = 0, count = 0;
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++count;
            err.push_back(r.frob_err);
            s_hat.push_back(r.s_hat);
            shd.push_back(r.shd);
            const bool band = r.s0 == 0 ? r.s_hat == 0
                                        : (static_cast<double>(r.s_hat) / r.s0 >= band_lo &&
                                           static_cast<double>(r.s_hat) / r.s0 <= band_hi);
            in_band += band;
            compatible += r.order_compatible;
            exact += r.support_exact;
        }
        ExperimentAggregate a;
        a.n = n;
        a.reps = count;
        a.median_frob_err = median(err);
        a.median_s_hat = median(s_hat);
        a.median_shd = median(shd);
        if (count > 0) {
            a.s_ratio_in_band = static_cast<double>(in_band) / count;
            a.order_compatible_freq = static_cast<double>(compatible) / count;
            a.support_exact_freq = static_cast<double>(exact) / count;
        }
        out.push_back(a);
    }
    return out;
}

double log_log_slope(const std::vector<ExperimentAggregate>& aggregates) {
    std::vector<double> xs, ys;
    for (const auto& a : aggregates)
        if (a.median_frob_err > 0.0 && std::isfinite(a.median_frob_err)) {
            xs.push_back(std::log(static_cast<double>(a.n)));
            ys.push_back(std::log(a.median_frob_err));
        }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace {

ExperimentReport run_all(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const std::size_t per_n = static_cast<std::size_t>(config.reps);
    const std::size_t total = per_n * config.n_grid.size();
    std::vector<ExperimentRecord> records(total);
    std::vector<std::exception_ptr> errors(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            try {
                records[idx] = run_replication(config, static_cast<int>(idx % per_n), idx / per_n, options.timing);
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentReport report;
    report.config = config;
    report.records = std::move(records);
    report.aggregates = aggregate_records(report.records, config.n_grid, config.band_lo, config.band_hi);
    report.slope = log_log_slope(report.aggregates);
    return report;
}

}  // namespace

ExperimentReport run_rate_experiment(const ExperimentConfig& config, const RunOptions& options) {
    if (config.kind != ExperimentKind::rate) throw InvalidInput("config kind is not \"rate\"");
    return run_all(config, options);
}

ExperimentReport run_equal_variance_experiment(const ExperimentConfig& config, const RunOptions& options) {
    if (config.kind != ExperimentKind::equal_variance) throw InvalidInput("config kind is not \"equalvar\"");
    return run_all(config, options);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    return config.kind == ExperimentKind::rate ? run_rate_experiment(config, options)
                                               : run_equal_variance_experiment(config, options);
}

// ---------------------------------------------------------------------------
// Output

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
    os << "rep,n,p,s0,lambda2,s_hat,frob_err,order_compatible,support_exact,shd,ms\n";
    for (const auto& r : records) {
        os << r.rep << ',' << r.n << ',' << r.p << ',' << r.s0 << ',' << format_double(r.lambda2) << ','
           << r.s_hat << ',' << format_double(r.frob_err) << ',' << (r.order_compatible ? 1 : 0) << ','
           << (r.support_exact ? 1 : 0) << ',' << r.shd << ',' << format_double(r.ms) << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
    std::vector<ExperimentRecord> out;
    std::string line;
    if (!std::getline(is, line)) return out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 11) throw InvalidInput("records CSV row has " + std::to_string(f.size()) + " fields");
        ExperimentRecord r;
        r.rep = std::stoi(f[0]);
        r.n = std::stoi(f[1]);
        r.p = std::stoi(f[2]);
        r.s0 = std::stoi(f[3]);
        r.lambda2 = std::strtod(f[4].c_str(), nullptr);
        r.s_hat = std::stoi(f[5]);
        r.frob_err = std::strtod(f[6].c_str(), nullptr);
        r.order_compatible = f[7] == "1";
        r.support_exact = f[8] == "1";
        r.shd = std::stoi(f[9]);
        r.ms = std::strtod(f[10].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

nlohmann::json aggregate_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = report.config.to_json();
    j["rng"] = {{"algorithm", std::string(CounterRng::algorithm)},
                {"gaussian", std::string(CounterRng::gaussian_transform)}};
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        per_n.push_back({{"n", a.n},
                         {"reps", a.reps},
                         {"median_frob_err", a.median_frob_err},
                         {"median_s_hat", a.median_s_hat},
                         {"s_ratio_in_band", a.s_ratio_in_band},
                         {"order_compatible_freq", a.order_compatible_freq},
                         {"support_exact_freq", a.support_exact_freq},
                         {"median_shd", a.median_shd}});
    }
    j["per_n"] = per_n;
    j["slope_log_err_vs_log_n"] = std::isfinite(report.slope) ? nlohmann::json(report.slope) : nlohmann::json(nullptr);
    int in_band = 0;
    for (const auto& r : report.records) {
        in_band += r.s0 == 0 ? r.s_hat == 0
                             : (static_cast<double>(r.s_hat) / r.s0 >= report.config.band_lo &&
                                static_cast<double>(r.s_hat) / r.s0 <= report.config.band_hi);
    }
    j["s_ratio_in_band_overall"] =
        report.records.empty() ? 0.0 : static_cast<double>(in_band) / static_cast<double>(report.records.size());
    return j;
}

void write_gnuplot(std::ostream& os, const ExperimentReport& report) {
    os << "# n median_frob_err\n";
    for (const auto& a : report.aggregates) os << a.n << ' ' << format_double(a.median_frob_err) << '\n';
}

}  // namespace l0dag
