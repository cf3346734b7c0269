#include "l0dag/conditions.hpp"

#include "l0dag/errors.hpp"
#include "l0dag/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace l0dag {

namespace {

double log_p_guarded(int p) { return std::log(static_cast<double>(std::max(p, 2))); }

// Visits every ordering (p <= 8) or the identity plus kSampledOrderings random ones.
template <typename Fn>
std::string visit_orderings(int p, Fn&& fn) {
    if (p <= kMaxExhaustiveConditions) {
        for_each_ordering(p, fn);
        return "exhaustive";
    }
    fn(Ordering::identity(p));
    for (const auto& pi : sample_orderings(p, kSampledOrderings, kSampledOrderingsSeed)) fn(pi);
    return "sampled(" + std::to_string(kSampledOrderings + 1) + ")";
}

void require_square_symmetric(const CovarianceMatrix& sigma) {
    if (sigma.p() < 1) throw InvalidInput("condition checks need a non-empty covariance");
}

}  // namespace

const ConditionResult* ConditionReport::find(int id) const {
    for (const auto& r : results)
        if (r.id == id) return &r;
    return nullptr;
}

void ConditionReport::merge(const ConditionReport& other) {
    results.insert(results.end(), other.results.begin(), other.results.end());
    for (const auto& [k, v] : other.constants) constants[k] = v;
    advisory = advisory || other.advisory;
}

ConditionReport check_basic(const CovarianceMatrix& sigma, double sigma0_sq) {
    require_square_symmetric(sigma);
    ConditionReport report;
    report.advisory = !sigma.is_population();
    const double max_var = sigma.max_variance();
    const double lmin = sigma.lambda_min_sq();
    report.constants["sigma0_sq"] = sigma0_sq;
    report.constants["lambda_min_sq"] = lmin;

    report.results.push_back({1, "max variance bounded", max_var <= sigma0_sq, max_var, sigma0_sq, "n/a",
                              "max_j Sigma_jj <= sigma0^2", std::nullopt});
    report.results.push_back({2, "smallest eigenvalue positive", lmin > 1e-12, lmin, 1e-12, "n/a",
                              "Lambda_min^2 > 0", std::nullopt});
    return report;
}

ConditionReport check_basic(const DagModel& model, double sigma0_sq) {
    const auto sigma = covariance_of(model);
    auto report = check_basic(sigma, sigma0_sq);
    double log_det = 0.0;
    {
        Eigen::LLT<Eigen::MatrixXd> llt(sigma.matrix());
        const Eigen::MatrixXd& L = llt.matrixLLT();
        for (int i = 0; i < sigma.p(); ++i) log_det += 2.0 * std::log(L(i, i));
    }
    const double sum_log_omega = model.omega.array().log().sum();
    const double min_omega = model.omega.minCoeff();
    report.constants["log_det_sigma"] = log_det;
    report.constants["sum_log_omega"] = sum_log_omega;
    report.constants["min_omega"] = min_omega;
    auto& c2 = report.results.back();
    const bool equivalence = (c2.measured > 1e-12) == (min_omega > 0.0);
    std::ostringstream os;
    os << "Lambda_min^2 > 0 iff min_j omega_j > 0: " << (equivalence ? "holds" : "VIOLATED")
       << "; |log det Sigma - sum log omega| = " << std::abs(log_det - sum_log_omega);
    c2.detail = os.str();
    return report;
}

ConditionReport check_degree(const CovarianceMatrix& sigma, int n, double alpha_tilde,
                             std::optional<double> zero_tol) {
    require_square_symmetric(sigma);
    if (n < 1) throw InvalidInput("check_degree needs n >= 1");
    const int p = sigma.p();
    const double tol = zero_tol.value_or(default_zero_tol(sigma));
    int worst = -1;
    Ordering worst_pi;
    const auto enumeration = visit_orderings(p, [&](const Ordering& pi) {
        const auto profile = edge_profile(sigma, pi, tol);
        const int m = *std::max_element(profile.in_degree.begin(), profile.in_degree.end());
        if (m > worst) {
            worst = m;
            worst_pi = pi;
        }
    });
    const double threshold = alpha_tilde * n / log_p_guarded(p);
    ConditionReport report;
    report.advisory = !sigma.is_population();
    report.constants["alpha_tilde"] = alpha_tilde;
    report.results.push_back({4, "in-degree of every representation bounded", worst <= threshold,
                              static_cast<double>(worst), threshold, enumeration,
                              "max over pi, j of s_j(pi) <= alpha_tilde n / log p", worst_pi});
    return report;
}

ConditionReport check_beta_min(const CovarianceMatrix& sigma, int n, int s0, double eta0, double eta1,
                               std::optional<double> zero_tol) {
    require_square_symmetric(sigma);
    if (s0 < 1) throw InvalidInput("check_beta_min needs s0 >= 1");
    if (n < 1) throw InvalidInput("check_beta_min needs n >= 1");
    if (!(eta0 > 0.0)) throw InvalidInput("eta0 must be positive");
    if (!(eta1 >= 0.0 && eta1 < 1.0)) throw InvalidInput("eta1 must lie in [0, 1)");
    const int p = sigma.p();
    const double tol = zero_tol.value_or(default_zero_tol(sigma));
    const double noise_level = std::sqrt(log_p_guarded(p) / n) *
                               std::max(std::sqrt(static_cast<double>(p) / s0), 1.0) / eta0;

    double worst_fraction = std::numeric_limits<double>::infinity();
    Ordering worst_pi;
    const auto enumeration = visit_orderings(p, [&](const Ordering& pi) {
        const auto rep = gram_schmidt_representation(sigma, pi, tol);
        const int edges = rep.edge_count();
        const double fraction =
            edges == 0 ? 1.0 : static_cast<double>((rep.B.array().abs() > noise_level).count()) / edges;
        if (fraction < worst_fraction) {
            worst_fraction = fraction;
            worst_pi = pi;
        }
    });
    ConditionReport report;
    report.advisory = !sigma.is_population();
    report.constants["eta0"] = eta0;
    report.constants["eta1"] = eta1;
    report.constants["beta_min_noise_level"] = noise_level;
    report.results.push_back({5, "beta-min", worst_fraction >= 1.0 - eta1, worst_fraction, 1.0 - eta1,
                              enumeration,
                              "min over pi of the fraction of edges above the noise level", worst_pi});
    return report;
}

ConditionReport check_omega_min(const CovarianceMatrix& sigma, double eta_omega, int n, double alpha_star) {
    require_square_symmetric(sigma);
    if (!(eta_omega > 0.0)) throw InvalidInput("eta_omega must be positive");
    if (n < 2) throw InvalidInput("check_omega_min needs n >= 2");
    const int p = sigma.p();
    double min_dev = std::numeric_limits<double>::infinity();
    Ordering worst_pi;
    std::uint64_t excluded = 0;
    const auto enumeration = visit_orderings(p, [&](const Ordering& pi) {
        const auto rep = gram_schmidt_representation(sigma, pi, 0.0);
        if ((rep.omega.array() - 1.0).abs().maxCoeff() <= 1e-9) {
            ++excluded;
            return;
        }
        const double dev = (rep.omega.array() - 1.0).square().sum() / p;
        if (dev < min_dev) {
            min_dev = dev;
            worst_pi = pi;
        }
    });
    ConditionReport report;
    report.advisory = !sigma.is_population();
    report.constants["eta_omega"] = eta_omega;
    report.constants["alpha_star"] = alpha_star;
    std::ostringstream os;
    os << "min over pi with Omega(pi) != I of mean_j (omega_j(pi) - 1)^2; " << excluded
       << " ordering(s) with Omega(pi) = I excluded";
    const bool c6 = min_dev > 1.0 / eta_omega;
    std::optional<Ordering> worst;
    if (std::isfinite(min_dev)) worst = worst_pi;
    report.results.push_back({6, "omega-min", c6, min_dev, 1.0 / eta_omega, enumeration, os.str(), worst});

    const double cap = alpha_star * n / std::log(static_cast<double>(n));
    report.results.push_back({7, "p small relative to n / log n", p <= cap, static_cast<double>(p), cap, "n/a",
                              "p <= alpha_star n / log n", std::nullopt});
    return report;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, double>> TheoremConstants::fields() const {
    return {{"sigma0", sigma0},
            {"lambda_min", lambda_min},
            {"p", static_cast<double>(p)},
            {"s0", static_cast<double>(s0)},
            {"n", static_cast<double>(n)},
            {"t", t},
            {"c1", c1},
            {"c2", c2},
            {"c", c},
            {"K0", K0},
            {"delta1", delta1},
            {"delta2", delta2},
            {"delta3", delta3},
            {"delta_B", delta_B},
            {"delta_W", delta_W},
            {"delta_s", delta_s},
            {"delta_eta", delta_eta},
            {"lambda_sq", lambda_sq},
            {"lambda0_sq", lambda0_sq},
            {"lambda1_sq", lambda1_sq},
            {"lambda2_sq", lambda2_sq},
            {"lambda3_sq", lambda3_sq},
            {"lambda_tilde_sq", lambda_tilde_sq},
            {"eta0_sq", eta0_sq},
            {"eta1", eta1},
            {"eta2_sq", eta2_sq},
            {"alpha", alpha},
            {"alpha_tilde", alpha_tilde},
            {"alpha0", alpha0}};
}

TheoremConstants theorem_constants(double sigma0, double lambda_min, int p, int s0, int n,
                                   std::optional<double> t) {
    if (!(sigma0 > 0.0) || !(lambda_min > 0.0) || p < 1 || s0 < 1 || n < 1)
        throw InvalidInput("theorem_constants: all inputs must be positive");
    TheoremConstants k;
    k.sigma0 = sigma0;
    k.lambda_min = lambda_min;
    k.p = p;
    k.s0 = s0;
    k.n = n;
    const double log_p = std::log(static_cast<double>(p));
    k.t = t.value_or(log_p);
    if (!(k.t > 0.0) && p > 1) throw InvalidInput("theorem_constants: t must be positive");

    const double s2 = sigma0 * sigma0;
    const double s4 = s2 * s2;
    const double l2 = lambda_min * lambda_min;
    const double l4 = l2 * l2;
    const double l6 = l4 * l2;
    const double rate = log_p / n;
    const double ratio = static_cast<double>(p) / s0;

    k.c1 = 96.0;
    k.c2 = 3840.0;
    // Variance-estimation term and estimation term of the rate.
    const double a = (ratio + 1.0) * k.c2 * s4 / l4 + k.c1 * s2 / l2;
    k.c = 4.0 * a + 2.0 * (k.c1 * s2 / l2 + k.c2 * s4 / l4);

    k.alpha = l2 / (288.0 * s2);
    k.alpha_tilde = k.alpha;
    k.K0 = 2.0 / lambda_min;
    k.delta1 = l2 / 8.0;
    k.delta2 = l4 / (64.0 * s4);
    k.delta3 = lambda_min / 2.0;
    k.lambda_sq = k.c * rate;
    k.lambda1_sq = 12.0 * s2 * rate;
    k.lambda2_sq = 60.0 * rate;
    k.lambda3_sq = 9.0 * s2 * rate;
    k.delta_B = l4 / 32.0;
    k.delta_W = l6 / (256.0 * s4);
    k.delta_s = 1.0 - k.c1 * s2 / (k.c * l2) - k.c2 * s4 / (k.c * l4);
    k.lambda0_sq = a * rate;
    k.lambda_tilde_sq = (k.c + a) * (32.0 / l4) * rate;
    k.delta_eta = 0.5;
    k.eta1 = 0.0;
    k.eta0_sq = 1.0 / (k.c + a) / 2.0;
    k.eta2_sq = k.eta0_sq * (k.c + a) * (32.0 / l4);
    k.alpha0 = std::min(4.0 / p, 0.05);
    return k;
}

double cond_edges_alpha(double sigma0_sq, double lambda_min_sq, double eta0, double eta1) {
    if (!(eta1 < 1.0)) throw InvalidInput("cond_edges_alpha: eta1 must be < 1");
    if (!(sigma0_sq > 0.0) || !(lambda_min_sq > 0.0) || !(eta0 > 0.0) || eta1 < 0.0)
        throw InvalidInput("cond_edges_alpha: sigma0^2, Lambda_min^2, eta0 must be positive and eta1 >= 0");
    return sigma0_sq * eta0 * eta0 / (lambda_min_sq * (1.0 - eta1));
}

double default_component_threshold(int p, int n, double eta_c) {
    if (n < 1 || !(eta_c > 0.0)) throw InvalidInput("component threshold needs n >= 1 and eta_c > 0");
    return std::sqrt(std::log(static_cast<double>(std::max(p, 2))) / n) / eta_c;
}

std::vector<std::vector<int>> connected_components(const CovarianceMatrix& sigma_hat, double threshold) {
    if (threshold < 0.0) throw InvalidInput("component threshold must be non-negative");
    const int p = sigma_hat.p();
    for (int j = 0; j < p; ++j)
        if (!(sigma_hat(j, j) > 0.0))
            throw InvalidInput("zero variance at node " + std::to_string(j + 1) + "; correlation undefined");

    std::vector<int> parent(static_cast<std::size_t>(p));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) {
            const double corr = sigma_hat(j, k) / std::sqrt(sigma_hat(j, j) * sigma_hat(k, k));
            if (std::abs(corr) > threshold) {
                const int a = find(j), b = find(k);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of(static_cast<std::size_t>(p), -1);
    for (int v = 0; v < p; ++v) {
        const int r = find(v);
        if (block_of[r] < 0) {
            block_of[r] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of[r]].push_back(v);
    }
    return blocks;
}

}  // namespace l0dag
