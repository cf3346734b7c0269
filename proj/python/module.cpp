#include "l0dag/conditions.hpp"
#include "l0dag/cpdag.hpp"
#include "l0dag/errors.hpp"
#include "l0dag/experiments.hpp"
#include "l0dag/io.hpp"
#include "l0dag/representation.hpp"
#include "l0dag/scoring.hpp"
#include "l0dag/search.hpp"
#include "l0dag/simulator.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace l0dag;

namespace {

// Results cross the boundary as plain dicts, the same documents the CLI writes.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

CovarianceMatrix make_sigma(const Eigen::MatrixXd& sigma, std::optional<int> n) {
    return n ? CovarianceMatrix::empirical(sigma, *n) : CovarianceMatrix::population(sigma);
}

Ordering ordering_from(const std::vector<int>& one_based) {
    std::vector<int> v;
    for (int x : one_based) v.push_back(x - 1);
    return Ordering(std::move(v));
}

py::dict model_dict(const DagModel& m) {
    py::dict d;
    d["B"] = m.B;
    d["omega"] = m.omega;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "l0-penalized maximum likelihood for sparse Gaussian DAGs";

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.attr("__version__") = L0DAG_VERSION;

    m.def(
        "covariance_of",
        [](const Eigen::MatrixXd& B, const Eigen::VectorXd& omega) {
            DagModel model(B, omega);
            model.validate();
            return covariance_of(model).matrix();
        },
        py::arg("B"), py::arg("omega"));

    m.def(
        "neg_log_likelihood",
        [](const Eigen::MatrixXd& theta, const Eigen::MatrixXd& sigma_hat) {
            return neg_log_likelihood(PrecisionMatrix(theta), CovarianceMatrix::population(sigma_hat));
        },
        py::arg("theta"), py::arg("sigma_hat"));

    m.def(
        "gram_schmidt",
        [](const Eigen::MatrixXd& sigma, const std::vector<int>& pi, std::optional<double> zero_tol,
           std::optional<int> n) {
            const auto s = make_sigma(sigma, n);
            const auto model = gram_schmidt_representation(s, ordering_from(pi), zero_tol.value_or(default_zero_tol(s)));
            auto d = model_dict(model);
            d["edge_profile"] = to_py(io::to_json(edge_profile(model)));
            return d;
        },
        py::arg("sigma"), py::arg("pi"), py::arg("zero_tol") = py::none(), py::arg("n") = py::none(),
        "Gram-Schmidt representation under a 1-based ordering (pi[-1] enters first).");

    m.def(
        "minimal_edge_imap",
        [](const Eigen::MatrixXd& sigma, std::optional<double> zero_tol) {
            const auto s = CovarianceMatrix::population(sigma);
            const ImapMode mode =
                s.p() <= kMaxExhaustiveImap ? ImapMode{Exhaustive{}} : ImapMode{Sampled{0, kSampledOrderingsSeed}};
            const auto r = minimal_edge_imap(s, zero_tol.value_or(default_zero_tol(s)), mode);
            auto d = model_dict(r.model);
            d["pi"] = to_py(io::to_json(r.pi));
            d["exhaustive"] = r.exhaustive;
            d["orderings_evaluated"] = r.orderings_evaluated;
            return d;
        },
        py::arg("sigma"), py::arg("zero_tol") = py::none());

    m.def(
        "local_score",
        [](const Eigen::MatrixXd& sigma_hat, int n, int j, const std::vector<int>& parents, double lambda2,
           const std::string& mode) {
            std::vector<int> S;
            for (int k : parents) S.push_back(k - 1);
            return local_score(parse_score_mode(mode), j - 1, S, CovarianceMatrix::empirical(sigma_hat, n), lambda2);
        },
        py::arg("sigma_hat"), py::arg("n"), py::arg("j"), py::arg("parents"), py::arg("lambda2"),
        py::arg("mode") = "profile");

    m.def(
        "fit",
        [](std::optional<Eigen::MatrixXd> data, std::optional<Eigen::MatrixXd> sigma_hat, std::optional<int> n,
           std::optional<double> lambda2, const std::string& mode, const std::string& method,
           std::optional<int> max_parents, int restarts, std::uint64_t seed, bool center) {
            if (data.has_value() == sigma_hat.has_value())
                throw InvalidInput("fit: pass exactly one of data or sigma_hat");
            CovarianceMatrix s;
            if (data) {
                Dataset d{*data, std::nullopt};
                d.validate();
                s = sample_covariance(d, center);
            } else {
                if (!n) throw InvalidInput("fit: sigma_hat requires n");
                s = CovarianceMatrix::empirical(*sigma_hat, *n);
            }
            const int nn = *s.n();
            const double l2 = lambda2.value_or(bic_lambda2(nn));
            const int cap = max_parents.value_or(std::min(s.p() - 1, std::max(nn - 2, 0)));
            const auto sm = parse_score_mode(mode);
            FitResult r;
            {
                py::gil_scoped_release release;
                if (parse_search_method(method) == SearchMethod::exact)
                    r = fit_exact(LocalScoreTable::build(s, l2, sm, cap));
                else
                    r = fit_greedy(s, l2, sm, {cap, restarts, seed});
            }
            py::dict d = to_py(io::to_json(r));
            d["B"] = r.model.B;
            d["omega"] = r.model.omega;
            return d;
        },
        py::kw_only(), py::arg("data") = py::none(), py::arg("sigma_hat") = py::none(), py::arg("n") = py::none(),
        py::arg("lambda2") = py::none(), py::arg("mode") = "profile", py::arg("method") = "exact",
        py::arg("max_parents") = py::none(), py::arg("restarts") = 1, py::arg("seed") = 0,
        py::arg("center") = false);

    m.def(
        "ar1_model", [](int p, double beta0) { return model_dict(ar1_model(p, beta0)); }, py::arg("p"),
        py::arg("beta0"));

    m.def(
        "random_sparse_dag",
        [](int p, int s0, std::uint64_t seed, double coef_lo, double coef_hi, int max_parents) {
            SimConfig c;
            c.p = p;
            c.s0 = s0;
            c.seed = seed;
            c.coef_lo = coef_lo;
            c.coef_hi = coef_hi;
            c.max_parents = max_parents;
            return model_dict(random_sparse_dag(c));
        },
        py::arg("p"), py::arg("s0"), py::arg("seed"), py::arg("coef_lo") = 0.5, py::arg("coef_hi") = 1.0,
        py::arg("max_parents") = -1);

    m.def(
        "sample_sem",
        [](const Eigen::MatrixXd& B, const Eigen::VectorXd& omega, int n, std::uint64_t seed) {
            DagModel model(B, omega);
            model.validate();
            return sample_sem(model, n, seed).X;
        },
        py::arg("B"), py::arg("omega"), py::arg("n"), py::arg("seed"));

    m.def(
        "cpdag_shd",
        [](const Eigen::MatrixXd& B1, const Eigen::MatrixXd& B2) {
            return cpdag_shd(Cpdag::of(support_of(B1)), Cpdag::of(support_of(B2)));
        },
        py::arg("B1"), py::arg("B2"));

    m.def(
        "theorem_constants",
        [](double sigma0, double lambda_min, int p, int s0, int n, std::optional<double> t) {
            return to_py(io::to_json(theorem_constants(sigma0, lambda_min, p, s0, n, t)));
        },
        py::arg("sigma0"), py::arg("lambda_min"), py::arg("p"), py::arg("s0"), py::arg("n"),
        py::arg("t") = py::none());

    m.def(
        "check_conditions",
        [](const Eigen::MatrixXd& sigma, int n, std::optional<int> s0, double eta0, double eta1, double eta_omega,
           double alpha_star) {
            const auto s = CovarianceMatrix::population(sigma);
            const double sigma0_sq = s.max_variance();
            ConditionReport report = check_basic(s, sigma0_sq);
            const double lmin = s.lambda_min_sq();
            if (lmin > 0) report.merge(check_degree(s, n, cond_edges_alpha(sigma0_sq, lmin, eta0, eta1)));
            report.merge(check_beta_min(s, n, s0.value_or(s.p()), eta0, eta1));
            report.merge(check_omega_min(s, eta_omega, n, alpha_star));
            return to_py(io::to_json(report));
        },
        py::arg("sigma"), py::arg("n"), py::arg("s0") = py::none(), py::arg("eta0") = 0.5, py::arg("eta1") = 0.25,
        py::arg("eta_omega") = 10.0, py::arg("alpha_star") = 0.5);

    m.def(
        "connected_components",
        [](const Eigen::MatrixXd& sigma_hat, int n, double threshold) {
            std::vector<std::vector<int>> out;
            for (const auto& c : connected_components(CovarianceMatrix::empirical(sigma_hat, n), threshold)) {
                auto& o = out.emplace_back();
                for (int k : c) o.push_back(k + 1);
            }
            return out;
        },
        py::arg("sigma_hat"), py::arg("n"), py::arg("threshold"));

    m.def(
        "run_experiment",
        [](const py::object& config, int threads) {
            const auto cfg = ExperimentConfig::from_json(from_py(config));
            ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(cfg, {threads, false});
            }
            return to_py(aggregate_json(report));
        },
        py::arg("config"), py::arg("threads") = 1);
}
