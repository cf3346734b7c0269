#include "l0dag/cli.hpp"

#include "l0dag/conditions.hpp"
#include "l0dag/errors.hpp"
#include "l0dag/experiments.hpp"
#include "l0dag/io.hpp"
#include "l0dag/representation.hpp"
#include "l0dag/rng.hpp"
#include "l0dag/scoring.hpp"
#include "l0dag/search.hpp"
#include "l0dag/simulator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace l0dag {

namespace {

struct UsageError : Error {
    using Error::Error;
};

nlohmann::json manifest(const std::string& command, std::optional<std::uint64_t> seed, const std::string& config_text,
                        const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["tool"] = "l0dag";
    m["version"] = L0DAG_VERSION;
    m["command"] = command;
    m["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    m["config_hash"] = io::content_hash(config_text);
    m["rng"] = {{"algorithm", std::string(CounterRng::algorithm)},
                {"gaussian", std::string(CounterRng::gaussian_transform)}};
    m["outputs"] = outputs;
    return m;
}

// Writes to --out (plus a manifest beside it) or to stdout.
void emit(const nlohmann::json& doc, const std::string& out_path, const std::string& command,
          std::optional<std::uint64_t> seed, const std::string& config_text, std::ostream& out) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
        return;
    }
    io::write_text(out_path, text);
    io::write_text(out_path + ".manifest.json",
                   manifest(command, seed, config_text, {fs::path(out_path).filename().string()}).dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) {
        try {
            out.push_back(std::stoi(cell));
        } catch (const std::exception&) {
            throw UsageError("expected a comma-separated list of integers, got '" + text + "'");
        }
    }
    return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"l0-penalized maximum likelihood for sparse Gaussian DAGs", "l0dag"};
    app.require_subcommand(1);
    app.set_version_flag("--version", L0DAG_VERSION);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Draw a ground-truth DAG and an i.i.d. Gaussian SEM dataset");
    std::string sim_kind = "ar1", sim_out;
    int sim_p = 0, sim_s0 = 0, sim_n = 0, sim_max_parents = -1;
    double sim_beta0 = 0.5, sim_lo = 0.5, sim_hi = 1.0;
    std::vector<double> sim_omega_range;
    std::uint64_t sim_seed = 0;
    sim->add_option("--kind", sim_kind, "ar1|random")->check(CLI::IsMember({"ar1", "random"}));
    sim->add_option("--p", sim_p, "number of nodes")->required();
    sim->add_option("--beta0", sim_beta0, "AR(1) weight");
    sim->add_option("--s0", sim_s0, "number of edges (random)");
    sim->add_option("--coef-lo", sim_lo, "smallest |weight| (random)");
    sim->add_option("--coef-hi", sim_hi, "largest |weight| (random)");
    sim->add_option("--omega-range", sim_omega_range, "draw noise variances uniformly from LO HI (random)")
        ->expected(2);
    sim->add_option("--max-parents", sim_max_parents, "in-degree cap (random)");
    sim->add_option("--n", sim_n, "sample size")->required();
    sim->add_option("--seed", sim_seed, "seed");
    sim->add_option("--out", sim_out, "output directory")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Minimize the l0-penalized likelihood over DAGs");
    std::string fit_data, fit_sigma, fit_mode = "profile", fit_method = "exact", fit_out, fit_table;
    std::optional<int> fit_n, fit_max_parents;
    std::optional<double> fit_lambda2, fit_alpha;
    int fit_restarts = 1;
    std::uint64_t fit_seed = 0;
    bool fit_center = false;
    fit->add_option("--data", fit_data, "dataset CSV (n x p)");
    fit->add_option("--sigma", fit_sigma, "covariance CSV (p x p), requires --n");
    fit->add_option("--n", fit_n, "sample size behind --sigma");
    fit->add_flag("--center", fit_center, "center the data columns before forming X^T X / n");
    fit->add_option("--lambda2", fit_lambda2, "penalty per edge (default log n / n)");
    fit->add_option("--mode", fit_mode, "profile|equalvar")->check(CLI::IsMember({"profile", "equalvar"}));
    fit->add_option("--max-parents", fit_max_parents, "in-degree cap (default floor(alpha n / log p))");
    fit->add_option("--alpha", fit_alpha, "alpha for the default in-degree cap (default Lmin^2 / (288 sigma0^2))");
    fit->add_option("--method", fit_method, "exact|greedy")->check(CLI::IsMember({"exact", "greedy"}));
    fit->add_option("--restarts", fit_restarts, "greedy restarts");
    fit->add_option("--seed", fit_seed, "greedy seed");
    fit->add_option("--out", fit_out, "write FitResult JSON here instead of stdout");
    fit->add_option("--table-jsonl", fit_table, "export the local score table (exact method)");

    // represent
    auto* rep = app.add_subcommand("represent", "Gram-Schmidt representation of a covariance under an ordering");
    std::string rep_sigma, rep_pi, rep_out;
    std::optional<double> rep_zero_tol;
    std::optional<int> rep_n;
    rep->add_option("--sigma", rep_sigma, "covariance CSV")->required();
    rep->add_option("--pi", rep_pi, "ordering, 1-based, e.g. \"3,1,2\"")->required();
    rep->add_option("--zero-tol", rep_zero_tol, "coefficient zero threshold (default 1e-9, or 0 with --n)");
    rep->add_option("--n", rep_n, "treat the covariance as empirical with this sample size");
    rep->add_option("--out", rep_out, "output file");

    // check
    auto* chk = app.add_subcommand("check", "Check the sparsity and identifiability conditions");
    std::string chk_sigma, chk_conditions = "1,2,4,5,6,7", chk_constants_from = "sigma", chk_out;
    int chk_n = 0;
    std::optional<int> chk_s0;
    std::optional<double> chk_sigma0_sq, chk_alpha_tilde;
    double chk_eta0 = 0.5, chk_eta1 = 0.25, chk_eta_omega = 10.0, chk_alpha_star = 0.5;
    bool chk_empirical = false;
    chk->add_option("--sigma", chk_sigma, "covariance CSV")->required();
    chk->add_option("--n", chk_n, "sample size")->required();
    chk->add_option("--conditions", chk_conditions, "subset of 1,2,4,5,6,7");
    chk->add_option("--constants-from", chk_constants_from, "sigma|theorem")
        ->check(CLI::IsMember({"sigma", "theorem"}));
    chk->add_option("--sigma0-sq", chk_sigma0_sq, "Condition 1 bound (default max diagonal)");
    chk->add_option("--alpha-tilde", chk_alpha_tilde, "Condition 4 constant (default implied by eta0, eta1)");
    chk->add_option("--s0", chk_s0, "sparsity for the beta-min threshold (default p)");
    chk->add_option("--eta0", chk_eta0, "beta-min eta0");
    chk->add_option("--eta1", chk_eta1, "beta-min eta1");
    chk->add_option("--eta-omega", chk_eta_omega, "omega-min eta_omega");
    chk->add_option("--alpha-star", chk_alpha_star, "Condition 7 alpha_*");
    chk->add_flag("--empirical", chk_empirical, "input is a sample covariance (advisory report)");
    chk->add_option("--out", chk_out, "output file");

    // constants
    auto* cst = app.add_subcommand("constants", "Closed-form constants of the explicit finite-sample bounds");
    double cst_sigma0 = 0, cst_lambda_min = 0;
    int cst_p = 0, cst_s0 = 0, cst_n = 0;
    std::optional<double> cst_t;
    std::string cst_out;
    cst->add_option("--sigma0", cst_sigma0, "sigma_0 (square root of the variance bound)")->required();
    cst->add_option("--lambda-min", cst_lambda_min, "Lambda_min (square root of the smallest eigenvalue)")
        ->required();
    cst->add_option("--p", cst_p, "number of nodes")->required();
    cst->add_option("--s0", cst_s0, "number of true edges")->required();
    cst->add_option("--n", cst_n, "sample size")->required();
    cst->add_option("--t", cst_t, "deviation parameter (default log p)");
    cst->add_option("--out", cst_out, "output file");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a Monte-Carlo rate or equal-variance experiment");
    std::string exp_config, exp_out;
    int exp_threads = 1;
    bool exp_timing = false, exp_gnuplot = false;
    exp->add_option("--config", exp_config, "experiment config JSON")->required();
    exp->add_option("--out", exp_out, "output directory (default: print aggregate JSON)");
    exp->add_option("--threads", exp_threads, "worker threads");
    exp->add_flag("--timing", exp_timing, "fill the ms column with wall time (records no longer reproducible)");
    exp->add_flag("--gnuplot", exp_gnuplot, "also write n vs median error as a two-column file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) {
            SimConfig cfg;
            cfg.p = sim_p;
            cfg.n = sim_n;
            cfg.seed = sim_seed;
            DagModel model;
            if (sim_kind == "ar1") {
                cfg.kind = ModelKind::ar1;
                cfg.beta0 = sim_beta0;
                model = ar1_model(sim_p, sim_beta0);
            } else {
                cfg.kind = ModelKind::random_sparse;
                cfg.s0 = sim_s0;
                cfg.coef_lo = sim_lo;
                cfg.coef_hi = sim_hi;
                cfg.max_parents = sim_max_parents;
                if (!sim_omega_range.empty()) {
                    cfg.omega_fixed.reset();
                    cfg.omega_lo = sim_omega_range[0];
                    cfg.omega_hi = sim_omega_range[1];
                }
                model = random_sparse_dag(cfg);
            }
            if (sim_n < 1) throw UsageError("--n must be positive");
            const auto data = sample_sem(model, sim_n, derive_seed(sim_seed, 1));
            nlohmann::json config = {{"kind", sim_kind}, {"p", sim_p}, {"n", sim_n}, {"seed", sim_seed}};
            if (sim_kind == "ar1") {
                config["beta0"] = sim_beta0;
            } else {
                config["s0"] = sim_s0;
                config["coef_range"] = {sim_lo, sim_hi};
                config["max_parents"] = sim_max_parents;
                if (cfg.omega_fixed)
                    config["omega"] = *cfg.omega_fixed;
                else
                    config["omega_range"] = {cfg.omega_lo, cfg.omega_hi};
            }
            const fs::path dir(sim_out);
            std::ostringstream csv;
            io::write_csv_matrix(csv, data.X);
            io::write_text(dir / "model.json", io::to_json(model).dump(2) + "\n");
            io::write_text(dir / "data.csv", csv.str());
            io::write_text(dir / "config.json", config.dump(2) + "\n");
            io::write_text(dir / "manifest.json",
                           manifest("simulate", sim_seed, config.dump(), {"model.json", "data.csv", "config.json"})
                                   .dump(2) +
                               "\n");
            out << "wrote " << (dir / "model.json").string() << ", data.csv, config.json\n";
        } else if (*fit) {
            if (fit_data.empty() == fit_sigma.empty()) {
                err << "fit: exactly one of --data or --sigma is required\n" << fit->help();
                return kExitUsage;
            }
            CovarianceMatrix sigma_hat;
            if (!fit_data.empty()) {
                Dataset data{io::read_csv_matrix(fs::path(fit_data)), std::nullopt};
                data.validate();
                sigma_hat = sample_covariance(data, fit_center);
            } else {
                if (!fit_n) {
                    err << "fit: --sigma requires --n\n" << fit->help();
                    return kExitUsage;
                }
                sigma_hat = CovarianceMatrix::empirical(io::read_csv_matrix(fs::path(fit_sigma)), *fit_n);
            }
            const int n = *sigma_hat.n();
            const int p = sigma_hat.p();
            const double lambda2 = fit_lambda2.value_or(n >= 2 ? bic_lambda2(n) : 0.0);
            int max_parents = 0;
            if (fit_max_parents) {
                max_parents = *fit_max_parents;
            } else {
                const double alpha = fit_alpha.value_or(sigma_hat.lambda_min_sq() / (288.0 * sigma_hat.max_variance()));
                max_parents = default_max_parents(n, p, alpha);
            }
            const auto mode = parse_score_mode(fit_mode);
            FitResult result;
            if (parse_search_method(fit_method) == SearchMethod::exact) {
                const auto table = LocalScoreTable::build(sigma_hat, lambda2, mode, max_parents);
                if (!fit_table.empty()) {
                    std::ostringstream os;
                    table.write_jsonl(os);
                    io::write_text(fit_table, os.str());
                }
                result = fit_exact(table);
            } else {
                result = fit_greedy(sigma_hat, lambda2, mode, {max_parents, fit_restarts, fit_seed});
            }
            auto doc = io::to_json(result);
            doc["max_parents"] = max_parents;
            doc["n"] = n;
            nlohmann::json config = {{"lambda2", lambda2}, {"mode", fit_mode}, {"method", fit_method},
                                     {"max_parents", max_parents}, {"restarts", fit_restarts},
                                     {"seed", fit_seed}, {"input", fit_data.empty() ? fit_sigma : fit_data}};
            emit(doc, fit_out, "fit", fit_seed, config.dump(), out);
        } else if (*rep) {
            const Eigen::MatrixXd m = io::read_csv_matrix(fs::path(rep_sigma));
            const auto sigma = rep_n ? CovarianceMatrix::empirical(m, *rep_n) : CovarianceMatrix::population(m);
            const auto pi = io::parse_ordering(rep_pi);
            const double tol = rep_zero_tol.value_or(default_zero_tol(sigma));
            const auto model = gram_schmidt_representation(sigma, pi, tol);
            nlohmann::json doc = {{"model", io::to_json(model)},
                                  {"edge_profile", io::to_json(edge_profile(model))},
                                  {"pi", io::to_json(pi)},
                                  {"zero_tol", tol}};
            nlohmann::json config = {{"sigma", rep_sigma}, {"pi", rep_pi}, {"zero_tol", tol}};
            emit(doc, rep_out, "represent", std::nullopt, config.dump(), out);
        } else if (*chk) {
            const Eigen::MatrixXd m = io::read_csv_matrix(fs::path(chk_sigma));
            const auto sigma = chk_empirical ? CovarianceMatrix::empirical(m, chk_n) : CovarianceMatrix::population(m);
            const auto wanted = parse_int_list(chk_conditions);
            for (int c : wanted)
                if (c != 1 && c != 2 && c != 4 && c != 5 && c != 6 && c != 7)
                    throw UsageError("--conditions accepts 1,2,4,5,6,7");
            auto want = [&](int c) { return std::find(wanted.begin(), wanted.end(), c) != wanted.end(); };
            const int p = sigma.p();
            const int s0 = chk_s0.value_or(p);

            const double sigma0_sq = chk_sigma0_sq.value_or(sigma.max_variance());
            const double lmin_sq = sigma.lambda_min_sq();
            double eta0 = chk_eta0, eta1 = chk_eta1, alpha_tilde = 0.0;
            if (chk_constants_from == "theorem") {
                const auto k = theorem_constants(std::sqrt(sigma0_sq), std::sqrt(std::max(lmin_sq, 1e-300)), p, s0,
                                                 chk_n);
                eta0 = std::sqrt(k.eta0_sq);
                eta1 = k.eta1;
                alpha_tilde = chk_alpha_tilde.value_or(k.alpha_tilde);
            } else {
                alpha_tilde = chk_alpha_tilde.value_or(
                    lmin_sq > 0 ? cond_edges_alpha(sigma0_sq, lmin_sq, eta0, eta1) : 0.0);
            }

            ConditionReport report;
            report.advisory = chk_empirical;
            if (want(1) || want(2)) {
                auto basic = check_basic(sigma, sigma0_sq);
                std::erase_if(basic.results, [&](const ConditionResult& r) { return !want(r.id); });
                report.merge(basic);
            }
            if (want(4)) report.merge(check_degree(sigma, chk_n, alpha_tilde));
            if (want(5)) report.merge(check_beta_min(sigma, chk_n, s0, eta0, eta1));
            if (want(6) || want(7)) {
                auto om = check_omega_min(sigma, chk_eta_omega, chk_n, chk_alpha_star);
                std::erase_if(om.results, [&](const ConditionResult& r) { return !want(r.id); });
                report.merge(om);
            }
            report.constants["constants_from_" + chk_constants_from] = 1.0;
            nlohmann::json config = {{"sigma", chk_sigma}, {"n", chk_n}, {"conditions", chk_conditions},
                                     {"constants_from", chk_constants_from}};
            emit(io::to_json(report), chk_out, "check", std::nullopt, config.dump(), out);
        } else if (*cst) {
            const auto k = theorem_constants(cst_sigma0, cst_lambda_min, cst_p, cst_s0, cst_n, cst_t);
            nlohmann::json config = {{"sigma0", cst_sigma0}, {"lambda_min", cst_lambda_min}, {"p", cst_p},
                                     {"s0", cst_s0}, {"n", cst_n}};
            emit(io::to_json(k), cst_out, "constants", std::nullopt, config.dump(), out);
        } else if (*exp) {
            const auto config_json = io::read_json(fs::path(exp_config));
            const auto config = ExperimentConfig::from_json(config_json);
            const auto report = run_experiment(config, {exp_threads, exp_timing});
            const auto aggregate = aggregate_json(report);
            if (exp_out.empty()) {
                out << aggregate.dump(2) << "\n";
            } else {
                const fs::path dir(exp_out);
                std::ostringstream csv;
                write_records_csv(csv, report.records);
                io::write_text(dir / "records.csv", csv.str());
                io::write_text(dir / "aggregate.json", aggregate.dump(2) + "\n");
                std::vector<std::string> outputs = {"records.csv", "aggregate.json"};
                if (exp_gnuplot) {
                    std::ostringstream gp;
                    write_gnuplot(gp, report);
                    io::write_text(dir / "error_vs_n.dat", gp.str());
                    outputs.push_back("error_vs_n.dat");
                }
                io::write_text(dir / "manifest.json",
                               manifest("experiment", config.seed, config.to_json().dump(), outputs).dump(2) + "\n");
                out << "wrote " << (dir / "records.csv").string() << "\n";
            }
        }
    } catch (const NumericalError& e) {
        err << "l0dag: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "l0dag: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "l0dag: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace l0dag
