#include "oracles.hpp"

#include "l0dag/errors.hpp"
#include "l0dag/representation.hpp"
#include "l0dag/simulator.hpp"

#include <doctest.h>

using namespace l0dag;

TEST_SUITE("representation") {

TEST_CASE("diagonal covariance has an empty representation under any ordering") {
    Eigen::VectorXd d(3);
    d << 1.0, 2.0, 3.0;
    const auto S = CovarianceMatrix::population(d.asDiagonal().toDenseMatrix());
    for_each_ordering(3, [&](const Ordering& pi) {
        const auto m = gram_schmidt_representation(S, pi, 1e-9);
        CHECK(m.edge_count() == 0);
        CHECK((m.omega - d).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(edge_profile(S, pi, 1e-9).total == 0);
    });
}

TEST_CASE("AR(1) identity ordering recovers the chain") {
    const auto truth = ar1_model(3, 0.5);
    const auto S = covariance_of(truth);
    const auto m = gram_schmidt_representation(S, Ordering::identity(3), 1e-9);
    CHECK((m.B - truth.B).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.omega(0) == doctest::Approx(0.75));
    CHECK(m.omega(1) == doctest::Approx(0.75));
    CHECK(m.omega(2) == doctest::Approx(1.0));
}

TEST_CASE("AR(1) reversed ordering has two edges and no 1 -> 3 coefficient") {
    const auto S = covariance_of(ar1_model(3, 0.5));
    const Ordering rev({2, 1, 0});
    const auto m = gram_schmidt_representation(S, rev, 1e-9);
    CHECK(m.edge_count() == 2);
    CHECK(m.B(0, 2) == 0.0);
    // Oracle regression of X3 on {X1, X2}.
    const Eigen::VectorXd b = oracle::coef(S.matrix(), 2, {0, 1});
    CHECK(std::abs(b(0)) < 1e-12);
    CHECK(b(1) == doctest::Approx(0.5));
    CHECK(equivalent(m, gram_schmidt_representation(S, Ordering::identity(3), 1e-9), 1e-10));
}

TEST_CASE("representation matches explicit regressions") {
    const Eigen::MatrixXd S = oracle::random_pd(5, 4);
    const auto sigma = CovarianceMatrix::population(S);
    for_each_ordering(5, [&](const Ordering& pi) {
        const auto m = gram_schmidt_representation(sigma, pi, 0.0);
        const auto o = oracle::gram_schmidt(S, pi.values());
        CHECK((m.B - o.B).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((m.omega - o.omega).cwiseAbs().maxCoeff() < 1e-9);
    });
}

TEST_CASE("reconstruction and noise-variance bounds over every ordering") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int p = 3 + static_cast<int>(seed % 4);
        const Eigen::MatrixXd S = oracle::random_pd(p, 100 + seed);
        const auto sigma = CovarianceMatrix::population(S);
        const Eigen::MatrixXd inv = S.inverse();
        const double lmin = sigma.lambda_min_sq();
        bool ok = true;
        for_each_ordering(p, [&](const Ordering& pi) {
            const auto m = gram_schmidt_representation(sigma, pi, 0.0);
            ok = ok && (precision_of(m).matrix() - inv).cwiseAbs().maxCoeff() <= 1e-8;
            for (int j = 0; j < p; ++j) {
                ok = ok && m.omega(j) >= lmin - 1e-9 && m.omega(j) <= S(j, j) + 1e-9;
            }
            // Support lies in the later part of the ordering.
            const auto pos = pi.position();
            for (int k = 0; k < p; ++k)
                for (int j = 0; j < p; ++j)
                    if (m.B(k, j) != 0.0) ok = ok && pos[k] > pos[j];
        });
        CHECK(ok);
    }
}

TEST_CASE("singular covariance is a numerical error naming the eigenvalue condition") {
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
    S(0, 1) = S(1, 0) = 1.0;
    try {
        gram_schmidt_representation(CovarianceMatrix::population(S), Ordering::identity(3), 0.0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("Condition 2") != std::string::npos);
    }
}

TEST_CASE("edge profiles") {
    const auto S4 = covariance_of(ar1_model(4, 0.5));
    CHECK(edge_profile(S4, Ordering::identity(4), 1e-9).total == 3);

    const auto S6 = covariance_of(ar1_model(6, 0.5));
    int worst = 0;
    for_each_ordering(6, [&](const Ordering& pi) {
        const auto e = edge_profile(S6, pi, 1e-9);
        int sum = 0;
        for (int d : e.in_degree) {
            worst = std::max(worst, d);
            sum += d;
        }
        CHECK(sum == e.total);
    });
    CHECK(worst == 2);
}

TEST_CASE("edge profile counts the non-zeros of the representation") {
    const Eigen::MatrixXd S = oracle::random_pd(5, 77);
    const auto sigma = CovarianceMatrix::population(S);
    const Ordering pi({4, 2, 0, 3, 1});
    const auto m = gram_schmidt_representation(sigma, pi, 0.0);
    const auto e = edge_profile(sigma, pi, 0.0);
    CHECK(e.total == m.edge_count());
    CHECK(e.total == 10);
    CHECK(edge_profile(CovarianceMatrix::population(Eigen::MatrixXd::Identity(4, 4)), Ordering::identity(4), 0.0).total == 0);
}

TEST_CASE("minimal-edge I-MAP") {
    const auto I = CovarianceMatrix::population(Eigen::MatrixXd::Identity(4, 4));
    const auto r0 = minimal_edge_imap(I, 1e-9, Exhaustive{});
    CHECK(r0.model.edge_count() == 0);
    CHECK(r0.pi == Ordering::identity(4));
    CHECK(r0.exhaustive);
    CHECK(r0.orderings_evaluated == 24);

    const auto r1 = minimal_edge_imap(covariance_of(ar1_model(4, 0.5)), 1e-9, Exhaustive{});
    CHECK(r1.model.edge_count() == 3);

    SimConfig c;
    c.p = 5;
    c.s0 = 5;
    c.seed = 8;
    const auto S = covariance_of(random_sparse_dag(c));
    const auto r2 = minimal_edge_imap(S, 1e-9, Exhaustive{});
    CHECK(r2.model.edge_count() <= edge_profile(S, Ordering::identity(5), 1e-9).total);
    CHECK(r2.model.edge_count() <= 5);

    const auto rs = minimal_edge_imap(S, 1e-9, Sampled{50, 3});
    CHECK_FALSE(rs.exhaustive);
    CHECK(rs.orderings_evaluated == 51);
    CHECK(rs.model.edge_count() >= r2.model.edge_count());

    CHECK_THROWS_AS(minimal_edge_imap(CovarianceMatrix::population(Eigen::MatrixXd::Identity(10, 10)), 1e-9,
                                      Exhaustive{}),
                    InvalidInput);
}

TEST_CASE("equivalence predicate") {
    const auto chain = ar1_model(3, 0.5);
    CHECK(equivalent(chain, chain, 1e-12));
    CHECK_FALSE(equivalent(chain, DagModel::empty(chain.omega), 1e-9));
}

TEST_CASE("default zero tolerances") {
    CHECK(default_zero_tol(CovarianceMatrix::population(Eigen::MatrixXd::Identity(2, 2))) == 1e-9);
    CHECK(default_zero_tol(CovarianceMatrix::empirical(Eigen::MatrixXd::Identity(2, 2), 10)) == 0.0);
}

}
