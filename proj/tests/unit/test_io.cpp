#include "l0dag/errors.hpp"
#include "l0dag/io.hpp"
#include "l0dag/simulator.hpp"

#include <doctest.h>

#include <sstream>

using namespace l0dag;

TEST_SUITE("io") {

TEST_CASE("DagModel JSON round trip uses 1-based edges") {
    const auto m = ar1_model(3, 0.5);
    const auto j = io::to_json(m);
    CHECK(j["p"] == 3);
    CHECK(j["edges"][0][0] == 2);
    CHECK(j["edges"][0][1] == 1);
    const auto back = io::dag_model_from_json(j);
    CHECK((back.B.array() == m.B.array()).all());
    CHECK((back.omega.array() == m.omega.array()).all());

    auto bad = j;
    bad["edges"].push_back({1, 3, 0.2});  // closes a cycle 3 -> 2 -> 1 -> 3
    CHECK_THROWS_AS(io::dag_model_from_json(bad), InvalidInput);
    CHECK_THROWS_AS(io::dag_model_from_json(nlohmann::json{{"p", 2}}), InvalidInput);
}

TEST_CASE("orderings parse 1-based") {
    CHECK(io::parse_ordering("3,1,2") == Ordering({2, 0, 1}));
    CHECK_THROWS_AS(io::parse_ordering("1,1,2"), InvalidInput);
    CHECK_THROWS_AS(io::parse_ordering("a,b"), InvalidInput);
}

TEST_CASE("CSV matrices") {
    std::istringstream with_header("x1,x2\n1,2\n3,4.5\n");
    const auto m = io::read_csv_matrix(with_header);
    CHECK(m.rows() == 2);
    CHECK(m(1, 1) == 4.5);
    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(io::read_csv_matrix(ragged), InvalidInput);

    Eigen::MatrixXd x(1, 2);
    x << 0.1, 1.0 / 3.0;
    std::ostringstream os;
    io::write_csv_matrix(os, x);
    std::istringstream is(os.str());
    CHECK((io::read_csv_matrix(is).array() == x.array()).all());
}

TEST_CASE("content hash is FNV-1a") {
    CHECK(io::content_hash("") == "cbf29ce484222325");
    CHECK(io::content_hash("a") == "af63dc4c8601ec8c");
}

}
