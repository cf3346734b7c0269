#include "l0dag/io.hpp"

#include "l0dag/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace l0dag::io {

nlohmann::json to_json(const DagModel& model) {
    nlohmann::json edges = nlohmann::json::array();
    for (int k = 0; k < model.p(); ++k)
        for (int j = 0; j < model.p(); ++j)
            if (model.B(k, j) != 0.0) edges.push_back({k + 1, j + 1, model.B(k, j)});
    std::vector<double> omega(model.omega.data(), model.omega.data() + model.omega.size());
    return {{"p", model.p()}, {"edges", edges}, {"omega", omega}};
}

DagModel dag_model_from_json(const nlohmann::json& j) {
    try {
        const int p = j.at("p").get<int>();
        if (p < 1) throw InvalidInput("DagModel JSON: p must be positive");
        const auto omega = j.at("omega").get<std::vector<double>>();
        if (static_cast<int>(omega.size()) != p) throw InvalidInput("DagModel JSON: omega must have p entries");
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw InvalidInput("DagModel JSON: edges are [k, j, beta]");
            const int k = e[0].get<int>(), c = e[1].get<int>();
            if (k < 1 || k > p || c < 1 || c > p) throw InvalidInput("DagModel JSON: edge index out of range");
            B(k - 1, c - 1) = e[2].get<double>();
        }
        DagModel m(std::move(B), Eigen::Map<const Eigen::VectorXd>(omega.data(), p));
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("DagModel JSON: ") + e.what());
    }
}

nlohmann::json to_json(const Ordering& pi) {
    std::vector<int> v;
    for (int x : pi.values()) v.push_back(x + 1);
    return v;
}

Ordering parse_ordering(const std::string& text) {
    std::vector<int> v;
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) {
        try {
            std::size_t used = 0;
            const int x = std::stoi(cell, &used);
            v.push_back(x - 1);
        } catch (const std::exception&) {
            throw InvalidInput("ordering must be a comma-separated list of 1-based node indices");
        }
    }
    return Ordering(std::move(v));
}

nlohmann::json to_json(const EdgeProfile& profile) {
    nlohmann::json support = nlohmann::json::array();
    for (const auto& s : profile.support) {
        std::vector<int> one;
        for (int k : s) one.push_back(k + 1);
        support.push_back(one);
    }
    return {{"in_degree", profile.in_degree}, {"total", profile.total}, {"support", support}};
}

nlohmann::json to_json(const FitResult& fit) {
    nlohmann::json parents = nlohmann::json::array();
    for (const auto& s : fit.parents) {
        std::vector<int> one;
        for (int k : s) one.push_back(k + 1);
        parents.push_back(one);
    }
    return {{"model", to_json(fit.model)},
            {"score", fit.score},
            {"s_hat", fit.s_hat},
            {"pi_hat", to_json(fit.pi_hat)},
            {"method", std::string(to_string(fit.method))},
            {"mode", std::string(to_string(fit.mode))},
            {"lambda2", fit.lambda2},
            {"parents", parents},
            {"node_scores", fit.node_scores}};
}

nlohmann::json to_json(const ConditionReport& report) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& r : report.results) {
        nlohmann::json c = {{"condition", r.id},
                            {"name", r.name},
                            {"satisfied", r.satisfied},
                            {"measured", r.measured},
                            {"threshold", r.threshold},
                            {"enumeration", r.enumeration},
                            {"detail", r.detail}};
        if (r.worst_ordering) c["worst_ordering"] = to_json(*r.worst_ordering);
        conditions.push_back(c);
    }
    return {{"conditions", conditions}, {"constants", report.constants}, {"advisory", report.advisory}};
}

nlohmann::json to_json(const TheoremConstants& constants) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, value] : constants.fields()) j[name] = value;
    j["p"] = constants.p;
    j["s0"] = constants.s0;
    j["n"] = constants.n;
    return j;
}

Eigen::MatrixXd read_csv_matrix(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        bool numeric = true;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            while (end && (*end == ' ' || *end == '\t')) ++end;
            if (end == begin || (end && *end != '\0')) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw InvalidInput("CSV contains a non-numeric cell: " + line);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) throw InvalidInput("CSV rows have unequal length");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput("CSV is empty");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return read_csv_matrix(in);
}

void write_csv_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace l0dag::io
