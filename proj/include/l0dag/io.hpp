#pragma once

// File formats. Node indices are 1-based in every external format.
//
//   DagModel JSON:  {"p": int, "edges": [[k, j, beta], ...], "omega": [float; p]}
//   Covariance CSV: p rows x p columns
//   Dataset CSV:    n rows x p columns, optional header row

#include "l0dag/conditions.hpp"
#include "l0dag/model.hpp"
#include "l0dag/representation.hpp"
#include "l0dag/search.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace l0dag::io {

nlohmann::json to_json(const DagModel& model);
DagModel dag_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Ordering& pi);  // 1-based
Ordering parse_ordering(const std::string& text);  // "3,1,2", 1-based

nlohmann::json to_json(const EdgeProfile& profile);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const TheoremConstants& constants);

/// Reads a numeric CSV; a first row containing a non-numeric cell is treated as a header.
Eigen::MatrixXd read_csv_matrix(std::istream& is);
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(std::ostream& os, const Eigen::MatrixXd& m);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64-bit, hex encoded.
std::string content_hash(const std::string& text);

}  // namespace l0dag::io
