#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "symlat/coloured_graph.hpp"
#include "symlat/gaussian.hpp"

namespace symlat {

using Json = nlohmann::json;

struct Table {
  Labels header;
  Eigen::MatrixXd values;
};

/// CSV with a header row of names and numeric rows. A leading unnamed
/// column (row names) is dropped.
Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text, const std::string& source = "csv");

GaussianData read_observations(const std::filesystem::path& path, Divisor divisor);
/// Square covariance matrix (divisor n-1) with a header of variable names.
GaussianData read_covariance(const std::filesystem::path& path, int n, Divisor divisor);

/// Throws ParseError on malformed or, unless `normalize`, non-canonical input.
ColouredGraph graph_from_json(const Json& j, bool normalize = false);
ColouredGraph read_graph(const std::filesystem::path& path, bool normalize = false);
Json graph_to_json(const ColouredGraph& g);

/// "V:a,b" for vertex classes and "E:a-b,c-d" for edge classes.
std::string class_key(const ColouredGraph& g, bool vertex, int block);
Json fit_to_json(const ColouredGraph& g, const FitResult& fit);

/// Indented JSON with object keys on separate lines and arrays of plain
/// values kept on one line.
std::string pretty_json(const Json& j, int indent = 0);

}  // namespace symlat
