#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// Malformed or unreadable input file; the CLI maps this to its own exit code.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A problem instance as stored on disk: tree, both weights, rooting point.
struct LoadedProblem {
  MetricTree tree;
  StepWeight u;
  StepWeight v;
  Location root;
};

// JSON schema: {"vertices":[ids],
//               "edges":[{"id","from","to","length","u":[{"len","value"},...],
//                         "v":[...]}, ...],
//               "root":{"edge","offset"}}
// Vertex and edge ids may be arbitrary integers; they are mapped to dense
// indices in listing order. Weight piece lengths must sum to the edge length
// within 1e-9. Errors mention the offending field or edge.
LoadedProblem load_problem(const std::string& path);
LoadedProblem parse_problem(const std::string& text);
void save_problem(const std::string& path, const MetricTree& t, const StepWeight& u,
                  const StepWeight& v, Location root);

// Stamp written at the top of every artifact.
struct ArtifactHeader {
  std::string config;       // canonical config string; only its hash is emitted
  int grid = 0;
  std::uint64_t seed = 0;
};

std::uint64_t fnv1a(const std::string& s);

// Shortest fixed formatting used for all numeric artifact fields ("%.12g",
// with negative zero normalized) so reruns are byte-identical.
std::string num(double x);

// Column-oriented table; every cell already formatted. CSV is the canonical
// artifact format and JSON mirrors the same strings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_table_csv(const std::string& path, const ArtifactHeader& h, const Table& tb);
void write_table_json(const std::string& path, const ArtifactHeader& h, const Table& tb);

// Log-log scatter/line plot with a horizontal target line. Points with a
// nonpositive coordinate are skipped (log scale); returns false without
// creating a file when nothing remains to draw.
bool write_plot_svg(const std::string& path, const ArtifactHeader& h,
                    const std::vector<std::pair<double, double>>& points, double target,
                    const std::string& xlabel, const std::string& ylabel);

}  // namespace hardytree
