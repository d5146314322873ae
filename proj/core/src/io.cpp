#include "hardytree/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hardytree/version.hpp"
#include "json.hpp"

namespace hardytree {

namespace {

using nlohmann::ordered_json;

double require_number(const ordered_json& j, const char* field, const std::string& where) {
  if (!j.contains(field) || !j[field].is_number())
    throw input_error(where + ": missing or non-numeric field \"" + field + "\"");
  return j[field].get<double>();
}

std::vector<WeightSegment> parse_segments(const ordered_json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty())
    throw input_error(where + ": expected a non-empty array of {len,value} pieces");
  std::vector<WeightSegment> segs;
  for (const auto& p : arr) {
    double len = require_number(p, "len", where);
    double value = require_number(p, "value", where);
    if (len <= 0.0) throw input_error(where + ": piece length must be positive");
    if (value < 0.0) throw input_error(where + ": piece value must be nonnegative");
    segs.push_back(WeightSegment{len, value});
  }
  return segs;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // fixed newlines on every platform
  if (!os) throw input_error("cannot open output file: " + path);
  return os;
}

void put_header(std::ostream& os, const ArtifactHeader& h) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(fnv1a(h.config)));
  os << "# config_hash " << buf << "\n# grid " << h.grid << "\n# seed " << h.seed
     << "\n# version " << version_string << "\n";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

LoadedProblem parse_problem(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw input_error(std::string("JSON parse failure: ") + e.what());
  }
  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
    throw input_error("missing or empty \"vertices\" array");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw input_error("missing \"edges\" array");

  std::map<long long, int> vid;
  for (const auto& v : j["vertices"]) {
    if (!v.is_number_integer()) throw input_error("\"vertices\" entries must be integers");
    long long id = v.get<long long>();
    if (!vid.emplace(id, static_cast<int>(vid.size())).second)
      throw input_error("duplicate vertex id " + std::to_string(id));
  }

  std::vector<Edge> edges;
  std::vector<std::vector<WeightSegment>> usegs, vsegs;
  std::map<long long, int> eid;
  for (const auto& e : j["edges"]) {
    long long id = static_cast<long long>(require_number(e, "id", "edge"));
    std::string where = "edge " + std::to_string(id);
    if (!eid.emplace(id, static_cast<int>(eid.size())).second)
      throw input_error("duplicate edge id " + std::to_string(id));
    long long from = static_cast<long long>(require_number(e, "from", where));
    long long to = static_cast<long long>(require_number(e, "to", where));
    double length = require_number(e, "length", where);
    if (length <= 0.0) throw input_error(where + ": length must be positive");
    auto fit = vid.find(from), tit = vid.find(to);
    if (fit == vid.end()) throw input_error(where + ": unknown \"from\" vertex " + std::to_string(from));
    if (tit == vid.end()) throw input_error(where + ": unknown \"to\" vertex " + std::to_string(to));
    edges.push_back(Edge{fit->second, tit->second, length});
    if (!e.contains("u")) throw input_error(where + ": missing weight \"u\"");
    if (!e.contains("v")) throw input_error(where + ": missing weight \"v\"");
    usegs.push_back(parse_segments(e["u"], where + " weight u"));
    vsegs.push_back(parse_segments(e["v"], where + " weight v"));
    for (const char* wname : {"u", "v"}) {
      const auto& segs = wname[0] == 'u' ? usegs.back() : vsegs.back();
      double sum = 0.0;
      for (const WeightSegment& s : segs) sum += s.len;
      if (std::abs(sum - length) > 1e-9)
        throw input_error(where + ": weight \"" + wname + "\" piece lengths sum to " +
                          num(sum) + ", edge length is " + num(length));
    }
  }

  LoadedProblem lp{MetricTree(static_cast<int>(vid.size()), edges),
                   StepWeight{std::move(usegs)}, StepWeight{std::move(vsegs)},
                   Location{0, 0.0}};
  try {
    lp.tree.validate();
  } catch (const std::exception& e) {
    throw input_error(std::string("invalid tree: ") + e.what());
  }

  if (!j.contains("root") || !j["root"].is_object())
    throw input_error("missing \"root\" object");
  long long redge = static_cast<long long>(require_number(j["root"], "edge", "root"));
  double roff = require_number(j["root"], "offset", "root");
  auto rit = eid.find(redge);
  if (rit == eid.end()) throw input_error("root: unknown edge id " + std::to_string(redge));
  double rlen = lp.tree.edge(rit->second).length;
  if (roff < 0.0 || roff > rlen)
    throw input_error("root: offset " + num(roff) + " outside [0, " + num(rlen) + "]");
  lp.root = Location{rit->second, roff};
  return lp;
}

LoadedProblem load_problem(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("cannot open input file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_problem(ss.str());
}

void save_problem(const std::string& path, const MetricTree& t, const StepWeight& u,
                  const StepWeight& v, Location root) {
  ordered_json j;
  j["vertices"] = ordered_json::array();
  for (int w = 0; w < t.vertex_count(); ++w) j["vertices"].push_back(w);
  j["edges"] = ordered_json::array();
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    ordered_json je;
    je["id"] = e;
    je["from"] = t.edge(e).from;
    je["to"] = t.edge(e).to;
    je["length"] = t.edge(e).length;
    for (const char* wname : {"u", "v"}) {
      const auto& segs = (wname[0] == 'u' ? u : v).per_edge[e];
      ordered_json arr = ordered_json::array();
      for (const WeightSegment& s : segs) arr.push_back({{"len", s.len}, {"value", s.value}});
      je[wname] = std::move(arr);
    }
    j["edges"].push_back(std::move(je));
  }
  j["root"] = {{"edge", root.edge}, {"offset", root.offset}};
  std::ofstream os = open_out(path);
  os << j.dump(2) << "\n";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // flush -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_table_csv(const std::string& path, const ArtifactHeader& h, const Table& tb) {
  std::ofstream os = open_out(path);
  put_header(os, h);
  for (std::size_t c = 0; c < tb.columns.size(); ++c)
    os << (c ? "," : "") << csv_quote(tb.columns[c]);
  os << "\n";
  for (const auto& row : tb.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_quote(row[c]);
    os << "\n";
  }
}

void write_table_json(const std::string& path, const ArtifactHeader& h, const Table& tb) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(fnv1a(h.config)));
  ordered_json j;
  j["header"] = {{"config_hash", buf}, {"grid", h.grid}, {"seed", h.seed},
                 {"version", version_string}};
  j["columns"] = tb.columns;
  j["rows"] = ordered_json::array();
  for (const auto& row : tb.rows) j["rows"].push_back(row);
  std::ofstream os = open_out(path);
  os << j.dump(2) << "\n";
}

bool write_plot_svg(const std::string& path, const ArtifactHeader& h,
                    const std::vector<std::pair<double, double>>& points, double target,
                    const std::string& xlabel, const std::string& ylabel) {
  std::vector<std::pair<double, double>> pts;
  for (auto [x, y] : points)
    if (x > 0.0 && y > 0.0) pts.emplace_back(std::log10(x), std::log10(y));
  if (pts.empty()) return false;

  double xlo = pts[0].first, xhi = pts[0].first;
  double ylo = pts[0].second, yhi = pts[0].second;
  for (auto [x, y] : pts) {
    xlo = std::min(xlo, x), xhi = std::max(xhi, x);
    ylo = std::min(ylo, y), yhi = std::max(yhi, y);
  }
  if (target > 0.0) {
    ylo = std::min(ylo, std::log10(target));
    yhi = std::max(yhi, std::log10(target));
  }
  const double xpad = std::max(0.05, (xhi - xlo) * 0.08);
  const double ypad = std::max(0.05, (yhi - ylo) * 0.08);
  xlo -= xpad, xhi += xpad, ylo -= ypad, yhi += ypad;

  const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

  std::ofstream os = open_out(path);
  char hash[64];
  std::snprintf(hash, sizeof hash, "0x%016llx",
                static_cast<unsigned long long>(fnv1a(h.config)));
  os << "<!-- config_hash " << hash << " grid " << h.grid << " seed " << h.seed
     << " version " << version_string << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";

  if (target > 0.0) {
    double ty = Y(std::log10(target));
    os << "<line x1=\"" << ml << "\" y1=\"" << num(ty) << "\" x2=\"" << W - mr << "\" y2=\""
       << num(ty) << "\" stroke=\"#c02020\" stroke-dasharray=\"6 3\"/>\n";
    os << "<text x=\"" << W - mr - 4 << "\" y=\"" << num(ty - 5)
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#c02020\">target " << num(target)
       << "</text>\n";
  }

  os << "<polyline fill=\"none\" stroke=\"#2040c0\" stroke-width=\"1.5\" points=\"";
  for (auto [x, y] : pts) os << num(X(x)) << "," << num(Y(y)) << " ";
  os << "\"/>\n";
  for (auto [x, y] : pts)
    os << "<circle cx=\"" << num(X(x)) << "\" cy=\"" << num(Y(y))
       << "\" r=\"3\" fill=\"#2040c0\"/>\n";

  // decade tick labels on both axes
  for (int d = static_cast<int>(std::ceil(xlo)); d <= static_cast<int>(std::floor(xhi)); ++d)
    os << "<text x=\"" << num(X(d)) << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(std::ceil(ylo)); d <= static_cast<int>(std::floor(yhi)); ++d)
    os << "<text x=\"" << ml - 6 << "\" y=\"" << num(Y(d) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
  os << "<text x=\"" << num((ml + W - mr) / 2) << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << num((mt + H - mb) / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << num((mt + H - mb) / 2) << ")\">" << ylabel << "</text>\n";
  os << "</svg>\n";
  return true;
}

}  // namespace hardytree
