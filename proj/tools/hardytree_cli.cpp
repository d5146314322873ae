#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardytree/acceptance.hpp"
#include "hardytree/asymptotics.hpp"
#include "hardytree/exact_cover.hpp"
#include "hardytree/fixtures.hpp"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/io.hpp"
#include "hardytree/partition.hpp"
#include "hardytree/sigma.hpp"
#include "hardytree/version.hpp"

namespace ht = hardytree;

namespace {

struct RunConfig {
  std::string input;
  double p = 2.0;
  int grid = 256;
  double eps_start = 0.5;
  double eps_factor = 0.6;
  int eps_count = 5;
  int n_max = 20;
  std::string out;
  std::string format = "csv";
  std::string svg;
  std::uint64_t seed = 20260822ull;
};

// Invariants every run must satisfy; violations are usage errors (exit 2).
std::string config_problem(const RunConfig& c) {
  if (!(c.p >= 1.0)) return "--p must be at least 1";
  if (c.grid < 64) return "--grid must be at least 64";
  if (!(c.eps_start > 0.0)) return "--eps-start must be positive";
  if (!(c.eps_factor > 0.0 && c.eps_factor < 1.0))
    return "--eps-factor must lie in (0, 1): the threshold schedule is strictly decreasing";
  if (c.eps_count < 1) return "--eps-count must be at least 1";
  if (c.n_max < 1) return "--n-max must be at least 1";
  if (c.format != "csv" && c.format != "json") return "--format must be csv or json";
  return "";
}

struct Problem {
  ht::RootedTree rt;
  ht::StepWeight u;
  ht::StepWeight v;
};

// "fixture:<name>" resolves to a built-in instance, anything else is a path.
Problem load(const std::string& input) {
  ht::LoadedProblem lp = [&] {
    const std::string scheme = "fixture:";
    if (input.rfind(scheme, 0) == 0) {
      try {
        ht::Fixture fx = ht::fixture_by_name(input.substr(scheme.size()));
        return ht::LoadedProblem{fx.tree, fx.u, fx.v, fx.root};
      } catch (const std::out_of_range&) {
        throw ht::input_error("unknown fixture \"" + input.substr(scheme.size()) +
                              "\"; available: interval, path04, y_sym, binary3, b2");
      }
    }
    return ht::load_problem(input);
  }();
  ht::RootedTree rt = ht::RootedTree::root_at(lp.tree, lp.root);
  return {rt, ht::split_weight(lp.u, rt.split()), ht::split_weight(lp.v, rt.split())};
}

ht::ArtifactHeader make_header(const std::string& cmd, const RunConfig& c,
                               const std::string& extra = "") {
  ht::ArtifactHeader h;
  h.config = cmd + " input=" + c.input + " p=" + ht::num(c.p) +
             " grid=" + std::to_string(c.grid) + (extra.empty() ? "" : " " + extra);
  h.grid = c.grid;
  h.seed = c.seed;
  return h;
}

void emit(const ht::Table& tb, const ht::ArtifactHeader& h, const RunConfig& c) {
  if (c.out.empty()) return;
  if (c.format == "json")
    ht::write_table_json(c.out, h, tb);
  else
    ht::write_table_csv(c.out, h, tb);
  std::printf("wrote %s\n", c.out.c_str());
}

ht::GridParams grid_of(const RunConfig& c) {
  ht::GridParams g;
  g.per_edge = c.grid;
  return g;
}

ht::AEvalParams eval_of(const RunConfig& c) {
  ht::AEvalParams ap;
  ap.grid = grid_of(c);
  return ap;
}

std::vector<double> schedule_of(const RunConfig& c) {
  std::vector<double> eps(c.eps_count);
  double x = c.eps_start;
  for (int i = 0; i < c.eps_count; ++i, x *= c.eps_factor) eps[i] = x;
  return eps;
}

std::string schedule_tag(const RunConfig& c) {
  return "eps=" + ht::num(c.eps_start) + "*" + ht::num(c.eps_factor) + "^" +
         std::to_string(c.eps_count);
}

int cmd_validate(const RunConfig& c) {
  Problem pb = load(c.input);
  const ht::MetricTree& t = pb.rt.tree();
  std::printf("input %s\n", c.input.c_str());
  std::printf("vertices %d\n", t.vertex_count());
  std::printf("edges %d\n", t.edge_count());
  std::printf("total_length %s\n", ht::num(t.total_length()).c_str());
  ht::Location r = pb.rt.vertex_location(pb.rt.root());
  std::printf("root edge=%d offset=%s\n", r.edge, ht::num(r.offset).c_str());
  std::printf("ok\n");
  return 0;
}

int cmd_scalar(const std::string& name, const RunConfig& c) {
  Problem pb = load(c.input);
  ht::Subtree whole = ht::whole_tree(pb.rt);
  double val = name == "norm"
                   ? ht::op_norm_rich(pb.rt, pb.u, pb.v, whole, ht::PNorm::of(c.p), grid_of(c))
                   : ht::a_value_rich(pb.rt, pb.u, pb.v, whole, ht::PNorm::of(c.p), grid_of(c));
  std::printf("%s %s\n", name.c_str(), ht::num(val).c_str());
  ht::Table tb;
  tb.columns = {"name", "value"};
  tb.rows.push_back({name, ht::num(val)});
  emit(tb, make_header(name, c), c);
  return 0;
}

int cmd_approx(const RunConfig& c) {
  if (c.p != 2.0)
    throw std::invalid_argument("approximation numbers use the singular spectrum: --p must be 2");
  Problem pb = load(c.input);
  std::vector<double> sv =
      ht::approx_numbers_p2(pb.rt, pb.u, pb.v, ht::whole_tree(pb.rt), c.n_max, grid_of(c));
  ht::Table tb;
  tb.columns = {"n", "a_n"};
  for (int n = 1; n <= c.n_max; ++n) tb.rows.push_back({std::to_string(n), ht::num(sv[n - 1])});
  std::printf("a_1 %s\n", ht::num(sv[0]).c_str());
  std::printf("a_%d %s\n", c.n_max, ht::num(sv[c.n_max - 1]).c_str());
  emit(tb, make_header("approx", c, "n_max=" + std::to_string(c.n_max)), c);
  return 0;
}

int cmd_partition(const RunConfig& c) {
  Problem pb = load(c.input);
  ht::Subtree whole = ht::whole_tree(pb.rt);
  ht::PNorm p = ht::PNorm::of(c.p);
  ht::AEvalParams ap = eval_of(c);
  ht::EpsPartitionResult part = ht::eps_partition(pb.rt, pb.u, pb.v, whole, p, c.eps_start, ap);
  ht::EpsPackingResult pack = ht::eps_packing(pb.rt, pb.u, pb.v, whole, p, c.eps_start, ap);
  std::printf("eps %s N_upper %d M_lower %d\n", ht::num(c.eps_start).c_str(), part.count,
              pack.count);
  ht::Table tb;
  tb.columns = {"eps", "N_upper", "M_lower"};
  tb.rows.push_back({ht::num(c.eps_start), std::to_string(part.count),
                     std::to_string(pack.count)});
  emit(tb, make_header("partition", c, "eps=" + ht::num(c.eps_start)), c);
  return 0;
}

bool oracle_scope(const ht::MetricTree& t, const ht::ExactCoverParams& xp) {
  if (t.edge_count() > xp.max_edges) return false;
  for (ht::VertexId w = 0; w < t.vertex_count(); ++w)
    if (static_cast<int>(t.incident(w).size()) > xp.max_degree) return false;
  return true;
}

int cmd_scan(const RunConfig& c) {
  Problem pb = load(c.input);
  ht::Subtree whole = ht::whole_tree(pb.rt);
  ht::PNorm p = ht::PNorm::of(c.p);
  ht::AEvalParams ap = eval_of(c);
  std::vector<double> schedule = schedule_of(c);
  double target =
      ht::alpha_p(p).value * ht::product_integral(pb.rt, pb.u, pb.v, whole);
  std::vector<ht::ScanRow> rows =
      ht::asymptotic_scan(pb.rt, pb.u, pb.v, whole, p, schedule, ap, target);

  // The exhaustive count runs on its own coarse grid; it is an independent
  // cross-check, not a refinement of the greedy numbers.
  ht::ExactCoverParams xp;
  xp.eval.grid.per_edge = 24;
  xp.eval.grid.min_nodes = 32;
  const bool with_exact = oracle_scope(pb.rt.tree(), xp);

  ht::Table tb;
  tb.columns = with_exact
                   ? std::vector<std::string>{"eps", "N_upper", "N_exact", "M_lower",
                                              "epsN", "epsM", "target"}
                   : std::vector<std::string>{"eps", "N_upper", "M_lower", "epsN", "epsM",
                                              "target"};
  std::vector<std::pair<double, double>> points;
  for (const ht::ScanRow& r : rows) {
    std::vector<std::string> row{ht::num(r.eps), std::to_string(r.n_upper)};
    if (with_exact) {
      ht::ExactCoverResult ex = ht::exact_cover_count(pb.rt, pb.u, pb.v, p, r.eps, xp);
      row.push_back(ex.ran ? std::to_string(ex.count) : "");
    }
    row.push_back(std::to_string(r.m_lower));
    row.push_back(ht::num(r.eps_n));
    row.push_back(ht::num(r.eps_m));
    row.push_back(ht::num(r.target));
    tb.rows.push_back(std::move(row));
    points.emplace_back(r.eps, r.eps_n);
  }
  std::printf("rows %zu target %s\n", tb.rows.size(), ht::num(target).c_str());
  ht::ArtifactHeader h = make_header("scan", c, schedule_tag(c));
  emit(tb, h, c);
  if (!c.svg.empty()) {
    if (ht::write_plot_svg(c.svg, h, points, target, "eps", "eps*N"))
      std::printf("wrote %s\n", c.svg.c_str());
    else
      std::fprintf(stderr, "warning: no positive data points, svg not written\n");
  }
  return 0;
}

int cmd_sigma(const RunConfig& c) {
  Problem pb = load(c.input);
  ht::SigmaTable table = ht::sigma_table(pb.rt, pb.u, pb.v, ht::PNorm::of(c.p));
  ht::Table tb;
  tb.columns = {"k", "i", "mu", "sigma", "B"};
  for (const ht::SigmaBand& band : table.bands) {
    int i = 0;
    for (const ht::SigmaComponent& comp : band.components) {
      tb.rows.push_back({std::to_string(band.k), std::to_string(i), ht::num(comp.mu),
                         ht::num(comp.sigma), std::to_string(comp.boundary_count)});
      ++i;
    }
  }
  std::printf("bands %zu components %zu sup_sigma %s\n", table.bands.size(), tb.rows.size(),
              ht::num(table.sup_sigma()).c_str());
  emit(tb, make_header("sigma", c), c);
  return 0;
}

int cmd_bounds(const RunConfig& c) {
  Problem pb = load(c.input);
  ht::Subtree whole = ht::whole_tree(pb.rt);
  ht::PNorm p = ht::PNorm::of(c.p);
  ht::AEvalParams ap = eval_of(c);
  ht::SigmaTable table = ht::sigma_table(pb.rt, pb.u, pb.v, p);
  double op = ht::op_norm_rich(pb.rt, pb.u, pb.v, whole, p, grid_of(c));
  std::vector<double> sv;
  if (p.p == 2.0)
    sv = ht::approx_numbers_p2(pb.rt, pb.u, pb.v, whole, c.n_max, grid_of(c));
  std::vector<std::pair<double, int>> packing;
  for (double eps : schedule_of(c))
    packing.emplace_back(eps, ht::eps_packing(pb.rt, pb.u, pb.v, whole, p, eps, ap).count);
  ht::BoundCheckReport rep = ht::lq_bound_checks(sv, table, op, packing, p);
  ht::Table tb;
  tb.columns = {"name", "lhs", "rhs", "ratio", "asserted", "pass"};
  for (const ht::BoundCheckRow& row : rep.rows)
    tb.rows.push_back({row.name, ht::num(row.lhs), ht::num(row.rhs), ht::num(row.ratio),
                       row.asserted ? "1" : "0", row.pass ? "1" : "0"});
  std::printf("rows %zu all_pass %d\n", tb.rows.size(), rep.all_pass ? 1 : 0);
  emit(tb, make_header("bounds", c, schedule_tag(c) + " n_max=" + std::to_string(c.n_max)), c);
  return rep.all_pass ? 0 : 1;
}

int cmd_verify(const RunConfig& c) {
  ht::AcceptanceReport rep = ht::run_acceptance(c.seed, std::cout);
  ht::Table tb = ht::acceptance_table(rep);
  ht::ArtifactHeader h;
  h.config = "verify seed=" + std::to_string(c.seed);
  h.grid = 0;
  h.seed = c.seed;
  std::string out = c.out.empty() ? std::string("acceptance.csv") : c.out;
  if (c.format == "json")
    ht::write_table_json(out, h, tb);
  else
    ht::write_table_csv(out, h, tb);
  std::printf("wrote %s\n", out.c_str());
  std::printf("all_pass %d\n", rep.all_pass ? 1 : 0);
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-type operators on weighted rooted metric trees"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_input = [&](CLI::App* s) {
    s->add_option("--input", cfg.input, "problem JSON path or fixture:<name>")->required();
  };
  auto add_eval = [&](CLI::App* s) {
    s->add_option("--p", cfg.p, "exponent in [1, inf]");
    s->add_option("--grid", cfg.grid, "quadrature cells per edge (>= 64)");
  };
  auto add_out = [&](CLI::App* s) {
    s->add_option("--out", cfg.out, "artifact file to write");
    s->add_option("--format", cfg.format, "artifact format: csv (canonical) or json");
    s->add_option("--seed", cfg.seed, "seed stamped into artifact headers");
  };
  auto add_schedule = [&](CLI::App* s) {
    s->add_option("--eps-start", cfg.eps_start, "largest threshold");
    s->add_option("--eps-factor", cfg.eps_factor, "ratio between consecutive thresholds");
    s->add_option("--eps-count", cfg.eps_count, "number of thresholds");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse a problem and report its shape");
  add_input(validate);

  CLI::App* norm = app.add_subcommand("norm", "operator norm from the stored root");
  add_input(norm), add_eval(norm), add_out(norm);

  CLI::App* afun = app.add_subcommand("afun", "root-invariant approximation functional A");
  add_input(afun), add_eval(afun), add_out(afun);

  CLI::App* approx = app.add_subcommand("approx", "approximation numbers a_n (p = 2)");
  add_input(approx), add_eval(approx), add_out(approx);
  approx->add_option("--n-max", cfg.n_max, "how many numbers");

  CLI::App* partition = app.add_subcommand("partition", "greedy cover and packing counts at one threshold");
  add_input(partition), add_eval(partition), add_out(partition);
  partition->add_option("--eps-start", cfg.eps_start, "threshold");

  CLI::App* scan = app.add_subcommand("scan", "counting functions over a threshold schedule");
  add_input(scan), add_eval(scan), add_schedule(scan), add_out(scan);
  scan->add_option("--svg", cfg.svg, "also write a log-log plot");

  CLI::App* sigma = app.add_subcommand("sigma", "dyadic level-band table");
  add_input(sigma), add_eval(sigma), add_out(sigma);

  CLI::App* bounds = app.add_subcommand("bounds", "sequence-norm inequality checks");
  add_input(bounds), add_eval(bounds), add_schedule(bounds), add_out(bounds);
  bounds->add_option("--n-max", cfg.n_max, "spectrum length for the ratio rows");

  CLI::App* verify = app.add_subcommand("verify", "run the full verification suite");
  verify->add_option("--seed", cfg.seed, "randomized-criteria seed");
  verify->add_option("--out", cfg.out, "acceptance table file (default acceptance.csv)");
  verify->add_option("--format", cfg.format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Inequality reports are structured records first; json is their natural
  // form unless the caller asks otherwise.
  if (bounds->parsed() && bounds->get_option("--format")->count() == 0) cfg.format = "json";

  if (std::string problem = config_problem(cfg); !problem.empty()) {
    std::fprintf(stderr, "error: %s\n", problem.c_str());
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg);
    if (norm->parsed()) return cmd_scalar("norm", cfg);
    if (afun->parsed()) return cmd_scalar("a", cfg);
    if (approx->parsed()) return cmd_approx(cfg);
    if (partition->parsed()) return cmd_partition(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (sigma->parsed()) return cmd_sigma(cfg);
    if (bounds->parsed()) return cmd_bounds(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
  } catch (const ht::input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const ht::invalid_tree& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const ht::invalid_location& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const ht::unsupported_exponent& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
