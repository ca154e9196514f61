#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "symlat/classes.hpp"
#include "symlat/error.hpp"
#include "symlat/io.hpp"
#include "symlat/search.hpp"

#ifndef SYMLAT_FIXTURES_DIR
#define SYMLAT_FIXTURES_DIR "fixtures"
#endif

namespace symlat {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string format = "json";
  std::string output;
  bool normalize = false;
  unsigned jobs = 1;
  int n = 0;
  bool override_guard = false;
  std::string class_name = "all";
  bool count_only = false;
  bool summary = false;
  std::vector<std::string> graphs;
  std::string data;
  std::string cov;
  int sample_size = 0;
  std::string divisor = "n-1";
  std::string direction;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
};

fs::path fixtures_dir() {
  if (const char* env = std::getenv("SYMLAT_FIXTURES"); env && *env) return env;
  return SYMLAT_FIXTURES_DIR;
}

// Existing paths are used as given; otherwise the fixtures directory is tried.
fs::path resolve(const std::string& name) {
  fs::path p(name);
  if (fs::exists(p)) return p;
  if (auto alt = fixtures_dir() / p; fs::exists(alt)) return alt;
  throw ParseError(name, "file not found (also looked in " + fixtures_dir().string() + ")");
}

Divisor parse_divisor(const std::string& s) {
  if (s == "n") return Divisor::n;
  if (s == "n-1") return Divisor::n_minus_1;
  throw std::invalid_argument("--divisor must be 'n' or 'n-1'");
}

GaussianData load_data(const RunConfig& cfg) {
  const Divisor div = parse_divisor(cfg.divisor);
  if (!cfg.data.empty() && !cfg.cov.empty()) throw std::invalid_argument("give either --data or --cov, not both");
  if (!cfg.data.empty()) return read_observations(resolve(cfg.data), div);
  if (!cfg.cov.empty()) {
    if (cfg.sample_size < 2) throw std::invalid_argument("--cov needs --n with the sample size");
    return read_covariance(resolve(cfg.cov), cfg.sample_size, div);
  }
  throw std::invalid_argument("no data given (use --data <csv> or --cov <csv> --n <int>)");
}

ColouredGraph load_graph(const RunConfig& cfg, std::size_t i) {
  return read_graph(resolve(cfg.graphs.at(i)), cfg.normalize);
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  bool json() const { return cfg_.format == "json"; }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      if (!text.empty() && text.back() != '\n') out_ << '\n';
      return;
    }
    std::ofstream f(cfg_.output);
    if (!f) throw ParseError(cfg_.output, "cannot write output file");
    f << text << '\n';
  }
  void emit(const Json& j) { emit(pretty_json(j)); }
  void emit_graph(const ColouredGraph& g) {
    if (json()) emit(graph_to_json(g));
    else emit(render_text(g));
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

Json fit_summary(const ColouredGraph& g, const TestOutcome& o) {
  Json j{{"graph", graph_to_json(g)}, {"accepted", o.accept}, {"flagged", o.flagged}};
  if (!o.reason.empty()) j["reason"] = o.reason;
  if (o.fit) j["fit"] = fit_to_json(g, *o.fit);
  return j;
}

int cmd_count(const RunConfig& cfg, Emitter& em) {
  if (cfg.n < 1) throw std::invalid_argument("--n must be at least 1");
  // A bare integer is valid JSON and may exceed 64 bits, so it is printed verbatim.
  em.emit(model_count(static_cast<unsigned>(cfg.n)).str());
  return 0;
}

int cmd_enumerate(const RunConfig& cfg, Emitter& em) {
  if (cfg.n < 1) throw std::invalid_argument("--n must be at least 1");
  const ModelClass cls = parse_model_class(cfg.class_name);
  std::size_t count = 0;
  Json list = Json::array();
  std::ostringstream text;
  for_each_coloured_graph(numeric_labels(cfg.n), [&](const ColouredGraph& g) {
    if (!in_class(cls, g)) return;
    ++count;
    if (cfg.count_only) return;
    if (em.json()) list.push_back(graph_to_json(g));
    else text << to_compact(g) << '\n';
  }, cfg.override_guard);
  if (cfg.count_only) {
    em.emit(em.json() ? Json{{"class", to_string(cls)}, {"count", count}}.dump() : std::to_string(count));
  } else {
    em.emit(em.json() ? pretty_json(list) : text.str());
  }
  return 0;
}

int cmd_classify(const RunConfig& cfg, Emitter& em) {
  if (cfg.summary) {
    if (cfg.n < 1) throw std::invalid_argument("classify --summary needs --n");
    const auto c = classify_all(numeric_labels(cfg.n), cfg.jobs, cfg.override_guard);
    if (em.json()) {
      em.emit(Json{{"n", cfg.n}, {"total", c.total}, {"B", c.B}, {"P", c.P}, {"R", c.R}, {"Pi", c.Pi}});
    } else {
      em.emit("total=" + std::to_string(c.total) + " B=" + std::to_string(c.B) + " P=" + std::to_string(c.P) +
              " R=" + std::to_string(c.R) + " Pi=" + std::to_string(c.Pi));
    }
    return 0;
  }
  if (cfg.graphs.size() != 1) throw std::invalid_argument("classify needs one graph file or --n <k> --summary");
  const auto g = load_graph(cfg, 0);
  const bool b = is_edge_regular(g);
  const bool p = is_vertex_regular(g);
  const bool pi = is_permutation_generated(g);
  if (em.json()) {
    em.emit(Json{{"B", b}, {"P", p}, {"R", b && p}, {"Pi", pi}});
  } else {
    em.emit(std::string("B=") + (b ? "yes" : "no") + " P=" + (p ? "yes" : "no") +
            " R=" + (b && p ? "yes" : "no") + " Pi=" + (pi ? "yes" : "no"));
  }
  return 0;
}

int cmd_lattice(const RunConfig& cfg, Emitter& em, bool meet) {
  if (cfg.graphs.size() != 2) throw std::invalid_argument("meet/join need two graph files");
  const auto a = load_graph(cfg, 0);
  const auto b = load_graph(cfg, 1);
  em.emit_graph(meet ? cg_meet(a, b) : cg_join(a, b));
  return 0;
}

int cmd_sup(const RunConfig& cfg, Emitter& em) {
  if (cfg.graphs.size() != 1) throw std::invalid_argument("sup needs one graph file");
  const ModelClass cls = parse_model_class(cfg.class_name);
  if (cls == ModelClass::all) throw std::invalid_argument("sup needs --class B, P, R or Pi");
  em.emit_graph(supremum(cls, load_graph(cfg, 0)));
  return 0;
}

int cmd_fit(const RunConfig& cfg, Emitter& em) {
  if (cfg.graphs.size() != 1) throw std::invalid_argument("fit needs one graph file");
  const auto g = load_graph(cfg, 0);
  const auto data = load_data(cfg);
  const auto fit = fit_rcon(g, data);
  if (em.json()) {
    em.emit(fit_to_json(g, fit));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << render_text(g) << "loglik " << fit.loglik << "\np " << fit.p << "\ndf " << fit.df << "\ndeviance "
       << fit.deviance << "\np_value " << fit.p_value << "\nbic " << fit.bic << "\nconverged "
       << (fit.converged ? "yes" : "no") << "\niterations " << fit.iterations << '\n';
    em.emit(os.str());
  }
  return fit.converged ? 0 : 1;
}

int cmd_duals(const RunConfig& cfg, Emitter& em) {
  if (cfg.graphs.size() != 1) throw std::invalid_argument("duals needs one graph file");
  const ModelClass cls = parse_model_class(cfg.class_name);
  if (cfg.direction != "a" && cfg.direction != "r") throw std::invalid_argument("--direction must be a or r");
  const auto g = load_graph(cfg, 0);
  const Direction dir = cfg.direction == "a" ? Direction::accept : Direction::reject;
  std::vector<ColouredGraph> duals;
  if (cls == ModelClass::B) {
    duals = dir == Direction::accept ? dual_accept_B(g) : dual_reject_B(g);
  } else if (cls == ModelClass::Pi) {
    if (!is_permutation_generated(g)) throw std::invalid_argument("graph is not permutation generated");
    duals = brute_force_duals(ExplicitLattice(enumerate_Pi_lattice(g.labels())), {g}, dir);
  } else {
    throw std::invalid_argument("duals are available for --class B or Pi");
  }
  std::sort(duals.begin(), duals.end());
  std::optional<ModelTest> test;
  if (!cfg.data.empty() || !cfg.cov.empty()) test = make_lrt_test(load_data(cfg), cfg.alpha);
  if (em.json()) {
    Json out = Json::array();
    for (const auto& d : duals) out.push_back(test ? fit_summary(d, (*test)(d)) : graph_to_json(d));
    em.emit(out);
  } else {
    std::ostringstream os;
    for (const auto& d : duals) {
      os << to_compact(d);
      if (test) {
        const auto o = (*test)(d);
        os << "  " << (o.accept ? "accept" : "reject");
        if (o.fit) os << " p_value=" << o.fit->p_value << " bic=" << o.fit->bic;
      }
      os << '\n';
    }
    em.emit(os.str());
  }
  return 0;
}

int cmd_search(const RunConfig& cfg, Emitter& em) {
  const ModelClass cls = parse_model_class(cfg.class_name);
  if (cls != ModelClass::B && cls != ModelClass::Pi) throw std::invalid_argument("search needs --class B or Pi");
  const auto data = load_data(cfg);
  SearchOptions opts;
  opts.lattice = cls;
  opts.jobs = cfg.jobs;
  opts.shuffle_seed = cfg.seed;
  const auto trace = eh_search(data.labels, make_lrt_test(data, cfg.alpha), opts);
  if (em.json()) {
    Json stages = Json::array();
    Json sizes = Json::array();
    for (std::size_t s = 0; s < trace.stages.size(); ++s) {
      Json cands = Json::array();
      for (const auto& rec : trace.stages[s].tested) cands.push_back(fit_summary(rec.graph, rec.outcome));
      stages.push_back(Json{{"stage", s}, {"candidates", cands}});
      sizes.push_back(trace.stages[s].tested.size());
    }
    Json finals = Json::array();
    for (const auto& g : trace.min_accepted) finals.push_back(fit_summary(g, *trace.outcome_of(g)));
    em.emit(Json{{"class", to_string(cls)},
                 {"alpha", cfg.alpha},
                 {"stages", stages},
                 {"min_accepted", finals},
                 {"totals",
                  {{"models_tested", trace.models_tested},
                   {"stages", trace.stages.size()},
                   {"stage_sizes", sizes},
                   {"coherent", coherent(trace)},
                   {"flagged", trace.any_flagged}}}});
  } else {
    std::ostringstream os;
    os << "stages:";
    for (const auto& s : trace.stages) os << ' ' << s.tested.size();
    os << "\nmodels tested: " << trace.models_tested << "\nminimally accepted: " << trace.min_accepted.size() << '\n';
    for (const auto& g : trace.min_accepted) {
      os << '\n' << render_text(g);
      if (const auto& f = trace.outcome_of(g)->fit) os << "bic " << f->bic << "  p_value " << f->p_value << '\n';
    }
    em.emit(os.str());
  }
  return trace.any_flagged ? 2 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coloured graphical Gaussian models: lattices, colouring classes, fitting and search"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--output,-o", cfg.output, "Write the report to a file");
  app.add_flag("--normalize", cfg.normalize, "Accept non-canonical graph files");
  app.add_option("--jobs,-j", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* count = app.add_subcommand("count", "Number of coloured graphs on n vertices");
  count->add_option("--n", cfg.n)->required();

  auto* enumerate = app.add_subcommand("enumerate", "List coloured graphs on n vertices");
  enumerate->add_option("--n", cfg.n)->required();
  enumerate->add_option("--class", cfg.class_name);
  enumerate->add_flag("--count-only", cfg.count_only);
  enumerate->add_flag("--override", cfg.override_guard, "Allow more than 5 vertices");

  auto* classify = app.add_subcommand("classify", "Colouring-class membership");
  classify->add_option("graph", cfg.graphs);
  classify->add_option("--n", cfg.n);
  classify->add_flag("--summary", cfg.summary);
  classify->add_flag("--override", cfg.override_guard);

  auto* meet = app.add_subcommand("meet", "Meet of two coloured graphs");
  meet->add_option("graphs", cfg.graphs)->expected(2)->required();
  auto* join = app.add_subcommand("join", "Join of two coloured graphs");
  join->add_option("graphs", cfg.graphs)->expected(2)->required();

  auto* sup = app.add_subcommand("sup", "Least model of a class containing the graph");
  sup->add_option("--class", cfg.class_name)->required();
  sup->add_option("graph", cfg.graphs)->required();

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", cfg.data, "CSV of observations");
    sub->add_option("--cov", cfg.cov, "CSV covariance matrix (divisor n-1)");
    sub->add_option("--n", cfg.sample_size, "Sample size for --cov");
    sub->add_option("--divisor", cfg.divisor)->check(CLI::IsMember({"n", "n-1"}));
    sub->add_option("--alpha", cfg.alpha)->check(CLI::Range(0.0, 1.0));
  };
  auto* fit = app.add_subcommand("fit", "Maximum likelihood fit of an RCON model");
  fit->add_option("graph", cfg.graphs)->required();
  add_data(fit);

  auto* duals = app.add_subcommand("duals", "Acceptance or rejection dual of a model");
  duals->add_option("--class", cfg.class_name)->required();
  duals->add_option("--direction", cfg.direction)->required();
  duals->add_option("graph", cfg.graphs)->required();
  add_data(duals);

  auto* search = app.add_subcommand("search", "Stagewise accept/reject model search");
  search->add_option("--class", cfg.class_name)->required();
  add_data(search);
  search->add_option("--seed", cfg.seed, "Shuffle the evaluation order within stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Emitter em(cfg, out);
  try {
    if (*count) return cmd_count(cfg, em);
    if (*enumerate) return cmd_enumerate(cfg, em);
    if (*classify) return cmd_classify(cfg, em);
    if (*meet) return cmd_lattice(cfg, em, true);
    if (*join) return cmd_lattice(cfg, em, false);
    if (*sup) return cmd_sup(cfg, em);
    if (*fit) return cmd_fit(cfg, em);
    if (*duals) return cmd_duals(cfg, em);
    if (*search) return cmd_search(cfg, em);
  } catch (const MleNonexistence& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace symlat
