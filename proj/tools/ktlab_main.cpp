#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ktlab/applications.hpp"
#include "ktlab/experiment.hpp"

using namespace ktlab;

namespace {

struct GraphOpts {
  std::vector<std::string> families{"erdos-renyi"};
  std::vector<std::size_t> ns{256};
  double p = 0.05;
  double radius = 0.0;
  int rho = 2;
  std::optional<std::string> adversarial;  // empty string: identity IDs
  std::string graph_file;
};

struct RunOpts {
  std::vector<double> deltas{0.25};
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::uint64_t round_cap = 10'000'000;
  bool audit = false;
  double c_sync = 1.0;
  int c_findany = 3;
};

void add_graph_flags(CLI::App* app, GraphOpts& g, bool multi) {
  if (multi) {
    app->add_option("--family", g.families, "graph families")->delimiter(',');
    app->add_option("--n", g.ns, "node counts")->delimiter(',');
  } else {
    app->add_option("--family", g.families, "graph family")->expected(1);
    app->add_option("--n", g.ns, "node count")->expected(1);
  }
  app->add_option("--p", g.p, "Erdos-Renyi edge probability");
  app->add_option("--radius", g.radius, "random-geometric radius (0 picks a default)");
  app->add_option("--rho", g.rho, "knowledge radius, also the bad-example girth parameter");
  app->add_option("--adversarial-ids", g.adversarial,
                  "assign IDs by position (no value) or from a file with one ID per line")
      ->expected(0, 1)
      ->default_str("");
}

void add_run_flags(CLI::App* app, RunOpts& r, bool multi) {
  if (multi) {
    app->add_option("--delta", r.deltas, "delta values")->delimiter(',');
    app->add_option("--seeds", r.seeds, "seeds")->delimiter(',');
  } else {
    app->add_option("--delta", r.deltas, "delta")->expected(1);
  }
  app->add_option("--seed", r.seed, "seed");
  app->add_option("--round-cap", r.round_cap, "abort a run after this many rounds");
  app->add_flag("--audit", r.audit, "enforce the knowledge discipline on every lookup");
  app->add_option("--c-sync", r.c_sync, "merge barrier constant");
  app->add_option("--c-findany", r.c_findany, "sketch copies per level");
}

GraphSpec make_spec(const GraphOpts& o, const std::string& family, std::size_t n, std::uint64_t seed) {
  GraphSpec s;
  s.family = family_from_string(family);
  s.n = n;
  s.p = o.p;
  s.radius = o.radius;
  s.rho = o.rho;
  s.seed = seed;
  if (o.adversarial) {
    if (o.adversarial->empty()) {
      s.id_mode = IdMode::Identity;
    } else {
      std::ifstream in(*o.adversarial);
      if (!in) throw IoError("cannot open ID map " + *o.adversarial);
      s.id_mode = IdMode::Custom;
      for (std::uint32_t id; in >> id;) s.custom_ids.push_back(id);
    }
  }
  return s;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path);
  return read_graph(in);
}

DannerConfig danner_config(const RunOpts& r, const GraphOpts& g, double delta) {
  DannerConfig c;
  c.delta = delta;
  c.rho = g.rho;
  c.seed = r.seed;
  c.round_cap = r.round_cap;
  c.audit = r.audit;
  c.c_sync = r.c_sync;
  c.c_findany = r.c_findany;
  return c;
}

unsigned thread_cap() {
  const char* env = std::getenv("KTLAB_THREADS");
  if (!env || !*env) return 0;
  try {
    const long v = std::stol(env);
    if (v < 1) throw std::invalid_argument("");
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw ParameterError(std::string("KTLAB_THREADS must be a positive integer, got '") + env + "'");
  }
}

// Writes to the file if a path is given, else to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_metrics(std::ostream& os, const Metrics& m) {
  nlohmann::ordered_json j;
  for (const auto& p : m.phases) j["phases"].push_back({{"label", p.label}, {"rounds", p.rounds}, {"messages", p.messages}});
  j["rounds"] = m.rounds();
  j["messages"] = m.messages();
  j["fallback_events"] = m.fallback_events.size();
  os << j.dump(2) << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Distributed danner construction and experiments in a KT-rho CONGEST simulator"};
  app.require_subcommand(1);

  GraphOpts gopts;
  RunOpts ropts;
  std::string out, format = "csv", in;

  auto* gen = app.add_subcommand("gen", "generate a graph file");
  add_graph_flags(gen, gopts, false);
  gen->add_option("--seed", ropts.seed, "seed");
  gen->add_option("--out", out, "output path (default stdout)");

  auto* dan = app.add_subcommand("danner", "build one danner and report its metrics");
  add_graph_flags(dan, gopts, false);
  add_run_flags(dan, ropts, false);
  dan->add_option("--graph", gopts.graph_file, "read the graph from a file instead of generating it");
  dan->add_option("--out", out, "write the danner edge list (u v tag) here");
  dan->add_option("--format", format, "record format")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  add_graph_flags(sweep, gopts, true);
  add_run_flags(sweep, ropts, true);
  sweep->add_option("--out", out, "output path (default stdout)");
  sweep->add_option("--format", format, "record format")->check(CLI::IsMember({"csv", "json"}));

  auto* ver = app.add_subcommand("verify", "check a record stream against the acceptance properties");
  ver->add_option("--in", in, "records to check (default: run the structural sweep)");
  ver->add_option("--format", format, "input format, and report format (json report for json)")
      ->check(CLI::IsMember({"csv", "json"}));
  ver->add_option("--out", out, "report path (default stdout)");

  std::string which = "broadcast", danner_file, weights_file;
  std::uint32_t source = 0;
  auto* apps = app.add_subcommand("apps", "broadcast, spanning tree, leader election or MST over a danner");
  apps->add_option("app", which, "broadcast | st | le | mst")->check(CLI::IsMember({"broadcast", "st", "le", "mst"}));
  apps->add_option("--graph", gopts.graph_file, "graph file")->required();
  apps->add_option("--danner", danner_file, "danner file (u v tag); required except for mst");
  apps->add_option("--source", source, "broadcast source ID (default: smallest)");
  apps->add_option("--weights", weights_file, "mst weights file (u v w)");
  add_run_flags(apps, ropts, false);
  apps->add_option("--rho", gopts.rho, "knowledge radius");
  apps->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      Graph g = generate(make_spec(gopts, gopts.families.at(0), gopts.ns.at(0), ropts.seed));
      Sink s(out);
      write_graph(s.get(), g);
      return 0;
    }
    if (*dan) {
      const GraphSpec spec = make_spec(gopts, gopts.families.at(0), gopts.ns.at(0), ropts.seed);
      const Graph g = gopts.graph_file.empty() ? generate(spec) : load_graph(gopts.graph_file);
      const DannerConfig c = danner_config(ropts, gopts, ropts.deltas.at(0));
      if (!(c.delta >= 0 && c.delta <= 0.5)) throw ParameterError("delta must lie in [0, 1/2]");
      if (!out.empty()) {
        const Danner d = build_danner(g, c);
        Sink s(out);
        write_danner(s.get(), d.state);
      }
      RunRecord r = run_cell(g, spec, c);
      if (!gopts.graph_file.empty()) {
        r.family = "file";
        r.n_requested = g.n();
        r.p = 0;
      }
      write_records(std::cout, {r}, format_from_string(format));
      return r.error.empty() ? 0 : 1;
    }
    if (*sweep) {
      ExperimentConfig cfg;
      for (const auto& f : gopts.families)
        for (std::size_t n : gopts.ns) cfg.graphs.push_back(make_spec(gopts, f, n, 0));
      cfg.deltas = ropts.deltas;
      cfg.rho = gopts.rho;
      cfg.seeds = ropts.seeds.empty() ? std::vector<std::uint64_t>{ropts.seed} : ropts.seeds;
      cfg.round_cap = ropts.round_cap;
      cfg.audit = ropts.audit;
      cfg.c_sync = ropts.c_sync;
      cfg.c_findany = ropts.c_findany;
      cfg.threads = thread_cap();
      cfg.validate();
      const auto records = run_experiment(cfg);
      Sink s(out);
      write_records(s.get(), records, format_from_string(format));
      return 0;
    }
    if (*ver) {
      const Format f = format_from_string(format);
      std::vector<RunRecord> records;
      if (in.empty()) {
        ExperimentConfig cfg;
        for (Family fam : {Family::Path, Family::Cycle, Family::Star, Family::RandomGeometric})
          for (std::size_t n : {64, 256}) {
            GraphSpec s;
            s.family = fam;
            s.n = n;
            cfg.graphs.push_back(s);
          }
        for (double p : {0.02, 0.1})
          for (std::size_t n : {64, 256}) {
            GraphSpec s;
            s.family = Family::ErdosRenyi;
            s.n = n;
            s.p = p;
            cfg.graphs.push_back(s);
          }
        cfg.deltas = {0.0, 0.25, 1.0 / 3.0, 0.4, 0.5};
        cfg.seeds = {1, 2, 3};
        cfg.threads = thread_cap();
        records = run_experiment(cfg);
      } else {
        std::ifstream file(in);
        if (!file) throw IoError("cannot open " + in);
        records = read_records(file, f);
      }
      const VerifyReport rep = verify(records);
      Sink s(out);
      write_report(s.get(), rep, f == Format::Json);
      return rep.pass ? 0 : 1;
    }
    if (*apps) {
      const Graph g = load_graph(gopts.graph_file);
      Sink s(out);
      if (which == "mst") {
        EdgeWeights w;
        if (!weights_file.empty()) {
          std::ifstream wf(weights_file);
          if (!wf) throw IoError("cannot open " + weights_file);
          w = read_weights(wf);
        }
        const MstResult r = mst(g, w, danner_config(ropts, gopts, ropts.deltas.at(0)));
        for (const Edge& e : r.edges) s.get() << e.u.value << ' ' << e.v.value << '\n';
        print_metrics(std::cerr, r.metrics);
        return 0;
      }
      if (danner_file.empty()) throw ParameterError("--danner is required for " + which);
      std::ifstream df(danner_file);
      if (!df) throw IoError("cannot open " + danner_file);
      std::vector<Edge> h;
      for (const auto& [e, p] : read_danner(df)) h.push_back(e);
      RunConfig rc;
      rc.rho = gopts.rho;
      rc.seed = ropts.seed;
      rc.round_cap = ropts.round_cap;
      rc.audit = ropts.audit;
      nlohmann::ordered_json j;
      j["app"] = which;
      if (which == "broadcast") {
        const NodeId src = source ? NodeId(source) : g.id(0);
        const auto r = broadcast(g, h, src, rc);
        j["source"] = src.value;
        j["informed"] = r.informed_count;
        j["rounds"] = r.run.rounds;
        j["messages"] = r.run.messages;
      } else if (which == "st") {
        const auto t = spanning_tree(g, h, rc);
        for (const Edge& e : t.edges) j["edges"].push_back({e.u.value, e.v.value});
        j["rounds"] = t.run.rounds;
        j["messages"] = t.run.messages;
      } else {
        const auto r = global_leader_election(g, h, rc);
        for (std::size_t i = 0; i < g.n(); ++i) j["leaders"][std::to_string(g.id(static_cast<int>(i)).value)] = r.leader[i].value;
        j["rounds"] = r.run.rounds;
        j["messages"] = r.run.messages;
      }
      s.get() << j.dump(2) << '\n';
      return 0;
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
