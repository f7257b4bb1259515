#include "ktlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <charconv>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace ktlab {

void ExperimentConfig::validate() const {
  for (double d : deltas)
    if (!(d >= 0.0 && d <= 0.5)) throw ParameterError("delta " + std::to_string(d) + " outside [0, 0.5]");
  if (rho < 2) throw ParameterError("rho must be at least 2");
  if (!(c_sync > 0.0)) throw ParameterError("c_sync must be positive");
  if (c_findany < 1) throw ParameterError("c_findany must be at least 1");
  if (round_cap == 0) throw ParameterError("round cap must be positive");
  for (const GraphSpec& g : graphs)
    if (g.n == 0) throw ParameterError("graph size must be positive");
}

int component_diameter(const Graph& g) {
  int best = 0;
  for (std::size_t i = 0; i < g.n(); ++i)
    for (int d : bfs_distances(g, static_cast<int>(i)))
      if (d != kUnreachable) best = std::max(best, d);
  return best;
}

StructureReport check_structure(const Graph& g, const DannerState& st) {
  StructureReport r;
  auto labels = [&](const Graph& x) {
    std::vector<int> lab(g.n(), -1);
    int next = 0;
    for (const auto& comp : components(x)) {
      for (NodeId v : comp) lab[static_cast<std::size_t>(g.index(v))] = next;
      ++next;
    }
    return lab;
  };
  std::vector<Edge> h;
  for (const auto& [e, p] : st.H) h.push_back(e);
  r.components_ok = labels(g) == labels(edge_subgraph(g, h));

  std::vector<int> owners(g.n(), 0);
  for (const auto& [id, cl] : st.c2) {
    r.max_c2_diameter = std::max(r.max_c2_diameter, tree_diameter(cl.tree_edges));
    for (NodeId v : cl.members) ++owners[static_cast<std::size_t>(g.index(v))];
  }
  for (NodeId c : st.low_degree) {
    const auto& cl = st.c1.at(c);
    const std::set<NodeId> in(cl.members.begin(), cl.members.end());
    for (NodeId v : cl.members) ++owners[static_cast<std::size_t>(g.index(v))];
    std::set<NodeId> outside;
    for (NodeId v : cl.members)
      for (NodeId x : g.sorted_neighbors(g.index(v)))
        if (!in.count(x)) outside.insert(x);
    for (NodeId x : outside) {
      bool hit = false;
      for (NodeId y : g.sorted_neighbors(g.index(x)))
        if (in.count(y) && st.H.count(Edge(x, y))) hit = true;
      r.lowdeg_violations += !hit;
    }
  }
  for (NodeId v : st.inactive) ++owners[static_cast<std::size_t>(g.index(v))];
  r.partition_violations = static_cast<std::size_t>(std::count_if(owners.begin(), owners.end(), [](int k) { return k != 1; }));
  r.intra_merge_edges = st.merge.intra_component_additions;
  return r;
}

namespace {

double log_factor(std::size_t n) { return std::max(1.0, std::log(static_cast<double>(n))); }

}  // namespace

RunRecord run_cell(const Graph& g, const GraphSpec& spec, const DannerConfig& cfg) {
  RunRecord r;
  r.family = to_string(spec.family);
  r.n_requested = spec.n;
  r.p = spec.p;
  r.delta = cfg.delta;
  r.rho = cfg.rho;
  r.seed = cfg.seed;
  r.n = g.n();
  r.m = g.m();
  try {
    r.diameter = component_diameter(g);
    const Danner d = build_danner(g, cfg);
    const DannerState& st = d.state;
    r.phase1_rounds = st.metrics.rounds("phase1");
    r.phase1_messages = st.metrics.messages("phase1");
    r.phase2_rounds = st.metrics.rounds("phase2");
    r.phase2_messages = st.metrics.messages("phase2");
    r.merge_rounds = st.metrics.rounds("merge");
    r.merge_messages = st.metrics.messages("merge");
    r.merge_eager_rounds = st.merge.eager_rounds;
    r.rounds = st.metrics.rounds();
    r.messages = st.metrics.messages();
    r.h_edges = st.H.size();
    r.h_diameter = component_diameter(d.subgraph(g));
    r.c2_clusters = st.c2.size();
    r.high_degree = st.high_degree.size();
    r.low_degree = st.low_degree.size();
    r.inactive = st.inactive.size();
    r.max_m1 = st.max_m1();
    for (NodeId v : st.inactive) r.max_dump_degree = std::max(r.max_dump_degree, g.degree(g.index(v)));
    r.fallbacks = st.metrics.fallback_events.size();
    r.phase2_fallbacks = static_cast<std::size_t>(std::count_if(
        st.metrics.fallback_events.begin(), st.metrics.fallback_events.end(),
        [](const FallbackEvent& e) { return e.phase == "phase2"; }));
    r.merge_iterations = st.merge.iterations;
    const StructureReport s = check_structure(g, st);
    r.components_ok = s.components_ok;
    r.max_c2_diameter = s.max_c2_diameter;
    r.lowdeg_violations = s.lowdeg_violations;
    r.intra_merge_edges = s.intra_merge_edges;
    r.partition_violations = s.partition_violations;

    const double n = static_cast<double>(r.n);
    const double l2 = log_factor(r.n) * log_factor(r.n);
    const double n1d = std::pow(n, 1.0 + cfg.delta);
    const double cap = std::min(static_cast<double>(r.m), n1d);
    r.ratio_edges = cap > 0 ? static_cast<double>(r.h_edges) / cap : 0.0;
    r.ratio_messages = static_cast<double>(r.messages) / (n1d * l2);
    r.ratio_rounds = static_cast<double>(r.rounds) / (std::pow(n, 1.0 - 2.0 * cfg.delta) * l2 + r.diameter);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    const GraphSpec* spec;
    double delta;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const GraphSpec& g : cfg.graphs)
    for (double d : cfg.deltas)
      for (std::uint64_t s : cfg.seeds) cells.push_back({&g, d, s});
  std::vector<RunRecord> out(cells.size());

  auto work = [&](std::size_t k) {
    const Cell& c = cells[k];
    GraphSpec spec = *c.spec;
    spec.seed = c.seed;
    DannerConfig dc;
    dc.delta = c.delta;
    dc.rho = cfg.rho;
    dc.seed = c.seed;
    dc.round_cap = cfg.round_cap;
    dc.audit = cfg.audit;
    dc.c_sync = cfg.c_sync;
    dc.c_findany = cfg.c_findany;
    try {
      out[k] = run_cell(generate(spec), spec, dc);
    } catch (const std::exception& e) {
      RunRecord r;
      r.family = to_string(spec.family);
      r.n_requested = spec.n;
      r.p = spec.p;
      r.delta = c.delta;
      r.rho = cfg.rho;
      r.seed = c.seed;
      r.error = e.what();
      out[k] = r;
    }
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, cells.size())));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) work(k);
  };
  if (threads <= 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(loop);
  }
  return out;
}

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ParameterError("unknown format '" + s + "' (expected csv or json)");
}

namespace {

enum class Kind : std::uint8_t { Text, Unsigned, Signed, Real, Flag };

struct Field {
  const char* name;
  Kind kind;
  std::function<std::string(const RunRecord&)> get;
  std::function<void(RunRecord&, const std::string&)> set;
};

std::string real_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class T>
T parse_number(const std::string& s, const char* field) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw SchemaError(std::string("bad value '") + s + "' for " + field);
  return v;
}

double parse_real(const std::string& s, const char* field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw SchemaError(std::string("bad value '") + s + "' for " + field);
  return v;
}

template <class T>
Field unsigned_field(const char* name, T RunRecord::*member) {
  return {name, Kind::Unsigned, [member](const RunRecord& r) { return std::to_string(r.*member); },
          [member, name](RunRecord& r, const std::string& s) { r.*member = parse_number<T>(s, name); }};
}

Field int_field(const char* name, int RunRecord::*member) {
  return {name, Kind::Signed, [member](const RunRecord& r) { return std::to_string(r.*member); },
          [member, name](RunRecord& r, const std::string& s) { r.*member = parse_number<int>(s, name); }};
}

Field real_field(const char* name, double RunRecord::*member) {
  return {name, Kind::Real, [member](const RunRecord& r) { return real_text(r.*member); },
          [member, name](RunRecord& r, const std::string& s) { r.*member = parse_real(s, name); }};
}

Field text_field(const char* name, std::string RunRecord::*member) {
  return {name, Kind::Text, [member](const RunRecord& r) { return r.*member; },
          [member](RunRecord& r, const std::string& s) { r.*member = s; }};
}

Field flag_field(const char* name, bool RunRecord::*member) {
  return {name, Kind::Flag, [member](const RunRecord& r) { return std::string(r.*member ? "true" : "false"); },
          [member, name](RunRecord& r, const std::string& s) {
            if (s != "true" && s != "false") throw SchemaError(std::string("bad flag '") + s + "' for " + name);
            r.*member = s == "true";
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      text_field("family", &RunRecord::family),
      unsigned_field("n_requested", &RunRecord::n_requested),
      real_field("p", &RunRecord::p),
      real_field("delta", &RunRecord::delta),
      int_field("rho", &RunRecord::rho),
      unsigned_field("seed", &RunRecord::seed),
      unsigned_field("n", &RunRecord::n),
      unsigned_field("m", &RunRecord::m),
      int_field("diameter", &RunRecord::diameter),
      unsigned_field("phase1_rounds", &RunRecord::phase1_rounds),
      unsigned_field("phase1_messages", &RunRecord::phase1_messages),
      unsigned_field("phase2_rounds", &RunRecord::phase2_rounds),
      unsigned_field("phase2_messages", &RunRecord::phase2_messages),
      unsigned_field("merge_rounds", &RunRecord::merge_rounds),
      unsigned_field("merge_messages", &RunRecord::merge_messages),
      unsigned_field("merge_eager_rounds", &RunRecord::merge_eager_rounds),
      unsigned_field("rounds", &RunRecord::rounds),
      unsigned_field("messages", &RunRecord::messages),
      unsigned_field("h_edges", &RunRecord::h_edges),
      int_field("h_diameter", &RunRecord::h_diameter),
      unsigned_field("c2_clusters", &RunRecord::c2_clusters),
      unsigned_field("high_degree", &RunRecord::high_degree),
      unsigned_field("low_degree", &RunRecord::low_degree),
      unsigned_field("inactive", &RunRecord::inactive),
      unsigned_field("max_m1", &RunRecord::max_m1),
      unsigned_field("max_dump_degree", &RunRecord::max_dump_degree),
      unsigned_field("fallbacks", &RunRecord::fallbacks),
      unsigned_field("phase2_fallbacks", &RunRecord::phase2_fallbacks),
      int_field("merge_iterations", &RunRecord::merge_iterations),
      flag_field("components_ok", &RunRecord::components_ok),
      int_field("max_c2_diameter", &RunRecord::max_c2_diameter),
      unsigned_field("lowdeg_violations", &RunRecord::lowdeg_violations),
      unsigned_field("intra_merge_edges", &RunRecord::intra_merge_edges),
      unsigned_field("partition_violations", &RunRecord::partition_violations),
      real_field("ratio_edges", &RunRecord::ratio_edges),
      real_field("ratio_messages", &RunRecord::ratio_messages),
      real_field("ratio_rounds", &RunRecord::ratio_rounds),
      text_field("error", &RunRecord::error),
  };
  return f;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw SchemaError("unterminated quote in CSV row");
  return out;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  for (const Field& f : fields()) {
    const std::string v = f.get(r);
    switch (f.kind) {
      case Kind::Text: j[f.name] = v; break;
      case Kind::Unsigned: j[f.name] = parse_number<std::uint64_t>(v, f.name); break;
      case Kind::Signed: j[f.name] = parse_number<std::int64_t>(v, f.name); break;
      case Kind::Real: j[f.name] = parse_real(v, f.name); break;
      case Kind::Flag: j[f.name] = v == "true"; break;
    }
  }
  return j;
}

RunRecord from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("record is not a JSON object");
  if (j.size() != fields().size()) throw SchemaError("record has " + std::to_string(j.size()) + " fields");
  RunRecord r;
  for (const Field& f : fields()) {
    auto it = j.find(f.name);
    if (it == j.end()) throw SchemaError(std::string("missing field ") + f.name);
    const auto& v = *it;
    bool ok = false;
    std::string text;
    switch (f.kind) {
      case Kind::Text: ok = v.is_string(); if (ok) text = v.get<std::string>(); break;
      case Kind::Unsigned: ok = v.is_number_unsigned(); if (ok) text = std::to_string(v.get<std::uint64_t>()); break;
      case Kind::Signed: ok = v.is_number_integer(); if (ok) text = std::to_string(v.get<std::int64_t>()); break;
      case Kind::Real: ok = v.is_number(); if (ok) text = real_text(v.get<double>()); break;
      case Kind::Flag: ok = v.is_boolean(); if (ok) text = v.get<bool>() ? "true" : "false"; break;
    }
    if (!ok) throw SchemaError(std::string("wrong type for field ") + f.name);
    f.set(r, text);
  }
  return r;
}

}  // namespace

void write_records(std::ostream& os, const std::vector<RunRecord>& records, Format f) {
  if (f == Format::Csv) {
    const auto& fs = fields();
    for (std::size_t i = 0; i < fs.size(); ++i) os << (i ? "," : "") << fs[i].name;
    os << '\n';
    for (const RunRecord& r : records) {
      for (std::size_t i = 0; i < fs.size(); ++i) os << (i ? "," : "") << csv_quote(fs[i].get(r));
      os << '\n';
    }
    return;
  }
  for (const RunRecord& r : records) os << to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_records(std::istream& is, Format f) {
  std::vector<RunRecord> out;
  std::string line;
  if (f == Format::Csv) {
    const auto& fs = fields();
    if (!std::getline(is, line)) return out;
    const auto header = csv_split(line);
    if (header.size() != fs.size()) throw SchemaError("CSV header has " + std::to_string(header.size()) + " columns");
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (header[i] != fs[i].name) throw SchemaError("unexpected CSV column '" + header[i] + "'");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto cols = csv_split(line);
      if (cols.size() != fs.size()) throw SchemaError("CSV row has " + std::to_string(cols.size()) + " columns");
      RunRecord r;
      for (std::size_t i = 0; i < fs.size(); ++i) fs[i].set(r, cols[i]);
      out.push_back(std::move(r));
    }
    return out;
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("malformed JSON record: ") + e.what());
    }
    out.push_back(from_json(j));
  }
  return out;
}

namespace {

std::string cell_name(const RunRecord& r) {
  return r.family + " n=" + std::to_string(r.n_requested) + " delta=" + real_text(r.delta) +
         " seed=" + std::to_string(r.seed);
}

}  // namespace

VerifyReport verify(const std::vector<RunRecord>& records) {
  VerifyReport rep;
  rep.records = records.size();
  auto fail = [&](const RunRecord& r, const std::string& what) {
    rep.pass = false;
    rep.failures.push_back(cell_name(r) + ": " + what);
  };
  if (records.empty()) rep.warnings.push_back("no records; vacuous pass");

  std::size_t whp_total = 0, m1_ok = 0, dump_ok = 0, high = 0, high_fb = 0;
  for (const RunRecord& r : records) {
    if (!r.error.empty()) {
      fail(r, "run failed: " + r.error);
      continue;
    }
    if (!r.components_ok) fail(r, "H components differ from G components");
    if (r.max_c2_diameter > 6) fail(r, "C2 cluster diameter " + std::to_string(r.max_c2_diameter) + " > 6");
    if (r.lowdeg_violations) fail(r, std::to_string(r.lowdeg_violations) + " low-degree neighbors without an H-edge");
    if (r.intra_merge_edges) fail(r, std::to_string(r.intra_merge_edges) + " merge edges inside one component");
    if (r.partition_violations) fail(r, std::to_string(r.partition_violations) + " nodes outside the cluster partition");
    if (r.max_m1 > rank_threshold(r.n, r.delta)) fail(r, "max |M1| above ceil(n^{2 delta})");
    for (double x : {r.ratio_edges, r.ratio_messages, r.ratio_rounds})
      if (!std::isfinite(x)) fail(r, "non-finite ratio");
    const double soft = 3.0 * std::pow(static_cast<double>(r.n), r.delta) * std::log(std::max<double>(2, static_cast<double>(r.n)));
    ++whp_total;
    m1_ok += static_cast<double>(r.max_m1) <= soft;
    dump_ok += static_cast<double>(r.max_dump_degree) <= soft;
    if (r.n >= 512) {
      high += r.high_degree + r.phase2_fallbacks;
      high_fb += r.phase2_fallbacks;
    }
  }
  if (whp_total) {
    if (static_cast<double>(m1_ok) < 0.95 * static_cast<double>(whp_total)) {
      rep.pass = false;
      rep.failures.push_back("max |M1| <= 3 n^delta ln n on fewer than 95% of runs");
    }
    if (static_cast<double>(dump_ok) < 0.95 * static_cast<double>(whp_total)) {
      rep.pass = false;
      rep.failures.push_back("dumped-node degree <= 3 n^delta ln n on fewer than 95% of runs");
    }
  }
  if (high && static_cast<double>(high_fb) > 0.05 * static_cast<double>(high)) {
    rep.pass = false;
    rep.failures.push_back("phase-2 fallbacks exceed 5% of high-degree clusters at n >= 512");
  }

  // Scaling on dense Erdos-Renyi cells.
  struct Acc {
    double e = 0, msg = 0, rnd = 0;
    int k = 0;
  };
  std::map<double, std::map<std::size_t, Acc>> by;
  for (const RunRecord& r : records) {
    if (!r.error.empty() || r.family != to_string(Family::ErdosRenyi)) continue;
    if (static_cast<double>(r.m) < std::pow(static_cast<double>(r.n_requested), 1.4)) continue;
    Acc& a = by[r.delta][r.n_requested];
    a.e += r.ratio_edges;
    a.msg += r.ratio_messages;
    a.rnd += r.ratio_rounds;
    ++a.k;
  }
  for (const auto& [delta, per_n] : by) {
    if (per_n.size() < 2) continue;
    const Acc& lo = per_n.begin()->second;
    const Acc& hi = per_n.rbegin()->second;
    const std::pair<const char*, std::pair<double, double>> ratios[] = {
        {"edges", {lo.e / lo.k, hi.e / hi.k}},
        {"messages", {lo.msg / lo.k, hi.msg / hi.k}},
        {"rounds", {lo.rnd / lo.k, hi.rnd / hi.k}}};
    for (const auto& [name, v] : ratios) {
      if (v.second > 1.5 * v.first) {
        rep.pass = false;
        rep.failures.push_back(std::string("scaling: ") + name + " ratio at delta=" + real_text(delta) + " grows from " +
                               real_text(v.first) + " (n=" + std::to_string(per_n.begin()->first) + ") to " +
                               real_text(v.second) + " (n=" + std::to_string(per_n.rbegin()->first) + ")");
      }
    }
  }
  return rep;
}

void write_report(std::ostream& os, const VerifyReport& r, bool json) {
  if (json) {
    nlohmann::ordered_json j;
    j["pass"] = r.pass;
    j["records"] = r.records;
    j["failures"] = r.failures;
    j["warnings"] = r.warnings;
    os << j.dump(2) << '\n';
    return;
  }
  os << (r.pass ? "PASS" : "FAIL") << ": " << r.records << " records, " << r.failures.size() << " failures\n";
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  for (const auto& f : r.failures) os << "failure: " << f << '\n';
}

}  // namespace ktlab
