#include "tzliq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tzliq/version.hpp"

namespace tzliq {

namespace {

using nlohmann::json;

void header(std::ofstream& out, const Provenance& prov) { out << provenance_lines(prov); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.precision(17);
  return out;
}

json prov_json(const Provenance& prov) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(prov.config_hash));
  return json{{"tool", std::string(kToolName) + " " + kToolVersion},
              {"config_hash", buf},
              {"seed", prov.seed}};
}

double num_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json nan_safe(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

}  // namespace

std::string provenance_lines(const Provenance& prov) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# %s %s\n# config_hash=%016llx seed=%llu\n", kToolName,
                kToolVersion, static_cast<unsigned long long>(prov.config_hash),
                static_cast<unsigned long long>(prov.seed));
  return buf;
}

void write_surface_csv(const std::string& path, const ValueSurface& s, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,y,u\n";
  for (std::size_t k = 0; k < s.n_time_nodes(); ++k)
    for (std::size_t j = 0; j < s.grid.n_space; ++j)
      out << s.grid.t_grid[k] << ',' << s.grid.y(j) << ',' << s.at(k, j) << '\n';
}

namespace {
constexpr char kSurfaceMagic[8] = {'T', 'Z', 'S', 'U', 'R', 'F', '0', '1'};
}

void write_surface_bin(const std::string& path, const ValueSurface& s, const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(kSurfaceMagic, sizeof kSurfaceMagic);
  const std::uint64_t vals[3] = {prov.config_hash, prov.seed,
                                 static_cast<std::uint64_t>(s.grid.n_space)};
  put(vals, sizeof vals);
  const std::uint64_t ntimes = s.grid.t_grid.size();
  put(&ntimes, sizeof ntimes);
  put(&s.grid.y_min, sizeof(double));
  put(&s.grid.y_max, sizeof(double));
  put(&s.truncation_level, sizeof(double));
  const std::uint8_t flags[2] = {static_cast<std::uint8_t>(s.ladder_limit ? 1 : 0),
                                 static_cast<std::uint8_t>(s.boundary == NeumannOrder::second
                                                               ? 2
                                                               : 1)};
  put(flags, sizeof flags);
  put(s.grid.t_grid.data(), ntimes * sizeof(double));
  put(s.values.data(), s.values.size() * sizeof(double));
}

ValueSurface read_surface_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open surface cache: " + path);
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated surface cache: " + path);
  };
  char magic[8];
  get(magic, sizeof magic);
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kSurfaceMagic)))
    throw std::runtime_error("not a surface cache (bad magic/version): " + path);
  std::uint64_t vals[3];
  get(vals, sizeof vals);
  std::uint64_t ntimes = 0;
  get(&ntimes, sizeof ntimes);
  ValueSurface s;
  s.grid.n_space = static_cast<std::size_t>(vals[2]);
  get(&s.grid.y_min, sizeof(double));
  get(&s.grid.y_max, sizeof(double));
  get(&s.truncation_level, sizeof(double));
  std::uint8_t flags[2];
  get(flags, sizeof flags);
  s.ladder_limit = flags[0] != 0;
  s.boundary = flags[1] == 2 ? NeumannOrder::second : NeumannOrder::first;
  s.grid.t_grid.resize(ntimes);
  get(s.grid.t_grid.data(), ntimes * sizeof(double));
  s.values.resize(ntimes * s.grid.n_space);
  get(s.values.data(), s.values.size() * sizeof(double));
  s.grid.check();
  return s;
}

void write_envelopes_csv(const std::string& path, const EnvelopePair& env,
                         const std::vector<double>& t_nodes, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,lower,upper\n";
  for (double t : t_nodes) out << t << ',' << env.lower(t) << ',' << env.upper(t) << '\n';
}

void write_path_csv(const std::string& path, const ReflectedPath& p, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,y,dL\n";
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    const double dl = k == 0 ? 0.0 : p.local_time[k - 1];
    out << p.times[k] << ',' << p.y[k] << ',' << dl << '\n';
  }
}

void write_path_events_csv(const std::string& path, const ReflectedPath& p,
                           const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,mark\n";
  for (const auto& e : p.events) out << e.t << ',' << e.mark << '\n';
}

void write_run_csv(const std::string& path, const LiquidationRun& run, const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,y,x,xi,cost_impact,cost_risk,cost_slippage\n";
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    out << run.times[k] << ',' << run.y[k] << ',' << run.x[k] << ',' << run.xi[k] << ','
        << run.cost_impact[k] << ',' << run.cost_risk[k] << ',' << run.cost_slippage[k] << '\n';
  }
}

void write_run_events_csv(const std::string& path, const LiquidationRun& run,
                          const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "t,mark,rho\n";
  for (const auto& e : run.executions) out << e.t << ',' << e.mark << ',' << e.rho << '\n';
}

namespace {

json suite_to_json(const SuiteResult& r) {
  return json{{"fixture", r.fixture},         {"suite", r.suite},
              {"statistic_name", r.statistic_name}, {"statistic", r.statistic},
              {"tolerance", r.tolerance},     {"verdict", r.verdict}};
}

SuiteResult suite_from_json(const json& j) {
  SuiteResult r;
  r.fixture = j.at("fixture").get<std::string>();
  r.suite = j.at("suite").get<std::string>();
  r.statistic_name = j.at("statistic_name").get<std::string>();
  r.statistic = j.at("statistic").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.verdict = j.at("verdict").get<std::string>();
  return r;
}

}  // namespace

std::string property_report_to_json(const PropertyReport& rep, const Provenance& prov) {
  json j;
  j["schema_version"] = 1;
  j["provenance"] = prov_json(prov);
  j["results"] = json::array();
  for (const auto& r : rep.results) j["results"].push_back(suite_to_json(r));
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

PropertyReport property_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("unsupported report schema version");
  PropertyReport rep;
  for (const auto& r : j.at("results")) rep.results.push_back(suite_from_json(r));
  return rep;
}

namespace {

json cost_to_json(const CostReport& r) {
  return json{{"strategy", r.strategy},
              {"n_paths", r.n_paths},
              {"mean_total", r.mean_total},
              {"mean_impact", r.mean_impact},
              {"mean_risk", r.mean_risk},
              {"mean_slippage", r.mean_slippage},
              {"mean_terminal", r.mean_terminal},
              {"stderr_total", r.stderr_total},
              {"reference", nan_safe(r.reference)},
              {"allowance", r.allowance},
              {"diff", r.diff},
              {"z", r.z},
              {"pass", r.pass}};
}

CostReport cost_from_json(const json& j) {
  CostReport r;
  r.strategy = j.at("strategy").get<std::string>();
  r.n_paths = j.at("n_paths").get<std::size_t>();
  r.mean_total = j.at("mean_total").get<double>();
  r.mean_impact = j.at("mean_impact").get<double>();
  r.mean_risk = j.at("mean_risk").get<double>();
  r.mean_slippage = j.at("mean_slippage").get<double>();
  r.mean_terminal = j.at("mean_terminal").get<double>();
  r.stderr_total = j.at("stderr_total").get<double>();
  r.reference = num_or_nan(j.at("reference"));
  r.allowance = j.at("allowance").get<double>();
  r.diff = j.at("diff").get<double>();
  r.z = j.at("z").get<double>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

}  // namespace

std::string cost_report_to_json(const CostReport& rep) {
  json j = cost_to_json(rep);
  j["schema_version"] = 1;
  return j.dump(2);
}

CostReport cost_report_from_json(const std::string& text) {
  return cost_from_json(json::parse(text));
}

std::string fk_report_to_json(const FkReport& rep) {
  json j;
  j["schema_version"] = 1;
  j["tau"] = rep.tau;
  j["allowance"] = rep.allowance;
  j["all_pass"] = rep.all_pass;
  j["rows"] = json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back(json{{"t", r.t},
                             {"y", r.y},
                             {"left", r.left},
                             {"right_mean", r.right_mean},
                             {"stderr_right", r.stderr_right},
                             {"z", r.z},
                             {"local_time_term", r.local_time_term},
                             {"pass", r.pass}});
  }
  return j.dump(2);
}

FkReport fk_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  FkReport rep;
  rep.tau = j.at("tau").get<double>();
  rep.allowance = j.at("allowance").get<double>();
  rep.all_pass = j.at("all_pass").get<bool>();
  for (const auto& r : j.at("rows")) {
    FkReport::Row row;
    row.t = r.at("t").get<double>();
    row.y = r.at("y").get<double>();
    row.left = r.at("left").get<double>();
    row.right_mean = r.at("right_mean").get<double>();
    row.stderr_right = r.at("stderr_right").get<double>();
    row.z = r.at("z").get<double>();
    row.local_time_term = r.at("local_time_term").get<double>();
    row.pass = r.at("pass").get<bool>();
    rep.rows.push_back(row);
  }
  return rep;
}

std::string dominance_report_to_json(const DominanceReport& rep) {
  json j;
  j["schema_version"] = 1;
  j["optimal_dominates"] = rep.optimal_dominates;
  j["reports"] = json::array();
  for (const auto& r : rep.reports) j["reports"].push_back(cost_to_json(r));
  j["pairs"] = json::array();
  for (const auto& p : rep.pairs) {
    j["pairs"].push_back(json{{"a", p.a},
                              {"b", p.b},
                              {"mean_diff", p.mean_diff},
                              {"stderr_diff", p.stderr_diff},
                              {"z", p.z}});
  }
  return j.dump(2);
}

DominanceReport dominance_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  DominanceReport rep;
  rep.optimal_dominates = j.at("optimal_dominates").get<bool>();
  for (const auto& r : j.at("reports")) rep.reports.push_back(cost_from_json(r));
  for (const auto& p : j.at("pairs")) {
    DominanceReport::Pair pr;
    pr.a = p.at("a").get<std::string>();
    pr.b = p.at("b").get<std::string>();
    pr.mean_diff = p.at("mean_diff").get<double>();
    pr.stderr_diff = p.at("stderr_diff").get<double>();
    pr.z = p.at("z").get<double>();
    rep.pairs.push_back(pr);
  }
  return rep;
}

void write_suite_summary_csv(const std::string& path, const PropertyReport& rep,
                             const Provenance& prov) {
  auto out = open_out(path);
  header(out, prov);
  out << "fixture,suite,statistic_name,statistic,tolerance,verdict\n";
  for (const auto& r : rep.results) {
    out << r.fixture << ',' << r.suite << ',' << r.statistic_name << ',' << r.statistic << ','
        << r.tolerance << ',' << r.verdict << '\n';
  }
}

}  // namespace tzliq
