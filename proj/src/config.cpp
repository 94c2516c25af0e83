#include "tzliq/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tzliq {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  if (t == "inf" || t == "+inf" || t == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double x = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for key '" + key + "': " + v);
  }
}

std::size_t parse_size(const std::string& v, const std::string& key) {
  const double x = parse_double(v, key);
  if (x < 0 || x != std::floor(x)) throw ConfigError("key '" + key + "' needs a whole number");
  return static_cast<std::size_t>(x);
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Section = std::map<std::string, std::string>;

}  // namespace

Coefficient CoeffSpec::build(double a, double Lambda) const {
  if (family == "constant") {
    if (params.size() != 1) throw ConfigError("constant family needs one parameter");
    return Coefficient::constant(params[0]);
  }
  if (family == "affine") {
    if (params.size() != 2) throw ConfigError("affine family needs two parameters");
    return Coefficient::affine_y(params[0], params[1], a, -Lambda, Lambda);
  }
  if (family == "sinusoidal") {
    if (params.size() != 3) throw ConfigError("sinusoidal family needs three parameters");
    return Coefficient::sinusoidal_t(params[0], params[1], params[2]);
  }
  throw ConfigError("unknown coefficient family '" + family + "'");
}

std::string CoeffSpec::to_string() const {
  std::string s = family;
  for (double p : params) s += " " + fmt(p);
  return s;
}

CoeffSpec CoeffSpec::parse(const std::string& text, const std::string& key) {
  std::istringstream in(trim(text));
  CoeffSpec spec;
  if (!(in >> spec.family)) throw ConfigError("empty coefficient for key '" + key + "'");
  // bare numbers are shorthand for the constant family
  if (spec.family != "constant" && spec.family != "affine" && spec.family != "sinusoidal") {
    spec.params = {parse_double(trim(text), key)};
    spec.family = "constant";
    return spec;
  }
  spec.params.clear();
  std::string tok;
  while (in >> tok) spec.params.push_back(parse_double(tok, key));
  spec.build(0.0, 1.0);  // shape check
  return spec;
}

namespace {

RunConfig from_sections(std::map<std::string, Section> sections) {
  for (const char* required : {"model", "grid"}) {
    if (!sections.count(required))
      throw ConfigError(std::string("missing required section [") + required + "]");
  }

  RunConfig c;
  auto take = [&](const char* sec, const char* key) -> std::optional<std::string> {
    auto si = sections.find(sec);
    if (si == sections.end()) return std::nullopt;
    auto ki = si->second.find(key);
    if (ki == si->second.end()) return std::nullopt;
    std::string v = ki->second;
    si->second.erase(ki);
    return v;
  };
  auto num = [&](const char* sec, const char* key, double& slot) {
    if (auto v = take(sec, key)) slot = parse_double(*v, key);
  };
  auto size = [&](const char* sec, const char* key, std::size_t& slot) {
    if (auto v = take(sec, key)) slot = parse_size(*v, key);
  };
  auto coeff = [&](const char* key, CoeffSpec& slot) {
    if (auto v = take("model", key)) slot = CoeffSpec::parse(*v, key);
  };

  num("model", "q", c.q);
  num("model", "horizon", c.horizon);
  num("model", "barrier", c.barrier);
  num("model", "bound_lambda", c.bound_lambda);
  num("model", "kappa", c.kappa);
  num("model", "kappa0", c.kappa0);
  coeff("beta", c.beta);
  coeff("sigma", c.sigma);
  coeff("sigma_bar", c.sigma_bar);
  coeff("eta", c.eta);
  coeff("lam", c.lam);
  coeff("gamma", c.gamma);
  if (auto v = take("model", "marks")) {
    c.marks.clear();
    for (const std::string& item : split(*v, ',')) {
      if (item.empty()) continue;
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError("marks entries must be z:weight pairs");
      c.marks.push_back({parse_double(parts[0], "marks"), parse_double(parts[1], "marks")});
    }
  }

  num("grid", "y_max", c.y_max);
  size("grid", "n_space", c.n_space);
  size("grid", "n_time", c.n_time);
  size("grid", "n_refine", c.n_refine);
  num("grid", "refine_ratio", c.refine_ratio);

  if (auto v = take("ladder", "m_schedule")) {
    c.m_schedule.clear();
    for (const std::string& item : split(*v, ','))
      if (!item.empty()) c.m_schedule.push_back(parse_double(item, "m_schedule"));
  }
  num("ladder", "t_cut", c.t_cut);
  num("ladder", "eps_ladder", c.eps_ladder);
  num("ladder", "eps_domain", c.eps_domain);
  if (auto v = take("ladder", "tau_mono")) c.tau_mono = parse_double(*v, "tau_mono");
  if (auto v = take("ladder", "tau_env")) c.tau_env = parse_double(*v, "tau_env");

  size("mc", "n_paths", c.n_paths);
  num("mc", "dt", c.dt);
  if (auto v = take("mc", "seed")) {
    try {
      c.seed = static_cast<std::uint64_t>(std::stoull(trim(*v)));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value for key 'seed': " + *v);
    }
  }
  num("mc", "x0", c.x0);
  num("mc", "y0", c.y0);

  if (auto v = take("simulate", "strategy")) c.strategy = trim(*v);
  size("simulate", "dump_paths", c.dump_paths);

  if (auto v = take("verify", "fixtures")) {
    c.fixtures.clear();
    for (const std::string& item : split(*v, ','))
      if (!item.empty()) c.fixtures.push_back(item);
  }

  if (auto v = take("output", "dir")) c.out_dir = trim(*v);
  if (auto v = take("output", "formats")) {
    c.formats.clear();
    for (const std::string& item : split(*v, ','))
      if (!item.empty()) c.formats.push_back(item);
  }

  for (const auto& [sec, keys] : sections) {
    static const char* known[] = {"model", "grid", "ladder", "mc", "simulate", "verify",
                                  "output"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return sec == k; }) == std::end(known))
      throw ConfigError("unknown section [" + sec + "]");
    if (!keys.empty())
      throw ConfigError("unknown key '" + keys.begin()->first + "' in section [" + sec + "]");
  }
  return c;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::map<std::string, Section> sections;
  std::string line, current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      current = trim(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    if (current.empty())
      throw ConfigError("key outside any section at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    sections[current][key] = trim(line.substr(eq + 1));
  }
  return from_sections(std::move(sections));
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[model]\n";
  os << "q = " << fmt(c.q) << "\n";
  os << "horizon = " << fmt(c.horizon) << "\n";
  os << "barrier = " << fmt(c.barrier) << "\n";
  os << "bound_lambda = " << fmt(c.bound_lambda) << "\n";
  os << "kappa = " << fmt(c.kappa) << "\n";
  os << "kappa0 = " << fmt(c.kappa0) << "\n";
  os << "beta = " << c.beta.to_string() << "\n";
  os << "sigma = " << c.sigma.to_string() << "\n";
  os << "sigma_bar = " << c.sigma_bar.to_string() << "\n";
  os << "eta = " << c.eta.to_string() << "\n";
  os << "lam = " << c.lam.to_string() << "\n";
  os << "gamma = " << c.gamma.to_string() << "\n";
  os << "marks = ";
  for (std::size_t i = 0; i < c.marks.size(); ++i) {
    if (i) os << ", ";
    os << fmt(c.marks[i].z) << ":" << fmt(c.marks[i].weight);
  }
  os << "\n\n[grid]\n";
  os << "y_max = " << fmt(c.y_max) << "\n";
  os << "n_space = " << c.n_space << "\n";
  os << "n_time = " << c.n_time << "\n";
  os << "n_refine = " << c.n_refine << "\n";
  os << "refine_ratio = " << fmt(c.refine_ratio) << "\n";
  os << "\n[ladder]\n";
  os << "m_schedule = ";
  for (std::size_t i = 0; i < c.m_schedule.size(); ++i) {
    if (i) os << ", ";
    os << fmt(c.m_schedule[i]);
  }
  os << "\n";
  os << "t_cut = " << fmt(c.t_cut) << "\n";
  os << "eps_ladder = " << fmt(c.eps_ladder) << "\n";
  os << "eps_domain = " << fmt(c.eps_domain) << "\n";
  if (c.tau_mono) os << "tau_mono = " << fmt(*c.tau_mono) << "\n";
  if (c.tau_env) os << "tau_env = " << fmt(*c.tau_env) << "\n";
  os << "\n[mc]\n";
  os << "n_paths = " << c.n_paths << "\n";
  os << "dt = " << fmt(c.dt) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "x0 = " << fmt(c.x0) << "\n";
  os << "y0 = " << fmt(c.y0) << "\n";
  os << "\n[simulate]\n";
  os << "strategy = " << c.strategy << "\n";
  os << "dump_paths = " << c.dump_paths << "\n";
  os << "\n[verify]\n";
  os << "fixtures = ";
  for (std::size_t i = 0; i < c.fixtures.size(); ++i) {
    if (i) os << ", ";
    os << c.fixtures[i];
  }
  os << "\n";
  os << "\n[output]\n";
  os << "dir = " << c.out_dir << "\n";
  os << "formats = ";
  for (std::size_t i = 0; i < c.formats.size(); ++i) {
    if (i) os << ", ";
    os << c.formats[i];
  }
  os << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  // the [output] section says where artifacts land, not what they contain
  RunConfig normalized = c;
  normalized.out_dir = "out";
  normalized.formats = {"csv", "bin"};
  const std::string s = serialize_config(normalized);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ModelParams build_model(const RunConfig& c) {
  ModelParams p;
  p.q = c.q;
  p.T = c.horizon;
  p.a = c.barrier;
  p.Lambda = c.bound_lambda;
  p.kappa = c.kappa;
  p.kappa0 = c.kappa0;
  p.beta = c.beta.build(p.a, p.Lambda);
  p.sigma = c.sigma.build(p.a, p.Lambda);
  p.sigma_bar = c.sigma_bar.build(p.a, p.Lambda);
  p.eta = c.eta.build(p.a, p.Lambda);
  p.lam = c.lam.build(p.a, p.Lambda);
  p.marks = c.marks;
  p.gamma.assign(p.marks.size(), c.gamma.build(p.a, p.Lambda));
  return p;
}

Grid build_grid(const RunConfig& c) {
  return make_grid(c.barrier, c.y_max, c.n_space, c.n_time, c.n_refine, c.refine_ratio,
                   c.horizon);
}

}  // namespace tzliq
