#include "prodprice/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem", {"beta", "grid_n"}},
      {"revenue", {"family", "A", "B", "points"}},
      {"cost", {"family", "c", "K", "points"}},
      {"sets", {"Q", "A"}},
      {"oracle", {"x_max", "nx", "dt", "tol", "max_sweeps"}},
  };
  return keys;
}

using Values = std::map<std::string, std::string>;

void put(Values& values, const std::string& section, const std::string& key, std::string value) {
  const auto& keys = known_keys();
  const auto sec = keys.find(section);
  if (sec == keys.end()) throw ConfigError("unknown section [" + section + "]");
  if (!sec->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  boost::algorithm::trim(value);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
  values[section + "." + key] = value;
}

double to_number(const std::string& name, std::string text) {
  boost::algorithm::trim(text);
  double out = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("'" + name + "' is not a number: '" + text + "'");
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const Values& v) : v_(v) {}

  bool has(const std::string& k) const { return v_.count(k) != 0; }
  const std::string& text(const std::string& k) const {
    const auto it = v_.find(k);
    if (it == v_.end()) throw ConfigError("missing required key '" + k + "'");
    return it->second;
  }
  double number(const std::string& k) const { return to_number(k, text(k)); }
  double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }

 private:
  const Values& v_;
};

std::vector<std::string> words(std::string s) {
  std::replace(s.begin(), s.end(), ',', ' ');
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

ControlSet parse_set(const std::string& name, const std::string& text) {
  const std::vector<std::string> w = words(text);
  if (w.empty()) throw ConfigError("'" + name + "' is empty");
  auto num = [&](std::size_t i) { return to_number(name, w[i]); };
  if (w[0] == "interval" && w.size() == 3) return Interval{num(1), num(2)};
  if (w[0] == "ray" && w.size() == 2) return RightRay{num(1)};
  if (w[0] == "finite" && w.size() >= 2) {
    FiniteSet f;
    for (std::size_t i = 1; i < w.size(); ++i) f.values.push_back(num(i));
    return f;
  }
  throw ConfigError("'" + name + "' must be 'interval LO HI', 'finite V...' or 'ray LO'");
}

Table parse_points(const std::string& name, const std::string& text) {
  Table t;
  std::vector<std::string> items;
  boost::algorithm::split(items, text, boost::algorithm::is_any_of(","));
  for (std::string item : items) {
    boost::algorithm::trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("'" + name + "' entries must look like x:f");
    t.xs.push_back(to_number(name, item.substr(0, colon)));
    t.fs.push_back(to_number(name, item.substr(colon + 1)));
  }
  if (t.xs.empty()) throw ConfigError("'" + name + "' has no points");
  return t;
}

ProblemConfig build(const Values& values) {
  const Reader r(values);
  ProblemConfig cfg;
  ProblemSpec& s = cfg.spec;
  s.beta = r.number("problem.beta");
  if (r.has("problem.grid_n")) {
    const double g = r.number("problem.grid_n");
    if (!(g >= 3.0) || g != static_cast<double>(static_cast<std::size_t>(g))) {
      throw ConfigError("problem.grid_n must be an integer >= 3");
    }
    s.grid_n = static_cast<std::size_t>(g);
  }

  const std::string& rf = r.text("revenue.family");
  if (rf == "linear_demand") {
    const double a = r.number("revenue.A");
    const double b = r.number("revenue.B");
    s.revenue = LinearDemandRevenue{a, b};
    s.q_set = Interval{0.0, a / b};
  } else if (rf == "table") {
    s.revenue = parse_points("revenue.points", r.text("revenue.points"));
  } else {
    throw ConfigError("revenue.family must be linear_demand or table");
  }

  const std::string& cf = r.text("cost.family");
  if (cf == "affine") {
    s.cost = AffineCost{r.number("cost.c")};
  } else if (cf == "cubic") {
    s.cost = CubicCost{r.number("cost.K")};
  } else if (cf == "table") {
    s.cost = parse_points("cost.points", r.text("cost.points"));
  } else {
    throw ConfigError("cost.family must be affine, cubic or table");
  }

  if (r.has("sets.Q")) {
    s.q_set = parse_set("sets.Q", r.text("sets.Q"));
  } else if (rf != "linear_demand") {
    throw ConfigError("missing required key 'sets.Q'");
  }
  s.a_set = parse_set("sets.A", r.text("sets.A"));

  OracleSettings& o = cfg.oracle;
  o.x_max = r.number("oracle.x_max", o.x_max);
  o.nx = static_cast<std::size_t>(r.number("oracle.nx", static_cast<double>(o.nx)));
  o.dt = r.number("oracle.dt", o.dt);
  o.tol = r.number("oracle.tol", o.tol);
  o.max_sweeps = static_cast<std::size_t>(r.number("oracle.max_sweeps", static_cast<double>(o.max_sweeps)));
  if (o.nx < 2 || o.max_sweeps < 1) throw ConfigError("oracle.nx must be >= 2 and oracle.max_sweeps >= 1");

  if (const auto* lin = std::get_if<LinearDemandRevenue>(&s.revenue)) {
    const auto* cub = std::get_if<CubicCost>(&s.cost);
    const auto* ray = std::get_if<RightRay>(&s.a_set);
    const auto* q = std::get_if<Interval>(&s.q_set);
    if (cub && ray && ray->lo == 0.0 && q && q->lo == 0.0 && q->hi == lin->a / lin->b) {
      cfg.closed_form = ClosedFormFamily{lin->a, lin->b, cub->k};
    }
  }
  return cfg;
}

}  // namespace

ProblemConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Values values;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, leaf] : body) put(values, section, key, leaf.data());
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override '" + o + "' must look like section.key=value");
    }
    put(values, o.substr(0, dot), boost::algorithm::trim_copy(o.substr(dot + 1, eq - dot - 1)), o.substr(eq + 1));
  }
  return build(values);
}

ProblemConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, overrides);
}

const char* config_schema() {
  return "config schema: [problem] beta, grid_n; [revenue] family = linear_demand (A, B) | table (points = "
         "\"x:f, ...\"); [cost] family = affine (c) | cubic (K) | table (points); [sets] Q, A = 'interval LO "
         "HI' | 'finite V...' | 'ray LO' (Q defaults to [0, A/B] for linear_demand); [oracle] x_max, nx, dt, "
         "tol, max_sweeps. See README.md.";
}

}  // namespace prodprice
