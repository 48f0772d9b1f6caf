#include "curvedraw/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "curvedraw/errors.hpp"

namespace curvedraw {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const Params&)> get;
  std::function<void(Params&, const std::string&)> set;
};

double to_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw InvalidSpec("config value for " + key + " is not a number: " + v);
  }
  return d;
}

long long to_int(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw InvalidSpec("config value for " + key + " is not an integer: " + v);
  }
  return i;
}

std::vector<Field> field_table() {
  std::vector<Field> f;
  auto dbl = [&](const char* sec, const char* key, double Params::*m) {
    f.push_back({sec, key,
                 [m](const Params& p) { return format_double(p.*m); },
                 [m, key](Params& p, const std::string& v) {
                   p.*m = to_double(v, key);
                 }});
  };
  auto integer = [&](const char* sec, const char* key, int Params::*m) {
    f.push_back({sec, key,
                 [m](const Params& p) { return std::to_string(p.*m); },
                 [m, key](Params& p, const std::string& v) {
                   p.*m = static_cast<int>(to_int(v, key));
                 }});
  };
  dbl("geometry", "eps_depth", &Params::eps_depth);
  dbl("geometry", "eps_angle_deg", &Params::eps_angle_deg);
  dbl("hypothesis", "tau_overlap", &Params::tau_overlap);
  integer("hypothesis", "min_curve_edgels", &Params::min_curve_edgels);
  f.push_back({"hypothesis", "pair_strategy",
               [](const Params& p) { return p.pair_strategy; },
               [](Params& p, const std::string& v) {
                 if (v != "exhaustive" && v != "window") {
                   throw InvalidSpec("pair_strategy must be exhaustive|window");
                 }
                 p.pair_strategy = v;
               }});
  integer("hypothesis", "pair_window", &Params::pair_window);
  dbl("verification", "delta_d", &Params::delta_d);
  dbl("verification", "delta_theta_deg", &Params::delta_theta_deg);
  integer("verification", "n_min_views", &Params::n_min_views);
  integer("verification", "min_run", &Params::min_run);
  dbl("verification", "tau_v", &Params::tau_v);
  dbl("verification", "reliability_floor", &Params::reliability_floor);
  integer("averaging", "bucket_gap", &Params::bucket_gap);
  integer("consistency", "tau_eps", &Params::tau_eps);
  integer("consistency", "tau_sl", &Params::tau_sl);
  integer("consistency", "g_max", &Params::g_max);
  dbl("drawing", "alpha", &Params::alpha);
  integer("drawing", "max_iters", &Params::max_iters);
  dbl("drawing", "sample_spacing", &Params::sample_spacing);
  dbl("drawing", "spacing_divisor", &Params::spacing_divisor);
  dbl("drawing", "merge_factor", &Params::merge_factor);
  dbl("drawing", "snap_factor", &Params::snap_factor);
  dbl("drawing", "tol_factor", &Params::tol_factor);
  dbl("eval", "tau_prox", &Params::tau_prox);
  dbl("eval", "tau_prox_frac", &Params::tau_prox_frac);
  f.push_back({"run", "seed",
               [](const Params& p) { return std::to_string(p.seed); },
               [](Params& p, const std::string& v) {
                 p.seed = std::strtoull(v.c_str(), nullptr, 10);
               }});
  integer("run", "threads", &Params::threads);
  return f;
}

}  // namespace

std::string config_to_text(const Params& params) {
  const auto fields = field_table();
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields) {
    if (f.section != section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << f.get(params) << "\n";
  }
  return out.str();
}

Params parse_config_text(const std::string& text, const std::string& origin) {
  const auto fields = field_table();
  std::map<std::pair<std::string, std::string>, const Field*> lookup;
  for (const auto& f : fields) lookup[{f.section, f.key}] = &f;

  Params params;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidSpec(origin + ":" + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidSpec(origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find({section, key});
    if (it == lookup.end()) {
      throw InvalidSpec(origin + ":" + std::to_string(line_no) +
                        ": unknown config key [" + section + "] " + key);
    }
    it->second->set(params, value);
  }
  return params;
}

Params parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void write_config(const Params& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << config_to_text(params);
}

std::uint64_t config_hash(const Params& params) {
  const std::string text = config_to_text(params);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace curvedraw
