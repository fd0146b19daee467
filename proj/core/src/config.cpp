#include "bnk/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bnk {

ConfigError::ConfigError(int line_, const std::string& msg)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg
                                   : msg),
      line(line_) {}

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(line, "expected a finite number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || x < -2147483648LL ||
      x > 2147483647LL) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
  return (int)x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE ||
      (!v.empty() && v[0] == '-')) {
    throw ConfigError(line, "expected an unsigned integer, got '" + v + "'");
  }
  return x;
}

Vec parse_vec(const std::string& v, int line) {
  std::istringstream in(v);
  Vec out = zero_vec(1);
  int count = 0;
  std::string tok;
  while (in >> tok) {
    if (count >= kMaxDim) {
      throw ConfigError(line, "too many components (at most " +
                                  std::to_string(kMaxDim) + ")");
    }
    out[count++] = parse_double(tok, line);
  }
  if (count == 0) throw ConfigError(line, "expected at least one component");
  out.d = count;
  return out;
}

std::vector<std::pair<double, double>> parse_table(const std::string& v, int line) {
  std::vector<std::pair<double, double>> table;
  std::string entry;
  std::istringstream in(v);
  while (std::getline(in, entry, ',')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    const std::size_t colon = entry.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(line, "table entries are x:b pairs, got '" + entry + "'");
    }
    table.emplace_back(parse_double(trim(entry.substr(0, colon)), line),
                       parse_double(trim(entry.substr(colon + 1)), line));
  }
  if (table.empty()) throw ConfigError(line, "empty kernel table");
  return table;
}

void check(bool ok, int line, const std::string& msg) {
  if (!ok) throw ConfigError(line, msg);
}

std::string fmt(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  bool center_given = false;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      check(s.back() == ']', line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      check(section == "kernel" || section == "grid" || section == "initial" ||
                section == "scheme" || section == "diagnostics" ||
                section == "io" || section == "mode",
            line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    check(eq != std::string::npos, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    check(!key.empty(), line, "empty key");
    check(!section.empty(), line, "entry before any [section] header");

    if (section == "kernel") {
      if (key == "c_phi") {
        c.c_phi = parse_double(value, line);
        check(c.c_phi > 0.0, line, "c_phi must be positive");
      } else if (key == "gamma") {
        c.gamma = parse_double(value, line);
        check(c.gamma >= 0.0 && c.gamma <= 1.0, line, "gamma must lie in [0, 1]");
      } else if (key == "b_value") {
        c.b_value = parse_double(value, line);
        check(c.b_value > 0.0, line, "b_value must be positive");
      } else if (key == "b_table") {
        c.b_table = parse_table(value, line);
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [kernel]");
      }
    } else if (section == "grid") {
      if (key == "d") {
        c.d = parse_int(value, line);
        check(c.d >= 3 && c.d <= kMaxDim, line, "d must be 3 or 4");
      } else if (key == "N") {
        c.N = parse_int(value, line);
        check(c.N >= 2, line, "N must be >= 2");
      } else if (key == "V") {
        c.V = parse_double(value, line);
        check(c.V > 0.0, line, "V must be positive");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [grid]");
      }
    } else if (section == "initial") {
      if (key == "family") {
        check(value == "gaussian" || value == "spike" || value == "plateau" ||
                  value == "bose" || value == "power_tail",
              line, "unknown initial family '" + value + "'");
        c.initial.family = value;
      } else if (key == "amplitude") {
        c.initial.amplitude = parse_double(value, line);
      } else if (key == "sigma") {
        c.initial.sigma = parse_double(value, line);
      } else if (key == "radius") {
        c.initial.radius = parse_double(value, line);
      } else if (key == "s") {
        c.initial.s = parse_double(value, line);
      } else if (key == "beta") {
        c.initial.beta = parse_double(value, line);
      } else if (key == "mu") {
        c.initial.mu = parse_double(value, line);
      } else if (key == "center") {
        c.initial.center = parse_vec(value, line);
        center_given = true;
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [initial]");
      }
    } else if (section == "scheme") {
      if (key == "n") {
        c.n = parse_int(value, line);
        check(c.n >= 1, line, "n must be >= 1");
      } else if (key == "segments") {
        c.segments = parse_int(value, line);
        check(c.segments >= 1, line, "segments must be >= 1");
      } else if (key == "practical_dt") {
        c.practical_dt = parse_double(value, line);
        check(c.practical_dt >= 0.0, line, "practical_dt must be >= 0");
      } else if (key == "blowup_ceiling") {
        c.blowup_ceiling = parse_double(value, line);
        check(c.blowup_ceiling > 1.0, line, "blowup_ceiling must exceed 1");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [scheme]");
      }
    } else if (section == "diagnostics") {
      if (key == "s") {
        c.s = parse_double(value, line);
        check(c.s > 2.0, line, "s must exceed 2");
      } else if (key == "r0_override") {
        c.r0_override = parse_double(value, line);
        check(c.r0_override >= 0.0, line, "r0_override must be >= 0");
      } else if (key == "hyperplane_directions") {
        c.hyperplane_directions = parse_int(value, line);
        check(c.hyperplane_directions >= 1, line, "need >= 1 direction");
      } else if (key == "hyperplane_offsets") {
        c.hyperplane_offsets = parse_int(value, line);
        check(c.hyperplane_offsets >= 1, line, "need >= 1 offset");
      } else if (key == "gamma_stride") {
        c.gamma_stride = parse_int(value, line);
        check(c.gamma_stride >= 1, line, "gamma_stride must be >= 1");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [diagnostics]");
      }
    } else if (section == "io") {
      if (key == "out_dir") {
        check(!value.empty(), line, "out_dir must not be empty");
        c.out_dir = value;
      } else if (key == "snapshot_cadence") {
        c.snapshot_cadence = parse_int(value, line);
        check(c.snapshot_cadence >= 0, line, "snapshot_cadence must be >= 0");
      } else if (key == "csv_digits") {
        c.csv_digits = parse_int(value, line);
        check(c.csv_digits >= 6 && c.csv_digits <= 17, line,
              "csv_digits must lie in [6, 17]");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [io]");
      }
    } else if (section == "mode") {
      if (key == "subcritical_mode") {
        if (value == "quoted") {
          c.subcritical_mode = SubcriticalMode::kQuoted;
        } else if (value == "self-consistent") {
          c.subcritical_mode = SubcriticalMode::kSelfConsistent;
        } else {
          throw ConfigError(line, "subcritical_mode is 'quoted' or 'self-consistent'");
        }
      } else if (key == "seed") {
        c.seed = parse_u64(value, line);
      } else if (key == "threads") {
        c.threads = parse_int(value, line);
        check(c.threads >= 1, line, "threads must be >= 1");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [mode]");
      }
    }
  }
  if (!center_given) c.initial.center = zero_vec(c.d);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

KernelParams RunConfig::kernel_params() const {
  KernelParams p;
  p.c_phi = c_phi;
  p.gamma = gamma;
  p.d = d;
  p.b = b_table.empty() ? AngularKernel::constant(b_value)
                        : AngularKernel::table(b_table);
  return p;
}

VelocityGrid RunConfig::make_grid() const { return VelocityGrid::make(d, N, V); }

HyperplaneSampleSpec RunConfig::hyperplane_spec() const {
  HyperplaneSampleSpec spec;
  spec.directions = hyperplane_directions;
  spec.offsets = hyperplane_offsets;
  return spec;
}

void RunConfig::validate() const {
  try {
    kernel_params().validate();
    initial.validate(d);
    (void)make_grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (initial.center.d != d) {
    throw ConfigError(0, "initial center has " + std::to_string(initial.center.d) +
                             " components for d = " + std::to_string(d));
  }
  if (!(s > (double)(d - 1))) {
    throw ConfigError(0, "diagnostics s must exceed d - 1");
  }
}

std::string effective_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[kernel]\n";
  out << "c_phi = " << fmt(c.c_phi) << "\n";
  out << "gamma = " << fmt(c.gamma) << "\n";
  if (c.b_table.empty()) {
    out << "b_value = " << fmt(c.b_value) << "\n";
  } else {
    out << "b_table = ";
    for (std::size_t i = 0; i < c.b_table.size(); ++i) {
      if (i) out << ", ";
      out << fmt(c.b_table[i].first) << ":" << fmt(c.b_table[i].second);
    }
    out << "\n";
  }
  out << "\n[grid]\n";
  out << "d = " << c.d << "\n";
  out << "N = " << c.N << "\n";
  out << "V = " << fmt(c.V) << "\n";
  out << "\n[initial]\n";
  out << "family = " << c.initial.family << "\n";
  out << "amplitude = " << fmt(c.initial.amplitude) << "\n";
  out << "sigma = " << fmt(c.initial.sigma) << "\n";
  out << "radius = " << fmt(c.initial.radius) << "\n";
  out << "s = " << fmt(c.initial.s) << "\n";
  out << "beta = " << fmt(c.initial.beta) << "\n";
  out << "mu = " << fmt(c.initial.mu) << "\n";
  out << "center =";
  for (int k = 0; k < c.initial.center.d; ++k) out << " " << fmt(c.initial.center[k]);
  out << "\n";
  out << "\n[scheme]\n";
  out << "n = " << c.n << "\n";
  out << "segments = " << c.segments << "\n";
  out << "practical_dt = " << fmt(c.practical_dt) << "\n";
  out << "blowup_ceiling = " << fmt(c.blowup_ceiling) << "\n";
  out << "\n[diagnostics]\n";
  out << "s = " << fmt(c.s) << "\n";
  out << "r0_override = " << fmt(c.r0_override) << "\n";
  out << "hyperplane_directions = " << c.hyperplane_directions << "\n";
  out << "hyperplane_offsets = " << c.hyperplane_offsets << "\n";
  out << "gamma_stride = " << c.gamma_stride << "\n";
  out << "\n[io]\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "snapshot_cadence = " << c.snapshot_cadence << "\n";
  out << "csv_digits = " << c.csv_digits << "\n";
  out << "\n[mode]\n";
  out << "subcritical_mode = "
      << (c.subcritical_mode == SubcriticalMode::kQuoted ? "quoted"
                                                         : "self-consistent")
      << "\n";
  out << "seed = " << c.seed << "\n";
  out << "threads = " << c.threads << "\n";
  return out.str();
}

}  // namespace bnk
