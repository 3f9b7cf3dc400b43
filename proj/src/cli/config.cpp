#include <fstream>
#include <sstream>

#include "bianchi/cli.hpp"

namespace bianchi {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

// "x,y" meaning x + y omega
IntElem parse_elem(const std::string& key, const std::string& v) {
  auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError("config: key '" + key + "' expects 'x,y', got '" + v + "'");
  return {parse_int(key, trim(v.substr(0, comma))), parse_int(key, trim(v.substr(comma + 1)))};
}

std::string elem_str(const IntElem& e) { return std::to_string(e.x) + "," + std::to_string(e.y); }

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (key == "D") c.D = parse_int(key, v);
    else if (key == "p") c.p = parse_int(key, v);
    else if (key == "seed") c.seed = parse_int(key, v);
    else if (key == "phi") c.phi = v;
    else if (key == "k") c.k = (int)parse_int(key, v);
    else if (key == "N") c.N = (int)parse_int(key, v);
    else if (key == "M") c.M = (int)parse_int(key, v);
    else if (key == "T") c.T = (int)parse_int(key, v);
    else if (key == "digits") c.digits = (int)parse_int(key, v);
    else if (key == "omega_normalization") c.omega_normalization = v;
    else if (key == "unit_p") c.unit_p = parse_elem(key, v);
    else if (key == "unit_pbar") c.unit_pbar = parse_elem(key, v);
    else if (key == "max_t") c.max_t = (int)parse_int(key, v);
    else if (key == "max_s") c.max_s = (int)parse_int(key, v);
    else if (key == "q_max") c.q_max = (int)parse_int(key, v);
    else if (key == "r_max") c.r_max = (int)parse_int(key, v);
    else if (key == "cache_dir") c.cache_dir = v;
    else if (key == "output") c.output = v;
    else if (key == "required_valuation") c.required_valuation = (int)parse_int(key, v);
    else throw ConfigError("config: unknown key '" + key + "' on line " + std::to_string(lineno));
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const PipelineConfig& c) {
  if (c.D <= 0) throw ConfigError("config: D must be positive");
  FieldK K(c.D);
  if (K.h() != 1) throw ConfigError("config: D = " + std::to_string(c.D) + " has class number " + std::to_string(K.h()) + ", need h = 1");
  if (!is_prime(c.p)) throw ConfigError("config: p = " + std::to_string(c.p) + " is not prime");
  if (factor_prime(K, c.p).kind != Splitting::Split) throw ConfigError("config: p = " + std::to_string(c.p) + " does not split in K");
  if (c.phi != "canonical") throw ConfigError("config: phi must be 'canonical'");
  if (c.D != 4) throw ConfigError("config: phi = canonical is the CM character of Q(i), needs D = 4");
  if (c.k != 0) throw ConfigError("config: only k = 0 is supported by the canonical character");
  // conductor (1+i)^3 has norm 8
  if (c.p == 2) throw ConfigError("config: p divides the conductor of phi");
  if (c.N < 1) throw ConfigError("config: N must be at least 1");
  if (c.moment_bound() < 1 || c.moment_bound() > 8) throw ConfigError("config: M must lie in 1..8");
  if (ipow(c.p, c.N) >= (int64_t(1) << 31)) throw ConfigError("config: p^N exceeds the integer kernel");
  if (c.T < 1) throw ConfigError("config: T must be at least 1");
  if (c.digits < 30) throw ConfigError("config: digits must be at least 30");
  if (c.omega_normalization != "norm" && c.omega_normalization != "berger")
    throw ConfigError("config: omega_normalization must be norm or berger");
  if (!K.is_unit(c.unit_p) || !K.is_unit(c.unit_pbar)) throw ConfigError("config: unit_p and unit_pbar must be units");
  if (c.max_t < 0 || c.max_s < 0 || c.max_t > c.T - 1 || c.max_s > c.T - 1)
    throw ConfigError("config: max_t and max_s must lie in 0..T-1");
  if (c.max_t > 2 || c.max_s > 2) throw ConfigError("config: character conductors above p^2 pbar^2 are not inverted exactly");
  if (c.q_max < 0 || c.r_max < 0 || std::max(c.q_max, c.r_max) >= c.moment_bound())
    throw ConfigError("config: q_max and r_max must lie below M");
  if (c.q_max > c.k || c.r_max > c.k) throw ConfigError("config: q_max and r_max are bounded by k");
  int64_t s = mod64(c.seed * c.seed + 1, c.p);
  if (s != 0) throw ConfigError("config: seed is not a square root of -1 modulo p");
}

Json PipelineConfig::to_json() const {
  Json j;
  j["D"] = D;
  j["p"] = p;
  j["seed"] = seed;
  j["phi"] = phi;
  j["k"] = k;
  j["N"] = N;
  j["M"] = moment_bound();
  j["T"] = T;
  j["digits"] = digits;
  j["omega_normalization"] = omega_normalization;
  j["unit_p"] = elem_str(unit_p);
  j["unit_pbar"] = elem_str(unit_pbar);
  j["max_t"] = max_t;
  j["max_s"] = max_s;
  j["q_max"] = q_max;
  j["r_max"] = r_max;
  j["required_valuation"] = required();
  return j;
}

std::string PipelineConfig::convention_key() const {
  std::ostringstream o;
  o << "D=" << D << "/p=" << p << "/seed=" << seed << "/phi=" << phi << "/k=" << k << "/digits=" << digits
    << "/omega=" << omega_normalization;
  return o.str();
}

}  // namespace bianchi
