#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bianchi/cli.hpp"

namespace bianchi {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {
std::string hex16(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}
std::string line_checksum(const std::string& key, const std::string& value) { return hex16(fnv1a64(key + '\t' + value)); }
}  // namespace

LValueCache::LValueCache(const std::string& dir, LogSink log) : log_(std::move(log)) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cache: cannot create " + dir + ": " + ec.message());
  path_ = (std::filesystem::path(dir) / "lvalues.v1.tsv").string();
  std::ifstream in(path_);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    bool good = t2 != std::string::npos;
    std::string key, value;
    if (good) {
      key = line.substr(0, t1);
      value = line.substr(t1 + 1, t2 - t1 - 1);
      good = line.substr(t2 + 1) == line_checksum(key, value);
    }
    if (!good) {
      ++corrupt_;
      if (log_) log_("stage=cache event=corrupt_entry line=" + std::to_string(lineno) + " action=ignored");
      continue;
    }
    entries_[key] = value;  // later lines win
  }
  // an unterminated last line would glue onto the next append
  std::ifstream tail(path_, std::ios::binary | std::ios::ate);
  if (tail && tail.tellg() > 0) {
    tail.seekg(-1, std::ios::end);
    char c = 0;
    tail.get(c);
    if (c != '\n') std::ofstream(path_, std::ios::app) << '\n';
  }
  if (log_)
    log_("stage=cache event=open path=" + path_ + " entries=" + std::to_string(entries_.size()) +
         " corrupt=" + std::to_string(corrupt_));
}

std::optional<std::string> LValueCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> g(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void LValueCache::put(const std::string& key, const std::string& value) {
  if (key.find_first_of("\t\n") != std::string::npos || value.find_first_of("\t\n") != std::string::npos)
    throw MathError("cache: key or value contains a tab or newline");
  std::lock_guard<std::mutex> g(mu_);
  entries_[key] = value;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw MathError("cache: cannot append to " + path_);
  out << key << '\t' << value << '\t' << line_checksum(key, value) << '\n';
}

// "m:c0;c1;..." with exact rationals
std::string cyc_serialize(const CycNum& x) {
  std::string s = std::to_string(x.conductor()) + ":";
  const auto& c = x.coeffs();
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ';';
    s += c[i].get_str();
  }
  return s;
}

CycNum cyc_parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw MathError("cyc_parse: missing conductor in '" + s + "'");
  int64_t m = std::stoll(s.substr(0, colon));
  std::vector<mpq_class> c;
  std::stringstream rest(s.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ';')) {
    mpq_class q;
    if (q.set_str(item, 10) != 0) throw MathError("cyc_parse: bad rational '" + item + "'");
    q.canonicalize();
    c.push_back(q);
  }
  if ((int64_t)c.size() != euler_phi(m)) throw MathError("cyc_parse: wrong coordinate count in '" + s + "'");
  return CycNum(m, c);
}

}  // namespace bianchi
