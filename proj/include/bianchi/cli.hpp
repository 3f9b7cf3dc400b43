#pragma once
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/mellin.hpp"
#include "json.hpp"

namespace bianchi {

using Json = nlohmann::ordered_json;

// ---- configuration ----
struct PipelineConfig {
  int64_t D = 4;
  int64_t p = 5;
  int64_t seed = 57;            // residue of omega under iota_p (mod p^2 or finer)
  std::string phi = "canonical";
  int k = 0;
  int N = 4;                    // p-adic precision
  int M = 0;                    // moment bound, 0 means N + k + 1
  int T = 4;                    // tree depth
  int digits = 50;              // complex working precision
  std::string omega_normalization = "norm";  // norm | berger
  IntElem unit_p{1, 0}, unit_pbar{1, 0};     // uniformizers are unit * canonical generator
  int max_t = 2, max_s = 2;     // character set selector (conductor exponents)
  int q_max = 0, r_max = 0;     // algebraic parts x^q y^r
  std::string cache_dir;        // empty disables the cache
  std::string output;           // report path, empty for stdout only
  int required_valuation = -1;  // -1 means N - 2

  int moment_bound() const { return M > 0 ? M : N + k + 1; }
  int required() const { return required_valuation >= 0 ? required_valuation : N - 2; }
  Json to_json() const;
  // the knobs that change mathematical output (for cache keys)
  std::string convention_key() const;
};
// "key = value" lines, '#' comments; unknown keys are errors
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);
// throws ConfigError with the offending key
void validate_config(const PipelineConfig& cfg);
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- persistent cache ----
// One file per cache directory; each line is key \t value \t checksum (FNV-1a 64 of key and value).
// Lines are only ever appended. Lines with a bad checksum are skipped with a warning.
class LValueCache {
 public:
  LValueCache() = default;
  explicit LValueCache(const std::string& dir, LogSink log = {});
  bool enabled() const { return !path_.empty(); }
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& value);
  int corrupt_lines() const { return corrupt_; }
  int hits() const { return hits_; }
  int misses() const { return misses_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, std::string> entries_;
  int corrupt_ = 0;
  mutable int hits_ = 0, misses_ = 0;
  LogSink log_;
  mutable std::mutex mu_;
};
uint64_t fnv1a64(const std::string& s);
std::string cyc_serialize(const CycNum& x);
CycNum cyc_parse(const std::string& s);

// ---- report helpers ----
Json cyc_json(const CycNum& x);
Json padic_json(const PadicCyc& x);
Json lvalue_json(const PadicLValue& v);
Json interp_json(const InterpRecord& r);
Json katz_json(const KatzRecord& r);
// 16 hex digits of FNV-1a over the canonical string
std::string regression_hash(const std::string& s);
void write_report(const Json& report, const std::string& path);

// ---- pipeline ----
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, LogSink log = {});
  ~Pipeline();
  const PipelineConfig& config() const { return cfg_; }
  const FieldK& field();
  const PadicEmbedding& embedding();
  const BaseChange& base_change();
  // symbol with every level <= (A, B) built
  BaseChangeSymbol& symbol(int A, int B);
  Lifter& lifter();
  LValueCache& cache() { return cache_; }
  void log(const std::string& line) const;

  // L-value through the cache
  ComplexVal lvalue(const HeckeCharacter& chi, double s0);
  std::vector<CharSpec> character_set();

  // subcommand name -> report; ok is the verdict of all checks in the stage
  Json run(const std::string& subcommand, bool& ok);
  Json field_info(bool& ok);
  Json char_table(bool& ok);
  Json lvalue_stage(bool& ok);
  Json symbol_stage(bool& ok);
  Json lift_stage(bool& ok);
  Json padic_l(bool& ok);
  Json verify_interp(bool& ok);
  Json verify_katz(bool& ok);
  Json verify_all(bool& ok);

  const std::map<std::string, double>& timings() const { return timings_; }

 private:
  PipelineConfig cfg_;
  LogSink log_;
  LValueCache cache_;
  std::unique_ptr<FieldK> K_;
  std::unique_ptr<PadicEmbedding> emb_;
  std::unique_ptr<BaseChange> bc_;
  std::unique_ptr<BaseChangeSymbol> sym_;
  std::unique_ptr<Lifter> lifter_;
  std::map<std::string, PadicLValue> mellin_;
  std::map<std::string, double> timings_;
  std::vector<InterpRecord> interp_;

  template <class F>
  auto timed(const std::string& stage, F&& f) -> decltype(f());
  const std::vector<InterpRecord>& interpolation_records();
  Json envelope(const std::string& sub, Json body, bool ok) const;
};

}  // namespace bianchi
