#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bianchi/cli.hpp"
#include "doctest.h"

using namespace bianchi;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("bianchi_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const char* exe = std::getenv("BIANCHI_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "BIANCHI_CLI must point at the CLI binary");
  std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* f = ::popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int st = ::pclose(f);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Json without_timings(Json j) {
  j.erase("timings_seconds");
  return j;
}

// small instance for subprocess runs
const char* kSmall = "-q -s N=2 -s T=2 -s max_t=1 -s max_s=1";

}  // namespace

TEST_CASE("config parsing") {
  PipelineConfig c = parse_config("# reference\nN = 3\n  T=3 \nunit_p = 0,1\nomega_normalization = berger\n\n");
  CHECK(c.N == 3);
  CHECK(c.T == 3);
  CHECK(c.unit_p == IntElem{0, 1});
  CHECK(c.omega_normalization == "berger");
  CHECK(c.moment_bound() == 4);
  CHECK(c.required() == 1);
  CHECK(c.seed == 57);
  validate_config(c);

  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("N = three"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words"), ConfigError);
  CHECK_THROWS_AS(parse_config("unit_p = 1"), ConfigError);
}

TEST_CASE("config validation") {
  auto bad = [](const std::string& text) {
    PipelineConfig c = parse_config(text);
    INFO(text);
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  };
  bad("p = 7");           // inert in Q(i)
  bad("p = 9");           // not prime
  bad("D = 20");          // class number 2
  bad("seed = 4");        // 4^2 + 1 is not divisible by 5
  bad("digits = 10");
  bad("unit_p = 2,0");
  bad("max_t = 3\nT = 4");
  bad("M = 9");
  bad("k = 1");
  bad("omega_normalization = other");
  validate_config(parse_config("seed = 68"));
  validate_config(parse_config("p = 13\nseed = 5\nN = 3"));
}

TEST_CASE("config echo and convention key") {
  PipelineConfig c = parse_config("seed = 68");
  Json j = c.to_json();
  CHECK(j["seed"] == 68);
  CHECK(j["unit_p"] == "1,0");
  CHECK(j["M"] == 5);
  CHECK(c.convention_key() == "D=4/p=5/seed=68/phi=canonical/k=0/digits=50/omega=norm");
  PipelineConfig d = parse_config("seed = 68\nN = 3\ncache_dir = /tmp/x");
  CHECK(d.convention_key() == c.convention_key());
}

TEST_CASE("cyclotomic serialization round trip") {
  for (const CycNum& x : {CycNum::from_int(0), CycNum::rational(mpq_class(-7, 3)),
                          CycNum::root_of_unity(20, 3) * mpq_class(5, 11) + CycNum::root_of_unity(4, 1),
                          CycNum::root_of_unity(5, 2)}) {
    std::string s = cyc_serialize(x);
    CHECK(cyc_parse(s) == x);
  }
  CHECK_THROWS(cyc_parse("garbage"));
}

TEST_CASE("cache put and get") {
  fs::path d = fresh_dir("cache");
  {
    LValueCache c(d.string());
    CHECK(c.enabled());
    CHECK(!c.get("a").has_value());
    c.put("a", "1;2;3");
    c.put("b", "x");
    c.put("a", "4;5;6");
    CHECK(c.get("a").value() == "4;5;6");
  }
  LValueCache c(d.string());
  CHECK(c.get("a").value() == "4;5;6");
  CHECK(c.get("b").value() == "x");
  CHECK(c.corrupt_lines() == 0);
  CHECK(c.hits() == 2);
  CHECK(!LValueCache().enabled());
  fs::remove_all(d);
}

TEST_CASE("corrupt cache entries are skipped and recomputed") {
  fs::path d = fresh_dir("corrupt");
  PipelineConfig cfg = parse_config("N = 2\nT = 2\nmax_t = 1\nmax_s = 1");
  cfg.cache_dir = d.string();
  ComplexVal first;
  HeckeCharacter chi;
  {
    Pipeline pipe(cfg);
    chi = pipe.base_change().phi.conj();
    first = pipe.lvalue(chi, 1.0);
    CHECK(pipe.cache().misses() == 1);
  }
  // flip one digit of the stored value
  std::string path = (d / "lvalues.v1.tsv").string();
  std::string text;
  {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto tab = text.find('\t');
  REQUIRE(tab != std::string::npos);
  char& ch = text[tab + 3];
  ch = ch == '1' ? '2' : '1';
  std::ofstream(path, std::ios::trunc) << text;

  std::vector<std::string> lines;
  Pipeline pipe(cfg, [&](const std::string& l) { lines.push_back(l); });
  CHECK(pipe.cache().corrupt_lines() == 1);
  bool warned = false;
  for (auto& l : lines) warned = warned || l.find("stage=cache event=corrupt_entry line=1 action=ignored") == 0;
  CHECK(warned);
  ComplexVal again = pipe.lvalue(pipe.base_change().phi.conj(), 1.0);
  CHECK(pipe.cache().misses() == 1);
  CHECK(again.value.str(40) == first.value.str(40));
  // and the recomputed value was appended, so a third open is clean on that key
  LValueCache reopened(d.string());
  CHECK(reopened.corrupt_lines() == 1);
  fs::remove_all(d);
}

TEST_CASE("field-info report") {
  RunResult r = run_cli(std::string(kSmall) + " field-info");
  CHECK(r.status == 0);
  Json j = Json::parse(r.out);
  CHECK(j["schema"] == "bianchi-report/1");
  CHECK(j["subcommand"] == "field-info");
  CHECK(j["pass"] == true);
  CHECK(j["result"]["class_number"] == 1);
  CHECK(j["result"]["units"] == 4);
  CHECK(j["result"]["p_splitting"] == "split");
  CHECK(j["result"]["a_p"] == "-2");
  CHECK(j["result"]["ordinary"] == true);
  CHECK(j["config"]["seed"] == 57);
}

TEST_CASE("padic-l emits a record for the trivial character") {
  RunResult r = run_cli(std::string(kSmall) + " padic-l");
  CHECK(r.status == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["result"]["records"].size() >= 1);
  Json first = j["result"]["records"][0];
  CHECK(first["character"]["t"] == 0);
  CHECK(first["character"]["s"] == 0);
  CHECK(first["claimed_precision"] == 2);
  CHECK(first["precision_losses"]["embedding"] == 0);
}

TEST_CASE("exit codes") {
  CHECK(run_cli("-q -s bogus=1 field-info").status == 2);
  CHECK(run_cli("-q -s p=7 field-info").status == 2);
  CHECK(run_cli("-q").status != 0);
}

TEST_CASE("cold and warm runs give the same report") {
  fs::path d = fresh_dir("determinism");
  for (const std::string sub : {"lvalue", "symbol"}) {
    std::string args = std::string(kSmall) + " --cache " + d.string() + " " + sub;
    RunResult cold = run_cli(args), warm = run_cli(args);
    INFO(sub);
    CHECK(cold.status == 0);
    CHECK(warm.status == 0);
    CHECK(without_timings(Json::parse(cold.out)) == without_timings(Json::parse(warm.out)));
  }
  LValueCache c(d.string());
  CHECK(c.corrupt_lines() == 0);
  CHECK(c.get("recognized/v1/D=4/p=5/seed=57/phi=canonical/k=0/digits=50/omega=norm/level=0,0").has_value());
  fs::remove_all(d);
}

TEST_CASE("report file output") {
  fs::path d = fresh_dir("report");
  std::string out = (d / "r.json").string();
  RunResult r = run_cli(std::string(kSmall) + " -o " + out + " field-info");
  CHECK(r.status == 0);
  CHECK(r.out.find("subcommand=field-info pass=1 report=") == 0);
  std::ifstream in(out);
  Json j = Json::parse(in);
  CHECK(j["pass"] == true);
  fs::remove_all(d);
}
