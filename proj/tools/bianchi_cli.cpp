// bianchi_cli: stage runner for the base-change p-adic L-function pipeline.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bianchi/cli.hpp"

using namespace bianchi;

int main(int argc, char** argv) {
  CLI::App app{"p-adic L-functions of base-change Bianchi forms"};
  std::string config_path, cache_dir, output;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "config file with 'key = value' lines")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "override a config key, as key=value (repeatable)");
  app.add_option("--cache", cache_dir, "cache directory (overrides cache_dir)");
  app.add_option("-o,--output", output, "report path (overrides output)");
  app.add_flag("-q,--quiet", quiet, "suppress key=value log lines on stderr");
  app.require_subcommand(1, 1);
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"field-info", "field, primes above p and ordinarity"},
      {"char-table", "finite-order characters of the selected set with Gauss sums"},
      {"lvalue", "complex L-values at s = 1 and the two factorizations"},
      {"symbol", "symbol table by L-value inversion, round trips and eigen equations"},
      {"lift", "overconvergent eigenlift and its checks"},
      {"padic-l", "p-adic L-values at the selected characters"},
      {"verify-interp", "interpolation check"},
      {"verify-katz", "Katz factorization check"},
      {"verify-all", "every check above"}};
  for (auto& [name, help] : subs) app.add_subcommand(name, help);
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  LogSink log;
  if (!quiet) log = [](const std::string& line) { std::cerr << line << '\n'; };
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    for (auto& o : overrides) text += "\n" + o;
    PipelineConfig cfg = parse_config(text);
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (!output.empty()) cfg.output = output;
    Pipeline pipe(cfg, log);
    bool ok = false;
    Json report = pipe.run(sub, ok);
    if (!cfg.output.empty()) {
      write_report(report, cfg.output);
      std::cout << "subcommand=" << sub << " pass=" << (ok ? 1 : 0) << " report=" << cfg.output << '\n';
    } else {
      std::cout << report.dump(2) << '\n';
    }
    return ok ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error=config message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error=stage message=\"" << e.what() << "\"\n";
    return 3;
  }
}
