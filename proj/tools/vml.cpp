// vml: batch front door for the measure laboratory. Parses descriptor files,
// routes to the library, caches results by (config hash, seed, version), and
// emits JSON/CSV reports.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical/module error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vml/errors.hpp"
#include "vml/harness.hpp"
#include "vml/version.hpp"

namespace {

struct CommonOpts {
  std::string measure_path;
  std::string coeffs_path;
  std::vector<std::string> coeffs_paths;  // realize takes several
  std::string shift_path;
  std::string chi_path;
  std::string model_path;
  std::string functions_path;
  std::string out;
  std::string format = "json";
  std::string windows = "8,32,128";
  std::string grid;
  std::string weights = "1/n^2";
  std::string cylinders = "auto:8";
  std::uint64_t seed = 0;
  int mc = 10000;
  int truncation = 64;
  int count = 1;
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw vml::ConfigError("empty integer list: " + text);
  return out;
}

// "L=12,M=1024" -> (extent, points).
std::pair<double, int> parse_grid(const std::string& text) {
  double extent = 12.0;
  int points = 1024;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw vml::ConfigError("bad --grid entry: " + item);
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "L") extent = std::stod(value);
    else if (key == "M") points = std::stoi(value);
    else throw vml::ConfigError("bad --grid key: " + key);
  }
  return {extent, points};
}

void emit(const vml::RunRecord& record, const CommonOpts& opts) {
  std::string text;
  if (opts.format == "csv") {
    if (!record.payload.contains("csv")) {
      throw vml::ConfigError("--format csv is not available for this command");
    }
    text = record.payload["csv"].get<std::string>();
  } else if (opts.format == "json") {
    text = record.payload.dump(2) + "\n";
  } else {
    throw vml::ConfigError("unknown --format \"" + opts.format + "\"");
  }
  if (opts.out.empty()) {
    std::cout << text;
  } else {
    vml::write_text_file_atomic(opts.out, text);
    std::cerr << (record.from_cache ? "[cache] " : "") << "wrote " << opts.out
              << "\n";
  }
}

void add_io_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "json|csv");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--mc", o.mc, "Monte Carlo sample count");
}

void run_and_emit(const vml::Json& config, const CommonOpts& opts) {
  emit(vml::run(config), opts);
}

void register_sample(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--measure", o->measure_path, "Measure descriptor")->required();
  cmd->add_option("--truncation", o->truncation, "Coordinates per sample");
  cmd->add_option("--count", o->count, "Number of samples");
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "sample"},
                     {"measure", vml::load_json_file(o->measure_path)},
                     {"truncation", o->truncation},
                     {"count", o->count},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_linfun_test(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--measure", o->measure_path, "Product measure descriptor")->required();
  cmd->add_option("--coeffs", o->coeffs_path, "Coefficient descriptor")->required();
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "linfun-test"},
                     {"measure", vml::load_json_file(o->measure_path)},
                     {"coeffs", vml::load_json_file(o->coeffs_path)},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_charfun_eval(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--measure", o->measure_path, "Measure descriptor")->required();
  cmd->add_option("--coeffs", o->coeffs_path, "Coefficient descriptor")->required();
  cmd->add_option("--truncation", o->truncation, "Product truncation");
  o->mc = 0;  // closed form by default
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "charfun-eval"},
                     {"measure", vml::load_json_file(o->measure_path)},
                     {"coeffs", vml::load_json_file(o->coeffs_path)},
                     {"truncation", o->truncation},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_kernel_check(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--measure", o->measure_path, "Gaussian product descriptor")->required();
  cmd->add_option("--shift", o->shift_path, "Shift descriptor")->required();
  cmd->add_option("--truncation", o->truncation, "Density truncation");
  o->mc = 100000;
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "kernel-check"},
                     {"measure", vml::load_json_file(o->measure_path)},
                     {"shift", vml::load_json_file(o->shift_path)},
                     {"truncation", o->truncation},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_free_demo(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--functions", o->functions_path, "Circle function list")->required();
  cmd->add_option("--windows", o->windows, "Comma-separated window list");
  o->mc = 20000;
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "free-demo"},
                     {"functions", vml::load_json_file(o->functions_path)},
                     {"windows", parse_int_list(o->windows)},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_spectral_build(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--chi", o->chi_path, "Positive-definite functional descriptor")->required();
  cmd->add_option("--cylinders", o->cylinders, "auto:K");
  cmd->add_option("--grid", o->grid, "L=12,M=1024");
  cmd->add_option("--weights", o->weights, "Weight rule over n");
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "spectral-build"},
                     {"chi", vml::load_json_file(o->chi_path)},
                     {"cylinders", o->cylinders},
                     {"weights", o->weights},
                     {"seed", o->seed}};
    if (!o->grid.empty()) {
      const auto [extent, points] = parse_grid(o->grid);
      config["grid"] = {{"extent", extent}, {"points", points}};
    }
    run_and_emit(config, *o);
  });
}

void register_spectral_verify(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--model", o->model_path, "Model payload from spectral-build")->required();
  o->mc = 20000;
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json config{{"command", "spectral-verify"},
                     {"model", vml::load_json_file(o->model_path)},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

void register_realize(CLI::App* cmd, std::shared_ptr<CommonOpts> o) {
  cmd->add_option("--measure", o->measure_path, "Measure descriptor")->required();
  cmd->add_option("--coeffs", o->coeffs_paths, "Generating coefficient descriptors")
      ->required()
      ->expected(-1);
  cmd->add_option("--truncation", o->truncation, "Sample truncation");
  o->mc = 4096;
  add_io_flags(cmd, *o);
  cmd->callback([o] {
    vml::Json generating = vml::Json::array();
    for (const auto& path : o->coeffs_paths) {
      generating.push_back(vml::load_json_file(path));
    }
    vml::Json config{{"command", "realize"},
                     {"measure", vml::load_json_file(o->measure_path)},
                     {"generating", generating},
                     {"truncation", o->truncation},
                     {"mc", o->mc},
                     {"seed", o->seed}};
    run_and_emit(config, *o);
  });
}

int run_verify(const std::string& suite, std::uint64_t seed) {
  const vml::SuiteResult result = vml::verify_suite(suite, seed);
  for (const auto& check : result.checks) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << ": "
              << check.detail << "\n";
  }
  std::cout << (result.all_pass ? "suite PASSED" : "suite FAILED") << " ("
            << result.checks.size() << " checks)\n";
  return result.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vml: numerical laboratory for measures on sequence spaces"};
  app.set_version_flag("--version", vml::kVersion);
  app.require_subcommand(1);

  int verify_exit = 0;

  // Hyphenated commands plus two-word aliases (vml charfun eval ...).
  const auto add_both = [&](const char* flat, CLI::App* parent,
                            const char* nested, const char* help,
                            auto registrar) {
    registrar(app.add_subcommand(flat, help), std::make_shared<CommonOpts>());
    if (parent) {
      registrar(parent->add_subcommand(nested, help),
                std::make_shared<CommonOpts>());
    }
  };

  CLI::App* charfun = app.add_subcommand("charfun", "Characteristic functionals");
  charfun->require_subcommand(1);
  CLI::App* kernel = app.add_subcommand("kernel", "Kernel and quasi-invariance");
  kernel->require_subcommand(1);
  CLI::App* free_grp = app.add_subcommand("free", "Free measure demos");
  free_grp->require_subcommand(1);
  CLI::App* spectral = app.add_subcommand("spectral", "Spectral measures");
  spectral->require_subcommand(1);

  add_both("sample", nullptr, "", "Draw truncated samples of a measure",
           [](CLI::App* c, auto o) { register_sample(c, o); });
  add_both("linfun-test", nullptr, "",
           "Three-series test plus the Cauchy-in-measure oracle",
           [](CLI::App* c, auto o) { register_linfun_test(c, o); });
  add_both("charfun-eval", charfun, "eval", "Evaluate xi(f)",
           [](CLI::App* c, auto o) { register_charfun_eval(c, o); });
  add_both("kernel-check", kernel, "check",
           "Cameron-Martin membership, density and quasi-invariance checks",
           [](CLI::App* c, auto o) { register_kernel_check(c, o); });
  add_both("free-demo", free_grp, "demo",
           "Linearization table for circle functions",
           [](CLI::App* c, auto o) { register_free_demo(c, o); });
  add_both("spectral-build", spectral, "build",
           "Build a spectral model from a positive-definite functional",
           [](CLI::App* c, auto o) { register_spectral_build(c, o); });
  add_both("spectral-verify", spectral, "verify",
           "Re-check a persisted spectral model",
           [](CLI::App* c, auto o) { register_spectral_verify(c, o); });
  add_both("realize", nullptr, "", "Pushforward realization in R^infinity",
           [](CLI::App* c, auto o) { register_realize(c, o); });

  {
    auto suite = std::make_shared<std::string>("acceptance");
    auto seed = std::make_shared<std::uint64_t>(7);
    CLI::App* verify = app.add_subcommand("verify", "Run a named check suite");
    verify->add_option("--suite", *suite, "trivial|acceptance|mutation");
    verify->add_option("--seed", *seed, "RNG seed");
    verify->callback(
        [&verify_exit, suite, seed] { verify_exit = run_verify(*suite, *seed); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const vml::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const vml::ModuleError& e) {
    std::cerr << "module error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return verify_exit;
}
