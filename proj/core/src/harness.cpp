#include "vml/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vml/errors.hpp"
#include "vml/version.hpp"

namespace vml {

namespace {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::vector<int> int_list(const Json& j, const char* key,
                          std::vector<int> fallback) {
  if (!j.contains(key)) return fallback;
  return j[key].get<std::vector<int>>();
}

Json payload_sample(const Json& config) {
  const Measure m = measure_from_json(config.at("measure"));
  const int truncation = config.value("truncation", 8);
  const int count = config.value("count", 1);
  const auto seed = config.value("seed", std::uint64_t{0});
  Json rows = Json::array();
  for_each_sample(m, truncation, count, seed, 0, [&](const TruncatedSample& x) {
    rows.push_back(x.values);
  });
  return {{"truncation", truncation}, {"count", count}, {"samples", rows}};
}

Json payload_linfun_test(const Json& config) {
  const Measure m = measure_from_json(config.at("measure"));
  const auto* prod = as_product(m);
  if (!prod) throw ConfigError("linfun-test: needs a product measure");
  const CoeffSeq f = coeffs_from_json(config.at("coeffs"));
  const auto seed = config.value("seed", std::uint64_t{0});

  ConvergenceReport report = three_series_test(
      f, *prod, config.value("trunc_level", 1.0), config.value("n_probe", 10000),
      config.value("tol", 1e-3));
  if (config.value("oracle", true)) {
    report.cauchy_stats = cauchy_in_measure_oracle(
        f, m, config.value("eps", 0.05),
        int_list(config, "n_grid", {16, 32, 64, 128, 256, 512, 1024}),
        config.value("mc", 10000), seed);
  }
  return to_json(report);
}

Json payload_charfun_eval(const Json& config) {
  const Measure m = measure_from_json(config.at("measure"));
  const CoeffSeq f = coeffs_from_json(config.at("coeffs"));
  const CharFunEstimate est =
      char_functional(m, f, config.value("truncation", 64),
                      config.value("mc", 0), config.value("seed", std::uint64_t{0}));
  return to_json(est);
}

Json payload_kernel_check(const Json& config) {
  const Measure m = measure_from_json(config.at("measure"));
  const auto* prod = as_product(m);
  if (!prod) throw ConfigError("kernel-check: needs a gaussian product measure");
  const ShiftVector h = shift_from_json(config.at("shift"));
  const int mc = config.value("mc", 100000);
  const auto seed = config.value("seed", std::uint64_t{0});
  const int truncation = config.value("truncation", 128);

  const CameronMartinReport cm =
      cameron_martin_norm(h, *prod, config.value("n_probe", 10000));
  const HellingerReport hell =
      hellinger_dichotomy(h, *prod, int_list(config, "n_grid", {10, 100, 1000, 10000}));

  DensityModel model{h, *prod, truncation};

  // E[rho] = 1, the density normalization identity.
  double sum = 0.0, sum2 = 0.0;
  for_each_sample(m, truncation, mc, seed, 0, [&](const TruncatedSample& x) {
    const double rho = translate_density(model, x);
    sum += rho;
    sum2 += rho * rho;
  });
  const double mean_rho = sum / mc;
  const double se_rho =
      std::sqrt(std::max(0.0, (sum2 / mc - mean_rho * mean_rho) / mc));

  const double tol = config.value("tol", 1e-3);
  Json qi = Json::array();
  const std::vector<std::pair<std::string, Functional>> test_set = {
      {"1", [](const TruncatedSample&) { return 1.0; }},
      {"x1", [](const TruncatedSample& x) { return x.values[0]; }},
      {"x1*x2", [](const TruncatedSample& x) { return x.values[0] * x.values[1]; }},
      {"ind(x1>0)", [](const TruncatedSample& x) { return x.values[0] > 0.0 ? 1.0 : 0.0; }},
  };
  for (const auto& [name, g] : test_set) {
    const QiReport r = quasi_invariance_check(model, g, mc, seed + 1, tol);
    Json entry = to_json(r);
    entry["g"] = name;
    qi.push_back(entry);
  }

  Json out = to_json(cm);
  out["hellinger"] = to_json(hell);
  out["rho_mean"] = {{"value", mean_rho},
                     {"std_error", se_rho},
                     {"pass", std::abs(mean_rho - 1.0) <= 3.0 * se_rho}};
  out["qi_tests"] = qi;
  return out;
}

Json payload_free_demo(const Json& config) {
  if (!config.contains("functions") || !config["functions"].is_array()) {
    throw ConfigError("free-demo: needs a \"functions\" array");
  }
  std::vector<CircleFunction> family;
  for (const auto& j : config["functions"]) {
    family.push_back(circle_function_from_json(j));
  }
  const FreenessTable table =
      freeness_demo(family, int_list(config, "windows", {8, 32, 128}),
                    config.value("mc", 20000), config.value("seed", std::uint64_t{0}));
  Json out = to_json(table);
  out["csv"] = table.to_csv();
  return out;
}

std::vector<std::vector<int>> cylinders_from_config(const Json& config) {
  if (config.contains("cylinders") && config["cylinders"].is_string()) {
    const std::string spec = config["cylinders"].get<std::string>();
    if (spec.rfind("auto:", 0) == 0) {
      return auto_index_sets(std::stoi(spec.substr(5)));
    }
    throw ConfigError("spectral-build: unknown cylinders spec \"" + spec + "\"");
  }
  if (config.contains("cylinders")) {
    std::vector<std::vector<int>> sets;
    for (const auto& s : config["cylinders"]) {
      sets.push_back(s.get<std::vector<int>>());
    }
    return sets;
  }
  return auto_index_sets(8);
}

Json payload_spectral_build(const Json& config) {
  const PdFunctional chi = chi_from_json(config.at("chi"));
  GridSpec grid;
  if (config.contains("grid")) {
    grid.extent = config["grid"].value("extent", 12.0);
    grid.points = config["grid"].value("points", 1024);
  }
  const WeightRule weights =
      weight_rule_from_string(config.value("weights", std::string("1/n^2")));
  const SpectralModel model =
      build_spectral_model(chi, cylinders_from_config(config), grid, weights);
  return spectral_model_to_json(model, config.at("chi"));
}

Json payload_spectral_verify(const Json& config) {
  if (!config.contains("model")) {
    throw ConfigError("spectral-verify: needs the \"model\" payload");
  }
  const SpectralModel model = spectral_model_from_json(config["model"]);
  const int mc = config.value("mc", 20000);
  const auto seed = config.value("seed", std::uint64_t{0});

  Json out;
  out["consistency"] = {
      {"max_discrepancy", model.consistency.max_discrepancy},
      {"pairs_checked", model.consistency.pairs_checked}};

  if (model.sampleable()) {
    const CounterRng rng(seed, 17);
    Json recon = Json::array();
    bool all_pass = true;
    for (int trial = 0; trial < config.value("spot_checks", 10); ++trial) {
      std::vector<double> g(4);
      for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = 2.0 * rng.uniform(k + 1, static_cast<std::uint64_t>(trial)) - 1.0;
      }
      const CharFunEstimate est =
          reconstruct_chi(model, g, mc, seed + static_cast<std::uint64_t>(trial));
      const std::complex<double> expected = model.chi(g);
      const bool pass =
          std::abs(est.value - expected) <= 3.0 * est.std_error + 1e-12;
      all_pass = all_pass && pass;
      recon.push_back({{"re", est.value.real()},
                       {"im", est.value.imag()},
                       {"expected_re", expected.real()},
                       {"expected_im", expected.imag()},
                       {"stderr", est.std_error},
                       {"pass", pass}});
    }
    out["reconstruct"] = recon;
    out["reconstruct_pass"] = all_pass;
    out["tightness"] =
        to_json(sazonov_diagnostic(model, int_list(config, "n_grid", {16, 256, 1024}),
                                   config.value("tightness_mc", 2048), seed));
  }
  return out;
}

Json payload_realize(const Json& config) {
  const Measure m = measure_from_json(config.at("measure"));
  if (!config.contains("generating") || !config["generating"].is_array()) {
    throw ConfigError("realize: needs a \"generating\" array of coefficient descriptors");
  }
  std::vector<CoeffSeq> generating;
  for (const auto& j : config["generating"]) {
    generating.push_back(coeffs_from_json(j));
  }
  const RealizeReport report =
      realize_in_Rinfty(m, generating, config.value("mc", 4096),
                        config.value("seed", std::uint64_t{0}),
                        config.value("truncation", 256));
  return to_json(report);
}

}  // namespace

std::string config_hash(const Json& config) {
  return hex64(fnv1a64(config.dump()));
}

std::string default_cache_dir() {
  if (const char* env = std::getenv("VML_CACHE_DIR"); env && *env) {
    return env;
  }
  return ".vml-cache";
}

RunRecord run(const Json& config, const std::string& cache_dir) {
  if (!config.contains("command") || !config["command"].is_string()) {
    throw ConfigError("config: missing \"command\"");
  }
  const std::string command = config["command"].get<std::string>();
  const auto seed = config.value("seed", std::uint64_t{0});

  RunRecord record;
  record.config_hash = config_hash(config);
  record.seed = seed;
  record.version = kVersion;

  const std::filesystem::path dir(cache_dir.empty() ? default_cache_dir()
                                                    : cache_dir);
  const std::filesystem::path entry =
      dir / (record.config_hash + "-" + std::to_string(seed) + ".json");

  if (std::filesystem::exists(entry)) {
    const Json cached = load_json_file(entry.string());
    if (cached.value("version", "") == kVersion &&
        cached.value("config_hash", "") == record.config_hash) {
      record.payload = cached.at("payload");
      record.created = cached.value("created", "");
      record.from_cache = true;
      return record;
    }
  }

  if (command == "sample") {
    record.payload = payload_sample(config);
  } else if (command == "linfun-test") {
    record.payload = payload_linfun_test(config);
  } else if (command == "charfun-eval") {
    record.payload = payload_charfun_eval(config);
  } else if (command == "kernel-check") {
    record.payload = payload_kernel_check(config);
  } else if (command == "free-demo") {
    record.payload = payload_free_demo(config);
  } else if (command == "spectral-build") {
    record.payload = payload_spectral_build(config);
  } else if (command == "spectral-verify") {
    record.payload = payload_spectral_verify(config);
  } else if (command == "realize") {
    record.payload = payload_realize(config);
  } else {
    throw ConfigError("config: unknown command \"" + command + "\"");
  }

  const auto now = std::chrono::system_clock::now();
  record.created = std::to_string(
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count());

  const Json envelope{{"config_hash", record.config_hash},
                      {"seed", record.seed},
                      {"version", record.version},
                      {"created", record.created},
                      {"payload", record.payload}};
  write_text_file_atomic(entry.string(), envelope.dump(2) + "\n");
  return record;
}

}  // namespace vml
