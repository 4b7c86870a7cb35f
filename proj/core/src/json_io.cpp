#include "vml/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "vml/base64.hpp"
#include "vml/errors.hpp"

namespace vml {

namespace {

void require_vars_subset(const Expr& e, std::initializer_list<const char*> allowed,
                         const std::string& field) {
  for (const auto& v : e.variables()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (v == a) ok = true;
    }
    if (!ok) {
      throw ConfigError(field + ": unexpected variable \"" + v + "\" in \"" +
                        e.source() + "\"");
    }
  }
}

Expr parse_rule(const Json& j, const std::string& key,
                std::initializer_list<const char*> allowed) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ConfigError("descriptor: missing string field \"" + key + "\"");
  }
  Expr e = Expr::parse(j[key].get<std::string>());
  require_vars_subset(e, allowed, key);
  return e;
}

std::function<CoordinateLaw(double)> law_rule_from_json(const Json& law) {
  if (!law.contains("type")) throw ConfigError("law: missing \"type\"");
  const std::string type = law["type"].get<std::string>();

  if (type == "gaussian") {
    if (law.contains("sigma")) {
      const double sigma = law["sigma"].get<double>();
      return [sigma](double) { return CoordinateLaw::make_gaussian(sigma); };
    }
    Expr rule = parse_rule(law, "sigma_rule", {"n"});
    return [rule](double n) { return CoordinateLaw::make_gaussian(rule(n)); };
  }
  if (type == "rademacher") {
    return [](double) { return CoordinateLaw::make_rademacher(); };
  }
  if (type == "uniform") {
    if (law.contains("half_width")) {
      const double w = law["half_width"].get<double>();
      return [w](double) { return CoordinateLaw::make_uniform(w); };
    }
    Expr rule = parse_rule(law, "half_width_rule", {"n"});
    return [rule](double n) { return CoordinateLaw::make_uniform(rule(n)); };
  }
  if (type == "custom") {
    Expr rule = parse_rule(law, "quantile_rule", {"u", "n"});
    return [rule](double n) {
      return CoordinateLaw::make_custom([rule, n](double u) {
        return rule.eval({{"u", u}, {"n", n}});
      });
    };
  }
  throw ConfigError("law: unknown type \"" + type + "\"");
}

TailMeta tail_meta_from_json(const Json& j) {
  TailMeta meta;
  if (j.contains("tail_sq_bound") && !j["tail_sq_bound"].is_null()) {
    Expr e = parse_rule(j, "tail_sq_bound", {"n"});
    meta.tail_sq_bound = TailBound::from_expr(e);
  }
  if (j.contains("sq_partial_lower") && !j["sq_partial_lower"].is_null()) {
    Expr e = parse_rule(j, "sq_partial_lower", {"n"});
    meta.sq_partial_lower = TailBound::from_expr(e);
  }
  return meta;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ModuleError("cannot write file: " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, target);
}

Measure measure_from_json(const Json& j) {
  if (!j.contains("kind")) throw ConfigError("measure: missing \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  const std::string label = j.value("label", kind);

  if (kind == "product") {
    if (!j.contains("law")) throw ConfigError("measure: product needs \"law\"");
    return ProductMeasure{law_rule_from_json(j["law"]), label};
  }
  if (kind == "circle") {
    CircleMeasure c;
    c.window = j.value("window", 1);
    if (c.window < 0) throw ConfigError("measure: circle window must be >= 0");
    const std::string conv = j.value("convention", "complex");
    if (conv == "complex") {
      c.convention = CircleConvention::complex_native;
    } else if (conv == "pairs") {
      c.convention = CircleConvention::complex_pairs;
    } else {
      throw ConfigError("measure: unknown circle convention \"" + conv + "\"");
    }
    c.label = label;
    return c;
  }
  throw ConfigError("measure: unknown kind \"" + kind + "\"");
}

CoeffSeq coeffs_from_json(const Json& j) {
  if (j.contains("basis")) {
    return CoeffSeq::basis(j["basis"].get<int>(), j.value("scale", 1.0));
  }
  Expr rule = parse_rule(j, "rule", {"n"});
  CoeffSeq f = CoeffSeq::from_expr(rule, j.value("label", rule.source()),
                                   tail_meta_from_json(j));
  return f;
}

ShiftVector shift_from_json(const Json& j) {
  if (j.contains("basis")) {
    return ShiftVector::basis(j["basis"].get<int>(), j.value("scale", 1.0));
  }
  Expr rule = parse_rule(j, "rule", {"n"});
  return ShiftVector::from_expr(rule, j.value("label", rule.source()),
                                tail_meta_from_json(j));
}

PdFunctional chi_from_json(const Json& j) {
  // Accept both {"form":"gaussian","scale":s} and {"gaussian":{"scale":s}}.
  if (j.contains("gaussian")) {
    return PdFunctional::gaussian(j["gaussian"].value("scale", 1.0));
  }
  if (j.contains("product")) {
    Json inner = j["product"];
    inner["form"] = "product";
    return chi_from_json(inner);
  }
  if (j.contains("custom")) {
    Json inner = j["custom"];
    inner["form"] = "custom";
    return chi_from_json(inner);
  }

  const std::string form = j.value("form", "");
  if (form == "gaussian") {
    return PdFunctional::gaussian(j.value("scale", 1.0));
  }
  if (form == "product") {
    if (j.contains("law")) {
      return PdFunctional::product(law_rule_from_json(j["law"]),
                                   j.value("label", std::string("product")));
    }
    if (j.contains("cf_rule")) {
      Expr rule = parse_rule(j, "cf_rule", {"t", "n"});
      auto evaluator = [rule](std::span<const double> g) {
        std::complex<double> acc{1.0, 0.0};
        for (std::size_t k = 0; k < g.size(); ++k) {
          acc *= rule.eval({{"t", g[k]}, {"n", static_cast<double>(k) + 1.0}});
        }
        return acc;
      };
      return PdFunctional::custom(evaluator, "product(" + rule.source() + ")");
    }
    throw ConfigError("chi: product form needs \"law\" or \"cf_rule\"");
  }
  if (form == "custom") {
    if (!j.contains("tabulated")) {
      throw ConfigError("chi: custom form needs \"tabulated\" dual-grid values");
    }
    const Json& tab = j["tabulated"];
    const double extent = tab.value("extent", 0.0);
    const int points = tab.value("points", 0);
    if (!(extent > 0.0) || points < 2) {
      throw ConfigError("chi: tabulated grid needs extent > 0 and points >= 2");
    }
    std::vector<double> re = decode_doubles(tab.value("re_b64", std::string()));
    std::vector<double> im = decode_doubles(tab.value("im_b64", std::string()));
    if (re.size() != static_cast<std::size_t>(points) || im.size() != re.size()) {
      throw ConfigError("chi: tabulated arrays must have \"points\" entries");
    }
    // Product of per-coordinate tabulated cfs, linearly interpolated on the
    // dual grid, zero beyond it.
    auto cf1 = [extent, points, re = std::move(re),
                im = std::move(im)](double t) -> std::complex<double> {
      const double dt = 2.0 * extent / static_cast<double>(points);
      const double pos = (t + extent) / dt;
      if (pos < 0.0 || pos > static_cast<double>(points - 1)) return {};
      const auto i0 = static_cast<std::size_t>(pos);
      const std::size_t i1 = std::min<std::size_t>(i0 + 1, re.size() - 1);
      const double w = pos - std::floor(pos);
      return {(1.0 - w) * re[i0] + w * re[i1],
              (1.0 - w) * im[i0] + w * im[i1]};
    };
    auto evaluator = [cf1](std::span<const double> g) {
      std::complex<double> acc{1.0, 0.0};
      for (const double v : g) acc *= cf1(v);
      return acc;
    };
    return PdFunctional::custom(evaluator, j.value("label", std::string("tabulated")));
  }
  throw ConfigError("chi: unknown form");
}

CircleFunction circle_function_from_json(const Json& j) {
  const std::string name = j.value("name", "");
  if (name == "const") return CircleFunction::constant(j.value("value", 1.0));
  if (name == "harmonic") return CircleFunction::harmonic(j.value("m", 1));
  if (name == "square_wave") return CircleFunction::square_wave();
  if (name == "triangle_wave") return CircleFunction::triangle_wave();
  if (name == "tabulated") {
    if (!j.contains("samples") || !j["samples"].is_array()) {
      throw ConfigError("circle function: tabulated needs \"samples\"");
    }
    return CircleFunction::tabulated(j["samples"].get<std::vector<double>>(),
                                     j.value("label", std::string("tabulated")));
  }
  throw ConfigError("circle function: unknown name \"" + name + "\"");
}

WeightRule weight_rule_from_string(const std::string& source) {
  Expr e = Expr::parse(source);
  require_vars_subset(e, {"n"}, "weights");
  WeightRule w;
  w.fn = [e](double n) { return e(n); };
  w.source = source;
  return w;
}

Json to_json(const ConvergenceReport& r) {
  Json series = Json::array();
  for (const auto& s : r.series) {
    series.push_back({{"name", s.name},
                      {"partial_sum", s.partial_sum},
                      {"tail_bound", std::isfinite(s.tail_bound)
                                         ? Json(s.tail_bound)
                                         : Json("unbounded")}});
  }
  Json cauchy = Json::array();
  for (const auto& c : r.cauchy_stats) {
    cauchy.push_back({{"n_lo", c.n_lo},
                      {"n_hi", c.n_hi},
                      {"eps", c.eps},
                      {"p_hat", c.p_hat},
                      {"std_error", c.std_error}});
  }
  return {{"verdict", to_string(r.verdict)},
          {"reason", r.reason},
          {"series", series},
          {"cauchy", cauchy}};
}

Json to_json(const CharFunEstimate& e) {
  Json j{{"re", e.value.real()},
         {"im", e.value.imag()},
         {"stderr", e.std_error},
         {"method", to_string(e.method)}};
  if (e.n_samples > 0) j["n_samples"] = e.n_samples;
  if (!e.tail_note.empty()) {
    j["tail_note"] = e.tail_note;
    j["tail_band"] =
        std::isfinite(e.tail_band) ? Json(e.tail_band) : Json("unbounded");
  }
  return j;
}

Json to_json(const PsdReport& r) {
  return {{"min_eigenvalue", r.min_eigenvalue},
          {"propagated_std_error", r.propagated_std_error},
          {"hermitian_defect", r.hermitian_defect},
          {"psd", r.psd},
          {"size", r.gram.rows()}};
}

Json to_json(const CameronMartinReport& r) {
  return {{"norm_sq", r.partial_norm_sq},
          {"tail_bound", std::isfinite(r.tail_bound) ? Json(r.tail_bound)
                                                     : Json("unbounded")},
          {"membership", to_string(r.membership)},
          {"reason", r.reason}};
}

Json to_json(const HellingerReport& r) {
  Json grid = Json::array();
  for (const auto& [n, h] : r.partial_products) {
    grid.push_back({{"n", n}, {"H", h}});
  }
  Json j{{"partial_products", grid}, {"note", r.note}};
  switch (r.limit) {
    case HellingerLimit::positive:
      j["limit"] = "positive";
      j["limit_lower_bound"] = r.limit_lower_bound;
      break;
    case HellingerLimit::zero:
      j["limit"] = "zero";
      j["zero_witness_n"] = r.zero_witness_n;
      break;
    case HellingerLimit::undecided:
      j["limit"] = "undecided";
      break;
  }
  return j;
}

Json to_json(const QiReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"delta", r.delta},
          {"std_error", r.std_error},
          {"pass", r.pass}};
}

Json to_json(const ReconstructionReport& r) {
  return {{"window", r.window},
          {"l2_error", r.l2_error},
          {"l2_error_std_error", r.l2_error_std_error},
          {"in_measure_error", r.in_measure_error},
          {"parseval_tail", r.parseval_tail}};
}

Json to_json(const FreenessTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"label", r.label},
                    {"window", r.window},
                    {"l2_error", r.l2_error},
                    {"in_measure_error", r.in_measure_error},
                    {"parseval_tail", r.parseval_tail}});
  }
  return {{"rows", rows}};
}

Json to_json(const TightnessReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(
        {{"n", row.n}, {"q50", row.q50}, {"q90", row.q90}, {"q99", row.q99}});
  }
  Json j{{"rows", rows},
         {"verdict", to_string(r.verdict)},
         {"last_relative_increment", r.last_relative_increment},
         {"note", r.note}};
  if (r.analytic_partial) j["analytic_partial"] = *r.analytic_partial;
  return j;
}

Json to_json(const ConsistencyReport& r) {
  return {{"max_discrepancy", r.max_discrepancy},
          {"grid_points", r.grid_points},
          {"tol", r.tol},
          {"pass", r.pass}};
}

Json to_json(const RealizeReport& r) {
  Json verdicts = Json::array();
  for (const auto v : r.verdicts) verdicts.push_back(to_string(v));
  return {{"verdicts", verdicts},
          {"separation", r.separation},
          {"separation_std_error", r.separation_std_error},
          {"max_linearity_violation", r.max_linearity_violation},
          {"truncation", r.truncation}};
}

Json spectral_model_to_json(const SpectralModel& model,
                            const Json& chi_descriptor) {
  Json sets = Json::array();
  for (const auto& s : model.index_sets) sets.push_back(s);
  Json gridded = Json::array();
  for (const auto& g : model.gridded) {
    gridded.push_back({{"coords", g.coords},
                       {"extent", g.extent},
                       {"points", g.points},
                       {"values_b64", encode_doubles(g.values)},
                       {"negativity_mass", g.negativity_mass},
                       {"normalization_defect", g.normalization_defect}});
  }
  return {{"chi", chi_descriptor},
          {"weights", model.weights.source},
          {"grid", {{"extent", model.grid.extent}, {"points", model.grid.points}}},
          {"index_sets", sets},
          {"gridded", gridded},
          {"consistency",
           {{"max_discrepancy", model.consistency.max_discrepancy},
            {"pairs_checked", model.consistency.pairs_checked}}}};
}

SpectralModel spectral_model_from_json(const Json& j) {
  if (!j.contains("chi")) throw ConfigError("model: missing \"chi\" descriptor");
  const PdFunctional chi = chi_from_json(j["chi"]);
  const WeightRule weights =
      weight_rule_from_string(j.value("weights", std::string("1/n^2")));
  GridSpec grid;
  grid.extent = j["grid"].value("extent", 12.0);
  grid.points = j["grid"].value("points", 1024);
  std::vector<std::vector<int>> sets;
  for (const auto& s : j["index_sets"]) {
    sets.push_back(s.get<std::vector<int>>());
  }
  // Rebuild (and thereby re-check) the model from the stored descriptor.
  return build_spectral_model(chi, sets, grid, weights);
}

}  // namespace vml
