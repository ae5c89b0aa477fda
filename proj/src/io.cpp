#include "susyband/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "susyband/error.hpp"

namespace susyband {

namespace {

template <class T>
T required(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> optional_key(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return required<T>(doc, key);
}

double finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite");
  return x;
}

}  // namespace

json potential_to_json(const Potential& v) {
  return std::visit(
      [&](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstantPotential>) {
          return {{"kind", "constant"}, {"value", k.value}, {"period", k.period}};
        } else if constexpr (std::is_same_v<K, LamePotential>) {
          return {{"kind", "lame"}, {"n", k.n}, {"m", k.m.value()}};
        } else if constexpr (std::is_same_v<K, ShiftedPotential>) {
          return {{"kind", "shifted"}, {"base", potential_to_json(*k.base)}, {"delta", k.delta}};
        } else {
          json doc{{"kind", "tabulated"}, {"x_lo", k.grid.x_lo}, {"dx", k.grid.dx},
                   {"period", k.period},  {"periodic", k.periodic}, {"values", k.values},
                   {"slopes", k.slopes}};
          if (k.tail) doc["tail"] = potential_to_json(*k.tail);
          if (k.tail_left) doc["tail_left"] = potential_to_json(*k.tail_left);
          return doc;
        }
      },
      v.kind());
}

Potential potential_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("potential must be a JSON object");
  const auto kind = required<std::string>(doc, "kind");
  try {
    if (kind == "lame") {
      return Potential::lame(required<int>(doc, "n"), EllipticParameter(required<double>(doc, "m")));
    }
    if (kind == "constant") {
      return Potential::constant(finite(required<double>(doc, "value"), "value"),
                                 required<double>(doc, "period"));
    }
    if (kind == "shifted") {
      return Potential::shifted(potential_from_json(required<json>(doc, "base")),
                                finite(required<double>(doc, "delta"), "delta"));
    }
    if (kind == "tabulated") {
      TabulatedPotential t;
      const auto values = required<std::vector<double>>(doc, "values");
      t.grid = Grid{required<double>(doc, "x_lo"), required<double>(doc, "dx"), values.size()};
      t.values = values;
      t.slopes = optional_key<std::vector<double>>(doc, "slopes").value_or(std::vector<double>{});
      t.period = required<double>(doc, "period");
      if (doc.contains("tail")) {
        t.tail = std::make_shared<const Potential>(potential_from_json(doc.at("tail")));
      }
      if (doc.contains("tail_left")) {
        t.tail_left = std::make_shared<const Potential>(potential_from_json(doc.at("tail_left")));
      }
      t.periodic = optional_key<bool>(doc, "periodic").value_or(!t.tail);
      return Potential::tabulated(std::move(t));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid ") + kind + " potential: " + e.what());
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

namespace {

SeedRequest seed_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("each seed must be a JSON object");
  SeedRequest r;
  const auto kind = required<std::string>(doc, "kind");
  if (kind == "edge") {
    r.kind = SeedRequestKind::Edge;
    const int index = required<int>(doc, "index");
    if (index < 0) throw ConfigError("edge index must be non-negative");
    r.edge_index = static_cast<std::size_t>(index);
    return r;
  }
  r.epsilon = finite(required<double>(doc, "epsilon"), "epsilon");
  if (kind == "bloch") {
    r.kind = SeedRequestKind::Bloch;
    const auto branch = optional_key<std::string>(doc, "branch").value_or("auto");
    if (branch == "auto") r.branch = BlochBranch::Auto;
    else if (branch == "growing") r.branch = BlochBranch::Growing;
    else if (branch == "decaying") r.branch = BlochBranch::Decaying;
    else throw ConfigError("branch must be auto, growing or decaying");
    return r;
  }
  if (kind == "general") {
    r.kind = SeedRequestKind::General;
    if (!doc.contains("mixing") || doc.at("mixing") == "auto") {
      r.auto_mixing = true;
      return r;
    }
    const auto c = required<std::vector<double>>(doc, "mixing");
    if (c.size() != 2) throw ConfigError("mixing must be \"auto\" or [c_plus, c_minus]");
    r.auto_mixing = false;
    r.c_plus = finite(c[0], "c_plus");
    r.c_minus = finite(c[1], "c_minus");
    if (r.c_plus == 0.0 && r.c_minus == 0.0) throw ConfigError("mixing (0, 0) is not a seed");
    return r;
  }
  throw ConfigError("unknown seed kind '" + kind + "'");
}

std::size_t positive_count(const json& doc, const char* key) {
  const auto v = required<long long>(doc, key);
  if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
  return static_cast<std::size_t>(v);
}

double positive_real(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig c;
  bool have_potential = false;
  if (doc.contains("scenario")) {
    c = builtin_scenario(required<std::string>(doc, "scenario"));
    have_potential = true;
  }
  if (doc.contains("potential")) {
    c.potential = potential_from_json(doc.at("potential"));
    have_potential = true;
  }
  if (!have_potential) throw ConfigError("config needs a 'potential' or a 'scenario'");
  if (auto v = optional_key<std::string>(doc, "name")) c.name = *v;
  if (auto v = optional_key<double>(doc, "e_min")) c.e_min = finite(*v, "e_min");
  if (auto v = optional_key<double>(doc, "e_max")) c.e_max = finite(*v, "e_max");
  if (c.e_min && c.e_max && !(*c.e_max > *c.e_min)) throw ConfigError("e_max must exceed e_min");
  if (auto v = optional_key<int>(doc, "order")) {
    if (*v != 1 && *v != 2) throw ConfigError("order must be 1 or 2");
    c.order = *v;
  }
  if (doc.contains("seeds")) {
    const auto& seeds = doc.at("seeds");
    if (!seeds.is_array()) throw ConfigError("seeds must be an array");
    c.seeds.clear();
    for (const auto& s : seeds) c.seeds.push_back(seed_from_json(s));
  }
  if (auto v = optional_key<double>(doc, "epsilon")) c.epsilon = finite(*v, "epsilon");
  if (doc.contains("periods")) {
    const auto p = positive_count(doc, "periods");
    if (p < 2) throw ConfigError("periods must be at least 2");
    c.seed_options.periods = static_cast<int>(p);
  }
  if (doc.contains("samples_per_period")) {
    const auto s = positive_count(doc, "samples_per_period");
    if (s < 64) throw ConfigError("samples_per_period must be at least 64");
    c.seed_options.samples_per_period = s;
  }
  if (doc.contains("scan_resolution")) c.scan_resolution = positive_count(doc, "scan_resolution");
  if (doc.contains("sweep_points")) {
    c.sweep_points = positive_count(doc, "sweep_points");
    if (c.sweep_points < 2) throw ConfigError("sweep_points must be at least 2");
  }
  if (auto v = optional_key<double>(doc, "rtol")) c.seed_options.integrator.rtol = positive_real(*v, "rtol");
  if (auto v = optional_key<double>(doc, "atol")) c.seed_options.integrator.atol = positive_real(*v, "atol");
  if (auto v = optional_key<double>(doc, "edge_tol")) c.seed_options.edge_tol = positive_real(*v, "edge_tol");
  if (auto v = optional_key<bool>(doc, "shooting")) c.shooting = *v;
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

namespace {

std::optional<double> env_real(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be a positive number, got '" + raw + "'");
  }
  return v;
}

}  // namespace

void apply_environment(ScenarioConfig& config) {
  if (auto v = env_real("SUSYBAND_GRID_PER_PERIOD")) {
    if (*v < 64 || *v != std::floor(*v)) throw ConfigError("SUSYBAND_GRID_PER_PERIOD must be an integer >= 64");
    config.seed_options.samples_per_period = static_cast<std::size_t>(*v);
  }
  if (auto v = env_real("SUSYBAND_PERIODS")) {
    if (*v < 2 || *v != std::floor(*v)) throw ConfigError("SUSYBAND_PERIODS must be an integer >= 2");
    config.seed_options.periods = static_cast<int>(*v);
  }
  if (auto v = env_real("SUSYBAND_RTOL")) config.seed_options.integrator.rtol = *v;
  if (auto v = env_real("SUSYBAND_ATOL")) config.seed_options.integrator.atol = *v;
  if (auto v = env_real("SUSYBAND_EDGE_TOL")) config.seed_options.edge_tol = *v;
}

json band_structure_to_json(const BandStructure& bands) {
  auto edge_doc = [](const BandEdge& e) {
    return json{{"energy", e.energy},
                {"parity", e.parity == EdgeParity::Periodic ? "periodic" : "antiperiodic"}};
  };
  auto bound = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json doc;
  doc["window"] = {bands.window_lo, bands.window_hi};
  doc["edges"] = json::array();
  for (const auto& e : bands.edges) doc["edges"].push_back(edge_doc(e));
  doc["touching"] = json::array();
  for (const auto& e : bands.touching) doc["touching"].push_back(edge_doc(e));
  doc["bands"] = json::array();
  for (const auto& b : bands.bands) doc["bands"].push_back({bound(b.lo), bound(b.hi)});
  doc["gaps"] = json::array();
  for (const auto& g : bands.gaps) doc["gaps"].push_back({bound(g.lo), bound(g.hi)});
  return doc;
}

json invariance_to_json(const InvarianceReport& report) {
  return {{"delta", report.delta},
          {"residual_displacement", report.residual_displacement},
          {"residual_product", report.residual_product},
          {"verdict", report.invariant ? "invariant" : "not_invariant"}};
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::optional<double>>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (const auto& c : cells) text.push_back(c ? format_number(*c) : std::string());
  row(text);
}

}  // namespace susyband
