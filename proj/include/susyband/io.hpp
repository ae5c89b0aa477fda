#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "susyband/analysis.hpp"
#include "susyband/potential.hpp"
#include "susyband/scenario.hpp"

namespace susyband {

using nlohmann::json;

// Potential documents:
//   {"kind":"lame","n":1,"m":0.5}
//   {"kind":"constant","value":0,"period":2}
//   {"kind":"shifted","base":{...},"delta":0.3}
//   {"kind":"tabulated","x_lo":..,"dx":..,"period":..,"values":[..],"slopes":[..],
//    "periodic":false,"tail":{...},"tail_left":{...}}
// Malformed documents raise ConfigError.
json potential_to_json(const Potential& v);
Potential potential_from_json(const json& doc);

// Scenario configuration. A "scenario" key starts from the built-in of that name; the other keys
// override it:
//   potential, e_min, e_max, order, epsilon, periods, samples_per_period, scan_resolution,
//   sweep_points, rtol, atol, edge_tol, shooting,
//   seeds: [{"kind":"edge","index":0} | {"kind":"bloch","epsilon":..,"branch":"auto"}
//           | {"kind":"general","epsilon":..,"mixing":"auto"|[c_plus, c_minus]}]
ScenarioConfig config_from_json(const json& doc);
ScenarioConfig load_config(const std::string& path);

// SUSYBAND_GRID_PER_PERIOD, SUSYBAND_PERIODS, SUSYBAND_RTOL, SUSYBAND_ATOL, SUSYBAND_EDGE_TOL.
void apply_environment(ScenarioConfig& config);

json band_structure_to_json(const BandStructure& bands);
json invariance_to_json(const InvarianceReport& report);

// Comma-separated rows with a header; numbers as %.12g, absent cells empty.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::optional<double>>& cells);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

std::string format_number(double x);

}  // namespace susyband
