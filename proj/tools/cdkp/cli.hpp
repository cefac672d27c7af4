#ifndef CDKP_TOOLS_CLI_HPP
#define CDKP_TOOLS_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdkp/grid.hpp"
#include "cdkp/solutions.hpp"
#include "cdkp/verify.hpp"

namespace cdkp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Range {
  double lo = -30.0;
  double hi = 30.0;
  double step = 0.5;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Parses "lo:hi:step".
Range parse_range(const std::string& s);
std::string format_range(const Range& r);

struct RunConfig {
  std::string command;
  double z = 0.5;
  double c = 0.0;
  int k = 1;
  int n = 0;
  /// Set together when the unspecialized three-exponential family is requested.
  std::optional<double> z1, z2, z3;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double t3 = 0.0;
  Range x_range;
  Range y_range;
  std::string field = "u1";
  std::string out;
  std::string outdir = "figures";
  std::vector<std::string> suites;
  std::string convention;

  bool general() const { return z1.has_value(); }
  SolitonParams params() const;
  Grid grid(std::vector<int> ns) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Keys absent from j keep the values already in cfg.
void merge_json(const nlohmann::json& j, RunConfig& cfg);

nlohmann::json report_to_json(const ConformanceReport& rep);

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

/// Writes the CSV grid of one field at one n; returns the number of pole rows.
int write_field_csv(std::ostream& os, const std::string& field, const SolitonParams& p, int n, const Grid& grid,
                    std::ostream& log);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdkp::cli

#endif  // CDKP_TOOLS_CLI_HPP
