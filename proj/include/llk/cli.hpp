#pragma once

// Space files, report files and command dispatch behind the `llk` tool.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llk/causal_space.hpp"
#include "llk/model_space.hpp"
#include "llk/warped_product.hpp"

namespace llk {

inline constexpr const char* kToolVersion = "1.0.0";

struct SuspensionRequest {
  WarpingSpec warping;
  bool explicit_interval = false;
  FiniteMetricSpace base;
  std::vector<double> t_grid;
};

struct SpaceFile {
  enum class Kind { finite_causal, suspension_request };
  Kind kind = Kind::finite_causal;
  FiniteCausalSpace space;      // finite_causal
  SuspensionRequest request;    // suspension_request
};

// Throws Error(parse) with a JSON path such as "$.tau[3]" in the message.
SpaceFile parse_space_file(std::string_view bytes);
std::string serialize_space_file(const SpaceFile& f);

// Resamples a suspension request over its existing time span.
void regrid(SpaceFile& f, std::size_t n);
FiniteCausalSpace materialize(const SpaceFile& f, int jobs = 1);

struct CliOptions {
  double tol_exact = 1e-8;
  std::optional<double> tol_disc;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::size_t> grid;
  double step = 0.01;
  bool timings = false;
  bool allow_unsettled = false;
};

struct CommandResult {
  std::string output;  // report JSON, space JSON or CSV
  int exit_code = 0;   // 0 pass, 1 checked failure, 2 usage or parse error
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "curvature", "myers", "subdivide",
                                              "split",    "suspend",   "geodesics"};
  return names;
}

CommandResult run_command(const std::string& command, const std::string& input, const CliOptions& opt);

std::vector<GeodesicParams> parse_geodesic_request(std::string_view bytes);
std::string emit_geodesic_table(const std::vector<GeodesicParams>& curves, double step);

std::string sha256_hex(std::string_view bytes);

}  // namespace llk
