#pragma once

#include <stdexcept>
#include <string>

namespace llk {

enum class ErrorCode {
  domain,
  parameter,
  infeasible,
  size_bound,
  undefined_angle,
  degenerate,
  structural,
  validation,
  lookup,
  no_chain,
  causality,
  stale_chain,
  empty_domain,
  configuration,
  convergence,
  data_quality,
  extraction,
  parse,
  usage,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::size_bound: return "size_bound";
    case ErrorCode::undefined_angle: return "undefined_angle";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::structural: return "structural";
    case ErrorCode::validation: return "validation";
    case ErrorCode::lookup: return "lookup";
    case ErrorCode::no_chain: return "no_chain";
    case ErrorCode::causality: return "causality";
    case ErrorCode::stale_chain: return "stale_chain";
    case ErrorCode::empty_domain: return "empty_domain";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::data_quality: return "data_quality";
    case ErrorCode::extraction: return "extraction";
    case ErrorCode::parse: return "parse";
    case ErrorCode::usage: return "usage";
  }
  return "unknown";
}

// Every failure carries the module that raised it, so reports can print
// codes like "model_space.size_bound".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(module + "." + error_code_name(code) + ": " + message),
        code_(code),
        module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  std::string qualified() const { return module_ + "." + error_code_name(code_); }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace llk
