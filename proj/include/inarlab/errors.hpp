#pragma once

#include <stdexcept>
#include <string>

namespace inarlab {

/// Failure taxonomy shared by the library and the CLI exit-code mapping.
enum class Errc {
  non_stationary,
  coefficient_out_of_range,
  invalid_pmf,
  unsupported_order,
  invalid_family_parameter,
  truncation_loss,
  series_too_short,
  degenerate_series,
  estimate_out_of_range,
  overdispersion_required,
  optimizer_failure,
  all_zero_series,
  negative_penalty,
  empty_grid,
  empty_input,
  too_many_failures,
  invalid_start,
  invalid_spec,
  invalid_argument,
  csv_parse,
};

constexpr const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::non_stationary: return "NonStationary";
    case Errc::coefficient_out_of_range: return "CoefficientOutOfRange";
    case Errc::invalid_pmf: return "InvalidPmf";
    case Errc::unsupported_order: return "UnsupportedOrder";
    case Errc::invalid_family_parameter: return "InvalidFamilyParameter";
    case Errc::truncation_loss: return "TruncationLoss";
    case Errc::series_too_short: return "SeriesTooShort";
    case Errc::degenerate_series: return "DegenerateSeries";
    case Errc::estimate_out_of_range: return "EstimateOutOfRange";
    case Errc::overdispersion_required: return "OverdispersionRequired";
    case Errc::optimizer_failure: return "OptimizerFailure";
    case Errc::all_zero_series: return "AllZeroSeries";
    case Errc::negative_penalty: return "NegativePenalty";
    case Errc::empty_grid: return "EmptyGrid";
    case Errc::empty_input: return "EmptyInput";
    case Errc::too_many_failures: return "TooManyFailures";
    case Errc::invalid_start: return "InvalidStart";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::csv_parse: return "CsvParse";
  }
  return "UnknownError";
}

/// Exception carrying a typed error code; what() starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace inarlab
