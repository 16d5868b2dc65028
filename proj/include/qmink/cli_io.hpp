#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qmink/models_trajectory.hpp"

namespace qmink {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputFormat { Csv, Json };

/// Everything a command needs, resolved from flags. The *_given bits track
/// which values were set explicitly so presets only fill the gaps.
struct RunConfig {
  std::string command;
  std::optional<std::string> input_path;
  std::optional<std::string> out_path;
  std::string model = "bew";
  BewMode mode = BewMode::ParameterX;
  double x = 0;
  double gamma = 1.0;
  double lo = 0;
  double hi = 1;
  int n = 0;  // 0 = command default
  double tol = kDefaultTol;
  OutputFormat format = OutputFormat::Csv;
  std::string emit;  // fig2..fig7, cone, or empty
  Interpolation interp = Interpolation::Linear;
  bool x_given = false;
  bool mode_given = false;
  bool gamma_given = false;
  bool lo_given = false;
  bool hi_given = false;
  bool n_given = false;
};

/// Full single-state report. The manifold section is absent when the state
/// falls outside the seven-parameter class; spectra and the separability
/// verdict are always present.
struct AnalysisReport {
  ValidationReport validation;
  FanoParams fano;
  std::optional<D7Params> d7;
  std::string d7_note;  // set when d7 is absent
  Spectrum4 spectrum;
  Spectrum4 pt_spectrum;
  PhcVerdict phc;
  struct CmmSection {
    CmmCoords coords;
    CmmCoords coords_pt;
    QuadDistances quad;
    double invariance_residual = 0;
    RegionLabel region;
  };
  std::optional<CmmSection> cmm;
};

AnalysisReport analyze_state(const DensityMatrix4& rho, double tol = kDefaultTol);

/// Parse one state object holding exactly one of "matrix" (4x4 of [re, im]
/// pairs), "fano" or "d7". Returns the raw matrix without positivity
/// enforcement so invalid states can still be inspected and reported.
DensityMatrix4 parse_state_json(const std::string& text);

/// Shortest round-trip decimal text; "inf"/"-inf"/"nan" for specials.
std::string format_double(double v);

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_trajectory(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_speeds(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_crossings(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parse command-line args (program name excluded) and dispatch.
/// Exit codes: 0 success, 1 usage/parse error, 2 validation failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmink
