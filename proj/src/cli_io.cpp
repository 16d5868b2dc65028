#include "qmink/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace qmink {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  v += 0.0;  // fold -0 into 0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

/// JSON value for a double; non-finite values become sentinel strings so
/// the document mirrors the CSV text.
json jnum(double v) {
  if (std::isfinite(v)) return v + 0.0;
  return format_double(v);
}

json jspeed(double v, bool degenerate) { return degenerate ? json("inf") : jnum(v); }
json jqspeed(double v, bool degenerate) { return degenerate ? json("-inf") : jnum(v); }

std::string speed_text(double v, bool degenerate) {
  return degenerate ? "inf" : format_double(v);
}
std::string qspeed_text(double v, bool degenerate) {
  return degenerate ? "-inf" : format_double(v);
}

const char* mode_name(BewMode m) {
  switch (m) {
    case BewMode::ParameterX: return "parameter_x";
    case BewMode::Decay: return "decay";
    case BewMode::Growth: return "growth";
  }
  return "?";
}

const char* interp_name(Interpolation i) {
  return i == Interpolation::Linear ? "linear" : "cubic-monotone";
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + " must be a number");
  return j.get<double>();
}

Eigen::Vector3d get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(path + " must be an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = get_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

DensityMatrix4 state_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("state JSON must be an object");
  const int present = static_cast<int>(j.contains("matrix")) +
                      static_cast<int>(j.contains("fano")) +
                      static_cast<int>(j.contains("d7"));
  if (present != 1)
    throw ParseError(
        "state object must hold exactly one of \"matrix\", \"fano\", \"d7\"");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "matrix" && key != "fano" && key != "d7")
      throw ParseError("unknown key \"" + key + "\" in state object");
  }

  if (j.contains("matrix")) {
    const json& m = j["matrix"];
    if (!m.is_array() || m.size() != 4) throw ParseError("\"matrix\" must be a 4x4 array");
    DensityMatrix4 rho;
    for (int r = 0; r < 4; ++r) {
      const json& row = m[r];
      if (!row.is_array() || row.size() != 4)
        throw ParseError("matrix[" + std::to_string(r) + "] must have 4 entries");
      for (int c = 0; c < 4; ++c) {
        const json& e = row[c];
        const std::string path =
            "matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]";
        if (!e.is_array() || e.size() != 2)
          throw ParseError(path + " must be a [re, im] pair");
        rho.m(r, c) = Complex(get_number(e[0], path + "[0]"), get_number(e[1], path + "[1]"));
      }
    }
    return rho;
  }

  if (j.contains("fano")) {
    const json& f = j["fano"];
    if (!f.is_object()) throw ParseError("\"fano\" must be an object");
    for (const char* key : {"p1", "p2", "m"})
      if (!f.contains(key)) throw ParseError(std::string("fano.") + key + " is missing");
    FanoParams fp;
    fp.p1 = get_vec3(f["p1"], "fano.p1");
    fp.p2 = get_vec3(f["p2"], "fano.p2");
    const json& m = f["m"];
    if (!m.is_array() || m.size() != 3) throw ParseError("fano.m must be a 3x3 array");
    for (int r = 0; r < 3; ++r) {
      const json& row = m[r];
      if (!row.is_array() || row.size() != 3)
        throw ParseError("fano.m[" + std::to_string(r) + "] must have 3 entries");
      for (int c = 0; c < 3; ++c)
        fp.m(r, c) = get_number(row[c], "fano.m[" + std::to_string(r) + "][" +
                                            std::to_string(c) + "]");
    }
    return DensityMatrix4{fano_matrix(fp)};
  }

  const json& d = j["d7"];
  if (!d.is_object()) throw ParseError("\"d7\" must be an object");
  static constexpr const char* kKeys[] = {"p1z", "p2z", "mxx", "myy", "mxy", "myx", "mzz"};
  for (const auto& [key, value] : d.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kKeys) known |= key == k;
    if (!known) throw ParseError("unknown key \"" + key + "\" in d7 object");
  }
  D7Params dp;
  double* fields[] = {&dp.p1z, &dp.p2z, &dp.mxx, &dp.myy, &dp.mxy, &dp.myx, &dp.mzz};
  for (int i = 0; i < 7; ++i) {
    if (!d.contains(kKeys[i])) throw ParseError(std::string("d7.") + kKeys[i] + " is missing");
    *fields[i] = get_number(d[kKeys[i]], std::string("d7.") + kKeys[i]);
  }
  return DensityMatrix4{fano_matrix(embed_d7(dp))};
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// State input for validate/analyze: a JSON file or an inline bew point.
DensityMatrix4 load_state(const RunConfig& cfg) {
  if (cfg.input_path && cfg.x_given)
    throw ParseError("give either --input FILE or --model bew --x X, not both");
  if (cfg.input_path) return parse_state_json(slurp_file(*cfg.input_path));
  if (cfg.x_given) {
    if (cfg.model != "bew") throw ParseError("unknown model: " + cfg.model);
    return DensityMatrix4{fano_matrix(embed_d7(bew_d7(cfg.x)))};
  }
  throw ParseError("no state input: provide --input FILE or --model bew --x X");
}

/// Output sink: --out file or the provided stream.
class Sink {
 public:
  Sink(const RunConfig& cfg, std::ostream& fallback) {
    if (cfg.out_path) {
      file_.open(*cfg.out_path, std::ios::binary);
      if (!file_) throw ParseError("cannot open output file: " + *cfg.out_path);
      os_ = &file_;
    } else {
      os_ = &fallback;
    }
  }
  std::ostream& os() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

// ---------------------------------------------------------------------------
// model / grid resolution

struct Preset {
  BewMode mode;
  double lo, hi;
  int n;
};

Preset preset_for(const std::string& emit) {
  if (emit == "fig5" || emit == "fig7") return {BewMode::Decay, 0.0, 5.0, 501};
  return {BewMode::ParameterX, 0.0, 1.0, 101};
}

RunConfig resolve_sweep_config(const RunConfig& cfg) {
  RunConfig eff = cfg;
  if (!eff.emit.empty()) {
    if (eff.input_path)
      throw ParseError("--emit presets use the built-in bew model; drop --input");
    const Preset p = preset_for(eff.emit);
    if (eff.mode_given && eff.mode != p.mode)
      throw ParseError("--emit " + eff.emit + " pins --mode " + mode_name(p.mode));
    eff.model = "bew";
    eff.mode = p.mode;
    if (!eff.gamma_given) eff.gamma = 1.0;
    if (!eff.lo_given) eff.lo = p.lo;
    if (!eff.hi_given) eff.hi = p.hi;
    if (!eff.n_given) eff.n = p.n;
    return eff;
  }
  const bool time_mode = eff.mode != BewMode::ParameterX;
  if (!eff.lo_given) eff.lo = 0.0;
  if (!eff.hi_given) {
    if (eff.input_path)
      eff.hi = 0.0;  // filled from the table after the model is built
    else
      eff.hi = time_mode ? (eff.command == "crossings" ? 10.0 : 5.0) : 1.0;
  }
  if (!eff.n_given) eff.n = eff.command == "crossings" ? 256 : 101;
  return eff;
}

ParametricD7Model make_model(const RunConfig& eff) {
  if (eff.input_path) {
    std::ifstream in(*eff.input_path, std::ios::binary);
    if (!in) throw ParseError("cannot open table file: " + *eff.input_path);
    return load_tabulated(read_table_csv(in), eff.interp);
  }
  if (eff.model != "bew") throw ParseError("unknown model: " + eff.model);
  return bew_model(BewSpec{eff.mode, eff.gamma});
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw DomainError("grid needs at least 2 points (--n)");
  if (!(lo < hi)) throw DomainError("grid needs lo < hi");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + i * (hi - lo) / (n - 1);
  g.back() = hi;
  return g;
}

json make_meta(const RunConfig& eff) {
  json meta;
  meta["version"] = kVersion;
  meta["command"] = eff.command;
  if (eff.input_path) {
    meta["model"] = {{"name", "tabulated"},
                     {"path", *eff.input_path},
                     {"interpolation", interp_name(eff.interp)}};
  } else {
    json m = {{"name", "bew"}, {"mode", mode_name(eff.mode)}};
    if (eff.mode != BewMode::ParameterX) m["gamma"] = eff.gamma;
    meta["model"] = m;
  }
  meta["grid"] = {{"lo", eff.lo}, {"hi", eff.hi}, {"n", eff.n}};
  meta["tolerance"] = eff.tol;
  if (!eff.emit.empty()) meta["emit"] = eff.emit;
  return meta;
}

// ---------------------------------------------------------------------------
// report printing

json validation_json(const ValidationReport& r, double tol) {
  return json{{"hermiticity_residual", jnum(r.hermiticity_residual)},
              {"trace_deviation", jnum(r.trace_deviation)},
              {"min_eigenvalue", jnum(r.min_eigenvalue)},
              {"purity", jnum(r.purity)},
              {"hermitian_ok", r.hermitian_ok},
              {"trace_ok", r.trace_ok},
              {"psd_ok", r.psd_ok},
              {"purity_ok", r.purity_ok},
              {"valid", r.ok()},
              {"tolerance", jnum(tol)}};
}

void print_validation_human(const ValidationReport& r, std::ostream& os) {
  os << "hermiticity residual : " << format_double(r.hermiticity_residual)
     << (r.hermitian_ok ? "" : "  [FAIL]") << "\n";
  os << "trace deviation      : " << format_double(r.trace_deviation)
     << (r.trace_ok ? "" : "  [FAIL]") << "\n";
  os << "min eigenvalue       : " << format_double(r.min_eigenvalue)
     << (r.psd_ok ? "" : "  [FAIL]") << "\n";
  os << "purity               : " << format_double(r.purity)
     << (r.purity_ok ? "" : "  [FAIL]") << "\n";
  os << "status               : " << (r.ok() ? "valid" : "invalid") << "\n";
}

json fano_json(const FanoParams& f) {
  json m = json::array();
  for (int r = 0; r < 3; ++r)
    m.push_back({jnum(f.m(r, 0)), jnum(f.m(r, 1)), jnum(f.m(r, 2))});
  return json{{"p1", {jnum(f.p1.x()), jnum(f.p1.y()), jnum(f.p1.z())}},
              {"p2", {jnum(f.p2.x()), jnum(f.p2.y()), jnum(f.p2.z())}},
              {"m", m}};
}

json d7_json(const D7Params& d) {
  return json{{"p1z", jnum(d.p1z)}, {"p2z", jnum(d.p2z)}, {"mxx", jnum(d.mxx)},
              {"myy", jnum(d.myy)}, {"mxy", jnum(d.mxy)}, {"myx", jnum(d.myx)},
              {"mzz", jnum(d.mzz)}};
}

json spectrum_json(const Spectrum4& s) {
  return json{jnum(s.values[0]), jnum(s.values[1]), jnum(s.values[2]), jnum(s.values[3])};
}

json coords_json(const CmmCoords& c) {
  return json{{"t_minus", jnum(c.t_minus)}, {"u_minus", jnum(c.u_minus)},
              {"v_plus", jnum(c.v_plus)},   {"w_minus", jnum(c.w_minus)},
              {"t_plus", jnum(c.t_plus)},   {"u_plus", jnum(c.u_plus)},
              {"v_minus", jnum(c.v_minus)}, {"w_plus", jnum(c.w_plus)}};
}

std::string vec3_text(double a, double b, double c) {
  return "[" + format_double(a) + ", " + format_double(b) + ", " + format_double(c) + "]";
}

void print_analysis_human(const AnalysisReport& a, std::ostream& os) {
  os << "validation\n";
  os << "  hermiticity residual : " << format_double(a.validation.hermiticity_residual) << "\n";
  os << "  trace deviation      : " << format_double(a.validation.trace_deviation) << "\n";
  os << "  min eigenvalue       : " << format_double(a.validation.min_eigenvalue) << "\n";
  os << "  purity               : " << format_double(a.validation.purity) << "\n";
  os << "fano\n";
  os << "  p1 : " << vec3_text(a.fano.p1.x(), a.fano.p1.y(), a.fano.p1.z()) << "\n";
  os << "  p2 : " << vec3_text(a.fano.p2.x(), a.fano.p2.y(), a.fano.p2.z()) << "\n";
  os << "  m  : [" << vec3_text(a.fano.m(0, 0), a.fano.m(0, 1), a.fano.m(0, 2)) << ", "
     << vec3_text(a.fano.m(1, 0), a.fano.m(1, 1), a.fano.m(1, 2)) << ", "
     << vec3_text(a.fano.m(2, 0), a.fano.m(2, 1), a.fano.m(2, 2)) << "]\n";
  if (a.d7) {
    os << "d7\n";
    os << "  p1z : " << format_double(a.d7->p1z) << "\n";
    os << "  p2z : " << format_double(a.d7->p2z) << "\n";
    os << "  mxx : " << format_double(a.d7->mxx) << "\n";
    os << "  myy : " << format_double(a.d7->myy) << "\n";
    os << "  mxy : " << format_double(a.d7->mxy) << "\n";
    os << "  myx : " << format_double(a.d7->myx) << "\n";
    os << "  mzz : " << format_double(a.d7->mzz) << "\n";
  } else {
    os << "d7 : n/a (" << a.d7_note << ")\n";
  }
  const auto spec_text = [](const Spectrum4& s) {
    std::string t = "[";
    for (int i = 0; i < 4; ++i)
      t += format_double(s.values[i]) + (i < 3 ? std::string(", ") : std::string("]"));
    return t;
  };
  os << "spectrum    : " << spec_text(a.spectrum) << "\n";
  os << "pt spectrum : " << spec_text(a.pt_spectrum) << "\n";
  os << "phc\n";
  os << "  label             : " << to_string(a.phc.label) << "\n";
  os << "  min pt eigenvalue : " << format_double(a.phc.min_pt_eigenvalue) << "\n";
  os << "  tolerance         : " << format_double(a.phc.tolerance_used) << "\n";
  if (a.cmm) {
    const auto& c = a.cmm->coords;
    const auto& p = a.cmm->coords_pt;
    os << "cmm\n";
    os << "  branch 1 (t-; u-, v+, w-) : " << format_double(c.t_minus) << "; "
       << vec3_text(c.u_minus, c.v_plus, c.w_minus) << "\n";
    os << "  branch 2 (t+; u+, v-, w+) : " << format_double(c.t_plus) << "; "
       << vec3_text(c.u_plus, c.v_minus, c.w_plus) << "\n";
    os << "  pt branch 1               : " << format_double(p.t_minus) << "; "
       << vec3_text(p.u_minus, p.v_plus, p.w_minus) << "\n";
    os << "  pt branch 2               : " << format_double(p.t_plus) << "; "
       << vec3_text(p.u_plus, p.v_minus, p.w_plus) << "\n";
    os << "  s1_sq  : " << format_double(a.cmm->quad.s1_sq) << "\n";
    os << "  s2_sq  : " << format_double(a.cmm->quad.s2_sq) << "\n";
    os << "  s1t_sq : " << format_double(a.cmm->quad.s1t_sq) << "\n";
    os << "  s2t_sq : " << format_double(a.cmm->quad.s2t_sq) << "\n";
    os << "  invariance residual : " << format_double(a.cmm->invariance_residual) << "\n";
    os << "  region : " << to_string(a.cmm->region.label) << " (driver "
       << to_string(a.cmm->region.driver) << ")\n";
  } else {
    os << "cmm : n/a\n";
  }
}

// ---------------------------------------------------------------------------
// sweep output writers

constexpr const char* kTrajectoryHeader =
    "theta,x,t_minus,u_minus,v_plus,w_minus,t_plus,u_plus,v_minus,w_plus,"
    "s1_sq,s2_sq,s1t_sq,s2t_sq,region,speed1,speed2,speed1t,speed2t,"
    "qspeed1_sq,qspeed2_sq,qspeed1t_sq,qspeed2t_sq,min_eig";

void write_trajectory_csv(const std::vector<TrajectoryPoint>& pts, std::ostream& os) {
  os << kTrajectoryHeader << "\n";
  for (const auto& p : pts) {
    const auto& k = p.kin;
    os << format_double(p.theta) << ',' << format_double(p.x_value) << ','
       << format_double(p.coords.t_minus) << ',' << format_double(p.coords.u_minus) << ','
       << format_double(p.coords.v_plus) << ',' << format_double(p.coords.w_minus) << ','
       << format_double(p.coords.t_plus) << ',' << format_double(p.coords.u_plus) << ','
       << format_double(p.coords.v_minus) << ',' << format_double(p.coords.w_plus) << ','
       << format_double(p.quad.s1_sq) << ',' << format_double(p.quad.s2_sq) << ','
       << format_double(p.quad.s1t_sq) << ',' << format_double(p.quad.s2t_sq) << ','
       << region_letter(p.region.label) << ','
       << speed_text(k.speed1, k.clock1_degenerate) << ','
       << speed_text(k.speed2, k.clock2_degenerate) << ','
       << speed_text(k.speed1t, k.clock1_degenerate) << ','
       << speed_text(k.speed2t, k.clock2_degenerate) << ','
       << qspeed_text(k.qspeed1_sq, k.clock1_degenerate) << ','
       << qspeed_text(k.qspeed2_sq, k.clock2_degenerate) << ','
       << qspeed_text(k.qspeed1t_sq, k.clock1_degenerate) << ','
       << qspeed_text(k.qspeed2t_sq, k.clock2_degenerate) << ','
       << format_double(p.validity) << "\n";
  }
}

json trajectory_point_json(const TrajectoryPoint& p) {
  const auto& k = p.kin;
  return json{{"theta", jnum(p.theta)},
              {"x", jnum(p.x_value)},
              {"t_minus", jnum(p.coords.t_minus)},
              {"u_minus", jnum(p.coords.u_minus)},
              {"v_plus", jnum(p.coords.v_plus)},
              {"w_minus", jnum(p.coords.w_minus)},
              {"t_plus", jnum(p.coords.t_plus)},
              {"u_plus", jnum(p.coords.u_plus)},
              {"v_minus", jnum(p.coords.v_minus)},
              {"w_plus", jnum(p.coords.w_plus)},
              {"s1_sq", jnum(p.quad.s1_sq)},
              {"s2_sq", jnum(p.quad.s2_sq)},
              {"s1t_sq", jnum(p.quad.s1t_sq)},
              {"s2t_sq", jnum(p.quad.s2t_sq)},
              {"region", std::string(1, region_letter(p.region.label))},
              {"speed1", jspeed(k.speed1, k.clock1_degenerate)},
              {"speed2", jspeed(k.speed2, k.clock2_degenerate)},
              {"speed1t", jspeed(k.speed1t, k.clock1_degenerate)},
              {"speed2t", jspeed(k.speed2t, k.clock2_degenerate)},
              {"qspeed1_sq", jqspeed(k.qspeed1_sq, k.clock1_degenerate)},
              {"qspeed2_sq", jqspeed(k.qspeed2_sq, k.clock2_degenerate)},
              {"qspeed1t_sq", jqspeed(k.qspeed1t_sq, k.clock1_degenerate)},
              {"qspeed2t_sq", jqspeed(k.qspeed2t_sq, k.clock2_degenerate)},
              {"min_eig", jnum(p.validity)}};
}

double root_or_zero(double sq) { return sq > 0 ? std::sqrt(sq) : 0.0; }

/// Figure presets emit compact column sets; everything else gets the full
/// table. fig2/fig3 plot the plain/transposed world lines as v against t;
/// fig4/fig5 take the (real) roots of the non-transposed squares.
void write_preset_csv(const std::string& emit, const std::vector<TrajectoryPoint>& pts,
                      std::ostream& os) {
  if (emit == "fig2" || emit == "fig3") {
    const bool transposed = emit == "fig3";
    os << (transposed ? "theta,x,t_minus,v_minus,t_plus,v_plus"
                      : "theta,x,t_minus,v_plus,t_plus,v_minus")
       << "\n";
    for (const auto& p : pts) {
      const double b1 = transposed ? p.coords.v_minus : p.coords.v_plus;
      const double b2 = transposed ? p.coords.v_plus : p.coords.v_minus;
      os << format_double(p.theta) << ',' << format_double(p.x_value) << ','
         << format_double(p.coords.t_minus) << ',' << format_double(b1) << ','
         << format_double(p.coords.t_plus) << ',' << format_double(b2) << "\n";
    }
    return;
  }
  if (emit == "fig4" || emit == "fig5") {
    os << "theta,x,s1,s2\n";
    for (const auto& p : pts) {
      os << format_double(p.theta) << ',' << format_double(p.x_value) << ','
         << format_double(root_or_zero(p.quad.s1_sq)) << ','
         << format_double(root_or_zero(p.quad.s2_sq)) << "\n";
    }
    return;
  }
  // fig6 / fig7: the transposed squares, signed
  os << "theta,x,s1t_sq,s2t_sq\n";
  for (const auto& p : pts) {
    os << format_double(p.theta) << ',' << format_double(p.x_value) << ','
       << format_double(p.quad.s1t_sq) << ',' << format_double(p.quad.s2t_sq) << "\n";
  }
}

json preset_point_json(const std::string& emit, const TrajectoryPoint& p) {
  if (emit == "fig2" || emit == "fig3") {
    const bool transposed = emit == "fig3";
    return json{{"theta", jnum(p.theta)},
                {"x", jnum(p.x_value)},
                {"t_minus", jnum(p.coords.t_minus)},
                {transposed ? "v_minus" : "v_plus",
                 jnum(transposed ? p.coords.v_minus : p.coords.v_plus)},
                {"t_plus", jnum(p.coords.t_plus)},
                {transposed ? "v_plus" : "v_minus",
                 jnum(transposed ? p.coords.v_plus : p.coords.v_minus)}};
  }
  if (emit == "fig4" || emit == "fig5") {
    return json{{"theta", jnum(p.theta)},
                {"x", jnum(p.x_value)},
                {"s1", jnum(root_or_zero(p.quad.s1_sq))},
                {"s2", jnum(root_or_zero(p.quad.s2_sq))}};
  }
  return json{{"theta", jnum(p.theta)},
              {"x", jnum(p.x_value)},
              {"s1t_sq", jnum(p.quad.s1t_sq)},
              {"s2t_sq", jnum(p.quad.s2t_sq)}};
}

int write_cone(const RunConfig& eff, std::ostream& out) {
  const auto grid = linspace(eff.lo, eff.hi, eff.n);
  if (eff.format == OutputFormat::Csv) {
    out << "x,t,u,v,w\n";
    for (const double x : grid) {
      const auto line = lightcone_reference(x);
      out << format_double(x) << ',' << format_double(line[0]) << ','
          << format_double(line[1]) << ',' << format_double(line[2]) << ','
          << format_double(line[3]) << "\n";
    }
    return 0;
  }
  json doc;
  doc["meta"] = make_meta(eff);
  doc["points"] = json::array();
  for (const double x : grid) {
    const auto line = lightcone_reference(x);
    doc["points"].push_back({{"x", jnum(x)},
                             {"t", jnum(line[0])},
                             {"u", jnum(line[1])},
                             {"v", jnum(line[2])},
                             {"w", jnum(line[3])}});
  }
  out << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

AnalysisReport analyze_state(const DensityMatrix4& rho, double tol) {
  AnalysisReport a;
  a.validation = validate_density(rho, tol);
  a.fano = decompose_to_fano(rho);
  a.spectrum = eigenvalues_hermitian4(rho, tol);
  a.pt_spectrum = eigenvalues_hermitian4(partial_transpose(rho, 2), tol);
  a.phc = classify_phc(rho, tol);
  try {
    a.d7 = project_d7(a.fano, tol);
  } catch (const NotD7ClassError& e) {
    a.d7_note = e.what();
  }
  if (a.d7) {
    AnalysisReport::CmmSection s;
    s.coords = coords_from_d7(*a.d7);
    s.coords_pt = pt_coords(s.coords);
    s.quad = quad_distances(s.coords);
    s.invariance_residual = invariance_residual(s.quad);
    s.region = region_of(s.quad, tol);
    a.cmm = s;
  }
  return a;
}

DensityMatrix4 parse_state_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("JSON parse error: ") + e.what());
  }
  return state_from_json(j);
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const DensityMatrix4 rho = load_state(cfg);
    const ValidationReport rep = validate_density(rho, cfg.tol);
    Sink sink(cfg, out);
    if (cfg.format == OutputFormat::Json)
      sink.os() << validation_json(rep, cfg.tol).dump(2) << "\n";
    else
      print_validation_human(rep, sink.os());
    return rep.ok() ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const DensityMatrix4 rho = load_state(cfg);
    const ValidationReport rep = validate_density(rho, cfg.tol);
    Sink sink(cfg, out);
    if (!rep.ok()) {
      if (cfg.format == OutputFormat::Json)
        sink.os() << validation_json(rep, cfg.tol).dump(2) << "\n";
      else
        print_validation_human(rep, sink.os());
      err << "error: state fails density-matrix invariants\n";
      return 2;
    }
    const AnalysisReport a = analyze_state(rho, cfg.tol);
    if (cfg.format == OutputFormat::Json) {
      json doc;
      doc["validation"] = validation_json(a.validation, cfg.tol);
      doc["fano"] = fano_json(a.fano);
      doc["d7"] = a.d7 ? d7_json(*a.d7) : json(nullptr);
      if (!a.d7) doc["d7_note"] = a.d7_note;
      doc["spectrum"] = spectrum_json(a.spectrum);
      doc["pt_spectrum"] = spectrum_json(a.pt_spectrum);
      doc["phc"] = {{"label", to_string(a.phc.label)},
                    {"min_pt_eigenvalue", jnum(a.phc.min_pt_eigenvalue)},
                    {"tolerance", jnum(a.phc.tolerance_used)}};
      if (a.cmm) {
        doc["cmm"] = {{"coords", coords_json(a.cmm->coords)},
                      {"pt_coords", coords_json(a.cmm->coords_pt)},
                      {"quad",
                       {{"s1_sq", jnum(a.cmm->quad.s1_sq)},
                        {"s2_sq", jnum(a.cmm->quad.s2_sq)},
                        {"s1t_sq", jnum(a.cmm->quad.s1t_sq)},
                        {"s2t_sq", jnum(a.cmm->quad.s2t_sq)}}},
                      {"invariance_residual", jnum(a.cmm->invariance_residual)},
                      {"region",
                       {{"label", to_string(a.cmm->region.label)},
                        {"driver", to_string(a.cmm->region.driver)}}}};
      } else {
        doc["cmm"] = nullptr;
      }
      sink.os() << doc.dump(2) << "\n";
    } else {
      print_analysis_human(a, sink.os());
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    RunConfig eff = resolve_sweep_config(cfg);
    Sink sink(eff, out);
    if (eff.emit == "cone") return write_cone(eff, sink.os());

    const ParametricD7Model model = make_model(eff);
    if (eff.input_path && !eff.hi_given) eff.hi = model.theta_hi;
    if (eff.input_path && !eff.lo_given) eff.lo = model.theta_lo;
    const auto pts = trace_trajectory(model, linspace(eff.lo, eff.hi, eff.n), eff.tol);

    if (eff.format == OutputFormat::Csv) {
      if (eff.emit.empty())
        write_trajectory_csv(pts, sink.os());
      else
        write_preset_csv(eff.emit, pts, sink.os());
    } else {
      json doc;
      doc["meta"] = make_meta(eff);
      doc["points"] = json::array();
      for (const auto& p : pts)
        doc["points"].push_back(eff.emit.empty() ? trajectory_point_json(p)
                                                 : preset_point_json(eff.emit, p));
      sink.os() << doc.dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_speeds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    RunConfig eff = resolve_sweep_config(cfg);
    const ParametricD7Model model = make_model(eff);
    if (eff.input_path && !eff.hi_given) eff.hi = model.theta_hi;
    if (eff.input_path && !eff.lo_given) eff.lo = model.theta_lo;
    const auto pts = trace_trajectory(model, linspace(eff.lo, eff.hi, eff.n), eff.tol);

    Sink sink(eff, out);
    if (eff.format == OutputFormat::Csv) {
      sink.os() << "theta,t_minus,t_plus,speed1,speed2,speed1t,speed2t,"
                   "qspeed1_sq,qspeed2_sq,qspeed1t_sq,qspeed2t_sq\n";
      for (const auto& p : pts) {
        const auto& k = p.kin;
        sink.os() << format_double(p.theta) << ',' << format_double(p.coords.t_minus) << ','
                  << format_double(p.coords.t_plus) << ','
                  << speed_text(k.speed1, k.clock1_degenerate) << ','
                  << speed_text(k.speed2, k.clock2_degenerate) << ','
                  << speed_text(k.speed1t, k.clock1_degenerate) << ','
                  << speed_text(k.speed2t, k.clock2_degenerate) << ','
                  << qspeed_text(k.qspeed1_sq, k.clock1_degenerate) << ','
                  << qspeed_text(k.qspeed2_sq, k.clock2_degenerate) << ','
                  << qspeed_text(k.qspeed1t_sq, k.clock1_degenerate) << ','
                  << qspeed_text(k.qspeed2t_sq, k.clock2_degenerate) << "\n";
      }
    } else {
      json doc;
      doc["meta"] = make_meta(eff);
      doc["points"] = json::array();
      for (const auto& p : pts) {
        const auto& k = p.kin;
        doc["points"].push_back(
            {{"theta", jnum(p.theta)},
             {"t_minus", jnum(p.coords.t_minus)},
             {"t_plus", jnum(p.coords.t_plus)},
             {"speed1", jspeed(k.speed1, k.clock1_degenerate)},
             {"speed2", jspeed(k.speed2, k.clock2_degenerate)},
             {"speed1t", jspeed(k.speed1t, k.clock1_degenerate)},
             {"speed2t", jspeed(k.speed2t, k.clock2_degenerate)},
             {"qspeed1_sq", jqspeed(k.qspeed1_sq, k.clock1_degenerate)},
             {"qspeed2_sq", jqspeed(k.qspeed2_sq, k.clock2_degenerate)},
             {"qspeed1t_sq", jqspeed(k.qspeed1t_sq, k.clock1_degenerate)},
             {"qspeed2t_sq", jqspeed(k.qspeed2t_sq, k.clock2_degenerate)}});
      }
      sink.os() << doc.dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_crossings(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig eff = resolve_sweep_config(cfg);
    const ParametricD7Model model = make_model(eff);
    double lo = eff.lo, hi = eff.hi;
    if (eff.input_path && !eff.lo_given) lo = model.theta_lo;
    if (eff.input_path && !eff.hi_given) hi = model.theta_hi;
    const CrossingScan scan = find_crossings(model, lo, hi, eff.n, eff.tol);

    for (const auto& w : scan.warnings) err << "warning: " << w << "\n";

    Sink sink(eff, out);
    if (eff.format == OutputFormat::Csv) {
      sink.os() << "theta_star,kind,driver,refinement_width\n";
      for (const auto& ev : scan.events) {
        sink.os() << format_double(ev.theta_star) << ',' << to_string(ev.kind) << ','
                  << to_string(ev.driver) << ',' << format_double(ev.refinement_width)
                  << "\n";
      }
    } else {
      json doc;
      doc["meta"] = make_meta(eff);
      doc["events"] = json::array();
      for (const auto& ev : scan.events) {
        doc["events"].push_back({{"theta_star", jnum(ev.theta_star)},
                                 {"kind", to_string(ev.kind)},
                                 {"driver", to_string(ev.driver)},
                                 {"refinement_width", jnum(ev.refinement_width)}});
      }
      doc["warnings"] = scan.warnings;
      sink.os() << doc.dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"two-qubit disentanglement geometry: quadridistances, spectra, trajectories",
               "qmink"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig cfg;
  std::string mode_str, format_str, interp_str = "linear", emit_str;
  std::string input_str, out_str;

  std::vector<CLI::Option*> x_opts, mode_opts, gamma_opts, lo_opts, hi_opts, n_opts,
      input_opts, out_opts, format_opts;

  const auto add_common = [&](CLI::App* c, bool state_cmd) {
    input_opts.push_back(
        c->add_option("--input", input_str,
                      state_cmd ? "state JSON file" : "tabulated model CSV file"));
    c->add_option("--model", cfg.model, "built-in model name")
        ->check(CLI::IsMember({"bew"}));
    c->add_option("--tol", cfg.tol, "classification / refinement tolerance")
        ->check(CLI::PositiveNumber);
    format_opts.push_back(c->add_option("--format", format_str, "output format")
                              ->check(CLI::IsMember({"csv", "json"})));
    out_opts.push_back(c->add_option("--out", out_str, "output file (default stdout)"));
    if (state_cmd) {
      x_opts.push_back(c->add_option("--x", cfg.x, "bew mixing weight in [0, 1]"));
    } else {
      mode_opts.push_back(c->add_option("--mode", mode_str, "bew time parametrization")
                              ->check(CLI::IsMember({"parameter_x", "decay", "growth"})));
      gamma_opts.push_back(
          c->add_option("--gamma", cfg.gamma, "decay rate")->check(CLI::PositiveNumber));
      lo_opts.push_back(c->add_option("--lo", cfg.lo, "sweep start"));
      hi_opts.push_back(c->add_option("--hi", cfg.hi, "sweep end"));
      n_opts.push_back(c->add_option("--n", cfg.n, "grid points (coarse scan size for crossings)")
                           ->check(CLI::Range(2, 100000000)));
      c->add_option("--interp", interp_str, "tabulated model interpolation")
          ->check(CLI::IsMember({"linear", "cubic"}));
    }
  };

  add_common(app.add_subcommand("validate", "check density-matrix invariants"), true);
  add_common(app.add_subcommand("analyze", "full state report"), true);
  auto* traj = app.add_subcommand("trajectory", "sweep a model over a grid");
  add_common(traj, false);
  traj->add_option("--emit", emit_str, "figure-data preset")
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "cone"}));
  add_common(app.add_subcommand("speeds", "speeds and quadrispeeds over a grid"), false);
  add_common(app.add_subcommand("crossings", "locate region-boundary crossings"), false);

  std::vector<const char*> argv;
  argv.push_back("qmink");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  const auto given = [](const std::vector<CLI::Option*>& v) {
    for (const auto* o : v)
      if (o->count() > 0) return true;
    return false;
  };
  cfg.x_given = given(x_opts);
  cfg.mode_given = given(mode_opts);
  cfg.gamma_given = given(gamma_opts);
  cfg.lo_given = given(lo_opts);
  cfg.hi_given = given(hi_opts);
  cfg.n_given = given(n_opts);
  if (given(input_opts)) cfg.input_path = input_str;
  if (given(out_opts)) cfg.out_path = out_str;
  cfg.emit = emit_str;
  cfg.interp = interp_str == "cubic" ? Interpolation::CubicMonotone : Interpolation::Linear;
  if (cfg.mode_given) {
    if (mode_str == "decay")
      cfg.mode = BewMode::Decay;
    else if (mode_str == "growth")
      cfg.mode = BewMode::Growth;
    else
      cfg.mode = BewMode::ParameterX;
  }

  for (const char* name : {"validate", "analyze", "trajectory", "speeds", "crossings"})
    if (app.got_subcommand(name)) cfg.command = name;

  const bool format_given = given(format_opts);
  if (format_given)
    cfg.format = format_str == "json" ? OutputFormat::Json : OutputFormat::Csv;
  else
    cfg.format = cfg.command == "crossings" ? OutputFormat::Json : OutputFormat::Csv;

  if (cfg.command == "validate") return cmd_validate(cfg, out, err);
  if (cfg.command == "analyze") return cmd_analyze(cfg, out, err);
  if (cfg.command == "trajectory") return cmd_trajectory(cfg, out, err);
  if (cfg.command == "speeds") return cmd_speeds(cfg, out, err);
  if (cfg.command == "crossings") return cmd_crossings(cfg, out, err);
  err << "error: no command\n";
  return 1;
}

}  // namespace qmink
