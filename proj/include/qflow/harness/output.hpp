#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "qflow/fit.hpp"

namespace qflow::harness {

/// Floor of the relative-error denominator.
inline constexpr double kRelativeErrorFloor = 1e-14;

struct SweepRecord {
  std::string scenario;
  int k = 0;
  std::string quantity;
  std::complex<double> model;
  std::complex<double> predicted;
  double rel_err = 0;
  std::string gate = "ok";  // "ok" or '+'-joined gate names that fired

  bool gated() const { return gate != "ok"; }
};

/// |model - predicted| / max(|predicted|, floor).
double relative_error(std::complex<double> model, std::complex<double> predicted);

SweepRecord make_record(std::string scenario, int k, std::string quantity,
                        std::complex<double> model, std::complex<double> predicted,
                        std::string gate = "ok");

/// Orders by (scenario, quantity, k).
void sort_records(std::vector<SweepRecord>& records);

/// Header scenario,k,quantity,model_re,model_im,pred_re,pred_im,rel_err,gate;
/// doubles in %.17g so the loader round-trips bit-exactly.
std::string records_to_csv(const std::vector<SweepRecord>& records);
void write_records_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> load_records_csv(const std::filesystem::path& path);
std::vector<SweepRecord> parse_records_csv(const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool with_fit = true;  // draw the log-log least-squares line
};

/// Log-log SVG with one polyline per series and dashed fitted lines.
std::string loglog_svg(const std::string& title, const std::vector<PlotSeries>& series);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Series of rel_err (or |model| when `use_model` is set) per quantity.
std::vector<PlotSeries> series_by_quantity(const std::vector<SweepRecord>& records,
                                           bool use_model = false);

std::string format_double(double v);

}  // namespace qflow::harness
