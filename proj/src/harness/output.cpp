#include "qflow/harness/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow::harness {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double relative_error(std::complex<double> model, std::complex<double> predicted) {
  return std::abs(model - predicted) / std::max(std::abs(predicted), kRelativeErrorFloor);
}

SweepRecord make_record(std::string scenario, int k, std::string quantity,
                        std::complex<double> model, std::complex<double> predicted,
                        std::string gate) {
  SweepRecord r;
  r.scenario = std::move(scenario);
  r.k = k;
  r.quantity = std::move(quantity);
  r.model = model;
  r.predicted = predicted;
  r.rel_err = relative_error(model, predicted);
  r.gate = std::move(gate);
  return r;
}

void sort_records(std::vector<SweepRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.quantity != b.quantity) return a.quantity < b.quantity;
    return a.k < b.k;
  });
}

namespace {

constexpr const char* kHeader = "scenario,k,quantity,model_re,model_im,pred_re,pred_im,rel_err,gate";

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw InputError("csv: field '" + s + "' contains a separator");
  }
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InputError("csv: malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string records_to_csv(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw InputError("emit_outputs: no records to write");
  std::ostringstream os;
  os << kHeader << '\n';
  for (const SweepRecord& r : records) {
    check_field(r.scenario);
    check_field(r.quantity);
    check_field(r.gate);
    os << r.scenario << ',' << r.k << ',' << r.quantity << ',' << format_double(r.model.real())
       << ',' << format_double(r.model.imag()) << ',' << format_double(r.predicted.real()) << ','
       << format_double(r.predicted.imag()) << ',' << format_double(r.rel_err) << ',' << r.gate
       << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void write_records_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
  write_text(path, records_to_csv(records));
}

std::vector<SweepRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw InputError("csv: missing or unexpected header");
  std::vector<SweepRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw InputError("csv: line " + std::to_string(lineno) + " has " +
                                        std::to_string(f.size()) + " fields");
    SweepRecord r;
    r.scenario = f[0];
    r.k = std::stoi(f[1]);
    r.quantity = f[2];
    r.model = {parse_double(f[3]), parse_double(f[4])};
    r.predicted = {parse_double(f[5]), parse_double(f[6])};
    r.rel_err = parse_double(f[7]);
    r.gate = f[8];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRecord> load_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_records_csv(os.str());
}

std::vector<PlotSeries> series_by_quantity(const std::vector<SweepRecord>& records, bool use_model) {
  std::map<std::string, PlotSeries> by;
  for (const SweepRecord& r : records) {
    if (r.gated()) continue;
    PlotSeries& s = by[r.quantity];
    s.label = r.quantity;
    s.x.push_back(r.k);
    s.y.push_back(use_model ? std::abs(r.model) : r.rel_err);
  }
  std::vector<PlotSeries> out;
  for (auto& [name, s] : by) out.push_back(std::move(s));
  return out;
}

std::string loglog_svg(const std::string& title, const std::vector<PlotSeries>& series) {
  constexpr double width = 640, height = 420, left = 70, right = 180, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) throw InputError("svg: no positive data to plot");
  xmin = std::floor(xmin * 10) / 10 - 0.05;
  xmax = std::ceil(xmax * 10) / 10 + 0.05;
  ymin = std::floor(ymin) - 0.0;
  ymax = std::ceil(ymax) + 0.0;
  if (ymax - ymin < 1) ymax = ymin + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << num(py(e)) << "\" y2=\""
       << num(py(e)) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << num(py(e) + 4) << "\" text-anchor=\"end\">1e"
       << e << "</text>\n";
  }
  for (const PlotSeries& s : series) {
    for (double x : s.x) {
      if (!(x > 0)) continue;
      os << "<text x=\"" << num(px(std::log10(x))) << "\" y=\"" << num(top + ph + 16)
         << "\" text-anchor=\"middle\">" << x << "</text>\n";
    }
    break;
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">k</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = colors[si % (sizeof colors / sizeof *colors)];
    std::ostringstream pts;
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
      pts << num(px(lx)) << ',' << num(py(ly)) << ' ';
      os << "<circle cx=\"" << num(px(lx)) << "\" cy=\"" << num(py(ly)) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
      fx.push_back(s.x[i]);
      fy.push_back(s.y[i]);
    }
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    std::string legend = s.label;
    if (s.with_fit && fx.size() >= 2) {
      const LineFit f = fit_loglog(fx, fy);
      const double l0 = std::log10(fx.front()), l1 = std::log10(fx.back());
      const double y0 = (f.intercept + f.slope * l0 * std::log(10.0)) / std::log(10.0);
      const double y1 = (f.intercept + f.slope * l1 * std::log(10.0)) / std::log(10.0);
      os << "<line x1=\"" << num(px(l0)) << "\" y1=\"" << num(py(y0)) << "\" x2=\"" << num(px(l1))
         << "\" y2=\"" << num(py(y1)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
      legend += " (slope " + num(f.slope) + ")";
    }
    const double ly = top + 14 + 16 * static_cast<double>(si);
    os << "<rect x=\"" << left + pw + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << left + pw + 24 << "\" y=\"" << ly + 1 << "\">" << legend << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qflow::harness
