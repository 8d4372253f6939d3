#include "sensikit/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "sensikit/error.hpp"

namespace sensikit {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string join(std::initializer_list<std::string> fields) {
  std::string line;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) line += ',';
    line += f;
    first = false;
  }
  line += '\n';
  return line;
}

constexpr const char* kMseHeader =
    "study,model,method,index,budget,replications,mse_mean,mse_median,mse_stdev,seed\n";

void append_mse_rows(std::string& out, const MseReport& r, const std::string& study) {
  for (const auto& row : r.rows)
    out += join({study, r.model, row.method, std::to_string(row.index), std::to_string(row.budget),
                 std::to_string(row.replications), format_double(row.mean),
                 format_double(row.median), format_double(row.stdev), std::to_string(r.seed)});
}

}  // namespace

std::string to_csv(const ConvergenceReport& r) {
  std::string out = "study,model,method,index,n_or_N,estimate,exact,abs_error,seed\n";
  for (const auto& row : r.rows)
    out += join({"convergence", r.model, row.method, std::to_string(row.index),
                 std::to_string(row.size), format_double(row.estimate), format_double(row.exact),
                 format_double(row.abs_error), std::to_string(r.seed)});
  return out;
}

std::string to_csv(const MseReport& r) {
  std::string out = kMseHeader;
  append_mse_rows(out, r, "mse");
  return out;
}

// The model column carries the dimension so rows of different p stay apart.
std::string to_csv(const std::vector<MseReport>& reports) {
  std::string out = kMseHeader;
  for (const auto& r : reports) {
    MseReport labelled = r;
    labelled.model = r.model + "-p" + std::to_string(r.p);
    append_mse_rows(out, labelled, "dimension");
  }
  return out;
}

std::string to_csv(const VarianceReport& r) {
  std::string out = "alpha,p,index,v_pf,v_rank,v_eff,seed\n";
  for (const auto& row : r.rows)
    out += join({format_double(row.alpha), std::to_string(row.p), std::to_string(row.index),
                 format_double(row.v_pf), format_double(row.v_rank), format_double(row.v_eff),
                 std::to_string(r.seed)});
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void emit_csv(const ConvergenceReport& r, const std::filesystem::path& path) {
  write_text(path, to_csv(r));
}
void emit_csv(const MseReport& r, const std::filesystem::path& path) { write_text(path, to_csv(r)); }
void emit_csv(const std::vector<MseReport>& r, const std::filesystem::path& path) {
  write_text(path, to_csv(r));
}
void emit_csv(const VarianceReport& r, const std::filesystem::path& path) {
  write_text(path, to_csv(r));
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidArgument("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw InvalidArgument("CSV input has no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

// ---------------------------------------------------------------------------
// SVG

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string color_at(std::size_t k) { return kPalette[k % std::size(kPalette)]; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// 1, 2, 5 steps in a decade.
double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  if (f < 1.5) return mag;
  if (f < 3.5) return 2.0 * mag;
  if (f < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double t(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (t(v) - t(lo)) / (t(hi) - t(lo)); }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis a;
  a.log = log;
  if (log) {
    lo = std::max(lo, std::numeric_limits<double>::min());
    hi = std::max(hi, lo);
    a.lo = std::pow(10.0, std::floor(std::log10(lo)));
    a.hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (a.hi <= a.lo) a.hi = a.lo * 10.0;
  } else {
    if (hi <= lo) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
    const double pad = 0.05 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
  return a;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    for (double v = a.lo; v <= a.hi * (1 + 1e-9); v *= 10.0) out.push_back(v);
    return out;
  }
  const double step = nice_step(a.hi - a.lo, 5);
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-12 * step; v += step)
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void render_body(std::ostringstream& o, const Plot& plot) {
  const double left = 64, right = 150, top = 32, bottom = 48;
  const double w = plot.width - left - right;
  const double h = plot.height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (double x : s.x)
      if (!plot.log_x || x > 0) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.y) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  for (const auto& r : plot.rules) ymin = std::min(ymin, r.y), ymax = std::max(ymax, r.y);
  if (!plot.boxes.empty()) {
    xmin = 0.5;
    xmax = static_cast<double>(plot.boxes.size()) + 0.5;
    for (const auto& b : plot.boxes) {
      ymin = std::min(ymin, b.stats.whisker_lo);
      ymax = std::max(ymax, b.stats.whisker_hi);
      for (double v : b.stats.outliers) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  const bool log_x = plot.log_x && plot.boxes.empty();
  const Axis ax = plot.boxes.empty() ? make_axis(xmin, xmax, log_x) : Axis{xmin, xmax, false};
  const Axis ay = make_axis(ymin, ymax, false);
  auto px = [&](double x) { return left + ax.frac(x) * w; };
  auto py = [&](double y) { return top + (1.0 - ay.frac(y)) * h; };

  o << "<text x=\"" << fmt(left + w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w)
    << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  if (plot.boxes.empty()) {
    for (double t : ticks(ax)) {
      o << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top + h) << "\" x2=\"" << fmt(px(t))
        << "\" y2=\"" << fmt(top + h + 5) << "\" stroke=\"#000\"/>\n";
      o << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(top + h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
    }
  } else {
    for (std::size_t k = 0; k < plot.boxes.size(); ++k) {
      const double c = px(static_cast<double>(k + 1));
      o << "<text x=\"" << fmt(c) << "\" y=\"" << fmt(top + h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(plot.boxes[k].label)
        << "</text>\n";
    }
  }
  for (double t : ticks(ay)) {
    o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left)
      << "\" y2=\"" << fmt(py(t)) << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(t) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << fmt(left + w / 2) << "\" y=\"" << fmt(top + h + 38)
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(plot.x_label) << "</text>\n";
  o << "<text x=\"14\" y=\"" << fmt(top + h / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
    << " transform=\"rotate(-90 14 " << fmt(top + h / 2) << ")\">" << escape(plot.y_label)
    << "</text>\n";

  for (const auto& r : plot.rules)
    o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(r.y)) << "\" x2=\"" << fmt(left + w)
      << "\" y2=\"" << fmt(py(r.y)) << "\" stroke=\"" << r.color
      << "\" stroke-dasharray=\"4 3\"/>\n";

  for (const auto& s : plot.series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (log_x && !(s.x[k] > 0)) continue;
      if (!first) o << ' ';
      o << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k]));
      first = false;
    }
    o << "\"/>\n";
  }

  const double bw = plot.boxes.empty() ? 0.0 : 0.5 * w / static_cast<double>(plot.boxes.size());
  for (std::size_t k = 0; k < plot.boxes.size(); ++k) {
    const auto& b = plot.boxes[k];
    const double c = px(static_cast<double>(k + 1));
    const auto& st = b.stats;
    o << "<line x1=\"" << fmt(c) << "\" y1=\"" << fmt(py(st.whisker_lo)) << "\" x2=\"" << fmt(c)
      << "\" y2=\"" << fmt(py(st.whisker_hi)) << "\" stroke=\"" << b.color << "\"/>\n";
    o << "<rect x=\"" << fmt(c - bw / 2) << "\" y=\"" << fmt(py(st.q3)) << "\" width=\"" << fmt(bw)
      << "\" height=\"" << fmt(py(st.q1) - py(st.q3)) << "\" fill=\"#fff\" stroke=\"" << b.color
      << "\"/>\n";
    o << "<line x1=\"" << fmt(c - bw / 2) << "\" y1=\"" << fmt(py(st.median)) << "\" x2=\""
      << fmt(c + bw / 2) << "\" y2=\"" << fmt(py(st.median)) << "\" stroke=\"" << b.color
      << "\" stroke-width=\"2\"/>\n";
    for (double v : st.outliers)
      o << "<circle cx=\"" << fmt(c) << "\" cy=\"" << fmt(py(v)) << "\" r=\"2\" fill=\"none\" stroke=\""
        << b.color << "\"/>\n";
  }

  double ly = top + 10;
  for (const auto& s : plot.series) {
    o << "<line x1=\"" << fmt(left + w + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
      << fmt(left + w + 30) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color << "\"/>\n";
    o << "<text x=\"" << fmt(left + w + 34) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"11\">"
      << escape(s.name) << "</text>\n";
    ly += 16;
  }
}

std::string document(int width, int height, const std::string& body) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
    << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
    << body << "</svg>\n";
  return o.str();
}

}  // namespace

std::string render_svg(const Plot& plot) {
  std::ostringstream body;
  render_body(body, plot);
  return document(plot.width, plot.height, body.str());
}

std::string render_panels(const std::vector<Plot>& plots) {
  if (plots.empty()) throw InvalidArgument("nothing to plot");
  int width = 0;
  int height = 0;
  std::ostringstream body;
  for (const auto& p : plots) {
    body << "<g transform=\"translate(0 " << height << ")\">\n";
    render_body(body, p);
    body << "</g>\n";
    width = std::max(width, p.width);
    height += p.height;
  }
  return document(width, height, body.str());
}

std::vector<Plot> plots_for(const ConvergenceReport& r, bool log_x) {
  std::vector<Plot> plots;
  for (const char* method : {kMethodPickFreeze, kMethodRank}) {
    std::map<std::size_t, Series> by_index;
    std::map<std::size_t, double> exact;
    for (const auto& row : r.rows) {
      if (row.method != method) continue;
      auto& s = by_index[row.index];
      s.x.push_back(static_cast<double>(row.size));
      s.y.push_back(row.estimate);
      exact[row.index] = row.exact;
    }
    if (by_index.empty()) continue;
    Plot p;
    p.title = r.model + ": " + method;
    p.x_label = std::string(method) == kMethodRank ? "n" : "N";
    p.y_label = "estimate";
    p.log_x = log_x;
    for (auto& [index, s] : by_index) {
      s.name = "S" + std::to_string(index);
      s.color = color_at(index - 1);
      p.rules.push_back({exact[index], s.color});
      p.series.push_back(std::move(s));
    }
    plots.push_back(std::move(p));
  }
  return plots;
}

std::vector<Plot> plots_for(const MseReport& r) {
  if (r.rows.empty()) return {};
  Plot p;
  p.title = r.model + ": squared errors, budget " + std::to_string(r.budget);
  p.x_label = "index";
  p.y_label = "squared error";
  p.width = std::max(640, 70 * static_cast<int>(r.rows.size()) + 220);
  for (std::size_t i = 1; i <= r.p; ++i)
    for (const char* method : {kMethodPickFreeze, kMethodRank})
      for (const auto& row : r.rows)
        if (row.index == i && row.method == method)
          p.boxes.push_back({std::string(std::string(method) == kMethodRank ? "R" : "PF") +
                                 std::to_string(i),
                             std::string(method) == kMethodRank ? color_at(0) : color_at(1),
                             row.box});
  return {p};
}

std::vector<Plot> plots_for(const std::vector<MseReport>& reports) {
  std::size_t max_index = 0;
  for (const auto& r : reports)
    for (const auto& row : r.rows) max_index = std::max(max_index, row.index);
  std::vector<Plot> plots;
  for (std::size_t i = 1; i <= max_index; ++i) {
    Plot p;
    p.title = "mean squared error of S" + std::to_string(i);
    p.x_label = "p";
    p.y_label = "MSE";
    Series pf{"pick-freeze", color_at(1), {}, {}};
    Series rk{"rank", color_at(0), {}, {}};
    for (const auto& r : reports)
      for (const auto& row : r.rows) {
        if (row.index != i) continue;
        auto& s = row.method == kMethodRank ? rk : pf;
        s.x.push_back(static_cast<double>(r.p));
        s.y.push_back(row.mean);
      }
    p.series.push_back(std::move(pf));
    p.series.push_back(std::move(rk));
    plots.push_back(std::move(p));
  }
  return plots;
}

std::vector<Plot> plots_for(const VarianceReport& r) {
  std::vector<Plot> plots;
  for (std::size_t index : {std::size_t{1}, std::size_t{2}}) {
    std::map<std::size_t, std::array<Series, 3>> by_p;
    for (const auto& row : r.rows) {
      if (row.index != index) continue;
      auto& s = by_p[row.p];
      const double vals[3] = {row.v_pf, row.v_rank, row.v_eff};
      for (int k = 0; k < 3; ++k) {
        s[k].x.push_back(row.alpha);
        s[k].y.push_back(vals[k]);
      }
    }
    if (by_p.empty()) continue;
    Plot p;
    p.title = "limiting variances, entry " + std::to_string(index);
    p.x_label = "alpha";
    p.y_label = "variance";
    std::size_t c = 0;
    for (auto& [dim, s] : by_p) {
      const char* names[3] = {"PF", "rank", "eff"};
      for (int k = 0; k < 3; ++k) {
        s[k].name = std::string(names[k]) + " p=" + std::to_string(dim);
        s[k].color = color_at(c);
        p.series.push_back(std::move(s[k]));
      }
      ++c;
    }
    p.height = std::max(420, 16 * static_cast<int>(p.series.size()) + 80);
    plots.push_back(std::move(p));
  }
  return plots;
}

namespace {

void emit_plots(const std::vector<Plot>& plots, const std::filesystem::path& path) {
  if (plots.empty()) throw InvalidArgument("cannot plot an empty report");
  write_text(path, render_panels(plots));
}

}  // namespace

void emit_svg(const ConvergenceReport& r, const std::filesystem::path& path, bool log_x) {
  emit_plots(plots_for(r, log_x), path);
}
void emit_svg(const MseReport& r, const std::filesystem::path& path) { emit_plots(plots_for(r), path); }
void emit_svg(const std::vector<MseReport>& r, const std::filesystem::path& path) {
  emit_plots(plots_for(r), path);
}
void emit_svg(const VarianceReport& r, const std::filesystem::path& path) {
  emit_plots(plots_for(r), path);
}

}  // namespace sensikit
