#ifndef MEP_CLI_HPP
#define MEP_CLI_HPP

// Subcommand bodies of the meplot tool. Each takes its options and output
// streams and returns the process exit code: 0 success/confident, 1 error,
// 2 inconclusive.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mep/converse.hpp"
#include "mep/distmodel.hpp"
#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/harness.hpp"
#include "mep/meplot.hpp"
#include "mep/setgeom.hpp"
#include "mep/text.hpp"

namespace mep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

/// Reads one value per line; '#' comments and blank lines are skipped, and a
/// non-numeric first data line is taken as a header.
inline std::vector<double> read_values(std::istream& is) {
  std::vector<double> out;
  std::vector<std::size_t> bad;
  std::string line;
  std::size_t lineno = 0;
  bool first_data = true;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    try {
      out.push_back(detail::parse_number(body, "value"));
    } catch (const ParseError&) {
      if (!first_data) bad.push_back(lineno);
    }
    first_data = false;
  }
  if (!bad.empty()) {
    std::string msg = "unparseable rows at lines";
    for (std::size_t i = 0; i < bad.size() && i < 5; ++i) msg += (i ? ", " : " ") + std::to_string(bad[i]);
    if (bad.size() > 5) msg += " (" + std::to_string(bad.size()) + " in total)";
    throw ParseError(msg);
  }
  return out;
}

inline std::vector<double> read_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_values(in);
}

inline SortedSample load_sample(const std::string& path) {
  std::vector<double> v = read_values_file(path);
  if (v.size() < 2) throw SampleError("need at least 2 valid values, got " + std::to_string(v.size()));
  return SortedSample::from_unsorted(std::move(v));
}

// ---------------------------------------------------------------------------
// SVG

struct PlotDocument {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<Point> points;
  std::vector<Point> overlay;  // empty when no limit is drawn
  int width = 640;
  int height = 480;
  std::string command_line;
  std::string comment;  // free-form metadata shown in an XML comment
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// XML comments may not contain "--".
inline std::string comment_safe(std::string s) {
  for (std::size_t pos; (pos = s.find("--")) != std::string::npos;) s.replace(pos, 2, "- -");
  if (!s.empty() && s.back() == '-') s += ' ';
  return s;
}

inline std::string render_svg(const PlotDocument& doc) {
  if (doc.points.empty()) throw Error("plot needs a nonempty point series");
  double x0 = doc.points[0].x, x1 = x0, y0 = doc.points[0].y, y1 = y0;
  auto grow = [&](const Point& p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  for (const Point& p : doc.points) grow(p);
  for (const Point& p : doc.overlay) grow(p);
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double left = 60, right = 20, top = 40, bottom = 50;
  const double pw = doc.width - left - right, ph = doc.height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- " << comment_safe(doc.comment) << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << doc.width << "\" height=\"" << doc.height
     << "\" viewBox=\"0 0 " << doc.width << " " << doc.height << "\">\n";
  os << "<metadata>" << xml_escape(doc.command_line) << "</metadata>\n";
  os << "<title>" << xml_escape(doc.title) << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << doc.width << "\" height=\"" << doc.height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << doc.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(doc.title)
     << "</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  os << "</g>\n";
  os << "<g font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << fmt(xv)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << doc.height - 10 << "\" text-anchor=\"middle\">"
     << xml_escape(doc.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << top + ph / 2
     << ")\">" << xml_escape(doc.y_label) << "</text>\n";
  os << "</g>\n";
  os << "<g fill=\"steelblue\">\n";
  for (const Point& p : doc.points)
    os << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y)) << "\" r=\"2\"/>\n";
  os << "</g>\n";
  if (!doc.overlay.empty()) {
    os << "<polyline fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < doc.overlay.size(); ++i)
      os << (i ? " " : "") << fmt(sx(doc.overlay[i].x)) << "," << fmt(sy(doc.overlay[i].y));
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string model;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string output;
  bool require_mean = false;
};

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const DistributionModel d = parse_model_spec(opt.model);
    if (opt.require_mean && !d.has_mean())
      throw MomentError("mean does not exist for " + d.spec() +
                        (d.name() == "gpd" ? " (xi >= 1)" : d.name() == "pareto" ? " (alpha <= 1)" : ""));
    if (opt.n < 1) throw ParameterError("n must be >= 1");
    const std::vector<double> values = draw(d, opt.n, StreamKey{opt.seed, 0, 0});
    std::ofstream file;
    std::ostream* sink = &out;
    if (!opt.output.empty() && opt.output != "-") {
      file.open(opt.output);
      if (!file) throw Error("cannot write '" + opt.output + "'");
      sink = &file;
    }
    for (double v : values) *sink << format_double(v) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

// ---------------------------------------------------------------------------
// meplot

struct MeplotOptions {
  std::string input;
  std::string stem;  // defaults to the input path without extension
  std::optional<Regime> regime;
  std::string k = "auto";
  std::optional<double> window;
  std::optional<double> overlay_xi;
  bool svg = false;
  std::uint64_t seed = 0;  // recorded in the SVG metadata
  std::string command_line;
};

/// k = ceil(n^0.45) clamped to [2, n-1].
inline std::size_t auto_k(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.45)));
  return std::clamp<std::size_t>(k, 2, n - 1);
}

inline std::string default_stem(const std::string& input) {
  std::filesystem::path p(input);
  p.replace_extension();
  return p.string();
}

inline int cmd_meplot(const MeplotOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const SortedSample s = load_sample(opt.input);
    const std::string stem = opt.stem.empty() ? default_stem(opt.input) : opt.stem;
    PointFile file;
    PlotDocument doc;
    doc.command_line = opt.command_line;
    std::string comment = "seed=" + std::to_string(opt.seed);

    if (!opt.regime) {
      file = to_point_file(me_plot(s));
      doc.title = "Mean excess plot (n=" + std::to_string(s.size()) + ")";
      doc.x_label = "threshold";
      doc.y_label = "mean excess";
    } else {
      std::size_t k = 0;
      if (opt.k == "auto") {
        k = auto_k(s.size());
      } else {
        const double kv = detail::parse_number(opt.k, "k");
        if (!(kv >= 2.0) || kv != std::floor(kv)) throw ConfigError("--k must be 'auto' or an integer >= 2");
        k = static_cast<std::size_t>(kv);
      }
      const ScaledSet set = scaled_set(s, k, *opt.regime);
      file = to_point_file(set);
      doc.title = "Scaled ME plot, " + std::string(to_string(*opt.regime)) + " (n=" + std::to_string(s.size()) +
                  ", k=" + std::to_string(k) + ")";
      doc.x_label = "scaled threshold";
      doc.y_label = "scaled mean excess";
      const Window w = opt.window ? Window{*opt.window} : Window::default_for(*opt.regime);
      comment += " k=" + std::to_string(k) + " window=" + format_double(w.m);
      if (opt.overlay_xi) {
        const LimitSet limit = limit_set(*opt.regime, *opt.overlay_xi);
        const ParamRange r = limit.clip(w);
        if (!r.empty()) doc.overlay = {limit.at(r.lo), limit.at(r.hi)};
        doc.points = clip_points(set.points, w);
        try {
          comment += " overlay_xi=" + format_double(*opt.overlay_xi) +
                     " hausdorff=" + format_double(hausdorff_windowed(set, limit, w));
        } catch (const WindowError& e) {
          comment += " hausdorff=n/a";
        }
      }
    }

    const std::string csv_path = stem + ".meplot.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write '" + csv_path + "'");
    write_points_csv(csv, file);
    out << "wrote " << csv_path << " (" << file.points.size() << " points)\n";

    if (opt.svg) {
      if (doc.points.empty()) doc.points = file.points;
      if (doc.points.empty()) throw Error("nothing to plot inside the window");
      doc.comment = comment;
      const std::string svg_path = stem + ".meplot.svg";
      std::ofstream svg(svg_path);
      if (!svg) throw Error("cannot write '" + svg_path + "'");
      svg << render_svg(doc);
      out << "wrote " << svg_path << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyCliOptions {
  std::string input;
  mep::ClassifyOptions thresholds;
};

inline int cmd_classify(const ClassifyCliOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const SortedSample s = load_sample(opt.input);
    const RegimeEstimate est = classify_regime(s, default_classify_policy(), opt.thresholds);
    out << to_json(est).dump() << "\n";
    return est.regime == Verdict::Inconclusive ? kExitInconclusive : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOptions {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;  // 0: MEPLOT_THREADS or hardware concurrency
};

inline int cmd_experiment(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(opt.config);
    if (!in) throw Error("cannot open '" + opt.config + "'");
    const ExperimentSpec spec = parse_experiment_config(in);
    const ConvergenceReport rep = run_experiment(spec, opt.threads);

    std::filesystem::create_directories(opt.out_dir);
    const auto base = std::filesystem::path(opt.out_dir) / spec.name;
    {
      std::ofstream csv(base.string() + ".report.csv");
      if (!csv) throw Error("cannot write '" + base.string() + ".report.csv'");
      csv << report_csv(rep);
    }
    {
      std::ofstream json(base.string() + ".report.json");
      if (!json) throw Error("cannot write '" + base.string() + ".report.json'");
      json << report_json(rep).dump(2) << "\n";
    }
    for (const auto& r : rep.rows) {
      out << rep.name << " n=" << r.n << " k=" << r.k << " mean=" << format_double(r.mean)
          << " median=" << format_double(r.q50) << " P(|stat-" << format_double(rep.limit)
          << "|>" << format_double(rep.epsilon) << ")=" << format_double(r.exceedance) << " failures=" << r.failures
          << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

// ---------------------------------------------------------------------------
// selftest: fast deterministic oracle checks.

inline int cmd_selftest(std::ostream& out, std::ostream& err) {
  struct Check {
    const char* name;
    std::function<bool()> run;
  };
  const std::vector<Check> checks = {
      {"gpd cdf/quantile round trip",
       [] {
         for (double xi : {-1.0, -0.5, 0.0, 0.5, 1.0})
           for (double beta : {0.5, 1.0, 10.0})
             for (double u = 0.01; u < 1.0; u += 0.07)
               if (std::abs(gpd_cdf({xi, beta}, gpd_quantile({xi, beta}, u)) - u) > 1e-12) return false;
         return true;
       }},
      {"numeric vs closed-form mean excess",
       [] {
         for (double xi : {-0.5, 0.0, 0.5}) {
           const auto d = DistributionModel::gpd(xi, 1.0);
           const double u = xi < 0 ? 1.0 : 3.0;
           const double exact = me_closed_form({xi, 1.0}, u);
           if (std::abs(me_numeric(d, u) - exact) > 1e-8 * exact) return false;
         }
         return true;
       }},
      {"H functionals",
       [] {
         const auto pareto = DistributionModel::pareto(2.0);
         const auto unif = DistributionModel::uniform();
         const auto ex = DistributionModel::exponential();
         return std::abs(h_frechet(pareto, 0.99) - 2.0) < 1e-6 && std::abs(h_weibull(unif, 1.0, 0.99) - 0.5) < 1e-8 &&
                std::abs(h_gumbel(ex, 0.99) - 1.0) < 1e-8;
       }},
      {"hall-wellner bound",
       [] {
         for (std::size_t n : {1u, 10u, 100u}) {
           std::vector<double> grid;
           for (int i = 0; i <= 10000; ++i) grid.push_back((n + 10.0) * i / 10000.0);
           const auto [sup, bound] = hall_wellner_gap(n, grid);
           if (sup > bound) return false;
         }
         return true;
       }},
      {"karamata certificate for pareto b(u)",
       [] {
         const auto d = DistributionModel::pareto(2.0);
         const std::vector<double> ts{1e2, 1e4, 1e6}, xs{2.0, 10.0};
         return karamata_oracle([&](double t) { return d.tail_quantile(t); }, 0.5, ts, xs, 1e-9).passed;
       }},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const Error& e) {
      err << c.name << ": " << e.what() << "\n";
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << "\n";
    all = all && ok;
  }
  return all ? kExitOk : kExitError;
}

}  // namespace mep::cli

#endif  // MEP_CLI_HPP
