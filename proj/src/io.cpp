#include "tklab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tklab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_trajectory_csv(const TkTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);

  const int n = traj.samples.empty()
                    ? traj.params.n
                    : static_cast<int>(traj.samples.front().state.phases.size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",theta_" << i;
  for (int i = 1; i <= n; ++i) out << ",temp_" << i;
  out << ",entropy,phase_diameter,temp_diameter,order_parameter,"
         "conserved_g,phase_sum\n";

  for (const auto& s : traj.samples) {
    out << fmt17(s.t);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(s.state.phases[i]);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(s.state.temps[i]);
    out << ',' << fmt17(s.obs.entropy) << ',' << fmt17(s.obs.phase_diameter)
        << ',' << fmt17(s.obs.temp_diameter) << ','
        << fmt17(s.obs.order_parameter) << ',' << fmt17(s.obs.conserved_g)
        << ',' << fmt17(s.obs.phase_sum) << '\n';
  }
  if (!out) throw IoError("write failed", path);
}

TkTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading", path);

  std::string line;
  if (!std::getline(in, line)) throw IoError("missing header", path);
  const auto header = split_csv_line(line);
  int n = 0;
  for (const auto& h : header)
    if (h.rfind("theta_", 0) == 0) ++n;
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n) + 6;
  if (header.size() != expected)
    throw IoError("unexpected column count in header", path);

  TkTrajectory traj;
  traj.params.n = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected)
      throw IoError("unexpected column count in row", path);
    TkSample s;
    std::size_t k = 0;
    auto next = [&]() { return std::stod(fields[k++]); };
    s.t = next();
    s.state.time = s.t;
    s.state.phases = Vec::Zero(n);
    s.state.temps = Vec::Zero(n);
    for (int i = 0; i < n; ++i) s.state.phases[i] = next();
    for (int i = 0; i < n; ++i) s.state.temps[i] = next();
    s.obs.entropy = next();
    s.obs.phase_diameter = next();
    s.obs.temp_diameter = next();
    s.obs.order_parameter = next();
    s.obs.conserved_g = next();
    s.obs.phase_sum = next();
    s.obs.avg_phase = s.obs.phase_sum / n;
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

std::string report_to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario_name;
  j["hash"] = report.hash;
  j["seed"] = report.seed;
  j["all_pass"] = report.all_pass();
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : report.verdicts) {
    j["verdicts"].push_back({{"claim", v.claim_id},
                             {"measured", v.measured},
                             {"bound", v.bound},
                             {"tolerance", v.tolerance},
                             {"margin", v.bound + v.tolerance - v.measured},
                             {"pass", v.pass},
                             {"notes", v.notes}});
  }
  j["measures"] = report.measures;
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

void write_report_json(const VerificationReport& report,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);
  out << report_to_json(report);
  if (!out) throw IoError("write failed", path);
}

std::string aggregate_to_json(const AggregateReport& report) {
  nlohmann::json j;
  j["claim"] = report.claim_id;
  j["trials"] = report.n_trials;
  j["seed"] = report.seed;
  j["n_pass"] = report.n_pass;
  j["pass_rate"] = report.pass_rate;
  j["worst_margin"] = report.worst_margin;
  j["results"] = nlohmann::json::array();
  for (const auto& t : report.trials) {
    j["results"].push_back(
        {{"pass", t.pass}, {"margin", t.margin}, {"note", t.note}});
  }
  return j.dump(2) + "\n";
}

void write_aggregate_json(const AggregateReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);
  out << aggregate_to_json(report);
  if (!out) throw IoError("write failed", path);
}

namespace {

double channel_value(const TkSample& s, const std::string& name) {
  if (name == "entropy") return s.obs.entropy;
  if (name == "phase_diameter") return s.obs.phase_diameter;
  if (name == "temp_diameter") return s.obs.temp_diameter;
  if (name == "order_parameter") return s.obs.order_parameter;
  if (name == "conserved_g") return s.obs.conserved_g;
  if (name == "phase_sum") return s.obs.phase_sum;
  if (name.rfind("theta_", 0) == 0) {
    const int i = std::stoi(name.substr(6)) - 1;
    if (i < 0 || i >= s.state.phases.size())
      throw std::invalid_argument("channel index out of range: " + name);
    return s.state.phases[i];
  }
  if (name.rfind("temp_", 0) == 0) {
    const int i = std::stoi(name.substr(5)) - 1;
    if (i < 0 || i >= s.state.temps.size())
      throw std::invalid_argument("channel index out of range: " + name);
    return s.state.temps[i];
  }
  throw std::invalid_argument("unknown channel: " + name);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void plot_svg(const TkTrajectory& traj,
              const std::vector<std::string>& channels,
              const std::string& path, const PlotOptions& options) {
  if (channels.empty()) throw std::invalid_argument("no channels selected");
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");

  auto transform = [&](double v) {
    if (!options.log_scale) return v;
    return std::log10(std::max(std::abs(v), 1e-16));
  };

  double t_lo = traj.samples.front().t, t_hi = traj.samples.back().t;
  double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
  for (const auto& s : traj.samples) {
    for (const auto& c : channels) {
      const double v = transform(channel_value(s, c));
      v_lo = std::min(v_lo, v);
      v_hi = std::max(v_hi, v);
    }
  }
  if (t_hi <= t_lo) t_hi = t_lo + 1.0;
  if (v_hi <= v_lo) v_hi = v_lo + 1.0;

  const double margin = 50.0;
  const double w = options.width - 2 * margin;
  const double h = options.height - 2 * margin;
  auto px = [&](double t) { return margin + w * (t - t_lo) / (t_hi - t_lo); };
  auto py = [&](double v) {
    return margin + h * (1.0 - (v - v_lo) / (v_hi - v_lo));
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w
      << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

  char label[64];
  std::snprintf(label, sizeof(label), "t in [%g, %g]%s", t_lo, t_hi,
                options.log_scale ? ", log10 scale" : "");
  out << "<text x=\"" << margin << "\" y=\"" << margin - 12
      << "\" font-size=\"13\" font-family=\"monospace\">" << label
      << "</text>\n";

  for (std::size_t c = 0; c < channels.size(); ++c) {
    out << "<polyline fill=\"none\" stroke=\""
        << kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : traj.samples) {
      out << px(s.t) << ',' << py(transform(channel_value(s, channels[c])))
          << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << options.width - margin - 150 << "\" y=\""
        << margin + 16 + 16 * c << "\" font-size=\"12\" fill=\""
        << kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))]
        << "\" font-family=\"monospace\">" << channels[c] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed", path);
}

}  // namespace tklab
