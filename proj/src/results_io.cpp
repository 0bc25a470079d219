#include "bdisac/results_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bdisac/bcd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace bdisac {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "spp") return Scheme::Spp;
  if (s == "sp") return Scheme::Sp;
  if (s == "tdma") return Scheme::TdmaFdma;
  if (s == "nobd") return Scheme::NoBd;
  throw std::runtime_error("unknown scheme label: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::string format_manifest(const RunManifest& m) {
  json j;
  j["config_path"] = m.config_path;
  j["command"] = m.command;
  j["output_dir"] = m.output_dir;
  j["seeds"] = m.seeds;
  j["schemes"] = m.schemes;
  j["levels"] = m.levels;
  j["mode"] = m.mode;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& dir) {
  fs::create_directories(dir);
  open_out(fs::path(dir) / "manifest.json") << format_manifest(m);
}

void emit_results(const ParetoCurve& curve, const std::string& dir) {
  fs::create_directories(dir);

  {
    auto out = open_out(fs::path(dir) / "curve.csv");
    out << "scheme,mode,constraint_level,I_r,C_d,converged,outer_iters,seed,wall_ms\n";
    for (const auto& r : curve.records) {
      out << to_string(r.scheme) << ',' << to_string(r.mode) << ','
          << format_double(r.level) << ',' << format_double(r.smi) << ','
          << format_double(r.rate) << ',' << (r.converged ? 1 : 0) << ','
          << r.outer_iterations << ',' << r.seed << ',' << format_double(r.wall_ms)
          << '\n';
    }
  }

  for (size_t i = 0; i < curve.runs.size(); ++i) {
    auto out = open_out(fs::path(dir) / ("trace_" + std::to_string(i) + ".csv"));
    out << "outer_iter,block,I_r,C_d,lambda,rho\n";
    for (const auto& t : curve.runs[i].trace) {
      out << t.outer_iter << ',' << t.block << ',' << format_double(t.smi) << ','
          << format_double(t.rate) << ',' << format_double(t.lambda) << ','
          << format_double(t.rho) << '\n';
    }
  }

  {
    json boundary = json::array();
    for (const auto& r : curve.records) {
      if (!r.on_boundary) continue;
      json p;
      p["constraint_level"] = r.level;
      p["I_r"] = r.smi;
      p["C_d"] = r.rate;
      p["scheme"] = to_string(r.scheme);
      p["mode"] = to_string(r.mode);
      p["seed"] = r.seed;
      boundary.push_back(p);
    }
    json j;
    j["boundary"] = boundary;
    j["records"] = curve.records.size();
    open_out(fs::path(dir) / "summary.json") << j.dump(2) << "\n";
  }
}

std::vector<ParetoRecord> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<ParetoRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("malformed curve row: " + line);
    ParetoRecord r;
    r.scheme = scheme_from_string(f[0]);
    r.mode = f[1] == "p1" ? ProblemMode::SensingMax : ProblemMode::RateMax;
    r.level = std::stod(f[2]);
    r.smi = std::stod(f[3]);
    r.rate = std::stod(f[4]);
    r.converged = f[5] == "1";
    r.outer_iterations = std::stoi(f[6]);
    r.seed = std::stoull(f[7]);
    r.wall_ms = std::stod(f[8]);
    records.push_back(r);
  }
  return records;
}

namespace {

void render_svg(const std::vector<std::tuple<std::string, double, double>>& rows,
                const fs::path& path) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [s, x, y] : rows) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (rows.empty() || xmax <= xmin) {
    xmin = 0; xmax = 1;
  }
  if (rows.empty() || ymax <= ymin) {
    ymin = 0; ymax = 1;
  }
  const double w = 640, h = 480, pad = 40;
  auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b"};
  auto out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << pad << "' y1='" << h - pad << "' x2='" << w - pad << "' y2='"
      << h - pad << "' stroke='black'/>\n";
  out << "<line x1='" << pad << "' y1='" << pad << "' x2='" << pad << "' y2='" << h - pad
      << "' stroke='black'/>\n";

  std::string current;
  int color = -1;
  std::ostringstream poly;
  auto flush = [&]() {
    if (!current.empty())
      out << "<polyline fill='none' stroke='" << palette[color % 6] << "' points='"
          << poly.str() << "'/>\n";
    poly.str("");
  };
  for (const auto& [s, x, y] : rows) {
    if (s != current) {
      flush();
      current = s;
      ++color;
    }
    poly << sx(x) << ',' << sy(y) << ' ';
  }
  flush();
  out << "</svg>\n";
}

}  // namespace

void plot_data(const std::vector<std::string>& curve_csv_paths,
               const std::vector<std::string>& labels, const std::string& out_path,
               bool render_svg_too) {
  std::vector<std::tuple<std::string, double, double>> rows;
  for (size_t i = 0; i < curve_csv_paths.size(); ++i) {
    const std::string label =
        i < labels.size() ? labels[i] : fs::path(curve_csv_paths[i]).stem().string();
    std::vector<ParetoRecord> records;
    try {
      records = read_curve_csv(curve_csv_paths[i]);
    } catch (const std::exception& e) {
      std::cerr << "plot_data: skipping series '" << label << "': " << e.what() << "\n";
      continue;
    }
    if (records.empty())
      std::cerr << "plot_data: series '" << label << "' is empty\n";
    std::sort(records.begin(), records.end(),
              [](const ParetoRecord& a, const ParetoRecord& b) { return a.rate < b.rate; });
    for (const auto& r : records) rows.emplace_back(label, r.rate, r.smi);
  }

  auto out = open_out(out_path);
  out << "series,x,y\n";  // x: C_d, y: I_r
  for (const auto& [s, x, y] : rows)
    out << s << ',' << format_double(x) << ',' << format_double(y) << '\n';

  if (render_svg_too)
    render_svg(rows, fs::path(out_path).replace_extension(".svg"));
}

void emit_cost_table(double n_min, double n_max, int steps, double cost_ratio,
                     double unit_cost, const std::string& out_path) {
  auto out = open_out(out_path);
  out << "n,ris,bd_spp,bd_sp\n";
  for (int i = 0; i < steps; ++i) {
    const double n = steps == 1 ? n_min : n_min + (n_max - n_min) * i / (steps - 1.0);
    const CostTriple c = cost_model(n, cost_ratio, unit_cost);
    out << format_double(n) << ',' << format_double(c.ris) << ','
        << format_double(c.bd_spp) << ',' << format_double(c.bd_sp) << '\n';
  }
}

}  // namespace bdisac
