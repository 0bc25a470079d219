#pragma once

#include <string>
#include <vector>

#include "bdisac/bcd.hpp"

namespace bdisac {

/// Everything needed to reproduce a run; a copy is written next to results.
struct RunManifest {
  std::string config_path;
  std::string command;
  std::string output_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> schemes;
  std::vector<double> levels;
  std::string mode;
};

std::string format_manifest(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& dir);

/// Writes curve.csv, one trace CSV per run, and summary.json (the
/// dominance-filtered boundary). All floats at 12 significant digits.
/// Throws std::runtime_error when the directory cannot be written.
void emit_results(const ParetoCurve& curve, const std::string& dir);

/// Reads a curve.csv produced by emit_results (records only, runs are not
/// persisted beyond their traces).
std::vector<ParetoRecord> read_curve_csv(const std::string& path);

/// Formatting helper shared by all writers: 12 significant digits.
std::string format_double(double v);

/// Emits plot-ready x/y/series tables from curve CSVs, one series per input
/// file in the given order, plus an optional SVG polyline rendering.
/// Missing/empty series are tolerated with a warning on stderr.
void plot_data(const std::vector<std::string>& curve_csv_paths,
               const std::vector<std::string>& labels, const std::string& out_path,
               bool render_svg = false);

/// Cost curve table over an element-count range at fixed cost ratio.
void emit_cost_table(double n_min, double n_max, int steps, double cost_ratio,
                     double unit_cost, const std::string& out_path);

}  // namespace bdisac
