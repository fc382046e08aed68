#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fvsg/mesh.hpp"

namespace fvsg {

// Per-cell scalar values with a time stamp: the discrete unknown U^n.
struct CellField {
  std::vector<double> values;
  double time = 0.0;

  CellField() = default;
  CellField(std::size_t n, double fill, double t = 0.0) : values(n, fill), time(t) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

// Full double precision, round-trippable.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Time series of scalar diagnostics with CSV persistence.
struct DiagnosticSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit DiagnosticSeries(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}

  void add_row(std::vector<double> row) { rows.push_back(std::move(row)); }

  // Values of one column, by name.
  std::vector<double> column(const std::string& name) const {
    std::size_t j = 0;
    while (j < columns.size() && columns[j] != name) ++j;
    if (j == columns.size()) throw std::invalid_argument("no such column: " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      os << columns[j] << (j + 1 < columns.size() ? "," : "\n");
    for (const auto& r : rows)
      for (std::size_t j = 0; j < r.size(); ++j)
        os << format_g17(r[j]) << (j + 1 < r.size() ? "," : "\n");
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_csv(os);
  }
};

// Snapshot format: `# t=<time>` header, then cell_id,x[,y],value rows.
inline void write_snapshot_csv(std::ostream& os, const Mesh& mesh, const CellField& f) {
  os << "# t=" << format_g17(f.time) << '\n';
  os << "cell_id,x" << (mesh.dim() == 2 ? ",y" : "") << ",value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << i << ',' << format_g17(mesh.cells()[i].center.x);
    if (mesh.dim() == 2) os << ',' << format_g17(mesh.cells()[i].center.y);
    os << ',' << format_g17(f[i]) << '\n';
  }
}

inline void write_snapshot_csv(const std::string& path, const Mesh& mesh, const CellField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_snapshot_csv(os, mesh, f);
}

}  // namespace fvsg
