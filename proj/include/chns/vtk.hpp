#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chns/space.hpp"

namespace chns {

/// Legacy ASCII VTK snapshot: unstructured triangle grid with point data
/// phi, mu, p (scalars) and the velocity restricted to its vertex nodes.
inline void write_vtk_snapshot(const std::string& path, const Mesh& mesh, const FieldVector& phi,
                               const FieldVector& mu, const FieldVector& p, const FieldVector& u,
                               const std::string& title = "chns snapshot") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_snapshot: cannot open " + path);

  char buf[96];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  const int nv = mesh.vertex_count();
  const int nt = mesh.triangle_count();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& v : mesh.vertices) out << fmt(v.x()) << " " << fmt(v.y()) << " 0\n";
  out << "CELLS " << nt << " " << 4 * nt << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << nt << "\n";
  for (int t = 0; t < nt; ++t) out << "5\n";

  out << "POINT_DATA " << nv << "\n";
  const auto scalars = [&](const char* name, const FieldVector& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nv; ++i) out << fmt(f.coeffs[i]) << "\n";
  };
  scalars("phi", phi);
  scalars("mu", mu);
  scalars("p", p);
  out << "VECTORS velocity double\n";
  for (int i = 0; i < nv; ++i) out << fmt(u.coeffs[2 * i]) << " " << fmt(u.coeffs[2 * i + 1]) << " 0\n";

  if (!out) throw std::runtime_error("write_vtk_snapshot: write failed for " + path);
}

struct VtkSummary {
  std::string version;
  std::string dataset;
  int point_count = 0;
  int cell_count = 0;
  int cell_list_length = 0;
  int point_data_count = 0;
  std::vector<std::string> scalar_names;
  bool has_vectors = false;
};

/// Minimal conforming reader of the legacy header structure; used to check
/// that emitted files round-trip.
inline VtkSummary parse_vtk_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_vtk_summary: cannot open " + path);
  VtkSummary s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile Version", 0) != 0)
    throw std::runtime_error("parse_vtk_summary: missing version header");
  s.version = line.substr(std::string("# vtk DataFile Version ").size());
  if (!std::getline(in, line)) throw std::runtime_error("parse_vtk_summary: missing title");
  if (!std::getline(in, line) || line != "ASCII") throw std::runtime_error("parse_vtk_summary: expected ASCII");
  std::string word;
  while (in >> word) {
    if (word == "DATASET") {
      in >> s.dataset;
    } else if (word == "POINTS") {
      std::string type;
      in >> s.point_count >> type;
      for (int i = 0; i < 3 * s.point_count; ++i) {
        double v;
        if (!(in >> v)) throw std::runtime_error("parse_vtk_summary: truncated POINTS");
      }
    } else if (word == "CELLS") {
      in >> s.cell_count >> s.cell_list_length;
      for (int i = 0; i < s.cell_list_length; ++i) {
        int v;
        if (!(in >> v)) throw std::runtime_error("parse_vtk_summary: truncated CELLS");
      }
    } else if (word == "CELL_TYPES") {
      int n;
      in >> n;
      for (int i = 0; i < n; ++i) {
        int v;
        if (!(in >> v)) throw std::runtime_error("parse_vtk_summary: truncated CELL_TYPES");
      }
    } else if (word == "POINT_DATA") {
      in >> s.point_data_count;
    } else if (word == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps;
      s.scalar_names.push_back(name);
      std::string lut, lut_name;
      in >> lut >> lut_name;
      for (int i = 0; i < s.point_data_count * comps; ++i) {
        double v;
        if (!(in >> v)) throw std::runtime_error("parse_vtk_summary: truncated SCALARS " + name);
      }
    } else if (word == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      s.has_vectors = true;
      for (int i = 0; i < 3 * s.point_data_count; ++i) {
        double v;
        if (!(in >> v)) throw std::runtime_error("parse_vtk_summary: truncated VECTORS");
      }
    } else {
      throw std::runtime_error("parse_vtk_summary: unexpected token '" + word + "'");
    }
  }
  return s;
}

}  // namespace chns
