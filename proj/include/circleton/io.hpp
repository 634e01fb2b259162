/// Plot-ready exporters (CSV / JSON / OBJ) for curve samples and the JSON
/// reader for finite type potential files.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "circleton/birkhoff.hpp"
#include "circleton/frames.hpp"

namespace circleton {

enum class ExportFormat { csv, json, obj };

struct ExportRecord {
  ExportFormat format{ExportFormat::csv};
  std::string path;
  CurveSamples curve;
};

inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header `t,x,y,z,kappa,tau`, 17 significant digits, LF endings; undefined
/// torsion becomes an empty field. Row count = sample count + header.
inline std::string curve_to_csv(const CurveSamples& c) {
  std::ostringstream os;
  os << "t,x,y,z,kappa,tau\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    os << format17(c.t[i]) << ',' << format17(c.points[i].x) << ','
       << format17(c.points[i].y) << ',' << format17(c.points[i].z) << ','
       << format17(c.kappa[i]) << ',';
    if (c.tau_defined[i]) os << format17(c.tau[i]);
    os << '\n';
  }
  return os.str();
}

/// Metadata record plus per-sample arrays; undefined torsion is null.
inline std::string curve_to_json(const CurveSamples& c) {
  nlohmann::ordered_json j;
  j["omega"] = c.meta.omega;
  j["ks"] = c.meta.ks;
  auto alphas = nlohmann::ordered_json::array();
  for (Complex a : c.meta.alphas)
    alphas.push_back({a.real(), a.imag()});
  j["alpha_list"] = std::move(alphas);
  j["samples"] = c.meta.sample_count;
  j["closure_error"] = c.meta.closure_error;
  j["bending_energy"] = c.meta.bending_energy;
  j["peak_count"] = c.meta.peak_count;
  auto arr = [](auto&& get, std::size_t n) {
    auto a = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) a.push_back(get(i));
    return a;
  };
  const std::size_t n = c.t.size();
  j["t"] = arr([&](std::size_t i) { return c.t[i]; }, n);
  j["x"] = arr([&](std::size_t i) { return c.points[i].x; }, n);
  j["y"] = arr([&](std::size_t i) { return c.points[i].y; }, n);
  j["z"] = arr([&](std::size_t i) { return c.points[i].z; }, n);
  j["kappa"] = arr([&](std::size_t i) { return c.kappa[i]; }, n);
  auto tau = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (c.tau_defined[i])
      tau.push_back(c.tau[i]);
    else
      tau.push_back(nullptr);
  }
  j["tau"] = std::move(tau);
  return j.dump(2) + "\n";
}

/// Wavefront polyline: one `v` line per sample, then a single closed
/// `l 1 2 .. N 1` element.
inline std::string curve_to_obj(const CurveSamples& c) {
  std::ostringstream os;
  for (const Su2Vector& p : c.points)
    os << "v " << format17(p.x) << ' ' << format17(p.y) << ' '
       << format17(p.z) << '\n';
  os << 'l';
  for (std::size_t i = 1; i <= c.points.size(); ++i) os << ' ' << i;
  os << " 1\n";
  return os.str();
}

inline std::string render_curve(const CurveSamples& c, ExportFormat f) {
  switch (f) {
    case ExportFormat::csv: return curve_to_csv(c);
    case ExportFormat::json: return curve_to_json(c);
    case ExportFormat::obj: return curve_to_obj(c);
  }
  throw std::logic_error("render_curve: unknown format");
}

inline void write_curve(const ExportRecord& rec) {
  std::ofstream out(rec.path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_curve: cannot open " + rec.path);
  out << render_curve(rec.curve, rec.format);
}

/// Potential file: {"g": <int>, "xi": [m_{-g}, .., m_1]} with each matrix a
/// 2x2 row-major array of [re, im] pairs. Validation failures carry the
/// violated invariant in the message.
inline FiniteTypePotential load_potential_json(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_potential_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PotentialError(std::string("potential file is not valid JSON: ") +
                         e.what());
  }
  if (!j.contains("g") || !j["g"].is_number_integer())
    throw PotentialError("potential file must contain an integer field 'g'");
  if (!j.contains("xi") || !j["xi"].is_array())
    throw PotentialError(
        "potential file must contain an array 'xi' of g + 2 matrices "
        "(j = -g..1)");
  const int genus = j["g"].get<int>();
  std::vector<Matrix2C> cs;
  for (const auto& mj : j["xi"]) {
    if (!mj.is_array() || mj.size() != 2 || !mj[0].is_array() ||
        mj[0].size() != 2 || !mj[1].is_array() || mj[1].size() != 2)
      throw PotentialError("each xi entry must be a 2x2 array of [re, im]");
    auto entry = [&](int r, int c) {
      const auto& e = mj[r][c];
      if (!e.is_array() || e.size() != 2)
        throw PotentialError("matrix entries must be [re, im] pairs");
      return Complex(e[0].get<double>(), e[1].get<double>());
    };
    cs.push_back({entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1)});
  }
  return FiniteTypePotential::make(genus, std::move(cs));
}

}  // namespace circleton
