#include "chatter/params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "chatter/errors.hpp"

namespace chatter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Field table shared by the parser and the writer.
using Field = double PhysicalParams::*;
const std::pair<const char*, Field> kFields[] = {
    {"m", &PhysicalParams::m},
    {"c_x", &PhysicalParams::c_x},
    {"c_y", &PhysicalParams::c_y},
    {"k_x", &PhysicalParams::k_x},
    {"k_y", &PhysicalParams::k_y},
    {"K_x", &PhysicalParams::K_x},
    {"K_y", &PhysicalParams::K_y},
    {"omega_cut", &PhysicalParams::omega_cut},
    {"q", &PhysicalParams::q},
    {"nu", &PhysicalParams::nu},
    {"R", &PhysicalParams::R},
    {"Omega0", &PhysicalParams::Omega0},
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool same_to(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void validate(const PhysicalParams& phys) {
  for (const auto& [name, field] : kFields) {
    const double v = phys.*field;
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("physical parameter '") + name +
                        "' must be positive and finite");
    }
  }
}

void require_symmetric_tool(const PhysicalParams& phys) {
  if (!same_to(phys.c_x, phys.c_y, 1e-12) || !same_to(phys.k_x, phys.k_y, 1e-12)) {
    throw DomainError("characteristic equation requires a symmetric tool (c_x=c_y, k_x=k_y)");
  }
}

double spindle_gain(const PhysicalParams& phys) {
  validate(phys);
  return phys.R * std::pow(phys.Omega0, phys.q + 1.0) * phys.k_x /
         (std::pow(kTwoPi * phys.nu, phys.q) * phys.K_x * phys.omega_cut);
}

double stationary_delay(const PhysicalParams& phys, double c) {
  if (!(c > 0.0)) throw DomainError("spindle gain must be positive");
  const double base =
      kTwoPi * phys.R * phys.k_x / (c * phys.K_x * phys.omega_cut * std::pow(phys.nu, phys.q));
  return std::pow(base, 1.0 / (phys.q + 1.0));
}

DimensionlessParams reduce(const PhysicalParams& phys) {
  DimensionlessParams d;
  d.c_gain = spindle_gain(phys);
  d.q = phys.q;
  d.k_star = stationary_delay(phys, d.c_gain);
  d.xi = phys.c_x * d.k_star / phys.m;
  d.delta = phys.k_x * d.k_star * d.k_star / phys.m;
  d.k_r = phys.K_y / phys.K_x;
  d.p = phys.nu / (phys.R * phys.Omega0);
  d.K1 = phys.q * phys.K_y * phys.omega_cut * std::pow(kTwoPi * phys.R, phys.q - 1.0) / phys.k_x;
  d.h2 = d.K1 * std::pow(d.p, phys.q - 1.0);
  d.h1 = d.h2 * (1.0 - d.p / d.k_r);
  return d;
}

StationaryState stationary_state(const PhysicalParams& phys, double c) {
  validate(phys);
  StationaryState s;
  s.k_star = stationary_delay(phys, c);
  const double force = std::pow(phys.nu * s.k_star, phys.q) * phys.omega_cut;
  s.r_star = phys.K_x * force / phys.k_x;
  s.rho_star = -phys.K_y * force / phys.k_y;
  return s;
}

PhysicalParams parse_params(std::istream& in) {
  std::map<std::string, Field> lookup;
  for (const auto& [name, field] : kFields) lookup.emplace(name, field);

  PhysicalParams phys;
  std::map<std::string, bool> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw DomainError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (seen[key]) {
      throw DomainError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    std::istringstream vs(value);
    vs.imbue(std::locale::classic());
    double v = 0.0;
    if (!(vs >> v) || !(vs >> std::ws).eof()) {
      throw DomainError("line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
    phys.*(it->second) = v;
    seen[key] = true;
  }
  for (const auto& [name, field] : kFields) {
    if (std::string(name) != "q" && !seen[name]) {
      throw DomainError(std::string("missing key '") + name + "'");
    }
  }
  validate(phys);
  return phys;
}

PhysicalParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open parameter file '" + path + "'");
  return parse_params(in);
}

void write_params(std::ostream& out, const PhysicalParams& phys) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (const auto& [name, field] : kFields) out << name << '=' << phys.*field << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace chatter
