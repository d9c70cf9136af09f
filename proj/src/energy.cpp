#include "nocsynth/energy.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nocsynth {

EnergyModel EnergyModel::linear(double e_router, double e_wire, double default_mm, double lambda) {
  EnergyModel m{e_router, e_wire, default_mm, lambda};
  if (!m.valid()) throw std::invalid_argument("invalid energy model parameters");
  return m;
}

bool EnergyModel::valid() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  return ok(e_router_pj) && ok(e_wire_pj_mm) && ok(default_link_mm) && std::isfinite(lambda) &&
         lambda >= 1.0;
}

double distance(const Acg& g, int i, int j, DistanceMetric metric, const EnergyModel& em) {
  const AcgNode& a = g.node(i);
  const AcgNode& b = g.node(j);
  if (!a.pos || !b.pos) return em.default_link_mm;
  double dx = a.pos->x - b.pos->x;
  double dy = a.pos->y - b.pos->y;
  if (metric == DistanceMetric::Manhattan) return std::abs(dx) + std::abs(dy);
  return std::hypot(dx, dy);
}

double e_bit(const EnergyModel& m, double length_mm) {
  if (length_mm < 0) throw std::invalid_argument("negative link length");
  return m.e_router_pj + m.e_wire_pj_mm * length_mm;
}

EnergyModel parse_energy_spec(const std::string& spec) {
  if (spec == "unit") return EnergyModel::unit();
  const std::string prefix = "linear:";
  if (spec.rfind(prefix, 0) != 0)
    throw std::invalid_argument("energy spec must be 'unit' or 'linear:<e_router>,<e_wire>[,...]'");
  std::vector<double> vals;
  std::size_t pos = prefix.size();
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw std::invalid_argument("bad number '" + tok + "' in energy spec");
    vals.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (vals.size() < 2 || vals.size() > 4)
    throw std::invalid_argument("linear energy spec takes 2 to 4 numbers");
  EnergyModel m = EnergyModel::unit();
  m.e_router_pj = vals[0];
  m.e_wire_pj_mm = vals[1];
  if (vals.size() >= 3) m.default_link_mm = vals[2];
  if (vals.size() >= 4) m.lambda = vals[3];
  if (!m.valid()) throw std::invalid_argument("invalid energy model parameters");
  return m;
}

std::string describe_energy_model(const EnergyModel& m) {
  if (m.e_router_pj == 1.0 && m.e_wire_pj_mm == 0.0)
    return "unit (lambda=" + format_number(m.lambda) + ")";
  return "linear e_router=" + format_number(m.e_router_pj) + "pJ/bit e_wire=" +
         format_number(m.e_wire_pj_mm) + "pJ/bit/mm default_mm=" + format_number(m.default_link_mm) +
         " lambda=" + format_number(m.lambda);
}

}  // namespace nocsynth
