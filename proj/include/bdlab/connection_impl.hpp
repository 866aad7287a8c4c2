#pragma once

#include <cmath>
#include <numbers>

namespace bdlab {

template <class Pred>
TrigValue eval_trig(std::span<const TrigTerm> terms, double L, std::span<const double> point, Pred keep) {
  TrigValue out;
  out.gradient.assign(point.size(), 0.0);
  const double w = 2.0 * std::numbers::pi / L;
  for (const auto& t : terms) {
    if (!keep(t)) continue;
    double phase = 0.0;
    for (std::size_t a = 0; a < point.size(); ++a) phase += t.k[a] * point[a];
    phase *= w;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    out.value += t.coeff * (t.sine ? s : c);
    const double dphase = t.coeff * (t.sine ? c : -s);
    for (std::size_t a = 0; a < point.size(); ++a) out.gradient[a] += dphase * w * t.k[a];
  }
  return out;
}

}  // namespace bdlab
