#include "pkin/potentials.hpp"

#include <algorithm>
#include <sstream>

namespace pkin {

double q_exponent(const PotentialSpec& spec, double s, double theta) {
  const auto pv = eval_potential(spec, s);
  return (pv.U_e + theta * pv.U_eta) / theta;
}

QField maxwellian(const PotentialSpec& spec, const QGrid& g, double theta) {
  if (!(theta > 0.0)) throw std::domain_error("maxwellian: theta must be > 0");
  // Shift the exponent by its minimum over the grid before exponentiating so
  // stiff potentials cannot underflow every cell at once; the shift cancels
  // in the normalization.
  ArrayX Phi(g.n_r);
  for (int i = 0; i < g.n_r; ++i) Phi[i] = q_exponent(spec, g.s_of(i), theta);
  const double Phi_min = Phi.minCoeff();
  ArrayX w = (-(Phi - Phi_min)).exp();
  const double Z = (w * g.m_r).sum() * g.n_a;
  if (!(Z > 0.0))
    throw solver_error("maxwellian: normalization underflowed to zero");
  QField M(g.n_r, g.n_a);
  for (int j = 0; j < g.n_a; ++j) M.col(j) = w / Z;
  return M;
}

ValidationReport validate_assumptions(const PotentialSpec& spec,
                                      int n_samples) {
  if (n_samples < 16)
    throw std::invalid_argument("validate_assumptions: n_samples >= 16");
  ValidationReport rep;
  if (spec.kind == SpringKind::Custom ||
      spec.entropic_kind == EntropicKind::Custom) {
    rep.pass = false;
    rep.summary = "custom potential: no closed form to validate (reported as failure)";
    return rep;
  }

  // Sample [0, b/2) geometrically refined toward the singular end so the
  // near-boundary trend of the curvature ratio is actually probed.
  const double s_max = 0.5 * spec.b * (1.0 - 1e-8);
  std::vector<double> samples;
  samples.reserve(2 * n_samples);
  for (int k = 0; k < n_samples; ++k)
    samples.push_back(s_max * k / n_samples);  // uniform sweep
  for (int k = 1; k <= n_samples; ++k)         // geometric approach to b/2
    samples.push_back(0.5 * spec.b * (1.0 - std::pow(2.0, -(k + 2))));
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  rep.monotone_increasing = true;
  rep.convex = true;
  rep.entropic_bounded = true;
  double ratio_first = 0.0;
  bool first = true;
  for (double s : samples) {
    if (s >= 0.5 * spec.b) continue;
    const auto pv = eval_potential(spec, s);
    rep.monotone_increasing = rep.monotone_increasing && pv.dU_e >= 0.0;
    rep.convex = rep.convex && pv.ddU_e >= 0.0;
    const double ratio = pv.ddU_e / sqr(pv.dU_e);
    rep.ratio_sup = std::max(rep.ratio_sup, ratio);
    rep.ratio_near_boundary = ratio;  // last sample wins (sorted ascending)
    if (first) {
      ratio_first = ratio;
      first = false;
    }
    rep.entropic_sup = std::max(rep.entropic_sup, std::abs(pv.dU_eta));
    const double q2 = 2.0 * s;
    const double lap = 2.0 * pv.dU_e + q2 * pv.ddU_e;  // Laplacian of U_e, d=2
    const double grad2 = sqr(pv.dU_e) * q2;
    rep.laplacian_bound_C = std::max(rep.laplacian_bound_C, lap / (1.0 + grad2));
    rep.laplacian_bounded = rep.laplacian_bounded || lap >= 0.0;
  }
  rep.ratio_bounded = std::isfinite(rep.ratio_sup);
  // Decay test: the ratio at the deepest near-boundary sample must have
  // dropped well below its bulk value.  For WarnerFENE the ratio is the
  // constant 2/(H b), so this fails; for FENELike it behaves like
  // (1 - 2s/b)^r -> 0 and passes.
  rep.ratio_vanishes = rep.ratio_near_boundary < 0.05 * std::max(ratio_first, rep.ratio_sup);
  rep.laplacian_bounded = std::isfinite(rep.laplacian_bound_C);
  rep.entropic_bounded = rep.entropic_sup < 1e6;

  rep.pass = rep.monotone_increasing && rep.convex && rep.ratio_bounded &&
             rep.entropic_bounded && rep.laplacian_bounded;

  std::ostringstream os;
  os << (spec.kind == SpringKind::WarnerFENE ? "WarnerFENE" : "FENELike")
     << ": monotone=" << rep.monotone_increasing << " convex=" << rep.convex
     << " curvature ratio sup=" << rep.ratio_sup
     << (rep.ratio_vanishes ? " (vanishes near b/2)"
                            : " (does NOT vanish near b/2)")
     << " |U_eta'| sup=" << rep.entropic_sup
     << " laplacian C=" << rep.laplacian_bound_C;
  rep.summary = os.str();
  return rep;
}

void MaterialFunctions::validate() const {
  if (!(beta > 5.0 / 6.0)) {
    std::ostringstream os;
    os << "heat.beta = " << beta
       << " rejected: the conductivity exponent must satisfy beta > 5/6";
    throw config_error(os.str());
  }
  if (!(kappa_c0 > 0.0) || kappa_c1 < 0.0)
    throw config_error("heat.kappa_c0 must be > 0 and heat.kappa_c1 >= 0");
  if (!(nu_floor > 0.0)) throw config_error("flow.nu_floor must be > 0");
}

}  // namespace pkin
