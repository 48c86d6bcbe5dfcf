#include "pkin/qgrid.hpp"

namespace pkin {

QGrid::QGrid(int n_r_, int n_a_, double b_) : n_r(n_r_), n_a(n_a_), b(b_) {
  if (n_r < 2 || n_a < 4 || b <= 0.0)
    throw config_error("QGrid: need n_r >= 2, n_a >= 4, b > 0");
  const double R = std::sqrt(b);
  dr = R / n_r;
  da = 2.0 * M_PI / n_a;
  r_c.resize(n_r);
  m_r.resize(n_r);
  R_f.resize(n_r + 1);
  for (int i = 0; i <= n_r; ++i) R_f[i] = i * dr;
  R_f[n_r] = R;  // exact outer radius regardless of rounding
  for (int i = 0; i < n_r; ++i) {
    r_c[i] = (i + 0.5) * dr;
    m_r[i] = r_c[i] * dr * da;
  }
  a_c.resize(n_a);
  cos_a.resize(n_a);
  sin_a.resize(n_a);
  cos_af.resize(n_a);
  sin_af.resize(n_a);
  for (int j = 0; j < n_a; ++j) {
    a_c[j] = (j + 0.5) * da;
    cos_a[j] = std::cos(a_c[j]);
    sin_a[j] = std::sin(a_c[j]);
    const double A = (j + 1) * da;  // face between cells j and j+1
    cos_af[j] = std::cos(A);
    sin_af[j] = std::sin(A);
  }
}

double integrate_over_D(const QGrid& g, const QField& phi) {
  // phi is n_r x n_a; the measure depends on the radial index only.
  return (phi.colwise() * g.m_r).sum();
}

}  // namespace pkin
