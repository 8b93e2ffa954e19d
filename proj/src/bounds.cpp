#include "gwcp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwcp/error.hpp"

namespace gwcp {

namespace {

void validate(const Certificate& cert) {
  if (cert.h_min < 1) raise(Errc::BadCertificate, "h_min must be >= 1");
  if (!(cert.nu > 0.0)) raise(Errc::BadCertificate, "nu must be > 0");
  if (!(cert.r > 0.0 && cert.r < 1.0)) raise(Errc::BadCertificate, "need 0 < r < 1");
  if (!(cert.b > 0.0 && cert.b < 1.0)) raise(Errc::BadCertificate, "need 0 < b < 1");
  if (!(cert.b * cert.r <= cert.c)) raise(Errc::BadCertificate, "need b*r <= c");
  if (!(cert.eps > 0.0)) raise(Errc::BadCertificate, "need eps > 0");
}

double expectation_f(const OffspringDistribution& f_t, double lambda) {
  double acc = 0.0;
  const auto& ks = f_t.support();
  const auto& ps = f_t.probabilities();
  for (std::size_t i = 0; i < ks.size(); ++i)
    acc += ps[i] * f_hmin(static_cast<double>(ks[i]), lambda, f_t.h_min());
  return acc;
}

double expectation_ratio(const OffspringDistribution& f_t, double lambda) {
  double acc = 0.0;
  const auto& ks = f_t.support();
  const auto& ps = f_t.probabilities();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double x = static_cast<double>(ks[i]);
    acc += ps[i] * lambda * x / (lambda + x + 1.0);
  }
  return acc;
}

// Largest nu satisfying both reduced inequalities at (r, b), shrunk so the
// strict inequalities hold in double precision. Negative when infeasible.
double best_nu_at(int h_min, double r, double b, double eps, double c_over_br) {
  const double target = 1.0 - eps;
  const double d1 = 1.0 / r - b + h_min * r * (1.0 - b);
  const double head2 = b + c_over_br * b;  // b + c/r with c = c_over_br*b*r
  const double d2 = (h_min + 1) * r * (1.0 - b);
  if (target - head2 <= 0.0) return -1.0;
  const double nu1 = target / d1;
  const double nu2 = (target - head2) / d2;
  return std::min(nu1, nu2) * (1.0 - 1e-9);
}

}  // namespace

CertificateCheck check_certificate(const Certificate& cert) {
  validate(cert);
  CertificateCheck out;
  const double h = cert.h_min;
  out.lhs1 = cert.nu * (1.0 / cert.r - cert.b + h * cert.r * (1.0 - cert.b));
  out.lhs2 = cert.b + cert.c / cert.r + (h + 1.0) * cert.nu * cert.r * (1.0 - cert.b);
  const double target = 1.0 - cert.eps;
  out.slack1 = target - out.lhs1;
  out.slack2 = target - out.lhs2;
  out.feasible = out.lhs1 < target && out.lhs2 < target;
  return out;
}

bool check_certificate_full(const Certificate& cert, int n_v_max) {
  validate(cert);
  if (n_v_max < cert.h_min) raise(Errc::BadInput, "n_v_max must be >= h_min");
  const double lambda = cert.lambda();
  const double target = 1.0 - cert.eps;
  const double up_gain = 1.0 / cert.r - cert.b;      // parent infection term
  const double down_gain = cert.r * (1.0 - cert.b);  // child infection term
  const double pair = cert.b * cert.r - cert.c;
  for (int n_v = cert.h_min; n_v <= n_v_max; ++n_v) {
    const double per_edge = lambda / (n_v + 1.0);
    const double lhs_00 = per_edge * up_gain + per_edge * n_v * down_gain;
    const double lhs_0n = pair * n_v + per_edge * up_gain;
    const double lhs_10 = cert.b + per_edge * n_v * down_gain + cert.c / cert.r;
    const double lhs_1n = cert.b + pair * n_v + cert.c / cert.r;
    if (!(lhs_00 < target && lhs_0n < target && lhs_10 < target && lhs_1n < target))
      return false;
  }
  return true;
}

std::optional<Certificate> search_certificate(int h_min, int grid_resolution, double eps,
                                              double c_over_br) {
  if (h_min < 1) raise(Errc::BadInput, "h_min must be >= 1");
  if (grid_resolution < 2) raise(Errc::BadInput, "grid resolution must be >= 2");
  if (!(eps > 0.0 && eps < 1.0)) raise(Errc::BadInput, "eps must lie in (0,1)");
  if (!(c_over_br >= 1.0)) raise(Errc::BadInput, "c/(b*r) must be >= 1");

  double best_nu = -1.0, best_r = 0.0, best_b = 0.0;
  auto scan = [&](double r_lo, double r_hi, double b_lo, double b_hi, int points) {
    const double margin = 1e-9;
    r_lo = std::max(r_lo, margin);
    r_hi = std::min(r_hi, 1.0 - margin);
    b_lo = std::max(b_lo, margin);
    b_hi = std::min(b_hi, 1.0 - margin);
    for (int i = 0; i < points; ++i) {
      const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / points;
      for (int j = 0; j < points; ++j) {
        const double b = b_lo + (b_hi - b_lo) * (j + 0.5) / points;
        const double nu = best_nu_at(h_min, r, b, eps, c_over_br);
        if (nu > best_nu) { best_nu = nu; best_r = r; best_b = b; }
      }
    }
  };

  scan(0.0, 1.0, 0.0, 1.0, grid_resolution);
  if (best_nu <= 0.0) return std::nullopt;
  // The max-min surface has a ridge where the two inequalities bind together;
  // the window spans a few coarse cells so each round can recenter along it
  // while the spacing drops 10x.
  double spacing = 1.0 / grid_resolution;
  for (int round = 0; round < 3; ++round) {
    const double window = 2.5 * spacing;
    scan(best_r - window, best_r + window, best_b - window, best_b + window, 50);
    spacing /= 10.0;
  }

  Certificate cert;
  cert.h_min = h_min;
  cert.nu = best_nu;
  cert.r = best_r;
  cert.b = best_b;
  cert.c = c_over_br * best_b * best_r;
  cert.eps = eps;
  // The reduction to two inequalities needs 1/r - b > r*(1-b); for r,b in
  // (0,1) this always holds, but assert rather than assume.
  if (!(1.0 / cert.r - cert.b > cert.r * (1.0 - cert.b)))
    raise(Errc::InternalInvariant, "certificate side condition violated");
  if (!check_certificate(cert).feasible)
    raise(Errc::InternalInvariant, "search produced infeasible certificate");
  return cert;
}

double f_hmin(double x, double lambda, int h_min) {
  if (!(x > 0.0)) raise(Errc::BadInput, "x must be > 0");
  if (!(lambda > 0.0)) raise(Errc::BadInput, "lambda must be > 0");
  if (h_min < 1) raise(Errc::BadInput, "h_min must be >= 1");
  const double denom = lambda + x + 1.0;
  const double head = lambda * x / denom;
  const double correction = 1.0 - (lambda / denom) / (2.0 + lambda / (h_min + 1.0));
  return head / correction;
}

RefinedUpperBound lambda_g_upper_refined(const OffspringDistribution& f_t) {
  if (f_t.allows_zero()) raise(Errc::ZeroMass, "refined bound needs a tree law");
  RefinedUpperBound out;
  double lo = 0.01, hi = 100.0;
  if (expectation_f(f_t, hi) <= 1.0) {
    out.finite = false;
    out.lambda = std::numeric_limits<double>::infinity();
    return out;
  }
  if (expectation_f(f_t, lo) > 1.0) {
    // Already supercritical at the bottom of the bracket; report it as the bound.
    out.finite = true;
    out.lambda = out.bracket_hi = lo;
    out.bracket_lo = 0.0;
    return out;
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (expectation_f(f_t, mid) > 1.0 ? hi : lo) = mid;
  }
  out.finite = true;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.lambda = hi;  // E_X f > 1 is certified at hi, not at lo
  return out;
}

double lambda_g_upper_simple(int h_min) {
  if (h_min < 2) raise(Errc::BadInput, "simple upper bound needs h_min >= 2");
  return (h_min + 1.0) / (h_min - 1.0);
}

double lambda_l_lower_brw(int h_min) {
  if (h_min < 1) raise(Errc::BadInput, "h_min must be >= 1");
  return (h_min + 1.0) / (2.0 * std::sqrt(static_cast<double>(h_min)));
}

BlockExpectation block_expectation(const OffspringDistribution& f_t, double lambda,
                                   std::uint64_t n) {
  if (f_t.allows_zero()) raise(Errc::ZeroMass, "block expectation needs a tree law");
  if (n < 1) raise(Errc::BadInput, "n must be >= 1");
  BlockExpectation out;
  out.n = n;
  out.i_factor = expectation_f(f_t, lambda);
  out.ii_factor = expectation_ratio(f_t, lambda);
  out.value = std::pow(out.i_factor, static_cast<double>(n)) * out.ii_factor;
  if (out.i_factor > 1.0) {
    auto min_n = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(-std::log(out.ii_factor) / std::log(out.i_factor))));
    while (std::pow(out.i_factor, static_cast<double>(min_n)) * out.ii_factor <= 1.0) ++min_n;
    out.min_n_supercritical = min_n;
  }
  return out;
}

BoundReport bound_report(const OffspringDistribution& f_t) {
  if (f_t.allows_zero()) raise(Errc::ZeroMass, "bound report needs a tree law");
  BoundReport rep;
  rep.h_min = f_t.h_min();
  rep.lambda_brw_lower = lambda_l_lower_brw(rep.h_min);
  if (rep.h_min >= 2) rep.lambda_g_upper_simple = lambda_g_upper_simple(rep.h_min);
  rep.lambda_g_upper_refined = lambda_g_upper_refined(f_t);

  rep.lambda_l_lower_cert = rep.lambda_brw_lower;
  if (auto cert = search_certificate(rep.h_min)) {
    if (check_certificate(*cert).feasible && check_certificate_full(*cert, 10'000)) {
      rep.certificate = cert;
      rep.lambda_l_lower_cert = std::max(rep.lambda_l_lower_cert, cert->lambda());
    }
  }

  rep.lambda_g_upper = std::numeric_limits<double>::infinity();
  if (rep.lambda_g_upper_simple)
    rep.lambda_g_upper = std::min(rep.lambda_g_upper, *rep.lambda_g_upper_simple);
  if (rep.lambda_g_upper_refined.finite)
    rep.lambda_g_upper = std::min(rep.lambda_g_upper, rep.lambda_g_upper_refined.lambda);
  rep.lambda_l_lower = rep.lambda_l_lower_cert;
  rep.weak_survival = rep.lambda_g_upper < rep.lambda_l_lower;
  return rep;
}

}  // namespace gwcp
