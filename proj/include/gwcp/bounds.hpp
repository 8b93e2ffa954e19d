#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gwcp/dist.hpp"

namespace gwcp {

/// Parameters of the weighted-supermartingale argument that certifies the
/// contact process cannot survive locally at lambda = nu*(h_min+1).
/// Constraints: 0 < r < 1, 0 < b < 1, b*r <= c, eps > 0.
struct Certificate {
  double nu = 0.0;
  double r = 0.0;
  double b = 0.0;
  double c = 0.0;
  double eps = 1e-4;
  int h_min = 0;

  double lambda() const noexcept { return nu * (h_min + 1); }
};

struct CertificateCheck {
  bool feasible = false;
  double lhs1 = 0.0;
  double lhs2 = 0.0;
  double slack1 = 0.0;  // (1-eps) - lhs1
  double slack2 = 0.0;
};

/// The two reduced feasibility inequalities:
///   nu*(1/r - b + h_min*r*(1-b))        < 1 - eps
///   b + c/r + (h_min+1)*nu*r*(1-b)      < 1 - eps
/// Throws BadCertificate when the structural constraints are violated;
/// infeasibility is reported through the return value instead.
CertificateCheck check_certificate(const Certificate& cert);

/// Direct verification of the full four-inequality system for every child
/// count n_v in [h_min, n_v_max] — an independent check that the reduction
/// behind check_certificate is conservative.
bool check_certificate_full(const Certificate& cert, int n_v_max);

/// Coarse grid over (r,b) with c = c_over_br*b*r, the binding inequality
/// solved for the largest nu per grid point, then three rounds of 10x local
/// refinement. Returns the certificate maximizing lambda, or nullopt if no
/// grid point is feasible.
std::optional<Certificate> search_certificate(int h_min, int grid_resolution = 200,
                                              double eps = 1e-4, double c_over_br = 1.0);

/// f_{h_min}(x, lambda) = lambda*x/(lambda+x+1) *
///   (1 - lambda/(lambda+x+1) * 1/(2 + lambda/(h_min+1)))^{-1}.
/// E_X f > 1 certifies global survival of the CP at rate lambda.
double f_hmin(double x, double lambda, int h_min);

struct RefinedUpperBound {
  bool finite = false;
  double lambda = 0.0;      // certified upper bound (E_X f > 1 there)
  double bracket_lo = 0.0;  // E_X f <= 1 here
  double bracket_hi = 0.0;  // == lambda when finite
};

/// Smallest lambda in [0.01, 100] with E_X f_{h_min}(X, lambda) > 1, bisected
/// to 1e-4; the expectation is an exact finite sum over the support.
/// Reports an infinite bound when the expectation never exceeds 1.
RefinedUpperBound lambda_g_upper_refined(const OffspringDistribution& f_t);

/// (h_min+1)/(h_min-1); valid for h_min >= 2.
double lambda_g_upper_simple(int h_min);

/// (h_min+1)/(2*sqrt(h_min)): below this rate the dominating continuous-time
/// BRW already fails to survive locally.
double lambda_l_lower_brw(int h_min);

struct BlockExpectation {
  double i_factor = 0.0;   // E_X f_{h_min}(X, lambda)
  double ii_factor = 0.0;  // E_X lambda*X/(lambda+X+1)
  std::uint64_t n = 1;
  double value = 0.0;      // i^n * ii, lower bound on the block mean offspring
  std::optional<std::uint64_t> min_n_supercritical;  // smallest n with i^n * ii > 1
};

BlockExpectation block_expectation(const OffspringDistribution& f_t, double lambda,
                                   std::uint64_t n);

struct BoundReport {
  int h_min = 0;
  double lambda_brw_lower = 0.0;                 // local-survival lower bound, formula
  std::optional<double> lambda_g_upper_simple;   // h_min >= 2 only
  RefinedUpperBound lambda_g_upper_refined;
  std::optional<Certificate> certificate;        // best found by search
  double lambda_l_lower_cert = 0.0;              // max(certificate lambda, brw lower)
  double lambda_g_upper = 0.0;                   // min of the upper bounds (inf if none)
  double lambda_l_lower = 0.0;
  bool weak_survival = false;                    // lambda_g_upper < lambda_l_lower
};

/// Assembles every certified bound for one tree law. The emitted certificate
/// is re-validated through both feasibility checks before it is reported.
BoundReport bound_report(const OffspringDistribution& f_t);

}  // namespace gwcp
