#include "tcsde/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tcsde/errors.hpp"
#include "tcsde/special_functions.hpp"

namespace tcsde {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// exp() overflows just past this; used to reject unrepresentable results
constexpr double kMaxExpArg = 709.0;
// largest tolerable log of the Taylor term peak: beyond e^28 of
// cancellation no double-precision summation can certify anything useful
constexpr double kMaxTaylorLogPeak = 28.0;

double cos_pi(double x) { return sin_pi(0.5 - x); }

struct RouteResult {
  double value = 0.0;
  double achieved = std::numeric_limits<double>::infinity();
  bool certified = false;
};

// ---- Taylor route -------------------------------------------------------

// Compensated summation of sum_k z^k / Gamma(beta*k + 1) with an a
// posteriori error certificate. Two rounding sources are tracked: the
// summation itself, bounded by eps times the sum of absolute terms, and
// the term construction through exp(k log|z| - lgamma(beta k + 1)), whose
// relative error grows with the magnitude of that log argument. Both enter
// scaled by the condition number sum|term| / |sum|.
RouteResult taylor_route(double beta, double z, double rel_tol) {
  RouteResult out;
  double sum = 0.0;
  double comp = 0.0;
  double sum_abs = 0.0;
  double max_log_mag = 0.0;
  double prev_abs = std::numeric_limits<double>::infinity();
  double last_abs = 0.0;
  const double log_abs_z = std::log(std::abs(z));
  const int max_terms = 20000;
  int k = 0;
  for (; k < max_terms; ++k) {
    double term;
    if (k == 0) {
      term = 1.0;
    } else {
      const double k_log = static_cast<double>(k) * log_abs_z;
      const double lg = log_gamma(beta * k + 1.0);
      term = std::exp(k_log - lg);
      if (z < 0.0 && (k & 1)) term = -term;
      max_log_mag = std::max(max_log_mag, std::abs(k_log) + std::abs(lg));
    }
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    last_abs = std::abs(term);
    sum_abs += last_abs;
    if (k > 0 && last_abs < prev_abs && last_abs < 0.001 * kEps * std::abs(sum)) {
      ++k;
      break;
    }
    prev_abs = last_abs;
  }
  if (!std::isfinite(sum)) {
    throw RangeError("Mittag-Leffler series overflowed double range");
  }
  if (sum == 0.0) return out;  // total cancellation, certificate unavailable
  const double truncation = (k >= max_terms) ? last_abs / std::abs(sum) : 0.0;
  out.value = sum;
  out.achieved = kEps * (sum_abs / std::abs(sum)) * (4.0 + max_log_mag) +
                 2.0 * kEps + truncation;
  out.certified = out.achieved <= rel_tol;
  return out;
}

// ---- tail expansion route ----------------------------------------------

// E_beta(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(1 - beta*k) for large
// x. Terms are computed through the reflection formula
// 1/Gamma(1-y) = sin(pi*y) Gamma(y) / pi, and truncation is controlled by
// the sine-free envelope x^{-k} Gamma(beta*k) / pi, whose single minimum
// bounds the remainder even where sin(pi*beta*k) dips near zero.
RouteResult tail_route(double beta, double x, double rel_tol) {
  RouteResult out;
  const double log_x = std::log(x);
  double sum = 0.0;
  double comp = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  double omitted_env = std::numeric_limits<double>::infinity();
  const int max_terms = 300;
  for (int k = 1; k <= max_terms; ++k) {
    const double bk = beta * static_cast<double>(k);
    const double env =
        std::exp(log_gamma(bk) - static_cast<double>(k) * log_x) / kPi;
    if (env > prev_env) {
      omitted_env = env;  // envelope valley passed: stop before divergence
      break;
    }
    const double sign = (k & 1) ? 1.0 : -1.0;
    const double term = sign * sin_pi(bk) * env;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    prev_env = env;
    omitted_env = env;  // placeholder until the next envelope is seen
    if (env < 0.01 * rel_tol * std::abs(sum)) {
      const double bk1 = beta * static_cast<double>(k + 1);
      omitted_env =
          std::exp(log_gamma(bk1) - static_cast<double>(k + 1) * log_x) / kPi;
      break;
    }
  }
  if (sum <= 0.0) return out;
  out.value = sum;
  out.achieved = omitted_env / sum + 4.0 * kEps;
  out.certified = out.achieved <= rel_tol;
  return out;
}

// ---- spectral quadrature route ------------------------------------------

// Gauss-Kronrod 7-15 pair, standard abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                           0.38183005050511894495, 0.41795918367346938776};

template <typename F>
void gk15(const F& f, double a, double b, double& value, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j & 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }
  value = resk * half;
  err = std::abs(resk - resg) * half;
}

struct Interval {
  double a, b;
  int depth;
};

// Adaptive bisection with a per-interval error budget proportional to the
// interval length; the accumulated error estimate is returned for the
// caller's certificate. The global evaluation cap bounds the work when the
// budget is unattainable (the traversal is depth-first, so no stack-size
// guard would ever trigger); the error total stays honest either way, so
// hitting the cap surfaces as a failed certificate, never a wrong value.
template <typename F>
double adaptive_gk(const F& f, const std::vector<double>& breakpoints,
                   double abs_tol, double& err_out) {
  const double total_len = breakpoints.back() - breakpoints.front();
  std::vector<Interval> stack;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    stack.push_back({breakpoints[i], breakpoints[i + 1], 0});
  }
  double total = 0.0;
  double err_total = 0.0;
  int evals = 0;
  const int max_evals = 20000;
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    double v, e;
    gk15(f, iv.a, iv.b, v, e);
    ++evals;
    const double budget = abs_tol * (iv.b - iv.a) / total_len;
    if (e <= budget || iv.depth >= 50 || evals >= max_evals) {
      total += v;
      err_total += e;
    } else {
      const double mid = 0.5 * (iv.a + iv.b);
      stack.push_back({iv.a, mid, iv.depth + 1});
      stack.push_back({mid, iv.b, iv.depth + 1});
    }
  }
  err_out = err_total;
  return total;
}

// E_beta(-x) = sin(beta*pi)/(beta*pi) * integral_0^inf
//   exp(-(x v)^(1/beta)) / ((v + cos(beta*pi))^2 + sin(beta*pi)^2) dv.
// The integrand is cut where the exponent reaches 46 (tail below 1.1e-20
// of the Lorentzian mass) and pre-split around the Lorentzian peak that
// enters the domain for beta > 1/2.
RouteResult spectral_route(double beta, double x, double rel_tol) {
  RouteResult out;
  const double c = cos_pi(beta);
  const double s = sin_pi(beta);
  const double inv_beta = 1.0 / beta;
  const auto integrand = [&](double v) {
    if (v <= 0.0) return 1.0;
    const double expo = std::pow(x * v, inv_beta);
    const double num = (expo > kMaxExpArg) ? 0.0 : std::exp(-expo);
    const double dv = v + c;
    return num / (dv * dv + s * s);
  };
  const double v_max = std::pow(46.0, beta) / x;
  std::vector<double> pts{0.0};
  if (c < 0.0) {
    const double v_p = -c;
    for (double q : {v_p - 3.0 * s, v_p - s, v_p + s, v_p + 3.0 * s}) {
      if (q > 0.0 && q < v_max) pts.push_back(q);
    }
  }
  pts.push_back(v_max);
  std::sort(pts.begin(), pts.end());

  // first pass fixes the scale of the absolute budget
  double rough_err = 0.0;
  const double rough = adaptive_gk(integrand, pts, 1e300, rough_err);
  const double abs_tol =
      std::max(0.2 * rel_tol * std::abs(rough), 1e-300);
  double err = 0.0;
  const double integral = adaptive_gk(integrand, pts, abs_tol, err);
  const double tail_bound = 1.1e-20 * kPi / s;
  const double prefactor = s / (beta * kPi);
  out.value = prefactor * integral;
  if (out.value <= 0.0) return out;
  out.achieved = prefactor * (err + tail_bound) / out.value + 8.0 * kEps;
  out.certified = out.achieved <= rel_tol;
  return out;
}

}  // namespace

MLQuery::MLQuery(double beta_, double z_, double rel_tol_)
    : beta(beta_), z(z_), rel_tol(rel_tol_) {
  if (!(beta > 0.0) || !(beta <= 1.0)) {
    throw ParameterError("Mittag-Leffler order must lie in (0,1], got " +
                         std::to_string(beta_));
  }
  if (!std::isfinite(z)) throw ParameterError("Mittag-Leffler argument must be finite");
  if (!(rel_tol > 0.0) || !(rel_tol <= 1e-4)) {
    throw ParameterError("rel_tol must lie in (0, 1e-4]");
  }
}

double ml_eval(const MLQuery& query) {
  const double beta = query.beta;
  const double z = query.z;
  if (beta == 1.0) {
    if (z > kMaxExpArg) throw RangeError("exp overflow in Mittag-Leffler value");
    return std::exp(z);
  }
  if (z == 0.0) return 1.0;
  const double log_peak = std::pow(std::abs(z), 1.0 / beta);
  if (z > 0.0) {
    if (log_peak > kMaxExpArg) {
      throw RangeError("Mittag-Leffler value overflows double range");
    }
    const RouteResult r = taylor_route(beta, z, query.rel_tol);
    if (r.certified) return r.value;
    throw AccuracyError("Mittag-Leffler tolerance unachievable at beta=" +
                            std::to_string(beta) + " z=" + std::to_string(z),
                        r.achieved);
  }
  double best_achieved = std::numeric_limits<double>::infinity();
  if (std::abs(z) <= 5.0 && log_peak <= kMaxTaylorLogPeak) {
    const RouteResult r = taylor_route(beta, z, query.rel_tol);
    if (r.certified) return r.value;
    best_achieved = std::min(best_achieved, r.achieved);
  }
  if (z <= -5.0 / beta) {
    const RouteResult r = tail_route(beta, -z, query.rel_tol);
    if (r.certified) return r.value;
    best_achieved = std::min(best_achieved, r.achieved);
  }
  const RouteResult r = spectral_route(beta, -z, query.rel_tol);
  if (r.certified) return r.value;
  best_achieved = std::min(best_achieved, r.achieved);
  throw AccuracyError("Mittag-Leffler tolerance unachievable at beta=" +
                          std::to_string(beta) + " z=" + std::to_string(z),
                      best_achieved);
}

double ml_eval(double beta, double z, double rel_tol) {
  return ml_eval(MLQuery(beta, z, rel_tol));
}

std::vector<double> ml_bound_curve(double beta, double lambda, double p,
                                   std::span<const double> times) {
  if (!(lambda > 0.0)) throw ParameterError("decay rate must be > 0");
  if (!(p > 0.0)) throw ParameterError("moment order must be > 0");
  std::vector<double> values;
  values.reserve(times.size());
  for (const double t : times) {
    if (!(t >= 0.0)) throw ParameterError("times must be >= 0");
    values.push_back(ml_eval(beta, -lambda * p * std::pow(t, beta)));
  }
  return values;
}

}  // namespace tcsde
