#include "trunclr/trunc_gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "trunclr/errors.hpp"
#include "trunclr/normal.hpp"

namespace trunclr::trunc_gauss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;

struct PieceStats {
  double log_mass;
  double mean;
  double variance;
};

// Moments of N(0, 1) restricted to [a, b], a < b.
PieceStats standardized_piece(double a, double b) {
  bool mirrored = false;
  if (b <= 0.0) {
    const double lo = -b;
    b = -a;
    a = lo;
    mirrored = true;
  }
  PieceStats st{};
  if (a >= 0.0) {
    // Entirely in the upper half-line: express everything relative to Q(a).
    const double la = normal::log_upper_tail(a);
    const double lb = normal::log_upper_tail(b);
    const double one_minus_rho = -std::expm1(lb - la);
    const double lambda = 1.0 / normal::mills_ratio(a);
    st.log_mass = la + std::log(one_minus_rho);
    double second;
    if (std::isinf(b)) {
      st.mean = lambda;
      second = a * lambda;
    } else {
      const double expo = -0.5 * (b - a) * (b + a);
      const double r = std::exp(expo);
      st.mean = lambda * -std::expm1(expo) / one_minus_rho;
      second = (a - b * r) * lambda / one_minus_rho;
    }
    st.variance = 1.0 + second - st.mean * st.mean;
  } else {
    const double z = 0.5 * (std::erf(b * kInvSqrt2) - std::erf(a * kInvSqrt2));
    const double pa = normal::pdf(a);
    const double pb = normal::pdf(b);
    const double apa = std::isinf(a) ? 0.0 : a * pa;
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    st.log_mass = std::log(z);
    st.mean = (pa - pb) / z;
    st.variance = 1.0 + (apa - bpb) / z - st.mean * st.mean;
  }
  st.variance = std::max(st.variance, 0.0);
  if (mirrored) st.mean = -st.mean;
  return st;
}

// Inverse-CDF draw from N(0, 1) restricted to [a, b] given u in [0, 1).
double standardized_piece_draw(double a, double b, double u) {
  bool mirrored = false;
  if (b <= 0.0) {
    const double lo = -b;
    b = -a;
    a = lo;
    mirrored = true;
  }
  double z;
  if (a >= 0.0) {
    const double la = normal::log_upper_tail(a);
    const double lb = normal::log_upper_tail(b);
    const double one_minus_rho = -std::expm1(lb - la);
    z = normal::upper_tail_quantile_log(la + std::log1p(-u * one_minus_rho));
  } else {
    const double qa = normal::upper_tail(-a);  // Phi(a)
    const double qb = normal::upper_tail(b);
    const double mass = 0.5 * (std::erf(b * kInvSqrt2) - std::erf(a * kInvSqrt2));
    const double lower = qa + u * mass;  // Phi(z)
    if (lower < 0.5) {
      z = -normal::upper_tail_quantile(lower);
    } else {
      z = normal::upper_tail_quantile(qb + (1.0 - u) * mass);
    }
  }
  z = std::clamp(z, a, b);
  return mirrored ? -z : z;
}

[[noreturn]] void throw_zero_mass(double mu, const IntervalUnion& s) {
  std::ostringstream msg;
  msg << "zero Gaussian mass: mu=" << mu << " S=[";
  for (const auto& iv : s.pieces()) msg << "(" << iv.lo << "," << iv.hi << ")";
  msg << "]";
  throw ZeroMassError(msg.str());
}

}  // namespace

Moments moments(double mu, const IntervalUnion& s) {
  if (!std::isfinite(mu) || s.empty()) throw_zero_mass(mu, s);
  const auto& pieces = s.pieces();
  if (pieces.size() == 1) {
    const auto st = standardized_piece(pieces[0].lo - mu, pieces[0].hi - mu);
    if (!std::isfinite(st.log_mass)) throw_zero_mass(mu, s);
    return {st.log_mass, mu + st.mean, st.variance};
  }

  std::vector<PieceStats> stats;
  stats.reserve(pieces.size());
  double best = -kInf;
  for (const auto& iv : pieces) {
    stats.push_back(standardized_piece(iv.lo - mu, iv.hi - mu));
    best = std::max(best, stats.back().log_mass);
  }
  if (!std::isfinite(best)) throw_zero_mass(mu, s);

  double total = 0.0;
  double mean = 0.0;
  for (const auto& st : stats) {
    const double w = std::exp(st.log_mass - best);
    total += w;
    mean += w * st.mean;
  }
  mean /= total;
  double var = 0.0;
  for (const auto& st : stats) {
    const double w = std::exp(st.log_mass - best) / total;
    const double dev = st.mean - mean;
    var += w * (st.variance + dev * dev);
  }
  return {best + std::log(total), mu + mean, var};
}

double sample(double mu, const IntervalUnion& s, double zeta, Rng& rng) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidArgument("sampler accuracy zeta must lie in (0, 1)");
  if (!std::isfinite(mu) || s.empty()) throw_zero_mass(mu, s);
  const auto& pieces = s.pieces();

  std::size_t chosen = 0;
  if (pieces.size() > 1) {
    // Small fixed buffer covers typical learned sets without allocating.
    constexpr std::size_t kStack = 64;
    double stack_buf[kStack];
    std::vector<double> heap_buf;
    double* logs = stack_buf;
    if (pieces.size() > kStack) {
      heap_buf.resize(pieces.size());
      logs = heap_buf.data();
    }
    double best = -kInf;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      logs[i] = normal::log_interval_mass(pieces[i].lo - mu, pieces[i].hi - mu);
      best = std::max(best, logs[i]);
    }
    if (!std::isfinite(best)) throw_zero_mass(mu, s);
    double total = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      logs[i] = std::exp(logs[i] - best);
      total += logs[i];
    }
    double target = rng.uniform() * total;
    // If rounding leaves target past the cumulative total, the last piece
    // with positive weight is kept.
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (logs[i] > 0.0) chosen = i;
      if (target < logs[i]) break;
      target -= logs[i];
    }
  }
  const auto& piece = pieces[chosen];
  const double z = standardized_piece_draw(piece.lo - mu, piece.hi - mu, rng.uniform());
  return std::clamp(mu + z, piece.lo, piece.hi);
}

}  // namespace trunclr::trunc_gauss
