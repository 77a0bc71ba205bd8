#include "trunclr/likelihood.hpp"

#include "trunclr/errors.hpp"
#include "trunclr/trunc_gauss.hpp"

namespace trunclr {

GradientSampler::GradientSampler(IntervalUnion s, double zeta, SampleSource& source)
    : set_(std::move(s)), zeta_(zeta), source_(&source) {
  if (set_.empty()) throw InvalidArgument("gradient sampler needs a nonempty set");
  if (!(zeta_ > 0.0 && zeta_ < 1.0)) throw InvalidArgument("sampler accuracy zeta must lie in (0, 1)");
  x_hat_.resize(source.dim());
  x_tilde_.resize(source.dim());
}

void GradientSampler::sample(const Vector& w, Rng& rng, Vector& g) {
  const double y_hat = source_->draw(rng, x_hat_);
  source_->draw(rng, x_tilde_);
  const double z = trunc_gauss::sample(w.dot(x_tilde_), set_, zeta_, rng);
  g.resize(x_hat_.size());
  g.noalias() = z * x_tilde_ - y_hat * x_hat_;
}

GradSample gradient_sample(const Vector& w, const IntervalUnion& s, double zeta, SampleSource& source,
                           Rng& rng) {
  if (!w.allFinite()) throw InvalidArgument("gradient_sample: w must be finite");
  GradientSampler sampler(s, zeta, source);
  GradSample out{Vector(), 2};
  sampler.sample(w, rng, out.g);
  return out;
}

LikelihoodEval evaluate_likelihood(const Vector& w, const IntervalUnion& s, const Dataset& data,
                                   unsigned parts) {
  if (w.size() != data.dim()) throw InvalidArgument("likelihood: dimension mismatch");
  const int d = data.dim();
  LikelihoodEval out;
  out.gradient = Vector::Zero(d);
  out.hessian = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
    const double y = data.ys[i];
    if (!s.contains(y)) {
      ++out.excluded;
      continue;
    }
    ++out.used;
    const auto x = data.xs.row(i).transpose();
    const double mu = x.dot(w);
    const auto m = trunc_gauss::moments(mu, s);
    if (parts & kValue) out.value += 0.5 * (y - mu) * (y - mu) + m.log_mass;
    if (parts & kGradient) out.gradient.noalias() += (m.mean - y) * x;
    if (parts & kHessian) out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(x, m.variance);
  }
  if (out.used == 0) throw NoSurvivingSamples("no observed response lies in the set");
  const double inv = 1.0 / static_cast<double>(out.used);
  out.value *= inv;
  out.gradient *= inv;
  const Matrix full = out.hessian.selfadjointView<Eigen::Lower>();
  out.hessian = full * inv;
  return out;
}

double perturbed_nll(const Vector& w, const IntervalUnion& s, const Dataset& data) {
  return evaluate_likelihood(w, s, data, kValue).value;
}

Vector population_gradient(const Vector& w, const IntervalUnion& s, const Dataset& data) {
  return evaluate_likelihood(w, s, data, kGradient).gradient;
}

Matrix population_hessian(const Vector& w, const IntervalUnion& s, const Dataset& data) {
  return evaluate_likelihood(w, s, data, kHessian).hessian;
}

}  // namespace trunclr
