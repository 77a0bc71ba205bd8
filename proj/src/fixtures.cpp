#include "trunclr/fixtures.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "trunclr/dataset_io.hpp"
#include "trunclr/errors.hpp"

namespace trunclr::fixtures {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector desk_w_star() {
  Vector w(5);
  w << 1.0, -1.0, 0.5, 1.0, 0.5;
  return 2.0 * w / w.norm();
}

FeatureDistSpec standard_gaussian(int d) {
  return FeatureDistSpec::gaussian(Vector::Zero(d), Matrix::Identity(d, d));
}

}  // namespace

TruncatedModel desk_model() {
  return TruncatedModel::create(desk_w_star(), IntervalUnion::normalize({{-kInf, -2.0}, {1.0, 2.8}}),
                                standard_gaussian(5));
}

TruncatedModel desk_half_line() {
  return TruncatedModel::create(desk_w_star(), IntervalUnion::normalize({{0.0, kInf}}), standard_gaussian(5));
}

TruncatedModel half_line_1d() {
  return TruncatedModel::create(Vector::Ones(1), IntervalUnion::normalize({{0.0, kInf}}), standard_gaussian(1));
}

TruncatedModel half_line_shifted_1d() {
  return TruncatedModel::create(Vector::Ones(1), IntervalUnion::normalize({{0.0, kInf}}),
                                FeatureDistSpec::gaussian(Vector::Constant(1, 0.5), Matrix::Constant(1, 1, 0.25)));
}

TruncatedModel untruncated(int d) {
  if (d < 1) throw InvalidArgument("untruncated fixture needs d >= 1");
  return TruncatedModel::create(Vector::Ones(d) / std::sqrt(static_cast<double>(d)), IntervalUnion::real_line(),
                                standard_gaussian(d));
}

std::pair<TruncatedModel, TruncatedModel> appendix_e_pair(double b, int d) {
  if (!(b > 1.0)) throw InvalidArgument("appendix_e_pair needs B > 1");
  if (d < 2) throw InvalidArgument("appendix_e_pair needs d >= 2");
  const auto s = IntervalUnion::single(-1.0, 1.0);
  const auto features = FeatureDistSpec::simplex_vertices(d);
  Vector w = Vector::Zero(d);
  w[0] = b;
  return {TruncatedModel::create(w, s, features), TruncatedModel::create(-w, s, features)};
}

double appendix_e_leak_bound(double b, int d, double alpha) {
  return std::exp(-(b - 1.0) * (b - 1.0) / 2.0) / (alpha * static_cast<double>(d));
}

GreedyInstance figure2_instance() {
  GreedyInstance g;
  g.positives = {0.0, 0.4, 1.0, 1.3, 2.0, 2.5, 2.8, 3.0, 6.0, 6.5, 7.2, 8.1};
  g.unlabeled = {4.0, 4.5, 5.0, 0.7, 0.8, 1.6, 2.6, 6.8, 7.0, 9.0, -0.5, 10.0};
  g.k = 2;
  g.eps = 0.2;
  g.expected_discard_count = 5;
  return g;
}

std::vector<std::string> model_fixture_names() {
  return {"desk", "desk_half_line", "half_line_1d", "half_line_shifted_1d", "untruncated", "appendix_e", "appendix_e_neg"};
}

TruncatedModel model_fixture(const std::string& name) {
  if (name == "desk") return desk_model();
  if (name == "desk_half_line") return desk_half_line();
  if (name == "half_line_1d") return half_line_1d();
  if (name == "half_line_shifted_1d") return half_line_shifted_1d();
  if (name == "untruncated") return untruncated(5);
  if (name == "appendix_e") return appendix_e_pair(10.0, 3).first;
  if (name == "appendix_e_neg") return appendix_e_pair(10.0, 3).second;
  std::string known;
  for (const auto& n : model_fixture_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown fixture '" + name + "' (known: " + known + ", figure2)");
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::ostringstream out;
  write_dataset(data, out);
  return fnv1a64(out.str());
}

}  // namespace trunclr::fixtures
