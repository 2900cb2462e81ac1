#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "relcd/rcm.hpp"
#include "relcd/skeleton.hpp"

namespace relcd {

/// Linear Gaussian parametrization with average aggregation.
struct LinearGaussianParams {
  std::map<RelationalDependency, double> beta;  // keyed by directed dependency
  double noise_sd = 0.1;
  double coeff_sd = 0.1;

  bool operator==(const LinearGaussianParams&) const = default;
};

/// beta = 1 + |gamma|, gamma ~ N(0, coeff_sd^2), one per dependency.
LinearGaussianParams parametrize(const Model& m, std::uint64_t seed, double noise_sd = 0.1, double coeff_sd = 0.1);

/// i.X = sum over parents P.Y of beta * mean{j.Y : j in P|_i} + eps. Empty
/// parent sets contribute 0. Noise is drawn per (attribute, item) in id
/// order, so values do not depend on insertion order.
AttrData generate_data(const Model& m, const LinearGaussianParams& p, const Skeleton& sk, std::uint64_t seed);

struct RcmGenConfig {
  std::vector<int> hop_choices{2, 3, 4};
  int max_parents = 3;
  int max_retries = 1000;
  /// Extra acceptance test on a candidate model, e.g. "its CPRCM has a
  /// directed dependency". Unset means accept.
  std::function<bool(const Model&)> accept;
};

/// Random acyclic RCM with floor(3|A|/2) dependencies, every attribute
/// class involved. Throws GenerationExhausted after max_retries.
Model random_rcm(const Schema& s, std::uint64_t seed, const RcmGenConfig& cfg = {});

}  // namespace relcd
