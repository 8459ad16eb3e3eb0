#pragma once

namespace tsqc {

/// Comparison thresholds for a scalar type.
///
/// `norm` is used for every algebraic comparison (unit norm, projector
/// identities, distribution sums, deviation gates). `prob` decides when a
/// probability counts as exactly zero. `renormalize` is the largest norm
/// deviation a constructor will silently fix.
template <typename Real>
struct Tolerance {
  static constexpr Real norm = Real(1e-10);
  static constexpr Real prob = Real(1e-12);
  static constexpr Real renormalize = Real(1e-6);
};

template <>
struct Tolerance<float> {
  static constexpr float norm = 1e-5f;
  static constexpr float prob = 1e-7f;
  static constexpr float renormalize = 1e-3f;
};

inline constexpr double kEpsNorm = Tolerance<double>::norm;
inline constexpr double kEpsProb = Tolerance<double>::prob;
inline constexpr double kEpsCoten = kEpsNorm;

}  // namespace tsqc
