#pragma once

#include <cmath>
#include <string>

#include "ersi/errors.hpp"

namespace ersi {

// Isotropic elastic material at a fixed angular frequency. The compressional
// and shear wavenumbers are derived from (lambda, mu, kappa) at construction
// and cannot be set independently.
class MaterialParams {
 public:
  MaterialParams(double lambda, double mu, double kappa)
      : lambda_(lambda), mu_(mu), kappa_(kappa) {
    if (!(mu > 0.0))
      throw ValidationError("MaterialParams: mu must be positive, got " +
                            std::to_string(mu));
    if (!(lambda + 2.0 * mu > 0.0))
      throw ValidationError("MaterialParams: lambda + 2*mu must be positive");
    if (!(kappa > 0.0))
      throw ValidationError("MaterialParams: kappa must be positive, got " +
                            std::to_string(kappa));
    kappa_p_ = kappa / std::sqrt(lambda + 2.0 * mu);
    kappa_s_ = kappa / std::sqrt(mu);
  }

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double kappa() const { return kappa_; }
  double kappa_p() const { return kappa_p_; }
  double kappa_s() const { return kappa_s_; }

 private:
  double lambda_;
  double mu_;
  double kappa_;
  double kappa_p_;
  double kappa_s_;
};

}  // namespace ersi
