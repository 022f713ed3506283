#pragma once

#include <cstdint>
#include <utility>

namespace deadpatch {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Quantile of the Beta(a, b) distribution by bisection; tolerance 1e-10 in x.
double beta_quantile(double a, double b, double q);

// Equal-tailed credible interval of Beta(failures+1, shots-failures+1).
std::pair<double, double> beta_ci(uint64_t failures, uint64_t shots, double level = 0.95);

// Posterior median point estimate under the uniform prior.
double beta_posterior_median(uint64_t failures, uint64_t shots);

// Regularized lower incomplete gamma P(a, x).
double incomplete_gamma_p(double a, double x);

// Survival function of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, double k);

// Counter-based RNG: a splitmix64 stream keyed by (seed, stream). Streams
// are independent for distinct keys, so parallel shot loops reproduce serial
// ones bit for bit.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream);
    uint64_t next_u64();
    double next_double();  // uniform in [0, 1)
  private:
    uint64_t state_;
};

}  // namespace deadpatch
