#pragma once

#include <cstdint>
#include <vector>

#include "fracsep/rng.hpp"

namespace fracsep {

// Kahan-compensated accumulator
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// sum_{z=1}^{N} z^{-s}
double zeta_partial(double s, uint64_t N);

// sum_{z=N}^{inf} z^{-s} by Euler-Maclaurin (N >= 8, s in (1, 4))
double zeta_tail_from(double s, double N);

// full series sum_{z>=1} z^{-s}, s > 1
double zeta_series(double s);

// c_gamma with p(z) = c_gamma |z|^{-gamma-1} a probability on Z \ {0}:
// c = 1 / (2 sum_{z>=1} z^{-gamma-1}), summed directly to L plus tail correction.
double normalization_constant(double gamma, uint64_t L);

// one-sided mean sum_{z>=1} z p(z) = c_gamma zeta(gamma); requires gamma in (1,2)
double mean_jump(double gamma);

// Symmetric heavy-tailed jump law on Z \ {0}. Sampling: alias table over
// lengths 1..L plus analytic tail bucket (continuous inverse-CDF envelope,
// rounded to the nearest integer > L); sign drawn separately.
class JumpKernel {
  public:
    explicit JumpKernel(double gamma, uint64_t L = 1'000'000);

    double gamma() const { return gamma_; }
    uint64_t truncation() const { return L_; }
    double normalization() const { return c_; }
    double tail_mass() const { return tail_mass_; }

    // p(z), exact formula (valid beyond the table truncation)
    double pmf(int64_t z) const;

    // T(z) = sum_{k > z} p(k), one-sided upper tail; T(0) = 1/2
    double one_sided_tail(int64_t z) const;

    // requires gamma in (1,2)
    double mean() const;

    int64_t sample(Rng& rng) const;

  private:
    double gamma_;
    uint64_t L_;
    double c_;
    double tail_mass_;
    std::vector<double> accept_;
    std::vector<uint32_t> alias_;
};

}  // namespace fracsep
