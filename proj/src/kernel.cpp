#include "fracsep/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace fracsep {

double zeta_partial(double s, uint64_t N) {
    KahanSum acc;
    for (uint64_t z = N; z >= 1; --z) acc.add(std::pow(static_cast<double>(z), -s));
    return acc.value();
}

double zeta_tail_from(double s, double N) {
    double t1 = std::pow(N, 1.0 - s) / (s - 1.0);
    double t2 = 0.5 * std::pow(N, -s);
    double t3 = s * std::pow(N, -s - 1.0) / 12.0;
    double t4 = -s * (s + 1.0) * (s + 2.0) * std::pow(N, -s - 3.0) / 720.0;
    double t5 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(N, -s - 5.0) / 30240.0;
    return t1 + t2 + t3 + t4 + t5;
}

double zeta_series(double s) {
    if (!(s > 1.0)) throw std::domain_error("zeta_series: need s > 1");
    const uint64_t N = 1 << 16;
    return zeta_partial(s, N - 1) + zeta_tail_from(s, static_cast<double>(N));
}

double normalization_constant(double gamma, uint64_t L) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("normalization_constant: gamma must lie in (0,2)");
    if (L < 16) throw std::domain_error("normalization_constant: truncation too small");
    double s = gamma + 1.0;
    double total = zeta_partial(s, L) + zeta_tail_from(s, static_cast<double>(L) + 1.0);
    return 1.0 / (2.0 * total);
}

double mean_jump(double gamma) {
    if (!(gamma > 1.0 && gamma < 2.0)) throw std::domain_error("mean_jump: finite only for gamma in (1,2)");
    return normalization_constant(gamma, 1 << 16) * zeta_series(gamma);
}

JumpKernel::JumpKernel(double gamma, uint64_t L) : gamma_(gamma), L_(L) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("JumpKernel: gamma must lie in (0,2)");
    if (L < 16 || L > (1u << 30)) throw std::domain_error("JumpKernel: bad truncation");
    c_ = normalization_constant(gamma, L);
    tail_mass_ = 2.0 * c_ * zeta_tail_from(gamma + 1.0, static_cast<double>(L) + 1.0);

    // Vose alias table over cells 0..L-1 (length z = cell+1) and cell L (tail bucket)
    size_t N = static_cast<size_t>(L) + 1;
    std::vector<double> scaled(N);
    for (size_t k = 0; k + 1 < N; ++k)
        scaled[k] = 2.0 * c_ * std::pow(static_cast<double>(k + 1), -gamma - 1.0) * static_cast<double>(N);
    scaled[N - 1] = tail_mass_ * static_cast<double>(N);

    accept_.assign(N, 1.0);
    alias_.assign(N, 0);
    std::vector<uint32_t> small, large;
    small.reserve(N);
    large.reserve(N);
    for (size_t k = 0; k < N; ++k) (scaled[k] < 1.0 ? small : large).push_back(static_cast<uint32_t>(k));
    while (!small.empty() && !large.empty()) {
        uint32_t s = small.back();
        small.pop_back();
        uint32_t g = large.back();
        accept_[s] = scaled[s];
        alias_[s] = g;
        scaled[g] = (scaled[g] + scaled[s]) - 1.0;
        if (scaled[g] < 1.0) {
            large.pop_back();
            small.push_back(g);
        }
    }
    for (uint32_t k : large) accept_[k] = 1.0;
    for (uint32_t k : small) accept_[k] = 1.0;
}

double JumpKernel::pmf(int64_t z) const {
    if (z == 0) return 0.0;
    return c_ * std::pow(std::abs(static_cast<double>(z)), -gamma_ - 1.0);
}

double JumpKernel::one_sided_tail(int64_t z) const {
    if (z < 0) throw std::domain_error("one_sided_tail: need z >= 0");
    double n = static_cast<double>(z) + 1.0;
    if (z < 1024) {
        // direct up to a smooth start point for the tail expansion
        KahanSum acc;
        for (uint64_t k = static_cast<uint64_t>(z) + 1; k < 2048; ++k)
            acc.add(std::pow(static_cast<double>(k), -gamma_ - 1.0));
        return c_ * (acc.value() + zeta_tail_from(gamma_ + 1.0, 2048.0));
    }
    return c_ * zeta_tail_from(gamma_ + 1.0, n);
}

double JumpKernel::mean() const { return mean_jump(gamma_); }

int64_t JumpKernel::sample(Rng& rng) const {
    size_t N = static_cast<size_t>(L_) + 1;
    double u = rng.uniform01() * static_cast<double>(N);
    size_t cell = static_cast<size_t>(u);
    if (cell >= N) cell = N - 1;
    double frac = u - static_cast<double>(cell);
    if (frac >= accept_[cell]) cell = alias_[cell];

    int64_t len;
    if (cell + 1 < N) {
        len = static_cast<int64_t>(cell) + 1;
    } else {
        // tail bucket: Pareto envelope on [L + 1/2, inf), rounded
        double v = 1.0 - rng.uniform01();  // in (0,1]
        double x = (static_cast<double>(L_) + 0.5) * std::pow(v, -1.0 / gamma_);
        len = (x > 4.0e18) ? (int64_t{1} << 62) : static_cast<int64_t>(std::llround(x));
        if (len <= static_cast<int64_t>(L_)) len = static_cast<int64_t>(L_) + 1;
    }
    return (rng.next_u64() & 1) ? len : -len;
}

}  // namespace fracsep
