#include "fracsep/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracsep {

bool BarrierSpec::is_slow(int64_t x, int64_t y) const {
    if (kind == BarrierKind::None) return false;
    int64_t lo = std::min(x, y), hi = std::max(x, y);
    if (!(lo < 0 && hi >= 0)) return false;
    if (kind == BarrierKind::Thick) return true;
    return thin_pred && thin_pred(lo, hi);
}

double BarrierSpec::slow_weight(double n) const { return alpha * std::pow(n, -beta); }

double BarrierSpec::max_weight(double n) const {
    if (kind == BarrierKind::None) return 1.0;
    return std::max(1.0, slow_weight(n));
}

void BarrierSpec::validate(const JumpKernel& kernel) const {
    if (kind == BarrierKind::None) {
        if (alpha != 1.0 || beta != 0.0) throw std::domain_error("barrier: 'none' means alpha=1, beta=0");
        return;
    }
    if (!(alpha > 0.0)) throw std::domain_error("barrier: alpha must be positive");
    if (!(beta >= 0.0)) throw std::domain_error("barrier: beta must be nonnegative");
    if (kind == BarrierKind::Thick) return;

    double gamma = kernel.gamma();
    if (!thin_pred) throw std::domain_error("barrier: thin set needs a predicate");
    if (!(delta >= 0.0 && delta <= 1.0) || !(delta > gamma - 1.0))
        throw std::domain_error("barrier: thin exponent must lie in [0,1] and exceed gamma-1");

    // dyadic blocks over bond length d = hi - lo, enumerated up to 2^J
    const int J = 11;
    const int64_t R = int64_t{1} << J;
    std::vector<double> block(J, 0.0);
    for (int64_t lo = -R; lo < 0; ++lo) {
        for (int64_t hi = 0; hi < R; ++hi) {
            if (!thin_pred(lo, hi)) continue;
            double d = static_cast<double>(hi - lo);
            int j = static_cast<int>(std::floor(std::log2(d)));
            if (j >= J) continue;
            block[j] += std::pow(d, delta) * kernel.pmf(hi - lo);
        }
    }
    // fitted log2 decay over the last populated blocks; need strict decay
    std::vector<double> xs, ys;
    for (int j = J - 6; j < J; ++j) {
        if (block[j] <= 0.0) continue;
        xs.push_back(static_cast<double>(j));
        ys.push_back(std::log2(block[j]));
    }
    if (xs.size() >= 3) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0, den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        double slope = num / den;
        if (slope > -0.02)
            throw std::domain_error("barrier: delta-weighted bond mass does not converge numerically");
    }
}

}  // namespace fracsep
