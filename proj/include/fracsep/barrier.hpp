#pragma once

#include <cstdint>
#include <functional>

#include "fracsep/kernel.hpp"

namespace fracsep {

enum class BarrierKind { None, Thin, Thick };

// Slowed bonds live across the origin: {x,y} with x < 0 <= y. Thick = all of
// them; Thin = a predicate subset that keeps a finite delta-weighted mass.
struct BarrierSpec {
    BarrierKind kind = BarrierKind::None;
    double alpha = 1.0;
    double beta = 0.0;
    double delta = 1.0;
    std::function<bool(int64_t, int64_t)> thin_pred;  // called with x < 0 <= y

    static BarrierSpec none() { return {}; }

    static BarrierSpec thick(double alpha, double beta) {
        BarrierSpec b;
        b.kind = BarrierKind::Thick;
        b.alpha = alpha;
        b.beta = beta;
        return b;
    }

    // the canonical thin set: bonds {x,0} from the left column into the origin
    static BarrierSpec thin_origin_column(double alpha, double beta, double delta) {
        BarrierSpec b;
        b.kind = BarrierKind::Thin;
        b.alpha = alpha;
        b.beta = beta;
        b.delta = delta;
        b.thin_pred = [](int64_t, int64_t y) { return y == 0; };
        return b;
    }

    static BarrierSpec thin_custom(double alpha, double beta, double delta,
                                   std::function<bool(int64_t, int64_t)> pred) {
        BarrierSpec b;
        b.kind = BarrierKind::Thin;
        b.alpha = alpha;
        b.beta = beta;
        b.delta = delta;
        b.thin_pred = std::move(pred);
        return b;
    }

    bool is_slow(int64_t x, int64_t y) const;

    // alpha * n^-beta
    double slow_weight(double n) const;

    // envelope headroom: slowed bonds may be amplified when alpha n^-beta > 1
    double max_weight(double n) const;

    // domain checks; for Thin also a numeric test that the delta-weighted bond
    // mass converges (dyadic blocks with a fitted decay exponent)
    void validate(const JumpKernel& kernel) const;
};

}  // namespace fracsep
