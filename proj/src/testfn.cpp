#include "fracsep/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracsep {

SmoothFn zero_fn() {
    auto z = [](double) { return 0.0; };
    return {z, z, z, 0.0, 0.0};
}

SmoothFn bump(double center, double h, double amp) {
    if (!(h > 0.0)) throw std::domain_error("bump: width must be positive");
    auto val = [=](double u) {
        double s = (u - center) / h;
        if (std::abs(s) >= 1.0) return 0.0;
        return amp * std::exp(1.0 - 1.0 / (1.0 - s * s));
    };
    auto d1 = [=](double u) {
        double s = (u - center) / h;
        if (std::abs(s) >= 1.0) return 0.0;
        double q = 1.0 - s * s;
        double g1 = -2.0 * s / (q * q);
        return amp * std::exp(1.0 - 1.0 / q) * g1 / h;
    };
    auto d2 = [=](double u) {
        double s = (u - center) / h;
        if (std::abs(s) >= 1.0) return 0.0;
        double q = 1.0 - s * s;
        double g1 = -2.0 * s / (q * q);
        double g2 = -2.0 * (1.0 + 3.0 * s * s) / (q * q * q);
        return amp * std::exp(1.0 - 1.0 / q) * (g1 * g1 + g2) / (h * h);
    };
    return {val, d1, d2, center - h, center + h, {center - h, center + h}};
}

namespace {
// quintic smoothstep on [0,1]
double qs(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double dqs(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }
double d2qs(double t) { return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0); }
}  // namespace

SmoothFn plateau(double center, double inner, double outer, double amp) {
    if (!(inner >= 0.0 && outer > inner)) throw std::domain_error("plateau: need 0 <= inner < outer");
    double ramp = outer - inner;
    auto val = [=](double u) {
        double d = std::abs(u - center);
        if (d >= outer) return 0.0;
        if (d <= inner) return amp;
        return amp * (1.0 - qs((d - inner) / ramp));
    };
    auto d1 = [=](double u) {
        double d = std::abs(u - center);
        if (d >= outer || d <= inner) return 0.0;
        double sgn = (u >= center) ? 1.0 : -1.0;
        return -amp * dqs((d - inner) / ramp) * sgn / ramp;
    };
    auto d2 = [=](double u) {
        double d = std::abs(u - center);
        if (d >= outer || d <= inner) return 0.0;
        return -amp * d2qs((d - inner) / ramp) / (ramp * ramp);
    };
    return {val, d1, d2, center - outer, center + outer,
            {center - outer, center - inner, center + inner, center + outer}};
}

SmoothFn tilt(const SmoothFn& base, double a0, double a1) {
    auto bf = base.f, bd = base.df, bdd = base.d2f;
    auto val = [=](double u) { return (a0 + a1 * u) * bf(u); };
    auto d1 = [=](double u) { return a1 * bf(u) + (a0 + a1 * u) * bd(u); };
    auto d2 = [=](double u) { return 2.0 * a1 * bd(u) + (a0 + a1 * u) * bdd(u); };
    return {val, d1, d2, base.lo, base.hi, base.knots};
}

SmoothFn sum(const SmoothFn& a, const SmoothFn& b) {
    auto af = a.f, ad = a.df, add = a.d2f;
    auto bf = b.f, bd = b.df, bdd = b.d2f;
    std::vector<double> kn = a.knots;
    kn.insert(kn.end(), b.knots.begin(), b.knots.end());
    return {[=](double u) { return af(u) + bf(u); }, [=](double u) { return ad(u) + bd(u); },
            [=](double u) { return add(u) + bdd(u); }, std::min(a.lo, b.lo), std::max(a.hi, b.hi),
            std::move(kn)};
}

std::string test_class_name(TestClass c) {
    switch (c) {
        case TestClass::Smooth: return "smooth";
        case TestClass::TwoSided: return "two-sided";
        case TestClass::TwoSidedMatched: return "two-sided-matched";
        case TestClass::VanishNearZero: return "vanish-near-zero";
    }
    return "?";
}

TestFunctionSpec::TestFunctionSpec(TestClass cls, SmoothFn left, SmoothFn right, std::vector<double> tpoly)
    : cls_(cls), left_(std::move(left)), right_(std::move(right)), tpoly_(std::move(tpoly)) {
    if (tpoly_.empty()) tpoly_ = {1.0};
    b_ = std::max({-left_.lo, right_.hi, 0.0});
    if (!(b_ > 0.0)) throw std::domain_error("test function: empty support");
    if (cls_ == TestClass::VanishNearZero) {
        // an identically zero part (empty support markers) imposes no gap constraint
        double inf = std::numeric_limits<double>::infinity();
        double lb = (left_.hi > left_.lo) ? -left_.hi : inf;
        double rb = (right_.hi > right_.lo) ? right_.lo : inf;
        bbar_ = std::min(lb, rb);
        if (!(bbar_ > 0.0))
            throw std::domain_error("test function: parts must vanish on a neighborhood of the origin");
    }
    if (cls_ == TestClass::TwoSidedMatched && std::abs(left_.f(0.0) - right_.f(0.0)) > 1e-12)
        throw std::domain_error("test function: halves must agree at the origin");
}

TestFunctionSpec TestFunctionSpec::smooth(SmoothFn g, std::vector<double> tpoly) {
    SmoothFn copy = g;
    return TestFunctionSpec(TestClass::Smooth, std::move(copy), std::move(g), std::move(tpoly));
}

TestFunctionSpec TestFunctionSpec::two_sided(SmoothFn left, SmoothFn right, std::vector<double> tpoly) {
    return TestFunctionSpec(TestClass::TwoSided, std::move(left), std::move(right), std::move(tpoly));
}

TestFunctionSpec TestFunctionSpec::matched(SmoothFn left, SmoothFn right, std::vector<double> tpoly) {
    return TestFunctionSpec(TestClass::TwoSidedMatched, std::move(left), std::move(right), std::move(tpoly));
}

TestFunctionSpec TestFunctionSpec::vanishing(SmoothFn left, SmoothFn right, std::vector<double> tpoly) {
    return TestFunctionSpec(TestClass::VanishNearZero, std::move(left), std::move(right), std::move(tpoly));
}

int TestFunctionSpec::b_natural() const { return std::max(1, static_cast<int>(std::ceil(b_ - 1e-12))); }

double TestFunctionSpec::inner_radius() const {
    if (cls_ != TestClass::VanishNearZero) throw std::logic_error("inner_radius: class has no inner gap");
    return bbar_;
}

double TestFunctionSpec::tp(double s) const {
    double v = 0.0;
    for (size_t k = tpoly_.size(); k-- > 0;) v = v * s + tpoly_[k];
    return v;
}

double TestFunctionSpec::dtp(double s) const {
    double v = 0.0;
    for (size_t k = tpoly_.size(); k-- > 1;) v = v * s + static_cast<double>(k) * tpoly_[k];
    return v;
}

double TestFunctionSpec::tp_maxabs(double T) const {
    double m = 0.0;
    for (int i = 0; i <= 256; ++i) m = std::max(m, std::abs(tp(T * i / 256.0)));
    return m;
}

TestFunctionSpec::Norms TestFunctionSpec::norms() const {
    Norms n{0.0, 0.0, 0.0};
    const int K = 4096;
    for (int i = -K; i <= K; ++i) {
        double u = b_ * static_cast<double>(i) / K;
        n.f0 = std::max(n.f0, std::abs(shape(u)));
        n.f1 = std::max(n.f1, std::abs(dshape(u)));
        n.f2 = std::max(n.f2, std::abs(d2shape(u)));
    }
    return n;
}

TestFunctionSpec test_function_preset(const std::string& name) {
    if (name == "dif_center") return TestFunctionSpec::smooth(bump(0.0, 1.0));
    if (name == "dif_offset") return TestFunctionSpec::smooth(bump(0.25, 0.75));
    if (name == "dif_plateau") return TestFunctionSpec::smooth(plateau(0.0, 0.3, 1.0));
    if (name == "dif_wide") return TestFunctionSpec::smooth(bump(0.0, 2.0));
    if (name == "rob_gap")
        return TestFunctionSpec::two_sided(plateau(0.0, 0.3, 1.0), plateau(0.0, 0.3, 1.0, 0.4));
    if (name == "rob_slope")
        return TestFunctionSpec::two_sided(tilt(plateau(0.0, 0.4, 1.0), 1.0, 0.8),
                                           tilt(plateau(0.0, 0.4, 1.0, 0.3), 1.0, -0.5));
    if (name == "rob_tight")
        return TestFunctionSpec::two_sided(plateau(0.0, 0.25, 0.9), plateau(0.0, 0.25, 0.85, 0.35));
    if (name == "rob0_kink")
        return TestFunctionSpec::matched(tilt(plateau(0.0, 0.4, 1.0), 1.0, 1.0),
                                         tilt(plateau(0.0, 0.4, 1.0), 1.0, -2.0));
    if (name == "rob0_flat")
        return TestFunctionSpec::matched(plateau(0.0, 0.35, 1.0, 0.8), plateau(0.0, 0.3, 0.9, 0.8));
    if (name == "neu_pair")
        return TestFunctionSpec::vanishing(bump(-1.0, 0.5), bump(1.2, 0.6, 0.7));
    if (name == "neu_tight")
        return TestFunctionSpec::vanishing(bump(-0.6, 0.35), bump(0.6, 0.35, 0.8));
    if (name == "neu_left")
        return TestFunctionSpec::vanishing(bump(-0.9, 0.55), zero_fn());
    throw std::invalid_argument("unknown test function preset: " + name);
}

std::vector<std::string> test_function_preset_names() {
    return {"dif_center", "dif_offset", "dif_plateau", "dif_wide", "rob_gap",  "rob_slope",
            "rob_tight",  "rob0_kink",  "rob0_flat",   "neu_pair", "neu_tight", "neu_left"};
}

}  // namespace fracsep
