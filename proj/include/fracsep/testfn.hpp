#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracsep {

// twice continuously differentiable function with compact support [lo, hi];
// knots lists the joints of the piecewise definition (quadrature split points)
struct SmoothFn {
    std::function<double(double)> f, df, d2f;
    double lo = 0.0, hi = 0.0;
    std::vector<double> knots{};
};

SmoothFn zero_fn();
// classic mollifier bump, peak amp at center, support [center-h, center+h]
SmoothFn bump(double center, double h, double amp = 1.0);
// flat top of height amp on [c-inner, c+inner], quintic C^2 shoulders to zero at c+-outer
SmoothFn plateau(double center, double inner, double outer, double amp = 1.0);
// (a0 + a1 u) * base(u)
SmoothFn tilt(const SmoothFn& base, double a0, double a1);
SmoothFn sum(const SmoothFn& a, const SmoothFn& b);

// Regularity classes for the weak formulations:
//   Smooth          - one C^2_c function on the whole line
//   TwoSided        - independent C^2 halves, jump at the origin allowed
//   TwoSidedMatched - continuous at the origin, kink allowed
//   VanishNearZero  - identically zero on a neighborhood [-bbar, bbar]
enum class TestClass { Smooth, TwoSided, TwoSidedMatched, VanishNearZero };

std::string test_class_name(TestClass c);

// G(s,u) = tp(s) * shape(u), shape split into halves at the origin
// (u >= 0 uses the right half). tp is a polynomial in time, default 1.
class TestFunctionSpec {
  public:
    static TestFunctionSpec smooth(SmoothFn g, std::vector<double> tpoly = {1.0});
    static TestFunctionSpec two_sided(SmoothFn left, SmoothFn right, std::vector<double> tpoly = {1.0});
    static TestFunctionSpec matched(SmoothFn left, SmoothFn right, std::vector<double> tpoly = {1.0});
    static TestFunctionSpec vanishing(SmoothFn left, SmoothFn right, std::vector<double> tpoly = {1.0});

    TestClass cls() const { return cls_; }
    const SmoothFn& left() const { return left_; }
    const SmoothFn& right() const { return right_; }

    double support_radius() const { return b_; }
    int b_natural() const;          // minimal natural b with G = 0 off [-b, b]
    double inner_radius() const;    // bbar, VanishNearZero only

    double shape(double u) const { return u < 0 ? left_.f(u) : right_.f(u); }
    double dshape(double u) const { return u < 0 ? left_.df(u) : right_.df(u); }
    double d2shape(double u) const { return u < 0 ? left_.d2f(u) : right_.d2f(u); }

    double operator()(double s, double u) const { return tp(s) * shape(u); }
    double dt(double s, double u) const { return dtp(s) * shape(u); }

    double left_at_zero(double s) const { return tp(s) * left_.f(0.0); }
    double right_at_zero(double s) const { return tp(s) * right_.f(0.0); }

    double tp(double s) const;
    double dtp(double s) const;
    double tp_maxabs(double T) const;
    const std::vector<double>& tpoly() const { return tpoly_; }

    // sup of |shape|, |shape'|, |shape''| by dense sampling
    struct Norms {
        double f0, f1, f2;
    };
    Norms norms() const;

  private:
    TestFunctionSpec(TestClass cls, SmoothFn left, SmoothFn right, std::vector<double> tpoly);

    TestClass cls_;
    SmoothFn left_, right_;
    std::vector<double> tpoly_;
    double b_ = 0.0;
    double bbar_ = 0.0;
};

// named presets used by the CLI and the acceptance runs
TestFunctionSpec test_function_preset(const std::string& name);
std::vector<std::string> test_function_preset_names();

}  // namespace fracsep
