#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fracsep/csvio.hpp"
#include "fracsep/kernel.hpp"
#include "fracsep/process.hpp"
#include "fracsep/testfn.hpp"

namespace fracsep {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

// adaptive 1-D integral (integrable endpoint singularities allowed)
double integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

// Spatial operators act on the shape part of G; polynomial time factors are
// applied by callers.

// generator form on the full line: c_gamma int (G(u+w)+G(u-w)-2G(u)) w^{-1-gamma} dw, w > 0
double frac_laplacian(const TestFunctionSpec& G, double u, double gamma, const QuadOptions& opt = {});

// restriction to the open half-line containing u; zero at u = 0.
// gamma in (0,1] requires the vanish-near-zero class.
double regional_frac_laplacian(const TestFunctionSpec& G, double u, double gamma, const QuadOptions& opt = {});

struct OriginDerivative {
    double value = 0.0;
    bool converged = false;
    double err_estimate = 0.0;
};

// -lim_{u->0+} f'(side * u) u^{2-gamma}, dyadic sequence with Aitken acceleration
OriginDerivative frac_derivative_at_origin(const std::function<double(double)>& fprime, Side side, double gamma);

// n^gamma sum_z [G((x+z)/n) - G(x/n)] p(z); support truncation is exact, the
// off-support remainder is folded in through sum_z p(z) = 1
double discrete_generator_apply(const TestFunctionSpec& G, int64_t x, double n, const JumpKernel& kernel);

// n^gamma sum over same-side targets y (thick-barrier fast bonds)
double fast_bond_sum(const TestFunctionSpec& G, int64_t x, double n, const JumpKernel& kernel);

// n^{gamma-beta} sum over opposite-side targets y (thick-barrier slow bonds, unit alpha)
double slow_bond_sum(const TestFunctionSpec& G, int64_t x, double n, double beta, const JumpKernel& kernel);

// |sum_{z>=0} sum_{x<0} p(z-x) ([G(z/n)-G(x/n)] - [G(0+)-G(0-)])|, evaluated by
// the exact one-sided-tail rearrangement; gamma in (1,2)
double robin_boundary_sum(const TestFunctionSpec& G, double n, const JumpKernel& kernel);

// cell-centered grid function on [a, a + cells*h)
struct GridFunction {
    double a = 0.0;
    double h = 0.0;
    std::vector<double> v;

    double center(size_t i) const { return a + (static_cast<double>(i) + 0.5) * h; }
    size_t cells() const { return v.size(); }

    static GridFunction sample(const std::function<double(double)>& fn, double a, double b, size_t cells);
    GridFunction coarsen() const;  // pairwise cell averaging, halves the resolution
};

void write_grid_csv(std::ostream& os, const GridFunction& f, const CsvMeta& meta);
GridFunction read_grid_csv(std::istream& is);

enum class Interval { FullLine, LeftHalf, RightHalf };

// Chord weights pairs by the exact second kernel moment of the cell pair over
// the squared center distance (exact on linear data, robust on rough data);
// ChordCubic adds discrete third-derivative corrections with exact fourth
// moments (exact on cubic data, for smooth integrands only)
enum class PairModel { Chord, ChordCubic };

// sum over cell pairs of [f_i - f_j][g_i - g_j] * pair weight; the diagonal
// uses a local-slope model
double gagliardo_pair_sum(const GridFunction& f, const GridFunction& g, Interval I, double gamma,
                          PairModel model = PairModel::Chord);

struct SeminormResult {
    double value = 0.0;               // finest level
    std::array<double, 3> levels{};   // h, 2h, 4h
    bool divergent = false;
};

// unnormalized squared Gagliardo seminorm over I^2 with a refinement-based
// divergence diagnostic
SeminormResult sobolev_seminorm(const GridFunction& f, Interval I, double gamma);

// |int_I rho Op(G) du + (c_gamma/2) * pair sum|, Op = full-line or regional
// generator form matching I
double ibp_residual(const GridFunction& rho, const TestFunctionSpec& G, Interval I, double gamma);

enum class ConvergenceVariant { Full, Regional, Slow, RobinConstant };

struct ConvergenceReport {
    ConvergenceVariant variant;
    double gamma = 0.0;
    double beta = 0.0;
    std::vector<int> n;
    std::vector<double> error;
    bool strictly_decreasing() const;
    double final_over_first() const;
};

// site-averaged deviation between the scaled lattice sums and their continuum
// targets over x in [-(2b+2)n, (2b+2)n]; RobinConstant rows hold the scalar
// boundary-sum residual
ConvergenceReport operator_convergence_report(ConvergenceVariant variant, const TestFunctionSpec& G,
                                              double gamma, double beta, const std::vector<int>& n_list,
                                              double horizon);

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r, const CsvMeta& meta);

}  // namespace fracsep
