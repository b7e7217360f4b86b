#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracsep/barrier.hpp"
#include "fracsep/csvio.hpp"
#include "fracsep/fracops.hpp"
#include "fracsep/kernel.hpp"
#include "fracsep/testfn.hpp"

namespace fracsep {

enum class Equation { FullLineFractional, MixedKappa, FractionalNeumann, FractionalRobin, RegionalNoUniq };

std::string equation_name(Equation e);

// limit equation selected by (gamma, barrier); kappa is the coupling constant
// between the two half-lines where one applies
struct RegimeSpec {
    Equation equation = Equation::FullLineFractional;
    double gamma = 0.0;
    double kappa = 0.0;
    TestClass test_class = TestClass::Smooth;
};

// Five-case table keyed on gamma and the barrier: no barrier or a thin set
// keeps the free equation; a thick set with beta = 0 mixes the full and
// regional operators with kappa = alpha (alpha = 1 degenerates to the free
// case); beta > 0 decouples the half-lines except at the critical exponent
// beta = gamma - 1 where kappa = alpha * (one-sided mean).
RegimeSpec classify_regime(double gamma, const BarrierSpec& barrier);

std::string regime_json(const RegimeSpec& r);

// cell i holds lattice site x = i - W, occupying [x/n, (x+1)/n)
struct HydroSolution {
    RegimeSpec regime;
    double n = 0.0;
    int64_t W = 0;
    bool periodic = false;
    std::vector<double> times;
    std::vector<GridFunction> density;

    const GridFunction& at_time(double t) const;
};

struct SolveOptions {
    double dt = 0.0;        // 0: 0.2 / (n^gamma * max(1, slow weight))
    int64_t window = 0;     // sites per side; 0: 8n
    bool periodic = false;  // ring of 2W sites with the wrapped kernel; barrier must be None
};

// Expected-occupation lattice ODE at time scale n^gamma:
//   d rho_x/dt = n^gamma sum_y p(y-x) w_{x,y} (rho_y - rho_x),
// w = alpha n^-beta across the slow set, 1 elsewhere, restricted to the site
// window. RK4 in time, FFT convolution in space, exact in-window masses via
// kernel tails. Snapshot times are hit exactly; rejects steps past the
// stability bound with a suggested step.
HydroSolution solve_hydro(const RegimeSpec& regime, const std::function<double(double)>& g, double T,
                          int n_grid, const BarrierSpec& barrier, std::vector<double> times = {},
                          const SolveOptions& opts = {});

// block means of the cells_per_side cells left/right of the origin
struct OriginTraces {
    double left = 0.0;
    double right = 0.0;
};
OriginTraces origin_traces(const GridFunction& rho, int cells_per_side = 8);

enum class WeakForm { FrDif, FrRob, FrDif2 };

// Weak-formulation defect at time t (must be a snapshot time):
//   [final pairing] - [initial pairing] - int_0^t [operator + time-derivative pairing]
//   + kappa * 1_{gamma in (1,2)} * int_0^t [trace jump][G gap]   (FrRob only)
// FrDif pairs against the full-line operator, FrRob against the regional one,
// FrDif2 against kappa*full + (1-kappa)*regional. Off-window density is frozen
// at the initial profile. Throws on a test-class/form mismatch.
double weak_residual(const HydroSolution& sol, const TestFunctionSpec& G,
                     const std::function<double(double)>& g, double kappa, double t, WeakForm form);

struct BoundaryDiagnostics {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double jump = 0.0;       // rho(t,0+) - rho(t,0-), from the layer fits
    double ratio = 0.0;      // d_plus / jump; NaN when the jump is negligible
    bool converged = false;  // half-layer refit agrees within 20% (plus a 1e-6 floor)
};

// Fits rho ~ b0 + b1 |u|^{gamma-1} on each side layer |u| <= 0.25 and reads
// the fractional layer derivatives off b1. Regimes with a decoupling barrier
// and gamma in (1,2) only.
BoundaryDiagnostics boundary_condition_check(const HydroSolution& sol, double t);

// sup over snapshot times t of |int_0^t (trace jump at s) ds|; RegionalNoUniq only
double continuity_at_origin_check(const HydroSolution& sol);

// rows: time,site,u,rho
void write_hydro_csv(std::ostream& os, const HydroSolution& sol, const CsvMeta& meta);

}  // namespace fracsep
