#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracsep/barrier.hpp"
#include "fracsep/testfn.hpp"

namespace fracsep {

enum class ProfileKind { Constant, Step, Bump };

// Flat key = value document with dotted sections and '#' comments. Every field
// has a default; canonical() always re-emits the full key set in a fixed order
// so parse(canonical()) round-trips losslessly and the hash is stable.
struct ExperimentConfig {
    double gamma = 1.5;                // model.gamma
    std::string barrier_kind = "none"; // barrier.kind: none | thin | thick
    double alpha = 1.0;                // barrier.alpha
    double beta = 0.0;                 // barrier.beta
    double delta = 1.0;                // barrier.delta (thin only)

    ProfileKind profile = ProfileKind::Constant;  // profile.kind
    double profile_a = 0.5;                       // profile.a
    double profile_left = 0.2;                    // profile.left
    double profile_right = 0.8;                   // profile.right
    double profile_base = 0.3;                    // profile.base
    double profile_center = 0.0;                  // profile.center
    double profile_width = 1.0;                   // profile.width
    double profile_amp = 0.4;                     // profile.amp

    std::vector<int64_t> n_list = {64};           // run.n_list
    int64_t replicas = 30;                        // run.replicas
    double horizon = 0.1;                         // run.horizon
    uint64_t seed = 1;                            // run.seed
    int threads = 1;                              // run.threads
    std::string output_dir;                       // run.output_dir ("": env or cwd)

    double box_radius = 8.0;                      // compare.box_radius
    int64_t n_pde = 512;                          // compare.n_pde
    std::vector<double> times;                    // compare.times ("": quarter points)

    std::vector<std::string> test_functions = {"dif_center"};  // test_functions

    BarrierSpec barrier() const;
    std::function<double(double)> profile_fn() const;
    std::vector<TestFunctionSpec> test_function_specs() const;
    std::vector<double> snapshot_times() const;  // times, or quarter points of horizon
    std::string canonical() const;
};

// validates everything and reports ALL violations at once, not just the first
ExperimentConfig parse_config(const std::string& text);

// FNV-1a over the exact byte content, 16 hex digits
std::string config_hash_hex(const std::string& text);

}  // namespace fracsep
